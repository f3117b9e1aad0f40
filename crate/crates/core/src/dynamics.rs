//! Sequences of unilateral deviations by women, applied one at a time to a
//! stated profile and judged against a fixed true profile.

use std::collections::HashMap;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::engine::gs_m;
use crate::error::Result;
use crate::explore::explore;
use crate::model::{is_stable, with_list, Matching, PreferenceList, Profile};
use crate::nash::find_all_p_stable_manipulations;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Payoff {
    Improved,
    Worsened,
    Unchanged,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DynamicsStep {
    pub actor: usize,
    pub list_used: PreferenceList,
    pub profile_after: Profile,
    pub matching_before: Matching,
    pub matching_after: Matching,
    pub p_stable_after: bool,
    /// Change for the actor, judged by her true list.
    pub payoff_delta: Payoff,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Mode {
    /// Only deviations whose outcome is stable under the true profile.
    PStableOnly,
    /// Any deviation that improves the actor's partner.
    Any,
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "p-stable" | "pstable" => Ok(Mode::PStableOnly),
            "any" => Ok(Mode::Any),
            other => Err(format!("unknown mode `{other}`")),
        }
    }
}

/// Applies `list` for `woman` and classifies the result.
pub fn apply_manipulation(
    truth: &Profile,
    stated: &Profile,
    woman: usize,
    list: PreferenceList,
) -> Result<DynamicsStep> {
    truth.check_same_size(stated)?;
    let before = gs_m(stated).matching;
    let after_profile = with_list(stated, woman, list.clone())?;
    let after = gs_m(&after_profile).matching;
    let p_w = truth.woman_list(woman)?;
    let (old, new) = (before.man_of(woman), after.man_of(woman));
    let payoff_delta = if p_w.ranks_above(new, old) {
        Payoff::Improved
    } else if p_w.ranks_above(old, new) {
        Payoff::Worsened
    } else {
        Payoff::Unchanged
    };
    Ok(DynamicsStep {
        actor: woman,
        list_used: list,
        p_stable_after: is_stable(truth, &after)?,
        profile_after: after_profile,
        matching_before: before,
        matching_after: after,
        payoff_delta,
    })
}

/// Lets the lowest-index woman with an improving deviation play her best
/// one. `None` means `stated` is a fixed point for `mode`.
pub fn best_response_step(truth: &Profile, stated: &Profile, mode: Mode) -> Result<Option<DynamicsStep>> {
    truth.check_same_size(stated)?;
    let choice = match mode {
        Mode::PStableOnly => find_all_p_stable_manipulations(truth, stated)?
            .into_iter()
            .next()
            .map(|w| (w.woman, w.new_list)),
        Mode::Any => {
            let current = gs_m(stated).matching;
            let mut found = None;
            for woman in 0..stated.size() {
                let p_w = truth.woman_list(woman)?;
                let set = explore(stated, woman)?;
                let best = set
                    .men
                    .iter()
                    .copied()
                    .min_by_key(|&m| p_w.rank(m))
                    .expect("non-empty");
                if p_w.ranks_above(best, current.man_of(woman)) {
                    found = Some((woman, set.witness[&best].clone()));
                    break;
                }
            }
            found
        }
    };
    choice
        .map(|(woman, list)| apply_manipulation(truth, stated, woman, list))
        .transpose()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum ScriptCommand {
    Deviate { woman: usize, list: PreferenceList },
    Auto(Mode),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Termination {
    /// No woman had a deviation of the requested kind.
    FixedPoint,
    /// The profile after step `repeated_at` was already seen after step
    /// `first_seen` (0 = the starting profile).
    Cycle { first_seen: usize, repeated_at: usize },
    StepLimit,
    /// A script ran to its end.
    ScriptEnd,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DynamicsRun {
    pub steps: Vec<DynamicsStep>,
    pub termination: Termination,
}

impl DynamicsRun {
    pub fn final_profile<'a>(&'a self, start: &'a Profile) -> &'a Profile {
        self.steps.last().map_or(start, |s| &s.profile_after)
    }
}

pub const DEFAULT_MAX_STEPS: usize = 100;

struct Runner<'a> {
    truth: &'a Profile,
    current: Profile,
    seen: HashMap<Profile, usize>,
    steps: Vec<DynamicsStep>,
}

impl<'a> Runner<'a> {
    fn new(truth: &'a Profile, start: &Profile) -> Self {
        Runner {
            truth,
            current: start.clone(),
            seen: HashMap::from([(start.clone(), 0)]),
            steps: Vec::new(),
        }
    }

    /// Records `step`; returns the cycle it closes, if any.
    fn push(&mut self, step: DynamicsStep) -> Option<Termination> {
        self.current = step.profile_after.clone();
        self.steps.push(step);
        let at = self.steps.len();
        self.seen
            .insert(self.current.clone(), at)
            .map(|first_seen| Termination::Cycle {
                first_seen,
                repeated_at: at,
            })
    }

    fn finish(self, termination: Termination) -> DynamicsRun {
        DynamicsRun {
            steps: self.steps,
            termination,
        }
    }
}

/// Iterates best responses until a fixed point, a repeated profile, or
/// `max_steps` steps. Nothing guarantees convergence in general.
pub fn run_auto(truth: &Profile, start: &Profile, mode: Mode, max_steps: usize) -> Result<DynamicsRun> {
    let mut runner = Runner::new(truth, start);
    loop {
        if runner.steps.len() >= max_steps {
            return Ok(runner.finish(Termination::StepLimit));
        }
        let Some(step) = best_response_step(runner.truth, &runner.current, mode)? else {
            return Ok(runner.finish(Termination::FixedPoint));
        };
        if let Some(cycle) = runner.push(step) {
            return Ok(runner.finish(cycle));
        }
    }
}

/// Replays a script. `auto` lines take one best-response step; an `auto`
/// line with nothing to do ends the run at a fixed point.
pub fn run_script(
    truth: &Profile,
    start: &Profile,
    script: &[ScriptCommand],
    max_steps: usize,
) -> Result<DynamicsRun> {
    let mut runner = Runner::new(truth, start);
    for cmd in script {
        if runner.steps.len() >= max_steps {
            return Ok(runner.finish(Termination::StepLimit));
        }
        let step = match cmd {
            ScriptCommand::Deviate { woman, list } => {
                apply_manipulation(truth, &runner.current, *woman, list.clone())?
            }
            ScriptCommand::Auto(mode) => match best_response_step(truth, &runner.current, *mode)? {
                Some(step) => step,
                None => return Ok(runner.finish(Termination::FixedPoint)),
            },
        };
        // Scripted replays may revisit profiles on purpose; only auto runs stop on cycles.
        runner.push(step);
    }
    Ok(runner.finish(Termination::ScriptEnd))
}
