//! JSON documents and plain-text tables for each subcommand. People are
//! always rendered by their labels from the instance file.

use std::fmt::Write as _;

use serde::Serialize;
use stablenash_core::dynamics::{DynamicsRun, Payoff, Termination};
use stablenash_core::format::{write_profile, Labels};
use stablenash_core::model::{is_stable, Matching, Profile, Side};
use stablenash_core::nash::{ManipulationWitness, NashVerdict};
use stablenash_core::oracle::{ClaimResult, Reproducer};

pub type Pairs = Vec<(String, String)>;

#[derive(Serialize)]
pub struct MatchReport {
    pub n: usize,
    pub matching: Pairs,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trace: Option<Vec<String>>,
}

#[derive(Serialize)]
pub struct AttainableEntry {
    pub man: String,
    pub list: Vec<String>,
}

#[derive(Serialize)]
pub struct ExploreReport {
    pub woman: String,
    pub partner: String,
    pub attainable: Vec<AttainableEntry>,
    pub best_under_stated: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub best_under_truth: Option<String>,
}

#[derive(Serialize)]
pub struct WitnessReport {
    pub woman: String,
    pub list: Vec<String>,
    pub partner_before: String,
    pub partner_after: String,
    pub matching: Pairs,
    pub p_stable: bool,
}

#[derive(Serialize)]
pub struct NashReport {
    pub status: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<WitnessReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub manipulations: Option<Vec<WitnessReport>>,
}

pub fn witness(labels: &Labels, truth: &Profile, w: &ManipulationWitness) -> WitnessReport {
    WitnessReport {
        woman: labels.woman(w.woman).to_string(),
        list: labels.list(Side::Woman, &w.new_list),
        partner_before: labels.man(w.old_partner).to_string(),
        partner_after: labels.man(w.new_partner).to_string(),
        matching: labels.pairs(&w.new_matching),
        p_stable: is_stable(truth, &w.new_matching).expect("sizes agree"),
    }
}

pub fn nash(labels: &Labels, truth: &Profile, verdict: &NashVerdict) -> NashReport {
    NashReport {
        status: if verdict.is_equilibrium() {
            "equilibrium"
        } else {
            "not-equilibrium"
        },
        witness: verdict.witness().map(|w| witness(labels, truth, w)),
        manipulations: None,
    }
}

pub fn matching_table(labels: &Labels, matching: &Matching) -> String {
    let mut out = String::from("man  woman\n");
    for (m, w) in labels.pairs(matching) {
        let _ = writeln!(out, "{m:<4} {w}");
    }
    out
}

pub fn witness_text(w: &WitnessReport) -> String {
    let pairs: Vec<String> = w.matching.iter().map(|(m, x)| format!("({m},{x})")).collect();
    format!(
        "woman {} moves from {} to {} by stating: {}\nresulting matching: {}\nstable under the true profile: {}\n",
        w.woman,
        w.partner_before,
        w.partner_after,
        w.list.join(" "),
        pairs.join(" "),
        if w.p_stable { "yes" } else { "no" },
    )
}

#[derive(Serialize)]
pub struct StepReport {
    pub step: usize,
    pub actor: String,
    pub list: Vec<String>,
    pub partner_before: String,
    pub partner_after: String,
    pub payoff: &'static str,
    pub p_stable: bool,
    pub matching: Pairs,
}

#[derive(Serialize)]
pub struct DynamicsReport {
    pub termination: serde_json::Value,
    pub steps: Vec<StepReport>,
}

fn payoff(p: Payoff) -> &'static str {
    match p {
        Payoff::Improved => "improved",
        Payoff::Worsened => "worsened",
        Payoff::Unchanged => "unchanged",
    }
}

pub fn dynamics(labels: &Labels, run: &DynamicsRun) -> DynamicsReport {
    let steps = run
        .steps
        .iter()
        .enumerate()
        .map(|(i, s)| StepReport {
            step: i + 1,
            actor: labels.woman(s.actor).to_string(),
            list: labels.list(Side::Woman, &s.list_used),
            partner_before: labels.man(s.matching_before.man_of(s.actor)).to_string(),
            partner_after: labels.man(s.matching_after.man_of(s.actor)).to_string(),
            payoff: payoff(s.payoff_delta),
            p_stable: s.p_stable_after,
            matching: labels.pairs(&s.matching_after),
        })
        .collect();
    let termination = match run.termination {
        Termination::FixedPoint => serde_json::json!("fixed-point"),
        Termination::StepLimit => serde_json::json!("step-limit"),
        Termination::ScriptEnd => serde_json::json!("script-end"),
        Termination::Cycle {
            first_seen,
            repeated_at,
        } => serde_json::json!({"cycle": {"first_seen": first_seen, "repeated_at": repeated_at}}),
    };
    DynamicsReport { termination, steps }
}

pub fn dynamics_text(report: &DynamicsReport) -> String {
    let mut out = String::from("step  woman  list             partner    payoff     p-stable\n");
    for s in &report.steps {
        let _ = writeln!(
            out,
            "{:<5} {:<6} {:<16} {:>3} -> {:<3} {:<10} {}",
            s.step,
            s.actor,
            s.list.join(" "),
            s.partner_before,
            s.partner_after,
            s.payoff,
            if s.p_stable { "yes" } else { "no" }
        );
    }
    let end = match &report.termination {
        serde_json::Value::String(s) => s.clone(),
        other => format!("cycle {}", other["cycle"]),
    };
    let _ = writeln!(out, "stopped: {end}");
    out
}

#[derive(Serialize)]
pub struct ReproducerReport {
    pub instance: String,
    pub stated: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub truth: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub deviator: Option<String>,
    pub lists: Vec<Vec<String>>,
    pub detail: String,
}

#[derive(Serialize)]
pub struct ClaimTally {
    pub claim: String,
    pub checked: usize,
    pub failed: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<ReproducerReport>,
}

#[derive(Serialize)]
pub struct OracleSummary {
    pub seed: u64,
    pub cap: usize,
    pub n: usize,
    pub instances: usize,
    pub passed: bool,
    pub claims: Vec<ClaimTally>,
}

impl OracleSummary {
    pub fn absorb(&mut self, instance: &str, labels: &Labels, results: &[ClaimResult]) {
        for r in results {
            let id = r.claim.id();
            let pos = match self.claims.iter().position(|c| c.claim == id) {
                Some(p) => p,
                None => {
                    self.claims.push(ClaimTally {
                        claim: id.to_string(),
                        checked: 0,
                        failed: 0,
                        counterexample: None,
                    });
                    self.claims.len() - 1
                }
            };
            let tally = &mut self.claims[pos];
            tally.checked += 1;
            if let Some(rep) = &r.counterexample {
                tally.failed += 1;
                self.passed = false;
                if tally.counterexample.is_none() {
                    tally.counterexample = Some(reproducer(instance, labels, rep));
                }
            }
        }
    }

    pub fn text(&self) -> String {
        let mut out = format!(
            "seed {}  n {}  instances {}  cap {}\nclaim                checked  failed\n",
            self.seed, self.n, self.instances, self.cap
        );
        for c in &self.claims {
            let _ = writeln!(out, "{:<20} {:>7}  {:>6}", c.claim, c.checked, c.failed);
            if let Some(r) = &c.counterexample {
                let _ = writeln!(out, "  counterexample on {}: {}", r.instance, r.detail);
            }
        }
        let _ = writeln!(out, "{}", if self.passed { "all claims hold" } else { "FAILURES found" });
        out
    }
}

fn reproducer(instance: &str, labels: &Labels, r: &Reproducer) -> ReproducerReport {
    ReproducerReport {
        instance: instance.to_string(),
        stated: write_profile(&r.profile, labels),
        truth: r.truth.as_ref().map(|p| write_profile(p, labels)),
        deviator: r.deviator.map(|d| labels.of(d.side, d.index).to_string()),
        lists: r
            .lists
            .iter()
            .map(|l| labels.list(r.deviator.map_or(Side::Woman, |d| d.side), l))
            .collect(),
        detail: r.detail.clone(),
    }
}
