//! Deterministic men-proposing Gale-Shapley with a complete proposal trace.
//!
//! One proposal is made per step, always by the single man with the smallest
//! index. Each man walks his list through a cursor; a rejection simply
//! advances it.

use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::format::Labels;
use crate::model::{Matching, PreferenceList, Profile};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Outcome {
    AcceptedNew,
    /// Accepted; the previously held man is released.
    AcceptedDisplacing(usize),
    Rejected,
}

impl Outcome {
    pub fn is_accepted(self) -> bool {
        !matches!(self, Outcome::Rejected)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ProposalEvent {
    pub man: usize,
    pub woman: usize,
    pub outcome: Outcome,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ExecutionTrace {
    events: Vec<ProposalEvent>,
    per_woman: Vec<Vec<usize>>,
}

impl ExecutionTrace {
    pub fn events(&self) -> &[ProposalEvent] {
        &self.events
    }

    /// Men who proposed to `woman`, in order. This is her active sequence.
    pub fn proposers(&self, woman: usize) -> &[usize] {
        &self.per_woman[woman]
    }

    /// Men `woman` accepted, in order.
    pub fn accepted(&self, woman: usize) -> Vec<usize> {
        self.events
            .iter()
            .filter(|e| e.woman == woman && e.outcome.is_accepted())
            .map(|e| e.man)
            .collect()
    }

    pub fn size(&self) -> usize {
        self.per_woman.len()
    }

    /// One line per event: `propose m w -> accept|reject|displace k`.
    pub fn log(&self, labels: &Labels) -> String {
        let mut out = String::new();
        for e in &self.events {
            let _ = write!(out, "propose {} {} -> ", labels.man(e.man), labels.woman(e.woman));
            let _ = match e.outcome {
                Outcome::AcceptedNew => writeln!(out, "accept"),
                Outcome::Rejected => writeln!(out, "reject"),
                Outcome::AcceptedDisplacing(k) => writeln!(out, "displace {}", labels.man(k)),
            };
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GsResult {
    pub matching: Matching,
    pub trace: ExecutionTrace,
}

/// How one designated woman decides, overriding her stated list.
#[derive(Clone, Copy)]
enum Override<'a> {
    None,
    List(usize, &'a PreferenceList),
    /// Keeps her first proposer and rejects everyone after him; this is
    /// exactly the behaviour of any list headed by that proposer.
    HoldFirst(usize),
}

fn run(profile: &Profile, rule: Override<'_>) -> GsResult {
    let n = profile.size();
    let men = profile.men_lists();
    let women = profile.women_lists();
    let mut cursor = vec![0usize; n];
    let mut held: Vec<Option<usize>> = vec![None; n];
    let mut single: BinaryHeap<Reverse<usize>> = (0..n).map(Reverse).collect();
    let mut events = Vec::with_capacity(2 * n);
    let mut per_woman = vec![Vec::new(); n];

    while let Some(&Reverse(man)) = single.peek() {
        let woman = men[man].order()[cursor[man]];
        cursor[man] += 1;
        let outcome = match held[woman] {
            None => Outcome::AcceptedNew,
            Some(current) => {
                let accepts = match rule {
                    Override::List(w, list) if w == woman => list.ranks_above(man, current),
                    Override::HoldFirst(w) if w == woman => false,
                    _ => women[woman].ranks_above(man, current),
                };
                if accepts {
                    Outcome::AcceptedDisplacing(current)
                } else {
                    Outcome::Rejected
                }
            }
        };
        match outcome {
            Outcome::AcceptedNew => {
                single.pop();
                held[woman] = Some(man);
            }
            Outcome::AcceptedDisplacing(prev) => {
                single.pop();
                single.push(Reverse(prev));
                held[woman] = Some(man);
            }
            Outcome::Rejected => {}
        }
        events.push(ProposalEvent {
            man,
            woman,
            outcome,
        });
        per_woman[woman].push(man);
    }

    let mut man_to_woman = vec![0; n];
    for (woman, man) in held.into_iter().enumerate() {
        man_to_woman[man.expect("complete lists leave no woman single")] = woman;
    }
    GsResult {
        matching: Matching::from_men(man_to_woman).expect("held partners form a bijection"),
        trace: ExecutionTrace { events, per_woman },
    }
}

/// Runs men-proposing Gale-Shapley on `profile`, returning the man-optimal
/// stable matching and the trace of every proposal.
pub fn gs_m(profile: &Profile) -> GsResult {
    run(profile, Override::None)
}

/// Same as `gs_m(&with_list(profile, woman, list.clone())?)` without copying
/// the profile.
pub fn gs_m_substituted(profile: &Profile, woman: usize, list: &PreferenceList) -> Result<GsResult> {
    profile.check_woman(woman)?;
    profile.check_list(list)?;
    Ok(run(profile, Override::List(woman, list)))
}

/// The run in which `woman` states some list headed by her first proposer.
/// Her first proposer does not depend on her list, so this needs no
/// knowledge of who he is.
pub(crate) fn gs_m_hold_first(profile: &Profile, woman: usize) -> GsResult {
    run(profile, Override::HoldFirst(woman))
}

pub fn active_sequence(trace: &ExecutionTrace, woman: usize) -> Result<&[usize]> {
    trace
        .per_woman
        .get(woman)
        .map(Vec::as_slice)
        .ok_or(Error::IndexOutOfRange {
            index: woman,
            size: trace.size(),
        })
}

/// The chain starting at `sequence[0]` in which every element is strictly
/// preferred under `list` to the one before it.
pub fn increasing_active_subsequence(list: &PreferenceList, sequence: &[usize]) -> Result<Vec<usize>> {
    let (&first, rest) = sequence.split_first().ok_or(Error::EmptySequence)?;
    list.rank_of(first)?;
    let mut out = vec![first];
    let mut best = first;
    for &m in rest {
        list.rank_of(m)?;
        if list.ranks_above(m, best) {
            out.push(m);
            best = m;
        }
    }
    Ok(out)
}
