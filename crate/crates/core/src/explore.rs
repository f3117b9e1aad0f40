//! Every partner a woman can obtain by permuting her own list while everyone
//! else keeps their stated list.
//!
//! The search starts from the run in which the woman keeps her first
//! proposer. Each run headed by a man `x` reveals the men who propose to her
//! after `x`; every such man not seen before is moved to the front of the
//! current list and explored in turn. Each man is explored at most once, so
//! a search costs at most `n` Gale-Shapley runs.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::engine::{gs_m_hold_first, gs_m_substituted, GsResult};
use crate::error::Result;
use crate::model::{promote, PreferenceList, Profile};

/// Men a woman can be matched to, each with one list that achieves it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AttainableSet {
    pub woman: usize,
    pub men: BTreeSet<usize>,
    /// Full lists, each headed by the man it reaches.
    pub witness: BTreeMap<usize, PreferenceList>,
}

impl AttainableSet {
    pub fn contains(&self, man: usize) -> bool {
        self.men.contains(&man)
    }

    pub fn witness(&self, man: usize) -> Option<&PreferenceList> {
        self.witness.get(&man)
    }
}

/// Order in which newly discovered men are explored.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ScanOrder {
    /// Order of their proposals.
    #[default]
    Chronological,
    Reversed,
}

/// One explored list and what its run revealed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Invocation {
    pub head: usize,
    pub list: PreferenceList,
    /// Everyone who proposed to the woman in this run, in order.
    pub proposers: Vec<usize>,
}

impl Invocation {
    /// Proposers strictly after the head's first proposal.
    pub fn after_head(&self) -> &[usize] {
        match self.proposers.iter().position(|&m| m == self.head) {
            Some(i) => &self.proposers[i + 1..],
            None => &[],
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ExploreLog {
    pub gs_runs: usize,
    pub invocations: Vec<Invocation>,
}

pub fn explore(profile: &Profile, woman: usize) -> Result<AttainableSet> {
    explore_traced(profile, woman, ScanOrder::Chronological).map(|(set, _)| set)
}

/// [`explore`] with a record of every run it made.
pub fn explore_traced(
    profile: &Profile,
    woman: usize,
    order: ScanOrder,
) -> Result<(AttainableSet, ExploreLog)> {
    profile.check_woman(woman)?;
    let stated = profile.woman_list(woman)?;
    let mut log = ExploreLog::default();

    // The first proposer is the same for every list she could state.
    let seed = gs_m_hold_first(profile, woman);
    log.gs_runs += 1;
    let first = seed.trace.proposers(woman)[0];
    let seed_list = promote(stated, &[first])?;

    let mut set = AttainableSet {
        woman,
        men: BTreeSet::from([first]),
        witness: BTreeMap::from([(first, seed_list.clone())]),
    };

    struct Frame {
        list: PreferenceList,
        pending: std::vec::IntoIter<usize>,
    }

    let record = |head: usize, list: &PreferenceList, run: GsResult, log: &mut ExploreLog| {
        let inv = Invocation {
            head,
            list: list.clone(),
            proposers: run.trace.proposers(woman).to_vec(),
        };
        let mut next = inv.after_head().to_vec();
        if order == ScanOrder::Reversed {
            next.reverse();
        }
        log.invocations.push(inv);
        next.into_iter()
    };

    let pending = record(first, &seed_list, seed, &mut log);
    let mut stack = vec![Frame {
        list: seed_list,
        pending,
    }];

    while let Some(frame) = stack.last_mut() {
        let Some(man) = frame.pending.next() else {
            stack.pop();
            continue;
        };
        if !set.men.insert(man) {
            continue;
        }
        let list = promote(&frame.list, &[man])?;
        let run = gs_m_substituted(profile, woman, &list)?;
        log.gs_runs += 1;
        set.witness.insert(man, list.clone());
        let pending = record(man, &list, run, &mut log);
        stack.push(Frame { list, pending });
    }

    Ok((set, log))
}

/// The attainable man ranked highest by `ranking`.
pub fn best_attainable(profile: &Profile, woman: usize, ranking: &PreferenceList) -> Result<usize> {
    profile.check_list(ranking)?;
    let set = explore(profile, woman)?;
    Ok(set
        .men
        .iter()
        .copied()
        .min_by_key(|&m| ranking.rank(m))
        .expect("the first proposer is always attainable"))
}
