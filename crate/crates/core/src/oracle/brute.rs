//! Definition-level recomputation by exhaustive enumeration of lists and
//! matchings. Deliberately naive.

use std::collections::BTreeMap;

use itertools::Itertools;

use crate::engine::{gs_m, gs_m_substituted};
use crate::error::{Error, Result};
use crate::model::{is_stable, Matching, PreferenceList, Profile};
use crate::nash::{ManipulationWitness, NashVerdict};

pub const DEFAULT_CAP: usize = 6;

pub(crate) fn check_cap(n: usize, cap: usize) -> Result<()> {
    if n > cap {
        Err(Error::CapExceeded { n, cap })
    } else {
        Ok(())
    }
}

/// All `n!` lists in lexicographic order.
pub fn all_lists(n: usize) -> impl Iterator<Item = PreferenceList> {
    (0..n)
        .permutations(n)
        .map(|p| PreferenceList::new(p).expect("permutation"))
}

/// Outcome of sweeping every list of one woman.
pub(crate) struct Sweep {
    /// Reached man -> (resulting matching, first list reaching him).
    pub reached: BTreeMap<usize, (Matching, PreferenceList)>,
}

/// Two lists reaching the same man with different matchings.
pub(crate) struct Violation {
    pub man: usize,
    pub lists: [PreferenceList; 2],
}

pub(crate) fn sweep(q: &Profile, woman: usize, cap: usize) -> Result<std::result::Result<Sweep, Violation>> {
    check_cap(q.size(), cap)?;
    q.check_woman(woman)?;
    let mut reached: BTreeMap<usize, (Matching, PreferenceList)> = BTreeMap::new();
    for list in all_lists(q.size()) {
        let matching = gs_m_substituted(q, woman, &list)?.matching;
        let man = matching.man_of(woman);
        match reached.get(&man) {
            Some((seen, first)) if *seen != matching => {
                return Ok(Err(Violation {
                    man,
                    lists: [first.clone(), list],
                }))
            }
            Some(_) => {}
            None => {
                reached.insert(man, (matching, list));
            }
        }
    }
    Ok(Ok(Sweep { reached }))
}

/// Every man `woman` can be matched to by some list, with the matching that
/// list produces. Fails if two lists reaching the same man disagree on the
/// rest of the matching.
pub fn brute_attainable(q: &Profile, woman: usize, cap: usize) -> Result<BTreeMap<usize, Matching>> {
    match sweep(q, woman, cap)? {
        Ok(s) => Ok(s.reached.into_iter().map(|(m, (mat, _))| (m, mat)).collect()),
        Err(v) => Err(Error::UniquenessViolated { woman, man: v.man }),
    }
}

fn brute_nash(truth: &Profile, stated: &Profile, cap: usize, need_stable: bool) -> Result<NashVerdict> {
    truth.check_same_size(stated)?;
    check_cap(stated.size(), cap)?;
    let current = gs_m(stated).matching;
    for woman in 0..stated.size() {
        let p_w = truth.woman_list(woman)?;
        let old_partner = current.man_of(woman);
        let mut best: Option<ManipulationWitness> = None;
        for list in all_lists(stated.size()) {
            let matching = gs_m_substituted(stated, woman, &list)?.matching;
            let man = matching.man_of(woman);
            if !p_w.ranks_above(man, old_partner) {
                continue;
            }
            if need_stable && !is_stable(truth, &matching)? {
                continue;
            }
            if best.as_ref().is_none_or(|b| p_w.ranks_above(man, b.new_partner)) {
                best = Some(ManipulationWitness {
                    woman,
                    new_list: list,
                    new_matching: matching,
                    old_partner,
                    new_partner: man,
                });
            }
        }
        if let Some(w) = best {
            return Ok(NashVerdict::NotEquilibrium(w));
        }
    }
    Ok(NashVerdict::Equilibrium)
}

/// Tries every list of every woman.
pub fn brute_check_p_stable_nash(truth: &Profile, stated: &Profile, cap: usize) -> Result<NashVerdict> {
    brute_nash(truth, stated, cap, true)
}

pub fn brute_check_plain_nash(profile: &Profile, cap: usize) -> Result<NashVerdict> {
    brute_nash(profile, profile, cap, false)
}

/// All stable matchings, in lexicographic order of the men's partners.
pub fn brute_stable_matchings(q: &Profile, cap: usize) -> Result<Vec<Matching>> {
    check_cap(q.size(), cap)?;
    let mut out = Vec::new();
    for perm in (0..q.size()).permutations(q.size()) {
        let m = Matching::from_men(perm)?;
        if is_stable(q, &m)? {
            out.push(m);
        }
    }
    Ok(out)
}

/// A man and a list that gets him a strictly better partner under his
/// stated list, if one exists.
pub fn brute_man_deviation(q: &Profile, cap: usize) -> Result<Option<(usize, PreferenceList)>> {
    check_cap(q.size(), cap)?;
    let current = gs_m(q).matching;
    for man in 0..q.size() {
        let own = q.man_list(man)?;
        for list in all_lists(q.size()) {
            let mut men = q.men_lists().to_vec();
            men[man] = list.clone();
            let alt = Profile::new(men, q.women_lists().to_vec())?;
            let got = gs_m(&alt).matching.woman_of(man);
            if own.ranks_above(got, current.woman_of(man)) {
                return Ok(Some((man, list)));
            }
        }
    }
    Ok(None)
}
