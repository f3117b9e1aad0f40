//! Deciding whether a stated profile `Q` is a P-stable Nash equilibrium
//! with respect to a true profile `P`.
//!
//! For each woman the attainable set under `Q` is computed; every attainable
//! man she truly prefers to her current partner is tested by running the
//! mechanism on the witness list for him. Any list that matches her to a
//! given man produces the same full matching, so one witness per man
//! decides whether that improvement can be reached with a P-stable outcome.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::engine::{gs_m, gs_m_substituted};
use crate::error::Result;
use crate::explore::{explore_traced, ScanOrder};
use crate::model::{is_stable, Matching, PreferenceList, Profile};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManipulationWitness {
    pub woman: usize,
    pub new_list: PreferenceList,
    pub new_matching: Matching,
    pub old_partner: usize,
    pub new_partner: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum NashVerdict {
    Equilibrium,
    NotEquilibrium(ManipulationWitness),
}

impl NashVerdict {
    pub fn is_equilibrium(&self) -> bool {
        matches!(self, NashVerdict::Equilibrium)
    }

    pub fn witness(&self) -> Option<&ManipulationWitness> {
        match self {
            NashVerdict::Equilibrium => None,
            NashVerdict::NotEquilibrium(w) => Some(w),
        }
    }
}

/// True iff `list` gets `woman` a partner she truly prefers and the result is
/// stable under `truth`.
pub fn is_p_stable_manipulation(
    truth: &Profile,
    stated: &Profile,
    woman: usize,
    list: &PreferenceList,
) -> Result<bool> {
    truth.check_same_size(stated)?;
    let before = gs_m(stated).matching.man_of(woman);
    let after = gs_m_substituted(stated, woman, list)?.matching;
    let p_w = truth.woman_list(woman)?;
    Ok(p_w.ranks_above(after.man_of(woman), before) && is_stable(truth, &after)?)
}

/// Which improvements count.
#[derive(Clone, Copy, PartialEq, Eq)]
enum Requirement {
    /// Strictly better under the true list and stable under the true profile.
    PStable,
    /// Strictly better under the true list; stability not required.
    AnyImprovement,
}

struct Scan<'a> {
    truth: &'a Profile,
    stated: &'a Profile,
    current: Matching,
    requirement: Requirement,
}

impl Scan<'_> {
    /// Improving manipulations of one woman, most preferred partner first,
    /// with the number of mechanism runs spent. Stops at the first hit when
    /// `first_only` is set.
    fn woman(&self, woman: usize, first_only: bool) -> Result<(Vec<ManipulationWitness>, usize)> {
        let (set, log) = explore_traced(self.stated, woman, ScanOrder::Chronological)?;
        let mut runs = log.gs_runs;
        let p_w = self.truth.woman_list(woman)?;
        let old_partner = self.current.man_of(woman);
        let mut better: Vec<usize> = set
            .men
            .iter()
            .copied()
            .filter(|&m| p_w.ranks_above(m, old_partner))
            .collect();
        better.sort_by_key(|&m| p_w.rank(m));

        let mut found = Vec::new();
        for man in better {
            let list = set.witness[&man].clone();
            let run = gs_m_substituted(self.stated, woman, &list)?;
            runs += 1;
            debug_assert_eq!(run.matching.man_of(woman), man);
            let accept = match self.requirement {
                Requirement::PStable => is_stable(self.truth, &run.matching)?,
                Requirement::AnyImprovement => true,
            };
            if accept {
                found.push(ManipulationWitness {
                    woman,
                    new_list: list,
                    new_matching: run.matching,
                    old_partner,
                    new_partner: man,
                });
                if first_only {
                    break;
                }
            }
        }
        Ok((found, runs))
    }

    fn first_hit(&self) -> Result<(NashVerdict, usize)> {
        let mut runs = 1;
        for woman in 0..self.stated.size() {
            let (mut hits, r) = self.woman(woman, true)?;
            runs += r;
            if let Some(w) = hits.pop() {
                return Ok((NashVerdict::NotEquilibrium(w), runs));
            }
        }
        Ok((NashVerdict::Equilibrium, runs))
    }

    fn first_hit_parallel(&self) -> Result<NashVerdict> {
        let per_woman: Vec<Option<ManipulationWitness>> = (0..self.stated.size())
            .into_par_iter()
            .map(|w| self.woman(w, true).map(|(mut hits, _)| hits.pop()))
            .collect::<Result<_>>()?;
        Ok(per_woman
            .into_iter()
            .flatten()
            .next()
            .map_or(NashVerdict::Equilibrium, NashVerdict::NotEquilibrium))
    }
}

fn scan<'a>(truth: &'a Profile, stated: &'a Profile, requirement: Requirement) -> Result<Scan<'a>> {
    truth.check_same_size(stated)?;
    Ok(Scan {
        truth,
        stated,
        current: gs_m(stated).matching,
        requirement,
    })
}

/// Decides whether `stated` is a P-stable Nash equilibrium for `truth`.
///
/// Women are scanned in index order and, for each, improving partners from
/// most to least preferred under her true list; the first P-stable hit is
/// returned as the witness.
pub fn check_p_stable_nash(truth: &Profile, stated: &Profile) -> Result<NashVerdict> {
    check_p_stable_nash_counted(truth, stated).map(|(v, _)| v)
}

/// [`check_p_stable_nash`] together with the number of mechanism runs.
pub fn check_p_stable_nash_counted(truth: &Profile, stated: &Profile) -> Result<(NashVerdict, usize)> {
    scan(truth, stated, Requirement::PStable)?.first_hit()
}

/// [`check_p_stable_nash`] with women processed on the rayon pool. The
/// witness is the same as the sequential one.
pub fn check_p_stable_nash_parallel(truth: &Profile, stated: &Profile) -> Result<NashVerdict> {
    scan(truth, stated, Requirement::PStable)?.first_hit_parallel()
}

/// Nash check where the stated profile is also the truth and the outcome
/// need not be stable.
pub fn check_plain_nash(profile: &Profile) -> Result<NashVerdict> {
    scan(profile, profile, Requirement::AnyImprovement)?
        .first_hit()
        .map(|(v, _)| v)
}

pub fn check_plain_nash_parallel(profile: &Profile) -> Result<NashVerdict> {
    scan(profile, profile, Requirement::AnyImprovement)?.first_hit_parallel()
}

/// One witness per (woman, improving partner) whose outcome is P-stable,
/// sorted by woman and then by the partner's rank in her true list.
pub fn find_all_p_stable_manipulations(
    truth: &Profile,
    stated: &Profile,
) -> Result<Vec<ManipulationWitness>> {
    let s = scan(truth, stated, Requirement::PStable)?;
    let mut out = Vec::new();
    for woman in 0..stated.size() {
        out.extend(s.woman(woman, false)?.0);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::corpus::random_profile;
    use crate::testutil::five_couples;
    use rand::SeedableRng;

    #[test]
    fn example_manipulations() {
        let f = five_couples();
        let q2_d = f.q2.woman_list(3).unwrap().clone();
        assert!(is_p_stable_manipulation(&f.p, &f.q1, 3, &q2_d).unwrap());
        let q3_a = f.q3.woman_list(0).unwrap().clone();
        assert!(!is_p_stable_manipulation(&f.p, &f.q2, 0, &q3_a).unwrap());
        let same = f.q1.woman_list(2).unwrap().clone();
        assert!(!is_p_stable_manipulation(&f.p, &f.q1, 2, &same).unwrap());
    }

    #[test]
    fn example_verdicts() {
        let f = five_couples();
        let v = check_p_stable_nash(&f.p, &f.q1).unwrap();
        let w = v.witness().expect("Q1 is not an equilibrium");
        assert_eq!((w.woman, w.old_partner, w.new_partner), (3, 3, 4));
        assert_eq!(w.new_matching, crate::engine::gs_m(&f.q2).matching);
        assert!(is_p_stable_manipulation(&f.p, &f.q1, w.woman, &w.new_list).unwrap());
        assert!(check_p_stable_nash(&f.p, &f.q2).unwrap().is_equilibrium());
        assert_eq!(check_p_stable_nash_parallel(&f.p, &f.q1).unwrap(), v);
    }

    #[test]
    fn all_manipulations_on_example() {
        let f = five_couples();
        let all = find_all_p_stable_manipulations(&f.p, &f.q1).unwrap();
        assert!(all.iter().any(|w| w.woman == 3 && w.new_partner == 4));
        assert!(find_all_p_stable_manipulations(&f.p, &f.q2).unwrap().is_empty());
    }

    #[test]
    fn single_pair_is_equilibrium() {
        let p = Profile::from_one_based(&[&[1]], &[&[1]]).unwrap();
        assert!(check_p_stable_nash(&p, &p).unwrap().is_equilibrium());
        assert!(check_plain_nash(&p).unwrap().is_equilibrium());
    }

    #[test]
    fn size_mismatch() {
        let f = five_couples();
        let p = Profile::from_one_based(&[&[1]], &[&[1]]).unwrap();
        assert!(check_p_stable_nash(&p, &f.q1).is_err());
        assert!(find_all_p_stable_manipulations(&f.p, &p).is_err());
    }

    #[test]
    fn parallel_agrees_with_sequential() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..40 {
            let p = random_profile(6, &mut rng);
            let q = random_profile(6, &mut rng);
            assert_eq!(
                check_p_stable_nash(&p, &q).unwrap(),
                check_p_stable_nash_parallel(&p, &q).unwrap()
            );
            assert_eq!(check_plain_nash(&q).unwrap(), check_plain_nash_parallel(&q).unwrap());
        }
    }

    #[test]
    fn run_budget() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for n in 1..=8 {
            let p = random_profile(n, &mut rng);
            let q = random_profile(n, &mut rng);
            let (_, runs) = check_p_stable_nash_counted(&p, &q).unwrap();
            assert!(runs <= n * (1 + 2 * n));
        }
    }
}
