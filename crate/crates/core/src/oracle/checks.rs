//! Per-instance audits comparing the fast algorithms against enumeration,
//! and randomized checks of the structural facts the attainable-set search
//! relies on.

use std::collections::BTreeSet;
use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::brute::{
    brute_check_p_stable_nash, brute_man_deviation, brute_stable_matchings, check_cap, sweep,
};
use super::corpus::random_list;
use crate::engine::{gs_m, gs_m_substituted, increasing_active_subsequence};
use crate::error::Result;
use crate::explore::{explore_traced, ScanOrder};
use crate::format::{write_profile, Labels};
use crate::model::{men_weakly_prefer, promote, Person, PreferenceList, Profile};
use crate::nash::check_p_stable_nash_counted;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Claim {
    /// The first proposer to a woman does not depend on her list.
    FirstProposer,
    /// Equal active-sequence prefixes with equal accepted chains force the
    /// next proposer to agree.
    PrefixDeterminism,
    /// Men proposing after `x` with `x` promoted under one list also propose
    /// with `x` promoted under any other list in which `x` is active.
    ActiveTransfer,
    /// The search visits every man of a target list's accepted chain and sees
    /// the men between consecutive links.
    ChainCoverage,
    /// Search result equals the enumerated attainable set.
    AttainableSet,
    /// All lists reaching the same man produce the same matching, and the
    /// search witness produces it too.
    UniqueOutcome,
    /// Fast and enumerated P-stable Nash verdicts agree.
    NashVerdict,
    /// Run counts stay within `n` per search and `n(1+2n)` per Nash check.
    RunBudget,
    /// No man gains by changing his own list.
    MenStrategyproof,
    /// The mechanism's output is stable and best for every man.
    ManOptimal,
}

impl Claim {
    pub fn id(self) -> &'static str {
        match self {
            Claim::FirstProposer => "first-proposer",
            Claim::PrefixDeterminism => "prefix-determinism",
            Claim::ActiveTransfer => "active-transfer",
            Claim::ChainCoverage => "chain-coverage",
            Claim::AttainableSet => "attainable-set",
            Claim::UniqueOutcome => "unique-outcome",
            Claim::NashVerdict => "nash-verdict",
            Claim::RunBudget => "run-budget",
            Claim::MenStrategyproof => "men-strategyproof",
            Claim::ManOptimal => "man-optimal",
        }
    }
}

impl fmt::Display for Claim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

/// Enough to replay a failure: the profile, who deviated, and with what.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Reproducer {
    pub profile: Profile,
    pub truth: Option<Profile>,
    /// Whoever states `lists`.
    pub deviator: Option<Person>,
    pub lists: Vec<PreferenceList>,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClaimResult {
    pub claim: Claim,
    pub passed: bool,
    pub counterexample: Option<Reproducer>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleReport {
    pub instance: String,
    pub checks: Vec<ClaimResult>,
}

impl OracleReport {
    fn new(profile: &Profile) -> Self {
        OracleReport {
            instance: digest(profile),
            checks: Vec::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &ClaimResult> {
        self.checks.iter().filter(|c| !c.passed)
    }

    fn record(&mut self, claim: Claim, counterexample: Option<Reproducer>) {
        self.checks.push(ClaimResult {
            claim,
            passed: counterexample.is_none(),
            counterexample,
        });
    }
}

/// Short stable fingerprint of a profile.
pub fn digest(profile: &Profile) -> String {
    let text = write_profile(profile, &Labels::default_for(profile.size()));
    Sha256::digest(text.as_bytes())[..8]
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

/// Keeps the first counterexample found for a claim.
struct Tracker<'a> {
    profile: &'a Profile,
    woman: usize,
    first: Option<Reproducer>,
}

impl<'a> Tracker<'a> {
    fn new(profile: &'a Profile, woman: usize) -> Self {
        Tracker {
            profile,
            woman,
            first: None,
        }
    }

    fn fail(&mut self, lists: &[&PreferenceList], detail: impl FnOnce() -> String) {
        if self.first.is_none() {
            self.first = Some(Reproducer {
                profile: self.profile.clone(),
                truth: None,
                deviator: Some(Person::woman(self.woman)),
                lists: lists.iter().map(|l| (*l).clone()).collect(),
                detail: detail(),
            });
        }
    }
}

/// Samples `samples` random list pairs for `woman` and checks the
/// structural facts behind the attainable-set search on each.
pub fn verify_invariants<R: Rng + ?Sized>(
    q: &Profile,
    woman: usize,
    samples: usize,
    rng: &mut R,
    cap: usize,
) -> Result<OracleReport> {
    check_cap(q.size(), cap)?;
    q.check_woman(woman)?;
    let n = q.size();
    let mut first = Tracker::new(q, woman);
    let mut prefix = Tracker::new(q, woman);
    let mut transfer = Tracker::new(q, woman);
    let mut chain = Tracker::new(q, woman);

    let (_, log) = explore_traced(q, woman, ScanOrder::Chronological)?;
    let run = |l: &PreferenceList| gs_m_substituted(q, woman, l).map(|r| r.trace.proposers(woman).to_vec());

    for _ in 0..samples {
        let l1 = random_list(n, rng);
        let l2 = random_list(n, rng);
        let as1 = run(&l1)?;
        let as2 = run(&l2)?;

        if as1[0] != as2[0] {
            first.fail(&[&l1, &l2], || format!("first proposers {} and {}", as1[0], as2[0]));
        }

        for l in 1..=as1.len().min(as2.len()) {
            if as1[..l] != as2[..l] {
                break;
            }
            let ias1 = increasing_active_subsequence(&l1, &as1[..l])?;
            let ias2 = increasing_active_subsequence(&l2, &as2[..l])?;
            if ias1 == ias2 && as1.get(l) != as2.get(l) {
                prefix.fail(&[&l1, &l2], || {
                    format!("sequences {as1:?} and {as2:?} diverge at position {l}")
                });
            }
        }

        let active2: BTreeSet<usize> = as2.iter().copied().collect();
        for &x in as1.iter().filter(|x| active2.contains(x)) {
            let p1 = promote(&l1, &[x])?;
            let p2 = promote(&l2, &[x])?;
            let after1 = run(&p1)?;
            let after1 = &after1[after1.iter().position(|&m| m == x).map_or(after1.len(), |i| i + 1)..];
            let seen2: BTreeSet<usize> = run(&p2)?.into_iter().collect();
            if let Some(&y) = after1.iter().find(|y| !seen2.contains(y)) {
                transfer.fail(&[&l1, &l2], || {
                    format!("man {y} follows {x} under the first list but is absent under the second")
                });
            }
        }

        let ias = increasing_active_subsequence(&l1, &as1)?;
        let positions: Vec<usize> = ias
            .iter()
            .map(|y| as1.iter().position(|m| m == y).expect("chain is a subsequence"))
            .collect();
        for (j, &y) in ias.iter().enumerate() {
            let Some(inv) = log.invocations.iter().find(|i| i.head == y) else {
                chain.fail(&[&l1], || format!("man {y} of the accepted chain was never explored"));
                continue;
            };
            let end = positions.get(j + 1).map_or(as1.len(), |&p| p + 1);
            let required = &as1[positions[j] + 1..end];
            if let Some(m) = required.iter().find(|m| !inv.proposers.contains(m)) {
                chain.fail(&[&l1], || format!("man {m} not active in the run headed by {y}"));
            }
        }
    }

    let mut report = OracleReport::new(q);
    report.record(Claim::FirstProposer, first.first);
    report.record(Claim::PrefixDeterminism, prefix.first);
    report.record(Claim::ActiveTransfer, transfer.first);
    report.record(Claim::ChainCoverage, chain.first);
    Ok(report)
}

/// Compares search, Nash check and the mechanism against enumeration on one
/// instance. `truth` defaults to `stated`.
pub fn audit_instance(truth: Option<&Profile>, stated: &Profile, cap: usize) -> Result<OracleReport> {
    let n = stated.size();
    check_cap(n, cap)?;
    let p = truth.unwrap_or(stated);
    p.check_same_size(stated)?;
    let mut report = OracleReport::new(stated);
    let reproducer = |deviator, lists: Vec<PreferenceList>, detail: String| Reproducer {
        profile: stated.clone(),
        truth: truth.cloned(),
        deviator,
        lists,
        detail,
    };

    let mut attainable = None;
    let mut unique = None;
    let mut budget = None;
    for w in 0..n {
        let (set, log) = explore_traced(stated, w, ScanOrder::Chronological)?;
        if log.gs_runs > n && budget.is_none() {
            budget = Some(reproducer(Some(Person::woman(w)), vec![], format!("search used {} runs", log.gs_runs)));
        }
        let sweep = match sweep(stated, w, cap)? {
            Ok(s) => s,
            Err(v) => {
                unique.get_or_insert_with(|| {
                    reproducer(Some(Person::woman(w)), v.lists.to_vec(), format!("two outcomes reach man {}", v.man))
                });
                continue;
            }
        };
        let brute: BTreeSet<usize> = sweep.reached.keys().copied().collect();
        if brute != set.men && attainable.is_none() {
            attainable = Some(reproducer(
                Some(Person::woman(w)),
                vec![],
                format!("search found {:?}, enumeration {:?}", set.men, brute),
            ));
        }
        for (man, list) in &set.witness {
            let got = gs_m_substituted(stated, w, list)?.matching;
            if let Some((expected, other)) = sweep.reached.get(man) {
                if got != *expected && unique.is_none() {
                    unique = Some(reproducer(
                        Some(Person::woman(w)),
                        vec![list.clone(), other.clone()],
                        format!("witness for man {man} disagrees with enumeration"),
                    ));
                }
            }
        }
    }
    report.record(Claim::AttainableSet, attainable);
    report.record(Claim::UniqueOutcome, unique);

    let (fast, runs) = check_p_stable_nash_counted(p, stated)?;
    let slow = brute_check_p_stable_nash(p, stated, cap)?;
    let nash = (fast.is_equilibrium() != slow.is_equilibrium()).then(|| {
        reproducer(
            slow.witness().or(fast.witness()).map(|w| Person::woman(w.woman)),
            slow.witness().or(fast.witness()).map(|w| w.new_list.clone()).into_iter().collect(),
            format!(
                "fast says equilibrium = {}, enumeration says {}",
                fast.is_equilibrium(),
                slow.is_equilibrium()
            ),
        )
    });
    report.record(Claim::NashVerdict, nash);
    if runs > n * (1 + 2 * n) && budget.is_none() {
        budget = Some(reproducer(None, vec![], format!("Nash check used {runs} runs")));
    }
    report.record(Claim::RunBudget, budget);

    let men = brute_man_deviation(stated, cap)?.map(|(man, list)| {
        reproducer(Some(Person::man(man)), vec![list], format!("man {man} gains by deviating"))
    });
    report.record(Claim::MenStrategyproof, men);

    let mu = gs_m(stated).matching;
    let stable = brute_stable_matchings(stated, cap)?;
    let optimal = if !stable.contains(&mu) {
        Some(reproducer(None, vec![], "output is not stable".to_string()))
    } else {
        stable
            .iter()
            .find(|m| !men_weakly_prefer(stated, &mu, m))
            .map(|m| reproducer(None, vec![], format!("stable matching {:?} beats the output", m.men())))
    };
    report.record(Claim::ManOptimal, optimal);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::corpus;
    use crate::oracle::DEFAULT_CAP;
    use crate::testutil::five_couples;

    #[test]
    fn invariants_hold_on_example_profiles() {
        let f = five_couples();
        let mut rng = corpus::rng(1);
        let report = verify_invariants(&f.q1, 0, 100, &mut rng, DEFAULT_CAP).unwrap();
        assert!(report.passed(), "{report:?}");
        assert_eq!(report.checks.len(), 4);
        for q in [&f.p, &f.q1, &f.q2, &f.q3, &f.q4] {
            for w in 0..5 {
                let r = verify_invariants(q, w, 200, &mut rng, DEFAULT_CAP).unwrap();
                assert!(r.passed(), "{r:?}");
            }
        }
    }

    #[test]
    fn single_pair_passes_vacuously() {
        let p = Profile::from_one_based(&[&[1]], &[&[1]]).unwrap();
        let mut rng = corpus::rng(0);
        assert!(verify_invariants(&p, 0, 1, &mut rng, DEFAULT_CAP).unwrap().passed());
        assert!(audit_instance(None, &p, DEFAULT_CAP).unwrap().passed());
    }

    #[test]
    fn audit_example() {
        let f = five_couples();
        let report = audit_instance(Some(&f.p), &f.q1, DEFAULT_CAP).unwrap();
        assert!(report.passed(), "{report:?}");
        assert_eq!(report.instance.len(), 16);
        assert_eq!(report.instance, digest(&f.q1));
    }

    #[test]
    fn cap_applies() {
        let f = five_couples();
        let mut rng = corpus::rng(0);
        assert!(verify_invariants(&f.q1, 0, 1, &mut rng, 4).is_err());
        assert!(audit_instance(None, &f.q1, 4).is_err());
    }

    #[test]
    fn failures_carry_reproducers() {
        let f = five_couples();
        let mut report = OracleReport::new(&f.q1);
        report.record(
            Claim::AttainableSet,
            Some(Reproducer {
                profile: f.q1.clone(),
                truth: None,
                deviator: Some(Person::woman(0)),
                lists: vec![],
                detail: "synthetic".into(),
            }),
        );
        assert!(!report.passed());
        assert_eq!(report.failures().count(), 1);
        let json = serde_json::to_value(&report).unwrap();
        assert_eq!(json["checks"][0]["claim"], "attainable-set");
    }
}
