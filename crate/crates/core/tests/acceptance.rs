//! Exit criteria. Runs every criterion, prints one line each, and fails the
//! test target if any criterion fails.

use std::collections::BTreeSet;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use stablenash_core::engine::{gs_m, gs_m_substituted, increasing_active_subsequence};
use stablenash_core::explore::{explore_traced, ScanOrder};
use stablenash_core::format::{parse_instance, Instance};
use stablenash_core::model::{blocking_pairs, men_weakly_prefer, BlockingPair, Matching, PreferenceList, Profile};
use stablenash_core::nash::{check_p_stable_nash, check_p_stable_nash_counted, NashVerdict};
use stablenash_core::oracle::brute::brute_man_deviation;
use stablenash_core::oracle::{
    brute_attainable, brute_check_p_stable_nash, brute_stable_matchings, corpus, DEFAULT_CAP,
};

const SEED: u64 = 0x5eed_2026;

type Outcome = Result<String, String>;
type Criterion<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);

fn fixture(name: &str) -> Instance {
    let path: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "..", "fixtures", name]
        .iter()
        .collect();
    let text = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    parse_instance(&text).unwrap_or_else(|e| panic!("{name}: {e}"))
}

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(start: Instant, limit: Duration) -> Result<(), String> {
    let took = start.elapsed();
    check(took < limit, || format!("took {took:?}, limit {limit:?}"))
}

fn matching(inst: &Instance, pairs: &[(&str, &str)]) -> Matching {
    let pairs: Vec<_> = pairs
        .iter()
        .map(|(m, w)| (inst.labels.find_man(m).unwrap(), inst.labels.find_woman(w).unwrap()))
        .collect();
    Matching::from_pairs(pairs.len(), &pairs).unwrap()
}

fn example_reproduction() -> Outcome {
    let start = Instant::now();
    let pq1 = fixture("five_pair_1.txt");
    let p = pq1.truth().unwrap();
    let cases = [
        ("five_pair_1.txt", [("1", "a"), ("2", "b"), ("3", "c"), ("4", "d"), ("5", "e")]),
        ("five_pair_2.txt", [("1", "a"), ("2", "b"), ("3", "c"), ("4", "e"), ("5", "d")]),
        ("five_pair_4.txt", [("1", "c"), ("2", "b"), ("3", "a"), ("4", "d"), ("5", "e")]),
    ];
    for (file, pairs) in cases {
        let inst = fixture(file);
        let got = gs_m(inst.stated()).matching;
        check(got == matching(&inst, &pairs), || format!("{file}: got {:?}", inst.labels.pairs(&got)))?;
    }
    let q3 = fixture("five_pair_3.txt");
    let blocking = blocking_pairs(p, &gs_m(q3.stated()).matching).unwrap();
    let want: BTreeSet<_> = [("2", "b"), ("3", "b")]
        .iter()
        .map(|(m, w)| BlockingPair {
            man: q3.labels.find_man(m).unwrap(),
            woman: q3.labels.find_woman(w).unwrap(),
        })
        .collect();
    check(blocking == want, || format!("blocking pairs {blocking:?}"))?;
    within(start, Duration::from_secs(1))?;
    Ok("three matchings and the Q3 blocking pairs reproduced".into())
}

fn example_verdicts() -> Outcome {
    let start = Instant::now();
    let pq1 = fixture("five_pair_1.txt");
    let v1 = check_p_stable_nash(pq1.truth().unwrap(), pq1.stated()).unwrap();
    let NashVerdict::NotEquilibrium(w) = &v1 else {
        return Err("Q1 reported as equilibrium".into());
    };
    let d = pq1.labels.find_woman("d").unwrap();
    let five = pq1.labels.find_man("5").unwrap();
    check(w.woman == d && w.new_partner == five, || format!("witness {w:?}"))?;
    let p = pq1.truth().unwrap();
    check(stablenash_core::is_stable(p, &w.new_matching).unwrap(), || "witness outcome not P-stable".into())?;
    let pq2 = fixture("five_pair_2.txt");
    let v2 = check_p_stable_nash(pq2.truth().unwrap(), pq2.stated()).unwrap();
    check(v2.is_equilibrium(), || format!("Q2 verdict {v2:?}"))?;
    within(start, Duration::from_secs(1))?;
    Ok("Q1: d reaches 5 with a P-stable outcome; Q2: equilibrium".into())
}

struct Corpus {
    n4: Vec<Profile>,
    n5: Vec<Profile>,
    n6: Vec<Profile>,
}

fn corpus() -> Corpus {
    Corpus {
        n4: corpus::profiles(SEED, 4, 200),
        n5: corpus::profiles(SEED + 5, 5, 50),
        n6: corpus::profiles(SEED + 6, 6, 50),
    }
}

fn attainable_equivalence(c: &Corpus) -> Outcome {
    let start = Instant::now();
    let mut women = 0;
    for q in c.n4.iter().chain(&c.n5).chain(&c.n6) {
        for w in 0..q.size() {
            let (set, _) = explore_traced(q, w, ScanOrder::Chronological).unwrap();
            let brute: BTreeSet<usize> = brute_attainable(q, w, DEFAULT_CAP)
                .map_err(|e| format!("enumeration failed: {e}"))?
                .into_keys()
                .collect();
            check(set.men == brute, || {
                format!("woman {w}: search {:?} vs enumeration {brute:?} on {q:?}", set.men)
            })?;
            women += 1;
        }
    }
    within(start, Duration::from_secs(60))?;
    Ok(format!(
        "{} instances (200 at n=4, 50 at n=5, 50 at n=6), {women} women, 0 mismatches in {:.1?}",
        c.n4.len() + c.n5.len() + c.n6.len(),
        start.elapsed()
    ))
}

fn unique_outcome(c: &Corpus) -> Outcome {
    let mut pairs = 0;
    for q in c.n4.iter().chain(&c.n5).chain(&c.n6) {
        for w in 0..q.size() {
            // brute_attainable fails on the first violation
            let reached = brute_attainable(q, w, DEFAULT_CAP).map_err(|e| format!("{e} on {q:?}"))?;
            let (set, _) = explore_traced(q, w, ScanOrder::Chronological).unwrap();
            for (man, list) in &set.witness {
                let got = gs_m_substituted(q, w, list).unwrap().matching;
                check(reached.get(man) == Some(&got), || {
                    format!("witness for ({w}, {man}) disagrees with enumeration on {q:?}")
                })?;
            }
            pairs += reached.len();
        }
    }
    Ok(format!("{pairs} (woman, man) pairs, 0 violations"))
}

fn nash_equivalence() -> Outcome {
    let pairs = corpus::pairs(SEED + 4, 4, 200);
    let mut no = 0;
    for (p, q) in &pairs {
        let fast = check_p_stable_nash(p, q).unwrap();
        let slow = brute_check_p_stable_nash(p, q, DEFAULT_CAP).unwrap();
        check(fast.is_equilibrium() == slow.is_equilibrium(), || {
            format!("fast {fast:?} vs enumeration {slow:?} on P={p:?} Q={q:?}")
        })?;
        no += usize::from(!fast.is_equilibrium());
    }
    Ok(format!(
        "{} pairs at n=4 ({no} not equilibria), 0 mismatches",
        pairs.len()
    ))
}

fn men_strategyproof(c: &Corpus) -> Outcome {
    let instances = &c.n4[..100];
    for q in instances {
        if let Some((man, list)) = brute_man_deviation(q, DEFAULT_CAP).unwrap() {
            return Err(format!("man {man} gains with {list:?} on {q:?}"));
        }
    }
    Ok(format!("{} instances at n=4, every list of every man, 0 violations", instances.len()))
}

fn man_optimal(c: &Corpus) -> Outcome {
    let mut count = 0;
    for q in c.n4.iter().chain(&c.n5) {
        let mu = gs_m(q).matching;
        let stable = brute_stable_matchings(q, DEFAULT_CAP).unwrap();
        check(stable.contains(&mu), || format!("output not stable on {q:?}"))?;
        for m in &stable {
            check(men_weakly_prefer(q, &mu, m), || format!("{m:?} beats the output on {q:?}"))?;
        }
        count += 1;
    }
    Ok(format!("{count} instances with n<=5, 0 violations"))
}

fn complexity_budget(c: &Corpus) -> Outcome {
    for q in c.n4.iter().chain(&c.n5).chain(&c.n6) {
        let n = q.size();
        for w in 0..n {
            let (_, log) = explore_traced(q, w, ScanOrder::Chronological).unwrap();
            check(log.gs_runs <= n, || format!("search used {} runs at n={n}", log.gs_runs))?;
        }
    }
    for (p, q) in corpus::pairs(SEED + 9, 6, 100) {
        let (_, runs) = check_p_stable_nash_counted(&p, &q).unwrap();
        check(runs <= 6 * 13, || format!("Nash check used {runs} runs at n=6"))?;
    }
    let mut rng = corpus::rng(SEED + 200);
    let (p, q) = corpus::random_pair(200, &mut rng);
    let start = Instant::now();
    let (verdict, runs) = check_p_stable_nash_counted(&p, &q).unwrap();
    let took = start.elapsed();
    check(runs <= 200 * 401, || format!("{runs} runs at n=200"))?;
    check(took < Duration::from_secs(10), || format!("n=200 check took {took:?}"))?;
    Ok(format!(
        "run counts within n and n(1+2n); n=200 check ({}) used {runs} runs in {took:.2?}",
        if verdict.is_equilibrium() { "equilibrium" } else { "not equilibrium" }
    ))
}

fn ias_extraction() -> Outcome {
    let seq: Vec<usize> = [5, 6, 3, 4, 2, 8].iter().map(|m| m - 1).collect();
    for list in [[1, 2, 3, 4, 5, 6, 7, 8, 9], [1, 2, 3, 5, 9, 8, 4, 6, 7]] {
        let list = PreferenceList::from_one_based(&list).unwrap();
        let got = increasing_active_subsequence(&list, &seq).unwrap();
        check(got == vec![4, 2, 1], || format!("{list:?} gave {got:?}"))?;
    }
    Ok("(5,3,2) on both lists".into())
}

fn main() -> ExitCode {
    let c = corpus();
    let criteria: Vec<Criterion> = vec![
        ("1 five-couple example matchings", Box::new(example_reproduction)),
        ("2 five-couple example Nash verdicts", Box::new(example_verdicts)),
        ("3 attainable sets vs enumeration", Box::new(|| attainable_equivalence(&c))),
        ("4 unique outcome per (woman, man)", Box::new(|| unique_outcome(&c))),
        ("5 Nash check vs enumeration", Box::new(nash_equivalence)),
        ("6 men's strategy-proofness", Box::new(|| men_strategyproof(&c))),
        ("7 man-optimality", Box::new(|| man_optimal(&c))),
        ("8 complexity budget", Box::new(|| complexity_budget(&c))),
        ("9 increasing active subsequence", Box::new(ias_extraction)),
    ];
    let mut failed = 0;
    for (name, run) in &criteria {
        let start = Instant::now();
        match run() {
            Ok(detail) => println!("PASS  {name}: {detail} [{:.2?}]", start.elapsed()),
            Err(why) => {
                failed += 1;
                println!("FAIL  {name}: {why} [{:.2?}]", start.elapsed());
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
