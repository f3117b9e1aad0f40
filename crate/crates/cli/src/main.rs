//! Command-line front end for the stable-matching manipulation toolkit.

mod report;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use serde::Serialize;
use stablenash_core::dynamics::{run_auto, run_script, Mode, DEFAULT_MAX_STEPS};
use stablenash_core::engine::gs_m;
use stablenash_core::explore::{best_attainable, explore};
use stablenash_core::format::{parse_instance, parse_script, Instance, Labels};
use stablenash_core::model::Side;
use stablenash_core::nash::{
    check_p_stable_nash, check_p_stable_nash_parallel, check_plain_nash, check_plain_nash_parallel,
    find_all_p_stable_manipulations, NashVerdict,
};
use stablenash_core::oracle::checks::digest;
use stablenash_core::oracle::{audit_instance, corpus, verify_invariants, DEFAULT_CAP};

use report::{AttainableEntry, ExploreReport, MatchReport, NashReport, OracleSummary};

#[derive(Parser)]
#[command(name = "stablenash", version, about = "Gale-Shapley manipulation and equilibrium checks")]
struct Cli {
    /// Print JSON instead of tables.
    #[arg(long, global = true)]
    json: bool,
    /// Worker threads for the per-woman checks.
    #[arg(long, global = true, env = "STABLENASH_THREADS", default_value_t = 1)]
    threads: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run men-proposing deferred acceptance on the stated profile.
    Match {
        file: PathBuf,
        /// Include the proposal log.
        #[arg(long)]
        trace: bool,
    },
    /// List every man a woman can be matched to by changing her list.
    Explore {
        file: PathBuf,
        #[arg(long)]
        woman: String,
    },
    /// Decide whether the stated profile is a P-stable Nash equilibrium.
    /// Needs a true block followed by a stated block.
    CheckNash {
        file: PathBuf,
        /// Report every improving P-stable deviation, not just the first.
        #[arg(long)]
        all: bool,
    },
    /// Decide whether any woman gains by changing her list, with no stability
    /// requirement.
    CheckPlainNash { file: PathBuf },
    /// Compare the fast algorithms with enumeration on random or given instances.
    Oracle {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Largest n enumeration is allowed to handle.
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: usize,
        #[arg(long, default_value_t = 4)]
        n: usize,
        #[arg(long, default_value_t = 20)]
        instances: usize,
        /// Random list pairs per woman for the structural checks.
        #[arg(long, default_value_t = 20)]
        samples: usize,
        /// Audit this instance instead of a random corpus.
        #[arg(long)]
        file: Option<PathBuf>,
    },
    /// Replay deviations by women, scripted or as best responses.
    /// Needs a true block followed by a starting stated block.
    Dynamics {
        file: PathBuf,
        #[arg(long, conflicts_with = "auto")]
        script: Option<PathBuf>,
        /// `p-stable` or `any`.
        #[arg(long)]
        auto: Option<Mode>,
        #[arg(long, default_value_t = DEFAULT_MAX_STEPS)]
        max_steps: usize,
    },
}

/// Failure in the input rather than a "no" verdict.
struct InputError(anyhow::Error);

impl<E: Into<anyhow::Error>> From<E> for InputError {
    fn from(e: E) -> Self {
        InputError(e.into())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(InputError(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn load(path: &Path) -> Result<Instance> {
    let text = read(path)?;
    parse_instance(&text).with_context(|| path.display().to_string())
}

fn load_pair(path: &Path) -> Result<Instance> {
    let inst = load(path)?;
    if inst.truth().is_none() {
        bail!("{}: expected a true profile and a stated profile separated by `---`", path.display());
    }
    Ok(inst)
}

fn emit<T: Serialize>(json: bool, value: &T, text: impl FnOnce() -> String) -> Result<()> {
    if json {
        println!("{}", serde_json::to_string_pretty(value)?);
    } else {
        print!("{}", text());
    }
    Ok(())
}

fn verdict_code(verdict: &NashVerdict) -> ExitCode {
    if verdict.is_equilibrium() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

fn run(cli: &Cli) -> Result<ExitCode, InputError> {
    let parallel = cli.threads > 1;
    if parallel {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build_global()
            .context("starting worker threads")?;
    }
    let json = cli.json;
    match &cli.command {
        Command::Match { file, trace } => {
            let inst = load(file)?;
            let result = gs_m(inst.stated());
            let log = trace.then(|| result.trace.log(&inst.labels));
            let rep = MatchReport {
                n: inst.size(),
                matching: inst.labels.pairs(&result.matching),
                trace: log.as_ref().map(|l| l.lines().map(str::to_string).collect()),
            };
            emit(json, &rep, || {
                let mut out = report::matching_table(&inst.labels, &result.matching);
                if let Some(l) = &log {
                    out.push_str("\ntrace\n");
                    out.push_str(l);
                }
                out
            })?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Explore { file, woman } => {
            let inst = load(file)?;
            let labels = &inst.labels;
            let w = labels
                .find_woman(woman)
                .with_context(|| format!("no woman labelled `{woman}`"))?;
            let q = inst.stated();
            let set = explore(q, w)?;
            let partner = gs_m(q).matching.man_of(w);
            let best_stated = best_attainable(q, w, q.woman_list(w)?)?;
            let best_truth = match inst.truth() {
                Some(p) => Some(best_attainable(q, w, p.woman_list(w)?)?),
                None => None,
            };
            let rep = ExploreReport {
                woman: labels.woman(w).to_string(),
                partner: labels.man(partner).to_string(),
                attainable: set
                    .witness
                    .iter()
                    .map(|(&m, l)| AttainableEntry {
                        man: labels.man(m).to_string(),
                        list: labels.list(Side::Woman, l),
                    })
                    .collect(),
                best_under_stated: labels.man(best_stated).to_string(),
                best_under_truth: best_truth.map(|m| labels.man(m).to_string()),
            };
            emit(json, &rep, || {
                let mut out = format!("woman {}  current partner {}\nman  witness list\n", rep.woman, rep.partner);
                for e in &rep.attainable {
                    out.push_str(&format!("{:<4} {}\n", e.man, e.list.join(" ")));
                }
                out.push_str(&format!("best under stated list: {}\n", rep.best_under_stated));
                if let Some(b) = &rep.best_under_truth {
                    out.push_str(&format!("best under true list: {b}\n"));
                }
                out
            })?;
            Ok(ExitCode::SUCCESS)
        }
        Command::CheckNash { file, all } => {
            let inst = load_pair(file)?;
            let (p, q) = (inst.truth().expect("checked"), inst.stated());
            let labels = &inst.labels;
            let (verdict, manipulations) = if *all {
                let found = find_all_p_stable_manipulations(p, q)?;
                let verdict = match found.first() {
                    Some(w) => NashVerdict::NotEquilibrium(w.clone()),
                    None => NashVerdict::Equilibrium,
                };
                (verdict, Some(found))
            } else if parallel {
                (check_p_stable_nash_parallel(p, q)?, None)
            } else {
                (check_p_stable_nash(p, q)?, None)
            };
            let mut rep = report::nash(labels, p, &verdict);
            rep.manipulations = manipulations.map(|ms| ms.iter().map(|w| report::witness(labels, p, w)).collect());
            emit(json, &rep, || nash_text(&rep))?;
            Ok(verdict_code(&verdict))
        }
        Command::CheckPlainNash { file } => {
            let inst = load(file)?;
            let q = inst.stated();
            let verdict = if parallel {
                check_plain_nash_parallel(q)?
            } else {
                check_plain_nash(q)?
            };
            let rep = report::nash(&inst.labels, inst.truth().unwrap_or(q), &verdict);
            emit(json, &rep, || nash_text(&rep))?;
            Ok(verdict_code(&verdict))
        }
        Command::Oracle {
            seed,
            cap,
            n,
            instances,
            samples,
            file,
        } => {
            let mut rng = corpus::rng(*seed);
            let inputs = match file {
                Some(path) => {
                    let inst = load(path)?;
                    vec![(inst.truth().cloned(), inst.stated().clone(), inst.labels.clone())]
                }
                None => corpus::pairs(*seed, *n, *instances)
                    .into_iter()
                    .map(|(p, q)| (Some(p), q, Labels::default_for(*n)))
                    .collect(),
            };
            let mut summary = OracleSummary {
                seed: *seed,
                cap: *cap,
                n: inputs.first().map_or(*n, |i| i.1.size()),
                instances: inputs.len(),
                passed: true,
                claims: Vec::new(),
            };
            for (truth, stated, labels) in &inputs {
                let id = digest(stated);
                let audit = audit_instance(truth.as_ref(), stated, *cap)?;
                summary.absorb(&id, labels, &audit.checks);
                for w in 0..stated.size() {
                    let invariants = verify_invariants(stated, w, *samples, &mut rng, *cap)?;
                    summary.absorb(&id, labels, &invariants.checks);
                }
            }
            emit(json, &summary, || summary.text())?;
            Ok(if summary.passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            })
        }
        Command::Dynamics {
            file,
            script,
            auto,
            max_steps,
        } => {
            let inst = load_pair(file)?;
            let (p, q) = (inst.truth().expect("checked"), inst.stated());
            let run = match script {
                Some(path) => {
                    let text = read(path)?;
                    let cmds = parse_script(&text, &inst.labels).with_context(|| path.display().to_string())?;
                    run_script(p, q, &cmds, *max_steps)?
                }
                None => run_auto(p, q, auto.unwrap_or(Mode::PStableOnly), *max_steps)?,
            };
            let rep = report::dynamics(&inst.labels, &run);
            emit(json, &rep, || report::dynamics_text(&rep))?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn nash_text(rep: &NashReport) -> String {
    let mut out = format!("{}\n", rep.status);
    match &rep.manipulations {
        Some(all) => {
            for w in all {
                out.push_str(&report::witness_text(w));
            }
        }
        None => {
            if let Some(w) = &rep.witness {
                out.push_str(&report::witness_text(w));
            }
        }
    }
    out
}
