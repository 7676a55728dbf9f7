//! Batch driver: encode objects, apply morphisms, run contract suites,
//! export the diagram, run finite-invariant experiments, and replay the
//! oracle checks.
//!
//! Every run is a pure function of its manifest (command, seed, window,
//! depth, budgets, paths): identical manifests produce identical output
//! bytes. Timing is reported on stderr only.

use cichon_core::clopen::ClopenSet;
use cichon_core::codecs::good::GoodFamilyKind;
use cichon_core::codecs::meager::meager_encode;
use cichon_core::codecs::null::null_encode;
use cichon_core::comblab::{self, FnSpace, Method, SearchBudget};
use cichon_core::error::Error as CoreError;
use cichon_core::tree::TreeApprox;
use cichon_core::tukey::check::{check_contract, ContractReport};
use cichon_core::tukey::diagram;
use cichon_core::tukey::{Carrier, Window};
use cichon_core::zoo;
use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

#[derive(Parser)]
#[command(
    name = "cichon",
    about = "Coded null/meager sets, executable morphisms, and a finite-invariant lab",
    version
)]
struct Cli {
    /// Optional JSON config file; explicit flags win over its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum EncodeKind {
    Null,
    Meager,
}

#[derive(Clone, Copy, ValueEnum)]
enum Side {
    Minus,
    Plus,
}

#[derive(Clone, Copy, ValueEnum)]
enum DiagramFormat {
    Dot,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Encode a cover list (null) or tree list (meager) into a code.
    Encode {
        #[arg(long, value_enum)]
        kind: EncodeKind,
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: PathBuf,
        /// Good family for meager codes.
        #[arg(long, default_value = "intervals")]
        family: String,
        /// Member-search budget for meager codes.
        #[arg(long)]
        budget: Option<u64>,
    },
    /// Apply one side of a registered morphism to a file of carriers.
    Apply {
        #[arg(long)]
        morphism: String,
        #[arg(long, value_enum)]
        side: Side,
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: PathBuf,
        /// Window as "n0,n_end".
        #[arg(long)]
        window: Option<String>,
        #[arg(long)]
        depth: Option<u32>,
    },
    /// Run a morphism's contract over seeded samples.
    Check {
        #[arg(long)]
        morphism: String,
        #[arg(long)]
        trials: Option<u64>,
        #[arg(long)]
        window: Option<String>,
        #[arg(long)]
        depth: Option<u32>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        output: PathBuf,
    },
    /// Export the ten-node diagram.
    Diagram {
        #[arg(long, value_enum)]
        format: DiagramFormat,
        #[arg(long)]
        output: PathBuf,
    },
    /// Finite-invariant experiments (CSV output).
    Experiment {
        /// One of: ioe, ed.
        #[arg(long)]
        name: String,
        #[arg(long)]
        length: Option<u32>,
        #[arg(long)]
        alphabet: Option<u32>,
        #[arg(long, default_value = "exhaustive")]
        method: String,
        #[arg(long)]
        output: PathBuf,
    },
    /// Replay a named oracle verification.
    Oracle {
        /// One of: lemma-intersecting, gooddef, enum-sweep,
        /// measure-discipline.
        #[arg(long)]
        name: String,
        #[arg(long)]
        output: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
    },
}

#[derive(Debug, Default, Deserialize)]
struct FileConfig {
    trials: Option<u64>,
    window: Option<String>,
    depth: Option<u32>,
    seed: Option<u64>,
    budget: Option<u64>,
}

#[derive(Debug, Serialize)]
struct Manifest {
    command: String,
    morphism: Option<String>,
    seed: Option<u64>,
    window: Option<Window>,
    depth: Option<u32>,
    budgets: Vec<(String, u64)>,
    input: Option<String>,
    output: String,
}

#[derive(Debug, Serialize)]
struct CheckFile {
    manifest: Manifest,
    report: ContractReport,
}

fn parse_window(spec: &str, depth: u32) -> Result<Window, CoreError> {
    let parts: Vec<&str> = spec.split(',').collect();
    if parts.len() != 2 {
        return Err(CoreError::Parse(format!(
            "window must be \"n0,n_end\", got {spec:?}"
        )));
    }
    let n0 = parts[0]
        .trim()
        .parse()
        .map_err(|e| CoreError::Parse(format!("bad n0: {e}")))?;
    let n_end = parts[1]
        .trim()
        .parse()
        .map_err(|e| CoreError::Parse(format!("bad n_end: {e}")))?;
    Window::new(n0, n_end, depth)
}

fn read_lines<T: for<'de> Deserialize<'de>>(path: &PathBuf) -> Result<Vec<T>, CoreError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CoreError::Parse(format!("cannot read {}: {e}", path.display())))?;
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| serde_json::from_str(l).map_err(|e| CoreError::Parse(format!("bad line: {e}"))))
        .collect()
}

fn write_file(path: &PathBuf, bytes: &[u8]) -> Result<(), CoreError> {
    fs::write(path, bytes)
        .map_err(|e| CoreError::Parse(format!("cannot write {}: {e}", path.display())))
}

/// Exit taxonomy: 0 ok, 1 failed check, 2 parse/unknown, 3 precondition.
fn exit_for(err: &CoreError) -> u8 {
    match err {
        CoreError::Parse(_) => 2,
        CoreError::Precondition(_)
        | CoreError::CoverMeasure { .. }
        | CoreError::NotNowhereDense(_)
        | CoreError::InvalidTree(_)
        | CoreError::InvalidChain { .. }
        | CoreError::StagesNotIncreasing(_) => 3,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let config: FileConfig = match &cli.config {
        None => FileConfig::default(),
        Some(path) => {
            let parsed = fs::read_to_string(path)
                .map_err(|e| CoreError::Parse(e.to_string()))
                .and_then(|s| {
                    serde_json::from_str(&s).map_err(|e| CoreError::Parse(e.to_string()))
                });
            match parsed {
                Ok(c) => c,
                Err(e) => {
                    eprintln!("config error: {e}");
                    return ExitCode::from(2);
                }
            }
        }
    };
    let started = Instant::now();
    let code = match run(cli.command, &config) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_for(&e)
        }
    };
    eprintln!("elapsed: {} ms", started.elapsed().as_millis());
    ExitCode::from(code)
}

fn run(cmd: Command, config: &FileConfig) -> Result<u8, CoreError> {
    match cmd {
        Command::Encode {
            kind,
            input,
            output,
            family,
            budget,
        } => {
            let budget = budget.or(config.budget).unwrap_or(1 << 14);
            match kind {
                EncodeKind::Null => {
                    let covers: Vec<ClopenSet> = read_lines(&input)?;
                    let code = null_encode(&covers)?;
                    let mut out = serde_json::to_string(&code)
                        .map_err(|e| CoreError::Parse(e.to_string()))?;
                    out.push('\n');
                    write_file(&output, out.as_bytes())?;
                }
                EncodeKind::Meager => {
                    let fam_kind = match family.as_str() {
                        "intervals" => GoodFamilyKind::Intervals,
                        "intersecting" => GoodFamilyKind::Intersecting,
                        other => {
                            return Err(CoreError::Parse(format!("unknown family {other:?}")))
                        }
                    };
                    let trees: Vec<TreeApprox> = read_lines(&input)?;
                    let fam = cichon_core::tukey::standard_families().of_kind(fam_kind);
                    let code = meager_encode(&trees, &fam, budget)?;
                    let mut out = serde_json::to_string(&code)
                        .map_err(|e| CoreError::Parse(e.to_string()))?;
                    out.push('\n');
                    write_file(&output, out.as_bytes())?;
                }
            }
            Ok(0)
        }
        Command::Apply {
            morphism,
            side,
            input,
            output,
            window,
            depth,
        } => {
            let m = zoo::build_morphism(&morphism)
                .ok_or_else(|| CoreError::Parse(format!("unknown morphism {morphism:?}")))?;
            let depth = depth.or(config.depth).unwrap_or(24);
            let w = match window.or_else(|| config.window.clone()) {
                Some(s) => parse_window(&s, depth)?,
                None => Window::new(4, 24, depth)?,
            };
            let carriers: Vec<Carrier> = read_lines(&input)?;
            let mut lines = String::new();
            for c in &carriers {
                let applied = match side {
                    Side::Minus => m.minus(c, &w),
                    Side::Plus => m.plus(c, &w),
                };
                let record = match applied {
                    Ok(out) => serde_json::json!({
                        "input": c,
                        "output": out,
                        "truncations": [],
                    }),
                    Err(tr) => serde_json::json!({
                        "input": c,
                        "output": null,
                        "truncations": [tr],
                    }),
                };
                lines.push_str(
                    &serde_json::to_string(&record)
                        .map_err(|e| CoreError::Parse(e.to_string()))?,
                );
                lines.push('\n');
            }
            write_file(&output, lines.as_bytes())?;
            Ok(0)
        }
        Command::Check {
            morphism,
            trials,
            window,
            depth,
            seed,
            output,
        } => {
            let m = zoo::build_morphism(&morphism)
                .ok_or_else(|| CoreError::Parse(format!("unknown morphism {morphism:?}")))?;
            let sampler = zoo::standard_sampler(&morphism)
                .ok_or_else(|| CoreError::Parse(format!("no sampler for {morphism:?}")))?;
            let depth = depth.or(config.depth).unwrap_or(24);
            let w = match window.or_else(|| config.window.clone()) {
                Some(s) => parse_window(&s, depth)?,
                None => Window::new(4, 24, depth)?,
            };
            let trials = trials.or(config.trials).unwrap_or(10_000);
            let seed = seed.or(config.seed).unwrap_or(0);
            let report = check_contract(&m, &sampler, &w, trials, seed);
            let violated = report.counts.violated > 0;
            let file = CheckFile {
                manifest: Manifest {
                    command: "check".into(),
                    morphism: Some(morphism),
                    seed: Some(seed),
                    window: Some(w),
                    depth: Some(depth),
                    budgets: vec![("trials".into(), trials)],
                    input: None,
                    output: output.display().to_string(),
                },
                report,
            };
            let mut out = serde_json::to_string_pretty(&file)
                .map_err(|e| CoreError::Parse(e.to_string()))?;
            out.push('\n');
            write_file(&output, out.as_bytes())?;
            Ok(if violated { 1 } else { 0 })
        }
        Command::Diagram { format, output } => {
            let bytes = match format {
                DiagramFormat::Dot => diagram::to_dot(&diagram::base_edges()).into_bytes(),
                DiagramFormat::Json => {
                    let mut s = serde_json::to_string_pretty(&diagram::diagram_json())
                        .map_err(|e| CoreError::Parse(e.to_string()))?;
                    s.push('\n');
                    s.into_bytes()
                }
            };
            write_file(&output, &bytes)?;
            Ok(0)
        }
        Command::Experiment {
            name,
            length,
            alphabet,
            method,
            output,
        } => {
            let method = match method.as_str() {
                "exhaustive" => Method::Exhaustive,
                "greedy" => Method::Greedy,
                other => return Err(CoreError::Parse(format!("unknown method {other:?}"))),
            };
            let space = FnSpace::new(length.unwrap_or(2), alphabet.unwrap_or(2))?;
            let budget = SearchBudget::default();
            let report = match name.as_str() {
                "ioe" => comblab::ioe_number(space, method, &budget)?,
                "ed" => comblab::ed_number(space, method, &budget)?,
                other => return Err(CoreError::Parse(format!("unknown experiment {other:?}"))),
            };
            let witness: Vec<String> = report
                .witness
                .iter()
                .map(|w| {
                    w.iter()
                        .map(|b| b.to_string())
                        .collect::<Vec<_>>()
                        .join("")
                })
                .collect();
            let mut csv =
                String::from("experiment,length,alphabet,method,value,minimal,witness\n");
            csv.push_str(&format!(
                "{},{},{},{:?},{},{},{}\n",
                name,
                space.length,
                space.alphabet,
                report.method,
                report.value,
                report.minimal,
                witness.join("|")
            ));
            write_file(&output, csv.as_bytes())?;
            Ok(0)
        }
        Command::Oracle { name, output, seed } => {
            let seed = seed.or(config.seed).unwrap_or(0);
            let (pass, detail) = run_oracle(&name, seed)?;
            let file = serde_json::json!({
                "manifest": {
                    "command": "oracle",
                    "name": name,
                    "seed": seed,
                },
                "pass": pass,
                "detail": detail,
            });
            let mut out = serde_json::to_string_pretty(&file)
                .map_err(|e| CoreError::Parse(e.to_string()))?;
            out.push('\n');
            write_file(&output, out.as_bytes())?;
            Ok(if pass { 0 } else { 1 })
        }
    }
}

fn run_oracle(name: &str, seed: u64) -> Result<(bool, serde_json::Value), CoreError> {
    use cichon_core::index::ClopenFamily;
    use num_bigint::BigUint;
    match name {
        // Every subset of size <= 2^n of the first distinct members of
        // layer n intersects, n <= 2.
        "lemma-intersecting" => {
            fn rec(
                from: usize,
                stack: &mut Vec<usize>,
                members: &[ClopenSet],
                cap: usize,
                checked: &mut u64,
            ) -> bool {
                if !stack.is_empty() {
                    let mut meet = members[stack[0]].clone();
                    for &i in &stack[1..] {
                        meet = meet.intersect(&members[i]);
                    }
                    *checked += 1;
                    if meet.is_empty() {
                        return false;
                    }
                }
                if stack.len() == cap {
                    return true;
                }
                for i in from..members.len() {
                    stack.push(i);
                    let ok = rec(i + 1, stack, members, cap, checked);
                    stack.pop();
                    if !ok {
                        return false;
                    }
                }
                true
            }
            let fams = cichon_core::tukey::standard_families();
            let mut checked = 0u64;
            for n in 0..=2u32 {
                let members: Vec<ClopenSet> = fams
                    .intersecting
                    .distinct_members(n)
                    .into_iter()
                    .take(8)
                    .collect();
                let cap = 1usize << n;
                let mut stack = Vec::new();
                if !rec(0, &mut stack, &members, cap, &mut checked) {
                    return Ok((
                        false,
                        serde_json::json!({"layer": n, "subsets_checked": checked}),
                    ));
                }
            }
            Ok((true, serde_json::json!({"subsets_checked": checked})))
        }
        // Interval family meets its basis everywhere on a sweep.
        "gooddef" => {
            let fam = cichon_core::codecs::good::GoodFamily::Intervals;
            for n in 0..6u32 {
                for m in 0..100u64 {
                    if !fam.meets_basis(n, m)? {
                        return Ok((false, serde_json::json!({"n": n, "m": m})));
                    }
                }
            }
            Ok((
                true,
                serde_json::json!({"layers": 6, "members_per_layer": 100}),
            ))
        }
        // Family members respect the measure bound on an index sweep.
        "enum-sweep" => {
            for level in [0u32, 1, 3, 8] {
                let fam = ClopenFamily::new(level);
                for m in 0..1000u64 {
                    let set = fam.member(&BigUint::from(m))?;
                    if !set.measure().le_pow2_neg(level) {
                        return Ok((false, serde_json::json!({"level": level, "m": m})));
                    }
                }
            }
            Ok((
                true,
                serde_json::json!({"levels": [0, 1, 3, 8], "indices": 1000}),
            ))
        }
        // Random cover lists: exact stage measures obey 2^-m.
        "measure-discipline" => {
            use rand::Rng;
            use rand_chacha::rand_core::SeedableRng;
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            for trial in 0..200u64 {
                let covers: Vec<ClopenSet> = (0..8u32)
                    .map(|n| {
                        let len = n + rng.gen_range(0..3);
                        let bits: Vec<u8> = (0..len).map(|_| rng.gen_range(0..2u8)).collect();
                        ClopenSet::cylinder(
                            cichon_core::bits::BitString::from_bits(bits).unwrap(),
                        )
                    })
                    .collect();
                let code = null_encode(&covers)?;
                if code.horizon() < 2 {
                    continue;
                }
                let top = code.horizon() - 1;
                for m in 0..top {
                    let stage = cichon_core::codecs::null::null_stage(&code, m, top)?;
                    if !stage.measure().le_pow2_neg(m) {
                        return Ok((false, serde_json::json!({"trial": trial, "m": m})));
                    }
                }
            }
            Ok((true, serde_json::json!({"trials": 200})))
        }
        other => Err(CoreError::Parse(format!("unknown oracle {other:?}"))),
    }
}
