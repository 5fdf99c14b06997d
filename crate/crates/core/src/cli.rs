//! The `manna` command-line front end. [`run`] does all the work so the
//! binary stays a one-liner and the commands can be tested in-process.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::fairness::{check_ef1, check_mms, check_prop1};
use crate::instgen::{self, fixtures, CappedParams, ExPDMInstance};
use crate::model::{utility_vector, Allocation, Instance};
use crate::oracle::{brute_leximin, brute_lorenz_dominating, brute_max_usw, brute_mms, OracleBudget};
use crate::solver::{exchange_bound, solve_detailed, SolveReport};
use crate::valuations::{validate_order_neutral, validate_range, validate_submodular, ValidationFailure, ValuationSpec, MAX_TABLE_ITEMS};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;
pub const EXIT_INVALID: i32 = 4;

#[derive(Parser, Debug)]
#[command(name = "manna", version, about = "Leximin allocations of mixed goods and chores")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run the three-phase solver and print its report.
    Solve {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
        /// Print one line per augmentation and chore assignment to stderr.
        #[arg(long)]
        trace: bool,
        #[arg(long)]
        human: bool,
    },
    /// Exhaustive leximin and maximum welfare.
    Brute {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        human: bool,
    },
    /// Check fairness and optimality properties of an allocation.
    Verify {
        #[arg(long)]
        instance: PathBuf,
        /// An allocation document or a solve report.
        #[arg(long)]
        allocation: PathBuf,
        #[arg(long, value_delimiter = ',', default_value = "leximin,prop1,ef1,mms,lorenz,usw")]
        props: Vec<Prop>,
        #[arg(long)]
        human: bool,
    },
    /// Generate an instance.
    Gen {
        #[command(subcommand)]
        family: GenFamily,
    },
    /// Run the submodularity, order-neutrality and range validators.
    Validate {
        #[arg(long)]
        instance: PathBuf,
    },
    /// Time the solver over generated instances and print CSV.
    Bench(BenchArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Prop {
    Leximin,
    Prop1,
    Ef1,
    Mms,
    Lorenz,
    Usw,
}

impl Prop {
    fn name(self) -> &'static str {
        match self {
            Prop::Leximin => "leximin",
            Prop::Prop1 => "prop1",
            Prop::Ef1 => "ef1",
            Prop::Mms => "mms",
            Prop::Lorenz => "lorenz",
            Prop::Usw => "usw",
        }
    }

    fn needs_oracle(self) -> bool {
        matches!(self, Prop::Leximin | Prop::Mms | Prop::Lorenz | Prop::Usw)
    }
}

#[derive(Subcommand, Debug)]
enum GenFamily {
    /// Independent values from {c, 0, -1}.
    Additive {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        c: i64,
        /// Ratios p_c:p_0:p_m1.
        #[arg(long, default_value = "1:1:1", value_parser = parse_ratios)]
        ratios: (u32, u32, u32),
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Random capped groups per agent.
    Capped {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        c: i64,
        /// Inclusive range for the number of groups, e.g. `0-3`.
        #[arg(long, default_value = "0-3", value_parser = parse_range)]
        groups: (u64, u64),
        #[arg(long, default_value = "0-3", value_parser = parse_range)]
        caps: (u64, u64),
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Reduction from exact p-dimensional matching.
    Hardness {
        #[arg(long)]
        p: usize,
        #[arg(long)]
        q: u64,
        #[arg(long)]
        a: usize,
        /// Edges as `;`-separated tuples of per-part vertices, e.g. `0,0,0;1,1,1`.
        #[arg(long)]
        edges: String,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// One of the named example instances.
    Fixture {
        name: String,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(Args, Debug)]
struct BenchArgs {
    #[arg(long, value_enum, default_value = "capped")]
    family: BenchFamily,
    /// Comma-separated `n x m` sizes, e.g. `2x8,3x12`.
    #[arg(long, value_delimiter = ',', value_parser = parse_size, default_value = "2x8,3x12,4x16")]
    sizes: Vec<(usize, usize)>,
    #[arg(long, default_value_t = 2)]
    c: i64,
    /// Seeds `0..seeds` per size.
    #[arg(long, default_value_t = 5)]
    seeds: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum BenchFamily {
    Additive,
    Capped,
}

fn parse_ratios(s: &str) -> std::result::Result<(u32, u32, u32), String> {
    let parts: Vec<&str> = s.split(':').collect();
    let nums: std::result::Result<Vec<u32>, _> = parts.iter().map(|p| p.trim().parse()).collect();
    match nums.as_deref() {
        Ok([a, b, c]) => Ok((*a, *b, *c)),
        _ => Err(format!("expected p_c:p_0:p_m1, got {s:?}")),
    }
}

fn parse_range(s: &str) -> std::result::Result<(u64, u64), String> {
    let (lo, hi) = s.split_once('-').unwrap_or((s, s));
    match (lo.trim().parse(), hi.trim().parse()) {
        (Ok(lo), Ok(hi)) if lo <= hi => Ok((lo, hi)),
        _ => Err(format!("expected lo-hi with lo <= hi, got {s:?}")),
    }
}

fn parse_size(s: &str) -> std::result::Result<(usize, usize), String> {
    let (n, m) = s.split_once('x').ok_or_else(|| format!("expected NxM, got {s:?}"))?;
    match (n.trim().parse(), m.trim().parse()) {
        (Ok(n), Ok(m)) => Ok((n, m)),
        _ => Err(format!("expected NxM, got {s:?}")),
    }
}

fn parse_edges(s: &str) -> Result<Vec<Vec<usize>>> {
    s.split(';')
        .filter(|e| !e.trim().is_empty())
        .map(|e| {
            e.split(',')
                .map(|v| v.trim().parse().map_err(|_| Error::Contract(format!("bad vertex {v:?} in edge {e:?}"))))
                .collect()
        })
        .collect()
}

/// Exit code for a library error.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::BudgetExceeded { .. } => EXIT_BUDGET,
        Error::InvalidInstance(_)
        | Error::MalformedValuation { .. }
        | Error::UnsupportedValuation { .. }
        | Error::Parse { .. } => EXIT_INVALID,
        Error::Contract(_) | Error::Io(_) => EXIT_USAGE,
        Error::OracleViolation { .. } | Error::Decomposition { .. } | Error::Invariant(_) => EXIT_VIOLATION,
    }
}

/// Runs the CLI on `argv` (including the program name) with process stdio.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(argv, &mut stdout.lock(), &mut stderr.lock())
}

/// Like [`run`] but writing to the given streams.
pub fn run_with<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return code;
        }
    };
    match dispatch(cli.command, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

fn load_instance(path: &Path) -> Result<Instance> {
    instgen::parse_instance(&instgen::read_file(path)?)
}

fn emit(text: &str, output: Option<&Path>, out: &mut dyn Write) -> Result<()> {
    match output {
        Some(path) => std::fs::write(path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display()))),
        None => out.write_all(text.as_bytes()).map_err(Error::from),
    }
}

fn dispatch(command: Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    match command {
        Command::Solve { instance, output, trace, human } => {
            let inst = load_instance(&instance)?;
            let (report, state) = solve_detailed(&inst)?;
            if trace {
                for line in &state.trace {
                    writeln!(err, "{line}")?;
                }
            }
            let text = if human { render_report(&inst, &report) } else { instgen::report_to_json(&report) };
            emit(&text, output.as_deref(), out)?;
            Ok(EXIT_OK)
        }
        Command::Brute { instance, human } => {
            let inst = load_instance(&instance)?;
            let budget = OracleBudget::from_env()?;
            let (sorted, witness) = brute_leximin(&inst, &budget)?;
            let usw = brute_max_usw(&inst, &budget)?;
            let utilities = utility_vector(&inst, &witness);
            if human {
                let mut text = format!("leximin sorted utilities: {:?}\nmaximum welfare: {usw}\n", sorted.values());
                text.push_str(&render_bundles(&inst, &witness));
                out.write_all(text.as_bytes())?;
            } else {
                let doc = json!({ "sorted": sorted, "witness": witness, "utilities": utilities, "max_usw": usw });
                out.write_all(instgen::to_json(&doc).as_bytes())?;
            }
            Ok(EXIT_OK)
        }
        Command::Verify { instance, allocation, props, human } => {
            let inst = load_instance(&instance)?;
            let text = instgen::read_file(&allocation)?;
            let alloc = match instgen::parse_allocation(&text, &inst) {
                Ok(a) => a,
                Err(first) => match instgen::parse_report(&text) {
                    Ok(report) => report.allocation,
                    Err(_) => return Err(first),
                },
            };
            if alloc.num_agents() != inst.num_agents() || alloc.num_items() != inst.num_items() {
                return Err(Error::InvalidInstance("allocation does not match the instance".into()));
            }
            if !alloc.is_complete() {
                return Err(Error::InvalidInstance("allocation is not complete".into()));
            }
            let (doc, all_ok) = verify(&inst, &alloc, &props)?;
            if human {
                out.write_all(render_verdicts(&doc).as_bytes())?;
            } else {
                out.write_all(instgen::to_json(&doc).as_bytes())?;
            }
            Ok(if all_ok { EXIT_OK } else { EXIT_VIOLATION })
        }
        Command::Gen { family } => {
            let (inst, output) = match family {
                GenFamily::Additive { n, m, c, ratios, seed, output } => {
                    (instgen::gen_random_additive(n, m, c, ratios, seed)?, output)
                }
                GenFamily::Capped { n, m, c, groups, caps, seed, output } => {
                    let params = CappedParams {
                        n,
                        m,
                        c,
                        groups: groups.0 as usize..=groups.1 as usize,
                        caps: caps.0 as u32..=caps.1 as u32,
                        seed,
                    };
                    (instgen::gen_capped_groups(&params)?, output)
                }
                GenFamily::Hardness { p, q, a, edges, output } => {
                    let expdm = ExPDMInstance::new(p, a, parse_edges(&edges)?)?;
                    (instgen::gen_hardness(&expdm, q)?, output)
                }
                GenFamily::Fixture { name, output } => {
                    let inst = fixtures::by_name(&name).ok_or_else(|| {
                        let names: Vec<&str> = fixtures::all().iter().map(|(n, _)| *n).collect();
                        Error::Contract(format!("unknown fixture {name:?}; expected one of {}", names.join(", ")))
                    })?;
                    (inst, output)
                }
            };
            emit(&instgen::instance_to_json(&inst), output.as_deref(), out)?;
            Ok(EXIT_OK)
        }
        Command::Validate { instance } => {
            let inst = load_instance(&instance)?;
            let (doc, all_ok) = validate(&inst)?;
            out.write_all(instgen::to_json(&doc).as_bytes())?;
            Ok(if all_ok { EXIT_OK } else { EXIT_VIOLATION })
        }
        Command::Bench(args) => {
            bench(&args, out)?;
            Ok(EXIT_OK)
        }
    }
}

fn verify(inst: &Instance, alloc: &Allocation, props: &[Prop]) -> Result<(Value, bool)> {
    let budget = OracleBudget::from_env()?;
    if props.iter().any(|p| p.needs_oracle()) {
        budget.check(inst.num_agents(), inst.num_items())?;
    }
    let utilities = utility_vector(inst, alloc);
    let mut doc = serde_json::Map::new();
    let mut all_ok = true;
    for &prop in props {
        let (ok, detail) = match prop {
            Prop::Leximin => {
                let (best, _) = brute_leximin(inst, &budget)?;
                let got = utilities.sorted();
                (got == best, json!({ "sorted": got, "optimal_sorted": best }))
            }
            Prop::Prop1 => {
                let agents = check_prop1(inst, alloc)?;
                (agents.iter().all(|&b| b), json!({ "agents": agents }))
            }
            Prop::Ef1 => {
                let pairs = check_ef1(inst, alloc)?;
                let violations: Vec<[usize; 2]> =
                    pairs.iter().filter(|p| !p.ok).map(|p| [p.envier.index(), p.envied.index()]).collect();
                (violations.is_empty(), json!({ "pairs": pairs, "violations": violations }))
            }
            Prop::Mms => {
                let mms = inst.agents().map(|a| brute_mms(inst, a, &budget)).collect::<Result<Vec<_>>>()?;
                let agents = check_mms(inst, alloc, &mms)?;
                (agents.iter().all(|&b| b), json!({ "mms": mms, "utilities": utilities, "agents": agents }))
            }
            Prop::Lorenz => (brute_lorenz_dominating(inst, alloc, &budget)?, json!({})),
            Prop::Usw => {
                let best = brute_max_usw(inst, &budget)?;
                (utilities.sum() == best, json!({ "usw": utilities.sum(), "max_usw": best }))
            }
        };
        let mut entry = detail;
        entry["ok"] = json!(ok);
        all_ok &= ok;
        doc.insert(prop.name().into(), entry);
    }
    Ok((Value::Object(doc), all_ok))
}

fn verdict(r: std::result::Result<(), ValidationFailure>) -> (bool, Value) {
    match r {
        Ok(()) => (true, json!("ok")),
        Err(f) => (false, serde_json::to_value(&f).expect("serializable")),
    }
}

fn validate(inst: &Instance) -> Result<(Value, bool)> {
    let mut agents = Vec::new();
    let mut all_ok = true;
    for agent in inst.agents() {
        let spec = inst.valuation(agent);
        let mut entry = json!({ "agent": agent, "kind": spec.kind() });
        let structural_only = matches!(spec, ValuationSpec::Additive(_) | ValuationSpec::CappedGroups(_))
            && inst.num_items() > MAX_TABLE_ITEMS;
        if structural_only {
            // Too large to tabulate; these kinds are order-neutral submodular by construction.
            entry["structural_only"] = json!(true);
        } else {
            let table = spec.materialize(inst.num_items())?;
            for (name, r) in [
                ("submodular", validate_submodular(&table)),
                ("order_neutral", validate_order_neutral(&table)),
                ("range", validate_range(&table, inst.c())),
            ] {
                let (ok, v) = verdict(r);
                all_ok &= ok;
                entry[name] = v;
            }
        }
        agents.push(entry);
    }
    Ok((json!({ "agents": agents, "ok": all_ok }), all_ok))
}

fn bench(args: &BenchArgs, out: &mut dyn Write) -> Result<()> {
    writeln!(out, "family,n,m,c,seed,micros,pareto_augmentations,exchange_augmentations,pareto_bound,exchange_bound")?;
    for &(n, m) in &args.sizes {
        for seed in 0..args.seeds {
            let (family, inst) = match args.family {
                BenchFamily::Additive => ("additive", instgen::gen_random_additive(n, m, args.c, (1, 1, 1), seed)?),
                BenchFamily::Capped => (
                    "capped",
                    instgen::gen_capped_groups(&CappedParams { n, m, c: args.c, groups: 0..=3, caps: 0..=3, seed })?,
                ),
            };
            let start = Instant::now();
            let (report, _) = solve_detailed(&inst)?;
            let micros = start.elapsed().as_micros();
            writeln!(
                out,
                "{family},{n},{m},{},{seed},{micros},{},{},{m},{}",
                args.c,
                report.pareto_augmentations,
                report.exchange_augmentations,
                exchange_bound(n, m)
            )?;
        }
    }
    Ok(())
}

fn render_bundles(inst: &Instance, alloc: &Allocation) -> String {
    let mut text = format!("{:<7} {:>7}  bundle\n", "agent", "utility");
    for a in inst.agents() {
        text.push_str(&format!("{:<7} {:>7}  {}\n", a, inst.value(a, alloc.bundle(a)), alloc.bundle(a)));
    }
    text
}

fn render_report(inst: &Instance, report: &SolveReport) -> String {
    let d = &report.decomposition;
    let mut text = format!("{:<7} {:>7} {:>4} {:>4} {:>4}  bundle\n", "agent", "utility", "c", "0", "-1");
    for a in inst.agents() {
        text.push_str(&format!(
            "{:<7} {:>7} {:>4} {:>4} {:>4}  {}\n",
            a,
            report.utilities.get(a),
            d.xc.bundle(a).len(),
            d.x0.bundle(a).len(),
            d.xm1.bundle(a).len(),
            report.allocation.bundle(a)
        ));
    }
    text.push_str(&format!(
        "sorted {:?}  welfare {}  pareto {}  exchange {}\n",
        report.sorted.values(),
        report.usw,
        report.pareto_augmentations,
        report.exchange_augmentations
    ));
    text
}

fn render_verdicts(doc: &Value) -> String {
    let mut text = String::new();
    if let Value::Object(map) = doc {
        for (name, entry) in map {
            let ok = entry["ok"].as_bool().unwrap_or(false);
            text.push_str(&format!("{name:<8} {}\n", if ok { "pass" } else { "FAIL" }));
        }
    }
    text
}
