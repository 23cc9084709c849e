//! `triarea` command-line front end.

use std::io::{Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use triarea::bounds::{formula_bounds, verify_with_census, CheckStatus};
use triarea::census::{census_with, count_facial, AreaCensus};
use triarea::chain::max_chain;
use triarea::conic::{validate_general_position, GeneralPositionOptions};
use triarea::constructions::{
    hexgrid, hexgrid_formula, pentagon, random_arrangement, scale_to_unit_min, st_extremal, trigrid, trigrid_formula,
    Kind,
};
use triarea::duality::{check_duality, lift, unit_frame};
use triarea::extraction::{dedupe_slopes, extract_rainbow, is_rainbow, ColoredTripleSystem, Strategy};
use triarea::{Arrangement, ExecMode, PrecisionPolicy, Scalar};

const SCHEMA_VERSION: u32 = 1;

#[derive(Parser)]
#[command(name = "triarea", version, about = "Exact triangle-area census for line arrangements")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a constructed arrangement.
    Generate(GenerateArgs),
    /// Area census of an arrangement.
    Census(CensusArgs),
    /// Check bounds, duality or general position.
    #[command(subcommand)]
    Verify(Verify),
    /// Lift the frame of one line to points and dual lines.
    Dualize(DualizeArgs),
    /// Find a subset of lines whose triangles have pairwise distinct areas.
    ExtractDistinct(ExtractArgs),
    /// Recompute published tables.
    #[command(subcommand)]
    Reproduce(Reproduce),
}

#[derive(Args)]
struct Input {
    /// Arrangement file; standard input when omitted or `-`.
    file: Option<PathBuf>,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct GenerateArgs {
    /// hexgrid, trigrid, pentagon, max-chain, st-extremal or random.
    kind: String,
    #[arg(short)]
    n: Option<usize>,
    #[arg(short)]
    k: Option<usize>,
    #[arg(long)]
    scale_to_unit_min: bool,
    /// Seed for `random`.
    #[arg(long)]
    seed: Option<u64>,
    /// Coefficient range for `random`.
    #[arg(long, default_value_t = 20)]
    range: i64,
    /// Allow parallel and concurrent lines in `random`.
    #[arg(long)]
    degenerate: bool,
    #[arg(short)]
    o: Option<PathBuf>,
    /// Bits kept when rounding max-chain offsets for the file.
    #[arg(long, default_value_t = 200)]
    bits: u32,
}

#[derive(Args)]
struct CensusArgs {
    #[command(flatten)]
    input: Input,
    #[arg(long)]
    facial: bool,
    #[arg(long)]
    per_line: bool,
    /// Count triangles of this exact area.
    #[arg(long)]
    lambda: Option<String>,
}

#[derive(Subcommand)]
enum Verify {
    /// Bounds and structural invariants.
    Bounds(Input),
    /// Unit triangles on a line against the incidence count of the lift.
    Duality {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value_t = 0)]
        line: usize,
    },
    /// Parallel pairs, concurrences and six lines tangent to one conic.
    GeneralPosition {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value_t = 250_000)]
        exhaustive_cap: u64,
        #[arg(long, default_value_t = 20_000)]
        samples: usize,
        #[arg(long)]
        seed: Option<u64>,
    },
}

#[derive(Args)]
struct DualizeArgs {
    #[command(flatten)]
    input: Input,
    #[arg(long)]
    line: usize,
}

#[derive(Args)]
struct ExtractArgs {
    #[command(flatten)]
    input: Input,
    #[arg(long, default_value = "greedy")]
    strategy: String,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value_t = 8)]
    trials: usize,
}

#[derive(Subcommand)]
enum Reproduce {
    /// Facial-triangle counts of both grids for n = 3..12.
    Table1 {
        #[arg(long)]
        json: bool,
    },
}

/// Failure classes with their exit statuses.
#[derive(Debug)]
enum Failure {
    Usage(String),
    Check(String),
    Undecided(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Check(_) => 1,
            Failure::Undecided(_) => 3,
        }
    }
}

type Outcome = Result<(), Failure>;

fn usage(e: impl std::fmt::Display) -> Failure {
    Failure::Usage(e.to_string())
}

struct Loaded {
    arr: Arrangement,
    digest: String,
}

fn load(input: &Input) -> Result<Loaded, Failure> {
    let text = match &input.file {
        Some(p) if p.as_os_str() != "-" => {
            std::fs::read_to_string(p).map_err(|e| usage(format!("{}: {e}", p.display())))?
        }
        _ => {
            let mut s = String::new();
            std::io::stdin().read_to_string(&mut s).map_err(usage)?;
            s
        }
    };
    let arr: Arrangement = text.parse().map_err(usage)?;
    if arr.len() < 3 {
        return Err(usage(format!("n >= 3 required, got {}", arr.len())));
    }
    let digest = format!("{:x}", Sha256::digest(text.as_bytes()));
    Ok(Loaded { arr, digest })
}

fn require_seed(seed: Option<u64>, json: bool) -> Result<u64, Failure> {
    match (seed, json) {
        (Some(s), _) => Ok(s),
        (None, true) => Err(usage("--seed is required with --json")),
        (None, false) => Ok(0),
    }
}

fn command_echo() -> Vec<String> {
    std::env::args().skip(1).collect()
}

fn report(input: Option<&Loaded>, seed: Option<u64>, passed: bool, results: Value) -> Value {
    json!({
        "schema_version": SCHEMA_VERSION,
        "command": command_echo(),
        "input_sha256": input.map(|l| l.digest.clone()),
        "field": input.map(|l| l.arr.field().to_string()),
        "seed": seed,
        "passed": passed,
        "results": results,
    })
}

fn emit(v: &Value) {
    println!("{}", serde_json::to_string_pretty(v).expect("serializable"));
}

fn to_value(v: impl Serialize) -> Value {
    serde_json::to_value(v).expect("serializable")
}

fn write_output(text: &str, out: Option<&PathBuf>) -> Outcome {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| usage(format!("{}: {e}", p.display()))),
        None => std::io::stdout().write_all(text.as_bytes()).map_err(usage),
    }
}

fn generate(a: &GenerateArgs) -> Outcome {
    let kind: Kind = a.kind.parse().map_err(usage)?;
    let need_n = || a.n.ok_or_else(|| usage(format!("{} needs -n", a.kind)));
    let need_k = |min: usize| match a.k {
        Some(k) if k >= min => Ok(k),
        Some(k) => Err(usage(format!("{} needs k >= {min}, got {k}", a.kind))),
        None => Err(usage(format!("{} needs -k", a.kind))),
    };
    let mut arr = match kind {
        Kind::Hexgrid => hexgrid(need_n()?).map_err(usage)?,
        Kind::Trigrid => trigrid(need_n()?).map_err(usage)?,
        Kind::Pentagon => pentagon(),
        Kind::StExtremal => st_extremal(need_k(1)?).map_err(usage)?.arrangement,
        Kind::Random => {
            let n = need_n()?;
            if n < 3 {
                return Err(usage(format!("n >= 3 required, got {n}")));
            }
            let seed = a.seed.ok_or_else(|| usage("random needs --seed"))?;
            random_arrangement(n, a.range, !a.degenerate, seed)
        }
        Kind::MaxChain => {
            let k = need_k(0)?;
            let chain = max_chain(k, &PrecisionPolicy::from_env()).map_err(|e| Failure::Check(e.to_string()))?;
            let c = &chain.certificate;
            eprintln!(
                "max-chain k={k}: {} lines, {} certified maximum triangles (target {}), {} undecided",
                chain.len(),
                c.equal,
                5 + 7 * k,
                c.undecided
            );
            if c.undecided > 0 {
                return Err(Failure::Undecided(format!(
                    "{} comparisons undecided at {} bits; raise TRIAREA_PRECISION",
                    c.undecided,
                    PrecisionPolicy::from_env().max_bits
                )));
            }
            chain.approximate(a.bits).map_err(|e| Failure::Check(e.to_string()))?
        }
    };
    if a.scale_to_unit_min {
        arr = scale_to_unit_min(&arr).map_err(usage)?;
    }
    write_output(&arr.to_string(), a.o.as_ref())
}

fn per_line_table(cen: &AreaCensus) -> Vec<Value> {
    let mut rows = Vec::new();
    for (label, group) in [("min", cen.min_group()), ("max", cen.max_group())] {
        if let Some((area, _)) = group {
            rows.push(json!({
                "group": label,
                "area": area.to_string(),
                "counts": cen.per_line_counts(area),
            }));
        }
    }
    rows
}

fn census_cmd(a: &CensusArgs) -> Outcome {
    let input = load(&a.input)?;
    let mode = ExecMode::default();
    let cen = census_with(&input.arr, mode).map_err(usage)?;
    let lambda = a
        .lambda
        .as_deref()
        .map(|s| s.parse::<Scalar>().map_err(usage))
        .transpose()?;
    let facial = a.facial.then(|| count_facial(&input.arr, mode));
    if a.input.json {
        let mut results = json!({ "census": cen.summary() });
        if let Some(f) = facial {
            results["facial"] = json!(f);
        }
        if let Some(l) = &lambda {
            results["lambda"] = json!({ "area": l.to_string(), "count": cen.count_area(l) });
        }
        if a.per_line {
            results["per_line"] = json!(per_line_table(&cen));
        }
        emit(&report(Some(&input), None, true, results));
        return Ok(());
    }
    if let Some(f) = facial {
        if lambda.is_none() && !a.per_line {
            println!("{f}");
            return Ok(());
        }
        println!("facial: {f}");
    }
    let s = cen.summary();
    println!("n: {}", s.n);
    println!("triples: {} proper, {} concurrent, {} with a parallel pair", s.proper, s.concurrent, s.with_parallel_pair);
    println!("distinct areas: {}", s.distinct_areas);
    if let Some(m) = &s.min_area {
        println!("min area: {m} ({} triangles)", s.min_count);
    }
    if let Some(m) = &s.max_area {
        println!("max area: {m} ({} triangles)", s.max_count);
    }
    let hist: Vec<String> = s.histogram.iter().map(|(k, v)| format!("{k}x{v}")).collect();
    println!("group sizes: {}", hist.join(" "));
    if let Some(l) = &lambda {
        println!("area {l}: {}", cen.count_area(l));
    }
    if a.per_line {
        for row in per_line_table(&cen) {
            println!("per line ({} {}): {}", row["group"].as_str().unwrap_or(""), row["area"].as_str().unwrap_or(""), row["counts"]);
        }
    }
    Ok(())
}

fn verify_bounds(input: &Input) -> Outcome {
    let loaded = load(input)?;
    let mode = ExecMode::default();
    let cen = census_with(&loaded.arr, mode).map_err(usage)?;
    let rep = verify_with_census(&loaded.arr, &cen, mode).map_err(usage)?;
    if input.json {
        let results = json!({
            "formulas": to_value(formula_bounds(loaded.arr.len()).map_err(usage)?),
            "verify": to_value(&rep),
        });
        emit(&report(Some(&loaded), None, rep.passes, results));
    } else {
        for c in &rep.checks {
            let tag = match c.status {
                CheckStatus::Pass => "pass",
                CheckStatus::Fail => "FAIL",
                CheckStatus::NotApplicable => "n/a",
            };
            println!("{tag:4} {:22} {}", c.name, c.detail);
            if let Some(w) = &c.witness {
                println!("     witness: {w}");
            }
        }
        if !rep.remark_exceeding.is_empty() {
            println!("note: lines with |E+|+|E-| > n-1: {:?}", rep.remark_exceeding);
        }
    }
    if rep.passes {
        Ok(())
    } else {
        Err(Failure::Check("bounds check failed".into()))
    }
}

fn verify_duality(input: &Input, line: usize) -> Outcome {
    let loaded = load(input)?;
    let chk = check_duality(&loaded.arr, line).map_err(usage)?;
    if input.json {
        emit(&report(Some(&loaded), None, chk.holds, to_value(&chk)));
    } else {
        println!(
            "line {}: {} unit triangles, {} incidences: {}",
            chk.ell,
            chk.unit_triangles_on_ell,
            chk.incidences,
            if chk.holds { "equal" } else { "DIFFER" }
        );
    }
    if chk.holds {
        Ok(())
    } else {
        Err(Failure::Check("duality counts differ".into()))
    }
}

fn verify_general_position(input: &Input, cap: u64, samples: usize, seed: Option<u64>) -> Outcome {
    let loaded = load(input)?;
    let n = loaded.arr.len() as u64;
    let total = (0..6u64).fold(1u64, |acc, i| acc.saturating_mul(n.saturating_sub(i)) / (i + 1));
    let seed = if total > cap { Some(require_seed(seed, input.json)?) } else { seed };
    let opts = GeneralPositionOptions {
        exhaustive_cap: cap,
        samples,
        seed: seed.unwrap_or(0),
    };
    let rep = validate_general_position(&loaded.arr, &opts);
    if input.json {
        emit(&report(Some(&loaded), seed, rep.passes, to_value(&rep)));
    } else {
        println!("parallel pairs: {}", rep.parallel_pairs.len());
        println!("concurrent triples: {}", rep.concurrent_triples.len());
        println!(
            "6-subsets checked: {} of {} ({:.4})",
            rep.subsets_checked, rep.subsets_total, rep.coverage_fraction
        );
        println!("six lines on a common conic: {}", rep.six_tangent_found);
        for w in &rep.six_tangent_witnesses {
            println!("  witness {:?}", w.lines);
        }
        println!("{}", if rep.passes { "general position" } else { "NOT in general position" });
    }
    if rep.passes {
        Ok(())
    } else {
        Err(Failure::Check("arrangement is not in general position".into()))
    }
}

fn dualize(a: &DualizeArgs) -> Outcome {
    let loaded = load(&a.input)?;
    let (idx, params) = unit_frame(&loaded.arr, a.line).map_err(usage)?;
    let (points, lines) = lift(&params).map_err(usage)?;
    if a.input.json {
        let pts: Vec<Value> = idx
            .iter()
            .zip(&points)
            .map(|(i, p)| json!({ "line": i, "u": p.u.to_string(), "v": p.v.to_string() }))
            .collect();
        let dls: Vec<Value> = idx
            .iter()
            .zip(&lines)
            .map(|(i, l)| json!({ "line": i, "slope": l.slope.to_string(), "intercept": l.intercept.to_string() }))
            .collect();
        emit(&report(Some(&loaded), None, true, json!({ "ell": a.line, "points": pts, "lines": dls })));
    } else {
        for (i, p) in idx.iter().zip(&points) {
            println!("point {i}: ({}, {})", p.u, p.v);
        }
        for (i, l) in idx.iter().zip(&lines) {
            println!("line {i}: v = {}*u + {}", l.slope, l.intercept);
        }
    }
    Ok(())
}

fn extract(a: &ExtractArgs) -> Outcome {
    let loaded = load(&a.input)?;
    let strategy: Strategy = a.strategy.parse().map_err(usage)?;
    let seed = require_seed(a.seed, a.input.json)?;
    let (sub, kept) = dedupe_slopes(&loaded.arr);
    if sub.len() < 3 {
        return Err(usage("fewer than 3 directions after removing parallel lines"));
    }
    let cen = census_with(&sub, ExecMode::default()).map_err(usage)?;
    let sys = ColoredTripleSystem::from_census(&cen);
    let ex = extract_rainbow(&sys, strategy, seed, a.trials).map_err(usage)?;
    let ok = is_rainbow(&sys, &ex.vertices);
    let lines: Vec<usize> = ex.vertices.iter().map(|&v| kept[v]).collect();
    let mut areas: Vec<Scalar> = Vec::new();
    for (x, &i) in ex.vertices.iter().enumerate() {
        for (y, &j) in ex.vertices.iter().enumerate().skip(x + 1) {
            for &k in &ex.vertices[y + 1..] {
                if let Some(c) = sys.color([i, j, k]) {
                    areas.push(c.clone());
                }
            }
        }
    }
    areas.sort();
    if a.input.json {
        let results = json!({
            "strategy": ex.strategy,
            "trials": ex.seeds.len(),
            "best_seed": ex.best_seed,
            "lines": lines,
            "size": lines.len(),
            "areas": areas.iter().map(Scalar::to_string).collect::<Vec<_>>(),
            "all_distinct": ok,
        });
        emit(&report(Some(&loaded), Some(seed), ok, results));
    } else {
        println!("lines ({}): {:?}", lines.len(), lines);
        for area in &areas {
            println!("  {area}");
        }
    }
    if ok {
        Ok(())
    } else {
        Err(Failure::Check("subset has repeated areas".into()))
    }
}

fn table1(json_out: bool) -> Outcome {
    let mode = ExecMode::default();
    let mut rows = Vec::new();
    let mut ok = true;
    for n in 3..=12 {
        let hex = count_facial(&hexgrid(n).map_err(usage)?, mode);
        let tri = count_facial(&trigrid(n).map_err(usage)?, mode);
        let hex_formula = hexgrid_formula(n);
        let tri_formula = trigrid_formula(n);
        let flagged = n == 4;
        ok &= hex == hex_formula && (flagged || tri as i64 == tri_formula);
        rows.push((n, hex, hex_formula, tri, tri_formula, flagged));
    }
    if json_out {
        let results: Vec<Value> = rows
            .iter()
            .map(|&(n, hex, hf, tri, tf, flagged)| {
                json!({
                    "n": n,
                    "hexagonal": hex,
                    "hexagonal_formula": hf,
                    "triangular": tri,
                    "triangular_formula": tf,
                    "flagged": flagged,
                })
            })
            .collect();
        emit(&report(None, None, ok, json!({ "rows": results })));
    } else {
        let fmt_row = |label: &str, f: &dyn Fn(&(usize, usize, usize, usize, i64, bool)) -> String| {
            let cells: Vec<String> = rows.iter().map(|r| format!("{:>4}", f(r))).collect();
            println!("{label:<12}{}", cells.join(""));
        };
        fmt_row("n", &|r| r.0.to_string());
        fmt_row("hexagonal", &|r| r.1.to_string());
        fmt_row("triangular", &|r| if r.5 { format!("{}*", r.4) } else { r.4.to_string() });
        println!("* n=4: the triangular formula gives 0; the 4-line grid itself has 1 facial triangle.");
    }
    if ok {
        Ok(())
    } else {
        Err(Failure::Check("table mismatch".into()))
    }
}

fn run(cli: Cli) -> Outcome {
    match &cli.command {
        Command::Generate(a) => generate(a),
        Command::Census(a) => census_cmd(a),
        Command::Verify(Verify::Bounds(i)) => verify_bounds(i),
        Command::Verify(Verify::Duality { input, line }) => verify_duality(input, *line),
        Command::Verify(Verify::GeneralPosition {
            input,
            exhaustive_cap,
            samples,
            seed,
        }) => verify_general_position(input, *exhaustive_cap, *samples, *seed),
        Command::Dualize(a) => dualize(a),
        Command::ExtractDistinct(a) => extract(a),
        Command::Reproduce(Reproduce::Table1 { json }) => table1(*json),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            let msg = match &f {
                Failure::Usage(m) | Failure::Check(m) | Failure::Undecided(m) => m,
            };
            eprintln!("error: {msg}");
            ExitCode::from(f.code())
        }
    }
}
