//! polyloc: command-line driver for polygon-network nonlocality scans.
//!
//! Input is a JSON job spec:
//! `{ "n": 3, "sources": [...], "povms": [...], "signs": {...}, "t": 1 }`.
//! Numeric fields may be written as `"$name"` placeholders, bound on the
//! command line (`--set name=value`) or swept over a grid. Results are
//! printed as a JSON summary on stdout and, for sweeps, a CSV file.
//! Exit code 0 = ok; 2 = a violation was found where none is allowed
//! (LHV test failure, or an unflagged discrepancy).

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use polyloc_core::detect::{compare_linear, entanglement_detect};
use polyloc_core::lhv::sample_model;
use polyloc_core::network::{joint_distribution, NetworkSpec, ProbabilityTable};
use polyloc_core::povm::PovmSpec;
use polyloc_core::report::{discrepancy_report, known_discrepancy_ids};
use polyloc_core::scan::{find_threshold, maximize, sweep_grid, Axis};
use polyloc_core::signs::{
    depolarization_triple, evaluate_ngon, named_sign_function, search_signs_triangle,
    square_quadruple, standard_triple_a, standard_triple_b, SignFunction, SQUARE_T, TRIANGLE_T,
};
use polyloc_core::states::StateSpec;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "polyloc", version, about = "Polygon-network nonlocality toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct SpecArgs {
    /// Path to the JSON job spec
    #[arg(long)]
    spec: PathBuf,
    /// Bind a placeholder parameter, e.g. --set a1=0.9 (repeatable)
    #[arg(long = "set", value_parser = parse_binding)]
    bindings: Vec<(String, f64)>,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the witness once for a fully bound job spec
    Evaluate(SpecArgs),
    /// Sweep placeholder parameters over a rectangular grid, writing CSV
    Sweep {
        #[command(flatten)]
        spec: SpecArgs,
        /// Axis, e.g. --axis a2:0:1:101 (repeatable; row-major order)
        #[arg(long = "axis", value_parser = parse_axis, required = true)]
        axes: Vec<Axis>,
        /// Output CSV path
        #[arg(long)]
        out: PathBuf,
        /// Emit a gnuplot-friendly layout (blank line between first-axis blocks)
        #[arg(long)]
        gnuplot: bool,
    },
    /// Bisect one placeholder for s_value crossing a target
    Threshold {
        #[command(flatten)]
        spec: SpecArgs,
        /// Placeholder name to bisect over
        #[arg(long)]
        param: String,
        #[arg(long)]
        lo: f64,
        #[arg(long)]
        hi: f64,
        #[arg(long, default_value_t = 1.0)]
        target: f64,
    },
    /// Maximize s_value over placeholder boxes (grid + simplex refinement)
    Maximize {
        #[command(flatten)]
        spec: SpecArgs,
        /// Box per placeholder, e.g. --param a2:0:1 (repeatable)
        #[arg(long = "param", value_parser = parse_box, required = true)]
        params: Vec<(String, f64, f64)>,
    },
    /// Sample random n-local hidden-variable models; any witness violation is a failure
    LhvTest {
        #[arg(long, default_value_t = 3)]
        n: usize,
        #[arg(long, default_value_t = 10_000)]
        models: usize,
        #[arg(long, default_value_t = 4)]
        cardinality: usize,
        /// Random sign tuples evaluated per model
        #[arg(long, default_value_t = 20)]
        triples: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Write the first failing model here, if any
        #[arg(long)]
        dump_failure: Option<PathBuf>,
    },
    /// Pure-source entanglement detection via the witness
    EntanglementDetect(SpecArgs),
    /// Triangle witness vs linear-chain singular-value criterion
    CompareLinear(SpecArgs),
    /// Compare the pipeline against transcribed closed forms
    DiscrepancyReport {
        /// CSV output path
        #[arg(long)]
        out: Option<PathBuf>,
        /// Known-discrepancy ledger checked for unmatched families
        #[arg(long, default_value = "KNOWN_DISCREPANCIES.md")]
        known: PathBuf,
    },
    /// Exhaustive search over sign-function triples (n = 3)
    SearchSigns(SpecArgs),
}

fn parse_binding(text: &str) -> Result<(String, f64), String> {
    let (name, value) = text.split_once('=').ok_or("expected name=value")?;
    Ok((name.to_string(), value.parse().map_err(|e| format!("{e}"))?))
}

fn parse_axis(text: &str) -> Result<Axis, String> {
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() != 4 {
        return Err("expected name:start:stop:steps".into());
    }
    Ok(Axis {
        name: parts[0].to_string(),
        start: parts[1].parse().map_err(|e| format!("{e}"))?,
        stop: parts[2].parse().map_err(|e| format!("{e}"))?,
        steps: parts[3].parse().map_err(|e| format!("{e}"))?,
    })
}

fn parse_box(text: &str) -> Result<(String, f64, f64), String> {
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() != 3 {
        return Err("expected name:lo:hi".into());
    }
    Ok((
        parts[0].to_string(),
        parts[1].parse().map_err(|e| format!("{e}"))?,
        parts[2].parse().map_err(|e| format!("{e}"))?,
    ))
}

/// Sign block of the job spec: named per-party functions, explicit 8-char
/// +/- tables (f, g, h, [k]), or a preset tuple.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SignsSpec {
    #[serde(default)]
    names: Option<Vec<String>>,
    #[serde(default)]
    f: Option<String>,
    #[serde(default)]
    g: Option<String>,
    #[serde(default)]
    h: Option<String>,
    #[serde(default)]
    k: Option<String>,
    #[serde(default)]
    preset: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct JobSpec {
    n: usize,
    sources: Vec<StateSpec>,
    povms: Vec<PovmSpec>,
    signs: SignsSpec,
    #[serde(default)]
    t: Option<usize>,
    /// Default placeholder values; CLI bindings and axes override these.
    #[serde(default)]
    params: BTreeMap<String, f64>,
}

impl JobSpec {
    fn sign_functions(&self) -> Result<Vec<SignFunction>> {
        let s = &self.signs;
        if let Some(preset) = &s.preset {
            return Ok(match preset.as_str() {
                "standard-a" => standard_triple_a().to_vec(),
                "standard-b" => standard_triple_b().to_vec(),
                "depolarization" => depolarization_triple().to_vec(),
                "square" => square_quadruple().to_vec(),
                other => bail!("unknown sign preset: {other}"),
            });
        }
        if let Some(names) = &s.names {
            return names
                .iter()
                .map(|n| named_sign_function(n).map_err(Into::into))
                .collect();
        }
        let tables: Vec<&String> =
            [&s.f, &s.g, &s.h, &s.k].into_iter().flatten().collect();
        if tables.is_empty() {
            bail!("signs block needs one of: preset, names, or f/g/h tables");
        }
        tables
            .into_iter()
            .map(|t| SignFunction::parse(t).map_err(Into::into))
            .collect()
    }

    fn t(&self) -> usize {
        self.t.unwrap_or(if self.signs.preset.as_deref() == Some("square") {
            SQUARE_T
        } else {
            TRIANGLE_T
        })
    }
}

/// Replace `"$name"` placeholder strings in a JSON tree with bound numbers.
fn substitute(value: &mut serde_json::Value, bindings: &BTreeMap<String, f64>) -> Result<()> {
    match value {
        serde_json::Value::String(s) if s.starts_with('$') => {
            let name = &s[1..];
            let v = bindings
                .get(name)
                .ok_or_else(|| anyhow!("unbound placeholder ${name}"))?;
            *value = serde_json::Value::Number(
                serde_json::Number::from_f64(*v).ok_or_else(|| anyhow!("non-finite value for ${name}"))?,
            );
        }
        serde_json::Value::Array(items) => {
            for item in items {
                substitute(item, bindings)?;
            }
        }
        serde_json::Value::Object(map) => {
            for (_, item) in map.iter_mut() {
                substitute(item, bindings)?;
            }
        }
        _ => {}
    }
    Ok(())
}

/// Load the raw spec and its default parameter block (before substitution).
fn load_raw(path: &Path) -> Result<(serde_json::Value, BTreeMap<String, f64>)> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading spec {}", path.display()))?;
    let raw: serde_json::Value = serde_json::from_str(&text).context("parsing spec JSON")?;
    let mut params = BTreeMap::new();
    if let Some(map) = raw.get("params").and_then(|p| p.as_object()) {
        for (k, v) in map {
            if let Some(x) = v.as_f64() {
                params.insert(k.clone(), x);
            }
        }
    }
    Ok((raw, params))
}

fn bind_spec(raw: &serde_json::Value, bindings: &BTreeMap<String, f64>) -> Result<JobSpec> {
    let mut tree = raw.clone();
    substitute(&mut tree, bindings)?;
    let job: JobSpec = serde_json::from_value(tree).context("interpreting spec")?;
    if job.sources.len() != job.n || job.povms.len() != job.n {
        bail!("spec needs {} sources and povms", job.n);
    }
    Ok(job)
}

fn merged_bindings(defaults: &BTreeMap<String, f64>, cli: &[(String, f64)]) -> BTreeMap<String, f64> {
    let mut b = defaults.clone();
    for (k, v) in cli {
        b.insert(k.clone(), *v);
    }
    b
}

fn distribution(job: &JobSpec) -> Result<ProbabilityTable> {
    let net = NetworkSpec { n: job.n, sources: job.sources.clone(), povms: job.povms.clone() };
    Ok(joint_distribution(&net)?)
}

fn evaluate_job(job: &JobSpec) -> Result<(f64, f64, f64, bool)> {
    let p = distribution(job)?;
    let fs = job.sign_functions()?;
    let r = evaluate_ngon(&p, &fs, job.t())?;
    Ok((r.i1, r.i2, r.s_value, r.violated))
}

fn evaluate_at(
    raw: &serde_json::Value,
    base: &BTreeMap<String, f64>,
    names: &[String],
    coords: &[f64],
) -> Result<(f64, f64, f64, bool)> {
    let mut b = base.clone();
    for (n, &v) in names.iter().zip(coords) {
        b.insert(n.clone(), v);
    }
    evaluate_job(&bind_spec(raw, &b)?)
}

fn print_json<T: Serialize>(value: &T) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(value)?);
    Ok(())
}

fn fmt_f(v: f64) -> String {
    format!("{v:.12e}")
}

fn cmd_evaluate(args: &SpecArgs) -> Result<ExitCode> {
    let (raw, defaults) = load_raw(&args.spec)?;
    let job = bind_spec(&raw, &merged_bindings(&defaults, &args.bindings))?;
    let (i1, i2, s_value, violated) = evaluate_job(&job)?;
    print_json(&serde_json::json!({
        "i1": i1, "i2": i2, "s_value": s_value, "violated": violated,
    }))?;
    Ok(ExitCode::SUCCESS)
}

#[allow(clippy::too_many_arguments)]
fn cmd_sweep(args: &SpecArgs, axes: &[Axis], out: &Path, gnuplot: bool) -> Result<ExitCode> {
    let (raw, defaults) = load_raw(&args.spec)?;
    let base = merged_bindings(&defaults, &args.bindings);
    let names: Vec<String> = axes.iter().map(|a| a.name.clone()).collect();
    let points = sweep_grid(axes, |coords| {
        evaluate_at(&raw, &base, &names, coords).map_err(|e| polyloc_core::Error::Other(e.to_string()))
    })?;
    let file = std::fs::File::create(out)
        .with_context(|| format!("creating {}", out.display()))?;
    let mut w = csv::Writer::from_writer(file);
    let mut header: Vec<String> = names.clone();
    header.extend(["i1", "i2", "s_value", "violated"].map(String::from));
    w.write_record(&header)?;
    let block = if axes.len() >= 2 {
        axes[1..].iter().map(|a| a.values().len()).product::<usize>()
    } else {
        points.len()
    };
    let mut violations = 0usize;
    for (idx, pt) in points.iter().enumerate() {
        if gnuplot && idx > 0 && idx % block == 0 {
            w.flush()?;
            // blank separator line for gnuplot "index"-style consumption
            writeln!(w.get_ref())?;
        }
        let mut rec: Vec<String> = pt.coords.iter().map(|&v| fmt_f(v)).collect();
        rec.push(fmt_f(pt.i1));
        rec.push(fmt_f(pt.i2));
        rec.push(fmt_f(pt.s_value));
        rec.push(pt.violated.to_string());
        w.write_record(&rec)?;
        if pt.violated {
            violations += 1;
        }
    }
    w.flush()?;
    print_json(&serde_json::json!({
        "points": points.len(),
        "violations": violations,
        "csv": out.display().to_string(),
    }))?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_threshold(args: &SpecArgs, param: &str, lo: f64, hi: f64, target: f64) -> Result<ExitCode> {
    let (raw, defaults) = load_raw(&args.spec)?;
    let base = merged_bindings(&defaults, &args.bindings);
    let names = vec![param.to_string()];
    let x = find_threshold(lo, hi, target, |v| {
        evaluate_at(&raw, &base, &names, &[v])
            .map(|(_, _, s, _)| s)
            .map_err(|e| polyloc_core::Error::Other(e.to_string()))
    })?;
    print_json(&serde_json::json!({ "param": param, "threshold": x, "target": target }))?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_maximize(args: &SpecArgs, params: &[(String, f64, f64)]) -> Result<ExitCode> {
    let (raw, defaults) = load_raw(&args.spec)?;
    let base = merged_bindings(&defaults, &args.bindings);
    let names: Vec<String> = params.iter().map(|(n, _, _)| n.clone()).collect();
    let bounds: Vec<(f64, f64)> = params.iter().map(|&(_, lo, hi)| (lo, hi)).collect();
    let r = maximize(&bounds, |coords| {
        evaluate_at(&raw, &base, &names, coords)
            .map(|(_, _, s, _)| s)
            .map_err(|e| polyloc_core::Error::Other(e.to_string()))
    })?;
    let argmax: BTreeMap<&str, f64> = names
        .iter()
        .map(String::as_str)
        .zip(r.coords.iter().copied())
        .collect();
    print_json(&serde_json::json!({
        "max_s_value": r.value,
        "argmax": argmax,
        "evaluations": r.evaluations,
    }))?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_lhv_test(
    n: usize,
    models: usize,
    cardinality: usize,
    triples: usize,
    seed: u64,
    dump_failure: Option<&Path>,
) -> Result<ExitCode> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let tables: Vec<SignFunction> = SignFunction::all().collect();
    let mut worst = 0.0f64;
    let mut failures = 0usize;
    let mut first_failure: Option<serde_json::Value> = None;
    for _ in 0..models {
        let model = sample_model(&mut rng, n, cardinality)?;
        let p = model.distribution()?;
        for _ in 0..triples {
            let fs: Vec<SignFunction> =
                (0..n).map(|_| tables[rng.gen_range(0..tables.len())]).collect();
            let t = rng.gen_range(0..n);
            let r = evaluate_ngon(&p, &fs, t)?;
            worst = worst.max(r.s_value);
            if r.violated {
                failures += 1;
                if first_failure.is_none() {
                    first_failure = Some(serde_json::json!({
                        "s_value": r.s_value,
                        "t": t,
                        "signs": fs.iter().map(|f| f.to_string_signs()).collect::<Vec<_>>(),
                        "model": model,
                    }));
                }
            }
        }
    }
    if let (Some(path), Some(fail)) = (dump_failure, &first_failure) {
        std::fs::write(path, serde_json::to_string_pretty(fail)?)?;
    }
    print_json(&serde_json::json!({
        "n": n, "models": models, "triples_per_model": triples,
        "worst_s_value": worst, "failures": failures,
    }))?;
    Ok(if failures == 0 { ExitCode::SUCCESS } else { ExitCode::from(2) })
}

fn cmd_entanglement_detect(args: &SpecArgs) -> Result<ExitCode> {
    let (raw, defaults) = load_raw(&args.spec)?;
    let job = bind_spec(&raw, &merged_bindings(&defaults, &args.bindings))?;
    let states: Vec<_> = job
        .sources
        .iter()
        .map(polyloc_core::states::make_state)
        .collect::<polyloc_core::Result<_>>()?;
    let basis = polyloc_core::povm::make_povm(&job.povms[0])?;
    let verdict = entanglement_detect(&states, &basis)?;
    print_json(&serde_json::json!({ "verdict": verdict }))?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_compare_linear(args: &SpecArgs) -> Result<ExitCode> {
    let (raw, defaults) = load_raw(&args.spec)?;
    let job = bind_spec(&raw, &merged_bindings(&defaults, &args.bindings))?;
    if job.n != 3 {
        bail!("compare-linear expects n = 3");
    }
    let states: Vec<_> = job
        .sources
        .iter()
        .map(polyloc_core::states::make_state)
        .collect::<polyloc_core::Result<_>>()?;
    let povms: Vec<_> = job
        .povms
        .iter()
        .map(polyloc_core::povm::make_povm)
        .collect::<polyloc_core::Result<_>>()?;
    let fs = job.sign_functions()?;
    let rec = compare_linear(&states, &povms, &fs[0], &fs[1], &fs[2])?;
    print_json(&rec)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_discrepancy_report(out: Option<&Path>, known: &Path) -> Result<ExitCode> {
    let records = discrepancy_report()?;
    let known_text = std::fs::read_to_string(known).unwrap_or_default();
    let mut unflagged: Vec<&str> = Vec::new();
    for r in &records {
        if !r.matched && !known_text.contains(&r.id) {
            unflagged.push(&r.id);
        }
    }
    if let Some(path) = out {
        let file = std::fs::File::create(path)?;
        let mut w = csv::Writer::from_writer(file);
        w.write_record(["id", "scale", "direct_order", "sign1", "sign2", "max_gap", "matched"])?;
        for r in &records {
            w.write_record(&[
                r.id.clone(),
                fmt_f(r.scale),
                r.direct_order.to_string(),
                r.sign1.to_string(),
                r.sign2.to_string(),
                fmt_f(r.max_gap),
                r.matched.to_string(),
            ])?;
        }
        w.flush()?;
    }
    print_json(&serde_json::json!({
        "records": records,
        "known_file": known.display().to_string(),
        "unflagged_mismatches": unflagged,
        "expected_flags": known_discrepancy_ids(),
    }))?;
    Ok(if unflagged.is_empty() { ExitCode::SUCCESS } else { ExitCode::from(2) })
}

fn cmd_search_signs(args: &SpecArgs) -> Result<ExitCode> {
    let (raw, defaults) = load_raw(&args.spec)?;
    let job = bind_spec(&raw, &merged_bindings(&defaults, &args.bindings))?;
    if job.n != 3 {
        bail!("search-signs expects n = 3");
    }
    let p = distribution(&job)?;
    let found = search_signs_triangle(&p)?;
    print_json(&serde_json::json!({
        "signs": found.fs.iter().map(|f| f.to_string_signs()).collect::<Vec<_>>(),
        "i1": found.result.i1,
        "i2": found.result.i2,
        "s_value": found.result.s_value,
        "violated": found.result.violated,
    }))?;
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    polyloc_core::par::init_threads_from_env();
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Evaluate(args) => cmd_evaluate(args),
        Command::Sweep { spec, axes, out, gnuplot } => cmd_sweep(spec, axes, out, *gnuplot),
        Command::Threshold { spec, param, lo, hi, target } => {
            cmd_threshold(spec, param, *lo, *hi, *target)
        }
        Command::Maximize { spec, params } => cmd_maximize(spec, params),
        Command::LhvTest { n, models, cardinality, triples, seed, dump_failure } => {
            cmd_lhv_test(*n, *models, *cardinality, *triples, *seed, dump_failure.as_deref())
        }
        Command::EntanglementDetect(args) => cmd_entanglement_detect(args),
        Command::CompareLinear(args) => cmd_compare_linear(args),
        Command::DiscrepancyReport { out, known } => {
            cmd_discrepancy_report(out.as_deref(), known)
        }
        Command::SearchSigns(args) => cmd_search_signs(args),
    };
    match result {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}
