use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::Args;
use cogsec_core::binning::{self, SimConfig};
use cogsec_core::bounds::{check_condition, search_region, AuxCards, BoundKind, BoundSpec, Condition};
use cogsec_core::gaussian::{self, cor3_point, thm3_point, thm7_point, SweepMode};
use cogsec_core::region::{to_csv, RatePoint};
use cogsec_core::verify::{run_criterion, CRITERIA};
use cogsec_core::{DiscreteCrc, GaussianCrc};
use serde::{Deserialize, Serialize};

use crate::config::{ensure_dir, fmt9, merge, required, RunManifest};
use crate::error::CliError;

const DEFAULT_OUT: &str = "cogsec-out";

fn out_dir(out: Option<PathBuf>) -> Result<PathBuf, CliError> {
    let dir = out.unwrap_or_else(|| PathBuf::from(DEFAULT_OUT));
    ensure_dir(&dir)?;
    Ok(dir)
}

fn load_channel(path: &Path) -> Result<DiscreteCrc, CliError> {
    cogsec_core::load_channel(path).map_err(|e| match e {
        cogsec_core::Error::Io(io) => CliError::Config(format!("cannot read channel {}: {io}", path.display())),
        other => other.into(),
    })
}

fn write(path: PathBuf, text: &str, outputs: &mut Vec<PathBuf>) -> Result<(), CliError> {
    fs::write(&path, text)?;
    outputs.push(path);
    Ok(())
}

fn finish(mut manifest: RunManifest, out: &Path, outputs: Vec<PathBuf>) -> Result<(), CliError> {
    manifest.outputs = outputs;
    let path = manifest.write(out)?;
    println!("manifest: {}", path.display());
    Ok(())
}

fn parse_mode(s: &str) -> Result<String, String> {
    match s {
        "thm3" | "thm7" | "cor3" => Ok(s.to_string()),
        _ => Err(format!("unknown mode `{s}`; expected thm3, thm7 or cor3")),
    }
}

fn parse_bound(s: &str) -> Result<String, String> {
    BoundKind::parse(s).map(|_| s.to_string()).ok_or_else(|| {
        let names: Vec<&str> = BoundKind::ALL.iter().map(|k| k.name()).collect();
        format!("unknown bound `{s}`; expected one of {}", names.join(", "))
    })
}

fn parse_condition(s: &str) -> Result<String, String> {
    Condition::parse(s)
        .map(|_| s.to_string())
        .ok_or_else(|| format!("unknown condition `{s}`; expected less-noisy or semi-det"))
}

/// Sweep a closed-form Gaussian region over the power split.
#[derive(Args, Debug, Serialize, Deserialize)]
pub struct GaussArgs {
    /// JSON file (or manifest) supplying any of these flags
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// thm3, thm7 or cor3
    #[arg(long, value_parser = parse_mode)]
    pub mode: Option<String>,
    #[arg(long, allow_negative_numbers = true)]
    pub a: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub b: Option<f64>,
    #[arg(long)]
    pub p1: Option<f64>,
    #[arg(long)]
    pub p2: Option<f64>,
    /// Grid intervals on the power split (default 400)
    #[arg(long)]
    pub steps: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Serialize)]
struct GaussRun {
    mode: SweepMode,
    a: f64,
    b: f64,
    p1: f64,
    p2: f64,
    steps: usize,
    out: PathBuf,
}

fn alpha_rows(g: &GaussianCrc, mode: SweepMode, steps: usize) -> Result<String, CliError> {
    let dims = mode.dims();
    let mut text = String::from("alpha");
    for name in dims.names() {
        text.push(',');
        text.push_str(name);
    }
    text.push('\n');
    for i in 0..=steps {
        let alpha = i as f64 / steps as f64;
        let p: RatePoint = match mode {
            SweepMode::Thm3 => thm3_point(g, alpha)?.to_rate_point(),
            SweepMode::Thm7 => thm7_point(g, alpha)?.to_rate_point(),
            SweepMode::Cor3 => {
                let (r1, r2) = cor3_point(g, alpha)?;
                RatePoint::new(r1, r2, 0.0, 0.0)
            }
        };
        let c = p.coords();
        text.push_str(&fmt9(alpha));
        for k in dims.active() {
            text.push(',');
            text.push_str(&fmt9(c[k]));
        }
        text.push('\n');
    }
    Ok(text)
}

pub fn gauss(args: GaussArgs) -> Result<ExitCode, CliError> {
    let a: GaussArgs = merge(&args, args.config.as_deref(), "gauss")?;
    let mode: SweepMode = serde_json::from_value(serde_json::Value::String(required(a.mode, "mode")?))
        .map_err(|e| CliError::Config(e.to_string()))?;
    let run = GaussRun {
        mode,
        a: required(a.a, "a")?,
        b: required(a.b, "b")?,
        p1: required(a.p1, "p1")?,
        p2: required(a.p2, "p2")?,
        steps: a.steps.unwrap_or(gaussian::FIGURE2_STEPS),
        out: out_dir(a.out)?,
    };
    let g = GaussianCrc::new(run.a, run.b, run.p1, run.p2)?;
    let rows = alpha_rows(&g, mode, run.steps)?;
    let region = gaussian::sweep_region(&g, mode, run.steps)?;
    let tag = serde_json::to_value(mode)?.as_str().unwrap_or("mode").to_string();
    let mut outputs = Vec::new();
    write(run.out.join(format!("gauss_{tag}_alpha.csv")), &rows, &mut outputs)?;
    write(run.out.join(format!("gauss_{tag}_frontier.csv")), &to_csv(&region), &mut outputs)?;
    println!("{} alpha rows, {} frontier points", run.steps + 1, region.len());
    for (k, name) in mode.dims().active().zip(mode.dims().names()) {
        println!("max {name} = {}", fmt9(region.max_coord(k)));
    }
    finish(RunManifest::new("gauss", &run, None)?, &run.out, outputs)?;
    Ok(ExitCode::SUCCESS)
}

/// Write the four curves of the Gaussian example figure.
#[derive(Args, Debug, Serialize, Deserialize)]
pub struct Figure2Args {
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub steps: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Serialize)]
struct Figure2Run {
    steps: usize,
    b: [f64; 4],
    a: f64,
    p1: f64,
    p2: f64,
    out: PathBuf,
}

pub fn figure2(args: Figure2Args) -> Result<ExitCode, CliError> {
    let a: Figure2Args = merge(&args, args.config.as_deref(), "figure2")?;
    let run = Figure2Run {
        steps: a.steps.unwrap_or(gaussian::FIGURE2_STEPS),
        b: gaussian::FIGURE2_B,
        a: 1.0,
        p1: 20.0,
        p2: 20.0,
        out: out_dir(a.out)?,
    };
    let data = gaussian::figure2_with_steps(run.steps)?;
    let outputs = gaussian::write_figure2(&data, &run.out)?;
    for (b, region) in &data {
        println!(
            "b = {b}: max R2 = {}, max Re1 = {}",
            fmt9(region.max_coord(1)),
            fmt9(region.max_coord(2))
        );
    }
    finish(RunManifest::new("figure2", &run, None)?, &run.out, outputs)?;
    Ok(ExitCode::SUCCESS)
}

/// Search a discrete region over auxiliary distributions.
#[derive(Args, Debug, Serialize, Deserialize)]
pub struct DiscreteArgs {
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// inner, outer, less-noisy, semi-det or semi-det-no-re2
    #[arg(long, value_parser = parse_bound)]
    pub bound: Option<String>,
    /// Channel JSON file
    #[arg(long)]
    pub channel: Option<PathBuf>,
    /// Auxiliary cardinalities as `q,w,v,u`
    #[arg(long)]
    pub cards: Option<String>,
    /// Random candidates on top of the structured ones (default 2000)
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Drop the equivocation caps and search only (R1, R2)
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub rates_only: Option<bool>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Serialize)]
struct DiscreteRun {
    bound: BoundKind,
    channel: PathBuf,
    cards: String,
    samples: usize,
    seed: u64,
    rates_only: bool,
    out: PathBuf,
}

fn parse_cards(s: &str) -> Result<AuxCards, CliError> {
    let parts: Vec<usize> = s
        .split(',')
        .map(|p| p.trim().parse::<usize>())
        .collect::<Result<_, _>>()
        .map_err(|_| CliError::Config(format!("--cards `{s}` must be four integers `q,w,v,u`")))?;
    match parts.as_slice() {
        &[q, w, v, u] => Ok(AuxCards { q, w, v, u }),
        _ => Err(CliError::Config(format!("--cards `{s}` must have four entries"))),
    }
}

pub fn discrete(args: DiscreteArgs) -> Result<ExitCode, CliError> {
    let a: DiscreteArgs = merge(&args, args.config.as_deref(), "discrete")?;
    let name = required(a.bound, "bound")?;
    let bound = BoundKind::parse(&name).ok_or_else(|| CliError::Config(parse_bound(&name).unwrap_err()))?;
    let channel = required(a.channel, "channel")?;
    let ch = load_channel(&channel)?;
    let cards = match &a.cards {
        Some(s) => parse_cards(s)?,
        None => AuxCards::default_for(&ch),
    };
    let run = DiscreteRun {
        bound,
        channel,
        cards: format!("{},{},{},{}", cards.q, cards.w, cards.v, cards.u),
        samples: a.samples.unwrap_or(2000),
        seed: a.seed.unwrap_or(0),
        rates_only: a.rates_only.unwrap_or(false),
        out: out_dir(a.out)?,
    };
    let spec = if run.rates_only {
        BoundSpec::rates_only(bound)
    } else {
        BoundSpec::new(bound)
    };
    let outcome = search_region(&ch, spec, cards, run.samples, run.seed)?;
    let mut outputs = Vec::new();
    let stem = bound.name();
    write(run.out.join(format!("{stem}_frontier.csv")), &to_csv(&outcome.region), &mut outputs)?;
    let aux_dir = run.out.join(format!("{stem}_aux"));
    ensure_dir(&aux_dir)?;
    for (row, candidate, aux) in outcome.witnesses()? {
        let p = &outcome.region.frontier[row];
        let doc = serde_json::json!({
            "row": row,
            "candidate": candidate,
            "point": p.coords(),
            "aux": aux,
        });
        write(
            aux_dir.join(format!("point_{row:04}.json")),
            &(serde_json::to_string_pretty(&doc)? + "\n"),
            &mut outputs,
        )?;
    }
    write(
        run.out.join(format!("{stem}_witnesses.json")),
        &(serde_json::to_string_pretty(&outcome.witness_json()?)? + "\n"),
        &mut outputs,
    )?;
    println!(
        "{} candidates ({} structured), {} frontier points",
        outcome.evaluated,
        outcome.structured,
        outcome.region.len()
    );
    for (k, n) in spec.dims().active().zip(spec.dims().names()) {
        println!("max {n} = {}", fmt9(outcome.region.max_coord(k)));
    }
    finish(RunManifest::new("discrete", &run, Some(run.seed))?, &run.out, outputs)?;
    Ok(ExitCode::SUCCESS)
}

/// Look for a distribution violating a structural channel condition.
#[derive(Args, Debug, Serialize, Deserialize)]
pub struct CheckArgs {
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub channel: Option<PathBuf>,
    /// less-noisy or semi-det
    #[arg(long, value_parser = parse_condition)]
    pub condition: Option<String>,
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Cardinality of W (default |X1||X2|)
    #[arg(long)]
    pub w_card: Option<usize>,
    /// Cardinality of V for the less-noisy condition (default |X1||X2|)
    #[arg(long)]
    pub v_card: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Serialize)]
struct CheckRun {
    channel: PathBuf,
    condition: Condition,
    samples: usize,
    seed: u64,
    w_card: Option<usize>,
    v_card: Option<usize>,
    out: PathBuf,
}

pub fn check(args: CheckArgs) -> Result<ExitCode, CliError> {
    let a: CheckArgs = merge(&args, args.config.as_deref(), "check")?;
    let name = required(a.condition, "condition")?;
    let condition = Condition::parse(&name).ok_or_else(|| CliError::Config(parse_condition(&name).unwrap_err()))?;
    let channel = required(a.channel, "channel")?;
    let ch = load_channel(&channel)?;
    let run = CheckRun {
        channel,
        condition,
        samples: a.samples.unwrap_or(2000),
        seed: a.seed.unwrap_or(0),
        w_card: a.w_card,
        v_card: a.v_card,
        out: out_dir(a.out)?,
    };
    let report = check_condition(&ch, condition, run.samples, run.seed, run.w_card, run.v_card)?;
    let text = serde_json::to_string_pretty(&report)? + "\n";
    let mut outputs = Vec::new();
    write(run.out.join("check_report.json"), &text, &mut outputs)?;
    print!("{text}");
    println!(
        "{}: max gap {} ({})",
        condition.name(),
        fmt9(report.max_gap),
        if report.violated { "violated" } else { "no violation found" }
    );
    finish(RunManifest::new("check", &run, Some(run.seed))?, &run.out, outputs)?;
    Ok(if report.violated {
        ExitCode::from(3)
    } else {
        ExitCode::SUCCESS
    })
}

/// Run the binning-scheme simulator from a JSON config.
#[derive(Args, Debug, Serialize, Deserialize)]
pub struct SimulateArgs {
    /// Simulation config (channel path, aux, n, rates, eps, trials, seed)
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// Channel JSON, overriding the config's (relative to the working directory)
    #[arg(long)]
    #[serde(skip)]
    pub channel: Option<PathBuf>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub r1: Option<f64>,
    #[arg(long)]
    pub r21: Option<f64>,
    #[arg(long)]
    pub r22: Option<f64>,
    #[arg(long)]
    pub eps: Option<f64>,
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub exact_budget: Option<u64>,
    /// one-codebook or per-trial
    #[arg(long)]
    pub schedule: Option<String>,
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

pub fn simulate(args: SimulateArgs) -> Result<ExitCode, CliError> {
    let path = required(args.config.clone(), "config")?;
    let mut cfg: SimConfig = merge(&args, Some(&path), "simulate")?;
    cfg.channel = match &args.channel {
        Some(c) => c.clone(),
        None => cfg.channel_path(path.parent().unwrap_or(Path::new("."))),
    };
    cfg.channel = match std::fs::canonicalize(&cfg.channel) {
        Ok(abs) => abs,
        Err(_) => cfg.channel.clone(),
    };
    if cfg.n == 0 || cfg.trials == 0 {
        return Err(CliError::Config("n and trials must be positive".into()));
    }
    let out = out_dir(args.out)?;
    let ch = load_channel(&cfg.channel)?;
    let report = binning::simulate_with_channel(&ch, &cfg)?;
    let mut outputs = Vec::new();
    write(
        out.join("sim_report.json"),
        &(serde_json::to_string_pretty(&report)? + "\n"),
        &mut outputs,
    )?;
    let c = report.counts;
    println!(
        "counts: M1 {} x L1 {}, M21 {} x L21 {}, M22 {}",
        c.m1, c.l1, c.m21, c.l21, c.m22
    );
    for (name, e) in [
        ("encoding failure", report.encoding_failure_rate),
        ("cognitive decode error", report.decode1_error_rate),
        ("primary decode error", report.decode2_error_rate),
    ] {
        println!(
            "{name}: {} [{}, {}]",
            fmt9(e.rate),
            fmt9(e.ci_low),
            fmt9(e.ci_high)
        );
    }
    let n = report.n as f64;
    for (name, h, bin) in [
        ("M1 at Y2", report.exact_equivocation_m1_at_y2, report.rates.l1),
        ("M2 at Y1", report.exact_equivocation_m2_at_y1, report.rates.l21),
    ] {
        match h {
            Some(h) => println!("equivocation {name}: {} bits/symbol (bin rate {})", fmt9(h / n), fmt9(bin)),
            None => println!("equivocation {name}: over budget"),
        }
    }
    finish(RunManifest::new("simulate", &cfg, Some(cfg.seed))?, &out, outputs)?;
    Ok(ExitCode::SUCCESS)
}

/// Run acceptance criteria.
#[derive(Args, Debug, Serialize, Deserialize)]
pub struct VerifyArgs {
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// all, gaussian, information, discrete, binning, geometry, or a criterion number
    #[arg(long)]
    pub suite: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn suite_ids(suite: &str) -> Result<Vec<u8>, CliError> {
    Ok(match suite {
        "all" => (1..=CRITERIA).collect(),
        "gaussian" => vec![1, 2, 3],
        "information" => vec![4],
        "discrete" => vec![5, 6, 7, 10],
        "binning" => vec![8],
        "geometry" => vec![9],
        other => match other.parse::<u8>() {
            Ok(id) if (1..=CRITERIA).contains(&id) => vec![id],
            _ => {
                return Err(CliError::Config(format!(
                    "unknown suite `{other}`; expected all, gaussian, information, discrete, binning, geometry or 1..={CRITERIA}"
                )))
            }
        },
    })
}

#[derive(Serialize)]
struct VerifyRun {
    suite: String,
    out: PathBuf,
}

pub fn verify(args: VerifyArgs) -> Result<ExitCode, CliError> {
    let a: VerifyArgs = merge(&args, args.config.as_deref(), "verify")?;
    let run = VerifyRun {
        suite: a.suite.unwrap_or_else(|| "all".into()),
        out: out_dir(a.out)?,
    };
    let ids = suite_ids(&run.suite)?;
    let mut criteria = Vec::new();
    let mut all_passed = true;
    for id in 1..=CRITERIA {
        if ids.contains(&id) {
            let result = run_criterion(id)?;
            println!("{}", result.line());
            all_passed &= result.passed;
            criteria.push(serde_json::json!({ "id": id, "run": true, "passed": result.passed, "result": result }));
        } else {
            criteria.push(serde_json::json!({ "id": id, "run": false, "passed": null }));
        }
    }
    let summary = serde_json::json!({ "suite": run.suite, "passed": all_passed, "criteria": criteria });
    let mut outputs = Vec::new();
    write(
        run.out.join("verify_summary.json"),
        &(serde_json::to_string_pretty(&summary)? + "\n"),
        &mut outputs,
    )?;
    finish(RunManifest::new("verify", &run, None)?, &run.out, outputs)?;
    Ok(if all_passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(3)
    })
}
