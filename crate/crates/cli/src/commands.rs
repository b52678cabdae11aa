use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write};
use std::path::Path;

use anyhow::Context;
use qbsc_core::protocol::{run_session, write_transcript, AliceStrategy, VerdictReason};
use qbsc_core::security::{alice_cheat_probability, brute_force_probability, honest_accept_probability};
use qbsc_core::sim::{
    binomial_std_error, simulate_brute_force_attack, simulate_cheating_alice, simulate_honest_verification,
    DetectorModel, Estimate, SimConfig,
};
use qbsc_core::{security_table, PriorKind, ProtocolParams, SecurityReport};
use serde::Serialize;

use crate::args::{
    Cli, Command, Format, Output, SessionArgs, StrategyName, SweepArgs, SweepParam, TableArgs, ValidateArgs,
};
use crate::render;

/// Smallest trial count `validate` accepts.
pub const MIN_VALIDATE_TRIALS: u64 = 10_000;

const SIGMAS: f64 = 3.0;

pub enum Status {
    Success,
    ValidationFailed,
    Rejected,
}

pub enum CliError {
    Usage(String),
    Runtime(anyhow::Error),
}

impl From<anyhow::Error> for CliError {
    fn from(err: anyhow::Error) -> Self {
        CliError::Runtime(err)
    }
}

impl From<io::Error> for CliError {
    fn from(err: io::Error) -> Self {
        CliError::Runtime(err.into())
    }
}

fn usage<T>(msg: impl Into<String>) -> Result<T, CliError> {
    Err(CliError::Usage(msg.into()))
}

fn params(m: usize, rs1: f64, mu: f64) -> Result<ProtocolParams, CliError> {
    ProtocolParams::uniform(m, rs1, mu).map_err(|e| CliError::Usage(e.to_string()))
}

pub fn run(cli: Cli) -> Result<Status, CliError> {
    match cli.command {
        Command::Table(args) => table(args),
        Command::Validate(args) => validate(args),
        Command::Session(args) => session(args),
        Command::Sweep(args) => sweep(args),
    }
}

fn emit(output: &Output, text: &str) -> Result<(), CliError> {
    match &output.out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display()))?,
        None => io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

#[derive(Serialize)]
struct TableJson<'a> {
    rs1: f64,
    mu: f64,
    prior: &'static str,
    rows: &'a [SecurityReport],
}

fn table(args: TableArgs) -> Result<Status, CliError> {
    let (lo, hi) = args.m.map_or((args.m_min, args.m_max), |m| (m, m));
    let (rs1, mu) = (args.physics.rs1, args.physics.mu);
    let rows = security_table(rs1, mu, lo..=hi, PriorKind::Uniform).map_err(|e| CliError::Usage(e.to_string()))?;
    let text = match args.output.format {
        Format::Table => render::security_text(&rows),
        Format::Csv => render::csv(rows.iter().map(render::SecurityCsvRow::from))?,
        Format::Json => render::json(&TableJson { rs1, mu, prior: "uniform", rows: &rows })?,
    };
    emit(&args.output, &text)?;
    Ok(Status::Success)
}

#[derive(Debug, Serialize)]
struct Check {
    metric: &'static str,
    closed_form: f64,
    monte_carlo: f64,
    std_error: f64,
    sigmas: f64,
    pass: bool,
}

impl Check {
    fn new(metric: &'static str, closed_form: f64, estimate: Estimate) -> Self {
        let std_error = binomial_std_error(closed_form, estimate.trials);
        let diff = estimate.rate() - closed_form;
        let sigmas = if std_error > 0.0 {
            diff / std_error
        } else if diff == 0.0 {
            0.0
        } else {
            f64::INFINITY
        };
        Self {
            metric,
            closed_form,
            monte_carlo: estimate.rate(),
            std_error,
            sigmas,
            pass: estimate.agrees_with(closed_form, SIGMAS),
        }
    }
}

#[derive(Serialize)]
struct ValidateJson<'a> {
    #[serde(rename = "M")]
    m: usize,
    rs1: f64,
    mu: f64,
    trials: u64,
    seed: u64,
    checks: &'a [Check],
}

fn validate(args: ValidateArgs) -> Result<Status, CliError> {
    if args.trials < MIN_VALIDATE_TRIALS {
        return usage(format!("--trials must be at least {MIN_VALIDATE_TRIALS}, got {}", args.trials));
    }
    let p = params(args.m, args.physics.rs1, args.physics.mu)?;
    if args.choice >= args.m {
        return usage(format!("--choice must be below M = {}", args.m));
    }
    let cfg = SimConfig::new(args.trials, args.seed).map_err(|e| CliError::Usage(e.to_string()))?;
    let honest = simulate_honest_verification(&p, args.choice, &DetectorModel::for_params(&p), &cfg)
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let checks = [
        Check::new("p_b", brute_force_probability(&p), simulate_brute_force_attack(&p, &cfg)),
        Check::new("p_a", alice_cheat_probability(&p), simulate_cheating_alice(&p, &cfg)),
        Check::new("honest_accept", honest_accept_probability(&p), honest.accepted),
    ];
    let text = match args.output.format {
        Format::Table => {
            let mut s = format!(
                "M={} rs1={} mu={} trials={} seed={}\n{:<14} {:>16} {:>16} {:>12} {:>8} {:>6}\n",
                args.m,
                args.physics.rs1,
                args.physics.mu,
                args.trials,
                args.seed,
                "metric",
                "closed_form",
                "monte_carlo",
                "std_error",
                "sigmas",
                "result"
            );
            for c in &checks {
                writeln!(
                    s,
                    "{:<14} {:>16.10} {:>16.10} {:>12.3e} {:>8.3} {:>6}",
                    c.metric,
                    c.closed_form,
                    c.monte_carlo,
                    c.std_error,
                    c.sigmas,
                    if c.pass { "PASS" } else { "FAIL" }
                )
                .unwrap();
            }
            s
        }
        Format::Csv => render::csv(&checks)?,
        Format::Json => render::json(&ValidateJson {
            m: args.m,
            rs1: args.physics.rs1,
            mu: args.physics.mu,
            trials: args.trials,
            seed: args.seed,
            checks: &checks,
        })?,
    };
    emit(&args.output, &text)?;
    Ok(if checks.iter().all(|c| c.pass) { Status::Success } else { Status::ValidationFailed })
}

fn session(args: SessionArgs) -> Result<Status, CliError> {
    let p = params(args.m, args.physics.rs1, args.physics.mu)?;
    let strategy = match args.strategy {
        StrategyName::Honest => AliceStrategy::Honest,
        StrategyName::NeighborCheat => AliceStrategy::NeighborCheat,
        StrategyName::Underpower => AliceStrategy::Underpower { factor: args.factor },
    };
    let outcome = run_session(&p, strategy, args.choice, args.seed).map_err(|e| CliError::Usage(e.to_string()))?;
    let mut buf = Vec::new();
    write_transcript(&mut buf, &outcome.transcript).map_err(|e| CliError::Runtime(e.into()))?;
    match &args.transcript {
        Some(path) => {
            write_file(path, &buf)?;
            println!("verdict: {}", verdict_name(outcome.verdict));
        }
        None => io::stdout().lock().write_all(&buf)?,
    }
    Ok(if outcome.accepted() { Status::Success } else { Status::Rejected })
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    fs::write(path, bytes).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

fn verdict_name(v: VerdictReason) -> &'static str {
    match v {
        VerdictReason::Confirmed => "CONFIRMED",
        VerdictReason::SpdClick => "SPD_CLICK",
        VerdictReason::NoDetection => "NO_DETECTION",
        VerdictReason::Underpowered => "UNDERPOWERED",
    }
}

/// Expands `start:stop:step` into its inclusive sequence.
pub fn parse_range(spec: &str) -> Result<Vec<f64>, String> {
    let parts: Vec<&str> = spec.split(':').collect();
    let [start, stop, step] = parts.as_slice() else {
        return Err(format!("range {spec:?} must look like start:stop:step"));
    };
    let parse = |s: &str| s.trim().parse::<f64>().map_err(|e| format!("range {spec:?}: {e}"));
    let (start, stop, step) = (parse(start)?, parse(stop)?, parse(step)?);
    if step.is_nan() || step <= 0.0 || !start.is_finite() || !stop.is_finite() {
        return Err(format!("range {spec:?} needs finite bounds and a positive step"));
    }
    let count = ((stop - start) / step + 1e-9).floor();
    if count < 0.0 {
        return Ok(Vec::new());
    }
    Ok((0..=count as usize).map(|i| start + i as f64 * step).collect())
}

#[derive(Debug, Serialize)]
#[allow(non_snake_case)]
struct SweepRow {
    rs1: f64,
    mu: f64,
    M: usize,
    mean_photons: f64,
    p_a: f64,
    p_b: f64,
    qcm_secure: u8,
    worst_N: Option<usize>,
}

fn sweep(args: SweepArgs) -> Result<Status, CliError> {
    let values = match &args.range {
        Some(spec) => parse_range(spec).map_err(CliError::Usage)?,
        None => args.values.clone(),
    };
    if values.is_empty() {
        return usage("sweep range is empty");
    }
    let mut rows = Vec::with_capacity(values.len());
    for v in values {
        let (m, rs1, mu) = match args.param {
            SweepParam::Rs1 => (args.m, v, args.physics.mu),
            SweepParam::Mu => (args.m, args.physics.rs1, v),
            SweepParam::M => {
                if v.fract() != 0.0 || v < 0.0 {
                    return usage(format!("M must be a whole number, got {v}"));
                }
                (v as usize, args.physics.rs1, args.physics.mu)
            }
        };
        let r = SecurityReport::evaluate(&params(m, rs1, mu)?);
        rows.push(SweepRow {
            rs1,
            mu,
            M: r.states,
            mean_photons: r.mean_photons,
            p_a: r.p_a,
            p_b: r.p_b,
            qcm_secure: render::flag(r.qcm_secure),
            worst_N: r.worst_n,
        });
    }
    let text = match args.output.format {
        Format::Table => {
            let mut s = format!(
                "{:>8} {:>8} {:>3} {:>10} {:>9} {:>9} {:>4}\n",
                "rs1", "mu", "M", "<n>", "p_a(%)", "p_b(%)", "QCM"
            );
            for r in &rows {
                writeln!(
                    s,
                    "{:>8} {:>8} {:>3} {:>10} {:>9} {:>9} {:>4}",
                    r.rs1,
                    r.mu,
                    r.M,
                    render::truncated(r.mean_photons, 3),
                    render::truncated(100.0 * r.p_a, 3),
                    render::brute_force_percent(r.p_b),
                    r.qcm_secure
                )
                .unwrap();
            }
            s
        }
        Format::Csv => render::csv(&rows)?,
        Format::Json => render::json(&rows)?,
    };
    emit(&args.output, &text)?;
    Ok(Status::Success)
}
