//! `kgbeam`: verification suites, slice export, energy tables, boosts and
//! flowline tracing for exact Klein-Gordon beam modes.

mod boost;
mod config;
mod energy;
mod field;
mod flow;
mod output;
mod report;
mod verify;

use std::io::Write;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::{usage, CliError, CliResult, CommonArgs, RunConfig};
use report::VerificationReport;

#[derive(Debug, Parser)]
#[command(name = "kgbeam", version, about = "Exact Klein-Gordon beam modes: checks and exports")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the full verification suite for one beam
    Verify(VerifyArgs),
    /// Export a field quantity on a transverse slice as CSV
    Field(FieldArgs),
    /// Tabulate mode energies
    Energy(EnergyArgs),
    /// Check invariance under an axial Lorentz boost
    Boost(BoostArgs),
    /// Trace transverse flowlines with RK4
    Flow(FlowArgs),
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Number of sampled points per residual check
    #[arg(long)]
    points: Option<usize>,
    /// Deliberately break the solution (`gouy`)
    #[arg(long, hide = true)]
    corrupt: Option<String>,
}

#[derive(Debug, Args)]
struct FieldArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// psi, density, current, potential, v2 or bohm_q
    #[arg(long)]
    quantity: Option<String>,
    /// Slice time
    #[arg(long, allow_hyphen_values = true)]
    tau: Option<f64>,
}

#[derive(Debug, Args)]
struct EnergyArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Largest first index (m, or l for LG)
    #[arg(long)]
    max_m: Option<u32>,
    /// Largest second index (n, or p for LG)
    #[arg(long)]
    max_n: Option<u32>,
}

#[derive(Debug, Args)]
struct BoostArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Boost velocity in units of c
    #[arg(long, allow_hyphen_values = true)]
    beta: Option<f64>,
    #[arg(long)]
    points: Option<usize>,
}

#[derive(Debug, Args)]
struct FlowArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Number of automatically placed seeds
    #[arg(long)]
    seeds: Option<usize>,
    /// Explicit seed `X,Y` (repeatable); overrides --seeds
    #[arg(long = "seed", allow_hyphen_values = true)]
    seed: Vec<String>,
    /// `A,B`; defaults to the span taking s from 0 to 4b
    #[arg(long, allow_hyphen_values = true)]
    tau_range: Option<String>,
    #[arg(long)]
    steps: Option<usize>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("kgbeam: {e}");
            ExitCode::from(2)
        }
    }
}

fn run(command: Command) -> CliResult<ExitCode> {
    match command {
        Command::Verify(a) => cmd_verify(a),
        Command::Field(a) => cmd_field(a),
        Command::Energy(a) => cmd_energy(a),
        Command::Boost(a) => cmd_boost(a),
        Command::Flow(a) => cmd_flow(a),
    }
}

fn emit_report(cfg: &RunConfig, report: &VerificationReport) -> CliResult<ExitCode> {
    let text = if cfg.json { report.to_json() } else { report.to_text() };
    let mut out = output::sink(cfg.out.as_deref())?;
    write_all(&mut out, cfg, text.as_bytes())?;
    if cfg.out.is_some() {
        println!("overall: {}", if report.passed() { "PASS" } else { "FAIL" });
    }
    Ok(if report.passed() { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn write_all(out: &mut dyn Write, cfg: &RunConfig, bytes: &[u8]) -> CliResult<()> {
    let err = |source| CliError::Io { path: cfg.out.clone().unwrap_or_else(|| "<stdout>".into()), source };
    out.write_all(bytes).map_err(err)?;
    out.flush().map_err(err)
}

fn positive_count(n: usize, what: &str) -> CliResult<usize> {
    if n == 0 {
        usage(format!("{what} must be positive"))
    } else {
        Ok(n)
    }
}

fn cmd_verify(a: VerifyArgs) -> CliResult<ExitCode> {
    let cfg = RunConfig::resolve(&a.common)?;
    let points = positive_count(cfg.pick(a.points, "points", verify::DEFAULT_POINTS)?, "points")?;
    let corruption = match cfg.pick_str(a.corrupt.as_deref(), "corrupt").as_deref() {
        None | Some("none") => verify::Corruption::None,
        Some("gouy") => verify::Corruption::Gouy,
        Some(other) => return usage(format!("unknown corruption `{other}` (expected gouy)")),
    };
    let report = verify::run(&cfg.params, &verify::VerifySettings { points, corruption, grid: cfg.grid })?;
    emit_report(&cfg, &report)
}

fn cmd_field(a: FieldArgs) -> CliResult<ExitCode> {
    let cfg = RunConfig::resolve(&a.common)?;
    let quantity: field::Quantity = cfg.pick_str(a.quantity.as_deref(), "quantity").as_deref().unwrap_or("density").parse()?;
    let tau = cfg.pick(a.tau, "tau", 0.0)?;
    if !tau.is_finite() {
        return usage("tau must be finite");
    }
    let out = output::sink(cfg.out.as_deref())?;
    field::write(out, &cfg.params, &cfg.grid, tau, quantity)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_energy(a: EnergyArgs) -> CliResult<ExitCode> {
    let cfg = RunConfig::resolve(&a.common)?;
    let max_m = cfg.pick(a.max_m, "max_m", 3)?;
    let max_n = cfg.pick(a.max_n, "max_n", 3)?;
    let out = output::sink(cfg.out.as_deref())?;
    energy::write(out, &cfg.params, max_m, max_n)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_boost(a: BoostArgs) -> CliResult<ExitCode> {
    let cfg = RunConfig::resolve(&a.common)?;
    let beta = match a.beta {
        Some(b) => b,
        None => match cfg.file.parsed::<f64>("beta")? {
            Some(b) => b,
            None => return usage("boost needs --beta"),
        },
    };
    let points = positive_count(cfg.pick(a.points, "points", verify::DEFAULT_POINTS)?, "points")?;
    let report = boost::run(&cfg.params, beta, &cfg.grid, points)?;
    emit_report(&cfg, &report)
}

fn parse_pair(text: &str, what: &str) -> CliResult<(f64, f64)> {
    let bad = || CliError::Usage(format!("{what} `{text}`: expected two comma-separated numbers"));
    let (a, b) = text.split_once(',').ok_or_else(bad)?;
    let a: f64 = a.trim().parse().map_err(|_| bad())?;
    let b: f64 = b.trim().parse().map_err(|_| bad())?;
    Ok((a, b))
}

fn cmd_flow(a: FlowArgs) -> CliResult<ExitCode> {
    let cfg = RunConfig::resolve(&a.common)?;
    let p = cfg.params;
    let seeds = if a.seed.is_empty() {
        let count = positive_count(cfg.pick(a.seeds, "seeds", 8)?, "seeds")?;
        flow::default_seeds(&p, count)
    } else {
        a.seed.iter().map(|s| parse_pair(s, "seed")).collect::<CliResult<_>>()?
    };
    let (tau_start, tau_end) = match cfg.pick_str(a.tau_range.as_deref(), "tau_range") {
        Some(r) => parse_pair(&r, "tau range")?,
        None => (0.0, 4.0 * p.b / (p.units.c + p.v3)),
    };
    let steps = cfg.pick(a.steps, "steps", 400)?;
    let settings = flow::FlowSettings { seeds, tau_start, tau_end, steps };

    let out = output::sink(cfg.out.as_deref())?;
    let summaries = flow::write(out, &p, &settings)?;
    let mut text = String::new();
    if cfg.json {
        text = serde_json::to_string_pretty(&summaries).unwrap_or_default();
        text.push('\n');
    } else {
        for s in &summaries {
            text.push_str(&format!(
                "seed {} ({:+.4e}, {:+.4e}): {} steps{}, rho/w drift {:.2e}",
                s.seed,
                s.xi1,
                s.xi2,
                s.steps,
                if s.truncated { " TRUNCATED near a node" } else { "" },
                s.rho_over_w_drift
            ));
            if let Some(c) = s.circulation {
                text.push_str(&format!(", circulation {c:.6} hbar"));
            }
            text.push('\n');
        }
    }
    // the CSV owns stdout unless it went to a file
    if cfg.out.is_some() {
        print!("{text}");
    } else {
        eprint!("{text}");
    }
    Ok(ExitCode::SUCCESS)
}
