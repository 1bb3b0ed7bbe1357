use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use tricoh_cli::config::{Axis, GeometryChoice, Output, RunConfig};
use tricoh_cli::run::{point_state, provenance, run_point, run_sweep};
use tricoh_cli::validate::{run_validate, validate_single};

#[derive(Parser)]
#[command(
    name = "tricoh",
    version,
    about = "Coherence harvested by three static detectors near a mirror"
)]
struct Cli {
    /// TOML document with any of the keys below.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(flatten)]
    overrides: Overrides,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// One parameter set, one CSV row.
    Point,
    /// Scan one axis (or the gap grid) and write CSV.
    Sweep,
    /// Compare closed forms with the brute-force oracle.
    Validate {
        /// Check a single transition probability with this gap instead of the grid.
        #[arg(long)]
        gap: Option<f64>,
        /// Height above the mirror for `--gap`; omit for free space.
        #[arg(long, requires = "gap")]
        height: Option<f64>,
    },
    /// Dump the 8x8 density matrix.
    State,
}

#[derive(Args)]
struct Overrides {
    #[arg(long, global = true)]
    geometry: Option<GeometryChoice>,
    #[arg(long, global = true)]
    gap_a: Option<f64>,
    #[arg(long, global = true)]
    gap_b: Option<f64>,
    #[arg(long, global = true)]
    gap_c: Option<f64>,
    /// L/σ.
    #[arg(long, global = true)]
    separation: Option<f64>,
    /// Δz/σ.
    #[arg(long, global = true)]
    boundary_distance: Option<f64>,
    /// x,y,z of detector A (general geometry).
    #[arg(long, global = true, value_delimiter = ',')]
    position_a: Option<Vec<f64>>,
    #[arg(long, global = true, value_delimiter = ',')]
    position_b: Option<Vec<f64>>,
    #[arg(long, global = true, value_delimiter = ',')]
    position_c: Option<Vec<f64>>,
    /// Coupling; every output is rescaled by λ².
    #[arg(long, global = true)]
    lambda: Option<f64>,
    #[arg(long, global = true)]
    axis: Option<Axis>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    start: Option<f64>,
    #[arg(long, global = true)]
    stop: Option<f64>,
    #[arg(long, global = true)]
    steps: Option<usize>,
    #[arg(long, global = true, value_delimiter = ',')]
    outputs: Option<Vec<Output>>,
    /// Output file (stdout otherwise). TRICOH_OUTPUT takes precedence.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[arg(long, global = true)]
    workers: Option<usize>,
    #[arg(long, global = true)]
    epsilon_first: Option<f64>,
    #[arg(long, global = true)]
    epsilon_ratio: Option<f64>,
    #[arg(long, global = true)]
    epsilon_count: Option<usize>,
    #[arg(long, global = true)]
    extrapolation_order: Option<usize>,
    #[arg(long, global = true)]
    tau_window: Option<f64>,
    #[arg(long, global = true)]
    grid: Option<usize>,
}

fn triple(name: &str, v: Vec<f64>) -> Result<[f64; 3]> {
    match v[..] {
        [x, y, z] => Ok([x, y, z]),
        _ => anyhow::bail!("--{name} takes x,y,z"),
    }
}

impl Overrides {
    fn apply(self, c: &mut RunConfig) -> Result<()> {
        macro_rules! set {
            ($($f:ident),*) => { $( if let Some(v) = self.$f { c.$f = v; } )* };
        }
        set!(
            geometry,
            gap_a,
            gap_b,
            gap_c,
            separation,
            boundary_distance,
            lambda,
            axis,
            start,
            stop,
            steps,
            outputs,
            workers,
            epsilon_first,
            epsilon_ratio,
            epsilon_count,
            tau_window,
            grid
        );
        if let Some(v) = self.position_a {
            c.position_a = Some(triple("position-a", v)?);
        }
        if let Some(v) = self.position_b {
            c.position_b = Some(triple("position-b", v)?);
        }
        if let Some(v) = self.position_c {
            c.position_c = Some(triple("position-c", v)?);
        }
        if self.output.is_some() {
            c.output = self.output;
        }
        if self.extrapolation_order.is_some() {
            c.extrapolation_order = self.extrapolation_order;
        }
        Ok(())
    }
}

fn emit(config: &RunConfig, text: &str) -> Result<()> {
    match &config.output {
        Some(path) => {
            std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
        }
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            Ok(out.flush()?)
        }
    }
}

fn now() -> Option<u64> {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .ok()
        .map(|d| d.as_secs())
}

fn main() -> ExitCode {
    match real_main() {
        Ok(code) => code,
        Err(e) => {
            // our error types already print their source; skip causes that repeat
            let mut message = e.to_string();
            for cause in e.chain().skip(1) {
                let cause = cause.to_string();
                if !message.contains(&cause) {
                    message = format!("{message}: {cause}");
                }
            }
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}

fn real_main() -> Result<ExitCode> {
    let cli = Cli::parse();
    let mut config = match &cli.config {
        Some(path) => RunConfig::from_file(path)?,
        None => RunConfig::default(),
    };
    cli.overrides.apply(&mut config)?;
    config.apply_env();

    match cli.command {
        Command::Point => {
            let row = run_point(&config)?;
            let mut text = String::new();
            for line in provenance(&config, "point") {
                text.push_str(&format!("# {line}\n"));
            }
            let names: Vec<&str> = row
                .coords
                .iter()
                .map(|(n, _)| n.as_str())
                .chain(row.values.iter().map(|(o, _)| o.name()))
                .collect();
            text.push_str(&names.join(","));
            text.push('\n');
            text.push_str(&row.csv_line());
            text.push('\n');
            emit(&config, &text)?;
        }
        Command::Sweep => {
            let report = run_sweep(&config)?;
            emit(&config, &report.render(now()))?;
            if let Some((coords, value)) = &report.argmax {
                eprintln!(
                    "argmax C_l1 at gapB_sigma={} gapC_sigma={} ({value:e})",
                    coords[0], coords[1]
                );
            }
        }
        Command::Validate { gap, height } => {
            let settings = config.quadrature()?;
            let report = match gap {
                Some(g) => validate_single(g, height, &settings)?,
                None => run_validate(&settings, config.workers)?,
            };
            emit(&config, &report.render())?;
            if !report.passed() {
                eprintln!("validation failed: {} checks", report.failures());
                return Ok(ExitCode::FAILURE);
            }
        }
        Command::State => {
            let state = point_state(&config)?;
            let mut text = String::new();
            for line in provenance(&config, "state") {
                text.push_str(&format!("# {line}\n"));
            }
            text.push_str(&state.to_labeled_rows());
            emit(&config, &text)?;
        }
    }
    Ok(ExitCode::SUCCESS)
}
