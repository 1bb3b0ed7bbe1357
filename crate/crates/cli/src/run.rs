use std::fmt::Write as _;

use rayon::prelude::*;
use tricoh::closed_form::PairAmplitudes;
use tricoh::state::{additivity_check, TripartiteState};
use tricoh::{Label, Pair};

use crate::config::{Axis, GeometryChoice, Output, RunConfig};
use crate::error::CliError;

/// One emitted line: the sweep coordinates followed by the requested outputs.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub coords: Vec<(String, f64)>,
    pub values: Vec<(Output, f64)>,
    pub coherence: f64,
    pub additivity_residual: f64,
}

impl ResultRow {
    pub fn get(&self, output: Output) -> Option<f64> {
        self.values
            .iter()
            .find(|(o, _)| *o == output)
            .map(|&(_, v)| v)
    }

    pub fn csv_line(&self) -> String {
        let cells: Vec<String> = self
            .coords
            .iter()
            .map(|(_, v)| format_number(*v))
            .chain(self.values.iter().map(|(_, v)| format_number(*v)))
            .collect();
        cells.join(",")
    }
}

/// 12 significant digits, lowercase exponent.
pub fn format_number(v: f64) -> String {
    format!("{v:.11e}")
}

fn describe(config: &RunConfig) -> String {
    let mut s = format!(
        "geometry={} gap_a={} gap_b={} gap_c={}",
        config.geometry, config.gap_a, config.gap_b, config.gap_c
    );
    if config.geometry == GeometryChoice::General {
        let _ = write!(
            s,
            " position_a={:?} position_b={:?} position_c={:?}",
            config.position_a, config.position_b, config.position_c
        );
    } else {
        let _ = write!(
            s,
            " L/sigma={} dz/sigma={}",
            config.separation, config.boundary_distance
        );
    }
    s
}

fn magnitude(pairs: &[PairAmplitudes<f64>; 3], pair: Pair, time_ordered: bool) -> f64 {
    let p = &pairs[pair.index()];
    if time_ordered {
        p.x.norm()
    } else {
        p.c.norm()
    }
}

/// State at the configured point with `λ` applied.
pub fn point_state(config: &RunConfig) -> Result<TripartiteState<f64>, CliError> {
    let wrap = |source| CliError::Point {
        coords: describe(config),
        source,
    };
    let geometry = config.geometry_config()?;
    let unit = TripartiteState::from_config(&geometry).map_err(wrap)?;
    unit.rescaled(config.lambda).map_err(wrap)
}

fn row_from(config: &RunConfig, coords: Vec<(String, f64)>) -> Result<ResultRow, CliError> {
    let state = point_state(config)?;
    let additivity = additivity_check(&state);
    let coherence = state.coherence();
    let values = config
        .outputs
        .iter()
        .map(|&o| {
            let v = match o {
                Output::PA => state.probs.of(Label::A),
                Output::PB => state.probs.of(Label::B),
                Output::PC => state.probs.of(Label::C),
                Output::CAB => magnitude(&state.pairs, Pair::AB, false),
                Output::CBC => magnitude(&state.pairs, Pair::BC, false),
                Output::CAC => magnitude(&state.pairs, Pair::AC, false),
                Output::XAB => magnitude(&state.pairs, Pair::AB, true),
                Output::XBC => magnitude(&state.pairs, Pair::BC, true),
                Output::XAC => magnitude(&state.pairs, Pair::AC, true),
                Output::Coherence => coherence,
                Output::AdditivityResidual => additivity.residual,
            };
            (o, v)
        })
        .collect();
    Ok(ResultRow {
        coords,
        values,
        coherence,
        additivity_residual: additivity.residual,
    })
}

/// One row at the configured parameters. Coordinates are the three gaps and,
/// for the line geometries, `L/σ` and `Δz/σ`.
pub fn run_point(config: &RunConfig) -> Result<ResultRow, CliError> {
    config.validate()?;
    let mut coords = vec![
        ("gapA_sigma".to_string(), config.gap_a),
        ("gapB_sigma".to_string(), config.gap_b),
        ("gapC_sigma".to_string(), config.gap_c),
    ];
    if config.geometry != GeometryChoice::General {
        coords.push(("L_over_sigma".to_string(), config.separation));
        coords.push(("dz_over_sigma".to_string(), config.boundary_distance));
    }
    row_from(config, coords)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepReport {
    /// Provenance lines without the leading `# ` and without a timestamp.
    pub header: Vec<String>,
    pub columns: Vec<String>,
    pub rows: Vec<ResultRow>,
    /// Grid coordinates and value of the largest `C_l1` (gap grid only).
    pub argmax: Option<(Vec<f64>, f64)>,
    pub max_additivity_residual: f64,
}

impl SweepReport {
    /// CSV text; `generated` (Unix seconds) adds a timestamp line, the only
    /// part that varies between identical runs.
    pub fn render(&self, generated: Option<u64>) -> String {
        let mut out = String::new();
        for (i, line) in self.header.iter().enumerate() {
            let _ = writeln!(out, "# {line}");
            if i == 0 {
                if let Some(t) = generated {
                    let _ = writeln!(out, "# generated_unix_time: {t}");
                }
            }
        }
        let _ = writeln!(out, "{}", self.columns.join(","));
        for row in &self.rows {
            let _ = writeln!(out, "{}", row.csv_line());
        }
        let _ = writeln!(
            out,
            "# max additivity residual: {}",
            format_number(self.max_additivity_residual)
        );
        if let Some((coords, value)) = &self.argmax {
            let _ = writeln!(
                out,
                "# argmax C_l1: gapB_sigma={} gapC_sigma={} C_l1={}",
                format_number(coords[0]),
                format_number(coords[1]),
                format_number(*value)
            );
        }
        out
    }
}

pub fn provenance(config: &RunConfig, kind: &str) -> Vec<String> {
    let mut h = vec![
        format!("tricoh {} {kind}", env!("CARGO_PKG_VERSION")),
        format!("geometry: {}", config.geometry),
        format!(
            "lambda: {} (P, C, X and C_l1 carry a factor lambda^2)",
            config.lambda
        ),
    ];
    let mut fixed = Vec::new();
    let varied: &[&str] = match config.axis {
        Axis::Separation => &["separation"],
        Axis::BoundaryDistance => &["boundary_distance"],
        Axis::GapB => &["gap_b"],
        Axis::GapC => &["gap_c"],
        Axis::GapGrid => &["gap_b", "gap_c"],
    };
    let kind_is_sweep = kind == "sweep";
    for (name, v) in [
        ("gap_a", config.gap_a),
        ("gap_b", config.gap_b),
        ("gap_c", config.gap_c),
    ] {
        if !(kind_is_sweep && varied.contains(&name)) {
            fixed.push(format!("{name}={v}"));
        }
    }
    if config.geometry == GeometryChoice::General {
        fixed.push(format!(
            "position_a={:?} position_b={:?} position_c={:?}",
            config.position_a.unwrap_or_default(),
            config.position_b.unwrap_or_default(),
            config.position_c.unwrap_or_default()
        ));
    } else {
        for (name, v) in [
            ("separation", config.separation),
            ("boundary_distance", config.boundary_distance),
        ] {
            if !(kind_is_sweep && varied.contains(&name)) {
                fixed.push(format!("{name}={v}"));
            }
        }
    }
    h.push(format!("fixed: {}", fixed.join(" ")));
    if kind_is_sweep {
        h.push(format!(
            "axis: {} from {} to {} in {} steps{}",
            config.axis,
            config.start,
            config.stop,
            config.steps,
            if config.axis == Axis::GapGrid {
                " per gap"
            } else {
                ""
            }
        ));
    }
    h.push(
        "lengths in units of sigma; dz_over_sigma is the boundary distance of the \
         nearest detector (all three when parallel, detector A when orthogonal)"
            .to_string(),
    );
    h.push("gaps are Omega*sigma; abs_ columns are magnitudes".to_string());
    h
}

fn pool(workers: usize) -> Result<rayon::ThreadPool, CliError> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| CliError::Pool(e.to_string()))
}

/// Evaluates every axis point (concurrently when `workers != 1`) and keeps
/// rows in axis order. The first failing point, in axis order, aborts.
pub fn run_sweep(config: &RunConfig) -> Result<SweepReport, CliError> {
    config.validate_sweep()?;
    let names: Vec<String> = config
        .axis
        .columns()
        .iter()
        .map(|s| s.to_string())
        .collect();
    let points = config.axis_points();
    let results: Vec<Result<ResultRow, CliError>> = pool(config.workers)?.install(|| {
        points
            .par_iter()
            .map(|p| {
                let coords = names.iter().cloned().zip(p.iter().copied()).collect();
                row_from(&config.at(p), coords)
            })
            .collect()
    });
    let rows = results.into_iter().collect::<Result<Vec<_>, _>>()?;

    let max_additivity_residual = rows
        .iter()
        .map(|r| r.additivity_residual)
        .fold(0.0, f64::max);
    let argmax = (config.axis == Axis::GapGrid).then(|| {
        // first maximum in emission order
        let best = rows
            .iter()
            .fold(None::<&ResultRow>, |acc, r| match acc {
                Some(b) if b.coherence >= r.coherence => Some(b),
                _ => Some(r),
            })
            .expect("grid has at least four points");
        (best.coords.iter().map(|c| c.1).collect(), best.coherence)
    });

    let mut columns = names;
    columns.extend(config.outputs.iter().map(|o| o.name().to_string()));
    Ok(SweepReport {
        header: provenance(config, "sweep"),
        columns,
        rows,
        argmax,
        max_additivity_residual,
    })
}
