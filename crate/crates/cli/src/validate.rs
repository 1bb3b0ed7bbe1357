//! Closed forms against the brute-force oracle on a fixed grid.

use std::fmt::Write as _;

use num_complex::Complex64;
use rayon::prelude::*;
use tricoh::closed_form::{
    bc_by_literal_substitution, pair_amplitudes, transition_probability_raw, PairAmplitudes,
};
use tricoh::geometry::GeometryConfig;
use tricoh::oracle::{oracle_c, oracle_p, oracle_x, OracleEstimate, QuadratureSettings};
use tricoh::{GeometryKind, Label, Pair};

use crate::error::CliError;
use crate::run::format_number;

pub const P_REL_TOL: f64 = 1e-4;
pub const AMPLITUDE_REL_TOL: f64 = 1e-3;
pub const AMPLITUDE_ABS_TOL: f64 = 1e-8;

pub const GRID_GAPS: [f64; 4] = [0.0, 0.1, 1.0, 2.0];
pub const GRID_DISTANCES: [f64; 4] = [0.5, 1.0, 2.0, 5.0];
/// `Ω_C` sits this far above `Ω_A = Ω_B` so every pair has a gap difference
/// somewhere on the grid.
pub const GRID_GAP_OFFSET: f64 = 0.3;

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationRecord {
    pub geometry: String,
    pub gap: f64,
    pub distance: f64,
    pub quantity: String,
    pub closed_form: Complex64,
    pub oracle: Option<Complex64>,
    pub oracle_error: Option<f64>,
    pub pass: bool,
    pub note: String,
}

/// Which reading of the `BC` substitution rule the oracle supports at one
/// grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct AuditRecord {
    pub geometry: String,
    pub gap: f64,
    pub distance: f64,
    pub generic_matches: bool,
    pub literal_matches: bool,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ValidationReport {
    pub records: Vec<ValidationRecord>,
    pub audit: Vec<AuditRecord>,
}

fn amplitude_ok(closed: Complex64, oracle: Complex64) -> bool {
    (closed - oracle).norm() <= (AMPLITUDE_REL_TOL * closed.norm()).max(AMPLITUDE_ABS_TOL)
}

fn probability_ok(closed: f64, oracle: Complex64) -> bool {
    (oracle.re - closed).abs() <= P_REL_TOL * closed.abs()
        && oracle.im.abs() <= P_REL_TOL * closed.abs()
}

fn record(
    geometry: &str,
    gap: f64,
    distance: f64,
    quantity: String,
    closed_form: Complex64,
    oracle: Result<OracleEstimate<f64>, tricoh::Error>,
    check: impl Fn(Complex64) -> bool,
) -> ValidationRecord {
    match oracle {
        Ok(o) => ValidationRecord {
            geometry: geometry.to_string(),
            gap,
            distance,
            quantity,
            closed_form,
            oracle: Some(o.value),
            oracle_error: Some(o.error),
            pass: check(o.value),
            note: String::new(),
        },
        Err(e) => ValidationRecord {
            geometry: geometry.to_string(),
            gap,
            distance,
            quantity,
            closed_form,
            oracle: None,
            oracle_error: None,
            pass: false,
            note: e.to_string(),
        },
    }
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        !self.records.is_empty() && self.records.iter().all(|r| r.pass)
    }

    pub fn failures(&self) -> usize {
        self.records.iter().filter(|r| !r.pass).count()
    }

    pub fn worst_relative(&self, prefix: char) -> f64 {
        self.records
            .iter()
            .filter(|r| r.quantity.starts_with(prefix))
            .filter_map(|r| {
                r.oracle
                    .map(|o| (o - r.closed_form).norm() / r.closed_form.norm())
            })
            .filter(|v| v.is_finite())
            .fold(0.0, f64::max)
    }

    /// Audit verdict in words.
    pub fn audit_summary(&self) -> Option<String> {
        if self.audit.is_empty() {
            return None;
        }
        let n = self.audit.len();
        let generic = self.audit.iter().filter(|a| a.generic_matches).count();
        let literal = self.audit.iter().filter(|a| a.literal_matches).count();
        let verdict = if generic == n && literal < n {
            "the generic B-C pair formula matches the oracle; the literal substitution does not"
        } else if generic == n && literal == n {
            "both readings match the oracle on this grid"
        } else if literal == n {
            "only the literal substitution matches the oracle"
        } else {
            "neither reading matches the oracle everywhere"
        };
        Some(format!(
            "BC audit: generic pair formula matches at {generic}/{n} points, literal substitution at {literal}/{n}; {verdict}"
        ))
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# tricoh {} validate", env!("CARGO_PKG_VERSION"));
        let _ = writeln!(
            out,
            "# tolerances: P {P_REL_TOL:e} relative; C and X {AMPLITUDE_REL_TOL:e} relative or {AMPLITUDE_ABS_TOL:e} absolute, whichever is looser"
        );
        if !self.audit.is_empty() {
            let _ = writeln!(
                out,
                "# grid: separation = boundary distance = distance; gaps A = B = gap, C = gap + {GRID_GAP_OFFSET}; unit coupling"
            );
        }
        let _ = writeln!(
            out,
            "geometry,gap_sigma,distance_over_sigma,quantity,closed_re,closed_im,oracle_re,oracle_im,oracle_error,pass,note"
        );
        for r in &self.records {
            let (ore, oim, oerr) = match (r.oracle, r.oracle_error) {
                (Some(o), Some(e)) => (format_number(o.re), format_number(o.im), format_number(e)),
                _ => ("nan".into(), "nan".into(), "nan".into()),
            };
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{ore},{oim},{oerr},{},{}",
                r.geometry,
                r.gap,
                r.distance,
                r.quantity,
                format_number(r.closed_form.re),
                format_number(r.closed_form.im),
                if r.pass { "pass" } else { "FAIL" },
                r.note.replace(',', ";")
            );
        }
        let _ = writeln!(
            out,
            "# worst relative deviation: P {:e}, C {:e}, X {:e}",
            self.worst_relative('P'),
            self.worst_relative('C'),
            self.worst_relative('X')
        );
        if let Some(s) = self.audit_summary() {
            let _ = writeln!(out, "# {s}");
        }
        let _ = writeln!(
            out,
            "# result: {} ({} of {} checks failed)",
            if self.passed() { "PASS" } else { "FAIL" },
            self.failures(),
            self.records.len()
        );
        out
    }
}

fn validate_config(
    config: &GeometryConfig<f64>,
    gap: f64,
    distance: f64,
    settings: &QuadratureSettings<f64>,
) -> (Vec<ValidationRecord>, Option<AuditRecord>) {
    let geometry = config.kind.to_string();
    let mut records = Vec::new();
    for label in Label::ALL {
        let d = config.detector(label);
        let closed = match transition_probability_raw(d.gap, d.height()) {
            Ok(p) => p,
            Err(e) => {
                records.push(failed(&geometry, gap, distance, format!("P_{label}"), e));
                continue;
            }
        };
        records.push(record(
            &geometry,
            gap,
            distance,
            format!("P_{label}"),
            Complex64::new(closed, 0.0),
            oracle_p(d.gap, d.height(), settings),
            |o| probability_ok(closed, o),
        ));
    }

    let mut bc_oracle = None;
    for pair in Pair::ALL {
        let (a, b) = config.pair(pair);
        let closed = match pair_amplitudes(a, b) {
            Ok(c) => c,
            Err(e) => {
                records.push(failed(&geometry, gap, distance, format!("C_{pair}"), e));
                continue;
            }
        };
        let oc = oracle_c(a, b, settings);
        let ox = oracle_x(a, b, settings);
        if pair == Pair::BC {
            if let (Ok(c), Ok(x)) = (&oc, &ox) {
                bc_oracle = Some((c.value, x.value));
            }
        }
        records.push(record(
            &geometry,
            gap,
            distance,
            format!("C_{pair}"),
            closed.c,
            oc,
            |o| amplitude_ok(closed.c, o),
        ));
        records.push(record(
            &geometry,
            gap,
            distance,
            format!("X_{pair}"),
            closed.x,
            ox,
            |o| amplitude_ok(closed.x, o),
        ));
    }

    let audit = bc_oracle.and_then(|(c, x)| {
        let matches = |p: &PairAmplitudes<f64>| amplitude_ok(p.c, c) && amplitude_ok(p.x, x);
        let (b, cc) = config.pair(Pair::BC);
        let generic = pair_amplitudes(b, cc).ok()?;
        let literal = bc_by_literal_substitution(config).ok()?;
        Some(AuditRecord {
            geometry: geometry.clone(),
            gap,
            distance,
            generic_matches: matches(&generic),
            literal_matches: matches(&literal),
        })
    });
    (records, audit)
}

fn failed(
    geometry: &str,
    gap: f64,
    distance: f64,
    quantity: String,
    e: tricoh::Error,
) -> ValidationRecord {
    ValidationRecord {
        geometry: geometry.to_string(),
        gap,
        distance,
        quantity,
        closed_form: Complex64::new(f64::NAN, f64::NAN),
        oracle: None,
        oracle_error: None,
        pass: false,
        note: e.to_string(),
    }
}

/// Placements of the standard grid, in report order.
pub fn standard_grid() -> Result<Vec<(GeometryConfig<f64>, f64, f64)>, CliError> {
    let mut out = Vec::new();
    for kind in [GeometryKind::Parallel, GeometryKind::Orthogonal] {
        for &gap in &GRID_GAPS {
            for &distance in &GRID_DISTANCES {
                let gaps = [gap, gap, gap + GRID_GAP_OFFSET];
                let config = match kind {
                    GeometryKind::Parallel => GeometryConfig::parallel(gaps, distance, distance),
                    _ => GeometryConfig::orthogonal(gaps, distance, distance),
                }?;
                out.push((config, gap, distance));
            }
        }
    }
    Ok(out)
}

/// Full grid run. Oracle failures mark their check as failed; nothing aborts.
pub fn run_validate(
    settings: &QuadratureSettings<f64>,
    workers: usize,
) -> Result<ValidationReport, CliError> {
    settings.validate()?;
    let grid = standard_grid()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| CliError::Pool(e.to_string()))?;
    let parts: Vec<_> = pool.install(|| {
        grid.par_iter()
            .map(|(config, gap, distance)| validate_config(config, *gap, *distance, settings))
            .collect()
    });
    let mut report = ValidationReport::default();
    for (records, audit) in parts {
        report.records.extend(records);
        report.audit.extend(audit);
    }
    Ok(report)
}

/// One transition probability; `height = None` removes the boundary.
pub fn validate_single(
    gap: f64,
    height: Option<f64>,
    settings: &QuadratureSettings<f64>,
) -> Result<ValidationReport, CliError> {
    settings.validate()?;
    let z = height.unwrap_or(f64::INFINITY);
    let closed = transition_probability_raw(gap, z)?;
    let geometry = if height.is_some() { "single" } else { "free" };
    let r = record(
        geometry,
        gap,
        z,
        "P".to_string(),
        Complex64::new(closed, 0.0),
        oracle_p(gap, z, settings),
        |o| probability_ok(closed, o),
    );
    Ok(ValidationReport {
        records: vec![r],
        audit: Vec::new(),
    })
}
