//! Run configuration: one flat TOML document whose keys mirror the command
//! line flags. See `config.example.toml` at the repository root.

use std::fmt;
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use serde::{Deserialize, Serialize};
use tricoh::geometry::{DetectorSpec, GeometryConfig};
use tricoh::oracle::QuadratureSettings;
use tricoh::Label;

use crate::error::CliError;

/// Environment variable that replaces the `output` path, and nothing else.
pub const OUTPUT_ENV: &str = "TRICOH_OUTPUT";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum GeometryChoice {
    Parallel,
    Orthogonal,
    General,
}

impl fmt::Display for GeometryChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GeometryChoice::Parallel => "parallel",
            GeometryChoice::Orthogonal => "orthogonal",
            GeometryChoice::General => "general",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
pub enum Axis {
    #[serde(rename = "L_over_sigma")]
    #[value(name = "L_over_sigma")]
    Separation,
    #[serde(rename = "dz_over_sigma")]
    #[value(name = "dz_over_sigma")]
    BoundaryDistance,
    #[serde(rename = "gapB")]
    #[value(name = "gapB")]
    GapB,
    #[serde(rename = "gapC")]
    #[value(name = "gapC")]
    GapC,
    #[serde(rename = "gapBC_grid")]
    #[value(name = "gapBC_grid")]
    GapGrid,
}

impl Axis {
    /// Coordinate column names in the CSV.
    pub fn columns(self) -> &'static [&'static str] {
        match self {
            Axis::Separation => &["L_over_sigma"],
            Axis::BoundaryDistance => &["dz_over_sigma"],
            Axis::GapB => &["gapB_sigma"],
            Axis::GapC => &["gapC_sigma"],
            Axis::GapGrid => &["gapB_sigma", "gapC_sigma"],
        }
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Axis::Separation => "L_over_sigma",
            Axis::BoundaryDistance => "dz_over_sigma",
            Axis::GapB => "gapB",
            Axis::GapC => "gapC",
            Axis::GapGrid => "gapBC_grid",
        })
    }
}

/// Quantities a row can carry. Amplitude columns are magnitudes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, ValueEnum)]
pub enum Output {
    #[serde(rename = "P_A")]
    #[value(name = "P_A")]
    PA,
    #[serde(rename = "P_B")]
    #[value(name = "P_B")]
    PB,
    #[serde(rename = "P_C")]
    #[value(name = "P_C")]
    PC,
    #[serde(rename = "abs_C_AB")]
    #[value(name = "abs_C_AB")]
    CAB,
    #[serde(rename = "abs_C_BC")]
    #[value(name = "abs_C_BC")]
    CBC,
    #[serde(rename = "abs_C_AC")]
    #[value(name = "abs_C_AC")]
    CAC,
    #[serde(rename = "abs_X_AB")]
    #[value(name = "abs_X_AB")]
    XAB,
    #[serde(rename = "abs_X_BC")]
    #[value(name = "abs_X_BC")]
    XBC,
    #[serde(rename = "abs_X_AC")]
    #[value(name = "abs_X_AC")]
    XAC,
    #[serde(rename = "C_l1")]
    #[value(name = "C_l1")]
    Coherence,
    #[serde(rename = "additivity_residual")]
    #[value(name = "additivity_residual")]
    AdditivityResidual,
}

impl Output {
    pub const ALL: [Output; 11] = [
        Output::PA,
        Output::PB,
        Output::PC,
        Output::CAB,
        Output::CBC,
        Output::CAC,
        Output::XAB,
        Output::XBC,
        Output::XAC,
        Output::Coherence,
        Output::AdditivityResidual,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Output::PA => "P_A",
            Output::PB => "P_B",
            Output::PC => "P_C",
            Output::CAB => "abs_C_AB",
            Output::CBC => "abs_C_BC",
            Output::CAC => "abs_C_AC",
            Output::XAB => "abs_X_AB",
            Output::XBC => "abs_X_BC",
            Output::XAC => "abs_X_AC",
            Output::Coherence => "C_l1",
            Output::AdditivityResidual => "additivity_residual",
        }
    }
}

impl fmt::Display for Output {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub geometry: GeometryChoice,
    pub gap_a: f64,
    pub gap_b: f64,
    pub gap_c: f64,
    /// `L/σ`, parallel and orthogonal only.
    pub separation: f64,
    /// `Δz/σ`, parallel and orthogonal only.
    pub boundary_distance: f64,
    /// `[x, y, z]/σ` for the general geometry.
    pub position_a: Option<[f64; 3]>,
    pub position_b: Option<[f64; 3]>,
    pub position_c: Option<[f64; 3]>,
    pub lambda: f64,

    pub axis: Axis,
    pub start: f64,
    pub stop: f64,
    pub steps: usize,
    pub outputs: Vec<Output>,
    pub output: Option<PathBuf>,
    /// Worker threads; 0 lets the pool decide.
    pub workers: usize,

    pub epsilon_first: f64,
    pub epsilon_ratio: f64,
    pub epsilon_count: usize,
    pub extrapolation_order: Option<usize>,
    pub tau_window: f64,
    pub grid: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        let q = QuadratureSettings::<f64>::default();
        Self {
            geometry: GeometryChoice::Parallel,
            gap_a: 0.1,
            gap_b: 0.1,
            gap_c: 0.1,
            separation: 1.0,
            boundary_distance: 1.0,
            position_a: None,
            position_b: None,
            position_c: None,
            lambda: 1.0,
            axis: Axis::Separation,
            start: 0.25,
            stop: 6.0,
            steps: 24,
            outputs: Output::ALL.to_vec(),
            output: None,
            workers: 0,
            epsilon_first: q.epsilon_schedule[0],
            epsilon_ratio: q.epsilon_schedule[1] / q.epsilon_schedule[0],
            epsilon_count: q.epsilon_schedule.len(),
            extrapolation_order: None,
            tau_window: q.tau_window,
            grid: q.grid,
        }
    }
}

impl RunConfig {
    pub fn from_toml_str(text: &str) -> Result<Self, CliError> {
        Ok(toml::from_str(text)?)
    }

    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io {
            path: path.to_path_buf(),
            source: e,
        })?;
        Self::from_toml_str(&text)
    }

    /// Applies `TRICOH_OUTPUT` if it is set and non-empty.
    pub fn apply_env(&mut self) {
        if let Ok(path) = std::env::var(OUTPUT_ENV) {
            if !path.is_empty() {
                self.output = Some(PathBuf::from(path));
            }
        }
    }

    pub fn gaps(&self) -> [f64; 3] {
        [self.gap_a, self.gap_b, self.gap_c]
    }

    /// Placement at the configured parameters, unit coupling.
    pub fn geometry_config(&self) -> Result<GeometryConfig<f64>, CliError> {
        let gaps = self.gaps();
        let built = match self.geometry {
            GeometryChoice::Parallel => {
                GeometryConfig::parallel(gaps, self.separation, self.boundary_distance)
            }
            GeometryChoice::Orthogonal => {
                GeometryConfig::orthogonal(gaps, self.separation, self.boundary_distance)
            }
            GeometryChoice::General => {
                let positions = [self.position_a, self.position_b, self.position_c];
                let mut detectors = Vec::with_capacity(3);
                for (i, p) in positions.into_iter().enumerate() {
                    let p = p.ok_or_else(|| {
                        CliError::Config(format!(
                            "general geometry needs position_{}",
                            Label::ALL[i].to_string().to_lowercase()
                        ))
                    })?;
                    detectors.push(DetectorSpec::new(Label::ALL[i], gaps[i], p)?);
                }
                GeometryConfig::general([detectors[0], detectors[1], detectors[2]])
            }
        };
        Ok(built?)
    }

    /// Configuration with the sweep coordinates substituted.
    pub fn at(&self, coords: &[f64]) -> Self {
        let mut c = self.clone();
        match self.axis {
            Axis::Separation => c.separation = coords[0],
            Axis::BoundaryDistance => c.boundary_distance = coords[0],
            Axis::GapB => c.gap_b = coords[0],
            Axis::GapC => c.gap_c = coords[0],
            Axis::GapGrid => {
                c.gap_b = coords[0];
                c.gap_c = coords[1];
            }
        }
        c
    }

    /// Axis samples, `start` to `stop` inclusive. The gap grid yields
    /// `steps²` points, `gapB` outer.
    pub fn axis_points(&self) -> Vec<Vec<f64>> {
        let line: Vec<f64> = (0..self.steps)
            .map(|k| self.start + (self.stop - self.start) * k as f64 / (self.steps - 1) as f64)
            .collect();
        match self.axis {
            Axis::GapGrid => line
                .iter()
                .flat_map(|&b| line.iter().map(move |&c| vec![b, c]))
                .collect(),
            _ => line.into_iter().map(|v| vec![v]).collect(),
        }
    }

    pub fn quadrature(&self) -> Result<QuadratureSettings<f64>, CliError> {
        let mut q = QuadratureSettings::geometric(
            self.epsilon_first,
            self.epsilon_ratio,
            self.epsilon_count,
        );
        q.tau_window = self.tau_window;
        q.grid = self.grid;
        if let Some(order) = self.extrapolation_order {
            q.extrapolation_order = order;
        }
        q.validate()?;
        Ok(q)
    }

    /// Checks every field that a point or a sweep depends on.
    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |m: String| Err(CliError::Config(m));
        for (name, g) in [
            ("gap_a", self.gap_a),
            ("gap_b", self.gap_b),
            ("gap_c", self.gap_c),
        ] {
            if !(g >= 0.0) || !g.is_finite() {
                return bad(format!("{name} must be finite and >= 0, got {g}"));
            }
        }
        if !(self.lambda > 0.0) || !self.lambda.is_finite() {
            return bad(format!(
                "lambda must be finite and > 0, got {}",
                self.lambda
            ));
        }
        if self.outputs.is_empty() {
            return bad("outputs must name at least one quantity".into());
        }
        self.geometry_config()?;
        Ok(())
    }

    pub fn validate_sweep(&self) -> Result<(), CliError> {
        self.validate()?;
        let bad = |m: String| Err(CliError::Config(m));
        if self.steps < 2 {
            return bad(format!("steps must be >= 2, got {}", self.steps));
        }
        if !(self.start < self.stop) || !self.stop.is_finite() {
            return bad(format!(
                "need start < stop, got {} and {}",
                self.start, self.stop
            ));
        }
        let floor_ok = match self.axis {
            Axis::Separation => self.start > 0.0,
            _ => self.start >= 0.0,
        };
        if !floor_ok {
            return bad(format!(
                "start {} is outside the {} domain",
                self.start, self.axis
            ));
        }
        if self.geometry == GeometryChoice::General
            && matches!(self.axis, Axis::Separation | Axis::BoundaryDistance)
        {
            return bad(format!(
                "axis {} needs the parallel or orthogonal geometry",
                self.axis
            ));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        let c = RunConfig::default();
        c.validate_sweep().unwrap();
        c.quadrature().unwrap();
    }

    #[test]
    fn toml_round_trip() {
        let text = r#"
geometry = "orthogonal"
gap_a = 0.1
gap_b = 0.2
gap_c = 0.3
separation = 2.0
boundary_distance = 0.5
lambda = 0.01
axis = "gapBC_grid"
start = 0.1
stop = 2.0
steps = 5
outputs = ["C_l1", "abs_X_AB", "P_A"]
"#;
        let c = RunConfig::from_toml_str(text).unwrap();
        assert_eq!(c.geometry, GeometryChoice::Orthogonal);
        assert_eq!(c.axis, Axis::GapGrid);
        assert_eq!(c.outputs, vec![Output::Coherence, Output::XAB, Output::PA]);
        assert_eq!(c.lambda, 0.01);
        let again = RunConfig::from_toml_str(&toml::to_string(&c).unwrap()).unwrap();
        assert_eq!(again, c);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(RunConfig::from_toml_str("gap_d = 1.0").is_err());
    }

    #[test]
    fn sweep_ranges_are_checked() {
        let mut c = RunConfig {
            steps: 1,
            ..RunConfig::default()
        };
        assert!(c.validate_sweep().is_err());
        c.steps = 3;
        c.start = 2.0;
        c.stop = 1.0;
        assert!(c.validate_sweep().is_err());
        c.start = 0.0;
        assert!(c.validate_sweep().is_err(), "L = 0 is not a separation");
        c.axis = Axis::BoundaryDistance;
        c.validate_sweep().unwrap();
        c.gap_b = -0.1;
        assert!(c.validate_sweep().is_err());
    }

    #[test]
    fn general_geometry_needs_positions() {
        let mut c = RunConfig {
            geometry: GeometryChoice::General,
            ..RunConfig::default()
        };
        assert!(c.validate().is_err());
        c.position_a = Some([0.0, 0.0, 1.0]);
        c.position_b = Some([1.0, 0.0, 1.0]);
        c.position_c = Some([0.0, 1.0, 2.0]);
        c.validate().unwrap();
        c.axis = Axis::Separation;
        assert!(c.validate_sweep().is_err());
        c.axis = Axis::GapC;
        c.validate_sweep().unwrap();
    }

    #[test]
    fn grid_points_are_row_major() {
        let c = RunConfig {
            axis: Axis::GapGrid,
            start: 0.0,
            stop: 1.0,
            steps: 3,
            ..RunConfig::default()
        };
        let p = c.axis_points();
        assert_eq!(p.len(), 9);
        assert_eq!(p[1], vec![0.0, 0.5]);
        assert_eq!(p[3], vec![0.5, 0.0]);
        let at = c.at(&p[5]);
        assert_eq!((at.gap_b, at.gap_c), (0.5, 1.0));
    }
}
