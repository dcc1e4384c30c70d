//! Run configuration, read from TOML or JSON.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use moment_core::calculus::{Cycle, QuadratureSpec};
use moment_core::suites::Suite;
use moment_core::surfaces::{FamilySpec, SurfaceFamily};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Sectional curvature of the ambient space form; must match the family.
    pub curvature: f64,
    pub family: FamilySpec,
    /// Cycles to integrate over. Empty means the family's default cycles.
    #[serde(default)]
    pub cycles: Vec<CycleConfig>,
    /// Quadrature for cycles that do not set their own.
    #[serde(default)]
    pub quadrature: QuadratureSpec,
    pub suites: Vec<Suite>,
    /// Per-check tolerance overrides, keyed by check name.
    #[serde(default)]
    pub tolerances: BTreeMap<String, f64>,
    #[serde(default)]
    pub output: OutputConfig,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_sample_points")]
    pub sample_points: usize,
}

fn default_sample_points() -> usize {
    8
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CycleConfig {
    #[serde(flatten)]
    pub shape: CycleShape,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quadrature: Option<QuadratureSpec>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CycleShape {
    /// `u ↦ (u, anchor)` over one period of `u`.
    CoordinateU { anchor: f64 },
    /// `v ↦ (anchor, v)` over one period of `v`.
    CoordinateV { anchor: f64 },
    /// Counterclockwise square in the parameter domain.
    Square { center: [f64; 2], side: f64 },
    /// Counterclockwise circle in the parameter domain.
    Circle { center: [f64; 2], radius: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: PathBuf,
    pub report: String,
    pub periods: String,
    pub summary: String,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            dir: PathBuf::from("cmc-moment-out"),
            report: "report.json".into(),
            periods: "periods.csv".into(),
            summary: "summary.txt".into(),
        }
    }
}

impl RunConfig {
    /// Parses JSON if the file ends in `.json` or starts with `{`, TOML otherwise.
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        let json =
            path.extension().is_some_and(|e| e == "json") || text.trim_start().starts_with('{');
        if json {
            serde_json::from_str(&text)
                .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
        } else {
            toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
        }
    }

    /// Checks the invariants and builds the family and cycles.
    pub fn resolve(&self) -> Result<(SurfaceFamily, Vec<Cycle>, QuadratureSpec), CliError> {
        let bad = |m: String| Err(CliError::Config(m));
        let family_k = self.family.curvature();
        if (family_k - self.curvature).abs() > 1e-12 * self.curvature.abs().max(1.0) {
            return bad(format!(
                "family `{}` lives in K = {family_k}, config says curvature = {}",
                self.family.name(),
                self.curvature
            ));
        }
        if self.suites.is_empty() {
            return bad("no suite selected".into());
        }
        if self.sample_points == 0 {
            return bad("sample_points must be positive".into());
        }
        for (name, tol) in &self.tolerances {
            if !(tol.is_finite() && *tol >= 0.0) {
                return bad(format!(
                    "tolerance `{name}` must be finite and nonnegative, got {tol}"
                ));
            }
        }
        let family =
            SurfaceFamily::new(self.family.clone()).map_err(|e| CliError::Config(e.to_string()))?;
        self.quadrature
            .validate()
            .map_err(|e| CliError::Config(e.to_string()))?;
        // one rule serves every cycle: the finest one requested
        let mut quad = self.quadrature;
        let mut cycles = Vec::new();
        for (i, c) in self.cycles.iter().enumerate() {
            if let Some(q) = c.quadrature {
                q.validate()
                    .map_err(|e| CliError::Config(format!("cycle {i}: {e}")))?;
                quad.order = quad.order.max(q.order);
                quad.panels = quad.panels.max(q.panels);
            }
            cycles.push(
                c.shape
                    .build(&family)
                    .map_err(|m| CliError::Config(format!("cycle {i}: {m}")))?,
            );
        }
        if cycles.is_empty() {
            cycles = moment_core::suites::default_cycles(&family);
        }
        Ok((family, cycles, quad))
    }
}

impl CycleShape {
    fn build(&self, family: &SurfaceFamily) -> Result<Cycle, String> {
        let finite = |x: f64, what: &str| {
            if x.is_finite() {
                Ok(())
            } else {
                Err(format!("{what} must be finite"))
            }
        };
        match *self {
            CycleShape::CoordinateU { anchor } => {
                finite(anchor, "anchor")?;
                let p = family
                    .u_period()
                    .ok_or("u is not periodic for this family")?;
                Ok(Cycle::coordinate_u(anchor, p))
            }
            CycleShape::CoordinateV { anchor } => {
                finite(anchor, "anchor")?;
                let p = family
                    .v_period()
                    .ok_or_else(|| format!("v is not periodic on the {}", family.name()))?;
                Ok(Cycle::coordinate_v(anchor, p))
            }
            CycleShape::Square { center, side } => {
                if !(side > 0.0 && side.is_finite()) {
                    return Err(format!("square side must be positive, got {side}"));
                }
                Ok(Cycle::square(center, side))
            }
            CycleShape::Circle { center, radius } => {
                if !(radius > 0.0 && radius.is_finite()) {
                    return Err(format!("circle radius must be positive, got {radius}"));
                }
                Ok(Cycle::circle(center, radius))
            }
        }
    }
}
