//! Configuration-driven runner for the verification suites.

pub mod config;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use moment_core::calculus::{CycleKind, QuadratureSpec};
use moment_core::suites::{
    default_cycles, killing_labels, period_table, run_all, PeriodRow, Suite, SuiteContext,
    SuiteOutcome,
};
use moment_core::surfaces::{catalog, FamilySpec, SurfaceFamily};
use serde::Serialize;

pub use config::{CycleConfig, CycleShape, OutputConfig, RunConfig};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("run failed: {0}")]
    Run(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Run(_) => 1,
        }
    }
}

/// Command-line adjustments applied on top of the config file.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub out_dir: Option<PathBuf>,
    pub suites: Vec<Suite>,
    pub tolerance_scale: Option<f64>,
}

#[derive(Debug, Serialize)]
pub struct Report {
    pub family: FamilySpec,
    pub curvature: f64,
    pub seed: u64,
    pub quadrature: QuadratureSpec,
    pub tolerance_scale: f64,
    pub passed: bool,
    pub suites: Vec<SuiteOutcome>,
    pub periods: Vec<PeriodRow>,
}

#[derive(Debug)]
pub struct RunOutcome {
    pub report: Report,
    pub summary: String,
    pub out_dir: PathBuf,
}

impl RunOutcome {
    pub fn exit_code(&self) -> u8 {
        if self.report.passed {
            0
        } else {
            1
        }
    }
}

pub fn run(mut cfg: RunConfig, ov: &Overrides) -> Result<RunOutcome, CliError> {
    if let Some(s) = ov.seed {
        cfg.seed = s;
    }
    if let Some(d) = &ov.out_dir {
        cfg.output.dir = d.clone();
    }
    if !ov.suites.is_empty() {
        cfg.suites = ov.suites.clone();
    }
    let scale = ov.tolerance_scale.unwrap_or(1.0);
    if !(scale > 0.0 && scale.is_finite()) {
        return Err(CliError::Config(format!(
            "tolerance scale must be positive, got {scale}"
        )));
    }
    let (family, cycles, quad) = cfg.resolve()?;
    let sf = moment_core::spaceform::SpaceForm::new(family.curvature());
    let ctx = SuiteContext {
        sf,
        family,
        cycles,
        quad,
        seed: cfg.seed,
        sample_points: cfg.sample_points,
        tolerance_scale: scale,
        tolerance_overrides: cfg.tolerances.clone(),
    };
    let run_err = |e: moment_core::GeometryError| CliError::Run(e.to_string());
    let suites = run_all(&ctx, &cfg.suites).map_err(run_err)?;
    let periods = period_table(&ctx).map_err(run_err)?;
    let report = Report {
        family: cfg.family.clone(),
        curvature: cfg.curvature,
        seed: cfg.seed,
        quadrature: quad,
        tolerance_scale: scale,
        passed: suites.iter().all(SuiteOutcome::passed),
        suites,
        periods,
    };
    let summary = summary_text(&report);
    write_outputs(&cfg.output, &report, &summary)?;
    Ok(RunOutcome {
        report,
        summary,
        out_dir: cfg.output.dir.clone(),
    })
}

fn write_outputs(out: &OutputConfig, report: &Report, summary: &str) -> Result<(), CliError> {
    let io =
        |p: &Path, e: std::io::Error| CliError::Run(format!("cannot write {}: {e}", p.display()));
    std::fs::create_dir_all(&out.dir).map_err(|e| io(&out.dir, e))?;
    let json = serde_json::to_string_pretty(report).map_err(|e| CliError::Run(e.to_string()))?;
    for (name, body) in [
        (&out.report, json + "\n"),
        (&out.periods, periods_csv(&report.periods)),
        (&out.summary, summary.to_string()),
    ] {
        let p = out.dir.join(name);
        std::fs::write(&p, body).map_err(|e| io(&p, e))?;
    }
    Ok(())
}

/// One row per cycle, six Killing-basis columns per period group, values
/// with 17 significant digits.
pub fn periods_csv(rows: &[PeriodRow]) -> String {
    let mut s = String::from("cycle,kind,anchor");
    if let Some(first) = rows.first() {
        for (g, _) in &first.groups {
            for l in killing_labels() {
                let _ = write!(s, ",{g}_{l}");
            }
        }
    }
    s.push('\n');
    for r in rows {
        let kind = match r.kind {
            CycleKind::CoordinateU => "coordinate_u",
            CycleKind::CoordinateV => "coordinate_v",
            CycleKind::Parametric => "parametric",
        };
        let anchor = r.anchor.map(|a| format!("{a:.16e}")).unwrap_or_default();
        let _ = write!(s, "{},{kind},{anchor}", r.cycle);
        for (_, vals) in &r.groups {
            for v in vals {
                let _ = write!(s, ",{v:.16e}");
            }
        }
        s.push('\n');
    }
    s
}

pub fn summary_text(r: &Report) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "family {} (K = {}), seed {}, quadrature {}x{}, tolerance scale {}",
        r.family.name(),
        r.curvature,
        r.seed,
        r.quadrature.order,
        r.quadrature.panels,
        r.tolerance_scale
    );
    let (mut total, mut failed) = (0, 0);
    for o in &r.suites {
        let _ = writeln!(
            s,
            "\nsuite {}: {}",
            o.suite,
            if o.passed() { "PASS" } else { "FAIL" }
        );
        for c in &o.checks {
            total += 1;
            if !c.passed {
                failed += 1;
            }
            let _ = write!(
                s,
                "  [{}] {:<36} residual {:.3e}  tolerance {:.1e}",
                if c.passed { "PASS" } else { "FAIL" },
                c.name,
                c.residual,
                c.tolerance
            );
            if let Some(l) = &c.location {
                let _ = write!(s, "  at {l}");
            }
            s.push('\n');
        }
        for n in &o.notes {
            let _ = writeln!(s, "  note: {n}");
        }
    }
    let _ = writeln!(
        s,
        "\noverall: {} ({total} checks, {failed} failed)",
        if r.passed { "PASS" } else { "FAIL" }
    );
    s
}

fn parameter_ranges(spec: &FamilySpec) -> &'static str {
    match spec {
        FamilySpec::Sphere { .. } => {
            "radius > 0 (radius < pi/sqrt(K) when K > 0); curvature any, default 0"
        }
        FamilySpec::Cylinder { .. } => "radius > 0",
        FamilySpec::Unduloid { .. } => "mean_curvature > 0; 0 < necksize < 1/(2 mean_curvature)",
        FamilySpec::ProductTorusS3 { .. } => {
            "curvature > 0, default 1; 0 < radius < 1/sqrt(curvature)"
        }
        FamilySpec::EquidistantTubeH3 { .. } => "curvature < 0, default -1; distance > 0",
        FamilySpec::PerturbedCylinder { .. } => {
            "radius > |amplitude|; not CMC unless amplitude = 0"
        }
    }
}

/// Catalog dump: family, curvature, defaults, parameter ranges, default cycles.
pub fn list_fixtures() -> String {
    let mut s = String::new();
    let mut seen = Vec::new();
    for spec in catalog() {
        let key = (spec.name(), spec.curvature().to_bits());
        if seen.contains(&key) {
            continue;
        }
        seen.push(key);
        let _ = writeln!(s, "{}", spec.name());
        let _ = writeln!(s, "  K = {}", spec.curvature());
        let defaults = serde_json::to_string(&spec).unwrap_or_default();
        let _ = writeln!(s, "  default: {defaults}");
        let _ = writeln!(s, "  ranges: {}", parameter_ranges(&spec));
        match SurfaceFamily::new(spec.clone()) {
            Ok(f) => {
                let cycles: Vec<String> = default_cycles(&f)
                    .iter()
                    .map(|c| {
                        let kind = match c.kind() {
                            CycleKind::CoordinateU => "coordinate_u",
                            CycleKind::CoordinateV => "coordinate_v",
                            CycleKind::Parametric => "parametric",
                        };
                        format!("{kind} anchor {:.6}", c.anchor().unwrap_or(f64::NAN))
                    })
                    .collect();
                let _ = writeln!(s, "  default cycles: {}", cycles.join(", "));
                let _ = writeln!(s, "  cmc: {}", f.is_cmc());
            }
            Err(e) => {
                let _ = writeln!(s, "  unavailable: {e}");
            }
        }
    }
    s
}
