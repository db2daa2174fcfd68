//! Batch front-end: each subcommand runs a set of library checks and writes a
//! JSON report (keys sorted) plus, for `verify`, a CSV table of samples.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use ehmoduli_core::contraction::{correspond, Direction};
use ehmoduli_core::exact;
use ehmoduli_core::gauss::{gauss_map, FdImmersion, GaussMapField, Immersion, OrbitImmersion};
use ehmoduli_core::geometry::{degree_estimate, eh_verify, expected_energy_ratio, kappa, EhReport};
use ehmoduli_core::moduli::{boundary_analysis, validate, EquivariantField, ModuliPoint};
use ehmoduli_core::quadrature::fibonacci_grid;
use ehmoduli_core::span::{
    eigenspace_label, gs_span, moduli_ambient_isotypic, moduli_ambient_orbit, SpanKind,
};
use ehmoduli_core::tensor::isotypic_projector;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

pub const OUT_DIR_ENV: &str = "EHMODULI_OUT_DIR";
pub const CSV_HEADER: [&str; 9] = ["z_re", "z_im", "m", "cos_theta", "e", "A11", "A12", "A22", "F"];

#[derive(Debug, Parser)]
#[command(name = "ehmoduli", version, about = "Verification runs for equivariant harmonic maps of the sphere")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Orbit spans, moduli ambient by both methods, isotypic ranks.
    Decompose(Flags),
    /// EH verification, Kahler angle, degree and boundary analysis of one point.
    Verify(Flags),
    /// Down/up correspondence between labels l and l - 1.
    Correspond(Flags),
    /// Gauss map of the orbit immersion of the real form of S^{2(|k|+l)}.
    Gauss(Flags),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Decompose(_) => "decompose",
            Command::Verify(_) => "verify",
            Command::Correspond(_) => "correspond",
            Command::Gauss(_) => "gauss",
        }
    }

    pub fn flags(&self) -> &Flags {
        match self {
            Command::Decompose(f) | Command::Verify(f) | Command::Correspond(f) | Command::Gauss(f) => f,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    /// Rational arithmetic and algebra-action derivatives.
    Exact,
    /// Floating point and finite differences.
    Float,
}

#[derive(Debug, Clone, Args)]
pub struct Flags {
    #[arg(long, allow_hyphen_values = true)]
    pub k: Option<i64>,
    #[arg(long)]
    pub l: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Number of sphere grid points (at least 8).
    #[arg(long)]
    pub grid: Option<usize>,
    /// Operator norm of the seeded random D.
    #[arg(long)]
    pub norm: Option<f64>,
    /// Explicit ambient coordinates of D, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub coords: Option<Vec<f64>>,
    #[arg(long, value_enum)]
    pub backend: Option<Backend>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// JSON file overriding the defaults; flags override the file.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    pub eh: f64,
    pub cos: f64,
    pub cos_holomorphic: f64,
    pub ratio: f64,
    pub degree: f64,
    pub ambient: f64,
    pub boundary: f64,
    pub roundtrip: f64,
    pub norm: f64,
    pub gauss: f64,
    pub gauss_fd: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            eh: 1e-6,
            cos: 1e-6,
            cos_holomorphic: 1e-8,
            ratio: 1e-3,
            degree: 1e-2,
            ambient: 1e-8,
            boundary: 1e-8,
            roundtrip: 1e-8,
            norm: 1e-12,
            gauss: 1e-6,
            gauss_fd: 1e-4,
        }
    }
}

impl Tolerances {
    fn validate(&self) -> Result<()> {
        let all = [
            self.eh,
            self.cos,
            self.cos_holomorphic,
            self.ratio,
            self.degree,
            self.ambient,
            self.boundary,
            self.roundtrip,
            self.norm,
            self.gauss,
            self.gauss_fd,
        ];
        if all.iter().any(|t| !(*t > 0.0)) {
            bail!("tolerances must be positive");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    pub k: i64,
    pub l: usize,
    pub seed: u64,
    pub grid: usize,
    pub norm: f64,
    pub coords: Option<Vec<f64>>,
    pub backend: Backend,
    pub out: Option<PathBuf>,
    pub tolerances: Tolerances,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            k: 2,
            l: 1,
            seed: 0,
            grid: 50,
            norm: 0.5,
            coords: None,
            backend: Backend::Exact,
            out: None,
            tolerances: Tolerances::default(),
        }
    }
}

impl RunConfig {
    pub fn resolve(flags: &Flags) -> Result<Self> {
        let mut cfg = match &flags.config {
            Some(path) => {
                let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
                serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?
            }
            None => RunConfig::default(),
        };
        if let Some(k) = flags.k {
            cfg.k = k;
        }
        if let Some(l) = flags.l {
            cfg.l = l;
        }
        if let Some(s) = flags.seed {
            cfg.seed = s;
        }
        if let Some(g) = flags.grid {
            cfg.grid = g;
        }
        if let Some(n) = flags.norm {
            cfg.norm = n;
        }
        if flags.coords.is_some() {
            cfg.coords = flags.coords.clone();
        }
        if let Some(b) = flags.backend {
            cfg.backend = b;
        }
        if flags.out.is_some() {
            cfg.out = flags.out.clone();
        }
        if cfg.grid < 8 {
            bail!("grid size {} is below 8", cfg.grid);
        }
        cfg.tolerances.validate()?;
        Ok(cfg)
    }

    pub fn out_dir(&self) -> PathBuf {
        self.out
            .clone()
            .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from("."))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub measured: f64,
    pub expected: f64,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub command: String,
    pub config: RunConfig,
    pub checks: Vec<Check>,
    /// Diagnostic quantities that are not pass/fail.
    pub values: BTreeMap<String, Value>,
    pub provenance: Value,
    pub pass: bool,
    pub timestamp: u64,
}

impl Report {
    fn new(command: &str, config: &RunConfig) -> Self {
        Self {
            command: command.to_string(),
            config: config.clone(),
            checks: Vec::new(),
            values: BTreeMap::new(),
            provenance: json!({
                "seed": config.seed,
                "version": env!("CARGO_PKG_VERSION"),
                "kappa": kappa(),
            }),
            pass: true,
            timestamp: std::time::SystemTime::now()
                .duration_since(std::time::UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
        }
    }

    /// `|measured - expected| <= tolerance`
    fn check(&mut self, name: impl Into<String>, measured: f64, expected: f64, tolerance: f64) {
        let pass = (measured - expected).abs() <= tolerance;
        self.pass &= pass;
        self.checks.push(Check { name: name.into(), measured, expected, tolerance, pass });
    }

    fn value(&mut self, name: &str, v: impl Serialize) {
        self.values.insert(name.to_string(), serde_json::to_value(v).unwrap_or(Value::Null));
    }

    /// Pretty JSON with lexicographically sorted keys.
    pub fn to_json(&self) -> Result<String> {
        // serde_json's Value map is ordered by key
        let v = serde_json::to_value(self)?;
        Ok(serde_json::to_string_pretty(&v)? + "\n")
    }
}

pub struct Outcome {
    pub report: Report,
    pub rows: Vec<[f64; 9]>,
}

pub fn run(command: &Command) -> Result<Outcome> {
    let cfg = RunConfig::resolve(command.flags())?;
    match command {
        Command::Decompose(_) => cmd_decompose(&cfg).map(|report| Outcome { report, rows: Vec::new() }),
        Command::Verify(_) => cmd_verify(&cfg),
        Command::Correspond(_) => cmd_correspond(&cfg).map(|report| Outcome { report, rows: Vec::new() }),
        Command::Gauss(_) => cmd_gauss(&cfg).map(|report| Outcome { report, rows: Vec::new() }),
    }
}

/// Writes `<command>.json` and, when there are samples, `<command>_samples.csv`.
pub fn write_outputs(outcome: &Outcome, dir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let mut written = Vec::new();
    let json_path = dir.join(format!("{}.json", outcome.report.command));
    std::fs::write(&json_path, outcome.report.to_json()?)?;
    written.push(json_path);
    if !outcome.rows.is_empty() {
        let csv_path = dir.join(format!("{}_samples.csv", outcome.report.command));
        let mut w = csv::Writer::from_path(&csv_path)?;
        w.write_record(CSV_HEADER)?;
        for row in &outcome.rows {
            w.write_record(row.iter().map(|x| format!("{x:.12e}")))?;
        }
        w.flush()?;
        written.push(csv_path);
    }
    Ok(written)
}

/// Real dimension of the moduli ambient by counting isotypic summands.
fn ambient_dim_count(k: i64, l: usize) -> usize {
    let n = eigenspace_label(k, l);
    (l + 1..).take_while(|r| 2 * r <= n).map(|r| 2 * (2 * n - 4 * r + 1)).sum()
}

pub fn cmd_decompose(cfg: &RunConfig) -> Result<Report> {
    let mut report = Report::new("decompose", cfg);
    let (k, l) = (cfg.k, cfg.l);
    let n = eigenspace_label(k, l);
    let tol = &cfg.tolerances;
    let ff = gs_span(k, l, SpanKind::FiberFiber, cfg.seed)?;
    let tf = gs_span(k, l, SpanKind::TangentFiber, cfg.seed)?;
    report.value("label_n", n);
    report.value("gs_span_fiber_fiber_dim", ff.dim());
    report.value("gs_span_tangent_fiber_dim", tf.dim());
    let orbit = moduli_ambient_orbit(k, l, cfg.seed)?;
    let iso = moduli_ambient_isotypic(k, l)?;
    report.value("ambient_dim_orbit", orbit.dim());
    report.value("ambient_dim_isotypic", iso.dim());
    report.check("ambient_dim", iso.dim() as f64, ambient_dim_count(k, l) as f64, 0.0);
    report.check("ambient_method_distance", orbit.distance(&iso), 0.0, tol.ambient);
    let mut ranks = BTreeMap::new();
    for j in 0..=n {
        let m = 2 * j;
        let rank = match cfg.backend {
            Backend::Exact => exact::rank(&exact::isotypic_projector_exact(n, m)),
            Backend::Float => isotypic_projector(n, m)?.rank(),
        };
        ranks.insert(format!("S^{m}"), rank);
        report.check(format!("isotypic_rank_S{m}"), rank as f64, (m + 1) as f64, 0.0);
    }
    report.value("isotypic_ranks", ranks);
    if n >= 1 {
        let kernel = match cfg.backend {
            Backend::Exact => exact::contraction_kernel_dim(n),
            Backend::Float => {
                let c = ehmoduli_core::contraction::contraction_matrix(n)?;
                let s = c.singular_values();
                let tiny = s.iter().filter(|&&x| x < 1e-10 * s.max()).count();
                (n + 1) * (n + 1) - (s.len() - tiny)
            }
        };
        report.check("contraction_kernel_dim", kernel as f64, (2 * n + 1) as f64, 0.0);
    }
    Ok(report)
}

fn moduli_point(cfg: &RunConfig) -> Result<ModuliPoint> {
    let pt = match &cfg.coords {
        Some(c) => ModuliPoint::from_coords(cfg.k, cfg.l, c, None)?,
        None => ModuliPoint::random(cfg.k, cfg.l, cfg.norm, cfg.seed)?,
    };
    let diag = validate(&pt);
    if !diag.in_closure {
        bail!("invalid D: {}", diag.issues.join("; "));
    }
    Ok(pt)
}

fn eh_checks(report: &mut Report, r: &EhReport, tag: &str, k: i64, l: usize, tol: &Tolerances) {
    report.check(format!("{tag}a_deviation"), r.max_a_deviation, 0.0, tol.eh);
    report.check(format!("{tag}conformality"), r.max_conformality_defect, 0.0, tol.eh);
    report.check(format!("{tag}cos_theta_std"), r.cos_std, 0.0, tol.cos);
    let cos_tol = if l == 0 { tol.cos_holomorphic } else { tol.cos };
    report.check(format!("{tag}cos_theta"), r.cos_mean, k as f64 / expected_energy_ratio(k, l), cos_tol);
    report.check(format!("{tag}energy_ratio"), r.energy_ratio, r.expected_ratio, tol.ratio);
}

pub fn cmd_verify(cfg: &RunConfig) -> Result<Outcome> {
    let mut report = Report::new("verify", cfg);
    let pt = moduli_point(cfg)?;
    let grid = fibonacci_grid(cfg.grid);
    let tol = &cfg.tolerances;
    let diag = validate(&pt);
    report.value("op_norm", diag.op_norm);
    report.value("interior", diag.interior);
    let eh = eh_verify(&pt, &grid)?;
    report.value("mu", eh.mu);
    eh_checks(&mut report, &eh, "", cfg.k, cfg.l, tol);
    let field = EquivariantField::moduli(&pt)?;
    let degree = ehmoduli_core::geometry::degree_integral(&field, 24, 48)?;
    report.check("degree", degree, cfg.k as f64, tol.degree);
    let boundary = boundary_analysis(&pt, &grid)?;
    report.value("kernel_dim", boundary.kernel_dim);
    report.value("p", boundary.p);
    if boundary.on_boundary() {
        report.check("fiber_kernel_overlap", boundary.max_fiber_overlap, 0.0, tol.boundary);
        let bound = 2 * (cfg.k.unsigned_abs() as usize + 2 * cfg.l);
        report.check("p_below_bound", (boundary.p < bound) as u8 as f64, 1.0, 0.0);
    }
    let rows = eh
        .samples
        .iter()
        .map(|s| {
            let z = s.z().unwrap_or(num_complex::Complex64::new(f64::INFINITY, 0.0));
            [z.re, z.im, s.m, s.cos_theta, s.e, s.a[(0, 0)], s.a[(0, 1)], s.a[(1, 1)], s.curvature]
        })
        .collect();
    Ok(Outcome { report, rows })
}

pub fn cmd_correspond(cfg: &RunConfig) -> Result<Report> {
    if cfg.l == 0 {
        bail!("correspond needs l >= 1");
    }
    let mut report = Report::new("correspond", cfg);
    let (k, l) = (cfg.k, cfg.l);
    let tol = &cfg.tolerances;
    let pt = moduli_point(cfg)?;
    let down = correspond(pt.d(), k, l, Direction::Down)?;
    let back = correspond(&down, k, l - 1, Direction::Up)?;
    report.check("roundtrip", (back.matrix() - pt.d().matrix()).norm(), 0.0, tol.roundtrip);
    report.check("op_norm_preserved", down.op_norm(), pt.d().op_norm(), tol.norm);
    let grid = fibonacci_grid(cfg.grid);
    let lower = ModuliPoint::new(k, l - 1, down)?;
    eh_checks(&mut report, &eh_verify(&pt, &grid)?, "upper_", k, l, tol);
    eh_checks(&mut report, &eh_verify(&lower, &grid)?, "lower_", k, l - 1, tol);
    Ok(report)
}

pub fn cmd_gauss(cfg: &RunConfig) -> Result<Report> {
    let mut report = Report::new("gauss", cfg);
    let tol = &cfg.tolerances;
    let m = cfg.k.unsigned_abs() as usize + cfg.l;
    let exact_imm = OrbitImmersion::veronese(m)?;
    let fd_imm = FdImmersion::new(exact_imm.clone());
    let (imm, id_tol): (&dyn Immersion, f64) = match cfg.backend {
        Backend::Exact => (&exact_imm, tol.gauss),
        Backend::Float => (&fd_imm, tol.gauss_fd),
    };
    report.value("sphere_dim", 2 * m);
    let points = fibonacci_grid(cfg.grid.min(10).max(8));
    let (mut prop, mut literal, mut corrected, mut shape) = (0f64, 0f64, 0f64, 0f64);
    let mut a_diag = 0.0;
    for p in &points {
        let s = gauss_map(imm, p)?;
        prop = prop.max(s.proportionality_defect);
        literal = literal.max(s.literal_residual);
        corrected = corrected.max(s.corrected_residual);
        shape = shape.max((s.shape_n + nalgebra::Matrix2::identity() * 2.0).norm());
        a_diag = s.a[(0, 0)];
    }
    report.value("a_diagonal", a_diag);
    report.value("corrected_identity_residual", corrected);
    report.check("a_proportional", prop, 0.0, id_tol);
    report.check("shape_operator_of_n", shape, 0.0, id_tol);
    report.check("identity_residual", literal, 0.0, id_tol);
    let degree = degree_estimate(&GaussMapField(&exact_imm), 24, 48)?;
    report.check("gauss_map_degree", degree.value, 2.0, tol.degree);
    Ok(report)
}
