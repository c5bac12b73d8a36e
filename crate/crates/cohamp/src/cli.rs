//! Command-line front end: emits the data behind every machine figure as
//! CSV, plus single-shot steady-state reports and a property-scan validator.
//!
//! Output is deterministic: identical config and seed produce byte-identical
//! files regardless of thread count. Floats are written with 17 significant
//! digits ('.' decimal separator, LF line endings), which round-trips f64
//! exactly.
//!
//! Exit codes: 0 success, 1 invalid configuration, 2 regime violation under
//! `--strict`, 3 numerical failure.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::benchlab::{self, ThetaFamilyParams};
use crate::cascade;
use crate::error::{Error, Result};
use crate::machine::{MachineParams, solve_steady_state, validate_regime};
use crate::qstate::{C64, DensityMatrix, trace_distance};
use crate::thermo::{FlowReport, flow_report};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_REGIME: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

/// Thread-count override honored when `--threads` is absent.
pub const THREADS_ENV: &str = "COHAMP_THREADS";

fn default_output() -> PathBuf {
    PathBuf::from("out")
}

/// Input atom state: bias `delta = p1 - p0` and coherence `c = <0|rho|1>`.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct AtomConfig {
    pub delta: f64,
    pub re_c: f64,
    pub im_c: f64,
}

impl Default for AtomConfig {
    fn default() -> Self {
        Self { delta: -0.6, re_c: 0.2, im_c: 0.0 }
    }
}

impl AtomConfig {
    pub fn state(&self) -> Result<DensityMatrix> {
        let purity = self.delta * self.delta + 4.0 * (self.re_c * self.re_c + self.im_c * self.im_c);
        if purity > 1.0 + 1e-12 {
            return Err(Error::Config(format!(
                "atom state not positive: delta^2 + 4|c|^2 = {purity:.6} > 1"
            )));
        }
        DensityMatrix::qubit(self.delta, C64::new(self.re_c, self.im_c))
            .map_err(|e| Error::Config(format!("atom state: {e}")))
    }
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(default)]
pub struct SweepConfig {
    pub beta2_over_beta1_min: f64,
    pub beta2_over_beta1_max: f64,
    pub points: usize,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self { beta2_over_beta1_min: 0.05, beta2_over_beta1_max: 1.0, points: 39 }
    }
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(default)]
pub struct BlochMapConfig {
    /// Grid points per axis over [-1, 1].
    pub resolution: usize,
    /// Grid points outside this Bloch radius are skipped (the closed-form
    /// entropy rates diverge on the pure-state rim).
    pub max_radius: f64,
}

impl Default for BlochMapConfig {
    fn default() -> Self {
        Self { resolution: 41, max_radius: 0.98 }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default)]
pub struct TrajectoriesConfig {
    pub stages: usize,
    /// Every `stride`-th stage is written (stage 0 and the last always are).
    pub stride: usize,
    pub initials: Vec<AtomConfig>,
}

impl Default for TrajectoriesConfig {
    fn default() -> Self {
        Self {
            stages: 1200,
            stride: 1,
            initials: vec![
                AtomConfig { delta: -0.6, re_c: 0.2, im_c: 0.0 },
                AtomConfig { delta: -0.2, re_c: 0.35, im_c: 0.0 },
                AtomConfig { delta: 0.4, re_c: 0.3, im_c: 0.0 },
                AtomConfig { delta: -0.8, re_c: 0.0, im_c: 0.0 },
                AtomConfig { delta: 0.7, re_c: 0.0, im_c: 0.0 },
            ],
        }
    }
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(default)]
pub struct AppendixConfig {
    pub curve_points: usize,
    pub theta_points: usize,
    /// Coherence parameter of the stage-diagram example state.
    pub stage_c: f64,
}

impl Default for AppendixConfig {
    fn default() -> Self {
        Self { curve_points: 101, theta_points: 90, stage_c: 0.35 }
    }
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(default)]
pub struct ValidateConfig {
    pub draws: usize,
}

impl Default for ValidateConfig {
    fn default() -> Self {
        Self { draws: 1000 }
    }
}

/// Full run configuration. Every field has a default (the reference
/// operating point), so a config file may specify any subset.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    pub machine: MachineParams,
    pub atom: AtomConfig,
    pub sweep: SweepConfig,
    pub bloch_map: BlochMapConfig,
    pub trajectories: TrajectoriesConfig,
    pub appendix: AppendixConfig,
    pub validate: ValidateConfig,
    pub output: PathBuf,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            machine: MachineParams::reference(),
            atom: AtomConfig::default(),
            sweep: SweepConfig::default(),
            bloch_map: BlochMapConfig::default(),
            trajectories: TrajectoriesConfig::default(),
            appendix: AppendixConfig::default(),
            validate: ValidateConfig::default(),
            output: default_output(),
            seed: 7,
        }
    }
}

impl RunConfig {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        let cfg: Self = serde_json::from_str(&text)
            .map_err(|e| Error::Config(format!("cannot parse {}: {e}", path.display())))?;
        cfg.check()?;
        Ok(cfg)
    }

    pub fn check(&self) -> Result<()> {
        self.machine.validate().map_err(|e| Error::Config(e.to_string()))?;
        self.atom.state()?;
        if self.sweep.points < 2 {
            return Err(Error::Config("sweep needs at least 2 points".into()));
        }
        if !(self.sweep.beta2_over_beta1_min > 0.0)
            || !(self.sweep.beta2_over_beta1_max > self.sweep.beta2_over_beta1_min)
        {
            return Err(Error::Config("sweep bounds must satisfy 0 < min < max".into()));
        }
        if self.bloch_map.resolution < 3 {
            return Err(Error::Config("bloch-map resolution must be >= 3".into()));
        }
        if !(self.bloch_map.max_radius > 0.0 && self.bloch_map.max_radius <= 1.0) {
            return Err(Error::Config("bloch-map max radius must lie in (0, 1]".into()));
        }
        if self.trajectories.stride == 0 {
            return Err(Error::Config("trajectory stride must be >= 1".into()));
        }
        if self.trajectories.initials.is_empty() {
            return Err(Error::Config("trajectories need at least one initial state".into()));
        }
        for a in &self.trajectories.initials {
            a.state()?;
        }
        if self.appendix.curve_points < 2 || self.appendix.theta_points < 2 {
            return Err(Error::Config("appendix grids need at least 2 points".into()));
        }
        if self.appendix.stage_c.abs() > 0.5 {
            return Err(Error::Config("stage_c must lie in [-1/2, 1/2]".into()));
        }
        if self.validate.draws == 0 {
            return Err(Error::Config("validate needs at least 1 draw".into()));
        }
        Ok(())
    }
}

/// 17 significant digits: exact round trip for f64.
fn fmt(v: f64) -> String {
    format!("{v:.16e}")
}

fn write_csv(path: &Path, header: &str, rows: &[String]) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    let mut w = std::io::BufWriter::new(fs::File::create(path)?);
    w.write_all(header.as_bytes())?;
    w.write_all(b"\n")?;
    for row in rows {
        w.write_all(row.as_bytes())?;
        w.write_all(b"\n")?;
    }
    Ok(())
}

fn revalidated_flow_row(prefix: &str, report: &FlowReport) -> Result<String> {
    report.validate()?;
    Ok(format!(
        "{prefix},{},{},{},{},{},{}",
        fmt(report.cdot_a),
        fmt(report.cdot_max),
        fmt(report.sdot_tot),
        fmt(report.qdot1),
        fmt(report.qdot2),
        fmt(report.edot_a),
    ))
}

#[derive(Serialize)]
struct SteadyStateRecord {
    pi00: f64,
    pi01: f64,
    pi10: f64,
    pi11: f64,
    pi_v_re: f64,
    pi_v_im: f64,
    pi_v_abs: f64,
    residual: f64,
    beta_v: f64,
    machine: MachineParams,
    atom: AtomConfig,
}

/// `steady-state`: key-value text block to stdout, JSON record to
/// `steady_state.json`.
pub fn cmd_steady_state(cfg: &RunConfig, out: &mut (impl std::io::Write + Send)) -> Result<()> {
    let atom = cfg.atom.state()?;
    let ss = solve_steady_state(&cfg.machine, &atom)?;
    let record = SteadyStateRecord {
        pi00: ss.pi00,
        pi01: ss.pi01,
        pi10: ss.pi10,
        pi11: ss.pi11,
        pi_v_re: ss.pi_v.re,
        pi_v_im: ss.pi_v.im,
        pi_v_abs: ss.pi_v.norm(),
        residual: ss.residual,
        beta_v: cfg.machine.virtual_temperature(),
        machine: cfg.machine,
        atom: cfg.atom,
    };
    writeln!(out, "pi00      = {}", fmt(record.pi00))?;
    writeln!(out, "pi01      = {}", fmt(record.pi01))?;
    writeln!(out, "pi10      = {}", fmt(record.pi10))?;
    writeln!(out, "pi11      = {}", fmt(record.pi11))?;
    writeln!(out, "pi_v_re   = {}", fmt(record.pi_v_re))?;
    writeln!(out, "pi_v_im   = {}", fmt(record.pi_v_im))?;
    writeln!(out, "pi_v_abs  = {}", fmt(record.pi_v_abs))?;
    writeln!(out, "residual  = {}", fmt(record.residual))?;
    writeln!(out, "beta_v    = {}", fmt(record.beta_v))?;
    fs::create_dir_all(&cfg.output)?;
    let path = cfg.output.join("steady_state.json");
    let json = serde_json::to_string_pretty(&record)
        .map_err(|e| Error::Numerical(format!("serialize record: {e}")))?;
    fs::write(path, json + "\n")?;
    Ok(())
}

/// `sweep`: flows against the bath temperature ratio, `sweep.csv`.
pub fn cmd_sweep(cfg: &RunConfig) -> Result<()> {
    let atom = cfg.atom.state()?;
    let s = &cfg.sweep;
    let ratios: Vec<f64> = (0..s.points)
        .map(|i| {
            s.beta2_over_beta1_min
                + (s.beta2_over_beta1_max - s.beta2_over_beta1_min) * i as f64
                    / (s.points - 1) as f64
        })
        .collect();
    let rows = ratios
        .par_iter()
        .map(|&ratio| {
            let mut p = cfg.machine;
            p.beta2 = ratio * p.beta1;
            let report = flow_report(&p, &atom)?;
            revalidated_flow_row(&fmt(ratio), &report)
        })
        .collect::<Result<Vec<_>>>()?;
    write_csv(
        &cfg.output.join("sweep.csv"),
        "beta2_over_beta1,Cdot_a,Cdot_max,Sdot_tot,Qdot1,Qdot2,Edot_a",
        &rows,
    )
}

/// `bloch-map`: the coherence rate over the (x, z) Bloch disk,
/// `bloch_map.csv`, plus the zero-contour bracketing cells in
/// `bloch_map_contour.csv`.
pub fn cmd_bloch_map(cfg: &RunConfig) -> Result<()> {
    let n = cfg.bloch_map.resolution;
    let rmax2 = cfg.bloch_map.max_radius * cfg.bloch_map.max_radius;
    let coord = |i: usize| -1.0 + 2.0 * i as f64 / (n - 1) as f64;
    let mut points = Vec::new();
    for ix in 0..n {
        for iz in 0..n {
            let (x, z) = (coord(ix), coord(iz));
            if x * x + z * z <= rmax2 {
                points.push((ix, iz, x, z));
            }
        }
    }
    let values = points
        .par_iter()
        .map(|&(_, _, x, z)| {
            let atom = AtomConfig { delta: z, re_c: x / 2.0, im_c: 0.0 }.state()?;
            let report = flow_report(&cfg.machine, &atom)?;
            report.validate()?;
            Ok(report.cdot_a)
        })
        .collect::<Result<Vec<_>>>()?;

    let rows: Vec<String> = points
        .iter()
        .zip(&values)
        .map(|(&(_, _, x, z), &c)| format!("{},{},{}", fmt(x), fmt(z), fmt(c)))
        .collect();
    write_csv(&cfg.output.join("bloch_map.csv"), "x,z,Cdot_a", &rows)?;

    // Cells whose endpoints straddle Cdot_a = 0 bracket the contour.
    let mut index = std::collections::HashMap::new();
    for (k, &(ix, iz, _, _)) in points.iter().enumerate() {
        index.insert((ix, iz), k);
    }
    let mut contour = Vec::new();
    for (k, &(ix, iz, x, z)) in points.iter().enumerate() {
        for (jx, jz) in [(ix + 1, iz), (ix, iz + 1)] {
            if let Some(&k2) = index.get(&(jx, jz)) {
                let (_, _, x2, z2) = points[k2];
                if values[k] * values[k2] < 0.0 {
                    contour.push(format!(
                        "{},{},{},{},{},{}",
                        fmt(x),
                        fmt(z),
                        fmt(values[k]),
                        fmt(x2),
                        fmt(z2),
                        fmt(values[k2])
                    ));
                }
            }
        }
    }
    write_csv(
        &cfg.output.join("bloch_map_contour.csv"),
        "x_a,z_a,Cdot_a_a,x_b,z_b,Cdot_a_b",
        &contour,
    )
}

/// `trajectories`: Bloch coordinates and kick magnitude along machine
/// arrays, one block per initial state, fixed-point row appended with
/// `state_index = -1`.
pub fn cmd_trajectories(cfg: &RunConfig) -> Result<()> {
    let p = cfg.machine;
    let t = &cfg.trajectories;
    let phi2 = p.phi * p.phi;
    if !(phi2 > 0.0) {
        return Err(Error::Config("trajectories need phi > 0".into()));
    }
    let blocks = t
        .initials
        .par_iter()
        .enumerate()
        .map(|(idx, a0)| {
            let traj = cascade::propagate(&a0.state()?, &p, t.stages)?;
            let mut rows = Vec::new();
            let n = traj.states.len() - 1;
            for (s, state) in traj.states.iter().enumerate() {
                if s % t.stride != 0 && s != n {
                    continue;
                }
                let kick = if s < n {
                    trace_distance(&traj.states[s + 1], state) / phi2
                } else {
                    cascade::kick_magnitude(state, &p)?
                };
                rows.push(format!(
                    "{idx},{s},{},{},{}",
                    fmt(2.0 * state.coherence().re),
                    fmt(state.bias()),
                    fmt(kick)
                ));
            }
            Ok(rows)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut rows: Vec<String> = blocks.into_iter().flatten().collect();
    let fp = cascade::fixed_point(&p)?;
    rows.push(format!(
        "-1,-1,{},{},{}",
        fmt(2.0 * fp.coherence().re),
        fmt(fp.bias()),
        fmt(cascade::kick_magnitude(&fp, &p)?)
    ));
    write_csv(&cfg.output.join("trajectories.csv"), "state_index,stage,x,z,kick", &rows)
}

/// `appendix`: the two-qubit identity bundle: stage diagram, coherence
/// increase curve with its root, and the amplification-ratio curves.
pub fn cmd_appendix(cfg: &RunConfig) -> Result<()> {
    let a = &cfg.appendix;

    let rho_a = benchlab::biased_state(0.0, C64::new(a.stage_c, 0.0))?;
    let rho_b = benchlab::biased_state(-1.0, C64::new(0.0, 0.0))?;
    let n_op = crate::qstate::ComplexMatrix::diag(&[0.0, 1.0]);
    let u = benchlab::theta_unitary(std::f64::consts::FRAC_PI_4);
    let d = benchlab::stage_diagram(&rho_a, &rho_b, &u, &n_op, &n_op)?;
    let rows: Vec<String> = (0..4)
        .map(|s| format!("{},{},{}", s + 1, fmt(d.rec_stages[s]), fmt(d.rea_stages[s])))
        .collect();
    write_csv(&cfg.output.join("appendix_stage_diagram.csv"), "stage,rec,rea", &rows)?;

    let rows = (0..a.curve_points)
        .into_par_iter()
        .map(|i| {
            let c = 0.5 * i as f64 / (a.curve_points - 1) as f64;
            Ok(format!("{},{}", fmt(c), fmt(benchlab::delta_c_curve(c)?)))
        })
        .collect::<Result<Vec<_>>>()?;
    write_csv(&cfg.output.join("appendix_delta_c.csv"), "c,delta_c", &rows)?;
    let root = benchlab::delta_c_root()?;
    write_csv(&cfg.output.join("appendix_delta_c_root.csv"), "c_root", &[fmt(root)])?;

    let rows = (0..a.theta_points)
        .into_par_iter()
        .map(|i| {
            let theta =
                std::f64::consts::FRAC_PI_2 * (i + 1) as f64 / a.theta_points as f64;
            let fam = ThetaFamilyParams::new(-0.9, 0.8, 1.0, std::f64::consts::FRAC_PI_2, theta)?;
            let (ra, rb) = benchlab::coherence_ratios(&fam)?;
            let (ma, mb) = benchlab::coherence_ratios_matrix(&fam)?;
            if (ra - ma).abs() > 1e-10 || (rb - mb).abs() > 1e-10 {
                return Err(Error::FlowIdentity(format!(
                    "ratio routes disagree at theta = {theta}"
                )));
            }
            Ok(format!("{},{},{}", fmt(theta), fmt(ra), fmt(rb)))
        })
        .collect::<Result<Vec<_>>>()?;
    write_csv(&cfg.output.join("appendix_theta_ratios.csv"), "theta,ratio_a,ratio_b", &rows)
}

/// `validate`: regime warnings plus a seeded random scan of the flow
/// invariants.
pub fn cmd_validate(cfg: &RunConfig, out: &mut (impl std::io::Write + Send)) -> Result<()> {
    let warnings = validate_regime(&cfg.machine);
    for w in &warnings {
        writeln!(out, "warning: {w}")?;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let draws: Vec<(MachineParams, AtomConfig)> =
        (0..cfg.validate.draws).map(|_| random_draw(&mut rng)).collect();
    let failures: Vec<String> = draws
        .par_iter()
        .map(|(p, a)| match flow_report(p, &a.state()?) {
            Ok(report) => match report.validate() {
                Ok(()) => Ok(None),
                Err(e) => Ok(Some(e.to_string())),
            },
            Err(e) => Err(e),
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    writeln!(
        out,
        "validated {} random configurations: {} invariant failures",
        cfg.validate.draws,
        failures.len()
    )?;
    for f in failures.iter().take(5) {
        writeln!(out, "  {f}")?;
    }
    if !failures.is_empty() {
        return Err(Error::FlowIdentity(format!(
            "{} of {} random draws violated a flow invariant",
            failures.len(),
            cfg.validate.draws
        )));
    }
    Ok(())
}

fn random_draw(rng: &mut impl Rng) -> (MachineParams, AtomConfig) {
    let e1 = rng.gen_range(0.5..3.0);
    let e2 = e1 + rng.gen_range(0.3..3.0);
    let beta1 = rng.gen_range(0.2..3.0);
    let beta2 = beta1 * rng.gen_range(0.05..1.0);
    let g0 = rng.gen_range(0.0005..0.01);
    let p = MachineParams {
        e1,
        e2,
        beta1,
        beta2,
        gamma0_1: g0,
        gamma0_2: g0,
        r: rng.gen_range(0.5..5.0),
        phi: rng.gen_range(0.005..0.03),
    };
    let atom = loop {
        let delta = rng.gen_range(-1.0..1.0);
        let re_c = rng.gen_range(-0.5..0.5);
        let im_c = rng.gen_range(-0.5..0.5);
        if delta * delta + 4.0 * (re_c * re_c + im_c * im_c) <= 0.95 {
            break AtomConfig { delta, re_c, im_c };
        }
    };
    (p, atom)
}

#[derive(Parser, Debug)]
#[command(name = "cohamp", version, about = "Two-qubit thermal machine simulator: steady states, coherence flows, cascades")]
pub struct Cli {
    /// JSON config file; flags override file values.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Output directory for emitted files.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,

    /// Escalate regime warnings to exit code 2.
    #[arg(long, global = true)]
    pub strict: bool,

    /// Worker threads (default: COHAMP_THREADS or available parallelism).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[command(flatten)]
    pub overrides: Overrides,

    #[command(subcommand)]
    pub command: Command,
}

/// Machine/atom/grid overrides applied on top of the config file.
#[derive(Args, Debug, Default)]
pub struct Overrides {
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub e1: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub e2: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub beta1: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub beta2: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub gamma0_1: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub gamma0_2: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub rate: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub phi: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub atom_delta: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub atom_re_c: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub atom_im_c: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub beta2_over_beta1_min: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub beta2_over_beta1_max: Option<f64>,
    #[arg(long, global = true)]
    pub sweep_points: Option<usize>,
    #[arg(long, global = true)]
    pub grid_resolution: Option<usize>,
    #[arg(long, global = true)]
    pub stages: Option<usize>,
    #[arg(long, global = true)]
    pub draws: Option<usize>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    /// Solve the machine steady state for the configured atom stream.
    SteadyState,
    /// Flows against the bath temperature ratio (CSV).
    Sweep,
    /// Coherence rate over the atom Bloch disk (CSV).
    BlochMap,
    /// Single-atom trajectories through a machine array (CSV).
    Trajectories,
    /// Two-qubit identity bundle: stage diagram, coherence curve, ratios.
    Appendix,
    /// Regime checks plus a seeded invariant scan.
    Validate,
}

fn apply_overrides(cfg: &mut RunConfig, cli: &Cli) {
    let o = &cli.overrides;
    if let Some(v) = o.e1 {
        cfg.machine.e1 = v;
    }
    if let Some(v) = o.e2 {
        cfg.machine.e2 = v;
    }
    if let Some(v) = o.beta1 {
        cfg.machine.beta1 = v;
    }
    if let Some(v) = o.beta2 {
        cfg.machine.beta2 = v;
    }
    if let Some(v) = o.gamma0_1 {
        cfg.machine.gamma0_1 = v;
    }
    if let Some(v) = o.gamma0_2 {
        cfg.machine.gamma0_2 = v;
    }
    if let Some(v) = o.rate {
        cfg.machine.r = v;
    }
    if let Some(v) = o.phi {
        cfg.machine.phi = v;
    }
    if let Some(v) = o.atom_delta {
        cfg.atom.delta = v;
    }
    if let Some(v) = o.atom_re_c {
        cfg.atom.re_c = v;
    }
    if let Some(v) = o.atom_im_c {
        cfg.atom.im_c = v;
    }
    if let Some(v) = o.beta2_over_beta1_min {
        cfg.sweep.beta2_over_beta1_min = v;
    }
    if let Some(v) = o.beta2_over_beta1_max {
        cfg.sweep.beta2_over_beta1_max = v;
    }
    if let Some(v) = o.sweep_points {
        cfg.sweep.points = v;
    }
    if let Some(v) = o.grid_resolution {
        cfg.bloch_map.resolution = v;
    }
    if let Some(v) = o.stages {
        cfg.trajectories.stages = v;
    }
    if let Some(v) = o.draws {
        cfg.validate.draws = v;
    }
    if let Some(v) = o.seed {
        cfg.seed = v;
    }
    if let Some(v) = &cli.output {
        cfg.output = v.clone();
    }
}

fn thread_count(cli: &Cli) -> usize {
    cli.threads
        .or_else(|| std::env::var(THREADS_ENV).ok().and_then(|v| v.parse().ok()))
        .unwrap_or_else(|| std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1))
        .max(1)
}

/// Dispatches one parsed invocation; used by `main` and by the tests.
pub fn run(cli: &Cli, out: &mut (impl std::io::Write + Send)) -> Result<()> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::from_file(path)?,
        None => RunConfig::default(),
    };
    apply_overrides(&mut cfg, cli);
    cfg.check()?;

    let warnings = validate_regime(&cfg.machine);
    if cli.strict && !warnings.is_empty() {
        for w in &warnings {
            let _ = writeln!(out, "regime violation: {w}");
        }
        return Err(Error::InvalidParams("strict mode: regime violations".into()));
    }

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(thread_count(cli))
        .build()
        .map_err(|e| Error::Numerical(format!("thread pool: {e}")))?;
    pool.install(|| match cli.command {
        Command::SteadyState => cmd_steady_state(&cfg, out),
        Command::Sweep => cmd_sweep(&cfg),
        Command::BlochMap => cmd_bloch_map(&cfg),
        Command::Trajectories => cmd_trajectories(&cfg),
        Command::Appendix => cmd_appendix(&cfg),
        Command::Validate => cmd_validate(&cfg, out),
    })
}

fn classify(err: &Error, strict_regime: bool) -> i32 {
    if strict_regime {
        return EXIT_REGIME;
    }
    match err {
        Error::Config(_) | Error::Io(_) => EXIT_CONFIG,
        Error::InvalidParams(_) => EXIT_CONFIG,
        _ => EXIT_NUMERICAL,
    }
}

/// Entry point used by the binary: parses `argv`, runs, maps errors to exit
/// codes.
pub fn main_entry() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // --help/--version print and succeed; real parse errors are
            // configuration errors.
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let mut out = std::io::stdout();
    match run(&cli, &mut out) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let strict_regime =
                cli.strict && matches!(&e, Error::InvalidParams(msg) if msg.starts_with("strict mode"));
            eprintln!("error: {e}");
            classify(&e, strict_regime)
        }
    }
}
