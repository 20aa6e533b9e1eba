//! TOML experiment configuration and the hypothesis guards applied when it
//! is read.
//!
//! ```toml
//! [grid]
//! n = 16
//! box_length = 12.0
//!
//! [physics]
//! charges = [0.5]
//! masses = [1836.0]
//! # epsilon_reg = 1.5   (default: two grid spacings)
//! # epsilon0 = 0.5      (default: smallest initial separation / 8)
//!
//! [init]
//! positions = [[0.0, 0.0, 0.0]]
//! velocities = [[0.01, 0.0, 0.0]]
//!
//! [init.field]
//! kind = "gaussian"
//! center = [0.0, 0.0, 0.0]
//! width = 1.0
//! spinor = [[0.1, 0.0], [0.0, 0.0], [0.0, 0.0], [0.0, 0.0]]
//!
//! [time]
//! T = 0.2
//! dt = 0.025
//! n_slices = 8
//!
//! [solver]
//! mode = "lab"
//! integrator = "fixed_point"
//!
//! [output]
//! every = 1
//! path = "run"
//! ```

use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{gaussian_packet, sobolev_norm, Checkpoint, GridSpec, Space, SpinorField, Vec3};
use crate::newton::CoupledOptions;
use crate::potentials::{Nucleus, CRITICAL_CHARGE};
use crate::propagator::{Frame, PicardOptions, PropagatorPlan};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    pub grid: GridConfig,
    pub physics: PhysicsConfig,
    pub init: InitConfig,
    pub time: TimeConfig,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub n: usize,
    pub box_length: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhysicsConfig {
    pub charges: Vec<f64>,
    pub masses: Vec<f64>,
    pub epsilon_reg: Option<f64>,
    pub epsilon0: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitConfig {
    pub positions: Vec<[f64; 3]>,
    pub velocities: Vec<[f64; 3]>,
    pub field: FieldSpec,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FieldSpec {
    /// `w · e^{-|x-c|²/(2s²)} e^{ip·(x-c)}` with complex spinor weights `w`
    /// given as `[re, im]` pairs.
    Gaussian {
        center: [f64; 3],
        width: f64,
        spinor: [[f64; 2]; 4],
        #[serde(default)]
        momentum: [f64; 3],
    },
    /// A `DNS1` checkpoint, resolved relative to the config file.
    Checkpoint { path: PathBuf },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeConfig {
    #[serde(rename = "T")]
    pub horizon: f64,
    pub dt: f64,
    #[serde(default = "default_slices")]
    pub n_slices: usize,
}

fn default_slices() -> usize {
    8
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Lab,
    Comoving,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Integrator {
    FixedPoint,
    Direct,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    pub mode: Mode,
    pub integrator: Integrator,
    /// Index of the `H^σ` diagnostics and of the time window.
    pub sigma: f64,
    /// `C` in `T ≤ 1/(C(1 + ‖u₀‖²_{H^σ}))`.
    pub window_constant: f64,
    pub velocity_cap: f64,
    pub fixedpoint: FixedPointConfig,
    pub picard: PicardConfig,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            mode: Mode::Lab,
            integrator: Integrator::FixedPoint,
            sigma: 1.25,
            window_constant: 1.0,
            velocity_cap: 0.25,
            fixedpoint: FixedPointConfig::default(),
            picard: PicardConfig::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FixedPointConfig {
    pub tol: f64,
    pub max_outer: usize,
    pub damping: f64,
}

impl Default for FixedPointConfig {
    fn default() -> Self {
        Self { tol: 1e-8, max_outer: 60, damping: 0.5 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PicardConfig {
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for PicardConfig {
    fn default() -> Self {
        Self { tol: 1e-10, max_iter: 60 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    /// Keep every `k`-th time step in the time series.
    pub every: usize,
    /// Run directory, relative to the output root.
    pub path: PathBuf,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self { every: 1, path: PathBuf::from("run") }
    }
}

/// Everything a run needs, built from a checked config.
#[derive(Clone, Debug)]
pub struct Setup {
    pub grid: GridSpec,
    pub u0: SpinorField,
    pub nuclei: Vec<Nucleus>,
    pub horizon: f64,
    pub dt: f64,
    pub integrator: Integrator,
    pub plan: PropagatorPlan,
    pub options: CoupledOptions,
    /// `1/(C(1 + ‖u₀‖²_{H^σ}))`.
    pub window: f64,
    pub every: usize,
}

fn reject(msg: String) -> Error {
    Error::Config(msg)
}

fn vec3(a: [f64; 3]) -> Vec3 {
    Vec3::new(a[0], a[1], a[2])
}

impl SimConfig {
    /// Parses and applies every guard that does not need the initial field.
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: SimConfig = toml::from_str(text).map_err(|e| reject(format!("cannot parse config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path.as_ref())?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| reject(format!("cannot serialize config: {e}")))
    }

    pub fn grid_spec(&self) -> Result<GridSpec> {
        GridSpec::new(self.grid.n, self.grid.box_length).map_err(|e| reject(e.to_string()))
    }

    /// Static checks, each naming the hypothesis it enforces.
    pub fn validate(&self) -> Result<()> {
        let grid = self.grid_spec()?;
        let p = &self.physics;
        let n = p.charges.len();
        if n == 0 {
            return Err(reject("at least one nucleus is required".into()));
        }
        if p.masses.len() != n || self.init.positions.len() != n || self.init.velocities.len() != n {
            return Err(reject(format!(
                "charges ({n}), masses ({}), positions ({}) and velocities ({}) must have equal length",
                p.masses.len(),
                self.init.positions.len(),
                self.init.velocities.len()
            )));
        }
        for (k, z) in p.charges.iter().enumerate() {
            if !(z.abs() < CRITICAL_CHARGE) {
                return Err(reject(format!("hypothesis |Z_k| < sqrt(3)/2 violated: Z_{} = {z}", k + 1)));
            }
        }
        for (k, m) in p.masses.iter().enumerate() {
            if !(*m > 0.0 && m.is_finite()) {
                return Err(reject(format!("nuclear mass m_{} must be positive, got {m}", k + 1)));
            }
        }
        if let Some(e) = p.epsilon_reg {
            if !(e > 0.0 && e.is_finite()) {
                return Err(reject(format!("epsilon_reg must be positive, got {e}")));
            }
        }
        if let Some(e0) = p.epsilon0 {
            if !(e0 > 0.0 && e0.is_finite()) {
                return Err(reject(format!("epsilon0 must be positive, got {e0}")));
            }
            for k in 0..n {
                for l in k + 1..n {
                    let d = grid.min_image(vec3(self.init.positions[k]) - vec3(self.init.positions[l])).norm();
                    if d < 8.0 * e0 * (1.0 - 1e-12) {
                        return Err(reject(format!(
                            "hypothesis min_{{k!=l}} |q_k(0) - q_l(0)| = 8 eps0 (initial separation) violated: \
                             |q_{} - q_{}| = {d} = {:.3} eps0 < 8 eps0 with eps0 = {e0}",
                            k + 1,
                            l + 1,
                            d / e0
                        )));
                    }
                }
            }
        }
        let s = &self.solver;
        if !(s.velocity_cap > 0.0) {
            return Err(reject("velocity_cap must be positive".into()));
        }
        for (k, b) in self.init.velocities.iter().enumerate() {
            let speed = vec3(*b).norm();
            if !(speed <= s.velocity_cap) {
                return Err(reject(format!(
                    "hypothesis |b_k| <= C_1/4 (initial velocity cap {}) violated: |b_{}| = {speed}",
                    s.velocity_cap,
                    k + 1
                )));
            }
        }
        if self.init.positions.iter().chain(&self.init.velocities).flatten().any(|v| !v.is_finite()) {
            return Err(reject("nuclear initial data must be finite".into()));
        }
        let t = &self.time;
        if !(t.horizon > 0.0 && t.horizon.is_finite()) || !(t.dt > 0.0 && t.dt <= t.horizon) || t.n_slices == 0 {
            return Err(reject(format!(
                "time needs T > 0, 0 < dt <= T and n_slices >= 1 (T = {}, dt = {}, n_slices = {})",
                t.horizon, t.dt, t.n_slices
            )));
        }
        if !(0.0..1.5).contains(&s.sigma) {
            return Err(reject(format!("sigma must lie in [0, 3/2), got {}", s.sigma)));
        }
        if !(s.window_constant > 0.0) {
            return Err(reject("window_constant must be positive".into()));
        }
        let fp = &s.fixedpoint;
        if !(fp.tol > 0.0) || fp.max_outer == 0 || !(fp.damping > 0.0 && fp.damping <= 1.0) {
            return Err(reject("fixedpoint needs tol > 0, max_outer >= 1 and damping in (0, 1]".into()));
        }
        if !(s.picard.tol > 0.0) || s.picard.max_iter == 0 {
            return Err(reject("picard needs tol > 0 and max_iter >= 1".into()));
        }
        if s.mode == Mode::Comoving && n != 1 {
            return Err(reject("the comoving frame is defined for a single nucleus only".into()));
        }
        if self.output.every == 0 {
            return Err(reject("output.every must be at least 1".into()));
        }
        if let FieldSpec::Gaussian { width, spinor, center, momentum } = &self.init.field {
            if !(*width > 0.0) {
                return Err(reject(format!("gaussian width must be positive, got {width}")));
            }
            if spinor.iter().flatten().chain(center).chain(momentum).any(|v| !v.is_finite()) {
                return Err(reject("gaussian parameters must be finite".into()));
            }
        }
        Ok(())
    }

    pub fn nuclei(&self) -> Result<Vec<Nucleus>> {
        (0..self.physics.charges.len())
            .map(|k| {
                Nucleus::new(
                    self.physics.charges[k],
                    self.physics.masses[k],
                    vec3(self.init.positions[k]),
                    vec3(self.init.velocities[k]),
                )
                .map_err(|e| reject(e.to_string()))
            })
            .collect()
    }

    /// Builds the initial field, resolving a checkpoint path against `base`.
    pub fn initial_field(&self, base: &Path) -> Result<SpinorField> {
        let grid = self.grid_spec()?;
        match &self.init.field {
            FieldSpec::Gaussian { center, width, spinor, momentum } => {
                let w = spinor.map(|[re, im]| Complex64::new(re, im));
                Ok(gaussian_packet(grid, vec3(*center), *width, vec3(*momentum), w))
            }
            FieldSpec::Checkpoint { path } => {
                let cp = Checkpoint::load(base.join(path))
                    .map_err(|e| reject(format!("cannot read checkpoint {}: {e}", path.display())))?;
                if *cp.field.grid() != grid {
                    return Err(reject(format!(
                        "checkpoint grid (n = {}, L = {}) differs from the configured grid",
                        cp.field.grid().n(),
                        cp.field.grid().box_length()
                    )));
                }
                Ok(cp.field)
            }
        }
    }

    pub fn plan(&self) -> PropagatorPlan {
        PropagatorPlan {
            frame: match self.solver.mode {
                Mode::Lab => Frame::Lab,
                Mode::Comoving => Frame::ComovingSingle,
            },
            n_slices: self.time.n_slices,
            epsilon: self.physics.epsilon_reg,
            sigma: self.solver.sigma,
            ..PropagatorPlan::default()
        }
    }

    /// Builds the run and checks the time window
    /// `T ≤ 1/(C(1 + ‖u₀‖²_{H^σ}))`, which needs the initial field.
    pub fn prepare(&self, base: &Path) -> Result<Setup> {
        self.validate()?;
        let grid = self.grid_spec()?;
        let u0 = self.initial_field(base)?;
        if u0.space() != Space::Position || !u0.is_finite() {
            return Err(reject("initial field must be finite".into()));
        }
        let s = &self.solver;
        let norm = sobolev_norm(&u0, s.sigma)?;
        let window = 1.0 / (s.window_constant * (1.0 + norm * norm));
        if self.time.horizon > window {
            return Err(reject(format!(
                "hypothesis T <= 1/(C(1 + ||u0||^2_H^sigma)) (contraction window) violated: \
                 T = {} > {window:.6e} with C = {}, sigma = {}, ||u0||_H^sigma = {norm:.6e}",
                self.time.horizon, s.window_constant, s.sigma
            )));
        }
        let steps = ((self.time.horizon / self.time.dt - 1e-9).ceil() as usize).max(1);
        let options = CoupledOptions {
            steps,
            theta: s.fixedpoint.damping,
            tolerance: s.fixedpoint.tol,
            max_outer: s.fixedpoint.max_outer,
            picard: PicardOptions {
                steps,
                tolerance: s.picard.tol,
                max_iter: s.picard.max_iter,
                window_constant: s.window_constant,
            },
            velocity_cap: s.velocity_cap,
            eps0: self.physics.epsilon0,
            ..CoupledOptions::default()
        };
        Ok(Setup {
            grid,
            u0,
            nuclei: self.nuclei()?,
            horizon: self.time.horizon,
            dt: self.time.dt,
            integrator: s.integrator,
            plan: self.plan(),
            options,
            window,
            every: self.output.every,
        })
    }
}
