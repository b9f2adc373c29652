//! Explicit finite-difference solver for the 1D compressible Navier-Stokes
//! system in Lagrangian (mass) coordinates,
//!
//! ```text
//! v_t = u_x,
//! u_t + p_x = mu (u_x / v)_x,
//! c_nu theta_t + p u_x = kappa (theta_x / v)_x + mu u_x^2 / v,
//! ```
//!
//! on a truncated domain with boundary nodes pinned to a wave ansatz (or
//! extrapolated). Second-order central differences in space with fluxes at
//! half-nodes for the divergence terms, three-stage strong-stability-
//! preserving Runge-Kutta in time, time step from the acoustic CFL and the
//! viscous diffusion restriction each step.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::ansatz::AnsatzProfile;
use crate::error::{Error, Result};
use crate::gas::GasParams;

/// Uniform grid of n cells (n + 1 nodes) on [x_min, x_max].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid1D {
    pub x_min: f64,
    pub x_max: f64,
    pub n: usize,
}

impl Grid1D {
    pub fn new(x_min: f64, x_max: f64, n: usize) -> Result<Self> {
        if !(x_max > x_min) {
            return Err(Error::InvalidInput("need x_max > x_min".into()));
        }
        if n < 16 {
            return Err(Error::InvalidInput(format!("need n >= 16 cells, got {n}")));
        }
        Ok(Grid1D { x_min, x_max, n })
    }

    pub fn dx(&self) -> f64 {
        (self.x_max - self.x_min) / self.n as f64
    }

    pub fn node(&self, i: usize) -> f64 {
        self.x_min + i as f64 * self.dx()
    }

    pub fn nodes(&self) -> usize {
        self.n + 1
    }
}

/// Discrete (v, u, theta) samples on the grid nodes at one time.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldState {
    pub t: f64,
    pub grid: Grid1D,
    pub v: Vec<f64>,
    pub u: Vec<f64>,
    pub theta: Vec<f64>,
}

impl FieldState {
    pub fn min_v(&self) -> f64 {
        self.v.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    pub fn min_theta(&self) -> f64 {
        self.theta.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    fn check_positivity(&self, t: f64) -> Result<()> {
        for i in 0..self.grid.nodes() {
            if !(self.v[i] > 0.0) || !self.v[i].is_finite() {
                return Err(Error::PositivityViolation {
                    node: i,
                    x: self.grid.node(i),
                    t,
                    field: "v",
                    value: self.v[i],
                });
            }
            if !(self.theta[i] > 0.0) || !self.theta[i].is_finite() {
                return Err(Error::PositivityViolation {
                    node: i,
                    x: self.grid.node(i),
                    t,
                    field: "theta",
                    value: self.theta[i],
                });
            }
        }
        Ok(())
    }
}

/// Shape of the initial disturbance added on top of the ansatz.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PerturbationKind {
    GaussianBump,
    CompactCosine,
    RandomFourier,
}

/// Initial perturbation (phi_0, psi_0, zeta_0) on (v, u, theta). All shapes
/// decay to zero away from `center` so the far-field data is untouched.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerturbationSpec {
    pub kind: PerturbationKind,
    pub amp_v: f64,
    pub amp_u: f64,
    pub amp_theta: f64,
    pub width: f64,
    pub center: f64,
    #[serde(default)]
    pub seed: u64,
}

impl PerturbationSpec {
    pub fn zero() -> Self {
        PerturbationSpec {
            kind: PerturbationKind::GaussianBump,
            amp_v: 0.0,
            amp_u: 0.0,
            amp_theta: 0.0,
            width: 1.0,
            center: 0.0,
            seed: 0,
        }
    }

    /// Sample the three perturbation profiles on the grid nodes.
    pub fn sample(&self, grid: &Grid1D) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
        let n = grid.nodes();
        let shape: Vec<f64> = match self.kind {
            PerturbationKind::GaussianBump => (0..n)
                .map(|i| {
                    let z = (grid.node(i) - self.center) / self.width;
                    (-z * z).exp()
                })
                .collect(),
            PerturbationKind::CompactCosine => (0..n)
                .map(|i| {
                    let z = (grid.node(i) - self.center) / self.width;
                    if z.abs() < 1.0 {
                        let c = (0.5 * std::f64::consts::PI * z).cos();
                        c * c
                    } else {
                        0.0
                    }
                })
                .collect(),
            PerturbationKind::RandomFourier => {
                let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
                let modes: Vec<(f64, f64)> = (1..=8)
                    .map(|k| {
                        let a: f64 = rng.gen_range(-1.0..1.0);
                        let b: f64 = rng.gen_range(-1.0..1.0);
                        (a / k as f64, b / k as f64)
                    })
                    .collect();
                let raw: Vec<f64> = (0..n)
                    .map(|i| {
                        let z = (grid.node(i) - self.center) / self.width;
                        let envelope = (-z * z).exp();
                        let mut s = 0.0;
                        for (k, (a, b)) in modes.iter().enumerate() {
                            let arg = (k + 1) as f64 * std::f64::consts::PI * z;
                            s += a * arg.cos() + b * arg.sin();
                        }
                        envelope * s
                    })
                    .collect();
                let peak = raw.iter().fold(0.0f64, |m, x| m.max(x.abs())).max(1e-300);
                raw.iter().map(|x| x / peak).collect()
            }
        };
        let scale = |a: f64| shape.iter().map(|s| a * s).collect::<Vec<f64>>();
        (scale(self.amp_v), scale(self.amp_u), scale(self.amp_theta))
    }
}

/// How the two boundary nodes are closed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryMode {
    PinToAnsatz,
    Extrapolate,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    #[serde(default = "default_cfl")]
    pub cfl_hyperbolic: f64,
    #[serde(default = "default_diff")]
    pub diff_number: f64,
    pub t_end: f64,
    /// Observer callback fires every this many steps (and at start and end).
    #[serde(default = "default_stride")]
    pub output_stride: usize,
    #[serde(default = "default_boundary")]
    pub boundary_mode: BoundaryMode,
}

fn default_cfl() -> f64 {
    0.4
}
fn default_diff() -> f64 {
    0.25
}
fn default_stride() -> usize {
    1
}
fn default_boundary() -> BoundaryMode {
    BoundaryMode::PinToAnsatz
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.cfl_hyperbolic > 0.0 && self.cfl_hyperbolic <= 1.0) {
            return Err(Error::InvalidInput("cfl_hyperbolic must be in (0, 1]".into()));
        }
        if !(self.diff_number > 0.0 && self.diff_number <= 0.5) {
            return Err(Error::InvalidInput("diff_number must be in (0, 0.5]".into()));
        }
        if !self.t_end.is_finite() || self.t_end < 0.0 {
            return Err(Error::InvalidInput("t_end must be finite and >= 0".into()));
        }
        if self.output_stride == 0 {
            return Err(Error::InvalidInput("output_stride must be positive".into()));
        }
        Ok(())
    }
}

/// Sample the ansatz plus perturbation at t = 0. Rejects initial data that
/// loses positivity rather than clamping it.
pub fn initialize(
    ansatz: &impl AnsatzProfile,
    pert: &PerturbationSpec,
    grid: &Grid1D,
) -> Result<FieldState> {
    let n = grid.nodes();
    let (dv, du, dtheta) = pert.sample(grid);
    let mut state = FieldState {
        t: 0.0,
        grid: *grid,
        v: vec![0.0; n],
        u: vec![0.0; n],
        theta: vec![0.0; n],
    };
    for i in 0..n {
        let p = ansatz.eval(grid.node(i), 0.0);
        state.v[i] = p.v + dv[i];
        state.u[i] = p.u + du[i];
        state.theta[i] = p.theta + dtheta[i];
    }
    state.check_positivity(0.0)?;
    Ok(state)
}

/// Time-step size from the acoustic CFL (characteristic speed
/// sqrt(gamma R theta) / v in mass coordinates) and the viscous restriction
/// dt <= diff_number dx^2 / max(mu / v, kappa / (c_nu v)).
pub fn stable_dt(gas: &GasParams, state: &FieldState, cfg: &SolverConfig) -> f64 {
    let dx = state.grid.dx();
    let mut speed_max = 0.0f64;
    let mut diff_max = 0.0f64;
    for i in 0..state.grid.nodes() {
        let c = (gas.gamma * gas.r * state.theta[i]).sqrt() / state.v[i];
        speed_max = speed_max.max(c);
        let nu = (gas.mu / state.v[i]).max(gas.kappa / (gas.c_nu() * state.v[i]));
        diff_max = diff_max.max(nu);
    }
    let dt_h = cfg.cfl_hyperbolic * dx / speed_max;
    let dt_v = cfg.diff_number * dx * dx / diff_max;
    dt_h.min(dt_v)
}

/// Semi-discrete right-hand side on the interior nodes.
fn rhs(
    gas: &GasParams,
    grid: &Grid1D,
    v: &[f64],
    u: &[f64],
    theta: &[f64],
    dv: &mut [f64],
    du: &mut [f64],
    dtheta: &mut [f64],
) {
    let n = grid.nodes();
    let dx = grid.dx();
    let c_nu = gas.c_nu();
    for i in 1..n - 1 {
        let ux_c = (u[i + 1] - u[i - 1]) / (2.0 * dx);
        let p_r = gas.r * theta[i + 1] / v[i + 1];
        let p_l = gas.r * theta[i - 1] / v[i - 1];
        let p_i = gas.r * theta[i] / v[i];
        // Half-node fluxes for the diffusive divergences.
        let v_rh = 0.5 * (v[i] + v[i + 1]);
        let v_lh = 0.5 * (v[i - 1] + v[i]);
        let visc_r = gas.mu * (u[i + 1] - u[i]) / (dx * v_rh);
        let visc_l = gas.mu * (u[i] - u[i - 1]) / (dx * v_lh);
        let heat_r = gas.kappa * (theta[i + 1] - theta[i]) / (dx * v_rh);
        let heat_l = gas.kappa * (theta[i] - theta[i - 1]) / (dx * v_lh);

        dv[i] = ux_c;
        du[i] = -(p_r - p_l) / (2.0 * dx) + (visc_r - visc_l) / dx;
        dtheta[i] =
            (-p_i * ux_c + (heat_r - heat_l) / dx + gas.mu * ux_c * ux_c / v[i]) / c_nu;
    }
    dv[0] = 0.0;
    du[0] = 0.0;
    dtheta[0] = 0.0;
    dv[n - 1] = 0.0;
    du[n - 1] = 0.0;
    dtheta[n - 1] = 0.0;
}

fn apply_boundary(
    state: &mut FieldState,
    ansatz: &impl AnsatzProfile,
    mode: BoundaryMode,
    t: f64,
) {
    let n = state.grid.nodes();
    match mode {
        BoundaryMode::PinToAnsatz => {
            let l = ansatz.eval(state.grid.node(0), t);
            state.v[0] = l.v;
            state.u[0] = l.u;
            state.theta[0] = l.theta;
            let r = ansatz.eval(state.grid.node(n - 1), t);
            state.v[n - 1] = r.v;
            state.u[n - 1] = r.u;
            state.theta[n - 1] = r.theta;
        }
        BoundaryMode::Extrapolate => {
            for f in [&mut state.v, &mut state.u, &mut state.theta] {
                f[0] = 2.0 * f[1] - f[2];
                f[n - 1] = 2.0 * f[n - 2] - f[n - 3];
            }
        }
    }
}

/// One SSP three-stage Runge-Kutta step of size `dt`.
pub fn step(
    state: &mut FieldState,
    gas: &GasParams,
    cfg: &SolverConfig,
    ansatz: &impl AnsatzProfile,
    dt: f64,
) -> Result<()> {
    let n = state.grid.nodes();
    let grid = state.grid;
    let t0 = state.t;
    let mut dv = vec![0.0; n];
    let mut du = vec![0.0; n];
    let mut dth = vec![0.0; n];

    let base_v = state.v.clone();
    let base_u = state.u.clone();
    let base_th = state.theta.clone();

    // Stage 1: w1 = w + dt L(w), at time t0 -> t0 + dt.
    rhs(gas, &grid, &state.v, &state.u, &state.theta, &mut dv, &mut du, &mut dth);
    for i in 0..n {
        state.v[i] += dt * dv[i];
        state.u[i] += dt * du[i];
        state.theta[i] += dt * dth[i];
    }
    apply_boundary(state, ansatz, cfg.boundary_mode, t0 + dt);

    // Stage 2: w2 = 3/4 w + 1/4 (w1 + dt L(w1)), at time t0 + dt/2.
    rhs(gas, &grid, &state.v, &state.u, &state.theta, &mut dv, &mut du, &mut dth);
    for i in 0..n {
        state.v[i] = 0.75 * base_v[i] + 0.25 * (state.v[i] + dt * dv[i]);
        state.u[i] = 0.75 * base_u[i] + 0.25 * (state.u[i] + dt * du[i]);
        state.theta[i] = 0.75 * base_th[i] + 0.25 * (state.theta[i] + dt * dth[i]);
    }
    apply_boundary(state, ansatz, cfg.boundary_mode, t0 + 0.5 * dt);

    // Stage 3: w = 1/3 w + 2/3 (w2 + dt L(w2)), at time t0 + dt.
    rhs(gas, &grid, &state.v, &state.u, &state.theta, &mut dv, &mut du, &mut dth);
    for i in 0..n {
        state.v[i] = base_v[i] / 3.0 + 2.0 / 3.0 * (state.v[i] + dt * dv[i]);
        state.u[i] = base_u[i] / 3.0 + 2.0 / 3.0 * (state.u[i] + dt * du[i]);
        state.theta[i] = base_th[i] / 3.0 + 2.0 / 3.0 * (state.theta[i] + dt * dth[i]);
    }
    state.t = t0 + dt;
    apply_boundary(state, ansatz, cfg.boundary_mode, state.t);

    for i in 0..n {
        if !state.v[i].is_finite() || !state.u[i].is_finite() || !state.theta[i].is_finite() {
            return Err(Error::BlowUp {
                node: i,
                steps: 0,
                t: state.t,
            });
        }
    }
    state.check_positivity(state.t)?;
    Ok(())
}

/// Evolve until `cfg.t_end`, firing `on_observe` at step 0, every
/// `output_stride` steps, and at the final step. Snapshots are taken at the
/// requested times exactly by shortening the step (never by interpolation);
/// they are returned in time order.
pub fn run(
    mut state: FieldState,
    gas: &GasParams,
    cfg: &SolverConfig,
    ansatz: &impl AnsatzProfile,
    snapshot_times: &[f64],
    mut on_observe: impl FnMut(&FieldState, f64),
) -> Result<(Vec<FieldState>, FieldState)> {
    cfg.validate()?;
    gas.validate()?;
    if cfg.t_end < state.t {
        return Err(Error::InvalidInput(format!(
            "t_end = {} precedes the state time {}",
            cfg.t_end, state.t
        )));
    }

    let mut targets: Vec<f64> = snapshot_times
        .iter()
        .cloned()
        .filter(|&s| s >= state.t && s <= cfg.t_end)
        .collect();
    targets.sort_by(|a, b| a.partial_cmp(b).unwrap());
    targets.dedup();

    let mut snapshots = Vec::new();
    let mut next_target = 0;
    let mut steps: u64 = 0;
    let dt_floor = 1e-12;

    while targets.get(next_target) == Some(&state.t) {
        snapshots.push(state.clone());
        next_target += 1;
    }
    on_observe(&state, 0.0);
    let mut last_observed_t = state.t;

    while state.t < cfg.t_end {
        let mut dt = stable_dt(gas, &state, cfg);
        if !(dt > dt_floor) {
            return Err(Error::BlowUp {
                node: 0,
                steps,
                t: state.t,
            });
        }
        if let Some(&target) = targets.get(next_target) {
            if state.t + dt >= target {
                dt = target - state.t;
            }
        }
        if state.t + dt > cfg.t_end {
            dt = cfg.t_end - state.t;
        }
        if dt <= 0.0 {
            // A snapshot target coincides with the current time.
            snapshots.push(state.clone());
            next_target += 1;
            continue;
        }
        step(&mut state, gas, cfg, ansatz, dt).map_err(|e| match e {
            Error::BlowUp { node, t, .. } => Error::BlowUp { node, steps, t },
            other => other,
        })?;
        steps += 1;

        while targets.get(next_target).is_some_and(|&s| state.t >= s - 1e-14) {
            snapshots.push(state.clone());
            next_target += 1;
        }
        if steps % cfg.output_stride as u64 == 0 || state.t >= cfg.t_end {
            on_observe(&state, state.t - last_observed_t);
            last_observed_t = state.t;
        }
    }
    Ok((snapshots, state))
}
