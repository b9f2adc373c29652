//! Monitored functionals of a perturbed run: the relative-entropy total and
//! its initial value C0, the accumulated dissipation functionals G(t) (single
//! contact wave) and D(t) (composite wave), weighted-square integrals against
//! the heat-kernel weight, perturbation norms, level-set measures and
//! decay-rate fits.

use crate::ansatz::AnsatzProfile;
use crate::composite::CompositeAnsatz;
use crate::contact::ContactWave;
use crate::error::{Error, Result};
use crate::gas::{phi_raw, GasParams};
use crate::solver::FieldState;

/// Gaussian heat-kernel weight w(x,t) = (1+t)^{-1/2} exp(-alpha x^2 / (1+t))
/// and its primitive g(x,t); g(+inf, t) = sqrt(pi / alpha) for every t.
#[derive(Debug, Clone, Copy)]
pub struct WeightKernel {
    pub alpha: f64,
}

impl WeightKernel {
    pub fn new(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0) {
            return Err(Error::InvalidInput("alpha must be positive".into()));
        }
        Ok(WeightKernel { alpha })
    }

    pub fn w(&self, x: f64, t: f64) -> f64 {
        (-self.alpha * x * x / (1.0 + t)).exp() / (1.0 + t).sqrt()
    }

    pub fn g(&self, x: f64, t: f64) -> f64 {
        let z = (self.alpha / (1.0 + t)).sqrt() * x;
        // erfc on the left tail keeps g positive far below 1 + erf(z) == 0
        // in floating point.
        let half = 0.5 * (std::f64::consts::PI / self.alpha).sqrt();
        if z >= 0.0 {
            half * (1.0 + erf(z))
        } else {
            half * erfc(-z)
        }
    }

    pub fn g_limit(&self) -> f64 {
        (std::f64::consts::PI / self.alpha).sqrt()
    }
}

/// Error function. Non-alternating Maclaurin form for |z| <= 5, asymptotic
/// complementary expansion beyond; absolute accuracy around 1e-13.
pub fn erf(z: f64) -> f64 {
    let a = z.abs();
    let sign = if z < 0.0 { -1.0 } else { 1.0 };
    if a <= 5.0 {
        // erf(z) = (2/sqrt(pi)) e^{-z^2} sum_k 2^k z^{2k+1} / (2k+1)!!
        let z2 = a * a;
        let mut term = a;
        let mut sum = a;
        for k in 1..200 {
            term *= 2.0 * z2 / (2.0 * k as f64 + 1.0);
            sum += term;
            if term < 1e-18 * sum {
                break;
            }
        }
        sign * 2.0 / std::f64::consts::PI.sqrt() * (-z2).exp() * sum
    } else {
        sign * (1.0 - erfc_asymptotic(a))
    }
}

/// Complementary error function for z >= 0; stays positive down to the
/// underflow of exp(-z^2).
pub fn erfc(z: f64) -> f64 {
    if z < 0.0 {
        return 2.0 - erfc(-z);
    }
    if z <= 5.0 {
        1.0 - erf(z)
    } else {
        erfc_asymptotic(z)
    }
}

fn erfc_asymptotic(z: f64) -> f64 {
    let z2 = z * z;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..12 {
        term *= -(2.0 * k as f64 - 1.0) / (2.0 * z2);
        sum += term;
    }
    (-z2).exp() / (z * std::f64::consts::PI.sqrt()) * sum
}

/// Time cut-off used by the higher-order derivative estimates.
pub fn sigma_tilde(t: f64) -> f64 {
    t.min(1.0)
}

/// Trapezoidal quadrature of nodal values on the state's grid.
fn trapezoid(state: &FieldState, mut f: impl FnMut(usize) -> f64) -> f64 {
    let n = state.grid.nodes();
    let dx = state.grid.dx();
    let mut acc = 0.5 * (f(0) + f(n - 1));
    for i in 1..n - 1 {
        acc += f(i);
    }
    acc * dx
}

/// Relative-entropy total
/// `int ( psi^2/2 + R Theta Phi(v/V) + c_nu Theta Phi(theta/Theta) ) dx`.
/// At t = 0 this is the constant C0.
pub fn relative_entropy_total(
    gas: &GasParams,
    field: &FieldState,
    ansatz: &impl AnsatzProfile,
) -> f64 {
    let c_nu = gas.c_nu();
    trapezoid(field, |i| {
        let a = ansatz.eval(field.grid.node(i), field.t);
        let psi = field.u[i] - a.u;
        0.5 * psi * psi
            + gas.r * a.theta * phi_raw(field.v[i] / a.v)
            + c_nu * a.theta * phi_raw(field.theta[i] / a.theta)
    })
}

/// Pointwise relative-entropy density; nonnegative for positive states.
pub fn relative_entropy_density(
    gas: &GasParams,
    field: &FieldState,
    ansatz: &impl AnsatzProfile,
    i: usize,
) -> f64 {
    let a = ansatz.eval(field.grid.node(i), field.t);
    let psi = field.u[i] - a.u;
    0.5 * psi * psi
        + gas.r * a.theta * phi_raw(field.v[i] / a.v)
        + gas.c_nu() * a.theta * phi_raw(field.theta[i] / a.theta)
}

/// One spatial evaluation of the G(t) integrand groups for a contact run:
/// the quadratic dissipation couplings, the entropy-flux pairing with |U_x|,
/// and the residual pairings.
pub fn g_integrand_total(gas: &GasParams, field: &FieldState, contact: &ContactWave) -> f64 {
    let p_plus = contact.profile.p_plus;
    let inv_gm1 = 1.0 / (gas.gamma - 1.0).abs();
    trapezoid(field, |i| {
        let x = field.grid.node(i);
        let a = contact.eval(x, field.t);
        let (r1, r2) = contact.residuals(x, field.t);
        let (v, u, th) = (field.v[i], field.u[i], field.theta[i]);
        let phi = v - a.v;
        let psi = u - a.u;
        let zeta = th - a.theta;
        let tx2 = a.theta_x * a.theta_x;
        let ux2 = a.u_x * a.u_x;
        let quad = gas.kappa * zeta * zeta * tx2 / (v * th * th * a.theta)
            + gas.kappa * a.theta * phi * phi * tx2 / (v * th * th * a.v * a.v)
            + gas.kappa * (zeta * phi).abs() * tx2 / (v * th * th * a.v)
            + 4.0 * gas.mu * zeta * zeta * ux2 / (v * th * a.theta)
            + gas.mu * (zeta * phi).abs() * ux2 / (v * th * a.v)
            + gas.mu * th * phi * phi * ux2 / (v * a.theta * a.v * a.v);
        let p = gas.r * th / v;
        let flux = (p_plus * phi_raw(a.v / v)
            + p_plus * inv_gm1 * phi_raw(a.theta / th)
            + zeta.abs() / th * (p_plus - p).abs())
            * a.u_x.abs();
        let resid = (psi * r1).abs() + (zeta * r2 / th).abs();
        quad + flux + resid
    })
}

/// One spatial evaluation of the D(t) integrand groups for a composite run.
pub fn d_integrand_total(gas: &GasParams, field: &FieldState, comp: &CompositeAnsatz) -> f64 {
    trapezoid(field, |i| {
        let x = field.grid.node(i);
        let a = comp.eval(x, field.t);
        let (f_src, g_src) = comp.source_terms(x, field.t);
        let state = crate::gas::ThermoState {
            v: field.v[i],
            u: field.u[i],
            theta: field.theta[i],
        };
        let (_, q2) = comp.q_terms(&state, x, field.t);
        let (v, u, th) = (field.v[i], field.u[i], field.theta[i]);
        let phi = v - a.v;
        let psi = u - a.u;
        let zeta = th - a.theta;
        let tx2 = a.theta_x * a.theta_x;
        let ux2 = a.u_x * a.u_x;
        let heat = (gas.kappa * zeta * zeta / (v * th * th * a.theta)
            + gas.kappa * a.theta * phi * phi / (v * th * th * a.v * a.v)
            + gas.kappa * (phi * zeta).abs() / (v * th * th * a.v))
            * tx2;
        // The th/th factor in the first coupling cancels as printed.
        let kinetic = (gas.mu * phi * phi / (v * a.v * a.v)
            + 4.0 * gas.mu * zeta * zeta / (v * th * a.theta)
            + gas.mu * (phi * zeta).abs() / (v * th * a.v))
            * ux2;
        let sources = (f_src * psi).abs() + (g_src * zeta / th).abs();
        heat + kinetic + sources + q2.abs()
    })
}

/// Both sides of the weighted-square estimate: the left integrand
/// `(phi^2 + psi^2 + zeta^2) w^2` and the right integrand
/// `phi_x^2 + psi_x^2 + zeta_x^2` (derivatives of the perturbation by
/// central differences).
pub fn weighted_square_integrands(
    field: &FieldState,
    ansatz: &impl AnsatzProfile,
    kernel: &WeightKernel,
) -> (f64, f64) {
    let n = field.grid.nodes();
    let dx = field.grid.dx();
    let mut pert = vec![(0.0, 0.0, 0.0); n];
    for i in 0..n {
        let a = ansatz.eval(field.grid.node(i), field.t);
        pert[i] = (
            field.v[i] - a.v,
            field.u[i] - a.u,
            field.theta[i] - a.theta,
        );
    }
    let lhs = trapezoid(field, |i| {
        let w = kernel.w(field.grid.node(i), field.t);
        let (p, s, z) = pert[i];
        (p * p + s * s + z * z) * w * w
    });
    let rhs = trapezoid(field, |i| {
        if i == 0 || i == n - 1 {
            return 0.0;
        }
        let dxp = (pert[i + 1].0 - pert[i - 1].0) / (2.0 * dx);
        let dxs = (pert[i + 1].1 - pert[i - 1].1) / (2.0 * dx);
        let dxz = (pert[i + 1].2 - pert[i - 1].2) / (2.0 * dx);
        dxp * dxp + dxs * dxs + dxz * dxz
    });
    (lhs, rhs)
}

/// Perturbation norms: sup, L2 and H1 of (phi, psi, zeta).
pub fn perturbation_norms(field: &FieldState, ansatz: &impl AnsatzProfile) -> (f64, f64, f64) {
    let n = field.grid.nodes();
    let dx = field.grid.dx();
    let mut pert = vec![(0.0, 0.0, 0.0); n];
    let mut sup: f64 = 0.0;
    for i in 0..n {
        let a = ansatz.eval(field.grid.node(i), field.t);
        let p = (
            field.v[i] - a.v,
            field.u[i] - a.u,
            field.theta[i] - a.theta,
        );
        sup = sup.max(p.0.abs()).max(p.1.abs()).max(p.2.abs());
        pert[i] = p;
    }
    let l2sq = trapezoid(field, |i| {
        let (p, s, z) = pert[i];
        p * p + s * s + z * z
    });
    let dxsq = trapezoid(field, |i| {
        if i == 0 || i == n - 1 {
            return 0.0;
        }
        let dp = (pert[i + 1].0 - pert[i - 1].0) / (2.0 * dx);
        let ds = (pert[i + 1].1 - pert[i - 1].1) / (2.0 * dx);
        let dz = (pert[i + 1].2 - pert[i - 1].2) / (2.0 * dx);
        dp * dp + ds * ds + dz * dz
    });
    (sup, l2sq.sqrt(), (l2sq + dxsq).sqrt())
}

/// Measure of the level set { x : theta / Theta > a }.
pub fn omega_measure(field: &FieldState, ansatz: &impl AnsatzProfile, a: f64) -> f64 {
    let dx = field.grid.dx();
    let mut count = 0usize;
    for i in 0..field.grid.nodes() {
        let ans = ansatz.eval(field.grid.node(i), field.t);
        if field.theta[i] / ans.theta > a {
            count += 1;
        }
    }
    count as f64 * dx
}

/// The two positive roots of `y - ln y - 1 = m` bracketing 1, solved by
/// bisection.
pub fn phi_roots(m: f64) -> Result<(f64, f64)> {
    if !(m > 0.0) {
        return Err(Error::InvalidInput("phi_roots needs m > 0".into()));
    }
    let bisect = |mut lo: f64, mut hi: f64, increasing: bool| -> f64 {
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            let val = phi_raw(mid) - m;
            if (val > 0.0) == increasing {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    };
    let lower = bisect(1e-300, 1.0, false);
    let mut hi = 2.0;
    while phi_raw(hi) < m {
        hi *= 2.0;
    }
    let upper = bisect(1.0, hi, true);
    Ok((lower, upper))
}

/// Outcome of a sup-norm decay fit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayFit {
    pub is_decaying: bool,
    pub half_life: Option<f64>,
}

/// Decide decay of a (t, sup-norm) series: the max over the last half of the
/// samples must fall below half the max over the first tenth. The half-life
/// comes from a log-linear fit where the series is positive and shrinking.
pub fn decay_fit(series: &[(f64, f64)]) -> Result<DecayFit> {
    let n = series.len();
    if n < 10 {
        return Err(Error::InsufficientSamples { got: n });
    }
    let t_first = series[0].0;
    let t_last = series[n - 1].0;
    if (1.0 + t_last) < 10.0 * (1.0 + t_first) {
        return Err(Error::InsufficientSamples { got: n });
    }
    let early_max = series[..(n / 10).max(1)]
        .iter()
        .fold(0.0f64, |m, &(_, s)| m.max(s));
    let tail_max = series[n / 2..].iter().fold(0.0f64, |m, &(_, s)| m.max(s));
    let is_decaying = tail_max < 0.5 * early_max;
    let pts: Vec<(f64, f64)> = series
        .iter()
        .filter(|&&(_, s)| s > 0.0)
        .map(|&(t, s)| (t, s.ln()))
        .collect();
    let half_life = if pts.len() >= 2 {
        let slope = crate::rarefaction::least_squares_slope(&pts);
        if slope < 0.0 {
            Some(std::f64::consts::LN_2 / -slope)
        } else {
            None
        }
    } else {
        None
    };
    Ok(DecayFit {
        is_decaying,
        half_life,
    })
}

/// One observer record: a row of the diagnostics CSV.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyReport {
    pub t: f64,
    pub c0_ref: f64,
    pub entropy_total: f64,
    pub g_t: f64,
    pub d_t: f64,
    pub sup_perturbation: f64,
    pub l2_perturbation: f64,
    pub h1_perturbation: f64,
    pub omega2_measure: f64,
    pub sigma_tilde: f64,
    pub weighted_ratio: f64,
}

/// Folds solver snapshots into running functionals. G(t) accumulates for a
/// contact ansatz and D(t) for a composite one; the time quadrature is
/// left-rectangle in the elapsed interval.
pub struct StabilityMonitor<'a> {
    gas: GasParams,
    ansatz: &'a crate::ansatz::Ansatz,
    kernel: Option<WeightKernel>,
    c0_ref: Option<f64>,
    g_t: f64,
    d_t: f64,
    weighted_lhs: f64,
    weighted_rhs: f64,
    pub reports: Vec<EnergyReport>,
}

impl<'a> StabilityMonitor<'a> {
    pub fn new(gas: &GasParams, ansatz: &'a crate::ansatz::Ansatz, kernel: Option<WeightKernel>) -> Self {
        StabilityMonitor {
            gas: *gas,
            ansatz,
            kernel,
            c0_ref: None,
            g_t: 0.0,
            d_t: 0.0,
            weighted_lhs: 0.0,
            weighted_rhs: 0.0,
            reports: Vec::new(),
        }
    }

    /// Record the state; `dt_elapsed` is the time advanced since the last
    /// observation (zero for the initial record).
    pub fn observe(&mut self, field: &FieldState, dt_elapsed: f64) {
        let entropy_total = relative_entropy_total(&self.gas, field, self.ansatz);
        let c0 = *self.c0_ref.get_or_insert(entropy_total);
        if dt_elapsed > 0.0 {
            match self.ansatz {
                crate::ansatz::Ansatz::Contact(w) => {
                    self.g_t += dt_elapsed * g_integrand_total(&self.gas, field, w);
                }
                crate::ansatz::Ansatz::Composite(c) => {
                    self.d_t += dt_elapsed * d_integrand_total(&self.gas, field, c);
                }
            }
            if let Some(kernel) = &self.kernel {
                let (lhs, rhs) = weighted_square_integrands(field, self.ansatz, kernel);
                self.weighted_lhs += dt_elapsed * lhs;
                self.weighted_rhs += dt_elapsed * rhs;
            }
        }
        let (sup, l2, h1) = perturbation_norms(field, self.ansatz);
        self.reports.push(EnergyReport {
            t: field.t,
            c0_ref: c0,
            entropy_total,
            g_t: self.g_t,
            d_t: self.d_t,
            sup_perturbation: sup,
            l2_perturbation: l2,
            h1_perturbation: h1,
            omega2_measure: omega_measure(field, self.ansatz, 2.0),
            sigma_tilde: sigma_tilde(field.t),
            weighted_ratio: self.weighted_lhs / (1.0 + self.weighted_rhs),
        });
    }

    pub fn sup_series(&self) -> Vec<(f64, f64)> {
        self.reports
            .iter()
            .map(|r| (r.t, r.sup_perturbation))
            .collect()
    }
}
