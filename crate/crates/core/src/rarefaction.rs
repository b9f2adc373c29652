//! Smooth approximate rarefaction waves.
//!
//! The characteristic speed rides an exact solution of the inviscid Burgers
//! equation with tanh-smoothed monotone data,
//!
//! ```text
//! w_t + w w_x = 0,   w(x, 0) = (w_r + w_l)/2 + ((w_r - w_l)/2) tanh x,
//! ```
//!
//! solved by the method of characteristics. The fluid state follows from the
//! closed-form inversion of lambda on the isentrope and the rarefaction
//! curve integral.

use crate::ansatz::AnsatzPoint;
use crate::error::{Error, Result};
use crate::gas::{Family, GasParams, ThermoState};
use crate::riemann::rarefaction_u_along_curve;

/// Monotone Burgers data w_l <= w_r; no shocks form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BurgersWave {
    pub w_l: f64,
    pub w_r: f64,
}

impl BurgersWave {
    pub fn new(w_l: f64, w_r: f64) -> Result<Self> {
        if !(w_l.is_finite() && w_r.is_finite()) || w_l > w_r {
            return Err(Error::InvalidInput(format!(
                "need finite w_l <= w_r, got ({w_l}, {w_r})"
            )));
        }
        Ok(BurgersWave { w_l, w_r })
    }

    /// Wave strength w_hat = w_r - w_l.
    pub fn strength(&self) -> f64 {
        self.w_r - self.w_l
    }

    fn w0(&self, y: f64) -> f64 {
        0.5 * (self.w_r + self.w_l) + 0.5 * (self.w_r - self.w_l) * y.tanh()
    }

    fn dw0(&self, y: f64) -> f64 {
        let c = 1.0 / y.cosh();
        0.5 * (self.w_r - self.w_l) * c * c
    }

    fn ddw0(&self, y: f64) -> f64 {
        let c = 1.0 / y.cosh();
        -(self.w_r - self.w_l) * c * c * y.tanh()
    }

    /// Characteristic foot x0 solving x = x0 + w0(x0) t. Safeguarded Newton
    /// inside the bracket [x - w_r t, x - w_l t]; the map is strictly
    /// increasing so the root is unique.
    fn characteristic_foot(&self, x: f64, t: f64, tol: f64) -> Result<f64> {
        if self.strength() == 0.0 {
            return Ok(x - self.w_l * t);
        }
        let mut lo = x - self.w_r * t;
        let mut hi = x - self.w_l * t;
        let mut y = x - 0.5 * (self.w_l + self.w_r) * t;
        for _ in 0..200 {
            let f = y + self.w0(y) * t - x;
            if f.abs() <= tol {
                return Ok(y);
            }
            if f > 0.0 {
                hi = y;
            } else {
                lo = y;
            }
            let fp = 1.0 + self.dw0(y) * t;
            let newton = y - f / fp;
            y = if newton > lo && newton < hi {
                newton
            } else {
                0.5 * (lo + hi)
            };
        }
        Err(Error::ConvergenceFailure(format!(
            "characteristic root stalled at x = {x}, t = {t}"
        )))
    }

    /// (w, w_x) at (x, t), root residual at most `tol`.
    pub fn eval(&self, x: f64, t: f64, tol: f64) -> Result<(f64, f64)> {
        let (w, wx, _) = self.eval_with_curvature(x, t, tol)?;
        Ok((w, wx))
    }

    /// (w, w_x, w_xx): the exact derivative chain of the characteristic map,
    /// w_x = w0'/(1 + w0' t), w_xx = w0''/(1 + w0' t)^3.
    pub fn eval_with_curvature(&self, x: f64, t: f64, tol: f64) -> Result<(f64, f64, f64)> {
        if !(t >= 0.0) || !(tol > 0.0) {
            return Err(Error::InvalidInput("need t >= 0 and tol > 0".into()));
        }
        let y = self.characteristic_foot(x, t, tol)?;
        let j = 1.0 + self.dw0(y) * t;
        Ok((self.w0(y), self.dw0(y) / j, self.ddw0(y) / (j * j * j)))
    }

    /// L^p norm of w_x over the line via the monotone change of variables to
    /// the characteristic foot:
    /// `int |w_x|^p dx = int w0'(y)^p (1 + w0'(y) t)^{1-p} dy`.
    /// For p = infinity (`None`) the maximum is attained at y = 0 and is
    /// closed-form. Truncated where the integrand underflows, with a
    /// doubling-interval tail check.
    pub fn wx_lp_norm(&self, p: Option<f64>, t: f64) -> Result<f64> {
        let wh = self.strength();
        if wh == 0.0 {
            return Ok(0.0);
        }
        match p {
            None => {
                let peak = 0.5 * wh;
                Ok(peak / (1.0 + peak * t))
            }
            Some(p) if p >= 1.0 => {
                let integrand = |y: f64| {
                    let d = self.dw0(y);
                    d.powf(p) * (1.0 + d * t).powf(1.0 - p)
                };
                // w0' ~ wh e^{-2|y|}: find where the integrand is below 1e-16.
                let mut half_width = 8.0f64;
                let mut value = simpson(&integrand, -half_width, half_width, 4096);
                for _ in 0..12 {
                    if integrand(half_width).abs() < 1e-16 && integrand(-half_width).abs() < 1e-16 {
                        break;
                    }
                    let tail = simpson(&integrand, half_width, 2.0 * half_width, 2048)
                        + simpson(&integrand, -2.0 * half_width, -half_width, 2048);
                    value += tail;
                    half_width *= 2.0;
                }
                if integrand(half_width).abs() >= 1e-16 {
                    return Err(Error::QuadratureFailure(
                        "w_x tail did not decay below 1e-16".into(),
                    ));
                }
                Ok(value.powf(1.0 / p))
            }
            Some(p) => Err(Error::InvalidInput(format!("need p >= 1, got {p}"))),
        }
    }
}

fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let n = if n % 2 == 0 { n } else { n + 1 };
    let h = (b - a) / n as f64;
    let mut acc = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(a + i as f64 * h);
    }
    acc * h / 3.0
}

/// Measured L^p rates of the Burgers slope: norms at the sample times plus
/// the log-log slope fitted over the samples. `p = None` encodes p = infinity.
#[derive(Debug, Clone)]
pub struct RateRow {
    pub p: Option<f64>,
    pub norms: Vec<f64>,
    pub slope: f64,
}

/// Measure `||w_x||_{L^p}` at the sample times and fit log-log slopes.
/// Large-time theory gives slope `-1 + 1/p`.
pub fn lp_rate_report(
    wave: &BurgersWave,
    p_exponents: &[Option<f64>],
    t_samples: &[f64],
) -> Result<Vec<RateRow>> {
    if wave.strength() <= 0.0 {
        return Err(Error::InvalidInput(
            "rate report needs a nondegenerate wave".into(),
        ));
    }
    if t_samples.len() < 2 {
        return Err(Error::InsufficientSamples {
            got: t_samples.len(),
        });
    }
    let mut rows = Vec::new();
    for &p in p_exponents {
        let norms: Vec<f64> = t_samples
            .iter()
            .map(|&t| wave.wx_lp_norm(p, t))
            .collect::<Result<_>>()?;
        let pts: Vec<(f64, f64)> = t_samples
            .iter()
            .zip(&norms)
            .filter(|(_, &n)| n > 0.0)
            .map(|(&t, &n)| (t.ln(), n.ln()))
            .collect();
        rows.push(RateRow {
            p,
            norms,
            slope: least_squares_slope(&pts),
        });
    }
    Ok(rows)
}

pub(crate) fn least_squares_slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    (n * sxy - sx * sy) / (n * sxx - sx * sx)
}

/// A smooth approximate rarefaction wave of one characteristic family,
/// anchored at a far-field state and reaching the intermediate volume
/// `target_vm` on the same isentrope.
#[derive(Debug, Clone)]
pub struct RarefactionWave {
    pub family: Family,
    pub anchor: ThermoState,
    pub target_vm: f64,
    pub burgers: BurgersWave,
    pub gas: GasParams,
    root_tol: f64,
}

impl RarefactionWave {
    /// Build the wave. For the 1-family the anchor is the left end state and
    /// w runs from lambda_-(v_-) up to lambda_-(v_-^m); for the 3-family the
    /// anchor is the right end state and w runs from lambda_+(v_+^m) up to
    /// lambda_+(v_+).
    pub fn new(gas: &GasParams, family: Family, anchor: ThermoState, target_vm: f64) -> Result<Self> {
        gas.validate()?;
        if !(target_vm >= anchor.v) {
            return Err(Error::InvalidInput(format!(
                "rarefactions expand: need v^m >= v_anchor, got {target_vm} < {}",
                anchor.v
            )));
        }
        let lam = |v: f64| -> f64 {
            // lambda on the anchor isentrope as an explicit power law.
            let c2 = gas.gamma * gas.r * anchor.theta * anchor.v.powf(gas.gamma - 1.0);
            family.sign() * (c2 * v.powf(-gas.gamma - 1.0)).sqrt()
        };
        let (w_l, w_r) = match family {
            Family::Minus => (lam(anchor.v), lam(target_vm)),
            Family::Plus => (lam(target_vm), lam(anchor.v)),
        };
        let burgers = BurgersWave::new(w_l, w_r)?;
        if burgers.w_l * burgers.w_r < 0.0 {
            return Err(Error::InvalidInput(
                "characteristic speed crosses zero inside one family".into(),
            ));
        }
        Ok(RarefactionWave {
            family,
            anchor,
            target_vm,
            burgers,
            gas: *gas,
            root_tol: 1e-12,
        })
    }

    pub fn strength(&self) -> f64 {
        self.burgers.strength()
    }

    /// (V, U, Theta) with x-derivatives, plus Theta_xx and U_t through the
    /// exact chain rule in w.
    pub fn evaluate(&self, x: f64, t: f64) -> AnsatzPoint {
        if self.strength() == 0.0 {
            return AnsatzPoint {
                v: self.anchor.v,
                u: self.anchor.u,
                theta: self.anchor.theta,
                ..Default::default()
            };
        }
        let (w, w_x, w_xx) = self
            .burgers
            .eval_with_curvature(x, t, self.root_tol)
            .expect("monotone characteristic root cannot fail for valid data");
        let g = &self.gas;
        let gm1 = g.gamma - 1.0;
        // V from lambda(V, s_a) = w: V = (gamma R theta_a v_a^{gamma-1} / w^2)^{1/(gamma+1)}.
        let c2 = g.gamma * g.r * self.anchor.theta * self.anchor.v.powf(gm1);
        let v = (c2 / (w * w)).powf(1.0 / (g.gamma + 1.0));
        let dv_dw = -2.0 / (g.gamma + 1.0) * v / w;
        let ddv_dww = 2.0 * (g.gamma + 3.0) / ((g.gamma + 1.0) * (g.gamma + 1.0)) * v / (w * w);
        let v_x = dv_dw * w_x;
        let v_xx = ddv_dww * w_x * w_x + dv_dw * w_xx;

        let u = rarefaction_u_along_curve(g, self.family, &self.anchor, v)
            .expect("v > 0 on the curve");
        // dU/dV = -lambda(V) = -w, so U_x = -w V_x and U_t = w^2 V_x.
        let u_x = -w * v_x;
        let u_t = w * w * v_x;

        let theta = self.anchor.theta * (self.anchor.v / v).powf(gm1);
        let theta_x = -gm1 * theta * v_x / v;
        let theta_xx = -gm1 * (theta_x * v_x / v + theta * v_xx / v - theta * v_x * v_x / (v * v));

        AnsatzPoint {
            v,
            u,
            theta,
            v_x,
            u_x,
            theta_x,
            theta_xx,
            u_t,
        }
    }
}
