//! Superposition ansatz: smooth 1-rarefaction + viscous contact wave +
//! smooth 3-rarefaction, minus the two intermediate constant states.
//!
//! Assembly normalizes the intermediate velocity to zero by a Galilean
//! shift of the end states and un-shifts on output. The defect terms F, G
//! of the momentum and temperature equations and the entropy-production
//! terms Q1, Q2 are evaluated pointwise; their outer x-derivatives use
//! fourth-order differences on a micro-stencil of analytic component values.

use crate::ansatz::{AnsatzPoint, AnsatzProfile};
use crate::contact::ContactWave;
use crate::error::Result;
use crate::gas::{entropy, phi_raw, Family, GasParams, ThermoState};
use crate::rarefaction::RarefactionWave;
use crate::riemann::{solve_intermediate_states, EndStates, WaveDecomposition};

/// Space-time regions split by the intermediate characteristic speeds: the
/// far fields carry the rarefactions, the central strip carries the contact.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Region {
    MinusFar,
    Central,
    PlusFar,
}

#[derive(Debug, Clone)]
pub struct CompositeAnsatz {
    pub contact: ContactWave,
    pub rare_minus: RarefactionWave,
    pub rare_plus: RarefactionWave,
    pub middles: WaveDecomposition,
    pub gas: GasParams,
    pub ends: EndStates,
}

impl CompositeAnsatz {
    /// Assemble the ansatz for end states in the rarefaction-contact-
    /// rarefaction region, with default contact-profile resolution.
    pub fn new(gas: &GasParams, ends: &EndStates, tol: f64) -> Result<Self> {
        Self::with_contact_resolution(gas, ends, tol, 20.0, 8001)
    }

    pub fn with_contact_resolution(
        gas: &GasParams,
        ends: &EndStates,
        tol: f64,
        xi_max: f64,
        n_points: usize,
    ) -> Result<Self> {
        let middles = solve_intermediate_states(gas, ends, tol)?;
        let shift = middles.u_m;
        let left = ThermoState::new(ends.left.v, ends.left.u - shift, ends.left.theta)?;
        let right = ThermoState::new(ends.right.v, ends.right.u - shift, ends.right.theta)?;
        let rare_minus = RarefactionWave::new(gas, Family::Minus, left, middles.v_m_minus)?;
        let rare_plus = RarefactionWave::new(gas, Family::Plus, right, middles.v_m_plus)?;
        let profile = crate::contact::solve_self_similar(
            gas,
            middles.theta_m_minus,
            middles.theta_m_plus,
            middles.p_m,
            xi_max,
            n_points,
            1e-10,
        )?;
        let contact = ContactWave::with_profile(gas, profile);
        Ok(CompositeAnsatz {
            contact,
            rare_minus,
            rare_plus,
            middles,
            gas: *gas,
            ends: *ends,
        })
    }

    /// Total wave strength |theta_+ - theta_-|.
    pub fn delta(&self) -> f64 {
        self.middles.delta
    }

    pub fn region(&self, x: f64, t: f64) -> Region {
        let (lam_m, lam_p) = self.edge_speeds();
        if 2.0 * x < lam_m * t {
            Region::MinusFar
        } else if 2.0 * x > lam_p * t {
            Region::PlusFar
        } else {
            Region::Central
        }
    }

    /// (lambda_-(v_-^m, s_-), lambda_+(v_+^m, s_+)), the fan edges facing the
    /// contact layer.
    pub fn edge_speeds(&self) -> (f64, f64) {
        (self.rare_minus.burgers.w_r, self.rare_plus.burgers.w_l)
    }

    /// Momentum and temperature defects F, G of the superposition.
    pub fn source_terms(&self, x: f64, t: f64) -> (f64, f64) {
        let g = &self.gas;
        let h = 1e-4 * (1.0 + t).sqrt();

        let p_of = |pt: &AnsatzPoint| g.r * pt.theta / pt.v;
        let cd = self.contact.eval(x, t);
        let rm = self.rare_minus.evaluate(x, t);
        let rp = self.rare_plus.evaluate(x, t);
        let total = self.eval(x, t);

        // F = (P_- + P_+ - P)_x + (mu U_x / V)_x - U_t^cd
        let pressure_sum = |xx: f64| {
            let a = self.rare_minus.evaluate(xx, t);
            let b = self.rare_plus.evaluate(xx, t);
            let c = self.eval(xx, t);
            p_of(&a) + p_of(&b) - p_of(&c)
        };
        let visc_flux = |xx: f64| {
            let c = self.eval(xx, t);
            g.mu * c.u_x / c.v
        };
        let f_term = derivative4(&pressure_sum, x, h) + derivative4(&visc_flux, x, h) - cd.u_t;

        // G = (p^m - P) U_x^cd + (P_- - P)(U_-^r)_x + (P_+ - P)(U_+^r)_x
        //     + mu U_x^2 / V + kappa (Theta_x / V - Theta_x^cd / V^cd)_x
        let p_total = p_of(&total);
        let heat_flux_gap = |xx: f64| {
            let c = self.eval(xx, t);
            let d = self.contact.eval(xx, t);
            c.theta_x / c.v - d.theta_x / d.v
        };
        let g_term = (self.middles.p_m - p_total) * cd.u_x
            + (p_of(&rm) - p_total) * rm.u_x
            + (p_of(&rp) - p_total) * rp.u_x
            + g.mu * total.u_x * total.u_x / total.v
            + g.kappa * derivative4(&heat_flux_gap, x, h);

        (f_term, g_term)
    }

    /// Entropy-production terms: Q1 in its factored nonnegative form and Q2
    /// with the contact / rarefaction couplings.
    pub fn q_terms(&self, state: &ThermoState, x: f64, t: f64) -> (f64, f64) {
        let g = &self.gas;
        let total = self.eval(x, t);
        let cd = self.contact.eval(x, t);
        let rm = self.rare_minus.evaluate(x, t);
        let rp = self.rare_plus.evaluate(x, t);

        let (v, theta) = (state.v, state.theta);
        let (vv, tt) = (total.v, total.theta);
        let p_cap = g.r * tt / vv;
        let p = g.r * theta / v;
        let phi_small = v - vv;
        let zeta = theta - tt;

        let q1 = p_cap * (phi_raw(theta * vv / (v * tt)) + g.gamma * phi_raw(v / vv));

        let gm1 = g.gamma - 1.0;
        let bracket = phi_raw(v / vv) - phi_raw(tt / theta) / gm1;
        let q2 = cd.u_x
            * (p_cap * phi_small * phi_small / (v * vv) - self.middles.p_m * phi_raw(v / vv)
                + self.middles.p_m / gm1 * phi_raw(tt / theta)
                + zeta / theta * (p - p_cap))
            + gm1 * (g.r * rm.theta / rm.v - p_cap) * rm.u_x * bracket
            + gm1 * (g.r * rp.theta / rp.v - p_cap) * rp.u_x * bracket;
        (q1, q2)
    }

    /// L1 norms of (F, G) over the line at time t, by composite Simpson on a
    /// domain wide enough to contain every wave plus its tails.
    pub fn fg_l1_norm(&self, t: f64) -> (f64, f64) {
        let speed = self
            .rare_minus
            .burgers
            .w_l
            .abs()
            .max(self.rare_plus.burgers.w_r.abs());
        let half = speed * t + 20.0 * (1.0 + t).sqrt() + 20.0;
        let n = ((2.0 * half / 0.05) as usize).clamp(2000, 60_000);
        let n = if n % 2 == 0 { n } else { n + 1 };
        let dx = 2.0 * half / n as f64;
        let (mut f_acc, mut g_acc) = (0.0, 0.0);
        for i in 0..=n {
            let x = -half + i as f64 * dx;
            let w = if i == 0 || i == n {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            };
            let (f, g) = self.source_terms(x, t);
            f_acc += w * f.abs();
            g_acc += w * g.abs();
        }
        (f_acc * dx / 3.0, g_acc * dx / 3.0)
    }

    /// Entropies of the two far-field isentropes.
    pub fn end_entropies(&self) -> (f64, f64) {
        (
            entropy(&self.gas, &self.ends.left),
            entropy(&self.gas, &self.ends.right),
        )
    }
}

impl AnsatzProfile for CompositeAnsatz {
    fn eval(&self, x: f64, t: f64) -> AnsatzPoint {
        let cd = self.contact.eval(x, t);
        let rm = self.rare_minus.evaluate(x, t);
        let rp = self.rare_plus.evaluate(x, t);
        AnsatzPoint {
            v: rm.v + cd.v + rp.v - self.middles.v_m_minus - self.middles.v_m_plus,
            u: rm.u + cd.u + rp.u + self.middles.u_m,
            theta: rm.theta + cd.theta + rp.theta
                - self.middles.theta_m_minus
                - self.middles.theta_m_plus,
            v_x: rm.v_x + cd.v_x + rp.v_x,
            u_x: rm.u_x + cd.u_x + rp.u_x,
            theta_x: rm.theta_x + cd.theta_x + rp.theta_x,
            theta_xx: rm.theta_xx + cd.theta_xx + rp.theta_xx,
            u_t: rm.u_t + cd.u_t + rp.u_t,
        }
    }
}

/// Fourth-order central difference on a micro-stencil.
fn derivative4(f: &dyn Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    (8.0 * (f(x + h) - f(x - h)) - (f(x + 2.0 * h) - f(x - 2.0 * h))) / (12.0 * h)
}
