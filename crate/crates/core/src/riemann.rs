//! Wave-curve algebra for the Euler Riemann problem restricted to
//! rarefaction-contact-rarefaction patterns.
//!
//! The intermediate-state solver walks the 1- and 3-rarefaction curves
//! (isentropes) from the end states toward a common pressure and matches
//! the velocities reached along the two curves.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gas::{entropy, lambda, pressure, Family, GasParams, ThermoState};

/// Far-field data (v_-, u_-, theta_-) and (v_+, u_+, theta_+).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EndStates {
    pub left: ThermoState,
    pub right: ThermoState,
}

impl EndStates {
    pub fn new(left: ThermoState, right: ThermoState) -> Self {
        EndStates { left, right }
    }
}

/// The Riemann skeleton of a rarefaction-contact-rarefaction solution:
/// intermediate volumes and temperatures on each side of the contact, the
/// common intermediate velocity and pressure, and the wave strength
/// `delta = |theta_+ - theta_-|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WaveDecomposition {
    pub v_m_minus: f64,
    pub v_m_plus: f64,
    pub theta_m_minus: f64,
    pub theta_m_plus: f64,
    pub u_m: f64,
    pub p_m: f64,
    pub delta: f64,
}

/// True iff the end states can be joined by a single contact discontinuity:
/// equal velocities and equal pressures.
pub fn is_contact_compatible(gas: &GasParams, ends: &EndStates, tol: f64) -> bool {
    let p_l = pressure(gas, &ends.left);
    let p_r = pressure(gas, &ends.right);
    (ends.right.u - ends.left.u).abs() <= tol && (p_r - p_l).abs() <= tol * p_l.max(p_r)
}

/// Velocity reached at volume `v` along the rarefaction curve of `family`
/// anchored at `anchor`, via the closed-form antiderivative of the power law
/// `lambda(eta) = sign * sqrt(gamma R theta_a) v_a^{(gamma-1)/2} eta^{-(gamma+1)/2}`.
pub fn rarefaction_u_along_curve(
    gas: &GasParams,
    family: Family,
    anchor: &ThermoState,
    v: f64,
) -> Result<f64> {
    if !(v > 0.0) {
        return Err(Error::InvalidInput(format!(
            "rarefaction curve requires v > 0, got {v}"
        )));
    }
    Ok(anchor.u - curve_integral(gas, family, anchor, v))
}

/// Closed form of `int_{v_a}^{v} lambda_family(eta, s_a) d eta`.
fn curve_integral(gas: &GasParams, family: Family, anchor: &ThermoState, v: f64) -> f64 {
    let gm1 = gas.gamma - 1.0;
    let c_a = (gas.gamma * gas.r * anchor.theta).sqrt();
    family.sign() * 2.0 * c_a / gm1 * (1.0 - (anchor.v / v).powf(gm1 / 2.0))
}

/// Volume at pressure `p` on the isentrope through `anchor` (p v^gamma constant).
fn isentrope_v_at_pressure(gas: &GasParams, anchor: &ThermoState, p: f64) -> f64 {
    let p_a = pressure(gas, anchor);
    anchor.v * (p_a / p).powf(1.0 / gas.gamma)
}

/// Velocity difference between the two curves at common pressure `p`:
/// `u` reached along the 1-curve from the left minus `u` reached along the
/// 3-curve from the right. Strictly decreasing in `p`.
fn velocity_gap(gas: &GasParams, ends: &EndStates, p: f64) -> f64 {
    let v_l = isentrope_v_at_pressure(gas, &ends.left, p);
    let v_r = isentrope_v_at_pressure(gas, &ends.right, p);
    let u_l = ends.left.u - curve_integral(gas, Family::Minus, &ends.left, v_l);
    let u_r = ends.right.u - curve_integral(gas, Family::Plus, &ends.right, v_r);
    u_l - u_r
}

/// Solve for the unique pair of intermediate states joined by a contact,
/// with each intermediate state on the rarefaction curve (isentrope) of its
/// end state and `v_pm^m >= v_pm` (both outer waves expansive).
///
/// The outer solve is a monotone bisection in the common pressure `p^m`;
/// volumes and temperatures follow from closed-form isentrope inversion.
pub fn solve_intermediate_states(
    gas: &GasParams,
    ends: &EndStates,
    tol: f64,
) -> Result<WaveDecomposition> {
    if !(tol > 0.0) {
        return Err(Error::InvalidInput("tolerance must be positive".into()));
    }
    let p_l = pressure(gas, &ends.left);
    let p_r = pressure(gas, &ends.right);
    // Rarefactions expand: v^m >= v forces p^m <= min(p_-, p_+). Slack admits
    // the degenerate contact-only case.
    let p_max = p_l.min(p_r);
    let scale = ends.left.u.abs().max(ends.right.u.abs()).max(1.0);

    let gap_at_max = velocity_gap(gas, ends, p_max);
    if gap_at_max > tol * scale {
        return Err(Error::NoIntersection(format!(
            "data is compressive: velocity gap {gap_at_max:e} at p = min(p_-, p_+)"
        )));
    }

    // Bracket downward in pressure until the gap changes sign (vacuum check).
    let mut p_hi = p_max;
    let mut p_lo = p_max;
    if gap_at_max < -tol * scale {
        loop {
            p_lo *= 0.5;
            if p_lo < 1e-14 * p_max {
                return Err(Error::NoIntersection(
                    "curves do not meet before vacuum".into(),
                ));
            }
            if velocity_gap(gas, ends, p_lo) >= 0.0 {
                break;
            }
        }
        // gap(p_lo) >= 0 >= gap(p_hi); bisect.
        let mut iter = 0;
        loop {
            let p_mid = 0.5 * (p_lo + p_hi);
            let gap_mid = velocity_gap(gas, ends, p_mid);
            if gap_mid.abs() <= tol * scale {
                p_hi = p_mid;
                break;
            }
            if gap_mid > 0.0 {
                p_lo = p_mid;
            } else {
                p_hi = p_mid;
            }
            iter += 1;
            if iter > 2000 {
                return Err(Error::ConvergenceFailure(format!(
                    "pressure bisection stalled at gap = {gap_mid:e}"
                )));
            }
            if (p_hi - p_lo) <= f64::EPSILON * p_hi {
                // Bracket is machine-tight; accept the midpoint residual.
                let g = velocity_gap(gas, ends, p_hi);
                if g.abs() > tol * scale {
                    return Err(Error::ConvergenceFailure(format!(
                        "bracket exhausted with residual {g:e}"
                    )));
                }
                break;
            }
        }
    }

    let p_m = p_hi;
    let v_m_minus = isentrope_v_at_pressure(gas, &ends.left, p_m);
    let v_m_plus = isentrope_v_at_pressure(gas, &ends.right, p_m);
    debug_assert!(v_m_minus >= ends.left.v - 1e-12 * ends.left.v);
    debug_assert!(v_m_plus >= ends.right.v - 1e-12 * ends.right.v);
    let u_l = ends.left.u - curve_integral(gas, Family::Minus, &ends.left, v_m_minus);
    let u_r = ends.right.u - curve_integral(gas, Family::Plus, &ends.right, v_m_plus);
    Ok(WaveDecomposition {
        v_m_minus,
        v_m_plus,
        theta_m_minus: p_m * v_m_minus / gas.r,
        theta_m_plus: p_m * v_m_plus / gas.r,
        u_m: 0.5 * (u_l + u_r),
        p_m,
        delta: (ends.right.theta - ends.left.theta).abs(),
    })
}

/// Exact self-similar rarefaction fan between `head` and `tail` (both on one
/// isentrope), evaluated at the similarity variable `xi = x / t`.
pub fn exact_rarefaction_fan(
    gas: &GasParams,
    family: Family,
    head: &ThermoState,
    tail: &ThermoState,
    xi: f64,
) -> Result<ThermoState> {
    let s_head = entropy(gas, head);
    let s_tail = entropy(gas, tail);
    let mismatch = (s_head - s_tail).abs();
    if mismatch > 1e-8 {
        return Err(Error::EntropyMismatch { mismatch });
    }
    let lam_head = lambda(gas, family, head.v, s_head)?;
    let lam_tail = lambda(gas, family, tail.v, s_head)?;
    let (lo, hi, first, last) = if lam_head <= lam_tail {
        (lam_head, lam_tail, *head, *tail)
    } else {
        (lam_tail, lam_head, *tail, *head)
    };
    if xi <= lo {
        return Ok(first);
    }
    if xi >= hi {
        return Ok(last);
    }
    // Interior: lambda(v, s) = xi has the closed-form inversion of the power
    // law lambda^2 = gamma R theta_h v_h^{gamma-1} v^{-(gamma+1)}.
    let c2 = gas.gamma * gas.r * head.theta * head.v.powf(gas.gamma - 1.0);
    let v = (c2 / (xi * xi)).powf(1.0 / (gas.gamma + 1.0));
    let theta = head.theta * (head.v / v).powf(gas.gamma - 1.0);
    let u = rarefaction_u_along_curve(gas, family, head, v)?;
    ThermoState::new(v, u, theta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn gas() -> GasParams {
        GasParams::monatomic()
    }

    fn st(v: f64, u: f64, theta: f64) -> ThermoState {
        ThermoState::new(v, u, theta).unwrap()
    }

    #[test]
    fn contact_compatibility_cases() {
        let g = gas();
        // equal pressures by construction (p = theta / v = 1 both sides)
        let ends = EndStates::new(st(1.0, 0.0, 1.0), st(1.2, 0.0, 1.2));
        assert!(is_contact_compatible(&g, &ends, 1e-10));
        // velocity mismatch
        let ends = EndStates::new(st(1.0, 0.0, 1.0), st(1.0, 0.5, 1.0));
        assert!(!is_contact_compatible(&g, &ends, 1e-10));
        // pressure mismatch (p_+ = 1/1.1)
        let ends = EndStates::new(st(1.0, 0.0, 1.0), st(1.1, 0.0, 1.0));
        assert!(!is_contact_compatible(&g, &ends, 1e-10));
    }

    /// Adaptive Simpson quadrature, used as the independent oracle for the
    /// closed-form curve integral.
    fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
        fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> f64 {
            (b - a) / 6.0 * (f(a) + 4.0 * f(0.5 * (a + b)) + f(b))
        }
        fn recurse(
            f: &dyn Fn(f64) -> f64,
            a: f64,
            b: f64,
            whole: f64,
            tol: f64,
            depth: u32,
        ) -> f64 {
            let m = 0.5 * (a + b);
            let left = simpson(f, a, m);
            let right = simpson(f, m, b);
            if depth > 40 || (left + right - whole).abs() <= 15.0 * tol {
                return left + right + (left + right - whole) / 15.0;
            }
            recurse(f, a, m, left, tol / 2.0, depth + 1)
                + recurse(f, m, b, right, tol / 2.0, depth + 1)
        }
        let whole = simpson(f, a, b);
        recurse(f, a, b, whole, tol, 0)
    }

    #[test]
    fn curve_velocity_trivial_and_oracle() {
        let g = gas();
        let anchor = st(1.0, 0.0, 1.0);
        // empty integral
        assert_eq!(
            rarefaction_u_along_curve(&g, Family::Plus, &anchor, 1.0).unwrap(),
            0.0
        );
        assert!(rarefaction_u_along_curve(&g, Family::Plus, &anchor, -1.0).is_err());
        // plus family, v = 2: frozen 40-digit value of the closed form
        let u2 = rarefaction_u_along_curve(&g, Family::Plus, &anchor, 2.0).unwrap();
        let expected = -0.7989944271949314585426;
        assert!((u2 - expected).abs() <= 1e-13);
        // independent oracle: adaptive quadrature of lambda along the curve
        let s_a = entropy(&g, &anchor);
        let integrand = move |eta: f64| lambda(&g, Family::Plus, eta, s_a).unwrap();
        let quad = adaptive_simpson(&integrand, 1.0, 2.0, 1e-13);
        assert!((u2 - (anchor.u - quad)).abs() <= 1e-10);
        // minus family at v > v_anchor lies above u_anchor
        let um = rarefaction_u_along_curve(&g, Family::Minus, &anchor, 2.0).unwrap();
        assert!(um >= anchor.u);
    }

    #[test]
    fn curve_velocity_monotone_in_v() {
        let g = gas();
        let anchor = st(1.0, 0.3, 1.2);
        let mut prev = f64::NEG_INFINITY;
        for k in 0..50 {
            let v = 1.0 + 0.1 * k as f64;
            let u = rarefaction_u_along_curve(&g, Family::Minus, &anchor, v).unwrap();
            assert!(u > prev);
            prev = u;
        }
        let mut prev = f64::INFINITY;
        for k in 0..50 {
            let v = 1.0 + 0.1 * k as f64;
            let u = rarefaction_u_along_curve(&g, Family::Plus, &anchor, v).unwrap();
            assert!(u < prev);
            prev = u;
        }
    }

    #[test]
    fn degenerate_contact_only_solve() {
        let g = gas();
        let ends = EndStates::new(st(1.0, 0.0, 1.0), st(1.2, 0.0, 1.2));
        let w = solve_intermediate_states(&g, &ends, 1e-12).unwrap();
        assert!((w.v_m_minus - 1.0).abs() <= 1e-12);
        assert!((w.v_m_plus - 1.2).abs() <= 1e-12);
        assert!((w.theta_m_minus - 1.0).abs() <= 1e-12);
        assert!((w.theta_m_plus - 1.2).abs() <= 1e-12);
        assert!(w.u_m.abs() <= 1e-12);
        assert!((w.p_m - 1.0).abs() <= 1e-12);
    }

    /// Walk a given distance in v along each rarefaction curve away from a
    /// contact-compatible middle pair, producing end states whose exact
    /// decomposition is known. The forward construction is the oracle.
    fn construct_ends(
        g: &GasParams,
        theta_mm: f64,
        theta_mp: f64,
        p_m: f64,
        dv_minus: f64,
        dv_plus: f64,
    ) -> (EndStates, WaveDecomposition) {
        let v_mm = g.r * theta_mm / p_m;
        let v_mp = g.r * theta_mp / p_m;
        // Left end state: back down the 1-curve (v_- < v_-^m). The middle
        // sits on the curve through the end state at u^m = 0, so walking the
        // curve from the middle to v_- recovers u_- directly.
        let v_l = v_mm - dv_minus;
        let theta_l = theta_mm * (v_mm / v_l).powf(g.gamma - 1.0);
        let mid_m = st(v_mm, 0.0, theta_mm);
        let u_l = rarefaction_u_along_curve(g, Family::Minus, &mid_m, v_l).unwrap();
        // Right end state: back down the 3-curve (v_+ < v_+^m).
        let v_r = v_mp - dv_plus;
        let theta_r = theta_mp * (v_mp / v_r).powf(g.gamma - 1.0);
        let mid_p = st(v_mp, 0.0, theta_mp);
        let u_r = rarefaction_u_along_curve(g, Family::Plus, &mid_p, v_r).unwrap();
        let ends = EndStates::new(st(v_l, u_l, theta_l), st(v_r, u_r, theta_r));
        let decomp = WaveDecomposition {
            v_m_minus: v_mm,
            v_m_plus: v_mp,
            theta_m_minus: theta_mm,
            theta_m_plus: theta_mp,
            u_m: 0.0,
            p_m,
            delta: (theta_r - theta_l).abs(),
        };
        (ends, decomp)
    }

    #[test]
    fn forward_construct_then_invert() {
        let g = gas();
        let (ends, truth) = construct_ends(&g, 1.0, 1.08, 1.0, 0.05, 0.05);
        let w = solve_intermediate_states(&g, &ends, 1e-13).unwrap();
        assert!((w.v_m_minus - truth.v_m_minus).abs() <= 1e-9);
        assert!((w.v_m_plus - truth.v_m_plus).abs() <= 1e-9);
        assert!((w.u_m - truth.u_m).abs() <= 1e-9);
        assert!((w.p_m - truth.p_m).abs() <= 1e-9);
    }

    #[test]
    fn randomized_round_trip_and_perturbation_bound() {
        let g = gas();
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let mut k_max: f64 = 0.0;
        for _ in 0..100 {
            let theta_mm = rng.gen_range(0.7..1.3);
            let dtheta: f64 = rng.gen_range(-0.25..0.25);
            let theta_mp = theta_mm + dtheta.clamp(-0.3, 0.3);
            let p_m = rng.gen_range(0.6..1.6);
            let dv_m = rng.gen_range(0.0..0.12);
            let dv_p = rng.gen_range(0.0..0.12);
            let (ends, truth) = construct_ends(&g, theta_mm, theta_mp, p_m, dv_m, dv_p);
            if (ends.right.theta - ends.left.theta).abs() > 0.3 {
                continue;
            }
            let w = solve_intermediate_states(&g, &ends, 1e-13).unwrap();
            let err = (w.v_m_minus - truth.v_m_minus)
                .abs()
                .max((w.v_m_plus - truth.v_m_plus).abs())
                .max((w.u_m - truth.u_m).abs())
                .max((w.theta_m_minus - truth.theta_m_minus).abs())
                .max((w.theta_m_plus - truth.theta_m_plus).abs());
            assert!(err <= 1e-8, "round-trip error {err:e}");

            // Postcondition invariants at 1e-9.
            let p_mm = g.r * w.theta_m_minus / w.v_m_minus;
            let p_mp = g.r * w.theta_m_plus / w.v_m_plus;
            assert!((p_mm - w.p_m).abs() <= 1e-9 * w.p_m);
            assert!((p_mp - w.p_m).abs() <= 1e-9 * w.p_m);
            let s_l = entropy(&g, &ends.left);
            let s_lm = entropy(&g, &st(w.v_m_minus, 0.0, w.theta_m_minus));
            assert!((s_l - s_lm).abs() <= 1e-9);
            let s_r = entropy(&g, &ends.right);
            let s_rm = entropy(&g, &st(w.v_m_plus, 0.0, w.theta_m_plus));
            assert!((s_r - s_rm).abs() <= 1e-9);

            // Perturbation-bound shape: deviation of the middle pair from the
            // ends is controlled by the wave strength.
            let dev = (w.v_m_minus - ends.left.v).abs()
                + (w.v_m_plus - ends.right.v).abs()
                + (w.u_m - ends.left.u).abs()
                + (w.u_m - ends.right.u).abs()
                + (w.theta_m_minus - ends.left.theta).abs()
                + (w.theta_m_plus - ends.right.theta).abs();
            if w.delta > 1e-3 {
                k_max = k_max.max(dev / w.delta);
            }
        }
        println!("measured perturbation-bound constant K = {k_max:.3}");
        assert!(k_max.is_finite() && k_max > 0.0);
    }

    #[test]
    fn compressive_data_has_no_intersection() {
        let g = gas();
        let ends = EndStates::new(st(1.0, 0.0, 1.0), st(0.5, -1.0, 1.5));
        match solve_intermediate_states(&g, &ends, 1e-12) {
            Err(Error::NoIntersection(_)) => {}
            other => panic!("expected NoIntersection, got {other:?}"),
        }
        // Oracle: scan the admissible pressure range confirming the velocity
        // gap never reaches zero with v_pm^m >= v_pm.
        let p_max = pressure(&g, &ends.left).min(pressure(&g, &ends.right));
        let mut min_gap = f64::INFINITY;
        for k in 0..=1000 {
            let p = p_max * (k as f64 / 1000.0).max(1e-6);
            min_gap = min_gap.min(velocity_gap(&g, &ends, p));
        }
        assert!(min_gap > 0.0, "oracle found an admissible root");
    }

    #[test]
    fn fan_outside_and_interior() {
        let g = gas();
        // 3-family fan from a middle state out to a right state.
        let head = st(1.3, 0.0, 1.05);
        let s_h = entropy(&g, &head);
        let v_tail = 1.1;
        let theta_tail = head.theta * (head.v / v_tail).powf(g.gamma - 1.0);
        let u_tail = rarefaction_u_along_curve(&g, Family::Plus, &head, v_tail).unwrap();
        let tail = st(v_tail, u_tail, theta_tail);

        let lam_h = lambda(&g, Family::Plus, head.v, s_h).unwrap();
        let lam_t = lambda(&g, Family::Plus, tail.v, s_h).unwrap();
        assert!(lam_h < lam_t);

        let below = exact_rarefaction_fan(&g, Family::Plus, &head, &tail, lam_h - 0.1).unwrap();
        assert_eq!(below, head);
        let above = exact_rarefaction_fan(&g, Family::Plus, &head, &tail, lam_t + 0.1).unwrap();
        assert_eq!(above, tail);

        let xi = 0.5 * (lam_h + lam_t);
        let mid = exact_rarefaction_fan(&g, Family::Plus, &head, &tail, xi).unwrap();
        // Oracle: bisection for lambda(v, s_h) = xi on the isentrope.
        let (mut a, mut b) = (tail.v, head.v);
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            if lambda(&g, Family::Plus, m, s_h).unwrap() > xi {
                a = m;
            } else {
                b = m;
            }
        }
        assert!((mid.v - 0.5 * (a + b)).abs() <= 1e-10);
        let lam_mid = lambda(&g, Family::Plus, mid.v, s_h).unwrap();
        assert!((lam_mid - xi).abs() <= 1e-10);

        // entropy mismatch rejected
        let bad_tail = st(v_tail, u_tail, theta_tail * 1.01);
        assert!(matches!(
            exact_rarefaction_fan(&g, Family::Plus, &head, &bad_tail, xi),
            Err(Error::EntropyMismatch { .. })
        ));
    }
}
