//! Ideal polytropic gas algebra.
//!
//! Pressure, entropy, characteristic speeds and the relative-entropy kernel
//! for a viscous heat-conducting perfect gas with
//! `p = R theta / v = A v^{-gamma} exp((gamma-1) s / R)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Physical constants of the gas. `c_nu` is always derived as
/// `R / (gamma - 1)`, never stored.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GasParams {
    /// Gas constant R (> 0).
    pub r: f64,
    /// Adiabatic exponent gamma (> 1).
    pub gamma: f64,
    /// Viscosity mu (> 0).
    pub mu: f64,
    /// Heat conductivity kappa (> 0).
    pub kappa: f64,
    /// Entropy reference constant A (> 0). Cancels from all dynamics;
    /// defaults to 1.
    #[serde(default = "default_a_const")]
    pub a_const: f64,
}

fn default_a_const() -> f64 {
    1.0
}

impl GasParams {
    pub fn new(r: f64, gamma: f64, mu: f64, kappa: f64, a_const: f64) -> Result<Self> {
        let g = GasParams {
            r,
            gamma,
            mu,
            kappa,
            a_const,
        };
        g.validate()?;
        Ok(g)
    }

    /// gamma = 5/3, R = mu = kappa = A = 1: the monatomic test gas used
    /// throughout the verification runs.
    pub fn monatomic() -> Self {
        GasParams {
            r: 1.0,
            gamma: 5.0 / 3.0,
            mu: 1.0,
            kappa: 1.0,
            a_const: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let all_finite = self.r.is_finite()
            && self.gamma.is_finite()
            && self.mu.is_finite()
            && self.kappa.is_finite()
            && self.a_const.is_finite();
        if !all_finite {
            return Err(Error::InvalidInput("gas parameters must be finite".into()));
        }
        if self.r <= 0.0 || self.mu <= 0.0 || self.kappa <= 0.0 || self.a_const <= 0.0 {
            return Err(Error::InvalidInput(
                "gas parameters R, mu, kappa, A must be positive".into(),
            ));
        }
        if self.gamma <= 1.0 {
            return Err(Error::InvalidInput("gamma must exceed 1".into()));
        }
        Ok(())
    }

    /// Specific heat at constant volume, R / (gamma - 1).
    pub fn c_nu(&self) -> f64 {
        self.r / (self.gamma - 1.0)
    }
}

/// A thermodynamic point (v, u, theta) with v > 0 and theta > 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThermoState {
    pub v: f64,
    pub u: f64,
    pub theta: f64,
}

impl ThermoState {
    pub fn new(v: f64, u: f64, theta: f64) -> Result<Self> {
        if !(v.is_finite() && u.is_finite() && theta.is_finite()) {
            return Err(Error::InvalidInput("state must be finite".into()));
        }
        if v <= 0.0 || theta <= 0.0 {
            return Err(Error::InvalidInput(format!(
                "specific volume and temperature must be positive, got v = {v}, theta = {theta}"
            )));
        }
        Ok(ThermoState { v, u, theta })
    }
}

/// Characteristic family: the 1-family (minus) or 3-family (plus).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Minus,
    Plus,
}

impl Family {
    pub fn sign(self) -> f64 {
        match self {
            Family::Minus => -1.0,
            Family::Plus => 1.0,
        }
    }
}

/// p = R theta / v.
pub fn pressure(gas: &GasParams, state: &ThermoState) -> f64 {
    gas.r * state.theta / state.v
}

/// s = (R / (gamma - 1)) ln(R theta / A) + R ln v.
pub fn entropy(gas: &GasParams, state: &ThermoState) -> f64 {
    gas.r / (gas.gamma - 1.0) * (gas.r * state.theta / gas.a_const).ln() + gas.r * state.v.ln()
}

/// Characteristic speed lambda_pm(v, s) = +-sqrt(A gamma v^{-gamma-1} exp((gamma-1) s / R)).
///
/// Equals +-sqrt(gamma R theta) / v when s is the entropy of (v, theta).
pub fn lambda(gas: &GasParams, family: Family, v: f64, s: f64) -> Result<f64> {
    if !(v > 0.0) {
        return Err(Error::InvalidInput(format!(
            "lambda requires v > 0, got {v}"
        )));
    }
    let arg = gas.a_const * gas.gamma * v.powf(-gas.gamma - 1.0)
        * ((gas.gamma - 1.0) * s / gas.r).exp();
    Ok(family.sign() * arg.sqrt())
}

/// Relative-entropy kernel Phi(z) = z - ln z - 1, nonnegative, zero only at z = 1.
pub fn phi_kernel(z: f64) -> Result<f64> {
    if !(z > 0.0) {
        return Err(Error::InvalidInput(format!(
            "phi_kernel requires z > 0, got {z}"
        )));
    }
    Ok(z - z.ln() - 1.0)
}

/// Unchecked Phi for integrands whose arguments are positive by construction.
#[inline]
pub(crate) fn phi_raw(z: f64) -> f64 {
    z - z.ln() - 1.0
}
