//! Common evaluation interface for the wave profiles the solver and the
//! diagnostics consume.

use crate::composite::CompositeAnsatz;
use crate::contact::ContactWave;
use crate::rarefaction::RarefactionWave;

/// Profile values and derivatives at one point (x, t).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct AnsatzPoint {
    pub v: f64,
    pub u: f64,
    pub theta: f64,
    pub v_x: f64,
    pub u_x: f64,
    pub theta_x: f64,
    pub theta_xx: f64,
    pub u_t: f64,
}

/// An evaluable (V, U, Theta)(x, t) profile.
pub trait AnsatzProfile {
    fn eval(&self, x: f64, t: f64) -> AnsatzPoint;
}

/// The two profile kinds the harness runs experiments against.
#[derive(Debug, Clone)]
pub enum Ansatz {
    Contact(ContactWave),
    Composite(CompositeAnsatz),
}

impl AnsatzProfile for Ansatz {
    fn eval(&self, x: f64, t: f64) -> AnsatzPoint {
        match self {
            Ansatz::Contact(w) => w.eval(x, t),
            Ansatz::Composite(c) => c.eval(x, t),
        }
    }
}

impl AnsatzProfile for RarefactionWave {
    fn eval(&self, x: f64, t: f64) -> AnsatzPoint {
        self.evaluate(x, t)
    }
}
