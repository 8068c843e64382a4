//! Infeasibility certificates and their exact verification.

use crate::graph::Graph;
use crate::rational::Rational;
use crate::walk::{phi, Walk};

/// Evidence that a system has no solution.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Certificate {
    /// A closed walk with gain one and negative cost: `x_s <= c + x_s` with `c < 0`.
    NegUnitGain(Walk),
    /// `c_le` closed at `t` with gain below one bounds `x_t` from above,
    /// `c_ge` closed at `s` with gain above one bounds `x_s` from below, and
    /// `path` from `s` to `t` carries the upper bound back to `s` where it
    /// falls short of the lower bound.
    NegBicycle { c_le: Walk, c_ge: Walk, path: Walk },
}

impl Certificate {
    pub fn kind(&self) -> &'static str {
        match self {
            Certificate::NegUnitGain(_) => "neg-unit-gain",
            Certificate::NegBicycle { .. } => "bicycle",
        }
    }
}

/// Recomputes every walk against `g` and checks the defining inequality exactly.
pub fn verify_certificate(g: &Graph, cert: &Certificate) -> bool {
    match cert {
        Certificate::NegUnitGain(c) => {
            c.validate(g)
                && c.is_closed()
                && !c.is_empty()
                && c.summary().gain.is_one()
                && c.summary().cost.is_negative()
        }
        Certificate::NegBicycle { c_le, c_ge, path } => {
            let one = Rational::one();
            if !(c_le.validate(g) && c_ge.validate(g) && path.validate(g)) {
                return false;
            }
            if !(c_le.is_closed() && c_ge.is_closed() && !c_le.is_empty() && !c_ge.is_empty()) {
                return false;
            }
            if path.start() != c_ge.start() || path.end() != c_le.start() {
                return false;
            }
            if c_le.summary().gain >= one || c_ge.summary().gain <= one {
                return false;
            }
            let upper = path.summary().apply_finite(&phi(c_le.summary()));
            phi(c_ge.summary()) > upper
        }
    }
}
