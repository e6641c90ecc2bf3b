//! Center-of-mass fluctuation and commutator functions.
//!
//! Both depend on the two times only through `tau = t - t'`, in units of
//! `1 / omega_I`.

use crate::error::{Error, Result};
use crate::model::{bose_occupancy, Beta, ReducedParams};

/// Center-of-mass dynamics entering the memory kernel.
pub trait CenterOfMass {
    /// Position-variance growth `Delta^2(tau)` for `tau >= 0`.
    fn delta_sq(&self, tau: f64) -> Result<f64>;
    /// Commutator (response) function `G(tau)`, zero for `tau <= 0`.
    fn green_g(&self, tau: f64) -> f64;
}

/// A free dipole released from a thermal state of a harmonic trap.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComState {
    pub chi: f64,
    pub beta_omega_i: Beta,
}

impl ComState {
    pub fn new(chi: f64, beta_omega_i: Beta) -> Result<Self> {
        if !(chi > 0.0 && chi.is_finite()) {
            return Err(Error::domain("chi must be > 0", chi));
        }
        Ok(ComState { chi, beta_omega_i })
    }

    /// `2 n(beta omega_I) + 1`.
    pub fn thermal_bracket(&self) -> f64 {
        2.0 * bose_occupancy(self.beta_omega_i).unwrap_or(0.0) + 1.0
    }
}

impl From<&ReducedParams> for ComState {
    fn from(p: &ReducedParams) -> Self {
        ComState {
            chi: p.chi,
            beta_omega_i: p.beta_omega_i,
        }
    }
}

impl CenterOfMass for ComState {
    fn delta_sq(&self, tau: f64) -> Result<f64> {
        if !(tau >= 0.0) {
            return Err(Error::domain("Delta^2 needs tau >= 0", tau));
        }
        Ok(self.thermal_bracket() * tau * tau * self.chi / 2.0)
    }

    fn green_g(&self, tau: f64) -> f64 {
        // theta(0) = 0
        if tau > 0.0 {
            tau * self.chi
        } else {
            0.0
        }
    }
}

pub fn delta_sq(tau: f64, s: &ComState) -> Result<f64> {
    s.delta_sq(tau)
}

pub fn green_g(tau: f64, s: &ComState) -> f64 {
    s.green_g(tau)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn delta_sq_examples() {
        let zero_t = ComState::new(1.0, Beta::Infinite).unwrap();
        assert_eq!(delta_sq(0.0, &zero_t).unwrap(), 0.0);
        assert_eq!(delta_sq(1.0, &zero_t).unwrap(), 0.5);
        // n(ln 3) = 1/2
        let warm = ComState::new(1.0, Beta::Finite(3f64.ln())).unwrap();
        assert_relative_eq!(delta_sq(1.0, &warm).unwrap(), 1.0, max_relative = 1e-14);
        assert!(delta_sq(-1e-3, &warm).is_err());
    }

    #[test]
    fn green_g_examples() {
        let s = ComState::new(0.25, Beta::Finite(1.0)).unwrap();
        assert_eq!(green_g(-1.0, &s), 0.0);
        assert_eq!(green_g(0.0, &s), 0.0);
        assert_eq!(green_g(1.0, &s), 0.25);
        for beta in [Beta::Finite(0.1), Beta::Finite(1.0), Beta::Infinite] {
            let t = ComState::new(0.25, beta).unwrap();
            assert_eq!(green_g(1.0, &t), green_g(1.0, &s));
        }
    }

    proptest! {
        #[test]
        fn delta_sq_nonnegative_and_monotone(
            chi in 1e-4f64..1e2,
            beta in prop_oneof![Just(f64::INFINITY), 1e-3f64..1e3],
            t1 in 0.0f64..50.0,
            dt in 0.0f64..50.0,
        ) {
            let s = ComState::new(chi, Beta::finite(beta).unwrap()).unwrap();
            let a = s.delta_sq(t1).unwrap();
            let b = s.delta_sq(t1 + dt).unwrap();
            prop_assert!(a >= 0.0);
            prop_assert!(b >= a);
        }

        #[test]
        fn delta_sq_scales_with_bracket(chi in 1e-3f64..10.0, beta in 1e-2f64..50.0, tau in 0.0f64..10.0) {
            let warm = ComState::new(chi, Beta::Finite(beta)).unwrap();
            let cold = ComState::new(chi, Beta::Infinite).unwrap();
            let lhs = warm.delta_sq(tau).unwrap();
            let rhs = warm.thermal_bracket() * cold.delta_sq(tau).unwrap();
            prop_assert!((lhs - rhs).abs() <= 1e-12 * lhs.abs().max(1e-300));
        }

        #[test]
        fn green_g_linear_and_causal(chi in 1e-3f64..10.0, tau in -10.0f64..10.0) {
            let s = ComState::new(chi, Beta::Infinite).unwrap();
            if tau <= 0.0 {
                prop_assert_eq!(s.green_g(tau), 0.0);
            } else {
                prop_assert!((s.green_g(tau) - chi * tau).abs() <= 1e-15 * chi * tau);
            }
        }
    }
}
