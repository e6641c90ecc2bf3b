//! Parameter sets, unit conventions and thermal helpers.
//!
//! Natural units (hbar = c = k_B = 1). Every quantity handed to the other
//! modules is measured in units of the initial trap frequency `omega_I`;
//! [`reduce`] is the only place where physical inputs are nondimensionalized.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// An inverse temperature, or a dimensionless product `beta * omega`.
///
/// Zero temperature is carried as [`Beta::Infinite`] rather than a large
/// float so that `n(beta omega) = 0` and `coth(beta omega / 2) = 1` are exact.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Beta {
    Finite(f64),
    Infinite,
}

impl Beta {
    pub fn finite(value: f64) -> Result<Self> {
        if value > 0.0 && value.is_finite() {
            Ok(Beta::Finite(value))
        } else if value == f64::INFINITY {
            Ok(Beta::Infinite)
        } else {
            Err(Error::domain("beta must be > 0", value))
        }
    }

    /// `beta * omega` for `omega > 0`.
    pub fn scaled(self, omega: f64) -> Beta {
        match self {
            Beta::Finite(b) => Beta::Finite(b * omega),
            Beta::Infinite => Beta::Infinite,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Beta::Infinite)
    }

    pub fn as_f64(self) -> f64 {
        match self {
            Beta::Finite(b) => b,
            Beta::Infinite => f64::INFINITY,
        }
    }
}

impl fmt::Display for Beta {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Beta::Finite(b) => write!(f, "{b}"),
            Beta::Infinite => f.write_str("inf"),
        }
    }
}

impl FromStr for Beta {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "inf" | "infinite" | "infinity" => Ok(Beta::Infinite),
            other => {
                let v: f64 = other
                    .parse()
                    .map_err(|_| Error::domain("beta is not a number", f64::NAN))?;
                Beta::finite(v)
            }
        }
    }
}

impl Serialize for Beta {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Beta::Finite(b) => serializer.serialize_f64(*b),
            Beta::Infinite => serializer.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Beta {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Str(String),
        }
        match Raw::deserialize(deserializer)? {
            Raw::Num(v) => Beta::finite(v).map_err(serde::de::Error::custom),
            Raw::Str(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

/// Which electromagnetic fluctuations are retained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FieldStatistics {
    /// Zero-point plus thermal: weight `coth(beta omega / 2)`.
    Quantum,
    /// Thermal only, Rayleigh-Jeans weight `2 / (beta omega)`.
    Classical,
}

impl FieldStatistics {
    pub fn check(self, beta: Beta) -> Result<()> {
        if self == FieldStatistics::Classical && beta.is_infinite() {
            return Err(Error::InvalidCombination(
                "classical field statistics require a finite temperature".into(),
            ));
        }
        Ok(())
    }

    pub fn as_str(self) -> &'static str {
        match self {
            FieldStatistics::Quantum => "quantum",
            FieldStatistics::Classical => "classical",
        }
    }
}

impl FromStr for FieldStatistics {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "quantum" => Ok(FieldStatistics::Quantum),
            "classical" => Ok(FieldStatistics::Classical),
            _ => Err(Error::InvalidCombination(format!("unknown field statistics '{s}'"))),
        }
    }
}

/// Physical inputs in natural units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalParams {
    /// Radiation-reaction damping constant `2 q^2 / (3 m)` (a time).
    pub gamma: f64,
    /// Dipole oscillator frequency.
    pub omega0: f64,
    /// Trap frequency of the initial thermal center-of-mass state.
    pub omega_i: f64,
    /// Compton frequency of the dipole, `omega_M = M`.
    pub omega_m: f64,
    /// Inverse temperature shared by the field and the center of mass.
    pub beta: Beta,
}

impl PhysicalParams {
    pub fn validate(&self) -> Result<()> {
        for (what, v) in [
            ("gamma must be > 0", self.gamma),
            ("omega0 must be > 0", self.omega0),
            ("omega_i must be > 0", self.omega_i),
            ("omega_m must be > 0", self.omega_m),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::domain(what, v));
            }
        }
        if let Beta::Finite(b) = self.beta {
            Beta::finite(b)?;
        }
        Ok(())
    }
}

/// Dimensionless groups, everything in units of `omega_I`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReducedParams {
    /// `omega_I / omega_M`.
    pub chi: f64,
    pub beta_omega_i: Beta,
    pub gamma_omega_i: f64,
    pub omega0_over_omega_i: f64,
    /// Spectral scale `mu_0` in units of `omega_I`.
    pub mu0: f64,
}

impl ReducedParams {
    pub fn new(chi: f64, beta_omega_i: Beta, gamma_omega_i: f64, omega0_over_omega_i: f64) -> Result<Self> {
        for (what, v) in [
            ("chi must be > 0", chi),
            ("gamma * omega_i must be > 0", gamma_omega_i),
            ("omega0 / omega_i must be > 0", omega0_over_omega_i),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::domain(what, v));
            }
        }
        if let Beta::Finite(b) = beta_omega_i {
            Beta::finite(b)?;
        }
        let c = coth_half(beta_omega_i)?;
        let mu0 = gamma_omega_i / (4.0 * (PI.powi(3) * chi * c).sqrt());
        Ok(ReducedParams {
            chi,
            beta_omega_i,
            gamma_omega_i,
            omega0_over_omega_i,
            mu0,
        })
    }

    /// `coth(beta omega_I / 2) = 2 n(beta omega_I) + 1`, the thermal
    /// enhancement of the center-of-mass spread.
    pub fn thermal_factor(&self) -> f64 {
        coth_half(self.beta_omega_i).expect("validated at construction")
    }

    pub fn with_chi(&self, chi: f64) -> Result<Self> {
        ReducedParams::new(chi, self.beta_omega_i, self.gamma_omega_i, self.omega0_over_omega_i)
    }

    pub fn with_beta(&self, beta_omega_i: Beta) -> Result<Self> {
        ReducedParams::new(self.chi, beta_omega_i, self.gamma_omega_i, self.omega0_over_omega_i)
    }
}

/// Bose-Einstein occupancy `1 / (e^x - 1)`.
pub fn bose_occupancy(x: Beta) -> Result<f64> {
    match x {
        Beta::Infinite => Ok(0.0),
        Beta::Finite(v) if v > 0.0 && v.is_finite() => Ok(1.0 / v.exp_m1()),
        Beta::Finite(v) => Err(Error::domain("occupancy argument must be > 0", v)),
    }
}

/// `coth(x / 2) = 1 + 2 n(x)`.
pub fn coth_half(x: Beta) -> Result<f64> {
    Ok(1.0 + 2.0 * bose_occupancy(x)?)
}

/// Collapse physical inputs to the dimensionless groups used everywhere else.
pub fn reduce(p: &PhysicalParams) -> Result<ReducedParams> {
    p.validate()?;
    ReducedParams::new(
        p.omega_i / p.omega_m,
        p.beta.scaled(p.omega_i),
        p.gamma * p.omega_i,
        p.omega0 / p.omega_i,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn occupancy_values() {
        assert_relative_eq!(bose_occupancy(Beta::Finite(2f64.ln())).unwrap(), 1.0, epsilon = 1e-15);
        assert_eq!(bose_occupancy(Beta::Infinite).unwrap(), 0.0);
        assert_relative_eq!(
            bose_occupancy(Beta::Finite(1e-8)).unwrap(),
            1e8 - 0.5,
            max_relative = 1e-6
        );
        assert!(bose_occupancy(Beta::Finite(0.0)).is_err());
        assert!(bose_occupancy(Beta::Finite(-1.0)).is_err());
    }

    #[test]
    fn coth_half_values() {
        assert_eq!(coth_half(Beta::Infinite).unwrap(), 1.0);
        assert_relative_eq!(
            coth_half(Beta::Finite(1.0)).unwrap() * 0.5f64.tanh(),
            1.0,
            epsilon = 1e-15
        );
        assert_relative_eq!(coth_half(Beta::Finite(1e-6)).unwrap(), 2e6, max_relative = 1e-6);
        assert!(coth_half(Beta::Finite(-2.0)).is_err());
    }

    #[test]
    fn reduce_zero_temperature_mu0() {
        let p = PhysicalParams {
            gamma: 1.0,
            omega0: 1.0,
            omega_i: 1.0,
            omega_m: 1.0,
            beta: Beta::Infinite,
        };
        let r = reduce(&p).unwrap();
        assert_eq!(r.chi, 1.0);
        assert_relative_eq!(r.mu0, 1.0 / (4.0 * PI.powf(1.5)), max_relative = 1e-15);
        assert!((r.mu0 - 0.044908).abs() < 5e-4 * 0.044908);
    }

    #[test]
    fn reduce_is_scale_invariant() {
        let p = PhysicalParams {
            gamma: 0.3,
            omega0: 1.7,
            omega_i: 0.9,
            omega_m: 4.0,
            beta: Beta::Finite(2.5),
        };
        let q = PhysicalParams {
            omega0: 2.0 * p.omega0,
            omega_i: 2.0 * p.omega_i,
            omega_m: 2.0 * p.omega_m,
            beta: Beta::Finite(1.25),
            ..p
        };
        let (a, b) = (reduce(&p).unwrap(), reduce(&q).unwrap());
        assert_eq!(a.chi, b.chi);
        assert_eq!(a.beta_omega_i, b.beta_omega_i);
        assert_eq!(a.omega0_over_omega_i, b.omega0_over_omega_i);
        assert_relative_eq!(b.gamma_omega_i, 2.0 * a.gamma_omega_i, max_relative = 1e-15);
    }

    #[test]
    fn classical_rejects_zero_temperature() {
        assert!(FieldStatistics::Classical.check(Beta::Infinite).is_err());
        assert!(FieldStatistics::Classical.check(Beta::Finite(1.0)).is_ok());
        assert!(FieldStatistics::Quantum.check(Beta::Infinite).is_ok());
    }

    #[test]
    fn beta_serde_round_trip() {
        let s = serde_json::to_string(&[Beta::Finite(0.5), Beta::Infinite]).unwrap();
        assert_eq!(s, r#"[0.5,"inf"]"#);
        let back: Vec<Beta> = serde_json::from_str(&s).unwrap();
        assert_eq!(back, vec![Beta::Finite(0.5), Beta::Infinite]);
    }

    #[test]
    fn invalid_params_rejected() {
        assert!(ReducedParams::new(0.0, Beta::Infinite, 1.0, 1.0).is_err());
        assert!(ReducedParams::new(1.0, Beta::Finite(-1.0), 1.0, 1.0).is_err());
        assert!(ReducedParams::new(1.0, Beta::Infinite, f64::NAN, 1.0).is_err());
    }
}
