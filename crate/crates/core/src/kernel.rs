//! Field correlation function and the non-Markovian memory kernel `D(tau)`.

use std::f64::consts::PI;
use std::fmt::Write as _;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::com_dynamics::{CenterOfMass, ComState};
use crate::error::{Error, Result};
use crate::model::{coth_half, Beta, FieldStatistics, ReducedParams};
use crate::quadrature::{integrate, integrate_semi_infinite, GaussianEnvelope, Oscillation, QuadResult, Tolerance};

/// Default lower bound on `tau` (units `1 / omega_I`).
pub const DEFAULT_TAU_MIN: f64 = 1e-3;

/// Field correlation function `Gamma(omega, tau)`.
pub fn gamma_fn(omega: f64, tau: f64, beta: Beta, stats: FieldStatistics) -> Result<Complex64> {
    if !(omega > 0.0 && omega.is_finite()) {
        return Err(Error::domain("omega must be > 0", omega));
    }
    stats.check(beta)?;
    let re = if tau > 0.0 { (omega * tau).sin() } else { 0.0 };
    let weight = match stats {
        FieldStatistics::Quantum => 0.5 * coth_half(beta.scaled(omega))?,
        FieldStatistics::Classical => 1.0 / (beta.as_f64() * omega),
    };
    Ok(Complex64::new(re, weight * (omega * tau).cos()))
}

/// Anything that can be sampled as a memory kernel: returns `(D(tau), err)`.
pub trait Kernel: Sync {
    fn eval(&self, tau: f64) -> Result<(f64, f64)>;
}

/// `D = 0`, the free-oscillator injection.
#[derive(Debug, Clone, Copy, Default)]
pub struct ZeroKernel;

impl Kernel for ZeroKernel {
    fn eval(&self, _tau: f64) -> Result<(f64, f64)> {
        Ok((0.0, 0.0))
    }
}

/// The kernel of a free dipole in a thermal field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MemoryKernel {
    pub params: ReducedParams,
    pub stats: FieldStatistics,
    pub tol: f64,
    pub tau_min: f64,
}

impl MemoryKernel {
    pub fn new(params: ReducedParams, stats: FieldStatistics, tol: f64) -> Result<Self> {
        stats.check(params.beta_omega_i)?;
        if !(tol > 1e-12 && tol < 1e-2) {
            return Err(Error::domain("kernel tolerance must lie in (1e-12, 1e-2)", tol));
        }
        Ok(MemoryKernel {
            params,
            stats,
            tol,
            tau_min: DEFAULT_TAU_MIN,
        })
    }

    pub fn with_tau_min(mut self, tau_min: f64) -> Result<Self> {
        if !(tau_min > 0.0 && tau_min.is_finite()) {
            return Err(Error::domain("tau_min must be > 0", tau_min));
        }
        self.tau_min = tau_min;
        Ok(self)
    }

    /// Integrand of `D(tau)` at frequency `omega`, for `tau > 0`.
    pub fn integrand(&self, omega: f64, tau: f64) -> f64 {
        let com = ComState::from(&self.params);
        let d2 = com.delta_sq(tau).unwrap_or(0.0);
        let g = com.green_g(tau);
        self.integrand_with(omega, tau, d2, g)
    }

    fn integrand_with(&self, omega: f64, tau: f64, d2: f64, g: f64) -> f64 {
        if omega <= 0.0 {
            return 0.0;
        }
        let phase = 0.5 * omega * omega * g;
        let (wt_s, wt_c) = (omega * tau).sin_cos();
        // 2 Im Gamma / cos(omega tau)
        let fluct = match self.stats {
            FieldStatistics::Quantum => match self.params.beta_omega_i {
                Beta::Infinite => 1.0,
                Beta::Finite(b) => 1.0 + 2.0 / (b * omega).exp_m1(),
            },
            FieldStatistics::Classical => 2.0 / (self.params.beta_omega_i.as_f64() * omega),
        };
        let bracket = phase.cos() * wt_s + phase.sin() * fluct * wt_c;
        omega.powi(3) / (4.0 * PI * PI) * (-0.5 * omega * omega * d2).exp() * bracket
    }

    /// Majorant of the integrand, valid for `omega >= scale`.
    pub fn envelope(&self, tau: f64) -> Result<GaussianEnvelope> {
        let d2 = ComState::from(&self.params).delta_sq(tau)?;
        let scale = (2.0 / d2).sqrt();
        let fluct = match self.stats {
            FieldStatistics::Quantum => coth_half(self.params.beta_omega_i.scaled(scale))?,
            FieldStatistics::Classical => 2.0 / (self.params.beta_omega_i.as_f64() * scale),
        };
        Ok(GaussianEnvelope {
            amplitude: (1.0 + fluct) / (4.0 * PI * PI),
            power: 3.0,
            scale,
        })
    }

    /// `D(tau)` with an absolute error estimate.
    pub fn value(&self, tau: f64) -> Result<(f64, f64)> {
        if !tau.is_finite() {
            return Err(Error::domain("tau must be finite", tau));
        }
        if tau <= self.tau_min {
            return Err(Error::ShortTimeSingularity {
                tau,
                tau_min: self.tau_min,
            });
        }
        let com = ComState::from(&self.params);
        let d2 = com.delta_sq(tau)?;
        let g = com.green_g(tau);
        let env = self.envelope(tau)?;
        let mut r = integrate_semi_infinite(
            |w| self.integrand_with(w, tau, d2, g),
            env,
            &[Oscillation::Linear(tau), Oscillation::Chirp(g)],
            self.tol,
        );
        r.err += rounding_floor(&env, tau, g);
        if !r.converged || r.err > self.tol * r.value.abs() {
            let ray = self.value_on_rays(tau)?;
            if ray.converged && (!r.converged || ray.err < r.err) {
                r = ray;
            }
        }
        if !r.converged {
            return Err(Error::Convergence {
                what: format!("memory kernel at tau = {tau}"),
                value: r.value,
                err: r.err,
            });
        }
        Ok((r.value, r.err))
    }
}

impl MemoryKernel {
    /// `D(tau)` from contours rotated off the real axis.
    ///
    /// With `C` the fluctuation weight (`coth(beta w / 2)` or `2 / (beta w)`),
    /// the bracket equals `Im[(1 + C)/2 e^{i(G w^2/2 + w tau)} + (C - 1)/2 e^{i(G w^2/2 - w tau)}]`.
    /// Both terms are analytic in the closed sectors used here, so each
    /// integral can be taken along a ray where `e^{+-i w tau}` decays instead of
    /// oscillating. This avoids the cancellation that limits the real-axis
    /// quadrature when `D(tau)` is many orders below the integrand's scale.
    pub fn value_on_rays(&self, tau: f64) -> Result<QuadResult<f64>> {
        if tau <= self.tau_min {
            return Err(Error::ShortTimeSingularity {
                tau,
                tau_min: self.tau_min,
            });
        }
        let com = ComState::from(&self.params);
        let d2 = com.delta_sq(tau)?;
        let g = com.green_g(tau);
        let coef = Complex64::new(d2, -g) * 0.5;
        let beta = self.params.beta_omega_i;
        let stats = self.stats;

        let weight = move |w: Complex64, sign: f64| -> Complex64 {
            let c = match stats {
                FieldStatistics::Quantum => match beta {
                    Beta::Infinite => Complex64::new(1.0, 0.0),
                    Beta::Finite(b) => coth_half_complex(w * b),
                },
                FieldStatistics::Classical => 2.0 / (w * beta.as_f64()),
            };
            (c + sign) * 0.5
        };

        let mut total = QuadResult {
            value: 0.0,
            err: 0.0,
            n_evals: 0,
            converged: true,
        };
        let theta_max_down = 0.5 * d2.atan2(g);
        let terms = [(1.0, 0.25 * PI), (-1.0, -0.5 * theta_max_down)];
        for (sign, theta) in terms {
            if sign < 0.0 && stats == FieldStatistics::Quantum && beta.is_infinite() {
                continue;
            }
            let dir = Complex64::from_polar(1.0, theta);
            let alpha = (coef * dir * dir).re;
            let lambda = tau * theta.sin().abs();
            let end = ray_cutoff(alpha, lambda);
            let h = |t: f64| -> Complex64 {
                if t == 0.0 {
                    return Complex64::new(0.0, 0.0);
                }
                let w = dir * t;
                let expo = -coef * w * w + Complex64::new(0.0, sign * tau) * w;
                dir * w * w * w * weight(w, sign) * expo.exp()
            };
            let bp: Vec<f64> = (0..=32).map(|k| end * k as f64 / 32.0).collect();
            let r = integrate(
                h,
                &bp,
                Tolerance {
                    abs: 0.0,
                    rel: 0.1 * self.tol,
                },
                8000,
            );
            total.value += r.value.im / (4.0 * PI * PI);
            total.err += r.err / (4.0 * PI * PI);
            total.n_evals += r.n_evals;
            total.converged &= r.converged;
        }
        Ok(total)
    }
}

/// `coth(z / 2) = 1 + 2 / (e^z - 1)` for `Re z >= 0`.
fn coth_half_complex(z: Complex64) -> Complex64 {
    if z.norm() < 0.1 {
        1.0 + 2.0 / complex_exp_m1(z)
    } else {
        let e = (-z).exp();
        1.0 + 2.0 * e / (1.0 - e)
    }
}

/// `e^z - 1` without cancellation for small `|z|`.
fn complex_exp_m1(z: Complex64) -> Complex64 {
    if z.norm() < 0.1 {
        // Horner form of sum_{k=1}^{10} z^k / k!
        let mut acc = Complex64::new(1.0, 0.0);
        for k in (2..=10).rev() {
            acc = 1.0 + acc * z / k as f64;
        }
        acc * z
    } else {
        z.exp() - 1.0
    }
}

/// Point beyond which `t^3 exp(-alpha t^2 - lambda t)` stays below `1e-17`
/// of its maximum.
fn ray_cutoff(alpha: f64, lambda: f64) -> f64 {
    let phi = |t: f64| 3.0 * t.ln() - alpha * t * t - lambda * t;
    // stationary point of phi
    let t_star = if alpha > 0.0 {
        (-lambda + (lambda * lambda + 24.0 * alpha).sqrt()) / (4.0 * alpha)
    } else {
        3.0 / lambda
    };
    let target = phi(t_star) - 39.0;
    let mut hi = 2.0 * t_star;
    while phi(hi) > target {
        hi *= 2.0;
    }
    let mut lo = t_star;
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if phi(mid) > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi
}

/// Rounding error of the real-axis quadrature: the phases `w tau` and
/// `G w^2 / 2` carry relative error `eps`, weighted by the envelope.
fn rounding_floor(env: &GaussianEnvelope, tau: f64, g: f64) -> f64 {
    use statrs::function::gamma::gamma;
    let moment = |p: f64| 0.5 * env.scale.powf(p + 1.0) * gamma(0.5 * (p + 1.0));
    f64::EPSILON * env.amplitude * (moment(3.0) + tau * moment(4.0) + 0.5 * g * moment(5.0))
}

impl Kernel for MemoryKernel {
    fn eval(&self, tau: f64) -> Result<(f64, f64)> {
        self.value(tau)
    }
}

/// `D(tau)` with the default `tau_min`.
pub fn memory_kernel_d(tau: f64, params: &ReducedParams, stats: FieldStatistics, tol: f64) -> Result<(f64, f64)> {
    MemoryKernel::new(*params, stats, tol)?.value(tau)
}

/// A sampled memory kernel.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelTable {
    pub taus: Vec<f64>,
    pub values: Vec<f64>,
    pub err_estimates: Vec<f64>,
    pub stats: FieldStatistics,
    pub params: ReducedParams,
}

impl KernelTable {
    pub fn len(&self) -> usize {
        self.taus.len()
    }

    pub fn is_empty(&self) -> bool {
        self.taus.is_empty()
    }

    /// CSV with header `tau,D,err`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("tau,D,err\n");
        for i in 0..self.taus.len() {
            let _ = writeln!(
                out,
                "{:.16e},{:.16e},{:.16e}",
                self.taus[i], self.values[i], self.err_estimates[i]
            );
        }
        out
    }
}

fn check_grid(taus: &[f64], tau_min: f64) -> Result<()> {
    if taus.is_empty() {
        return Err(Error::Grid("tau grid is empty".into()));
    }
    if taus.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Grid("tau grid must be strictly increasing".into()));
    }
    if !(taus[0] > tau_min) {
        return Err(Error::ShortTimeSingularity { tau: taus[0], tau_min });
    }
    Ok(())
}

/// Per-point kernel values; failures are kept in place.
pub fn kernel_rows(taus: &[f64], kernel: &MemoryKernel) -> Vec<Result<(f64, f64)>> {
    taus.par_iter()
        .map(|&t| {
            kernel.value(t).map_err(|e| Error::KernelPoint {
                tau: t,
                source: Box::new(e),
            })
        })
        .collect()
}

pub fn kernel_table(taus: &[f64], params: &ReducedParams, stats: FieldStatistics, tol: f64) -> Result<KernelTable> {
    kernel_table_with(taus, &MemoryKernel::new(*params, stats, tol)?)
}

pub fn kernel_table_with(taus: &[f64], kernel: &MemoryKernel) -> Result<KernelTable> {
    check_grid(taus, kernel.tau_min)?;
    let rows = kernel_rows(taus, kernel);
    let mut values = Vec::with_capacity(rows.len());
    let mut errs = Vec::with_capacity(rows.len());
    for r in rows {
        let (v, e) = r?;
        values.push(v);
        errs.push(e);
    }
    Ok(KernelTable {
        taus: taus.to_vec(),
        values,
        err_estimates: errs,
        stats: kernel.stats,
        params: kernel.params,
    })
}

/// `D(tau; chi_k)` along a strictly decreasing `chi` sequence.
pub fn markov_limit_probe(
    tau: f64,
    chis: &[f64],
    params: &ReducedParams,
    stats: FieldStatistics,
    tol: f64,
) -> Result<Vec<(f64, f64)>> {
    if chis.is_empty() {
        return Err(Error::Grid("chi sequence is empty".into()));
    }
    if chis.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(Error::Grid("chi sequence must be strictly decreasing".into()));
    }
    chis.par_iter()
        .map(|&chi| memory_kernel_d(tau, &params.with_chi(chi)?, stats, tol))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(chi: f64, beta: Beta) -> ReducedParams {
        ReducedParams::new(chi, beta, 1.0, 1.0).unwrap()
    }

    #[test]
    fn gamma_examples() {
        let g = gamma_fn(3.0, 1e-300, Beta::Infinite, FieldStatistics::Quantum).unwrap();
        assert!((g - Complex64::new(0.0, 0.5)).norm() < 1e-15);
        for stats in [FieldStatistics::Quantum, FieldStatistics::Classical] {
            let g = gamma_fn(2.0, -1.0, Beta::Finite(1.0), stats).unwrap();
            assert_eq!(g.re, 0.0);
        }
        let q = gamma_fn(1.0, 0.3, Beta::Finite(1e-4), FieldStatistics::Quantum).unwrap();
        let c = gamma_fn(1.0, 0.3, Beta::Finite(1e-4), FieldStatistics::Classical).unwrap();
        assert!((q.im - c.im).abs() <= 1e-8 * c.im.abs());
        assert!(gamma_fn(1.0, 0.3, Beta::Infinite, FieldStatistics::Classical).is_err());
        assert!(gamma_fn(0.0, 0.3, Beta::Infinite, FieldStatistics::Quantum).is_err());
    }

    #[test]
    fn short_time_guard() {
        let p = params(1.0, Beta::Infinite);
        let e = memory_kernel_d(1e-3, &p, FieldStatistics::Quantum, 1e-8).unwrap_err();
        assert!(matches!(e, Error::ShortTimeSingularity { .. }));
        let k = MemoryKernel::new(p, FieldStatistics::Quantum, 1e-8)
            .unwrap()
            .with_tau_min(0.5)
            .unwrap();
        assert!(k.value(0.4).is_err());
        assert!(k.value(0.6).is_ok());
    }

    #[test]
    fn integrand_is_super_ohmic() {
        let k = MemoryKernel::new(params(1.0, Beta::Finite(10.0)), FieldStatistics::Quantum, 1e-8).unwrap();
        let peak = (1..400)
            .map(|i| k.integrand(i as f64 * 0.01, 1.0).abs())
            .fold(0.0, f64::max);
        assert!(k.integrand(1e-8, 1.0).abs() < 1e-20 * peak);
    }

    #[test]
    fn single_point_table_matches_scalar() {
        let p = params(1.0, Beta::Infinite);
        let t = kernel_table(&[1.0], &p, FieldStatistics::Quantum, 1e-9).unwrap();
        let (v, e) = memory_kernel_d(1.0, &p, FieldStatistics::Quantum, 1e-9).unwrap();
        assert_eq!(t.values[0].to_bits(), v.to_bits());
        assert_eq!(t.err_estimates[0].to_bits(), e.to_bits());
    }

    #[test]
    fn table_rejects_bad_grids() {
        let p = params(1.0, Beta::Infinite);
        assert!(kernel_table(&[], &p, FieldStatistics::Quantum, 1e-8).is_err());
        assert!(kernel_table(&[1.0, 0.5], &p, FieldStatistics::Quantum, 1e-8).is_err());
        assert!(kernel_table(&[1e-4, 0.5], &p, FieldStatistics::Quantum, 1e-8).is_err());
    }
}
