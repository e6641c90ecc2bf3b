//! Spectral distribution `mu(z)` of the amended equation.
//!
//! The integrand is built from the differences of Gaussians `K+-(x, y)`,
//! which are odd in `y`. The double integral of `u / (y + z)` grows linearly
//! in `x` for every `z`; the divergent piece is `z`-independent and only adds
//! `i C / z` to `mu`, a constant shift of the spring constant. It is removed
//! here by integrating `u / (y (y + z))` instead, i.e.
//!
//! ```text
//! mu(z) = -(i mu0 / pi) int_0^inf dx x^2 int dy u(x, y) / (y (y + z)).
//! ```
//!
//! The real part on the real axis, analyticity and conjugate symmetry are
//! unaffected by the subtraction.

use std::f64::consts::PI;
use std::fmt::Write as _;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{bose_occupancy, coth_half, Beta, FieldStatistics, ReducedParams};
use crate::quadrature::{integrate_adaptive, integrate_pv, QuadResult, Tolerance};

const INNER_PANELS: usize = 4000;
const OUTER_PANELS: usize = 4000;
/// Gaussians are cut at `GAUSS_CUT * sigma` from their centers.
const GAUSS_CUT: f64 = 7.0;

/// `exp(-(y + b)^2 / s2) - exp(-(y - b)^2 / s2)` without cancellation near `y = 0`.
fn gauss_pair(y: f64, b: f64, s2: f64) -> f64 {
    let w = 2.0 * y * b / s2;
    if w.abs() < 1.0 {
        -2.0 * (-(y * y + b * b) / s2).exp() * w.sinh()
    } else {
        (-(y + b) * (y + b) / s2).exp() - (-(y - b) * (y - b) / s2).exp()
    }
}

/// `gauss_pair(y, b, s2) / y`, smooth through `y = 0`.
fn gauss_pair_over_y(y: f64, b: f64, s2: f64) -> f64 {
    let w = 2.0 * y * b / s2;
    if w.abs() < 1.0 {
        let sinhc = if w == 0.0 { 1.0 } else { w.sinh() / w };
        -4.0 * b / s2 * (-(y * y + b * b) / s2).exp() * sinhc
    } else {
        gauss_pair(y, b, s2) / y
    }
}

fn check_x(x: f64) -> Result<()> {
    if !(x > 0.0 && x.is_finite()) {
        return Err(Error::domain("x must be > 0", x));
    }
    Ok(())
}

/// `(K+(x, y), K-(x, y))`.
pub fn k_pm(x: f64, y: f64, chi: f64, beta_omega_i: Beta) -> Result<(f64, f64)> {
    check_x(x)?;
    if !(chi > 0.0 && chi.is_finite()) {
        return Err(Error::domain("chi must be > 0", chi));
    }
    let g = Geometry::new(x, chi, coth_half(beta_omega_i)?);
    Ok((gauss_pair(y, g.b_plus, g.s2), gauss_pair(y, g.b_minus, g.s2)))
}

/// `u = K+ + n(beta omega_I x) (K+ + K-)`.
pub fn u_quantum(x: f64, y: f64, chi: f64, beta_omega_i: Beta) -> Result<f64> {
    let (kp, km) = k_pm(x, y, chi, beta_omega_i)?;
    let n = bose_occupancy(beta_omega_i.scaled(x))?;
    Ok(kp + n * (kp + km))
}

/// `u_c = (K+ - K-) / 2 + (K+ + K-) / (beta omega_I x)`.
pub fn u_classical(x: f64, y: f64, chi: f64, beta_omega_i: Beta) -> Result<f64> {
    FieldStatistics::Classical.check(beta_omega_i)?;
    let (kp, km) = k_pm(x, y, chi, beta_omega_i)?;
    let r = 1.0 / (beta_omega_i.as_f64() * x);
    Ok(0.5 * (kp - km) + r * (kp + km))
}

/// Centers and width of the Gaussians at a given `x`.
#[derive(Debug, Clone, Copy)]
struct Geometry {
    /// `x + chi x^2 / 2`
    b_plus: f64,
    /// `chi x^2 / 2 - x`
    b_minus: f64,
    /// `chi x^2 coth(beta omega_I / 2)`
    s2: f64,
}

impl Geometry {
    fn new(x: f64, chi: f64, c: f64) -> Self {
        let s = 0.5 * chi * x * x;
        Geometry {
            b_plus: x + s,
            b_minus: s - x,
            s2: chi * x * x * c,
        }
    }

    fn sigma(&self) -> f64 {
        self.s2.sqrt()
    }

    fn reach(&self) -> f64 {
        self.b_plus.abs().max(self.b_minus.abs()) + GAUSS_CUT * self.sigma()
    }

    fn y_breakpoints(&self) -> Vec<f64> {
        let sig = self.sigma();
        let mut v = Vec::with_capacity(14);
        for b in [self.b_plus, self.b_minus] {
            for c in [b, -b] {
                v.extend([c - 2.0 * sig, c, c + 2.0 * sig]);
            }
        }
        v
    }
}

/// The integrand `u(x, y) = p(x) K+ + q(x) K-` for one field statistics.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Integrand {
    chi: f64,
    c: f64,
    beta: Beta,
    stats: FieldStatistics,
}

impl Integrand {
    fn new(params: &ReducedParams, stats: FieldStatistics) -> Result<Self> {
        stats.check(params.beta_omega_i)?;
        Ok(Integrand {
            chi: params.chi,
            c: params.thermal_factor(),
            beta: params.beta_omega_i,
            stats,
        })
    }

    fn weights(&self, x: f64) -> (f64, f64) {
        match self.stats {
            FieldStatistics::Quantum => {
                let n = bose_occupancy(self.beta.scaled(x)).unwrap_or(0.0);
                (1.0 + n, n)
            }
            FieldStatistics::Classical => {
                let r = 1.0 / (self.beta.as_f64() * x);
                (0.5 + r, r - 0.5)
            }
        }
    }

    fn geometry(&self, x: f64) -> Geometry {
        Geometry::new(x, self.chi, self.c)
    }

    fn u(&self, x: f64, y: f64) -> f64 {
        let g = self.geometry(x);
        let (p, q) = self.weights(x);
        p * gauss_pair(y, g.b_plus, g.s2) + q * gauss_pair(y, g.b_minus, g.s2)
    }

    fn u_over_y(&self, g: &Geometry, pq: (f64, f64), y: f64) -> f64 {
        pq.0 * gauss_pair_over_y(y, g.b_plus, g.s2) + pq.1 * gauss_pair_over_y(y, g.b_minus, g.s2)
    }

    /// Values of `x > 0` at which one of the centers `+-b+-(x)` passes
    /// through `y0`, together with the local crossing width in `x`.
    fn crossings(&self, y0: f64, y_width: f64) -> Vec<(f64, f64)> {
        let chi = self.chi;
        let mut out = Vec::new();
        let mut push = |x: f64, slope: f64| {
            if x > 0.0 && x.is_finite() {
                let sig = self.geometry(x).sigma();
                let w = (sig.max(y_width) / slope.abs().max(1e-3)).min(0.5 * x);
                out.push((x, w));
            }
        };
        let a = y0.abs();
        // b+ = |y0|
        let x = ((1.0 + 2.0 * chi * a).sqrt() - 1.0) / chi;
        push(x, 1.0 + chi * x);
        // b- = +-y0
        for v in [y0, -y0] {
            let disc = 1.0 + 2.0 * chi * v;
            if disc >= 0.0 {
                for sgn in [1.0, -1.0] {
                    let x = (1.0 + sgn * disc.sqrt()) / chi;
                    push(x, chi * x - 1.0);
                }
            }
        }
        out
    }

    fn x_breakpoints(&self, y0: f64, y_width: f64, hi: f64) -> Vec<f64> {
        let mut bp = vec![0.0, hi];
        for (x, w) in self.crossings(y0, y_width) {
            for k in [-3.0, -1.0, 0.0, 1.0, 3.0] {
                bp.push(x + k * w);
            }
        }
        bp.extend([1.0 / self.chi, 2.0 / self.chi]);
        bp.retain(|&x| x >= 0.0 && x <= hi);
        bp
    }

    /// Start of the algebraic tail of the complex-`z` and principal-value
    /// `x`-integrals.
    fn x_split(&self, y0: f64, y_width: f64) -> f64 {
        let cross = self
            .crossings(y0, y_width)
            .iter()
            .map(|(x, w)| x + 4.0 * w)
            .fold(0.0, f64::max);
        (2.0 * cross)
            .max(10.0 * (self.c / self.chi).sqrt())
            .max(4.0 / self.chi)
            .max(10.0)
    }

    /// Beyond this `x`, `u(x, y)` is below `e^-45` for every `|y| <= |y0|`.
    fn x_max(&self, y0: f64) -> f64 {
        let k = (45.0 * self.chi * self.c).sqrt();
        let a = 1.0 + k;
        (a + (a * a + 2.0 * self.chi * y0.abs()).sqrt()) / self.chi
    }
}

fn inside(lo: f64, hi: f64, pts: impl IntoIterator<Item = f64>) -> Vec<f64> {
    let mut v = vec![lo, hi];
    v.extend(pts.into_iter().filter(|&p| p > lo && p < hi));
    v
}

/// Inner tolerance at `x` such that the absolute parts integrate (against
/// `x^2`) to at most `outer_abs`.
fn sub_tol(tol: f64, outer_abs: f64, x: f64, factor: f64) -> Tolerance {
    Tolerance {
        abs: 0.5 * factor * outer_abs / (1.0 + x.powi(4)),
        rel: factor * tol,
    }
}

/// Inner-to-outer tolerance ratios tried in turn by the nested integrals.
const INNER_FACTORS: [f64; 2] = [1e-2, 1e-4];

/// `int_0^inf g(x) dx` split at `split`, with the tail mapped by `t = 1 / x`.
fn integrate_with_tail<T, F>(mut g: F, head_bp: &[f64], split: f64, tol: Tolerance) -> QuadResult<T>
where
    T: crate::quadrature::QuadValue,
    F: FnMut(f64) -> (T, f64),
{
    let head = integrate_adaptive(&mut g, head_bp, tol, OUTER_PANELS);
    let t_end = 1.0 / split;
    let tail_bp: Vec<f64> = (0..=8).map(|k| t_end * k as f64 / 8.0).collect();
    let tail = integrate_adaptive(
        |t: f64| {
            if t == 0.0 {
                return (T::default(), 0.0);
            }
            let (v, e) = g(1.0 / t);
            let j = 1.0 / (t * t);
            (v * j, e * j)
        },
        &tail_bp,
        tol,
        OUTER_PANELS,
    );
    QuadResult {
        value: head.value + tail.value,
        err: head.err + tail.err,
        n_evals: head.n_evals + tail.n_evals,
        converged: head.converged && tail.converged,
    }
}

/// `mu` at a real frequency (boundary value) or at a point of the upper half plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectrumSample {
    pub omega: Option<f64>,
    pub z: Option<Complex64>,
    pub re_mu: f64,
    pub im_mu: f64,
    pub re_err: f64,
    pub im_err: f64,
    pub stats: FieldStatistics,
}

impl SpectrumSample {
    pub fn mu(&self) -> Complex64 {
        Complex64::new(self.re_mu, self.im_mu)
    }

    /// Total error bound `re_err + im_err`.
    pub fn err(&self) -> f64 {
        self.re_err + self.im_err
    }

    /// The point as a complex number (`omega + 0i` for boundary samples).
    pub fn point(&self) -> Complex64 {
        match (self.omega, self.z) {
            (Some(w), _) => Complex64::new(w, 0.0),
            (None, Some(z)) => z,
            (None, None) => Complex64::new(f64::NAN, f64::NAN),
        }
    }
}

/// CSV with header `omega,re_mu,im_mu,re_err,im_err,stats`; if any sample
/// sits off the real axis the point is written as `z_re,z_im` instead.
pub fn samples_to_csv(samples: &[SpectrumSample]) -> String {
    let all_real = samples.iter().all(|s| s.omega.is_some());
    let mut out = String::new();
    if all_real {
        out.push_str("omega,re_mu,im_mu,re_err,im_err,stats\n");
    } else {
        out.push_str("z_re,z_im,re_mu,im_mu,re_err,im_err,stats\n");
    }
    for s in samples {
        if all_real {
            let _ = write!(out, "{:.16e},", s.omega.unwrap_or(f64::NAN));
        } else {
            let p = s.point();
            let _ = write!(out, "{:.16e},{:.16e},", p.re, p.im);
        }
        let _ = writeln!(
            out,
            "{:.16e},{:.16e},{:.16e},{:.16e},{}",
            s.re_mu,
            s.im_mu,
            s.re_err,
            s.im_err,
            s.stats.as_str()
        );
    }
    out
}

/// Anything that can play the role of `mu`.
pub trait SpectralFunction: Sync {
    fn stats(&self) -> FieldStatistics;
    fn boundary(&self, omega: f64) -> Result<SpectrumSample>;
    fn complex(&self, z: Complex64) -> Result<SpectrumSample>;
}

/// `mu = 0`, the free-oscillator injection.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZeroSpectrum(pub FieldStatistics);

impl SpectralFunction for ZeroSpectrum {
    fn stats(&self) -> FieldStatistics {
        self.0
    }

    fn boundary(&self, omega: f64) -> Result<SpectrumSample> {
        Ok(SpectrumSample {
            omega: Some(omega),
            z: None,
            re_mu: 0.0,
            im_mu: 0.0,
            re_err: 0.0,
            im_err: 0.0,
            stats: self.0,
        })
    }

    fn complex(&self, z: Complex64) -> Result<SpectrumSample> {
        Ok(SpectrumSample {
            omega: None,
            z: Some(z),
            re_mu: 0.0,
            im_mu: 0.0,
            re_err: 0.0,
            im_err: 0.0,
            stats: self.0,
        })
    }
}

/// The spectral distribution of a free dipole.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Spectrum {
    pub params: ReducedParams,
    pub stats: FieldStatistics,
    pub tol: f64,
    integrand: Integrand,
}

impl Spectrum {
    pub fn new(params: ReducedParams, stats: FieldStatistics, tol: f64) -> Result<Self> {
        if !(tol > 0.0 && tol < 1.0) {
            return Err(Error::domain("spectrum tolerance must lie in (0, 1)", tol));
        }
        Ok(Spectrum {
            params,
            stats,
            tol,
            integrand: Integrand::new(&params, stats)?,
        })
    }

    /// Outer tolerance: relative `tol`, with an absolute floor of
    /// `1e-3 tol mu0` on `mu` (`scale` converts to the integral's units).
    fn outer_tol(&self, scale: f64) -> Tolerance {
        Tolerance {
            abs: 1e-3 * self.tol * scale,
            rel: self.tol,
        }
    }

    /// `u(x, y)` for this statistics.
    pub fn u(&self, x: f64, y: f64) -> f64 {
        self.integrand.u(x, y)
    }

    /// `int dy u(x, y) / (y (y + z))`, folded onto `y >= 0`: `u / y` is even,
    /// so the integral equals `int_0^inf (u / y) 2z / (z^2 - y^2) dy`, which
    /// avoids cancelling the mirror-image Gaussians against each other. The
    /// value of `u / y` at `|Re z|` is subtracted and its integral added back
    /// in closed form, `int_0^R 2z / (z^2 - y^2) dy = ln((z + R) / (z - R))`.
    fn inner_complex(&self, x: f64, z: Complex64, factor: f64) -> (Complex64, f64) {
        let tol = sub_tol(self.tol, self.outer_tol(1.0).abs, x, factor);
        let f = &self.integrand;
        let g = f.geometry(x);
        let pq = f.weights(x);
        let reach = g.reach();
        let (a, h) = (z.re.abs(), z.im);
        let z2 = z * z;
        let v_a = if a < reach { f.u_over_y(&g, pq, a) } else { 0.0 };
        let bp = inside(
            0.0,
            reach,
            g.y_breakpoints()
                .into_iter()
                .chain([a - 5.0 * h, a - h, a, a + h, a + 5.0 * h]),
        );
        let r = integrate_adaptive(
            |y: f64| ((f.u_over_y(&g, pq, y) - v_a) * 2.0 * z / (z2 - y * y), 0.0),
            &bp,
            tol,
            INNER_PANELS,
        );
        let closed = (z + reach).ln() - (z - reach).ln();
        (r.value + closed * v_a, r.err)
    }

    /// `P int dy u(x, y) / (y (y + omega))`, folded onto `y >= 0` as in
    /// [`Self::inner_complex`]; the pole sits at `y = |omega|`. The pole value
    /// of `u / y` is subtracted and its principal value,
    /// `sign(omega) ln((R + |omega|) / (R - |omega|))`, added back.
    fn inner_pv(&self, x: f64, omega: f64, outer_abs: f64, factor: f64) -> (f64, f64) {
        let tol = sub_tol(self.tol, outer_abs, x, factor);
        let f = &self.integrand;
        let g = f.geometry(x);
        let pq = f.weights(x);
        let reach = g.reach();
        let pole = omega.abs();
        let v_p = if pole < reach { f.u_over_y(&g, pq, pole) } else { 0.0 };
        let bp = g.y_breakpoints();
        // 2 omega / (omega^2 - y^2) = -2 omega / ((y - |omega|)(y + |omega|))
        let r = integrate_pv(
            |y: f64| (-2.0 * omega * (f.u_over_y(&g, pq, y) - v_p) / (y + pole), 0.0),
            pole,
            g.sigma().min(0.5 * pole),
            0.0,
            reach,
            &bp,
            tol,
            INNER_PANELS,
        );
        let closed = if v_p != 0.0 {
            omega.signum() * ((reach + pole) / (reach - pole)).ln()
        } else {
            0.0
        };
        (r.value + closed * v_p, r.err)
    }

    pub fn mu_complex(&self, z: Complex64) -> Result<SpectrumSample> {
        if !(z.im > 0.0) || !z.re.is_finite() || !z.im.is_finite() {
            return Err(Error::domain("mu_complex needs Im z > 0", z.im));
        }
        let f = &self.integrand;
        let split = f.x_split(-z.re, z.im);
        let bp = f.x_breakpoints(-z.re, z.im, split);
        let mut r = QuadResult::default();
        for factor in INNER_FACTORS {
            r = integrate_with_tail(
                |x: f64| {
                    let (v, e) = self.inner_complex(x, z, factor);
                    (v * (x * x), e * x * x)
                },
                &bp,
                split,
                self.outer_tol(1.0),
            );
            if r.converged {
                break;
            }
        }
        let scale = self.params.mu0 / PI;
        // -(i mu0 / pi) * J
        let mu = Complex64::new(0.0, -scale) * r.value;
        if !r.converged {
            return Err(Error::Convergence {
                what: format!("mu({z})"),
                value: mu.norm(),
                err: scale * r.err,
            });
        }
        Ok(SpectrumSample {
            omega: None,
            z: Some(z),
            re_mu: mu.re,
            im_mu: mu.im,
            re_err: scale * r.err,
            im_err: scale * r.err,
            stats: self.stats,
        })
    }

    /// `Re mu(omega + i0) = (mu0 / omega) int dx x^2 u(x, -omega)`.
    pub fn re_mu_boundary(&self, omega: f64) -> Result<(f64, f64)> {
        check_omega(omega)?;
        let f = &self.integrand;
        let y0 = -omega;
        let hi = f.x_max(y0);
        let bp = f.x_breakpoints(y0, 0.0, hi);
        let r = integrate_adaptive(
            |x: f64| (if x > 0.0 { x * x * f.u(x, y0) } else { 0.0 }, 0.0),
            &bp,
            self.outer_tol(omega.abs()),
            OUTER_PANELS,
        );
        let scale = self.params.mu0 / omega;
        if !r.converged {
            return Err(Error::Convergence {
                what: format!("Re mu({omega} + i0)"),
                value: scale * r.value,
                err: scale.abs() * r.err,
            });
        }
        Ok((scale * r.value, scale.abs() * r.err))
    }

    /// `Im mu(omega + i0) = -(mu0 / pi) int dx x^2 P int dy u / (y (y + omega))`.
    pub fn im_mu_boundary(&self, omega: f64) -> Result<(f64, f64)> {
        self.im_mu_with_floor(omega, 0.0)
    }

    /// As [`Self::im_mu_boundary`], with an absolute error floor on `Im mu`.
    fn im_mu_with_floor(&self, omega: f64, floor: f64) -> Result<(f64, f64)> {
        check_omega(omega)?;
        let scale = self.params.mu0 / PI;
        let mut tol = self.outer_tol(1.0);
        tol.abs = tol.abs.max(floor / scale);
        let f = &self.integrand;
        let y0 = -omega;
        let split = f.x_split(y0, 0.0);
        let bp = f.x_breakpoints(y0, 0.0, split);
        let mut r = QuadResult::default();
        for factor in INNER_FACTORS {
            r = integrate_with_tail(
                |x: f64| {
                    let (v, e) = self.inner_pv(x, omega, tol.abs, factor);
                    (v * x * x, e * x * x)
                },
                &bp,
                split,
                tol,
            );
            if r.converged {
                break;
            }
        }
        if !r.converged {
            return Err(Error::Convergence {
                what: format!("Im mu({omega} + i0)"),
                value: -scale * r.value,
                err: scale * r.err,
            });
        }
        Ok((-scale * r.value, scale * r.err))
    }

    /// Both parts, with `Im mu` resolved to `tol |Re mu|` where it is small.
    pub fn mu_boundary(&self, omega: f64) -> Result<SpectrumSample> {
        let (re, re_err) = self.re_mu_boundary(omega)?;
        let (im, im_err) = self.im_mu_with_floor(omega, self.tol * re.abs())?;
        Ok(SpectrumSample {
            omega: Some(omega),
            z: None,
            re_mu: re,
            im_mu: im,
            re_err,
            im_err,
            stats: self.stats,
        })
    }
}

fn check_omega(omega: f64) -> Result<()> {
    if omega == 0.0 || !omega.is_finite() {
        return Err(Error::domain("boundary value needs a finite omega != 0", omega));
    }
    Ok(())
}

impl SpectralFunction for Spectrum {
    fn stats(&self) -> FieldStatistics {
        self.stats
    }

    fn boundary(&self, omega: f64) -> Result<SpectrumSample> {
        self.mu_boundary(omega)
    }

    fn complex(&self, z: Complex64) -> Result<SpectrumSample> {
        self.mu_complex(z)
    }
}

pub fn mu_complex(z: Complex64, params: &ReducedParams, stats: FieldStatistics, tol: f64) -> Result<SpectrumSample> {
    Spectrum::new(*params, stats, tol)?.mu_complex(z)
}

pub fn mu_boundary(omega: f64, params: &ReducedParams, stats: FieldStatistics, tol: f64) -> Result<SpectrumSample> {
    Spectrum::new(*params, stats, tol)?.mu_boundary(omega)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pair_forms_agree() {
        for (y, b, s2) in [
            (0.3f64, 1.2f64, 0.7f64),
            (-2.0, 0.1, 3.0),
            (1e-9, 2.0, 1.0),
            (5.0, 5.0, 0.5),
        ] {
            let direct = (-(y + b) * (y + b) / s2).exp() - (-(y - b) * (y - b) / s2).exp();
            let p: f64 = gauss_pair(y, b, s2);
            assert!((p - direct).abs() <= 1e-15 + 1e-12 * direct.abs());
            assert!((gauss_pair_over_y(y, b, s2) * y - p).abs() <= 1e-14 * p.abs().max(1e-300));
        }
        // derivative at the origin
        let (b, s2) = (0.8f64, 0.5f64);
        let d = -4.0 * b / s2 * (-b * b / s2).exp();
        assert!((gauss_pair_over_y(0.0, b, s2) - d).abs() < 1e-15);
    }

    #[test]
    fn k_pm_examples() {
        assert_eq!(k_pm(1.0, 0.0, 1.0, Beta::Infinite).unwrap(), (0.0, 0.0));
        let (kp, _) = k_pm(1.0, 1.0, 1.0, Beta::Infinite).unwrap();
        assert!((kp - ((-6.25f64).exp() - (-0.25f64).exp())).abs() < 1e-15);
        let a = k_pm(1.0, 0.7, 1.0, Beta::Infinite).unwrap();
        let b = k_pm(1.0, -0.7, 1.0, Beta::Infinite).unwrap();
        assert_eq!((a.0, a.1), (-b.0, -b.1));
        assert!(k_pm(0.0, 0.7, 1.0, Beta::Infinite).is_err());
    }

    #[test]
    fn classical_needs_temperature() {
        assert!(u_classical(1.0, 1.0, 1.0, Beta::Infinite).is_err());
        let p = ReducedParams::new(1.0, Beta::Infinite, 1.0, 1.0).unwrap();
        assert!(Spectrum::new(p, FieldStatistics::Classical, 1e-8).is_err());
    }

    #[test]
    fn crossings_hit_the_centers() {
        let p = ReducedParams::new(0.7, Beta::Finite(2.0), 1.0, 1.0).unwrap();
        let f = Integrand::new(&p, FieldStatistics::Quantum).unwrap();
        for y0 in [-3.0, -0.1, 0.1, 2.5] {
            let xs = f.crossings(y0, 0.0);
            assert!(!xs.is_empty());
            for (x, _) in xs {
                let g = f.geometry(x);
                let hit = [g.b_plus, -g.b_plus, g.b_minus, -g.b_minus]
                    .iter()
                    .any(|c| (c - y0).abs() < 1e-9 * (1.0 + y0.abs()));
                assert!(hit, "x = {x}, y0 = {y0}");
            }
        }
    }

    #[test]
    fn domain_errors() {
        let p = ReducedParams::new(1.0, Beta::Infinite, 1.0, 1.0).unwrap();
        let s = Spectrum::new(p, FieldStatistics::Quantum, 1e-8).unwrap();
        assert!(s.mu_complex(Complex64::new(1.0, 0.0)).is_err());
        assert!(s.mu_complex(Complex64::new(1.0, -1.0)).is_err());
        assert!(s.mu_boundary(0.0).is_err());
    }
}
