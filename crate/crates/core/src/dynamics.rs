//! Classical Abraham-Lorentz reference dynamics and the amended dynamics.
//!
//! Frequencies follow the `e^{-i omega t}` convention: a characteristic root
//! `z` contributes `e^{-i z t}`, so roots in the upper half plane grow.
//! Writing `z = i s` turns `i gamma z^3 + z^2 - omega0^2 = 0` into the real
//! cubic `gamma s^3 - s^2 - omega0^2 = 0` and each mode into `e^{s t}`.

use std::f64::consts::PI;
use std::fmt::{self, Write as _};

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::Kernel;
use crate::model::ReducedParams;
use crate::spectrum::SpectralFunction;

/// Which equation generated a trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TrajectoryModel {
    ClassicalAl,
    AmendedSpectral,
    AmendedVolterra,
}

impl TrajectoryModel {
    pub fn as_str(self) -> &'static str {
        match self {
            TrajectoryModel::ClassicalAl => "classical-al",
            TrajectoryModel::AmendedSpectral => "amended",
            TrajectoryModel::AmendedVolterra => "volterra",
        }
    }
}

impl fmt::Display for TrajectoryModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// `r(t)` sampled on a strictly increasing time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub ts: Vec<f64>,
    pub rs: Vec<f64>,
    pub model: TrajectoryModel,
    /// Unit of `ts`, e.g. `1/omega0` or `1/omega_I`.
    pub time_unit: &'static str,
    /// Parameter snapshot and solver notes, in insertion order.
    pub meta: Vec<(String, String)>,
}

impl Trajectory {
    fn new(model: TrajectoryModel, time_unit: &'static str) -> Self {
        Trajectory {
            ts: Vec::new(),
            rs: Vec::new(),
            model,
            time_unit,
            meta: Vec::new(),
        }
    }

    fn note(&mut self, key: &str, value: impl fmt::Display) {
        self.meta.push((key.to_string(), value.to_string()));
    }

    pub fn len(&self) -> usize {
        self.ts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ts.is_empty()
    }

    pub fn meta(&self, key: &str) -> Option<&str> {
        self.meta.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn max_abs(&self) -> f64 {
        self.rs.iter().fold(0.0, |m, r| m.max(r.abs()))
    }

    /// Successive local maxima of `|r|`, as `(t, |r|)`.
    pub fn peaks(&self) -> Vec<(f64, f64)> {
        let a: Vec<f64> = self.rs.iter().map(|r| r.abs()).collect();
        (1..a.len().saturating_sub(1))
            .filter(|&i| a[i] > a[i - 1] && a[i] >= a[i + 1])
            .map(|i| (self.ts[i], a[i]))
            .collect()
    }

    /// CSV `t,r` preceded by `#` comment lines with the model and metadata.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# model={}", self.model);
        let _ = writeln!(out, "# time_unit={}", self.time_unit);
        for (k, v) in &self.meta {
            let _ = writeln!(out, "# {k}={v}");
        }
        out.push_str("t,r\n");
        for (t, r) in self.ts.iter().zip(&self.rs) {
            let _ = writeln!(out, "{t:.16e},{r:.16e}");
        }
        out
    }
}

/// The three roots of `i gamma z^3 + z^2 - omega0^2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CharRoots {
    /// `roots[0]` is the purely imaginary runaway root; `roots[1]` and
    /// `roots[2]` are the damped pair with `Re > 0` and `Re < 0`.
    pub roots: [Complex64; 3],
    pub gamma: f64,
    pub omega0: f64,
}

impl CharRoots {
    pub fn polynomial(&self, z: Complex64) -> Complex64 {
        Complex64::i() * self.gamma * z * z * z + z * z - self.omega0 * self.omega0
    }

    /// `|p(z)| / max(1, gamma |z|^3)` for each root.
    pub fn residuals(&self) -> [f64; 3] {
        self.roots
            .map(|z| self.polynomial(z).norm() / (self.gamma * z.norm().powi(3)).max(1.0))
    }

    pub fn runaway(&self) -> Complex64 {
        self.roots[0]
    }

    /// Mode exponents `s = -i z`, so that mode `k` is `e^{s_k t}`.
    pub fn exponents(&self) -> [Complex64; 3] {
        self.roots.map(|z| -Complex64::i() * z)
    }
}

fn check_positive(what: &'static str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain { what, value: v })
    }
}

pub fn al_char_roots(gamma: f64, omega0: f64) -> Result<CharRoots> {
    check_positive("gamma must be > 0", gamma)?;
    check_positive("omega0 must be > 0", omega0)?;
    let w2 = omega0 * omega0;
    let f = |s: f64| (gamma * s - 1.0) * s * s - w2;
    // f < 0 on [0, 1/gamma]; the single real root lies beyond.
    let mut lo = 1.0 / gamma;
    let mut hi = lo + omega0.max(gamma * w2).max(1.0);
    while f(hi) <= 0.0 {
        lo = hi;
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let mut s1 = 0.5 * (lo + hi);
    for _ in 0..3 {
        let d = 3.0 * gamma * s1 * s1 - 2.0 * s1;
        if d != 0.0 {
            s1 -= f(s1) / d;
        }
    }
    // Deflated quadratic gamma s^2 + b s + c with b = gamma s1 - 1 and
    // c = s1 b, where b = omega0^2 / s1^2 avoids cancellation.
    let b = w2 / (s1 * s1);
    let c = w2 / s1;
    let disc = Complex64::new(b * b - 4.0 * gamma * c, 0.0).sqrt();
    let sa = (-b + disc) / (2.0 * gamma);
    let sb = (-b - disc) / (2.0 * gamma);
    let to_z = |s: Complex64| Complex64::i() * s;
    let (mut za, mut zb) = (to_z(sa), to_z(sb));
    if za.re < zb.re {
        std::mem::swap(&mut za, &mut zb);
    }
    let mut roots = CharRoots {
        roots: [Complex64::new(0.0, s1), za, zb],
        gamma,
        omega0,
    };
    // one Newton polish on the pair
    for k in 1..3 {
        let z = roots.roots[k];
        let dp = 3.0 * Complex64::i() * gamma * z * z + 2.0 * z;
        if dp.norm() > 0.0 {
            roots.roots[k] = z - roots.polynomial(z) / dp;
        }
    }
    Ok(roots)
}

/// Exact mode superposition for the Abraham-Lorentz equation.
///
/// Without suppression the three amplitudes match `r(0)`, `r'(0)` and
/// `r''(0) = 0`; with suppression the runaway amplitude is zero and the two
/// damped modes match `r(0)`, `r'(0)`.
pub fn al_trajectory(
    gamma: f64,
    omega0: f64,
    r0: f64,
    v0: f64,
    t_end: f64,
    dt: f64,
    suppress_runaway: bool,
) -> Result<Trajectory> {
    check_positive("T must be > 0", t_end)?;
    check_positive("dt must be > 0", dt)?;
    let roots = al_char_roots(gamma, omega0)?;
    let s = roots.exponents();
    let coeffs = if suppress_runaway {
        let (s1, s2) = (s[1], s[2]);
        [
            Complex64::new(0.0, 0.0),
            (v0 - s2 * r0) / (s1 - s2),
            (v0 - s1 * r0) / (s2 - s1),
        ]
    } else {
        let rate = s[0].re;
        if rate * t_end > f64::MAX.ln() - 50.0 {
            return Err(Error::Overflow {
                t: t_end,
                timescale: 1.0 / rate,
            });
        }
        // Lagrange form of the Vandermonde inverse for moments (r0, v0, 0).
        let c =
            |k: usize, i: usize, j: usize| (s[i] * s[j] * r0 - (s[i] + s[j]) * v0) / ((s[k] - s[i]) * (s[k] - s[j]));
        [c(0, 1, 2), c(1, 0, 2), c(2, 0, 1)]
    };
    let n = (t_end / dt).round() as usize;
    let mut traj = Trajectory::new(TrajectoryModel::ClassicalAl, "1/omega0");
    traj.note("gamma", gamma);
    traj.note("omega0", omega0);
    traj.note("r0", r0);
    traj.note("v0", v0);
    traj.note("suppress_runaway", suppress_runaway);
    traj.note("runaway_timescale", 1.0 / s[0].re);
    for k in 0..=n {
        let t = (k as f64 * dt).min(t_end);
        let r: Complex64 = (0..3).map(|m| coeffs[m] * (s[m] * t).exp()).sum();
        traj.ts.push(t);
        traj.rs.push(r.re);
    }
    Ok(traj)
}

const RESONANCE_FLOOR: f64 = 1e-12;

fn response(omega0: f64, z: Complex64, mu: Complex64) -> Result<Complex64> {
    let den = omega0 * omega0 - z * z - Complex64::i() * z * mu;
    if den.norm() < RESONANCE_FLOOR {
        return Err(Error::NearResonance {
            omega: z.re,
            modulus: den.norm(),
        });
    }
    Ok(den.inv())
}

/// `alpha(omega) = 1 / (omega0^2 - omega^2 - i omega mu(omega + i0))`.
pub fn amended_response(
    omegas: &[f64],
    params: &ReducedParams,
    spectrum: &dyn SpectralFunction,
) -> Result<Vec<Complex64>> {
    if omegas.iter().any(|&w| w == 0.0 || !w.is_finite()) {
        return Err(Error::Grid("response grid must exclude 0".into()));
    }
    let w0 = params.omega0_over_omega_i;
    omegas
        .par_iter()
        .map(|&w| {
            let mu = spectrum.boundary(w)?.mu();
            response(w0, Complex64::new(w, 0.0), mu)
        })
        .collect()
}

/// Synthesis window in units of the requested `T`.
const WINDOW_FACTOR: usize = 8;
/// `eps T` for the contour shift `omega -> omega + i eps`.
const SHIFT_T: f64 = 2.5;
const BANDWIDTH_LIMIT: f64 = 1e-6;
/// Grid panels of the memory sum integrated with Gauss-Legendre moments.
const NEAR_PANELS: usize = 64;

/// Cubic Hermite interpolant on a sorted, nonuniform grid.
struct Hermite {
    xs: Vec<f64>,
    ys: Vec<Complex64>,
    ds: Vec<Complex64>,
}

impl Hermite {
    fn new(xs: Vec<f64>, ys: Vec<Complex64>) -> Self {
        let n = xs.len();
        let slope = |i: usize| (ys[i + 1] - ys[i]) / (xs[i + 1] - xs[i]);
        let width = |i: usize| xs[i + 1] - xs[i];
        // three-point slopes, exact for quadratics
        let ds = (0..n)
            .map(|i| {
                if n == 2 {
                    slope(0)
                } else if i == 0 {
                    slope(0) + (slope(0) - slope(1)) * width(0) / (width(0) + width(1))
                } else if i == n - 1 {
                    let (a, b) = (n - 3, n - 2);
                    slope(b) + (slope(b) - slope(a)) * width(b) / (width(a) + width(b))
                } else {
                    let (h0, h1) = (width(i - 1), width(i));
                    (slope(i) * h0 + slope(i - 1) * h1) / (h0 + h1)
                }
            })
            .collect();
        Hermite { xs, ys, ds }
    }

    fn at(&self, x: f64) -> Complex64 {
        let n = self.xs.len();
        let i = match self.xs.partition_point(|&v| v <= x) {
            0 => 0,
            p => (p - 1).min(n - 2),
        };
        let h = self.xs[i + 1] - self.xs[i];
        let t = (x - self.xs[i]) / h;
        let (t2, t3) = (t * t, t * t * t);
        self.ys[i] * (2.0 * t3 - 3.0 * t2 + 1.0)
            + self.ds[i] * h * (t3 - 2.0 * t2 + t)
            + self.ys[i + 1] * (-2.0 * t3 + 3.0 * t2)
            + self.ds[i + 1] * h * (t3 - t2)
    }
}

/// Nodes on `[-top, top]` for tabulating `mu(omega + i eps)`: uniform
/// spacing `h` out to `core`, geometric beyond.
fn mu_nodes(h: f64, core: f64, top: f64) -> Vec<f64> {
    let mut pos = Vec::new();
    let mut w = 0.0;
    while w < core {
        pos.push(w);
        w += h;
    }
    let mut step = h;
    while w < top {
        pos.push(w);
        step *= 1.05;
        w += step;
    }
    pos.push(w);
    pos
}

/// Amended trajectory by Fourier synthesis.
///
/// The response `alpha(z) = 1 / (omega0^2 - z^2 - i z mu(z))` is sampled on
/// the line `z = omega + i eps` with spacing `2 pi / (8 T)`. The free
/// oscillator part is subtracted from both basis responses `alpha` and
/// `-i z alpha` and added back in closed form, so the transform only sees
/// the smooth remainder. `mu` is tabulated on an adaptive grid and
/// interpolated. The two syntheses are combined to match `r(0)` and `r'(0)`.
pub fn amended_trajectory(
    r0: f64,
    v0: f64,
    t_end: f64,
    n_samples: usize,
    params: &ReducedParams,
    spectrum: &dyn SpectralFunction,
) -> Result<Trajectory> {
    check_positive("T must be > 0", t_end)?;
    if n_samples < 8 || !n_samples.is_power_of_two() {
        return Err(Error::Grid(format!(
            "n_samples must be a power of two >= 8, got {n_samples}"
        )));
    }
    let w0 = params.omega0_over_omega_i;
    let m = WINDOW_FACTOR * n_samples;
    let window = WINDOW_FACTOR as f64 * t_end;
    let dw = 2.0 * PI / window;
    let dt = t_end / n_samples as f64;
    let eps = SHIFT_T / t_end;
    let top = dw * (m / 2) as f64;

    let nodes = mu_nodes((0.5 * eps).min(0.05), 4.0 * w0 + 4.0, top);
    let mu_pos: Vec<Complex64> = nodes
        .par_iter()
        .map(|&w| spectrum.complex(Complex64::new(w, eps)).map(|s| s.mu()))
        .collect::<Result<_>>()?;
    // mu(-omega + i eps) = conj(mu(omega + i eps))
    let mut xs: Vec<f64> = nodes.iter().skip(1).rev().map(|w| -w).collect();
    let mut ys: Vec<Complex64> = mu_pos.iter().skip(1).rev().map(|m| m.conj()).collect();
    xs.extend_from_slice(&nodes);
    ys.extend_from_slice(&mu_pos);
    let mu = Hermite::new(xs, ys);

    // remainders alpha - alpha0 for the numerators 1 and -i z
    let mut spec_a = vec![Complex64::new(0.0, 0.0); m];
    let mut spec_b = vec![Complex64::new(0.0, 0.0); m];
    let mut energy = [0.0f64; 2];
    let mut energy_top = [0.0f64; 2];
    for n in 0..m / 2 {
        let z = Complex64::new(n as f64 * dw, eps);
        let alpha = response(w0, z, mu.at(z.re))?;
        let alpha0 = (w0 * w0 - z * z).inv();
        let da = alpha - alpha0;
        let db = -Complex64::i() * z * da;
        let weight = if n == 0 { 1.0 } else { 2.0 };
        for (k, d) in [da, db].into_iter().enumerate() {
            energy[k] += weight * d.norm_sqr();
            if z.re >= 0.1 * top {
                energy_top[k] += weight * d.norm_sqr();
            }
        }
        spec_a[n] = da;
        spec_b[n] = db;
        if n > 0 {
            spec_a[m - n] = da.conj();
            spec_b[m - n] = db.conj();
        }
    }
    let fraction = (0..2)
        .map(|k| {
            if energy[k] > 0.0 {
                energy_top[k] / energy[k]
            } else {
                0.0
            }
        })
        .fold(0.0, f64::max);
    if fraction > BANDWIDTH_LIMIT {
        return Err(Error::Bandwidth { fraction });
    }

    let fft = FftPlanner::new().plan_fft_forward(m);
    fft.process(&mut spec_a);
    fft.process(&mut spec_b);
    let scale = 1.0 / window;
    let mut imag_residue: f64 = 0.0;
    // remainder part of each basis solution
    let mut synth = |spec: &[Complex64]| -> Vec<f64> {
        (0..=n_samples)
            .map(|k| {
                let g = spec[k] * scale * (eps * k as f64 * dt).exp();
                imag_residue = imag_residue.max(g.im.abs() / g.re.abs().max(1.0));
                g.re
            })
            .collect()
    };
    let (ga, gb) = (synth(&spec_a), synth(&spec_b));
    let ra: Vec<f64> = ga
        .iter()
        .enumerate()
        .map(|(k, g)| (w0 * k as f64 * dt).sin() / w0 + g)
        .collect();
    let rb: Vec<f64> = gb
        .iter()
        .enumerate()
        .map(|(k, g)| (w0 * k as f64 * dt).cos() + g)
        .collect();
    // free parts differentiated exactly, remainders one-sided to second order
    let deriv = |g: &[f64]| (-3.0 * g[0] + 4.0 * g[1] - g[2]) / (2.0 * dt);
    let (a11, a12, a21, a22) = (ra[0], rb[0], 1.0 + deriv(&ga), deriv(&gb));
    let det = a11 * a22 - a12 * a21;
    if det.abs() < 1e-12 {
        return Err(Error::Grid("initial-condition matching is singular".into()));
    }
    let ca = (r0 * a22 - a12 * v0) / det;
    let cb = (a11 * v0 - a21 * r0) / det;

    let mut traj = Trajectory::new(TrajectoryModel::AmendedSpectral, "1/omega_I");
    note_params(&mut traj, params, spectrum);
    traj.note("r0", r0);
    traj.note("v0", v0);
    traj.note("n_samples", n_samples);
    traj.note("window", window);
    traj.note("contour_shift", eps);
    traj.note("top_decade_energy", format!("{fraction:.3e}"));
    traj.note("imag_residue", format!("{imag_residue:.3e}"));
    for k in 0..=n_samples {
        traj.ts.push(k as f64 * dt);
        traj.rs.push(ca * ra[k] + cb * rb[k]);
    }
    Ok(traj)
}

fn note_params(traj: &mut Trajectory, p: &ReducedParams, spectrum: &dyn SpectralFunction) {
    traj.note("chi", p.chi);
    traj.note("beta_omega_i", p.beta_omega_i);
    traj.note("gamma_omega_i", p.gamma_omega_i);
    traj.note("omega0_over_omega_i", p.omega0_over_omega_i);
    traj.note("stats", spectrum.stats().as_str());
}

/// Time-domain evolution of the amended equation (diagnostic only).
///
/// The memory term is written as
/// `int_{tau_min}^t D(tau) (r(t - tau) - r(t)) dtau - r(t) int_t^inf D`, with
/// `r` piecewise linear (product integration) and the local term integrated
/// exactly over each step; velocity Verlet advances the rest. The kernel on
/// `(0, tau_min]` is dropped.
#[allow(clippy::too_many_arguments)]
pub fn volterra_evolve(
    r0: f64,
    v0: f64,
    t_end: f64,
    dt: f64,
    tau_min: f64,
    params: &ReducedParams,
    kernel: &dyn Kernel,
) -> Result<Trajectory> {
    check_positive("T must be > 0", t_end)?;
    check_positive("tau_min must be > 0", tau_min)?;
    if !(dt > tau_min) {
        return Err(Error::Grid(format!("dt = {dt} must exceed tau_min = {tau_min}")));
    }
    let n = (t_end / dt).round() as usize;
    let w2 = params.omega0_over_omega_i.powi(2);
    let g2 = 2.0 * params.gamma_omega_i;
    let (gl_x, gl_w) = gauss_legendre_8();
    // [tau_min, dt] in log(tau); then Gauss-Legendre on the first panels of
    // the grid, where D varies fastest
    let (ls, lh) = (tau_min.ln(), dt.ln());
    let mut quad_nodes: Vec<(f64, f64)> = gl_x
        .iter()
        .zip(&gl_w)
        .map(|(&x, &w)| {
            let tau = (0.5 * (ls + lh) + 0.5 * (lh - ls) * x).exp();
            (tau, 0.5 * (lh - ls) * w * tau)
        })
        .collect();
    let near = n.saturating_sub(1).min(NEAR_PANELS);
    for j in 1..=near {
        for (&x, &w) in gl_x.iter().zip(&gl_w) {
            quad_nodes.push(((j as f64 + 0.5 + 0.5 * x) * dt, 0.5 * dt * w));
        }
    }
    let taus: Vec<f64> = (1..=n)
        .map(|j| j as f64 * dt)
        .chain(quad_nodes.iter().map(|q| q.0))
        .collect();
    let dv: Vec<f64> = taus
        .par_iter()
        .map(|&t| kernel.eval(t).map(|(v, _)| v))
        .collect::<Result<_>>()?;
    // d[j] = D(j dt), j >= 1
    let mut d = vec![0.0; n + 1];
    d[1..].copy_from_slice(&dv[..n]);
    let dq = &dv[n..];
    let g = gl_x.len();
    // first moment int tau D over [tau_min, dt]
    let m_first: f64 = (0..g).map(|i| quad_nodes[i].1 * quad_nodes[i].0 * dq[i]).sum();
    // panel moments m0 = int D, m1 = int D (tau - j dt) / dt over [j dt, (j + 1) dt]
    let mut m0 = vec![0.0; n.max(1)];
    let mut m1 = vec![0.0; n.max(1)];
    for j in 1..n {
        if j <= near {
            for i in 0..g {
                let (tau, w) = quad_nodes[g * j + i];
                let dk = dq[g * j + i];
                m0[j] += w * dk;
                m1[j] += w * dk * (tau / dt - j as f64);
            }
        } else {
            m0[j] = 0.5 * dt * (d[j] + d[j + 1]);
            m1[j] = dt * (d[j] / 6.0 + d[j + 1] / 3.0);
        }
    }
    // weight of node j inside the sum (the end node uses m1 only)
    let weights: Vec<f64> = (0..=n)
        .map(|j| match j {
            0 => 0.0,
            1 => m0[1] - m1[1],
            _ if j < n => m0[j] - m1[j] + m1[j - 1],
            _ => 0.0,
        })
        .collect();

    // tail[k] = int_{t_k}^inf D, with a power-law continuation past T
    let mut tail = vec![0.0; n + 1];
    if n >= 2 {
        let slope = (d[n].abs() / d[n - 1].abs()).ln() / (n as f64 / (n - 1) as f64).ln();
        let p = if slope.is_finite() { -slope } else { 0.0 };
        tail[n] = if p > 1.5 { d[n] * t_end / (p - 1.0) } else { 0.0 };
        for k in (1..n).rev() {
            tail[k] = tail[k + 1] + m0[k];
        }
    }

    // step integrals of the tail, int_{t_k}^{t_{k+1}} tail(t) dt
    let steps: Vec<f64> = (0..n)
        .map(|k| {
            let own = if k == 0 { m_first } else { dt * m1[k] };
            own + dt * tail[k + 1]
        })
        .collect();

    // int_{tau_min}^{t} D(tau) (r(t - tau) - r(t)) dtau at step k, given r[0..=k]
    let memory = |r: &[f64], k: usize| -> f64 {
        if k == 0 {
            return 0.0;
        }
        let rk = r[k];
        // r linear on [t - dt, t]
        let mut acc = -m_first * (rk - r[k - 1]) / dt;
        for j in 1..k {
            acc += weights[j] * (r[k - j] - rk);
        }
        if k >= 2 {
            acc += m1[k - 1] * (r[0] - rk);
        }
        acc
    };

    // The local term -r(t) tail(t) is singular at t = 0 and is integrated
    // over each step against the step integrals above.
    let mut r = Vec::with_capacity(n + 1);
    r.push(r0);
    let mut v = v0;
    let mut smooth = -w2 * r0;
    for k in 0..n {
        let local = steps[k] / dt;
        let next = r[k] + v * dt + 0.5 * (smooth - g2 * r[k] * local) * dt * dt;
        r.push(next);
        let smooth_next = -w2 * next + g2 * memory(&r, k + 1);
        v += 0.5 * (smooth + smooth_next) * dt - g2 * 0.5 * (r[k] + next) * steps[k];
        smooth = smooth_next;
    }

    let mut traj = Trajectory::new(TrajectoryModel::AmendedVolterra, "1/omega_I");
    traj.note("chi", params.chi);
    traj.note("beta_omega_i", params.beta_omega_i);
    traj.note("gamma_omega_i", params.gamma_omega_i);
    traj.note("omega0_over_omega_i", params.omega0_over_omega_i);
    traj.note("r0", r0);
    traj.note("v0", v0);
    traj.note("dt", dt);
    traj.note("dropped_kernel_interval", format!("(0, {tau_min}]"));
    traj.note("label", "DIAGNOSTIC");
    traj.ts = (0..=n).map(|k| k as f64 * dt).collect();
    traj.rs = r;
    Ok(traj)
}

fn gauss_legendre_8() -> ([f64; 8], [f64; 8]) {
    let x = [
        0.1834346424956498,
        0.525532409916329,
        0.7966664774136267,
        0.9602898564975363,
    ];
    let w = [
        0.362683783378362,
        0.3137066458778873,
        0.2223810344533745,
        0.1012285362903763,
    ];
    (
        [-x[3], -x[2], -x[1], -x[0], x[0], x[1], x[2], x[3]],
        [w[3], w[2], w[1], w[0], w[0], w[1], w[2], w[3]],
    )
}

/// Root-mean-square difference of two equal-length series.
pub fn rms_diff(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len().min(b.len()).max(1);
    (a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>() / n as f64).sqrt()
}
