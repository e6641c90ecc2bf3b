//! Numerical engine shared by the kernel and spectrum evaluators.
//!
//! Every integral is built from 21-point Gauss-Kronrod panels whose error is
//! estimated from the embedded 10-point Gauss rule. Panels are refined
//! globally (largest error first), so for fixed inputs the node set, the
//! evaluation count and the result are bitwise reproducible.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::ops::{Add, AddAssign, Mul, Sub};

use num_complex::Complex64;
use statrs::function::gamma::{gamma, gamma_ui};

use crate::error::{Error, Result};

/// Scalar types the integrators can accumulate.
pub trait QuadValue:
    Copy + Default + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> + AddAssign
{
    fn magnitude(self) -> f64;
}

impl QuadValue for f64 {
    fn magnitude(self) -> f64 {
        self.abs()
    }
}

impl QuadValue for Complex64 {
    fn magnitude(self) -> f64 {
        self.norm()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct QuadResult<T> {
    pub value: T,
    /// Absolute error estimate.
    pub err: f64,
    pub n_evals: usize,
    pub converged: bool,
}

impl<T: QuadValue> QuadResult<T> {
    fn combine(self, other: QuadResult<T>) -> QuadResult<T> {
        QuadResult {
            value: self.value + other.value,
            err: self.err + other.err,
            n_evals: self.n_evals + other.n_evals,
            converged: self.converged && other.converged,
        }
    }

    fn zero() -> Self {
        QuadResult {
            value: T::default(),
            err: 0.0,
            n_evals: 0,
            converged: true,
        }
    }
}

impl QuadResult<f64> {
    /// Turn a non-converged result into a [`Error::Convergence`].
    pub fn require(self, what: &str) -> Result<Self> {
        if self.converged {
            Ok(self)
        } else {
            Err(Error::Convergence {
                what: what.to_string(),
                value: self.value,
                err: self.err,
            })
        }
    }
}

/// Stop when `err <= max(abs, rel * |value|)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
}

impl Tolerance {
    pub fn rel(rel: f64) -> Self {
        Tolerance { abs: 0.0, rel }
    }

    fn target(&self, value: f64) -> f64 {
        self.abs.max(self.rel * value)
    }
}

#[allow(clippy::excessive_precision)]
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

#[derive(Debug, Clone, Copy)]
struct Panel<T> {
    a: f64,
    b: f64,
    value: T,
    err: f64,
    abs: f64,
    /// Part of `err` propagated from the integrand's own error bounds.
    inner: f64,
}

/// One 21-point Gauss-Kronrod panel. The integrand returns a value and an
/// absolute error bound on that value (zero for exact integrands); the
/// bounds are propagated with the Kronrod weights.
fn gk21<T, F>(f: &mut F, a: f64, b: f64) -> Panel<T>
where
    T: QuadValue,
    F: FnMut(f64) -> (T, f64),
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut fv = [T::default(); 21];
    let mut inner_err = 0.0;

    let (fc, ec) = f(center);
    fv[10] = fc;
    inner_err += WGK[10] * ec;
    for j in 0..10 {
        let dx = half * XGK[j];
        let (f1, e1) = f(center - dx);
        let (f2, e2) = f(center + dx);
        fv[j] = f1;
        fv[20 - j] = f2;
        inner_err += WGK[j] * (e1 + e2);
    }

    let mut kronrod = fc * WGK[10];
    let mut gauss = T::default();
    let mut res_abs = fc.magnitude() * WGK[10];
    for j in 0..10 {
        let s = fv[j] + fv[20 - j];
        kronrod += s * WGK[j];
        res_abs += WGK[j] * (fv[j].magnitude() + fv[20 - j].magnitude());
        if j % 2 == 1 {
            gauss += s * WG[j / 2];
        }
    }
    let mean = kronrod * 0.5;
    let mut res_asc = WGK[10] * (fc - mean).magnitude();
    for j in 0..10 {
        res_asc += WGK[j] * ((fv[j] - mean).magnitude() + (fv[20 - j] - mean).magnitude());
    }

    let h = half.abs();
    let mut err = ((kronrod - gauss) * half).magnitude();
    res_abs *= h;
    res_asc *= h;
    if res_asc != 0.0 && err != 0.0 {
        err = res_asc * (200.0 * err / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }
    Panel {
        a,
        b,
        value: kronrod * half,
        err: err + inner_err * h,
        abs: res_abs,
        inner: inner_err * h,
    }
}

#[derive(PartialEq)]
struct HeapKey {
    err: f64,
    idx: usize,
}

impl Eq for HeapKey {}

impl PartialOrd for HeapKey {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for HeapKey {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.total_cmp(&other.err).then_with(|| other.idx.cmp(&self.idx))
    }
}

/// Globally adaptive Gauss-Kronrod integration over `[bp[0], bp[last]]`,
/// starting from the panels delimited by the sorted breakpoints.
pub fn integrate_adaptive<T, F>(mut f: F, breakpoints: &[f64], tol: Tolerance, max_panels: usize) -> QuadResult<T>
where
    T: QuadValue,
    F: FnMut(f64) -> (T, f64),
{
    let mut bp: Vec<f64> = breakpoints.iter().copied().filter(|x| x.is_finite()).collect();
    bp.sort_by(f64::total_cmp);
    bp.dedup();
    if bp.len() < 2 {
        return QuadResult::zero();
    }

    let mut panels: Vec<Panel<T>> = Vec::with_capacity(bp.len() * 2);
    let mut heap = BinaryHeap::new();
    let mut n_evals = 0;
    for w in bp.windows(2) {
        let p = gk21(&mut f, w[0], w[1]);
        n_evals += 21;
        heap.push(HeapKey {
            err: p.err,
            idx: panels.len(),
        });
        panels.push(p);
    }
    let mut live: Vec<bool> = vec![true; panels.len()];

    let sums = |panels: &[Panel<T>], live: &[bool]| {
        let mut v = T::default();
        let (mut e, mut a, mut i) = (0.0, 0.0, 0.0);
        for (p, &l) in panels.iter().zip(live) {
            if l {
                v += p.value;
                e += p.err;
                a += p.abs;
                i += p.inner;
            }
        }
        (v, e, a, i)
    };

    let (mut value, mut err, mut abs, mut inner) = sums(&panels, &live);
    let converged;
    let mut iter = 0usize;
    loop {
        if iter % 64 == 63 {
            (value, err, abs, inner) = sums(&panels, &live);
        }
        iter += 1;
        let floor = 100.0 * f64::EPSILON * abs;
        let target = tol.target(value.magnitude());
        if err <= target || err <= floor {
            converged = true;
            break;
        }
        if err - inner <= 0.25 * target.max(floor) {
            // only the integrand's own error is left; splitting cannot help
            converged = false;
            break;
        }
        if heap.len() >= max_panels {
            converged = false;
            break;
        }
        let Some(top) = heap.pop() else {
            converged = err <= tol.target(value.magnitude()).max(floor);
            break;
        };
        let p = panels[top.idx];
        let mid = 0.5 * (p.a + p.b);
        let splittable = mid > p.a && mid < p.b && (p.b - p.a) > 1e3 * f64::EPSILON * p.a.abs().max(p.b.abs());
        if !splittable || p.err <= 50.0 * f64::EPSILON * p.abs {
            // cannot improve: keep the panel but stop refining it
            continue;
        }
        let left = gk21(&mut f, p.a, mid);
        let right = gk21(&mut f, mid, p.b);
        n_evals += 42;
        live[top.idx] = false;
        value = value - p.value + left.value + right.value;
        err += left.err + right.err - p.err;
        abs += left.abs + right.abs - p.abs;
        inner += left.inner + right.inner - p.inner;
        for q in [left, right] {
            heap.push(HeapKey {
                err: q.err,
                idx: panels.len(),
            });
            panels.push(q);
            live.push(true);
        }
    }
    let (value, err, _, _) = sums(&panels, &live);
    QuadResult {
        value,
        err,
        n_evals,
        converged,
    }
}

/// Plain-integrand convenience wrapper around [`integrate_adaptive`].
pub fn integrate<T, F>(mut f: F, breakpoints: &[f64], tol: Tolerance, max_panels: usize) -> QuadResult<T>
where
    T: QuadValue,
    F: FnMut(f64) -> T,
{
    integrate_adaptive(|x| (f(x), 0.0), breakpoints, tol, max_panels)
}

/// Majorant `amplitude * w^power * exp(-(w / scale)^2)` of an integrand on
/// `[0, inf)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianEnvelope {
    pub amplitude: f64,
    pub power: f64,
    pub scale: f64,
}

impl GaussianEnvelope {
    pub fn at(&self, w: f64) -> f64 {
        self.amplitude * w.powf(self.power) * (-(w / self.scale).powi(2)).exp()
    }

    /// Exact integral of the envelope over `[w, inf)`.
    pub fn tail(&self, w: f64) -> f64 {
        let a = 0.5 * (self.power + 1.0);
        let x = (w / self.scale).powi(2);
        if x > 700.0 {
            return 0.0;
        }
        let upper = if x > 0.0 { gamma_ui(a, x) } else { gamma(a) };
        self.amplitude * 0.5 * self.scale.powf(self.power + 1.0) * upper
    }
}

/// Oscillatory factor of an integrand, used to size the initial panels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Oscillation {
    /// `cos(k w)`: half-period `pi / k`.
    Linear(f64),
    /// `cos(g w^2 / 2)`: local half-period `pi / max(g w, sqrt(g))`.
    Chirp(f64),
}

impl Oscillation {
    fn half_period(&self, w: f64) -> f64 {
        use std::f64::consts::PI;
        match *self {
            Oscillation::Linear(k) if k > 0.0 => PI / k,
            Oscillation::Chirp(g) if g > 0.0 => PI / (g * w).max(g.sqrt()),
            _ => f64::INFINITY,
        }
    }
}

/// Cap on the initial panel count of [`integrate_semi_infinite`].
pub const MAX_INITIAL_PANELS: usize = 200_000;

fn panel_edges(from: f64, to: f64, env: &GaussianEnvelope, osc: &[Oscillation]) -> Option<Vec<f64>> {
    let mut edges = vec![from];
    let mut w = from;
    while w < to {
        if edges.len() > MAX_INITIAL_PANELS {
            return None;
        }
        let mut h = 0.5 * env.scale;
        for o in osc {
            h = h.min(o.half_period(w + 0.5 * h));
        }
        w = (w + h).min(to);
        edges.push(w);
    }
    Some(edges)
}

/// Integral over `[0, inf)` of a damped oscillatory integrand bounded by a
/// Gaussian envelope. The range is truncated where the envelope's analytic
/// tail drops below `tol * |value|`; the tail bound is added to `err`.
/// Integrands needing more than [`MAX_INITIAL_PANELS`] panels are reported
/// as unconverged with an infinite error.
pub fn integrate_semi_infinite<F>(
    mut f: F,
    envelope: GaussianEnvelope,
    oscillations: &[Oscillation],
    tol: f64,
) -> QuadResult<f64>
where
    F: FnMut(f64) -> f64,
{
    let mass = envelope.tail(0.0);
    let mut end = envelope.scale;
    while envelope.tail(end) > 1e-16 * mass {
        end += 0.25 * envelope.scale;
    }

    let mut total = QuadResult::zero();
    let mut start = 0.0;
    for _ in 0..64 {
        let Some(edges) = panel_edges(start, end, &envelope, oscillations) else {
            total.err = f64::INFINITY;
            total.converged = false;
            return total;
        };
        let budget = 16 * edges.len() + 4000;
        let part = integrate(&mut f, &edges, Tolerance::rel(tol), budget);
        total = total.combine(part);
        let tail = envelope.tail(end);
        if tail <= tol * total.value.abs() || tail == 0.0 {
            total.err += tail;
            return total;
        }
        start = end;
        end *= 1.25;
    }
    total.err += envelope.tail(end);
    total.converged = false;
    total
}

/// Cauchy principal value of `int f(y) / (y - pole) dy` over `[lo, hi]`.
///
/// Within `|y - pole| < half_width` the symmetric pair
/// `(f(pole + s) - f(pole - s)) / s` is integrated over `s in (0, half_width)`;
/// the rest of the range is ordinary adaptive quadrature. `f` must be smooth
/// at the pole and negligible outside `[lo, hi]`.
#[allow(clippy::too_many_arguments)]
pub fn integrate_pv<T, F>(
    mut f: F,
    pole: f64,
    half_width: f64,
    lo: f64,
    hi: f64,
    breakpoints: &[f64],
    tol: Tolerance,
    max_panels: usize,
) -> QuadResult<T>
where
    T: QuadValue,
    F: FnMut(f64) -> (T, f64),
{
    let h = half_width;
    let mut outer = |y: f64| {
        let (v, e) = f(y);
        let d = 1.0 / (y - pole);
        (v * d, e * d.abs())
    };
    let cut = |a: f64, b: f64| {
        let mut v = vec![a, b];
        v.extend(breakpoints.iter().copied().filter(|&x| x > a && x < b));
        v
    };

    if pole + h <= lo || pole - h >= hi {
        return integrate_adaptive(&mut outer, &cut(lo, hi), tol, max_panels);
    }
    let part_tol = Tolerance {
        abs: tol.abs / 3.0,
        rel: tol.rel,
    };
    let mut total = QuadResult::zero();
    if lo < pole - h {
        total = total.combine(integrate_adaptive(&mut outer, &cut(lo, pole - h), part_tol, max_panels));
    }
    if pole + h < hi {
        total = total.combine(integrate_adaptive(&mut outer, &cut(pole + h, hi), part_tol, max_panels));
    }
    let mut inner_bp = vec![0.0, h];
    inner_bp.extend(
        breakpoints
            .iter()
            .map(|&x| (x - pole).abs())
            .filter(|&s| s > 0.0 && s < h),
    );
    let sym = integrate_adaptive(
        |s: f64| {
            let (vp, ep) = f(pole + s);
            let (vm, em) = f(pole - s);
            ((vp - vm) * (1.0 / s), (ep + em) / s)
        },
        &inner_bp,
        part_tol,
        max_panels,
    );
    total.combine(sym)
}

/// Result of extrapolating a sequence to `eta -> 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extrapolation<T> {
    pub limit: T,
    /// Spread between the two finest extrapolation levels.
    pub err: f64,
    /// Observed leading order from the three finest values.
    pub order: Option<f64>,
    /// Successive differences were not shrinking monotonically.
    pub low_confidence: bool,
}

/// Weights `w` with `sum w_i = 1` and `sum w_i eta_i^e = 0` for every
/// exponent `e`, i.e. the extrapolation of `1 + sum c_e eta^e` to `eta = 0`.
fn extrapolation_weights(etas: &[f64], exponents: &[f64]) -> Option<Vec<f64>> {
    let n = etas.len();
    debug_assert_eq!(exponents.len() + 1, n);
    // rows: constraint j, columns: point i
    let mut m = vec![vec![0.0; n + 1]; n];
    m[0].fill(1.0);
    for (j, &e) in exponents.iter().enumerate() {
        for (cell, eta) in m[j + 1].iter_mut().zip(etas) {
            *cell = eta.powf(e);
        }
    }
    // Gaussian elimination with partial pivoting
    for col in 0..n {
        let piv = (col..n).max_by(|&a, &b| m[a][col].abs().total_cmp(&m[b][col].abs()))?;
        if m[piv][col].abs() < 1e-300 {
            return None;
        }
        m.swap(col, piv);
        for row in 0..n {
            if row != col {
                let factor = m[row][col] / m[col][col];
                let pivot_row = m[col].clone();
                for (a, b) in m[row][col..].iter_mut().zip(&pivot_row[col..]) {
                    *a -= factor * b;
                }
            }
        }
    }
    Some((0..n).map(|i| m[i][n] / m[i][i]).collect())
}

/// Polynomial (Richardson) extrapolation of `values[k] = v(etas[k])` to
/// `eta = 0`. With `order_hint = Some(p)` the error expansion is assumed to
/// start at `eta^p`; otherwise at `eta^1`.
pub fn richardson<T: QuadValue>(values: &[T], etas: &[f64], order_hint: Option<u32>) -> Result<Extrapolation<T>> {
    let n = values.len();
    if n < 3 || etas.len() != n {
        return Err(Error::Grid("richardson needs >= 3 (value, eta) pairs".into()));
    }
    if etas.windows(2).any(|w| !(w[1] < w[0])) || etas[n - 1] <= 0.0 {
        return Err(Error::Grid("etas must be positive and strictly decreasing".into()));
    }
    let p = order_hint.unwrap_or(1) as f64;
    let level = |k: usize| -> Result<T> {
        // extrapolant from the k + 1 finest points
        let pts = &etas[n - 1 - k..];
        let exps: Vec<f64> = (0..k).map(|j| p + j as f64).collect();
        let w = extrapolation_weights(pts, &exps).ok_or_else(|| Error::Grid("singular extrapolation system".into()))?;
        let mut acc = T::default();
        for (wi, vi) in w.iter().zip(&values[n - 1 - k..]) {
            acc += *vi * *wi;
        }
        Ok(acc)
    };
    let limit = level(n - 1)?;
    let prev = level(n - 2)?;
    let err = (limit - prev).magnitude();

    let d0 = (values[n - 2] - values[n - 3]).magnitude();
    let d1 = (values[n - 1] - values[n - 2]).magnitude();
    let ratio = etas[n - 3] / etas[n - 2];
    let order = if d0 > 0.0 && d1 > 0.0 {
        Some((d0 / d1).ln() / ratio.ln())
    } else {
        None
    };
    let mut low_confidence = false;
    let mut last = f64::INFINITY;
    for w in values.windows(2) {
        let d = (w[1] - w[0]).magnitude();
        if d > last * (1.0 + 1e-12) && d > 1e-14 * w[1].magnitude() {
            low_confidence = true;
        }
        last = d;
    }
    Ok(Extrapolation {
        limit,
        err,
        order,
        low_confidence,
    })
}

/// Central-difference Cauchy-Riemann residual of `f` at `z` with step `h`:
/// `|dRe/dx - dIm/dy| + |dRe/dy + dIm/dx|`. Returns the residual and the
/// floor implied by the evaluation errors reported by `f`.
pub fn cauchy_riemann_residual<F>(mut f: F, z: Complex64, h: f64) -> Result<(f64, f64)>
where
    F: FnMut(Complex64) -> Result<(Complex64, f64)>,
{
    let (fxp, exp) = f(z + h)?;
    let (fxm, exm) = f(z - h)?;
    let (fyp, eyp) = f(z + Complex64::new(0.0, h))?;
    let (fym, eym) = f(z - Complex64::new(0.0, h))?;
    let dx = (fxp - fxm) / (2.0 * h);
    let dy = (fyp - fym) / (2.0 * h);
    let residual = (dx.re - dy.im).abs() + (dy.re + dx.im).abs();
    let floor = (exp + exm + eyp + eym) / h;
    Ok((residual, floor))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gk21_integrates_polynomials_exactly() {
        // Kronrod rule is exact to degree 31
        let r = integrate(
            |x: f64| x.powi(20) - 3.0 * x.powi(7),
            &[0.0, 1.0],
            Tolerance::rel(1e-14),
            10,
        );
        assert!((r.value - (1.0 / 21.0 - 3.0 / 8.0)).abs() < 1e-15);
        assert_eq!(r.n_evals, 21);
    }

    #[test]
    fn adaptive_handles_peaks() {
        let r = integrate(|x: f64| 1.0 / (1e-4 + x * x), &[-1.0, 1.0], Tolerance::rel(1e-12), 500);
        let exact = 2.0 * (1.0 / 1e-2) * (1.0f64 / 1e-2).atan();
        assert!(r.converged);
        assert!((r.value - exact).abs() <= r.err.max(1e-12 * exact));
    }

    #[test]
    fn propagates_integrand_errors() {
        let r = integrate_adaptive(|x: f64| (x, 1e-6), &[0.0, 2.0], Tolerance::rel(1e-3), 10);
        assert!(r.err >= 2e-6 * 0.999);
    }

    #[test]
    fn budget_exhaustion_reports_nonconvergence() {
        let r = integrate(|x: f64| (1.0 / x).sin(), &[1e-9, 1.0], Tolerance::rel(1e-14), 8);
        assert!(!r.converged);
        assert!(r.require("test").is_err());
    }

    #[test]
    fn envelope_tail_matches_closed_form() {
        // p = 3: int_W^inf w^3 e^{-w^2} dw = (1 + W^2) e^{-W^2} / 2
        let env = GaussianEnvelope {
            amplitude: 1.0,
            power: 3.0,
            scale: 1.0,
        };
        for w in [0.0f64, 0.5, 2.0, 5.0] {
            let exact = 0.5 * (1.0 + w * w) * (-w * w).exp();
            assert!((env.tail(w) - exact).abs() <= 1e-14 * exact.max(1e-300));
        }
    }

    #[test]
    fn pv_of_odd_gaussian_vanishes() {
        let r = integrate_pv(
            |y: f64| ((-y * y).exp(), 0.0),
            0.0,
            0.5,
            -9.0,
            9.0,
            &[],
            Tolerance { abs: 1e-14, rel: 1e-12 },
            200,
        );
        assert!(r.value.abs() <= 1e-14 + r.err);
    }

    #[test]
    fn richardson_linear_and_quadratic_models() {
        let etas = [0.1, 0.05, 0.025];
        let lin: Vec<f64> = etas.iter().map(|e| 1.0 + e).collect();
        let r = richardson(&lin, &etas, None).unwrap();
        assert!((r.limit - 1.0).abs() < 1e-12);
        assert!(r.err < 1e-12);
        assert!((r.order.unwrap() - 1.0).abs() < 1e-9);

        let quad: Vec<f64> = etas.iter().map(|e| 1.0 + e * e).collect();
        let r = richardson(&quad, &etas, None).unwrap();
        assert!((r.limit - 1.0).abs() < 1e-12);
        assert!((r.order.unwrap() - 2.0).abs() < 1e-9);
        assert!(!r.low_confidence);
    }

    #[test]
    fn richardson_flags_non_monotone_sequences() {
        let etas = [0.1, 0.05, 0.025, 0.0125];
        let vals = [1.0, 1.1, 1.0, 1.3];
        let r = richardson(&vals, &etas, None).unwrap();
        assert!(r.low_confidence);
        assert!(richardson(&vals[..2], &etas[..2], None).is_err());
        assert!(richardson(&vals[..3], &[0.1, 0.2, 0.3], None).is_err());
    }

    #[test]
    fn cr_residual_of_polynomial_is_rounding() {
        let (res, floor) = cauchy_riemann_residual(|z| Ok((z * z, 0.0)), Complex64::new(0.7, 1.3), 1e-2).unwrap();
        assert!(res < 1e-12, "{res}");
        assert_eq!(floor, 0.0);
        // a non-analytic function leaves an O(1) residual
        let (res, _) =
            cauchy_riemann_residual(|z: Complex64| Ok((z.conj(), 0.0)), Complex64::new(0.7, 1.3), 1e-2).unwrap();
        assert!((res - 2.0).abs() < 1e-12);
    }

    #[test]
    fn semi_infinite_gaussian_moments() {
        let env = GaussianEnvelope {
            amplitude: 1.0,
            power: 3.0,
            scale: 1.0,
        };
        let r = integrate_semi_infinite(|w| w.powi(3) * (-w * w).exp(), env, &[], 1e-12);
        assert!((r.value - 0.5).abs() <= r.err.max(1e-15));
    }
}
