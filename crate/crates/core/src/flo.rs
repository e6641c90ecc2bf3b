//! Positive-real-function certification of `mu`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Beta, FieldStatistics, ReducedParams};
use crate::quadrature::cauchy_riemann_residual;
use crate::spectrum::{Spectrum, SpectrumSample};

/// Default quadrature tolerance (relative) for FLO work.
pub const DEFAULT_QUAD_TOL: f64 = 1e-8;
/// Default positivity tolerance in units of `mu0`.
pub const DEFAULT_TOL_REL: f64 = 1e-8;
/// Residuals within this factor of the quadrature floor are not used for order fits.
const FLOOR_MARGIN: f64 = 10.0;
const MAX_BISECTIONS: usize = 60;
const MAX_CONTOUR_DEPTH: usize = 24;
/// Segments whose phase change exceeds this are subdivided.
const PHASE_STEP: f64 = PI / 8.0;
const DEGENERATE_MODULUS: f64 = 1e-6;

/// `±logspace(lo, hi, n)`, ascending, without 0.
pub fn symmetric_logspace(lo: f64, hi: f64, n: usize) -> Result<Vec<f64>> {
    if !(lo > 0.0 && hi > lo && n >= 2) {
        return Err(Error::Grid(format!("bad logspace ({lo}, {hi}, {n})")));
    }
    let (a, b) = (lo.log10(), hi.log10());
    let pos: Vec<f64> = (0..n)
        .map(|i| 10f64.powf(a + (b - a) * i as f64 / (n - 1) as f64))
        .collect();
    Ok(pos.iter().rev().map(|w| -w).chain(pos.iter().copied()).collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointFailure {
    pub omega: f64,
    pub message: String,
    pub convergence: bool,
}

/// Criterion (ii): `Re mu(omega + i0) >= 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PositivityRecord {
    pub pass: bool,
    pub min_re_mu: f64,
    pub argmin_omega: f64,
    /// Quadrature error of `Re mu` at the minimum.
    pub min_re_err: f64,
    pub tolerance: f64,
    pub n_points: usize,
    pub flagged: Vec<PointFailure>,
}

/// Criterion (iii): `mu(omega) = conj mu(-omega)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymmetryRecord {
    pub pass: bool,
    pub max_asymmetry: f64,
    /// Combined quadrature error at the worst pair.
    pub combined_err: f64,
    pub tolerance: f64,
    pub n_pairs: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UhpGrid {
    pub x_min: f64,
    pub x_max: f64,
    pub nx: usize,
    pub y_min: f64,
    pub y_max: f64,
    pub ny: usize,
}

impl UhpGrid {
    pub fn points(&self) -> Vec<Complex64> {
        let lin = |a: f64, b: f64, n: usize, i: usize| {
            if n == 1 {
                a
            } else {
                a + (b - a) * i as f64 / (n - 1) as f64
            }
        };
        let mut out = Vec::with_capacity(self.nx * self.ny);
        for i in 0..self.nx {
            for j in 0..self.ny {
                out.push(Complex64::new(
                    lin(self.x_min, self.x_max, self.nx, i),
                    lin(self.y_min, self.y_max, self.ny, j),
                ));
            }
        }
        out
    }
}

impl Default for UhpGrid {
    fn default() -> Self {
        UhpGrid {
            x_min: -3.0,
            x_max: 3.0,
            nx: 4,
            y_min: 0.5,
            y_max: 3.0,
            ny: 2,
        }
    }
}

/// Default step sequence for the Cauchy-Riemann stencil.
pub const DEFAULT_H: [f64; 4] = [0.2, 0.1, 0.05, 0.025];

/// Criterion (i): Cauchy-Riemann residuals shrink like `h^2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalyticityRecord {
    pub pass: bool,
    pub max_residual: f64,
    pub grid: UhpGrid,
    pub h_sequence: Vec<f64>,
    /// Median fitted slope of `log residual` against `log h` over points resolved above the floor.
    pub observed_order: Option<f64>,
    pub min_order: Option<f64>,
    pub n_fitted: usize,
    pub flagged: Vec<String>,
}

/// Residual and quadrature floor for every point (rows) and step (columns).
pub fn cr_residuals<F>(f: F, points: &[Complex64], hs: &[f64]) -> Vec<Result<Vec<(f64, f64)>>>
where
    F: Fn(Complex64) -> Result<(Complex64, f64)> + Sync,
{
    points
        .par_iter()
        .map(|&z| {
            hs.iter()
                .map(|&h| cauchy_riemann_residual(&f, z, h))
                .collect::<Result<Vec<_>>>()
        })
        .collect()
}

/// Least-squares slope of `log residual` against `log h`, using entries
/// resolved above the floor; `None` with fewer than two such entries.
pub fn fit_order(row: &[(f64, f64)], hs: &[f64]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = row
        .iter()
        .zip(hs)
        .filter(|((r, fl), _)| *r > FLOOR_MARGIN * fl && *r > 0.0)
        .map(|((r, _), h)| (h.ln(), r.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    Some(sxy / sxx)
}

fn median(mut v: Vec<f64>) -> Option<f64> {
    if v.is_empty() {
        return None;
    }
    v.sort_by(f64::total_cmp);
    let n = v.len();
    Some(if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    })
}

pub fn check_analyticity(spectrum: &Spectrum, grid: &UhpGrid, hs: &[f64]) -> Result<AnalyticityRecord> {
    if hs.is_empty() || hs.windows(2).any(|w| !(w[1] < w[0])) || hs[hs.len() - 1] <= 0.0 {
        return Err(Error::Grid("h sequence must be positive and decreasing".into()));
    }
    if !(grid.y_min >= 2.0 * hs[0]) || grid.nx == 0 || grid.ny == 0 {
        return Err(Error::Grid(format!(
            "UHP grid needs Im z >= 2 max(h) = {}",
            2.0 * hs[0]
        )));
    }
    let points = grid.points();
    let rows = cr_residuals(|z| spectrum.mu_complex(z).map(|s| (s.mu(), s.err())), &points, hs);
    let mut flagged = Vec::new();
    let mut orders = Vec::new();
    let mut max_residual: f64 = 0.0;
    for (z, row) in points.iter().zip(rows) {
        match row {
            Ok(row) => {
                max_residual = row.iter().map(|r| r.0).fold(max_residual, f64::max);
                if let Some(o) = fit_order(&row, hs) {
                    orders.push(o);
                }
            }
            Err(e) => flagged.push(format!("z = {z}: {e}")),
        }
    }
    let min_order = orders.iter().copied().reduce(f64::min);
    let n_fitted = orders.len();
    let observed_order = median(orders);
    let pass = flagged.is_empty() && observed_order.is_some_and(|o| (1.5..=2.5).contains(&o));
    Ok(AnalyticityRecord {
        pass,
        max_residual,
        grid: grid.clone(),
        h_sequence: hs.to_vec(),
        observed_order,
        min_order,
        n_fitted,
        flagged,
    })
}

fn boundary_samples(spectrum: &Spectrum, omegas: &[f64]) -> Vec<Result<SpectrumSample>> {
    omegas.par_iter().map(|&w| spectrum.mu_boundary(w)).collect()
}

fn failure(omega: f64, e: &Error) -> PointFailure {
    PointFailure {
        omega,
        message: e.to_string(),
        convergence: e.is_convergence(),
    }
}

/// Criterion (ii) from precomputed samples: pass iff `Re mu + re_err >= -tol` everywhere.
pub fn positivity_from_samples(samples: &[SpectrumSample], flagged: Vec<PointFailure>, tol: f64) -> PositivityRecord {
    let mut min = (f64::INFINITY, f64::NAN, 0.0);
    let mut pass = true;
    for s in samples {
        if s.re_mu < min.0 {
            min = (s.re_mu, s.omega.unwrap_or(f64::NAN), s.re_err);
        }
        if s.re_mu + s.re_err < -tol {
            pass = false;
        }
    }
    PositivityRecord {
        pass: pass && !samples.is_empty(),
        min_re_mu: min.0,
        argmin_omega: min.1,
        min_re_err: min.2,
        tolerance: tol,
        n_points: samples.len(),
        flagged,
    }
}

/// Criterion (iii) from precomputed boundary samples; pairs are matched on `omega = -omega'`.
pub fn symmetry_from_samples(samples: &[SpectrumSample], tol: f64) -> SymmetryRecord {
    let mut worst = (0.0, 0.0);
    let mut pass = true;
    let mut n_pairs = 0;
    for s in samples.iter().filter(|s| s.omega.is_some_and(|w| w > 0.0)) {
        let w = s.omega.unwrap_or_default();
        let Some(m) = samples.iter().find(|m| m.omega == Some(-w)) else {
            continue;
        };
        n_pairs += 1;
        let asym = (s.mu() - m.mu().conj()).norm();
        let combined = s.err() + m.err();
        if asym > worst.0 {
            worst = (asym, combined);
        }
        if asym > combined + tol {
            pass = false;
        }
    }
    SymmetryRecord {
        pass: pass && n_pairs > 0,
        max_asymmetry: worst.0,
        combined_err: worst.1,
        tolerance: tol,
        n_pairs,
    }
}

fn split_samples(omegas: &[f64], rows: Vec<Result<SpectrumSample>>) -> (Vec<SpectrumSample>, Vec<PointFailure>) {
    let mut ok = Vec::new();
    let mut bad = Vec::new();
    for (&w, r) in omegas.iter().zip(rows) {
        match r {
            Ok(s) => ok.push(s),
            Err(e) => bad.push(failure(w, &e)),
        }
    }
    (ok, bad)
}

fn check_grid(omegas: &[f64]) -> Result<()> {
    if omegas.is_empty() {
        return Err(Error::Grid("omega grid is empty".into()));
    }
    if omegas.iter().any(|&w| w == 0.0 || !w.is_finite()) {
        return Err(Error::Grid("omega grid must exclude 0".into()));
    }
    Ok(())
}

pub fn check_positivity(spectrum: &Spectrum, omegas: &[f64], tol: f64) -> Result<PositivityRecord> {
    check_grid(omegas)?;
    if !(tol > 0.0) {
        return Err(Error::domain("positivity tolerance must be > 0", tol));
    }
    let (ok, bad) = split_samples(omegas, boundary_samples(spectrum, omegas));
    Ok(positivity_from_samples(&ok, bad, tol))
}

pub fn check_symmetry(spectrum: &Spectrum, omegas: &[f64], tol: f64) -> Result<SymmetryRecord> {
    check_grid(omegas)?;
    let mut sorted = omegas.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mirrored = sorted.iter().zip(sorted.iter().rev()).all(|(a, b)| *a == -*b);
    if !mirrored {
        return Err(Error::Grid("omega grid must be symmetric about 0".into()));
    }
    let (ok, _) = split_samples(omegas, boundary_samples(spectrum, omegas));
    Ok(symmetry_from_samples(&ok, tol))
}

/// Closed rectangle `[-x, x] x [y0, y]` in the upper half plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rectangle {
    pub x: f64,
    pub y0: f64,
    pub y: f64,
}

impl Rectangle {
    fn corners(&self) -> [Complex64; 4] {
        [
            Complex64::new(-self.x, self.y0),
            Complex64::new(self.x, self.y0),
            Complex64::new(self.x, self.y),
            Complex64::new(-self.x, self.y),
        ]
    }

    /// Counter-clockwise boundary samples, `n` in total, spread by edge length.
    fn boundary(&self, n: usize) -> Vec<Complex64> {
        let c = self.corners();
        let lens: Vec<f64> = (0..4).map(|k| (c[(k + 1) % 4] - c[k]).norm()).collect();
        let total: f64 = lens.iter().sum();
        let mut out = Vec::with_capacity(n + 4);
        for k in 0..4 {
            let m = ((n as f64 * lens[k] / total).ceil() as usize).max(1);
            for i in 0..m {
                out.push(c[k] + (c[(k + 1) % 4] - c[k]) * (i as f64 / m as f64));
            }
        }
        out
    }

    fn shrunk(&self) -> Rectangle {
        Rectangle {
            x: 0.95 * self.x,
            y0: 1.05 * self.y0,
            y: 0.95 * self.y,
        }
    }
}

fn degenerate(z: Complex64, f: Complex64) -> Option<Error> {
    (f.norm() < DEGENERATE_MODULUS).then(|| Error::ContourDegenerate {
        modulus: f.norm(),
        re: z.re,
        im: z.im,
    })
}

/// Phase accumulated by `f` from `a` to `b`, subdividing until every step is below [`PHASE_STEP`].
fn segment_phase<F>(f: &F, a: (Complex64, Complex64), b: (Complex64, Complex64), depth: usize) -> Result<f64>
where
    F: Fn(Complex64) -> Result<Complex64> + Sync,
{
    let d = (b.1 / a.1).arg();
    if d.abs() <= PHASE_STEP {
        return Ok(d);
    }
    if depth >= MAX_CONTOUR_DEPTH {
        if d.abs() >= PI {
            return Err(Error::ContourResolution { increment: d.abs() });
        }
        return Ok(d);
    }
    let zm = 0.5 * (a.0 + b.0);
    let fm = f(zm)?;
    if let Some(e) = degenerate(zm, fm) {
        return Err(e);
    }
    Ok(segment_phase(f, a, (zm, fm), depth + 1)? + segment_phase(f, (zm, fm), b, depth + 1)?)
}

fn winding_once<F>(f: &F, rect: &Rectangle, n: usize) -> Result<i64>
where
    F: Fn(Complex64) -> Result<Complex64> + Sync,
{
    let zs = rect.boundary(n);
    let fs = zs.par_iter().map(|&z| f(z)).collect::<Result<Vec<_>>>()?;
    if let Some(e) = zs.iter().zip(&fs).find_map(|(z, v)| degenerate(*z, *v)) {
        return Err(e);
    }
    let m = zs.len();
    let phases = (0..m)
        .into_par_iter()
        .map(|i| {
            let j = (i + 1) % m;
            segment_phase(f, (zs[i], fs[i]), (zs[j], fs[j]), 0)
        })
        .collect::<Result<Vec<_>>>()?;
    let w = phases.iter().sum::<f64>() / (2.0 * PI);
    if (w - w.round()).abs() > 1e-3 {
        return Err(Error::NonIntegerWinding { value: w });
    }
    Ok(w.round() as i64)
}

/// Winding number of `f` around the rectangle, i.e. its zeros minus poles inside.
pub fn winding_number<F>(f: F, rect: &Rectangle, n_contour_points: usize) -> Result<i64>
where
    F: Fn(Complex64) -> Result<Complex64> + Sync,
{
    if !(rect.y0 > 0.0 && rect.y > rect.y0 && rect.x > 0.0) {
        return Err(Error::Grid("rectangle needs 0 < y0 < y and x > 0".into()));
    }
    let n = n_contour_points.max(8);
    match winding_once(&f, rect, n) {
        Err(Error::ContourDegenerate { .. }) => match winding_once(&f, &rect.shrunk(), n) {
            Err(Error::ContourDegenerate { modulus, re, im }) => Err(Error::ContourDegenerate { modulus, re, im }),
            other => other,
        },
        other => other,
    }
}

/// The amended characteristic function `z^2 - omega0^2 + i z mu(z)` in units of `omega_I`.
pub fn characteristic(spectrum: &Spectrum, z: Complex64) -> Result<Complex64> {
    let w0 = spectrum.params.omega0_over_omega_i;
    let mu = spectrum.mu_complex(z)?.mu();
    Ok(z * z - w0 * w0 + Complex64::i() * z * mu)
}

/// Number of zeros of the characteristic function inside the rectangle.
pub fn count_uhp_zeros(spectrum: &Spectrum, rect: &Rectangle, n_contour_points: usize) -> Result<i64> {
    let n = winding_number(|z| characteristic(spectrum, z), rect, n_contour_points)?;
    if n < 0 {
        return Err(Error::Grid(format!("negative zero count {n}")));
    }
    Ok(n)
}

/// A point with `Re mu < -(re_err + tol)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub chi: f64,
    pub beta_omega_i: Beta,
    pub omega: f64,
    pub re_mu: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FLOReport {
    pub params: ReducedParams,
    pub stats: FieldStatistics,
    pub criterion_i: Option<AnalyticityRecord>,
    pub criterion_ii: Option<PositivityRecord>,
    pub criterion_iii: Option<SymmetryRecord>,
    pub uhp_zero_count: Option<i64>,
    pub violations: Vec<Violation>,
    /// Zeros of `Re mu(omega + i0)` located by bisection between sign changes.
    pub crossings: Vec<f64>,
    pub error: Option<String>,
}

impl FLOReport {
    /// Positivity and symmetry both passed.
    pub fn pass(&self) -> bool {
        self.error.is_none()
            && self.criterion_ii.as_ref().is_some_and(|r| r.pass)
            && self.criterion_iii.as_ref().is_some_and(|r| r.pass)
            && self.criterion_i.as_ref().is_none_or(|r| r.pass)
            && self.uhp_zero_count.is_none_or(|n| n == 0)
    }

    /// Any point or cell failed to converge.
    pub fn unconverged(&self) -> bool {
        self.error.is_some()
            || self
                .criterion_ii
                .as_ref()
                .is_some_and(|r| r.flagged.iter().any(|f| f.convergence))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanOptions {
    pub quad_tol: f64,
    /// Positivity tolerance in units of `mu0`.
    pub tol_rel: f64,
    pub refine: bool,
}

impl Default for ScanOptions {
    fn default() -> Self {
        ScanOptions {
            quad_tol: DEFAULT_QUAD_TOL,
            tol_rel: DEFAULT_TOL_REL,
            refine: true,
        }
    }
}

fn bisect_crossing(spectrum: &Spectrum, mut a: (f64, f64), mut b: (f64, f64)) -> Option<f64> {
    for _ in 0..MAX_BISECTIONS {
        if (b.0 - a.0).abs() <= 1e-12 * a.0.abs().max(b.0.abs()) {
            break;
        }
        let m = 0.5 * (a.0 + b.0);
        let v = spectrum.re_mu_boundary(m).ok()?.0;
        if (v < 0.0) == (a.1 < 0.0) {
            a = (m, v);
        } else {
            b = (m, v);
        }
    }
    Some(0.5 * (a.0 + b.0))
}

/// Positivity and symmetry for one cell.
pub fn scan_cell(params: &ReducedParams, stats: FieldStatistics, omegas: &[f64], opts: &ScanOptions) -> FLOReport {
    let mut report = FLOReport {
        params: *params,
        stats,
        criterion_i: None,
        criterion_ii: None,
        criterion_iii: None,
        uhp_zero_count: None,
        violations: Vec::new(),
        crossings: Vec::new(),
        error: None,
    };
    let spectrum = match Spectrum::new(*params, stats, opts.quad_tol) {
        Ok(s) => s,
        Err(e) => {
            report.error = Some(e.to_string());
            return report;
        }
    };
    let tol = opts.tol_rel * params.mu0;
    let (ok, bad) = split_samples(omegas, boundary_samples(&spectrum, omegas));
    report.violations = ok
        .iter()
        .filter(|s| s.re_mu < -(s.re_err + tol))
        .map(|s| Violation {
            chi: params.chi,
            beta_omega_i: params.beta_omega_i,
            omega: s.omega.unwrap_or(f64::NAN),
            re_mu: s.re_mu,
        })
        .collect();
    if opts.refine {
        let pairs: Vec<((f64, f64), (f64, f64))> = ok
            .windows(2)
            .filter_map(|w| {
                let (a, b) = (w[0].omega?, w[1].omega?);
                let same_side = (a > 0.0) == (b > 0.0);
                (same_side && (w[0].re_mu < 0.0) != (w[1].re_mu < 0.0)).then_some(((a, w[0].re_mu), (b, w[1].re_mu)))
            })
            .collect();
        report.crossings = pairs
            .par_iter()
            .filter_map(|&(a, b)| bisect_crossing(&spectrum, a, b))
            .collect();
    }
    report.criterion_iii = Some(symmetry_from_samples(&ok, tol));
    report.criterion_ii = Some(positivity_from_samples(&ok, bad, tol));
    report
}

/// Cross product of `chis` and `betas`, in lexicographic order.
pub fn scan(
    base: &ReducedParams,
    chis: &[f64],
    betas: &[Beta],
    omegas: &[f64],
    stats: FieldStatistics,
    opts: &ScanOptions,
) -> Result<Vec<FLOReport>> {
    if chis.is_empty() || betas.is_empty() {
        return Err(Error::Grid("chi and beta grids must be nonempty".into()));
    }
    check_grid(omegas)?;
    let mut omegas = omegas.to_vec();
    omegas.sort_by(f64::total_cmp);
    let mut cells = Vec::with_capacity(chis.len() * betas.len());
    for &chi in chis {
        for &beta in betas {
            cells.push((chi, beta));
        }
    }
    cells.sort_by(|a, b| a.0.total_cmp(&b.0).then(beta_key(a.1).total_cmp(&beta_key(b.1))));
    Ok(cells
        .par_iter()
        .map(
            |&(chi, beta)| match ReducedParams::new(chi, beta, base.gamma_omega_i, base.omega0_over_omega_i) {
                Ok(p) => scan_cell(&p, stats, &omegas, opts),
                Err(e) => FLOReport {
                    params: *base,
                    stats,
                    criterion_i: None,
                    criterion_ii: None,
                    criterion_iii: None,
                    uhp_zero_count: None,
                    violations: Vec::new(),
                    crossings: Vec::new(),
                    error: Some(format!("chi = {chi}, beta = {beta}: {e}")),
                },
            },
        )
        .collect())
}

fn beta_key(b: Beta) -> f64 {
    match b {
        Beta::Finite(v) => v,
        Beta::Infinite => f64::INFINITY,
    }
}

/// Reports as pretty JSON followed by a newline.
pub fn reports_to_json(reports: &[FLOReport]) -> String {
    let mut s = serde_json::to_string_pretty(reports).unwrap_or_else(|_| "[]".into());
    s.push('\n');
    s
}
