use std::f64::consts::PI;

use jiggle_core::flo::{
    characteristic, check_analyticity, check_positivity, check_symmetry, count_uhp_zeros, cr_residuals, fit_order,
    positivity_from_samples, reports_to_json, scan, scan_cell, symmetric_logspace, symmetry_from_samples,
    winding_number, Rectangle, ScanOptions, UhpGrid, DEFAULT_H,
};
use jiggle_core::model::{Beta, FieldStatistics, ReducedParams};
use jiggle_core::spectrum::Spectrum;
use num_complex::Complex64;

const QUANTUM: FieldStatistics = FieldStatistics::Quantum;
const CLASSICAL: FieldStatistics = FieldStatistics::Classical;

fn params(chi: f64, beta: Beta) -> ReducedParams {
    ReducedParams::new(chi, beta, 1.0, 1.0).unwrap()
}

fn spectrum(chi: f64, beta: Beta, stats: FieldStatistics) -> Spectrum {
    Spectrum::new(params(chi, beta), stats, 1e-8).unwrap()
}

#[test]
fn single_point_grid_reproduces_boundary_value() {
    let s = spectrum(1.0, Beta::Finite(10.0), QUANTUM);
    let tol = 1e-8 * s.params.mu0;
    let rec = check_positivity(&s, &[0.7], tol).unwrap();
    let b = s.mu_boundary(0.7).unwrap();
    assert_eq!(rec.n_points, 1);
    assert_eq!(rec.min_re_mu.to_bits(), b.re_mu.to_bits());
    assert_eq!(rec.argmin_omega, 0.7);
    assert!(rec.pass);
}

#[test]
fn quantum_cell_passes_positivity_and_symmetry() {
    let s = spectrum(1.0, Beta::Finite(10.0), QUANTUM);
    let omegas = symmetric_logspace(0.01, 10.0, 21).unwrap();
    let tol = 1e-8 * s.params.mu0;
    let pos = check_positivity(&s, &omegas, tol).unwrap();
    let sym = check_symmetry(&s, &omegas, tol).unwrap();
    assert!(pos.pass, "{pos:?}");
    assert!(sym.pass, "{sym:?}");
    assert_eq!(sym.n_pairs, 21);
    assert!(pos.flagged.is_empty());
}

#[test]
fn injected_faults_are_detected() {
    let s = spectrum(1.0, Beta::Finite(10.0), QUANTUM);
    let omegas = symmetric_logspace(0.1, 2.0, 5).unwrap();
    let mut samples: Vec<_> = omegas.iter().map(|&w| s.mu_boundary(w).unwrap()).collect();
    let tol = 1e-8 * s.params.mu0;
    assert!(symmetry_from_samples(&samples, tol).pass);
    samples[7].im_mu += 1e-3;
    let sym = symmetry_from_samples(&samples, tol);
    assert!(!sym.pass);
    assert!(sym.max_asymmetry >= 1e-3 - 1e-9);
    samples[2].re_mu = -1.0;
    let pos = positivity_from_samples(&samples, Vec::new(), tol);
    assert!(!pos.pass);
    assert_eq!(pos.min_re_mu, -1.0);
    assert_eq!(pos.argmin_omega, omegas[2]);
}

#[test]
fn asymmetric_grid_is_rejected() {
    let s = spectrum(1.0, Beta::Finite(10.0), QUANTUM);
    assert!(check_symmetry(&s, &[-1.0, 0.5, 1.0], 1e-9).is_err());
    assert!(check_positivity(&s, &[0.0, 1.0], 1e-9).is_err());
    assert!(check_positivity(&s, &[], 1e-9).is_err());
}

#[test]
fn winding_of_polynomials() {
    let rect = Rectangle {
        x: 3.0,
        y0: 1e-2,
        y: 3.0,
    };
    // zeros at +-1 lie on the real axis, outside the rectangle
    assert_eq!(winding_number(|z| Ok(z * z - 1.0), &rect, 64).unwrap(), 0);
    // z = i inside, z = -i outside
    assert_eq!(winding_number(|z| Ok(z * z + 1.0), &rect, 64).unwrap(), 1);
    let two = |z: Complex64| Ok((z - Complex64::new(0.5, 1.0)) * (z - Complex64::new(-1.0, 2.0)));
    assert_eq!(winding_number(two, &rect, 16).unwrap(), 2);
    assert!(winding_number(
        Ok,
        &Rectangle {
            x: 1.0,
            y0: 0.0,
            y: 1.0
        },
        16
    )
    .is_err());
}

#[test]
fn cauchy_riemann_of_analytic_and_nonanalytic_functions() {
    let pts = [Complex64::new(0.3, 1.0), Complex64::new(-1.0, 2.0)];
    let hs = [0.2, 0.1, 0.05, 0.025];
    for row in cr_residuals(|z| Ok((z.exp(), 0.0)), &pts, &hs) {
        let row = row.unwrap();
        let order = fit_order(&row, &hs).unwrap();
        assert!((order - 2.0).abs() < 0.1, "{order}");
    }
    for row in cr_residuals(|z| Ok((z.conj(), 0.0)), &pts, &hs) {
        let row = row.unwrap();
        assert!(row.iter().all(|r| r.0 > 0.5), "{row:?}");
    }
}

#[test]
fn mu_is_analytic_in_the_upper_half_plane() {
    let s = spectrum(1.0, Beta::Finite(10.0), QUANTUM);
    let grid = UhpGrid {
        x_min: -2.0,
        x_max: 2.0,
        nx: 2,
        y_min: 0.5,
        y_max: 2.0,
        ny: 2,
    };
    let rec = check_analyticity(&s, &grid, &DEFAULT_H).unwrap();
    assert!(rec.pass, "{rec:?}");
    assert!(rec.n_fitted > 0);
    let too_low = UhpGrid { y_min: 0.1, ..grid };
    assert!(check_analyticity(&s, &too_low, &DEFAULT_H).is_err());
}

/// Winding by summing raw phase steps over a dense uniform contour.
fn dense_winding(f: impl Fn(Complex64) -> Complex64 + Sync, rect: &Rectangle, n_edge: usize) -> f64 {
    use rayon::prelude::*;
    let c = [
        Complex64::new(-rect.x, rect.y0),
        Complex64::new(rect.x, rect.y0),
        Complex64::new(rect.x, rect.y),
        Complex64::new(-rect.x, rect.y),
    ];
    let zs: Vec<Complex64> = (0..4)
        .flat_map(|k| (0..n_edge).map(move |i| c[k] + (c[(k + 1) % 4] - c[k]) * (i as f64 / n_edge as f64)))
        .collect();
    let fs: Vec<Complex64> = zs.par_iter().map(|&z| f(z)).collect();
    let m = fs.len();
    (0..m).map(|i| (fs[(i + 1) % m] / fs[i]).arg()).sum::<f64>() / (2.0 * PI)
}

#[test]
fn zero_count_matches_dense_contour() {
    let s = spectrum(1.0, Beta::Finite(10.0), QUANTUM);
    let rect = Rectangle {
        x: 5.0,
        y0: 1e-2,
        y: 5.0,
    };
    let n = count_uhp_zeros(&s, &rect, 200).unwrap();
    let dense = dense_winding(|z| characteristic(&s, z).unwrap(), &rect, 1000);
    assert!((dense - n as f64).abs() < 1e-3, "{n} vs {dense}");
    assert_eq!(n, 0);
}

#[test]
fn single_cell_scan_agrees_with_direct_checks() {
    let p = params(1.0, Beta::Finite(10.0));
    let omegas = symmetric_logspace(0.05, 5.0, 9).unwrap();
    let opts = ScanOptions::default();
    let cell = scan_cell(&p, QUANTUM, &omegas, &opts);
    let s = Spectrum::new(p, QUANTUM, opts.quad_tol).unwrap();
    let tol = opts.tol_rel * p.mu0;
    assert_eq!(cell.criterion_ii, Some(check_positivity(&s, &omegas, tol).unwrap()));
    assert_eq!(cell.criterion_iii, Some(check_symmetry(&s, &omegas, tol).unwrap()));
    assert!(cell.pass());
    assert!(!cell.unconverged());
    assert!(cell.violations.is_empty());
}

#[test]
fn classical_cell_records_violations_and_crossings() {
    let p = params(1.0, Beta::Finite(10.0));
    let omegas = symmetric_logspace(0.01, 10.0, 41).unwrap();
    let cell = scan_cell(&p, CLASSICAL, &omegas, &ScanOptions::default());
    assert!(!cell.pass());
    assert!(!cell.violations.is_empty());
    assert!(cell.violations.iter().all(|v| v.re_mu < 0.0 && v.chi == 1.0));
    let s = Spectrum::new(p, CLASSICAL, 1e-8).unwrap();
    for &w in &cell.crossings {
        let (re, err) = s.re_mu_boundary(w).unwrap();
        assert!(re.abs() <= 1e-6 * p.mu0 + err, "omega = {w}: {re}");
    }
}

#[test]
fn scan_order_and_json_are_deterministic() {
    let base = params(1.0, Beta::Finite(1.0));
    let omegas = symmetric_logspace(0.1, 3.0, 4).unwrap();
    let betas = [Beta::Infinite, Beta::Finite(10.0), Beta::Finite(1.0)];
    let opts = ScanOptions::default();
    let a = scan(&base, &[1.0, 0.1], &betas, &omegas, QUANTUM, &opts).unwrap();
    let keys: Vec<(f64, Beta)> = a.iter().map(|r| (r.params.chi, r.params.beta_omega_i)).collect();
    assert_eq!(
        keys,
        vec![
            (0.1, Beta::Finite(1.0)),
            (0.1, Beta::Finite(10.0)),
            (0.1, Beta::Infinite),
            (1.0, Beta::Finite(1.0)),
            (1.0, Beta::Finite(10.0)),
            (1.0, Beta::Infinite),
        ]
    );
    let b = scan(&base, &[0.1, 1.0], &betas, &omegas, QUANTUM, &opts).unwrap();
    assert_eq!(reports_to_json(&a), reports_to_json(&b));
    assert!(reports_to_json(&a).ends_with("]\n"));
}

#[test]
fn invalid_cell_is_reported_not_fatal() {
    let base = params(1.0, Beta::Finite(1.0));
    let omegas = symmetric_logspace(0.1, 3.0, 3).unwrap();
    let r = scan(
        &base,
        &[-1.0, 1.0],
        &[Beta::Finite(1.0)],
        &omegas,
        QUANTUM,
        &ScanOptions::default(),
    )
    .unwrap();
    assert_eq!(r.len(), 2);
    assert!(r[0].error.is_some() && !r[0].pass());
    assert!(r[1].pass());
    assert!(scan(
        &base,
        &[],
        &[Beta::Finite(1.0)],
        &omegas,
        QUANTUM,
        &ScanOptions::default()
    )
    .is_err());
}
