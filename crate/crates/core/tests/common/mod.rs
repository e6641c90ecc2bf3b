//! Brute-force reference evaluations, written from the defining formulas
//! without sharing code with the library.

#![allow(dead_code)]

use std::f64::consts::PI;

use num_complex::Complex64;

pub const GL_X: [f64; 8] = [
    -0.9602898564975363,
    -0.7966664774136267,
    -0.525532409916329,
    -0.1834346424956498,
    0.1834346424956498,
    0.525532409916329,
    0.7966664774136267,
    0.9602898564975363,
];
pub const GL_W: [f64; 8] = [
    0.1012285362903763,
    0.2223810344533745,
    0.3137066458778873,
    0.362683783378362,
    0.362683783378362,
    0.3137066458778873,
    0.2223810344533745,
    0.1012285362903763,
];

/// Fixed composite 8-point Gauss-Legendre rule on `[a, b]` with `n` panels.
pub fn gl<T, F>(f: F, a: f64, b: f64, n: usize) -> T
where
    T: Default + std::ops::Add<Output = T> + std::ops::Mul<f64, Output = T>,
    F: Fn(f64) -> T,
{
    let h = (b - a) / n as f64;
    let mut acc = T::default();
    for k in 0..n {
        let m = a + (k as f64 + 0.5) * h;
        for i in 0..8 {
            acc = acc + f(m + 0.5 * h * GL_X[i]) * (0.5 * h * GL_W[i]);
        }
    }
    acc
}

/// `None` is an infinite inverse temperature.
pub fn coth_half(beta: Option<f64>) -> f64 {
    match beta {
        None => 1.0,
        Some(b) => 1.0 / (0.5 * b).tanh(),
    }
}

pub fn nbar(x: Option<f64>) -> f64 {
    match x {
        None => 0.0,
        Some(v) => 1.0 / (v.exp() - 1.0),
    }
}

/// `D(tau)` by a fixed trapezoid on `[0, omega_cut]`, Richardson-combined
/// over `n` and `n / 2` panels.
pub fn kernel_trapezoid(tau: f64, chi: f64, beta: Option<f64>, classical: bool, n: usize) -> f64 {
    let c = coth_half(beta);
    let delta2 = c * tau * tau * chi / 2.0;
    let g = tau * chi;
    let cut = (2.0 * 60.0 / delta2).sqrt();
    let f = |w: f64| {
        let im_gamma2 = if classical {
            2.0 / (beta.expect("classical needs a temperature") * w)
        } else {
            match beta {
                None => 1.0,
                Some(b) => 1.0 / (0.5 * b * w).tanh(),
            }
        };
        let phase = 0.5 * w * w * g;
        w.powi(3)
            * (-0.5 * w * w * delta2).exp()
            * (phase.cos() * (w * tau).sin() + phase.sin() * im_gamma2 * (w * tau).cos())
    };
    let trap = |m: usize| {
        let h = cut / m as f64;
        // integrand vanishes at both ends
        (1..m).map(|k| f(k as f64 * h)).sum::<f64>() * h
    };
    let fine = trap(n);
    let coarse = trap(n / 2);
    (4.0 * fine - coarse) / 3.0 / (4.0 * PI * PI)
}

/// `(K+, K-)` straight from the definition.
pub fn k_pm(x: f64, y: f64, chi: f64, beta: Option<f64>) -> (f64, f64) {
    let s2 = chi * x * x * coth_half(beta);
    let g = |d: f64| (-d * d / s2).exp();
    let h = chi * x * x / 2.0;
    (g(y + x + h) - g(y - x - h), g(y - x + h) - g(y + x - h))
}

pub fn u_quantum(x: f64, y: f64, chi: f64, beta: Option<f64>) -> f64 {
    let (kp, km) = k_pm(x, y, chi, beta);
    kp + nbar(beta.map(|b| b * x)) * (kp + km)
}

pub fn u_classical(x: f64, y: f64, chi: f64, beta: f64) -> f64 {
    let (kp, km) = k_pm(x, y, chi, Some(beta));
    0.5 * (kp - km) + (kp + km) / (beta * x)
}

pub fn mu0(gamma: f64, chi: f64, beta: Option<f64>) -> f64 {
    gamma / (4.0 * (PI.powi(3) * chi * coth_half(beta)).sqrt())
}

/// Panels of width at most `w` covering `[a, b]`.
fn panels(a: f64, b: f64, w: f64) -> usize {
    (((b - a) / w).ceil() as usize).max(1)
}

/// `mu(z) = -(i mu0 / pi) int dx x^2 int dy u / (y (y + z))`, folded onto
/// `y > 0` and evaluated with fixed Gauss-Legendre panels; `refine` divides
/// every panel width. The `x` tail beyond `x_max` is added as a power law
/// fitted to the last decade.
pub fn mu_complex_grid(
    z: Complex64,
    gamma: f64,
    chi: f64,
    beta: Option<f64>,
    classical: bool,
    refine: f64,
) -> Complex64 {
    let c = coth_half(beta);
    let u = |x: f64, y: f64| {
        if classical {
            u_classical(x, y, chi, beta.expect("classical needs a temperature"))
        } else {
            u_quantum(x, y, chi, beta)
        }
    };
    let inner = |x: f64| -> Complex64 {
        let sd = x * (chi * c / 2.0).sqrt();
        let reach = x + chi * x * x / 2.0 + 16.0 * sd;
        // u odd in y: u / (y (y + z)) + u(-y) / (-y (-y + z)) = (u / y) 2z / (z^2 - y^2)
        let f = |y: f64| -> Complex64 { 2.0 * z / (z * z - y * y) * (u(x, y) / y) };
        let near = reach.min(4.0 + z.re.abs());
        let w1 = (0.1 * z.im).min(sd / 2.0) / refine;
        let mut acc: Complex64 = gl(f, 0.0, near, panels(0.0, near, w1));
        if reach > near {
            let w2 = (sd / 2.0) / refine;
            acc += gl(f, near, reach, panels(near, reach, w2));
        }
        acc
    };
    let outer = |x: f64| inner(x) * (x * x);
    // [0, 4] uniform, then geometric panels
    let mut total: Complex64 = gl(outer, 0.0, 4.0, panels(0.0, 4.0, 0.05 / refine));
    let ratio = 1.0 + 0.1 / refine;
    let mut a = 4.0;
    let x_max = 2000.0;
    let mut last = Vec::new();
    while a < x_max {
        let b = (a * ratio).min(x_max);
        let part: Complex64 = gl(outer, a, b, 1);
        total += part;
        if a > x_max / 10.0 {
            last.push((a, b, part));
        }
        a = b;
    }
    // power-law tail from the last decade of panel integrals
    if let (Some(first), Some(end)) = (last.first(), last.last()) {
        let mid = |p: &(f64, f64, Complex64)| (0.5 * (p.0 + p.1), p.2.norm() / (p.1 - p.0));
        let (x1, f1) = mid(first);
        let (x2, f2) = mid(end);
        let p = -(f2 / f1).ln() / (x2 / x1).ln();
        let density = end.2 / (end.1 - end.0);
        total += density * x2 / (p - 1.0);
    }
    Complex64::new(0.0, -mu0(gamma, chi, beta) / PI) * total
}

/// `Re mu(omega + i0) = (mu0 / omega) int dx x^2 u(x, -omega)`.
pub fn re_mu_boundary(omega: f64, gamma: f64, chi: f64, beta: Option<f64>, classical: bool) -> f64 {
    let u = |x: f64| {
        if classical {
            u_classical(x, -omega, chi, beta.expect("classical needs a temperature"))
        } else {
            u_quantum(x, -omega, chi, beta)
        }
    };
    let f = |x: f64| x * x * u(x);
    // the x-Gaussian decays like exp(-chi x^2 / (4 coth))
    let spread = (200.0 * coth_half(beta) / chi).sqrt();
    let x_max = (8.0 * (omega.abs() + 1.0) / chi.min(1.0).sqrt() + 40.0).max(spread);
    mu0(gamma, chi, beta) / omega * gl(f, 0.0, x_max, 40_000)
}

/// Dawson's integral `F(x) = exp(-x^2) int_0^x exp(t^2) dt` by its Maclaurin series.
pub fn dawson(x: f64) -> f64 {
    let mut term = x;
    let mut sum = x;
    let x2 = x * x;
    for k in 1..200 {
        term *= -2.0 * x2 / (2 * k + 1) as f64;
        sum += term;
        if term.abs() < 1e-18 * sum.abs() {
            break;
        }
    }
    sum
}
