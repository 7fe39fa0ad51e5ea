//! Reference implementations that share no code with the library's FFT and
//! matrix paths.
#![allow(dead_code)]

use std::f64::consts::PI;

use num_complex::Complex64;

/// `J_m(x)` from the power series `Σ_k (-1)^k (x/2)^{2k+m} / (k! (k+m)!)`.
pub fn bessel_j_series(m: i32, x: f64) -> f64 {
    let n = m.unsigned_abs() as i32;
    let half = x / 2.0;
    let mut term = half.powi(n) / (1..=n).map(f64::from).product::<f64>();
    let mut sum = term;
    for k in 1..200 {
        term *= -half * half / (k as f64 * (k + n) as f64);
        sum += term;
        if term.abs() < 1e-18 * sum.abs().max(1e-300) {
            break;
        }
    }
    if m < 0 && n % 2 == 1 {
        -sum
    } else {
        sum
    }
}

/// `J_m(x) = (1/π) ∫_0^π cos(mτ - x sin τ) dτ` by composite Simpson.
pub fn bessel_j_quadrature(m: i32, x: f64) -> f64 {
    let intervals = 4000;
    let h = PI / intervals as f64;
    let f = |t: f64| (m as f64 * t - x * t.sin()).cos();
    let mut acc = f(0.0) + f(PI);
    for i in 1..intervals {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(i as f64 * h);
    }
    acc * h / 3.0 / PI
}

/// Fourier coefficient `(1/K^d) Σ e^{iφ(x,y)} e^{-i(m_x x + m_y y)}` by a
/// direct (non-FFT) sum over `k` points per axis; `dims = 1` ignores `y`.
pub fn quadrature_coefficient(phi: &dyn Fn(f64, f64) -> f64, dims: usize, mx: i32, my: i32, k: usize) -> Complex64 {
    let step = 2.0 * PI / k as f64;
    let ys = if dims == 1 { 1 } else { k };
    let mut acc = Complex64::new(0.0, 0.0);
    for iy in 0..ys {
        let y = iy as f64 * step;
        for ix in 0..k {
            let x = ix as f64 * step;
            acc += Complex64::from_polar(1.0, phi(x, y) - mx as f64 * x - my as f64 * y);
        }
    }
    acc / (k * ys) as f64
}

/// Analytic forms of the named masks, angles in radians per period.
pub fn analytic_phase(name: &str) -> Box<dyn Fn(f64, f64) -> f64> {
    match name {
        "phi1_1d" => Box::new(|x, _| 1.3 * x.sin() + 1.5 * (2.0 * x).cos()),
        "phi2_1d" => Box::new(|x, _| 1.9 * x.sin()),
        "phi3_1d" => Box::new(|x, _| x.cos()),
        "phi4_1d" => Box::new(|x, _| x.cos() + x),
        "phi1_2d" => Box::new(|x, y| 2.8 * x.sin() * y.cos()),
        "phi2_2d" => Box::new(|x, y| 1.4 * (x.sin() + y.sin())),
        other => panic!("no analytic form for {other}"),
    }
}

/// Brute-force steer-and-project on plain nested vectors.
///
/// Builds `Σ_k C |k>|-k>`, applies `U'(k', k) = U(-k, k')` to the signal,
/// contracts with `A = conj(φ₀)` and returns the unnormalized idler
/// amplitudes indexed by idler mode `-M..=M` (1D).
pub fn brute_force_transfer(u: &[Vec<Complex64>], phi0: &[Complex64]) -> Vec<Complex64> {
    let n = u.len();
    let m = (n / 2) as i64;
    let slot = |k: i64| (k + m) as usize;
    let c = 1.0 / (n as f64).sqrt();
    let mut u_prime = vec![vec![Complex64::new(0.0, 0.0); n]; n];
    for kp in -m..=m {
        for k in -m..=m {
            u_prime[slot(kp)][slot(k)] = u[slot(-k)][slot(kp)];
        }
    }
    let mut idler = vec![Complex64::new(0.0, 0.0); n];
    for k in -m..=m {
        // signal starts in |k>, idler in |-k>
        for kp in -m..=m {
            idler[slot(-k)] += c * phi0[slot(kp)] * u_prime[slot(kp)][slot(k)];
        }
    }
    idler
}

pub fn mat_vec(u: &[Vec<Complex64>], v: &[Complex64]) -> Vec<Complex64> {
    u.iter().map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum()).collect()
}

pub fn norm_sqr(v: &[Complex64]) -> f64 {
    v.iter().map(|c| c.norm_sqr()).sum()
}

/// `|<a|b>|² / (|a|² |b|²)`.
pub fn overlap_fidelity(a: &[Complex64], b: &[Complex64]) -> f64 {
    let ip: Complex64 = a.iter().zip(b).map(|(x, y)| x.conj() * y).sum();
    ip.norm_sqr() / (norm_sqr(a) * norm_sqr(b))
}

pub fn total_variation(p: &[f64], q: &[f64]) -> f64 {
    0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>()
}
