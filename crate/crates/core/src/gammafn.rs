//! The reciprocal gamma function `φ(z) = 1/Γ(z)` on the real line, with exact
//! values of `φ`, `φ'`, `φ''` at the integers.
//!
//! The integer values are the only derivative data the Gamma series need;
//! generic real arguments (twisted sectors) only need `φ` itself, which is
//! evaluated by Lanczos plus reflection.

use crate::scalar::{cast, Real};

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

pub fn factorial<F: Real>(k: u32) -> F {
    let mut acc = F::one();
    for j in 2..=k {
        acc = acc * cast::<F>(j as f64);
    }
    acc
}

fn harmonic(k: u32) -> f64 {
    (1..=k).map(|j| 1.0 / j as f64).sum()
}

fn harmonic2(k: u32) -> f64 {
    (1..=k).map(|j| 1.0 / (j as f64 * j as f64)).sum()
}

/// `sin(πx)` with argument reduction.
fn sinpi<F: Real>(x: F) -> F {
    let nearest = x.round();
    let r = x - nearest;
    let s = (F::PI() * r).sin();
    // sin(π(n + r)) = (-1)^n sin(πr)
    let n = nearest.abs().to_f64().unwrap_or(0.0) as u64;
    if n % 2 == 1 {
        -s
    } else {
        s
    }
}

/// Γ(x) for x ≥ 0.5 by the Lanczos approximation.
fn gamma_lanczos<F: Real>(x: F) -> F {
    let xm1 = x - F::one();
    let mut t = cast::<F>(LANCZOS[0]);
    for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
        t = t + cast::<F>(c) / (xm1 + cast::<F>(i as f64));
    }
    let w = xm1 + cast::<F>(LANCZOS_G) + cast::<F>(0.5);
    F::TAU().sqrt() * w.powf(xm1 + cast::<F>(0.5)) * (-w).exp() * t
}

fn is_integer<F: Real>(x: F) -> Option<i64> {
    let r = x.round();
    if x == r {
        r.to_f64().map(|v| v as i64)
    } else {
        None
    }
}

/// `φ(x) = 1/Γ(x)`, exact at the integers.
pub fn phi<F: Real>(x: F) -> F {
    if let Some(k) = is_integer(x) {
        return phi_at_int(k);
    }
    if x < cast::<F>(0.5) {
        // 1/Γ(x) = sin(πx) Γ(1-x) / π
        sinpi(x) * gamma_lanczos(F::one() - x) / F::PI()
    } else {
        F::one() / gamma_lanczos(x)
    }
}

/// `φ(k)` at an integer: `0` for `k ≤ 0`, `1/(k-1)!` for `k ≥ 1`.
pub fn phi_at_int<F: Real>(k: i64) -> F {
    if k <= 0 {
        F::zero()
    } else {
        F::one() / factorial::<F>((k - 1) as u32)
    }
}

/// `φ'(k)` at an integer: `(-1)^m m!` at `k = -m ≤ 0`, `(γ - H_{k-1})/(k-1)!`
/// at `k ≥ 1`.
pub fn phi_prime_at_int<F: Real>(k: i64) -> F {
    if k <= 0 {
        let m = (-k) as u32;
        let sign = if m % 2 == 0 { F::one() } else { -F::one() };
        sign * factorial::<F>(m)
    } else {
        cast::<F>(EULER_GAMMA - harmonic((k - 1) as u32)) / factorial::<F>((k - 1) as u32)
    }
}

/// `φ''(k)` at an integer: `(-1)^{m+1} 2 m! (H_m - γ)` at `k = -m ≤ 0`,
/// `((H_{k-1} - γ)² - π²/6 + H⁽²⁾_{k-1})/(k-1)!` at `k ≥ 1`.
pub fn phi_dprime_at_int<F: Real>(k: i64) -> F {
    if k <= 0 {
        let m = (-k) as u32;
        let sign = if m % 2 == 0 { -F::one() } else { F::one() };
        sign * cast::<F>(2.0) * factorial::<F>(m) * cast::<F>(harmonic(m) - EULER_GAMMA)
    } else {
        let m = (k - 1) as u32;
        let h = harmonic(m) - EULER_GAMMA;
        cast::<F>(h * h - std::f64::consts::PI.powi(2) / 6.0 + harmonic2(m)) / factorial::<F>(m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_integer_values() {
        assert_eq!(phi_at_int::<f64>(1), 1.0);
        assert_eq!(phi_at_int::<f64>(4), 1.0 / 6.0);
        assert_eq!(phi_at_int::<f64>(0), 0.0);
        assert_eq!(phi_at_int::<f64>(-3), 0.0);
        assert_eq!(phi::<f64>(-3.0), 0.0);
    }

    #[test]
    fn derivative_special_values() {
        // φ'(0) = 1, φ'(-1) = -1, φ'(-2) = 2, φ'(-3) = -6
        assert_eq!(phi_prime_at_int::<f64>(0), 1.0);
        assert_eq!(phi_prime_at_int::<f64>(-1), -1.0);
        assert_eq!(phi_prime_at_int::<f64>(-2), 2.0);
        assert_eq!(phi_prime_at_int::<f64>(-3), -6.0);
        // φ'(1) = γ
        assert!((phi_prime_at_int::<f64>(1) - EULER_GAMMA).abs() < 1e-15);
        // φ''(0) = 2 φ'(1)
        assert!((phi_dprime_at_int::<f64>(0) - 2.0 * phi_prime_at_int::<f64>(1)).abs() < 1e-15);
    }

    #[test]
    fn half_integer_values() {
        let sqrt_pi = std::f64::consts::PI.sqrt();
        assert!((phi(0.5f64) - 1.0 / sqrt_pi).abs() < 1e-14);
        // Γ(-1/2) = -2√π
        assert!((phi(-0.5f64) + 1.0 / (2.0 * sqrt_pi)).abs() < 1e-14);
        // Γ(3/2) = √π/2
        assert!((phi(1.5f64) - 2.0 / sqrt_pi).abs() < 1e-14);
    }

    #[test]
    fn reflection_identity() {
        // φ(x) φ(1-x) = sin(πx)/π
        for i in 0..60 {
            let x = -9.7 + 0.333 * i as f64;
            let lhs = phi(x) * phi(1.0 - x);
            let rhs = (std::f64::consts::PI * x).sin() / std::f64::consts::PI;
            assert!((lhs - rhs).abs() < 1e-13, "x = {x}: {lhs} vs {rhs}");
        }
    }

    #[test]
    fn finite_difference_matches_phi_prime() {
        // central difference of φ at integer points
        for k in [-4i64, -2, -1, 0, 1, 3] {
            let h = 1e-5f64;
            let x = k as f64;
            let fd = (phi(x + h) - phi(x - h)) / (2.0 * h);
            assert!(
                (fd - phi_prime_at_int::<f64>(k)).abs() < 1e-8 * phi_prime_at_int::<f64>(k).abs().max(1.0),
                "k = {k}"
            );
        }
    }

    #[test]
    fn finite_difference_matches_phi_dprime() {
        for k in [-3i64, -1, 0, 1, 2] {
            let h = 1e-4f64;
            let x = k as f64;
            let fd = (phi(x + h) - 2.0 * phi(x) + phi(x - h)) / (h * h);
            assert!(
                (fd - phi_dprime_at_int::<f64>(k)).abs()
                    < 1e-6 * phi_dprime_at_int::<f64>(k).abs().max(1.0),
                "k = {k}"
            );
        }
    }

    #[test]
    fn phi_in_f32() {
        assert!((phi(0.5f32) - 1.0 / std::f32::consts::PI.sqrt()).abs() < 1e-5);
    }
}
