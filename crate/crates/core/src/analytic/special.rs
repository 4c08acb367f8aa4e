//! Gamma and Riemann zeta on the real line.

use std::f64::consts::PI;

use super::AnalyticError;

pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

pub fn euler_gamma() -> f64 {
    EULER_GAMMA
}

/// Γ(s) for s > 0 (Lanczos, g = 7).
pub fn gamma_fn(s: f64) -> Result<f64, AnalyticError> {
    if !(s > 0.0 && s.is_finite()) {
        return Err(AnalyticError::Domain(format!("gamma needs s > 0, got {s}")));
    }
    Ok(gamma_unchecked(s))
}

fn gamma_unchecked(s: f64) -> f64 {
    if s < 0.5 {
        return PI / ((PI * s).sin() * gamma_unchecked(1.0 - s));
    }
    let x = s - 1.0;
    let mut a = LANCZOS[0];
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    let t = x + LANCZOS_G + 0.5;
    (2.0 * PI).sqrt() * t.powf(x + 0.5) * (-t).exp() * a
}

// B_2 .. B_16
const BERNOULLI: [f64; 8] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
];
const ZETA_HEAD: u32 = 16;

/// ζ(s) for s > 1.
///
/// Direct sum of the first terms, integral tail, and Euler–Maclaurin
/// corrections up to B_16.
pub fn zeta_fn(s: f64) -> Result<f64, AnalyticError> {
    if !(s > 1.0 && s.is_finite()) {
        return Err(AnalyticError::Domain(format!("zeta needs s > 1, got {s}")));
    }
    let n = ZETA_HEAD as f64;
    let head: f64 = (1..ZETA_HEAD).map(|k| (k as f64).powf(-s)).sum();
    let mut total = head + n.powf(1.0 - s) / (s - 1.0) + 0.5 * n.powf(-s);
    // rising = s (s+1) ... (s+2i-2), fact = (2i)!
    let mut rising = s;
    let mut fact = 2.0;
    let mut power = n.powf(-s - 1.0);
    for (i, b) in BERNOULLI.iter().enumerate() {
        let i = i as f64 + 1.0;
        total += b / fact * rising * power;
        rising *= (s + 2.0 * i - 1.0) * (s + 2.0 * i);
        fact *= (2.0 * i + 1.0) * (2.0 * i + 2.0);
        power /= n * n;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Direct summation to 10⁶ plus the integral tail and the half-term.
    fn zeta_oracle(s: f64) -> f64 {
        let n = 1_000_000u64;
        let mut sum = 0.0;
        for k in (1..n).rev() {
            sum += (k as f64).powf(-s);
        }
        let nf = n as f64;
        sum + nf.powf(1.0 - s) / (s - 1.0) + 0.5 * nf.powf(-s)
    }

    #[test]
    fn zeta_identities() {
        assert!((zeta_fn(2.0).unwrap() - PI * PI / 6.0).abs() < 1e-13);
        assert!((zeta_fn(4.0).unwrap() - PI.powi(4) / 90.0).abs() < 1e-13);
        assert!((zeta_fn(3.0).unwrap() - 1.202_056_903_159_594_3).abs() < 1e-13);
    }

    #[test]
    fn zeta_matches_direct_series() {
        for s in [1.1, 1.5, 2.5, 3.0, 4.7, 7.0, 10.0] {
            let got = zeta_fn(s).unwrap();
            let want = zeta_oracle(s);
            assert!((got - want).abs() < 1e-10, "s={s}: {got} vs {want}");
        }
    }

    #[test]
    fn gamma_identities() {
        assert!((gamma_fn(4.0).unwrap() - 6.0).abs() < 1e-12);
        assert!((gamma_fn(1.0).unwrap() - 1.0).abs() < 1e-13);
        assert!((gamma_fn(0.5).unwrap() - PI.sqrt()).abs() < 1e-13);
        assert!((gamma_fn(1.5).unwrap() - PI.sqrt() / 2.0).abs() < 1e-13);
        let mut fact = 1.0;
        for k in 1..10 {
            fact *= k as f64;
            let g = gamma_fn(k as f64 + 1.0).unwrap();
            assert!((g - fact).abs() / fact < 1e-13, "{k}");
        }
    }

    #[test]
    fn gamma_recurrence() {
        for s in [0.3, 1.1, 2.25, 4.6, 8.9] {
            let lhs = gamma_fn(s + 1.0).unwrap();
            let rhs = s * gamma_fn(s).unwrap();
            assert!((lhs - rhs).abs() / rhs < 1e-13, "{s}");
        }
    }

    #[test]
    fn domains() {
        assert!(gamma_fn(0.0).is_err());
        assert!(gamma_fn(-1.5).is_err());
        assert!(zeta_fn(1.0).is_err());
        assert!(zeta_fn(f64::NAN).is_err());
        assert_eq!(euler_gamma(), EULER_GAMMA);
    }
}
