//! Empirical distributions: Kolmogorov–Smirnov distances, characteristic
//! functions, moments and histograms.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StatsError {
    #[error("need at least {needed} samples, got {got}")]
    TooFew { needed: usize, got: usize },
    #[error("samples contain NaN")]
    NaN,
    #[error("bin count must be at least 1")]
    NoBins,
}

fn check(samples: &[f64], needed: usize) -> Result<(), StatsError> {
    if samples.len() < needed {
        return Err(StatsError::TooFew {
            needed,
            got: samples.len(),
        });
    }
    if samples.iter().any(|x| x.is_nan()) {
        return Err(StatsError::NaN);
    }
    Ok(())
}

/// Asymptotic Kolmogorov critical value at the 5% level.
pub fn ks_critical_5(n: usize) -> f64 {
    1.358 / (n as f64).sqrt()
}

/// Asymptotic Kolmogorov critical value at the 1% level.
pub fn ks_critical_1(n: usize) -> f64 {
    1.628 / (n as f64).sqrt()
}

/// `sup_x |F_n(x) - F(x)|`. At each distinct sample value both the gap above
/// (against `F(x)`) and the gap below (against `F(x⁻)`) are checked, so ties
/// and atoms are handled exactly.
pub fn ks_statistic(samples: &[f64], cdf: impl Fn(f64) -> f64) -> Result<f64, StatsError> {
    check(samples, 1)?;
    let mut xs = samples.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    let mut d: f64 = 0.0;
    let mut i = 0;
    while i < xs.len() {
        let x = xs[i];
        let mut j = i;
        while j < xs.len() && xs[j] == x {
            j += 1;
        }
        let below = i as f64 / n;
        let at = j as f64 / n;
        d = d.max((at - cdf(x)).abs()).max((cdf(x.next_down()) - below).abs());
        i = j;
    }
    Ok(d)
}

/// `(1/n) Σ e^{iξx}`.
pub fn empirical_char_fn(samples: &[f64], xi: f64) -> Result<Complex64, StatsError> {
    check(samples, 1)?;
    let sum: Complex64 = samples.iter().map(|&x| Complex64::from_polar(1.0, xi * x)).sum();
    Ok(sum / samples.len() as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Moments {
    pub n: usize,
    pub mean: f64,
    /// Unbiased.
    pub variance: f64,
    /// `None` when all samples are equal.
    pub skewness: Option<f64>,
    /// Excess kurtosis; `None` when all samples are equal.
    pub kurtosis: Option<f64>,
}

pub fn moments(samples: &[f64]) -> Result<Moments, StatsError> {
    check(samples, 2)?;
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let (mut m2, mut m3, mut m4) = (0.0, 0.0, 0.0);
    for &x in samples {
        let d = x - mean;
        let d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    let variance = m2 / (n - 1.0);
    let (m2, m3, m4) = (m2 / n, m3 / n, m4 / n);
    let degenerate = m2 <= f64::EPSILON * f64::EPSILON * mean * mean || m2 == 0.0;
    Ok(Moments {
        n: samples.len(),
        mean,
        variance,
        skewness: (!degenerate).then(|| m3 / m2.powf(1.5)),
        kurtosis: (!degenerate).then(|| m4 / (m2 * m2) - 3.0),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bin {
    pub left: f64,
    pub right: f64,
    pub count: u64,
}

/// Equal-width bins over `[min, max]`; the last bin is closed. If all samples
/// are equal the bins cover `[x - 1/2, x + 1/2]`.
pub fn histogram(samples: &[f64], bins: usize) -> Result<Vec<Bin>, StatsError> {
    check(samples, 1)?;
    if bins == 0 {
        return Err(StatsError::NoBins);
    }
    let lo = samples.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = samples.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let (lo, hi) = if hi > lo { (lo, hi) } else { (lo - 0.5, lo + 0.5) };
    let width = (hi - lo) / bins as f64;
    let edge = |i: usize| if i == bins { hi } else { lo + i as f64 * width };
    let mut out: Vec<Bin> = (0..bins)
        .map(|i| Bin {
            left: edge(i),
            right: edge(i + 1),
            count: 0,
        })
        .collect();
    for &x in samples {
        let mut k = (((x - lo) / width) as usize).min(bins - 1);
        // Keep bin membership consistent with the stored edges.
        while k > 0 && x < out[k].left {
            k -= 1;
        }
        while k + 1 < bins && x >= out[k + 1].left {
            k += 1;
        }
        out[k].count += 1;
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GofTest {
    KsExactCdf,
    KsNormalFitted,
    MomentMatch,
    CharFnMatch,
}

/// Outcome of one goodness-of-fit check.
///
/// `pass` is `statistic ≤ threshold`, or `statistic > threshold` when
/// `expect_reject` is set (a non-normality assertion, for example).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GofReport {
    pub test: GofTest,
    pub statistic: f64,
    pub threshold: f64,
    pub n_samples: usize,
    pub expect_reject: bool,
    pub pass: bool,
    pub reference: String,
}

impl GofReport {
    pub fn new(
        test: GofTest,
        statistic: f64,
        threshold: f64,
        n_samples: usize,
        reference: impl Into<String>,
    ) -> Self {
        GofReport {
            test,
            statistic,
            threshold,
            n_samples,
            expect_reject: false,
            pass: statistic <= threshold,
            reference: reference.into(),
        }
    }

    pub fn rejecting(
        test: GofTest,
        statistic: f64,
        threshold: f64,
        n_samples: usize,
        reference: impl Into<String>,
    ) -> Self {
        GofReport {
            expect_reject: true,
            pass: statistic > threshold,
            ..Self::new(test, statistic, threshold, n_samples, reference)
        }
    }
}

/// Standard normal CDF.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / std::f64::consts::SQRT_2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampler::RngStream;
    use rand::Rng;
    use rand_distr::{Exp1, StandardNormal};

    fn exp_cdf(x: f64) -> f64 {
        if x <= 0.0 {
            0.0
        } else {
            -(-x).exp_m1()
        }
    }

    #[test]
    fn ks_single_point_mass() {
        let s = [0.7; 5];
        let d = ks_statistic(&s, exp_cdf).unwrap();
        let f = exp_cdf(0.7);
        assert!((d - f.max(1.0 - f)).abs() < 1e-12);
    }

    #[test]
    fn ks_on_quantiles() {
        let n = 1000;
        let s: Vec<f64> = (1..=n)
            .map(|i| -(1.0 - i as f64 / (n + 1) as f64).ln())
            .collect();
        let d = ks_statistic(&s, exp_cdf).unwrap();
        assert!(d <= 1.0 / (n + 1) as f64 + 1e-12);
        assert!(d < 2.0 / n as f64);
    }

    #[test]
    fn ks_meta_trials() {
        let n = 10_000;
        let mut passed = 0;
        for trial in 0..100 {
            let mut rng = RngStream::new(77, trial);
            let s: Vec<f64> = (0..n).map(|_| rng.sample(Exp1)).collect();
            passed += usize::from(ks_statistic(&s, exp_cdf).unwrap() < ks_critical_1(n));
        }
        assert!(passed >= 98, "{passed}");
    }

    #[test]
    fn ks_rejects_empty() {
        assert!(ks_statistic(&[], exp_cdf).is_err());
        assert!(ks_statistic(&[f64::NAN, 1.0], exp_cdf).is_err());
    }

    #[test]
    fn char_fn_trivial_cases() {
        let s = [0.3, -1.2, 4.0];
        assert_eq!(empirical_char_fn(&s, 0.0).unwrap(), Complex64::new(1.0, 0.0));
        let z = [0.0; 10];
        for xi in [0.5, 1.0, 17.0] {
            assert_eq!(empirical_char_fn(&z, xi).unwrap(), Complex64::new(1.0, 0.0));
            assert!(empirical_char_fn(&s, xi).unwrap().norm() <= 1.0 + 1e-15);
        }
    }

    #[test]
    fn moments_examples() {
        let m = moments(&[0.0, 1.0]).unwrap();
        assert_eq!((m.mean, m.variance), (0.5, 0.5));
        let m = moments(&[2.0; 4]).unwrap();
        assert_eq!(m.variance, 0.0);
        assert!(m.skewness.is_none() && m.kurtosis.is_none());
        assert!(moments(&[1.0]).is_err());

        let mut rng = RngStream::new(3, 3);
        let s: Vec<f64> = (0..10_000).map(|_| rng.sample(StandardNormal)).collect();
        let m = moments(&s).unwrap();
        assert!(m.skewness.unwrap().abs() < 0.15);
        assert!(m.kurtosis.unwrap().abs() < 0.3);
    }

    #[test]
    fn histogram_examples() {
        let h = histogram(&[0.0, 0.5, 1.0, 1.0], 2).unwrap();
        assert_eq!(h[0], Bin { left: 0.0, right: 0.5, count: 1 });
        assert_eq!(h[1], Bin { left: 0.5, right: 1.0, count: 3 });
        let h = histogram(&[3.0, 3.0], 4).unwrap();
        assert_eq!(h.iter().map(|b| b.count).sum::<u64>(), 2);
        assert_eq!((h[0].left, h[3].right), (2.5, 3.5));
        assert!(histogram(&[1.0], 0).is_err());
    }

    #[test]
    fn normal_cdf_values() {
        assert!((normal_cdf(0.0) - 0.5).abs() < 1e-15);
        assert!((normal_cdf(1.959_963_984_540_054) - 0.975).abs() < 1e-14);
        assert!((normal_cdf(-3.0) - 0.001_349_898_031_630_095).abs() < 1e-15);
    }

    #[test]
    fn gof_report_directions() {
        let r = GofReport::new(GofTest::KsExactCdf, 0.01, 0.02, 100, "x");
        assert!(r.pass);
        let r = GofReport::rejecting(GofTest::KsNormalFitted, 0.01, 0.02, 100, "x");
        assert!(!r.pass);
        let json = serde_json::to_string(&r).unwrap();
        assert!(json.contains("\"ks-normal-fitted\""));
    }
}
