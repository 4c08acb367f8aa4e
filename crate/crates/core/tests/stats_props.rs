use bosefluct::stats::{empirical_char_fn, histogram, ks_statistic, moments, normal_cdf};
use proptest::prelude::*;

fn samples() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1e3f64..1e3, 2..200)
}

proptest! {
    #[test]
    fn moments_are_shift_invariant(xs in samples(), shift in -1e3f64..1e3) {
        let a = moments(&xs).unwrap();
        let moved: Vec<f64> = xs.iter().map(|x| x + shift).collect();
        let b = moments(&moved).unwrap();
        let scale = 1.0 + a.variance;
        prop_assert!((b.mean - a.mean - shift).abs() < 1e-9 * (1.0 + shift.abs() + a.mean.abs()));
        prop_assert!((a.variance - b.variance).abs() < 1e-8 * scale);
        if let (Some(s), Some(t)) = (a.skewness, b.skewness) {
            if a.variance > 1e-6 {
                prop_assert!((s - t).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn histogram_counts_every_sample(xs in samples(), bins in 1usize..60) {
        let h = histogram(&xs, bins).unwrap();
        prop_assert_eq!(h.len(), bins);
        prop_assert_eq!(h.iter().map(|b| b.count).sum::<u64>(), xs.len() as u64);
        for pair in h.windows(2) {
            prop_assert_eq!(pair[0].right, pair[1].left);
        }
        for &x in &xs {
            prop_assert!(h[0].left <= x && x <= h[bins - 1].right);
        }
    }

    /// KS distance is unchanged when samples and reference are pushed through
    /// the same increasing map.
    #[test]
    fn ks_is_invariant_under_monotone_maps(xs in prop::collection::vec(-5f64..5.0, 1..200)) {
        let d = ks_statistic(&xs, normal_cdf).unwrap();
        let ys: Vec<f64> = xs.iter().map(|x| x.exp()).collect();
        let e = ks_statistic(&ys, |y| if y <= 0.0 { 0.0 } else { normal_cdf(y.ln()) }).unwrap();
        prop_assert!((d - e).abs() < 1e-9, "{} vs {}", d, e);
        prop_assert!((0.0..=1.0).contains(&d));
    }

    #[test]
    fn ks_is_order_independent(mut xs in samples()) {
        let cdf = |x: f64| normal_cdf(x / 300.0);
        let d = ks_statistic(&xs, cdf).unwrap();
        xs.reverse();
        prop_assert_eq!(d, ks_statistic(&xs, cdf).unwrap());
    }

    #[test]
    fn char_fn_is_bounded_and_conjugate(xs in samples(), xi in -10f64..10.0) {
        let a = empirical_char_fn(&xs, xi).unwrap();
        let b = empirical_char_fn(&xs, -xi).unwrap();
        prop_assert!(a.norm() <= 1.0 + 1e-12);
        prop_assert!((a - b.conj()).norm() < 1e-12);
    }
}

#[test]
fn ks_against_brute_force_supremum() {
    let xs = [0.1, -0.4, 0.1, 2.0, -1.3, 0.7];
    let d = ks_statistic(&xs, normal_cdf).unwrap();
    let mut sorted = xs.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let mut brute: f64 = 0.0;
    for k in -4000..=4000 {
        let x = k as f64 / 1000.0;
        let f = sorted.iter().filter(|&&v| v <= x).count() as f64 / n;
        brute = brute.max((f - normal_cdf(x)).abs());
    }
    assert!(d >= brute - 1e-12);
    assert!(d - brute < 2e-3, "{d} vs {brute}");
}
