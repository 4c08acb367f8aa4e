//! Bounds on the part of a spectrum that lies past the generated cutoff.
//!
//! Beyond the last generated state `J` the levels are assumed to obey
//! `E_j ≥ K j^{1/α}`, with `K` the smallest `E / S(E)^{1/α}` over the upper
//! half of the generated range. Omitted sums are then bounded by integrals.

use crate::spectrum::{EnergySpectrum, Tail};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeylTail {
    pub k: f64,
    pub alpha: f64,
    /// Number of generated states `J`.
    pub states: f64,
    pub cutoff: f64,
}

impl WeylTail {
    /// `None` when the spectrum is complete (nothing is omitted).
    pub fn of(spectrum: &EnergySpectrum) -> Option<Self> {
        let Tail::Weyl(weyl) = spectrum.tail() else {
            return None;
        };
        let alpha = weyl.alpha;
        let cutoff = spectrum.cutoff();
        let levels = spectrum.levels();
        let ratio = |i: usize| levels[i].energy / (spectrum.cumulative_count(i) as f64).powf(1.0 / alpha);
        let upper = (1..levels.len())
            .filter(|&i| levels[i].energy >= cutoff / 2.0)
            .map(ratio)
            .fold(f64::INFINITY, f64::min);
        let k = if upper.is_finite() {
            upper
        } else {
            (1..levels.len()).map(ratio).fold(f64::INFINITY, f64::min)
        };
        let k = if k.is_finite() && k > 0.0 { k } else { 0.0 };
        Some(WeylTail {
            k,
            alpha,
            states: spectrum.num_states() as f64,
            cutoff,
        })
    }

    /// Same `K`, with the generated range grown to `cutoff` along the
    /// current `J ∝ Λ^α` trend.
    pub fn scaled_to(&self, cutoff: f64) -> Self {
        let factor = (cutoff / self.cutoff).powf(self.alpha);
        WeylTail {
            states: self.states * factor,
            cutoff,
            ..*self
        }
    }

    /// Bound on `Σ_{j>J} E_j^p e^{-βE_j} / (1 - e^{-βE_j})^d`.
    ///
    /// Infinite when the cutoff is too low for the integral bound to apply.
    pub fn thermal(&self, beta: f64, p: u32, d: u32) -> f64 {
        if self.k <= 0.0 || self.states <= 0.0 {
            return f64::INFINITY;
        }
        let alpha = self.alpha;
        let a = alpha + p as f64;
        let x0 = beta * self.k * self.states.powf(1.0 / alpha);
        // E^p e^{-βE} must be decreasing past K J^{1/α}, and the incomplete
        // gamma bound x^{a-1} e^{-x} / (1 - (a-1)/x) needs x > a - 1.
        if x0 < p as f64 || x0 <= 2.0 * (a - 1.0) {
            return f64::INFINITY;
        }
        let mut log_gamma_tail = (a - 1.0) * x0.ln() - x0;
        if a > 1.0 {
            log_gamma_tail -= (1.0 - (a - 1.0) / x0).ln();
        }
        let log_prefactor = alpha.ln() - alpha * self.k.ln() - a * beta.ln();
        let denom = -(-(-beta * self.cutoff).exp_m1()).ln() * d as f64;
        (log_prefactor + log_gamma_tail + denom).exp()
    }

    /// Bound on `Σ_{j>J} E_j^{-r}`; finite only for `r > α`.
    pub fn inverse_power(&self, r: f64) -> f64 {
        if self.k <= 0.0 || self.states <= 0.0 || r <= self.alpha {
            return f64::INFINITY;
        }
        let e = r / self.alpha - 1.0;
        self.k.powf(-r) * self.states.powf(-e) / e
    }

    /// Smallest cutoff (by doubling) at which `bound` drops to `tol` or below.
    pub fn required_cutoff(&self, tol: f64, bound: impl Fn(&WeylTail) -> f64) -> f64 {
        let mut cutoff = self.cutoff.max(1e-300);
        for _ in 0..200 {
            cutoff *= 2.0;
            if bound(&self.scaled_to(cutoff)) <= tol {
                return cutoff;
            }
        }
        f64::INFINITY
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectrum::{build_spectrum, TrapKind};

    #[test]
    fn harmonic_1d_constant() {
        let s = build_spectrum(TrapKind::Harmonic1d, 1.0, 1000.0).unwrap();
        let t = WeylTail::of(&s).unwrap();
        // E/S(E) = s/(s+1) is smallest at the bottom of the upper half.
        assert!((t.k - 500.0 / 501.0).abs() < 1e-12);
        assert_eq!(t.states, 1001.0);
    }

    #[test]
    fn thermal_bound_dominates_true_tail() {
        // Exact omitted sums for the 1D/3D oscillators compared against the bound.
        for (kind, cutoff) in [(TrapKind::Harmonic1d, 200.0), (TrapKind::Harmonic3d, 300.0)] {
            let s = build_spectrum(kind, 1.0, cutoff).unwrap();
            let far = build_spectrum(kind, 1.0, 4000.0).unwrap();
            let t = WeylTail::of(&s).unwrap();
            for beta in [0.05, 0.1, 0.5] {
                for p in 0..=2u32 {
                    for d in 1..=2u32 {
                        let exact: f64 = far
                            .levels()
                            .iter()
                            .filter(|l| l.energy > cutoff)
                            .map(|l| {
                                let x = beta * l.energy;
                                l.multiplicity as f64 * l.energy.powi(p as i32) * (-x).exp()
                                    / (-(-x).exp_m1()).powi(d as i32)
                            })
                            .sum();
                        let bound = t.thermal(beta, p, d);
                        assert!(bound >= exact, "{kind} β={beta} p={p} d={d}: {bound} < {exact}");
                    }
                }
            }
        }
    }

    #[test]
    fn inverse_square_bound_dominates() {
        let s = build_spectrum(TrapKind::Box3d, 1.0, 400.0).unwrap();
        let far = build_spectrum(TrapKind::Box3d, 1.0, 40_000.0).unwrap();
        let t = WeylTail::of(&s).unwrap();
        let partial: f64 = far
            .levels()
            .iter()
            .filter(|l| l.energy > 400.0)
            .map(|l| l.multiplicity as f64 / (l.energy * l.energy))
            .sum();
        assert!(t.inverse_power(2.0) > partial);
        assert!(t.inverse_power(1.5).is_infinite());
    }

    #[test]
    fn required_cutoff_meets_tolerance() {
        let s = build_spectrum(TrapKind::Harmonic3d, 1.0, 50.0).unwrap();
        let t = WeylTail::of(&s).unwrap();
        let need = t.required_cutoff(1e-6, |w| w.thermal(0.05, 0, 1));
        assert!(need > 50.0 && need.is_finite());
        let grown = WeylTail::of(&s.extended(need).unwrap()).unwrap();
        assert!(grown.thermal(0.05, 0, 1) <= 1e-6);
    }
}
