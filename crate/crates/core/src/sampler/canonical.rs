use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{LevelDraw, RngStream, SamplerError, DEFAULT_EPSILON};
use crate::analytic::{AnalyticError, ThermalConfig, WeylTail};
use crate::spectrum::EnergySpectrum;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SampleMeta {
    /// Attempts used, the accepted one included.
    pub acceptance_tries: u64,
    /// Certified bound on the expected number of particles in omitted levels.
    pub truncation_epsilon: f64,
}

/// One canonical configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OccupationSample {
    pub n: u64,
    /// Level index → particles in that level, summed over its states. Only
    /// occupied levels appear; the ground level is always present.
    pub occupations: BTreeMap<usize, u64>,
    /// Per-state counts for the first excited level, when it is sampled
    /// state by state.
    pub first_level_states: Option<Vec<u64>>,
    /// `Σ_j N_j E_j` with the ground energy at zero.
    pub energy: f64,
    pub meta: SampleMeta,
}

impl OccupationSample {
    pub fn ground(&self) -> u64 {
        self.occupations.get(&0).copied().unwrap_or(0)
    }

    pub fn excited(&self) -> u64 {
        self.n - self.ground()
    }

    pub fn level(&self, index: usize) -> u64 {
        self.occupations.get(&index).copied().unwrap_or(0)
    }
}

/// Canonical sampler with the level table precomputed for one `(n, β)`.
#[derive(Debug, Clone)]
pub struct CanonicalSampler {
    n: u64,
    beta: f64,
    energies: Vec<f64>,
    draws: Vec<LevelDraw>,
    epsilon: f64,
    max_tries: u64,
}

impl CanonicalSampler {
    /// Keeps the shortest prefix of excited levels whose omitted expected
    /// occupancy (generated remainder plus the Weyl tail bound) is at most
    /// `epsilon`.
    pub fn new(
        spectrum: &EnergySpectrum,
        n: u64,
        beta: f64,
        epsilon: f64,
        max_tries: u64,
    ) -> Result<Self, SamplerError> {
        if !(beta > 0.0 && beta.is_finite()) {
            return Err(SamplerError::Domain(format!("beta must be positive, got {beta}")));
        }
        if !(epsilon > 0.0) {
            return Err(SamplerError::Domain(format!("epsilon must be positive, got {epsilon}")));
        }
        if max_tries == 0 {
            return Err(SamplerError::Domain("max_tries must be at least 1".into()));
        }
        let (keep, omitted) = truncate(spectrum, beta, 0.0, epsilon)?;
        let levels = &spectrum.levels()[1..=keep];
        Ok(CanonicalSampler {
            n,
            beta,
            energies: levels.iter().map(|l| l.energy).collect(),
            draws: levels
                .iter()
                .map(|l| LevelDraw::new(beta * l.energy, l.multiplicity))
                .collect(),
            epsilon: omitted,
            max_tries,
        })
    }

    pub fn from_config(
        spectrum: &EnergySpectrum,
        config: &ThermalConfig,
        epsilon: f64,
        max_tries: u64,
    ) -> Result<Self, SamplerError> {
        Self::new(spectrum, config.n, config.beta, epsilon, max_tries)
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Excited levels kept.
    pub fn retained_levels(&self) -> usize {
        self.draws.len()
    }

    pub fn truncation_epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn sample(&self, rng: &mut RngStream) -> Result<OccupationSample, SamplerError> {
        let mut counts = vec![0u64; self.draws.len()];
        let mut states = Vec::new();
        for tries in 1..=self.max_tries {
            let mut m = 0u64;
            let mut rejected = false;
            let mut first_states = None;
            for (i, draw) in self.draws.iter().enumerate() {
                let z = if i == 0 {
                    match draw.sample_states(rng, &mut states) {
                        Some(z) => {
                            first_states = Some(states.clone());
                            z
                        }
                        None => draw.sample(rng),
                    }
                } else {
                    draw.sample(rng)
                };
                counts[i] = z;
                m = m.saturating_add(z);
                if m > self.n {
                    rejected = true;
                    break;
                }
            }
            if rejected {
                continue;
            }
            let mut occupations = BTreeMap::new();
            occupations.insert(0, self.n - m);
            let mut energy = 0.0;
            for (i, &c) in counts.iter().enumerate() {
                if c > 0 {
                    occupations.insert(i + 1, c);
                    energy += c as f64 * self.energies[i];
                }
            }
            return Ok(OccupationSample {
                n: self.n,
                occupations,
                first_level_states: first_states,
                energy,
                meta: SampleMeta {
                    acceptance_tries: tries,
                    truncation_epsilon: self.epsilon,
                },
            });
        }
        Err(SamplerError::Rejection {
            tries: self.max_tries,
            acceptance: 0.0,
        })
    }
}

/// Canonical draw with the default truncation `ε = 1e-3`.
pub fn sample_canonical(
    config: &ThermalConfig,
    spectrum: &EnergySpectrum,
    rng: &mut RngStream,
    max_tries: u64,
) -> Result<OccupationSample, SamplerError> {
    CanonicalSampler::from_config(spectrum, config, DEFAULT_EPSILON, max_tries)?.sample(rng)
}

/// Number of excited levels to keep and the certified omitted occupancy,
/// for occupations `1/(e^{β(E-μ)} - 1)` with `μ ≤ 0`.
pub(crate) fn truncate(
    spectrum: &EnergySpectrum,
    beta: f64,
    mu: f64,
    epsilon: f64,
) -> Result<(usize, f64), SamplerError> {
    // With μ ≤ 0 the occupations are dominated by the μ = 0 ones, so the
    // Weyl tail bound at μ = 0 still applies.
    let tail = match WeylTail::of(spectrum) {
        Some(t) => {
            let bound = t.thermal(beta, 0, 1);
            if bound > epsilon {
                return Err(AnalyticError::ExtendSpectrum {
                    required_cutoff: t.required_cutoff(epsilon, |w| w.thermal(beta, 0, 1)),
                    reason: format!(
                        "omitted occupancy bound {bound:e} exceeds epsilon {epsilon:e}"
                    ),
                }
                .into());
            }
            bound
        }
        None => 0.0,
    };
    let levels = spectrum.levels();
    let mut omitted = tail;
    let mut keep = levels.len() - 1;
    while keep > 0 {
        let l = &levels[keep];
        let occ = l.multiplicity as f64 / (beta * (l.energy - mu)).exp_m1();
        if omitted + occ > epsilon {
            break;
        }
        omitted += occ;
        keep -= 1;
    }
    Ok((keep, omitted))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectrum::{build_spectrum, load_spectrum, TrapKind};

    #[test]
    fn three_level_ground_probability() {
        // Configurations (n1, n2) with n1 + n2 ≤ 3, weights e^{-(n1 + 2 n2)}.
        let weights: Vec<(u64, f64)> = (0..=3u64)
            .flat_map(|a| (0..=3 - a).map(move |b| (3 - a - b, (-((a + 2 * b) as f64)).exp())))
            .collect();
        let z: f64 = weights.iter().map(|w| w.1).sum();
        let p3 = weights.iter().filter(|w| w.0 == 3).map(|w| w.1).sum::<f64>() / z;
        assert!((p3 - 0.5605).abs() < 1e-4);

        let s = load_spectrum("0 1\n1 1\n2 1\n".as_bytes()).unwrap();
        let sampler = CanonicalSampler::new(&s, 3, 1.0, 1e-3, 1000).unwrap();
        let mut rng = RngStream::new(3, 0);
        let draws = 100_000;
        let mut hits = 0;
        for _ in 0..draws {
            let x = sampler.sample(&mut rng).unwrap();
            assert_eq!(x.occupations.values().sum::<u64>(), 3);
            hits += usize::from(x.ground() == 3);
        }
        let p = hits as f64 / draws as f64;
        assert!((p - p3).abs() < 0.005, "{p} vs {p3}");
    }

    #[test]
    fn cold_gas_is_fully_condensed() {
        let s = build_spectrum(TrapKind::Harmonic3d, 1.0, 10.0).unwrap();
        let sampler = CanonicalSampler::new(&s, 50, 100.0, 1e-3, 10).unwrap();
        let mut rng = RngStream::new(0, 0);
        for _ in 0..1000 {
            let x = sampler.sample(&mut rng).unwrap();
            assert_eq!(x.ground(), 50);
            assert_eq!(x.meta.acceptance_tries, 1);
            assert_eq!(x.energy, 0.0);
        }
    }

    #[test]
    fn truncation_is_certified() {
        let s = build_spectrum(TrapKind::Harmonic3d, 1.0, 600.0).unwrap();
        let beta = 0.05;
        let sampler = CanonicalSampler::new(&s, 10_000, beta, 1e-3, 10).unwrap();
        let dropped: f64 = s.levels()[sampler.retained_levels() + 1..]
            .iter()
            .map(|l| l.multiplicity as f64 / (beta * l.energy).exp_m1())
            .sum();
        assert!(dropped <= sampler.truncation_epsilon());
        assert!(sampler.truncation_epsilon() <= 1e-3);
        assert!(sampler.retained_levels() < s.levels().len() - 1);
    }

    #[test]
    fn short_spectrum_and_hot_gas_fail_loudly() {
        let s = build_spectrum(TrapKind::Harmonic3d, 1.0, 20.0).unwrap();
        let e = CanonicalSampler::new(&s, 1000, 0.05, 1e-3, 10).unwrap_err();
        assert!(e.required_cutoff().unwrap() > 20.0);

        // Far above t_c: M ≤ n is essentially never met.
        let s = build_spectrum(TrapKind::Harmonic3d, 1.0, 800.0).unwrap();
        let sampler = CanonicalSampler::new(&s, 10, 0.05, 1e-3, 20).unwrap();
        let e = sampler.sample(&mut RngStream::new(1, 1)).unwrap_err();
        assert!(matches!(e, SamplerError::Rejection { tries: 20, .. }));
    }

    #[test]
    fn first_level_states_add_up() {
        let s = build_spectrum(TrapKind::Harmonic3d, 1.0, 400.0).unwrap();
        let sampler = CanonicalSampler::new(&s, 5000, 0.08, 1e-3, 100).unwrap();
        let mut rng = RngStream::new(8, 0);
        for _ in 0..50 {
            let x = sampler.sample(&mut rng).unwrap();
            let states = x.first_level_states.clone().unwrap();
            assert_eq!(states.len(), 3);
            assert_eq!(states.iter().sum::<u64>(), x.level(1));
        }
    }
}
