use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::canonical::truncate;
use super::{geometric_ln, LevelDraw, RngStream, SamplerError, DEFAULT_EPSILON};
use crate::spectrum::EnergySpectrum;

/// `Σ_j m_j / (e^{β(E_j - μ)} - 1)` over every generated level, ground included.
pub fn expected_count(spectrum: &EnergySpectrum, beta: f64, mu: f64) -> f64 {
    spectrum
        .levels()
        .iter()
        .rev()
        .map(|l| l.multiplicity as f64 / (beta * (l.energy - mu)).exp_m1())
        .sum()
}

/// Chemical potential `μ < 0` at which the expected particle number is `n`.
///
/// Bisects on `log x` with `x = -βμ`. At `x = log(1 + 1/n)` the ground level
/// alone holds `n` particles; at `x = log(1 + S/n)`, with `S` the number of
/// generated states, all states together hold at most `n`.
pub fn solve_chemical_potential(
    spectrum: &EnergySpectrum,
    temperature: f64,
    n: u64,
) -> Result<f64, SamplerError> {
    if !(temperature > 0.0 && temperature.is_finite()) {
        return Err(SamplerError::Domain(format!(
            "temperature must be positive, got {temperature}"
        )));
    }
    if n == 0 {
        return Err(SamplerError::Domain("particle number must be positive".into()));
    }
    let beta = 1.0 / temperature;
    truncate(spectrum, beta, 0.0, DEFAULT_EPSILON)?;
    let nf = n as f64;
    let count = |ln_x: f64| expected_count(spectrum, beta, -ln_x.exp() / beta);
    let mut lo = (1.0 / nf).ln_1p().ln();
    let mut hi = (spectrum.num_states() as f64 / nf).ln_1p().ln();
    for _ in 0..400 {
        let mid = 0.5 * (lo + hi);
        let c = count(mid);
        if (c - nf).abs() <= 1e-12 * nf || hi - lo < 1e-15 {
            lo = mid;
            hi = mid;
            break;
        }
        if c > nf {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(-(0.5 * (lo + hi)).exp() * temperature)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrandCanonicalSample {
    /// Level index → particles, occupied levels only (ground always present).
    pub occupations: BTreeMap<usize, u64>,
    pub total: u64,
    pub truncation_epsilon: f64,
}

impl GrandCanonicalSample {
    pub fn ground(&self) -> u64 {
        self.occupations.get(&0).copied().unwrap_or(0)
    }
}

/// Independent geometric occupations with ratio `e^{-β(E_j - μ)}` on every
/// level, ground included.
#[derive(Debug, Clone)]
pub struct GrandCanonicalSampler {
    ground_ln_q: f64,
    draws: Vec<LevelDraw>,
    epsilon: f64,
}

impl GrandCanonicalSampler {
    pub fn new(
        spectrum: &EnergySpectrum,
        temperature: f64,
        mu: f64,
        epsilon: f64,
    ) -> Result<Self, SamplerError> {
        if !(mu < 0.0) {
            return Err(SamplerError::Domain(format!(
                "chemical potential must be below the ground energy 0, got {mu}"
            )));
        }
        if !(temperature > 0.0 && temperature.is_finite()) {
            return Err(SamplerError::Domain(format!(
                "temperature must be positive, got {temperature}"
            )));
        }
        let beta = 1.0 / temperature;
        let (keep, omitted) = truncate(spectrum, beta, mu, epsilon)?;
        Ok(GrandCanonicalSampler {
            ground_ln_q: beta * mu,
            draws: spectrum.levels()[1..=keep]
                .iter()
                .map(|l| LevelDraw::new(beta * (l.energy - mu), l.multiplicity))
                .collect(),
            epsilon: omitted,
        })
    }

    pub fn sample(&self, rng: &mut RngStream) -> GrandCanonicalSample {
        let mut occupations = BTreeMap::new();
        let n0 = if self.ground_ln_q == f64::NEG_INFINITY {
            0
        } else {
            geometric_ln(self.ground_ln_q, rng)
        };
        occupations.insert(0, n0);
        let mut total = n0;
        for (i, d) in self.draws.iter().enumerate() {
            let z = d.sample(rng);
            if z > 0 {
                occupations.insert(i + 1, z);
                total = total.saturating_add(z);
            }
        }
        GrandCanonicalSample {
            occupations,
            total,
            truncation_epsilon: self.epsilon,
        }
    }
}

/// One grand-canonical draw with the default truncation.
pub fn sample_grand_canonical(
    spectrum: &EnergySpectrum,
    temperature: f64,
    mu: f64,
    rng: &mut RngStream,
) -> Result<GrandCanonicalSample, SamplerError> {
    Ok(GrandCanonicalSampler::new(spectrum, temperature, mu, DEFAULT_EPSILON)?.sample(rng))
}
