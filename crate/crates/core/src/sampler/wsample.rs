//! Samples of `W = c Σ_{j≥1} (1 - X_j)/E_j`.
//!
//! States past an index `J` are dropped. Among the kept states, runs of
//! consecutive levels may share one coefficient: a run `B` with `|B|` states
//! contributes `c_B (|B| - G_B)` where `c_B` is the mean of `1/E_j` over the run
//! and `G_B ~ Gamma(|B|, 1)` is exactly the sum of its exponentials. The mean
//! square error of a run against the exact sum is `Σ_B 1/E_j² - (Σ_B 1/E_j)²/|B|`,
//! zero for a single level, and the runs are chosen so that these errors plus
//! the dropped `Σ_{j>J} 1/E_j²` stay below `δ²`.

use rand::Rng;
use rand_distr::{Distribution, Exp1, Gamma};
use serde::{Deserialize, Serialize};

use super::{RngStream, SamplerError, EXPLICIT_MULTIPLICITY};
use crate::analytic::{w_normalization, AnalyticError, WeylTail};
use crate::spectrum::{EnergySpectrum, WeylParams};

/// Share of `δ²` reserved for the dropped states.
const TAIL_SHARE: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WMeta {
    pub delta: f64,
    /// Kept states `J` (ground excluded).
    pub states: u64,
    /// Kept excited levels.
    pub levels: usize,
    /// Runs after merging levels.
    pub blocks: usize,
    /// Certified bound on `(E|S - S_exact|²)^{1/2}` for the unnormalized sum.
    pub l2_error: f64,
    /// Part of `l2_error²` due to the dropped states, square-rooted.
    pub tail_l2: f64,
    pub normalization: f64,
}

#[derive(Debug, Clone)]
struct Block {
    coef: f64,
    count: u64,
    gamma: Option<Gamma<f64>>,
}

#[derive(Debug, Clone)]
pub struct WSampler {
    blocks: Vec<Block>,
    meta: WMeta,
}

impl WSampler {
    /// Sampler whose unnormalized sum is within `delta` of the exact one in
    /// mean square.
    pub fn new(
        spectrum: &EnergySpectrum,
        weyl: WeylParams,
        delta: f64,
    ) -> Result<Self, SamplerError> {
        Self::build(spectrum, weyl, delta, TAIL_SHARE, true)
    }

    /// One exponential per kept state and no merging, with the whole `δ²`
    /// spent on the dropped states.
    pub fn plain(
        spectrum: &EnergySpectrum,
        weyl: WeylParams,
        delta: f64,
    ) -> Result<Self, SamplerError> {
        Self::build(spectrum, weyl, delta, 1.0, false)
    }

    fn build(
        spectrum: &EnergySpectrum,
        weyl: WeylParams,
        delta: f64,
        tail_share: f64,
        merge: bool,
    ) -> Result<Self, SamplerError> {
        if !(delta > 0.0 && delta.is_finite()) {
            return Err(SamplerError::Domain(format!("delta must be positive, got {delta}")));
        }
        let normalization = w_normalization(weyl)?;
        let levels = spectrum.levels();
        if levels.len() < 2 {
            return Err(SamplerError::Domain("spectrum has no excited level".into()));
        }
        let budget = delta * delta;
        let tail_budget = tail_share * budget;
        let weyl_tail = match WeylTail::of(spectrum) {
            Some(t) => {
                let r = t.inverse_power(2.0);
                if !(r <= tail_budget) {
                    return Err(AnalyticError::ExtendSpectrum {
                        required_cutoff: t.required_cutoff(tail_budget, |w| w.inverse_power(2.0)),
                        reason: format!(
                            "omitted Σ 1/E² bound {r:e} exceeds {tail_budget:e} (delta {delta})"
                        ),
                    }
                    .into());
                }
                r
            }
            None => 0.0,
        };

        let mut tail = weyl_tail;
        let mut keep = levels.len() - 1;
        while keep > 1 {
            let l = &levels[keep];
            let t = l.multiplicity as f64 / (l.energy * l.energy);
            if tail + t > tail_budget {
                break;
            }
            tail += t;
            keep -= 1;
        }
        let kept = &levels[1..=keep];

        let total_s2: f64 = kept
            .iter()
            .map(|l| l.multiplicity as f64 / (l.energy * l.energy))
            .sum();
        let eta = if merge { (budget - tail).max(0.0) / total_s2 } else { 0.0 };

        let mut runs: Vec<(u64, f64, f64)> = Vec::new();
        let mut block_err = 0.0;
        let mut cur: Option<(u64, f64, f64)> = None;
        for l in kept {
            let (m, inv) = (l.multiplicity, 1.0 / l.energy);
            let add = (m, m as f64 * inv, m as f64 * inv * inv);
            cur = Some(match cur {
                None => add,
                Some((s0, s1, s2)) => {
                    let (t0, t1, t2) = (s0 + add.0, s1 + add.1, s2 + add.2);
                    let err = (t2 - t1 * t1 / t0 as f64).max(0.0);
                    if eta > 0.0 && err <= eta * t2 {
                        (t0, t1, t2)
                    } else {
                        block_err += (s2 - s1 * s1 / s0 as f64).max(0.0);
                        runs.push((s0, s1, s2));
                        add
                    }
                }
            });
        }
        if let Some((s0, s1, s2)) = cur {
            block_err += (s2 - s1 * s1 / s0 as f64).max(0.0);
            runs.push((s0, s1, s2));
        }

        let blocks = runs
            .iter()
            .map(|&(s0, s1, _)| Block {
                coef: s1 / s0 as f64,
                count: s0,
                gamma: (s0 > EXPLICIT_MULTIPLICITY)
                    .then(|| Gamma::new(s0 as f64, 1.0).expect("positive shape")),
            })
            .collect::<Vec<_>>();
        let meta = WMeta {
            delta,
            states: spectrum.cumulative_count(keep) - 1,
            levels: keep,
            blocks: blocks.len(),
            l2_error: (tail + block_err).sqrt(),
            tail_l2: tail.sqrt(),
            normalization,
        };
        Ok(WSampler { blocks, meta })
    }

    pub fn meta(&self) -> &WMeta {
        &self.meta
    }

    pub fn sample(&self, rng: &mut RngStream) -> f64 {
        let mut acc = 0.0;
        for b in &self.blocks {
            let g = match &b.gamma {
                Some(gamma) => gamma.sample(rng),
                None => (0..b.count).map(|_| rng.sample::<f64, _>(Exp1)).sum(),
            };
            acc += b.coef * (b.count as f64 - g);
        }
        self.meta.normalization * acc
    }
}

/// One draw of `W` with mean-square error at most `delta` before normalization.
pub fn sample_w(
    spectrum: &EnergySpectrum,
    weyl: WeylParams,
    delta: f64,
    rng: &mut RngStream,
) -> Result<f64, SamplerError> {
    Ok(WSampler::new(spectrum, weyl, delta)?.sample(rng))
}
