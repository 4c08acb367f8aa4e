//! Exact Monte Carlo for the trapped gas: canonical occupations by rejection
//! from independent geometrics, grand-canonical occupations, and the limit
//! variable `W`.

mod canonical;
mod grand;
mod wsample;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma, Open01, Poisson};
use rayon::prelude::*;
use thiserror::Error;

use crate::analytic::AnalyticError;
use crate::spectrum::{EnergySpectrum, SpectrumError};

pub use canonical::{sample_canonical, CanonicalSampler, OccupationSample, SampleMeta};
pub use grand::{
    expected_count, sample_grand_canonical, solve_chemical_potential, GrandCanonicalSample,
    GrandCanonicalSampler,
};
pub use wsample::{sample_w, WMeta, WSampler};

/// Default bound on the expected number of particles in omitted levels.
pub const DEFAULT_EPSILON: f64 = 1e-3;

/// Levels with at most this many states are drawn one geometric per state.
pub const EXPLICIT_MULTIPLICITY: u64 = 8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SamplerError {
    #[error("invalid argument: {0}")]
    Domain(String),
    #[error(
        "no draw with M <= n in {tries} tries (acceptance estimate {acceptance:.3e}); \
         t is probably at or above t_c, or n is too small"
    )]
    Rejection { tries: u64, acceptance: f64 },
    #[error(transparent)]
    Analytic(#[from] AnalyticError),
    #[error(transparent)]
    Spectrum(#[from] SpectrumError),
    #[error("replica {index}: {source}")]
    Replica {
        index: usize,
        source: Box<SamplerError>,
    },
}

impl SamplerError {
    /// Cutoff requested by an extend-spectrum error, looking through replica wrappers.
    pub fn required_cutoff(&self) -> Option<f64> {
        match self {
            SamplerError::Analytic(AnalyticError::ExtendSpectrum { required_cutoff, .. }) => {
                Some(*required_cutoff)
            }
            SamplerError::Replica { source, .. } => source.required_cutoff(),
            _ => None,
        }
    }
}

/// Calls `f`, regenerating `spectrum` at the requested cutoff whenever `f`
/// reports that the generated levels do not reach far enough.
pub fn auto_extend<T>(
    spectrum: &mut EnergySpectrum,
    mut f: impl FnMut(&EnergySpectrum) -> Result<T, SamplerError>,
) -> Result<T, SamplerError> {
    loop {
        match f(spectrum) {
            Err(e) => match e.required_cutoff() {
                Some(c) if c.is_finite() && c > spectrum.cutoff() => {
                    *spectrum = spectrum.extended(c)?;
                }
                _ => return Err(e),
            },
            ok => return ok,
        }
    }
}

/// Reproducible random stream: ChaCha8 keyed by `seed`, on stream `stream_id`.
///
/// Distinct stream ids under one seed never overlap.
#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    stream_id: u64,
    rng: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream_id);
        RngStream {
            seed,
            stream_id,
            rng,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.rng.fill_bytes(dst)
    }
}

/// Geometric draw by inverse transform, `floor(log U / log q)` with `U` in (0, 1).
#[inline]
fn geometric_ln(ln_q: f64, rng: &mut impl Rng) -> u64 {
    let u: f64 = rng.sample(Open01);
    // `as` saturates, so q → 1 cannot overflow.
    (u.ln() / ln_q).floor() as u64
}

/// One draw with `P(k) = e^{-βEk}(1 - e^{-βE})`.
pub fn sample_geometric(beta: f64, energy: f64, rng: &mut impl Rng) -> Result<u64, SamplerError> {
    let x = beta * energy;
    if energy == 0.0 {
        return Err(SamplerError::Domain(
            "zero energy: only excited levels are sampled geometrically".into(),
        ));
    }
    if !(x > 0.0 && x.is_finite()) {
        return Err(SamplerError::Domain(format!("beta * energy must be positive, got {x}")));
    }
    Ok(geometric_ln(-x, rng))
}

/// Sum of `m` independent geometrics with ratio `q = e^{-x}`, as one
/// precomputed sampler.
#[derive(Debug, Clone)]
pub(crate) enum LevelDraw {
    Zero,
    Explicit { ln_q: f64, m: u64 },
    /// Negative binomial as a Poisson with Gamma(m, q/(1-q)) mean.
    Mixture(Gamma<f64>),
}

impl LevelDraw {
    pub(crate) fn new(x: f64, m: u64) -> Self {
        let q = (-x).exp();
        if q == 0.0 || m == 0 {
            return LevelDraw::Zero;
        }
        if m <= EXPLICIT_MULTIPLICITY {
            return LevelDraw::Explicit { ln_q: -x, m };
        }
        match Gamma::new(m as f64, 1.0 / x.exp_m1()) {
            Ok(g) => LevelDraw::Mixture(g),
            Err(_) => LevelDraw::Explicit { ln_q: -x, m },
        }
    }

    #[inline]
    pub(crate) fn sample(&self, rng: &mut impl Rng) -> u64 {
        match *self {
            LevelDraw::Zero => 0,
            LevelDraw::Explicit { ln_q, m } => (0..m).map(|_| geometric_ln(ln_q, rng)).sum(),
            LevelDraw::Mixture(ref g) => {
                let lambda = g.sample(rng);
                match Poisson::new(lambda) {
                    Ok(p) => p.sample(rng) as u64,
                    Err(_) if lambda.is_finite() && lambda > Poisson::<f64>::MAX_LAMBDA => {
                        lambda.round() as u64
                    }
                    Err(_) => 0,
                }
            }
        }
    }

    /// Per-state draws, when the level is sampled one state at a time.
    #[inline]
    pub(crate) fn sample_states(&self, rng: &mut impl Rng, out: &mut Vec<u64>) -> Option<u64> {
        match *self {
            LevelDraw::Explicit { ln_q, m } => {
                out.clear();
                out.extend((0..m).map(|_| geometric_ln(ln_q, rng)));
                Some(out.iter().sum())
            }
            _ => None,
        }
    }
}

/// Runs `task` for replicas `0..count`, replica `i` on stream
/// `RngStream::new(base_seed, base_seed + i)`, and returns results in
/// replica order whatever the scheduling.
///
/// The first failing replica (by index) is reported.
pub fn replicate<T, F>(count: usize, base_seed: u64, task: F) -> Result<Vec<T>, SamplerError>
where
    T: Send,
    F: Fn(usize, &mut RngStream) -> Result<T, SamplerError> + Sync,
{
    if count == 0 {
        return Err(SamplerError::Domain("replica count must be at least 1".into()));
    }
    let results: Vec<Result<T, SamplerError>> = (0..count)
        .into_par_iter()
        .map(|i| {
            let mut rng = RngStream::new(base_seed, base_seed.wrapping_add(i as u64));
            task(i, &mut rng)
        })
        .collect();
    results
        .into_iter()
        .enumerate()
        .map(|(index, r)| {
            r.map_err(|e| SamplerError::Replica {
                index,
                source: Box::new(e),
            })
        })
        .collect()
}
