//! Closed-form predictions for the trapped ideal Bose gas in the canonical
//! ensemble: critical temperature, condensate fraction, fluctuation limit
//! laws, moment series of the excited occupation, and the tail behaviour of
//! the non-normal limit variable `W`.

mod laws;
mod series;
mod special;
mod tail;
mod wlaw;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::spectrum::SpectrumError;

pub use laws::{
    condensate_fraction, critical_t, energy_lln_constant, gumbel_sf, limit_law, FluctuationScale,
    FractionPrediction, Law, LimitLaw, Regime,
};
pub use series::{mean_m, mean_r, var_m, var_r};
pub use special::{euler_gamma, gamma_fn, zeta_fn, EULER_GAMMA};
pub use tail::WeylTail;
pub use wlaw::{
    chernoff_left_tail, harmonic_prefix, inverse_square_tail, neg_w_mgf, tail_lower_bound,
    tail_upper_bound, u_char_fn, w_normalization, CharFnValue, MgfValue, TailBound,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnalyticError {
    #[error("argument out of domain: {0}")]
    Domain(String),
    #[error("spectrum too short: {reason}; extend the cutoff to at least {required_cutoff}")]
    ExtendSpectrum { required_cutoff: f64, reason: String },
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error(transparent)]
    Spectrum(#[from] SpectrumError),
}

/// Particle number, reduced temperature and the temperature they imply.
///
/// `T = t n^{1/α}` for `α > 1` and `T = t n / log n` for `α = 1`, with `k_B = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThermalConfig {
    pub n: u64,
    pub t: f64,
    pub alpha: f64,
    pub temperature: f64,
    pub beta: f64,
}

impl ThermalConfig {
    pub fn new(n: u64, t: f64, alpha: f64) -> Result<Self, AnalyticError> {
        if n == 0 {
            return Err(AnalyticError::Domain("particle number must be positive".into()));
        }
        if !(t > 0.0 && t.is_finite()) {
            return Err(AnalyticError::Domain(format!("t must be positive, got {t}")));
        }
        if !(alpha >= 1.0 && alpha.is_finite()) {
            return Err(AnalyticError::Domain(format!("alpha must be >= 1, got {alpha}")));
        }
        let nf = n as f64;
        let temperature = if alpha > 1.0 {
            t * nf.powf(1.0 / alpha)
        } else {
            if n < 3 {
                return Err(AnalyticError::Domain("alpha = 1 needs n >= 3 (T = t n / log n)".into()));
            }
            t * nf / nf.ln()
        };
        Ok(ThermalConfig {
            n,
            t,
            alpha,
            temperature,
            beta: 1.0 / temperature,
        })
    }

    /// Config at `t = ratio · t_c` for the given Weyl constants.
    pub fn at_ratio(
        n: u64,
        t_over_tc: f64,
        weyl: crate::spectrum::WeylParams,
    ) -> Result<Self, AnalyticError> {
        Self::new(n, t_over_tc * critical_t(weyl), weyl.alpha)
    }
}
