use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::special::{gamma_fn, zeta_fn, EULER_GAMMA};
use super::AnalyticError;
use crate::spectrum::WeylParams;

/// `L α Γ(α) ζ(α)`, the limit of `β^α E(M)` for `α > 1`.
pub(crate) fn occupation_constant(weyl: WeylParams) -> f64 {
    let a = weyl.alpha;
    weyl.l * a * gamma_fn(a).expect("alpha >= 1") * zeta_fn(a).expect("alpha > 1")
}

/// Reduced critical temperature `t_c` (with `k_B = 1`).
pub fn critical_t(weyl: WeylParams) -> f64 {
    if weyl.alpha > 1.0 {
        occupation_constant(weyl).powf(-1.0 / weyl.alpha)
    } else {
        1.0 / weyl.l
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FractionPrediction {
    pub fraction: f64,
    /// Set when `t ≥ t_c`, where the limit theorem makes no claim and the
    /// value 0 is a convention.
    pub outside_hypothesis: bool,
}

/// Limiting condensate fraction `1 - (t/t_c)^α` below `t_c`, 0 above.
pub fn condensate_fraction(t: f64, weyl: WeylParams) -> FractionPrediction {
    let ratio = t / critical_t(weyl);
    if ratio < 1.0 {
        FractionPrediction {
            fraction: 1.0 - ratio.powf(weyl.alpha),
            outside_hypothesis: false,
        }
    } else {
        FractionPrediction {
            fraction: 0.0,
            outside_hypothesis: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    AlphaEq1,
    AlphaIn1To2,
    AlphaEq2,
    AlphaGt2,
}

/// Order of the fluctuations of `N_0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FluctuationScale {
    NOverLogN,
    /// `n^{1/α}`
    NPow { alpha: f64 },
    SqrtNLogN,
    SqrtN,
}

impl FluctuationScale {
    pub fn evaluate(self, n: f64) -> f64 {
        match self {
            FluctuationScale::NOverLogN => n / n.ln(),
            FluctuationScale::NPow { alpha } => n.powf(1.0 / alpha),
            FluctuationScale::SqrtNLogN => (n * n.ln()).sqrt(),
            FluctuationScale::SqrtN => n.sqrt(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "law")]
pub enum Law {
    /// Centered normal with the given variance.
    Normal { variance: f64 },
    /// `(t/t_c) W`, with `W` normalized as in [`super::w_normalization`].
    ScaledW { multiplier: f64 },
}

/// Limit law of `(N_0 - E N_0) / scale(n)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LimitLaw {
    pub regime: Regime,
    pub scale: FluctuationScale,
    pub law: Law,
}

pub fn limit_law(weyl: WeylParams, t: f64) -> Result<LimitLaw, AnalyticError> {
    let tc = critical_t(weyl);
    let ratio = t / tc;
    if !(t > 0.0) {
        return Err(AnalyticError::Domain(format!("t must be positive, got {t}")));
    }
    if ratio >= 1.0 {
        return Err(AnalyticError::Unsupported(format!(
            "t/t_c = {ratio} >= 1: no condensate, limit law not defined"
        )));
    }
    let a = weyl.alpha;
    let out = if a == 1.0 {
        LimitLaw {
            regime: Regime::AlphaEq1,
            scale: FluctuationScale::NOverLogN,
            law: Law::ScaledW { multiplier: ratio },
        }
    } else if a < 2.0 {
        LimitLaw {
            regime: Regime::AlphaIn1To2,
            scale: FluctuationScale::NPow { alpha: a },
            law: Law::ScaledW { multiplier: ratio },
        }
    } else if a == 2.0 {
        LimitLaw {
            regime: Regime::AlphaEq2,
            scale: FluctuationScale::SqrtNLogN,
            law: Law::Normal {
                variance: 3.0 * ratio * ratio / (PI * PI),
            },
        }
    } else {
        let variance = ratio.powf(a) * zeta_fn(a - 1.0)? / zeta_fn(a)?;
        LimitLaw {
            regime: Regime::AlphaGt2,
            scale: FluctuationScale::SqrtN,
            law: Law::Normal { variance },
        }
    };
    Ok(out)
}

/// Limit of `E_tot / T^{1+α}`: `L α Γ(α+1) ζ(α+1)`, or `L π²/6` for `α = 1`.
pub fn energy_lln_constant(weyl: WeylParams) -> f64 {
    let a = weyl.alpha;
    if a == 1.0 {
        weyl.l * PI * PI / 6.0
    } else {
        weyl.l * a * gamma_fn(a + 1.0).expect("alpha >= 1") * zeta_fn(a + 1.0).expect("alpha >= 1")
    }
}

/// `P(W ≥ x) = exp(-e^{x-γ})` for the 1D oscillator.
pub fn gumbel_sf(x: f64) -> f64 {
    (-(x - EULER_GAMMA).exp()).exp()
}
