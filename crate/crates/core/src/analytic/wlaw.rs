//! The limit variable `W = c Σ_{j≥1} (1 - X_j)/E_j` (X_j unit exponentials):
//! its characteristic function, the moment generating function of `-W`, and
//! two-sided tail bounds. Tail bounds take the prefactor `c` to be 1.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::laws::occupation_constant;
use super::tail::WeylTail;
use super::AnalyticError;
use crate::spectrum::{EnergySpectrum, WeylParams};

/// Prefactor `c` of `W`: `(L α Γ(α) ζ(α))^{-1/α}` for `1 < α < 2`, `1/L` for `α = 1`.
pub fn w_normalization(weyl: WeylParams) -> Result<f64, AnalyticError> {
    if weyl.alpha >= 2.0 {
        return Err(AnalyticError::Unsupported(format!(
            "W is not defined for alpha = {} >= 2",
            weyl.alpha
        )));
    }
    Ok(if weyl.alpha > 1.0 {
        occupation_constant(weyl).powf(-1.0 / weyl.alpha)
    } else {
        1.0 / weyl.l
    })
}

fn require_square_summable(spectrum: &EnergySpectrum) -> Result<Option<WeylTail>, AnalyticError> {
    let tail = WeylTail::of(spectrum);
    if let Some(t) = tail {
        if t.alpha >= 2.0 {
            return Err(AnalyticError::Unsupported(format!(
                "Σ 1/E_j² diverges for alpha = {}",
                t.alpha
            )));
        }
    }
    if spectrum.excited().is_empty() {
        return Err(AnalyticError::Domain("spectrum has no excited level".into()));
    }
    Ok(tail)
}

/// `Σ_{j > skip} 1/E_j²` over states, as `(generated part, generated part +
/// bound on the omitted part)`.
pub fn inverse_square_tail(
    spectrum: &EnergySpectrum,
    skip_states: u64,
) -> Result<(f64, f64), AnalyticError> {
    let tail = require_square_summable(spectrum)?;
    // Excited states are numbered from 1; a level holds (before, before + m].
    let mut before = 0u64;
    let mut lo = 0.0;
    for l in spectrum.excited() {
        let end = before + l.multiplicity;
        let kept = end.saturating_sub(skip_states.max(before));
        lo += kept as f64 / (l.energy * l.energy);
        before = end;
    }
    let hi = lo + tail.map_or(0.0, |t| t.inverse_power(2.0));
    Ok((lo, hi))
}

/// Number of states `n` (ground excluded) whose partial sum `Σ_{j≤n} 1/E_j`
/// satisfies the walk condition, together with that partial sum.
enum Walk {
    Found(u64),
    Exhausted,
}

/// Largest `n` with `Σ_{j≤n} 1/E_j ≤ target`.
fn last_below(spectrum: &EnergySpectrum, target: f64) -> Walk {
    let mut h = 0.0;
    let mut n = 0u64;
    for l in spectrum.excited() {
        let m = l.multiplicity as f64;
        if h + m / l.energy <= target {
            h += m / l.energy;
            n += l.multiplicity;
        } else {
            let c = (((target - h) * l.energy).floor().max(0.0) as u64).min(l.multiplicity - 1);
            return Walk::Found(n + c);
        }
    }
    Walk::Exhausted
}

/// Smallest `n` with `Σ_{j≤n} 1/E_j ≥ target`.
fn first_above(spectrum: &EnergySpectrum, target: f64) -> Walk {
    let mut h = 0.0;
    let mut n = 0u64;
    for l in spectrum.excited() {
        let m = l.multiplicity as f64;
        if h + m / l.energy >= target {
            let c = (((target - h) * l.energy).ceil().max(1.0) as u64).min(l.multiplicity);
            return Walk::Found(n + c);
        }
        h += m / l.energy;
        n += l.multiplicity;
    }
    Walk::Exhausted
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailBound {
    pub x: f64,
    pub probability: f64,
    /// `n_x` (upper bound) or `n_x'` (lower bound), counted in states.
    pub split: Option<u64>,
    /// Value of `Σ_{j>split} 1/E_j²` used in the exponent.
    pub tail_sum: f64,
}

fn extend(spectrum: &EnergySpectrum, what: &str) -> AnalyticError {
    AnalyticError::ExtendSpectrum {
        required_cutoff: 2.0 * spectrum.cutoff(),
        reason: format!("partial sums of 1/E_j do not reach {what} within the generated levels"),
    }
}

/// Upper bound on `P(W ≥ x)`: `exp(-x² / (8 Σ_{j>n_x} 1/E_j²))` where `n_x` is
/// the largest index with `Σ_{j≤n_x} 1/E_j ≤ x/2`.
///
/// The omitted part of the spectrum enters through its upper bound, so the
/// result stays a valid upper bound.
pub fn tail_upper_bound(x: f64, spectrum: &EnergySpectrum) -> Result<TailBound, AnalyticError> {
    if !(x > 0.0 && x.is_finite()) {
        return Err(AnalyticError::Domain(format!("x must be positive, got {x}")));
    }
    require_square_summable(spectrum)?;
    let split = match last_below(spectrum, x / 2.0) {
        Walk::Found(n) => n,
        Walk::Exhausted if spectrum.is_complete() => spectrum.num_states() - 1,
        Walk::Exhausted => return Err(extend(spectrum, "x/2")),
    };
    let (_, hi) = inverse_square_tail(spectrum, split)?;
    Ok(TailBound {
        x,
        probability: (-x * x / (8.0 * hi)).exp().min(1.0),
        split: Some(split),
        tail_sum: hi,
    })
}

/// Lower bound on `P(W ≥ x)`: `2^{-22} exp(-120 x² / Σ_{j>n_x'} 1/E_j²)` where
/// `n_x'` is the smallest index with `Σ_{j≤n_x'} 1/E_j ≥ 2x`.
///
/// Only the generated part of the tail sum is used, which keeps the result a
/// valid lower bound.
pub fn tail_lower_bound(x: f64, spectrum: &EnergySpectrum) -> Result<TailBound, AnalyticError> {
    if !(x > 0.0 && x.is_finite()) {
        return Err(AnalyticError::Domain(format!("x must be positive, got {x}")));
    }
    require_square_summable(spectrum)?;
    let split = match first_above(spectrum, 2.0 * x) {
        Walk::Found(n) => n,
        Walk::Exhausted if spectrum.is_complete() => {
            return Ok(TailBound {
                x,
                probability: 0.0,
                split: None,
                tail_sum: 0.0,
            })
        }
        Walk::Exhausted => return Err(extend(spectrum, "2x")),
    };
    let (lo, _) = inverse_square_tail(spectrum, split)?;
    let probability = if lo > 0.0 {
        2f64.powi(-22) * (-120.0 * x * x / lo).exp()
    } else {
        0.0
    };
    Ok(TailBound {
        x,
        probability,
        split: Some(split),
        tail_sum: lo,
    })
}

/// Partial sums `Σ_{j≤n} 1/E_j` at level boundaries; exposed for reporting.
pub fn harmonic_prefix(spectrum: &EnergySpectrum, levels: usize) -> f64 {
    spectrum
        .excited()
        .iter()
        .take(levels)
        .map(|l| l.multiplicity as f64 / l.energy)
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CharFnValue {
    pub value: Complex64,
    /// Bound on `|log φ - log φ_terms|`: `ξ²/2 Σ_{omitted} 1/E_j²`.
    pub truncation_bound: f64,
}

/// `-log(1 - z) - z` without cancellation for small `|z|`.
fn log_excess(z: Complex64) -> Complex64 {
    if z.norm() < 1e-2 {
        let mut term = z;
        let mut acc = Complex64::new(0.0, 0.0);
        for k in 2..14 {
            term *= z;
            acc += term / k as f64;
        }
        acc
    } else {
        -(Complex64::new(1.0, 0.0) - z).ln() - z
    }
}

/// Characteristic function of `U = Σ_{j≥1} (X_j - 1)/E_j`,
/// `exp(Σ_j [log E_j - log(E_j - iξ) - iξ/E_j])`, over the first `terms`
/// excited levels (weighted by multiplicity).
pub fn u_char_fn(
    xi: f64,
    spectrum: &EnergySpectrum,
    terms: usize,
) -> Result<CharFnValue, AnalyticError> {
    let excited = spectrum.excited();
    if terms > excited.len() {
        return Err(AnalyticError::Domain(format!(
            "{terms} terms requested, {} excited levels generated",
            excited.len()
        )));
    }
    if xi == 0.0 {
        return Ok(CharFnValue {
            value: Complex64::new(1.0, 0.0),
            truncation_bound: 0.0,
        });
    }
    let mut exponent = Complex64::new(0.0, 0.0);
    for l in excited[..terms].iter().rev() {
        exponent += log_excess(Complex64::new(0.0, xi / l.energy)) * l.multiplicity as f64;
    }
    let skipped = spectrum.cumulative_count(terms) - 1;
    let (_, hi) = inverse_square_tail(spectrum, skipped)?;
    Ok(CharFnValue {
        value: exponent.exp(),
        truncation_bound: 0.5 * xi * xi * hi,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MgfValue {
    pub value: f64,
    /// Upper bound on `log φ - log φ_terms` (the truncated product is a lower bound).
    pub log_tail_bound: f64,
}

/// `φ(λ) = E e^{-λW} = Π_j e^{-λ/E_j}/(1 - λ/E_j)` over the first `terms`
/// excited levels, for `λ < E_1`.
pub fn neg_w_mgf(
    lambda: f64,
    spectrum: &EnergySpectrum,
    terms: usize,
) -> Result<MgfValue, AnalyticError> {
    let excited = spectrum.excited();
    if terms == 0 || terms > excited.len() {
        return Err(AnalyticError::Domain(format!(
            "terms must be in 1..={}, got {terms}",
            excited.len()
        )));
    }
    let e1 = excited[0].energy;
    if !(lambda < e1) || lambda.is_nan() {
        return Err(AnalyticError::Domain(format!(
            "E e^(-λW) diverges for λ = {lambda} >= E_1 = {e1}"
        )));
    }
    let log_phi: f64 = excited[..terms]
        .iter()
        .rev()
        .map(|l| {
            let z = lambda / l.energy;
            l.multiplicity as f64 * (-z - (-z).ln_1p())
        })
        .sum();
    let skipped = spectrum.cumulative_count(terms) - 1;
    let (_, s2) = inverse_square_tail(spectrum, skipped)?;
    let next = excited.get(terms).map_or(spectrum.cutoff(), |l| l.energy);
    let log_tail_bound = if lambda > 0.0 {
        0.5 * lambda * lambda * s2 / (1.0 - lambda / next)
    } else {
        0.5 * lambda * lambda * s2
    };
    Ok(MgfValue {
        value: log_phi.exp(),
        log_tail_bound,
    })
}

/// Chernoff bound `inf_{0<λ<E_1} e^{-λx} φ(λ)` on `P(W ≤ -x)`, with the
/// truncation of `φ` accounted for conservatively.
pub fn chernoff_left_tail(
    x: f64,
    spectrum: &EnergySpectrum,
    terms: usize,
) -> Result<f64, AnalyticError> {
    if !(x > 0.0) {
        return Err(AnalyticError::Domain(format!("x must be positive, got {x}")));
    }
    let e1 = spectrum
        .first_excited_energy()
        .ok_or_else(|| AnalyticError::Domain("spectrum has no excited level".into()))?;
    let objective = |lambda: f64| -> Result<f64, AnalyticError> {
        let m = neg_w_mgf(lambda, spectrum, terms)?;
        Ok(-lambda * x + m.value.ln() + m.log_tail_bound)
    };
    // log φ is convex, so golden-section search finds the infimum.
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (0.0, e1 * (1.0 - 1e-9));
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (objective(c)?, objective(d)?);
    for _ in 0..200 {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = objective(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = objective(d)?;
        }
        if (b - a).abs() < 1e-12 * e1 {
            break;
        }
    }
    Ok(fc.min(fd).min(0.0).exp())
}
