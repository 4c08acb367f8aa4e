//! Moments of the unconditioned excited occupation `M = Σ Z_j` and of the
//! excited energy `R = Σ E_j Z_j`, with `Z_j` independent geometrics.

use super::tail::WeylTail;
use super::AnalyticError;
use crate::spectrum::EnergySpectrum;

#[derive(Clone, Copy)]
enum Moment {
    MeanM,
    VarM,
    MeanR,
    VarR,
}

impl Moment {
    fn term(self, beta: f64, energy: f64) -> f64 {
        let x = beta * energy;
        match self {
            Moment::MeanM => 1.0 / x.exp_m1(),
            Moment::VarM => 0.25 / (0.5 * x).sinh().powi(2),
            Moment::MeanR => energy / x.exp_m1(),
            Moment::VarR => 0.25 * energy * energy / (0.5 * x).sinh().powi(2),
        }
    }

    /// (power of E, power of the 1 - e^{-βE} denominator)
    fn shape(self) -> (u32, u32) {
        match self {
            Moment::MeanM => (0, 1),
            Moment::VarM => (0, 2),
            Moment::MeanR => (1, 1),
            Moment::VarR => (2, 2),
        }
    }

    fn name(self) -> &'static str {
        match self {
            Moment::MeanM => "E(M)",
            Moment::VarM => "Var(M)",
            Moment::MeanR => "E(R)",
            Moment::VarR => "Var(R)",
        }
    }
}

fn series(
    moment: Moment,
    beta: f64,
    spectrum: &EnergySpectrum,
    tol: f64,
) -> Result<f64, AnalyticError> {
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(AnalyticError::Domain(format!("beta must be positive, got {beta}")));
    }
    if !(tol > 0.0) {
        return Err(AnalyticError::Domain(format!("tol must be positive, got {tol}")));
    }
    if let Some(tail) = WeylTail::of(spectrum) {
        let (p, d) = moment.shape();
        let bound = tail.thermal(beta, p, d);
        if bound > tol {
            return Err(AnalyticError::ExtendSpectrum {
                required_cutoff: tail.required_cutoff(tol, |t| t.thermal(beta, p, d)),
                reason: format!("{} tail bound {bound:e} exceeds tol {tol:e}", moment.name()),
            });
        }
    }
    // Smallest terms first.
    Ok(spectrum
        .excited()
        .iter()
        .rev()
        .map(|l| l.multiplicity as f64 * moment.term(beta, l.energy))
        .sum())
}

/// `E(M) = Σ_{j≥1} 1/(e^{βE_j} - 1)`, within `tol` of the infinite series.
pub fn mean_m(beta: f64, spectrum: &EnergySpectrum, tol: f64) -> Result<f64, AnalyticError> {
    series(Moment::MeanM, beta, spectrum, tol)
}

/// `Var(M) = Σ_{j≥1} e^{-βE_j}/(1 - e^{-βE_j})²`.
pub fn var_m(beta: f64, spectrum: &EnergySpectrum, tol: f64) -> Result<f64, AnalyticError> {
    series(Moment::VarM, beta, spectrum, tol)
}

/// `E(R) = Σ_{j≥1} E_j/(e^{βE_j} - 1)`.
pub fn mean_r(beta: f64, spectrum: &EnergySpectrum, tol: f64) -> Result<f64, AnalyticError> {
    series(Moment::MeanR, beta, spectrum, tol)
}

/// `Var(R) = Σ_{j≥1} E_j² e^{-βE_j}/(1 - e^{-βE_j})²`.
pub fn var_r(beta: f64, spectrum: &EnergySpectrum, tol: f64) -> Result<f64, AnalyticError> {
    series(Moment::VarR, beta, spectrum, tol)
}
