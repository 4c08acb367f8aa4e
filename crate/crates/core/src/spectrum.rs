//! Single-particle energy spectra.
//!
//! A spectrum is stored as distinct levels with explicit multiplicities and the
//! ground state shifted to zero. Built-in traps are generated exactly up to an
//! energy cutoff; anything else is loaded from a text file.

use std::f64::consts::PI;
use std::fmt;
use std::io::BufRead;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Upper bound on lattice points (box traps) or levels (harmonic traps)
/// enumerated by [`build_spectrum`].
pub const MAX_ENUMERATION: u64 = 100_000_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectrumError {
    #[error("unknown trap kind `{0}`")]
    UnknownKind(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("cutoff {cutoff} needs ~{estimate} enumerated points, above the budget of {budget}")]
    Capacity {
        cutoff: f64,
        estimate: u64,
        budget: u64,
    },
    #[error("energy {lambda} is beyond the generated cutoff {cutoff}")]
    OutOfRange { lambda: f64, cutoff: f64 },
    #[error("custom spectra have no closed-form Weyl constants")]
    Unsupported,
    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error("line {line}: multiplicity must be a positive integer")]
    BadMultiplicity { line: usize },
    #[error("line {line}: energies must be non-decreasing")]
    Unordered { line: usize },
    #[error("ground level has multiplicity {0}; the ground state must be unique")]
    DegenerateGround(u64),
    #[error("spectrum file contains no levels")]
    Empty,
    #[error("weyl fit: {0}")]
    Fit(String),
    #[error("i/o: {0}")]
    Io(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TrapKind {
    Harmonic1d,
    Harmonic2d,
    Harmonic3d,
    Box2d,
    Box3d,
    Custom,
}

impl TrapKind {
    pub const BUILT_IN: [TrapKind; 5] = [
        TrapKind::Harmonic1d,
        TrapKind::Harmonic2d,
        TrapKind::Harmonic3d,
        TrapKind::Box2d,
        TrapKind::Box3d,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            TrapKind::Harmonic1d => "harmonic-1d",
            TrapKind::Harmonic2d => "harmonic-2d",
            TrapKind::Harmonic3d => "harmonic-3d",
            TrapKind::Box2d => "box-2d",
            TrapKind::Box3d => "box-3d",
            TrapKind::Custom => "custom",
        }
    }
}

impl fmt::Display for TrapKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TrapKind {
    type Err = SpectrumError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "harmonic-1d" => Ok(TrapKind::Harmonic1d),
            "harmonic-2d" => Ok(TrapKind::Harmonic2d),
            "harmonic-3d" => Ok(TrapKind::Harmonic3d),
            "box-2d" => Ok(TrapKind::Box2d),
            "box-3d" => Ok(TrapKind::Box3d),
            "custom" => Ok(TrapKind::Custom),
            other => Err(SpectrumError::UnknownKind(other.to_string())),
        }
    }
}

/// Growth constants of the level counting function, `S(λ) ~ L λ^α`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeylParams {
    pub l: f64,
    pub alpha: f64,
}

impl WeylParams {
    pub fn new(l: f64, alpha: f64) -> Result<Self, SpectrumError> {
        if !(l > 0.0 && l.is_finite()) {
            return Err(SpectrumError::InvalidArgument(format!("L must be positive, got {l}")));
        }
        if !(alpha >= 1.0 && alpha.is_finite()) {
            return Err(SpectrumError::InvalidArgument(format!("alpha must be >= 1, got {alpha}")));
        }
        Ok(WeylParams { l, alpha })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Level {
    pub energy: f64,
    pub multiplicity: u64,
}

/// How the spectrum continues past the generated cutoff.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Tail {
    /// The listed levels are the whole spectrum.
    Complete,
    /// Levels continue indefinitely with the given growth law.
    Weyl(WeylParams),
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnergySpectrum {
    levels: Vec<Level>,
    /// `cumulative[i]` = number of states with energy ≤ `levels[i].energy`.
    cumulative: Vec<u64>,
    kind: TrapKind,
    scale: f64,
    raw_ground_energy: f64,
    cutoff: f64,
    tail: Tail,
}

impl EnergySpectrum {
    fn from_levels(
        levels: Vec<Level>,
        kind: TrapKind,
        scale: f64,
        raw_ground_energy: f64,
        cutoff: f64,
        tail: Tail,
    ) -> Self {
        debug_assert!(!levels.is_empty());
        debug_assert_eq!(levels[0].energy, 0.0);
        debug_assert_eq!(levels[0].multiplicity, 1);
        let mut acc = 0u64;
        let cumulative = levels
            .iter()
            .map(|l| {
                acc += l.multiplicity;
                acc
            })
            .collect();
        EnergySpectrum {
            levels,
            cumulative,
            kind,
            scale,
            raw_ground_energy,
            cutoff,
            tail,
        }
    }

    pub fn levels(&self) -> &[Level] {
        &self.levels
    }

    /// Levels above the ground state.
    pub fn excited(&self) -> &[Level] {
        &self.levels[1..]
    }

    pub fn kind(&self) -> TrapKind {
        self.kind
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn raw_ground_energy(&self) -> f64 {
        self.raw_ground_energy
    }

    /// Largest energy the level list is guaranteed complete up to.
    pub fn cutoff(&self) -> f64 {
        self.cutoff
    }

    pub fn tail(&self) -> Tail {
        self.tail
    }

    pub fn is_complete(&self) -> bool {
        matches!(self.tail, Tail::Complete)
    }

    /// Replaces the continuation model, e.g. to mark a loaded prefix of a
    /// known trap as truncated rather than complete.
    pub fn with_tail(mut self, tail: Tail) -> Self {
        self.tail = tail;
        self
    }

    /// Total number of generated states, counting multiplicity.
    pub fn num_states(&self) -> u64 {
        *self.cumulative.last().unwrap()
    }

    /// Number of states at or below level `index`.
    pub fn cumulative_count(&self, index: usize) -> u64 {
        self.cumulative[index]
    }

    /// Smallest positive (shifted) energy, if the spectrum has an excited level.
    pub fn first_excited_energy(&self) -> Option<f64> {
        self.levels.get(1).map(|l| l.energy)
    }

    /// `S(λ)`: number of states with energy ≤ λ.
    pub fn count_levels(&self, lambda: f64) -> Result<u64, SpectrumError> {
        if lambda.is_nan() {
            return Err(SpectrumError::InvalidArgument("lambda is NaN".into()));
        }
        if lambda < 0.0 {
            return Ok(0);
        }
        if !self.is_complete() && lambda > self.cutoff {
            return Err(SpectrumError::OutOfRange {
                lambda,
                cutoff: self.cutoff,
            });
        }
        let idx = self.levels.partition_point(|l| l.energy <= lambda);
        Ok(if idx == 0 { 0 } else { self.cumulative[idx - 1] })
    }

    /// Regenerates a built-in spectrum with a larger cutoff.
    pub fn extended(&self, cutoff: f64) -> Result<EnergySpectrum, SpectrumError> {
        if self.kind == TrapKind::Custom {
            return Err(SpectrumError::Unsupported);
        }
        if cutoff <= self.cutoff {
            return Ok(self.clone());
        }
        build_spectrum(self.kind, self.scale, cutoff)
    }
}

fn lattice_estimate(kind: TrapKind, r: f64) -> f64 {
    match kind {
        TrapKind::Box2d => PI / 4.0 * r + 2.0 * r.sqrt() + 1.0,
        TrapKind::Box3d => PI / 6.0 * r.powf(1.5) + 3.0 * PI / 8.0 * r + 3.0 * r.sqrt() + 1.0,
        _ => r + 1.0,
    }
}

/// Generates every distinct level of a built-in trap with energy ≤ `energy_cutoff`.
///
/// Energies are `scale` times: `s` with multiplicity `1`, `s+1`, `(s+1)(s+2)/2`
/// for the 1D/2D/3D harmonic traps, and `i²+j²(+k²)` over non-negative integers
/// for the boxes, enumerated exactly.
pub fn build_spectrum(
    kind: TrapKind,
    scale: f64,
    energy_cutoff: f64,
) -> Result<EnergySpectrum, SpectrumError> {
    if !(scale > 0.0 && scale.is_finite()) {
        return Err(SpectrumError::InvalidArgument(format!("scale must be positive, got {scale}")));
    }
    if !(energy_cutoff > 0.0 && energy_cutoff.is_finite()) {
        return Err(SpectrumError::InvalidArgument(format!(
            "energy cutoff must be positive, got {energy_cutoff}"
        )));
    }
    if kind == TrapKind::Custom {
        return Err(SpectrumError::UnknownKind("custom spectra must be loaded from a file".into()));
    }
    // Guard against 2.9999999 / 1.0 style rounding before flooring.
    let rmax_f = (energy_cutoff / scale * (1.0 + 1e-12)).floor();
    let estimate = lattice_estimate(kind, rmax_f);
    if estimate > MAX_ENUMERATION as f64 {
        return Err(SpectrumError::Capacity {
            cutoff: energy_cutoff,
            estimate: estimate as u64,
            budget: MAX_ENUMERATION,
        });
    }
    let rmax = rmax_f as u64;

    let levels: Vec<Level> = match kind {
        TrapKind::Harmonic1d | TrapKind::Harmonic2d | TrapKind::Harmonic3d => (0..=rmax)
            .map(|s| {
                let multiplicity = match kind {
                    TrapKind::Harmonic1d => 1,
                    TrapKind::Harmonic2d => s + 1,
                    _ => (s + 1) * (s + 2) / 2,
                };
                Level {
                    energy: s as f64 * scale,
                    multiplicity,
                }
            })
            .collect(),
        TrapKind::Box2d | TrapKind::Box3d => {
            let counts = lattice_counts(kind == TrapKind::Box3d, rmax);
            counts
                .iter()
                .enumerate()
                .filter(|(_, &c)| c > 0)
                .map(|(r, &c)| Level {
                    energy: r as f64 * scale,
                    multiplicity: c,
                })
                .collect()
        }
        TrapKind::Custom => unreachable!(),
    };

    let dim = match kind {
        TrapKind::Harmonic1d => 1.0,
        TrapKind::Harmonic2d => 2.0,
        TrapKind::Harmonic3d => 3.0,
        _ => 0.0,
    };
    let weyl = analytic_weyl(kind, scale)?;
    Ok(EnergySpectrum::from_levels(
        levels,
        kind,
        scale,
        // Zero-point energy of the oscillator; the boxes start at 0.
        dim * scale / 2.0,
        rmax as f64 * scale,
        Tail::Weyl(weyl),
    ))
}

/// `counts[r]` = #{non-negative (i, j[, k]) : i² + j² [+ k²] = r}, r ≤ rmax.
fn lattice_counts(three_d: bool, rmax: u64) -> Vec<u64> {
    let mut counts = vec![0u64; rmax as usize + 1];
    let isqrt = |v: u64| {
        let mut s = (v as f64).sqrt() as u64;
        while s * s > v {
            s -= 1;
        }
        while (s + 1) * (s + 1) <= v {
            s += 1;
        }
        s
    };
    for i in 0..=isqrt(rmax) {
        let ri = i * i;
        for j in 0..=isqrt(rmax - ri) {
            let rij = ri + j * j;
            if three_d {
                for k in 0..=isqrt(rmax - rij) {
                    counts[(rij + k * k) as usize] += 1;
                }
            } else {
                counts[rij as usize] += 1;
            }
        }
    }
    counts
}

/// Closed-form Weyl constants of the built-in traps.
///
/// Verified against exhaustive counting: the 1D oscillator with spacing `C` has
/// `L = 1/C`, and the 3D box over non-negative triples fills one octant, so
/// `L = π/(6 C^{3/2})`.
pub fn analytic_weyl(kind: TrapKind, scale: f64) -> Result<WeylParams, SpectrumError> {
    let c = scale;
    let (l, alpha) = match kind {
        TrapKind::Harmonic1d => (1.0 / c, 1.0),
        TrapKind::Harmonic2d => (1.0 / (2.0 * c * c), 2.0),
        TrapKind::Harmonic3d => (1.0 / (6.0 * c * c * c), 3.0),
        TrapKind::Box2d => (PI / (4.0 * c), 1.0),
        TrapKind::Box3d => (PI / (6.0 * c.powf(1.5)), 1.5),
        TrapKind::Custom => return Err(SpectrumError::Unsupported),
    };
    WeylParams::new(l, alpha)
}

/// Result of a log-log least-squares fit of the counting function.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeylFit {
    pub params: WeylParams,
    /// Root-mean-square residual of `log S` around the fitted line.
    pub residual: f64,
    /// True when the raw slope was below 1 and `alpha` was clipped.
    pub clipped: bool,
}

/// Fits `log S(λ) = log L + α log λ` on the given grid.
pub fn fit_weyl(spectrum: &EnergySpectrum, lambda_grid: &[f64]) -> Result<WeylFit, SpectrumError> {
    check_grid(lambda_grid)?;
    let points = lambda_grid
        .iter()
        .map(|&lambda| Ok((lambda, spectrum.count_levels(lambda)? as f64)))
        .collect::<Result<Vec<_>, SpectrumError>>()?;
    fit_weyl_counts(&points)
}

fn check_grid(grid: &[f64]) -> Result<(), SpectrumError> {
    if grid.len() < 4 {
        return Err(SpectrumError::Fit(format!("need at least 4 grid points, got {}", grid.len())));
    }
    if grid.iter().any(|&x| !(x > 0.0 && x.is_finite())) {
        return Err(SpectrumError::Fit("grid points must be positive and finite".into()));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(SpectrumError::Fit("grid must be strictly increasing".into()));
    }
    if grid[grid.len() - 1] < 10.0 * grid[0] {
        return Err(SpectrumError::Fit("grid must span at least a factor of 10".into()));
    }
    Ok(())
}

/// Same fit as [`fit_weyl`] on explicit `(λ, S(λ))` pairs.
pub fn fit_weyl_counts(points: &[(f64, f64)]) -> Result<WeylFit, SpectrumError> {
    let grid: Vec<f64> = points.iter().map(|p| p.0).collect();
    check_grid(&grid)?;
    if let Some(&(lambda, _)) = points.iter().find(|p| !(p.1 > 0.0)) {
        return Err(SpectrumError::Fit(format!("S({lambda}) = 0, log undefined")));
    }
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let k = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / k;
    let my = ys.iter().sum::<f64>() / k;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let (alpha, clipped) = if slope < 1.0 { (1.0, true) } else { (slope, false) };
    let log_l = my - alpha * mx;
    let residual = (xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - log_l - alpha * x).powi(2))
        .sum::<f64>()
        / k)
        .sqrt();
    Ok(WeylFit {
        params: WeylParams::new(log_l.exp(), alpha)?,
        residual,
        clipped,
    })
}

/// Reads "energy multiplicity" lines; `#` starts a comment line.
///
/// Duplicate energies are merged and the ground level is shifted to zero. The
/// result is marked [`Tail::Complete`].
pub fn load_spectrum<R: BufRead>(source: R) -> Result<EnergySpectrum, SpectrumError> {
    let mut raw: Vec<(f64, u64)> = Vec::new();
    for (idx, line) in source.lines().enumerate() {
        let lineno = idx + 1;
        let line = line.map_err(|e| SpectrumError::Io(e.to_string()))?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut fields = trimmed.split_whitespace();
        let (Some(e), Some(m), None) = (fields.next(), fields.next(), fields.next()) else {
            return Err(SpectrumError::Parse {
                line: lineno,
                reason: "expected `energy multiplicity`".into(),
            });
        };
        let energy: f64 = e.parse().map_err(|_| SpectrumError::Parse {
            line: lineno,
            reason: format!("non-numeric energy `{e}`"),
        })?;
        if !energy.is_finite() {
            return Err(SpectrumError::Parse {
                line: lineno,
                reason: format!("energy `{e}` is not finite"),
            });
        }
        let mult: i64 = m.parse().map_err(|_| SpectrumError::Parse {
            line: lineno,
            reason: format!("non-numeric multiplicity `{m}`"),
        })?;
        if mult < 1 {
            return Err(SpectrumError::BadMultiplicity { line: lineno });
        }
        match raw.last_mut() {
            Some(last) if energy < last.0 => return Err(SpectrumError::Unordered { line: lineno }),
            Some(last) if energy == last.0 => last.1 += mult as u64,
            _ => raw.push((energy, mult as u64)),
        }
    }
    let Some(&(ground, ground_mult)) = raw.first() else {
        return Err(SpectrumError::Empty);
    };
    if ground_mult != 1 {
        return Err(SpectrumError::DegenerateGround(ground_mult));
    }
    let levels: Vec<Level> = raw
        .iter()
        .map(|&(e, m)| Level {
            energy: e - ground,
            multiplicity: m,
        })
        .collect();
    let cutoff = levels.last().unwrap().energy;
    Ok(EnergySpectrum::from_levels(
        levels,
        TrapKind::Custom,
        1.0,
        ground,
        cutoff,
        Tail::Complete,
    ))
}

/// Writes the spectrum in the format accepted by [`load_spectrum`].
pub fn write_spectrum<W: std::io::Write>(spectrum: &EnergySpectrum, mut out: W) -> std::io::Result<()> {
    for l in spectrum.levels() {
        writeln!(out, "{} {}", l.energy + spectrum.raw_ground_energy(), l.multiplicity)?;
    }
    Ok(())
}
