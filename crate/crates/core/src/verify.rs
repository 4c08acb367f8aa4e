//! Acceptance suites: each one runs a fixed experiment with pinned sizes and
//! tolerances and reports its checks.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::analytic::{
    energy_lln_constant, gumbel_sf, mean_m, mean_r, tail_upper_bound, u_char_fn, zeta_fn,
    ThermalConfig,
};
use crate::sampler::{
    auto_extend, replicate, solve_chemical_potential, CanonicalSampler, GrandCanonicalSampler,
    OccupationSample, SamplerError, WSampler, DEFAULT_EPSILON,
};
use crate::spectrum::{
    analytic_weyl, build_spectrum, load_spectrum, write_spectrum, EnergySpectrum, TrapKind,
};
use crate::stats::{
    empirical_char_fn, ks_critical_1, ks_statistic, moments, normal_cdf, GofReport, GofTest,
};

pub type VerifyResult<T> = Result<T, Box<dyn std::error::Error + Send + Sync>>;

/// Seed used by `verify` unless another is given.
pub const DEFAULT_SEED: u64 = 20_240_601;

const MAX_TRIES: u64 = 100_000;

/// Suite names in criterion order.
pub const SUITES: [&str; 11] = [
    "gumbel",
    "fraction",
    "clt",
    "non-normal",
    "marginal",
    "energy",
    "gibbs",
    "weyl-means",
    "char-fn",
    "ensemble-gap",
    "determinism",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub criterion: usize,
    pub suite: String,
    pub title: String,
    pub pass: bool,
    pub checks: Vec<GofReport>,
    pub notes: Vec<String>,
}

impl SuiteReport {
    fn new(suite: &str, title: &str, checks: Vec<GofReport>, notes: Vec<String>) -> Self {
        let criterion = SUITES.iter().position(|s| *s == suite).map_or(0, |i| i + 1);
        SuiteReport {
            criterion,
            suite: suite.into(),
            title: title.into(),
            pass: checks.iter().all(|c| c.pass),
            checks,
            notes,
        }
    }

    /// One line: `PASS`/`FAIL`, suite, and each check as `statistic vs threshold`.
    pub fn summary_line(&self) -> String {
        let checks: Vec<String> = self
            .checks
            .iter()
            .map(|c| {
                let op = if c.expect_reject { ">" } else { "<=" };
                format!("{}: {:.6} {op} {:.6}", c.reference, c.statistic, c.threshold)
            })
            .collect();
        format!(
            "{} [{}] {}: {}",
            if self.pass { "PASS" } else { "FAIL" },
            self.criterion,
            self.suite,
            checks.join("; ")
        )
    }
}

pub fn run_suite(name: &str, seed: u64) -> VerifyResult<SuiteReport> {
    match name {
        "gumbel" => gumbel(seed),
        "fraction" => fraction(seed),
        "clt" => clt(seed),
        "non-normal" => non_normal(seed),
        "marginal" => marginal(seed),
        "energy" => energy(seed),
        "gibbs" => gibbs(seed),
        "weyl-means" => weyl_means(),
        "char-fn" => char_fn(seed),
        "ensemble-gap" => ensemble_gap(seed),
        "determinism" => determinism(seed),
        other => Err(format!("unknown suite `{other}`; known: {}", SUITES.join(", ")).into()),
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a / b - 1.0).abs()
}

fn w_samples(
    kind: TrapKind,
    delta: f64,
    count: usize,
    seed: u64,
) -> VerifyResult<(Vec<f64>, WSampler, EnergySpectrum)> {
    let weyl = analytic_weyl(kind, 1.0)?;
    let mut spectrum = build_spectrum(kind, 1.0, 64.0)?;
    let sampler = auto_extend(&mut spectrum, |s| WSampler::new(s, weyl, delta))?;
    let xs = replicate(count, seed, |_, rng| Ok(sampler.sample(rng)))?;
    Ok((xs, sampler, spectrum))
}

/// Canonical draws for the harmonic-3d trap at `t = ratio · t_c`.
fn canonical_3d(
    n: u64,
    ratio: f64,
    count: usize,
    seed: u64,
) -> VerifyResult<(Vec<OccupationSample>, ThermalConfig)> {
    let weyl = analytic_weyl(TrapKind::Harmonic3d, 1.0)?;
    let config = ThermalConfig::at_ratio(n, ratio, weyl)?;
    let mut spectrum = build_spectrum(TrapKind::Harmonic3d, 1.0, 64.0)?;
    let sampler = auto_extend(&mut spectrum, |s| {
        CanonicalSampler::from_config(s, &config, DEFAULT_EPSILON, MAX_TRIES)
    })?;
    Ok((replicate(count, seed, |_, rng| sampler.sample(rng))?, config))
}

/// Criterion 1: W for the 1D oscillator against its Gumbel law.
fn gumbel(seed: u64) -> VerifyResult<SuiteReport> {
    const SAMPLES: usize = 10_000;
    const DELTA: f64 = 1e-3;
    const KS_MAX: f64 = 0.025;
    let (xs, sampler, _) = w_samples(TrapKind::Harmonic1d, DELTA, SAMPLES, seed)?;
    let d = ks_statistic(&xs, |x| 1.0 - gumbel_sf(x))?;
    let m = sampler.meta();
    Ok(SuiteReport::new(
        "gumbel",
        "harmonic-1d W against P(W >= x) = exp(-e^(x-γ))",
        vec![GofReport::new(GofTest::KsExactCdf, d, KS_MAX, SAMPLES, "KS vs Gumbel")],
        vec![format!(
            "J = {} states, {} blocks, certified L2 error {:.3e}",
            m.states, m.blocks, m.l2_error
        )],
    ))
}

/// Criterion 2: mean condensate fraction.
fn fraction(seed: u64) -> VerifyResult<SuiteReport> {
    const N: u64 = 100_000;
    const DRAWS: usize = 500;
    const TOL: f64 = 0.01;
    let (xs, config) = canonical_3d(N, 0.5, DRAWS, seed)?;
    let mean = xs.iter().map(|x| x.ground() as f64 / N as f64).sum::<f64>() / DRAWS as f64;
    let target = 0.875;
    let mut spectrum = build_spectrum(TrapKind::Harmonic3d, 1.0, 64.0)?;
    let em = auto_extend(&mut spectrum, |s| Ok(mean_m(config.beta, s, 1e-6)?))?;
    Ok(SuiteReport::new(
        "fraction",
        "harmonic-3d condensate fraction at t/t_c = 0.5, n = 1e5",
        vec![GofReport::new(
            GofTest::MomentMatch,
            (mean - target).abs(),
            TOL,
            DRAWS,
            "|mean N0/n - 0.875|",
        )],
        vec![
            format!("mean N0/n = {mean:.5}"),
            format!("finite-n value 1 - E(M)/n = {:.5}", 1.0 - em / N as f64),
        ],
    ))
}

/// Criterion 3: normal fluctuations for α = 3.
fn clt(seed: u64) -> VerifyResult<SuiteReport> {
    const N: u64 = 100_000;
    const DRAWS: usize = 5_000;
    const VAR_TOL: f64 = 0.10;
    const KS_MAX: f64 = 0.03;
    let (xs, config) = canonical_3d(N, 0.5, DRAWS, seed)?;
    let n0: Vec<f64> = xs.iter().map(|x| x.ground() as f64).collect();
    let mean = n0.iter().sum::<f64>() / DRAWS as f64;
    let scaled: Vec<f64> = n0.iter().map(|x| (x - mean) / (N as f64).sqrt()).collect();
    let var = moments(&scaled)?.variance;
    let target = 0.125 * zeta_fn(2.0)? / zeta_fn(3.0)?;
    let sd = target.sqrt();
    let d = ks_statistic(&scaled, |x| normal_cdf(x / sd))?;
    let mut spectrum = build_spectrum(TrapKind::Harmonic3d, 1.0, 64.0)?;
    let vm = auto_extend(&mut spectrum, |s| {
        Ok(crate::analytic::var_m(config.beta, s, 1e-6)?)
    })?;
    Ok(SuiteReport::new(
        "clt",
        "harmonic-3d (N0 - mean)/sqrt(n) against N(0, ζ(2)/(8ζ(3)))",
        vec![
            GofReport::new(
                GofTest::MomentMatch,
                rel(var, target),
                VAR_TOL,
                DRAWS,
                "variance relative error",
            ),
            GofReport::new(GofTest::KsExactCdf, d, KS_MAX, DRAWS, "KS vs limit normal"),
        ],
        vec![
            format!("sample variance {var:.5}, limit {target:.5}"),
            format!("finite-n Var(M)/n = {:.5}", vm / N as f64),
        ],
    ))
}

/// Criterion 4: W for the 3D box is not normal, and respects the right-tail bound.
fn non_normal(seed: u64) -> VerifyResult<SuiteReport> {
    const SAMPLES: usize = 10_000;
    const DELTA: f64 = 0.1;
    const Z99: f64 = 2.576;
    let (xs, sampler, spectrum) = w_samples(TrapKind::Box3d, DELTA, SAMPLES, seed)?;
    let m = moments(&xs)?;
    let sd = m.variance.sqrt();
    let d = ks_statistic(&xs, |x| normal_cdf(x / sd))?;
    let mut checks = vec![GofReport::rejecting(
        GofTest::KsNormalFitted,
        d,
        ks_critical_1(SAMPLES),
        SAMPLES,
        "KS vs N(0, sample variance)",
    )];
    // W = c Σ (1 - X_j)/E_j has third cumulant -2c³ Σ 1/E_j³, so the long
    // tail is on the left; require the skewness to be significantly negative.
    let skew = m.skewness.unwrap_or(f64::NAN);
    checks.push(GofReport::new(
        GofTest::MomentMatch,
        skew,
        -Z99 * (6.0 / SAMPLES as f64).sqrt(),
        SAMPLES,
        "skewness (left-skewed)",
    ));
    let norm = sampler.meta().normalization;
    let mut notes = vec![format!(
        "skewness {:.4}, excess kurtosis {:.4}",
        m.skewness.unwrap_or(f64::NAN),
        m.kurtosis.unwrap_or(f64::NAN)
    )];
    for x in [2.0, 3.0] {
        let bound = tail_upper_bound(x, &spectrum)?.probability;
        let p = xs.iter().filter(|&&w| w / norm >= x).count() as f64 / SAMPLES as f64;
        let se = (p * (1.0 - p) / SAMPLES as f64).sqrt();
        checks.push(GofReport::new(
            GofTest::MomentMatch,
            p,
            bound + Z99 * se,
            SAMPLES,
            format!("P(S >= {x}) vs upper bound"),
        ));
        notes.push(format!("x = {x}: empirical {p:.5}, bound {bound:.5}"));
    }
    Ok(SuiteReport::new(
        "non-normal",
        "box-3d W is non-normal and below the right-tail bound",
        checks,
        notes,
    ))
}

/// Criterion 5: one first-excited state, scaled by n^{1/3}, is exponential with mean t.
fn marginal(seed: u64) -> VerifyResult<SuiteReport> {
    const N: u64 = 100_000;
    const DRAWS: usize = 5_000;
    let (xs, config) = canonical_3d(N, 0.5, DRAWS, seed)?;
    let scale = (N as f64).cbrt();
    let ys: Vec<f64> = xs
        .iter()
        .map(|x| x.first_level_states.as_ref().map_or(f64::NAN, |s| s[0] as f64) / scale)
        .collect();
    let t = config.t;
    let d = ks_statistic(&ys, |y| if y <= 0.0 { 0.0 } else { -(-y / t).exp_m1() })?;
    let mean = ys.iter().sum::<f64>() / DRAWS as f64;
    Ok(SuiteReport::new(
        "marginal",
        "harmonic-3d N_1/n^(1/3) against Exp(mean t)",
        vec![GofReport::new(
            GofTest::KsExactCdf,
            d,
            ks_critical_1(DRAWS),
            DRAWS,
            "KS vs exponential",
        )],
        vec![format!(
            "sample mean {mean:.5}, t = {t:.5}; lattice step 1/n^(1/3) = {:.5}",
            1.0 / scale
        )],
    ))
}

/// Criterion 6: total energy over T^4.
fn energy(seed: u64) -> VerifyResult<SuiteReport> {
    const N: u64 = 100_000;
    const DRAWS: usize = 200;
    const TOL: f64 = 0.05;
    let (xs, config) = canonical_3d(N, 0.5, DRAWS, seed)?;
    let t4 = config.temperature.powi(4);
    let mean = xs.iter().map(|x| x.energy / t4).sum::<f64>() / DRAWS as f64;
    let target = energy_lln_constant(analytic_weyl(TrapKind::Harmonic3d, 1.0)?);
    let mut spectrum = build_spectrum(TrapKind::Harmonic3d, 1.0, 64.0)?;
    let er = auto_extend(&mut spectrum, |s| Ok(mean_r(config.beta, s, 1e-6)?))?;
    Ok(SuiteReport::new(
        "energy",
        "harmonic-3d E_tot/T^4 against 3ζ(4)",
        vec![GofReport::new(
            GofTest::MomentMatch,
            rel(mean, target),
            TOL,
            DRAWS,
            "relative error of mean E_tot/T^4",
        )],
        vec![
            format!("mean {mean:.5}, limit {target:.5}"),
            format!("finite-n E(R)/T^4 = {:.5}", er / t4),
        ],
    ))
}

/// Exact canonical law on a finite spectrum by enumeration.
pub fn gibbs_law(energies: &[f64], n: u64, beta: f64) -> Vec<(Vec<u64>, f64)> {
    fn rec(k: usize, left: u64, cur: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if k == 0 {
            let mut c = cur.clone();
            c.insert(0, left);
            out.push(c);
            return;
        }
        for v in 0..=left {
            cur.push(v);
            rec(k - 1, left - v, cur, out);
            cur.pop();
        }
    }
    let mut configs = Vec::new();
    rec(energies.len() - 1, n, &mut Vec::new(), &mut configs);
    let weights: Vec<f64> = configs
        .iter()
        .map(|c| {
            let e: f64 = c.iter().zip(energies).map(|(&k, &e)| k as f64 * e).sum();
            (-beta * e).exp()
        })
        .collect();
    let z: f64 = weights.iter().sum();
    configs.into_iter().zip(weights).map(|(c, w)| (c, w / z)).collect()
}

/// Criterion 7: three-level spectrum against exhaustive enumeration.
fn gibbs(seed: u64) -> VerifyResult<SuiteReport> {
    const DRAWS: usize = 100_000;
    const TV_MAX: f64 = 0.02;
    const P3_TOL: f64 = 0.01;
    let spectrum = load_spectrum("0 1\n1 1\n2 1\n".as_bytes())?;
    let law = gibbs_law(&[0.0, 1.0, 2.0], 3, 1.0);
    let sampler = CanonicalSampler::new(&spectrum, 3, 1.0, DEFAULT_EPSILON, MAX_TRIES)?;
    let xs = replicate(DRAWS, seed, |_, rng| sampler.sample(rng))?;
    let mut tv = 0.0;
    for (config, p) in &law {
        let hits = xs
            .iter()
            .filter(|x| (0..3).all(|i| x.level(i) == config[i]))
            .count();
        tv += (hits as f64 / DRAWS as f64 - p).abs();
    }
    tv *= 0.5;
    let p3: f64 = law.iter().filter(|(c, _)| c[0] == 3).map(|(_, p)| p).sum();
    let p3_hat = xs.iter().filter(|x| x.ground() == 3).count() as f64 / DRAWS as f64;
    Ok(SuiteReport::new(
        "gibbs",
        "spectrum {0,1,2}, n = 3, β = 1 against the enumerated Gibbs law",
        vec![
            GofReport::new(GofTest::MomentMatch, tv, TV_MAX, DRAWS, "total variation"),
            GofReport::new(
                GofTest::MomentMatch,
                (p3_hat - p3).abs(),
                P3_TOL,
                DRAWS,
                "|P(N0 = 3) - exact|",
            ),
            GofReport::new(
                GofTest::MomentMatch,
                (p3 - 0.5605).abs(),
                1e-4,
                law.len(),
                "|exact P(N0 = 3) - 0.5605|",
            ),
        ],
        vec![format!("P(N0 = 3): exact {p3:.5}, sampled {p3_hat:.5}")],
    ))
}

/// Criterion 8: β-asymptotics of the unconditioned means.
fn weyl_means() -> VerifyResult<SuiteReport> {
    const TOL: f64 = 0.03;
    const TOL_1D: f64 = 0.10;
    const SERIES_TOL: f64 = 1e-6;
    let mut checks = Vec::new();
    let mut notes = Vec::new();
    for kind in [TrapKind::Harmonic3d, TrapKind::Harmonic2d] {
        let weyl = analytic_weyl(kind, 1.0)?;
        let beta = 0.01;
        let mut s = build_spectrum(kind, 1.0, 64.0)?;
        let m = auto_extend(&mut s, |s| Ok(mean_m(beta, s, SERIES_TOL)?))?;
        let a = weyl.alpha;
        let target = weyl.l * a * crate::analytic::gamma_fn(a)? * zeta_fn(a)?;
        let value = beta.powf(a) * m;
        checks.push(GofReport::new(
            GofTest::MomentMatch,
            rel(value, target),
            TOL,
            1,
            format!("{kind} β^α E(M)"),
        ));
        notes.push(format!("{kind}: β^α E(M) = {value:.5}, limit {target:.5}"));
        if kind == TrapKind::Harmonic3d {
            let r = auto_extend(&mut s, |s| Ok(mean_r(beta, s, SERIES_TOL)?))?;
            let value = beta.powf(1.0 + a) * r;
            let target = energy_lln_constant(weyl);
            checks.push(GofReport::new(
                GofTest::MomentMatch,
                rel(value, target),
                TOL,
                1,
                format!("{kind} β^(1+α) E(R)"),
            ));
            notes.push(format!("{kind}: β^(1+α) E(R) = {value:.5}, limit {target:.5}"));
        }
    }
    let weyl = analytic_weyl(TrapKind::Harmonic1d, 1.0)?;
    let beta = 1e-4;
    let mut s = build_spectrum(TrapKind::Harmonic1d, 1.0, 64.0)?;
    let m = auto_extend(&mut s, |s| Ok(mean_m(beta, s, SERIES_TOL)?))?;
    let value = beta * m / (1.0 / beta).ln();
    checks.push(GofReport::new(
        GofTest::MomentMatch,
        rel(value, weyl.l),
        TOL_1D,
        1,
        "harmonic-1d β E(M)/log(1/β)".to_string(),
    ));
    notes.push(format!("harmonic-1d: β E(M)/log(1/β) = {value:.5}, L = {}", weyl.l));
    Ok(SuiteReport::new(
        "weyl-means",
        "Weyl-law limits of E(M) and E(R)",
        checks,
        notes,
    ))
}

/// Criterion 9: empirical characteristic function of W for the 1D oscillator.
fn char_fn(seed: u64) -> VerifyResult<SuiteReport> {
    const SAMPLES: usize = 100_000;
    const DELTA: f64 = 0.01;
    const TOL: f64 = 0.02;
    let (xs, sampler, spectrum) = w_samples(TrapKind::Harmonic1d, DELTA, SAMPLES, seed)?;
    let norm = sampler.meta().normalization;
    let mut checks = Vec::new();
    let mut notes = Vec::new();
    for xi in [0.5, 1.0, 2.0] {
        let emp = empirical_char_fn(&xs, xi)?;
        // W = -c U, so E e^{iξW} = E e^{i(-cξ)U}.
        let exact = u_char_fn(-xi * norm, &spectrum, spectrum.excited().len())?;
        let diff = (emp - exact.value).norm();
        checks.push(GofReport::new(
            GofTest::CharFnMatch,
            diff,
            TOL,
            SAMPLES,
            format!("|φ̂(ξ) - φ(ξ)| at ξ = {xi}"),
        ));
        notes.push(format!("ξ = {xi}: empirical {emp:.5}, analytic {:.5}", exact.value));
    }
    Ok(SuiteReport::new(
        "char-fn",
        "harmonic-1d characteristic function of W",
        checks,
        notes,
    ))
}

/// Criterion 10: grand-canonical against canonical spread of N0.
fn ensemble_gap(seed: u64) -> VerifyResult<SuiteReport> {
    const N: u64 = 10_000;
    const DRAWS: usize = 2_000;
    const MIN_RATIO: f64 = 10.0;
    let weyl = analytic_weyl(TrapKind::Harmonic3d, 1.0)?;
    let config = ThermalConfig::at_ratio(N, 0.5, weyl)?;
    let (canon, _) = canonical_3d(N, 0.5, DRAWS, seed)?;
    let mut spectrum = build_spectrum(TrapKind::Harmonic3d, 1.0, 64.0)?;
    let mu = auto_extend(&mut spectrum, |s| {
        solve_chemical_potential(s, config.temperature, N)
    })?;
    let gc = GrandCanonicalSampler::new(&spectrum, config.temperature, mu, DEFAULT_EPSILON)?;
    let grand = replicate(DRAWS, seed.wrapping_add(1 << 32), |_, rng| Ok(gc.sample(rng)))?;
    let sd = |v: Vec<f64>| moments(&v).map(|m| m.variance.sqrt());
    let sd_c = sd(canon.iter().map(|x| x.ground() as f64).collect())?;
    let sd_g = sd(grand.iter().map(|x| x.ground() as f64).collect())?;
    let ratio = sd_g / sd_c;
    Ok(SuiteReport::new(
        "ensemble-gap",
        "std(N0) grand canonical over canonical, harmonic-3d n = 1e4",
        vec![GofReport::rejecting(
            GofTest::MomentMatch,
            ratio,
            MIN_RATIO,
            DRAWS,
            "std ratio",
        )],
        vec![format!("μ = {mu:.6e}, std canonical {sd_c:.3}, grand canonical {sd_g:.3}")],
    ))
}

/// Criterion 11: byte-identical reruns and invariance under an energy shift.
fn determinism(seed: u64) -> VerifyResult<SuiteReport> {
    let run = |args: &[&str]| -> VerifyResult<Vec<u8>> {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = crate::cli::run(args.iter().copied(), &mut out, &mut err);
        if code != 0 {
            return Err(String::from_utf8_lossy(&err).into_owned().into());
        }
        Ok(out)
    };
    let seed_s = seed.to_string();
    let mut checks = Vec::new();
    for args in [
        vec!["bosefluct", "sample-ensemble", "--trap", "harmonic-3d", "--n", "2000", "--samples", "200", "--seed", &seed_s],
        vec!["bosefluct", "sample-w", "--trap", "harmonic-1d", "--samples", "2000", "--seed", &seed_s],
    ] {
        let a = run(&args)?;
        let b = run(&args)?;
        checks.push(GofReport::new(
            GofTest::MomentMatch,
            f64::from(u8::from(a != b || a.is_empty())),
            0.0,
            2,
            format!("{} output differs between runs", args[1]),
        ));
    }

    // Integer energies shifted by a dyadic constant come back exactly.
    let base = build_spectrum(TrapKind::Harmonic3d, 1.0, 300.0)?;
    let mut text = Vec::new();
    write_spectrum(&base, &mut text)?;
    let shifted: String = String::from_utf8(text.clone())?
        .lines()
        .map(|l| {
            let (e, m) = l.split_once(' ').expect("two fields");
            format!("{} {m}\n", e.parse::<f64>().expect("number") + 1000.5)
        })
        .collect();
    let plain = load_spectrum(text.as_slice())?;
    let moved = load_spectrum(shifted.as_bytes())?;
    let beta = 1.0 / ThermalConfig::at_ratio(2000, 0.5, analytic_weyl(TrapKind::Harmonic3d, 1.0)?)?.temperature;
    let draw = |s: &EnergySpectrum| -> Result<Vec<OccupationSample>, SamplerError> {
        let sampler = CanonicalSampler::new(s, 2000, beta, DEFAULT_EPSILON, MAX_TRIES)?;
        replicate(500, seed, |_, rng| sampler.sample(rng))
    };
    let same = draw(&plain)? == draw(&moved)?;
    checks.push(GofReport::new(
        GofTest::MomentMatch,
        f64::from(u8::from(!same)),
        0.0,
        500,
        "samples differ under energy shift".to_string(),
    ));
    Ok(SuiteReport::new(
        "determinism",
        "byte-identical reruns and energy-shift invariance",
        checks,
        vec![],
    ))
}

/// Runs the named suites (all when empty) and writes one summary line per suite.
pub fn run_all(
    names: &[String],
    seed: u64,
    log: &mut dyn Write,
) -> VerifyResult<Vec<SuiteReport>> {
    let names: Vec<String> = if names.is_empty() {
        SUITES.iter().map(|s| s.to_string()).collect()
    } else {
        names.to_vec()
    };
    let mut out = Vec::new();
    for name in &names {
        let report = run_suite(name, seed)?;
        writeln!(log, "{}", report.summary_line())?;
        out.push(report);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gibbs_law_three_levels() {
        let law = gibbs_law(&[0.0, 1.0, 2.0], 3, 1.0);
        assert_eq!(law.len(), 10);
        assert!((law.iter().map(|x| x.1).sum::<f64>() - 1.0).abs() < 1e-15);
        assert!(law.iter().all(|(c, _)| c.iter().sum::<u64>() == 3));
    }

    #[test]
    fn unknown_suite() {
        assert!(run_suite("nope", 1).is_err());
    }

    #[test]
    fn suite_numbering() {
        let r = SuiteReport::new("char-fn", "x", vec![], vec![]);
        assert_eq!(r.criterion, 9);
        assert!(r.pass);
        assert!(r.summary_line().starts_with("PASS [9] char-fn"));
    }
}
