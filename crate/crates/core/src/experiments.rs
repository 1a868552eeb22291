//! Noise injection, remainder and asymptotic diagnostics, and the convergence
//! and noise-floor sweeps behind the rate experiments.

use std::f64::consts::PI;
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forward::{self, SpectralData};
use crate::inverse::{reconstruct, FiniteDataSet};
use crate::potential::{sobolev_distance, Representation, SigmaFunction, DEFAULT_GRID_SAMPLES};

/// Largest admissible noise level, `1/e`.
pub const MAX_EPSILON: f64 = 1.0 / std::f64::consts::E;

const MAX_RESAMPLES: usize = 100;

/// How the norming-constant noise scales with the index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AlphaNoise {
    /// `|α̃_k − α_k| ⩽ ε`.
    #[default]
    Absolute,
    /// `|α̃_k − α_k| ⩽ ε/k`, the same decay as the eigenvalue noise.
    PerIndex,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    pub epsilon: f64,
    pub seed: u64,
    #[serde(default)]
    pub alpha_noise: AlphaNoise,
}

impl NoiseSpec {
    pub fn new(epsilon: f64, seed: u64) -> Result<Self> {
        let n = Self { epsilon, seed, alpha_noise: AlphaNoise::Absolute };
        n.validate()?;
        Ok(n)
    }

    pub fn with_alpha_noise(mut self, alpha_noise: AlphaNoise) -> Self {
        self.alpha_noise = alpha_noise;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon >= 0.0 && self.epsilon < MAX_EPSILON) {
            return Err(Error::InvalidInput(format!("epsilon = {} outside [0, 1/e)", self.epsilon)));
        }
        Ok(())
    }
}

/// Uniform noise on the admissible band: `√λ̃_k = √λ_k + v_k ε/k`, `α̃_k = α_k + u_k ε`
/// (or `u_k ε/k`). Each index is redrawn until ordering and positivity hold.
pub fn perturb(data: &SpectralData, noise: &NoiseSpec, theta: f64, extra_c: &[f64]) -> Result<FiniteDataSet> {
    noise.validate()?;
    data.validate()?;
    let data = data.to_paper();
    let mut rng = ChaCha8Rng::seed_from_u64(noise.seed);
    let eps = noise.epsilon;
    let mut lambdas = Vec::with_capacity(data.len());
    let mut alphas = Vec::with_capacity(data.len());
    for (i, (&l, &a)) in data.lambdas.iter().zip(&data.alphas).enumerate() {
        if l < 0.0 {
            return Err(Error::NegativeEigenvalue { lambda: l });
        }
        let k = (i + 1) as f64;
        let alpha_eps = match noise.alpha_noise {
            AlphaNoise::Absolute => eps,
            AlphaNoise::PerIndex => eps / k,
        };
        let mut accepted = None;
        for _ in 0..MAX_RESAMPLES {
            let u: f64 = rng.gen_range(-1.0..=1.0);
            let v: f64 = rng.gen_range(-1.0..=1.0);
            let dv = v * eps / k;
            let root = l.sqrt() + dv;
            let lt = if dv == 0.0 { l } else { root * root };
            let at = a + u * alpha_eps;
            let ordered = lambdas.last().is_none_or(|prev| lt > *prev);
            if root >= 0.0 && at > 0.0 && ordered {
                accepted = Some((lt, at));
                break;
            }
        }
        let (lt, at) = accepted.ok_or(Error::NoiseUnrecoverable { epsilon: eps, index: i + 1 })?;
        lambdas.push(lt);
        alphas.push(at);
    }
    let c = std::iter::once(data.q0).chain(extra_c.iter().copied()).collect();
    Ok(FiniteDataSet { q0: data.q0, c, lambdas, alphas, theta, shift: 0.0 })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RemainderSequences {
    /// `a_k = k(α_k − π/2)`.
    pub a: Vec<f64>,
    /// `b_k = k(√λ_k − k − q₀/(2k))`.
    pub b: Vec<f64>,
    /// `tail[n] = Σ_{n<k⩽K} a_k² + b_k²` for `n = 0..K`; the sum stops at the
    /// last available index `K`.
    pub tail: Vec<f64>,
}

impl RemainderSequences {
    /// `T(N)^{1/2}`, truncated at the available data.
    pub fn tail_norm(&self, n: usize) -> f64 {
        self.tail.get(n).copied().unwrap_or(0.0).sqrt()
    }
}

pub fn remainder_sequences(data: &SpectralData) -> Result<RemainderSequences> {
    let data = data.to_paper();
    let mut a = Vec::with_capacity(data.len());
    let mut b = Vec::with_capacity(data.len());
    for (i, (&l, &al)) in data.lambdas.iter().zip(&data.alphas).enumerate() {
        if l < 0.0 {
            return Err(Error::NegativeEigenvalue { lambda: l });
        }
        let k = (i + 1) as f64;
        a.push(k * (al - PI / 2.0));
        b.push(k * (l.sqrt() - k - data.q0 / (2.0 * k)));
    }
    let mut tail = vec![0.0; a.len() + 1];
    for n in (0..a.len()).rev() {
        tail[n] = tail[n + 1] + a[n] * a[n] + b[n] * b[n];
    }
    Ok(RemainderSequences { a, b, tail })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticFunctionals {
    pub h0: f64,
    pub g1: f64,
    pub h1: f64,
}

impl AsymptoticFunctionals {
    /// `k + h₀/(2k) + h₁/(2k)³`.
    pub fn sqrt_lambda(&self, k: usize) -> f64 {
        let t = 2.0 * k as f64;
        k as f64 + self.h0 / t + self.h1 / (t * t * t)
    }

    /// `π/2 + g₁/(2k)²`.
    pub fn alpha(&self, k: usize) -> f64 {
        let t = 2.0 * k as f64;
        PI / 2.0 + self.g1 / (t * t)
    }
}

/// `h₀ = σ(π)/π`, `g₁ = π(h₀ + σ'(0))`,
/// `h₁ = −(σ''(π) − σ''(0))/π + ∫σ'²/π − 2h₀²`.
///
/// Cosine series are differentiated termwise. Grids use one-sided fourth-order
/// stencils at the endpoints, so they must sample a smooth `σ` finely.
pub fn asymptotic_functionals(sigma: &SigmaFunction) -> Result<AsymptoticFunctionals> {
    let (s_pi, d0, dd0, ddpi, energy) = match sigma.representation() {
        Representation::Cosine { coeffs } => {
            let mut s_pi = 0.0;
            let (mut dd0, mut ddpi, mut energy) = (0.0, 0.0, 0.0);
            for (j, c) in coeffs.iter().enumerate() {
                let jf = j as f64;
                let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                s_pi += c * sign;
                dd0 -= jf * jf * c;
                ddpi -= jf * jf * c * sign;
                energy += PI / 2.0 * jf * jf * c * c;
            }
            (s_pi, 0.0, dd0, ddpi, energy)
        }
        Representation::Grid { values } => {
            let v: Vec<f64> = if values.len() < 7 { sigma.sample(DEFAULT_GRID_SAMPLES) } else { values.clone() };
            let n = v.len();
            let h = PI / (n - 1) as f64;
            let d1 = |f: [f64; 5]| (-25.0 * f[0] + 48.0 * f[1] - 36.0 * f[2] + 16.0 * f[3] - 3.0 * f[4]) / (12.0 * h);
            let d2 = |f: [f64; 6]| {
                (45.0 * f[0] - 154.0 * f[1] + 214.0 * f[2] - 156.0 * f[3] + 61.0 * f[4] - 10.0 * f[5]) / (12.0 * h * h)
            };
            let head = [v[0], v[1], v[2], v[3], v[4], v[5]];
            let rev = [v[n - 1], v[n - 2], v[n - 3], v[n - 4], v[n - 5], v[n - 6]];
            let d0 = d1([head[0], head[1], head[2], head[3], head[4]]);
            let energy: f64 = v.windows(2).map(|w| (w[1] - w[0]).powi(2) / h).sum();
            (v[n - 1] - v[0], d0, d2(head), d2(rev), energy)
        }
    };
    let h0 = s_pi / PI;
    Ok(AsymptoticFunctionals {
        h0,
        g1: PI * (h0 + d0),
        h1: -(ddpi - dd0) / PI + energy / PI - 2.0 * h0 * h0,
    })
}

/// A reference potential stored on the standard grid, with its expansion coefficients.
#[derive(Debug, Clone)]
pub struct TruthPotential {
    pub sigma: SigmaFunction,
    /// `σ̂_j`, `j ⩾ 1`, when built from a cosine series.
    pub coefficients: Vec<f64>,
    /// `c₁ = q₀`, `c₂ = π(q₀ + σ'(0))` with `σ'(0) = 0` for cosine series.
    pub c: [f64; 2],
}

impl TruthPotential {
    /// Any `σ`, with `c₁, c₂` read off by [`asymptotic_functionals`].
    pub fn from_sigma(sigma: SigmaFunction) -> Result<Self> {
        let f = asymptotic_functionals(&sigma)?;
        let grid = if sigma.is_grid() && sigma.resolution() > 2 { sigma } else { sigma.to_grid(DEFAULT_GRID_SAMPLES)? };
        Ok(Self { sigma: grid, coefficients: vec![], c: [f.h0, f.g1] })
    }

    pub fn from_cosine(coefficients: Vec<f64>) -> Result<Self> {
        let mut all = vec![0.0];
        all.extend_from_slice(&coefficients);
        let series = SigmaFunction::cosine(all)?;
        let sigma = series.to_grid(DEFAULT_GRID_SAMPLES)?;
        let q0 = sigma.q0();
        Ok(Self { sigma, coefficients, c: [q0, PI * q0] })
    }

    /// Expansion coefficients beyond `c₁` needed at smoothness `θ`.
    pub fn extra_c(&self, theta: f64) -> Vec<f64> {
        if crate::spectral_data::expansion_order(theta) >= 2 {
            vec![self.c[1]]
        } else {
            vec![]
        }
    }
}

/// Random-sign cosine series with `|σ̂_j| = A·j^{−(θ + 1/2 + δ)}`, `j = 1..=terms`.
/// It lies in `W₂^θ` but in no `W₂^{θ'}` with `θ' > θ + δ` (as `terms → ∞`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SmoothnessClass {
    pub theta: f64,
    pub amplitude: f64,
    pub terms: usize,
    pub delta: f64,
    pub seed: u64,
}

impl SmoothnessClass {
    pub fn new(theta: f64, amplitude: f64, seed: u64) -> Self {
        Self { theta, amplitude, terms: 512, delta: 0.01, seed }
    }

    pub fn generate(&self) -> Result<TruthPotential> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let p = self.theta + 0.5 + self.delta;
        let coeffs = (1..=self.terms)
            .map(|j| {
                let sign = if rng.gen::<bool>() { 1.0 } else { -1.0 };
                sign * self.amplitude * (j as f64).powf(-p)
            })
            .collect();
        TruthPotential::from_cosine(coeffs)
    }
}

/// Random trigonometric polynomial of degree `terms` scaled to `‖σ‖_θ = radius`.
pub fn random_ball_potential(rng: &mut ChaCha8Rng, theta: f64, radius: f64, terms: usize) -> Result<TruthPotential> {
    let raw: Vec<f64> = (1..=terms).map(|_| rng.gen_range(-1.0..=1.0)).collect();
    let norm: f64 = raw
        .iter()
        .enumerate()
        .map(|(i, c)| PI / 2.0 * (1.0 + ((i + 1) * (i + 1)) as f64).powf(theta) * c * c)
        .sum::<f64>()
        .sqrt();
    let scale = if norm > 0.0 { radius / norm } else { 0.0 };
    TruthPotential::from_cosine(raw.into_iter().map(|c| c * scale).collect())
}

/// Ordinary least squares of `log y` on `log x`: `(slope, stderr)`.
pub fn fit_log_slope(xs: &[f64], ys: &[f64]) -> Option<(f64, f64)> {
    let pts: Vec<(f64, f64)> =
        xs.iter().zip(ys).filter(|(x, y)| **x > 0.0 && **y > 0.0).map(|(x, y)| (x.ln(), y.ln())).collect();
    let n = pts.len();
    if n < 2 {
        return None;
    }
    let nf = n as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / nf;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / nf;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let stderr = if n > 2 {
        let rss: f64 = pts.iter().map(|p| (p.1 - my - slope * (p.0 - mx)).powi(2)).sum();
        (rss / (nf - 2.0) / sxx).sqrt()
    } else {
        0.0
    };
    Some((slope, stderr))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sweep {
    N,
    Epsilon,
}

impl Sweep {
    fn label(&self) -> &'static str {
        match self {
            Sweep::N => "N",
            Sweep::Epsilon => "epsilon",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateRow {
    pub n: usize,
    pub epsilon: f64,
    pub error: f64,
    /// Below the error floor and excluded from the fit.
    pub floor: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateReport {
    pub sweep: Sweep,
    /// Smoothness of `σ` (`θ_σ = θ_q + 1`).
    pub theta: f64,
    pub tau: f64,
    pub rows: Vec<RateRow>,
    pub slope: Option<f64>,
    pub slope_stderr: Option<f64>,
    pub predicted_exponent: f64,
    pub tolerance: f64,
}

impl RateReport {
    fn build(sweep: Sweep, theta: f64, tau: f64, mut rows: Vec<RateRow>, predicted: f64, tolerance: f64) -> Self {
        rows.sort_by(|a, b| match sweep {
            Sweep::N => a.n.cmp(&b.n),
            Sweep::Epsilon => a.epsilon.total_cmp(&b.epsilon),
        });
        let used: Vec<&RateRow> = rows.iter().filter(|r| !r.floor).collect();
        let xs: Vec<f64> = used
            .iter()
            .map(|r| match sweep {
                Sweep::N => r.n as f64,
                Sweep::Epsilon => r.epsilon,
            })
            .collect();
        let ys: Vec<f64> = used.iter().map(|r| r.error).collect();
        let fit = fit_log_slope(&xs, &ys);
        Self {
            sweep,
            theta,
            tau,
            rows,
            slope: fit.map(|f| f.0),
            slope_stderr: fit.map(|f| f.1),
            predicted_exponent: predicted,
            tolerance,
        }
    }

    /// Number of rows entering the fit.
    pub fn fitted_points(&self) -> usize {
        self.rows.iter().filter(|r| !r.floor).count()
    }

    /// All rows at the floor: nothing to fit.
    pub fn at_floor(&self) -> bool {
        self.fitted_points() == 0
    }

    /// Slope within tolerance of the prediction, stderr below 0.15, at least four points.
    pub fn pass(&self) -> bool {
        match (self.slope, self.slope_stderr) {
            (Some(s), Some(e)) => {
                self.fitted_points() >= 4 && e < 0.15 && (s - self.predicted_exponent).abs() <= self.tolerance
            }
            _ => false,
        }
    }

    pub fn csv_header() -> &'static str {
        "sweep,theta,tau,N,epsilon,error,slope,slope_stderr,predicted_exponent,pass"
    }

    /// Rows in the report schema; every row repeats the fit.
    pub fn to_csv_rows(&self) -> String {
        let fmt = |v: Option<f64>| v.map_or_else(|| "nan".to_string(), |x| format!("{x:.17e}"));
        let mut out = String::new();
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{:.17e},{:.17e},{},{:.17e},{:.17e},{},{},{:.17e},{}",
                self.sweep.label(),
                self.theta,
                self.tau,
                r.n,
                r.epsilon,
                r.error,
                fmt(self.slope),
                fmt(self.slope_stderr),
                self.predicted_exponent,
                self.pass()
            );
        }
        out
    }
}

/// Full CSV for several reports.
pub fn reports_to_csv(reports: &[RateReport]) -> String {
    let mut out = format!("{}\n", RateReport::csv_header());
    for r in reports {
        out.push_str(&r.to_csv_rows());
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StudyOptions {
    /// Eigenvalue tolerance of the forward solves.
    pub tol: f64,
    /// Errors below this are solver noise and are not fitted.
    pub error_floor: f64,
    /// Allowed deviation of the slope from the prediction.
    pub slope_tolerance: f64,
}

impl Default for StudyOptions {
    fn default() -> Self {
        // ten times the round-trip residual the reconstruction reaches on exact data
        Self { tol: 1e-12, error_floor: 1e-5, slope_tolerance: 0.3 }
    }
}

/// Exact-data reconstructions for every `N`, one report per `τ`.
/// `theta` is the smoothness of `σ`; the prediction is `τ − θ`.
pub fn convergence_study(
    truth: &TruthPotential,
    theta: f64,
    taus: &[f64],
    ns: &[usize],
    opts: &StudyOptions,
) -> Result<Vec<RateReport>> {
    if ns.is_empty() || taus.is_empty() {
        return Err(Error::InvalidInput("empty sweep".into()));
    }
    let n_max = *ns.iter().max().unwrap();
    let data = forward::spectral_data(&truth.sigma, n_max, opts.tol)?;
    let extra = truth.extra_c(theta);
    let mut errors = Vec::with_capacity(ns.len());
    for &n in ns {
        let d = FiniteDataSet::from_spectral(&data.truncated(n), theta, &extra);
        let sol = reconstruct(&d)?;
        let e = taus.iter().map(|&t| sobolev_distance(&sol.sigma, &truth.sigma, t)).collect::<Result<Vec<_>>>()?;
        errors.push((n, e));
    }
    Ok(taus
        .iter()
        .enumerate()
        .map(|(ti, &tau)| {
            let rows = errors
                .iter()
                .map(|(n, e)| RateRow { n: *n, epsilon: 0.0, error: e[ti], floor: e[ti] < opts.error_floor })
                .collect();
            RateReport::build(Sweep::N, theta, tau, rows, tau - theta, opts.slope_tolerance)
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum NRule {
    Fixed { n: usize },
    /// `N = ⌈ε^{−1/(θ_q + τ)}⌉`.
    Corollary,
}

impl NRule {
    pub fn n_for(&self, epsilon: f64, theta_q: f64, tau: f64) -> usize {
        match self {
            NRule::Fixed { n } => *n,
            NRule::Corollary => (epsilon.powf(-1.0 / (theta_q + tau)) - 1e-9).ceil().max(1.0) as usize,
        }
    }
}

/// Predicted error exponent in `ε`: 1 at fixed `N` with `τ < 1/2`, and
/// `(1 + θ_q − τ)/(θ_q + τ)` along the balanced rule.
pub fn predicted_noise_exponent(rule: &NRule, theta_q: f64, tau: f64) -> f64 {
    match rule {
        NRule::Fixed { .. } => 1.0,
        NRule::Corollary => (1.0 + theta_q - tau) / (theta_q + tau),
    }
}

/// Noisy reconstructions over `ε`. `theta` is the smoothness of `σ`
/// (`θ_q = θ − 1`), `seed` drives the noise.
#[allow(clippy::too_many_arguments)]
pub fn noise_floor_study(
    truth: &TruthPotential,
    theta: f64,
    tau: f64,
    epsilons: &[f64],
    rule: NRule,
    seed: u64,
    alpha_noise: AlphaNoise,
    opts: &StudyOptions,
) -> Result<RateReport> {
    if epsilons.is_empty() {
        return Err(Error::InvalidInput("empty sweep".into()));
    }
    let theta_q = theta - 1.0;
    let ns: Vec<usize> = epsilons.iter().map(|&e| rule.n_for(e, theta_q, tau)).collect();
    let n_max = *ns.iter().max().unwrap();
    let data = forward::spectral_data(&truth.sigma, n_max, opts.tol)?;
    let extra = truth.extra_c(theta);
    let mut rows = Vec::with_capacity(epsilons.len());
    for (i, (&eps, &n)) in epsilons.iter().zip(&ns).enumerate() {
        let noise = NoiseSpec::new(eps, seed.wrapping_add(i as u64))?.with_alpha_noise(alpha_noise);
        let d = perturb(&data.truncated(n), &noise, theta, &extra)?;
        let sol = reconstruct(&d)?;
        let error = sobolev_distance(&sol.sigma, &truth.sigma, tau)?;
        rows.push(RateRow { n, epsilon: eps, error, floor: error < opts.error_floor });
    }
    Ok(RateReport::build(
        Sweep::Epsilon,
        theta,
        tau,
        rows,
        predicted_noise_exponent(&rule, theta_q, tau),
        opts.slope_tolerance,
    ))
}

/// `Σ_{p⩽len} Φ_p² p^{2τ}` over the first `len` positions.
pub fn weighted_partial_sum(phi: &[f64], tau: f64, len: usize) -> f64 {
    phi.iter().take(len).enumerate().map(|(i, v)| v * v * ((i + 1) as f64).powf(2.0 * tau)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forward::Normalization;

    fn constant_data(q0: f64, n: usize) -> SpectralData {
        SpectralData {
            q0,
            lambdas: (1..=n).map(|k| (k * k) as f64 + q0).collect(),
            alphas: (1..=n).map(|k| PI / 2.0 + PI * q0 / (2 * k * k) as f64).collect(),
            normalization: Normalization::Paper,
        }
    }

    #[test]
    fn perturb_examples() {
        let d = constant_data(1.0, 10);
        let tiny = perturb(&d, &NoiseSpec::new(0.0, 1).unwrap(), 1.0, &[]).unwrap();
        assert_eq!(tiny.lambdas, d.lambdas);
        assert_eq!(tiny.alphas, d.alphas);
        let noise = NoiseSpec::new(0.1, 7).unwrap();
        let p = perturb(&d, &noise, 1.0, &[]).unwrap();
        for k in 0..10 {
            let kf = (k + 1) as f64;
            assert!(kf * (p.lambdas[k].sqrt() - d.lambdas[k].sqrt()).abs() <= 0.1 + 1e-12);
            assert!((p.alphas[k] - d.alphas[k]).abs() <= 0.1);
        }
        assert_eq!(perturb(&d, &noise, 1.0, &[]).unwrap(), p);
        assert!(NoiseSpec::new(0.5, 0).is_err());
    }

    #[test]
    fn per_index_alpha_noise_decays() {
        let d = constant_data(0.0, 20);
        let noise = NoiseSpec::new(0.2, 3).unwrap().with_alpha_noise(AlphaNoise::PerIndex);
        let p = perturb(&d, &noise, 1.0, &[]).unwrap();
        for k in 0..20 {
            assert!((p.alphas[k] - d.alphas[k]).abs() <= 0.2 / (k + 1) as f64);
        }
    }

    #[test]
    fn unrecoverable_noise_is_reported() {
        // a cluster of nearly equal eigenvalues cannot absorb the noise on λ₁
        let d = SpectralData {
            q0: 0.0,
            lambdas: (0..50).map(|i| 100.0 + i as f64 * 1e-9).collect(),
            alphas: vec![1.0; 50],
            normalization: Normalization::Paper,
        };
        assert!(matches!(
            perturb(&d, &NoiseSpec::new(0.3, 0).unwrap(), 0.0, &[]),
            Err(Error::NoiseUnrecoverable { .. })
        ));
    }

    #[test]
    fn remainder_examples() {
        let r = remainder_sequences(&constant_data(0.0, 5)).unwrap();
        assert!(r.a.iter().chain(&r.b).all(|v| *v == 0.0));
        let r = remainder_sequences(&constant_data(2.0, 6)).unwrap();
        for k in 1..=6 {
            let kf = k as f64;
            assert!((r.a[k - 1] - PI / kf).abs() < 1e-13);
            let exact = kf * ((kf * kf + 2.0).sqrt() - kf - 1.0 / kf);
            assert!((r.b[k - 1] - exact).abs() < 1e-13);
        }
        assert!(r.b[5].abs() < r.b[0].abs());
        assert!((r.tail[0] - r.a.iter().chain(&r.b).map(|v| v * v).sum::<f64>()).abs() < 1e-13);
        assert_eq!(r.tail[6], 0.0);
    }

    #[test]
    fn asymptotic_functional_examples() {
        let z = asymptotic_functionals(&SigmaFunction::zero()).unwrap();
        assert!(z.h0 == 0.0 && z.g1 == 0.0 && z.h1 == 0.0);
        let f = asymptotic_functionals(&SigmaFunction::linear(2.0)).unwrap();
        assert!((f.h0 - 2.0).abs() < 1e-12);
        assert!((f.g1 - 4.0 * PI).abs() < 1e-9);
        assert!((f.h1 + 4.0).abs() < 1e-9);
        // σ = sin(2x)/2: h₀ = 0, σ'(0) = 1, ∫σ'² = π/2, σ'' vanishes at both ends
        let s = SigmaFunction::from_fn(4097, |x| (2.0 * x).sin() / 2.0).unwrap();
        let f = asymptotic_functionals(&s).unwrap();
        assert!(f.h0.abs() < 1e-14);
        assert!((f.g1 - PI).abs() < 1e-9);
        assert!((f.h1 - 0.5).abs() < 1e-5);
    }

    #[test]
    fn cosine_and_grid_functionals_agree() {
        let s = SigmaFunction::cosine(vec![0.0, 0.3, -0.2, 0.1]).unwrap();
        let a = asymptotic_functionals(&s).unwrap();
        let b = asymptotic_functionals(&s.to_grid(4097).unwrap()).unwrap();
        assert!((a.h0 - b.h0).abs() < 1e-12);
        assert!((a.g1 - b.g1).abs() < 1e-8);
        assert!((a.h1 - b.h1).abs() < 1e-4);
    }

    #[test]
    fn slope_fit_recovers_power_law() {
        let xs = [4.0, 8.0, 16.0, 32.0];
        let ys: Vec<f64> = xs.iter().map(|x: &f64| 3.0 * x.powf(-1.5)).collect();
        let (s, e) = fit_log_slope(&xs, &ys).unwrap();
        assert!((s + 1.5).abs() < 1e-12);
        assert!(e < 1e-12);
        assert!(fit_log_slope(&[1.0], &[1.0]).is_none());
    }

    #[test]
    fn generator_is_deterministic_and_in_class() {
        let g = SmoothnessClass::new(1.0, 1.0, 11);
        let a = g.generate().unwrap();
        let b = g.generate().unwrap();
        assert_eq!(a.coefficients, b.coefficients);
        for (j, c) in a.coefficients.iter().enumerate() {
            assert!((c.abs() - ((j + 1) as f64).powf(-1.51)).abs() < 1e-15);
        }
        assert!((a.sigma.q0() - a.c[0]).abs() < 1e-15);
    }

    #[test]
    fn ball_potential_has_requested_norm() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let p = random_ball_potential(&mut rng, 1.0, 0.7, 4).unwrap();
        let mut all = vec![0.0];
        all.extend_from_slice(&p.coefficients);
        let n = crate::potential::sobolev_norm(&SigmaFunction::cosine(all).unwrap(), 1.0).unwrap();
        assert!((n - 0.7).abs() < 1e-12);
    }

    #[test]
    fn csv_has_schema_and_precision() {
        let rows = vec![
            RateRow { n: 4, epsilon: 0.0, error: 0.1, floor: false },
            RateRow { n: 8, epsilon: 0.0, error: 0.05, floor: false },
        ];
        let r = RateReport::build(Sweep::N, 1.0, 0.0, rows, -1.0, 0.3);
        let csv = reports_to_csv(std::slice::from_ref(&r));
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), RateReport::csv_header());
        let fields: Vec<&str> = lines.next().unwrap().split(',').collect();
        assert_eq!(fields.len(), 10);
        assert_eq!(fields[0], "N");
        assert!(fields[5].starts_with("1.00000000000000006e-1"));
        assert!(!r.pass(), "two points are not enough to pass");
    }

    #[test]
    fn background_truth_sits_at_floor() {
        let truth = TruthPotential::from_cosine(vec![]).unwrap();
        let reports = convergence_study(&truth, 1.0, &[0.0], &[2, 4], &StudyOptions::default()).unwrap();
        assert!(reports[0].at_floor());
    }

    #[test]
    fn corollary_rule() {
        assert_eq!(NRule::Corollary.n_for(0.01, 0.25, 0.75), 100);
        assert_eq!(NRule::Fixed { n: 64 }.n_for(0.5, 0.0, 0.0), 64);
        assert!((predicted_noise_exponent(&NRule::Corollary, 0.25, 0.75) - 0.5).abs() < 1e-15);
    }
}
