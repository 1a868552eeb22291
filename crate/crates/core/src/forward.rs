//! Dirichlet eigenvalues and norming constants of `L_D` by shooting.
//!
//! The solution `s(x, λ)` with `s(0) = 0`, `s^{[1]}(0) = √λ` is integrated in
//! classical normalization (unit initial slope) and rescaled by `√λ` when
//! `λ > 0`, which keeps negative `λ` real. Eigenvalues are isolated by the
//! Sturm oscillation count of `s(·, λ)` and refined with Brent's method on
//! `s(π, λ)`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ode::{integrate, Endpoint, IntegratorOptions};
use crate::potential::SigmaFunction;

/// Below this `|λ|` the norming constant uses the `λ → 0` limit branch.
pub const LAMBDA_ZERO_THRESHOLD: f64 = 1e-8;

/// Largest `√λ`-normalized `|s(π, λ)|` accepted as "is an eigenvalue".
pub const EIGEN_RESIDUAL_THRESHOLD: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Normalization {
    /// `s^{[1]}(0, λ) = √λ`.
    Paper,
    /// `s^{[1]}(0, λ) = 1`.
    Classical,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShootingResult {
    pub lambda: f64,
    /// `s(π, λ)`.
    pub s_end: f64,
    /// `s^{[1]}(π, λ)`.
    pub s1_end: f64,
    /// Zeros of `s(·, λ)` in `(0, π)`.
    pub oscillation_count: usize,
    /// `∫₀^π s²(x, λ) dx`.
    pub l2_integral: f64,
    /// `s'(0) = √λ` for `λ > 0`; classical (unit slope) for `λ ≤ 0`.
    pub normalization: Normalization,
}

#[derive(Debug, Clone, Copy)]
pub struct ForwardOptions {
    pub integrator: IntegratorOptions,
    pub zero_threshold: f64,
    pub residual_threshold: f64,
}

impl Default for ForwardOptions {
    fn default() -> Self {
        Self {
            integrator: IntegratorOptions::default(),
            zero_threshold: LAMBDA_ZERO_THRESHOLD,
            residual_threshold: EIGEN_RESIDUAL_THRESHOLD,
        }
    }
}

/// Finite spectral data `{q₀} ∪ {λ_k} ∪ {α_k}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralData {
    pub q0: f64,
    pub lambdas: Vec<f64>,
    pub alphas: Vec<f64>,
    pub normalization: Normalization,
}

impl SpectralData {
    pub fn len(&self) -> usize {
        self.lambdas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lambdas.is_empty()
    }

    /// Strictly increasing eigenvalues, positive norming constants, equal lengths.
    pub fn validate(&self) -> Result<()> {
        if self.lambdas.len() != self.alphas.len() {
            return Err(Error::InvalidInput(format!(
                "{} eigenvalues but {} norming constants",
                self.lambdas.len(),
                self.alphas.len()
            )));
        }
        if let Some(i) = self.lambdas.windows(2).position(|w| w[1] <= w[0]) {
            return Err(Error::InvalidInput(format!("eigenvalues not increasing at k = {}", i + 2)));
        }
        if let Some(i) = self.alphas.iter().position(|a| !(*a > 0.0)) {
            return Err(Error::InvalidInput(format!("norming constant not positive at k = {}", i + 1)));
        }
        Ok(())
    }

    /// First `n` pairs.
    pub fn truncated(&self, n: usize) -> SpectralData {
        let n = n.min(self.len());
        SpectralData {
            q0: self.q0,
            lambdas: self.lambdas[..n].to_vec(),
            alphas: self.alphas[..n].to_vec(),
            normalization: self.normalization,
        }
    }

    pub fn to_classical(&self) -> SpectralData {
        self.converted(Normalization::Classical)
    }

    pub fn to_paper(&self) -> SpectralData {
        self.converted(Normalization::Paper)
    }

    fn converted(&self, target: Normalization) -> SpectralData {
        let alphas = match (self.normalization, target) {
            (a, b) if a == b => self.alphas.clone(),
            (Normalization::Paper, Normalization::Classical) => {
                self.lambdas.iter().zip(&self.alphas).map(|(&l, &a)| paper_to_classical(l, a)).collect()
            }
            _ => self.lambdas.iter().zip(&self.alphas).map(|(&l, &a)| classical_to_paper(l, a)).collect(),
        };
        SpectralData { q0: self.q0, lambdas: self.lambdas.clone(), alphas, normalization: target }
    }
}

/// `α^{cl} = α/λ`, except on the `λ → 0` branch where both coincide.
pub fn paper_to_classical(lambda: f64, alpha: f64) -> f64 {
    if lambda.abs() < LAMBDA_ZERO_THRESHOLD {
        alpha
    } else {
        alpha / lambda
    }
}

/// `α = λ·α^{cl}`, except on the `λ → 0` branch where both coincide.
pub fn classical_to_paper(lambda: f64, alpha_classical: f64) -> f64 {
    if lambda.abs() < LAMBDA_ZERO_THRESHOLD {
        alpha_classical
    } else {
        lambda * alpha_classical
    }
}

/// Shooting solver bound to one `σ`.
pub struct ForwardSolver<'a> {
    sigma: &'a SigmaFunction,
    stops: Vec<f64>,
    opts: ForwardOptions,
}

impl<'a> ForwardSolver<'a> {
    pub fn new(sigma: &'a SigmaFunction) -> Self {
        Self::with_options(sigma, ForwardOptions::default())
    }

    pub fn with_options(sigma: &'a SigmaFunction, opts: ForwardOptions) -> Self {
        Self { sigma, stops: sigma.breakpoints(), opts }
    }

    /// Unit-slope solution at `π` (state `[u, v, ∫u²]` and interior zero count).
    pub fn shoot_classical(&self, lambda: f64) -> Result<Endpoint> {
        let s = self.sigma;
        integrate(&|x| s.eval(x), lambda, [0.0, 1.0, 0.0], &self.stops, &self.opts.integrator, |_, _| {})
    }

    /// Unit-slope solution sampled at the sorted points `xs ⊂ [0, π]`.
    pub fn sample_classical(&self, lambda: f64, xs: &[f64]) -> Result<Vec<f64>> {
        const SNAP: f64 = 1e-13;
        let mut stops: Vec<f64> =
            self.stops.iter().chain(xs.iter()).copied().filter(|x| *x > SNAP && *x < PI - SNAP).collect();
        stops.sort_by(|a, b| a.total_cmp(b));
        stops.dedup();
        let mut out = vec![0.0; xs.len()];
        let mut cursor = xs.iter().take_while(|x| **x <= SNAP).count();
        let s = self.sigma;
        integrate(&|x| s.eval(x), lambda, [0.0, 1.0, 0.0], &stops, &self.opts.integrator, |x, y| {
            while cursor < xs.len() && xs[cursor] <= x + SNAP {
                out[cursor] = y[0];
                cursor += 1;
            }
        })?;
        Ok(out)
    }

    pub fn integrate_s(&self, lambda: f64) -> Result<ShootingResult> {
        let end = self.shoot_classical(lambda)?;
        let [u, v, w] = end.state;
        let (scale, normalization) = if lambda > 0.0 {
            (lambda.sqrt(), Normalization::Paper)
        } else {
            (1.0, Normalization::Classical)
        };
        Ok(ShootingResult {
            lambda,
            s_end: scale * u,
            s1_end: scale * v,
            oscillation_count: end.zeros,
            l2_integral: scale * scale * w,
            normalization,
        })
    }

    fn count(&self, lambda: f64) -> Result<(usize, f64)> {
        let end = self.shoot_classical(lambda)?;
        Ok((end.crossings, end.state[0]))
    }

    /// Eigenvalue scan window `[min(0, q_min) − 1, (N+2)² + q_max + 1]`.
    pub fn scan_window(&self, n: usize) -> (f64, f64) {
        let (qmin, qmax) = self.sigma.potential_range();
        (qmin.min(0.0) - 1.0, ((n + 2) * (n + 2)) as f64 + qmax.max(0.0) + 1.0)
    }

    /// The `k`-th eigenvalue (1-based) to absolute tolerance `tol`.
    pub fn eigenvalue(&self, k: usize, window: (f64, f64), tol: f64) -> Result<f64> {
        let (wlo, whi) = window;
        let guess = (k * k) as f64 + self.sigma.q0();
        let kf = k as f64;

        let mut lo = (guess - kf - 1.0).clamp(wlo, whi);
        let (mut clo, mut flo) = self.count(lo)?;
        if clo > k - 1 {
            lo = wlo;
            (clo, flo) = self.count(lo)?;
            if clo > k - 1 {
                return Err(Error::BracketNotFound { index: k, lo: wlo, hi: whi });
            }
        }
        let mut hi = (guess + kf + 1.0).clamp(wlo, whi);
        let (mut chi, mut fhi) = self.count(hi)?;
        if chi < k {
            hi = whi;
            (chi, fhi) = self.count(hi)?;
            if chi < k {
                return Err(Error::BracketNotFound { index: k, lo: wlo, hi: whi });
            }
        }

        let mut iter = 0;
        while !(clo == k - 1 && chi == k) {
            iter += 1;
            if iter > 200 || hi - lo <= f64::EPSILON * hi.abs().max(1.0) {
                return Err(Error::BracketNotFound { index: k, lo, hi });
            }
            let mid = 0.5 * (lo + hi);
            let (c, f) = self.count(mid)?;
            if c >= k {
                hi = mid;
                chi = c;
                fhi = f;
            } else {
                lo = mid;
                clo = c;
                flo = f;
            }
        }
        brent(|l| Ok(self.count(l)?.1), lo, hi, flo, fhi, tol)
    }

    pub fn eigenvalues(&self, n: usize, tol: f64) -> Result<Vec<f64>> {
        if n == 0 {
            return Err(Error::InvalidInput("need at least one eigenvalue".into()));
        }
        if !(tol > 0.0) {
            return Err(Error::InvalidInput("tolerance must be positive".into()));
        }
        let window = self.scan_window(n);
        let ks: Vec<usize> = (1..=n).collect();
        crate::parallel::map(&ks, |&k| self.eigenvalue(k, window, tol)).into_iter().collect()
    }

    /// Norming constant (`s'(0) = √λ`) at an eigenvalue.
    pub fn norming_constant(&self, lambda: f64) -> Result<f64> {
        let end = self.shoot_classical(lambda)?;
        let residual = end.state[0].abs() * lambda.abs().sqrt().max(1.0);
        if residual > self.opts.residual_threshold {
            return Err(Error::NotAnEigenvalue { lambda, residual });
        }
        let w = end.state[2];
        if lambda.abs() < self.opts.zero_threshold {
            // lim_{λ→0} λ⁻¹∫s² = ∫s_cl²
            Ok(w)
        } else if lambda > 0.0 {
            Ok(lambda * w)
        } else {
            Err(Error::NegativeEigenvalue { lambda })
        }
    }

    /// Classical norming constant `∫ s_cl²`, defined for every real eigenvalue.
    pub fn classical_norming_constant(&self, lambda: f64) -> Result<f64> {
        let end = self.shoot_classical(lambda)?;
        let residual = end.state[0].abs() * lambda.abs().sqrt().max(1.0);
        if residual > self.opts.residual_threshold {
            return Err(Error::NotAnEigenvalue { lambda, residual });
        }
        Ok(end.state[2])
    }

    pub fn norming_constants(&self, lambdas: &[f64]) -> Result<Vec<f64>> {
        crate::parallel::map(lambdas, |&l| self.norming_constant(l)).into_iter().collect()
    }

    pub fn spectral_data(&self, n: usize, tol: f64) -> Result<SpectralData> {
        let lambdas = self.eigenvalues(n, tol)?;
        let alphas = self.norming_constants(&lambdas)?;
        Ok(SpectralData { q0: self.sigma.q0(), lambdas, alphas, normalization: Normalization::Paper })
    }
}

/// Brent-Dekker root refinement on a sign-changing bracket.
fn brent<F: FnMut(f64) -> Result<f64>>(mut f: F, a: f64, b: f64, fa: f64, fb: f64, tol: f64) -> Result<f64> {
    let (mut a, mut b, mut fa, mut fb) = (a, b, fa, fb);
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        // the root sits on an endpoint and rounding flipped its sign
        return Ok(if fa.abs() < fb.abs() { a } else { b });
    }
    let (mut c, mut fc) = (a, fa);
    let mut d = b - a;
    let mut e = d;
    for _ in 0..200 {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol1 = 2.0 * f64::EPSILON * b.abs() + 0.5 * tol;
        let xm = 0.5 * (c - b);
        if xm.abs() <= tol1 || fb == 0.0 {
            return Ok(b);
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                let qq = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * xm * qq * (qq - r) - (b - a) * (r - 1.0));
                q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            }
            p = p.abs();
            if 2.0 * p < (3.0 * xm * q - (tol1 * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol1 { d } else { tol1.copysign(xm) };
        fb = f(b)?;
    }
    Ok(b)
}

pub fn integrate_s(sigma: &SigmaFunction, lambda: f64) -> Result<ShootingResult> {
    ForwardSolver::new(sigma).integrate_s(lambda)
}

pub fn eigenvalues(sigma: &SigmaFunction, n: usize, tol: f64) -> Result<Vec<f64>> {
    ForwardSolver::new(sigma).eigenvalues(n, tol)
}

pub fn norming_constants(sigma: &SigmaFunction, lambdas: &[f64]) -> Result<Vec<f64>> {
    ForwardSolver::new(sigma).norming_constants(lambdas)
}

pub fn spectral_data(sigma: &SigmaFunction, n: usize, tol: f64) -> Result<SpectralData> {
    ForwardSolver::new(sigma).spectral_data(n, tol)
}
