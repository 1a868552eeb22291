//! 2N-approximation of `σ` from finite spectral data by the degenerate-kernel
//! Gelfand-Levitan equation against a background model `σ₀`.
//!
//! With background solutions `f_j` (unit initial slope) at the measured
//! eigenvalues and at the first `N` background eigenvalues, the kernel
//! `F(x, t) = Σ w_j f_j(x) f_j(t)` is degenerate and the transformation kernel
//! is `K(x, t) = Σ a_j(x) f_j(t)` with
//!
//! ```text
//! (I + W Γ(x)) a(x) = −W f(x),   Γ_ij(x) = ∫₀ˣ f_i f_j,
//! ```
//!
//! after which `σ̃ = σ₀ + 2K(x, x)`.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forward::{self, paper_to_classical, ForwardSolver, Normalization, SpectralData, LAMBDA_ZERO_THRESHOLD};
use crate::potential::{PotentialQ, Representation, SigmaFunction, Smoothness, DEFAULT_GRID_SAMPLES};
use crate::quadrature::{GL5_NODES, GL5_WEIGHTS};
use crate::spectral_data::expansion_order;

/// Relative distance under which a measured and a background eigenvalue count as equal.
const COINCIDENCE_RTOL: f64 = 1e-13;

/// Measured data `{c_j} ∪ {λ̃_k} ∪ {α̃_k}` (`s'(0) = √λ` normalization).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FiniteDataSet {
    pub q0: f64,
    /// `c_1, c_2, …`; `c_1` defaults to `q0` when absent.
    #[serde(default)]
    pub c: Vec<f64>,
    pub lambdas: Vec<f64>,
    pub alphas: Vec<f64>,
    pub theta: f64,
    /// Accumulated constant shift of `q` (see [`shift_normalize`]).
    #[serde(default)]
    pub shift: f64,
}

impl FiniteDataSet {
    /// Exact finite data of a forward solve, with `c_2, …` supplied by the caller.
    pub fn from_spectral(data: &SpectralData, theta: f64, extra_c: &[f64]) -> Self {
        let data = data.to_paper();
        let c = std::iter::once(data.q0).chain(extra_c.iter().copied()).collect();
        Self { q0: data.q0, c, lambdas: data.lambdas, alphas: data.alphas, theta, shift: 0.0 }
    }

    pub fn len(&self) -> usize {
        self.lambdas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lambdas.is_empty()
    }

    pub fn validate(&self) -> Result<()> {
        if self.is_empty() {
            return Err(Error::InvalidInput("data set is empty".into()));
        }
        if !(self.theta >= 0.0) {
            return Err(Error::InvalidInput(format!("theta must be nonnegative, got {}", self.theta)));
        }
        self.as_spectral().validate()?;
        if let Some(&l) = self.lambdas.iter().find(|l| **l <= -LAMBDA_ZERO_THRESHOLD) {
            return Err(Error::NegativeEigenvalue { lambda: l });
        }
        Ok(())
    }

    pub fn as_spectral(&self) -> SpectralData {
        SpectralData {
            q0: self.q0,
            lambdas: self.lambdas.clone(),
            alphas: self.alphas.clone(),
            normalization: Normalization::Paper,
        }
    }

    /// `c_1, …, c_m` for `m = ⌊θ + 1/2⌋`.
    pub fn coefficients(&self) -> Result<Vec<f64>> {
        let m = expansion_order(self.theta);
        let mut c = self.c.clone();
        if c.is_empty() {
            c.push(self.q0);
        }
        if c.len() < m {
            return Err(Error::InvalidInput(format!(
                "theta = {} needs {m} expansion coefficients, got {}",
                self.theta,
                c.len()
            )));
        }
        c.truncate(m);
        Ok(c)
    }
}

/// Background model `σ₀` determined by the first `m = ⌊θ + 1/2⌋` coefficients.
///
/// `m = 0`: `σ₀ = 0`; `m = 1`: `σ₀ = c₁x`; `m = 2`: `σ₀ = c₁x + βx(π − x)`
/// with `β = (c₂ − 2πc₁)/π²`, so that `α_k(σ₀) = π/2 + c₂/(2k)² + O(k⁻⁴)`.
pub fn background_sigma(c: &[f64], theta: f64) -> Result<SigmaFunction> {
    let m = expansion_order(theta);
    if m > c.len() {
        return Err(Error::InvalidInput(format!("theta = {theta} needs {m} coefficients, got {}", c.len())));
    }
    match m {
        0 => Ok(SigmaFunction::zero()),
        1 => Ok(SigmaFunction::linear(c[0])),
        2 => {
            let beta = (c[1] - 2.0 * PI * c[0]) / (PI * PI);
            SigmaFunction::from_fn(DEFAULT_GRID_SAMPLES, |x| c[0] * x + beta * x * (PI - x))
        }
        _ => Err(Error::UnsupportedSmoothness {
            theta,
            reason: "no closed-form background beyond two expansion coefficients".into(),
        }),
    }
}

/// Background data in classical normalization: `(λ⁰_k, α⁰_k^{cl})` for `k ≤ n`.
fn background_data(sigma0: &SigmaFunction, c: &[f64], n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if c.len() <= 1 {
        let c1 = c.first().copied().unwrap_or(0.0);
        let lambdas = (1..=n).map(|k| (k * k) as f64 + c1).collect();
        let alphas = (1..=n).map(|k| PI / (2 * k * k) as f64).collect();
        return Ok((lambdas, alphas));
    }
    let solver = ForwardSolver::new(sigma0);
    let lambdas = solver.eigenvalues(n, 1e-12)?;
    let alphas = lambdas.iter().map(|&l| solver.classical_norming_constant(l)).collect::<Result<_>>()?;
    Ok((lambdas, alphas))
}

/// `λ ↦ λ + c`, `α ↦ α(λ + c)/λ` (the classical constant is unchanged), `c₁ ↦ c₁ + c`,
/// `c₂ ↦ c₂ + 2πc`. The shift is recorded so [`deshift`] can undo it on `σ`.
pub fn shift_normalize(d: &FiniteDataSet, c: f64) -> Result<FiniteDataSet> {
    let mut out = d.clone();
    for (l, a) in out.lambdas.iter_mut().zip(out.alphas.iter_mut()) {
        let shifted = *l + c;
        if !(shifted > 0.0) {
            return Err(Error::InvalidInput(format!("shifted eigenvalue {shifted} is not positive")));
        }
        *a = shifted * paper_to_classical(*l, *a);
        *l = shifted;
    }
    out.q0 += c;
    if let Some(c1) = out.c.first_mut() {
        *c1 += c;
    }
    if let Some(c2) = out.c.get_mut(1) {
        *c2 += 2.0 * PI * c;
    }
    out.shift += c;
    Ok(out)
}

/// Undo a recorded shift on the reconstructed `σ`.
pub fn deshift(sigma: &SigmaFunction, shift: f64) -> Result<SigmaFunction> {
    if shift == 0.0 {
        return Ok(sigma.clone());
    }
    sigma.plus_linear(-shift)
}

/// Assembled Gelfand-Levitan system on a uniform grid.
#[derive(Debug, Clone)]
pub struct GLMProblem {
    pub background: SigmaFunction,
    /// Grid nodes `x_0 = 0, …, x_M = π`.
    pub nodes: Vec<f64>,
    /// Spectral parameters of the surviving basis functions.
    pub mus: Vec<f64>,
    /// Kernel weights `w_j` (`+1/α̃^{cl}`, `−1/α⁰^{cl}` or their sum for merged pairs).
    pub weights: Vec<f64>,
    /// `f_j` at the nodes, row-major `[j][i]`.
    basis_nodes: Vec<Vec<f64>>,
    /// `f_j` at the five Gauss points of every cell, `[j][5·cell + g]`.
    basis_gauss: Vec<Vec<f64>>,
    pub shift: f64,
}

impl GLMProblem {
    pub fn dimension(&self) -> usize {
        self.mus.len()
    }

    pub fn basis_at_node(&self, j: usize, i: usize) -> f64 {
        self.basis_nodes[j][i]
    }

    /// `Γ(x_i)` by the composite Gauss rule.
    pub fn gram(&self, node: usize) -> DMatrix<f64> {
        let n = self.dimension();
        let mut g = DMatrix::zeros(n, n);
        for cell in 0..node {
            let h = self.nodes[cell + 1] - self.nodes[cell];
            for (gi, w) in GL5_WEIGHTS.iter().enumerate() {
                let idx = 5 * cell + gi;
                for a in 0..n {
                    let fa = self.basis_gauss[a][idx] * w * h;
                    for b in 0..n {
                        g[(a, b)] += fa * self.basis_gauss[b][idx];
                    }
                }
            }
        }
        g
    }
}

fn uniform_nodes(samples: usize) -> Vec<f64> {
    let h = PI / (samples - 1) as f64;
    let mut nodes: Vec<f64> = (0..samples).map(|i| i as f64 * h).collect();
    nodes[samples - 1] = PI;
    nodes
}

/// Background solution with unit initial slope for the constant potential `c1`.
fn constant_background_solution(c1: f64, mu: f64, t: f64) -> f64 {
    let d = mu - c1;
    if d.abs() < 1e-14 {
        t
    } else if d > 0.0 {
        let w = d.sqrt();
        (w * t).sin() / w
    } else {
        let k = (-d).sqrt();
        (k * t).sinh() / k
    }
}

pub fn assemble_glm(d: &FiniteDataSet, sigma0: &SigmaFunction, samples: usize) -> Result<GLMProblem> {
    d.validate()?;
    if samples < 2 {
        return Err(Error::InvalidInput("grid needs at least two samples".into()));
    }
    let c = d.coefficients()?;
    let n = d.len();
    let (bg_lambdas, bg_alphas) = background_data(sigma0, &c, n + 1)?;

    // the combined sequence must interlace into a valid spectrum
    let mut combined = d.lambdas.clone();
    combined.push(bg_lambdas[n]);
    if let Some(i) = combined.windows(2).position(|w| w[1] <= w[0]) {
        return Err(Error::InvalidInput(format!(
            "measured eigenvalue {} does not lie below the background eigenvalue {}",
            combined[i], combined[i + 1]
        )));
    }

    let same = |a: f64, b: f64| (a - b).abs() <= COINCIDENCE_RTOL * a.abs().max(b.abs()).max(1.0);
    for (k, &lt) in d.lambdas.iter().enumerate() {
        if let Some(j) = bg_lambdas[..n].iter().enumerate().position(|(j, &l0)| j != k && same(lt, l0)) {
            return Err(Error::SingularBasis(format!(
                "measured eigenvalue {} (k = {}) coincides with background eigenvalue k = {}",
                lt,
                k + 1,
                j + 1
            )));
        }
    }

    let mut mus = Vec::with_capacity(2 * n);
    let mut weights = Vec::with_capacity(2 * n);
    for k in 0..n {
        let (lt, l0) = (d.lambdas[k], bg_lambdas[k]);
        let wt = 1.0 / paper_to_classical(lt, d.alphas[k]);
        let w0 = -1.0 / bg_alphas[k];
        if same(lt, l0) {
            let w = wt + w0;
            if w.abs() > 1e-14 * wt.abs() {
                mus.push(lt);
                weights.push(w);
            }
        } else {
            mus.extend([lt, l0]);
            weights.extend([wt, w0]);
        }
    }

    let nodes = uniform_nodes(samples);
    let mut gauss = Vec::with_capacity(5 * (samples - 1));
    for w in nodes.windows(2) {
        for t in GL5_NODES {
            gauss.push(w[0] + t * (w[1] - w[0]));
        }
    }

    let (basis_nodes, basis_gauss) = if c.len() <= 1 {
        let c1 = c.first().copied().unwrap_or(0.0);
        let eval = |mu: f64, xs: &[f64]| xs.iter().map(|&t| constant_background_solution(c1, mu, t)).collect();
        (
            mus.iter().map(|&mu| eval(mu, &nodes)).collect::<Vec<Vec<f64>>>(),
            mus.iter().map(|&mu| eval(mu, &gauss)).collect::<Vec<Vec<f64>>>(),
        )
    } else {
        let solver = ForwardSolver::new(sigma0);
        let mut all: Vec<f64> = nodes.iter().chain(&gauss).copied().collect();
        all.sort_by(|a, b| a.total_cmp(b));
        let mut bn = Vec::with_capacity(mus.len());
        let mut bgs = Vec::with_capacity(mus.len());
        for &mu in &mus {
            let vals = solver.sample_classical(mu, &all)?;
            // nodes and Gauss points interleave: node i, then the five points of cell i
            let mut vn = Vec::with_capacity(samples);
            let mut vg = Vec::with_capacity(gauss.len());
            for (i, v) in vals.into_iter().enumerate() {
                if i % 6 == 0 {
                    vn.push(v);
                } else {
                    vg.push(v);
                }
            }
            bn.push(vn);
            bgs.push(vg);
        }
        (bn, bgs)
    };

    Ok(GLMProblem {
        background: sigma0.clone(),
        nodes,
        mus,
        weights,
        basis_nodes,
        basis_gauss,
        shift: d.shift,
    })
}

#[derive(Debug, Clone, Copy)]
#[derive(Default)]
pub struct GlmOptions {
    /// Also solve the nonsymmetric system and record the largest discrepancy.
    pub cross_check: bool,
}


#[derive(Debug, Clone)]
pub struct GlmSolution {
    /// `σ̃_N` on the grid, after undoing any recorded shift.
    pub sigma: SigmaFunction,
    /// `K(x_i, x_i)`.
    pub kernel_diagonal: Vec<f64>,
    /// Largest `|K_sym − K_nonsym|` over the grid, when requested.
    pub cross_check: Option<f64>,
}

impl GlmSolution {
    /// `q̃_N` by central differences of `σ̃_N` (one-sided at the ends).
    pub fn potential(&self) -> PotentialQ {
        let v = self.sigma.grid_values().expect("reconstructions are stored on a grid");
        let n = v.len();
        let h = PI / (n - 1) as f64;
        let q: Vec<f64> = (0..n)
            .map(|i| match i {
                0 => (v[1] - v[0]) / h,
                i if i == n - 1 => (v[n - 1] - v[n - 2]) / h,
                i => (v[i + 1] - v[i - 1]) / (2.0 * h),
            })
            .collect();
        PotentialQ { repr: Representation::Grid { values: q }, smoothness: Smoothness::Distributional }
    }
}

pub fn glm_reconstruct(p: &GLMProblem, opts: &GlmOptions) -> Result<GlmSolution> {
    let n = p.dimension();
    let m = p.nodes.len();
    let bg = p.background.sample(m);
    if n == 0 {
        let sigma = deshift(&SigmaFunction::grid(bg)?, p.shift)?;
        return Ok(GlmSolution { sigma, kernel_diagonal: vec![0.0; m], cross_check: opts.cross_check.then_some(0.0) });
    }

    let dscale: Vec<f64> = p.weights.iter().map(|w| w.abs().sqrt()).collect();
    let sign: Vec<f64> = p.weights.iter().map(|w| w.signum()).collect();
    let definite = sign.iter().all(|s| *s > 0.0);
    // scaled basis g_j = |w_j|^{1/2} f_j turns the system into (J + Γ̂) b = −g
    let g_nodes: Vec<Vec<f64>> = p.basis_nodes.iter().zip(&dscale).map(|(f, d)| f.iter().map(|v| v * d).collect()).collect();
    let g_gauss: Vec<Vec<f64>> = p.basis_gauss.iter().zip(&dscale).map(|(f, d)| f.iter().map(|v| v * d).collect()).collect();

    let mut gram = DMatrix::<f64>::zeros(n, n);
    let mut kdiag = vec![0.0; m];
    let mut worst = 0.0f64;
    let mut col = vec![0.0; n];
    for i in 1..m {
        let h = p.nodes[i] - p.nodes[i - 1];
        for (gi, w) in GL5_WEIGHTS.iter().enumerate() {
            let idx = 5 * (i - 1) + gi;
            for (a, c) in col.iter_mut().enumerate() {
                *c = g_gauss[a][idx];
            }
            let wh = w * h;
            for b in 0..n {
                let fb = col[b] * wh;
                for a in b..n {
                    gram[(a, b)] += col[a] * fb;
                }
            }
        }
        let x = p.nodes[i];
        let mut mat = gram.clone();
        for b in 0..n {
            for a in b + 1..n {
                mat[(b, a)] = mat[(a, b)];
            }
            mat[(b, b)] += sign[b];
        }
        let g = DVector::from_fn(n, |a, _| g_nodes[a][i]);
        let rhs = -&g;
        let b = solve_symmetric(mat, &rhs, definite).ok_or(Error::IllPosed { x })?;
        if !b.iter().all(|v| v.is_finite()) {
            return Err(Error::IllPosed { x });
        }
        kdiag[i] = b.dot(&g);

        if opts.cross_check {
            // (I + WΓ) a = −W f with Γ_ab = Γ̂_ab / (d_a d_b)
            let mut ns = DMatrix::<f64>::identity(n, n);
            for a in 0..n {
                for c in 0..n {
                    let gh = if a >= c { gram[(a, c)] } else { gram[(c, a)] };
                    ns[(a, c)] += p.weights[a] * gh / (dscale[a] * dscale[c]);
                }
            }
            let f = DVector::from_fn(n, |a, _| p.basis_nodes[a][i]);
            let wf = DVector::from_fn(n, |a, _| -p.weights[a] * f[a]);
            let a = ns.lu().solve(&wf).ok_or(Error::IllPosed { x })?;
            worst = worst.max((a.dot(&f) - kdiag[i]).abs());
        }
    }

    let values: Vec<f64> = bg.iter().zip(&kdiag).map(|(s, k)| s + 2.0 * k).collect();
    let sigma = deshift(&SigmaFunction::grid(values)?, p.shift)?;
    Ok(GlmSolution { sigma, kernel_diagonal: kdiag, cross_check: opts.cross_check.then_some(worst) })
}

fn solve_symmetric(mat: DMatrix<f64>, rhs: &DVector<f64>, definite: bool) -> Option<DVector<f64>> {
    if definite {
        if let Some(ch) = mat.clone().cholesky() {
            return Some(ch.solve(rhs));
        }
    }
    mat.lu().solve(rhs)
}

/// Background, assembly and solve in one step on the default grid.
pub fn reconstruct(d: &FiniteDataSet) -> Result<GlmSolution> {
    reconstruct_with(d, DEFAULT_GRID_SAMPLES, &GlmOptions::default())
}

pub fn reconstruct_with(d: &FiniteDataSet, samples: usize, opts: &GlmOptions) -> Result<GlmSolution> {
    d.validate()?;
    let c = d.coefficients()?;
    let sigma0 = background_sigma(&c, d.theta)?;
    let p = assemble_glm(d, &sigma0, samples)?;
    glm_reconstruct(&p, opts)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundTripReport {
    /// `max_k k·|√λ_k(σ̃) − √λ̃_k|`.
    pub lambda_residual: f64,
    /// `max_k |α_k(σ̃) − α̃_k|`.
    pub alpha_residual: f64,
    pub tol: f64,
    pub pass: bool,
}

/// Forward-solve `σ̃` (with the data's shift re-applied) and compare with `d`.
pub fn roundtrip_check(sigma_tilde: &SigmaFunction, d: &FiniteDataSet, tol: f64) -> Result<RoundTripReport> {
    d.validate()?;
    let shifted = if d.shift == 0.0 { sigma_tilde.clone() } else { sigma_tilde.plus_linear(d.shift)? };
    let got = forward::spectral_data(&shifted, d.len(), 1e-12)?;
    let mut lambda_residual = 0.0f64;
    let mut alpha_residual = 0.0f64;
    for k in 0..d.len() {
        let kf = (k + 1) as f64;
        lambda_residual = lambda_residual.max(kf * (got.lambdas[k].max(0.0).sqrt() - d.lambdas[k].max(0.0).sqrt()).abs());
        alpha_residual = alpha_residual.max((got.alphas[k] - d.alphas[k]).abs());
    }
    Ok(RoundTripReport { lambda_residual, alpha_residual, tol, pass: lambda_residual <= tol && alpha_residual <= tol })
}
