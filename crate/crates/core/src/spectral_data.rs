//! Regularized spectral data, the weighted spaces `ℓ₂^θ ⊕ span{e_p}`, the
//! admissibility sets `Ω^θ(r, h)` and the maps `S` and `Φ = S − F`.
//!
//! Positions are 1-based throughout: `s_{2k−1} = α_k − π/2`,
//! `s_{2k} = √λ_k − k`. Index `p` of a `Vec` stores position `p + 1`.

use std::f64::consts::PI;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forward::{self, Normalization, SpectralData};
use crate::potential::{fourier_projections, SigmaFunction};

/// Number of explicit sequences `e_p` split off for smoothness `θ`: `⌊θ + 1/2⌋`.
pub fn expansion_order(theta: f64) -> usize {
    (theta + 0.5).floor().max(0.0) as usize
}

/// Value of `e_p` at `position` (both 1-based).
///
/// Odd `p` lives on even positions `2k`, even `p` on odd positions `2k − 1`;
/// the value is `(2k)^{−p}` in both cases.
pub fn e_value(p: usize, position: usize) -> f64 {
    debug_assert!(p >= 1 && position >= 1);
    let k = position.div_ceil(2);
    let on_even = position.is_multiple_of(2);
    if on_even == (p % 2 == 1) {
        (2.0 * k as f64).powi(-(p as i32))
    } else {
        0.0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegularizedSequence {
    /// `s_1, s_2, …, s_{2N}`.
    pub entries: Vec<f64>,
    pub theta: f64,
    /// `c_1, …, c_m`.
    pub c: Vec<f64>,
    /// `entries − Σ c_j e_j`.
    pub tail: Vec<f64>,
}

impl RegularizedSequence {
    /// Split `entries` against the given `c` (its length fixes `m`).
    pub fn from_entries(entries: Vec<f64>, theta: f64, c: Vec<f64>) -> Self {
        let tail = entries
            .iter()
            .enumerate()
            .map(|(i, s)| s - c.iter().enumerate().map(|(j, cj)| cj * e_value(j + 1, i + 1)).sum::<f64>())
            .collect();
        Self { entries, theta, c, tail }
    }

    /// Number of spectral pairs.
    pub fn pairs(&self) -> usize {
        self.entries.len() / 2
    }

    /// Entry at a 1-based position.
    pub fn s(&self, position: usize) -> f64 {
        self.entries[position - 1]
    }

    /// Component-wise `self − other` (the `c` parts subtract as well).
    pub fn difference(&self, other: &RegularizedSequence) -> Result<RegularizedSequence> {
        if self.entries.len() != other.entries.len() || self.c.len() != other.c.len() {
            return Err(Error::InvalidInput("sequences have different shapes".into()));
        }
        let sub = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x - y).collect::<Vec<_>>();
        Ok(RegularizedSequence {
            entries: sub(&self.entries, &other.entries),
            theta: self.theta,
            c: sub(&self.c, &other.c),
            tail: sub(&self.tail, &other.tail),
        })
    }

    /// Inverse of [`regularize`]: `λ_k = (s_{2k} + k)²`, `α_k = s_{2k−1} + π/2`.
    pub fn to_spectral_data(&self, q0: f64) -> SpectralData {
        let n = self.pairs();
        let lambdas = (1..=n).map(|k| (self.s(2 * k) + k as f64).powi(2)).collect();
        let alphas = (1..=n).map(|k| self.s(2 * k - 1) + PI / 2.0).collect();
        SpectralData { q0, lambdas, alphas, normalization: Normalization::Paper }
    }

    /// CSV rows `index,value,component` with the `c` part first.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("index,value,component\n");
        for (j, c) in self.c.iter().enumerate() {
            let _ = writeln!(out, "{},{:.17e},c", j + 1, c);
        }
        for (p, a) in self.tail.iter().enumerate() {
            let _ = writeln!(out, "{},{:.17e},tail", p + 1, a);
        }
        out
    }
}

/// Regularize `√λ`-normalized data. `extra_c` supplies `c_2, c_3, …` when
/// `θ ≥ 3/2`; `c_1 = q₀` always.
pub fn regularize(data: &SpectralData, theta: f64, extra_c: &[f64]) -> Result<RegularizedSequence> {
    if !(theta >= 0.0) {
        return Err(Error::InvalidInput(format!("theta must be nonnegative, got {theta}")));
    }
    data.validate()?;
    let data = data.to_paper();
    let m = expansion_order(theta);
    if m >= 2 && extra_c.len() < m - 1 {
        return Err(Error::InvalidInput(format!(
            "theta = {theta} needs {} expansion coefficients beyond q0, got {}",
            m - 1,
            extra_c.len()
        )));
    }
    let mut entries = Vec::with_capacity(2 * data.len());
    for (i, (&l, &a)) in data.lambdas.iter().zip(&data.alphas).enumerate() {
        if l < 0.0 {
            return Err(Error::NegativeEigenvalue { lambda: l });
        }
        entries.push(a - PI / 2.0);
        entries.push(l.sqrt() - (i + 1) as f64);
    }
    let c: Vec<f64> = std::iter::once(data.q0).chain(extra_c.iter().copied()).take(m).collect();
    Ok(RegularizedSequence::from_entries(entries, theta, c))
}

/// `(Σ_p a_p² p^{2θ} + Σ_j c_j²)^{1/2}`.
pub fn weighted_norm(seq: &RegularizedSequence, theta: f64) -> f64 {
    let tail: f64 = seq.tail.iter().enumerate().map(|(i, a)| a * a * ((i + 1) as f64).powf(2.0 * theta)).sum();
    let c: f64 = seq.c.iter().map(|c| c * c).sum();
    (tail + c).sqrt()
}

/// Plain weighted `ℓ₂^θ` norm of a raw sequence (no `e_p` part).
pub fn ell2_theta_norm(x: &[f64], theta: f64) -> f64 {
    x.iter().enumerate().map(|(i, a)| a * a * ((i + 1) as f64).powf(2.0 * theta)).sum::<f64>().sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OmegaParams {
    pub r: f64,
    pub h: f64,
    pub theta: f64,
}

impl OmegaParams {
    pub fn new(r: f64, h: f64, theta: f64) -> Result<Self> {
        if !(r > 0.0) || !(h > 0.0 && h < 1.0) {
            return Err(Error::InvalidInput(format!("need r > 0 and 0 < h < 1, got r = {r}, h = {h}")));
        }
        Ok(Self { r, h, theta })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum OmegaCondition {
    /// `s_{2k} ⩾ 0`
    NonnegativeRoot,
    /// `s_{2k} − s_{2k+2} ⩽ 1 − h`
    Gap,
    /// `s_{2k−1} ⩾ −π/2 + h`
    PositiveNorming,
    /// `‖s‖ ⩽ r`
    Ball,
}

impl std::fmt::Display for OmegaCondition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            OmegaCondition::NonnegativeRoot => "s_{2k} >= 0",
            OmegaCondition::Gap => "s_{2k} - s_{2k+2} <= 1 - h",
            OmegaCondition::PositiveNorming => "s_{2k-1} >= -pi/2 + h",
            OmegaCondition::Ball => "weighted norm <= r",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub condition: OmegaCondition,
    /// Pair index `k` (0 for the ball condition).
    pub k: usize,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OmegaVerdict {
    pub admissible: bool,
    pub norm: f64,
    pub violations: Vec<Violation>,
}

pub fn check_omega(seq: &RegularizedSequence, p: &OmegaParams) -> OmegaVerdict {
    let n = seq.pairs();
    let mut violations = Vec::new();
    for k in 1..=n {
        let even = seq.s(2 * k);
        if !(even >= 0.0) {
            violations.push(Violation { condition: OmegaCondition::NonnegativeRoot, k, value: even });
        }
        if k < n {
            let gap = even - seq.s(2 * k + 2);
            if !(gap <= 1.0 - p.h) {
                violations.push(Violation { condition: OmegaCondition::Gap, k, value: gap });
            }
        }
        let odd = seq.s(2 * k - 1);
        if !(odd >= -PI / 2.0 + p.h) {
            violations.push(Violation { condition: OmegaCondition::PositiveNorming, k, value: odd });
        }
    }
    let norm = weighted_norm(seq, p.theta);
    if !(norm <= p.r) {
        violations.push(Violation { condition: OmegaCondition::Ball, k: 0, value: norm });
    }
    OmegaVerdict { admissible: violations.is_empty(), norm, violations }
}

/// Largest `h` for which the three inequality families hold (ignores the ball).
pub fn admissible_gap(seq: &RegularizedSequence) -> f64 {
    let n = seq.pairs();
    if (1..=n).any(|k| seq.s(2 * k) < 0.0) {
        return f64::NEG_INFINITY;
    }
    let mut h = 1.0f64;
    for k in 1..=n {
        if k < n {
            h = h.min(1.0 - (seq.s(2 * k) - seq.s(2 * k + 2)));
        }
        h = h.min(seq.s(2 * k - 1) + PI / 2.0);
    }
    h
}

/// First `2K` coordinates of `Sσ`.
pub fn s_map(sigma: &SigmaFunction, k_max: usize) -> Vec<f64> {
    let proj = fourier_projections(sigma, k_max);
    let mut out = Vec::with_capacity(2 * k_max);
    for k in 0..k_max {
        out.push(-proj.weighted_cosine[k]);
        out.push(-proj.sine[k] / PI);
    }
    out
}

/// `Φ(σ) = Sσ − F(σ)` on the first `2K` coordinates, where `F(σ)` is the
/// regularized data of `σ` (no `e_p` split).
pub fn phi_residual(sigma: &SigmaFunction, k_max: usize, tol: f64) -> Result<Vec<f64>> {
    let data = forward::spectral_data(sigma, k_max, tol)?;
    let f = regularize(&data, 0.0, &[])?;
    Ok(s_map(sigma, k_max).iter().zip(&f.entries).map(|(s, e)| s - e).collect())
}
