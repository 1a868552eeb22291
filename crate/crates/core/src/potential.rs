//! Potentials on `[0, π]` and their antiderivatives.
//!
//! The primary object is [`SigmaFunction`], the antiderivative `σ` of the
//! potential `q` anchored by `σ(0) = 0`. Distributional potentials
//! (`q ∈ W₂^{-1}`) only exist through `σ`, so every solver in the crate
//! consumes `σ` rather than `q`.
//!
//! Two representations are supported:
//! * a cosine series `σ(x) = Σ_j σ̂_j cos(jx)`,
//! * samples on a uniform grid over `[0, π]` with piecewise-linear interpolation.
//!
//! Sobolev norms are measured on the quotient by constants through the cosine
//! coefficients: `‖σ‖_τ² = (π/2) Σ_{j≥1} (1+j²)^τ |σ̂_j|²`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{GL5_NODES, GL5_WEIGHTS};

/// Default number of grid samples (nodes, including both endpoints).
pub const DEFAULT_GRID_SAMPLES: usize = 2048;

/// Upper end (exclusive) of the Sobolev indices the cosine-basis norm supports.
pub const MAX_SOBOLEV_INDEX: f64 = 1.5;

/// Serialized form of a function on `[0, π]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Representation {
    Cosine { coeffs: Vec<f64> },
    Grid { values: Vec<f64> },
}

impl Representation {
    fn validate(&self) -> Result<()> {
        match self {
            Representation::Cosine { coeffs } => {
                if coeffs.is_empty() {
                    return Err(Error::InvalidInput("empty cosine series".into()));
                }
                if coeffs.iter().any(|c| !c.is_finite()) {
                    return Err(Error::InvalidInput("non-finite cosine coefficient".into()));
                }
            }
            Representation::Grid { values } => {
                if values.len() < 2 {
                    return Err(Error::InvalidInput("grid needs at least two samples".into()));
                }
                if values.iter().any(|v| !v.is_finite()) {
                    return Err(Error::InvalidInput("non-finite grid sample".into()));
                }
            }
        }
        Ok(())
    }
}

/// Antiderivative `σ` of a potential, anchored at `σ(0) = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Representation", into = "Representation")]
pub struct SigmaFunction {
    repr: Representation,
}

impl TryFrom<Representation> for SigmaFunction {
    type Error = Error;

    fn try_from(repr: Representation) -> Result<Self> {
        match repr {
            Representation::Cosine { coeffs } => SigmaFunction::cosine(coeffs),
            Representation::Grid { values } => SigmaFunction::grid(values),
        }
    }
}

impl From<SigmaFunction> for Representation {
    fn from(s: SigmaFunction) -> Self {
        s.repr
    }
}

#[inline]
fn grid_step(n: usize) -> f64 {
    PI / (n - 1) as f64
}

/// Σ_{k=0}^{n} c_k cos(kx) by Clenshaw's recurrence.
fn clenshaw_cos(coeffs: &[f64], x: f64) -> f64 {
    let t = x.cos();
    let (mut b1, mut b2) = (0.0, 0.0);
    for &c in coeffs.iter().skip(1).rev() {
        let b0 = c + 2.0 * t * b1 - b2;
        b2 = b1;
        b1 = b0;
    }
    coeffs[0] + t * b1 - b2
}

impl SigmaFunction {
    /// Cosine series `Σ_j coeffs[j] cos(jx)`; the constant term is replaced so that `σ(0) = 0`.
    pub fn cosine(mut coeffs: Vec<f64>) -> Result<Self> {
        Representation::Cosine { coeffs: coeffs.clone() }.validate()?;
        coeffs[0] = -coeffs.iter().skip(1).sum::<f64>();
        Ok(Self { repr: Representation::Cosine { coeffs } })
    }

    /// Uniform samples on `[0, π]` (first sample at 0, last at π); shifted so that `σ(0) = 0`.
    pub fn grid(mut values: Vec<f64>) -> Result<Self> {
        Representation::Grid { values: values.clone() }.validate()?;
        let v0 = values[0];
        values.iter_mut().for_each(|v| *v -= v0);
        Ok(Self { repr: Representation::Grid { values } })
    }

    /// Sample `f` on a uniform grid with `samples` nodes.
    pub fn from_fn<F: Fn(f64) -> f64>(samples: usize, f: F) -> Result<Self> {
        if samples < 2 {
            return Err(Error::InvalidInput("grid needs at least two samples".into()));
        }
        let h = grid_step(samples);
        Self::grid((0..samples).map(|i| f(i as f64 * h)).collect())
    }

    pub fn zero() -> Self {
        Self { repr: Representation::Grid { values: vec![0.0, 0.0] } }
    }

    /// `σ(x) = slope·x`, i.e. the constant potential `q ≡ slope`. Stored exactly on a two-node grid.
    pub fn linear(slope: f64) -> Self {
        Self { repr: Representation::Grid { values: vec![0.0, slope * PI] } }
    }

    pub fn representation(&self) -> &Representation {
        &self.repr
    }

    pub fn is_grid(&self) -> bool {
        matches!(self.repr, Representation::Grid { .. })
    }

    /// Grid samples, if this is a grid function.
    pub fn grid_values(&self) -> Option<&[f64]> {
        match &self.repr {
            Representation::Grid { values } => Some(values),
            Representation::Cosine { .. } => None,
        }
    }

    /// Cosine coefficients, if this is a cosine series.
    pub fn cosine_series(&self) -> Option<&[f64]> {
        match &self.repr {
            Representation::Cosine { coeffs } => Some(coeffs),
            Representation::Grid { .. } => None,
        }
    }

    /// Number of samples a grid representation of comparable resolution needs.
    pub fn resolution(&self) -> usize {
        match &self.repr {
            Representation::Grid { values } => values.len(),
            Representation::Cosine { coeffs } => (16 * coeffs.len()).max(DEFAULT_GRID_SAMPLES),
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        match &self.repr {
            Representation::Cosine { coeffs } => clenshaw_cos(coeffs, x),
            Representation::Grid { values } => {
                let n = values.len();
                let h = grid_step(n);
                let s = (x / h).clamp(0.0, (n - 1) as f64);
                let i = (s.floor() as usize).min(n - 2);
                let t = s - i as f64;
                values[i] + t * (values[i + 1] - values[i])
            }
        }
    }

    /// First derivative; for a grid this is the slope of the containing cell.
    pub fn derivative(&self, x: f64) -> f64 {
        match &self.repr {
            Representation::Cosine { coeffs } => coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(j, c)| -(j as f64) * c * (j as f64 * x).sin())
                .sum(),
            Representation::Grid { values } => {
                let n = values.len();
                let h = grid_step(n);
                let i = ((x / h).floor().max(0.0) as usize).min(n - 2);
                (values[i + 1] - values[i]) / h
            }
        }
    }

    /// Interior breakpoints where `σ` may fail to be smooth (grid nodes).
    pub fn breakpoints(&self) -> Vec<f64> {
        match &self.repr {
            Representation::Grid { values } => {
                let h = grid_step(values.len());
                (1..values.len() - 1).map(|i| i as f64 * h).collect()
            }
            Representation::Cosine { .. } => Vec::new(),
        }
    }

    /// Resample onto a uniform grid with `samples` nodes.
    pub fn to_grid(&self, samples: usize) -> Result<Self> {
        if let Representation::Grid { values } = &self.repr {
            if values.len() == samples {
                return Ok(self.clone());
            }
        }
        Self::from_fn(samples, |x| self.eval(x))
    }

    /// Node values on a uniform grid with `samples` nodes.
    pub fn sample(&self, samples: usize) -> Vec<f64> {
        let h = grid_step(samples);
        (0..samples).map(|i| self.eval(i as f64 * h)).collect()
    }

    /// `q₀ = (σ(π) − σ(0))/π`, the mean of the potential.
    pub fn q0(&self) -> f64 {
        (self.eval(PI) - self.eval(0.0)) / PI
    }

    /// Range of the potential `q = σ'`, used to size eigenvalue scan windows.
    pub fn potential_range(&self) -> (f64, f64) {
        match &self.repr {
            Representation::Grid { values } => {
                let h = grid_step(values.len());
                values.windows(2).map(|w| (w[1] - w[0]) / h).fold(
                    (f64::INFINITY, f64::NEG_INFINITY),
                    |(lo, hi), s| (lo.min(s), hi.max(s)),
                )
            }
            Representation::Cosine { coeffs } => {
                let bound: f64 = coeffs.iter().enumerate().map(|(j, c)| j as f64 * c.abs()).sum();
                (-bound, bound)
            }
        }
    }

    /// `a·self + b·other`. Two cosine series combine coefficient-wise; anything else
    /// is combined on the finer of the two grids.
    pub fn combine(&self, a: f64, other: &SigmaFunction, b: f64) -> Result<Self> {
        match (&self.repr, &other.repr) {
            (Representation::Cosine { coeffs: c1 }, Representation::Cosine { coeffs: c2 }) => {
                let n = c1.len().max(c2.len());
                let coeffs = (0..n)
                    .map(|j| a * c1.get(j).copied().unwrap_or(0.0) + b * c2.get(j).copied().unwrap_or(0.0))
                    .collect();
                Self::cosine(coeffs)
            }
            _ => {
                let n = self.resolution().max(other.resolution());
                let (u, v) = (self.sample(n), other.sample(n));
                Self::grid(u.iter().zip(&v).map(|(x, y)| a * x + b * y).collect())
            }
        }
    }

    pub fn sub(&self, other: &SigmaFunction) -> Result<Self> {
        self.combine(1.0, other, -1.0)
    }

    pub fn scaled(&self, t: f64) -> Self {
        let repr = match &self.repr {
            Representation::Cosine { coeffs } => Representation::Cosine { coeffs: coeffs.iter().map(|c| t * c).collect() },
            Representation::Grid { values } => Representation::Grid { values: values.iter().map(|v| t * v).collect() },
        };
        Self { repr }
    }

    /// Add `c·x` (shifts the potential by the constant `c`).
    pub fn plus_linear(&self, c: f64) -> Result<Self> {
        self.combine(1.0, &SigmaFunction::linear(c), 1.0)
    }

    /// Quotient comparison: equal up to an additive constant, within `tol` in sup norm.
    pub fn eq_modulo_constant(&self, other: &SigmaFunction, tol: f64) -> bool {
        let n = self.resolution().max(other.resolution());
        let d: Vec<f64> = self.sample(n).iter().zip(other.sample(n)).map(|(a, b)| a - b).collect();
        let mean = d.iter().sum::<f64>() / n as f64;
        d.iter().all(|v| (v - mean).abs() <= tol)
    }

    /// Cosine coefficient `σ̂_j = (2/π)∫₀^π σ cos(jx) dx` for `j ≥ 1` (and the mean for `j = 0`).
    pub fn cosine_coefficients(&self, j_max: usize) -> Vec<f64> {
        match &self.repr {
            Representation::Cosine { coeffs } => (0..=j_max).map(|j| coeffs.get(j).copied().unwrap_or(0.0)).collect(),
            Representation::Grid { values } => {
                let spec = GridSpectrum::new(values);
                let mut out = Vec::with_capacity(j_max + 1);
                out.push(spec.mean);
                out.extend((1..=j_max).map(|j| spec.coefficient(j)));
                out
            }
        }
    }
}

/// Exact cosine coefficients of a piecewise-linear grid function.
///
/// Two integrations by parts give
/// `∫₀^π σ cos(jx) dx = −j⁻² Σ_i d_i cos(j x_i)` where `d_i` are the slope jumps
/// (with the end slopes entering as `d_0 = s_0`, `d_M = −s_{M−1}`). The sum is
/// periodic in `j` with period `2M`, so one table of `2M` values serves every `j`.
struct GridSpectrum {
    period: usize,
    table: Vec<f64>,
    mean: f64,
}

impl GridSpectrum {
    fn new(values: &[f64]) -> Self {
        let m = values.len() - 1;
        let h = grid_step(values.len());
        let slopes: Vec<f64> = values.windows(2).map(|w| (w[1] - w[0]) / h).collect();
        let mut jumps = Vec::with_capacity(m + 1);
        jumps.push(slopes[0]);
        for i in 1..m {
            jumps.push(slopes[i] - slopes[i - 1]);
        }
        jumps.push(-slopes[m - 1]);

        let period = 2 * m;
        let cos_table: Vec<f64> = (0..period).map(|t| (PI * t as f64 / m as f64).cos()).collect();
        let table = (0..period)
            .map(|r| {
                let mut acc = 0.0;
                let mut idx = 0usize;
                for d in &jumps {
                    acc += d * cos_table[idx];
                    idx += r;
                    if idx >= period {
                        idx %= period;
                    }
                }
                acc
            })
            .collect();
        let mean = values.windows(2).map(|w| 0.5 * (w[0] + w[1])).sum::<f64>() / m as f64;
        Self { period, table, mean }
    }

    fn coefficient(&self, j: usize) -> f64 {
        let jf = j as f64;
        -2.0 / (PI * jf * jf) * self.table[j % self.period]
    }
}

/// Number of grid periods summed when evaluating grid Sobolev norms; the
/// neglected tail is `O(J^{2τ−3})` relative to the kink content.
const GRID_NORM_PERIODS: usize = 32;

/// `( (π/2) Σ_{j≥1} (1+j²)^τ |σ̂_j|² )^{1/2}`, the `W₂^τ/{1}` norm in the cosine convention.
pub fn sobolev_norm(sigma: &SigmaFunction, tau: f64) -> Result<f64> {
    if !(0.0..MAX_SOBOLEV_INDEX).contains(&tau) {
        return Err(Error::SobolevIndex { tau });
    }
    let weighted = |j: usize, c: f64| (1.0 + (j * j) as f64).powf(tau) * c * c;
    let sum: f64 = match &sigma.repr {
        Representation::Cosine { coeffs } => coeffs.iter().enumerate().skip(1).map(|(j, &c)| weighted(j, c)).sum(),
        Representation::Grid { values } => {
            let spec = GridSpectrum::new(values);
            let j_max = GRID_NORM_PERIODS * spec.period;
            (1..=j_max).map(|j| weighted(j, spec.coefficient(j))).sum()
        }
    };
    Ok((0.5 * PI * sum).sqrt())
}

/// `‖a − b‖_τ` on the quotient space.
pub fn sobolev_distance(a: &SigmaFunction, b: &SigmaFunction, tau: f64) -> Result<f64> {
    sobolev_norm(&a.sub(b)?, tau)
}

/// Projections entering the linear part of the spectral map:
/// `∫₀^π σ(t) sin(2kt) dt` and `∫₀^π (π−t) σ(t) cos(2kt) dt` for `k = 1..=K`.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierProjections {
    pub sine: Vec<f64>,
    pub weighted_cosine: Vec<f64>,
}

pub fn fourier_projections(sigma: &SigmaFunction, k_max: usize) -> FourierProjections {
    let (panels, h) = match &sigma.repr {
        Representation::Grid { values } => {
            // split coarse cells so each panel sees at most ~1/8 of an oscillation
            let cells = values.len() - 1;
            let sub = (8 * (k_max + 1)).div_ceil(cells).max(1);
            (cells * sub, grid_step(values.len()) / sub as f64)
        }
        Representation::Cosine { coeffs } => {
            let p = (16 * (coeffs.len() + 2 * k_max)).max(256);
            (p, PI / p as f64)
        }
    };
    let mut sine = vec![0.0; k_max];
    let mut weighted_cosine = vec![0.0; k_max];
    for p in 0..panels {
        let x0 = p as f64 * h;
        for (node, w) in GL5_NODES.iter().zip(GL5_WEIGHTS.iter()) {
            let t = x0 + node * h;
            let sv = sigma.eval(t) * w * h;
            let (s2, c2) = (2.0 * t).sin_cos();
            // angle-addition recurrence for sin(2kt), cos(2kt)
            let (mut sk, mut ck) = (s2, c2);
            for k in 0..k_max {
                sine[k] += sv * sk;
                weighted_cosine[k] += (PI - t) * sv * ck;
                let next_s = sk * c2 + ck * s2;
                ck = ck * c2 - sk * s2;
                sk = next_s;
            }
        }
    }
    FourierProjections { sine, weighted_cosine }
}

/// Smoothness label of a potential `q`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Smoothness {
    /// `q ∈ W₂^θ` for the given `θ ≥ 0`.
    Theta(f64),
    /// Only the antiderivative `σ` exists as a function.
    Distributional,
}

/// Classical potential `q` (not anchored).
#[derive(Debug, Clone, PartialEq)]
pub struct PotentialQ {
    pub repr: Representation,
    pub smoothness: Smoothness,
}

impl PotentialQ {
    pub fn new(repr: Representation, smoothness: Smoothness) -> Result<Self> {
        repr.validate()?;
        Ok(Self { repr, smoothness })
    }

    pub fn constant(q0: f64) -> Self {
        Self { repr: Representation::Cosine { coeffs: vec![q0] }, smoothness: Smoothness::Theta(f64::INFINITY) }
    }

    pub fn eval(&self, x: f64) -> f64 {
        match &self.repr {
            Representation::Cosine { coeffs } => clenshaw_cos(coeffs, x),
            Representation::Grid { values } => {
                let n = values.len();
                let h = grid_step(n);
                let s = (x / h).clamp(0.0, (n - 1) as f64);
                let i = (s.floor() as usize).min(n - 2);
                let t = s - i as f64;
                values[i] + t * (values[i + 1] - values[i])
            }
        }
    }
}

/// `σ(x) = ∫₀ˣ q`. Grid potentials integrate exactly node-to-node (trapezoid on a
/// piecewise-linear integrand); cosine potentials integrate termwise and are
/// sampled on the default grid.
pub fn sigma_from_q(q: &PotentialQ) -> SigmaFunction {
    let values = match &q.repr {
        Representation::Grid { values } => {
            let h = grid_step(values.len());
            let mut acc = 0.0;
            let mut out = Vec::with_capacity(values.len());
            out.push(0.0);
            for w in values.windows(2) {
                acc += 0.5 * h * (w[0] + w[1]);
                out.push(acc);
            }
            out
        }
        Representation::Cosine { coeffs } => {
            let h = grid_step(DEFAULT_GRID_SAMPLES);
            (0..DEFAULT_GRID_SAMPLES)
                .map(|i| {
                    let x = i as f64 * h;
                    coeffs[0] * x
                        + coeffs.iter().enumerate().skip(1).map(|(j, c)| c * (j as f64 * x).sin() / j as f64).sum::<f64>()
                })
                .collect()
        }
    };
    SigmaFunction { repr: Representation::Grid { values } }
}

/// `q₀ = (σ(π) − σ(0))/π`.
pub fn q0_of(sigma: &SigmaFunction) -> f64 {
    sigma.q0()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::composite_gauss;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn sigma_of_zero_and_constant_potentials() {
        let s = sigma_from_q(&PotentialQ::constant(0.0));
        assert!(s.sample(33).iter().all(|v| *v == 0.0));
        let s = sigma_from_q(&PotentialQ::constant(2.0));
        for x in [0.0, 0.3, 1.7, PI] {
            assert!(close(s.eval(x), 2.0 * x, 1e-12));
        }
    }

    #[test]
    fn sigma_of_cos2x_matches_quadrature() {
        let q = PotentialQ::new(Representation::Cosine { coeffs: vec![0.0, 0.0, 1.0] }, Smoothness::Theta(f64::INFINITY)).unwrap();
        let s = sigma_from_q(&q);
        // nodes: independent quadrature of q
        let h = PI / (DEFAULT_GRID_SAMPLES - 1) as f64;
        for i in [0usize, 17, 512, 1300, 2047] {
            let x = i as f64 * h;
            let oracle = composite_gauss(0.0, x, 8, |t| (2.0 * t).cos());
            assert!(close(s.eval(x), oracle, 1e-12), "x={x}");
        }
        // off-node: interpolation error O(h²)
        assert!(close(s.eval(1.0001), (2.0f64 * 1.0001).sin() / 2.0, h * h));
    }

    #[test]
    fn grid_potential_integrates_exactly() {
        let q = PotentialQ::new(Representation::Grid { values: vec![1.0, 3.0, 2.0] }, Smoothness::Theta(0.0)).unwrap();
        let s = sigma_from_q(&q);
        let h = PI / 2.0;
        assert!(close(s.eval(h), 2.0 * h, 1e-14));
        assert!(close(s.eval(PI), 2.0 * h + 2.5 * h, 1e-14));
    }

    #[test]
    fn q0_examples() {
        assert_eq!(q0_of(&SigmaFunction::zero()), 0.0);
        assert!(close(q0_of(&SigmaFunction::linear(2.0)), 2.0, 1e-15));
        let s = SigmaFunction::from_fn(2048, |x| (2.0 * x).sin() / 2.0).unwrap();
        assert!(q0_of(&s).abs() < 1e-15);
    }

    #[test]
    fn anchoring_enforces_zero_at_origin() {
        let s = SigmaFunction::cosine(vec![5.0, 1.0, -0.5]).unwrap();
        assert!(s.eval(0.0).abs() < 1e-15);
        let g = SigmaFunction::grid(vec![3.0, 4.0, 5.0]).unwrap();
        assert_eq!(g.eval(0.0), 0.0);
        assert!(g.eq_modulo_constant(&SigmaFunction::grid(vec![0.0, 1.0, 2.0]).unwrap(), 1e-15));
    }

    #[test]
    fn sobolev_norm_examples() {
        assert_eq!(sobolev_norm(&SigmaFunction::zero(), 1.0).unwrap(), 0.0);
        let c = SigmaFunction::cosine(vec![0.0, 1.0]).unwrap();
        assert!(close(sobolev_norm(&c, 0.0).unwrap(), (PI / 2.0).sqrt(), 1e-14));
        assert!(close(sobolev_norm(&c, 1.0).unwrap(), 2f64.sqrt() * (PI / 2.0).sqrt(), 1e-14));
        assert!(matches!(sobolev_norm(&c, 1.5), Err(Error::SobolevIndex { .. })));
        assert!(matches!(sobolev_norm(&c, -0.1), Err(Error::SobolevIndex { .. })));
    }

    #[test]
    fn grid_coefficients_match_cosine_series() {
        let c = SigmaFunction::cosine(vec![0.0, 0.3, 0.0, -0.2, 0.1]).unwrap();
        let g = c.to_grid(4097).unwrap();
        let cg = g.cosine_coefficients(6);
        let cc = c.cosine_coefficients(6);
        for j in 1..=6 {
            assert!(close(cg[j], cc[j], 1e-6), "j={j}: {} vs {}", cg[j], cc[j]);
        }
        // grid norm agrees up to interpolation error
        let (n1, n2) = (sobolev_norm(&c, 1.0).unwrap(), sobolev_norm(&g, 1.0).unwrap());
        assert!(close(n1, n2, 1e-5));
    }

    #[test]
    fn parseval_on_grid() {
        let g = SigmaFunction::from_fn(2048, |x| (x * (PI - x)).sin() + 0.3 * x).unwrap();
        let vals = g.grid_values().unwrap().to_vec();
        let h = PI / 2047.0;
        // exact integrals of the piecewise-linear interpolant
        let mean = vals.windows(2).map(|w| 0.5 * (w[0] + w[1]) * h).sum::<f64>() / PI;
        let l2: f64 = vals
            .windows(2)
            .map(|w| {
                let (a, b) = (w[0] - mean, w[1] - mean);
                h * (a * a + a * b + b * b) / 3.0
            })
            .sum();
        let n0 = sobolev_norm(&g, 0.0).unwrap();
        assert!(close(n0 * n0, l2, 1e-8), "{} vs {}", n0 * n0, l2);
    }

    #[test]
    fn fourier_projection_examples() {
        let z = fourier_projections(&SigmaFunction::zero(), 3);
        assert!(z.sine.iter().chain(&z.weighted_cosine).all(|v| *v == 0.0));
        let s = SigmaFunction::cosine(vec![0.0]).unwrap(); // zero series
        assert_eq!(fourier_projections(&s, 1).sine[0], 0.0);
        let sin2 = SigmaFunction::from_fn(2048, |t| (2.0 * t).sin()).unwrap();
        let p = fourier_projections(&sin2, 2);
        assert!(close(p.sine[0], PI / 2.0, 1e-5));
        assert!(p.sine[1].abs() < 1e-6);
    }

    #[test]
    fn json_round_trip_and_anchor() {
        let s: SigmaFunction = serde_json::from_str(r#"{"kind":"grid","values":[1.0,2.0,4.0]}"#).unwrap();
        assert_eq!(s.grid_values().unwrap(), &[0.0, 1.0, 3.0]);
        let c: SigmaFunction = serde_json::from_str(r#"{"kind":"cosine","coeffs":[0.0,1.0]}"#).unwrap();
        assert!(c.eval(0.0).abs() < 1e-15);
        let back = serde_json::to_string(&c).unwrap();
        assert!(back.contains("\"kind\":\"cosine\""));
        assert!(serde_json::from_str::<SigmaFunction>(r#"{"kind":"grid","values":[1.0]}"#).is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn coeffs() -> impl Strategy<Value = Vec<f64>> {
            proptest::collection::vec(-1.0f64..1.0, 2..12)
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(48))]

            #[test]
            fn norm_is_monotone_in_tau(c in coeffs(), t1 in 0.0f64..1.4, dt in 0.0f64..0.5) {
                let t2 = (t1 + dt).min(1.49);
                let s = SigmaFunction::cosine(c).unwrap();
                prop_assert!(sobolev_norm(&s, t1).unwrap() <= sobolev_norm(&s, t2).unwrap() + 1e-14);
                let g = s.to_grid(257).unwrap();
                prop_assert!(sobolev_norm(&g, t1).unwrap() <= sobolev_norm(&g, t2).unwrap() + 1e-14);
            }

            #[test]
            fn norm_ignores_constant_shifts(c in coeffs(), shift in -5.0f64..5.0, tau in 0.0f64..1.4) {
                let s = SigmaFunction::cosine(c.clone()).unwrap();
                let g = SigmaFunction::grid(s.sample(129)).unwrap();
                let g_shift = SigmaFunction::grid(s.sample(129).iter().map(|v| v + shift).collect()).unwrap();
                let (a, b) = (sobolev_norm(&g, tau).unwrap(), sobolev_norm(&g_shift, tau).unwrap());
                prop_assert!((a - b).abs() <= 1e-12 * (1.0 + a));
            }

            #[test]
            fn cosine_grid_agree_at_nodes(c in coeffs()) {
                let s = SigmaFunction::cosine(c).unwrap();
                let g = s.to_grid(513).unwrap();
                let h = PI / 512.0;
                for i in (0..513).step_by(37) {
                    let x = i as f64 * h;
                    prop_assert!((s.eval(x) - g.eval(x)).abs() < 1e-12);
                }
                // midpoint interpolation error is O(h²)
                let bound: f64 = s.cosine_series().unwrap().iter().enumerate().map(|(j, a)| (j * j) as f64 * a.abs()).sum::<f64>() * h * h / 8.0;
                let x = 100.5 * h;
                prop_assert!((s.eval(x) - g.eval(x)).abs() <= bound + 1e-14);
            }
        }
    }
}
