//! Config-driven dispatch for the `slkit` binary.
//!
//! Every command reads a JSON [`RunConfig`], writes its artifacts into the
//! output directory and maps failures to exit codes: 0 on success, 2 for
//! validation errors and 3 for solver failures.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::experiments::{
    asymptotic_functionals, convergence_study, noise_floor_study, perturb, reports_to_csv, AlphaNoise, NRule,
    NoiseSpec, RateReport, SmoothnessClass, StudyOptions, TruthPotential,
};
use crate::forward;
use crate::inverse::{reconstruct, roundtrip_check, FiniteDataSet};
use crate::potential::{sigma_from_q, PotentialQ, Representation, SigmaFunction, Smoothness};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_SOLVER: i32 = 3;

/// Environment variable consulted when `--threads` is absent.
pub const THREADS_ENV: &str = "SLKIT_THREADS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Forward,
    Invert,
    Perturb,
    Rates,
    Noise,
    Asymptotics,
    Roundtrip,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Forward => "forward",
            Command::Invert => "invert",
            Command::Perturb => "perturb",
            Command::Rates => "rates",
            Command::Noise => "noise",
            Command::Asymptotics => "asymptotics",
            Command::Roundtrip => "roundtrip",
        }
    }
}

/// Parameters of a generated reference potential.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorConfig {
    pub theta: f64,
    #[serde(default = "one")]
    pub amplitude: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_terms")]
    pub terms: usize,
}

fn one() -> f64 {
    1.0
}

fn default_terms() -> usize {
    512
}

fn default_tol() -> f64 {
    1e-12
}

fn default_roundtrip_tol() -> f64 {
    1e-5
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Optional; must agree with the subcommand when present.
    #[serde(default)]
    pub command: Option<Command>,
    /// `σ` inline.
    #[serde(default)]
    pub sigma: Option<SigmaFunction>,
    /// Classical potential `q` inline; converted to `σ`.
    #[serde(default)]
    pub q: Option<Representation>,
    /// Path to a `σ` JSON file.
    #[serde(default)]
    pub sigma_path: Option<PathBuf>,
    /// Finite data set inline.
    #[serde(default)]
    pub data: Option<FiniteDataSet>,
    /// Path to a finite data set JSON file.
    #[serde(default)]
    pub data_path: Option<PathBuf>,
    /// Generated reference potential for `rates` and `noise`.
    #[serde(default)]
    pub generator: Option<GeneratorConfig>,
    #[serde(default)]
    pub n: Option<usize>,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_roundtrip_tol")]
    pub roundtrip_tol: f64,
    #[serde(default)]
    pub theta: Option<f64>,
    /// Expansion coefficients beyond `c₁`.
    #[serde(default)]
    pub c: Vec<f64>,
    #[serde(default)]
    pub taus: Vec<f64>,
    #[serde(default)]
    pub tau: Option<f64>,
    #[serde(default)]
    pub ns: Vec<usize>,
    #[serde(default)]
    pub epsilon: Option<f64>,
    #[serde(default)]
    pub epsilons: Vec<f64>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub alpha_noise: AlphaNoise,
    #[serde(default)]
    pub n_rule: Option<NRule>,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidInput(format!("malformed config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::Io(format!("cannot read config {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0) || !(self.roundtrip_tol > 0.0) {
            return Err(Error::InvalidInput("tolerances must be positive".into()));
        }
        if self.n == Some(0) || self.ns.contains(&0) {
            return Err(Error::InvalidInput("N must be at least 1".into()));
        }
        Ok(())
    }

    fn sigma(&self) -> Result<SigmaFunction> {
        let given = [self.sigma.is_some(), self.q.is_some(), self.sigma_path.is_some()].iter().filter(|b| **b).count();
        if given > 1 {
            return Err(Error::InvalidInput("give exactly one of sigma, q, sigma_path".into()));
        }
        if let Some(s) = &self.sigma {
            return Ok(s.clone());
        }
        if let Some(q) = &self.q {
            let q = PotentialQ::new(q.clone(), Smoothness::Distributional)?;
            return Ok(sigma_from_q(&q));
        }
        if let Some(p) = &self.sigma_path {
            return read_json(p);
        }
        Err(Error::InvalidInput("missing sigma (sigma, q or sigma_path)".into()))
    }

    fn data(&self) -> Result<FiniteDataSet> {
        match (&self.data, &self.data_path) {
            (Some(_), Some(_)) => Err(Error::InvalidInput("give either data or data_path".into())),
            (Some(d), None) => Ok(d.clone()),
            (None, Some(p)) => read_json(p),
            (None, None) => Err(Error::InvalidInput("missing data (data or data_path)".into())),
        }
    }

    fn need_n(&self) -> Result<usize> {
        self.n.ok_or_else(|| Error::InvalidInput("missing n".into()))
    }

    fn need_theta(&self) -> Result<f64> {
        self.theta.or(self.generator.map(|g| g.theta)).ok_or_else(|| Error::InvalidInput("missing theta".into()))
    }

    fn has_sigma(&self) -> bool {
        self.sigma.is_some() || self.q.is_some() || self.sigma_path.is_some()
    }

    fn truth(&self) -> Result<TruthPotential> {
        match (&self.generator, self.has_sigma()) {
            (Some(_), true) => Err(Error::InvalidInput("give either a generator or a sigma".into())),
            (Some(g), false) => {
                SmoothnessClass { theta: g.theta, amplitude: g.amplitude, terms: g.terms, delta: 0.01, seed: g.seed }
                    .generate()
            }
            (None, _) => TruthPotential::from_sigma(self.sigma()?),
        }
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|e| Error::Io(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::InvalidInput(format!("malformed {}: {e}", path.display())))
}

fn write(dir: &Path, name: &str, contents: &str) -> Result<PathBuf> {
    let path = dir.join(name);
    fs::write(&path, contents).map_err(|e| Error::Io(format!("cannot write {}: {e}", path.display())))?;
    Ok(path)
}

fn to_json<T: Serialize>(v: &T) -> Result<String> {
    serde_json::to_string_pretty(v).map(|s| s + "\n").map_err(|e| Error::Io(e.to_string()))
}

/// Exit code for an error.
pub fn exit_code(e: &Error) -> i32 {
    if e.is_solver_failure() {
        EXIT_SOLVER
    } else {
        EXIT_VALIDATION
    }
}

/// Thread count from the flag, else the environment, else one.
pub fn resolve_threads(flag: Option<usize>, env: Option<&str>) -> Result<usize> {
    let n = match (flag, env) {
        (Some(n), _) => n,
        (None, Some(v)) => v
            .trim()
            .parse::<usize>()
            .map_err(|_| Error::InvalidInput(format!("{THREADS_ENV} must be a positive integer, got {v:?}")))?,
        (None, None) => 1,
    };
    if n == 0 {
        return Err(Error::InvalidInput("thread count must be at least 1".into()));
    }
    Ok(n)
}

/// Run `command` and return the written artifact paths.
pub fn run(command: Command, config: &RunConfig, out: &Path) -> Result<Vec<PathBuf>> {
    config.validate()?;
    if let Some(c) = config.command {
        if c != command {
            return Err(Error::InvalidInput(format!(
                "config is for `{}` but `{}` was requested",
                c.name(),
                command.name()
            )));
        }
    }
    fs::create_dir_all(out).map_err(|e| Error::Io(format!("cannot create {}: {e}", out.display())))?;
    match command {
        Command::Forward => run_forward(config, out),
        Command::Invert => run_invert(config, out),
        Command::Perturb => run_perturb(config, out),
        Command::Rates => run_rates(config, out),
        Command::Noise => run_noise(config, out),
        Command::Asymptotics => run_asymptotics(config, out),
        Command::Roundtrip => run_roundtrip(config, out),
    }
}

fn run_forward(config: &RunConfig, out: &Path) -> Result<Vec<PathBuf>> {
    let sigma = config.sigma()?;
    let data = forward::spectral_data(&sigma, config.need_n()?, config.tol)?;
    let mut csv = String::from("k,lambda,alpha\n");
    for (k, (l, a)) in data.lambdas.iter().zip(&data.alphas).enumerate() {
        let _ = writeln!(csv, "{},{:.17e},{:.17e}", k + 1, l, a);
    }
    Ok(vec![write(out, "forward.csv", &csv)?, write(out, "spectral_data.json", &to_json(&data)?)?])
}

fn run_invert(config: &RunConfig, out: &Path) -> Result<Vec<PathBuf>> {
    let data = config.data()?;
    let sol = reconstruct(&data)?;
    let report = roundtrip_check(&sol.sigma, &data, config.roundtrip_tol)?;
    Ok(vec![write(out, "sigma.json", &to_json(&sol.sigma)?)?, write(out, "roundtrip.json", &to_json(&report)?)?])
}

fn run_perturb(config: &RunConfig, out: &Path) -> Result<Vec<PathBuf>> {
    let sigma = config.sigma()?;
    let theta = config.need_theta()?;
    let eps = config.epsilon.ok_or_else(|| Error::InvalidInput("missing epsilon".into()))?;
    let data = forward::spectral_data(&sigma, config.need_n()?, config.tol)?;
    let noise = NoiseSpec::new(eps, config.seed)?.with_alpha_noise(config.alpha_noise);
    let noisy = perturb(&data, &noise, theta, &config.c)?;
    Ok(vec![write(out, "data.json", &to_json(&noisy)?)?])
}

fn run_rates(config: &RunConfig, out: &Path) -> Result<Vec<PathBuf>> {
    let theta = config.need_theta()?;
    let truth = config.truth()?;
    let taus = if config.taus.is_empty() { vec![0.0] } else { config.taus.clone() };
    let ns = if config.ns.is_empty() { vec![4, 8, 16, 32, 64] } else { config.ns.clone() };
    let opts = StudyOptions { tol: config.tol, ..StudyOptions::default() };
    let reports = convergence_study(&truth, theta, &taus, &ns, &opts)?;
    Ok(vec![
        write(out, "rates.csv", &reports_to_csv(&reports))?,
        write(out, "rates.svg", &loglog_svg(&reports, "error vs N"))?,
    ])
}

fn run_noise(config: &RunConfig, out: &Path) -> Result<Vec<PathBuf>> {
    let theta = config.need_theta()?;
    let truth = config.truth()?;
    let tau = config.tau.ok_or_else(|| Error::InvalidInput("missing tau".into()))?;
    if config.epsilons.is_empty() {
        return Err(Error::InvalidInput("missing epsilons".into()));
    }
    let rule = config.n_rule.unwrap_or(NRule::Fixed { n: config.n.unwrap_or(64) });
    let opts = StudyOptions { tol: config.tol, ..StudyOptions::default() };
    let report =
        noise_floor_study(&truth, theta, tau, &config.epsilons, rule, config.seed, config.alpha_noise, &opts)?;
    let reports = [report];
    Ok(vec![
        write(out, "noise.csv", &reports_to_csv(&reports))?,
        write(out, "noise.svg", &loglog_svg(&reports, "error vs epsilon"))?,
    ])
}

fn run_asymptotics(config: &RunConfig, out: &Path) -> Result<Vec<PathBuf>> {
    let sigma = config.sigma()?;
    let f = asymptotic_functionals(&sigma)?;
    let n = config.n.unwrap_or(32);
    let data = forward::spectral_data(&sigma, n, config.tol)?;
    let mut csv = String::from("k,sqrt_lambda,predicted_sqrt_lambda,residual,alpha,predicted_alpha,alpha_residual\n");
    for k in 1..=n {
        let (root, alpha) = (data.lambdas[k - 1].max(0.0).sqrt(), data.alphas[k - 1]);
        let (pr, pa) = (f.sqrt_lambda(k), f.alpha(k));
        let _ = writeln!(
            csv,
            "{k},{root:.17e},{pr:.17e},{:.17e},{alpha:.17e},{pa:.17e},{:.17e}",
            root - pr,
            alpha - pa
        );
    }
    Ok(vec![write(out, "asymptotics.json", &to_json(&f)?)?, write(out, "asymptotics.csv", &csv)?])
}

fn run_roundtrip(config: &RunConfig, out: &Path) -> Result<Vec<PathBuf>> {
    let sigma = config.sigma()?;
    let (sigma_tilde, data) = if config.data.is_some() || config.data_path.is_some() {
        // check the given σ̃ against measured data
        (sigma, config.data()?)
    } else {
        let theta = config.need_theta()?;
        let exact = forward::spectral_data(&sigma, config.need_n()?, config.tol)?;
        let data = FiniteDataSet::from_spectral(&exact, theta, &config.c);
        (reconstruct(&data)?.sigma, data)
    };
    let report = roundtrip_check(&sigma_tilde, &data, config.roundtrip_tol)?;
    Ok(vec![
        write(out, "sigma.json", &to_json(&sigma_tilde)?)?,
        write(out, "roundtrip.json", &to_json(&report)?)?,
    ])
}

/// Log-log plot of each report's rows with its fitted line.
pub fn loglog_svg(reports: &[RateReport], title: &str) -> String {
    const W: f64 = 480.0;
    const H: f64 = 360.0;
    const M: f64 = 48.0;
    const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];
    let x_of = |r: &RateReport, row: &crate::experiments::RateRow| match r.sweep {
        crate::experiments::Sweep::N => row.n as f64,
        crate::experiments::Sweep::Epsilon => row.epsilon,
    };
    let pts: Vec<(f64, f64)> = reports
        .iter()
        .flat_map(|r| r.rows.iter().map(move |row| (x_of(r, row), row.error)))
        .filter(|(x, y)| *x > 0.0 && *y > 0.0)
        .map(|(x, y)| (x.log10(), y.log10()))
        .collect();
    let mut svg = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" viewBox=\"0 0 {W} {H}\">\n\
         <rect width=\"{W}\" height=\"{H}\" fill=\"white\"/>\n\
         <text x=\"{}\" y=\"20\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">{title} (log-log)</text>\n",
        W / 2.0
    );
    if pts.is_empty() {
        svg.push_str("</svg>\n");
        return svg;
    }
    let (mut x0, mut x1, mut y0, mut y1) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
    for (x, y) in &pts {
        x0 = x0.min(*x);
        x1 = x1.max(*x);
        y0 = y0.min(*y);
        y1 = y1.max(*y);
    }
    if x1 - x0 < 1e-12 {
        x0 -= 0.5;
        x1 += 0.5;
    }
    if y1 - y0 < 1e-12 {
        y0 -= 0.5;
        y1 += 0.5;
    }
    let px = |x: f64| M + (x - x0) / (x1 - x0) * (W - 2.0 * M);
    let py = |y: f64| H - M - (y - y0) / (y1 - y0) * (H - 2.0 * M);
    let _ = writeln!(
        svg,
        "<path d=\"M{M} {M} V{} H{}\" fill=\"none\" stroke=\"black\"/>",
        H - M,
        W - M
    );
    let _ = writeln!(
        svg,
        "<text x=\"{M}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"10\">{x0:.2}</text>\
         <text x=\"{}\" y=\"{}\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">{x1:.2}</text>\
         <text x=\"4\" y=\"{}\" font-family=\"sans-serif\" font-size=\"10\">{y0:.2}</text>\
         <text x=\"4\" y=\"{M}\" font-family=\"sans-serif\" font-size=\"10\">{y1:.2}</text>",
        H - M + 14.0,
        W - M,
        H - M + 14.0,
        H - M
    );
    for (i, r) in reports.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let mine: Vec<(f64, f64)> = r
            .rows
            .iter()
            .map(|row| (x_of(r, row), row.error))
            .filter(|(x, y)| *x > 0.0 && *y > 0.0)
            .map(|(x, y)| (x.log10(), y.log10()))
            .collect();
        let poly: Vec<String> = mine.iter().map(|(x, y)| format!("{:.3},{:.3}", px(*x), py(*y))).collect();
        let _ = writeln!(svg, "<polyline points=\"{}\" fill=\"none\" stroke=\"{color}\"/>", poly.join(" "));
        for (x, y) in &mine {
            let _ = writeln!(svg, "<circle cx=\"{:.3}\" cy=\"{:.3}\" r=\"3\" fill=\"{color}\"/>", px(*x), py(*y));
        }
        if let Some(slope) = r.slope {
            let fitted: Vec<&(f64, f64)> =
                mine.iter().zip(&r.rows).filter(|(_, row)| !row.floor).map(|(p, _)| p).collect();
            if !fitted.is_empty() {
                let n = fitted.len() as f64;
                let mx = fitted.iter().map(|p| p.0).sum::<f64>() / n;
                let my = fitted.iter().map(|p| p.1).sum::<f64>() / n;
                let (a, b) = (fitted.iter().map(|p| p.0).fold(f64::MAX, f64::min), fitted.iter().map(|p| p.0).fold(f64::MIN, f64::max));
                let _ = writeln!(
                    svg,
                    "<line x1=\"{:.3}\" y1=\"{:.3}\" x2=\"{:.3}\" y2=\"{:.3}\" stroke=\"{color}\" stroke-dasharray=\"4 3\"/>",
                    px(a),
                    py(my + slope * (a - mx)),
                    px(b),
                    py(my + slope * (b - mx))
                );
            }
        }
        let label = format!(
            "tau={} slope={}",
            r.tau,
            r.slope.map_or_else(|| "n/a".to_string(), |s| format!("{s:.3}"))
        );
        let _ = writeln!(
            svg,
            "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"11\" fill=\"{color}\">{label}</text>",
            W - M - 150.0,
            M + 14.0 * i as f64
        );
    }
    svg.push_str("</svg>\n");
    svg
}

/// Closed-form spectral data of the constant potential `q ≡ q0`, `k ≤ n`.
pub fn constant_potential_data(q0: f64, n: usize) -> FiniteDataSet {
    FiniteDataSet {
        q0,
        c: vec![q0],
        lambdas: (1..=n).map(|k| (k * k) as f64 + q0).collect(),
        alphas: (1..=n).map(|k| PI / 2.0 + PI * q0 / (2 * k * k) as f64).collect(),
        theta: 1.0,
        shift: 0.0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn threads_resolution() {
        assert_eq!(resolve_threads(Some(3), Some("8")).unwrap(), 3);
        assert_eq!(resolve_threads(None, Some("8")).unwrap(), 8);
        assert_eq!(resolve_threads(None, None).unwrap(), 1);
        assert!(resolve_threads(None, Some("x")).is_err());
        assert!(resolve_threads(Some(0), None).is_err());
    }

    #[test]
    fn config_rejects_unknown_fields_and_bad_tol() {
        assert!(RunConfig::from_json(r#"{"bogus": 1}"#).is_err());
        let c = RunConfig::from_json(r#"{"tol": -1, "n": 2, "sigma": {"kind":"grid","values":[0,0]}}"#).unwrap();
        let dir = tempfile::tempdir().unwrap();
        assert!(matches!(run(Command::Forward, &c, dir.path()), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn command_mismatch_is_a_validation_error() {
        let c = RunConfig::from_json(r#"{"command": "invert", "n": 2}"#).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let e = run(Command::Forward, &c, dir.path()).unwrap_err();
        assert_eq!(exit_code(&e), EXIT_VALIDATION);
    }

    #[test]
    fn solver_failures_map_to_three() {
        assert_eq!(exit_code(&Error::IllPosed { x: 1.0 }), EXIT_SOLVER);
        assert_eq!(exit_code(&Error::Io("x".into())), EXIT_VALIDATION);
    }

    #[test]
    fn svg_contains_polyline_and_fit() {
        let truth = TruthPotential::from_cosine(vec![0.3, -0.1]).unwrap();
        let reps = convergence_study(&truth, 1.0, &[0.0], &[2, 3, 4, 5], &StudyOptions::default()).unwrap();
        let svg = loglog_svg(&reps, "t");
        assert!(svg.contains("<polyline"));
        assert!(svg.contains("stroke-dasharray"));
        assert!(svg.trim_end().ends_with("</svg>"));
    }
}
