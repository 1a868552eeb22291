//! Regularized spectral data, the admissible set check and the residual of
//! the linearization.
use slkit::forward;
use slkit::spectral_data::{admissible_gap, check_omega, phi_residual, regularize, s_map, RegularizedSequence, weighted_norm, OmegaParams};
use slkit::SigmaFunction;

fn main() -> slkit::Result<()> {
    let sigma = SigmaFunction::cosine(vec![0.4, -0.2, 0.1])?.plus_linear(2.0)?;
    let data = forward::spectral_data(&sigma, 10, 1e-12)?;
    let theta = 1.0;
    let seq = regularize(&data, theta, &[])?;
    println!("c = {:?}", seq.c);
    print!("{}", seq.to_csv());

    let gap = admissible_gap(&seq);
    let norm = weighted_norm(&seq, theta);
    let verdict = check_omega(&seq, &OmegaParams::new(2.0 * norm, gap / 2.0, theta)?);
    println!("largest h = {gap:.4}, weighted norm = {norm:.4}, admissible = {}", verdict.admissible);

    // α_4 = −0.1 and look at the violation
    let mut entries = seq.entries.clone();
    entries[6] = -0.1 - std::f64::consts::FRAC_PI_2;
    let bad = RegularizedSequence::from_entries(entries, theta, seq.c.clone());
    for v in check_omega(&bad, &OmegaParams::new(1e3, 0.1, theta)?).violations {
        println!("violation: {} at k = {} (value {:.4})", v.condition, v.k, v.value);
    }

    // S is the linear part of the data map; Φ is what is left over
    let s = s_map(&sigma, 4);
    let phi = phi_residual(&sigma, 4, 1e-12)?;
    for (p, (a, b)) in s.iter().zip(&phi).enumerate() {
        println!("position {:>2}: (S sigma) = {a:>12.6}  Phi = {b:>12.3e}", p + 1);
    }
    Ok(())
}
