//! Eigenvalues, norming constants and a single shooting run.
//!
//! ```text
//! cargo run --example forward_spectrum
//! ```
use slkit::forward::{self, ForwardSolver};
use slkit::potential::{sigma_from_q, PotentialQ, Representation, Smoothness};
use slkit::SigmaFunction;

fn main() -> slkit::Result<()> {
    // q(x) = cos 2x, given as a potential and integrated once
    let q = PotentialQ::new(Representation::Cosine { coeffs: vec![0.0, 0.0, 1.0] }, Smoothness::Theta(f64::INFINITY))?;
    let sigma = sigma_from_q(&q);

    let data = forward::spectral_data(&sigma, 8, 1e-12)?;
    println!("q = cos 2x, q0 = {}", data.q0);
    println!("{:>3} {:>22} {:>22}", "k", "lambda_k", "alpha_k");
    for (k, (l, a)) in data.lambdas.iter().zip(&data.alphas).enumerate() {
        println!("{:>3} {l:>22.15} {a:>22.15}", k + 1);
    }

    // the same numbers through the solver, one shot at a time
    let solver = ForwardSolver::new(&sigma);
    let shot = solver.integrate_s(data.lambdas[2])?;
    println!(
        "\nshooting at lambda_3: s(pi) = {:.2e}, {} interior zeros, int s^2 = {:.12}",
        shot.s_end, shot.oscillation_count, shot.l2_integral
    );

    // distributional potential: a jump in sigma is a delta in q
    let step = SigmaFunction::from_fn(4097, |x| if x < std::f64::consts::FRAC_PI_2 { 0.0 } else { 1.0 })?;
    let d = forward::spectral_data(&step, 4, 1e-12)?;
    println!("\nsigma = step at pi/2: lambdas {:?}", d.lambdas);
    Ok(())
}
