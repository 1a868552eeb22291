//! Exact finite data to a 2N-approximation, then back through the forward
//! solver.
use slkit::inverse::{reconstruct, roundtrip_check, FiniteDataSet};
use slkit::potential::sobolev_distance;
use slkit::{forward, SigmaFunction};

fn main() -> slkit::Result<()> {
    let sigma = SigmaFunction::cosine(vec![0.5, 0.0, -0.3])?;
    for n in [4, 8, 16] {
        let data = forward::spectral_data(&sigma, n, 1e-12)?;
        let d = FiniteDataSet::from_spectral(&data, 1.0, &[]);
        let sol = reconstruct(&d)?;
        let rt = roundtrip_check(&sol.sigma, &d, 1e-5)?;
        println!(
            "N = {n:>2}: |sigma_N - sigma|_0 = {:.3e}, round trip (lambda {:.1e}, alpha {:.1e}) pass = {}",
            sobolev_distance(&sol.sigma, &sigma, 0.0)?,
            rt.lambda_residual,
            rt.alpha_residual,
            rt.pass
        );
    }

    let sol = reconstruct(&FiniteDataSet::from_spectral(&forward::spectral_data(&sigma, 8, 1e-12)?, 1.0, &[]))?;
    println!("\n{:>6} {:>12} {:>12}", "x", "sigma", "sigma_8");
    for i in 0..=8 {
        let x = i as f64 * std::f64::consts::PI / 8.0;
        println!("{x:>6.3} {:>12.6} {:>12.6}", sigma.eval(x), sol.sigma.eval(x));
    }
    Ok(())
}
