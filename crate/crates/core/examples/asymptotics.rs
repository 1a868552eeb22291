//! Leading terms of the eigenvalue and norming-constant asymptotics compared
//! with the forward solver.
use slkit::experiments::asymptotic_functionals;
use slkit::{forward, SigmaFunction};

fn main() -> slkit::Result<()> {
    let sigma = SigmaFunction::cosine(vec![0.0, 0.25, 0.0, -0.1])?;
    let f = asymptotic_functionals(&sigma)?;
    println!("h0 = {:.6}, g1 = {:.6}, h1 = {:.6}", f.h0, f.g1, f.h1);
    let data = forward::spectral_data(&sigma, 32, 1e-13)?;
    println!("{:>3} {:>14} {:>14}", "k", "sqrt-residual", "alpha-residual");
    for k in [4, 8, 16, 32] {
        let dl = data.lambdas[k - 1].sqrt() - f.sqrt_lambda(k);
        let da = data.alphas[k - 1] - f.alpha(k);
        println!("{k:>3} {dl:>14.3e} {da:>14.3e}");
    }
    Ok(())
}
