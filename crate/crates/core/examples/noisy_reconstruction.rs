//! Seeded perturbation of spectral data and its effect on the reconstruction.
use slkit::experiments::{perturb, AlphaNoise, NoiseSpec};
use slkit::inverse::reconstruct;
use slkit::potential::sobolev_distance;
use slkit::{forward, SigmaFunction};

fn main() -> slkit::Result<()> {
    let sigma = SigmaFunction::cosine(vec![0.3, 0.2])?;
    let data = forward::spectral_data(&sigma, 12, 1e-12)?;
    for eps in [0.0, 1e-4, 1e-3, 1e-2] {
        let noise = NoiseSpec::new(eps, 11)?.with_alpha_noise(AlphaNoise::Absolute);
        let d = perturb(&data, &noise, 1.0, &[])?;
        let sol = reconstruct(&d)?;
        println!("eps = {eps:.0e}: error = {:.3e}", sobolev_distance(&sol.sigma, &sigma, 0.0)?);
    }
    // same seed, same data
    let spec = NoiseSpec::new(0.05, 3)?;
    assert_eq!(perturb(&data, &spec, 1.0, &[])?, perturb(&data, &spec, 1.0, &[])?);
    println!("seeded perturbation is reproducible");
    Ok(())
}
