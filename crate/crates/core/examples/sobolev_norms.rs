//! Sobolev norms from cosine coefficients, for series and grid samples.
use slkit::potential::{sobolev_distance, sobolev_norm};
use slkit::SigmaFunction;

fn main() -> slkit::Result<()> {
    let series = SigmaFunction::cosine(vec![0.0, 1.0, 0.5])?;
    let grid = SigmaFunction::from_fn(2048, |x| series.eval(x))?;
    for tau in [0.0, 0.5, 1.0, 1.25] {
        println!(
            "tau = {tau}: series {:.10}, grid {:.10}",
            sobolev_norm(&series, tau)?,
            sobolev_norm(&grid, tau)?
        );
    }
    // indices at or above 3/2 are rejected
    assert!(sobolev_norm(&series, 1.5).is_err());
    println!("|sigma - sigma/2|_1 = {:.10}", sobolev_distance(&series, &series.scaled(0.5), 1.0)?);
    Ok(())
}
