//! Error against noise level, at a fixed N and along the rule that balances
//! truncation against noise.
use slkit::experiments::{noise_floor_study, AlphaNoise, NRule, SmoothnessClass, StudyOptions};

fn main() -> slkit::Result<()> {
    let theta = 1.25;
    let truth = SmoothnessClass::new(theta, 0.01, 3).generate()?;
    let opts = StudyOptions::default();
    let runs = [
        (0.25, NRule::Fixed { n: 32 }, vec![1e-2, 3e-3, 1e-3, 3e-4, 1e-4], AlphaNoise::Absolute),
        (0.75, NRule::Corollary, vec![0.2, 0.1, 0.05, 0.025], AlphaNoise::PerIndex),
    ];
    for (tau, rule, eps, mode) in runs {
        let r = noise_floor_study(&truth, theta, tau, &eps, rule, 9, mode, &opts)?;
        println!("tau = {tau}, {rule:?}");
        for row in &r.rows {
            println!("  eps = {:.1e}  N = {:>3}  error = {:.3e}", row.epsilon, row.n, row.error);
        }
        println!("  slope {:.3} (predicted {:.3})", r.slope.unwrap_or(f64::NAN), r.predicted_exponent);
    }
    Ok(())
}
