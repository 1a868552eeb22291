//! Error of the 2N-approximation against N for a potential of known
//! smoothness, with fitted log-log slopes.
use slkit::experiments::{convergence_study, reports_to_csv, SmoothnessClass, StudyOptions};

fn main() -> slkit::Result<()> {
    let theta = 1.0;
    let truth = SmoothnessClass::new(theta, 1.0, 1).generate()?;
    let reports = convergence_study(&truth, theta, &[0.0, 0.5], &[4, 8, 16, 32], &StudyOptions::default())?;
    for r in &reports {
        println!(
            "tau = {}: slope {:.3} +/- {:.3}, predicted {:.2}, pass = {}",
            r.tau,
            r.slope.unwrap_or(f64::NAN),
            r.slope_stderr.unwrap_or(f64::NAN),
            r.predicted_exponent,
            r.pass()
        );
    }
    print!("\n{}", reports_to_csv(&reports));
    Ok(())
}
