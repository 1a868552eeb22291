//! Driving the command-line layer from code: a config, a command and an
//! output directory.
use slkit::cli::{run, Command, RunConfig};

fn main() -> slkit::Result<()> {
    let config = RunConfig::from_json(r#"{"sigma": {"kind": "cosine", "coeffs": [0.3]}, "n": 4}"#)?;
    let out = std::env::temp_dir().join("slkit-example");
    for path in run(Command::Forward, &config, &out)? {
        println!("--- {}", path.display());
        print!("{}", std::fs::read_to_string(path).map_err(|e| slkit::Error::Io(e.to_string()))?);
    }
    Ok(())
}
