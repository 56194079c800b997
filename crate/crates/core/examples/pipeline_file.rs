//! Runs a JSON pipeline file through the same entry points as the `qgls`
//! binary, with a two-mode beam splitter followed by amplification of one
//! output port.

use qgls::cli::{cmd_oracle, cmd_simulate, TemperatureOptions};
use qgls::numerics::DEFAULT_TOL;

const PIPELINE: &str = r#"{
  "modes": 2,
  "input": { "kind": "displaced_thermal", "alpha": [[1.0, 0.0], [0.0, 0.5]], "nbar": [0.2, 0.0] },
  "elements": [
    { "kind": "loss", "t": 0.8, "modes": [1] },
    { "kind": "gain", "g": 1.2, "modes": [0] }
  ]
}"#;

fn main() {
    match cmd_simulate(PIPELINE, TemperatureOptions::default(), DEFAULT_TOL) {
        Ok(report) => println!("{}", serde_json::to_string_pretty(&report).unwrap()),
        Err(e) => {
            eprintln!("{e}");
            std::process::exit(e.exit_code());
        }
    }
    match cmd_oracle(PIPELINE, 32, 1e-6, DEFAULT_TOL) {
        Ok(r) => println!(
            "Fock-space check at dim 32: passed = {} (purity diff {:.2e})",
            r.passed, r.purity_diff
        ),
        Err(e) => eprintln!("oracle: {e}"),
    }
}
