//! Repeats the absorber + amplifier pipeline in a truncated photon-number
//! basis and compares with the phase-space result at several truncations.

use qgls::fock::{compare, run_pipeline_fock, CompareSpec};
use qgls::network::{self, Element, InputState, PipelineSpec};
use qgls::numerics::{c, DEFAULT_TOL};

fn main() -> qgls::Result<()> {
    let pipeline = PipelineSpec {
        modes: 1,
        omega: 1.0,
        input: InputState::Coherent {
            alpha: vec![c(3.0, 3.0)],
        },
        elements: vec![
            Element {
                device: network::loss(2.0 / 3.0)?,
                modes: vec![0],
            },
            Element {
                device: network::gain(1.5)?,
                modes: vec![0],
            },
        ],
    };
    let gaussian = network::run_pipeline(&pipeline, DEFAULT_TOL)?;
    println!(
        "{:>5} {:>11} {:>11} {:>11} {:>11} {:>11}",
        "dim", "leak", "mean", "cov", "purity", "wigner"
    );
    for dim in [40, 60, 80, 100] {
        // A loose leak bound here: the point is to watch the error shrink.
        let fock = run_pipeline_fock(&pipeline, dim, 1.0)?;
        let r = compare(&gaussian, fock.last().unwrap(), &CompareSpec::around(&gaussian, 1e-5))?;
        println!(
            "{dim:>5} {:>11.3e} {:>11.3e} {:>11.3e} {:>11.3e} {:>11.3e}",
            r.truncation.leak, r.mean_diff, r.cov_diff, r.purity_diff, r.wigner_diff
        );
    }
    Ok(())
}
