//! A coherent state through an absorber and a compensating amplifier.
//!
//! Prints the mean, covariance, purity and photon number after each stage,
//! plus the Wigner peak of each stage on a 121 x 121 grid.

use qgls::gaussian::{self, GridAxis};
use qgls::network::{self, Element, InputState, PipelineSpec};
use qgls::numerics::{c, DEFAULT_TOL};

fn main() -> qgls::Result<()> {
    let t = 2.0 / 3.0;
    let g = 1.5;
    let pipeline = PipelineSpec {
        modes: 1,
        omega: 1.0,
        input: InputState::Coherent {
            alpha: vec![c(3.0, 3.0)],
        },
        elements: vec![
            Element {
                device: network::loss(t)?,
                modes: vec![0],
            },
            Element {
                device: network::gain(g)?,
                modes: vec![0],
            },
        ],
    };
    let axis = GridAxis::new(-6.0, 6.0, 121);
    let stages = network::run_pipeline_stages(&pipeline, DEFAULT_TOL)?;
    for (k, (state, label)) in stages.iter().zip(["input", "after loss", "after gain"]).enumerate() {
        let v = state.mode_cov(0);
        let grid = gaussian::wigner(state, 0, axis, axis)?;
        let (x, p, w) = grid.peak();
        println!("stage {k} ({label})");
        println!("  mean       {:.6}", state.mean()[0]);
        println!(
            "  cov        [[{:.6}, {:.6}], [{:.6}, {:.6}]]",
            v[(0, 0)],
            v[(0, 1)],
            v[(1, 0)],
            v[(1, 1)]
        );
        println!("  purity     {:.6}", gaussian::purity(state));
        println!("  <n>        {:.6}", gaussian::mean_photon(state, 0));
        println!("  W peak     {w:.6} at ({x}, {p}), grid sum {:.8}", grid.riemann_sum());
    }
    let out = stages.last().unwrap();
    println!("thermal photons added: {:.6}", gaussian::inferred_occupation(out, 0));
    Ok(())
}
