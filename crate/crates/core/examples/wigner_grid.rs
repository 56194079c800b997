//! Writes the Wigner function of a displaced thermal state as CSV, ready for
//! any plotting tool.
//!
//! `cargo run --example wigner_grid > w.csv`

use qgls::gaussian::{displaced_thermal_state, wigner, GridAxis};
use qgls::numerics::c;

fn main() -> qgls::Result<()> {
    let state = displaced_thermal_state(c(1.0, -0.5), 0.75)?;
    let x = GridAxis::centered(1.0, 5.0, 101);
    let p = GridAxis::centered(-0.5, 5.0, 101);
    let grid = wigner(&state, 0, x, p)?;
    eprintln!("peak {:?}, grid sum {:.8}", grid.peak(), grid.riemann_sum());
    print!("{}", grid.to_csv());
    Ok(())
}
