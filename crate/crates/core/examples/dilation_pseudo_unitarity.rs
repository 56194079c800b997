//! Builds the field+device dilation of a random two-port absorber and
//! amplifier and checks `Λ J Λ⁺ = J`.
//!
//! Run with a seed to try other devices: `cargo run --example
//! dilation_pseudo_unitarity -- 7`.

use qgls::device::{dilation, gain_device, loss_device, validate_device};
use qgls::numerics::{c, ComplexMatrix, DEFAULT_TOL};

/// Small deterministic generator, enough to vary the matrices.
fn lcg(state: &mut u64) -> f64 {
    *state = state
        .wrapping_mul(6364136223846793005)
        .wrapping_add(1442695040888963407);
    ((*state >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
}

fn main() -> qgls::Result<()> {
    let mut seed: u64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(1);
    let m = ComplexMatrix::from_fn(2, 2, |_, _| c(lcg(&mut seed), lcg(&mut seed)));
    let norm = qgls::numerics::spectral_norm(&m);

    // Rescale the same matrix into an absorber and an amplifier.
    let absorber = loss_device(&m.scale(0.9 / norm), DEFAULT_TOL)?;
    let smallest = qgls::numerics::singular_values(&m)
        .into_iter()
        .fold(f64::INFINITY, f64::min);
    let amplifier = gain_device(&m.scale(1.2 / smallest), DEFAULT_TOL)?;

    for (name, spec) in [("absorber", absorber), ("amplifier", amplifier)] {
        let report = validate_device(&spec, DEFAULT_TOL)?;
        let d = dilation(&spec, DEFAULT_TOL)?;
        println!(
            "{name}: singular values in [{:.4}, {:.4}]",
            report.min_singular, report.max_singular
        );
        println!("  constraint residual     {:.3e}", report.residual);
        println!("  |Λ J Λ⁺ - J|            {:.3e}", d.pseudo_unitarity_residual());
        println!("  |Λ⁻¹ - J Λ⁺ J|          {:.3e}", d.inversion_residual());
    }
    Ok(())
}
