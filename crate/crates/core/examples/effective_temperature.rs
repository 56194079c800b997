//! Noise temperature of an amplifier that compensates a loss `t`.
//!
//! Compares the Bose-Einstein-consistent temperature with the variant that
//! puts the logarithm in the numerator, and shows a 5 GHz mode in kelvin.

use qgls::network::{bose_einstein, effective_temperature, effective_temperature_log_factor, Units};

fn main() -> qgls::Result<()> {
    println!(
        "{:>6} {:>10} {:>12} {:>12} {:>12}",
        "t", "n_th", "T_eff", "BE(T_eff)", "log-factor"
    );
    for t in [0.1, 0.3, 0.5, 2.0 / 3.0, 0.9, 0.99] {
        let n_th = 1.0 / (t * t) - 1.0;
        let temp = effective_temperature(t, 1.0, Units::Natural)?;
        let alt = effective_temperature_log_factor(t, 1.0, Units::Natural)?;
        let back = bose_einstein(1.0, temp, Units::Natural);
        println!("{t:>6.3} {n_th:>10.5} {temp:>12.6} {back:>12.6} {alt:>12.6}");
    }
    let omega = 2.0 * std::f64::consts::PI * 5e9;
    let kelvin = effective_temperature(2.0 / 3.0, omega, Units::Si)?;
    println!("5 GHz, t = 2/3: {kelvin:.6} K");
    Ok(())
}
