//! Oracles shared by the integration and acceptance tests.
#![allow(dead_code)]

use num_complex::Complex64;
use qgls::fock::{
    compare, displaced_thermal_fock, gain_channel_fock, loss_channel_fock, CompareSpec, ComparisonReport,
};
use qgls::gaussian::{apply_device, displaced_thermal_state};
use qgls::network;
use qgls::numerics::{c, DEFAULT_TOL};

#[derive(Clone, Copy, Debug)]
pub enum Channel {
    Loss(f64),
    Gain(f64),
}

/// Runs one channel on a displaced thermal input in both representations.
pub fn run_both(alpha: Complex64, nbar: f64, ch: Channel, dim: usize, tol: f64) -> ComparisonReport {
    let g = displaced_thermal_state(alpha, nbar).unwrap();
    let f = displaced_thermal_fock(alpha, nbar, dim).unwrap();
    let (dev, fo) = match ch {
        Channel::Loss(t) => (network::loss(t).unwrap(), loss_channel_fock(&f, t, 0, 1.0).unwrap()),
        Channel::Gain(k) => (network::gain(k).unwrap(), gain_channel_fock(&f, k, 0, 1.0).unwrap()),
    };
    let go = apply_device(&g, &dev, &[0], DEFAULT_TOL).unwrap();
    compare(&go, &fo, &CompareSpec::around(&go, tol)).unwrap()
}

/// Photon-number distribution of a displaced thermal state, from its
/// Laguerre-polynomial closed form.
pub fn displaced_thermal_distribution(alpha2: f64, nbar: f64, count: usize) -> Vec<f64> {
    if nbar == 0.0 {
        // Poisson.
        let mut p = vec![(-alpha2).exp()];
        for n in 1..count {
            p.push(p[n - 1] * alpha2 / n as f64);
        }
        return p;
    }
    let ratio = nbar / (1.0 + nbar);
    let x = -alpha2 / (nbar * (1.0 + nbar));
    let (mut prev, mut cur) = (0.0, 1.0);
    let mut out = Vec::with_capacity(count);
    for n in 0..count {
        if n > 0 {
            let next = ((2 * n - 1) as f64 - x) * cur / n as f64 - (n - 1) as f64 * prev / n as f64;
            prev = cur;
            cur = next;
        }
        out.push((-alpha2 / (1.0 + nbar)).exp() / (1.0 + nbar) * ratio.powi(n as i32) * cur);
    }
    out
}

/// Probability beyond the truncation for the exact channel output, which is
/// again a displaced thermal state.
pub fn output_tail(alpha: Complex64, nbar: f64, ch: Channel, dim: usize) -> f64 {
    let (amp, noise) = match ch {
        Channel::Loss(t) => (t, t * t * nbar),
        Channel::Gain(g) => (g, g * g * nbar + g * g - 1.0),
    };
    let p = displaced_thermal_distribution(amp * amp * alpha.norm_sqr(), noise, dim);
    (1.0 - p.iter().sum::<f64>()).max(0.0)
}

/// Inputs with at most six photons on average whose channel output fits in
/// 40 levels up to a tail of 1e-10.
pub fn small_cases() -> Vec<(Complex64, f64, Channel)> {
    let inputs = [
        (c(0.0, 0.0), 0.0),
        (c(1.0, 0.0), 0.0),
        (c(0.0, -2.0), 0.0),
        (c(1.5, 1.0), 0.0),
        (c(1.7, 1.7), 0.0),
        (c(1.0, -1.0), 0.5),
    ];
    let channels = [
        Channel::Loss(0.3),
        Channel::Loss(2.0 / 3.0),
        Channel::Loss(0.9),
        Channel::Gain(1.1),
        Channel::Gain(1.2),
        Channel::Gain(1.5),
    ];
    let mut out = Vec::new();
    for (a, n) in inputs {
        for ch in channels {
            if a.norm_sqr() + n <= 6.0 && output_tail(a, n, ch, 40) < 1e-10 {
                out.push((a, n, ch));
            }
        }
    }
    out
}
