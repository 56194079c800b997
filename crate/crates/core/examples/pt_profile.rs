//! PT symmetry of sampled refractive-index profiles: `n(-x) = n*(x)`.

use qgls::network::{check_pt_profile, IndexProfile};
use qgls::numerics::c;

fn main() -> qgls::Result<()> {
    let xs: Vec<f64> = (-20..=20).map(|k| k as f64 * 0.1).collect();
    let profiles = [
        ("gain/loss pair, 1.5 + i x", IndexProfile::from_fn(&xs, |x| c(1.5, x))),
        (
            "balanced, 1.5 + x² + i sin x",
            IndexProfile::from_fn(&xs, |x| c(1.5 + x * x, x.sin())),
        ),
        (
            "loss everywhere, 1.5 + i |x|",
            IndexProfile::from_fn(&xs, |x| c(1.5, x.abs())),
        ),
        (
            "tilted, 1.5 + 0.1 x + i x",
            IndexProfile::from_fn(&xs, |x| c(1.5 + 0.1 * x, x)),
        ),
    ];
    for (name, profile) in &profiles {
        let r = check_pt_profile(profile, 1e-12)?;
        println!(
            "{name:<32} PT-symmetric: {:<5} max residual {:.3e}",
            r.pt_symmetric, r.max_residual
        );
    }
    Ok(())
}
