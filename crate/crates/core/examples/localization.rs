//! Probability of a free Gaussian packet inside the expanding interval
//! τ·[v₁, v₂] that brackets its group velocities.
//!
//!     cargo run --example localization

use kleinflow::diagnostics::{default_velocity_bounds, localization_sweep};
use kleinflow::packets::{GaussianAmplitude, PacketField, PacketKind};
use kleinflow::quadrature::SpatialQuadrature;
use kleinflow::PhysicalParams;

fn main() -> kleinflow::Result<()> {
    let p = PhysicalParams::new(1.0, 4.0)?;
    let a = GaussianAmplitude::new(0.3, 0.1)?.profile();
    let field = PacketField::for_window(PacketKind::FreeU, &a, p, 600.0, 600.0)?;
    let (lo, hi) = field.velocity_hull();
    let (v1, v2) = default_velocity_bounds(&field);
    println!("group velocities [{lo:.4}, {hi:.4}], bounds with 10% slack [{v1:.4}, {v2:.4}]");
    let spatial = SpatialQuadrature { panel_width: 2.0, nodes_per_panel: 16 };
    let taus = [-600.0, -300.0, -150.0, -50.0, 50.0, 150.0, 300.0, 600.0];
    for (bounds, label) in [((v1, v2), "default"), ((0.09, 0.46), "fixed")] {
        println!("{label} bounds [{:.3}, {:.3}]", bounds.0, bounds.1);
        for r in localization_sweep(&field, &taus, bounds.0, bounds.1, &spatial)? {
            println!(
                "  τ = {:6.0}  interval [{:8.2}, {:8.2}]  mass {:.6}",
                r.tau, r.interval.0, r.interval.1, r.mass_fraction
            );
        }
    }
    Ok(())
}
