//! Norm of the incoming step packet at several times and the divergence of
//! its current at a few probes.
//!
//!     cargo run --release --example conservation

use kleinflow::diagnostics::divergence_at;
use kleinflow::packets::{norm_at_time, GaussianAmplitude, PacketField, PacketKind, DEFAULT_EDGE_FLOOR};
use kleinflow::quadrature::SpatialQuadrature;
use kleinflow::{PhysicalParams, SpacetimePoint};

fn main() -> kleinflow::Result<()> {
    let p = PhysicalParams::new(1.0, 4.0)?;
    let a = GaussianAmplitude::new(0.3, 0.1)?.profile();
    let reach = 3000.0;
    let field = PacketField::for_window(PacketKind::StepIn, &a, p, 150.0, 200.0 + reach)?;
    let spatial = SpatialQuadrature { panel_width: 2.0, nodes_per_panel: 16 };
    let n0 = field.norm_sq_kspace();
    println!("k-space ‖ψ‖² = {n0:.12}");
    for tau in [-150.0, 0.0, 150.0] {
        let (lo, hi) = field.localization_window(tau);
        let n = norm_at_time(&field, tau, (lo - reach, hi + reach), &spatial, DEFAULT_EDGE_FLOOR)?;
        println!("τ = {tau:6.0}: ∫j⁰ = {:.12}  relative deviation {:.2e}", n * n, (n * n - n0) / n0);
    }
    let probes: Vec<_> = [(-100.0, -30.0), (-10.0, -2.0), (5.0, 0.5), (50.0, 20.0), (150.0, 120.0)]
        .iter()
        .map(|&(t, x)| SpacetimePoint::new(t, x))
        .collect();
    for (pt, d) in probes.iter().zip(divergence_at(&field, &probes, 1e-3)) {
        println!("∂·j at ({:6.1}, {:6.1}) = {d:.2e}", pt.x0, pt.x1);
    }
    Ok(())
}
