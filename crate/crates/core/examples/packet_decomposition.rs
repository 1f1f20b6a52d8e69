//! The incoming step packet splits into incoming + reflected free packets
//! on x¹ < 0 and a phase-shifted negative-frequency packet on x¹ ≥ 0.
//!
//!     cargo run --example packet_decomposition

use num_complex::Complex64;

use kleinflow::packets::{reflected_amplitude, transmitted_amplitude, GaussianAmplitude, PacketField, PacketKind};
use kleinflow::{PhysicalParams, SpacetimePoint};

fn main() -> kleinflow::Result<()> {
    let p = PhysicalParams::new(1.0, 4.0)?;
    let a = GaussianAmplitude::new(0.3, 0.1)?.profile();
    let step = PacketField::for_window(PacketKind::StepIn, &a, p, 200.0, 300.0)?;
    let order = step.order();
    let incoming = PacketField::new(PacketKind::FreeU, &a, p, order)?;
    let reflected = PacketField::new(PacketKind::FreeU, &reflected_amplitude(&a, &p)?, p, order)?;
    let transmitted = PacketField::new(PacketKind::FreeV, &transmitted_amplitude(&a, &p)?, p, order)?;
    println!("k order {order}");
    for (x0, x1) in [(-150.0, -40.0), (-20.0, -5.0), (0.0, 0.0), (60.0, 30.0), (180.0, 150.0)] {
        let pt = SpacetimePoint::new(x0, x1);
        let psi = step.eval_checked(pt, 1e-10)?;
        let parts = if x1 < 0.0 {
            incoming.eval(pt) + reflected.eval(pt)
        } else {
            transmitted.eval(pt) * Complex64::from_polar(1.0, -p.height * x0)
        };
        println!(
            "({x0:7.1}, {x1:7.1})  |ψ| = {:.6e}  |ψ − parts| = {:.2e}",
            psi.max_abs(),
            psi.max_abs_diff(&parts)
        );
    }
    Ok(())
}
