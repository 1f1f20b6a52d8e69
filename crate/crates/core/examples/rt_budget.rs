//! Reflected and transmitted probability of Gaussian packets across the
//! Klein window (V = 4κ). R is integrated in k, T in the transmitted wave
//! number, so R + T = 1 is an independent check.
//!
//!     cargo run --example rt_budget

use kleinflow::diagnostics::rt_budget;
use kleinflow::packets::GaussianAmplitude;
use kleinflow::step_modes::make_step_mode;
use kleinflow::PhysicalParams;

fn main() -> kleinflow::Result<()> {
    let p = PhysicalParams::new(1.0, 4.0)?;
    println!("{:>6} {:>12} {:>12} {:>12} {:>10}", "K", "R", "T", "R+T-1", "r(K)²");
    for center in [0.3, 0.6, 1.0, 1.4, 1.7, 2.2, 2.7] {
        let a = GaussianAmplitude::new(center, 0.05)?.profile();
        let b = rt_budget(&a, &p, 256)?;
        let plane = make_step_mode(center, &p)?.reflection();
        println!(
            "{center:6.2} {:12.8} {:12.8} {:12.2e} {plane:10.6}",
            b.reflection,
            b.transmission,
            b.reflection + b.transmission - 1.0
        );
    }
    Ok(())
}
