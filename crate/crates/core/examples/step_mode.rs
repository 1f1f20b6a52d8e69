//! Scattering mode at the step: reflection/transmission coefficients,
//! current continuity and the pointwise current.
//!
//!     cargo run --example step_mode -- 0.5 2.25

use kleinflow::step_modes::{make_step_mode, min_velocity};
use kleinflow::{PhysicalParams, SpacetimePoint};

fn main() -> kleinflow::Result<()> {
    let mut args = std::env::args().skip(1).map(|s| s.parse::<f64>().expect("number"));
    let k = args.next().unwrap_or(0.5);
    let height = args.next().unwrap_or(2.25);
    let p = PhysicalParams::new(1.0, height)?;
    let m = make_step_mode(k, &p)?;
    println!("k = {k}, V = {height}: q = {:.10}", m.q);
    println!("r = {:.10}  t = {:.10}", m.r, m.t);
    println!("R = r² = {:.10}  T = q t²/k = {:.10}  R + T = {:.3e} + 1", m.reflection(), m.transmission(), m.reflection() + m.transmission() - 1.0);
    println!("transmitted slope dx⁰/dx¹ = {:.10}, slowest velocity on x¹<0 = {:.10}", m.transmitted_slope(), min_velocity(&m));
    for x1 in [-10.0, -std::f64::consts::PI / (2.0 * k), -1e-9, 0.0, 5.0] {
        let pt = SpacetimePoint::new(0.0, x1);
        let j = m.current(pt);
        println!("x¹ = {x1:10.5}: j = ({:.10}, {:.10}), velocity {:.10}", j.j0, j.j1, j.velocity());
    }
    Ok(())
}
