//! Free dispersion relation, the Klein window and the step map `s` that
//! sends an incoming wave number to the transmitted one.
//!
//!     cargo run --example dispersion -- 4.0

use kleinflow::dispersion::{fixed_point_k0, group_velocity, omega_bar, s_map};
use kleinflow::PhysicalParams;

fn main() -> kleinflow::Result<()> {
    let height: f64 = std::env::args().nth(1).map_or(4.0, |s| s.parse().expect("step height"));
    let p = PhysicalParams::new(1.0, height)?;
    let k_max = p.klein_k_max()?;
    let k0 = fixed_point_k0(&p)?;
    println!("V = {height}: Klein window 0 < k < {k_max:.6}, fixed point s(k0) = k0 at k0 = {k0:.6}");
    println!("{:>8} {:>10} {:>10} {:>10} {:>10} {:>10}", "k", "ω̄(k)", "q = s(k)", "ω̄(q)", "v_g(k)", "v_g(q)");
    for i in 1..10 {
        let k = k_max * i as f64 / 10.0;
        let q = s_map(k, &p)?;
        println!(
            "{k:8.4} {:10.6} {q:10.6} {:10.6} {:10.6} {:10.6}",
            omega_bar(k, &p),
            omega_bar(q, &p),
            group_velocity(k, &p),
            group_velocity(q, &p)
        );
    }
    // outside the window the map is undefined
    println!("s({:.3}) -> {}", 1.1 * k_max, s_map(1.1 * k_max, &p).unwrap_err());
    Ok(())
}
