//! Bohmian trajectories of an incoming Gaussian packet at a V = 4κ step,
//! started at density quantiles. Defaults reproduce the K = 0.3, Δ = 0.1
//! scenario; pass `2.7 0.05 -100 160` for the slow-transmission one.
//!
//!     cargo run --release --example trajectory_ensemble -- [K Δ t_start t_end]

use kleinflow::diagnostics::rt_budget;
use kleinflow::dispersion::{group_velocity, s_map};
use kleinflow::flow::{batch_trajectories, crossing_pairs, packet_profile, pick_starts, IntegratorConfig, NearStepCap};
use kleinflow::packets::{GaussianAmplitude, PacketField, PacketKind};
use kleinflow::PhysicalParams;

fn main() -> kleinflow::Result<()> {
    let args: Vec<f64> = std::env::args().skip(1).map(|s| s.parse().expect("number")).collect();
    let (center, width, t0, t1) = match args[..] {
        [c, w, a, b] => (c, w, a, b),
        [] => (0.3, 0.1, -150.0, 200.0),
        _ => panic!("expected K Δ t_start t_end"),
    };
    let p = PhysicalParams::new(1.0, 4.0)?;
    let a = GaussianAmplitude::new(center, width)?.profile();
    let field = PacketField::for_window(PacketKind::StepIn, &a, p, t0.abs().max(t1.abs()), 300.0)?;
    let n = 16;
    let starts = pick_starts(&field, t0, n, 1.0 - 2.0 / (n as f64 + 1.0))?;
    let mut cfg = IntegratorConfig::with_span(t0, t1).with_peak_density(packet_profile(&field, t0)?.peak());
    cfg.near_step = Some(NearStepCap::for_wave_numbers(a.k1, a.k2));
    let trajs = batch_trajectories(&field, &starts, &cfg).into_iter().collect::<kleinflow::Result<Vec<_>>>()?;
    for (i, t) in trajs.iter().enumerate() {
        println!(
            "#{i:2}  start x¹ = {:8.3}  end ({:6.1}, {:8.3})  final velocity {:+.4}  {}",
            t.start.x1,
            t.last().x0,
            t.last().x1,
            t.last().velocity,
            if t.is_transmitted() { "transmitted" } else { "reflected" }
        );
    }
    let transmitted = trajs.iter().filter(|t| t.is_transmitted()).count();
    let rt = rt_budget(&a, &p, field.order())?;
    println!("transmitted {transmitted}/{n}, T = {:.4}", rt.transmission);
    println!(
        "group velocities: incoming {:.4}, transmitted {:.4}",
        group_velocity(center, &p),
        group_velocity(s_map(center, &p)?, &p)
    );
    println!("crossing pairs: {}", crossing_pairs(&trajs, 4000).len());
    Ok(())
}
