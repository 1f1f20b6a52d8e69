//! Runs a scenario file the way the `kleinflow` binary does and lists the
//! files written. Configs for the three standard scenarios live next to
//! this example.
//!
//!     cargo run --release --example scenario -- examples/configs/fast_transmission.cfg out

use kleinflow::cli::{cmd_packet, cmd_plane, Mode, RunContext, ScenarioConfig};

fn main() -> kleinflow::Result<()> {
    let mut args = std::env::args().skip(1);
    let path = args.next().unwrap_or_else(|| "examples/configs/plane_mode.cfg".into());
    let out = args.next().unwrap_or_else(|| "out".into());
    let cfg = ScenarioConfig::load(path.as_ref())?;
    println!("{path}: digest {}", cfg.digest());
    let ctx = RunContext::new(out, 0);
    let files = match cfg.mode {
        Mode::Plane => cmd_plane(&ctx, &cfg)?.files,
        Mode::Packet => cmd_packet(&ctx, &cfg)?.files,
    };
    for f in files {
        println!("wrote {}", f.display());
    }
    Ok(())
}
