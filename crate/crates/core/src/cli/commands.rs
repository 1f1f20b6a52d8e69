//! The three runs behind the `kleinflow` subcommands. Each returns a summary
//! and writes its files as soon as the corresponding stage finishes, so a
//! failure in a late stage leaves the earlier outputs in place.

use std::path::{Path, PathBuf};

use crate::cli::config::{Mode, ScenarioConfig};
use crate::cli::output::{output_path, CsvTable, Report, Series, SpacetimePlot};
use crate::diagnostics::{probability_in_interval, rt_budget, RtBudget, TAIL_REACH};
use crate::dispersion::{group_velocity, s_map};
use crate::error::{Error, Result};
use crate::flow::{
    batch_trajectories, crossing_pairs, integrate_trajectory, DensityProfile, IntegratorConfig, NearStepCap,
    Trajectory, TrajectoryStatus,
};
use crate::flow::{packet_profile, pick_starts};
use crate::identities::{run_identities, IdentityCheck, IdentityOptions};
use crate::packets::{PacketField, PacketKind, DEFAULT_CONVERGENCE_TOL};
use crate::quadrature::SpatialQuadrature;
use crate::spinor::SpacetimePoint;
use crate::step_modes::{closed_form_trajectory, make_step_mode, min_velocity};

/// Exit status for a failed run.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Config(_) | Error::Domain(_) => 2,
        Error::QuadratureNotConverged { .. }
        | Error::WindowTooSmall { .. }
        | Error::ZeroNorm
        | Error::InvalidStart { .. }
        | Error::Convergence(_) => 3,
        Error::Io(_) => 1,
    }
}

pub const EXIT_IDENTITY_FAILURE: i32 = 4;

/// Where and how a run writes its files.
#[derive(Debug, Clone)]
pub struct RunContext {
    pub out_dir: PathBuf,
    /// Recorded in headers; start selection is deterministic.
    pub seed: u64,
}

impl RunContext {
    pub fn new(out_dir: impl Into<PathBuf>, seed: u64) -> Self {
        RunContext {
            out_dir: out_dir.into(),
            seed,
        }
    }

    fn prepare(&self) -> Result<&Path> {
        std::fs::create_dir_all(&self.out_dir)?;
        Ok(&self.out_dir)
    }
}

fn header(command: &str, cfg: &ScenarioConfig, ctx: &RunContext, k_order: Option<usize>) -> Vec<String> {
    let mut lines = vec![
        format!("kleinflow {command}"),
        format!("config_digest={}", cfg.digest()),
        format!(
            "settings: k_order={} rel_tol={:e} abs_tol={:e} max_step={} panel_width={} panel_nodes={} seed={}",
            k_order.map_or_else(|| "n/a".to_string(), |o| o.to_string()),
            cfg.rel_tol,
            cfg.abs_tol,
            cfg.max_step,
            cfg.panel_width,
            cfg.panel_nodes,
            ctx.seed
        ),
    ];
    lines.extend(cfg.canonical().lines().map(|l| format!("config: {l}")));
    lines
}

fn integrator(cfg: &ScenarioConfig) -> IntegratorConfig {
    let mut ic = IntegratorConfig::with_span(cfg.window.t_min, cfg.window.t_max);
    ic.rel_tol = cfg.rel_tol;
    ic.abs_tol = cfg.abs_tol;
    ic.max_step = cfg.max_step;
    ic
}

fn require_mode(cfg: &ScenarioConfig, mode: Mode) -> Result<()> {
    if cfg.mode != mode {
        let name = if mode == Mode::Plane { "plane" } else { "packet" };
        return Err(Error::Config(format!("scenario.mode must be {name} for this command")));
    }
    Ok(())
}

fn trajectory_csv(trajs: &[Trajectory], comments: Vec<String>) -> CsvTable {
    let mut t = CsvTable::new(&["traj_id", "x0", "x1"]);
    t.comments(comments);
    for (id, traj) in trajs.iter().enumerate() {
        for s in &traj.samples {
            t.row(&[id.to_string(), super::output::fmt_num(s.x0), super::output::fmt_num(s.x1)]);
        }
    }
    t
}

fn median(mut v: Vec<f64>) -> Option<f64> {
    if v.is_empty() {
        return None;
    }
    v.sort_by(f64::total_cmp);
    let n = v.len();
    Some(if n % 2 == 1 { v[n / 2] } else { 0.5 * (v[n / 2 - 1] + v[n / 2]) })
}

// ---------------------------------------------------------------- identities

#[derive(Debug, Clone)]
pub struct IdentitiesSummary {
    pub checks: Vec<IdentityCheck>,
    pub report: PathBuf,
}

impl IdentitiesSummary {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(IdentityCheck::passed)
    }

    pub fn failures(&self) -> Vec<&'static str> {
        self.checks.iter().filter(|c| !c.passed()).map(|c| c.name).collect()
    }
}

/// Options for `identities`: the physics section of an optional scenario
/// file replaces the default `κ` and step heights.
pub fn identity_options(cfg: Option<&ScenarioConfig>, r_perturbation: f64) -> Result<IdentityOptions> {
    let mut opts = IdentityOptions {
        r_perturbation,
        ..Default::default()
    };
    if let Some(cfg) = cfg {
        let p = cfg.params()?;
        p.check_klein_regime()?;
        opts.kappa = p.kappa;
        opts.heights = vec![p.height];
    }
    Ok(opts)
}

pub fn cmd_identities(ctx: &RunContext, opts: &IdentityOptions) -> Result<IdentitiesSummary> {
    let checks = run_identities(opts)?;
    let dir = ctx.prepare()?;
    let mut table = CsvTable::new(&["identity", "samples", "max_residual", "tolerance", "passed"]);
    table.comment("kleinflow identities");
    table.comment(format!(
        "settings: samples={} kappa={} heights={:?} seed={}",
        opts.samples, opts.kappa, opts.heights, ctx.seed
    ));
    if opts.r_perturbation != 0.0 {
        table.comment(format!("fault injection: r += {:e}", opts.r_perturbation));
    }
    for c in &checks {
        table.row(&[
            format!("\"{}\"", c.name),
            c.samples.to_string(),
            super::output::fmt_num(c.max_residual),
            super::output::fmt_num(c.tolerance),
            c.passed().to_string(),
        ]);
    }
    let report = dir.join("identities_report.csv");
    table.write(&report)?;
    Ok(IdentitiesSummary { checks, report })
}

// --------------------------------------------------------------------- plane

#[derive(Debug, Clone)]
pub struct PlaneSummary {
    pub trajectory: Trajectory,
    /// Largest `|x⁰_ODE − x⁰_closed|` over the samples.
    pub max_deviation: f64,
    pub files: Vec<PathBuf>,
}

/// Closed-form trajectory through `(τ, 0)` versus the integrated velocity
/// field. Fails with a convergence error if the two disagree by more than
/// `1e-5` of the time range.
pub fn cmd_plane(ctx: &RunContext, cfg: &ScenarioConfig) -> Result<PlaneSummary> {
    require_mode(cfg, Mode::Plane)?;
    cfg.validate()?;
    let p = cfg.params()?;
    let m = make_step_mode(cfg.k, &p)?;
    let dir = ctx.prepare()?;
    let comments = header("plane", cfg, ctx, None);

    let mut ic = integrator(cfg);
    ic.near_step = Some(NearStepCap::for_wave_numbers(cfg.k, cfg.k.max(m.q)));
    let traj = integrate_trajectory(&m, SpacetimePoint::new(cfg.tau, 0.0), &ic)?;

    let mut table = CsvTable::new(&["x0", "x1", "x0_closed_form", "delta_x0"]);
    table.comments(comments.clone());
    let mut max_dev: f64 = 0.0;
    let mut closed = Vec::with_capacity(traj.samples.len());
    for s in &traj.samples {
        let x0c = closed_form_trajectory(&m, cfg.tau, s.x1);
        let d = s.x0 - x0c;
        max_dev = max_dev.max(d.abs());
        closed.push((s.x1, x0c));
        table.numeric_row(&[s.x0, s.x1, x0c, d]);
    }
    let mut files = Vec::new();
    let csv = output_path(dir, &cfg.prefix, "plane.csv");
    table.write(&csv)?;
    files.push(csv);

    let traj_csv = output_path(dir, &cfg.prefix, "trajectories.csv");
    trajectory_csv(std::slice::from_ref(&traj), comments.clone()).write(&traj_csv)?;
    files.push(traj_csv);

    let range = cfg.window.t_max - cfg.window.t_min;
    let mut report = Report::new(comments);
    report
        .num("k", m.k)
        .num("q", m.q)
        .num("r", m.r)
        .num("t", m.t)
        .num("R", m.reflection())
        .num("T", m.transmission())
        .num("transmitted_slope", m.transmitted_slope())
        .num("min_velocity", min_velocity(&m))
        .num("max_abs_delta_x0", max_dev)
        .num("max_abs_delta_x0_relative", max_dev / range)
        .int("ode_steps", traj.stats.steps)
        .int("ode_rejected", traj.stats.rejected)
        .text("ode_status", traj.status.as_str());
    let rep = output_path(dir, &cfg.prefix, "report.csv");
    report.write(&rep)?;
    files.push(rep);

    let plot = SpacetimePlot {
        title: format!("plane mode k = {}, V = {}", cfg.k, cfg.height),
        x_range: (cfg.window.x_min, cfg.window.x_max),
        t_range: (cfg.window.t_min, cfg.window.t_max),
        series: vec![
            Series {
                points: vec![(0.0, cfg.window.t_min), (0.0, cfg.window.t_max)],
                color: "gray",
                width: 0.8,
                dashed: true,
            },
            Series {
                points: traj.samples.iter().map(|s| (s.x1, s.x0)).collect(),
                color: "black",
                width: 2.0,
                dashed: false,
            },
            Series {
                points: closed,
                color: "red",
                width: 1.0,
                dashed: true,
            },
        ],
    };
    let svg = output_path(dir, &cfg.prefix, "plane.svg");
    plot.write(&svg)?;
    files.push(svg);

    if traj.status != TrajectoryStatus::Completed {
        return Err(Error::Convergence(format!("plane trajectory {}", traj.status.as_str())));
    }
    if max_dev > 1e-5 * range {
        return Err(Error::Convergence(format!(
            "ODE and closed form differ by {max_dev:e} (> 1e-5 of the time range)"
        )));
    }
    Ok(PlaneSummary {
        trajectory: traj,
        max_deviation: max_dev,
        files,
    })
}

// -------------------------------------------------------------------- packet

#[derive(Debug, Clone)]
pub struct PacketSummary {
    pub k_order: usize,
    pub budget: RtBudget,
    /// `(τ, mass in x¹ < 0, mass in x¹ > 0)` per snapshot time.
    pub half_line_masses: Vec<(f64, f64, f64)>,
    pub trajectories: Vec<Trajectory>,
    pub crossings: Vec<(usize, usize)>,
    /// Median final velocity of the transmitted trajectories.
    pub transmitted_velocity: Option<f64>,
    pub reflected_velocity: Option<f64>,
    pub files: Vec<PathBuf>,
}

impl PacketSummary {
    pub fn transmitted_count(&self) -> usize {
        self.trajectories.iter().filter(|t| t.is_transmitted()).count()
    }

    pub fn max_speed(&self) -> f64 {
        self.trajectories.iter().map(Trajectory::max_speed).fold(0.0, f64::max)
    }
}

fn packet_field(cfg: &ScenarioConfig, t_extent: f64, x_extent: f64) -> Result<PacketField> {
    let a = cfg.gaussian()?.profile();
    let p = cfg.params()?;
    if cfg.k_order > 0 {
        PacketField::new(PacketKind::StepIn, &a, p, cfg.k_order)
    } else {
        PacketField::for_window(PacketKind::StepIn, &a, p, t_extent, x_extent)
    }
}

/// Incoming step packet: density snapshots, R/T and half-line masses,
/// trajectory ensemble, SVG.
pub fn cmd_packet(ctx: &RunContext, cfg: &ScenarioConfig) -> Result<PacketSummary> {
    require_mode(cfg, Mode::Packet)?;
    cfg.validate()?;
    let w = cfg.window;
    let t_ext = w.t_min.abs().max(w.t_max.abs());
    let x_ext = w.x_min.abs().max(w.x_max.abs());
    let field = packet_field(cfg, t_ext, x_ext)?;
    field.check_window((w.t_min, w.t_max), (w.x_min, w.x_max), DEFAULT_CONVERGENCE_TOL)?;
    let p = *field.params();
    let a = field.amplitude().clone();
    let dir = ctx.prepare()?;
    let comments = header("packet", cfg, ctx, Some(field.order()));
    let mut files = Vec::new();

    // stage 1: density snapshots
    let mut dens = CsvTable::new(&["tau", "x1", "j0", "j1"]);
    dens.comments(comments.clone());
    for &tau in &cfg.snapshot_taus {
        let prof = DensityProfile::sample(&field, tau, w.x_min, w.x_max, cfg.snapshot_points);
        for (x, j) in prof.xs.iter().zip(&prof.currents) {
            dens.numeric_row(&[tau, *x, j.j0, j.j1]);
        }
    }
    let dens_path = output_path(dir, &cfg.prefix, "densities.csv");
    dens.write(&dens_path)?;
    files.push(dens_path);

    // stage 2: budget and half-line masses
    let budget = rt_budget(&a, &p, field.order())?;
    let spatial = SpatialQuadrature {
        panel_width: cfg.panel_width,
        nodes_per_panel: cfg.panel_nodes,
    };
    let mut half_line_masses = Vec::new();
    if !cfg.snapshot_taus.is_empty() {
        // half-infinite intervals reach TAIL_REACH beyond the packet
        let reach = cfg
            .snapshot_taus
            .iter()
            .map(|&tau| {
                let (lo, hi) = field.localization_window(tau);
                lo.abs().max(hi.abs())
            })
            .fold(0.0, f64::max)
            + TAIL_REACH;
        let wide = packet_field(cfg, t_ext, reach.max(x_ext))?;
        for &tau in &cfg.snapshot_taus {
            let left = probability_in_interval(&wide, tau, (f64::NEG_INFINITY, 0.0), &spatial)?;
            let right = probability_in_interval(&wide, tau, (0.0, f64::INFINITY), &spatial)?;
            half_line_masses.push((tau, left, right));
        }
    }
    let mut report = Report::new(comments.clone());
    let v_in = group_velocity(cfg.center, &p);
    let v_tr = group_velocity(s_map(cfg.center, &p)?, &p);
    report
        .int("k_order", field.order())
        .num("R", budget.reflection)
        .num("T", budget.transmission)
        .num("R_plus_T_minus_1", budget.reflection + budget.transmission - 1.0)
        .num("incoming_group_velocity", v_in)
        .num("transmitted_group_velocity", v_tr);
    for &(tau, left, right) in &half_line_masses {
        report
            .num(&format!("mass_left_tau={tau}"), left)
            .num(&format!("mass_right_tau={tau}"), right);
    }
    let rep_path = output_path(dir, &cfg.prefix, "report.csv");
    report.write(&rep_path)?;
    files.push(rep_path.clone());

    // stage 3: trajectories
    let mut trajectories = Vec::new();
    if cfg.n_trajectories > 0 {
        let profile = packet_profile(&field, cfg.start_tau)?;
        let starts = pick_starts(&field, cfg.start_tau, cfg.n_trajectories, cfg.coverage)?;
        let mut ic = integrator(cfg).with_peak_density(profile.peak());
        ic.near_step = Some(NearStepCap::for_wave_numbers(a.k1, a.k2));
        trajectories = batch_trajectories(&field, &starts, &ic)
            .into_iter()
            .collect::<Result<Vec<_>>>()?;
        let traj_path = output_path(dir, &cfg.prefix, "trajectories.csv");
        trajectory_csv(&trajectories, comments.clone()).write(&traj_path)?;
        files.push(traj_path);
    }
    let crossings = crossing_pairs(&trajectories, 4000);
    let transmitted_velocity = median(
        trajectories
            .iter()
            .filter(|t| t.is_transmitted())
            .map(|t| t.last().velocity)
            .collect(),
    );
    let reflected_velocity = median(
        trajectories
            .iter()
            .filter(|t| !t.is_transmitted())
            .map(|t| t.last().velocity)
            .collect(),
    );
    let summary = PacketSummary {
        k_order: field.order(),
        budget,
        half_line_masses,
        crossings,
        transmitted_velocity,
        reflected_velocity,
        trajectories,
        files: Vec::new(),
    };
    if cfg.n_trajectories > 0 {
        let n = summary.trajectories.len();
        let aborted = summary
            .trajectories
            .iter()
            .filter(|t| t.status != TrajectoryStatus::Completed)
            .count();
        report
            .int("trajectories", n)
            .int("transmitted", summary.transmitted_count())
            .num("transmitted_fraction", summary.transmitted_count() as f64 / n as f64)
            .int("aborted", aborted)
            .int("crossings", summary.crossings.len())
            .num("max_speed", summary.max_speed());
        if let Some(v) = transmitted_velocity {
            report.num("transmitted_late_velocity", v);
        }
        if let Some(v) = reflected_velocity {
            report.num("reflected_late_velocity", v);
        }
        report.write(&rep_path)?;
    }

    // stage 4: plot
    let mut series = vec![Series {
        points: vec![(0.0, w.t_min), (0.0, w.t_max)],
        color: "gray",
        width: 0.8,
        dashed: true,
    }];
    series.extend(summary.trajectories.iter().map(|t| Series {
        points: t.samples.iter().map(|s| (s.x1, s.x0)).collect(),
        color: if t.is_transmitted() { "blue" } else { "red" },
        width: 1.2,
        dashed: false,
    }));
    let plot = SpacetimePlot {
        title: format!("packet K = {}, Delta = {}, V = {}", cfg.center, cfg.width, cfg.height),
        x_range: (w.x_min, w.x_max),
        t_range: (w.t_min, w.t_max),
        series,
    };
    let svg = output_path(dir, &cfg.prefix, "packet.svg");
    plot.write(&svg)?;
    files.push(svg);

    Ok(PacketSummary { files, ..summary })
}
