//! Scenario files: `key = value` lines grouped under `[section]` headers.
//! `#` starts a comment. Every key must be known; unknown keys and
//! sections are errors.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use sha2::{Digest, Sha256};

use crate::dispersion::PhysicalParams;
use crate::error::{Error, Result};
use crate::packets::GaussianAmplitude;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Plane,
    Packet,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Window {
    pub t_min: f64,
    pub t_max: f64,
    pub x_min: f64,
    pub x_max: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub mode: Mode,
    pub kappa: f64,
    pub height: f64,
    /// Plane mode: wave number and the time at which the trajectory meets the step.
    pub k: f64,
    pub tau: f64,
    /// Packet mode: Gaussian centre and width.
    pub center: f64,
    pub width: f64,
    pub window: Window,
    pub n_trajectories: usize,
    pub coverage: f64,
    /// Time at which trajectory starts are placed.
    pub start_tau: f64,
    pub snapshot_taus: Vec<f64>,
    pub snapshot_points: usize,
    /// Gauss–Legendre order in `k`; 0 picks one from the window.
    pub k_order: usize,
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_step: f64,
    pub panel_width: f64,
    pub panel_nodes: usize,
    pub prefix: String,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig {
            mode: Mode::Packet,
            kappa: 1.0,
            height: 4.0,
            k: 0.5,
            tau: 0.0,
            center: 0.3,
            width: 0.1,
            window: Window {
                t_min: -180.0,
                t_max: 200.0,
                x_min: -100.0,
                x_max: 300.0,
            },
            n_trajectories: 16,
            coverage: 15.0 / 17.0,
            start_tau: -150.0,
            snapshot_taus: vec![-150.0, 0.0, 150.0],
            snapshot_points: 2001,
            k_order: 0,
            rel_tol: 1e-8,
            abs_tol: 1e-10,
            max_step: 5.0,
            panel_width: 1.0,
            panel_nodes: 16,
            prefix: "run".to_string(),
        }
    }
}

const KEYS: &[&str] = &[
    "scenario.mode",
    "physics.kappa",
    "physics.V",
    "plane.k",
    "plane.tau",
    "packet.K",
    "packet.Delta",
    "window.t_min",
    "window.t_max",
    "window.x_min",
    "window.x_max",
    "trajectories.n",
    "trajectories.coverage",
    "trajectories.tau",
    "snapshots.taus",
    "snapshots.points",
    "numerics.k_order",
    "numerics.rel_tol",
    "numerics.abs_tol",
    "numerics.max_step",
    "numerics.panel_width",
    "numerics.panel_nodes",
    "output.prefix",
];

fn parse_f64(key: &str, v: &str) -> Result<f64> {
    v.parse::<f64>()
        .ok()
        .filter(|x| x.is_finite())
        .ok_or_else(|| Error::Config(format!("{key}: expected a finite number, got {v:?}")))
}

fn parse_usize(key: &str, v: &str) -> Result<usize> {
    v.parse::<usize>()
        .map_err(|_| Error::Config(format!("{key}: expected a non-negative integer, got {v:?}")))
}

/// Splits the text into `section.key → value`.
pub fn parse_entries(text: &str) -> Result<BTreeMap<String, String>> {
    let mut section = String::new();
    let mut out = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(name) = line.strip_prefix('[') {
            let name = name
                .strip_suffix(']')
                .ok_or_else(|| Error::Config(format!("line {}: unterminated section header", lineno + 1)))?;
            section = name.trim().to_string();
            if !KEYS.iter().any(|k| k.split('.').next() == Some(section.as_str())) {
                return Err(Error::Config(format!("line {}: unknown section [{section}]", lineno + 1)));
            }
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("line {}: expected key = value", lineno + 1)))?;
        if section.is_empty() {
            return Err(Error::Config(format!("line {}: key outside any section", lineno + 1)));
        }
        let full = format!("{section}.{}", key.trim());
        if !KEYS.contains(&full.as_str()) {
            return Err(Error::Config(format!("line {}: unknown key {full}", lineno + 1)));
        }
        if out.insert(full.clone(), value.trim().to_string()).is_some() {
            return Err(Error::Config(format!("line {}: duplicate key {full}", lineno + 1)));
        }
    }
    Ok(out)
}

impl ScenarioConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let entries = parse_entries(text)?;
        let mut c = ScenarioConfig::default();
        for (key, v) in &entries {
            let key = key.as_str();
            match key {
                "scenario.mode" => {
                    c.mode = match v.as_str() {
                        "plane" => Mode::Plane,
                        "packet" => Mode::Packet,
                        other => return Err(Error::Config(format!("scenario.mode: expected plane or packet, got {other:?}"))),
                    }
                }
                "physics.kappa" => c.kappa = parse_f64(key, v)?,
                "physics.V" => c.height = parse_f64(key, v)?,
                "plane.k" => c.k = parse_f64(key, v)?,
                "plane.tau" => c.tau = parse_f64(key, v)?,
                "packet.K" => c.center = parse_f64(key, v)?,
                "packet.Delta" => c.width = parse_f64(key, v)?,
                "window.t_min" => c.window.t_min = parse_f64(key, v)?,
                "window.t_max" => c.window.t_max = parse_f64(key, v)?,
                "window.x_min" => c.window.x_min = parse_f64(key, v)?,
                "window.x_max" => c.window.x_max = parse_f64(key, v)?,
                "trajectories.n" => c.n_trajectories = parse_usize(key, v)?,
                "trajectories.coverage" => c.coverage = parse_f64(key, v)?,
                "trajectories.tau" => c.start_tau = parse_f64(key, v)?,
                "snapshots.taus" => {
                    c.snapshot_taus = v
                        .split(',')
                        .map(str::trim)
                        .filter(|s| !s.is_empty())
                        .map(|s| parse_f64(key, s))
                        .collect::<Result<_>>()?
                }
                "snapshots.points" => c.snapshot_points = parse_usize(key, v)?,
                "numerics.k_order" => c.k_order = parse_usize(key, v)?,
                "numerics.rel_tol" => c.rel_tol = parse_f64(key, v)?,
                "numerics.abs_tol" => c.abs_tol = parse_f64(key, v)?,
                "numerics.max_step" => c.max_step = parse_f64(key, v)?,
                "numerics.panel_width" => c.panel_width = parse_f64(key, v)?,
                "numerics.panel_nodes" => c.panel_nodes = parse_usize(key, v)?,
                "output.prefix" => c.prefix = v.clone(),
                _ => unreachable!("keys are validated in parse_entries"),
            }
        }
        Ok(c)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        ScenarioConfig::parse(&text)
    }

    pub fn params(&self) -> Result<PhysicalParams> {
        PhysicalParams::new(self.kappa, self.height)
    }

    pub fn gaussian(&self) -> Result<GaussianAmplitude> {
        GaussianAmplitude::new(self.center, self.width)
    }

    /// Structural checks plus the Klein constraints of the selected mode.
    /// Violations of the physics preconditions come back as
    /// [`Error::Domain`].
    pub fn validate(&self) -> Result<()> {
        let w = &self.window;
        if !(w.t_min < w.t_max && w.x_min < w.x_max) {
            return Err(Error::Config(format!(
                "window must be nonempty: t [{}, {}], x [{}, {}]",
                w.t_min, w.t_max, w.x_min, w.x_max
            )));
        }
        if !(self.rel_tol > 0.0 && self.abs_tol > 0.0 && self.max_step > 0.0) {
            return Err(Error::Config("tolerances and max_step must be positive".into()));
        }
        if !(self.panel_width > 0.0) || self.panel_nodes == 0 || self.snapshot_points < 2 {
            return Err(Error::Config("panel_width, panel_nodes must be positive and snapshot points ≥ 2".into()));
        }
        if self.prefix.is_empty() || self.prefix.contains(['/', '\\']) {
            return Err(Error::Config(format!("output.prefix must be a plain file stem, got {:?}", self.prefix)));
        }
        let p = self.params()?;
        match self.mode {
            Mode::Plane => {
                p.check_klein_window(self.k)?;
                if !(self.tau >= w.t_min && self.tau <= w.t_max) {
                    return Err(Error::Config(format!("plane.tau = {} outside the time window", self.tau)));
                }
            }
            Mode::Packet => {
                self.gaussian()?.profile().check_klein_window(&p)?;
                if self.n_trajectories > 0 {
                    if !(self.coverage > 0.0 && self.coverage < 1.0) {
                        return Err(Error::Config(format!("trajectories.coverage must lie in (0, 1), got {}", self.coverage)));
                    }
                    if !(self.start_tau >= w.t_min && self.start_tau < w.t_max) {
                        return Err(Error::Config(format!("trajectories.tau = {} outside the time window", self.start_tau)));
                    }
                }
            }
        }
        Ok(())
    }

    /// Canonical `section.key = value` rendering of every field.
    pub fn canonical(&self) -> String {
        let mut s = String::new();
        let mode = match self.mode {
            Mode::Plane => "plane",
            Mode::Packet => "packet",
        };
        let taus: Vec<String> = self.snapshot_taus.iter().map(|t| format!("{t:?}")).collect();
        let w = &self.window;
        let _ = writeln!(s, "scenario.mode = {mode}");
        let _ = writeln!(s, "physics.kappa = {:?}", self.kappa);
        let _ = writeln!(s, "physics.V = {:?}", self.height);
        let _ = writeln!(s, "plane.k = {:?}", self.k);
        let _ = writeln!(s, "plane.tau = {:?}", self.tau);
        let _ = writeln!(s, "packet.K = {:?}", self.center);
        let _ = writeln!(s, "packet.Delta = {:?}", self.width);
        let _ = writeln!(s, "window = {:?} {:?} {:?} {:?}", w.t_min, w.t_max, w.x_min, w.x_max);
        let _ = writeln!(s, "trajectories = {} {:?} {:?}", self.n_trajectories, self.coverage, self.start_tau);
        let _ = writeln!(s, "snapshots = [{}] {}", taus.join(","), self.snapshot_points);
        let _ = writeln!(
            s,
            "numerics = {} {:?} {:?} {:?} {:?} {}",
            self.k_order, self.rel_tol, self.abs_tol, self.max_step, self.panel_width, self.panel_nodes
        );
        let _ = writeln!(s, "output.prefix = {}", self.prefix);
        s
    }

    /// First 16 hex digits of the SHA-256 of [`ScenarioConfig::canonical`].
    pub fn digest(&self) -> String {
        let hash = Sha256::digest(self.canonical().as_bytes());
        hash.iter().take(8).map(|b| format!("{b:02x}")).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const PLANE: &str = "\
[scenario]
mode = plane   # closed-form run
[physics]
V = 2.25
[plane]
k = 0.5
[window]
t_min = -600
t_max = 200
x_min = -50
x_max = 50
";

    #[test]
    fn parses_plane_scenario() {
        let c = ScenarioConfig::parse(PLANE).unwrap();
        assert_eq!(c.mode, Mode::Plane);
        assert_eq!(c.height, 2.25);
        assert_eq!(c.k, 0.5);
        assert_eq!(c.window.t_min, -600.0);
        assert_eq!(c.kappa, 1.0);
        c.validate().unwrap();
    }

    #[test]
    fn unknown_keys_and_sections_are_errors() {
        assert!(matches!(ScenarioConfig::parse("[physics]\nmass = 1\n"), Err(Error::Config(_))));
        assert!(matches!(ScenarioConfig::parse("[nope]\n"), Err(Error::Config(_))));
        assert!(matches!(ScenarioConfig::parse("V = 4\n"), Err(Error::Config(_))));
        assert!(matches!(ScenarioConfig::parse("[physics]\nV = 4\nV = 5\n"), Err(Error::Config(_))));
        assert!(matches!(ScenarioConfig::parse("[physics]\nV = four\n"), Err(Error::Config(_))));
        assert!(matches!(ScenarioConfig::parse("[scenario]\nmode = wave\n"), Err(Error::Config(_))));
    }

    #[test]
    fn validation() {
        let mut c = ScenarioConfig::default();
        c.validate().unwrap();
        c.height = 1.5;
        assert!(matches!(c.validate(), Err(Error::Domain(_))));
        let mut c = ScenarioConfig::default();
        c.window.x_max = c.window.x_min;
        assert!(matches!(c.validate(), Err(Error::Config(_))));
        let c = ScenarioConfig {
            center: 2.8,
            ..Default::default()
        };
        assert!(matches!(c.validate(), Err(Error::Domain(_))));
    }

    #[test]
    fn digest_tracks_content() {
        let a = ScenarioConfig::parse(PLANE).unwrap();
        let b = ScenarioConfig::parse(&PLANE.replace("k = 0.5", "k = 0.5000")).unwrap();
        assert_eq!(a.digest(), b.digest());
        let c = ScenarioConfig::parse(&PLANE.replace("k = 0.5", "k = 0.6")).unwrap();
        assert_ne!(a.digest(), c.digest());
        assert_eq!(a.digest().len(), 16);
    }

    #[test]
    fn snapshot_list() {
        let c = ScenarioConfig::parse("[snapshots]\ntaus = -150, 0,150\n").unwrap();
        assert_eq!(c.snapshot_taus, vec![-150.0, 0.0, 150.0]);
    }
}
