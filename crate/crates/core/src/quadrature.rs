//! Gauss–Legendre rules on `[−1, 1]`, cached per order.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    /// Highest polynomial degree integrated exactly (`2n − 1`).
    pub order: usize,
}

/// Legendre `P_n(x)` and its derivative via the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for j in 2..=n {
        let jf = j as f64;
        let p2 = ((2.0 * jf - 1.0) * x * p1 - (jf - 1.0) * p0) / jf;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

fn compute(n: usize) -> QuadratureRule {
    assert!(n >= 1, "quadrature needs at least one node");
    if n == 1 {
        return QuadratureRule {
            nodes: vec![0.0],
            weights: vec![2.0],
            order: 1,
        };
    }
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, x);
        if d.is_finite() {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    QuadratureRule {
        nodes,
        weights,
        order: 2 * n - 1,
    }
}

impl QuadratureRule {
    /// The `n`-point Gauss–Legendre rule (shared, computed once per `n`).
    pub fn gauss_legendre(n: usize) -> Arc<QuadratureRule> {
        static CACHE: OnceLock<Mutex<HashMap<usize, Arc<QuadratureRule>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        if let Some(rule) = cache.lock().expect("quadrature cache poisoned").get(&n) {
            return Arc::clone(rule);
        }
        let rule = Arc::new(compute(n));
        cache
            .lock()
            .expect("quadrature cache poisoned")
            .entry(n)
            .or_insert(rule)
            .clone()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Nodes and weights mapped affinely onto `[a, b]`.
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(&x, &w)| (mid + half * x, half * w))
    }

    pub fn integrate(&self, a: f64, b: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
        self.mapped(a, b).map(|(x, w)| w * f(x)).sum()
    }
}

/// Node count sufficient for an integrand whose phase varies by `phase_span`
/// radians across the interval; rounded up to a power of two, at least `base`.
pub fn order_for_phase(phase_span: f64, base: usize) -> usize {
    let needed = (phase_span.abs() + 64.0).ceil() as usize;
    needed.max(base).next_power_of_two()
}

/// Composite rule on `[lo, hi]`: panels of at most `panel_width`, split at
/// every breakpoint that falls strictly inside.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpatialQuadrature {
    pub panel_width: f64,
    pub nodes_per_panel: usize,
}

impl Default for SpatialQuadrature {
    fn default() -> Self {
        SpatialQuadrature {
            panel_width: 1.0,
            nodes_per_panel: 16,
        }
    }
}

impl SpatialQuadrature {
    /// Panel endpoints covering `[lo, hi]`.
    pub fn panels(&self, lo: f64, hi: f64, breakpoints: &[f64]) -> Vec<(f64, f64)> {
        let mut cuts = vec![lo, hi];
        cuts.extend(breakpoints.iter().copied().filter(|&b| b > lo && b < hi));
        cuts.sort_by(f64::total_cmp);
        let mut out = Vec::new();
        for w in cuts.windows(2) {
            let (a, b) = (w[0], w[1]);
            if b <= a {
                continue;
            }
            let count = ((b - a) / self.panel_width).ceil().max(1.0) as usize;
            let h = (b - a) / count as f64;
            for i in 0..count {
                let start = a + h * i as f64;
                let end = if i + 1 == count { b } else { a + h * (i + 1) as f64 };
                out.push((start, end));
            }
        }
        out
    }

    /// All `(x, weight)` pairs of the composite rule.
    pub fn points(&self, lo: f64, hi: f64, breakpoints: &[f64]) -> Vec<(f64, f64)> {
        let rule = QuadratureRule::gauss_legendre(self.nodes_per_panel);
        self.panels(lo, hi, breakpoints)
            .into_iter()
            .flat_map(|(a, b)| rule.mapped(a, b).collect::<Vec<_>>())
            .collect()
    }
}
