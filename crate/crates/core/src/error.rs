use thiserror::Error;

/// Which precondition of a Klein-regime construction failed.
#[derive(Debug, Clone, PartialEq)]
pub enum DomainViolation {
    /// `V > 2κ` does not hold, so there is no Klein regime at all.
    NoKleinRegime { height: f64, kappa: f64 },
    /// `V > 2κ` holds but the wave number is outside `0 < k, ω̄(k) < V − κ`.
    OutsideKleinWindow { k: f64, upper: f64 },
    /// Argument outside the open domain `(0, √(V² − 2κV))` of the step map.
    OutsideStepMap { k: f64, upper: f64 },
    /// Anything else that is not a finite, well-ordered input.
    Invalid(String),
}

impl std::fmt::Display for DomainViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            DomainViolation::NoKleinRegime { height, kappa } => {
                write!(f, "V > 2κ violated (V = {height}, κ = {kappa})")
            }
            DomainViolation::OutsideKleinWindow { k, upper } => {
                write!(f, "k = {k} outside Klein window 0 < k < {upper} (ω̄(k) < V − κ)")
            }
            DomainViolation::OutsideStepMap { k, upper } => {
                write!(f, "k = {k} outside step-map domain (0, {upper})")
            }
            DomainViolation::Invalid(msg) => f.write_str(msg),
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(DomainViolation),

    #[error("quadrature not converged at order {order}: doubling changed the value by {change:e} (tolerance {tolerance:e})")]
    QuadratureNotConverged {
        order: usize,
        change: f64,
        tolerance: f64,
    },

    #[error("window [{lo}, {hi}] too small: edge density {edge:e} exceeds floor {floor:e}")]
    WindowTooSmall {
        lo: f64,
        hi: f64,
        edge: f64,
        floor: f64,
    },

    #[error("amplitude has zero norm")]
    ZeroNorm,

    #[error("invalid trajectory start ({x0}, {x1}): density {density:e} at or below floor {floor:e}")]
    InvalidStart {
        x0: f64,
        x1: f64,
        density: f64,
        floor: f64,
    },

    #[error("not converged: {0}")]
    Convergence(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::Domain(DomainViolation::Invalid(msg.into()))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
