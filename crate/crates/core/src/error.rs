use thiserror::Error;

/// Errors raised by model construction, evaluation and the analyses built on top.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid model specification: {0}")]
    InvalidSpec(String),

    #[error("x = {x} is outside the model domain [0, {x_max})")]
    Domain { x: f64, x_max: f64 },

    #[error("y = {0} must be positive")]
    NonPositiveY(f64),

    #[error("no root of {what} in [{lo}, {hi}]")]
    NoRoot {
        what: &'static str,
        lo: f64,
        hi: f64,
    },

    #[error("ordering (a0+1)w > z >= w > 0 violated: z = {z}, w = {w}, a0 = {a0}")]
    Ordering { z: f64, w: f64, a0: f64 },

    #[error("hypothesis {index} of the bound fails at x = {x}, y = {y}: {detail}")]
    Hypothesis {
        index: u8,
        x: f64,
        y: f64,
        detail: &'static str,
    },

    #[error("H level {level} unreachable below x_max (sup H ~ {sup})")]
    Unreachable { level: f64, sup: f64 },

    #[error("Lambert W argument {arg} outside the {branch} branch domain")]
    LambertDomain { arg: f64, branch: &'static str },

    #[error("trajectory left the domain at t = {t}, (x, y) = ({x}, {y})")]
    DomainExit { t: f64, x: f64, y: f64 },

    #[error("integration did not converge after {steps} steps (t = {t}, distance to (z,z) = {distance})")]
    NonConvergence { steps: usize, t: f64, distance: f64 },

    #[error("trap-region check `{check}` fails at (x, y) = ({x}, {y}), margin {margin}")]
    TrapViolation {
        check: &'static str,
        x: f64,
        y: f64,
        margin: f64,
    },

    #[error("{0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
