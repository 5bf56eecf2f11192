use thiserror::Error;

use crate::model::{Channel, C64};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("initial amplitudes are not normalized: sum |a_i|^2 = {norm}")]
    NonNormalizedInitialState { norm: f64 },

    #[error("rate {name} = {value} is out of range ({requirement})")]
    NegativeRate {
        name: &'static str,
        value: f64,
        requirement: &'static str,
    },

    #[error("parameter {name} is not finite")]
    NonFiniteParameter { name: &'static str },

    #[error("invalid spectrum grid: {0}")]
    InvalidGrid(String),

    #[error("singular evaluation at s = {s}{}", index.map(|i| format!(" (grid index {i})")).unwrap_or_default())]
    SingularEvaluation { s: C64, index: Option<usize> },

    #[error("scenario is not resonant (max |delta| = {max_detuning})")]
    NotResonant { max_detuning: f64 },

    #[error("cubic roots are degenerate (min separation {separation})")]
    DegenerateRoots { separation: f64 },

    #[error("cubic has three real roots; no conjugate pair")]
    AllRealRoots,

    #[error("time step {dt} too large: dt * max rate = {product} >= {limit}")]
    StepTooLarge { dt: f64, product: f64, limit: f64 },

    #[error("trajectory not converged for {channel}: final |amplitude| = {residual}")]
    NotConverged { channel: Channel, residual: f64 },

    #[error("invalid integration settings: {0}")]
    InvalidSettings(String),
}
