use thiserror::Error;

pub type Result<T, E = CrowdError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum CrowdError {
    /// A configuration field is missing, malformed or out of range.
    #[error("invalid configuration at `{field}`: {message}")]
    Config { field: String, message: String },

    #[error("CFL condition violated: max(tau/dx, tau/dy) = {ratio:.6} > 1 (tau = {tau:.6e}, dx = {dx:.6e}, dy = {dy:.6e}); increase `numerics.substeps` or reduce `numerics.dt_s`")]
    Cfl { ratio: f64, tau: f64, dx: f64, dy: f64 },

    #[error("geometry error: {0}")]
    Geometry(String),

    /// A query point lies outside the computational box.
    #[error("point ({x:.6}, {y:.6}) lies outside the bounding box")]
    OutsideDomain { x: f64, y: f64 },

    #[error("numeric state error at step {step}, sub-step {substep} ({phase}): {message}")]
    NumericState { step: usize, substep: usize, phase: &'static str, message: String },

    #[error("unknown built-in scenario `{0}`")]
    UnknownScenario(String),

    #[error("config parse error: {0}")]
    Parse(#[from] toml::de::Error),

    #[error("config serialization error: {0}")]
    Serialize(#[from] toml::ser::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl CrowdError {
    pub fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        CrowdError::Config { field: field.into(), message: message.into() }
    }

    /// True for errors caused by bad input rather than a failing simulation.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            CrowdError::Config { .. }
                | CrowdError::Cfl { .. }
                | CrowdError::Geometry(_)
                | CrowdError::OutsideDomain { .. }
                | CrowdError::UnknownScenario(_)
                | CrowdError::Parse(_)
        )
    }
}
