use thiserror::Error;

/// Errors raised by weight, mollifier, net and estimator operations.
#[derive(Debug, Error)]
pub enum Error {
    #[error("associated function saturated at p_max = {p_max}; largest reliable t is {t_max:e}")]
    Saturation { p_max: usize, t_max: f64 },

    #[error("aliasing: eps = {eps:e} is below the minimal admissible eps {min_eps:e} for this grid")]
    Aliasing { eps: f64, min_eps: f64 },

    #[error("resolution: {0}")]
    Resolution(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("mismatch: {0}")]
    Mismatch(String),

    #[error("point outside box: {0}")]
    OutsideBox(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
