use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed or unsupported user input.
    #[error("invalid input: {0}")]
    Input(String),

    /// A precondition of an operation does not hold for the given data.
    #[error("hypothesis not satisfied: {0}")]
    Hypothesis(String),

    /// A computed object contradicts a proved statement. These should never
    /// fire on correct inputs and indicate a bug upstream.
    #[error("theorem consistency violation: {0}")]
    Consistency(String),

    #[error("search budget of {limit} nodes exceeded in {context}")]
    Budget { context: String, limit: u64 },

    #[error("missing input: {0}")]
    Missing(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    pub fn hypothesis(msg: impl Into<String>) -> Self {
        Error::Hypothesis(msg.into())
    }

    pub fn consistency(msg: impl Into<String>) -> Self {
        Error::Consistency(msg.into())
    }
}
