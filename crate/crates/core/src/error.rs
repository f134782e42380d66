use thiserror::Error;

/// Errors raised while building, loading, or generating graphs.
#[derive(Debug, Error)]
pub enum GraphError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("invalid graph: {0}")]
    Validation(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Failures of a single tool invocation. The input memory is never modified.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ToolError {
    #[error("unknown tool `{0}`")]
    ToolNotFound(String),
    #[error("bad parameters for `{tool}`: {message}")]
    ParamError { tool: String, message: String },
    #[error("`{tool}` failed: {description}")]
    ToolExecutionError { tool: String, description: String },
}

impl ToolError {
    pub(crate) fn param(tool: &str, message: impl Into<String>) -> Self {
        ToolError::ParamError {
            tool: tool.to_string(),
            message: message.into(),
        }
    }

    pub(crate) fn exec(tool: &str, description: impl Into<String>) -> Self {
        ToolError::ToolExecutionError {
            tool: tool.to_string(),
            description: description.into(),
        }
    }
}

#[derive(Debug, Error)]
pub enum ScorerError {
    #[error("relevance scorer unavailable: {0}")]
    ScorerUnavailable(String),
    #[error("query carries no ground-truth target set; use a remote scorer")]
    MissingGroundTruth,
}

/// Errors from the exploration environment and task generation.
#[derive(Debug, Error)]
pub enum EnvError {
    #[error("invalid query: {0}")]
    Validation(String),
    #[error("contract violation: {0}")]
    Contract(String),
    #[error("task generation: {0}")]
    Generation(String),
    #[error(transparent)]
    Scorer(#[from] ScorerError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Error)]
pub enum PolicyError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("contract violation: {0}")]
    Contract(String),
    #[error(transparent)]
    Env(#[from] EnvError),
    #[error("checkpoint: {0}")]
    Checkpoint(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Error)]
pub enum SttaError {
    #[error("eigensolver did not converge after {iterations} restarts (max residual {max_residual:e})")]
    Unconverged {
        iterations: usize,
        values: Vec<f64>,
        residuals: Vec<f64>,
        max_residual: f64,
    },
    #[error("invalid request: {0}")]
    Validation(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("adaptation diverged: {0}")]
    Diverged(String),
    #[error(transparent)]
    Env(#[from] EnvError),
    #[error(transparent)]
    Policy(#[from] PolicyError),
}

#[derive(Debug, Error)]
pub enum DiagnosticsError {
    #[error("contract violation: {0}")]
    Contract(String),
    #[error("Markov property violated: p(m={m} | x={x}, y={y}, ir={ir}) = {joint_conditional} but p(m | x) = {marginal_conditional}")]
    MarkovViolation {
        m: usize,
        x: usize,
        y: usize,
        ir: usize,
        joint_conditional: f64,
        marginal_conditional: f64,
    },
}
