//! Graph tool-chaining with progressive memory distillation.
//!
//! An agent answers analytical graph queries by chaining tools from a fixed
//! library. Each tool shrinks or annotates an external memory state, and the
//! reward pays for description-length reduction and relevance gain. The crate
//! holds the toolkit, the MDP, a linear-softmax PPO learner, spectral
//! test-time adaptation, and exact information diagnostics.

pub mod diagnostics;
pub mod distill;
pub mod env;
pub mod error;
pub mod graph;
pub mod policy;
pub mod stta;
pub mod tools;

pub use distill::{gdl, step_reward, terminal_reward, GdlWeights, MemoryState, RewardBreakdown, RewardWeights, Scorer, ScorerConfig};
pub use env::{run_episode, Action, EnvConfig, EnvState, Query, TaskTemplate, Trajectory};
pub use error::{DiagnosticsError, EnvError, GraphError, PolicyError, ScorerError, SttaError, ToolError};
pub use graph::{FeatureMatrix, Graph};
pub use tools::{invoke, registry, ToolResult, ToolSpec};
