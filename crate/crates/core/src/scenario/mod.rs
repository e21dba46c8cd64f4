//! Scenario generators, run orchestration, output files and crack analytics.

pub mod analysis;
pub mod geometry;
pub mod output;
pub mod run;
pub mod spec;

use thiserror::Error;

pub use analysis::{analyze, CrackMetrics, ImpactMetrics};
pub use geometry::{generate, CrackFrame, FrameKind, Model, Setup};
pub use run::{run, Manifest, RunSummary};
pub use spec::{DamageSpec, Geometry, LoadSpec, MaterialSpec, ScenarioSpec, SolverSpec, SCENARIOS};

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("unknown scenario '{0}' (expected one of: {list})", list = SCENARIOS.join(", "))]
    UnknownScenario(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Material(#[from] crate::material::MaterialError),
    #[error(transparent)]
    Kernel(#[from] crate::kernel::KernelError),
    #[error("setup failed: {0}")]
    Setup(#[from] crate::dynamics::SimError),
    #[error("{path}: {source}")]
    Io {
        path: std::path::PathBuf,
        source: std::io::Error,
    },
    #[error("run aborted: {0}")]
    Aborted(crate::dynamics::SimError),
}

impl ScenarioError {
    /// Process exit code: 2 for configuration problems, 1 for runtime failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::UnknownScenario(_) | Self::Config(_) | Self::Material(_) | Self::Kernel(_) | Self::Setup(_) => 2,
            Self::Io { .. } | Self::Aborted(_) => 1,
        }
    }
}
