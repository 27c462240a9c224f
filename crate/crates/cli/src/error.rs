use std::path::PathBuf;

use thiserror::Error;

/// Process exit codes.
pub mod exit {
    pub const SUCCESS: i32 = 0;
    pub const USAGE: i32 = 2;
    pub const DATA: i32 = 3;
    pub const MISSING_ARTIFACT: i32 = 4;
}

#[derive(Debug, Error)]
pub enum StageError {
    #[error("{stage}: missing input {}", path.display())]
    MissingArtifact { stage: &'static str, path: PathBuf },

    #[error("{stage}: {message}")]
    Usage { stage: &'static str, message: String },

    #[error("{stage}: {source}")]
    Data {
        stage: &'static str,
        #[source]
        source: dforge_core::Error,
    },
}

impl StageError {
    pub fn exit_code(&self) -> i32 {
        match self {
            StageError::MissingArtifact { .. } => exit::MISSING_ARTIFACT,
            StageError::Usage { .. } => exit::USAGE,
            StageError::Data { .. } => exit::DATA,
        }
    }

    pub fn stage(&self) -> &'static str {
        match self {
            StageError::MissingArtifact { stage, .. }
            | StageError::Usage { stage, .. }
            | StageError::Data { stage, .. } => stage,
        }
    }
}

pub type StageResult<T> = Result<T, StageError>;

/// Attaches a stage name to core errors.
pub(crate) trait InStage<T> {
    fn in_stage(self, stage: &'static str) -> StageResult<T>;
}

impl<T> InStage<T> for dforge_core::Result<T> {
    fn in_stage(self, stage: &'static str) -> StageResult<T> {
        self.map_err(|source| StageError::Data { stage, source })
    }
}
