use cluster_core::cartan::CartanError;
use cluster_core::double_bruhat::DbcError;
use cluster_core::seed::SeedError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error(transparent)]
    Seed(#[from] SeedError),
    #[error(transparent)]
    Dbc(#[from] DbcError),
    #[error(transparent)]
    Cartan(#[from] CartanError),
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

impl CliError {
    /// Process exit status; every error here is an input error.
    pub fn exit_code(&self) -> u8 {
        2
    }
}
