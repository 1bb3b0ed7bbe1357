use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("could not parse configuration: {0}")]
    Toml(#[from] toml::de::Error),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error(transparent)]
    Domain(#[from] tricoh::Error),
    /// A sweep or point failed at a specific parameter set.
    #[error("at {coords}: {source}")]
    Point {
        coords: String,
        source: tricoh::Error,
    },
    #[error("worker pool: {0}")]
    Pool(String),
}
