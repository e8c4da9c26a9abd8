use std::io;

/// Errors from the experiment harness.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A core routine failed.
    #[error(transparent)]
    Core(#[from] medlat_core::Error),

    /// Reading or writing a file failed.
    #[error("io: {0}")]
    Io(#[from] io::Error),

    /// CSV encoding or decoding failed.
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    /// A file or flag could not be parsed.
    #[error("parse: {0}")]
    Parse(String),

    /// The configuration is inconsistent.
    #[error("config: {0}")]
    Config(String),

    /// The worker pool could not be built.
    #[error("thread pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
}

/// Result alias for this crate.
pub type Result<T> = std::result::Result<T, Error>;
