//! Library side of the command-line front end: graph ingestion, the
//! synthetic edge-stream generator, the query registry, the concurrent
//! update/query driver, and memory statistics. The binary in `main.rs` is a
//! thin argument layer over these modules.

pub mod adjacency;
pub mod queries;
pub mod rmat;
pub mod stats;
pub mod stream;
pub mod updates;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}:{line}: {msg}")]
    Parse {
        path: String,
        line: usize,
        msg: String,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Core(#[from] streamgraph_core::Error),
    #[error("{0}")]
    Invalid(String),
}

impl CliError {
    pub fn parse(path: &str, line: usize, msg: impl Into<String>) -> CliError {
        CliError::Parse {
            path: path.to_string(),
            line,
            msg: msg.into(),
        }
    }
}
