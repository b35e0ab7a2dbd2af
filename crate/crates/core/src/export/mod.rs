//! Byte-deterministic serialization of networks and reports.
//!
//! Every writer has a matching reader, and write → read → write is a fixed
//! point at the byte level. All files are UTF-8 with LF line endings.

mod document;
mod pajek;
mod reports;
mod vosviewer;

pub use document::{to_network_document, NetworkDocument, NetworkEdge, NetworkNode};
pub use pajek::{read_pajek, write_pajek};
pub use reports::{write_reports, METRICS_FILE, SUMMARY_FILE, TLD_FREQUENCY_FILE};
pub use vosviewer::{read_vosviewer, write_vosviewer};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ExportError {
    #[error("export io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("label {label:?} contains a character the {format} format cannot carry")]
    InvalidLabel { label: String, format: &'static str },
    #[error("{path}:{line}: {message}")]
    Malformed {
        path: String,
        line: usize,
        message: String,
    },
}

impl ExportError {
    fn malformed(path: &std::path::Path, line: usize, message: impl Into<String>) -> Self {
        ExportError::Malformed {
            path: path.display().to_string(),
            line,
            message: message.into(),
        }
    }
}
