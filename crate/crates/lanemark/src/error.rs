use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// Malformed file contents (bad magic, truncated payload, ...).
    #[error("format error: {0}")]
    Format(String),

    /// Structurally valid input that violates a contract (e.g. mismatched
    /// raster dimensions, template larger than the image).
    #[error("input error: {0}")]
    Input(String),

    /// Bad parameter passed to an operation.
    #[error("parameter error: {0}")]
    Parameter(String),

    /// Configuration file problem, with the offending line when known.
    #[error("config error: {msg}{}", line.map(|l| format!(" (line {l})")).unwrap_or_default())]
    Config { msg: String, line: Option<usize> },

    /// A peak region too small to carry an orientation.
    #[error("degenerate region: {0}")]
    DegenerateRegion(String),

    /// No valid depth near a detected pixel; the frame cannot be lifted to 3D.
    #[error("depth gap: {0}")]
    DepthGap(String),

    /// The three lane points are collinear; no plane is defined.
    #[error("degenerate plane: {0}")]
    DegeneratePlane(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn config(msg: impl Into<String>, line: usize) -> Self {
        Error::Config {
            msg: msg.into(),
            line: Some(line),
        }
    }

    pub(crate) fn config_global(msg: impl Into<String>) -> Self {
        Error::Config {
            msg: msg.into(),
            line: None,
        }
    }

    /// Process exit code for the CLI: 1 for input/config problems, 2 for I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Io(_) => 2,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
