use atf_core::{AtfError, HullError, LatticeError, MarkovError, PolytopeError, RenderError};

/// Anything that ends the process with exit code 1.
#[derive(Debug)]
pub enum CliError {
    Domain { kind: String, message: String },
}

impl CliError {
    pub fn new(kind: &str, message: impl Into<String>) -> Self {
        CliError::Domain {
            kind: kind.into(),
            message: message.into(),
        }
    }
}

macro_rules! from_core {
    ($($ty:ty),*) => {$(
        impl From<$ty> for CliError {
            fn from(e: $ty) -> Self {
                CliError::new(e.kind(), e.to_string())
            }
        }
    )*};
}

from_core!(AtfError, HullError, LatticeError, MarkovError, PolytopeError, RenderError);

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::new("Io", e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::new("InvalidInput", e.to_string())
    }
}
