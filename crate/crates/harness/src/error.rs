use std::io;
use std::path::PathBuf;

use ratioslab_core::ErrorKind;
use thiserror::Error;

use crate::fit::FitError;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Core(#[from] ratioslab_core::Error),
    #[error("{0}")]
    Argument(String),
    #[error("numeric consistency: {0}")]
    Numeric(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("{path}: malformed record: {message}")]
    Parse { path: PathBuf, message: String },
    #[error(transparent)]
    Fit(#[from] FitError),
    #[error("q={q}, method {method}: {source}")]
    Context {
        q: u64,
        method: &'static str,
        #[source]
        source: Box<HarnessError>,
    },
}

impl HarnessError {
    pub fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        HarnessError::Io {
            path: path.into(),
            source,
        }
    }

    pub fn context(self, q: u64, method: &'static str) -> Self {
        HarnessError::Context {
            q,
            method,
            source: Box::new(self),
        }
    }

    pub fn kind(&self) -> ErrorKind {
        match self {
            HarnessError::Core(e) => e.kind(),
            HarnessError::Argument(_) | HarnessError::Parse { .. } => ErrorKind::Argument,
            HarnessError::Numeric(_) | HarnessError::Fit(_) => ErrorKind::Numeric,
            HarnessError::Io { .. } => ErrorKind::Resource,
            HarnessError::Context { source, .. } => source.kind(),
        }
    }

    /// Process exit code: 2 argument, 3 numeric consistency, 4 resource.
    pub fn exit_code(&self) -> i32 {
        match self.kind() {
            ErrorKind::Argument => 2,
            ErrorKind::Numeric => 3,
            ErrorKind::Resource => 4,
        }
    }
}

macro_rules! via_core {
    ($($t:ty),*) => {$(
        impl From<$t> for HarnessError {
            fn from(e: $t) -> Self {
                HarnessError::Core(e.into())
            }
        }
    )*};
}

via_core!(
    ratioslab_core::arith::ArithError,
    ratioslab_core::characters::CharacterError,
    ratioslab_core::lfunc::LfuncError,
    ratioslab_core::testfn::TestFnError,
    ratioslab_core::density::DensityError,
    ratioslab_core::ratios::RatiosError,
    ratioslab_core::special::SpecialError,
    ratioslab_core::testfn::QuadratureError
);
