use opq_core::asymptotics::AsymptoticsError;
use opq_core::geronimus::GeronimusError;
use opq_core::jacobi::JacobiError;
use opq_core::sobolev::SobolevError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum OpqError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl OpqError {
    /// Exit code for this error; verification failures (code 1) are not
    /// errors and are reported by the caller.
    pub fn exit_code(&self) -> i32 {
        2
    }
}

macro_rules! domain_from {
    ($($t:ty),*) => {$(
        impl From<$t> for OpqError {
            fn from(e: $t) -> Self {
                OpqError::Domain(e.to_string())
            }
        }
    )*};
}

domain_from!(JacobiError, GeronimusError, SobolevError, AsymptoticsError);
