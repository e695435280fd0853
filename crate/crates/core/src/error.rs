use thiserror::Error;

use crate::foam::FoamError;
use crate::web::WebError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Web(#[from] WebError),

    #[error(transparent)]
    Foam(#[from] FoamError),

    /// A computed object violated an identity that must hold by construction
    /// (d∘d = 0, unimodular pairing, chain map commutation, ...).
    #[error("internal consistency failure: {0}")]
    Consistency(String),

    #[error("invalid input: {0}")]
    Invalid(String),
}

impl Error {
    pub fn is_consistency(&self) -> bool {
        matches!(self, Error::Consistency(_) | Error::Foam(FoamError::Incomplete(_)))
    }
}
