use thiserror::Error;

use crate::arith::ArithError;
use crate::characters::CharacterError;
use crate::density::DensityError;
use crate::lfunc::LfuncError;
use crate::ratios::RatiosError;
use crate::special::SpecialError;
use crate::testfn::{QuadratureError, TestFnError};

/// Crate-level error, used where several modules meet.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error(transparent)]
    Special(#[from] SpecialError),
    #[error(transparent)]
    Character(#[from] CharacterError),
    #[error(transparent)]
    Lfunc(#[from] LfuncError),
    #[error(transparent)]
    TestFn(#[from] TestFnError),
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
    #[error(transparent)]
    Density(#[from] DensityError),
    #[error(transparent)]
    Ratios(#[from] RatiosError),
}

/// Coarse classification used for process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Argument,
    Numeric,
    Resource,
}

fn arith_kind(e: &ArithError) -> ErrorKind {
    match e {
        ArithError::SieveBudget { .. } => ErrorKind::Resource,
        _ => ErrorKind::Argument,
    }
}

fn character_kind(e: &CharacterError) -> ErrorKind {
    match e {
        CharacterError::Arith(a) => arith_kind(a),
        _ => ErrorKind::Argument,
    }
}

fn lfunc_kind(e: &LfuncError) -> ErrorKind {
    match e {
        LfuncError::Character(c) => character_kind(c),
        LfuncError::Strip(_) | LfuncError::Height(_) | LfuncError::Principal => ErrorKind::Argument,
        _ => ErrorKind::Numeric,
    }
}

fn density_kind(e: &DensityError) -> ErrorKind {
    match e {
        DensityError::Modulus(_) | DensityError::Coverage { .. } => ErrorKind::Argument,
        DensityError::Arith(a) => arith_kind(a),
        _ => ErrorKind::Numeric,
    }
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Arith(e) => arith_kind(e),
            Error::Character(e) => character_kind(e),
            Error::Lfunc(e) => lfunc_kind(e),
            Error::TestFn(_) => ErrorKind::Argument,
            Error::Special(_) | Error::Quadrature(_) => ErrorKind::Numeric,
            Error::Density(e) => density_kind(e),
            Error::Ratios(e) => match e {
                RatiosError::Modulus(_) | RatiosError::Params(_) => ErrorKind::Argument,
                RatiosError::Budget { .. } => ErrorKind::Resource,
                RatiosError::Character(c) => character_kind(c),
                RatiosError::Lfunc(l) => lfunc_kind(l),
                RatiosError::Density(d) => density_kind(d),
                _ => ErrorKind::Numeric,
            },
        }
    }
}
