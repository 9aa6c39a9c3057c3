use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("unknown point `{0}`")]
    UnknownPoint(String),
    #[error("invalid poset: {0}")]
    InvalidPoset(String),
    #[error("empty poset")]
    EmptyPoset,
    #[error("covering does not cover point `{0}`")]
    NotACovering(String),
    #[error("set is not open: {0}")]
    NotOpen(String),
    #[error("invalid simplicial complex: {0}")]
    InvalidSimplicial(String),
    #[error("invalid ring: {0}")]
    InvalidRing(String),
    #[error("invalid ring homomorphism: {0}")]
    InvalidRingHom(String),
    #[error("invalid module: {0}")]
    InvalidModule(String),
    #[error("invalid module homomorphism: {0}")]
    InvalidHom(String),
    #[error("ring mismatch: {0}")]
    RingMismatch(String),
    #[error("{size} elements exceed the enumeration cap {cap}")]
    CapExceeded { size: u128, cap: u128 },
    #[error("invalid sheaf: {0}")]
    InvalidSheaf(String),
    #[error("invalid morphism: {0}")]
    InvalidMorphism(String),
    #[error("invalid complex: {0}")]
    InvalidComplex(String),
    #[error("space mismatch")]
    SpaceMismatch,
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("resolution depth {given} below the required minimum {min}")]
    DepthTooSmall { given: i64, min: i64 },
    #[error("degree window [{lo}, {hi}] exceeds the reliable range [{rlo}, {rhi}]")]
    WindowUnreliable { lo: i64, hi: i64, rlo: i64, rhi: i64 },
    #[error("no solution: {0}")]
    NoSolution(String),
}

pub type Result<T> = std::result::Result<T, Error>;
