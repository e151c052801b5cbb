use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("schema error: {0}")]
    Schema(String),
    #[error("usage error: {0}")]
    Usage(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("incompatible slant sum: v1[{star1}] = {v1} but w2[{star2}] = {w2}")]
    Incompatible {
        star1: String,
        v1: u32,
        star2: String,
        w2: u32,
    },
    #[error("fixed point is not split over vertex {0}")]
    NotSplit(String),
    #[error("pole at degree tuple {0:?}")]
    Pole(Vec<i64>),
    #[error("series does not truncate: {0}")]
    NonTruncating(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
