use thiserror::Error;

use crate::instance::Diagnostic;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid instance: {}", format_diagnostics(.0))]
    Invalid(Vec<Diagnostic>),

    #[error("classes of `{vertex}` are not laminar")]
    NonLaminar { vertex: String },

    #[error("instance is not many-to-one: {reason}")]
    NotManyToOne { reason: String },

    #[error("popularity is only defined when every applicant has quota 1")]
    ManyToManyUnsupported,

    #[error("arc between `{tail}` and `{head}` already exists")]
    DuplicateArc { tail: String, head: String },

    #[error("source still reaches sink in the residual graph; flow is not maximum")]
    SourceReachesSink,

    #[error("instance has {size} {what}, above the brute-force limit of {cap}")]
    TooLarge {
        what: &'static str,
        size: usize,
        cap: usize,
    },

    #[error("invalid matching: {0}")]
    InvalidMatching(String),
}

fn format_diagnostics(diags: &[Diagnostic]) -> String {
    diags
        .iter()
        .map(|d| d.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
