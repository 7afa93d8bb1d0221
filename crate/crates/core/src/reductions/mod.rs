//! Encoders into the embedding framework and their decoders: Post's
//! correspondence problem into partially-codirect instances with a
//! non-regular constraint, and reachability of length-preserving string
//! rewriting into the co&dir variant, plus an independent breadth-first
//! reachability oracle used to cross-check the encodings.

use thiserror::Error;

mod pcp;
mod semithue;

pub use pcp::{encode_pcp, PcpEncoding, PcpInstance};
pub use semithue::{
    build_step_languages, decode_semithue_solution, derivation_to_solution, encode_semithue,
    one_step_successors, semithue_reach_oracle, shuffle, Decoration, Derivation, EncodedAlphabet,
    ReachOptions, ReachReport, RewriteRule, RewriteStep, SemiThueEncoding, SemiThueSystem,
    StepLanguages,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ReductionError {
    #[error("token `{0}` clashes with a reserved encoding token")]
    TokenClash(String),
    #[error("rule {index} is not length-preserving ({lhs_len} vs {rhs_len})")]
    NotLengthPreserving {
        index: usize,
        lhs_len: usize,
        rhs_len: usize,
    },
    #[error("rule {0} must not be empty")]
    EmptyRule(usize),
    #[error("the start language must not contain the empty word")]
    EpsilonInStartLanguage,
    #[error("shuffle requires words of equal length")]
    ShuffleLengthMismatch,
    #[error("no overlined twin for token `{0}`")]
    NoOverlinedTwin(String),
    #[error("derivation must have an even, non-zero number of steps")]
    DerivationNotEvenNonzero,
    #[error("derivation words must share one non-zero length")]
    DerivationLengthMismatch,
    #[error("derivation step {0} does not rewrite by its stated rule")]
    DerivationStepInvalid(usize),
    #[error("derivation endpoint not in the {0} language")]
    DerivationEndpoint(&'static str),
    #[error("the word is not a solution of the encoded instance")]
    DecodeNotASolution,
    #[error("malformed encoded solution: {0}")]
    DecodeMalformed(String),
    #[error("budget exhausted after {explored} expansions")]
    BudgetExceeded { explored: u64 },
    #[error("{0}")]
    Instance(String),
    #[error("alphabet construction failed: {0}")]
    Alphabet(String),
}

impl From<crate::instance::InstanceError> for ReductionError {
    fn from(e: crate::instance::InstanceError) -> Self {
        ReductionError::Instance(e.to_string())
    }
}

impl From<crate::words::AlphabetError> for ReductionError {
    fn from(e: crate::words::AlphabetError) -> Self {
        ReductionError::Alphabet(e.to_string())
    }
}

impl From<crate::words::WordError> for ReductionError {
    fn from(e: crate::words::WordError) -> Self {
        ReductionError::Alphabet(e.to_string())
    }
}
