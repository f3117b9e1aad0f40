use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("index {index} is out of range for size {size}")]
    IndexOutOfRange { index: usize, size: usize },

    #[error("not a permutation of 0..{size}: {detail}")]
    NotAPermutation { size: usize, detail: String },

    #[error("entry {0} appears more than once in the promoted tuple")]
    DuplicateEntry(usize),

    #[error("size mismatch: expected {expected}, found {found}")]
    SizeMismatch { expected: usize, found: usize },

    #[error("sequence must not be empty")]
    EmptySequence,

    #[error("instance size {n} exceeds the brute-force cap {cap}")]
    CapExceeded { n: usize, cap: usize },

    /// Two lists for the same woman matched her to the same man but produced
    /// different full matchings.
    #[error("woman {woman} reaches man {man} through two different matchings")]
    UniquenessViolated { woman: usize, man: usize },
}
