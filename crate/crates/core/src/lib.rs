//! Exact counting engine for the exchange shuffle.
//!
//! The exchange shuffle applies the transpositions `(1 a_1)`, `(2 a_2)`, ...,
//! `(n a_n)` in that order, where each `a_j` is drawn from `{1, ..., n}`. A
//! word `a = (a_1, ..., a_n)` therefore produces the permutation
//! `(n a_n) ... (2 a_2) (1 a_1)`, and the multiplicity of a permutation is the
//! number of words producing it. This crate computes those multiplicities
//! exactly, classifies the digraph a word induces, finds the most likely
//! permutations per cycle class, and derives fixed-point distributions both
//! for finite deck sizes and in the limit.
//!
//! Module map:
//!
//! - [`perm`]: permutations, cycle sequences, cycle classes, and the symmetry
//!   operators (concatenation, flip, order reversal).
//! - [`word`]: shuffle words, the digraph they induce, its ring/tree anatomy,
//!   and word-level symmetry maps.
//! - [`oracle`]: brute-force enumeration ground truth for every count.
//! - [`engine`]: the structured counting engine (closed forms, tree tables,
//!   unicyclic split sums, involution recombination).
//! - [`extremal`]: per-class maxima and the most-likely-permutation table.
//! - [`series`]: exact generating-function pipeline and the limiting
//!   fixed-point distribution.
//! - [`verify`]: named cross-check batteries shared by the CLI and tests.
//!
//! All counts are exact big integers ([`BigCount`]); series arithmetic is
//! exact big rationals. Floating point appears only in the limit
//! distribution.

pub mod engine;
pub mod extremal;
pub mod oracle;
pub mod perm;
pub mod series;
pub mod verify;
pub mod word;

use thiserror::Error;

/// Exact count type used by every counting API.
pub type BigCount = num_bigint::BigUint;

/// Which universe of words a tally ranges over.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Mode {
    /// All `n^n` words: every entry drawn independently from `{1, ..., n}`.
    Uniform,
    /// The `n!` words that are themselves permutations of `{1, ..., n}`.
    Permutation,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Uniform => "uniform",
            Mode::Permutation => "permutation",
        }
    }
}

/// Errors surfaced by parsing, cap enforcement, and exact arithmetic.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// Malformed cycle notation or word literal.
    #[error("parse error: {0}")]
    Parse(String),
    /// An element appeared twice where distinctness is required.
    #[error("duplicate element {0}")]
    DuplicateElement(u32),
    /// An element lies outside the permitted range.
    #[error("element {element} out of range for degree {degree}")]
    OutOfRange { element: u32, degree: usize },
    /// A computation would exceed a configured enumeration cap.
    #[error("{what}: size {requested} exceeds cap {cap}")]
    CapExceeded {
        what: &'static str,
        requested: usize,
        cap: usize,
    },
    /// A word was declared to represent a concatenation but does not.
    #[error("word does not represent the declared concatenation ({0})")]
    NotConcatenation(String),
    /// An exact division in a closed form failed; the formula is misread.
    #[error("inexact division in closed form: {0}")]
    InexactDivision(String),
    /// A series operation would exceed the configured truncation order.
    #[error("series truncation exceeded: {0}")]
    Truncation(String),
    /// A precondition on operands was violated.
    #[error("invalid operand: {0}")]
    InvalidOperand(String),
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
