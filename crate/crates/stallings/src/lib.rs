//! Finitely generated subgroups of free groups, represented as folded
//! inverse automata.
//!
//! Every finitely generated subgroup `H` of a free group has a unique
//! smallest deterministic pointed automaton recognizing exactly the reduced
//! words of `H` as labels of closed walks at the basepoint. This crate
//! computes that automaton by folding a flower of generator petals, and
//! builds the classical algorithmic suite on top of it:
//!
//! - membership with generator-word witnesses ([`Subgroup::contains`],
//!   [`Subgroup::express`]);
//! - free bases, rank, and presentations from folding loss
//!   ([`Subgroup::basis`], [`Subgroup::presentation`]);
//! - index, transversals, normality, and conjugacy ([`Subgroup::index`],
//!   [`Subgroup::is_normal`], [`Subgroup::conjugator`]);
//! - intersections and Hanna Neumann sums via pullbacks
//!   ([`intersections::intersect`], [`intersections::shn_report`]);
//! - malnormality and coset intersection;
//! - the finite-index census, saturation constructions, and the fringe of a
//!   subgroup ([`constructions`]);
//! - coset enumeration for finitely presented quotients ([`coset_enum`]).
//!
//! The accompanying book under `book/` walks through the theory with
//! runnable examples; `guide` doc-tests keep the book chapters compiling.

pub mod automaton;
pub mod constructions;
pub mod coset_enum;
pub mod folding;
pub mod guide;
pub mod intersections;
pub mod subgroup;
pub mod words;

pub use automaton::{ArcId, Automaton, VertexId, Walk};
pub use folding::{FoldKind, FoldRecord, FoldingTrace};
pub use subgroup::{IndexReport, Subgroup};
pub use words::{free_reduce, parse_word, Alphabet, Letter, Word};

/// Crate-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("unknown letter {0:?}")]
    UnknownLetter(char),
    #[error("malformed exponent in {0:?}")]
    MalformedExponent(String),
    #[error("alphabet must have rank at least 1")]
    EmptyAlphabet,
    #[error("bad alphabet names: {0}")]
    BadAlphabetNames(String),
    #[error("operands live over different alphabets")]
    AlphabetMismatch,
    #[error("automaton is not connected")]
    NotConnected,
    #[error("automaton is not deterministic")]
    NotDeterministic,
    #[error("vertex {0} is not in the automaton")]
    NoSuchVertex(usize),
    #[error("blocks do not partition the vertex set")]
    InvalidPartition,
    #[error("not a spanning tree of the automaton")]
    InvalidTree,
    #[error("arc pair is not foldable")]
    NotFoldable,
    #[error("step {0} is not a closed folding")]
    NotClosedFold(usize),
    #[error("step index {0} out of range")]
    StepOutOfRange(usize),
    #[error("walk is not a closed basepoint walk")]
    NotClosedWalk,
    #[error("walk does not decompose into petal traversals")]
    NotPetalWalk,
    #[error("word is not a member of the subgroup")]
    NotAMember,
    #[error("word reduces to the empty word")]
    TrivialWord,
    #[error("word to avoid lies in the subgroup")]
    AvoidWordInSubgroup,
    #[error("deficiency pairing search exhausted")]
    PairingExhausted,
    #[error("first subgroup is not contained in the second")]
    NotASubgroup,
    #[error("size bound exceeded: {0}")]
    BoundExceeded(String),
    #[error("invalid automaton data: {0}")]
    InvalidAutomaton(String),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
