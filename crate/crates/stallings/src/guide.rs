//! The book chapters, re-exported as rustdoc pages.
//!
//! Every Rust code block in `book/src/*.md` is compiled and run by
//! `cargo test --doc`, which keeps the guide in sync with the library.

#[doc = include_str!("../../../book/src/words.md")]
pub mod words {}

#[doc = include_str!("../../../book/src/automata.md")]
pub mod automata {}

#[doc = include_str!("../../../book/src/folding.md")]
pub mod folding {}

#[doc = include_str!("../../../book/src/subgroups.md")]
pub mod subgroups {}

#[doc = include_str!("../../../book/src/intersections.md")]
pub mod intersections {}

#[doc = include_str!("../../../book/src/constructions.md")]
pub mod constructions {}

#[doc = include_str!("../../../book/src/coset-enumeration.md")]
pub mod coset_enumeration {}
