//! Compiles the guide's code snippets as doc-tests, keeping the book in
//! sync with the library. mdBook cannot run snippets against a crate by
//! itself, so each chapter is attached to an empty module here and
//! `cargo test --doc` does the work.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/domains-and-grids.md")]
pub mod domains_and_grids {}

#[doc = include_str!("../../../book/src/weights-and-potentials.md")]
pub mod weights_and_potentials {}

#[doc = include_str!("../../../book/src/operator-assembly.md")]
pub mod operator_assembly {}

#[doc = include_str!("../../../book/src/eigensolvers.md")]
pub mod eigensolvers {}

#[doc = include_str!("../../../book/src/semiclassical-sweeps.md")]
pub mod semiclassical_sweeps {}

#[doc = include_str!("../../../book/src/shrinking-neighborhoods.md")]
pub mod shrinking_neighborhoods {}

#[doc = include_str!("../../../book/src/command-line.md")]
pub mod command_line {}
