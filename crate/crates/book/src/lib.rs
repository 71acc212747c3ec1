//! The guide in `book/` is plain mdbook, which cannot build snippets that
//! depend on this workspace. Each chapter is included here as a module doc
//! instead, so `cargo test` runs every code block against the real crate.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}
#[doc = include_str!("../../../book/src/transforms.md")]
pub mod transforms {}
#[doc = include_str!("../../../book/src/channel.md")]
pub mod channel {}
#[doc = include_str!("../../../book/src/effective.md")]
pub mod effective {}
#[doc = include_str!("../../../book/src/phase.md")]
pub mod phase {}
#[doc = include_str!("../../../book/src/detection.md")]
pub mod detection {}
#[doc = include_str!("../../../book/src/simulation.md")]
pub mod simulation {}
#[doc = include_str!("../../../book/src/results.md")]
pub mod results {}
