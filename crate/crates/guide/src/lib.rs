//! The book under `book/src`, compiled so that `cargo test` runs every
//! snippet. One module per chapter keeps failures traceable.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}
#[doc = include_str!("../../../book/src/taxonomy.md")]
pub mod taxonomy {}
#[doc = include_str!("../../../book/src/quotient.md")]
pub mod quotient {}
#[doc = include_str!("../../../book/src/redundancy.md")]
pub mod redundancy {}
#[doc = include_str!("../../../book/src/network.md")]
pub mod network {}
#[doc = include_str!("../../../book/src/conditions.md")]
pub mod conditions {}
#[doc = include_str!("../../../book/src/simulation.md")]
pub mod simulation {}
#[doc = include_str!("../../../book/src/statistics.md")]
pub mod statistics {}
#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
