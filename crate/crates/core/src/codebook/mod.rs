//! Code constructions, rate bounds and minimal-length search.

mod bounds;
mod construct;
mod search;

pub use bounds::*;
pub use construct::*;
pub use search::*;
