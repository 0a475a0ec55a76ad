//! Exact equivalence classes, class sizes, entropies and description
//! complexity for graded universal modal logic over finite models.

pub mod classes;
pub mod cli;
pub mod combinatorics;
pub mod complexity;
pub mod distribution;
pub mod error;
pub mod game;
pub mod logic;
mod serde_util;

pub use error::{Error, Result};
