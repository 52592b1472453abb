pub mod bounds;
pub mod cli;
pub mod clustering;
pub mod design;
pub mod error;
pub mod estimation;
pub mod graph;
pub mod io;
pub mod matching;
pub mod outcome;
pub mod rng;
pub mod simulation;

pub use error::{Error, Result};
