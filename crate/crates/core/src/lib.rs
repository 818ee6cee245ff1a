pub mod cli;
pub mod descriptor;
pub mod dist;
pub mod error;
pub mod gallery;
pub mod lp;
pub mod matroid;
pub mod offline;
pub mod online;
pub mod rational;
pub mod rng;
pub mod subset;

pub use error::{Error, Result};
pub use rational::{Extended, Factor, Rational};
pub use subset::Subset;
