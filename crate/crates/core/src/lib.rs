pub mod cli;
pub mod error;
pub mod extract;
pub mod fields;
pub mod invar;
pub mod linkdeg;
pub mod quat;

pub use error::{Error, Result};
