pub mod automorphy;
pub mod characteristics;
pub mod cli;
pub mod error;
pub mod lambda;
pub mod moebius;
pub mod padic;
pub mod theta;

pub use error::{Error, Result};
