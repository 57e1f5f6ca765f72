pub mod channel;
pub mod error;
pub mod fixtures;
pub mod games;
pub mod io;
pub mod label;
pub mod matrix;
pub mod pwd;
pub mod report;
pub mod solver;
pub mod vulnerability;

pub use error::{Error, Result};
pub use label::Label;
