pub mod cli;
pub mod distance;
pub mod error;
pub mod linalg;
pub mod photon;
pub mod quadrature;
pub mod report;
pub mod search;
pub mod spin;
pub mod statefile;
pub mod verify;

pub use error::{Error, Result};
