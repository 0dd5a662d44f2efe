pub mod catalog;
pub mod cli;
pub mod error;
pub mod model;
pub mod norming;
pub mod numerics;
pub mod penultimate;
pub mod slowly_varying;
pub mod vonmises;

pub use error::{Error, ErrorInfo, Outcome, Result};
