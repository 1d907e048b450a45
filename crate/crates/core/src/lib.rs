pub mod category;
pub mod error;
pub mod examples;
pub mod linalg;
pub mod modules;
pub mod pretr;
pub mod quotient;

pub use error::{Error, Result};
