pub mod cli;
pub mod cone;
pub mod error;
pub mod frobenius;
pub mod input;
pub mod jacobian;
pub mod oracle;
pub mod padic;
pub mod pipeline;
pub mod polytope;
pub mod reduction;
pub mod splitting;
pub mod zeta;

pub use error::{Error, Result};
