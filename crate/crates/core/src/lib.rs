pub mod algebra;
pub mod error;
pub mod experiments;
pub mod finite;
pub mod germ;
pub mod linalg;
pub mod par;
pub mod perm;
pub mod poly;
pub mod random;
pub mod rep;
pub mod scalar;
pub mod star;

pub use error::{Error, Result};
