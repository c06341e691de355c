pub mod analysis;
pub mod dual;
pub mod error;
pub mod expr;
pub mod germ;
pub mod levicivita;
pub mod numeric;
pub mod verdict;

pub use error::{Error, Result};
pub use verdict::{Grade, Verdict, Witness};
