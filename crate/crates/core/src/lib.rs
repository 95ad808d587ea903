//! Exact p-adic volumes, local zeta sums and twisted character values of the
//! small representation of `PGL(4)` over `Q_p`, p odd.

pub mod character;
pub mod classreps;
pub mod closed_forms;
pub mod error;
pub mod forms;
pub mod localfield;
pub mod measure;
pub mod suite;
pub mod zeta;

pub use error::{Error, Result};
