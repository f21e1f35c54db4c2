#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod analysis;
pub mod geometry;
pub mod layerops;
pub mod nep;
pub mod oracle;
pub mod quadrature;
pub mod specfun;

pub use error::{Error, Result};
