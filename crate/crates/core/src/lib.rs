//! Hyperbolic surfaces from pants decompositions, their Fenchel-Nielsen
//! coordinates and the length-spectrum metric.

// `!(x > 0.0)` style checks are meant to reject NaN as well
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod hyp_core;
pub mod pants_surface;
pub mod curves;
pub mod spectrum;
pub mod twist_flow;
pub mod fn_map;
pub mod closure;
pub mod generate;

pub use error::{Error, Result};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
