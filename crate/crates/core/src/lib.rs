// `!(x < y)` comparisons are meant to reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod direct;
pub mod error;
pub mod field;
pub mod io;
pub mod mask;
pub mod pipeline;
pub mod snake;
pub mod solver;
pub mod spectral;
pub mod synth;
