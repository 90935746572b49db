//! Tanh-weighted Wirtinger flows for real phase retrieval.
//!
//! The crate covers instance generation ([`problem`]), spectral
//! initialization ([`init`]), the gradient rules ([`flows`]), the accelerated
//! refinement loop ([`optimizer`]), numerical checks of the curvature and
//! spectral bounds ([`analysis`]) and the success-rate harness ([`bench`]).
//!
//! Heavy loops run on rayon when the `parallel` feature is enabled (the
//! default). Every reduction uses a fixed block order, so results do not
//! depend on the execution mode or the thread count.

// comparisons are written as `!(a > b)` on purpose so NaN falls into the error branch
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod bench;
pub mod error;
pub mod exec;
pub mod flows;
pub mod init;
pub mod linalg;
pub mod optimizer;
pub mod problem;

pub use error::{Error, Result};
pub use exec::Execution;
pub use flows::{FlowRule, RtanhParams, TwfParams};
pub use init::{spectral_init, InitMethod, InitVariant};
pub use problem::{make_instance, observe, relative_error, ErrorStats, Measurements, ProblemInstance};
pub use optimizer::{schedule_coefficient, solve, SolveOptions, SolveReport};
