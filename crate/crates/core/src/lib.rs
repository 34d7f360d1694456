// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod estimators;
pub mod exec;
pub mod freeconv;
pub mod laws;
pub mod ncpart;
pub mod rmtsim;
pub mod series;
pub mod transforms;
pub mod types;

pub use error::{Error, Result};
pub use estimators::{
    g2_fixed_point, g2_moment_route, info_noise_forward, info_noise_inverse, InfoNoiseParams,
    StieltjesSource,
};
pub use exec::ExecMode;
pub use laws::{moments_of, LawSpec};
pub use types::{AtomicMeasure, CumulantSequence, MomentSequence};
pub use rmtsim::{simulate_info_noise, EnsembleSpec, MomentEstimate};
