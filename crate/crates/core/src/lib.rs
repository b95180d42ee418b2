//! Random graphs with `n` vertices, `m` edges and maximum degree at most `d`.
//!
//! * [`truncpoisson`]: the truncated Poisson degree law and its threshold.
//! * [`giant`]: subcritical/supercritical classification and the predicted
//!   giant-component fraction.
//! * [`sampler`]: exact uniform sampler (conditioned degree sequence,
//!   configuration pairing, full-restart simplicity rejection).
//! * [`components`]: component sizes and degree histograms.
//! * [`oracle`]: exhaustive enumeration and exact convolutions for tiny cases.
//! * [`experiments`]: sweeps, the percolation comparison and CSV output.

pub mod components;
pub mod error;
pub mod experiments;
pub mod giant;
pub mod oracle;
pub mod rng;
pub mod sampler;
pub mod truncpoisson;

pub use components::{connected_components, report, ComponentReport};
pub use error::{Error, Result};
pub use giant::{predict, Phase, PhasePrediction};
pub use sampler::{sample_graph, DegreeSequence, GraphSampler, SimpleGraph};
pub use truncpoisson::{critical_mean_degree, invert_truncated_mean, truncated_mean, DegreeLaw};
