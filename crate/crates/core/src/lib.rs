//! Gromov-Hausdorff distances between finite ultrametric spaces.
//!
//! Spaces are distance matrices over exact rationals. The main entry points
//! are [`ugh()`], [`dgh_exact`], [`dghp`] and [`approx_dgh`]; the
//! [`oracle`] module gives brute-force reference values for small inputs.

pub mod approx;
pub mod cli;
pub mod dgh;
pub mod error;
pub mod io;
pub mod oracle;
pub mod pgh;
pub mod scalar;
pub mod space;
pub mod tree;
pub mod ugh;

pub use approx::{abs_ultrametricity, approx_dgh, single_linkage, ApproxResult};
pub use dgh::{candidate_set, dgh_exact, distortion, Correspondence, DghOptions, DghResult, Method};
pub use error::{Error, Result};
pub use pgh::{dghp, dis_p, lambda_p, PExponent, RootValue};
pub use scalar::Scalar;
pub use space::{FiniteSpace, MetricSpace, SpaceKind, Spectrum, UltraDissimilaritySpace, UltrametricSpace};
pub use tree::{SubspaceRef, UMTree};
pub use ugh::{ugh, ugh_dissimilarity, Search};
