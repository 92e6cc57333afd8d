//! Exact period computations for motive data over CM fields.

pub mod error;
pub mod hodge_combinatorics;
pub mod motive_model;
pub mod period_engine;
pub mod period_terms;
pub mod scalar_algebra;
