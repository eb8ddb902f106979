//! Density-preserving t-SNE.
//!
//! Classic t-SNE normalizes every neighbourhood to the same perplexity, so
//! clusters of very different spread come out looking equally dense. This
//! crate implements both classic t-SNE and a density-preserving variant
//! (dtSNE) that carries the ratio of local kernel widths into the embedding
//! space, so that a cluster four times as spread out in the input stays
//! visibly larger in the output.
//!
//! The pipeline is: fit affinities ([`affinity`]), optimize the embedding
//! ([`embedder`]), and score the result ([`metrics`]). [`synthgen`] builds
//! the synthetic benchmark datasets, and [`io`] handles the on-disk table
//! format. Every stage is deterministic: the same inputs produce the same
//! bytes.

pub mod affinity;
pub mod embedder;
pub mod error;
pub mod io;
pub mod linalg;
pub mod matrix;
pub mod metrics;
pub mod synthgen;
pub mod types;

pub use error::{Error, Result};
pub use matrix::{Matrix, SquareMatrix};
pub use types::{
    config_fingerprint, AffinityModel, Dataset, Embedding, EmbeddingConfig, Method, QualityReport,
};
