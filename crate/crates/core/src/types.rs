//! Shared domain types: datasets, embeddings, configuration, and the
//! affinity/quality value objects passed between pipeline stages.

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::matrix::{Matrix, SquareMatrix};

/// Which embedding variant to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    /// Classic t-SNE: one bandwidth per point, unit low-dimensional kernel.
    Tsne,
    /// Density-preserving t-SNE: pairwise bandwidths and a per-pair kernel
    /// width ratio carried into the embedding space.
    Dtsne,
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Method::Tsne => write!(f, "tsne"),
            Method::Dtsne => write!(f, "dtsne"),
        }
    }
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "tsne" => Ok(Method::Tsne),
            "dtsne" => Ok(Method::Dtsne),
            other => Err(Error::InvalidConfig(format!(
                "unknown method {other:?}; expected \"tsne\" or \"dtsne\""
            ))),
        }
    }
}

/// A point cloud with optional integer labels.
#[derive(Debug, Clone)]
pub struct Dataset {
    /// Display name, used in messages only; not part of the data identity.
    pub name: String,
    /// One point per row.
    pub points: Matrix,
    /// Cluster labels, one per point, if known.
    pub labels: Option<Vec<i64>>,
}

impl Dataset {
    /// A dataset with no labels.
    pub fn new(name: impl Into<String>, points: Matrix) -> Self {
        Dataset {
            name: name.into(),
            points,
            labels: None,
        }
    }

    /// Number of points.
    pub fn len(&self) -> usize {
        self.points.rows()
    }

    /// True if the dataset holds no points.
    pub fn is_empty(&self) -> bool {
        self.points.rows() == 0
    }

    /// Checks the structural invariants every pipeline stage relies on:
    /// at least two points, all coordinates finite, and labels (if present)
    /// matching the point count.
    pub fn validate(&self) -> Result<()> {
        if self.points.rows() < 2 {
            return Err(Error::TooFewSamples {
                needed: 2,
                got: self.points.rows(),
            });
        }
        if let Some((row, col)) = self.points.find_non_finite() {
            return Err(Error::NonFinite { row, col });
        }
        if let Some(labels) = &self.labels {
            if labels.len() != self.points.rows() {
                return Err(Error::LabelLengthMismatch {
                    labels: labels.len(),
                    points: self.points.rows(),
                });
            }
        }
        Ok(())
    }
}

/// A low-dimensional embedding of a dataset.
#[derive(Debug, Clone)]
pub struct Embedding {
    /// One embedded point per row; column count is the output dimension.
    pub coords: Matrix,
    /// Hash of the configuration and input data that produced this
    /// embedding; identical runs produce identical fingerprints.
    pub config_fingerprint: String,
}

impl Embedding {
    /// Number of embedded points.
    pub fn len(&self) -> usize {
        self.coords.rows()
    }

    /// True if the embedding holds no points.
    pub fn is_empty(&self) -> bool {
        self.coords.rows() == 0
    }

    /// Output dimensionality.
    pub fn dim(&self) -> usize {
        self.coords.cols()
    }
}

/// Full configuration of an embedding run.
///
/// `Default` gives the settings used throughout the benchmarks: perplexity
/// 100, 750 iterations, automatic learning rate n/12, momentum 0.5 switching
/// to 0.8 after 20 iterations, early exaggeration by 12 for the first 100
/// iterations, inputs reduced to 50 principal components, 2-D output.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingConfig {
    pub method: Method,
    /// Target perplexity for the bandwidth search; must be below n.
    pub perplexity: f64,
    /// Number of gradient iterations T.
    pub iterations: usize,
    /// Step size; `None` resolves to n/12 at run time.
    pub learning_rate: Option<f64>,
    /// Momentum used for the first `momentum_switch_iter` iterations.
    pub momentum_early: f64,
    /// Momentum used from `momentum_switch_iter` onwards.
    pub momentum_late: f64,
    pub momentum_switch_iter: usize,
    /// Factor applied to the affinities during early exaggeration; 1 disables.
    pub exaggeration_factor: f64,
    /// Number of leading iterations run on exaggerated affinities.
    pub exaggeration_iters: usize,
    /// Inputs with more features than this are reduced by PCA first.
    pub pca_input_dims: usize,
    /// Output dimensionality; 2 or 3.
    pub out_dim: usize,
    /// Recorded in the fingerprint; the pipeline itself is deterministic.
    pub seed: u64,
}

impl Default for EmbeddingConfig {
    fn default() -> Self {
        EmbeddingConfig {
            method: Method::Dtsne,
            perplexity: 100.0,
            iterations: 750,
            learning_rate: None,
            momentum_early: 0.5,
            momentum_late: 0.8,
            momentum_switch_iter: 20,
            exaggeration_factor: 12.0,
            exaggeration_iters: 100,
            pca_input_dims: 50,
            out_dim: 2,
            seed: 0,
        }
    }
}

impl EmbeddingConfig {
    /// Default configuration for the given method.
    pub fn for_method(method: Method) -> Self {
        EmbeddingConfig {
            method,
            ..EmbeddingConfig::default()
        }
    }

    /// Validates the configuration against a dataset of `n` points.
    pub fn validate(&self, n: usize) -> Result<()> {
        if !self.perplexity.is_finite() || self.perplexity <= 1.0 {
            return Err(Error::InvalidConfig(format!(
                "perplexity must be a finite number greater than 1, got {}",
                self.perplexity
            )));
        }
        if self.perplexity >= n as f64 {
            return Err(Error::InvalidConfig(format!(
                "perplexity {} must be below the number of points {n}",
                self.perplexity
            )));
        }
        if self.iterations == 0 {
            return Err(Error::InvalidConfig("iterations must be at least 1".into()));
        }
        if let Some(lr) = self.learning_rate {
            if !lr.is_finite() || lr <= 0.0 {
                return Err(Error::InvalidConfig(format!(
                    "learning rate must be a finite positive number, got {lr}"
                )));
            }
        }
        for (name, m) in [
            ("early momentum", self.momentum_early),
            ("late momentum", self.momentum_late),
        ] {
            if !m.is_finite() || !(0.0..1.0).contains(&m) {
                return Err(Error::InvalidConfig(format!(
                    "{name} must lie in [0, 1), got {m}"
                )));
            }
        }
        if self.momentum_switch_iter > self.iterations {
            return Err(Error::InvalidConfig(format!(
                "momentum switch iteration {} exceeds total iterations {}",
                self.momentum_switch_iter, self.iterations
            )));
        }
        if !self.exaggeration_factor.is_finite() || self.exaggeration_factor < 1.0 {
            return Err(Error::InvalidConfig(format!(
                "exaggeration factor must be at least 1, got {}",
                self.exaggeration_factor
            )));
        }
        if self.exaggeration_iters > self.iterations {
            return Err(Error::InvalidConfig(format!(
                "exaggeration iterations {} exceed total iterations {}",
                self.exaggeration_iters, self.iterations
            )));
        }
        if self.pca_input_dims == 0 {
            return Err(Error::InvalidConfig(
                "pca input dimensions must be at least 1".into(),
            ));
        }
        if self.out_dim != 2 && self.out_dim != 3 {
            return Err(Error::InvalidConfig(format!(
                "output dimension must be 2 or 3, got {}",
                self.out_dim
            )));
        }
        Ok(())
    }

    /// The learning rate actually used for `n` points.
    pub fn effective_learning_rate(&self, n: usize) -> f64 {
        self.learning_rate.unwrap_or(n as f64 / 12.0)
    }
}

/// Computes the fingerprint recorded on every [`Embedding`]: a SHA-256 hex
/// digest over the full configuration and the dataset contents (points and
/// labels). The dataset name is deliberately excluded so that renaming a
/// file does not change the identity of a run.
pub fn config_fingerprint(config: &EmbeddingConfig, dataset: &Dataset) -> String {
    let mut h = Sha256::new();
    h.update([match config.method {
        Method::Tsne => 0u8,
        Method::Dtsne => 1u8,
    }]);
    h.update(config.perplexity.to_bits().to_le_bytes());
    h.update((config.iterations as u64).to_le_bytes());
    match config.learning_rate {
        None => h.update([0u8]),
        Some(lr) => {
            h.update([1u8]);
            h.update(lr.to_bits().to_le_bytes());
        }
    }
    h.update(config.momentum_early.to_bits().to_le_bytes());
    h.update(config.momentum_late.to_bits().to_le_bytes());
    h.update((config.momentum_switch_iter as u64).to_le_bytes());
    h.update(config.exaggeration_factor.to_bits().to_le_bytes());
    h.update((config.exaggeration_iters as u64).to_le_bytes());
    h.update((config.pca_input_dims as u64).to_le_bytes());
    h.update((config.out_dim as u64).to_le_bytes());
    h.update(config.seed.to_le_bytes());
    h.update((dataset.points.rows() as u64).to_le_bytes());
    h.update((dataset.points.cols() as u64).to_le_bytes());
    for v in dataset.points.data() {
        h.update(v.to_bits().to_le_bytes());
    }
    match &dataset.labels {
        None => h.update([0u8]),
        Some(labels) => {
            h.update([1u8]);
            for l in labels {
                h.update(l.to_le_bytes());
            }
        }
    }
    let digest = h.finalize();
    let mut out = String::with_capacity(64);
    for byte in digest {
        out.push_str(&format!("{byte:02x}"));
    }
    out
}

/// The result of fitting affinities to a dataset: the symmetric joint
/// probability matrix plus the per-point bandwidths it was built from.
#[derive(Debug, Clone)]
pub struct AffinityModel {
    /// Joint affinities; symmetric, zero diagonal, entries sum to 1.
    pub p: SquareMatrix,
    /// Bandwidth sigma_i fitted for each point.
    pub sigmas: Vec<f64>,
    /// Pairwise kernel width ratios gamma_ij, present for the
    /// density-preserving variant only. Off-diagonal entries lie in (0, 1]
    /// with the maximum exactly 1; the diagonal is filled by the same
    /// formula but never read.
    pub gammas: Option<SquareMatrix>,
    /// Points whose bandwidth search hit the bound without reaching the
    /// target perplexity. Accepted with a warning, not an error.
    pub unconverged_rows: Vec<usize>,
}

/// Embedding quality numbers produced by the evaluation stage.
///
/// Each correlation is `None` when one of its inputs has zero variance, in
/// which case it is reported as undefined rather than 0. Pearson values are
/// the primary numbers; Spearman counterparts are computed alongside for
/// rank-based comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct QualityReport {
    /// Pearson correlation of all pairwise distances.
    pub rho: Option<f64>,
    /// Pearson correlation over k-NN distances, neighbourhoods anchored in
    /// the high-dimensional space.
    pub rho_knn: Option<f64>,
    /// Pearson correlation of k-NN radius ratios between the spaces.
    pub rho_r: Option<f64>,
    pub rho_spearman: Option<f64>,
    pub rho_knn_spearman: Option<f64>,
    pub rho_r_spearman: Option<f64>,
    /// Neighbourhood size actually used.
    pub k: usize,
    /// True if the requested k exceeded n - 1 and was clamped.
    pub k_clamped: bool,
}
