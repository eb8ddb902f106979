//! Synthetic benchmark datasets: mixtures of isotropic clusters whose
//! per-cluster spread and size are known exactly, so density-preservation
//! claims can be checked against ground truth.
//!
//! Each cluster is sampled from its own counter-based RNG stream derived
//! from (seed, cluster index). Appending clusters to a spec therefore never
//! perturbs the points of earlier clusters.

use rand::distributions::Distribution as _;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::types::Dataset;

/// Offset distribution within a cluster; both are isotropic with unit
/// variance per coordinate before scaling.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Distribution {
    /// Standard normal offsets.
    Gaussian,
    /// Uniform offsets on (-sqrt(3), sqrt(3)), which has unit variance.
    Uniform,
}

/// One cluster of a synthetic dataset.
#[derive(Debug, Clone)]
pub struct ClusterSpec {
    /// Number of points to draw.
    pub samples: usize,
    /// Multiplier applied to the unit-variance offsets.
    pub scale: f64,
    /// Fixed center, or `None` to draw each coordinate from U(0, 50).
    pub center: Option<Vec<f64>>,
}

/// A full synthetic dataset specification.
#[derive(Debug, Clone)]
pub struct GeneratorSpec {
    pub name: String,
    pub dim: usize,
    pub distribution: Distribution,
    pub clusters: Vec<ClusterSpec>,
}

impl GeneratorSpec {
    /// Total number of points across all clusters.
    pub fn total_samples(&self) -> usize {
        self.clusters.iter().map(|c| c.samples).sum()
    }

    fn validate(&self) -> Result<()> {
        if self.dim == 0 {
            return Err(Error::SpecInvalid("dimension must be at least 1".into()));
        }
        if self.clusters.is_empty() {
            return Err(Error::SpecInvalid(
                "at least one cluster is required".into(),
            ));
        }
        for (i, c) in self.clusters.iter().enumerate() {
            if c.samples == 0 {
                return Err(Error::SpecInvalid(format!("cluster {i} has zero samples")));
            }
            if !c.scale.is_finite() || c.scale <= 0.0 {
                return Err(Error::SpecInvalid(format!(
                    "cluster {i} has non-positive scale {}",
                    c.scale
                )));
            }
            if let Some(center) = &c.center {
                if center.len() != self.dim {
                    return Err(Error::SpecInvalid(format!(
                        "cluster {i} center has {} coordinates, expected {}",
                        center.len(),
                        self.dim
                    )));
                }
                if center.iter().any(|v| !v.is_finite()) {
                    return Err(Error::SpecInvalid(format!(
                        "cluster {i} center has a non-finite coordinate"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Half-width of the unit-variance uniform offset distribution.
const UNIFORM_HALF_WIDTH: f64 = 1.7320508075688772; // sqrt(3)

/// Draws the dataset described by `spec`. Points appear cluster by cluster
/// and labels carry the cluster index. Deterministic in (spec, seed).
pub fn generate(spec: &GeneratorSpec, seed: u64) -> Result<Dataset> {
    spec.validate()?;
    let n = spec.total_samples();
    let mut points = Matrix::zeros(n, spec.dim);
    let mut labels = Vec::with_capacity(n);

    let normal = rand_distr::StandardNormal;
    let uniform = rand::distributions::Uniform::new(-UNIFORM_HALF_WIDTH, UNIFORM_HALF_WIDTH);
    let center_law = rand::distributions::Uniform::new(0.0, 50.0);

    let mut row = 0;
    for (cluster_idx, cluster) in spec.clusters.iter().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(cluster_idx as u64);

        let center: Vec<f64> = match &cluster.center {
            Some(c) => c.clone(),
            None => (0..spec.dim).map(|_| center_law.sample(&mut rng)).collect(),
        };

        for _ in 0..cluster.samples {
            let out = points.row_mut(row);
            for (slot, c) in out.iter_mut().zip(&center) {
                let offset: f64 = match spec.distribution {
                    Distribution::Gaussian => normal.sample(&mut rng),
                    Distribution::Uniform => uniform.sample(&mut rng),
                };
                *slot = c + cluster.scale * offset;
            }
            labels.push(cluster_idx as i64);
            row += 1;
        }
    }

    Ok(Dataset {
        name: spec.name.clone(),
        points,
        labels: Some(labels),
    })
}

/// Names accepted by [`preset`].
pub const PRESET_NAMES: [&str; 6] = ["2d-density", "2d-samples", "g3s", "g3d", "g10d", "u5d"];

/// Fixed centers shared by the two 2-D presets.
const CENTERS_2D: [[f64; 2]; 3] = [[10.0, 0.0], [0.0, 15.0], [-10.0, 0.0]];

/// The built-in benchmark specs.
///
/// - `2d-density`: three 2-D Gaussians of 300 points at fixed centers with
///   scales 1, 2, 4 — equal sizes, varying spread.
/// - `2d-samples`: the same centers with 100/200/500 points, all at scale
///   2 — equal spread, varying size.
/// - `g3s`: three 50-D Gaussians of 200/400/600 points, all at scale 2,
///   centers drawn from U(0, 50).
/// - `g3d`: three 50-D Gaussians of 300 points with scales 2, 4, 8.
/// - `g10d`: ten 50-D Gaussians of 200 points with scales 1 through 10.
/// - `u5d`: five 150-D uniform clusters of 500 points with scales
///   1, 2, 4, 6, 8.
pub fn preset(name: &str) -> Result<GeneratorSpec> {
    let spec = match name {
        "2d-density" => GeneratorSpec {
            name: name.into(),
            dim: 2,
            distribution: Distribution::Gaussian,
            clusters: [1.0, 2.0, 4.0]
                .iter()
                .zip(CENTERS_2D.iter())
                .map(|(&scale, center)| ClusterSpec {
                    samples: 300,
                    scale,
                    center: Some(center.to_vec()),
                })
                .collect(),
        },
        "2d-samples" => GeneratorSpec {
            name: name.into(),
            dim: 2,
            distribution: Distribution::Gaussian,
            clusters: [100usize, 200, 500]
                .iter()
                .zip(CENTERS_2D.iter())
                .map(|(&samples, center)| ClusterSpec {
                    samples,
                    scale: 2.0,
                    center: Some(center.to_vec()),
                })
                .collect(),
        },
        "g3s" => GeneratorSpec {
            name: name.into(),
            dim: 50,
            distribution: Distribution::Gaussian,
            clusters: [200usize, 400, 600]
                .iter()
                .map(|&samples| ClusterSpec {
                    samples,
                    scale: 2.0,
                    center: None,
                })
                .collect(),
        },
        "g3d" => GeneratorSpec {
            name: name.into(),
            dim: 50,
            distribution: Distribution::Gaussian,
            clusters: [2.0, 4.0, 8.0]
                .iter()
                .map(|&scale| ClusterSpec {
                    samples: 300,
                    scale,
                    center: None,
                })
                .collect(),
        },
        "g10d" => GeneratorSpec {
            name: name.into(),
            dim: 50,
            distribution: Distribution::Gaussian,
            clusters: (1..=10)
                .map(|scale| ClusterSpec {
                    samples: 200,
                    scale: scale as f64,
                    center: None,
                })
                .collect(),
        },
        "u5d" => GeneratorSpec {
            name: name.into(),
            dim: 150,
            distribution: Distribution::Uniform,
            clusters: [1.0, 2.0, 4.0, 6.0, 8.0]
                .iter()
                .map(|&scale| ClusterSpec {
                    samples: 500,
                    scale,
                    center: None,
                })
                .collect(),
        },
        other => {
            return Err(Error::SpecInvalid(format!(
                "unknown preset {other:?}; available presets: {}",
                PRESET_NAMES.join(", ")
            )))
        }
    };
    Ok(spec)
}
