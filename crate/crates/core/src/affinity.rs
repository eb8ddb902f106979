//! High-dimensional affinities: perplexity-calibrated bandwidths and the
//! joint probability matrices for both embedding variants.
//!
//! Classic t-SNE fits one bandwidth sigma_i per point so that the
//! conditional distribution over its neighbours has a fixed perplexity,
//! then symmetrizes. The density-preserving variant keeps those fitted
//! bandwidths but recomputes the conditionals with a pairwise bandwidth
//! sigma_ij = (sigma_i + sigma_j) / 2, and additionally derives the kernel
//! width ratios gamma_ij that the low-dimensional kernel will reuse.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::pairwise_sq_dists;
use crate::matrix::{Matrix, SquareMatrix};
use crate::types::AffinityModel;

/// Log-bandwidth search interval; sigma ranges over [e^-40, e^40].
const LN_SIGMA_BOUNDS: (f64, f64) = (-40.0, 40.0);
/// Maximum bisection steps for one bandwidth fit.
const MAX_BISECTIONS: usize = 64;
/// The fit converges when |log2(perplexity) - log2(target)| drops below this.
const LOG2_PERPLEXITY_TOL: f64 = 1e-5;
/// Unnormalized kernel weights below this are flushed to zero.
const WEIGHT_FLOOR: f64 = 1e-300;

/// Perplexity `2^H(p)` of a probability vector, with the entropy `H` taken
/// base 2 and `0 * log 0 = 0`.
pub fn perplexity_of(p: &[f64]) -> Result<f64> {
    let mut sum = 0.0;
    for &v in p {
        if v < 0.0 {
            return Err(Error::NotNormalized {
                sum: p.iter().sum(),
            });
        }
        sum += v;
    }
    if (sum - 1.0).abs() > 1e-8 {
        return Err(Error::NotNormalized { sum });
    }
    let mut entropy_bits = 0.0;
    for &v in p {
        if v > 0.0 {
            entropy_bits -= v * v.log2();
        }
    }
    Ok(entropy_bits.exp2())
}

/// Result of one bandwidth fit.
#[derive(Debug, Clone)]
pub struct SigmaFit {
    /// Fitted bandwidth.
    pub sigma: f64,
    /// Conditional probabilities over the other points, in input order.
    pub p_row: Vec<f64>,
    /// False if the search exhausted its budget at a bound; the returned
    /// sigma is then the closest achievable value, not an error.
    pub converged: bool,
}

/// Conditional probabilities and entropy (bits) for one row at a given
/// bandwidth. Weights are shifted by the smallest exponent so the largest
/// weight is exactly 1 regardless of scale.
fn conditional_row(sq_dists: &[f64], sigma: f64) -> (Vec<f64>, f64) {
    let beta = 1.0 / (2.0 * sigma * sigma);
    let d_min = sq_dists.iter().copied().fold(f64::INFINITY, f64::min);
    let mut weights: Vec<f64> = sq_dists
        .iter()
        .map(|&d| {
            let w = (-beta * (d - d_min)).exp();
            if w < WEIGHT_FLOOR {
                0.0
            } else {
                w
            }
        })
        .collect();
    let z: f64 = weights.iter().sum();
    let mut entropy_bits = 0.0;
    for w in &mut weights {
        *w /= z;
        if *w > 0.0 {
            entropy_bits -= *w * w.log2();
        }
    }
    (weights, entropy_bits)
}

/// Fits the bandwidth for one point so that the conditional distribution
/// over its neighbours reaches `target_perplexity`.
///
/// `sq_dists` holds the squared distances to every other point; `row` is
/// the point's index, used only in error messages. The search bisects
/// ln(sigma) over [-40, 40]. If the target is unreachable (for example all
/// neighbours equidistant), the closest achievable bandwidth is returned
/// with `converged = false`; only a row of all-zero distances is an error.
pub fn fit_sigma(sq_dists: &[f64], target_perplexity: f64, row: usize) -> Result<SigmaFit> {
    if sq_dists.is_empty() || sq_dists.iter().all(|&d| d <= 0.0) {
        return Err(Error::DegenerateRow { row });
    }
    let target_log2 = target_perplexity.log2();
    let (mut lo, mut hi) = LN_SIGMA_BOUNDS;
    let mut last = None;
    for _ in 0..MAX_BISECTIONS {
        let mid = 0.5 * (lo + hi);
        let sigma = mid.exp();
        let (p_row, entropy_bits) = conditional_row(sq_dists, sigma);
        let diff = entropy_bits - target_log2;
        if diff.abs() < LOG2_PERPLEXITY_TOL {
            return Ok(SigmaFit {
                sigma,
                p_row,
                converged: true,
            });
        }
        if diff > 0.0 {
            // Perplexity too high: narrow the kernel.
            hi = mid;
        } else {
            lo = mid;
        }
        last = Some((sigma, p_row));
    }
    let (sigma, p_row) = last.expect("at least one bisection step ran");
    Ok(SigmaFit {
        sigma,
        p_row,
        converged: false,
    })
}

/// (per-point bandwidths, conditional rows without the diagonal, rows whose
/// bisection hit its iteration cap).
type SigmaFits = (Vec<f64>, Vec<Vec<f64>>, Vec<usize>);

/// Per-point fits for every row of a squared-distance matrix.
fn fit_all_sigmas(sq_dists: &SquareMatrix, perplexity: f64) -> Result<SigmaFits> {
    let n = sq_dists.n();
    let fits: Vec<Result<SigmaFit>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let row: Vec<f64> = (0..n)
                .filter(|&j| j != i)
                .map(|j| sq_dists.get(i, j))
                .collect();
            fit_sigma(&row, perplexity, i)
        })
        .collect();
    let mut sigmas = Vec::with_capacity(n);
    let mut rows = Vec::with_capacity(n);
    let mut unconverged = Vec::new();
    for (i, fit) in fits.into_iter().enumerate() {
        let fit = fit?;
        if !fit.converged {
            unconverged.push(i);
        }
        sigmas.push(fit.sigma);
        rows.push(fit.p_row);
    }
    Ok((sigmas, rows, unconverged))
}

fn check_affinity_inputs(points: &Matrix, perplexity: f64) -> Result<()> {
    let n = points.rows();
    if n < 2 {
        return Err(Error::TooFewSamples { needed: 2, got: n });
    }
    if !perplexity.is_finite() || perplexity <= 1.0 || perplexity >= n as f64 {
        return Err(Error::InvalidConfig(format!(
            "perplexity must lie in (1, n); got {perplexity} for n = {n}"
        )));
    }
    Ok(())
}

/// Symmetrizes conditional rows into the joint matrix
/// `P_ij = (p_{j|i} + p_{i|j}) / (2n)`, written to both triangles at once
/// so the result is symmetric bit for bit. Entries sum to 1 because each
/// conditional row does.
fn symmetrize(rows: &[Vec<f64>]) -> SquareMatrix {
    let n = rows.len();
    let mut p = SquareMatrix::zeros(n);
    let scale = 1.0 / (2.0 * n as f64);
    for (i, row_i) in rows.iter().enumerate() {
        for j in (i + 1)..n {
            // rows[i] skips the diagonal: column j sits at j - 1 for j > i.
            let p_j_given_i = row_i[j - 1];
            let p_i_given_j = rows[j][i];
            let v = (p_j_given_i + p_i_given_j) * scale;
            p.set(i, j, v);
            p.set(j, i, v);
        }
    }
    p
}

/// Fits classic t-SNE affinities: per-point bandwidths calibrated to
/// `perplexity`, conditionals symmetrized into a joint matrix.
pub fn build_affinities_tsne(points: &Matrix, perplexity: f64) -> Result<AffinityModel> {
    check_affinity_inputs(points, perplexity)?;
    let d = pairwise_sq_dists(points);
    let (sigmas, rows, unconverged_rows) = fit_all_sigmas(&d, perplexity)?;
    Ok(AffinityModel {
        p: symmetrize(&rows),
        sigmas,
        gammas: None,
        unconverged_rows,
    })
}

/// Kernel width ratios `gamma_ij` from fitted bandwidths: the reciprocal
/// squared bandwidth sums `((sigma_i + sigma_j)^2)^-1`, normalized so the
/// largest off-diagonal entry is exactly 1. Wider point pairs get smaller
/// gamma, which widens their kernel in the embedding space by the same
/// ratio. The diagonal is filled by the same formula but never used.
pub fn compute_gammas(sigmas: &[f64]) -> SquareMatrix {
    let n = sigmas.len();
    let mut g = SquareMatrix::zeros(n);
    for i in 0..n {
        for j in i..n {
            let s = sigmas[i] + sigmas[j];
            let inv = 1.0 / (s * s);
            g.set(i, j, inv);
            g.set(j, i, inv);
        }
    }
    let mut max_off = f64::NEG_INFINITY;
    for i in 0..n {
        for j in (i + 1)..n {
            max_off = max_off.max(g.get(i, j));
        }
    }
    if max_off > 0.0 && max_off.is_finite() {
        // Divide rather than multiply by a reciprocal so the maximal pair
        // lands on exactly 1.0.
        for v in g.data_mut() {
            *v /= max_off;
        }
    }
    g
}

/// Fits density-preserving affinities.
///
/// Pass one calibrates per-point bandwidths exactly as classic t-SNE does.
/// Pass two rebuilds every conditional with the pairwise bandwidth
/// `sigma_ij = (sigma_i + sigma_j) / 2` — each term in a row uses its own
/// pair's bandwidth — and symmetrizes as usual. The model also carries the
/// gamma ratios for the low-dimensional kernel.
pub fn build_affinities_dtsne(points: &Matrix, perplexity: f64) -> Result<AffinityModel> {
    check_affinity_inputs(points, perplexity)?;
    let n = points.rows();
    let d = pairwise_sq_dists(points);
    let (sigmas, _, unconverged_rows) = fit_all_sigmas(&d, perplexity)?;

    let rows: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            // Exponents d_ij / (2 sigma_ij^2), one bandwidth per pair.
            let exponents: Vec<f64> = (0..n)
                .filter(|&j| j != i)
                .map(|j| {
                    let s = 0.5 * (sigmas[i] + sigmas[j]);
                    d.get(i, j) / (2.0 * s * s)
                })
                .collect();
            let e_min = exponents.iter().copied().fold(f64::INFINITY, f64::min);
            let mut weights: Vec<f64> = exponents
                .iter()
                .map(|&e| {
                    let w = (-(e - e_min)).exp();
                    if w < WEIGHT_FLOOR {
                        0.0
                    } else {
                        w
                    }
                })
                .collect();
            let z: f64 = weights.iter().sum();
            for w in &mut weights {
                *w /= z;
            }
            weights
        })
        .collect();

    Ok(AffinityModel {
        p: symmetrize(&rows),
        sigmas: sigmas.clone(),
        gammas: Some(compute_gammas(&sigmas)),
        unconverged_rows,
    })
}
