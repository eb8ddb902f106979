//! Numerical primitives: pairwise distances, PCA, and correlations.
//!
//! The eigendecomposition behind PCA is a cyclic Jacobi sweep. At the sizes
//! this crate targets (a few hundred input dimensions at most) Jacobi is
//! plenty fast, has no iteration-order nondeterminism, and avoids pulling a
//! linear algebra stack into the dependency tree for one routine.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::matrix::{Matrix, SquareMatrix};

/// Squared Euclidean distance between two equally long slices.
#[inline]
pub(crate) fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    let mut acc = 0.0;
    for (x, y) in a.iter().zip(b) {
        let d = x - y;
        acc += d * d;
    }
    acc
}

/// All pairwise squared Euclidean distances between the rows of `points`.
///
/// The result has an exactly zero diagonal and is exactly symmetric:
/// `(x - y)^2` and `(y - x)^2` are the same floating-point value, and both
/// triangles accumulate over coordinates in the same order.
pub fn pairwise_sq_dists(points: &Matrix) -> SquareMatrix {
    let n = points.rows();
    let mut out = SquareMatrix::zeros(n);
    out.data_mut()
        .par_chunks_mut(n.max(1))
        .enumerate()
        .for_each(|(i, row)| {
            let pi = points.row(i);
            for (j, slot) in row.iter_mut().enumerate() {
                if i != j {
                    *slot = sq_dist(pi, points.row(j));
                }
            }
        });
    out
}

/// Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.
///
/// Returns `(eigenvalues, eigenvectors)` sorted by descending eigenvalue,
/// ties broken by original position; eigenvectors are the columns of the
/// returned matrix.
pub(crate) fn jacobi_eigh(m: &SquareMatrix) -> (Vec<f64>, SquareMatrix) {
    let n = m.n();
    let mut a = m.clone();
    let mut v = SquareMatrix::zeros(n);
    for i in 0..n {
        v.set(i, i, 1.0);
    }
    if n > 1 {
        let fro: f64 = a.data().iter().map(|x| x * x).sum::<f64>().sqrt();
        let tol = 1e-14 * fro;
        for _sweep in 0..100 {
            let off: f64 = {
                let mut s = 0.0;
                for i in 0..n {
                    for j in (i + 1)..n {
                        s += 2.0 * a.get(i, j) * a.get(i, j);
                    }
                }
                s.sqrt()
            };
            if off <= tol {
                break;
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    let apq = a.get(p, q);
                    if apq == 0.0 {
                        continue;
                    }
                    let theta = (a.get(q, q) - a.get(p, p)) / (2.0 * apq);
                    // tan of the rotation angle; the large-theta branch
                    // avoids overflow in theta * theta.
                    let t = if theta.abs() > 1e154 {
                        1.0 / (2.0 * theta)
                    } else if theta >= 0.0 {
                        1.0 / (theta + (theta * theta + 1.0).sqrt())
                    } else {
                        -1.0 / (-theta + (theta * theta + 1.0).sqrt())
                    };
                    let c = 1.0 / (t * t + 1.0).sqrt();
                    let s = t * c;
                    // A <- J^T A J, applied as a column then a row update.
                    for k in 0..n {
                        let akp = a.get(k, p);
                        let akq = a.get(k, q);
                        a.set(k, p, c * akp - s * akq);
                        a.set(k, q, s * akp + c * akq);
                    }
                    for k in 0..n {
                        let apk = a.get(p, k);
                        let aqk = a.get(q, k);
                        a.set(p, k, c * apk - s * aqk);
                        a.set(q, k, s * apk + c * aqk);
                    }
                    for k in 0..n {
                        let vkp = v.get(k, p);
                        let vkq = v.get(k, q);
                        v.set(k, p, c * vkp - s * vkq);
                        v.set(k, q, s * vkp + c * vkq);
                    }
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        a.get(j, j)
            .partial_cmp(&a.get(i, i))
            .expect("eigenvalues are finite")
            .then(i.cmp(&j))
    });
    let values: Vec<f64> = order.iter().map(|&i| a.get(i, i)).collect();
    let mut vectors = SquareMatrix::zeros(n);
    for (dst, &src) in order.iter().enumerate() {
        for k in 0..n {
            vectors.set(k, dst, v.get(k, src));
        }
    }
    (values, vectors)
}

/// Column means of a matrix.
fn column_means(points: &Matrix) -> Vec<f64> {
    let n = points.rows();
    let mut means = vec![0.0; points.cols()];
    for row in points.iter_rows() {
        for (m, x) in means.iter_mut().zip(row) {
            *m += x;
        }
    }
    if n > 0 {
        for m in &mut means {
            *m /= n as f64;
        }
    }
    means
}

/// Projects `points` onto their top `out_dims` principal components.
///
/// Exact dense decomposition of either the d x d covariance matrix (when
/// d <= n) or the n x n Gram matrix (when d > n); both routes produce the
/// same scores. The sign of each principal direction is fixed so that its
/// entry of largest absolute value is non-negative, which makes the output
/// deterministic. Returns the n x out_dims score matrix of the centered
/// data.
pub fn pca(points: &Matrix, out_dims: usize) -> Result<Matrix> {
    let n = points.rows();
    let d = points.cols();
    if out_dims == 0 {
        return Err(Error::InvalidConfig(
            "pca output dimension must be at least 1".into(),
        ));
    }
    let max_dims = n.min(d);
    if out_dims > max_dims {
        return Err(Error::DimensionTooLarge {
            requested: out_dims,
            max: max_dims,
        });
    }

    let means = column_means(points);
    let mut centered = points.clone();
    for r in 0..n {
        let row = centered.row_mut(r);
        for (x, m) in row.iter_mut().zip(&means) {
            *x -= m;
        }
    }
    let denom = if n > 1 { (n - 1) as f64 } else { 1.0 };

    // Principal directions, one per column slot of `directions`.
    let mut directions = Matrix::zeros(d, out_dims);
    if d <= n {
        // Covariance route: eigenvectors of X^T X / (n - 1).
        let mut cov = SquareMatrix::zeros(d);
        for i in 0..d {
            for j in i..d {
                let mut acc = 0.0;
                for r in 0..n {
                    let row = centered.row(r);
                    acc += row[i] * row[j];
                }
                let v = acc / denom;
                cov.set(i, j, v);
                cov.set(j, i, v);
            }
        }
        let (_values, vectors) = jacobi_eigh(&cov);
        for c in 0..out_dims {
            for k in 0..d {
                directions.set(k, c, vectors.get(k, c));
            }
        }
    } else {
        // Gram route: eigenvectors u of X X^T / (n - 1) give directions
        // proportional to X^T u.
        let mut gram = SquareMatrix::zeros(n);
        for i in 0..n {
            for j in i..n {
                let v = centered
                    .row(i)
                    .iter()
                    .zip(centered.row(j))
                    .map(|(a, b)| a * b)
                    .sum::<f64>()
                    / denom;
                gram.set(i, j, v);
                gram.set(j, i, v);
            }
        }
        let (_values, vectors) = jacobi_eigh(&gram);
        for c in 0..out_dims {
            let mut dir = vec![0.0; d];
            for r in 0..n {
                let u = vectors.get(r, c);
                for (slot, x) in dir.iter_mut().zip(centered.row(r)) {
                    *slot += u * x;
                }
            }
            let norm = dir.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm > 0.0 {
                for x in &mut dir {
                    *x /= norm;
                }
            }
            for (k, &v) in dir.iter().enumerate() {
                directions.set(k, c, v);
            }
        }
    }

    // Deterministic orientation: the entry of largest magnitude in each
    // direction (first one on ties) is made non-negative.
    for c in 0..out_dims {
        let mut best = 0usize;
        for k in 1..d {
            if directions.get(k, c).abs() > directions.get(best, c).abs() {
                best = k;
            }
        }
        if directions.get(best, c) < 0.0 {
            for k in 0..d {
                let v = directions.get(k, c);
                directions.set(k, c, -v);
            }
        }
    }

    let mut scores = Matrix::zeros(n, out_dims);
    scores
        .data_mut()
        .par_chunks_mut(out_dims)
        .enumerate()
        .for_each(|(r, out_row)| {
            let row = centered.row(r);
            for (c, slot) in out_row.iter_mut().enumerate() {
                let mut acc = 0.0;
                for (k, &x) in row.iter().enumerate() {
                    acc += x * directions.get(k, c);
                }
                *slot = acc;
            }
        });
    Ok(scores)
}

/// Pearson correlation coefficient.
///
/// Returns `Ok(None)` when either input has zero variance (including empty
/// and single-element inputs); a correlation against a constant is
/// undefined, not zero.
pub fn pearson(a: &[f64], b: &[f64]) -> Result<Option<f64>> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    let n = a.len();
    if n < 2 {
        return Ok(None);
    }
    // Constant inputs have zero variance by definition; checking for them
    // directly avoids declaring a spurious correlation when the computed
    // mean of a constant array is off by an ulp.
    if a.iter().all(|&x| x == a[0]) || b.iter().all(|&x| x == b[0]) {
        return Ok(None);
    }
    let mean_a = a.iter().sum::<f64>() / n as f64;
    let mean_b = b.iter().sum::<f64>() / n as f64;
    let mut cov = 0.0;
    let mut var_a = 0.0;
    let mut var_b = 0.0;
    for (x, y) in a.iter().zip(b) {
        let da = x - mean_a;
        let db = y - mean_b;
        cov += da * db;
        var_a += da * da;
        var_b += db * db;
    }
    if var_a == 0.0 || var_b == 0.0 {
        return Ok(None);
    }
    Ok(Some((cov / (var_a * var_b).sqrt()).clamp(-1.0, 1.0)))
}

/// Spearman rank correlation: Pearson correlation of the rank-transformed
/// inputs, with tied values assigned the average of their rank range.
pub fn spearman(a: &[f64], b: &[f64]) -> Result<Option<f64>> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    pearson(&average_ranks(a), &average_ranks(b))
}

/// Ranks of `values` (1-based), averaging over ties.
fn average_ranks(values: &[f64]) -> Vec<f64> {
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        values[i]
            .partial_cmp(&values[j])
            .expect("rank inputs are finite")
            .then(i.cmp(&j))
    });
    let mut ranks = vec![0.0; n];
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && values[order[end]] == values[order[start]] {
            end += 1;
        }
        // Positions start..end hold one tied group; 1-based ranks average
        // to (start + 1 + end) / 2.
        let avg = (start + 1 + end) as f64 / 2.0;
        for &idx in &order[start..end] {
            ranks[idx] = avg;
        }
        start = end;
    }
    ranks
}
