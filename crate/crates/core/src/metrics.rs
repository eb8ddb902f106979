//! Embedding quality metrics.
//!
//! Three correlations between the original space and the embedding, each
//! probing a different failure mode:
//!
//! - `rho`: correlation of all pairwise distances (global geometry);
//! - `rho_knn`: correlation of distances to the k nearest neighbours, with
//!   neighbourhoods anchored in the *high-dimensional* space (local
//!   geometry);
//! - `rho_r`: correlation of k-NN radius ratios between all ordered point
//!   pairs (relative density — the quantity classic t-SNE destroys).
//!
//! All three default to Pearson; Spearman variants are computed alongside.
//! The high-dimensional inputs are the original data, not any PCA
//! reduction used during embedding.

use crate::error::{Error, Result};
use crate::linalg::{pairwise_sq_dists, pearson, spearman};
use crate::matrix::Matrix;
use crate::types::{Dataset, Embedding, QualityReport};

/// Which correlation coefficient to compute.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Correlation {
    Pearson,
    Spearman,
}

fn correlate(kind: Correlation, a: &[f64], b: &[f64]) -> Result<Option<f64>> {
    match kind {
        Correlation::Pearson => pearson(a, b),
        Correlation::Spearman => spearman(a, b),
    }
}

fn check_same_len(high: &Matrix, low: &Matrix) -> Result<usize> {
    if high.rows() != low.rows() {
        return Err(Error::LengthMismatch {
            left: high.rows(),
            right: low.rows(),
        });
    }
    Ok(high.rows())
}

fn check_k(k: usize, n: usize) -> Result<()> {
    if k == 0 {
        return Err(Error::InvalidConfig("k must be at least 1".into()));
    }
    if n == 0 || k > n - 1 {
        return Err(Error::KTooLarge {
            k,
            max: n.saturating_sub(1),
        });
    }
    Ok(())
}

/// Euclidean distances over unordered pairs (i, j), i < j, in row-major
/// pair order.
fn pair_distances(points: &Matrix) -> Vec<f64> {
    let n = points.rows();
    let d = pairwise_sq_dists(points);
    let mut out = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in (i + 1)..n {
            out.push(d.get(i, j).sqrt());
        }
    }
    out
}

/// For each point, the indices of its k nearest other points, closest
/// first. Distance ties break toward the smaller index, so the result is
/// deterministic.
fn neighborhoods(points: &Matrix, k: usize) -> Result<Vec<Vec<usize>>> {
    let n = points.rows();
    check_k(k, n)?;
    let d = pairwise_sq_dists(points);
    let mut result = Vec::with_capacity(n);
    for i in 0..n {
        let mut order: Vec<usize> = (0..n).filter(|&j| j != i).collect();
        order.sort_by(|&a, &b| {
            d.get(i, a)
                .partial_cmp(&d.get(i, b))
                .expect("distances are finite")
                .then(a.cmp(&b))
        });
        order.truncate(k);
        result.push(order);
    }
    Ok(result)
}

/// Distance from each point to its k-th nearest neighbour.
pub fn knn_radii(points: &Matrix, k: usize) -> Result<Vec<f64>> {
    let hoods = neighborhoods(points, k)?;
    let mut radii = Vec::with_capacity(points.rows());
    for (i, hood) in hoods.iter().enumerate() {
        let j = hood[k - 1];
        radii.push(
            points
                .row(i)
                .iter()
                .zip(points.row(j))
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt(),
        );
    }
    Ok(radii)
}

/// Correlation of all pairwise distances between the two spaces.
/// `None` when either distance set has zero variance.
pub fn rho_global(high: &Matrix, low: &Matrix, kind: Correlation) -> Result<Option<f64>> {
    let n = check_same_len(high, low)?;
    if n < 2 {
        return Ok(None);
    }
    correlate(kind, &pair_distances(high), &pair_distances(low))
}

/// Correlation over k-NN distances: for every point, the distances to its
/// k nearest high-dimensional neighbours are paired with the embedding
/// distances to those same neighbours (n * k pairs in total).
pub fn rho_knn(high: &Matrix, low: &Matrix, k: usize, kind: Correlation) -> Result<Option<f64>> {
    let n = check_same_len(high, low)?;
    let hoods = neighborhoods(high, k)?;
    let dh = pairwise_sq_dists(high);
    let dl = pairwise_sq_dists(low);
    let mut xs = Vec::with_capacity(n * k);
    let mut ys = Vec::with_capacity(n * k);
    for (i, hood) in hoods.iter().enumerate() {
        for &j in hood {
            xs.push(dh.get(i, j).sqrt());
            ys.push(dl.get(i, j).sqrt());
        }
    }
    correlate(kind, &xs, &ys)
}

/// Correlation of k-NN radius ratios: how faithfully the embedding
/// reproduces relative local density. Both spaces contribute the ordered
/// ratios `r_i / r_j` for all i != j. A zero radius in either space (from
/// duplicate points) makes the ratios undefined and is an error.
pub fn rho_r(high: &Matrix, low: &Matrix, k: usize, kind: Correlation) -> Result<Option<f64>> {
    let n = check_same_len(high, low)?;
    let rh = knn_radii(high, k)?;
    let rl = knn_radii(low, k)?;
    for (point, r) in rh.iter().enumerate() {
        if *r == 0.0 {
            return Err(Error::ZeroRadius { point });
        }
    }
    for (point, r) in rl.iter().enumerate() {
        if *r == 0.0 {
            return Err(Error::ZeroRadius { point });
        }
    }
    let mut xs = Vec::with_capacity(n * (n - 1));
    let mut ys = Vec::with_capacity(n * (n - 1));
    for i in 0..n {
        for j in 0..n {
            if i != j {
                xs.push(rh[i] / rh[j]);
                ys.push(rl[i] / rl[j]);
            }
        }
    }
    correlate(kind, &xs, &ys)
}

/// Scores an embedding against its original dataset.
///
/// `k` defaults to `min(100, n - 1)`; an explicit k larger than n - 1 is
/// clamped and flagged in the report rather than rejected. The high-
/// dimensional side is the dataset exactly as given.
pub fn evaluate(
    dataset: &Dataset,
    embedding: &Embedding,
    k: Option<usize>,
) -> Result<QualityReport> {
    dataset.validate()?;
    if let Some((row, col)) = embedding.coords.find_non_finite() {
        return Err(Error::NonFinite { row, col });
    }
    let n = check_same_len(&dataset.points, &embedding.coords)?;

    let (mut k, explicit) = match k {
        Some(k) => (k, true),
        None => (100.min(n - 1), false),
    };
    if k == 0 {
        return Err(Error::InvalidConfig("k must be at least 1".into()));
    }
    let mut k_clamped = false;
    if explicit && k > n - 1 {
        k = n - 1;
        k_clamped = true;
    }

    let high = &dataset.points;
    let low = &embedding.coords;
    Ok(QualityReport {
        rho: rho_global(high, low, Correlation::Pearson)?,
        rho_knn: rho_knn(high, low, k, Correlation::Pearson)?,
        rho_r: rho_r(high, low, k, Correlation::Pearson)?,
        rho_spearman: rho_global(high, low, Correlation::Spearman)?,
        rho_knn_spearman: rho_knn(high, low, k, Correlation::Spearman)?,
        rho_r_spearman: rho_r(high, low, k, Correlation::Spearman)?,
        k,
        k_clamped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Matrix {
        let data: Vec<f64> = (0..rows * cols).map(|_| rng.gen_range(-5.0..5.0)).collect();
        Matrix::from_vec(rows, cols, data)
    }

    fn line(values: &[f64]) -> Matrix {
        Matrix::from_rows(&values.iter().map(|&v| vec![v]).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn radii_of_collinear_points() {
        let points = line(&[0.0, 1.0, 3.0]);
        assert_eq!(knn_radii(&points, 1).unwrap(), vec![1.0, 1.0, 2.0]);
        assert_eq!(knn_radii(&points, 2).unwrap(), vec![3.0, 2.0, 3.0]);
    }

    #[test]
    fn radii_reject_bad_k() {
        let points = line(&[0.0, 1.0, 3.0]);
        assert!(matches!(
            knn_radii(&points, 3).unwrap_err(),
            Error::KTooLarge { k: 3, max: 2 }
        ));
        assert!(knn_radii(&points, 0).is_err());
    }

    #[test]
    fn neighborhood_ties_break_toward_smaller_index() {
        // The middle point is equidistant from both ends.
        let points = line(&[0.0, 1.0, 2.0]);
        let hoods = neighborhoods(&points, 1).unwrap();
        assert_eq!(hoods[1], vec![0]);
        assert_eq!(hoods[0], vec![1]);
        assert_eq!(hoods[2], vec![1]);
    }

    #[test]
    fn rho_of_identical_spaces_is_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let points = random_matrix(&mut rng, 12, 2);
        let r = rho_global(&points, &points, Correlation::Pearson)
            .unwrap()
            .unwrap();
        assert!((r - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rho_is_invariant_to_rigid_motion_and_scale() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let points = random_matrix(&mut rng, 15, 2);
        // Rotate by 0.7 rad, scale by 3, translate.
        let (s, c) = 0.7_f64.sin_cos();
        let mut moved = Matrix::zeros(15, 2);
        for i in 0..15 {
            let (x, y) = (points.get(i, 0), points.get(i, 1));
            moved.set(i, 0, 3.0 * (c * x - s * y) + 11.0);
            moved.set(i, 1, 3.0 * (s * x + c * y) - 4.0);
        }
        let r = rho_global(&points, &moved, Correlation::Pearson)
            .unwrap()
            .unwrap();
        assert!((r - 1.0).abs() < 1e-12);
        let rs = rho_global(&points, &moved, Correlation::Spearman)
            .unwrap()
            .unwrap();
        assert!((rs - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rho_with_constant_distances_is_undefined() {
        // An exactly equilateral triangle (integer coordinates, squared
        // distances all exactly 2): every pairwise distance equal, zero
        // variance, so the correlation must be undefined rather than 0.
        let tri = Matrix::from_rows(&[
            vec![1.0, 1.0, 0.0],
            vec![1.0, 0.0, 1.0],
            vec![0.0, 1.0, 1.0],
        ])
        .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let other = random_matrix(&mut rng, 3, 2);
        assert_eq!(
            rho_global(&tri, &other, Correlation::Pearson).unwrap(),
            None
        );
    }

    #[test]
    fn rho_matches_computational_formula_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let high = random_matrix(&mut rng, 10, 4);
        let low = random_matrix(&mut rng, 10, 2);
        let r = rho_global(&high, &low, Correlation::Pearson)
            .unwrap()
            .unwrap();

        // Assemble distance vectors directly and use the raw-moment form
        // of the correlation.
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for i in 0..10 {
            for j in (i + 1)..10 {
                let dh: f64 = (0..4)
                    .map(|c| (high.get(i, c) - high.get(j, c)).powi(2))
                    .sum::<f64>()
                    .sqrt();
                let dl: f64 = (0..2)
                    .map(|c| (low.get(i, c) - low.get(j, c)).powi(2))
                    .sum::<f64>()
                    .sqrt();
                xs.push(dh);
                ys.push(dl);
            }
        }
        let m = xs.len() as f64;
        let (sx, sy): (f64, f64) = (xs.iter().sum(), ys.iter().sum());
        let sxy: f64 = xs.iter().zip(&ys).map(|(a, b)| a * b).sum();
        let sxx: f64 = xs.iter().map(|a| a * a).sum();
        let syy: f64 = ys.iter().map(|b| b * b).sum();
        let expected = (m * sxy - sx * sy) / ((m * sxx - sx * sx) * (m * syy - sy * sy)).sqrt();
        assert!((r - expected).abs() < 1e-12);
    }

    #[test]
    fn rho_knn_is_perfect_on_identical_spaces() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let points = random_matrix(&mut rng, 20, 2);
        let r = rho_knn(&points, &points, 5, Correlation::Pearson)
            .unwrap()
            .unwrap();
        assert!((r - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rho_knn_anchors_neighbourhoods_in_high_space() {
        // High space: 0, 1, 2.5 on a line; low space reorders the points
        // so the low-nearest neighbour of point 0 differs. Anchored in
        // high space, the paired distances are exactly affine with
        // negative slope, so the correlation is -1.
        let high = line(&[0.0, 1.0, 2.5]);
        let low = line(&[0.0, 10.0, 1.0]);
        let r = rho_knn(&high, &low, 1, Correlation::Pearson)
            .unwrap()
            .unwrap();
        assert!((r + 1.0).abs() < 1e-12);
    }

    #[test]
    fn rho_knn_matches_bruteforce_pairs() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let high = random_matrix(&mut rng, 12, 3);
        let low = random_matrix(&mut rng, 12, 2);
        let k = 4;
        let r = rho_knn(&high, &low, k, Correlation::Pearson)
            .unwrap()
            .unwrap();

        // Brute force: sort each point's high-space distances, take the k
        // smallest (ties toward smaller index), pair with low distances.
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for i in 0..12 {
            let mut others: Vec<(f64, usize)> = (0..12)
                .filter(|&j| j != i)
                .map(|j| {
                    let d: f64 = (0..3)
                        .map(|c| (high.get(i, c) - high.get(j, c)).powi(2))
                        .sum::<f64>()
                        .sqrt();
                    (d, j)
                })
                .collect();
            others.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));
            for &(dh, j) in others.iter().take(k) {
                let dl: f64 = (0..2)
                    .map(|c| (low.get(i, c) - low.get(j, c)).powi(2))
                    .sum::<f64>()
                    .sqrt();
                xs.push(dh);
                ys.push(dl);
            }
        }
        let expected = crate::linalg::pearson(&xs, &ys).unwrap().unwrap();
        assert!((r - expected).abs() < 1e-12);
    }

    #[test]
    fn rho_r_is_perfect_when_radii_scale_together() {
        // Low space doubles every coordinate: radii double, ratios match.
        let high = line(&[0.0, 1.0, 3.0]);
        let low = line(&[0.0, 2.0, 6.0]);
        let r = rho_r(&high, &low, 1, Correlation::Pearson)
            .unwrap()
            .unwrap();
        assert!((r - 1.0).abs() < 1e-12);
        let rs = rho_r(&high, &low, 1, Correlation::Spearman)
            .unwrap()
            .unwrap();
        assert!((rs - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rho_r_matches_bruteforce_ratios() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let high = random_matrix(&mut rng, 11, 3);
        let low = random_matrix(&mut rng, 11, 2);
        let k = 3;
        let r = rho_r(&high, &low, k, Correlation::Pearson)
            .unwrap()
            .unwrap();

        let rh = knn_radii(&high, k).unwrap();
        let rl = knn_radii(&low, k).unwrap();
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for i in 0..11 {
            for j in 0..11 {
                if i != j {
                    xs.push(rh[i] / rh[j]);
                    ys.push(rl[i] / rl[j]);
                }
            }
        }
        let expected = crate::linalg::pearson(&xs, &ys).unwrap().unwrap();
        assert!((r - expected).abs() < 1e-12);
    }

    #[test]
    fn rho_r_is_scale_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let high = random_matrix(&mut rng, 10, 3);
        let low = random_matrix(&mut rng, 10, 2);
        let base = rho_r(&high, &low, 3, Correlation::Pearson)
            .unwrap()
            .unwrap();
        let mut scaled = low.clone();
        for v in scaled.data_mut() {
            *v *= 37.5;
        }
        let r = rho_r(&high, &scaled, 3, Correlation::Pearson)
            .unwrap()
            .unwrap();
        assert!((r - base).abs() < 1e-12);
    }

    #[test]
    fn duplicate_points_make_radius_ratios_an_error() {
        let high = Matrix::from_rows(&[vec![1.0, 1.0], vec![1.0, 1.0], vec![2.0, 2.0]]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let low = random_matrix(&mut rng, 3, 2);
        match rho_r(&high, &low, 1, Correlation::Pearson).unwrap_err() {
            Error::ZeroRadius { point } => assert_eq!(point, 0),
            other => panic!("unexpected error: {other:?}"),
        }
    }

    #[test]
    fn mismatched_row_counts_are_rejected() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let high = random_matrix(&mut rng, 5, 2);
        let low = random_matrix(&mut rng, 6, 2);
        assert!(matches!(
            rho_global(&high, &low, Correlation::Pearson).unwrap_err(),
            Error::LengthMismatch { left: 5, right: 6 }
        ));
    }

    #[test]
    fn evaluate_defaults_and_clamps_k() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let points = random_matrix(&mut rng, 30, 3);
        let dataset = Dataset::new("d", points.clone());
        let embedding = Embedding {
            coords: random_matrix(&mut rng, 30, 2),
            config_fingerprint: String::new(),
        };

        let report = evaluate(&dataset, &embedding, None).unwrap();
        assert_eq!(report.k, 29); // min(100, n - 1)
        assert!(!report.k_clamped);
        assert!(report.rho.is_some());
        assert!(report.rho_r.is_some());
        assert!(report.rho_spearman.is_some());

        let report = evaluate(&dataset, &embedding, Some(50)).unwrap();
        assert_eq!(report.k, 29);
        assert!(report.k_clamped);

        let report = evaluate(&dataset, &embedding, Some(5)).unwrap();
        assert_eq!(report.k, 5);
        assert!(!report.k_clamped);
    }

    #[test]
    fn evaluate_scores_a_faithful_embedding_perfectly() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let points = random_matrix(&mut rng, 25, 2);
        let dataset = Dataset::new("d", points.clone());
        let embedding = Embedding {
            coords: points,
            config_fingerprint: String::new(),
        };
        let report = evaluate(&dataset, &embedding, Some(4)).unwrap();
        for value in [report.rho, report.rho_knn, report.rho_r] {
            assert!((value.unwrap() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn evaluate_rejects_mismatched_inputs() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let dataset = Dataset::new("d", random_matrix(&mut rng, 8, 2));
        let embedding = Embedding {
            coords: random_matrix(&mut rng, 9, 2),
            config_fingerprint: String::new(),
        };
        assert!(matches!(
            evaluate(&dataset, &embedding, None).unwrap_err(),
            Error::LengthMismatch { .. }
        ));
    }
}
