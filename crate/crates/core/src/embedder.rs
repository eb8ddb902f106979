//! Low-dimensional kernel, KL objective, and the gradient-descent loop.
//!
//! The embedding minimizes KL(P || Q) where Q is a Student-t kernel over
//! the embedded points. For the density-preserving variant each pair's
//! kernel argument is scaled by its width ratio gamma_ij, so pairs whose
//! high-dimensional neighbourhoods were wide get a proportionally wider
//! kernel in the embedding. With all gammas equal to 1 every formula below
//! reduces exactly to classic t-SNE.
//!
//! The gradient of the objective with respect to point l is
//!
//! ```text
//! dC/dy_l = 4 * sum_{k != l} (p_lk - q_lk) * T_lk * gamma_lk * (y_l - y_k)
//! ```
//!
//! with `T_lk = (1 + gamma_lk * |y_l - y_k|^2)^-1`, valid when P sums to 1.

use rayon::prelude::*;

use crate::affinity::{build_affinities_dtsne, build_affinities_tsne};
use crate::error::{Error, Result};
use crate::linalg::{pca, sq_dist};
use crate::matrix::{Matrix, SquareMatrix};
use crate::types::{config_fingerprint, Dataset, Embedding, EmbeddingConfig, Method};

/// Floor applied to q inside the KL logarithm.
const KL_Q_FLOOR: f64 = 1e-12;
/// Pooled standard deviation of the initial layout.
const INIT_STD: f64 = 1e-4;
/// Iterations between KL trace entries.
const KL_TRACE_EVERY: usize = 50;

/// Unnormalized Student-t kernel values `T_ij = 1 / (1 + g_ij * d_ij^2)`
/// and their total `Z` over ordered pairs. The diagonal is zero.
fn student_kernel(y: &Matrix, gammas: Option<&SquareMatrix>) -> (SquareMatrix, f64) {
    let n = y.rows();
    let mut t = SquareMatrix::zeros(n);
    t.data_mut()
        .par_chunks_mut(n.max(1))
        .enumerate()
        .for_each(|(i, row)| {
            let yi = y.row(i);
            match gammas {
                None => {
                    for (j, slot) in row.iter_mut().enumerate() {
                        if i != j {
                            *slot = 1.0 / (1.0 + sq_dist(yi, y.row(j)));
                        }
                    }
                }
                Some(g) => {
                    let g_row = g.row(i);
                    for (j, slot) in row.iter_mut().enumerate() {
                        if i != j {
                            *slot = 1.0 / (1.0 + g_row[j] * sq_dist(yi, y.row(j)));
                        }
                    }
                }
            }
        });
    let z: f64 = t.data().iter().sum();
    (t, z)
}

/// Low-dimensional affinities `Q_ij = T_ij / Z` and the normalizer `Z`.
///
/// Pass `gammas` for the density-preserving kernel; `None` gives the
/// classic unit-width kernel. The result is symmetric with a zero diagonal
/// and sums to 1.
pub fn compute_q(y: &Matrix, gammas: Option<&SquareMatrix>) -> (SquareMatrix, f64) {
    let (mut t, z) = student_kernel(y, gammas);
    if z > 0.0 {
        t.scale(1.0 / z);
    }
    (t, z)
}

/// KL divergence `sum_{i != j} p_ij ln(p_ij / q_ij)` with `0 ln 0 = 0` and
/// q floored at 1e-12 inside the logarithm.
pub fn kl_divergence(p: &SquareMatrix, q: &SquareMatrix) -> f64 {
    let mut kl = 0.0;
    for (pv, qv) in p.data().iter().zip(q.data()) {
        if *pv > 0.0 {
            kl += pv * (pv / qv.max(KL_Q_FLOOR)).ln();
        }
    }
    kl
}

/// Gradient of KL(P || Q(y)) with respect to every embedded point; the
/// kernel and its normalizer are recomputed internally. Requires P to sum
/// to 1 (which holds for every affinity model this crate produces).
pub fn kl_gradient(p: &SquareMatrix, y: &Matrix, gammas: Option<&SquareMatrix>) -> Matrix {
    let n = y.rows();
    let dim = y.cols();
    let (t, z) = student_kernel(y, gammas);
    let inv_z = 1.0 / z;
    let mut grad = Matrix::zeros(n, dim);
    grad.data_mut()
        .par_chunks_mut(dim.max(1))
        .enumerate()
        .for_each(|(l, out)| {
            let yl = y.row(l);
            let t_row = t.row(l);
            let p_row = p.row(l);
            match gammas {
                None => {
                    for k in 0..n {
                        if k == l {
                            continue;
                        }
                        let tk = t_row[k];
                        let w = 4.0 * (p_row[k] - tk * inv_z) * tk;
                        let yk = y.row(k);
                        for (c, slot) in out.iter_mut().enumerate() {
                            *slot += w * (yl[c] - yk[c]);
                        }
                    }
                }
                Some(g) => {
                    let g_row = g.row(l);
                    for k in 0..n {
                        if k == l {
                            continue;
                        }
                        let tk = t_row[k];
                        let w = 4.0 * (p_row[k] - tk * inv_z) * tk * g_row[k];
                        let yk = y.row(k);
                        for (c, slot) in out.iter_mut().enumerate() {
                            *slot += w * (yl[c] - yk[c]);
                        }
                    }
                }
            }
        });
    grad
}

/// Momentum gradient descent over an embedding.
///
/// Exposes single steps so callers can compare runs iteration by
/// iteration. The iteration counter is 0-based; momentum switches from the
/// early to the late coefficient at `momentum_switch_iter`, and the first
/// `exaggeration_iters` steps see the affinities multiplied by the
/// exaggeration factor (the KL trace is always measured against the true,
/// unexaggerated affinities).
pub struct Optimizer {
    p: SquareMatrix,
    exaggerated: Option<SquareMatrix>,
    gammas: Option<SquareMatrix>,
    y: Matrix,
    y_prev: Matrix,
    scratch: Matrix,
    iteration: usize,
    iterations: usize,
    learning_rate: f64,
    momentum_early: f64,
    momentum_late: f64,
    momentum_switch_iter: usize,
    exaggeration_iters: usize,
    kl_trace: Vec<(usize, f64)>,
}

impl Optimizer {
    /// Sets up a run from fitted affinities and an initial layout.
    /// `config.learning_rate = None` resolves to n/12.
    pub fn new(
        p: SquareMatrix,
        gammas: Option<SquareMatrix>,
        y0: Matrix,
        config: &EmbeddingConfig,
    ) -> Result<Self> {
        let n = y0.rows();
        if p.n() != n {
            return Err(Error::LengthMismatch {
                left: p.n(),
                right: n,
            });
        }
        if let Some(g) = &gammas {
            if g.n() != n {
                return Err(Error::LengthMismatch {
                    left: g.n(),
                    right: n,
                });
            }
        }
        let sum = p.sum();
        if (sum - 1.0).abs() > 1e-8 {
            return Err(Error::NotNormalized { sum });
        }
        let exaggerated = if config.exaggeration_factor > 1.0 && config.exaggeration_iters > 0 {
            let mut e = p.clone();
            e.scale(config.exaggeration_factor);
            Some(e)
        } else {
            None
        };
        Ok(Optimizer {
            exaggerated,
            gammas,
            y_prev: y0.clone(),
            scratch: Matrix::zeros(n, y0.cols()),
            y: y0,
            p,
            iteration: 0,
            iterations: config.iterations,
            learning_rate: config.effective_learning_rate(n),
            momentum_early: config.momentum_early,
            momentum_late: config.momentum_late,
            momentum_switch_iter: config.momentum_switch_iter,
            exaggeration_iters: config.exaggeration_iters,
            kl_trace: Vec::new(),
        })
    }

    /// Runs one gradient step: `y <- y - lr * grad + momentum * (y - y_prev)`.
    pub fn step(&mut self) -> Result<()> {
        let p_active = if self.iteration < self.exaggeration_iters {
            self.exaggerated.as_ref().unwrap_or(&self.p)
        } else {
            &self.p
        };
        let grad = kl_gradient(p_active, &self.y, self.gammas.as_ref());
        let momentum = if self.iteration < self.momentum_switch_iter {
            self.momentum_early
        } else {
            self.momentum_late
        };
        let lr = self.learning_rate;
        for ((next, &cur), (&prev, &g)) in self
            .scratch
            .data_mut()
            .iter_mut()
            .zip(self.y.data())
            .zip(self.y_prev.data().iter().zip(grad.data()))
        {
            *next = cur - lr * g + momentum * (cur - prev);
        }
        if self.scratch.find_non_finite().is_some() {
            return Err(Error::NonFiniteIterate {
                iteration: self.iteration,
            });
        }
        // Rotate buffers: scratch becomes the new y, y the new y_prev.
        std::mem::swap(&mut self.y_prev, &mut self.scratch);
        std::mem::swap(&mut self.y_prev, &mut self.y);
        self.iteration += 1;
        if self.iteration.is_multiple_of(KL_TRACE_EVERY) || self.iteration == self.iterations {
            let (q, _) = compute_q(&self.y, self.gammas.as_ref());
            self.kl_trace
                .push((self.iteration, kl_divergence(&self.p, &q)));
        }
        Ok(())
    }

    /// Runs all remaining iterations.
    pub fn run(&mut self) -> Result<()> {
        while self.iteration < self.iterations {
            self.step()?;
        }
        Ok(())
    }

    /// Current embedding coordinates.
    pub fn y(&self) -> &Matrix {
        &self.y
    }

    /// Completed iteration count.
    pub fn iteration(&self) -> usize {
        self.iteration
    }

    /// KL against the true affinities, recorded every 50 iterations and at
    /// the final one, as (iteration, value) pairs.
    pub fn kl_trace(&self) -> &[(usize, f64)] {
        &self.kl_trace
    }

    fn into_parts(self) -> (Matrix, Vec<(usize, f64)>) {
        (self.y, self.kl_trace)
    }
}

/// Diagnostics from an embedding run.
#[derive(Debug, Clone)]
pub struct RunStats {
    /// (iteration, KL) pairs, every 50 iterations plus the final one.
    pub kl_trace: Vec<(usize, f64)>,
    /// Points whose bandwidth search stopped at a bound.
    pub unconverged_rows: Vec<usize>,
}

impl RunStats {
    /// KL divergence at the last iteration.
    pub fn final_kl(&self) -> f64 {
        self.kl_trace.last().map_or(f64::NAN, |&(_, kl)| kl)
    }
}

/// Runs the full pipeline on a dataset: validation, PCA reduction of wide
/// inputs, affinity fitting, PCA initialization rescaled to a pooled
/// standard deviation of 1e-4, and gradient descent. Deterministic: the
/// same dataset and configuration produce bit-identical embeddings.
pub fn run_embedding(dataset: &Dataset, config: &EmbeddingConfig) -> Result<(Embedding, RunStats)> {
    dataset.validate()?;
    let n = dataset.len();
    config.validate(n)?;

    let points = if dataset.points.cols() > config.pca_input_dims {
        pca(&dataset.points, config.pca_input_dims.min(n))?
    } else {
        dataset.points.clone()
    };

    let model = match config.method {
        Method::Tsne => build_affinities_tsne(&points, config.perplexity)?,
        Method::Dtsne => build_affinities_dtsne(&points, config.perplexity)?,
    };

    let mut y0 = pca(&points, config.out_dim)?;
    rescale_pooled_std(&mut y0, INIT_STD);

    let mut optimizer = Optimizer::new(model.p, model.gammas, y0, config)?;
    optimizer.run()?;
    let (coords, kl_trace) = optimizer.into_parts();

    Ok((
        Embedding {
            coords,
            config_fingerprint: config_fingerprint(config, dataset),
        },
        RunStats {
            kl_trace,
            unconverged_rows: model.unconverged_rows,
        },
    ))
}

/// Scales a layout so the pooled standard deviation of its entries (about
/// the per-column means) equals `target`.
fn rescale_pooled_std(y: &mut Matrix, target: f64) {
    let n = y.rows();
    let dim = y.cols();
    if n == 0 || dim == 0 {
        return;
    }
    let mut means = vec![0.0; dim];
    for row in y.iter_rows() {
        for (m, v) in means.iter_mut().zip(row) {
            *m += v;
        }
    }
    for m in &mut means {
        *m /= n as f64;
    }
    let mut ss = 0.0;
    for row in y.iter_rows() {
        for (v, m) in row.iter().zip(&means) {
            let d = v - m;
            ss += d * d;
        }
    }
    let std = (ss / (n * dim) as f64).sqrt();
    if std > 0.0 {
        let factor = target / std;
        for v in y.data_mut() {
            *v *= factor;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::affinity::compute_gammas;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_layout(rng: &mut ChaCha8Rng, n: usize, dim: usize) -> Matrix {
        let data: Vec<f64> = (0..n * dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
        Matrix::from_vec(n, dim, data)
    }

    /// A random joint affinity matrix: symmetric, zero diagonal, sum 1.
    fn random_affinities(rng: &mut ChaCha8Rng, n: usize) -> SquareMatrix {
        let mut p = SquareMatrix::zeros(n);
        for i in 0..n {
            for j in (i + 1)..n {
                let v = rng.gen_range(0.01..1.0);
                p.set(i, j, v);
                p.set(j, i, v);
            }
        }
        let total = p.sum();
        p.scale(1.0 / total);
        p
    }

    fn random_gammas(rng: &mut ChaCha8Rng, n: usize) -> SquareMatrix {
        let sigmas: Vec<f64> = (0..n).map(|_| rng.gen_range(0.2..4.0)).collect();
        compute_gammas(&sigmas)
    }

    fn two_cluster_dataset(rng: &mut ChaCha8Rng, per_cluster: usize, dim: usize) -> Dataset {
        let mut rows = Vec::new();
        let mut labels = Vec::new();
        for c in 0..2 {
            let offset = if c == 0 { -4.0 } else { 4.0 };
            for _ in 0..per_cluster {
                let row: Vec<f64> = (0..dim)
                    .map(|k| offset * ((k == 0) as u8 as f64) + rng.gen_range(-1.0..1.0))
                    .collect();
                rows.push(row);
                labels.push(c as i64);
            }
        }
        let mut d = Dataset::new("two-clusters", Matrix::from_rows(&rows).unwrap());
        d.labels = Some(labels);
        d
    }

    #[test]
    fn q_for_two_points_is_half_each() {
        // Unit separation: T = 1/2 for both ordered pairs, Z = 1, q = 1/2.
        let y = Matrix::from_rows(&[vec![0.0, 0.0], vec![1.0, 0.0]]).unwrap();
        let (q, z) = compute_q(&y, None);
        assert_eq!(z, 1.0);
        assert_eq!(q.get(0, 1), 0.5);
        assert_eq!(q.get(1, 0), 0.5);
        assert_eq!(q.get(0, 0), 0.0);

        // Coincident points: T = 1 each, Z = 2, q = 1/2 again.
        let y = Matrix::from_rows(&[vec![3.0, 3.0], vec![3.0, 3.0]]).unwrap();
        let (q, z) = compute_q(&y, None);
        assert_eq!(z, 2.0);
        assert_eq!(q.get(0, 1), 0.5);
    }

    #[test]
    fn q_is_a_probability_distribution() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for n in [2usize, 5, 23] {
            let y = random_layout(&mut rng, n, 2);
            for gammas in [None, Some(random_gammas(&mut rng, n))] {
                let (q, z) = compute_q(&y, gammas.as_ref());
                assert!(z > 0.0);
                assert!((q.sum() - 1.0).abs() < 1e-10);
                assert!(q.is_symmetric());
                for i in 0..n {
                    assert_eq!(q.get(i, i), 0.0);
                    for j in 0..n {
                        assert!(q.get(i, j) >= 0.0);
                    }
                }
            }
        }
    }

    #[test]
    fn unit_gammas_reproduce_plain_kernel_exactly() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let y = random_layout(&mut rng, 15, 3);
        let mut ones = SquareMatrix::zeros(15);
        for v in ones.data_mut() {
            *v = 1.0;
        }
        let (plain, z_plain) = compute_q(&y, None);
        let (scaled, z_scaled) = compute_q(&y, Some(&ones));
        assert_eq!(z_plain, z_scaled);
        assert_eq!(plain.data(), scaled.data());
    }

    #[test]
    fn kl_of_identical_distributions_is_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let p = random_affinities(&mut rng, 6);
        assert_eq!(kl_divergence(&p, &p), 0.0);
    }

    #[test]
    fn kl_is_positive_for_distinct_distributions() {
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        let p = random_affinities(&mut rng, 8);
        let q = random_affinities(&mut rng, 8);
        let kl = kl_divergence(&p, &q);
        assert!(kl > 0.0);
        assert!(kl.is_finite());
    }

    #[test]
    fn kl_matches_independent_accumulation() {
        // Same definition, different algebra: sum p ln p - sum p ln q.
        let mut rng = ChaCha8Rng::seed_from_u64(40);
        let p = random_affinities(&mut rng, 7);
        let y = random_layout(&mut rng, 7, 2);
        let (q, _) = compute_q(&y, None);
        let mut expected = 0.0;
        for i in 0..7 {
            for j in 0..7 {
                let pv = p.get(i, j);
                if pv > 0.0 {
                    expected += pv * pv.ln() - pv * q.get(i, j).max(1e-12).ln();
                }
            }
        }
        assert!((kl_divergence(&p, &q) - expected).abs() < 1e-12);
    }

    #[test]
    fn gradient_vanishes_when_q_equals_p() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for gammas in [None, Some(random_gammas(&mut rng, 9))] {
            let y = random_layout(&mut rng, 9, 2);
            let (q, _) = compute_q(&y, gammas.as_ref());
            let grad = kl_gradient(&q, &y, gammas.as_ref());
            for &g in grad.data() {
                assert_eq!(g, 0.0);
            }
        }
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for (n, dim, with_gammas) in [(6usize, 2usize, false), (7, 3, true), (10, 2, true)] {
            let p = random_affinities(&mut rng, n);
            let gammas = if with_gammas {
                Some(random_gammas(&mut rng, n))
            } else {
                None
            };
            let y = random_layout(&mut rng, n, dim);
            let grad = kl_gradient(&p, &y, gammas.as_ref());

            let h = 1e-5;
            for r in 0..n {
                for c in 0..dim {
                    let mut plus = y.clone();
                    plus.set(r, c, y.get(r, c) + h);
                    let mut minus = y.clone();
                    minus.set(r, c, y.get(r, c) - h);
                    let f_plus = kl_divergence(&p, &compute_q(&plus, gammas.as_ref()).0);
                    let f_minus = kl_divergence(&p, &compute_q(&minus, gammas.as_ref()).0);
                    let fd = (f_plus - f_minus) / (2.0 * h);
                    let a = grad.get(r, c);
                    let err = (a - fd).abs();
                    let tol = (1e-4 * a.abs().max(fd.abs())).max(1e-7);
                    assert!(
                        err <= tol,
                        "n={n} dim={dim} gammas={with_gammas} at ({r},{c}): \
                         analytic {a} vs fd {fd}"
                    );
                }
            }
        }
    }

    #[test]
    fn gradient_rows_sum_to_zero() {
        // The objective is translation invariant, so forces cancel.
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let n = 12;
        let p = random_affinities(&mut rng, n);
        let gammas = random_gammas(&mut rng, n);
        let y = random_layout(&mut rng, n, 2);
        let grad = kl_gradient(&p, &y, Some(&gammas));
        for c in 0..2 {
            let total: f64 = (0..n).map(|r| grad.get(r, c)).sum();
            assert!(total.abs() < 1e-9, "column {c} sums to {total}");
        }
    }

    fn small_config(iterations: usize) -> EmbeddingConfig {
        EmbeddingConfig {
            perplexity: 5.0,
            iterations,
            learning_rate: Some(1.0),
            momentum_switch_iter: 10.min(iterations),
            exaggeration_factor: 1.0,
            exaggeration_iters: 0,
            ..EmbeddingConfig::default()
        }
    }

    #[test]
    fn optimizer_records_trace_every_fifty_and_at_end() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        let p = random_affinities(&mut rng, 10);
        let y0 = random_layout(&mut rng, 10, 2);
        let mut opt = Optimizer::new(p, None, y0, &small_config(120)).unwrap();
        opt.run().unwrap();
        let iters: Vec<usize> = opt.kl_trace().iter().map(|&(i, _)| i).collect();
        assert_eq!(iters, vec![50, 100, 120]);
    }

    #[test]
    fn optimizer_is_deterministic() {
        let mut rng = ChaCha8Rng::seed_from_u64(30);
        let p = random_affinities(&mut rng, 12);
        let gammas = random_gammas(&mut rng, 12);
        let y0 = random_layout(&mut rng, 12, 2);
        let cfg = small_config(80);

        let mut a = Optimizer::new(p.clone(), Some(gammas.clone()), y0.clone(), &cfg).unwrap();
        a.run().unwrap();
        let mut b = Optimizer::new(p, Some(gammas), y0, &cfg).unwrap();
        b.run().unwrap();
        assert_eq!(a.y().data(), b.y().data());
    }

    #[test]
    fn optimizer_rejects_unnormalized_affinities() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut p = random_affinities(&mut rng, 5);
        p.scale(2.0);
        let y0 = random_layout(&mut rng, 5, 2);
        assert!(matches!(
            Optimizer::new(p, None, y0, &small_config(10)),
            Err(Error::NotNormalized { .. })
        ));
    }

    #[test]
    fn diverging_run_reports_the_iteration() {
        let mut rng = ChaCha8Rng::seed_from_u64(44);
        let p = random_affinities(&mut rng, 8);
        let y0 = random_layout(&mut rng, 8, 2);
        let cfg = EmbeddingConfig {
            learning_rate: Some(1e300),
            ..small_config(50)
        };
        let mut opt = Optimizer::new(p, None, y0, &cfg).unwrap();
        match opt.run().unwrap_err() {
            Error::NonFiniteIterate { iteration } => assert!(iteration < 50),
            other => panic!("unexpected error: {other:?}"),
        }
    }

    #[test]
    fn trace_uses_true_affinities_during_exaggeration() {
        let mut rng = ChaCha8Rng::seed_from_u64(50);
        let p = random_affinities(&mut rng, 10);
        let y0 = random_layout(&mut rng, 10, 2);
        let cfg = EmbeddingConfig {
            perplexity: 5.0,
            iterations: 50,
            learning_rate: Some(0.5),
            momentum_switch_iter: 10,
            exaggeration_factor: 4.0,
            exaggeration_iters: 50, // the whole run is exaggerated
            ..EmbeddingConfig::default()
        };
        let mut opt = Optimizer::new(p.clone(), None, y0, &cfg).unwrap();
        opt.run().unwrap();
        let (q, _) = compute_q(opt.y(), None);
        let expected = kl_divergence(&p, &q);
        let (iter, recorded) = *opt.kl_trace().last().unwrap();
        assert_eq!(iter, 50);
        assert_eq!(recorded, expected);
    }

    #[test]
    fn equidistant_points_embed_symmetrically() {
        // Uniform affinities over three points: the optimum is an
        // equilateral layout, so all pairwise distances should agree.
        // Start from an order-1 scalene triangle; at tiny scales the
        // kernel is flat and the shape would barely move.
        let mut p = SquareMatrix::zeros(3);
        for i in 0..3 {
            for j in 0..3 {
                if i != j {
                    p.set(i, j, 1.0 / 6.0);
                }
            }
        }
        let y0 = Matrix::from_rows(&[vec![1.0, 0.0], vec![-2.0, 1.0], vec![0.5, -1.3]]).unwrap();
        let mut opt = Optimizer::new(p, None, y0, &small_config(300)).unwrap();
        opt.run().unwrap();
        let y = opt.y();
        let d01 = sq_dist(y.row(0), y.row(1)).sqrt();
        let d02 = sq_dist(y.row(0), y.row(2)).sqrt();
        let d12 = sq_dist(y.row(1), y.row(2)).sqrt();
        let max = d01.max(d02).max(d12);
        let min = d01.min(d02).min(d12);
        assert!(max / min < 1.05, "distances {d01} {d02} {d12}");
    }

    #[test]
    fn run_embedding_produces_finite_deterministic_coordinates() {
        let mut rng = ChaCha8Rng::seed_from_u64(60);
        let dataset = two_cluster_dataset(&mut rng, 20, 5);
        let cfg = EmbeddingConfig {
            method: Method::Dtsne,
            perplexity: 10.0,
            iterations: 60,
            momentum_switch_iter: 10,
            exaggeration_factor: 4.0,
            exaggeration_iters: 20,
            ..EmbeddingConfig::default()
        };
        let (emb, stats) = run_embedding(&dataset, &cfg).unwrap();
        assert_eq!(emb.coords.rows(), 40);
        assert_eq!(emb.dim(), 2);
        assert!(emb.coords.find_non_finite().is_none());
        assert_eq!(stats.kl_trace.last().unwrap().0, 60);
        assert!(stats.final_kl().is_finite());

        let (again, _) = run_embedding(&dataset, &cfg).unwrap();
        assert_eq!(emb.coords.data(), again.coords.data());
        assert_eq!(emb.config_fingerprint, again.config_fingerprint);

        let tsne_cfg = EmbeddingConfig {
            method: Method::Tsne,
            ..cfg
        };
        let (other, _) = run_embedding(&dataset, &tsne_cfg).unwrap();
        assert_ne!(emb.coords.data(), other.coords.data());
        assert_ne!(emb.config_fingerprint, other.config_fingerprint);
    }

    #[test]
    fn run_embedding_reduces_wide_inputs() {
        let mut rng = ChaCha8Rng::seed_from_u64(61);
        let dataset = two_cluster_dataset(&mut rng, 15, 60);
        let cfg = EmbeddingConfig {
            method: Method::Tsne,
            perplexity: 8.0,
            iterations: 30,
            momentum_switch_iter: 10,
            exaggeration_iters: 10,
            pca_input_dims: 10,
            ..EmbeddingConfig::default()
        };
        let (emb, _) = run_embedding(&dataset, &cfg).unwrap();
        assert_eq!(emb.coords.rows(), 30);
        assert_eq!(emb.dim(), 2);
        assert!(emb.coords.find_non_finite().is_none());
    }

    #[test]
    fn run_embedding_validates_inputs() {
        let mut rng = ChaCha8Rng::seed_from_u64(62);
        let dataset = two_cluster_dataset(&mut rng, 5, 3);
        let cfg = EmbeddingConfig {
            perplexity: 10.0, // equals n
            iterations: 20,
            momentum_switch_iter: 10,
            exaggeration_iters: 10,
            ..EmbeddingConfig::default()
        };
        assert!(matches!(
            run_embedding(&dataset, &cfg).unwrap_err(),
            Error::InvalidConfig(_)
        ));

        // One input column cannot support a 2-D PCA initialization.
        let narrow = Dataset::new(
            "narrow",
            Matrix::from_rows(&(0..12).map(|i| vec![i as f64]).collect::<Vec<_>>()).unwrap(),
        );
        let cfg = EmbeddingConfig {
            perplexity: 4.0,
            iterations: 20,
            momentum_switch_iter: 10,
            exaggeration_iters: 10,
            ..EmbeddingConfig::default()
        };
        assert!(matches!(
            run_embedding(&narrow, &cfg).unwrap_err(),
            Error::DimensionTooLarge { .. }
        ));
    }
}
