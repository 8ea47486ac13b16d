//! Shared helpers for the acceptance suite: an independent symmetric
//! eigensolver, a direct fixed-step RK4 integrator, and seeded weight draws.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use ricci_core::graph::WeightVector;

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, sorted
/// ascending. Independent of the library's linear algebra, so it can
/// certify definiteness claims.
pub fn symmetric_eigenvalues(mut a: Vec<Vec<f64>>) -> Vec<f64> {
    let n = a.len();
    for _sweep in 0..200 {
        let mut off = 0.0;
        for (i, row) in a.iter().enumerate() {
            for &v in &row[i + 1..] {
                off += v * v;
            }
        }
        if off < 1e-24 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = 0.5 * (a[q][q] - a[p][p]) / a[p][q];
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for row in a.iter_mut() {
                    let (rp, rq) = (row[p], row[q]);
                    row[p] = c * rp - s * rq;
                    row[q] = s * rp + c * rq;
                }
                let (top, rest) = a.split_at_mut(q);
                for (pk, qk) in top[p].iter_mut().zip(rest[0].iter_mut()) {
                    let (vp, vq) = (*pk, *qk);
                    *pk = c * vp - s * vq;
                    *qk = s * vp + c * vq;
                }
            }
        }
    }
    let mut eigenvalues: Vec<f64> = (0..n).map(|i| a[i][i]).collect();
    eigenvalues.sort_by(f64::total_cmp);
    eigenvalues
}

/// Seeded positive weights, log-uniform-ish spread in `[lo, hi]`.
pub fn random_weights(edge_count: usize, seed: u64, lo: f64, hi: f64) -> WeightVector {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    WeightVector::new((0..edge_count).map(|_| rng.gen_range(lo..hi)).collect())
        .expect("draws are positive")
}

/// Classical fixed-step RK4 on `dy/dt = rhs(y)`, recording every
/// `sample_every`-th step (plus the initial state). An oracle integrator:
/// deliberately simpler than the library's adaptive driver.
pub fn rk4_direct(
    y0: Vec<f64>,
    rhs: impl Fn(&[f64]) -> Vec<f64>,
    dt: f64,
    steps: usize,
    sample_every: usize,
) -> Vec<(f64, Vec<f64>)> {
    let mut y = y0;
    let mut samples = vec![(0.0, y.clone())];
    for step in 1..=steps {
        let k1 = rhs(&y);
        let mid1: Vec<f64> = y.iter().zip(&k1).map(|(a, b)| a + 0.5 * dt * b).collect();
        let k2 = rhs(&mid1);
        let mid2: Vec<f64> = y.iter().zip(&k2).map(|(a, b)| a + 0.5 * dt * b).collect();
        let k3 = rhs(&mid2);
        let end: Vec<f64> = y.iter().zip(&k3).map(|(a, b)| a + dt * b).collect();
        let k4 = rhs(&end);
        for i in 0..y.len() {
            y[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        if step % sample_every == 0 {
            samples.push((step as f64 * dt, y.clone()));
        }
    }
    samples
}
