//! Training losses for geodesic curve fitting.
//!
//! The similarity loss measures how far sampled curve points sit from the
//! originals via cosine residuals; the divergence loss is the empirical 1D
//! Wasserstein-1 distance between the learnable sampling parameters and a
//! uniform reference. Reductions run in a fixed left-to-right order so loss
//! traces are reproducible bit for bit.

use crate::error::{Error, Result};
use crate::matrix::PreShapeMatrix;
use serde::{Deserialize, Serialize};

/// The three loss values of one forward evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LossReport {
    pub sim: f64,
    pub diverg: f64,
    pub total: f64,
    pub beta: f64,
}

/// Similarity loss in matrix form: elementwise-multiply the sampled and
/// original matrices, reduce columns to inner products, subtract from ones,
/// take the Euclidean norm of the residual vector.
pub fn sim_loss(sampled: &PreShapeMatrix, original: &PreShapeMatrix) -> Result<f64> {
    check_shapes(sampled, original)?;
    let dim = sampled.dim();
    let m = sampled.ncols();

    // Hadamard product, materialized column-major.
    let mut hadamard = Vec::with_capacity(dim * m);
    for (s, o) in sampled.data().iter().zip(original.data().iter()) {
        hadamard.push(s * o);
    }

    // Column reduction: m inner products.
    let mut acc = 0.0;
    for j in 0..m {
        let mut dot = 0.0;
        for i in 0..dim {
            dot += hadamard[j * dim + i];
        }
        let r = 1.0 - dot;
        acc += r * r;
    }
    Ok(acc.sqrt())
}

/// Per-column loop form of the similarity loss. Retained as an independent
/// oracle for the matrix form.
pub fn sim_loss_reference(sampled: &PreShapeMatrix, original: &PreShapeMatrix) -> Result<f64> {
    check_shapes(sampled, original)?;
    let mut acc = 0.0;
    for j in 0..sampled.ncols() {
        let s = sampled.col(j);
        let o = original.col(j);
        let mut dot = 0.0;
        for (a, b) in s.iter().zip(o.iter()) {
            dot += a * b;
        }
        let r = 1.0 - dot;
        acc += r * r;
    }
    Ok(acc.sqrt())
}

fn check_shapes(a: &PreShapeMatrix, b: &PreShapeMatrix) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            got: b.dim(),
        });
    }
    if a.ncols() != b.ncols() {
        return Err(Error::LengthMismatch {
            left: a.ncols(),
            right: b.ncols(),
        });
    }
    Ok(())
}

/// Mean absolute difference of the two sequences after independently sorting
/// both ascending. Stable sort, ties broken by original index, so gradient
/// routing through the recorded permutation is deterministic.
pub fn divergence_loss(t: &[f64], z: &[f64]) -> Result<f64> {
    if t.len() != z.len() {
        return Err(Error::LengthMismatch {
            left: t.len(),
            right: z.len(),
        });
    }
    if t.is_empty() {
        return Err(Error::EmptyInput);
    }
    let ts = sorted(t);
    let zs = sorted(z);
    let m = t.len() as f64;
    let mut acc = 0.0;
    for (a, b) in ts.iter().zip(zs.iter()) {
        acc += (a - b).abs();
    }
    Ok(acc / m)
}

/// Stable ascending sort permutation: `perm[j]` is the original index of the
/// j-th smallest element.
pub fn sort_permutation(values: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).unwrap().then(a.cmp(&b)));
    idx
}

fn sorted(values: &[f64]) -> Vec<f64> {
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    v
}

/// Weighted total: `sim + beta * diverg`.
pub fn total_loss(sim: f64, diverg: f64, beta: f64) -> LossReport {
    LossReport {
        sim,
        diverg,
        total: sim + beta * diverg,
        beta,
    }
}
