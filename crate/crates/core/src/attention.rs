//! Single-head masked attention with queries, keys and values all equal to
//! the input embeddings, plus a finite-difference check that output
//! sensitivity matches the mask exactly.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::chunk::AttentionMask;
use crate::error::{Error, Result};

pub const PERTURBATION_STEP: f64 = 1e-4;
pub const SENSITIVITY_THRESHOLD: f64 = 1e-9;

/// Row-major `n x d` table of finite values.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingTable {
    n: usize,
    d: usize,
    data: Vec<f64>,
}

impl EmbeddingTable {
    pub fn new(n: usize, d: usize, data: Vec<f64>) -> Result<Self> {
        if d == 0 {
            return Err(Error::contract("embedding dimension must be at least 1"));
        }
        if data.len() != n * d {
            return Err(Error::contract(format!(
                "expected {} values for {n}x{d}, got {}",
                n * d,
                data.len()
            )));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::contract("embedding values must be finite"));
        }
        Ok(EmbeddingTable { n, d, data })
    }

    /// Entries uniform in `[-1, 1]`.
    pub fn random(n: usize, d: usize, seed: u64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let data = (0..n * d).map(|_| rng.gen_range(-1.0..=1.0)).collect();
        EmbeddingTable::new(n, d, data)
    }

    pub fn rows(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.d..(i + 1) * self.d]
    }

    fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.d..(i + 1) * self.d]
    }
}

pub fn default_scale(d: usize) -> f64 {
    1.0 / (d as f64).sqrt()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn check(emb: &EmbeddingTable, mask: &AttentionMask, scale: f64) -> Result<()> {
    if emb.rows() != mask.size() {
        return Err(Error::contract(format!(
            "{} embedding rows for a mask of size {}",
            emb.rows(),
            mask.size()
        )));
    }
    if !(scale > 0.0 && scale.is_finite()) {
        return Err(Error::contract("scale must be positive"));
    }
    Ok(())
}

/// Dense `n x n` weights. Forbidden cells are never part of the softmax,
/// so they are exactly zero.
pub fn attention_weights(emb: &EmbeddingTable, mask: &AttentionMask, scale: f64) -> Result<Vec<Vec<f64>>> {
    check(emb, mask, scale)?;
    let n = emb.rows();
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let allowed: Vec<usize> = (0..n).filter(|&j| mask.allows(i, j)).collect();
        if allowed.is_empty() {
            return Err(Error::contract(format!("row {i} attends to nothing")));
        }
        let logits: Vec<f64> = allowed
            .iter()
            .map(|&j| scale * dot(emb.row(i), emb.row(j)))
            .collect();
        let max = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let exps: Vec<f64> = logits.iter().map(|l| (l - max).exp()).collect();
        let total: f64 = exps.iter().sum();
        let mut row = vec![0.0; n];
        for (&j, e) in allowed.iter().zip(&exps) {
            row[j] = e / total;
        }
        out.push(row);
    }
    Ok(out)
}

pub fn attention_forward(emb: &EmbeddingTable, mask: &AttentionMask, scale: f64) -> Result<EmbeddingTable> {
    let weights = attention_weights(emb, mask, scale)?;
    let (n, d) = (emb.rows(), emb.dim());
    let mut data = vec![0.0; n * d];
    for (i, row) in weights.iter().enumerate() {
        for (j, &w) in row.iter().enumerate() {
            if w == 0.0 {
                continue;
            }
            for (k, v) in emb.row(j).iter().enumerate() {
                data[i * d + k] += w * v;
            }
        }
    }
    EmbeddingTable::new(n, d, data)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LocalityReport {
    pub positions: usize,
    pub dim: usize,
    /// Largest weight on a forbidden cell; zero when the mask holds.
    pub max_forbidden_weight: f64,
    /// Largest output change on a forbidden cell.
    pub max_forbidden_delta: f64,
    /// Smallest output change on an allowed cell.
    pub min_allowed_delta: f64,
    /// Cells where sensitivity and mask disagree.
    pub violations: usize,
    pub passed: bool,
}

impl std::fmt::Display for LocalityReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "positions: {}", self.positions)?;
        writeln!(f, "dim: {}", self.dim)?;
        writeln!(f, "max_forbidden_weight: {:e}", self.max_forbidden_weight)?;
        writeln!(f, "max_forbidden_delta: {:e}", self.max_forbidden_delta)?;
        writeln!(f, "min_allowed_delta: {:e}", self.min_allowed_delta)?;
        writeln!(f, "violations: {}", self.violations)?;
        write!(f, "result: {}", if self.passed { "PASS" } else { "FAIL" })
    }
}

/// Perturbs each row in turn by [`PERTURBATION_STEP`] in every coordinate
/// and checks that output row `i` moves by more than
/// [`SENSITIVITY_THRESHOLD`] exactly when the mask allows `(i, j)`.
#[allow(clippy::needless_range_loop)]
pub fn verify_locality(emb: &EmbeddingTable, mask: &AttentionMask) -> Result<LocalityReport> {
    let scale = default_scale(emb.dim());
    let weights = attention_weights(emb, mask, scale)?;
    let base = attention_forward(emb, mask, scale)?;
    let n = emb.rows();

    let mut max_forbidden_weight: f64 = 0.0;
    let mut max_forbidden_delta: f64 = 0.0;
    let mut min_allowed_delta = f64::INFINITY;
    let mut violations = 0;
    for j in 0..n {
        let mut bumped = emb.clone();
        bumped.row_mut(j).iter_mut().for_each(|v| *v += PERTURBATION_STEP);
        let out = attention_forward(&bumped, mask, scale)?;
        for i in 0..n {
            let delta = out
                .row(i)
                .iter()
                .zip(base.row(i))
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            let allowed = mask.allows(i, j);
            let sensitive = delta > SENSITIVITY_THRESHOLD;
            if allowed {
                min_allowed_delta = min_allowed_delta.min(delta);
            } else {
                max_forbidden_weight = max_forbidden_weight.max(weights[i][j].abs());
                max_forbidden_delta = max_forbidden_delta.max(delta);
                if weights[i][j] != 0.0 {
                    violations += 1;
                }
            }
            if allowed != sensitive {
                violations += 1;
            }
        }
    }
    Ok(LocalityReport {
        positions: n,
        dim: emb.dim(),
        max_forbidden_weight,
        max_forbidden_delta,
        min_allowed_delta: if min_allowed_delta.is_finite() { min_allowed_delta } else { 0.0 },
        violations,
        passed: violations == 0,
    })
}
