//! Classification and partition-agreement metrics.
//!
//! Everything here treats labels as two classes {0, 1} with class 1 as the
//! positive class. Zero denominators yield 0 for precision, recall, and F1,
//! and the adjusted Rand index of two trivial (degenerate) partitions is 1.

use crate::error::{Error, Result};

fn check_pair(a: &[u8], b: &[u8]) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::LabelPairLength {
            a: a.len(),
            b: b.len(),
        });
    }
    if a.is_empty() {
        return Err(Error::EmptyLabels);
    }
    Ok(())
}

/// 2x2 confusion counts; rows index the true label, columns the prediction.
pub fn confusion_counts(y_true: &[u8], y_pred: &[u8]) -> Result<[[u64; 2]; 2]> {
    check_pair(y_true, y_pred)?;
    let mut counts = [[0u64; 2]; 2];
    for (&t, &p) in y_true.iter().zip(y_pred) {
        debug_assert!(t <= 1 && p <= 1);
        counts[t as usize][p as usize] += 1;
    }
    Ok(counts)
}

/// Fraction of agreeing positions.
pub fn accuracy(y_true: &[u8], y_pred: &[u8]) -> Result<f64> {
    check_pair(y_true, y_pred)?;
    let hits = y_true.iter().zip(y_pred).filter(|(t, p)| t == p).count();
    Ok(hits as f64 / y_true.len() as f64)
}

/// Precision of class 1: tp / (tp + fp), 0 when nothing is predicted positive.
pub fn precision(y_true: &[u8], y_pred: &[u8]) -> Result<f64> {
    let c = confusion_counts(y_true, y_pred)?;
    let tp = c[1][1] as f64;
    let fp = c[0][1] as f64;
    Ok(if tp + fp == 0.0 { 0.0 } else { tp / (tp + fp) })
}

/// Recall of class 1: tp / (tp + fn), 0 when no positives exist.
pub fn recall(y_true: &[u8], y_pred: &[u8]) -> Result<f64> {
    let c = confusion_counts(y_true, y_pred)?;
    let tp = c[1][1] as f64;
    let fal_n = c[1][0] as f64;
    Ok(if tp + fal_n == 0.0 {
        0.0
    } else {
        tp / (tp + fal_n)
    })
}

/// F1 of class 1: harmonic mean of precision and recall, 0 when both vanish.
pub fn f1_score(y_true: &[u8], y_pred: &[u8]) -> Result<f64> {
    let p = precision(y_true, y_pred)?;
    let r = recall(y_true, y_pred)?;
    Ok(if p + r == 0.0 {
        0.0
    } else {
        2.0 * p * r / (p + r)
    })
}

fn comb2(x: f64) -> f64 {
    x * (x - 1.0) / 2.0
}

/// Adjusted Rand index between two labelings of the same items.
///
/// Computed from the contingency table; the degenerate case where the
/// expected index equals the maximum index (both partitions trivial) is
/// defined as 1. Works for arbitrary u8 labels, not just {0, 1}.
pub fn adjusted_rand_index(a: &[u8], b: &[u8]) -> Result<f64> {
    check_pair(a, b)?;
    let mut table = [[0u64; 256]; 2];
    // Row and column sums fit in fixed tables; the joint table is sparse, so
    // accumulate pair counts through a map keyed by (a, b).
    let mut joint = std::collections::HashMap::new();
    for (&x, &y) in a.iter().zip(b) {
        table[0][x as usize] += 1;
        table[1][y as usize] += 1;
        *joint.entry((x, y)).or_insert(0u64) += 1;
    }
    let sum_ij: f64 = joint.values().map(|&n| comb2(n as f64)).sum();
    let sum_a: f64 = table[0].iter().map(|&n| comb2(n as f64)).sum();
    let sum_b: f64 = table[1].iter().map(|&n| comb2(n as f64)).sum();
    let total = comb2(a.len() as f64);
    if total == 0.0 {
        return Ok(1.0);
    }
    let expected = sum_a * sum_b / total;
    let max_index = 0.5 * (sum_a + sum_b);
    if (max_index - expected).abs() < 1e-12 {
        return Ok(1.0);
    }
    Ok((sum_ij - expected) / (max_index - expected))
}

/// Mean and population standard deviation of a sample vector.
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (0.0, 0.0);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    (mean, var.sqrt())
}
