//! Random forest classifier for two classes.
//!
//! CART trees on bootstrap samples: Gini impurity, no depth limit by
//! default, `ceil(sqrt(d))` feature candidates per node. Everything is
//! deterministic for a fixed seed: tree `i` draws from its own counter-mode
//! stream, node candidates come from the tree's stream in visitation order,
//! candidate rows sort by (value, original index), and prediction ties fall
//! to class 0. Trees build in parallel without affecting any of that.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{de::DeserializeOwned, Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Training knobs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ForestParams {
    pub n_trees: usize,
    /// Candidate features per node; `None` means `ceil(sqrt(d))`.
    pub max_features: Option<usize>,
    pub min_samples_leaf: usize,
    /// `None` grows nodes until purity or exhaustion.
    pub max_depth: Option<usize>,
    pub seed: u64,
}

impl Default for ForestParams {
    fn default() -> Self {
        Self {
            n_trees: 100,
            max_features: None,
            min_samples_leaf: 1,
            max_depth: None,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
enum TreeNode<F> {
    Leaf {
        class: u8,
    },
    Split {
        feature: u32,
        threshold: F,
        left: Box<TreeNode<F>>,
        right: Box<TreeNode<F>>,
    },
}

impl<F: Real> TreeNode<F> {
    fn predict(&self, row: &[F]) -> u8 {
        match self {
            TreeNode::Leaf { class } => *class,
            TreeNode::Split {
                feature,
                threshold,
                left,
                right,
            } => {
                if row[*feature as usize] <= *threshold {
                    left.predict(row)
                } else {
                    right.predict(row)
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct Tree<F> {
    root: TreeNode<F>,
    /// Per-training-row bootstrap membership, for out-of-bag prediction.
    in_bag: Vec<bool>,
}

/// A trained forest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForestModel<F> {
    params: ForestParams,
    n_features: usize,
    trees: Vec<Tree<F>>,
}

#[derive(Serialize, Deserialize)]
struct VersionedModel<F> {
    version: u32,
    model: ForestModel<F>,
}

const MODEL_VERSION: u32 = 1;

fn majority(counts: [usize; 2]) -> u8 {
    // Ties fall to class 0.
    u8::from(counts[1] > counts[0])
}

struct Grower<'a, F> {
    x: &'a [Vec<F>],
    y: &'a [u8],
    n_candidates: usize,
    min_samples_leaf: usize,
    max_depth: Option<usize>,
}

impl<F: Real> Grower<'_, F> {
    fn grow(&self, indices: Vec<u32>, depth: usize, rng: &mut ChaCha8Rng) -> TreeNode<F> {
        let mut counts = [0usize; 2];
        for &i in &indices {
            counts[self.y[i as usize] as usize] += 1;
        }
        if counts[0] == 0 || counts[1] == 0 || indices.len() < 2 * self.min_samples_leaf {
            return TreeNode::Leaf {
                class: majority(counts),
            };
        }
        if let Some(limit) = self.max_depth {
            if depth >= limit {
                return TreeNode::Leaf {
                    class: majority(counts),
                };
            }
        }

        let d = self.x[0].len();
        let candidates = rand::seq::index::sample(rng, d, self.n_candidates.min(d));
        let n = indices.len() as f64;

        let mut best: Option<(f64, u32, F)> = None;
        let mut column: Vec<(F, u32)> = Vec::with_capacity(indices.len());
        for feature in candidates.iter() {
            column.clear();
            column.extend(indices.iter().map(|&i| (self.x[i as usize][feature], i)));
            column.sort_unstable_by(|a, b| {
                a.0.partial_cmp(&b.0).expect("finite").then(a.1.cmp(&b.1))
            });

            // Sweep split positions; class counts accumulate on the left.
            let mut left = [0usize; 2];
            for pos in 0..column.len() - 1 {
                left[self.y[column[pos].1 as usize] as usize] += 1;
                if column[pos].0 == column[pos + 1].0 {
                    continue;
                }
                let nl = pos + 1;
                let nr = column.len() - nl;
                if nl < self.min_samples_leaf || nr < self.min_samples_leaf {
                    continue;
                }
                let right = [counts[0] - left[0], counts[1] - left[1]];
                let gini = |c: [usize; 2]| {
                    let m = (c[0] + c[1]) as f64;
                    let p0 = c[0] as f64 / m;
                    let p1 = c[1] as f64 / m;
                    1.0 - p0 * p0 - p1 * p1
                };
                let weighted = (nl as f64 * gini(left) + nr as f64 * gini(right)) / n;
                if best.is_none_or(|(b, _, _)| weighted < b) {
                    let half: F = F::from(0.5).expect("scalar");
                    let threshold = (column[pos].0 + column[pos + 1].0) * half;
                    best = Some((weighted, feature as u32, threshold));
                }
            }
        }

        match best {
            None => TreeNode::Leaf {
                class: majority(counts),
            },
            Some((_, feature, threshold)) => {
                let (left_idx, right_idx): (Vec<u32>, Vec<u32>) = indices
                    .into_iter()
                    .partition(|&i| self.x[i as usize][feature as usize] <= threshold);
                debug_assert!(!left_idx.is_empty() && !right_idx.is_empty());
                let left = self.grow(left_idx, depth + 1, rng);
                let right = self.grow(right_idx, depth + 1, rng);
                TreeNode::Split {
                    feature,
                    threshold,
                    left: Box::new(left),
                    right: Box::new(right),
                }
            }
        }
    }
}

/// Trains a forest on rows `x` with binary labels `y`.
pub fn train<F: Real>(x: &[Vec<F>], y: &[u8], params: &ForestParams) -> Result<ForestModel<F>> {
    if x.is_empty() {
        return Err(Error::EmptyTraining);
    }
    if x.len() != y.len() {
        return Err(Error::LabelLength {
            labels: y.len(),
            rows: x.len(),
        });
    }
    let d = x[0].len();
    if d == 0 {
        return Err(Error::EmptyMatrix);
    }
    if let Some(row) = x.iter().find(|r| r.len() != d) {
        return Err(Error::ModelArity {
            expected: d,
            got: row.len(),
        });
    }
    if !(y.contains(&0) && y.contains(&1)) {
        return Err(Error::SingleClassTraining);
    }
    if params.n_trees == 0 {
        return Err(Error::Config("forest needs at least one tree".into()));
    }
    if params.min_samples_leaf == 0 {
        return Err(Error::Config("min_samples_leaf must be at least 1".into()));
    }

    let n_candidates = params
        .max_features
        .unwrap_or_else(|| (d as f64).sqrt().ceil() as usize)
        .clamp(1, d);
    let grower = Grower {
        x,
        y,
        n_candidates,
        min_samples_leaf: params.min_samples_leaf,
        max_depth: params.max_depth,
    };

    let n = x.len();
    let trees: Vec<Tree<F>> = (0..params.n_trees)
        .into_par_iter()
        .map(|tree_index| {
            let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
            rng.set_stream(tree_index as u64);
            let mut in_bag = vec![false; n];
            let indices: Vec<u32> = (0..n)
                .map(|_| {
                    let i = rng.random_range(0..n);
                    in_bag[i] = true;
                    i as u32
                })
                .collect();
            let root = grower.grow(indices, 0, &mut rng);
            Tree { root, in_bag }
        })
        .collect();

    Ok(ForestModel {
        params: *params,
        n_features: d,
        trees,
    })
}

impl<F: Real> ForestModel<F> {
    pub fn params(&self) -> &ForestParams {
        &self.params
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    fn check_row(&self, row: &[F]) -> Result<()> {
        if row.len() != self.n_features {
            return Err(Error::ModelArity {
                expected: self.n_features,
                got: row.len(),
            });
        }
        Ok(())
    }

    /// Majority vote over all trees; ties fall to class 0.
    pub fn predict_one(&self, row: &[F]) -> Result<u8> {
        self.check_row(row)?;
        let ones: usize = self
            .trees
            .iter()
            .map(|t| t.root.predict(row) as usize)
            .sum();
        Ok(u8::from(2 * ones > self.trees.len()))
    }

    pub fn predict(&self, rows: &[Vec<F>]) -> Result<Vec<u8>> {
        rows.iter().map(|r| self.predict_one(r)).collect()
    }

    /// Mean accuracy on labeled rows.
    pub fn score(&self, rows: &[Vec<F>], labels: &[u8]) -> Result<f64> {
        if rows.len() != labels.len() {
            return Err(Error::LabelLength {
                labels: labels.len(),
                rows: rows.len(),
            });
        }
        if rows.is_empty() {
            return Err(Error::EmptyMatrix);
        }
        let pred = self.predict(rows)?;
        let correct = pred.iter().zip(labels).filter(|(p, l)| p == l).count();
        Ok(correct as f64 / rows.len() as f64)
    }

    /// Out-of-bag prediction for each training row: the vote of the trees
    /// whose bootstrap missed that row, `None` if every tree saw it.
    pub fn oob_predict(&self, training_rows: &[Vec<F>]) -> Result<Vec<Option<u8>>> {
        training_rows
            .iter()
            .enumerate()
            .map(|(i, row)| {
                self.check_row(row)?;
                let mut votes = [0usize; 2];
                for tree in &self.trees {
                    if i < tree.in_bag.len() && !tree.in_bag[i] {
                        votes[tree.root.predict(row) as usize] += 1;
                    }
                }
                Ok((votes[0] + votes[1] > 0).then(|| majority(votes)))
            })
            .collect()
    }
}

impl<F: Real + Serialize> ForestModel<F> {
    /// Versioned JSON dump of the model.
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&VersionedModel {
            version: MODEL_VERSION,
            model: self.clone(),
        })?)
    }
}

impl<F: Real + DeserializeOwned> ForestModel<F> {
    pub fn from_json(text: &str) -> Result<Self> {
        let versioned: VersionedModel<F> = serde_json::from_str(text)?;
        if versioned.version != MODEL_VERSION {
            return Err(Error::ModelVersion {
                expected: MODEL_VERSION,
                got: versioned.version,
            });
        }
        Ok(versioned.model)
    }
}
