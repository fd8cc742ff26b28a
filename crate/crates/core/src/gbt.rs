//! Gradient-boosted regression trees with second-order leaf weights,
//! exact greedy split search and split-count (F-score) importance.
//!
//! The loss is squared error `½(y − ŷ)²`, so every record contributes
//! gradient `ŷ − y` and hessian `1`. Each tree is penalized by
//! `γ·leaves + ½λ‖w‖²`.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::schema::{FeatureId, NUM_FEATURES};

/// Node count below which the per-feature split search stays sequential.
const PARALLEL_SEARCH_MIN: usize = 2048;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoostParams {
    pub n_trees: usize,
    pub max_depth: usize,
    pub learning_rate: f64,
    pub lambda: f64,
    pub gamma: f64,
    pub min_child_weight: f64,
    pub seed: u64,
}

impl Default for BoostParams {
    fn default() -> Self {
        BoostParams {
            n_trees: 100,
            max_depth: 6,
            learning_rate: 0.3,
            lambda: 1.0,
            gamma: 0.0,
            min_child_weight: 1.0,
            seed: 0,
        }
    }
}

impl BoostParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidParameter(m.to_string()));
        if self.n_trees == 0 {
            return bad("n_trees must be positive");
        }
        if self.max_depth == 0 {
            return bad("max_depth must be positive");
        }
        if !(self.learning_rate > 0.0 && self.learning_rate <= 1.0) {
            return bad("learning_rate must lie in (0, 1]");
        }
        if !(self.lambda >= 0.0 && self.lambda.is_finite()) {
            return bad("lambda must be >= 0");
        }
        if !(self.gamma >= 0.0 && self.gamma.is_finite()) {
            return bad("gamma must be >= 0");
        }
        if !(self.min_child_weight >= 0.0 && self.min_child_weight.is_finite()) {
            return bad("min_child_weight must be >= 0");
        }
        Ok(())
    }
}

/// Optimal weight `−G / (H + λ)` of a leaf.
pub fn leaf_weight(grad_sum: f64, hess_sum: f64, lambda: f64) -> Result<f64> {
    let denom = hess_sum + lambda;
    if denom.is_nan() || denom <= 0.0 {
        return Err(Error::DegenerateLeaf(denom));
    }
    Ok(-grad_sum / denom)
}

/// Reduction of the regularized objective from splitting a leaf into
/// (left, right), net of the per-leaf penalty `gamma`.
pub fn split_gain(gl: f64, hl: f64, gr: f64, hr: f64, lambda: f64, gamma: f64) -> f64 {
    let score = |g: f64, h: f64| g * g / (h + lambda);
    0.5 * (score(gl, hl) + score(gr, hr) - score(gl + gr, hl + hr)) - gamma
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TreeNode {
    Split {
        feature: FeatureId,
        threshold: f64,
        left: Box<TreeNode>,
        right: Box<TreeNode>,
    },
    Leaf {
        weight: f64,
    },
}

impl TreeNode {
    pub fn leaf(weight: f64) -> TreeNode {
        TreeNode::Leaf { weight }
    }

    pub fn split(feature: FeatureId, threshold: f64, left: TreeNode, right: TreeNode) -> TreeNode {
        TreeNode::Split {
            feature,
            threshold,
            left: Box::new(left),
            right: Box::new(right),
        }
    }
}

/// Binary regression tree. Values `< threshold` route left.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RegressionTree {
    pub root: TreeNode,
}

impl RegressionTree {
    pub fn new(root: TreeNode) -> Self {
        RegressionTree { root }
    }

    /// Raw (unshrunk) leaf weight reached by `row`.
    pub fn predict(&self, row: &[f64]) -> Result<f64> {
        let mut node = &self.root;
        loop {
            match node {
                TreeNode::Leaf { weight } => return Ok(*weight),
                TreeNode::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    let x = match row.get(feature.index()) {
                        Some(x) if !x.is_nan() => *x,
                        _ => return Err(Error::MissingFeature(feature.name().to_string())),
                    };
                    node = if x < *threshold { left } else { right };
                }
            }
        }
    }

    /// Number of split levels on the longest root-to-leaf path.
    pub fn depth(&self) -> usize {
        fn go(n: &TreeNode) -> usize {
            match n {
                TreeNode::Leaf { .. } => 0,
                TreeNode::Split { left, right, .. } => 1 + go(left).max(go(right)),
            }
        }
        go(&self.root)
    }

    pub fn leaf_weights(&self) -> Vec<f64> {
        fn go(n: &TreeNode, out: &mut Vec<f64>) {
            match n {
                TreeNode::Leaf { weight } => out.push(*weight),
                TreeNode::Split { left, right, .. } => {
                    go(left, out);
                    go(right, out);
                }
            }
        }
        let mut out = Vec::new();
        go(&self.root, &mut out);
        out
    }

    /// Split features in pre-order.
    pub fn split_features(&self) -> Vec<FeatureId> {
        fn go(n: &TreeNode, out: &mut Vec<FeatureId>) {
            if let TreeNode::Split {
                feature,
                left,
                right,
                ..
            } = n
            {
                out.push(*feature);
                go(left, out);
                go(right, out);
            }
        }
        let mut out = Vec::new();
        go(&self.root, &mut out);
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoostedEnsemble {
    pub base_score: f64,
    pub params: BoostParams,
    pub trees: Vec<RegressionTree>,
    /// Number of splits per feature across all trees.
    pub fscore: BTreeMap<FeatureId, usize>,
}

impl BoostedEnsemble {
    /// Rebuilds an ensemble from trees, recounting the F-scores.
    pub fn from_trees(base_score: f64, params: BoostParams, trees: Vec<RegressionTree>) -> Self {
        let mut fscore = BTreeMap::new();
        for f in trees.iter().flat_map(|t| t.split_features()) {
            *fscore.entry(f).or_insert(0) += 1;
        }
        BoostedEnsemble {
            base_score,
            params,
            trees,
            fscore,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("ensemble serializes")
    }
}

/// `base_score + η Σ f_t(row)`.
pub fn predict_boosted(model: &BoostedEnsemble, row: &[f64]) -> Result<f64> {
    let mut sum = 0.0;
    for t in &model.trees {
        sum += t.predict(row)?;
    }
    Ok(model.base_score + model.params.learning_rate * sum)
}

pub fn predict_dataset(model: &BoostedEnsemble, data: &Dataset) -> Vec<f64> {
    data.records()
        .iter()
        .map(|r| predict_boosted(model, &r.features).expect("full-width record"))
        .collect()
}

/// Features ranked by split count, highest first; ties go to the lower
/// index. Features never split on are omitted.
pub fn feature_importance(model: &BoostedEnsemble) -> Vec<(FeatureId, usize)> {
    let mut ranked: Vec<(FeatureId, usize)> = model
        .fscore
        .iter()
        .filter(|(_, &c)| c > 0)
        .map(|(&f, &c)| (f, c))
        .collect();
    ranked.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
    ranked
}

pub fn fit_boosted(
    train: &Dataset,
    subset: &[FeatureId],
    params: &BoostParams,
) -> Result<BoostedEnsemble> {
    let rows: Vec<[f64; NUM_FEATURES]> = train.records().iter().map(|r| r.features).collect();
    fit_boosted_rows(&rows, &train.targets(), subset, params)
}

/// Trains on raw full-width rows; targets are unconstrained.
pub fn fit_boosted_rows(
    rows: &[[f64; NUM_FEATURES]],
    targets: &[f64],
    subset: &[FeatureId],
    params: &BoostParams,
) -> Result<BoostedEnsemble> {
    params.validate()?;
    if rows.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if rows.len() != targets.len() {
        return Err(Error::LengthMismatch {
            left: rows.len(),
            right: targets.len(),
        });
    }
    let n = rows.len();
    let mut features = subset.to_vec();
    features.sort();
    features.dedup();

    let columns: Vec<Vec<f64>> = features
        .iter()
        .map(|f| rows.iter().map(|r| r[f.index()]).collect())
        .collect();
    let presorted: Vec<Vec<u32>> = columns
        .iter()
        .map(|col| {
            let mut idx: Vec<u32> = (0..n as u32).collect();
            idx.sort_by(|&a, &b| col[a as usize].total_cmp(&col[b as usize]));
            idx
        })
        .collect();

    let base_score = targets.iter().sum::<f64>() / n as f64;
    let mut preds = vec![base_score; n];
    let hess = vec![1.0; n];
    let mut trees = Vec::with_capacity(params.n_trees);
    let mut fscore = BTreeMap::new();

    for _ in 0..params.n_trees {
        let grad: Vec<f64> = preds.iter().zip(targets).map(|(p, y)| p - y).collect();
        let mut builder = TreeBuilder {
            features: &features,
            columns: &columns,
            grad: &grad,
            hess: &hess,
            params,
            fscore: &mut fscore,
        };
        let all_rows: Vec<u32> = (0..n as u32).collect();
        let root = builder.build(all_rows, presorted.clone(), 0)?;
        let tree = RegressionTree::new(root);
        for (p, row) in preds.iter_mut().zip(rows) {
            *p += params.learning_rate * tree.predict(row)?;
        }
        trees.push(tree);
    }

    Ok(BoostedEnsemble {
        base_score,
        params: *params,
        trees,
        fscore,
    })
}

#[derive(Debug, Clone, Copy)]
struct Candidate {
    gain: f64,
    slot: usize,
    threshold: f64,
}

struct TreeBuilder<'a> {
    features: &'a [FeatureId],
    columns: &'a [Vec<f64>],
    grad: &'a [f64],
    hess: &'a [f64],
    params: &'a BoostParams,
    fscore: &'a mut BTreeMap<FeatureId, usize>,
}

impl TreeBuilder<'_> {
    /// `rows` is ascending; `sorted[k]` holds the same rows ordered by the
    /// k-th feature.
    fn build(&mut self, rows: Vec<u32>, sorted: Vec<Vec<u32>>, depth: usize) -> Result<TreeNode> {
        let g: f64 = rows.iter().map(|&r| self.grad[r as usize]).sum();
        let h: f64 = rows.iter().map(|&r| self.hess[r as usize]).sum();

        let best = if depth < self.params.max_depth && rows.len() >= 2 {
            self.best_split(&sorted, g, h)
        } else {
            None
        };
        let Some(best) = best else {
            return Ok(TreeNode::leaf(leaf_weight(g, h, self.params.lambda)?));
        };

        let col = &self.columns[best.slot];
        let goes_left = |r: &u32| col[*r as usize] < best.threshold;
        let (left_rows, right_rows): (Vec<u32>, Vec<u32>) = rows.into_iter().partition(goes_left);
        let mut left_sorted = Vec::with_capacity(sorted.len());
        let mut right_sorted = Vec::with_capacity(sorted.len());
        for list in sorted {
            let (l, r): (Vec<u32>, Vec<u32>) = list.into_iter().partition(goes_left);
            left_sorted.push(l);
            right_sorted.push(r);
        }

        let feature = self.features[best.slot];
        *self.fscore.entry(feature).or_insert(0) += 1;
        let left = self.build(left_rows, left_sorted, depth + 1)?;
        let right = self.build(right_rows, right_sorted, depth + 1)?;
        Ok(TreeNode::split(feature, best.threshold, left, right))
    }

    fn best_split(&self, sorted: &[Vec<u32>], g: f64, h: f64) -> Option<Candidate> {
        let per_feature: Vec<Option<Candidate>> = if sorted[0].len() >= PARALLEL_SEARCH_MIN {
            (0..sorted.len())
                .into_par_iter()
                .map(|k| self.best_for_feature(k, &sorted[k], g, h))
                .collect()
        } else {
            (0..sorted.len())
                .map(|k| self.best_for_feature(k, &sorted[k], g, h))
                .collect()
        };
        // Features are in ascending index order; strict comparison keeps the
        // lowest index on equal gain.
        let mut best: Option<Candidate> = None;
        for c in per_feature.into_iter().flatten() {
            if best.is_none_or(|b| c.gain > b.gain) {
                best = Some(c);
            }
        }
        best
    }

    fn best_for_feature(&self, slot: usize, order: &[u32], g: f64, h: f64) -> Option<Candidate> {
        let col = &self.columns[slot];
        let (lambda, gamma, mcw) = (
            self.params.lambda,
            self.params.gamma,
            self.params.min_child_weight,
        );
        let mut best: Option<Candidate> = None;
        let (mut gl, mut hl) = (0.0, 0.0);
        for pair in order.windows(2) {
            let (cur, next) = (pair[0] as usize, pair[1] as usize);
            gl += self.grad[cur];
            hl += self.hess[cur];
            let (a, b) = (col[cur], col[next]);
            if a == b {
                continue;
            }
            let hr = h - hl;
            if hl < mcw || hr < mcw {
                continue;
            }
            let gain = split_gain(gl, hl, g - gl, hr, lambda, gamma);
            if gain > 0.0 && best.is_none_or(|c| gain > c.gain) {
                best = Some(Candidate {
                    gain,
                    slot,
                    threshold: midpoint(a, b),
                });
            }
        }
        best
    }
}

/// Threshold strictly above `a` and at most `b`.
fn midpoint(a: f64, b: f64) -> f64 {
    let m = a + (b - a) / 2.0;
    if m > a {
        m
    } else {
        b
    }
}
