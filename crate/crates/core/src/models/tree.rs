//! Binary decision trees shared by every tree-based learner.
//!
//! Per-sample sufficient statistics are four numbers whose meaning depends on
//! the criterion:
//! - Gini / entropy: `[w, w*y, 0, 0]`
//! - Friedman MSE: `[w, w*r, w*r^2, aux]`
//! - second order: `[1, g, h, 0]`

use serde::{Deserialize, Serialize};

use crate::seed::Rng;
use crate::Matrix;
use rand::seq::SliceRandom;

pub type Stats = [f64; 4];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassCriterion {
    Gini,
    Entropy,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Criterion {
    Class(ClassCriterion),
    FriedmanMse,
    SecondOrder { lambda: f64, min_child_weight: f64 },
}

fn add(a: &mut Stats, b: &Stats) {
    for k in 0..4 {
        a[k] += b[k];
    }
}

fn sub(a: &Stats, b: &Stats) -> Stats {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2], a[3] - b[3]]
}

pub fn gini_binary(p1: f64) -> f64 {
    1.0 - p1 * p1 - (1.0 - p1) * (1.0 - p1)
}

pub fn entropy_binary(p1: f64) -> f64 {
    let h = |p: f64| if p > 0.0 { -p * p.log2() } else { 0.0 };
    h(p1) + h(1.0 - p1)
}

impl Criterion {
    /// Weighted node impurity (impurity times node weight).
    fn weighted_impurity(self, s: &Stats) -> f64 {
        match self {
            Criterion::Class(c) => {
                if s[0] <= 0.0 {
                    return 0.0;
                }
                let p1 = (s[1] / s[0]).clamp(0.0, 1.0);
                s[0] * match c {
                    ClassCriterion::Gini => gini_binary(p1),
                    ClassCriterion::Entropy => entropy_binary(p1),
                }
            }
            Criterion::FriedmanMse => (s[2] - s[1] * s[1] / s[0]).max(0.0),
            Criterion::SecondOrder { lambda, .. } => -0.5 * s[1] * s[1] / (s[2] + lambda),
        }
    }

    fn is_pure(self, s: &Stats) -> bool {
        match self {
            Criterion::Class(_) | Criterion::FriedmanMse => {
                self.weighted_impurity(s) <= f64::EPSILON * s[0].max(1.0)
            }
            Criterion::SecondOrder { .. } => false,
        }
    }

    /// Split score to maximise, `None` for a split that is not allowed.
    fn gain(self, parent: &Stats, l: &Stats, r: &Stats) -> Option<f64> {
        match self {
            Criterion::Class(_) => Some(
                self.weighted_impurity(parent) - self.weighted_impurity(l) - self.weighted_impurity(r),
            ),
            Criterion::FriedmanMse => {
                let diff = l[1] / l[0] - r[1] / r[0];
                Some(l[0] * r[0] / (l[0] + r[0]) * diff * diff)
            }
            Criterion::SecondOrder { min_child_weight, .. } => {
                // Child sums come from subtraction; a small slack keeps
                // exact-boundary children admissible despite rounding.
                let floor = min_child_weight - 1e-9 * parent[2].abs().max(1.0);
                if l[2] < floor || r[2] < floor {
                    return None;
                }
                let g = self.weighted_impurity(parent) - self.weighted_impurity(l) - self.weighted_impurity(r);
                (g > 0.0).then_some(g)
            }
        }
    }

    fn importance(self, parent: &Stats, l: &Stats, r: &Stats) -> f64 {
        self.weighted_impurity(parent) - self.weighted_impurity(l) - self.weighted_impurity(r)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "node", rename_all = "snake_case")]
pub enum Node {
    Leaf {
        value: f64,
    },
    Split {
        feature: usize,
        threshold: f64,
        left: Box<Node>,
        right: Box<Node>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tree {
    pub root: Node,
    /// Unnormalised impurity decrease per feature.
    pub importances: Vec<f64>,
}

impl Tree {
    pub fn predict_row(&self, row: &[f64]) -> f64 {
        let mut node = &self.root;
        loop {
            match node {
                Node::Leaf { value } => return *value,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => node = if row[*feature] <= *threshold { left } else { right },
            }
        }
    }

    pub fn depth(&self) -> usize {
        fn d(n: &Node) -> usize {
            match n {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => 1 + d(left).max(d(right)),
            }
        }
        d(&self.root)
    }

    pub fn n_leaves(&self) -> usize {
        fn c(n: &Node) -> usize {
            match n {
                Node::Leaf { .. } => 1,
                Node::Split { left, right, .. } => c(left) + c(right),
            }
        }
        c(&self.root)
    }

    /// Rewrites every leaf value with `f(samples reaching the leaf)`.
    pub fn relabel_leaves(&mut self, x: &Matrix, samples: &[usize], f: &dyn Fn(&[usize]) -> f64) {
        fn walk(n: &mut Node, x: &Matrix, samples: Vec<usize>, f: &dyn Fn(&[usize]) -> f64) {
            match n {
                Node::Leaf { value } => *value = f(&samples),
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    let (l, r): (Vec<usize>, Vec<usize>) =
                        samples.into_iter().partition(|&i| x.get(i, *feature) <= *threshold);
                    walk(left, x, l, f);
                    walk(right, x, r, f);
                }
            }
        }
        walk(&mut self.root, x, samples.to_vec(), f);
    }
}

#[derive(Debug, Clone, Copy)]
pub struct GrowParams {
    pub criterion: Criterion,
    pub max_depth: Option<usize>,
    /// Features examined per split; `None` means all, in index order.
    pub max_features: Option<usize>,
    pub min_samples_split: usize,
    pub min_samples_leaf: usize,
}

impl GrowParams {
    pub fn new(criterion: Criterion) -> Self {
        GrowParams {
            criterion,
            max_depth: None,
            max_features: None,
            min_samples_split: 2,
            min_samples_leaf: 1,
        }
    }
}

struct Grower<'a> {
    x: &'a Matrix,
    stats: &'a [Stats],
    params: GrowParams,
    rng: Option<&'a mut Rng>,
    leaf: &'a dyn Fn(&Stats) -> f64,
    importances: Vec<f64>,
    order: Vec<usize>,
    buf: Vec<(f64, usize)>,
}

struct Best {
    gain: f64,
    feature: usize,
    threshold: f64,
    left: Stats,
    right: Stats,
}

impl Grower<'_> {
    fn better(best: &Option<Best>, gain: f64, feature: usize, threshold: f64) -> bool {
        match best {
            None => true,
            Some(b) => {
                let tol = 1e-12 * b.gain.abs().max(1.0);
                gain > b.gain + tol
                    || ((gain - b.gain).abs() <= tol && (feature, threshold) < (b.feature, b.threshold))
            }
        }
    }

    fn find_split(&mut self, idx: &[usize], total: &Stats) -> Option<Best> {
        let m = self.x.cols();
        if let (Some(_), Some(rng)) = (self.params.max_features, self.rng.as_deref_mut()) {
            self.order.shuffle(rng);
        }
        let limit = self.params.max_features.unwrap_or(m).clamp(1, m);
        let min_leaf = self.params.min_samples_leaf;
        let crit = self.params.criterion;
        let mut best: Option<Best> = None;
        let mut visited = 0;
        for oi in 0..m {
            if visited == limit {
                break;
            }
            let f = self.order[oi];
            self.buf.clear();
            self.buf.extend(idx.iter().map(|&i| (self.x.get(i, f), i)));
            self.buf.sort_unstable_by(|a, b| a.0.total_cmp(&b.0));
            let n = self.buf.len();
            if self.buf[0].0 >= self.buf[n - 1].0 {
                continue;
            }
            visited += 1;
            let mut left = [0.0; 4];
            for pos in 0..n - 1 {
                add(&mut left, &self.stats[self.buf[pos].1]);
                let (a, b) = (self.buf[pos].0, self.buf[pos + 1].0);
                if a >= b || pos + 1 < min_leaf || n - pos - 1 < min_leaf {
                    continue;
                }
                let right = sub(total, &left);
                let Some(gain) = crit.gain(total, &left, &right) else {
                    continue;
                };
                let mut t = a + (b - a) / 2.0;
                if t >= b {
                    t = a;
                }
                if Self::better(&best, gain, f, t) {
                    best = Some(Best {
                        gain,
                        feature: f,
                        threshold: t,
                        left,
                        right,
                    });
                }
            }
        }
        best
    }

    fn grow(&mut self, idx: &mut [usize], depth: usize) -> Node {
        let mut total = [0.0; 4];
        for &i in idx.iter() {
            add(&mut total, &self.stats[i]);
        }
        let crit = self.params.criterion;
        let stop = idx.len() < self.params.min_samples_split
            || idx.len() < 2 * self.params.min_samples_leaf
            || self.params.max_depth.is_some_and(|d| depth >= d)
            || crit.is_pure(&total);
        if stop {
            return Node::Leaf {
                value: (self.leaf)(&total),
            };
        }
        let Some(best) = self.find_split(idx, &total) else {
            return Node::Leaf {
                value: (self.leaf)(&total),
            };
        };
        self.importances[best.feature] += crit.importance(&total, &best.left, &best.right);
        let mut nl = 0;
        for p in 0..idx.len() {
            if self.x.get(idx[p], best.feature) <= best.threshold {
                idx.swap(p, nl);
                nl += 1;
            }
        }
        let (l, r) = idx.split_at_mut(nl);
        let left = self.grow(l, depth + 1);
        let right = self.grow(r, depth + 1);
        Node::Split {
            feature: best.feature,
            threshold: best.threshold,
            left: Box::new(left),
            right: Box::new(right),
        }
    }
}

/// Grows a tree over `samples` (indices into `x` and `stats`). Leaves get
/// `leaf(summed stats)`. Among equal-gain splits the lowest feature index,
/// then the lowest threshold, wins.
pub fn grow(
    x: &Matrix,
    stats: &[Stats],
    samples: &[usize],
    params: GrowParams,
    rng: Option<&mut Rng>,
    leaf: &dyn Fn(&Stats) -> f64,
) -> Tree {
    let mut idx = samples.to_vec();
    let mut g = Grower {
        x,
        stats,
        params,
        rng,
        leaf,
        importances: vec![0.0; x.cols()],
        order: (0..x.cols()).collect(),
        buf: Vec::with_capacity(samples.len()),
    };
    let root = if idx.is_empty() {
        Node::Leaf { value: 0.0 }
    } else {
        g.grow(&mut idx, 0)
    };
    Tree {
        root,
        importances: g.importances,
    }
}

/// Classification stats from labels and sample weights; zero-weight rows
/// are left out of `samples`.
pub fn class_stats(y: &[u8], w: &[f64]) -> (Vec<Stats>, Vec<usize>) {
    let stats = y.iter().zip(w).map(|(&t, &wi)| [wi, wi * f64::from(t), 0.0, 0.0]).collect();
    let samples = (0..y.len()).filter(|&i| w[i] > 0.0).collect();
    (stats, samples)
}

/// Probability of class 1 at a classification leaf.
pub fn class_leaf(s: &Stats) -> f64 {
    if s[0] > 0.0 {
        (s[1] / s[0]).clamp(0.0, 1.0)
    } else {
        0.0
    }
}
