//! Brute-force reference implementations shared by the oracle and
//! acceptance suites. Each `check_*` runs a batch of random instances and
//! returns the number of instances compared, or a description of the first
//! disagreement.

#![allow(dead_code)]

use std::collections::BTreeSet;

use leakless::dataset::{Cell, ColumnSpec, Frame};
use leakless::evaluate::{auc, confusion, f1_macro, repeated_cv};
use leakless::feature_select::{assemble_sets, chi2_scores};
use leakless::models::tree::Node;
use leakless::models::{train, ClassCriterion, Fitted, ModelParams, ModelSpec};
use leakless::resample::lof_scores;
use leakless::transforms::{knn_impute_apply, knn_impute_fit};
use leakless::experiment::{build_sets, load, prepare, select, train_set, Loaded};
use leakless::Matrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type Check = Result<usize, String>;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn names(m: usize) -> Vec<String> {
    (0..m).map(|j| format!("x{j}")).collect()
}

/// Labels with both classes present.
pub fn labels(r: &mut ChaCha8Rng, n: usize) -> Vec<u8> {
    loop {
        let y: Vec<u8> = (0..n).map(|_| r.gen_range(0..2)).collect();
        if y.contains(&0) && y.contains(&1) {
            return y;
        }
    }
}

pub fn numeric_frame(x: &Matrix, y: &[u8]) -> Frame {
    let classes = vec!["neg".to_string(), "pos".to_string()];
    let yi: Vec<usize> = y.iter().map(|&t| t as usize).collect();
    Frame::from_matrix(&names(x.cols()), x, "class", &classes, &yi).unwrap()
}

// ---------------------------------------------------------------- metrics

fn pairwise_auc(y: &[u8], s: &[f64]) -> f64 {
    let (mut twice, mut pairs) = (0u64, 0u64);
    for i in 0..y.len() {
        for j in 0..y.len() {
            if y[i] == 1 && y[j] == 0 {
                pairs += 1;
                if s[i] > s[j] {
                    twice += 2;
                } else if s[i] == s[j] {
                    twice += 1;
                }
            }
        }
    }
    twice as f64 / 2.0 / pairs as f64
}

pub fn check_auc(cases: usize) -> Check {
    let mut r = rng(11);
    for case in 0..cases {
        let n = r.gen_range(2..=200);
        let y = labels(&mut r, n);
        // Coarse scores force plenty of ties.
        let levels = r.gen_range(1..=20);
        let s: Vec<f64> = (0..n).map(|_| f64::from(r.gen_range(0..levels)) / 7.0).collect();
        let got = auc(&y, &s).map_err(|e| e.to_string())?;
        let want = pairwise_auc(&y, &s);
        if got != want {
            return Err(format!("auc case {case}: {got} vs pairwise {want}"));
        }
    }
    Ok(cases)
}

/// Hand-computed contingency tables: (truth, prediction, tp, tn, fp, fn, macro F1).
pub const HAND_TABLES: &[(&[u8], &[u8], [usize; 4], f64)] = &[
    (&[1, 1, 0, 0], &[1, 0, 0, 1], [1, 1, 1, 1], 0.5),
    (&[1, 1, 0, 0], &[1, 1, 0, 0], [2, 2, 0, 0], 1.0),
    (&[1, 1, 1, 0], &[1, 1, 1, 1], [3, 0, 1, 0], 3.0 / 7.0),
    (&[1, 0, 1, 0, 1], &[0, 0, 1, 1, 1], [2, 1, 1, 1], 0.5833333333333333),
];

pub fn check_confusion() -> Check {
    for (t, p, [tp, tn, fp, fn_], f1) in HAND_TABLES {
        let c = confusion(t, p).map_err(|e| e.to_string())?;
        if [c.tp, c.tn, c.fp, c.fn_] != [*tp, *tn, *fp, *fn_] {
            return Err(format!("confusion of {t:?} / {p:?}: {c:?}"));
        }
        let got = f1_macro(t, p).map_err(|e| e.to_string())?;
        if (got - f1).abs() > 1e-12 {
            return Err(format!("macro F1 of {t:?} / {p:?}: {got} vs {f1}"));
        }
    }
    Ok(HAND_TABLES.len())
}

// ------------------------------------------------------------ imputation

fn random_masked_frame(r: &mut ChaCha8Rng, n: usize, m: usize, p_missing: f64) -> Frame {
    let mut schema: Vec<ColumnSpec> = names(m).into_iter().map(ColumnSpec::numeric).collect();
    schema.push(ColumnSpec::categorical("class", ["neg", "pos"]));
    let rows = (0..n)
        .map(|_| {
            let mut row: Vec<Cell> = (0..m)
                .map(|_| {
                    if r.gen_bool(p_missing) {
                        Cell::Missing
                    } else {
                        // A small grid gives many distance ties.
                        Cell::Num(f64::from(r.gen_range(0..6)) / 5.0)
                    }
                })
                .collect();
            row.push(Cell::Cat(if r.gen_bool(0.5) { "pos" } else { "neg" }.into()));
            row
        })
        .collect();
    Frame::from_cells(schema, "class", rows).unwrap()
}

fn brute_impute(train: &Frame, query: &Frame, k: usize) -> Vec<Vec<f64>> {
    let m = train.n_cols() - 1;
    let cell = |f: &Frame, i: usize, j: usize| f.value(i, j);
    let mut out = Vec::new();
    for q in 0..query.n_rows() {
        let mut row = Vec::with_capacity(m);
        for c in 0..m {
            if let Some(v) = cell(query, q, c) {
                row.push(v);
                continue;
            }
            let mut donors: Vec<(f64, usize)> = Vec::new();
            for t in 0..train.n_rows() {
                if cell(train, t, c).is_none() {
                    continue;
                }
                let mut shared = 0usize;
                let mut sum = 0.0;
                for j in 0..m {
                    if let (Some(a), Some(b)) = (cell(query, q, j), cell(train, t, j)) {
                        shared += 1;
                        sum += (a - b) * (a - b);
                    }
                }
                if shared > 0 {
                    donors.push(((m as f64 / shared as f64 * sum).sqrt(), t));
                }
            }
            let value = if donors.is_empty() {
                let obs: Vec<f64> = (0..train.n_rows()).filter_map(|t| cell(train, t, c)).collect();
                if obs.is_empty() {
                    0.0
                } else {
                    obs.iter().sum::<f64>() / obs.len() as f64
                }
            } else {
                donors.sort_by(|a, b| a.partial_cmp(b).unwrap());
                let take = k.min(donors.len());
                donors[..take].iter().map(|&(_, t)| cell(train, t, c).unwrap()).sum::<f64>() / take as f64
            };
            row.push(value);
        }
        out.push(row);
    }
    out
}

pub fn check_imputation(cases: usize) -> Check {
    let mut r = rng(12);
    for case in 0..cases {
        let n = r.gen_range(5..=50);
        let m = r.gen_range(1..=5);
        let p = r.gen_range(0.0..0.5);
        let train = random_masked_frame(&mut r, n, m, p);
        let rows = r.gen_range(1..=20);
        let query = random_masked_frame(&mut r, rows, m, p);
        let k = r.gen_range(1..=n.min(7));
        let model = knn_impute_fit(&train, k).map_err(|e| e.to_string())?;
        let got = knn_impute_apply(&query, &model).map_err(|e| e.to_string())?;
        let want = brute_impute(&train, &query, k);
        for (q, row) in want.iter().enumerate() {
            for (c, v) in row.iter().enumerate() {
                let g = got.value(q, c).ok_or_else(|| format!("imputation case {case}: cell ({q},{c}) still missing"))?;
                if g != *v {
                    return Err(format!("imputation case {case}: cell ({q},{c}) {g} vs brute force {v}"));
                }
            }
        }
    }
    Ok(cases)
}

// ------------------------------------------------------------------- LOF

/// Textbook local outlier factor with exactly `k` neighbours.
pub fn lof_formula(points: &[Vec<f64>], k: usize) -> Vec<f64> {
    let n = points.len();
    let dist = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(u, v)| (u - v) * (u - v)).sum::<f64>().sqrt();
    let neighbourhood: Vec<Vec<usize>> = (0..n)
        .map(|p| {
            let mut others: Vec<(f64, usize)> =
                (0..n).filter(|&o| o != p).map(|o| (dist(&points[p], &points[o]), o)).collect();
            others.sort_by(|a, b| a.partial_cmp(b).unwrap());
            others[..k].iter().map(|&(_, o)| o).collect()
        })
        .collect();
    let k_distance: Vec<f64> = (0..n)
        .map(|p| dist(&points[p], &points[*neighbourhood[p].last().unwrap()]))
        .collect();
    let lrd: Vec<f64> = (0..n)
        .map(|p| {
            let total: f64 = neighbourhood[p]
                .iter()
                .map(|&o| k_distance[o].max(dist(&points[p], &points[o])))
                .sum();
            k as f64 / total
        })
        .collect();
    (0..n)
        .map(|p| neighbourhood[p].iter().map(|&o| lrd[o] / lrd[p]).sum::<f64>() / k as f64)
        .collect()
}

pub fn check_lof(cases: usize) -> Check {
    let mut r = rng(13);
    for case in 0..cases {
        let n = r.gen_range(3..=100);
        let m = r.gen_range(1..=4);
        let k = r.gen_range(1..n.min(25));
        let mut points: Vec<Vec<f64>> = (0..n).map(|_| (0..m).map(|_| r.gen_range(-1.0..1.0)).collect()).collect();
        // A few far points so some factors are well above 1.
        for p in points.iter_mut().take(r.gen_range(0..3)) {
            p[0] += 10.0;
        }
        let got = lof_scores(&Matrix::from_rows(&points).unwrap(), k).map_err(|e| e.to_string())?;
        let want = lof_formula(&points, k);
        for (i, (g, w)) in got.iter().zip(&want).enumerate() {
            if (g - w).abs() > 1e-9 * w.abs().max(1.0) {
                return Err(format!("LOF case {case} row {i}: {g} vs formula {w}"));
            }
        }
    }
    Ok(cases)
}

// ------------------------------------------------------------------ trees

#[derive(Debug)]
enum OracleNode {
    Leaf(f64),
    Split(usize, f64, Box<OracleNode>, Box<OracleNode>),
}

fn gini_mass(pos: usize, n: usize) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let (p, q) = (pos as f64 / n as f64, (n - pos) as f64 / n as f64);
    n as f64 * (1.0 - p * p - q * q)
}

/// Full-depth Gini tree grown by exhaustive enumeration of every
/// (feature, midpoint threshold) pair; ties go to the lowest feature, then
/// the lowest threshold.
fn enumerate_tree(x: &[Vec<f64>], y: &[u8], rows: &[usize]) -> OracleNode {
    let n = rows.len();
    let pos = rows.iter().filter(|&&i| y[i] == 1).count();
    if n < 2 || pos == 0 || pos == n {
        return OracleNode::Leaf(pos as f64 / n as f64);
    }
    let parent = gini_mass(pos, n);
    let mut best: Option<(f64, usize, f64)> = None;
    for f in 0..x[0].len() {
        let mut values: Vec<f64> = rows.iter().map(|&i| x[i][f]).collect();
        values.sort_by(|a, b| a.partial_cmp(b).unwrap());
        values.dedup();
        for w in values.windows(2) {
            let t = (w[0] + w[1]) / 2.0;
            let left: Vec<usize> = rows.iter().copied().filter(|&i| x[i][f] <= t).collect();
            let lpos = left.iter().filter(|&&i| y[i] == 1).count();
            let gain = parent - gini_mass(lpos, left.len()) - gini_mass(pos - lpos, n - left.len());
            if best.map_or(true, |(g, _, _)| gain > g + 1e-9) {
                best = Some((gain, f, t));
            }
        }
    }
    match best {
        None => OracleNode::Leaf(pos as f64 / n as f64),
        Some((_, f, t)) => {
            let (l, r): (Vec<usize>, Vec<usize>) = rows.iter().partition(|&&i| x[i][f] <= t);
            OracleNode::Split(f, t, Box::new(enumerate_tree(x, y, &l)), Box::new(enumerate_tree(x, y, &r)))
        }
    }
}

fn same_tree(a: &Node, b: &OracleNode) -> bool {
    match (a, b) {
        (Node::Leaf { value }, OracleNode::Leaf(v)) => (value - v).abs() < 1e-12,
        (
            Node::Split {
                feature,
                threshold,
                left,
                right,
            },
            OracleNode::Split(f, t, l, r),
        ) => feature == f && (threshold - t).abs() < 1e-12 && same_tree(left, l) && same_tree(right, r),
        _ => false,
    }
}

pub fn check_tree_splits(cases: usize) -> Check {
    let mut r = rng(14);
    for case in 0..cases {
        let n = r.gen_range(2..=12);
        let m = r.gen_range(1..=3);
        let binary = case % 2 == 0;
        let x: Vec<Vec<f64>> = (0..n)
            .map(|_| {
                (0..m)
                    .map(|_| if binary { f64::from(r.gen_range(0..2)) } else { f64::from(r.gen_range(0..10)) / 4.0 })
                    .collect()
            })
            .collect();
        let y = labels(&mut r, n);
        let spec = ModelSpec {
            params: ModelParams::Dtree {
                criterion: ClassCriterion::Gini,
                max_depth: None,
            },
            seed: 0,
        };
        let model = train(&spec, &names(m), &Matrix::from_rows(&x).unwrap(), &y).map_err(|e| e.to_string())?;
        let Fitted::Dtree(tree) = &model.fitted else {
            return Err("decision tree spec produced another model".into());
        };
        let rows: Vec<usize> = (0..n).collect();
        let want = enumerate_tree(&x, &y, &rows);
        if !same_tree(&tree.root, &want) {
            return Err(format!("tree case {case}: {:?} vs enumeration {want:?}", tree.root));
        }
    }
    Ok(cases)
}

// ------------------------------------------------------------------- chi2

/// Statistic over the 2-cell table of feature mass per class against the
/// mass expected from the class row counts.
fn contingency_chi2(col: &[u32], y: &[u8]) -> f64 {
    let mut mass = [0u64; 2];
    let mut rows = [0u64; 2];
    for (&v, &t) in col.iter().zip(y) {
        mass[t as usize] += u64::from(v);
        rows[t as usize] += 1;
    }
    let n = (rows[0] + rows[1]) as f64;
    let total = (mass[0] + mass[1]) as f64;
    (0..2)
        .map(|c| {
            let expected = total * rows[c] as f64 / n;
            if expected == 0.0 {
                0.0
            } else {
                (mass[c] as f64 - expected).powi(2) / expected
            }
        })
        .sum()
}

pub fn check_chi2(cases: usize) -> Check {
    let mut r = rng(15);
    for case in 0..cases {
        let n = r.gen_range(2..=80);
        let m = r.gen_range(1..=6);
        let cols: Vec<Vec<u32>> = (0..m).map(|_| (0..n).map(|_| r.gen_range(0..5)).collect()).collect();
        let y = labels(&mut r, n);
        let x = Matrix::from_rows(
            &(0..n).map(|i| cols.iter().map(|c| f64::from(c[i])).collect::<Vec<_>>()).collect::<Vec<_>>(),
        )
        .unwrap();
        let got = chi2_scores(&names(m), &x, &y).map_err(|e| e.to_string())?;
        for (j, col) in cols.iter().enumerate() {
            let want = contingency_chi2(col, &y);
            let g = got.get(&format!("x{j}")).unwrap();
            if (g - want).abs() > 1e-9 * want.abs().max(1.0) {
                return Err(format!("chi2 case {case} column {j}: {g} vs contingency {want}"));
            }
        }
    }
    Ok(cases)
}

// ------------------------------------------------------------ set algebra

type Sets = [BTreeSet<String>; 8];

fn random_sets(r: &mut ChaCha8Rng) -> Sets {
    let universe = r.gen_range(0..=12);
    std::array::from_fn(|_| (0..universe).filter(|_| r.gen_bool(0.5)).map(|e| format!("f{e}")).collect())
}

/// Membership-wise evaluation: an element is in S_f when at least two of
/// the three wrappers pick it, and in F1 / F2 / F3 when at least one / two /
/// three of the groups (S_w, S_f, S_e) contain it and it is not in S_cor.
fn membership(s: &Sets, e: &str) -> [bool; 3] {
    let has = |k: usize| s[k].contains(e);
    let s_w = has(0) && has(1);
    let s_f = [has(2), has(3), has(4)].iter().filter(|&&b| b).count() >= 2;
    let s_e = has(5) && has(6);
    let votes = [s_w, s_f, s_e].iter().filter(|&&b| b).count();
    let keep = !has(7);
    [keep && votes >= 1, keep && votes >= 2, keep && votes == 3]
}

pub fn check_set_algebra(cases: usize) -> Check {
    let mut r = rng(16);
    for case in 0..cases {
        let s = random_sets(&mut r);
        let got = assemble_sets(
            s[0].clone(),
            s[1].clone(),
            s[2].clone(),
            s[3].clone(),
            s[4].clone(),
            s[5].clone(),
            s[6].clone(),
            s[7].clone(),
        );
        let all: BTreeSet<&String> = s.iter().flatten().collect();
        for e in all {
            let want = membership(&s, e);
            let have = [got.f1.contains(e), got.f2.contains(e), got.f3.contains(e)];
            if want != have {
                return Err(format!("set case {case}: element {e} membership {have:?} vs direct {want:?}"));
            }
        }
        for (name, set) in [("F1", &got.f1), ("F2", &got.f2), ("F3", &got.f3)] {
            if set.iter().any(|e| !s.iter().any(|x| x.contains(e))) {
                return Err(format!("set case {case}: {name} invents an element"));
            }
        }
    }
    Ok(cases)
}

// ------------------------------------------------------------- LOO folds

/// Leave-one-out accuracy of a `k`-nearest-neighbour vote computed directly.
fn loo_knn(x: &[Vec<f64>], y: &[u8], k: usize) -> f64 {
    let n = x.len();
    let mut correct = 0;
    for i in 0..n {
        let mut d: Vec<(f64, usize)> = (0..n)
            .filter(|&j| j != i)
            .map(|j| (x[i].iter().zip(&x[j]).map(|(a, b)| (a - b) * (a - b)).sum::<f64>(), j))
            .collect();
        d.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let ones = d[..k].iter().filter(|&&(_, j)| y[j] == 1).count();
        let pred = u8::from(ones as f64 / k as f64 >= 0.5);
        correct += usize::from(pred == y[i]);
    }
    correct as f64 / n as f64
}

pub fn check_loo(cases: usize) -> Check {
    let mut r = rng(17);
    for case in 0..cases {
        let n = r.gen_range(6..=30);
        let mut y = labels(&mut r, n);
        y[0] = 0;
        y[1] = 1;
        y[2] = 0;
        y[3] = 1;
        let x: Vec<Vec<f64>> =
            (0..n).map(|i| vec![f64::from(y[i]) + r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0)]).collect();
        let k = r.gen_range(1..=5).min(n - 2);
        let spec = ModelSpec {
            params: ModelParams::Knn { k },
            seed: 0,
        };
        let got = repeated_cv(&spec, &names(2), &Matrix::from_rows(&x).unwrap(), &y, n, 1, 5)
            .map_err(|e| e.to_string())?;
        let want = loo_knn(&x, &y, k);
        if got.accuracies.len() != n || (got.mean - want).abs() > 1e-12 {
            return Err(format!("LOO case {case}: {} vs direct {want}", got.mean));
        }
    }
    Ok(cases)
}

// ------------------------------------------------------------- experiment

pub fn dataset_path() -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/chronic_kidney_disease_full.arff")
}

/// Experiment config on the bundled dataset with the reduced-estimator
/// profile.
pub fn ci_config(seed: u64) -> leakless::experiment::ExperimentConfig {
    let mut cfg = leakless::experiment::ExperimentConfig::default().ci_profile();
    cfg.dataset = dataset_path();
    cfg.seed = seed;
    cfg
}

// ---------------------------------------------------------------- leakage

/// Copy of `frame` with one cell of row `row` replaced: a categorical cell
/// moves to another category, a numeric cell gets an arbitrary value, and
/// any feature cell may become missing.
fn mutate(frame: &Frame, row: usize, r: &mut impl Rng) -> Frame {
    let mut out = Frame::empty(frame.schema().to_vec(), frame.label()).unwrap();
    let col = r.gen_range(0..frame.n_cols());
    let spec = &frame.schema()[col];
    for i in 0..frame.n_rows() {
        let mut values = frame.row_values(i).to_vec();
        let mut mask = frame.row_mask(i).to_vec();
        if i == row {
            if col != frame.label_index() && !mask[col] && r.gen_bool(0.2) {
                mask[col] = true;
            } else if spec.is_categorical() {
                let k = spec.categories.len();
                values[col] = ((values[col] as usize + r.gen_range(1..k)) % k) as f64;
                mask[col] = false;
            } else {
                values[col] = r.gen_range(-1e4..1e4);
                mask[col] = false;
            }
        }
        out.push_raw(&values, &mask).unwrap();
    }
    out
}

/// Refits preparation, selection, set building and every model after each
/// of `trials` single-cell mutations of the test partition and compares the
/// fitted state with the unmutated run.
pub fn check_leakage(trials: usize) -> Check {
    let mut cfg = ci_config(42);
    cfg.selection.ensemble_size = 10;
    cfg.selection.importance_repeats = 2;
    cfg.model_ensemble_size = Some(10);

    let err = |e: leakless::Error| e.to_string();
    let base = load(&cfg).map_err(err)?;
    let resampled = prepare(&cfg, &base).map_err(err)?;
    let selection = select(&cfg, &resampled).map_err(err)?;
    let sets = build_sets(&cfg, &base, &resampled, &selection).map_err(err)?;
    let models = sets.iter().map(|s| train_set(&cfg, s)).collect::<Result<Vec<_>, _>>().map_err(err)?;

    let mut r = rng(99);
    for trial in 0..trials {
        let row = r.gen_range(0..base.split.test.n_rows());
        let mut loaded: Loaded = base.clone();
        loaded.split.test = mutate(&base.split.test, row, &mut r);
        if loaded.split.test == base.split.test {
            return Err(format!("trial {trial} did not mutate anything"));
        }

        let res2 = prepare(&cfg, &loaded).map_err(err)?;
        if res2.pipeline != resampled.pipeline || res2.frame != resampled.frame {
            return Err(format!("trial {trial}: preparation moved"));
        }
        let sel2 = select(&cfg, &res2).map_err(err)?;
        if sel2 != selection {
            return Err(format!("trial {trial}: selection moved"));
        }
        let sets2 = build_sets(&cfg, &loaded, &res2, &sel2).map_err(err)?;
        for (a, b) in sets.iter().zip(&sets2) {
            if a.pipeline != b.pipeline || a.train != b.train {
                return Err(format!("trial {trial}: {} set moved", a.id.name()));
            }
        }
        for (a, set) in models.iter().zip(&sets2) {
            let b = train_set(&cfg, set).map_err(err)?;
            if a != &b {
                return Err(format!("trial {trial}: {} models moved", set.id.name()));
            }
        }
    }
    Ok(trials)
}
