use rand::Rng as _;
use serde::{Deserialize, Serialize};

use super::nearest;
use crate::dataset::Frame;
use crate::error::{Error, Result};
use crate::seed;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SmoteConfig {
    pub k: usize,
    /// Minority count to reach; `None` means the majority count.
    #[serde(default)]
    pub target: Option<usize>,
    pub seed: u64,
}

impl Default for SmoteConfig {
    fn default() -> Self {
        SmoteConfig {
            k: 5,
            target: None,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SmoteOutcome {
    pub frame: Frame,
    pub minority_class: String,
    /// Neighbour count actually used (reduced when the minority is small).
    pub k_used: usize,
    pub synthetic: usize,
}

pub fn smote(train: &Frame, cfg: &SmoteConfig) -> Result<Frame> {
    smote_detailed(train, cfg).map(|o| o.frame)
}

/// Appends `target - minority` synthetic minority rows after the original
/// rows. Synthetic row `j` draws its base row, neighbour and gap from its own
/// stream derived from `(seed, j)`.
pub fn smote_detailed(train: &Frame, cfg: &SmoteConfig) -> Result<SmoteOutcome> {
    if cfg.k < 1 {
        return Err(Error::argument("SMOTE needs k >= 1"));
    }
    let classes = train.class_indices();
    let mut counts = vec![0usize; train.classes().len()];
    for &c in &classes {
        counts[c] += 1;
    }
    let present: Vec<usize> = (0..counts.len()).filter(|&c| counts[c] > 0).collect();
    if present.len() != 2 {
        return Err(Error::argument(format!(
            "SMOTE needs exactly two classes with rows, found {}",
            present.len()
        )));
    }
    let (minority, majority) = if counts[present[0]] <= counts[present[1]] {
        (present[0], present[1])
    } else {
        (present[1], present[0])
    };
    let target = cfg.target.unwrap_or(counts[majority]);
    if target < counts[minority] {
        return Err(Error::argument(format!(
            "SMOTE target {target} is below the minority count {}",
            counts[minority]
        )));
    }
    let minority_class = train.classes()[minority].clone();
    let synthetic = target - counts[minority];
    let mut k = cfg.k;
    if synthetic > 0 && counts[minority] <= k {
        if counts[minority] < 2 {
            return Err(Error::argument("SMOTE needs at least two minority rows"));
        }
        k = counts[minority] - 1;
        log::warn!("minority class has {} rows; SMOTE k reduced from {} to {k}", counts[minority], cfg.k);
    }
    let mut out = train.clone();
    if synthetic == 0 {
        return Ok(SmoteOutcome {
            frame: out,
            minority_class,
            k_used: k,
            synthetic,
        });
    }

    let x = train.feature_matrix()?;
    let members: Vec<usize> = (0..classes.len()).filter(|&i| classes[i] == minority).collect();
    let neighbours: Vec<Vec<usize>> = members
        .iter()
        .map(|&i| nearest(&x, i, &members, k).into_iter().map(|(_, j)| j).collect())
        .collect();
    let features = train.feature_indices();
    let label = train.label_index();
    let mut values = vec![0.0; train.n_cols()];
    let mask = vec![false; train.n_cols()];
    values[label] = minority as f64;
    for j in 0..synthetic {
        let mut rng = seed::derived_rng(cfg.seed, "smote", j as u64);
        let base = rng.gen_range(0..members.len());
        let nb = neighbours[base][rng.gen_range(0..k)];
        let gap: f64 = rng.gen();
        let (a, b) = (x.row(members[base]), x.row(nb));
        for (c, &col) in features.iter().enumerate() {
            values[col] = a[c] + gap * (b[c] - a[c]);
        }
        out.push_raw(&values, &mask)?;
    }
    Ok(SmoteOutcome {
        frame: out,
        minority_class,
        k_used: k,
        synthetic,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Matrix;

    fn frame(rows: &[[f64; 2]], y: &[usize]) -> Frame {
        let names = vec!["a".to_string(), "b".to_string()];
        let classes = vec!["ckd".to_string(), "notckd".to_string()];
        Frame::from_matrix(&names, &Matrix::from_rows(rows).unwrap(), "class", &classes, y).unwrap()
    }

    #[test]
    fn synthetic_rows_lie_on_the_segment() {
        let f = frame(&[[0.0, 0.0], [1.0, 1.0], [5.0, 5.0], [6.0, 5.0], [7.0, 5.0], [8.0, 5.0]], &[0, 0, 1, 1, 1, 1]);
        let out = smote(&f, &SmoteConfig { k: 5, target: None, seed: 3 }).unwrap();
        assert_eq!(out.class_counts()["ckd"], 4);
        assert_eq!(out.select_rows(&[0, 1, 2, 3, 4, 5]), f);
        for i in 6..8 {
            let (u, v) = (out.value(i, 0).unwrap(), out.value(i, 1).unwrap());
            assert!((0.0..=1.0).contains(&u) && u == v);
            assert_eq!(out.category(i, 2), Some("ckd"));
        }
    }

    #[test]
    fn balanced_input_is_unchanged() {
        let f = frame(&[[0.0, 0.0], [1.0, 1.0]], &[0, 1]);
        assert_eq!(smote(&f, &SmoteConfig::default()).unwrap(), f);
    }

    #[test]
    fn single_class_is_rejected() {
        let f = frame(&[[0.0, 0.0], [1.0, 1.0]], &[1, 1]);
        assert!(matches!(smote(&f, &SmoteConfig::default()), Err(Error::Argument(_))));
    }

    #[test]
    fn same_seed_same_rows() {
        let rows: Vec<[f64; 2]> = (0..20).map(|i| [i as f64, (i * i) as f64 / 10.0]).collect();
        let y: Vec<usize> = (0..20).map(|i| usize::from(i % 3 != 0)).collect();
        let f = frame(&rows, &y);
        let cfg = SmoteConfig { k: 5, target: None, seed: 11 };
        let a = smote_detailed(&f, &cfg).unwrap();
        assert_eq!(a.frame, smote(&f, &cfg).unwrap());
        assert_eq!(a.synthetic, 6);
        assert_eq!(a.k_used, 5);
        let other = smote(&f, &SmoteConfig { seed: 12, ..cfg }).unwrap();
        assert_ne!(a.frame, other);
    }
}
