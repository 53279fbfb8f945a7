use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

pub type FeatureSet = BTreeSet<String>;

/// The constituent sets and the three hybrid subsets.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SelectionSets {
    pub chi2: FeatureSet,
    pub mi: FeatureSet,
    pub r_g: FeatureSet,
    pub r_r: FeatureSet,
    pub r_l: FeatureSet,
    pub rf: FeatureSet,
    pub dt: FeatureSet,
    pub s_w: FeatureSet,
    pub s_f: FeatureSet,
    pub s_e: FeatureSet,
    pub s_cor: FeatureSet,
    pub f1: FeatureSet,
    pub f2: FeatureSet,
    pub f3: FeatureSet,
}

fn and(a: &FeatureSet, b: &FeatureSet) -> FeatureSet {
    a.intersection(b).cloned().collect()
}

fn or(a: &FeatureSet, b: &FeatureSet) -> FeatureSet {
    a.union(b).cloned().collect()
}

fn minus(a: &FeatureSet, b: &FeatureSet) -> FeatureSet {
    a.difference(b).cloned().collect()
}

/// `S_w = Chi2 & MI`, `S_f` = features picked by at least two wrappers,
/// `S_e = RF & DT`; then
/// `F1 = (S_w | S_f | S_e) - S_cor`,
/// `F2 = ((S_w & S_f) | (S_w & S_e) | (S_f & S_e)) - S_cor`,
/// `F3 = (S_w & S_f & S_e) - S_cor`.
#[allow(clippy::too_many_arguments)]
pub fn assemble_sets(
    chi2: FeatureSet,
    mi: FeatureSet,
    r_g: FeatureSet,
    r_r: FeatureSet,
    r_l: FeatureSet,
    rf: FeatureSet,
    dt: FeatureSet,
    s_cor: FeatureSet,
) -> SelectionSets {
    let s_w = and(&chi2, &mi);
    let s_f = or(&or(&and(&r_g, &r_r), &and(&r_g, &r_l)), &and(&r_r, &r_l));
    let s_e = and(&rf, &dt);
    let f1 = minus(&or(&or(&s_w, &s_f), &s_e), &s_cor);
    let f2 = minus(&or(&or(&and(&s_w, &s_f), &and(&s_w, &s_e)), &and(&s_f, &s_e)), &s_cor);
    let f3 = minus(&and(&and(&s_w, &s_f), &s_e), &s_cor);
    SelectionSets {
        chi2,
        mi,
        r_g,
        r_r,
        r_l,
        rf,
        dt,
        s_w,
        s_f,
        s_e,
        s_cor,
        f1,
        f2,
        f3,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(items: &[&str]) -> FeatureSet {
        items.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn toy_example() {
        // S_w = {a,b,c}, S_f = {b,c,d}, S_e = {c,d,e}
        let s = assemble_sets(
            set(&["a", "b", "c"]),
            set(&["a", "b", "c"]),
            set(&["b", "c", "d"]),
            set(&["b", "c", "d"]),
            set(&[]),
            set(&["c", "d", "e"]),
            set(&["c", "d", "e"]),
            set(&["e"]),
        );
        assert_eq!(s.s_f, set(&["b", "c", "d"]));
        assert_eq!(s.f1, set(&["a", "b", "c", "d"]));
        assert_eq!(s.f2, set(&["b", "c", "d"]));
        assert_eq!(s.f3, set(&["c"]));
    }

    #[test]
    fn empty_inputs() {
        let e = FeatureSet::new;
        let s = assemble_sets(e(), e(), e(), e(), e(), e(), e(), e());
        assert!(s.f1.is_empty() && s.f2.is_empty() && s.f3.is_empty());
    }
}
