use std::collections::{BTreeSet, HashMap};

use approx::assert_relative_eq;
use proptest::prelude::*;
use seedbs::metrics::{count_error, hausdorff, homogeneity_completeness, mse, v_measure};

fn points(len: usize) -> impl Strategy<Value = Vec<usize>> {
    prop::collection::btree_set(1..len, 0..8).prop_map(|s| s.into_iter().collect())
}

fn setup() -> impl Strategy<Value = (usize, Vec<usize>, Vec<usize>, Vec<usize>)> {
    (3usize..300).prop_flat_map(|len| (Just(len), points(len), points(len), points(len)))
}

/// Segment label of every observation.
fn labels(cps: &[usize], len: usize) -> Vec<usize> {
    (0..len).map(|t| cps.partition_point(|&p| p <= t)).collect()
}

/// V-measure from two label vectors through an explicit contingency table.
fn v_from_labels(classes: &[usize], clusters: &[usize]) -> f64 {
    let n = classes.len() as f64;
    let mut joint: HashMap<(usize, usize), f64> = HashMap::new();
    let mut a: HashMap<usize, f64> = HashMap::new();
    let mut b: HashMap<usize, f64> = HashMap::new();
    for (&c, &k) in classes.iter().zip(clusters) {
        *joint.entry((c, k)).or_default() += 1.0;
        *a.entry(c).or_default() += 1.0;
        *b.entry(k).or_default() += 1.0;
    }
    let ent =
        |m: &HashMap<usize, f64>| -> f64 { m.values().map(|&c| -(c / n) * (c / n).ln()).sum() };
    let h_c = ent(&a);
    let h_k = ent(&b);
    let h_c_k: f64 = joint
        .iter()
        .map(|(&(_, k), &v)| -(v / n) * (v / b[&k]).ln())
        .sum();
    let h_k_c: f64 = joint
        .iter()
        .map(|(&(c, _), &v)| -(v / n) * (v / a[&c]).ln())
        .sum();
    let h = if h_c == 0.0 { 1.0 } else { 1.0 - h_c_k / h_c };
    let comp = if h_k == 0.0 { 1.0 } else { 1.0 - h_k_c / h_k };
    if h + comp == 0.0 {
        0.0
    } else {
        2.0 * h * comp / (h + comp)
    }
}

proptest! {
    #[test]
    fn hausdorff_is_a_metric((len, a, b, c) in setup()) {
        let d = |x: &[usize], y: &[usize]| hausdorff(x, y, len);
        prop_assert_eq!(d(&a, &b), d(&b, &a));
        prop_assert!(d(&a, &c) <= d(&a, &b) + d(&b, &c));
        prop_assert_eq!(d(&a, &a), 0.0);
        if a != b {
            prop_assert!(d(&a, &b) > 0.0);
        }
    }

    #[test]
    fn hausdorff_matches_brute_force((len, a, b, _c) in setup()) {
        let aug = |x: &[usize]| -> BTreeSet<usize> { x.iter().copied().chain([0, len]).collect() };
        let (sa, sb) = (aug(&a), aug(&b));
        let dir = |x: &BTreeSet<usize>, y: &BTreeSet<usize>| {
            x.iter().map(|&p| y.iter().map(|&q| p.abs_diff(q)).min().unwrap()).max().unwrap()
        };
        prop_assert_eq!(hausdorff(&a, &b, len), dir(&sa, &sb).max(dir(&sb, &sa)) as f64);
    }

    #[test]
    fn v_measure_matches_relabelled_contingency((len, est, truth, _c) in setup(), salt in 1usize..1000) {
        let v = v_measure(&est, &truth, len);
        prop_assert!((0.0..=1.0).contains(&v));
        // Arbitrary injective relabelling of both partitions.
        let relabel = |l: Vec<usize>| -> Vec<usize> { l.into_iter().map(|k| k * 7919 + salt).collect() };
        let classes = relabel(labels(&truth, len));
        let clusters = relabel(labels(&est, len));
        prop_assert!((v - v_from_labels(&classes, &clusters)).abs() < 1e-9);
    }

    #[test]
    fn refinement_never_lowers_homogeneity((len, est, truth, _c) in setup(), extra in 1usize..1000) {
        let p = 1 + extra % (len - 1);
        let mut finer = est.clone();
        if let Err(i) = finer.binary_search(&p) {
            finer.insert(i, p);
        }
        let (h0, _) = homogeneity_completeness(&est, &truth, len);
        let (h1, _) = homogeneity_completeness(&finer, &truth, len);
        prop_assert!(h1 >= h0 - 1e-12, "{} < {}", h1, h0);
    }

    #[test]
    fn mse_zero_iff_exact_fit((len, est, truth, _c) in setup(), levels in prop::collection::vec(-5i32..5, 9)) {
        let f: Vec<f64> = labels(&truth, len).into_iter().map(|k| levels[k] as f64).collect();
        let e = mse(&est, &f, &f).unwrap();
        prop_assert!(e >= 0.0);
        // Exact iff every estimated segment is constant in the truth.
        let constant = labels(&est, len)
            .windows(2)
            .zip(f.windows(2))
            .all(|(l, v)| l[0] != l[1] || v[0] == v[1]);
        prop_assert_eq!(e < 1e-12, constant);
    }

    #[test]
    fn count_error_is_difference(a in prop::collection::vec(0usize..100, 0..20), b in prop::collection::vec(0usize..100, 0..20)) {
        prop_assert_eq!(count_error(&a, &b), b.len() as i64 - a.len() as i64);
    }
}

#[test]
fn v_measure_reference_value() {
    assert_relative_eq!(v_measure(&[3, 5], &[5], 10), 0.8047, epsilon = 1e-4);
}
