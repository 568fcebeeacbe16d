//! Computed metrics: subtopic coverage, sequence flow, judge-score
//! normalization, report aggregation, and Pearson correlation.

use std::collections::BTreeSet;

use super::EvalError;

/// Canonical form of a subtopic label: trimmed, internal whitespace collapsed
/// to single spaces, casefolded.
pub fn canonical_label(raw: &str) -> String {
    raw.split_whitespace()
        .collect::<Vec<_>>()
        .join(" ")
        .to_lowercase()
}

/// Intersection-over-union of two label sets. Two empty sets count as a
/// perfect match.
pub fn coverage_iou(a: &BTreeSet<String>, b: &BTreeSet<String>) -> f64 {
    let union = a.union(b).count();
    if union == 0 {
        return 1.0;
    }
    let inter = a.intersection(b).count();
    inter as f64 / union as f64
}

/// Unit-cost edit distance between two sequences, dynamic programming over a
/// single rolling row.
pub fn levenshtein<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    if a.is_empty() {
        return b.len();
    }
    if b.is_empty() {
        return a.len();
    }
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut cur = vec![0usize; b.len() + 1];
    for (i, ai) in a.iter().enumerate() {
        cur[0] = i + 1;
        for (j, bj) in b.iter().enumerate() {
            let sub = prev[j] + usize::from(ai != bj);
            cur[j + 1] = sub.min(prev[j + 1] + 1).min(cur[j] + 1);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

/// Normalized general Levenshtein distance: `2L / (|a| + |b| + L)` with unit
/// costs, defined as 0 for two empty sequences. Bounded in `[0, 1]` and a
/// proper metric on sequences.
pub fn ngld<T: PartialEq>(a: &[T], b: &[T]) -> f64 {
    if a.is_empty() && b.is_empty() {
        return 0.0;
    }
    let l = levenshtein(a, b) as f64;
    2.0 * l / (a.len() as f64 + b.len() as f64 + l)
}

/// Flow similarity on a 0-100 scale: `(1 - NGLD) * 100`.
pub fn flow_score<T: PartialEq>(gen: &[T], reference: &[T]) -> f64 {
    (1.0 - ngld(gen, reference)) * 100.0
}

/// Map a 1-5 judge score onto the 0-100 scale by `score * 20`.
///
/// Accepts fractional inputs so score means can be normalized the same way.
pub fn normalize_judge(score: f64) -> Result<f64, EvalError> {
    if !(1.0..=5.0).contains(&score) {
        return Err(EvalError::OutOfRange { score });
    }
    Ok(score * 20.0)
}

/// Arithmetic mean of exactly six normalized metric scores.
pub fn overall(scores: &[f64]) -> Result<f64, EvalError> {
    if scores.len() != 6 {
        return Err(EvalError::WrongArity {
            expected: 6,
            got: scores.len(),
        });
    }
    Ok(scores.iter().sum::<f64>() / 6.0)
}

/// Sample Pearson correlation coefficient.
pub fn pearson(xs: &[f64], ys: &[f64]) -> Result<f64, EvalError> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(EvalError::ArityMismatch {
            xs: xs.len(),
            ys: ys.len(),
        });
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(EvalError::ZeroVariance);
    }
    Ok(sxy / (sxx * syy).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn set(labels: &[&str]) -> BTreeSet<String> {
        labels.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn canonical_label_collapses() {
        assert_eq!(canonical_label("  Motivation "), "motivation");
        assert_eq!(canonical_label("Conclusion   and\tFuture Work"), "conclusion and future work");
    }

    #[test]
    fn iou_cases() {
        let a = set(&["intro", "method", "results", "conclusion"]);
        let b = set(&["intro", "results"]);
        assert_eq!(coverage_iou(&a, &b), 0.5);
        assert_eq!(coverage_iou(&a, &a), 1.0);
        assert_eq!(coverage_iou(&set(&["x"]), &set(&["y"])), 0.0);
        assert_eq!(coverage_iou(&BTreeSet::new(), &BTreeSet::new()), 1.0);
    }

    #[test]
    fn levenshtein_cases() {
        let x = ["a", "b", "c"];
        assert_eq!(levenshtein(&x, &x), 0);
        assert_eq!(levenshtein(&["a", "b", "c"], &["a", "c"]), 1);
        assert_eq!(levenshtein(&x, &[] as &[&str]), 3);
        assert_eq!(levenshtein(&[] as &[&str], &x), 3);
    }

    #[test]
    fn ngld_cases() {
        assert_eq!(ngld(&["a"], &["a"]), 0.0);
        assert_eq!(ngld(&["a"], &[] as &[&str]), 1.0);
        let d = ngld(&["a", "b", "c"], &["a", "c"]);
        assert!((d - 1.0 / 3.0).abs() < 1e-12, "{d}");
        assert_eq!(ngld::<u8>(&[], &[]), 0.0);
    }

    #[test]
    fn flow_cases() {
        assert_eq!(flow_score(&["a", "b"], &["a", "b"]), 100.0);
        assert_eq!(flow_score(&["a"], &[] as &[&str]), 0.0);
        let f = flow_score(&["a", "b", "c"], &["a", "c"]);
        assert!((f - 66.67).abs() < 0.01, "{f}");
    }

    #[test]
    fn normalize_endpoints_and_bounds() {
        assert_eq!(normalize_judge(5.0).unwrap(), 100.0);
        assert_eq!(normalize_judge(1.0).unwrap(), 20.0);
        assert!((normalize_judge(4.83).unwrap() - 96.6).abs() < 1e-9);
        assert!(normalize_judge(0.0).is_err());
        assert!(normalize_judge(5.5).is_err());
    }

    #[test]
    fn overall_reproduces_published_rows() {
        // Six-column rows with their published overall means.
        let rows: &[([f64; 6], f64)] = &[
            ([62.62, 56.84, 61.60, 80.80, 47.00, 68.32], 62.86),
            ([72.84, 59.58, 49.60, 22.40, 28.05, 60.20], 48.78),
            ([64.41, 54.24, 57.60, 97.20, 58.36, 71.96], 67.30),
            ([70.19, 62.16, 68.41, 92.80, 48.84, 72.84], 69.21),
            ([74.47, 66.65, 72.80, 98.00, 67.64, 75.24], 75.80),
        ];
        for (cols, published) in rows {
            let got = overall(cols).unwrap();
            assert!((got - published).abs() <= 0.005 + 1e-9, "{got} vs {published}");
        }
        assert!(matches!(overall(&[1.0; 5]), Err(EvalError::WrongArity { .. })));
    }

    #[test]
    fn pearson_cases() {
        let xs = [1.0, 2.0, 3.0];
        assert!((pearson(&xs, &xs).unwrap() - 1.0).abs() < 1e-12);
        let neg: Vec<f64> = xs.iter().map(|x| -x).collect();
        assert!((pearson(&xs, &neg).unwrap() + 1.0).abs() < 1e-12);
        let r = pearson(&[1.0, 2.0, 3.0], &[2.0, 4.0, 7.0]).unwrap();
        assert!((r - 0.9934).abs() < 0.0005, "{r}");
        assert!(matches!(pearson(&xs, &[1.0]), Err(EvalError::ArityMismatch { .. })));
        assert!(matches!(
            pearson(&[1.0, 1.0], &[1.0, 2.0]),
            Err(EvalError::ZeroVariance)
        ));
    }

    proptest! {
        #[test]
        fn iou_symmetric_and_bounded(a in proptest::collection::btree_set("[a-d]{1,3}", 0..6),
                                     b in proptest::collection::btree_set("[a-d]{1,3}", 0..6)) {
            let ab = coverage_iou(&a, &b);
            let ba = coverage_iou(&b, &a);
            prop_assert_eq!(ab, ba);
            prop_assert!((0.0..=1.0).contains(&ab));
            prop_assert_eq!(ab == 1.0, a == b);
        }

        #[test]
        fn ngld_is_a_metric(a in proptest::collection::vec(0u8..4, 0..8),
                            b in proptest::collection::vec(0u8..4, 0..8),
                            c in proptest::collection::vec(0u8..4, 0..8)) {
            let dab = ngld(&a, &b);
            let dba = ngld(&b, &a);
            prop_assert!((dab - dba).abs() < 1e-12);
            prop_assert!((0.0..=1.0).contains(&dab));
            prop_assert_eq!(dab == 0.0, a == b);
            let dac = ngld(&a, &c);
            let dcb = ngld(&c, &b);
            prop_assert!(dab <= dac + dcb + 1e-12);
        }
    }
}
