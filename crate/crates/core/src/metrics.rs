//! Partition agreement: classification error rate and confusion matrices.

use crate::error::{Error, Result};
use crate::types::Partition;

fn pairs(n: u64) -> u64 {
    n * n.saturating_sub(1) / 2
}

fn contingency(a: &Partition, b: &Partition) -> Result<Vec<Vec<u64>>> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            expected: a.len(),
            got: b.len(),
        });
    }
    let mut table = vec![vec![0u64; b.k()]; a.k()];
    for (&la, &lb) in a.labels().iter().zip(b.labels()) {
        table[la][lb] += 1;
    }
    Ok(table)
}

/// Classification error rate: the fraction of unordered observation pairs on
/// which the two partitions disagree about co-membership (one minus the Rand
/// index). Computed from the contingency table in `O(N + K1 K2)`.
pub fn cer(a: &Partition, b: &Partition) -> Result<f64> {
    let table = contingency(a, b)?;
    let n = a.len() as u64;
    if n < 2 {
        return Ok(0.0);
    }
    let same_a: u64 = table.iter().map(|r| pairs(r.iter().sum())).sum();
    let same_b: u64 = (0..b.k())
        .map(|c| pairs(table.iter().map(|r| r[c]).sum()))
        .sum();
    let same_both: u64 = table.iter().flatten().map(|&x| pairs(x)).sum();
    let disagree = same_a + same_b - 2 * same_both;
    Ok(disagree as f64 / pairs(n) as f64)
}

/// Counts of (true label, estimated label) pairs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfusionMatrix {
    /// `counts[a][b]`: observations with true label `row_labels[a]` and
    /// estimated label `col_labels[b]`.
    pub counts: Vec<Vec<u64>>,
    pub row_labels: Vec<usize>,
    pub col_labels: Vec<usize>,
}

impl ConfusionMatrix {
    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    /// Reorders the estimated-cluster columns so that large counts sit on the
    /// diagonal: the largest remaining cell claims its column for its row,
    /// repeatedly. Unmatched columns keep their relative order at the end.
    pub fn matched(&self) -> ConfusionMatrix {
        let rows = self.counts.len();
        let cols = self.col_labels.len();
        let mut row_of_col: Vec<Option<usize>> = vec![None; cols];
        let mut row_done = vec![false; rows];
        for _ in 0..rows.min(cols) {
            let mut best: Option<(u64, usize, usize)> = None;
            for r in (0..rows).filter(|&r| !row_done[r]) {
                for c in (0..cols).filter(|&c| row_of_col[c].is_none()) {
                    let v = self.counts[r][c];
                    if best.is_none_or(|(bv, _, _)| v > bv) {
                        best = Some((v, r, c));
                    }
                }
            }
            let (_, r, c) = best.expect("non-empty table");
            row_of_col[c] = Some(r);
            row_done[r] = true;
        }
        let mut order: Vec<usize> = Vec::with_capacity(cols);
        for r in 0..rows {
            if let Some(c) = row_of_col.iter().position(|&x| x == Some(r)) {
                order.push(c);
            }
        }
        order.extend((0..cols).filter(|&c| row_of_col[c].is_none()));
        ConfusionMatrix {
            counts: self
                .counts
                .iter()
                .map(|row| order.iter().map(|&c| row[c]).collect())
                .collect(),
            row_labels: self.row_labels.clone(),
            col_labels: order.iter().map(|&c| self.col_labels[c]).collect(),
        }
    }

    /// Sum of entries off the main diagonal.
    pub fn off_diagonal(&self) -> u64 {
        self.counts
            .iter()
            .enumerate()
            .flat_map(|(r, row)| row.iter().enumerate().filter(move |(c, _)| *c != r))
            .map(|(_, &v)| v)
            .sum()
    }
}

pub fn confusion(truth: &Partition, est: &Partition) -> Result<ConfusionMatrix> {
    Ok(ConfusionMatrix {
        counts: contingency(truth, est)?,
        row_labels: (0..truth.k()).collect(),
        col_labels: (0..est.k()).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn part(labels: &[usize]) -> Partition {
        Partition::from_labels(labels.to_vec()).unwrap()
    }

    /// Direct enumeration of all unordered pairs.
    fn cer_pairs(a: &[usize], b: &[usize]) -> f64 {
        let n = a.len();
        let mut dis = 0u64;
        let mut tot = 0u64;
        for i in 0..n {
            for j in i + 1..n {
                tot += 1;
                if (a[i] == a[j]) != (b[i] == b[j]) {
                    dis += 1;
                }
            }
        }
        if tot == 0 {
            0.0
        } else {
            dis as f64 / tot as f64
        }
    }

    #[test]
    fn identical_partitions() {
        let p = part(&[0, 0, 1, 2, 2]);
        assert_eq!(cer(&p, &p).unwrap(), 0.0);
    }

    #[test]
    fn crossed_pairs() {
        let a = part(&[0, 0, 1, 1]);
        let b = part(&[0, 1, 0, 1]);
        assert_eq!(cer_pairs(a.labels(), b.labels()), 4.0 / 6.0);
        assert_eq!(cer(&a, &b).unwrap(), 2.0 / 3.0);
    }

    #[test]
    fn relabeling_is_free() {
        let a = part(&[0, 0, 1, 1, 2]);
        let b = part(&[2, 2, 0, 0, 1]);
        assert_eq!(cer(&a, &b).unwrap(), 0.0);
    }

    #[test]
    fn length_mismatch() {
        assert!(matches!(
            cer(&part(&[0, 1]), &part(&[0, 1, 1])),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn perfect_confusion() {
        let truth: Vec<usize> = (0..200).map(|i| i / 100).collect();
        let est: Vec<usize> = truth.iter().map(|l| 1 - l).collect();
        let m = confusion(&part(&truth), &part(&est)).unwrap();
        assert_eq!(m.counts, vec![vec![0, 100], vec![100, 0]]);
        let mm = m.matched();
        assert_eq!(mm.counts, vec![vec![100, 0], vec![0, 100]]);
        assert_eq!(mm.col_labels, vec![1, 0]);
        assert_eq!(mm.off_diagonal(), 0);
        assert_eq!(mm.total(), 200);
    }

    #[test]
    fn matching_with_errors() {
        // 100 true-1 all in est-1; 95 of true-2 in est-0, 5 in est-1
        let mut truth = vec![0; 100];
        truth.extend(vec![1; 100]);
        let mut est = vec![1; 100];
        est.extend(vec![1; 5]);
        est.extend(vec![0; 95]);
        let m = confusion(&part(&truth), &part(&est)).unwrap().matched();
        assert_eq!(m.counts, vec![vec![100, 0], vec![5, 95]]);
        assert_eq!(m.off_diagonal(), 5);
    }

    #[test]
    fn unequal_cluster_counts() {
        let truth = part(&[0, 0, 0, 1, 1, 1]);
        let est = part(&[2, 2, 0, 1, 1, 1]);
        let m = confusion(&truth, &est).unwrap().matched();
        assert_eq!(m.counts, vec![vec![2, 0, 1], vec![0, 3, 0]]);
        assert_eq!(m.col_labels, vec![2, 1, 0]);
    }

    proptest! {
        #[test]
        fn fast_cer_matches_pair_loop(
            a in prop::collection::vec(0usize..4, 1..50),
            seed in prop::collection::vec(0usize..4, 50),
        ) {
            let b: Vec<usize> = seed[..a.len()].to_vec();
            let compact = |v: &[usize]| {
                let mut s = v.to_vec();
                s.sort();
                s.dedup();
                v.iter().map(|x| s.binary_search(x).unwrap()).collect::<Vec<_>>()
            };
            let (a, b) = (compact(&a), compact(&b));
            let pa = part(&a);
            let pb = part(&b);
            let fast = cer(&pa, &pb).unwrap();
            prop_assert_eq!(fast, cer_pairs(&a, &b));
            prop_assert_eq!(fast, cer(&pb, &pa).unwrap());
            prop_assert!((0.0..=1.0).contains(&fast));
        }
    }
}
