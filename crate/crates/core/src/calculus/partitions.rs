use crate::jets::{enumerate_multiindices, MultiIndex};

/// A multiset of nonzero multi-indices summing to some `α`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Partition {
    /// Members in descending graded-lex order.
    pub parts: Vec<MultiIndex>,
    /// Number of set partitions of the `|α|` labelled derivative slots that
    /// collapse to this multiset: `α! / (Π_i β_i! · Π_β k_β!)`, where `k_β`
    /// counts repeated members.
    pub multiplicity: u64,
}

#[derive(Clone, Debug)]
pub struct PartitionSet {
    pub alpha: MultiIndex,
    pub partitions: Vec<Partition>,
}

/// All multiset partitions of `α` into nonzero multi-indices, each once.
///
/// Members are generated in non-increasing graded-lex order, which makes
/// every multiset appear exactly once. `α = 0` has no partitions.
pub fn enumerate_partitions(alpha: &MultiIndex) -> PartitionSet {
    let mut partitions = Vec::new();
    if !alpha.is_zero() {
        let candidates: Vec<MultiIndex> = enumerate_multiindices(alpha.dim(), alpha.order())
            .into_iter()
            .filter(|b| !b.is_zero() && b.le(alpha))
            .collect();
        let mut current = Vec::new();
        recurse(alpha, &candidates, candidates.len(), &mut current, &mut partitions);
    }
    PartitionSet {
        alpha: alpha.clone(),
        partitions,
    }
}

fn recurse(
    remaining: &MultiIndex,
    candidates: &[MultiIndex],
    limit: usize,
    current: &mut Vec<MultiIndex>,
    out: &mut Vec<Partition>,
) {
    if remaining.is_zero() {
        out.push(Partition {
            parts: current.clone(),
            multiplicity: multiplicity(current),
        });
        return;
    }
    // candidates are ascending; walk down from the largest allowed member
    for idx in (0..limit).rev() {
        let beta = &candidates[idx];
        if let Some(rest) = remaining.checked_sub(beta) {
            current.push(beta.clone());
            recurse(&rest, candidates, idx + 1, current, out);
            current.pop();
        }
    }
}

fn multiplicity(parts: &[MultiIndex]) -> u64 {
    let total = parts
        .iter()
        .skip(1)
        .fold(parts[0].clone(), |acc, b| acc.add(b));
    let mut denom: u64 = parts.iter().map(|b| b.factorial()).product();
    let mut run = 1u64;
    for w in parts.windows(2) {
        if w[0] == w[1] {
            run += 1;
            denom *= run;
        } else {
            run = 1;
        }
    }
    total.factorial() / denom
}

#[cfg(test)]
mod tests {
    use super::*;

    fn idx(v: &[u32]) -> MultiIndex {
        MultiIndex::new(v)
    }

    #[test]
    fn small_cases() {
        let p1 = enumerate_partitions(&idx(&[1]));
        assert_eq!(p1.partitions.len(), 1);
        let p2 = enumerate_partitions(&idx(&[2]));
        let parts: Vec<Vec<MultiIndex>> = p2.partitions.iter().map(|p| p.parts.clone()).collect();
        assert_eq!(parts, vec![vec![idx(&[2])], vec![idx(&[1]), idx(&[1])]]);
        let p11 = enumerate_partitions(&idx(&[1, 1]));
        let parts: Vec<Vec<MultiIndex>> = p11.partitions.iter().map(|p| p.parts.clone()).collect();
        assert_eq!(parts, vec![vec![idx(&[1, 1])], vec![idx(&[0, 1]), idx(&[1, 0])]]);
        assert!(enumerate_partitions(&idx(&[0, 0])).partitions.is_empty());
    }

    #[test]
    fn integer_partition_counts() {
        let expected = [1, 1, 2, 3, 5, 7, 11, 15, 22];
        for (k, &p) in expected.iter().enumerate().skip(1) {
            assert_eq!(enumerate_partitions(&idx(&[k as u32])).partitions.len(), p, "k={k}");
        }
    }

    #[test]
    fn multiplicities_count_set_partitions() {
        // Σ multiplicities over all multiset partitions of α is the Bell number B(|α|).
        let bell = [1u64, 1, 2, 5, 15, 52, 203];
        for alpha in [idx(&[3]), idx(&[2, 1]), idx(&[1, 1, 1]), idx(&[2, 2]), idx(&[3, 1, 2])] {
            let total: u64 = enumerate_partitions(&alpha)
                .partitions
                .iter()
                .map(|p| p.multiplicity)
                .sum();
            assert_eq!(total, bell[alpha.order()], "{alpha}");
        }
        let three = enumerate_partitions(&idx(&[3]));
        let m: Vec<u64> = three.partitions.iter().map(|p| p.multiplicity).collect();
        assert_eq!(m, vec![1, 3, 1]);
    }
}
