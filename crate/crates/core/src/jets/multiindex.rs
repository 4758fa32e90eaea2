use std::cmp::Ordering;
use std::fmt;

use smallvec::SmallVec;

/// A multi-index `α = (α₁, …, αₙ)` of nonnegative integers.
///
/// Ordering is graded lexicographic: first by total order `|α|`, then
/// lexicographically with larger leading entries first, so that in two
/// variables the first-order indices come out as `(1,0), (0,1)`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct MultiIndex(SmallVec<[u32; 4]>);

impl MultiIndex {
    pub fn new(entries: &[u32]) -> Self {
        MultiIndex(SmallVec::from_slice(entries))
    }

    pub fn zero(n: usize) -> Self {
        MultiIndex(SmallVec::from_elem(0, n))
    }

    /// The unit index `e_j` in `n` variables.
    pub fn unit(n: usize, j: usize) -> Self {
        let mut e = Self::zero(n);
        e.0[j] = 1;
        e
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn entries(&self) -> &[u32] {
        &self.0
    }

    /// Total order `|α|`.
    pub fn order(&self) -> usize {
        self.0.iter().map(|&a| a as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&a| a == 0)
    }

    /// Componentwise `self ≤ other`.
    pub fn le(&self, other: &MultiIndex) -> bool {
        self.0.iter().zip(other.0.iter()).all(|(a, b)| a <= b)
    }

    pub fn add(&self, other: &MultiIndex) -> MultiIndex {
        MultiIndex(self.0.iter().zip(other.0.iter()).map(|(a, b)| a + b).collect())
    }

    /// `self − other`, or `None` when some entry would go negative.
    pub fn checked_sub(&self, other: &MultiIndex) -> Option<MultiIndex> {
        let mut out = SmallVec::with_capacity(self.0.len());
        for (a, b) in self.0.iter().zip(other.0.iter()) {
            out.push(a.checked_sub(*b)?);
        }
        Some(MultiIndex(out))
    }

    /// `α! = Π αⱼ!` as an exact integer.
    pub fn factorial(&self) -> u64 {
        self.0.iter().map(|&a| factorial(a)).product()
    }

    /// `Π binom(αⱼ, βⱼ)` for `β ≤ α`.
    pub fn binomial(&self, beta: &MultiIndex) -> u64 {
        self.0
            .iter()
            .zip(beta.0.iter())
            .map(|(&a, &b)| binomial(a, b))
            .product()
    }

    /// `h^α = Π hⱼ^{αⱼ}`.
    pub fn monomial(&self, h: &[f64]) -> f64 {
        self.0
            .iter()
            .zip(h)
            .map(|(&a, &x)| x.powi(a as i32))
            .product()
    }

    /// Comma-joined key used by the JSON forms, e.g. `"1,0,2"`.
    pub fn key(&self) -> String {
        let parts: Vec<String> = self.0.iter().map(|a| a.to_string()).collect();
        parts.join(",")
    }

    pub fn parse_key(key: &str) -> Option<MultiIndex> {
        let mut trimmed = key.trim();
        if let Some(inner) = trimmed.strip_prefix('(').and_then(|k| k.strip_suffix(')')) {
            trimmed = inner.trim();
        }
        if trimmed.is_empty() {
            return None;
        }
        let entries: Option<SmallVec<[u32; 4]>> = trimmed
            .split(',')
            .map(|p| p.trim().parse::<u32>().ok())
            .collect();
        entries.map(MultiIndex)
    }
}

impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.order()
            .cmp(&other.order())
            .then_with(|| other.0.cmp(&self.0))
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.key())
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.key())
    }
}

pub fn factorial(k: u32) -> u64 {
    (1..=k as u64).product()
}

pub fn binomial(n: u32, k: u32) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k) as u64;
    let n = n as u64;
    (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}

/// All multi-indices in `n` variables with `|α| ≤ max_order`, in graded-lex order.
pub fn enumerate_multiindices(n: usize, max_order: usize) -> Vec<MultiIndex> {
    let mut out = Vec::new();
    for k in 0..=max_order {
        out.extend(multiindices_of_order(n, k));
    }
    out
}

/// All multi-indices in `n` variables with `|α| = k`, in graded-lex order.
pub fn multiindices_of_order(n: usize, k: usize) -> Vec<MultiIndex> {
    let mut out = Vec::new();
    let mut current = vec![0u32; n];
    fill(&mut current, 0, k as u32, &mut out);
    out
}

fn fill(current: &mut [u32], pos: usize, remaining: u32, out: &mut Vec<MultiIndex>) {
    let n = current.len();
    if n == 0 {
        if remaining == 0 {
            out.push(MultiIndex::new(&[]));
        }
        return;
    }
    if pos == n - 1 {
        current[pos] = remaining;
        out.push(MultiIndex::new(current));
        return;
    }
    for a in (0..=remaining).rev() {
        current[pos] = a;
        fill(current, pos + 1, remaining - a, out);
    }
    current[pos] = 0;
}

/// Number of monomials of degree at most `d` in `n` variables, `C(n+d, n)`.
pub fn monomial_count(n: usize, d: usize) -> usize {
    binomial((n + d) as u32, n as u32) as usize
}
