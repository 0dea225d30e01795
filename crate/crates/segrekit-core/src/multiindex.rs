//! Multi-indices of monomials, ordered by total degree then lexicographically.
//!
//! The graded ordering is what makes truncation-aware arithmetic cheap: maps
//! keyed by [`MultiIndex`] iterate lowest degree first, so "lowest offending
//! monomial" reports and early exits in products fall out of the key order.

use num_bigint::BigInt;
use num_traits::One;
use std::cmp::Ordering;
use std::fmt;

/// Exponent vector of a monomial in a fixed number of variables.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct MultiIndex {
    exps: Vec<u16>,
}

impl MultiIndex {
    pub fn new(exps: Vec<u16>) -> Self {
        MultiIndex { exps }
    }

    pub fn zero(arity: usize) -> Self {
        MultiIndex { exps: vec![0; arity] }
    }

    /// The multi-index of the single variable `var`.
    pub fn unit(arity: usize, var: usize) -> Self {
        assert!(var < arity, "variable index {} out of range {}", var, arity);
        let mut exps = vec![0; arity];
        exps[var] = 1;
        MultiIndex { exps }
    }

    pub fn arity(&self) -> usize {
        self.exps.len()
    }

    pub fn degree(&self) -> u32 {
        self.exps.iter().map(|&e| e as u32).sum()
    }

    pub fn get(&self, i: usize) -> u16 {
        self.exps[i]
    }

    pub fn exps(&self) -> &[u16] {
        &self.exps
    }

    pub fn is_zero(&self) -> bool {
        self.exps.iter().all(|&e| e == 0)
    }

    pub fn add(&self, other: &MultiIndex) -> MultiIndex {
        assert_eq!(self.arity(), other.arity(), "arity mismatch in multi-index add");
        MultiIndex {
            exps: self
                .exps
                .iter()
                .zip(&other.exps)
                .map(|(a, b)| a.checked_add(*b).expect("multi-index exponent overflow"))
                .collect(),
        }
    }

    /// Decrement the exponent of `var`; `None` if it is already zero.
    pub fn step_down(&self, var: usize) -> Option<MultiIndex> {
        if self.exps[var] == 0 {
            return None;
        }
        let mut exps = self.exps.clone();
        exps[var] -= 1;
        Some(MultiIndex { exps })
    }

    /// Total degree contributed by the variable block `range`.
    pub fn block_degree(&self, range: std::ops::Range<usize>) -> u32 {
        self.exps[range].iter().map(|&e| e as u32).sum()
    }

    /// `α! = α_1! · α_2! · ...` as an exact integer.
    pub fn factorial(&self) -> BigInt {
        let mut out = BigInt::one();
        for &e in &self.exps {
            for k in 2..=(e as u64) {
                out *= BigInt::from(k);
            }
        }
        out
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for MultiIndex {
    /// Graded lexicographic: lower total degree first, then lex on exponents.
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.exps.cmp(&other.exps))
    }
}

impl fmt::Debug for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.exps)
    }
}

/// All multi-indices of the given arity with total degree exactly `deg`,
/// in lexicographic order.
pub fn monomials_of_degree(arity: usize, deg: u32) -> Vec<MultiIndex> {
    let mut out = Vec::new();
    let mut current = vec![0u16; arity];
    fill(&mut out, &mut current, 0, deg);
    fn fill(out: &mut Vec<MultiIndex>, current: &mut Vec<u16>, pos: usize, remaining: u32) {
        if pos + 1 == current.len() {
            current[pos] = remaining as u16;
            out.push(MultiIndex::new(current.clone()));
            current[pos] = 0;
            return;
        }
        for e in (0..=remaining).rev() {
            current[pos] = e as u16;
            fill(out, current, pos + 1, remaining - e);
        }
        current[pos] = 0;
    }
    if arity == 0 {
        if deg == 0 {
            return vec![MultiIndex::new(vec![])];
        }
        return vec![];
    }
    out
}

/// All multi-indices of total degree `lo..=hi`, graded then lex.
pub fn monomials_in_range(arity: usize, lo: u32, hi: u32) -> Vec<MultiIndex> {
    let mut out = Vec::new();
    for d in lo..=hi {
        out.extend(monomials_of_degree(arity, d));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn graded_order() {
        let a = MultiIndex::new(vec![0, 2]);
        let b = MultiIndex::new(vec![1, 0]);
        let c = MultiIndex::new(vec![1, 1]);
        assert!(b < a, "degree dominates");
        assert!(a < c);
        assert!(MultiIndex::zero(2) < b);
    }

    #[test]
    fn enumeration_counts() {
        // C(deg + arity - 1, arity - 1) monomials of a fixed degree.
        assert_eq!(monomials_of_degree(3, 4).len(), 15);
        assert_eq!(monomials_of_degree(1, 7).len(), 1);
        assert_eq!(monomials_in_range(2, 0, 3).len(), 1 + 2 + 3 + 4);
    }

    #[test]
    fn factorial_values() {
        assert_eq!(MultiIndex::new(vec![3, 0, 2]).factorial(), BigInt::from(12));
        assert_eq!(MultiIndex::zero(4).factorial(), BigInt::one());
    }

    #[test]
    fn step_down_and_add() {
        let m = MultiIndex::new(vec![2, 1]);
        assert_eq!(m.step_down(1).unwrap(), MultiIndex::new(vec![2, 0]));
        assert_eq!(m.step_down(1).unwrap().step_down(1), None);
        assert_eq!(
            m.add(&MultiIndex::unit(2, 0)),
            MultiIndex::new(vec![3, 1])
        );
    }
}
