//! Interval specialist bases over a spine of `n` positions.
//!
//! A specialist `(l, r, y)` predicts `y` on positions `l..=r` and abstains
//! elsewhere. Positions are 0-based.
//!
//! * [`BasisKind::Full`] holds every interval, `n² + n` specialists.
//! * [`BasisKind::BinaryTree`] holds the intervals of a balanced binary
//!   splitting of `[0, n)`: a node `[p, q]` with `p < q` has children
//!   `[p, m]` and `[m + 1, q]` where `m = (p + q) / 2`. The tree has `2n - 1`
//!   nodes, so the basis has `4n - 2` specialists.
//!
//! Dense indices put the label bit lowest (`-1 -> 0`, `+1 -> 1`). Full
//! intervals are ranked lexicographically by `(l, r)`; tree nodes are
//! numbered in depth-first preorder, so the root is 0, a left child is its
//! parent plus one and a right child is its parent plus `2 * len(left)`.
//! Both numberings list the active set of a position in ascending order.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::graph::Labeling;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BasisError {
    #[error("basis size must be at least 1")]
    Empty,
    #[error("position {position} out of range for n = {n}")]
    PositionOutOfRange { position: usize, n: usize },
    #[error("index {index} out of range for basis of size {size}")]
    IndexOutOfRange { index: usize, size: usize },
    #[error("specialist {0} is not in the basis")]
    NotInBasis(Specialist),
    #[error("comparator is not well formed: {0}")]
    Malformed(String),
    #[error("comparators belong to different bases")]
    Mismatch,
    #[error("labelings have lengths {0} and {1}")]
    LengthMismatch(usize, usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Specialist {
    pub l: usize,
    pub r: usize,
    pub y: i8,
}

impl Specialist {
    pub fn new(l: usize, r: usize, y: i8) -> Self {
        debug_assert!(l <= r && (y == 1 || y == -1));
        Specialist { l, r, y }
    }

    pub fn is_awake(&self, position: usize) -> bool {
        self.l <= position && position <= self.r
    }

    pub fn len(&self) -> usize {
        self.r - self.l + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

impl fmt::Display for Specialist {
    /// Displays with 1-based positions.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.l + 1, self.r + 1, if self.y > 0 { "+" } else { "-" })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BasisKind {
    Full,
    BinaryTree,
}

impl BasisKind {
    pub fn name(self) -> &'static str {
        match self {
            BasisKind::Full => "full",
            BasisKind::BinaryTree => "btree",
        }
    }
}

impl std::str::FromStr for BasisKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "full" | "f" | "fn" => Ok(BasisKind::Full),
            "btree" | "binary-tree" | "b" | "bn" => Ok(BasisKind::BinaryTree),
            other => Err(format!("unknown basis `{other}` (expected full or btree)")),
        }
    }
}

pub fn basis_size(kind: BasisKind, n: usize) -> usize {
    match kind {
        BasisKind::Full => n * n + n,
        BasisKind::BinaryTree => 4 * n - 2,
    }
}

fn label_bit(y: i8) -> usize {
    usize::from(y > 0)
}

fn bit_label(bit: usize) -> i8 {
    if bit == 1 {
        1
    } else {
        -1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Basis {
    kind: BasisKind,
    n: usize,
}

impl Basis {
    pub fn new(kind: BasisKind, n: usize) -> Result<Self, BasisError> {
        if n == 0 {
            return Err(BasisError::Empty);
        }
        Ok(Basis { kind, n })
    }

    pub fn kind(&self) -> BasisKind {
        self.kind
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn size(&self) -> usize {
        basis_size(self.kind, self.n)
    }

    /// Number of intervals starting strictly before `l` in the full basis.
    fn full_offset(&self, l: usize) -> usize {
        l * self.n - l * l.saturating_sub(1) / 2
    }

    pub fn index_of(&self, s: &Specialist) -> Result<usize, BasisError> {
        if s.l > s.r || s.r >= self.n || (s.y != 1 && s.y != -1) {
            return Err(BasisError::NotInBasis(*s));
        }
        let node = match self.kind {
            BasisKind::Full => self.full_offset(s.l) + (s.r - s.l),
            BasisKind::BinaryTree => {
                let (mut id, mut p, mut q) = (0, 0, self.n - 1);
                loop {
                    if (p, q) == (s.l, s.r) {
                        break id;
                    }
                    if p == q {
                        return Err(BasisError::NotInBasis(*s));
                    }
                    let m = (p + q) / 2;
                    if s.r <= m {
                        id += 1;
                        q = m;
                    } else if s.l > m {
                        id += 2 * (m - p + 1);
                        p = m + 1;
                    } else {
                        return Err(BasisError::NotInBasis(*s));
                    }
                }
            }
        };
        Ok(2 * node + label_bit(s.y))
    }

    pub fn specialist(&self, index: usize) -> Result<Specialist, BasisError> {
        if index >= self.size() {
            return Err(BasisError::IndexOutOfRange { index, size: self.size() });
        }
        let (node, y) = (index / 2, bit_label(index % 2));
        let (l, r) = match self.kind {
            BasisKind::Full => {
                // Largest l with offset(l) <= node; offsets are increasing.
                let (mut lo, mut hi) = (0, self.n - 1);
                while lo < hi {
                    let mid = (lo + hi).div_ceil(2);
                    if self.full_offset(mid) <= node {
                        lo = mid;
                    } else {
                        hi = mid - 1;
                    }
                }
                (lo, lo + node - self.full_offset(lo))
            }
            BasisKind::BinaryTree => {
                let (mut id, mut p, mut q) = (0, 0, self.n - 1);
                while id != node {
                    let m = (p + q) / 2;
                    let right = id + 2 * (m - p + 1);
                    if node < right {
                        id += 1;
                        q = m;
                    } else {
                        id = right;
                        p = m + 1;
                    }
                }
                (p, q)
            }
        };
        Ok(Specialist::new(l, r, y))
    }

    pub fn check_position(&self, position: usize) -> Result<(), BasisError> {
        if position >= self.n {
            return Err(BasisError::PositionOutOfRange { position, n: self.n });
        }
        Ok(())
    }

    /// Dense indices of the specialists awake at `position`, ascending.
    pub fn active_indices(&self, position: usize) -> Result<ActiveIndices, BasisError> {
        self.check_position(position)?;
        let state = match self.kind {
            BasisKind::Full => ActiveState::Full { l: 0, r: position, base: self.full_offset(0) + position },
            BasisKind::BinaryTree => ActiveState::Tree { id: 0, p: 0, q: self.n - 1 },
        };
        Ok(ActiveIndices { n: self.n, position, state, pending: None })
    }

    pub fn active_set(&self, position: usize) -> Result<impl Iterator<Item = Specialist> + '_, BasisError> {
        Ok(self
            .active_indices(position)?
            .map(move |i| self.specialist(i).expect("active index is in range")))
    }

    /// Size of the active set at `position` without enumerating it.
    pub fn active_count(&self, position: usize) -> Result<usize, BasisError> {
        self.check_position(position)?;
        Ok(match self.kind {
            BasisKind::Full => 2 * (position + 1) * (self.n - position),
            BasisKind::BinaryTree => 2 * (tree_depth_of(self.n, position) + 1),
        })
    }
}

/// Depth of the leaf holding `position` in the binary splitting of `[0, n)`.
fn tree_depth_of(n: usize, position: usize) -> usize {
    let (mut p, mut q, mut depth) = (0, n - 1, 0);
    while p < q {
        let m = (p + q) / 2;
        if position <= m {
            q = m;
        } else {
            p = m + 1;
        }
        depth += 1;
    }
    depth
}

#[derive(Debug, Clone)]
enum ActiveState {
    Full { l: usize, r: usize, base: usize },
    Tree { id: usize, p: usize, q: usize },
    Finished,
}

/// Lazy iterator over active specialist indices; see [`Basis::active_indices`].
#[derive(Debug, Clone)]
pub struct ActiveIndices {
    n: usize,
    position: usize,
    state: ActiveState,
    pending: Option<usize>,
}

impl Iterator for ActiveIndices {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        if let Some(i) = self.pending.take() {
            return Some(i);
        }
        let node = match &mut self.state {
            ActiveState::Finished => return None,
            ActiveState::Full { l, r, base } => {
                let node = *base;
                if *r + 1 < self.n {
                    *r += 1;
                    *base += 1;
                } else if *l < self.position {
                    // Skip intervals (l + 1, l + 1 ..= position - 1).
                    *l += 1;
                    *r = self.position;
                    *base = *l * self.n - *l * (*l - 1) / 2 + (self.position - *l);
                } else {
                    self.state = ActiveState::Finished;
                }
                node
            }
            ActiveState::Tree { id, p, q } => {
                let node = *id;
                if *p == *q {
                    self.state = ActiveState::Finished;
                } else {
                    let m = (*p + *q) / 2;
                    if self.position <= m {
                        *id += 1;
                        *q = m;
                    } else {
                        *id += 2 * (m - *p + 1);
                        *p = m + 1;
                    }
                }
                node
            }
        };
        self.pending = Some(2 * node + 1);
        Some(2 * node)
    }
}

/// A well-formed comparator: specialists that disjointly cover every
/// position, each carrying mass `1 / |support|`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Comparator {
    basis: Basis,
    support: Vec<Specialist>,
}

impl Comparator {
    pub fn new(basis: Basis, mut support: Vec<Specialist>) -> Result<Self, BasisError> {
        support.sort_unstable();
        let mut next = 0;
        for s in &support {
            basis.index_of(s)?;
            if s.l != next {
                return Err(BasisError::Malformed(format!("position {} covered {}", next + 1, if s.l < next { "twice" } else { "zero times" })));
            }
            next = s.r + 1;
        }
        if next != basis.n() {
            return Err(BasisError::Malformed(format!("positions {}..={} uncovered", next + 1, basis.n())));
        }
        Ok(Comparator { basis, support })
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    /// Supported specialists ordered by position.
    pub fn support(&self) -> &[Specialist] {
        &self.support
    }

    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    pub fn mass(&self) -> f64 {
        1.0 / self.support.len() as f64
    }

    /// The labeling (by spine position) this comparator predicts.
    pub fn labeling(&self) -> Labeling {
        let mut labels = vec![0i8; self.basis.n()];
        for s in &self.support {
            labels[s.l..=s.r].fill(s.y);
        }
        Labeling::new(labels).expect("cover assigns every position")
    }

    pub fn is_consistent_with(&self, u: &Labeling) -> bool {
        self.labeling() == *u
    }
}

/// Maximal runs of equal labels, as `(start, end, label)`.
pub fn segments(u: &Labeling) -> Vec<(usize, usize, i8)> {
    let mut out = Vec::new();
    let mut start = 0;
    for p in 1..=u.len() {
        if p == u.len() || u[p] != u[start] {
            out.push((start, p - 1, u[start]));
            start = p;
        }
    }
    out
}

/// The minimal-consistent full-basis comparator: one specialist per run.
pub fn min_cover_full(u: &Labeling) -> Result<Comparator, BasisError> {
    let basis = Basis::new(BasisKind::Full, u.len())?;
    let support = segments(u).into_iter().map(|(l, r, y)| Specialist::new(l, r, y)).collect();
    Comparator::new(basis, support)
}

/// Canonical decomposition of each run into binary-tree intervals.
pub fn cover_btree(u: &Labeling) -> Result<Comparator, BasisError> {
    let basis = Basis::new(BasisKind::BinaryTree, u.len())?;
    let mut support = Vec::new();
    for (a, b, y) in segments(u) {
        decompose(0, u.len() - 1, a, b, y, &mut support);
    }
    Comparator::new(basis, support)
}

fn decompose(p: usize, q: usize, a: usize, b: usize, y: i8, out: &mut Vec<Specialist>) {
    if b < p || q < a {
        return;
    }
    if a <= p && q <= b {
        out.push(Specialist::new(p, q, y));
        return;
    }
    let m = (p + q) / 2;
    decompose(p, m, a, b, y, out);
    decompose(m + 1, q, a, b, y, out);
}

/// Hamming-like divergence between two labelings indexed by spine position:
/// the number of spine edges that are cut in either labeling and have an
/// endpoint whose label changed.
pub fn hamming_divergence(u: &Labeling, v: &Labeling) -> Result<usize, BasisError> {
    if u.len() != v.len() {
        return Err(BasisError::LengthMismatch(u.len(), v.len()));
    }
    Ok((1..u.len())
        .filter(|&j| {
            let i = j - 1;
            let cut = u[i] != u[j] || v[i] != v[j];
            let changed = u[i] != v[i] || u[j] != v[j];
            cut && changed
        })
        .count())
}

/// Number of specialists supported by `next` but not by `prev`.
pub fn j_divergence(prev: &Comparator, next: &Comparator) -> Result<usize, BasisError> {
    if prev.basis != next.basis {
        return Err(BasisError::Mismatch);
    }
    let old: BTreeSet<&Specialist> = prev.support.iter().collect();
    Ok(next.support.iter().filter(|s| !old.contains(s)).count())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lab(v: &[i8]) -> Labeling {
        Labeling::new(v.to_vec()).unwrap()
    }

    fn intervals(basis: &Basis, v: usize) -> Vec<(usize, usize, i8)> {
        basis.active_set(v).unwrap().map(|s| (s.l + 1, s.r + 1, s.y)).collect()
    }

    #[test]
    fn sizes() {
        assert_eq!(basis_size(BasisKind::Full, 4), 20);
        assert_eq!(basis_size(BasisKind::BinaryTree, 4), 14);
        assert_eq!(basis_size(BasisKind::BinaryTree, 1), 2);
    }

    #[test]
    fn btree_active_set_n8_v3() {
        let b = Basis::new(BasisKind::BinaryTree, 8).unwrap();
        let expected: Vec<_> = [(1, 8), (1, 4), (3, 4), (3, 3)]
            .into_iter()
            .flat_map(|(l, r)| [(l, r, -1), (l, r, 1)])
            .collect();
        assert_eq!(intervals(&b, 2), expected);
    }

    #[test]
    fn full_active_sets() {
        let b = Basis::new(BasisKind::Full, 3).unwrap();
        let expected: Vec<_> = [(1, 2), (1, 3), (2, 2), (2, 3)]
            .into_iter()
            .flat_map(|(l, r)| [(l, r, -1), (l, r, 1)])
            .collect();
        assert_eq!(intervals(&b, 1), expected);
        assert_eq!(Basis::new(BasisKind::Full, 1).unwrap().active_set(0).unwrap().count(), 2);
    }

    #[test]
    fn indices_are_a_bijection_and_active_sets_ascend() {
        for kind in [BasisKind::Full, BasisKind::BinaryTree] {
            for n in 1..=13 {
                let b = Basis::new(kind, n).unwrap();
                for i in 0..b.size() {
                    let s = b.specialist(i).unwrap();
                    assert_eq!(b.index_of(&s).unwrap(), i, "{kind:?} n={n} i={i}");
                }
                for v in 0..n {
                    let act: Vec<usize> = b.active_indices(v).unwrap().collect();
                    assert!(act.windows(2).all(|w| w[0] < w[1]));
                    assert_eq!(act.len(), b.active_count(v).unwrap());
                    let brute: Vec<usize> = (0..b.size()).filter(|&i| b.specialist(i).unwrap().is_awake(v)).collect();
                    assert_eq!(act, brute, "{kind:?} n={n} v={v}");
                }
            }
        }
    }

    #[test]
    fn btree_active_size_for_powers_of_two() {
        for r in 0..8 {
            let n = 1usize << r;
            let b = Basis::new(BasisKind::BinaryTree, n).unwrap();
            for v in 0..n {
                assert_eq!(b.active_indices(v).unwrap().count(), 2 * (r + 1));
            }
        }
    }

    #[test]
    fn out_of_range_position() {
        let b = Basis::new(BasisKind::Full, 3).unwrap();
        assert!(matches!(b.active_indices(3), Err(BasisError::PositionOutOfRange { .. })));
        assert!(Basis::new(BasisKind::BinaryTree, 8)
            .unwrap()
            .index_of(&Specialist::new(1, 2, 1))
            .is_err());
    }

    #[test]
    fn full_covers() {
        let c = min_cover_full(&lab(&[1, 1, -1, -1])).unwrap();
        assert_eq!(c.support(), &[Specialist::new(0, 1, 1), Specialist::new(2, 3, -1)]);
        assert_eq!(c.mass(), 0.5);
        assert_eq!(min_cover_full(&Labeling::constant(5, -1)).unwrap().len(), 1);
        assert_eq!(min_cover_full(&lab(&[1, -1, 1, -1])).unwrap().len(), 4);
    }

    #[test]
    fn btree_cover_of_inner_segment() {
        let u = lab(&[-1, 1, 1, 1, 1, 1, 1, -1]);
        let c = cover_btree(&u).unwrap();
        let plus: Vec<_> = c.support().iter().filter(|s| s.y == 1).map(|s| (s.l + 1, s.r + 1)).collect();
        assert_eq!(plus, vec![(2, 2), (3, 4), (5, 6), (7, 7)]);
        assert!(c.is_consistent_with(&u));
        assert_eq!(cover_btree(&Labeling::constant(16, 1)).unwrap().len(), 1);
    }

    #[test]
    fn hamming_examples() {
        let u = lab(&[1, 1, 1, 1]);
        assert_eq!(hamming_divergence(&u, &u).unwrap(), 0);
        assert_eq!(hamming_divergence(&u, &lab(&[1, 1, -1, 1])).unwrap(), 2);
        assert_eq!(hamming_divergence(&lab(&[1, -1]), &lab(&[-1, 1])).unwrap(), 1);
    }

    #[test]
    fn j_examples() {
        let a = min_cover_full(&lab(&[1, 1, 1, 1])).unwrap();
        let b = min_cover_full(&lab(&[1, 1, -1, -1])).unwrap();
        assert_eq!(j_divergence(&a, &a).unwrap(), 0);
        assert_eq!(j_divergence(&a, &b).unwrap(), 2);
        let t = cover_btree(&lab(&[1, 1, -1, -1])).unwrap();
        assert_eq!(j_divergence(&a, &t), Err(BasisError::Mismatch));
    }

    #[test]
    fn malformed_comparators_rejected() {
        let b = Basis::new(BasisKind::Full, 4).unwrap();
        assert!(Comparator::new(b, vec![Specialist::new(0, 1, 1), Specialist::new(1, 3, 1)]).is_err());
        assert!(Comparator::new(b, vec![Specialist::new(0, 1, 1)]).is_err());
    }
}
