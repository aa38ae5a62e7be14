use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::simplicial::OrderedComplex;
use crate::QPoint;

/// Subset of points as a bit set.
pub type Mask = u64;

/// Default bound on the number of points, since a space on `n` points can
/// have up to `2^n` opens.
pub const DEFAULT_POINT_CAP: usize = 8;

const HARD_POINT_LIMIT: usize = 20;

/// How a subspace was certified contractible.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Certificate {
    /// A maximum in the specialization order; the subspace is its minimal open.
    HasTopPoint(usize),
    /// A point lying in every nonempty open of the subspace.
    HasBottomPoint(usize),
    Unknown,
}

/// A finite T0 space, stored through its full lattice of opens.
///
/// The specialization order is `x <= y` iff `U_x ⊆ U_y`, where `U_x` is the
/// smallest open containing `x`; opens are exactly the down-sets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteSpace {
    names: Vec<String>,
    opens: Vec<Mask>,
    minimal: Vec<Mask>,
}

fn bits(m: Mask) -> impl Iterator<Item = usize> {
    (0..64).filter(move |i| m >> i & 1 == 1)
}

impl FiniteSpace {
    pub fn from_basis(names: Vec<String>, basis: &[Mask]) -> Result<Self> {
        Self::from_basis_with_cap(names, basis, DEFAULT_POINT_CAP)
    }

    /// The topology generated by `basis`: closure under finite unions and
    /// intersections, with `∅` and `X` added.
    pub fn from_basis_with_cap(names: Vec<String>, basis: &[Mask], cap: usize) -> Result<Self> {
        let n = names.len();
        if n > cap.min(HARD_POINT_LIMIT) {
            return Err(Error::CapExceeded(format!(
                "{n} points exceeds the cap of {cap}"
            )));
        }
        let full: Mask = if n == 0 { 0 } else { (1 << n) - 1 };
        if let Some(b) = basis.iter().find(|b| **b & !full != 0) {
            return Err(Error::NotOpen(format!(
                "basis set {b:#b} is not a subset of the points"
            )));
        }
        // Minimal opens only depend on intersections of basis members.
        let minimal: Vec<Mask> = (0..n)
            .map(|x| {
                basis
                    .iter()
                    .filter(|b| *b >> x & 1 == 1)
                    .fold(full, |acc, b| acc & b)
            })
            .collect();
        let mut clashes = Vec::new();
        for x in 0..n {
            for y in x + 1..n {
                if minimal[x] == minimal[y] {
                    clashes.push((names[x].clone(), names[y].clone()));
                }
            }
        }
        if !clashes.is_empty() {
            return Err(Error::NotT0(clashes));
        }
        let opens = Self::down_sets(&minimal, full);
        Ok(FiniteSpace {
            names,
            opens,
            minimal,
        })
    }

    /// Opens as all unions of minimal opens, sorted by size then value.
    fn down_sets(minimal: &[Mask], full: Mask) -> Vec<Mask> {
        let mut set = BTreeSet::from([0, full]);
        let mut frontier: Vec<Mask> = vec![0];
        while let Some(m) = frontier.pop() {
            for &u in minimal {
                let next = m | u;
                if set.insert(next) {
                    frontier.push(next);
                }
            }
        }
        let mut opens: Vec<Mask> = set.into_iter().collect();
        opens.sort_by_key(|m| (m.count_ones(), *m));
        opens
    }

    /// Space whose opens are the down-sets of a partial order given by
    /// `leq[x][y] = x <= y` (reflexive, transitive, antisymmetric).
    pub fn from_poset(names: Vec<String>, leq: &[Vec<bool>]) -> Result<Self> {
        let n = names.len();
        let basis: Vec<Mask> = (0..n)
            .map(|x| (0..n).filter(|&y| leq[y][x]).fold(0, |m, y| m | 1 << y))
            .collect();
        Self::from_basis_with_cap(names, &basis, HARD_POINT_LIMIT)
    }

    pub fn discrete(n: usize) -> Self {
        let names = (0..n).map(|i| format!("p{i}")).collect();
        let basis: Vec<Mask> = (0..n).map(|i| 1 << i).collect();
        Self::from_basis_with_cap(names, &basis, HARD_POINT_LIMIT).expect("discrete space is T0")
    }

    /// Two points, `o` open and `c` closed.
    pub fn sierpinski() -> Self {
        Self::from_basis(vec!["o".into(), "c".into()], &[0b01]).expect("Sierpinski space is T0")
    }

    /// Four points `a, b` (open) and `c, d` (closed), each closed point
    /// lying over both open points: a finite model of the circle.
    pub fn pseudocircle() -> Self {
        let names = ["a", "b", "c", "d"].map(String::from).to_vec();
        Self::from_basis(names, &[0b0001, 0b0010, 0b0111, 0b1011]).expect("pseudocircle is T0")
    }

    /// The five point space with basis `{1,2,3,4}, {2,3,4,5}, {2,3}, {3,4}, {3}`.
    pub fn five_point() -> Self {
        crate::finite::io::parse_space(include_str!("../../data/five_point.space"))
            .expect("shipped fixture parses")
    }

    /// Disjoint union; names of the second summand get a `'` suffix on clash.
    pub fn disjoint_union(&self, other: &FiniteSpace) -> Result<Self> {
        let mut names = self.names.clone();
        for n in &other.names {
            let mut name = n.clone();
            while names.contains(&name) {
                name.push('\'');
            }
            names.push(name);
        }
        let shift = self.len();
        let mut basis = self.minimal.clone();
        basis.extend(other.minimal.iter().map(|m| m << shift));
        Self::from_basis_with_cap(names, &basis, HARD_POINT_LIMIT)
    }

    /// Random space on `n` points: a random partial order (edges `i < j`
    /// drawn with probability `density`, then transitively closed) with its
    /// down-sets as opens.
    pub fn random(n: usize, density: f64, seed: u64, cap: usize) -> Result<Self> {
        if n > cap {
            return Err(Error::CapExceeded(format!(
                "{n} points exceeds the cap of {cap}"
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut leq = vec![vec![false; n]; n];
        for (i, row) in leq.iter_mut().enumerate() {
            row[i] = true;
        }
        for (i, row) in leq.iter_mut().enumerate() {
            for cell in row.iter_mut().skip(i + 1) {
                if rng.gen_bool(density.clamp(0.0, 1.0)) {
                    *cell = true;
                }
            }
        }
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    if leq[i][k] && leq[k][j] {
                        leq[i][j] = true;
                    }
                }
            }
        }
        Self::from_poset((0..n).map(|i| format!("p{i}")).collect(), &leq)
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, x: usize) -> &str {
        &self.names[x]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn full(&self) -> Mask {
        if self.is_empty() {
            0
        } else {
            (1 << self.len()) - 1
        }
    }

    /// All opens, ordered by size then bit pattern.
    pub fn opens(&self) -> &[Mask] {
        &self.opens
    }

    pub fn is_open(&self, m: Mask) -> bool {
        self.opens
            .binary_search_by_key(&(m.count_ones(), m), |o| (o.count_ones(), *o))
            .is_ok()
    }

    /// Opens contained in `u`.
    pub fn opens_within(&self, u: Mask) -> Vec<Mask> {
        self.opens.iter().copied().filter(|o| o & !u == 0).collect()
    }

    pub fn minimal_open(&self, x: usize) -> Mask {
        self.minimal[x]
    }

    pub fn members(&self, m: Mask) -> Vec<usize> {
        bits(m).take_while(|&i| i < self.len()).collect()
    }

    /// Mask from point names.
    pub fn mask_of(&self, names: &[&str]) -> Result<Mask> {
        names.iter().try_fold(0, |m, n| {
            let i = self
                .index_of(n)
                .ok_or_else(|| Error::Precondition(format!("unknown point {n}")))?;
            Ok(m | 1 << i)
        })
    }

    pub fn format_mask(&self, m: Mask) -> String {
        let names: Vec<&str> = self.members(m).into_iter().map(|i| self.name(i)).collect();
        format!("{{{}}}", names.join(","))
    }

    /// Specialization order `x <= y` iff `U_x ⊆ U_y`.
    pub fn leq(&self, x: usize, y: usize) -> bool {
        self.minimal[x] & !self.minimal[y] == 0
    }

    pub fn lt(&self, x: usize, y: usize) -> bool {
        x != y && self.leq(x, y)
    }

    /// Strictly increasing chains `x_0 < ... < x_d` (nonempty), sorted by
    /// length then lexicographically.
    pub fn chains(&self) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        let mut stack: Vec<Vec<usize>> = (0..self.len()).map(|x| vec![x]).collect();
        while let Some(c) = stack.pop() {
            let last = *c.last().expect("chains are nonempty");
            for y in 0..self.len() {
                if self.lt(last, y) {
                    let mut d = c.clone();
                    d.push(y);
                    stack.push(d);
                }
            }
            out.push(c);
        }
        out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        out
    }

    /// Connected components of the subspace `m` via the comparability graph.
    pub fn components(&self, m: Mask) -> Vec<Mask> {
        let mut left = m;
        let mut out = Vec::new();
        while left != 0 {
            let start = left.trailing_zeros() as usize;
            let mut comp: Mask = 1 << start;
            let mut frontier = vec![start];
            while let Some(x) = frontier.pop() {
                for y in self.members(m) {
                    if comp >> y & 1 == 0 && (self.leq(x, y) || self.leq(y, x)) {
                        comp |= 1 << y;
                        frontier.push(y);
                    }
                }
            }
            out.push(comp);
            left &= !comp;
        }
        out
    }

    pub fn is_connected(&self, m: Mask) -> bool {
        m != 0 && self.components(m).len() == 1
    }

    /// Brute-force check: no partition of `m` into two nonempty parts that
    /// are both open in the subspace topology.
    pub fn is_connected_by_partition(&self, m: Mask) -> bool {
        if m == 0 {
            return false;
        }
        let rel: BTreeSet<Mask> = self.opens.iter().map(|o| o & m).collect();
        !rel.iter()
            .any(|&a| a != 0 && a != m && rel.contains(&(m & !a)))
    }

    /// Nonempty connected subsets of `u`, in increasing bit order.
    pub fn connected_subsets(&self, u: Mask) -> Vec<Mask> {
        let members = self.members(u);
        let mut out = Vec::new();
        for sel in 1u64..(1u64 << members.len()) {
            let m = bits(sel).fold(0, |acc, i| acc | 1 << members[i]);
            if self.is_connected(m) {
                out.push(m);
            }
        }
        out.sort();
        out
    }

    pub fn component_count(&self) -> usize {
        self.components(self.full()).len()
    }

    /// Agrees with [`Self::component_count`] on finite spaces.
    pub fn path_component_count(&self) -> usize {
        self.component_count()
    }

    pub fn contractibility_certificate(&self, u: Mask) -> Certificate {
        let pts = self.members(u);
        if let Some(&x) = pts.iter().find(|&&x| pts.iter().all(|&y| self.leq(y, x))) {
            return Certificate::HasTopPoint(x);
        }
        if let Some(&x) = pts.iter().find(|&&x| pts.iter().all(|&y| self.leq(x, y))) {
            return Certificate::HasBottomPoint(x);
        }
        Certificate::Unknown
    }

    /// Order complex: chains as faces, ordered upwards, with point `i` at the
    /// `i`-th basis vector.
    pub fn order_complex(&self) -> OrderedComplex {
        let n = self.len();
        let pts: Vec<QPoint> = (0..n).map(|i| Point::unit(n, i)).collect();
        let mut c = OrderedComplex::new();
        for (i, p) in pts.iter().enumerate() {
            let v = c.vertex(p);
            c.set_label(v, self.names[i].clone());
        }
        for chain in self.chains() {
            let s: Vec<QPoint> = chain.iter().map(|&i| pts[i].clone()).collect();
            c.add_simplex(&s)
                .expect("chains of distinct basis vectors are independent");
        }
        c
    }

    /// Whether `f` (point images in `target`) is continuous.
    pub fn is_continuous(&self, target: &FiniteSpace, f: &[usize]) -> bool {
        target
            .opens
            .iter()
            .all(|&o| self.is_open(self.preimage(f, o)))
    }

    pub fn preimage(&self, f: &[usize], m: Mask) -> Mask {
        (0..self.len())
            .filter(|&x| m >> f[x] & 1 == 1)
            .fold(0, |acc, x| acc | 1 << x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn five_point_minimal_opens() {
        let x = FiniteSpace::five_point();
        let u: Vec<String> = (0..5).map(|i| x.format_mask(x.minimal_open(i))).collect();
        assert_eq!(u, ["{1,2,3,4}", "{2,3}", "{3}", "{3,4}", "{2,3,4,5}"]);
        assert_eq!(
            x.contractibility_certificate(x.full()),
            Certificate::HasBottomPoint(2)
        );
        assert_eq!(x.component_count(), 1);
    }

    #[test]
    fn non_t0_rejected() {
        let r = FiniteSpace::from_basis(vec!["a".into(), "b".into()], &[0b11]);
        assert_eq!(r, Err(Error::NotT0(vec![("a".into(), "b".into())])));
    }

    #[test]
    fn connectivity_agrees_with_partition_test() {
        let x = FiniteSpace::five_point();
        for m in 1..=x.full() {
            assert_eq!(
                x.is_connected(m),
                x.is_connected_by_partition(m),
                "{}",
                x.format_mask(m)
            );
        }
        assert!(!x.is_connected(x.mask_of(&["1", "5"]).unwrap()));
        assert!(x.is_connected(x.mask_of(&["2", "3", "4"]).unwrap()));
    }

    #[test]
    fn order_complexes() {
        assert_eq!(FiniteSpace::sierpinski().order_complex().face_count(), 3);
        let pc = FiniteSpace::pseudocircle();
        assert_eq!(
            pc.contractibility_certificate(pc.full()),
            Certificate::Unknown
        );
        let h = pc
            .order_complex()
            .chain_complex()
            .cohomology(&crate::algebra::Coefficients::Integers, 1)
            .unwrap();
        assert_eq!(h.free_rank, 1);
    }

    #[test]
    fn random_is_deterministic() {
        let a = FiniteSpace::random(7, 0.4, 11, 8).unwrap();
        let b = FiniteSpace::random(7, 0.4, 11, 8).unwrap();
        assert_eq!(a, b);
        assert!(FiniteSpace::random(9, 0.4, 11, 8).is_err());
    }
}
