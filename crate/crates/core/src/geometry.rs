//! Exact affine geometry over an ordered field.
//!
//! All distances are squared so that comparisons stay in the field.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::scalar::Scalar;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Point<S>(pub Vec<S>);

impl<S: Scalar> Point<S> {
    pub fn origin(dim: usize) -> Self {
        Point(vec![S::zero(); dim])
    }

    /// `i`-th standard basis vector of `S^dim`.
    pub fn unit(dim: usize, i: usize) -> Self {
        let mut v = vec![S::zero(); dim];
        v[i] = S::one();
        Point(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[S] {
        &self.0
    }

    pub fn add(&self, other: &Self) -> Self {
        Point(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a.clone() + b.clone())
                .collect(),
        )
    }

    pub fn sub(&self, other: &Self) -> Self {
        Point(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a.clone() - b.clone())
                .collect(),
        )
    }

    pub fn scale(&self, k: &S) -> Self {
        Point(self.0.iter().map(|a| a.clone() * k.clone()).collect())
    }

    pub fn dot(&self, other: &Self) -> S {
        self.0
            .iter()
            .zip(&other.0)
            .fold(S::zero(), |acc, (a, b)| acc + a.clone() * b.clone())
    }

    pub fn dist2(&self, other: &Self) -> S {
        let d = self.sub(other);
        d.dot(&d)
    }

    /// Appends a coordinate.
    pub fn extend(&self, t: S) -> Self {
        let mut v = self.0.clone();
        v.push(t);
        Point(v)
    }

    /// `(1-t) self + t other`.
    pub fn lerp(&self, other: &Self, t: &S) -> Self {
        self.scale(&(S::one() - t.clone())).add(&other.scale(t))
    }
}

impl<S: fmt::Display> fmt::Debug for Point<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

impl<S: fmt::Display> fmt::Display for Point<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Weighted combination `Σ w_i p_i`.
pub fn combination<S: Scalar>(points: &[Point<S>], weights: &[S]) -> Point<S> {
    assert_eq!(points.len(), weights.len());
    let mut acc = Point::origin(points[0].dim());
    for (p, w) in points.iter().zip(weights) {
        if !w.is_zero() {
            acc = acc.add(&p.scale(w));
        }
    }
    acc
}

pub fn barycenter<S: Scalar>(points: &[Point<S>]) -> Point<S> {
    let n = S::from_usize(points.len()).expect("count fits the scalar");
    let w = S::one() / n;
    combination(points, &vec![w; points.len()])
}

/// Largest squared pairwise distance.
pub fn diameter2<S: Scalar>(points: &[Point<S>]) -> S {
    let mut best = S::zero();
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            let d = points[i].dist2(&points[j]);
            if d > best {
                best = d;
            }
        }
    }
    best
}

/// Row-reduces `rows` in place and returns the rank.
fn row_reduce<S: Scalar>(rows: &mut [Vec<S>], cols: usize) -> usize {
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..rows.len()).find(|&r| !rows[r][c].is_zero()) else {
            continue;
        };
        rows.swap(rank, p);
        let pivot = rows[rank][c].clone();
        for x in rows[rank].iter_mut() {
            *x = x.clone() / pivot.clone();
        }
        for r in 0..rows.len() {
            if r != rank && !rows[r][c].is_zero() {
                let f = rows[r][c].clone();
                for k in 0..rows[r].len() {
                    let v = rows[r][k].clone() - f.clone() * rows[rank][k].clone();
                    rows[r][k] = v;
                }
            }
        }
        rank += 1;
    }
    rank
}

pub fn affinely_independent<S: Scalar>(points: &[Point<S>]) -> bool {
    if points.len() <= 1 {
        return true;
    }
    let mut rows: Vec<Vec<S>> = points[1..].iter().map(|p| p.sub(&points[0]).0).collect();
    let cols = points[0].dim();
    row_reduce(&mut rows, cols) == points.len() - 1
}

/// Barycentric coordinates of `x` with respect to affinely independent
/// `vertices`, or `None` if `x` is off their affine span.
pub fn barycentric<S: Scalar>(vertices: &[Point<S>], x: &Point<S>) -> Option<Vec<S>> {
    let k = vertices.len();
    let d = x.dim();
    // Unknowns λ_0..λ_{k-1}; equations Σλ_i v_i = x and Σλ_i = 1, as an
    // augmented system with one row per equation.
    let mut rows: Vec<Vec<S>> = (0..d)
        .map(|r| {
            let mut row: Vec<S> = vertices.iter().map(|v| v.0[r].clone()).collect();
            row.push(x.0[r].clone());
            row
        })
        .collect();
    let mut last = vec![S::one(); k];
    last.push(S::one());
    rows.push(last);
    let rank = row_reduce(&mut rows, k + 1);
    // Inconsistent iff some pivot sits in the augmented column.
    let mut lambda = vec![S::zero(); k];
    for row in rows.iter().take(rank) {
        let lead = row.iter().position(|v| !v.is_zero())?;
        if lead == k {
            return None;
        }
        lambda[lead] = row[k].clone();
    }
    Some(lambda)
}

/// `x` lies in the closed simplex spanned by affinely independent `vertices`.
pub fn in_simplex<S: Scalar>(vertices: &[Point<S>], x: &Point<S>) -> bool {
    barycentric(vertices, x).is_some_and(|l| l.iter().all(|v| !v.is_negative()))
}

/// Convex-hull membership by Carathéodory: `x` is in the hull iff it lies in
/// a simplex spanned by some affinely independent subset.
pub fn in_hull<S: Scalar>(points: &[Point<S>], x: &Point<S>) -> bool {
    if points.iter().any(|p| p == x) {
        return true;
    }
    let max = (x.dim() + 1).min(points.len());
    let mut chosen = Vec::new();
    hull_search(points, x, 0, max, &mut chosen)
}

fn hull_search<S: Scalar>(
    points: &[Point<S>],
    x: &Point<S>,
    start: usize,
    max: usize,
    chosen: &mut Vec<Point<S>>,
) -> bool {
    if chosen.len() >= 2 && in_simplex(chosen, x) {
        return true;
    }
    if chosen.len() == max {
        return false;
    }
    for i in start..points.len() {
        chosen.push(points[i].clone());
        if affinely_independent(chosen) && hull_search(points, x, i + 1, max, chosen) {
            return true;
        }
        chosen.pop();
    }
    false
}

/// `x ↦ A x + b`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct AffineMap<S> {
    /// One row per output coordinate.
    pub linear: Vec<Vec<S>>,
    pub offset: Vec<S>,
    pub source_dim: usize,
}

impl<S: Scalar> AffineMap<S> {
    pub fn identity(dim: usize) -> Self {
        let linear = (0..dim).map(|i| Point::unit(dim, i).0).collect();
        AffineMap {
            linear,
            offset: vec![S::zero(); dim],
            source_dim: dim,
        }
    }

    /// The affine map sending the standard basis vector `e_i` to `images[i]`
    /// and extended linearly (used for simplices realized on basis vectors).
    pub fn from_basis_images(source_dim: usize, images: &[Point<S>]) -> Self {
        assert_eq!(images.len(), source_dim);
        let target_dim = images.first().map_or(0, |p| p.dim());
        let linear = (0..target_dim)
            .map(|r| images.iter().map(|p| p.0[r].clone()).collect())
            .collect();
        AffineMap {
            linear,
            offset: vec![S::zero(); target_dim],
            source_dim,
        }
    }

    /// Drops the last coordinate of `S^dim`.
    pub fn drop_last(dim: usize) -> Self {
        let linear = (0..dim - 1).map(|i| Point::unit(dim, i).0).collect();
        AffineMap {
            linear,
            offset: vec![S::zero(); dim - 1],
            source_dim: dim,
        }
    }

    pub fn target_dim(&self) -> usize {
        self.offset.len()
    }

    pub fn apply(&self, x: &Point<S>) -> Point<S> {
        assert_eq!(
            x.dim(),
            self.source_dim,
            "affine map applied to a point of wrong dimension"
        );
        Point(
            self.linear
                .iter()
                .zip(&self.offset)
                .map(|(row, b)| {
                    row.iter()
                        .zip(&x.0)
                        .fold(b.clone(), |acc, (a, v)| acc + a.clone() * v.clone())
                })
                .collect(),
        )
    }

    /// `self ∘ inner`.
    pub fn after(&self, inner: &AffineMap<S>) -> AffineMap<S> {
        let linear = self
            .linear
            .iter()
            .map(|row| {
                (0..inner.source_dim)
                    .map(|j| {
                        row.iter()
                            .zip(&inner.linear)
                            .fold(S::zero(), |acc, (a, r)| acc + a.clone() * r[j].clone())
                    })
                    .collect()
            })
            .collect();
        let offset = self.apply(&Point(inner.offset.clone())).0;
        AffineMap {
            linear,
            offset,
            source_dim: inner.source_dim,
        }
    }

    /// Squared Frobenius norm of the linear part.
    pub fn frobenius2(&self) -> S {
        self.linear
            .iter()
            .flatten()
            .fold(S::zero(), |acc, a| acc + a.clone() * a.clone())
    }

    /// Rows pairwise orthonormal, hence `|A x| <= |x|`.
    pub fn is_coordinate_contraction(&self) -> bool {
        let rows: Vec<Point<S>> = self.linear.iter().cloned().map(Point).collect();
        rows.iter().enumerate().all(|(i, r)| {
            rows.iter().enumerate().all(|(j, s)| {
                let d = r.dot(s);
                if i == j {
                    d == S::one()
                } else {
                    d.is_zero()
                }
            })
        })
    }

    /// An upper bound on the squared operator norm of the linear part.
    pub fn lipschitz2_bound(&self) -> S {
        if self.is_coordinate_contraction() {
            S::one()
        } else {
            self.frobenius2()
        }
    }
}

impl<S: fmt::Display> fmt::Debug for AffineMap<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Affine(")?;
        for (row, b) in self.linear.iter().zip(&self.offset) {
            write!(f, "[")?;
            for (i, a) in row.iter().enumerate() {
                if i > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{a}")?;
            }
            write!(f, " | {b}]")?;
        }
        write!(f, ")")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{q, QPoint};

    fn p(v: &[(i64, i64)]) -> QPoint {
        Point(v.iter().map(|&(n, d)| q(n, d)).collect())
    }

    #[test]
    fn barycentric_of_triangle() {
        let tri = [
            p(&[(0, 1), (0, 1)]),
            p(&[(1, 1), (0, 1)]),
            p(&[(0, 1), (1, 1)]),
        ];
        let l = barycentric(&tri, &p(&[(1, 4), (1, 4)])).unwrap();
        assert_eq!(l, vec![q(1, 2), q(1, 4), q(1, 4)]);
        assert!(in_simplex(&tri, &p(&[(1, 2), (1, 2)])));
        assert!(!in_simplex(&tri, &p(&[(1, 1), (1, 1)])));
    }

    #[test]
    fn off_span_is_none() {
        let seg = [p(&[(0, 1), (0, 1)]), p(&[(1, 1), (0, 1)])];
        assert!(barycentric(&seg, &p(&[(1, 2), (1, 2)])).is_none());
    }

    #[test]
    fn hull_of_square() {
        let sq = [
            p(&[(0, 1), (0, 1)]),
            p(&[(1, 1), (0, 1)]),
            p(&[(0, 1), (1, 1)]),
            p(&[(1, 1), (1, 1)]),
        ];
        assert!(in_hull(&sq, &p(&[(3, 4), (3, 4)])));
        assert!(!in_hull(&sq, &p(&[(5, 4), (1, 2)])));
        assert_eq!(diameter2(&sq), q(2, 1));
    }

    #[test]
    fn affine_composition() {
        let f = AffineMap::<crate::Q>::drop_last(3);
        let g = AffineMap::identity(3);
        let x = p(&[(1, 1), (2, 1), (3, 1)]);
        assert_eq!(f.after(&g).apply(&x), p(&[(1, 1), (2, 1)]));
        assert!(f.is_coordinate_contraction());
    }

    #[test]
    fn independence() {
        assert!(!affinely_independent(&[
            p(&[(0, 1)]),
            p(&[(1, 1)]),
            p(&[(2, 1)])
        ]));
        assert!(affinely_independent(&[p(&[(0, 1)]), p(&[(1, 1)])]));
    }
}
