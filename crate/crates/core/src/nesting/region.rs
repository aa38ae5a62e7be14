use std::fmt;

use num_traits::Signed;

use crate::finite::Mask;
use crate::geometry::{in_hull, AffineMap};
use crate::{QPoint, Q};

/// Three-valued answer for containment questions that are not always
/// decidable over the rationals.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Tri {
    Yes,
    No,
    Unknown,
}

impl Tri {
    pub fn from_bool(b: bool) -> Tri {
        if b {
            Tri::Yes
        } else {
            Tri::No
        }
    }

    /// Conjunction; `No` dominates `Unknown`.
    pub fn and(self, other: Tri) -> Tri {
        match (self, other) {
            (Tri::No, _) | (_, Tri::No) => Tri::No,
            (Tri::Yes, Tri::Yes) => Tri::Yes,
            _ => Tri::Unknown,
        }
    }

    /// Disjunction; `Yes` dominates `Unknown`.
    pub fn or(self, other: Tri) -> Tri {
        match (self, other) {
            (Tri::Yes, _) | (_, Tri::Yes) => Tri::Yes,
            (Tri::No, Tri::No) => Tri::No,
            _ => Tri::Unknown,
        }
    }
}

/// A subset of the ambient space of a nesting: Euclidean space for the
/// PL realm or a finite space for the finite realm.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub enum Region {
    #[default]
    Ambient,
    Empty,
    /// Open ball given by its center and squared radius.
    Ball {
        center: QPoint,
        radius2: Q,
    },
    /// Closed convex hull of finitely many points. Used for covering sets,
    /// never as a nesting value (it is not open).
    Hull(Vec<QPoint>),
    /// `{x : map(x) ∈ inner}`.
    Preimage {
        map: AffineMap<Q>,
        inner: Box<Region>,
    },
    /// Subset of a finite space.
    Open(Mask),
    Intersection(Vec<Region>),
}

impl Region {
    pub fn ball(center: QPoint, radius2: Q) -> Region {
        assert!(radius2.is_positive(), "ball radius must be positive");
        Region::Ball { center, radius2 }
    }

    pub fn preimage(map: AffineMap<Q>, inner: Region) -> Region {
        match inner {
            Region::Ambient => Region::Ambient,
            Region::Empty => Region::Empty,
            Region::Intersection(rs) => Region::intersect_all(
                rs.into_iter()
                    .map(|r| Region::preimage(map.clone(), r))
                    .collect(),
            ),
            Region::Preimage { map: g, inner } => Region::Preimage {
                map: g.after(&map),
                inner,
            },
            other => Region::Preimage {
                map,
                inner: Box::new(other),
            },
        }
    }

    /// Normalised intersection: flattened, ambient members dropped, masks
    /// merged and pairwise disjoint balls collapsed to `Empty`.
    pub fn intersect_all(regions: Vec<Region>) -> Region {
        let mut flat = Vec::new();
        let mut mask: Option<Mask> = None;
        let mut stack = regions;
        while let Some(r) = stack.pop() {
            match r {
                Region::Ambient => {}
                Region::Empty => return Region::Empty,
                Region::Intersection(rs) => stack.extend(rs),
                Region::Open(m) => mask = Some(mask.map_or(m, |a| a & m)),
                other => {
                    if !flat.contains(&other) {
                        flat.push(other)
                    }
                }
            }
        }
        if let Some(m) = mask {
            if m == 0 {
                return Region::Empty;
            }
            flat.push(Region::Open(m));
        }
        for i in 0..flat.len() {
            for j in i + 1..flat.len() {
                if let (
                    Region::Ball {
                        center: c1,
                        radius2: r1,
                    },
                    Region::Ball {
                        center: c2,
                        radius2: r2,
                    },
                ) = (&flat[i], &flat[j])
                {
                    if balls_disjoint(c1, r1, c2, r2) {
                        return Region::Empty;
                    }
                }
            }
        }
        flat.sort();
        match flat.len() {
            0 => Region::Ambient,
            1 => flat.pop().unwrap(),
            _ => Region::Intersection(flat),
        }
    }

    pub fn intersect(&self, other: &Region) -> Region {
        Region::intersect_all(vec![self.clone(), other.clone()])
    }

    pub fn is_convex(&self) -> bool {
        match self {
            Region::Open(_) => false,
            Region::Preimage { inner, .. } => inner.is_convex(),
            Region::Intersection(rs) => rs.iter().all(Region::is_convex),
            _ => true,
        }
    }

    /// Whether the region is open in its realm.
    pub fn is_open(&self) -> bool {
        match self {
            Region::Hull(_) => false,
            Region::Preimage { inner, .. } => inner.is_open(),
            Region::Intersection(rs) => rs.iter().all(Region::is_open),
            _ => true,
        }
    }

    /// Exact membership of a rational point.
    pub fn contains(&self, p: &QPoint) -> bool {
        match self {
            Region::Ambient => true,
            Region::Empty => false,
            Region::Ball { center, radius2 } => &center.dist2(p) < radius2,
            Region::Hull(pts) => in_hull(pts, p),
            Region::Preimage { map, inner } => inner.contains(&map.apply(p)),
            Region::Open(_) => panic!("finite-space region queried with a Euclidean point"),
            Region::Intersection(rs) => rs.iter().all(|r| r.contains(p)),
        }
    }

    /// Membership of a point of a finite space.
    pub fn contains_index(&self, x: usize) -> bool {
        match self {
            Region::Ambient => true,
            Region::Empty => false,
            Region::Open(m) => m >> x & 1 == 1,
            Region::Intersection(rs) => rs.iter().all(|r| r.contains_index(x)),
            other => panic!("Euclidean region {other:?} queried with a finite-space point"),
        }
    }

    /// The mask of a finite-realm region inside `full`.
    pub fn mask(&self, full: Mask) -> Mask {
        match self {
            Region::Ambient => full,
            Region::Empty => 0,
            Region::Open(m) => m & full,
            Region::Intersection(rs) => rs.iter().fold(full, |acc, r| acc & r.mask(full)),
            other => panic!("Euclidean region {other:?} has no mask"),
        }
    }

    /// Whether the convex hull of `pts` lies in the region. Exact for convex
    /// regions.
    pub fn contains_hull(&self, pts: &[QPoint]) -> Tri {
        if pts.is_empty() {
            return Tri::Yes;
        }
        if self.is_convex() {
            Tri::from_bool(pts.iter().all(|p| self.contains(p)))
        } else {
            Tri::Unknown
        }
    }

    /// `self ⊆ other`, decided where a sound rule is available.
    pub fn subset_of(&self, other: &Region) -> Tri {
        if self == other {
            return Tri::Yes;
        }
        match (self, other) {
            (Region::Empty, _) | (_, Region::Ambient) => Tri::Yes,
            (Region::Open(a), Region::Open(b)) => Tri::from_bool(a & !b == 0),
            (Region::Hull(pts), o) => o.contains_hull(pts),
            (_, Region::Intersection(rs)) => rs
                .iter()
                .fold(Tri::Yes, |acc, r| acc.and(self.subset_of(r))),
            // a member inside the target suffices; otherwise nothing is known
            (Region::Intersection(rs), o) => {
                if rs.iter().any(|r| r.subset_of(o) == Tri::Yes) {
                    Tri::Yes
                } else {
                    Tri::Unknown
                }
            }
            (
                Region::Ball {
                    center: c1,
                    radius2: r1,
                },
                Region::Ball {
                    center: c2,
                    radius2: r2,
                },
            ) => Tri::from_bool(ball_in_ball(c1, r1, c2, r2)),
            (Region::Ball { .. }, Region::Empty) => Tri::No,
            (Region::Ambient, Region::Ball { .. } | Region::Hull(_) | Region::Empty) => Tri::No,
            (Region::Preimage { map: f, inner: a }, Region::Preimage { map: g, inner: b })
                if f == g =>
            {
                match a.subset_of(b) {
                    Tri::Yes => Tri::Yes,
                    _ => Tri::Unknown,
                }
            }
            _ => Tri::Unknown,
        }
    }

    /// A region containing the image of `self` under `map`. Falls back to
    /// `Ambient` when no tighter description is available.
    pub fn image(&self, map: &AffineMap<Q>) -> Region {
        match self {
            Region::Empty => Region::Empty,
            Region::Hull(pts) => Region::Hull(pts.iter().map(|p| map.apply(p)).collect()),
            Region::Ball { center, radius2 } if map.is_coordinate_contraction() => Region::Ball {
                center: map.apply(center),
                radius2: radius2.clone(),
            },
            Region::Intersection(rs) => {
                Region::intersect_all(rs.iter().map(|r| r.image(map)).collect())
            }
            Region::Preimage { map: f, inner } if f == map => (**inner).clone(),
            _ => Region::Ambient,
        }
    }
}

/// `B(c1, √r1) ⊆ B(c2, √r2)` for open balls, via `|c1 − c2| + √r1 <= √r2`.
pub fn ball_in_ball(c1: &QPoint, r1: &Q, c2: &QPoint, r2: &Q) -> bool {
    if r1 > r2 {
        return false;
    }
    let d = c1.dist2(c2);
    let slack = r1.clone() + r2.clone() - d;
    if slack.is_negative() {
        return false;
    }
    let four = Q::from_integer(4.into());
    slack.clone() * slack >= four * r1.clone() * r2.clone()
}

/// Open balls are disjoint iff `|c1 − c2| >= √r1 + √r2`.
pub fn balls_disjoint(c1: &QPoint, r1: &Q, c2: &QPoint, r2: &Q) -> bool {
    let excess = c1.dist2(c2) - r1.clone() - r2.clone();
    if excess.is_negative() {
        return false;
    }
    let four = Q::from_integer(4.into());
    excess.clone() * excess >= four * r1.clone() * r2.clone()
}

impl fmt::Debug for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Region::Ambient => write!(f, "X"),
            Region::Empty => write!(f, "∅"),
            Region::Ball { center, radius2 } => write!(f, "B({center}, r²={radius2})"),
            Region::Hull(pts) => write!(f, "hull{pts:?}"),
            Region::Preimage { map, inner } => write!(f, "{map:?}⁻¹({inner:?})"),
            Region::Open(m) => write!(f, "open{m:#b}"),
            Region::Intersection(rs) => {
                for (i, r) in rs.iter().enumerate() {
                    if i > 0 {
                        write!(f, " ∩ ")?;
                    }
                    write!(f, "{r:?}")?;
                }
                Ok(())
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Point;
    use crate::q;

    fn pt(xs: &[(i64, i64)]) -> QPoint {
        Point(xs.iter().map(|&(n, d)| q(n, d)).collect())
    }

    #[test]
    fn ball_inclusion_is_exact() {
        let big = Region::ball(pt(&[(0, 1)]), q(1, 1));
        let inside = Region::ball(pt(&[(1, 2)]), q(1, 4));
        let poking = Region::ball(pt(&[(3, 5)]), q(1, 4));
        assert_eq!(inside.subset_of(&big), Tri::Yes);
        assert_eq!(poking.subset_of(&big), Tri::No);
        assert_eq!(big.subset_of(&inside), Tri::No);
    }

    #[test]
    fn far_balls_intersect_to_empty() {
        let a = Region::ball(pt(&[(0, 1)]), q(1, 16));
        let b = Region::ball(pt(&[(1, 1)]), q(1, 16));
        assert_eq!(a.intersect(&b), Region::Empty);
        let c = Region::ball(pt(&[(1, 4)]), q(1, 16));
        assert!(matches!(a.intersect(&c), Region::Intersection(_)));
        // tangent open balls share no point
        let d = Region::ball(pt(&[(1, 2)]), q(1, 16));
        assert_eq!(a.intersect(&d), Region::Empty);
    }

    #[test]
    fn hull_tests_are_vertex_tests() {
        let b = Region::ball(pt(&[(0, 1), (0, 1)]), q(1, 1));
        let small = vec![pt(&[(1, 2), (0, 1)]), pt(&[(0, 1), (1, 2)])];
        let big = vec![pt(&[(1, 1), (0, 1)]), pt(&[(0, 1), (1, 2)])];
        assert_eq!(b.contains_hull(&small), Tri::Yes);
        assert_eq!(b.contains_hull(&big), Tri::No);
        assert_eq!(
            Region::Hull(small.clone()).subset_of(&Region::Hull(vec![
                pt(&[(1, 1), (0, 1)]),
                pt(&[(0, 1), (1, 1)]),
                pt(&[(0, 1), (0, 1)])
            ])),
            Tri::Yes
        );
    }

    #[test]
    fn preimage_membership_and_image() {
        let inner = Region::ball(pt(&[(0, 1)]), q(1, 4));
        let drop = AffineMap::drop_last(2);
        let cyl = Region::preimage(drop.clone(), inner.clone());
        assert!(cyl.contains(&pt(&[(1, 4), (5, 1)])));
        assert!(!cyl.contains(&pt(&[(1, 1), (0, 1)])));
        assert_eq!(cyl.image(&drop), inner);
        assert_eq!(Region::preimage(drop, Region::Ambient), Region::Ambient);
    }

    #[test]
    fn finite_masks() {
        let r = Region::intersect_all(vec![
            Region::Open(0b0110),
            Region::Open(0b0011),
            Region::Ambient,
        ]);
        assert_eq!(r, Region::Open(0b0010));
        assert!(r.contains_index(1));
        assert_eq!(
            Region::Open(0b0010).subset_of(&Region::Open(0b0110)),
            Tri::Yes
        );
        assert_eq!(
            Region::intersect_all(vec![Region::Open(1), Region::Open(2)]),
            Region::Empty
        );
    }
}
