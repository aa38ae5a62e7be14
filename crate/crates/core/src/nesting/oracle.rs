use std::collections::HashMap;
use std::fmt;
use std::sync::Mutex;

use num_traits::Signed;

use crate::error::{Error, Result};
use crate::finite::{FiniteSpace, Mask};
use crate::geometry::AffineMap;
use crate::nesting::Region;
use crate::{QPoint, Q};

/// An assignment of an open set to every finite sequence of points.
pub trait Nesting {
    type Point: Clone + fmt::Debug;

    fn eval(&self, seq: &[Self::Point]) -> Result<Region>;

    /// Membership of a point in a region of this realm.
    fn member(&self, region: &Region, p: &Self::Point) -> bool;

    /// Whether a region is open in this realm.
    fn is_open(&self, region: &Region) -> bool;

    /// `a ⊆ b`, exact in the finite realm, three-valued in the PL realm.
    fn subset(&self, a: &Region, b: &Region) -> super::Tri;

    fn is_ambient(&self, region: &Region) -> bool;

    /// Stable textual identity, used as a memo key.
    fn descriptor(&self) -> String;
}

/// Nestings on Euclidean space `Q^d`, described as data.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PlNesting {
    /// `η ≡ X`.
    Ambient,
    /// Generated by `g(x) = B(x, √radius2)`: `η(x_1..x_n) = ∩ g(x_i)`.
    Balls { radius2: Q },
    /// Generated by a finite ball family: `g(x)` is the member of largest
    /// power `r² − |x − c|²` containing `x` (first on ties), or `X` when no
    /// member does.
    BallCover { balls: Vec<(QPoint, Q)> },
    /// `f*η(x..) = f⁻¹(η(f(x)..))` for an affine `f`.
    Pullback {
        map: AffineMap<Q>,
        inner: Box<PlNesting>,
    },
    /// Extension by the prefix rule of a nesting on the open set `w`, which is
    /// taken to be `inner` restricted to `w`.
    Extension { w: Region, inner: Box<PlNesting> },
    /// `η(x_1..x_m) = ∩_i η^{x_i}(x_1..x_i)` where `η^x` is the nesting of the
    /// first piece whose region contains `x`, else `default`.
    Intersection {
        pieces: Vec<(Region, PlNesting)>,
        default: Box<PlNesting>,
    },
    /// Planted defect: ignores every sequence of length at least two, which
    /// breaks monotonicity.
    Broken(Box<PlNesting>),
}

impl PlNesting {
    pub fn balls(radius2: Q) -> Result<Self> {
        if !radius2.is_positive() {
            return Err(Error::InvalidNesting(format!(
                "ball radius² {radius2} must be positive"
            )));
        }
        Ok(PlNesting::Balls { radius2 })
    }

    pub fn ball_cover(balls: Vec<(QPoint, Q)>) -> Result<Self> {
        if let Some((c, r)) = balls.iter().find(|(_, r)| !r.is_positive()) {
            return Err(Error::InvalidNesting(format!(
                "ball at {c} has radius² {r}"
            )));
        }
        Ok(PlNesting::BallCover { balls })
    }

    /// Pullback along an affine map; nested pullbacks are composed.
    pub fn pullback(map: AffineMap<Q>, inner: PlNesting) -> Self {
        match inner {
            PlNesting::Ambient => PlNesting::Ambient,
            PlNesting::Pullback { map: g, inner } => PlNesting::Pullback {
                map: g.after(&map),
                inner,
            },
            other => PlNesting::Pullback {
                map,
                inner: Box::new(other),
            },
        }
    }

    pub fn extend(w: Region, inner: PlNesting) -> Result<Self> {
        if !w.is_open() {
            return Err(Error::InvalidNesting(format!(
                "extension domain {w:?} is not open"
            )));
        }
        Ok(PlNesting::Extension {
            w,
            inner: Box::new(inner),
        })
    }

    pub fn intersect_family(pieces: Vec<(Region, PlNesting)>, default: PlNesting) -> Self {
        PlNesting::Intersection {
            pieces,
            default: Box::new(default),
        }
    }

    pub fn broken(inner: PlNesting) -> Self {
        PlNesting::Broken(Box::new(inner))
    }

    /// The generator `g(x)`, for nestings of the form `∩ g(x_i)`.
    fn generator(&self, x: &QPoint) -> Option<Region> {
        match self {
            PlNesting::Ambient => Some(Region::Ambient),
            PlNesting::Balls { radius2 } => Some(Region::ball(x.clone(), radius2.clone())),
            PlNesting::BallCover { balls } => {
                let mut best: Option<(&QPoint, &Q, Q)> = None;
                for (c, r) in balls {
                    let power = r.clone() - c.dist2(x);
                    if power.is_positive() && best.as_ref().is_none_or(|(_, _, p)| &power > p) {
                        best = Some((c, r, power));
                    }
                }
                Some(best.map_or(Region::Ambient, |(c, r, _)| {
                    Region::ball(c.clone(), r.clone())
                }))
            }
            _ => None,
        }
    }

    fn piece(&self, x: &QPoint) -> &PlNesting {
        match self {
            PlNesting::Intersection { pieces, default } => pieces
                .iter()
                .find(|(r, _)| r.contains(x))
                .map_or(default, |(_, n)| n),
            _ => self,
        }
    }

    pub fn evaluate(&self, seq: &[QPoint]) -> Result<Region> {
        match self {
            PlNesting::Ambient | PlNesting::Balls { .. } | PlNesting::BallCover { .. } => {
                let gs = seq
                    .iter()
                    .map(|x| self.generator(x).expect("generated nesting"))
                    .collect();
                Ok(Region::intersect_all(gs))
            }
            PlNesting::Pullback { map, inner } => {
                let image: Vec<QPoint> = seq.iter().map(|x| map.apply(x)).collect();
                Ok(Region::preimage(map.clone(), inner.evaluate(&image)?))
            }
            PlNesting::Extension { w, inner } => {
                let k = seq.iter().take_while(|x| w.contains(x)).count();
                if seq[k..].iter().any(|x| w.contains(x)) {
                    return Ok(Region::Empty);
                }
                if k == 0 {
                    return Ok(Region::Ambient);
                }
                Ok(inner.evaluate(&seq[..k])?.intersect(w))
            }
            PlNesting::Intersection { .. } => {
                let mut parts = Vec::with_capacity(seq.len());
                for i in 0..seq.len() {
                    parts.push(self.piece(&seq[i]).evaluate(&seq[..=i])?);
                }
                Ok(Region::intersect_all(parts))
            }
            PlNesting::Broken(inner) => {
                if seq.len() >= 2 {
                    Ok(Region::Ambient)
                } else {
                    inner.evaluate(seq)
                }
            }
        }
    }
}

impl fmt::Debug for PlNesting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PlNesting::Ambient => write!(f, "ambient"),
            PlNesting::Balls { radius2 } => write!(f, "balls(r²={radius2})"),
            PlNesting::BallCover { balls } => {
                write!(f, "ball-cover[")?;
                for (i, (c, r)) in balls.iter().enumerate() {
                    if i > 0 {
                        write!(f, "; ")?;
                    }
                    write!(f, "{c} r²={r}")?;
                }
                write!(f, "]")
            }
            PlNesting::Pullback { map, inner } => write!(f, "pullback({map:?}, {inner:?})"),
            PlNesting::Extension { w, inner } => write!(f, "extend({w:?}, {inner:?})"),
            PlNesting::Intersection { pieces, default } => {
                write!(f, "intersect[")?;
                for (r, n) in pieces {
                    write!(f, "{r:?} => {n:?}; ")?;
                }
                write!(f, "else {default:?}]")
            }
            PlNesting::Broken(inner) => write!(f, "broken({inner:?})"),
        }
    }
}

impl Nesting for PlNesting {
    type Point = QPoint;

    fn eval(&self, seq: &[QPoint]) -> Result<Region> {
        self.evaluate(seq)
    }

    fn member(&self, region: &Region, p: &QPoint) -> bool {
        region.contains(p)
    }

    fn is_open(&self, region: &Region) -> bool {
        region.is_open()
    }

    fn subset(&self, a: &Region, b: &Region) -> super::Tri {
        a.subset_of(b)
    }

    fn is_ambient(&self, region: &Region) -> bool {
        region == &Region::Ambient
    }

    fn descriptor(&self) -> String {
        format!("{self:?}")
    }
}

/// How a finite-space nesting is built.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FiniteKind {
    /// `η(x_1..x_n) = ∩ g(x_i)` for a table `g` of opens with `x ∈ g(x)`.
    CoverTable(Vec<Mask>),
    /// `f*η` along a continuous map into the inner nesting's space.
    Pullback {
        map: Vec<usize>,
        inner: Box<FiniteNesting>,
    },
    /// Prefix-rule extension of `inner` restricted to the open `w`.
    Extension { w: Mask, inner: Box<FiniteNesting> },
    /// `η(x_1..x_m) = ∩_i η^{x_i}(x_1..x_i)`, one nesting per point.
    Intersection(Vec<FiniteNesting>),
    /// Planted defect, see [`PlNesting::Broken`].
    Broken(Box<FiniteNesting>),
}

/// A nesting on a finite space, memoised per sequence.
pub struct FiniteNesting {
    space: FiniteSpace,
    kind: FiniteKind,
    memo: Mutex<HashMap<Vec<usize>, Mask>>,
}

impl Clone for FiniteNesting {
    fn clone(&self) -> Self {
        FiniteNesting {
            space: self.space.clone(),
            kind: self.kind.clone(),
            memo: Mutex::default(),
        }
    }
}

impl PartialEq for FiniteNesting {
    fn eq(&self, other: &Self) -> bool {
        self.space == other.space && self.kind == other.kind
    }
}
impl Eq for FiniteNesting {}

impl fmt::Debug for FiniteNesting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?} on {:?}", self.kind, self.space.names())
    }
}

impl FiniteNesting {
    fn new(space: FiniteSpace, kind: FiniteKind) -> Self {
        FiniteNesting {
            space,
            kind,
            memo: Mutex::default(),
        }
    }

    pub fn space(&self) -> &FiniteSpace {
        &self.space
    }

    pub fn kind(&self) -> &FiniteKind {
        &self.kind
    }

    pub fn cover_generated(space: &FiniteSpace, g: Vec<Mask>) -> Result<Self> {
        if g.len() != space.len() {
            return Err(Error::InvalidNesting(format!(
                "table has {} entries for {} points",
                g.len(),
                space.len()
            )));
        }
        for (x, &m) in g.iter().enumerate() {
            if m >> x & 1 == 0 {
                return Err(Error::InvalidNesting(format!(
                    "g({}) does not contain {}",
                    space.name(x),
                    space.name(x)
                )));
            }
            if !space.is_open(m) {
                return Err(Error::InvalidNesting(format!(
                    "g({}) = {} is not open",
                    space.name(x),
                    space.format_mask(m)
                )));
            }
        }
        Ok(Self::new(space.clone(), FiniteKind::CoverTable(g)))
    }

    /// The nesting generated by minimal opens, `η(x..) = ∩ U_{x_i}`.
    pub fn minimal_open(space: &FiniteSpace) -> Self {
        let g = (0..space.len()).map(|x| space.minimal_open(x)).collect();
        Self::new(space.clone(), FiniteKind::CoverTable(g))
    }

    pub fn pullback(space: &FiniteSpace, map: Vec<usize>, inner: FiniteNesting) -> Result<Self> {
        if map.len() != space.len() || map.iter().any(|&y| y >= inner.space.len()) {
            return Err(Error::UnsupportedMap(
                "map table does not match the spaces".into(),
            ));
        }
        if !space.is_continuous(&inner.space, &map) {
            return Err(Error::UnsupportedMap(format!(
                "map {map:?} is not continuous"
            )));
        }
        Ok(Self::new(
            space.clone(),
            FiniteKind::Pullback {
                map,
                inner: Box::new(inner),
            },
        ))
    }

    pub fn extend(w: Mask, inner: FiniteNesting) -> Result<Self> {
        if !inner.space.is_open(w) {
            return Err(Error::InvalidNesting(format!(
                "{} is not open",
                inner.space.format_mask(w)
            )));
        }
        Ok(Self::new(
            inner.space.clone(),
            FiniteKind::Extension {
                w,
                inner: Box::new(inner),
            },
        ))
    }

    pub fn intersect_family(space: &FiniteSpace, family: Vec<FiniteNesting>) -> Result<Self> {
        if family.len() != space.len() || family.iter().any(|n| &n.space != space) {
            return Err(Error::InvalidNesting(
                "family must give one nesting on this space per point".into(),
            ));
        }
        Ok(Self::new(space.clone(), FiniteKind::Intersection(family)))
    }

    pub fn broken(inner: FiniteNesting) -> Self {
        Self::new(inner.space.clone(), FiniteKind::Broken(Box::new(inner)))
    }

    pub fn eval_mask(&self, seq: &[usize]) -> Mask {
        if let Some(&m) = self.memo.lock().expect("memo poisoned").get(seq) {
            return m;
        }
        let full = self.space.full();
        let m = match &self.kind {
            FiniteKind::CoverTable(g) => seq.iter().fold(full, |acc, &x| acc & g[x]),
            FiniteKind::Pullback { map, inner } => {
                let image: Vec<usize> = seq.iter().map(|&x| map[x]).collect();
                self.space.preimage(map, inner.eval_mask(&image))
            }
            FiniteKind::Extension { w, inner } => {
                let inside = |x: usize| w >> x & 1 == 1;
                let k = seq.iter().take_while(|&&x| inside(x)).count();
                if seq[k..].iter().any(|&x| inside(x)) {
                    0
                } else if k == 0 {
                    full
                } else {
                    inner.eval_mask(&seq[..k]) & w
                }
            }
            FiniteKind::Intersection(family) => {
                (0..seq.len()).fold(full, |acc, i| acc & family[seq[i]].eval_mask(&seq[..=i]))
            }
            FiniteKind::Broken(inner) => {
                if seq.len() >= 2 {
                    full
                } else {
                    inner.eval_mask(seq)
                }
            }
        };
        self.memo
            .lock()
            .expect("memo poisoned")
            .insert(seq.to_vec(), m);
        m
    }
}

impl Nesting for FiniteNesting {
    type Point = usize;

    fn eval(&self, seq: &[usize]) -> Result<Region> {
        Ok(Region::Open(self.eval_mask(seq)))
    }

    fn member(&self, region: &Region, p: &usize) -> bool {
        region.contains_index(*p)
    }

    fn is_open(&self, region: &Region) -> bool {
        self.space.is_open(region.mask(self.space.full()))
    }

    fn subset(&self, a: &Region, b: &Region) -> super::Tri {
        let full = self.space.full();
        super::Tri::from_bool(a.mask(full) & !b.mask(full) == 0)
    }

    fn is_ambient(&self, region: &Region) -> bool {
        region.mask(self.space.full()) == self.space.full()
    }

    fn descriptor(&self) -> String {
        format!("{self:?}")
    }
}
