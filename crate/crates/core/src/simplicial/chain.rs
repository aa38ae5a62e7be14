use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, Neg, Sub};
use std::sync::Arc;

use num_traits::{One, Zero};

use crate::error::Result;
use crate::geometry::{barycenter, combination, AffineMap};
use crate::nesting::Region;
use crate::{Int, QPoint, Q};

/// A continuous map between Euclidean regions that can be evaluated exactly
/// at rational points.
pub trait SimplexMap: Send + Sync + fmt::Debug {
    /// Stable identity; two maps with equal keys are the same map.
    fn key(&self) -> String;
    fn eval(&self, x: &QPoint) -> Result<QPoint>;
    /// Evaluation at the point with barycentric `weights` on `vertices`.
    fn eval_on(&self, vertices: &[QPoint], weights: &[Q]) -> Result<QPoint> {
        self.eval(&combination(vertices, weights))
    }
    /// True when the map is known to be affine on the hull of `vertices`.
    fn affine_on(&self, _vertices: &[QPoint]) -> bool {
        false
    }
    /// A region containing the image of the hull of `vertices`.
    fn enclosure(&self, _vertices: &[QPoint]) -> Option<Region> {
        None
    }
    /// Set only by [`ComposedMap`], so compositions can be flattened.
    fn as_composed(&self) -> Option<&ComposedMap> {
        None
    }
}

/// Shared handle to a [`SimplexMap`], compared by key.
#[derive(Clone)]
pub struct MapRef {
    key: Arc<str>,
    map: Arc<dyn SimplexMap>,
}

impl MapRef {
    pub fn new(map: Arc<dyn SimplexMap>) -> Self {
        MapRef {
            key: map.key().into(),
            map,
        }
    }

    pub fn key(&self) -> &str {
        &self.key
    }

    pub fn eval(&self, x: &QPoint) -> Result<QPoint> {
        self.map.eval(x)
    }

    pub fn eval_on(&self, vertices: &[QPoint], weights: &[Q]) -> Result<QPoint> {
        self.map.eval_on(vertices, weights)
    }

    pub fn affine_on(&self, vertices: &[QPoint]) -> bool {
        self.map.affine_on(vertices)
    }

    pub fn enclosure(&self, vertices: &[QPoint]) -> Option<Region> {
        self.map.enclosure(vertices)
    }

    pub fn inner(&self) -> &Arc<dyn SimplexMap> {
        &self.map
    }

    pub fn as_composed(&self) -> Option<&ComposedMap> {
        self.map.as_composed()
    }
}

impl PartialEq for MapRef {
    fn eq(&self, other: &Self) -> bool {
        self.key == other.key
    }
}
impl Eq for MapRef {}
impl PartialOrd for MapRef {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for MapRef {
    fn cmp(&self, other: &Self) -> Ordering {
        self.key.cmp(&other.key)
    }
}
impl Hash for MapRef {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.key.hash(state)
    }
}
impl fmt::Debug for MapRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.key)
    }
}

/// `outer ∘ inner` with `outer` affine.
#[derive(Debug)]
pub struct ComposedMap {
    pub outer: AffineMap<Q>,
    pub inner: MapRef,
}

impl SimplexMap for ComposedMap {
    fn key(&self) -> String {
        format!("{:?}∘{}", self.outer, self.inner.key())
    }

    fn eval(&self, x: &QPoint) -> Result<QPoint> {
        Ok(self.outer.apply(&self.inner.eval(x)?))
    }

    fn eval_on(&self, vertices: &[QPoint], weights: &[Q]) -> Result<QPoint> {
        Ok(self.outer.apply(&self.inner.eval_on(vertices, weights)?))
    }

    fn affine_on(&self, vertices: &[QPoint]) -> bool {
        self.inner.affine_on(vertices)
    }

    fn enclosure(&self, vertices: &[QPoint]) -> Option<Region> {
        self.inner.enclosure(vertices).map(|r| r.image(&self.outer))
    }

    fn as_composed(&self) -> Option<&ComposedMap> {
        Some(self)
    }
}

/// A singular simplex described symbolically.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Simplex {
    /// The linear ordered simplex `[v_0, ..., v_k]`; repeated vertices allowed.
    Affine(Vec<QPoint>),
    /// `map ∘ [v_0, ..., v_k]` for a linear simplex in the map's domain.
    Mapped { map: MapRef, vertices: Vec<QPoint> },
    /// Linear cone `[apex, base]` on a simplex that is not itself linear.
    Cone { apex: QPoint, base: Box<Simplex> },
}

impl Simplex {
    pub fn degree(&self) -> usize {
        match self {
            Simplex::Affine(v) => v.len() - 1,
            Simplex::Mapped { vertices, .. } => vertices.len() - 1,
            Simplex::Cone { base, .. } => base.degree() + 1,
        }
    }

    /// `map ∘ [vertices]` in canonical form: evaluated to a point when zero
    /// dimensional and to a linear simplex where the map is affine.
    pub fn mapped(map: MapRef, vertices: Vec<QPoint>) -> Result<Simplex> {
        if vertices.len() == 1 || map.affine_on(&vertices) {
            return Ok(Simplex::Affine(
                vertices
                    .iter()
                    .map(|v| map.eval(v))
                    .collect::<Result<_>>()?,
            ));
        }
        Ok(Simplex::Mapped { map, vertices })
    }

    /// Image of the point with barycentric coordinates `weights`.
    pub fn eval(&self, weights: &[Q]) -> Result<QPoint> {
        match self {
            Simplex::Affine(v) => Ok(combination(v, weights)),
            Simplex::Mapped { map, vertices } => map.eval_on(vertices, weights),
            Simplex::Cone { apex, base } => {
                let t0 = weights[0].clone();
                if t0 == Q::one() {
                    return Ok(apex.clone());
                }
                let rest = Q::one() - t0.clone();
                let inner: Vec<Q> = weights[1..]
                    .iter()
                    .map(|w| w.clone() / rest.clone())
                    .collect();
                Ok(apex.scale(&t0).add(&base.eval(&inner)?.scale(&rest)))
            }
        }
    }

    /// Image of the barycenter of the standard simplex.
    pub fn barycenter(&self) -> Result<QPoint> {
        match self {
            Simplex::Affine(v) => Ok(barycenter(v)),
            _ => {
                let n = self.degree() + 1;
                self.eval(&vec![Q::new(Int::one(), Int::from(n)); n])
            }
        }
    }

    /// The face spanned by the vertex positions in `keep` (ascending).
    pub fn sub_face(&self, keep: &[usize]) -> Result<Simplex> {
        let mut out = self.clone();
        for i in (0..=self.degree()).rev() {
            if !keep.contains(&i) {
                out = out.face(i)?;
            }
        }
        Ok(out)
    }

    /// `[apex, self]`.
    pub fn cone(&self, apex: &QPoint) -> Simplex {
        match self {
            Simplex::Affine(v) => {
                let mut pts = Vec::with_capacity(v.len() + 1);
                pts.push(apex.clone());
                pts.extend(v.iter().cloned());
                Simplex::Affine(pts)
            }
            other => Simplex::Cone {
                apex: apex.clone(),
                base: Box::new(other.clone()),
            },
        }
    }

    /// The `i`-th face (vertex `i` omitted).
    pub fn face(&self, i: usize) -> Result<Simplex> {
        Ok(match self {
            Simplex::Affine(v) => {
                let mut w = v.clone();
                w.remove(i);
                Simplex::Affine(w)
            }
            Simplex::Mapped { map, vertices } => {
                let mut w = vertices.clone();
                w.remove(i);
                Simplex::mapped(map.clone(), w)?
            }
            Simplex::Cone { apex, base } => {
                if i == 0 {
                    (**base).clone()
                } else {
                    base.face(i - 1)?.cone(apex)
                }
            }
        })
    }

    pub fn boundary(&self) -> Result<Chain> {
        let mut c = Chain::zero();
        if self.degree() == 0 {
            return Ok(c);
        }
        for i in 0..=self.degree() {
            let sign = if i % 2 == 0 { Int::one() } else { -Int::one() };
            c.add_term(self.face(i)?, sign);
        }
        Ok(c)
    }

    /// Image of the ordered vertices.
    pub fn vertex_images(&self) -> Result<Vec<QPoint>> {
        match self {
            Simplex::Affine(v) => Ok(v.clone()),
            Simplex::Mapped { map, vertices } => vertices.iter().map(|v| map.eval(v)).collect(),
            Simplex::Cone { apex, base } => {
                let mut out = vec![apex.clone()];
                out.extend(base.vertex_images()?);
                Ok(out)
            }
        }
    }

    /// Postcomposition with an affine map, kept in canonical form.
    pub fn apply_affine(&self, a: &AffineMap<Q>) -> Simplex {
        match self {
            Simplex::Affine(v) => Simplex::Affine(v.iter().map(|p| a.apply(p)).collect()),
            Simplex::Mapped { map, vertices } => {
                let composed = match map.as_composed() {
                    Some(c) => ComposedMap {
                        outer: a.after(&c.outer),
                        inner: c.inner.clone(),
                    },
                    None => ComposedMap {
                        outer: a.clone(),
                        inner: map.clone(),
                    },
                };
                Simplex::Mapped {
                    map: MapRef::new(Arc::new(composed)),
                    vertices: vertices.clone(),
                }
            }
            Simplex::Cone { apex, base } => base.apply_affine(a).cone(&a.apply(apex)),
        }
    }

    pub fn is_affine(&self) -> bool {
        matches!(self, Simplex::Affine(_))
    }
}

impl fmt::Debug for Simplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Simplex::Affine(v) => {
                write!(f, "[")?;
                for (i, p) in v.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{p}")?;
                }
                write!(f, "]")
            }
            Simplex::Mapped { map, vertices } => {
                write!(f, "{map:?}{:?}", Simplex::Affine(vertices.clone()))
            }
            Simplex::Cone { apex, base } => write!(f, "C_{apex}({base:?})"),
        }
    }
}

/// Finite integer combination of symbolic simplices.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Chain {
    terms: BTreeMap<Simplex, Int>,
}

impl Chain {
    pub fn zero() -> Self {
        Chain {
            terms: BTreeMap::new(),
        }
    }

    pub fn simplex(s: Simplex) -> Self {
        Self::term(s, Int::one())
    }

    pub fn term(s: Simplex, c: Int) -> Self {
        let mut out = Self::zero();
        out.add_term(s, c);
        out
    }

    pub fn affine(points: Vec<QPoint>) -> Self {
        Self::simplex(Simplex::Affine(points))
    }

    pub fn add_term(&mut self, s: Simplex, c: Int) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(s);
        match entry {
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let v = o.get().clone() + c;
                if v.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = v;
                }
            }
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
        }
    }

    pub fn add_chain(&mut self, other: &Chain, k: &Int) {
        for (s, c) in &other.terms {
            self.add_term(s.clone(), c.clone() * k.clone());
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Simplex, &Int)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, s: &Simplex) -> Int {
        self.terms.get(s).cloned().unwrap_or_default()
    }

    /// Common degree of all terms (`None` for the zero chain).
    pub fn degree(&self) -> Option<usize> {
        self.terms.keys().next().map(|s| s.degree())
    }

    pub fn scale(&self, k: &Int) -> Chain {
        let mut out = Chain::zero();
        out.add_chain(self, k);
        out
    }

    /// Linear extension of a map on simplices.
    pub fn map<F: FnMut(&Simplex) -> Result<Chain>>(&self, mut f: F) -> Result<Chain> {
        let mut out = Chain::zero();
        for (s, c) in &self.terms {
            out.add_chain(&f(s)?, c);
        }
        Ok(out)
    }

    pub fn boundary(&self) -> Result<Chain> {
        self.map(|s| s.boundary())
    }

    /// Linear cone `C_apex`.
    pub fn cone(&self, apex: &QPoint) -> Chain {
        let mut out = Chain::zero();
        for (s, c) in &self.terms {
            out.add_term(s.cone(apex), c.clone());
        }
        out
    }

    pub fn apply_affine(&self, a: &AffineMap<Q>) -> Chain {
        let mut out = Chain::zero();
        for (s, c) in &self.terms {
            out.add_term(s.apply_affine(a), c.clone());
        }
        out
    }

    /// Sum of coefficients (augmentation), meaningful in degree 0.
    pub fn augmentation(&self) -> Int {
        self.terms.values().fold(Int::zero(), |a, c| a + c)
    }

    /// Whether every simplex is linear.
    pub fn is_affine(&self) -> bool {
        self.terms.keys().all(|s| s.is_affine())
    }
}

impl Add for &Chain {
    type Output = Chain;
    fn add(self, rhs: &Chain) -> Chain {
        let mut out = self.clone();
        out.add_chain(rhs, &Int::one());
        out
    }
}

impl Sub for &Chain {
    type Output = Chain;
    fn sub(self, rhs: &Chain) -> Chain {
        let mut out = self.clone();
        out.add_chain(rhs, &-Int::one());
        out
    }
}

impl Neg for &Chain {
    type Output = Chain;
    fn neg(self) -> Chain {
        self.scale(&-Int::one())
    }
}

impl fmt::Debug for Chain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (s, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{c}·{s:?}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Point;
    use crate::q;

    fn pt(x: i64) -> QPoint {
        Point(vec![q(x, 1)])
    }

    #[test]
    fn boundary_squares_to_zero() {
        let c = Chain::affine(vec![pt(0), pt(1), pt(2)]);
        assert!(c.boundary().unwrap().boundary().unwrap().is_zero());
    }

    #[test]
    fn constant_simplex_has_zero_boundary() {
        let c = Chain::affine(vec![pt(3), pt(3)]);
        assert!(c.boundary().unwrap().is_zero());
    }

    #[test]
    fn cone_boundary_formula() {
        let c = &Chain::affine(vec![pt(0), pt(1)]) + &Chain::affine(vec![pt(1), pt(2)]);
        let b = pt(7);
        let lhs = c.cone(&b).boundary().unwrap();
        let rhs = &c - &c.boundary().unwrap().cone(&b);
        assert_eq!(lhs, rhs);
    }
}
