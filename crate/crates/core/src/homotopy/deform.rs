use std::collections::hash_map::DefaultHasher;
use std::collections::{BTreeMap, BTreeSet};
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use num_traits::{One, Signed, Zero};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::geometry::{barycentric, combination};
use crate::homotopy::covering::{face_id, CompatibleCovering};
use crate::nesting::Region;
use crate::simplicial::{Chain, FaceKey, MapRef, OrderedComplex, Simplex, SimplexMap};
use crate::{Int, QPoint, Q};

/// The deformation `f: |K| → |K|` of a covered complex: the identity on
/// vertices, and on each face `α` the radial extension from `∂α` that sends
/// the segment from `x ∈ ∂α` to `b(α)` onto the straight segment from `f(x)`
/// to `t(α)` inside the convex `W(α)`.
///
/// Faces on which `t = b` hold for every subface are left fixed.
#[derive(Debug)]
pub struct DeformationMap {
    key: String,
    complex: OrderedComplex,
    w: BTreeMap<FaceKey, Region>,
    t: BTreeMap<FaceKey, QPoint>,
    fixed: BTreeSet<FaceKey>,
    facets: Vec<(FaceKey, Vec<QPoint>)>,
}

impl DeformationMap {
    /// Requires a covering of every face; validity is the caller's business
    /// (see `validate_covering`).
    pub fn new(complex: &OrderedComplex, covering: &CompatibleCovering) -> Result<Arc<Self>> {
        let mut w = BTreeMap::new();
        let mut t = BTreeMap::new();
        let mut hasher = DefaultHasher::new();
        for (key, _) in complex.faces() {
            let id = face_id(complex, key);
            let cell = covering
                .get(&id)
                .ok_or_else(|| Error::InvalidCovering(format!("face {id:?} has no cell")))?;
            if !cell.w.is_convex() {
                return Err(Error::InvalidCovering(format!("W on {id:?} is not convex")));
            }
            id.hash(&mut hasher);
            format!("{:?}", cell.w).hash(&mut hasher);
            cell.t.hash(&mut hasher);
            w.insert(key.clone(), cell.w.clone());
            t.insert(key.clone(), cell.t.clone());
        }
        let mut fixed = BTreeSet::new();
        let mut keys: Vec<&FaceKey> = t.keys().collect();
        keys.sort_by_key(|k| k.len());
        for key in keys {
            let own = t[key] == complex.barycenter(key);
            let faces_fixed = key.len() == 1
                || (0..key.len()).all(|i| {
                    let mut f = key.clone();
                    f.remove(i);
                    fixed.contains(&f)
                });
            if own && faces_fixed {
                fixed.insert(key.clone());
            }
        }
        let facets = complex
            .facets()
            .into_iter()
            .map(|k| (k.clone(), complex.simplex(&k)))
            .collect();
        Ok(Arc::new(DeformationMap {
            key: format!("deform#{:016x}", hasher.finish()),
            complex: complex.clone(),
            w,
            t,
            fixed,
            facets,
        }))
    }

    pub fn complex(&self) -> &OrderedComplex {
        &self.complex
    }

    pub fn is_fixed(&self, key: &[usize]) -> bool {
        self.fixed.contains(key)
    }

    pub fn target(&self, key: &[usize]) -> Option<&QPoint> {
        self.t.get(key)
    }

    pub fn region(&self, key: &[usize]) -> Option<&Region> {
        self.w.get(key)
    }

    /// `f` at barycentric `weights` on the face `key` (sorted ids, weights in
    /// the same order).
    pub fn eval_face(&self, key: &[usize], weights: &[Q]) -> QPoint {
        let support: Vec<(usize, Q)> = key
            .iter()
            .zip(weights)
            .filter(|(_, w)| !w.is_zero())
            .map(|(v, w)| (*v, w.clone()))
            .collect();
        let ids: FaceKey = support.iter().map(|(v, _)| *v).collect();
        let lambda: Vec<Q> = support.into_iter().map(|(_, w)| w).collect();
        let pts: Vec<QPoint> = ids.iter().map(|&v| self.complex.point(v).clone()).collect();
        if ids.len() == 1 {
            return pts[0].clone();
        }
        if self.fixed.contains(&ids) {
            return combination(&pts, &lambda);
        }
        let m = lambda.iter().min().cloned().expect("nonempty support");
        let s = m.clone() * Q::from_integer(Int::from(ids.len()));
        let t = &self.t[&ids];
        if s.is_one() {
            return t.clone();
        }
        let rest = Q::one() - s.clone();
        let y: Vec<Q> = lambda
            .iter()
            .map(|l| (l.clone() - m.clone()) / rest.clone())
            .collect();
        self.eval_face(&ids, &y).scale(&rest).add(&t.scale(&s))
    }

    /// Smallest face containing `x`, with barycentric weights on it.
    pub fn locate(&self, x: &QPoint) -> Option<(FaceKey, Vec<Q>)> {
        if let Some(v) = self.complex.vertex_of(x) {
            return Some((vec![v], vec![Q::one()]));
        }
        for (key, pts) in &self.facets {
            if let Some(w) = barycentric(pts, x) {
                if w.iter().all(|c| !c.is_negative()) {
                    let (ids, ws): (Vec<usize>, Vec<Q>) = key
                        .iter()
                        .zip(w)
                        .filter(|(_, c)| !c.is_zero())
                        .map(|(v, c)| (*v, c))
                        .unzip();
                    return Some((ids, ws));
                }
            }
        }
        None
    }

    /// Smallest face containing the hull of `vertices`.
    fn carrier_of(&self, vertices: &[QPoint]) -> Option<FaceKey> {
        let mut union = BTreeSet::new();
        for v in vertices {
            union.extend(self.locate(v)?.0);
        }
        let key: FaceKey = union.into_iter().collect();
        self.complex.contains(&key).then_some(key)
    }

    /// `δ(α) = f ∘ α` for a face given by its ordered vertex coordinates.
    pub fn delta(self: &Arc<Self>, pts: &[QPoint]) -> Result<Simplex> {
        Simplex::mapped(MapRef::new(self.clone()), pts.to_vec())
    }

    /// `δ` on a chain of faces of the complex.
    pub fn delta_chain(self: &Arc<Self>, c: &Chain) -> Result<Chain> {
        let map = MapRef::new(self.clone());
        c.map(|s| match s {
            Simplex::Affine(pts) => Ok(Chain::simplex(Simplex::mapped(map.clone(), pts.clone())?)),
            other => Err(Error::Precondition(format!(
                "δ needs linear faces, got {other:?}"
            ))),
        })
    }

    /// Draws `per_face` random rational points in every face and checks
    /// `f(x) ∈ W(α)`; also checks `f(b(α)) = t(α)`. Returns the first failure.
    pub fn audit(&self, rng: &mut ChaCha8Rng, per_face: usize) -> Option<String> {
        for (key, _) in self.complex.faces() {
            let n = key.len();
            let uniform = vec![Q::new(Int::one(), Int::from(n)); n];
            if self.eval_face(key, &uniform) != self.t[key] {
                return Some(format!("f(b) ≠ t on {key:?}"));
            }
            for _ in 0..per_face {
                let raw: Vec<i64> = (0..n).map(|_| rng.gen_range(1..=16)).collect();
                let total: i64 = raw.iter().sum();
                let w: Vec<Q> = raw
                    .iter()
                    .map(|&r| Q::new(Int::from(r), Int::from(total)))
                    .collect();
                let y = self.eval_face(key, &w);
                if !self.w[key].contains(&y) {
                    return Some(format!("f({w:?}) = {y} escapes W on {key:?}"));
                }
            }
        }
        None
    }
}

impl SimplexMap for DeformationMap {
    fn key(&self) -> String {
        self.key.clone()
    }

    fn eval(&self, x: &QPoint) -> Result<QPoint> {
        let (key, w) = self
            .locate(x)
            .ok_or_else(|| Error::Precondition(format!("{x} is outside the complex")))?;
        Ok(self.eval_face(&key, &w))
    }

    fn eval_on(&self, vertices: &[QPoint], weights: &[Q]) -> Result<QPoint> {
        let ids: Option<Vec<usize>> = vertices.iter().map(|v| self.complex.vertex_of(v)).collect();
        if let Some(ids) = ids {
            let mut pairs: Vec<(usize, Q)> = ids.into_iter().zip(weights.iter().cloned()).collect();
            pairs.sort_by_key(|(v, _)| *v);
            let (key, w): (Vec<usize>, Vec<Q>) = pairs.into_iter().unzip();
            if self.complex.contains(&key) {
                return Ok(self.eval_face(&key, &w));
            }
        }
        self.eval(&combination(vertices, weights))
    }

    fn affine_on(&self, vertices: &[QPoint]) -> bool {
        self.carrier_of(vertices)
            .is_some_and(|k| self.fixed.contains(&k))
    }

    fn enclosure(&self, vertices: &[QPoint]) -> Option<Region> {
        self.carrier_of(vertices).map(|k| self.w[&k].clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Point;
    use crate::q;
    use rand::SeedableRng;

    fn p(x: Q) -> QPoint {
        Point(vec![x])
    }

    fn segment() -> OrderedComplex {
        OrderedComplex::from_simplices([&[p(q(0, 1)), p(q(1, 1))][..]]).unwrap()
    }

    #[test]
    fn identity_covering_gives_inclusion() {
        let k = segment();
        let f = DeformationMap::new(&k, &CompatibleCovering::identity_on(&k)).unwrap();
        let d = f.delta(&[p(q(0, 1)), p(q(1, 1))]).unwrap();
        assert_eq!(d, Simplex::Affine(vec![p(q(0, 1)), p(q(1, 1))]));
        assert_eq!(
            f.delta(&[p(q(1, 1))]).unwrap(),
            Simplex::Affine(vec![p(q(1, 1))])
        );
    }

    #[test]
    fn perturbed_target_hits_barycenter() {
        let k = segment();
        let mut cov = CompatibleCovering::identity_on(&k);
        let top = vec![p(q(0, 1)), p(q(1, 1))];
        cov.insert(top.clone(), Region::Hull(top.clone()), p(q(1, 3)));
        let f = DeformationMap::new(&k, &cov).unwrap();
        let d = f.delta(&top).unwrap();
        assert!(matches!(d, Simplex::Mapped { .. }));
        assert_eq!(d.barycenter().unwrap(), p(q(1, 3)));
        assert_eq!(d.vertex_images().unwrap(), top);
        // piecewise linear: x = 1/4 lies halfway from 0 to b, so maps halfway to t
        assert_eq!(f.eval(&p(q(1, 4))).unwrap(), p(q(1, 6)));
        assert_eq!(
            d.boundary().unwrap(),
            Chain::affine(top).boundary().unwrap()
        );
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        assert!(f.audit(&mut rng, 200).is_none());
    }
}
