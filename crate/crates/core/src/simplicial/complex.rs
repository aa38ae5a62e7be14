use std::collections::{BTreeMap, BTreeSet};

use crate::algebra::{ChainComplex, Matrix};
use crate::error::{Error, Result};
use crate::geometry::{affinely_independent, barycenter, diameter2, Point};
use crate::{Int, QPoint, Q};

/// Sorted vertex ids identifying a face.
pub type FaceKey = Vec<usize>;

/// A finite simplicial complex whose faces carry vertex orderings, together
/// with exact rational coordinates for its vertices.
///
/// Faces are keyed by their sorted vertex ids; the stored ordering of every
/// face restricts to the stored ordering of each of its subfaces.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrderedComplex {
    points: Vec<QPoint>,
    labels: Vec<String>,
    index: BTreeMap<QPoint, usize>,
    faces: BTreeMap<FaceKey, Vec<usize>>,
    /// Per vertex: ids, in some base complex, of the smallest base face
    /// containing the vertex. Defaults to the vertex itself.
    carriers: Vec<BTreeSet<usize>>,
}

impl Default for OrderedComplex {
    fn default() -> Self {
        Self::new()
    }
}

impl OrderedComplex {
    pub fn new() -> Self {
        OrderedComplex {
            points: Vec::new(),
            labels: Vec::new(),
            index: BTreeMap::new(),
            faces: BTreeMap::new(),
            carriers: Vec::new(),
        }
    }

    /// The standard `k`-simplex on the basis vectors of `Q^{k+1}`.
    pub fn standard_simplex(k: usize) -> Self {
        let pts: Vec<QPoint> = (0..=k).map(|i| Point::unit(k + 1, i)).collect();
        let mut c = Self::new();
        c.add_simplex(&pts)
            .expect("basis vectors are affinely independent");
        c
    }

    /// Builds the closure of the given ordered simplices.
    pub fn from_simplices<'a, I: IntoIterator<Item = &'a [QPoint]>>(simplices: I) -> Result<Self> {
        let mut c = Self::new();
        for s in simplices {
            c.add_simplex(s)?;
        }
        Ok(c)
    }

    /// Returns the id of `p`, adding it as a new vertex if needed.
    pub fn vertex(&mut self, p: &QPoint) -> usize {
        if let Some(&i) = self.index.get(p) {
            return i;
        }
        let i = self.points.len();
        self.points.push(p.clone());
        self.labels.push(i.to_string());
        self.index.insert(p.clone(), i);
        self.carriers.push(BTreeSet::from([i]));
        i
    }

    /// Adds an ordered simplex and all of its faces with induced orderings.
    pub fn add_simplex(&mut self, pts: &[QPoint]) -> Result<FaceKey> {
        if pts.is_empty() {
            return Err(Error::Dimension("empty simplex".into()));
        }
        if !affinely_independent(pts) {
            return Err(Error::AffineDegeneracy(format!("{pts:?}")));
        }
        let ids: Vec<usize> = pts.iter().map(|p| self.vertex(p)).collect();
        self.add_ordered_ids(&ids)
    }

    /// Adds a face given by ordered vertex ids (and its faces).
    pub fn add_ordered_ids(&mut self, ids: &[usize]) -> Result<FaceKey> {
        let n = ids.len();
        let mut pending = Vec::new();
        for mask in 1u64..(1u64 << n) {
            let order: Vec<usize> = (0..n)
                .filter(|i| mask >> i & 1 == 1)
                .map(|i| ids[i])
                .collect();
            let mut key = order.clone();
            key.sort_unstable();
            if key.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::AffineDegeneracy(format!(
                    "repeated vertex in {ids:?}"
                )));
            }
            match self.faces.get(&key) {
                Some(existing) if *existing != order => {
                    return Err(Error::IncompatibleOrdering(key))
                }
                Some(_) => {}
                None => pending.push((key, order)),
            }
        }
        for (k, o) in pending {
            self.faces.insert(k, o);
        }
        let mut key = ids.to_vec();
        key.sort_unstable();
        Ok(key)
    }

    pub fn set_label(&mut self, v: usize, label: impl Into<String>) {
        self.labels[v] = label.into();
    }

    pub fn set_carrier(&mut self, v: usize, carrier: BTreeSet<usize>) {
        self.carriers[v] = carrier;
    }

    pub fn label(&self, v: usize) -> &str {
        &self.labels[v]
    }

    pub fn point(&self, v: usize) -> &QPoint {
        &self.points[v]
    }

    pub fn points(&self) -> &[QPoint] {
        &self.points
    }

    pub fn vertex_of(&self, p: &QPoint) -> Option<usize> {
        self.index.get(p).copied()
    }

    pub fn carrier(&self, v: usize) -> &BTreeSet<usize> {
        &self.carriers[v]
    }

    /// Union of vertex carriers: the smallest base face containing the face.
    pub fn face_carrier(&self, key: &[usize]) -> BTreeSet<usize> {
        key.iter()
            .flat_map(|&v| self.carriers[v].iter().copied())
            .collect()
    }

    pub fn vertex_count(&self) -> usize {
        self.points.len()
    }

    pub fn face_count(&self) -> usize {
        self.faces.len()
    }

    pub fn dimension(&self) -> Option<usize> {
        self.faces.keys().map(|k| k.len() - 1).max()
    }

    pub fn contains(&self, key: &[usize]) -> bool {
        self.faces.contains_key(key)
    }

    pub fn ordering(&self, key: &[usize]) -> Option<&[usize]> {
        self.faces.get(key).map(|v| v.as_slice())
    }

    /// All faces as `(key, ordering)` in key order.
    pub fn faces(&self) -> impl Iterator<Item = (&FaceKey, &Vec<usize>)> {
        self.faces.iter()
    }

    /// Faces of dimension `d`, in key order.
    pub fn faces_of_dim(&self, d: usize) -> Vec<FaceKey> {
        self.faces
            .keys()
            .filter(|k| k.len() == d + 1)
            .cloned()
            .collect()
    }

    /// Faces not contained in any larger face.
    pub fn facets(&self) -> Vec<FaceKey> {
        let mut covered = BTreeSet::new();
        for key in self.faces.keys() {
            for i in 0..key.len() {
                if key.len() > 1 {
                    let mut sub = key.clone();
                    sub.remove(i);
                    covered.insert(sub);
                }
            }
        }
        self.faces
            .keys()
            .filter(|k| !covered.contains(*k))
            .cloned()
            .collect()
    }

    /// Coordinates of a face in its stored order.
    pub fn simplex(&self, key: &[usize]) -> Vec<QPoint> {
        self.faces[key]
            .iter()
            .map(|&v| self.points[v].clone())
            .collect()
    }

    pub fn barycenter(&self, key: &[usize]) -> QPoint {
        barycenter(&self.simplex(key))
    }

    pub fn diameter2(&self, key: &[usize]) -> Q {
        diameter2(&self.simplex(key))
    }

    /// Largest squared facet diameter.
    pub fn mesh2(&self) -> Q {
        self.facets()
            .iter()
            .map(|f| self.diameter2(f))
            .max()
            .unwrap_or_else(|| Q::from_integer(0.into()))
    }

    /// Rechecks closure under faces, ordering compatibility and affine
    /// independence of every face.
    pub fn validate(&self) -> Result<()> {
        for (key, order) in &self.faces {
            let mut sorted = order.clone();
            sorted.sort_unstable();
            if &sorted != key {
                return Err(Error::IncompatibleOrdering(key.clone()));
            }
            if !affinely_independent(&self.simplex(key)) {
                return Err(Error::AffineDegeneracy(format!("face {key:?}")));
            }
            for i in 0..order.len() {
                if order.len() == 1 {
                    break;
                }
                let mut sub_order = order.clone();
                sub_order.remove(i);
                let mut sub = sub_order.clone();
                sub.sort_unstable();
                match self.faces.get(&sub) {
                    Some(o) if *o == sub_order => {}
                    Some(_) => return Err(Error::IncompatibleOrdering(sub)),
                    None => {
                        return Err(Error::Dimension(format!("face {sub:?} of {key:?} missing")))
                    }
                }
            }
        }
        Ok(())
    }

    /// Index of each face within its dimension, in key order.
    pub fn face_indices(&self) -> BTreeMap<FaceKey, usize> {
        let mut counters: BTreeMap<usize, usize> = BTreeMap::new();
        let mut out = BTreeMap::new();
        for key in self.faces.keys() {
            let c = counters.entry(key.len()).or_insert(0);
            out.insert(key.clone(), *c);
            *c += 1;
        }
        out
    }

    /// Simplicial chain complex `C_0 .. C_dim` with the stored orientations.
    pub fn chain_complex(&self) -> ChainComplex<Int> {
        let dim = self.dimension().unwrap_or(0);
        let idx = self.face_indices();
        let ranks: Vec<usize> = (0..=dim).map(|d| self.faces_of_dim(d).len()).collect();
        let mut boundaries = vec![Matrix::zeros(0, ranks[0])];
        for d in 1..=dim {
            let mut m = Matrix::zeros(ranks[d - 1], ranks[d]);
            for key in self.faces_of_dim(d) {
                let order = &self.faces[&key];
                let col = idx[&key];
                for i in 0..order.len() {
                    let mut sub = order.clone();
                    sub.remove(i);
                    sub.sort_unstable();
                    let sign = if i % 2 == 0 { 1 } else { -1 };
                    m.set(idx[&sub], col, Int::from(sign));
                }
            }
            boundaries.push(m);
        }
        ChainComplex::new(0, ranks, boundaries).expect("simplicial boundary squares to zero")
    }

    /// Subcomplex of faces satisfying `keep` (must be closed under faces).
    pub fn subcomplex<F: Fn(&[usize]) -> bool>(&self, keep: F) -> Result<Self> {
        let mut out = Self::new();
        for (key, order) in &self.faces {
            if keep(key) {
                let pts: Vec<QPoint> = order.iter().map(|&v| self.points[v].clone()).collect();
                out.add_simplex(&pts)?;
            }
        }
        for v in 0..out.points.len() {
            let orig = self.index[&out.points[v]];
            out.labels[v] = self.labels[orig].clone();
            out.carriers[v] = self.carriers[orig].clone();
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Coefficients;

    #[test]
    fn standard_simplex_faces() {
        let d2 = OrderedComplex::standard_simplex(2);
        assert_eq!(d2.face_count(), 7);
        assert_eq!(d2.facets(), vec![vec![0, 1, 2]]);
        d2.validate().unwrap();
        assert_eq!(d2.mesh2(), Q::from_integer(2.into()));
    }

    #[test]
    fn hollow_triangle_cohomology() {
        let d2 = OrderedComplex::standard_simplex(2);
        let hollow = d2.subcomplex(|k| k.len() < 3).unwrap();
        let h = hollow
            .chain_complex()
            .cohomology(&Coefficients::Integers, 1)
            .unwrap();
        assert_eq!(h.free_rank, 1);
    }

    #[test]
    fn incompatible_order_rejected() {
        let mut c = OrderedComplex::new();
        let p = |x: i64| Point(vec![Q::from_integer(x.into())]);
        c.add_simplex(&[p(0), p(1)]).unwrap();
        assert!(matches!(
            c.add_simplex(&[p(1), p(0)]),
            Err(Error::IncompatibleOrdering(_))
        ));
        assert!(matches!(
            c.add_simplex(&[p(0), p(1), p(2)]),
            Err(Error::AffineDegeneracy(_))
        ));
    }
}
