use std::collections::BTreeSet;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::geometry::{barycenter, AffineMap, Point};
use crate::homotopy::covering::{face_id, validate_covering, CompatibleCovering, CoveringVerdict};
use crate::nesting::{in_c_eta, PlNesting, Region};
use crate::simplicial::{prism_t, subdivide_n, Operators, OrderedComplex, Simplex};
use crate::{QPoint, Q};

/// Size limits for the simplex retraction and the homotopy calculus.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct Caps {
    /// Largest simplex dimension.
    pub k: usize,
    /// Largest number of subdivisions.
    pub n: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps { k: 3, n: 6 }
    }
}

impl Caps {
    pub fn check_k(&self, k: usize) -> Result<()> {
        if k > self.k {
            return Err(Error::CapExceeded(format!(
                "simplex dimension {k} > cap {}",
                self.k
            )));
        }
        Ok(())
    }
}

/// Vertex `i` of the standard simplex in `Q^{k+1}`.
pub fn corner(k: usize, i: usize) -> QPoint {
    Point::unit(k + 1, i)
}

/// The faces of `Δ^k` lying in `C^η`, as a subcomplex of the standard simplex.
pub fn accepted_faces(k: usize, eta: &PlNesting) -> Result<OrderedComplex> {
    let full = OrderedComplex::standard_simplex(k);
    let mut keep = BTreeSet::new();
    for (key, _) in full.faces() {
        if in_c_eta(&Simplex::Affine(full.simplex(key)), eta)? {
            keep.insert(key.clone());
        }
    }
    full.subcomplex(|key| keep.contains(key))
}

/// The complexes around the mapping cylinder of `K ⊆ Δ^k`, all realized in
/// `Q^{k+2}` with the last coordinate as the cylinder height.
#[derive(Clone, Debug)]
pub struct Cylinder {
    pub k: usize,
    pub n: usize,
    /// `K ⊆ Δ^k ⊂ Q^{k+1}`.
    pub base: OrderedComplex,
    /// `Δ^k × {0}` glued to `P(K)` on `[0, 1]`.
    pub l: OrderedComplex,
    /// `S^n(L)`, vertex carriers relative to `l`.
    pub sub_l: OrderedComplex,
    /// `T_n(K)` on `[1, 2]`.
    pub tn: OrderedComplex,
    /// `S^n(L) ∪ T_n(K)`.
    pub complex: OrderedComplex,
    /// Projection forgetting the height.
    pub q: AffineMap<Q>,
    /// The pulled back nesting `q^*η`.
    pub eta: PlNesting,
}

fn level(p: &QPoint) -> &Q {
    p.0.last().expect("nonempty point")
}

/// Indices of the standard simplex face carrying the projection of `p`.
fn support(p: &QPoint) -> impl Iterator<Item = usize> + '_ {
    p.0[..p.dim() - 1]
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(i, _)| i)
}

/// Builds `L`, `S^n(L)`, `T_n(K)` and their union `L'_n`.
pub fn mapping_cylinder(k: usize, eta: &PlNesting, n: usize, caps: &Caps) -> Result<Cylinder> {
    caps.check_k(k)?;
    if n == 0 || n > caps.n {
        return Err(Error::CapExceeded(format!(
            "cylinder needs 1 <= n <= {}, got {n}",
            caps.n
        )));
    }
    let base = accepted_faces(k, eta)?;
    let zero = Q::zero();
    let one = Q::one();
    let two = one.clone() + one.clone();
    let mut simplices: Vec<Vec<QPoint>> =
        vec![(0..=k).map(|i| corner(k, i).extend(zero.clone())).collect()];
    for key in base.facets() {
        for (s, _) in Operators::prism_p_simplex(&base.simplex(&key), &zero, &one).terms() {
            if let Simplex::Affine(v) = s {
                simplices.push(v.clone());
            }
        }
    }
    let l = OrderedComplex::from_simplices(simplices.iter().map(|v| v.as_slice()))?;
    let sub_l = subdivide_n(&l, n)?;
    let tn = if base.face_count() == 0 {
        OrderedComplex::new()
    } else {
        prism_t(&base, n, &one, &two)?.complex
    };
    let mut complex = OrderedComplex::new();
    for part in [&sub_l, &tn] {
        for key in part.facets() {
            complex.add_simplex(&part.simplex(&key))?;
        }
    }
    let q = AffineMap::drop_last(k + 2);
    let eta = PlNesting::pullback(q.clone(), eta.clone());
    Ok(Cylinder {
        k,
        n,
        base,
        l,
        sub_l,
        tn,
        complex,
        q,
        eta,
    })
}

/// The cell `(φ × [0, 2], (b(φ), height))` for a face `φ` of `K`.
fn prism_cell(k: usize, phi: &BTreeSet<usize>, height: Q) -> (Region, QPoint) {
    let corners: Vec<QPoint> = phi.iter().map(|&i| corner(k, i)).collect();
    let two = Q::one() + Q::one();
    let mut hull: Vec<QPoint> = corners.iter().map(|c| c.extend(Q::zero())).collect();
    hull.extend(corners.iter().map(|c| c.extend(two.clone())));
    (Region::Hull(hull), barycenter(&corners).extend(height))
}

impl Cylinder {
    /// Cells on `S^n(L)` and on `T_n(K)`, separately: prism cells on every
    /// face of `S^n(L)` whose carrier in `L` meets height 1 and on every face
    /// of `T_n(K)`, `(α, b(α))` on the rest of `S^n(L)`, `({v}, v)` on
    /// vertices.
    pub fn part_coverings(&self) -> (CompatibleCovering, CompatibleCovering) {
        let one = Q::one();
        let mut left = CompatibleCovering::new();
        for (key, _) in self.sub_l.faces() {
            let pts = self.sub_l.simplex(key);
            let id = face_id(&self.sub_l, key);
            if pts.len() == 1 {
                left.insert(id, Region::Hull(pts.clone()), pts[0].clone());
                continue;
            }
            let carrier: Vec<usize> = self.sub_l.face_carrier(key).into_iter().collect();
            let beta = self.l.simplex(&carrier);
            if beta.iter().any(|p| level(p) == &one) {
                let phi: BTreeSet<usize> = beta.iter().flat_map(support).collect();
                let (w, t) = prism_cell(self.k, &phi, level(&barycenter(&beta)).clone());
                left.insert(id, w, t);
            } else {
                left.insert(id, Region::Hull(pts.clone()), barycenter(&pts));
            }
        }
        let mut right = CompatibleCovering::new();
        for (key, _) in self.tn.faces() {
            let pts = self.tn.simplex(key);
            let id = face_id(&self.tn, key);
            if pts.len() == 1 {
                right.insert(id, Region::Hull(pts.clone()), pts[0].clone());
                continue;
            }
            let phi: BTreeSet<usize> = pts.iter().flat_map(support).collect();
            let (w, t) = prism_cell(self.k, &phi, level(&barycenter(&pts)).clone());
            right.insert(id, w, t);
        }
        (left, right)
    }

    /// The two part coverings glued along the seam at height 1; faces of
    /// `K × {2}` get `t = b`.
    pub fn covering(&self) -> Result<CompatibleCovering> {
        let (left, right) = self.part_coverings();
        left.glue(&right)
    }
}

/// A validated covering of `L'_n`.
#[derive(Clone, Debug)]
pub struct CylinderCovering {
    pub cylinder: Cylinder,
    pub covering: CompatibleCovering,
    pub verdict: CoveringVerdict,
}

/// Smallest `n` in `1..=caps.n` for which the cylinder covering validates
/// against `q^*η`.
pub fn cylinder_covering(k: usize, eta: &PlNesting, caps: &Caps) -> Result<CylinderCovering> {
    let mut last = None;
    for n in 1..=caps.n {
        let cylinder = mapping_cylinder(k, eta, n, caps)?;
        let covering = cylinder.covering()?;
        let verdict = validate_covering(&cylinder.complex, &cylinder.eta, &covering)?;
        if verdict.passed() {
            return Ok(CylinderCovering {
                cylinder,
                covering,
                verdict,
            });
        }
        last = verdict.violation;
    }
    Err(Error::Budget(format!(
        "no cylinder covering up to n = {}; last violation {last:?}",
        caps.n
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::q;

    #[test]
    fn vertex_cylinder() {
        let c = mapping_cylinder(0, &PlNesting::Ambient, 1, &Caps::default()).unwrap();
        assert_eq!(c.base.face_count(), 1);
        assert_eq!(c.l.face_count(), 3);
        let found = cylinder_covering(0, &PlNesting::Ambient, &Caps::default()).unwrap();
        assert_eq!(found.cylinder.n, 1);
        assert!(found.verdict.passed());
        let top = vec![Point(vec![q(1, 1), q(2, 1)])];
        assert_eq!(found.covering.get(&top).unwrap().t, top[0]);
    }

    #[test]
    fn segment_face_counts() {
        let c = mapping_cylinder(1, &PlNesting::Ambient, 1, &Caps::default()).unwrap();
        let l_ids: BTreeSet<_> = c.sub_l.faces().map(|(k, _)| face_id(&c.sub_l, k)).collect();
        let shared =
            c.tn.faces()
                .filter(|(k, _)| l_ids.contains(&face_id(&c.tn, k)))
                .count();
        assert_eq!(
            c.complex.face_count(),
            c.sub_l.face_count() + c.tn.face_count() - shared
        );
        // S^1 of the segment at height 1: 3 vertices and 2 edges
        assert_eq!(shared, 5);
        assert!(c.covering().is_ok());
    }

    #[test]
    fn ball_nesting_segment_pins_top() {
        let eta = PlNesting::balls(q(1, 1)).unwrap();
        let found = cylinder_covering(1, &eta, &Caps::default()).unwrap();
        let two = q(2, 1);
        for (id, cell) in found.covering.iter() {
            if id.iter().all(|p| level(p) == &two) {
                assert_eq!(cell.t, barycenter(id));
            }
        }
    }
}
