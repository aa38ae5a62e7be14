use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::barycenter;
use crate::nesting::{proper_chains, Nesting, Region, Tri};
use crate::simplicial::{subdivide_n, FaceKey, OrderedComplex};
use crate::{QPoint, Q};

/// A face named by its sorted vertex coordinates, so coverings of different
/// complexes can be compared and glued.
pub type FaceId = Vec<QPoint>;

pub fn face_id(complex: &OrderedComplex, key: &[usize]) -> FaceId {
    let mut v = complex.simplex(key);
    v.sort();
    v
}

/// The data attached to one face: a convex region `W` and a target point `t`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cell {
    pub w: Region,
    pub t: QPoint,
}

/// A partial assignment `α ↦ (W(α), t(α))` on the faces of a realized complex.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CompatibleCovering {
    cells: BTreeMap<FaceId, Cell>,
}

impl CompatibleCovering {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, face: FaceId, w: Region, t: QPoint) {
        self.cells.insert(face, Cell { w, t });
    }

    pub fn get(&self, face: &[QPoint]) -> Option<&Cell> {
        self.cells.get(face)
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&FaceId, &Cell)> {
        self.cells.iter()
    }

    /// `W(α) = α`, `t(α) = b(α)` on every face; vertices get `W = {v}`.
    pub fn identity_on(complex: &OrderedComplex) -> Self {
        let mut out = Self::new();
        for (key, _) in complex.faces() {
            let pts = complex.simplex(key);
            out.insert(
                face_id(complex, key),
                Region::Hull(pts.clone()),
                barycenter(&pts),
            );
        }
        out
    }

    /// Union of two coverings that agree on their common faces.
    pub fn glue(&self, other: &CompatibleCovering) -> Result<CompatibleCovering> {
        let mut out = self.clone();
        for (face, cell) in &other.cells {
            match out.cells.get(face) {
                Some(existing) if existing != cell => {
                    return Err(Error::InvalidCovering(format!(
                        "coverings disagree on {}",
                        show_face(face)
                    )));
                }
                Some(_) => {}
                None => {
                    out.cells.insert(face.clone(), cell.clone());
                }
            }
        }
        Ok(out)
    }

    /// Whether `t(β) = b(β)` on `face` and every face of it that is covered.
    pub fn is_identity_on(&self, face: &[QPoint]) -> bool {
        let n = face.len();
        (1u32..(1 << n)).all(|m| {
            let sub: Vec<QPoint> = (0..n)
                .filter(|i| m >> i & 1 == 1)
                .map(|i| face[i].clone())
                .collect();
            self.cells.get(&sub).is_none_or(|c| c.t == barycenter(&sub))
        })
    }
}

fn show_face(face: &[QPoint]) -> String {
    let parts: Vec<String> = face.iter().map(|p| p.to_string()).collect();
    format!("[{}]", parts.join(", "))
}

/// Which requirement of a compatible covering failed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum CoveringCondition {
    /// The covering names a face the complex does not have.
    Domain,
    /// `α ⊆ W(α)` or `t(α) ∈ W(α)` fails.
    Contains,
    /// A vertex with `t(v) ≠ v`.
    VertexPinned,
    /// Monotonicity: `β ⊆ α` but `W(β) ⊄ W(α)`.
    Monotone,
    /// Nesting containment: `W(α_1) ⊄ η(t(α_1), …, t(α_k))` for a chain.
    Nested,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CoveringViolation {
    pub condition: CoveringCondition,
    /// The faces involved, smallest first.
    pub chain: Vec<String>,
    pub detail: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct CoveringVerdict {
    pub faces: usize,
    pub pairs: usize,
    pub chains: usize,
    pub violation: Option<CoveringViolation>,
}

impl CoveringVerdict {
    pub fn passed(&self) -> bool {
        self.violation.is_none()
    }
}

fn decide(t: Tri, what: impl FnOnce() -> String) -> Result<bool> {
    match t {
        Tri::Yes => Ok(true),
        Tri::No => Ok(false),
        Tri::Unknown => Err(Error::Undecidable(what())),
    }
}

/// Checks every requirement exactly over the covered faces of `complex`.
///
/// Nesting containment is checked on strict chains; the non-strict ones follow from
/// the monotonicity axiom of the nesting.
pub fn validate_covering<N: Nesting<Point = QPoint>>(
    complex: &OrderedComplex,
    eta: &N,
    covering: &CompatibleCovering,
) -> Result<CoveringVerdict> {
    let by_id: HashMap<FaceId, FaceKey> = complex
        .faces()
        .map(|(k, _)| (face_id(complex, k), k.clone()))
        .collect();
    let mut verdict = CoveringVerdict {
        faces: covering.len(),
        ..Default::default()
    };
    let fail = |mut v: CoveringVerdict, condition, chain: Vec<&FaceId>, detail: String| {
        v.violation = Some(CoveringViolation {
            condition,
            chain: chain.into_iter().map(|f| show_face(f)).collect(),
            detail,
        });
        Ok(v)
    };

    let mut keyed: BTreeMap<FaceKey, (&FaceId, &Cell)> = BTreeMap::new();
    for (face, cell) in covering.iter() {
        let Some(key) = by_id.get(face) else {
            return fail(
                verdict,
                CoveringCondition::Domain,
                vec![face],
                "face not in complex".into(),
            );
        };
        if !cell.w.is_convex() {
            return Err(Error::Undecidable(format!(
                "non-convex W on {}",
                show_face(face)
            )));
        }
        keyed.insert(key.clone(), (face, cell));
    }

    for (key, (face, cell)) in &keyed {
        if key.len() == 1 && cell.t != face[0] {
            return fail(
                verdict,
                CoveringCondition::VertexPinned,
                vec![face],
                format!("t = {}", cell.t),
            );
        }
        let inside = cell.w.contains(&cell.t)
            && decide(cell.w.contains_hull(face), || {
                format!("{} in {:?}", show_face(face), cell.w)
            })?;
        if !inside {
            return fail(
                verdict,
                CoveringCondition::Contains,
                vec![face],
                format!("W = {:?}, t = {}", cell.w, cell.t),
            );
        }
    }

    for (key, (face, cell)) in &keyed {
        let n = key.len();
        for m in 1u32..(1 << n) - 1 {
            let sub: FaceKey = (0..n).filter(|i| m >> i & 1 == 1).map(|i| key[i]).collect();
            if let Some((sub_face, sub_cell)) = keyed.get(&sub) {
                verdict.pairs += 1;
                let ok = decide(sub_cell.w.subset_of(&cell.w), || {
                    format!("{:?} ⊆ {:?}", sub_cell.w, cell.w)
                })?;
                if !ok {
                    let detail = format!("{:?} ⊄ {:?}", sub_cell.w, cell.w);
                    return fail(
                        verdict,
                        CoveringCondition::Monotone,
                        vec![sub_face, face],
                        detail,
                    );
                }
            }
        }
    }

    let mut chain_shapes: BTreeMap<usize, Vec<Vec<Vec<usize>>>> = BTreeMap::new();
    let mut regions: HashMap<Vec<QPoint>, Region> = HashMap::new();
    for key in keyed.keys() {
        let shapes = chain_shapes
            .entry(key.len() - 1)
            .or_insert_with(|| proper_chains(key.len() - 1));
        'chains: for shape in shapes.iter() {
            let mut members = Vec::with_capacity(shape.len());
            for positions in shape {
                let sub: FaceKey = positions.iter().map(|&i| key[i]).collect();
                match keyed.get(&sub) {
                    Some(entry) => members.push(*entry),
                    None => continue 'chains,
                }
            }
            verdict.chains += 1;
            let seq: Vec<QPoint> = members.iter().map(|(_, c)| c.t.clone()).collect();
            let region = match regions.get(&seq) {
                Some(r) => r.clone(),
                None => {
                    let r = eta.eval(&seq)?;
                    regions.insert(seq.clone(), r.clone());
                    r
                }
            };
            let w1 = &members[0].1.w;
            let ok = decide(w1.subset_of(&region), || format!("{w1:?} ⊆ {region:?}"))?;
            if !ok {
                let faces = members.iter().map(|(f, _)| *f).collect();
                return fail(
                    verdict,
                    CoveringCondition::Nested,
                    faces,
                    format!("{w1:?} ⊄ {region:?}"),
                );
            }
        }
    }
    Ok(verdict)
}

/// Covering of a subdivision `sub` of `base`: faces whose carrier in `base`
/// is seeded take the seed's cell, all other faces get `(α, b(α))`. Vertices
/// always get `({v}, v)`.
pub fn seeded_covering(
    base: &OrderedComplex,
    sub: &OrderedComplex,
    seed: Option<&CompatibleCovering>,
) -> CompatibleCovering {
    let mut out = CompatibleCovering::new();
    for (key, _) in sub.faces() {
        let pts = sub.simplex(key);
        let id = face_id(sub, key);
        if pts.len() == 1 {
            out.insert(id, Region::Hull(pts.clone()), pts[0].clone());
            continue;
        }
        let carrier: Vec<usize> = sub.face_carrier(key).into_iter().collect();
        let seeded = seed.and_then(|s| s.get(&face_id(base, &carrier)));
        match seeded {
            Some(cell) => out.insert(id, cell.w.clone(), cell.t.clone()),
            None => out.insert(id, Region::Hull(pts.clone()), barycenter(&pts)),
        }
    }
    out
}

/// Result of the subdivision search.
#[derive(Clone, Debug)]
pub struct SubdivisionCovering {
    pub n: usize,
    /// `S^n(K)`, vertex carriers relative to `K`.
    pub complex: OrderedComplex,
    pub covering: CompatibleCovering,
    pub verdict: CoveringVerdict,
    pub mesh2: Q,
}

/// Smallest `n ≤ cap_n` for which the seeded covering of `S^n(K)` validates.
///
/// Unseeded faces use `W(α) = α` and `t(α) = b(α)`, so without a seed the
/// search returns the first `n` with `S^n(K) ⊆ C^η` and the deformation it
/// induces is the identity.
pub fn find_subdivision_covering<N: Nesting<Point = QPoint>>(
    base: &OrderedComplex,
    eta: &N,
    seed: Option<&CompatibleCovering>,
    cap_n: usize,
) -> Result<SubdivisionCovering> {
    if let Some(seed) = seed {
        let seeded: BTreeSet<FaceKey> = base
            .faces()
            .filter(|(k, _)| seed.get(&face_id(base, k)).is_some())
            .map(|(k, _)| k.clone())
            .collect();
        for key in &seeded {
            for (other, _) in base.faces() {
                if key.iter().all(|v| other.contains(v)) && !seeded.contains(other) {
                    return Err(Error::Precondition(format!(
                        "seed is not upwards closed at {key:?}"
                    )));
                }
            }
        }
    }
    let mut complex = base.clone();
    let mut last = None;
    for n in 0..=cap_n {
        complex = subdivide_n(base, n)?;
        let covering = seeded_covering(base, &complex, seed);
        let verdict = validate_covering(&complex, eta, &covering)?;
        if verdict.passed() {
            return Ok(SubdivisionCovering {
                n,
                mesh2: complex.mesh2(),
                complex,
                covering,
                verdict,
            });
        }
        last = verdict.violation;
    }
    Err(Error::Budget(format!(
        "no compatible covering up to n = {cap_n}; mesh² {} ; last violation {:?}",
        complex.mesh2(),
        last
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nesting::PlNesting;
    use crate::{q, Int};

    fn pt(c: &[i64]) -> QPoint {
        crate::geometry::Point(c.iter().map(|&x| Q::from_integer(Int::from(x))).collect())
    }

    #[test]
    fn single_vertex_passes() {
        let mut k = OrderedComplex::new();
        k.add_simplex(&[pt(&[0, 0])]).unwrap();
        let mut cov = CompatibleCovering::new();
        cov.insert(
            vec![pt(&[0, 0])],
            Region::ball(pt(&[0, 0]), q(1, 16)),
            pt(&[0, 0]),
        );
        let eta = PlNesting::balls(q(1, 4)).unwrap();
        assert!(validate_covering(&k, &eta, &cov).unwrap().passed());
    }

    #[test]
    fn planted_monotone_defect() {
        let seg = [pt(&[0]), pt(&[1])];
        let k = OrderedComplex::from_simplices([&seg[..]]).unwrap();
        let mut cov = CompatibleCovering::identity_on(&k);
        cov.insert(
            vec![pt(&[0])],
            Region::Hull(vec![pt(&[-1]), pt(&[0])]),
            pt(&[0]),
        );
        let verdict = validate_covering(&k, &PlNesting::Ambient, &cov).unwrap();
        let v = verdict.violation.unwrap();
        assert_eq!(v.condition, CoveringCondition::Monotone);
        assert_eq!(v.chain.len(), 2);
    }

    #[test]
    fn search_on_vertex_and_segment() {
        let k0 = OrderedComplex::from_simplices([&[pt(&[0])][..]]).unwrap();
        let eta = PlNesting::balls(q(1, 100)).unwrap();
        assert_eq!(find_subdivision_covering(&k0, &eta, None, 3).unwrap().n, 0);

        let k1 = OrderedComplex::from_simplices([&[pt(&[0]), pt(&[1])][..]]).unwrap();
        let cover = PlNesting::ball_cover(vec![
            (pt(&[0]), q(9, 64)),
            (crate::geometry::Point(vec![q(1, 2)]), q(9, 64)),
            (pt(&[1]), q(9, 64)),
        ])
        .unwrap();
        let found = find_subdivision_covering(&k1, &cover, None, 4).unwrap();
        assert_eq!(found.n, 2);
        assert_eq!(found.mesh2, q(1, 16));
    }

    #[test]
    fn glued_triangles_pass() {
        let a = [pt(&[0, 0]), pt(&[1, 0]), pt(&[0, 1])];
        let b = [pt(&[1, 0]), pt(&[0, 1]), pt(&[1, 1])];
        let ka = OrderedComplex::from_simplices([&a[..]]).unwrap();
        let kb = OrderedComplex::from_simplices([&b[..]]).unwrap();
        let both = OrderedComplex::from_simplices([&a[..], &b[..]]).unwrap();
        let cov = CompatibleCovering::identity_on(&ka)
            .glue(&CompatibleCovering::identity_on(&kb))
            .unwrap();
        let verdict = validate_covering(&both, &PlNesting::balls(q(4, 1)).unwrap(), &cov).unwrap();
        assert!(verdict.passed());
        assert_eq!(verdict.faces, both.face_count());
    }

    #[test]
    fn gluing_rejects_disagreement() {
        let a = [pt(&[0]), pt(&[1])];
        let ka = OrderedComplex::from_simplices([&a[..]]).unwrap();
        let mut other = CompatibleCovering::identity_on(&ka);
        other.insert(vec![pt(&[0]), pt(&[1])], Region::Hull(a.to_vec()), pt(&[0]));
        assert!(CompatibleCovering::identity_on(&ka).glue(&other).is_err());
    }
}
