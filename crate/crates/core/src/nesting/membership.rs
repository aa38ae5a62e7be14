use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::nesting::{Nesting, Region, Tri};
use crate::simplicial::{Chain, Operators, OrderedComplex, Simplex};
use crate::{QPoint, Q};

/// A convex region known to contain the image of `s`.
pub fn enclosure(s: &Simplex) -> Region {
    match s {
        Simplex::Affine(v) => Region::Hull(v.clone()),
        Simplex::Mapped { map, vertices } => map.enclosure(vertices).unwrap_or(Region::Ambient),
        Simplex::Cone { apex, base } => match enclosure(base) {
            Region::Hull(mut pts) => {
                pts.push(apex.clone());
                Region::Hull(pts)
            }
            r if r.is_convex() && r != Region::Ambient && r.contains(apex) => r,
            _ => Region::Ambient,
        },
    }
}

/// Whether the image of `s` lies in `r`: exact for linear simplices and
/// convex regions, otherwise settled by the enclosure certificate or by a
/// vertex escaping `r`, else `Unknown`.
pub fn simplex_in_region(s: &Simplex, r: &Region) -> Result<Tri> {
    if let Simplex::Affine(v) = s {
        return Ok(r.contains_hull(v));
    }
    if r.is_convex() && enclosure(s).subset_of(r) == Tri::Yes {
        return Ok(Tri::Yes);
    }
    let vertices = s.vertex_images()?;
    if vertices.iter().any(|p| !r.contains(p)) || !r.contains(&s.barycenter()?) {
        return Ok(Tri::No);
    }
    Ok(Tri::Unknown)
}

struct Faces<'a> {
    sigma: &'a Simplex,
    cache: BTreeMap<Vec<usize>, (Simplex, QPoint)>,
}

impl<'a> Faces<'a> {
    fn new(sigma: &'a Simplex) -> Self {
        Faces {
            sigma,
            cache: BTreeMap::new(),
        }
    }

    fn get(&mut self, keep: &[usize]) -> Result<&(Simplex, QPoint)> {
        if !self.cache.contains_key(keep) {
            let f = self.sigma.sub_face(keep)?;
            let b = f.barycenter()?;
            self.cache.insert(keep.to_vec(), (f, b));
        }
        Ok(&self.cache[keep])
    }
}

fn subsets(n: usize) -> Vec<Vec<usize>> {
    (1u32..(1 << n))
        .map(|m| (0..n).filter(|i| m >> i & 1 == 1).collect())
        .collect()
}

fn is_subset(a: &[usize], b: &[usize]) -> bool {
    a.iter().all(|x| b.contains(x))
}

/// Strict chains `σ_1 ⊊ … ⊊ σ_m = σ` as lists of vertex-position sets.
pub fn proper_chains(dim: usize) -> Vec<Vec<Vec<usize>>> {
    let full: Vec<usize> = (0..=dim).collect();
    let all = subsets(dim + 1);
    let mut out = Vec::new();
    let mut stack = vec![vec![full]];
    while let Some(chain) = stack.pop() {
        let bottom = chain[0].clone();
        for s in &all {
            if s.len() < bottom.len() && is_subset(s, &bottom) {
                let mut c = vec![s.clone()];
                c.extend(chain.iter().cloned());
                stack.push(c);
            }
        }
        out.push(chain);
    }
    out.sort();
    out
}

/// Non-strict chains `σ_1 ⊆ … ⊆ σ_m ⊆ σ` with `m <= max_len`.
pub fn all_chains(dim: usize, max_len: usize) -> Vec<Vec<Vec<usize>>> {
    let all = subsets(dim + 1);
    let mut out = Vec::new();
    let mut frontier: Vec<Vec<Vec<usize>>> = all.iter().map(|s| vec![s.clone()]).collect();
    for _ in 0..max_len {
        let mut next = Vec::new();
        for c in &frontier {
            let top = c.last().unwrap();
            for s in &all {
                if is_subset(top, s) {
                    let mut d = c.clone();
                    d.push(s.clone());
                    next.push(d);
                }
            }
        }
        out.append(&mut frontier);
        frontier = next;
    }
    out
}

fn chains_hold<N: Nesting<Point = QPoint>>(
    sigma: &Simplex,
    eta: &N,
    chains: &[Vec<Vec<usize>>],
) -> Result<bool> {
    let mut faces = Faces::new(sigma);
    let mut unknown = None;
    for chain in chains {
        let mut seq = Vec::with_capacity(chain.len());
        for f in chain {
            seq.push(faces.get(f)?.1.clone());
        }
        let region = eta.eval(&seq)?;
        let first = faces.get(&chain[0])?.0.clone();
        match simplex_in_region(&first, &region)? {
            Tri::Yes => {}
            Tri::No => return Ok(false),
            Tri::Unknown => unknown = unknown.or(Some(format!("{first:?} in {region:?}"))),
        }
    }
    match unknown {
        Some(what) => Err(Error::Undecidable(what)),
        None => Ok(true),
    }
}

/// Membership in `C^η`: for every chain of proper face inclusions
/// `σ_1 ⊊ … ⊊ σ_m = σ`, `σ_1 ⊆ η(b(σ_1), …, b(σ_m))`.
pub fn in_c_eta<N: Nesting<Point = QPoint>>(sigma: &Simplex, eta: &N) -> Result<bool> {
    chains_hold(sigma, eta, &proper_chains(sigma.degree()))
}

/// The defining test over all non-strict face chains of length up to
/// `max_len`, not necessarily ending at `σ`.
pub fn in_c_eta_all_chains<N: Nesting<Point = QPoint>>(
    sigma: &Simplex,
    eta: &N,
    max_len: usize,
) -> Result<bool> {
    chains_hold(sigma, eta, &all_chains(sigma.degree(), max_len))
}

/// Every simplex of the chain lies in `C^η`.
pub fn chain_in_c_eta<N: Nesting<Point = QPoint>>(c: &Chain, eta: &N) -> Result<bool> {
    for (s, _) in c.terms() {
        if !in_c_eta(s, eta)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// An open cover `𝒰` of a realized complex, by convex regions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoverSpec {
    pub members: Vec<Region>,
}

/// Outcome of [`CoverSpec::subdivision_retraction`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Retraction {
    pub n: usize,
    /// Squared mesh of the subdivided chain.
    pub mesh2: String,
    pub simplices: usize,
}

impl CoverSpec {
    pub fn new(members: Vec<Region>) -> Result<Self> {
        if let Some(m) = members.iter().find(|m| !m.is_convex() || !m.is_open()) {
            return Err(Error::InvalidCovering(format!(
                "member {m:?} is not an open convex region"
            )));
        }
        Ok(CoverSpec { members })
    }

    /// Index of the first member containing the simplex.
    pub fn member_of(&self, s: &Simplex) -> Result<Option<usize>> {
        for (i, m) in self.members.iter().enumerate() {
            if simplex_in_region(s, m)? == Tri::Yes {
                return Ok(Some(i));
            }
        }
        Ok(None)
    }

    /// Membership in `C^𝒰`: the simplex lands in one member.
    pub fn in_c_cover(&self, s: &Simplex) -> Result<bool> {
        Ok(self.member_of(s)?.is_some())
    }

    /// Checks that the vertices and the barycenters of all faces of
    /// `S^depth` of every facet are covered.
    pub fn validate(&self, complex: &OrderedComplex, depth: usize) -> Result<()> {
        let mut ops = Operators::new();
        for key in complex.facets() {
            let pts = complex.simplex(&key);
            let fine = ops.subdivide_n(&Chain::affine(pts), depth)?;
            for (s, _) in fine.terms() {
                let verts = s.vertex_images()?;
                for i in 1u32..(1 << verts.len()) {
                    let face: Vec<QPoint> = (0..verts.len())
                        .filter(|j| i >> j & 1 == 1)
                        .map(|j| verts[j].clone())
                        .collect();
                    let p = crate::geometry::barycenter(&face);
                    if !self.members.iter().any(|m| m.contains(&p)) {
                        return Err(Error::InvalidCovering(format!("point {p} is not covered")));
                    }
                }
            }
        }
        Ok(())
    }

    /// Least `n` with every simplex of `S^n(chain)` in `C^𝒰`.
    pub fn subdivision_retraction(&self, chain: &Chain, budget: usize) -> Result<Retraction> {
        let mut ops = Operators::new();
        let mut current = chain.clone();
        for n in 0..=budget {
            let mut ok = true;
            for (s, _) in current.terms() {
                if !self.in_c_cover(s)? {
                    ok = false;
                    break;
                }
            }
            let mesh2 = chain_mesh2(&current)?;
            if ok {
                return Ok(Retraction {
                    n,
                    mesh2: mesh2.to_string(),
                    simplices: current.len(),
                });
            }
            if n == budget {
                return Err(Error::Budget(format!(
                    "no subdivision up to {budget} fits the cover; mesh² is {mesh2}"
                )));
            }
            current = ops.subdivide(&current)?;
        }
        unreachable!()
    }
}

/// Largest squared edge length over the simplices of a linear chain.
pub fn chain_mesh2(c: &Chain) -> Result<Q> {
    let mut best = Q::from_integer(0.into());
    for (s, _) in c.terms() {
        let d = crate::geometry::diameter2(&s.vertex_images()?);
        if d > best {
            best = d;
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Point;
    use crate::nesting::PlNesting;
    use crate::q;

    fn p1(n: i64, d: i64) -> QPoint {
        Point(vec![q(n, d)])
    }

    #[test]
    fn chain_counts() {
        // chains ending at an edge: (e), (a, e), (b, e)
        assert_eq!(proper_chains(1).len(), 3);
        // triangle: 1 + 6 + 6 = 13
        assert_eq!(proper_chains(2).len(), 13);
    }

    #[test]
    fn vertices_are_always_in_c_eta() {
        let eta = PlNesting::balls(q(1, 100)).unwrap();
        assert!(in_c_eta(&Simplex::Affine(vec![p1(3, 7)]), &eta).unwrap());
    }

    #[test]
    fn unit_segment_needs_three_subdivisions() {
        let eta = PlNesting::balls(q(1, 64)).unwrap();
        let seg = Chain::affine(vec![p1(0, 1), p1(1, 1)]);
        let s = seg.terms().next().unwrap().0.clone();
        assert!(!in_c_eta(&s, &eta).unwrap());
        let fine = Operators::new().subdivide_n(&seg, 3).unwrap();
        assert_eq!(fine.len(), 8);
        assert!(chain_in_c_eta(&fine, &eta).unwrap());
        let coarse = Operators::new().subdivide_n(&seg, 2).unwrap();
        assert!(!chain_in_c_eta(&coarse, &eta).unwrap());
    }

    #[test]
    fn proper_and_all_chains_agree_on_a_triangle() {
        let eta = PlNesting::balls(q(1, 4)).unwrap();
        let tri = Simplex::Affine(vec![
            Point(vec![q(0, 1), q(0, 1)]),
            Point(vec![q(1, 3), q(0, 1)]),
            Point(vec![q(0, 1), q(1, 3)]),
        ]);
        assert_eq!(
            in_c_eta(&tri, &eta).unwrap(),
            in_c_eta_all_chains(&tri, &eta, 4).unwrap()
        );
    }

    #[test]
    fn retraction_on_two_balls() {
        let cover = CoverSpec::new(vec![
            Region::ball(p1(0, 1), q(49, 64)),
            Region::ball(p1(1, 1), q(9, 64)),
        ])
        .unwrap();
        let seg = Chain::affine(vec![p1(0, 1), p1(1, 1)]);
        let r = cover.subdivision_retraction(&seg, 6).unwrap();
        assert_eq!(r.n, 2);
        assert_eq!(r.mesh2, "1/16");
    }

    #[test]
    fn gap_is_rejected() {
        let cover = CoverSpec::new(vec![
            Region::ball(p1(0, 1), q(1, 4)),
            Region::ball(p1(1, 1), q(1, 4)),
        ])
        .unwrap();
        let complex = OrderedComplex::from_simplices([&[p1(0, 1), p1(1, 1)][..]]).unwrap();
        assert!(matches!(
            cover.validate(&complex, 2),
            Err(Error::InvalidCovering(_))
        ));
    }
}
