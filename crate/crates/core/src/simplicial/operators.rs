use std::collections::{BTreeMap, HashMap};

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::geometry::{affinely_independent, barycenter, AffineMap, Point};
use crate::scalar::Scalar;
use crate::simplicial::{Chain, OrderedComplex, Simplex};
use crate::{Int, QPoint, Q};

/// `[x, v_0, ..., v_k]`, rejected if affinely dependent.
pub fn cone(x: &QPoint, sigma: &[QPoint]) -> Result<Vec<QPoint>> {
    let mut out = Vec::with_capacity(sigma.len() + 1);
    out.push(x.clone());
    out.extend(sigma.iter().cloned());
    if !affinely_independent(&out) {
        return Err(Error::AffineDegeneracy(format!(
            "cone apex {x} over {sigma:?}"
        )));
    }
    Ok(out)
}

/// The map `x ↦ (x, t)` from `Q^dim` to `Q^{dim+1}`.
pub fn level_map(dim: usize, t: &Q) -> AffineMap<Q> {
    let mut linear: Vec<Vec<Q>> = (0..dim).map(|i| Point::<Q>::unit(dim, i).0).collect();
    linear.push(vec![Q::zero(); dim]);
    let mut offset = vec![Q::zero(); dim];
    offset.push(t.clone());
    AffineMap {
        linear,
        offset,
        source_dim: dim,
    }
}

fn at_level(p: &QPoint, t: &Q) -> QPoint {
    p.extend(t.clone())
}

fn signed(i: usize) -> Int {
    if i.is_multiple_of(2) {
        Int::one()
    } else {
        -Int::one()
    }
}

fn expect_affine(s: &Simplex) -> Result<&[QPoint]> {
    match s {
        Simplex::Affine(v) => Ok(v),
        other => Err(Error::Precondition(format!(
            "operator needs a linear simplex, got {other:?}"
        ))),
    }
}

/// Memoizing evaluator for the subdivision and prism operators on chains of
/// linear simplices.
///
/// Conventions: `S` is a chain map; `T` on `[lo, hi]` satisfies
/// `∂T + T∂ = S(·)×lo − (·)×hi`; `P` on `[lo, hi]` satisfies
/// `∂P + P∂ = (·)×hi − (·)×lo`.
#[derive(Default)]
pub struct Operators {
    sub: HashMap<Vec<QPoint>, Chain>,
    prism_t: HashMap<(Vec<QPoint>, Q, Q), Chain>,
}

impl Operators {
    pub fn new() -> Self {
        Self::default()
    }

    /// Barycentric subdivision `S` of one linear simplex.
    pub fn subdivide_simplex(&mut self, pts: &[QPoint]) -> Chain {
        if pts.len() == 1 {
            return Chain::affine(pts.to_vec());
        }
        if let Some(c) = self.sub.get(pts) {
            return c.clone();
        }
        let mut below = Chain::zero();
        for i in 0..pts.len() {
            let mut face = pts.to_vec();
            face.remove(i);
            below.add_chain(&self.subdivide_simplex(&face), &signed(i));
        }
        let out = below.cone(&barycenter(pts));
        self.sub.insert(pts.to_vec(), out.clone());
        out
    }

    pub fn subdivide(&mut self, c: &Chain) -> Result<Chain> {
        c.map(|s| Ok(self.subdivide_simplex(expect_affine(s)?)))
    }

    pub fn subdivide_n(&mut self, c: &Chain, n: usize) -> Result<Chain> {
        let mut out = c.clone();
        for _ in 0..n {
            out = self.subdivide(&out)?;
        }
        Ok(out)
    }

    /// Single prism `T` over `[lo, hi]`, with `S(α)` at `lo` and `α` at `hi`.
    pub fn prism_t_simplex(&mut self, pts: &[QPoint], lo: &Q, hi: &Q) -> Chain {
        let key = (pts.to_vec(), lo.clone(), hi.clone());
        if let Some(c) = self.prism_t.get(&key) {
            return c.clone();
        }
        let out = if pts.len() == 1 {
            Chain::term(
                Simplex::Affine(vec![at_level(&pts[0], lo), at_level(&pts[0], hi)]),
                -Int::one(),
            )
        } else {
            let top: Vec<QPoint> = pts.iter().map(|p| at_level(p, hi)).collect();
            let mut x = Chain::affine(top);
            for i in 0..pts.len() {
                let mut face = pts.to_vec();
                face.remove(i);
                x.add_chain(&self.prism_t_simplex(&face, lo, hi), &signed(i));
            }
            -&x.cone(&at_level(&barycenter(pts), lo))
        };
        self.prism_t.insert(key, out.clone());
        out
    }

    pub fn prism_t(&mut self, c: &Chain, lo: &Q, hi: &Q) -> Result<Chain> {
        c.map(|s| Ok(self.prism_t_simplex(expect_affine(s)?, lo, hi)))
    }

    /// `T_n` over `[lo, hi]`: copies of `T` on the `n` equal subintervals,
    /// the `i`-th applied to `S^{n-i}`. Satisfies
    /// `∂T_n + T_n∂ = S^n(·)×lo − (·)×hi`.
    pub fn prism_t_n(&mut self, c: &Chain, n: usize, lo: &Q, hi: &Q) -> Result<Chain> {
        if n == 0 {
            return Err(Error::Precondition("T_n needs n >= 1".into()));
        }
        let width = (hi.clone() - lo.clone()) / Q::from_integer(Int::from(n));
        let mut out = Chain::zero();
        let mut level = c.clone();
        // level holds S^{n-i}(c), walking i from n down to 1
        for i in (1..=n).rev() {
            let a = lo.clone() + width.clone() * Q::from_integer(Int::from(i - 1));
            let b = lo.clone() + width.clone() * Q::from_integer(Int::from(i));
            out.add_chain(&self.prism_t(&level, &a, &b)?, &Int::one());
            if i > 1 {
                level = self.subdivide(&level)?;
            }
        }
        Ok(out)
    }

    /// Prism `P` over `[lo, hi]`: `Σ (-1)^i [v_0..v_i, w_i..w_k]`.
    pub fn prism_p_simplex(pts: &[QPoint], lo: &Q, hi: &Q) -> Chain {
        let mut out = Chain::zero();
        for i in 0..pts.len() {
            let mut s: Vec<QPoint> = pts[..=i].iter().map(|p| at_level(p, lo)).collect();
            s.extend(pts[i..].iter().map(|p| at_level(p, hi)));
            out.add_term(Simplex::Affine(s), signed(i));
        }
        out
    }

    pub fn prism_p(&self, c: &Chain, lo: &Q, hi: &Q) -> Result<Chain> {
        c.map(|s| Ok(Self::prism_p_simplex(expect_affine(s)?, lo, hi)))
    }
}

/// Images of the faces of a complex under a chain-level map, with a degree
/// shift of 0 (chain map) or 1 (homotopy).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimplicialChainMap {
    pub shift: usize,
    /// Keyed by ordered vertex coordinates of the source face.
    pub images: BTreeMap<Vec<QPoint>, Chain>,
}

impl SimplicialChainMap {
    pub fn build<F: FnMut(&[QPoint]) -> Result<Chain>>(
        source: &OrderedComplex,
        shift: usize,
        mut f: F,
    ) -> Result<Self> {
        let mut images = BTreeMap::new();
        for (key, _) in source.faces() {
            let pts = source.simplex(key);
            images.insert(pts.clone(), f(&pts)?);
        }
        Ok(SimplicialChainMap { shift, images })
    }

    pub fn apply(&self, c: &Chain) -> Result<Chain> {
        c.map(|s| {
            let pts = expect_affine(s)?;
            self.images
                .get(pts)
                .cloned()
                .ok_or_else(|| Error::Precondition(format!("{s:?} is not a source face")))
        })
    }

    /// `∂f(α) = f(∂α)` on every source face.
    pub fn is_chain_map(&self) -> Result<bool> {
        for (pts, img) in &self.images {
            let lhs = img.boundary()?;
            let rhs = self.apply(&Chain::affine(pts.clone()).boundary()?)?;
            if lhs != rhs {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// `∂h(α) + h(∂α) = f(α) − g(α)` on every source face.
    pub fn is_homotopy<F, G>(&self, mut f: F, mut g: G) -> Result<bool>
    where
        F: FnMut(&[QPoint]) -> Result<Chain>,
        G: FnMut(&[QPoint]) -> Result<Chain>,
    {
        for (pts, img) in &self.images {
            let lhs = &img.boundary()? + &self.apply(&Chain::affine(pts.clone()).boundary()?)?;
            let rhs = &f(pts)? - &g(pts)?;
            if lhs != rhs {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Collects every simplex in the supports of `chains` into a complex.
pub fn complex_of_chains<'a, I: IntoIterator<Item = &'a Chain>>(
    chains: I,
) -> Result<OrderedComplex> {
    let mut out = OrderedComplex::new();
    for c in chains {
        for (s, _) in c.terms() {
            out.add_simplex(expect_affine(s)?)?;
        }
    }
    Ok(out)
}

/// A complex built by an operator together with the chain-level data.
#[derive(Clone, Debug)]
pub struct Constructed {
    pub complex: OrderedComplex,
    pub map: SimplicialChainMap,
}

/// `S(K)`: vertex carriers of the result are those of `K` propagated through
/// barycenters.
pub fn subdivide(k: &OrderedComplex) -> Result<Constructed> {
    let mut ops = Operators::new();
    let map = SimplicialChainMap::build(k, 0, |pts| Ok(ops.subdivide_simplex(pts)))?;
    let mut complex = complex_of_chains(map.images.values())?;
    for (key, _) in k.faces() {
        let b = k.barycenter(key);
        if let Some(v) = complex.vertex_of(&b) {
            complex.set_carrier(v, k.face_carrier(key));
        }
    }
    Ok(Constructed { complex, map })
}

/// `S^n(K)` by repeated subdivision, carriers relative to `K`.
pub fn subdivide_n(k: &OrderedComplex, n: usize) -> Result<OrderedComplex> {
    let mut c = k.clone();
    for _ in 0..n {
        c = subdivide(&c)?.complex;
    }
    Ok(c)
}

/// `T_n(K)` on `|K| × [lo, hi]` with its homotopy.
pub fn prism_t(k: &OrderedComplex, n: usize, lo: &Q, hi: &Q) -> Result<Constructed> {
    let mut ops = Operators::new();
    let map = SimplicialChainMap::build(k, 1, |pts| {
        ops.prism_t_n(&Chain::affine(pts.to_vec()), n, lo, hi)
    })?;
    let complex = complex_of_chains(map.images.values())?;
    Ok(Constructed { complex, map })
}

/// `P(K)` on `|K| × [lo, hi]` with its homotopy.
pub fn prism_p(k: &OrderedComplex, lo: &Q, hi: &Q) -> Result<Constructed> {
    let map = SimplicialChainMap::build(k, 1, |pts| Ok(Operators::prism_p_simplex(pts, lo, hi)))?;
    let complex = complex_of_chains(map.images.values())?;
    Ok(Constructed { complex, map })
}

/// Facets of `S(σ)`, one per ordering of the vertices of `σ`.
pub fn subdivision_facets<S: Scalar>(simplex: &[Point<S>]) -> Vec<Vec<Point<S>>> {
    let k = simplex.len();
    let mut out = Vec::new();
    let mut perm: Vec<usize> = (0..k).collect();
    permute(&mut perm, 0, &mut |p| {
        let facet = (0..k)
            .map(|j| {
                let pts: Vec<Point<S>> = p[j..].iter().map(|&i| simplex[i].clone()).collect();
                barycenter(&pts)
            })
            .collect();
        out.push(facet);
    });
    out
}

fn permute<F: FnMut(&[usize])>(v: &mut Vec<usize>, i: usize, f: &mut F) {
    if i == v.len() {
        f(v);
        return;
    }
    for j in i..v.len() {
        v.swap(i, j);
        permute(v, i + 1, f);
        v.swap(i, j);
    }
}

/// Squared mesh of `S^n(σ)` computed facet by facet.
pub fn iterated_mesh2<S: Scalar>(simplex: &[Point<S>], n: usize) -> S {
    if n == 0 {
        return crate::geometry::diameter2(simplex);
    }
    let mut best = S::zero();
    for f in subdivision_facets(simplex) {
        let m = iterated_mesh2(&f, n - 1);
        if m > best {
            best = m;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::q;

    fn std_pts(k: usize) -> Vec<QPoint> {
        (0..=k).map(|i| Point::unit(k + 1, i)).collect()
    }

    #[test]
    fn subdivision_is_chain_map() {
        for k in 0..=3 {
            let s = subdivide(&OrderedComplex::standard_simplex(k)).unwrap();
            assert!(s.map.is_chain_map().unwrap());
            s.complex.validate().unwrap();
        }
    }

    #[test]
    fn two_simplex_has_six_facets() {
        let s = subdivide(&OrderedComplex::standard_simplex(2)).unwrap();
        assert_eq!(s.complex.faces_of_dim(2).len(), 6);
        assert_eq!(s.map.images[&std_pts(2)].len(), 6);
    }

    #[test]
    fn prism_t_equation_on_segment() {
        let mut ops = Operators::new();
        let (lo, hi) = (q(0, 1), q(1, 1));
        let a = Chain::affine(std_pts(1));
        for n in 1..=2 {
            let t = ops.prism_t_n(&a, n, &lo, &hi).unwrap();
            let lhs = &t.boundary().unwrap()
                + &ops.prism_t_n(&a.boundary().unwrap(), n, &lo, &hi).unwrap();
            let bottom = ops
                .subdivide_n(&a, n)
                .unwrap()
                .apply_affine(&level_map(2, &lo));
            let top = a.apply_affine(&level_map(2, &hi));
            assert_eq!(lhs, &bottom - &top);
        }
    }

    #[test]
    fn prism_p_of_segment() {
        let p = Operators::prism_p_simplex(&std_pts(1), &q(0, 1), &q(1, 1));
        assert_eq!(p.len(), 2);
    }

    #[test]
    fn mesh_after_subdivision() {
        let seg = vec![Point(vec![q(0, 1)]), Point(vec![q(1, 1)])];
        assert_eq!(iterated_mesh2(&seg, 1), q(1, 4));
        let tri = std_pts(2);
        assert!(iterated_mesh2(&tri, 1) <= q(4, 9) * q(2, 1));
    }

    #[test]
    fn degenerate_cone_rejected() {
        let pts = std_pts(2);
        assert!(cone(&barycenter(&pts[..2]), &pts[..2]).is_err());
        assert_eq!(cone(&pts[2], &pts[..2]).unwrap().len(), 3);
    }
}
