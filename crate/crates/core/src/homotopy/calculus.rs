use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{barycenter, AffineMap};
use crate::homotopy::covering::find_subdivision_covering;
use crate::homotopy::cylinder::Caps;
use crate::homotopy::deform::DeformationMap;
use crate::homotopy::filler::{FillRequest, FillerAudit, FillerOracle, Strategy};
use crate::homotopy::simplex_homotopy::{all_faces, simplex_face};
use crate::nesting::{chain_in_c_eta, in_c_eta, Nesting, PlNesting};
use crate::simplicial::{Chain, Operators, OrderedComplex, Simplex};
use crate::{Int, QPoint};

type Face = Vec<usize>;

fn sign(i: usize) -> Int {
    if i.is_multiple_of(2) {
        Int::from(1)
    } else {
        Int::from(-1)
    }
}

fn drop_at(face: &[usize], i: usize) -> Face {
    let mut f = face.to_vec();
    f.remove(i);
    f
}

fn is_subface(a: &[usize], b: &[usize]) -> bool {
    a.iter().all(|x| b.contains(x))
}

fn constant(p: &QPoint, copies: usize) -> Chain {
    Chain::affine(vec![p.clone(); copies])
}

/// Cone prism `T(σ) = [b(σ), σ − T(∂σ)]`, `T(v) = [v, v]`, satisfying
/// `∂T + T∂ = id − S` for the barycentric subdivision `S`.
#[derive(Default)]
struct Prism {
    ops: Operators,
    memo: HashMap<Vec<QPoint>, Chain>,
}

impl Prism {
    fn simplex(&mut self, pts: &[QPoint]) -> Chain {
        if pts.len() == 1 {
            return constant(&pts[0], 2);
        }
        if let Some(c) = self.memo.get(pts) {
            return c.clone();
        }
        let mut below = Chain::zero();
        for i in 0..pts.len() {
            below.add_chain(&self.simplex(&drop_at_points(pts, i)), &sign(i));
        }
        let out = (&Chain::affine(pts.to_vec()) - &below).cone(&barycenter(pts));
        self.memo.insert(pts.to_vec(), out.clone());
        out
    }

    fn chain(&mut self, c: &Chain) -> Result<Chain> {
        c.map(|s| match s {
            Simplex::Affine(v) => Ok(self.simplex(v)),
            other => Err(Error::Precondition(format!(
                "prism needs linear simplices, got {other:?}"
            ))),
        })
    }

    /// `D = Σ_{a ≤ j < b} T S^j`, so that `∂D + D∂ = S^a − S^b`.
    fn between(&mut self, pts: &[QPoint], a: usize, b: usize) -> Result<Chain> {
        let mut cur = self.ops.subdivide_n(&Chain::affine(pts.to_vec()), a)?;
        let mut out = Chain::zero();
        for _ in a..b {
            out = &out + &self.chain(&cur)?;
            cur = self.ops.subdivide(&cur)?;
        }
        Ok(out)
    }

    /// `D` oriented so that `∂D + D∂ = S^a − S^b` for either order of `a, b`.
    fn signed_between(&mut self, pts: &[QPoint], a: usize, b: usize) -> Result<Chain> {
        if a <= b {
            self.between(pts, a, b)
        } else {
            Ok(-&self.between(pts, b, a)?)
        }
    }
}

fn drop_at_points(pts: &[QPoint], i: usize) -> Vec<QPoint> {
    let mut v = pts.to_vec();
    v.remove(i);
    v
}

/// The homotopy calculus on one standard simplex `Δ^k ⊂ Q^{k+1}` with a
/// nesting: `π^τ`, `ε^σ_τ` and `h^σ` for faces `τ ⊆ σ`, computed in place
/// (each face carries its own subdivision depth) and memoized.
pub struct World {
    pub k: usize,
    pub eta: PlNesting,
    depth: BTreeMap<Face, (usize, Arc<DeformationMap>)>,
    eps: BTreeMap<(Face, Face), Chain>,
    h: BTreeMap<Face, Chain>,
    prism: Prism,
    /// Strategy used for each top-level filler, by label.
    pub fills: BTreeMap<String, Strategy>,
}

impl World {
    pub fn new(k: usize, eta: PlNesting) -> Self {
        World {
            k,
            eta,
            depth: BTreeMap::new(),
            eps: BTreeMap::new(),
            h: BTreeMap::new(),
            prism: Prism::default(),
            fills: BTreeMap::new(),
        }
    }

    pub fn full(&self) -> Face {
        (0..=self.k).collect()
    }

    pub fn faces(&self) -> Vec<Face> {
        all_faces(self.k)
    }

    fn pts(&self, face: &[usize]) -> Vec<QPoint> {
        simplex_face(self.k, face)
    }

    fn name(&self, face: &[usize]) -> String {
        format!("{face:?}")
    }

    /// Subdivision depth of `π^τ`, from the subdivision search on `τ`.
    pub fn depth(&mut self, tau: &[usize], caps: &Caps) -> Result<usize> {
        if let Some((n, _)) = self.depth.get(tau) {
            return Ok(*n);
        }
        let complex = OrderedComplex::from_simplices([self.pts(tau).as_slice()])?;
        let found = find_subdivision_covering(&complex, &self.eta, None, caps.n)?;
        let f = DeformationMap::new(&found.complex, &found.covering)?;
        self.depth.insert(tau.to_vec(), (found.n, f));
        Ok(found.n)
    }

    /// `π^τ(α)` for `α ⊆ τ`.
    pub fn pi(&mut self, tau: &[usize], alpha: &[usize], caps: &Caps) -> Result<Chain> {
        let n = self.depth(tau, caps)?;
        let f = self.depth[tau].1.clone();
        let sub = self
            .prism
            .ops
            .subdivide_n(&Chain::affine(self.pts(alpha)), n)?;
        f.delta_chain(&sub)
    }

    /// `ε^σ_τ(α)` for `α ⊆ τ ⊊ σ`: the stored top value when `α = τ`, else
    /// `ε^σ_α(α) − ε^τ_α(α)`.
    pub fn eps(
        &mut self,
        sigma: &[usize],
        tau: &[usize],
        alpha: &[usize],
        caps: &Caps,
        oracle: &FillerOracle,
    ) -> Result<Chain> {
        if alpha == tau {
            return self.eps_top(sigma, tau, caps, oracle);
        }
        let a = self.eps_top(sigma, alpha, caps, oracle)?;
        let b = self.eps_top(tau, alpha, caps, oracle)?;
        Ok(&a - &b)
    }

    fn eps_top(
        &mut self,
        sigma: &[usize],
        tau: &[usize],
        caps: &Caps,
        oracle: &FillerOracle,
    ) -> Result<Chain> {
        let key = (sigma.to_vec(), tau.to_vec());
        if let Some(c) = self.eps.get(&key) {
            return Ok(c.clone());
        }
        let pts = self.pts(tau);
        let out = if tau.len() == 1 {
            constant(&pts[0], 2)
        } else {
            let mut cycle = &self.pi(tau, tau, caps)? - &self.pi(sigma, tau, caps)?;
            for i in 0..tau.len() {
                let e = self.eps(sigma, tau, &drop_at(tau, i), caps, oracle)?;
                cycle.add_chain(&e, &-sign(i));
            }
            let (a, b) = (self.depth(tau, caps)?, self.depth(sigma, caps)?);
            let mut req = FillRequest::new(
                &cycle,
                format!("eps {} > {}", self.name(sigma), self.name(tau)),
            );
            req.constraint = Some(&self.eta);
            req.hint = Some(self.prism.signed_between(&pts, a, b)?);
            req.apexes = vec![barycenter(&pts), barycenter(&self.pts(sigma))];
            let filled = oracle.fill(&req)?;
            self.fills.insert(req.label, filled.strategy);
            filled.chain
        };
        self.eps.insert(key, out.clone());
        Ok(out)
    }

    /// `h^σ(τ)` for `τ ⊆ σ`: the stored top value when `τ = σ`, else
    /// `ε^σ_τ(τ) + h^τ(τ)`.
    pub fn h(
        &mut self,
        sigma: &[usize],
        tau: &[usize],
        caps: &Caps,
        oracle: &FillerOracle,
    ) -> Result<Chain> {
        if sigma == tau {
            return self.h_top(sigma, caps, oracle);
        }
        let e = self.eps_top(sigma, tau, caps, oracle)?;
        Ok(&e + &self.h_top(tau, caps, oracle)?)
    }

    fn h_top(&mut self, sigma: &[usize], caps: &Caps, oracle: &FillerOracle) -> Result<Chain> {
        if let Some(c) = self.h.get(sigma) {
            return Ok(c.clone());
        }
        let pts = self.pts(sigma);
        let out = if sigma.len() == 1 {
            constant(&pts[0], 2)
        } else {
            let mut cycle = &Chain::affine(pts.clone()) - &self.pi(sigma, sigma, caps)?;
            for i in 0..sigma.len() {
                let e = self.h(sigma, &drop_at(sigma, i), caps, oracle)?;
                cycle.add_chain(&e, &-sign(i));
            }
            let constrained = in_c_eta(&Simplex::Affine(pts.clone()), &self.eta)?;
            let n = self.depth(sigma, caps)?;
            let mut req = FillRequest::new(&cycle, format!("h {}", self.name(sigma)));
            req.constraint = constrained.then_some(&self.eta);
            req.hint = Some(self.prism.between(&pts, 0, n)?);
            req.apexes = vec![barycenter(&pts)];
            let filled = oracle.fill(&req)?;
            self.fills.insert(req.label, filled.strategy);
            filled.chain
        };
        self.h.insert(sigma.to_vec(), out.clone());
        Ok(out)
    }

    /// `H(σ) = h^σ(σ)`.
    pub fn big_h(&mut self, sigma: &[usize], caps: &Caps, oracle: &FillerOracle) -> Result<Chain> {
        self.h_top(sigma, caps, oracle)
    }

    /// `ρ(σ) = σ − H(∂σ) − ∂H(σ)`.
    pub fn rho(&mut self, sigma: &[usize], caps: &Caps, oracle: &FillerOracle) -> Result<Chain> {
        let h = self.big_h(sigma, caps, oracle)?;
        let mut out = &Chain::affine(self.pts(sigma)) - &h.boundary()?;
        if sigma.len() > 1 {
            for i in 0..sigma.len() {
                let hf = self.big_h(&drop_at(sigma, i), caps, oracle)?;
                out.add_chain(&hf, &-sign(i));
            }
        }
        Ok(out)
    }

    /// `∂c` on a face, as signed faces.
    fn boundary_faces(face: &[usize]) -> Vec<(Face, Int)> {
        if face.len() == 1 {
            return vec![];
        }
        (0..face.len())
            .map(|i| (drop_at(face, i), sign(i)))
            .collect()
    }

    /// Runs every identity of the calculus over all faces.
    pub fn check(&mut self, caps: &Caps, oracle: &FillerOracle) -> Result<WorldChecks> {
        let faces = self.faces();
        let mut c = WorldChecks::all_true();
        for sigma in &faces {
            for tau in faces
                .iter()
                .filter(|t| t.len() < sigma.len() && is_subface(t, sigma))
            {
                let top = self.eps(sigma, tau, tau, caps, oracle)?;
                c.eps_certified &= chain_in_c_eta(&top, &self.eta)?;
                for alpha in faces.iter().filter(|a| is_subface(a, tau)) {
                    let e = self.eps(sigma, tau, alpha, caps, oracle)?;
                    let mut lhs = e.boundary()?;
                    for (f, s) in Self::boundary_faces(alpha) {
                        lhs.add_chain(&self.eps(sigma, tau, &f, caps, oracle)?, &s);
                    }
                    let rhs = &self.pi(tau, alpha, caps)? - &self.pi(sigma, alpha, caps)?;
                    c.eps_homotopy &= lhs == rhs;
                    let hs = self.h(sigma, alpha, caps, oracle)?;
                    let ht = self.h(tau, alpha, caps, oracle)?;
                    c.h_restriction &= &hs - &ht == e;
                    for beta in faces
                        .iter()
                        .filter(|b| b.len() < alpha.len() && is_subface(b, alpha))
                    {
                        let whole = self.eps(sigma, alpha, beta, caps, oracle)?;
                        let parts = &self.eps(sigma, tau, beta, caps, oracle)?
                            + &self.eps(tau, alpha, beta, caps, oracle)?;
                        c.additivity &= whole == parts;
                    }
                }
            }
            for tau in faces.iter().filter(|t| is_subface(t, sigma)) {
                let h = self.h(sigma, tau, caps, oracle)?;
                let mut lhs = h.boundary()?;
                for (f, s) in Self::boundary_faces(tau) {
                    lhs.add_chain(&self.h(sigma, &f, caps, oracle)?, &s);
                }
                let rhs = &Chain::affine(self.pts(tau)) - &self.pi(sigma, tau, caps)?;
                c.h_homotopy &= lhs == rhs;
                if in_c_eta(&Simplex::Affine(self.pts(tau)), &self.eta)? {
                    c.h_certified &= chain_in_c_eta(&h, &self.eta)?;
                }
            }
            let rho = self.rho(sigma, caps, oracle)?;
            let mut d_rho = Chain::zero();
            for (f, s) in Self::boundary_faces(sigma) {
                d_rho.add_chain(&self.rho(&f, caps, oracle)?, &s);
            }
            c.rho_chain_map &= rho.boundary()? == d_rho;
            c.rho_certified &= chain_in_c_eta(&rho, &self.eta)?;
            let mut decomposed = self.pi(sigma, sigma, caps)?;
            for (f, s) in Self::boundary_faces(sigma) {
                let diff = &self.h(sigma, &f, caps, oracle)? - &self.big_h(&f, caps, oracle)?;
                decomposed.add_chain(&diff, &s);
            }
            c.rho_decomposition &= decomposed == rho;
        }
        Ok(c)
    }
}

/// Exact identities of one [`World`], each over every admissible face tuple.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WorldChecks {
    /// `∂ε^σ_τ(α) + ε^σ_τ(∂α) = π^τ(α) − π^σ(α)`.
    pub eps_homotopy: bool,
    /// `ε^σ_α = ε^σ_τ + ε^τ_α` on faces of `α`.
    pub additivity: bool,
    pub eps_certified: bool,
    /// `∂h^σ(τ) + h^σ(∂τ) = τ − π^σ(τ)`.
    pub h_homotopy: bool,
    /// `h^σ − h^τ = ε^σ_τ` on faces of `τ`.
    pub h_restriction: bool,
    /// `h^σ(τ) ∈ C^η` whenever `τ ∈ C^η`.
    pub h_certified: bool,
    pub rho_chain_map: bool,
    pub rho_certified: bool,
    /// `ρ(σ) = π^σ(σ) + h^σ(∂σ) − H(∂σ)`.
    pub rho_decomposition: bool,
}

impl WorldChecks {
    fn all_true() -> Self {
        WorldChecks {
            eps_homotopy: true,
            additivity: true,
            eps_certified: true,
            h_homotopy: true,
            h_restriction: true,
            h_certified: true,
            rho_chain_map: true,
            rho_certified: true,
            rho_decomposition: true,
        }
    }

    pub fn passed(&self) -> bool {
        self.eps_homotopy
            && self.additivity
            && self.eps_certified
            && self.h_homotopy
            && self.h_restriction
            && self.h_certified
            && self.rho_chain_map
            && self.rho_certified
            && self.rho_decomposition
    }
}

/// `ρ` and `H` on linear simplices of `Q^d` with a nesting `η`: a simplex
/// `σ` is handled in the world of `(Δ^k, σ^*η)` and pushed forward by `σ`.
/// Worlds are memoized by dimension and nesting descriptor.
pub struct Calculus<'o> {
    pub eta: PlNesting,
    pub caps: Caps,
    oracle: &'o FillerOracle,
    worlds: BTreeMap<(usize, String), World>,
}

impl<'o> Calculus<'o> {
    pub fn new(eta: PlNesting, caps: Caps, oracle: &'o FillerOracle) -> Self {
        Calculus {
            eta,
            caps,
            oracle,
            worlds: BTreeMap::new(),
        }
    }

    pub fn world_count(&self) -> usize {
        self.worlds.len()
    }

    /// The world for `(Δ^k, η)`, built on first use.
    pub fn world(&mut self, k: usize, eta: PlNesting) -> Result<&mut World> {
        self.caps.check_k(k)?;
        let key = (k, eta.descriptor());
        Ok(self.worlds.entry(key).or_insert_with(|| World::new(k, eta)))
    }

    fn chart(&mut self, s: &Simplex) -> Result<(AffineMap<crate::Q>, &mut World)> {
        let Simplex::Affine(pts) = s else {
            return Err(Error::Precondition(format!(
                "the calculus takes linear simplices, got {s:?}"
            )));
        };
        let k = pts.len() - 1;
        let f = AffineMap::from_basis_images(k + 1, pts);
        let pulled = PlNesting::pullback(f.clone(), self.eta.clone());
        Ok((f, self.world(k, pulled)?))
    }

    /// `H(σ) = σ_*(H_{Δ^k, σ^*η}(Δ^k))`.
    pub fn homotopy(&mut self, s: &Simplex) -> Result<Chain> {
        let (caps, oracle) = (self.caps, self.oracle);
        let (f, world) = self.chart(s)?;
        let full = world.full();
        Ok(world.big_h(&full, &caps, oracle)?.apply_affine(&f))
    }

    /// `ρ(σ) = σ − H(∂σ) − ∂H(σ)`, with `H(∂σ)` taken in the worlds of the
    /// faces.
    pub fn rho(&mut self, s: &Simplex) -> Result<Chain> {
        let h = self.homotopy(s)?;
        let mut out = &Chain::simplex(s.clone()) - &h.boundary()?;
        if s.degree() > 0 {
            out = &out - &self.homotopy_chain(&s.boundary()?)?;
        }
        Ok(out)
    }

    /// `σ_*(π^σ(σ) + h^σ(∂σ)) − H(∂σ)`, the certified form of `ρ(σ)`.
    pub fn rho_decomposed(&mut self, s: &Simplex) -> Result<Chain> {
        let (caps, oracle) = (self.caps, self.oracle);
        let (f, world) = self.chart(s)?;
        let full = world.full();
        let mut local = world.pi(&full, &full, &caps)?;
        for (face, sg) in World::boundary_faces(&full) {
            local.add_chain(&world.h(&full, &face, &caps, oracle)?, &sg);
        }
        let mut out = local.apply_affine(&f);
        if s.degree() > 0 {
            out = &out - &self.homotopy_chain(&s.boundary()?)?;
        }
        Ok(out)
    }

    pub fn homotopy_chain(&mut self, c: &Chain) -> Result<Chain> {
        c.map(|s| self.homotopy(s))
    }

    pub fn rho_chain(&mut self, c: &Chain) -> Result<Chain> {
        c.map(|s| self.rho(s))
    }

    /// `H_{Δ^k,η} ∘ f_* = f_* ∘ H_{Δ^i,f^*η}` for every face map `f` of
    /// `Δ^k` and every face of `Δ^i`. Returns the first mismatch.
    pub fn naturality(&mut self, k: usize, eta: &PlNesting) -> Result<Option<String>> {
        let (caps, oracle) = (self.caps, self.oracle);
        for image in all_faces(k).into_iter().filter(|f| f.len() <= k) {
            let i = image.len() - 1;
            let f = AffineMap::from_basis_images(i + 1, &simplex_face(k, &image));
            let pulled = PlNesting::pullback(f.clone(), eta.clone());
            for alpha in all_faces(i) {
                let small = self
                    .world(i, pulled.clone())?
                    .big_h(&alpha, &caps, oracle)?
                    .apply_affine(&f);
                let mapped: Face = alpha.iter().map(|&a| image[a]).collect();
                let big = self.world(k, eta.clone())?.big_h(&mapped, &caps, oracle)?;
                if small != big {
                    return Ok(Some(format!(
                        "H differs on face {alpha:?} under Δ^{i} → {image:?}"
                    )));
                }
            }
        }
        Ok(None)
    }
}

/// Outcome of the equivalence checks on one test chain.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ChainCheck {
    pub label: String,
    /// `∂H(c) + H(∂c) = c − ρ(c)`.
    pub homotopy: bool,
    pub rho_chain_map: bool,
    /// `ρ(c)` equals its certified decomposition and lies in `C^η`.
    pub rho_certified: bool,
    pub in_c_eta: bool,
    /// `H(c) ∈ C^η`, checked when `c ∈ C^η`.
    pub restricted_homotopy: Option<bool>,
}

impl ChainCheck {
    pub fn passed(&self) -> bool {
        self.homotopy
            && self.rho_chain_map
            && self.rho_certified
            && self.restricted_homotopy != Some(false)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EquivReport {
    pub checks: Vec<ChainCheck>,
    pub worlds: usize,
    pub fillers: FillerAudit,
}

impl EquivReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(ChainCheck::passed)
    }
}

/// Checks that `ρ` and `H` exhibit `C^η ⊆ C` as a chain homotopy
/// equivalence on the given test chains of linear simplices.
pub fn chain_homotopy_equiv_report(
    eta: &PlNesting,
    tests: &[(String, Chain)],
    caps: &Caps,
    oracle: &FillerOracle,
) -> Result<EquivReport> {
    let mut calc = Calculus::new(eta.clone(), *caps, oracle);
    let mut checks = Vec::new();
    for (label, c) in tests {
        let h = calc.homotopy_chain(c)?;
        let rho = calc.rho_chain(c)?;
        let (homotopy, rho_chain_map) = if c.degree().unwrap_or(0) > 0 {
            let dc = c.boundary()?;
            let lhs = &h.boundary()? + &calc.homotopy_chain(&dc)?;
            (lhs == c - &rho, rho.boundary()? == calc.rho_chain(&dc)?)
        } else {
            (h.boundary()? == c - &rho, true)
        };
        let decomposed = c.map(|s| calc.rho_decomposed(s))?;
        let rho_certified = decomposed == rho && chain_in_c_eta(&rho, eta)?;
        let member = chain_in_c_eta(c, eta)?;
        let restricted_homotopy = if member {
            Some(chain_in_c_eta(&h, eta)?)
        } else {
            None
        };
        checks.push(ChainCheck {
            label: label.clone(),
            homotopy,
            rho_chain_map,
            rho_certified,
            in_c_eta: member,
            restricted_homotopy,
        });
    }
    Ok(EquivReport {
        checks,
        worlds: calc.world_count(),
        fillers: oracle.audit(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::q;

    #[test]
    fn cone_prism_identity() {
        let mut p = Prism::default();
        let pts = simplex_face(2, &[0, 1, 2]);
        let c = Chain::affine(pts.clone());
        let d = p.between(&pts, 0, 2).unwrap();
        let mut lhs = d.boundary().unwrap();
        for i in 0..3 {
            lhs.add_chain(
                &p.between(&drop_at_points(&pts, i), 0, 2).unwrap(),
                &sign(i),
            );
        }
        let s2 = p.ops.subdivide_n(&c, 2).unwrap();
        assert_eq!(lhs, &c - &s2);
    }

    #[test]
    fn base_cases_are_constant() {
        let oracle = FillerOracle::new(Caps::default());
        let caps = Caps::default();
        let mut w = World::new(0, PlNesting::Ambient);
        let v = simplex_face(0, &[0]);
        assert_eq!(w.big_h(&[0], &caps, &oracle).unwrap(), constant(&v[0], 2));
        let mut w = World::new(1, PlNesting::balls(q(1, 4)).unwrap());
        let e = w.eps(&[0, 1], &[1], &[1], &caps, &oracle).unwrap();
        assert_eq!(e, constant(&simplex_face(1, &[1])[0], 2));
    }

    #[test]
    fn segment_world_identities() {
        let oracle = FillerOracle::new(Caps::default());
        let caps = Caps::default();
        let mut w = World::new(1, PlNesting::balls(q(1, 4)).unwrap());
        let checks = w.check(&caps, &oracle).unwrap();
        assert!(checks.passed(), "{checks:?}");
        assert!(w.depth(&[0, 1], &caps).unwrap() > 0);
    }
}
