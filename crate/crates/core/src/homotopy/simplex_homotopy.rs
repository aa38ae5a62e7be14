use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{barycenter, AffineMap};
use crate::homotopy::covering::find_subdivision_covering;
use crate::homotopy::cylinder::{corner, cylinder_covering, Caps, CylinderCovering};
use crate::homotopy::deform::DeformationMap;
use crate::homotopy::filler::{FillRequest, FillerOracle, Strategy};
use crate::nesting::{chain_in_c_eta, in_c_eta, PlNesting};
use crate::simplicial::{Chain, Operators, OrderedComplex, Simplex};
use crate::{QPoint, Q};

/// Face of the standard `Δ^k` spanned by the sorted vertex indices.
pub fn simplex_face(k: usize, face: &[usize]) -> Vec<QPoint> {
    face.iter().map(|&i| corner(k, i)).collect()
}

/// Vertex indices of a face of the standard simplex, from its coordinates.
pub(crate) fn face_indices(pts: &[QPoint]) -> Option<Vec<usize>> {
    pts.iter()
        .map(|p| {
            p.0.iter()
                .position(|c| c.is_one())
                .filter(|_| p.0.iter().filter(|c| !c.is_zero()).count() == 1)
        })
        .collect()
}

/// All faces of `Δ^k`, by dimension and then lexicographically.
pub(crate) fn all_faces(k: usize) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = (1u32..(1 << (k + 1)))
        .map(|m| (0..=k).filter(|i| m >> i & 1 == 1).collect())
        .collect();
    out.sort_by(|a: &Vec<usize>, b: &Vec<usize>| a.len().cmp(&b.len()).then(a.cmp(b)));
    out
}

/// `π = δ ∘ S^n` from the subdivision search, on every face of `Δ^k`.
/// Returns the subdivision depth with the images.
pub fn subdivision_pi(
    k: usize,
    eta: &PlNesting,
    caps: &Caps,
) -> Result<(usize, BTreeMap<Vec<usize>, Chain>)> {
    caps.check_k(k)?;
    let found = find_subdivision_covering(&OrderedComplex::standard_simplex(k), eta, None, caps.n)?;
    let f = DeformationMap::new(&found.complex, &found.covering)?;
    let mut ops = Operators::new();
    let mut out = BTreeMap::new();
    for face in all_faces(k) {
        let sub = ops.subdivide_n(&Chain::affine(simplex_face(k, &face)), found.n)?;
        out.insert(face, f.delta_chain(&sub)?);
    }
    Ok((found.n, out))
}

/// Exact checks on one retraction instance.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SimplexHomotopyChecks {
    pub pi_chain_map: bool,
    pub pi_fixes_vertices: bool,
    /// `∂h(τ) + h(∂τ) = τ − π(τ)` for every face.
    pub homotopy: bool,
    /// `∂(π(Δ^k) + h(∂Δ^k)) = ∂Δ^k`.
    pub boundary_identity: bool,
    /// `π(τ) ∈ C^η` for every face and `h(τ) ∈ C^η` for accepted faces.
    pub certified: bool,
    pub delta_audit: Option<String>,
}

impl SimplexHomotopyChecks {
    pub fn passed(&self) -> bool {
        self.pi_chain_map
            && self.pi_fixes_vertices
            && self.homotopy
            && self.boundary_identity
            && self.certified
            && self.delta_audit.is_none()
    }
}

/// `π` and `h` on all of `A(Δ^k)` for a nesting `η` on `Δ^k`.
#[derive(Clone, Debug)]
pub struct SimplexHomotopy {
    pub k: usize,
    pub eta: PlNesting,
    pub cylinder_cover: CylinderCovering,
    pub deform: Arc<DeformationMap>,
    /// Faces of `Δ^k` in `C^η`.
    pub accepted: BTreeSet<Vec<usize>>,
    pub pi: BTreeMap<Vec<usize>, Chain>,
    pub h: BTreeMap<Vec<usize>, Chain>,
    /// Faces outside `C^η` and how their `h` was filled.
    pub fillers: BTreeMap<Vec<usize>, Strategy>,
}

impl SimplexHomotopy {
    pub fn n(&self) -> usize {
        self.cylinder_cover.cylinder.n
    }

    fn apply(map: &BTreeMap<Vec<usize>, Chain>, c: &Chain) -> Result<Chain> {
        c.map(|s| {
            let Simplex::Affine(pts) = s else {
                return Err(Error::Precondition(format!(
                    "{s:?} is not a face of the simplex"
                )));
            };
            let key = face_indices(pts)
                .ok_or_else(|| Error::Precondition(format!("{s:?} is not a face")))?;
            map.get(&key)
                .cloned()
                .ok_or_else(|| Error::Precondition(format!("no image for {key:?}")))
        })
    }

    pub fn pi_of(&self, c: &Chain) -> Result<Chain> {
        Self::apply(&self.pi, c)
    }

    pub fn h_of(&self, c: &Chain) -> Result<Chain> {
        Self::apply(&self.h, c)
    }

    /// Runs every exact check; `samples` random points per face for the
    /// deformation audit.
    pub fn check(&self, samples: usize, seed: u64) -> Result<SimplexHomotopyChecks> {
        use rand::SeedableRng;
        let mut out = SimplexHomotopyChecks {
            pi_chain_map: true,
            pi_fixes_vertices: true,
            homotopy: true,
            ..Default::default()
        };
        for (face, img) in &self.pi {
            let tau = Chain::affine(simplex_face(self.k, face));
            let d = tau.boundary()?;
            if img.boundary()? != self.pi_of(&d)? {
                out.pi_chain_map = false;
            }
            if face.len() == 1 && img != &tau {
                out.pi_fixes_vertices = false;
            }
            let lhs = &self.h[face].boundary()? + &self.h_of(&d)?;
            if lhs != &tau - img {
                out.homotopy = false;
            }
        }
        let top: Vec<usize> = (0..=self.k).collect();
        let d = Chain::affine(simplex_face(self.k, &top)).boundary()?;
        let x = &self.pi[&top] + &self.h_of(&d)?;
        out.boundary_identity = x.boundary()? == d;
        out.certified = self.certify()?;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        out.delta_audit = self.deform.audit(&mut rng, samples);
        Ok(out)
    }

    fn certify(&self) -> Result<bool> {
        for (face, img) in &self.pi {
            if !chain_in_c_eta(img, &self.eta)? {
                return Ok(false);
            }
            if self.accepted.contains(face) && !chain_in_c_eta(&self.h[face], &self.eta)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// The homotopy `h' = S^n∘P − T_n` on a face of `K`, as a chain in `L'_n`.
/// With the prism conventions of [`Operators`] it satisfies
/// `∂h' + h'∂ = (·)×{2} − S^n((·)×{0})`.
fn cylinder_homotopy(ops: &mut Operators, tau: &[QPoint], n: usize) -> Result<Chain> {
    let zero = Q::zero();
    let one = Q::one();
    let two = one.clone() + one.clone();
    let base = Chain::affine(tau.to_vec());
    let prism = ops.prism_p(&base, &zero, &one)?;
    let lower = ops.subdivide_n(&prism, n)?;
    let upper = ops.prism_t_n(&base, n, &one, &two)?;
    Ok(&lower - &upper)
}

/// `π` and `h` on `A(Δ^k)`: `h = δ'∘h'` on faces of `K`, fillers of
/// `τ − π(τ) − h(∂τ)` on the other faces, in order of dimension.
pub fn simplex_homotopy(
    k: usize,
    eta: &PlNesting,
    caps: &Caps,
    oracle: &FillerOracle,
) -> Result<SimplexHomotopy> {
    caps.check_k(k)?;
    let cylinder_cover = cylinder_covering(k, eta, caps)?;
    let cyl = &cylinder_cover.cylinder;
    let deform = DeformationMap::new(&cyl.complex, &cylinder_cover.covering)?;
    let n = cyl.n;
    let zero = Q::zero();
    let mut ops = Operators::new();
    let mut accepted = BTreeSet::new();
    for face in all_faces(k) {
        if in_c_eta(&Simplex::Affine(simplex_face(k, &face)), eta)? {
            accepted.insert(face);
        }
    }
    let mut pi = BTreeMap::new();
    let mut h: BTreeMap<Vec<usize>, Chain> = BTreeMap::new();
    let mut fillers = BTreeMap::new();
    let apex = barycenter(&simplex_face(k, &(0..=k).collect::<Vec<_>>()));
    for face in all_faces(k) {
        let tau = simplex_face(k, &face);
        let bottom: Vec<QPoint> = tau.iter().map(|p| p.extend(zero.clone())).collect();
        let sub = ops.subdivide_n(&Chain::affine(bottom), n)?;
        let pi_tau = deform.delta_chain(&sub)?.apply_affine(&cyl.q);
        let h_tau = if accepted.contains(&face) {
            deform
                .delta_chain(&cylinder_homotopy(&mut ops, &tau, n)?)?
                .apply_affine(&cyl.q)
        } else {
            let d = Chain::affine(tau.clone()).boundary()?;
            let h_d = SimplexHomotopy::apply(&h, &d)?;
            let z = &(&Chain::affine(tau.clone()) - &pi_tau) - &h_d;
            let mut req = FillRequest::new(&z, format!("h on face {face:?}"));
            req.apexes = vec![apex.clone(), barycenter(&tau)];
            let filled = oracle.fill(&req)?;
            fillers.insert(face.clone(), filled.strategy);
            filled.chain
        };
        pi.insert(face.clone(), pi_tau);
        h.insert(face, h_tau);
    }
    Ok(SimplexHomotopy {
        k,
        eta: eta.clone(),
        cylinder_cover,
        deform,
        accepted,
        pi,
        h,
        fillers,
    })
}

/// For a linear simplex `σ` whose boundary lies in `C^η`, a chain `x ∈ C^η`
/// with `∂x = ∂σ`, obtained as `σ_*(π(Δ^k) + h(∂Δ^k))` for the pulled back
/// nesting.
pub fn boundary_filler(
    sigma: &Simplex,
    eta: &PlNesting,
    caps: &Caps,
    oracle: &FillerOracle,
) -> Result<Chain> {
    let Simplex::Affine(pts) = sigma else {
        return Err(Error::Precondition(format!(
            "boundary filler needs a linear simplex, got {sigma:?}"
        )));
    };
    let d = sigma.boundary()?;
    for (s, _) in d.terms() {
        if !in_c_eta(s, eta)? {
            return Err(Error::Precondition(format!(
                "face {s:?} of the boundary is not in C^η"
            )));
        }
    }
    let k = sigma.degree();
    if k == 0 {
        return Ok(Chain::simplex(sigma.clone()));
    }
    caps.check_k(k)?;
    let map = AffineMap::from_basis_images(k + 1, pts);
    let pulled = PlNesting::pullback(map.clone(), eta.clone());
    let step = simplex_homotopy(k, &pulled, caps, oracle)?;
    let top: Vec<usize> = (0..=k).collect();
    let standard_boundary = Chain::affine(simplex_face(k, &top)).boundary()?;
    let x = (&step.pi[&top] + &step.h_of(&standard_boundary)?).apply_affine(&map);
    if x.boundary()? != d {
        return Err(Error::FillerFailure(format!(
            "pushed forward chain does not bound {d:?}"
        )));
    }
    if !chain_in_c_eta(&x, eta)? {
        return Err(Error::FillerFailure(format!(
            "pushed forward chain for {sigma:?} is not certified"
        )));
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::q;

    #[test]
    fn vertex_instance() {
        let oracle = FillerOracle::new(Caps::default());
        let s = simplex_homotopy(0, &PlNesting::Ambient, &Caps::default(), &oracle).unwrap();
        assert_eq!(s.pi[&vec![0]], Chain::affine(vec![corner(0, 0)]));
        assert!(s.check(20, 1).unwrap().passed());
    }

    #[test]
    fn segment_all_accepting() {
        let oracle = FillerOracle::new(Caps::default());
        let s = simplex_homotopy(1, &PlNesting::Ambient, &Caps::default(), &oracle).unwrap();
        let checks = s.check(20, 1).unwrap();
        assert!(checks.passed(), "{checks:?}");
    }

    #[test]
    fn segment_ball_nesting() {
        let oracle = FillerOracle::new(Caps::default());
        let eta = PlNesting::balls(q(1, 2)).unwrap();
        let s = simplex_homotopy(1, &eta, &Caps::default(), &oracle).unwrap();
        let checks = s.check(20, 2).unwrap();
        assert!(checks.passed(), "{checks:?}");
        // the top edge touches the boundary of the open ball, so it is rejected
        assert_eq!(s.fillers.get(&vec![0, 1]), Some(&Strategy::Cone));

        let eta = PlNesting::balls(q(3, 4)).unwrap();
        let s = simplex_homotopy(1, &eta, &Caps::default(), &oracle).unwrap();
        assert!(s.fillers.is_empty());
        assert!(s.check(20, 3).unwrap().passed());
    }

    #[test]
    fn cor27_pi_is_identity_on_vertices() {
        let eta = PlNesting::balls(q(1, 4)).unwrap();
        let (_, pi) = subdivision_pi(2, &eta, &Caps::default()).unwrap();
        for i in 0..3 {
            assert_eq!(pi[&vec![i]], Chain::affine(vec![corner(2, i)]));
        }
    }
}
