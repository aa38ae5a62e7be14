use std::collections::{BTreeMap, BTreeSet};

use num_traits::One;

use crate::algebra::{GroupHom, Matrix, Presented};
use crate::error::{Error, Result};
use crate::finite::{FiniteSpace, Mask};
use crate::{Int, IntMatrix};

/// Finitely presented abelian group over the integers.
pub type Group = Presented<Int>;

/// Default bound on the number of opens of `U` for cover enumeration.
pub const DEFAULT_COVER_CAP: usize = 24;
const COVER_BUDGET: usize = 200_000;

/// A presheaf of finitely presented abelian groups on a finite space, stored
/// on every open together with the restriction along every inclusion.
#[derive(Clone, Debug)]
pub struct Presheaf {
    space: FiniteSpace,
    groups: BTreeMap<Mask, Group>,
    /// `(U, V) ↦ F(U) → F(V)` for `V ⊆ U`, as `F(V).gens x F(U).gens`.
    restrictions: BTreeMap<(Mask, Mask), IntMatrix>,
}

/// Which sheaf axiom a cover violates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoverViolation {
    pub open: Mask,
    pub cover: Vec<Mask>,
}

impl Presheaf {
    /// Validated constructor: shapes, well-definedness and functoriality.
    pub fn new(
        space: FiniteSpace,
        groups: BTreeMap<Mask, Group>,
        restrictions: BTreeMap<(Mask, Mask), IntMatrix>,
    ) -> Result<Self> {
        let f = Presheaf {
            space,
            groups,
            restrictions,
        };
        f.check_functorial()?;
        Ok(f)
    }

    /// Builds a presheaf from rules without validation; the rules must be
    /// functorial.
    pub fn from_rules<G, R>(space: &FiniteSpace, mut group: G, mut restrict: R) -> Self
    where
        G: FnMut(Mask) -> Group,
        R: FnMut(Mask, Mask) -> IntMatrix,
    {
        let opens = space.opens().to_vec();
        let groups: BTreeMap<Mask, Group> = opens.iter().map(|&u| (u, group(u))).collect();
        let mut restrictions = BTreeMap::new();
        for &u in &opens {
            for &v in &opens {
                if v & !u == 0 {
                    restrictions.insert((u, v), restrict(u, v));
                }
            }
        }
        Presheaf {
            space: space.clone(),
            groups,
            restrictions,
        }
    }

    pub fn space(&self) -> &FiniteSpace {
        &self.space
    }

    pub fn group(&self, u: Mask) -> &Group {
        &self.groups[&u]
    }

    pub fn restriction(&self, u: Mask, v: Mask) -> &IntMatrix {
        &self.restrictions[&(u, v)]
    }

    pub fn hom(&self, u: Mask, v: Mask) -> GroupHom<Int> {
        GroupHom {
            source: self.group(u).clone(),
            target: self.group(v).clone(),
            matrix: self.restriction(u, v).clone(),
        }
    }

    /// `F(U_x)`, which is the stalk at `x` on a finite space.
    pub fn stalk(&self, x: usize) -> &Group {
        self.group(self.space.minimal_open(x))
    }

    /// Restriction between stalks for `x <= y`.
    pub fn stalk_map(&self, y: usize, x: usize) -> &IntMatrix {
        self.restriction(self.space.minimal_open(y), self.space.minimal_open(x))
    }

    pub fn global_sections(&self) -> &Group {
        self.group(self.space.full())
    }

    pub fn check_functorial(&self) -> Result<()> {
        let opens = self.space.opens();
        for &u in opens {
            let g = self.groups.get(&u).ok_or_else(|| {
                Error::NotFunctorial(format!("no group on {}", self.space.format_mask(u)))
            })?;
            if u == 0 && !g.summary().is_trivial() {
                return Err(Error::NotFunctorial(
                    "value on the empty set is nonzero".into(),
                ));
            }
        }
        let name = |m: Mask| self.space.format_mask(m);
        for &u in opens {
            for &v in opens {
                if v & !u != 0 {
                    continue;
                }
                let m = self.restrictions.get(&(u, v)).ok_or_else(|| {
                    Error::NotFunctorial(format!("missing restriction {} → {}", name(u), name(v)))
                })?;
                if m.rows() != self.group(v).gens || m.cols() != self.group(u).gens {
                    return Err(Error::NotFunctorial(format!(
                        "restriction {} → {} has wrong shape",
                        name(u),
                        name(v)
                    )));
                }
                if !self.hom(u, v).is_well_defined() {
                    return Err(Error::NotFunctorial(format!(
                        "restriction {} → {} ignores relations",
                        name(u),
                        name(v)
                    )));
                }
                if u == v && !self.equal_as_maps(m, &Matrix::identity(m.cols()), v) {
                    return Err(Error::NotFunctorial(format!(
                        "restriction on {} is not the identity",
                        name(u)
                    )));
                }
            }
        }
        for &u in opens {
            for &v in opens {
                if v & !u != 0 {
                    continue;
                }
                for &w in opens {
                    if w & !v != 0 {
                        continue;
                    }
                    let composed = self.restriction(v, w) * self.restriction(u, v);
                    if !self.equal_as_maps(&composed, self.restriction(u, w), w) {
                        return Err(Error::NotFunctorial(format!(
                            "restrictions {} → {} → {} do not compose",
                            name(u),
                            name(v),
                            name(w)
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// Equality of two maps into `F(target)` modulo its relations.
    fn equal_as_maps(&self, a: &IntMatrix, b: &IntMatrix, target: Mask) -> bool {
        let g = self.group(target);
        (0..a.cols()).all(|j| {
            let d: Vec<Int> = a
                .column(j)
                .into_iter()
                .zip(b.column(j))
                .map(|(x, y)| x - y)
                .collect();
            g.is_zero_element(&d)
        })
    }

    /// `A` on every nonempty open, identities as restrictions.
    pub fn constant_presheaf(space: &FiniteSpace, a: &Group) -> Self {
        Self::from_rules(
            space,
            |u| if u == 0 { Group::trivial() } else { a.clone() },
            |u, v| {
                if v == 0 {
                    Matrix::zeros(0, if u == 0 { 0 } else { a.gens })
                } else {
                    Matrix::identity(a.gens)
                }
            },
        )
    }

    /// Locally constant functions: `A` to the number of components of `U`.
    pub fn constant_sheaf(space: &FiniteSpace, a: &Group) -> Self {
        Self::from_rules(
            space,
            |u| Group::direct_sum(&vec![a.clone(); space.components(u).len()]),
            |u, v| {
                let cu = space.components(u);
                let cv = space.components(v);
                let k = a.gens;
                let mut m = Matrix::zeros(cv.len() * k, cu.len() * k);
                for (j, c) in cv.iter().enumerate() {
                    let i = cu
                        .iter()
                        .position(|d| c & !d == 0)
                        .expect("component lies in a component");
                    for t in 0..k {
                        m.set(j * k + t, i * k + t, Int::one());
                    }
                }
                m
            },
        )
    }

    /// `A` on opens containing `x`, zero elsewhere.
    pub fn skyscraper(space: &FiniteSpace, x: usize, a: &Group) -> Self {
        let has = |u: Mask| u >> x & 1 == 1;
        Self::from_rules(
            space,
            |u| if has(u) { a.clone() } else { Group::trivial() },
            |u, v| match (has(u), has(v)) {
                (true, true) => Matrix::identity(a.gens),
                (true, false) => Matrix::zeros(0, a.gens),
                _ => Matrix::zeros(0, 0),
            },
        )
    }

    /// `None` if every restriction from the whole space is surjective;
    /// otherwise an open and a generator of its group not in the image.
    pub fn flasque_witness(&self) -> Option<(Mask, usize)> {
        let x = self.space.full();
        self.space
            .opens()
            .iter()
            .find_map(|&u| self.hom(x, u).surjectivity_witness().map(|g| (u, g)))
    }

    pub fn is_flasque(&self) -> bool {
        self.flasque_witness().is_none()
    }

    /// Irredundant covers of `u` by proper nonempty open subsets.
    pub fn covers(&self, u: Mask, cap: usize) -> Result<Vec<Vec<Mask>>> {
        let candidates: Vec<Mask> = self
            .space
            .opens_within(u)
            .into_iter()
            .filter(|&v| v != 0 && v != u)
            .collect();
        if candidates.len() > cap {
            return Err(Error::CapExceeded(format!(
                "{} has {} proper open subsets, cover cap is {cap}",
                self.space.format_mask(u),
                candidates.len()
            )));
        }
        let mut found = BTreeSet::new();
        let mut chosen = Vec::new();
        let mut steps = 0usize;
        cover_search(u, &candidates, &mut chosen, &mut found, &mut steps)?;
        Ok(found.into_iter().collect())
    }

    /// Restriction `F(U) → Π F(V_i)` and the matching-family map
    /// `Π F(V_i) → Π_{i<j} F(V_i ∩ V_j)`.
    fn cover_maps(&self, u: Mask, cover: &[Mask]) -> (GroupHom<Int>, GroupHom<Int>) {
        let parts: Vec<Group> = cover.iter().map(|&v| self.group(v).clone()).collect();
        let product = Group::direct_sum(&parts);
        let offsets: Vec<usize> = parts
            .iter()
            .scan(0, |acc, p| {
                let o = *acc;
                *acc += p.gens;
                Some(o)
            })
            .collect();
        let mut r = Matrix::zeros(product.gens, self.group(u).gens);
        for (i, &v) in cover.iter().enumerate() {
            let m = self.restriction(u, v);
            for a in 0..m.rows() {
                for b in 0..m.cols() {
                    r.set(offsets[i] + a, b, m.get(a, b).clone());
                }
            }
        }
        let pairs: Vec<(usize, usize)> = (0..cover.len())
            .flat_map(|i| (i + 1..cover.len()).map(move |j| (i, j)))
            .collect();
        let overlaps: Vec<Group> = pairs
            .iter()
            .map(|&(i, j)| self.group(cover[i] & cover[j]).clone())
            .collect();
        let target = Group::direct_sum(&overlaps);
        let mut d = Matrix::zeros(target.gens, product.gens);
        let mut row = 0;
        for (&(i, j), g) in pairs.iter().zip(&overlaps) {
            let w = cover[i] & cover[j];
            for (idx, sign) in [(i, Int::one()), (j, -Int::one())] {
                let m = self.restriction(cover[idx], w);
                for a in 0..m.rows() {
                    for b in 0..m.cols() {
                        d.set(
                            row + a,
                            offsets[idx] + b,
                            m.get(a, b).clone() * sign.clone(),
                        );
                    }
                }
            }
            row += g.gens;
        }
        let restrict = GroupHom {
            source: self.group(u).clone(),
            target: product.clone(),
            matrix: r,
        };
        let matching = GroupHom {
            source: product,
            target,
            matrix: d,
        };
        (restrict, matching)
    }

    /// First cover (over all opens) with a matching family that has no
    /// gluing, or `None` if every matching family glues.
    pub fn gluability_violation(&self, cap: usize) -> Result<Option<CoverViolation>> {
        for &u in self.space.opens() {
            for cover in self.covers(u, cap)? {
                let (restrict, matching) = self.cover_maps(u, &cover);
                let (_, families) = matching.kernel();
                if (0..families.cols()).any(|j| !restrict.image_contains(&families.column(j))) {
                    return Ok(Some(CoverViolation { open: u, cover }));
                }
            }
        }
        Ok(None)
    }

    pub fn satisfies_gluability(&self) -> Result<bool> {
        Ok(self.gluability_violation(DEFAULT_COVER_CAP)?.is_none())
    }

    /// First cover on which restriction to the cover is not injective.
    pub fn identity_violation(&self, cap: usize) -> Result<Option<CoverViolation>> {
        for &u in self.space.opens() {
            for cover in self.covers(u, cap)? {
                let (restrict, _) = self.cover_maps(u, &cover);
                if !restrict.is_injective() {
                    return Ok(Some(CoverViolation { open: u, cover }));
                }
            }
        }
        Ok(None)
    }

    /// Both sheaf axioms on every enumerated cover.
    pub fn is_sheaf(&self) -> Result<bool> {
        Ok(self.identity_violation(DEFAULT_COVER_CAP)?.is_none()
            && self.gluability_violation(DEFAULT_COVER_CAP)?.is_none())
    }
}

fn cover_search(
    u: Mask,
    candidates: &[Mask],
    chosen: &mut Vec<Mask>,
    found: &mut BTreeSet<Vec<Mask>>,
    steps: &mut usize,
) -> Result<()> {
    *steps += 1;
    if *steps > COVER_BUDGET {
        return Err(Error::CapExceeded(format!(
            "cover enumeration exceeded {COVER_BUDGET} steps"
        )));
    }
    let covered = chosen.iter().fold(0, |a, b| a | b);
    let missing = u & !covered;
    if missing == 0 {
        let irredundant = (0..chosen.len()).all(|i| {
            let others = chosen
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .fold(0, |a, (_, b)| a | b);
            chosen[i] & !others != 0
        });
        if irredundant {
            let mut c = chosen.clone();
            c.sort_unstable();
            found.insert(c);
        }
        return Ok(());
    }
    let p = missing.trailing_zeros();
    for &v in candidates {
        if v >> p & 1 == 1 && !chosen.contains(&v) {
            chosen.push(v);
            cover_search(u, candidates, chosen, found, steps)?;
            chosen.pop();
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z() -> Group {
        Group::free(1)
    }

    #[test]
    fn constant_sheaf_sections() {
        let x = FiniteSpace::discrete(3);
        let f = Presheaf::constant_sheaf(&x, &z());
        assert_eq!(f.global_sections().summary().free_rank, 3);
        f.check_functorial().unwrap();
        assert!(f.is_sheaf().unwrap());
    }

    #[test]
    fn constant_presheaf_on_pseudocircle_fails_gluability() {
        let x = FiniteSpace::pseudocircle();
        let f = Presheaf::constant_presheaf(&x, &z());
        f.check_functorial().unwrap();
        let v = f
            .gluability_violation(DEFAULT_COVER_CAP)
            .unwrap()
            .expect("two disjoint open points glue badly");
        assert!(v.cover.len() >= 2);
    }

    #[test]
    fn skyscraper_is_flasque() {
        let x = FiniteSpace::five_point();
        for p in 0..x.len() {
            assert!(Presheaf::skyscraper(&x, p, &z()).is_flasque());
        }
    }

    #[test]
    fn constant_sheaf_on_v_space_not_flasque() {
        // a, b open; c lies over both, so X is connected but {a, b} is not
        let x =
            FiniteSpace::from_basis(["a", "b", "c"].map(String::from).to_vec(), &[0b001, 0b010])
                .unwrap();
        let f = Presheaf::constant_sheaf(&x, &z());
        let (u, _) = f.flasque_witness().expect("diagonal does not reach Z ⊕ Z");
        assert_eq!(u, 0b011);
        assert!(Presheaf::constant_sheaf(&FiniteSpace::discrete(2), &z()).is_flasque());
    }
}
