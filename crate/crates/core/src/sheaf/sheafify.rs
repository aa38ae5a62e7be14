use std::collections::BTreeMap;

use num_traits::One;

use crate::algebra::{coordinates, GroupHom, Matrix};
use crate::error::Result;
use crate::finite::Mask;
use crate::sheaf::{Group, Presheaf};
use crate::{Int, IntMatrix};

/// The sheaf of compatible stalk families and the unit `F → F⁺`.
#[derive(Clone, Debug)]
pub struct Sheafification {
    pub sheaf: Presheaf,
    /// `U ↦ F(U) → F⁺(U)`.
    pub unit: BTreeMap<Mask, IntMatrix>,
    /// `U ↦` inclusion of `F⁺(U)` into `Π_{x∈U} F(U_x)` (generator columns).
    pub families: BTreeMap<Mask, IntMatrix>,
}

/// Generator offsets of the stalk product over the points of `u`.
fn stalk_layout(f: &Presheaf, u: Mask) -> (Vec<usize>, Vec<usize>, Group) {
    let pts = f.space().members(u);
    let parts: Vec<Group> = pts.iter().map(|&x| f.stalk(x).clone()).collect();
    let mut offsets = Vec::with_capacity(pts.len());
    let mut acc = 0;
    for p in &parts {
        offsets.push(acc);
        acc += p.gens;
    }
    (pts, offsets, Group::direct_sum(&parts))
}

fn put_block(m: &mut IntMatrix, r0: usize, c0: usize, block: &IntMatrix, sign: &Int) {
    for a in 0..block.rows() {
        for b in 0..block.cols() {
            m.set(r0 + a, c0 + b, block.get(a, b).clone() * sign.clone());
        }
    }
}

/// `F⁺(U)` = families `(s_x)_{x∈U}` with `s_y|_{U_x} = s_x` whenever `x <= y`.
pub fn sheafify(f: &Presheaf) -> Result<Sheafification> {
    let space = f.space().clone();
    let mut groups = BTreeMap::new();
    let mut families = BTreeMap::new();
    let mut unit = BTreeMap::new();
    for &u in space.opens() {
        let (pts, offsets, product) = stalk_layout(f, u);
        let pairs: Vec<(usize, usize)> = pts
            .iter()
            .enumerate()
            .flat_map(|(i, &x)| {
                pts.iter()
                    .enumerate()
                    .filter(move |(_, &y)| space_lt(f, x, y))
                    .map(move |(j, _)| (i, j))
            })
            .collect();
        let targets: Vec<Group> = pairs
            .iter()
            .map(|&(i, _)| f.stalk(pts[i]).clone())
            .collect();
        let target = Group::direct_sum(&targets);
        let mut phi = Matrix::zeros(target.gens, product.gens);
        let mut row = 0;
        for &(i, j) in &pairs {
            let gx = f.stalk(pts[i]).gens;
            put_block(
                &mut phi,
                row,
                offsets[i],
                &Matrix::identity(gx),
                &Int::one(),
            );
            put_block(
                &mut phi,
                row,
                offsets[j],
                f.stalk_map(pts[j], pts[i]),
                &-Int::one(),
            );
            row += gx;
        }
        let compat = GroupHom {
            source: product.clone(),
            target,
            matrix: phi,
        };
        let (k, basis) = compat.kernel();
        // unit: s ↦ (s|_{U_x})_x
        let mut stacked = Matrix::zeros(product.gens, f.group(u).gens);
        for (i, &x) in pts.iter().enumerate() {
            put_block(
                &mut stacked,
                offsets[i],
                0,
                f.restriction(u, space.minimal_open(x)),
                &Int::one(),
            );
        }
        let eta =
            coordinates(&basis, &stacked).expect("restricted sections are compatible families");
        groups.insert(u, k);
        families.insert(u, basis);
        unit.insert(u, eta);
    }
    let mut restrictions = BTreeMap::new();
    for &u in space.opens() {
        let (pts_u, off_u, prod_u) = stalk_layout(f, u);
        for &v in space.opens() {
            if v & !u != 0 {
                continue;
            }
            let (pts_v, off_v, prod_v) = stalk_layout(f, v);
            let mut proj = Matrix::zeros(prod_v.gens, prod_u.gens);
            for (j, x) in pts_v.iter().enumerate() {
                let i = pts_u.iter().position(|y| y == x).expect("V ⊆ U");
                put_block(
                    &mut proj,
                    off_v[j],
                    off_u[i],
                    &Matrix::identity(f.stalk(*x).gens),
                    &Int::one(),
                );
            }
            let image = &proj * &families[&u];
            let m =
                coordinates(&families[&v], &image).expect("restricted families stay compatible");
            restrictions.insert((u, v), m);
        }
    }
    let sheaf = Presheaf::from_rules(
        &space,
        |u| groups[&u].clone(),
        |u, v| restrictions[&(u, v)].clone(),
    );
    Ok(Sheafification {
        sheaf,
        unit,
        families,
    })
}

fn space_lt(f: &Presheaf, x: usize, y: usize) -> bool {
    f.space().lt(x, y)
}

impl Sheafification {
    pub fn unit_hom(&self, source: &Presheaf, u: Mask) -> GroupHom<Int> {
        GroupHom {
            source: source.group(u).clone(),
            target: self.sheaf.group(u).clone(),
            matrix: self.unit[&u].clone(),
        }
    }

    /// Whether the unit is an isomorphism on every open.
    pub fn unit_is_iso(&self, source: &Presheaf) -> bool {
        source.space().opens().iter().all(|&u| {
            let h = self.unit_hom(source, u);
            h.is_surjective() && h.is_injective()
        })
    }

    /// Naturality: `unit_V ∘ ρ_{UV} = ρ⁺_{UV} ∘ unit_U` modulo relations.
    pub fn unit_is_natural(&self, source: &Presheaf) -> bool {
        let space = source.space();
        space.opens().iter().all(|&u| {
            space.opens().iter().filter(|&&v| v & !u == 0).all(|&v| {
                let lhs = &self.unit[&v] * source.restriction(u, v);
                let rhs = self.sheaf.restriction(u, v) * &self.unit[&u];
                let g = self.sheaf.group(v);
                (0..lhs.cols()).all(|j| {
                    let d: Vec<Int> = lhs
                        .column(j)
                        .into_iter()
                        .zip(rhs.column(j))
                        .map(|(a, b)| a - b)
                        .collect();
                    g.is_zero_element(&d)
                })
            })
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::finite::FiniteSpace;

    #[test]
    fn constant_presheaf_on_discrete_space() {
        let x = FiniteSpace::discrete(2);
        let f = Presheaf::constant_presheaf(&x, &Group::free(1));
        let s = sheafify(&f).unwrap();
        assert_eq!(s.sheaf.global_sections().summary().free_rank, 2);
        assert!(s.unit_is_natural(&f));
        assert!(!s.unit_is_iso(&f));
        s.sheaf.check_functorial().unwrap();
        assert!(s.sheaf.is_sheaf().unwrap());
    }

    #[test]
    fn sheaf_unit_is_iso_and_idempotent() {
        let x = FiniteSpace::pseudocircle();
        let f = Presheaf::constant_sheaf(&x, &Group::cyclic(Int::from(3)));
        let s = sheafify(&f).unwrap();
        assert!(s.unit_is_iso(&f));
        let again = sheafify(&s.sheaf).unwrap();
        assert!(again.unit_is_iso(&s.sheaf));
    }
}
