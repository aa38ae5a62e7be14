use std::collections::BTreeMap;

use num_traits::One;

use crate::algebra::Matrix;
use crate::error::{Error, Result};
use crate::finite::{FiniteSpace, Mask};
use crate::sheaf::{Group, Presheaf};
use crate::Int;

/// Cochains whose value on a singular simplex depends only on its image.
///
/// In degree `n >= 1` the images of simplices in a finite space are exactly
/// the nonempty connected subsets, so `F(U)` is `A^{connected subsets of U}`;
/// in degree 0 it is `A^{points of U}`. Restriction forgets the subsets not
/// contained in the smaller open.
#[derive(Clone, Debug)]
pub struct ImageCochains {
    pub degree: usize,
    pub coefficient: Group,
    pub presheaf: Presheaf,
    /// Per open, the index set in generator order.
    pub domains: BTreeMap<Mask, Vec<Mask>>,
}

impl ImageCochains {
    pub fn new(space: &FiniteSpace, degree: usize, coefficient: &Group) -> Self {
        let domain = |u: Mask| -> Vec<Mask> {
            if degree == 0 {
                space.members(u).into_iter().map(|x| 1 << x).collect()
            } else {
                space.connected_subsets(u)
            }
        };
        let domains: BTreeMap<Mask, Vec<Mask>> =
            space.opens().iter().map(|&u| (u, domain(u))).collect();
        let k = coefficient.gens;
        let presheaf = Presheaf::from_rules(
            space,
            |u| Group::direct_sum(&vec![coefficient.clone(); domains[&u].len()]),
            |u, v| {
                let (du, dv) = (&domains[&u], &domains[&v]);
                let mut m = Matrix::zeros(dv.len() * k, du.len() * k);
                for (j, s) in dv.iter().enumerate() {
                    let i = du
                        .iter()
                        .position(|t| t == s)
                        .expect("subsets of V are subsets of U");
                    for g in 0..k {
                        m.set(j * k + g, i * k + g, Int::one());
                    }
                }
                m
            },
        );
        ImageCochains {
            degree,
            coefficient: coefficient.clone(),
            presheaf,
            domains,
        }
    }

    /// The cochain on `u` given by a rule on images (single-generator
    /// coefficients only).
    pub fn cochain<F: Fn(Mask) -> i64>(&self, u: Mask, rule: F) -> Result<Vec<Int>> {
        if self.coefficient.gens != 1 {
            return Err(Error::Precondition(
                "rules need a cyclic coefficient group".into(),
            ));
        }
        Ok(self.domains[&u]
            .iter()
            .map(|&s| Int::from(rule(s)))
            .collect())
    }

    /// Value of a cochain on `u` at the image `s`.
    pub fn value(&self, u: Mask, cochain: &[Int], s: Mask) -> Option<Int> {
        self.domains[&u]
            .iter()
            .position(|&t| t == s)
            .map(|i| cochain[i].clone())
    }

    pub fn restrict(&self, u: Mask, v: Mask, cochain: &[Int]) -> Vec<Int> {
        self.presheaf.restriction(u, v).mul_vec(cochain)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gluability_on_small_spaces() {
        for x in [
            FiniteSpace::pseudocircle(),
            FiniteSpace::sierpinski(),
            FiniteSpace::discrete(3),
        ] {
            for d in 0..=1 {
                let f = ImageCochains::new(&x, d, &Group::free(1));
                f.presheaf.check_functorial().unwrap();
                assert!(f.presheaf.satisfies_gluability().unwrap());
            }
        }
    }
}
