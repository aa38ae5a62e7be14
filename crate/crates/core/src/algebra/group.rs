use std::fmt;

use serde::Serialize;

use crate::algebra::smith::{smith_normal_form, solve_with};
use crate::algebra::Matrix;
use crate::error::{Error, Result};
use crate::scalar::Ring;

/// Isomorphism type of a finitely generated abelian group:
/// `Z^free_rank ⊕ Z/t_1 ⊕ ... ⊕ Z/t_k` with `t_1 | t_2 | ...`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct GroupSummary<T> {
    pub free_rank: usize,
    pub torsion: Vec<T>,
}

impl<T: Ring> GroupSummary<T> {
    pub fn is_trivial(&self) -> bool {
        self.free_rank == 0 && self.torsion.is_empty()
    }
}

impl<T: Ring> fmt::Display for GroupSummary<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        match self.free_rank {
            0 => {}
            1 => parts.push("Z".to_string()),
            r => parts.push(format!("Z^{r}")),
        }
        for t in &self.torsion {
            parts.push(format!("Z/{t}"));
        }
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

/// `Z^gens / (column span of rels)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Presented<T> {
    pub gens: usize,
    pub rels: Matrix<T>,
}

impl<T: Ring> Presented<T> {
    pub fn free(n: usize) -> Self {
        Presented {
            gens: n,
            rels: Matrix::zeros(n, 0),
        }
    }

    pub fn trivial() -> Self {
        Self::free(0)
    }

    /// `Z/m` on a single generator.
    pub fn cyclic(m: T) -> Self {
        Presented {
            gens: 1,
            rels: Matrix::from_vec(1, 1, vec![m]),
        }
    }

    pub fn new(gens: usize, rels: Matrix<T>) -> Result<Self> {
        if rels.rows() != gens {
            return Err(Error::Dimension(format!(
                "relation matrix has {} rows, expected {gens}",
                rels.rows()
            )));
        }
        Ok(Presented { gens, rels })
    }

    pub fn summary(&self) -> GroupSummary<T> {
        let s = smith_normal_form(&self.rels);
        GroupSummary {
            free_rank: self.gens - s.rank,
            torsion: s.torsion(),
        }
    }

    /// Whether `v` represents the zero class.
    pub fn is_zero_element(&self, v: &[T]) -> bool {
        v.iter().all(|x| x.is_zero()) || solve_with(&smith_normal_form(&self.rels), v).is_some()
    }

    /// An isomorphic presentation `Z^r ⊕ Z/d_1 ⊕ ...` with no unit
    /// invariant factors, with the mutually inverse change-of-generator
    /// matrices `(to_new, to_old)`.
    pub fn simplify(&self) -> (Presented<T>, Matrix<T>, Matrix<T>) {
        let s = smith_normal_form(&self.rels);
        let keep: Vec<usize> = (0..self.gens)
            .filter(|&i| i >= s.rank || !s.d.get(i, i).is_one())
            .collect();
        let to_new = s.u.select_rows(&keep);
        let to_old = s.u_inv.select_cols(&keep);
        let torsion: Vec<usize> = keep.iter().copied().filter(|&i| i < s.rank).collect();
        let mut rels = Matrix::zeros(keep.len(), torsion.len());
        for (j, &i) in torsion.iter().enumerate() {
            rels.set(j, j, s.d.get(i, i).clone());
        }
        (
            Presented {
                gens: keep.len(),
                rels,
            },
            to_new,
            to_old,
        )
    }

    pub fn direct_sum(parts: &[Presented<T>]) -> Self {
        let gens: usize = parts.iter().map(|p| p.gens).sum();
        let nrels: usize = parts.iter().map(|p| p.rels.cols()).sum();
        let mut rels = Matrix::zeros(gens, nrels);
        let (mut r0, mut c0) = (0, 0);
        for p in parts {
            for i in 0..p.gens {
                for j in 0..p.rels.cols() {
                    rels.set(r0 + i, c0 + j, p.rels.get(i, j).clone());
                }
            }
            r0 += p.gens;
            c0 += p.rels.cols();
        }
        Presented { gens, rels }
    }
}

/// Homomorphism between presented groups, given on generators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupHom<T> {
    pub source: Presented<T>,
    pub target: Presented<T>,
    /// `target.gens x source.gens`
    pub matrix: Matrix<T>,
}

impl<T: Ring> GroupHom<T> {
    pub fn new(source: Presented<T>, target: Presented<T>, matrix: Matrix<T>) -> Result<Self> {
        if matrix.rows() != target.gens || matrix.cols() != source.gens {
            return Err(Error::Dimension(format!(
                "hom matrix is {}x{}, expected {}x{}",
                matrix.rows(),
                matrix.cols(),
                target.gens,
                source.gens
            )));
        }
        let h = GroupHom {
            source,
            target,
            matrix,
        };
        if !h.is_well_defined() {
            return Err(Error::Dimension("hom does not respect relations".into()));
        }
        Ok(h)
    }

    /// Relations of the source map into relations of the target.
    pub fn is_well_defined(&self) -> bool {
        let img = &self.matrix * &self.source.rels;
        let s = smith_normal_form(&self.target.rels);
        (0..img.cols()).all(|j| {
            let c = img.column(j);
            c.iter().all(|x| x.is_zero()) || solve_with(&s, &c).is_some()
        })
    }

    /// Kernel as a presented group together with its inclusion
    /// (`source.gens x kernel.gens`).
    pub fn kernel(&self) -> (Presented<T>, Matrix<T>) {
        let a = self.source.gens;
        let stacked = self.matrix.hstack(&self.target.rels);
        let k = crate::algebra::kernel_basis(&stacked);
        let top: Vec<usize> = (0..a).collect();
        let gens = k.select_rows(&top);
        let basis = lattice_basis(&gens);
        let rels =
            coordinates(&basis, &self.source.rels).expect("source relations lie in the kernel");
        (
            Presented {
                gens: basis.cols(),
                rels,
            },
            basis,
        )
    }

    pub fn cokernel(&self) -> Presented<T> {
        Presented {
            gens: self.target.gens,
            rels: self.target.rels.hstack(&self.matrix),
        }
    }

    /// `None` if surjective, otherwise a target generator index not hit.
    pub fn surjectivity_witness(&self) -> Option<usize> {
        let stacked = self.matrix.hstack(&self.target.rels);
        let s = smith_normal_form(&stacked);
        (0..self.target.gens).find(|&i| {
            let mut e = vec![T::zero(); self.target.gens];
            e[i] = T::one();
            solve_with(&s, &e).is_none()
        })
    }

    /// Whether the target element `c` lies in the image.
    pub fn image_contains(&self, c: &[T]) -> bool {
        let stacked = self.matrix.hstack(&self.target.rels);
        solve_with(&smith_normal_form(&stacked), c).is_some()
    }

    pub fn is_surjective(&self) -> bool {
        self.surjectivity_witness().is_none()
    }

    pub fn is_injective(&self) -> bool {
        self.kernel().0.summary().is_trivial()
    }

    pub fn compose(&self, after: &GroupHom<T>) -> GroupHom<T> {
        GroupHom {
            source: self.source.clone(),
            target: after.target.clone(),
            matrix: &after.matrix * &self.matrix,
        }
    }
}

/// A basis (as columns) of the integer lattice spanned by the columns of `m`.
pub fn lattice_basis<T: Ring>(m: &Matrix<T>) -> Matrix<T> {
    let s = smith_normal_form(m);
    let cols: Vec<Vec<T>> = (0..s.rank)
        .map(|i| {
            let d = s.d.get(i, i).clone();
            s.u_inv
                .column(i)
                .into_iter()
                .map(|x| x * d.clone())
                .collect()
        })
        .collect();
    Matrix::from_columns(m.rows(), &cols)
}

/// Coordinates of the columns of `n` in a basis `b` of full column rank,
/// or `None` if some column is outside the span.
pub fn coordinates<T: Ring>(b: &Matrix<T>, n: &Matrix<T>) -> Option<Matrix<T>> {
    let s = smith_normal_form(b);
    let cols: Option<Vec<Vec<T>>> = (0..n.cols())
        .map(|j| solve_with(&s, &n.column(j)))
        .collect();
    Some(Matrix::from_columns(b.cols(), &cols?))
}

/// Homology of `A --incoming--> B --outgoing--> C` at `B`, where `B` and
/// `C` are the source and target of `outgoing` and `incoming` has
/// `outgoing.source.gens` rows.
pub fn subquotient<T: Ring>(incoming: &Matrix<T>, outgoing: &GroupHom<T>) -> Result<Presented<T>> {
    if incoming.rows() != outgoing.source.gens {
        return Err(Error::Dimension(
            "incoming map does not land in the middle group".into(),
        ));
    }
    let (ker, basis) = outgoing.kernel();
    let rels = coordinates(&basis, &incoming.hstack(&outgoing.source.rels))
        .ok_or(Error::NotAComplex(0))?;
    Ok(Presented {
        gens: ker.gens,
        rels,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kernel_of_mod_map() {
        // Z -> Z/4, 1 |-> 2 has kernel 2Z ≅ Z
        let h = GroupHom::new(
            Presented::free(1),
            Presented::cyclic(4i64),
            Matrix::from_vec(1, 1, vec![2]),
        )
        .unwrap();
        let (k, inc) = h.kernel();
        assert_eq!(
            k.summary(),
            GroupSummary {
                free_rank: 1,
                torsion: vec![]
            }
        );
        assert_eq!(inc.get(0, 0).abs(), 2);
        assert!(!h.is_surjective());
        assert_eq!(h.cokernel().summary().torsion, vec![2]);
    }

    #[test]
    fn subquotient_with_torsion() {
        // Z --2--> Z --0--> 0 gives Z/2
        let out = GroupHom::new(
            Presented::free(1),
            Presented::trivial(),
            Matrix::zeros(0, 1),
        )
        .unwrap();
        let g = subquotient(&Matrix::from_vec(1, 1, vec![2i64]), &out).unwrap();
        assert_eq!(g.summary().to_string(), "Z/2");
    }

    #[test]
    fn simplify_drops_units() {
        let g = Presented::new(2, Matrix::from_rows(vec![vec![2i64, 0], vec![1, 3]], 2)).unwrap();
        let (h, to_new, to_old) = g.simplify();
        assert_eq!(h.gens, 1);
        assert_eq!(h.summary(), g.summary());
        let back = &to_new * &to_old;
        assert_eq!(back, Matrix::identity(1));
    }

    #[test]
    fn ill_defined_hom_rejected() {
        let r = GroupHom::new(
            Presented::cyclic(2i64),
            Presented::free(1),
            Matrix::from_vec(1, 1, vec![1]),
        );
        assert!(r.is_err());
    }
}
