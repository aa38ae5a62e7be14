use serde::{Deserialize, Serialize};

use crate::algebra::group::{subquotient, GroupHom, GroupSummary, Presented};
use crate::algebra::smith::{smith_normal_form, solve_with};
use crate::algebra::Matrix;
use crate::error::{Error, Result};
use crate::scalar::Ring;

/// Coefficient group for cohomology.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Coefficients {
    Integers,
    /// `Z/m`, `m > 0`.
    Mod(u64),
    /// Only ranks are reported.
    Rationals,
}

/// Bounded chain complex of free modules `C_lo, ..., C_hi`.
///
/// `boundaries[k]` is `∂_{lo+k}: C_{lo+k} -> C_{lo+k-1}` with columns indexed
/// by the source basis. The module below `lo` is the zero module.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainComplex<T> {
    lo: i64,
    ranks: Vec<usize>,
    boundaries: Vec<Matrix<T>>,
}

impl<T: Ring> ChainComplex<T> {
    pub fn new(lo: i64, ranks: Vec<usize>, boundaries: Vec<Matrix<T>>) -> Result<Self> {
        if ranks.len() != boundaries.len() {
            return Err(Error::Dimension(
                "one boundary matrix per degree expected".into(),
            ));
        }
        for (k, b) in boundaries.iter().enumerate() {
            let below = if k == 0 { 0 } else { ranks[k - 1] };
            if b.rows() != below || b.cols() != ranks[k] {
                return Err(Error::Dimension(format!(
                    "∂_{} is {}x{}, expected {}x{}",
                    lo + k as i64,
                    b.rows(),
                    b.cols(),
                    below,
                    ranks[k]
                )));
            }
        }
        for k in 1..boundaries.len() {
            if !(&boundaries[k - 1] * &boundaries[k]).is_zero() {
                return Err(Error::NotAComplex(lo + k as i64));
            }
        }
        Ok(ChainComplex {
            lo,
            ranks,
            boundaries,
        })
    }

    pub fn lo(&self) -> i64 {
        self.lo
    }

    pub fn hi(&self) -> i64 {
        self.lo + self.ranks.len() as i64 - 1
    }

    fn index(&self, n: i64) -> Option<usize> {
        (n >= self.lo && n <= self.hi()).then(|| (n - self.lo) as usize)
    }

    /// Rank of `C_n`; zero outside the range.
    pub fn rank(&self, n: i64) -> usize {
        self.index(n).map_or(0, |k| self.ranks[k])
    }

    /// `∂_n`, with zero-size matrices outside the range.
    pub fn boundary(&self, n: i64) -> Matrix<T> {
        match self.index(n) {
            Some(k) => self.boundaries[k].clone(),
            None => Matrix::zeros(self.rank(n - 1), self.rank(n)),
        }
    }

    fn range_check(&self, n: i64) -> Result<()> {
        match self.index(n) {
            Some(_) => Ok(()),
            None => Err(Error::DegreeOutOfRange {
                degree: n,
                lo: self.lo,
                hi: self.hi(),
            }),
        }
    }

    /// `ker ∂_n / im ∂_{n+1}`.
    pub fn homology(&self, n: i64) -> Result<GroupSummary<T>> {
        self.range_check(n)?;
        let out = smith_normal_form(&self.boundary(n));
        let inc = smith_normal_form(&self.boundary(n + 1));
        Ok(GroupSummary {
            free_rank: self.rank(n) - out.rank - inc.rank,
            torsion: inc.torsion(),
        })
    }

    /// Cohomology of `Hom(C_•, A)`. Degrees outside the range give 0.
    pub fn cohomology(&self, coefficients: &Coefficients, n: i64) -> Result<GroupSummary<T>> {
        if let Coefficients::Mod(0) = coefficients {
            return Err(Error::ZeroModulus);
        }
        if self.index(n).is_none() {
            return Ok(GroupSummary {
                free_rank: 0,
                torsion: vec![],
            });
        }
        let incoming = smith_normal_form(&self.boundary(n));
        let outgoing = smith_normal_form(&self.boundary(n + 1));
        match coefficients {
            Coefficients::Integers => Ok(GroupSummary {
                free_rank: self.rank(n) - incoming.rank - outgoing.rank,
                torsion: incoming.torsion(),
            }),
            Coefficients::Rationals => Ok(GroupSummary {
                free_rank: self.rank(n) - incoming.rank - outgoing.rank,
                torsion: vec![],
            }),
            Coefficients::Mod(m) => {
                let m = T::from_u64(*m).expect("modulus fits the ring");
                let cyclic = |r: usize| Presented {
                    gens: r,
                    rels: Matrix::identity(r).scale(&m),
                };
                let delta_out = self.boundary(n + 1).transpose();
                let delta_in = self.boundary(n).transpose();
                let hom = GroupHom {
                    source: cyclic(self.rank(n)),
                    target: cyclic(self.rank(n + 1)),
                    matrix: delta_out,
                };
                Ok(subquotient(&delta_in, &hom)?.summary())
            }
        }
    }

    /// Some `x` in degree `n+1` with `∂x = c`.
    pub fn solve_boundary(&self, n: i64, c: &[T]) -> Result<Vec<T>> {
        if c.len() != self.rank(n) {
            return Err(Error::Dimension(format!(
                "chain has length {}, C_{n} has rank {}",
                c.len(),
                self.rank(n)
            )));
        }
        if !self.boundary(n).mul_vec(c).iter().all(|x| x.is_zero()) {
            return Err(Error::NotACycle);
        }
        let b = self.boundary(n + 1);
        let x = solve_with(&smith_normal_form(&b), c).ok_or(Error::NotABoundary(n))?;
        debug_assert_eq!(b.mul_vec(&x), c);
        Ok(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mat(rows: Vec<Vec<i64>>, cols: usize) -> Matrix<i64> {
        Matrix::from_rows(rows, cols)
    }

    /// Vertices 0,1,2; edges 01, 02, 12 with ∂[a,b] = b - a.
    fn hollow_triangle() -> ChainComplex<i64> {
        let d1 = mat(vec![vec![-1, -1, 0], vec![1, 0, -1], vec![0, 1, 1]], 3);
        ChainComplex::new(0, vec![3, 3], vec![Matrix::zeros(0, 3), d1]).unwrap()
    }

    fn full_triangle() -> ChainComplex<i64> {
        let d1 = mat(vec![vec![-1, -1, 0], vec![1, 0, -1], vec![0, 1, 1]], 3);
        let d2 = mat(vec![vec![1], vec![-1], vec![1]], 1);
        ChainComplex::new(0, vec![3, 3, 1], vec![Matrix::zeros(0, 3), d1, d2]).unwrap()
    }

    #[test]
    fn homology_of_triangles() {
        assert_eq!(hollow_triangle().homology(1).unwrap().free_rank, 1);
        assert_eq!(full_triangle().homology(1).unwrap().free_rank, 0);
        assert_eq!(full_triangle().homology(0).unwrap().free_rank, 1);
        assert!(matches!(
            hollow_triangle().homology(5),
            Err(Error::DegreeOutOfRange { .. })
        ));
    }

    #[test]
    fn cohomology_coefficients() {
        let c = hollow_triangle();
        assert_eq!(
            c.cohomology(&Coefficients::Integers, 1).unwrap().free_rank,
            1
        );
        assert_eq!(
            c.cohomology(&Coefficients::Mod(2), 1).unwrap().torsion,
            vec![2]
        );
        assert!(c
            .cohomology(&Coefficients::Integers, -3)
            .unwrap()
            .is_trivial());
        assert_eq!(
            c.cohomology(&Coefficients::Mod(0), 1),
            Err(Error::ZeroModulus)
        );
    }

    #[test]
    fn rp2_like_torsion() {
        // C_1 = Z, C_2 = Z with ∂_2 = 2: H_1 = Z/2, H^2 = Z/2
        let c = ChainComplex::new(
            1,
            vec![1, 1],
            vec![Matrix::zeros(0, 1), mat(vec![vec![2]], 1)],
        )
        .unwrap();
        assert_eq!(c.homology(1).unwrap().torsion, vec![2]);
        assert_eq!(
            c.cohomology(&Coefficients::Integers, 2).unwrap().torsion,
            vec![2]
        );
        assert_eq!(
            c.cohomology(&Coefficients::Mod(2), 1).unwrap().torsion,
            vec![2]
        );
    }

    #[test]
    fn boundary_solving() {
        let cycle = vec![1, -1, 1];
        let x = full_triangle().solve_boundary(1, &cycle).unwrap();
        assert_eq!(full_triangle().boundary(2).mul_vec(&x), cycle);
        assert_eq!(
            hollow_triangle().solve_boundary(1, &cycle),
            Err(Error::NotABoundary(1))
        );
        assert_eq!(
            full_triangle().solve_boundary(1, &[1, 0, 0]),
            Err(Error::NotACycle)
        );
        assert_eq!(
            full_triangle().solve_boundary(1, &[0, 0, 0]).unwrap(),
            vec![0]
        );
    }

    #[test]
    fn rejects_non_complex() {
        let d1 = mat(vec![vec![1]], 1);
        let d2 = mat(vec![vec![1]], 1);
        assert_eq!(
            ChainComplex::new(0, vec![1, 1, 1], vec![Matrix::zeros(0, 1), d1, d2]),
            Err(Error::NotAComplex(2))
        );
    }
}
