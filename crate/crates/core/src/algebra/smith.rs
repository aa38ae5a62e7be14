use crate::algebra::Matrix;
use crate::scalar::Ring;

/// `u * a * v == d` with `u`, `v` unimodular and `d` diagonal with
/// `d[0] | d[1] | ... | d[rank-1]`, all positive.
#[derive(Clone, Debug)]
pub struct SmithDecomposition<T> {
    pub u: Matrix<T>,
    pub u_inv: Matrix<T>,
    pub d: Matrix<T>,
    pub v: Matrix<T>,
    pub rank: usize,
}

impl<T: Ring> SmithDecomposition<T> {
    /// Nonzero diagonal entries in order.
    pub fn diagonal(&self) -> Vec<T> {
        (0..self.rank).map(|i| self.d.get(i, i).clone()).collect()
    }

    /// Invariant factors strictly greater than one.
    pub fn torsion(&self) -> Vec<T> {
        self.diagonal()
            .into_iter()
            .filter(|x| !x.is_one())
            .collect()
    }
}

struct Work<T> {
    d: Matrix<T>,
    u: Matrix<T>,
    u_inv: Matrix<T>,
    v: Matrix<T>,
}

impl<T: Ring> Work<T> {
    fn swap_rows(&mut self, a: usize, b: usize) {
        self.d.swap_rows(a, b);
        self.u.swap_rows(a, b);
        self.u_inv.swap_cols(a, b);
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        self.d.swap_cols(a, b);
        self.v.swap_cols(a, b);
    }

    /// row[target] += k * row[source]
    fn add_row(&mut self, target: usize, source: usize, k: &T) {
        for j in 0..self.d.cols() {
            let v = self.d.get(target, j).clone() + k.clone() * self.d.get(source, j).clone();
            self.d.set(target, j, v);
        }
        for j in 0..self.u.cols() {
            let v = self.u.get(target, j).clone() + k.clone() * self.u.get(source, j).clone();
            self.u.set(target, j, v);
        }
        // inverse operation applied on the right: col[source] -= k * col[target]
        for i in 0..self.u_inv.rows() {
            let v =
                self.u_inv.get(i, source).clone() - k.clone() * self.u_inv.get(i, target).clone();
            self.u_inv.set(i, source, v);
        }
    }

    /// col[target] += k * col[source]
    fn add_col(&mut self, target: usize, source: usize, k: &T) {
        for i in 0..self.d.rows() {
            let v = self.d.get(i, target).clone() + k.clone() * self.d.get(i, source).clone();
            self.d.set(i, target, v);
        }
        for i in 0..self.v.rows() {
            let v = self.v.get(i, target).clone() + k.clone() * self.v.get(i, source).clone();
            self.v.set(i, target, v);
        }
    }

    fn negate_row(&mut self, r: usize) {
        for j in 0..self.d.cols() {
            let v = -self.d.get(r, j).clone();
            self.d.set(r, j, v);
        }
        for j in 0..self.u.cols() {
            let v = -self.u.get(r, j).clone();
            self.u.set(r, j, v);
        }
        for i in 0..self.u_inv.rows() {
            let v = -self.u_inv.get(i, r).clone();
            self.u_inv.set(i, r, v);
        }
    }
}

fn better<T: Ring>(cand: &T, best: &Option<(T, usize, usize)>) -> bool {
    match best {
        None => true,
        Some((b, _, _)) => cand.abs() < *b,
    }
}

/// Smith normal form with the deterministic pivot rule "smallest absolute
/// value, ties broken by lowest row then lowest column".
pub fn smith_normal_form<T: Ring>(a: &Matrix<T>) -> SmithDecomposition<T> {
    let (m, n) = (a.rows(), a.cols());
    let mut w = Work {
        d: a.clone(),
        u: Matrix::identity(m),
        u_inv: Matrix::identity(m),
        v: Matrix::identity(n),
    };
    let mut t = 0;
    while t < m.min(n) {
        let mut best: Option<(T, usize, usize)> = None;
        for i in t..m {
            for j in t..n {
                let x = w.d.get(i, j);
                if !x.is_zero() && better(x, &best) {
                    best = Some((x.abs(), i, j));
                }
            }
        }
        let Some((_, pi, pj)) = best else { break };
        w.swap_rows(t, pi);
        w.swap_cols(t, pj);
        loop {
            let p = w.d.get(t, t).clone();
            let mut clean = true;
            for i in t + 1..m {
                let x = w.d.get(i, t).clone();
                if x.is_zero() {
                    continue;
                }
                let q = x.div_floor(&p);
                w.add_row(i, t, &-q);
                if !w.d.get(i, t).is_zero() {
                    clean = false;
                }
            }
            for j in t + 1..n {
                let x = w.d.get(t, j).clone();
                if x.is_zero() {
                    continue;
                }
                let q = x.div_floor(&p);
                w.add_col(j, t, &-q);
                if !w.d.get(t, j).is_zero() {
                    clean = false;
                }
            }
            if !clean {
                // move the smallest remainder in row t / column t to the pivot
                let mut best: Option<(T, usize, usize)> = None;
                for i in t + 1..m {
                    let x = w.d.get(i, t);
                    if !x.is_zero() && better(x, &best) {
                        best = Some((x.abs(), i, t));
                    }
                }
                for j in t + 1..n {
                    let x = w.d.get(t, j);
                    if !x.is_zero() && better(x, &best) {
                        best = Some((x.abs(), t, j));
                    }
                }
                if let Some((_, bi, bj)) = best {
                    w.swap_rows(t, bi);
                    w.swap_cols(t, bj);
                }
                continue;
            }
            let mut offender = None;
            'outer: for i in t + 1..m {
                for j in t + 1..n {
                    if !w.d.get(i, j).is_multiple_of(&p) {
                        offender = Some(i);
                        break 'outer;
                    }
                }
            }
            match offender {
                Some(i) => w.add_row(t, i, &T::one()),
                None => break,
            }
        }
        if w.d.get(t, t).is_negative() {
            w.negate_row(t);
        }
        t += 1;
    }
    SmithDecomposition {
        u: w.u,
        u_inv: w.u_inv,
        d: w.d,
        v: w.v,
        rank: t,
    }
}

/// Basis (as columns) of the integer kernel `{x : a x = 0}`.
pub fn kernel_basis<T: Ring>(a: &Matrix<T>) -> Matrix<T> {
    let s = smith_normal_form(a);
    let keep: Vec<usize> = (s.rank..a.cols()).collect();
    s.v.select_cols(&keep)
}

/// Some integer solution of `a x = c`, if one exists.
pub fn solve<T: Ring>(a: &Matrix<T>, c: &[T]) -> Option<Vec<T>> {
    solve_with(&smith_normal_form(a), c)
}

pub(crate) fn solve_with<T: Ring>(s: &SmithDecomposition<T>, c: &[T]) -> Option<Vec<T>> {
    let uc = s.u.mul_vec(c);
    let n = s.v.rows();
    let mut y = vec![T::zero(); n];
    for (i, val) in uc.iter().enumerate() {
        if i < s.rank {
            let di = s.d.get(i, i);
            if !val.is_multiple_of(di) {
                return None;
            }
            y[i] = val.clone() / di.clone();
        } else if !val.is_zero() {
            return None;
        }
    }
    Some(s.v.mul_vec(&y))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: Vec<Vec<i64>>, cols: usize) -> Matrix<i64> {
        Matrix::from_rows(rows, cols)
    }

    #[test]
    fn diag_two_three() {
        let s = smith_normal_form(&m(vec![vec![2, 0], vec![0, 3]], 2));
        assert_eq!(s.diagonal(), vec![1, 6]);
        assert_eq!(s.torsion(), vec![6]);
    }

    #[test]
    fn factorization_holds() {
        let a = m(vec![vec![4, 6, 2], vec![6, 9, 3], vec![2, 5, 7]], 3);
        let s = smith_normal_form(&a);
        assert_eq!(&(&s.u * &a) * &s.v, s.d);
        assert_eq!(&s.u * &s.u_inv, Matrix::identity(3));
    }

    #[test]
    fn solve_and_kernel() {
        let a = m(vec![vec![2, 4]], 2);
        assert!(solve(&a, &[3]).is_none());
        let x = solve(&a, &[6]).unwrap();
        assert_eq!(a.mul_vec(&x), vec![6]);
        let k = kernel_basis(&a);
        assert_eq!(k.cols(), 1);
        assert!((&a * &k).is_zero());
    }

    #[test]
    fn empty_shapes() {
        let s = smith_normal_form(&Matrix::<i64>::zeros(0, 3));
        assert_eq!(s.rank, 0);
        assert_eq!(kernel_basis(&Matrix::<i64>::zeros(0, 3)).cols(), 3);
    }
}
