use crate::ratcore::poly::PolyQ;
use crate::ratcore::rat::Rat;
use num_traits::{One, Signed, Zero};

pub type VecQ = Vec<Rat>;

/// Field operations for the generic elimination routines. Constant
/// constructors take a `like` argument so number field elements can carry
/// their field along.
pub trait FieldScalar: Clone + PartialEq {
    fn fs_zero(like: &Self) -> Self;
    fn fs_one(like: &Self) -> Self;
    fn fs_is_zero(&self) -> bool;
    fn fs_add(&self, o: &Self) -> Self;
    fn fs_sub(&self, o: &Self) -> Self;
    fn fs_mul(&self, o: &Self) -> Self;
    fn fs_div(&self, o: &Self) -> Self;
    fn fs_neg(&self) -> Self;
}

impl FieldScalar for Rat {
    fn fs_zero(_like: &Self) -> Self {
        Rat::zero()
    }
    fn fs_one(_like: &Self) -> Self {
        Rat::one()
    }
    fn fs_is_zero(&self) -> bool {
        self.is_zero()
    }
    fn fs_add(&self, o: &Self) -> Self {
        self + o
    }
    fn fs_sub(&self, o: &Self) -> Self {
        self - o
    }
    fn fs_mul(&self, o: &Self) -> Self {
        self * o
    }
    fn fs_div(&self, o: &Self) -> Self {
        self / o
    }
    fn fs_neg(&self) -> Self {
        -self
    }
}

/// Reduced row echelon form in place. Returns the pivot columns.
pub fn rref_in_place<T: FieldScalar>(rows: &mut [Vec<T>]) -> Vec<usize> {
    let m = rows.len();
    if m == 0 {
        return vec![];
    }
    let n = rows[0].len();
    let mut piv = Vec::new();
    let mut r = 0;
    for c in 0..n {
        if r == m {
            break;
        }
        let Some(i) = (r..m).find(|&i| !rows[i][c].fs_is_zero()) else {
            continue;
        };
        rows.swap(r, i);
        let inv = T::fs_one(&rows[r][c]).fs_div(&rows[r][c]);
        for x in rows[r].iter_mut() {
            *x = x.fs_mul(&inv);
        }
        for i in 0..m {
            if i != r && !rows[i][c].fs_is_zero() {
                let f = rows[i][c].clone();
                for j in 0..n {
                    let t = f.fs_mul(&rows[r][j]);
                    rows[i][j] = rows[i][j].fs_sub(&t);
                }
            }
        }
        piv.push(c);
        r += 1;
    }
    piv
}

/// Basis of the right kernel { x : M x = 0 } of the matrix given by rows.
/// `ncols` covers the empty-matrix case; `like` supplies field context.
pub fn kernel_of_rows<T: FieldScalar>(rows: &[Vec<T>], ncols: usize, like: &T) -> Vec<Vec<T>> {
    let mut work: Vec<Vec<T>> = rows.to_vec();
    let piv = rref_in_place(&mut work);
    let pivset: std::collections::HashSet<usize> = piv.iter().copied().collect();
    let mut basis = Vec::new();
    for f in 0..ncols {
        if pivset.contains(&f) {
            continue;
        }
        let mut x = vec![T::fs_zero(like); ncols];
        x[f] = T::fs_one(like);
        for (r, &p) in piv.iter().enumerate() {
            x[p] = work[r][f].fs_neg();
        }
        basis.push(x);
    }
    basis
}

/// One solution of M x = b over the field, if consistent. Free variables
/// are set to zero.
pub fn solve_rows<T: FieldScalar>(rows: &[Vec<T>], b: &[T], like: &T) -> Option<Vec<T>> {
    let m = rows.len();
    assert_eq!(m, b.len());
    if m == 0 {
        return Some(vec![]);
    }
    let n = rows[0].len();
    let mut aug: Vec<Vec<T>> = rows
        .iter()
        .zip(b)
        .map(|(r, bi)| {
            let mut v = r.clone();
            v.push(bi.clone());
            v
        })
        .collect();
    let piv = rref_in_place(&mut aug);
    if piv.last() == Some(&n) {
        return None; // pivot in the augmented column: inconsistent
    }
    let mut x = vec![T::fs_zero(like); n];
    for (r, &p) in piv.iter().enumerate() {
        x[p] = aug[r][n].clone();
    }
    Some(x)
}

pub fn vq_zero(n: usize) -> VecQ {
    vec![Rat::zero(); n]
}

pub fn vq_add(a: &[Rat], b: &[Rat]) -> VecQ {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn vq_sub(a: &[Rat], b: &[Rat]) -> VecQ {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn vq_scale(a: &[Rat], s: &Rat) -> VecQ {
    a.iter().map(|x| x * s).collect()
}

pub fn vq_neg(a: &[Rat]) -> VecQ {
    a.iter().map(|x| -x).collect()
}

pub fn vq_is_zero(a: &[Rat]) -> bool {
    a.iter().all(|x| x.is_zero())
}

pub fn vq_dot(a: &[Rat], b: &[Rat]) -> Rat {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Dense rational matrix, row major.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct MatQ {
    pub nrows: usize,
    pub ncols: usize,
    data: Vec<Rat>,
}

impl MatQ {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        MatQ {
            nrows,
            ncols,
            data: vec![Rat::zero(); nrows * ncols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Rat::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<VecQ>) -> Self {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, |r| r.len());
        assert!(rows.iter().all(|r| r.len() == ncols), "ragged rows");
        MatQ {
            nrows,
            ncols,
            data: rows.into_iter().flatten().collect(),
        }
    }

    /// Small literal helper, mostly for tests.
    pub fn from_i64(rows: &[&[i64]]) -> Self {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| Rat::from_integer(x.into())).collect())
                .collect(),
        )
    }

    pub fn at(&self, i: usize, j: usize) -> &Rat {
        &self.data[i * self.ncols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Rat) {
        self.data[i * self.ncols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Rat] {
        &self.data[i * self.ncols..(i + 1) * self.ncols]
    }

    pub fn rows_vec(&self) -> Vec<VecQ> {
        (0..self.nrows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn col(&self, j: usize) -> VecQ {
        (0..self.nrows).map(|i| self.at(i, j).clone()).collect()
    }

    pub fn transpose(&self) -> MatQ {
        let mut t = MatQ::zeros(self.ncols, self.nrows);
        for i in 0..self.nrows {
            for j in 0..self.ncols {
                t.set(j, i, self.at(i, j).clone());
            }
        }
        t
    }

    pub fn mul(&self, o: &MatQ) -> MatQ {
        assert_eq!(self.ncols, o.nrows);
        let mut out = MatQ::zeros(self.nrows, o.ncols);
        for i in 0..self.nrows {
            for k in 0..self.ncols {
                let a = self.at(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..o.ncols {
                    let v = out.at(i, j) + a * o.at(k, j);
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    pub fn mat_vec(&self, v: &[Rat]) -> VecQ {
        assert_eq!(self.ncols, v.len());
        (0..self.nrows).map(|i| vq_dot(self.row(i), v)).collect()
    }

    pub fn add(&self, o: &MatQ) -> MatQ {
        assert_eq!((self.nrows, self.ncols), (o.nrows, o.ncols));
        MatQ {
            nrows: self.nrows,
            ncols: self.ncols,
            data: self.data.iter().zip(&o.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, o: &MatQ) -> MatQ {
        assert_eq!((self.nrows, self.ncols), (o.nrows, o.ncols));
        MatQ {
            nrows: self.nrows,
            ncols: self.ncols,
            data: self.data.iter().zip(&o.data).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn scale(&self, s: &Rat) -> MatQ {
        MatQ {
            nrows: self.nrows,
            ncols: self.ncols,
            data: self.data.iter().map(|a| a * s).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn is_identity(&self) -> bool {
        self.nrows == self.ncols && *self == MatQ::identity(self.nrows)
    }

    pub fn is_symmetric(&self) -> bool {
        if self.nrows != self.ncols {
            return false;
        }
        for i in 0..self.nrows {
            for j in 0..i {
                if self.at(i, j) != self.at(j, i) {
                    return false;
                }
            }
        }
        true
    }

    pub fn trace(&self) -> Rat {
        assert_eq!(self.nrows, self.ncols);
        (0..self.nrows).map(|i| self.at(i, i).clone()).sum()
    }

    pub fn det(&self) -> Rat {
        assert_eq!(self.nrows, self.ncols);
        let n = self.nrows;
        if n == 0 {
            return Rat::one();
        }
        let mut rows = self.rows_vec();
        let mut det = Rat::one();
        for c in 0..n {
            let Some(p) = (c..n).find(|&i| !rows[i][c].is_zero()) else {
                return Rat::zero();
            };
            if p != c {
                rows.swap(p, c);
                det = -det;
            }
            det *= &rows[c][c];
            let inv = Rat::one() / &rows[c][c];
            for i in c + 1..n {
                if rows[i][c].is_zero() {
                    continue;
                }
                let f = &rows[i][c] * &inv;
                for j in c..n {
                    let t = &f * &rows[c][j];
                    rows[i][j] = &rows[i][j] - &t;
                }
            }
        }
        det
    }

    pub fn inverse(&self) -> Option<MatQ> {
        assert_eq!(self.nrows, self.ncols);
        let n = self.nrows;
        let mut aug: Vec<VecQ> = (0..n)
            .map(|i| {
                let mut v = self.row(i).to_vec();
                for j in 0..n {
                    v.push(if i == j { Rat::one() } else { Rat::zero() });
                }
                v
            })
            .collect();
        let piv = rref_in_place(&mut aug);
        if piv.iter().filter(|&&c| c < n).count() < n {
            return None;
        }
        Some(MatQ::from_rows(
            aug.into_iter().map(|r| r[n..].to_vec()).collect(),
        ))
    }

    pub fn rref(&self) -> (MatQ, Vec<usize>) {
        let mut rows = self.rows_vec();
        let piv = rref_in_place(&mut rows);
        (MatQ::from_rows(rows), piv)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of { x : M x = 0 }.
    pub fn kernel(&self) -> Vec<VecQ> {
        let like = Rat::zero();
        kernel_of_rows(&self.rows_vec(), self.ncols, &like)
    }

    /// One solution of M x = b, if any.
    pub fn solve(&self, b: &[Rat]) -> Option<VecQ> {
        solve_rows(&self.rows_vec(), b, &Rat::zero())
    }

    /// Column span as a list of column vectors (basis).
    pub fn column_space_basis(&self) -> Vec<VecQ> {
        let (r, _) = self.transpose().rref();
        r.rows_vec()
            .into_iter()
            .filter(|row| !vq_is_zero(row))
            .collect()
    }

    /// Characteristic polynomial, monic of degree n, by Faddeev-LeVerrier.
    pub fn charpoly(&self) -> PolyQ {
        assert_eq!(self.nrows, self.ncols);
        let n = self.nrows;
        let mut coeffs = vec![Rat::zero(); n + 1];
        coeffs[n] = Rat::one();
        let mut m = MatQ::identity(n);
        for k in 1..=n {
            m = self.mul(&m);
            let c = -(m.trace() / Rat::from_integer(k.into()));
            for i in 0..n {
                let v = m.at(i, i) + &c;
                m.set(i, i, v);
            }
            coeffs[n - k] = c;
        }
        PolyQ::from_coeffs(coeffs)
    }

    /// Symmetric positive definite test via leading principal minors.
    pub fn is_positive_definite(&self) -> bool {
        if !self.is_symmetric() {
            return false;
        }
        for k in 1..=self.nrows {
            let sub = MatQ::from_rows(
                (0..k)
                    .map(|i| (0..k).map(|j| self.at(i, j).clone()).collect())
                    .collect(),
            );
            if !sub.det().is_positive() {
                return false;
            }
        }
        true
    }

    pub fn pow(&self, e: usize) -> MatQ {
        assert_eq!(self.nrows, self.ncols);
        let mut out = MatQ::identity(self.nrows);
        for _ in 0..e {
            out = out.mul(self);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratcore::rat::rat;

    #[test]
    fn rref_kernel_solve() {
        let m = MatQ::from_i64(&[&[1, 2, 3], &[2, 4, 6], &[1, 1, 1]]);
        assert_eq!(m.rank(), 2);
        let ker = m.kernel();
        assert_eq!(ker.len(), 1);
        for k in &ker {
            assert!(vq_is_zero(&m.mat_vec(k)));
        }
        let b = vec![rat(6, 1), rat(12, 1), rat(3, 1)];
        let x = m.solve(&b).unwrap();
        assert_eq!(m.mat_vec(&x), b);
        assert!(m.solve(&[rat(1, 1), rat(0, 1), rat(0, 1)]).is_none());
    }

    #[test]
    fn det_inverse() {
        let m = MatQ::from_i64(&[&[2, 1], &[1, 1]]);
        assert_eq!(m.det(), rat(1, 1));
        let inv = m.inverse().unwrap();
        assert!(m.mul(&inv).is_identity());
        let s = MatQ::from_i64(&[&[1, 2], &[2, 4]]);
        assert!(s.inverse().is_none());
        assert_eq!(s.det(), rat(0, 1));
    }

    #[test]
    fn charpoly_small() {
        // companion-style check: A = [[0,-1],[1,-1]] has x^2 + x + 1
        let a = MatQ::from_i64(&[&[0, -1], &[1, -1]]);
        let p = a.charpoly();
        assert_eq!(p.coeffs(), &[rat(1, 1), rat(1, 1), rat(1, 1)]);
        // Cayley-Hamilton on a random-ish 3x3
        let b = MatQ::from_i64(&[&[1, 2, 0], &[0, 1, -1], &[3, 0, 2]]);
        let cp = b.charpoly();
        assert!(cp.eval_mat(&b).is_zero());
    }

    #[test]
    fn positive_definite() {
        let hexagonal = MatQ::from_rows(vec![
            vec![rat(1, 1), rat(1, 2)],
            vec![rat(1, 2), rat(1, 1)],
        ]);
        assert!(hexagonal.is_positive_definite());
        let not = MatQ::from_i64(&[&[1, 2], &[2, 1]]);
        assert!(!not.is_positive_definite());
    }
}
