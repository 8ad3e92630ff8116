use crate::ratcore::matq::MatQ;
use crate::ratcore::rat::Rat;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// Dense arbitrary-precision integer matrix, row major.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct MatZ {
    pub nrows: usize,
    pub ncols: usize,
    data: Vec<BigInt>,
}

impl MatZ {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        MatZ {
            nrows,
            ncols,
            data: vec![BigInt::zero(); nrows * ncols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, BigInt::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<BigInt>>) -> Self {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, |r| r.len());
        assert!(rows.iter().all(|r| r.len() == ncols), "ragged rows");
        MatZ {
            nrows,
            ncols,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
                .collect(),
        )
    }

    pub fn at(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i * self.ncols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigInt) {
        self.data[i * self.ncols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.data[i * self.ncols..(i + 1) * self.ncols]
    }

    pub fn rows_vec(&self) -> Vec<Vec<BigInt>> {
        (0..self.nrows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> MatZ {
        let mut t = MatZ::zeros(self.ncols, self.nrows);
        for i in 0..self.nrows {
            for j in 0..self.ncols {
                t.set(j, i, self.at(i, j).clone());
            }
        }
        t
    }

    pub fn mul(&self, o: &MatZ) -> MatZ {
        assert_eq!(self.ncols, o.nrows);
        let mut out = MatZ::zeros(self.nrows, o.ncols);
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

    pub fn mat_vec(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(self.ncols, v.len());
        (0..self.nrows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn is_identity(&self) -> bool {
        self.nrows == self.ncols && *self == MatZ::identity(self.nrows)
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn to_matq(&self) -> MatQ {
        MatQ::from_rows(
            (0..self.nrows)
                .map(|i| self.row(i).iter().map(|x| Rat::from_integer(x.clone())).collect())
                .collect(),
        )
    }

    pub fn det(&self) -> BigInt {
        let d = self.to_matq().det();
        debug_assert!(d.is_integer());
        d.to_integer()
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.ncols {
            self.data.swap(a * self.ncols + j, b * self.ncols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.nrows {
            self.data.swap(i * self.ncols + a, i * self.ncols + b);
        }
    }

    /// row_i -= q * row_j
    fn row_sub_mul(&mut self, i: usize, j: usize, q: &BigInt) {
        if q.is_zero() {
            return;
        }
        for c in 0..self.ncols {
            let v = self.at(i, c) - q * self.at(j, c);
            self.set(i, c, v);
        }
    }

    /// col_i -= q * col_j
    fn col_sub_mul(&mut self, i: usize, j: usize, q: &BigInt) {
        if q.is_zero() {
            return;
        }
        for r in 0..self.nrows {
            let v = self.at(r, i) - q * self.at(r, j);
            self.set(r, i, v);
        }
    }

    fn negate_row(&mut self, i: usize) {
        for c in 0..self.ncols {
            let v = -self.at(i, c);
            self.set(i, c, v);
        }
    }
}

pub struct HnfResult {
    pub h: MatZ,
    pub u: MatZ,
}

/// Row-style Hermite normal form: H = U * M with U unimodular, pivots
/// positive, entries above each pivot reduced into [0, pivot), zero rows
/// last.
pub fn hnf(m: &MatZ) -> HnfResult {
    let mut h = m.clone();
    let mut u = MatZ::identity(m.nrows);
    let (rows, cols) = (m.nrows, m.ncols);
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        // gcd-reduce column c on rows r.. until a single nonzero remains at r
        loop {
            let mut best: Option<usize> = None;
            for i in r..rows {
                if !h.at(i, c).is_zero()
                    && best.map_or(true, |b| h.at(i, c).magnitude() < h.at(b, c).magnitude())
                {
                    best = Some(i);
                }
            }
            let Some(p) = best else { break };
            h.swap_rows(r, p);
            u.swap_rows(r, p);
            let mut dirty = false;
            let pivot = h.at(r, c).clone();
            for i in r + 1..rows {
                if h.at(i, c).is_zero() {
                    continue;
                }
                let q = h.at(i, c).div_floor(&pivot);
                h.row_sub_mul(i, r, &q);
                u.row_sub_mul(i, r, &q);
                if !h.at(i, c).is_zero() {
                    dirty = true;
                }
            }
            if !dirty {
                break;
            }
        }
        if h.at(r, c).is_zero() {
            continue; // column has no pivot
        }
        if h.at(r, c).is_negative() {
            h.negate_row(r);
            u.negate_row(r);
        }
        let pivot = h.at(r, c).clone();
        for i in 0..r {
            let q = h.at(i, c).div_floor(&pivot);
            h.row_sub_mul(i, r, &q);
            u.row_sub_mul(i, r, &q);
        }
        r += 1;
    }
    HnfResult { h, u }
}

pub struct SnfResult {
    pub s: MatZ,
    pub u: MatZ,
    pub v: MatZ,
}

/// Smith normal form: S = U * M * V with U, V unimodular, S diagonal with
/// nonnegative entries s_1 | s_2 | ... and zeros trailing.
pub fn snf(m: &MatZ) -> SnfResult {
    let mut s = m.clone();
    let mut u = MatZ::identity(m.nrows);
    let mut v = MatZ::identity(m.ncols);
    let bound = m.nrows.min(m.ncols);
    let mut t = 0;
    while t < bound {
        // move the minimal-abs nonzero entry of s[t.., t..] to (t, t)
        let mut best: Option<(usize, usize)> = None;
        for i in t..m.nrows {
            for j in t..m.ncols {
                if !s.at(i, j).is_zero()
                    && best.map_or(true, |(bi, bj)| s.at(i, j).magnitude() < s.at(bi, bj).magnitude())
                {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        s.swap_rows(t, pi);
        u.swap_rows(t, pi);
        s.swap_cols(t, pj);
        v.swap_cols(t, pj);

        // clear row t and column t; each reduction strictly shrinks the
        // pivot when it does not clear outright, so this terminates
        let mut progress = true;
        while progress {
            progress = false;
            let pivot = s.at(t, t).clone();
            if let Some(i) = (t + 1..m.nrows).find(|&i| !s.at(i, t).is_zero()) {
                let q = s.at(i, t).div_floor(&pivot);
                s.row_sub_mul(i, t, &q);
                u.row_sub_mul(i, t, &q);
                if !s.at(i, t).is_zero() {
                    s.swap_rows(t, i);
                    u.swap_rows(t, i);
                }
                progress = true;
                continue;
            }
            if let Some(j) = (t + 1..m.ncols).find(|&j| !s.at(t, j).is_zero()) {
                let q = s.at(t, j).div_floor(&pivot);
                s.col_sub_mul(j, t, &q);
                v.col_sub_mul(j, t, &q);
                if !s.at(t, j).is_zero() {
                    s.swap_cols(t, j);
                    v.swap_cols(t, j);
                }
                progress = true;
            }
        }

        // divisibility: pivot must divide every remaining entry
        let pivot = s.at(t, t).clone();
        let mut fixed = true;
        'scan: for i in t + 1..m.nrows {
            for j in t + 1..m.ncols {
                if !s.at(i, j).mod_floor(&pivot).is_zero() {
                    // fold row i into row t and redo this pivot
                    let one = BigInt::from(-1);
                    s.row_sub_mul(t, i, &one);
                    u.row_sub_mul(t, i, &one);
                    fixed = false;
                    break 'scan;
                }
            }
        }
        if !fixed {
            continue;
        }
        if s.at(t, t).is_negative() {
            s.negate_row(t);
            u.negate_row(t);
        }
        t += 1;
    }
    SnfResult { s, u, v }
}

/// Exact inverse of an integer matrix with determinant +-1.
pub fn inverse_unimodular(m: &MatZ) -> Option<MatZ> {
    if m.nrows != m.ncols {
        return None;
    }
    let inv = m.to_matq().inverse()?;
    let mut rows = Vec::with_capacity(m.nrows);
    for i in 0..m.nrows {
        let mut row = Vec::with_capacity(m.ncols);
        for j in 0..m.ncols {
            let e = inv.at(i, j);
            if !e.is_integer() {
                return None;
            }
            row.push(e.to_integer());
        }
        rows.push(row);
    }
    Some(MatZ::from_rows(rows))
}

/// Postcondition oracle for `hnf`, independent of how H was produced.
pub fn hnf_postcheck(m: &MatZ, res: &HnfResult) -> Result<(), String> {
    let HnfResult { h, u } = res;
    if u.nrows != m.nrows || u.ncols != m.nrows {
        return Err("U has wrong shape".into());
    }
    if u.det().magnitude() != BigInt::one().magnitude() {
        return Err("U is not unimodular".into());
    }
    if &u.mul(m) != h {
        return Err("U*M != H".into());
    }
    // echelon shape with positive pivots, reduced above, zero rows last
    let mut last_pivot: Option<usize> = None;
    let mut seen_zero_row = false;
    for i in 0..h.nrows {
        let lead = (0..h.ncols).find(|&j| !h.at(i, j).is_zero());
        match lead {
            None => seen_zero_row = true,
            Some(c) => {
                if seen_zero_row {
                    return Err("zero row precedes a nonzero row".into());
                }
                if let Some(p) = last_pivot {
                    if c <= p {
                        return Err("pivot columns not strictly increasing".into());
                    }
                }
                last_pivot = Some(c);
                let pivot = h.at(i, c);
                if !pivot.is_positive() {
                    return Err("pivot not positive".into());
                }
                for k in 0..i {
                    let e = h.at(k, c);
                    if e.is_negative() || e >= pivot {
                        return Err("entry above pivot not reduced".into());
                    }
                }
            }
        }
    }
    Ok(())
}

/// Postcondition oracle for `snf`.
pub fn snf_postcheck(m: &MatZ, res: &SnfResult) -> Result<(), String> {
    let SnfResult { s, u, v } = res;
    if u.det().magnitude() != BigInt::one().magnitude() {
        return Err("U is not unimodular".into());
    }
    if v.det().magnitude() != BigInt::one().magnitude() {
        return Err("V is not unimodular".into());
    }
    if &u.mul(m).mul(v) != s {
        return Err("U*M*V != S".into());
    }
    for i in 0..s.nrows {
        for j in 0..s.ncols {
            if i != j && !s.at(i, j).is_zero() {
                return Err("S not diagonal".into());
            }
        }
    }
    let diag: Vec<BigInt> = (0..s.nrows.min(s.ncols))
        .map(|i| s.at(i, i).clone())
        .collect();
    for w in diag.windows(2) {
        if w[0].is_zero() && !w[1].is_zero() {
            return Err("zero diagonal entry precedes nonzero".into());
        }
        if !w[0].is_zero() && !w[1].mod_floor(&w[0]).is_zero() {
            return Err("divisibility chain broken".into());
        }
    }
    if diag.iter().any(|d| d.is_negative()) {
        return Err("negative diagonal entry".into());
    }
    Ok(())
}
