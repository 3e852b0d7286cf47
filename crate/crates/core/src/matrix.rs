//! Dense matrices over arbitrary-precision integers.
//!
//! Everything downstream (normal forms, lattices, quantum-torus matrices) is
//! built on this type. All arithmetic is exact; there is no floating point
//! anywhere in the crate.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq)]
pub struct IntMat {
    nrows: usize,
    ncols: usize,
    data: Vec<BigInt>,
}

impl IntMat {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        IntMat { nrows, ncols, data: vec![BigInt::zero(); nrows * ncols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = IntMat::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = BigInt::one();
        }
        m
    }

    /// Anti-diagonal identity (ones on the reversed diagonal).
    pub fn anti_identity(n: usize) -> Self {
        let mut m = IntMat::zeros(n, n);
        for i in 0..n {
            m[(i, n - 1 - i)] = BigInt::one();
        }
        m
    }

    pub fn from_fn(nrows: usize, ncols: usize, mut f: impl FnMut(usize, usize) -> BigInt) -> Self {
        let mut data = Vec::with_capacity(nrows * ncols);
        for i in 0..nrows {
            for j in 0..ncols {
                data.push(f(i, j));
            }
        }
        IntMat { nrows, ncols, data }
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Self {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, |r| r.len());
        assert!(rows.iter().all(|r| r.len() == ncols), "ragged rows");
        IntMat::from_fn(nrows, ncols, |i, j| BigInt::from(rows[i][j]))
    }

    pub fn row_vector(v: &[BigInt]) -> Self {
        IntMat { nrows: 1, ncols: v.len(), data: v.to_vec() }
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn is_square(&self) -> bool {
        self.nrows == self.ncols
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.data[i * self.ncols..(i + 1) * self.ncols]
    }

    pub fn rows_iter(&self) -> impl Iterator<Item = &[BigInt]> {
        (0..self.nrows).map(move |i| self.row(i))
    }

    pub fn transpose(&self) -> Self {
        IntMat::from_fn(self.ncols, self.nrows, |i, j| self[(j, i)].clone())
    }

    pub fn neg(&self) -> Self {
        IntMat::from_fn(self.nrows, self.ncols, |i, j| -&self[(i, j)])
    }

    pub fn add(&self, other: &IntMat) -> Self {
        assert_eq!((self.nrows, self.ncols), (other.nrows, other.ncols));
        IntMat::from_fn(self.nrows, self.ncols, |i, j| &self[(i, j)] + &other[(i, j)])
    }

    pub fn sub(&self, other: &IntMat) -> Self {
        assert_eq!((self.nrows, self.ncols), (other.nrows, other.ncols));
        IntMat::from_fn(self.nrows, self.ncols, |i, j| &self[(i, j)] - &other[(i, j)])
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        IntMat::from_fn(self.nrows, self.ncols, |i, j| c * &self[(i, j)])
    }

    pub fn mul(&self, other: &IntMat) -> Self {
        assert_eq!(self.ncols, other.nrows, "dimension mismatch in mul");
        let mut out = IntMat::zeros(self.nrows, other.ncols);
        for i in 0..self.nrows {
            for k in 0..self.ncols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.ncols {
                    let b = &other[(k, j)];
                    if !b.is_zero() {
                        let t = a * b;
                        out[(i, j)] += t;
                    }
                }
            }
        }
        out
    }

    /// Exact division of every entry; panics if any entry is not divisible.
    pub fn div_exact(&self, c: &BigInt) -> Self {
        assert!(!c.is_zero());
        IntMat::from_fn(self.nrows, self.ncols, |i, j| {
            let (q, r) = self[(i, j)].div_rem(c);
            assert!(r.is_zero(), "entry ({i},{j}) not divisible by {c}");
            q
        })
    }

    /// Entries reduced into `[0, n)`.
    pub fn mod_reduce(&self, n: &BigInt) -> Self {
        IntMat::from_fn(self.nrows, self.ncols, |i, j| self[(i, j)].mod_floor(n))
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Self {
        IntMat::from_fn(rows.len(), cols.len(), |i, j| self[(rows[i], cols[j])].clone())
    }

    pub fn vstack(&self, other: &IntMat) -> Self {
        assert_eq!(self.ncols, other.ncols);
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        IntMat { nrows: self.nrows + other.nrows, ncols: self.ncols, data }
    }

    pub fn hstack(&self, other: &IntMat) -> Self {
        assert_eq!(self.nrows, other.nrows);
        IntMat::from_fn(self.nrows, self.ncols + other.ncols, |i, j| {
            if j < self.ncols {
                self[(i, j)].clone()
            } else {
                other[(i, j - self.ncols)].clone()
            }
        })
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.ncols {
            self.data.swap(a * self.ncols + j, b * self.ncols + j);
        }
    }

    pub fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.nrows {
            self.data.swap(i * self.ncols + a, i * self.ncols + b);
        }
    }

    /// row[t] += c * row[s]
    pub fn row_addmul(&mut self, t: usize, s: usize, c: &BigInt) {
        if c.is_zero() {
            return;
        }
        for j in 0..self.ncols {
            let v = c * &self[(s, j)];
            self[(t, j)] += v;
        }
    }

    /// col[t] += c * col[s]
    pub fn col_addmul(&mut self, t: usize, s: usize, c: &BigInt) {
        if c.is_zero() {
            return;
        }
        for i in 0..self.nrows {
            let v = c * &self[(i, s)];
            self[(i, t)] += v;
        }
    }

    pub fn negate_row(&mut self, i: usize) {
        for j in 0..self.ncols {
            let v = -&self[(i, j)];
            self[(i, j)] = v;
        }
    }

    pub fn negate_col(&mut self, j: usize) {
        for i in 0..self.nrows {
            let v = -&self[(i, j)];
            self[(i, j)] = v;
        }
    }

    /// Determinant by fraction-free (Bareiss) elimination.
    pub fn det(&self) -> BigInt {
        assert!(self.is_square());
        let n = self.nrows;
        if n == 0 {
            return BigInt::one();
        }
        let mut a = self.clone();
        let mut sign = 1i32;
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if a[(k, k)].is_zero() {
                match (k + 1..n).find(|&r| !a[(r, k)].is_zero()) {
                    Some(r) => {
                        a.swap_rows(k, r);
                        sign = -sign;
                    }
                    None => return BigInt::zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let num = &a[(k, k)] * &a[(i, j)] - &a[(i, k)] * &a[(k, j)];
                    let (q, r) = num.div_rem(&prev);
                    debug_assert!(r.is_zero(), "Bareiss division not exact");
                    a[(i, j)] = q;
                }
                a[(i, k)] = BigInt::zero();
            }
            prev = a[(k, k)].clone();
        }
        let d = a[(n - 1, n - 1)].clone();
        if sign < 0 {
            -d
        } else {
            d
        }
    }

    /// Returns the integer matrix `K` with `K * self = c * I`, computed by
    /// fraction-free Gauss-Jordan elimination. Fails if `self` is singular or
    /// if `c * self^{-1}` is not integral.
    pub fn inverse_scaled(&self, c: &BigInt) -> Result<IntMat> {
        assert!(self.is_square());
        let n = self.nrows;
        let mut a = self.hstack(&IntMat::identity(n));
        let mut prev = BigInt::one();
        for k in 0..n {
            if a[(k, k)].is_zero() {
                match (k + 1..n).find(|&r| !a[(r, k)].is_zero()) {
                    Some(r) => a.swap_rows(k, r),
                    None => return Err(Error::Identity("singular matrix in inverse".into())),
                }
            }
            let pv = a[(k, k)].clone();
            for i in 0..n {
                if i == k {
                    continue;
                }
                let aik = a[(i, k)].clone();
                if aik.is_zero() && pv == prev {
                    continue;
                }
                for j in 0..2 * n {
                    if j == k {
                        continue;
                    }
                    let num = &pv * &a[(i, j)] - &aik * &a[(k, j)];
                    let (q, r) = num.div_rem(&prev);
                    debug_assert!(r.is_zero(), "fraction-free Gauss-Jordan division not exact");
                    a[(i, j)] = q;
                }
                a[(i, k)] = BigInt::zero();
            }
            prev = pv;
        }
        let d = a[(n - 1, n - 1)].clone();
        debug_assert!((0..n).all(|i| a[(i, i)] == d));
        let mut out = IntMat::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let num = c * &a[(i, n + j)];
                let (q, r) = num.div_rem(&d);
                if !r.is_zero() {
                    return Err(Error::Identity(format!(
                        "{c} * inverse is not integral at ({i},{j})"
                    )));
                }
                out[(i, j)] = q;
            }
        }
        Ok(out)
    }

    pub fn is_antisymmetric(&self) -> bool {
        if !self.is_square() {
            return false;
        }
        for i in 0..self.nrows {
            for j in 0..=i {
                if self[(i, j)] != -&self[(j, i)] {
                    return false;
                }
            }
        }
        true
    }

    pub fn max_abs(&self) -> BigInt {
        self.data.iter().map(|v| v.abs()).max().unwrap_or_else(BigInt::zero)
    }

    /// Plain-text dump: header lines with row/column labels, then one line of
    /// decimal integers per row.
    pub fn dump(&self, name: &str, row_labels: &[String], col_labels: &[String]) -> String {
        assert_eq!(row_labels.len(), self.nrows);
        assert_eq!(col_labels.len(), self.ncols);
        let mut s = String::new();
        s.push_str(&format!("# matrix {} rows={} cols={}\n", name, self.nrows, self.ncols));
        s.push_str(&format!("# rows: {}\n", row_labels.join(" ")));
        s.push_str(&format!("# cols: {}\n", col_labels.join(" ")));
        for i in 0..self.nrows {
            let line: Vec<String> = self.row(i).iter().map(|v| v.to_string()).collect();
            s.push_str(&line.join(" "));
            s.push('\n');
        }
        s
    }
}

impl std::ops::Index<(usize, usize)> for IntMat {
    type Output = BigInt;
    fn index(&self, (i, j): (usize, usize)) -> &BigInt {
        debug_assert!(i < self.nrows && j < self.ncols);
        &self.data[i * self.ncols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IntMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigInt {
        debug_assert!(i < self.nrows && j < self.ncols);
        &mut self.data[i * self.ncols + j]
    }
}

impl fmt::Debug for IntMat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "IntMat {}x{} [", self.nrows, self.ncols)?;
        for i in 0..self.nrows {
            let line: Vec<String> = self.row(i).iter().map(|v| v.to_string()).collect();
            writeln!(f, "  [{}]", line.join(", "))?;
        }
        write!(f, "]")
    }
}
