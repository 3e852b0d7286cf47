//! Exact integer lattice computations: Hermite and Smith normal forms, the
//! antisymmetric (skew) normal form, kernels of matrices modulo N, lattice
//! indices and quotient orders, and the weight-lattice pairing.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::matrix::IntMat;

// ---------------------------------------------------------------------------
// Hermite normal form
// ---------------------------------------------------------------------------

/// Row-style Hermite normal form. Returns `(H, U)` with `U * M = H`,
/// `U` unimodular, `H` in row echelon form with positive pivots and entries
/// above each pivot reduced into `[0, pivot)`. Zero rows of `H` are at the
/// bottom.
pub fn row_hnf_with_transform(m: &IntMat) -> (IntMat, IntMat) {
    let mut h = m.clone();
    let mut u = IntMat::identity(m.nrows());
    hnf_in_place(&mut h, Some(&mut u));
    (h, u)
}

pub fn row_hnf(m: &IntMat) -> IntMat {
    let mut h = m.clone();
    hnf_in_place(&mut h, None);
    h
}

fn hnf_in_place(h: &mut IntMat, mut u: Option<&mut IntMat>) {
    let nrows = h.nrows();
    let ncols = h.ncols();
    let mut row = 0;
    for col in 0..ncols {
        if row == nrows {
            break;
        }
        loop {
            // Pick the nonzero entry of minimal absolute value in this column
            // at or below `row`.
            let mut best: Option<usize> = None;
            for i in row..nrows {
                if h[(i, col)].is_zero() {
                    continue;
                }
                match best {
                    None => best = Some(i),
                    Some(b) => {
                        if h[(i, col)].abs() < h[(b, col)].abs() {
                            best = Some(i);
                        }
                    }
                }
            }
            let Some(b) = best else { break };
            h.swap_rows(row, b);
            if let Some(u) = u.as_deref_mut() {
                u.swap_rows(row, b);
            }
            let pivot = h[(row, col)].clone();
            let mut done = true;
            for i in row + 1..nrows {
                if h[(i, col)].is_zero() {
                    continue;
                }
                let q = -h[(i, col)].div_floor(&pivot);
                h.row_addmul(i, row, &q);
                if let Some(u) = u.as_deref_mut() {
                    u.row_addmul(i, row, &q);
                }
                if !h[(i, col)].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if h[(row, col)].is_zero() {
            continue;
        }
        if h[(row, col)].is_negative() {
            h.negate_row(row);
            if let Some(u) = u.as_deref_mut() {
                u.negate_row(row);
            }
        }
        // Reduce the entries above the pivot.
        let pivot = h[(row, col)].clone();
        for i in 0..row {
            let q = -h[(i, col)].div_floor(&pivot);
            h.row_addmul(i, row, &q);
            if let Some(u) = u.as_deref_mut() {
                u.row_addmul(i, row, &q);
            }
        }
        row += 1;
    }
}

/// Basis of the left kernel `{x : x M = 0}` as rows of a matrix (may have
/// zero rows removed; full-rank basis).
pub fn left_kernel(m: &IntMat) -> IntMat {
    let (h, u) = row_hnf_with_transform(m);
    let mut rows: Vec<usize> = Vec::new();
    for i in 0..h.nrows() {
        if h.row(i).iter().all(Zero::is_zero) {
            rows.push(i);
        }
    }
    let cols: Vec<usize> = (0..u.ncols()).collect();
    u.submatrix(&rows, &cols)
}

// ---------------------------------------------------------------------------
// Smith normal form
// ---------------------------------------------------------------------------

pub struct Snf {
    pub u: IntMat,
    pub d: IntMat,
    pub v: IntMat,
}

/// Smith normal form with transforms: `U M V = D`, `U`, `V` unimodular and
/// `D` diagonal with non-negative invariants `d_i | d_{i+1}`.
pub fn snf(m: &IntMat) -> Snf {
    let mut d = m.clone();
    let mut u = IntMat::identity(m.nrows());
    let mut v = IntMat::identity(m.ncols());
    snf_in_place(&mut d, Some(&mut u), Some(&mut v));
    Snf { u, d, v }
}

/// Just the invariant factors (nonzero ones, in divisibility order).
pub fn snf_invariants(m: &IntMat) -> Vec<BigInt> {
    let mut d = m.clone();
    snf_in_place(&mut d, None, None);
    let k = d.nrows().min(d.ncols());
    (0..k).map(|i| d[(i, i)].clone()).filter(|x| !x.is_zero()).collect()
}

fn snf_in_place(a: &mut IntMat, mut u: Option<&mut IntMat>, mut v: Option<&mut IntMat>) {
    let nrows = a.nrows();
    let ncols = a.ncols();
    let k = nrows.min(ncols);
    let mut t = 0;
    while t < k {
        // Find pivot of minimal absolute value in the trailing block.
        let mut best: Option<(usize, usize)> = None;
        for i in t..nrows {
            for j in t..ncols {
                if a[(i, j)].is_zero() {
                    continue;
                }
                match best {
                    None => best = Some((i, j)),
                    Some((bi, bj)) => {
                        if a[(i, j)].abs() < a[(bi, bj)].abs() {
                            best = Some((i, j));
                        }
                    }
                }
            }
        }
        let Some((bi, bj)) = best else { break };
        a.swap_rows(t, bi);
        if let Some(u) = u.as_deref_mut() {
            u.swap_rows(t, bi);
        }
        a.swap_cols(t, bj);
        if let Some(v) = v.as_deref_mut() {
            v.swap_cols(t, bj);
        }
        // Clear row and column t.
        let mut clean = true;
        for i in t + 1..nrows {
            if !a[(i, t)].is_zero() {
                let q = -a[(i, t)].div_floor(&a[(t, t)].clone());
                a.row_addmul(i, t, &q);
                if let Some(u) = u.as_deref_mut() {
                    u.row_addmul(i, t, &q);
                }
                if !a[(i, t)].is_zero() {
                    clean = false;
                }
            }
        }
        for j in t + 1..ncols {
            if !a[(t, j)].is_zero() {
                let q = -a[(t, j)].div_floor(&a[(t, t)].clone());
                a.col_addmul(j, t, &q);
                if let Some(v) = v.as_deref_mut() {
                    v.col_addmul(j, t, &q);
                }
                if !a[(t, j)].is_zero() {
                    clean = false;
                }
            }
        }
        if !clean {
            continue;
        }
        // Enforce divisibility of the trailing block by the pivot.
        let pivot = a[(t, t)].clone();
        let mut offender: Option<usize> = None;
        'scan: for i in t + 1..nrows {
            for j in t + 1..ncols {
                if !a[(i, j)].mod_floor(&pivot).is_zero() {
                    offender = Some(i);
                    break 'scan;
                }
            }
        }
        if let Some(i) = offender {
            // Add the offending row to row t and restart this pivot.
            a.row_addmul(t, i, &BigInt::one());
            if let Some(u) = u.as_deref_mut() {
                u.row_addmul(t, i, &BigInt::one());
            }
            continue;
        }
        if a[(t, t)].is_negative() {
            a.negate_row(t);
            if let Some(u) = u.as_deref_mut() {
                u.negate_row(t);
            }
        }
        t += 1;
    }
}

// ---------------------------------------------------------------------------
// Skew (antisymmetric) normal form
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PivotRule {
    /// Nonzero entry of minimal absolute value.
    MinAbs,
    /// First nonzero entry in row-major order.
    Lexicographic,
}

pub struct SkewDecomposition {
    /// Unimodular congruence transform: `X^T P X` is in block normal form.
    pub x: IntMat,
    /// Block entries `h_1 | h_2 | ... | h_k`, all positive.
    pub h: Vec<BigInt>,
    /// Number of zero rows/columns after the 2x2 blocks.
    pub zeros: usize,
}

impl SkewDecomposition {
    pub fn normal_form(&self) -> IntMat {
        let n = 2 * self.h.len() + self.zeros;
        let mut m = IntMat::zeros(n, n);
        for (b, h) in self.h.iter().enumerate() {
            m[(2 * b, 2 * b + 1)] = h.clone();
            m[(2 * b + 1, 2 * b)] = -h;
        }
        m
    }
}

/// Congruence normal form of an antisymmetric integer matrix:
/// finds unimodular `X` with `X^T P X = diag([[0,h_i],[-h_i,0]], ..., 0, ..)`
/// and `h_i | h_{i+1}`.
pub fn skew_normal_form(p: &IntMat, rule: PivotRule) -> Result<SkewDecomposition> {
    if !p.is_antisymmetric() {
        return Err(Error::Lattice("skew_normal_form requires an antisymmetric matrix".into()));
    }
    let n = p.nrows();
    let mut a = p.clone();
    let mut x = IntMat::identity(n);

    normalize_blocks(&mut a, &mut x, 0, rule);

    // Enforce the divisibility chain h_i | h_{i+1}. Coupling two adjacent
    // blocks and renormalizing strictly decreases the earlier block entry, so
    // this terminates.
    loop {
        let blocks = read_blocks(&a);
        let mut violated = None;
        for b in 0..blocks.len().saturating_sub(1) {
            if !blocks[b + 1].mod_floor(&blocks[b]).is_zero() {
                violated = Some(b);
                break;
            }
        }
        let Some(b) = violated else {
            let zeros = n - 2 * blocks.len();
            return Ok(SkewDecomposition { x, h: blocks, zeros });
        };
        a.row_addmul(2 * b, 2 * b + 2, &BigInt::one());
        a.col_addmul(2 * b, 2 * b + 2, &BigInt::one());
        x.col_addmul(2 * b, 2 * b + 2, &BigInt::one());
        normalize_blocks(&mut a, &mut x, 2 * b, PivotRule::MinAbs);
    }
}

fn read_blocks(a: &IntMat) -> Vec<BigInt> {
    let n = a.nrows();
    let mut blocks = Vec::new();
    let mut idx = 0;
    while idx + 1 < n && !a[(idx, idx + 1)].is_zero() {
        blocks.push(a[(idx, idx + 1)].clone());
        idx += 2;
    }
    blocks
}

/// Bring the trailing block of `a` (an antisymmetric matrix under congruence
/// transforms mirrored into `x`) into 2x2 block form starting at row/col
/// `start`. Does not enforce the divisibility chain.
fn normalize_blocks(a: &mut IntMat, x: &mut IntMat, start: usize, rule: PivotRule) {
    let n = a.nrows();

    fn c_swap(a: &mut IntMat, x: &mut IntMat, i: usize, j: usize) {
        if i == j {
            return;
        }
        a.swap_rows(i, j);
        a.swap_cols(i, j);
        x.swap_cols(i, j);
    }
    fn c_addmul(a: &mut IntMat, x: &mut IntMat, t: usize, s: usize, c: &BigInt) {
        a.row_addmul(t, s, c);
        a.col_addmul(t, s, c);
        x.col_addmul(t, s, c);
    }

    let mut s = start;
    while s + 1 < n {
        // Select the initial pivot in the trailing block.
        let mut pivot: Option<(usize, usize)> = None;
        match rule {
            PivotRule::MinAbs => {
                for i in s..n {
                    for j in s..n {
                        if a[(i, j)].is_zero() {
                            continue;
                        }
                        match pivot {
                            None => pivot = Some((i, j)),
                            Some((bi, bj)) => {
                                if a[(i, j)].abs() < a[(bi, bj)].abs() {
                                    pivot = Some((i, j));
                                }
                            }
                        }
                    }
                }
            }
            PivotRule::Lexicographic => {
                'outer: for i in s..n {
                    for j in s..n {
                        if !a[(i, j)].is_zero() {
                            pivot = Some((i, j));
                            break 'outer;
                        }
                    }
                }
            }
        }
        let Some((pi, pj)) = pivot else { break };
        // Move the selected entry to position (s, s+1); both indices are >= s
        // and distinct (the diagonal is zero).
        let (lo, hi) = (pi.min(pj), pi.max(pj));
        c_swap(a, x, s, lo);
        c_swap(a, x, s + 1, hi);
        if a[(s, s + 1)].is_negative() {
            c_swap(a, x, s, s + 1);
        }
        debug_assert!(a[(s, s + 1)].is_positive());

        // Clear rows s and s+1 beyond column s+1. Any nonzero remainder is
        // strictly smaller than the pivot and gets swapped into the pivot
        // position, so the pivot decreases strictly and the loop terminates.
        loop {
            let pv = a[(s, s + 1)].clone();
            let mut remainder: Option<(usize, usize)> = None;
            for j in s + 2..n {
                if !a[(s, j)].is_zero() {
                    let q = -a[(s, j)].div_floor(&pv);
                    c_addmul(a, x, j, s + 1, &q);
                    if !a[(s, j)].is_zero() {
                        remainder = Some((s, j));
                        break;
                    }
                }
            }
            if remainder.is_none() {
                for j in s + 2..n {
                    if !a[(s + 1, j)].is_zero() {
                        let q = a[(s + 1, j)].div_floor(&pv);
                        c_addmul(a, x, j, s, &q);
                        if !a[(s + 1, j)].is_zero() {
                            remainder = Some((s + 1, j));
                            break;
                        }
                    }
                }
            }
            match remainder {
                None => break,
                Some((i, j)) => {
                    if i == s {
                        // remainder in row s: swap into column s+1
                        c_swap(a, x, s + 1, j);
                    } else {
                        // remainder in row s+1: swap into column s
                        c_swap(a, x, s, j);
                    }
                    if a[(s, s + 1)].is_negative() {
                        c_swap(a, x, s, s + 1);
                    }
                    debug_assert!(a[(s, s + 1)].is_positive());
                    debug_assert!(a[(s, s + 1)] <= pv);
                }
            }
        }
        s += 2;
    }
}

// ---------------------------------------------------------------------------
// Lattices
// ---------------------------------------------------------------------------

/// A finitely generated subgroup of `Z^r`, stored via its canonical row
/// Hermite basis (full row rank).
#[derive(Clone, PartialEq, Eq)]
pub struct Lattice {
    ambient: usize,
    basis: IntMat,
}

impl Lattice {
    pub fn from_generators(ambient: usize, generators: &IntMat) -> Self {
        assert_eq!(generators.ncols(), ambient);
        let h = row_hnf(generators);
        let rows: Vec<usize> =
            (0..h.nrows()).filter(|&i| h.row(i).iter().any(|x| !x.is_zero())).collect();
        let cols: Vec<usize> = (0..ambient).collect();
        Lattice { ambient, basis: h.submatrix(&rows, &cols) }
    }

    pub fn zero(ambient: usize) -> Self {
        Lattice { ambient, basis: IntMat::zeros(0, ambient) }
    }

    pub fn full(ambient: usize) -> Self {
        Lattice { ambient, basis: IntMat::identity(ambient) }
    }

    /// `q * Z^r`.
    pub fn scaled(ambient: usize, q: &BigInt) -> Self {
        Lattice::from_generators(ambient, &IntMat::identity(ambient).scale(q))
    }

    /// Diagonal lattice with per-coordinate moduli.
    pub fn diagonal(moduli: &[BigInt]) -> Self {
        let n = moduli.len();
        let mut m = IntMat::zeros(n, n);
        for (i, q) in moduli.iter().enumerate() {
            m[(i, i)] = q.clone();
        }
        Lattice::from_generators(n, &m)
    }

    pub fn ambient_rank(&self) -> usize {
        self.ambient
    }

    pub fn rank(&self) -> usize {
        self.basis.nrows()
    }

    pub fn basis(&self) -> &IntMat {
        &self.basis
    }

    pub fn contains(&self, v: &[BigInt]) -> bool {
        self.reduce(v).iter().all(Zero::is_zero)
    }

    /// Reduce `v` modulo the lattice (remainder after subtracting the unique
    /// combination of HNF basis rows).
    fn reduce(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(v.len(), self.ambient);
        let mut w = v.to_vec();
        for i in 0..self.basis.nrows() {
            let pivot_col = (0..self.ambient).find(|&c| !self.basis[(i, c)].is_zero()).unwrap();
            if w[pivot_col].is_zero() {
                continue;
            }
            let (q, _) = w[pivot_col].div_rem(&self.basis[(i, pivot_col)]);
            if !q.is_zero() {
                for c in 0..self.ambient {
                    let t = &q * &self.basis[(i, c)];
                    w[c] -= t;
                }
            }
        }
        w
    }

    pub fn contains_lattice(&self, other: &Lattice) -> bool {
        assert_eq!(self.ambient, other.ambient);
        other.basis.rows_iter().all(|r| self.contains(r))
    }

    pub fn sum(&self, other: &Lattice) -> Lattice {
        assert_eq!(self.ambient, other.ambient);
        Lattice::from_generators(self.ambient, &self.basis.vstack(&other.basis))
    }

    /// Image of the lattice under right multiplication, `{ v M : v in L }`.
    pub fn mul_right(&self, m: &IntMat) -> Lattice {
        assert_eq!(m.nrows(), self.ambient);
        Lattice::from_generators(m.ncols(), &self.basis.mul(m))
    }

    /// `|Z^r / L|`, or `None` when the index is infinite.
    pub fn index_in_ambient(&self) -> Option<BigInt> {
        if self.rank() < self.ambient {
            return None;
        }
        let mut idx = BigInt::one();
        for i in 0..self.ambient {
            idx *= &self.basis[(i, i)];
        }
        Some(idx.abs())
    }

    /// `|self / sub|` for a sublattice; errors when `sub` is not contained in
    /// `self` or the quotient is infinite.
    pub fn quotient_order(&self, sub: &Lattice) -> Result<BigInt> {
        assert_eq!(self.ambient, sub.ambient);
        if !self.contains_lattice(sub) {
            return Err(Error::Lattice("quotient_order: not a sublattice".into()));
        }
        if sub.rank() < self.rank() {
            return Err(Error::Lattice("quotient_order: infinite quotient".into()));
        }
        // Coordinates of sub's basis with respect to self's HNF basis.
        let k = self.rank();
        let mut coords = IntMat::zeros(sub.rank(), k);
        for (r, row) in sub.basis.rows_iter().enumerate() {
            let mut w = row.to_vec();
            for i in 0..k {
                let pivot_col = (0..self.ambient).find(|&c| !self.basis[(i, c)].is_zero()).unwrap();
                let (q, rem) = w[pivot_col].div_rem(&self.basis[(i, pivot_col)]);
                debug_assert!(rem.is_zero());
                if !q.is_zero() {
                    for c in 0..self.ambient {
                        let t = &q * &self.basis[(i, c)];
                        w[c] -= t;
                    }
                }
                coords[(r, i)] = q;
            }
            debug_assert!(w.iter().all(Zero::is_zero));
        }
        let inv = snf_invariants(&coords);
        if inv.len() < k {
            return Err(Error::Lattice("quotient_order: infinite quotient".into()));
        }
        Ok(inv.iter().product::<BigInt>().abs())
    }

    /// Order of `L / (N Z^r intersected with L)` seen inside `(Z_N)^r`, i.e.
    /// the number of residues of lattice points mod N. Requires `N Z^r ⊆ L`
    /// to reproduce `N^r / [Z^r : L]`; in general computes
    /// `|(L + N Z^r) / N Z^r|`.
    pub fn order_mod(&self, n: &BigInt) -> BigInt {
        let with_n = self.sum(&Lattice::scaled(self.ambient, n));
        let total = num_traits::pow::pow(n.clone(), self.ambient);
        let idx = with_n.index_in_ambient().expect("L + NZ^r has full rank");
        total / idx
    }
}

impl std::fmt::Debug for Lattice {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Lattice(ambient={}, rank={}, basis={:?})", self.ambient, self.rank(), self.basis)
    }
}

/// `{ k in Z^r : k M = 0 mod N }` (k as row vectors, M an r x c matrix).
pub fn kernel_mod(m: &IntMat, n: &BigInt) -> Lattice {
    assert!(n >= &BigInt::from(1));
    let r = m.nrows();
    let c = m.ncols();
    let reduced = m.mod_reduce(n);
    let stacked = reduced.vstack(&IntMat::identity(c).scale(n));
    let ker = left_kernel(&stacked);
    let rows: Vec<usize> = (0..ker.nrows()).collect();
    let cols: Vec<usize> = (0..r).collect();
    Lattice::from_generators(r, &ker.submatrix(&rows, &cols))
}

/// One congruence block: `k * matrix = 0 (mod modulus)`.
pub struct Congruence {
    pub matrix: IntMat,
    pub modulus: BigInt,
}

impl Congruence {
    pub fn new(matrix: IntMat, modulus: impl Into<BigInt>) -> Self {
        Congruence { matrix, modulus: modulus.into() }
    }
}

/// Solve a simultaneous system of congruences `k M_j = 0 (mod N_j)` over
/// `k in Z^ambient`.
pub fn congruence_kernel(ambient: usize, conds: &[Congruence]) -> Lattice {
    if conds.is_empty() {
        return Lattice::full(ambient);
    }
    let mut blocks: Vec<IntMat> = Vec::new();
    let mut total_cols = 0;
    for c in conds {
        assert_eq!(c.matrix.nrows(), ambient);
        total_cols += c.matrix.ncols();
        blocks.push(c.matrix.mod_reduce(&c.modulus));
    }
    // Stacked matrix: [M_1 M_2 ...; diag(N_j I)] of size (ambient + total_cols) x total_cols
    let mut stacked = IntMat::zeros(ambient + total_cols, total_cols);
    let mut off = 0;
    for (b, c) in conds.iter().enumerate() {
        let m = &blocks[b];
        for i in 0..ambient {
            for j in 0..m.ncols() {
                stacked[(i, off + j)] = m[(i, j)].clone();
            }
        }
        for j in 0..m.ncols() {
            stacked[(ambient + off + j, off + j)] = c.modulus.clone();
        }
        off += m.ncols();
    }
    let ker = left_kernel(&stacked);
    let rows: Vec<usize> = (0..ker.nrows()).collect();
    let cols: Vec<usize> = (0..ambient).collect();
    Lattice::from_generators(ambient, &ker.submatrix(&rows, &cols))
}

// ---------------------------------------------------------------------------
// Weight-lattice pairings
// ---------------------------------------------------------------------------

pub type Rational = Ratio<i64>;

/// `<w_i, w_j> = delta_ij - 1/n` for the basis weights.
pub fn weight_pairing(i: u32, j: u32, n: u32) -> Result<Rational> {
    if i < 1 || j < 1 || i > n || j > n {
        return Err(Error::Unsupported(format!("weight index out of range: ({i},{j}) for n={n}")));
    }
    let delta = if i == j { 1 } else { 0 };
    Ok(Rational::new(delta * n as i64 - 1, n as i64))
}

/// `<varpi_i, varpi_j> = min(i,j) - i*j/n` for fundamental weights.
pub fn varpi_pairing(i: u32, j: u32, n: u32) -> Result<Rational> {
    if i < 1 || j < 1 || i >= n || j >= n {
        return Err(Error::Unsupported(format!(
            "fundamental weight index out of range: ({i},{j}) for n={n}"
        )));
    }
    let min = i.min(j) as i64;
    Ok(Rational::new(min * n as i64 - (i as i64) * (j as i64), n as i64))
}
