//! Arbitrary-precision integer and exact rational linear algebra.
//!
//! Matrices are plain values (row-major, basis vectors in rows). Everything
//! here is exact: no floating point, no rounding.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::arith::{is_probable_prime, round_div};

#[derive(Debug, Error)]
pub enum LinAlgError {
    /// The matrix is not invertible modulo the given modulus. When the
    /// elimination stumbles over a zero divisor, the nontrivial factor of the
    /// modulus it discovered is carried along (useful for CRT-ACD moduli).
    #[error("matrix not invertible modulo {modulus}")]
    NotInvertibleMod {
        modulus: BigInt,
        factor: Option<BigInt>,
    },
    #[error("modulus {0} is not prime")]
    CompositeModulus(BigInt),
    #[error("rank deficient: expected rank {expected}, found {found}")]
    RankDeficient { expected: usize, found: usize },
    #[error("dimension mismatch: {context}")]
    DimensionMismatch { context: String },
    #[error("singular matrix")]
    Singular,
}

/// Dense matrix of arbitrary-precision signed integers, row-major.
/// Rows are allowed to be empty (e.g. the kernel of an injective map).
#[derive(Clone, PartialEq, Eq)]
pub struct IntegerMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl std::fmt::Debug for IntegerMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "IntegerMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            writeln!(
                f,
                "  [{}]",
                self.row(i)
                    .iter()
                    .map(|x| x.to_string())
                    .collect::<Vec<_>>()
                    .join(", ")
            )?;
        }
        write!(f, "]")
    }
}

impl IntegerMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<BigInt>) -> Self {
        assert!(cols >= 1, "matrix needs at least one column");
        assert_eq!(data.len(), rows * cols);
        Self { rows, cols, data }
    }

    pub fn zero(rows: usize, cols: usize) -> Self {
        Self::new(rows, cols, vec![BigInt::zero(); rows * cols])
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n, n);
        for i in 0..n {
            m[(i, i)] = BigInt::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<BigInt>>) -> Self {
        let r = rows.len();
        let c = rows.first().map(|v| v.len()).unwrap_or(1);
        assert!(rows.iter().all(|v| v.len() == c), "ragged rows");
        Self::new(r, c, rows.into_iter().flatten().collect())
    }

    pub fn from_i64_rows(rows: &[&[i64]]) -> Self {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
                .collect(),
        )
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [BigInt] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn iter_rows(&self) -> impl Iterator<Item = &[BigInt]> {
        (0..self.rows).map(|i| self.row(i))
    }

    pub fn into_row_vecs(self) -> Vec<Vec<BigInt>> {
        let cols = self.cols;
        let mut data = self.data;
        let mut out = Vec::with_capacity(self.rows);
        for _ in 0..self.rows {
            let rest = data.split_off(cols);
            out.push(data);
            data = rest;
        }
        out
    }

    pub fn swap_rows(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        let c = self.cols;
        let (a, b) = (i.min(j), i.max(j));
        let (lo, hi) = self.data.split_at_mut(b * c);
        lo[a * c..(a + 1) * c].swap_with_slice(&mut hi[..c]);
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zero(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)].clone();
            }
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matmul shape");
        let mut out = Self::zero(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let t = a * &other[(k, j)];
                    out[(i, j)] += t;
                }
            }
        }
        out
    }

    /// Gram matrix B * B^T.
    pub fn gram(&self) -> Self {
        let mut out = Self::zero(self.rows, self.rows);
        for i in 0..self.rows {
            for j in 0..=i {
                let d = dot(self.row(i), self.row(j));
                out[(j, i)] = d.clone();
                out[(i, j)] = d;
            }
        }
        out
    }

    pub fn map(&self, f: impl Fn(&BigInt) -> BigInt) -> Self {
        Self::new(self.rows, self.cols, self.data.iter().map(f).collect())
    }

    /// Entry-wise canonical reduction into [0, n).
    pub fn reduce_mod(&self, n: &BigInt) -> Self {
        self.map(|x| x.mod_floor(n))
    }

    pub fn to_rational(&self) -> RationalMatrix {
        RationalMatrix::new(
            self.rows,
            self.cols,
            self.data
                .iter()
                .map(|x| BigRational::from_integer(x.clone()))
                .collect(),
        )
    }

    /// Determinant of a square matrix, by fraction-free (Bareiss) elimination.
    pub fn determinant(&self) -> BigInt {
        assert_eq!(self.rows, self.cols, "determinant of non-square matrix");
        let n = self.rows;
        if n == 0 {
            return BigInt::one();
        }
        let mut w = self.clone();
        let mut denom = BigInt::one();
        let mut sign = 1i32;
        for k in 0..n - 1 {
            if w[(k, k)].is_zero() {
                match (k + 1..n).find(|&i| !w[(i, k)].is_zero()) {
                    Some(i) => {
                        w.swap_rows(k, i);
                        sign = -sign;
                    }
                    None => return BigInt::zero(),
                }
            }
            let pivot = w[(k, k)].clone();
            for i in k + 1..n {
                for j in k + 1..n {
                    let t = &w[(i, j)] * &pivot - &w[(i, k)] * &w[(k, j)];
                    w[(i, j)] = &t / &denom;
                }
                w[(i, k)] = BigInt::zero();
            }
            denom = pivot;
        }
        let det = w[(n - 1, n - 1)].clone();
        if sign < 0 {
            -det
        } else {
            det
        }
    }

    /// Rank over the rationals, by fraction-free elimination.
    pub fn rank(&self) -> usize {
        let mut w = self.clone();
        let (rows, cols) = (w.rows, w.cols);
        let mut denom = BigInt::one();
        let mut rank = 0;
        for col in 0..cols {
            if rank == rows {
                break;
            }
            let Some(p) = (rank..rows).find(|&i| !w[(i, col)].is_zero()) else {
                continue;
            };
            w.swap_rows(rank, p);
            let pivot = w[(rank, col)].clone();
            for i in rank + 1..rows {
                for j in col + 1..cols {
                    let t = &w[(i, j)] * &pivot - &w[(i, col)] * &w[(rank, j)];
                    w[(i, j)] = &t / &denom;
                }
                w[(i, col)] = BigInt::zero();
            }
            denom = pivot;
            rank += 1;
        }
        rank
    }
}

impl std::ops::Index<(usize, usize)> for IntegerMatrix {
    type Output = BigInt;
    fn index(&self, (i, j): (usize, usize)) -> &BigInt {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IntegerMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigInt {
        &mut self.data[i * self.cols + j]
    }
}

pub fn dot(a: &[BigInt], b: &[BigInt]) -> BigInt {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = BigInt::zero();
    for (x, y) in a.iter().zip(b) {
        if !x.is_zero() && !y.is_zero() {
            acc += x * y;
        }
    }
    acc
}

pub fn norm_sq(v: &[BigInt]) -> BigInt {
    dot(v, v)
}

/// Dense matrix of exact fractions, normalized by num-rational.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigRational>,
}

impl RationalMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<BigRational>) -> Self {
        assert!(cols >= 1);
        assert_eq!(data.len(), rows * cols);
        Self { rows, cols, data }
    }

    pub fn identity(n: usize) -> Self {
        let mut data = vec![BigRational::zero(); n * n];
        for i in 0..n {
            data[i * n + i] = BigRational::one();
        }
        Self::new(n, n, data)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[BigRational] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::new(
            self.cols,
            self.rows,
            vec![BigRational::zero(); self.rows * self.cols],
        );
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)].clone();
            }
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows);
        let mut out = Self::new(
            self.rows,
            other.cols,
            vec![BigRational::zero(); self.rows * other.cols],
        );
        for i in 0..self.rows {
            for k in 0..self.cols {
                if self[(i, k)].is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let t = &self[(i, k)] * &other[(k, j)];
                    out[(i, j)] += t;
                }
            }
        }
        out
    }

    /// Inverse of a square matrix by Gauss-Jordan elimination.
    pub fn inverse(&self) -> Result<Self, LinAlgError> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut w = self.clone();
        let mut inv = Self::identity(n);
        for col in 0..n {
            let Some(p) = (col..n).find(|&i| !w[(i, col)].is_zero()) else {
                return Err(LinAlgError::Singular);
            };
            w.swap_rows_internal(col, p);
            inv.swap_rows_internal(col, p);
            let pivot = w[(col, col)].clone();
            for j in 0..n {
                w[(col, j)] /= &pivot;
                inv[(col, j)] /= &pivot;
            }
            for i in 0..n {
                if i == col || w[(i, col)].is_zero() {
                    continue;
                }
                let f = w[(i, col)].clone();
                for j in 0..n {
                    let t = &f * &w[(col, j)];
                    w[(i, j)] -= t;
                    let t = &f * &inv[(col, j)];
                    inv[(i, j)] -= t;
                }
            }
        }
        Ok(inv)
    }

    fn swap_rows_internal(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for c in 0..self.cols {
            let a = i * self.cols + c;
            let b = j * self.cols + c;
            self.data.swap(a, b);
        }
    }

    /// Scale by an integer and demand an integral result.
    pub fn scale_to_integer(&self, factor: &BigInt) -> Result<IntegerMatrix, LinAlgError> {
        let mut data = Vec::with_capacity(self.rows * self.cols);
        for x in &self.data {
            let scaled = x * BigRational::from_integer(factor.clone());
            if !scaled.is_integer() {
                return Err(LinAlgError::DimensionMismatch {
                    context: "scaled matrix is not integral".into(),
                });
            }
            data.push(scaled.to_integer());
        }
        Ok(IntegerMatrix::new(self.rows, self.cols, data))
    }

    pub fn is_integral(&self) -> bool {
        self.data.iter().all(|x| x.is_integer())
    }

    pub fn to_integer(&self) -> Option<IntegerMatrix> {
        if !self.is_integral() {
            return None;
        }
        Some(IntegerMatrix::new(
            self.rows,
            self.cols,
            self.data.iter().map(|x| x.to_integer()).collect(),
        ))
    }
}

impl std::ops::Index<(usize, usize)> for RationalMatrix {
    type Output = BigRational;
    fn index(&self, (i, j): (usize, usize)) -> &BigRational {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for RationalMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigRational {
        &mut self.data[i * self.cols + j]
    }
}

/// Inverse of a square matrix modulo n >= 2, entries reduced into [0, n).
///
/// Fails with the discovered nontrivial factor of n when the elimination hits
/// a pivot sharing a factor with n.
pub fn invert_mod(a: &IntegerMatrix, n: &BigInt) -> Result<IntegerMatrix, LinAlgError> {
    assert_eq!(a.rows(), a.cols(), "invert_mod needs a square matrix");
    assert!(n >= &BigInt::from(2), "modulus must be >= 2");
    let dim = a.rows();
    let mut w = a.reduce_mod(n);
    let mut inv = IntegerMatrix::identity(dim);

    let not_invertible = |g: BigInt, n: &BigInt| LinAlgError::NotInvertibleMod {
        modulus: n.clone(),
        factor: (g > BigInt::one() && &g < n).then_some(g),
    };

    for col in 0..dim {
        // Euclidean chain on the column so the pivot becomes the column gcd;
        // a single coprime entry may not exist even when the matrix is
        // invertible mod n.
        loop {
            let p = (col..dim)
                .filter(|&i| !w[(i, col)].is_zero())
                .min_by_key(|&i| w[(i, col)].clone());
            let Some(p) = p else {
                return Err(not_invertible(n.clone(), n));
            };
            w.swap_rows(col, p);
            inv.swap_rows(col, p);
            let mut done = true;
            let pivot = w[(col, col)].clone();
            for i in col + 1..dim {
                if w[(i, col)].is_zero() {
                    continue;
                }
                let q = w[(i, col)].div_floor(&pivot);
                for j in 0..dim {
                    let t = (&w[(i, j)] - &q * &w[(col, j)]).mod_floor(n);
                    w[(i, j)] = t;
                    let t = (&inv[(i, j)] - &q * &inv[(col, j)]).mod_floor(n);
                    inv[(i, j)] = t;
                }
                if !w[(i, col)].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        let pivot = w[(col, col)].clone();
        let g = pivot.gcd(n);
        if !g.is_one() {
            return Err(not_invertible(g, n));
        }
        let pinv = mod_inverse(&pivot, n).expect("gcd checked");
        for j in 0..dim {
            w[(col, j)] = (&w[(col, j)] * &pinv).mod_floor(n);
            inv[(col, j)] = (&inv[(col, j)] * &pinv).mod_floor(n);
        }
        for i in 0..dim {
            if i == col || w[(i, col)].is_zero() {
                continue;
            }
            let f = w[(i, col)].clone();
            for j in 0..dim {
                let t = (&w[(i, j)] - &f * &w[(col, j)]).mod_floor(n);
                w[(i, j)] = t;
                let t = (&inv[(i, j)] - &f * &inv[(col, j)]).mod_floor(n);
                inv[(i, j)] = t;
            }
        }
    }
    Ok(inv)
}

/// Modular inverse of a modulo n, when gcd(a, n) = 1.
pub fn mod_inverse(a: &BigInt, n: &BigInt) -> Option<BigInt> {
    let e = a.extended_gcd(n);
    if e.gcd.is_one() {
        Some(e.x.mod_floor(n))
    } else {
        None
    }
}

/// Basis of the left kernel { alpha : alpha * B = 0 mod p } over the field
/// with p elements, returned in reduced row-echelon form (pivots equal 1).
pub fn kernel_mod_p(b: &IntegerMatrix, p: &BigInt) -> Result<Vec<Vec<BigInt>>, LinAlgError> {
    if !is_probable_prime(p) {
        return Err(LinAlgError::CompositeModulus(p.clone()));
    }
    // Left kernel of B = right kernel of B^T.
    let m = b.transpose().reduce_mod(p);
    let (rows, cols) = (m.rows(), m.cols());
    let mut w = m;
    let mut pivot_cols = Vec::new();
    let mut rank = 0;
    for col in 0..cols {
        let Some(pr) = (rank..rows).find(|&i| !w[(i, col)].is_zero()) else {
            continue;
        };
        w.swap_rows(rank, pr);
        let pinv = mod_inverse(&w[(rank, col)], p).expect("prime modulus");
        for j in 0..cols {
            w[(rank, j)] = (&w[(rank, j)] * &pinv).mod_floor(p);
        }
        for i in 0..rows {
            if i == rank || w[(i, col)].is_zero() {
                continue;
            }
            let f = w[(i, col)].clone();
            for j in 0..cols {
                let t = (&w[(i, j)] - &f * &w[(rank, j)]).mod_floor(p);
                w[(i, j)] = t;
            }
        }
        pivot_cols.push(col);
        rank += 1;
        if rank == rows {
            break;
        }
    }
    let mut kernel = Vec::new();
    for free in (0..cols).filter(|c| !pivot_cols.contains(c)) {
        let mut v = vec![BigInt::zero(); cols];
        v[free] = BigInt::one();
        for (r, &pc) in pivot_cols.iter().enumerate() {
            v[pc] = (-&w[(r, free)]).mod_floor(p);
        }
        kernel.push(v);
    }
    // The free-variable construction is echelon up to row order; normalize to
    // reduced row-echelon form for a canonical answer.
    Ok(rref_mod_p(kernel, p))
}

fn rref_mod_p(rows_in: Vec<Vec<BigInt>>, p: &BigInt) -> Vec<Vec<BigInt>> {
    if rows_in.is_empty() {
        return rows_in;
    }
    let cols = rows_in[0].len();
    let mut w = rows_in;
    let rows = w.len();
    let mut rank = 0;
    for col in 0..cols {
        let Some(pr) = (rank..rows).find(|&i| !w[i][col].is_zero()) else {
            continue;
        };
        w.swap(rank, pr);
        let pinv = mod_inverse(&w[rank][col], p).expect("prime modulus");
        for j in 0..cols {
            w[rank][j] = (&w[rank][j] * &pinv).mod_floor(p);
        }
        for i in 0..rows {
            if i == rank || w[i][col].is_zero() {
                continue;
            }
            let f = w[i][col].clone();
            for j in 0..cols {
                w[i][j] = (&w[i][j] - &f * &w[rank][j]).mod_floor(p);
            }
        }
        rank += 1;
        if rank == rows {
            break;
        }
    }
    w.truncate(rank);
    w
}

/// Saturated left integer kernel: rows K with K * U = 0 exactly, forming a
/// basis of { alpha in Z^rows : alpha * U = 0 }.
///
/// Computed from the unimodular transform of a row echelon reduction, which
/// makes the result a basis of the full kernel lattice (its own completion),
/// not just a finite-index sublattice.
pub fn left_integer_kernel(u: &IntegerMatrix) -> Result<IntegerMatrix, LinAlgError> {
    let (kernel, rank) = left_kernel_with_rank(u);
    if rank < u.cols() {
        return Err(LinAlgError::RankDeficient {
            expected: u.cols(),
            found: rank,
        });
    }
    Ok(kernel)
}

/// Left kernel basis (saturated) plus the rank of the input.
pub fn left_kernel_with_rank(u: &IntegerMatrix) -> (IntegerMatrix, usize) {
    let rows = u.rows();
    let cols = u.cols();
    let mut w = u.clone();
    let mut t = IntegerMatrix::identity(rows);
    let mut pivot = 0usize;
    for col in 0..cols {
        if pivot == rows {
            break;
        }
        loop {
            let Some(p) = (pivot..rows)
                .filter(|&i| !w[(i, col)].is_zero())
                .min_by_key(|&i| w[(i, col)].abs())
            else {
                break;
            };
            w.swap_rows(pivot, p);
            t.swap_rows(pivot, p);
            if w[(pivot, col)].is_negative() {
                for j in 0..cols {
                    let v = -&w[(pivot, j)];
                    w[(pivot, j)] = v;
                }
                for j in 0..rows {
                    let v = -&t[(pivot, j)];
                    t[(pivot, j)] = v;
                }
            }
            let piv = w[(pivot, col)].clone();
            let mut all_zero = true;
            for i in pivot + 1..rows {
                if w[(i, col)].is_zero() {
                    continue;
                }
                let q = round_div(&w[(i, col)], &piv);
                if !q.is_zero() {
                    for j in 0..cols {
                        let v = &w[(i, j)] - &q * &w[(pivot, j)];
                        w[(i, j)] = v;
                    }
                    for j in 0..rows {
                        let v = &t[(i, j)] - &q * &t[(pivot, j)];
                        t[(i, j)] = v;
                    }
                }
                if !w[(i, col)].is_zero() {
                    all_zero = false;
                }
            }
            if all_zero {
                break;
            }
        }
        if !w[(pivot, col)].is_zero() {
            pivot += 1;
        }
    }
    let kernel_rows: Vec<Vec<BigInt>> = (pivot..rows).map(|i| t.row(i).to_vec()).collect();
    debug_assert!({
        let ut = u.transpose();
        kernel_rows
            .iter()
            .all(|alpha| (0..cols).all(|c| dot(alpha, ut.row(c)).is_zero()))
    });
    let kernel = if kernel_rows.is_empty() {
        IntegerMatrix::new(0, rows, Vec::new())
    } else {
        IntegerMatrix::from_rows(kernel_rows)
    };
    (kernel, pivot)
}

/// Upper-triangular basis H (m x m, positive diagonal) of the lattice spanned
/// by the rows of `gens` together with n * Z^m. Supports exact membership
/// tests modulo n for arbitrary (also composite) n.
pub fn triangular_span_mod(gens: &IntegerMatrix, n: &BigInt) -> IntegerMatrix {
    assert!(n.is_positive());
    let m = gens.cols();
    let mut h = IntegerMatrix::zero(m, m);
    for i in 0..m {
        h[(i, i)] = n.clone();
    }
    for gi in 0..gens.rows() {
        let mut v: Vec<BigInt> = gens.row(gi).iter().map(|x| x.mod_floor(n)).collect();
        for c in 0..m {
            if v[c].is_zero() {
                continue;
            }
            let e = h[(c, c)].extended_gcd(&v[c]);
            // New pivot row x*H[c] + y*v has entry gcd at column c; v is
            // cleared at column c by the cofactor combination.
            let hcc_over_g = &h[(c, c)] / &e.gcd;
            let vc_over_g = &v[c] / &e.gcd;
            let hc: Vec<BigInt> = (0..m).map(|j| h[(c, j)].clone()).collect();
            for j in 0..m {
                h[(c, j)] = &e.x * &hc[j] + &e.y * &v[j];
            }
            for j in 0..m {
                v[j] = &hcc_over_g * &v[j] - &vc_over_g * &hc[j];
            }
        }
        debug_assert!(v.iter().all(|x| x.is_zero()));
    }
    // Normalize: positive diagonal, entries above reduced.
    for c in 0..m {
        if h[(c, c)].is_negative() {
            for j in 0..m {
                let t = -&h[(c, j)];
                h[(c, j)] = t;
            }
        }
    }
    for c in (0..m).rev() {
        for i in 0..c {
            let q = h[(i, c)].div_floor(&h[(c, c)]);
            if q.is_zero() {
                continue;
            }
            for j in 0..m {
                let t = &h[(i, j)] - &q * &h[(c, j)];
                h[(i, j)] = t;
            }
        }
    }
    h
}

/// Does v lie in the lattice spanned by the rows of the upper-triangular
/// basis from [`triangular_span_mod`]?
pub fn triangular_contains(h: &IntegerMatrix, v: &[BigInt]) -> bool {
    let m = h.cols();
    assert_eq!(v.len(), m);
    let mut rem: Vec<BigInt> = v.to_vec();
    for c in 0..m {
        if rem[c].is_zero() {
            continue;
        }
        if !(&rem[c] % &h[(c, c)]).is_zero() {
            return false;
        }
        let q = &rem[c] / &h[(c, c)];
        for j in c..m {
            let t = &rem[j] - &q * &h[(c, j)];
            rem[j] = t;
        }
    }
    rem.iter().all(|x| x.is_zero())
}

/// Solve X * A = B over the rationals for A of full row rank; returns None if
/// some row of B lies outside the row span of A.
pub fn solve_left_rational(a: &IntegerMatrix, b: &IntegerMatrix) -> Option<RationalMatrix> {
    assert_eq!(a.cols(), b.cols());
    let n = a.rows();
    // Find n independent columns of A by elimination, invert that minor.
    let cols = pivot_columns(a)?;
    let minor = RationalMatrix::new(
        n,
        n,
        (0..n)
            .flat_map(|i| {
                cols.iter()
                    .map(move |&c| BigRational::from_integer(a[(i, c)].clone()))
            })
            .collect(),
    );
    let minor_inv = minor.inverse().ok()?;
    let b_minor = RationalMatrix::new(
        b.rows(),
        n,
        (0..b.rows())
            .flat_map(|i| {
                cols.iter()
                    .map(move |&c| BigRational::from_integer(b[(i, c)].clone()))
            })
            .collect(),
    );
    let x = b_minor.mul(&minor_inv);
    // Verify on all columns: rows of B must actually lie in the span.
    let check = x.mul(&a.to_rational());
    for i in 0..b.rows() {
        for j in 0..b.cols() {
            if check[(i, j)] != BigRational::from_integer(b[(i, j)].clone()) {
                return None;
            }
        }
    }
    Some(x)
}

/// Indices of `a.rows()` linearly independent columns, or None if the row
/// rank is deficient.
fn pivot_columns(a: &IntegerMatrix) -> Option<Vec<usize>> {
    let (rows, cols) = (a.rows(), a.cols());
    let mut w = a.clone();
    let mut denom = BigInt::one();
    let mut pivots = Vec::new();
    let mut rank = 0;
    for col in 0..cols {
        if rank == rows {
            break;
        }
        let Some(p) = (rank..rows).find(|&i| !w[(i, col)].is_zero()) else {
            continue;
        };
        w.swap_rows(rank, p);
        let pivot = w[(rank, col)].clone();
        for i in rank + 1..rows {
            for j in col + 1..cols {
                let t = &w[(i, j)] * &pivot - &w[(i, col)] * &w[(rank, j)];
                w[(i, j)] = &t / &denom;
            }
            w[(i, col)] = BigInt::zero();
        }
        denom = pivot;
        pivots.push(col);
        rank += 1;
    }
    (rank == rows).then_some(pivots)
}

/// gcd of all maximal minors of a full-row-rank matrix; equals 1 exactly when
/// the rows span a saturated (complete) lattice. Only usable at small sizes.
pub fn maximal_minor_gcd(a: &IntegerMatrix) -> BigInt {
    let k = a.rows();
    let m = a.cols();
    assert!(k <= m);
    let mut g = BigInt::zero();
    let mut combo: Vec<usize> = (0..k).collect();
    loop {
        let sub = IntegerMatrix::new(
            k,
            k,
            (0..k)
                .flat_map(|i| combo.iter().map(move |&c| a[(i, c)].clone()))
                .collect(),
        );
        g = g.gcd(&sub.determinant());
        // next k-combination of 0..m
        let mut i = k;
        loop {
            if i == 0 {
                return g;
            }
            i -= 1;
            if combo[i] != i + m - k {
                combo[i] += 1;
                for j in i + 1..k {
                    combo[j] = combo[j - 1] + 1;
                }
                break;
            }
        }
    }
}
