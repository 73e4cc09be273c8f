//! Exact delta-LLL reduction.
//!
//! The reduction runs entirely on integers: the Gram-Schmidt data is carried
//! as the classical (d_i, lambda_{i,j}) integral representation, so the
//! Lovasz condition is tested exactly at every step and the output certificate
//! needs no floating point anywhere.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::arith::round_div;
use crate::lattice::LatticeBasis;
use crate::matrix::{dot, norm_sq, IntegerMatrix};

#[derive(Debug, Error)]
pub enum LllError {
    #[error("swap budget of {budget} exhausted after {swaps} swaps")]
    BudgetExceeded {
        budget: u64,
        swaps: u64,
        /// Partially reduced rows; spans the input lattice but carries no
        /// reducedness certificate.
        partial: IntegerMatrix,
    },
    #[error("delta must lie strictly inside (1/4, 1), got {0}")]
    DeltaOutOfRange(BigRational),
    #[error("basis rows are linearly dependent")]
    RankDeficient,
}

/// Reduction parameter delta as an exact rational in (1/4, 1).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReductionParams {
    pub delta: BigRational,
    pub max_swaps: Option<u64>,
    pub provide_stats: bool,
}

impl Default for ReductionParams {
    fn default() -> Self {
        Self {
            delta: BigRational::new(BigInt::from(99), BigInt::from(100)),
            max_swaps: None,
            provide_stats: true,
        }
    }
}

impl ReductionParams {
    pub fn with_delta(num: i64, den: i64) -> Self {
        Self {
            delta: BigRational::new(BigInt::from(num), BigInt::from(den)),
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<(), LllError> {
        let quarter = BigRational::new(BigInt::one(), BigInt::from(4));
        if self.delta <= quarter || self.delta >= BigRational::one() {
            return Err(LllError::DeltaOutOfRange(self.delta.clone()));
        }
        Ok(())
    }

    /// c = 1/(delta - 1/4), the approximation base of the reduction contract.
    pub fn c(&self) -> BigRational {
        let quarter = BigRational::new(BigInt::one(), BigInt::from(4));
        (self.delta.clone() - quarter).recip()
    }

    pub fn log2_c(&self) -> f64 {
        crate::arith::log2_ratio(&self.c())
    }
}

#[derive(Clone, Debug, Default)]
pub struct ReductionStats {
    pub swap_count: u64,
    pub size_reduction_count: u64,
    pub max_intermediate_bits: u64,
    /// Squared row norms of the returned basis, nondecreasing.
    pub norms_sq: Vec<BigInt>,
}

struct State {
    rows: Vec<Vec<BigInt>>,
    /// d[i] = Gram determinant of the first i rows (d[0] = 1).
    d: Vec<BigInt>,
    /// lambda[i][j] = d[j+1] * mu_{i,j} for j < i.
    lambda: Vec<Vec<BigInt>>,
    swaps: u64,
    size_reductions: u64,
    max_bits: u64,
}

impl State {
    fn new(rows: Vec<Vec<BigInt>>) -> Self {
        let n = rows.len();
        Self {
            rows,
            d: vec![BigInt::one(); n + 1],
            lambda: (0..n).map(|i| vec![BigInt::zero(); i]).collect(),
            swaps: 0,
            size_reductions: 0,
            max_bits: 0,
        }
    }

    fn observe(&mut self, x: &BigInt) {
        let bits = x.magnitude().bits();
        if bits > self.max_bits {
            self.max_bits = bits;
        }
    }

    /// Introduce row k into the integral Gram-Schmidt data.
    fn introduce(&mut self, k: usize) -> Result<(), LllError> {
        for j in 0..=k {
            let mut u = dot(&self.rows[k], &self.rows[j]);
            for i in 0..j {
                u = (&self.d[i + 1] * &u - &self.lambda[k][i] * &self.lambda[j][i]) / &self.d[i];
            }
            if j < k {
                self.lambda[k][j] = u;
            } else {
                if u.is_zero() || u.is_negative() {
                    return Err(LllError::RankDeficient);
                }
                self.observe(&u);
                self.d[k + 1] = u;
            }
        }
        Ok(())
    }

    /// Size-reduce row k against row l (RED step).
    fn size_reduce(&mut self, k: usize, l: usize) {
        let two_lam: BigInt = &self.lambda[k][l] * 2;
        if two_lam.abs() <= self.d[l + 1] {
            return;
        }
        let q = round_div(&self.lambda[k][l], &self.d[l + 1]);
        debug_assert!(!q.is_zero());
        let (head, tail) = self.rows.split_at_mut(k);
        let bl = &head[l];
        for (x, y) in tail[0].iter_mut().zip(bl) {
            *x -= &q * y;
        }
        let lam_l: Vec<BigInt> = self.lambda[l].clone();
        self.lambda[k][l] -= &q * &self.d[l + 1];
        for i in 0..l {
            self.lambda[k][i] -= &q * &lam_l[i];
        }
        self.size_reductions += 1;
    }

    /// Lovasz test at position k with delta = p/q: swap needed iff
    /// q * (d[k+1] d[k-1] + lambda^2) < p * d[k]^2.
    fn needs_swap(&self, k: usize, p: &BigInt, q: &BigInt) -> bool {
        let lam = &self.lambda[k][k - 1];
        let lhs = q * (&self.d[k + 1] * &self.d[k - 1] + lam * lam);
        let rhs = p * (&self.d[k] * &self.d[k]);
        lhs < rhs
    }

    /// Swap rows k-1 and k, updating the integral GSO data in place.
    fn swap(&mut self, k: usize, kmax: usize) {
        self.rows.swap(k - 1, k);
        for j in 0..k.saturating_sub(1) {
            let t = self.lambda[k][j].clone();
            self.lambda[k][j] = self.lambda[k - 1][j].clone();
            self.lambda[k - 1][j] = t;
        }
        let lam = self.lambda[k][k - 1].clone();
        let b = (&self.d[k - 1] * &self.d[k + 1] + &lam * &lam) / &self.d[k];
        for i in k + 1..=kmax {
            let t = self.lambda[i][k].clone();
            self.lambda[i][k] = (&self.d[k + 1] * &self.lambda[i][k - 1] - &lam * &t) / &self.d[k];
            self.lambda[i][k - 1] = (&b * &t + &lam * &self.lambda[i][k]) / &self.d[k + 1];
        }
        self.observe(&b);
        self.d[k] = b;
        self.swaps += 1;
    }
}

/// delta-LLL reduce a basis; rows of the result satisfy the exact Lovasz and
/// size-reduction conditions in their internal order. No sorting applied.
pub fn lll_reduce_unsorted(
    basis: &LatticeBasis,
    params: &ReductionParams,
) -> Result<(LatticeBasis, ReductionStats), LllError> {
    params.validate()?;
    let n = basis.rank();
    let mut st = State::new(basis.matrix().clone().into_row_vecs());
    let (p, q) = (params.delta.numer().clone(), params.delta.denom().clone());

    let mut k = 1usize;
    let mut kmax = 0usize;
    st.d[1] = norm_sq(&st.rows[0]);
    if n > 0 && st.d[1].is_zero() {
        return Err(LllError::RankDeficient);
    }
    while k < n {
        if k > kmax {
            kmax = k;
            st.introduce(k)?;
        }
        st.size_reduce(k, k - 1);
        if st.needs_swap(k, &p, &q) {
            st.swap(k, kmax);
            if let Some(budget) = params.max_swaps {
                if st.swaps >= budget {
                    return Err(LllError::BudgetExceeded {
                        budget,
                        swaps: st.swaps,
                        partial: IntegerMatrix::from_rows(st.rows),
                    });
                }
            }
            k = k.max(2) - 1;
        } else {
            for l in (0..k.saturating_sub(1)).rev() {
                st.size_reduce(k, l);
            }
            k += 1;
        }
    }

    let stats = ReductionStats {
        swap_count: st.swaps,
        size_reduction_count: st.size_reductions,
        max_intermediate_bits: st.max_bits,
        norms_sq: Vec::new(),
    };
    let mat = IntegerMatrix::from_rows(st.rows);
    let out = LatticeBasis::with_known_gram_det(mat, basis.gram_det().clone());
    Ok((out, stats))
}

/// delta-LLL reduce and then sort the caller-visible rows by nondecreasing
/// norm (ties broken by lexicographic entry order, for determinism).
pub fn lll_reduce(
    basis: &LatticeBasis,
    params: &ReductionParams,
) -> Result<(LatticeBasis, ReductionStats), LllError> {
    let (reduced, mut stats) = lll_reduce_unsorted(basis, params)?;
    let gram_det = reduced.gram_det().clone();
    let mut rows = reduced.into_matrix().into_row_vecs();
    rows.sort_by_cached_key(|r| (norm_sq(r), r.clone()));
    stats.norms_sq = rows.iter().map(|r| norm_sq(r)).collect();
    let out = LatticeBasis::with_known_gram_det(IntegerMatrix::from_rows(rows), gram_det);
    Ok((out, stats))
}

/// Exact certificate: size-reduction and Lovasz conditions, recomputed from
/// scratch with rational Gram-Schmidt, independent of the reduction path.
pub fn is_delta_lll_reduced(mat: &IntegerMatrix, delta: &BigRational) -> bool {
    let n = mat.rows();
    let rows: Vec<Vec<BigRational>> = (0..n)
        .map(|i| {
            mat.row(i)
                .iter()
                .map(|x| BigRational::from_integer(x.clone()))
                .collect()
        })
        .collect();
    // Rational GSO.
    let mut star: Vec<Vec<BigRational>> = Vec::with_capacity(n);
    let mut mu: Vec<Vec<BigRational>> = Vec::with_capacity(n);
    let mut star_norm: Vec<BigRational> = Vec::with_capacity(n);
    for i in 0..n {
        let mut v = rows[i].clone();
        let mut mu_i = Vec::with_capacity(i);
        for j in 0..i {
            let m = dot_rational(&rows[i], &star[j]) / &star_norm[j];
            for (x, y) in v.iter_mut().zip(&star[j]) {
                *x -= &m * y;
            }
            mu_i.push(m);
        }
        let ns = dot_rational(&v, &v);
        if ns.is_zero() {
            return false;
        }
        star.push(v);
        star_norm.push(ns);
        mu.push(mu_i);
    }
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    for i in 0..n {
        for j in 0..i {
            if mu[i][j].abs() > half {
                return false;
            }
        }
        if i >= 1 {
            // ||b*_i||^2 >= (delta - mu^2) ||b*_{i-1}||^2
            let m = &mu[i][i - 1];
            let lhs = &star_norm[i] + m * m * &star_norm[i - 1];
            let rhs = delta * &star_norm[i - 1];
            if lhs < rhs {
                return false;
            }
        }
    }
    true
}

fn dot_rational(a: &[BigRational], b: &[BigRational]) -> BigRational {
    let mut acc = BigRational::zero();
    for (x, y) in a.iter().zip(b) {
        if !x.is_zero() && !y.is_zero() {
            acc += x * y;
        }
    }
    acc
}
