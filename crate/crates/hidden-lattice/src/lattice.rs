//! Lattice values: validated bases, sizes, volumes, and a brute-force
//! successive-minima oracle for small instances.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::arith::{floor_sqrt_ratio, log2_bigint, ratio_to_f64};
use crate::matrix::{dot, norm_sq, solve_left_rational, IntegerMatrix};

#[derive(Debug, Error)]
pub enum LatticeError {
    #[error("basis rows are linearly dependent (Gram determinant is zero)")]
    SingularBasis,
    #[error("invalid dimensions: rank {rank} in ambient dimension {ambient}")]
    InvalidDimensions { rank: usize, ambient: usize },
}

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("radius too small: certified only {found} of {needed} minima")]
    RadiusTooSmall { needed: usize, found: usize },
    #[error("enumeration budget exceeded: {points} candidate points > {budget}")]
    EnumerationBudgetExceeded { points: u128, budget: u128 },
}

/// Validated full-row-rank integer basis. Rows are the basis vectors.
///
/// Carries the exact Gram determinant (Vol^2) and the exact squared size
/// sigma^2 = (1/n) sum ||v||^2; solvers compare exact squares only.
#[derive(Clone, PartialEq, Eq)]
pub struct LatticeBasis {
    mat: IntegerMatrix,
    gram_det: BigInt,
    sigma_sq: BigRational,
}

impl std::fmt::Debug for LatticeBasis {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "LatticeBasis(rank {} in dim {}, vol^2 = {})",
            self.rank(),
            self.ambient_dim(),
            self.gram_det
        )
    }
}

impl LatticeBasis {
    pub fn new(mat: IntegerMatrix) -> Result<Self, LatticeError> {
        let (n, m) = (mat.rows(), mat.cols());
        if n < 1 || n > m {
            return Err(LatticeError::InvalidDimensions {
                rank: n,
                ambient: m,
            });
        }
        let gram_det = mat.gram().determinant();
        if !gram_det.is_positive() {
            return Err(LatticeError::SingularBasis);
        }
        Ok(Self::from_parts(mat, gram_det))
    }

    /// Constructor for callers that already know the Gram determinant (LLL
    /// preserves it; triangular constructions know it by shape).
    pub(crate) fn with_known_gram_det(mat: IntegerMatrix, gram_det: BigInt) -> Self {
        // Recomputing the determinant is cubic; only cross-check where cheap.
        debug_assert!(mat.rows() > 8 || gram_det == mat.gram().determinant());
        Self::from_parts(mat, gram_det)
    }

    fn from_parts(mat: IntegerMatrix, gram_det: BigInt) -> Self {
        let n = mat.rows();
        let sum: BigInt = mat.iter_rows().map(norm_sq).sum();
        let sigma_sq = BigRational::new(sum, BigInt::from(n));
        Self {
            mat,
            gram_det,
            sigma_sq,
        }
    }

    pub fn matrix(&self) -> &IntegerMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> IntegerMatrix {
        self.mat
    }

    pub fn rank(&self) -> usize {
        self.mat.rows()
    }

    pub fn ambient_dim(&self) -> usize {
        self.mat.cols()
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        self.mat.row(i)
    }

    /// Exact squared size sigma^2.
    pub fn sigma_sq(&self) -> &BigRational {
        &self.sigma_sq
    }

    /// sigma as a double-precision convenience value.
    pub fn sigma(&self) -> f64 {
        ratio_to_f64(&self.sigma_sq).sqrt()
    }

    pub fn log2_sigma(&self) -> f64 {
        crate::arith::log2_ratio(&self.sigma_sq) / 2.0
    }

    /// Exact squared volume (the Gram determinant).
    pub fn gram_det(&self) -> &BigInt {
        &self.gram_det
    }

    pub fn volume(&self) -> f64 {
        self.gram_det
            .to_f64()
            .map(f64::sqrt)
            .unwrap_or(f64::INFINITY)
    }

    pub fn log2_volume(&self) -> f64 {
        log2_bigint(&self.gram_det) / 2.0
    }

    /// Squared norms of the rows, in row order.
    pub fn row_norms_sq(&self) -> Vec<BigInt> {
        self.mat.iter_rows().map(norm_sq).collect()
    }

    /// Hadamard: Vol^2 <= prod ||v||^2 <= (sigma^2)^n.
    pub fn hadamard_holds(&self) -> bool {
        let prod: BigInt = self.row_norms_sq().iter().product();
        let n = self.rank() as i32;
        let sig_pow = num_traits::pow::Pow::pow(self.sigma_sq.clone(), n);
        self.gram_det <= prod && BigRational::from_integer(prod) <= sig_pow
    }

    /// Is every row of `other` an integer combination of rows of `self`?
    pub fn contains_lattice(&self, other: &LatticeBasis) -> bool {
        if self.ambient_dim() != other.ambient_dim() {
            return false;
        }
        match solve_left_rational(&self.mat, &other.mat) {
            Some(x) => x.is_integral(),
            None => false,
        }
    }

    pub fn contains_vector(&self, v: &[BigInt]) -> bool {
        let other = IntegerMatrix::from_rows(vec![v.to_vec()]);
        match solve_left_rational(&self.mat, &other) {
            Some(x) => x.is_integral(),
            None => false,
        }
    }

    /// Same lattice: equal Gram determinants plus mutual integral
    /// expressibility (bases differ by a unimodular transform).
    pub fn same_lattice(&self, other: &LatticeBasis) -> bool {
        self.rank() == other.rank()
            && self.gram_det == *other.gram_det()
            && self.contains_lattice(other)
            && other.contains_lattice(self)
    }
}

/// Volume of a valid basis as (vol, exact squared volume).
///
/// Named separately from the cached accessor so the Hadamard check runs.
pub fn lattice_volume(basis: &LatticeBasis) -> Result<(f64, BigInt), LatticeError> {
    if !basis.gram_det().is_positive() {
        return Err(LatticeError::SingularBasis);
    }
    debug_assert!(basis.hadamard_holds());
    Ok((basis.volume(), basis.gram_det().clone()))
}

/// sigma(B) as (value, exact squared value).
pub fn sigma_size(basis: &LatticeBasis) -> (f64, BigRational) {
    (basis.sigma(), basis.sigma_sq().clone())
}

/// Successive minima with exact squared values, from the enumeration oracle.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MinimaProfile {
    exact_sq: Vec<BigInt>,
}

impl MinimaProfile {
    pub fn rank(&self) -> usize {
        self.exact_sq.len()
    }

    /// Exact squared minima, nondecreasing.
    pub fn exact_sq(&self) -> &[BigInt] {
        &self.exact_sq
    }

    pub fn values(&self) -> Vec<f64> {
        self.exact_sq
            .iter()
            .map(|x| x.to_f64().unwrap_or(f64::INFINITY).sqrt())
            .collect()
    }

    /// Minkowski's product bound with gamma_n replaced by the upper bound
    /// (2/3)n for n >= 2 (gamma_1 = 1): for every k,
    /// (prod_{i<=k} lambda_i)^2 <= ((2/3) n)^k * (Vol^2)^(k/n).
    pub fn minkowski_holds(&self, gram_det: &BigInt) -> bool {
        let n = self.exact_sq.len() as u32;
        let mut prod_sq = BigInt::one();
        for (k, lam_sq) in self.exact_sq.iter().enumerate() {
            let k = (k + 1) as u32;
            prod_sq *= lam_sq;
            // Compare (prod)^n <= gamma^(k n) * det^k with gamma = 2n/3:
            // (3^(k n)) * prod^n <= (2n)^(k n) * 3^? ... keep it exact:
            // lhs = (prod_sq)^n * 3^(k*n), rhs = (2n)^(k*n) * (det)^k  (n>=2)
            let lhs = num_traits::pow::pow(prod_sq.clone(), n as usize)
                * num_traits::pow::pow(BigInt::from(3), (k * n) as usize);
            let gamma_num = if n >= 2 {
                BigInt::from(2 * n)
            } else {
                BigInt::from(3)
            };
            let rhs = num_traits::pow::pow(gamma_num, (k * n) as usize)
                * num_traits::pow::pow(gram_det.clone(), k as usize);
            if lhs > rhs {
                return false;
            }
        }
        true
    }
}

const DEFAULT_ENUM_BUDGET: u128 = 10_000_000;

/// Exact successive minima by exhaustive enumeration of integer coefficient
/// vectors, for rank <= 5 and a bounded coefficient box.
///
/// Coefficient bounds come from the inverse Gram diagonal, so skewed bases
/// enumerate correctly. Fails loudly when the radius cannot certify all
/// minima or the box exceeds the budget.
pub fn successive_minima_bruteforce(
    basis: &LatticeBasis,
    radius_sq: &BigRational,
) -> Result<MinimaProfile, OracleError> {
    successive_minima_with_budget(basis, radius_sq, DEFAULT_ENUM_BUDGET)
}

pub fn successive_minima_with_budget(
    basis: &LatticeBasis,
    radius_sq: &BigRational,
    budget: u128,
) -> Result<MinimaProfile, OracleError> {
    let n = basis.rank();
    assert!(n <= 5, "oracle is for rank <= 5");
    assert!(radius_sq.is_positive());

    // |x_i| <= sqrt(radius_sq * (G^-1)_ii): the i-th coefficient of a vector v
    // equals <v, dual_i> with ||dual_i||^2 = (G^-1)_ii.
    let gram = basis.matrix().gram();
    let gram_inv = gram
        .to_rational()
        .inverse()
        .expect("valid basis has invertible Gram matrix");
    let mut bounds = Vec::with_capacity(n);
    let mut points: u128 = 1;
    for i in 0..n {
        let b = floor_sqrt_ratio(&(radius_sq * &gram_inv[(i, i)]));
        let b = b.to_i64().unwrap_or(i64::MAX) as u128;
        points = points.saturating_mul(2 * b + 1);
        if points > budget {
            return Err(OracleError::EnumerationBudgetExceeded { points, budget });
        }
        bounds.push(b as i64);
    }

    // Enumerate the whole box, keep nonzero vectors within the radius.
    let mut hits: Vec<(BigInt, Vec<BigInt>, Vec<BigInt>)> = Vec::new();
    let mut coeff = vec![0i64; n];
    let m = basis.ambient_dim();
    loop {
        let coeff_big: Vec<BigInt> = coeff.iter().map(|&c| BigInt::from(c)).collect();
        if coeff.iter().any(|&c| c != 0) {
            let mut v = vec![BigInt::zero(); m];
            for (i, c) in coeff_big.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                for (vj, bj) in v.iter_mut().zip(basis.row(i)) {
                    *vj += c * bj;
                }
            }
            let nsq = norm_sq(&v);
            if BigRational::from_integer(nsq.clone()) <= *radius_sq {
                hits.push((nsq, v, coeff_big));
            }
        }
        // Odometer step.
        let mut i = 0;
        loop {
            if i == n {
                // Done enumerating: select minima greedily.
                return select_minima(basis, hits, radius_sq);
            }
            if coeff[i] < bounds[i] {
                coeff[i] += 1;
                break;
            }
            coeff[i] = -bounds[i];
            i += 1;
        }
    }
}

fn select_minima(
    basis: &LatticeBasis,
    mut hits: Vec<(BigInt, Vec<BigInt>, Vec<BigInt>)>,
    _radius_sq: &BigRational,
) -> Result<MinimaProfile, OracleError> {
    let n = basis.rank();
    // Sort by (norm, vector lex) for determinism, then pick greedily vectors
    // that are linearly independent over Q. Independence is tracked on the
    // coefficient vectors, which is equivalent since the basis has full rank.
    hits.sort_unstable_by(|a, b| (&a.0, &a.1).cmp(&(&b.0, &b.1)));
    let mut chosen_coeffs: Vec<Vec<BigInt>> = Vec::new();
    let mut minima = Vec::new();
    for (nsq, _v, coeffs) in hits {
        if chosen_coeffs.len() == n {
            break;
        }
        let mut candidate = chosen_coeffs.clone();
        candidate.push(coeffs);
        let rank_mat = IntegerMatrix::from_rows(candidate.clone());
        if rank_mat.rank() == candidate.len() {
            chosen_coeffs = candidate;
            minima.push(nsq);
        }
    }
    if minima.len() < n {
        return Err(OracleError::RadiusTooSmall {
            needed: n,
            found: minima.len(),
        });
    }
    Ok(MinimaProfile { exact_sq: minima })
}

/// Convenience: grow the radius geometrically until all minima certify.
pub fn successive_minima_auto(
    basis: &LatticeBasis,
    budget: u128,
) -> Result<MinimaProfile, OracleError> {
    // Start at sigma^2: the largest basis vector always bounds lambda_n...
    // not exactly, but sigma^2 * n does; grow until certified.
    let mut radius_sq = basis.sigma_sq().clone() * BigInt::from(basis.rank());
    for _ in 0..12 {
        match successive_minima_with_budget(basis, &radius_sq, budget) {
            Ok(p) => return Ok(p),
            Err(OracleError::RadiusTooSmall { .. }) => {
                radius_sq *= BigInt::from(4);
            }
            Err(e) => return Err(e),
        }
    }
    successive_minima_with_budget(basis, &radius_sq, budget)
}

/// Inner product convenience for tests and solvers.
pub fn inner(a: &[BigInt], b: &[BigInt]) -> BigInt {
    dot(a, b)
}
