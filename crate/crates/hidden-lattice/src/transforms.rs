//! Modular lattice constructions and complement/completion subroutines:
//! the N-orthogonal lattice, the N-congruence lattice, dual bases,
//! orthogonal complements, completions, and local p-completions.

use num_bigint::BigInt;
use num_integer::Integer;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::arith::ceil_sqrt;
use crate::lattice::{LatticeBasis, LatticeError};
use crate::lll::{lll_reduce, LllError, ReductionParams};
use crate::matrix::{
    dot, invert_mod, kernel_mod_p, left_kernel_with_rank, norm_sq, IntegerMatrix, LinAlgError,
    RationalMatrix,
};

#[derive(Debug, Error)]
pub enum TransformError {
    /// No column permutation makes the trailing r x r block of M invertible
    /// modulo N; the input is degenerate mod N.
    #[error("no invertible r x r column minor modulo {modulus}")]
    NoInvertibleMinor { modulus: BigInt },
    #[error("singular basis")]
    SingularBasis,
    #[error("modulus {0} is not prime")]
    CompositeModulus(BigInt),
    #[error("dimension mismatch: {context}")]
    DimensionMismatch { context: String },
    #[error(transparent)]
    LinAlg(#[from] LinAlgError),
    #[error(transparent)]
    Lll(#[from] LllError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

/// The N-orthogonal and N-congruence lattices of a source lattice, with the
/// exact volume identity Vol(orth) * Vol(cong) = N^m.
#[derive(Clone, Debug)]
pub struct ModularLatticePair {
    pub orth: LatticeBasis,
    pub cong: LatticeBasis,
    pub modulus: BigInt,
    pub source_rank: usize,
}

pub fn modular_pair(m: &LatticeBasis, n: &BigInt) -> Result<ModularLatticePair, TransformError> {
    let orth = ortho_mod_basis(m, n)?;
    let cong = cong_mod_basis(m, n)?;
    debug_assert_eq!(
        orth.gram_det() * cong.gram_det(),
        num_traits::pow::pow(n.clone(), 2 * m.ambient_dim())
    );
    Ok(ModularLatticePair {
        orth,
        cong,
        modulus: n.clone(),
        source_rank: m.rank(),
    })
}

/// Greedy column pivoting: returns (pivot_cols, inverse of the pivot minor
/// mod n) such that the r x r minor on pivot_cols is invertible mod n.
fn pivot_minor_mod(
    m: &IntegerMatrix,
    n: &BigInt,
) -> Result<(Vec<usize>, IntegerMatrix), TransformError> {
    let r = m.rows();
    let cols = m.cols();
    let mut w = m.reduce_mod(n);
    let mut pivot_cols: Vec<usize> = Vec::with_capacity(r);
    for row in 0..r {
        let mut found = None;
        for c in 0..cols {
            if pivot_cols.contains(&c) {
                continue;
            }
            if w[(row, c)].gcd(n).is_one() {
                found = Some(c);
                break;
            }
        }
        let Some(c) = found else {
            return Err(TransformError::NoInvertibleMinor { modulus: n.clone() });
        };
        // Eliminate this column from the other rows so later pivot tests see
        // entries already cleared against the chosen minors.
        let inv = crate::matrix::mod_inverse(&w[(row, c)], n).expect("gcd checked");
        for j in 0..cols {
            w[(row, j)] = (&w[(row, j)] * &inv).mod_floor(n);
        }
        for i in 0..r {
            if i == row || w[(i, c)].is_zero() {
                continue;
            }
            let f = w[(i, c)].clone();
            for j in 0..cols {
                let t = (&w[(i, j)] - &f * &w[(row, j)]).mod_floor(n);
                w[(i, j)] = t;
            }
        }
        pivot_cols.push(c);
    }
    let mut sorted = pivot_cols;
    sorted.sort_unstable();
    let minor = IntegerMatrix::new(
        r,
        r,
        (0..r)
            .flat_map(|i| sorted.iter().map(move |&c| m[(i, c)].clone()))
            .collect(),
    );
    let minor_inv = invert_mod(&minor, n)?;
    Ok((sorted, minor_inv))
}

struct BlockConstruction {
    /// Column order: non-pivot columns ascending, then pivot columns.
    col_order: Vec<usize>,
    /// -M2^{-1} M1 mod n, shape r x (m-r).
    neg_m2inv_m1: IntegerMatrix,
}

fn block_construction(m: &LatticeBasis, n: &BigInt) -> Result<BlockConstruction, TransformError> {
    if n < &BigInt::from(2) {
        return Err(TransformError::DimensionMismatch {
            context: format!("modulus must be >= 2, got {n}"),
        });
    }
    let (pivot_cols, minor_inv) = pivot_minor_mod(m.matrix(), n)?;
    let r = m.rank();
    let cols = m.ambient_dim();
    let nonpivot: Vec<usize> = (0..cols).filter(|c| !pivot_cols.contains(c)).collect();
    let m1 = IntegerMatrix::new(
        r,
        cols - r,
        (0..r)
            .flat_map(|i| nonpivot.iter().map(move |&c| m.matrix()[(i, c)].clone()))
            .collect(),
    );
    let neg_m2inv_m1 = minor_inv.mul(&m1).map(|x| (-x).mod_floor(n));
    let mut col_order = nonpivot;
    col_order.extend_from_slice(&pivot_cols);
    Ok(BlockConstruction {
        col_order,
        neg_m2inv_m1,
    })
}

/// Basis of the N-orthogonal lattice M^{perp_N} = { u : M u^T = 0 mod N }.
///
/// Block shape [[1, Mtilde], [0, N*1]] with Mtilde = (-M2^{-1} M1)^T, built
/// after a greedy column permutation and mapped back to the original column
/// order. Volume is exactly N^r.
pub fn ortho_mod_basis(m: &LatticeBasis, n: &BigInt) -> Result<LatticeBasis, TransformError> {
    let r = m.rank();
    let dim = m.ambient_dim();
    if r == dim {
        // Full-rank source invertible mod N: orthogonality forces u = 0 mod N.
        pivot_minor_mod(m.matrix(), n)?;
        let mat = IntegerMatrix::identity(dim).map(|x| x * n);
        let gram_det = num_traits::pow::pow(n.clone(), 2 * dim);
        return Ok(LatticeBasis::with_known_gram_det(mat, gram_det));
    }
    let bc = block_construction(m, n)?;
    let mut mat = IntegerMatrix::zero(dim, dim);
    for i in 0..dim - r {
        mat[(i, bc.col_order[i])] = BigInt::one();
        for j in 0..r {
            // Mtilde[i][j] = (-M2^{-1} M1)[j][i]
            mat[(i, bc.col_order[dim - r + j])] = bc.neg_m2inv_m1[(j, i)].clone();
        }
    }
    for j in 0..r {
        mat[(dim - r + j, bc.col_order[dim - r + j])] = n.clone();
    }
    let gram_det = num_traits::pow::pow(n.clone(), 2 * r);
    let basis = LatticeBasis::with_known_gram_det(mat, gram_det);
    debug_assert!(basis.matrix().iter_rows().all(|u| m
        .matrix()
        .iter_rows()
        .all(|w| dot(u, w).mod_floor(n).is_zero())));
    Ok(basis)
}

/// Basis of the N-congruence lattice M_N = M + N Z^m, as N * (B^T)^{-1} of
/// the orthogonal basis, cleared to integers. Volume is exactly N^{m-r}.
pub fn cong_mod_basis(m: &LatticeBasis, n: &BigInt) -> Result<LatticeBasis, TransformError> {
    let r = m.rank();
    let dim = m.ambient_dim();
    if r == dim {
        // The rows generate (Z/NZ)^m, so adding N Z^m fills out Z^m.
        pivot_minor_mod(m.matrix(), n)?;
        return Ok(LatticeBasis::with_known_gram_det(
            IntegerMatrix::identity(dim),
            BigInt::one(),
        ));
    }
    let bc = block_construction(m, n)?;
    let mut mat = IntegerMatrix::zero(dim, dim);
    for i in 0..dim - r {
        mat[(i, bc.col_order[i])] = n.clone();
    }
    for j in 0..r {
        for i in 0..dim - r {
            // -Mtilde^T = M2^{-1} M1, reduced into [0, N)
            mat[(dim - r + j, bc.col_order[i])] = (-&bc.neg_m2inv_m1[(j, i)]).mod_floor(n);
        }
        mat[(dim - r + j, bc.col_order[dim - r + j])] = BigInt::one();
    }
    let gram_det = num_traits::pow::pow(n.clone(), 2 * (dim - r));
    Ok(LatticeBasis::with_known_gram_det(mat, gram_det))
}

/// Exact dual basis (B^T)^{-1} of a full-rank square basis.
pub fn dual_basis(b: &LatticeBasis) -> Result<RationalMatrix, TransformError> {
    if b.rank() != b.ambient_dim() {
        return Err(TransformError::DimensionMismatch {
            context: "dual basis needs a square full-rank basis".into(),
        });
    }
    b.matrix()
        .transpose()
        .to_rational()
        .inverse()
        .map_err(|_| TransformError::SingularBasis)
}

/// Basis of the exact orthogonal complement { v in Z^m : <v, b_i> = 0 }.
///
/// The kernel is taken from the unimodular transform of an integer
/// elimination (hence saturated), then LLL-reduced, so the output is a
/// reduced basis exactly as the embedding construction would produce.
pub fn orthogonal_complement(
    b: &LatticeBasis,
    params: &ReductionParams,
) -> Result<LatticeBasis, TransformError> {
    let k = b.rank();
    let m = b.ambient_dim();
    assert!(k < m, "complement of a full-rank lattice is trivial");
    let (kernel, rank) = left_kernel_with_rank(&b.matrix().transpose());
    if rank < k {
        return Err(TransformError::SingularBasis);
    }
    debug_assert_eq!(kernel.rows(), m - k);
    let kernel_basis = LatticeBasis::new(kernel)?;
    let (reduced, _) = lll_reduce(&kernel_basis, params)?;
    Ok(reduced)
}

/// Orthogonal complement through the scaled-embedding construction: LLL on
/// [K * B^T | 1_m] and projection of the first m-k rows onto the last m
/// coordinates, with K = 2^ceil(l) * prod ceil||b_i|| for
/// l = (m-1)/2 + k(k-1)/4. `k_multiplier` (>= 1) scales K for tuning.
pub fn orthogonal_complement_embedding(
    b: &LatticeBasis,
    params: &ReductionParams,
    k_multiplier: &BigInt,
) -> Result<LatticeBasis, TransformError> {
    assert!(k_multiplier >= &BigInt::one());
    let k = b.rank();
    let m = b.ambient_dim();
    assert!(k < m);
    // ceil((m-1)/2 + k(k-1)/4) = ceil((2(m-1) + k(k-1)) / 4)
    let l_num = 2 * (m - 1) + k * (k - 1);
    let l_ceil = l_num.div_ceil(4);
    let norm_prod: BigInt = b
        .matrix()
        .iter_rows()
        .map(|row| ceil_sqrt(&norm_sq(row)))
        .product();
    let mut big_k: BigInt = (BigInt::one() << l_ceil) * norm_prod * k_multiplier;

    for _attempt in 0..4 {
        let bt = b.matrix().transpose(); // m x k
        let mut mat = IntegerMatrix::zero(m, k + m);
        for i in 0..m {
            for j in 0..k {
                mat[(i, j)] = &big_k * &bt[(i, j)];
            }
            mat[(i, k + i)] = BigInt::one();
        }
        let emb = LatticeBasis::new(mat)?;
        let (reduced, _) = lll_reduce(&emb, params)?;
        let head_zero = (0..m - k).all(|i| (0..k).all(|j| reduced.matrix()[(i, j)].is_zero()));
        if !head_zero {
            big_k <<= 8;
            continue;
        }
        let rows: Vec<Vec<BigInt>> = (0..m - k)
            .map(|i| reduced.matrix().row(i)[k..].to_vec())
            .collect();
        let out = LatticeBasis::new(IntegerMatrix::from_rows(rows))?;
        debug_assert!(out
            .matrix()
            .iter_rows()
            .all(|v| b.matrix().iter_rows().all(|w| dot(v, w).is_zero())));
        return Ok(out);
    }
    Err(TransformError::DimensionMismatch {
        context: "embedding constant never grew large enough".into(),
    })
}

/// Completion: basis of the smallest lattice containing b with torsion-free
/// quotient, via the double orthogonal complement. Idempotent.
pub fn completion(
    b: &LatticeBasis,
    params: &ReductionParams,
) -> Result<LatticeBasis, TransformError> {
    if b.rank() == b.ambient_dim() {
        // The Q-span is everything, so the completion is Z^m.
        return Ok(LatticeBasis::with_known_gram_det(
            IntegerMatrix::identity(b.ambient_dim()),
            BigInt::one(),
        ));
    }
    let perp = orthogonal_complement(b, params)?;
    orthogonal_complement(&perp, params)
}

/// p-completion: basis of { v : p^k v in Lambda for some k }, by repeatedly
/// lifting kernel vectors mod p. The output spans the same Q-space, has
/// trivial kernel mod p, and its index ratio against the input is a power
/// of p. Rows are not re-reduced here.
pub fn p_completion(b: &LatticeBasis, p: &BigInt) -> Result<LatticeBasis, TransformError> {
    if !crate::arith::is_probable_prime(p) {
        return Err(TransformError::CompositeModulus(p.clone()));
    }
    let mut rows = b.matrix().clone().into_row_vecs();
    let mut gram_det = b.gram_det().clone();
    let p_sq = p * p;
    // Each round divides the covolume by p; the Gram determinant bounds the
    // number of rounds.
    let max_rounds = gram_det.bits() + 1;
    for _ in 0..max_rounds {
        let mat = IntegerMatrix::from_rows(rows.clone());
        let kernel = kernel_mod_p(&mat, p).map_err(|e| match e {
            LinAlgError::CompositeModulus(q) => TransformError::CompositeModulus(q),
            other => TransformError::LinAlg(other),
        })?;
        let Some(alpha_bar) = kernel.first() else {
            break;
        };
        // Leading coefficient of the echelon row is 1; lift all entries into
        // [-p/2, p/2) so the pivot coefficient stays a unit.
        let pivot = alpha_bar
            .iter()
            .position(|x| !x.is_zero())
            .expect("kernel vector is nonzero");
        let alpha: Vec<BigInt> = alpha_bar
            .iter()
            .map(|e| if e * 2 >= *p { e - p } else { e.clone() })
            .collect();
        let mut x = vec![BigInt::zero(); mat.cols()];
        for (c, row) in alpha.iter().zip(&rows) {
            if c.is_zero() {
                continue;
            }
            for (xj, rj) in x.iter_mut().zip(row) {
                *xj += c * rj;
            }
        }
        for xj in &mut x {
            debug_assert!((&*xj % p).is_zero());
            *xj = &*xj / p;
        }
        rows[pivot] = x;
        debug_assert!((&gram_det % &p_sq).is_zero());
        gram_det = &gram_det / &p_sq;
    }
    Ok(LatticeBasis::with_known_gram_det(
        IntegerMatrix::from_rows(rows),
        gram_det,
    ))
}

/// Complete locally at each prime of the supplied factorization. Valid when
/// the index of the input in its completion is composed of those primes.
pub fn completion_at_primes(
    b: &LatticeBasis,
    primes: &[BigInt],
) -> Result<LatticeBasis, TransformError> {
    let mut out = b.clone();
    let mut seen: Vec<BigInt> = Vec::new();
    for p in primes {
        if seen.contains(p) {
            continue;
        }
        seen.push(p.clone());
        out = p_completion(&out, p)?;
    }
    Ok(out)
}

/// The pairing u -> (<u, v_1>, ..., <u, v_n>) against the rows of b.
/// Zero exactly on the orthogonal complement of the row span.
pub fn phi_b(u: &[BigInt], b: &LatticeBasis) -> Result<Vec<BigInt>, TransformError> {
    if u.len() != b.ambient_dim() {
        return Err(TransformError::DimensionMismatch {
            context: format!(
                "vector length {} vs ambient dimension {}",
                u.len(),
                b.ambient_dim()
            ),
        });
    }
    Ok(b.matrix().iter_rows().map(|v| dot(u, v)).collect())
}

/// Membership in M + N Z^m for a whole basis, via a triangular span basis.
pub fn all_rows_in_mod_span(rows: &IntegerMatrix, m: &IntegerMatrix, n: &BigInt) -> bool {
    let h = crate::matrix::triangular_span_mod(m, n);
    rows.iter_rows()
        .all(|r| crate::matrix::triangular_contains(&h, r))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;
    use num_traits::Pow;

    fn bi(x: i64) -> BigInt {
        BigInt::from(x)
    }

    fn basis(rows: &[&[i64]]) -> LatticeBasis {
        LatticeBasis::new(IntegerMatrix::from_i64_rows(rows)).unwrap()
    }

    fn params() -> ReductionParams {
        ReductionParams::default()
    }

    #[test]
    fn ortho_basis_small_examples() {
        // M = [[1,1]], N = 5: both rows orthogonal to (1,1) mod 5, |det| = 5.
        let m = basis(&[&[1, 1]]);
        let orth = ortho_mod_basis(&m, &bi(5)).unwrap();
        assert_eq!(*orth.gram_det(), bi(25));
        for u in orth.matrix().iter_rows() {
            assert!(dot(u, &[bi(1), bi(1)]).mod_floor(&bi(5)).is_zero());
        }

        // M = [[1,0]], N = 3.
        let m = basis(&[&[1, 0]]);
        let orth = ortho_mod_basis(&m, &bi(3)).unwrap();
        assert_eq!(*orth.gram_det(), bi(9));
        let expect = basis(&[&[0, 1], &[3, 0]]);
        assert!(orth.same_lattice(&expect));

        // M = [[2,1,1]], N = 7: rank 3, orthogonality and volume.
        let m = basis(&[&[2, 1, 1]]);
        let orth = ortho_mod_basis(&m, &bi(7)).unwrap();
        assert_eq!(orth.rank(), 3);
        assert_eq!(*orth.gram_det(), bi(49));
        for u in orth.matrix().iter_rows() {
            assert!(dot(u, &[bi(2), bi(1), bi(1)]).mod_floor(&bi(7)).is_zero());
        }
    }

    #[test]
    fn cong_basis_small_examples() {
        // M = [[1,1]], N = 5: every row congruent to a multiple of (1,1).
        let m = basis(&[&[1, 1]]);
        let cong = cong_mod_basis(&m, &bi(5)).unwrap();
        assert_eq!(*cong.gram_det(), bi(25));
        assert!(all_rows_in_mod_span(cong.matrix(), m.matrix(), &bi(5)));
        let expect = basis(&[&[5, 0], &[1, 1]]);
        assert!(cong.same_lattice(&expect));

        let m = basis(&[&[1, 0]]);
        let cong = cong_mod_basis(&m, &bi(3)).unwrap();
        let expect = basis(&[&[1, 0], &[0, 3]]);
        assert!(cong.same_lattice(&expect));
    }

    #[test]
    fn volume_product_identity() {
        for (rows, n) in [
            (vec![vec![1i64, 1]], 5i64),
            (vec![vec![2, 1, 1]], 7),
            (vec![vec![3, 1, 4, 1], vec![5, 9, 2, 6]], 11),
        ] {
            let rows: Vec<&[i64]> = rows.iter().map(|r| r.as_slice()).collect();
            let m = basis(&rows);
            let pair = modular_pair(&m, &bi(n)).unwrap();
            let dim = m.ambient_dim();
            assert_eq!(
                pair.orth.gram_det() * pair.cong.gram_det(),
                bi(n).pow(2 * dim as u32)
            );
        }
    }

    #[test]
    fn cong_is_scaled_dual_of_orth() {
        let m = basis(&[&[1, 1]]);
        let n = bi(5);
        let orth = ortho_mod_basis(&m, &n).unwrap();
        let cong = cong_mod_basis(&m, &n).unwrap();
        let dual = dual_basis(&orth).unwrap();
        let scaled = dual.scale_to_integer(&n).unwrap();
        let scaled = LatticeBasis::new(scaled).unwrap();
        assert!(scaled.same_lattice(&cong));
    }

    #[test]
    fn dual_examples() {
        let b = basis(&[&[2, 0], &[0, 4]]);
        let dual = dual_basis(&b).unwrap();
        assert_eq!(dual[(0, 0)], BigRational::new(bi(1), bi(2)));
        assert_eq!(dual[(1, 1)], BigRational::new(bi(1), bi(4)));
        assert_eq!(
            dual_basis(&basis(&[&[1, 0], &[0, 1]])).unwrap(),
            RationalMatrix::identity(2)
        );
    }

    #[test]
    fn complement_examples() {
        let b = basis(&[&[1, 0, 0]]);
        let oc = orthogonal_complement(&b, &params()).unwrap();
        assert!(oc.same_lattice(&basis(&[&[0, 1, 0], &[0, 0, 1]])));

        // Vol(complement)^2 = 14 via Vol(perp) = Vol(completion).
        let b = basis(&[&[1, 2, 3]]);
        let oc = orthogonal_complement(&b, &params()).unwrap();
        assert_eq!(oc.rank(), 2);
        assert_eq!(*oc.gram_det(), bi(14));

        let b = basis(&[&[2, 4]]);
        let oc = orthogonal_complement(&b, &params()).unwrap();
        assert_eq!(oc.rank(), 1);
        let row = oc.row(0);
        assert!(row == [bi(2), bi(-1)] || row == [bi(-2), bi(1)]);
    }

    #[test]
    fn complement_matches_embedding_route() {
        for rows in [
            vec![vec![1i64, 2, 3]],
            vec![vec![2, 4, 6, 1], vec![0, 3, 1, 5]],
            vec![vec![7, 1], vec![0, 0, 0, 0]][..1].to_vec(),
        ] {
            let rows: Vec<&[i64]> = rows.iter().map(|r| r.as_slice()).collect();
            let b = basis(&rows);
            let a = orthogonal_complement(&b, &params()).unwrap();
            let e = orthogonal_complement_embedding(&b, &params(), &BigInt::one()).unwrap();
            assert!(a.same_lattice(&e));
        }
    }

    #[test]
    fn completion_examples() {
        let b = basis(&[&[2, 0], &[0, 2]]);
        let c = completion(&b, &params()).unwrap();
        assert_eq!(*c.gram_det(), bi(1));

        let b = basis(&[&[2, 4]]);
        let c = completion(&b, &params()).unwrap();
        assert!(c.same_lattice(&basis(&[&[1, 2]])));

        // Idempotence on an already complete lattice.
        let b = basis(&[&[1, 0, 1], &[0, 1, 0]]);
        let c = completion(&b, &params()).unwrap();
        assert!(c.same_lattice(&b));
        let cc = completion(&c, &params()).unwrap();
        assert!(cc.same_lattice(&c));
    }

    #[test]
    fn completion_never_increases_volume() {
        for rows in [
            vec![vec![2i64, 4, 2], vec![1, 0, 3]],
            vec![vec![6, 3], vec![2, 8]],
        ] {
            let rows: Vec<&[i64]> = rows.iter().map(|r| r.as_slice()).collect();
            let b = basis(&rows);
            let c = completion(&b, &params()).unwrap();
            assert!(c.gram_det() <= b.gram_det());
            assert!(c.contains_lattice(&b));
        }
    }

    #[test]
    fn p_completion_examples() {
        let b = basis(&[&[2, 4]]);
        let c = p_completion(&b, &bi(2)).unwrap();
        assert!(c.same_lattice(&basis(&[&[1, 2]])));

        let b = basis(&[&[3, 0], &[0, 1]]);
        let c = p_completion(&b, &bi(2)).unwrap();
        assert!(c.same_lattice(&b));

        // Index 2 case: agrees with the double-orthogonal completion.
        let b = basis(&[&[2, 0], &[1, 1]]);
        let c = p_completion(&b, &bi(2)).unwrap();
        assert!(kernel_mod_p(c.matrix(), &bi(2)).unwrap().is_empty());
        let full = completion(&b, &params()).unwrap();
        assert!(c.same_lattice(&full));
        // Index ratio is a power of 2.
        let ratio = b.gram_det() / c.gram_det();
        assert_eq!(ratio, bi(4));
    }

    #[test]
    fn p_completion_rejects_composite() {
        let b = basis(&[&[2, 4]]);
        assert!(matches!(
            p_completion(&b, &bi(6)),
            Err(TransformError::CompositeModulus(_))
        ));
    }

    #[test]
    fn phi_examples() {
        let b = basis(&[&[1, 0, 0], &[0, 1, 0]]);
        assert_eq!(
            phi_b(&[bi(0), bi(0), bi(1)], &b).unwrap(),
            vec![bi(0), bi(0)]
        );
        assert_eq!(
            phi_b(&[bi(1), bi(2), bi(3)], &b).unwrap(),
            vec![bi(1), bi(2)]
        );
        assert!(matches!(
            phi_b(&[bi(1)], &b),
            Err(TransformError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn phi_cauchy_schwarz() {
        // ||Phi(u)||^2 <= ||u||^2 * n * sigma^2, exact.
        let b = basis(&[&[3, 1, 4], &[1, 5, 9]]);
        for u in [[2i64, 7, 1], [0, -3, 8], [5, 5, 5]] {
            let u: Vec<BigInt> = u.iter().map(|&x| bi(x)).collect();
            let img = phi_b(&u, &b).unwrap();
            let lhs = BigRational::from_integer(norm_sq(&img));
            let rhs = BigRational::from_integer(norm_sq(&u))
                * BigRational::from_integer(bi(b.rank() as i64))
                * b.sigma_sq();
            assert!(lhs <= rhs);
        }
    }

    #[test]
    fn double_complement_is_completion() {
        let b = basis(&[&[2, 4, 0], &[0, 0, 3]]);
        let oc2 = completion(&b, &params()).unwrap();
        assert!(oc2.contains_lattice(&b));
        assert_eq!(*oc2.gram_det(), {
            let perp = orthogonal_complement(&b, &params()).unwrap();
            perp.gram_det().clone()
        });
    }
}
