//! Solvers for the hidden lattice problem and its variants.
//!
//! Two routes recover the completion of the hidden lattice L from a basis of
//! M with M inside L mod N: reduce the N-orthogonal lattice and take the
//! orthogonal complement of its short span (the orthogonal route), or reduce
//! the N-congruence lattice and complete its short span (the congruence
//! route). The noisy variant embeds unit coordinates and splits off the
//! noise with an integer left kernel; the decisional variant reads the rank
//! off the norm jump in a reduced modular basis.

use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::log2_bigint;
use crate::lattice::{LatticeBasis, LatticeError};
use crate::lll::{lll_reduce, LllError, ReductionParams, ReductionStats};
use crate::matrix::{left_integer_kernel, IntegerMatrix, LinAlgError};
use crate::transforms::{
    all_rows_in_mod_span, completion, completion_at_primes, cong_mod_basis, ortho_mod_basis,
    TransformError,
};

#[derive(Debug, Error)]
pub enum SolveError {
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
    #[error("rank mismatch: expected the recovered lattice to have rank {expected}, got {found}")]
    RankMismatch { expected: usize, found: usize },
    #[error("left kernel rank {found} != noise rank split {expected}; embedded problem unsolved")]
    KernelRankMismatch { expected: usize, found: usize },
    #[error("modulus-local completion requested but no factorization is available")]
    CompletionModeUnavailable,
    #[error(transparent)]
    Transform(#[from] TransformError),
    #[error(transparent)]
    Lll(#[from] LllError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    LinAlg(#[from] LinAlgError),
}

/// Which first-step lattice the solver reduces.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Algorithm {
    /// Algorithm I: reduce the N-orthogonal lattice, return the orthogonal
    /// complement of the m-n shortest vectors.
    Orthogonal,
    /// Algorithm II: reduce the N-congruence lattice, return the completion
    /// of the n shortest vectors.
    Congruence,
}

impl std::fmt::Display for Algorithm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Algorithm::Orthogonal => write!(f, "I"),
            Algorithm::Congruence => write!(f, "II"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum CompletionMode {
    /// Modulus-local completion when a factorization is on the instance,
    /// double-orthogonal otherwise.
    #[default]
    Auto,
    DoubleOrthogonal,
    ModulusLocal,
}

/// Kind-specific planted secrets kept alongside generated instances.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub enum PlantedSecret {
    #[default]
    None,
    /// CRT-ACD carries the hidden primes (the attack target); the CRT
    /// combination coefficients live in the ordinary coeffs field.
    CrtAcd { primes: Vec<BigInt> },
}

#[derive(Clone, Debug)]
pub struct PlantedHlp {
    pub l_basis: LatticeBasis,
    /// Certified upper bound on sigma^2 of the planted basis.
    pub mu_sq: BigRational,
    pub seed: Option<u64>,
    /// Coefficients generating the public rows: M_i = coeffs_i * L mod N.
    pub coeffs: Option<IntegerMatrix>,
    pub secret: PlantedSecret,
}

#[derive(Clone, Debug)]
pub struct HlpInstance {
    pub m: usize,
    pub n: usize,
    pub r: usize,
    pub modulus: BigInt,
    pub m_basis: LatticeBasis,
    /// Prime factorization of the modulus when publicly known (e.g. a prime
    /// modulus); enables the modulus-local completion in the congruence
    /// route. Never populated for CRT-ACD instances, where the factorization
    /// is the secret.
    pub modulus_factors: Option<Vec<BigInt>>,
    pub planted: Option<PlantedHlp>,
}

impl HlpInstance {
    pub fn new(
        n: usize,
        modulus: BigInt,
        m_basis: LatticeBasis,
        modulus_factors: Option<Vec<BigInt>>,
        planted: Option<PlantedHlp>,
    ) -> Result<Self, SolveError> {
        // A negative modulus defines the same congruences.
        let modulus = modulus.abs();
        let m = m_basis.ambient_dim();
        let r = m_basis.rank();
        if modulus < BigInt::from(2) {
            return Err(SolveError::InvalidInstance(format!(
                "modulus must satisfy |N| >= 2, got {modulus}"
            )));
        }
        if !(1 <= r && r <= n && n <= m) {
            return Err(SolveError::InvalidInstance(format!(
                "need 1 <= r <= n <= m, got r={r} n={n} m={m}"
            )));
        }
        if let Some(p) = &planted {
            if p.l_basis.rank() != n || p.l_basis.ambient_dim() != m {
                return Err(SolveError::InvalidInstance(
                    "planted basis dimensions disagree with the instance".into(),
                ));
            }
            if !verify_planted_congruence(&m_basis, p, &modulus) {
                return Err(SolveError::InvalidInstance(
                    "public rows are not combinations of the planted basis mod N".into(),
                ));
            }
        }
        Ok(Self {
            m,
            n,
            r,
            modulus,
            m_basis,
            modulus_factors,
            planted,
        })
    }
}

fn verify_planted_congruence(m_basis: &LatticeBasis, p: &PlantedHlp, modulus: &BigInt) -> bool {
    use num_integer::Integer;
    if let Some(coeffs) = &p.coeffs {
        let combo = coeffs.mul(p.l_basis.matrix());
        return (0..m_basis.rank()).all(|i| {
            combo
                .row(i)
                .iter()
                .zip(m_basis.row(i))
                .all(|(a, b)| (a - b).mod_floor(modulus).is_zero())
        });
    }
    all_rows_in_mod_span(m_basis.matrix(), p.l_basis.matrix(), modulus)
}

#[derive(Clone, Debug)]
pub struct NhlpPlanted {
    pub l_basis: LatticeBasis,
    pub noise_basis: LatticeBasis,
    pub mu_sq: BigRational,
    pub rho_actual_sq: BigInt,
    pub seed: Option<u64>,
    pub coeffs: Option<IntegerMatrix>,
}

/// Noisy instance: each public row w_j equals a mod-N combination of the
/// hidden basis plus an unknown noise vector of norm at most rho.
#[derive(Clone, Debug)]
pub struct NhlpInstance {
    pub m: usize,
    pub n: usize,
    pub r: usize,
    pub modulus: BigInt,
    pub w_basis: LatticeBasis,
    pub rho: BigInt,
    pub modulus_factors: Option<Vec<BigInt>>,
    pub planted: Option<NhlpPlanted>,
}

impl NhlpInstance {
    pub fn new(
        n: usize,
        modulus: BigInt,
        w_basis: LatticeBasis,
        rho: BigInt,
        modulus_factors: Option<Vec<BigInt>>,
        planted: Option<NhlpPlanted>,
    ) -> Result<Self, SolveError> {
        let modulus = modulus.abs();
        let m = w_basis.ambient_dim();
        let r = w_basis.rank();
        if modulus < BigInt::from(2) {
            return Err(SolveError::InvalidInstance(
                "modulus must satisfy |N| >= 2".into(),
            ));
        }
        if !(1 <= r && r <= n && n <= m) {
            return Err(SolveError::InvalidInstance(format!(
                "need 1 <= r <= n <= m, got r={r} n={n} m={m}"
            )));
        }
        if let Some(p) = &planted {
            let rho_sq = &rho * &rho;
            for x in p.noise_basis.matrix().iter_rows() {
                if crate::matrix::norm_sq(x) > rho_sq {
                    return Err(SolveError::InvalidInstance(
                        "planted noise vector exceeds the norm bound".into(),
                    ));
                }
            }
            // w_j - x_j must lie in L mod N.
            let mut denoised_rows = Vec::new();
            for j in 0..r {
                let row: Vec<BigInt> = w_basis
                    .row(j)
                    .iter()
                    .zip(p.noise_basis.row(j))
                    .map(|(w, x)| w - x)
                    .collect();
                denoised_rows.push(row);
            }
            let denoised = IntegerMatrix::from_rows(denoised_rows);
            if !all_rows_in_mod_span(&denoised, p.l_basis.matrix(), &modulus) {
                return Err(SolveError::InvalidInstance(
                    "w_j - x_j does not lie in the planted lattice mod N".into(),
                ));
            }
        }
        Ok(Self {
            m,
            n,
            r,
            modulus,
            w_basis,
            rho,
            modulus_factors,
            planted,
        })
    }
}

#[derive(Clone, Debug)]
pub struct SolveReport {
    pub algorithm: Algorithm,
    pub recovered: LatticeBasis,
    /// The short span the second step expands: rank m-n on the orthogonal
    /// route, rank n on the congruence route.
    pub intermediate: LatticeBasis,
    pub sigma_out_sq: BigRational,
    pub stats: ReductionStats,
    pub step1: Duration,
    pub step2: Duration,
    /// Set when the instance carries planted truth: the recovered lattice
    /// equals the completion of the planted one (mutual membership).
    pub success: Option<bool>,
}

impl SolveReport {
    pub fn sigma_out(&self) -> f64 {
        crate::arith::ratio_to_f64(&self.sigma_out_sq).sqrt()
    }
}

fn check_success(
    recovered: &LatticeBasis,
    planted: &PlantedHlp,
    params: &ReductionParams,
) -> Result<bool, SolveError> {
    // The problem asks for the completion of the planted lattice; LLL output
    // bases differ by unimodular transforms, so compare lattices, not rows.
    let target = completion(&planted.l_basis, params)?;
    Ok(recovered.same_lattice(&target))
}

fn rows_sub_basis(basis: &LatticeBasis, count: usize) -> Result<LatticeBasis, SolveError> {
    let rows: Vec<Vec<BigInt>> = (0..count).map(|i| basis.row(i).to_vec()).collect();
    Ok(LatticeBasis::new(IntegerMatrix::from_rows(rows))?)
}

/// Polish the final output: re-reduce the norm-sorted rows a few times and
/// keep the smallest basis seen. The sort feeds rows back in a different
/// order than the reduction left them, so further swaps can fire; a stronger
/// delta here still satisfies any weaker caller contract.
fn reduce_to_fixpoint(
    basis: LatticeBasis,
    params: &ReductionParams,
) -> Result<LatticeBasis, SolveError> {
    let strong = ReductionParams {
        delta: params
            .delta
            .clone()
            .max(BigRational::new(BigInt::from(999), BigInt::from(1000))),
        ..params.clone()
    };
    let (mut best, _) = lll_reduce(&basis, &strong)?;
    let mut current = best.clone();
    for _ in 0..3 {
        let (next, _) = lll_reduce(&current, &strong)?;
        let stable = next.matrix() == current.matrix();
        if next.sigma_sq() < best.sigma_sq() {
            best = next.clone();
        }
        current = next;
        if stable {
            break;
        }
    }
    // Reduction output depends on row order; restarting from a few fixed
    // permutations of the best basis explores nearby local optima.
    let n = best.rank();
    let permutations: [Vec<usize>; 2] = [
        (0..n).rev().collect(),
        (0..n / 2)
            .flat_map(|i| [i, n - 1 - i])
            .chain(if n % 2 == 1 { Some(n / 2) } else { None })
            .collect(),
    ];
    for perm in permutations {
        let rows: Vec<Vec<BigInt>> = perm.iter().map(|&i| best.row(i).to_vec()).collect();
        let candidate = LatticeBasis::new(IntegerMatrix::from_rows(rows))?;
        let (reduced, _) = lll_reduce(&candidate, &strong)?;
        if reduced.sigma_sq() < best.sigma_sq() {
            best = reduced;
        }
    }
    if best.rank() <= 40 {
        if let Some(improved) = ternary_descent(&best) {
            let (reduced, _) = lll_reduce(&improved, &strong)?;
            if reduced.sigma_sq() < best.sigma_sq() {
                best = reduced;
            }
        }
    }
    Ok(best)
}

/// Local descent over small joint combinations: replace a target row t by
/// b_t + q1 b_j + q2 b_k (|q| <= 2) or b_t + q1 b_j + q2 b_k + q3 b_l
/// (|q| <= 1) whenever that shortens it. Sequential size reduction inside
/// the reduction only rounds one coefficient at a time; the joint search
/// finds cancellations it misses. Keeps the span exactly (target coefficient
/// stays 1). Returns None when no sweep improved anything.
fn ternary_descent(basis: &LatticeBasis) -> Option<LatticeBasis> {
    let n = basis.rank();
    if n < 3 {
        return None;
    }
    let mut rows: Vec<Vec<BigInt>> = basis.matrix().iter_rows().map(|r| r.to_vec()).collect();
    let mut norms: Vec<BigInt> = rows.iter().map(|r| crate::matrix::norm_sq(r)).collect();
    let mut improved_any = false;

    let add_scaled = |v: &mut [BigInt], row: &[BigInt], q: i8| {
        if q == 0 {
            return;
        }
        for (x, y) in v.iter_mut().zip(row) {
            match q {
                1 => *x += y,
                -1 => *x -= y,
                _ => *x += y * BigInt::from(q),
            }
        }
    };

    for _sweep in 0..8 {
        let mut improved = false;
        for t in 0..n {
            // Joint 2D search over pairs of helper rows.
            for j in 0..n {
                if j == t {
                    continue;
                }
                for k in j + 1..n {
                    if k == t {
                        continue;
                    }
                    for q1 in -2i8..=2 {
                        for q2 in -2i8..=2 {
                            if q1 == 0 && q2 == 0 {
                                continue;
                            }
                            let mut v = rows[t].clone();
                            add_scaled(&mut v, &rows[j], q1);
                            add_scaled(&mut v, &rows[k], q2);
                            let nsq = crate::matrix::norm_sq(&v);
                            if nsq < norms[t] {
                                rows[t] = v;
                                norms[t] = nsq;
                                improved = true;
                                improved_any = true;
                            }
                        }
                    }
                }
            }
            // Joint 3D ternary search.
            for j in 0..n {
                if j == t {
                    continue;
                }
                for k in j + 1..n {
                    if k == t {
                        continue;
                    }
                    for l in k + 1..n {
                        if l == t {
                            continue;
                        }
                        for q1 in -1i8..=1 {
                            for q2 in -1i8..=1 {
                                for q3 in -1i8..=1 {
                                    if q1 == 0 && (q2 == 0 || q3 == 0) || q2 == 0 && q3 == 0 {
                                        continue; // pairs already covered
                                    }
                                    let mut v = rows[t].clone();
                                    add_scaled(&mut v, &rows[j], q1);
                                    add_scaled(&mut v, &rows[k], q2);
                                    add_scaled(&mut v, &rows[l], q3);
                                    let nsq = crate::matrix::norm_sq(&v);
                                    if nsq < norms[t] {
                                        rows[t] = v;
                                        norms[t] = nsq;
                                        improved = true;
                                        improved_any = true;
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
        if !improved {
            break;
        }
    }
    if !improved_any {
        return None;
    }
    LatticeBasis::new(IntegerMatrix::from_rows(rows)).ok()
}

/// Algorithm I. Reduce M^{perp_N}, keep the m-n shortest rows, return their
/// orthogonal complement.
pub fn solve_via_orthogonal(
    inst: &HlpInstance,
    params: &ReductionParams,
) -> Result<SolveReport, SolveError> {
    if inst.n >= inst.m {
        return Err(SolveError::InvalidInstance(format!(
            "the orthogonal route needs n < m, got n={} m={}",
            inst.n, inst.m
        )));
    }
    let t0 = Instant::now();
    let orth = ortho_mod_basis(&inst.m_basis, &inst.modulus)?;
    let (reduced, stats) = lll_reduce(&orth, params)?;
    let short_span = rows_sub_basis(&reduced, inst.m - inst.n)?;
    let step1 = t0.elapsed();

    let t1 = Instant::now();
    let complement = crate::transforms::orthogonal_complement(&short_span, params)?;
    let recovered = reduce_to_fixpoint(complement, params)?;
    let step2 = t1.elapsed();
    if recovered.rank() != inst.n {
        return Err(SolveError::RankMismatch {
            expected: inst.n,
            found: recovered.rank(),
        });
    }

    let success = match &inst.planted {
        Some(p) => {
            let ok = check_success(&recovered, p, params)?;
            // When the run succeeded, every accepted short vector pairs to
            // zero against the planted basis (it lies in L^perp).
            debug_assert!(
                !ok || short_span.matrix().iter_rows().all(|u| {
                    crate::transforms::phi_b(u, &p.l_basis)
                        .map(|img| img.iter().all(|x| x.is_zero()))
                        .unwrap_or(false)
                })
            );
            Some(ok)
        }
        None => None,
    };
    let sigma_out_sq = recovered.sigma_sq().clone();
    Ok(SolveReport {
        algorithm: Algorithm::Orthogonal,
        recovered,
        intermediate: short_span,
        sigma_out_sq,
        stats,
        step1,
        step2,
        success,
    })
}

/// Algorithm II. Reduce M_N, keep the n shortest rows, return their
/// completion (modulus-local over the known factorization, or by the double
/// orthogonal complement).
pub fn solve_via_congruence(
    inst: &HlpInstance,
    params: &ReductionParams,
    mode: CompletionMode,
) -> Result<SolveReport, SolveError> {
    let t0 = Instant::now();
    let cong = cong_mod_basis(&inst.m_basis, &inst.modulus)?;
    let (reduced, stats) = lll_reduce(&cong, params)?;
    let short_span = rows_sub_basis(&reduced, inst.n)?;
    let step1 = t0.elapsed();

    let t1 = Instant::now();
    let use_local = match mode {
        CompletionMode::Auto => inst.modulus_factors.is_some(),
        CompletionMode::ModulusLocal => {
            if inst.modulus_factors.is_none() {
                return Err(SolveError::CompletionModeUnavailable);
            }
            true
        }
        CompletionMode::DoubleOrthogonal => false,
    };
    let recovered = if use_local {
        let primes = inst.modulus_factors.as_ref().unwrap();
        completion_at_primes(&short_span, primes)?
    } else {
        completion(&short_span, params)?
    };
    // Reduce to a fixpoint so both completion modes hand back output of the
    // same quality.
    let recovered = reduce_to_fixpoint(recovered, params)?;
    let step2 = t1.elapsed();
    if recovered.rank() != inst.n {
        return Err(SolveError::RankMismatch {
            expected: inst.n,
            found: recovered.rank(),
        });
    }

    let success = match &inst.planted {
        Some(p) => Some(check_success(&recovered, p, params)?),
        None => None,
    };
    let sigma_out_sq = recovered.sigma_sq().clone();
    Ok(SolveReport {
        algorithm: Algorithm::Congruence,
        recovered,
        intermediate: short_span,
        sigma_out_sq,
        stats,
        step1,
        step2,
        success,
    })
}

pub fn solve_hlp(
    inst: &HlpInstance,
    params: &ReductionParams,
    algorithm: Algorithm,
    mode: CompletionMode,
) -> Result<SolveReport, SolveError> {
    match algorithm {
        Algorithm::Orthogonal => solve_via_orthogonal(inst, params),
        Algorithm::Congruence => solve_via_congruence(inst, params, mode),
    }
}

/// Solve the noisy problem: embed w'_j = (w_j, e_j), solve the embedded
/// problem of rank n+r in dimension m+r (hidden lattice L + noise lattice,
/// of size at most mu + rho), then cancel the noise block with an integer
/// left kernel.
pub fn solve_nhlp(
    inst: &NhlpInstance,
    params: &ReductionParams,
    algorithm: Algorithm,
) -> Result<SolveReport, SolveError> {
    let (m, n, r) = (inst.m, inst.n, inst.r);
    let mut rows = Vec::with_capacity(r);
    for j in 0..r {
        let mut row = inst.w_basis.row(j).to_vec();
        row.extend((0..r).map(|i| {
            if i == j {
                BigInt::from(1)
            } else {
                BigInt::zero()
            }
        }));
        rows.push(row);
    }
    let embedded_basis = LatticeBasis::new(IntegerMatrix::from_rows(rows))?;
    let embedded = HlpInstance::new(
        n + r,
        inst.modulus.clone(),
        embedded_basis,
        inst.modulus_factors.clone(),
        None,
    )?;
    let mut report = solve_hlp(&embedded, params, algorithm, CompletionMode::Auto)?;

    let t2 = Instant::now();
    // Split the recovered basis as [V | U] and compute K with K U = 0; the
    // rows of K V have zero noise block and form a basis of the completion.
    let b = report.recovered.matrix();
    let v = IntegerMatrix::new(
        n + r,
        m,
        (0..n + r)
            .flat_map(|i| b.row(i)[..m].iter().cloned())
            .collect(),
    );
    let u = IntegerMatrix::new(
        n + r,
        r,
        (0..n + r)
            .flat_map(|i| b.row(i)[m..].iter().cloned())
            .collect(),
    );
    let kernel = left_integer_kernel(&u).map_err(|e| match e {
        LinAlgError::RankDeficient { expected, found } => {
            SolveError::KernelRankMismatch { expected, found }
        }
        other => SolveError::LinAlg(other),
    })?;
    if kernel.rows() != n {
        return Err(SolveError::KernelRankMismatch {
            expected: n,
            found: kernel.rows(),
        });
    }
    let recovered_raw = kernel.mul(&v);
    let recovered_basis =
        LatticeBasis::new(recovered_raw).map_err(|_| SolveError::KernelRankMismatch {
            expected: n,
            found: 0,
        })?;
    let recovered = reduce_to_fixpoint(recovered_basis, params)?;
    report.step2 += t2.elapsed();

    let success = match &inst.planted {
        Some(p) => {
            let target = completion(&p.l_basis, params)?;
            Some(recovered.same_lattice(&target))
        }
        None => None,
    };
    let sigma_out_sq = recovered.sigma_sq().clone();
    Ok(SolveReport {
        algorithm,
        recovered,
        intermediate: report.intermediate,
        sigma_out_sq,
        stats: report.stats,
        step1: report.step1,
        step2: report.step2,
        success,
    })
}

/// Reduced-norm ratio profile of a square reduced basis: for every split
/// index j, the log2 of (product of the top m-j norms) / (product of the
/// bottom j norms), plus the largest consecutive-norm jump.
#[derive(Clone, Debug)]
pub struct GapProfile {
    /// Squared row norms, nondecreasing.
    pub norms_sq: Vec<BigInt>,
    /// ratios_log2[j-1] = log2 g_j for j = 1..m-1.
    pub ratios_log2: Vec<f64>,
    /// Largest log2 jump between consecutive norms, and the split index
    /// (1-based count of vectors below the jump) where it occurs.
    pub max_jump_log2: f64,
    pub jump_index: usize,
    pub detected_rank: Option<usize>,
    pub tau_log2: Option<f64>,
}

pub fn gap_profile(reduced: &LatticeBasis) -> GapProfile {
    let norms_sq = reduced.row_norms_sq();
    let m = norms_sq.len();
    let logs: Vec<f64> = norms_sq.iter().map(|x| log2_bigint(x) / 2.0).collect();
    let total: f64 = logs.iter().sum();
    let mut ratios = Vec::with_capacity(m.saturating_sub(1));
    let mut prefix = 0.0;
    for j in 1..m {
        prefix += logs[j - 1];
        // log2 g_j = (total - prefix) - prefix
        ratios.push(total - 2.0 * prefix);
    }
    let (mut max_jump, mut idx) = (f64::NEG_INFINITY, 1);
    for k in 1..m {
        let jump = logs[k] - logs[k - 1];
        if jump > max_jump {
            max_jump = jump;
            idx = k;
        }
    }
    GapProfile {
        norms_sq,
        ratios_log2: ratios,
        max_jump_log2: max_jump,
        jump_index: idx,
        detected_rank: None,
        tau_log2: None,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DhlpSide {
    Orthogonal,
    Congruence,
}

#[derive(Clone, Debug)]
pub struct DhlpVerdict {
    pub exists: bool,
    pub detected_rank: Option<usize>,
    pub profile: GapProfile,
}

/// Decide whether some mu-small lattice contains the rows of M mod N, by
/// detecting the dominant norm jump in a reduced basis of the orthogonal
/// (or congruence) modular lattice. The hidden rank is read off the jump
/// position.
pub fn decide_dhlp(
    m_basis: &LatticeBasis,
    modulus: &BigInt,
    tau_log2: f64,
    side: DhlpSide,
    params: &ReductionParams,
) -> Result<DhlpVerdict, SolveError> {
    let modulus = modulus.abs();
    let base = match side {
        DhlpSide::Orthogonal => ortho_mod_basis(m_basis, &modulus)?,
        DhlpSide::Congruence => cong_mod_basis(m_basis, &modulus)?,
    };
    let (reduced, _) = lll_reduce(&base, params)?;
    let mut profile = gap_profile(&reduced);
    profile.tau_log2 = Some(tau_log2);
    let exists = profile.max_jump_log2 >= tau_log2;
    let detected_rank = exists.then(|| match side {
        DhlpSide::Orthogonal => m_basis.ambient_dim() - profile.jump_index,
        DhlpSide::Congruence => profile.jump_index,
    });
    profile.detected_rank = detected_rank;
    Ok(DhlpVerdict {
        exists,
        detected_rank,
        profile,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::next_prime_above_pow2;
    use num_integer::Integer;
    use num_traits::One;

    fn bi(x: i64) -> BigInt {
        BigInt::from(x)
    }

    fn basis(rows: &[&[i64]]) -> LatticeBasis {
        LatticeBasis::new(IntegerMatrix::from_i64_rows(rows)).unwrap()
    }

    /// Hand-planted instance: L = span{(1,0,1,0),(0,1,0,1)}, r = 1.
    fn tiny_planted(log_n: u32) -> HlpInstance {
        let n_mod = next_prime_above_pow2(log_n);
        let l = basis(&[&[1, 0, 1, 0], &[0, 1, 0, 1]]);
        let coeffs = IntegerMatrix::from_rows(vec![vec![
            bi(123456789).mod_floor(&n_mod),
            bi(987654321).mod_floor(&n_mod),
        ]]);
        let m_row = coeffs.mul(l.matrix()).reduce_mod(&n_mod);
        let m_basis = LatticeBasis::new(m_row).unwrap();
        HlpInstance::new(
            2,
            n_mod.clone(),
            m_basis,
            Some(vec![n_mod]),
            Some(PlantedHlp {
                l_basis: l,
                mu_sq: BigRational::from_integer(bi(2)),
                seed: None,
                coeffs: Some(coeffs),
                secret: PlantedSecret::None,
            }),
        )
        .unwrap()
    }

    #[test]
    fn orthogonal_route_recovers_planted() {
        let inst = tiny_planted(60);
        let report = solve_via_orthogonal(&inst, &ReductionParams::default()).unwrap();
        assert_eq!(report.success, Some(true));
        assert_eq!(report.intermediate.rank(), 2);
        assert!(report
            .recovered
            .same_lattice(&inst.planted.as_ref().unwrap().l_basis));
    }

    #[test]
    fn congruence_route_agrees() {
        let inst = tiny_planted(60);
        let params = ReductionParams::default();
        let a = solve_via_orthogonal(&inst, &params).unwrap();
        let b = solve_via_congruence(&inst, &params, CompletionMode::Auto).unwrap();
        assert_eq!(b.success, Some(true));
        assert_eq!(a.recovered.gram_det(), b.recovered.gram_det());
        assert!(a.recovered.same_lattice(&b.recovered));
        // Both completion modes give the same lattice.
        let c = solve_via_congruence(&inst, &params, CompletionMode::DoubleOrthogonal).unwrap();
        assert!(b.recovered.same_lattice(&c.recovered));
    }

    #[test]
    fn congruence_local_mode_needs_factors() {
        let mut inst = tiny_planted(40);
        inst.modulus_factors = None;
        let err = solve_via_congruence(
            &inst,
            &ReductionParams::default(),
            CompletionMode::ModulusLocal,
        );
        assert!(matches!(err, Err(SolveError::CompletionModeUnavailable)));
    }

    #[test]
    fn short_span_index_in_recovered_is_modulus_power() {
        // With a prime modulus, (recovered : N_II) = N^(n-r) on success.
        let inst = tiny_planted(30);
        let report = solve_via_congruence(
            &inst,
            &ReductionParams::default(),
            CompletionMode::ModulusLocal,
        )
        .unwrap();
        assert_eq!(report.success, Some(true));
        let ratio = report.intermediate.gram_det() / report.recovered.gram_det();
        let expected = num_traits::pow::pow(inst.modulus.clone(), 2 * (inst.n - inst.r));
        assert_eq!(ratio, expected);
    }

    #[test]
    fn degenerate_full_rank_rejected_on_orthogonal_route() {
        let l = basis(&[&[1, 0], &[0, 1]]);
        let m_basis = basis(&[&[1, 3]]);
        let inst = HlpInstance::new(2, bi(97), m_basis, None, None).unwrap();
        assert_eq!(inst.n, inst.m);
        assert!(matches!(
            solve_via_orthogonal(&inst, &ReductionParams::default()),
            Err(SolveError::InvalidInstance(_))
        ));
        drop(l);
    }

    #[test]
    fn negative_modulus_normalized() {
        let m_basis = basis(&[&[1, 3, 5]]);
        let inst = HlpInstance::new(2, bi(-97), m_basis, None, None).unwrap();
        assert_eq!(inst.modulus, bi(97));
    }

    #[test]
    fn planted_congruence_is_verified() {
        let l = basis(&[&[1, 0, 1, 0], &[0, 1, 0, 1]]);
        let bogus = basis(&[&[1, 2, 3, 4]]);
        let res = HlpInstance::new(
            2,
            bi(101),
            bogus,
            None,
            Some(PlantedHlp {
                l_basis: l,
                mu_sq: BigRational::from_integer(bi(2)),
                seed: None,
                coeffs: None,
                secret: PlantedSecret::None,
            }),
        );
        assert!(matches!(res, Err(SolveError::InvalidInstance(_))));
    }

    #[test]
    fn nhlp_kernel_identity() {
        // K U = 0 implies K [V|U] has an all-zero noise block.
        let u = IntegerMatrix::from_i64_rows(&[&[1], &[2], &[3]]);
        let k = left_integer_kernel(&u).unwrap();
        assert_eq!(k.rows(), 2);
        let b = IntegerMatrix::from_i64_rows(&[&[5, 7, 1], &[1, 0, 2], &[4, 4, 3]]);
        let kb = k.mul(&b);
        for i in 0..kb.rows() {
            assert!(kb.row(i)[2].is_zero());
        }
    }

    #[test]
    fn nhlp_recovers_planted() {
        let n_mod = next_prime_above_pow2(80);
        let l = basis(&[&[2, 1, 0, 3, 1, 1], &[1, 0, 4, 0, 2, 5]]);
        let noise = basis(&[&[1, -1, 0, 1, 0, 1]]); // norm^2 = 4 <= rho^2
        let coeffs = IntegerMatrix::from_rows(vec![vec![
            bi(31415926).mod_floor(&n_mod),
            bi(27182818).mod_floor(&n_mod),
        ]]);
        let mut w = coeffs.mul(l.matrix()).reduce_mod(&n_mod);
        for (wj, xj) in w.row_mut(0).iter_mut().zip(noise.row(0)) {
            *wj += xj;
        }
        let inst = NhlpInstance::new(
            2,
            n_mod.clone(),
            LatticeBasis::new(w).unwrap(),
            bi(2),
            Some(vec![n_mod]),
            Some(NhlpPlanted {
                l_basis: l.clone(),
                noise_basis: noise,
                mu_sq: l.sigma_sq().clone(),
                rho_actual_sq: bi(4),
                seed: None,
                coeffs: Some(coeffs),
            }),
        )
        .unwrap();
        for algo in [Algorithm::Orthogonal, Algorithm::Congruence] {
            let report = solve_nhlp(&inst, &ReductionParams::default(), algo).unwrap();
            assert_eq!(report.success, Some(true), "algo {algo}");
            assert!(report.recovered.same_lattice(&l));
        }
    }

    #[test]
    fn gap_profile_monotone_and_symmetric() {
        let b = basis(&[&[1, 0, 0], &[0, 2, 0], &[0, 0, 4]]);
        let profile = gap_profile(&b);
        assert_eq!(profile.ratios_log2.len(), 2);
        // g_j nonincreasing in j.
        assert!(profile.ratios_log2[0] >= profile.ratios_log2[1]);
        // Equal norms: every ratio at the middle split of 2k rows is 0.
        let e = basis(&[&[1, 0], &[0, 1]]);
        let p = gap_profile(&e);
        assert!(p.ratios_log2[0].abs() < 1e-12);
    }

    #[test]
    fn dhlp_planted_vs_random_tiny() {
        // Planted: tiny instance has a rank-2 hidden lattice in dim 4.
        let inst = tiny_planted(60);
        let verdict = decide_dhlp(
            &inst.m_basis,
            &inst.modulus,
            16.0,
            DhlpSide::Orthogonal,
            &ReductionParams::default(),
        )
        .unwrap();
        assert!(verdict.exists);
        assert_eq!(verdict.detected_rank, Some(2));

        // Congruence side detects the same rank.
        let verdict = decide_dhlp(
            &inst.m_basis,
            &inst.modulus,
            16.0,
            DhlpSide::Congruence,
            &ReductionParams::default(),
        )
        .unwrap();
        assert!(verdict.exists);
        assert_eq!(verdict.detected_rank, Some(2));

        // m = 2, N = 2, random M: no structure at tau = 32.
        let m_basis = basis(&[&[1, 0]]);
        let verdict = decide_dhlp(
            &m_basis,
            &bi(2),
            32.0,
            DhlpSide::Orthogonal,
            &ReductionParams::default(),
        )
        .unwrap();
        assert!(!verdict.exists);
        assert_eq!(verdict.detected_rank, None);
    }

    #[test]
    fn report_sigma_matches_recovered() {
        let inst = tiny_planted(45);
        let report = solve_via_orthogonal(&inst, &ReductionParams::default()).unwrap();
        assert_eq!(report.sigma_out_sq, *report.recovered.sigma_sq());
        assert!(report.sigma_out() > 0.0);
        let one = BigRational::one();
        assert!(report.sigma_out_sq >= one);
    }
}
