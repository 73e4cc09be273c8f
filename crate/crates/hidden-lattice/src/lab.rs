//! Seeded instance generation, applications (CRT-ACD, hidden subset sum,
//! rank-2 preset), block-projection solving for large dimensions, and the
//! brute-force counting oracle behind the proven thresholds.
//!
//! All randomness is ChaCha20 keyed by a 64-bit seed; each field draws from
//! its own stream so layouts stay reproducible bit-for-bit:
//! stream 0 = hidden basis entries, 1 = combination coefficients,
//! 2 = noise vectors, 3 = modulus material, 1000+i = Monte Carlo sample i.

use num_bigint::{BigInt, RandBigInt};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use thiserror::Error;

use crate::arith::{next_prime_above_pow2, random_prime_with_bits};
use crate::lattice::LatticeBasis;
use crate::lll::ReductionParams;
use crate::matrix::{norm_sq, solve_left_rational, IntegerMatrix};
use crate::solve::{
    solve_hlp, Algorithm, CompletionMode, HlpInstance, NhlpInstance, NhlpPlanted, PlantedHlp,
    PlantedSecret, SolveError, SolveReport,
};
use crate::transforms::{completion, ortho_mod_basis};

const RESAMPLE_BUDGET: usize = 64;

const STREAM_BASIS: u64 = 0;
const STREAM_COEFFS: u64 = 1;
const STREAM_NOISE: u64 = 2;
const STREAM_MODULUS: u64 = 3;
const STREAM_SAMPLE_BASE: u64 = 1000;

#[derive(Debug, Error)]
pub enum LabError {
    #[error("resampling budget exhausted after {0} attempts (degenerate parameters?)")]
    ResampleBudgetExceeded(usize),
    #[error("prime generation failed: {0}")]
    PrimeGenFailure(String),
    #[error("enumeration budget exceeded: {points} > {budget}")]
    BudgetExceeded { points: u128, budget: u128 },
    #[error("invalid generator spec: {0}")]
    Invalid(String),
    #[error("shared-block basis of block {block} is rank deficient or misaligned")]
    BlockAlignmentFailure { block: usize },
    #[error("solving projected block {block} failed: {source}")]
    PerBlockFailure {
        block: usize,
        source: Box<SolveError>,
    },
    #[error(transparent)]
    Solve(#[from] SolveError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GenKind {
    Hlp,
    Nhlp,
    CrtAcd,
    Hssp,
    Rank2Preset,
}

/// Parameters for the seeded generators. Fields irrelevant to a kind are
/// ignored by it (e.g. alpha for hssp, whose entries are binary).
#[derive(Clone, Debug)]
pub struct GenSpec {
    pub kind: GenKind,
    pub n: usize,
    pub m: usize,
    pub r: usize,
    /// Modulus exponent: N is the smallest prime above 2^log_n, or
    /// 2^log_n plus a random odd offset when prime_modulus is off.
    pub log_n: u32,
    /// Explicit modulus; overrides log_n when set.
    pub modulus: Option<BigInt>,
    /// Entries of hidden basis vectors are uniform in [-alpha, alpha].
    pub alpha: BigInt,
    /// Noise norm bound for nhlp.
    pub rho: Option<BigInt>,
    /// Prime size (bits) for crt_acd.
    pub eta: Option<u64>,
    /// Residue size (bits) for crt_acd.
    pub rho_acd: Option<u64>,
    pub seed: u64,
    pub prime_modulus: bool,
}

impl GenSpec {
    pub fn hlp(n: usize, m: usize, r: usize, log_n: u32, alpha: i64, seed: u64) -> Self {
        Self {
            kind: GenKind::Hlp,
            n,
            m,
            r,
            log_n,
            modulus: None,
            alpha: BigInt::from(alpha),
            rho: None,
            eta: None,
            rho_acd: None,
            seed,
            prime_modulus: true,
        }
    }

    pub fn nhlp(n: usize, m: usize, r: usize, log_n: u32, alpha: i64, rho: i64, seed: u64) -> Self {
        Self {
            kind: GenKind::Nhlp,
            rho: Some(BigInt::from(rho)),
            ..Self::hlp(n, m, r, log_n, alpha, seed)
        }
    }
}

fn stream_rng(seed: u64, stream: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Resolve the modulus and its public factorization (known only when the
/// modulus is generated prime or supplied prime).
fn resolve_modulus(spec: &GenSpec) -> Result<(BigInt, Option<Vec<BigInt>>), LabError> {
    if let Some(n) = &spec.modulus {
        let n = n.abs();
        if n < BigInt::from(2) {
            return Err(LabError::Invalid("modulus must be >= 2".into()));
        }
        let factors = crate::arith::is_probable_prime(&n).then(|| vec![n.clone()]);
        return Ok((n, factors));
    }
    if spec.log_n < 2 {
        return Err(LabError::Invalid("log_n must be >= 2".into()));
    }
    if spec.prime_modulus {
        let p = next_prime_above_pow2(spec.log_n);
        Ok((p.clone(), Some(vec![p])))
    } else {
        let mut rng = stream_rng(spec.seed, STREAM_MODULUS);
        let offset: u64 = 2
            * (rng.gen_bigint_range(&BigInt::zero(), &BigInt::from(1u64 << 15)))
                .to_u64()
                .unwrap()
            + 1;
        Ok(((BigInt::one() << spec.log_n) + offset, None))
    }
}

fn uniform_entry_matrix(
    rng: &mut ChaCha20Rng,
    rows: usize,
    cols: usize,
    alpha: &BigInt,
) -> IntegerMatrix {
    let hi = alpha + 1u32;
    let lo = -alpha.clone();
    IntegerMatrix::new(
        rows,
        cols,
        (0..rows * cols)
            .map(|_| rng.gen_bigint_range(&lo, &hi))
            .collect(),
    )
}

fn uniform_mod_matrix(
    rng: &mut ChaCha20Rng,
    rows: usize,
    cols: usize,
    modulus: &BigInt,
) -> IntegerMatrix {
    IntegerMatrix::new(
        rows,
        cols,
        (0..rows * cols)
            .map(|_| rng.gen_bigint_range(&BigInt::zero(), modulus))
            .collect(),
    )
}

/// Hidden basis with entries in [-alpha, alpha], rows independent over Q and
/// mod N (the Gram determinant is checked coprime to N, which is sufficient).
fn sample_hidden_basis(
    rng: &mut ChaCha20Rng,
    n: usize,
    m: usize,
    alpha: &BigInt,
    modulus: &BigInt,
) -> Result<LatticeBasis, LabError> {
    if alpha < &BigInt::one() {
        return Err(LabError::Invalid("alpha must be >= 1".into()));
    }
    for _ in 0..RESAMPLE_BUDGET {
        let mat = uniform_entry_matrix(rng, n, m, alpha);
        if let Ok(basis) = LatticeBasis::new(mat) {
            if basis.gram_det().gcd(modulus).is_one() {
                return Ok(basis);
            }
        }
    }
    Err(LabError::ResampleBudgetExceeded(RESAMPLE_BUDGET))
}

/// Generated instances always verify their own planted congruence (the
/// instance constructor re-checks it) and must admit the pivoting that the
/// solvers' first step needs.
fn finish_hlp_instance(
    n: usize,
    modulus: BigInt,
    factors: Option<Vec<BigInt>>,
    m_basis: LatticeBasis,
    planted: PlantedHlp,
) -> Result<HlpInstance, LabError> {
    let inst = HlpInstance::new(n, modulus, m_basis, factors, Some(planted))?;
    ortho_mod_basis(&inst.m_basis, &inst.modulus).map_err(SolveError::Transform)?;
    Ok(inst)
}

pub fn gen_hlp(spec: &GenSpec) -> Result<HlpInstance, LabError> {
    if spec.kind != GenKind::Hlp {
        return Err(LabError::Invalid("spec kind is not hlp".into()));
    }
    let (modulus, factors) = resolve_modulus(spec)?;
    let mut basis_rng = stream_rng(spec.seed, STREAM_BASIS);
    let mut coeff_rng = stream_rng(spec.seed, STREAM_COEFFS);
    let hidden = sample_hidden_basis(&mut basis_rng, spec.n, spec.m, &spec.alpha, &modulus)?;
    for _ in 0..RESAMPLE_BUDGET {
        let coeffs = uniform_mod_matrix(&mut coeff_rng, spec.r, spec.n, &modulus);
        let m_mat = coeffs.mul(hidden.matrix()).reduce_mod(&modulus);
        let Ok(m_basis) = LatticeBasis::new(m_mat) else {
            continue;
        };
        let planted = PlantedHlp {
            l_basis: hidden.clone(),
            mu_sq: hidden.sigma_sq().clone(),
            seed: Some(spec.seed),
            coeffs: Some(coeffs),
            secret: PlantedSecret::None,
        };
        match finish_hlp_instance(spec.n, modulus.clone(), factors.clone(), m_basis, planted) {
            Ok(inst) => return Ok(inst),
            Err(LabError::Solve(_)) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(LabError::ResampleBudgetExceeded(RESAMPLE_BUDGET))
}

pub fn gen_nhlp(spec: &GenSpec) -> Result<NhlpInstance, LabError> {
    if spec.kind != GenKind::Nhlp {
        return Err(LabError::Invalid("spec kind is not nhlp".into()));
    }
    let rho = spec
        .rho
        .clone()
        .ok_or_else(|| LabError::Invalid("nhlp needs a noise bound rho".into()))?;
    if rho < BigInt::one() {
        return Err(LabError::Invalid("rho must be >= 1".into()));
    }
    let (modulus, factors) = resolve_modulus(spec)?;
    let mut basis_rng = stream_rng(spec.seed, STREAM_BASIS);
    let mut coeff_rng = stream_rng(spec.seed, STREAM_COEFFS);
    let mut noise_rng = stream_rng(spec.seed, STREAM_NOISE);
    let hidden = sample_hidden_basis(&mut basis_rng, spec.n, spec.m, &spec.alpha, &modulus)?;
    let rho_sq = &rho * &rho;
    // Noise entries live in a box small enough that rejection on the norm
    // bound terminates quickly.
    let entry_bound = {
        let root = crate::arith::floor_sqrt(&BigInt::from(spec.m));
        (rho.clone() / root).max(BigInt::one())
    };
    'outer: for _ in 0..RESAMPLE_BUDGET {
        let mut noise_rows = Vec::with_capacity(spec.r);
        for _ in 0..spec.r {
            let mut ok = None;
            for _ in 0..RESAMPLE_BUDGET {
                let row = uniform_entry_matrix(&mut noise_rng, 1, spec.m, &entry_bound);
                let row = row.row(0).to_vec();
                let nsq = norm_sq(&row);
                if !nsq.is_zero() && nsq <= rho_sq {
                    ok = Some(row);
                    break;
                }
            }
            match ok {
                Some(row) => noise_rows.push(row),
                None => continue 'outer,
            }
        }
        let noise_mat = IntegerMatrix::from_rows(noise_rows);
        let Ok(noise) = LatticeBasis::new(noise_mat) else {
            continue;
        };
        // L and the noise lattice must intersect trivially: the stacked
        // (n+r) x m matrix has full rank.
        let mut stacked: Vec<Vec<BigInt>> =
            hidden.matrix().iter_rows().map(|r| r.to_vec()).collect();
        stacked.extend(noise.matrix().iter_rows().map(|r| r.to_vec()));
        if IntegerMatrix::from_rows(stacked).rank() != spec.n + spec.r {
            continue;
        }
        let coeffs = uniform_mod_matrix(&mut coeff_rng, spec.r, spec.n, &modulus);
        let mut w = coeffs.mul(hidden.matrix()).reduce_mod(&modulus);
        for j in 0..spec.r {
            for (wj, xj) in w.row_mut(j).iter_mut().zip(noise.row(j)) {
                *wj += xj;
            }
        }
        let Ok(w_basis) = LatticeBasis::new(w) else {
            continue;
        };
        let rho_actual_sq = noise
            .matrix()
            .iter_rows()
            .map(norm_sq)
            .max()
            .expect("r >= 1");
        let planted = NhlpPlanted {
            l_basis: hidden.clone(),
            mu_sq: hidden.sigma_sq().clone(),
            noise_basis: noise,
            rho_actual_sq,
            seed: Some(spec.seed),
            coeffs: Some(coeffs),
        };
        match NhlpInstance::new(
            spec.n,
            modulus.clone(),
            w_basis,
            rho.clone(),
            factors.clone(),
            Some(planted),
        ) {
            Ok(inst) => return Ok(inst),
            Err(_) => continue,
        }
    }
    Err(LabError::ResampleBudgetExceeded(RESAMPLE_BUDGET))
}

/// Chinese remainder lift: the unique x in [0, prod p_i) with
/// x = residues[i] mod p_i.
fn crt_lift(residues: &[BigInt], primes: &[BigInt]) -> BigInt {
    let mut x = residues[0].mod_floor(&primes[0]);
    let mut modulus = primes[0].clone();
    for (r, p) in residues.iter().zip(primes).skip(1) {
        let inv = crate::matrix::mod_inverse(&modulus, p).expect("distinct primes");
        let delta = ((r - &x).mod_floor(p) * inv).mod_floor(p);
        x += &modulus * delta;
        modulus *= p;
    }
    x
}

/// CRT-ACD first step: N = prod of n distinct eta-bit primes, hidden
/// residues bounded by 2^rho. The public row is b = (x, y*x) in Z^(2n) and
/// the planted lattice is spanned by the per-prime residue vectors
/// b_i = (x_i, y_i * x_i), of size O(sqrt(n) 2^(2 rho)).
///
/// The factorization of N is the attack target, so the instance never
/// carries modulus_factors; the primes sit in the planted secret.
pub fn gen_crt_acd(n: usize, eta: u64, rho: u64, seed: u64) -> Result<HlpInstance, LabError> {
    if n < 2 {
        return Err(LabError::Invalid("crt_acd needs n >= 2".into()));
    }
    if eta < 2 * rho + 8 {
        return Err(LabError::Invalid(format!(
            "eta must exceed 2 rho + 8 bits for meaningful instances (eta={eta}, rho={rho})"
        )));
    }
    let mut prime_rng = stream_rng(seed, STREAM_MODULUS);
    let mut primes: Vec<BigInt> = Vec::with_capacity(n);
    for _ in 0..n {
        for attempt in 0..RESAMPLE_BUDGET {
            let p = random_prime_with_bits(eta, &mut prime_rng);
            if !primes.contains(&p) {
                primes.push(p);
                break;
            }
            if attempt + 1 == RESAMPLE_BUDGET {
                return Err(LabError::PrimeGenFailure(format!(
                    "could not find {n} distinct {eta}-bit primes"
                )));
            }
        }
    }
    let modulus: BigInt = primes.iter().product();

    let mut residue_rng = stream_rng(seed, STREAM_BASIS);
    let bound = BigInt::from(2u32).pow(rho as u32);
    for _ in 0..RESAMPLE_BUDGET {
        // residues_x[i][k] = residue of x_k modulo p_i
        let residues_x = uniform_entry_matrix(&mut residue_rng, n, n, &bound);
        if residues_x.rank() != n {
            continue;
        }
        let residues_y = uniform_entry_matrix(&mut residue_rng, n, 1, &bound);
        // Hidden basis rows b_i = (x^(i), y^(i) x^(i)).
        let mut l_rows = Vec::with_capacity(n);
        for i in 0..n {
            let mut row = residues_x.row(i).to_vec();
            row.extend(residues_x.row(i).iter().map(|x| x * &residues_y[(i, 0)]));
            l_rows.push(row);
        }
        let Ok(l_basis) = LatticeBasis::new(IntegerMatrix::from_rows(l_rows)) else {
            continue;
        };
        // Public vector via CRT.
        let mut b = Vec::with_capacity(2 * n);
        let col =
            |k: usize| -> Vec<BigInt> { (0..n).map(|i| residues_x[(i, k)].clone()).collect() };
        let y_col: Vec<BigInt> = (0..n).map(|i| residues_y[(i, 0)].clone()).collect();
        for k in 0..n {
            b.push(crt_lift(&col(k), &primes));
        }
        for k in 0..n {
            let prods: Vec<BigInt> = (0..n)
                .map(|i| (&residues_x[(i, k)] * &y_col[i]).mod_floor(&primes[i]))
                .collect();
            b.push(crt_lift(&prods, &primes));
        }
        let Ok(m_basis) = LatticeBasis::new(IntegerMatrix::from_rows(vec![b])) else {
            continue;
        };
        // CRT coefficients: c_i = 1 mod p_i, 0 mod p_j, so that the public
        // row is sum c_i b_i mod N.
        let coeffs_row: Vec<BigInt> = (0..n)
            .map(|i| {
                let unit: Vec<BigInt> = (0..n)
                    .map(|j| {
                        if i == j {
                            BigInt::one()
                        } else {
                            BigInt::zero()
                        }
                    })
                    .collect();
                crt_lift(&unit, &primes)
            })
            .collect();
        let planted = PlantedHlp {
            mu_sq: l_basis.sigma_sq().clone(),
            l_basis,
            seed: Some(seed),
            coeffs: Some(IntegerMatrix::from_rows(vec![coeffs_row])),
            secret: PlantedSecret::CrtAcd {
                primes: primes.clone(),
            },
        };
        match finish_hlp_instance(n, modulus.clone(), None, m_basis, planted) {
            Ok(inst) => return Ok(inst),
            Err(LabError::Solve(_)) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(LabError::ResampleBudgetExceeded(RESAMPLE_BUDGET))
}

/// Hidden subset sum first step: v = sum alpha_i x_i mod N with binary
/// hidden vectors; the planted lattice has sigma <= sqrt(m).
pub fn gen_hssp(n: usize, m: usize, log_n: u32, seed: u64) -> Result<HlpInstance, LabError> {
    if n > m {
        return Err(LabError::Invalid("hssp needs n <= m".into()));
    }
    let spec = GenSpec {
        kind: GenKind::Hssp,
        n,
        m,
        r: 1,
        log_n,
        modulus: None,
        alpha: BigInt::one(),
        rho: None,
        eta: None,
        rho_acd: None,
        seed,
        prime_modulus: true,
    };
    let (modulus, factors) = resolve_modulus(&spec)?;
    let mut basis_rng = stream_rng(seed, STREAM_BASIS);
    let mut coeff_rng = stream_rng(seed, STREAM_COEFFS);
    for _ in 0..RESAMPLE_BUDGET {
        let mat = IntegerMatrix::new(n, m, (0..n * m).map(|_| rng_bit(&mut basis_rng)).collect());
        let Ok(hidden) = LatticeBasis::new(mat) else {
            continue;
        };
        // Binary entries keep sigma^2 <= m.
        debug_assert!(*hidden.sigma_sq() <= BigRational::from_integer(BigInt::from(m)));
        let weights = uniform_mod_matrix(&mut coeff_rng, 1, n, &modulus);
        let v = weights.mul(hidden.matrix()).reduce_mod(&modulus);
        let Ok(m_basis) = LatticeBasis::new(v) else {
            continue;
        };
        let planted = PlantedHlp {
            mu_sq: hidden.sigma_sq().clone(),
            l_basis: hidden,
            seed: Some(seed),
            coeffs: Some(weights),
            secret: PlantedSecret::None,
        };
        match finish_hlp_instance(n, modulus.clone(), factors.clone(), m_basis, planted) {
            Ok(inst) => return Ok(inst),
            Err(LabError::Solve(_)) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(LabError::ResampleBudgetExceeded(RESAMPLE_BUDGET))
}

fn rng_bit(rng: &mut ChaCha20Rng) -> BigInt {
    rng.gen_bigint_range(&BigInt::zero(), &BigInt::from(2))
}

/// Rank-2 preset modelled on faulty-signature attacks: the public row is
/// congruent to -x - c*y mod N for hidden short vectors x, y and an unknown
/// scalar c.
pub fn gen_rank2(m: usize, alpha: i64, log_n: u32, seed: u64) -> Result<HlpInstance, LabError> {
    if m < 3 {
        return Err(LabError::Invalid("rank-2 preset needs m >= 3".into()));
    }
    let spec = GenSpec::hlp(2, m, 1, log_n, alpha, seed);
    let (modulus, factors) = resolve_modulus(&spec)?;
    let mut basis_rng = stream_rng(seed, STREAM_BASIS);
    let mut coeff_rng = stream_rng(seed, STREAM_COEFFS);
    let hidden = sample_hidden_basis(&mut basis_rng, 2, m, &spec.alpha, &modulus)?;
    for _ in 0..RESAMPLE_BUDGET {
        let c = coeff_rng.gen_bigint_range(&BigInt::zero(), &modulus);
        let coeffs = IntegerMatrix::from_rows(vec![vec![
            (-BigInt::one()).mod_floor(&modulus),
            (-&c).mod_floor(&modulus),
        ]]);
        let m_mat = coeffs.mul(hidden.matrix()).reduce_mod(&modulus);
        let Ok(m_basis) = LatticeBasis::new(m_mat) else {
            continue;
        };
        let planted = PlantedHlp {
            l_basis: hidden.clone(),
            mu_sq: hidden.sigma_sq().clone(),
            seed: Some(seed),
            coeffs: Some(coeffs),
            secret: PlantedSecret::None,
        };
        match finish_hlp_instance(2, modulus.clone(), factors.clone(), m_basis, planted) {
            Ok(inst) => return Ok(inst),
            Err(LabError::Solve(_)) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(LabError::ResampleBudgetExceeded(RESAMPLE_BUDGET))
}

/// Solve a wide instance through block projections: every projection keeps a
/// shared leading block and one trailing block, the per-block solutions are
/// re-aligned on the shared block by an exact rational base change, and the
/// concatenation is completed into a basis of the hidden completion.
pub fn blockwise_solve(
    inst: &HlpInstance,
    block_dim: usize,
    params: &ReductionParams,
    algorithm: Algorithm,
) -> Result<SolveReport, LabError> {
    let (m, n) = (inst.m, inst.n);
    if block_dim == m {
        return Ok(solve_hlp(inst, params, algorithm, CompletionMode::Auto)?);
    }
    if block_dim < 2 * n {
        return Err(LabError::Invalid(format!(
            "block_dim must be at least 2n = {} (got {block_dim})",
            2 * n
        )));
    }
    if m < 2 * block_dim {
        return Err(LabError::Invalid(format!(
            "need m >= 2 * block_dim, got m={m} block_dim={block_dim}"
        )));
    }

    let w = block_dim;
    let tail_cols: Vec<Vec<usize>> = (w..m)
        .collect::<Vec<_>>()
        .chunks(w)
        .map(|c| c.to_vec())
        .collect();

    let project = |mat: &IntegerMatrix, cols: &[usize]| -> IntegerMatrix {
        IntegerMatrix::new(
            mat.rows(),
            w + cols.len(),
            (0..mat.rows())
                .flat_map(|i| {
                    (0..w)
                        .map(move |c| mat[(i, c)].clone())
                        .chain(cols.iter().map(move |&c| mat[(i, c)].clone()))
                })
                .collect(),
        )
    };

    let t0 = std::time::Instant::now();
    let mut shared_parts: Vec<IntegerMatrix> = Vec::new();
    let mut tail_parts: Vec<IntegerMatrix> = Vec::new();
    let mut stats_total = crate::lll::ReductionStats::default();
    for (bi, cols) in tail_cols.iter().enumerate() {
        let proj_m = project(inst.m_basis.matrix(), cols);
        let sub = (|| -> Result<SolveReport, SolveError> {
            let m_basis = LatticeBasis::new(proj_m)?;
            let sub_inst = HlpInstance::new(
                n,
                inst.modulus.clone(),
                m_basis,
                inst.modulus_factors.clone(),
                None,
            )?;
            solve_hlp(&sub_inst, params, algorithm, CompletionMode::Auto)
        })()
        .map_err(|e| LabError::PerBlockFailure {
            block: bi + 1,
            source: Box::new(e),
        })?;
        let rec = sub.recovered.matrix();
        shared_parts.push(IntegerMatrix::new(
            n,
            w,
            (0..n)
                .flat_map(|i| rec.row(i)[..w].iter().cloned())
                .collect(),
        ));
        tail_parts.push(IntegerMatrix::new(
            n,
            cols.len(),
            (0..n)
                .flat_map(|i| rec.row(i)[w..].iter().cloned())
                .collect(),
        ));
        stats_total.swap_count += sub.stats.swap_count;
        stats_total.size_reduction_count += sub.stats.size_reduction_count;
        stats_total.max_intermediate_bits = stats_total
            .max_intermediate_bits
            .max(sub.stats.max_intermediate_bits);
    }
    let step1 = t0.elapsed();

    let t1 = std::time::Instant::now();
    // Align every block's shared part onto the first one.
    let reference = &shared_parts[0];
    if reference.rank() != n {
        return Err(LabError::BlockAlignmentFailure { block: 1 });
    }
    let mut combined_cols: Vec<IntegerMatrix> = vec![reference.clone(), tail_parts[0].clone()];
    for bi in 1..tail_cols.len() {
        let x = solve_left_rational(&shared_parts[bi], reference)
            .ok_or(LabError::BlockAlignmentFailure { block: bi + 1 })?;
        let aligned = x.mul(&tail_parts[bi].to_rational());
        let aligned = aligned
            .to_integer()
            .ok_or(LabError::BlockAlignmentFailure { block: bi + 1 })?;
        combined_cols.push(aligned);
    }
    let mut rows: Vec<Vec<BigInt>> = vec![Vec::with_capacity(m); n];
    for part in &combined_cols {
        for (i, row) in rows.iter_mut().enumerate() {
            row.extend(part.row(i).iter().cloned());
        }
    }
    let combined =
        LatticeBasis::new(IntegerMatrix::from_rows(rows)).map_err(SolveError::Lattice)?;
    // Per-block completions can still miss a global index; complete once at
    // full width.
    let recovered = completion(&combined, params).map_err(SolveError::Transform)?;
    let step2 = t1.elapsed();

    let success = match &inst.planted {
        Some(p) => {
            let target = completion(&p.l_basis, params).map_err(SolveError::Transform)?;
            Some(recovered.same_lattice(&target))
        }
        None => None,
    };
    stats_total.norms_sq = recovered.row_norms_sq();
    let sigma_out_sq = recovered.sigma_sq().clone();
    Ok(SolveReport {
        algorithm,
        recovered,
        intermediate: combined,
        sigma_out_sq,
        stats: stats_total,
        step1,
        step2,
        success,
    })
}

const COUNT_BUDGET: u128 = 10_000_000;

/// Exhaustively count a in (Z/NZ)^n with <a, t> = 0 mod N. The closed form
/// is gcd(t, N) * N^(n-1); this oracle exists to validate it.
pub fn count_orthogonal_mod_oracle(t: &[BigInt], modulus: &BigInt) -> Result<BigInt, LabError> {
    if t.is_empty() || t.iter().all(|x| x.is_zero()) {
        return Err(LabError::Invalid("t must be a nonzero vector".into()));
    }
    if modulus < &BigInt::from(2) {
        return Err(LabError::Invalid("modulus must be >= 2".into()));
    }
    let n = t.len();
    let n_u = modulus
        .to_u128()
        .ok_or_else(|| LabError::Invalid("modulus too large for the brute-force oracle".into()))?;
    let points = n_u
        .checked_pow(n as u32)
        .filter(|&p| p <= COUNT_BUDGET)
        .ok_or(LabError::BudgetExceeded {
            points: u128::MAX,
            budget: COUNT_BUDGET,
        })?;
    let t_red: Vec<u128> = t
        .iter()
        .map(|x| x.mod_floor(modulus).to_u128().unwrap())
        .collect();
    let mut a = vec![0u128; n];
    let mut count = BigInt::zero();
    for _ in 0..points {
        let s: u128 = a
            .iter()
            .zip(&t_red)
            .fold(0u128, |acc, (&ai, &ti)| (acc + ai * ti % n_u) % n_u);
        if s == 0 {
            count += 1;
        }
        for digit in a.iter_mut() {
            *digit += 1;
            if *digit < n_u {
                break;
            }
            *digit = 0;
        }
    }
    Ok(count)
}

/// Uniform public rows in [0, N)^m: a non-planted comparison instance for
/// the decisional experiments.
pub fn gen_uniform_public(
    m: usize,
    r: usize,
    log_n: u32,
    seed: u64,
    prime_modulus: bool,
) -> Result<(BigInt, Option<Vec<BigInt>>, LatticeBasis), LabError> {
    let spec = GenSpec {
        kind: GenKind::Hlp,
        n: r,
        m,
        r,
        log_n,
        modulus: None,
        alpha: BigInt::one(),
        rho: None,
        eta: None,
        rho_acd: None,
        seed,
        prime_modulus,
    };
    let (modulus, factors) = resolve_modulus(&spec)?;
    let mut rng = stream_rng(seed, STREAM_COEFFS);
    for _ in 0..RESAMPLE_BUDGET {
        let mat = uniform_mod_matrix(&mut rng, r, m, &modulus);
        if let Ok(basis) = LatticeBasis::new(mat) {
            if ortho_mod_basis(&basis, &modulus).is_ok() {
                return Ok((modulus, factors, basis));
            }
        }
    }
    Err(LabError::ResampleBudgetExceeded(RESAMPLE_BUDGET))
}

#[derive(Clone, Debug)]
pub struct ExperimentOutcome {
    pub successes: usize,
    pub valid_samples: usize,
    pub rate: f64,
    /// Per-sample outcome: None for an excluded degenerate draw.
    pub samples: Vec<Option<bool>>,
}

/// Empirical success rate over the rank-1 sample space: draw a uniformly,
/// form the single public row sum a_i v_i mod N, run the chosen algorithm,
/// and compare against the completion of the hidden lattice. Degenerate
/// draws (zero coefficient vector or zero row) are excluded from the
/// denominator.
pub fn success_rate_experiment(
    hidden: &LatticeBasis,
    modulus: &BigInt,
    modulus_factors: Option<Vec<BigInt>>,
    sample_count: usize,
    algorithm: Algorithm,
    params: &ReductionParams,
    seed: u64,
) -> Result<ExperimentOutcome, LabError> {
    if sample_count == 0 {
        return Err(LabError::Invalid("sample_count must be >= 1".into()));
    }
    if !hidden.gram_det().gcd(modulus).is_one() {
        return Err(LabError::Invalid(
            "hidden basis is not Z/NZ-linearly independent (Gram det shares a factor with N)"
                .into(),
        ));
    }
    let n = hidden.rank();
    let mut successes = 0usize;
    let mut valid = 0usize;
    let mut samples = Vec::with_capacity(sample_count);
    for i in 0..sample_count {
        let mut rng = stream_rng(seed, STREAM_SAMPLE_BASE + i as u64);
        let coeffs = uniform_mod_matrix(&mut rng, 1, n, modulus);
        if coeffs.row(0).iter().all(|x| x.is_zero()) {
            samples.push(None);
            continue;
        }
        let row = coeffs.mul(hidden.matrix()).reduce_mod(modulus);
        if row.row(0).iter().all(|x| x.is_zero()) {
            samples.push(None);
            continue;
        }
        valid += 1;
        let outcome = (|| -> Result<bool, SolveError> {
            let m_basis = LatticeBasis::new(row)?;
            let inst = HlpInstance::new(
                n,
                modulus.clone(),
                m_basis,
                modulus_factors.clone(),
                Some(PlantedHlp {
                    l_basis: hidden.clone(),
                    mu_sq: hidden.sigma_sq().clone(),
                    seed: Some(seed),
                    coeffs: Some(coeffs),
                    secret: PlantedSecret::None,
                }),
            )?;
            let report = solve_hlp(&inst, params, algorithm, CompletionMode::Auto)?;
            Ok(report.success == Some(true))
        })();
        // A pivoting or rank failure counts as an unsuccessful run, not as an
        // invalid sample.
        let ok = outcome.unwrap_or(false);
        samples.push(Some(ok));
        if ok {
            successes += 1;
        }
    }
    Ok(ExperimentOutcome {
        successes,
        valid_samples: valid,
        rate: if valid == 0 {
            0.0
        } else {
            successes as f64 / valid as f64
        },
        samples,
    })
}
