//! File formats: JSON instance files (all integers as decimal strings, so
//! nothing is ever rounded), JSON solve/decide reports, and the CSV rows the
//! experiment suites emit.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lattice::LatticeBasis;
use crate::matrix::IntegerMatrix;
use crate::solve::{
    Algorithm, DhlpVerdict, HlpInstance, NhlpInstance, NhlpPlanted, PlantedHlp, PlantedSecret,
    SolveError, SolveReport,
};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("malformed integer {0:?}")]
    BadInteger(String),
    #[error("malformed rational {0:?}")]
    BadRational(String),
    #[error("unsupported schema version {0}")]
    BadSchemaVersion(u32),
    #[error("unknown instance kind {0:?}")]
    BadKind(String),
    #[error("ragged or empty basis rows")]
    BadShape,
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Invalid(#[from] SolveError),
    #[error(transparent)]
    Lattice(#[from] crate::lattice::LatticeError),
}

pub fn parse_bigint(s: &str) -> Result<BigInt, IoError> {
    s.parse().map_err(|_| IoError::BadInteger(s.into()))
}

pub fn parse_ratio(s: &str) -> Result<BigRational, IoError> {
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n, d),
        None => (s, "1"),
    };
    let num: BigInt = num.parse().map_err(|_| IoError::BadRational(s.into()))?;
    let den: BigInt = den.parse().map_err(|_| IoError::BadRational(s.into()))?;
    if den == BigInt::from(0) {
        return Err(IoError::BadRational(s.into()));
    }
    Ok(BigRational::new(num, den))
}

pub fn ratio_string(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

fn rows_to_strings(m: &IntegerMatrix) -> Vec<Vec<String>> {
    m.iter_rows()
        .map(|r| r.iter().map(|x| x.to_string()).collect())
        .collect()
}

fn rows_from_strings(rows: &[Vec<String>]) -> Result<IntegerMatrix, IoError> {
    if rows.is_empty() || rows[0].is_empty() {
        return Err(IoError::BadShape);
    }
    let cols = rows[0].len();
    let mut data = Vec::with_capacity(rows.len() * cols);
    for row in rows {
        if row.len() != cols {
            return Err(IoError::BadShape);
        }
        for s in row {
            data.push(parse_bigint(s)?);
        }
    }
    Ok(IntegerMatrix::new(rows.len(), cols, data))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlantedFile {
    pub l_basis: Vec<Vec<String>>,
    /// Exact rational sigma^2 of the planted basis, "num/den" or "num".
    pub mu_sq: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coeffs: Option<Vec<Vec<String>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub noise_basis: Option<Vec<Vec<String>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rho_actual_sq: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub acd_primes: Option<Vec<String>>,
}

/// On-disk instance. `basis` holds the public rows: the basis of M for plain
/// problems, the noisy vectors w_j for the noisy variant.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceFile {
    pub schema_version: u32,
    pub kind: String,
    pub m: usize,
    pub n: usize,
    pub r: usize,
    pub modulus: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub modulus_factorization: Option<Vec<String>>,
    pub basis: Vec<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rho: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub planted: Option<PlantedFile>,
}

/// A parsed instance file: noisy instances carry different obligations, so
/// they deserialize to their own type.
#[derive(Clone, Debug)]
pub enum LoadedInstance {
    Hlp(HlpInstance),
    Nhlp(NhlpInstance),
}

pub fn hlp_to_file(inst: &HlpInstance, kind: &str) -> InstanceFile {
    let planted = inst.planted.as_ref().map(|p| PlantedFile {
        l_basis: rows_to_strings(p.l_basis.matrix()),
        mu_sq: ratio_string(&p.mu_sq),
        seed: p.seed,
        coeffs: p.coeffs.as_ref().map(rows_to_strings),
        noise_basis: None,
        rho_actual_sq: None,
        acd_primes: match &p.secret {
            PlantedSecret::CrtAcd { primes } => {
                Some(primes.iter().map(|p| p.to_string()).collect())
            }
            PlantedSecret::None => None,
        },
    });
    InstanceFile {
        schema_version: SCHEMA_VERSION,
        kind: kind.to_string(),
        m: inst.m,
        n: inst.n,
        r: inst.r,
        modulus: inst.modulus.to_string(),
        modulus_factorization: inst
            .modulus_factors
            .as_ref()
            .map(|f| f.iter().map(|p| p.to_string()).collect()),
        basis: rows_to_strings(inst.m_basis.matrix()),
        rho: None,
        planted,
    }
}

pub fn nhlp_to_file(inst: &NhlpInstance) -> InstanceFile {
    let planted = inst.planted.as_ref().map(|p| PlantedFile {
        l_basis: rows_to_strings(p.l_basis.matrix()),
        mu_sq: ratio_string(&p.mu_sq),
        seed: p.seed,
        coeffs: p.coeffs.as_ref().map(rows_to_strings),
        noise_basis: Some(rows_to_strings(p.noise_basis.matrix())),
        rho_actual_sq: Some(p.rho_actual_sq.to_string()),
        acd_primes: None,
    });
    InstanceFile {
        schema_version: SCHEMA_VERSION,
        kind: "nhlp".into(),
        m: inst.m,
        n: inst.n,
        r: inst.r,
        modulus: inst.modulus.to_string(),
        modulus_factorization: inst
            .modulus_factors
            .as_ref()
            .map(|f| f.iter().map(|p| p.to_string()).collect()),
        basis: rows_to_strings(inst.w_basis.matrix()),
        rho: Some(inst.rho.to_string()),
        planted,
    }
}

pub fn load_instance(file: &InstanceFile) -> Result<LoadedInstance, IoError> {
    if file.schema_version != SCHEMA_VERSION {
        return Err(IoError::BadSchemaVersion(file.schema_version));
    }
    let modulus = parse_bigint(&file.modulus)?;
    let factors = file
        .modulus_factorization
        .as_ref()
        .map(|f| {
            f.iter()
                .map(|s| parse_bigint(s))
                .collect::<Result<Vec<_>, _>>()
        })
        .transpose()?;
    let basis = LatticeBasis::new(rows_from_strings(&file.basis)?)?;

    match file.kind.as_str() {
        "hlp" | "crt_acd" | "hssp" | "rank2_preset" => {
            let planted = file
                .planted
                .as_ref()
                .map(|p| -> Result<PlantedHlp, IoError> {
                    Ok(PlantedHlp {
                        l_basis: LatticeBasis::new(rows_from_strings(&p.l_basis)?)?,
                        mu_sq: parse_ratio(&p.mu_sq)?,
                        seed: p.seed,
                        coeffs: p
                            .coeffs
                            .as_ref()
                            .map(|c| rows_from_strings(c))
                            .transpose()?,
                        secret: match &p.acd_primes {
                            Some(primes) => PlantedSecret::CrtAcd {
                                primes: primes
                                    .iter()
                                    .map(|s| parse_bigint(s))
                                    .collect::<Result<Vec<_>, _>>()?,
                            },
                            None => PlantedSecret::None,
                        },
                    })
                })
                .transpose()?;
            let inst = HlpInstance::new(file.n, modulus, basis, factors, planted)?;
            Ok(LoadedInstance::Hlp(inst))
        }
        "nhlp" => {
            let rho = parse_bigint(
                file.rho
                    .as_ref()
                    .ok_or_else(|| IoError::BadInteger("missing rho".into()))?,
            )?;
            let planted = file
                .planted
                .as_ref()
                .map(|p| -> Result<NhlpPlanted, IoError> {
                    let noise = p
                        .noise_basis
                        .as_ref()
                        .ok_or(IoError::BadShape)
                        .and_then(|rows| rows_from_strings(rows))?;
                    Ok(NhlpPlanted {
                        l_basis: LatticeBasis::new(rows_from_strings(&p.l_basis)?)?,
                        mu_sq: parse_ratio(&p.mu_sq)?,
                        noise_basis: LatticeBasis::new(noise)?,
                        rho_actual_sq: p
                            .rho_actual_sq
                            .as_ref()
                            .map(|s| parse_bigint(s))
                            .transpose()?
                            .unwrap_or_else(|| BigInt::from(0)),
                        seed: p.seed,
                        coeffs: p
                            .coeffs
                            .as_ref()
                            .map(|c| rows_from_strings(c))
                            .transpose()?,
                    })
                })
                .transpose()?;
            let inst = NhlpInstance::new(file.n, modulus, basis, rho, factors, planted)?;
            Ok(LoadedInstance::Nhlp(inst))
        }
        other => Err(IoError::BadKind(other.into())),
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SolveReportFile {
    pub algorithm: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub success: Option<bool>,
    pub sigma_out: f64,
    pub sigma_out_sq: String,
    pub recovered_basis: Vec<Vec<String>>,
    pub intermediate_basis: Vec<Vec<String>>,
    pub swap_count: u64,
    pub size_reduction_count: u64,
    pub max_intermediate_bits: u64,
    pub step1_ms: f64,
    pub step2_ms: f64,
    /// Result of the independent re-verification pass (membership of the
    /// public rows mod N plus self-completeness of the recovered basis).
    pub verified: bool,
}

pub fn report_to_file(report: &SolveReport, verified: bool) -> SolveReportFile {
    SolveReportFile {
        algorithm: report.algorithm.to_string(),
        success: report.success,
        sigma_out: report.sigma_out(),
        sigma_out_sq: ratio_string(&report.sigma_out_sq),
        recovered_basis: rows_to_strings(report.recovered.matrix()),
        intermediate_basis: rows_to_strings(report.intermediate.matrix()),
        swap_count: report.stats.swap_count,
        size_reduction_count: report.stats.size_reduction_count,
        max_intermediate_bits: report.stats.max_intermediate_bits,
        step1_ms: report.step1.as_secs_f64() * 1e3,
        step2_ms: report.step2.as_secs_f64() * 1e3,
        verified,
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DecideReportFile {
    pub exists: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detected_rank: Option<usize>,
    pub tau_log2: f64,
    pub max_jump_log2: f64,
    pub jump_index: usize,
    pub ratios_log2: Vec<f64>,
    pub reduced_norms_sq: Vec<String>,
}

pub fn verdict_to_file(v: &DhlpVerdict) -> DecideReportFile {
    DecideReportFile {
        exists: v.exists,
        detected_rank: v.detected_rank,
        tau_log2: v.profile.tau_log2.unwrap_or(f64::NAN),
        max_jump_log2: v.profile.max_jump_log2,
        jump_index: v.profile.jump_index,
        ratios_log2: v.profile.ratios_log2.clone(),
        reduced_norms_sq: v.profile.norms_sq.iter().map(|x| x.to_string()).collect(),
    }
}

/// Machine-readable error envelope printed on nonzero exit.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ErrorFile {
    pub error: String,
    pub message: String,
}

impl ErrorFile {
    pub fn new(code: &str, message: impl std::fmt::Display) -> Self {
        Self {
            error: code.into(),
            message: message.to_string(),
        }
    }
}

/// One CSV row per (instance, algorithm) run in the experiment suites.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentRow {
    pub suite: String,
    pub n: usize,
    pub m: usize,
    pub r: usize,
    pub log_n: f64,
    pub log_mu: f64,
    pub seed: u64,
    pub algo: String,
    pub success: Option<bool>,
    pub sigma_out_log2: f64,
    pub g_gap_log2: f64,
    pub step1_ms: f64,
    pub step2_ms: f64,
}

pub const CSV_HEADER: &str =
    "suite,n,m,r,log_n,log_mu,seed,algo,success,sigma_out_log2,g_gap_log2,step1_ms,step2_ms";

impl ExperimentRow {
    pub fn csv_line(&self) -> String {
        format!(
            "{},{},{},{},{:.3},{:.3},{},{},{},{:.3},{:.3},{:.1},{:.1}",
            self.suite,
            self.n,
            self.m,
            self.r,
            self.log_n,
            self.log_mu,
            self.seed,
            self.algo,
            match self.success {
                Some(true) => "1",
                Some(false) => "0",
                None => "",
            },
            self.sigma_out_log2,
            self.g_gap_log2,
            self.step1_ms,
            self.step2_ms,
        )
    }
}

pub fn algorithm_from_str(s: &str) -> Result<Algorithm, IoError> {
    match s {
        "I" | "i" | "orth" | "orthogonal" => Ok(Algorithm::Orthogonal),
        "II" | "ii" | "cong" | "congruence" => Ok(Algorithm::Congruence),
        other => Err(IoError::BadKind(other.into())),
    }
}
