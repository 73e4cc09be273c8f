//! Closed-form parameter bounds: heuristic log N thresholds for both
//! algorithms, the density invariant, proven counting thresholds for r = 1,
//! and reduction cost estimates. Logs are base 2 throughout.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum BoundsError {
    #[error("parameter out of range: {0}")]
    ParamOutOfRange(String),
}

/// gamma_n policy: the proven bound (2/3)n, or the heuristic n/(2 pi e).
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum HermiteMode {
    #[default]
    UpperBoundTwoThirdsN,
    GaussianHeuristic,
}

pub fn gamma_n(mode: HermiteMode, n: usize) -> f64 {
    match mode {
        HermiteMode::UpperBoundTwoThirdsN => {
            if n >= 2 {
                2.0 * n as f64 / 3.0
            } else {
                1.0
            }
        }
        HermiteMode::GaussianHeuristic => {
            n as f64 / (2.0 * std::f64::consts::PI * std::f64::consts::E)
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AnalysisParams {
    pub n: usize,
    pub m: usize,
    pub r: usize,
    /// log2 of the size bound mu.
    pub log_mu: f64,
    /// log2 of the root Hermite factor; 0.03 matches iota ~ 1.021 for LLL.
    pub log_iota: f64,
    /// Threshold constant >= 1 in the direct congruence analysis.
    pub theta: f64,
    /// Reduction parameter, for the proven bounds' c = 1/(delta - 1/4).
    pub delta: f64,
    /// Failure budget for the proven bounds.
    pub epsilon: f64,
    pub hermite_mode: HermiteMode,
    /// Drop the theta term of the congruence heuristic when it goes
    /// negative (it does for theta = 1 whenever n < m).
    pub clamp_negative_theta_term: bool,
}

impl AnalysisParams {
    pub fn new(n: usize, m: usize, r: usize, log_mu: f64) -> Self {
        Self {
            n,
            m,
            r,
            log_mu,
            log_iota: 0.03,
            theta: 1.0,
            delta: 0.99,
            epsilon: 0.5,
            hermite_mode: HermiteMode::default(),
            clamp_negative_theta_term: true,
        }
    }

    pub fn validate(&self) -> Result<(), BoundsError> {
        if !(1 <= self.r && self.r <= self.n && self.n < self.m) {
            return Err(BoundsError::ParamOutOfRange(format!(
                "need 1 <= r <= n < m, got r={} n={} m={}",
                self.r, self.n, self.m
            )));
        }
        if self.theta < 1.0 {
            return Err(BoundsError::ParamOutOfRange("theta must be >= 1".into()));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(BoundsError::ParamOutOfRange(
                "epsilon must lie in (0,1)".into(),
            ));
        }
        if !(self.delta > 0.25 && self.delta < 1.0) {
            return Err(BoundsError::ParamOutOfRange(
                "delta must lie strictly inside (1/4, 1)".into(),
            ));
        }
        if self.log_mu < 0.0 {
            return Err(BoundsError::ParamOutOfRange("log_mu must be >= 0".into()));
        }
        Ok(())
    }

    fn dims(&self) -> (f64, f64, f64) {
        (self.n as f64, self.m as f64, self.r as f64)
    }

    pub fn log2_c(&self) -> f64 {
        (1.0 / (self.delta - 0.25)).log2()
    }
}

/// Heuristic sufficient log N for the orthogonal route:
/// (mn/(r(m-n))) log mu + (mn/r) log iota + (n/2r) log(m-n).
pub fn heuristic_log_n_orthogonal(p: &AnalysisParams) -> Result<f64, BoundsError> {
    p.validate()?;
    let (n, m, r) = p.dims();
    Ok(m * n / (r * (m - n)) * p.log_mu + m * n / r * p.log_iota + n / (2.0 * r) * (m - n).log2())
}

/// Heuristic sufficient log N for the congruence route (direct analysis):
/// (mn/(r(m-n))) log mu + (m/(m-n))(mn/r) log iota
/// + (mn/(r(m-n))) log(theta sqrt(n/m)), the last term clamped at zero when
/// negative (the condition already holds at theta = 1).
pub fn heuristic_log_n_congruence(p: &AnalysisParams) -> Result<f64, BoundsError> {
    p.validate()?;
    let (n, m, r) = p.dims();
    let coeff = m * n / (r * (m - n));
    let mut theta_term = coeff * (p.theta * (n / m).sqrt()).log2();
    if p.clamp_negative_theta_term && theta_term < 0.0 {
        theta_term = 0.0;
    }
    Ok(coeff * p.log_mu + m / (m - n) * (m * n / r) * p.log_iota + theta_term)
}

/// Congruence-route heuristic derived through the norm lower bound instead
/// of the direct gap condition:
/// (mn/(r(m-n))) log mu + (mn/r) log iota + (n/2r) log n
/// + (n/2r) log(m^m / n^n) - (n(m-n)/2r) log(2 pi e).
pub fn heuristic_log_n_congruence_minkowski(p: &AnalysisParams) -> Result<f64, BoundsError> {
    p.validate()?;
    let (n, m, r) = p.dims();
    let log_2pie = (2.0 * std::f64::consts::PI * std::f64::consts::E).log2();
    Ok(m * n / (r * (m - n)) * p.log_mu
        + m * n / r * p.log_iota
        + n / (2.0 * r) * n.log2()
        + n / (2.0 * r) * (m * m.log2() - n * n.log2())
        - n * (m - n) / (2.0 * r) * log_2pie)
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct DensityTriple {
    /// Delta = (r/n) log N - (m/(m-n)) log mu; larger means easier.
    pub delta: f64,
    pub delta_i: f64,
    pub delta_ii: f64,
}

/// The density-style invariant and the per-algorithm offsets it is compared
/// against: the problem is heuristically solvable when delta > delta_*.
pub fn density_delta(p: &AnalysisParams, log_n: f64) -> Result<DensityTriple, BoundsError> {
    p.validate()?;
    let (n, m, r) = p.dims();
    let delta = r / n * log_n - m / (m - n) * p.log_mu;
    let delta_i = m * p.log_iota + 0.5 * (m - n).log2();
    let delta_ii = m * m / (m - n) * p.log_iota + m / (m - n) * (p.theta * (n / m).sqrt()).log2();
    Ok(DensityTriple {
        delta,
        delta_i,
        delta_ii,
    })
}

fn validate_proven(n: usize, m: usize, mu_log2: f64, delta: f64) -> Result<(), BoundsError> {
    if n < 3 || m <= n {
        return Err(BoundsError::ParamOutOfRange(format!(
            "proven bounds need m > n >= 3, got n={n} m={m}"
        )));
    }
    if mu_log2 < 0.0 {
        return Err(BoundsError::ParamOutOfRange("mu must be >= 1".into()));
    }
    if !(delta > 0.25 && delta < 1.0) {
        return Err(BoundsError::ParamOutOfRange(
            "delta must lie strictly inside (1/4, 1)".into(),
        ));
    }
    Ok(())
}

/// Proven counting threshold for the orthogonal route (r = 1): the bound on
/// log(N epsilon) above which at least a (1 - epsilon) fraction of rank-1
/// problems from the sample space are solved:
/// (mn/2) log c + n(n+1) log mu + (n(m-n)/2) log((2/3)(m-n)) + n log(3 sqrt n) + 1.
pub fn proven_log_n_eps_orthogonal(
    n: usize,
    m: usize,
    log_mu: f64,
    delta: f64,
) -> Result<f64, BoundsError> {
    validate_proven(n, m, log_mu, delta)?;
    let log_c = (1.0 / (delta - 0.25)).log2();
    let (nf, mf) = (n as f64, m as f64);
    Ok(mf * nf / 2.0 * log_c
        + nf * (nf + 1.0) * log_mu
        + nf * (mf - nf) / 2.0 * (2.0 / 3.0 * (mf - nf)).log2()
        + nf * (3.0 * nf.sqrt()).log2()
        + 1.0)
}

/// Proven counting threshold for the congruence route (r = 1):
/// (mn/2) log c + n(n+2) log mu + n log(3 n^2) + 1.
pub fn proven_log_n_eps_congruence(
    n: usize,
    m: usize,
    log_mu: f64,
    delta: f64,
) -> Result<f64, BoundsError> {
    validate_proven(n, m, log_mu, delta)?;
    let log_c = (1.0 / (delta - 0.25)).log2();
    let (nf, mf) = (n as f64, m as f64);
    Ok(mf * nf / 2.0 * log_c + nf * (nf + 2.0) * log_mu + nf * (3.0 * nf * nf).log2() + 1.0)
}

/// k_eps = (1/3) (6 eps / pi^2)^(1/n) N^(1/n): the first-minimum floor of the
/// scalar orthogonal lattice holding for a (1-eps) fraction of coefficients.
pub fn k_epsilon(n: usize, log_n: f64, epsilon: f64) -> f64 {
    let nf = n as f64;
    let base = 6.0 * epsilon / (std::f64::consts::PI * std::f64::consts::PI);
    (1.0 / 3.0) * base.powf(1.0 / nf) * (log_n / nf).exp2()
}

/// l_eps = 3 n (pi^2 / (6 eps))^(1/n) N^(1 - 1/n): the matching ceiling on
/// the last minimum of the scalar congruence lattice.
pub fn l_epsilon(n: usize, log_n: f64, epsilon: f64) -> f64 {
    let nf = n as f64;
    let base = std::f64::consts::PI * std::f64::consts::PI / (6.0 * epsilon);
    3.0 * nf * base.powf(1.0 / nf) * (log_n * (1.0 - 1.0 / nf)).exp2()
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct CostEstimates {
    /// log2 bit operations of the L^2 reduction on the orthogonal basis
    /// (m^6 L + m^5 L^2 with L = log(sqrt(r) N), unit constants).
    pub cost_i_log2: f64,
    /// Same for the congruence basis, with L = log(sqrt(m-r) N).
    pub cost_ii_log2: f64,
    /// Heuristic BKZ exponent mn/(r log N): reaching the needed root Hermite
    /// factor costs time at least 2^Theta(this).
    pub bkz_exponent: f64,
}

pub fn cost_estimates(n: usize, m: usize, r: usize, n_bits: f64) -> CostEstimates {
    let (mf, rf) = (m as f64, r as f64);
    let poly = |l: f64| (mf.powi(6) * l + mf.powi(5) * l * l).log2();
    let l_i = n_bits + 0.5 * rf.log2();
    let l_ii = n_bits + 0.5 * (mf - rf).log2();
    CostEstimates {
        cost_i_log2: poly(l_i),
        cost_ii_log2: poly(l_ii),
        bkz_exponent: mf * n as f64 / (rf * n_bits),
    }
}

/// Expected reduced-norm gap of a random (non-planted) instance:
/// log2 of sqrt(m/(2 pi e))^(2n-m) * N^(r(2n-m)/m).
pub fn gaps_heuristic_log2(n: usize, m: usize, r: usize, log_n: f64) -> f64 {
    let (nf, mf, rf) = (n as f64, m as f64, r as f64);
    let log_gh = 0.5 * (mf / (2.0 * std::f64::consts::PI * std::f64::consts::E)).log2();
    (2.0 * nf - mf) * log_gh + rf * (2.0 * nf - mf) / mf * log_n
}

/// Planted-instance gap floor: log2 of gamma^-(m-n) N^r / mu^(2n) with
/// gamma = (2/3)(m-n), valid when Vol(M^perp_N) = N^r.
pub fn gap_lower_bound_log2(n: usize, m: usize, r: usize, log_n: f64, log_mu: f64) -> f64 {
    let (nf, mf, rf) = (n as f64, m as f64, r as f64);
    let gamma = 2.0 / 3.0 * (mf - nf);
    -(mf - nf) * gamma.log2() + rf * log_n - 2.0 * nf * log_mu
}

/// Everything the `bounds` command reports.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BoundReport {
    pub heuristic_i_bits: f64,
    pub heuristic_ii_bits: f64,
    pub heuristic_ii_minkowski_bits: f64,
    pub proven_i_bits: Option<f64>,
    pub proven_ii_bits: Option<f64>,
    pub delta_density: Option<f64>,
    pub delta_i: f64,
    pub delta_ii: f64,
    pub k_epsilon: Option<f64>,
    pub l_epsilon: Option<f64>,
    pub cost_i_log2: Option<f64>,
    pub cost_ii_log2: Option<f64>,
    pub bkz_exponent: Option<f64>,
}

/// Evaluate every bound at once; log_n enables the density, diagnostic and
/// cost fields. The proven fields are None outside their n >= 3 domain.
pub fn evaluate(p: &AnalysisParams, log_n: Option<f64>) -> Result<BoundReport, BoundsError> {
    p.validate()?;
    let heuristic_i_bits = heuristic_log_n_orthogonal(p)?;
    let heuristic_ii_bits = heuristic_log_n_congruence(p)?;
    let heuristic_ii_minkowski_bits = heuristic_log_n_congruence_minkowski(p)?;
    let proven_i_bits = proven_log_n_eps_orthogonal(p.n, p.m, p.log_mu, p.delta).ok();
    let proven_ii_bits = proven_log_n_eps_congruence(p.n, p.m, p.log_mu, p.delta).ok();
    let densities = density_delta(p, log_n.unwrap_or(0.0))?;
    let (delta_density, k_eps, l_eps, costs) = match log_n {
        Some(bits) => {
            let c = cost_estimates(p.n, p.m, p.r, bits);
            (
                Some(densities.delta),
                Some(k_epsilon(p.n, bits, p.epsilon)),
                Some(l_epsilon(p.n, bits, p.epsilon)),
                Some(c),
            )
        }
        None => (None, None, None, None),
    };
    Ok(BoundReport {
        heuristic_i_bits,
        heuristic_ii_bits,
        heuristic_ii_minkowski_bits,
        proven_i_bits,
        proven_ii_bits,
        delta_density,
        delta_i: densities.delta_i,
        delta_ii: densities.delta_ii,
        k_epsilon: k_eps,
        l_epsilon: l_eps,
        cost_i_log2: costs.map(|c| c.cost_i_log2),
        cost_ii_log2: costs.map(|c| c.cost_ii_log2),
        bkz_exponent: costs.map(|c| c.bkz_exponent),
    })
}
