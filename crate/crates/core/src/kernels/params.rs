use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Case {
    /// α < 0: one Helmholtz factor and one Schrödinger factor.
    NegAlpha,
    /// α > 0, β < −2√α: two Helmholtz factors.
    TwoHelmholtz,
    /// α = 0, β < 0: Helmholtz times Laplacian (N ≥ 3).
    ZeroAlpha,
}

/// Coefficient Γ of the nonlinearity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum GammaSpec {
    Constant(f64),
    /// Samples on the computational grid (row-major, one value per grid point).
    Grid(Vec<f64>),
}

impl GammaSpec {
    pub fn infimum(&self) -> f64 {
        match self {
            GammaSpec::Constant(c) => *c,
            GammaSpec::Grid(v) => v.iter().cloned().fold(f64::INFINITY, f64::min),
        }
    }

    pub fn supremum(&self) -> f64 {
        match self {
            GammaSpec::Constant(c) => *c,
            GammaSpec::Grid(v) => v.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
        }
    }

    /// Value at flat grid index `idx`.
    pub fn at(&self, idx: usize) -> f64 {
        match self {
            GammaSpec::Constant(c) => *c,
            GammaSpec::Grid(v) => v[idx],
        }
    }
}

/// Roots of s² + βs + α = 0 ordered a1 > a2, with the case tag.
///
/// The operator Δ² − βΔ + α factors as (−Δ − a1)(−Δ − a2).
pub fn split_roots(alpha: f64, beta: f64) -> Result<(f64, f64, Case)> {
    if !alpha.is_finite() || !beta.is_finite() {
        return Err(Error::ParamsOutsideA1("non-finite coefficients".into()));
    }
    let case = if alpha < 0.0 {
        Case::NegAlpha
    } else if alpha > 0.0 {
        if beta < -2.0 * alpha.sqrt() {
            Case::TwoHelmholtz
        } else {
            return Err(Error::ParamsOutsideA1(format!(
                "alpha = {alpha} > 0 requires beta < -2 sqrt(alpha) = {}, got beta = {beta}",
                -2.0 * alpha.sqrt()
            )));
        }
    } else if beta < 0.0 {
        Case::ZeroAlpha
    } else {
        return Err(Error::ParamsOutsideA1(format!("alpha = 0 requires beta < 0, got beta = {beta}")));
    };
    if case == Case::ZeroAlpha {
        return Ok((-beta, 0.0, case));
    }
    let d = (beta * beta - 4.0 * alpha).sqrt();
    // avoid cancellation in the smaller root
    let (a1, a2) = if beta <= 0.0 {
        let a1 = (-beta + d) / 2.0;
        (a1, alpha / a1)
    } else {
        let a2 = (-beta - d) / 2.0;
        (alpha / a2, a2)
    };
    Ok((a1, a2, case))
}

/// Admissible open interval for p in dimension N.
pub fn p_range(dim: usize) -> (f64, f64) {
    let n = dim as f64;
    let lo = 2.0 * (n + 1.0) / (n - 1.0);
    let hi = if dim > 4 { 2.0 * n / (n - 4.0) } else { f64::INFINITY };
    (lo, hi)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemParams {
    pub alpha: f64,
    pub beta: f64,
    pub p: f64,
    pub dim: usize,
    pub gamma: GammaSpec,
    pub a1: f64,
    pub a2: f64,
    pub case: Case,
}

impl ProblemParams {
    pub fn new(alpha: f64, beta: f64, p: f64, dim: usize, gamma: GammaSpec) -> Result<Self> {
        let params = Self::linear(alpha, beta, dim)?;
        let (lo, hi) = p_range(dim);
        if !(p > lo && p < hi) {
            return Err(Error::ExponentOutsideRange { p, lo, hi });
        }
        if !(gamma.infimum() > 0.0) || !gamma.supremum().is_finite() {
            return Err(Error::ParamsOutsideA1("Gamma must be bounded with strictly positive infimum".into()));
        }
        Ok(Self { p, gamma, ..params })
    }

    /// Parameters for the linear operator only; p and Γ are placeholders
    /// (p at the midpoint of its range, Γ = 1) and are not validated.
    pub fn linear(alpha: f64, beta: f64, dim: usize) -> Result<Self> {
        if dim < 2 {
            return Err(Error::ParamsOutsideA1(format!("dimension {dim} < 2")));
        }
        let (a1, a2, case) = split_roots(alpha, beta)?;
        if case == Case::ZeroAlpha && dim < 3 {
            return Err(Error::ParamsOutsideA1("alpha = 0 requires N >= 3".into()));
        }
        let (lo, hi) = p_range(dim);
        let p = if hi.is_finite() { 0.5 * (lo + hi) } else { lo + 1.0 };
        Ok(Self { alpha, beta, p, dim, gamma: GammaSpec::Constant(1.0), a1, a2, case })
    }

    /// √(β² − 4α) = a1 − a2.
    pub fn disc(&self) -> f64 {
        (self.beta * self.beta - 4.0 * self.alpha).sqrt()
    }

    /// Conjugate exponent p′ = p/(p − 1).
    pub fn p_conj(&self) -> f64 {
        self.p / (self.p - 1.0)
    }

    /// Symbol |ξ|⁴ + β|ξ|² + α of the operator at |ξ|² = s.
    pub fn symbol(&self, s: f64) -> f64 {
        s * s + self.beta * s + self.alpha
    }
}
