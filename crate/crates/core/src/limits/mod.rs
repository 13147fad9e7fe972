//! Limit layer: regime classification of a family sequence and the limiting
//! discrete measures `mu_infinity` of the normalized adjacency matrix.

mod closed_form;
mod logval;
mod measures;
mod regime;

pub use closed_form::{family_closed_form, Preset};
pub use measures::{
    lebesgue_check, measure_case_alpha_over_rho, measure_case_rho_pos, measure_case_rho_zero, normalize_eta,
    regime_measure,
};
pub use regime::{classify, RegimeReport, Sample, SubnetDiagnostics};

use crate::error::{Error, Result};
use crate::qseries::{to_f64, Rational};

/// Trichotomy of the classification theorem.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LimitKind {
    /// `alpha != 0` (or `alpha = 0` with `rho > 0`), `beta/sqrt(k) -> rho`.
    CaseIRho,
    /// `alpha != 0`, `beta/sqrt(k) -> alpha/rho`.
    CaseIAlphaOverRho,
    /// `alpha = 0`.
    CaseII,
}

impl LimitKind {
    pub fn as_str(self) -> &'static str {
        match self {
            LimitKind::CaseIRho => "case_i_rho",
            LimitKind::CaseIAlphaOverRho => "case_i_alpha_over_rho",
            LimitKind::CaseII => "case_ii",
        }
    }
}

/// Data determining a limit measure and the limit Fock coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct LimitRegime {
    pub kind: LimitKind,
    pub b: i64,
    pub alpha: Rational,
    /// Limit of `t sqrt(k)`.
    pub gamma: f64,
    pub rho: f64,
    /// Accumulation point of `sqrt(k (b-1))/b^c`; set only when `rho = 0`.
    pub eta: Option<f64>,
}

impl LimitRegime {
    pub fn new(kind: LimitKind, b: i64, alpha: Rational, gamma: f64, rho: f64, eta: Option<f64>) -> Result<Self> {
        let r = Self { kind, b, alpha, gamma, rho, eta };
        r.validate()?;
        Ok(r)
    }

    fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameters(msg));
        if self.b == 0 || self.b == -1 || self.b == 1 {
            return bad(format!("base {} not allowed in a limit regime", self.b));
        }
        if !(self.gamma.is_finite() && self.rho.is_finite() && self.rho >= 0.0) {
            return bad(format!("need finite gamma and rho >= 0, got gamma = {}, rho = {}", self.gamma, self.rho));
        }
        let alpha = self.alpha_f64();
        match self.kind {
            LimitKind::CaseIRho | LimitKind::CaseIAlphaOverRho if self.rho <= 0.0 => {
                return bad("case (i) requires rho > 0".into());
            }
            LimitKind::CaseIAlphaOverRho if alpha == 0.0 => {
                return bad("the alpha/rho branch requires alpha != 0".into());
            }
            LimitKind::CaseII if alpha != 0.0 => return bad("case (ii) requires alpha = 0".into()),
            LimitKind::CaseII if self.rho == 0.0 => match self.eta {
                Some(eta) if eta > 0.0 && eta.is_finite() => {}
                _ => return bad("case (ii) with rho = 0 requires eta > 0".into()),
            },
            _ => {}
        }
        if self.b < 0 && self.kind != LimitKind::CaseII {
            let expect = (-alpha).sqrt();
            if !(alpha < 0.0 && (self.rho - expect).abs() <= 1e-12 * expect.max(1.0)) {
                return bad(format!("negative base forces rho = sqrt(-alpha), got rho = {}", self.rho));
            }
        }
        let norm = self.normalizer();
        if !(norm > 0.0) {
            return Err(Error::NonPositiveVariance(format!("1 + gamma sigma = {norm}")));
        }
        Ok(())
    }

    pub fn alpha_f64(&self) -> f64 {
        to_f64(&self.alpha)
    }

    /// `rho + alpha/rho` with `0/0 := 0`.
    pub fn sigma(&self) -> f64 {
        if self.rho == 0.0 {
            0.0
        } else {
            self.rho + self.alpha_f64() / self.rho
        }
    }

    /// `1 + gamma sigma`, the limit of `Sigma_t^2(A)/k`.
    pub fn normalizer(&self) -> f64 {
        1.0 + self.gamma * self.sigma()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qseries::int;

    #[test]
    fn regime_invariants() {
        let r = LimitRegime::new(LimitKind::CaseIRho, 2, int(2), 2.0, 2.0, None).unwrap();
        assert_eq!(r.sigma(), 3.0);
        assert_eq!(r.normalizer(), 7.0);
        assert!(LimitRegime::new(LimitKind::CaseIRho, 2, int(2), 0.0, 0.0, None).is_err());
        assert!(LimitRegime::new(LimitKind::CaseII, 2, int(0), 0.0, 0.0, None).is_err());
        assert!(LimitRegime::new(LimitKind::CaseII, 2, int(0), 1.0, 0.0, Some(2.0)).is_ok());
        assert!(LimitRegime::new(LimitKind::CaseIAlphaOverRho, 2, int(0), 1.0, 1.0, None).is_err());
        // b < 0 pins rho to sqrt(-alpha)
        assert!(LimitRegime::new(LimitKind::CaseIRho, -2, int(-3), 0.0, 3f64.sqrt(), None).is_ok());
        assert!(LimitRegime::new(LimitKind::CaseIRho, -2, int(-3), 0.0, 1.5, None).is_err());
        // normalizer must stay positive
        assert!(matches!(
            LimitRegime::new(LimitKind::CaseIRho, 2, int(2), -1.0, 2.0, None),
            Err(Error::NonPositiveVariance(_))
        ));
    }
}
