//! Regime classification from a finite stretch of a family sequence.

use num_traits::{Signed, Zero};

use super::{LimitKind, LimitRegime};
use crate::error::{Error, Result};
use crate::params::{intersection_array, ClassicalParams};
use crate::qseries::{int, to_f64, Rational};

/// One member of a family sequence together with its Gibbs parameter.
pub type Sample = (ClassicalParams, Rational);

/// Observed sequences along one parity subnet.
#[derive(Debug, Clone, PartialEq)]
pub struct SubnetDiagnostics {
    /// `Some(0)` for even diameters, `Some(1)` for odd, `None` when the
    /// parities were not separated.
    pub parity: Option<u32>,
    pub d: Vec<u32>,
    pub t_sqrt_k: Vec<f64>,
    pub beta_over_sqrt_k: Vec<f64>,
    /// `c = floor(log_|b| sqrt(k))`, computed exactly.
    pub c: Vec<i64>,
    pub sqrt_k_over_bc: Vec<f64>,
}

/// Classification result: one regime per subnet.
#[derive(Debug, Clone, PartialEq)]
pub struct RegimeReport {
    pub subnets: Vec<(LimitRegime, SubnetDiagnostics)>,
    /// True when `beta/sqrt(k)` has different limits along even and odd diameters.
    pub split: bool,
}

impl RegimeReport {
    /// The regime of the subnet containing diameter `d`.
    pub fn regime_for(&self, d: u32) -> &LimitRegime {
        self.subnets
            .iter()
            .find(|(_, diag)| diag.parity.is_none_or(|p| p == d % 2))
            .map(|(r, _)| r)
            .unwrap_or(&self.subnets[0].0)
    }
}

/// Aitken delta-squared estimate of the limit from the last three terms;
/// falls back to the last term when fewer are available or the second
/// difference vanishes.
fn extrapolate(xs: &[f64]) -> f64 {
    let n = xs.len();
    if n < 3 {
        return *xs.last().unwrap_or(&f64::NAN);
    }
    let (a, b, c) = (xs[n - 3], xs[n - 2], xs[n - 1]);
    let den = c - 2.0 * b + a;
    let scale = a.abs().max(b.abs()).max(c.abs()).max(1e-300);
    if den.abs() <= 1e-14 * scale {
        return c;
    }
    let est = c - (c - b) * (c - b) / den;
    if est.is_finite() {
        est
    } else {
        c
    }
}

/// Largest `c >= 0` with `|b|^(2c) <= k`.
fn exact_c(k: &Rational, b: i64) -> i64 {
    let b2 = int(b * b);
    let mut p = b2.clone();
    let mut c = 0;
    while &p <= k {
        c += 1;
        p *= &b2;
    }
    c
}

fn diagnostics(samples: &[&Sample], parity: Option<u32>) -> Result<SubnetDiagnostics> {
    let mut diag = SubnetDiagnostics {
        parity,
        d: vec![],
        t_sqrt_k: vec![],
        beta_over_sqrt_k: vec![],
        c: vec![],
        sqrt_k_over_bc: vec![],
    };
    for (cp, t) in samples {
        let ia = intersection_array(cp)?;
        let one = Rational::from_integer(1.into());
        let variance = &ia.k * (&one - t) * (&one + t + t * &ia.a_seq[1]);
        if !variance.is_positive() {
            return Err(Error::NonPositiveVariance(format!("variance {variance} at d = {}", cp.d())));
        }
        let sk = to_f64(&ia.k).sqrt();
        let c = exact_c(&ia.k, cp.b());
        diag.d.push(cp.d());
        diag.t_sqrt_k.push(to_f64(t) * sk);
        diag.beta_over_sqrt_k.push(to_f64(cp.beta()) / sk);
        diag.c.push(c);
        diag.sqrt_k_over_bc.push(sk / (cp.b().unsigned_abs() as f64).powi(c as i32));
    }
    Ok(diag)
}

/// An extrapolated `beta/sqrt(k)` below this fraction of the largest observed
/// value is treated as converging to 0.
const RHO_ZERO: f64 = 1e-3;

fn regime_from(diag: &SubnetDiagnostics, b: i64, alpha: &Rational, all_t_zero: bool) -> Result<LimitRegime> {
    let gamma = if all_t_zero {
        0.0
    } else {
        let g = extrapolate(&diag.t_sqrt_k);
        if g.abs() < 1e-12 {
            0.0
        } else {
            g
        }
    };
    let l = extrapolate(&diag.beta_over_sqrt_k);
    if alpha.is_zero() {
        let scale = diag.beta_over_sqrt_k.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        if l.abs() < RHO_ZERO * scale {
            if b < 0 {
                return Err(Error::InvalidParameters("alpha = 0 with beta/sqrt(k) -> 0 requires b > 0".into()));
            }
            let eta = ((b - 1) as f64).sqrt() * extrapolate(&diag.sqrt_k_over_bc);
            LimitRegime::new(LimitKind::CaseII, b, alpha.clone(), gamma, 0.0, Some(eta))
        } else {
            LimitRegime::new(LimitKind::CaseII, b, alpha.clone(), gamma, l.abs(), None)
        }
    } else if b > 0 {
        LimitRegime::new(LimitKind::CaseIRho, b, alpha.clone(), gamma, l, None)
    } else {
        let rho = (-to_f64(alpha)).sqrt();
        let kind = if l > 0.0 { LimitKind::CaseIRho } else { LimitKind::CaseIAlphaOverRho };
        if (l.abs() - rho).abs() > 1e-3 * rho {
            return Err(Error::Consistency(format!("beta/sqrt(k) tends to {l}, expected +-sqrt(-alpha) = +-{rho}")));
        }
        LimitRegime::new(kind, b, alpha.clone(), gamma, rho, None)
    }
}

/// Estimates `gamma = lim t sqrt(k)`, `rho` (or `eta`) and the regime kind
/// from samples ordered by increasing diameter. When `beta/sqrt(k)` has
/// different limits along even and odd diameters, one regime per parity
/// subnet is returned.
pub fn classify(samples: &[Sample]) -> Result<RegimeReport> {
    let Some((last, _)) = samples.last() else {
        return Err(Error::InvalidParameters("no samples to classify".into()));
    };
    let (b, alpha) = (last.b(), last.alpha().clone());
    let tail = &samples[samples.len().saturating_sub(3)..];
    if tail.iter().any(|(cp, _)| cp.b() != b || cp.alpha() != &alpha) {
        return Err(Error::InvalidParameters("b and alpha are not constant along the tail of the sequence".into()));
    }
    if samples.windows(2).any(|w| w[0].0.d() >= w[1].0.d()) {
        return Err(Error::InvalidParameters("samples must have strictly increasing diameter".into()));
    }
    let all_t_zero = samples.iter().all(|(_, t)| t.is_zero());

    let mut per_parity = vec![];
    for p in [0u32, 1] {
        let sub: Vec<&Sample> = samples.iter().filter(|(cp, _)| cp.d() % 2 == p).collect();
        if !sub.is_empty() {
            let diag = diagnostics(&sub, Some(p))?;
            let regime = regime_from(&diag, b, &alpha, all_t_zero)?;
            per_parity.push((regime, diag));
        }
    }
    let split = per_parity.len() == 2 && {
        let (r0, r1) = (&per_parity[0].0, &per_parity[1].0);
        let differ = |x: f64, y: f64| (x - y).abs() > 1e-6 * x.abs().max(y.abs()).max(1.0);
        r0.kind != r1.kind
            || differ(r0.rho, r1.rho)
            || differ(r0.gamma, r1.gamma)
            || match (r0.eta, r1.eta) {
                (Some(x), Some(y)) => differ(x, y),
                _ => false,
            }
    };
    if split {
        return Ok(RegimeReport { subnets: per_parity, split });
    }
    let all: Vec<&Sample> = samples.iter().collect();
    let diag = diagnostics(&all, None)?;
    let last_parity = last.d() % 2;
    let regime = per_parity
        .into_iter()
        .find(|(_, d)| d.parity == Some(last_parity))
        .map(|(r, _)| r)
        .expect("the last sample's parity is present");
    Ok(RegimeReport { subnets: vec![(regime, diag)], split })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qseries::{gauss_bracket, pow};

    fn grassmann(q: i64, n: u32, d: u32) -> ClassicalParams {
        ClassicalParams::new(d, q, int(q), int(q) * gauss_bracket(n - d, q)).unwrap()
    }

    #[test]
    fn grassmann_schedule() {
        let samples: Vec<Sample> = (4..=12).map(|d| (grassmann(2, 2 * d + 1, d), pow(&int(2), -(d as i64)))).collect();
        let report = classify(&samples).unwrap();
        assert!(!report.split);
        let r = &report.subnets[0].0;
        assert_eq!(r.kind, LimitKind::CaseIRho);
        assert!((r.gamma - 2.0).abs() < 1e-4, "gamma {}", r.gamma);
        assert!((r.rho - 2.0).abs() < 1e-4, "rho {}", r.rho);
    }

    #[test]
    fn dual_polar_vacuum() {
        let samples: Vec<Sample> =
            (4..=14).map(|d| (ClassicalParams::new(d, 2, int(0), int(2)).unwrap(), int(0))).collect();
        let report = classify(&samples).unwrap();
        assert!(report.split);
        for (r, diag) in &report.subnets {
            assert_eq!(r.kind, LimitKind::CaseII);
            assert_eq!(r.gamma, 0.0);
            assert_eq!(r.rho, 0.0);
            let eta = r.eta.unwrap();
            let expected = if diag.parity == Some(0) { 2f64.sqrt() } else { 2.0 };
            assert!((eta - expected).abs() < 1e-4, "parity {:?}: eta {eta}", diag.parity);
        }
    }

    #[test]
    fn inconsistent_tail_is_rejected() {
        let samples: Vec<Sample> =
            vec![(grassmann(2, 9, 4), int(0)), (grassmann(3, 11, 5), int(0)), (grassmann(2, 13, 6), int(0))];
        assert!(classify(&samples).is_err());
        assert!(classify(&[]).is_err());
    }

    #[test]
    fn hermitian_forms_parities() {
        let her = |d: u32| {
            let r = 2i64;
            let mr = int(-r);
            ClassicalParams::new(d, -r, int(-r - 1), -pow(&mr, d as i64) - int(1)).unwrap()
        };
        let samples: Vec<Sample> = (4..=12).map(|d| (her(d), int(0))).collect();
        let report = classify(&samples).unwrap();
        assert!(report.split);
        assert_eq!(report.regime_for(4).kind, LimitKind::CaseIAlphaOverRho);
        assert_eq!(report.regime_for(5).kind, LimitKind::CaseIRho);
        assert!((report.regime_for(5).rho - 3f64.sqrt()).abs() < 1e-12);
    }
}
