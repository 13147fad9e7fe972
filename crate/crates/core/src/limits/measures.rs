//! Generic limit measures: `beta/sqrt(k) -> rho > 0`, `beta/sqrt(k) -> alpha/rho`,
//! and `alpha = 0`, `beta/sqrt(k) -> 0`.
//!
//! Masses are assembled in sign/log form and only exponentiated at the end.

use super::logval::{self, LogVal};
use super::{LimitKind, LimitRegime};
use crate::error::{Error, Result};
use crate::gibbs::DiscreteMeasure;

fn bracket(j: i64, b: f64) -> f64 {
    (b.powi(j as i32) - 1.0) / (b - 1.0)
}

pub(crate) fn finish(index: Vec<i64>, atoms: Vec<f64>, masses: Vec<f64>) -> DiscreteMeasure {
    let total: f64 = masses.iter().sum();
    DiscreteMeasure {
        positivity: masses.iter().all(|&m| m >= 0.0),
        tail_bound: (1.0 - total).abs(),
        truncated: true,
        exact_masses: None,
        atoms,
        masses,
        index,
    }
}

fn nonzero(x: LogVal, what: &str) -> Result<LogVal> {
    if x.is_zero() {
        Err(Error::Infeasible(format!("vanishing denominator in {what}")))
    } else {
        Ok(x)
    }
}

/// Case-(i) limit with accumulation value `x` of `beta/sqrt(k)`, normalizer
/// `1 + gamma sigma`. The factor `1 - M/(x^2 b^(2j))` cancels against the
/// matching factor of `(M/(x^2 b^j); 1/b)_inf`, which removes the `0/0`
/// occurring when `M = x^2` at `j = 0`.
pub(crate) fn case_i_core(
    b: i64,
    alpha: f64,
    x: f64,
    gamma: f64,
    norm: f64,
    j_max: u32,
    eps: f64,
) -> Result<DiscreteMeasure> {
    let q = b as f64;
    let qi = 1.0 / q;
    let m = alpha + 1.0 - q;
    let root = norm.sqrt();
    let (mut index, mut atoms, mut masses) = (vec![], vec![], vec![]);
    for j in 0..=j_max as i64 {
        let bj = q.powi(j as i32);
        atoms.push((bracket(j, q) * (x - alpha / (x * bj)) - 1.0 / (x * bj) - gamma) / root);

        let den = nonzero(
            logval::poch_inf(m / (x * x * bj), qi, eps, Some(j as usize))?
                .mul(logval::poch(q, q, j as usize))
                .mul(LogVal::pow(x, 2 * j))
                .mul(LogVal::pow(q, j * j - j)),
            "the case (i) mass",
        )?;
        let part1 = logval::poch_inf(alpha / (x * x * bj * q), qi, eps, None)?
            .mul(logval::gen_poch(m, alpha, q, j as usize))
            .div(den);
        let prefactor = part1.mul(logval::poch_inf(gamma * (q - 1.0) / (x * bj * q), qi, eps, None)?);

        let mut mass = 0.0;
        for l in 0..=j as usize {
            let num = logval::poch(1.0 / bj, q, l)
                .mul(logval::poch(alpha / (x * x * bj), q, l))
                .mul(LogVal::pow(gamma * x * (q - 1.0), l as i64))
                .mul(LogVal::pow(q, j * l as i64));
            let den = nonzero(logval::gen_poch(m, alpha, q, l).mul(logval::poch(q, q, l)), "the case (i) series")?;
            mass += prefactor.mul(num).div(den).value();
        }
        index.push(j);
        masses.push(mass);
    }
    Ok(finish(index, atoms, masses))
}

/// Limit measure when `beta/sqrt(k) -> rho > 0` (case (i), or case (ii) with `rho > 0`).
pub fn measure_case_rho_pos(r: &LimitRegime, j_max: u32, eps: f64) -> Result<DiscreteMeasure> {
    if r.kind == LimitKind::CaseIAlphaOverRho || r.rho <= 0.0 {
        return Err(Error::InvalidParameters(format!(
            "{} with rho = {} is not a rho > 0 regime",
            r.kind.as_str(),
            r.rho
        )));
    }
    case_i_core(r.b, r.alpha_f64(), r.rho, r.gamma, r.normalizer(), j_max, eps)
}

/// Limit measure when `alpha != 0` and `beta/sqrt(k) -> alpha/rho`, written
/// out with `rho` in place (the `rho -> alpha/rho` substitution is performed
/// by hand, not by calling the `rho > 0` case).
pub fn measure_case_alpha_over_rho(r: &LimitRegime, j_max: u32, eps: f64) -> Result<DiscreteMeasure> {
    if r.kind != LimitKind::CaseIAlphaOverRho {
        return Err(Error::InvalidParameters(format!("{} is not the alpha/rho branch", r.kind.as_str())));
    }
    let q = r.b as f64;
    let qi = 1.0 / q;
    let alpha = r.alpha_f64();
    let rho = r.rho;
    let gamma = r.gamma;
    let m = alpha + 1.0 - q;
    let root = r.normalizer().sqrt();
    let (mut index, mut atoms, mut masses) = (vec![], vec![], vec![]);
    for j in 0..=j_max as i64 {
        let bj = q.powi(j as i32);
        atoms.push((bracket(j, q) * (alpha / rho - rho / bj) - rho / (alpha * bj) - gamma) / root);

        let den = nonzero(
            logval::poch_inf(m * rho * rho / (alpha * alpha * bj), qi, eps, Some(j as usize))?
                .mul(logval::poch(q, q, j as usize))
                .mul(LogVal::pow(alpha, 2 * j))
                .mul(LogVal::pow(q, j * j - j)),
            "the alpha/rho mass",
        )?;
        let part1 = logval::poch_inf(rho * rho / (alpha * bj * q), qi, eps, None)?
            .mul(logval::gen_poch(m, alpha, q, j as usize))
            .mul(LogVal::pow(rho, 2 * j))
            .div(den);
        let prefactor = part1.mul(logval::poch_inf(gamma * rho * (q - 1.0) / (alpha * bj * q), qi, eps, None)?);

        let mut mass = 0.0;
        for l in 0..=j as usize {
            let num = logval::poch(1.0 / bj, q, l)
                .mul(logval::poch(rho * rho / (alpha * bj), q, l))
                .mul(LogVal::pow(alpha * gamma * (q - 1.0) / rho, l as i64))
                .mul(LogVal::pow(q, j * l as i64));
            let den = nonzero(logval::gen_poch(m, alpha, q, l).mul(logval::poch(q, q, l)), "the alpha/rho series")?;
            mass += prefactor.mul(num).div(den).value();
        }
        index.push(j);
        masses.push(mass);
    }
    Ok(finish(index, atoms, masses))
}

/// Moves `eta` into `[sqrt(b-1), b sqrt(b-1)]` by powers of `b`. Returns the
/// normalized value and the shift `s` with `eta_normalized = eta b^s`; atom
/// `j` for `eta` is atom `j - s` for the normalized value.
pub fn normalize_eta(eta: f64, b: i64) -> (f64, i64) {
    let q = b as f64;
    let lo = (q - 1.0).sqrt();
    let hi = q * lo;
    let (mut e, mut s) = (eta, 0i64);
    while e < lo * (1.0 - 1e-14) {
        e *= q;
        s += 1;
    }
    while e > hi * (1.0 + 1e-14) {
        e /= q;
        s -= 1;
    }
    (e, s)
}

/// Limit measure when `alpha = 0` and `beta/sqrt(k) -> 0`; atoms indexed by
/// `j` in `[j_min, j_max]`, matching `theta_(c-j)` at finite diameter.
pub fn measure_case_rho_zero(r: &LimitRegime, j_min: i64, j_max: i64, eps: f64) -> Result<DiscreteMeasure> {
    if r.b <= 0 {
        return Err(Error::InvalidParameters(format!("the rho = 0 case needs b > 0, got {}", r.b)));
    }
    let eta0 = match (r.kind, r.eta) {
        (LimitKind::CaseII, Some(eta)) if r.rho == 0.0 => eta,
        _ => return Err(Error::InvalidParameters("the rho = 0 case needs kind case_ii with eta set".into())),
    };
    let (eta, shift) = normalize_eta(eta0, r.b);
    let q = r.b as f64;
    let qi = 1.0 / q;
    let sq = (q - 1.0).sqrt();
    let gamma = r.gamma;
    let constant = nonzero(
        logval::poch_inf(qi, qi, eps, None)?
            .mul(logval::poch_inf(-1.0 / (eta * eta), qi, eps, None)?)
            .mul(logval::poch_inf(-eta * eta / q, qi, eps, None)?),
        "the rho = 0 normalization",
    )?;
    let (mut index, mut atoms, mut masses) = (vec![], vec![], vec![]);
    for label in j_min..=j_max {
        let j = label - shift;
        let bj = q.powi(j as i32);
        atoms.push((eta * bj - 1.0 / (eta * bj)) / sq - gamma);
        let mass = LogVal::from(1.0 + 1.0 / (eta * eta * bj * bj))
            .mul(LogVal::pow(q, -2 * j * j + j))
            .div(constant)
            .div(LogVal::pow(eta, 4 * j))
            .mul(logval::poch_inf(gamma * sq / (eta * bj * q), qi, eps, None)?)
            .mul(logval::poch_inf(-gamma * eta * bj * sq / q, qi, eps, None)?);
        index.push(label);
        masses.push(mass.value());
    }
    Ok(finish(index, atoms, masses))
}

/// Dispatches to the measure matching `r.kind`. `j_min` is used only in the
/// `rho = 0` case, where atoms are indexed by all integers.
pub fn regime_measure(r: &LimitRegime, j_min: i64, j_max: i64, eps: f64) -> Result<DiscreteMeasure> {
    match r.kind {
        LimitKind::CaseII if r.rho == 0.0 => measure_case_rho_zero(r, j_min, j_max, eps),
        LimitKind::CaseIAlphaOverRho => measure_case_alpha_over_rho(r, j_max.max(0) as u32, eps),
        _ => measure_case_rho_pos(r, j_max.max(0) as u32, eps),
    }
}

/// `|(1/r; -1/r)_inf (-1/r; 1/r^2)_inf - 1| < tol`.
pub fn lebesgue_check(r: u32, tol: f64) -> Result<bool> {
    if r < 2 {
        return Err(Error::InvalidParameters(format!("need r >= 2, got {r}")));
    }
    let r = r as f64;
    let eps = (tol * 1e-2).max(1e-17);
    let a = crate::qseries::poch_inf(1.0 / r, -1.0 / r, eps)?;
    let b = crate::qseries::poch_inf(-1.0 / r, 1.0 / (r * r), eps)?;
    Ok((a.value * b.value - 1.0).abs() < tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gibbs::measure_moment;
    use crate::qseries::int;

    fn grassmann(gamma: f64) -> LimitRegime {
        LimitRegime::new(LimitKind::CaseIRho, 2, int(2), gamma, 2.0, None).unwrap()
    }

    #[test]
    fn grassmann_vacuum_values() {
        let mu = measure_case_rho_pos(&grassmann(0.0), 40, 1e-15).unwrap();
        let atoms = [-0.5, 1.25, 41.0 / 8.0];
        let masses = [0.75, 15.0 / 64.0, 63.0 / 4096.0];
        for j in 0..3 {
            assert!((mu.atoms[j] - atoms[j]).abs() < 1e-12, "atom {j}: {}", mu.atoms[j]);
            assert!((mu.masses[j] - masses[j]).abs() < 1e-12, "mass {j}: {}", mu.masses[j]);
        }
        assert!(mu.positivity);
        assert!((mu.total_mass() - 1.0).abs() < 1e-12);
        assert!(measure_moment(&mu, 1).abs() < 1e-10);
        assert!((measure_moment(&mu, 2) - 1.0).abs() < 1e-10);
    }

    #[test]
    fn grassmann_with_gamma() {
        let mu = measure_case_rho_pos(&grassmann(2.0), 40, 1e-15).unwrap();
        assert!((mu.total_mass() - 1.0).abs() < 1e-10);
        assert!(measure_moment(&mu, 1).abs() < 1e-8);
        assert!((measure_moment(&mu, 2) - 1.0).abs() < 1e-8);
        assert!(mu.positivity);
    }

    #[test]
    fn alpha_over_rho_is_substitution() {
        // b > 0: interchanging rho and alpha/rho
        for (b, alpha, rho, gamma) in
            [(2, int(2), 2.0, 0.7), (4, int(6), 5f64.sqrt(), 0.2), (3, int(2), 3f64.sqrt(), 0.0)]
        {
            let r = LimitRegime::new(LimitKind::CaseIAlphaOverRho, b, alpha.clone(), gamma, rho, None).unwrap();
            let lit = measure_case_alpha_over_rho(&r, 12, 1e-15).unwrap();
            let a = r.alpha_f64();
            let sub = case_i_core(b, a, a / rho, gamma, r.normalizer(), 12, 1e-15).unwrap();
            let swapped = LimitRegime::new(LimitKind::CaseIRho, b, alpha, gamma, a / rho, None).unwrap();
            let swapped = measure_case_rho_pos(&swapped, 12, 1e-15).unwrap();
            for j in 0..=12 {
                assert!((lit.atoms[j] - sub.atoms[j]).abs() < 1e-10);
                assert!((lit.masses[j] - sub.masses[j]).abs() < 1e-10);
                assert!((lit.atoms[j] - swapped.atoms[j]).abs() < 1e-10);
                assert!((lit.masses[j] - swapped.masses[j]).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn negative_base_alpha_over_rho() {
        // Hermitian forms r = 2, even-d branch
        let r = LimitRegime::new(LimitKind::CaseIAlphaOverRho, -2, int(-3), 0.3, 3f64.sqrt(), None).unwrap();
        let mu = measure_case_alpha_over_rho(&r, 40, 1e-15).unwrap();
        assert!((mu.total_mass() - 1.0).abs() < 1e-10);
        assert!(measure_moment(&mu, 1).abs() < 1e-8);
        assert!((measure_moment(&mu, 2) - 1.0).abs() < 1e-8);
    }

    #[test]
    fn rho_zero_vacuum_normalization() {
        let r = LimitRegime::new(LimitKind::CaseII, 2, int(0), 0.0, 0.0, Some(2f64.sqrt())).unwrap();
        let mu = measure_case_rho_zero(&r, -6, 8, 1e-15).unwrap();
        assert!((mu.total_mass() - 1.0).abs() < 1e-8);
        assert!(measure_moment(&mu, 1).abs() < 1e-6);
        assert!((measure_moment(&mu, 2) - 1.0).abs() < 1e-6);
        assert!(measure_case_rho_zero(&LimitRegime { b: -2, ..r.clone() }, 0, 1, 1e-15).is_err());
    }

    #[test]
    fn rho_zero_with_gamma_and_eta_shift() {
        let r = LimitRegime::new(LimitKind::CaseII, 3, int(0), 0.4, 0.0, Some(3.0)).unwrap();
        let mu = measure_case_rho_zero(&r, -12, 40, 1e-15).unwrap();
        assert!((mu.total_mass() - 1.0).abs() < 1e-8);
        assert!(measure_moment(&mu, 1).abs() < 1e-6);
        assert!((measure_moment(&mu, 2) - 1.0).abs() < 1e-6);
        // eta and eta b describe the same measure with labels shifted by one
        let shifted = LimitRegime { eta: Some(9.0), ..r.clone() };
        let nu = measure_case_rho_zero(&shifted, -12, 40, 1e-15).unwrap();
        let (e, s) = normalize_eta(9.0, 3);
        assert_eq!(s, -1);
        assert!((e - 3.0).abs() < 1e-12);
        // label j for eta = 9 is label j + 1 for eta = 3
        for k in 0..nu.len() - 1 {
            assert!((nu.atoms[k] - mu.atoms[k + 1]).abs() < 1e-9 * mu.atoms[k + 1].abs().max(1.0));
            assert!((nu.masses[k] - mu.masses[k + 1]).abs() < 1e-12);
        }
    }

    #[test]
    fn eta_normalization_interval() {
        assert_eq!(normalize_eta(2f64.sqrt(), 2).1, 0);
        let (e, s) = normalize_eta(0.1, 2);
        assert!(e >= 1.0 && e <= 2.0 && s > 0);
        // the closed upper end stays in place
        let (e, s) = normalize_eta(4.0 * 3f64.sqrt(), 4);
        assert_eq!(s, 0);
        assert!((e - 4.0 * 3f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn removable_singularity_half_dual_polar() {
        // b = r^2 = 4, alpha = r(r+1) = 6, rho = sqrt(r+1): M = rho^2 at j = 0
        let r = LimitRegime::new(LimitKind::CaseIRho, 4, int(6), 0.0, 3f64.sqrt(), None).unwrap();
        let mu = measure_case_rho_pos(&r, 20, 1e-15).unwrap();
        assert!(mu.masses.iter().all(|m| m.is_finite()));
        assert!((mu.total_mass() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn lebesgue() {
        for r in 2..=7 {
            assert!(lebesgue_check(r, 1e-12).unwrap());
        }
        assert!(lebesgue_check(3, 1.0).unwrap());
        assert!(lebesgue_check(1, 1e-12).is_err());
    }
}
