//! Family-specialized closed forms of the limit measures.

use super::logval::{self, LogVal};
use super::measures::finish;
use super::{LimitKind, LimitRegime};
use crate::error::{Error, Result};
use crate::gibbs::DiscreteMeasure;
use crate::qseries::{int, rat, Rational};

/// Limit measures with a closed form. Signs select the parity subnet:
/// `upper = true` is the branch `beta/sqrt(k) -> +sqrt(-alpha)` (odd `d`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Preset {
    /// `J_q(n, d)` with `n - 2d + 1 -> 2 delta`.
    Grassmann {
        q: i64,
        delta: f64,
    },
    /// Half dual polar / Ustimenko, `epsilon = 0` for even `n`, 1 for odd `n`.
    HalfDualPolar {
        r: i64,
        epsilon: u8,
    },
    /// Second parameter set of the Hermitian dual polar graphs.
    SecondDualPolar {
        r: i64,
        upper: bool,
    },
    /// `Bil(d x e, q)` with `e - d -> 2 delta`; alternating and quadratic
    /// forms use `q = r^2`, `delta = -1/4` (even `n`) or `1/4` (odd `n`).
    Bilinear {
        q: i64,
        delta: f64,
    },
    HermitianForms {
        r: i64,
        upper: bool,
    },
}

impl Preset {
    pub fn name(&self) -> &'static str {
        match self {
            Preset::Grassmann { .. } => "grassmann",
            Preset::HalfDualPolar { .. } => "half_dual_polar",
            Preset::SecondDualPolar { .. } => "second_dual_polar",
            Preset::Bilinear { .. } => "bilinear",
            Preset::HermitianForms { .. } => "hermitian_forms",
        }
    }

    fn check(&self) -> Result<()> {
        let base = match *self {
            Preset::Grassmann { q, .. } | Preset::Bilinear { q, .. } => q,
            Preset::HalfDualPolar { r, epsilon } => {
                if epsilon > 1 {
                    return Err(Error::InvalidParameters(format!("epsilon must be 0 or 1, got {epsilon}")));
                }
                r
            }
            Preset::SecondDualPolar { r, .. } | Preset::HermitianForms { r, .. } => r,
        };
        if base < 2 {
            return Err(Error::InvalidParameters(format!("{} needs q or r >= 2, got {base}", self.name())));
        }
        Ok(())
    }

    /// The generic regime that this closed form specializes.
    pub fn regime(&self, gamma: f64) -> Result<LimitRegime> {
        self.check()?;
        match *self {
            Preset::Grassmann { q, delta } => {
                LimitRegime::new(LimitKind::CaseIRho, q, int(q), gamma, (q as f64).powf(delta), None)
            }
            Preset::HalfDualPolar { r, epsilon } => {
                let kind = if epsilon == 0 { LimitKind::CaseIRho } else { LimitKind::CaseIAlphaOverRho };
                LimitRegime::new(kind, r * r, int(r * (r + 1)), gamma, ((r + 1) as f64).sqrt(), None)
            }
            Preset::SecondDualPolar { r, upper } => {
                let alpha: Rational = rat(r * (r + 1), 1 - r);
                let rho = (r * (r + 1)) as f64 / (r - 1) as f64;
                let kind = if upper { LimitKind::CaseIRho } else { LimitKind::CaseIAlphaOverRho };
                LimitRegime::new(kind, -r, alpha, gamma, rho.sqrt(), None)
            }
            Preset::Bilinear { q, delta } => {
                let qf = q as f64;
                LimitRegime::new(LimitKind::CaseIRho, q, int(q - 1), gamma, qf.powf(delta) * (qf - 1.0).sqrt(), None)
            }
            Preset::HermitianForms { r, upper } => {
                let kind = if upper { LimitKind::CaseIRho } else { LimitKind::CaseIAlphaOverRho };
                LimitRegime::new(kind, -r, int(-r - 1), gamma, ((r + 1) as f64).sqrt(), None)
            }
        }
    }
}

/// Terminating `_r phi_s(uppers; lowers; q, z)`, scaled by `prefactor`
/// term by term so that neither the terms nor the prefactor overflow.
fn phi_scaled(prefactor: LogVal, uppers: &[f64], lowers: &[f64], q: f64, z: f64, n: usize) -> f64 {
    let excess = lowers.len() as i64 + 1 - uppers.len() as i64;
    let mut sum = 0.0;
    for l in 0..=n {
        let mut term = LogVal::pow(z, l as i64);
        for &a in uppers {
            term = term.mul(logval::poch(a, q, l));
        }
        let mut den = logval::poch(q, q, l);
        for &b in lowers {
            den = den.mul(logval::poch(b, q, l));
        }
        if excess != 0 {
            let c2 = (l * l.saturating_sub(1) / 2) as i64;
            let sign = if (excess * l as i64) % 2 == 0 { 1.0 } else { -1.0 };
            term = term.mul(LogVal::from(sign)).mul(LogVal::pow(q, excess * c2));
        }
        sum += prefactor.mul(term).div(den).value();
    }
    sum
}

/// The closed-form limit measure of a preset, atoms `j = 0..=j_max`.
pub fn family_closed_form(preset: Preset, gamma: f64, j_max: u32, eps: f64) -> Result<DiscreteMeasure> {
    // validates the preset and the normalizer
    let regime = preset.regime(gamma)?;
    let (mut index, mut atoms, mut masses) = (vec![], vec![], vec![]);
    for j in 0..=j_max as i64 {
        let ju = j as usize;
        let (atom, mass) = match preset {
            Preset::Grassmann { q, delta } => {
                let b = q as f64;
                let (bd, bd1) = (b.powf(delta), b.powf(1.0 - delta));
                let atom = (b.powf(delta + j as f64) + b.powf(-delta - j as f64) - bd - bd1 - gamma * (b - 1.0))
                    / ((b - 1.0) * (1.0 + gamma * (bd + bd1)).sqrt());
                let lead = LogVal::from(b)
                    .pow_real(-(j as f64) * (2.0 * delta + j as f64 - 1.0))
                    .mul(LogVal::from(1.0 - b.powf(-2.0 * delta - 2.0 * j as f64)));
                let pre =
                    lead.mul(logval::poch_inf(gamma * (b - 1.0) / b.powf(delta + j as f64 + 1.0), 1.0 / b, eps, None)?);
                let z = gamma * (b - 1.0) * b.powf(delta + j as f64);
                let uppers = [b.powi(-(j as i32)), b.powf(1.0 - 2.0 * delta - j as f64)];
                (atom, phi_scaled(pre, &uppers, &[b], b, z, ju))
            }
            Preset::HalfDualPolar { r, epsilon } => {
                let rf = r as f64;
                let e = epsilon as i64;
                let s = (rf + 1.0).sqrt();
                let x = rf.powi((e + 2 * j) as i32);
                let atom = (x + 1.0 / x - rf - 1.0 - gamma * (rf - 1.0) * s)
                    / ((rf - 1.0) * (rf + 1.0 + gamma * (rf + 1.0).powf(2.5)).sqrt());
                let ratio = if e == 0 && j == 0 { 1.0 } else { x + 1.0 };
                let r2i = 1.0 / (rf * rf);
                let pre = LogVal::from(ratio)
                    .mul(logval::poch_inf(1.0 / rf, r2i, eps, None)?)
                    .div(LogVal::pow(rf, (e + j) * (2 * j + 1)))
                    .div(logval::poch_inf(r2i, r2i, eps, None)?)
                    .mul(logval::poch_inf(gamma * (rf - 1.0) * s / rf.powi((e + 2 * j + 2) as i32), r2i, eps, None)?);
                let uppers = [rf.powi(-2 * j as i32), rf.powi((1 - 2 * e - 2 * j) as i32)];
                (atom, phi_scaled(pre, &uppers, &[rf], rf * rf, gamma * x * (rf - 1.0) * s, ju))
            }
            Preset::SecondDualPolar { r, upper } => {
                let rf = r as f64;
                let sgn = if upper { 1.0 } else { -1.0 };
                let mr = -rf;
                let atom = (-sgn * rf.sqrt() * mr.powi(j as i32) + sgn * mr.powi(-(j as i32)) / rf.sqrt())
                    / (rf * rf - 1.0).sqrt()
                    - gamma;
                let w = ((rf * rf - 1.0) / rf).sqrt();
                let pre = LogVal::from(rf.powi(2 * j as i32 + 1) + 1.0)
                    .mul(logval::poch_inf(1.0 / rf, -1.0 / rf, eps, None)?)
                    .div(LogVal::pow(rf, (j + 1) * (j + 1)))
                    .div(logval::poch_inf(-1.0 / rf, -1.0 / rf, eps, None)?)
                    .mul(logval::poch_inf(-sgn * gamma * mr.powi(-(j as i32) - 1) * w, -1.0 / rf, eps, None)?)
                    .mul(logval::poch(-sgn * gamma * mr.powi(j as i32 - 1) * w, 1.0 / (rf * rf), ju));
                (atom, pre.value())
            }
            Preset::Bilinear { q, delta } => {
                let b = q as f64;
                let s = (b - 1.0).sqrt();
                let (bd, bmd) = (b.powf(delta), b.powf(-delta));
                let atom = (b.powf(delta + j as f64) - bd - bmd - gamma * s)
                    / (b - 1.0 + gamma * (bd + bmd) * (b - 1.0).powf(1.5)).sqrt();
                let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                let pre = LogVal::from(sign)
                    .mul(logval::poch_inf(b.powf(-2.0 * delta - j as f64 - 1.0), 1.0 / b, eps, None)?)
                    .div(logval::poch(b, b, ju))
                    .div(LogVal::from(b).pow_real(2.0 * delta * j as f64 + (j * (j - 1) / 2) as f64))
                    .mul(logval::poch_inf(gamma * s / b.powf(delta + j as f64 + 1.0), 1.0 / b, eps, None)?);
                let uppers = [b.powi(-(j as i32)), b.powf(-2.0 * delta - j as f64)];
                (atom, phi_scaled(pre, &uppers, &[], b, gamma * b.powf(delta + j as f64) * s, ju))
            }
            Preset::HermitianForms { r, upper } => {
                let rf = r as f64;
                let sgn = if upper { 1.0 } else { -1.0 };
                let mr = -rf;
                let s = (rf + 1.0).sqrt();
                let atom = -sgn * mr.powi(j as i32) / s - gamma;
                let pre = logval::poch_inf(-mr.powi(-(j as i32) - 1), -1.0 / rf, eps, None)?
                    .div(logval::poch(mr, mr, ju))
                    .div(LogVal::pow(mr, j * (j - 1) / 2))
                    .mul(logval::poch_inf(-sgn * gamma * s / mr.powi(j as i32 + 1), -1.0 / rf, eps, None)?);
                let uppers = [mr.powi(-(j as i32)), -mr.powi(-(j as i32))];
                (atom, phi_scaled(pre, &uppers, &[], mr, sgn * gamma * mr.powi(j as i32) * s, ju))
            }
        };
        index.push(j);
        atoms.push(atom);
        masses.push(mass);
    }
    debug_assert!(regime.normalizer() > 0.0);
    Ok(finish(index, atoms, masses))
}

#[cfg(test)]
mod tests {
    use super::super::measures::{measure_case_rho_zero, regime_measure};
    use super::*;
    use crate::gibbs::measure_moment;

    fn presets() -> Vec<Preset> {
        let mut v = vec![];
        for q in [2, 3, 4] {
            for delta in [0.5, 1.0, 1.5] {
                v.push(Preset::Grassmann { q, delta });
            }
            for delta in [0.0, 0.5, 1.0] {
                v.push(Preset::Bilinear { q, delta });
            }
        }
        for r in [2, 3] {
            v.push(Preset::Bilinear { q: r * r, delta: -0.25 });
            v.push(Preset::Bilinear { q: r * r, delta: 0.25 });
            for flag in [true, false] {
                v.push(Preset::SecondDualPolar { r, upper: flag });
                v.push(Preset::HermitianForms { r, upper: flag });
            }
            for epsilon in [0, 1] {
                v.push(Preset::HalfDualPolar { r, epsilon });
            }
        }
        v
    }

    #[test]
    fn grassmann_spot_values() {
        let mu = family_closed_form(Preset::Grassmann { q: 2, delta: 1.0 }, 0.0, 10, 1e-15).unwrap();
        assert!((mu.atoms[0] + 0.5).abs() < 1e-12);
        assert!((mu.masses[0] - 0.75).abs() < 1e-12);
        assert!((mu.atoms[1] - 1.25).abs() < 1e-12);
        assert!((mu.masses[1] - 15.0 / 64.0).abs() < 1e-12);
    }

    #[test]
    fn generic_agrees_with_closed_forms() {
        for p in presets() {
            for gamma in [0.0, 0.3, 1.1] {
                let Ok(regime) = p.regime(gamma) else { continue };
                let closed = family_closed_form(p, gamma, 10, 1e-15).unwrap();
                let generic = regime_measure(&regime, 0, 10, 1e-15).unwrap();
                for j in 0..=10 {
                    let (a, b) = (closed.atoms[j], generic.atoms[j]);
                    assert!((a - b).abs() <= 1e-10 * a.abs().max(1.0), "{p:?} gamma={gamma} j={j} atom {a} vs {b}");
                    let (m, n) = (closed.masses[j], generic.masses[j]);
                    assert!((m - n).abs() <= 1e-10, "{p:?} gamma={gamma} j={j} mass {m} vs {n}");
                }
            }
        }
    }

    #[test]
    fn closed_forms_are_normalized() {
        for p in presets() {
            let mu = family_closed_form(p, 0.0, 40, 1e-15).unwrap();
            assert!((mu.total_mass() - 1.0).abs() < 1e-9, "{p:?}: {}", mu.total_mass());
            assert!(measure_moment(&mu, 1).abs() < 1e-8, "{p:?}");
            assert!((measure_moment(&mu, 2) - 1.0).abs() < 1e-8, "{p:?}");
        }
    }

    #[test]
    fn second_dual_polar_matches_half_exponent_dual_polar() {
        for r in [2i64, 3] {
            for (upper, eta) in [(true, (r as f64).powf(1.5)), (false, (r as f64).powf(2.5))] {
                let gamma = 0.2;
                let second = family_closed_form(Preset::SecondDualPolar { r, upper }, gamma, 12, 1e-15).unwrap();
                let regime = LimitRegime::new(LimitKind::CaseII, r * r, int(0), gamma, 0.0, Some(eta)).unwrap();
                let dual = measure_case_rho_zero(&regime, -12, 12, 1e-15).unwrap();
                for k in 0..second.len() {
                    let a = second.atoms[k];
                    let hit = dual.atoms.iter().position(|x| (x - a).abs() < 1e-8 * a.abs().max(1.0));
                    let i = hit.unwrap_or_else(|| panic!("r={r} upper={upper}: no match for atom {a}"));
                    assert!((second.masses[k] - dual.masses[i]).abs() < 1e-8);
                }
            }
        }
    }
}
