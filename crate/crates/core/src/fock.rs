//! Quantum decomposition `A = A+ + A- + A°` on the primary module, and the
//! interacting Fock space of the quantum central limit theorem.

use std::fmt;
use std::str::FromStr;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::limits::LimitRegime;
use crate::params::{intersection_array, ClassicalParams};
use crate::qseries::{gauss_bracket_signed, pow, to_f64, Rational};

/// Jacobi data of a (truncated) interacting Fock space with `length` levels.
///
/// Storage is 0-based: `omega[n]` is the Jacobi coefficient `omega_(n+1)`
/// linking levels `n` and `n+1`, `alpha_diag[n]` is `alpha_(n+1)`, the
/// diagonal entry at level `n`, and `gamma_w[n]` is the weight `gamma_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct FockCoefficients {
    pub omega: Vec<f64>,
    pub alpha_diag: Vec<f64>,
    pub gamma_w: Vec<f64>,
    pub length: usize,
}

/// One letter of a word in the quantum components.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Epsilon {
    Plus,
    Minus,
    Circle,
}

/// Nonempty word `eps_1 eps_2 ... eps_m`; `eps_1` acts first.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct EpsilonWord(Vec<Epsilon>);

impl EpsilonWord {
    pub fn new(letters: Vec<Epsilon>) -> Result<Self> {
        if letters.is_empty() {
            return Err(Error::InvalidParameters("a word needs at least one letter".into()));
        }
        Ok(Self(letters))
    }

    pub fn letters(&self) -> &[Epsilon] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// All `3^m` words of length `m >= 1`.
    pub fn all(m: usize) -> Vec<EpsilonWord> {
        let mut words: Vec<Vec<Epsilon>> = vec![vec![]];
        for _ in 0..m {
            words = words
                .into_iter()
                .flat_map(|w| {
                    [Epsilon::Plus, Epsilon::Minus, Epsilon::Circle].map(|e| {
                        let mut v = w.clone();
                        v.push(e);
                        v
                    })
                })
                .collect();
        }
        words.into_iter().filter(|w| !w.is_empty()).map(EpsilonWord).collect()
    }
}

/// Letters `+`, `-`, `o` (or `0`), e.g. `"+-o"`.
impl FromStr for EpsilonWord {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let letters = s
            .chars()
            .map(|c| match c {
                '+' => Ok(Epsilon::Plus),
                '-' => Ok(Epsilon::Minus),
                'o' | '0' => Ok(Epsilon::Circle),
                _ => Err(Error::InvalidParameters(format!("bad letter {c:?} in word {s:?}; use + - o"))),
            })
            .collect::<Result<Vec<_>>>()?;
        EpsilonWord::new(letters)
    }
}

impl fmt::Display for EpsilonWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for e in &self.0 {
            let c = match e {
                Epsilon::Plus => '+',
                Epsilon::Minus => '-',
                Epsilon::Circle => 'o',
            };
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

fn variance(cp: &ClassicalParams, t: &Rational) -> Result<(crate::params::IntersectionArray, Rational)> {
    let ia = intersection_array(cp)?;
    let one = Rational::one();
    let var = &ia.k * (&one - t) * (&one + t + t * &ia.a_seq[1]);
    if !var.is_positive() {
        return Err(Error::NonPositiveVariance(var.to_string()));
    }
    Ok((ia, var))
}

/// Scaled coefficients `omega_i = c_i b_(i-1)/Sigma^2`,
/// `alpha_i = (a_(i-1) - tk)/Sigma`, `gamma_i = t^i sqrt(k_i)` on the
/// `(d+1)`-dimensional primary module.
pub fn finite_coefficients(cp: &ClassicalParams, t: &Rational) -> Result<FockCoefficients> {
    let (ia, var) = variance(cp, t)?;
    let d = ia.diameter();
    let sigma = to_f64(&var).sqrt();
    let tk = t * &ia.k;
    let omega = (1..=d).map(|i| to_f64(&(&ia.c_seq[i] * &ia.b_seq[i - 1] / &var))).collect();
    let alpha_diag = (0..=d).map(|i| to_f64(&(&ia.a_seq[i] - &tk)) / sigma).collect();
    let gamma_w =
        (0..=d).map(|i| if i == 0 { 1.0 } else { to_f64(&pow(t, i as i64)) * to_f64(&ia.k_seq[i]).sqrt() }).collect();
    Ok(FockCoefficients { omega, alpha_diag, gamma_w, length: d + 1 })
}

/// Limit coefficients `omega_i = c_i/(1 + gamma sigma)`,
/// `alpha_i = ([i-1] sigma - gamma)/sqrt(1 + gamma sigma)` and
/// `gamma_i = gamma^i / sqrt(c_1 ... c_i)` with `c_i = [i](1 + alpha [i-1])`.
pub fn limit_coefficients(regime: &LimitRegime, n: usize) -> Result<FockCoefficients> {
    if n == 0 {
        return Err(Error::InvalidParameters("truncation must be at least 1".into()));
    }
    let norm = regime.normalizer();
    if !(norm > 0.0) {
        return Err(Error::NonPositiveVariance(format!("1 + gamma sigma = {norm}")));
    }
    let sigma = regime.sigma();
    let root = norm.sqrt();
    let alpha = &regime.alpha;
    let bracket = |i: i64| to_f64(&gauss_bracket_signed(i, regime.b));
    let c = |i: i64| {
        to_f64(&(gauss_bracket_signed(i, regime.b) * (Rational::one() + alpha * gauss_bracket_signed(i - 1, regime.b))))
    };
    let omega = (1..n as i64).map(|i| c(i) / norm).collect();
    let alpha_diag = (1..=n as i64).map(|i| (bracket(i - 1) * sigma - regime.gamma) / root).collect();
    let mut gamma_w = Vec::with_capacity(n);
    let mut acc = 1.0;
    gamma_w.push(1.0);
    for i in 1..n as i64 {
        acc *= regime.gamma / c(i).sqrt();
        gamma_w.push(acc);
    }
    Ok(FockCoefficients { omega, alpha_diag, gamma_w, length: n })
}

fn apply(fc: &FockCoefficients, x: &[f64], e: Epsilon) -> Vec<f64> {
    let n = fc.length;
    let mut y = vec![0.0; n];
    for (lvl, &v) in x.iter().enumerate() {
        if v == 0.0 {
            continue;
        }
        match e {
            Epsilon::Plus if lvl + 1 < n => y[lvl + 1] += fc.omega[lvl].sqrt() * v,
            Epsilon::Minus if lvl > 0 => y[lvl - 1] += fc.omega[lvl - 1].sqrt() * v,
            Epsilon::Circle => y[lvl] += fc.alpha_diag[lvl] * v,
            _ => {}
        }
    }
    y
}

/// `sum_i gamma_i <Psi_i, B^(eps_m) ... B^(eps_1) Psi_0>`. The word reaches at
/// most level `m`, so a truncation with more than `m` levels is exact.
pub fn mixed_moment_limit(fc: &FockCoefficients, w: &EpsilonWord) -> Result<f64> {
    if fc.length <= w.len() {
        return Err(Error::Truncation { needed: w.len(), have: fc.length });
    }
    Ok(evaluate(fc, w))
}

fn evaluate(fc: &FockCoefficients, w: &EpsilonWord) -> f64 {
    let mut x = vec![0.0; fc.length];
    x[0] = 1.0;
    for &e in w.letters() {
        x = apply(fc, &x, e);
    }
    x.iter().zip(&fc.gamma_w).map(|(v, g)| v * g).sum()
}

/// `phi_t` of a word in the normalized quantum components at finite diameter,
/// evaluated on the primary module, which is exact for any word length.
pub fn mixed_moment_finite(cp: &ClassicalParams, t: &Rational, w: &EpsilonWord) -> Result<f64> {
    Ok(evaluate(&finite_coefficients(cp, t)?, w))
}

/// Exact numerator `R` of a finite mixed moment, whose value is
/// `R / Sigma_t^m`. Uses the unnormalized basis `A_i o` of the primary
/// module, where `A+ A_i o = c_(i+1) A_(i+1) o`, `A- A_i o = b_(i-1) A_(i-1) o`,
/// and `phi_t(B) = sum_i t^i k_i x_i` for `B o = sum_i x_i A_i o`.
pub fn mixed_moment_finite_exact(cp: &ClassicalParams, t: &Rational, w: &EpsilonWord) -> Result<Rational> {
    let (ia, _) = variance(cp, t)?;
    let d = ia.diameter();
    let tk = t * &ia.k;
    let mut x = vec![Rational::zero(); d + 1];
    x[0] = Rational::one();
    for &e in w.letters() {
        let mut y = vec![Rational::zero(); d + 1];
        for (i, v) in x.iter().enumerate() {
            if v.is_zero() {
                continue;
            }
            match e {
                Epsilon::Plus if i < d => y[i + 1] += &ia.c_seq[i + 1] * v,
                Epsilon::Minus if i > 0 => y[i - 1] += &ia.b_seq[i - 1] * v,
                Epsilon::Circle => y[i] += (&ia.a_seq[i] - &tk) * v,
                _ => {}
            }
        }
        x = y;
    }
    let mut tp = Rational::one();
    let mut acc = Rational::zero();
    for (xi, ki) in x.iter().zip(&ia.k_seq) {
        acc += &tp * ki * xi;
        tp *= t;
    }
    Ok(acc)
}

/// `sum_i gamma_i <Psi_i, (B+ + B- + B°)^m Psi_0>`, requiring more than `m` levels.
pub fn limit_moment(fc: &FockCoefficients, m: usize) -> Result<f64> {
    if fc.length <= m {
        return Err(Error::Truncation { needed: m, have: fc.length });
    }
    let mut x = vec![0.0; fc.length];
    x[0] = 1.0;
    for _ in 0..m {
        let mut y = apply(fc, &x, Epsilon::Circle);
        for e in [Epsilon::Plus, Epsilon::Minus] {
            for (a, b) in y.iter_mut().zip(apply(fc, &x, e)) {
                *a += b;
            }
        }
        x = y;
    }
    Ok(x.iter().zip(&fc.gamma_w).map(|(v, g)| v * g).sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gibbs::{central_moment_exact, gibbs_distribution, gibbs_point, measure_moment};
    use crate::limits::LimitKind;
    use crate::params::spectral_table;
    use crate::qseries::{int, rat};

    fn j2_4_2() -> ClassicalParams {
        ClassicalParams::new(2, 2, int(2), int(6)).unwrap()
    }

    fn word(s: &str) -> EpsilonWord {
        s.parse().unwrap()
    }

    #[test]
    fn finite_coefficients_grassmann() {
        let fc = finite_coefficients(&j2_4_2(), &rat(1, 2)).unwrap();
        assert!((fc.omega[0] - 1.0 / 3.0).abs() < 1e-15);
        assert!((fc.omega[1] - 4.0 / 3.0).abs() < 1e-15);
        assert!((fc.alpha_diag[0] + 9.0 / 54f64.sqrt()).abs() < 1e-15);
        let fc0 = finite_coefficients(&j2_4_2(), &int(0)).unwrap();
        assert_eq!(fc0.gamma_w, vec![1.0, 0.0, 0.0]);
        assert_eq!(fc0.alpha_diag[0], 0.0);
    }

    #[test]
    fn small_words() {
        let cp = j2_4_2();
        let t = rat(1, 2);
        let fc = finite_coefficients(&cp, &t).unwrap();
        assert_eq!(mixed_moment_finite(&cp, &int(0), &word("o")).unwrap(), 0.0);
        assert_eq!(mixed_moment_finite(&cp, &t, &word("-")).unwrap(), 0.0);
        // (plus, minus): up then back down, contracted at level 0
        let pm = mixed_moment_finite(&cp, &t, &word("+-")).unwrap();
        assert!((pm - fc.omega[0]).abs() < 1e-15);
        // (minus, plus): vacuum killed first
        assert_eq!(mixed_moment_finite(&cp, &t, &word("-+")).unwrap(), 0.0);
        let p = mixed_moment_finite(&cp, &t, &word("+")).unwrap();
        assert!((p - fc.gamma_w[1] * fc.omega[0].sqrt()).abs() < 1e-15);
    }

    #[test]
    fn sum_rule_exact() {
        let cp = ClassicalParams::new(4, 2, int(2), int(2 * 31)).unwrap();
        let st = spectral_table(&cp).unwrap();
        for t in [rat(1, 4), rat(-1, 200), int(0)] {
            let gp = gibbs_point(&cp, &st, &t).unwrap();
            let mu = gibbs_distribution(&cp, &st, &t).unwrap();
            for m in 1..=6 {
                let words = EpsilonWord::all(m);
                assert_eq!(words.len(), 3usize.pow(m as u32));
                let exact: Rational = words.iter().map(|w| mixed_moment_finite_exact(&cp, &t, w).unwrap()).sum();
                assert_eq!(exact, central_moment_exact(&st, &gp, m as u32));
                let float: f64 = words.iter().map(|w| mixed_moment_finite(&cp, &t, w).unwrap()).sum();
                assert!((float - measure_moment(&mu, m as u32)).abs() < 1e-10 * float.abs().max(1.0));
            }
        }
    }

    #[test]
    fn limit_coefficient_examples() {
        let r = LimitRegime::new(LimitKind::CaseIRho, 2, int(2), 2.0, 2.0, None).unwrap();
        let fc = limit_coefficients(&r, 6).unwrap();
        assert!((fc.omega[0] - 1.0 / 7.0).abs() < 1e-15);

        let dual = LimitRegime::new(LimitKind::CaseII, 2, int(0), 0.5, 0.0, Some(2.0)).unwrap();
        let fc = limit_coefficients(&dual, 5).unwrap();
        for i in 1..5i64 {
            assert!((fc.omega[i as usize - 1] - (2f64.powi(i as i32) - 1.0)).abs() < 1e-12);
        }
        assert!(fc.alpha_diag.iter().all(|&a| a == -0.5));
        assert!((fc.gamma_w[2] - 0.25 / (1.0f64 * 3.0).sqrt()).abs() < 1e-15);

        let vac = LimitRegime::new(LimitKind::CaseIRho, 3, int(3), 0.0, 3.0, None).unwrap();
        let fc = limit_coefficients(&vac, 4).unwrap();
        assert_eq!(fc.gamma_w, vec![1.0, 0.0, 0.0, 0.0]);
        for i in 1..=4i64 {
            let expect = to_f64(&gauss_bracket_signed(i - 1, 3)) * 4.0;
            assert!((fc.alpha_diag[i as usize - 1] - expect).abs() < 1e-12);
        }
    }

    #[test]
    fn limit_words_and_moments() {
        let r = LimitRegime::new(LimitKind::CaseIRho, 2, int(2), 2.0, 2.0, None).unwrap();
        let fc = limit_coefficients(&r, 8).unwrap();
        assert_eq!(mixed_moment_limit(&fc, &word("-")).unwrap(), 0.0);
        let p = mixed_moment_limit(&fc, &word("+")).unwrap();
        assert!((p - fc.gamma_w[1] * fc.omega[0].sqrt()).abs() < 1e-15);
        let pp = mixed_moment_limit(&fc, &word("++")).unwrap();
        assert!((pp - fc.gamma_w[2] * (fc.omega[0] * fc.omega[1]).sqrt()).abs() < 1e-15);
        assert_eq!(limit_moment(&fc, 0).unwrap(), 1.0);
        assert!(limit_moment(&fc, 1).unwrap().abs() < 1e-12);
        assert!((limit_moment(&fc, 2).unwrap() - 1.0).abs() < 1e-12);
        let short = limit_coefficients(&r, 2).unwrap();
        assert!(matches!(mixed_moment_limit(&short, &word("++")), Err(Error::Truncation { .. })));
    }

    #[test]
    fn word_parsing() {
        assert_eq!(word("+-o").to_string(), "+-o");
        assert!("".parse::<EpsilonWord>().is_err());
        assert!("+x".parse::<EpsilonWord>().is_err());
    }
}
