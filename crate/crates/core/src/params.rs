//! Classical parameters `(d, b, alpha, beta)` and the finite spectral data
//! they determine: intersection numbers, valencies, eigenvalues,
//! multiplicities, vertex count and the distance-polynomial table
//! `v_i(theta_j)`.

use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::qseries::{gauss_bracket_signed, gen_poch, int, poch, pow, Rational};

/// Classical parameter set of a distance-regular graph.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassicalParams {
    d: u32,
    b: i64,
    alpha: Rational,
    beta: Rational,
}

impl ClassicalParams {
    /// Requires `d >= 1` and `b` outside `{0, -1}`.
    pub fn new(d: u32, b: i64, alpha: Rational, beta: Rational) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidParameters("diameter must be at least 1".into()));
        }
        if b == 0 || b == -1 {
            return Err(Error::InvalidParameters(format!("base {b} is not allowed (b must avoid 0 and -1)")));
        }
        Ok(Self { d, b, alpha, beta })
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn b(&self) -> i64 {
        self.b
    }

    pub fn alpha(&self) -> &Rational {
        &self.alpha
    }

    pub fn beta(&self) -> &Rational {
        &self.beta
    }

    /// Gaussian bracket `[i]` in this base, for any integer `i`.
    pub fn bracket(&self, i: i64) -> Rational {
        gauss_bracket_signed(i, self.b)
    }

    pub(crate) fn base(&self) -> Rational {
        int(self.b)
    }

    /// `alpha - beta + beta b`, the recurring numerator in the q-Racah limit.
    pub(crate) fn nu(&self) -> Rational {
        &self.alpha + &self.beta * (self.base() - Rational::one())
    }

    /// `alpha + 1 - b`.
    pub(crate) fn mu(&self) -> Rational {
        &self.alpha + Rational::one() - self.base()
    }
}

impl fmt::Display for ClassicalParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(d={}, b={}, alpha={}, beta={})", self.d, self.b, self.alpha, self.beta)
    }
}

/// Intersection numbers indexed `0..=d`.
#[derive(Debug, Clone, PartialEq)]
pub struct IntersectionArray {
    pub b_seq: Vec<Rational>,
    pub c_seq: Vec<Rational>,
    pub a_seq: Vec<Rational>,
    /// Valencies `k_i`, the sizes of the distance spheres.
    pub k_seq: Vec<Rational>,
    pub k: Rational,
}

impl IntersectionArray {
    pub fn diameter(&self) -> usize {
        self.b_seq.len() - 1
    }
}

/// `b_i = ([d] - [i])(beta - alpha [i])`, `c_i = [i](1 + alpha [i-1])`,
/// `a_i = k - b_i - c_i`, and `k_i = b_0 ... b_(i-1) / (c_1 ... c_i)`.
pub fn intersection_array(cp: &ClassicalParams) -> Result<IntersectionArray> {
    let d = cp.d as i64;
    let bd = cp.bracket(d);
    let b_seq: Vec<Rational> =
        (0..=d).map(|i| (&bd - cp.bracket(i)) * (&cp.beta - &cp.alpha * cp.bracket(i))).collect();
    let c_seq: Vec<Rational> =
        (0..=d).map(|i| cp.bracket(i) * (Rational::one() + &cp.alpha * cp.bracket(i - 1))).collect();
    let k = b_seq[0].clone();
    let a_seq: Vec<Rational> = (0..=d as usize).map(|i| &k - &b_seq[i] - &c_seq[i]).collect();

    let mut k_seq = Vec::with_capacity(d as usize + 1);
    k_seq.push(Rational::one());
    for i in 1..=d as usize {
        if c_seq[i].is_zero() {
            return Err(Error::Infeasible(format!("c_{i} = 0 for {cp}; valencies undefined")));
        }
        let next = &k_seq[i - 1] * &b_seq[i - 1] / &c_seq[i];
        k_seq.push(next);
    }
    Ok(IntersectionArray { b_seq, c_seq, a_seq, k_seq, k })
}

/// Eigenvalues, multiplicities, vertex count and the matrix `v_i(theta_j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralTable {
    /// `theta[j]`, in the classical ordering (`theta[0] = k`).
    pub theta: Vec<Rational>,
    pub mult: Vec<Rational>,
    pub vertex_count: Rational,
    /// `v_matrix[i][j] = v_i(theta_j)`, the eigenvalue of `A_i` on the `j`-th eigenspace.
    pub v_matrix: Vec<Vec<Rational>>,
    valencies: Vec<Rational>,
}

impl SpectralTable {
    pub fn diameter(&self) -> usize {
        self.theta.len() - 1
    }

    /// `u_i(theta_j) = v_i(theta_j) / k_i`.
    pub fn u(&self, i: usize, j: usize) -> Rational {
        &self.v_matrix[i][j] / &self.valencies[i]
    }
}

/// `theta_i = [d-i](beta - alpha [i]) - [i]`.
pub fn eigenvalues(cp: &ClassicalParams) -> Vec<Rational> {
    let d = cp.d as i64;
    (0..=d).map(|i| cp.bracket(d - i) * (&cp.beta - &cp.alpha * cp.bracket(i)) - cp.bracket(i)).collect()
}

fn nonzero(x: Rational, what: impl FnOnce() -> String) -> Result<Rational> {
    if x.is_zero() {
        Err(Error::Infeasible(what()))
    } else {
        Ok(x)
    }
}

/// Multiplicity of `theta_i` in Pochhammer form.
///
/// At `i = d` the factor `nu - mu b^(2i-d)` of the numerator and the last
/// factor `nu - mu b^i` of `(nu; mu b; b)_i` are the same expression and are
/// cancelled before evaluation (they vanish together for the half dual polar
/// graphs with even `n`).
fn multiplicity(cp: &ClassicalParams, i: usize) -> Result<Rational> {
    let d = cp.d as i64;
    let q = cp.base();
    let (nu, mu) = (cp.nu(), cp.mu());
    let q_md = pow(&q, -d);
    let top = i as i64 == d;
    let last = if top { int(1) } else { &nu - &mu * pow(&q, 2 * i as i64 - d) };
    let num = poch(&q_md, &q, i)
        * gen_poch(&nu, &cp.alpha, &q, i)
        * gen_poch(&nu, &(&mu * &q_md), &q, i)
        * last
        * pow(&q, 2 * d * i as i64 - (i * i) as i64);
    let den = poch(&q, &q, i)
        * gen_poch(&nu, &(&mu * &q), &q, if top { i - 1 } else { i })
        * gen_poch(&mu, &(&cp.alpha * pow(&q, d - i as i64)), &q, i)
        * (&nu - &mu * &q_md);
    let den = nonzero(den, || format!("multiplicity denominator vanishes at i = {i} for {cp}"))?;
    Ok(num / den)
}

/// Multiplicity of `theta_i` as the ratio of bracket products.
#[cfg(test)]
fn multiplicity_bracket_form(cp: &ClassicalParams, i: usize) -> Option<Rational> {
    let d = cp.d as i64;
    let q = cp.base();
    let (alpha, beta) = (&cp.alpha, &cp.beta);
    let one = Rational::one();
    let mut num = one.clone();
    for h in 0..i as i64 {
        num *= cp.bracket(d - h)
            * (beta - cp.bracket(h) * alpha)
            * (&one + cp.bracket(d - h) * alpha + pow(&q, d - h) * beta);
    }
    let mut den = one.clone();
    for h in 1..=i as i64 {
        den *= cp.bracket(h) * (beta - cp.bracket(h) * alpha + pow(&q, h)) * (&one + cp.bracket(d - h) * alpha);
    }
    let tail_den = &one + cp.bracket(d) * alpha + pow(&q, d) * beta;
    if den.is_zero() || tail_den.is_zero() {
        return None;
    }
    let i = i as i64;
    let tail = (&one + cp.bracket(d - 2 * i) * alpha + pow(&q, d - 2 * i) * beta) * pow(&q, i);
    Some(num / den * tail / tail_den)
}

/// `|X| = (-1)^d (nu; mu b^(1-d); b)_d b^(d choose 2) / (mu; alpha; b)_d`.
fn vertex_count(cp: &ClassicalParams) -> Result<Rational> {
    let d = cp.d as i64;
    let q = cp.base();
    let (nu, mu) = (cp.nu(), cp.mu());
    let sign = if d % 2 == 0 { int(1) } else { int(-1) };
    let num = sign * gen_poch(&nu, &(&mu * pow(&q, 1 - d)), &q, d as usize) * pow(&q, d * (d - 1) / 2);
    let den =
        nonzero(gen_poch(&mu, &cp.alpha, &q, d as usize), || format!("vertex-count denominator vanishes for {cp}"))?;
    Ok(num / den)
}

/// Closed-form double sum for `v_i(theta_j)`.
fn v_closed_form(cp: &ClassicalParams) -> Result<Vec<Vec<Rational>>> {
    let d = cp.d as usize;
    let q = cp.base();
    let (nu, mu) = (cp.nu(), cp.mu());
    let qq: Vec<Rational> = (0..=d).map(|h| poch(&q, &q, h)).collect();
    let mu_alpha: Vec<Rational> = (0..=d).map(|h| gen_poch(&mu, &cp.alpha, &q, h)).collect();
    if mu_alpha.iter().any(Zero::is_zero) {
        return Err(Error::Infeasible(format!("(alpha+1-b; alpha; b)_h vanishes for {cp}")));
    }
    let mut v = vec![vec![Rational::zero(); d + 1]; d + 1];
    for j in 0..=d {
        let (ji, di) = (j as i64, d as i64);
        let q_mj = pow(&q, -ji);
        let q_jd = pow(&q, ji - di);
        let nu_shift = &cp.alpha * pow(&q, ji);
        for i in 0..=d {
            let mut acc = Rational::zero();
            for h in 0..=i {
                let r = i - h;
                let num = poch(&q_mj, &q, h)
                    * poch(&q_jd, &q, r)
                    * gen_poch(&nu, &nu_shift, &q, r)
                    * pow(&q, r as i64 * (di - ji) + ji * h as i64);
                acc += num / (&qq[h] * &mu_alpha[r] * &qq[r]);
            }
            v[i][j] = acc;
        }
    }
    Ok(v)
}

/// `v_i(theta_j)` from `theta_j v_i = b_(i-1) v_(i-1) + a_i v_i + c_(i+1) v_(i+1)`.
pub fn v_by_recurrence(ia: &IntersectionArray, theta: &[Rational]) -> Result<Vec<Vec<Rational>>> {
    let d = ia.diameter();
    let mut v = vec![vec![Rational::zero(); theta.len()]; d + 1];
    for (j, th) in theta.iter().enumerate() {
        v[0][j] = Rational::one();
        if d >= 1 {
            v[1][j] = th.clone();
        }
        for i in 1..d {
            let c = nonzero(ia.c_seq[i + 1].clone(), || format!("c_{} = 0", i + 1))?;
            v[i + 1][j] = ((th - &ia.a_seq[i]) * &v[i][j] - &ia.b_seq[i - 1] * &v[i - 1][j]) / c;
        }
    }
    Ok(v)
}

/// Full spectral table. The distance-polynomial matrix is evaluated both by
/// its closed form and by the three-term recurrence; disagreement is an error.
pub fn spectral_table(cp: &ClassicalParams) -> Result<SpectralTable> {
    if cp.b == 1 {
        return Err(Error::Infeasible("base 1 is outside the q-Racah closed forms".into()));
    }
    let ia = intersection_array(cp)?;
    let theta = eigenvalues(cp);
    let mult = (0..=cp.d as usize).map(|i| multiplicity(cp, i)).collect::<Result<Vec<_>>>()?;
    let vertex_count = vertex_count(cp)?;
    if vertex_count.is_zero() {
        return Err(Error::Infeasible(format!("|X| = 0 for {cp}")));
    }
    let v_matrix = v_closed_form(cp)?;
    let v_rec = v_by_recurrence(&ia, &theta)?;
    if v_rec != v_matrix {
        return Err(Error::Consistency(format!(
            "closed-form v_i(theta_j) disagrees with the three-term recurrence for {cp}"
        )));
    }
    Ok(SpectralTable { theta, mult, vertex_count, v_matrix, valencies: ia.k_seq })
}

/// One violated condition in a [`FeasibilityReport`].
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    RejectedBase(i64),
    ZeroDiameter,
    /// A count that must be a nonnegative integer is not.
    NotNonnegativeInteger {
        name: String,
        value: Rational,
    },
    /// `b_(i-1) c_i = 0` for some `1 <= i <= d`.
    DegenerateStep(usize),
    /// A closed form could not be evaluated.
    Undefined(String),
    /// Two evaluations of the same identity disagree.
    Identity(String),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::RejectedBase(b) => write!(f, "base {b} not allowed"),
            Violation::ZeroDiameter => write!(f, "diameter must be at least 1"),
            Violation::NotNonnegativeInteger { name, value } => {
                write!(f, "{name} = {value} is not a nonnegative integer")
            }
            Violation::DegenerateStep(i) => write!(f, "b_{} c_{} = 0", i - 1, i),
            Violation::Undefined(msg) => write!(f, "{msg}"),
            Violation::Identity(msg) => write!(f, "{msg}"),
        }
    }
}

/// Outcome of [`feasibility_check`]. `notes` are informational and do not
/// make the parameters infeasible.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FeasibilityReport {
    pub violations: Vec<Violation>,
    pub notes: Vec<String>,
}

impl FeasibilityReport {
    pub fn is_feasible(&self) -> bool {
        self.violations.is_empty()
    }
}

fn is_nonneg_integer(x: &Rational) -> bool {
    x.is_integer() && !x.is_negative()
}

/// Aggregates the structural invariants and integrality conditions.
pub fn feasibility_check(d: u32, b: i64, alpha: &Rational, beta: &Rational) -> FeasibilityReport {
    let mut report = FeasibilityReport::default();
    if b == 0 || b == -1 {
        report.violations.push(Violation::RejectedBase(b));
    }
    if d == 0 {
        report.violations.push(Violation::ZeroDiameter);
    }
    if !report.violations.is_empty() {
        return report;
    }
    if d < 3 {
        report.notes.push(format!("diameter {d} < 3: classical parameters need not be unique"));
    }
    let cp = ClassicalParams { d, b, alpha: alpha.clone(), beta: beta.clone() };
    let ia = match intersection_array(&cp) {
        Ok(ia) => ia,
        Err(e) => {
            report.violations.push(Violation::Undefined(e.to_string()));
            return report;
        }
    };
    let mut need_int = |name: String, x: &Rational| {
        if !is_nonneg_integer(x) {
            report.violations.push(Violation::NotNonnegativeInteger { name, value: x.clone() });
        }
    };
    for i in 0..=d as usize {
        need_int(format!("b_{i}"), &ia.b_seq[i]);
        need_int(format!("c_{i}"), &ia.c_seq[i]);
        need_int(format!("a_{i}"), &ia.a_seq[i]);
        need_int(format!("k_{i}"), &ia.k_seq[i]);
    }
    for i in 1..=d as usize {
        if (&ia.b_seq[i - 1] * &ia.c_seq[i]).is_zero() {
            report.violations.push(Violation::DegenerateStep(i));
        }
    }
    if d >= 2 && b != -1 {
        let from_c2 = &ia.c_seq[2] / int(b + 1) - Rational::one();
        if &from_c2 != alpha {
            report.violations.push(Violation::Identity(format!("alpha = c_2/(b+1) - 1 fails: {from_c2} != {alpha}")));
        }
    }
    match spectral_table(&cp) {
        Ok(st) => {
            let mut need_int = |name: String, x: &Rational| {
                if !is_nonneg_integer(x) {
                    report.violations.push(Violation::NotNonnegativeInteger { name, value: x.clone() });
                }
            };
            for (j, m) in st.mult.iter().enumerate() {
                need_int(format!("m_{j}"), m);
            }
            need_int("|X|".into(), &st.vertex_count);
            let sum_m: Rational = st.mult.iter().sum();
            let sum_k: Rational = ia.k_seq.iter().sum();
            if sum_m != st.vertex_count || sum_k != st.vertex_count {
                report.violations.push(Violation::Identity(format!(
                    "sum m_j = {sum_m}, sum k_i = {sum_k}, |X| = {}",
                    st.vertex_count
                )));
            }
        }
        Err(e) => report.violations.push(Violation::Undefined(e.to_string())),
    }
    report
}

impl ClassicalParams {
    pub fn feasibility(&self) -> FeasibilityReport {
        feasibility_check(self.d, self.b, &self.alpha, &self.beta)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qseries::rat;

    fn ints(xs: &[i64]) -> Vec<Rational> {
        xs.iter().map(|&x| int(x)).collect()
    }

    fn grassmann_4_2() -> ClassicalParams {
        ClassicalParams::new(2, 2, int(2), int(6)).unwrap()
    }

    fn bilinear_2x2() -> ClassicalParams {
        ClassicalParams::new(2, 2, int(1), int(3)).unwrap()
    }

    #[test]
    fn rejects_bad_base_and_diameter() {
        assert!(ClassicalParams::new(3, 0, int(1), int(1)).is_err());
        assert!(ClassicalParams::new(3, -1, int(1), int(1)).is_err());
        assert!(ClassicalParams::new(0, 2, int(1), int(1)).is_err());
    }

    #[test]
    fn intersection_array_grassmann() {
        let ia = intersection_array(&grassmann_4_2()).unwrap();
        assert_eq!(ia.b_seq, ints(&[18, 8, 0]));
        assert_eq!(ia.c_seq, ints(&[0, 1, 9]));
        assert_eq!(ia.a_seq, ints(&[0, 9, 9]));
        assert_eq!(ia.k_seq, ints(&[1, 18, 16]));
        assert_eq!(ia.k, int(18));
    }

    #[test]
    fn intersection_array_bilinear() {
        let ia = intersection_array(&bilinear_2x2()).unwrap();
        assert_eq!(ia.b_seq, ints(&[9, 4, 0]));
        assert_eq!(ia.c_seq, ints(&[0, 1, 6]));
        // a_2 = k - c_2 = 3 (counted on Bil(2x2,2) by the oracle tests)
        assert_eq!(ia.a_seq, ints(&[0, 4, 3]));
        assert_eq!(ia.k_seq, ints(&[1, 9, 6]));
    }

    #[test]
    fn diameter_one_is_complete_graph() {
        let cp = ClassicalParams::new(1, 3, rat(5, 2), int(7)).unwrap();
        let ia = intersection_array(&cp).unwrap();
        assert_eq!(ia.b_seq, ints(&[7, 0]));
        assert_eq!(ia.c_seq, ints(&[0, 1]));
        assert_eq!(ia.a_seq, ints(&[0, 6]));
        let st = spectral_table(&cp).unwrap();
        assert_eq!(st.vertex_count, int(8));
        assert_eq!(st.theta, ints(&[7, -1]));
        assert_eq!(st.mult, ints(&[1, 7]));
    }

    #[test]
    fn spectral_table_grassmann() {
        let st = spectral_table(&grassmann_4_2()).unwrap();
        assert_eq!(st.theta, ints(&[18, 3, -3]));
        assert_eq!(st.mult, ints(&[1, 14, 20]));
        assert_eq!(st.vertex_count, int(35));
        assert_eq!(st.v_matrix[2], ints(&[16, -4, 2]));
        assert_eq!(st.u(2, 1), rat(-1, 4));
        for j in 0..3 {
            assert_eq!(st.v_matrix[0][j], int(1));
            assert_eq!(st.v_matrix[1][j], st.theta[j]);
        }
    }

    #[test]
    fn spectral_table_bilinear() {
        let st = spectral_table(&bilinear_2x2()).unwrap();
        assert_eq!(st.theta, ints(&[9, 1, -3]));
        assert_eq!(st.mult, ints(&[1, 9, 6]));
        assert_eq!(st.vertex_count, int(16));
    }

    #[test]
    fn half_dual_polar_even_n() {
        // D_(n,n)(2) for n = 4, 6: half of prod_(i<n) (2^i + 1) vertices
        for (d, beta, order) in [(2u32, 14, 135), (3, 62, 75735)] {
            let cp = ClassicalParams::new(d, 4, int(6), int(beta)).unwrap();
            let st = spectral_table(&cp).unwrap();
            assert_eq!(st.vertex_count, int(order));
            assert_eq!(st.mult.iter().sum::<Rational>(), int(order));
            assert!(st.mult.iter().all(|m| m.is_integer() && m.is_positive()));
        }
    }

    #[test]
    fn multiplicity_forms_agree() {
        let sets = [
            (5u32, 2i64, int(2), int(2 * 31)),
            (4, 3, int(0), int(3)),
            (6, -2, int(-3), int(-(64) - 1)),
            (5, -3, rat(12, -2), rat(3 * (1 - 243), -2)),
            (4, 4, int(3), int(255)),
        ];
        for (d, b, alpha, beta) in sets {
            let cp = ClassicalParams::new(d, b, alpha, beta).unwrap();
            let st = spectral_table(&cp).unwrap();
            for i in 0..=d as usize {
                assert_eq!(Some(st.mult[i].clone()), multiplicity_bracket_form(&cp, i), "{cp} i={i}");
            }
        }
    }

    #[test]
    fn feasibility_examples() {
        assert!(feasibility_check(2, 2, &int(2), &int(6)).is_feasible());
        let r = feasibility_check(2, 2, &int(2), &int(6));
        assert_eq!(r.notes.len(), 1);

        let r = feasibility_check(3, 2, &int(2), &int(1));
        assert!(!r.is_feasible());
        assert!(r
            .violations
            .iter()
            .any(|v| matches!(v, Violation::NotNonnegativeInteger { name, .. } if name == "b_1")));

        let r = feasibility_check(3, 0, &int(1), &int(1));
        assert_eq!(r.violations, vec![Violation::RejectedBase(0)]);
    }

    #[test]
    fn vanishing_multiplicity_denominator_is_infeasible() {
        // 1 + [d] alpha + b^d beta = 0 with d = 2, b = 2, alpha = 1: beta = -1
        let cp = ClassicalParams::new(2, 2, int(1), int(-1)).unwrap();
        assert!(matches!(spectral_table(&cp), Err(Error::Infeasible(_))));
    }

    #[test]
    fn empty_vertex_set_is_infeasible() {
        // d = 1: |X| = 1 + beta
        let cp = ClassicalParams::new(1, 2, int(0), int(-1)).unwrap();
        assert!(matches!(spectral_table(&cp), Err(Error::Infeasible(_))));
    }
}
