//! Gibbs (deformed vacuum) states `phi_t(B) = tr(K_t B)/|X|` with
//! `K_t = sum_i t^i A_i`, and the spectral distribution of the normalized
//! adjacency matrix `(A - tk)/Sigma_t(A)` under them.

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::params::{intersection_array, spectral_table, ClassicalParams, SpectralTable};
use crate::qseries::{gen_poch, int, poch, pow, to_f64, Rational};

/// Gibbs state data at a single `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct GibbsPoint {
    pub t: Rational,
    /// `t k`.
    pub mean: Rational,
    /// `Sigma_t^2(A) = k (1 - t)(1 + t + t a_1)`.
    pub variance: Rational,
    /// Eigenvalue of `K_t` on the `j`-th eigenspace.
    pub kt_spectrum: Vec<Rational>,
}

/// Finite or truncated discrete measure on the real line. Masses may be
/// signed when `positivity` is false.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteMeasure {
    pub atoms: Vec<f64>,
    pub masses: Vec<f64>,
    /// Label of each atom: the eigenvalue index `j` for finite distributions,
    /// the summation index `j` of the limit formulas otherwise.
    pub index: Vec<i64>,
    /// Exact masses, present for finite-diameter distributions.
    pub exact_masses: Option<Vec<Rational>>,
    pub truncated: bool,
    pub tail_bound: f64,
    pub positivity: bool,
}

impl DiscreteMeasure {
    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn total_mass(&self) -> f64 {
        self.masses.iter().sum()
    }
}

/// `sum_j masses[j] * atoms[j]^m`.
pub fn measure_moment(mu: &DiscreteMeasure, m: u32) -> f64 {
    mu.atoms.iter().zip(&mu.masses).map(|(x, w)| w * x.powi(m as i32)).sum()
}

/// `(t; b)_j` times the terminating sum left after the q-binomial theorem.
fn kt_closed_form(cp: &ClassicalParams, t: &Rational, j: usize) -> Result<Rational> {
    let d = cp.d() as usize;
    let q = cp.base();
    let (nu, mu) = (cp.nu(), cp.mu());
    let (ji, di) = (j as i64, d as i64);
    let q_jd = pow(&q, ji - di);
    let shift = cp.alpha() * pow(&q, ji);
    let mut sum = Rational::zero();
    for l in 0..=(d - j) {
        let den = gen_poch(&mu, cp.alpha(), &q, l) * poch(&q, &q, l);
        if den.is_zero() {
            return Err(Error::Infeasible(format!("vanishing denominator in the K_t closed form for {cp}")));
        }
        let num = poch(&q_jd, &q, l) * gen_poch(&nu, &shift, &q, l) * pow(&q, l as i64 * (di - ji)) * pow(t, l as i64);
        sum += num / den;
    }
    Ok(poch(t, &q, j) * sum)
}

/// Mean, variance and `K_t` spectrum. The spectrum is computed as the direct
/// polynomial sum and by its closed form; any disagreement is an error.
pub fn gibbs_point(cp: &ClassicalParams, st: &SpectralTable, t: &Rational) -> Result<GibbsPoint> {
    let ia = intersection_array(cp)?;
    let mean = t * &ia.k;
    let one = Rational::one();
    let variance = &ia.k * (&one - t) * (&one + t + t * &ia.a_seq[1]);
    let d = st.diameter();
    let mut kt_spectrum = Vec::with_capacity(d + 1);
    for j in 0..=d {
        let mut direct = Rational::zero();
        let mut tp = Rational::one();
        for i in 0..=d {
            direct += &tp * &st.v_matrix[i][j];
            tp *= t;
        }
        let closed = kt_closed_form(cp, t, j)?;
        if closed != direct {
            return Err(Error::Consistency(format!(
                "K_t eigenvalue {j} at t = {t}: closed form {closed} != direct sum {direct} for {cp}"
            )));
        }
        kt_spectrum.push(direct);
    }
    Ok(GibbsPoint { t: t.clone(), mean, variance, kt_spectrum })
}

/// Whether `K_t` is positive semidefinite, i.e. `phi_t` is a state.
pub fn in_pi(gp: &GibbsPoint) -> bool {
    gp.kt_spectrum.iter().all(|x| !x.is_negative())
}

/// Result of testing `t = b^(-i)` for `i = 0..=i_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct NegativePowersReport {
    pub checked: Vec<(u32, Rational, bool)>,
}

impl NegativePowersReport {
    pub fn violations(&self) -> Vec<u32> {
        self.checked.iter().filter(|(_, _, ok)| !ok).map(|(i, _, _)| *i).collect()
    }

    pub fn all_pass(&self) -> bool {
        self.checked.iter().all(|(_, _, ok)| *ok)
    }
}

/// Checks positive semidefiniteness of `K_t` at every `t = b^(-i)`, `i <= i_max`.
pub fn check_negative_powers(cp: &ClassicalParams, i_max: u32) -> Result<NegativePowersReport> {
    let st = spectral_table(cp)?;
    let q = int(cp.b());
    let mut checked = Vec::with_capacity(i_max as usize + 1);
    for i in 0..=i_max {
        let t = pow(&q, -(i as i64));
        let gp = gibbs_point(cp, &st, &t)?;
        checked.push((i, t, in_pi(&gp)));
    }
    Ok(NegativePowersReport { checked })
}

/// Exact masses `m_j/|X| * K_t(theta_j)` of the distribution of `A` under `phi_t`.
pub fn gibbs_masses(st: &SpectralTable, gp: &GibbsPoint) -> Vec<Rational> {
    st.mult.iter().zip(&gp.kt_spectrum).map(|(m, kt)| m / &st.vertex_count * kt).collect()
}

/// `sum_j mass_j (theta_j - tk)^m`, the `m`-th central moment of `A` under
/// `phi_t` before dividing by `Sigma_t^m`.
pub fn central_moment_exact(st: &SpectralTable, gp: &GibbsPoint, m: u32) -> Rational {
    gibbs_masses(st, gp).iter().zip(&st.theta).map(|(w, th)| w * pow(&(th - &gp.mean), m as i64)).sum()
}

/// Spectral distribution of `(A - tk)/Sigma_t(A)` under `phi_t`. Outside
/// `pi(Gamma)` the result is a signed measure with `positivity = false`.
pub fn gibbs_distribution(cp: &ClassicalParams, st: &SpectralTable, t: &Rational) -> Result<DiscreteMeasure> {
    let gp = gibbs_point(cp, st, t)?;
    if !gp.variance.is_positive() {
        return Err(Error::NonPositiveVariance(gp.variance.to_string()));
    }
    let sigma = to_f64(&gp.variance).sqrt();
    let atoms = st.theta.iter().map(|th| to_f64(&(th - &gp.mean)) / sigma).collect();
    let exact = gibbs_masses(st, &gp);
    Ok(DiscreteMeasure {
        atoms,
        masses: exact.iter().map(to_f64).collect(),
        index: (0..st.theta.len() as i64).collect(),
        exact_masses: Some(exact),
        truncated: false,
        tail_bound: 0.0,
        positivity: in_pi(&gp),
    })
}
