//! Brute-force ground truth on small explicit graphs: distances by BFS,
//! spectra by dense eigensolving, and Gibbs states from matrix traces.

mod eigen;
mod field;
mod graph;

pub use eigen::{cluster, symmetric_eigenvalues, CLUSTER_TOL};
pub use field::PrimeField;
pub use graph::{
    build, build_bilinear, build_grassmann, empirical_intersection, GraphInstance, GraphSpec, MAX_VERTICES,
};

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::families::{member, FamilyDescriptor, Size};
use crate::fock::{mixed_moment_finite, Epsilon, EpsilonWord};
use crate::gibbs::{gibbs_distribution, measure_moment};
use crate::params::{intersection_array, spectral_table, ClassicalParams};
use crate::qseries::{rat, to_f64};

pub fn adjacency_matrix(g: &GraphInstance) -> DMatrix<f64> {
    let n = g.n_vertices;
    let mut a = DMatrix::zeros(n, n);
    for (u, nb) in g.adjacency.iter().enumerate() {
        for &v in nb {
            a[(u, v)] = 1.0;
        }
    }
    a
}

/// `K_t = sum_i t^i A_i`.
pub fn kt_matrix(g: &GraphInstance, t: f64) -> DMatrix<f64> {
    let n = g.n_vertices;
    DMatrix::from_fn(n, n, |u, v| t.powi(g.dist(u, v) as i32))
}

/// Distinct eigenvalues of the adjacency matrix with multiplicities, in
/// decreasing order.
pub fn empirical_spectrum(g: &GraphInstance) -> Result<Vec<(f64, usize)>> {
    cluster(&symmetric_eigenvalues(adjacency_matrix(g))?)
}

/// Smallest eigenvalue of `K_t`.
pub fn kt_min_eigenvalue(g: &GraphInstance, t: f64) -> f64 {
    eigen::symmetric_eigenvalues_unchecked(kt_matrix(g, t)).into_iter().fold(f64::INFINITY, f64::min)
}

fn matvec(g: &GraphInstance, x: &[f64], shift: f64, scale: f64) -> Vec<f64> {
    g.adjacency.iter().zip(x).map(|(nb, &xu)| (nb.iter().map(|&v| x[v]).sum::<f64>() - shift * xu) / scale).collect()
}

/// Gibbs-state data computed from matrix traces.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalGibbs {
    /// `phi_t(A)`.
    pub mean: f64,
    /// `phi_t(A^2) - phi_t(A)^2`.
    pub variance: f64,
    /// `phi_t` of the powers `0..=m_max` of `(A - mean)/sqrt(variance)`.
    pub moments: Vec<f64>,
}

/// `phi_t(B) = tr(K_t B)/|X|`, summed over every vertex.
fn trace_moments(g: &GraphInstance, t: f64, m_max: usize, shift: f64, scale: f64) -> Vec<f64> {
    let n = g.n_vertices;
    let mut acc = vec![0.0; m_max + 1];
    for x in 0..n {
        let weights: Vec<f64> = (0..n).map(|y| t.powi(g.dist(x, y) as i32)).collect();
        let mut v = vec![0.0; n];
        v[x] = 1.0;
        for a in acc.iter_mut() {
            *a += weights.iter().zip(&v).map(|(w, vy)| w * vy).sum::<f64>();
            v = matvec(g, &v, shift, scale);
        }
    }
    acc.iter().map(|a| a / n as f64).collect()
}

pub fn empirical_gibbs(g: &GraphInstance, t: f64, m_max: usize) -> Result<EmpiricalGibbs> {
    let raw = trace_moments(g, t, 2, 0.0, 1.0);
    let mean = raw[1] / raw[0];
    let variance = raw[2] / raw[0] - mean * mean;
    if !(variance > 0.0) {
        return Err(Error::NonPositiveVariance(format!("empirical variance {variance} at t = {t}")));
    }
    let moments = trace_moments(g, t, m_max, mean, variance.sqrt());
    Ok(EmpiricalGibbs { mean, variance, moments })
}

/// `phi_t` of a word in the normalized quantum components relative to
/// `base`, evaluated on `|X|`-dimensional vectors as
/// `sum_y t^(d(base, y)) (B e_base)_y`.
pub fn empirical_quantum_components(g: &GraphInstance, base: usize, t: f64, word: &EpsilonWord) -> Result<f64> {
    if base >= g.n_vertices {
        return Err(Error::InvalidParameters(format!("base vertex {base} out of range")));
    }
    let n = g.n_vertices;
    let level: Vec<usize> = (0..n).map(|y| g.dist(base, y)).collect();
    let weights: Vec<f64> = level.iter().map(|&i| t.powi(i as i32)).collect();
    let phi = |v: &[f64]| weights.iter().zip(v).map(|(w, x)| w * x).sum::<f64>();
    let mut e = vec![0.0; n];
    e[base] = 1.0;
    let mean = phi(&matvec(g, &e, 0.0, 1.0));
    let variance = phi(&matvec(g, &matvec(g, &e, 0.0, 1.0), 0.0, 1.0)) - mean * mean;
    if !(variance > 0.0) {
        return Err(Error::NonPositiveVariance(format!("empirical variance {variance} at t = {t}")));
    }
    let sigma = variance.sqrt();
    let mut v = e;
    for &eps in word.letters() {
        let mut out = vec![0.0; n];
        for (x, nb) in g.adjacency.iter().enumerate() {
            // (A^eps)_(x,y) = 1 when y ~ x and d(base, x) - d(base, y) = +1, -1, 0
            let mut s = 0.0;
            for &y in nb {
                let step = level[x] as isize - level[y] as isize;
                let keep = match eps {
                    Epsilon::Plus => step == 1,
                    Epsilon::Minus => step == -1,
                    Epsilon::Circle => step == 0,
                };
                if keep {
                    s += v[y];
                }
            }
            if eps == Epsilon::Circle {
                s -= mean * v[x];
            }
            out[x] = s / sigma;
        }
        v = out;
    }
    Ok(phi(&v))
}

/// Classical parameters of a constructible graph.
pub fn classical_params_of(spec: GraphSpec) -> Result<ClassicalParams> {
    let fd = match spec {
        GraphSpec::Grassmann { q, n, .. } => FamilyDescriptor::Grassmann { q: q as i64, n: Size::Fixed(n as u32) },
        GraphSpec::Bilinear { q, e, .. } => FamilyDescriptor::Bilinear { q: q as i64, e: Size::Fixed(e as u32) },
    };
    let d = match spec {
        GraphSpec::Grassmann { d, .. } | GraphSpec::Bilinear { d, .. } => d as u32,
    };
    Ok(member(fd, d)?.cp)
}

/// Named batteries: `small` (five graphs up to 130 vertices), `full` (the
/// whole battery, up to 1395 vertices), or a single graph spec.
pub fn battery(name: &str) -> Result<Vec<GraphSpec>> {
    use GraphSpec::*;
    let small = vec![
        Grassmann { q: 2, n: 4, d: 2 },
        Grassmann { q: 3, n: 4, d: 2 },
        Bilinear { q: 2, d: 2, e: 2 },
        Bilinear { q: 2, d: 2, e: 3 },
        Bilinear { q: 3, d: 2, e: 2 },
    ];
    match name {
        "small" => Ok(small),
        "full" => {
            let mut v = small;
            v.extend([Grassmann { q: 2, n: 5, d: 2 }, Grassmann { q: 2, n: 6, d: 3 }, Bilinear { q: 3, d: 2, e: 3 }]);
            Ok(v)
        }
        other => Ok(vec![other.parse()?]),
    }
}

/// One comparison between the explicit graph and the formulas.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleCheck {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleReport {
    pub graph: String,
    pub n_vertices: usize,
    pub checks: Vec<OracleCheck>,
}

impl OracleReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

/// Compares counted intersection numbers, spectrum, vertex count,
/// positivity of `K_(1/b)`, Gibbs moments up to `m = 6` and mixed moments of
/// words of length up to `word_len` against the formula layer.
pub fn check_equivalence(spec: GraphSpec, word_len: usize) -> Result<OracleReport> {
    check_equivalence_at(spec, word_len, |n| vec![0, n / 3, n - 1])
}

/// [`check_equivalence`] with the base vertices of the mixed-moment check
/// chosen by `bases` from the vertex count.
pub fn check_equivalence_at(
    spec: GraphSpec,
    word_len: usize,
    bases: impl FnOnce(usize) -> Vec<usize>,
) -> Result<OracleReport> {
    let g = build(spec)?;
    let cp = classical_params_of(spec)?;
    let mut checks = vec![];
    let mut push =
        |name: &str, pass: bool, detail: String| checks.push(OracleCheck { name: name.into(), pass, detail });

    let ia = intersection_array(&cp)?;
    let emp = empirical_intersection(&g)?;
    let same = emp.b_seq == ia.b_seq && emp.c_seq == ia.c_seq && emp.a_seq == ia.a_seq && emp.k_seq == ia.k_seq;
    push("intersection_array", same, format!("b = {:?}, c = {:?}", fmt_vec(&emp.b_seq), fmt_vec(&emp.c_seq)));

    let st = spectral_table(&cp)?;
    push(
        "vertex_count",
        st.vertex_count == crate::qseries::int(g.n_vertices as i64),
        format!("{} vertices, formula {}", g.n_vertices, st.vertex_count),
    );

    let spectrum = empirical_spectrum(&g)?;
    let mut formula: Vec<(f64, f64)> = st.theta.iter().zip(&st.mult).map(|(t, m)| (to_f64(t), to_f64(m))).collect();
    formula.sort_by(|a, b| b.0.total_cmp(&a.0));
    let spec_ok = spectrum.len() == formula.len()
        && spectrum
            .iter()
            .zip(&formula)
            .all(|(e, f)| (e.0 - f.0).abs() <= CLUSTER_TOL * f.0.abs().max(1.0) && e.1 as f64 == f.1);
    push("spectrum", spec_ok, format!("{spectrum:?}"));

    let tb = 1.0 / cp.b() as f64;
    let min_eig = kt_min_eigenvalue(&g, tb);
    push("kt_psd", min_eig >= -1e-8, format!("min eigenvalue of K_(1/b) = {min_eig:e}"));

    let t = rat(1, cp.b());
    let mu = gibbs_distribution(&cp, &st, &t)?;
    let eg = empirical_gibbs(&g, tb, 6)?;
    let worst = (0..=6)
        .map(|m| (eg.moments[m] - measure_moment(&mu, m as u32)).abs() / measure_moment(&mu, m as u32).abs().max(1.0))
        .fold(0.0, f64::max);
    push("gibbs_moments", worst <= 1e-9, format!("largest relative moment gap {worst:e}"));

    let bases = bases(g.n_vertices);
    if let Some(o) = bases.iter().find(|&&o| o >= g.n_vertices) {
        return Err(Error::InvalidParameters(format!("base vertex {o} out of range for {} vertices", g.n_vertices)));
    }
    let mut worst = 0.0f64;
    for m in 1..=word_len {
        for w in EpsilonWord::all(m) {
            let f = mixed_moment_finite(&cp, &t, &w)?;
            for &o in &bases {
                worst = worst.max((empirical_quantum_components(&g, o, tb, &w)? - f).abs());
            }
        }
    }
    push(
        "quantum_components",
        worst <= 1e-9,
        format!("largest mixed-moment gap {worst:e} over {} base vertices", bases.len()),
    );

    Ok(OracleReport { graph: spec.to_string(), n_vertices: g.n_vertices, checks })
}

fn fmt_vec(v: &[crate::qseries::Rational]) -> Vec<String> {
    v.iter().map(ToString::to_string).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grassmann_4_2_spectrum() {
        let g = build_grassmann(2, 4, 2).unwrap();
        let s = empirical_spectrum(&g).unwrap();
        let rounded: Vec<(i64, usize)> = s.iter().map(|&(x, m)| (x.round() as i64, m)).collect();
        assert_eq!(rounded, vec![(18, 1), (3, 14), (-3, 20)]);
        let b = empirical_spectrum(&build_bilinear(2, 2, 2).unwrap()).unwrap();
        let rounded: Vec<(i64, usize)> = b.iter().map(|&(x, m)| (x.round() as i64, m)).collect();
        assert_eq!(rounded, vec![(9, 1), (1, 9), (-3, 6)]);
    }

    #[test]
    fn gibbs_normalization() {
        let g = build_grassmann(2, 4, 2).unwrap();
        let eg = empirical_gibbs(&g, 0.5, 3).unwrap();
        assert!((eg.moments[0] - 1.0).abs() < 1e-12);
        assert!(eg.moments[1].abs() < 1e-12);
        assert!((eg.moments[2] - 1.0).abs() < 1e-12);
        assert!((eg.mean - 9.0).abs() < 1e-12);
        let cp = classical_params_of(GraphSpec::Grassmann { q: 2, n: 4, d: 2 }).unwrap();
        let st = spectral_table(&cp).unwrap();
        let mu = gibbs_distribution(&cp, &st, &rat(1, 2)).unwrap();
        assert!((eg.moments[3] - measure_moment(&mu, 3)).abs() < 1e-9);
    }

    #[test]
    fn quantum_components_small() {
        let g = build_grassmann(2, 4, 2).unwrap();
        let minus: EpsilonWord = "-".parse().unwrap();
        assert_eq!(empirical_quantum_components(&g, 0, 0.5, &minus).unwrap(), 0.0);
        let cp = classical_params_of(GraphSpec::Grassmann { q: 2, n: 4, d: 2 }).unwrap();
        for w in EpsilonWord::all(4) {
            let f = mixed_moment_finite(&cp, &rat(1, 2), &w).unwrap();
            for o in [0, 7, 30] {
                let e = empirical_quantum_components(&g, o, 0.5, &w).unwrap();
                assert!((e - f).abs() < 1e-9, "{w} base {o}: {e} vs {f}");
            }
        }
    }

    #[test]
    fn small_battery_passes() {
        for spec in battery("small").unwrap() {
            let rep = check_equivalence(spec, 3).unwrap();
            assert!(rep.all_pass(), "{rep:?}");
        }
    }
}
