//! Subcommand bodies: each turns parsed arguments into a JSON payload and a
//! CSV table.

use std::fmt;
use std::fs::File;
use std::io::BufWriter;

use drg_core::families::{catalog, closed_form_preset, convergence_table, limit_regime, member};
use drg_core::fock::{limit_coefficients, mixed_moment_finite, mixed_moment_limit};
use drg_core::gibbs::{check_negative_powers, gibbs_distribution, gibbs_point, in_pi, measure_moment};
use drg_core::limits::{family_closed_form, regime_measure};
use drg_core::oracle::{battery, build, check_equivalence_at};
use drg_core::params::{intersection_array, spectral_table};
use drg_core::{ClassicalParams, DiscreteMeasure, EpsilonWord, Error, LimitKind, LimitRegime, Preset, TRule};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::args::{
    Command, ConvergeArgs, FamiliesArgs, Global, KindName, LimitArgs, OracleArgs, ParamsArgs, PresetName, PsdArgs,
    QcltArgs,
};
use crate::output::{cell, float, floats, rational, rationals, Report, Table};

/// Longest word accepted by `qclt --max-len`; there are `3^m` words of length `m`.
const MAX_WORD_LEN: usize = 8;

#[derive(Debug)]
pub enum CliError {
    Core(Error),
    /// Arguments that parse but do not fit together.
    Usage(String),
    Io(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Usage(m) => write!(f, "usage: {m}"),
            CliError::Io(m) => write!(f, "{m}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

type Result<T> = std::result::Result<T, CliError>;

pub fn run(cmd: &Command, g: &Global) -> Result<Report> {
    match cmd {
        Command::Params(a) => params(a),
        Command::Gibbs(a) => gibbs(&a.params, &a.t.value),
        Command::PsdCheck(a) => psd_check(a),
        Command::Limit(a) => limit(a, g),
        Command::Converge(a) => converge(a, g),
        Command::Qclt(a) => qclt(a),
        Command::Oracle(a) => oracle(a, g),
        Command::Families(a) => families(a),
    }
}

fn classical(a: &ParamsArgs) -> Result<ClassicalParams> {
    Ok(ClassicalParams::new(a.d, a.b, a.alpha.value.clone(), a.beta.value.clone())?)
}

fn params(a: &ParamsArgs) -> Result<Report> {
    let cp = classical(a)?;
    let feas = cp.feasibility();
    let ia = intersection_array(&cp)?;
    let st = spectral_table(&cp)?;
    let d = st.diameter();
    let payload = json!({
        "k": rational(&ia.k),
        "vertex_count": rational(&st.vertex_count),
        "intersection_array": {
            "b": rationals(&ia.b_seq[..d]),
            "c": rationals(&ia.c_seq[1..]),
            "a": rationals(&ia.a_seq),
            "k_i": rationals(&ia.k_seq),
        },
        "theta": rationals(&st.theta),
        "mult": rationals(&st.mult),
        "v_matrix": st.v_matrix.iter().map(|row| rationals(row)).collect::<Vec<_>>(),
        "feasibility": {
            "feasible": feas.is_feasible(),
            "violations": feas.violations.iter().map(ToString::to_string).collect::<Vec<_>>(),
            "notes": feas.notes,
        },
    });
    let mut table = Table::new(&["j", "theta", "mult", "b_j", "c_j", "a_j", "k_j"]);
    for j in 0..=d {
        table.push(vec![
            j.to_string(),
            st.theta[j].to_string(),
            st.mult[j].to_string(),
            ia.b_seq[j].to_string(),
            ia.c_seq[j].to_string(),
            ia.a_seq[j].to_string(),
            ia.k_seq[j].to_string(),
        ]);
    }
    Ok(Report { payload, table, exit: if feas.is_feasible() { 0 } else { 2 } })
}

fn gibbs(a: &ParamsArgs, t: &drg_core::Rational) -> Result<Report> {
    let cp = classical(a)?;
    let st = spectral_table(&cp)?;
    let gp = gibbs_point(&cp, &st, t)?;
    let mut table = Table::new(&["j", "theta", "atom", "mass", "mass_float", "kt_eigenvalue"]);
    let distribution = match gibbs_distribution(&cp, &st, t) {
        Ok(mu) => {
            let masses = mu.exact_masses.clone().expect("finite distributions are exact");
            for j in 0..mu.len() {
                table.push(vec![
                    j.to_string(),
                    st.theta[j].to_string(),
                    cell(mu.atoms[j]),
                    masses[j].to_string(),
                    cell(mu.masses[j]),
                    gp.kt_spectrum[j].to_string(),
                ]);
            }
            json!({ "atoms": floats(&mu.atoms), "masses": rationals(&masses), "positivity": mu.positivity })
        }
        // the normalized distribution needs a positive variance
        Err(Error::NonPositiveVariance(_)) => Value::Null,
        Err(e) => return Err(e.into()),
    };
    let payload = json!({
        "t": rational(t),
        "mean": rational(&gp.mean),
        "variance": rational(&gp.variance),
        "kt_spectrum": rationals(&gp.kt_spectrum),
        "theta": rationals(&st.theta),
        "in_pi": in_pi(&gp),
        "distribution": distribution,
    });
    Ok(Report::ok(payload, table))
}

fn psd_check(a: &PsdArgs) -> Result<Report> {
    let cp = classical(&a.params)?;
    let rep = check_negative_powers(&cp, a.i_max)?;
    let mut table = Table::new(&["i", "t", "in_pi"]);
    let mut checked = vec![];
    for (i, t, ok) in &rep.checked {
        table.push(vec![i.to_string(), t.to_string(), ok.to_string()]);
        checked.push(json!({ "i": i, "t": rational(t), "in_pi": ok }));
    }
    let payload = json!({ "checked": checked, "violations": rep.violations(), "all_pass": rep.all_pass() });
    Ok(Report::ok(payload, table))
}

fn need<T: Copy>(v: Option<T>, flag: &str, what: &str) -> Result<T> {
    v.ok_or_else(|| CliError::Usage(format!("{what} needs {flag}")))
}

fn preset_of(a: &LimitArgs, name: PresetName) -> Result<Preset> {
    let w = "this preset";
    Ok(match name {
        PresetName::Grassmann => Preset::Grassmann { q: need(a.q, "--q", w)?, delta: need(a.delta, "--delta", w)? },
        PresetName::HalfDualPolar => {
            Preset::HalfDualPolar { r: need(a.r, "--r", w)?, epsilon: need(a.epsilon, "--epsilon", w)? }
        }
        PresetName::SecondDualPolar => Preset::SecondDualPolar { r: need(a.r, "--r", w)?, upper: a.upper },
        PresetName::Bilinear => Preset::Bilinear { q: need(a.q, "--q", w)?, delta: need(a.delta, "--delta", w)? },
        PresetName::HermitianForms => Preset::HermitianForms { r: need(a.r, "--r", w)?, upper: a.upper },
    })
}

fn regime_json(r: &LimitRegime) -> Value {
    json!({
        "kind": r.kind.as_str(),
        "b": r.b,
        "alpha": rational(&r.alpha),
        "gamma": float(r.gamma),
        "rho": float(r.rho),
        "eta": r.eta.map(float),
        "sigma": float(r.sigma()),
        "normalizer": float(r.normalizer()),
    })
}

fn measure_json(mu: &DiscreteMeasure) -> Value {
    json!({
        "index": mu.index,
        "atoms": floats(&mu.atoms),
        "masses": floats(&mu.masses),
        "total_mass": float(mu.total_mass()),
        "tail_bound": float(mu.tail_bound),
        "positivity": mu.positivity,
        "moments": (0..=4).map(|m| float(measure_moment(mu, m))).collect::<Vec<_>>(),
    })
}

/// Largest pointwise gap between two measures on the same labels.
fn max_gap(a: &DiscreteMeasure, b: &DiscreteMeasure) -> f64 {
    a.atoms
        .iter()
        .zip(&b.atoms)
        .map(|(x, y)| (x - y).abs() / x.abs().max(1.0))
        .chain(a.masses.iter().zip(&b.masses).map(|(x, y)| (x - y).abs()))
        .fold(0.0, f64::max)
}

fn limit(a: &LimitArgs, g: &Global) -> Result<Report> {
    let jmax = g.jmax as i64;
    let gamma = a.gamma.unwrap_or(0.0);
    let mut cross_check = Value::Null;
    let mut exit = 0;
    let (regime, mu, source) = if let Some(name) = a.preset {
        let p = preset_of(a, name)?;
        let regime = p.regime(gamma)?;
        let closed = family_closed_form(p, gamma, g.jmax, g.prec)?;
        let generic = regime_measure(&regime, 0, jmax, g.prec)?;
        let gap = max_gap(&closed, &generic);
        if !(gap <= g.tol) {
            exit = 3;
        }
        cross_check = json!({ "max_gap": float(gap), "tol": g.tol, "agree": gap <= g.tol });
        if a.generic {
            (regime, generic, "generic")
        } else {
            (regime, closed, "closed_form")
        }
    } else if let Some(fd) = &a.family {
        let regime = limit_regime(fd.value, &a.t_rule.value, a.parity)?;
        let mu = regime_measure(&regime, -jmax, jmax, g.prec)?;
        (regime, mu, "generic")
    } else {
        let kind = match need(a.kind, "--kind", "limit")? {
            KindName::CaseIRho => LimitKind::CaseIRho,
            KindName::CaseIAlphaOverRho => LimitKind::CaseIAlphaOverRho,
            KindName::CaseIi => LimitKind::CaseII,
        };
        let w = "a regime";
        let alpha = a.alpha.as_ref().ok_or_else(|| CliError::Usage("a regime needs --alpha".into()))?.value.clone();
        let regime = LimitRegime::new(kind, need(a.b, "--b", w)?, alpha, gamma, a.rho.unwrap_or(0.0), a.eta)?;
        let mu = regime_measure(&regime, -jmax, jmax, g.prec)?;
        (regime, mu, "generic")
    };
    let mut table = Table::new(&["index", "atom", "mass"]);
    for k in 0..mu.len() {
        table.push(vec![mu.index[k].to_string(), cell(mu.atoms[k]), cell(mu.masses[k])]);
    }
    let payload = json!({
        "regime": regime_json(&regime),
        "source": source,
        "measure": measure_json(&mu),
        "cross_check": cross_check,
    });
    Ok(Report { payload, table, exit })
}

fn converge(a: &ConvergeArgs, g: &Global) -> Result<Report> {
    let fd = a.family.value;
    let rule = &a.t_rule.value;
    let rows = convergence_table(fd, rule, &a.d_list, a.window as i64, g.jmax as i64, g.prec)?;
    let mut limits = serde_json::Map::new();
    for parity in [0, 1] {
        if a.d_list.iter().any(|d| d % 2 == parity) {
            let key = if parity == 0 { "even" } else { "odd" };
            limits.insert(key.into(), regime_json(&limit_regime(fd, rule, parity)?));
        }
    }
    let mut table = Table::new(&["d", "t", "t_sqrt_k", "discrepancy", "worst_label"]);
    let mut out = vec![];
    for r in &rows {
        table.push(vec![
            r.d.to_string(),
            r.t.to_string(),
            cell(r.t_sqrt_k),
            cell(r.discrepancy),
            r.worst_label.to_string(),
        ]);
        out.push(json!({
            "d": r.d,
            "t": rational(&r.t),
            "t_sqrt_k": float(r.t_sqrt_k),
            "discrepancy": float(r.discrepancy),
            "worst_label": r.worst_label,
        }));
    }
    let decreasing = rows.windows(2).all(|w| w[1].discrepancy < w[0].discrepancy);
    let payload = json!({ "limits": limits, "rows": out, "strictly_decreasing": decreasing });
    Ok(Report::ok(payload, table))
}

fn qclt(a: &QcltArgs) -> Result<Report> {
    let words: Vec<EpsilonWord> = match &a.words {
        Some(ws) => ws.iter().map(|w| w.value.clone()).collect(),
        None => {
            if !(1..=MAX_WORD_LEN).contains(&a.max_len) {
                return Err(CliError::Usage(format!("--max-len must be in 1..={MAX_WORD_LEN}")));
            }
            (1..=a.max_len).flat_map(EpsilonWord::all).collect()
        }
    };
    let longest = words.iter().map(EpsilonWord::len).max().unwrap_or(1);
    let fd = a.family.value;
    let rule: &TRule = &a.t_rule.value;
    let mut fcs = [None, None];
    let mut finite = vec![];
    for &d in &a.d_list {
        let p = (d % 2) as usize;
        if fcs[p].is_none() {
            fcs[p] = Some(limit_coefficients(&limit_regime(fd, rule, d % 2)?, longest + 1)?);
        }
        let cp = member(fd, d)?.cp;
        let t = rule.t(&cp);
        finite.push((d, t, cp));
    }
    let mut table = Table::new(&["word", "d", "t", "finite", "limit", "gap"]);
    let mut out = vec![];
    for w in &words {
        let mut rows = vec![];
        let mut gaps = vec![];
        for (d, t, cp) in &finite {
            let fc = fcs[(d % 2) as usize].as_ref().expect("set above");
            let f = mixed_moment_finite(cp, t, w)?;
            let l = mixed_moment_limit(fc, w)?;
            gaps.push((f - l).abs());
            table.push(vec![w.to_string(), d.to_string(), t.to_string(), cell(f), cell(l), cell((f - l).abs())]);
            rows.push(
                json!({ "d": d, "t": rational(t), "finite": float(f), "limit": float(l), "gap": float((f - l).abs()) }),
            );
        }
        let decreasing = gaps.windows(2).all(|g| g[1] < g[0]);
        out.push(json!({ "word": w.to_string(), "rows": rows, "strictly_decreasing": decreasing }));
    }
    Ok(Report::ok(json!({ "words": out }), table))
}

fn oracle(a: &OracleArgs, g: &Global) -> Result<Report> {
    let specs = battery(&a.battery)?;
    if a.dump.is_some() && specs.len() != 1 {
        return Err(CliError::Usage("--dump needs a battery of one graph".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(g.seed);
    let mut table = Table::new(&["graph", "check", "pass", "detail"]);
    let mut reports = vec![];
    let mut all = true;
    for spec in specs {
        let mut bases = vec![];
        let rep = check_equivalence_at(spec, a.word_len, |n| {
            bases = vec![0, rng.random_range(0..n), rng.random_range(0..n)];
            bases.clone()
        })?;
        all &= rep.all_pass();
        let mut checks = vec![];
        for c in &rep.checks {
            table.push(vec![rep.graph.clone(), c.name.clone(), c.pass.to_string(), c.detail.clone()]);
            checks.push(json!({ "name": c.name, "pass": c.pass, "detail": c.detail }));
        }
        reports.push(json!({
            "graph": rep.graph,
            "n_vertices": rep.n_vertices,
            "base_vertices": bases,
            "pass": rep.all_pass(),
            "checks": checks,
        }));
        if let Some(path) = &a.dump {
            let io = |e: std::io::Error| CliError::Io(format!("{}: {e}", path.display()));
            let file = File::create(path).map_err(io)?;
            build(spec)?.write_edges(BufWriter::new(file)).map_err(io)?;
        }
    }
    let payload = json!({ "reports": reports, "all_pass": all });
    Ok(Report { payload, table, exit: if all { 0 } else { 3 } })
}

fn preset_json(p: &Preset) -> Value {
    match *p {
        Preset::Grassmann { q, delta } => json!({ "name": p.name(), "q": q, "delta": delta }),
        Preset::HalfDualPolar { r, epsilon } => json!({ "name": p.name(), "r": r, "epsilon": epsilon }),
        Preset::SecondDualPolar { r, upper } => json!({ "name": p.name(), "r": r, "upper": upper }),
        Preset::Bilinear { q, delta } => json!({ "name": p.name(), "q": q, "delta": delta }),
        Preset::HermitianForms { r, upper } => json!({ "name": p.name(), "r": r, "upper": upper }),
    }
}

fn families(a: &FamiliesArgs) -> Result<Report> {
    if a.x < 2 {
        return Err(Error::InvalidParameters(format!("need --x >= 2, got {}", a.x)).into());
    }
    let mut table = Table::new(&["descriptor", "parity", "preset", "kind", "rho", "eta"]);
    let mut out = vec![];
    for fd in catalog(a.x) {
        let mut subnets = vec![];
        for parity in [0, 1] {
            let preset = closed_form_preset(fd, parity)?;
            let regime = limit_regime(fd, &TRule::Zero, parity)?;
            table.push(vec![
                fd.to_string(),
                parity.to_string(),
                preset.map_or(String::new(), |p| p.name().to_string()),
                regime.kind.as_str().into(),
                cell(regime.rho),
                regime.eta.map_or(String::new(), cell),
            ]);
            subnets.push(json!({
                "d_parity": parity,
                "preset": preset.as_ref().map(preset_json),
                "regime": regime_json(&regime),
            }));
        }
        let b = member(fd, 1)?.cp.b();
        out.push(json!({
            "descriptor": fd.to_string(),
            "family": fd.name(),
            "b": b,
            "rho_zero": fd.is_rho_zero(),
            "e": fd.e_exponent().map(|e| rational(&e)),
            "subnets": subnets,
        }));
    }
    let presets = ["grassmann", "half_dual_polar", "second_dual_polar", "bilinear", "hermitian_forms"];
    Ok(Report::ok(json!({ "families": out, "presets": presets }), table))
}

pub fn exit_code(e: &CliError) -> u8 {
    match e {
        CliError::Core(Error::Consistency(_) | Error::Oracle(_)) => 3,
        CliError::Core(_) => 2,
        CliError::Usage(_) => 64,
        CliError::Io(_) => 74,
    }
}
