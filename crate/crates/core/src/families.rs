//! The eleven known infinite families with classical parameters and `b != 1`:
//! parameter constructors, Gibbs-parameter schedules along a family, and the
//! limit regime each family sequence realizes.

use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::gibbs::{gibbs_distribution, DiscreteMeasure};
use crate::limits::{regime_measure, LimitKind, LimitRegime, Preset, Sample};
use crate::params::{spectral_table, ClassicalParams};
use crate::qseries::{gauss_bracket, int, pow, rat, to_f64, Rational};

/// Dual polar graph types, with `beta = b^e`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DualPolarType {
    C,
    B,
    D,
    /// `2D_(d+1)`.
    TwoD,
    /// `2A_(2d)(r)`, `b = r^2`.
    TwoAEven,
    /// `2A_(2d-1)(r)`, `b = r^2`.
    TwoAOdd,
}

impl DualPolarType {
    pub const ALL: [DualPolarType; 6] = [Self::C, Self::B, Self::D, Self::TwoD, Self::TwoAEven, Self::TwoAOdd];

    /// The exponent `e` in `beta = b^e`.
    pub fn e(self) -> Rational {
        match self {
            Self::C | Self::B => int(1),
            Self::D => int(0),
            Self::TwoD => int(2),
            Self::TwoAEven => rat(3, 2),
            Self::TwoAOdd => rat(1, 2),
        }
    }

    /// Whether the field parameter is `r` with `b = r^2`.
    pub fn hermitian(self) -> bool {
        matches!(self, Self::TwoAEven | Self::TwoAOdd)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Self::C => "C",
            Self::B => "B",
            Self::D => "D",
            Self::TwoD => "2D",
            Self::TwoAEven => "2A_even",
            Self::TwoAOdd => "2A_odd",
        }
    }
}

impl FromStr for DualPolarType {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|t| t.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidParameters(format!("unknown dual polar type {s:?}")))
    }
}

/// The second size parameter of a family: either fixed, or tied to the
/// diameter by a constant offset (see each family for the base expression).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Size {
    Fixed(u32),
    Offset(i64),
}

/// A family of distance-regular graphs with classical parameters.
///
/// Prime-power conditions on `q` and `r` are not enforced; the parameter
/// formulas are polynomial in them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FamilyDescriptor {
    /// `J_q(n, d)`; `Offset(o)` means `n = 2d + o`, so `o = 2 delta - 1`.
    Grassmann {
        q: i64,
        n: Size,
    },
    /// Twisted Grassmann graph on `F_q^(2d+1)`.
    TwistedGrassmann {
        q: i64,
    },
    /// Dual polar graph; `q` is `b`, or `r` with `b = r^2` for the `2A` types.
    DualPolar {
        kind: DualPolarType,
        q: i64,
    },
    Hemmeter {
        q: i64,
    },
    /// `D_(n,n)(r)`; `Offset(o)` means `n = 2d + o` with `o` in `{0, 1}`.
    HalfDualPolar {
        r: i64,
        n: Size,
    },
    /// `Ust_n(r)`; sizes as for the half dual polar graphs.
    Ustimenko {
        r: i64,
        n: Size,
    },
    /// `2A_(2d-1)(r)` with its second parameter set, `b = -r`.
    SecondHermitianDualPolar {
        r: i64,
    },
    /// `Bil(d x e, q)`; `Offset(o)` means `e = d + o`, so `o = 2 delta`.
    Bilinear {
        q: i64,
        e: Size,
    },
    /// `Alt(n, r)`; `Offset(o)` means `n = 2d + o` with `o` in `{0, 1}`.
    Alternating {
        r: i64,
        n: Size,
    },
    /// `Qua(n, r)`; `Offset(o)` means `n = 2d + o` with `o` in `{-1, 0}`.
    Quadratic {
        r: i64,
        n: Size,
    },
    /// `Her(d, r^2)`.
    HermitianForms {
        r: i64,
    },
}

/// One member of a family.
#[derive(Debug, Clone, PartialEq)]
pub struct FamilyMember {
    pub descriptor: FamilyDescriptor,
    pub d: u32,
    pub cp: ClassicalParams,
    /// Parity of the quantity selecting the limit subnet: `n` for the half
    /// dual polar, Ustimenko, alternating and quadratic forms graphs, `d` for
    /// the dual polar and Hermitian families, none otherwise.
    pub subnet_tag: Option<u32>,
}

fn bad<T>(msg: String) -> Result<T> {
    Err(Error::InvalidParameters(msg))
}

fn resolve(size: Size, base: i64) -> Result<u32> {
    match size {
        Size::Fixed(n) => Ok(n),
        Size::Offset(o) => u32::try_from(base + o).or_else(|_| bad(format!("size {base} + {o} is negative"))),
    }
}

/// `d = floor(n/2)`, `b = r^2`, `m = 2 ceil(n/2) - 1`; checks `d` against `n`.
fn half_size(r: i64, n: u32, d: u32) -> Result<(i64, u32)> {
    if n / 2 != d {
        return bad(format!("n = {n} gives diameter {}, not {d}", n / 2));
    }
    Ok((r * r, 2 * n.div_ceil(2) - 1))
}

impl FamilyDescriptor {
    pub fn name(&self) -> String {
        match self {
            Self::Grassmann { .. } => "grassmann".into(),
            Self::TwistedGrassmann { .. } => "twisted_grassmann".into(),
            Self::DualPolar { kind, .. } => format!("dual_polar_{}", kind.as_str()),
            Self::Hemmeter { .. } => "hemmeter".into(),
            Self::HalfDualPolar { .. } => "half_dual_polar".into(),
            Self::Ustimenko { .. } => "ustimenko".into(),
            Self::SecondHermitianDualPolar { .. } => "second_hermitian_dual_polar".into(),
            Self::Bilinear { .. } => "bilinear".into(),
            Self::Alternating { .. } => "alternating".into(),
            Self::Quadratic { .. } => "quadratic".into(),
            Self::HermitianForms { .. } => "hermitian_forms".into(),
        }
    }

    /// `q` or `r`.
    pub fn field(&self) -> i64 {
        match *self {
            Self::Grassmann { q, .. }
            | Self::TwistedGrassmann { q }
            | Self::DualPolar { q, .. }
            | Self::Hemmeter { q }
            | Self::Bilinear { q, .. } => q,
            Self::HalfDualPolar { r, .. }
            | Self::Ustimenko { r, .. }
            | Self::SecondHermitianDualPolar { r }
            | Self::Alternating { r, .. }
            | Self::Quadratic { r, .. }
            | Self::HermitianForms { r } => r,
        }
    }

    /// `e` for dual polar graphs (`0` for Hemmeter graphs).
    pub fn e_exponent(&self) -> Option<Rational> {
        match self {
            Self::DualPolar { kind, .. } => Some(kind.e()),
            Self::Hemmeter { .. } => Some(int(0)),
            _ => None,
        }
    }

    /// Families whose limit is the `alpha = 0`, `rho = 0` case.
    pub fn is_rho_zero(&self) -> bool {
        matches!(self, Self::DualPolar { .. } | Self::Hemmeter { .. })
    }

    fn size(&self) -> Option<Size> {
        match *self {
            Self::Grassmann { n, .. }
            | Self::HalfDualPolar { n, .. }
            | Self::Ustimenko { n, .. }
            | Self::Alternating { n, .. }
            | Self::Quadratic { n, .. } => Some(n),
            Self::Bilinear { e, .. } => Some(e),
            _ => None,
        }
    }
}

impl fmt::Display for FamilyDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let field = match self {
            Self::Grassmann { q, .. }
            | Self::TwistedGrassmann { q }
            | Self::DualPolar { q, .. }
            | Self::Hemmeter { q }
            | Self::Bilinear { q, .. } => format!("q={q}"),
            _ => format!("r={}", self.field()),
        };
        write!(f, "{}:{field}", self.name())?;
        let key = if matches!(self, Self::Bilinear { .. }) { "e" } else { "n" };
        match self.size() {
            Some(Size::Fixed(n)) => write!(f, ",{key}={n}"),
            Some(Size::Offset(o)) => write!(f, ",offset={o}"),
            None => Ok(()),
        }
    }
}

/// `name:key=value,...`, e.g. `grassmann:q=2,delta=1`, `dual_polar_C:q=2`,
/// `half_dual_polar:r=2,n=8`, `bilinear:q=2,delta=1/2`, `alternating:r=2,eps=1`.
///
/// Size keys: `n` (or `e` for bilinear) fixes the size, `offset` gives the
/// raw offset, `delta` the Grassmann/bilinear `delta`, and `eps` the parity
/// of `n` for the half-dual-polar-like families.
impl FromStr for FamilyDescriptor {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (name, rest) = s.split_once(':').unwrap_or((s, ""));
        let mut field = None;
        let mut size = None;
        for kv in rest.split(',').filter(|p| !p.is_empty()) {
            let Some((k, v)) = kv.split_once('=') else {
                return bad(format!("expected key=value, got {kv:?}"));
            };
            let int_val = || v.trim().parse::<i64>().or_else(|_| bad(format!("bad integer {v:?} for {k}")));
            match k.trim() {
                "q" | "r" => field = Some(int_val()?),
                "n" | "e" => {
                    size = Some(Size::Fixed(u32::try_from(int_val()?).or_else(|_| bad(format!("{k} must be >= 0")))?))
                }
                "offset" => size = Some(Size::Offset(int_val()?)),
                "eps" | "epsilon" => size = Some(Size::Offset(int_val()?)),
                "delta" => {
                    let two = v
                        .trim()
                        .parse::<Rational>()
                        .ok()
                        .map(|x| x * int(2))
                        .filter(|x| x.is_integer())
                        .and_then(|x| i64::try_from(x.to_integer()).ok())
                        .ok_or_else(|| Error::InvalidParameters(format!("delta must be a half-integer, got {v:?}")))?;
                    let off = match name {
                        "grassmann" => two - 1,
                        "bilinear" => two,
                        _ => return bad(format!("delta is not a parameter of {name}")),
                    };
                    size = Some(Size::Offset(off));
                }
                other => return bad(format!("unknown key {other:?}")),
            }
        }
        let Some(x) = field else {
            return bad(format!("{name} needs q= or r="));
        };
        let need = |default: Option<Size>| {
            size.or(default)
                .ok_or_else(|| Error::InvalidParameters(format!("{name} needs a size (n, e, offset, delta or eps)")))
        };
        let fd = match name {
            "grassmann" => Self::Grassmann { q: x, n: need(None)? },
            "twisted_grassmann" => Self::TwistedGrassmann { q: x },
            "hemmeter" => Self::Hemmeter { q: x },
            "half_dual_polar" => Self::HalfDualPolar { r: x, n: need(None)? },
            "ustimenko" => Self::Ustimenko { r: x, n: need(None)? },
            "second_hermitian_dual_polar" => Self::SecondHermitianDualPolar { r: x },
            "bilinear" => Self::Bilinear { q: x, e: need(None)? },
            "alternating" => Self::Alternating { r: x, n: need(None)? },
            "quadratic" => Self::Quadratic { r: x, n: need(None)? },
            "hermitian_forms" => Self::HermitianForms { r: x },
            _ => match name.strip_prefix("dual_polar_") {
                Some(t) => Self::DualPolar { kind: t.parse()?, q: x },
                None => return bad(format!("unknown family {name:?}")),
            },
        };
        Ok(fd)
    }
}

/// The member of diameter `d`.
pub fn member(fd: FamilyDescriptor, d: u32) -> Result<FamilyMember> {
    if d == 0 {
        return bad("diameter must be at least 1".into());
    }
    let x = fd.field();
    if x < 2 {
        return bad(format!("{} needs q or r >= 2, got {x}", fd.name()));
    }
    let di = d as i64;
    let mut tag = None;
    let (b, alpha, beta) = match fd {
        FamilyDescriptor::Grassmann { q, n } => {
            let n = resolve(n, 2 * di)?;
            if n < 2 * d {
                return bad(format!("Grassmann graphs need n >= 2d, got n = {n}, d = {d}"));
            }
            (q, int(q), int(q) * gauss_bracket(n - d, q))
        }
        FamilyDescriptor::TwistedGrassmann { q } => (q, int(q), int(q) * gauss_bracket(d + 1, q)),
        FamilyDescriptor::DualPolar { kind, q } => {
            tag = Some(d % 2);
            let beta = match kind {
                DualPolarType::C | DualPolarType::B => int(q),
                DualPolarType::D => int(1),
                DualPolarType::TwoD => int(q * q),
                DualPolarType::TwoAEven => int(q * q * q),
                DualPolarType::TwoAOdd => int(q),
            };
            (if kind.hermitian() { q * q } else { q }, int(0), beta)
        }
        FamilyDescriptor::Hemmeter { q } => {
            tag = Some(d % 2);
            (q, int(0), int(1))
        }
        FamilyDescriptor::HalfDualPolar { r, n } | FamilyDescriptor::Ustimenko { r, n } => {
            let n = resolve(n, 2 * di)?;
            let (b, m) = half_size(r, n, d)?;
            tag = Some(n % 2);
            (b, int(r * (r + 1)), int(r) * gauss_bracket(m, r))
        }
        FamilyDescriptor::SecondHermitianDualPolar { r } => {
            tag = Some(d % 2);
            let rr = int(r);
            let one_minus = int(1 - r);
            let alpha = &rr * int(r + 1) / &one_minus;
            let beta = &rr * (int(1) + pow(&int(-r), di)) / one_minus;
            (-r, alpha, beta)
        }
        FamilyDescriptor::Bilinear { q, e } => {
            let e = resolve(e, di)?;
            if e < d {
                return bad(format!("bilinear forms graphs need e >= d, got e = {e}, d = {d}"));
            }
            (q, int(q - 1), pow(&int(q), e as i64) - int(1))
        }
        FamilyDescriptor::Alternating { r, n } | FamilyDescriptor::Quadratic { r, n } => {
            let n = resolve(n, 2 * di)?;
            let alt_n = if matches!(fd, FamilyDescriptor::Quadratic { .. }) { n + 1 } else { n };
            let (b, m) = half_size(r, alt_n, d)?;
            tag = Some(alt_n % 2);
            (b, int(r * r - 1), pow(&int(r), m as i64) - int(1))
        }
        FamilyDescriptor::HermitianForms { r } => {
            tag = Some(d % 2);
            (-r, int(-r - 1), -pow(&int(-r), di) - int(1))
        }
    };
    Ok(FamilyMember { descriptor: fd, d, cp: ClassicalParams::new(d, b, alpha, beta)?, subnet_tag: tag })
}

/// Gibbs parameter along a family.
#[derive(Debug, Clone, PartialEq)]
pub enum TRule {
    /// The vacuum state, `t = 0`.
    Zero,
    Constant(Rational),
    /// `t = b^-(ceil(num d / den) + offset)`, a point of `pi` by the
    /// negative-powers property.
    NegPow {
        num: i64,
        den: i64,
        offset: i64,
    },
}

impl TRule {
    pub fn t(&self, cp: &ClassicalParams) -> Rational {
        match self {
            TRule::Zero => Rational::zero(),
            TRule::Constant(t) => t.clone(),
            TRule::NegPow { num, den, offset } => {
                let e = Integer::div_ceil(&(num * cp.d() as i64), den) + offset;
                pow(&int(cp.b()), -e)
            }
        }
    }

    fn period(&self) -> i64 {
        match self {
            TRule::NegPow { den, .. } => 2.lcm(den),
            _ => 2,
        }
    }
}

impl fmt::Display for TRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TRule::Zero => write!(f, "zero"),
            TRule::Constant(t) => write!(f, "const={t}"),
            TRule::NegPow { num, den, offset } => {
                write!(f, "pow={num}")?;
                if *den != 1 {
                    write!(f, "/{den}")?;
                }
                if *offset != 0 {
                    write!(f, "{offset:+}")?;
                }
                Ok(())
            }
        }
    }
}

/// `zero`, `const=p/q`, or `pow=a/c[+o]` for `t = b^-(ceil(a d/c) + o)`,
/// e.g. `pow=1`, `pow=1/2`, `pow=3/4`, `pow=1+1`.
impl FromStr for TRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "zero" || s == "0" {
            return Ok(TRule::Zero);
        }
        if let Some(v) = s.strip_prefix("const=") {
            let t = v.parse::<Rational>().or_else(|_| bad(format!("bad rational {v:?}")))?;
            return Ok(if t.is_zero() { TRule::Zero } else { TRule::Constant(t) });
        }
        let Some(v) = s.strip_prefix("pow=") else {
            return bad(format!("bad t-rule {s:?}; use zero, const=p/q or pow=a/c[+o]"));
        };
        let split = v[1..].find(['+', '-']).map(|i| i + 1);
        let (slope, offset) = match split {
            Some(i) => (&v[..i], v[i..].parse::<i64>().or_else(|_| bad(format!("bad offset in {v:?}")))?),
            None => (v, 0),
        };
        let (num, den) = match slope.split_once('/') {
            Some((a, c)) => (a.parse::<i64>(), c.parse::<i64>()),
            None => (slope.parse::<i64>(), Ok(1)),
        };
        match (num, den) {
            (Ok(num), Ok(den)) if den > 0 => Ok(TRule::NegPow { num, den, offset }),
            _ => bad(format!("bad slope in {v:?}")),
        }
    }
}

/// `k (1 - t)(1 + t + t a_1)` with `a_1 = k - ([d] - 1)(beta - alpha) - 1`.
fn variance(cp: &ClassicalParams, t: &Rational) -> Rational {
    let one = Rational::one();
    let dd = cp.bracket(cp.d() as i64);
    let k = &dd * cp.beta();
    let a_1 = &k - (dd - &one) * (cp.beta() - cp.alpha()) - &one;
    &k * (&one - t) * (&one + t + t * a_1)
}

/// Members of `fd` at the given diameters, each with its Gibbs parameter.
pub fn schedule(fd: FamilyDescriptor, d_list: &[u32], rule: &TRule) -> Result<Vec<Sample>> {
    d_list
        .iter()
        .map(|&d| {
            let cp = member(fd, d)?.cp;
            let t = rule.t(&cp);
            let var = variance(&cp, &t);
            if !var.is_positive() {
                return Err(Error::NonPositiveVariance(format!("variance {var} at d = {d}, t = {t}")));
            }
            Ok((cp, t))
        })
        .collect()
}

fn t_sqrt_k(cp: &ClassicalParams, t: &Rational) -> f64 {
    let k = cp.bracket(cp.d() as i64) * cp.beta();
    let sq = to_f64(&(t * t * k)).sqrt();
    if t.is_negative() {
        -sq
    } else {
        sq
    }
}

/// `gamma = lim t sqrt(k)` along the diameters of the given parity, from the
/// exact value deep in the sequence. Errors when the limit does not exist.
pub fn gamma_limit(fd: FamilyDescriptor, rule: &TRule, d_parity: u32) -> Result<f64> {
    if matches!(rule, TRule::Zero) {
        return Ok(0.0);
    }
    let period = rule.period();
    let base = 240 - 240 % period;
    let mut values = vec![];
    for start in [base, base + 8 * period] {
        for r in (0..period).filter(|r| (*r as u32) % 2 == d_parity % 2) {
            let d = (start + r) as u32;
            let cp = member(fd, d)?.cp;
            values.push(t_sqrt_k(&cp, &rule.t(&cp)));
        }
    }
    let scale = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if scale < 1e-9 {
        return Ok(0.0);
    }
    let g = values[values.len() - 1];
    if !scale.is_finite() || values.iter().any(|v| (v - g).abs() > 1e-9 * scale) {
        return Err(Error::InvalidParameters(format!(
            "t sqrt(k) has no limit along {} with t-rule {rule} (d parity {d_parity})",
            fd.name()
        )));
    }
    Ok(g)
}

/// `eta` for the dual polar types and the offset in `c`.
#[derive(Debug, Clone, PartialEq)]
pub struct EtaEntry {
    /// `eta = b^exponent`.
    pub exponent: Rational,
    /// Accumulation point of `sqrt(k (b-1))/b^c` along the parity subnet.
    pub eta: f64,
    /// `c = (d - parity)/2 + c_shift` for large `d`.
    pub c_shift: i64,
}

/// The `eta` table of the `rho = 0` families by `e` and parity of `d`.
pub fn eta_table(fd: FamilyDescriptor, d_parity: u32) -> Result<EtaEntry> {
    let Some(e) = fd.e_exponent() else {
        return bad(format!("{} is not a rho = 0 family", fd.name()));
    };
    let b = member(fd, 1)?.cp.b();
    let even = d_parity.is_multiple_of(2);
    let key = (e.numer().clone(), e.denom().clone());
    let (exp, c_shift) = match (key.0.to_string().as_str(), key.1.to_string().as_str(), even) {
        ("1", "1", true) => (rat(1, 2), 0),
        ("1", "1", false) => (int(1), 0),
        ("0", "1", true) => (int(1), -1),
        ("0", "1", false) => (rat(1, 2), 0),
        ("2", "1", true) => (int(1), 0),
        ("2", "1", false) => (rat(1, 2), 1),
        ("3", "2", true) => (rat(3, 4), 0),
        ("3", "2", false) => (rat(5, 4), 0),
        ("1", "2", true) => (rat(5, 4), -1),
        ("1", "2", false) => (rat(3, 4), 0),
        _ => unreachable!("dual polar exponents are fixed"),
    };
    let eta = (b as f64).powf(to_f64(&exp));
    Ok(EtaEntry { exponent: exp, eta, c_shift })
}

/// The closed-form preset matching the limit of `fd` on a parity subnet, if
/// the family has one.
pub fn closed_form_preset(fd: FamilyDescriptor, d_parity: u32) -> Result<Option<Preset>> {
    let offset = |name: &str| match fd.size() {
        Some(Size::Offset(o)) => Ok(o),
        _ => bad(format!("{name} needs an offset size to have a limit")),
    };
    let upper = d_parity % 2 == 1;
    let p = match fd {
        FamilyDescriptor::Grassmann { q, .. } => {
            Preset::Grassmann { q, delta: (offset("grassmann")? + 1) as f64 / 2.0 }
        }
        FamilyDescriptor::TwistedGrassmann { q } => Preset::Grassmann { q, delta: 1.0 },
        FamilyDescriptor::DualPolar { .. } | FamilyDescriptor::Hemmeter { .. } => return Ok(None),
        FamilyDescriptor::HalfDualPolar { r, .. } | FamilyDescriptor::Ustimenko { r, .. } => {
            let o = offset(&fd.name())?;
            Preset::HalfDualPolar { r, epsilon: o.rem_euclid(2) as u8 }
        }
        FamilyDescriptor::SecondHermitianDualPolar { r } => Preset::SecondDualPolar { r, upper },
        FamilyDescriptor::Bilinear { q, .. } => Preset::Bilinear { q, delta: offset("bilinear")? as f64 / 2.0 },
        FamilyDescriptor::Alternating { r, .. } | FamilyDescriptor::Quadratic { r, .. } => {
            let mut o = offset(&fd.name())?;
            if matches!(fd, FamilyDescriptor::Quadratic { .. }) {
                o += 1;
            }
            let delta = if o.rem_euclid(2) == 0 { -0.25 } else { 0.25 };
            Preset::Bilinear { q: r * r, delta }
        }
        FamilyDescriptor::HermitianForms { r } => Preset::HermitianForms { r, upper },
    };
    Ok(Some(p))
}

/// The limit regime of the family sequence on the diameters of the given
/// parity, with `gamma` from the t-rule.
pub fn limit_regime(fd: FamilyDescriptor, rule: &TRule, d_parity: u32) -> Result<LimitRegime> {
    let gamma = gamma_limit(fd, rule, d_parity)?;
    match closed_form_preset(fd, d_parity)? {
        Some(p) => p.regime(gamma),
        None => {
            let entry = eta_table(fd, d_parity)?;
            let b = member(fd, 1)?.cp.b();
            LimitRegime::new(LimitKind::CaseII, b, int(0), gamma, 0.0, Some(entry.eta))
        }
    }
}

/// One diameter of a finite-versus-limit comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRow {
    pub d: u32,
    pub t: Rational,
    pub t_sqrt_k: f64,
    /// Largest atom or mass gap over the compared labels.
    pub discrepancy: f64,
    /// Label at which the largest gap occurs.
    pub worst_label: i64,
}

/// Compares the finite distribution at diameter `d` with the limit `mu` over
/// the labels `0..=window`, or `-window..=window` for the `rho = 0` families.
/// Label `j` is the finite atom `theta_(d-j)`, or `theta_(c-j)` when `rho = 0`;
/// labels whose eigenvalue index falls outside `0..=d` are skipped.
pub fn finite_limit_discrepancy(
    fd: FamilyDescriptor,
    rule: &TRule,
    d: u32,
    mu: &DiscreteMeasure,
    window: i64,
) -> Result<ConvergenceRow> {
    let cp = member(fd, d)?.cp;
    let t = rule.t(&cp);
    let st = spectral_table(&cp)?;
    let fin = gibbs_distribution(&cp, &st, &t)?;
    let di = d as i64;
    let (centre, lo) = if fd.is_rho_zero() {
        let parity = d % 2;
        ((di - parity as i64) / 2 + eta_table(fd, parity)?.c_shift, -window)
    } else {
        (di, 0)
    };
    let (mut worst, mut worst_label) = (0.0f64, lo);
    for j in lo..=window {
        let idx = centre - j;
        if idx < 0 || idx > di {
            continue;
        }
        let Some(k) = mu.index.iter().position(|&l| l == j) else {
            return bad(format!("label {j} is outside the limit measure; raise jmax"));
        };
        let gap = (fin.atoms[idx as usize] - mu.atoms[k]).abs().max((fin.masses[idx as usize] - mu.masses[k]).abs());
        if gap > worst {
            (worst, worst_label) = (gap, j);
        }
    }
    Ok(ConvergenceRow { d, t_sqrt_k: t_sqrt_k(&cp, &t), t, discrepancy: worst, worst_label })
}

/// Finite-versus-limit discrepancies along `d_list`, each diameter compared
/// with the limit of its parity subnet.
pub fn convergence_table(
    fd: FamilyDescriptor,
    rule: &TRule,
    d_list: &[u32],
    window: i64,
    j_max: i64,
    eps: f64,
) -> Result<Vec<ConvergenceRow>> {
    let mut limits: [Option<DiscreteMeasure>; 2] = [None, None];
    d_list
        .iter()
        .map(|&d| {
            let p = (d % 2) as usize;
            if limits[p].is_none() {
                let r = limit_regime(fd, rule, d % 2)?;
                limits[p] = Some(regime_measure(&r, -j_max, j_max, eps)?);
            }
            finite_limit_discrepancy(fd, rule, d, limits[p].as_ref().expect("set above"), window)
        })
        .collect()
}

/// One descriptor per family, type and subnet, for a field parameter `x`.
pub fn catalog(x: i64) -> Vec<FamilyDescriptor> {
    use FamilyDescriptor::*;
    let mut v = vec![Grassmann { q: x, n: Size::Offset(1) }, TwistedGrassmann { q: x }];
    v.extend(DualPolarType::ALL.map(|kind| DualPolar { kind, q: x }));
    v.push(Hemmeter { q: x });
    for o in [0, 1] {
        v.push(HalfDualPolar { r: x, n: Size::Offset(o) });
        v.push(Ustimenko { r: x, n: Size::Offset(o) });
    }
    v.push(SecondHermitianDualPolar { r: x });
    v.push(Bilinear { q: x, e: Size::Offset(0) });
    for o in [0, 1] {
        v.push(Alternating { r: x, n: Size::Offset(o) });
        v.push(Quadratic { r: x, n: Size::Offset(o - 1) });
    }
    v.push(HermitianForms { r: x });
    v
}
