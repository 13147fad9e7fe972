//! Command-line grammar. Every argument struct serializes to the `inputs`
//! echo, with exact values (rationals, descriptors) kept as typed.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use drg_core::{EpsilonWord, FamilyDescriptor, Rational, TRule};
use serde::{Serialize, Serializer};

/// A parsed value that echoes the text it was parsed from.
#[derive(Debug, Clone)]
pub struct Given<T> {
    pub raw: String,
    pub value: T,
}

impl<T> Serialize for Given<T> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.raw)
    }
}

fn given<T: FromStr>(s: &str) -> Result<Given<T>, String>
where
    T::Err: fmt::Display,
{
    s.parse().map(|value| Given { raw: s.to_string(), value }).map_err(|e: T::Err| e.to_string())
}

/// Parses `p/q`, an integer, or a terminating decimal such as `-0.125`,
/// all exactly.
pub fn parse_rational(s: &str) -> Result<Rational, String> {
    let t = s.trim();
    let err = || format!("not a rational number: {s:?} (use p/q, an integer or a decimal)");
    let Some((whole, frac)) = t.split_once('.') else {
        return t.parse::<Rational>().map_err(|_| err());
    };
    let (sign, digits) = match whole.strip_prefix('-') {
        Some(w) => ("-", w),
        None => ("", whole.strip_prefix('+').unwrap_or(whole)),
    };
    let all_digits = |x: &str| x.bytes().all(|c| c.is_ascii_digit());
    if frac.is_empty() || !all_digits(frac) || !all_digits(digits) {
        return Err(err());
    }
    format!("{sign}{digits}{frac}/1{}", "0".repeat(frac.len())).parse::<Rational>().map_err(|_| err())
}

fn exact(s: &str) -> Result<Given<Rational>, String> {
    parse_rational(s).map(|value| Given { raw: s.to_string(), value })
}

fn probability_eps(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(x) if x > 0.0 && x < 1.0 => Ok(x),
        _ => Err(format!("expected a number in (0, 1), got {s:?}")),
    }
}

fn finite(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(x) if x.is_finite() => Ok(x),
        _ => Err(format!("expected a finite number, got {s:?}")),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Parser)]
#[command(name = "drg", version, about = "Spectral distributions of distance-regular graphs with classical parameters")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub global: Global,
}

#[derive(Debug, Args, Serialize)]
pub struct Global {
    /// Tolerance for comparing two evaluations of the same limit measure.
    #[arg(long, global = true, default_value_t = 1e-10, value_parser = probability_eps)]
    pub tol: f64,
    /// Largest atom label of a limit measure (labels run over -jmax..=jmax when rho = 0).
    #[arg(long, global = true, default_value_t = 30)]
    pub jmax: u32,
    /// Truncation error for infinite q-products.
    #[arg(long, global = true, default_value_t = 1e-14, value_parser = probability_eps)]
    pub prec: f64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Seed for randomized choices (oracle base vertices).
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Intersection array and spectral table of (d, b, alpha, beta).
    Params(ParamsArgs),
    /// Gibbs state at t: mean, variance, K_t spectrum and the distribution of A.
    Gibbs(GibbsArgs),
    /// Positive semidefiniteness of K_t at t = b^-i, i = 0..=i_max.
    PsdCheck(PsdArgs),
    /// Atoms and masses of a limit measure.
    Limit(LimitArgs),
    /// Finite-diameter distributions against their limit along a family.
    Converge(ConvergeArgs),
    /// Finite and limit mixed moments of quantum-component words along a family.
    Qclt(QcltArgs),
    /// Brute-force graphs against the formulas.
    Oracle(OracleArgs),
    /// Families, their limit presets and regimes.
    Families(FamiliesArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Params(_) => "params",
            Command::Gibbs(_) => "gibbs",
            Command::PsdCheck(_) => "psd-check",
            Command::Limit(_) => "limit",
            Command::Converge(_) => "converge",
            Command::Qclt(_) => "qclt",
            Command::Oracle(_) => "oracle",
            Command::Families(_) => "families",
        }
    }
}

#[derive(Debug, Args, Serialize)]
pub struct ParamsArgs {
    #[arg(long)]
    pub d: u32,
    #[arg(long, allow_hyphen_values = true)]
    pub b: i64,
    #[arg(long, value_parser = exact, allow_hyphen_values = true)]
    pub alpha: Given<Rational>,
    #[arg(long, value_parser = exact, allow_hyphen_values = true)]
    pub beta: Given<Rational>,
}

#[derive(Debug, Args, Serialize)]
pub struct GibbsArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub params: ParamsArgs,
    #[arg(long, value_parser = exact, allow_hyphen_values = true)]
    pub t: Given<Rational>,
}

#[derive(Debug, Args, Serialize)]
pub struct PsdArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub params: ParamsArgs,
    #[arg(long, default_value_t = 6)]
    pub i_max: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PresetName {
    #[value(name = "grassmann")]
    Grassmann,
    #[value(name = "half_dual_polar")]
    HalfDualPolar,
    #[value(name = "second_dual_polar")]
    SecondDualPolar,
    #[value(name = "bilinear")]
    Bilinear,
    #[value(name = "hermitian_forms")]
    HermitianForms,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum KindName {
    #[value(name = "case_i_rho")]
    CaseIRho,
    #[value(name = "case_i_alpha_over_rho")]
    CaseIAlphaOverRho,
    #[value(name = "case_ii")]
    CaseIi,
}

/// A limit measure from a closed-form preset, from a family with a t-rule,
/// or from raw regime fields.
#[derive(Debug, Args, Serialize)]
#[command(group(ArgGroup::new("source").required(true).args(["preset", "family", "kind"])))]
pub struct LimitArgs {
    /// Closed-form limit of a named family.
    #[arg(long, value_enum)]
    pub preset: Option<PresetName>,
    /// Family descriptor such as grassmann:q=2,delta=1 or dual_polar_C:q=2.
    #[arg(long, value_parser = given::<FamilyDescriptor>)]
    pub family: Option<Given<FamilyDescriptor>>,
    /// Raw regime; needs --b and --alpha.
    #[arg(long, value_enum)]
    pub kind: Option<KindName>,

    /// Field size of the grassmann and bilinear presets.
    #[arg(long)]
    pub q: Option<i64>,
    /// Parameter r of the half dual polar, second dual polar and Hermitian forms presets.
    #[arg(long)]
    pub r: Option<i64>,
    /// Offset with n - 2d + 1 -> 2 delta (grassmann) or e - d -> 2 delta (bilinear).
    #[arg(long, value_parser = finite, allow_hyphen_values = true)]
    pub delta: Option<f64>,
    /// Parity of n for the half dual polar preset.
    #[arg(long)]
    pub epsilon: Option<u8>,
    /// Odd-d branch of the second dual polar and Hermitian forms presets.
    #[arg(long)]
    pub upper: bool,
    /// Use the generic regime formulas instead of the preset's closed form.
    #[arg(long, requires = "preset")]
    pub generic: bool,

    /// How t depends on d: zero, const=p/q or pow=a/c[+o] for t = b^-(ceil(a d/c) + o).
    #[arg(long, value_parser = given::<TRule>, default_value = "zero", requires = "family")]
    pub t_rule: Given<TRule>,
    /// Parity of d selecting the limit subnet of a family.
    #[arg(long, default_value_t = 0, requires = "family")]
    pub parity: u32,

    /// Base b of the raw regime.
    #[arg(long, allow_hyphen_values = true, requires = "kind")]
    pub b: Option<i64>,
    /// Classical alpha of the raw regime.
    #[arg(long, value_parser = exact, allow_hyphen_values = true, requires = "kind")]
    pub alpha: Option<Given<Rational>>,
    /// Limit of beta/sqrt(k); 0 when omitted.
    #[arg(long, value_parser = finite, requires = "kind")]
    pub rho: Option<f64>,
    /// Accumulation point of sqrt(k (b-1))/b^c when rho = 0.
    #[arg(long, value_parser = finite, requires = "kind")]
    pub eta: Option<f64>,

    /// Limit of t sqrt(k); derived from the t-rule for families.
    #[arg(long, value_parser = finite, allow_hyphen_values = true, conflicts_with = "family")]
    pub gamma: Option<f64>,
}

fn d_list(s: &str) -> Result<u32, String> {
    match s.trim().parse::<u32>() {
        Ok(d) if d >= 1 => Ok(d),
        _ => Err(format!("expected a diameter >= 1, got {s:?}")),
    }
}

#[derive(Debug, Args, Serialize)]
pub struct ConvergeArgs {
    /// Family descriptor such as grassmann:q=2,delta=1 or dual_polar_C:q=2.
    #[arg(long, value_parser = given::<FamilyDescriptor>)]
    pub family: Given<FamilyDescriptor>,
    #[arg(long, value_delimiter = ',', value_parser = d_list, default_value = "4,6,8,10")]
    pub d_list: Vec<u32>,
    /// How t depends on d: zero, const=p/q or pow=a/c[+o] for t = b^-(ceil(a d/c) + o).
    #[arg(long, value_parser = given::<TRule>, default_value = "zero")]
    pub t_rule: Given<TRule>,
    /// Compare the atoms with labels |j| <= window.
    #[arg(long, default_value_t = 3)]
    pub window: u32,
}

#[derive(Debug, Args, Serialize)]
pub struct QcltArgs {
    /// Family descriptor such as grassmann:q=2,delta=1 or dual_polar_C:q=2.
    #[arg(long, value_parser = given::<FamilyDescriptor>)]
    pub family: Given<FamilyDescriptor>,
    #[arg(long, value_delimiter = ',', value_parser = d_list, default_value = "4,6,8,10,12")]
    pub d_list: Vec<u32>,
    /// How t depends on d: zero, const=p/q or pow=a/c[+o] for t = b^-(ceil(a d/c) + o).
    #[arg(long, value_parser = given::<TRule>, default_value = "zero")]
    pub t_rule: Given<TRule>,
    /// Comma-separated words over +, - and o; letters act left to right.
    #[arg(long, value_delimiter = ',', value_parser = given::<EpsilonWord>, conflicts_with = "max_len")]
    pub words: Option<Vec<Given<EpsilonWord>>>,
    /// Use every word of length 1..=max_len.
    #[arg(long, default_value_t = 2)]
    pub max_len: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct OracleArgs {
    /// `small`, `full`, or one graph such as `grassmann:q=2,n=4,d=2`.
    #[arg(long, default_value = "small")]
    pub battery: String,
    /// Longest quantum-component word compared.
    #[arg(long, default_value_t = 2)]
    pub word_len: usize,
    /// Write the edge list of the (single) graph as `u v` lines.
    #[arg(long)]
    pub dump: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct FamiliesArgs {
    /// Field parameter q or r of the listed members.
    #[arg(long, default_value_t = 2)]
    pub x: i64,
}
