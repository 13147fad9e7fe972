//! q-series kernel: Gaussian brackets, finite and infinite q-Pochhammer
//! symbols, the two-parameter shifted factorial `(x; y; q)_h`, and terminating
//! basic hypergeometric sums.
//!
//! Finite quantities are evaluated over [`Rational`] (arbitrary precision).
//! Infinite products only exist in floating point and come back as an
//! [`Approx`] carrying a rigorous truncation bound.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::ops::{Add, Div, Mul, Neg, Sub};

use crate::error::{Error, Result};

/// Exact scalar used for every finite-diameter quantity.
pub type Rational = BigRational;

/// `n / 1` as a rational.
pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// `n / d` as a rational. Panics on `d == 0`.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Lossy conversion used at the exact/floating boundary.
pub fn to_f64(x: &Rational) -> f64 {
    use num_traits::ToPrimitive;
    x.to_f64().unwrap_or_else(|| {
        // numerator or denominator beyond f64 range: scale through logs
        let (n, d) = (x.numer(), x.denom());
        let sign = if n.is_negative() { -1.0 } else { 1.0 };
        let ln = big_ln(&n.abs()) - big_ln(d);
        sign * ln.exp()
    })
}

fn big_ln(n: &BigInt) -> f64 {
    use num_traits::ToPrimitive;
    let bits = n.bits();
    if bits < 1000 {
        return n.to_f64().unwrap_or(f64::INFINITY).ln();
    }
    let shift = bits - 900;
    let top: BigInt = n >> shift;
    top.to_f64().unwrap().ln() + (shift as f64) * std::f64::consts::LN_2
}

/// Floating value with a nonnegative absolute error bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Approx {
    pub value: f64,
    pub abs_err: f64,
}

/// Field operations shared by [`Rational`] and `f64`, so the terminating
/// series code runs unchanged in exact and floating arithmetic.
pub trait Scalar:
    Clone
    + Zero
    + One
    + PartialEq
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
}

impl Scalar for f64 {}
impl Scalar for Rational {}

/// `x^n` for any integer `n` (negative powers invert).
pub fn pow<T: Scalar>(x: &T, n: i64) -> T {
    let mut acc = T::one();
    let mut base = x.clone();
    let mut e = n.unsigned_abs();
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base.clone();
        }
        base = base.clone() * base;
        e >>= 1;
    }
    if n < 0 {
        T::one() / acc
    } else {
        acc
    }
}

/// `[i] = 1 + b + ... + b^(i-1)`; zero for `i = 0`.
pub fn gauss_bracket(i: u32, b: i64) -> Rational {
    let mut acc = BigInt::zero();
    let mut p = BigInt::one();
    for _ in 0..i {
        acc += &p;
        p *= b;
    }
    Rational::from_integer(acc)
}

/// `[i] = (b^i - 1)/(b - 1)` continued to negative `i`. Equal to `i` at `b = 1`.
pub fn gauss_bracket_signed(i: i64, b: i64) -> Rational {
    if i >= 0 {
        return gauss_bracket(i as u32, b);
    }
    if b == 1 {
        return int(i);
    }
    let bq = int(b);
    (pow(&bq, i) - Rational::one()) / (bq - Rational::one())
}

/// `(a; q)_h = (1 - a)(1 - a q) ... (1 - a q^(h-1))`.
pub fn poch<T: Scalar>(a: &T, q: &T, h: usize) -> T {
    let mut acc = T::one();
    let mut term = a.clone();
    for _ in 0..h {
        acc = acc * (T::one() - term.clone());
        term = term * q.clone();
    }
    acc
}

/// `(x; y; q)_h = (x - y)(x - y q) ... (x - y q^(h-1))`.
pub fn gen_poch<T: Scalar>(x: &T, y: &T, q: &T, h: usize) -> T {
    let mut acc = T::one();
    let mut term = y.clone();
    for _ in 0..h {
        acc = acc * (x.clone() - term.clone());
        term = term * q.clone();
    }
    acc
}

/// `(a; q)_inf` for `|q| < 1`, truncated once the remaining factors are
/// certified to move the partial product by less than `eps`.
///
/// With `s = sum_{l >= L} |a| |q|^l`, the tail product lies within
/// `e^s - 1` of one, so the truncation error is at most `|P_L| (e^s - 1)`.
pub fn poch_inf(a: f64, q: f64, eps: f64) -> Result<Approx> {
    if !(q.abs() < 1.0) {
        return Err(Error::QSeries(format!("infinite product needs |q| < 1, got q = {q}")));
    }
    if !(eps > 0.0) {
        return Err(Error::QSeries(format!("tolerance must be positive, got {eps}")));
    }
    let aq = q.abs();
    let mut product = 1.0_f64;
    let mut term = a;
    for _ in 0..1_000_000 {
        let tail = term.abs() / (1.0 - aq);
        if tail < 0.5 {
            let err = product.abs() * tail.exp_m1();
            if err <= eps {
                return Ok(Approx { value: product, abs_err: err });
            }
        }
        let factor = 1.0 - term;
        if factor == 0.0 {
            return Ok(Approx { value: 0.0, abs_err: 0.0 });
        }
        product *= factor;
        term *= q;
    }
    Err(Error::QSeries(format!("infinite product ({a}; {q}) failed to converge")))
}

/// Smallest `n >= 0` with `a q^n = 1`, i.e. the order at which `(a; q)_h`
/// first vanishes for `h = n + 1`.
fn termination_order(a: &Rational, q: &Rational) -> Option<usize> {
    let one = Rational::one();
    if a.is_zero() {
        return None;
    }
    if q.abs() == one || q.is_zero() {
        // the orbit of a under multiplication by q has at most two distinct values
        let mut x = a.clone();
        for n in 0..2 {
            if x == one {
                return Some(n);
            }
            x = x * q;
        }
        return None;
    }
    let growing = q.abs() > one;
    let mut x = a.clone();
    let mut n = 0;
    loop {
        if x == one {
            return Some(n);
        }
        if (growing && x.abs() > one) || (!growing && x.abs() < one) {
            return None;
        }
        x = x * q;
        n += 1;
    }
}

/// Partial sum `h = 0..=terms` of `_m phi_n(uppers; lowers; q, z)` in the
/// standard normalization with the `((-1)^h q^(h choose 2))^(1 + n - m)` factor.
pub fn phi_truncated<T: Scalar>(uppers: &[T], lowers: &[T], q: &T, z: &T, terms: usize) -> Result<T> {
    let excess = lowers.len() as i64 + 1 - uppers.len() as i64;
    let mut term = T::one();
    let mut sum = T::one();
    let mut qh = T::one();
    for h in 0..terms {
        let mut num = z.clone();
        for a in uppers {
            num = num * (T::one() - a.clone() * qh.clone());
        }
        let mut den = T::one() - qh.clone() * q.clone();
        for b in lowers {
            den = den * (T::one() - b.clone() * qh.clone());
        }
        if den.is_zero() {
            return Err(Error::QSeries(format!("vanishing denominator Pochhammer at term {}", h + 1)));
        }
        if excess != 0 {
            let sign = if excess % 2 == 0 { T::one() } else { -T::one() };
            num = num * sign * pow(&qh, excess);
        }
        term = term * num / den;
        sum = sum + term.clone();
        qh = qh * q.clone();
    }
    Ok(sum)
}

/// Terminating `_m phi_n` evaluated exactly; some upper parameter must be
/// `q^(-n)` for a nonnegative integer `n`.
pub fn phi_terminating(uppers: &[Rational], lowers: &[Rational], q: &Rational, z: &Rational) -> Result<Rational> {
    let order = uppers
        .iter()
        .filter_map(|a| termination_order(a, q))
        .min()
        .ok_or_else(|| Error::QSeries("series does not terminate: no upper parameter equals q^-n".into()))?;
    if z.is_zero() {
        return Ok(Rational::one());
    }
    phi_truncated(uppers, lowers, q, z, order)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn gauss_bracket_examples() {
        assert_eq!(gauss_bracket(0, 2), int(0));
        assert_eq!(gauss_bracket(3, 2), int(7));
        assert_eq!(gauss_bracket(2, -3), int(-2));
        assert_eq!(gauss_bracket_signed(-2, 2), rat(-3, 4));
        assert_eq!(gauss_bracket_signed(3, 1), int(3));
    }

    #[test]
    fn poch_examples() {
        let q = rat(1, 2);
        assert_eq!(poch(&int(5), &q, 0), int(1));
        assert_eq!(poch(&rat(1, 2), &q, 2), rat(3, 8));
        for h in 1..5 {
            assert_eq!(poch(&int(1), &int(7), h), int(0));
        }
    }

    #[test]
    fn gen_poch_examples() {
        assert_eq!(gen_poch(&int(3), &int(1), &int(2), 0), int(1));
        assert_eq!(gen_poch(&int(3), &int(1), &int(2), 2), int(2));
        assert_eq!(gen_poch(&rat(2, 3), &int(0), &int(5), 4), rat(16, 81));
    }

    #[test]
    fn poch_inf_examples() {
        let p = poch_inf(0.0, 0.3, 1e-14).unwrap();
        assert_eq!(p, Approx { value: 1.0, abs_err: 0.0 });

        // reference from 40-digit partial products
        let p = poch_inf(0.5, 0.5, 1e-14).unwrap();
        assert!((p.value - 0.288_788_095_086_602_4).abs() < 1e-14);
        assert!(p.abs_err <= 1e-14);

        let p = poch_inf(8.0, 0.5, 1e-14).unwrap();
        assert_eq!(p.value, 0.0);

        let p = poch_inf(-0.5, -0.5, 1e-14).unwrap();
        assert!(p.value.is_finite() && p.abs_err <= 1e-14);

        assert!(poch_inf(0.5, 1.0, 1e-14).is_err());
        assert!(poch_inf(0.5, -1.5, 1e-14).is_err());
    }

    #[test]
    fn phi_terminating_examples() {
        let q = int(3);
        let z0 = int(0);
        assert_eq!(phi_terminating(&[pow(&q, -4)], &[], &q, &z0).unwrap(), int(1));
        assert_eq!(phi_terminating(&[int(1), rat(2, 7)], &[rat(1, 5)], &q, &rat(3, 2)).unwrap(), int(1));
        assert!(phi_terminating(&[rat(2, 7)], &[], &q, &rat(3, 2)).is_err());
        // lower parameter q^-1 vanishes at the second factor
        let err = phi_terminating(&[pow(&q, -3)], &[pow(&q, -1)], &q, &int(1));
        assert!(err.is_err());
    }

    #[test]
    fn q_binomial_theorem_small_grid() {
        let qs = [int(2), int(-3), rat(1, 3), rat(-2, 5), rat(7, 4)];
        let zs = [rat(1, 2), int(3), rat(-5, 7), rat(11, 13)];
        for q in &qs {
            for z in &zs {
                for n in 0..=8usize {
                    let lhs = phi_terminating(&[pow(q, -(n as i64))], &[], q, z).unwrap();
                    let rhs = poch(&(z.clone() * pow(q, -(n as i64))), q, n);
                    assert_eq!(lhs, rhs, "q={q} z={z} n={n}");
                }
            }
        }
    }

    #[test]
    fn lebesgue_special_case() {
        for r in 2..=7 {
            let r = r as f64;
            let a = poch_inf(1.0 / r, -1.0 / r, 1e-16).unwrap().value;
            let b = poch_inf(-1.0 / r, 1.0 / (r * r), 1e-16).unwrap().value;
            assert!((a * b - 1.0).abs() < 1e-12);
        }
    }

    fn small_rational() -> impl Strategy<Value = Rational> {
        (-12i64..=12, 1i64..=9).prop_map(|(n, d)| rat(n, d))
    }

    fn nonzero_rational() -> impl Strategy<Value = Rational> {
        small_rational().prop_filter("nonzero", |x| !x.is_zero())
    }

    proptest! {
        #[test]
        fn poch_splits(a in small_rational(), q in small_rational(), h1 in 0usize..=12, h2 in 0usize..=12) {
            let lhs = poch(&a, &q, h1 + h2);
            let rhs = poch(&a, &q, h1) * poch(&(a.clone() * pow(&q, h1 as i64)), &q, h2);
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn gen_poch_scales(x in nonzero_rational(), y in small_rational(), q in small_rational(), h in 0usize..=10) {
            let lhs = gen_poch(&x, &y, &q, h);
            let rhs = pow(&x, h as i64) * poch(&(y.clone() / x.clone()), &q, h);
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn q_binomial_theorem(q in nonzero_rational(), z in small_rational(), n in 0usize..=10) {
            prop_assume!(q.abs() != Rational::one());
            let lhs = phi_terminating(&[pow(&q, -(n as i64))], &[], &q, &z).unwrap();
            let rhs = poch(&(z.clone() * pow(&q, -(n as i64))), &q, n);
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn poch_inf_matches_long_finite_product(a in -3.0f64..3.0, q in -0.6f64..0.6) {
            let inf = poch_inf(a, q, 1e-13).unwrap();
            let fin = poch(&a, &q, 400);
            prop_assert!((inf.value - fin).abs() <= 1e-13 + inf.abs_err + 1e-12 * fin.abs());
        }
    }
}
