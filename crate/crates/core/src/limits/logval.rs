//! Sign/log-magnitude arithmetic for mass formulas whose individual factors
//! (`b^(j^2)`, `(b; b)_j`, ...) overflow `f64` long before their product does.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct LogVal {
    ln: f64,
    /// -1, 0 or 1; zero means the value is exactly zero.
    sign: f64,
}

impl LogVal {
    pub fn one() -> Self {
        Self { ln: 0.0, sign: 1.0 }
    }

    pub fn from(x: f64) -> Self {
        if x == 0.0 {
            Self { ln: f64::NEG_INFINITY, sign: 0.0 }
        } else {
            Self { ln: x.abs().ln(), sign: x.signum() }
        }
    }

    /// `b^n` without forming the power.
    pub fn pow(x: f64, n: i64) -> Self {
        if n == 0 {
            return Self::one();
        }
        let base = Self::from(x);
        if base.sign == 0.0 {
            return base;
        }
        let sign = if base.sign < 0.0 && n % 2 != 0 { -1.0 } else { 1.0 };
        Self { ln: base.ln * n as f64, sign }
    }

    /// `|self|^e` keeping the sign of `self`; meant for positive bases.
    pub fn pow_real(self, e: f64) -> Self {
        if self.sign == 0.0 {
            return self;
        }
        Self { ln: self.ln * e, sign: self.sign }
    }

    pub fn is_zero(self) -> bool {
        self.sign == 0.0
    }

    pub fn value(self) -> f64 {
        if self.sign == 0.0 {
            0.0
        } else {
            self.sign * self.ln.exp()
        }
    }

    pub fn mul(self, o: Self) -> Self {
        if self.sign == 0.0 || o.sign == 0.0 {
            return Self::from(0.0);
        }
        Self { ln: self.ln + o.ln, sign: self.sign * o.sign }
    }

    /// Division; the caller guarantees `o` is nonzero.
    pub fn div(self, o: Self) -> Self {
        debug_assert!(o.sign != 0.0);
        if self.sign == 0.0 {
            return self;
        }
        Self { ln: self.ln - o.ln, sign: self.sign * o.sign }
    }
}

/// `(a; q)_h`.
pub(crate) fn poch(a: f64, q: f64, h: usize) -> LogVal {
    gen_poch(1.0, a, q, h)
}

/// `(x - y)(x - y q) ... (x - y q^(h-1))`.
pub(crate) fn gen_poch(x: f64, y: f64, q: f64, h: usize) -> LogVal {
    let mut acc = LogVal::one();
    let mut term = y;
    for _ in 0..h {
        acc = acc.mul(LogVal::from(x - term));
        term *= q;
    }
    acc
}

/// `(a; q)_inf` for `|q| < 1`, optionally leaving out the factor with index
/// `skip` (used to cancel a removable `0/0`). Stops once the remaining tail
/// changes the product by a relative amount below `eps`.
pub(crate) fn poch_inf(a: f64, q: f64, eps: f64, skip: Option<usize>) -> Result<LogVal> {
    if !(q.abs() < 1.0) {
        return Err(Error::QSeries(format!("infinite product needs |q| < 1, got q = {q}")));
    }
    let aq = q.abs();
    let mut acc = LogVal::one();
    let mut term = a;
    for l in 0..1_000_000usize {
        let tail = term.abs() / (1.0 - aq);
        if tail < 0.5 && tail.exp_m1() <= eps && skip.is_none_or(|s| l > s) {
            return Ok(acc);
        }
        if skip != Some(l) {
            acc = acc.mul(LogVal::from(1.0 - term));
            if acc.is_zero() {
                return Ok(acc);
            }
        }
        term *= q;
    }
    Err(Error::QSeries(format!("infinite product ({a}; {q}) failed to converge")))
}
