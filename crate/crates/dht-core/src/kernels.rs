//! Closed-form lattice sums (cotangent, double-pole, inverse-square), their
//! truncated partial-sum evaluators, and convolution-kernel sampling.
//!
//! The closed forms are the analytic identities
//!
//! ```text
//! pi*cot(pi*x)            = 1/x + sum_{n>=1} ( 1/(x+n) + 1/(x-n) )
//! sum_m 1/((m-u)(m-v))    = pi*(cot(pi*v) - cot(pi*u)) / (u - v)
//! sum_n 1/(n+d)^2         = (pi/sin(pi*d))^2          (d not an integer)
//! sum_{n != 0} |1/(n(n+d))| = (1 - pi*d*cot(pi*d)) / d^2   (0 < |d| < 1)
//! ```
//!
//! Arguments are reduced modulo 1 before trig evaluation (`x - round(x)` is
//! exact in f64), so identical residues give bitwise-identical results no
//! matter how large the integer part is. Every evaluator with a pole rejects
//! arguments within [`POLE_GUARD`] of it.
//!
//! The partial-sum evaluators exist to cross-check the closed forms; they
//! accumulate terms from large `|n|` down with pairwise summation.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::ops::OperatorSpec;
use crate::sum::pairwise;

/// Evaluators reject arguments closer than this to a pole of the formula.
pub const POLE_GUARD: f64 = 1e-9;

/// Hard cap on the number of kernel samples materialized at once.
pub const MAX_KERNEL_LEN: i64 = 1 << 25;

/// Reduces `x` to `x - round(x)` in `[-1/2, 1/2]`; exact in f64.
#[inline]
fn reduced(x: f64) -> f64 {
    x - x.round()
}

/// `sin(pi * x)` evaluated through argument reduction: exact periodicity in
/// the integer part and full accuracy for large `|x|`.
pub(crate) fn sinpi(x: f64) -> f64 {
    let r = reduced(x);
    let k = x - r; // integer part, exact
    let s = (PI * r).sin();
    if k.rem_euclid(2.0) == 0.0 {
        s
    } else {
        -s
    }
}

fn check_finite(name: &str, x: f64) -> Result<()> {
    if x.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} must be finite, got {x}")))
    }
}

/// `pi*cot(pi*r)` for reduced `r`; caller has already excluded the pole.
#[inline]
fn cot_reduced(r: f64) -> f64 {
    let pr = PI * r;
    PI * pr.cos() / pr.sin()
}

fn checked_reduced(name: &str, x: f64) -> Result<f64> {
    check_finite(name, x)?;
    let r = reduced(x);
    if r.abs() < POLE_GUARD {
        return Err(Error::InvalidParameter(format!(
            "{name} = {x} is within {POLE_GUARD:.0e} of an integer pole"
        )));
    }
    Ok(r)
}

/// Closed form `pi*cot(pi*x)`. Rejects `x` within [`POLE_GUARD`] of an
/// integer.
pub fn cot_closed(x: f64) -> Result<f64> {
    Ok(cot_reduced(checked_reduced("x", x)?))
}

/// Symmetric partial sum `1/x + sum_{n=1..n_max} (1/(x+n) + 1/(x-n))`,
/// accumulated from large `n` down with pairwise summation. Converges to
/// [`cot_closed`] at rate `O(1/n_max)`.
pub fn cot_partial(x: f64, n_max: u64) -> Result<f64> {
    checked_reduced("x", x)?;
    let mut terms = Vec::with_capacity(n_max as usize + 1);
    for n in (1..=n_max).rev() {
        let n = n as f64;
        terms.push(1.0 / (x + n) + 1.0 / (x - n));
    }
    terms.push(1.0 / x);
    Ok(pairwise(&terms))
}

/// Closed form `sum_m 1/((m-u)(m-v)) = pi*(cot(pi*v) - cot(pi*u))/(u-v)`
/// for non-integer `u, v` with `u != v`.
pub fn double_pole_sum(u: f64, v: f64) -> Result<f64> {
    let ru = checked_reduced("u", u)?;
    let rv = checked_reduced("v", v)?;
    if (u - v).abs() < POLE_GUARD {
        return Err(Error::InvalidParameter(format!(
            "u and v must be distinct (u = {u}, v = {v})"
        )));
    }
    Ok((cot_reduced(rv) - cot_reduced(ru)) / (u - v))
}

/// Partial sum `sum_{|m| <= n_max} 1/((m-u)(m-v))`, large `|m|` first.
pub fn double_pole_partial(u: f64, v: f64, n_max: u64) -> Result<f64> {
    checked_reduced("u", u)?;
    checked_reduced("v", v)?;
    if (u - v).abs() < POLE_GUARD {
        return Err(Error::InvalidParameter(format!(
            "u and v must be distinct (u = {u}, v = {v})"
        )));
    }
    let term = |m: f64| 1.0 / ((m - u) * (m - v));
    let mut terms = Vec::with_capacity(2 * n_max as usize + 1);
    for m in (1..=n_max).rev() {
        let m = m as f64;
        terms.push(term(m));
        terms.push(term(-m));
    }
    terms.push(term(0.0));
    Ok(pairwise(&terms))
}

/// `sum_n 1/(n+d)^2`: `(pi/sin(pi*d))^2` for non-integer `d`; for integer
/// `d` the vanishing-denominator term `n = -d` is omitted and the value is
/// `pi^2/3`.
pub fn inverse_square_sum(d: f64) -> f64 {
    if d == d.round() {
        return PI * PI / 3.0;
    }
    let s = PI / (PI * reduced(d)).sin();
    s * s
}

/// Partial sum `sum_{|n| <= n_max} 1/(n+d)^2` (skipping an exactly-zero
/// denominator), large `|n|` first.
pub fn inverse_square_partial(d: f64, n_max: u64) -> f64 {
    let mut terms = Vec::with_capacity(2 * n_max as usize + 1);
    let mut push = |n: f64| {
        let s = n + d;
        if s != 0.0 {
            terms.push(1.0 / (s * s));
        }
    };
    for n in (1..=n_max).rev() {
        push(n as f64);
        push(-(n as f64));
    }
    push(0.0);
    pairwise(&terms)
}

/// The `ell^1` norm of the comparison kernel `nu_n = 1/(n(n+d))`, `n != 0`:
/// closed form `(1 - pi*d*cot(pi*d))/d^2` for `0 < |d| < 1`.
///
/// Rejects `d` within [`POLE_GUARD`] of `-1`, `0`, or `1` (at `0` the
/// formula is a `0/0` cancellation, at `+-1` the sum diverges).
pub fn nu_l1_norm(d: f64) -> Result<f64> {
    check_finite("d", d)?;
    if d.abs() >= 1.0 || d == 0.0 {
        return Err(Error::InvalidParameter(format!(
            "d must lie in (-1, 1) excluding 0, got {d}"
        )));
    }
    if d.abs() < POLE_GUARD || 1.0 - d.abs() < POLE_GUARD {
        return Err(Error::InvalidParameter(format!(
            "d = {d} is within {POLE_GUARD:.0e} of a pole of the nu formula"
        )));
    }
    Ok((1.0 - d * cot_reduced(reduced(d))) / (d * d))
}

/// Partial sum `sum_{0 < |n| <= n_max} |1/(n(n+d))|`, large `|n|` first.
pub fn nu_l1_partial(d: f64, n_max: u64) -> Result<f64> {
    // Same domain as the closed form.
    nu_l1_norm(d)?;
    let mut terms = Vec::with_capacity(2 * n_max as usize);
    for n in (1..=n_max).rev() {
        let n = n as f64;
        terms.push((1.0 / (n * (n + d))).abs());
        terms.push((1.0 / (-n * (-n + d))).abs());
    }
    Ok(pairwise(&terms))
}

/// Convolution kernel samples `c_j` for `j` in `[lo, lo + values.len())`.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelSamples {
    lo: i64,
    values: Vec<f64>,
}

impl KernelSamples {
    pub fn lo(&self) -> i64 {
        self.lo
    }

    pub fn hi(&self) -> i64 {
        self.lo + self.values.len() as i64 - 1
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Sample at offset `j` (zero outside the materialized range).
    pub fn get(&self, j: i64) -> f64 {
        if j < self.lo {
            return 0.0;
        }
        let i = (j - self.lo) as u64;
        if i < self.values.len() as u64 {
            self.values[i as usize]
        } else {
            0.0
        }
    }
}

/// Samples the convolution kernel of a pure-convolution operator on the
/// offset range `[j_lo, j_hi]`.
///
/// Supported operators:
/// - `H`: `c_j = 1/(pi*j)` for `j != 0`, `c_0 = 0`;
/// - `Hd`: `c_j = 1/(pi*(j + d))` for `j != 0`, `c_0 = 0` (the defining sum
///   excludes the diagonal term `n = m`, so the sample at offset zero is
///   zero even though the formula would be finite there);
/// - `Tt` with non-integer `t`: `c_j = sin(pi*t)/(pi*(j + t))` (no exclusion).
///
/// Integer `t` is a signed translation, not a convolution with a sampled
/// kernel, and is rejected; so is every other operator kind.
pub fn kernel_samples(spec: &OperatorSpec, j_lo: i64, j_hi: i64) -> Result<KernelSamples> {
    if j_lo > j_hi {
        return Err(Error::InvalidParameter(format!(
            "kernel range out of order: [{j_lo}, {j_hi}]"
        )));
    }
    let len = (j_hi as i128) - (j_lo as i128) + 1;
    if len > MAX_KERNEL_LEN as i128 {
        return Err(Error::Resource(format!(
            "kernel length {len} exceeds cap {MAX_KERNEL_LEN}"
        )));
    }
    Ok(KernelSamples {
        lo: j_lo,
        values: kernel_values(spec, j_lo, j_hi)?,
    })
}

/// Uncapped kernel sampling shared by [`kernel_samples`] and the direct
/// appliers, so both paths compute bitwise-identical sample values.
pub(crate) fn kernel_values(spec: &OperatorSpec, j_lo: i64, j_hi: i64) -> Result<Vec<f64>> {
    let len = ((j_hi as i128) - (j_lo as i128) + 1).max(0) as usize;
    let mut values = Vec::with_capacity(len);
    match *spec {
        OperatorSpec::H => {
            for j in j_lo..=j_hi {
                values.push(if j == 0 { 0.0 } else { 1.0 / (PI * j as f64) });
            }
        }
        OperatorSpec::Hd { d } => {
            check_finite("d", d)?;
            if d.abs() >= 1.0 {
                return Err(Error::InvalidParameter(format!(
                    "d must lie in (-1, 1), got {d}"
                )));
            }
            for j in j_lo..=j_hi {
                values.push(if j == 0 {
                    0.0
                } else {
                    1.0 / (PI * (j as f64 + d))
                });
            }
        }
        OperatorSpec::Tt { t } => {
            check_finite("t", t)?;
            if t == t.round() {
                return Err(Error::InvalidParameter(format!(
                    "t = {t} is an integer: T_t is a signed translation, not a kernel convolution"
                )));
            }
            let s = sinpi(t);
            for j in j_lo..=j_hi {
                values.push(s / (PI * (j as f64 + t)));
            }
        }
        ref other => {
            return Err(Error::InvalidParameter(format!(
                "kernel_samples supports H, Hd, and non-integer Tt, got {other:?}"
            )));
        }
    }
    Ok(values)
}
