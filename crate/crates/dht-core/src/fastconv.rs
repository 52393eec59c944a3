//! FFT fast paths for the convolution operators, and a benchmark harness
//! comparing them against the direct appliers.
//!
//! `H`, `H_d`, and non-integer `T_t` are single Toeplitz convolutions and go
//! through one zero-padded FFT round trip. `K` and `Kt` factor over parity
//! into half-rate convolutions: downsampled even/odd parts are pushed
//! through `T_{1/2}` (for `K`) or `H` (for `Kt`) and scattered back, so the
//! fast path reuses the same machinery instead of convolving with a kernel
//! that is zero at every other offset.

use std::time::Instant;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::kernels::kernel_samples;
use crate::ops::{self, OperatorSpec};
use crate::rng;
use crate::seq::{self, downsample_even, parity_project, translate, Parity, Sequence, Window};

/// Cap on the zero-padded FFT length.
pub const MAX_FFT_LEN: usize = 1 << 23;

/// Seed for the benchmark input generator (substream = problem size).
pub const BENCH_SEED: u64 = 0x00C0_FFEE;

/// Applies a pure-convolution operator (`H`, `Hd`, non-integer `Tt`) on the
/// window via a zero-padded FFT linear convolution.
///
/// Numerically this differs from the direct applier only by FFT rounding,
/// around `1e-12` in absolute terms for unit-size inputs.
pub fn apply_conv_fft(spec: &OperatorSpec, a: &Sequence, w: Window) -> Result<Sequence> {
    spec.validate()?;
    match spec {
        OperatorSpec::H | OperatorSpec::Hd { .. } => {}
        OperatorSpec::Tt { t } => {
            if *t == t.round() {
                return Err(Error::InvalidParameter(format!(
                    "t = {t} is an integer: T_t is a signed translation, not a kernel convolution"
                )));
            }
        }
        other => {
            return Err(Error::InvalidParameter(format!(
                "apply_conv_fft supports H, Hd, and non-integer Tt, got {other:?}"
            )));
        }
    }
    let Some((alo, ahi)) = a.support() else {
        return Ok(Sequence::empty());
    };
    let n_a = a.len();
    let n_c = (w.width() as usize) + n_a - 1;
    let n = n_a + n_c - 1;
    let padded = n.next_power_of_two();
    if padded > MAX_FFT_LEN {
        return Err(Error::Resource(format!(
            "fft length {padded} exceeds cap {MAX_FFT_LEN}"
        )));
    }

    let c_lo = w.lo() - ahi;
    let kernel = kernel_samples(spec, c_lo, w.hi() - alo)?;
    debug_assert_eq!(kernel.values().len(), n_c);

    let mut fa = vec![Complex64::ZERO; padded];
    fa[..n_a].copy_from_slice(a.values());
    let mut fc = vec![Complex64::ZERO; padded];
    for (slot, &x) in fc.iter_mut().zip(kernel.values()) {
        *slot = Complex64::new(x, 0.0);
    }

    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft_forward(padded);
    fft.process(&mut fa);
    fft.process(&mut fc);
    for (x, y) in fa.iter_mut().zip(&fc) {
        *x *= y;
    }
    planner.plan_fft_inverse(padded).process(&mut fa);

    let norm = 1.0 / padded as f64;
    let base = alo + c_lo; // linear index of conv[0]
    let values = w.iter().map(|m| fa[(m - base) as usize] * norm).collect();
    Ok(Sequence::from_block(w.lo(), values))
}

/// Output index ranges `m` with `2m` (even) or `2m + 1` (odd) inside `w`.
fn half_ranges(w: Window) -> ((i64, i64), (i64, i64)) {
    let even = ((w.lo() + 1).div_euclid(2), w.hi().div_euclid(2));
    let odd = (w.lo().div_euclid(2), (w.hi() - 1).div_euclid(2));
    (even, odd)
}

/// Fast Kak transform: parity-split, half-rate `T_{1/2}` convolutions.
///
/// Uses the exact factorizations
/// `(K chi_e a)_{2m+1} = (T_{1/2} b_e)_m` with `b_e = dse(a_e)` and
/// `(K chi_o a)_{2m} = (T_{1/2} b_o)_{m-1}` with `b_o = dse(tau_1 a_o)`.
pub fn apply_k_fast(a: &Sequence, w: Window) -> Result<Sequence> {
    let mut out = vec![Complex64::ZERO; w.width() as usize];
    let ((e_lo, e_hi), (o_lo, o_hi)) = half_ranges(w);
    let half = OperatorSpec::Tt { t: 0.5 };

    if e_lo <= e_hi {
        let b = downsample_even(&translate(&parity_project(a, Parity::Odd), 1));
        if !b.is_empty() {
            let r = apply_conv_fft(&half, &b, Window::new(e_lo - 1, e_hi - 1)?)?;
            for m in e_lo..=e_hi {
                out[(2 * m - w.lo()) as usize] = r.get(m - 1);
            }
        }
    }
    if o_lo <= o_hi {
        let b = downsample_even(&parity_project(a, Parity::Even));
        if !b.is_empty() {
            let r = apply_conv_fft(&half, &b, Window::new(o_lo, o_hi)?)?;
            for m in o_lo..=o_hi {
                out[(2 * m + 1 - w.lo()) as usize] = r.get(m);
            }
        }
    }
    Ok(Sequence::from_block(w.lo(), out))
}

/// Fast `Kt`: parity-split, half-rate `H` convolutions.
///
/// Uses `(Kt chi_e a)_{2m} = (H dse(a_e))_m` and
/// `(Kt chi_o a)_{2m+1} = (H dse(tau_1 a_o))_m`.
pub fn apply_ktilde_fast(a: &Sequence, w: Window) -> Result<Sequence> {
    let mut out = vec![Complex64::ZERO; w.width() as usize];
    let ((e_lo, e_hi), (o_lo, o_hi)) = half_ranges(w);

    if e_lo <= e_hi {
        let b = downsample_even(&parity_project(a, Parity::Even));
        if !b.is_empty() {
            let r = apply_conv_fft(&OperatorSpec::H, &b, Window::new(e_lo, e_hi)?)?;
            for m in e_lo..=e_hi {
                out[(2 * m - w.lo()) as usize] = r.get(m);
            }
        }
    }
    if o_lo <= o_hi {
        let b = downsample_even(&translate(&parity_project(a, Parity::Odd), 1));
        if !b.is_empty() {
            let r = apply_conv_fft(&OperatorSpec::H, &b, Window::new(o_lo, o_hi)?)?;
            for m in o_lo..=o_hi {
                out[(2 * m + 1 - w.lo()) as usize] = r.get(m);
            }
        }
    }
    Ok(Sequence::from_block(w.lo(), out))
}

/// Fast path for any operator that has one.
///
/// Integer-`t` `T_t` is already a linear-time translation and is routed to
/// the direct applier. `ExpSeries` has no fast path and is rejected.
pub fn apply_fast(spec: &OperatorSpec, a: &Sequence, w: Window) -> Result<Sequence> {
    spec.validate()?;
    match *spec {
        OperatorSpec::H | OperatorSpec::Hd { .. } => apply_conv_fft(spec, a, w),
        OperatorSpec::Tt { t } => {
            if t == t.round() {
                Ok(ops::apply_tt(a, t, w))
            } else {
                apply_conv_fft(spec, a, w)
            }
        }
        OperatorSpec::K => apply_k_fast(a, w),
        OperatorSpec::Ktilde => apply_ktilde_fast(a, w),
        OperatorSpec::Ut { t } => {
            let (ct, st) = (t.cos(), t.sin());
            let ka = apply_k_fast(a, w)?;
            let values = w
                .iter()
                .map(|m| ct * a.get(m) + st * ka.get(m))
                .collect();
            Ok(Sequence::from_block(w.lo(), values))
        }
        OperatorSpec::ExpSeries { .. } => Err(Error::InvalidParameter(
            "ExpSeries has no fast path; use the direct applier".into(),
        )),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Direct,
    Fft,
}

/// One timing/agreement measurement of a benchmark run.
#[derive(Debug, Clone, Serialize)]
pub struct BenchRecord {
    pub op: OperatorSpec,
    pub size: usize,
    pub method: Method,
    /// Best-of-`repeats` wall time in seconds.
    pub wall_time_s: f64,
    /// Max absolute entrywise difference between the two methods' outputs
    /// (identical for the direct and fft records of one size).
    pub max_abs_diff: f64,
}

/// Times the direct and fast paths of `spec` on seeded random inputs of the
/// given sizes (support `[-size/2, size/2)`, sup-norm 1; the output window
/// equals the support). Returns two records per size.
///
/// Reproducible: inputs depend only on [`BENCH_SEED`] and the size, so
/// `max_abs_diff` values are bit-identical across runs.
pub fn bench_apply(spec: &OperatorSpec, sizes: &[usize], repeats: u32) -> Result<Vec<BenchRecord>> {
    spec.validate()?;
    if matches!(spec, OperatorSpec::ExpSeries { .. }) {
        return Err(Error::InvalidParameter(
            "bench_apply compares direct and fast paths; ExpSeries has no fast path".into(),
        ));
    }
    if repeats == 0 {
        return Err(Error::InvalidParameter("repeats must be >= 1".into()));
    }
    let mut records = Vec::with_capacity(2 * sizes.len());
    for &size in sizes {
        if size == 0 {
            return Err(Error::InvalidParameter("size must be >= 1".into()));
        }
        let offset = -((size as i64) / 2);
        let mut gen = rng::substream(BENCH_SEED, size as u64);
        let raw = rng::random_sequence(&mut gen, offset, size);
        let sup = seq::lp_norm(&raw, f64::INFINITY)?;
        let a = seq::scale(&raw, Complex64::new(1.0 / sup, 0.0));
        let w = Window::new(offset, offset + size as i64 - 1)?;

        let mut direct = None;
        let mut t_direct = f64::INFINITY;
        for _ in 0..repeats {
            let start = Instant::now();
            let out = ops::apply(spec, &a, w)?;
            t_direct = t_direct.min(start.elapsed().as_secs_f64());
            direct = Some(out);
        }
        let mut fast = None;
        let mut t_fast = f64::INFINITY;
        for _ in 0..repeats {
            let start = Instant::now();
            let out = apply_fast(spec, &a, w)?;
            t_fast = t_fast.min(start.elapsed().as_secs_f64());
            fast = Some(out);
        }
        let (direct, fast) = (direct.unwrap(), fast.unwrap());
        let max_abs_diff = w
            .iter()
            .map(|m| (direct.get(m) - fast.get(m)).norm())
            .fold(0.0, f64::max);

        records.push(BenchRecord {
            op: *spec,
            size,
            method: Method::Direct,
            wall_time_s: t_direct,
            max_abs_diff,
        });
        records.push(BenchRecord {
            op: *spec,
            size,
            method: Method::Fft,
            wall_time_s: t_fast,
            max_abs_diff,
        });
    }
    Ok(records)
}
