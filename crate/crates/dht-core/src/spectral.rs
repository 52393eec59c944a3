//! Finite truncations `A_M = (A(m, n))_{|m|,|n| <= M}` as dense matrices,
//! operator-norm estimation (power iteration for `p = 2`, Boyd's dual-map
//! iteration for general `p`), and resolvent solves for the generator.
//!
//! Norm estimators are lower bounds by construction: the reported value is
//! always `||A w||_p / ||w||_p` recomputed from the returned witness `w`.
//! Estimates are deterministic: starting vectors come from fixed seeds
//! (seed 0 for power iteration, seeds `0..restarts` for Boyd restarts).

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::kernels::sinpi;
use crate::ops::OperatorSpec;
use crate::rng;
use crate::seq::Sequence;
use crate::sum::Kahan;

/// Cap on the truncation half-width `M` (dense dimension `2M + 1`).
pub const MAX_TRUNCATION_HALF_WIDTH: i64 = 2047;

/// Relative stagnation threshold that stops Boyd iterations early.
const BOYD_STAGNATION: f64 = 1e-13;

/// A dense truncated operator on indices `[-M, M]`.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseOperator {
    m: i64,
    mat: DMatrix<Complex64>,
}

impl DenseOperator {
    pub fn half_width(&self) -> i64 {
        self.m
    }

    pub fn dim(&self) -> usize {
        2 * self.m as usize + 1
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.mat
    }

    /// Entry `A(m, n)` for `m, n` in `[-M, M]`.
    pub fn entry(&self, m: i64, n: i64) -> Complex64 {
        self.mat[((m + self.m) as usize, (n + self.m) as usize)]
    }

    /// Adjoint truncation (conjugate transpose).
    pub fn adjoint(&self) -> DenseOperator {
        DenseOperator {
            m: self.m,
            mat: self.mat.adjoint(),
        }
    }

    /// Applies the truncation to a sequence supported in `[-M, M]`.
    pub fn apply(&self, a: &Sequence) -> Result<Sequence> {
        let v = self.vector_from(a)?;
        Ok(self.sequence_from(&(&self.mat * &v)))
    }

    fn vector_from(&self, a: &Sequence) -> Result<DVector<Complex64>> {
        if let Some((lo, hi)) = a.support() {
            if lo < -self.m || hi > self.m {
                return Err(Error::InvalidParameter(format!(
                    "support [{lo}, {hi}] exceeds the truncation range [-{}, {}]",
                    self.m, self.m
                )));
            }
        }
        Ok(DVector::from_iterator(
            self.dim(),
            (-self.m..=self.m).map(|i| a.get(i)),
        ))
    }

    fn sequence_from(&self, v: &DVector<Complex64>) -> Sequence {
        Sequence::from_block(-self.m, v.iter().copied().collect())
    }
}

/// Builds the dense truncation of any operator on `[-M, M]`.
///
/// Kernel entries are read off the defining formulas; `ExpSeries` is
/// accumulated from matrix powers of the truncated `H` (cost grows with
/// `terms * (2M+1)^3`, so keep `M` moderate for that kind).
pub fn build_truncated_matrix(spec: &OperatorSpec, m: i64) -> Result<DenseOperator> {
    if m < 0 {
        return Err(Error::InvalidParameter(format!(
            "truncation half-width must be >= 0, got {m}"
        )));
    }
    if m > MAX_TRUNCATION_HALF_WIDTH {
        return Err(Error::Resource(format!(
            "truncation half-width {m} exceeds cap {MAX_TRUNCATION_HALF_WIDTH}"
        )));
    }
    spec.validate()?;
    let dim = 2 * m as usize + 1;

    // Toeplitz kinds: one kernel row indexed by j = m_out - n.
    let toeplitz = |c: Vec<f64>| -> DMatrix<Complex64> {
        DMatrix::from_fn(dim, dim, |r, s| {
            Complex64::new(c[r + dim - 1 - s], 0.0)
        })
    };
    let kak_row = |odd: bool| -> Vec<f64> {
        (-(dim as i64 - 1)..=dim as i64 - 1)
            .map(|j| {
                if j != 0 && (j & 1 != 0) == odd {
                    2.0 / (PI * j as f64)
                } else {
                    0.0
                }
            })
            .collect()
    };

    let mat = match *spec {
        OperatorSpec::H => toeplitz(
            (-(dim as i64 - 1)..=dim as i64 - 1)
                .map(|j| if j == 0 { 0.0 } else { 1.0 / (PI * j as f64) })
                .collect(),
        ),
        OperatorSpec::Hd { d } => toeplitz(
            (-(dim as i64 - 1)..=dim as i64 - 1)
                .map(|j| {
                    if j == 0 {
                        0.0
                    } else {
                        1.0 / (PI * (j as f64 + d))
                    }
                })
                .collect(),
        ),
        OperatorSpec::Tt { t } => {
            if t == t.round() {
                // Signed translation: entry (-1)^k at n = m_out + k.
                let sign = if t.abs() > 9.007199254740992e15 {
                    1.0
                } else if (t as i64) & 1 == 0 {
                    1.0
                } else {
                    -1.0
                };
                DMatrix::from_fn(dim, dim, |r, s| {
                    let m_out = r as i64 - m;
                    let n = s as i64 - m;
                    if (n as f64) == (m_out as f64) + t {
                        Complex64::new(sign, 0.0)
                    } else {
                        Complex64::ZERO
                    }
                })
            } else {
                let sf = sinpi(t);
                toeplitz(
                    (-(dim as i64 - 1)..=dim as i64 - 1)
                        .map(|j| sf / (PI * (j as f64 + t)))
                        .collect(),
                )
            }
        }
        OperatorSpec::K => toeplitz(kak_row(true)),
        OperatorSpec::Ktilde => toeplitz(kak_row(false)),
        OperatorSpec::Ut { t } => {
            let mut mat = toeplitz(kak_row(true)) * Complex64::new(t.sin(), 0.0);
            let ct = Complex64::new(t.cos(), 0.0);
            for i in 0..dim {
                mat[(i, i)] += ct;
            }
            mat
        }
        OperatorSpec::ExpSeries { s, terms } => {
            let h = build_truncated_matrix(&OperatorSpec::H, m)?.mat;
            let mut acc = DMatrix::<Complex64>::identity(dim, dim);
            let mut term = DMatrix::<Complex64>::identity(dim, dim);
            for k in 1..=terms {
                term = (&h * term) * Complex64::new(PI * s / k as f64, 0.0);
                if term.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                    return Err(Error::Numerical {
                        message: format!("series matrix overflowed at term {k}"),
                        residual: f64::INFINITY,
                    });
                }
                acc += &term;
            }
            acc
        }
    };
    Ok(DenseOperator { m, mat })
}

/// Result of a norm estimation run.
#[derive(Debug, Clone, Serialize)]
pub struct NormEstimate {
    /// `||A w||_p / ||w||_p` for the witness `w`; a lower bound on the true
    /// truncated-operator norm.
    pub value: f64,
    pub p: f64,
    #[serde(rename = "M")]
    pub m: i64,
    /// Iterations used by the reported (best) run.
    pub iterations: u32,
    /// Whether that run stagnated below its tolerance before the cap.
    pub converged: bool,
    pub witness: Sequence,
}

fn vec_lp_norm(v: &DVector<Complex64>, p: f64) -> f64 {
    let mut acc = Kahan::new();
    if p == 2.0 {
        for z in v.iter() {
            acc.add(z.re * z.re + z.im * z.im);
        }
        acc.value().sqrt()
    } else if p.is_infinite() {
        v.iter().map(|z| z.norm()).fold(0.0, f64::max)
    } else {
        for z in v.iter() {
            acc.add(z.norm().powf(p));
        }
        acc.value().powf(1.0 / p)
    }
}

fn random_vector(dim: usize, seed: u64) -> DVector<Complex64> {
    use rand::Rng;
    let mut gen = rng::substream(seed, 0);
    DVector::from_iterator(
        dim,
        (0..dim).map(|_| Complex64::new(gen.gen_range(-1.0..1.0), gen.gen_range(-1.0..1.0))),
    )
}

/// Largest-singular-value estimate by power iteration on `A^H A`.
///
/// The per-iteration estimate `||A v_k||_2` is nondecreasing and never
/// exceeds the true spectral norm. Stops early when successive estimates
/// differ by at most `tol` relatively (`tol <= 0` disables early stopping).
/// Deterministic: the starting vector is drawn from seed 0.
pub fn l2_norm_estimate(op: &DenseOperator, iters: u32, tol: f64) -> NormEstimate {
    let mut v = random_vector(op.dim(), 0);
    let n0 = v.norm();
    v /= Complex64::new(n0, 0.0);

    let mut prev = -1.0f64;
    let mut converged = false;
    let mut used = 0;
    for k in 1..=iters {
        let w = &op.mat * &v;
        let est = vec_lp_norm(&w, 2.0);
        used = k;
        if est == 0.0 {
            // v is in the kernel of the truncation; the estimate is 0.
            break;
        }
        let u = op.mat.ad_mul(&w);
        let un = u.norm();
        if un == 0.0 {
            break;
        }
        v = u / Complex64::new(un, 0.0);
        if prev >= 0.0 && (est - prev).abs() <= tol * est {
            converged = true;
            break;
        }
        prev = est;
    }

    let value = vec_lp_norm(&(&op.mat * &v), 2.0) / vec_lp_norm(&v, 2.0);
    NormEstimate {
        value,
        p: 2.0,
        m: op.m,
        iterations: used,
        converged,
        witness: op.sequence_from(&v),
    }
}

/// Duality map `y -> |y|^{p-1} sign(y)` (componentwise, complex phase).
fn dual(v: &DVector<Complex64>, p: f64) -> DVector<Complex64> {
    v.map(|z| {
        let r = z.norm();
        if r == 0.0 {
            Complex64::ZERO
        } else {
            z * r.powf(p - 2.0)
        }
    })
}

/// Lower-bound estimate of the `ell^p -> ell^p` norm of the truncation by
/// Boyd's fixed-point iteration `x <- dual_q(A^H dual_p(A x))`, restarted
/// from `restarts` seeded random vectors (seeds `0..restarts`); the best
/// (largest) estimate wins. Requires `1 < p < inf` and `restarts >= 1`.
pub fn lp_norm_estimate(
    op: &DenseOperator,
    p: f64,
    iters: u32,
    restarts: u32,
) -> Result<NormEstimate> {
    if !p.is_finite() || p <= 1.0 {
        return Err(Error::InvalidParameter(format!(
            "lp_norm_estimate requires 1 < p < inf, got {p}"
        )));
    }
    if restarts == 0 {
        return Err(Error::InvalidParameter("restarts must be >= 1".into()));
    }
    let q = p / (p - 1.0);

    let mut best: Option<NormEstimate> = None;
    for r in 0..restarts {
        let mut x = random_vector(op.dim(), r as u64);
        let nx = vec_lp_norm(&x, p);
        x /= Complex64::new(nx, 0.0);

        let mut prev = -1.0f64;
        let mut converged = false;
        let mut used = 0;
        for k in 1..=iters {
            let y = &op.mat * &x;
            let est = vec_lp_norm(&y, p);
            used = k;
            if est == 0.0 {
                break;
            }
            let w = op.mat.ad_mul(&dual(&y, p));
            let u = dual(&w, q);
            let nu = vec_lp_norm(&u, p);
            if nu == 0.0 {
                break;
            }
            x = u / Complex64::new(nu, 0.0);
            if prev >= 0.0 && (est - prev).abs() <= BOYD_STAGNATION * est {
                converged = true;
                break;
            }
            prev = est;
        }

        let value = vec_lp_norm(&(&op.mat * &x), p) / vec_lp_norm(&x, p);
        let candidate = NormEstimate {
            value,
            p,
            m: op.m,
            iterations: used,
            converged,
            witness: op.sequence_from(&x),
        };
        best = match best {
            None => Some(candidate),
            Some(cur) if candidate.value > cur.value => Some(candidate),
            Some(cur) => Some(cur),
        };
    }
    Ok(best.expect("restarts >= 1"))
}

/// The sharp `ell^p` norm constant `max(tan(pi/2p), cot(pi/2p))` of the
/// conjugate-function problem, `1 < p < inf`.
pub fn np_constant(p: f64) -> Result<f64> {
    if !p.is_finite() || p <= 1.0 {
        return Err(Error::InvalidParameter(format!(
            "np_constant requires 1 < p < inf, got {p}"
        )));
    }
    let t = (PI / (2.0 * p)).tan();
    Ok(t.max(1.0 / t))
}

/// Solves `(pi H_M - lambda I) x = a` on `[-M, M]` for `lambda > 0` by LU
/// with partial pivoting plus iterative refinement.
///
/// `pi H_M` is real antisymmetric, so its spectrum is purely imaginary and
/// the shifted system is uniformly invertible with `||x|| <= ||a|| / lambda`.
/// Returns the solution and the final residual `||(pi H_M - lambda) x - a||_2`,
/// guaranteed `<= 1e-8 * ||a||_2`.
pub fn resolvent_solve(a: &Sequence, lambda: f64, m: i64) -> Result<(Sequence, f64)> {
    if !lambda.is_finite() || lambda <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "lambda must be positive and finite, got {lambda}"
        )));
    }
    let h = build_truncated_matrix(&OperatorSpec::H, m)?;
    let rhs = h.vector_from(a)?;

    let dim = h.dim();
    let mut b = h.mat * Complex64::new(PI, 0.0);
    let shift = Complex64::new(lambda, 0.0);
    for i in 0..dim {
        b[(i, i)] -= shift;
    }

    let lu = b.clone().lu();
    let mut x = lu.solve(&rhs).ok_or_else(|| Error::Numerical {
        message: "resolvent LU solve failed (singular factorization)".into(),
        residual: f64::INFINITY,
    })?;

    let target = 1e-8 * vec_lp_norm(&rhs, 2.0);
    let mut residual = f64::INFINITY;
    for _ in 0..10 {
        let r = &rhs - &b * &x;
        residual = vec_lp_norm(&r, 2.0);
        if residual <= target {
            break;
        }
        let dx = lu.solve(&r).ok_or_else(|| Error::Numerical {
            message: "resolvent refinement solve failed".into(),
            residual,
        })?;
        x += dx;
    }
    if residual > target {
        return Err(Error::Numerical {
            message: format!("resolvent refinement stalled above 1e-8*||a|| = {target:.3e}"),
            residual,
        });
    }
    Ok((
        Sequence::from_block(-m, x.iter().copied().collect()),
        residual,
    ))
}
