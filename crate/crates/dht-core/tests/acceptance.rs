//! End-to-end acceptance suite: twelve numbered criteria covering the
//! operator family, each printing one `ACCEPTANCE cNN <name>: PASS/FAIL`
//! line (run with `cargo test --test acceptance -- --nocapture` to see the
//! lines for passing criteria too).
//!
//! Two criteria document genuine mathematical obstructions rather than
//! implementation bugs and are expected to fail; their failure messages
//! carry the analysis:
//! - c07: two of its clauses compare finite-section norms of operators
//!   whose sections converge along different effective truncation sizes,
//!   and one clause demands a lower bound that interpolation rules out at
//!   this section size.
//! - c12: the cross term it requires to be nonzero is identically zero
//!   because K is real and antisymmetric.

use std::f64::consts::PI;
use std::io::Write;

use num_complex::Complex64;

use dht_core::fastconv::{self, BenchRecord};
use dht_core::kernels;
use dht_core::ops::{self, OperatorSpec};
use dht_core::rng;
use dht_core::seq::{self, lp_norm, make_delta, Sequence, Window};
use dht_core::spectral;

/// Base seed for every randomized draw in this suite.
const SEED: u64 = 0x0ACC_E500;

fn report(id: &str, name: &str, pass: bool, detail: &str) {
    let status = if pass { "PASS" } else { "FAIL" };
    println!("ACCEPTANCE {id} {name}: {status} — {detail}");
}

fn w(lo: i64, hi: i64) -> Window {
    Window::new(lo, hi).unwrap()
}

fn l2(a: &Sequence) -> f64 {
    lp_norm(a, 2.0).unwrap()
}

fn rc(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Dyadic non-integer time values: odd numerator over 64, alternating sign.
/// Odd/64 can never be an integer, and lags `dl - t` stay exact in f64, so
/// the analytic cancellation inside `exact_t_gram` is exact as well.
fn dyadic_times(count: usize) -> Vec<f64> {
    (0..count)
        .map(|j| {
            let t = (8 * j + 1) as f64 / 64.0;
            if j % 2 == 0 {
                t
            } else {
                -t
            }
        })
        .collect()
}

#[test]
fn c01_isometry() {
    let times = dyadic_times(50);
    let mut max_rel = 0.0f64;
    for trial in 0..100u64 {
        let mut gen = rng::substream(SEED, 1_000 + trial);
        use rand::Rng;
        let width = gen.gen_range(1..=128usize);
        let offset = gen.gen_range(-64i64..=64);
        let a = rng::random_sequence(&mut gen, offset, width);
        let n2 = l2(&a).powi(2);
        for &t in &times {
            let g = ops::exact_t_gram(&a, t).unwrap();
            max_rel = max_rel.max((g - n2).abs() / n2);
        }
    }
    let pass = max_rel <= 1e-12;
    report(
        "c01",
        "isometry",
        pass,
        &format!("max relative error {max_rel:.3e} over 100 sequences x 50 t values (tol 1e-12)"),
    );
    assert!(pass, "exact_t_gram isometry violated: {max_rel:.3e} > 1e-12");
}

#[test]
fn c02_group_law() {
    use rand::Rng;
    let big_w = 32i64;
    let m0 = 8192i64;

    // Residuals at truncation M for 20 (a, s, d) triples mixing integer and
    // fractional parameters; cases 0..7 exercise the exact branches, the
    // rest the truncation-limited fractional/fractional composition.
    let run = |m: i64| -> Vec<(f64, f64)> {
        (0..20u64)
            .map(|trial| {
                let mut gen = rng::substream(SEED, 2_000 + trial);
                let width = gen.gen_range(1..=64usize);
                let offset = gen.gen_range(-32i64..=32);
                let a = rng::random_sequence(&mut gen, offset, width);
                let frac = |g: &mut rand_chacha::ChaCha8Rng| -> f64 {
                    g.gen_range(-3.0..3.0)
                };
                let int = |g: &mut rand_chacha::ChaCha8Rng| -> f64 {
                    g.gen_range(-3i64..=3) as f64
                };
                let (s, d) = match trial % 10 {
                    0 => (int(&mut gen), int(&mut gen)),
                    1 => (int(&mut gen), frac(&mut gen)),
                    2 => (frac(&mut gen), int(&mut gen)),
                    3 => {
                        let s = frac(&mut gen);
                        (s, int(&mut gen) - s) // fractional pair, integer sum
                    }
                    _ => (frac(&mut gen), frac(&mut gen)),
                };
                let b = ops::apply_tt(&a, s, w(-m, m));
                let lhs = ops::apply_tt(&b, d, w(-big_w, big_w));
                let rhs = ops::apply_tt(&a, s + d, w(-big_w, big_w));
                (l2(&seq::sub(&lhs, &rhs)), l2(&a))
            })
            .collect()
    };

    let at_m = run(m0);
    let at_4m = run(4 * m0);
    let tol_factor = 5.0 / (m0 as f64).sqrt();
    let worst = at_m
        .iter()
        .map(|(r, na)| r / (tol_factor * na))
        .fold(0.0f64, f64::max);

    let median = |rs: &[(f64, f64)]| -> f64 {
        let mut v: Vec<f64> = rs.iter().map(|(r, na)| r / na).collect();
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        0.5 * (v[9] + v[10])
    };
    let ratio = median(&at_m) / median(&at_4m);

    let pass = worst <= 1.0 && ratio >= 1.8;
    report(
        "c02",
        "group-law",
        pass,
        &format!(
            "max residual = {worst:.2e} x the 5*||a||/sqrt(M) bound; median residual ratio M->4M = {ratio:.2} (needs >= 1.8)"
        ),
    );
    assert!(pass, "group law: worst {worst:.3}, median ratio {ratio:.3}");
}

#[test]
fn c03_generator() {
    use rand::Rng;
    let win = w(-4096, 4096);
    let mut all_ratios = Vec::new();
    for trial in 0..3u64 {
        let a = if trial == 0 {
            make_delta(0)
        } else {
            let mut gen = rng::substream(SEED, 3_000 + trial);
            let width = gen.gen_range(1..=32usize);
            rng::random_sequence(&mut gen, -16, width)
        };
        let ha = seq::scale(&ops::apply_h(&a, win), rc(PI, 0.0));
        let e: Vec<f64> = [1.0e-1, 1.0e-2, 1.0e-3]
            .iter()
            .map(|&d| {
                let fd = seq::scale(
                    &seq::sub(&ops::apply_tt(&a, d, win), &a.restrict(win)),
                    rc(1.0 / d, 0.0),
                );
                l2(&seq::sub(&fd, &ha))
            })
            .collect();
        all_ratios.push(e[0] / e[1]);
        all_ratios.push(e[1] / e[2]);
    }
    let pass = all_ratios.iter().all(|r| (8.0..=12.0).contains(r));
    let shown: Vec<String> = all_ratios.iter().map(|r| format!("{r:.2}")).collect();
    report(
        "c03",
        "generator",
        pass,
        &format!("difference-quotient error ratios per decade of d: [{}] (need [8, 12])", shown.join(", ")),
    );
    assert!(pass, "generator convergence ratios out of range: {all_ratios:?}");
}

#[test]
fn c04_adjoint() {
    use rand::Rng;
    let mut max_res = 0.0f64;
    for trial in 0..100u64 {
        let mut gen = rng::substream(SEED, 4_000 + trial);
        let wa = gen.gen_range(1..=64usize);
        let wb = gen.gen_range(1..=64usize);
        let oa = gen.gen_range(-64i64..=64);
        let ob = gen.gen_range(-64i64..=64);
        let a = rng::random_unit_sequence(&mut gen, oa, wa);
        let b = rng::random_unit_sequence(&mut gen, ob, wb);
        let t = match trial % 3 {
            0 => gen.gen_range(-4i64..=4) as f64,
            1 => (2 * gen.gen_range(0i64..128) + 1) as f64 / 64.0,
            _ => gen.gen_range(-3.0..3.0),
        };
        max_res = max_res.max(ops::adjoint_pairing_residual(&a, &b, t));
    }
    let pass = max_res <= 1e-12;
    report(
        "c04",
        "adjoint",
        pass,
        &format!("max pairing residual {max_res:.3e} over 100 unit-norm (a, b, t) (tol 1e-12)"),
    );
    assert!(pass, "adjoint pairing residual {max_res:.3e} > 1e-12");
}

#[test]
fn c05_l2_norm_sections() {
    let mut ests = Vec::new();
    for m in [50i64, 200, 800] {
        let op = spectral::build_truncated_matrix(&OperatorSpec::H, m).unwrap();
        ests.push(spectral::l2_norm_estimate(&op, 300, 1e-12).value);
    }
    let pass = ests[0] < ests[1]
        && ests[1] < ests[2]
        && ests.iter().all(|&e| e < 1.0)
        && ests[2] > 0.95;
    report(
        "c05",
        "l2-norm-sections",
        pass,
        &format!(
            "est(H): M=50 -> {:.6}, M=200 -> {:.6}, M=800 -> {:.6}; strictly increasing, all < 1, last > 0.95",
            ests[0], ests[1], ests[2]
        ),
    );
    assert!(pass, "l2 section norms out of expected pattern: {ests:?}");
}

#[test]
fn c06_kak_involution() {
    use rand::Rng;
    let big_w = 32i64;
    let m0 = 8192i64;
    let mut worst = 0.0f64;
    let mut all_decreased = true;
    for trial in 0..5u64 {
        let mut gen = rng::substream(SEED, 6_000 + trial);
        let width = gen.gen_range(1..=32usize);
        let offset = gen.gen_range(-16i64..=16);
        let a = rng::random_sequence(&mut gen, offset, width);
        let res = |m: i64| -> f64 {
            let ka = ops::apply_k(&a, w(-m, m));
            let kka = ops::apply_k(&ka, w(-big_w, big_w));
            l2(&seq::add(&kka, &a.restrict(w(-big_w, big_w)))) / l2(&a)
        };
        let r1 = res(m0);
        let r2 = res(4 * m0);
        worst = worst.max(r1);
        all_decreased &= r2 < r1;
    }
    let pass = worst <= 0.05 && all_decreased;
    report(
        "c06",
        "kak-involution",
        pass,
        &format!("max ||K(K a) + a||/||a|| = {worst:.3e} at M=8192 (tol 0.05); decreased at M=32768 in all 5 trials: {all_decreased}"),
    );
    assert!(pass, "involution residual {worst:.3e} or monotonicity {all_decreased}");
}

#[test]
fn c07_norm_ordering() {
    let p = 4.0;
    let m = 256i64;
    let est = |spec: &OperatorSpec, m: i64| -> f64 {
        let op = spectral::build_truncated_matrix(spec, m).unwrap();
        spectral::lp_norm_estimate(&op, p, 600, 8).unwrap().value
    };
    let eh = est(&OperatorSpec::H, m);
    let ek = est(&OperatorSpec::K, m);
    let ekt = est(&OperatorSpec::Ktilde, m);
    let et = est(&OperatorSpec::Tt { t: 0.5 }, m);
    let n4 = spectral::np_constant(p).unwrap();
    // Half-width estimates: evidence for why the gaps above are structural.
    let et_half = est(&OperatorSpec::Tt { t: 0.5 }, m / 2);
    let eh_half = est(&OperatorSpec::H, m / 2);

    let gap_kt = (ek - et).abs();
    let gap_kth = (ekt - eh).abs();
    let c1 = gap_kt <= 0.02;
    let c2 = gap_kth <= 0.02;
    let c3 = eh <= ek + 0.01;
    let c4 = eh >= n4 - 0.15;
    let pass = c1 && c2 && c3 && c4;
    report(
        "c07",
        "norm-ordering",
        pass,
        &format!(
            "p=4, M=256: est(H)={eh:.4}, est(K)={ek:.4}, est(Kt)={ekt:.4}, est(T_1/2)={et:.4}, n_4={n4:.4}; \
             |est(K)-est(T_1/2)|={gap_kt:.4} (tol 0.02: {c1}), |est(Kt)-est(H)|={gap_kth:.4} (tol 0.02: {c2}), \
             est(H)<=est(K)+0.01: {c3}, est(H)>=n_4-0.15: {c4}"
        ),
    );
    assert!(
        pass,
        "three clauses of this criterion compare quantities that differ by \
         finite-section effects, not by implementation error, and cannot meet \
         the stated tolerances at M = 256:\n\
         (1) |est(K) - est(T_1/2)| measured {gap_kt:.4} > 0.02. The section of K \
         on [-M, M] splits by parity into two blocks, each unitarily equivalent \
         to a section of T_1/2 on roughly [-M/2, M/2]; measured here: \
         est(K@256) = {ek:.4} vs est(T_1/2@128) = {et_half:.4} \
         (difference {:.1e}). So est(K@256) tracks est(T_1/2@128), and the gap \
         demanded to be small is the T_1/2-section growth from half-width 128 \
         to 256 — a convergence-rate property of the truncation, the same no \
         matter how the norms are estimated.\n\
         (2) |est(Kt) - est(H)| measured {gap_kth:.4} > 0.02 for the identical \
         reason: Kt sections are H sections at half the width; measured: \
         est(Kt@256) = {ekt:.4} vs est(H@128) = {eh_half:.4} \
         (difference {:.1e}).\n\
         (3) est(H) >= n_4 - 0.15 requires est >= {:.4}, but interpolation \
         between p=2 and p=oo caps the p=4 norm of the H section at \
         sqrt(||H_M||_2 * ||H_M||_1->oo-ish) ~= 1.97 at M=256, and the measured \
         fully-converged section norm is {eh:.4}. No lower-bound estimator can \
         exceed the true section norm, so this clause needs a much larger M \
         (the section norms grow only slowly toward n_4 = {n4:.4}).\n\
         The remaining clause est(H) <= est(K) + 0.01 holds: {c3}.",
        (ek - et_half).abs(),
        (ekt - eh_half).abs(),
        n4 - 0.15
    );
}

#[test]
fn c08_resolvent() {
    use rand::Rng;
    let m = 200i64;
    let mut max_res = 0.0f64;
    let mut max_bound = 0.0f64;
    let mut count = 0;
    for &lambda in &[0.5, 1.0, 2.0] {
        for trial in 0..10u64 {
            let mut gen = rng::substream(SEED, 8_000 + trial);
            let width = gen.gen_range(1..=64usize);
            let offset = gen.gen_range(-100i64..=100 - width as i64);
            let a = rng::random_sequence(&mut gen, offset, width);
            let (x, residual) = spectral::resolvent_solve(&a, lambda, m).unwrap();
            let na = l2(&a);
            max_res = max_res.max(residual / na);
            max_bound = max_bound.max(l2(&x) * lambda / na);
            count += 1;
        }
    }
    let pass = max_res <= 1e-8 && max_bound <= 1.0 + 1e-12;
    report(
        "c08",
        "resolvent",
        pass,
        &format!(
            "{count} solves at M=200, lambda in {{0.5, 1, 2}}: max residual/||a|| = {max_res:.3e} (tol 1e-8), max lambda*||x||/||a|| = {max_bound:.6} (bound 1)"
        ),
    );
    assert!(pass, "resolvent: residual {max_res:.3e}, contraction {max_bound}");
}

#[test]
fn c09_identities() {
    let n = 1_000_000u64;
    let mut max_err = 0.0f64;

    // The symmetric partial sum's tail is ~2x/N, so arguments stay moderate;
    // 2.1 sits exactly 0.1 from the nearest pole.
    for x in [0.3, 0.5, 1.0 / 3.0, 2.4, -0.77, 2.1, -3.4] {
        let err = (kernels::cot_partial(x, n).unwrap() - kernels::cot_closed(x).unwrap()).abs();
        max_err = max_err.max(err);
    }
    for (u, v) in [(0.3, 0.7), (-0.25, 0.4), (1.3, -2.6), (0.5, 0.25)] {
        let err = (kernels::double_pole_partial(u, v, n).unwrap()
            - kernels::double_pole_sum(u, v).unwrap())
        .abs();
        max_err = max_err.max(err);
    }
    for d in [0.3, 0.25, 0.5, -0.45, 1.7] {
        let err = (kernels::inverse_square_partial(d, n) - kernels::inverse_square_sum(d)).abs();
        max_err = max_err.max(err);
    }
    for d in [0.0, 2.0, -3.0] {
        let err = (kernels::inverse_square_partial(d, n) - PI * PI / 3.0).abs();
        max_err = max_err.max(err);
    }
    for d in [0.3, -0.45, 0.9] {
        let err = (kernels::nu_l1_partial(d, n).unwrap() - kernels::nu_l1_norm(d).unwrap()).abs();
        max_err = max_err.max(err);
    }
    let nu_half = (kernels::nu_l1_norm(0.5).unwrap() - 4.0).abs();

    let pass = max_err <= 1e-5 && nu_half <= 1e-12;
    report(
        "c09",
        "identities",
        pass,
        &format!("max |partial(N=1e6) - closed| = {max_err:.3e} (tol 1e-5); |nu(1/2) - 4| = {nu_half:.3e} (tol 1e-12)"),
    );
    assert!(pass, "identities: max_err {max_err:.3e}, nu_half {nu_half:.3e}");
}

#[test]
fn c10_series_exponential() {
    let delta = make_delta(0);
    let win = w(-64, 64);
    let flow = ops::apply_tt(&delta, 0.2, win);
    let err_at = |margin: i64| -> f64 {
        let series = ops::exp_series_ts(&delta, 0.2, 40, win, Some(margin)).unwrap();
        l2(&seq::sub(&series, &flow))
    };
    let e1 = err_at(4096);
    let e2 = err_at(8192);
    let pass = e1 <= 1e-3 && e2 < e1;
    report(
        "c10",
        "series-exponential",
        pass,
        &format!("windowed l2 error {e1:.3e} at margin 4096 (tol 1e-3); {e2:.3e} at margin 8192 (must decrease)"),
    );
    assert!(pass, "series exponential: e(4096) = {e1:.3e}, e(8192) = {e2:.3e}");
}

#[test]
fn c11_fft_equivalence() {
    let sizes = [256usize, 4096, 65536];
    let specs = [
        OperatorSpec::H,
        OperatorSpec::Hd { d: 0.3 },
        OperatorSpec::Tt { t: 0.5 },
        OperatorSpec::Tt { t: 2.0 },
        OperatorSpec::K,
        OperatorSpec::Ktilde,
        OperatorSpec::Ut { t: 0.7 },
    ];
    let mut max_diff = 0.0f64;
    let mut records: Vec<BenchRecord> = Vec::new();
    for spec in &specs {
        let recs = fastconv::bench_apply(spec, &sizes, 1).unwrap();
        for r in &recs {
            max_diff = max_diff.max(r.max_abs_diff);
        }
        records.extend(recs);
    }

    let path = std::path::Path::new(env!("CARGO_TARGET_TMPDIR")).join("bench.json");
    let mut file = std::fs::File::create(&path).unwrap();
    writeln!(file, "{}", serde_json::to_string_pretty(&records).unwrap()).unwrap();

    let pass = max_diff <= 1e-9;
    report(
        "c11",
        "fft-equivalence",
        pass,
        &format!(
            "max |direct - fft| = {max_diff:.3e} over {} operators x sizes up to 2^16, sup-norm-1 inputs (tol 1e-9); benchmark JSON: {}",
            specs.len(),
            path.display()
        ),
    );
    assert!(pass, "fft equivalence: max diff {max_diff:.3e} > 1e-9");
}

#[test]
fn c12_ut_norm_formula() {
    use rand::Rng;
    let m0 = 8192i64;
    let mut worst = 0.0f64;
    let mut all_decreased = true;
    let mut max_cross = 0.0f64;
    for trial in 0..10u64 {
        let mut gen = rng::substream(SEED, 12_000 + trial);
        let width = gen.gen_range(2..=32usize);
        let offset = gen.gen_range(-16i64..=0);
        let a = rng::random_sequence(&mut gen, offset, width);
        let t: f64 = gen.gen_range(0.1..1.5);
        let n2 = l2(&a).powi(2);

        let (alo, ahi) = a.support().unwrap();
        let ka = ops::apply_k(&a, w(alo, ahi));
        let cross = (2.0 * t).sin() * seq::inner(&a, &ka).re;
        max_cross = max_cross.max(cross.abs() / n2);

        let res = |m: i64| -> f64 {
            let ua = ops::apply_ut(&a, t, w(-m, m));
            (l2(&ua).powi(2) - (n2 + cross)).abs() / n2
        };
        let r1 = res(m0);
        let r2 = res(4 * m0);
        worst = worst.max(r1);
        all_decreased &= r2 < r1;
    }

    let formula_ok = worst <= 0.05 && all_decreased;
    let exists_nonzero_cross = max_cross > 1e-12;
    let pass = formula_ok && exists_nonzero_cross;
    report(
        "c12",
        "ut-norm-formula",
        pass,
        &format!(
            "norm-formula residual {worst:.3e} at M=8192 (tol 0.05), decreasing at 4M: {all_decreased}; \
             max |sin(2t) Re<a, Ka>| / ||a||^2 = {max_cross:.3e} (needs > 1e-12 to witness non-isometry)"
        ),
    );
    assert!(
        pass,
        "the norm formula itself holds (residual {worst:.3e} <= 0.05, decreasing with M: \
         {all_decreased}), but no tested (a, t) can make the cross term \
         sin(2t) * Re<a, Ka> meaningfully nonzero, and none ever will: K has a real \
         antisymmetric kernel, so <a, Ka> = -<Ka, a> = -conj(<a, Ka>), which forces \
         Re<a, Ka> = 0 for every complex sequence a. The measured maximum \
         {max_cross:.3e} (relative to ||a||^2) is rounding noise. Consequently \
         U_t = cos(t) I + sin(t) K satisfies ||U_t a||^2 = ||a||^2 exactly — it is a \
         one-parameter group of isometries (K*K = I together with K^2 = -I makes it \
         unitary), and a nonzero cross term witnessing non-isometry does not exist.",
    );
}
