//! The versioned default-parameter table for `check` suites, printable via
//! `check --print-defaults`. Checks read their parameters from here unless
//! overridden on the command line, so the table is the single source of
//! truth for what a bare `check --property <name>` runs.

use serde_json::json;

/// Bumped whenever any default below changes meaning or value.
pub const VERSION: u32 = 1;

/// Seed used when `--seed` is absent.
pub const DEFAULT_SEED: u64 = 0;

#[derive(Debug, Clone, Copy)]
pub struct PropertyDefaults {
    pub name: &'static str,
    pub trials: usize,
    /// Truncation half-width for intermediate/full applications.
    pub m: Option<i64>,
    /// Output/comparison window half-width.
    pub w: Option<i64>,
    pub p: Option<f64>,
    pub lambda: Option<f64>,
    /// Named tolerances paired with the residuals each trial reports.
    pub tolerances: &'static [(&'static str, f64)],
    pub notes: &'static str,
}

pub const TABLE: &[PropertyDefaults] = &[
    PropertyDefaults {
        name: "isometry",
        trials: 100,
        m: None,
        w: None,
        p: None,
        lambda: None,
        tolerances: &[("max_rel_err", 1e-12)],
        notes: "exact_t_gram vs ||a||^2 over 50 dyadic non-integer t per trial; \
                random support width <= 128",
    },
    PropertyDefaults {
        name: "group-law",
        trials: 20,
        m: Some(8192),
        w: Some(32),
        p: None,
        lambda: None,
        tolerances: &[
            ("residual_over_bound", 1.0),
            ("residual_4m_over_bound", 1.0),
            ("median_ratio_deficit", 0.0),
        ],
        notes: "||T_d T_s a - T_{s+d} a||_2 on [-W, W] against 5 ||a||_2 / sqrt(M); \
                trials mix integer and fractional (s, d); the summary requires the \
                median residual to shrink by >= 1.8x when M is quadrupled",
    },
    PropertyDefaults {
        name: "adjoint",
        trials: 100,
        m: None,
        w: None,
        p: None,
        lambda: None,
        tolerances: &[("pairing_residual", 1e-12)],
        notes: "|<T_t a, b> - <a, -T_{-t} b>| for unit-norm a, b; exact finite sums",
    },
    PropertyDefaults {
        name: "generator",
        trials: 3,
        m: None,
        w: Some(4096),
        p: None,
        lambda: None,
        tolerances: &[("ratio_dev_coarse", 2.0), ("ratio_dev_fine", 2.0)],
        notes: "e(d) = ||(T_d a - a)/d - pi H a||_2 at d = 1e-1, 1e-2, 1e-3; first-order \
                convergence means successive error ratios near 10, so |ratio - 10| <= 2",
    },
    PropertyDefaults {
        name: "strong-continuity",
        trials: 5,
        m: None,
        w: Some(4096),
        p: None,
        lambda: None,
        tolerances: &[
            ("diff_over_pi_t_coarse", 1.3),
            ("diff_over_pi_t_mid", 1.3),
            ("diff_over_pi_t_fine", 1.3),
            ("shrink_ratio", 0.1),
        ],
        notes: "||T_t a - a||_2 at t = 0.5, 0.05, 0.005 stays below ~pi t ||a||_2 \
                (||H|| < 1) and shrinks ~linearly in t",
    },
    PropertyDefaults {
        name: "kak-involution",
        trials: 5,
        m: Some(8192),
        w: Some(32),
        p: None,
        lambda: None,
        tolerances: &[("involution_residual", 0.05)],
        notes: "||K(K a) + a||_2 / ||a||_2 on [-W, W] with the inner application \
                truncated to [-M, M]",
    },
    PropertyDefaults {
        name: "ut-norm",
        trials: 10,
        m: Some(8192),
        w: None,
        p: None,
        lambda: None,
        tolerances: &[("formula_residual", 0.05)],
        notes: "|(windowed ||U_t a||_2^2) - (||a||_2^2 + sin(2t) Re<a, K a>)| / ||a||_2^2; \
                Re<a, K a> = 0 identically (K is real antisymmetric), so the formula \
                reduces to the isometry ||U_t a||_2 = ||a||_2",
    },
    PropertyDefaults {
        name: "resolvent",
        trials: 10,
        m: Some(200),
        w: None,
        p: None,
        lambda: Some(1.0),
        tolerances: &[
            ("linear_residual_over_norm", 1e-8),
            ("contraction_excess", 1.0),
        ],
        notes: "solve (pi H_M - lambda) x = a; contraction_excess = lambda ||x||_2 / ||a||_2, \
                which the negativity of the generator keeps at most 1",
    },
    PropertyDefaults {
        name: "identities",
        trials: 5,
        m: None,
        w: None,
        p: None,
        lambda: None,
        tolerances: &[("max_abs_err", 1e-5), ("nu_half_err", 1e-12)],
        notes: "symmetric partial sums at N = 1e6 vs closed forms (cotangent, double-pole, \
                inverse-square, integer shift, nu l1 norm); one report per family, so \
                --trials is ignored; arguments stay >= 0.1 away from poles",
    },
    PropertyDefaults {
        name: "ordering",
        trials: 1,
        m: Some(256),
        w: None,
        p: Some(4.0),
        lambda: None,
        tolerances: &[
            ("gap_k_vs_t_half", 0.02),
            ("gap_ktilde_vs_h", 0.02),
            ("h_minus_k", 0.01),
            ("np_shortfall", 0.0),
        ],
        notes: "lower-bound l^p norm estimates of truncated H, K, Ktilde, T_1/2 at p = 4. \
                With the default M this check fails (exit 1) for structural reasons: \
                K/Ktilde sections at half-width M are unitarily equivalent to T_1/2/H \
                sections at half-width ~M/2, so the first two gaps measure the section \
                convergence rate, and est(H) at M = 256 sits well below n_p - 0.15",
    },
];

pub fn lookup(name: &str) -> &'static PropertyDefaults {
    TABLE
        .iter()
        .find(|d| d.name == name)
        .expect("every property has a defaults entry")
}

/// The full table as one JSON document (for `--print-defaults`).
pub fn table_json() -> serde_json::Value {
    let properties: serde_json::Map<String, serde_json::Value> = TABLE
        .iter()
        .map(|d| {
            let tolerances: serde_json::Map<String, serde_json::Value> = d
                .tolerances
                .iter()
                .map(|&(k, v)| (k.to_string(), json!(v)))
                .collect();
            let mut entry = serde_json::Map::new();
            entry.insert("trials".into(), json!(d.trials));
            if let Some(m) = d.m {
                entry.insert("M".into(), json!(m));
            }
            if let Some(w) = d.w {
                entry.insert("W".into(), json!(w));
            }
            if let Some(p) = d.p {
                entry.insert("p".into(), json!(p));
            }
            if let Some(lambda) = d.lambda {
                entry.insert("lambda".into(), json!(lambda));
            }
            entry.insert("tolerances".into(), json!(tolerances));
            entry.insert("notes".into(), json!(d.notes));
            (d.name.to_string(), json!(entry))
        })
        .collect();
    json!({
        "version": VERSION,
        "seed": DEFAULT_SEED,
        "properties": properties,
    })
}
