//! `analyze`: norm estimation, the n_p constant, and direct-vs-fft
//! benchmarks, all emitted as JSON on stdout.

use dht_core::fastconv;
use dht_core::ops::OperatorSpec;
use dht_core::spectral;
use dht_core::Result;

pub fn run_norm(
    spec: &OperatorSpec,
    p: f64,
    m: i64,
    iters: Option<u32>,
    restarts: Option<u32>,
) -> Result<()> {
    let op = spectral::build_truncated_matrix(spec, m)?;
    let estimate = if p == 2.0 {
        spectral::l2_norm_estimate(&op, iters.unwrap_or(300), 1e-12)
    } else {
        spectral::lp_norm_estimate(&op, p, iters.unwrap_or(600), restarts.unwrap_or(8))?
    };
    println!(
        "{}",
        serde_json::to_string_pretty(&estimate).expect("estimate serializes")
    );
    Ok(())
}

pub fn run_np(p: f64) -> Result<()> {
    let n_p = spectral::np_constant(p)?;
    println!(
        "{}",
        serde_json::to_string_pretty(&serde_json::json!({ "n_p": n_p }))
            .expect("constant serializes")
    );
    Ok(())
}

pub fn run_bench(spec: &OperatorSpec, sizes: &[usize], repeats: u32) -> Result<()> {
    let records = fastconv::bench_apply(spec, sizes, repeats)?;
    println!(
        "{}",
        serde_json::to_string_pretty(&records).expect("records serialize")
    );
    Ok(())
}
