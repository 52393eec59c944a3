//! `apply`: read a sequence CSV, apply one operator, write the result CSV.

use std::path::Path;
use std::time::Instant;

use dht_core::fastconv;
use dht_core::ops::{self, OperatorSpec};
use dht_core::seq::{self, Sequence, Window};
use dht_core::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Direct,
    Fft,
}

pub struct ApplyParams<'a> {
    pub spec: OperatorSpec,
    pub input: &'a Path,
    /// `None` uses the input's support as the output window.
    pub window: Option<(i64, i64)>,
    pub method: Method,
    pub output: &'a Path,
    pub verbose: bool,
}

pub fn run(params: &ApplyParams) -> Result<()> {
    let start = Instant::now();
    let a = seq::read_csv_path(params.input)?;
    let window = match params.window {
        Some((lo, hi)) => Some(Window::new(lo, hi)?),
        None => match a.support() {
            Some((lo, hi)) => Some(Window::new(lo, hi)?),
            None => None,
        },
    };
    let out = match window {
        // Empty input and no window requested: the result is identically 0.
        None => Sequence::empty(),
        Some(w) => match params.method {
            Method::Direct => ops::apply(&params.spec, &a, w)?,
            Method::Fft => fastconv::apply_fast(&params.spec, &a, w)?,
        },
    };
    seq::write_csv_path(&out, params.output)?;
    if params.verbose {
        let span = window
            .map(|w| format!("[{}, {}]", w.lo(), w.hi()))
            .unwrap_or_else(|| "[]".to_string());
        println!(
            "applied {:?} on {} via {:?} in {:.3}s -> {}",
            params.spec,
            span,
            params.method,
            start.elapsed().as_secs_f64(),
            params.output.display()
        );
    }
    Ok(())
}
