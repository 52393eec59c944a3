//! Finitely supported bi-infinite sequences, index windows, and CSV
//! interchange.
//!
//! A [`Sequence`] stores a contiguous block of complex values starting at an
//! integer `offset`; every index outside the block reads as zero. Sequences
//! are kept in canonical form: exactly-zero entries are trimmed from both
//! ends of the block (interior zeros stay), so structural equality agrees
//! with mathematical equality of finitely supported sequences.

use std::io::{BufRead, BufReader, Write as IoWrite};
use std::path::Path;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::sum::{Kahan, KahanC};

/// Default cap on window width and on the span of a CSV file.
pub const MAX_WINDOW_WIDTH: i64 = 1 << 24;

/// An inclusive range of sequence indices `[lo, hi]` on which operator
/// output is materialized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Window {
    m_lo: i64,
    m_hi: i64,
}

impl Window {
    /// Window `[lo, hi]` with the default width cap of `2^24`.
    pub fn new(lo: i64, hi: i64) -> Result<Window> {
        Window::with_max_width(lo, hi, MAX_WINDOW_WIDTH)
    }

    /// Window `[lo, hi]` with an explicit width cap.
    pub fn with_max_width(lo: i64, hi: i64, max_width: i64) -> Result<Window> {
        if lo > hi {
            return Err(Error::InvalidParameter(format!(
                "window bounds out of order: [{lo}, {hi}]"
            )));
        }
        let width = (hi as i128) - (lo as i128) + 1;
        if width > max_width as i128 {
            return Err(Error::Resource(format!(
                "window width {width} exceeds cap {max_width}"
            )));
        }
        Ok(Window { m_lo: lo, m_hi: hi })
    }

    pub fn lo(&self) -> i64 {
        self.m_lo
    }

    pub fn hi(&self) -> i64 {
        self.m_hi
    }

    pub fn width(&self) -> i64 {
        self.m_hi - self.m_lo + 1
    }

    pub fn contains(&self, m: i64) -> bool {
        self.m_lo <= m && m <= self.m_hi
    }

    pub fn iter(&self) -> std::ops::RangeInclusive<i64> {
        self.m_lo..=self.m_hi
    }

    /// The symmetric window `[-m, m]`.
    pub fn symmetric(m: i64) -> Result<Window> {
        Window::new(-m, m)
    }
}

/// A finitely supported sequence of complex numbers indexed by `i64`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Sequence {
    offset: i64,
    values: Vec<Complex64>,
}

impl Sequence {
    /// Builds a sequence from a starting index and a block of values.
    ///
    /// Rejects non-finite entries and index-range overflow; trims
    /// exactly-zero values from both ends to canonical form.
    pub fn new(offset: i64, values: Vec<Complex64>) -> Result<Sequence> {
        if values
            .iter()
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::InvalidParameter(
                "sequence entries must be finite".into(),
            ));
        }
        if (offset as i128) + (values.len() as i128) > i64::MAX as i128 {
            return Err(Error::InvalidParameter(
                "sequence support exceeds the index range".into(),
            ));
        }
        Ok(Sequence::normalized(offset, values))
    }

    /// Canonical empty (identically zero) sequence.
    pub fn empty() -> Sequence {
        Sequence {
            offset: 0,
            values: Vec::new(),
        }
    }

    /// Internal constructor for freshly computed blocks: canonicalizes but
    /// skips the finiteness scan (operator output on finite input is finite).
    pub(crate) fn from_block(offset: i64, values: Vec<Complex64>) -> Sequence {
        Sequence::normalized(offset, values)
    }

    fn normalized(offset: i64, mut values: Vec<Complex64>) -> Sequence {
        let is_zero = |z: &Complex64| z.re == 0.0 && z.im == 0.0;
        let head = values.iter().take_while(|z| is_zero(z)).count();
        if head == values.len() {
            return Sequence::empty();
        }
        let tail = values.iter().rev().take_while(|z| is_zero(z)).count();
        values.truncate(values.len() - tail);
        values.drain(..head);
        Sequence {
            offset: offset + head as i64,
            values,
        }
    }

    pub fn offset(&self) -> i64 {
        self.offset
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Inclusive support bounds `(lo, hi)`, or `None` for the zero sequence.
    pub fn support(&self) -> Option<(i64, i64)> {
        if self.values.is_empty() {
            None
        } else {
            Some((self.offset, self.offset + self.values.len() as i64 - 1))
        }
    }

    /// Entry at index `m` (zero outside the stored block).
    pub fn get(&self, m: i64) -> Complex64 {
        if m < self.offset {
            return Complex64::ZERO;
        }
        let i = (m - self.offset) as u64;
        if i < self.values.len() as u64 {
            self.values[i as usize]
        } else {
            Complex64::ZERO
        }
    }

    /// Iterates over `(index, value)` pairs of the stored block.
    pub fn entries(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        let offset = self.offset;
        self.values
            .iter()
            .enumerate()
            .map(move |(i, &z)| (offset + i as i64, z))
    }

    /// Materializes the sequence on a window and re-canonicalizes.
    pub fn restrict(&self, w: Window) -> Sequence {
        let values: Vec<Complex64> = w.iter().map(|m| self.get(m)).collect();
        Sequence::normalized(w.lo(), values)
    }
}

/// The unit impulse `delta_{index}`.
pub fn make_delta(index: i64) -> Sequence {
    Sequence {
        offset: index,
        values: vec![Complex64::ONE],
    }
}

/// Translation `(tau_k a)_m = a_{m+k}`; `translate(a, 0)` is `a` bit for bit.
pub fn translate(a: &Sequence, k: i64) -> Sequence {
    if a.is_empty() {
        return Sequence::empty();
    }
    let offset = a
        .offset
        .checked_sub(k)
        .expect("translate: index overflow");
    Sequence {
        offset,
        values: a.values.clone(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

/// Keeps entries whose index has the requested parity, zeroing the rest.
pub fn parity_project(a: &Sequence, parity: Parity) -> Sequence {
    let keep = |m: i64| match parity {
        Parity::Even => m & 1 == 0,
        Parity::Odd => m & 1 != 0,
    };
    let values = a
        .entries()
        .map(|(m, z)| if keep(m) { z } else { Complex64::ZERO })
        .collect();
    Sequence::normalized(a.offset, values)
}

/// Even-index downsampling `(delta_2 a)_j = a_{2j}`.
pub fn downsample_even(a: &Sequence) -> Sequence {
    let Some((lo, hi)) = a.support() else {
        return Sequence::empty();
    };
    let j_lo = (lo + 1).div_euclid(2); // ceil(lo / 2)
    let j_hi = hi.div_euclid(2); // floor(hi / 2)
    if j_lo > j_hi {
        return Sequence::empty();
    }
    let values = (j_lo..=j_hi).map(|j| a.get(2 * j)).collect();
    Sequence::normalized(j_lo, values)
}

/// The `ell^p` norm for `1 <= p < inf`, or the sup norm for `p = inf`.
pub fn lp_norm(a: &Sequence, p: f64) -> Result<f64> {
    if p.is_nan() || p < 1.0 {
        return Err(Error::InvalidParameter(format!(
            "lp_norm requires p >= 1 or p = inf, got {p}"
        )));
    }
    if p == f64::INFINITY {
        return Ok(a.values.iter().map(|z| z.norm()).fold(0.0, f64::max));
    }
    let mut acc = Kahan::new();
    if p == 2.0 {
        for z in &a.values {
            acc.add(z.re * z.re + z.im * z.im);
        }
        Ok(acc.value().sqrt())
    } else if p == 1.0 {
        for z in &a.values {
            acc.add(z.norm());
        }
        Ok(acc.value())
    } else {
        for z in &a.values {
            acc.add(z.norm().powf(p));
        }
        Ok(acc.value().powf(1.0 / p))
    }
}

/// The sesquilinear pairing `<a, b> = sum_m a_m conj(b_m)` (linear in `a`).
pub fn inner(a: &Sequence, b: &Sequence) -> Complex64 {
    let (Some((alo, ahi)), Some((blo, bhi))) = (a.support(), b.support()) else {
        return Complex64::ZERO;
    };
    let lo = alo.max(blo);
    let hi = ahi.min(bhi);
    let mut acc = KahanC::new();
    let mut m = lo;
    while m <= hi {
        acc.add(a.get(m) * b.get(m).conj());
        m += 1;
    }
    acc.value()
}

/// Entrywise sum.
pub fn add(a: &Sequence, b: &Sequence) -> Sequence {
    combine(a, b, |x, y| x + y)
}

/// Entrywise difference `a - b`.
pub fn sub(a: &Sequence, b: &Sequence) -> Sequence {
    combine(a, b, |x, y| x - y)
}

fn combine(a: &Sequence, b: &Sequence, f: impl Fn(Complex64, Complex64) -> Complex64) -> Sequence {
    match (a.support(), b.support()) {
        (None, None) => Sequence::empty(),
        (Some(_), None) => Sequence::normalized(a.offset, a.values.iter().map(|&x| f(x, Complex64::ZERO)).collect()),
        (None, Some(_)) => Sequence::normalized(b.offset, b.values.iter().map(|&y| f(Complex64::ZERO, y)).collect()),
        (Some((alo, ahi)), Some((blo, bhi))) => {
            let lo = alo.min(blo);
            let hi = ahi.max(bhi);
            let values = (lo..=hi).map(|m| f(a.get(m), b.get(m))).collect();
            Sequence::normalized(lo, values)
        }
    }
}

/// Scalar multiple `z * a`.
pub fn scale(a: &Sequence, z: Complex64) -> Sequence {
    Sequence::normalized(a.offset, a.values.iter().map(|&x| z * x).collect())
}

/// Writes a sequence as CSV with header `index,re,im`.
///
/// Values are printed with 17 significant digits, enough for an exact f64
/// round trip through [`read_csv`].
pub fn write_csv<W: IoWrite>(a: &Sequence, out: &mut W) -> Result<()> {
    writeln!(out, "index,re,im")?;
    for (m, z) in a.entries() {
        writeln!(out, "{m},{:.16e},{:.16e}", z.re, z.im)?;
    }
    Ok(())
}

/// Reads a sequence from CSV.
///
/// Requires the exact header `index,re,im`; rows must have strictly
/// ascending indices and finite values. Gaps between rows are filled with
/// zeros, so the stored block stays contiguous.
pub fn read_csv<R: BufRead>(input: R) -> Result<Sequence> {
    let mut lines = input.lines();
    let header = loop {
        match lines.next() {
            None => return Err(Error::Format("empty file, expected header".into())),
            Some(line) => {
                let line = line?;
                if !line.trim().is_empty() {
                    break line;
                }
            }
        }
    };
    if header.trim() != "index,re,im" {
        return Err(Error::Format(format!(
            "bad header {:?}, expected \"index,re,im\"",
            header.trim()
        )));
    }

    let mut offset: i64 = 0;
    let mut prev: Option<i64> = None;
    let mut values: Vec<Complex64> = Vec::new();
    for (lineno, line) in lines.enumerate() {
        let line = line?;
        let row = line.trim();
        if row.is_empty() {
            continue;
        }
        let fields: Vec<&str> = row.split(',').collect();
        if fields.len() != 3 {
            return Err(Error::Format(format!(
                "row {}: expected 3 fields, got {}",
                lineno + 2,
                fields.len()
            )));
        }
        let m: i64 = fields[0].trim().parse().map_err(|_| {
            Error::Format(format!("row {}: bad index {:?}", lineno + 2, fields[0]))
        })?;
        let re: f64 = fields[1].trim().parse().map_err(|_| {
            Error::Format(format!("row {}: bad value {:?}", lineno + 2, fields[1]))
        })?;
        let im: f64 = fields[2].trim().parse().map_err(|_| {
            Error::Format(format!("row {}: bad value {:?}", lineno + 2, fields[2]))
        })?;
        if !re.is_finite() || !im.is_finite() {
            return Err(Error::Format(format!(
                "row {}: non-finite value",
                lineno + 2
            )));
        }
        match prev {
            None => offset = m,
            Some(p) if m <= p => {
                return Err(Error::Format(format!(
                    "row {}: index {m} not strictly ascending (previous {p})",
                    lineno + 2
                )));
            }
            Some(p) => {
                let span = (m as i128) - (offset as i128) + 1;
                if span > MAX_WINDOW_WIDTH as i128 {
                    return Err(Error::Resource(format!(
                        "csv span {span} exceeds cap {MAX_WINDOW_WIDTH}"
                    )));
                }
                for _ in p + 1..m {
                    values.push(Complex64::ZERO);
                }
            }
        }
        prev = Some(m);
        values.push(Complex64::new(re, im));
    }
    Ok(Sequence::normalized(offset, values))
}

/// [`read_csv`] from a file path.
pub fn read_csv_path(path: &Path) -> Result<Sequence> {
    let file = std::fs::File::open(path)?;
    read_csv(BufReader::new(file))
}

/// [`write_csv`] to a file path.
pub fn write_csv_path(a: &Sequence, path: &Path) -> Result<()> {
    let mut file = std::io::BufWriter::new(std::fs::File::create(path)?);
    write_csv(a, &mut file)
}
