//! Monte Carlo estimate of the codeword density.
//!
//! Random equiprobable sequences are encoded with the codec and the midpoints
//! of their final intervals are histogrammed. Sample `i` draws its bits from
//! ChaCha stream `i` under the configured seed, and bin counts are summed as
//! integers, so the histogram does not depend on how work is split across
//! threads.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::codec::{codeword_value, IntervalState, OverlapSpec};
use crate::error::{invalid, Error, Result};

const TRUNCATION: f64 = 1e-12;
pub const MAX_SEQ_LEN: usize = 4096;

/// Smallest `L` with `q^L <= 1e-12`, capped at [`MAX_SEQ_LEN`].
pub fn auto_seq_len(spec: &OverlapSpec) -> usize {
    let q = spec.q();
    let mut len = (TRUNCATION.ln() / q.ln()).ceil().max(1.0) as usize;
    while len < MAX_SEQ_LEN && q.powi(len as i32) > TRUNCATION {
        len += 1;
    }
    while len > 1 && q.powi(len as i32 - 1) <= TRUNCATION {
        len -= 1;
    }
    len.min(MAX_SEQ_LEN)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SeqLen {
    #[default]
    Auto,
    Fixed(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SampleConfig {
    pub samples: u64,
    pub seq_len: SeqLen,
    pub seed: u64,
    pub bins: usize,
}

impl SampleConfig {
    pub fn new(samples: u64, bins: usize, seed: u64) -> Result<Self> {
        if samples < 1 {
            return Err(invalid("samples", "must be at least 1"));
        }
        if bins < 2 {
            return Err(invalid("bins", "must be at least 2"));
        }
        Ok(Self {
            samples,
            seq_len: SeqLen::Auto,
            seed,
            bins,
        })
    }

    pub fn with_seq_len(mut self, seq_len: SeqLen) -> Result<Self> {
        if seq_len == SeqLen::Fixed(0) {
            return Err(invalid("seq_len", "must be at least 1"));
        }
        self.seq_len = seq_len;
        Ok(self)
    }
}

/// Counts over `bins` uniform cells `[k/bins, (k+1)/bins)` of `[0, 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    counts: Vec<u64>,
    density: Vec<f64>,
    total: u64,
}

impl Histogram {
    pub fn from_counts(counts: Vec<u64>) -> Result<Self> {
        if counts.len() < 2 {
            return Err(invalid("bins", "must be at least 2"));
        }
        let total: u64 = counts.iter().sum();
        if total == 0 {
            return Err(Error::Degenerate);
        }
        let scale = counts.len() as f64 / total as f64;
        let density = counts.iter().map(|&c| c as f64 * scale).collect();
        Ok(Self {
            counts,
            density,
            total,
        })
    }

    pub fn bins(&self) -> usize {
        self.counts.len()
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn density(&self) -> &[f64] {
        &self.density
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn centers(&self) -> Vec<f64> {
        let b = self.bins() as f64;
        (0..self.bins()).map(|k| (k as f64 + 0.5) / b).collect()
    }

    /// Bin index of `u`. `u` must lie in `[0, 1)`.
    pub fn bin_of(bins: usize, u: f64) -> usize {
        ((u * bins as f64) as usize).min(bins - 1)
    }
}

fn sample_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Codeword value of the `index`-th random sequence.
pub fn sample_codeword(spec: &OverlapSpec, seq_len: usize, seed: u64, index: u64) -> f64 {
    let q = spec.q();
    let mut rng = sample_rng(seed, index);
    let mut iv = IntervalState::UNIT;
    let mut remaining = seq_len;
    while remaining > 0 {
        let word = rng.next_u64();
        let take = remaining.min(64);
        for k in 0..take {
            iv = iv.select((word >> k) & 1 == 1, q);
        }
        remaining -= take;
    }
    codeword_value(&iv)
}

pub fn sample_histogram(spec: &OverlapSpec, config: &SampleConfig) -> Result<Histogram> {
    let seq_len = match config.seq_len {
        SeqLen::Auto => auto_seq_len(spec),
        SeqLen::Fixed(n) => n,
    };
    let bins = config.bins;
    let counts = (0..config.samples)
        .into_par_iter()
        .fold(
            || vec![0u64; bins],
            |mut acc, i| {
                let u = sample_codeword(spec, seq_len, config.seed, i);
                acc[Histogram::bin_of(bins, u)] += 1;
                acc
            },
        )
        .reduce(
            || vec![0u64; bins],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        );
    Histogram::from_counts(counts)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Metric {
    L1,
    Mse,
    Linf,
}

impl std::str::FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "l1" => Ok(Metric::L1),
            "mse" => Ok(Metric::Mse),
            "linf" => Ok(Metric::Linf),
            _ => Err(invalid("metric", format!("unknown metric `{s}`"))),
        }
    }
}

impl std::fmt::Display for Metric {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Metric::L1 => "l1",
            Metric::Mse => "mse",
            Metric::Linf => "linf",
        })
    }
}

/// Mean absolute, mean squared, or maximum absolute difference.
pub fn distance(a: &[f64], b: &[f64], metric: Metric) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    if a.is_empty() {
        return Err(invalid("curve", "empty"));
    }
    let diffs = a.iter().zip(b).map(|(x, y)| (x - y).abs());
    let n = a.len() as f64;
    Ok(match metric {
        Metric::L1 => diffs.sum::<f64>() / n,
        Metric::Mse => diffs.map(|d| d * d).sum::<f64>() / n,
        Metric::Linf => diffs.fold(0.0, f64::max),
    })
}

/// Averages grid samples `values[n] ≈ f(n / N)` over `bins` uniform cells,
/// with `u = 1` folded into the last cell.
pub fn bin_average(values: &[f64], bins: usize) -> Result<Vec<f64>> {
    if values.len() < 2 || bins < 1 {
        return Err(invalid("bins", "need at least one bin and two grid points"));
    }
    let cells = values.len() - 1;
    let mut sums = vec![0.0; bins];
    let mut counts = vec![0usize; bins];
    for (n, &v) in values.iter().enumerate() {
        let k = (n * bins / cells).min(bins - 1);
        sums[k] += v;
        counts[k] += 1;
    }
    if counts.contains(&0) {
        return Err(invalid("bins", "more bins than grid points"));
    }
    Ok(sums.iter().zip(&counts).map(|(s, &c)| s / c as f64).collect())
}

/// Averages a fine curve onto the points of a coarse one. Each fine sample
/// joins the coarse point whose cell (split at midpoints between coarse
/// points) contains it.
pub fn cell_average(fine_u: &[f64], fine_f: &[f64], coarse_u: &[f64]) -> Result<Vec<f64>> {
    if fine_u.len() != fine_f.len() {
        return Err(Error::LengthMismatch {
            left: fine_u.len(),
            right: fine_f.len(),
        });
    }
    if coarse_u.is_empty() || coarse_u.windows(2).any(|w| w[0] >= w[1]) {
        return Err(invalid("grid", "coarse grid must be strictly increasing"));
    }
    let edges: Vec<f64> = coarse_u.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
    let mut sums = vec![0.0; coarse_u.len()];
    let mut counts = vec![0usize; coarse_u.len()];
    for (&u, &f) in fine_u.iter().zip(fine_f) {
        let k = edges.partition_point(|&e| e <= u);
        sums[k] += f;
        counts[k] += 1;
    }
    if counts.contains(&0) {
        return Err(invalid("grid", "fine grid leaves a coarse cell empty"));
    }
    Ok(sums.iter().zip(&counts).map(|(s, &c)| s / c as f64).collect())
}
