//! Binary distributed arithmetic coding for equiprobable sources.
//!
//! With `p = 0.5` the two symbol sub-intervals of `[0, 1)` are `[0, q)` for a
//! zero and `[1 - q, 1)` for a one, where `q = 2^-gamma`. For `q > 0.5` they
//! overlap, and a codeword falling into `[1 - q, q)` cannot be resolved without
//! side information: the decoder branches and keeps the `M` paths closest (in
//! Hamming distance) to the side information.
//!
//! Intervals are tracked in `f64`. The width after `k` symbols is `q^k`, so
//! callers keep sequences short enough for the width to stay well above the
//! `f64` resolution (see [`crate::empirical::auto_seq_len`]).

use std::fmt;

use crate::error::{invalid, Error, Result};

/// The coding parameters `(q, gamma)` of an equiprobable binary DAC.
///
/// `q = 2^-gamma` is the length of each symbol sub-interval and `gamma` is the
/// overlap coefficient, which equals the rate. `gamma = 1` (`q = 0.5`) is
/// classic arithmetic coding.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OverlapSpec {
    q: f64,
    gamma: f64,
}

impl OverlapSpec {
    /// Builds a spec from the sub-interval length, `0.5 <= q < 1`.
    pub fn from_q(q: f64) -> Result<Self> {
        if !(0.5..1.0).contains(&q) {
            return Err(Error::OutOfRange {
                value: q,
                expected: "[0.5, 1)",
            });
        }
        Ok(Self {
            q,
            gamma: -q.log2(),
        })
    }

    /// Builds a spec from the overlap coefficient, `0 < gamma <= 1`.
    pub fn from_gamma(gamma: f64) -> Result<Self> {
        if !(gamma > 0.0 && gamma <= 1.0) {
            return Err(Error::OutOfRange {
                value: gamma,
                expected: "(0, 1]",
            });
        }
        let q = 0.5f64.powf(gamma);
        if q >= 1.0 {
            return Err(Error::OutOfRange {
                value: gamma,
                expected: "(0, 1] with 2^-gamma < 1",
            });
        }
        Ok(Self { q, gamma })
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// Coding rate in bits per source symbol; equals `gamma` for `p = 0.5`.
    pub fn rate(&self) -> f64 {
        self.gamma
    }

    pub fn is_classic(&self) -> bool {
        self.q == 0.5
    }
}

/// Current coding interval `[low, low + width)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntervalState {
    pub low: f64,
    pub width: f64,
}

impl IntervalState {
    pub const UNIT: IntervalState = IntervalState {
        low: 0.0,
        width: 1.0,
    };

    pub fn new(low: f64, width: f64) -> Result<Self> {
        if !(low >= 0.0 && width > 0.0 && low + width <= 1.0) {
            return Err(invalid(
                "interval",
                format!("[{low}, {low} + {width}) is not inside [0, 1)"),
            ));
        }
        Ok(Self { low, width })
    }

    /// Narrows to the sub-interval of `bit`: the low `q` fraction for a zero,
    /// the high `q` fraction for a one.
    #[inline]
    pub fn select(self, bit: bool, q: f64) -> Self {
        let low = if bit {
            self.low + self.width * (1.0 - q)
        } else {
            self.low
        };
        Self {
            low,
            width: self.width * q,
        }
    }

    #[inline]
    pub fn contains(&self, u: f64) -> bool {
        u >= self.low && u < self.low + self.width
    }

    /// Classifies `u` against this interval's overlap band. Equivalent to
    /// [`classify`] on `(u - low) / width` but without the division, so the
    /// thresholds are bit-identical to the bounds produced by [`Self::select`].
    #[inline]
    fn classify_point(&self, u: f64, q: f64) -> TernarySymbol {
        if u < self.low + self.width * (1.0 - q) {
            TernarySymbol::Zero
        } else if u < self.low + self.width * q {
            TernarySymbol::Ambiguous
        } else {
            TernarySymbol::One
        }
    }
}

/// Decoder outcome for one symbol.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TernarySymbol {
    Zero,
    Ambiguous,
    One,
}

impl fmt::Display for TernarySymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TernarySymbol::Zero => "0",
            TernarySymbol::Ambiguous => "A",
            TernarySymbol::One => "1",
        })
    }
}

/// Encodes `bits`, returning the final interval. Its width is `q^len`.
pub fn encode(bits: &[bool], spec: &OverlapSpec) -> Result<IntervalState> {
    if bits.is_empty() {
        return Err(Error::EmptySequence);
    }
    Ok(bits
        .iter()
        .fold(IntervalState::UNIT, |iv, &b| iv.select(b, spec.q)))
}

/// Representative codeword of a final interval: its midpoint. The distance
/// to any other point of the interval is below `width`.
pub fn codeword_value(interval: &IntervalState) -> f64 {
    interval.low + interval.width / 2.0
}

/// Maps a codeword value in `[0, 1)` to `0` below `1 - q`, to the ambiguous
/// symbol on `[1 - q, q)` and to `1` from `q` up.
pub fn classify(u: f64, spec: &OverlapSpec) -> Result<TernarySymbol> {
    if !(0.0..1.0).contains(&u) {
        return Err(Error::OutOfRange {
            value: u,
            expected: "[0, 1)",
        });
    }
    Ok(IntervalState::UNIT.classify_point(u, spec.q))
}

/// Number of positions where `a` and `b` differ.
pub fn hamming(a: &[bool], b: &[bool]) -> Result<usize> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    Ok(a.iter().zip(b).filter(|(x, y)| x != y).count())
}

/// A decoded candidate sequence with its final interval and its Hamming
/// distance to the side information.
#[derive(Debug, Clone, PartialEq)]
pub struct DecoderPath {
    pub symbols: Vec<bool>,
    pub interval: IntervalState,
    pub metric: usize,
}

// Paths share prefixes through a parent-linked arena; only the frontier
// carries interval state.
const ROOT: u32 = u32::MAX;

#[derive(Clone, Copy)]
struct Node {
    parent: u32,
    bit: bool,
}

#[derive(Clone, Copy)]
struct Live {
    node: u32,
    interval: IntervalState,
    metric: usize,
}

/// M-algorithm decoder.
///
/// Decodes `length` symbols from the codeword value `u`. Every ambiguous
/// symbol spawns a zero branch and a one branch; after each symbol only the
/// `m` paths with the smallest metric survive. Ties keep genealogical order
/// (zero branches before one branches), which makes the result deterministic.
/// Returns the first full-length path of minimal metric.
pub fn decode(
    u: f64,
    spec: &OverlapSpec,
    side_info: &[bool],
    length: usize,
    m: usize,
) -> Result<DecoderPath> {
    if m < 1 {
        return Err(invalid("m", "at least one path must be kept"));
    }
    if length != side_info.len() {
        return Err(Error::LengthMismatch {
            left: length,
            right: side_info.len(),
        });
    }
    if !(0.0..1.0).contains(&u) {
        return Err(Error::OutOfRange {
            value: u,
            expected: "[0, 1)",
        });
    }
    let q = spec.q;
    let mut arena: Vec<Node> = Vec::new();
    let mut live = vec![Live {
        node: ROOT,
        interval: IntervalState::UNIT,
        metric: 0,
    }];
    let mut next: Vec<Live> = Vec::new();

    for &side in side_info {
        next.clear();
        for path in &live {
            let branches: &[bool] = match path.interval.classify_point(u, q) {
                TernarySymbol::Zero => &[false],
                TernarySymbol::One => &[true],
                TernarySymbol::Ambiguous => &[false, true],
            };
            for &bit in branches {
                arena.push(Node {
                    parent: path.node,
                    bit,
                });
                next.push(Live {
                    node: (arena.len() - 1) as u32,
                    interval: path.interval.select(bit, q),
                    metric: path.metric + usize::from(bit != side),
                });
            }
        }
        if next.len() > m {
            next.sort_by_key(|p| p.metric);
            next.truncate(m);
        }
        std::mem::swap(&mut live, &mut next);
    }

    let best = live
        .iter()
        .min_by_key(|p| p.metric)
        .copied()
        .expect("decoder frontier is never empty");
    let mut symbols = Vec::with_capacity(length);
    let mut node = best.node;
    while node != ROOT {
        let n = arena[node as usize];
        symbols.push(n.bit);
        node = n.parent;
    }
    symbols.reverse();
    Ok(DecoderPath {
        symbols,
        interval: best.interval,
        metric: best.metric,
    })
}
