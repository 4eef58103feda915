//! Analytic descriptions of the codeword density.
//!
//! * [`closed_form_sqrt2`]: the exact density at `q = 1/√2`.
//! * [`PiecewisePolyApprox`]: `c u^λ` minus shifted copies of itself, valid
//!   for `1/√2 <= q <= 0.85`.
//! * [`GaussianApprox`]: a bell curve centred at 0.5 whose variance follows
//!   from `q f(0.5) = f(0.5 / q)`; intended for `q` close to 1.

mod gaussian;
mod poly;

pub use gaussian::{gaussian_eval, gaussian_sigma2, GaussianApprox};
pub use poly::{lambda_of, poly_c, poly_eval, PiecewisePolyApprox, PolyCase, RecursiveEvaluator};

use crate::codec::OverlapSpec;
use crate::error::{Error, Result};
use std::f64::consts::SQRT_2;

/// `(√5 - 1) / 2`, the upper end of the high-rate band.
pub const GOLDEN_Q: f64 = 0.618_033_988_749_894_9;

/// Exact density at `q = 1/√2`: a linear ramp up to `√2 - 1`, flat at
/// `1/(2 - √2)` in the middle and mirrored on the right.
pub fn closed_form_sqrt2(u: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&u) {
        return Err(Error::OutOfRange {
            value: u,
            expected: "[0, 1]",
        });
    }
    let slope = 1.0 / (3.0 * SQRT_2 - 4.0);
    let v = if u <= SQRT_2 - 1.0 {
        u * slope
    } else if u <= 2.0 - SQRT_2 {
        1.0 / (2.0 - SQRT_2)
    } else {
        (1.0 - u) * slope
    };
    Ok(v)
}

/// Points `q^n / (q + 1)`, `n = 1..=n_max`, where the density vanishes for
/// `0.5 < q <= (√5 - 1)/2`. Their mirrors `1 - q^n/(q + 1)` are zeros too.
pub fn high_rate_zeros(spec: &OverlapSpec, n_max: usize) -> Result<Vec<f64>> {
    let q = spec.q();
    if !(q > 0.5 && q <= GOLDEN_Q + 1e-12) {
        return Err(Error::Unsupported {
            q,
            reason: "zeros only proved for high rates, 0.5 < q <= (sqrt(5)-1)/2",
        });
    }
    Ok((1..=n_max as i32).map(|n| q.powi(n) / (q + 1.0)).collect())
}

/// Samples `eval` on the uniform grid `k / cells`, `k = 0..=cells`.
pub fn sample_grid<F>(cells: usize, mut eval: F) -> Result<(Vec<f64>, Vec<f64>)>
where
    F: FnMut(f64) -> Result<f64>,
{
    let u: Vec<f64> = (0..=cells).map(|k| k as f64 / cells as f64).collect();
    let f = u.iter().map(|&x| eval(x)).collect::<Result<Vec<_>>>()?;
    Ok((u, f))
}
