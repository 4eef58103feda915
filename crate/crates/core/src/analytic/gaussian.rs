use std::f64::consts::PI;

use crate::codec::OverlapSpec;
use crate::error::{Error, Result};

/// Normal density centred at 0.5.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianApprox {
    sigma2: f64,
}

impl GaussianApprox {
    pub fn new(sigma2: f64) -> Result<Self> {
        if !(sigma2 > 0.0 && sigma2.is_finite()) {
            return Err(Error::OutOfRange {
                value: sigma2,
                expected: "sigma2 > 0",
            });
        }
        Ok(Self { sigma2 })
    }

    /// Variance chosen so that the bell curve satisfies `q f(0.5) = f(0.5/q)`.
    pub fn from_spec(spec: &OverlapSpec) -> Result<Self> {
        Self::new(gaussian_sigma2(spec)?)
    }

    pub fn sigma2(&self) -> f64 {
        self.sigma2
    }

    pub fn sigma(&self) -> f64 {
        self.sigma2.sqrt()
    }

    pub fn peak(&self) -> f64 {
        1.0 / (2.0 * PI * self.sigma2).sqrt()
    }

    pub fn eval(&self, u: f64) -> f64 {
        let d = u - 0.5;
        self.peak() * (-d * d / (2.0 * self.sigma2)).exp()
    }
}

/// `σ² = -(1 - q)² / (8 q² ln q)`.
pub fn gaussian_sigma2(spec: &OverlapSpec) -> Result<f64> {
    let q = spec.q();
    if !(q > 0.5 && q < 1.0) {
        return Err(Error::Unsupported {
            q,
            reason: "Gaussian variance needs 0.5 < q < 1",
        });
    }
    Ok(-(1.0 - q).powi(2) / (8.0 * q * q * q.ln()))
}

pub fn gaussian_eval(approx: &GaussianApprox, u: f64) -> f64 {
    approx.eval(u)
}
