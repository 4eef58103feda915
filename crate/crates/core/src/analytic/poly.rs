use std::collections::HashMap;
use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;

use crate::codec::OverlapSpec;
use crate::error::{Error, Result};

const EDGE: f64 = 1e-12;
/// Slack below `1/√2` so that typed-in values such as `0.70710678` qualify.
const Q_MIN_SLACK: f64 = 1e-8;
pub const Q_MAX: f64 = 0.85;
const MAX_DEPTH: usize = 64;
const MEMO_SCALE: f64 = 1e12;

fn q_max_b() -> f64 {
    (2.0f64 / 3.0).sqrt()
}

/// Exponent of the base solution `u^λ`: `λ = (1 - γ)/γ`.
pub fn lambda_of(spec: &OverlapSpec) -> f64 {
    (1.0 - spec.gamma()) / spec.gamma()
}

/// Which closed expression describes `f` on `[0, 0.5]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PolyCase {
    /// `1/√2 <= q <= √3 - 1`: one subtracted term.
    A1,
    /// `√3 - 1 < q`, `v_3 >= 0.5`: two subtracted terms.
    A2,
    /// `v_3 < 0.5 <= v_4`: three subtracted terms.
    A3,
    /// `v_4 < 0.5 <= 2 v_1`: four subtracted terms, a thin band just below 0.8.
    A4,
    /// `0.8 < q <= √(2/3)`: the shifted term itself needs a correction.
    B,
    /// Generic evaluation of `f(u) = 2q f(qu) - f(u - v_1)`.
    Recursive,
}

impl PolyCase {
    fn explicit_terms(self) -> Option<usize> {
        match self {
            PolyCase::A1 => Some(1),
            PolyCase::A2 => Some(2),
            PolyCase::A3 => Some(3),
            PolyCase::A4 => Some(4),
            PolyCase::B | PolyCase::Recursive => None,
        }
    }

    fn from_terms(k: usize) -> Option<Self> {
        match k {
            1 => Some(PolyCase::A1),
            2 => Some(PolyCase::A2),
            3 => Some(PolyCase::A3),
            4 => Some(PolyCase::A4),
            _ => None,
        }
    }
}

impl fmt::Display for PolyCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

fn check_range(q: f64) -> Result<()> {
    if !(FRAC_1_SQRT_2 - Q_MIN_SLACK..=Q_MAX + EDGE).contains(&q) {
        return Err(Error::Unsupported {
            q,
            reason: "polynomial approximation covers 1/sqrt(2) <= q <= 0.85; use the Gaussian approximation above",
        });
    }
    Ok(())
}

/// Breakpoints `v_n = (1 - q)/q^n` that fall strictly inside `[0, 0.5)`.
fn inner_breakpoints(q: f64) -> Vec<f64> {
    let v1 = (1.0 - q) / q;
    std::iter::successors(Some(v1), |v| Some(v / q))
        .take_while(|&v| v < 0.5 - EDGE)
        .collect()
}

fn select_case(q: f64) -> Result<PolyCase> {
    check_range(q)?;
    let v1 = (1.0 - q) / q;
    if 2.0 * v1 >= 0.5 - EDGE {
        let k = inner_breakpoints(q).len();
        PolyCase::from_terms(k).ok_or(Error::Unsupported {
            q,
            reason: "unexpected breakpoint count",
        })
    } else if q <= q_max_b() + EDGE {
        Ok(PolyCase::B)
    } else {
        Ok(PolyCase::Recursive)
    }
}

/// Normalization constant of the explicit cases,
/// `c = 1 / (2γ (0.5^(1/γ) - Σ_{i<=k} (0.5 - v_i)^(1/γ)))`.
pub fn poly_c(spec: &OverlapSpec, case: PolyCase) -> Result<f64> {
    let q = spec.q();
    let selected = select_case(q)?;
    let Some(k) = case.explicit_terms() else {
        return Err(Error::Unsupported {
            q,
            reason: "no closed normalization for this case; use the recursive evaluator or the Gaussian approximation",
        });
    };
    if selected != case {
        return Err(Error::InvalidParameter {
            name: "case",
            reason: format!("q = {q} falls in case {selected}, not {case}"),
        });
    }
    Ok(explicit_c(spec, &inner_breakpoints(q)[..k]))
}

fn explicit_c(spec: &OverlapSpec, breakpoints: &[f64]) -> f64 {
    let g = spec.gamma();
    let e = 1.0 / g;
    let tail: f64 = breakpoints.iter().map(|v| (0.5 - v).powf(e)).sum();
    1.0 / (2.0 * g * (0.5f64.powf(e) - tail))
}

/// Unit-scale (`c = 1`) evaluator of `g(u) = 2q g(qu) - g(u - v_1)` above
/// `v_1`, `g(u) = u^λ` below. Both arguments shrink, so the recursion reaches
/// the base interval; results are memoized per evaluator.
#[derive(Debug, Clone)]
pub struct RecursiveEvaluator {
    q: f64,
    v1: f64,
    lambda: f64,
    memo: HashMap<i64, f64>,
}

impl RecursiveEvaluator {
    pub fn new(spec: &OverlapSpec) -> Self {
        let q = spec.q();
        Self {
            q,
            v1: (1.0 - q) / q,
            lambda: lambda_of(spec),
            memo: HashMap::new(),
        }
    }

    fn base(&self, u: f64) -> f64 {
        if u <= 0.0 {
            0.0
        } else {
            u.powf(self.lambda)
        }
    }

    pub fn unit(&mut self, u: f64) -> Result<f64> {
        self.unit_at(u, 0)
    }

    fn unit_at(&mut self, u: f64, depth: usize) -> Result<f64> {
        if u <= self.v1 {
            return Ok(self.base(u));
        }
        if depth >= MAX_DEPTH {
            return Err(Error::DepthExceeded(MAX_DEPTH));
        }
        let key = (u * MEMO_SCALE).round() as i64;
        if let Some(&v) = self.memo.get(&key) {
            return Ok(v);
        }
        let v = 2.0 * self.q * self.unit_at(self.q * u, depth + 1)?
            - self.unit_at(u - self.v1, depth + 1)?;
        self.memo.insert(key, v);
        Ok(v)
    }

    /// `∫_0^x g(u) du`, through the same recursion:
    /// `G(x) = G(v_1) + 2 (G(qx) - G(q v_1)) - G(x - v_1)` for `x > v_1`.
    pub fn unit_integral(&self, x: f64) -> Result<f64> {
        self.integral_at(x, 0)
    }

    fn integral_at(&self, x: f64, depth: usize) -> Result<f64> {
        let base = |x: f64| {
            if x <= 0.0 {
                0.0
            } else {
                x.powf(self.lambda + 1.0) / (self.lambda + 1.0)
            }
        };
        if x <= self.v1 {
            return Ok(base(x));
        }
        if depth >= MAX_DEPTH {
            return Err(Error::DepthExceeded(MAX_DEPTH));
        }
        Ok(base(self.v1) + 2.0 * (self.integral_at(self.q * x, depth + 1)? - base(self.q * self.v1))
            - self.integral_at(x - self.v1, depth + 1)?)
    }
}

/// Piecewise approximation `f(u) ≈ c u^λ - c Σ (u - v_i)^λ` on `[0, 0.5]`,
/// extended by symmetry to `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewisePolyApprox {
    spec: OverlapSpec,
    lambda: f64,
    c: f64,
    breakpoints: Vec<f64>,
    case: PolyCase,
}

impl PiecewisePolyApprox {
    /// Picks the case from where the breakpoints fall relative to 0.5.
    pub fn new(spec: &OverlapSpec) -> Result<Self> {
        let case = select_case(spec.q())?;
        Self::build(spec, case)
    }

    /// Forces a case. Explicit cases must match the one `q` falls in; `B`
    /// is valid up to `√(2/3)`; `Recursive` anywhere in the supported range.
    pub fn with_case(spec: &OverlapSpec, case: PolyCase) -> Result<Self> {
        let q = spec.q();
        let selected = select_case(q)?;
        let ok = match case {
            PolyCase::Recursive => true,
            PolyCase::B => q <= q_max_b() + EDGE,
            explicit => explicit == selected,
        };
        if !ok {
            return Err(Error::InvalidParameter {
                name: "case",
                reason: format!("q = {q} falls in case {selected}, not {case}"),
            });
        }
        Self::build(spec, case)
    }

    fn build(spec: &OverlapSpec, case: PolyCase) -> Result<Self> {
        let breakpoints = inner_breakpoints(spec.q());
        let c = match case.explicit_terms() {
            Some(k) => explicit_c(spec, &breakpoints[..k]),
            None => 0.5 / RecursiveEvaluator::new(spec).unit_integral(0.5)?,
        };
        Ok(Self {
            spec: *spec,
            lambda: lambda_of(spec),
            c,
            breakpoints,
            case,
        })
    }

    pub fn q(&self) -> f64 {
        self.spec.q()
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    /// `v_n < 0.5`, increasing.
    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn case(&self) -> PolyCase {
        self.case
    }

    fn phi(&self, u: f64) -> f64 {
        if u <= 0.0 {
            0.0
        } else {
            self.c * u.powf(self.lambda)
        }
    }

    /// Evaluates on the left half `[0, 0.5]`.
    pub fn eval(&self, u: f64) -> Result<f64> {
        if !(0.0..=0.5).contains(&u) {
            return Err(Error::OutOfRange {
                value: u,
                expected: "[0, 0.5]; mirror with f(u) = f(1 - u)",
            });
        }
        match self.case {
            PolyCase::A1 | PolyCase::A2 | PolyCase::A3 | PolyCase::A4 => {
                let shifted: f64 = self
                    .breakpoints
                    .iter()
                    .take_while(|&&v| v < u)
                    .map(|&v| self.phi(u - v))
                    .sum();
                Ok(self.phi(u) - shifted)
            }
            PolyCase::B => {
                let v1 = self.breakpoints[0];
                if u <= v1 {
                    return Ok(self.phi(u));
                }
                let q = self.q();
                let scaled = 2.0 * q * self.c * RecursiveEvaluator::new(&self.spec).unit(q * u)?;
                Ok(scaled - self.phi(u - v1) + self.phi(u - 2.0 * v1))
            }
            PolyCase::Recursive => {
                Ok(self.c * RecursiveEvaluator::new(&self.spec).unit(u)?)
            }
        }
    }

    /// Evaluates on `[0, 1]` using `f(u) = f(1 - u)`.
    pub fn eval_full(&self, u: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&u) {
            return Err(Error::OutOfRange {
                value: u,
                expected: "[0, 1]",
            });
        }
        self.eval(if u > 0.5 { 1.0 - u } else { u })
    }
}

pub fn poly_eval(approx: &PiecewisePolyApprox, u: f64) -> Result<f64> {
    approx.eval(u)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::closed_form_sqrt2;

    fn spec(q: f64) -> OverlapSpec {
        OverlapSpec::from_q(q).unwrap()
    }

    fn trapezoid_half(approx: &PiecewisePolyApprox, n: usize) -> f64 {
        let h = 0.5 / n as f64;
        let mut acc = 0.5 * (approx.eval(0.0).unwrap() + approx.eval(0.5).unwrap());
        for i in 1..n {
            acc += approx.eval(i as f64 * h).unwrap();
        }
        acc * h
    }

    #[test]
    fn lambda_values() {
        assert!((lambda_of(&OverlapSpec::from_gamma(0.5).unwrap()) - 1.0).abs() < 1e-15);
        assert_eq!(lambda_of(&spec(0.5)), 0.0);
        assert!((lambda_of(&spec(0.8)) - 2.106_283_7).abs() < 1e-7);
    }

    #[test]
    #[allow(clippy::approx_constant)]
    fn case_selection() {
        let case = |q| PiecewisePolyApprox::new(&spec(q)).unwrap().case();
        assert_eq!(case(FRAC_1_SQRT_2), PolyCase::A1);
        assert_eq!(case(0.70710678), PolyCase::A1);
        assert_eq!(case(0.725), PolyCase::A1);
        assert_eq!(case(3f64.sqrt() - 1.0), PolyCase::A1);
        assert_eq!(case(0.75), PolyCase::A2);
        assert_eq!(case(0.775), PolyCase::A3);
        assert_eq!(case(0.79), PolyCase::A3);
        assert_eq!(case(0.8), PolyCase::A4);
        assert_eq!(case(0.81), PolyCase::B);
        assert_eq!(case(0.84), PolyCase::Recursive);
        assert_eq!(case(0.85), PolyCase::Recursive);
        assert!(PiecewisePolyApprox::new(&spec(0.7)).is_err());
        assert!(PiecewisePolyApprox::new(&spec(0.86)).is_err());
    }

    #[test]
    fn normalization_constant() {
        let c = poly_c(&spec(FRAC_1_SQRT_2), PolyCase::A1).unwrap();
        assert!((c - 4.121_320_343_559_642).abs() < 1e-9);
        assert!((c - 1.0 / (3.0 * 2f64.sqrt() - 4.0)).abs() < 1e-12);
        assert!(poly_c(&spec(0.75), PolyCase::A1).is_err());
        assert!(poly_c(&spec(0.82), PolyCase::B).is_err());
        assert!(poly_c(&spec(0.9), PolyCase::A1).is_err());
        for (q, case) in [(0.75, PolyCase::A2), (0.79, PolyCase::A3), (0.8, PolyCase::A4)] {
            let c = poly_c(&spec(q), case).unwrap();
            let approx = PiecewisePolyApprox::new(&spec(q)).unwrap();
            assert_eq!(approx.c(), c);
            assert!((trapezoid_half(&approx, 100_000) - 0.5).abs() < 1e-6, "q = {q}");
        }
    }

    #[test]
    fn recursive_normalization_matches_quadrature() {
        for q in [0.81, 0.82, 0.84, 0.85] {
            let approx = PiecewisePolyApprox::new(&spec(q)).unwrap();
            assert!((trapezoid_half(&approx, 100_000) - 0.5).abs() < 1e-6, "q = {q}");
        }
    }

    #[test]
    fn exact_at_sqrt2() {
        let approx = PiecewisePolyApprox::new(&spec(FRAC_1_SQRT_2)).unwrap();
        assert!((approx.lambda() - 1.0).abs() < 1e-15);
        assert!((approx.eval(0.3).unwrap() - 1.236_396_103_067_892_7).abs() < 1e-9);
        assert!((approx.eval(0.5).unwrap() - 1.707_106_781_186_547_5).abs() < 1e-12);
        for k in 0..=1000 {
            let u = 0.5 * k as f64 / 1000.0;
            let diff = approx.eval(u).unwrap() - closed_form_sqrt2(u).unwrap();
            assert!(diff.abs() < 1e-12, "u = {u}: {diff}");
        }
    }

    #[test]
    fn vanishes_at_origin() {
        for q in [FRAC_1_SQRT_2, 0.75, 0.8, 0.82, 0.85] {
            assert_eq!(PiecewisePolyApprox::new(&spec(q)).unwrap().eval(0.0).unwrap(), 0.0);
        }
    }

    #[test]
    fn base_piece_solves_scaling_equation() {
        for q in [FRAC_1_SQRT_2, 0.75, 0.8, 0.85] {
            let approx = PiecewisePolyApprox::new(&spec(q)).unwrap();
            for k in 1..50 {
                let u = approx.breakpoints()[0] * k as f64 / 50.0;
                let residual = approx.phi(u) - 2.0 * q * approx.phi(q * u);
                assert!(residual.abs() < 1e-12 * approx.c().max(1.0));
            }
        }
    }

    #[test]
    fn continuous_at_breakpoints() {
        for q in [FRAC_1_SQRT_2, 0.725, 0.75, 0.775, 0.79, 0.8, 0.81, 0.82, 0.85] {
            let approx = PiecewisePolyApprox::new(&spec(q)).unwrap();
            let v1 = approx.breakpoints()[0];
            let mut points = approx.breakpoints().to_vec();
            if 2.0 * v1 < 0.5 {
                points.push(2.0 * v1);
            }
            for v in points.into_iter().filter(|v| v + 1e-13 <= 0.5) {
                let left = approx.eval(v - 1e-13).unwrap();
                let right = approx.eval(v + 1e-13).unwrap();
                assert!((left - right).abs() < 1e-9, "q = {q}, v = {v}");
            }
        }
    }

    #[test]
    fn recursive_agrees_with_explicit_cases() {
        for q in [FRAC_1_SQRT_2, 0.72, 0.75, 0.76, 0.775, 0.79, 0.8, 0.81, 0.815] {
            let s = spec(q);
            let explicit = PiecewisePolyApprox::new(&s).unwrap();
            let recursive = PiecewisePolyApprox::with_case(&s, PolyCase::Recursive).unwrap();
            assert!((explicit.c() - recursive.c()).abs() < 1e-9 * explicit.c());
            for k in 0..=500 {
                let u = 0.5 * k as f64 / 500.0;
                let a = explicit.eval(u).unwrap();
                let b = recursive.eval(u).unwrap();
                assert!((a - b).abs() < 1e-9, "q = {q}, u = {u}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn case_b_valid_below_its_band() {
        let s = spec(0.75);
        let b = PiecewisePolyApprox::with_case(&s, PolyCase::B).unwrap();
        let a = PiecewisePolyApprox::new(&s).unwrap();
        for k in 0..=100 {
            let u = 0.005 * k as f64;
            assert!((a.eval(u).unwrap() - b.eval(u).unwrap()).abs() < 1e-9);
        }
        assert!(PiecewisePolyApprox::with_case(&spec(0.84), PolyCase::B).is_err());
        assert!(PiecewisePolyApprox::with_case(&spec(0.75), PolyCase::A3).is_err());
    }

    #[test]
    fn eval_domain() {
        let approx = PiecewisePolyApprox::new(&spec(0.75)).unwrap();
        assert!(approx.eval(0.6).is_err());
        assert!(approx.eval(-0.1).is_err());
        assert_eq!(approx.eval_full(0.7).unwrap(), approx.eval(1.0 - 0.7).unwrap());
        assert!(approx.eval_full(1.5).is_err());
    }

    #[test]
    fn breakpoints_increase() {
        for q in [FRAC_1_SQRT_2, 0.75, 0.8, 0.85] {
            let approx = PiecewisePolyApprox::new(&spec(q)).unwrap();
            let bp = approx.breakpoints();
            assert!(bp[0] < 0.5);
            assert!(bp.windows(2).all(|w| w[0] < w[1]));
            assert!(approx.lambda() > 0.0);
            assert!(approx.c() > 0.0);
        }
        let bp = PiecewisePolyApprox::new(&spec(0.75)).unwrap().breakpoints().to_vec();
        assert!((bp[0] - 1.0 / 3.0).abs() < 1e-15);
        assert!((bp[1] - 4.0 / 9.0).abs() < 1e-15);
    }
}
