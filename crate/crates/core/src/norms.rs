//! Lp, weak-Lp, maximal-function and Hardy norms; atoms; Lebesgue residuals.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_rational::Ratio;
use num_traits::{One, Zero};

use crate::error::{range, Error, Result};
use crate::group::{cell_of, Cell, DyadicPoint};
use crate::transform::GridFunction;

/// A positive rational exponent `p`.
///
/// Kept rational so that atom bounds `μ(I)^{-1/p}` can be compared exactly
/// against integer-valued functions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Exponent(Ratio<u32>);

impl Exponent {
    pub fn new(numer: u32, denom: u32) -> Result<Self> {
        if numer == 0 || denom == 0 {
            return Err(Error::Exponent {
                value: if denom == 0 { f64::NAN } else { 0.0 },
                constraint: "p > 0",
            });
        }
        Ok(Self(Ratio::new(numer, denom)))
    }

    pub fn one() -> Self {
        Self(Ratio::one())
    }

    pub fn half() -> Self {
        Self(Ratio::new(1, 2))
    }

    pub fn numer(&self) -> u32 {
        *self.0.numer()
    }

    pub fn denom(&self) -> u32 {
        *self.0.denom()
    }

    pub fn value(&self) -> f64 {
        self.numer() as f64 / self.denom() as f64
    }

    /// `1/p - 1`.
    pub fn dual_gap(&self) -> f64 {
        (self.denom() as f64 - self.numer() as f64) / self.numer() as f64
    }

    pub fn is_sub_one(&self) -> bool {
        self.numer() < self.denom()
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.denom() == 1 {
            write!(f, "{}", self.numer())
        } else {
            write!(f, "{}/{}", self.numer(), self.denom())
        }
    }
}

impl FromStr for Exponent {
    type Err = Error;

    /// Accepts `a/b` or a plain decimal such as `0.75`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || range(format!("cannot parse exponent {s:?}"));
        if let Some((a, b)) = s.split_once('/') {
            let a: u32 = a.trim().parse().map_err(|_| bad())?;
            let b: u32 = b.trim().parse().map_err(|_| bad())?;
            return Self::new(a, b);
        }
        let (int, frac) = s.split_once('.').unwrap_or((s, ""));
        if frac.len() > 9 || (int.is_empty() && frac.is_empty()) {
            return Err(bad());
        }
        let digits = format!("{int}{frac}");
        if !digits.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let numer: u64 = digits.parse().map_err(|_| bad())?;
        let denom = 10u64.pow(frac.len() as u32);
        let r = Ratio::new(numer, denom);
        let (n, d) = (
            u32::try_from(*r.numer()).map_err(|_| bad())?,
            u32::try_from(*r.denom()).map_err(|_| bad())?,
        );
        Self::new(n, d)
    }
}

fn check_p(p: f64) -> Result<()> {
    if !(p > 0.0 && p.is_finite()) {
        return Err(Error::Exponent {
            value: p,
            constraint: "0 < p < inf",
        });
    }
    Ok(())
}

/// `(∫ |f|^p dμ)^{1/p}`; a quasi-norm when `p < 1`.
pub fn lp_norm(f: &GridFunction, p: f64) -> Result<f64> {
    check_p(p)?;
    let mean = f.values().iter().map(|v| v.abs().powf(p)).sum::<f64>() / f.len() as f64;
    Ok(mean.powf(1.0 / p))
}

/// `(sup_λ λ^p μ(|f| > λ))^{1/p}`, computed exactly over the finitely many
/// levels of `|f|`.
pub fn weak_lp_norm(f: &GridFunction, p: f64) -> Result<f64> {
    check_p(p)?;
    let mut levels: Vec<f64> = f.values().iter().map(|v| v.abs()).collect();
    levels.sort_unstable_by(|a, b| b.total_cmp(a));
    let total = levels.len() as f64;
    let mut best = 0.0f64;
    let mut i = 0;
    while i < levels.len() {
        let lambda = levels[i];
        if lambda == 0.0 {
            break;
        }
        let mut j = i + 1;
        while j < levels.len() && levels[j] == lambda {
            j += 1;
        }
        // Just below λ the superlevel set is {|f| >= λ}, of measure j / 2^N.
        best = best.max(lambda.powf(p) * (j as f64 / total));
        i = j;
    }
    Ok(best.powf(1.0 / p))
}

/// `M(f)(x) = max_{0<=n<=N} 2^n |∫_{I_n(x)} f dμ|`.
pub fn maximal_function(f: &GridFunction) -> GridFunction {
    let res = f.resolution();
    let mut best: Vec<f64> = f.values().iter().map(|v| v.abs()).collect();
    let mut level = f.values().to_vec();
    for depth in (0..res).rev() {
        // Average sibling cells to move one level up.
        level = level.chunks_exact(2).map(|p| 0.5 * (p[0] + p[1])).collect();
        let shift = res - depth;
        for (c, b) in best.iter_mut().enumerate() {
            *b = b.max(level[c >> shift].abs());
        }
    }
    GridFunction::from_fn(res, |c| best[c])
}

/// `‖M(f)‖_p`: the Hardy norm of the martingale `(S_{2^n} f)_{n<=N}`.
pub fn hardy_norm(f: &GridFunction, p: f64) -> Result<f64> {
    lp_norm(&maximal_function(f), p)
}

/// Outcome of [`is_p_atom`].
#[derive(Clone, Debug, PartialEq)]
pub struct AtomCheck {
    pub passed: bool,
    /// The deepest dyadic interval containing the support, when it qualifies.
    pub witness: Option<Cell>,
    pub sup: f64,
    pub integral: f64,
    /// `μ(I)^{-1/p}` for the tightest candidate interval.
    pub bound: f64,
    /// Whether the sup comparison ran in exact integer arithmetic.
    pub exact: bool,
    /// `‖a‖_∞ = μ(I)^{-1/p}` (exactly, when `exact`).
    pub sup_attains_bound: bool,
}

/// Absolute tolerance on `∫_I a dμ`.
pub const ATOM_INTEGRAL_TOLERANCE: f64 = 1e-12;

const ATOM_RELATIVE_TOLERANCE: f64 = 1e-12;

/// Decides whether `a` is a `p`-atom: supported in a dyadic interval `I`,
/// mean zero on `I`, and `‖a‖_∞ <= μ(I)^{-1/p}`.
pub fn is_p_atom(a: &GridFunction, p: Exponent) -> AtomCheck {
    let res = a.resolution();
    let values = a.values();
    let sup = a.sup_abs();
    let integral = a.integral();
    let mean_zero = integral.abs() <= ATOM_INTEGRAL_TOLERANCE;

    let first = values.iter().position(|&v| v != 0.0);
    let Some(first) = first else {
        return AtomCheck {
            passed: true,
            witness: Some(Cell::whole()),
            sup: 0.0,
            integral,
            bound: 1.0,
            exact: true,
            sup_attains_bound: false,
        };
    };
    let last = values.iter().rposition(|&v| v != 0.0).unwrap_or(first);
    // Depth of the longest common prefix of the extreme support cells.
    let diff = (first ^ last) as u64;
    let depth = if diff == 0 {
        res
    } else {
        res - (64 - diff.leading_zeros())
    };

    let integer_valued = values
        .iter()
        .all(|v| v.fract() == 0.0 && v.abs() < 9.007_199_254_740_992e15);
    let mut tightest = None;
    for d in (0..=depth).rev() {
        let cell = cell_of(
            DyadicPoint::from_cell(first, res).expect("support cell in range"),
            d,
        )
        .expect("depth within resolution");
        let bound = (d as f64 / p.value()).exp2();
        let (fits, equal, exact) = if integer_valued {
            let (fits, equal) = compare_exact(sup as u64, d, p);
            (fits, equal, true)
        } else {
            let fits = sup <= bound * (1.0 + ATOM_RELATIVE_TOLERANCE);
            let equal = (sup - bound).abs() <= bound * ATOM_RELATIVE_TOLERANCE;
            (fits, equal, false)
        };
        if tightest.is_none() {
            tightest = Some((bound, exact, equal));
        }
        if fits && mean_zero {
            return AtomCheck {
                passed: true,
                witness: Some(cell),
                sup,
                integral,
                bound,
                exact,
                sup_attains_bound: equal,
            };
        }
    }
    let (bound, exact, equal) = tightest.expect("at least depth 0 is tried");
    AtomCheck {
        passed: false,
        witness: None,
        sup,
        integral,
        bound,
        exact,
        sup_attains_bound: equal,
    }
}

/// Compares `sup` with `2^{depth/p}` via `sup^a` vs `2^{depth b}`, `p = a/b`.
fn compare_exact(sup: u64, depth: u32, p: Exponent) -> (bool, bool) {
    let lhs = BigUint::from(sup).pow(p.numer());
    let rhs = BigUint::one() << (depth as u64 * p.denom() as u64);
    if lhs.is_zero() {
        return (true, false);
    }
    (lhs <= rhs, lhs == rhs)
}

/// `2^n ∫_{I_n(x)} f dμ - f(x)`.
pub fn lebesgue_residual(f: &GridFunction, x: DyadicPoint, n: u32) -> Result<f64> {
    let cell = cell_of(x, n)?;
    let fx = f.at(x)?;
    let r = cell.cell_range(f.resolution())?;
    let len = r.len() as f64;
    let avg = f.values()[r].iter().sum::<f64>() / len;
    Ok(avg - fx)
}
