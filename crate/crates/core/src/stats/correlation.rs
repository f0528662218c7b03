use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::Scalar;

use super::rank::fractional_ranks;
use super::StatsError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CorrelationKind {
    Spearman,
    Pearson,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorrelationResult<T> {
    pub rho: T,
    /// Two-sided p-value of the t-approximation against zero correlation.
    pub p_value: T,
    pub n: usize,
    pub kind: CorrelationKind,
}

fn check_inputs<T: Scalar>(x: &[T], y: &[T]) -> Result<(), StatsError> {
    if x.len() != y.len() {
        return Err(StatsError::LengthMismatch(x.len(), y.len()));
    }
    if x.len() < 2 {
        return Err(StatsError::TooFewSamples { needed: 2, got: x.len() });
    }
    if x.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(StatsError::NonFinite);
    }
    Ok(())
}

fn product_moment<T: Scalar>(x: &[T], y: &[T]) -> Result<T, StatsError> {
    let n = T::from_usize_lossy(x.len());
    let mx = x.iter().copied().sum::<T>() / n;
    let my = y.iter().copied().sum::<T>() / n;
    let (mut sxy, mut sxx, mut syy) = (T::zero(), T::zero(), T::zero());
    for (&a, &b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == T::zero() || syy == T::zero() {
        return Err(StatsError::ConstantInput);
    }
    // A single sqrt keeps identical inputs at exactly 1.
    let r = sxy / (sxx * syy).sqrt();
    Ok(r.max(-T::one()).min(T::one()))
}

/// Two-sided p-value for correlation `r` over `n` samples using
/// `t = r * sqrt((n - 2) / (1 - r^2))` against Student-t with `n - 2` degrees
/// of freedom.
fn t_test_p<T: Scalar>(r: T, n: usize) -> T {
    if n <= 2 {
        return T::one();
    }
    let r = r.as_f64();
    let df = (n - 2) as f64;
    if r.abs() >= 1.0 {
        return T::zero();
    }
    let t = r * (df / (1.0 - r * r)).sqrt();
    let dist = StudentsT::new(0.0, 1.0, df).expect("positive degrees of freedom");
    let p = 2.0 * dist.cdf(-t.abs());
    T::lit(p.clamp(0.0, 1.0))
}

pub fn pearson<T: Scalar>(x: &[T], y: &[T]) -> Result<CorrelationResult<T>, StatsError> {
    check_inputs(x, y)?;
    let rho = product_moment(x, y)?;
    Ok(CorrelationResult { rho, p_value: t_test_p(rho, x.len()), n: x.len(), kind: CorrelationKind::Pearson })
}

/// Spearman's rho: Pearson correlation of fractional (tie-averaged) ranks.
pub fn spearman<T: Scalar>(x: &[T], y: &[T]) -> Result<CorrelationResult<T>, StatsError> {
    check_inputs(x, y)?;
    let rx = fractional_ranks(x)?;
    let ry = fractional_ranks(y)?;
    let rho = product_moment(&rx, &ry)?;
    Ok(CorrelationResult { rho, p_value: t_test_p(rho, x.len()), n: x.len(), kind: CorrelationKind::Spearman })
}
