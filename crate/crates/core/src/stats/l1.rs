use serde::{Deserialize, Serialize};

use crate::Scalar;

use super::StatsError;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct L1FitResult<T> {
    pub slope: T,
    /// Zero for through-origin fits.
    pub intercept: T,
    /// Sum of absolute residuals at the returned line.
    pub objective: T,
}

pub fn l1_objective<T: Scalar>(x: &[T], y: &[T], slope: T, intercept: T) -> T {
    x.iter().zip(y).map(|(&a, &b)| (b - (slope * a + intercept)).abs()).sum()
}

fn better<T: Scalar>(candidate: &L1FitResult<T>, best: &Option<L1FitResult<T>>) -> bool {
    let Some(best) = best else { return true };
    let tol = T::lit(1e-12) * T::one().max(best.objective.abs());
    if candidate.objective < best.objective - tol {
        return true;
    }
    if (candidate.objective - best.objective).abs() <= tol {
        return (candidate.slope, candidate.intercept) < (best.slope, best.intercept);
    }
    false
}

/// Least-absolute-deviations line fit.
///
/// The objective is piecewise linear and convex, so a minimizer lies on a
/// breakpoint: through the origin the candidates are the ratios `y_i / x_i`,
/// otherwise the lines through every pair of points with distinct `x`. All
/// candidates are evaluated; ties go to the smaller slope (then intercept).
pub fn l1_slope<T: Scalar>(x: &[T], y: &[T], through_origin: bool) -> Result<L1FitResult<T>, StatsError> {
    if x.len() != y.len() {
        return Err(StatsError::LengthMismatch(x.len(), y.len()));
    }
    if x.len() < 2 {
        return Err(StatsError::TooFewSamples { needed: 2, got: x.len() });
    }
    if x.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(StatsError::NonFinite);
    }
    let mut best: Option<L1FitResult<T>> = None;
    if through_origin {
        for (&a, &b) in x.iter().zip(y) {
            if a == T::zero() {
                continue;
            }
            let slope = b / a;
            let cand = L1FitResult { slope, intercept: T::zero(), objective: l1_objective(x, y, slope, T::zero()) };
            if better(&cand, &best) {
                best = Some(cand);
            }
        }
        best.ok_or_else(|| StatsError::DegenerateInput("every x is zero".into()))
    } else {
        for i in 0..x.len() {
            for j in (i + 1)..x.len() {
                if x[i] == x[j] {
                    continue;
                }
                let slope = (y[j] - y[i]) / (x[j] - x[i]);
                let intercept = y[i] - slope * x[i];
                let cand = L1FitResult { slope, intercept, objective: l1_objective(x, y, slope, intercept) };
                if better(&cand, &best) {
                    best = Some(cand);
                }
            }
        }
        best.ok_or_else(|| StatsError::DegenerateInput("all x values are equal".into()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_line() {
        let x: Vec<f64> = (1..=10).map(|i| i as f64 / 10.0).collect();
        let y: Vec<f64> = x.iter().map(|v| 0.8 * v).collect();
        let fit = l1_slope(&x, &y, true).unwrap();
        assert!((fit.slope - 0.8).abs() < 1e-15);
        assert!(fit.objective < 1e-12);
    }

    #[test]
    fn two_points_pick_the_lower_objective() {
        // |1 - s| + |4 - 2s| is 2 at s = 1 and 1 at s = 2
        let fit = l1_slope(&[1.0, 2.0], &[1.0, 4.0], true).unwrap();
        assert_eq!(fit.slope, 2.0);
        assert_eq!(fit.objective, 1.0);
    }

    #[test]
    fn ties_break_to_smaller_slope() {
        // |1 - s| + |3 - s| equals 2 on the whole interval [1, 3]
        let fit = l1_slope(&[1.0, 1.0], &[1.0, 3.0], true).unwrap();
        assert_eq!(fit.slope, 1.0);
        assert_eq!(fit.objective, 2.0);
    }

    #[test]
    fn with_intercept() {
        let x = [0.0, 1.0, 2.0, 3.0, 4.0];
        let y = [1.0, 3.0, 5.0, 100.0, 9.0];
        let fit = l1_slope(&x, &y, false).unwrap();
        assert_eq!((fit.slope, fit.intercept), (2.0, 1.0));
    }

    #[test]
    fn degenerate() {
        assert!(matches!(l1_slope(&[0.0, 0.0], &[1.0, 2.0], true), Err(StatsError::DegenerateInput(_))));
        assert!(matches!(l1_slope(&[2.0, 2.0], &[1.0, 2.0], false), Err(StatsError::DegenerateInput(_))));
        assert!(matches!(l1_slope(&[1.0], &[1.0], true), Err(StatsError::TooFewSamples { .. })));
    }
}
