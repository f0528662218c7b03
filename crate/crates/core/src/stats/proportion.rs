use statrs::function::erf::erfc;

use super::StatsError;

/// Two-sided tail probability of a standard normal statistic.
pub fn normal_two_sided_p(z: f64) -> f64 {
    erfc(z.abs() / std::f64::consts::SQRT_2).clamp(0.0, 1.0)
}

/// Pooled two-proportion z-test for equality of two success rates.
///
/// When both groups are all-success or all-failure the pooled variance is
/// zero and the proportions are identical, so the p-value is 1.
pub fn two_proportion_test(successes_a: u64, n_a: u64, successes_b: u64, n_b: u64) -> Result<f64, StatsError> {
    if n_a == 0 || n_b == 0 {
        return Err(StatsError::InvalidCounts("group sizes must be >= 1".into()));
    }
    if successes_a > n_a || successes_b > n_b {
        return Err(StatsError::InvalidCounts("successes exceed group size".into()));
    }
    let (na, nb) = (n_a as f64, n_b as f64);
    let pa = successes_a as f64 / na;
    let pb = successes_b as f64 / nb;
    let pooled = (successes_a + successes_b) as f64 / (na + nb);
    let variance = pooled * (1.0 - pooled) * (1.0 / na + 1.0 / nb);
    if variance <= 0.0 {
        return Ok(1.0);
    }
    Ok(normal_two_sided_p((pa - pb) / variance.sqrt()))
}
