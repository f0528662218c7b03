use crate::Scalar;

use super::StatsError;

/// Mean accuracy over runs and its standard error: the sample standard
/// deviation of per-run accuracies divided by `sqrt(runs)`. A single run has
/// zero standard error.
pub fn accuracy_with_stderr<T: Scalar>(correct_per_run: &[u64], n: u64) -> Result<(T, T), StatsError> {
    if correct_per_run.is_empty() {
        return Err(StatsError::InvalidCounts("at least one run required".into()));
    }
    if n == 0 {
        return Err(StatsError::InvalidCounts("n must be >= 1".into()));
    }
    if let Some(c) = correct_per_run.iter().find(|&&c| c > n) {
        return Err(StatsError::InvalidCounts(format!("{c} correct out of {n}")));
    }
    let total = T::lit(n as f64);
    let accs: Vec<T> = correct_per_run.iter().map(|&c| T::lit(c as f64) / total).collect();
    let runs = T::from_usize_lossy(accs.len());
    let mean = accs.iter().copied().sum::<T>() / runs;
    if accs.len() == 1 {
        return Ok((mean, T::zero()));
    }
    let var = accs.iter().map(|&a| (a - mean) * (a - mean)).sum::<T>() / (runs - T::one());
    Ok((mean, var.sqrt() / runs.sqrt()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        assert_eq!(accuracy_with_stderr::<f64>(&[50, 50, 50], 100).unwrap(), (0.5, 0.0));
        assert_eq!(accuracy_with_stderr::<f64>(&[70], 100).unwrap(), (0.7, 0.0));
        // per-run 0.4/0.5/0.6: sample sd 0.1, divided by sqrt(3)
        let (m, se) = accuracy_with_stderr::<f64>(&[40, 50, 60], 100).unwrap();
        assert!((m - 0.5).abs() < 1e-15);
        assert!((se - 0.05773502691896258).abs() < 1e-15);
    }

    #[test]
    fn invalid() {
        assert!(accuracy_with_stderr::<f64>(&[], 10).is_err());
        assert!(accuracy_with_stderr::<f64>(&[11], 10).is_err());
    }
}
