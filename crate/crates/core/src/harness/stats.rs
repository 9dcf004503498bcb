//! Binomial confidence intervals.

/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.959_963_984_540_054;

/// Below this many events the Wilson interval is used instead of the
/// normal approximation.
pub const WILSON_BELOW: u64 = 30;

pub fn standard_error(p: f64, n: f64) -> f64 {
    (p * (1.0 - p) / n).sqrt()
}

/// 95% interval for `errors` events in `trials` Bernoulli trials.
pub fn binomial_interval(errors: u64, trials: u64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = errors as f64 / n;
    if errors < WILSON_BELOW || trials - errors < WILSON_BELOW {
        let z2 = Z95 * Z95;
        let denom = 1.0 + z2 / n;
        let centre = (p + z2 / (2.0 * n)) / denom;
        let half = Z95 * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
        let lo = if errors == 0 {
            0.0
        } else {
            (centre - half).max(0.0)
        };
        let hi = if errors == trials {
            1.0
        } else {
            (centre + half).min(1.0)
        };
        (lo, hi)
    } else {
        let half = Z95 * standard_error(p, n);
        ((p - half).max(0.0), (p + half).min(1.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normal_interval() {
        let (lo, hi) = binomial_interval(500, 10_000);
        let half = Z95 * (0.05f64 * 0.95 / 10_000.0).sqrt();
        assert!((lo - (0.05 - half)).abs() < 1e-15);
        assert!((hi - (0.05 + half)).abs() < 1e-15);
    }

    #[test]
    fn wilson_for_rare_events() {
        let (lo, hi) = binomial_interval(0, 1000);
        assert_eq!(lo, 0.0);
        // Wilson upper bound for 0/1000 at 95%
        assert!((hi - 0.003_826_758_485_555).abs() < 1e-12, "{hi}");
        let (lo, hi) = binomial_interval(3, 1000);
        assert!(lo > 0.0 && lo < 0.003 && hi > 0.003);
    }
}
