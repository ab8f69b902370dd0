//! Small statistics helpers for the simulation reports.

/// Wilson score interval for a binomial proportion.
pub fn wilson_interval(successes: u64, trials: u64, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((center - half).max(0.0), (center + half).min(1.0))
}

/// Normal-approximation confidence interval for a sample mean, from the sum
/// and the sum of squares.
pub fn mean_interval(sum: f64, sq_sum: f64, count: u64, z: f64) -> (f64, f64, f64) {
    if count == 0 {
        return (0.0, 0.0, 0.0);
    }
    let n = count as f64;
    let mean = sum / n;
    let var = (sq_sum / n - mean * mean).max(0.0) * n / (n - 1.0).max(1.0);
    let half = z * (var / n).sqrt();
    (mean, mean - half, mean + half)
}

/// Two-proportion z statistic for H0: p1 = p2 (pooled variance). Positive
/// when the first proportion is larger.
pub fn two_proportion_z(e1: u64, n1: u64, e2: u64, n2: u64) -> f64 {
    if n1 == 0 || n2 == 0 {
        return 0.0;
    }
    let p1 = e1 as f64 / n1 as f64;
    let p2 = e2 as f64 / n2 as f64;
    let pool = (e1 + e2) as f64 / (n1 + n2) as f64;
    let se = (pool * (1.0 - pool) * (1.0 / n1 as f64 + 1.0 / n2 as f64)).sqrt();
    if se == 0.0 {
        return 0.0;
    }
    (p1 - p2) / se
}

pub const Z_95: f64 = 1.959_963_984_540_054;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wilson_basics() {
        let (lo, hi) = wilson_interval(0, 100, Z_95);
        assert_eq!(lo, 0.0);
        assert!(hi > 0.0 && hi < 0.05);

        let (lo, hi) = wilson_interval(50, 100, Z_95);
        assert!(lo < 0.5 && 0.5 < hi);
        assert!(hi - lo < 0.21);

        // interval shrinks roughly like 1/sqrt(n)
        let (lo1, hi1) = wilson_interval(100, 1_000, Z_95);
        let (lo2, hi2) = wilson_interval(10_000, 100_000, Z_95);
        let ratio = (hi1 - lo1) / (hi2 - lo2);
        assert!((ratio - 10.0).abs() < 0.5, "ratio {ratio}");
    }

    #[test]
    fn mean_interval_basics() {
        // constant sample: zero-width interval
        let (mean, lo, hi) = mean_interval(500.0, 2500.0, 100, Z_95);
        assert_eq!(mean, 5.0);
        assert!((hi - lo).abs() < 1e-9);

        // alternating 0/10: mean 5, positive width
        let (mean, lo, hi) = mean_interval(500.0, 5000.0, 100, Z_95);
        assert_eq!(mean, 5.0);
        assert!(lo < 5.0 && 5.0 < hi);
    }

    #[test]
    fn two_proportion_direction() {
        let z = two_proportion_z(200, 1000, 100, 1000);
        assert!(z > 1.96, "clear difference should be significant, z = {z}");
        let z = two_proportion_z(100, 1000, 100, 1000);
        assert_eq!(z, 0.0);
        let z = two_proportion_z(100, 1000, 200, 1000);
        assert!(z < -1.96);
    }
}
