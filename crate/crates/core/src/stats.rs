//! Small estimators used by the experiment drivers.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{ContinuousCDF, Normal};

pub fn mean(xs: &[f64]) -> Option<f64> {
    (!xs.is_empty()).then(|| xs.iter().sum::<f64>() / xs.len() as f64)
}

/// Unbiased sample variance; needs two points.
pub fn variance(xs: &[f64]) -> Option<f64> {
    if xs.len() < 2 {
        return None;
    }
    let m = mean(xs)?;
    Some(xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() - 1) as f64)
}

/// Standard error of the mean.
pub fn std_error(xs: &[f64]) -> Option<f64> {
    Some((variance(xs)? / xs.len() as f64).sqrt())
}

pub fn binomial_se(p_hat: f64, n: usize) -> f64 {
    if n == 0 {
        return f64::NAN;
    }
    (p_hat * (1.0 - p_hat) / n as f64).max(0.0).sqrt()
}

/// Sample autocorrelation at `lag`, normalized by the lag-0 sum of squares.
pub fn autocorrelation(xs: &[f64], lag: usize) -> Option<f64> {
    if xs.len() <= lag + 1 {
        return None;
    }
    let m = mean(xs)?;
    let denom: f64 = xs.iter().map(|x| (x - m).powi(2)).sum();
    if denom == 0.0 {
        return None;
    }
    let num: f64 = xs.windows(lag + 1).map(|w| (w[0] - m) * (w[lag] - m)).sum();
    Some(num / denom)
}

pub fn median(xs: &[f64]) -> Option<f64> {
    quantile(xs, 0.5)
}

/// Linear-interpolated quantile.
pub fn quantile(xs: &[f64], q: f64) -> Option<f64> {
    if xs.is_empty() {
        return None;
    }
    let mut s = xs.to_vec();
    s.sort_by(f64::total_cmp);
    let pos = q.clamp(0.0, 1.0) * (s.len() - 1) as f64;
    let (lo, hi) = (pos.floor() as usize, pos.ceil() as usize);
    Some(s[lo] + (s[hi] - s[lo]) * (pos - lo as f64))
}

/// `(x - mean) / sd` with the sample standard deviation; `None` when the
/// sample is degenerate.
pub fn standardize(xs: &[f64]) -> Option<Vec<f64>> {
    let m = mean(xs)?;
    let sd = variance(xs)?.sqrt();
    (sd > 0.0).then(|| xs.iter().map(|x| (x - m) / sd).collect())
}

/// Kolmogorov-Smirnov distance between the empirical law of `xs` and the
/// standard normal.
pub fn ks_normal(xs: &[f64]) -> Option<f64> {
    if xs.is_empty() {
        return None;
    }
    let normal = Normal::standard();
    let mut s = xs.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len() as f64;
    let mut d: f64 = 0.0;
    let mut i = 0;
    while i < s.len() {
        // ties: the empirical cdf jumps once per distinct value
        let mut j = i;
        while j + 1 < s.len() && s[j + 1] == s[i] {
            j += 1;
        }
        let f = normal.cdf(s[i]);
        d = d.max(f - i as f64 / n).max((j + 1) as f64 / n - f);
        i = j + 1;
    }
    Some(d)
}

/// Asymptotic one-sample critical value of the KS statistic.
pub fn ks_critical(n: usize, alpha: f64) -> f64 {
    (-(alpha / 2.0).ln() / 2.0).sqrt() / (n as f64).sqrt()
}

/// Bootstrap standard error of `stat` over `n` resampled units.
pub fn bootstrap_se(
    n: usize,
    reps: usize,
    seed: u64,
    stat: impl Fn(&[usize]) -> f64,
) -> Option<f64> {
    if n == 0 || reps < 2 {
        return None;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut idx = vec![0usize; n];
    let draws: Vec<f64> = (0..reps)
        .map(|_| {
            idx.iter_mut().for_each(|i| *i = rng.random_range(0..n));
            stat(&idx)
        })
        .filter(|x| x.is_finite())
        .collect();
    Some(variance(&draws)?.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    /// Box-Muller.
    fn normal_draws(n: usize, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n)
            .map(|_| {
                let u1: f64 = 1.0 - rng.random::<f64>();
                let u2: f64 = rng.random();
                (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
            })
            .collect()
    }

    #[test]
    fn moments() {
        let xs = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(mean(&xs), Some(2.5));
        assert!((variance(&xs).unwrap() - 5.0 / 3.0).abs() < 1e-12);
        assert_eq!(median(&xs), Some(2.5));
        assert_eq!(quantile(&xs, 0.0), Some(1.0));
        assert!((binomial_se(0.5, 100) - 0.05).abs() < 1e-12);
        assert_eq!(mean(&[]), None);
        assert_eq!(standardize(&[3.0, 3.0]), None);
    }

    #[test]
    fn autocorrelation_of_alternating_and_constant() {
        let alt: Vec<f64> = (0..100)
            .map(|i| if i % 2 == 0 { 1.0 } else { -1.0 })
            .collect();
        assert!((autocorrelation(&alt, 1).unwrap() + 0.99).abs() < 1e-9);
        assert_eq!(autocorrelation(&[2.0; 10], 1), None);
    }

    #[test]
    fn ks_exact_small_cases() {
        // one point at 0: sup is 1/2 on either side
        assert!((ks_normal(&[0.0]).unwrap() - 0.5).abs() < 1e-12);
        // ties count as one jump
        assert!((ks_normal(&[0.0, 0.0]).unwrap() - 0.5).abs() < 1e-12);
        let far = ks_normal(&[10.0, 11.0]).unwrap();
        assert!((far - 1.0).abs() < 1e-9);
    }

    #[test]
    fn ks_is_calibrated_on_normal_draws() {
        let n = 1000;
        let crit = ks_critical(n, 0.01);
        let trials = 1000;
        let passed = (0..trials)
            .filter(|&k| ks_normal(&normal_draws(n, k)).unwrap() < crit)
            .count();
        assert!(passed as f64 >= 0.985 * trials as f64, "{passed}/{trials}");
    }

    #[test]
    fn bootstrap_matches_closed_form() {
        let xs = normal_draws(400, 9);
        let se = bootstrap_se(xs.len(), 400, 1, |idx| {
            idx.iter().map(|&i| xs[i]).sum::<f64>() / idx.len() as f64
        })
        .unwrap();
        let exact = std_error(&xs).unwrap();
        assert!((se / exact - 1.0).abs() < 0.15, "{se} vs {exact}");
        let again = bootstrap_se(xs.len(), 400, 1, |idx| {
            idx.iter().map(|&i| xs[i]).sum::<f64>() / idx.len() as f64
        })
        .unwrap();
        assert_eq!(se, again);
    }
}
