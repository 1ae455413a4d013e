//! Monte Carlo estimates with standard errors, plus the deterministic
//! parallel driver every sampler in the crate uses.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::sampling::SeedSpec;

pub const Z95: f64 = 1.959_963_984_540_054;
pub const Z99: f64 = 2.575_829_303_548_901;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub std_error: f64,
    pub ci95: [f64; 2],
    pub samples: u64,
    pub seed: SeedSpec,
}

impl Estimate {
    pub fn new(value: f64, std_error: f64, samples: u64, seed: SeedSpec) -> Self {
        Estimate {
            value,
            std_error,
            ci95: [value - Z95 * std_error, value + Z95 * std_error],
            samples,
            seed,
        }
    }

    pub fn interval(&self, z: f64) -> (f64, f64) {
        (self.value - z * self.std_error, self.value + z * self.std_error)
    }

    pub fn lower99(&self) -> f64 {
        self.interval(Z99).0
    }

    pub fn upper99(&self) -> f64 {
        self.interval(Z99).1
    }

    /// `|value - target| <= k * std_error`.
    pub fn within_se(&self, target: f64, k: f64) -> bool {
        (self.value - target).abs() <= k * self.std_error
    }
}

/// Pairwise (cascade) summation; the result depends only on the slice.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 32 {
        xs.iter().sum()
    } else {
        let (a, b) = xs.split_at(xs.len() / 2);
        pairwise_sum(a) + pairwise_sum(b)
    }
}

pub fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        0.0
    } else {
        pairwise_sum(xs) / xs.len() as f64
    }
}

fn centered_products(xs: &[f64], mx: f64, ys: &[f64], my: f64) -> f64 {
    let prods: Vec<f64> = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).collect();
    pairwise_sum(&prods)
}

/// Sample mean with the usual `s / sqrt(n)` standard error.
pub fn mean_estimate(xs: &[f64], seed: SeedSpec) -> Estimate {
    let n = xs.len();
    let m = mean(xs);
    let se = if n > 1 {
        (centered_products(xs, m, xs, m) / (n - 1) as f64 / n as f64).sqrt()
    } else {
        0.0
    };
    Estimate::new(m, se, n as u64, seed)
}

/// Ratio of means `mean(num) / mean(den)` with a delta-method standard error.
/// `None` when the denominator has no mass.
pub fn ratio_estimate(num: &[f64], den: &[f64], seed: SeedSpec) -> Option<Estimate> {
    assert_eq!(num.len(), den.len());
    let n = num.len();
    let (my, mx) = (mean(num), mean(den));
    if mx <= 0.0 || n < 2 {
        return None;
    }
    let r = my / mx;
    let nf = (n - 1) as f64;
    let syy = centered_products(num, my, num, my) / nf;
    let sxx = centered_products(den, mx, den, mx) / nf;
    let sxy = centered_products(num, my, den, mx) / nf;
    let var = (syy - 2.0 * r * sxy + r * r * sxx).max(0.0) / (n as f64 * mx * mx);
    Some(Estimate::new(r, var.sqrt(), n as u64, seed))
}

/// Runs `f` on sample indices `0..n` across the current rayon pool and
/// returns results in index order, so any downstream reduction is
/// independent of the worker count.
pub fn run_samples<T, F>(n: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    (0..n).into_par_iter().map(f).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mean_and_se_of_known_data() {
        let xs = [1.0, 2.0, 3.0, 4.0];
        let e = mean_estimate(&xs, SeedSpec::new(0, 0));
        assert_eq!(e.value, 2.5);
        // s^2 = 5/3, se = sqrt(5/12)
        assert!((e.std_error - (5.0f64 / 12.0).sqrt()).abs() < 1e-12);
        assert!(e.ci95[0] < 2.5 && e.ci95[1] > 2.5);
    }

    #[test]
    fn ratio_of_proportional_data_has_zero_se() {
        let den = [1.0, 0.0, 1.0, 1.0, 0.0];
        let num: Vec<f64> = den.iter().map(|x| 3.0 * x).collect();
        let r = ratio_estimate(&num, &den, SeedSpec::new(0, 0)).unwrap();
        assert!((r.value - 3.0).abs() < 1e-12);
        assert!(r.std_error < 1e-12);
        assert!(ratio_estimate(&[1.0, 2.0], &[0.0, 0.0], SeedSpec::new(0, 0)).is_none());
    }

    #[test]
    fn pairwise_sum_matches_naive_on_integers() {
        let xs: Vec<f64> = (0..1000).map(f64::from).collect();
        assert_eq!(pairwise_sum(&xs), 499_500.0);
    }

    #[test]
    fn run_samples_preserves_order_across_pools() {
        let f = |i: u64| (i * 7919) % 101;
        let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let many = rayon::ThreadPoolBuilder::new().num_threads(6).build().unwrap();
        let a = one.install(|| run_samples(5000, f));
        let b = many.install(|| run_samples(5000, f));
        assert_eq!(a, b);
    }
}
