//! Empirical distributions, the two-sample Kolmogorov-Smirnov test and
//! Monte-Carlo bookkeeping.

/// A labelled sample of real numbers, kept sorted.
#[derive(Debug, Clone)]
pub struct EmpiricalLaw {
    label: String,
    samples: Vec<f64>,
}

impl EmpiricalLaw {
    /// Builds an empirical law; non-finite samples are allowed (`+∞` encodes
    /// censored observations) but NaN is not.
    pub fn new(label: impl Into<String>, mut samples: Vec<f64>) -> Self {
        assert!(samples.iter().all(|x| !x.is_nan()), "NaN sample");
        samples.sort_by(|a, b| a.partial_cmp(b).unwrap());
        EmpiricalLaw { label: label.into(), samples }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    /// Empirical CDF `P(X ≤ x)`.
    pub fn cdf(&self, x: f64) -> f64 {
        let k = self.samples.partition_point(|&s| s <= x);
        k as f64 / self.samples.len() as f64
    }

    pub fn mean(&self) -> f64 {
        self.samples.iter().sum::<f64>() / self.samples.len() as f64
    }
}

/// Result of a two-sample Kolmogorov-Smirnov comparison.
#[derive(Debug, Clone, Copy)]
pub struct KsResult {
    /// `sup_x |F_n(x) − G_m(x)|`.
    pub statistic: f64,
    pub n: usize,
    pub m: usize,
}

impl KsResult {
    /// Rejection threshold at level `alpha`:
    /// `c(α) √((n + m)/(n m))` with `c(α) = √(−ln(α/2)/2)`.
    pub fn threshold(&self, alpha: f64) -> f64 {
        let c = (-(alpha / 2.0).ln() / 2.0).sqrt();
        c * ((self.n + self.m) as f64 / (self.n as f64 * self.m as f64)).sqrt()
    }

    /// True when the samples are consistent with a common law at level `alpha`.
    pub fn passes(&self, alpha: f64) -> bool {
        self.statistic <= self.threshold(alpha)
    }
}

/// Two-sample Kolmogorov-Smirnov statistic by a single merge pass.
pub fn ks_two_sample(a: &EmpiricalLaw, b: &EmpiricalLaw) -> KsResult {
    let (xs, ys) = (a.samples(), b.samples());
    assert!(!xs.is_empty() && !ys.is_empty(), "KS needs nonempty samples");
    let (n, m) = (xs.len(), ys.len());
    let (mut i, mut j) = (0usize, 0usize);
    let mut stat = 0.0_f64;
    while i < n && j < m {
        let t = xs[i].min(ys[j]);
        while i < n && xs[i] <= t {
            i += 1;
        }
        while j < m && ys[j] <= t {
            j += 1;
        }
        stat = stat.max((i as f64 / n as f64 - j as f64 / m as f64).abs());
    }
    KsResult { statistic: stat, n, m }
}

/// A Monte-Carlo estimate with its standard error and provenance.
#[derive(Debug, Clone, Copy)]
pub struct MCEstimate {
    pub value: f64,
    pub std_error: f64,
    pub n_samples: usize,
    pub seed: u64,
}

impl MCEstimate {
    /// Half-width of the `k`-sigma interval.
    pub fn margin(&self, k: f64) -> f64 {
        k * self.std_error
    }

    /// True when `target` lies within `k` standard errors plus `bias`.
    pub fn consistent_with(&self, target: f64, k: f64, bias: f64) -> bool {
        (self.value - target).abs() <= self.margin(k) + bias
    }
}

/// Streaming first/second-moment accumulator with an associative merge, so
/// per-worker partial sums combine to a deterministic total.
#[derive(Debug, Clone, Copy, Default)]
pub struct Accumulator {
    pub count: u64,
    pub sum: f64,
    pub sumsq: f64,
}

impl Accumulator {
    pub fn push(&mut self, x: f64) {
        self.count += 1;
        self.sum += x;
        self.sumsq += x * x;
    }

    pub fn merge(mut self, other: Accumulator) -> Accumulator {
        self.count += other.count;
        self.sum += other.sum;
        self.sumsq += other.sumsq;
        self
    }

    pub fn mean(&self) -> f64 {
        self.sum / self.count as f64
    }

    /// Unbiased sample variance.
    pub fn variance(&self) -> f64 {
        let n = self.count as f64;
        ((self.sumsq - self.sum * self.sum / n) / (n - 1.0)).max(0.0)
    }

    pub fn std_error(&self) -> f64 {
        (self.variance() / self.count as f64).sqrt()
    }

    pub fn estimate(&self, seed: u64) -> MCEstimate {
        MCEstimate {
            value: self.mean(),
            std_error: self.std_error(),
            n_samples: self.count as usize,
            seed,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cdf_basics() {
        let law = EmpiricalLaw::new("x", vec![3.0, 1.0, 2.0, 2.0]);
        assert_eq!(law.samples(), &[1.0, 2.0, 2.0, 3.0]);
        assert_eq!(law.cdf(0.5), 0.0);
        assert_eq!(law.cdf(2.0), 0.75);
        assert_eq!(law.cdf(10.0), 1.0);
        assert_eq!(law.mean(), 2.0);
    }

    #[test]
    fn ks_identical_samples() {
        let a = EmpiricalLaw::new("a", vec![1.0, 2.0, 3.0]);
        let r = ks_two_sample(&a, &a);
        assert_eq!(r.statistic, 0.0);
        assert!(r.passes(0.01));
    }

    #[test]
    fn ks_disjoint_samples() {
        let a = EmpiricalLaw::new("a", (0..50).map(|i| i as f64).collect());
        let b = EmpiricalLaw::new("b", (0..50).map(|i| 100.0 + i as f64).collect());
        let r = ks_two_sample(&a, &b);
        assert_eq!(r.statistic, 1.0);
        assert!(!r.passes(0.01));
    }

    #[test]
    fn ks_handles_ties_across_samples() {
        let a = EmpiricalLaw::new("a", vec![1.0, 2.0]);
        let b = EmpiricalLaw::new("b", vec![1.0, 2.0, 2.0, 3.0]);
        let r = ks_two_sample(&a, &b);
        // F(1)=0.5 vs G(1)=0.25; F(2)=1 vs G(2)=0.75
        assert!((r.statistic - 0.25).abs() < 1e-15);
    }

    #[test]
    fn ks_threshold_value() {
        let r = KsResult { statistic: 0.0, n: 2000, m: 2000 };
        // c(0.01) ≈ 1.628
        let c = r.threshold(0.01) / (2.0_f64 / 2000.0).sqrt();
        assert!((c - 1.6276236307187293).abs() < 1e-12);
    }

    #[test]
    fn accumulator_merge_is_exact() {
        let xs = [1.0, 2.0, 3.0, 4.0, 5.0];
        let mut whole = Accumulator::default();
        for &x in &xs {
            whole.push(x);
        }
        let mut left = Accumulator::default();
        let mut right = Accumulator::default();
        for &x in &xs[..2] {
            left.push(x);
        }
        for &x in &xs[2..] {
            right.push(x);
        }
        let merged = left.merge(right);
        assert_eq!(merged.count, whole.count);
        assert_eq!(merged.sum, whole.sum);
        assert_eq!(merged.mean(), 3.0);
        assert_eq!(merged.variance(), 2.5);
    }

    #[test]
    fn estimate_consistency_check() {
        let mut acc = Accumulator::default();
        for i in 0..100 {
            acc.push(if i % 2 == 0 { 0.0 } else { 1.0 });
        }
        let est = acc.estimate(42);
        assert_eq!(est.value, 0.5);
        assert!(est.consistent_with(0.5, 3.0, 0.0));
        assert!(!est.consistent_with(0.9, 3.0, 0.0));
        assert!(est.consistent_with(0.9, 3.0, 0.4));
    }
}
