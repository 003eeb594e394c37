use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};

use super::rng::path_rng;
use super::Samples;

/// How a cumulant estimate and its standard error were obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum EstimateMethod {
    KStatistic,
    Bootstrap,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CumulantEstimate {
    pub order: usize,
    pub value: f64,
    pub std_error: f64,
    pub method: EstimateMethod,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CumulantOptions {
    pub bootstrap_resamples: usize,
    pub bootstrap_seed: u64,
}

impl Default for CumulantOptions {
    fn default() -> Self {
        CumulantOptions {
            bootstrap_resamples: 200,
            bootstrap_seed: 0x5eed,
        }
    }
}

/// Pairwise (cascade) summation.
pub fn pairwise_sum(x: &[f64]) -> f64 {
    const BLOCK: usize = 128;
    if x.len() <= BLOCK {
        return x.iter().sum();
    }
    let (l, r) = x.split_at(x.len() / 2);
    pairwise_sum(l) + pairwise_sum(r)
}

/// `Σ (x − c)^r` for `r = 0..=8`, by pairwise summation.
fn centered_power_sums(x: &[f64], c: f64) -> [f64; 9] {
    const BLOCK: usize = 128;
    if x.len() <= BLOCK {
        let mut s = [0.0; 9];
        for &v in x {
            let d = v - c;
            let mut p = 1.0;
            for e in s.iter_mut() {
                *e += p;
                p *= d;
            }
        }
        return s;
    }
    let (l, r) = x.split_at(x.len() / 2);
    let (a, b) = (centered_power_sums(l, c), centered_power_sums(r, c));
    std::array::from_fn(|i| a[i] + b[i])
}

/// Plug-in cumulants κ₁…κ₈ from sample central moments.
fn plug_in_cumulants(x: &[f64]) -> [f64; 9] {
    let n = x.len() as f64;
    let mean = pairwise_sum(x) / n;
    let s = centered_power_sums(x, mean);
    let m: [f64; 9] = std::array::from_fn(|r| s[r] / n);
    let (m2, m3, m4, m5, m6, m8) = (m[2], m[3], m[4], m[5], m[6], m[8]);
    let mut k = [0.0; 9];
    k[1] = mean + m[1];
    k[2] = m2;
    k[3] = m3;
    k[4] = m4 - 3.0 * m2 * m2;
    k[5] = m5 - 10.0 * m3 * m2;
    k[6] = m6 - 15.0 * m4 * m2 - 10.0 * m3 * m3 + 30.0 * m2.powi(3);
    k[7] = m[7] - 21.0 * m5 * m2 - 35.0 * m4 * m3 + 210.0 * m3 * m2 * m2;
    k[8] = m8 - 28.0 * m6 * m2 - 56.0 * m5 * m3 - 35.0 * m4 * m4 + 420.0 * m4 * m2 * m2
        + 560.0 * m3 * m3 * m2
        - 630.0 * m2.powi(4);
    k
}

/// Unbiased k-statistics k₁…k₄ from centered power sums.
fn k_statistics(x: &[f64]) -> [f64; 5] {
    let n = x.len() as f64;
    let mean = pairwise_sum(x) / n;
    let s = centered_power_sums(x, mean);
    let (s1, s2, s3, s4) = (s[1], s[2], s[3], s[4]);
    let k1 = mean + s1 / n;
    let k2 = (n * s2 - s1 * s1) / (n * (n - 1.0));
    let k3 = (2.0 * s1.powi(3) - 3.0 * n * s1 * s2 + n * n * s3) / (n * (n - 1.0) * (n - 2.0));
    let k4 = (-6.0 * s1.powi(4) + 12.0 * n * s1 * s1 * s2 - 3.0 * n * (n - 1.0) * s2 * s2
        - 4.0 * n * (n + 1.0) * s1 * s3
        + n * n * (n + 1.0) * s4)
        / (n * (n - 1.0) * (n - 2.0) * (n - 3.0));
    [0.0, k1, k2, k3, k4]
}

/// Sampling variances of k₁…k₄ with plug-in population cumulants.
fn k_statistic_variances(k: &[f64; 9], n: f64) -> [f64; 5] {
    let (k2, k3, k4, k5, k6, k8) = (k[2], k[3], k[4], k[5], k[6], k[8]);
    let n1 = n - 1.0;
    let n2 = n - 2.0;
    let n3 = n - 3.0;
    let v1 = k2 / n;
    let v2 = k4 / n + 2.0 * k2 * k2 / n1;
    let v3 = k6 / n + 9.0 * k2 * k4 / n1 + 9.0 * k3 * k3 / n1 + 6.0 * n * k2.powi(3) / (n1 * n2);
    let v4 = k8 / n
        + 16.0 * k2 * k6 / n1
        + 48.0 * k3 * k5 / n1
        + 34.0 * k4 * k4 / n1
        + 72.0 * n * k2 * k2 * k4 / (n1 * n2)
        + 144.0 * n * k2 * k3 * k3 / (n1 * n2)
        + 24.0 * n * (n + 1.0) * k2.powi(4) / (n1 * n2 * n3);
    [0.0, v1, v2, v3, v4]
}

/// Estimates of the first `max_order` cumulants with default options.
pub fn empirical_cumulants(samples: &[f64], max_order: usize) -> Result<Vec<CumulantEstimate>> {
    empirical_cumulants_with(samples, max_order, CumulantOptions::default())
}

/// Orders ≤ 4: unbiased k-statistics with Fisher's variance formulas.
/// Orders 5 and 6: plug-in sample cumulants with bootstrap standard errors.
pub fn empirical_cumulants_with(
    samples: &[f64],
    max_order: usize,
    opts: CumulantOptions,
) -> Result<Vec<CumulantEstimate>> {
    if !(1..=6).contains(&max_order) {
        return Err(Error::InvalidArgument(format!(
            "max_order = {max_order} outside 1..=6"
        )));
    }
    let n = samples.len();
    if n <= 10 * max_order {
        return Err(Error::InsufficientSamples(format!(
            "{n} samples for order {max_order}; need more than {}",
            10 * max_order
        )));
    }
    if samples.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument("non-finite sample".into()));
    }
    if samples.iter().all(|&v| v == samples[0]) {
        return Ok((1..=max_order)
            .map(|r| CumulantEstimate {
                order: r,
                value: if r == 1 { samples[0] } else { 0.0 },
                std_error: 0.0,
                method: if r <= 4 {
                    EstimateMethod::KStatistic
                } else {
                    EstimateMethod::Bootstrap
                },
            })
            .collect());
    }
    let nf = n as f64;
    let k = k_statistics(samples);
    let pop = plug_in_cumulants(samples);
    let var = k_statistic_variances(&pop, nf);
    let mut out: Vec<CumulantEstimate> = (1..=max_order.min(4))
        .map(|r| CumulantEstimate {
            order: r,
            value: k[r],
            std_error: var[r].max(0.0).sqrt(),
            method: EstimateMethod::KStatistic,
        })
        .collect();
    if max_order >= 5 {
        let boot = bootstrap_high_orders(samples, opts);
        for r in 5..=max_order {
            let vals: Vec<f64> = boot.iter().map(|b| b[r]).collect();
            let mean = pairwise_sum(&vals) / vals.len() as f64;
            let var = pairwise_sum(&vals.iter().map(|v| (v - mean).powi(2)).collect::<Vec<_>>())
                / (vals.len() as f64 - 1.0);
            out.push(CumulantEstimate {
                order: r,
                value: pop[r],
                std_error: var.sqrt(),
                method: EstimateMethod::Bootstrap,
            });
        }
    }
    Ok(out)
}

fn bootstrap_high_orders(samples: &[f64], opts: CumulantOptions) -> Vec<[f64; 9]> {
    let n = samples.len();
    let mut buf = vec![0.0; n];
    (0..opts.bootstrap_resamples.max(2))
        .map(|b| {
            let mut rng = path_rng(opts.bootstrap_seed, b as u64);
            for v in buf.iter_mut() {
                *v = samples[rng.random_range(0..n)];
            }
            plug_in_cumulants(&buf)
        })
        .collect()
}

/// Sample mean of `exp(a·X + b·QV + c·ζ)` with its standard error.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MgfEstimate {
    pub value: f64,
    pub std_error: f64,
    /// Share of the sum carried by the largest 0.1% of the exponentials.
    pub tail_share: f64,
    /// Set when `tail_share` exceeds 20%: the estimate is unreliable.
    pub tail_warning: bool,
}

/// `X` is the first column of `samples`; `QV` and `ZETA` are looked up by
/// name and only required when their weight is non-zero.
pub fn empirical_mgf(samples: &Samples, (a, b, c): (f64, f64, f64)) -> Result<MgfEstimate> {
    let n = samples.len();
    if n < 2 {
        return Err(Error::InsufficientSamples(format!("{n} samples")));
    }
    let x = samples.column_at(0);
    let qv = if b != 0.0 { Some(samples.require("QV")?) } else { None };
    let zeta = if c != 0.0 { Some(samples.require("ZETA")?) } else { None };
    let e: Vec<f64> = (0..n)
        .map(|i| {
            let mut s = a * x[i];
            if let Some(q) = qv {
                s += b * q[i];
            }
            if let Some(z) = zeta {
                s += c * z[i];
            }
            s.exp()
        })
        .collect();
    if e.iter().any(|v| !v.is_finite()) {
        return Err(Error::Domain("exp(a·X + b·QV + c·ζ) overflowed".into()));
    }
    let nf = n as f64;
    let total = pairwise_sum(&e);
    let mean = total / nf;
    let var = pairwise_sum(&e.iter().map(|v| (v - mean).powi(2)).collect::<Vec<_>>()) / (nf - 1.0);
    let top = (n / 1000).max(1);
    let mut sorted = e;
    let idx = n - top;
    sorted.select_nth_unstable_by(idx, |p, q| p.total_cmp(q));
    let tail = pairwise_sum(&sorted[idx..]);
    let tail_share = if total > 0.0 { tail / total } else { 0.0 };
    Ok(MgfEstimate {
        value: mean,
        std_error: (var / nf).sqrt(),
        tail_share,
        tail_warning: tail_share > 0.2,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand_distr::{Distribution, StandardNormal};

    fn normals(n: usize, seed: u64) -> Vec<f64> {
        let mut rng = path_rng(seed, 0);
        (0..n).map(|_| StandardNormal.sample(&mut rng)).collect()
    }

    #[test]
    fn normal_cumulants() {
        let x = normals(200_000, 1);
        let est = empirical_cumulants(&x, 6).unwrap();
        let want = [0.0, 1.0, 0.0, 0.0, 0.0, 0.0];
        for (e, w) in est.iter().zip(want) {
            assert!(e.std_error > 0.0);
            assert!((e.value - w).abs() < 3.0 * e.std_error + 1e-12, "{e:?}");
        }
        assert_eq!(est[4].method, EstimateMethod::Bootstrap);
    }

    #[test]
    fn k_statistics_exact_on_small_sample() {
        // Hand-computed: data 1, 2, 4, 8.
        let x = [1.0, 2.0, 4.0, 8.0];
        let k = k_statistics(&x);
        assert!((k[1] - 3.75).abs() < 1e-14);
        assert!((k[2] - 9.583333333333334).abs() < 1e-12);
        assert!((k[3] - 33.75).abs() < 1e-11);
    }

    #[test]
    fn constant_samples() {
        let x = vec![2.5; 100];
        let est = empirical_cumulants(&x, 6).unwrap();
        assert_eq!(est[0].value, 2.5);
        assert!(est[1..].iter().all(|e| e.value == 0.0 && e.std_error == 0.0));
    }

    #[test]
    fn insufficient() {
        assert!(matches!(
            empirical_cumulants(&[1.0; 40], 4),
            Err(Error::InsufficientSamples(_))
        ));
        assert!(empirical_cumulants(&[1.0; 400], 7).is_err());
    }

    #[test]
    fn pairwise_matches_naive() {
        let x: Vec<f64> = (0..10_000).map(|i| (i as f64).sin()).collect();
        assert!((pairwise_sum(&x) - x.iter().sum::<f64>()).abs() < 1e-10);
    }
}
