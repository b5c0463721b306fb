//! Step-count scaling of the limit word problem.

use serde::{Deserialize, Serialize};

use crate::chain::GroupChain;
use crate::error::{Error, Result};
use crate::harness::gen::{random_reduced, rng};
use crate::steps;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SizeRecord {
    pub n: usize,
    /// steps of each query, in sample order
    pub steps: Vec<u64>,
    pub mean_steps: f64,
    pub trivial: usize,
    /// level the solver ran at
    pub level: usize,
    /// steps spent generating levels and building pattern sets before the
    /// queries of this size
    pub preprocessing_steps: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub seed: u64,
    pub words_per_size: usize,
    pub records: Vec<SizeRecord>,
    pub slope: f64,
    /// 95% confidence interval of the slope
    pub ci: (f64, f64),
}

/// Two-sided 95% Student t quantiles for 1..=30 degrees of freedom.
const T95: [f64; 30] = [
    12.706, 4.303, 3.182, 2.776, 2.571, 2.447, 2.365, 2.306, 2.262, 2.228, 2.201, 2.179, 2.160,
    2.145, 2.131, 2.120, 2.110, 2.101, 2.093, 2.086, 2.080, 2.074, 2.069, 2.064, 2.060, 2.056,
    2.052, 2.048, 2.045, 2.042,
];

/// Least-squares slope of `ln y` on `ln x` with its 95% interval.
pub fn loglog_slope(points: &[(f64, f64)]) -> (f64, (f64, f64)) {
    let k = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let mx = xs.iter().sum::<f64>() / k;
    let my = ys.iter().sum::<f64>() / k;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let icept = my - slope * mx;
    let dof = points.len().saturating_sub(2);
    if dof == 0 {
        return (slope, (f64::NEG_INFINITY, f64::INFINITY));
    }
    let ssr: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - icept - slope * x).powi(2))
        .sum();
    let se = (ssr / dof as f64 / sxx).sqrt();
    let t = T95.get(dof - 1).copied().unwrap_or(1.96);
    (slope, (slope - t * se, slope + t * se))
}

/// Runs `words_per_size` limit word-problem queries on random freely
/// reduced words over the base generators at each size. Needs at least
/// five distinct sizes spanning three doublings.
pub fn bench_wp(
    chain: &GroupChain,
    sizes: &[usize],
    words_per_size: usize,
    seed: u64,
) -> Result<BenchReport> {
    let mut sizes: Vec<usize> = sizes.to_vec();
    sizes.sort_unstable();
    sizes.dedup();
    let (lo, hi) = (sizes.first().copied().unwrap_or(0), sizes.last().copied().unwrap_or(0));
    if sizes.len() < 5 || lo == 0 || hi < 8 * lo || words_per_size == 0 {
        return Err(Error::InvalidParams(format!(
            "bench needs >= 5 distinct positive sizes spanning >= 3 doublings, got {sizes:?}"
        )));
    }
    let gens = chain.base.len();
    // level generation and pattern sets first, one size at a time, so that
    // query counts do not depend on which query warmed a cache
    let mut pre = Vec::new();
    for &n in &sizes {
        let (level, cost) = steps::measure(|| -> Result<usize> {
            let w = random_reduced(&mut rng(seed ^ n as u64), gens, n);
            let a = chain.limit_word_problem(&w)?;
            if let Some(e) = &chain.solver(a.level, n)?.engine {
                e.pattern_sets(n)?;
            }
            Ok(a.level)
        });
        pre.push((level?, cost.total()));
    }
    let results: Vec<Result<(Vec<u64>, usize)>> = std::thread::scope(|s| {
        let handles: Vec<_> = sizes
            .iter()
            .map(|&n| {
                s.spawn(move || -> Result<(Vec<u64>, usize)> {
                    let mut g = rng(seed.wrapping_mul(0x9e37_79b9_7f4a_7c15) ^ n as u64);
                    let mut counts = Vec::with_capacity(words_per_size);
                    let mut trivial = 0;
                    for _ in 0..words_per_size {
                        let w = random_reduced(&mut g, gens, n);
                        let (a, cost) = steps::measure(|| chain.limit_word_problem(&w));
                        trivial += usize::from(a?.trivial);
                        counts.push(cost.total());
                    }
                    Ok((counts, trivial))
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().unwrap_or_else(|_| Err(Error::Budget("bench thread panicked".into()))))
            .collect()
    });
    let mut records = Vec::new();
    for ((&n, r), (level, pre_steps)) in sizes.iter().zip(results).zip(pre) {
        let (counts, trivial) = r?;
        let mean = counts.iter().sum::<u64>() as f64 / counts.len() as f64;
        records.push(SizeRecord {
            n,
            steps: counts,
            mean_steps: mean,
            trivial,
            level,
            preprocessing_steps: pre_steps,
        });
    }
    let pts: Vec<(f64, f64)> = records
        .iter()
        .map(|r| (r.n as f64, r.mean_steps.max(1.0)))
        .collect();
    let (slope, ci) = loglog_slope(&pts);
    Ok(BenchReport {
        seed,
        words_per_size,
        records,
        slope,
        ci,
    })
}

impl BenchReport {
    /// One JSON object per size, then one for the fit.
    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for r in &self.records {
            let mut v = serde_json::to_value(r).expect("plain record");
            v["kind"] = "size".into();
            v["seed"] = self.seed.into();
            out += &v.to_string();
            out.push('\n');
        }
        let fit = serde_json::json!({
            "kind": "fit",
            "seed": self.seed,
            "words_per_size": self.words_per_size,
            "sizes": self.records.len(),
            "slope": self.slope,
            "ci_low": self.ci.0,
            "ci_high": self.ci.1,
        });
        out += &fit.to_string();
        out.push('\n');
        out
    }
}
