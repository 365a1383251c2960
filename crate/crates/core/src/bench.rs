//! Precision-vs-partition benchmark for the stepped propagators.
//!
//! Draws (𝒥, 𝒜) pairs uniformly from a symmetric square, evolves the
//! half-sine-driven sector with both step orders at each requested
//! partition count, and scores each result by its correct digits against
//! the refined reference. Per-sample RNG streams are derived from
//! (seed, sample index), so the digit statistics are reproducible across
//! runs and thread counts; only the timings vary.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::FieldProfile;
use crate::model::BlockParams;
use crate::propagator::{evolve, reference, EvolutionSpec, StepOrder};
use crate::su2::{Matrix2C, SigmaAxis};

/// Digits are capped at the double-precision floor.
pub const DIGITS_CAP: f64 = 15.0;

/// Benchmark configuration. JSON field names mirror the struct.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BenchConfig {
    /// Number of random (𝒥, 𝒜) draws.
    pub samples: usize,
    /// Partition counts to evaluate, each >= 1.
    pub n_values: Vec<usize>,
    /// Half-width of the symmetric draw interval for 𝒥 and 𝒜.
    pub param_range: f64,
    pub seed: u64,
    /// Tolerance handed to the refined reference.
    pub reference_tol: f64,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            samples: 1000,
            n_values: vec![10, 100, 1000],
            param_range: 5.0,
            seed: 1,
            reference_tol: 1e-10,
        }
    }
}

impl BenchConfig {
    pub fn validate(&self) -> Result<()> {
        if self.samples == 0 {
            return Err(Error::Config("samples must be >= 1".into()));
        }
        if self.n_values.is_empty() || self.n_values.contains(&0) {
            return Err(Error::Config("n_values must be non-empty, all >= 1".into()));
        }
        if !(self.param_range > 0.0 && self.param_range.is_finite()) {
            return Err(Error::Config("param_range must be positive".into()));
        }
        if !(self.reference_tol > 0.0) {
            return Err(Error::Config("reference_tol must be positive".into()));
        }
        Ok(())
    }
}

/// Aggregated precision and timing for one (order, n) cell.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BenchRecord {
    pub order: StepOrder,
    pub n: usize,
    pub samples: usize,
    pub mean_digits: f64,
    pub median_digits: f64,
    pub min_digits: f64,
    /// Mean wall-clock seconds per evolve call.
    pub mean_time_s: f64,
    /// Samples whose reference failed to converge (excluded from stats).
    pub skipped: usize,
}

/// Correct digits of `u` against `u_ref`: -log10 of the largest entrywise
/// deviation, clamped to [0, 15].
pub fn digits_of_precision(u: &Matrix2C, u_ref: &Matrix2C) -> f64 {
    let diff = u.max_abs_diff(u_ref);
    if diff == 0.0 {
        return DIGITS_CAP;
    }
    (-diff.log10()).clamp(0.0, DIGITS_CAP)
}

struct SampleOutcome {
    /// digits[order][n_idx], wall seconds per evolve alongside.
    digits: Vec<Vec<f64>>,
    times: Vec<Vec<f64>>,
    skipped: bool,
}

fn run_sample(cfg: &BenchConfig, index: usize) -> Result<SampleOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(index as u64 + 1);
    let r = cfg.param_range;
    let j: f64 = rng.random_range(-r..=r);
    let a: f64 = rng.random_range(-r..=r);

    let block = BlockParams::effective(j, SigmaAxis::X);
    let field = FieldProfile::half_sine(a, 1).expect("finite amplitude");

    let u_ref = match reference(&block, &field, false, cfg.reference_tol) {
        Ok(u) => u,
        Err(Error::Convergence(_)) => {
            return Ok(SampleOutcome {
                digits: Vec::new(),
                times: Vec::new(),
                skipped: true,
            })
        }
        Err(e) => return Err(e),
    };

    let mut digits = vec![Vec::new(); 2];
    let mut times = vec![Vec::new(); 2];
    for (oi, order) in StepOrder::BOTH.into_iter().enumerate() {
        for &n in &cfg.n_values {
            let spec = EvolutionSpec {
                block,
                field: field.clone(),
                n,
                order,
                attach_global_phase: false,
            };
            let start = Instant::now();
            let u = evolve(&spec)?;
            let elapsed = start.elapsed().as_secs_f64();
            digits[oi].push(digits_of_precision(&u, &u_ref));
            times[oi].push(elapsed);
        }
    }
    Ok(SampleOutcome {
        digits,
        times,
        skipped: false,
    })
}

fn median(sorted: &[f64]) -> f64 {
    let n = sorted.len();
    if n == 0 {
        return f64::NAN;
    }
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    }
}

/// Run the full benchmark; one record per (order, n) in a fixed order
/// (all linear rows first, ascending n within each order).
pub fn run_benchmark(cfg: &BenchConfig) -> Result<Vec<BenchRecord>> {
    cfg.validate()?;
    let outcomes: Vec<SampleOutcome> = (0..cfg.samples)
        .into_par_iter()
        .map(|i| run_sample(cfg, i))
        .collect::<Result<_>>()?;

    let skipped = outcomes.iter().filter(|o| o.skipped).count();
    let mut records = Vec::with_capacity(2 * cfg.n_values.len());
    for (oi, order) in StepOrder::BOTH.into_iter().enumerate() {
        for (ni, &n) in cfg.n_values.iter().enumerate() {
            let mut digits: Vec<f64> = outcomes
                .iter()
                .filter(|o| !o.skipped)
                .map(|o| o.digits[oi][ni])
                .collect();
            let mean_time_s = outcomes
                .iter()
                .filter(|o| !o.skipped)
                .map(|o| o.times[oi][ni])
                .sum::<f64>()
                / digits.len().max(1) as f64;
            let mean = digits.iter().sum::<f64>() / digits.len().max(1) as f64;
            digits.sort_by(|x, y| x.partial_cmp(y).expect("digits are finite"));
            records.push(BenchRecord {
                order,
                n,
                samples: digits.len(),
                mean_digits: mean,
                median_digits: median(&digits),
                min_digits: digits.first().copied().unwrap_or(f64::NAN),
                mean_time_s,
                skipped,
            });
        }
    }
    Ok(records)
}

/// CSV rendering of benchmark records. All digit columns are written with
/// full round-trip precision; the precision metric is documented in the
/// leading comment line.
pub fn render_csv(records: &[BenchRecord]) -> String {
    let mut out = String::from(
        "# p = -log10(max entrywise |U - U_ref|), capped to [0, 15]; \
         U_ref is the Richardson-refined quadratic propagator, polar-projected\n",
    );
    out.push_str("order,n,samples,mean_p,median_p,min_p,mean_time_s,skipped\n");
    for r in records {
        out.push_str(&format!(
            "{},{},{},{:.16e},{:.16e},{:.16e},{:.16e},{}\n",
            r.order.label(),
            r.n,
            r.samples,
            r.mean_digits,
            r.median_digits,
            r.min_digits,
            r.mean_time_s,
            r.skipped
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::su2::pauli;
    use crate::su2::PauliIndex;
    use num_complex::Complex64 as C64;

    #[test]
    fn digits_metric() {
        let id = Matrix2C::identity();
        assert_eq!(digits_of_precision(&id, &id), 15.0);

        let off = id + pauli(PauliIndex::X).scale(C64::new(1e-5, 0.0));
        assert!((digits_of_precision(&off, &id) - 5.0).abs() < 1e-9);

        let coarse = id + pauli(PauliIndex::X).scale(C64::new(0.5, 0.0));
        assert!((digits_of_precision(&coarse, &id) - std::f64::consts::LOG10_2).abs() < 1e-5);

        let wild = id * 100.0;
        assert_eq!(digits_of_precision(&wild, &id), 0.0);
    }

    #[test]
    fn config_validation() {
        assert!(BenchConfig::default().validate().is_ok());
        let bad = BenchConfig {
            samples: 0,
            ..BenchConfig::default()
        };
        assert!(bad.validate().is_err());
        let bad = BenchConfig {
            n_values: vec![10, 0],
            ..BenchConfig::default()
        };
        assert!(bad.validate().is_err());
    }

    fn small_config() -> BenchConfig {
        BenchConfig {
            samples: 24,
            n_values: vec![10, 100],
            param_range: 5.0,
            seed: 99,
            reference_tol: 1e-10,
        }
    }

    #[test]
    fn benchmark_is_deterministic() {
        let cfg = small_config();
        let first = run_benchmark(&cfg).unwrap();
        let second = run_benchmark(&cfg).unwrap();
        assert_eq!(first.len(), second.len());
        for (a, b) in first.iter().zip(second.iter()) {
            assert_eq!(a.order, b.order);
            assert_eq!(a.n, b.n);
            assert_eq!(a.mean_digits, b.mean_digits);
            assert_eq!(a.median_digits, b.median_digits);
            assert_eq!(a.min_digits, b.min_digits);
            assert_eq!(a.skipped, 0);
        }
    }

    #[test]
    fn digits_grow_with_partition_count() {
        let records = run_benchmark(&small_config()).unwrap();
        for order in StepOrder::BOTH {
            let per_order: Vec<&BenchRecord> =
                records.iter().filter(|r| r.order == order).collect();
            assert!(per_order[1].mean_digits + 0.1 >= per_order[0].mean_digits);
        }
        // Quadratic beats linear at the same n.
        let linear_100 = records
            .iter()
            .find(|r| r.order == StepOrder::Linear && r.n == 100)
            .unwrap();
        let quad_100 = records
            .iter()
            .find(|r| r.order == StepOrder::Quadratic && r.n == 100)
            .unwrap();
        assert!(quad_100.mean_digits > linear_100.mean_digits);
    }

    #[test]
    fn csv_schema() {
        let records = run_benchmark(&BenchConfig {
            samples: 4,
            n_values: vec![10],
            ..BenchConfig::default()
        })
        .unwrap();
        let csv = render_csv(&records);
        let mut lines = csv.lines();
        assert!(lines.next().unwrap().starts_with('#'));
        assert_eq!(
            lines.next().unwrap(),
            "order,n,samples,mean_p,median_p,min_p,mean_time_s,skipped"
        );
        let first = lines.next().unwrap();
        assert!(first.starts_with("linear,10,4,"));
        assert_eq!(first.split(',').count(), 8);
    }
}
