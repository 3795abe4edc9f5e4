//! Parameter sweeps of the self-force over `β`.
//!
//! A scan evaluates [`self_force`] on a uniform grid, concurrently, and
//! keeps the samples in `β` order whatever the completion order was. Coarse
//! sweeps skip a window around each singular velocity; zooms sample a
//! window with no exclusions.

mod io;

pub use io::{read_result, run_to_file, write_header, write_row, write_result};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::nullcone::singular_velocities_between;
use crate::numerics::{BigReal, PrecisionPolicy};
use crate::selfforce::{self_force, ForceSample, Mode};

/// Default half-width of the window skipped around each singular velocity.
pub const DEFAULT_EXCLUSION: &str = "0.05";

/// How the grid was specified.
#[derive(Clone, Debug, PartialEq)]
pub enum ScanKind {
    Sweep,
    Zoom { center: BigReal, width: BigReal },
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScanConfig {
    pub kind: ScanKind,
    pub beta_min: BigReal,
    pub beta_max: BigReal,
    pub samples: usize,
    pub mode: Mode,
    pub policy: PrecisionPolicy,
    pub exclusion_radius: BigReal,
}

impl ScanConfig {
    pub fn sweep(beta_min: BigReal, beta_max: BigReal, samples: usize, mode: Mode, policy: PrecisionPolicy) -> Self {
        let exclusion_radius = BigReal::parse(DEFAULT_EXCLUSION, policy.max_digits).expect("literal");
        ScanConfig {
            kind: ScanKind::Sweep,
            beta_min,
            beta_max,
            samples,
            mode,
            policy,
            exclusion_radius,
        }
    }

    /// Uniform window `[center − width/2, center + width/2]` without exclusions.
    pub fn zoom(center: BigReal, width: BigReal, samples: usize, mode: Mode, policy: PrecisionPolicy) -> Result<Self> {
        if !width.is_positive() {
            return Err(Error::InvalidArgument("zoom width must be positive".into()));
        }
        let digits = policy.max_digits.max(center.digits()).max(width.digits());
        let (c, w) = (center.with_digits(digits), width.with_digits(digits));
        let half = w.div_i64(2);
        Ok(ScanConfig {
            kind: ScanKind::Zoom { center, width },
            beta_min: &c - &half,
            beta_max: &c + &half,
            samples,
            mode,
            policy,
            exclusion_radius: BigReal::zero(digits),
        })
    }

    pub fn with_exclusion(mut self, radius: BigReal) -> Self {
        self.exclusion_radius = radius;
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.policy.validate()?;
        if self.beta_min <= self.beta_min.constant(1) {
            return Err(Error::InvalidArgument(format!(
                "beta_min {} must exceed 1",
                self.beta_min.to_sci_string(16)
            )));
        }
        if self.beta_max < self.beta_min {
            return Err(Error::InvalidArgument("beta_max below beta_min".into()));
        }
        if self.samples < 2 {
            return Err(Error::InvalidArgument("at least 2 samples required".into()));
        }
        if self.exclusion_radius.is_negative() {
            return Err(Error::InvalidArgument("exclusion_radius must be non-negative".into()));
        }
        Ok(())
    }

    fn grid_digits(&self) -> u32 {
        self.policy.max_digits.max(self.beta_min.digits()).max(self.beta_max.digits())
    }

    /// Singular velocities inside the scanned range.
    pub fn eigenvalues(&self) -> Result<Vec<BigReal>> {
        let d = self.grid_digits();
        let lo = &self.beta_min.with_digits(d) - &self.exclusion_radius;
        let hi = &self.beta_max.with_digits(d) + &self.exclusion_radius;
        Ok(singular_velocities_between(&lo, &hi, d)?
            .into_iter()
            .map(|sv| sv.beta)
            .collect())
    }

    /// Grid points after exclusions, ascending.
    pub fn grid(&self) -> Result<Vec<BigReal>> {
        self.validate()?;
        let d = self.grid_digits();
        let lo = self.beta_min.with_digits(d);
        let step = (&self.beta_max.with_digits(d) - &lo).div_i64(self.samples as i64 - 1);
        let excluded = if self.exclusion_radius.is_positive() {
            self.eigenvalues()?
        } else {
            Vec::new()
        };
        let grid = (0..self.samples)
            .map(|i| {
                if i + 1 == self.samples {
                    self.beta_max.with_digits(d)
                } else {
                    &lo + &step.mul_i64(i as i64)
                }
            })
            .filter(|b| excluded.iter().all(|e| (b - e).abs() >= self.exclusion_radius))
            .collect();
        Ok(grid)
    }
}

/// Provenance recorded with every result.
#[derive(Clone, Debug, PartialEq)]
pub struct Metadata {
    pub version: String,
    /// Omitted unless requested so that identical runs give identical files.
    pub timestamp: Option<String>,
    pub eigenvalues: Vec<BigReal>,
}

#[derive(Clone, Debug)]
pub struct ScanResult {
    pub config: ScanConfig,
    pub samples: Vec<ForceSample>,
    pub metadata: Metadata,
}

pub(crate) fn metadata_for(config: &ScanConfig) -> Result<Metadata> {
    Ok(Metadata {
        version: env!("CARGO_PKG_VERSION").to_string(),
        timestamp: None,
        eigenvalues: config.eigenvalues()?,
    })
}

/// A sample that could not be evaluated at any rung.
fn failed_sample(beta: &BigReal, mode: Mode, policy: &PrecisionPolicy) -> ForceSample {
    let nan = BigReal::nan(policy.max_digits);
    ForceSample {
        beta: beta.clone(),
        z_value: nan.clone(),
        epsilon: nan.clone(),
        mode,
        n_roots: 0,
        converged: false,
        digits_used: policy.max_digits,
        radial: nan.clone(),
        azimuthal: nan,
    }
}

/// Evaluates `betas` on `workers` threads, returning samples in input order.
pub fn evaluate(betas: &[BigReal], mode: Mode, policy: &PrecisionPolicy, workers: usize) -> Result<Vec<ForceSample>> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::InvalidArgument(format!("worker pool: {e}")))?;
    Ok(pool.install(|| {
        betas
            .par_iter()
            .map(|b| self_force(b, mode, policy).unwrap_or_else(|_| failed_sample(b, mode, policy)))
            .collect()
    }))
}

/// Number of workers when none is requested.
pub fn default_workers() -> usize {
    std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
}

pub fn sweep(config: &ScanConfig, workers: usize) -> Result<ScanResult> {
    let grid = config.grid()?;
    let samples = evaluate(&grid, config.mode, &config.policy, workers)?;
    Ok(ScanResult {
        metadata: metadata_for(config)?,
        config: config.clone(),
        samples,
    })
}

pub fn zoom(
    center: &BigReal,
    width: &BigReal,
    samples: usize,
    mode: Mode,
    policy: &PrecisionPolicy,
    workers: usize,
) -> Result<ScanResult> {
    let config = ScanConfig::zoom(center.clone(), width.clone(), samples, mode, policy.clone())?;
    sweep(&config, workers)
}

/// Sign statistics of `Z` over converged samples.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Census {
    pub positive: usize,
    pub negative: usize,
    /// Adjacent converged samples with opposite signs.
    pub alternations: usize,
    pub unconverged: usize,
}

pub fn sign_census(result: &ScanResult) -> Census {
    census_of(&result.samples)
}

pub fn census_of(samples: &[ForceSample]) -> Census {
    let mut c = Census::default();
    let mut last = 0;
    for s in samples {
        if !s.converged {
            c.unconverged += 1;
            continue;
        }
        let sign = s.z_value.signum();
        match sign {
            1 => c.positive += 1,
            -1 => c.negative += 1,
            _ => {}
        }
        if sign != 0 && last != 0 && sign != last {
            c.alternations += 1;
        }
        if sign != 0 {
            last = sign;
        }
    }
    c
}

/// Censuses of the same window at `samples · 2^level` points.
#[derive(Clone, Debug, PartialEq)]
pub struct Refinement {
    pub levels: Vec<(u32, Census)>,
}

impl Refinement {
    pub fn alternations_non_decreasing(&self) -> bool {
        self.levels.windows(2).all(|w| w[1].1.alternations >= w[0].1.alternations)
    }

    pub fn alternations_stable(&self) -> bool {
        self.levels.windows(2).all(|w| w[1].1.alternations == w[0].1.alternations)
    }
}

pub fn refine_census(
    center: &BigReal,
    width: &BigReal,
    samples: usize,
    mode: Mode,
    policy: &PrecisionPolicy,
    levels: u32,
    workers: usize,
) -> Result<Refinement> {
    if levels == 0 {
        return Err(Error::InvalidArgument("levels must be at least 1".into()));
    }
    let mut out = Vec::with_capacity(levels as usize);
    for level in 0..levels {
        let n = samples
            .checked_mul(1usize << level)
            .ok_or_else(|| Error::InvalidArgument("sample count overflow".into()))?;
        let result = zoom(center, width, n, mode, policy, workers)?;
        out.push((level, sign_census(&result)));
    }
    Ok(Refinement { levels: out })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(s: &str) -> BigReal {
        BigReal::parse(s, 60).unwrap()
    }

    fn quick() -> PrecisionPolicy {
        PrecisionPolicy::new(30, 2.0, 1e-10, 120).unwrap()
    }

    #[test]
    fn two_samples_hit_the_endpoints() {
        let cfg = ScanConfig::sweep(b("2"), b("3"), 2, Mode::FeynmanWheeler, quick());
        let grid = cfg.grid().unwrap();
        assert_eq!(grid.len(), 2);
        assert_eq!(grid[0].to_f64(), 2.0);
        assert_eq!(grid[1].to_f64(), 3.0);
    }

    #[test]
    fn exclusion_windows_remove_points() {
        let cfg = ScanConfig::sweep(b("4"), b("5"), 101, Mode::FeynmanWheeler, quick());
        let grid = cfg.grid().unwrap();
        assert_eq!(cfg.eigenvalues().unwrap().len(), 1);
        assert!(grid.len() < 101 && grid.len() >= 90);
        assert!(grid.iter().all(|g| (g.to_f64() - 4.6033388).abs() >= 0.05));
    }

    #[test]
    fn range_inside_exclusion_is_empty() {
        let cfg = ScanConfig::sweep(b("4.6"), b("4.61"), 5, Mode::FeynmanWheeler, quick());
        assert!(cfg.grid().unwrap().is_empty());
        let res = sweep(&cfg, 2).unwrap();
        assert!(res.samples.is_empty());
        assert_eq!(sign_census(&res), Census::default());
    }

    #[test]
    fn invalid_configs() {
        assert!(ScanConfig::sweep(b("1"), b("3"), 5, Mode::Retarded, quick()).grid().is_err());
        assert!(ScanConfig::sweep(b("2"), b("3"), 1, Mode::Retarded, quick()).grid().is_err());
        assert!(ScanConfig::sweep(b("3"), b("2"), 5, Mode::Retarded, quick()).grid().is_err());
        assert!(ScanConfig::zoom(b("4.6"), b("0"), 5, Mode::Retarded, quick()).is_err());
    }

    #[test]
    fn coarse_census_is_all_negative() {
        let cfg = ScanConfig::sweep(b("2"), b("4"), 9, Mode::FeynmanWheeler, quick());
        let res = sweep(&cfg, 3).unwrap();
        let c = sign_census(&res);
        assert_eq!((c.positive, c.negative, c.alternations, c.unconverged), (0, 9, 0, 0));
        for w in res.samples.windows(2) {
            assert!(w[0].beta < w[1].beta);
        }
    }

    #[test]
    fn census_counts_alternations() {
        let mk = |z: &str, conv: bool| ForceSample {
            beta: b("2"),
            z_value: b(z),
            epsilon: b("0"),
            mode: Mode::FeynmanWheeler,
            n_roots: 1,
            converged: conv,
            digits_used: 60,
            radial: -b(z),
            azimuthal: b("0"),
        };
        let s = [mk("1", true), mk("-1", true), mk("5", false), mk("-2", true), mk("3", true)];
        assert_eq!(
            census_of(&s),
            Census {
                positive: 2,
                negative: 2,
                alternations: 2,
                unconverged: 1
            }
        );
        assert_eq!(census_of(&[]), Census::default());
    }

    #[test]
    fn refinement_in_smooth_region_is_stable() {
        let r = refine_census(&b("2.5"), &b("0.2"), 4, Mode::FeynmanWheeler, &quick(), 3, 2).unwrap();
        assert_eq!(r.levels.len(), 3);
        assert!(r.alternations_stable());
        assert_eq!(r.levels[2].1.negative, 16);
        let direct = zoom(&b("2.5"), &b("0.2"), 4, Mode::FeynmanWheeler, &quick(), 1).unwrap();
        let once = refine_census(&b("2.5"), &b("0.2"), 4, Mode::FeynmanWheeler, &quick(), 1, 1).unwrap();
        assert_eq!(once.levels, vec![(0, sign_census(&direct))]);
        assert!(refine_census(&b("2.5"), &b("0.2"), 4, Mode::FeynmanWheeler, &quick(), 0, 1).is_err());
    }
}
