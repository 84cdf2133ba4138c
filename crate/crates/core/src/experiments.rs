//! Quantitative studies: trimmed-versus-raw dominant features on the
//! simulated designs, empirical convergence of the trimmed support, and a
//! randomized check of the diagram stability inequality.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bottleneck::stability_gap;
use crate::error::{Error, Result};
use crate::flagph::flag_rips_persistence;
use crate::metric::{hausdorff, DistanceMatrix, PointCloud};
use crate::rips::RipsThreshold;
use crate::synth::{gen_case_study_1, gen_case_study_2, gen_mixture, MixtureSpec, SignalModel};
use crate::trim::{reference_population_trim, trim_asymmetric, TrimSpec};

/// A dominant feature: (birth, death, persistence length).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Feature {
    pub birth: f64,
    pub death: f64,
    pub length: f64,
}

impl Feature {
    fn from_tuple(t: (f64, f64, f64)) -> Self {
        Feature {
            birth: t.0,
            death: t.1,
            length: t.2,
        }
    }
}

/// One (seed, grid point) outcome of a case study.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CaseStudyRow {
    pub seed: u64,
    pub alpha1: f64,
    pub alpha2: f64,
    pub untrimmed: Option<Feature>,
    pub trimmed: Option<Feature>,
    /// trimmed length / untrimmed length, when both exist
    pub ratio: Option<f64>,
}

/// Per-grid-point medians across seeds.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GridAggregate {
    pub alpha1: f64,
    pub alpha2: f64,
    pub median_untrimmed_length: Option<f64>,
    pub median_trimmed_length: Option<f64>,
    pub median_ratio: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CaseStudyReport {
    pub hom_dim: usize,
    pub rows: Vec<CaseStudyRow>,
    pub aggregates: Vec<GridAggregate>,
}

impl CaseStudyReport {
    pub fn aggregate_for(&self, spec: &TrimSpec) -> Option<&GridAggregate> {
        self.aggregates
            .iter()
            .find(|g| g.alpha1 == spec.alpha1 && g.alpha2 == spec.alpha2)
    }

    /// Table-shaped CSV: one row per (seed, grid point).
    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "seed,alpha1,alpha2,untrimmed_birth,untrimmed_death,untrimmed_length,\
             trimmed_birth,trimmed_death,trimmed_length,ratio\n",
        );
        let fmt = |f: &Option<Feature>, field: fn(&Feature) -> f64| -> String {
            f.as_ref().map(|f| field(f).to_string()).unwrap_or_default()
        };
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{}\n",
                r.seed,
                r.alpha1,
                r.alpha2,
                fmt(&r.untrimmed, |f| f.birth),
                fmt(&r.untrimmed, |f| f.death),
                fmt(&r.untrimmed, |f| f.length),
                fmt(&r.trimmed, |f| f.birth),
                fmt(&r.trimmed, |f| f.death),
                fmt(&r.trimmed, |f| f.length),
                r.ratio.map(|x| x.to_string()).unwrap_or_default(),
            ));
        }
        out
    }
}

fn median(values: &mut Vec<f64>) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    values.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = values.len();
    Some(if n % 2 == 1 {
        values[n / 2]
    } else {
        (values[n / 2 - 1] + values[n / 2]) / 2.0
    })
}

fn run_case_study<G>(
    seeds: &[u64],
    grid: &[TrimSpec],
    hom_dim: usize,
    generate: G,
) -> Result<CaseStudyReport>
where
    G: Fn(u64) -> PointCloud,
{
    if grid.is_empty() {
        return Err(Error::input("case study needs a non-empty trimming grid"));
    }
    if seeds.is_empty() {
        return Err(Error::input("case study needs at least one seed"));
    }
    let mut rows = Vec::with_capacity(seeds.len() * grid.len());
    for &seed in seeds {
        let cloud = generate(seed);
        let d = DistanceMatrix::from_cloud(&cloud)?;
        let untrimmed_dgm = flag_rips_persistence(&d, RipsThreshold::Auto, hom_dim)?;
        let untrimmed = untrimmed_dgm.dominant_feature(hom_dim).map(Feature::from_tuple);
        for spec in grid {
            let kept = trim_asymmetric(&d, spec)?.kept;
            let trimmed_dgm = if kept.len() == d.len() {
                untrimmed_dgm.clone()
            } else {
                let sub = d.submatrix(&kept)?;
                flag_rips_persistence(&sub, RipsThreshold::Auto, hom_dim)?
            };
            let trimmed = trimmed_dgm.dominant_feature(hom_dim).map(Feature::from_tuple);
            let ratio = match (&untrimmed, &trimmed) {
                (Some(u), Some(t)) if u.length > 0.0 => Some(t.length / u.length),
                _ => None,
            };
            rows.push(CaseStudyRow {
                seed,
                alpha1: spec.alpha1,
                alpha2: spec.alpha2,
                untrimmed,
                trimmed,
                ratio,
            });
        }
    }

    let aggregates = grid
        .iter()
        .map(|spec| {
            let of_grid: Vec<&CaseStudyRow> = rows
                .iter()
                .filter(|r| r.alpha1 == spec.alpha1 && r.alpha2 == spec.alpha2)
                .collect();
            GridAggregate {
                alpha1: spec.alpha1,
                alpha2: spec.alpha2,
                median_untrimmed_length: median(
                    &mut of_grid
                        .iter()
                        .filter_map(|r| r.untrimmed.map(|f| f.length))
                        .collect(),
                ),
                median_trimmed_length: median(
                    &mut of_grid
                        .iter()
                        .filter_map(|r| r.trimmed.map(|f| f.length))
                        .collect(),
                ),
                median_ratio: median(&mut of_grid.iter().filter_map(|r| r.ratio).collect()),
            }
        })
        .collect();

    Ok(CaseStudyReport {
        hom_dim,
        rows,
        aggregates,
    })
}

/// Circle design: dominant H1 feature, untrimmed versus trimmed per grid
/// point, across seeds.
pub fn run_case_study_1(seeds: &[u64], grid: &[TrimSpec]) -> Result<CaseStudyReport> {
    run_case_study(seeds, grid, 1, |s| gen_case_study_1(s).cloud)
}

/// Sphere design: dominant H2 feature (filtration carried to dimension 3).
pub fn run_case_study_2(seeds: &[u64], grid: &[TrimSpec]) -> Result<CaseStudyReport> {
    run_case_study(seeds, grid, 2, |s| gen_case_study_2(s).cloud)
}

/// Trim grid on a fixed cloud (no seeds), dominant features per grid point.
pub fn run_trim_grid(
    cloud: &PointCloud,
    grid: &[TrimSpec],
    hom_dim: usize,
    threshold: RipsThreshold,
) -> Result<CaseStudyReport> {
    if grid.is_empty() {
        return Err(Error::input("trim grid must be non-empty"));
    }
    let d = DistanceMatrix::from_cloud(cloud)?;
    let untrimmed_dgm = flag_rips_persistence(&d, threshold, hom_dim)?;
    let untrimmed = untrimmed_dgm.dominant_feature(hom_dim).map(Feature::from_tuple);
    let mut rows = Vec::new();
    for spec in grid {
        let kept = trim_asymmetric(&d, spec)?.kept;
        let sub = d.submatrix(&kept)?;
        let dgm = flag_rips_persistence(&sub, threshold, hom_dim)?;
        let trimmed = dgm.dominant_feature(hom_dim).map(Feature::from_tuple);
        let ratio = match (&untrimmed, &trimmed) {
            (Some(u), Some(t)) if u.length > 0.0 => Some(t.length / u.length),
            _ => None,
        };
        rows.push(CaseStudyRow {
            seed: 0,
            alpha1: spec.alpha1,
            alpha2: spec.alpha2,
            untrimmed,
            trimmed,
            ratio,
        });
    }
    let aggregates = rows
        .iter()
        .map(|r| GridAggregate {
            alpha1: r.alpha1,
            alpha2: r.alpha2,
            median_untrimmed_length: r.untrimmed.map(|f| f.length),
            median_trimmed_length: r.trimmed.map(|f| f.length),
            median_ratio: r.ratio,
        })
        .collect();
    Ok(CaseStudyReport {
        hom_dim,
        rows,
        aggregates,
    })
}

/// Configuration of the support-convergence experiment.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConvergenceConfig {
    /// Intrinsic mass-scaling exponent; the circle signal has b = 1.
    pub b: f64,
    pub sample_sizes: Vec<usize>,
    pub reps: usize,
    pub spec: TrimSpec,
    pub reference_size: usize,
    pub signal: SignalModel,
}

impl ConvergenceConfig {
    fn validate(&self) -> Result<()> {
        if !(self.b > 0.0) {
            return Err(Error::input("exponent b must be positive"));
        }
        let mut sizes = self.sample_sizes.clone();
        sizes.sort_unstable();
        sizes.dedup();
        if sizes.len() < 4 {
            return Err(Error::input("need at least 4 distinct sample sizes"));
        }
        if self.sample_sizes.iter().any(|&m| m < 8) {
            return Err(Error::input("sample sizes below 8 are not meaningful"));
        }
        if self.reps == 0 {
            return Err(Error::input("reps must be at least 1"));
        }
        if self.reference_size < 100 {
            return Err(Error::input("reference sample should have at least 100 points"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConvergenceResult {
    /// Least-squares slope of log(mean Hausdorff) on log(log m'/m')/b.
    pub slope: f64,
    /// One (x, y) point per sample size.
    pub points: Vec<(f64, f64)>,
    /// Mean Hausdorff distance per sample size, in input order.
    pub mean_hausdorff: Vec<f64>,
}

fn sample_signal(signal: &SignalModel, n: usize, seed: u64) -> Result<PointCloud> {
    let spec = MixtureSpec {
        n_signal: n,
        signal: signal.clone(),
        outliers: Vec::new(),
    };
    Ok(gen_mixture(&spec, seed)?.cloud)
}

/// Measures how fast the trimmed empirical support approaches the trimmed
/// support of a large reference sample, in Hausdorff distance, as the sample
/// grows. The theory predicts mean distance proportional to
/// `(log m'/m')^(1/b)` with `m'` the post-trimming count, so the regression
/// slope should sit near 1.
pub fn convergence_experiment(cfg: &ConvergenceConfig, seed: u64) -> Result<ConvergenceResult> {
    cfg.validate()?;
    // sub-seeds drawn in a fixed order: reference first, then (size, rep)
    let mut master = ChaCha8Rng::seed_from_u64(seed);
    let ref_seed: u64 = master.random();

    let reference = sample_signal(&cfg.signal, cfg.reference_size, ref_seed)?;
    let ref_kept = reference_population_trim(&reference, &cfg.spec)?;
    let ref_support = reference.select(&ref_kept)?;

    let mut points = Vec::with_capacity(cfg.sample_sizes.len());
    let mut means = Vec::with_capacity(cfg.sample_sizes.len());
    for &m in &cfg.sample_sizes {
        let mut total = 0.0;
        for _ in 0..cfg.reps {
            let task_seed: u64 = master.random();
            let cloud = sample_signal(&cfg.signal, m, task_seed)?;
            let d = DistanceMatrix::from_cloud(&cloud)?;
            let kept = trim_asymmetric(&d, &cfg.spec)?.kept;
            let support = cloud.select(&kept)?;
            total += hausdorff(&support, &ref_support)?;
        }
        let mean = total / cfg.reps as f64;
        let m_eff = m
            - crate::trim::floor_count(cfg.spec.alpha1, m)
            - crate::trim::floor_count(cfg.spec.alpha2, m);
        let x = ((m_eff as f64).ln() / m_eff as f64).ln() / cfg.b;
        points.push((x, mean.ln()));
        means.push(mean);
    }

    Ok(ConvergenceResult {
        slope: least_squares_slope(&points),
        points,
        mean_hausdorff: means,
    })
}

fn least_squares_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    sxy / sxx
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StabilityTrial {
    pub dim: usize,
    pub bottleneck: f64,
    pub hausdorff: f64,
    pub ok: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StabilityReport {
    pub trials: Vec<StabilityTrial>,
    pub all_pass: bool,
}

/// Random perturbation pairs: the bottleneck distance between the two Rips
/// diagrams must stay within twice the Hausdorff distance (edge-length
/// units), in dimensions 0 and 1.
pub fn stability_suite(n_trials: usize, seed: u64) -> Result<StabilityReport> {
    if n_trials == 0 {
        return Err(Error::input("need at least one trial"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut trials = Vec::with_capacity(n_trials * 2);
    for _ in 0..n_trials {
        let n = rng.random_range(4..=40);
        let ambient = rng.random_range(2..=3usize);
        let magnitude: f64 = rng.random_range(0.0..0.25);
        let pts: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..ambient).map(|_| rng.random_range(-1.0..1.0)).collect())
            .collect();
        let perturbed: Vec<Vec<f64>> = pts
            .iter()
            .map(|p| {
                p.iter()
                    .map(|&c| c + rng.random_range(-magnitude..=magnitude))
                    .collect()
            })
            .collect();
        let a = PointCloud::new(pts)?;
        let b = PointCloud::new(perturbed)?;
        for dim in 0..=1usize {
            let (w, h) = stability_gap(&a, &b, dim, 2)?;
            trials.push(StabilityTrial {
                dim,
                bottleneck: w,
                hausdorff: h,
                ok: w <= 2.0 * h + 1e-9,
            });
        }
    }
    let all_pass = trials.iter().all(|t| t.ok);
    Ok(StabilityReport { trials, all_pass })
}
