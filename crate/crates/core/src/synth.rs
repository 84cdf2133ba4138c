//! Seeded generators for the simulation designs: noisy circles and spheres
//! with clustered Gaussian contamination.
//!
//! Reproducibility contract: all randomness comes from ChaCha8 streams. A
//! generator seeded with `seed` draws component `c` (0 = signal, 1.. =
//! contamination clusters in listed order) from
//! `ChaCha8Rng::seed_from_u64(seed)` with stream `c`, so clouds are
//! bit-stable across releases and components can be regenerated
//! independently. Uniform draws map the generator's `[0, 1)` doubles
//! linearly onto the target interval. Normal draws use the Box-Muller map
//! `z = sqrt(-2 ln(1 - u1)) * cos(2 pi u2)`, consuming exactly two uniforms
//! per variate.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metric::PointCloud;

/// Origin of a generated point; used by test assertions, never by trimming.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Label {
    Signal,
    /// Index into the outlier cluster list.
    Outlier(usize),
}

/// A generated cloud together with per-point origin labels.
#[derive(Debug, Clone)]
pub struct LabeledCloud {
    pub cloud: PointCloud,
    pub labels: Vec<Label>,
}

impl LabeledCloud {
    pub fn into_cloud(self) -> PointCloud {
        self.cloud
    }
}

/// Signal distribution of a contamination mixture.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum SignalModel {
    /// theta ~ U[0, 2pi), r ~ N(1, radial_var); point (r cos theta, r sin theta).
    NoisyCircle { radial_var: f64 },
    /// theta ~ U[0, pi), phi ~ U[0, 2pi), r ~ N(1, radial_var);
    /// point (r sin theta cos phi, r sin theta sin phi, r cos theta).
    NoisySphere { radial_var: f64 },
    /// Points exactly on the unit circle, theta ~ U[0, 2pi).
    UniformCircle,
}

impl SignalModel {
    fn ambient_dim(&self) -> usize {
        match self {
            SignalModel::NoisyCircle { .. } | SignalModel::UniformCircle => 2,
            SignalModel::NoisySphere { .. } => 3,
        }
    }
}

/// One isotropic Gaussian contamination cluster.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianCluster {
    pub center: Vec<f64>,
    /// Isotropic variance sigma^2 (not a standard deviation).
    pub variance: f64,
    pub count: usize,
}

/// A signal-plus-clustered-outliers mixture.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixtureSpec {
    pub n_signal: usize,
    pub signal: SignalModel,
    pub outliers: Vec<GaussianCluster>,
}

impl MixtureSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n_signal == 0 {
            return Err(Error::input("mixture needs at least one signal point"));
        }
        let dim = self.signal.ambient_dim();
        for (i, c) in self.outliers.iter().enumerate() {
            if c.center.len() != dim {
                return Err(Error::input(format!(
                    "cluster {i} center has dimension {} but the signal lives in R^{dim}",
                    c.center.len()
                )));
            }
            if !(c.variance > 0.0) {
                return Err(Error::input(format!(
                    "cluster {i} variance must be positive, got {}",
                    c.variance
                )));
            }
            if c.count == 0 {
                return Err(Error::input(format!("cluster {i} has zero points")));
            }
        }
        Ok(())
    }

    pub fn total(&self) -> usize {
        self.n_signal + self.outliers.iter().map(|c| c.count).sum::<usize>()
    }
}

fn component_rng(seed: u64, component: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(component);
    rng
}

fn uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * rng.random::<f64>()
}

/// Box-Muller normal draw; consumes exactly two uniforms.
fn normal(rng: &mut ChaCha8Rng, mean: f64, variance: f64) -> f64 {
    let u1: f64 = rng.random();
    let u2: f64 = rng.random();
    let z = (-2.0 * (1.0 - u1).ln()).sqrt() * (std::f64::consts::TAU * u2).cos();
    mean + variance.sqrt() * z
}

/// Draws a labeled sample from a mixture: signal points first, then each
/// cluster's points in listed order.
pub fn gen_mixture(spec: &MixtureSpec, seed: u64) -> Result<LabeledCloud> {
    spec.validate()?;
    let mut points = Vec::with_capacity(spec.total());
    let mut labels = Vec::with_capacity(spec.total());

    let mut rng = component_rng(seed, 0);
    for _ in 0..spec.n_signal {
        let p = match &spec.signal {
            SignalModel::NoisyCircle { radial_var } => {
                let theta = uniform(&mut rng, 0.0, std::f64::consts::TAU);
                let r = normal(&mut rng, 1.0, *radial_var);
                vec![r * theta.cos(), r * theta.sin()]
            }
            SignalModel::UniformCircle => {
                let theta = uniform(&mut rng, 0.0, std::f64::consts::TAU);
                vec![theta.cos(), theta.sin()]
            }
            SignalModel::NoisySphere { radial_var } => {
                let theta = uniform(&mut rng, 0.0, std::f64::consts::PI);
                let phi = uniform(&mut rng, 0.0, std::f64::consts::TAU);
                let r = normal(&mut rng, 1.0, *radial_var);
                vec![
                    r * theta.sin() * phi.cos(),
                    r * theta.sin() * phi.sin(),
                    r * theta.cos(),
                ]
            }
        };
        points.push(p);
        labels.push(Label::Signal);
    }

    for (ci, cluster) in spec.outliers.iter().enumerate() {
        let mut rng = component_rng(seed, 1 + ci as u64);
        for _ in 0..cluster.count {
            let p: Vec<f64> = cluster
                .center
                .iter()
                .map(|&m| normal(&mut rng, m, cluster.variance))
                .collect();
            points.push(p);
            labels.push(Label::Outlier(ci));
        }
    }

    Ok(LabeledCloud {
        cloud: PointCloud::new(points)?,
        labels,
    })
}

/// Circle-with-clusters design: 200 points in R^2. 120 signal points near the
/// unit circle (radial variance 0.04) and 16 points from each of five
/// Gaussian clusters (variance 0.0144) centered at the four (+-1.25, +-1.25)
/// corners and the origin.
pub fn case_study_1_spec() -> MixtureSpec {
    let centers = [
        [1.25, 1.25],
        [1.25, -1.25],
        [-1.25, 1.25],
        [-1.25, -1.25],
        [0.0, 0.0],
    ];
    MixtureSpec {
        n_signal: 120,
        signal: SignalModel::NoisyCircle { radial_var: 0.04 },
        outliers: centers
            .iter()
            .map(|c| GaussianCluster {
                center: c.to_vec(),
                variance: 0.0144,
                count: 16,
            })
            .collect(),
    }
}

/// Sphere-with-clusters design: 400 points in R^3. 265 signal points near the
/// unit sphere (radial variance 0.01) and 15 points from each of nine
/// Gaussian clusters (variance 0.04) centered at the eight
/// (+-1.01, +-1.01, +-1.01) corners and the origin.
pub fn case_study_2_spec() -> MixtureSpec {
    let mut centers: Vec<Vec<f64>> = Vec::new();
    for &x in &[1.01, -1.01] {
        for &y in &[1.01, -1.01] {
            for &z in &[1.01, -1.01] {
                centers.push(vec![x, y, z]);
            }
        }
    }
    centers.push(vec![0.0, 0.0, 0.0]);
    MixtureSpec {
        n_signal: 265,
        signal: SignalModel::NoisySphere { radial_var: 0.01 },
        outliers: centers
            .into_iter()
            .map(|c| GaussianCluster {
                center: c,
                variance: 0.04,
                count: 15,
            })
            .collect(),
    }
}

pub fn gen_case_study_1(seed: u64) -> LabeledCloud {
    gen_mixture(&case_study_1_spec(), seed).expect("fixed spec is valid")
}

pub fn gen_case_study_2(seed: u64) -> LabeledCloud {
    gen_mixture(&case_study_2_spec(), seed).expect("fixed spec is valid")
}

/// Exactly n i.i.d. points on the unit circle.
pub fn gen_uniform_circle(n: usize, seed: u64) -> Result<PointCloud> {
    if n == 0 {
        return Err(Error::input("circle sample needs n >= 1"));
    }
    let spec = MixtureSpec {
        n_signal: n,
        signal: SignalModel::UniformCircle,
        outliers: Vec::new(),
    };
    Ok(gen_mixture(&spec, seed)?.cloud)
}
