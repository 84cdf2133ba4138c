//! Data-driven selection of trimming proportions.
//!
//! Starting from initial proportions, each iteration trims the sample,
//! computes the persistence diagram of the trimmed Rips filtration, and stops
//! as soon as some bar in the target dimension persists at least `tau_min`;
//! otherwise the proportions decrease by their step (floored at zero) and the
//! loop continues, up to `max_iter` iterations. The average pairwise
//! distances of the full sample never change across iterations and are
//! computed once.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flagph::flag_rips_persistence;
use crate::metric::{DistanceMatrix, PointCloud};
use crate::persistence::PersistenceDiagram;
use crate::rips::RipsThreshold;
use crate::trim::{floor_count, TrimSpec};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SelectionConfig {
    pub alpha1_init: f64,
    pub alpha2_init: f64,
    pub step1: f64,
    pub step2: f64,
    /// Homology dimension k searched for a persistent feature.
    pub hom_dim: usize,
    /// Persistence threshold tau_min, in edge-length units.
    pub tau_min: f64,
    /// Maximum iterations T.
    pub max_iter: usize,
    pub rips_threshold: RipsThreshold,
    /// Filtration dimension cap; must be at least hom_dim + 1.
    pub max_dim: usize,
}

impl SelectionConfig {
    fn validate(&self, one_sided: bool) -> Result<()> {
        if one_sided {
            if !(0.0..1.0).contains(&self.alpha1_init) {
                return Err(Error::input(format!(
                    "one-sided alpha must lie in [0, 1), got {}",
                    self.alpha1_init
                )));
            }
        } else {
            TrimSpec::new(self.alpha1_init, self.alpha2_init)?;
        }
        if !(self.step1 > 0.0) || (!one_sided && !(self.step2 > 0.0)) {
            return Err(Error::input("step sizes must be positive"));
        }
        if !(self.tau_min > 0.0) {
            return Err(Error::input("tau_min must be positive"));
        }
        if self.max_iter == 0 {
            return Err(Error::input("max_iter must be at least 1"));
        }
        if self.max_dim < self.hom_dim + 1 {
            return Err(Error::input(format!(
                "max_dim {} too small for homology dimension {}; need at least {}",
                self.max_dim,
                self.hom_dim,
                self.hom_dim + 1
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SelectionOutcome {
    pub diagram: PersistenceDiagram,
    pub alpha1: f64,
    pub alpha2: f64,
    pub iterations_used: usize,
    pub threshold_met: bool,
}

/// Asymmetric selection loop over (alpha1, alpha2).
pub fn select_asymmetric(cloud: &PointCloud, cfg: &SelectionConfig) -> Result<SelectionOutcome> {
    cfg.validate(false)?;
    run_loop(cloud, cfg, false)
}

/// One-sided selection loop over a single alpha (carried in `alpha1_init` /
/// `step1`; `alpha2` stays 0).
pub fn select_one_sided(cloud: &PointCloud, cfg: &SelectionConfig) -> Result<SelectionOutcome> {
    cfg.validate(true)?;
    run_loop(cloud, cfg, true)
}

fn run_loop(cloud: &PointCloud, cfg: &SelectionConfig, one_sided: bool) -> Result<SelectionOutcome> {
    let d = DistanceMatrix::from_cloud(cloud)?;
    let n = d.len();
    // ranking by average pairwise distance is iteration-invariant
    let avg = crate::trim::avg_pairwise_distances(&d)?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        avg[a]
            .partial_cmp(&avg[b])
            .expect("average distances are finite")
            .then(a.cmp(&b))
    });

    let mut alpha1 = cfg.alpha1_init;
    let mut alpha2 = if one_sided { 0.0 } else { cfg.alpha2_init };
    let mut t = 0;
    let mut last_diagram: Option<PersistenceDiagram> = None;

    while t < cfg.max_iter {
        let k1 = floor_count(alpha1, n);
        let k2 = floor_count(alpha2, n);
        if k1 + k2 >= n {
            return Err(Error::input(format!(
                "trimming exhausts sample at alphas ({alpha1}, {alpha2})"
            )));
        }
        let mut kept: Vec<usize> = order[k2..n - k1].to_vec();
        kept.sort_unstable();

        let sub = d.submatrix(&kept)?;
        let dgm = flag_rips_persistence(&sub, cfg.rips_threshold, cfg.hom_dim)?;

        let met = dgm
            .bars_of_dim(cfg.hom_dim)
            .any(|b| b.persistence() >= cfg.tau_min);
        if met {
            return Ok(SelectionOutcome {
                diagram: dgm,
                alpha1,
                alpha2,
                iterations_used: t,
                threshold_met: true,
            });
        }
        last_diagram = Some(dgm);
        alpha1 = (alpha1 - cfg.step1).max(0.0);
        if !one_sided {
            alpha2 = (alpha2 - cfg.step2).max(0.0);
        }
        t += 1;
    }

    Ok(SelectionOutcome {
        diagram: last_diagram.expect("max_iter >= 1 ran at least one iteration"),
        alpha1,
        alpha2,
        iterations_used: t,
        threshold_met: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::gen_uniform_circle;

    fn base_cfg() -> SelectionConfig {
        SelectionConfig {
            alpha1_init: 0.0,
            alpha2_init: 0.0,
            step1: 0.05,
            step2: 0.05,
            hom_dim: 1,
            tau_min: 0.5,
            max_iter: 5,
            rips_threshold: RipsThreshold::Auto,
            max_dim: 2,
        }
    }

    #[test]
    fn clean_circle_meets_threshold_immediately() {
        let cloud = gen_uniform_circle(60, 4).unwrap();
        let out = select_asymmetric(&cloud, &base_cfg()).unwrap();
        assert!(out.threshold_met);
        assert_eq!(out.iterations_used, 0);
        assert_eq!((out.alpha1, out.alpha2), (0.0, 0.0));
        // the dominant loop persists far beyond 0.5
        let (_, _, len) = out.diagram.dominant_feature(1).unwrap();
        assert!(len >= 0.5, "dominant persistence {len}");
    }

    #[test]
    fn unreachable_threshold_walks_alphas_to_floor() {
        let cloud = gen_uniform_circle(40, 1).unwrap();
        let cfg = SelectionConfig {
            alpha1_init: 0.3,
            alpha2_init: 0.12,
            step1: 0.05,
            step2: 0.05,
            tau_min: 1e12,
            max_iter: 3,
            ..base_cfg()
        };
        let out = select_asymmetric(&cloud, &cfg).unwrap();
        assert!(!out.threshold_met);
        assert_eq!(out.iterations_used, 3);
        assert!((out.alpha1 - 0.15).abs() < 1e-12);
        assert!((out.alpha2 - 0.0).abs() < 1e-12); // floored at zero
    }

    #[test]
    fn one_sided_two_decrements() {
        let cloud = gen_uniform_circle(40, 2).unwrap();
        let cfg = SelectionConfig {
            alpha1_init: 0.3,
            step1: 0.1,
            tau_min: 1e12,
            max_iter: 2,
            ..base_cfg()
        };
        let out = select_one_sided(&cloud, &cfg).unwrap();
        assert!(!out.threshold_met);
        assert_eq!(out.iterations_used, 2);
        assert!((out.alpha1 - 0.1).abs() < 1e-12);
        assert_eq!(out.alpha2, 0.0);
    }

    #[test]
    fn one_sided_clean_circle() {
        let cloud = gen_uniform_circle(60, 4).unwrap();
        let cfg = SelectionConfig {
            alpha1_init: 0.0,
            ..base_cfg()
        };
        let out = select_one_sided(&cloud, &cfg).unwrap();
        assert!(out.threshold_met);
        assert_eq!(out.iterations_used, 0);
    }

    #[test]
    fn met_threshold_is_witnessed_by_a_bar() {
        let cloud = gen_uniform_circle(50, 10).unwrap();
        let cfg = SelectionConfig {
            alpha1_init: 0.2,
            alpha2_init: 0.1,
            tau_min: 0.4,
            ..base_cfg()
        };
        let out = select_asymmetric(&cloud, &cfg).unwrap();
        if out.threshold_met {
            assert!(out
                .diagram
                .bars_of_dim(cfg.hom_dim)
                .any(|b| b.persistence() >= cfg.tau_min));
        }
    }

    #[test]
    fn determinism() {
        let cloud = gen_uniform_circle(45, 3).unwrap();
        let cfg = SelectionConfig {
            alpha1_init: 0.25,
            alpha2_init: 0.05,
            tau_min: 0.8,
            ..base_cfg()
        };
        let a = select_asymmetric(&cloud, &cfg).unwrap();
        let b = select_asymmetric(&cloud, &cfg).unwrap();
        assert_eq!(a.diagram, b.diagram);
        assert_eq!(
            (a.alpha1, a.alpha2, a.iterations_used, a.threshold_met),
            (b.alpha1, b.alpha2, b.iterations_used, b.threshold_met)
        );
    }

    #[test]
    fn config_validation() {
        let cloud = gen_uniform_circle(20, 0).unwrap();
        let bad = SelectionConfig {
            max_dim: 1,
            ..base_cfg()
        };
        assert!(select_asymmetric(&cloud, &bad).is_err());
        let bad2 = SelectionConfig {
            alpha1_init: 0.6,
            ..base_cfg()
        };
        assert!(select_asymmetric(&cloud, &bad2).is_err());
        // one-sided admits alpha in [0, 1)
        let ok = SelectionConfig {
            alpha1_init: 0.6,
            ..base_cfg()
        };
        assert!(select_one_sided(&cloud, &ok).is_ok());
    }
}
