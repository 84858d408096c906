//! Random-matrix ensembles: Ginibre samples, the heavy-tailed perturbation
//! Z = x y^-1, the regularization T + eps Z, and the convergence study of the
//! perturbed Brown measures.

pub mod rng;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::assign::wasserstein1;
use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::kernel::{eigenvalues, lu, solve_right};
use crate::mat::{C64, OperatorMatrix};
use crate::stats::fk_determinant;

/// Named base-matrix generators for studies.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum BaseMatrix {
    Explicit { matrix: OperatorMatrix },
    JordanBlock { lambda: C64 },
    DiagonalClusters { centers: Vec<C64> },
    RandomTriangular { scale: f64 },
}

impl BaseMatrix {
    pub fn realize(&self, n: usize, seed: u64) -> Result<OperatorMatrix> {
        Ok(match self {
            BaseMatrix::Explicit { matrix } => {
                if matrix.dim() != n {
                    return Err(Error::DimensionMismatch {
                        left: matrix.dim(),
                        right: n,
                    });
                }
                matrix.clone()
            }
            BaseMatrix::JordanBlock { lambda } => OperatorMatrix::from_fn(n, |i, j| {
                if i == j {
                    *lambda
                } else if j == i + 1 {
                    C64::new(1.0, 0.0)
                } else {
                    C64::new(0.0, 0.0)
                }
            }),
            BaseMatrix::DiagonalClusters { centers } => {
                if centers.is_empty() {
                    return Err(Error::InvalidArgument(
                        "diagonal-clusters needs at least one center".into(),
                    ));
                }
                OperatorMatrix::from_fn(n, |i, j| {
                    if i == j {
                        centers[i % centers.len()]
                    } else {
                        C64::new(0.0, 0.0)
                    }
                })
            }
            BaseMatrix::RandomTriangular { scale } => {
                let mut r = rng::stream_rng(seed, u64::MAX);
                let mut m = OperatorMatrix::zeros(n);
                for i in 0..n {
                    for j in i..n {
                        m[(i, j)] = rng::complex_gaussian(&mut r, *scale);
                    }
                }
                m
            }
        })
    }
}

/// Study configuration; identical configs give bit-identical reports.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EnsembleConfig {
    pub n: usize,
    pub trials: usize,
    pub seed: u64,
    /// Strictly decreasing positive regularization strengths.
    pub epsilon_grid: Vec<f64>,
    pub base: BaseMatrix,
    /// Determinant probe points; defaults to a single far point.
    #[serde(default = "default_probes")]
    pub probes: Vec<C64>,
}

fn default_probes() -> Vec<C64> {
    vec![C64::new(10.0, 0.0)]
}

impl EnsembleConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::EmptyMatrix);
        }
        if self.trials == 0 {
            return Err(Error::InvalidArgument("trials must be >= 1".into()));
        }
        if self.epsilon_grid.is_empty()
            || self.epsilon_grid.iter().any(|&e| !(e > 0.0))
            || self.epsilon_grid.windows(2).any(|w| w[0] <= w[1])
        {
            return Err(Error::InvalidArgument(
                "epsilon grid must be strictly decreasing and positive".into(),
            ));
        }
        Ok(())
    }
}

/// Ginibre sample: i.i.d. entries N(0, 1/2n) + i N(0, 1/2n), so the expected
/// squared entry modulus is 1/n and the spectrum fills the unit disk.
pub fn sample_ginibre(n: usize, seed: u64) -> OperatorMatrix {
    ginibre_from(&mut rng::stream_rng(seed, 0), n)
}

fn ginibre_from(rng: &mut rand_chacha::ChaCha8Rng, n: usize) -> OperatorMatrix {
    let sigma = (1.0 / (2.0 * n as f64)).sqrt();
    rng::gaussian_matrix(rng, n, sigma)
}

/// Z = x y^-1 for independent Ginibre x, y; y is redrawn in the measure-zero
/// event that it is numerically singular.
pub fn sample_z(n: usize, seed: u64) -> Result<OperatorMatrix> {
    let mut r = rng::stream_rng(seed, 0);
    let x = ginibre_from(&mut r, n);
    for _attempt in 0..3 {
        let y = ginibre_from(&mut r, n);
        let factors = lu(&y);
        let top = factors.max_abs_pivot();
        if factors.min_abs_pivot() > 1e-14 * top.max(1e-300) {
            return solve_right(&x, &y);
        }
    }
    Err(Error::InvalidArgument(
        "Ginibre factor y stayed singular after 3 redraws; RNG fault".into(),
    ))
}

/// T + eps Z with a fresh Z drawn from the seed.
pub fn regularize(t: &OperatorMatrix, epsilon: f64, seed: u64) -> Result<OperatorMatrix> {
    if !(epsilon > 0.0) {
        return Err(Error::InvalidArgument(
            "regularization strength must be positive".into(),
        ));
    }
    let z = sample_z(t.dim(), seed)?;
    Ok(&t.clone() + &z.scale(C64::new(epsilon, 0.0)))
}

/// Per-epsilon statistics of the perturbed Brown measures.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EpsilonReport {
    pub epsilon: f64,
    /// Mean over trials of W1(nu_{T + eps Z}, nu_T).
    pub mean_w1: f64,
    pub max_w1: f64,
    /// Per probe: mean over trials of |Delta(T+epsZ-l) - Delta(T-l)| / Delta(T-l).
    pub determinant_gaps: Vec<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub config: EnsembleConfig,
    pub per_epsilon: Vec<EpsilonReport>,
}

/// Runs the study: for each epsilon, `trials` independent Z draws; the trial
/// streams are derived from (seed, trial) so results are independent of
/// scheduling.
pub fn convergence_study(
    config: &EnsembleConfig,
    tol: &Tolerances,
) -> Result<ConvergenceReport> {
    config.validate()?;
    let base = config.base.realize(config.n, config.seed)?;
    let base_spectrum = eigenvalues(&base)?;
    let base_deltas: Vec<f64> = config
        .probes
        .iter()
        .map(|&p| fk_determinant(&base.shifted(p), tol))
        .collect::<Result<Vec<f64>>>()?;

    let mut per_epsilon = Vec::with_capacity(config.epsilon_grid.len());
    for (eps_index, &epsilon) in config.epsilon_grid.iter().enumerate() {
        let trial_results: Vec<(f64, Vec<f64>)> = (0..config.trials)
            .into_par_iter()
            .map(|trial| -> Result<(f64, Vec<f64>)> {
                // One stream per (epsilon, trial) cell.
                let stream = (eps_index as u64) * (config.trials as u64) + trial as u64 + 1;
                let mut r = rng::stream_rng(config.seed, stream);
                let x = ginibre_from(&mut r, config.n);
                let y = ginibre_from(&mut r, config.n);
                let z = solve_right(&x, &y)?;
                let perturbed = &base + &z.scale(C64::new(epsilon, 0.0));
                let spectrum = eigenvalues(&perturbed)?;
                let w1 = wasserstein1(&spectrum, &base_spectrum);
                let gaps = config
                    .probes
                    .iter()
                    .zip(&base_deltas)
                    .map(|(&p, &d0)| {
                        let d = fk_determinant(&perturbed.shifted(p), tol)?;
                        Ok((d - d0).abs() / d0.max(1e-300))
                    })
                    .collect::<Result<Vec<f64>>>()?;
                Ok((w1, gaps))
            })
            .collect::<Result<Vec<_>>>()?;

        let mean_w1 =
            trial_results.iter().map(|(w, _)| w).sum::<f64>() / config.trials as f64;
        let max_w1 = trial_results
            .iter()
            .map(|(w, _)| *w)
            .fold(0.0, f64::max);
        let determinant_gaps = (0..config.probes.len())
            .map(|p| {
                trial_results.iter().map(|(_, g)| g[p]).sum::<f64>() / config.trials as f64
            })
            .collect();
        per_epsilon.push(EpsilonReport {
            epsilon,
            mean_w1,
            max_w1,
            determinant_gaps,
        });
    }
    Ok(ConvergenceReport {
        config: config.clone(),
        per_epsilon,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ginibre_is_deterministic_under_seed() {
        let a = sample_ginibre(16, 42);
        let b = sample_ginibre(16, 42);
        assert_eq!(a.data(), b.data());
        let c = sample_ginibre(16, 43);
        assert!((&a - &c).fro_norm() > 1e-6);
    }

    #[test]
    fn ginibre_scale_covariance() {
        // Entrywise variance 1/n: the Frobenius norm concentrates near sqrt(n).
        let n = 64;
        let g = sample_ginibre(n, 5);
        let fro = g.fro_norm();
        assert!(
            (fro - (n as f64).sqrt()).abs() < 0.2 * (n as f64).sqrt(),
            "fro {fro}"
        );
    }

    #[test]
    fn sample_z_deterministic_and_finite() {
        let z1 = sample_z(8, 9).unwrap();
        let z2 = sample_z(8, 9).unwrap();
        assert_eq!(z1.data(), z2.data());
        z1.check_finite().unwrap();
    }

    #[test]
    fn regularize_guards_epsilon() {
        let t = OperatorMatrix::zeros(4);
        assert!(regularize(&t, 0.0, 1).is_err());
        let r = regularize(&t, 1.0, 1).unwrap();
        let z = sample_z(4, 1).unwrap();
        assert!((&r - &z).fro_norm() < 1e-15);
    }

    #[test]
    fn study_is_deterministic_and_decreasing_on_a_small_case() {
        let tol = Tolerances::default();
        let config = EnsembleConfig {
            n: 24,
            trials: 6,
            seed: 11,
            epsilon_grid: vec![1e-1, 1e-2, 1e-3],
            base: BaseMatrix::DiagonalClusters {
                centers: vec![C64::new(0.0, 0.0), C64::new(4.0, 0.0)],
            },
            probes: vec![C64::new(10.0, 0.0)],
        };
        let r1 = convergence_study(&config, &tol).unwrap();
        let r2 = convergence_study(&config, &tol).unwrap();
        assert_eq!(
            serde_json::to_string(&r1).unwrap(),
            serde_json::to_string(&r2).unwrap()
        );
        let w1: Vec<f64> = r1.per_epsilon.iter().map(|e| e.mean_w1).collect();
        assert!(w1[0] > w1[1] && w1[1] > w1[2], "w1 series {w1:?}");
        assert!(w1[2] < 0.05);
    }

    #[test]
    fn invalid_configs_rejected() {
        let base = BaseMatrix::JordanBlock {
            lambda: C64::new(0.0, 0.0),
        };
        let bad = EnsembleConfig {
            n: 4,
            trials: 1,
            seed: 0,
            epsilon_grid: vec![1e-3, 1e-2],
            base,
            probes: default_probes(),
        };
        assert!(bad.validate().is_err());
    }
}
