//! Full-covariance Gaussian mixtures fitted by EM, and the confusion table
//! of mixture clusters against known sample sources.

use emogen_core::{Error, Result};
use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GmmOptions {
    pub restarts: usize,
    pub max_iters: usize,
    /// Relative log-likelihood change below which EM stops.
    pub tolerance: f64,
    /// Added to every covariance diagonal.
    pub regularization: f64,
    pub seed: u64,
}

impl Default for GmmOptions {
    fn default() -> Self {
        GmmOptions {
            restarts: 5,
            max_iters: 200,
            tolerance: 1e-7,
            regularization: 1e-8,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GmmModel {
    pub weights: Vec<f64>,
    pub means: Vec<Vec<f64>>,
    pub covariances: Vec<Vec<Vec<f64>>>,
    /// Total log-likelihood of the training samples.
    pub log_likelihood: f64,
    /// Log-likelihood before each M-step of the winning restart.
    pub trace: Vec<f64>,
}

struct Component {
    weight: f64,
    mean: DVector<f64>,
    chol: Cholesky<f64, Dyn>,
    log_det: f64,
}

impl Component {
    fn new(weight: f64, mean: DVector<f64>, cov: DMatrix<f64>) -> Option<Self> {
        let chol = cov.cholesky()?;
        let log_det = 2.0 * chol.l().diagonal().iter().map(|v| v.ln()).sum::<f64>();
        log_det.is_finite().then_some(Component {
            weight,
            mean,
            chol,
            log_det,
        })
    }

    fn log_density(&self, x: &DVector<f64>) -> f64 {
        let d = x.len() as f64;
        let diff = x - &self.mean;
        let y = self
            .chol
            .l()
            .solve_lower_triangular(&diff)
            .expect("Cholesky factor is invertible");
        self.weight.ln() - 0.5 * (d * (2.0 * std::f64::consts::PI).ln() + self.log_det + y.norm_squared())
    }
}

fn log_sum_exp(v: &[f64]) -> f64 {
    let m = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + v.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}

impl GmmModel {
    pub fn k(&self) -> usize {
        self.weights.len()
    }

    fn components(&self) -> Result<Vec<Component>> {
        self.weights
            .iter()
            .zip(&self.means)
            .zip(&self.covariances)
            .map(|((&w, m), c)| {
                let d = m.len();
                Component::new(
                    w,
                    DVector::from_column_slice(m),
                    DMatrix::from_fn(d, d, |r, s| c[r][s]),
                )
                .ok_or_else(|| Error::Numerical("mixture covariance is not positive definite".into()))
            })
            .collect()
    }

    /// Log of weight times density for every component.
    pub fn log_joint(&self, x: &[f64]) -> Result<Vec<f64>> {
        let x = DVector::from_column_slice(x);
        Ok(self.components()?.iter().map(|c| c.log_density(&x)).collect())
    }

    /// Most probable component of each sample.
    pub fn predict(&self, samples: &[Vec<f64>]) -> Result<Vec<usize>> {
        let comps = self.components()?;
        Ok(samples
            .iter()
            .map(|s| {
                let x = DVector::from_column_slice(s);
                let scores: Vec<f64> = comps.iter().map(|c| c.log_density(&x)).collect();
                (0..scores.len())
                    .max_by(|&a, &b| scores[a].total_cmp(&scores[b]).then(b.cmp(&a)))
                    .expect("at least one component")
            })
            .collect())
    }
}

fn kmeans_pp(x: &[DVector<f64>], k: usize, rng: &mut ChaCha8Rng) -> Vec<DVector<f64>> {
    let mut centers = vec![x[rng.random_range(0..x.len())].clone()];
    while centers.len() < k {
        let d2: Vec<f64> = x
            .iter()
            .map(|p| centers.iter().map(|c| (p - c).norm_squared()).fold(f64::INFINITY, f64::min))
            .collect();
        let total: f64 = d2.iter().sum();
        if total <= 0.0 {
            centers.push(x[rng.random_range(0..x.len())].clone());
            continue;
        }
        let mut r = rng.random::<f64>() * total;
        let mut pick = x.len() - 1;
        for (i, &d) in d2.iter().enumerate() {
            if r < d {
                pick = i;
                break;
            }
            r -= d;
        }
        centers.push(x[pick].clone());
    }
    centers
}

/// Weighted means and covariances from responsibilities `resp[i][j]`.
fn m_step(x: &[DVector<f64>], resp: &[Vec<f64>], k: usize, reg: f64) -> Option<Vec<Component>> {
    let n = x.len();
    let d = x[0].len();
    (0..k)
        .map(|j| {
            let nk: f64 = resp.iter().map(|r| r[j]).sum();
            if nk < 1e-10 * n as f64 || nk < 1e-300 {
                return None;
            }
            let mut mean = DVector::zeros(d);
            for (xi, r) in x.iter().zip(resp) {
                mean.axpy(r[j], xi, 1.0);
            }
            mean /= nk;
            let mut cov = DMatrix::zeros(d, d);
            for (xi, r) in x.iter().zip(resp) {
                let diff = xi - &mean;
                cov.ger(r[j], &diff, &diff, 1.0);
            }
            cov /= nk;
            for i in 0..d {
                cov[(i, i)] += reg;
            }
            Component::new(nk / n as f64, mean, cov)
        })
        .collect()
}

fn e_step(x: &[DVector<f64>], comps: &[Component]) -> (f64, Vec<Vec<f64>>) {
    let mut total = 0.0;
    let resp = x
        .iter()
        .map(|xi| {
            let lj: Vec<f64> = comps.iter().map(|c| c.log_density(xi)).collect();
            let z = log_sum_exp(&lj);
            total += z;
            lj.iter().map(|l| (l - z).exp()).collect()
        })
        .collect();
    (total, resp)
}

fn fit_once(
    x: &[DVector<f64>],
    k: usize,
    opts: &GmmOptions,
    rng: &mut ChaCha8Rng,
) -> Option<(Vec<Component>, f64, Vec<f64>)> {
    let centers = kmeans_pp(x, k, rng);
    let hard: Vec<Vec<f64>> = x
        .iter()
        .map(|p| {
            let best = (0..k)
                .min_by(|&a, &b| (p - &centers[a]).norm_squared().total_cmp(&(p - &centers[b]).norm_squared()))
                .expect("k >= 1");
            (0..k).map(|j| (j == best) as u8 as f64).collect()
        })
        .collect();
    let mut comps = m_step(x, &hard, k, opts.regularization)?;
    let mut trace = Vec::new();
    let mut prev = f64::NEG_INFINITY;
    for _ in 0..opts.max_iters {
        let (ll, resp) = e_step(x, &comps);
        if !ll.is_finite() {
            return None;
        }
        trace.push(ll);
        if (ll - prev).abs() <= opts.tolerance * ll.abs() {
            return Some((comps, ll, trace));
        }
        prev = ll;
        comps = m_step(x, &resp, k, opts.regularization)?;
    }
    let (ll, _) = e_step(x, &comps);
    trace.push(ll);
    Some((comps, ll, trace))
}

/// Fits a `k`-component mixture, keeping the best of several EM restarts.
/// Restarts that collapse a component are discarded.
pub fn fit_gmm(samples: &[Vec<f64>], k: usize, opts: &GmmOptions) -> Result<GmmModel> {
    if k == 0 {
        return Err(Error::invalid("a mixture needs at least one component"));
    }
    if samples.len() < 10 * k {
        return Err(Error::invalid(format!(
            "{} samples are too few for {k} components (need {})",
            samples.len(),
            10 * k
        )));
    }
    let d = samples[0].len();
    if d == 0 || samples.iter().any(|s| s.len() != d) {
        return Err(Error::invalid("samples must share a non-zero dimension"));
    }
    let x: Vec<DVector<f64>> = samples.iter().map(|s| DVector::from_column_slice(s)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut best: Option<(Vec<Component>, f64, Vec<f64>)> = None;
    for _ in 0..opts.restarts.max(1) {
        if let Some(fit) = fit_once(&x, k, opts, &mut rng) {
            if best.as_ref().is_none_or(|b| fit.1 > b.1) {
                best = Some(fit);
            }
        }
    }
    let (comps, log_likelihood, trace) =
        best.ok_or_else(|| Error::Numerical("every EM restart degenerated".into()))?;
    Ok(GmmModel {
        weights: comps.iter().map(|c| c.weight).collect(),
        means: comps.iter().map(|c| c.mean.iter().copied().collect()).collect(),
        covariances: comps
            .iter()
            .map(|c| {
                let s = c.chol.l() * c.chol.l().transpose();
                (0..d).map(|r| s.row(r).iter().copied().collect()).collect()
            })
            .collect(),
        log_likelihood,
        trace,
    })
}

/// Rows are true sources, columns the cluster named after each source plus
/// a final column for clusters no source claimed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeparabilityTable {
    pub labels: Vec<String>,
    pub counts: Vec<Vec<usize>>,
    /// Source named by each cluster, if any.
    pub cluster_to_source: Vec<Option<usize>>,
}

impl SeparabilityTable {
    pub fn total(&self) -> usize {
        self.counts.iter().flatten().sum()
    }

    pub fn correct(&self) -> usize {
        (0..self.counts.len()).map(|t| self.counts[t][t]).sum()
    }

    /// Fraction of samples assigned to their own source's cluster.
    pub fn accuracy(&self) -> f64 {
        self.correct() as f64 / self.total() as f64
    }
}

/// Names each cluster after the first source whose reference point it
/// claims.
pub fn name_clusters(gmm: &GmmModel, references: &[Vec<f64>]) -> Result<Vec<Option<usize>>> {
    let mut names = vec![None; gmm.k()];
    for (t, label) in gmm.predict(references)?.into_iter().enumerate() {
        if names[label].is_none() {
            names[label] = Some(t);
        }
    }
    Ok(names)
}

pub fn separability_table(
    sets: &[Vec<Vec<f64>>],
    labels: &[String],
    gmm: &GmmModel,
    cluster_to_source: &[Option<usize>],
) -> Result<SeparabilityTable> {
    if labels.len() != sets.len() || cluster_to_source.len() != gmm.k() {
        return Err(Error::invalid("labels and cluster names must match sets and clusters"));
    }
    let s = sets.len();
    let mut counts = vec![vec![0usize; s + 1]; s];
    for (t, set) in sets.iter().enumerate() {
        for c in gmm.predict(set)? {
            counts[t][cluster_to_source[c].unwrap_or(s)] += 1;
        }
    }
    Ok(SeparabilityTable {
        labels: labels.to_vec(),
        counts,
        cluster_to_source: cluster_to_source.to_vec(),
    })
}
