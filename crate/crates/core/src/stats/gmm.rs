use std::f64::consts::PI;
use std::fs;
use std::path::Path;

use nalgebra::DMatrix;
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const VARIANCE_FLOOR: f64 = 1e-8;
pub const MAX_ITERATIONS: usize = 500;
/// EM stops once the total log-likelihood improves by less than this.
pub const CONVERGENCE_TOLERANCE: f64 = 1e-6;

/// Gaussian mixture with diagonal covariances.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Gmm {
    pub k: usize,
    pub dimension: usize,
    pub weights: Vec<f64>,
    pub means: Vec<Vec<f64>>,
    pub variances: Vec<Vec<f64>>,
}

/// A fitted model together with the log-likelihood after every E-step.
#[derive(Clone, Debug)]
pub struct GmmFit {
    pub model: Gmm,
    pub log_likelihood_trace: Vec<f64>,
    pub converged: bool,
}

impl GmmFit {
    pub fn iterations(&self) -> usize {
        self.log_likelihood_trace.len()
    }
}

impl Gmm {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvariantViolation(msg));
        if self.k == 0 || self.dimension == 0 {
            return bad("mixture needs k >= 1 and dimension >= 1".into());
        }
        if self.weights.len() != self.k || self.means.len() != self.k || self.variances.len() != self.k {
            return bad(format!("expected {} components", self.k));
        }
        if self
            .means
            .iter()
            .chain(&self.variances)
            .any(|row| row.len() != self.dimension)
        {
            return bad(format!("component vectors must have dimension {}", self.dimension));
        }
        if self.weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
            return bad("weights must be finite and non-negative".into());
        }
        let total: f64 = self.weights.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return bad(format!("weights sum to {total}, expected 1"));
        }
        if self.means.iter().flatten().any(|m| !m.is_finite()) {
            return bad("means must be finite".into());
        }
        if self
            .variances
            .iter()
            .flatten()
            .any(|v| !(v.is_finite() && *v >= VARIANCE_FLOOR))
        {
            return bad(format!("variances must be finite and >= {VARIANCE_FLOOR}"));
        }
        Ok(())
    }

    fn log_density(&self, j: usize, x: &[f64]) -> f64 {
        let mut acc = 0.0;
        for ((xi, mu), var) in x.iter().zip(&self.means[j]).zip(&self.variances[j]) {
            let d = xi - mu;
            acc += -0.5 * ((2.0 * PI * var).ln() + d * d / var);
        }
        acc
    }

    /// Responsibilities of every component for `x` (written into `resp`),
    /// returning `log p(x)`.
    fn responsibilities(&self, x: &[f64], resp: &mut [f64]) -> f64 {
        for (j, r) in resp.iter_mut().enumerate() {
            *r = self.weights[j].ln() + self.log_density(j, x);
        }
        let max = resp.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let sum: f64 = resp.iter().map(|l| (l - max).exp()).sum();
        let lse = max + sum.ln();
        for r in resp.iter_mut() {
            *r = (*r - lse).exp();
        }
        lse
    }

    /// Total log-likelihood of the rows of `data`.
    pub fn log_likelihood(&self, data: &DMatrix<f64>) -> f64 {
        let mut resp = vec![0.0; self.k];
        rows(data).iter().map(|x| self.responsibilities(x, &mut resp)).sum()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("mixture serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let g: Gmm = serde_json::from_str(text).map_err(|e| Error::Schema(e.to_string()))?;
        g.validate()?;
        Ok(g)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        Self::from_json(&fs::read_to_string(path).map_err(|e| Error::io(path, e))?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.to_json() + "\n").map_err(|e| Error::io(path, e))
    }
}

fn rows(data: &DMatrix<f64>) -> Vec<Vec<f64>> {
    data.row_iter().map(|r| r.iter().copied().collect()).collect()
}

fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// k-means++ seeding: first center uniform, later centers drawn with
/// probability proportional to squared distance from the nearest center.
fn seed_centers(points: &[Vec<f64>], k: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let mut centers = vec![points[rng.random_range(0..points.len())].clone()];
    let mut nearest: Vec<f64> = points.iter().map(|p| squared_distance(p, &centers[0])).collect();
    while centers.len() < k {
        let next = match WeightedIndex::new(&nearest) {
            Ok(dist) => dist.sample(rng),
            // every point already sits on a center
            Err(_) => rng.random_range(0..points.len()),
        };
        let c = points[next].clone();
        for (d, p) in nearest.iter_mut().zip(points) {
            *d = d.min(squared_distance(p, &c));
        }
        centers.push(c);
    }
    centers
}

/// Fits a `k`-component diagonal mixture to the rows of `data` by
/// expectation-maximization. Deterministic for a fixed `seed`.
pub fn gmm_fit(data: &DMatrix<f64>, k: usize, seed: u64) -> Result<GmmFit> {
    let (n, d) = data.shape();
    if k == 0 || d == 0 || n == 0 {
        return Err(Error::Domain(format!(
            "need k >= 1 and a non-empty matrix, got k = {k}, {n} x {d}"
        )));
    }
    if k > n {
        return Err(Error::Domain(format!("k = {k} exceeds the {n} data rows")));
    }
    if data.iter().any(|x| !x.is_finite()) {
        return Err(Error::Domain("data contains non-finite values".into()));
    }
    let points = rows(data);

    let mut global_var = Vec::with_capacity(d);
    for (dim, col) in data.column_iter().enumerate() {
        let mean = col.mean();
        global_var.push((col.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n as f64).max(VARIANCE_FLOOR));
        if k > 1 && col.max() == col.min() {
            return Err(Error::DegenerateData(format!(
                "dimension {dim} has zero spread; cannot separate {k} components"
            )));
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut model = Gmm {
        k,
        dimension: d,
        weights: vec![1.0 / k as f64; k],
        means: seed_centers(&points, k, &mut rng),
        variances: vec![global_var; k],
    };

    let mut trace = Vec::new();
    let mut converged = false;
    let mut resp = vec![vec![0.0; k]; n];
    loop {
        let ll: f64 = points
            .iter()
            .zip(resp.iter_mut())
            .map(|(x, r)| model.responsibilities(x, r))
            .sum();
        if let Some(&prev) = trace.last() {
            if ll - prev < CONVERGENCE_TOLERANCE {
                converged = true;
            }
        }
        trace.push(ll);
        if converged || trace.len() >= MAX_ITERATIONS {
            break;
        }
        maximize(&mut model, &points, &resp);
    }
    log::debug!(
        "gmm fit: k = {k}, {} iterations, log-likelihood {:.6}",
        trace.len(),
        trace.last().unwrap()
    );
    Ok(GmmFit {
        model,
        log_likelihood_trace: trace,
        converged,
    })
}

fn maximize(model: &mut Gmm, points: &[Vec<f64>], resp: &[Vec<f64>]) {
    let n = points.len() as f64;
    let d = model.dimension;
    for j in 0..model.k {
        let mass: f64 = resp.iter().map(|r| r[j]).sum();
        if mass <= f64::MIN_POSITIVE {
            // starved component: drop its weight, keep its shape
            model.weights[j] = 0.0;
            continue;
        }
        model.weights[j] = mass / n;
        let mut mean = vec![0.0; d];
        for (x, r) in points.iter().zip(resp) {
            for (m, xi) in mean.iter_mut().zip(x) {
                *m += r[j] * xi;
            }
        }
        mean.iter_mut().for_each(|m| *m /= mass);
        let mut var = vec![0.0; d];
        for (x, r) in points.iter().zip(resp) {
            for ((v, xi), m) in var.iter_mut().zip(x).zip(&mean) {
                *v += r[j] * (xi - m) * (xi - m);
            }
        }
        var.iter_mut().for_each(|v| *v = (*v / mass).max(VARIANCE_FLOOR));
        model.means[j] = mean;
        model.variances[j] = var;
    }
    let total: f64 = model.weights.iter().sum();
    model.weights.iter_mut().for_each(|w| *w /= total);
}

/// Draws `n` rows from the mixture, returning the component of each row.
pub fn gmm_sample_labeled(model: &Gmm, n: usize, seed: u64) -> Result<(DMatrix<f64>, Vec<usize>)> {
    if n < 1 {
        return Err(Error::Domain("sample count must be at least 1".into()));
    }
    model.validate()?;
    let pick =
        WeightedIndex::new(&model.weights).map_err(|e| Error::InvariantViolation(format!("mixture weights: {e}")))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = DMatrix::zeros(n, model.dimension);
    let mut labels = Vec::with_capacity(n);
    for i in 0..n {
        let j = pick.sample(&mut rng);
        for dim in 0..model.dimension {
            let z: f64 = rng.sample(StandardNormal);
            out[(i, dim)] = model.means[j][dim] + model.variances[j][dim].sqrt() * z;
        }
        labels.push(j);
    }
    Ok((out, labels))
}

pub fn gmm_sample(model: &Gmm, n: usize, seed: u64) -> Result<DMatrix<f64>> {
    gmm_sample_labeled(model, n, seed).map(|(m, _)| m)
}
