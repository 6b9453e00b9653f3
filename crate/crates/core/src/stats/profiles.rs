use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::metric::{t_grid, HoodednessProfile};

/// Per-t mean and population standard deviation over a set of profiles.
#[derive(Clone, Debug, PartialEq)]
pub struct ProfileStats {
    pub t_samples: Vec<f64>,
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

pub fn profile_stats(profiles: &[HoodednessProfile]) -> Result<ProfileStats> {
    let first = profiles.first().ok_or(Error::EmptyInput)?;
    for p in &profiles[1..] {
        first.check_same_samples(p)?;
    }
    let n = profiles.len() as f64;
    let k = first.len();
    let mut mean = vec![0.0; k];
    let mut std = vec![0.0; k];
    for i in 0..k {
        let m = profiles.iter().map(|p| p.h_values[i]).sum::<f64>() / n;
        let var = profiles.iter().map(|p| (p.h_values[i] - m).powi(2)).sum::<f64>() / n;
        mean[i] = m;
        std[i] = var.sqrt();
    }
    Ok(ProfileStats {
        t_samples: first.t_samples.clone(),
        mean,
        std,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct DiversityRow {
    pub t: f64,
    pub mean_a: f64,
    pub std_a: f64,
    pub mean_b: f64,
    pub std_b: f64,
    pub std_delta: f64,
}

/// Side-by-side comparison of two profile populations.
#[derive(Clone, Debug, PartialEq)]
pub struct DiversityReport {
    pub rows: Vec<DiversityRow>,
    /// True when population B has the larger spread at every t.
    pub b_wider_everywhere: bool,
}

pub fn diversity_report(a: &ProfileStats, b: &ProfileStats) -> Result<DiversityReport> {
    if a.t_samples.len() != b.t_samples.len()
        || a.t_samples.iter().zip(&b.t_samples).any(|(x, y)| (x - y).abs() > 1e-12)
    {
        return Err(Error::SampleMismatch(format!(
            "statistics sampled at {} vs {} positions",
            a.t_samples.len(),
            b.t_samples.len()
        )));
    }
    let rows: Vec<DiversityRow> = (0..a.t_samples.len())
        .map(|i| DiversityRow {
            t: a.t_samples[i],
            mean_a: a.mean[i],
            std_a: a.std[i],
            mean_b: b.mean[i],
            std_b: b.std[i],
            std_delta: b.std[i] - a.std[i],
        })
        .collect();
    let b_wider_everywhere = rows.iter().all(|r| r.std_b > r.std_a);
    Ok(DiversityReport {
        rows,
        b_wider_everywhere,
    })
}

/// Stacks profiles sharing one sampling into an N x K matrix.
pub fn profiles_to_matrix(profiles: &[HoodednessProfile]) -> Result<DMatrix<f64>> {
    let first = profiles.first().ok_or(Error::EmptyInput)?;
    for p in &profiles[1..] {
        first.check_same_samples(p)?;
    }
    Ok(DMatrix::from_fn(profiles.len(), first.len(), |r, c| {
        profiles[r].h_values[c]
    }))
}

/// Reads each row of an N x K matrix as a profile on the uniform t grid.
/// Hoodedness is a magnitude, so negative entries (possible in Gaussian
/// samples) are clamped to zero.
pub fn matrix_to_profiles(data: &DMatrix<f64>, id_prefix: &str) -> Result<Vec<HoodednessProfile>> {
    let k = data.ncols();
    if k < 2 {
        return Err(Error::Domain(format!("profiles need >= 2 columns, got {k}")));
    }
    let t = t_grid(k);
    let width = data.nrows().to_string().len().max(4);
    data.row_iter()
        .enumerate()
        .map(|(i, row)| {
            let h = row.iter().map(|x| x.max(0.0)).collect();
            HoodednessProfile::new(format!("{id_prefix}{i:0width$}"), t.clone(), h)
        })
        .collect()
}
