//! CSV tables exchanged between commands.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metric::{ErrorCdf, GroupSummary, HoodednessProfile};
use crate::stats::{DiversityReport, ProfileStats};

#[derive(Debug, Serialize, Deserialize)]
struct ProfileRow {
    mesh_id: String,
    t: f64,
    h: f64,
}

#[derive(Debug, Serialize, Deserialize)]
struct CdfRow {
    threshold: f64,
    cumulative_fraction: f64,
}

#[derive(Debug, Serialize, Deserialize)]
struct ErrorRow {
    mesh_id: String,
    error: f64,
}

#[derive(Debug, Serialize, Deserialize)]
struct MetadataRow {
    mesh_id: String,
    group: String,
}

#[derive(Debug, Serialize, Deserialize)]
struct GroupRow {
    group: String,
    mean: f64,
    count: usize,
}

#[derive(Debug, Serialize, Deserialize)]
struct StatsRow {
    t: f64,
    mean: f64,
    std: f64,
}

#[derive(Debug, Serialize, Deserialize)]
struct DiversityCsvRow {
    t: f64,
    mean_a: f64,
    std_a: f64,
    mean_b: f64,
    std_b: f64,
    std_delta: f64,
}

fn write_rows<T: Serialize>(path: &Path, rows: impl IntoIterator<Item = T>) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    let mut w = csv::Writer::from_path(path)?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

fn read_rows<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>> {
    if !path.exists() {
        return Err(Error::FileNotFound(path.to_path_buf()));
    }
    let mut r = csv::Reader::from_path(path)?;
    r.deserialize().map(|row| row.map_err(Error::from)).collect()
}

/// One `mesh_id,t,h` row per sample, profiles in the given order.
pub fn write_profiles(path: impl AsRef<Path>, profiles: &[HoodednessProfile]) -> Result<()> {
    write_rows(
        path.as_ref(),
        profiles.iter().flat_map(|p| {
            p.t_samples.iter().zip(&p.h_values).map(|(&t, &h)| ProfileRow {
                mesh_id: p.mesh_id.clone(),
                t,
                h,
            })
        }),
    )
}

/// Groups rows by `mesh_id` in order of first appearance.
pub fn read_profiles(path: impl AsRef<Path>) -> Result<Vec<HoodednessProfile>> {
    let rows: Vec<ProfileRow> = read_rows(path.as_ref())?;
    let mut order: Vec<String> = Vec::new();
    let mut samples: BTreeMap<String, (Vec<f64>, Vec<f64>)> = BTreeMap::new();
    for row in rows {
        let slot = samples.entry(row.mesh_id.clone()).or_insert_with(|| {
            order.push(row.mesh_id.clone());
            Default::default()
        });
        slot.0.push(row.t);
        slot.1.push(row.h);
    }
    order
        .into_iter()
        .map(|id| {
            let (t, h) = samples.remove(&id).unwrap();
            HoodednessProfile::new(id, t, h)
        })
        .collect()
}

pub fn write_cdf(path: impl AsRef<Path>, cdf: &ErrorCdf) -> Result<()> {
    write_rows(
        path.as_ref(),
        cdf.thresholds
            .iter()
            .zip(&cdf.cumulative_fraction)
            .map(|(&threshold, &cumulative_fraction)| CdfRow {
                threshold,
                cumulative_fraction,
            }),
    )
}

pub fn write_errors(path: impl AsRef<Path>, errors: &BTreeMap<String, f64>) -> Result<()> {
    write_rows(
        path.as_ref(),
        errors.iter().map(|(id, &error)| ErrorRow {
            mesh_id: id.clone(),
            error,
        }),
    )
}

pub fn read_errors(path: impl AsRef<Path>) -> Result<BTreeMap<String, f64>> {
    let rows: Vec<ErrorRow> = read_rows(path.as_ref())?;
    let mut out = BTreeMap::new();
    for row in rows {
        if out.insert(row.mesh_id.clone(), row.error).is_some() {
            return Err(Error::Schema(format!(
                "duplicate mesh_id {} in error table",
                row.mesh_id
            )));
        }
    }
    Ok(out)
}

pub fn read_metadata(path: impl AsRef<Path>) -> Result<BTreeMap<String, String>> {
    let rows: Vec<MetadataRow> = read_rows(path.as_ref())?;
    Ok(rows.into_iter().map(|r| (r.mesh_id, r.group)).collect())
}

pub fn write_groups(path: impl AsRef<Path>, groups: &[GroupSummary]) -> Result<()> {
    write_rows(
        path.as_ref(),
        groups.iter().map(|g| GroupRow {
            group: g.group.clone(),
            mean: g.mean,
            count: g.count,
        }),
    )
}

pub fn write_stats(path: impl AsRef<Path>, stats: &ProfileStats) -> Result<()> {
    write_rows(
        path.as_ref(),
        (0..stats.t_samples.len()).map(|i| StatsRow {
            t: stats.t_samples[i],
            mean: stats.mean[i],
            std: stats.std[i],
        }),
    )
}

pub fn write_diversity(path: impl AsRef<Path>, report: &DiversityReport) -> Result<()> {
    write_rows(
        path.as_ref(),
        report.rows.iter().map(|r| DiversityCsvRow {
            t: r.t,
            mean_a: r.mean_a,
            std_a: r.std_a,
            mean_b: r.mean_b,
            std_b: r.std_b,
            std_delta: r.std_delta,
        }),
    )
}
