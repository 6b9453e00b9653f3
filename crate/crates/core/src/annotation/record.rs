use chrono::{DateTime, SecondsFormat, Utc};
use serde::{Deserialize, Serialize};

use crate::blend::SharpenParams;
use crate::error::{Error, Result};

/// The five annotation sliders.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SliderParams {
    pub u_global: f64,
    pub u_inner: f64,
    pub u_outer: f64,
    pub sharpen_strength: f64,
    pub sharpen_orientation_deg: f64,
}

impl Default for SliderParams {
    fn default() -> Self {
        Self {
            u_global: 0.5,
            u_inner: 0.5,
            u_outer: 0.5,
            sharpen_strength: 0.0,
            sharpen_orientation_deg: 0.0,
        }
    }
}

impl SliderParams {
    pub fn new(u_global: f64, u_inner: f64, u_outer: f64, sharpen_strength: f64, sharpen_orientation_deg: f64) -> Self {
        Self {
            u_global,
            u_inner,
            u_outer,
            sharpen_strength,
            sharpen_orientation_deg,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, value) in [
            ("u_global", self.u_global),
            ("u_inner", self.u_inner),
            ("u_outer", self.u_outer),
            ("sharpen_strength", self.sharpen_strength),
        ] {
            if !(0.0..=1.0).contains(&value) {
                return Err(Error::Domain(format!("{name} = {value} outside [0, 1]")));
            }
        }
        if !(-90.0..=90.0).contains(&self.sharpen_orientation_deg) {
            return Err(Error::Domain(format!(
                "sharpen_orientation_deg = {} outside [-90, 90]",
                self.sharpen_orientation_deg
            )));
        }
        Ok(())
    }

    pub fn sharpen(&self) -> SharpenParams {
        SharpenParams {
            strength: self.sharpen_strength,
            orientation_deg: self.sharpen_orientation_deg,
        }
    }
}

/// One human judgment for one scan.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnnotationRecord {
    pub scan_id: String,
    #[serde(flatten)]
    pub sliders: SliderParams,
    pub annotator: String,
    /// RFC 3339 / ISO-8601 time of the judgment.
    pub timestamp: String,
}

impl AnnotationRecord {
    pub fn new(scan_id: impl Into<String>, sliders: SliderParams, annotator: impl Into<String>) -> Self {
        Self {
            scan_id: scan_id.into(),
            sliders,
            annotator: annotator.into(),
            timestamp: now_timestamp(),
        }
    }

    /// Range and format checks. Slider problems surface as validation
    /// errors here since the record came from outside.
    pub fn validate(&self) -> Result<()> {
        if self.scan_id.is_empty() {
            return Err(Error::Validation("scan_id is empty".into()));
        }
        self.sliders.validate().map_err(|e| Error::Validation(e.to_string()))?;
        DateTime::parse_from_rfc3339(&self.timestamp)
            .map_err(|e| Error::Validation(format!("timestamp {:?} is not ISO-8601: {e}", self.timestamp)))?;
        Ok(())
    }
}

pub fn now_timestamp() -> String {
    Utc::now().to_rfc3339_opts(SecondsFormat::Millis, true)
}
