//! JSON-lines and CSV record formats exchanged by the command-line tools.
//!
//! A [`RatioRecord`] is one object: its physical size, the four object-centric
//! keyedge-ratios (`r_ab`, `r_bc`, `r_cd`, `r_da`), optionally the
//! camera-centric view with its allocentric group (an integer), optional
//! per-ratio spreads and the ground truth when known.

use std::io::{BufRead, Write};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{BoxPose3D, Dims, ObjectRatios};
use crate::indexing::CameraCentricRatios;
use crate::uncertainty::RatioSigmas;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruthRecord {
    pub pose: BoxPose3D,
    /// Allocentric angle α.
    pub alpha: f64,
    /// Viewing angle γ.
    pub gamma: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioRecord {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub class_name: Option<String>,
    pub dims: Dims,
    pub ratios: ObjectRatios,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub camera_centric: Option<CameraCentricRatios>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigmas: Option<RatioSigmas>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truth: Option<TruthRecord>,
    /// Set for heavily truncated or occluded labels.
    #[serde(default)]
    pub hard: bool,
}

/// Reads one JSON value per non-blank line.
pub fn read_jsonl<T: DeserializeOwned>(reader: impl BufRead) -> Result<Vec<T>> {
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let value = serde_json::from_str(&line).map_err(|source| Error::Json {
            line: i + 1,
            source,
        })?;
        out.push(value);
    }
    Ok(out)
}

pub fn write_jsonl<T: Serialize>(items: &[T], mut writer: impl Write) -> Result<()> {
    for item in items {
        serde_json::to_writer(&mut writer, item).map_err(|source| Error::Json { line: 0, source })?;
        writer.write_all(b"\n")?;
    }
    writer.flush()?;
    Ok(())
}

/// Flat CSV mirror of [`RatioRecord`].
#[derive(Debug, Serialize)]
struct RatioRow<'a> {
    id: &'a str,
    class_name: Option<&'a str>,
    l: f64,
    w: f64,
    h: f64,
    r_ab: f64,
    r_bc: f64,
    r_cd: f64,
    r_da: f64,
    r21: Option<f64>,
    r41: Option<f64>,
    r32: Option<f64>,
    r34: Option<f64>,
    group: Option<u8>,
    sigma_ab: Option<f64>,
    sigma_bc: Option<f64>,
    sigma_cd: Option<f64>,
    sigma_da: Option<f64>,
    x: Option<f64>,
    y: Option<f64>,
    z: Option<f64>,
    yaw: Option<f64>,
    alpha: Option<f64>,
    gamma: Option<f64>,
    hard: bool,
}

impl<'a> From<&'a RatioRecord> for RatioRow<'a> {
    fn from(r: &'a RatioRecord) -> Self {
        let cc = r.camera_centric.as_ref();
        let sg = r.sigmas.as_ref();
        let truth = r.truth.as_ref();
        RatioRow {
            id: &r.id,
            class_name: r.class_name.as_deref(),
            l: r.dims.l,
            w: r.dims.w,
            h: r.dims.h,
            r_ab: r.ratios.r_ab,
            r_bc: r.ratios.r_bc,
            r_cd: r.ratios.r_cd,
            r_da: r.ratios.r_da,
            r21: cc.map(|c| c.r21),
            r41: cc.map(|c| c.r41),
            r32: cc.map(|c| c.r32),
            r34: cc.map(|c| c.r34),
            group: cc.map(|c| c.group.id()),
            sigma_ab: sg.map(|s| s.r_ab),
            sigma_bc: sg.map(|s| s.r_bc),
            sigma_cd: sg.map(|s| s.r_cd),
            sigma_da: sg.map(|s| s.r_da),
            x: truth.map(|t| t.pose.center.x),
            y: truth.map(|t| t.pose.center.y),
            z: truth.map(|t| t.pose.center.z),
            yaw: truth.map(|t| t.pose.yaw),
            alpha: truth.map(|t| t.alpha),
            gamma: truth.map(|t| t.gamma),
            hard: r.hard,
        }
    }
}

pub fn write_csv(records: &[RatioRecord], writer: impl Write) -> Result<()> {
    let mut csv = csv::Writer::from_writer(writer);
    for record in records {
        csv.serialize(RatioRow::from(record))?;
    }
    csv.flush()?;
    Ok(())
}
