//! Batch generation of low-pass defense datasets with a provenance manifest.
//!
//! `Lpf1` writes the low-passed version of every input cloud; `Lpf2` writes
//! the original and the low-passed version side by side. The directory layout
//! of the input tree is mirrored under the output root.

use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::cloud::PointCloud;
use crate::error::{Error, Result};
use crate::filter::FilterSpec;
use crate::io::{encode_cloud, scan_dataset, CloudFormat, DatasetEntry};
use crate::pipeline::Lowpass;
use crate::rng::{stream_for, Rng};

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DefenseMode {
    Lpf1,
    Lpf2,
}

impl std::str::FromStr for DefenseMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "lpf1" => Ok(Self::Lpf1),
            "lpf2" => Ok(Self::Lpf2),
            other => Err(format!("unknown mode `{other}` (expected lpf1 or lpf2)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DefenseDatasetJob {
    pub input_root: PathBuf,
    pub output_root: PathBuf,
    pub mode: DefenseMode,
    pub filter: FilterSpec,
    pub bandlimit: usize,
    pub n_target: usize,
    pub seed: u64,
    pub format: CloudFormat,
}

impl DefenseDatasetJob {
    pub fn validate(&self) -> Result<Lowpass> {
        if self.n_target == 0 {
            return Err(Error::InvalidSpec("target point count must be at least 1".into()));
        }
        Lowpass::new(self.filter, self.bandlimit)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutputRecord {
    /// Source path relative to the input root.
    pub src: String,
    /// Output path relative to the output root.
    pub dst: String,
    /// `original` or `lowpass` (or another stage name for custom batches).
    pub mode: String,
    /// Hex SHA-256 of the bytes written.
    pub digest: String,
    pub n_points: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FailureRecord {
    pub src: String,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest<J> {
    pub job: J,
    pub outputs: Vec<OutputRecord>,
    pub failures: Vec<FailureRecord>,
}

impl<J: Serialize> Manifest<J> {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("manifest serializes");
        s.push('\n');
        s
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.to_json()).map_err(|e| Error::io(path, e))
    }
}

/// One cloud produced from a source file.
#[derive(Debug, Clone)]
pub struct Derived {
    /// Recorded as the manifest `mode`.
    pub mode: &'static str,
    /// Appended to the source file stem, e.g. `_lp`.
    pub suffix: &'static str,
    pub cloud: PointCloud,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Encodes and writes `cloud`, creating parent directories, and returns the
/// digest of the bytes written.
pub fn write_cloud_file(cloud: &PointCloud, path: &Path, format: CloudFormat) -> Result<String> {
    let bytes = encode_cloud(cloud, format);
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    fs::write(path, &bytes).map_err(|e| Error::io(path, e))?;
    Ok(sha256_hex(&bytes))
}

/// Output path (relative, `/`-separated) for a source file and suffix.
pub fn derived_relative(src_relative: &str, suffix: &str, format: CloudFormat) -> String {
    let (dir, file) = match src_relative.rsplit_once('/') {
        Some((d, f)) => (Some(d), f),
        None => (None, src_relative),
    };
    let stem = file.rsplit_once('.').map_or(file, |(s, _)| s);
    let name = format!("{stem}{suffix}.{}", format.extension());
    match dir {
        Some(d) => format!("{d}/{name}"),
        None => name,
    }
}

/// Runs `transform` over every entry in parallel and writes its products.
///
/// Each entry gets its own random stream derived from `seed` and its relative
/// path. Per-file errors are collected, not propagated. Both lists come back
/// sorted by path.
pub fn process_entries<F>(
    entries: &[DatasetEntry],
    output_root: &Path,
    format: CloudFormat,
    seed: u64,
    transform: F,
) -> (Vec<OutputRecord>, Vec<FailureRecord>)
where
    F: Fn(&PointCloud, &mut Rng) -> Result<Vec<Derived>> + Sync,
{
    let results: Vec<std::result::Result<Vec<OutputRecord>, FailureRecord>> = entries
        .par_iter()
        .map(|entry| {
            let fail = |e: Error| FailureRecord {
                src: entry.relative.clone(),
                error: e.to_string(),
            };
            let cloud = entry.load().map_err(fail)?;
            let mut rng = stream_for(seed, &entry.relative);
            let derived = transform(&cloud, &mut rng).map_err(fail)?;
            derived
                .into_iter()
                .map(|d| {
                    let dst = derived_relative(&entry.relative, d.suffix, format);
                    let digest = write_cloud_file(&d.cloud, &output_root.join(&dst), format).map_err(fail)?;
                    Ok(OutputRecord {
                        src: entry.relative.clone(),
                        dst,
                        mode: d.mode.to_string(),
                        digest,
                        n_points: d.cloud.len(),
                    })
                })
                .collect()
        })
        .collect();

    let mut outputs = Vec::new();
    let mut failures = Vec::new();
    for r in results {
        match r {
            Ok(o) => outputs.extend(o),
            Err(f) => failures.push(f),
        }
    }
    outputs.sort_by(|a, b| a.dst.cmp(&b.dst));
    failures.sort_by(|a, b| a.src.cmp(&b.src));
    (outputs, failures)
}

/// Generates an LPF1 or LPF2 dataset and writes `manifest.json` under the
/// output root. Parallelism comes from the ambient rayon pool.
pub fn make_defense_dataset(job: &DefenseDatasetJob) -> Result<Manifest<DefenseDatasetJob>> {
    let lowpass = job.validate()?;
    let entries = scan_dataset(&job.input_root)?;
    fs::create_dir_all(&job.output_root).map_err(|e| Error::io(&job.output_root, e))?;

    let (outputs, failures) = process_entries(&entries, &job.output_root, job.format, job.seed, |cloud, rng| {
        let low = lowpass.apply_with(cloud, job.n_target, rng)?;
        Ok(match job.mode {
            DefenseMode::Lpf1 => vec![Derived {
                mode: "lowpass",
                suffix: "",
                cloud: low,
            }],
            DefenseMode::Lpf2 => vec![
                Derived {
                    mode: "original",
                    suffix: "_orig",
                    cloud: cloud.clone(),
                },
                Derived {
                    mode: "lowpass",
                    suffix: "_lp",
                    cloud: low,
                },
            ],
        })
    });

    let manifest = Manifest {
        job: job.clone(),
        outputs,
        failures,
    };
    manifest.write(job.output_root.join(MANIFEST_FILE))?;
    Ok(manifest)
}
