//! Exit-status plumbing and the shared single-file / directory driver.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::anyhow;
use lpf_core::dataset::{process_entries, write_cloud_file, Derived, FailureRecord, Manifest, OutputRecord, MANIFEST_FILE};
use lpf_core::io::{scan_dataset, CloudFormat};
use lpf_core::rng::{stream_for, Rng};
use lpf_core::{load_cloud, PointCloud};
use serde::Serialize;

pub const EXIT_PARTIAL: u8 = 2;
pub const EXIT_USAGE: u8 = 64;
pub const EXIT_IO: u8 = 74;

pub enum Status {
    Done,
    /// Some inputs failed; the manifest lists them.
    Partial,
}

impl Status {
    pub fn from_failures(failures: &[FailureRecord]) -> Self {
        if failures.is_empty() {
            Status::Done
        } else {
            Status::Partial
        }
    }
}

pub enum Failure {
    Usage(anyhow::Error),
    Io(anyhow::Error),
}

impl Failure {
    pub fn usage(msg: impl std::fmt::Display) -> Self {
        Failure::Usage(anyhow!("{msg}"))
    }

    pub fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => EXIT_USAGE,
            Failure::Io(_) => EXIT_IO,
        }
    }

    pub fn error(&self) -> &anyhow::Error {
        match self {
            Failure::Usage(e) | Failure::Io(e) => e,
        }
    }
}

impl From<lpf_core::Error> for Failure {
    fn from(e: lpf_core::Error) -> Self {
        match e {
            lpf_core::Error::Io { .. } | lpf_core::Error::Parse { .. } => Failure::Io(e.into()),
            _ => Failure::Usage(e.into()),
        }
    }
}

/// `<out>.manifest.json` next to a single output file.
pub fn sidecar_manifest(output: &Path) -> PathBuf {
    let mut name = OsString::from(output.as_os_str());
    name.push(".manifest.json");
    PathBuf::from(name)
}

/// Fails with an IO status when `input` does not exist.
pub fn require_exists(input: &Path) -> Result<(), Failure> {
    if input.exists() {
        Ok(())
    } else {
        Err(Failure::Io(anyhow!("input {} does not exist", input.display())))
    }
}

/// Runs `transform` on one file or on every cloud below a directory, writes
/// the results and a manifest, and reports whether anything failed.
///
/// Directory inputs mirror their layout under `output`. Each input draws from
/// its own stream, `seed` mixed with its relative path (the file name for a
/// single file), so a file gets the same result either way.
pub fn run_clouds<J, F>(
    input: &Path,
    output: &Path,
    format: Option<CloudFormat>,
    seed: u64,
    mode: &'static str,
    job: &J,
    transform: F,
) -> Result<Status, Failure>
where
    J: Serialize,
    F: Fn(&PointCloud, &mut Rng) -> lpf_core::Result<PointCloud> + Sync,
{
    require_exists(input)?;
    if input.is_dir() {
        let entries = scan_dataset(input)?;
        if entries.is_empty() {
            return Err(Failure::usage(format!("no cloud files under {}", input.display())));
        }
        let format = format.unwrap_or(CloudFormat::Pclb);
        fs::create_dir_all(output).map_err(|e| Failure::Io(anyhow!("creating {}: {e}", output.display())))?;
        let (outputs, failures) = process_entries(&entries, output, format, seed, |cloud, rng| {
            Ok(vec![Derived {
                mode,
                suffix: "",
                cloud: transform(cloud, rng)?,
            }])
        });
        log::info!("{} clouds written, {} failed", outputs.len(), failures.len());
        let status = Status::from_failures(&failures);
        Manifest { job, outputs, failures }.write(output.join(MANIFEST_FILE))?;
        return Ok(status);
    }

    let in_format = CloudFormat::from_path(input)
        .ok_or_else(|| Failure::usage(format!("cannot tell the format of {}", input.display())))?;
    let out_format = match format.or_else(|| CloudFormat::from_path(output)) {
        Some(f) => f,
        None => return Err(Failure::usage(format!("cannot tell the format of {}; pass --format", output.display()))),
    };
    let relative = input
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default();

    let cloud = load_cloud(input, in_format)?;
    let mut outputs = Vec::new();
    let mut failures = Vec::new();
    match transform(&cloud, &mut stream_for(seed, &relative)) {
        Ok(out) => {
            let digest = write_cloud_file(&out, output, out_format)?;
            outputs.push(OutputRecord {
                src: relative,
                dst: output.to_string_lossy().into_owned(),
                mode: mode.to_string(),
                digest,
                n_points: out.len(),
            });
        }
        Err(e) => failures.push(FailureRecord {
            src: relative,
            error: e.to_string(),
        }),
    }
    for f in &failures {
        eprintln!("failed: {}: {}", f.src, f.error);
    }
    let status = Status::from_failures(&failures);
    Manifest { job, outputs, failures }.write(sidecar_manifest(output))?;
    Ok(status)
}
