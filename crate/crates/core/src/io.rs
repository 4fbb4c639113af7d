//! Point-cloud file formats: XYZ, ASCII PLY, OFF and the PCLB binary format.
//!
//! PCLB layout: the 4-byte magic `PCLB`, a little-endian `u32` point count,
//! then `count * 3` little-endian IEEE-754 binary32 coordinates.
//!
//! Text writers emit 9 significant digits, which roundtrips binary32 data.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::cloud::{Point, PointCloud};
use crate::error::{Error, Result};

pub const PCLB_MAGIC: &[u8; 4] = b"PCLB";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CloudFormat {
    Xyz,
    Ply,
    Off,
    Pclb,
}

impl CloudFormat {
    pub fn from_path(path: &Path) -> Option<Self> {
        let ext = path.extension()?.to_str()?.to_ascii_lowercase();
        match ext.as_str() {
            "xyz" | "txt" | "pts" => Some(Self::Xyz),
            "ply" => Some(Self::Ply),
            "off" => Some(Self::Off),
            "pclb" => Some(Self::Pclb),
            _ => None,
        }
    }

    pub fn extension(self) -> &'static str {
        match self {
            Self::Xyz => "xyz",
            Self::Ply => "ply",
            Self::Off => "off",
            Self::Pclb => "pclb",
        }
    }
}

impl std::str::FromStr for CloudFormat {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "xyz" => Ok(Self::Xyz),
            "ply" => Ok(Self::Ply),
            "off" => Ok(Self::Off),
            "pclb" => Ok(Self::Pclb),
            other => Err(format!("unknown cloud format `{other}`")),
        }
    }
}

pub fn load_cloud(path: impl AsRef<Path>, format: CloudFormat) -> Result<PointCloud> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    let cloud = decode_cloud(&bytes, format, path)?;
    Ok(cloud.with_source_path(path.to_string_lossy()))
}

/// Loads a cloud, choosing the format from the file extension.
pub fn load_cloud_auto(path: impl AsRef<Path>) -> Result<PointCloud> {
    let path = path.as_ref();
    let format = CloudFormat::from_path(path)
        .ok_or_else(|| Error::parse(path, None, "unrecognized file extension"))?;
    load_cloud(path, format)
}

pub fn save_cloud(cloud: &PointCloud, path: impl AsRef<Path>, format: CloudFormat) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, encode_cloud(cloud, format)).map_err(|e| Error::io(path, e))
}

/// Parses an in-memory file. `origin` is only used in error messages.
pub fn decode_cloud(bytes: &[u8], format: CloudFormat, origin: &Path) -> Result<PointCloud> {
    let points = match format {
        CloudFormat::Pclb => decode_pclb(bytes, origin)?,
        text => {
            let s = std::str::from_utf8(bytes)
                .map_err(|_| Error::parse(origin, None, "file is not valid UTF-8 text"))?;
            match text {
                CloudFormat::Xyz => parse_xyz(s, origin)?,
                CloudFormat::Ply => parse_ply(s, origin)?,
                CloudFormat::Off => parse_off(s, origin)?,
                CloudFormat::Pclb => unreachable!(),
            }
        }
    };
    if points.is_empty() {
        return Err(Error::EmptyCloud);
    }
    PointCloud::new(points).map_err(|e| match e {
        Error::NonFinite { index } => {
            Error::parse(origin, None, format!("point {index} has a non-finite coordinate"))
        }
        other => other,
    })
}

pub fn encode_cloud(cloud: &PointCloud, format: CloudFormat) -> Vec<u8> {
    match format {
        CloudFormat::Pclb => encode_pclb(cloud.points()),
        CloudFormat::Xyz => {
            let mut s = String::new();
            for p in cloud.points() {
                push_point_line(&mut s, p);
            }
            s.into_bytes()
        }
        CloudFormat::Ply => {
            let mut s = format!(
                "ply\nformat ascii 1.0\nelement vertex {}\nproperty float x\nproperty float y\nproperty float z\nend_header\n",
                cloud.len()
            );
            for p in cloud.points() {
                push_point_line(&mut s, p);
            }
            s.into_bytes()
        }
        CloudFormat::Off => {
            let mut s = format!("OFF\n{} 0 0\n", cloud.len());
            for p in cloud.points() {
                push_point_line(&mut s, p);
            }
            s.into_bytes()
        }
    }
}

fn push_point_line(s: &mut String, p: &Point) {
    let _ = writeln!(s, "{} {} {}", fmt_sig9(p[0]), fmt_sig9(p[1]), fmt_sig9(p[2]));
}

/// Formats like C's `%.9g`: 9 significant digits, trailing zeros trimmed.
pub fn fmt_sig9(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    let sci = format!("{v:.8e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent marker");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..9).contains(&exp) {
        let decimals = (8 - exp) as usize;
        trim_zeros(format!("{v:.decimals$}"))
    } else {
        format!("{}e{exp}", trim_zeros(mantissa.to_string()))
    }
}

fn trim_zeros(s: String) -> String {
    if !s.contains('.') {
        return s;
    }
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

fn encode_pclb(points: &[Point]) -> Vec<u8> {
    let mut out = Vec::with_capacity(8 + points.len() * 12);
    out.extend_from_slice(PCLB_MAGIC);
    out.extend_from_slice(&(points.len() as u32).to_le_bytes());
    for p in points {
        for c in p {
            out.extend_from_slice(&(*c as f32).to_le_bytes());
        }
    }
    out
}

fn decode_pclb(bytes: &[u8], origin: &Path) -> Result<Vec<Point>> {
    if bytes.len() < 8 || &bytes[..4] != PCLB_MAGIC {
        return Err(Error::parse(origin, None, "missing PCLB magic"));
    }
    let count = u32::from_le_bytes(bytes[4..8].try_into().unwrap()) as usize;
    let body = &bytes[8..];
    if body.len() != count * 12 {
        return Err(Error::parse(
            origin,
            None,
            format!("expected {} payload bytes for {count} points, found {}", count * 12, body.len()),
        ));
    }
    Ok(body
        .chunks_exact(12)
        .map(|c| {
            let f = |i: usize| f32::from_le_bytes(c[i..i + 4].try_into().unwrap()) as f64;
            [f(0), f(4), f(8)]
        })
        .collect())
}

/// Iterates over non-blank, non-comment lines with 1-based line numbers.
fn content_lines(s: &str) -> impl Iterator<Item = (usize, &str)> {
    s.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn parse_f64(tok: &str, origin: &Path, line: usize) -> Result<f64> {
    tok.parse::<f64>()
        .map_err(|_| Error::parse(origin, Some(line), format!("invalid number `{tok}`")))
}

fn parse_coords(line: &str, origin: &Path, lineno: usize) -> Result<Point> {
    let mut toks = line.split_whitespace();
    let mut p = [0.0; 3];
    for c in &mut p {
        let tok = toks
            .next()
            .ok_or_else(|| Error::parse(origin, Some(lineno), "expected three coordinates"))?;
        *c = parse_f64(tok, origin, lineno)?;
    }
    Ok(p)
}

fn parse_xyz(s: &str, origin: &Path) -> Result<Vec<Point>> {
    // Extra columns (normals, intensities) are ignored.
    content_lines(s)
        .map(|(n, l)| parse_coords(l, origin, n))
        .collect()
}

fn parse_off(s: &str, origin: &Path) -> Result<Vec<Point>> {
    let mut lines = content_lines(s);
    let (n, header) = lines
        .next()
        .ok_or_else(|| Error::parse(origin, None, "missing OFF header"))?;
    let rest = header
        .strip_prefix("OFF")
        .ok_or_else(|| Error::parse(origin, Some(n), "header must start with OFF"))?
        .trim();
    // Some writers glue the counts onto the header line ("OFF1024 2048 0").
    let (counts_line, counts) = if rest.is_empty() {
        lines
            .next()
            .ok_or_else(|| Error::parse(origin, None, "missing OFF counts line"))?
    } else {
        (n, rest)
    };
    let n_vertices: usize = counts
        .split_whitespace()
        .next()
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| Error::parse(origin, Some(counts_line), "invalid vertex count"))?;
    let mut points = Vec::with_capacity(n_vertices);
    for _ in 0..n_vertices {
        let (n, l) = lines.next().ok_or_else(|| {
            Error::parse(origin, None, format!("file ends before {n_vertices} vertices"))
        })?;
        points.push(parse_coords(l, origin, n)?);
    }
    Ok(points)
}

fn parse_ply(s: &str, origin: &Path) -> Result<Vec<Point>> {
    struct Element {
        name: String,
        count: usize,
        props: Vec<String>,
    }

    let mut lines = s.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));
    match lines.next() {
        Some((_, "ply")) => {}
        _ => return Err(Error::parse(origin, Some(1), "missing `ply` magic")),
    }
    let mut elements: Vec<Element> = Vec::new();
    let mut saw_end = false;
    for (n, line) in lines.by_ref() {
        let toks: Vec<&str> = line.split_whitespace().collect();
        match toks.as_slice() {
            [] | ["comment", ..] | ["obj_info", ..] => {}
            ["format", "ascii", _] => {}
            ["format", other, ..] => {
                return Err(Error::parse(origin, Some(n), format!("unsupported PLY format `{other}`")))
            }
            ["element", name, count] => elements.push(Element {
                name: name.to_string(),
                count: count
                    .parse()
                    .map_err(|_| Error::parse(origin, Some(n), "invalid element count"))?,
                props: Vec::new(),
            }),
            ["property", .., name] => elements
                .last_mut()
                .ok_or_else(|| Error::parse(origin, Some(n), "property before element"))?
                .props
                .push(name.to_string()),
            ["end_header"] => {
                saw_end = true;
                break;
            }
            _ => return Err(Error::parse(origin, Some(n), format!("unexpected header line `{line}`"))),
        }
    }
    if !saw_end {
        return Err(Error::parse(origin, None, "missing end_header"));
    }

    let mut body = lines.filter(|(_, l)| !l.is_empty());
    for el in &elements {
        if el.name != "vertex" {
            // Elements before the vertices are skipped line by line; after them, nothing is read.
            for _ in 0..el.count {
                body.next();
            }
            continue;
        }
        let idx = |axis: &str| {
            el.props
                .iter()
                .position(|p| p == axis)
                .ok_or_else(|| Error::parse(origin, None, format!("vertex element lacks `{axis}`")))
        };
        let (ix, iy, iz) = (idx("x")?, idx("y")?, idx("z")?);
        let mut points = Vec::with_capacity(el.count);
        for _ in 0..el.count {
            let (n, l) = body
                .next()
                .ok_or_else(|| Error::parse(origin, None, "file ends before all vertices"))?;
            let toks: Vec<&str> = l.split_whitespace().collect();
            if toks.len() < el.props.len() {
                return Err(Error::parse(origin, Some(n), "vertex line has too few values"));
            }
            points.push([
                parse_f64(toks[ix], origin, n)?,
                parse_f64(toks[iy], origin, n)?,
                parse_f64(toks[iz], origin, n)?,
            ]);
        }
        return Ok(points);
    }
    Err(Error::parse(origin, None, "no vertex element"))
}

/// A cloud file found under a dataset root.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DatasetEntry {
    pub path: PathBuf,
    /// Path relative to the root, `/`-separated.
    pub relative: String,
    pub format: CloudFormat,
    /// Name of the immediate parent directory, if the file is not at the root.
    pub label: Option<String>,
}

/// Lists every supported cloud file below `root`, sorted by relative path.
pub fn scan_dataset(root: impl AsRef<Path>) -> Result<Vec<DatasetEntry>> {
    let root = root.as_ref();
    let mut entries = Vec::new();
    for entry in walkdir::WalkDir::new(root).follow_links(true) {
        let entry = entry.map_err(|e| {
            let path = e.path().unwrap_or(root).to_path_buf();
            Error::io(path, e.into())
        })?;
        if !entry.file_type().is_file() {
            continue;
        }
        let Some(format) = CloudFormat::from_path(entry.path()) else {
            continue;
        };
        let rel = entry.path().strip_prefix(root).unwrap_or(entry.path());
        let relative = rel
            .components()
            .map(|c| c.as_os_str().to_string_lossy().into_owned())
            .collect::<Vec<_>>()
            .join("/");
        let label = rel
            .parent()
            .and_then(|p| p.file_name())
            .map(|s| s.to_string_lossy().into_owned());
        entries.push(DatasetEntry {
            path: entry.path().to_path_buf(),
            relative,
            format,
            label,
        });
    }
    entries.sort_by(|a, b| a.relative.cmp(&b.relative));
    Ok(entries)
}

impl DatasetEntry {
    pub fn load(&self) -> Result<PointCloud> {
        let cloud = load_cloud(&self.path, self.format)?;
        Ok(match &self.label {
            Some(l) => cloud.with_label(l.clone()),
            None => cloud,
        })
    }
}
