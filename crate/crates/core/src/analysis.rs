//! Where do perturbations live in frequency space?
//!
//! [`dis_coef`] averages, over aligned (original, perturbed) cloud pairs, the
//! per-coefficient relative change `|c_adv - c_org| / max(|c_org|, eps)`.
//! The guard `eps` is `eps_rel` times the RMS of the original cloud's
//! coefficients, chosen per pair.

use std::fmt::Write as _;
use std::path::Path;

use rayon::prelude::*;

use crate::cloud::{center, PointCloud};
use crate::error::{Error, Result};
use crate::grid::build_grid;
use crate::projection::project;
use crate::sht::{ShCoefficients, ShtPlan};

pub const DEFAULT_EPS_REL: f64 = 1e-8;

/// Pair-averaged relative coefficient change, laid out like [`ShCoefficients`].
#[derive(Debug, Clone, PartialEq)]
pub struct DisCoefMap {
    bandlimit: usize,
    dis: Vec<f64>,
    n_pairs: usize,
    eps_rel: f64,
}

impl DisCoefMap {
    pub fn bandlimit(&self) -> usize {
        self.bandlimit
    }

    pub fn n_pairs(&self) -> usize {
        self.n_pairs
    }

    /// Relative guard factor; the absolute guard for a pair is this times the
    /// RMS of that pair's original coefficients.
    pub fn eps_rel(&self) -> f64 {
        self.eps_rel
    }

    pub fn get(&self, l: usize, m: i64) -> f64 {
        self.dis[ShCoefficients::index(l, m)]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.dis
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, i64, f64)> + '_ {
        (0..=self.bandlimit)
            .flat_map(move |l| (-(l as i64)..=l as i64).map(move |m| (l, m, self.get(l, m))))
    }

    /// Mean over all coefficients whose degree lies in `degrees`.
    pub fn band_mean(&self, degrees: impl IntoIterator<Item = usize>) -> f64 {
        let (mut sum, mut n) = (0.0, 0usize);
        for l in degrees.into_iter().filter(|&l| l <= self.bandlimit) {
            for m in -(l as i64)..=l as i64 {
                sum += self.get(l, m);
                n += 1;
            }
        }
        if n == 0 {
            0.0
        } else {
            sum / n as f64
        }
    }

    /// CSV with a `#` header line carrying `bandlimit`, `n_pairs` and `eps_rel`,
    /// then `l,m,dis` rows ordered by `l`, then `m`.
    pub fn to_csv(&self) -> String {
        let mut s = format!(
            "# bandlimit={} n_pairs={} eps_rel={}\nl,m,dis\n",
            self.bandlimit, self.n_pairs, self.eps_rel
        );
        for (l, m, d) in self.iter() {
            let _ = writeln!(s, "{l},{m},{d}");
        }
        s
    }

    pub fn from_csv(text: &str, origin: &Path) -> Result<Self> {
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
        let (n, header) = lines
            .next()
            .ok_or_else(|| Error::parse(origin, None, "empty triangle file"))?;
        let mut bandlimit = None;
        let mut n_pairs = None;
        let mut eps_rel = None;
        for tok in header.trim_start_matches('#').split_whitespace() {
            let (key, val) = tok
                .split_once('=')
                .ok_or_else(|| Error::parse(origin, Some(n), format!("bad header field `{tok}`")))?;
            let bad = || Error::parse(origin, Some(n), format!("bad value for `{key}`"));
            match key {
                "bandlimit" => bandlimit = Some(val.parse::<usize>().map_err(|_| bad())?),
                "n_pairs" => n_pairs = Some(val.parse::<usize>().map_err(|_| bad())?),
                "eps_rel" => eps_rel = Some(val.parse::<f64>().map_err(|_| bad())?),
                _ => {}
            }
        }
        let (bandlimit, n_pairs, eps_rel) = match (bandlimit, n_pairs, eps_rel) {
            (Some(a), Some(b), Some(c)) => (a, b, c),
            _ => return Err(Error::parse(origin, Some(n), "incomplete header")),
        };
        match lines.next() {
            Some((_, "l,m,dis")) => {}
            other => return Err(Error::parse(origin, other.map(|o| o.0), "expected `l,m,dis`")),
        }
        let mut dis = vec![f64::NAN; (bandlimit + 1) * (bandlimit + 1)];
        let mut seen = 0usize;
        for (n, line) in lines.filter(|(_, l)| !l.trim().is_empty()) {
            let bad = || Error::parse(origin, Some(n), format!("bad row `{line}`"));
            let mut f = line.split(',');
            let l: usize = f.next().and_then(|v| v.parse().ok()).ok_or_else(bad)?;
            let m: i64 = f.next().and_then(|v| v.parse().ok()).ok_or_else(bad)?;
            let d: f64 = f.next().and_then(|v| v.parse().ok()).ok_or_else(bad)?;
            if l > bandlimit || m.unsigned_abs() as usize > l {
                return Err(bad());
            }
            dis[ShCoefficients::index(l, m)] = d;
            seen += 1;
        }
        if seen != dis.len() || dis.iter().any(|d| d.is_nan()) {
            return Err(Error::parse(origin, None, "triangle is incomplete"));
        }
        Ok(Self {
            bandlimit,
            dis,
            n_pairs,
            eps_rel,
        })
    }
}

pub fn export_triangle(map: &DisCoefMap, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, map.to_csv()).map_err(|e| Error::io(path, e))
}

pub fn read_triangle(path: impl AsRef<Path>) -> Result<DisCoefMap> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    DisCoefMap::from_csv(&text, path)
}

/// Harmonic coefficients of a cloud about its own centroid.
pub fn cloud_coefficients(cloud: &PointCloud, plan: &ShtPlan) -> Result<ShCoefficients> {
    let (centered, _) = center(cloud)?;
    plan.forward(&project(&centered, plan.grid())?)
}

/// Coefficients for each aligned pair, computed in parallel.
pub fn pair_coefficients(
    originals: &[PointCloud],
    adversarials: &[PointCloud],
    bandlimit: usize,
) -> Result<Vec<(ShCoefficients, ShCoefficients)>> {
    if originals.len() != adversarials.len() {
        return Err(Error::LengthMismatch {
            originals: originals.len(),
            adversarials: adversarials.len(),
        });
    }
    if originals.is_empty() {
        return Err(Error::EmptySet);
    }
    let plan = ShtPlan::new(build_grid(bandlimit)?);
    originals
        .par_iter()
        .zip(adversarials)
        .map(|(o, a)| Ok((cloud_coefficients(o, &plan)?, cloud_coefficients(a, &plan)?)))
        .collect()
}

pub fn dis_coef(
    originals: &[PointCloud],
    adversarials: &[PointCloud],
    bandlimit: usize,
    eps_rel: f64,
) -> Result<DisCoefMap> {
    let pairs = pair_coefficients(originals, adversarials, bandlimit)?;
    dis_coef_from_coeffs(&pairs, eps_rel)
}

/// Coefficient-level entry point: pairs are `(original, adversarial)`.
pub fn dis_coef_from_coeffs(pairs: &[(ShCoefficients, ShCoefficients)], eps_rel: f64) -> Result<DisCoefMap> {
    let Some((first, _)) = pairs.first() else {
        return Err(Error::EmptySet);
    };
    if !(eps_rel.is_finite() && eps_rel >= 0.0) {
        return Err(Error::InvalidSpec(format!("eps must be >= 0, got {eps_rel}")));
    }
    let bandlimit = first.bandlimit();
    for (o, a) in pairs {
        for c in [o, a] {
            if c.bandlimit() != bandlimit {
                return Err(Error::BandlimitMismatch(bandlimit, c.bandlimit()));
            }
        }
    }
    let per_pair: Vec<Vec<f64>> = pairs
        .par_iter()
        .map(|(o, a)| {
            let rms = (o.norm_sqr() / o.as_slice().len() as f64).sqrt();
            let eps = (eps_rel * rms).max(f64::MIN_POSITIVE);
            o.as_slice()
                .iter()
                .zip(a.as_slice())
                .map(|(co, ca)| (ca - co).abs() / co.abs().max(eps))
                .collect()
        })
        .collect();
    let n = pairs.len() as f64;
    let mut dis = vec![0.0; first.as_slice().len()];
    for terms in &per_pair {
        for (d, t) in dis.iter_mut().zip(terms) {
            *d += t;
        }
    }
    for d in &mut dis {
        *d /= n;
    }
    Ok(DisCoefMap {
        bandlimit,
        dis,
        n_pairs: pairs.len(),
        eps_rel,
    })
}

/// Per-degree absolute difference `sum_m |a(l, m) - b(l, m)|`.
pub fn spectrum_delta(a: &ShCoefficients, b: &ShCoefficients) -> Result<Vec<f64>> {
    if a.bandlimit() != b.bandlimit() {
        return Err(Error::BandlimitMismatch(a.bandlimit(), b.bandlimit()));
    }
    Ok((0..=a.bandlimit())
        .map(|l| {
            (-(l as i64)..=l as i64)
                .map(|m| (a.get(l, m) - b.get(l, m)).abs())
                .sum()
        })
        .collect())
}

/// Pair-averaged [`spectrum_delta`] of `(original, adversarial)` pairs.
pub fn mean_spectrum_delta(pairs: &[(ShCoefficients, ShCoefficients)]) -> Result<Vec<f64>> {
    let Some((first, _)) = pairs.first() else {
        return Err(Error::EmptySet);
    };
    let mut acc = vec![0.0; first.bandlimit() + 1];
    for (o, a) in pairs {
        for (s, d) in acc.iter_mut().zip(spectrum_delta(a, o)?) {
            *s += d;
        }
    }
    let n = pairs.len() as f64;
    Ok(acc.into_iter().map(|s| s / n).collect())
}

/// CSV `l,delta`.
pub fn marginal_csv(delta: &[f64]) -> String {
    let mut s = String::from("l,delta\n");
    for (l, d) in delta.iter().enumerate() {
        let _ = writeln!(s, "{l},{d}");
    }
    s
}

pub fn export_marginal(delta: &[f64], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, marginal_csv(delta)).map_err(|e| Error::io(path, e))
}
