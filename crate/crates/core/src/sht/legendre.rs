//! Orthonormalized associated Legendre functions.
//!
//! `Pbar(l, m, x) = sqrt((2l+1)/(4 pi) * (l-m)!/(l+m)!) * P(l, m, x)` without the
//! Condon-Shortley phase, generated by the usual sectoral seed followed by the
//! three-term recurrence in `l`. No factorials are formed, so the values stay
//! finite up to the grid's bandlimit cap.

use std::f64::consts::PI;

/// Index of `(l, m)`, `0 <= m <= l`, in a lower-triangular table.
#[inline]
pub fn tri_index(l: usize, m: usize) -> usize {
    l * (l + 1) / 2 + m
}

/// `Pbar(m, m)` at `sin_theta`.
#[inline]
fn sectoral(m: usize, sin_theta: f64) -> f64 {
    let mut p = (0.25 / PI).sqrt();
    for i in 1..=m {
        let fi = i as f64;
        p *= ((2.0 * fi + 1.0) / (2.0 * fi)).sqrt() * sin_theta;
    }
    p
}

/// Writes `Pbar(l, m)` for `l = m..=lmax` into `out[l - m]`.
pub fn column(m: usize, lmax: usize, cos_theta: f64, sin_theta: f64, out: &mut Vec<f64>) {
    out.clear();
    if m > lmax {
        return;
    }
    let pmm = sectoral(m, sin_theta);
    out.push(pmm);
    if m == lmax {
        return;
    }
    let fm = m as f64;
    out.push((2.0 * fm + 3.0).sqrt() * cos_theta * pmm);
    for l in m + 2..=lmax {
        let fl = l as f64;
        let a = ((4.0 * fl * fl - 1.0) / (fl * fl - fm * fm)).sqrt();
        let lm1 = fl - 1.0;
        let b = ((lm1 * lm1 - fm * fm) / (4.0 * lm1 * lm1 - 1.0)).sqrt();
        let n = out.len();
        out.push(a * (cos_theta * out[n - 1] - b * out[n - 2]));
    }
}

/// Full triangle `Pbar(l, m)` for `0 <= m <= l <= lmax`, indexed by [`tri_index`].
pub fn triangle(lmax: usize, theta: f64) -> Vec<f64> {
    let (s, c) = theta.sin_cos();
    let mut out = vec![0.0; tri_index(lmax, lmax) + 1];
    let mut col = Vec::with_capacity(lmax + 1);
    for m in 0..=lmax {
        column(m, lmax, c, s, &mut col);
        for (i, v) in col.iter().enumerate() {
            out[tri_index(m + i, m)] = *v;
        }
    }
    out
}
