//! Berry curvature on a polar momentum grid and the half / bulk-difference
//! invariants of the four-band symbol.

use crate::bulkspectra::{band_vector, half_invariant_closed_form, smooth_eigenvector};
use crate::cmat::vdot;
use crate::model::{ModelError, ModelParams, Stacking};
use crate::par;
use num_complex::Complex64 as C64;
use std::f64::consts::PI;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum InvariantError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("degenerate projector near xi=({0:.4}, {1:.4})")]
    Degenerate(f64, f64),
    #[error("invalid grid: {0}")]
    Grid(String),
}

/// Per-plaquette Berry phases on a polar grid of `nr × nt` cells over the
/// disk of radius `radius`. Cell `(i, j)` spans `[r_i, r_{i+1}] × [θ_j, θ_{j+1}]`.
#[derive(Clone, Debug)]
pub struct CurvatureField {
    pub radius: f64,
    pub nr: usize,
    pub nt: usize,
    /// Row-major `[i * nt + j]`.
    pub phases: Vec<f64>,
}

impl CurvatureField {
    pub fn total(&self) -> f64 {
        // ring partials summed in fixed order
        let rings: Vec<f64> = self
            .phases
            .chunks(self.nt)
            .map(|r| r.iter().fold(0.0, |a, b| a + b))
            .collect();
        par::ordered_sum(&rings)
    }

    pub fn cell_center(&self, i: usize, j: usize) -> (f64, f64) {
        let dr = self.radius / self.nr as f64;
        let dt = 2.0 * PI / self.nt as f64;
        let r = (i as f64 + 0.5) * dr;
        let t = (j as f64 + 0.5) * dt;
        (r * t.cos(), r * t.sin())
    }

    pub fn cell_area(&self, i: usize) -> f64 {
        let dr = self.radius / self.nr as f64;
        let (a, b) = (i as f64 * dr, (i + 1) as f64 * dr);
        0.5 * (b * b - a * a) * 2.0 * PI / self.nt as f64
    }

    /// Fraction of `Σ|F|` carried by cells with centre radius in `(r0, r1)`.
    pub fn fraction_in_annulus(&self, r0: f64, r1: f64) -> f64 {
        let dr = self.radius / self.nr as f64;
        let (mut inside, mut all) = (0.0, 0.0);
        for (i, ring) in self.phases.chunks(self.nt).enumerate() {
            let r = (i as f64 + 0.5) * dr;
            let s: f64 = ring.iter().map(|v| v.abs()).sum();
            all += s;
            if r > r0 && r < r1 {
                inside += s;
            }
        }
        inside / all
    }

    /// `(ξ1, ξ2, density)` rows, density = phase / cell area.
    pub fn density_rows(&self) -> Vec<[f64; 3]> {
        let mut out = Vec::with_capacity(self.phases.len());
        for i in 0..self.nr {
            let a = self.cell_area(i);
            for j in 0..self.nt {
                let (x, y) = self.cell_center(i, j);
                out.push([x, y, self.phases[i * self.nt + j] / a]);
            }
        }
        out
    }
}

fn node(radius: f64, nr: usize, nt: usize, i: usize, j: usize) -> (f64, f64) {
    let r = radius * i as f64 / nr as f64;
    let t = 2.0 * PI * (j % nt) as f64 / nt as f64;
    (r * t.cos(), r * t.sin())
}

fn check_bands(bands: &[usize]) -> Result<(), InvariantError> {
    if bands.is_empty() || bands.iter().any(|&b| !(1..=4).contains(&b)) {
        return Err(InvariantError::Grid(format!("bad band set {bands:?}")));
    }
    Ok(())
}

/// Gauge-invariant link between two band frames: the determinant of the
/// overlap matrix.
fn link(a: &[[C64; 4]], b: &[[C64; 4]]) -> C64 {
    match a.len() {
        1 => vdot(&a[0], &b[0]),
        2 => {
            let o = |i: usize, j: usize| vdot(&a[i], &b[j]);
            o(0, 0) * o(1, 1) - o(0, 1) * o(1, 0)
        }
        _ => unreachable!(),
    }
}

/// Plaquette curvature with an extra node gauge `exp(i·gauge(ξ1, ξ2))`
/// multiplied into every eigenvector; the result does not depend on it.
pub fn curvature_map_gauged(
    p: &ModelParams,
    bands: &[usize],
    radius: f64,
    n: usize,
    gauge: &(dyn Fn(f64, f64) -> f64 + Sync),
) -> Result<CurvatureField, InvariantError> {
    p.require_gap()?;
    check_bands(bands)?;
    if bands.len() > 2 {
        return Err(InvariantError::Grid("at most two bands".into()));
    }
    if n < 16 || radius <= 0.0 {
        return Err(InvariantError::Grid(format!("n={n} radius={radius}")));
    }
    let (nr, nt) = (n, n);
    let exec = par::default_exec();
    let frame = |i: usize, j: usize| -> Vec<[C64; 4]> {
        let (x, y) = node(radius, nr, nt, i, j);
        let ph = C64::from_polar(1.0, gauge(x, y));
        bands
            .iter()
            .map(|&b| band_vector(p, b, x, y).map(|z| z * ph))
            .collect()
    };
    // node frames ring by ring; ring 0 is the origin repeated
    let frames: Vec<Vec<Vec<[C64; 4]>>> =
        par::map_range(exec, nr + 1, |i| (0..nt).map(|j| frame(i, j)).collect());
    let rows: Vec<Result<Vec<f64>, InvariantError>> = par::map_range(exec, nr, |i| {
        let mut out = Vec::with_capacity(nt);
        for j in 0..nt {
            let jn = (j + 1) % nt;
            let (a, b, c, d) = (
                &frames[i][j],
                &frames[i + 1][j],
                &frames[i + 1][jn],
                &frames[i][jn],
            );
            let w = link(a, b) * link(b, c) * link(c, d) * link(d, a);
            if w.norm() < 1e-14 {
                let (x, y) = node(radius, nr, nt, i, j);
                return Err(InvariantError::Degenerate(x, y));
            }
            out.push(-w.arg());
        }
        Ok(out)
    });
    let mut phases = Vec::with_capacity(nr * nt);
    for r in rows {
        phases.extend(r?);
    }
    Ok(CurvatureField {
        radius,
        nr,
        nt,
        phases,
    })
}

pub fn curvature_map(
    p: &ModelParams,
    bands: &[usize],
    radius: f64,
    n: usize,
) -> Result<CurvatureField, InvariantError> {
    curvature_map_gauged(p, bands, radius, n, &|_, _| 0.0)
}

/// `i∮⟨u|du⟩` of the smooth gauge around `|ξ| = radius`, counterclockwise.
pub fn line_phase(p: &ModelParams, band: usize, radius: f64, m: usize) -> Result<f64, InvariantError> {
    let vecs: Vec<[C64; 4]> = (0..m)
        .map(|j| {
            let t = 2.0 * PI * j as f64 / m as f64;
            smooth_eigenvector(p, band, radius * t.cos(), radius * t.sin())
        })
        .collect::<Result<_, _>>()?;
    let mut acc = 0.0;
    for j in 0..m {
        let o = vdot(&vecs[j], &vecs[(j + 1) % m]);
        acc -= o.arg();
    }
    Ok(acc)
}

pub const FAR_RADIUS: f64 = 1e6;

#[derive(Clone, Debug)]
pub struct HalfInvariant {
    pub value: f64,
    pub disk_sum: f64,
    pub line_far: f64,
    pub line_r: f64,
}

/// `W^j` for a set of bands: disk plaquette sum plus the smooth-gauge tail
/// `γ(R_far) − γ(R)`, divided by 2π.
pub fn half_invariant(
    p: &ModelParams,
    bands: &[usize],
    radius: f64,
    n: usize,
) -> Result<HalfInvariant, InvariantError> {
    if bands.iter().any(|&b| b != 3 && b != 4) {
        return Err(InvariantError::Grid("half invariants use bands 3 and 4".into()));
    }
    let field = curvature_map(p, bands, radius, n)?;
    let m = 8 * n;
    let (mut far, mut near) = (0.0, 0.0);
    for &b in bands {
        far += line_phase(p, b, FAR_RADIUS, m)?;
        near += line_phase(p, b, radius, m)?;
    }
    let disk = field.total();
    Ok(HalfInvariant {
        value: (disk + far - near) / (2.0 * PI),
        disk_sum: disk,
        line_far: far,
        line_r: near,
    })
}

#[derive(Clone, Debug)]
pub struct BulkDifference {
    pub w: f64,
    pub nearest_int: i64,
    pub residual: f64,
    pub w_plus: f64,
    pub w_minus: f64,
}

/// `W = W_+ − W_-` with `W_± = W_±^3 + W_±^4`.
pub fn bulk_difference_invariant(
    p: &ModelParams,
    radius: f64,
    n: usize,
) -> Result<BulkDifference, InvariantError> {
    let wp = half_invariant(&p.with_stacking(Stacking::Plus), &[3, 4], radius, n)?.value;
    let wm = half_invariant(&p.with_stacking(Stacking::Minus), &[3, 4], radius, n)?.value;
    let w = wp - wm;
    let k = w.round();
    Ok(BulkDifference {
        w,
        nearest_int: k as i64,
        residual: (w - k).abs(),
        w_plus: wp,
        w_minus: wm,
    })
}

/// Integer predicted for `W`: `−2η sign(Ω)`.
pub fn predicted_w(p: &ModelParams) -> i64 {
    -2 * p.eta as i64 * p.omega.signum() as i64
}

/// Glued Chern numbers `(W_+^4 − W_-^3, W_+^3 − W_-^4)`.
pub fn gluing_report(p: &ModelParams, radius: f64, n: usize) -> Result<(f64, f64), InvariantError> {
    let plus = p.with_stacking(Stacking::Plus);
    let minus = p.with_stacking(Stacking::Minus);
    let wp4 = half_invariant(&plus, &[4], radius, n)?.value;
    let wp3 = half_invariant(&plus, &[3], radius, n)?.value;
    let wm4 = half_invariant(&minus, &[4], radius, n)?.value;
    let wm3 = half_invariant(&minus, &[3], radius, n)?.value;
    Ok((wp4 - wm3, wp3 - wm4))
}

/// Closed-form counterpart of `half_invariant` for cross-checks.
pub fn half_invariant_reference(p: &ModelParams, bands: &[usize]) -> f64 {
    bands.iter().map(|&b| half_invariant_closed_form(p, b)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn curvature_concentrates_near_unit_circle() {
        let p = ModelParams::plus(1.0, 0.2);
        let f = curvature_map(&p, &[3, 4], 10.0, 400).unwrap();
        assert!(f.fraction_in_annulus(0.5, 1.5) >= 0.9);
    }

    #[test]
    fn gauge_independence() {
        let p = ModelParams::plus(1.0, 0.3);
        let a = curvature_map(&p, &[3, 4], 5.0, 64).unwrap();
        let b = curvature_map_gauged(&p, &[3, 4], 5.0, 64, &|x, y| 3.0 * x - 1.7 * y * y + (x * y).sin())
            .unwrap();
        assert!((a.total() - b.total()).abs() < 1e-10);
    }

    #[test]
    fn valley_reflection_flips_curvature() {
        let p = ModelParams::plus(1.0, 0.2);
        let q = ModelParams { eta: -1, ..p };
        let n = 48;
        let a = curvature_map(&p, &[4], 4.0, n).unwrap();
        let b = curvature_map(&q, &[4], 4.0, n).unwrap();
        for i in 0..n {
            for j in 0..n {
                let jr = n - 1 - j;
                assert!((a.phases[i * n + j] + b.phases[i * n + jr]).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn half_invariants_near_closed_form() {
        let p = ModelParams::plus(1.0, 0.2);
        for band in [3, 4] {
            let h = half_invariant(&p, &[band], 20.0, 200).unwrap();
            let want = half_invariant_closed_form(&p, band);
            assert!((h.value - want).abs() < 1e-2, "band {band}: {} vs {want}", h.value);
        }
        assert!((half_invariant_closed_form(&p, 4) - 0.49752).abs() < 1e-5);
        assert!((half_invariant_closed_form(&p, 3) + 1.49752).abs() < 1e-5);
    }

    #[test]
    fn rejects_gapless() {
        assert!(matches!(
            curvature_map(&ModelParams::plus(1.0, 0.0), &[3], 5.0, 32),
            Err(InvariantError::Model(ModelError::Gapless))
        ));
    }
}
