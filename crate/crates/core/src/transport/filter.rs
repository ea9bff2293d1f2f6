//! Spatial switch filters `p`, masks `q`, and the density weight `φ'`.

use super::TransportError;
use crate::fourier::FourierGrid;
use crate::model::Switch;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// `∫_{-1}^{1} exp(-1/(1-t²)) dt`.
const BUMP_MASS: f64 = 0.443_993_816_168_079_4;

/// Smooth compactly supported `φ'` with unit integral on `(center - e0, center + e0)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityWeight {
    pub e0: f64,
    #[serde(default)]
    pub center: f64,
}

impl DensityWeight {
    pub fn new(e0: f64) -> Result<Self, TransportError> {
        if !(e0 > 0.0 && e0.is_finite()) {
            return Err(TransportError::Filter(format!("density half-width {e0} must be positive")));
        }
        Ok(Self { e0, center: 0.0 })
    }

    pub fn shifted(self, center: f64) -> Self {
        Self { center, ..self }
    }

    pub fn eval(&self, e: f64) -> f64 {
        let t = (e - self.center) / self.e0;
        if t.abs() >= 1.0 {
            return 0.0;
        }
        (-1.0 / (1.0 - t * t)).exp() / (self.e0 * BUMP_MASS)
    }

    pub fn support(&self) -> (f64, f64) {
        (self.center - self.e0, self.center + self.e0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FilterKind {
    /// 1D: up at `x0`, back down on `[L-3δ, L-δ]`.
    Edge1d,
    /// 1D mask: up on `[2δ, 4δ]`, down on `[L-6δ, L-4δ]`.
    Mask1d,
    /// 2D: `S(max(x-x0, -cosθ|y-yc| + sinθ(x-x0-Lx/4)))`.
    JunctionP,
    /// 2D box mask around the junction.
    MaskQ,
    /// `JunctionP` composed with a rotation by `-2πj/3` about the centre.
    RotatedP { j: u32 },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FilterSpec {
    #[serde(flatten)]
    pub kind: FilterKind,
    pub x0: f64,
    pub delta: f64,
    pub theta: f64,
}

pub const DEFAULT_THETA: f64 = PI - PI / 12.0;

impl FilterSpec {
    pub fn edge_1d(x0: f64, delta: f64) -> Self {
        Self {
            kind: FilterKind::Edge1d,
            x0,
            delta,
            theta: DEFAULT_THETA,
        }
    }

    pub fn mask_1d(delta: f64) -> Self {
        Self {
            kind: FilterKind::Mask1d,
            x0: 0.0,
            delta,
            theta: DEFAULT_THETA,
        }
    }

    pub fn junction(x0: f64, delta: f64) -> Self {
        Self {
            kind: FilterKind::JunctionP,
            x0,
            delta,
            theta: DEFAULT_THETA,
        }
    }

    pub fn mask_q(delta: f64) -> Self {
        Self {
            kind: FilterKind::MaskQ,
            x0: 0.0,
            delta,
            theta: DEFAULT_THETA,
        }
    }

    pub fn rotated(j: u32, x0: f64, delta: f64) -> Self {
        Self {
            kind: FilterKind::RotatedP { j },
            x0,
            delta,
            theta: DEFAULT_THETA,
        }
    }

    pub(crate) fn validate(&self, lengths: &[f64]) -> Result<(), TransportError> {
        let d = self.delta;
        let bad = |msg: String| Err(TransportError::Filter(msg));
        if !(d > 0.0) {
            return bad(format!("delta {d} must be positive"));
        }
        let need2 = matches!(
            self.kind,
            FilterKind::JunctionP | FilterKind::MaskQ | FilterKind::RotatedP { .. }
        );
        if need2 != (lengths.len() == 2) {
            return bad(format!("{:?} does not fit a {}D grid", self.kind, lengths.len()));
        }
        let l = lengths[0];
        match self.kind {
            FilterKind::Edge1d if self.x0 - d < 0.0 || self.x0 + d > l - 3.0 * d => {
                bad(format!("edge filter at x0={} with delta={d} leaves [0, {l}]", self.x0))
            }
            FilterKind::Mask1d if 10.0 * d > l => bad(format!("mask delta {d} too large for L={l}")),
            FilterKind::JunctionP | FilterKind::RotatedP { .. } if self.x0 - d < 0.0 || self.x0 + d > l => {
                bad(format!("junction filter at x0={} with delta={d} leaves [0, {l}]", self.x0))
            }
            FilterKind::MaskQ if 2.0 * d > l / 4.0 || 2.0 * d > lengths[1] / 8.0 => {
                bad(format!("mask delta {d} too large"))
            }
            _ => Ok(()),
        }
    }

    /// `(p, ∂x p, ∂y p)` at absolute coordinates.
    pub fn eval(&self, lengths: &[f64], x: f64, y: f64) -> (f64, f64, f64) {
        let d = self.delta;
        let l = lengths[0];
        match self.kind {
            FilterKind::Edge1d => {
                let (u, dn) = (Switch::up(self.x0 - d, self.x0 + d), Switch::down(l - 3.0 * d, l - d));
                (u.eval(x) * dn.eval(x), u.deriv(x) * dn.eval(x) + u.eval(x) * dn.deriv(x), 0.0)
            }
            FilterKind::Mask1d => {
                let (u, dn) = (Switch::up(2.0 * d, 4.0 * d), Switch::down(l - 6.0 * d, l - 4.0 * d));
                (u.eval(x) * dn.eval(x), u.deriv(x) * dn.eval(x) + u.eval(x) * dn.deriv(x), 0.0)
            }
            FilterKind::JunctionP => {
                let yc = 0.5 * lengths[1];
                let (s, c) = self.theta.sin_cos();
                let a = x - self.x0;
                let b = -c * (y - yc).abs() + s * (x - self.x0 - 0.25 * l);
                let sw = Switch::up(-d, d);
                let (g, gx, gy) = if a >= b {
                    (a, 1.0, 0.0)
                } else {
                    (b, s, -c * (y - yc).signum())
                };
                let dp = sw.deriv(g);
                (sw.eval(g), dp * gx, dp * gy)
            }
            FilterKind::MaskQ => {
                let (xc, yc) = (0.5 * l, 0.5 * lengths[1]);
                let a = (x - xc).abs() - 0.25 * l;
                let b = (y - yc).abs() - 0.375 * lengths[1];
                let sw = Switch::down(-d, d);
                let (g, gx, gy) = if a >= b {
                    (a, (x - xc).signum(), 0.0)
                } else {
                    (b, 0.0, (y - yc).signum())
                };
                let dq = sw.deriv(g);
                (sw.eval(g), dq * gx, dq * gy)
            }
            FilterKind::RotatedP { j } => {
                let (xc, yc) = (0.5 * l, 0.5 * lengths[1]);
                let (s, c) = (-2.0 * PI * j as f64 / 3.0).sin_cos();
                let (rx, ry) = (x - xc, y - yc);
                let (qx, qy) = (c * rx - s * ry, s * rx + c * ry);
                let base = Self {
                    kind: FilterKind::JunctionP,
                    ..*self
                };
                let (v, gx, gy) = base.eval(lengths, xc + qx, yc + qy);
                // chain rule through the rotation
                (v, c * gx + s * gy, -s * gx + c * gy)
            }
        }
    }
}

/// Filter values and closed-form gradients on the fine grid.
#[derive(Clone, Debug, PartialEq)]
pub struct SampledFilter {
    pub spec: FilterSpec,
    pub value: Vec<f64>,
    pub dx: Vec<f64>,
    pub dy: Vec<f64>,
}

impl SampledFilter {
    pub fn complex(&self) -> Vec<C64> {
        self.value.iter().map(|&v| C64::new(v, 0.0)).collect()
    }

    pub fn constant(grid: &FourierGrid, v: f64) -> Self {
        let n = grid.n_samples();
        Self {
            spec: FilterSpec::mask_1d(1.0),
            value: vec![v; n],
            dx: vec![0.0; n],
            dy: vec![0.0; n],
        }
    }
}

pub fn make_filter(spec: &FilterSpec, grid: &FourierGrid) -> Result<SampledFilter, TransportError> {
    spec.validate(&grid.lengths)?;
    let n = grid.n_samples();
    let (mut value, mut dx, mut dy) = (Vec::with_capacity(n), Vec::with_capacity(n), Vec::with_capacity(n));
    for j in 0..n {
        let (x, y) = grid.node(j);
        let (v, gx, gy) = spec.eval(&grid.lengths, x, y);
        value.push(v);
        dx.push(gx);
        dy.push(gy);
    }
    Ok(SampledFilter {
        spec: *spec,
        value,
        dx,
        dy,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bump_has_unit_mass() {
        let w = DensityWeight::new(0.3).unwrap().shifted(0.1);
        let n = 20000;
        let h = 0.6 / n as f64;
        let s: f64 = (0..n).map(|i| w.eval(-0.2 + (i as f64 + 0.5) * h)).sum::<f64>() * h;
        assert!((s - 1.0).abs() < 1e-10);
        assert_eq!(w.eval(0.4), 0.0);
        assert!(DensityWeight::new(0.0).is_err());
    }

    #[test]
    fn edge_filter_plateaus() {
        let l = [100.0];
        let f = FilterSpec::edge_1d(50.0, 2.0);
        assert_eq!(f.eval(&l, 0.0, 0.0).0, 0.0);
        assert_eq!(f.eval(&l, 53.0, 0.0).0, 1.0);
        assert_eq!(f.eval(&l, 99.5, 0.0).0, 0.0);
        let q = FilterSpec::mask_1d(2.0);
        assert_eq!(q.eval(&l, 50.0, 0.0).0, 1.0);
        assert_eq!(q.eval(&l, 2.0, 0.0).0, 0.0);
    }

    #[test]
    fn gradients_match_differences() {
        let l = [100.0, 100.0];
        let specs = [
            FilterSpec::junction(50.0, 2.0),
            FilterSpec::mask_q(2.0),
            FilterSpec::rotated(1, 50.0, 2.0),
            FilterSpec::rotated(2, 45.0, 2.0),
        ];
        let h = 1e-6;
        for s in specs {
            for i in 0..400 {
                let (x, y) = (20.0 + (i % 20) as f64 * 3.1, 10.0 + (i / 20) as f64 * 4.05);
                let (_, gx, gy) = s.eval(&l, x, y);
                let fx = (s.eval(&l, x + h, y).0 - s.eval(&l, x - h, y).0) / (2.0 * h);
                let fy = (s.eval(&l, x, y + h).0 - s.eval(&l, x, y - h).0) / (2.0 * h);
                assert!((gx - fx).abs() < 1e-5 && (gy - fy).abs() < 1e-5, "{s:?} at ({x},{y})");
            }
        }
    }

    #[test]
    fn junction_filter_regions() {
        let l = [100.0, 100.0];
        let p = FilterSpec::junction(50.0, 2.0);
        assert_eq!(p.eval(&l, 55.0, 50.0).0, 1.0);
        assert_eq!(p.eval(&l, 45.0, 50.0).0, 0.0);
        // the oblique pieces open the region far above and below
        assert_eq!(p.eval(&l, 45.0, 95.0).0, 1.0);
        let q = FilterSpec::mask_q(2.0);
        assert_eq!(q.eval(&l, 50.0, 50.0).0, 1.0);
        assert_eq!(q.eval(&l, 5.0, 50.0).0, 0.0);
        assert_eq!(q.eval(&l, 50.0, 99.0).0, 0.0);
    }

    #[test]
    fn rejects_oversized_delta() {
        let g = FourierGrid::new(&[100.0], &[8]).unwrap();
        assert!(make_filter(&FilterSpec::edge_1d(50.0, 30.0), &g).is_err());
        assert!(make_filter(&FilterSpec::junction(50.0, 2.0), &g).is_err());
        assert!(make_filter(&FilterSpec::edge_1d(50.0, 2.0), &g).is_ok());
    }
}
