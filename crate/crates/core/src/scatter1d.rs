//! One-dimensional Helmholtz scattering `ψ'' = (V − k²)ψ` and the
//! position-resolved valley conductivities built from split S-matrices.

use crate::par;
use num_complex::Complex64 as C64;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ScatterError {
    #[error("wavenumber must be positive, got {0}")]
    Wavenumber(f64),
    #[error("closed form needs k^2 > V0 (k={k}, V0={v0})")]
    Evanescent { k: f64, v0: f64 },
    #[error("total reflection on both sides of the split")]
    Degenerate,
    #[error("invalid segment [{0}, {1}]")]
    Segment(f64, f64),
}

/// `S = [[R+, T-], [T+, R-]]`, amplitudes referenced to `e^{±ikx}` in
/// absolute coordinates.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScatterMatrix {
    pub r_plus: C64,
    pub t_minus: C64,
    pub t_plus: C64,
    pub r_minus: C64,
    pub k: f64,
    pub segment: (f64, f64),
}

impl ScatterMatrix {
    /// Empty segment: no reflection, unit transmission.
    pub fn free(k: f64, x: f64) -> Self {
        Self {
            r_plus: C64::new(0.0, 0.0),
            t_minus: C64::new(1.0, 0.0),
            t_plus: C64::new(1.0, 0.0),
            r_minus: C64::new(0.0, 0.0),
            k,
            segment: (x, x),
        }
    }

    /// `max |S S* − I|`.
    pub fn unitarity_defect(&self) -> f64 {
        let s = [[self.r_plus, self.t_minus], [self.t_plus, self.r_minus]];
        let mut d: f64 = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                let v = s[i][0] * s[j][0].conj() + s[i][1] * s[j][1].conj();
                let id = if i == j { 1.0 } else { 0.0 };
                d = d.max((v - id).norm());
            }
        }
        d
    }

    /// Scattering data of the concatenation `self` (left) then `right`.
    pub fn compose(&self, right: &Self) -> Self {
        let den = C64::new(1.0, 0.0) - self.r_minus * right.r_plus;
        Self {
            r_plus: self.r_plus + self.t_minus * right.r_plus * self.t_plus / den,
            t_minus: right.t_minus * self.t_minus / den,
            t_plus: self.t_plus * right.t_plus / den,
            r_minus: right.r_minus + right.t_plus * self.r_minus * right.t_minus / den,
            k: self.k,
            segment: (self.segment.0, right.segment.1),
        }
    }
}

type M2 = [[C64; 2]; 2];

fn mul(a: &M2, b: &M2) -> M2 {
    let mut c = [[C64::new(0.0, 0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            c[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    c
}

/// Propagator of `(ψ, ψ')` across a cell of width `h` with constant `V`.
fn cell(v: f64, k: f64, h: f64) -> [[f64; 2]; 2] {
    let q2 = k * k - v;
    if q2.abs() * h * h < 1e-14 {
        return [[1.0, h], [-q2 * h, 1.0]];
    }
    if q2 > 0.0 {
        let q = q2.sqrt();
        let (s, c) = (q * h).sin_cos();
        [[c, s / q], [-q * s, c]]
    } else {
        let kap = (-q2).sqrt();
        let (s, c) = ((kap * h).sinh(), (kap * h).cosh());
        [[c, s / kap], [kap * s, c]]
    }
}

/// `W(x)` mapping plane-wave amplitudes `(a, b)` of `a e^{ikx} + b e^{-ikx}`
/// to `(ψ, ψ')`.
fn plane_basis(k: f64, x: f64) -> M2 {
    let e = C64::from_polar(1.0, k * x);
    let ik = C64::new(0.0, k);
    [[e, e.conj()], [ik * e, -ik * e.conj()]]
}

fn plane_basis_inv(k: f64, x: f64) -> M2 {
    let e = C64::from_polar(1.0, k * x);
    let ik = C64::new(0.0, k);
    let inv_det = C64::new(1.0, 0.0) / (-ik * 2.0);
    [
        [-ik * e.conj() * inv_det, -e.conj() * inv_det],
        [-ik * e * inv_det, e * inv_det],
    ]
}

/// S-matrix of piecewise-constant cell values on `[xl, xr]`.
pub fn numeric_smatrix(cells: &[f64], xl: f64, xr: f64, k: f64) -> Result<ScatterMatrix, ScatterError> {
    if !(k > 0.0) {
        return Err(ScatterError::Wavenumber(k));
    }
    if !(xr >= xl) {
        return Err(ScatterError::Segment(xl, xr));
    }
    if cells.is_empty() || xr == xl {
        return Ok(ScatterMatrix::free(k, xl));
    }
    let h = (xr - xl) / cells.len() as f64;
    let mut t = [[1.0, 0.0], [0.0, 1.0]];
    for &v in cells {
        let c = cell(v, k, h);
        t = [
            [c[0][0] * t[0][0] + c[0][1] * t[1][0], c[0][0] * t[0][1] + c[0][1] * t[1][1]],
            [c[1][0] * t[0][0] + c[1][1] * t[1][0], c[1][0] * t[0][1] + c[1][1] * t[1][1]],
        ];
    }
    let tc: M2 = t.map(|r| r.map(|v| C64::new(v, 0.0)));
    let m = mul(&plane_basis_inv(k, xr), &mul(&tc, &plane_basis(k, xl)));
    let r_plus = -m[1][0] / m[1][1];
    let t_plus = m[0][0] + m[0][1] * r_plus;
    let t_minus = C64::new(1.0, 0.0) / m[1][1];
    let r_minus = m[0][1] / m[1][1];
    Ok(ScatterMatrix {
        r_plus,
        t_minus,
        t_plus,
        r_minus,
        k,
        segment: (xl, xr),
    })
}

/// Midpoint sampling of `v` on `n` uniform cells.
pub fn sample_cells(v: &dyn Fn(f64) -> f64, xl: f64, xr: f64, n: usize) -> Vec<f64> {
    let h = (xr - xl) / n as f64;
    (0..n).map(|i| v(xl + (i as f64 + 0.5) * h)).collect()
}

pub fn smatrix_of(
    v: &dyn Fn(f64) -> f64,
    xl: f64,
    xr: f64,
    k: f64,
    n: usize,
) -> Result<ScatterMatrix, ScatterError> {
    numeric_smatrix(&sample_cells(v, xl, xr, n), xl, xr, k)
}

/// Richardson-extrapolated S-matrix from `n` and `2n` cells (midpoint error
/// is O(h²)); returns the extrapolated data and the size of the correction.
pub fn smatrix_richardson(
    v: &dyn Fn(f64) -> f64,
    xl: f64,
    xr: f64,
    k: f64,
    n: usize,
) -> Result<(ScatterMatrix, f64), ScatterError> {
    let a = smatrix_of(v, xl, xr, k, n)?;
    let b = smatrix_of(v, xl, xr, k, 2 * n)?;
    let ex = |x: C64, y: C64| (y * 4.0 - x) / 3.0;
    let s = ScatterMatrix {
        r_plus: ex(a.r_plus, b.r_plus),
        t_minus: ex(a.t_minus, b.t_minus),
        t_plus: ex(a.t_plus, b.t_plus),
        r_minus: ex(a.r_minus, b.r_minus),
        ..b
    };
    let err = [
        (s.r_plus - b.r_plus).norm(),
        (s.t_minus - b.t_minus).norm(),
        (s.t_plus - b.t_plus).norm(),
        (s.r_minus - b.r_minus).norm(),
    ]
    .into_iter()
    .fold(0.0, f64::max);
    Ok((s, err))
}

/// `R_-` of the barrier `V0` on `[-a, a]`.
pub fn closed_form_barrier(v0: f64, a: f64, k: f64) -> Result<C64, ScatterError> {
    if !(k > 0.0) {
        return Err(ScatterError::Wavenumber(k));
    }
    if k * k <= v0 {
        return Err(ScatterError::Evanescent { k, v0 });
    }
    let q = (k * k - v0).sqrt();
    let (s, c) = (2.0 * q * a).sin_cos();
    let num = C64::from_polar(v0 * s, -2.0 * k * a);
    let den = C64::new((2.0 * k * k - v0) * s, 2.0 * k * q * c);
    Ok(num / den)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SplitResult {
    pub sigma_plus: f64,
    pub sigma_minus: f64,
    pub u_l: C64,
    pub v_l: C64,
    pub u_r: C64,
    pub v_r: C64,
}

pub fn split_conductivities(sl: &ScatterMatrix, sr: &ScatterMatrix) -> Result<SplitResult, ScatterError> {
    let den = C64::new(1.0, 0.0) - sl.r_minus * sr.r_plus;
    if den.norm() < 1e-14 {
        return Err(ScatterError::Degenerate);
    }
    let u_l = sl.t_plus / den;
    let v_l = sr.r_plus * sl.t_plus / den;
    let v_r = sr.t_minus / den;
    let u_r = sl.r_minus * sr.t_minus / den;
    Ok(SplitResult {
        sigma_plus: u_l.norm_sqr() + u_r.norm_sqr(),
        sigma_minus: -(v_l.norm_sqr() + v_r.norm_sqr()),
        u_l,
        v_l,
        u_r,
        v_r,
    })
}

/// `(1 − r⁴)/|1 − e^{2iθ} r²|²` for `R_-^L = r e^{iθ}`.
pub fn even_split_formula(r_minus_left: C64) -> f64 {
    let r2 = r_minus_left.norm_sqr();
    (1.0 - r2 * r2) / (C64::new(1.0, 0.0) - r_minus_left * r_minus_left).norm_sqr()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepPoint {
    pub x0: f64,
    pub split: SplitResult,
    /// `|V(x0)|`; the split is only meaningful where it vanishes.
    pub v_at_split: f64,
    pub total: ScatterMatrix,
}

/// `σ±(x0)` for a potential supported in `[xl, xr]`, discretized with
/// `cells_per_unit` cells per unit length on each side of the split.
pub fn position_sweep(
    v: &(dyn Fn(f64) -> f64 + Sync),
    xl: f64,
    xr: f64,
    k: f64,
    x0_list: &[f64],
    cells_per_unit: f64,
) -> Result<Vec<SweepPoint>, ScatterError> {
    let cells = |a: f64, b: f64| ((b - a) * cells_per_unit).ceil().max(1.0) as usize;
    let total = smatrix_of(v, xl, xr, k, cells(xl, xr))?;
    let pts = par::map_slice(par::default_exec(), x0_list, |&x0| {
        let (sl, sr) = if x0 <= xl {
            (ScatterMatrix::free(k, x0), total)
        } else if x0 >= xr {
            (total, ScatterMatrix::free(k, x0))
        } else {
            (
                smatrix_of(v, xl, x0, k, cells(xl, x0))?,
                smatrix_of(v, x0, xr, k, cells(x0, xr))?,
            )
        };
        Ok(SweepPoint {
            x0,
            split: split_conductivities(&sl, &sr)?,
            v_at_split: v(x0).abs(),
            total,
        })
    });
    pts.into_iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use std::f64::consts::PI;

    fn barrier(v0: f64, a: f64) -> impl Fn(f64) -> f64 + Sync {
        move |x: f64| if x.abs() < a { v0 } else { 0.0 }
    }

    #[test]
    fn free_segment() {
        let s = numeric_smatrix(&[0.0; 10], -1.0, 2.0, 1.3).unwrap();
        assert!(s.r_plus.norm() < 1e-14 && s.r_minus.norm() < 1e-14);
        assert!((s.t_plus - 1.0).norm() < 1e-13 && (s.t_minus - 1.0).norm() < 1e-13);
        assert!(numeric_smatrix(&[0.0], 0.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn barrier_matches_closed_form() {
        let (v0, a, k) = (0.5, 1.0, 1.0);
        let s = numeric_smatrix(&vec![v0; 64], -a, a, k).unwrap();
        let r = closed_form_barrier(v0, a, k).unwrap();
        assert!((s.r_minus - r).norm() < 1e-8, "{} vs {}", s.r_minus, r);
        assert!(s.unitarity_defect() < 1e-12);
        // transmission resonance 2qa = π
        let k = (1.0 + PI * PI / 4.0).sqrt();
        assert!(closed_form_barrier(1.0, 1.0, k).unwrap().norm() < 1e-15);
        let s = numeric_smatrix(&[1.0; 8], -1.0, 1.0, k).unwrap();
        assert!(s.r_minus.norm() < 1e-10);
        assert_eq!(closed_form_barrier(0.0, 1.0, 2.0).unwrap().norm(), 0.0);
        assert!(closed_form_barrier(2.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn thin_barrier_phase() {
        let r = closed_form_barrier(0.5, 1e-4, 1.0).unwrap();
        assert!((r.arg() + PI / 2.0).abs() < 1e-3);
    }

    #[test]
    fn unitarity_and_reciprocity_random() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let cells: Vec<f64> = (0..200).map(|_| rng.random_range(-1.0..3.0)).collect();
            let k = rng.random_range(0.2..2.5);
            let s = numeric_smatrix(&cells, -3.0, 4.0, k).unwrap();
            assert!(s.unitarity_defect() < 1e-10);
            assert!((s.t_plus.norm() - s.t_minus.norm()).abs() < 1e-12);
        }
    }

    #[test]
    fn composition_matches_direct() {
        let v = |x: f64| 0.8 * (-x * x).exp() * (1.0 + 0.3 * x);
        let n = 400;
        let whole = smatrix_of(&v, -4.0, 4.0, 1.1, 2 * n).unwrap();
        let l = smatrix_of(&v, -4.0, 0.0, 1.1, n).unwrap();
        let r = smatrix_of(&v, 0.0, 4.0, 1.1, n).unwrap();
        let c = l.compose(&r);
        assert!((c.t_plus.norm() - whole.t_plus.norm()).abs() < 1e-10);
        assert!((c.r_minus - whole.r_minus).norm() < 1e-10);
        assert!((c.r_plus - whole.r_plus).norm() < 1e-10);
    }

    #[test]
    fn richardson_converges() {
        let v = |x: f64| 0.6 * (-(x * x)).exp();
        let (s, err) = smatrix_richardson(&v, -5.0, 5.0, 1.0, 500).unwrap();
        let fine = smatrix_of(&v, -5.0, 5.0, 1.0, 8000).unwrap();
        assert!(err < 1e-5);
        assert!((s.r_minus - fine.r_minus).norm() < 1e-7);
    }

    #[test]
    fn split_outside_support_and_sum_rule() {
        let v = barrier(0.4, 1.5);
        let pts = position_sweep(&v, -2.0, 2.0, 1.0, &[-3.0, -2.0, 2.5, -0.7, 0.3], 200.0).unwrap();
        for p in &pts[..3] {
            assert!((p.split.sigma_plus - 1.0).abs() < 1e-12);
        }
        for p in &pts {
            assert!((p.split.sigma_plus + p.split.sigma_minus).abs() < 1e-12);
        }
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        for _ in 0..50 {
            let a: Vec<f64> = (0..30).map(|_| rng.random_range(-1.0..2.0)).collect();
            let b: Vec<f64> = (0..30).map(|_| rng.random_range(-1.0..2.0)).collect();
            let sl = numeric_smatrix(&a, -1.0, 0.0, 1.2).unwrap();
            let sr = numeric_smatrix(&b, 0.0, 1.0, 1.2).unwrap();
            let s = split_conductivities(&sl, &sr).unwrap();
            assert!((s.sigma_plus + s.sigma_minus).abs() < 1e-12);
        }
    }

    #[test]
    fn even_split_formula_and_dichotomy() {
        // two mirrored barriers about x0 = 0
        for (v0, a, c) in [(0.05, 0.8, 1.7), (0.05, 0.4, 2.3), (0.1, 1.2, 3.0)] {
            let v = move |x: f64| if (x.abs() - c).abs() < a { v0 } else { 0.0 };
            let k = 1.0;
            let sl = smatrix_of(&v, -c - a, 0.0, k, 4000).unwrap();
            let sr = smatrix_of(&v, 0.0, c + a, k, 4000).unwrap();
            assert!((sl.r_minus - sr.r_plus).norm() < 1e-10);
            let s = split_conductivities(&sl, &sr).unwrap();
            let f = even_split_formula(sl.r_minus);
            assert!((s.sigma_plus - f).abs() < 1e-10);
            let th = sl.r_minus.arg();
            let r = sl.r_minus.norm();
            if r < 0.2 && (2.0 * th).cos().abs() > 0.2 {
                assert_eq!((s.sigma_plus - 1.0).signum(), (2.0 * th).cos().signum());
                assert!((s.sigma_plus - 1.0 - 2.0 * (2.0 * th).cos() * r * r).abs() < 4.0 * r.powi(4));
            }
        }
    }

    #[test]
    fn dip_and_boost_both_occur() {
        // the phase of R_-^L is set by the barrier centre; sweep it
        let (v0, k, a) = (0.05, 1.0, 0.8);
        let (mut dip, mut boost) = (false, false);
        for i in 0..40 {
            let c = 1.0 + 0.08 * i as f64;
            let v = move |x: f64| if (x.abs() - c).abs() < a { v0 } else { 0.0 };
            let sl = smatrix_of(&v, -c - a, 0.0, k, 2000).unwrap();
            let sr = smatrix_of(&v, 0.0, c + a, k, 2000).unwrap();
            let s = split_conductivities(&sl, &sr).unwrap().sigma_plus;
            let c2 = (2.0 * sl.r_minus.arg()).cos();
            dip |= c2 < -0.5 && s < 1.0;
            boost |= c2 > 0.5 && s > 1.0;
        }
        assert!(dip && boost);
    }
}
