//! Pseudo-spectral discretization on periodic boxes.
//!
//! Modes are ordered row-major over `(component, ky, kx)`. Products with
//! coefficient fields are formed on a fine grid of `3(K+1)` nodes per axis,
//! so the retained modes of a product are free of aliasing.

mod edge;
mod solve;

pub use edge::{edge_band_structure, EdgeBands, EdgeConfig, EdgeCrossing, EdgeLevel};
pub use solve::{diagonalize, diagonalize_with, SolverKind, SolverOptions, SolverStats, SpectralDecomposition};

use crate::cmat::{CMat, ZERO};
use crate::model::ModelOperator;
use crate::par::{self, Exec};
use faer::Mat;
use num_complex::Complex64 as C64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::sync::Arc;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FourierError {
    #[error("invalid grid: {0}")]
    Grid(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("eigensolver failed on {tag}: {msg}")]
    Solver { tag: String, msg: String },
    #[error("spectral window does not cover {0}")]
    Coverage(String),
    #[error(transparent)]
    Model(#[from] crate::model::ModelError),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FourierGrid {
    pub lengths: Vec<f64>,
    pub cutoffs: Vec<usize>,
}

impl FourierGrid {
    pub fn new(lengths: &[f64], cutoffs: &[usize]) -> Result<Self, FourierError> {
        if lengths.is_empty() || lengths.len() > 2 || lengths.len() != cutoffs.len() {
            return Err(FourierError::Grid(format!(
                "need 1 or 2 axes, got lengths {lengths:?} cutoffs {cutoffs:?}"
            )));
        }
        if lengths.iter().any(|&l| !(l > 0.0 && l.is_finite())) {
            return Err(FourierError::Grid(format!("non-positive length in {lengths:?}")));
        }
        if cutoffs.contains(&0) {
            return Err(FourierError::Grid("cutoff must be at least 1".into()));
        }
        Ok(Self {
            lengths: lengths.to_vec(),
            cutoffs: cutoffs.to_vec(),
        })
    }

    pub fn dims(&self) -> usize {
        self.lengths.len()
    }

    pub fn modes_along(&self, d: usize) -> usize {
        2 * self.cutoffs[d] + 1
    }

    /// Spectral dimension of one scalar component.
    pub fn n_modes(&self) -> usize {
        (0..self.dims()).map(|d| self.modes_along(d)).product()
    }

    pub fn samples_along(&self, d: usize) -> usize {
        3 * (self.cutoffs[d] + 1)
    }

    pub fn n_samples(&self) -> usize {
        (0..self.dims()).map(|d| self.samples_along(d)).product()
    }

    pub fn spacing(&self, d: usize) -> f64 {
        self.lengths[d] / self.samples_along(d) as f64
    }

    fn mx(&self) -> usize {
        self.samples_along(0)
    }

    fn my(&self) -> usize {
        if self.dims() == 2 {
            self.samples_along(1)
        } else {
            1
        }
    }

    /// Integer frequencies `(kx, ky)` of mode index `i` (`ky = 0` in 1D).
    pub fn mode(&self, i: usize) -> (i64, i64) {
        let nx = self.modes_along(0);
        let kx = (i % nx) as i64 - self.cutoffs[0] as i64;
        let ky = if self.dims() == 2 {
            (i / nx) as i64 - self.cutoffs[1] as i64
        } else {
            0
        };
        (kx, ky)
    }

    /// Physical wavenumber `2πk/L` along axis `d` for mode `i`.
    pub fn wavenumber(&self, d: usize, i: usize) -> f64 {
        let (kx, ky) = self.mode(i);
        let k = if d == 0 { kx } else { ky };
        2.0 * PI * k as f64 / self.lengths[d]
    }

    /// Fine-grid node of flat sample index `j` (row-major over `(iy, ix)`).
    pub fn node(&self, j: usize) -> (f64, f64) {
        let mx = self.mx();
        let x = (j % mx) as f64 * self.spacing(0);
        let y = if self.dims() == 2 {
            (j / mx) as f64 * self.spacing(1)
        } else {
            0.0
        };
        (x, y)
    }

    pub fn sample(&self, f: impl Fn(f64, f64) -> C64 + Sync + Send) -> Vec<C64> {
        par::map_range(par::default_exec(), self.n_samples(), |j| {
            let (x, y) = self.node(j);
            f(x, y)
        })
    }

    pub fn sample_real(&self, f: impl Fn(f64, f64) -> f64 + Sync + Send) -> Vec<C64> {
        self.sample(|x, y| C64::new(f(x, y), 0.0))
    }

    /// Flat fine-grid index holding frequency `(kx, ky)` after wrapping.
    fn fine_index(&self, kx: i64, ky: i64) -> usize {
        let (mx, my) = (self.mx() as i64, self.my() as i64);
        (ky.rem_euclid(my) * mx + kx.rem_euclid(mx)) as usize
    }
}

/// Planned transforms for one grid.
#[derive(Clone)]
pub struct FftEngine {
    grid: FourierGrid,
    fwd_x: Arc<dyn Fft<f64>>,
    inv_x: Arc<dyn Fft<f64>>,
    fwd_y: Option<Arc<dyn Fft<f64>>>,
    inv_y: Option<Arc<dyn Fft<f64>>>,
    gather: Vec<usize>,
}

impl std::fmt::Debug for FftEngine {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FftEngine").field("grid", &self.grid).finish()
    }
}

impl FftEngine {
    pub fn new(grid: &FourierGrid) -> Self {
        let mut planner = FftPlanner::new();
        let (mx, my) = (grid.mx(), grid.my());
        let two_d = grid.dims() == 2;
        let gather = (0..grid.n_modes())
            .map(|i| {
                let (kx, ky) = grid.mode(i);
                grid.fine_index(kx, ky)
            })
            .collect();
        Self {
            grid: grid.clone(),
            fwd_x: planner.plan_fft_forward(mx),
            inv_x: planner.plan_fft_inverse(mx),
            fwd_y: two_d.then(|| planner.plan_fft_forward(my)),
            inv_y: two_d.then(|| planner.plan_fft_inverse(my)),
            gather,
        }
    }

    pub fn grid(&self) -> &FourierGrid {
        &self.grid
    }

    fn transform(&self, data: &mut [C64], inverse: bool) {
        let (mx, my) = (self.grid.mx(), self.grid.my());
        let fx = if inverse { &self.inv_x } else { &self.fwd_x };
        let mut scratch = vec![ZERO; fx.get_inplace_scratch_len()];
        fx.process_with_scratch(data, &mut scratch);
        let fy = if inverse { &self.inv_y } else { &self.fwd_y };
        if let Some(fy) = fy {
            let mut t = vec![ZERO; mx * my];
            for iy in 0..my {
                for ix in 0..mx {
                    t[ix * my + iy] = data[iy * mx + ix];
                }
            }
            let mut scratch = vec![ZERO; fy.get_inplace_scratch_len()];
            fy.process_with_scratch(&mut t, &mut scratch);
            for iy in 0..my {
                for ix in 0..mx {
                    data[iy * mx + ix] = t[ix * my + iy];
                }
            }
        }
    }

    /// Values on the fine grid of the trigonometric polynomial with
    /// coefficients `modes`.
    pub fn to_fine(&self, modes: &[C64]) -> Vec<C64> {
        let mut f = vec![ZERO; self.grid.n_samples()];
        for (&g, &c) in self.gather.iter().zip(modes) {
            f[g] = c;
        }
        self.transform(&mut f, true);
        f
    }

    /// Normalized DFT of fine samples, all frequencies (wrapped layout).
    pub fn coefficients(&self, samples: &[C64]) -> Vec<C64> {
        let mut f = samples.to_vec();
        self.transform(&mut f, false);
        let s = 1.0 / self.grid.n_samples() as f64;
        f.iter_mut().for_each(|v| *v *= s);
        f
    }

    /// Retained modes of fine-grid samples.
    pub fn to_modes(&self, samples: &[C64]) -> Vec<C64> {
        let c = self.coefficients(samples);
        self.gather.iter().map(|&g| c[g]).collect()
    }

    /// Galerkin product `Π_K (f · u)` for one scalar component.
    pub fn multiply(&self, field: &[C64], modes: &[C64]) -> Vec<C64> {
        let mut u = self.to_fine(modes);
        u.iter_mut().zip(field).for_each(|(a, b)| *a *= b);
        self.to_modes(&u)
    }
}

/// Dense Galerkin block `M[k,l] = ĉ[(k-l) mod 3(K+1)]` of a sampled field.
pub fn multiplication_operator(grid: &FourierGrid, samples: &[C64]) -> Result<Mat<C64>, FourierError> {
    if samples.len() != grid.n_samples() {
        return Err(FourierError::Dimension(format!(
            "{} samples for a grid of {}",
            samples.len(),
            grid.n_samples()
        )));
    }
    let eng = FftEngine::new(grid);
    let c = eng.coefficients(samples);
    let n = grid.n_modes();
    let modes: Vec<(i64, i64)> = (0..n).map(|i| grid.mode(i)).collect();
    Ok(Mat::from_fn(n, n, |r, s| {
        let (a, b) = (modes[r], modes[s]);
        c[grid.fine_index(a.0 - b.0, a.1 - b.1)]
    }))
}

/// Discretized operator: diagonal derivative blocks plus a pointwise matrix
/// field applied through the fine grid.
#[derive(Clone, Debug)]
pub struct AssembledOperator {
    pub grid: FourierGrid,
    pub ncomp: usize,
    pub model_tag: String,
    pub valley_block: Option<usize>,
    deriv: Vec<CMat>,
    /// `C(x_j)[a][b]` at `j*nc*nc + a*nc + b`.
    field: Vec<C64>,
    active: Vec<(usize, usize)>,
    /// Per-mode derivative symbol, `nc*nc` entries each.
    diag: Vec<C64>,
    engine: FftEngine,
}

pub fn assemble(model: &ModelOperator, grid: &FourierGrid) -> Result<AssembledOperator, FourierError> {
    if model.dims() != grid.dims() {
        return Err(FourierError::Dimension(format!(
            "model '{}' is {}D, grid is {}D",
            model.tag,
            model.dims(),
            grid.dims()
        )));
    }
    for (d, (&a, &b)) in model.lengths.iter().zip(&grid.lengths).enumerate() {
        if (a - b).abs() > 1e-12 * a.abs().max(1.0) {
            return Err(FourierError::Dimension(format!(
                "axis {d}: model period {a} vs grid length {b}"
            )));
        }
    }
    let nc = model.ncomp();
    let ns = grid.n_samples();
    let mut field = vec![ZERO; ns * nc * nc];
    let terms = &model.terms;
    par::for_each_chunk_mut(par::default_exec(), &mut field, nc * nc, |j, blk| {
        let (x, y) = grid.node(j);
        for t in terms {
            let c = t.coef.eval(x, y);
            if c == ZERO {
                continue;
            }
            for a in 0..nc {
                for b in 0..nc {
                    blk[a * nc + b] += t.matrix[(a, b)] * c;
                }
            }
        }
    });
    let active = (0..nc)
        .flat_map(|a| (0..nc).map(move |b| (a, b)))
        .filter(|&(a, b)| (0..ns).any(|j| field[j * nc * nc + a * nc + b] != ZERO))
        .collect();
    let mut diag = vec![ZERO; grid.n_modes() * nc * nc];
    for (i, blk) in diag.chunks_mut(nc * nc).enumerate() {
        for (d, m) in model.deriv.iter().enumerate() {
            let k = grid.wavenumber(d, i);
            for a in 0..nc {
                for b in 0..nc {
                    blk[a * nc + b] += m[(a, b)] * k;
                }
            }
        }
    }
    Ok(AssembledOperator {
        grid: grid.clone(),
        ncomp: nc,
        model_tag: model.tag.clone(),
        valley_block: model.valley_block,
        deriv: model.deriv.clone(),
        field,
        active,
        diag,
        engine: FftEngine::new(grid),
    })
}

impl AssembledOperator {
    pub fn dim(&self) -> usize {
        self.ncomp * self.grid.n_modes()
    }

    pub fn engine(&self) -> &FftEngine {
        &self.engine
    }

    fn field_component(&self, a: usize, b: usize) -> Vec<C64> {
        let nc = self.ncomp;
        (0..self.grid.n_samples())
            .map(|j| self.field[j * nc * nc + a * nc + b])
            .collect()
    }

    /// `Σ_d B_d k_d` at mode `i`.
    fn deriv_symbol(&self, i: usize) -> CMat {
        let mut s = CMat::zeros(self.ncomp);
        for (d, b) in self.deriv.iter().enumerate() {
            s = &s + &b.scale_re(self.grid.wavenumber(d, i));
        }
        s
    }

    /// Derivative block at mode `i`.
    pub fn mode_block(&self, i: usize) -> CMat {
        let nc = self.ncomp;
        CMat::from_fn(nc, |a, b| self.diag[i * nc * nc + a * nc + b])
    }

    /// Pointwise field `C(x_j)`.
    pub fn field_block(&self, j: usize) -> CMat {
        let nc = self.ncomp;
        CMat::from_fn(nc, |a, b| self.field[j * nc * nc + a * nc + b])
    }

    /// Matrix-free `H u`.
    pub fn apply(&self, u: &[C64]) -> Vec<C64> {
        let nm = self.grid.n_modes();
        let nc = self.ncomp;
        assert_eq!(u.len(), nc * nm);
        let mut out = vec![ZERO; nc * nm];
        for i in 0..nm {
            let blk = &self.diag[i * nc * nc..(i + 1) * nc * nc];
            for a in 0..nc {
                out[a * nm + i] = (0..nc).fold(ZERO, |z, b| z + blk[a * nc + b] * u[b * nm + i]);
            }
        }
        if self.active.is_empty() {
            return out;
        }
        let fine: Vec<Vec<C64>> = (0..nc).map(|b| self.engine.to_fine(&u[b * nm..(b + 1) * nm])).collect();
        let ns = self.grid.n_samples();
        for a in 0..nc {
            if !self.active.iter().any(|&(r, _)| r == a) {
                continue;
            }
            let mut w = vec![ZERO; ns];
            for &(_, b) in self.active.iter().filter(|&&(r, _)| r == a) {
                for (j, wj) in w.iter_mut().enumerate() {
                    *wj += self.field[j * nc * nc + a * nc + b] * fine[b][j];
                }
            }
            let m = self.engine.to_modes(&w);
            for (o, v) in out[a * nm..(a + 1) * nm].iter_mut().zip(m) {
                *o += v;
            }
        }
        out
    }

    /// `H X` column by column.
    pub fn apply_block(&self, x: &Mat<C64>, exec: Exec) -> Mat<C64> {
        let cols = par::map_range(exec, x.ncols(), |j| self.apply(x.col_as_slice(j)));
        Mat::from_fn(x.nrows(), x.ncols(), |i, j| cols[j][i])
    }

    /// Dense matrix; `O(dim²)` memory.
    pub fn dense(&self) -> Mat<C64> {
        let nm = self.grid.n_modes();
        let nc = self.ncomp;
        let coefs: Vec<Option<Vec<C64>>> = (0..nc * nc)
            .map(|ab| {
                let (a, b) = (ab / nc, ab % nc);
                self.active
                    .contains(&(a, b))
                    .then(|| self.engine.coefficients(&self.field_component(a, b)))
            })
            .collect();
        let modes: Vec<(i64, i64)> = (0..nm).map(|i| self.grid.mode(i)).collect();
        let diag: Vec<CMat> = (0..nm).map(|i| self.deriv_symbol(i)).collect();
        Mat::from_fn(nc * nm, nc * nm, |r, s| {
            let (a, k) = (r / nm, r % nm);
            let (b, l) = (s / nm, s % nm);
            let mut v = if k == l { diag[k][(a, b)] } else { ZERO };
            if let Some(c) = &coefs[a * nc + b] {
                let (p, q) = (modes[k], modes[l]);
                v += c[self.grid.fine_index(p.0 - q.0, p.1 - q.1)];
            }
            v
        })
    }

    /// Rigorous bound on the spectral radius: the derivative part is
    /// diagonal in modes and the multiplication part is a compression of a
    /// pointwise matrix field.
    pub fn norm_bound(&self) -> f64 {
        let nm = self.grid.n_modes();
        let nc = self.ncomp;
        let d = (0..nm)
            .map(|i| spectral_radius(&self.deriv_symbol(i)))
            .fold(0.0, f64::max);
        let m = (0..self.grid.n_samples())
            .map(|j| {
                let blk = &self.field[j * nc * nc..(j + 1) * nc * nc];
                let c = CMat::from_fn(nc, |a, b| blk[a * nc + b]);
                let c = CMat::from_fn(nc, |a, b| 0.5 * (c[(a, b)] + c[(b, a)].conj()));
                spectral_radius(&c)
            })
            .fold(0.0, f64::max);
        d + m
    }

    /// Relative Frobenius Hermiticity defect of the dense matrix.
    pub fn hermiticity_defect(&self) -> f64 {
        let h = self.dense();
        let n = h.nrows();
        let (mut num, mut den) = (0.0, 0.0);
        for j in 0..n {
            for i in 0..n {
                num += (h[(i, j)] - h[(j, i)].conj()).norm_sqr();
                den += h[(i, j)].norm_sqr();
            }
        }
        (num / den.max(f64::MIN_POSITIVE)).sqrt()
    }

    /// Galerkin multiplication by a scalar field on every component.
    pub fn scalar_multiply(&self, field: &[C64], u: &[C64]) -> Vec<C64> {
        let nm = self.grid.n_modes();
        let mut out = Vec::with_capacity(u.len());
        for c in 0..self.ncomp {
            out.extend(self.engine.multiply(field, &u[c * nm..(c + 1) * nm]));
        }
        out
    }

    /// `⟨u, f u⟩` for a real field `f`, with `Σ|u|² = 1` meaning unit mass.
    pub fn field_expectation(&self, field: &[f64], u: &[C64]) -> f64 {
        let nm = self.grid.n_modes();
        let ns = self.grid.n_samples() as f64;
        (0..self.ncomp)
            .map(|c| {
                let f = self.engine.to_fine(&u[c * nm..(c + 1) * nm]);
                f.iter().zip(field).map(|(v, w)| v.norm_sqr() * w).sum::<f64>() / ns
            })
            .sum()
    }

    /// Fine-grid density `Σ_c |u_c(x_j)|²` normalized to mean `Σ|u|²`.
    pub fn density(&self, u: &[C64]) -> Vec<f64> {
        let nm = self.grid.n_modes();
        let mut rho = vec![0.0; self.grid.n_samples()];
        for c in 0..self.ncomp {
            let f = self.engine.to_fine(&u[c * nm..(c + 1) * nm]);
            rho.iter_mut().zip(&f).for_each(|(r, v)| *r += v.norm_sqr());
        }
        rho
    }
}

fn spectral_radius(m: &CMat) -> f64 {
    if m.is_zero() {
        return 0.0;
    }
    m.eigvalsh().iter().fold(0.0, |a, v| a.max(v.abs()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cmat::{sigma1, sigma2, sigma3};
    use crate::model::{Coefficient, ModelOperator};

    #[test]
    fn grid_counts() {
        let g = FourierGrid::new(&[100.0], &[128]).unwrap();
        assert_eq!((g.n_modes(), g.n_samples()), (257, 387));
        assert_eq!(g.spacing(0), 100.0 / 387.0);
        let g2 = FourierGrid::new(&[100.0, 100.0], &[16, 16]).unwrap();
        assert_eq!((g2.n_modes(), g2.n_samples()), (33 * 33, 51 * 51));
        assert_eq!(g2.mode(0), (-16, -16));
        assert_eq!(g2.mode(33), (-16, -15));
        assert!(FourierGrid::new(&[0.0], &[4]).is_err());
        assert!(FourierGrid::new(&[1.0], &[0]).is_err());
    }

    #[test]
    fn multiplication_examples() {
        let g = FourierGrid::new(&[10.0], &[6]).unwrap();
        let one = g.sample_real(|_, _| 1.0);
        let m = multiplication_operator(&g, &one).unwrap();
        for i in 0..13 {
            for j in 0..13 {
                let e = if i == j { 1.0 } else { 0.0 };
                assert!((m[(i, j)] - C64::new(e, 0.0)).norm() < 1e-14);
            }
        }
        let cosf = g.sample_real(|x, _| (2.0 * PI * x / 10.0).cos());
        let m = multiplication_operator(&g, &cosf).unwrap();
        // column of mode k=0 (index 6) moves half weight to k=±1
        assert!((m[(5, 6)].re - 0.5).abs() < 1e-14 && (m[(7, 6)].re - 0.5).abs() < 1e-14);
        assert!(m[(6, 6)].norm() < 1e-14 && m[(8, 6)].norm() < 1e-14);
    }

    #[test]
    fn band_limited_products_are_exact() {
        let g = FourierGrid::new(&[7.0, 5.0], &[5, 4]).unwrap();
        let eng = FftEngine::new(&g);
        // f has bandwidth (3, 2), u has bandwidth (K, K): fine grid resolves both
        let f = |x: f64, y: f64| {
            C64::new((2.0 * PI * 3.0 * x / 7.0).cos() + 0.3, (2.0 * PI * 2.0 * y / 5.0).sin())
        };
        let u: Vec<C64> = (0..g.n_modes())
            .map(|i| C64::new((i as f64 * 0.7).sin(), (i as f64 * 0.3).cos()))
            .collect();
        let got = eng.multiply(&g.sample(f), &u);
        // direct spectral convolution
        let fh = |kx: i64, ky: i64| -> C64 {
            let mut v = ZERO;
            if kx.abs() == 3 && ky == 0 {
                v += 0.5;
            }
            if kx == 0 && ky == 0 {
                v += 0.3;
            }
            if kx == 0 && ky == 2 {
                v += C64::new(0.5, 0.0);
            }
            if kx == 0 && ky == -2 {
                v -= C64::new(0.5, 0.0);
            }
            v
        };
        for i in 0..g.n_modes() {
            let (kx, ky) = g.mode(i);
            let want = (0..g.n_modes()).fold(ZERO, |acc, j| {
                let (lx, ly) = g.mode(j);
                acc + fh(kx - lx, ky - ly) * u[j]
            });
            assert!((got[i] - want).norm() < 1e-12, "mode {i}");
        }
    }

    fn sample_model() -> ModelOperator {
        ModelOperator {
            tag: "test".into(),
            lengths: vec![6.0, 4.0],
            deriv: vec![sigma1(), sigma2()],
            terms: vec![],
            valley_block: None,
        }
        .with_term(
            sigma3(),
            Coefficient::real_field(|x, y| (2.0 * PI * x / 6.0).sin() * (1.0 + (2.0 * PI * y / 4.0).cos())),
        )
        .with_potential(|x, _| 0.2 * (2.0 * PI * 2.0 * x / 6.0).cos())
    }

    #[test]
    fn matrix_free_matches_dense() {
        let g = FourierGrid::new(&[6.0, 4.0], &[4, 3]).unwrap();
        let op = assemble(&sample_model(), &g).unwrap();
        let h = op.dense();
        assert!(op.hermiticity_defect() < 1e-12);
        let u: Vec<C64> = (0..op.dim()).map(|i| C64::new((i as f64).cos(), 0.1 * i as f64)).collect();
        let a = op.apply(&u);
        for i in 0..op.dim() {
            let want = (0..op.dim()).fold(ZERO, |acc, j| acc + h[(i, j)] * u[j]);
            assert!((a[i] - want).norm() < 1e-11);
        }
        let e = h.self_adjoint_eigenvalues(faer::Side::Lower).unwrap();
        let r = e.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        assert!(r <= op.norm_bound() + 1e-12);
    }

    #[test]
    fn assembly_is_linear() {
        let g = FourierGrid::new(&[6.0, 4.0], &[3, 3]).unwrap();
        let m = sample_model();
        let v1 = m.multiplication_part();
        let a = assemble(&m, &g).unwrap().dense();
        let free = ModelOperator {
            terms: vec![],
            ..m.clone()
        };
        let b = &assemble(&free, &g).unwrap().dense() + &assemble(&v1, &g).unwrap().dense();
        let mut d = 0.0f64;
        for j in 0..a.ncols() {
            for i in 0..a.nrows() {
                d = d.max((a[(i, j)] - b[(i, j)]).norm());
            }
        }
        assert!(d < 1e-14, "{d}");
    }

    #[test]
    fn free_dirac_spectrum() {
        let (lx, ly) = (5.0, 3.0);
        let g = FourierGrid::new(&[lx, ly], &[2, 2]).unwrap();
        let m = ModelOperator {
            tag: "free".into(),
            lengths: vec![lx, ly],
            deriv: vec![sigma1(), sigma2()],
            terms: vec![],
            valley_block: None,
        };
        let h = assemble(&m, &g).unwrap().dense();
        let mut got: Vec<f64> = h.self_adjoint_eigenvalues(faer::Side::Lower).unwrap();
        let mut want = vec![];
        for i in 0..g.n_modes() {
            let r = g.wavenumber(0, i).hypot(g.wavenumber(1, i));
            want.extend([r, -r]);
        }
        got.sort_by(f64::total_cmp);
        want.sort_by(f64::total_cmp);
        for (a, b) in got.iter().zip(&want) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_dimension_mismatch() {
        let g = FourierGrid::new(&[6.0], &[4]).unwrap();
        assert!(matches!(assemble(&sample_model(), &g), Err(FourierError::Dimension(_))));
        let g = FourierGrid::new(&[6.0, 5.0], &[4, 4]).unwrap();
        assert!(assemble(&sample_model(), &g).is_err());
    }
}
