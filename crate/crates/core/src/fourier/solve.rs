//! Dense and windowed Hermitian eigensolvers for assembled operators.
//!
//! The windowed path is Chebyshev-filtered subspace iteration on
//! `(H - c)²`, which pulls out the eigenpairs closest to the window centre
//! using only matrix-free products.

use super::{AssembledOperator, FourierError, FourierGrid};
use crate::par::{self, Exec};
use faer::{Mat, Side};
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolverKind {
    Dense,
    Chebyshev,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverOptions {
    /// Largest dimension solved densely when a window is given.
    pub dense_limit: usize,
    /// Polynomial degree in `(H - c)²` per filter pass.
    pub degree: usize,
    /// Absolute residual target `‖Hu - λu‖₂`.
    pub tol: f64,
    pub max_iter: usize,
    /// Initial subspace size; 0 picks one from the dimension.
    pub initial_size: usize,
    pub seed: u64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            dense_limit: 3000,
            degree: 20,
            tol: 1e-10,
            max_iter: 120,
            initial_size: 0,
            seed: 0x5eed,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverStats {
    pub kind: SolverKind,
    pub dim: usize,
    pub iterations: usize,
    pub matvecs: usize,
    pub subspace: usize,
    pub max_residual: f64,
}

/// Eigenpairs of an assembled operator, eigenvalues ascending.
#[derive(Clone, Debug)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<f64>,
    /// Orthonormal eigenvectors as columns.
    pub vectors: Mat<C64>,
    /// `None` for a complete decomposition.
    pub window: Option<(f64, f64)>,
    pub model_tag: String,
    pub grid: FourierGrid,
    pub ncomp: usize,
    pub stats: SolverStats,
}

impl SpectralDecomposition {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn vector(&self, j: usize) -> &[C64] {
        self.vectors.col_as_slice(j)
    }

    /// True when every eigenvalue in `[a, b]` is present.
    pub fn covers(&self, a: f64, b: f64) -> bool {
        match self.window {
            None => true,
            Some((lo, hi)) => lo <= a && b <= hi,
        }
    }

    /// `max |HV - VΛ|` entrywise.
    pub fn residual(&self, op: &AssembledOperator) -> f64 {
        let hv = op.apply_block(&self.vectors, par::default_exec());
        let mut r = 0.0f64;
        for j in 0..self.len() {
            let v = self.vector(j);
            for (i, &x) in v.iter().enumerate() {
                r = r.max((hv[(i, j)] - x * self.eigenvalues[j]).norm());
            }
        }
        r
    }

    /// `max |V*V - I|` entrywise.
    pub fn orthonormality_defect(&self) -> f64 {
        let g = self.vectors.adjoint() * &self.vectors;
        let mut d = 0.0f64;
        for j in 0..g.ncols() {
            for i in 0..g.nrows() {
                let e = if i == j { 1.0 } else { 0.0 };
                d = d.max((g[(i, j)] - C64::new(e, 0.0)).norm());
            }
        }
        d
    }
}

pub fn diagonalize(op: &AssembledOperator, window: Option<(f64, f64)>) -> Result<SpectralDecomposition, FourierError> {
    diagonalize_with(op, window, &SolverOptions::default())
}

pub fn diagonalize_with(
    op: &AssembledOperator,
    window: Option<(f64, f64)>,
    opts: &SolverOptions,
) -> Result<SpectralDecomposition, FourierError> {
    if let Some((a, b)) = window {
        if !(a < b) {
            return Err(FourierError::Grid(format!("empty window [{a}, {b}]")));
        }
        if op.dim() > opts.dense_limit {
            return chebyshev(op, (a, b), opts);
        }
    }
    dense(op, window)
}

fn solver_err(op: &AssembledOperator, msg: impl Into<String>) -> FourierError {
    FourierError::Solver {
        tag: format!("{} dim={}", op.model_tag, op.dim()),
        msg: msg.into(),
    }
}

fn dense(op: &AssembledOperator, window: Option<(f64, f64)>) -> Result<SpectralDecomposition, FourierError> {
    let h = op.dense();
    let n = h.nrows();
    let e = h
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| solver_err(op, format!("{e:?}")))?;
    let vals: Vec<f64> = (0..n).map(|i| e.S()[i].re).collect();
    let keep: Vec<usize> = (0..n)
        .filter(|&i| window.is_none_or(|(a, b)| a <= vals[i] && vals[i] <= b))
        .collect();
    let u = e.U();
    let vectors = Mat::from_fn(n, keep.len(), |i, j| u[(i, keep[j])]);
    let mut sd = SpectralDecomposition {
        eigenvalues: keep.iter().map(|&i| vals[i]).collect(),
        vectors,
        window,
        model_tag: op.model_tag.clone(),
        grid: op.grid.clone(),
        ncomp: op.ncomp,
        stats: SolverStats {
            kind: SolverKind::Dense,
            dim: n,
            iterations: 1,
            matvecs: 0,
            subspace: n,
            max_residual: 0.0,
        },
    };
    sd.stats.max_residual = column_residuals(op, &sd.vectors, &sd.eigenvalues)
        .into_iter()
        .fold(0.0, f64::max);
    Ok(sd)
}

fn column_residuals(op: &AssembledOperator, v: &Mat<C64>, vals: &[f64]) -> Vec<f64> {
    let hv = op.apply_block(v, par::default_exec());
    (0..v.ncols())
        .map(|j| {
            (0..v.nrows())
                .map(|i| (hv[(i, j)] - v[(i, j)] * vals[j]).norm_sqr())
                .sum::<f64>()
                .sqrt()
        })
        .collect()
}

fn random_block(n: usize, m: usize, rng: &mut ChaCha8Rng) -> Mat<C64> {
    let mut x = Mat::zeros(n, m);
    for j in 0..m {
        for i in 0..n {
            x[(i, j)] = C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5);
        }
    }
    x
}

/// `(H - c) X`.
fn shifted(op: &AssembledOperator, x: &Mat<C64>, c: f64, exec: Exec) -> Mat<C64> {
    let mut y = op.apply_block(x, exec);
    for j in 0..x.ncols() {
        for i in 0..x.nrows() {
            y[(i, j)] -= x[(i, j)] * c;
        }
    }
    y
}

/// Scaled Chebyshev filter damping `(H-c)²` eigenvalues in `[cut, gmax]`.
fn filter(op: &AssembledOperator, x: &Mat<C64>, c: f64, cut: f64, gmax: f64, degree: usize, exec: Exec) -> Mat<C64> {
    let g = |v: &Mat<C64>| shifted(op, &shifted(op, v, c, exec), c, exec);
    let e = 0.5 * (gmax - cut);
    let mid = 0.5 * (gmax + cut);
    let mut sigma = e / (0.0 - mid);
    let tau = 2.0 / sigma;
    let mut prev = x.clone();
    let gx = g(x);
    let mut cur = Mat::from_fn(x.nrows(), x.ncols(), |i, j| (gx[(i, j)] - x[(i, j)] * mid) * (sigma / e));
    for _ in 1..degree {
        let sn = 1.0 / (tau - sigma);
        let gy = g(&cur);
        let next = Mat::from_fn(x.nrows(), x.ncols(), |i, j| {
            (gy[(i, j)] - cur[(i, j)] * mid) * (2.0 * sn / e) - prev[(i, j)] * (sigma * sn)
        });
        prev = cur;
        cur = next;
        sigma = sn;
    }
    cur
}

fn chebyshev(op: &AssembledOperator, (a, b): (f64, f64), opts: &SolverOptions) -> Result<SpectralDecomposition, FourierError> {
    let exec = par::default_exec();
    let n = op.dim();
    let c = 0.5 * (a + b);
    let r = 0.5 * (b - a);
    let bound = op.norm_bound();
    let gmax = (bound + c.abs()).powi(2) * 1.001 + 1e-12;
    if r * r >= gmax {
        return dense(op, Some((a, b)));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut m = if opts.initial_size > 0 {
        opts.initial_size
    } else {
        (n / 20).clamp(64, 400)
    }
    .min(n);
    let mut x = random_block(n, m, &mut rng);
    let mut cut = (2.0 * r).max(0.5 * gmax.sqrt()).powi(2).min(0.5 * gmax).max(r * r * 1.1);
    let mut matvecs = 0;
    for iter in 1..=opts.max_iter {
        let y = filter(op, &x, c, cut, gmax, opts.degree.max(2), exec);
        matvecs += 2 * opts.degree.max(2) * m;
        let q = y.qr().compute_thin_Q();
        let hq = op.apply_block(&q, exec);
        matvecs += m;
        let s = q.adjoint() * &hq;
        let s = Mat::from_fn(m, m, |i, j| 0.5 * (s[(i, j)] + s[(j, i)].conj()));
        let e = s
            .self_adjoint_eigen(Side::Lower)
            .map_err(|e| solver_err(op, format!("Rayleigh-Ritz: {e:?}")))?;
        let theta: Vec<f64> = (0..m).map(|i| e.S()[i].re).collect();
        let w = e.U().to_owned();
        x = &q * &w;
        let hx = &hq * &w;
        let res: Vec<f64> = (0..m)
            .map(|j| {
                (0..n)
                    .map(|i| (hx[(i, j)] - x[(i, j)] * theta[j]).norm_sqr())
                    .sum::<f64>()
                    .sqrt()
            })
            .collect();
        // Pairs at `c ± E` share one value of `G`, so a truncated subspace
        // can hold their sum, which has a Ritz value in the window but most of
        // its mass outside; such vectors are recognised by `‖(H - c)x‖ > r`.
        let inside: Vec<usize> = (0..m)
            .filter(|&j| (theta[j] - c).abs() <= r && (theta[j] - c).hypot(res[j]) <= 1.01 * r)
            .collect();
        let outside = (0..m).filter(|&j| (theta[j] - c).abs() > 1.05 * r).count();
        let guard = (m / 3).max(24);
        if outside < guard {
            if m == n {
                return dense(op, Some((a, b)));
            }
            let extra = (m / 2).max(32).min(n - m);
            let add = random_block(n, extra, &mut rng);
            x = Mat::from_fn(n, m + extra, |i, j| if j < m { x[(i, j)] } else { add[(i, j - m)] });
            m += extra;
            continue;
        }
        let worst = inside.iter().map(|&j| res[j]).fold(0.0, f64::max);
        if worst < opts.tol {
            let vectors = Mat::from_fn(n, inside.len(), |i, j| x[(i, inside[j])]);
            return Ok(SpectralDecomposition {
                eigenvalues: inside.iter().map(|&j| theta[j]).collect(),
                vectors,
                window: Some((a, b)),
                model_tag: op.model_tag.clone(),
                grid: op.grid.clone(),
                ncomp: op.ncomp,
                stats: SolverStats {
                    kind: SolverKind::Chebyshev,
                    dim: n,
                    iterations: iter,
                    matvecs,
                    subspace: m,
                    max_residual: worst,
                },
            });
        }
        cut = theta
            .iter()
            .map(|t| (t - c).powi(2))
            .fold(0.0, f64::max)
            .clamp(r * r * 1.1, 0.9 * gmax);
    }
    Err(solver_err(op, format!("no convergence in {} filter passes", opts.max_iter)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cmat::{sigma1, sigma2, sigma3};
    use crate::fourier::assemble;
    use crate::model::{Coefficient, ModelOperator};
    use std::f64::consts::PI;

    fn massive_wall(l: f64) -> ModelOperator {
        ModelOperator {
            tag: "wall".into(),
            lengths: vec![l, l],
            deriv: vec![sigma1(), sigma2()],
            terms: vec![],
            valley_block: None,
        }
        .with_term(sigma3(), Coefficient::real_field(move |_, y| (2.0 * PI * y / l).cos()))
    }

    #[test]
    fn dense_solution_is_orthonormal() {
        let g = FourierGrid::new(&[20.0, 20.0], &[6, 6]).unwrap();
        let op = assemble(&massive_wall(20.0), &g).unwrap();
        let sd = diagonalize(&op, None).unwrap();
        assert_eq!(sd.len(), op.dim());
        assert!(sd.orthonormality_defect() < 1e-10);
        assert!(sd.residual(&op) < 1e-8);
        assert!(sd.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
        let win = diagonalize(&op, Some((-0.5, 0.5))).unwrap();
        assert!(win.eigenvalues.iter().all(|e| e.abs() <= 0.5));
        let count = sd.eigenvalues.iter().filter(|e| e.abs() <= 0.5).count();
        assert_eq!(win.len(), count);
    }

    #[test]
    fn chebyshev_matches_dense() {
        let g = FourierGrid::new(&[20.0, 20.0], &[10, 10]).unwrap();
        let op = assemble(&massive_wall(20.0), &g).unwrap();
        let w = (-0.6, 0.5);
        let d = diagonalize(&op, Some(w)).unwrap();
        let opts = SolverOptions {
            dense_limit: 10,
            initial_size: 24,
            ..Default::default()
        };
        let c = diagonalize_with(&op, Some(w), &opts).unwrap();
        assert_eq!(c.stats.kind, SolverKind::Chebyshev);
        assert_eq!(c.len(), d.len());
        for (x, y) in c.eigenvalues.iter().zip(&d.eigenvalues) {
            assert!((x - y).abs() < 1e-10, "{x} {y}");
        }
        assert!(c.orthonormality_defect() < 1e-10);
        assert!(c.residual(&op) < 1e-8);
    }

    #[test]
    fn random_hermitian_orthonormal() {
        // a 100×100 Hermitian matrix as a 1D operator with 4 components
        let g = FourierGrid::new(&[3.0], &[12]).unwrap();
        let m = ModelOperator {
            tag: "rand".into(),
            lengths: vec![3.0],
            deriv: vec![crate::cmat::CMat::diag_real(&[1.0, -0.5, 0.3, 2.0])],
            terms: vec![],
            valley_block: None,
        }
        .with_term(
            crate::cmat::CMat::from_fn(4, |i, j| C64::new((i + j) as f64 * 0.1, i as f64 - j as f64)),
            Coefficient::real_field(|x, _| (x * 2.0 * PI / 3.0).sin() + 0.3),
        );
        let op = assemble(&m, &g).unwrap();
        assert_eq!(op.dim(), 100);
        let sd = diagonalize(&op, None).unwrap();
        assert!(sd.orthonormality_defect() < 1e-10);
        assert!(sd.residual(&op) < 1e-8);
    }
}
