//! Interface and junction conductivities by the sum-over-states trace
//! `2π Σ_j φ'(λ_j) ⟨u_j, Q i[H,P] u_j⟩`.

mod filter;

pub use filter::{make_filter, DensityWeight, FilterKind, FilterSpec, SampledFilter, DEFAULT_THETA};

use crate::cmat::{vdot, ZERO};
use crate::fourier::{
    assemble, diagonalize_with, AssembledOperator, FourierError, FourierGrid, SolverOptions, SolverStats,
    SpectralDecomposition,
};
use crate::model::{valley_operator, DiracJunction, EffectivePotential, ModelError, ValleyKind, ValleySetup};
use crate::par;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum TransportError {
    #[error("filter: {0}")]
    Filter(String),
    #[error("spectral coverage: {0}")]
    Coverage(String),
    #[error("operator '{0}' carries no valley blocks")]
    Untagged(String),
    #[error(transparent)]
    Fourier(#[from] FourierError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Contribution {
    pub energy: f64,
    pub weight: f64,
    /// `⟨u, Q i[H,P] u⟩`, real and imaginary parts.
    pub element: [f64; 2],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConductivityResult {
    pub two_pi_sigma: f64,
    /// Imaginary part of the trace, times 2π; round-off sized when `Q` and
    /// `P` are well separated from the periodization walls.
    pub two_pi_sigma_im: f64,
    pub contributions: Vec<Contribution>,
    pub provenance: String,
}

impl ConductivityResult {
    pub fn recompute(&self) -> f64 {
        2.0 * PI
            * self
                .contributions
                .iter()
                .fold(0.0, |a, c| a + c.weight * c.element[0])
    }

    fn from_parts(contributions: Vec<Contribution>, provenance: String) -> Self {
        let im = contributions.iter().fold(0.0, |a, c| a + c.weight * c.element[1]);
        let mut r = Self {
            two_pi_sigma: 0.0,
            two_pi_sigma_im: 2.0 * PI * im,
            contributions,
            provenance,
        };
        r.two_pi_sigma = r.recompute();
        r
    }
}

fn check_coverage(sd: &SpectralDecomposition, w: &DensityWeight) -> Result<Vec<usize>, TransportError> {
    let (a, b) = w.support();
    if !sd.covers(a, b) {
        return Err(TransportError::Coverage(format!(
            "weight support [{a}, {b}] vs window {:?}",
            sd.window
        )));
    }
    Ok((0..sd.len()).filter(|&j| w.eval(sd.eigenvalues[j]) > 1e-14).collect())
}

fn element(op: &AssembledOperator, u: &[C64], lambda: f64, p: &[C64], q: &[C64]) -> C64 {
    let pu = op.scalar_multiply(p, u);
    let qu = op.scalar_multiply(q, u);
    let hqu = op.apply(&qu);
    // ⟨u, Q(HP - PH)u⟩ = ⟨HQu, Pu⟩ - λ⟨Qu, Pu⟩
    C64::new(0.0, 1.0) * (vdot(&hqu, &pu) - vdot(&qu, &pu) * lambda)
}

/// `2π Tr Q i[H,P] φ'(H)` with `H`, `P`, `Q` the Galerkin matrices.
pub fn conductivity(
    sd: &SpectralDecomposition,
    op: &AssembledOperator,
    p: &SampledFilter,
    q: &SampledFilter,
    w: &DensityWeight,
) -> Result<ConductivityResult, TransportError> {
    let states = check_coverage(sd, w)?;
    let (pc, qc) = (p.complex(), q.complex());
    let contributions = par::map_slice(par::default_exec(), &states, |&j| {
        let lam = sd.eigenvalues[j];
        let m = element(op, sd.vector(j), lam, &pc, &qc);
        Contribution {
            energy: lam,
            weight: w.eval(lam),
            element: [m.re, m.im],
        }
    });
    Ok(ConductivityResult::from_parts(
        contributions,
        format!("{} p={:?} q={:?} e0={}", op.model_tag, p.spec.kind, q.spec.kind, w.e0),
    ))
}

/// Same trace for the 2×2 Dirac model through the pointwise commutator
/// `σ1 ∂x p + σ2 ∂y p`; a cross-check of [`conductivity`].
pub fn dirac_conductivity_oracle(
    sd: &SpectralDecomposition,
    op: &AssembledOperator,
    p: &SampledFilter,
    q: &SampledFilter,
    w: &DensityWeight,
) -> Result<f64, TransportError> {
    if op.ncomp != 2 {
        return Err(TransportError::Filter("oracle needs a two-component operator".into()));
    }
    let states = check_coverage(sd, w)?;
    let nm = op.grid.n_modes();
    let ns = op.grid.n_samples() as f64;
    let parts = par::map_slice(par::default_exec(), &states, |&j| {
        let u = sd.vector(j);
        let u1 = op.engine().to_fine(&u[..nm]);
        let u2 = op.engine().to_fine(&u[nm..]);
        let mut s = ZERO;
        for i in 0..u1.len() {
            let g = C64::new(p.dx[i], -p.dy[i]);
            s += q.value[i] * (u1[i].conj() * g * u2[i] + u2[i].conj() * g.conj() * u1[i]);
        }
        w.eval(sd.eigenvalues[j]) * s.re / ns
    });
    Ok(2.0 * PI * par::ordered_sum(&parts))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Valley {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

impl Valley {
    fn index(self) -> usize {
        match self {
            Valley::Plus => 0,
            Valley::Minus => 1,
        }
    }
}

/// `2π Tr Q i[H_vv, P] φ'(H)` for the diagonal valley block `v`.
pub fn valley_conductivity(
    sd: &SpectralDecomposition,
    op: &AssembledOperator,
    p: &SampledFilter,
    q: &SampledFilter,
    w: &DensityWeight,
    valley: Valley,
) -> Result<ConductivityResult, TransportError> {
    let b = op.valley_block.ok_or_else(|| TransportError::Untagged(op.model_tag.clone()))?;
    let states = check_coverage(sd, w)?;
    let nm = op.grid.n_modes();
    let (lo, hi) = (valley.index() * b * nm, (valley.index() + 1) * b * nm);
    let restrict = |v: &[C64]| -> Vec<C64> {
        v.iter()
            .enumerate()
            .map(|(i, &x)| if (lo..hi).contains(&i) { x } else { ZERO })
            .collect()
    };
    let h_vv = |v: &[C64]| restrict(&op.apply(v));
    let (pc, qc) = (p.complex(), q.complex());
    let contributions = par::map_slice(par::default_exec(), &states, |&j| {
        let lam = sd.eigenvalues[j];
        let uv = restrict(sd.vector(j));
        let pu = op.scalar_multiply(&pc, &uv);
        let qu = op.scalar_multiply(&qc, &uv);
        let pqu = op.scalar_multiply(&pc, &qu);
        // ⟨u, Q(H_vv P - P H_vv)u⟩ = ⟨H_vv Q u_v, P u_v⟩ - ⟨P Q u_v, H_vv u_v⟩
        let m = C64::new(0.0, 1.0) * (vdot(&h_vv(&qu), &pu) - vdot(&pqu, &h_vv(&uv)));
        Contribution {
            energy: lam,
            weight: w.eval(lam),
            element: [m.re, m.im],
        }
    });
    Ok(ConductivityResult::from_parts(
        contributions,
        format!("{} valley={valley:?} p={:?} e0={}", op.model_tag, p.spec.kind, w.e0),
    ))
}

/// Discretization and filter settings for junction runs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct JunctionRun {
    pub delta: f64,
    pub e0: f64,
    pub solver: SolverOptions,
}

impl Default for JunctionRun {
    fn default() -> Self {
        Self {
            delta: 2.0,
            e0: 0.9,
            solver: SolverOptions::default(),
        }
    }
}

impl JunctionRun {
    /// Spectral window slightly wider than the weight support.
    pub fn window(&self) -> (f64, f64) {
        (-1.02 * self.e0, 1.02 * self.e0)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JunctionTable {
    pub x0: Vec<f64>,
    pub n: Vec<usize>,
    /// `values[i][k]` is `2πσ̃` at `x0[i]`, `n[k]`.
    pub values: Vec<Vec<f64>>,
    pub stats: Vec<SolverStats>,
}

/// Decomposition of the Dirac junction at cutoff `n` in both directions.
pub fn junction_decomposition(
    dj: &DiracJunction,
    n: usize,
    run: &JunctionRun,
) -> Result<(AssembledOperator, SpectralDecomposition), TransportError> {
    let grid = FourierGrid::new(&[dj.lx, dj.ly], &[n, n])?;
    let op = assemble(&dj.operator(), &grid)?;
    let sd = diagonalize_with(&op, Some(run.window()), &run.solver)?;
    Ok((op, sd))
}

/// `2πσ̃` of one decomposition for each filter position.
pub fn junction_values(
    op: &AssembledOperator,
    sd: &SpectralDecomposition,
    x0_list: &[f64],
    run: &JunctionRun,
) -> Result<Vec<f64>, TransportError> {
    let w = DensityWeight::new(run.e0)?;
    let q = make_filter(&FilterSpec::mask_q(run.delta), &op.grid)?;
    x0_list
        .iter()
        .map(|&x0| {
            let p = make_filter(&FilterSpec::junction(x0, run.delta), &op.grid)?;
            Ok(conductivity(sd, op, &p, &q, &w)?.two_pi_sigma)
        })
        .collect()
}

pub fn junction_table(
    dj: &DiracJunction,
    x0_list: &[f64],
    n_list: &[usize],
    run: &JunctionRun,
) -> Result<JunctionTable, TransportError> {
    let mut values = vec![vec![0.0; n_list.len()]; x0_list.len()];
    let mut stats = vec![];
    for (k, &n) in n_list.iter().enumerate() {
        let (op, sd) = junction_decomposition(dj, n, run)?;
        for (i, v) in junction_values(&op, &sd, x0_list, run)?.into_iter().enumerate() {
            values[i][k] = v;
        }
        stats.push(sd.stats.clone());
    }
    Ok(JunctionTable {
        x0: x0_list.to_vec(),
        n: n_list.to_vec(),
        values,
        stats,
    })
}

/// Settings for the two-valley models.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ValleyRun {
    pub setup: ValleySetup,
    pub kx: usize,
    /// Transverse cutoff, `H4` only.
    pub ky: usize,
    pub x0: f64,
    pub delta: f64,
    pub e0: f64,
    pub solver: SolverOptions,
}

impl Default for ValleyRun {
    fn default() -> Self {
        Self {
            setup: ValleySetup::default(),
            kx: 256,
            ky: 12,
            x0: 100.0,
            delta: 2.0,
            e0: 0.1,
            solver: SolverOptions::default(),
        }
    }
}

impl ValleyRun {
    pub fn grid(&self, kind: ValleyKind) -> Result<FourierGrid, FourierError> {
        match kind {
            ValleyKind::H4 => FourierGrid::new(&[self.setup.lx, self.setup.ly], &[self.kx, self.ky]),
            _ => FourierGrid::new(&[self.setup.lx], &[self.kx]),
        }
    }

    /// Filters acting along `x` only.
    pub fn filters(&self, grid: &FourierGrid) -> Result<(SampledFilter, SampledFilter), TransportError> {
        let lx = [self.setup.lx];
        let p1 = FilterSpec::edge_1d(self.x0, self.delta);
        let q1 = FilterSpec::mask_1d(self.delta);
        p1.validate(&lx)?;
        q1.validate(&lx)?;
        let sample = |s: &FilterSpec| {
            let n = grid.n_samples();
            let mut f = SampledFilter {
                spec: *s,
                value: Vec::with_capacity(n),
                dx: Vec::with_capacity(n),
                dy: vec![0.0; n],
            };
            for j in 0..n {
                let (v, d, _) = s.eval(&lx, grid.node(j).0, 0.0);
                f.value.push(v);
                f.dx.push(d);
            }
            f
        };
        Ok((sample(&p1), sample(&q1)))
    }
}

/// `(σ_+, σ_-)` for one valley model at one `φ'` centre.
pub fn valley_pair(
    kind: ValleyKind,
    pot: EffectivePotential,
    run: &ValleyRun,
) -> Result<(f64, f64), TransportError> {
    let op = assemble(&valley_operator(kind, pot, &run.setup)?, &run.grid(kind)?)?;
    let w = DensityWeight::new(run.e0)?;
    let (a, b) = w.support();
    let sd = diagonalize_with(&op, Some((1.02 * a, 1.02 * b)), &run.solver)?;
    let (p, q) = run.filters(&op.grid)?;
    let plus = valley_conductivity(&sd, &op, &p, &q, &w, Valley::Plus)?;
    let minus = valley_conductivity(&sd, &op, &p, &q, &w, Valley::Minus)?;
    Ok((plus.two_pi_sigma, minus.two_pi_sigma))
}

/// `σ_{I,+}(V0, E)` with `φ'` centred at each `E` (equivalently `H → H - E`).
pub fn energy_sweep(
    kind: ValleyKind,
    make_pot: impl Fn(f64) -> EffectivePotential,
    v0_list: &[f64],
    e_list: &[f64],
    run: &ValleyRun,
) -> Result<Vec<Vec<f64>>, TransportError> {
    let w = DensityWeight::new(run.e0)?;
    let lo = e_list.iter().cloned().fold(f64::INFINITY, f64::min) - run.e0;
    let hi = e_list.iter().cloned().fold(f64::NEG_INFINITY, f64::max) + run.e0;
    let pad = 0.02 * (hi - lo).max(run.e0);
    let grid = run.grid(kind)?;
    let (p, q) = run.filters(&grid)?;
    v0_list
        .iter()
        .map(|&v0| {
            let op = assemble(&valley_operator(kind, make_pot(v0), &run.setup)?, &grid)?;
            let sd = diagonalize_with(&op, Some((lo - pad, hi + pad)), &run.solver)?;
            e_list
                .iter()
                .map(|&e| Ok(valley_conductivity(&sd, &op, &p, &q, &w.shifted(e), Valley::Plus)?.two_pi_sigma))
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fourier::diagonalize;
    use crate::model::Envelope;

    fn small_junction() -> (AssembledOperator, SpectralDecomposition) {
        let dj = DiracJunction::default();
        let grid = FourierGrid::new(&[dj.lx, dj.ly], &[10, 10]).unwrap();
        let op = assemble(&dj.operator(), &grid).unwrap();
        let sd = diagonalize(&op, None).unwrap();
        (op, sd)
    }

    #[test]
    fn constant_filter_gives_zero() {
        let (op, sd) = small_junction();
        let w = DensityWeight::new(0.9).unwrap();
        let one = SampledFilter::constant(&op.grid, 1.0);
        let q = make_filter(&FilterSpec::mask_q(2.0), &op.grid).unwrap();
        let r = conductivity(&sd, &op, &one, &q, &w).unwrap();
        assert!(r.two_pi_sigma.abs() < 1e-12, "{}", r.two_pi_sigma);
        assert_eq!(r.recompute(), r.two_pi_sigma);
    }

    #[test]
    fn pointwise_commutator_vanishes_for_flat_filter() {
        let (op, sd) = small_junction();
        let w = DensityWeight::new(0.9).unwrap();
        let q = make_filter(&FilterSpec::mask_q(2.0), &op.grid).unwrap();
        let flat = SampledFilter::constant(&op.grid, 1.0);
        assert!(dirac_conductivity_oracle(&sd, &op, &flat, &q, &w).unwrap().abs() < 1e-12);
        let p = make_filter(&FilterSpec::junction(50.0, 2.0), &op.grid).unwrap();
        assert!(dirac_conductivity_oracle(&sd, &op, &p, &q, &w).unwrap().is_finite());
    }

    #[test]
    fn coverage_is_enforced() {
        let (op, _) = small_junction();
        let sd = diagonalize(&op, Some((-0.5, 0.5))).unwrap();
        let w = DensityWeight::new(0.9).unwrap();
        let p = make_filter(&FilterSpec::junction(50.0, 2.0), &op.grid).unwrap();
        let q = make_filter(&FilterSpec::mask_q(2.0), &op.grid).unwrap();
        assert!(matches!(conductivity(&sd, &op, &p, &q, &w), Err(TransportError::Coverage(_))));
        assert!(matches!(
            valley_conductivity(&sd, &op, &p, &q, &w, Valley::Plus),
            Err(TransportError::Untagged(_))
        ));
    }

    #[test]
    fn valley_pair_cancels() {
        let run = ValleyRun {
            kx: 96,
            setup: ValleySetup {
                lx: 100.0,
                ..Default::default()
            },
            x0: 50.0,
            ..Default::default()
        };
        let chi = Envelope {
            plateau: 5.0,
            support: 10.0,
        };
        for pot in [
            EffectivePotential::Slow1d { v0: 0.2, chi },
            EffectivePotential::TwoScale {
                v0: 0.1,
                omega: 2.0,
                eps: 1.0,
                chi,
            },
        ] {
            let kind = match pot {
                EffectivePotential::Slow1d { .. } => ValleyKind::H2,
                _ => ValleyKind::H2eps,
            };
            let (a, b) = valley_pair(kind, pot, &run).unwrap();
            assert!((a + b).abs() < 1e-8, "{a} {b}");
        }
    }
}
