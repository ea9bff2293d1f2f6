//! Wavepackets on the hexagonal junction: edge-projected initial data,
//! spectral propagation and branch-resolved weights.

use crate::cmat::{vdot, vnorm, CMat, ZERO};
use crate::fourier::{
    assemble, diagonalize_with, AssembledOperator, FourierError, FourierGrid, SolverOptions, SpectralDecomposition,
};
use crate::model::{DiracJunction, MassPerturbation, Switch};
use crate::par;
use crate::transport::TransportError;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DynamicsError {
    #[error("no right-moving in-window state overlaps the packet")]
    EmptyProjection,
    #[error("decomposition misses {0:.3e} of the packet's mass")]
    Coverage(f64),
    #[error(transparent)]
    Fourier(#[from] FourierError),
    #[error(transparent)]
    Transport(#[from] TransportError),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Wavepacket {
    /// Mode coefficients, component-major.
    pub state: Vec<C64>,
    pub time: f64,
}

impl Wavepacket {
    pub fn norm(&self) -> f64 {
        vnorm(&self.state)
    }
}

/// Initial packet on the incoming branch.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PacketSpec {
    /// Packet centre relative to the junction centre.
    pub offset: (f64, f64),
    /// Gaussian width along the branch.
    pub width: f64,
    /// Gaussian width across the branch, close to the bound-state profile.
    pub transverse: f64,
    pub carrier: f64,
    /// `+1` keeps states moving towards `+x` through the probe, `-1` the rest.
    pub direction: f64,
    /// States with `|E|` below this enter the projection.
    pub window: f64,
}

impl Default for PacketSpec {
    fn default() -> Self {
        Self {
            offset: (-25.0, 0.0),
            width: 5.0,
            transverse: 1.0,
            carrier: 0.0,
            direction: 1.0,
            window: 0.9,
        }
    }
}

/// Unit-norm Gaussian with spinor `(1, 1)/√2`, the bound spinor of the
/// incoming wall.
pub fn gaussian_packet(op: &AssembledOperator, center: (f64, f64), spec: &PacketSpec) -> Vec<C64> {
    let fine = op.grid.sample(|x, y| {
        let (dx, dy) = (x - center.0, y - center.1);
        let env = (-dx * dx / (2.0 * spec.width.powi(2)) - dy * dy / (2.0 * spec.transverse.powi(2))).exp();
        C64::from_polar(env, spec.carrier * dx)
    });
    let modes = op.engine().to_modes(&fine);
    let mut psi = Vec::with_capacity(op.dim());
    for _ in 0..op.ncomp {
        psi.extend_from_slice(&modes);
    }
    let n = vnorm(&psi);
    psi.iter_mut().for_each(|v| *v /= n);
    psi
}

/// Probe pair: `p` switches on across `x = center.0`, `q` localizes to a
/// box around the packet centre.
fn probe(op: &AssembledOperator, center: (f64, f64)) -> (Vec<C64>, Vec<C64>) {
    let g = &op.grid;
    let up = Switch::up(center.0 - 2.0, center.0 + 2.0);
    let bx = Switch::down(8.0, 11.0);
    let by = Switch::down(6.0, 9.0);
    let mut p = Vec::with_capacity(g.n_samples());
    let mut q = Vec::with_capacity(g.n_samples());
    for j in 0..g.n_samples() {
        let (x, y) = g.node(j);
        p.push(C64::new(up.eval(x), 0.0));
        q.push(C64::new(bx.eval((x - center.0).abs()) * by.eval((y - center.1).abs()), 0.0));
    }
    (p, q)
}

/// `Re ⟨ψ, Q i[H, P] ψ⟩`; for an eigenvector pass its eigenvalue to skip one
/// application of `H`.
fn probe_current(op: &AssembledOperator, p: &[C64], q: &[C64], psi: &[C64], lambda: Option<f64>) -> f64 {
    let pu = op.scalar_multiply(p, psi);
    let qu = op.scalar_multiply(q, psi);
    let hqu = op.apply(&qu);
    let pqu = op.scalar_multiply(p, &qu);
    let back = match lambda {
        Some(l) => vdot(&pqu, psi) * l,
        None => vdot(&pqu, &op.apply(psi)),
    };
    (C64::new(0.0, 1.0) * (vdot(&hqu, &pu) - back)).re
}

pub fn expectation(op: &AssembledOperator, psi: &[C64]) -> f64 {
    vdot(psi, &op.apply(psi)).re / vdot(psi, psi).re
}

#[derive(Clone, Debug, PartialEq)]
pub struct EdgePacket {
    pub packet: Wavepacket,
    /// Squared norm of the raw Gaussian kept by the projection.
    pub captured: f64,
    pub energy: f64,
    /// Probe current of the projected packet.
    pub current: f64,
    /// Number of eigenstates used.
    pub states: usize,
}

/// Projects a Gaussian at `center` onto in-window eigenstates whose probe
/// current has the sign of `spec.direction`.
pub fn edge_packet(
    sd: &SpectralDecomposition,
    op: &AssembledOperator,
    center: (f64, f64),
    spec: &PacketSpec,
) -> Result<EdgePacket, DynamicsError> {
    let raw = gaussian_packet(op, center, spec);
    let (p, q) = probe(op, center);
    let picked: Vec<usize> = (0..sd.len()).filter(|&j| sd.eigenvalues[j].abs() < spec.window).collect();
    let coefs = par::map_slice(par::default_exec(), &picked, |&j| {
        let u = sd.vector(j);
        let v = probe_current(op, &p, &q, u, Some(sd.eigenvalues[j]));
        (v * spec.direction > 0.0).then(|| vdot(u, &raw))
    });
    let captured: f64 = coefs.iter().flatten().map(|c| c.norm_sqr()).sum();
    if captured < 1e-12 {
        return Err(DynamicsError::EmptyProjection);
    }
    let mut state = vec![ZERO; op.dim()];
    let mut states = 0;
    for (&j, c) in picked.iter().zip(&coefs) {
        if let Some(c) = c {
            states += 1;
            for (s, &u) in state.iter_mut().zip(sd.vector(j)) {
                *s += c * u;
            }
        }
    }
    let n = vnorm(&state);
    state.iter_mut().for_each(|v| *v /= n);
    Ok(EdgePacket {
        energy: expectation(op, &state),
        current: probe_current(op, &p, &q, &state, None),
        packet: Wavepacket { state, time: 0.0 },
        captured,
        states,
    })
}

/// `ψ(t) = Σ_j e^{-iλ_j t} ⟨u_j, ψ0⟩ u_j`; refuses packets the
/// decomposition does not span.
pub fn propagate(sd: &SpectralDecomposition, psi0: &Wavepacket, t: f64) -> Result<Wavepacket, DynamicsError> {
    let coefs: Vec<C64> = par::map_range(par::default_exec(), sd.len(), |j| vdot(sd.vector(j), &psi0.state));
    let mass: f64 = coefs.iter().map(|c| c.norm_sqr()).sum();
    let n2 = psi0.norm().powi(2);
    let deficit = (n2 - mass).abs() / n2;
    if deficit > 1e-10 {
        return Err(DynamicsError::Coverage(deficit));
    }
    let mut state = vec![ZERO; psi0.state.len()];
    for (j, c) in coefs.iter().enumerate() {
        let a = c * C64::from_polar(1.0, -sd.eigenvalues[j] * t);
        for (s, &u) in state.iter_mut().zip(sd.vector(j)) {
            *s += a * u;
        }
    }
    Ok(Wavepacket {
        state,
        time: psi0.time + t,
    })
}

/// Strang splitting `e^{-iDτ/2} e^{-iCτ} e^{-iDτ/2}` with the field step
/// taken pointwise on the fine grid. Only a cross-check for [`propagate`]:
/// the pointwise exponential is not the exponential of the Galerkin block,
/// and truncation back to the modes is not norm-preserving.
pub fn strang_propagate(op: &AssembledOperator, psi0: &Wavepacket, t: f64, steps: usize) -> Wavepacket {
    let tau = t / steps as f64;
    let nc = op.ncomp;
    let nm = op.grid.n_modes();
    let ns = op.grid.n_samples();
    let half_d: Vec<CMat> = (0..nm).map(|i| expm_herm(&op.mode_block(i), -0.5 * tau)).collect();
    let full_c: Vec<CMat> = (0..ns).map(|j| expm_herm(&op.field_block(j), -tau)).collect();
    let kick = |psi: &mut [C64], blocks: &[CMat], stride: usize| {
        let mut v = vec![ZERO; nc];
        for (i, e) in blocks.iter().enumerate() {
            for a in 0..nc {
                v[a] = psi[a * stride + i];
            }
            for (a, w) in e.apply(&v).into_iter().enumerate() {
                psi[a * stride + i] = w;
            }
        }
    };
    let mut psi = psi0.state.clone();
    let mut fine = vec![ZERO; nc * ns];
    for _ in 0..steps {
        kick(&mut psi, &half_d, nm);
        for a in 0..nc {
            fine[a * ns..(a + 1) * ns].copy_from_slice(&op.engine().to_fine(&psi[a * nm..(a + 1) * nm]));
        }
        kick(&mut fine, &full_c, ns);
        for a in 0..nc {
            psi[a * nm..(a + 1) * nm].copy_from_slice(&op.engine().to_modes(&fine[a * ns..(a + 1) * ns]));
        }
        kick(&mut psi, &half_d, nm);
    }
    Wavepacket {
        state: psi,
        time: psi0.time + t,
    }
}

/// `exp(i s h)` for Hermitian `h`.
fn expm_herm(h: &CMat, s: f64) -> CMat {
    let n = h.dim();
    let (vals, vecs) = h.eigh();
    CMat::from_fn(n, |a, b| {
        (0..n).fold(ZERO, |acc, k| acc + vecs[k][a] * C64::from_polar(1.0, s * vals[k]) * vecs[k][b].conj())
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BranchSpec {
    pub r_min: f64,
    /// Angular half-width of each tube, radians.
    pub half_width: f64,
}

impl Default for BranchSpec {
    fn default() -> Self {
        Self {
            r_min: 10.0,
            half_width: PI / 18.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BranchWeights {
    /// Ray directions in degrees.
    pub angles: Vec<f64>,
    pub weights: Vec<f64>,
    /// Mass outside every tube.
    pub residue: f64,
}

impl BranchWeights {
    pub fn weight_at(&self, deg: f64) -> f64 {
        self.angles
            .iter()
            .zip(&self.weights)
            .find(|(a, _)| (((*a - deg) + 180.0).rem_euclid(360.0) - 180.0).abs() < 1e-9)
            .map(|(_, w)| *w)
            .unwrap_or(0.0)
    }

    /// The ray among `among` carrying the most weight.
    pub fn dominant(&self, among: &[f64]) -> f64 {
        among
            .iter()
            .copied()
            .max_by(|a, b| self.weight_at(*a).total_cmp(&self.weight_at(*b)))
            .unwrap_or(f64::NAN)
    }
}

/// Mass fractions in angular tubes around the `2k` interface rays, beyond
/// `r_min` from the junction centre.
pub fn branch_weights(op: &AssembledOperator, psi: &Wavepacket, dj: &DiracJunction, spec: &BranchSpec) -> BranchWeights {
    let rho = op.density(&psi.state);
    let total: f64 = rho.iter().sum();
    let k = dj.geom.k as usize;
    let angles: Vec<f64> = (0..2 * k).map(|i| 180.0 * i as f64 / k as f64).collect();
    let (xc, yc) = dj.center();
    let hw = spec.half_width.to_degrees();
    let mut weights = vec![0.0; angles.len()];
    for (j, r) in rho.iter().enumerate() {
        let (x, y) = op.grid.node(j);
        let (dx, dy) = (x - xc, y - yc);
        if dx.hypot(dy) <= spec.r_min {
            continue;
        }
        let th = dy.atan2(dx).to_degrees();
        for (w, a) in weights.iter_mut().zip(&angles) {
            if ((th - a + 180.0).rem_euclid(360.0) - 180.0).abs() < hw {
                *w += r;
            }
        }
    }
    weights.iter_mut().for_each(|w| *w /= total);
    let residue = 1.0 - weights.iter().sum::<f64>();
    BranchWeights {
        angles,
        weights,
        residue,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SteerRun {
    pub n: usize,
    pub t: f64,
    pub packet: PacketSpec,
    pub branches: BranchSpec,
    pub solver: SolverOptions,
}

impl Default for SteerRun {
    fn default() -> Self {
        Self {
            n: 16,
            t: 50.0,
            packet: PacketSpec::default(),
            branches: BranchSpec::default(),
            solver: SolverOptions::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SteerOutcome {
    pub theta_m: Option<f64>,
    pub initial: BranchWeights,
    pub last: BranchWeights,
    pub captured: f64,
    pub norm_drift: f64,
    pub energy_drift: f64,
}

/// Junction with an optional steering perturbation, assembled and
/// diagonalized on the packet window.
pub fn junction_setup(
    base: &DiracJunction,
    theta_m: Option<f64>,
    run: &SteerRun,
) -> Result<(DiracJunction, AssembledOperator, SpectralDecomposition), DynamicsError> {
    let mut dj = base.clone();
    dj.perturbation = theta_m.map(MassPerturbation::new);
    let grid = FourierGrid::new(&[dj.lx, dj.ly], &[run.n, run.n])?;
    let op = assemble(&dj.operator(), &grid)?;
    let w = run.packet.window * 1.02;
    let sd = diagonalize_with(&op, Some((-w, w)), &run.solver)?;
    Ok((dj, op, sd))
}

/// Propagates the edge packet to `run.t` and reports branch weights.
pub fn steer(base: &DiracJunction, theta_m: Option<f64>, run: &SteerRun) -> Result<SteerOutcome, DynamicsError> {
    let (dj, op, sd) = junction_setup(base, theta_m, run)?;
    let (xc, yc) = dj.center();
    let center = (xc + run.packet.offset.0, yc + run.packet.offset.1);
    let ep = edge_packet(&sd, &op, center, &run.packet)?;
    let psi = propagate(&sd, &ep.packet, run.t)?;
    Ok(SteerOutcome {
        theta_m,
        initial: branch_weights(&op, &ep.packet, &dj, &run.branches),
        last: branch_weights(&op, &psi, &dj, &run.branches),
        captured: ep.captured,
        norm_drift: (psi.norm() - ep.packet.norm()).abs(),
        energy_drift: (expectation(&op, &psi.state) - ep.energy).abs(),
    })
}
