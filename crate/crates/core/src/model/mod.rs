//! Continuum models: parameters, symbols, switch functions, geometry.

pub mod junction;
pub mod operator;
pub mod switch;
pub mod valley;

pub use junction::{dirac_symbol, junction_mass, DiracJunction, JunctionGeometry, MassPerturbation, PotentialBump};
pub use operator::{Coefficient, ModelOperator, ScalarField, Term};
pub use switch::{Profile, Switch};
pub use valley::{valley_operator, EffectivePotential, Envelope, ValleyKind, ValleySetup};

use crate::cmat::{raising, sigma0, sigma1, sigma2, sigma3, CMat};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ModelError {
    #[error("invalid model: {0}")]
    Invalid(String),
    #[error("bulk is gapless (lambda*omega = 0)")]
    Gapless,
}

/// Interlayer coupling pattern. `Plus` is the bulk `H_+` whose upper-right
/// block is `λA*` (so `U = A`); `Minus` is `H_-` with `U = A*`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Stacking {
    Plus,
    Minus,
}

impl Stacking {
    pub fn sign(self) -> f64 {
        match self {
            Stacking::Plus => 1.0,
            Stacking::Minus => -1.0,
        }
    }

    pub fn flip(self) -> Self {
        match self {
            Stacking::Plus => Stacking::Minus,
            Stacking::Minus => Stacking::Plus,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub omega: f64,
    pub lambda: f64,
    pub eta: i32,
    pub stacking: Stacking,
}

impl ModelParams {
    pub fn new(omega: f64, lambda: f64, eta: i32, stacking: Stacking) -> Result<Self, ModelError> {
        if eta != 1 && eta != -1 {
            return Err(ModelError::Invalid(format!("eta={eta} not in {{-1,1}}")));
        }
        if !omega.is_finite() || !lambda.is_finite() {
            return Err(ModelError::Invalid("non-finite parameter".into()));
        }
        Ok(Self {
            omega,
            lambda,
            eta,
            stacking,
        })
    }

    pub fn plus(omega: f64, lambda: f64) -> Self {
        Self::new(omega, lambda, 1, Stacking::Plus).unwrap()
    }

    pub fn is_gapped(&self) -> bool {
        self.omega * self.lambda != 0.0
    }

    pub fn require_gap(&self) -> Result<(), ModelError> {
        if self.is_gapped() {
            Ok(())
        } else {
            Err(ModelError::Gapless)
        }
    }

    pub fn with_stacking(mut self, s: Stacking) -> Self {
        self.stacking = s;
        self
    }
}

/// Coupling block `U` placed in the lower-left corner.
pub fn coupling_u(s: Stacking) -> CMat {
    match s {
        Stacking::Plus => raising(),
        Stacking::Minus => raising().adjoint(),
    }
}

/// `Ωσ3⊗I + I⊗(ξσ1 + ηζσ2) + λ(σ+⊗U* + σ-⊗U)`.
pub fn bulk_symbol(p: &ModelParams, xi: f64, zeta: f64) -> CMat {
    let dirac = &sigma1().scale_re(xi) + &sigma2().scale_re(p.eta as f64 * zeta);
    let u = coupling_u(p.stacking);
    let mut h = &sigma3().scale_re(p.omega).kron(&sigma0()) + &sigma0().kron(&dirac);
    let upper = raising().kron(&u.adjoint()).scale_re(p.lambda);
    let lower = raising().adjoint().kron(&u).scale_re(p.lambda);
    h = &(&h + &upper) + &lower;
    h
}

/// Partial derivatives `∂_ξ H`, `∂_ζ H` (constant in momentum).
pub fn bulk_symbol_derivs(p: &ModelParams) -> (CMat, CMat) {
    (
        sigma0().kron(&sigma1()),
        sigma0().kron(&sigma2()).scale_re(p.eta as f64),
    )
}

/// Domain wall on a period `[0, len)`: `-amp` near the ends, `+amp` past the
/// centre, transitions of half-width `width` at `len/2` (physical) and just
/// below `len` (periodization artifact).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PeriodicWall {
    pub len: f64,
    pub width: f64,
    pub amp: f64,
}

impl PeriodicWall {
    pub fn eval(&self, s: f64) -> f64 {
        let y = s - 0.5 * self.len;
        let h = 0.5 * self.len;
        let up = Switch::up(-self.width, self.width).eval(y);
        let down = Switch::down(h - 2.0 * self.width - 1.0, h - 1.0).eval(y);
        self.amp * (2.0 * up * down - 1.0)
    }

    /// Offset of the artifact wall centre from the physical one.
    pub fn artifact_offset(&self) -> f64 {
        0.5 * self.len - self.width - 1.0
    }
}

/// Interface model `H_e(ξ1)` as a 1D operator in `y` on `[0, Ly)`, physical
/// wall at `y = Ly/2` with `m = -1` below and `+1` above.
pub fn edge_operator(p: &ModelParams, xi1: f64, wall: PeriodicWall) -> ModelOperator {
    let (s0, s1, s2, s3) = (sigma0(), sigma1(), sigma2(), sigma3());
    let constant = &(&s3.scale_re(p.omega).kron(&s0) + &s0.kron(&s1).scale_re(xi1))
        + &s1.kron(&s1).scale_re(0.5 * p.lambda);
    let wall = PeriodicWall { amp: 1.0, ..wall };
    ModelOperator {
        tag: format!("edge(xi1={xi1})"),
        lengths: vec![wall.len],
        deriv: vec![s0.kron(&s2).scale_re(p.eta as f64)],
        terms: vec![],
        valley_block: None,
    }
    .with_term(constant, Coefficient::Const(crate::cmat::ONE))
    .with_term(
        s2.kron(&s2).scale_re(0.5 * p.lambda),
        Coefficient::real_field(move |s, _| wall.eval(s)),
    )
}

/// Edge symbol at a point with mass value `m` and transverse momentum `zeta`.
pub fn edge_symbol(p: &ModelParams, m: f64, xi1: f64, zeta: f64) -> CMat {
    let wall = PeriodicWall {
        len: 1.0,
        width: 0.1,
        amp: 1.0,
    };
    let mut op = edge_operator(p, xi1, wall);
    op.terms[1].coef = Coefficient::Const(num_complex::Complex64::new(m, 0.0));
    op.symbol(&[0.0], &[zeta])
}

/// `K = σ2⊗σ1`, the chiral-type symmetry of the edge model.
pub fn edge_symmetry() -> CMat {
    sigma2().kron(&sigma1())
}

/// Twisted-bilayer junction: the four-band model with `U(x, y)` following the
/// junction mass of `dj`.
pub fn tblg_junction_operator(p: &ModelParams, dj: &DiracJunction) -> ModelOperator {
    let (s0, s1, s2, s3) = (sigma0(), sigma1(), sigma2(), sigma3());
    let constant = &s3.scale_re(p.omega).kron(&s0) + &s1.kron(&s1).scale_re(0.5 * p.lambda);
    let d = dj.clone();
    ModelOperator {
        tag: "tblg-junction".into(),
        lengths: vec![dj.lx, dj.ly],
        deriv: vec![s0.kron(&s1), s0.kron(&s2).scale_re(p.eta as f64)],
        terms: vec![],
        valley_block: None,
    }
    .with_term(constant, Coefficient::Const(crate::cmat::ONE))
    .with_term(
        s2.kron(&s2).scale_re(0.5 * p.lambda),
        Coefficient::real_field(move |x, y| d.mass(x, y)),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    #[test]
    fn bulk_symbol_blocks() {
        let p = ModelParams::plus(1.0, 0.2);
        let h = bulk_symbol(&p, 0.0, 0.0);
        // upper-right block λA*, lower-left λA
        assert_eq!(h[(2, 1)].re, 0.2);
        assert_eq!(h[(0, 3)].re, 0.0);
        assert_eq!(h[(1, 2)].re, 0.2);
        let e = h.eigvalsh();
        let want = [-(1.04f64.sqrt()), -1.0, 1.0, 1.04f64.sqrt()];
        for (a, b) in e.iter().zip(want) {
            assert!((a - b).abs() < 1e-12);
        }
        let free = bulk_symbol(&ModelParams::plus(0.0, 0.0), 1.0, 0.0).eigvalsh();
        assert!((free[0] + 1.0).abs() < 1e-12 && (free[3] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn kronecker_form_matches_blocks() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let (o, l, x, z) = (
                rng.random_range(-2.0..2.0),
                rng.random_range(-2.0..2.0),
                rng.random_range(-5.0..5.0),
                rng.random_range(-5.0..5.0),
            );
            for (s, sgn) in [(Stacking::Plus, 1.0), (Stacking::Minus, -1.0)] {
                let p = ModelParams::new(o, l, -1, s).unwrap();
                let h = bulk_symbol(&p, x, z);
                assert_eq!(h.hermiticity_defect(), 0.0);
                let k = &(&(&sigma3().scale_re(o).kron(&sigma0())
                    + &sigma0().kron(&(&sigma1().scale_re(x) + &sigma2().scale_re(-z))))
                    + &sigma1().kron(&sigma1()).scale_re(0.5 * l))
                    + &sigma2().kron(&sigma2()).scale_re(0.5 * l * sgn);
                assert!((&h - &k).max_abs() < 1e-14);
                assert!((&edge_symbol(&p.with_stacking(Stacking::Plus), sgn, x, z) - &h).max_abs() < 1e-14);
            }
        }
    }

    #[test]
    fn edge_symmetry_conjugation() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let k = edge_symmetry();
        let p = ModelParams::plus(1.0, 0.2);
        for _ in 0..50 {
            let (m, x, z) = (
                rng.random_range(-1.0..1.0),
                rng.random_range(-3.0..3.0),
                rng.random_range(-3.0..3.0),
            );
            let lhs = &(&k.adjoint() * &edge_symbol(&p, m, x, z)) * &k;
            let rhs = edge_symbol(&p, m, -x, z).scale_re(-1.0);
            assert!((&lhs - &rhs).max_abs() < 1e-12);
        }
    }

    #[test]
    fn periodic_wall_shape() {
        let w = PeriodicWall {
            len: 200.0,
            width: 2.0,
            amp: 1.0,
        };
        assert_eq!(w.eval(0.0), -1.0);
        assert_eq!(w.eval(90.0), -1.0);
        assert_eq!(w.eval(110.0), 1.0);
        assert_eq!(w.eval(199.9), -1.0);
        assert!(w.eval(100.0).abs() < 1e-14);
    }
}
