//! Two-valley models: the 1D pair `H2`, its two-scale version `H2^ε`, and
//! the 2D four-band `H4` with a transverse domain wall.

use super::operator::{Coefficient, ModelOperator};
use super::switch::Switch;
use super::{ModelError, PeriodicWall};
use crate::cmat::{sigma0, sigma1, sigma2, sigma3, CMat};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ValleyKind {
    H2,
    H2eps,
    H4,
}

/// Even bump: 1 on `[-plateau, plateau]`, 0 outside `[-support, support]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Envelope {
    pub plateau: f64,
    pub support: f64,
}

impl Envelope {
    pub fn eval(&self, t: f64) -> f64 {
        Switch::down(self.plateau, self.support).eval(t.abs())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "kebab-case")]
pub enum EffectivePotential {
    /// `V̂(x,0) = 0`, `V̂(x,±2) = v0 χ(x)/2`.
    Slow1d { v0: f64, chi: Envelope },
    /// `V̂(x,0,y) = 0`, `V̂(x,±2,y) = v0 χ(x) ξ(y)/2`.
    Slow2d { v0: f64, chi: Envelope, xi: Envelope },
    /// `V(x, x/ε) = v0 χ(x) cos(ω x/ε)`.
    TwoScale {
        v0: f64,
        omega: f64,
        eps: f64,
        chi: Envelope,
    },
}

impl EffectivePotential {
    pub fn default_chi() -> Envelope {
        Envelope {
            plateau: 10.0,
            support: 20.0,
        }
    }

    pub fn default_xi() -> Envelope {
        Envelope {
            plateau: 5.0,
            support: 10.0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ValleySetup {
    pub lx: f64,
    /// Transverse period, `H4` only.
    pub ly: f64,
    /// Coefficient of `D_x` in each valley block.
    pub drift: [f64; 2],
    pub wall_amp: f64,
    pub wall_width: f64,
}

impl Default for ValleySetup {
    fn default() -> Self {
        Self {
            lx: 200.0,
            ly: 40.0,
            drift: [1.0, -1.0],
            wall_amp: 1.0,
            wall_width: 1.0,
        }
    }
}

impl ValleySetup {
    /// Transverse wall profile used by `H4`. Its sign makes the channel
    /// bound at `y = Ly/2` the `σ1 = +1` spinor, on which `H4` acts as `+H2`.
    pub fn wall(&self) -> PeriodicWall {
        PeriodicWall {
            len: self.ly,
            width: self.wall_width,
            amp: -self.wall_amp,
        }
    }
}

/// Builds the valley-tagged operator; valley `+` owns the first block.
pub fn valley_operator(
    kind: ValleyKind,
    pot: EffectivePotential,
    setup: &ValleySetup,
) -> Result<ModelOperator, ModelError> {
    if setup.lx <= 0.0 || (kind == ValleyKind::H4 && setup.ly <= 0.0) {
        return Err(ModelError::Invalid("non-positive domain length".into()));
    }
    let xc = 0.5 * setup.lx;
    let yc = 0.5 * setup.ly;
    let drift = CMat::diag_real(&setup.drift);
    let e12 = CMat::unit(2, 0, 1);
    let e21 = CMat::unit(2, 1, 0);
    match (kind, pot) {
        (ValleyKind::H2, EffectivePotential::Slow1d { v0, chi }) => {
            let c = move |x: f64, _: f64| 0.5 * v0 * chi.eval(x - xc);
            Ok(ModelOperator {
                tag: "H2".into(),
                lengths: vec![setup.lx],
                deriv: vec![drift],
                terms: vec![],
                valley_block: Some(1),
            }
            .with_term(e12, Coefficient::real_field(c))
            .with_term(e21, Coefficient::real_field(c)))
        }
        (ValleyKind::H2eps, EffectivePotential::TwoScale { v0, omega, eps, chi }) => {
            if eps <= 0.0 {
                return Err(ModelError::Invalid("eps must be positive".into()));
            }
            let v = move |x: f64| {
                let t = x - xc;
                v0 * chi.eval(t) * (omega * t / eps).cos()
            };
            let phase = move |x: f64, s: f64| C64::from_polar(v(x), s * 2.0 * (x - xc) / eps);
            Ok(ModelOperator {
                tag: "H2eps".into(),
                lengths: vec![setup.lx],
                deriv: vec![drift],
                terms: vec![],
                valley_block: Some(1),
            }
            .with_term(CMat::identity(2), Coefficient::real_field(move |x, _| v(x)))
            .with_term(e12, Coefficient::complex_field(move |x, _| phase(x, -1.0)))
            .with_term(e21, Coefficient::complex_field(move |x, _| phase(x, 1.0))))
        }
        (ValleyKind::H4, EffectivePotential::Slow2d { v0, chi, xi }) => {
            let s1 = sigma1();
            let wall = setup.wall();
            let c = move |x: f64, y: f64| 0.5 * v0 * chi.eval(x - xc) * xi.eval(y - yc);
            Ok(ModelOperator {
                tag: "H4".into(),
                lengths: vec![setup.lx, setup.ly],
                deriv: vec![drift.kron(&s1), sigma0().kron(&sigma2())],
                terms: vec![],
                valley_block: Some(2),
            }
            .with_term(
                sigma0().kron(&sigma3()),
                Coefficient::real_field(move |_, y| wall.eval(y)),
            )
            .with_term(e12.kron(&s1), Coefficient::real_field(c))
            .with_term(e21.kron(&s1), Coefficient::real_field(c)))
        }
        (ValleyKind::H4, _) => Err(ModelError::Invalid(
            "H4 needs a two-dimensional potential".into(),
        )),
        (k, p) => Err(ModelError::Invalid(format!(
            "potential {p:?} does not fit model {k:?}"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_mismatched_potential() {
        let s = ValleySetup::default();
        let p1 = EffectivePotential::Slow1d {
            v0: 0.1,
            chi: EffectivePotential::default_chi(),
        };
        assert!(valley_operator(ValleyKind::H4, p1, &s).is_err());
        assert!(valley_operator(ValleyKind::H2, p1, &s).is_ok());
    }

    #[test]
    fn h2_effective_potential_values() {
        let s = ValleySetup::default();
        let p = EffectivePotential::Slow1d {
            v0: 0.3,
            chi: EffectivePotential::default_chi(),
        };
        let op = valley_operator(ValleyKind::H2, p, &s).unwrap();
        let h = op.symbol(&[100.0], &[0.0]);
        assert_eq!(h[(0, 0)].re, 0.0);
        assert!((h[(0, 1)].re - 0.15).abs() < 1e-15);
        assert!((h[(1, 0)].re - 0.15).abs() < 1e-15);
        let far = op.symbol(&[10.0], &[2.0]);
        assert_eq!(far, CMat::diag_real(&[2.0, -2.0]));
    }

    #[test]
    fn two_scale_symbol_is_hermitian() {
        let s = ValleySetup::default();
        let p = EffectivePotential::TwoScale {
            v0: 0.1,
            omega: 2.0,
            eps: 1.0,
            chi: EffectivePotential::default_chi(),
        };
        let op = valley_operator(ValleyKind::H2eps, p, &s).unwrap();
        let pts: Vec<(f64, f64)> = (0..200).map(|i| (i as f64, 0.0)).collect();
        assert!(op.is_formally_hermitian(&pts));
    }
}
