//! Hexagonal junction geometry and the Dirac junction mass.

use super::operator::{Coefficient, ModelOperator};
use super::switch::Switch;
use super::ModelError;
use crate::cmat::{sigma0, sigma1, sigma2, sigma3, CMat};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GeometryParams", into = "GeometryParams")]
pub struct JunctionGeometry {
    /// Number of sector pairs.
    pub k: u32,
    pub eps_r: f64,
    pub theta0: f64,
    pub theta1: f64,
    /// Radial cutoff, `0` below `eps_r`, `1` above `1`.
    pub chi: Switch,
}

/// Serialized form; the cutoff is rebuilt and the geometry revalidated.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(default)]
struct GeometryParams {
    k: u32,
    eps_r: f64,
    theta0: f64,
    theta1: f64,
}

impl Default for GeometryParams {
    fn default() -> Self {
        JunctionGeometry::default().into()
    }
}

impl From<JunctionGeometry> for GeometryParams {
    fn from(g: JunctionGeometry) -> Self {
        Self {
            k: g.k,
            eps_r: g.eps_r,
            theta0: g.theta0,
            theta1: g.theta1,
        }
    }
}

impl TryFrom<GeometryParams> for JunctionGeometry {
    type Error = ModelError;

    fn try_from(g: GeometryParams) -> Result<Self, ModelError> {
        Self::new(g.k, g.eps_r, g.theta0, g.theta1)
    }
}

impl Default for JunctionGeometry {
    fn default() -> Self {
        Self::new(3, 0.25, 5.0 * PI / 6.0, 0.0).expect("default geometry is admissible")
    }
}

impl JunctionGeometry {
    pub fn new(k: u32, eps_r: f64, theta0: f64, theta1: f64) -> Result<Self, ModelError> {
        if k == 0 {
            return Err(ModelError::Invalid("junction k must be positive".into()));
        }
        if !(eps_r > 0.0 && eps_r < 1.0) {
            return Err(ModelError::Invalid(format!("eps_r={eps_r} outside (0,1)")));
        }
        if !(theta0 > 0.0 && theta0 < PI) {
            return Err(ModelError::Invalid(format!("theta0={theta0} outside (0,π)")));
        }
        // g_Θ vanishes at θ1 ± θ0; those angles must avoid the zeros of sin kθ
        for z in [theta1 + theta0, theta1 - theta0] {
            if (k as f64 * z).sin().abs() < 1e-9 {
                return Err(ModelError::Invalid(
                    "zero sets of f_Θ and g_Θ intersect".into(),
                ));
            }
        }
        Ok(Self {
            k,
            eps_r,
            theta0,
            theta1,
            chi: Switch::up(eps_r, 1.0),
        })
    }

    pub fn f_theta(&self, theta: f64) -> f64 {
        (self.k as f64 * theta).sin()
    }

    pub fn g_theta(&self, theta: f64) -> f64 {
        (theta - self.theta1).cos() - self.theta0.cos()
    }

    pub fn eval_f(&self, x: f64, y: f64) -> f64 {
        let r = x.hypot(y);
        let c = self.chi.eval(r);
        if c == 0.0 {
            return 0.0;
        }
        c * r * self.f_theta(y.atan2(x))
    }

    pub fn eval_g(&self, x: f64, y: f64) -> f64 {
        let r = x.hypot(y);
        let c = self.chi.eval(r);
        if c == 0.0 {
            return 0.0;
        }
        c * r * self.g_theta(y.atan2(x))
    }

    /// Constants `C1, C2` with `C1 ⟨x,y⟩ ≤ ⟨f,g⟩ ≤ C2 ⟨x,y⟩`, from a fine
    /// angular scan of `f_Θ² + g_Θ²`.
    pub fn growth_constants(&self) -> (f64, f64) {
        let n = 20_000;
        let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
        for i in 0..n {
            let t = 2.0 * PI * i as f64 / n as f64;
            let a = self.f_theta(t).hypot(self.g_theta(t));
            lo = lo.min(a);
            hi = hi.max(a);
        }
        // slack for the finite angular scan
        let c1 = 0.99 * lo.min(1.0) / 2f64.sqrt();
        let c2 = hi.max(1.0) * 1.01;
        (c1, c2)
    }

    /// Interface ray directions `θ = jπ/k`.
    pub fn interface_angles(&self) -> Vec<f64> {
        (0..2 * self.k).map(|j| j as f64 * PI / self.k as f64).collect()
    }
}

/// `m̃ = m(f(x, y))` for an odd switch `m` from −1 to 1.
pub fn junction_mass(geom: &JunctionGeometry, m: &Switch, x: f64, y: f64) -> f64 {
    m.eval(geom.eval_f(x, y))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MassPerturbation {
    pub amplitude: f64,
    pub sigma_w: f64,
    pub theta_m: f64,
}

impl Default for MassPerturbation {
    fn default() -> Self {
        Self::new(0.0)
    }
}

impl MassPerturbation {
    pub fn new(theta_m: f64) -> Self {
        Self {
            amplitude: 0.25,
            sigma_w: 5.0,
            theta_m,
        }
    }

    /// Value at offsets `(x, y)` from the junction centre.
    pub fn eval(&self, x: f64, y: f64) -> f64 {
        if self.amplitude == 0.0 {
            return 0.0;
        }
        let g = (-(x * x + y * y) / (2.0 * self.sigma_w * self.sigma_w)).exp();
        self.amplitude * g * (self.theta_m.sin() * x + self.theta_m.cos() * y)
    }
}

/// Smooth scalar bump `a·S(|x − c|)`, exactly zero beyond `radius`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PotentialBump {
    pub amplitude: f64,
    /// Centre relative to the junction centre.
    pub offset: (f64, f64),
    pub radius: f64,
}

impl PotentialBump {
    pub fn eval(&self, x: f64, y: f64) -> f64 {
        let r = (x - self.offset.0).hypot(y - self.offset.1);
        self.amplitude * Switch::down(0.5 * self.radius, self.radius).eval(r)
    }
}

impl Default for PotentialBump {
    fn default() -> Self {
        Self {
            amplitude: 0.1,
            offset: (4.0, 3.0),
            radius: 8.0,
        }
    }
}

/// Dirac junction `D_x σ1 + D_y σ2 + m̃ σ3` on the torus `[0,Lx)×[0,Ly)`,
/// junction at the centre.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DiracJunction {
    pub lx: f64,
    pub ly: f64,
    pub geom: JunctionGeometry,
    /// Half-width of the mass transition in `f`.
    pub mass_width: f64,
    /// Global sign of the mass; `-1` makes the default filter read `+1`.
    pub orient: f64,
    /// Width of the taper that sends the mass to 0 at `|y − yc| = Ly/2`.
    pub y_taper: f64,
    pub perturbation: Option<MassPerturbation>,
    /// Scalar potential added on both components.
    pub potential: Option<PotentialBump>,
}

impl Default for DiracJunction {
    fn default() -> Self {
        Self {
            lx: 100.0,
            ly: 100.0,
            geom: JunctionGeometry::default(),
            mass_width: 3.0,
            orient: -1.0,
            y_taper: 4.0,
            perturbation: None,
            potential: None,
        }
    }
}

impl DiracJunction {
    pub fn center(&self) -> (f64, f64) {
        (0.5 * self.lx, 0.5 * self.ly)
    }

    pub fn mass_switch(&self) -> Switch {
        Switch::new(-1.0, 1.0, -self.mass_width, self.mass_width)
    }

    /// Unperturbed periodized mass at absolute torus coordinates.
    pub fn base_mass(&self, x: f64, y: f64) -> f64 {
        let (xc, yc) = self.center();
        let (xr, yr) = (x - xc, y - yc);
        let half = 0.5 * self.ly;
        let taper = Switch::down(half - self.y_taper, half).eval(yr.abs());
        if taper == 0.0 {
            return 0.0;
        }
        self.orient * junction_mass(&self.geom, &self.mass_switch(), xr, yr) * taper
    }

    pub fn mass(&self, x: f64, y: f64) -> f64 {
        let m0 = self.base_mass(x, y);
        match &self.perturbation {
            Some(p) => {
                let (xc, yc) = self.center();
                m0 - p.eval(x - xc, y - yc)
            }
            None => m0,
        }
    }

    pub fn operator(&self) -> ModelOperator {
        let me = self.clone();
        let base = ModelOperator {
            tag: "dirac-junction".into(),
            lengths: vec![self.lx, self.ly],
            deriv: vec![sigma1(), sigma2()],
            terms: vec![],
            valley_block: None,
        }
        .with_term(sigma3(), Coefficient::real_field(move |x, y| me.mass(x, y)));
        match self.potential {
            Some(v) => {
                let (xc, yc) = self.center();
                base.with_term(sigma0(), Coefficient::real_field(move |x, y| v.eval(x - xc, y - yc)))
            }
            None => base,
        }
    }
}

/// Pointwise Dirac symbol `ξσ1 + ζσ2 + mσ3`.
pub fn dirac_symbol(mass: f64, xi: f64, zeta: f64) -> CMat {
    &(&sigma1().scale_re(xi) + &sigma2().scale_re(zeta)) + &sigma3().scale_re(mass)
}
