//! Smooth switch functions: exactly `v1` below `c1`, exactly `v2` above `c2`.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Profile {
    /// `½(1 + tanh(tan(π(t − ½))))`, C^∞ with flat plateaus.
    #[default]
    TanhMollified,
    /// `t³(10 − 15t + 6t²)`, C² only.
    PolynomialSmoothstep,
}

impl Profile {
    /// Unit step on `[0, 1]`, clamped outside.
    pub fn step(self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        if t >= 1.0 {
            return 1.0;
        }
        match self {
            Profile::TanhMollified => 0.5 * (1.0 + (PI * (t - 0.5)).tan().tanh()),
            Profile::PolynomialSmoothstep => t * t * t * (10.0 + t * (-15.0 + 6.0 * t)),
        }
    }

    pub fn step_deriv(self, t: f64) -> f64 {
        if t <= 0.0 || t >= 1.0 {
            return 0.0;
        }
        match self {
            Profile::TanhMollified => {
                let a = (PI * (t - 0.5)).tan();
                let c = a.cosh();
                if !c.is_finite() {
                    return 0.0;
                }
                0.5 * PI * (1.0 + a * a) / (c * c)
            }
            Profile::PolynomialSmoothstep => 30.0 * t * t * (1.0 - t) * (1.0 - t),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Switch {
    pub v1: f64,
    pub v2: f64,
    pub c1: f64,
    pub c2: f64,
    #[serde(default)]
    pub profile: Profile,
}

impl Switch {
    pub fn new(v1: f64, v2: f64, c1: f64, c2: f64) -> Self {
        assert!(c1 <= c2, "switch interval must satisfy c1 <= c2");
        Self {
            v1,
            v2,
            c1,
            c2,
            profile: Profile::default(),
        }
    }

    pub fn with_profile(mut self, profile: Profile) -> Self {
        self.profile = profile;
        self
    }

    /// Interpolation weight in `[0, 1]`; matrix-valued switches use
    /// `V1 + w (V2 − V1)`.
    pub fn weight(&self, t: f64) -> f64 {
        if t <= self.c1 {
            return 0.0;
        }
        if t >= self.c2 {
            return 1.0;
        }
        self.profile.step((t - self.c1) / (self.c2 - self.c1))
    }

    pub fn eval(&self, t: f64) -> f64 {
        let w = self.weight(t);
        if w == 0.0 {
            self.v1
        } else if w == 1.0 {
            self.v2
        } else {
            self.v1 + (self.v2 - self.v1) * w
        }
    }

    pub fn deriv(&self, t: f64) -> f64 {
        if t <= self.c1 || t >= self.c2 {
            return 0.0;
        }
        let h = self.c2 - self.c1;
        (self.v2 - self.v1) * self.profile.step_deriv((t - self.c1) / h) / h
    }

    /// Unit switch from 0 to 1 over `[c1, c2]`.
    pub fn up(c1: f64, c2: f64) -> Self {
        Self::new(0.0, 1.0, c1, c2)
    }

    /// Unit switch from 1 to 0 over `[c1, c2]`.
    pub fn down(c1: f64, c2: f64) -> Self {
        Self::new(1.0, 0.0, c1, c2)
    }
}

/// `M1 + w(t) (M2 − M1)`; the values `v1`, `v2` of `s` are ignored.
pub fn eval_matrix(s: &Switch, t: f64, m1: &CMat, m2: &CMat) -> CMat {
    let w = s.weight(t);
    m1 + &(m2 - m1).scale_re(w)
}

use crate::cmat::CMat;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_plateaus_and_monotone() {
        for p in [Profile::TanhMollified, Profile::PolynomialSmoothstep] {
            let s = Switch::new(-1.0, 1.0, -3.0, 3.0).with_profile(p);
            assert_eq!(s.eval(-3.0), -1.0);
            assert_eq!(s.eval(-10.0), -1.0);
            assert_eq!(s.eval(3.0), 1.0);
            assert!(s.eval(0.0).abs() < 1e-14);
            let mut prev = -1.0;
            for i in 0..=600 {
                let v = s.eval(-3.0 + i as f64 * 0.01);
                assert!(v >= prev - 1e-15);
                prev = v;
            }
        }
    }

    #[test]
    fn derivative_matches_finite_difference() {
        for p in [Profile::TanhMollified, Profile::PolynomialSmoothstep] {
            let s = Switch::new(2.0, -1.0, 0.5, 4.0).with_profile(p);
            for i in 1..50 {
                let t = 0.5 + 3.5 * i as f64 / 50.0;
                let h = 1e-6;
                let fd = (s.eval(t + h) - s.eval(t - h)) / (2.0 * h);
                assert!((fd - s.deriv(t)).abs() < 1e-6, "{p:?} t={t}");
            }
        }
    }

    #[test]
    fn matrix_switch_interpolates() {
        let s = Switch::up(0.0, 1.0);
        let a = crate::cmat::sigma1();
        let b = crate::cmat::sigma3();
        assert_eq!(eval_matrix(&s, -1.0, &a, &b), a);
        assert_eq!(eval_matrix(&s, 2.0, &a, &b), b);
    }
}
