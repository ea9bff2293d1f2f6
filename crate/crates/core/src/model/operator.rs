//! First-order differential operators with matrix coefficients,
//! `H = Σ_d B_d D_d + Σ_t f_t(x, y) C_t` on a periodic box.

use crate::cmat::CMat;
use num_complex::Complex64 as C64;
use std::fmt;
use std::sync::Arc;

pub type ScalarField = Arc<dyn Fn(f64, f64) -> C64 + Send + Sync>;

#[derive(Clone)]
pub enum Coefficient {
    Const(C64),
    /// Closed-form field on the torus, evaluated at absolute coordinates.
    /// One-dimensional operators receive `y = 0`.
    Field(ScalarField),
}

impl Coefficient {
    pub fn real_field(f: impl Fn(f64, f64) -> f64 + Send + Sync + 'static) -> Self {
        Coefficient::Field(Arc::new(move |x, y| C64::new(f(x, y), 0.0)))
    }

    pub fn complex_field(f: impl Fn(f64, f64) -> C64 + Send + Sync + 'static) -> Self {
        Coefficient::Field(Arc::new(f))
    }

    pub fn eval(&self, x: f64, y: f64) -> C64 {
        match self {
            Coefficient::Const(c) => *c,
            Coefficient::Field(f) => f(x, y),
        }
    }
}

impl fmt::Debug for Coefficient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coefficient::Const(c) => write!(f, "Const({c})"),
            Coefficient::Field(_) => write!(f, "Field(..)"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Term {
    pub matrix: CMat,
    pub coef: Coefficient,
}

/// Operator description consumed by `fourier::assemble`.
#[derive(Clone, Debug)]
pub struct ModelOperator {
    pub tag: String,
    /// Period along each axis; length 1 or 2.
    pub lengths: Vec<f64>,
    /// Coefficient of `D_d = -i ∂_d` for each axis.
    pub deriv: Vec<CMat>,
    pub terms: Vec<Term>,
    /// Components per valley block when the operator is valley-tagged:
    /// valley `v` owns components `v*b .. (v+1)*b`.
    pub valley_block: Option<usize>,
}

impl ModelOperator {
    pub fn ncomp(&self) -> usize {
        self.deriv[0].dim()
    }

    pub fn dims(&self) -> usize {
        self.lengths.len()
    }

    /// Pointwise symbol at position `pos` and momentum `xi`.
    pub fn symbol(&self, pos: &[f64], xi: &[f64]) -> CMat {
        let n = self.ncomp();
        let (x, y) = (pos[0], pos.get(1).copied().unwrap_or(0.0));
        let mut h = CMat::zeros(n);
        for (b, &k) in self.deriv.iter().zip(xi) {
            h = &h + &b.scale_re(k);
        }
        for t in &self.terms {
            h = &h + &t.matrix.scale(t.coef.eval(x, y));
        }
        h
    }

    pub fn with_term(mut self, matrix: CMat, coef: Coefficient) -> Self {
        assert_eq!(matrix.dim(), self.ncomp());
        self.terms.push(Term { matrix, coef });
        self
    }

    /// Adds a real scalar potential `V(x, y)·I`.
    pub fn with_potential(self, v: impl Fn(f64, f64) -> f64 + Send + Sync + 'static) -> Self {
        let n = self.ncomp();
        self.with_term(CMat::identity(n), Coefficient::real_field(v))
    }

    /// Only the multiplication part, derivative coefficients zeroed.
    pub fn multiplication_part(&self) -> Self {
        let n = self.ncomp();
        Self {
            tag: format!("{}:mult", self.tag),
            lengths: self.lengths.clone(),
            deriv: vec![CMat::zeros(n); self.dims()],
            terms: self.terms.clone(),
            valley_block: self.valley_block,
        }
    }

    /// Sum of two operators on the same domain.
    pub fn sum(&self, other: &Self) -> Self {
        assert_eq!(self.lengths, other.lengths);
        assert_eq!(self.ncomp(), other.ncomp());
        Self {
            tag: format!("{}+{}", self.tag, other.tag),
            lengths: self.lengths.clone(),
            deriv: self.deriv.iter().zip(&other.deriv).map(|(a, b)| a + b).collect(),
            terms: self.terms.iter().chain(&other.terms).cloned().collect(),
            valley_block: self.valley_block,
        }
    }

    /// True when every term matrix and derivative coefficient is Hermitian
    /// and every field is real on the given sample points.
    pub fn is_formally_hermitian(&self, samples: &[(f64, f64)]) -> bool {
        self.deriv.iter().all(|b| b.hermiticity_defect() < 1e-14)
            && samples.iter().all(|&(x, y)| {
                self.symbol(&[x, y][..self.dims()], &vec![0.0; self.dims()])
                    .hermiticity_defect()
                    < 1e-12
            })
    }
}
