//! Closed-form spectral data of the four-band bulk symbol.

use crate::cmat::{sigma0, sigma1, sigma3, CMat, ZERO};
use crate::model::{bulk_symbol, ModelError, ModelParams, Stacking};
use num_complex::Complex64 as C64;

/// `(E_-², E_+²)` at `s = |ξ|²`, cancellation-free.
pub fn energies_sq(p: &ModelParams, s: f64) -> (f64, f64) {
    let (o2, l2) = (p.omega * p.omega, p.lambda * p.lambda);
    let a = o2 + 0.5 * l2 + s;
    let b = ((4.0 * o2 + l2) * s + 0.25 * l2 * l2).sqrt();
    let ep = a + b;
    let em = if ep > 0.0 {
        ((s - o2).powi(2) + o2 * l2) / ep
    } else {
        0.0
    };
    (em, ep)
}

/// Sorted eigenvalues `{-E_+, -E_-, E_-, E_+}`.
pub fn bulk_eigenvalues(p: &ModelParams, xi: f64, zeta: f64) -> [f64; 4] {
    let (em, ep) = energies_sq(p, xi * xi + zeta * zeta);
    let (em, ep) = (em.sqrt(), ep.sqrt());
    [-ep, -em, em, ep]
}

/// Minimal positive energy and the `|ξ|²` where it is attained.
pub fn bulk_gap(p: &ModelParams) -> Result<(f64, f64), ModelError> {
    p.require_gap()?;
    let (o2, l2) = (p.omega * p.omega, p.lambda * p.lambda);
    let d = 4.0 * o2 + l2;
    Ok(((o2 * l2 / d).sqrt(), 2.0 * o2 * (2.0 * o2 + l2) / d))
}

/// Independent numerical minimum of `E_3(|ξ|)` on `[0, rmax]`: coarse scan
/// then golden-section refinement.
pub fn numeric_gap(p: &ModelParams, rmax: f64, n: usize) -> (f64, f64) {
    let e3 = |r: f64| energies_sq(p, r * r).0.sqrt();
    let h = rmax / n as f64;
    let best = (0..=n)
        .min_by(|&i, &j| e3(i as f64 * h).total_cmp(&e3(j as f64 * h)))
        .unwrap();
    let (mut a, mut b) = (
        ((best as f64 - 1.0) * h).max(0.0),
        ((best as f64 + 1.0) * h).min(rmax),
    );
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let (mut c, mut d) = (b - g * (b - a), a + g * (b - a));
    while b - a > 1e-12 * (1.0 + b.abs()) {
        if e3(c) < e3(d) {
            b = d;
        } else {
            a = c;
        }
        c = b - g * (b - a);
        d = a + g * (b - a);
    }
    let r = 0.5 * (a + b);
    (e3(r), r * r)
}

/// `β = 2Ω + √(4Ω² + λ²)` for `Ω > 0`.
pub fn beta(p: &ModelParams) -> f64 {
    let o = p.omega.abs();
    2.0 * o + (4.0 * o * o + p.lambda * p.lambda).sqrt()
}

/// Smooth-gauge unit eigenvector for band 3 (`E_-`) or 4 (`E_+`).
///
/// Written out for `Ω > 0, λ > 0, η = 1`; the other sectors are reached by
/// `σ3⊗I` (sign of λ), evaluation at `ξ̄` (η = −1) and `σ1⊗I` with the
/// stacking swapped (sign of Ω).
pub fn smooth_eigenvector(
    p: &ModelParams,
    band: usize,
    xi: f64,
    zeta: f64,
) -> Result<[C64; 4], ModelError> {
    if band != 3 && band != 4 {
        return Err(ModelError::Invalid(format!("band {band} has no smooth gauge here")));
    }
    p.require_gap()?;
    let zeta = zeta * p.eta as f64;
    let mut stacking = p.stacking;
    let mut flip_omega = false;
    if p.omega < 0.0 {
        stacking = stacking.flip();
        flip_omega = true;
    }
    let canon = ModelParams {
        omega: p.omega.abs(),
        lambda: p.lambda.abs(),
        eta: 1,
        stacking,
    };
    let mut u = canonical_vector(&canon, band, C64::new(xi, zeta));
    if p.lambda < 0.0 {
        u = apply4(&sigma3().kron(&sigma0()), &u);
    }
    if flip_omega {
        u = apply4(&sigma1().kron(&sigma0()), &u);
    }
    Ok(u)
}

fn apply4(m: &CMat, u: &[C64; 4]) -> [C64; 4] {
    let v = m.apply(u);
    [v[0], v[1], v[2], v[3]]
}

fn normalize(v: [C64; 4]) -> [C64; 4] {
    let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.map(|z| z / n)
}

fn canonical_vector(p: &ModelParams, band: usize, z: C64) -> [C64; 4] {
    let (o, l) = (p.omega, p.lambda);
    let s = z.norm_sqr();
    let (em2, ep2) = energies_sq(p, s);
    let lc = C64::new(l, 0.0);
    if band == 4 {
        let e = ep2.sqrt();
        let a = o + e - s / (o + e);
        match p.stacking {
            Stacking::Plus => normalize([
                z.conj() * (a / (e - o)),
                C64::new(a, 0.0),
                lc,
                z * (l / (o + e)),
            ]),
            Stacking::Minus => normalize([
                C64::new(a, 0.0),
                z * (a / (e - o)),
                z.conj() * (l / (o + e)),
                lc,
            ]),
        }
    } else {
        let e = em2.sqrt();
        // g = (E − Ω)/|ξ|², evaluated without cancellation near ξ = 0
        let (o2, l2) = (o * o, l * l);
        let sq = ((4.0 * o2 + l2) * s + 0.25 * l2 * l2).sqrt();
        let g = (1.0 - (4.0 * o2 + l2) / (0.5 * l2 + sq)) / (e + o);
        let h = 1.0 - (e - o) * g;
        match p.stacking {
            Stacking::Plus => normalize([
                lc,
                z * (l * g),
                -z * h,
                -z * z * (h / (o + e)),
            ]),
            Stacking::Minus => normalize([
                z.conj() * (l * g),
                lc,
                -z.conj() * z.conj() * (h / (o + e)),
                -z.conj() * h,
            ]),
        }
    }
}

/// Limit of the smooth gauge as `|ξ| → ∞` along direction `theta`
/// (canonical sector `Ω, λ > 0`, `η = 1`).
pub fn limit_vector(p: &ModelParams, band: usize, theta: f64) -> [C64; 4] {
    let b = beta(p);
    let l = p.lambda;
    let c = (2.0 * l * l + 2.0 * b * b).sqrt().recip();
    let h = C64::from_polar(1.0, theta);
    let hb = h.conj();
    let r = |x: f64| C64::new(x, 0.0);
    let v = match (p.stacking, band) {
        (Stacking::Plus, 4) => [hb * b, r(b), r(l), h * l],
        (Stacking::Plus, _) => [r(l), h * l, -h * b, -h * h * b],
        (Stacking::Minus, 4) => [r(b), h * b, hb * l, r(l)],
        (Stacking::Minus, _) => [hb * l, r(l), -hb * hb * b, -hb * b],
    };
    v.map(|x| x * c)
}

/// Closed-form half invariants `W^j` for any sector.
pub fn half_invariant_closed_form(p: &ModelParams, band: usize) -> f64 {
    let b = beta(p);
    let l2 = p.lambda * p.lambda;
    let b2 = b * b;
    let mut stacking = p.stacking;
    if p.omega < 0.0 {
        stacking = stacking.flip();
    }
    let plus = if band == 4 {
        (b2 - l2) / (2.0 * (l2 + b2))
    } else {
        -(l2 + 3.0 * b2) / (2.0 * (l2 + b2))
    };
    let v = match stacking {
        Stacking::Plus => plus,
        Stacking::Minus => -plus,
    };
    v * p.eta as f64
}

/// Null vector of a singular 4×4 matrix: the largest column of its adjugate.
pub fn null_vector4(m: &CMat) -> [C64; 4] {
    let minor = |r: usize, c: usize| {
        let rows: Vec<usize> = (0..4).filter(|&i| i != r).collect();
        let cols: Vec<usize> = (0..4).filter(|&j| j != c).collect();
        let a = |i: usize, j: usize| m[(rows[i], cols[j])];
        a(0, 0) * (a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1))
            - a(0, 1) * (a(1, 0) * a(2, 2) - a(1, 2) * a(2, 0))
            + a(0, 2) * (a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0))
    };
    let mut best = [ZERO; 4];
    let mut best_n = -1.0;
    for j in 0..4 {
        // adj[i][j] = (-1)^{i+j} minor(j, i)
        let col: [C64; 4] = std::array::from_fn(|i| {
            let s = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
            minor(j, i) * s
        });
        let n: f64 = col.iter().map(|z| z.norm_sqr()).sum();
        if n > best_n {
            best_n = n;
            best = col;
        }
    }
    normalize(best)
}

/// Eigenvector of band `band` (1..=4) from the adjugate of `H − E_band`.
/// Arbitrary phase; used where gauge does not matter.
pub fn band_vector(p: &ModelParams, band: usize, xi: f64, zeta: f64) -> [C64; 4] {
    let e = bulk_eigenvalues(p, xi, zeta)[band - 1];
    let h = bulk_symbol(p, xi, zeta);
    let m = &h - &CMat::identity(4).scale_re(e);
    null_vector4(&m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cmat::vdot;
    use rand::{Rng, SeedableRng};

    fn residual(p: &ModelParams, band: usize, xi: f64, zeta: f64, u: &[C64; 4]) -> f64 {
        let e = bulk_eigenvalues(p, xi, zeta)[band - 1];
        let hu = bulk_symbol(p, xi, zeta).apply(u);
        hu.iter().zip(u).map(|(a, b)| (a - b * e).norm()).fold(0.0, f64::max)
    }

    #[test]
    fn closed_form_matches_dense() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        for _ in 0..500 {
            let p = ModelParams::new(
                rng.random_range(-3.0..3.0),
                rng.random_range(-3.0..3.0),
                if rng.random_bool(0.5) { 1 } else { -1 },
                if rng.random_bool(0.5) { Stacking::Plus } else { Stacking::Minus },
            )
            .unwrap();
            let (x, z) = (rng.random_range(-4.0..4.0), rng.random_range(-4.0..4.0));
            let e = bulk_eigenvalues(&p, x, z);
            let d = bulk_symbol(&p, x, z).eigvalsh();
            for j in 0..4 {
                assert!((e[j] - d[j]).abs() < 1e-10);
                assert!((e[j] + e[3 - j]).abs() < 1e-12);
            }
        }
        let e = bulk_eigenvalues(&ModelParams::plus(1.0, 0.2), 0.0, 0.0);
        assert!((e[3] - 1.04f64.sqrt()).abs() < 1e-14 && (e[2] - 1.0).abs() < 1e-14);
        let f = bulk_eigenvalues(&ModelParams::plus(0.0, 0.0), 2.0, 0.0);
        assert_eq!(f, [-2.0, -2.0, 2.0, 2.0]);
    }

    #[test]
    fn gap_examples() {
        let p = ModelParams::plus(1.0, 0.2);
        let (e, s) = bulk_gap(&p).unwrap();
        assert!((e - 0.2 / 4.04f64.sqrt()).abs() < 1e-15);
        assert!((s - 2.0 * 2.04 / 4.04).abs() < 1e-15);
        let (en, sn) = numeric_gap(&p, 10.0, 10_000);
        assert!((en - e).abs() < 1e-10 && (sn - s).abs() < 1e-5);
        assert!(bulk_gap(&ModelParams::plus(1.0, 0.0)).is_err());
        let mut prev = 0.0;
        for i in 1..200 {
            let g = bulk_gap(&ModelParams::plus(1.0, i as f64 * 0.5)).unwrap().0;
            assert!(g > prev && g < 1.0);
            prev = g;
        }
    }

    #[test]
    fn smooth_vectors_are_eigenvectors_in_all_sectors() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2);
        for _ in 0..1000 {
            let p = ModelParams::new(
                rng.random_range(0.2..2.0) * if rng.random_bool(0.5) { 1.0 } else { -1.0 },
                rng.random_range(0.1..2.0) * if rng.random_bool(0.5) { 1.0 } else { -1.0 },
                if rng.random_bool(0.5) { 1 } else { -1 },
                if rng.random_bool(0.5) { Stacking::Plus } else { Stacking::Minus },
            )
            .unwrap();
            let (x, z) = (rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0));
            for band in [3, 4] {
                let u = smooth_eigenvector(&p, band, x, z).unwrap();
                assert!(residual(&p, band, x, z, &u) < 1e-10, "{p:?} band {band}");
            }
        }
        let p = ModelParams::plus(1.0, 0.2);
        let u = smooth_eigenvector(&p, 4, 0.0, 0.0).unwrap();
        assert!(u[0].norm() < 1e-15 && u[3].norm() < 1e-15);
        assert!(residual(&p, 3, 1e-9, 0.0, &smooth_eigenvector(&p, 3, 1e-9, 0.0).unwrap()) < 1e-12);
        assert!(smooth_eigenvector(&p, 2, 0.0, 0.0).is_err());
    }

    #[test]
    fn smooth_gauge_has_no_phase_jumps_and_right_limit() {
        // 1 − |overlap| is gauge invariant and ~ (δ/ΔE)²; at λ = 0.2 the
        // band splitting near ξ = 0 is 0.02, so the strict bound is checked
        // at λ = 1 and phase continuity at both.
        for (lambda, strict) in [(1.0, true), (0.2, false)] {
            for st in [Stacking::Plus, Stacking::Minus] {
                let p = ModelParams::plus(1.0, lambda).with_stacking(st);
                for band in [3, 4] {
                    for r in [1e-6, 0.3, 1.0, 2.5] {
                        let n = 2000;
                        for i in 0..n {
                            let t = 2.0 * std::f64::consts::PI * i as f64 / n as f64;
                            let (x, y) = (r * t.cos(), r * t.sin());
                            let a = smooth_eigenvector(&p, band, x, y).unwrap();
                            let b = smooth_eigenvector(&p, band, x + 1e-4, y).unwrap();
                            let o = vdot(&a, &b);
                            if strict {
                                assert!(1.0 - o.norm() < 1e-6, "{st:?} {band} r={r} t={t}");
                            }
                            assert!((o - 1.0).norm() < 1e-2);
                        }
                    }
                    let t = 0.7f64;
                    let u = smooth_eigenvector(&p, band, 1e3 * t.cos(), 1e3 * t.sin()).unwrap();
                    let w = limit_vector(&p, band, t);
                    let d: f64 =
                        u.iter().zip(&w).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt();
                    assert!(d < 1e-2, "{st:?} {band} {d}");
                }
            }
        }
    }

    #[test]
    fn adjugate_vectors() {
        let p = ModelParams::plus(0.7, 0.4);
        for band in 1..=4 {
            let u = band_vector(&p, band, 0.3, -1.1);
            assert!(residual(&p, band, 0.3, -1.1, &u) < 1e-12);
        }
    }
}
