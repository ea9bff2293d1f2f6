use dirac_moire::arrayio::FlatArray;
use dirac_moire::bulkspectra::{bulk_gap, numeric_gap};
use dirac_moire::invariants::{bulk_difference_invariant, predicted_w};
use dirac_moire::model::ModelParams;
use dirac_moire::scatter1d::{closed_form_barrier, smatrix_of};
use num_complex::Complex64;

#[test]
fn gap_formula_matches_a_scan() {
    for (omega, lambda) in [(1.0, 0.2), (0.4, 1.5), (-2.0, 0.7)] {
        let p = ModelParams::plus(omega, lambda);
        let (e, s) = bulk_gap(&p).unwrap();
        let (en, sn) = numeric_gap(&p, 6.0, 4000);
        assert!((e - en).abs() < 1e-9, "{omega} {lambda}: {e} vs {en}");
        assert!((s - sn).abs() < 1e-4 * (1.0 + s));
    }
    assert!(bulk_gap(&ModelParams::plus(1.0, 0.0)).is_err());
}

#[test]
fn square_barrier_against_closed_form() {
    let (v0, a) = (0.5, 1.0);
    let v = |x: f64| if x.abs() < a { v0 } else { 0.0 };
    for k in [0.8, 1.3, 2.5] {
        // cells aligned with the barrier edges, so sampling is exact
        let s = smatrix_of(&v, -a, a, k, 64).unwrap();
        let r = closed_form_barrier(v0, a, k).unwrap();
        assert!((s.r_minus - r).norm() < 1e-10, "k={k}");
        assert!(s.unitarity_defect() < 1e-12);
    }
}

#[test]
fn bulk_invariant_is_minus_two_for_positive_coupling() {
    let p = ModelParams::plus(1.0, 0.2);
    let w = bulk_difference_invariant(&p, 3.0, 120).unwrap();
    assert_eq!(w.nearest_int, predicted_w(&p));
    assert_eq!(w.nearest_int, -2);
    assert!(w.residual < 1e-2);
}

#[test]
fn dmar_round_trip() {
    let re = FlatArray::real(vec![2, 3], (0..6).map(|i| i as f64 * 0.25).collect()).unwrap();
    assert_eq!(FlatArray::from_bytes(&re.to_bytes()).unwrap(), re);
    let z = FlatArray::complex(vec![2], vec![Complex64::new(1.0, -2.0), Complex64::new(0.5, 3.0)]).unwrap();
    assert_eq!(FlatArray::from_bytes(&z.to_bytes()).unwrap(), z);
    assert!(FlatArray::real(vec![4], vec![1.0]).is_err());
    assert!(FlatArray::from_bytes(b"nope").is_err());
}
