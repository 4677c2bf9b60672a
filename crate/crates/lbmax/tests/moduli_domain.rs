use lbmax::lattice::{normalized_spectrum, TorusParams};
use lbmax::moduli::{canonicalize, contains, invert, reflect, shift};
use proptest::prelude::*;

fn tp(a: f64, b: f64) -> TorusParams {
    TorusParams { a, b }
}

#[test]
fn membership_examples() {
    assert!(contains(TorusParams::equilateral()).unwrap());
    assert!(!contains(tp(0.0, 0.5)).unwrap());
    assert!(!contains(tp(0.6, 2.0)).unwrap());
    assert!(contains(tp(0.5, 1.0)).unwrap());
    assert!(!contains(tp(-0.5, 1.0)).unwrap());
    assert!(contains(tp(0.0, 1.0)).unwrap());
    assert!(contains(tp(0.0, 0.0)).is_err());
}

#[test]
fn transformation_examples() {
    assert_eq!(invert(tp(0.0, 0.5)).unwrap(), tp(0.0, 2.0));
    assert_eq!(shift(tp(-0.5, 1.0)).unwrap(), tp(0.5, 1.0));
    assert_eq!(reflect(tp(0.25, 1.5)).unwrap(), tp(-0.25, 1.5));
    assert!(reflect(tp(0.0, -1.0)).is_err());
}

#[test]
fn canonicalize_examples() {
    assert_eq!(canonicalize(tp(1.5, 1.0)).unwrap(), tp(0.5, 1.0));
    assert_eq!(canonicalize(tp(0.0, 0.25)).unwrap(), tp(0.0, 4.0));
    assert_eq!(canonicalize(tp(-0.5, 2.0)).unwrap(), tp(0.5, 2.0));
    let e = TorusParams::equilateral();
    assert_eq!(canonicalize(e).unwrap(), e);
}

fn assert_same_spectrum(p: TorusParams, q: TorusParams, tol: f64) -> Result<(), TestCaseError> {
    let (x, y) = (normalized_spectrum(p, 12).unwrap(), normalized_spectrum(q, 12).unwrap());
    for k in 1..=12 {
        prop_assert!((x[k] - y[k]).abs() <= tol * x[k], "k={} {} vs {}", k, x[k], y[k]);
    }
    Ok(())
}

proptest! {
    #[test]
    fn generators_preserve_normalized_spectrum(a in -3.0f64..3.0, b in 0.1f64..10.0) {
        let p = tp(a, b);
        assert_same_spectrum(p, reflect(p).unwrap(), 1e-10)?;
        assert_same_spectrum(p, shift(p).unwrap(), 1e-10)?;
        assert_same_spectrum(p, invert(p).unwrap(), 1e-10)?;
    }

    #[test]
    fn involutions(a in -3.0f64..3.0, b in 0.1f64..10.0) {
        let p = tp(a, b);
        let q = invert(invert(p).unwrap()).unwrap();
        prop_assert!((q.a - a).abs() < 1e-12 * (1.0 + a.abs()) && (q.b - b).abs() < 1e-12 * b);
        prop_assert_eq!(reflect(reflect(p).unwrap()).unwrap(), p);
    }

    #[test]
    fn canonicalize_lands_in_domain_and_preserves_spectrum(a in -5.0f64..5.0, b in 0.1f64..10.0) {
        let p = tp(a, b);
        let q = canonicalize(p).unwrap();
        prop_assert!(contains(q).unwrap());
        assert_same_spectrum(p, q, 1e-10)?;
    }

    #[test]
    fn canonicalize_idempotent(a in -5.0f64..5.0, b in 0.1f64..10.0) {
        let q = canonicalize(tp(a, b)).unwrap();
        prop_assert_eq!(canonicalize(q).unwrap(), q);
    }

    #[test]
    fn reflect_symmetry_inside_domain(a in -0.49f64..0.49, b in 1.0f64..4.0) {
        prop_assume!(a * a + b * b > 1.0);
        assert_same_spectrum(tp(a, b), tp(-a, b), 1e-12)?;
    }
}
