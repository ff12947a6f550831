use num_complex::Complex64;
use point_source::special_functions::{exp_neg_square, faddeeva, faddeeva_derivative};
use proptest::prelude::*;

fn reference() -> Vec<(Complex64, Complex64)> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/data/faddeeva_reference.csv");
    let mut rdr = csv::Reader::from_path(path).unwrap();
    rdr.records()
        .map(|r| {
            let r = r.unwrap();
            let f = |i: usize| r[i].parse::<f64>().unwrap();
            (Complex64::new(f(0), f(1)), Complex64::new(f(2), f(3)))
        })
        .collect()
}

#[test]
fn matches_reference_table() {
    let table = reference();
    assert_eq!(table.len(), 2000);
    let lower = table.iter().filter(|(z, _)| z.im < 0.0).count();
    assert!(lower > 500 && lower < 1500);
    let mut worst = 0.0f64;
    for (z, w) in &table {
        let got = faddeeva(*z).unwrap();
        let rel = (got - w).norm() / w.norm();
        worst = worst.max(rel);
        assert!(rel < 1e-12, "z = {z}: {got} vs {w} (rel {rel:e})");
    }
    println!("worst relative error {worst:e}");
}

#[test]
fn reflection_example() {
    let z = Complex64::new(1.3, -0.7);
    let lhs = faddeeva(z).unwrap() + faddeeva(-z).unwrap();
    let rhs = 2.0 * exp_neg_square(z).unwrap();
    assert!(close(lhs, rhs, 1e-12));
}

#[test]
fn derivative_at_one() {
    let w1 = Complex64::new(0.367_879_441_171_442_3, 0.607_157_705_841_393_7);
    let expected = -2.0 * w1 + Complex64::new(0.0, 2.0 / std::f64::consts::PI.sqrt());
    assert!((faddeeva_derivative(Complex64::new(1.0, 0.0)).unwrap() - expected).norm() < 1e-14);
}

fn close(a: Complex64, b: Complex64, rel: f64) -> bool {
    (a - b).norm() <= rel * a.norm().max(b.norm())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn reflection(re in -5.0f64..5.0, im in -5.0f64..5.0) {
        let z = Complex64::new(re, im);
        let (a, b) = (faddeeva(z).unwrap(), faddeeva(-z).unwrap());
        let rhs = 2.0 * exp_neg_square(z).unwrap();
        // Measured against the summands: near the real axis the sum cancels.
        let scale = a.norm().max(b.norm()).max(rhs.norm());
        prop_assert!((a + b - rhs).norm() <= 1e-12 * scale, "{} vs {}", a + b, rhs);
    }

    #[test]
    fn conjugation(re in -8.0f64..8.0, im in -5.0f64..8.0) {
        let z = Complex64::new(re, im);
        let a = faddeeva(z.conj()).unwrap();
        let b = faddeeva(-z).unwrap().conj();
        prop_assert!(close(a, b, 1e-12));
    }

    #[test]
    fn real_axis(x in -20.0f64..20.0) {
        let w = faddeeva(Complex64::new(x, 0.0)).unwrap();
        prop_assert!((w.re - (-x * x).exp()).abs() <= 1e-12);
    }

    #[test]
    fn imaginary_axis(y in 0.0f64..20.0) {
        let w = faddeeva(Complex64::new(0.0, y)).unwrap();
        prop_assert!(w.re > 0.0);
        prop_assert!(w.im.abs() <= 1e-15 * w.re);
    }

    #[test]
    fn derivative_matches_difference(r in 0.0f64..5.0, phi in 0.0f64..std::f64::consts::TAU) {
        let z = Complex64::from_polar(r, phi);
        let h = 1e-6;
        let fd = (faddeeva(z + h).unwrap() - faddeeva(z - h).unwrap()) / (2.0 * h);
        let d = faddeeva_derivative(z).unwrap();
        prop_assert!((fd - d).norm() <= 1e-7 * d.norm().max(1.0), "{} vs {}", fd, d);
    }

    #[test]
    fn rejects_non_finite(re in -5.0f64..5.0) {
        prop_assert!(faddeeva(Complex64::new(re, f64::NAN)).is_err());
        prop_assert!(faddeeva(Complex64::new(f64::INFINITY, re)).is_err());
    }
}
