use num_complex::Complex32;
use point_source::asymptotics::decompose;
use point_source::source_model::{flux, psi_exact};
use point_source::special_functions::faddeeva;
use point_source::{Params, Params32};

#[test]
fn f32_tracks_f64() {
    for &v0 in &[0.0f32, 0.05, 0.5, 0.9] {
        let p32 = Params32::new(v0).unwrap();
        let p64 = Params::new(v0 as f64).unwrap();
        for &(x, t) in &[(0.0f32, 1.0f32), (1.5, 4.0), (0.3, 0.2), (5.0, 30.0)] {
            let a = psi_exact(&p32, x, t).unwrap();
            let b = psi_exact(&p64, x as f64, t as f64).unwrap();
            let diff = ((a.re as f64 - b.re).powi(2) + (a.im as f64 - b.im).powi(2)).sqrt();
            assert!(diff < 2e-5 * b.norm().max(1e-3), "v0={v0} x={x} t={t}: {a} {b}");
            assert!(flux(&p32, x.max(1e-3), t).unwrap().is_finite());
        }
    }
}

#[test]
fn f32_special_function_and_split() {
    let w = faddeeva(Complex32::new(1.0, 0.0)).unwrap();
    assert!((w.re - 0.367_879_44).abs() < 1e-6 && (w.im - 0.607_157_7).abs() < 1e-6);
    let d = decompose(&Params32::new(0.1).unwrap(), 10.0, 100.0).unwrap();
    assert!(d.u_abs_plus > 1.0 && d.psi_approx.norm().is_finite());
}
