//! Faddeeva function `w(z) = exp(-z^2) erfc(-iz)` on the whole complex plane.
//!
//! The upper half-plane is split by modulus:
//!
//! * `|z| < 1.5`: Maclaurin series `sum (iz)^n / Gamma(n/2 + 1)`,
//! * `1.5 <= |z| < 8`: Weideman's rational expansion with 40 terms,
//! * `|z| >= 8`: Laplace continued fraction.
//!
//! The lower half-plane is reached only through `w(z) = 2 exp(-z^2) - w(-z)`.
//! When `exp(-z^2)` is not representable the evaluation fails with
//! [`Error::OverflowRegion`] instead of returning infinities.

use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::scalar::{cplx, inv_sqrt_pi, is_finite_c, Cplx, Real};

const SERIES_RADIUS: f64 = 1.5;
const FRACTION_RADIUS: f64 = 8.0;
const WEIDEMAN_TERMS: usize = 40;
const FRACTION_DEPTH: usize = 24;
const SERIES_MAX_TERMS: usize = 96;

/// Headroom kept below `ln(max)` before `exp(-z^2)` is declared unrepresentable.
const OVERFLOW_MARGIN: f64 = 1.0;

struct Weideman {
    scale: f64,
    coeffs: [f64; WEIDEMAN_TERMS],
}

fn weideman() -> &'static Weideman {
    static TABLE: OnceLock<Weideman> = OnceLock::new();
    TABLE.get_or_init(|| {
        let n = WEIDEMAN_TERMS;
        let m = 2 * n;
        let len = 2 * m;
        let scale = (n as f64 / std::f64::consts::SQRT_2).sqrt();
        // Samples of exp(-t^2)(L^2 + t^2) at t = L tan(k pi / 2M), in FFT order.
        let mut samples = vec![0.0; len];
        for (slot, sample) in samples.iter_mut().enumerate() {
            let k = if slot < m {
                slot as f64
            } else if slot == m {
                continue;
            } else {
                slot as f64 - len as f64
            };
            let t = scale * (k * std::f64::consts::PI / (2.0 * m as f64)).tan();
            *sample = (-t * t).exp() * (scale * scale + t * t);
        }
        let mut coeffs = [0.0; WEIDEMAN_TERMS];
        for (j, c) in coeffs.iter_mut().enumerate() {
            let freq = (j + 1) as f64;
            let acc: f64 = samples
                .iter()
                .enumerate()
                .map(|(slot, s)| {
                    s * (2.0 * std::f64::consts::PI * freq * slot as f64 / len as f64).cos()
                })
                .sum();
            *c = acc / len as f64;
        }
        Weideman { scale, coeffs }
    })
}

fn check_finite<T: Real>(z: Cplx<T>) -> Result<()> {
    if z.re.is_nan() || z.im.is_nan() {
        return Err(Error::InvalidInput("faddeeva argument is NaN".into()));
    }
    if !is_finite_c(z) {
        return Err(Error::InvalidInput("faddeeva argument is infinite".into()));
    }
    Ok(())
}

/// `exp(-z^2)` or an overflow error.
pub fn exp_neg_square<T: Real>(z: Cplx<T>) -> Result<Cplx<T>> {
    check_finite(z)?;
    let re = (z.im - z.re) * (z.im + z.re);
    let im = -T::lit(2.0) * z.re * z.im;
    let limit = T::max_value().ln() - T::lit(OVERFLOW_MARGIN);
    if re > limit {
        return Err(Error::OverflowRegion {
            re: z.re.as_f64(),
            im: z.im.as_f64(),
        });
    }
    let modulus = re.exp();
    Ok(cplx(modulus * im.cos(), modulus * im.sin()))
}

/// Faddeeva function `w(z)`.
pub fn faddeeva<T: Real>(z: Cplx<T>) -> Result<Cplx<T>> {
    check_finite(z)?;
    if z.im < T::zero() {
        let gauss = exp_neg_square(z)?;
        let w = gauss * T::lit(2.0) - upper_half_plane(-z);
        if !is_finite_c(w) {
            return Err(Error::OverflowRegion {
                re: z.re.as_f64(),
                im: z.im.as_f64(),
            });
        }
        Ok(w)
    } else {
        Ok(upper_half_plane(z))
    }
}

/// `w'(z) = -2 z w(z) + 2i / sqrt(pi)`.
pub fn faddeeva_derivative<T: Real>(z: Cplx<T>) -> Result<Cplx<T>> {
    let w = faddeeva(z)?;
    let two = T::lit(2.0);
    Ok(-z * w * two + cplx(T::zero(), two * inv_sqrt_pi::<T>()))
}

/// `w(z)` for `Im z >= 0`.
fn upper_half_plane<T: Real>(z: Cplx<T>) -> Cplx<T> {
    let r = z.norm();
    if r < T::lit(SERIES_RADIUS) {
        maclaurin(z)
    } else if r < T::lit(FRACTION_RADIUS) {
        rational(z)
    } else {
        continued_fraction(z)
    }
}

fn maclaurin<T: Real>(z: Cplx<T>) -> Cplx<T> {
    let iz = cplx(-z.im, z.re);
    let iz2 = iz * iz;
    // Even and odd chains: a_n = a_{n-2} (iz)^2 / (n/2).
    let mut even = cplx(T::one(), T::zero());
    let mut odd = iz * (T::lit(2.0) * inv_sqrt_pi::<T>());
    let mut sum = even + odd;
    let tiny = T::epsilon() * T::lit(0.05);
    let mut n = 1;
    while n < SERIES_MAX_TERMS {
        let ne = T::lit((n + 1) as f64 / 2.0);
        let no = T::lit((n + 2) as f64 / 2.0);
        even = even * iz2 / ne;
        odd = odd * iz2 / no;
        sum += even + odd;
        n += 2;
        if even.norm() + odd.norm() <= tiny * sum.norm() {
            break;
        }
    }
    sum
}

fn rational<T: Real>(z: Cplx<T>) -> Cplx<T> {
    let table = weideman();
    let l = T::lit(table.scale);
    let iz = cplx(-z.im, z.re);
    let denom = cplx(l, T::zero()) - iz;
    let big_z = (cplx(l, T::zero()) + iz) / denom;
    let mut poly = cplx(T::zero(), T::zero());
    for &c in table.coeffs.iter().rev() {
        poly = poly * big_z + cplx(T::lit(c), T::zero());
    }
    poly * T::lit(2.0) / (denom * denom) + cplx(inv_sqrt_pi::<T>(), T::zero()) / denom
}

fn continued_fraction<T: Real>(z: Cplx<T>) -> Cplx<T> {
    let mut tail = cplx(T::zero(), T::zero());
    for k in (1..=FRACTION_DEPTH).rev() {
        tail = cplx(T::lit(k as f64 / 2.0), T::zero()) / (z - tail);
    }
    cplx(T::zero(), inv_sqrt_pi::<T>()) / (z - tail)
}
