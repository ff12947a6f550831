//! Globally adaptive Gauss–Kronrod (7/15) integration.
//!
//! Works for real and complex integrands through [`QuadValue`]. The integrand
//! may fail; the first error aborts the integration and is returned as is.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::ops::{Add, Mul, Sub};

use crate::error::{Error, Result};
use crate::scalar::{Cplx, Real};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

/// Gauss weights for the odd Kronrod nodes `XGK[1], XGK[3], XGK[5], XGK[7]`.
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Value types an integrand may return.
pub trait QuadValue<T: Real>:
    Copy + Add<Output = Self> + Sub<Output = Self> + Mul<T, Output = Self> + Send
{
    fn zero() -> Self;
    fn magnitude(self) -> T;
}

impl<T: Real> QuadValue<T> for T {
    fn zero() -> Self {
        T::zero()
    }
    fn magnitude(self) -> T {
        self.abs()
    }
}

impl<T: Real> QuadValue<T> for Cplx<T> {
    fn zero() -> Self {
        Cplx::new(T::zero(), T::zero())
    }
    fn magnitude(self) -> T {
        self.norm()
    }
}

/// Stopping rule: stop once the error estimate is below `max(abs, rel * |I|)`.
#[derive(Debug, Clone, Copy)]
pub struct Tolerance<T> {
    pub abs: T,
    pub rel: T,
    pub max_intervals: usize,
}

impl<T: Real> Tolerance<T> {
    pub fn new(abs: T, rel: T) -> Self {
        Tolerance {
            abs,
            rel,
            max_intervals: 200_000,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Integral<T, V> {
    pub value: V,
    pub error: T,
    pub intervals: usize,
}

struct Piece<T, V> {
    a: T,
    b: T,
    value: V,
    error: T,
}

impl<T: Real, V> PartialEq for Piece<T, V> {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl<T: Real, V> Eq for Piece<T, V> {}
impl<T: Real, V> PartialOrd for Piece<T, V> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<T: Real, V> Ord for Piece<T, V> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .partial_cmp(&other.error)
            .unwrap_or(Ordering::Equal)
    }
}

/// One 15-point Kronrod rule on `[a, b]` with the embedded 7-point Gauss estimate.
pub fn gauss_kronrod<T, V, F>(f: &mut F, a: T, b: T) -> Result<(V, T)>
where
    T: Real,
    V: QuadValue<T>,
    F: FnMut(T) -> Result<V>,
{
    let half = (b - a) * T::lit(0.5);
    let mid = (a + b) * T::lit(0.5);
    let centre = f(mid)?;
    let mut kronrod = centre * T::lit(WGK[7]);
    let mut gauss = centre * T::lit(WG[3]);
    for i in 0..7 {
        let dx = half * T::lit(XGK[i]);
        let pair = f(mid - dx)? + f(mid + dx)?;
        kronrod = kronrod + pair * T::lit(WGK[i]);
        if i % 2 == 1 {
            gauss = gauss + pair * T::lit(WG[i / 2]);
        }
    }
    let value = kronrod * half;
    let diff = (kronrod - gauss) * half;
    Ok((value, diff.magnitude()))
}

/// Integrates `f` over the union of consecutive intervals given by `breaks`.
///
/// `breaks` must be strictly increasing with at least two entries. Every
/// interval is split as needed; refinement always targets the interval with the
/// largest error estimate.
pub fn integrate<T, V, F>(mut f: F, breaks: &[T], tol: Tolerance<T>) -> Result<Integral<T, V>>
where
    T: Real,
    V: QuadValue<T>,
    F: FnMut(T) -> Result<V>,
{
    if breaks.len() < 2 {
        return Err(Error::InvalidInput(
            "integration needs at least two break points".into(),
        ));
    }
    if breaks.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidInput(
            "integration break points must increase".into(),
        ));
    }
    let mut heap = BinaryHeap::with_capacity(breaks.len() * 2);
    let mut value = V::zero();
    let mut error = T::zero();
    for w in breaks.windows(2) {
        let (v, e) = gauss_kronrod(&mut f, w[0], w[1])?;
        value = value + v;
        error += e;
        heap.push(Piece {
            a: w[0],
            b: w[1],
            value: v,
            error: e,
        });
    }
    loop {
        let target = tol.abs.max(tol.rel * value.magnitude());
        if error <= target {
            break;
        }
        if heap.len() >= tol.max_intervals {
            return Err(Error::Convergence(format!(
                "quadrature error {:e} above target {:e} after {} intervals",
                error.as_f64(),
                target.as_f64(),
                heap.len()
            )));
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = (worst.a + worst.b) * T::lit(0.5);
        if !(mid > worst.a && mid < worst.b) {
            return Err(Error::Convergence(format!(
                "interval around {} cannot be split further",
                mid.as_f64()
            )));
        }
        let (lv, le) = gauss_kronrod(&mut f, worst.a, mid)?;
        let (rv, re) = gauss_kronrod(&mut f, mid, worst.b)?;
        value = value - worst.value + lv + rv;
        error = error - worst.error + le + re;
        heap.push(Piece {
            a: worst.a,
            b: mid,
            value: lv,
            error: le,
        });
        heap.push(Piece {
            a: mid,
            b: worst.b,
            value: rv,
            error: re,
        });
    }
    // Re-sum to shed the drift of the running updates.
    let mut value = V::zero();
    let mut error = T::zero();
    let intervals = heap.len();
    for p in heap {
        value = value + p.value;
        error += p.error;
    }
    Ok(Integral {
        value,
        error,
        intervals,
    })
}
