//! Bracketing root finders.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Bisection on a sign change of `f` in `[lo, hi]`.
///
/// Stops when the bracket is narrower than `xtol` (absolute) or when the
/// midpoint stops moving in floating point.
pub fn bisect<T, F>(mut f: F, mut lo: T, mut hi: T, xtol: T) -> Result<T>
where
    T: Real,
    F: FnMut(T) -> Result<T>,
{
    let mut flo = f(lo)?;
    let fhi = f(hi)?;
    if flo == T::zero() {
        return Ok(lo);
    }
    if fhi == T::zero() {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() {
        return Err(Error::InvalidInput(format!(
            "no sign change on [{}, {}]",
            lo.as_f64(),
            hi.as_f64()
        )));
    }
    for _ in 0..400 {
        let mid = lo + (hi - lo) * T::lit(0.5);
        if hi - lo <= xtol || mid <= lo || mid >= hi {
            return Ok(mid);
        }
        let fm = f(mid)?;
        if fm == T::zero() {
            return Ok(mid);
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Err(Error::Convergence("bisection did not terminate".into()))
}
