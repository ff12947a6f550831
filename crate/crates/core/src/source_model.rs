//! Point source switched on at `t = 0` with a decaying, evanescent carrier.
//!
//! Units: lengths in `L`, times in `2 m L^2 / hbar`. The free equation is
//! `i psi_t = -psi_xx` on `x > 0` with `psi(0, t) = exp(-i omega0 t)` for `t > 0`
//! and `psi(x, 0) = 0`.

use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::quadrature::{integrate, Tolerance};
use crate::scalar::{cplx, Cplx, Real};
use crate::special_functions::{faddeeva, faddeeva_derivative};

/// Source parameters. Everything follows from the dimensionless velocity `v0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SourceParams<T> {
    pub v0: T,
    /// `k0 = -v0 + i`
    pub k0: Cplx<T>,
    /// `omega0 = k0^2 = (v0^2 - 1) - 2 i v0`
    pub omega0: Cplx<T>,
    /// Density lifetime `1 / (2 v0)`, infinite at `v0 = 0`.
    pub lifetime: T,
}

pub fn make_params<T: Real>(v0: T) -> Result<SourceParams<T>> {
    if v0.is_nan() {
        return Err(Error::InvalidInput("v0 is NaN".into()));
    }
    if v0 < T::zero() || v0 > T::one() {
        return Err(Error::Domain(format!(
            "v0 = {} outside [0, 1]",
            v0.as_f64()
        )));
    }
    let k0 = cplx(-v0, T::one());
    let omega0 = cplx(v0 * v0 - T::one(), -T::lit(2.0) * v0);
    let lifetime = if v0 == T::zero() {
        T::infinity()
    } else {
        T::one() / (T::lit(2.0) * v0)
    };
    Ok(SourceParams {
        v0,
        k0,
        omega0,
        lifetime,
    })
}

impl<T: Real> SourceParams<T> {
    pub fn new(v0: T) -> Result<Self> {
        make_params(v0)
    }

    /// Time at which the pole term enters at `x`: `x / (2 (1 - v0))`, infinite at `v0 = 1`.
    pub fn t_c(&self, x: T) -> T {
        let gap = T::one() - self.v0;
        if gap <= T::zero() {
            T::infinity()
        } else {
            x / (T::lit(2.0) * gap)
        }
    }

    pub fn k0_abs(&self) -> T {
        (T::one() + self.v0 * self.v0).sqrt()
    }
}

/// Physical scales. `length` is `1 / |Im k0~|` by convention.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DimensionalScale<T> {
    pub length: T,
    pub mass: T,
    pub hbar: T,
}

impl<T: Real> DimensionalScale<T> {
    pub fn new(length: T, mass: T, hbar: T) -> Result<Self> {
        let s = DimensionalScale { length, mass, hbar };
        s.validate()?;
        Ok(s)
    }

    fn validate(&self) -> Result<()> {
        let ok = |v: T| v.is_finite() && v > T::zero();
        if ok(self.length) && ok(self.mass) && ok(self.hbar) {
            Ok(())
        } else {
            Err(Error::Domain(format!(
                "scale members must be positive and finite (L = {}, m = {}, hbar = {})",
                self.length.as_f64(),
                self.mass.as_f64(),
                self.hbar.as_f64()
            )))
        }
    }

    /// `2 m L^2 / hbar`, the unit of time.
    pub fn time_unit(&self) -> T {
        T::lit(2.0) * self.mass * self.length * self.length / self.hbar
    }
}

/// Dimensional `(x~, t~)` to `(x, t) = (x~ / L, t~ hbar / (2 m L^2))`.
pub fn to_dimensionless<T: Real>(scale: &DimensionalScale<T>, x_dim: T, t_dim: T) -> Result<(T, T)> {
    scale.validate()?;
    Ok((x_dim / scale.length, t_dim / scale.time_unit()))
}

/// Inverse of [`to_dimensionless`].
pub fn to_dimensional<T: Real>(scale: &DimensionalScale<T>, x: T, t: T) -> Result<(T, T)> {
    scale.validate()?;
    Ok((x * scale.length, t * scale.time_unit()))
}

/// Complex traversal time `tau = -x / (2 k0)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexTime<T> {
    pub tau: Cplx<T>,
    pub tau_r: T,
    pub tau_i: T,
    pub modulus: T,
}

pub fn complex_time<T: Real>(p: &SourceParams<T>, x: T) -> ComplexTime<T> {
    let two = T::lit(2.0);
    let k2 = T::one() + p.v0 * p.v0;
    let tau_r = x * p.v0 / (two * k2);
    let tau_i = x / (two * k2);
    ComplexTime {
        tau: cplx(tau_r, tau_i),
        tau_r,
        tau_i,
        modulus: x / (two * k2.sqrt()),
    }
}

/// Saddle point `k_s = x / 2t` and the Faddeeva arguments
/// `u_(+/-) = +/- sqrt(t/2) (1 + i) k0 (1 +/- tau/t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SaddleVariables<T> {
    pub k_s: T,
    pub u_plus: Cplx<T>,
    pub u_minus: Cplx<T>,
}

pub fn saddle_variables<T: Real>(p: &SourceParams<T>, x: T, t: T) -> Result<SaddleVariables<T>> {
    check_point(x, t)?;
    if t == T::zero() {
        return Err(Error::Domain("saddle variables need t > 0".into()));
    }
    let k_s = x / (T::lit(2.0) * t);
    let c = cplx(T::one(), T::one()) * (t * T::lit(0.5)).sqrt();
    let ks = cplx(k_s, T::zero());
    Ok(SaddleVariables {
        k_s,
        u_plus: c * (p.k0 - ks),
        u_minus: c * (-p.k0 - ks),
    })
}

pub(crate) fn check_point<T: Real>(x: T, t: T) -> Result<()> {
    if x.is_nan() || t.is_nan() {
        return Err(Error::InvalidInput("x or t is NaN".into()));
    }
    if !x.is_finite() || !t.is_finite() {
        return Err(Error::InvalidInput("x and t must be finite".into()));
    }
    if x < T::zero() {
        return Err(Error::Domain(format!("x = {} < 0", x.as_f64())));
    }
    if t < T::zero() {
        return Err(Error::Domain(format!("t = {} < 0", t.as_f64())));
    }
    Ok(())
}

/// Exact wave function `exp(i k_s^2 t) / 2 [w(-u_-) + w(-u_+)]`.
///
/// At `t = 0` the switch-on convention is used: `1` at `x = 0`, `0` elsewhere.
pub fn psi_exact<T: Real>(p: &SourceParams<T>, x: T, t: T) -> Result<Cplx<T>> {
    check_point(x, t)?;
    if t == T::zero() {
        let v = if x == T::zero() { T::one() } else { T::zero() };
        return Ok(cplx(v, T::zero()));
    }
    let s = saddle_variables(p, x, t)?;
    let sum = faddeeva(-s.u_minus)? + faddeeva(-s.u_plus)?;
    Ok(carrier(s.k_s, t) * sum * T::lit(0.5))
}

/// `exp(i k_s^2 t)`
fn carrier<T: Real>(k_s: T, t: T) -> Cplx<T> {
    let phase = k_s * k_s * t;
    cplx(phase.cos(), phase.sin())
}

/// Analytic `d psi / dx`.
pub fn psi_dx<T: Real>(p: &SourceParams<T>, x: T, t: T) -> Result<Cplx<T>> {
    check_point(x, t)?;
    if t == T::zero() {
        return Err(Error::Domain("psi_dx is singular at t = 0".into()));
    }
    Ok(psi_and_dx(p, x, t)?.1)
}

fn psi_and_dx<T: Real>(p: &SourceParams<T>, x: T, t: T) -> Result<(Cplx<T>, Cplx<T>)> {
    let s = saddle_variables(p, x, t)?;
    let (zm, zp) = (-s.u_minus, -s.u_plus);
    let half = carrier(s.k_s, t) * T::lit(0.5);
    let w = faddeeva(zm)? + faddeeva(zp)?;
    let dw = faddeeva_derivative(zm)? + faddeeva_derivative(zp)?;
    // d(-u)/dx = (1 + i) / (2 sqrt(2t)) for both arguments.
    let dz = cplx(T::one(), T::one()) / (T::lit(2.0) * (T::lit(2.0) * t).sqrt());
    let psi = half * w;
    let dpsi = psi * cplx(T::zero(), s.k_s) + half * dz * dw;
    Ok((psi, dpsi))
}

/// Probability flux `J = 2 Im(conj(psi) psi_x)`.
pub fn flux<T: Real>(p: &SourceParams<T>, x: T, t: T) -> Result<T> {
    check_point(x, t)?;
    if t == T::zero() {
        return Err(Error::Domain("flux is singular at t = 0".into()));
    }
    let (psi, dpsi) = psi_and_dx(p, x, t)?;
    Ok(T::lit(2.0) * (psi.conj() * dpsi).im)
}

/// Settings for [`norm_factor_with`].
#[derive(Debug, Clone, Copy)]
pub struct NormSettings<T> {
    /// Relative accuracy requested from the quadrature and the tail bound.
    pub rel_tol: T,
    /// Width of the integration panels.
    pub panel: T,
    /// Largest horizon tried before giving up on the tail.
    pub max_horizon: T,
}

impl<T: Real> Default for NormSettings<T> {
    fn default() -> Self {
        NormSettings {
            rel_tol: T::lit(1e-10),
            panel: T::lit(2.0),
            max_horizon: T::lit(1e7),
        }
    }
}

/// Emitted particle number `N = int_0^inf J(0, t) dt`.
pub fn norm_factor<T: Real>(p: &SourceParams<T>) -> Result<T> {
    norm_factor_with(p, NormSettings::default())
}

pub fn norm_factor_with<T: Real>(p: &SourceParams<T>, cfg: NormSettings<T>) -> Result<T> {
    if p.v0 <= T::zero() {
        return Err(Error::Domain(
            "norm factor needs a decaying source (v0 > 0)".into(),
        ));
    }
    let two = T::lit(2.0);
    let rate = two * p.v0;
    // J(0, t) ~ t^(-1/2) near 0: integrate the first unit of time in u = sqrt(t).
    let head_end = T::one();
    let tol = Tolerance::new(T::lit(1e-300), cfg.rel_tol * T::lit(0.1));
    let head = integrate(
        |u: T| Ok(flux(p, T::zero(), u * u)? * two * u),
        &[T::zero(), T::lit(0.25), T::lit(0.5), head_end.sqrt()],
        tol,
    )?;
    let mut total = head.value;
    let mut start = head_end;
    // The flux envelope at the source decays as exp(-2 v0 t) t^(-3/2).
    let mut horizon = (T::lit(1e12).ln() / rate).max(T::lit(20.0));
    loop {
        let horizon_cap = horizon.min(cfg.max_horizon);
        if horizon_cap > start {
            let n = ((horizon_cap - start) / cfg.panel).ceil().to_usize().unwrap_or(1).max(1);
            let width = (horizon_cap - start) / T::from_usize(n).unwrap();
            let breaks: Vec<T> = (0..=n)
                .map(|i| start + width * T::from_usize(i).unwrap())
                .collect();
            let body = integrate(|t: T| flux(p, T::zero(), t), &breaks, tol)?;
            total += body.value;
            start = horizon_cap;
        }
        let bound = tail_bound(p, start)?;
        if bound <= cfg.rel_tol * total.abs() {
            break;
        }
        if start >= cfg.max_horizon {
            return Err(Error::Convergence(format!(
                "flux tail beyond t = {} bounded by {:e}, above the budget",
                start.as_f64(),
                bound.as_f64()
            )));
        }
        horizon = start * two;
    }
    if !(total > T::zero()) {
        return Err(Error::Convergence(format!(
            "emitted particle number {} is not positive",
            total.as_f64()
        )));
    }
    Ok(total)
}

/// Bound on `int_T^inf |J(0,t)| dt` from the envelope `C exp(-2 v0 t) t^(-3/2)`
/// fitted on the last stretch before `T`.
fn tail_bound<T: Real>(p: &SourceParams<T>, horizon: T) -> Result<T> {
    let rate = T::lit(2.0) * p.v0;
    let mut c = T::zero();
    for i in 0..32 {
        let t = horizon - T::lit(0.25) * T::from_usize(i).unwrap();
        if t <= T::zero() {
            break;
        }
        let scale = (rate * t).exp() * t * t.sqrt();
        c = c.max(flux(p, T::zero(), t)?.abs() * scale);
    }
    // Allow for undersampled oscillation peaks.
    let c = c * T::lit(4.0);
    Ok(c * (-rate * horizon).exp() / (horizon * horizon.sqrt() * rate))
}

/// Source with its emitted particle number computed once on first use.
#[derive(Debug)]
pub struct NormalizedSource<T> {
    pub params: SourceParams<T>,
    norm: OnceLock<Result<T>>,
}

impl<T: Real> NormalizedSource<T> {
    pub fn new(params: SourceParams<T>) -> Self {
        NormalizedSource {
            params,
            norm: OnceLock::new(),
        }
    }

    pub fn norm(&self) -> Result<T> {
        self.norm.get_or_init(|| norm_factor(&self.params)).clone()
    }

    /// `psi / sqrt(N)`
    pub fn psi(&self, x: T, t: T) -> Result<Cplx<T>> {
        let n = self.norm()?;
        Ok(psi_exact(&self.params, x, t)? / n.sqrt())
    }

    /// `|psi|^2 / N`
    pub fn density(&self, x: T, t: T) -> Result<T> {
        let n = self.norm()?;
        Ok(psi_exact(&self.params, x, t)?.norm_sqr() / n)
    }
}

pub fn psi_normalized<T: Real>(source: &NormalizedSource<T>, x: T, t: T) -> Result<Cplx<T>> {
    source.psi(x, t)
}
