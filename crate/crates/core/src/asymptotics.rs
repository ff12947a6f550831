//! Saddle and pole contributions to the wave function and their interference.
//!
//! Far from `t ~ |tau|` the exact solution splits into a saddle term `psi_S`,
//! decaying as a power law, and a pole term `psi_0`, present only after the
//! critical time `t_c = x / (2 (1 - v0))` and decaying with the source.

use crate::error::{Error, Result};
use crate::scalar::{cplx, Cplx, Real};
use crate::source_model::{check_point, complex_time, psi_exact, saddle_variables, SourceParams};

/// Exact wave function next to its two-term asymptotic split.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaveDecomposition<T> {
    pub psi_exact: Cplx<T>,
    pub psi_saddle: Cplx<T>,
    pub psi_pole: Cplx<T>,
    /// `psi_pole + psi_saddle`
    pub psi_approx: Cplx<T>,
    /// Cross term `|psi_0 + psi_S|^2 - |psi_0|^2 - |psi_S|^2`.
    pub psi_interference: T,
    /// `|u_+|`; the split is reliable once both moduli are large.
    pub u_abs_plus: T,
    /// `|u_-|`
    pub u_abs_minus: T,
}

/// Rates and coefficients of the interference term.
///
/// `gamma`, `omega`, `f_plus`, `f_minus` and `delta` follow the published
/// closed form. `phase_rate`, `cos_coeff` and `sin_coeff` are the coefficients
/// of the cross term as it actually follows from `psi_0` and `psi_S`:
/// `x exp(-gamma t) / (sqrt(2 pi) t^(3/2) delta) (cos_coeff cos(phase_rate t) + sin_coeff sin(phase_rate t))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DitParameters<T> {
    /// `2 (v0 + k_s)`
    pub gamma: T,
    /// `1 + k_s^2 - v0^2 - 2 k_s v0`
    pub omega: T,
    /// `1 - v0 (2 + v0) + k_s^2`
    pub f_plus: T,
    /// `-1 - v0 (2 - v0) - k_s^2`
    pub f_minus: T,
    /// `v0^4 - 2 v0^2 (k_s^2 - 1) + (k_s^2 + 1)^2`
    pub delta: T,
    /// `t / tau_I`
    pub theta: T,
    /// `1 - (v0 + k_s)^2`
    pub phase_rate: T,
    /// `1 + k_s^2 - v0^2 + 2 v0`
    pub cos_coeff: T,
    /// `1 + k_s^2 - v0^2 - 2 v0`
    pub sin_coeff: T,
}

/// Leading small-`v0`, large-`theta` forms of the interference term.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmallV0Expansion<T> {
    /// `-x (1 + v0 theta)`, approximating `-gamma t`.
    pub exponent: T,
    /// `1 - v0 (v0 + v0 / theta)`
    pub omega_approx: T,
    /// `exp(-gamma t) / (sqrt(2 pi x) theta^(3/2)) [1 + 2 v0 (1 - 9 v0 / 8)]`
    pub amplitude: T,
}

fn require_positive_time<T: Real>(x: T, t: T) -> Result<()> {
    check_point(x, t)?;
    if t <= T::zero() {
        return Err(Error::Domain(format!("t = {} must be positive", t.as_f64())));
    }
    Ok(())
}

/// Pole support, shared by `psi_pole` and `psi_interference` so that both
/// switch on at the same floating point instant: `1 - v0 - k_s >= 0`.
pub fn pole_active<T: Real>(p: &SourceParams<T>, x: T, t: T) -> bool {
    if p.v0 >= T::one() {
        return false;
    }
    let k_s = x / (T::lit(2.0) * t);
    T::one() - p.v0 - k_s >= T::zero()
}

/// `psi_S = -sqrt(2t/pi) exp(i k_s^2 t) / ((i - 1) k0) tau / (t^2 - tau^2)`.
pub fn psi_saddle<T: Real>(p: &SourceParams<T>, x: T, t: T) -> Result<Cplx<T>> {
    require_positive_time(x, t)?;
    let tau = complex_time(p, x).tau;
    let k_s = x / (T::lit(2.0) * t);
    let phase = k_s * k_s * t;
    let carrier = cplx(phase.cos(), phase.sin());
    let pref = (T::lit(2.0) * t / T::PI()).sqrt();
    let t2 = cplx(t * t, T::zero());
    let denom = cplx(-T::one(), T::one()) * p.k0 * (t2 - tau * tau);
    Ok(-carrier * tau * pref / denom)
}

/// `|psi_S|^2 = t |tau|^2 / (pi |k0|^2 [t^4 + |tau|^4 - 2 t^2 Re(tau^2)])`.
pub fn density_saddle<T: Real>(p: &SourceParams<T>, x: T, t: T) -> Result<T> {
    require_positive_time(x, t)?;
    let ct = complex_time(p, x);
    let m2 = ct.modulus * ct.modulus;
    let re_tau2 = ct.tau_r * ct.tau_r - ct.tau_i * ct.tau_i;
    let t2 = t * t;
    let k2 = p.k0.norm_sqr();
    Ok(t * m2 / (T::PI() * k2 * (t2 * t2 + m2 * m2 - T::lit(2.0) * t2 * re_tau2)))
}

/// `psi_0 = exp(-i (v0^2 - 1) t - i v0 x) exp(-2 v0 t - x)` once `t >= t_c`, else 0.
pub fn psi_pole<T: Real>(p: &SourceParams<T>, x: T, t: T) -> Result<Cplx<T>> {
    require_positive_time(x, t)?;
    if !pole_active(p, x, t) {
        return Ok(cplx(T::zero(), T::zero()));
    }
    let v0 = p.v0;
    let phase = -(v0 * v0 - T::one()) * t - v0 * x;
    let modulus = (-T::lit(2.0) * v0 * t - x).exp();
    Ok(cplx(modulus * phase.cos(), modulus * phase.sin()))
}

/// Interference term `2 Re(psi_0 conj(psi_S))` in closed form.
pub fn psi_interference<T: Real>(p: &SourceParams<T>, x: T, t: T) -> Result<T> {
    require_positive_time(x, t)?;
    if !pole_active(p, x, t) {
        return Ok(T::zero());
    }
    let d = dit_parameters(p, x, t)?;
    let arg = d.phase_rate * t;
    Ok(envelope_prefactor(x, t, &d) * (d.cos_coeff * arg.cos() + d.sin_coeff * arg.sin()))
}

/// The interference term exactly as published, with `omega` and `F_+-`.
///
/// Differs from [`psi_interference`]: for `v0 = 0` it reduces to
/// `2 Re(psi_0 psi_S)` without the conjugate, and for `v0 > 0` to neither form.
/// Kept for comparison.
pub fn psi_interference_published<T: Real>(p: &SourceParams<T>, x: T, t: T) -> Result<T> {
    require_positive_time(x, t)?;
    if !pole_active(p, x, t) {
        return Ok(T::zero());
    }
    let d = dit_parameters(p, x, t)?;
    let arg = d.omega * t;
    Ok(envelope_prefactor(x, t, &d) * (d.f_plus * arg.cos() + d.f_minus * arg.sin()))
}

/// `x exp(-gamma t) / (sqrt(2 pi) t^(3/2) delta)`
fn envelope_prefactor<T: Real>(x: T, t: T, d: &DitParameters<T>) -> T {
    x * (-d.gamma * t).exp() / ((T::lit(2.0) * T::PI()).sqrt() * t * t.sqrt() * d.delta)
}

/// Envelope of [`psi_interference`]: prefactor times `hypot(cos_coeff, sin_coeff)`.
pub fn interference_envelope<T: Real>(p: &SourceParams<T>, x: T, t: T) -> Result<T> {
    let d = dit_parameters(p, x, t)?;
    Ok(envelope_prefactor(x, t, &d) * d.cos_coeff.hypot(d.sin_coeff))
}

/// Envelope of [`psi_interference_published`]: prefactor times `hypot(F_+, F_-)`.
pub fn interference_envelope_published<T: Real>(p: &SourceParams<T>, x: T, t: T) -> Result<T> {
    let d = dit_parameters(p, x, t)?;
    Ok(envelope_prefactor(x, t, &d) * d.f_plus.hypot(d.f_minus))
}

pub fn dit_parameters<T: Real>(p: &SourceParams<T>, x: T, t: T) -> Result<DitParameters<T>> {
    require_positive_time(x, t)?;
    let two = T::lit(2.0);
    let v0 = p.v0;
    let k_s = x / (two * t);
    let ks2 = k_s * k_s;
    let v2 = v0 * v0;
    let tau_i = complex_time(p, x).tau_i;
    let s = v0 + k_s;
    Ok(DitParameters {
        gamma: two * s,
        omega: T::one() + ks2 - v2 - two * k_s * v0,
        f_plus: T::one() - v0 * (two + v0) + ks2,
        f_minus: -T::one() - v0 * (two - v0) - ks2,
        delta: v2 * v2 - two * v2 * (ks2 - T::one()) + (ks2 + T::one()) * (ks2 + T::one()),
        theta: if tau_i > T::zero() { t / tau_i } else { T::infinity() },
        phase_rate: T::one() - s * s,
        cos_coeff: T::one() + ks2 - v2 + two * v0,
        sin_coeff: T::one() + ks2 - v2 - two * v0,
    })
}

/// Small-`v0` forms; refused outside `theta >= 3`, `v0 <= 0.3`.
pub fn dit_small_v0<T: Real>(p: &SourceParams<T>, x: T, t: T) -> Result<SmallV0Expansion<T>> {
    require_positive_time(x, t)?;
    if x <= T::zero() {
        return Err(Error::Domain("small-v0 expansion needs x > 0".into()));
    }
    let d = dit_parameters(p, x, t)?;
    let v0 = p.v0;
    if d.theta < T::lit(3.0) {
        return Err(Error::Range(format!(
            "theta = t / tau_I = {} below 3",
            d.theta.as_f64()
        )));
    }
    if v0 > T::lit(0.3) {
        return Err(Error::Range(format!("v0 = {} above 0.3", v0.as_f64())));
    }
    let two = T::lit(2.0);
    let correction = T::one() + two * v0 * (T::one() - T::lit(9.0 / 8.0) * v0);
    Ok(SmallV0Expansion {
        exponent: -x * (T::one() + v0 * d.theta),
        omega_approx: T::one() - v0 * (v0 + v0 / d.theta),
        amplitude: (-d.gamma * t).exp() / ((two * T::PI() * x).sqrt() * d.theta.powf(T::lit(1.5)))
            * correction,
    })
}

pub fn decompose<T: Real>(p: &SourceParams<T>, x: T, t: T) -> Result<WaveDecomposition<T>> {
    require_positive_time(x, t)?;
    let exact = psi_exact(p, x, t)?;
    let saddle = psi_saddle(p, x, t)?;
    let pole = psi_pole(p, x, t)?;
    let interference = psi_interference(p, x, t)?;
    let u = saddle_variables(p, x, t)?;
    Ok(WaveDecomposition {
        psi_exact: exact,
        psi_saddle: saddle,
        psi_pole: pole,
        psi_approx: pole + saddle,
        psi_interference: interference,
        u_abs_plus: u.u_plus.norm(),
        u_abs_minus: u.u_minus.norm(),
    })
}
