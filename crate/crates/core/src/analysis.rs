//! Characteristic times of the emitted wave and the parameter scans built on them.

use rayon::prelude::*;

use crate::asymptotics::{density_saddle, psi_interference};
use crate::error::{Error, Result};
use crate::roots::bisect;
use crate::scalar::Real;
use crate::source_model::{complex_time, norm_factor, NormalizedSource, SourceParams};

/// Number of solutions of `R(t) = 1` after the pole has entered.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Scenario {
    NoCrossing,
    SingleCrossing,
    DoubleCrossing,
}

impl Scenario {
    pub fn from_count(n: usize) -> Self {
        match n {
            0 => Scenario::NoCrossing,
            1 => Scenario::SingleCrossing,
            _ => Scenario::DoubleCrossing,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Scenario::NoCrossing => "none",
            Scenario::SingleCrossing => "single",
            Scenario::DoubleCrossing => "double",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TimeScales<T> {
    /// Pole entry time, infinite at `v0 = 1`.
    pub t_c: T,
    pub t_max_saddle: T,
    /// `|tau|`
    pub bl_time: T,
    /// Solutions of `R = 1` in ascending order.
    pub crossings: Vec<T>,
    pub scenario: Scenario,
    /// Last crossing, the onset of the power-law regime.
    pub t_p: Option<T>,
}

/// One cell of [`t_p_scan`].
#[derive(Debug, Clone, PartialEq)]
pub struct TpScanCell<T> {
    pub v0: T,
    pub x: T,
    pub t_c: T,
    pub scenario: Scenario,
    pub t_p: Option<T>,
}

/// One cell of [`dit_amplitude_map`]; `None` where no admissible minimum exists.
#[derive(Debug, Clone, PartialEq)]
pub struct DitScanPoint<T> {
    pub v0: T,
    pub x: T,
    pub t_min1: Option<T>,
    pub amplitude: Option<T>,
}

/// Time of the maximum of `|psi_S|^2` at fixed `x`:
/// `(1/sqrt 3) [tau_R^2 - tau_I^2 + 2 sqrt(tau_R^4 + tau_I^4 + tau_R^2 tau_I^2)]^(1/2)`.
pub fn t_max_saddle<T: Real>(p: &SourceParams<T>, x: T) -> Result<T> {
    if !(x > T::zero()) || !x.is_finite() {
        return Err(Error::Domain(format!("x = {} must be positive", x.as_f64())));
    }
    let ct = complex_time(p, x);
    let (r2, i2) = (ct.tau_r * ct.tau_r, ct.tau_i * ct.tau_i);
    let inner = r2 - i2 + T::lit(2.0) * (r2 * r2 + i2 * i2 + r2 * i2).sqrt();
    Ok(inner.sqrt() / T::lit(3.0).sqrt())
}

/// Position of the maximum of a snapshot of `|psi_S|^2`: `2 t sqrt(1 + v0^2)`.
pub fn x_max_snapshot<T: Real>(p: &SourceParams<T>, t: T) -> Result<T> {
    if !(t > T::zero()) || !t.is_finite() {
        return Err(Error::Domain(format!("t = {} must be positive", t.as_f64())));
    }
    Ok(T::lit(2.0) * t * p.k0_abs())
}

/// `ln R = ln |psi_0|^2 - ln |psi_S|^2`, `-inf` before the pole enters.
pub fn log_ratio<T: Real>(p: &SourceParams<T>, x: T, t: T) -> Result<T> {
    let saddle = density_saddle(p, x, t)?;
    if !crate::asymptotics::pole_active(p, x, t) {
        return Ok(T::neg_infinity());
    }
    let log_pole = -T::lit(4.0) * p.v0 * t - T::lit(2.0) * x;
    Ok(log_pole - saddle.ln())
}

/// `R = |psi_0 / psi_S|^2`.
pub fn ratio_r<T: Real>(p: &SourceParams<T>, x: T, t: T) -> Result<T> {
    Ok(log_ratio(p, x, t)?.exp())
}

/// Search horizon for crossings: `max(100 / (4 v0), 100 |tau|)`.
pub fn crossing_horizon<T: Real>(p: &SourceParams<T>, x: T) -> T {
    let hundred = T::lit(100.0);
    (hundred / (T::lit(4.0) * p.v0)).max(hundred * complex_time(p, x).modulus)
}

pub fn classify_crossings<T: Real>(p: &SourceParams<T>, x: T) -> Result<TimeScales<T>> {
    if !(p.v0 > T::zero() && p.v0 < T::one()) {
        return Err(Error::Domain(format!(
            "crossings need 0 < v0 < 1, got {}",
            p.v0.as_f64()
        )));
    }
    let t_max = t_max_saddle(p, x)?;
    let t_c = p.t_c(x);
    let cap = crossing_horizon(p, x);
    let mut crossings = Vec::new();
    if t_c < cap {
        let step = T::lit(1.05);
        let f = |t: T| log_ratio(p, x, t);
        // Start where the pole is on: the jump of R at t_c is not a crossing.
        let mut lo = t_c;
        while !crate::asymptotics::pole_active(p, x, lo) {
            lo = lo + lo * T::epsilon();
        }
        let mut flo = f(lo)?;
        while lo < cap {
            let hi = (lo * step).min(cap);
            let fhi = f(hi)?;
            if flo == T::zero() {
                crossings.push(lo);
            } else if flo.signum() != fhi.signum() && fhi != T::zero() {
                let root = bisect(f, lo, hi, hi * T::epsilon())?;
                let residual = f(root)?.abs();
                if residual > T::lit(1e-10) {
                    return Err(Error::Convergence(format!(
                        "|ln R| = {:e} at the crossing near t = {}",
                        residual.as_f64(),
                        root.as_f64()
                    )));
                }
                crossings.push(root);
            }
            lo = hi;
            flo = fhi;
        }
        // Beyond the cap R must keep falling.
        let h = cap * T::lit(1e-4);
        let slope = f(cap)? - f(cap - h)?;
        if slope >= T::zero() {
            return Err(Error::Convergence(format!(
                "R still growing at the search horizon t = {}",
                cap.as_f64()
            )));
        }
    }
    let t_p = crossings.last().copied();
    Ok(TimeScales {
        t_c,
        t_max_saddle: t_max,
        bl_time: complex_time(p, x).modulus,
        scenario: Scenario::from_count(crossings.len()),
        crossings,
        t_p,
    })
}

/// Crossing analysis over a `v0 x x` grid, sorted by `(v0, x)`.
pub fn t_p_scan<T: Real>(v0s: &[T], xs: &[T]) -> Result<Vec<TpScanCell<T>>> {
    if v0s.is_empty() || xs.is_empty() {
        return Err(Error::InvalidInput("scan grids must be nonempty".into()));
    }
    let cells: Vec<(T, T)> = v0s
        .iter()
        .flat_map(|&v| xs.iter().map(move |&x| (v, x)))
        .collect();
    let mut out = cells
        .par_iter()
        .map(|&(v0, x)| {
            let p = SourceParams::new(v0)?;
            let ts = classify_crossings(&p, x)?;
            Ok(TpScanCell {
                v0,
                x,
                t_c: ts.t_c,
                scenario: ts.scenario,
                t_p: ts.t_p,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    out.sort_by(|a, b| {
        a.v0.partial_cmp(&b.v0)
            .unwrap()
            .then(a.x.partial_cmp(&b.x).unwrap())
    });
    Ok(out)
}

/// `|psi_N(x, t_p)|^2`.
pub fn density_at_tp<T: Real>(source: &NormalizedSource<T>, x: T) -> Result<T> {
    let ts = classify_crossings(&source.params, x)?;
    match ts.t_p {
        Some(t_p) => source.density(x, t_p),
        None => Err(Error::Undefined(format!(
            "no R = 1 crossing at v0 = {}, x = {}",
            source.params.v0.as_f64(),
            x.as_f64()
        ))),
    }
}

/// First time with `omega t = 3 pi / 2` after the pole has entered.
pub fn dit_first_minimum_time<T: Real>(p: &SourceParams<T>, x: T) -> Result<T> {
    dit_minimum_time(p, x, 0)
}

/// Smallest `t > t_c` with `omega(t) t = 3 pi / 2 + 2 pi n`, i.e. the admissible root of
/// `(1 - v0^2) t^2 - (v0 x + 3 pi / 2 + 2 pi n) t + x^2 / 4 = 0`.
pub fn dit_minimum_time<T: Real>(p: &SourceParams<T>, x: T, n: u32) -> Result<T> {
    if !(x > T::zero()) || !x.is_finite() {
        return Err(Error::Domain(format!("x = {} must be positive", x.as_f64())));
    }
    let no_min = || Error::NoMinimum {
        v0: p.v0.as_f64(),
        x: x.as_f64(),
    };
    let v0 = p.v0;
    let phase = T::lit(1.5) * T::PI() + T::lit(2.0) * T::PI() * T::from_u32(n).unwrap();
    let a = T::one() - v0 * v0;
    let b = -(v0 * x + phase);
    let c = x * x * T::lit(0.25);
    let roots: Vec<T> = if a == T::zero() {
        vec![-c / b]
    } else {
        let disc = b * b - T::lit(4.0) * a * c;
        if disc < T::zero() {
            return Err(no_min());
        }
        // b < 0, so -b + sqrt(disc) never cancels.
        let q = T::lit(0.5) * (-b + disc.sqrt());
        vec![c / q, q / a]
    };
    let t_c = p.t_c(x);
    roots
        .into_iter()
        .filter(|&t| t > t_c && t.is_finite())
        .fold(None, |best: Option<T>, t| Some(best.map_or(t, |b| b.min(t))))
        .ok_or_else(no_min)
}

/// `|psi_Int(x, t_min1)| / N` over a `v0 x x` grid, sorted by `(v0, x)`.
pub fn dit_amplitude_map<T: Real>(v0s: &[T], xs: &[T]) -> Result<Vec<DitScanPoint<T>>> {
    if v0s.is_empty() || xs.is_empty() {
        return Err(Error::InvalidInput("scan grids must be nonempty".into()));
    }
    let norms = v0s
        .par_iter()
        .map(|&v0| {
            let p = SourceParams::new(v0)?;
            Ok((p, norm_factor(&p)?))
        })
        .collect::<Result<Vec<_>>>()?;
    let cells: Vec<(SourceParams<T>, T, T)> = norms
        .iter()
        .flat_map(|&(p, n)| xs.iter().map(move |&x| (p, n, x)))
        .collect();
    let mut out = cells
        .par_iter()
        .map(|&(p, n, x)| match dit_first_minimum_time(&p, x) {
            Ok(t) => Ok(DitScanPoint {
                v0: p.v0,
                x,
                t_min1: Some(t),
                amplitude: Some(psi_interference(&p, x, t)?.abs() / n),
            }),
            Err(Error::NoMinimum { .. }) => Ok(DitScanPoint {
                v0: p.v0,
                x,
                t_min1: None,
                amplitude: None,
            }),
            Err(e) => Err(e),
        })
        .collect::<Result<Vec<_>>>()?;
    out.sort_by(|a, b| {
        a.v0.partial_cmp(&b.v0)
            .unwrap()
            .then(a.x.partial_cmp(&b.x).unwrap())
    });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::asymptotics::dit_parameters;
    use crate::source_model::make_params;

    fn p(v0: f64) -> SourceParams<f64> {
        make_params(v0).unwrap()
    }

    #[test]
    fn t_max_limits() {
        let m = complex_time(&p(0.0), 2.0).modulus;
        assert!((t_max_saddle(&p(0.0), 2.0).unwrap() - m / 3f64.sqrt()).abs() < 1e-15);
        let m = complex_time(&p(1.0), 2.0).modulus;
        assert!((t_max_saddle(&p(1.0), 2.0).unwrap() - m / 3f64.powf(0.25)).abs() < 1e-15);
        assert!(matches!(t_max_saddle(&p(0.5), 0.0), Err(Error::Domain(_))));
    }

    #[test]
    fn t_max_is_linear() {
        let q = p(0.37);
        let a = t_max_saddle(&q, 1.3).unwrap();
        let b = t_max_saddle(&q, 2.6).unwrap();
        assert!((b - 2.0 * a).abs() < 1e-13 * b);
    }

    #[test]
    fn x_max_values() {
        assert_eq!(x_max_snapshot(&p(0.0), 1.0).unwrap(), 2.0);
        assert!((x_max_snapshot(&p(1.0), 1.0).unwrap() - 8f64.sqrt()).abs() < 1e-15);
        assert!(x_max_snapshot(&p(0.2), 0.0).is_err());
    }

    #[test]
    fn ratio_before_pole_is_zero() {
        assert_eq!(ratio_r(&p(0.3), 2.0, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn figure_scenarios() {
        let q = p(0.1);
        for &(x, s) in &[
            (0.1, Scenario::DoubleCrossing),
            (1.0, Scenario::DoubleCrossing),
            (2.5, Scenario::NoCrossing),
            (4.0, Scenario::NoCrossing),
        ] {
            let ts = classify_crossings(&q, x).unwrap();
            assert_eq!(ts.scenario, s, "x = {x}: {:?}", ts.crossings);
        }
    }

    #[test]
    fn pinned_transition_time() {
        let ts = classify_crossings(&p(0.1), 0.1).unwrap();
        assert_eq!(ts.crossings.len(), 2);
        assert!((ts.crossings[0] - 0.0803).abs() < 1e-4);
        assert!((ts.t_p.unwrap() - 46.125_485_677_869_48).abs() < 1e-9);
        for &c in &ts.crossings {
            assert!(log_ratio(&p(0.1), 0.1, c).unwrap().abs() <= 1e-10);
            assert!(c > ts.t_c);
        }
    }

    #[test]
    fn pole_entering_above_one_is_a_single_crossing() {
        let q = p(0.1);
        let x = 0.249_433_237_618_735_45;
        let t_c = q.t_c(x);
        assert!(log_ratio(&q, x, t_c * (1.0 + 1e-12)).unwrap() > 0.0);
        let ts = classify_crossings(&q, x).unwrap();
        assert_eq!(ts.scenario, Scenario::SingleCrossing, "{:?}", ts.crossings);
        assert!(ts.t_p.unwrap() > 10.0);
    }

    #[test]
    fn crossings_refuse_limits() {
        assert!(matches!(classify_crossings(&p(0.0), 1.0), Err(Error::Domain(_))));
        assert!(matches!(classify_crossings(&p(1.0), 1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn dit_minimum_values() {
        let q = p(0.05);
        let t = dit_first_minimum_time(&q, 1.5).unwrap();
        assert!((t - 4.678_864_67).abs() < 1e-7, "{t}");
        assert!(t > q.t_c(1.5));
        let d = dit_parameters(&q, 1.5, t).unwrap();
        assert!((d.omega * t - 1.5 * std::f64::consts::PI).abs() < 1e-12);
        assert!((dit_minimum_time(&q, 1.5, 1).unwrap() - 11.0473).abs() < 1e-3);
        let t0 = dit_first_minimum_time(&p(0.0), 1e-9).unwrap();
        assert!((t0 - 1.5 * std::f64::consts::PI).abs() < 1e-9);
        assert!(matches!(
            dit_first_minimum_time(&p(1.0), 1.0),
            Err(Error::NoMinimum { .. })
        ));
    }

    #[test]
    fn scans_are_sorted() {
        let s = t_p_scan(&[0.5, 0.1], &[1.0, 0.1]).unwrap();
        let keys: Vec<(f64, f64)> = s.iter().map(|c| (c.v0, c.x)).collect();
        assert_eq!(keys, vec![(0.1, 0.1), (0.1, 1.0), (0.5, 0.1), (0.5, 1.0)]);
        let m = dit_amplitude_map(&[0.2, 0.05], &[2.0, 0.5]).unwrap();
        assert_eq!(m[0].v0, 0.05);
        assert_eq!(m[1].x, 2.0);
    }
}
