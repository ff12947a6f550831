//! Crank–Nicolson integration of `i psi_t = -psi_xx` on `[0, x_domain]`.
//!
//! The source enters as a Dirichlet value at `x = 0`, averaged over each step.
//! The right edge is either the exact discrete transparent boundary of the
//! scheme (default) or a zero Dirichlet wall guarded by a quiescence check.
//!
//! A sudden switch-on excites grid-scale modes that CN propagates with almost
//! zero group velocity, which caps the accuracy near the source at first order.
//! The source is therefore switched on over `ramp_width` with a polynomial
//! whose difference from the step has vanishing zeroth and first moments.

use crate::error::{Error, Result};
use crate::scalar::{cplx, Cplx, Real};
use crate::source_model::SourceParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RightBoundary {
    /// Discrete transparent boundary condition (exact for the scheme).
    Transparent,
    /// `psi = 0` at `x_domain`; the run fails once `|psi(x_domain - 5 dx)|` exceeds the threshold.
    Dirichlet,
}

#[derive(Debug, Clone, Copy)]
pub struct GridSpec<T> {
    pub dx: T,
    pub dt: T,
    pub x_domain: T,
    pub t_final: T,
    pub boundary: RightBoundary,
    /// Switch-on duration; zero gives the half-step average of the bare step.
    pub ramp_width: T,
    /// Store every `store_every`-th time level.
    pub store_every: usize,
    /// Rightmost stored position; `None` stores the whole grid.
    pub store_x_max: Option<T>,
    /// Largest tolerated `|psi|` next to a Dirichlet wall.
    pub quiescence: T,
}

impl<T: Real> GridSpec<T> {
    /// Transparent boundary, `ramp_width = 0.03`, storage every `0.5` time units.
    pub fn new(dx: T, dt: T, x_domain: T, t_final: T) -> Self {
        let every = (T::lit(0.5) / dt).round().to_usize().unwrap_or(1).max(1);
        GridSpec {
            dx,
            dt,
            x_domain,
            t_final,
            boundary: RightBoundary::Transparent,
            ramp_width: T::lit(0.03),
            store_every: every,
            store_x_max: None,
            quiescence: T::lit(1e-10),
        }
    }

    fn validate(&self) -> Result<(usize, usize)> {
        let pos = |v: T| v.is_finite() && v > T::zero();
        if !(pos(self.dx) && pos(self.dt) && pos(self.x_domain) && pos(self.t_final)) {
            return Err(Error::InvalidInput(
                "dx, dt, x_domain and t_final must be positive".into(),
            ));
        }
        if !(self.ramp_width >= T::zero()) || self.store_every == 0 {
            return Err(Error::InvalidInput(
                "ramp width must be >= 0 and store stride >= 1".into(),
            ));
        }
        let cells = (self.x_domain / self.dx).round().to_usize().unwrap_or(0);
        let steps = (self.t_final / self.dt).round().to_usize().unwrap_or(0);
        if cells < 8 || steps < 1 {
            return Err(Error::InvalidInput(
                "grid needs at least 8 cells and one step".into(),
            ));
        }
        Ok((cells, steps))
    }
}

/// Stored wave field plus the discrete probability budget of the run.
#[derive(Debug, Clone)]
pub struct GridField<T> {
    pub times: Vec<T>,
    pub positions: Vec<T>,
    /// `values[n][j]` at `times[n]`, `positions[j]`.
    pub values: Vec<Vec<Cplx<T>>>,
    /// `dx * sum |psi_j|^2` over interior nodes at the final time.
    pub final_content: T,
    /// Time-integrated discrete flux through the first cell face.
    pub inflow: T,
    /// Time-integrated discrete flux through the last cell face.
    pub outflow: T,
    /// Largest per-step violation of the discrete continuity identity.
    pub max_balance_residual: T,
}

/// Switch-on profile `s(u)`: 0 before, 1 after, `1 + (1-u)^3 (-1 + 12u - 21u^2)` in between.
pub fn ramp<T: Real>(u: T) -> T {
    if u <= T::zero() {
        T::zero()
    } else if u >= T::one() {
        T::one()
    } else {
        let v = T::one() - u;
        T::one() + v * v * v * (-T::one() + T::lit(12.0) * u - T::lit(21.0) * u * u)
    }
}

/// Kernel of the discrete transparent boundary: `psi_J^n = sum_k l_(n-k) psi_(J-1)^k`.
///
/// `r_ratio = 2 dx^2 / dt`. The coefficients solve the Z-transform relation
/// `nu + 1/nu = 2 - i R (z - 1)/(z + 1)` order by order.
pub fn transparent_kernel<T: Real>(r_ratio: T, len: usize) -> Vec<Cplx<T>> {
    let one = cplx(T::one(), T::zero());
    let two = cplx(T::lit(2.0), T::zero());
    let a = cplx(T::lit(2.0), -r_ratio);
    let b = cplx(T::lit(2.0), r_ratio);
    let disc = (a * a - two * two).sqrt();
    let r1 = (a + disc) / two;
    let r2 = (a - disc) / two;
    let l0 = if r1.norm() < r2.norm() { r1 } else { r2 };
    let mut l = vec![cplx(T::zero(), T::zero()); len];
    let mut c = vec![cplx(T::zero(), T::zero()); len];
    if len == 0 {
        return l;
    }
    l[0] = l0;
    c[0] = l0 * l0;
    let den = two * l0 - a;
    for n in 1..len {
        let mut s = cplx(T::zero(), T::zero());
        for k in 1..n {
            s += l[k] * l[n - k];
        }
        let mut rhs = -s - c[n - 1] + b * l[n - 1];
        if n == 1 {
            rhs -= one;
        }
        l[n] = rhs / den;
        c[n] = two * l0 * l[n] + s;
    }
    l
}

/// Runs the scheme from `psi = 0` up to `t_final`.
pub fn evolve_cn<T: Real>(p: &SourceParams<T>, g: &GridSpec<T>) -> Result<GridField<T>> {
    let (cells, steps) = g.validate()?;
    let zero = cplx(T::zero(), T::zero());
    let two = T::lit(2.0);
    let dx = g.dx;
    let dt = g.dt;
    let r = cplx(T::zero(), dt / (two * dx * dx));
    // Unknowns are the interior nodes 1..cells-1.
    let m = cells - 1;
    let omega0 = p.omega0;
    let source = |t: T| -> Cplx<T> {
        let carrier = (cplx(T::zero(), -T::one()) * omega0 * t).exp();
        if g.ramp_width > T::zero() {
            carrier * ramp(t / g.ramp_width)
        } else {
            carrier
        }
    };
    let kernel = match g.boundary {
        RightBoundary::Transparent => transparent_kernel(two * dx * dx / dt, steps + 1),
        RightBoundary::Dirichlet => Vec::new(),
    };
    // Thomas factorisation of the constant matrix.
    let diag = cplx(T::one(), T::zero()) + r * two;
    let off = -r;
    let mut diag_last = diag;
    if g.boundary == RightBoundary::Transparent {
        diag_last = diag - r * kernel[0];
    }
    let mut cprime = vec![zero; m];
    let mut denom = vec![zero; m];
    for j in 0..m {
        let d = if j + 1 == m { diag_last } else { diag };
        let den = if j == 0 { d } else { d - off * cprime[j - 1] };
        denom[j] = den;
        cprime[j] = off / den;
    }

    let n_store = match g.store_x_max {
        Some(xm) => ((xm / dx).floor().to_usize().unwrap_or(0)).min(cells),
        None => cells,
    };
    let positions: Vec<T> = (0..=n_store).map(|j| dx * T::from_usize(j).unwrap()).collect();
    let mut times = vec![T::zero()];
    let mut first = vec![zero; n_store + 1];
    first[0] = cplx(T::one(), T::zero());
    let mut values = vec![first];

    let mut psi = vec![zero; m];
    let mut psi_edge = zero;
    let mut history: Vec<Cplx<T>> = Vec::with_capacity(steps + 1);
    history.push(zero);
    let mut rhs = vec![zero; m];
    let mut g_prev = if g.ramp_width > T::zero() {
        zero
    } else {
        // Half-step average of the step at t = 0.
        cplx(T::lit(0.5), T::zero())
    };
    let mut content = T::zero();
    let mut inflow = T::zero();
    let mut outflow = T::zero();
    let mut worst = T::zero();
    let probe = m.saturating_sub(5);
    let face_flux = |a: Cplx<T>, b: Cplx<T>| two * (a.conj() * b).im / dx;

    for n in 0..steps {
        let t1 = dt * T::from_usize(n + 1).unwrap();
        let g_next = source(t1);
        let one_minus = cplx(T::one(), T::zero()) - r * two;
        for j in 0..m {
            let left = if j == 0 { zero } else { psi[j - 1] };
            let right = if j + 1 == m { psi_edge } else { psi[j + 1] };
            rhs[j] = one_minus * psi[j] + r * (left + right);
        }
        rhs[0] += r * (g_prev + g_next);
        let mut tail = zero;
        if g.boundary == RightBoundary::Transparent {
            // sum_{k=0}^{n} l_(n+1-k) psi_(J-1)^k
            for (k, h) in history.iter().enumerate() {
                tail += kernel[n + 1 - k] * *h;
            }
            rhs[m - 1] += r * tail;
        }
        // Forward sweep reusing rhs as scratch.
        rhs[0] = rhs[0] / denom[0];
        for j in 1..m {
            rhs[j] = (rhs[j] - off * rhs[j - 1]) / denom[j];
        }
        let old = std::mem::replace(&mut psi, vec![zero; m]);
        psi[m - 1] = rhs[m - 1];
        for j in (0..m - 1).rev() {
            psi[j] = rhs[j] - cprime[j] * psi[j + 1];
        }
        let edge_new = match g.boundary {
            RightBoundary::Transparent => kernel[0] * psi[m - 1] + tail,
            RightBoundary::Dirichlet => zero,
        };
        if g.boundary == RightBoundary::Transparent {
            history.push(psi[m - 1]);
        }

        // Discrete budget: P^{n+1} - P^n = dt (J_(1/2) - J_(J-1/2)) with averaged fields.
        let half = T::lit(0.5);
        let mid_left = (g_prev + g_next) * half;
        let mid_first = (old[0] + psi[0]) * half;
        let mid_last = (old[m - 1] + psi[m - 1]) * half;
        let mid_edge = (psi_edge + edge_new) * half;
        let j_in = face_flux(mid_left, mid_first);
        let j_out = face_flux(mid_last, mid_edge);
        let new_content = dx * psi.iter().map(|z| z.norm_sqr()).sum::<T>();
        let residual = (new_content - content - dt * (j_in - j_out)).abs();
        worst = worst.max(residual);
        content = new_content;
        inflow += dt * j_in;
        outflow += dt * j_out;

        psi_edge = edge_new;
        g_prev = g_next;

        if g.boundary == RightBoundary::Dirichlet && psi[probe].norm() > g.quiescence {
            return Err(Error::QuiescenceViolated {
                t: t1.as_f64(),
                magnitude: psi[probe].norm().as_f64(),
            });
        }
        if (n + 1) % g.store_every == 0 || n + 1 == steps {
            let mut row = Vec::with_capacity(n_store + 1);
            row.push(g_next);
            for j in 1..=n_store {
                row.push(if j <= m { psi[j - 1] } else { psi_edge });
            }
            times.push(t1);
            values.push(row);
        }
    }
    Ok(GridField {
        times,
        positions,
        values,
        final_content: content,
        inflow,
        outflow,
        max_balance_residual: worst,
    })
}

impl<T: Real> GridField<T> {
    /// Relative L2 distance to `reference` over stored points with `x <= x_max`, `t >= t_min`.
    pub fn relative_l2<F>(&self, x_max: T, t_min: T, mut reference: F) -> Result<T>
    where
        F: FnMut(T, T) -> Result<Cplx<T>>,
    {
        let mut num = T::zero();
        let mut den = T::zero();
        for (n, &t) in self.times.iter().enumerate() {
            if t < t_min {
                continue;
            }
            for (j, &x) in self.positions.iter().enumerate() {
                if x > x_max {
                    break;
                }
                let e = reference(x, t)?;
                num += (self.values[n][j] - e).norm_sqr();
                den += e.norm_sqr();
            }
        }
        if den == T::zero() {
            return Err(Error::InvalidInput("empty comparison window".into()));
        }
        Ok((num / den).sqrt())
    }

    /// Index of the stored time closest to `t`.
    pub fn time_index(&self, t: T) -> usize {
        let mut best = 0;
        for (i, &s) in self.times.iter().enumerate() {
            if (s - t).abs() < (self.times[best] - t).abs() {
                best = i;
            }
        }
        best
    }
}

/// Result of a grid-halving study.
#[derive(Debug, Clone, Copy)]
pub struct SelfConvergence<T> {
    /// `||u_h - u_(h/2)|| / ||u_(h/2) - u_(h/4)||`, 4 for a second-order scheme.
    pub ratio: T,
    /// `log2(ratio)`
    pub order: T,
}

/// Runs the spec at `h`, `h/2`, `h/4` (both `dx` and `dt` halved) and compares
/// the fields on the coarse storage points.
pub fn self_convergence<T: Real>(p: &SourceParams<T>, g: &GridSpec<T>) -> Result<SelfConvergence<T>> {
    let two = T::lit(2.0);
    let mut fields = Vec::new();
    for level in 0..3u32 {
        let f = T::lit(2f64.powi(level as i32));
        let spec = GridSpec {
            dx: g.dx / f,
            dt: g.dt / f,
            store_every: g.store_every * 2usize.pow(level),
            ..*g
        };
        fields.push(evolve_cn(p, &spec)?);
    }
    // Compare on the coarse storage points, level l holds them at index j << l.
    let diff = |a: usize, b: usize| -> T {
        let (fa, fb) = (&fields[a], &fields[b]);
        let mut acc = T::zero();
        for n in 0..fa.times.len().min(fb.times.len()) {
            for j in 0..fields[0].positions.len() {
                let (ja, jb) = (j << a, j << b);
                if jb >= fb.positions.len() {
                    break;
                }
                acc += (fa.values[n][ja] - fb.values[n][jb]).norm_sqr();
            }
        }
        acc.sqrt()
    };
    let coarse = diff(0, 1);
    let fine = diff(1, 2);
    if !(fine > T::zero()) {
        return Err(Error::Convergence("grids agree exactly; no ratio".into()));
    }
    let ratio = coarse / fine;
    let order = ratio.ln() / two.ln();
    if ratio < two || ratio > T::lit(6.0) {
        return Err(Error::Convergence(format!(
            "Richardson ratio {} outside [2, 6]",
            ratio.as_f64()
        )));
    }
    Ok(SelfConvergence { ratio, order })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::source_model::{make_params, psi_exact};

    #[test]
    fn ramp_moments_vanish() {
        use crate::quadrature::{integrate, Tolerance};
        let tol = Tolerance::new(1e-16, 0.0);
        let m0 = integrate(|u: f64| Ok(ramp(u) - 1.0), &[0.0, 1.0], tol).unwrap().value;
        let m1 = integrate(|u: f64| Ok((ramp(u) - 1.0) * u), &[0.0, 1.0], tol).unwrap().value;
        assert!(m0.abs() < 1e-15 && m1.abs() < 1e-15, "{m0} {m1}");
        assert_eq!(ramp(0.0f64), 0.0);
        assert_eq!(ramp(1.0f64), 1.0);
    }

    #[test]
    fn kernel_first_coefficient_is_decaying_root() {
        let l = transparent_kernel(2.0 * 0.01f64 * 0.01 / 1e-3, 4);
        assert!(l[0].norm() < 1.0);
        let a = Cplx::new(2.0, -0.2);
        assert!((l[0] * l[0] - a * l[0] + 1.0).norm() < 1e-14);
    }

    #[test]
    fn boundary_row_and_initial_row() {
        let p = make_params(0.3).unwrap();
        let mut g = GridSpec::new(0.02, 1e-3, 4.0, 1.0);
        g.store_every = 100;
        let f = evolve_cn(&p, &g).unwrap();
        assert!(f.values[0][1..].iter().all(|z| z.norm() == 0.0));
        for (n, &t) in f.times.iter().enumerate().skip(1) {
            let e = (-Cplx::new(0.0, 1.0) * p.omega0 * t).exp();
            assert!((f.values[n][0] - e).norm() < 1e-14);
        }
    }

    #[test]
    fn discrete_balance_holds() {
        let p = make_params(0.5).unwrap();
        let g = GridSpec::new(0.02, 1e-3, 5.0, 2.0);
        let f = evolve_cn(&p, &g).unwrap();
        assert!(f.max_balance_residual < 1e-13, "{}", f.max_balance_residual);
        let drift: f64 = f.final_content - (f.inflow - f.outflow);
        assert!(drift.abs() < 1e-11, "{drift}");
    }

    #[test]
    fn coarse_grid_tracks_exact() {
        let p = make_params(0.1).unwrap();
        let mut g = GridSpec::new(0.02, 1e-3, 5.0, 3.0);
        g.store_x_max = Some(2.0);
        let f = evolve_cn(&p, &g).unwrap();
        let err = f
            .relative_l2(2.0, 0.5, |x, t| psi_exact(&p, x, t))
            .unwrap();
        assert!(err < 5e-3, "{err}");
    }

    #[test]
    fn dirichlet_wall_reports_activity() {
        let p = make_params(0.1).unwrap();
        let mut g = GridSpec::new(0.02, 1e-3, 4.0, 1.0);
        g.boundary = RightBoundary::Dirichlet;
        assert!(matches!(
            evolve_cn(&p, &g),
            Err(Error::QuiescenceViolated { .. })
        ));
    }

    #[test]
    fn second_order_under_halving() {
        let p = make_params(0.2).unwrap();
        let mut g = GridSpec::new(0.04, 4e-3, 3.0, 1.0);
        g.store_every = 50;
        let c = self_convergence(&p, &g).unwrap();
        assert!(c.order > 1.7 && c.order < 2.3, "{:?}", c);
    }

    #[test]
    fn invalid_grid() {
        let p = make_params(0.1).unwrap();
        assert!(evolve_cn(&p, &GridSpec::new(-0.1, 1e-3, 4.0, 1.0)).is_err());
    }
}
