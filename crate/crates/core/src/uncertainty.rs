//! Position–momentum uncertainty with boundary terms: commutators, the
//! Robertson–Schroedinger bound for `(x, -i d/dx)`, and the kinetic-energy
//! inequality written in observable quantities.

use serde::Serialize;

use crate::config::BoxConfig;
use crate::error::{Error, Result};
use crate::momentum::{expval_pi, minus_i_ddx, momentum_amplitudes, MomentumExtension};
use crate::quadrature::Quadrature;
use crate::spectrum::{Gamma, RobinBC};
use crate::wave::{derivative, norm_sq, ClosureWave, WaveFunction};
use crate::C64;

/// Tolerance below which a negative slack still counts as satisfied.
pub const SLACK_TOLERANCE: f64 = 1e-10;

/// First moments and endpoint densities shared by the reports below.
struct Moments {
    norm: f64,
    mean_x: f64,
    var_x: f64,
    rho_plus: f64,
    rho_minus: f64,
    /// `int Psi* Psi'`
    d: C64,
    /// `int x Psi* Psi'`
    xd: C64,
}

fn moments<W: WaveFunction>(psi: &W, quad: &Quadrature) -> Result<Moments> {
    psi.config().check_same(&quad.config())?;
    let h = quad.config().half();
    let (mut norm, mut x1, mut x2) = (0.0, 0.0, 0.0);
    let (mut d, mut xd) = (C64::new(0.0, 0.0), C64::new(0.0, 0.0));
    for (&x, &w) in quad.nodes().iter().zip(quad.weights()) {
        let v = psi.value(x);
        let p = v.norm_sqr() * w;
        norm += p;
        x1 += x * p;
        x2 += x * x * p;
        let vd = v.conj() * derivative(psi, 1, x)? * w;
        d += vd;
        xd += vd * x;
    }
    let mean_x = x1 / norm;
    Ok(Moments {
        norm,
        mean_x,
        var_x: x2 / norm - mean_x * mean_x,
        rho_plus: psi.value(h).norm_sqr(),
        rho_minus: psi.value(-h).norm_sqr(),
        d,
        xd,
    })
}

/// `<[x, p_R]>` on a physical state, through
/// `<p_R x> = <x (-i d/dx)> - i ||Psi||^2 + i (L/4)(|Psi(L/2)|^2 + |Psi(-L/2)|^2)`
/// and `<x p_R> = conj(<p_R x>)`.
pub fn commutator_expectation_x_pr<W: WaveFunction>(psi: &W, quad: &Quadrature) -> Result<C64> {
    let (px, _) = pr_x(psi, quad)?;
    Ok(px.conj() - px)
}

/// `(<p_R x>, ||Psi||^2)`.
fn pr_x<W: WaveFunction>(psi: &W, quad: &Quadrature) -> Result<(C64, f64)> {
    let mo = moments(psi, quad)?;
    let l = quad.config().l;
    let x_minus_i_d = C64::new(0.0, -1.0) * mo.xd;
    let px = x_minus_i_d + C64::new(0.0, -mo.norm + 0.25 * l * (mo.rho_plus + mo.rho_minus));
    Ok((px, mo.norm))
}

/// `<[x, p_R]>` from the momentum eigenbasis: with `c_n` the amplitudes of
/// `Psi` and `d_n` those of `x Psi`, `<p_R x> = sum_n k_n conj(c_n) d_n`.
///
/// The sum is truncated at `|n| <= n_max`; it converges when `x Psi` has
/// decaying amplitudes, so use it as a cross-check on smooth states.
pub fn commutator_spectral_series<W: WaveFunction>(
    psi: &W,
    extension: &MomentumExtension,
    n_max: i64,
    quad: &Quadrature,
) -> Result<C64> {
    let cfg = psi.config();
    let c = momentum_amplitudes(psi, extension, -n_max, n_max, quad);
    let values: Vec<C64> = quad.nodes().iter().map(|&x| psi.value(x) * x).collect();
    let q = quad.clone();
    let xs = ClosureWave::new(cfg, move |x| q.interpolate(&values, x));
    let d = momentum_amplitudes(&xs, extension, -n_max, n_max, quad);
    let mut s = C64::new(0.0, 0.0);
    for (j, n) in (-n_max..=n_max).enumerate() {
        s += c[j].conj() * d[j] * extension.eigenvalue(n, cfg.l);
    }
    Ok(s.conj() - s)
}

/// `<[x, p_I]>`, with `p_I` acting as the boundary form
/// `<Phi|p_I|Psi> = (Phi*(-L/2) Psi(-L/2) - Phi*(L/2) Psi(L/2)) / 2`.
pub fn commutator_expectation_x_pi<W: WaveFunction>(psi: &W) -> C64 {
    let h = psi.config().half();
    let form = |phi: &dyn Fn(f64) -> C64, chi: &dyn Fn(f64) -> C64| {
        0.5 * (phi(-h).conj() * chi(-h) - phi(h).conj() * chi(h))
    };
    let v = |x: f64| psi.value(x);
    let xv = |x: f64| psi.value(x) * x;
    // <x p_I> = <x Psi|p_I Psi>, <p_I x> = <Psi|p_I x Psi>
    form(&xv, &v) - form(&v, &xv)
}

/// Both sides of `Delta x Delta(-i d/dx) >= |<x (-i d/dx)> - <x><-i d/dx>|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GeneralizedUncertainty {
    pub lhs: f64,
    pub rhs: f64,
    /// The right-hand side from its real and imaginary parts, using
    /// `<B^dagger A>` computed separately by parts.
    pub root_sum: f64,
    pub slack: f64,
}

/// `A = x`, `B = -i d/dx`. `<B^dagger B>` is `int |Psi'|^2`.
pub fn generalized_uncertainty<W: WaveFunction>(psi: &W, quad: &Quadrature) -> Result<GeneralizedUncertainty> {
    let mo = moments(psi, quad)?;
    let h = quad.config().half();
    let i = C64::new(0.0, 1.0);
    let mut dd = 0.0;
    let mut by_parts = C64::new(0.0, 0.0);
    for (&x, &w) in quad.nodes().iter().zip(quad.weights()) {
        let v = psi.value(x);
        let d = derivative(psi, 1, x)?;
        dd += d.norm_sqr() * w;
        by_parts += v.conj() * (v + d * x) * w;
    }
    let n = mo.norm;
    let b = minus_i_ddx(psi, quad)? / n;
    let var_b = dd / n - b.norm_sqr();
    let ab = -i * mo.xd / n;
    let z = ab - b * mo.mean_x;
    let ba = (i * (h * (mo.rho_plus + mo.rho_minus)) - i * by_parts) / n;
    let re = (0.5 * (ab + ba)).re - mo.mean_x * b.re;
    let im = ((ab - ba) / (2.0 * i)).re - mo.mean_x * b.im;
    let lhs = (mo.var_x * var_b.max(0.0)).sqrt();
    let rhs = z.norm();
    Ok(GeneralizedUncertainty {
        lhs,
        rhs,
        root_sum: re.hypot(im),
        slack: lhs - rhs,
    })
}

/// Every term of the kinetic-energy inequality
/// `2m<T> >= <p_R>^2 + (<{x,p_R}>/2 - <p_R><x>)^2 / Dx^2 + B^2 / (4 Dx^2)
///          + gamma_+ rho_+ + gamma_- rho_- + (rho_+ - rho_-)^2 / 4`,
/// where `B = 1 + (<x> - L/2) rho_+ - (<x> + L/2) rho_-`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct UncertaintyReport {
    pub delta_x: f64,
    #[serde(rename = "two_m_T")]
    pub two_m_t: f64,
    #[serde(rename = "pR")]
    pub p_r: f64,
    #[serde(rename = "pR2_term")]
    pub p_r2_term: f64,
    pub anticomm: f64,
    /// Imaginary part of `<{x, p_R}>` from the boundary chain; zero up to quadrature error.
    pub anticomm_imag: f64,
    pub cross_term: f64,
    pub boundary_block: f64,
    /// `boundary_block^2 / (4 Dx^2)`
    pub boundary_term: f64,
    pub gamma_terms: f64,
    #[serde(rename = "pI_sq_term")]
    pub p_i_sq_term: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
    pub slack: f64,
}

pub fn kinetic_inequality_report<W: WaveFunction>(
    psi: &W,
    bc: &RobinBC,
    quad: &Quadrature,
) -> Result<UncertaintyReport> {
    let cfg = psi.config();
    let mo = moments(psi, quad)?;
    if (mo.norm - 1.0).abs() > 1e-8 {
        return Err(Error::Precondition(format!("state is not normalized (norm^2 = {})", mo.norm)));
    }
    let (rr, rl) = bc.residuals(psi, quad)?;
    if rr.max(rl) > 1e-6 {
        return Err(Error::Precondition(format!(
            "state violates the boundary conditions (residuals {rr:.3e}, {rl:.3e})"
        )));
    }
    if !(mo.var_x > 0.0) {
        return Err(Error::Numeric(format!("position variance {} is not positive", mo.var_x)));
    }
    let h = cfg.half();
    let mut kin = 0.0;
    for (&x, &w) in quad.nodes().iter().zip(quad.weights()) {
        kin -= (psi.value(x).conj() * derivative(psi, 2, x)?).re * w;
    }
    let p_r = mo.d.im;
    let anticomm = 2.0 * mo.xd.im;
    let anticomm_imag = -2.0 * mo.xd.re - mo.norm + h * (mo.rho_plus + mo.rho_minus);
    let (xm, var) = (mo.mean_x, mo.var_x);
    let cross = 0.5 * anticomm - p_r * xm;
    let block = 1.0 + (xm - h) * mo.rho_plus - (xm + h) * mo.rho_minus;
    let gamma_term = |g: Gamma, rho: f64| g.finite().map_or(0.0, |g| g * rho);
    let gamma_terms = gamma_term(bc.plus, mo.rho_plus) + gamma_term(bc.minus, mo.rho_minus);
    let p_i = expval_pi(psi);
    let p_r2_term = p_r * p_r;
    let cross_term = cross * cross / var;
    let boundary_term = block * block / (4.0 * var);
    let p_i_sq_term = p_i * p_i;
    let rhs = p_r2_term + cross_term + boundary_term + gamma_terms + p_i_sq_term;
    let slack = kin - rhs;
    Ok(UncertaintyReport {
        delta_x: var.sqrt(),
        two_m_t: kin,
        p_r,
        p_r2_term,
        anticomm,
        anticomm_imag,
        cross_term,
        boundary_block: block,
        boundary_term,
        gamma_terms,
        p_i_sq_term,
        lhs: kin,
        rhs,
        holds: slack >= -SLACK_TOLERANCE,
        slack,
    })
}

/// `N exp[-(i/b)(x + a x^2 / 2)]`, normalized on the box.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SaturatingState {
    cfg: BoxConfig,
    a: C64,
    b: C64,
    norm: f64,
}

impl SaturatingState {
    fn raw(&self, x: f64) -> C64 {
        (C64::new(0.0, -1.0) / self.b * (x + 0.5 * self.a * x * x)).exp()
    }

    fn slope(&self, x: f64) -> C64 {
        C64::new(0.0, -1.0) / self.b * (self.a * x + 1.0)
    }

    /// For real `a` and `b = i c`, the relative L2 residual of
    /// `H psi = E psi` with `V = (a x + 1)^2 / (2 m c^2)` and `E = a / (2 m c)`.
    pub fn eigen_residual(&self, quad: &Quadrature) -> Result<f64> {
        if self.a.im != 0.0 || self.b.re != 0.0 {
            return Err(Error::Parameter("needs real a and imaginary b".into()));
        }
        let (a, c, m) = (self.a.re, self.b.im, self.cfg.m);
        let e = a / (2.0 * m * c);
        let scale = e.abs() + 1.0 / (m * self.cfg.l * self.cfg.l);
        let mut res = 0.0;
        for (&x, &w) in quad.nodes().iter().zip(quad.weights()) {
            let v = self.value(x);
            let pot = (a * x + 1.0).powi(2) / (2.0 * m * c * c);
            let d2 = self.analytic_derivative(2, x).expect("analytic");
            res += (-d2 / (2.0 * m) + v * pot - v * e).norm_sqr() * w;
        }
        Ok(res.sqrt() / scale)
    }
}

pub fn saturating_state(cfg: BoxConfig, a: C64, b: C64, quad: &Quadrature) -> Result<SaturatingState> {
    if b == C64::new(0.0, 0.0) || !(b.re.is_finite() && b.im.is_finite()) {
        return Err(Error::Parameter("saturating state needs a finite nonzero b".into()));
    }
    let mut s = SaturatingState { cfg, a, b, norm: 1.0 };
    let n = norm_sq(&s, quad);
    if !(n > 0.0 && n.is_finite()) {
        return Err(Error::Numeric(format!("saturating state cannot be normalized (norm^2 = {n})")));
    }
    s.norm = 1.0 / n.sqrt();
    Ok(s)
}

impl WaveFunction for SaturatingState {
    fn config(&self) -> BoxConfig {
        self.cfg
    }
    fn value(&self, x: f64) -> C64 {
        self.raw(x) * self.norm
    }
    fn analytic_derivative(&self, order: u8, x: f64) -> Option<C64> {
        let s = self.slope(x);
        match order {
            1 => Some(self.value(x) * s),
            2 => Some(self.value(x) * (C64::new(0.0, -1.0) * self.a / self.b + s * s)),
            _ => None,
        }
    }
}
