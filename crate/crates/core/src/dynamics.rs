//! Wave packets on the line wrapped onto the box, eigenbasis time evolution,
//! revivals, and both Ehrenfest theorems with the boundary force.

use serde::Serialize;

use crate::config::BoxConfig;
use crate::error::{Error, Result};
use crate::modes::ModeSum;
use crate::momentum::{expval_pi, expval_pr};
use crate::quadrature::Quadrature;
use crate::spectrum::{EnergyBasis, Family, Gamma};
use crate::wave::WaveFunction;
use crate::C64;

/// A solution of the free Schroedinger equation on the whole line at a fixed time.
pub trait LineFunction {
    fn value(&self, y: f64) -> C64;
    fn d1(&self, y: f64) -> C64;
    fn d2(&self, y: f64) -> C64;
    /// Radius beyond which `|f| < tol`.
    fn reach(&self, tol: f64) -> f64;
}

/// Free Gaussian packet with momentum-space amplitude
/// `sqrt(2 a sqrt(pi)) exp(-a^2 (k - k_c)^2 / 2)` at `t = 0`, centred at the origin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GaussianPacket {
    pub a: f64,
    pub kc: f64,
    pub m: f64,
    pub t: f64,
}

impl GaussianPacket {
    pub fn new(a: f64, kc: f64, m: f64) -> Result<Self> {
        if !(a.is_finite() && a > 0.0) {
            return Err(Error::Parameter(format!("packet width must be positive, got {a}")));
        }
        if !kc.is_finite() || !(m.is_finite() && m > 0.0) {
            return Err(Error::Parameter("packet momentum and mass must be finite".into()));
        }
        Ok(Self { a, kc, m, t: 0.0 })
    }

    /// `a = L/20`, `k_c = 41 pi / L`.
    pub fn default_for(cfg: BoxConfig) -> Self {
        Self {
            a: cfg.l / 20.0,
            kc: 41.0 * std::f64::consts::PI / cfg.l,
            m: cfg.m,
            t: 0.0,
        }
    }

    pub fn at(&self, t: f64) -> Self {
        Self { t, ..*self }
    }

    fn w(&self) -> C64 {
        C64::new(self.a * self.a, self.t / self.m)
    }

    fn centre(&self) -> f64 {
        self.kc * self.t / self.m
    }

    /// `int exp(-iky) psi(y, t) dy`.
    pub fn momentum_amplitude(&self, k: f64) -> C64 {
        let amp = (2.0 * self.a * std::f64::consts::PI.sqrt()).sqrt();
        let g = (-0.5 * self.a * self.a * (k - self.kc).powi(2)).exp();
        C64::from_polar(amp * g, -k * k * self.t / (2.0 * self.m))
    }

    /// Number of levels of `family` needed so that dropped amplitudes are below `1e-17`.
    pub fn levels_needed(&self, family: &Family, cfg: BoxConfig) -> usize {
        let delta = (2.0 * 1e17f64.ln()).sqrt() / self.a;
        let kmax = self.kc.abs() + delta;
        let offset = match family {
            Family::Dirichlet => 1.0,
            Family::Mixed => 0.5,
            _ => 0.0,
        };
        ((kmax * cfg.l / std::f64::consts::PI - offset).ceil().max(0.0) as usize) + 2
    }
}

impl LineFunction for GaussianPacket {
    fn value(&self, y: f64) -> C64 {
        let w = self.w();
        let pref = (C64::new(self.a / std::f64::consts::PI.sqrt(), 0.0) / w).sqrt();
        let d = y - self.centre();
        let phase = C64::new(0.0, self.kc * y - self.kc * self.kc * self.t / (2.0 * self.m));
        pref * (-(d * d) / (w * 2.0) + phase).exp()
    }

    fn d1(&self, y: f64) -> C64 {
        let w = self.w();
        self.value(y) * (-(y - self.centre()) / w + C64::new(0.0, self.kc))
    }

    fn d2(&self, y: f64) -> C64 {
        let w = self.w();
        let s = -(y - self.centre()) / w + C64::new(0.0, self.kc);
        self.value(y) * (s * s - 1.0 / w)
    }

    fn reach(&self, tol: f64) -> f64 {
        let w = self.w();
        let amp = (self.a / (std::f64::consts::PI.sqrt() * w.norm())).sqrt();
        let spread = w.norm() / self.a;
        let log = (amp / tol).ln().max(0.0);
        self.centre().abs() + spread * (2.0 * log).sqrt()
    }
}

/// Linear combination of line solutions.
#[derive(Debug, Clone, PartialEq)]
pub struct LineSuperposition {
    pub terms: Vec<(C64, GaussianPacket)>,
}

impl LineFunction for LineSuperposition {
    fn value(&self, y: f64) -> C64 {
        self.terms.iter().map(|(c, f)| c * f.value(y)).sum()
    }
    fn d1(&self, y: f64) -> C64 {
        self.terms.iter().map(|(c, f)| c * f.d1(y)).sum()
    }
    fn d2(&self, y: f64) -> C64 {
        self.terms.iter().map(|(c, f)| c * f.d2(y)).sum()
    }
    fn reach(&self, tol: f64) -> f64 {
        let scale = self.terms.iter().map(|(c, _)| c.norm()).fold(0.0, f64::max).max(1.0);
        self.terms
            .iter()
            .map(|(_, f)| f.reach(tol / scale))
            .fold(0.0, f64::max)
    }
}

/// `((1-i)/2) psi_{k_c}(x) - ((1+i)/2) psi_{-k_c}(x)` at `t = 0`: the Dirichlet
/// packet at a quarter revival period, before wrapping.
pub fn quarter_revival_line(packet: &GaussianPacket) -> LineSuperposition {
    let p = packet.at(0.0);
    let mirrored = GaussianPacket { kc: -p.kc, ..p };
    LineSuperposition {
        terms: vec![(C64::new(0.5, -0.5), p), (C64::new(-0.5, -0.5), mirrored)],
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum WrapFamily {
    Dirichlet,
    Neumann,
    /// Neumann at the left wall, Dirichlet at the right.
    Mixed,
}

impl WrapFamily {
    pub fn from_family(f: &Family) -> Result<Self> {
        match f {
            Family::Dirichlet => Ok(WrapFamily::Dirichlet),
            Family::Neumann => Ok(WrapFamily::Neumann),
            Family::Mixed => Ok(WrapFamily::Mixed),
            other => Err(Error::Parameter(format!(
                "image wrapping needs dirichlet, neumann or mixed walls, got {}",
                other.name()
            ))),
        }
    }

    pub fn family(&self) -> Family {
        match self {
            WrapFamily::Dirichlet => Family::Dirichlet,
            WrapFamily::Neumann => Family::Neumann,
            WrapFamily::Mixed => Family::Mixed,
        }
    }

    /// `(sign, reflection, offset in units of L)` for one period, and the period in units of L.
    fn pattern(&self) -> (&'static [(f64, f64, f64)], f64) {
        match self {
            WrapFamily::Dirichlet => (&[(1.0, 1.0, 0.0), (-1.0, -1.0, 1.0)], 2.0),
            WrapFamily::Neumann => (&[(1.0, 1.0, 0.0), (1.0, -1.0, 1.0)], 2.0),
            WrapFamily::Mixed => (
                &[(1.0, 1.0, 0.0), (-1.0, -1.0, 1.0), (-1.0, 1.0, 2.0), (1.0, -1.0, 3.0)],
                4.0,
            ),
        }
    }
}

/// Image sum of a line solution, satisfying the walls of `family`.
#[derive(Debug, Clone)]
pub struct Wrapped<F> {
    cfg: BoxConfig,
    line: F,
    family: WrapFamily,
    images: i64,
}

impl<F: LineFunction> Wrapped<F> {
    pub fn images(&self) -> i64 {
        self.images
    }

    fn sum(&self, x: f64, order: u8) -> C64 {
        let (pattern, period) = self.family.pattern();
        let l = self.cfg.l;
        let mut acc = C64::new(0.0, 0.0);
        for n in -self.images..=self.images {
            let shift = n as f64 * period * l;
            for &(sign, refl, off) in pattern {
                let y = refl * x + off * l + shift;
                acc += match order {
                    0 => self.line.value(y) * sign,
                    1 => self.line.d1(y) * (sign * refl),
                    _ => self.line.d2(y) * sign,
                };
            }
        }
        acc
    }
}

impl<F: LineFunction> WaveFunction for Wrapped<F> {
    fn config(&self) -> BoxConfig {
        self.cfg
    }
    fn value(&self, x: f64) -> C64 {
        self.sum(x, 0)
    }
    fn analytic_derivative(&self, order: u8, x: f64) -> Option<C64> {
        match order {
            1 | 2 => Some(self.sum(x, order)),
            _ => None,
        }
    }
}

pub const DEFAULT_IMAGES: i64 = 8;
const MAX_IMAGES: i64 = 1_000_000;

/// Wrap `line` onto the box, using at least `min_images` periods on each side
/// and more when the line solution has not decayed below `1e-18 / sqrt(L)`.
pub fn wrap<F: LineFunction>(line: F, family: WrapFamily, cfg: BoxConfig, min_images: i64) -> Result<Wrapped<F>> {
    let (_, period) = family.pattern();
    let reach = line.reach(1e-18 / cfg.l.sqrt());
    if !reach.is_finite() {
        return Err(Error::Truncation { images: MAX_IMAGES as usize });
    }
    let needed = ((reach + 3.5 * cfg.l) / (period * cfg.l)).ceil() as i64;
    let images = needed.max(min_images);
    if images > MAX_IMAGES {
        return Err(Error::Truncation { images: images as usize });
    }
    Ok(Wrapped { cfg, line, family, images })
}

/// Coefficients `c_l` and the time they refer to, in an energy basis.
#[derive(Debug, Clone, PartialEq)]
pub struct EvolvingState {
    pub basis: EnergyBasis,
    pub coefs: Vec<C64>,
    pub t: f64,
}

impl EvolvingState {
    pub fn new(basis: EnergyBasis, coefs: Vec<C64>, t: f64) -> Result<Self> {
        if coefs.len() > basis.len() || coefs.is_empty() {
            return Err(Error::Parameter(format!(
                "{} coefficients for a basis of {} levels",
                coefs.len(),
                basis.len()
            )));
        }
        Ok(Self { basis, coefs, t })
    }

    pub fn norm_sq(&self) -> f64 {
        self.coefs.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn normalized(mut self) -> Result<Self> {
        let n = self.norm_sq();
        if !(n > 0.0 && n.is_finite()) {
            return Err(Error::Numeric(format!("state cannot be normalized (norm^2 = {n})")));
        }
        let s = 1.0 / n.sqrt();
        self.coefs.iter_mut().for_each(|c| *c *= s);
        Ok(self)
    }

    pub fn config(&self) -> BoxConfig {
        self.basis.config
    }

    pub fn wave(&self) -> ModeSum {
        self.basis.superposition(&self.coefs).expect("length checked on construction")
    }

    /// `d Psi / dt = sum_l (-i E_l) c_l psi_l`.
    pub fn time_derivative(&self) -> ModeSum {
        let coefs: Vec<C64> = self
            .coefs
            .iter()
            .zip(&self.basis.levels)
            .map(|(c, lv)| c * C64::new(0.0, -lv.energy))
            .collect();
        self.basis.superposition(&coefs).expect("length checked on construction")
    }
}

/// `c_l(t) = c_l(t0) exp(-i E_l (t - t0))`.
pub fn evolve(state: &EvolvingState, t: f64) -> EvolvingState {
    let dt = t - state.t;
    let coefs = state
        .coefs
        .iter()
        .zip(&state.basis.levels)
        .map(|(c, lv)| c * C64::from_polar(1.0, -lv.energy * dt))
        .collect();
    EvolvingState {
        basis: state.basis.clone(),
        coefs,
        t,
    }
}

/// Projection of the wrapped packet onto a Dirichlet, Neumann or mixed basis.
///
/// Each eigenfunction `A cos(kx) + B sin(kx)` continues to the whole line with
/// the same reflection symmetry as the image sum, so its overlap with the
/// wrapped packet is an overlap on the line.
pub fn gaussian_coefficients(packet: &GaussianPacket, basis: &EnergyBasis) -> Result<EvolvingState> {
    WrapFamily::from_family(&basis.family)?;
    let needed = packet.levels_needed(&basis.family, basis.config);
    if basis.len() < needed {
        return Err(Error::Precondition(format!(
            "basis has {} levels, the packet needs {needed}",
            basis.len()
        )));
    }
    let i = C64::new(0.0, 1.0);
    let coefs = basis
        .levels
        .iter()
        .map(|lv| match lv.mode {
            crate::modes::Mode::Trig { k, a, b } => {
                let (fp, fm) = (packet.momentum_amplitude(k), packet.momentum_amplitude(-k));
                (fp + fm) * (0.5 * a) + i * (fp - fm) * (0.5 * b)
            }
            _ => unreachable!("standard families use trigonometric modes"),
        })
        .collect();
    EvolvingState::new(basis.clone(), coefs, packet.t)?.normalized()
}

/// `(|<Psi(t0)|Psi(t)>|, int ||Psi(t)|^2 - |Psi(t0)|^2| dx)`.
pub fn revival_fidelity(state: &EvolvingState, t: f64, quad: &Quadrature) -> Result<(f64, f64)> {
    state.config().check_same(&quad.config())?;
    let later = evolve(state, t);
    let overlap: C64 = state
        .coefs
        .iter()
        .zip(&later.coefs)
        .map(|(a, b)| a.conj() * b)
        .sum();
    let (w0, w1) = (state.wave(), later.wave());
    let distance = quad.integrate_real(|x| (w1.value(x).norm_sqr() - w0.value(x).norm_sqr()).abs());
    Ok((overlap.norm(), distance))
}

/// Matrix elements `X_ll' = <psi_l|x|psi_l'>` and `P_ll' = <psi_l|psi_l'' >`
/// (derivative on the right) for the first `n` levels.
#[derive(Debug, Clone, PartialEq)]
pub struct BasisMatrices {
    pub n: usize,
    pub position: Vec<f64>,
    pub derivative: Vec<f64>,
}

impl BasisMatrices {
    pub fn new(basis: &EnergyBasis, n: usize, quad: &Quadrature) -> Result<Self> {
        basis.config.check_same(&quad.config())?;
        if n > basis.len() {
            return Err(Error::Parameter(format!("{n} levels requested from a basis of {}", basis.len())));
        }
        let modes = basis.modes();
        let mut position = vec![0.0; n * n];
        let mut derivative = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                if j >= i {
                    let x = modes[i].position_with(&modes[j], quad);
                    position[i * n + j] = x;
                    position[j * n + i] = x;
                }
                derivative[i * n + j] = modes[i].overlap_with(&modes[j].derivative(), quad);
            }
        }
        Ok(Self { n, position, derivative })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EhrenfestReport {
    pub t: f64,
    /// `d<x>/dt` from the position matrix.
    pub dx_dt: f64,
    pub p_r: f64,
    /// `|m d<x>/dt - <p_R>|`
    pub residual1: f64,
    /// `d<p_R>/dt` from the derivative matrix.
    pub dpr_dt: f64,
    /// `d<p_R>/dt` by a second-order central difference with step `1e-6 T`.
    pub dpr_dt_fd: f64,
    /// `(1/2m)[Re(Psi'' Psi*) - |Psi'|^2]` between the walls.
    pub force_boundary: f64,
    /// The same bracket rewritten with the Robin conditions; absent at Dirichlet walls.
    pub force_boundary_robin: Option<f64>,
    pub minus_dv: f64,
    /// `|d<p_R>/dt - (-<V'> + force_boundary)|`
    pub residual2: f64,
    /// `d<p_I>/dt` by a five-point difference of `<p_I>(t)`.
    pub dpi_dt: f64,
    /// `(1/2m)[Im(Psi* Psi'')]` between the walls.
    pub dpi_dt_bracket: f64,
    /// `-(1/2)[d rho / dt]` between the walls, from `dPsi/dt`.
    pub dpi_dt_continuity: f64,
    /// Largest pairwise difference of the three `d<p_I>/dt` values.
    pub continuity_residual: f64,
}

/// Ehrenfest checks at time `t` for a state given at time `state.t`.
pub fn ehrenfest_report(
    state: &EvolvingState,
    t: f64,
    v_prime: Option<&dyn Fn(f64) -> f64>,
    quad: &Quadrature,
    matrices: &BasisMatrices,
) -> Result<EhrenfestReport> {
    let cfg = state.config();
    cfg.check_same(&quad.config())?;
    let n = state.coefs.len();
    if matrices.n < n {
        return Err(Error::Parameter(format!(
            "matrices cover {} levels, state has {n}",
            matrices.n
        )));
    }
    if let Some(last) = state.coefs.last() {
        if last.norm() > 1e-8 {
            log::warn!(
                "highest retained level carries |c| = {:.3e}; matrix-element sums may be truncated",
                last.norm()
            );
        }
    }
    let m = cfg.m;
    let h = cfg.half();
    let now = evolve(state, t);
    let psi = now.wave();
    let energies = state.basis.energies();

    let mut dx = C64::new(0.0, 0.0);
    let mut dp = C64::new(0.0, 0.0);
    for i in 0..n {
        let ci = now.coefs[i].conj();
        for j in 0..n {
            let de = energies[i] - energies[j];
            if de == 0.0 {
                continue;
            }
            let w = ci * now.coefs[j] * de;
            dx += w * C64::new(0.0, matrices.position[i * matrices.n + j]);
            dp += w * matrices.derivative[i * matrices.n + j];
        }
    }
    let dx_dt = dx.re;
    let dpr_dt = dp.re;
    let p_r = expval_pr(&psi, quad)?;

    let at = |x: f64| {
        let v = psi.value(x);
        let d1 = psi.analytic_derivative(1, x).expect("analytic");
        let d2 = psi.analytic_derivative(2, x).expect("analytic");
        (v, d1, d2)
    };
    let (vr, d1r, d2r) = at(h);
    let (vl, d1l, d2l) = at(-h);
    let bracket = |v: C64, d1: C64, d2: C64| ((d2 * v.conj()).re - d1.norm_sqr()) / (2.0 * m);
    let force_boundary = bracket(vr, d1r, d2r) - bracket(vl, d1l, d2l);

    let bc = state.basis.family.bc();
    let force_boundary_robin = match (bc.plus, bc.minus) {
        (Gamma::Finite(gp), Gamma::Finite(gm)) => {
            let rho1 = |v: C64, d1: C64| 2.0 * (v.conj() * d1).re;
            let rho2 = |v: C64, d1: C64, d2: C64| 2.0 * (v.conj() * d2).re + 2.0 * d1.norm_sqr();
            Some(
                (0.5 * rho2(vr, d1r, d2r) + gp * rho1(vr, d1r) - 0.5 * rho2(vl, d1l, d2l)
                    + gm * rho1(vl, d1l))
                    / (2.0 * m),
            )
        }
        _ => None,
    };

    let minus_dv = match v_prime {
        Some(vp) => -quad.integrate_real(|x| vp(x) * psi.value(x).norm_sqr()),
        None => 0.0,
    };

    let step = 1e-6 * cfg.revival_time();
    let pr_at = |s: f64| expval_pr(&evolve(state, s).wave(), quad);
    let dpr_dt_fd = (pr_at(t + step)? - pr_at(t - step)?) / (2.0 * step);

    let emax = energies[..n].iter().fold(f64::NEG_INFINITY, |a, &e| a.max(e));
    let emin = energies[..n].iter().fold(f64::INFINITY, |a, &e| a.min(e));
    let span = emax - emin;
    let hp = if span > 0.0 { 0.005 / span } else { 1e-3 * cfg.revival_time() };
    let pi_at = |s: f64| expval_pi(&evolve(state, s).wave());
    let dpi_dt = (pi_at(t - 2.0 * hp) - 8.0 * pi_at(t - hp) + 8.0 * pi_at(t + hp) - pi_at(t + 2.0 * hp))
        / (12.0 * hp);
    let dpi_dt_bracket = ((vr.conj() * d2r).im - (vl.conj() * d2l).im) / (2.0 * m);
    let dt_psi = now.time_derivative();
    let rho_t = |x: f64, v: C64| 2.0 * (v.conj() * dt_psi.value(x)).re;
    let dpi_dt_continuity = -0.5 * (rho_t(h, vr) - rho_t(-h, vl));
    let continuity_residual = (dpi_dt - dpi_dt_bracket)
        .abs()
        .max((dpi_dt - dpi_dt_continuity).abs())
        .max((dpi_dt_bracket - dpi_dt_continuity).abs());

    Ok(EhrenfestReport {
        t,
        dx_dt,
        p_r,
        residual1: (m * dx_dt - p_r).abs(),
        dpr_dt,
        dpr_dt_fd,
        force_boundary,
        force_boundary_robin,
        minus_dv,
        residual2: (dpr_dt - (minus_dv + force_boundary)).abs(),
        dpi_dt,
        dpi_dt_bracket,
        dpi_dt_continuity,
        continuity_residual,
    })
}
