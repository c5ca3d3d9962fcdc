//! Eigenvalues and eigenfunctions of `-(1/2m) d^2/dx^2` on the box for the
//! standard boundary-condition families and for general Robin parameters.

use std::f64::consts::PI;
use std::fmt;

use serde::Serialize;

use crate::config::BoxConfig;
use crate::error::{Error, Result};
use crate::modes::{Mode, ModeSum};
use crate::quadrature::Quadrature;
use crate::roots::{bisect, newton_polish};
use crate::wave::{derivative, WaveFunction};
use crate::C64;

/// One Robin parameter, or the Dirichlet limit `gamma -> infinity`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Gamma {
    Finite(f64),
    Dirichlet,
}

impl Gamma {
    pub fn finite(self) -> Option<f64> {
        match self {
            Gamma::Finite(g) => Some(g),
            Gamma::Dirichlet => None,
        }
    }
}

/// `gamma_plus psi(L/2) + psi'(L/2) = 0`, `gamma_minus psi(-L/2) - psi'(-L/2) = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RobinBC {
    pub plus: Gamma,
    pub minus: Gamma,
}

impl RobinBC {
    pub fn new(plus: Gamma, minus: Gamma) -> Result<Self> {
        for g in [plus, minus] {
            if let Gamma::Finite(v) = g {
                if !v.is_finite() {
                    return Err(Error::Parameter(format!("Robin parameter must be finite, got {v}")));
                }
            }
        }
        Ok(Self { plus, minus })
    }

    pub fn robin(plus: f64, minus: f64) -> Result<Self> {
        Self::new(Gamma::Finite(plus), Gamma::Finite(minus))
    }

    /// Relative boundary residuals `(right, left)`.
    ///
    /// A finite end reports `|gamma psi +- psi'| / ((|gamma| + 1/L) max|psi|)`;
    /// a Dirichlet end reports `|psi| / max|psi|`.
    pub fn residuals<W: WaveFunction>(&self, f: &W, quad: &Quadrature) -> Result<(f64, f64)> {
        let cfg = f.config();
        let h = cfg.half();
        let peak = quad
            .nodes()
            .iter()
            .map(|&x| f.value(x).norm())
            .chain([f.value(-h).norm(), f.value(h).norm()])
            .fold(0.0, f64::max);
        if peak == 0.0 {
            return Err(Error::Numeric("zero wavefunction".into()));
        }
        let end = |g: Gamma, x: f64, sign: f64| -> Result<f64> {
            let v = f.value(x);
            Ok(match g {
                Gamma::Dirichlet => v.norm() / peak,
                Gamma::Finite(g) => {
                    let d = derivative(f, 1, x)?;
                    (v * g + d * sign).norm() / ((g.abs() + 1.0 / cfg.l) * peak)
                }
            })
        };
        Ok((end(self.plus, h, 1.0)?, end(self.minus, -h, -1.0)?))
    }
}

/// Boundary-condition family of an energy basis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Family {
    Dirichlet,
    Neumann,
    /// Neumann at `-L/2`, Dirichlet at `+L/2`.
    Mixed,
    Symmetric(f64),
    Antisymmetric(f64),
    General(RobinBC),
}

impl Family {
    pub fn bc(&self) -> RobinBC {
        let (plus, minus) = match *self {
            Family::Dirichlet => (Gamma::Dirichlet, Gamma::Dirichlet),
            Family::Neumann => (Gamma::Finite(0.0), Gamma::Finite(0.0)),
            Family::Mixed => (Gamma::Dirichlet, Gamma::Finite(0.0)),
            Family::Symmetric(g) => (Gamma::Finite(g), Gamma::Finite(g)),
            Family::Antisymmetric(g) => (Gamma::Finite(g), Gamma::Finite(-g)),
            Family::General(bc) => return bc,
        };
        RobinBC { plus, minus }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Family::Dirichlet => "dirichlet",
            Family::Neumann => "neumann",
            Family::Mixed => "mixed",
            Family::Symmetric(_) => "symmetric",
            Family::Antisymmetric(_) => "antisymmetric",
            Family::General(_) => "general",
        }
    }

    /// The lowest `l_max + 1` levels.
    pub fn spectrum(&self, cfg: BoxConfig, l_max: usize) -> Result<EnergyBasis> {
        match *self {
            Family::Dirichlet => Ok(dirichlet_spectrum(cfg, l_max)),
            Family::Neumann => Ok(neumann_spectrum(cfg, l_max)),
            Family::Mixed => Ok(mixed_spectrum(cfg, l_max)),
            Family::Symmetric(g) => symmetric_robin_spectrum(cfg, g, l_max),
            Family::Antisymmetric(g) => antisymmetric_robin_spectrum(cfg, g, l_max),
            Family::General(bc) => general_robin_spectrum(cfg, bc.plus, bc.minus, l_max),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum LevelKind {
    Negative,
    Zero,
    Positive,
}

impl fmt::Display for LevelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LevelKind::Negative => "negative",
            LevelKind::Zero => "zero",
            LevelKind::Positive => "positive",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnergyLevel {
    /// Position in the energy-ordered list.
    pub index: usize,
    pub energy: f64,
    pub kind: LevelKind,
    /// `k` for positive levels, the decay rate `kappa` for negative ones, 0 for zero modes.
    pub wavenumber: f64,
    /// Normalized real eigenfunction.
    pub mode: Mode,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnergyBasis {
    pub config: BoxConfig,
    pub family: Family,
    pub levels: Vec<EnergyLevel>,
}

impl EnergyBasis {
    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    pub fn energies(&self) -> Vec<f64> {
        self.levels.iter().map(|l| l.energy).collect()
    }

    pub fn modes(&self) -> Vec<Mode> {
        self.levels.iter().map(|l| l.mode).collect()
    }

    pub fn eigenfunction(&self, l: usize) -> ModeSum {
        ModeSum::single(self.config, self.levels[l].mode)
    }

    /// `sum_l c_l psi_l` over the first `coefs.len()` levels.
    pub fn superposition(&self, coefs: &[C64]) -> Result<ModeSum> {
        if coefs.len() > self.levels.len() {
            return Err(Error::Parameter(format!(
                "{} coefficients for a basis of {} levels",
                coefs.len(),
                self.levels.len()
            )));
        }
        Ok(ModeSum::new(
            self.config,
            self.levels[..coefs.len()].iter().map(|l| l.mode).collect(),
            coefs.to_vec(),
        ))
    }
}

fn positive_level(cfg: &BoxConfig, k: f64, mode: Mode) -> EnergyLevel {
    EnergyLevel {
        index: 0,
        energy: k * k / (2.0 * cfg.m),
        kind: if k == 0.0 { LevelKind::Zero } else { LevelKind::Positive },
        wavenumber: k,
        mode,
    }
}

/// Flip the sign so the first nonvanishing value from the left wall is positive.
fn canonical(mode: Mode, cfg: &BoxConfig) -> Mode {
    let h = cfg.half();
    let v = mode.value(-h);
    let s = if v.abs() > 1e-9 / cfg.l.sqrt() {
        v.signum()
    } else {
        mode.d1(-h).signum()
    };
    if s < 0.0 {
        mode.scaled(-1.0)
    } else {
        mode
    }
}

fn finish(cfg: BoxConfig, family: Family, mut levels: Vec<EnergyLevel>, l_max: usize) -> Result<EnergyBasis> {
    levels.sort_by(|a, b| a.energy.total_cmp(&b.energy));
    if levels.len() < l_max + 1 {
        return Err(Error::Numeric(format!(
            "found {} levels, {} requested",
            levels.len(),
            l_max + 1
        )));
    }
    levels.truncate(l_max + 1);
    for (i, lv) in levels.iter_mut().enumerate() {
        lv.index = i;
        lv.mode = canonical(lv.mode, &cfg);
    }
    Ok(EnergyBasis {
        config: cfg,
        family,
        levels,
    })
}

pub fn dirichlet_spectrum(cfg: BoxConfig, l_max: usize) -> EnergyBasis {
    let amp = (2.0 / cfg.l).sqrt();
    let levels = (0..=l_max)
        .map(|l| {
            let k = PI * (l + 1) as f64 / cfg.l;
            let mode = if l % 2 == 0 {
                Mode::Trig { k, a: amp, b: 0.0 }
            } else {
                Mode::Trig { k, a: 0.0, b: amp }
            };
            positive_level(&cfg, k, mode)
        })
        .collect();
    finish(cfg, Family::Dirichlet, levels, l_max).expect("closed form")
}

pub fn neumann_spectrum(cfg: BoxConfig, l_max: usize) -> EnergyBasis {
    neumann_levels(cfg, Family::Neumann, l_max)
}

fn neumann_levels(cfg: BoxConfig, family: Family, l_max: usize) -> EnergyBasis {
    let amp = (2.0 / cfg.l).sqrt();
    let levels = (0..=l_max)
        .map(|l| {
            let k = PI * l as f64 / cfg.l;
            let mode = if l == 0 {
                Mode::Trig { k: 0.0, a: 1.0 / cfg.l.sqrt(), b: 0.0 }
            } else if l % 2 == 0 {
                Mode::Trig { k, a: amp, b: 0.0 }
            } else {
                Mode::Trig { k, a: 0.0, b: amp }
            };
            positive_level(&cfg, k, mode)
        })
        .collect();
    finish(cfg, family, levels, l_max).expect("closed form")
}

/// Neumann at `-L/2`, Dirichlet at `+L/2`: `psi_l = sqrt(2/L) sin(k (x - L/2))`.
pub fn mixed_spectrum(cfg: BoxConfig, l_max: usize) -> EnergyBasis {
    let amp = (2.0 / cfg.l).sqrt();
    let h = cfg.half();
    let levels = (0..=l_max)
        .map(|l| {
            let k = PI * (l as f64 + 0.5) / cfg.l;
            let (s, c) = (k * h).sin_cos();
            positive_level(&cfg, k, Mode::Trig { k, a: -amp * s, b: amp * c })
        })
        .collect();
    finish(cfg, Family::Mixed, levels, l_max).expect("closed form")
}

/// `1 - sin(u)/u`, accurate for small `u`.
fn one_minus_sinc(u: f64) -> f64 {
    if u.abs() < 0.5 {
        let u2 = u * u;
        let mut term = u2 / 6.0;
        let mut sum: f64 = 0.0;
        let mut n = 1;
        while term.abs() > 1e-18 * sum.abs().max(f64::MIN_POSITIVE) {
            sum += term;
            term *= -u2 / (((2 * n + 2) * (2 * n + 3)) as f64);
            n += 1;
        }
        sum
    } else {
        1.0 - u.sin() / u
    }
}

/// `e^{-u} (sinh(u)/u - 1)` for `u >= 0`.
fn scaled_sinhc_minus_one(u: f64) -> f64 {
    if u < 1.0 {
        let u2 = u * u;
        let mut term = u2 / 6.0;
        let mut sum: f64 = 0.0;
        let mut n = 1;
        while term > 1e-18 * sum.max(f64::MIN_POSITIVE) {
            sum += term;
            term *= u2 / (((2 * n + 2) * (2 * n + 3)) as f64);
            n += 1;
        }
        (-u).exp() * sum
    } else {
        scaled_sinhc(u) - (-u).exp()
    }
}

/// `e^{-u} sinh(u)/u` for `u > 0`.
fn scaled_sinhc(u: f64) -> f64 {
    -(-2.0 * u).exp_m1() / (2.0 * u)
}

fn cosh_mode(cfg: &BoxConfig, kappa: f64) -> Mode {
    let u = kappa * cfg.l;
    let c = 0.5 * (2.0 / cfg.l).sqrt() / ((-u).exp() + scaled_sinhc(u)).sqrt();
    Mode::Exp { kappa, half: cfg.half(), right: c, left: c }
}

fn sinh_mode(cfg: &BoxConfig, kappa: f64) -> Mode {
    let u = kappa * cfg.l;
    let c = 0.5 * (2.0 / cfg.l).sqrt() / scaled_sinhc_minus_one(u).sqrt();
    Mode::Exp { kappa, half: cfg.half(), right: c, left: -c }
}

fn cos_mode(cfg: &BoxConfig, k: f64) -> Mode {
    let u = k * cfg.l;
    let amp = (2.0 / cfg.l).sqrt() / (2.0 - one_minus_sinc(u)).sqrt();
    Mode::Trig { k, a: amp, b: 0.0 }
}

fn sin_mode(cfg: &BoxConfig, k: f64) -> Mode {
    let u = k * cfg.l;
    let amp = (2.0 / cfg.l).sqrt() / one_minus_sinc(u).sqrt();
    Mode::Trig { k, a: 0.0, b: amp }
}

const ROOT_TOL: f64 = 1e-13;

/// `gamma_plus = gamma_minus = gamma`.
///
/// Positive levels solve `k tan(kL/2) = gamma` (even) and
/// `k cot(kL/2) = -gamma` (odd); negative levels solve the hyperbolic
/// analogues. `gamma = 0` and `gamma = -2/L` carry exact zero modes.
pub fn symmetric_robin_spectrum(cfg: BoxConfig, gamma: f64, l_max: usize) -> Result<EnergyBasis> {
    if !gamma.is_finite() {
        return Err(Error::Parameter(format!("gamma must be finite, got {gamma}")));
    }
    let h = cfg.half();
    let g = gamma * h;
    let thr = 1e-12 / cfg.l;
    let zero_even = gamma.abs() < thr;
    let zero_odd = (gamma + 2.0 / cfg.l).abs() < thr;
    let mut levels = Vec::new();

    if zero_even {
        levels.push(positive_level(&cfg, 0.0, Mode::Trig { k: 0.0, a: 1.0 / cfg.l.sqrt(), b: 0.0 }));
    } else if g < 0.0 {
        let big = -g;
        let f = |z: f64| z * z.tanh() - big;
        let df = |z: f64| z.tanh() + z / z.cosh().powi(2);
        let (lo, hi) = (big, big / big.tanh());
        let z = bisect(f, lo, hi, -1.0, ROOT_TOL)?;
        let z = newton_polish(f, df, z, lo, hi, 3);
        levels.push(negative_level(&cfg, z / h, cosh_mode(&cfg, z / h)));
    }

    if zero_odd {
        let c1 = (12.0 / cfg.l.powi(3)).sqrt();
        levels.push(EnergyLevel {
            index: 0,
            energy: 0.0,
            kind: LevelKind::Zero,
            wavenumber: 0.0,
            mode: Mode::Linear { c0: 0.0, c1 },
        });
    } else if g < -1.0 {
        let big = -g;
        let zc = |z: f64| if z == 0.0 { 1.0 } else { z / z.tanh() };
        let f = |z: f64| zc(z) - big;
        let df = |z: f64| 1.0 / z.tanh() - z / z.sinh().powi(2);
        let (lo, hi) = ((big - 1.0).max(0.0), big);
        let z = bisect(f, lo, hi, -1.0, ROOT_TOL)?;
        let z = newton_polish(f, df, z, lo, hi, 3);
        levels.push(negative_level(&cfg, z / h, sinh_mode(&cfg, z / h)));
    }

    let even = |y: f64| y * y.sin() - g * y.cos();
    let deven = |y: f64| y.sin() + y * y.cos() + g * y.sin();
    let odd = |y: f64| y * y.cos() + g * y.sin();
    let dodd = |y: f64| y.cos() - y * y.sin() + g * y.cos();
    for j in 0..=(l_max + 1) {
        let jf = j as f64;
        // even branch
        let window = if j == 0 {
            if g > 0.0 && !zero_even {
                Some((0.0, 0.5 * PI, -1.0))
            } else {
                None
            }
        } else {
            let parity = if j % 2 == 0 { 1.0 } else { -1.0 };
            Some((jf * PI - 0.5 * PI, jf * PI + 0.5 * PI, -parity))
        };
        if let Some((lo, hi, s)) = window {
            let y = bisect(even, lo, hi, s, ROOT_TOL)?;
            let y = newton_polish(even, deven, y, lo, hi, 3);
            levels.push(positive_level(&cfg, y / h, cos_mode(&cfg, y / h)));
        }
        // odd branch
        let window = if j == 0 {
            if g > -1.0 && !zero_odd {
                Some((0.0, PI, (1.0 + g).signum()))
            } else {
                None
            }
        } else {
            let parity = if j % 2 == 0 { 1.0 } else { -1.0 };
            Some((jf * PI, (jf + 1.0) * PI, parity))
        };
        if let Some((lo, hi, s)) = window {
            let y = bisect(odd, lo, hi, s, ROOT_TOL)?;
            let y = newton_polish(odd, dodd, y, lo, hi, 3);
            levels.push(positive_level(&cfg, y / h, sin_mode(&cfg, y / h)));
        }
    }
    finish(cfg, Family::Symmetric(gamma), levels, l_max)
}

fn negative_level(cfg: &BoxConfig, kappa: f64, mode: Mode) -> EnergyLevel {
    EnergyLevel {
        index: 0,
        energy: -kappa * kappa / (2.0 * cfg.m),
        kind: LevelKind::Negative,
        wavenumber: kappa,
        mode,
    }
}

/// `gamma_plus = -gamma_minus = gamma`: positive levels `k_l = pi l / L`
/// for every `gamma`, plus one level at `-gamma^2/2m` with `psi ~ e^{-gamma x}`.
pub fn antisymmetric_robin_spectrum(cfg: BoxConfig, gamma: f64, l_max: usize) -> Result<EnergyBasis> {
    if !gamma.is_finite() {
        return Err(Error::Parameter(format!("gamma must be finite, got {gamma}")));
    }
    if gamma.abs() < 1e-12 / cfg.l {
        return Ok(neumann_levels(cfg, Family::Antisymmetric(gamma), l_max));
    }
    let kappa = gamma.abs();
    let c = (2.0 * kappa / -(-2.0 * kappa * cfg.l).exp_m1()).sqrt();
    let (right, left) = if gamma > 0.0 { (0.0, c) } else { (c, 0.0) };
    let mut levels = vec![negative_level(
        &cfg,
        kappa,
        Mode::Exp { kappa, half: cfg.half(), right, left },
    )];
    for l in 1..=l_max {
        let k = PI * l as f64 / cfg.l;
        let amp = (2.0 / (cfg.l * (gamma * gamma + k * k))).sqrt();
        let mode = if l % 2 == 1 {
            Mode::Trig { k, a: gamma * amp, b: k * amp }
        } else {
            Mode::Trig { k, a: -k * amp, b: gamma * amp }
        };
        levels.push(positive_level(&cfg, k, mode));
    }
    finish(cfg, Family::Antisymmetric(gamma), levels, l_max)
}

/// Shooting formulation for arbitrary `(gamma_plus, gamma_minus)`.
///
/// The spectral parameter `s` is `k` for `E > 0` and `-kappa` for `E < 0`, so
/// `E = sign(s) s^2 / 2m` is monotone in `s`.
struct Shooting {
    cfg: BoxConfig,
    plus: Gamma,
    minus: Gamma,
}

impl Shooting {
    /// `(psi, psi')` at the left wall.
    fn initial(&self) -> (f64, f64) {
        match self.minus {
            Gamma::Dirichlet => (0.0, 1.0),
            Gamma::Finite(g) => (1.0, g),
        }
    }

    /// Right-wall offset of the Pruefer angle, in `(0, pi]`.
    fn beta(&self) -> f64 {
        match self.plus {
            Gamma::Dirichlet => PI,
            Gamma::Finite(g) => 1f64.atan2(-g),
        }
    }

    /// Unwrapped Pruefer angle `atan2(psi, psi')` at the right wall.
    fn theta(&self, s: f64) -> f64 {
        let l = self.cfg.l;
        let (p0, d0) = self.initial();
        if s > 0.0 {
            let k = s;
            let total = k * l + (k * p0).atan2(d0);
            let z = (total / PI).floor();
            let r = total - z * PI;
            return z * PI + r.sin().atan2(k * r.cos());
        }
        let (psi, dpsi, zeros) = if s < 0.0 {
            let kappa = -s;
            let e = (-2.0 * kappa * l).exp();
            let psi = p0 * 0.5 * (1.0 + e) + d0 / kappa * 0.5 * (1.0 - e);
            let dpsi = p0 * kappa * 0.5 * (1.0 - e) + d0 * 0.5 * (1.0 + e);
            let zeros = if p0 != 0.0 && d0 < 0.0 && kappa < -d0 {
                let u = (kappa / -d0).atanh() / kappa;
                if u <= l {
                    1.0
                } else {
                    0.0
                }
            } else {
                0.0
            };
            (psi, dpsi, zeros)
        } else {
            let zeros = if p0 != 0.0 && d0 < 0.0 && -p0 / d0 <= l { 1.0 } else { 0.0 };
            (p0 + d0 * l, d0, zeros)
        };
        zeros * PI + psi.atan2(dpsi).rem_euclid(PI)
    }

    /// Number of eigenvalues strictly below the energy of `s`.
    fn count_below(&self, s: f64) -> i64 {
        let x = (self.theta(s) - self.beta()) / PI;
        if x > 0.0 {
            x.ceil() as i64
        } else {
            0
        }
    }

    /// Characteristic function, scaled by `e^{-kappa L}` for negative energies.
    fn characteristic(&self, s: f64) -> f64 {
        let l = self.cfg.l;
        let (c, sn, k2) = if s > 0.0 {
            ((s * l).cos(), (s * l).sin() / s, s * s)
        } else if s < 0.0 {
            let kappa = -s;
            let e = (-2.0 * kappa * l).exp();
            (0.5 * (1.0 + e), 0.5 * (1.0 - e) / kappa, -kappa * kappa)
        } else {
            (1.0, l, 0.0)
        };
        match (self.plus, self.minus) {
            (Gamma::Finite(gp), Gamma::Finite(gm)) => (gp + gm) * c + (gp * gm - k2) * sn,
            (Gamma::Dirichlet, Gamma::Finite(gm)) => c + gm * sn,
            (Gamma::Finite(gp), Gamma::Dirichlet) => gp * sn + c,
            (Gamma::Dirichlet, Gamma::Dirichlet) => sn,
        }
    }

    fn has_zero_mode(&self) -> bool {
        let l = self.cfg.l;
        let (d0, scale) = match (self.plus, self.minus) {
            (Gamma::Finite(a), Gamma::Finite(b)) => {
                (a + b + a * b * l, 1.0 / l + a.abs() + b.abs() + (a * b).abs() * l)
            }
            (Gamma::Dirichlet, Gamma::Finite(g)) | (Gamma::Finite(g), Gamma::Dirichlet) => {
                (1.0 + g * l, 1.0 + g.abs() * l)
            }
            (Gamma::Dirichlet, Gamma::Dirichlet) => return false,
        };
        d0.abs() <= 1e-12 * scale
    }

    fn level(&self, l_idx: usize) -> Result<f64> {
        let len = self.cfg.l;
        let target = l_idx as i64;
        let mut hi = (l_idx as f64 + 2.0) * PI / len;
        let mut guard = 0;
        while self.count_below(hi) <= target {
            hi *= 2.0;
            guard += 1;
            if guard > 60 {
                return Err(Error::Numeric(format!("cannot bracket level {l_idx} from above")));
            }
        }
        let kmax = [self.plus, self.minus]
            .iter()
            .filter_map(|g| g.finite())
            .fold(0.0, |a: f64, g| a.max(g.abs()));
        let mut lo = -(2.0 * kmax + 10.0 / len);
        guard = 0;
        while self.count_below(lo) > target {
            lo *= 2.0;
            guard += 1;
            if guard > 60 {
                return Err(Error::Numeric(format!("cannot bracket level {l_idx} from below")));
            }
        }
        for _ in 0..400 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi || hi - lo <= 1e-15 * lo.abs().max(hi.abs()).max(1.0 / len) {
                break;
            }
            if self.count_below(mid) <= target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        // finish on the sign of the characteristic function
        let (dl, dh) = (self.characteristic(lo), self.characteristic(hi));
        if dl * dh < 0.0 {
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                let dm = self.characteristic(mid);
                if dm == 0.0 {
                    return Ok(mid);
                }
                if dm * dl > 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
        }
        Ok(0.5 * (lo + hi))
    }

    fn eigenmode(&self, s: f64) -> Mode {
        let cfg = self.cfg;
        let (h, l) = (cfg.half(), cfg.l);
        let (p0, d0) = self.initial();
        let raw = if s > 0.0 {
            let k = s;
            let (sh, ch) = (k * h).sin_cos();
            Mode::Trig {
                k,
                a: p0 * ch + d0 / k * sh,
                b: -p0 * sh + d0 / k * ch,
            }
        } else if s < 0.0 {
            let kappa = -s;
            let e = (-kappa * l).exp();
            // rows of the boundary system acting on (right, left) coefficients
            let (pl, ql) = match self.minus {
                Gamma::Dirichlet => (e, 1.0),
                Gamma::Finite(g) => (e * (g - kappa), g + kappa),
            };
            let (pr, qr) = match self.plus {
                Gamma::Dirichlet => (1.0, e),
                Gamma::Finite(g) => (g + kappa, e * (g - kappa)),
            };
            let (right, left) = if ql.hypot(pl) >= qr.hypot(pr) { (ql, -pl) } else { (qr, -pr) };
            Mode::Exp { kappa, half: h, right, left }
        } else {
            let (cl0, cl1) = match self.minus {
                Gamma::Dirichlet => (h, 1.0),
                Gamma::Finite(g) => (1.0 + g * h, g),
            };
            let (cr0, cr1) = match self.plus {
                Gamma::Dirichlet => (h, -1.0),
                Gamma::Finite(g) => (1.0 + g * h, -g),
            };
            let (c0, c1) = if cl0.hypot(cl1) >= cr0.hypot(cr1) { (cl0, cl1) } else { (cr0, cr1) };
            Mode::Linear { c0, c1 }
        };
        raw.scaled(1.0 / raw.norm_sq(h).sqrt())
    }
}

/// Arbitrary Robin parameters, each finite or Dirichlet.
pub fn general_robin_spectrum(
    cfg: BoxConfig,
    gamma_plus: Gamma,
    gamma_minus: Gamma,
    l_max: usize,
) -> Result<EnergyBasis> {
    let bc = RobinBC::new(gamma_plus, gamma_minus)?;
    let problem = Shooting { cfg, plus: gamma_plus, minus: gamma_minus };
    let zero_mode = problem.has_zero_mode();
    let mut levels = Vec::with_capacity(l_max + 1);
    for l in 0..=l_max {
        let mut s = problem.level(l)?;
        // The characteristic function is quadratic in s near a zero mode, so s
        // is only resolved to about the square root of the root tolerance there.
        if zero_mode && s.abs() * cfg.l < 1e-3 {
            s = 0.0;
        }
        let mode = problem.eigenmode(s);
        let level = if s > 0.0 {
            positive_level(&cfg, s, mode)
        } else if s < 0.0 {
            negative_level(&cfg, -s, mode)
        } else {
            EnergyLevel { index: 0, energy: 0.0, kind: LevelKind::Zero, wavenumber: 0.0, mode }
        };
        levels.push(level);
    }
    finish(cfg, Family::General(bc), levels, l_max)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Sector {
    Plus,
    Minus,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DoubledLevel {
    pub energy: f64,
    pub sector: Sector,
    /// Index of the underlying level.
    pub level: usize,
}

/// Spectrum of the doubled Hamiltonian: `E_l` on the plus sector, `E_l + mu` on the minus sector.
pub fn doubled_spectrum(basis: &EnergyBasis, mu: f64) -> Result<Vec<DoubledLevel>> {
    if !(mu >= 0.0 && mu.is_finite()) {
        return Err(Error::Parameter(format!("mu must be finite and non-negative, got {mu}")));
    }
    let mut out: Vec<DoubledLevel> = basis
        .levels
        .iter()
        .flat_map(|lv| {
            [
                DoubledLevel { energy: lv.energy, sector: Sector::Plus, level: lv.index },
                DoubledLevel { energy: lv.energy + mu, sector: Sector::Minus, level: lv.index },
            ]
        })
        .collect();
    out.sort_by(|a, b| a.energy.total_cmp(&b.energy));
    Ok(out)
}
