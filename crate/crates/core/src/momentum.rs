//! The self-adjoint momentum `p_R` on the two-component space, its quantized
//! spectrum, measurement distributions of physical states, and the boundary
//! operator `p_I`.

use std::f64::consts::PI;

use serde::Serialize;

use crate::config::BoxConfig;
use crate::error::{Error, Result};
use crate::quadrature::Quadrature;
use crate::wave::{derivative, WaveFunction};
use crate::C64;

/// Extension parameters `lambda_pm = i b_pm` and the derived phase `theta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MomentumExtension {
    pub b_plus: f64,
    pub b_minus: f64,
    pub theta: f64,
}

impl MomentumExtension {
    /// From the imaginary parts of `lambda_pm`.
    pub fn new(b_plus: f64, b_minus: f64) -> Result<Self> {
        if !(b_plus.is_finite() && b_minus.is_finite()) {
            return Err(Error::Parameter("extension parameters must be finite".into()));
        }
        let theta = (b_plus.atan() - b_minus.atan()).rem_euclid(PI);
        let theta = if theta >= PI { 0.0 } else { theta };
        Ok(Self { b_plus, b_minus, theta })
    }

    /// A parity-balanced choice `b_pm = +-tan(theta/2)` realizing a given phase.
    pub fn with_theta(theta: f64) -> Result<Self> {
        let t = theta.rem_euclid(PI);
        let b = (0.5 * t).tan();
        Self::new(b, -b)
    }

    pub fn lambda_plus(&self) -> C64 {
        C64::new(0.0, self.b_plus)
    }

    pub fn lambda_minus(&self) -> C64 {
        C64::new(0.0, self.b_minus)
    }

    /// `(1 + l+)(1 - l-) / ((1 - l+)(1 + l-))`, the unit-modulus right side of the quantization condition.
    pub fn quantization_phase(&self) -> C64 {
        let one = C64::new(1.0, 0.0);
        let (lp, lm) = (self.lambda_plus(), self.lambda_minus());
        (one + lp) * (one - lm) / ((one - lp) * (one + lm))
    }

    /// `k_n = (pi n + theta) / L`.
    pub fn eigenvalue(&self, n: i64, l: f64) -> f64 {
        (PI * n as f64 + self.theta) / l
    }

    pub fn eigenstate(&self, n: i64, cfg: BoxConfig) -> MomentumEigenstate {
        let k = self.eigenvalue(n, cfg.l);
        let one = C64::new(1.0, 0.0);
        let lp = self.lambda_plus();
        MomentumEigenstate {
            n,
            k,
            sigma: C64::from_polar(1.0, k * cfg.l) * (one - lp) / (one + lp),
            cfg,
            extension: *self,
        }
    }
}

/// Phase `theta` from general complex `lambda_pm`; both must be purely imaginary.
pub fn theta_from_lambdas(lambda_plus: C64, lambda_minus: C64) -> Result<f64> {
    for (name, l) in [("lambda_plus", lambda_plus), ("lambda_minus", lambda_minus)] {
        if l.re != 0.0 {
            return Err(Error::Parameter(format!("{name} = {l} is not purely imaginary")));
        }
        if !l.im.is_finite() {
            return Err(Error::Parameter(format!("{name} = {l} is not finite")));
        }
        if (C64::new(1.0, 0.0) - l).norm() == 0.0 || (C64::new(1.0, 0.0) + l).norm() == 0.0 {
            return Err(Error::Parameter(format!("{name} = +-1 makes the quantization condition degenerate")));
        }
    }
    Ok(MomentumExtension::new(lambda_plus.im, lambda_minus.im)?.theta)
}

/// Eigenfunction of `p_R` with eigenvalue `k_n` on the two-component space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentumEigenstate {
    pub n: i64,
    pub k: f64,
    pub sigma: C64,
    pub cfg: BoxConfig,
    pub extension: MomentumExtension,
}

impl MomentumEigenstate {
    /// `(e^{ikx} + sigma e^{-ikx}, e^{ikx} - sigma e^{-ikx}) / (2 sqrt L)`.
    pub fn components(&self, x: f64) -> [C64; 2] {
        let a = C64::from_polar(1.0, self.k * x);
        let b = self.sigma * C64::from_polar(1.0, -self.k * x);
        let norm = 0.5 / self.cfg.l.sqrt();
        [(a + b) * norm, (a - b) * norm]
    }

    /// `max |psi_o(+-L/2) - lambda_pm psi_e(+-L/2)|`.
    pub fn boundary_residual(&self) -> f64 {
        let h = self.cfg.half();
        let [er, or] = self.components(h);
        let [el, ol] = self.components(-h);
        let r = (or - self.extension.lambda_plus() * er).norm();
        let l = (ol - self.extension.lambda_minus() * el).norm();
        r.max(l)
    }
}

/// The eigenstate at `k`, which must lie on the quantized grid.
pub fn momentum_eigenfunction(
    k: f64,
    extension: &MomentumExtension,
    cfg: BoxConfig,
) -> Result<MomentumEigenstate> {
    let x = (k * cfg.l - extension.theta) / PI;
    let n = x.round();
    if (x - n).abs() > 1e-9 * x.abs().max(1.0) {
        return Err(Error::Parameter(format!("k = {k} is not on the quantized momentum grid")));
    }
    Ok(extension.eigenstate(n as i64, cfg))
}

/// `<phi|chi>` on the two-component space.
pub fn doubled_inner_product(a: &MomentumEigenstate, b: &MomentumEigenstate, quad: &Quadrature) -> C64 {
    quad.integrate(|x| {
        let [ae, ao] = a.components(x);
        let [be, bo] = b.components(x);
        ae.conj() * be + ao.conj() * bo
    })
}

/// `c_n = (2L)^{-1/2} int e^{-i k_n x} Psi dx` for `n` in `n_min..=n_max`.
///
/// Uses the closed-form Fourier integral when the state provides one.
pub fn momentum_amplitudes<W: WaveFunction>(
    psi: &W,
    extension: &MomentumExtension,
    n_min: i64,
    n_max: i64,
    quad: &Quadrature,
) -> Vec<C64> {
    let cfg = psi.config();
    let norm = 1.0 / (2.0 * cfg.l).sqrt();
    let closed = psi.fourier_integral(0.0).is_some();
    let samples: Vec<C64> = if closed {
        Vec::new()
    } else {
        quad.nodes().iter().map(|&x| psi.value(x)).collect()
    };
    (n_min..=n_max)
        .map(|n| {
            let k = extension.eigenvalue(n, cfg.l);
            let integral = if closed {
                psi.fourier_integral(k).expect("closed form")
            } else {
                quad.nodes()
                    .iter()
                    .zip(quad.weights())
                    .zip(&samples)
                    .fold(C64::new(0.0, 0.0), |acc, ((&x, &w), v)| {
                        acc + C64::from_polar(w, -k * x) * v
                    })
            };
            integral * norm
        })
        .collect()
}

/// Continuous momentum density `|(2L)^{-1/2} int e^{-ikx} Psi dx|^2` on a dense grid.
pub fn momentum_density<W: WaveFunction>(psi: &W, ks: &[f64], quad: &Quadrature) -> Vec<f64> {
    let norm = 1.0 / (2.0 * psi.config().l);
    ks.iter()
        .map(|&k| {
            let v = psi
                .fourier_integral(k)
                .unwrap_or_else(|| quad.integrate(|x| C64::from_polar(1.0, -k * x) * psi.value(x)));
            v.norm_sqr() * norm
        })
        .collect()
}

/// Power-law fit `Q(m) ~ D m^{-s}` to `Q(m) = q(m) + q(-m)` over the last decade of `|n|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TailFit {
    pub coefficient: f64,
    pub exponent: f64,
    /// `sum_{m > N} Q(m)` estimated as `D (N + 1/2)^{1-s} / (s - 1)`.
    pub tail_sum: f64,
}

/// `q` is indexed by `n` from `-n_max` to `n_max`.
pub fn fit_tail(q: &[f64], n_max: i64) -> Option<TailFit> {
    if n_max < 20 || q.len() != (2 * n_max + 1) as usize {
        return None;
    }
    let pair = |m: i64| q[(n_max + m) as usize] + q[(n_max - m) as usize];
    // Neighbouring pairs are averaged so that parity selection rules (zeros at
    // every other m) do not break the power law; wide blocks would bias the slope.
    let m0 = (n_max + 9) / 10;
    let samples = 33;
    let ratio = ((n_max - 1) as f64 / m0 as f64).powf(1.0 / (samples - 1) as f64);
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut last = 0;
    for j in 0..samples {
        let m = ((m0 as f64 * ratio.powi(j)).round() as i64).clamp(m0, n_max - 1);
        if m == last {
            continue;
        }
        last = m;
        let avg = 0.5 * (pair(m) + pair(m + 1));
        if avg > 0.0 && avg.is_finite() {
            xs.push((m as f64 + 0.5).ln());
            ys.push(avg.ln());
        }
    }
    if xs.len() < 3 {
        return None;
    }
    let nf = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / nf;
    let my = ys.iter().sum::<f64>() / nf;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    let s = -slope;
    let d = (my - slope * mx).exp();
    if !(s > 1.0 && s.is_finite() && d.is_finite()) {
        return None;
    }
    Some(TailFit {
        coefficient: d,
        exponent: s,
        tail_sum: d * (n_max as f64 + 0.5).powf(1.0 - s) / (s - 1.0),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MomentumDistribution {
    pub n_min: i64,
    pub n_max: i64,
    pub probabilities: Vec<f64>,
    /// Decay power of `P(n)` over the last decade, when a power law fits.
    pub tail_exponent: Option<f64>,
    /// Estimated probability outside the listed range.
    pub tail_mass: f64,
}

impl MomentumDistribution {
    pub fn probability(&self, n: i64) -> Option<f64> {
        if n < self.n_min || n > self.n_max {
            return None;
        }
        Some(self.probabilities[(n - self.n_min) as usize])
    }

    pub fn listed_mass(&self) -> f64 {
        compensated_sum(self.probabilities.iter().copied())
    }

    pub fn total_mass(&self) -> f64 {
        self.listed_mass() + self.tail_mass
    }

    /// `sum k_n P(n)` over the listed range.
    pub fn mean_momentum(&self, extension: &MomentumExtension, l: f64) -> f64 {
        compensated_sum(
            (self.n_min..=self.n_max)
                .zip(&self.probabilities)
                .map(|(n, p)| extension.eigenvalue(n, l) * p),
        )
    }
}

pub(crate) fn compensated_sum(values: impl Iterator<Item = f64>) -> f64 {
    let mut sum = 0.0;
    let mut c = 0.0;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            c += (sum - t) + v;
        } else {
            c += (v - t) + sum;
        }
        sum = t;
    }
    sum + c
}

pub fn momentum_distribution<W: WaveFunction>(
    psi: &W,
    extension: &MomentumExtension,
    n_min: i64,
    n_max: i64,
    quad: &Quadrature,
) -> MomentumDistribution {
    let probabilities: Vec<f64> = momentum_amplitudes(psi, extension, n_min, n_max, quad)
        .iter()
        .map(|c| c.norm_sqr())
        .collect();
    let fit = if n_min == -n_max { fit_tail(&probabilities, n_max) } else { None };
    MomentumDistribution {
        n_min,
        n_max,
        tail_exponent: fit.map(|f| f.exponent),
        tail_mass: fit.map_or(0.0, |f| f.tail_sum),
        probabilities,
    }
}

/// `<p_R> = Im int Psi* Psi' dx`, independent of the extension parameters.
pub fn expval_pr<W: WaveFunction>(psi: &W, quad: &Quadrature) -> Result<f64> {
    Ok(minus_i_ddx(psi, quad)?.re)
}

/// `<-i d/dx> = -i int Psi* Psi' dx` as a single quadrature.
pub fn minus_i_ddx<W: WaveFunction>(psi: &W, quad: &Quadrature) -> Result<C64> {
    let mut acc = C64::new(0.0, 0.0);
    for (&x, &w) in quad.nodes().iter().zip(quad.weights()) {
        acc += psi.value(x).conj() * derivative(psi, 1, x)? * w;
    }
    Ok(C64::new(0.0, -1.0) * acc)
}

/// `<p_I> = (|Psi(-L/2)|^2 - |Psi(L/2)|^2) / 2` on physical states.
pub fn expval_pi<W: WaveFunction>(psi: &W) -> f64 {
    let h = psi.config().half();
    0.5 * (psi.value(-h).norm_sqr() - psi.value(h).norm_sqr())
}

/// `|<-i d/dx> - (<p_R> + i <p_I>)|`.
pub fn momentum_identity_residual<W: WaveFunction>(psi: &W, quad: &Quadrature) -> Result<f64> {
    let lhs = minus_i_ddx(psi, quad)?;
    let pr = expval_pr(psi, quad)?;
    let pi = expval_pi(psi);
    Ok((lhs - C64::new(pr, pi)).norm())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum MomentumSquare {
    /// Some endpoint density is nonzero, so the series diverges.
    Infinite,
    Finite {
        /// `sum k_n^2 P(n)` including the fitted tail.
        series: f64,
        /// Fitted tail contribution.
        tail: f64,
        /// Highest `|n|` summed.
        n_max: i64,
        /// `int |Psi'|^2 dx`, for comparison.
        direct: f64,
    },
}

impl MomentumSquare {
    pub fn is_infinite(&self) -> bool {
        matches!(self, MomentumSquare::Infinite)
    }

    pub fn value(&self) -> f64 {
        match self {
            MomentumSquare::Infinite => f64::INFINITY,
            MomentumSquare::Finite { series, .. } => *series,
        }
    }
}

/// `<p_R^2>`: infinite unless the state vanishes at both walls.
///
/// Closed-form amplitudes are summed to `|n| <= 2^16`, quadrature amplitudes
/// to `|n| <= 512`, then the power-law tail is added.
pub fn expval_pr_squared<W: WaveFunction>(
    psi: &W,
    extension: &MomentumExtension,
    quad: &Quadrature,
) -> Result<MomentumSquare> {
    let cfg = psi.config();
    let h = cfg.half();
    let limit = 1e-10 / cfg.l;
    if psi.value(-h).norm_sqr() > limit || psi.value(h).norm_sqr() > limit {
        return Ok(MomentumSquare::Infinite);
    }
    let n_max: i64 = if psi.fourier_integral(0.0).is_some() { 1 << 16 } else { 512 };
    let amps = momentum_amplitudes(psi, extension, -n_max, n_max, quad);
    let weighted: Vec<f64> = (-n_max..=n_max)
        .zip(&amps)
        .map(|(n, c)| extension.eigenvalue(n, cfg.l).powi(2) * c.norm_sqr())
        .collect();
    let head = compensated_sum(weighted.iter().copied());
    let tail = fit_tail(&weighted, n_max).map_or(0.0, |f| f.tail_sum);
    let mut direct = 0.0;
    for (&x, &w) in quad.nodes().iter().zip(quad.weights()) {
        direct += derivative(psi, 1, x)?.norm_sqr() * w;
    }
    Ok(MomentumSquare::Finite {
        series: head + tail,
        tail,
        n_max,
        direct,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modes::{Mode, ModeSum};

    fn cfg() -> BoxConfig {
        BoxConfig::new(1.0, 1.0).unwrap()
    }

    #[test]
    fn theta_examples() {
        assert_eq!(theta_from_lambdas(C64::new(0.0, 1.0), C64::new(0.0, 1.0)).unwrap(), 0.0);
        assert_eq!(theta_from_lambdas(C64::new(0.0, 0.0), C64::new(0.0, 0.0)).unwrap(), 0.0);
        let t = theta_from_lambdas(C64::new(0.0, 1.0), C64::new(0.0, -1.0)).unwrap();
        assert!((t - PI / 2.0).abs() < 1e-15);
        assert!(theta_from_lambdas(C64::new(1.0, 0.0), C64::new(0.0, 0.0)).is_err());
        assert!(theta_from_lambdas(C64::new(0.3, 1.0), C64::new(0.0, 0.0)).is_err());
    }

    #[test]
    fn ground_eigenstate_matches_closed_form() {
        let ext = MomentumExtension::new(0.7, 0.7).unwrap();
        let s = ext.eigenstate(0, cfg());
        let one = C64::new(1.0, 0.0);
        let lp = ext.lambda_plus();
        assert!((s.sigma - (one - lp) / (one + lp)).norm() < 1e-15);
        assert!(s.boundary_residual() < 1e-12);
    }

    #[test]
    fn off_grid_momentum_is_rejected() {
        let ext = MomentumExtension::new(0.0, 0.0).unwrap();
        assert!(momentum_eigenfunction(1.0, &ext, cfg()).is_err());
        assert!(momentum_eigenfunction(3.0 * PI, &ext, cfg()).is_ok());
    }

    #[test]
    fn constant_state_distribution() {
        let q = Quadrature::standard(cfg());
        let psi = ModeSum::single(cfg(), Mode::Trig { k: 0.0, a: 1.0, b: 0.0 });
        let ext = MomentumExtension::new(0.0, 0.0).unwrap();
        let d = momentum_distribution(&psi, &ext, -4, 4, &q);
        assert!((d.probability(0).unwrap() - 0.5).abs() < 1e-15);
        assert!(d.probability(2).unwrap() < 1e-30);
        assert!((d.probability(1).unwrap() - 2.0 / (PI * PI)).abs() < 1e-15);
    }
}
