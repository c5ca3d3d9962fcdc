use serde::Serialize;

use crate::config::BoxConfig;
use crate::error::{Error, Result};
use crate::quadrature::Quadrature;
use crate::C64;

/// A complex wavefunction on the box.
///
/// Implementors may expose analytic derivatives and a closed form for
/// `int exp(-i q x) psi(x) dx` over the box; callers fall back to finite
/// differences and quadrature when these return `None`.
pub trait WaveFunction {
    fn config(&self) -> BoxConfig;

    fn value(&self, x: f64) -> C64;

    fn analytic_derivative(&self, _order: u8, _x: f64) -> Option<C64> {
        None
    }

    fn fourier_integral(&self, _q: f64) -> Option<C64> {
        None
    }
}

impl<W: WaveFunction + ?Sized> WaveFunction for &W {
    fn config(&self) -> BoxConfig {
        (**self).config()
    }
    fn value(&self, x: f64) -> C64 {
        (**self).value(x)
    }
    fn analytic_derivative(&self, order: u8, x: f64) -> Option<C64> {
        (**self).analytic_derivative(order, x)
    }
    fn fourier_integral(&self, q: f64) -> Option<C64> {
        (**self).fourier_integral(q)
    }
}

type Func = Box<dyn Fn(f64) -> C64 + Send + Sync>;

/// Closure form, with optional analytic first and second derivatives.
pub struct ClosureWave {
    cfg: BoxConfig,
    f: Func,
    d1: Option<Func>,
    d2: Option<Func>,
}

impl ClosureWave {
    pub fn new(cfg: BoxConfig, f: impl Fn(f64) -> C64 + Send + Sync + 'static) -> Self {
        Self {
            cfg,
            f: Box::new(f),
            d1: None,
            d2: None,
        }
    }

    pub fn with_derivatives(
        mut self,
        d1: impl Fn(f64) -> C64 + Send + Sync + 'static,
        d2: impl Fn(f64) -> C64 + Send + Sync + 'static,
    ) -> Self {
        self.d1 = Some(Box::new(d1));
        self.d2 = Some(Box::new(d2));
        self
    }

    pub fn real(cfg: BoxConfig, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self::new(cfg, move |x| C64::new(f(x), 0.0))
    }
}

impl WaveFunction for ClosureWave {
    fn config(&self) -> BoxConfig {
        self.cfg
    }
    fn value(&self, x: f64) -> C64 {
        (self.f)(x)
    }
    fn analytic_derivative(&self, order: u8, x: f64) -> Option<C64> {
        match order {
            1 => self.d1.as_ref().map(|d| d(x)),
            2 => self.d2.as_ref().map(|d| d(x)),
            _ => None,
        }
    }
}

/// Samples at the nodes of a quadrature rule, interpolated inside each panel.
#[derive(Debug, Clone)]
pub struct SampledWave {
    quad: Quadrature,
    values: Vec<C64>,
    left: C64,
    right: C64,
}

impl SampledWave {
    pub fn from_wave<W: WaveFunction>(f: &W, quad: &Quadrature) -> Result<Self> {
        f.config().check_same(&quad.config())?;
        let h = quad.config().half();
        Ok(Self {
            values: quad.nodes().iter().map(|&x| f.value(x)).collect(),
            quad: quad.clone(),
            left: f.value(-h),
            right: f.value(h),
        })
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }
}

impl WaveFunction for SampledWave {
    fn config(&self) -> BoxConfig {
        self.quad.config()
    }
    fn value(&self, x: f64) -> C64 {
        let h = self.quad.config().half();
        if x <= -h {
            self.left
        } else if x >= h {
            self.right
        } else {
            self.quad.interpolate(&self.values, x)
        }
    }
}

/// `factor * inner`, used for normalization.
#[derive(Debug, Clone)]
pub struct Scaled<W> {
    pub inner: W,
    pub factor: C64,
}

impl<W: WaveFunction> WaveFunction for Scaled<W> {
    fn config(&self) -> BoxConfig {
        self.inner.config()
    }
    fn value(&self, x: f64) -> C64 {
        self.factor * self.inner.value(x)
    }
    fn analytic_derivative(&self, order: u8, x: f64) -> Option<C64> {
        self.inner
            .analytic_derivative(order, x)
            .map(|d| self.factor * d)
    }
    fn fourier_integral(&self, q: f64) -> Option<C64> {
        self.inner.fourier_integral(q).map(|v| self.factor * v)
    }
}

/// `<f|g>`, conjugate-linear in `f`.
pub fn inner_product<F: WaveFunction, G: WaveFunction>(
    f: &F,
    g: &G,
    quad: &Quadrature,
) -> Result<C64> {
    f.config().check_same(&g.config())?;
    f.config().check_same(&quad.config())?;
    Ok(quad.integrate(|x| f.value(x).conj() * g.value(x)))
}

pub fn norm_sq<F: WaveFunction>(f: &F, quad: &Quadrature) -> f64 {
    quad.integrate_real(|x| f.value(x).norm_sqr())
}

pub fn normalize<F: WaveFunction>(f: F, quad: &Quadrature) -> Result<Scaled<F>> {
    let n = norm_sq(&f, quad);
    if !(n.is_finite() && n > 0.0) {
        return Err(Error::Numeric(format!("state cannot be normalized (norm^2 = {n})")));
    }
    Ok(Scaled {
        inner: f,
        factor: C64::new(1.0 / n.sqrt(), 0.0),
    })
}

/// L2 distance between two states.
pub fn l2_distance<F: WaveFunction, G: WaveFunction>(f: &F, g: &G, quad: &Quadrature) -> f64 {
    quad.integrate_real(|x| (f.value(x) - g.value(x)).norm_sqr())
        .sqrt()
}

const CENTRAL_D1: [f64; 5] = [1.0, -8.0, 0.0, 8.0, -1.0];
const CENTRAL_D2: [f64; 5] = [-1.0, 16.0, -30.0, 16.0, -1.0];
const FORWARD_D1: [f64; 5] = [-25.0, 48.0, -36.0, 16.0, -3.0];
const FORWARD_D2: [f64; 5] = [35.0, -104.0, 114.0, -56.0, 11.0];

fn stencil<F: WaveFunction>(f: &F, order: u8, x: f64, h: f64) -> (C64, f64) {
    let half = f.config().half();
    let scale = if order == 1 { 12.0 * h } else { 12.0 * h * h };
    if x - 2.0 * h >= -half && x + 2.0 * h <= half {
        let c = if order == 1 { &CENTRAL_D1 } else { &CENTRAL_D2 };
        let s = (0..5).fold(C64::new(0.0, 0.0), |acc, j| {
            acc + f.value(x + (j as f64 - 2.0) * h) * c[j]
        });
        (s / scale, 4.0)
    } else {
        // one-sided, pointing into the box
        let dir = if x - 2.0 * h < -half { 1.0 } else { -1.0 };
        let c = if order == 1 { &FORWARD_D1 } else { &FORWARD_D2 };
        let s = (0..5).fold(C64::new(0.0, 0.0), |acc, j| {
            acc + f.value(x + dir * j as f64 * h) * c[j]
        });
        let sign = if order == 1 { dir } else { 1.0 };
        (s * sign / scale, if order == 1 { 4.0 } else { 3.0 })
    }
}

/// First or second derivative at `x`.
///
/// Uses the analytic derivative when the wavefunction provides one. Otherwise a
/// five-point stencil with `h = 1e-5 L` (one-sided near the walls) and one
/// Richardson step.
pub fn derivative<F: WaveFunction>(f: &F, order: u8, x: f64) -> Result<C64> {
    let cfg = f.config();
    if !(order == 1 || order == 2) {
        return Err(Error::Parameter(format!("derivative order must be 1 or 2, got {order}")));
    }
    if !cfg.contains(x) {
        return Err(Error::Domain { x, half: cfg.half() });
    }
    let x = x.clamp(-cfg.half(), cfg.half());
    if let Some(d) = f.analytic_derivative(order, x) {
        return Ok(d);
    }
    let h = 1e-5 * cfg.l;
    let (coarse, p) = stencil(f, order, x, h);
    let (fine, _) = stencil(f, order, x, 0.5 * h);
    let r = 2f64.powf(p);
    Ok((fine * r - coarse) / (r - 1.0))
}

/// Position moments, endpoint densities and endpoint currents.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Observables {
    pub mean_x: f64,
    pub mean_x2: f64,
    pub var_x: f64,
    pub rho_left: f64,
    pub rho_right: f64,
    pub current_left: f64,
    pub current_right: f64,
}

pub fn observables_of<F: WaveFunction>(f: &F, quad: &Quadrature) -> Result<Observables> {
    let cfg = f.config();
    cfg.check_same(&quad.config())?;
    let h = cfg.half();
    let mut m1 = 0.0;
    let mut m2 = 0.0;
    for (&x, &w) in quad.nodes().iter().zip(quad.weights()) {
        let r = f.value(x).norm_sqr() * w;
        m1 += x * r;
        m2 += x * x * r;
    }
    let current = |x: f64| -> Result<f64> {
        let v = f.value(x);
        Ok((v.conj() * derivative(f, 1, x)?).im / cfg.m)
    };
    Ok(Observables {
        mean_x: m1,
        mean_x2: m2,
        var_x: m2 - m1 * m1,
        rho_left: f.value(-h).norm_sqr(),
        rho_right: f.value(h).norm_sqr(),
        current_left: current(-h)?,
        current_right: current(h)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn cfg() -> BoxConfig {
        BoxConfig::new(1.0, 1.0).unwrap()
    }

    #[test]
    fn constant_state_has_unit_norm() {
        let q = Quadrature::standard(cfg());
        let f = ClosureWave::real(cfg(), |_| 1.0);
        let v = inner_product(&f, &f, &q).unwrap();
        assert!((v.re - 1.0).abs() < 1e-14 && v.im == 0.0);
    }

    #[test]
    fn parity_orthogonality() {
        let q = Quadrature::standard(cfg());
        let f = ClosureWave::real(cfg(), |x| 2f64.sqrt() * (PI * x).cos());
        let g = ClosureWave::real(cfg(), |x| 2f64.sqrt() * (2.0 * PI * x).sin());
        assert!(inner_product(&f, &g, &q).unwrap().norm() < 1e-15);
    }

    #[test]
    fn mismatched_boxes_are_rejected() {
        let q = Quadrature::standard(cfg());
        let other = BoxConfig::new(1.0, 2.0).unwrap();
        let f = ClosureWave::real(cfg(), |_| 1.0);
        let g = ClosureWave::real(other, |_| 1.0);
        assert!(matches!(inner_product(&f, &g, &q), Err(Error::Config(_))));
    }

    #[test]
    fn analytic_derivative_of_sine() {
        let l: f64 = 1.0;
        let f = ClosureWave::real(cfg(), move |x| (2.0 / l).sqrt() * (3.0 * PI * x / l).sin())
            .with_derivatives(
                move |x| C64::new((2.0 / l).sqrt() * 3.0 * PI / l * (3.0 * PI * x / l).cos(), 0.0),
                move |x| {
                    C64::new(-(2.0 / l).sqrt() * (3.0 * PI / l).powi(2) * (3.0 * PI * x / l).sin(), 0.0)
                },
            );
        let d = derivative(&f, 1, 0.0).unwrap();
        assert!((d.re - 2f64.sqrt() * 3.0 * PI).abs() < 1e-14);
    }

    #[test]
    fn derivative_of_constant_vanishes() {
        let f = ClosureWave::real(cfg(), |_| 1.0);
        for &x in &[-0.5, -0.2, 0.0, 0.49999, 0.5] {
            assert!(derivative(&f, 1, x).unwrap().norm() < 1e-9);
        }
    }

    #[test]
    fn derivative_outside_box_is_domain_error() {
        let f = ClosureWave::real(cfg(), |_| 1.0);
        assert!(matches!(derivative(&f, 1, 0.6), Err(Error::Domain { .. })));
        assert!(matches!(derivative(&f, 3, 0.0), Err(Error::Parameter(_))));
    }

    #[test]
    fn one_sided_second_derivative() {
        let f = ClosureWave::real(cfg(), |x| (2.0 * x).exp());
        for &x in &[-0.5, 0.5, 0.0] {
            let d2 = derivative(&f, 2, x).unwrap();
            let exact = 4.0 * (2.0 * x).exp();
            assert!((d2.re - exact).abs() < 1e-4, "x={x} got {} want {exact}", d2.re);
        }
    }

    #[test]
    fn sampled_form_preserves_norm() {
        let q = Quadrature::standard(cfg());
        let f = ClosureWave::new(cfg(), |x| C64::new((PI * x).cos(), 0.3 * x) * 1.3);
        let s = SampledWave::from_wave(&f, &q).unwrap();
        assert!((norm_sq(&f, &q) - norm_sq(&s, &q)).abs() < 1e-12);
        assert!((s.value(0.2345) - f.value(0.2345)).norm() < 1e-12);
    }

    #[test]
    fn linear_zero_mode_observables() {
        let l = 1.0f64;
        let q = Quadrature::standard(cfg());
        let f = ClosureWave::real(cfg(), move |x| (12.0 / l.powi(3)).sqrt() * x);
        let o = observables_of(&f, &q).unwrap();
        assert!(o.mean_x.abs() < 1e-15);
        assert!((o.var_x - 3.0 * l * l / 20.0).abs() < 1e-13);
        assert!((o.rho_left - 3.0 / l).abs() < 1e-13);
        assert!((o.rho_right - 3.0 / l).abs() < 1e-13);
    }
}
