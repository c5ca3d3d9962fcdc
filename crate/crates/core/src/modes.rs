//! Real analytic building blocks for eigenfunctions, with closed-form
//! derivatives, Fourier integrals and (for trigonometric pairs) matrix elements.

use serde::Serialize;

use crate::config::BoxConfig;
use crate::quadrature::Quadrature;
use crate::wave::WaveFunction;
use crate::C64;

/// One real eigenfunction shape on `[-h, h]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Mode {
    /// `a cos(kx) + b sin(kx)`
    Trig { k: f64, a: f64, b: f64 },
    /// `right e^{kappa (x-h)} + left e^{-kappa (x+h)}`; both pieces are at most
    /// their coefficient in size, so large `kappa L` cannot overflow.
    Exp {
        kappa: f64,
        half: f64,
        right: f64,
        left: f64,
    },
    /// `c0 + c1 x`
    Linear { c0: f64, c1: f64 },
}

/// `2 sin(p h) / p`, the integral of `cos(p x)` over `[-h, h]`.
pub(crate) fn sc(p: f64, h: f64) -> f64 {
    let u = p * h;
    if u.abs() < 1e-3 {
        let u2 = u * u;
        2.0 * h * (1.0 - u2 / 6.0 + u2 * u2 / 120.0)
    } else {
        2.0 * u.sin() / p
    }
}

/// `2 [sin(p h)/p^2 - h cos(p h)/p]`, the integral of `x sin(p x)` over `[-h, h]`.
pub(crate) fn sx(p: f64, h: f64) -> f64 {
    let u = p * h;
    if u.abs() < 0.1 {
        let u2 = u * u;
        let series = u
            * (1.0 / 3.0
                - u2 * (1.0 / 30.0
                    - u2 * (1.0 / 840.0 - u2 * (1.0 / 45360.0 - u2 / 3991680.0))));
        2.0 * h * h * series
    } else {
        2.0 * (u.sin() / (p * p) - h * u.cos() / p)
    }
}

/// `(1 - e^{-u}) / u` for complex `u`, with a series near zero.
fn one_minus_exp_over(u: C64) -> C64 {
    if u.norm() < 1e-3 {
        C64::new(1.0, 0.0) - u / 2.0 + u * u / 6.0 - u * u * u / 24.0
    } else {
        (C64::new(1.0, 0.0) - (-u).exp()) / u
    }
}

impl Mode {
    pub fn value(&self, x: f64) -> f64 {
        match *self {
            Mode::Trig { k, a, b } => {
                let (s, c) = (k * x).sin_cos();
                a * c + b * s
            }
            Mode::Exp {
                kappa,
                half,
                right,
                left,
            } => right * (kappa * (x - half)).exp() + left * (-kappa * (x + half)).exp(),
            Mode::Linear { c0, c1 } => c0 + c1 * x,
        }
    }

    /// The derivative as another mode of the same kind.
    pub fn derivative(&self) -> Mode {
        match *self {
            Mode::Trig { k, a, b } => Mode::Trig {
                k,
                a: k * b,
                b: -k * a,
            },
            Mode::Exp {
                kappa,
                half,
                right,
                left,
            } => Mode::Exp {
                kappa,
                half,
                right: kappa * right,
                left: -kappa * left,
            },
            Mode::Linear { c1, .. } => Mode::Linear { c0: c1, c1: 0.0 },
        }
    }

    pub fn d1(&self, x: f64) -> f64 {
        self.derivative().value(x)
    }

    pub fn d2(&self, x: f64) -> f64 {
        self.derivative().derivative().value(x)
    }

    pub fn scaled(&self, s: f64) -> Mode {
        match *self {
            Mode::Trig { k, a, b } => Mode::Trig {
                k,
                a: s * a,
                b: s * b,
            },
            Mode::Exp {
                kappa,
                half,
                right,
                left,
            } => Mode::Exp {
                kappa,
                half,
                right: s * right,
                left: s * left,
            },
            Mode::Linear { c0, c1 } => Mode::Linear {
                c0: s * c0,
                c1: s * c1,
            },
        }
    }

    /// `int_{-h}^{h} mode(x)^2 dx` in closed form.
    pub fn norm_sq(&self, h: f64) -> f64 {
        match *self {
            Mode::Exp {
                kappa,
                right,
                left,
                ..
            } => {
                let l = 2.0 * h;
                let piece = -(-2.0 * kappa * l).exp_m1() / (2.0 * kappa);
                (right * right + left * left) * piece + 2.0 * right * left * l * (-kappa * l).exp()
            }
            Mode::Linear { c0, c1 } => {
                let l = 2.0 * h;
                c0 * c0 * l + c1 * c1 * l * l * l / 12.0
            }
            Mode::Trig { .. } => self.overlap(self, h).expect("trig pair"),
        }
    }

    /// `int_{-h}^{h} exp(-i q x) mode(x) dx`.
    pub fn fourier(&self, q: f64, h: f64) -> C64 {
        let i = C64::new(0.0, 1.0);
        match *self {
            Mode::Trig { k, a, b } => {
                let plus = sc(k + q, h);
                let minus = sc(k - q, h);
                C64::new(0.5 * a * (minus + plus), 0.0) - i * (0.5 * b * (minus - plus))
            }
            Mode::Exp {
                kappa,
                right,
                left,
                ..
            } => {
                let l = 2.0 * h;
                let zr = C64::new(kappa, -q);
                let zl = C64::new(kappa, q);
                let er = C64::from_polar(1.0, -q * h);
                let el = C64::from_polar(1.0, q * h);
                er * one_minus_exp_over(zr * l) * (right * l) + el * one_minus_exp_over(zl * l) * (left * l)
            }
            Mode::Linear { c0, c1 } => C64::new(c0 * sc(q, h), 0.0) - i * (c1 * sx(q, h)),
        }
    }

    /// `int mode * other` in closed form when both are trigonometric.
    pub fn overlap(&self, other: &Mode, h: f64) -> Option<f64> {
        match (*self, *other) {
            (Mode::Trig { k: ka, a, b }, Mode::Trig { k: kb, a: c, b: d }) => {
                let sm = sc(ka - kb, h);
                let sp = sc(ka + kb, h);
                Some(a * c * 0.5 * (sm + sp) + b * d * 0.5 * (sm - sp))
            }
            _ => None,
        }
    }

    /// `int x * mode * other` in closed form when both are trigonometric.
    pub fn position_element(&self, other: &Mode, h: f64) -> Option<f64> {
        match (*self, *other) {
            (Mode::Trig { k: ka, a, b }, Mode::Trig { k: kb, a: c, b: d }) => {
                let xm = sx(ka - kb, h);
                let xp = sx(ka + kb, h);
                Some(a * d * 0.5 * (xp - xm) + b * c * 0.5 * (xp + xm))
            }
            _ => None,
        }
    }

    /// `int mode * other` by closed form when possible, else by quadrature.
    pub fn overlap_with(&self, other: &Mode, quad: &Quadrature) -> f64 {
        let h = quad.config().half();
        self.overlap(other, h)
            .unwrap_or_else(|| quad.integrate_real(|x| self.value(x) * other.value(x)))
    }

    /// `int x * mode * other` by closed form when possible, else by quadrature.
    pub fn position_with(&self, other: &Mode, quad: &Quadrature) -> f64 {
        let h = quad.config().half();
        self.position_element(other, h)
            .unwrap_or_else(|| quad.integrate_real(|x| x * self.value(x) * other.value(x)))
    }
}

/// A finite combination `sum_j c_j mode_j(x)`; the coefficient form of a state.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeSum {
    pub cfg: BoxConfig,
    pub modes: Vec<Mode>,
    pub coefs: Vec<C64>,
}

impl ModeSum {
    pub fn new(cfg: BoxConfig, modes: Vec<Mode>, coefs: Vec<C64>) -> Self {
        assert_eq!(modes.len(), coefs.len(), "one coefficient per mode");
        Self { cfg, modes, coefs }
    }

    pub fn single(cfg: BoxConfig, mode: Mode) -> Self {
        Self::new(cfg, vec![mode], vec![C64::new(1.0, 0.0)])
    }

    fn combine(&self, f: impl Fn(&Mode) -> f64) -> C64 {
        self.modes
            .iter()
            .zip(&self.coefs)
            .fold(C64::new(0.0, 0.0), |acc, (m, c)| acc + c * f(m))
    }
}

impl WaveFunction for ModeSum {
    fn config(&self) -> BoxConfig {
        self.cfg
    }
    fn value(&self, x: f64) -> C64 {
        self.combine(|m| m.value(x))
    }
    fn analytic_derivative(&self, order: u8, x: f64) -> Option<C64> {
        match order {
            1 => Some(self.combine(|m| m.d1(x))),
            2 => Some(self.combine(|m| m.d2(x))),
            _ => None,
        }
    }
    fn fourier_integral(&self, q: f64) -> Option<C64> {
        let h = self.cfg.half();
        Some(
            self.modes
                .iter()
                .zip(&self.coefs)
                .fold(C64::new(0.0, 0.0), |acc, (m, c)| acc + c * m.fourier(q, h)),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quad() -> Quadrature {
        Quadrature::standard(BoxConfig::new(1.0, 1.3).unwrap())
    }

    fn samples() -> Vec<Mode> {
        vec![
            Mode::Trig { k: 0.0, a: 0.7, b: 0.0 },
            Mode::Trig { k: 2.1, a: 0.3, b: -1.2 },
            Mode::Trig { k: 2.1 + 1e-9, a: 1.0, b: 0.5 },
            Mode::Trig { k: 17.3, a: -0.4, b: 0.9 },
            Mode::Exp { kappa: 3.0, half: 0.65, right: 0.8, left: -0.2 },
            Mode::Exp { kappa: 1e-6, half: 0.65, right: 0.1, left: 0.3 },
            Mode::Linear { c0: 0.2, c1: 1.7 },
        ]
    }

    #[test]
    fn fourier_integrals_match_quadrature() {
        let q = quad();
        let h = q.config().half();
        for m in samples() {
            for &k in &[0.0, 1e-7, 0.9, -4.0, 17.3, 60.0] {
                let exact = m.fourier(k, h);
                let num = q.integrate(|x| C64::from_polar(1.0, -k * x) * m.value(x));
                assert!((exact - num).norm() < 1e-12, "{m:?} q={k}: {exact} vs {num}");
            }
        }
    }

    #[test]
    fn closed_form_matrix_elements_match_quadrature() {
        let q = quad();
        let trig: Vec<Mode> = samples().into_iter().filter(|m| matches!(m, Mode::Trig { .. })).collect();
        for a in &trig {
            for b in &trig {
                let o = a.overlap_with(b, &q);
                let on = q.integrate_real(|x| a.value(x) * b.value(x));
                assert!((o - on).abs() < 1e-12);
                let x = a.position_with(b, &q);
                let xn = q.integrate_real(|x| x * a.value(x) * b.value(x));
                assert!((x - xn).abs() < 1e-12, "{a:?} {b:?}: {x} vs {xn}");
            }
        }
    }

    #[test]
    fn norms_match_quadrature() {
        let q = quad();
        for m in samples() {
            let n = m.norm_sq(q.config().half());
            let nn = q.integrate_real(|x| m.value(x).powi(2));
            assert!((n - nn).abs() < 1e-12 * nn.max(1.0), "{m:?}");
        }
    }

    #[test]
    fn derivatives_are_consistent() {
        for m in samples() {
            for &x in &[-0.65, -0.1, 0.3, 0.65] {
                let h = 1e-5;
                let fd = (m.value(x + h) - m.value(x - h)) / (2.0 * h);
                assert!((fd - m.d1(x)).abs() < 1e-6 * (1.0 + m.d1(x).abs()));
                let fd2 = (m.d1(x + h) - m.d1(x - h)) / (2.0 * h);
                assert!((fd2 - m.d2(x)).abs() < 1e-5 * (1.0 + m.d2(x).abs()));
            }
        }
    }
}
