//! The `--state` mini-language.

use anyhow::Result;
use robin_box::dynamics::{gaussian_coefficients, EvolvingState, GaussianPacket};
use robin_box::random::random_state;
use robin_box::spectrum::{Family, LevelKind};
use robin_box::{BoxConfig, C64};

use crate::Usage;

#[derive(Debug, Clone, PartialEq)]
pub enum StateSpec {
    /// Wavenumber `n pi / L`, so `n >= 1`.
    Dirichlet(usize),
    Neumann(usize),
    Mixed(usize),
    /// The zero-energy state of the symmetric family at `gamma = -2/L`.
    LinearZero,
    Constant,
    /// Negative-energy level of the antisymmetric family.
    NegativeLevel(f64),
    Gaussian { a: f64, kc: f64 },
    Random { modes: usize, seed: Option<u64> },
}

fn usage(msg: String) -> anyhow::Error {
    Usage::new(msg).into()
}

fn number<T: std::str::FromStr>(s: &str, what: &str) -> Result<T> {
    s.trim().parse().map_err(|_| usage(format!("invalid {what} '{s}'")))
}

pub fn parse_state(text: &str) -> Result<StateSpec> {
    let (head, args) = match text.split_once(':') {
        Some((h, a)) => (h.trim(), Some(a)),
        None => (text.trim(), None),
    };
    let parts: Vec<&str> = args.map(|a| a.split(',').collect()).unwrap_or_default();
    let arity = |n: usize| -> Result<()> {
        if parts.len() == n {
            Ok(())
        } else {
            Err(usage(format!("state '{text}' expects {n} argument(s)")))
        }
    };
    let spec = match head {
        "dirichlet" => {
            arity(1)?;
            let n: usize = number(parts[0], "Dirichlet index")?;
            if n == 0 {
                return Err(usage("dirichlet:<n> counts from 1".into()));
            }
            StateSpec::Dirichlet(n)
        }
        "neumann" => {
            arity(1)?;
            StateSpec::Neumann(number(parts[0], "level")?)
        }
        "mixed" => {
            arity(1)?;
            StateSpec::Mixed(number(parts[0], "level")?)
        }
        "linear-zero" => {
            arity(0)?;
            StateSpec::LinearZero
        }
        "constant" => {
            arity(0)?;
            StateSpec::Constant
        }
        "antisymmetric-negative" | "eq13" => {
            arity(1)?;
            let g: f64 = number(parts[0], "gamma")?;
            if !g.is_finite() || g == 0.0 {
                return Err(usage(format!("{head} needs a nonzero finite gamma, got {g}")));
            }
            StateSpec::NegativeLevel(g)
        }
        "gaussian" => {
            arity(2)?;
            StateSpec::Gaussian { a: number(parts[0], "width")?, kc: number(parts[1], "momentum")? }
        }
        "random" => {
            let modes: usize = match parts.first() {
                Some(p) => number(p, "mode count")?,
                None => return Err(usage("random:<modes>[,<seed>]".into())),
            };
            if modes == 0 || parts.len() > 2 {
                return Err(usage(format!("invalid random state '{text}'")));
            }
            let seed = parts.get(1).map(|s| number(s, "seed")).transpose()?;
            StateSpec::Random { modes, seed }
        }
        _ => return Err(usage(format!("unknown state '{text}'"))),
    };
    Ok(spec)
}

/// The family a named state belongs to, or `None` when it follows `--bc`.
fn own_family(spec: &StateSpec, cfg: BoxConfig) -> Option<Family> {
    match spec {
        StateSpec::Dirichlet(_) => Some(Family::Dirichlet),
        StateSpec::Neumann(_) | StateSpec::Constant => Some(Family::Neumann),
        StateSpec::Mixed(_) => Some(Family::Mixed),
        StateSpec::LinearZero => Some(Family::Symmetric(-2.0 / cfg.l)),
        StateSpec::NegativeLevel(g) => Some(Family::Antisymmetric(*g)),
        StateSpec::Gaussian { .. } | StateSpec::Random { .. } => None,
    }
}

fn same_family(a: &Family, b: &Family) -> bool {
    let close = |x: f64, y: f64| (x - y).abs() <= 1e-12 * x.abs().max(y.abs()).max(1.0);
    match (a, b) {
        (Family::Symmetric(x), Family::Symmetric(y)) | (Family::Antisymmetric(x), Family::Antisymmetric(y)) => {
            close(*x, *y)
        }
        _ => a == b,
    }
}

/// Builds the state and the basis it lives in.
///
/// Named eigenstates carry their own family; `--bc`, when given, must agree.
pub fn build_state(
    spec: &StateSpec,
    cfg: BoxConfig,
    bc: Option<Family>,
    default_seed: u64,
) -> Result<EvolvingState> {
    let family = match (own_family(spec, cfg), bc) {
        (Some(own), Some(given)) if !same_family(&own, &given) => {
            return Err(usage(format!(
                "state {spec:?} belongs to the {} family, not --bc {}",
                own.name(),
                given.name()
            )))
        }
        (Some(own), _) => own,
        (None, given) => given.unwrap_or(Family::Dirichlet),
    };
    let single = |family: Family, level: usize| -> Result<EvolvingState> {
        let basis = family.spectrum(cfg, level)?;
        let mut coefs = vec![C64::new(0.0, 0.0); level + 1];
        coefs[level] = C64::new(1.0, 0.0);
        Ok(EvolvingState::new(basis, coefs, 0.0)?)
    };
    match *spec {
        StateSpec::Dirichlet(n) => single(family, n - 1),
        StateSpec::Neumann(l) | StateSpec::Mixed(l) => single(family, l),
        StateSpec::Constant => single(family, 0),
        StateSpec::LinearZero => {
            let basis = family.spectrum(cfg, 1)?;
            let idx = basis
                .levels
                .iter()
                .position(|lv| lv.kind == LevelKind::Zero)
                .ok_or_else(|| anyhow::anyhow!("no zero mode found at gamma = -2/L"))?;
            single(family, idx)
        }
        StateSpec::NegativeLevel(_) => single(family, 0),
        StateSpec::Gaussian { a, kc } => {
            if !matches!(family, Family::Dirichlet | Family::Neumann | Family::Mixed) {
                return Err(usage(format!(
                    "gaussian packets need a dirichlet, neumann or mixed box, not {}",
                    family.name()
                )));
            }
            let packet = GaussianPacket::new(a, kc, cfg.m).map_err(|e| usage(e.to_string()))?;
            let basis = family.spectrum(cfg, packet.levels_needed(&family, cfg))?;
            Ok(gaussian_coefficients(&packet, &basis)?)
        }
        StateSpec::Random { modes, seed } => {
            let basis = family.spectrum(cfg, modes - 1)?;
            Ok(random_state(&basis, modes, seed.unwrap_or(default_seed))?)
        }
    }
}

/// `gaussian:<L/20>,<41 pi/L>` in the given box.
pub fn default_packet(cfg: BoxConfig) -> StateSpec {
    let p = GaussianPacket::default_for(cfg);
    StateSpec::Gaussian { a: p.a, kc: p.kc }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_every_form() {
        assert_eq!(parse_state("dirichlet:4").unwrap(), StateSpec::Dirichlet(4));
        assert_eq!(parse_state("mixed:2").unwrap(), StateSpec::Mixed(2));
        assert_eq!(parse_state("linear-zero").unwrap(), StateSpec::LinearZero);
        assert_eq!(parse_state("eq13:-1.5").unwrap(), StateSpec::NegativeLevel(-1.5));
        assert_eq!(parse_state("antisymmetric-negative:2").unwrap(), StateSpec::NegativeLevel(2.0));
        assert_eq!(parse_state("gaussian:0.05,128.8").unwrap(), StateSpec::Gaussian { a: 0.05, kc: 128.8 });
        assert_eq!(parse_state("random:10,7").unwrap(), StateSpec::Random { modes: 10, seed: Some(7) });
        assert_eq!(parse_state("random:3").unwrap(), StateSpec::Random { modes: 3, seed: None });
        for bad in ["dirichlet:0", "dirichlet", "eq13:0", "gaussian:1", "random:0", "wobble", "constant:3"] {
            assert!(parse_state(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn family_conflicts_are_usage_errors() {
        let cfg = BoxConfig::new(1.0, 1.0).unwrap();
        let e = build_state(&StateSpec::Dirichlet(2), cfg, Some(Family::Neumann), 0).unwrap_err();
        assert!(e.downcast_ref::<Usage>().is_some());
        let e = build_state(&StateSpec::Gaussian { a: 0.05, kc: 10.0 }, cfg, Some(Family::Symmetric(1.0)), 0)
            .unwrap_err();
        assert!(e.downcast_ref::<Usage>().is_some());
        assert!(build_state(&StateSpec::LinearZero, cfg, Some(Family::Symmetric(-2.0)), 0).is_ok());
    }
}
