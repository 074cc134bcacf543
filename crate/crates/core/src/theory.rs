//! Closed forms for the two reuse regimes.
//!
//! High reuse (`gamma_r > 1`): `E[L] = Theta(n)` with `r = Theta(sqrt(1/n))` and
//! any Zipf caching exponent above one.
//!
//! Low reuse (`gamma_r < 1`): `E[L] = Theta(n / m^(eta + eps))` with
//! `eta = (1 - gamma_r) / (2 - gamma_r)`, `r = Theta(sqrt(m^(eta + eps) / n))` and
//! caching exponent `gamma_c` solving `(1 - gamma_r) gamma_c / (1 - gamma_r + gamma_c) = eta + eps`.

use std::f64::consts::{LN_2, SQRT_2};

use crate::popularity::harmonic_sum;
use crate::{Error, Result};

pub const DEFAULT_EPSILON: f64 = 0.05;
pub const DEFAULT_DELTA: f64 = 0.5;
pub const DEFAULT_DELTA1: f64 = 0.5;
/// Default radius constants. 45 clears [`c1_floor`] at `gamma_c = 1.5` with the
/// default deltas (about 43.46).
pub const DEFAULT_C1: f64 = 45.0;
pub const DEFAULT_C2: f64 = 45.0;

const ZETA_TERMS: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// `gamma_r > 1`
    HighReuse,
    /// `gamma_r < 1`
    LowReuse,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegimeParams {
    pub gamma_r: f64,
    pub epsilon: f64,
    pub c1: f64,
    pub c2: f64,
}

impl RegimeParams {
    pub fn new(gamma_r: f64, epsilon: f64, c1: f64, c2: f64) -> Result<Self> {
        if !gamma_r.is_finite() || gamma_r < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "gamma_r must be finite and >= 0, got {gamma_r}"
            )));
        }
        check_epsilon(epsilon)?;
        if !(c1 > 0.0 && c1.is_finite() && c2.is_finite()) || c1 > c2 {
            return Err(Error::InvalidParameter(format!(
                "need 0 < c1 <= c2, got c1={c1} c2={c2}"
            )));
        }
        Ok(Self {
            gamma_r,
            epsilon,
            c1,
            c2,
        })
    }

    /// Default epsilon and radius constants.
    pub fn with_defaults(gamma_r: f64) -> Result<Self> {
        Self::new(gamma_r, DEFAULT_EPSILON, DEFAULT_C1, DEFAULT_C2)
    }

    pub fn regime(&self) -> Result<Regime> {
        if self.gamma_r > 1.0 {
            Ok(Regime::HighReuse)
        } else if self.gamma_r < 1.0 {
            Ok(Regime::LowReuse)
        } else {
            Err(Error::Regime(
                "gamma_r = 1 lies on the boundary between the two regimes".into(),
            ))
        }
    }

    /// Geometric midpoint `sqrt(c1 c2)` of `[c1, c2]`; the radius is `sqrt(c / n)`
    /// (times `m^(eta + eps)` under the root for low reuse), inside the band
    /// `sqrt(c1 / n) <= r <= sqrt(c2 / n)`.
    pub fn radius_constant(&self) -> f64 {
        (self.c1 * self.c2).sqrt()
    }
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if !(epsilon > 0.0 && epsilon < 1.0 / 6.0) {
        return Err(Error::InvalidParameter(format!(
            "epsilon must lie in (0, 1/6), got {epsilon}"
        )));
    }
    Ok(())
}

fn check_low_reuse(gamma_r: f64) -> Result<()> {
    if !gamma_r.is_finite() || gamma_r < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "gamma_r must be finite and >= 0, got {gamma_r}"
        )));
    }
    if gamma_r >= 1.0 {
        return Err(Error::Regime(format!(
            "eta is defined only for gamma_r < 1, got {gamma_r}"
        )));
    }
    Ok(())
}

/// `(1 - gamma_r) / (2 - gamma_r)`, in `(0, 1/2]`.
pub fn eta(gamma_r: f64) -> Result<f64> {
    check_low_reuse(gamma_r)?;
    Ok((1.0 - gamma_r) / (2.0 - gamma_r))
}

/// Caching exponent that reaches the target exponent `t = eta + epsilon`.
///
/// With `a = 1 - gamma_r`, `a g / (a + g) = t` rearranges to `g = t a / (a - t)`,
/// positive only when `t < a`.
pub fn optimal_gamma_c(gamma_r: f64, epsilon: f64) -> Result<f64> {
    check_epsilon(epsilon)?;
    let target = eta(gamma_r)? + epsilon;
    let a = 1.0 - gamma_r;
    if target >= a {
        return Err(Error::NoSolution(format!(
            "eta + epsilon = {target} must stay below 1 - gamma_r = {a}"
        )));
    }
    Ok(target * a / (a - target))
}

/// Collaboration distance for `n` users and a library of `m` files, clamped to `(0, sqrt 2]`.
pub fn r_opt(n: usize, m: usize, params: &RegimeParams) -> Result<f64> {
    if n == 0 || m == 0 {
        return Err(Error::InvalidParameter(format!(
            "n and m must be >= 1, got n={n} m={m}"
        )));
    }
    let c = params.radius_constant();
    let r = match params.regime()? {
        Regime::HighReuse => (c / n as f64).sqrt(),
        Regime::LowReuse => {
            let t = eta(params.gamma_r)? + params.epsilon;
            (c * (m as f64).powf(t) / n as f64).sqrt()
        }
    };
    Ok(r.min(SQRT_2))
}

/// Exponents `(a, b)` in `E[L] = Theta(n^a m^b)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalingExponents {
    pub n_exponent: f64,
    pub m_exponent: f64,
}

pub fn predicted_scaling(params: &RegimeParams) -> Result<ScalingExponents> {
    match params.regime()? {
        Regime::HighReuse => Ok(ScalingExponents {
            n_exponent: 1.0,
            m_exponent: 0.0,
        }),
        Regime::LowReuse => Ok(ScalingExponents {
            n_exponent: 1.0,
            m_exponent: -(eta(params.gamma_r)? + params.epsilon),
        }),
    }
}

/// Riemann zeta for `s > 1`: a million explicit terms plus an Euler-Maclaurin tail.
pub fn zeta(s: f64) -> Result<f64> {
    if s <= 1.0 || !s.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "zeta needs s > 1, got {s}"
        )));
    }
    let n = ZETA_TERMS as f64;
    let head = harmonic_sum(s, 1, ZETA_TERMS)?;
    let tail = n.powf(1.0 - s) / (s - 1.0) - 0.5 * n.powf(-s) + s * n.powf(-s - 1.0) / 12.0;
    Ok(head + tail)
}

/// Lower bound on `c1` used by the linear-scaling argument:
/// `3 ln 2 zeta(gamma_c) / (delta1^2 (1 - delta))`. Diagnostic only.
pub fn c1_floor(gamma_c: f64, delta: f64, delta1: f64) -> Result<f64> {
    if !(0.0 < delta && delta < 1.0 && 0.0 < delta1 && delta1 < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "deltas must lie in (0, 1), got delta={delta} delta1={delta1}"
        )));
    }
    Ok(3.0 * LN_2 * zeta(gamma_c)? / (delta1 * delta1 * (1.0 - delta)))
}

#[cfg(test)]
mod tests {
    use super::*;

    const GAMMA_GRID: [f64; 10] = [0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9];
    const EPS_GRID: [f64; 4] = [0.01, 0.05, 0.1, 0.15];

    #[test]
    fn eta_values() {
        assert_eq!(eta(0.0).unwrap(), 0.5);
        assert!((eta(0.5).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        let near: Vec<f64> = [0.9, 0.99, 0.999]
            .iter()
            .map(|&g| eta(g).unwrap())
            .collect();
        assert!(near[0] > near[1] && near[1] > near[2] && near[2] > 0.0);
        assert!(matches!(eta(1.0), Err(Error::Regime(_))));
        assert!(matches!(eta(1.5), Err(Error::Regime(_))));
    }

    #[test]
    fn eta_strictly_decreasing() {
        let mut prev = f64::INFINITY;
        for k in 0..1000 {
            let e = eta(k as f64 / 1000.0).unwrap();
            assert!(e < prev && e > 0.0 && e <= 0.5);
            prev = e;
        }
    }

    #[test]
    fn gamma_c_examples() {
        let g = optimal_gamma_c(0.5, 0.05).unwrap();
        assert!((g - 1.642857).abs() < 1e-6);
        assert!((g - 23.0 / 14.0).abs() < 1e-12);
        let g = optimal_gamma_c(0.8, 0.02).unwrap();
        assert!((g - 2.8).abs() < 1e-9);
    }

    #[test]
    fn gamma_c_residual_over_grid() {
        let mut solved = 0;
        for &gr in &GAMMA_GRID {
            for &eps in &EPS_GRID {
                let a = 1.0 - gr;
                let t = eta(gr).unwrap() + eps;
                match optimal_gamma_c(gr, eps) {
                    Ok(g) => {
                        solved += 1;
                        assert!(g > 0.0);
                        let residual = a * g / (a + g) - t;
                        assert!(
                            residual.abs() < 1e-12,
                            "gr={gr} eps={eps} residual={residual}"
                        );
                    }
                    Err(Error::NoSolution(_)) => assert!(t >= a, "gr={gr} eps={eps}"),
                    Err(e) => panic!("unexpected {e}"),
                }
            }
        }
        assert!(solved >= 30);
    }

    #[test]
    fn gamma_c_increasing_in_epsilon() {
        for &gr in &[0.0, 0.3, 0.5] {
            let vals: Vec<f64> = EPS_GRID
                .iter()
                .map(|&e| optimal_gamma_c(gr, e).unwrap())
                .collect();
            assert!(vals.windows(2).all(|w| w[0] < w[1]), "gr={gr}: {vals:?}");
        }
    }

    #[test]
    fn gamma_c_errors() {
        assert!(matches!(
            optimal_gamma_c(0.9, 0.05),
            Err(Error::NoSolution(_))
        ));
        assert!(matches!(
            optimal_gamma_c(0.5, 0.2),
            Err(Error::InvalidParameter(_))
        ));
        assert!(matches!(
            optimal_gamma_c(0.5, 0.0),
            Err(Error::InvalidParameter(_))
        ));
        assert!(matches!(optimal_gamma_c(1.2, 0.05), Err(Error::Regime(_))));
    }

    #[test]
    fn radius_examples() {
        let high = RegimeParams::new(1.5, 0.05, 4.0, 4.0).unwrap();
        assert!((r_opt(400, 10, &high).unwrap() - 0.1).abs() < 1e-15);

        let low = RegimeParams::new(0.5, 0.05, 1.0, 1.0).unwrap();
        let r = r_opt(10_000, 100, &low).unwrap();
        // sqrt(100^(23/60) / 1e4)
        assert!((r - 0.024_173_154_808).abs() < 1e-9, "{r}");
        assert!((r - 0.02416).abs() < 2e-5);

        for params in [high, low] {
            let a = r_opt(1000, 50, &params).unwrap();
            let b = r_opt(4000, 50, &params).unwrap();
            assert!((a / b - 2.0).abs() < 1e-12);
        }

        let huge = RegimeParams::new(1.5, 0.05, 100.0, 100.0).unwrap();
        assert_eq!(r_opt(4, 10, &huge).unwrap(), SQRT_2);

        // band edges
        let band = RegimeParams::new(1.5, 0.05, 2.0, 8.0).unwrap();
        let r = r_opt(1000, 10, &band).unwrap();
        assert!((2.0f64 / 1000.0).sqrt() <= r && r <= (8.0f64 / 1000.0).sqrt());
        assert!((r - (4.0f64 / 1000.0).sqrt()).abs() < 1e-15);

        let boundary = RegimeParams::new(1.0, 0.05, 1.0, 1.0).unwrap();
        assert!(matches!(r_opt(100, 10, &boundary), Err(Error::Regime(_))));
    }

    #[test]
    fn params_validation() {
        assert!(RegimeParams::new(0.5, 0.2, 1.0, 1.0).is_err());
        assert!(RegimeParams::new(0.5, 0.05, 2.0, 1.0).is_err());
        assert!(RegimeParams::new(-0.1, 0.05, 1.0, 1.0).is_err());
        assert!(RegimeParams::new(0.5, 0.05, 0.0, 1.0).is_err());
        assert!(RegimeParams::with_defaults(0.5).is_ok());
    }

    #[test]
    fn scaling_exponents() {
        let s = predicted_scaling(&RegimeParams::with_defaults(1.5).unwrap()).unwrap();
        assert_eq!((s.n_exponent, s.m_exponent), (1.0, 0.0));
        let s = predicted_scaling(&RegimeParams::with_defaults(0.5).unwrap()).unwrap();
        assert_eq!(s.n_exponent, 1.0);
        assert!((s.m_exponent + 0.383333).abs() < 1e-6);
        let s = predicted_scaling(&RegimeParams::with_defaults(0.0).unwrap()).unwrap();
        assert!((s.m_exponent + 0.55).abs() < 1e-12);
        assert!(predicted_scaling(&RegimeParams::with_defaults(1.0).unwrap()).is_err());
    }

    #[test]
    fn zeta_accuracy() {
        let pi2_6 = std::f64::consts::PI.powi(2) / 6.0;
        assert!((zeta(2.0).unwrap() - pi2_6).abs() < 1e-9);
        assert!((zeta(1.1).unwrap() - 10.584_448_464_950_8).abs() < 1e-6);
        assert!((zeta(1.5).unwrap() - 2.612_375_348_685_488).abs() < 1e-9);
        assert!(zeta(1.0).is_err());
    }

    #[test]
    fn default_c1_clears_floor() {
        let floor = c1_floor(1.5, DEFAULT_DELTA, DEFAULT_DELTA1).unwrap();
        assert!((floor - 43.458_254_580_135_6).abs() < 1e-6);
        assert!(DEFAULT_C1 > floor);
        assert!(c1_floor(1.5, 1.0, 0.5).is_err());
    }
}
