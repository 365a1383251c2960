//! Time-dependent scalar drive envelopes on the unit gate window.
//!
//! The gate window is the dimensionless interval t ∈ [0, 1]; envelopes are
//! deliberately undefined outside it so caller bugs surface as domain
//! errors instead of silent zero-extension. The physical-to-dimensionless
//! conversion (t' = (mc/d) t and amplitude scaling by d/(mc)) lives in
//! [`Scaling`].

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Scalar envelope B(t) on t ∈ [0, 1] with an analytic derivative.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum FieldProfile {
    /// B(t) = amplitude.
    Constant { amplitude: f64 },
    /// B(t) = amplitude · sin(m π t), the single-mode semi-pulse.
    HalfSine {
        amplitude: f64,
        #[serde(rename = "m", default = "default_mode")]
        mode: u32,
    },
    /// Piecewise-constant drive. `breakpoints` are the interior cut points
    /// (strictly increasing, inside (0, 1)); `values` has one entry per
    /// interval, left-closed.
    Stepwise {
        breakpoints: Vec<f64>,
        values: Vec<f64>,
    },
}

fn default_mode() -> u32 {
    1
}

fn check_window(t: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::Domain(format!(
            "time {t} outside the gate window [0, 1]"
        )));
    }
    Ok(())
}

impl FieldProfile {
    pub fn constant(amplitude: f64) -> Self {
        FieldProfile::Constant { amplitude }
    }

    pub fn half_sine(amplitude: f64, mode: u32) -> Result<Self> {
        let profile = FieldProfile::HalfSine { amplitude, mode };
        profile.validate()?;
        Ok(profile)
    }

    pub fn stepwise(breakpoints: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        let profile = FieldProfile::Stepwise {
            breakpoints,
            values,
        };
        profile.validate()?;
        Ok(profile)
    }

    /// Check the structural invariants. Needed after deserializing.
    pub fn validate(&self) -> Result<()> {
        match self {
            FieldProfile::Constant { amplitude } => {
                if !amplitude.is_finite() {
                    return Err(Error::Validation("amplitude must be finite".into()));
                }
            }
            FieldProfile::HalfSine { amplitude, mode } => {
                if !amplitude.is_finite() {
                    return Err(Error::Validation("amplitude must be finite".into()));
                }
                if *mode < 1 {
                    return Err(Error::Validation("mode must be >= 1".into()));
                }
            }
            FieldProfile::Stepwise {
                breakpoints,
                values,
            } => {
                if values.len() != breakpoints.len() + 1 {
                    return Err(Error::Validation(format!(
                        "stepwise profile needs exactly {} values for {} breakpoints, got {}",
                        breakpoints.len() + 1,
                        breakpoints.len(),
                        values.len()
                    )));
                }
                if !values.iter().all(|v| v.is_finite()) {
                    return Err(Error::Validation("stepwise values must be finite".into()));
                }
                let mut prev = 0.0;
                for bp in breakpoints {
                    if !(*bp > prev && *bp < 1.0) {
                        return Err(Error::Validation(format!(
                            "breakpoints must be strictly increasing inside (0, 1), got {bp}"
                        )));
                    }
                    prev = *bp;
                }
            }
        }
        Ok(())
    }

    /// Envelope value at `t` ∈ [0, 1].
    pub fn value(&self, t: f64) -> Result<f64> {
        check_window(t)?;
        Ok(match self {
            FieldProfile::Constant { amplitude } => *amplitude,
            FieldProfile::HalfSine { amplitude, mode } => {
                amplitude * (f64::from(*mode) * std::f64::consts::PI * t).sin()
            }
            FieldProfile::Stepwise {
                breakpoints,
                values,
            } => {
                let idx = breakpoints.partition_point(|bp| *bp <= t);
                values[idx]
            }
        })
    }

    /// Analytic derivative at `t` ∈ [0, 1].
    ///
    /// For stepwise profiles the derivative is undefined exactly at a
    /// breakpoint and a domain error is returned there.
    pub fn derivative(&self, t: f64) -> Result<f64> {
        check_window(t)?;
        Ok(match self {
            FieldProfile::Constant { .. } => 0.0,
            FieldProfile::HalfSine { amplitude, mode } => {
                let w = f64::from(*mode) * std::f64::consts::PI;
                amplitude * w * (w * t).cos()
            }
            FieldProfile::Stepwise { breakpoints, .. } => {
                if breakpoints.contains(&t) {
                    return Err(Error::Domain(format!(
                        "derivative undefined at stepwise breakpoint t = {t}"
                    )));
                }
                0.0
            }
        })
    }

    /// Exact analytic integral over [t0, t1] ⊆ [0, 1].
    pub fn integral(&self, t0: f64, t1: f64) -> f64 {
        debug_assert!((0.0..=1.0).contains(&t0) && t0 <= t1 && t1 <= 1.0);
        match self {
            FieldProfile::Constant { amplitude } => amplitude * (t1 - t0),
            FieldProfile::HalfSine { amplitude, mode } => {
                let w = f64::from(*mode) * std::f64::consts::PI;
                amplitude / w * ((w * t0).cos() - (w * t1).cos())
            }
            FieldProfile::Stepwise {
                breakpoints,
                values,
            } => {
                let mut total = 0.0;
                let mut left = 0.0_f64;
                for (i, value) in values.iter().enumerate() {
                    let right = breakpoints.get(i).copied().unwrap_or(1.0);
                    let lo = left.max(t0);
                    let hi = right.min(t1);
                    if hi > lo {
                        total += value * (hi - lo);
                    }
                    left = right;
                }
                total
            }
        }
    }

    /// Same shape with every amplitude multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        match self {
            FieldProfile::Constant { amplitude } => FieldProfile::Constant {
                amplitude: amplitude * factor,
            },
            FieldProfile::HalfSine { amplitude, mode } => FieldProfile::HalfSine {
                amplitude: amplitude * factor,
                mode: *mode,
            },
            FieldProfile::Stepwise {
                breakpoints,
                values,
            } => FieldProfile::Stepwise {
                breakpoints: breakpoints.clone(),
                values: values.iter().map(|v| v * factor).collect(),
            },
        }
    }
}

/// Speed of light in m/s, used only for physical-unit conversion.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Conversion between physical and dimensionless quantities: time rescales
/// as t' = (mc/d) t, amplitudes and strengths as x' = x d/(mc).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Scaling {
    /// Effective wavelength or system length, meters. Must be positive.
    pub d: f64,
    /// Mode index, >= 1.
    pub m: u32,
    /// Propagation speed, m/s.
    #[serde(default = "default_speed")]
    pub c: f64,
}

fn default_speed() -> f64 {
    SPEED_OF_LIGHT
}

impl Scaling {
    pub fn new(d: f64, m: u32) -> Result<Self> {
        let s = Self {
            d,
            m,
            c: SPEED_OF_LIGHT,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.d > 0.0 && self.d.is_finite()) {
            return Err(Error::Validation("length d must be positive".into()));
        }
        if self.m < 1 {
            return Err(Error::Validation("mode m must be >= 1".into()));
        }
        if !(self.c > 0.0 && self.c.is_finite()) {
            return Err(Error::Validation("speed c must be positive".into()));
        }
        Ok(())
    }

    /// Physical amplitude or strength to its dimensionless counterpart.
    pub fn to_dimensionless(&self, physical: f64) -> f64 {
        physical * self.d / (f64::from(self.m) * self.c)
    }

    /// Dimensionless amplitude or strength back to physical units.
    pub fn from_dimensionless(&self, dimensionless: f64) -> f64 {
        dimensionless * f64::from(self.m) * self.c / self.d
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    #[test]
    fn half_sine_values() {
        let f = FieldProfile::half_sine(1.0, 1).unwrap();
        assert!((f.value(0.5).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(f.value(0.0).unwrap(), 0.0);
        // sin(pi) underflows to ~1e-16 rather than exactly 0.
        assert!(f.value(1.0).unwrap().abs() < 1e-15);

        let f = FieldProfile::half_sine(-3.5, 1).unwrap();
        assert_eq!(f.value(0.0).unwrap(), 0.0);
        assert!((f.value(0.5).unwrap() + 3.5).abs() < 1e-15);
    }

    #[test]
    fn constant_and_window_checks() {
        let f = FieldProfile::constant(2.5);
        assert_eq!(f.value(0.3).unwrap(), 2.5);
        assert_eq!(f.derivative(0.9).unwrap(), 0.0);
        assert!(matches!(f.value(-0.1), Err(Error::Domain(_))));
        assert!(matches!(f.value(1.0001), Err(Error::Domain(_))));
    }

    #[test]
    fn half_sine_derivative_endpoints() {
        let f = FieldProfile::half_sine(1.0, 1).unwrap();
        assert!((f.derivative(0.0).unwrap() - std::f64::consts::PI).abs() < 1e-15);
        assert!(f.derivative(0.5).unwrap().abs() < 1e-15);
    }

    #[test]
    fn derivative_matches_finite_differences() {
        let mut rng = StdRng::seed_from_u64(55);
        let h = 1e-6;
        for _ in 0..1000 {
            let amp = rng.random_range(-5.0..=5.0);
            let f = FieldProfile::half_sine(amp, 1).unwrap();
            let t = rng.random_range(0.01..0.99);
            let fd = (f.value(t + h).unwrap() - f.value(t - h).unwrap()) / (2.0 * h);
            let exact = f.derivative(t).unwrap();
            assert!((fd - exact).abs() < 1e-8, "t={t}, amp={amp}");
        }
    }

    #[test]
    fn stepwise_lookup_and_breakpoint_rules() {
        let f = FieldProfile::stepwise(vec![0.25, 0.5], vec![1.0, -2.0, 3.0]).unwrap();
        assert_eq!(f.value(0.0).unwrap(), 1.0);
        assert_eq!(f.value(0.25).unwrap(), -2.0); // left-closed intervals
        assert_eq!(f.value(0.4999).unwrap(), -2.0);
        assert_eq!(f.value(0.5).unwrap(), 3.0);
        assert_eq!(f.value(1.0).unwrap(), 3.0);

        assert_eq!(f.derivative(0.3).unwrap(), 0.0);
        assert!(matches!(f.derivative(0.25), Err(Error::Domain(_))));

        assert!(FieldProfile::stepwise(vec![0.5, 0.25], vec![1.0, 2.0, 3.0]).is_err());
        assert!(FieldProfile::stepwise(vec![0.0], vec![1.0, 2.0]).is_err());
        assert!(FieldProfile::stepwise(vec![0.5], vec![1.0]).is_err());
    }

    #[test]
    fn integral_closed_forms() {
        let f = FieldProfile::half_sine(1.0, 1).unwrap();
        let expected = 2.0 / std::f64::consts::PI;
        assert!((f.integral(0.0, 1.0) - expected).abs() < 1e-15);
        assert_eq!(f.integral(0.3, 0.3), 0.0);

        let s = FieldProfile::stepwise(vec![0.25, 0.5], vec![1.0, -2.0, 3.0]).unwrap();
        let expected = 1.0 * 0.25 + (-2.0) * 0.25 + 3.0 * 0.5;
        assert!((s.integral(0.0, 1.0) - expected).abs() < 1e-15);
        assert!((s.integral(0.3, 0.6) - ((-2.0) * 0.2 + 3.0 * 0.1)).abs() < 1e-15);
    }

    // Adaptive Simpson quadrature, used only as an independent check of the
    // closed-form integrals.
    fn simpson<F: Fn(f64) -> f64 + Copy>(f: F, a: f64, b: f64) -> f64 {
        fn rule<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> f64 {
            (b - a) / 6.0 * (f(a) + 4.0 * f(0.5 * (a + b)) + f(b))
        }
        fn recurse<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, whole: f64, eps: f64) -> f64 {
            let m = 0.5 * (a + b);
            let left = rule(f, a, m);
            let right = rule(f, m, b);
            if (left + right - whole).abs() <= 15.0 * eps {
                left + right + (left + right - whole) / 15.0
            } else {
                recurse(f, a, m, left, eps / 2.0) + recurse(f, m, b, right, eps / 2.0)
            }
        }
        recurse(&f, a, b, rule(&f, a, b), 1e-12)
    }

    #[test]
    fn integral_matches_quadrature() {
        let mut rng = StdRng::seed_from_u64(77);
        for _ in 0..50 {
            let amp = rng.random_range(-5.0..=5.0);
            let mode = rng.random_range(1..=3);
            let f = FieldProfile::half_sine(amp, mode).unwrap();
            let t0 = rng.random_range(0.0..0.5);
            let t1 = rng.random_range(t0..1.0);
            let numeric = simpson(|t| f.value(t).unwrap(), t0, t1);
            assert!(
                (f.integral(t0, t1) - numeric).abs() < 1e-10,
                "amp={amp} mode={mode} [{t0}, {t1}]"
            );
        }
    }

    #[test]
    fn scaling_roundtrip() {
        let s = Scaling::new(1.0e-2, 1).unwrap();
        assert_eq!(s.to_dimensionless(0.0), 0.0);
        let x = 123.456;
        let roundtrip = s.from_dimensionless(s.to_dimensionless(x));
        assert!((roundtrip - x).abs() < 1e-15 * x.abs());

        // d = m c numerically makes the map the identity.
        let s = Scaling {
            d: 2.0 * SPEED_OF_LIGHT,
            m: 2,
            c: SPEED_OF_LIGHT,
        };
        assert!((s.to_dimensionless(3.25) - 3.25).abs() < 1e-15);

        assert!(Scaling::new(-1.0, 1).is_err());
        assert!(Scaling::new(1.0, 0).is_err());
    }

    #[test]
    fn profile_json_shape() {
        let f = FieldProfile::half_sine(2.0, 1).unwrap();
        let json = serde_json::to_string(&f).unwrap();
        assert_eq!(json, r#"{"kind":"half-sine","amplitude":2.0,"m":1}"#);
        let parsed: FieldProfile = serde_json::from_str(&json).unwrap();
        assert_eq!(parsed, f);

        let parsed: FieldProfile =
            serde_json::from_str(r#"{"kind":"half-sine","amplitude":-1.5}"#).unwrap();
        assert_eq!(parsed, FieldProfile::half_sine(-1.5, 1).unwrap());
    }
}
