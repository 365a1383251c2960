//! Stepped propagators for one 2×2 sector, closed-form oracles, and a
//! refined high-accuracy reference.
//!
//! The sector evolution generator is L(t) = 𝒥 σ3 + B(t) σ_q, so a short
//! interval [t0, t0 + δt] propagates (to second order in δt) as
//!
//! ```text
//! S = σ0 + i L(t0) δt - ½ Q(t0) δt²,
//! Q = (𝒥² + B(t0)²) σ0 - i B'(t0) σ_q ,
//! ```
//!
//! with the field and its derivative sampled at the left endpoint. The full
//! window [0, 1] is split into n uniform intervals and the step factors are
//! stacked on the left; the constant part of the sector Hamiltonian only
//! contributes the global phase e^{i s0 𝒥0}, attached once at the end.
//!
//! The truncated schemes are deliberately not re-unitarized: the benchmark
//! measures the raw first- and second-order steps. [`Matrix2C::polar_unitary`]
//! is available for callers who want a projected result, and the
//! [`reference`] propagator applies it after Richardson refinement.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::FieldProfile;
use crate::model::BlockParams;
use crate::su2::{Matrix2C, SigmaAxis};

/// Truncation order of the differential step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StepOrder {
    Linear,
    Quadratic,
}

impl StepOrder {
    pub const BOTH: [StepOrder; 2] = [StepOrder::Linear, StepOrder::Quadratic];

    pub fn label(self) -> &'static str {
        match self {
            StepOrder::Linear => "linear",
            StepOrder::Quadratic => "quadratic",
        }
    }
}

/// Everything needed to evolve one sector over the gate window [0, 1].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvolutionSpec {
    pub block: BlockParams,
    /// The combined drive B(t) seen by this sector (before `field_sign`).
    pub field: FieldProfile,
    /// Number of uniform subintervals, >= 1.
    pub n: usize,
    pub order: StepOrder,
    /// Premultiply the result by the global phase e^{i s0 𝒥0}.
    pub attach_global_phase: bool,
}

/// Combination c0 σ0 + cq σ_q + c3 σ3 without building the basis matrices.
fn axis_combination(c0: C64, cq: C64, c3: C64, q: SigmaAxis) -> Matrix2C {
    let (e01, e10) = match q {
        SigmaAxis::X => (cq, cq),
        SigmaAxis::Y => (-C64::I * cq, C64::I * cq),
    };
    Matrix2C::new(c0 + c3, e01, e10, c0 - c3)
}

/// One differential step over [t0, t0 + dt], field sampled at t0.
pub fn step(
    block: &BlockParams,
    field: &FieldProfile,
    t0: f64,
    dt: f64,
    order: StepOrder,
) -> Result<Matrix2C> {
    if !(dt > 0.0) {
        return Err(Error::Domain(format!(
            "step length must be positive, got {dt}"
        )));
    }
    if !(0.0..=1.0).contains(&t0) || t0 + dt > 1.0 + 1e-9 {
        return Err(Error::Domain(format!(
            "step [{t0}, {}] leaves the gate window [0, 1]",
            t0 + dt
        )));
    }
    let j = block.j_eff;
    let b = block.field_sign * field.value(t0)?;
    match order {
        StepOrder::Linear => {
            // sigma0 + i L dt
            let c0 = C64::ONE;
            let cq = C64::new(0.0, b * dt);
            let c3 = C64::new(0.0, j * dt);
            Ok(axis_combination(c0, cq, c3, block.q))
        }
        StepOrder::Quadratic => {
            let b_dot = block.field_sign * field.derivative(t0)?;
            // sigma0 + i L dt - ½ [(𝒥² + B²) σ0 - i B' σ_q] dt²
            let c0 = C64::new(1.0 - 0.5 * (j * j + b * b) * dt * dt, 0.0);
            let cq = C64::new(0.0, b * dt + 0.5 * b_dot * dt * dt);
            let c3 = C64::new(0.0, j * dt);
            Ok(axis_combination(c0, cq, c3, block.q))
        }
    }
}

/// Ordered product of n left-stacked steps over the uniform partition of
/// [0, 1], with the optional global phase attached once at the end.
pub fn evolve(spec: &EvolutionSpec) -> Result<Matrix2C> {
    if spec.n == 0 {
        return Err(Error::Validation("partition count must be >= 1".into()));
    }
    let n = spec.n as f64;
    let dt = 1.0 / n;
    let mut u = Matrix2C::identity();
    for i in 0..spec.n {
        let t0 = i as f64 / n;
        u = step(&spec.block, &spec.field, t0, dt, spec.order)? * u;
    }
    if spec.attach_global_phase {
        let phase = C64::from_polar(1.0, f64::from(spec.block.signs.s0) * spec.block.j0);
        u = u.scale(phase);
    }
    Ok(u)
}

/// Closed-form propagator for a constant drive value over a window of
/// length `t`: cos(Ωt) σ0 + i sin(Ωt)/Ω (𝒥 σ3 + b σ_q) with Ω = √(𝒥² + b²).
///
/// `b_value` is the sign-absorbed drive (field_sign already applied). The
/// global phase is not included.
pub fn exact_constant(block: &BlockParams, b_value: f64, t: f64) -> Matrix2C {
    let j = block.j_eff;
    let omega = j.hypot(b_value);
    if omega == 0.0 {
        return Matrix2C::identity();
    }
    let (sin, cos) = (omega * t).sin_cos();
    let s = sin / omega;
    axis_combination(
        C64::new(cos, 0.0),
        C64::new(0.0, s * b_value),
        C64::new(0.0, s * j),
        block.q,
    )
}

/// Closed-form propagator for a sector with 𝒥 = 0, where the generator
/// commutes with itself at all times: cos(Φ) σ0 + i sin(Φ) σ_q with
/// Φ = ∫₀¹ field_sign · B(t) dt.
pub fn exact_commuting(block: &BlockParams, field: &FieldProfile) -> Result<Matrix2C> {
    if block.j_eff != 0.0 {
        return Err(Error::Precondition(format!(
            "commuting closed form requires J_eff = 0, got {}",
            block.j_eff
        )));
    }
    let phase = block.field_sign * field.integral(0.0, 1.0);
    let (sin, cos) = phase.sin_cos();
    Ok(axis_combination(
        C64::new(cos, 0.0),
        C64::new(0.0, sin),
        C64::ZERO,
        block.q,
    ))
}

/// Base partition count of the refined reference.
const REFERENCE_BASE_N: usize = 10_000;
/// Largest partition count the reference may reach.
const REFERENCE_MAX_N: usize = 1 << 20;

/// High-accuracy reference propagator.
///
/// Runs the quadratic scheme at n, 2n, 4n, ... starting from 10⁴,
/// Richardson-extrapolates successive pairs, and stops when consecutive
/// extrapolants agree to tol/10 entrywise. The result is polar-projected
/// onto the unitary group, so ‖U†U - I‖_F ≤ 1e-12 on success.
pub fn reference(
    block: &BlockParams,
    field: &FieldProfile,
    attach_global_phase: bool,
    tol: f64,
) -> Result<Matrix2C> {
    let spec_at = |n: usize| EvolutionSpec {
        block: *block,
        field: field.clone(),
        n,
        order: StepOrder::Quadratic,
        attach_global_phase,
    };
    let mut n = REFERENCE_BASE_N;
    let mut coarse = evolve(&spec_at(n))?;
    let mut fine = evolve(&spec_at(2 * n))?;
    // Quadratic scheme: (4 U_{2n} - U_n) / 3 cancels the leading 1/n² term.
    let mut extrapolant = (fine * 4.0 - coarse).scale(C64::new(1.0 / 3.0, 0.0));
    while 4 * n <= REFERENCE_MAX_N {
        n *= 2;
        coarse = fine;
        fine = evolve(&spec_at(2 * n))?;
        let next = (fine * 4.0 - coarse).scale(C64::new(1.0 / 3.0, 0.0));
        let diff = next.max_abs_diff(&extrapolant);
        extrapolant = next;
        if diff < tol / 10.0 {
            return extrapolant.polar_unitary();
        }
    }
    Err(Error::Convergence(format!(
        "reference did not stabilize to {tol:.1e} within {REFERENCE_MAX_N} steps"
    )))
}
