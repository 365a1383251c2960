//! Complex 2×2 matrix algebra, the Pauli basis, and the generic gate form.
//!
//! Every evolved sector of the two-qubit dynamics is a (near-)unitary 2×2
//! matrix. Up to a global phase e^{iφ} it can be written as
//!
//! ```text
//!         ( A e^{iϕ}    B e^{iθ} )
//! e^{iφ} (                        ),   A² + B² = 1,  A, B ≥ 0,
//!         ( -B e^{-iθ}  A e^{-iϕ} )
//! ```
//!
//! which is the [`GateForm`] this module extracts from and reconstructs into
//! matrices. Special values of (A, ϕ, θ) realize NOT-, Hadamard- and
//! control-type operations under the block reduction scheme.

use std::convert::TryFrom;
use std::f64::consts::{PI, TAU};
use std::ops::{Add, Index, Mul, Neg, Sub};

use num_complex::Complex64 as C64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Tolerance on A² + B² = 1 for a well-formed [`GateForm`].
pub const GATE_NORM_TOL: f64 = 1e-12;

/// Dense 2×2 complex matrix, row-major storage.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Matrix2C {
    entries: [C64; 4],
}

impl Matrix2C {
    pub fn new(e00: C64, e01: C64, e10: C64, e11: C64) -> Self {
        Self {
            entries: [e00, e01, e10, e11],
        }
    }

    pub fn zero() -> Self {
        Self {
            entries: [C64::ZERO; 4],
        }
    }

    pub fn identity() -> Self {
        Self::new(C64::ONE, C64::ZERO, C64::ZERO, C64::ONE)
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.entries[2 * row + col]
    }

    pub fn entries(&self) -> &[C64; 4] {
        &self.entries
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::new(
            self.entries[0].conj(),
            self.entries[2].conj(),
            self.entries[1].conj(),
            self.entries[3].conj(),
        )
    }

    pub fn det(&self) -> C64 {
        self.entries[0] * self.entries[3] - self.entries[1] * self.entries[2]
    }

    pub fn trace(&self) -> C64 {
        self.entries[0] + self.entries[3]
    }

    pub fn scale(&self, s: C64) -> Self {
        Self::new(
            self.entries[0] * s,
            self.entries[1] * s,
            self.entries[2] * s,
            self.entries[3] * s,
        )
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries
            .iter()
            .map(|e| e.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Largest entrywise absolute value.
    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|e| e.norm()).fold(0.0, f64::max)
    }

    /// Largest entrywise absolute deviation from `other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.entries
            .iter()
            .zip(other.entries.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.entries
            .iter()
            .all(|e| e.re.is_finite() && e.im.is_finite())
    }

    /// 2×2 inverse. Errors on a (numerically) singular matrix.
    pub fn inverse(&self) -> Result<Self> {
        let d = self.det();
        if d.norm() < 1e-300 {
            return Err(Error::Validation("matrix is singular".into()));
        }
        let inv = C64::ONE / d;
        Ok(Self::new(
            self.entries[3] * inv,
            -self.entries[1] * inv,
            -self.entries[2] * inv,
            self.entries[0] * inv,
        ))
    }

    /// Closest unitary in Frobenius norm (polar factor).
    ///
    /// Computes M (M†M)^{-1/2} with the closed-form square root of the 2×2
    /// positive-definite Gram matrix. Errors if M is singular.
    pub fn polar_unitary(&self) -> Result<Self> {
        let gram = self.adjoint() * *self;
        let det = gram.det().re.max(0.0);
        let tr = gram.trace().re;
        let s = det.sqrt();
        let denom = (tr + 2.0 * s).sqrt();
        if !(denom > 0.0) {
            return Err(Error::Validation(
                "polar projection of a singular matrix".into(),
            ));
        }
        // sqrt(G) = (G + sqrt(det G) I) / sqrt(tr G + 2 sqrt(det G))
        let sqrt_gram =
            (gram + Matrix2C::identity().scale(C64::new(s, 0.0))).scale(C64::new(1.0 / denom, 0.0));
        Ok(*self * sqrt_gram.inverse()?)
    }
}

impl Index<(usize, usize)> for Matrix2C {
    type Output = C64;

    fn index(&self, (row, col): (usize, usize)) -> &C64 {
        &self.entries[2 * row + col]
    }
}

impl Add for Matrix2C {
    type Output = Matrix2C;

    fn add(self, rhs: Matrix2C) -> Matrix2C {
        Matrix2C::new(
            self.entries[0] + rhs.entries[0],
            self.entries[1] + rhs.entries[1],
            self.entries[2] + rhs.entries[2],
            self.entries[3] + rhs.entries[3],
        )
    }
}

impl Sub for Matrix2C {
    type Output = Matrix2C;

    fn sub(self, rhs: Matrix2C) -> Matrix2C {
        Matrix2C::new(
            self.entries[0] - rhs.entries[0],
            self.entries[1] - rhs.entries[1],
            self.entries[2] - rhs.entries[2],
            self.entries[3] - rhs.entries[3],
        )
    }
}

impl Neg for Matrix2C {
    type Output = Matrix2C;

    fn neg(self) -> Matrix2C {
        self.scale(-C64::ONE)
    }
}

impl Mul for Matrix2C {
    type Output = Matrix2C;

    fn mul(self, rhs: Matrix2C) -> Matrix2C {
        let a = &self.entries;
        let b = &rhs.entries;
        Matrix2C::new(
            a[0] * b[0] + a[1] * b[2],
            a[0] * b[1] + a[1] * b[3],
            a[2] * b[0] + a[3] * b[2],
            a[2] * b[1] + a[3] * b[3],
        )
    }
}

impl Mul<C64> for Matrix2C {
    type Output = Matrix2C;

    fn mul(self, rhs: C64) -> Matrix2C {
        self.scale(rhs)
    }
}

impl Mul<f64> for Matrix2C {
    type Output = Matrix2C;

    fn mul(self, rhs: f64) -> Matrix2C {
        self.scale(C64::new(rhs, 0.0))
    }
}

/// Index into the Pauli basis σ0 (identity), σ1, σ2, σ3.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PauliIndex {
    Identity,
    X,
    Y,
    Z,
}

impl PauliIndex {
    pub fn index(self) -> u8 {
        match self {
            PauliIndex::Identity => 0,
            PauliIndex::X => 1,
            PauliIndex::Y => 2,
            PauliIndex::Z => 3,
        }
    }
}

impl TryFrom<u8> for PauliIndex {
    type Error = Error;

    fn try_from(value: u8) -> Result<Self> {
        match value {
            0 => Ok(PauliIndex::Identity),
            1 => Ok(PauliIndex::X),
            2 => Ok(PauliIndex::Y),
            3 => Ok(PauliIndex::Z),
            other => Err(Error::Domain(format!(
                "Pauli index must be in 0..=3, got {other}"
            ))),
        }
    }
}

/// The Pauli matrix σ_i in the standard convention (σ1σ2 = iσ3).
pub fn pauli(index: PauliIndex) -> Matrix2C {
    let one = C64::ONE;
    let i = C64::I;
    match index {
        PauliIndex::Identity => Matrix2C::new(one, C64::ZERO, C64::ZERO, one),
        PauliIndex::X => Matrix2C::new(C64::ZERO, one, one, C64::ZERO),
        PauliIndex::Y => Matrix2C::new(C64::ZERO, -i, i, C64::ZERO),
        PauliIndex::Z => Matrix2C::new(one, C64::ZERO, C64::ZERO, -one),
    }
}

/// The in-block field generator σ_q = -(q-2) σ1 + (q-1) σ2 for q ∈ {1, 2}.
pub fn sigma_q(q: u8) -> Result<Matrix2C> {
    if q != 1 && q != 2 {
        return Err(Error::Domain(format!("q must be 1 or 2, got {q}")));
    }
    let q = q as f64;
    Ok(pauli(PauliIndex::X) * -(q - 2.0) + pauli(PauliIndex::Y) * (q - 1.0))
}

/// Which Pauli axis the field drives inside a block: σ1 (q = 1) or σ2 (q = 2).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SigmaAxis {
    X,
    Y,
}

impl SigmaAxis {
    pub fn index(self) -> u8 {
        match self {
            SigmaAxis::X => 1,
            SigmaAxis::Y => 2,
        }
    }

    pub fn matrix(self) -> Matrix2C {
        // Infallible: index() is always 1 or 2.
        sigma_q(self.index()).expect("valid sigma axis")
    }
}

impl TryFrom<u8> for SigmaAxis {
    type Error = Error;

    fn try_from(value: u8) -> Result<Self> {
        match value {
            1 => Ok(SigmaAxis::X),
            2 => Ok(SigmaAxis::Y),
            other => Err(Error::Domain(format!("q must be 1 or 2, got {other}"))),
        }
    }
}

impl Serialize for SigmaAxis {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_u8(self.index())
    }
}

impl<'de> Deserialize<'de> for SigmaAxis {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let value = u8::deserialize(deserializer)?;
        SigmaAxis::try_from(value).map_err(serde::de::Error::custom)
    }
}

/// Frobenius norm of U†U - I. Zero iff U is exactly unitary.
pub fn unitarity_defect(u: &Matrix2C) -> f64 {
    (u.adjoint() * *u - Matrix2C::identity()).frobenius_norm()
}

/// Wrap an angle into the principal branch (-π, π].
pub fn wrap_angle(x: f64) -> f64 {
    let y = x.rem_euclid(TAU);
    if y > PI {
        y - TAU
    } else {
        y
    }
}

/// Global phase plus SU(2) parameters (φ, A, B, ϕ, θ) of a unitary block.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GateForm {
    /// Global phase φ, radians in (-π, π].
    pub global_phase: f64,
    /// Diagonal amplitude A ≥ 0.
    pub a: f64,
    /// Off-diagonal amplitude B ≥ 0, A² + B² = 1.
    pub b: f64,
    /// Diagonal phase ϕ, radians in (-π, π].
    pub phi: f64,
    /// Off-diagonal phase θ, radians in (-π, π].
    pub theta: f64,
}

impl GateForm {
    pub fn new(global_phase: f64, a: f64, b: f64, phi: f64, theta: f64) -> Result<Self> {
        let form = Self {
            global_phase,
            a,
            b,
            phi,
            theta,
        };
        form.validate()?;
        Ok(form)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.a >= 0.0 && self.b >= 0.0) {
            return Err(Error::Validation(format!(
                "gate amplitudes must be non-negative, got A={}, B={}",
                self.a, self.b
            )));
        }
        let norm = self.a * self.a + self.b * self.b;
        if (norm - 1.0).abs() > GATE_NORM_TOL {
            return Err(Error::Validation(format!(
                "gate amplitudes must satisfy A^2 + B^2 = 1, got {norm}"
            )));
        }
        for (name, angle) in [
            ("global phase", self.global_phase),
            ("phi", self.phi),
            ("theta", self.theta),
        ] {
            if !angle.is_finite() || angle <= -PI || angle > PI {
                return Err(Error::Validation(format!(
                    "{name} must lie in (-pi, pi], got {angle}"
                )));
            }
        }
        Ok(())
    }
}

/// Parameters (φ, A, B, ϕ, θ) of a unitary 2×2 matrix.
///
/// Conventions: φ = ½ Arg(det U) on the principal branch; A and B are the
/// moduli of the first row of e^{-iφ}U (normalized so A² + B² = 1 exactly);
/// ϕ and θ are the arguments of those entries. When an amplitude is ≤ `tol`
/// its phase is undefined and reported as 0.
///
/// Errors if ‖U†U - I‖_F exceeds `tol`.
pub fn extract_gate_form(u: &Matrix2C, tol: f64) -> Result<GateForm> {
    let defect = unitarity_defect(u);
    if !(defect <= tol) {
        return Err(Error::Validation(format!(
            "matrix is not unitary: defect {defect:.3e} exceeds tolerance {tol:.3e}"
        )));
    }
    let det = u.det();
    if det.norm() == 0.0 {
        return Err(Error::Validation("matrix has zero determinant".into()));
    }
    let mut arg_det = det.arg();
    if arg_det <= -PI {
        arg_det = PI;
    }
    let global_phase = arg_det / 2.0;
    let v = u.scale(C64::from_polar(1.0, -global_phase));
    let a_raw = v.get(0, 0).norm();
    let b_raw = v.get(0, 1).norm();
    let norm = a_raw.hypot(b_raw);
    if norm == 0.0 {
        return Err(Error::Validation("matrix has a zero first row".into()));
    }
    let a = a_raw / norm;
    let b = b_raw / norm;
    let phi = if a <= tol {
        0.0
    } else {
        wrap_angle(v.get(0, 0).arg())
    };
    let theta = if b <= tol {
        0.0
    } else {
        wrap_angle(v.get(0, 1).arg())
    };
    GateForm::new(wrap_angle(global_phase), a, b, phi, theta)
}

/// The unitary e^{iφ} [[A e^{iϕ}, B e^{iθ}], [-B e^{-iθ}, A e^{-iϕ}]].
///
/// Errors if `g` violates the gate-form invariants.
pub fn reconstruct_gate_form(g: &GateForm) -> Result<Matrix2C> {
    g.validate()?;
    let phase = C64::from_polar(1.0, g.global_phase);
    let d = C64::from_polar(g.a, g.phi);
    let o = C64::from_polar(g.b, g.theta);
    Ok(Matrix2C::new(
        phase * d,
        phase * o,
        phase * -o.conj(),
        phase * d.conj(),
    ))
}
