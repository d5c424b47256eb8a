use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{bloch_operator, c, identity2, Mat2, Vec3};

/// Tolerance on `|a| = 1` for a measurement axis.
pub const AXIS_TOL: f64 = 1e-12;
/// Tolerance on `a·a' = 0` for complementarity.
pub const COMPLEMENTARITY_TOL: f64 = 1e-9;

/// Two-outcome projective qubit measurement along a Bloch axis.
///
/// Outcome `+` is `(𝟙 + a·σ)/2` and outcome `−` is `(𝟙 − a·σ)/2`. The axes
/// `a` and `−a` describe the same measurement with swapped labels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 3]", into = "[f64; 3]")]
pub struct QubitMeasurement {
    axis: Vec3,
}

impl QubitMeasurement {
    pub fn new(axis: Vec3) -> Result<Self> {
        let norm = axis.norm();
        if !norm.is_finite() || (norm - 1.0).abs() > AXIS_TOL {
            return Err(Error::NotUnitAxis { norm });
        }
        Ok(Self { axis })
    }

    /// Normalizes `direction` to a unit axis.
    pub fn along(direction: Vec3) -> Result<Self> {
        let norm = direction.norm();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::NotUnitAxis { norm });
        }
        Ok(Self {
            axis: direction / norm,
        })
    }

    /// Linear polarization basis `{cosϑ|H⟩ + sinϑ|V⟩, sinϑ|H⟩ − cosϑ|V⟩}`, ϑ in degrees.
    pub fn from_polarization_angle(theta_deg: f64) -> Self {
        let two_theta = (2.0 * theta_deg).to_radians();
        Self {
            axis: Vec3::new(two_theta.sin(), 0.0, two_theta.cos()),
        }
    }

    /// H/V basis.
    pub fn horizontal_vertical() -> Self {
        Self { axis: Vec3::z() }
    }

    /// X/Y basis, rotated by 45° from H/V.
    pub fn diagonal() -> Self {
        Self { axis: Vec3::x() }
    }

    pub fn axis(&self) -> Vec3 {
        self.axis
    }

    pub fn flipped(&self) -> Self {
        Self { axis: -self.axis }
    }

    pub fn projector_plus(&self) -> Mat2 {
        (identity2() + bloch_operator(&self.axis)) * c(0.5, 0.0)
    }

    pub fn projector_minus(&self) -> Mat2 {
        (identity2() - bloch_operator(&self.axis)) * c(0.5, 0.0)
    }

    /// True when the Bloch axes are orthogonal within [`COMPLEMENTARITY_TOL`].
    pub fn is_complementary_to(&self, other: &Self) -> bool {
        self.axis.dot(&other.axis).abs() <= COMPLEMENTARITY_TOL
    }
}

pub fn are_complementary(a: &QubitMeasurement, b: &QubitMeasurement) -> bool {
    a.is_complementary_to(b)
}

impl TryFrom<[f64; 3]> for QubitMeasurement {
    type Error = Error;

    fn try_from(v: [f64; 3]) -> Result<Self> {
        Self::new(Vec3::from(v))
    }
}

impl From<QubitMeasurement> for [f64; 3] {
    fn from(m: QubitMeasurement) -> Self {
        [m.axis[0], m.axis[1], m.axis[2]]
    }
}
