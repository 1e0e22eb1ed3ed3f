//! Linearization at the two stationary points `(0, 0)` and `(z, z)`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::SystemModel;

pub type Matrix2 = [[f64; 2]; 2];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EigenPair {
    pub value: f64,
    pub vector: [f64; 2],
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OriginLinearization {
    pub jacobian: Matrix2,
    /// Stable pair `(-1, [1, 0])` then unstable pair `(a0, [1, a0 + 1])`.
    pub eigenpairs: [EigenPair; 2],
    /// Limit of `y/x` along the unstable manifold, `a0 + 1`.
    pub unstable_slope: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OriginClass {
    SaddleAtOrigin,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InteriorClass {
    StableSpiral,
    StableNode,
    Unstable,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InteriorLinearization {
    pub jacobian: Matrix2,
    pub eigenvalues: [Complex64; 2],
    /// `(1 - a(z))^2 - 4 z r(z)`.
    pub discriminant: f64,
    pub classification: InteriorClass,
    /// `a(z) > -1`.
    pub asymptotically_stable: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    pub origin: OriginClass,
    pub interior: InteriorClass,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub origin: OriginLinearization,
    pub interior: InteriorLinearization,
    pub classification: Classification,
}

pub fn linearize_origin(model: &SystemModel) -> OriginLinearization {
    let a0 = model.a0();
    OriginLinearization {
        jacobian: [[-1.0, 1.0], [0.0, a0]],
        eigenpairs: [
            EigenPair {
                value: -1.0,
                vector: [1.0, 0.0],
            },
            EigenPair {
                value: a0,
                vector: [1.0, a0 + 1.0],
            },
        ],
        unstable_slope: a0 + 1.0,
    }
}

pub fn interior_jacobian(model: &SystemModel) -> Matrix2 {
    let z = model.z();
    [
        [-1.0, 1.0],
        [
            model.da(z) * z - model.db(z) * z * z,
            model.a(z) - 2.0 * model.b(z) * z,
        ],
    ]
}

pub fn linearize_interior(model: &SystemModel) -> InteriorLinearization {
    let z = model.z();
    let az = model.a(z);
    let r = model.equilibrium().r_at_z;
    let discriminant = (1.0 - az).powi(2) - 4.0 * z * r;
    let root = Complex64::new(discriminant, 0.0).sqrt();
    let half_trace = Complex64::new(-0.5 * (1.0 + az), 0.0);
    let eigenvalues = [half_trace + 0.5 * root, half_trace - 0.5 * root];

    let stable = eigenvalues.iter().all(|l| l.re < 0.0);
    let classification = match (stable, discriminant < 0.0) {
        (false, _) => InteriorClass::Unstable,
        (true, true) => InteriorClass::StableSpiral,
        (true, false) => InteriorClass::StableNode,
    };
    InteriorLinearization {
        jacobian: interior_jacobian(model),
        eigenvalues,
        discriminant,
        classification,
        asymptotically_stable: az > -1.0,
    }
}

pub fn analyze(model: &SystemModel) -> StabilityReport {
    let origin = linearize_origin(model);
    let interior = linearize_interior(model);
    StabilityReport {
        origin,
        interior,
        classification: Classification {
            origin: OriginClass::SaddleAtOrigin,
            interior: interior.classification,
        },
    }
}

/// Central-difference Jacobian of the field at `(x, y)`.
pub fn jacobian_fd(model: &SystemModel, x: f64, y: f64, h: f64) -> Result<Matrix2> {
    if !(h > 0.0) {
        return Err(Error::InvalidInput(format!(
            "step h = {h} must be positive"
        )));
    }
    model.check_domain(x)?;
    model.check_domain(x + h)?;
    let f = |x, y| model.field(x, y);
    let (xp, xm) = (f(x + h, y), f(x - h, y));
    let (yp, ym) = (f(x, y + h), f(x, y - h));
    let inv = 0.5 / h;
    Ok([
        [(xp.0 - xm.0) * inv, (yp.0 - ym.0) * inv],
        [(xp.1 - xm.1) * inv, (yp.1 - ym.1) * inv],
    ])
}

/// Eigenvalues of a real 2x2 matrix from its characteristic polynomial.
pub fn eigenvalues_2x2(m: &Matrix2) -> [Complex64; 2] {
    let tr = m[0][0] + m[1][1];
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    let root = Complex64::new(tr * tr - 4.0 * det, 0.0).sqrt();
    [0.5 * (tr + root), 0.5 * (tr - root)]
}
