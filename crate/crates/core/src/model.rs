//! The planar family `x' = y - x`, `y' = a(x) y - b(x) y^2`.
//!
//! Four coefficient laws are available, each with closed-form `a`, `b`, their
//! derivatives and primitives. Primitives are normalized so that `A(z) = 0`
//! and `B(z) = 0` at the interior stationary point `z`, which removes every
//! additive constant from the Lyapunov function and the bound function `H`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::roots::{brent, expand_upper, ROOT_TOL};

/// Points closer than this to `x_max` are rejected.
pub const DOMAIN_GUARD: f64 = 1e-12;

/// Below this distance from `z`, `r` is evaluated through its limit.
pub const SINGULARITY_GUARD: f64 = 1e-7;

/// Closed forms and bracketed roots must agree to this.
const CLOSED_FORM_TOL: f64 = 1e-10;

/// Start of the bracket walk for structural roots.
const BRACKET_START: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    /// `a = 2 - x`, `b = 0`: isothermal self-gravitating particles.
    Nonrelativistic,
    /// `a = (2-3x)/(1-x)`, `b = 1/(1-x)`: TOV with `p = c^2 rho`.
    StiffRelativistic,
    /// The stiff law with `x` rescaled by `1/sigma` (default `sigma = 8 pi`).
    ScaledRelativistic,
    /// TOV with `p = kappa c^2 rho`, `0 < kappa <= 1`.
    KappaFamily,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub family: Family,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappa: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scale: Option<f64>,
}

impl ModelSpec {
    pub const DEFAULT_SCALE: f64 = 8.0 * PI;

    pub fn nonrelativistic() -> Self {
        Self {
            family: Family::Nonrelativistic,
            kappa: None,
            scale: None,
        }
    }

    pub fn stiff() -> Self {
        Self {
            family: Family::StiffRelativistic,
            kappa: None,
            scale: None,
        }
    }

    pub fn scaled(scale: f64) -> Self {
        Self {
            family: Family::ScaledRelativistic,
            kappa: None,
            scale: Some(scale),
        }
    }

    pub fn kappa(kappa: f64) -> Self {
        Self {
            family: Family::KappaFamily,
            kappa: Some(kappa),
            scale: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self.family {
            Family::KappaFamily => {
                let k = self
                    .kappa
                    .ok_or_else(|| Error::InvalidSpec("kappa family requires kappa".into()))?;
                if !(k > 0.0 && k <= 1.0) {
                    return Err(Error::InvalidSpec(format!("kappa = {k} not in (0, 1]")));
                }
            }
            Family::ScaledRelativistic => {
                let s = self.scale.unwrap_or(Self::DEFAULT_SCALE);
                if !(s > 0.0 && s.is_finite()) {
                    return Err(Error::InvalidSpec(format!("scale = {s} must be positive")));
                }
            }
            Family::Nonrelativistic | Family::StiffRelativistic => {}
        }
        Ok(())
    }
}

/// Interior stationary point and the constants derived from it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumData {
    /// Interior stationary point `(z, z)`.
    pub z: f64,
    /// Abscissa where the unstable tangent `y = (a0+1)x` meets the `y' = 0` isocline.
    pub w: f64,
    /// Zero of `a`.
    pub x0: f64,
    /// `r(z) = z b'(z) - a'(z)`.
    pub r_at_z: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Law {
    Nonrelativistic,
    Stiff,
    Scaled { sigma: f64 },
    Kappa { kappa: f64 },
}

impl Law {
    fn a(self, x: f64) -> f64 {
        match self {
            Law::Nonrelativistic => 2.0 - x,
            Law::Stiff => (2.0 - 3.0 * x) / (1.0 - x),
            Law::Scaled { sigma } => (2.0 - 3.0 * sigma * x) / (1.0 - sigma * x),
            Law::Kappa { kappa } => {
                (4.0 * kappa - (1.0 + 5.0 * kappa) * x) / (2.0 * kappa * (1.0 - x))
            }
        }
    }

    fn b(self, x: f64) -> f64 {
        match self {
            Law::Nonrelativistic => 0.0,
            Law::Stiff => 1.0 / (1.0 - x),
            Law::Scaled { sigma } => sigma / (1.0 - sigma * x),
            Law::Kappa { kappa } => 0.5 * (1.0 + kappa) / (1.0 - x),
        }
    }

    fn da(self, x: f64) -> f64 {
        match self {
            Law::Nonrelativistic => -1.0,
            Law::Stiff => -1.0 / ((1.0 - x) * (1.0 - x)),
            Law::Scaled { sigma } => {
                let u = 1.0 - sigma * x;
                -sigma / (u * u)
            }
            Law::Kappa { kappa } => -(1.0 + kappa) / (2.0 * kappa * (1.0 - x) * (1.0 - x)),
        }
    }

    fn db(self, x: f64) -> f64 {
        match self {
            Law::Nonrelativistic => 0.0,
            Law::Stiff => 1.0 / ((1.0 - x) * (1.0 - x)),
            Law::Scaled { sigma } => {
                let u = 1.0 - sigma * x;
                sigma * sigma / (u * u)
            }
            Law::Kappa { kappa } => 0.5 * (1.0 + kappa) / ((1.0 - x) * (1.0 - x)),
        }
    }

    /// Un-normalized primitive of `a`.
    fn prim_a(self, x: f64) -> f64 {
        match self {
            Law::Nonrelativistic => 2.0 * x - 0.5 * x * x,
            Law::Stiff => 3.0 * x + (-x).ln_1p(),
            Law::Scaled { sigma } => 3.0 * x + (-sigma * x).ln_1p() / sigma,
            Law::Kappa { kappa } => {
                let s = (1.0 + kappa) / (2.0 * kappa);
                (2.0 + s) * x + s * (-x).ln_1p()
            }
        }
    }

    /// Un-normalized primitive of `b`.
    fn prim_b(self, x: f64) -> f64 {
        match self {
            Law::Nonrelativistic => 0.0,
            Law::Stiff => -(-x).ln_1p(),
            Law::Scaled { sigma } => -(-sigma * x).ln_1p(),
            Law::Kappa { kappa } => -0.5 * (1.0 + kappa) * (-x).ln_1p(),
        }
    }

    fn x_max(self) -> f64 {
        match self {
            Law::Nonrelativistic => f64::INFINITY,
            Law::Stiff | Law::Kappa { .. } => 1.0,
            Law::Scaled { sigma } => 1.0 / sigma,
        }
    }

    fn b_vanishes(self) -> bool {
        matches!(self, Law::Nonrelativistic)
    }

    fn z_closed(self) -> f64 {
        match self {
            Law::Nonrelativistic => 2.0,
            Law::Stiff => 0.5,
            Law::Scaled { sigma } => 0.5 / sigma,
            Law::Kappa { kappa } => 4.0 * kappa / ((kappa + 1.0).powi(2) + 4.0 * kappa),
        }
    }

    fn w_closed(self) -> f64 {
        match self {
            Law::Nonrelativistic => 2.0,
            Law::Stiff => 1.0 / 3.0,
            Law::Scaled { sigma } => 1.0 / (3.0 * sigma),
            Law::Kappa { kappa } => 4.0 * kappa / (3.0 * kappa * kappa + 8.0 * kappa + 1.0),
        }
    }

    fn x0_closed(self) -> f64 {
        match self {
            Law::Nonrelativistic => 2.0,
            Law::Stiff => 2.0 / 3.0,
            Law::Scaled { sigma } => 2.0 / (3.0 * sigma),
            Law::Kappa { kappa } => 4.0 * kappa / (1.0 + 5.0 * kappa),
        }
    }
}

/// A fully constructed model: coefficient law, normalized primitives and the
/// equilibrium constants. Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemModel {
    spec: ModelSpec,
    law: Law,
    a_at_z: f64,
    b_at_z: f64,
    eq: EquilibriumData,
}

/// Build a model for one of the four coefficient laws.
pub fn make_model(spec: ModelSpec) -> Result<SystemModel> {
    spec.validate()?;
    let law = match spec.family {
        Family::Nonrelativistic => Law::Nonrelativistic,
        Family::StiffRelativistic => Law::Stiff,
        Family::ScaledRelativistic => Law::Scaled {
            sigma: spec.scale.unwrap_or(ModelSpec::DEFAULT_SCALE),
        },
        Family::KappaFamily => Law::Kappa {
            kappa: spec.kappa.unwrap_or(1.0),
        },
    };
    let spec = match spec.family {
        Family::ScaledRelativistic => ModelSpec {
            scale: Some(spec.scale.unwrap_or(ModelSpec::DEFAULT_SCALE)),
            ..spec
        },
        _ => spec,
    };
    let z = law.z_closed();
    let mut model = SystemModel {
        spec,
        law,
        a_at_z: law.prim_a(z),
        b_at_z: law.prim_b(z),
        eq: EquilibriumData {
            z,
            w: f64::NAN,
            x0: f64::NAN,
            r_at_z: f64::NAN,
        },
    };
    model.eq.z = find_z(&model)?;
    model.eq.r_at_z = z * law.db(z) - law.da(z);
    model.eq.w = find_w(&model)?;
    model.eq.x0 = find_x0(&model)?;
    Ok(model)
}

impl SystemModel {
    pub fn new(spec: ModelSpec) -> Result<Self> {
        make_model(spec)
    }

    pub fn spec(&self) -> ModelSpec {
        self.spec
    }

    pub fn family(&self) -> Family {
        self.spec.family
    }

    /// `sigma` for the scaled law, 1 otherwise.
    pub fn scale(&self) -> f64 {
        match self.law {
            Law::Scaled { sigma } => sigma,
            _ => 1.0,
        }
    }

    pub fn kappa(&self) -> Option<f64> {
        match self.law {
            Law::Kappa { kappa } => Some(kappa),
            _ => None,
        }
    }

    pub fn a(&self, x: f64) -> f64 {
        self.law.a(x)
    }

    pub fn b(&self, x: f64) -> f64 {
        self.law.b(x)
    }

    pub fn da(&self, x: f64) -> f64 {
        self.law.da(x)
    }

    pub fn db(&self, x: f64) -> f64 {
        self.law.db(x)
    }

    /// Primitive of `a` with `A(z) = 0`.
    pub fn prim_a(&self, x: f64) -> f64 {
        self.law.prim_a(x) - self.a_at_z
    }

    /// Primitive of `b` with `B(z) = 0`.
    pub fn prim_b(&self, x: f64) -> f64 {
        self.law.prim_b(x) - self.b_at_z
    }

    pub fn x_max(&self) -> f64 {
        self.law.x_max()
    }

    pub fn a0(&self) -> f64 {
        self.law.a(0.0)
    }

    /// Slope `a0 + 1` of the unstable direction at the origin.
    pub fn unstable_slope(&self) -> f64 {
        self.a0() + 1.0
    }

    pub fn z(&self) -> f64 {
        self.eq.z
    }

    pub fn equilibrium(&self) -> EquilibriumData {
        self.eq
    }

    /// True when `b` vanishes identically (the degenerate `w = z = x0` case).
    pub fn b_vanishes(&self) -> bool {
        self.law.b_vanishes()
    }

    /// Largest admissible `x` (strictly below the pole by [`DOMAIN_GUARD`]).
    pub fn x_limit(&self) -> f64 {
        self.x_max() - DOMAIN_GUARD
    }

    pub fn in_domain(&self, x: f64) -> bool {
        x >= 0.0 && x < self.x_limit()
    }

    pub fn check_domain(&self, x: f64) -> Result<()> {
        if self.in_domain(x) {
            Ok(())
        } else {
            Err(Error::Domain {
                x,
                x_max: self.x_max(),
            })
        }
    }

    /// Right-hand side without domain checks.
    #[inline]
    pub fn field(&self, x: f64, y: f64) -> (f64, f64) {
        (y - x, self.law.a(x) * y - self.law.b(x) * y * y)
    }

    /// `r(x)` without domain checks.
    pub fn r(&self, x: f64) -> f64 {
        let z = self.eq.z;
        if (x - z).abs() < SINGULARITY_GUARD {
            self.eq.r_at_z
        } else {
            (z * self.law.b(x) - self.law.a(x)) / (x - z)
        }
    }
}

/// Evaluate the vector field at `(x, y)`.
pub fn eval_field(model: &SystemModel, x: f64, y: f64) -> Result<(f64, f64)> {
    model.check_domain(x)?;
    if y < 0.0 {
        return Err(Error::InvalidInput(format!("y = {y} must be nonnegative")));
    }
    Ok(model.field(x, y))
}

/// `r(x)` from `z b(x) - a(x) = -r(x) (z - x)`, with the removable singularity
/// at `x = z` replaced by `z b'(z) - a'(z)`.
pub fn r_factor(model: &SystemModel, x: f64) -> Result<f64> {
    model.check_domain(x)?;
    Ok(model.r(x))
}

/// Positive root of `a(x) = x b(x)`, cross-checked against the closed form.
pub fn find_z(model: &SystemModel) -> Result<f64> {
    let law = model.law;
    let g = |x: f64| law.a(x) - x * law.b(x);
    let numeric = bracketed_root(g, law.x_max(), "a(x) - x b(x)")?;
    agree(numeric, law.z_closed(), "z")
}

/// Root of `(a0 + 1) w b(w) = a(w)`; `w = z` when `b` vanishes.
pub fn find_w(model: &SystemModel) -> Result<f64> {
    let law = model.law;
    let z = model.eq.z;
    let slope = law.a(0.0) + 1.0;
    let w = if law.b_vanishes() {
        z
    } else {
        let g = |x: f64| law.a(x) - slope * x * law.b(x);
        let numeric = bracketed_root(g, law.x_max(), "a(x) - (a0+1) x b(x)")?;
        agree(numeric, law.w_closed(), "w")?
    };
    if !(slope * w > z && z >= w && w > 0.0) {
        return Err(Error::Ordering {
            z,
            w,
            a0: slope - 1.0,
        });
    }
    Ok(w)
}

/// Positive root of `a`.
pub fn find_x0(model: &SystemModel) -> Result<f64> {
    let law = model.law;
    let numeric = bracketed_root(|x| law.a(x), law.x_max(), "a(x)")?;
    agree(numeric, law.x0_closed(), "x0")
}

fn bracketed_root<F: Fn(f64) -> f64>(g: F, x_max: f64, what: &'static str) -> Result<f64> {
    let lo = BRACKET_START;
    let hi = expand_upper(&g, lo, x_max, DOMAIN_GUARD).map_err(|_| Error::NoRoot {
        what,
        lo,
        hi: x_max,
    })?;
    brent(&g, lo, hi, ROOT_TOL, what)
}

fn agree(numeric: f64, closed: f64, what: &str) -> Result<f64> {
    if (numeric - closed).abs() <= CLOSED_FORM_TOL * closed.abs().max(1.0) {
        Ok(closed)
    } else {
        Err(Error::InvalidSpec(format!(
            "closed-form {what} = {closed} disagrees with bracketed root {numeric}"
        )))
    }
}
