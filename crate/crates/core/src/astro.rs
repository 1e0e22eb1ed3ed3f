//! Physical reading of the orbit and the compactness comparison table.
//!
//! In logarithmic radius `t = log r` the relativistic variables are
//! `x = 2 G m / (r c^2)` and `y = 8 pi G r^2 rho / c^2`; the scaled law works
//! with `x / sigma` and `y / sigma`.

use std::f64::consts::PI;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::bounds::{bound_x, BoundReport};
use crate::error::{Error, Result};
use crate::model::{make_model, Family, ModelSpec, SystemModel};
use crate::trajectory::{shoot_heteroclinic, IntegratorConfig, Trajectory};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Units {
    /// `G = c = 1`.
    Natural,
    /// Caller-supplied gravitational constant and speed of light.
    Si { g: f64, c: f64 },
}

impl Units {
    fn constants(self) -> (f64, f64) {
        match self {
            Units::Natural => (1.0, 1.0),
            Units::Si { g, c } => (g, c),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfileSample {
    pub r: f64,
    pub m: f64,
    pub rho: f64,
    pub p: f64,
    /// `2 G m / (r c^2)`.
    pub compactness: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhysicalProfile {
    pub samples: Vec<ProfileSample>,
    pub units: Units,
    /// Radius assigned to the last trajectory sample.
    pub r_ref: f64,
}

impl PhysicalProfile {
    pub fn max_compactness(&self) -> f64 {
        self.samples
            .iter()
            .map(|s| s.compactness)
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// `p / (c^2 rho)` for the relativistic laws.
pub fn pressure_ratio(model: &SystemModel) -> Option<f64> {
    match model.family() {
        Family::Nonrelativistic => None,
        Family::StiffRelativistic | Family::ScaledRelativistic => Some(1.0),
        Family::KappaFamily => model.kappa(),
    }
}

/// Map an orbit to `(r, m, rho, p)` with the last sample at `r = r_ref`.
pub fn to_physical(
    model: &SystemModel,
    traj: &Trajectory,
    r_ref: f64,
    units: Units,
) -> Result<PhysicalProfile> {
    let eos = pressure_ratio(model).ok_or_else(|| {
        Error::InvalidInput("the nonrelativistic law has no TOV interpretation".into())
    })?;
    if !(r_ref > 0.0 && r_ref.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "r_ref = {r_ref} must be positive"
        )));
    }
    let (g, c) = units.constants();
    if !(g > 0.0 && c > 0.0) {
        return Err(Error::InvalidInput("G and c must be positive".into()));
    }
    let t_end = traj
        .last()
        .ok_or_else(|| Error::InvalidInput("empty trajectory".into()))?
        .t;
    let sigma = model.scale();
    let c2 = c * c;
    let samples = traj
        .samples
        .iter()
        .map(|s| {
            let r = r_ref * (s.t - t_end).exp();
            let compactness = sigma * s.x;
            let m = r * c2 * compactness / (2.0 * g);
            let rho = c2 * sigma * s.y / (8.0 * PI * g * r * r);
            ProfileSample {
                r,
                m,
                rho,
                p: eos * c2 * rho,
                compactness,
            }
        })
        .collect();
    Ok(PhysicalProfile {
        samples,
        units,
        r_ref,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Literature,
    Computed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    pub label: String,
    pub expression: String,
    /// Bound on `2 G M / (R c^2)`.
    pub value: f64,
    /// Decimal as commonly quoted, kept verbatim.
    pub printed: String,
    pub provenance: Provenance,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub printed_closed_form: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MassRadiusTable {
    pub schema: u32,
    pub rows: Vec<TableRow>,
}

/// Reports feeding the computed rows.
#[derive(Debug, Clone, PartialEq)]
pub struct TableInputs {
    pub stiff: BoundReport,
    pub radiation: BoundReport,
    pub radiation_printed: f64,
    pub stiff_orbit_max_x: f64,
}

pub fn table_inputs() -> Result<TableInputs> {
    let stiff_model = make_model(ModelSpec::stiff())?;
    let radiation_model = make_model(ModelSpec::kappa(1.0 / 3.0))?;
    let orbit = shoot_heteroclinic(&stiff_model, &IntegratorConfig::default())?;
    Ok(TableInputs {
        stiff: bound_x(&stiff_model)?,
        radiation: bound_x(&radiation_model)?,
        radiation_printed: crate::bounds::kappa_constants(1.0 / 3.0)?.printed.x_closed,
        stiff_orbit_max_x: orbit.max_x,
    })
}

pub fn mass_radius_table() -> Result<MassRadiusTable> {
    Ok(build_table(&table_inputs()?))
}

pub fn build_table(inputs: &TableInputs) -> MassRadiusTable {
    let stiff_x = inputs.stiff.x_closed.unwrap_or(inputs.stiff.x_numeric);
    let rows = vec![
        TableRow {
            label: "Buchdahl / Schwarzschild (TOV)".into(),
            expression: "8/9".into(),
            value: 8.0 / 9.0,
            printed: "0.97".into(),
            provenance: Provenance::Literature,
            printed_closed_form: None,
            note: None,
        },
        TableRow {
            label: "Bondi, rho >= 0".into(),
            expression: "12*sqrt(2) - 16".into(),
            value: 12.0 * 2f64.sqrt() - 16.0,
            printed: "0.95".into(),
            provenance: Provenance::Literature,
            printed_closed_form: None,
            note: None,
        },
        TableRow {
            label: "Bound, p = c^2 rho".into(),
            expression: "1 + W0(-2^(1/3) e^(-4/3)) / 2".into(),
            value: stiff_x,
            printed: "0.7".into(),
            provenance: Provenance::Computed,
            printed_closed_form: None,
            note: Some(format!(
                "{} 0.7; earlier estimate 3/4 = 0.75",
                if stiff_x < 0.7 { "<" } else { ">=" }
            )),
        },
        TableRow {
            label: "Bound, c^2 rho = 3p".into(),
            expression: "H^-1(E), kappa = 1/3".into(),
            value: inputs.radiation.x_numeric,
            printed: "0.622".into(),
            provenance: Provenance::Computed,
            printed_closed_form: Some(inputs.radiation_printed),
            note: Some(
                "printed closed form uses a log(1-x) coefficient that is exact only at kappa = 1"
                    .into(),
            ),
        },
        TableRow {
            label: "Heteroclinic maximum, p = c^2 rho".into(),
            expression: "max x along the numerical orbit".into(),
            value: inputs.stiff_orbit_max_x,
            printed: "0.55".into(),
            provenance: Provenance::Computed,
            printed_closed_form: None,
            note: None,
        },
    ];
    MassRadiusTable { schema: 1, rows }
}

impl MassRadiusTable {
    pub fn to_markdown(&self) -> String {
        let mut s = String::new();
        s.push_str("| Model | Expression | 2GM/(Rc^2) | Printed | Provenance | Note |\n");
        s.push_str("|---|---|---|---|---|---|\n");
        for r in &self.rows {
            let prov = match r.provenance {
                Provenance::Literature => "literature",
                Provenance::Computed => "computed",
            };
            let mut note = r.note.clone().unwrap_or_default();
            if let Some(p) = r.printed_closed_form {
                if !note.is_empty() {
                    note.push_str("; ");
                }
                let _ = write!(note, "printed closed form evaluates to {p:.6}");
            }
            let _ = writeln!(
                s,
                "| {} | {} | {:.4} | {} | {} | {} |",
                r.label, r.expression, r.value, r.printed, prov, note
            );
        }
        s
    }
}
