//! Peak functions of the cone algebra and the regularizations of
//! `z/√|z|` and `z p(|z|)/|z|`.

use std::f64::consts::E;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::grid::{sup_distance, GridError, PolarGrid, SampledDiskFunction};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PeakError {
    #[error("peak point {0} lies outside the closed unit disk")]
    OutsideDisk(Complex64),
    #[error("the {0:?} construction needs a nonzero peak point")]
    ZeroPeakPoint(PeakConstruction),
    #[error("the origin construction peaks at 0, not at {0}")]
    OriginMismatch(Complex64),
    #[error("delta must be positive and finite, got {0}")]
    BadDelta(f64),
    #[error("exclusion radius must be positive, got {0}")]
    BadExclusion(f64),
    #[error("|f({point})| = {modulus} is not below the peak value {peak_modulus}")]
    Violation {
        point: Complex64,
        modulus: f64,
        peak_modulus: f64,
    },
    #[error("profile value {value} at x = {x} exceeds the linear bound {c}·x")]
    ProfileBound { x: f64, value: f64, c: f64 },
    #[error(transparent)]
    Grid(#[from] GridError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PeakConstruction {
    /// `1 − |z|`, peaking at 0.
    Origin,
    /// `a + z e^{−|z|/|a|}`.
    Exp,
    /// `(1 + (z/|z|) e^{−i arg a}) p(|z|) / 2`.
    Quotient,
}

/// Radial profile `p` with `p(|a|) = 1`, `0 ≤ p < 1` elsewhere and
/// `p(x) ≤ C x`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Profile {
    /// `x/|a|` up to `|a|`, then `(1 − x)/(1 − |a|)`; `p(x) = x` when `|a| = 1`.
    Tent,
    Zero,
}

impl Profile {
    pub fn eval(self, x: f64, peak_radius: f64) -> f64 {
        match self {
            Profile::Zero => 0.0,
            Profile::Tent if peak_radius >= 1.0 => x,
            Profile::Tent if x <= peak_radius => x / peak_radius,
            Profile::Tent => (1.0 - x) / (1.0 - peak_radius),
        }
    }

    /// The constant `C` in `p(x) ≤ C x`.
    pub fn linear_constant(self, peak_radius: f64) -> f64 {
        match self {
            Profile::Zero => 0.0,
            Profile::Tent => 1.0 / peak_radius.min(1.0),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PeakSpec {
    pub a: Complex64,
    pub construction: PeakConstruction,
    pub profile: Profile,
}

impl PeakSpec {
    pub fn new(a: Complex64, construction: PeakConstruction) -> Self {
        Self {
            a,
            construction,
            profile: Profile::Tent,
        }
    }
}

/// A closed-form peak function.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PeakFunction {
    pub spec: PeakSpec,
    /// Largest modulus predicted by the construction.
    pub predicted_max: f64,
}

impl PeakFunction {
    pub fn eval(&self, z: Complex64) -> Complex64 {
        let a = self.spec.a;
        let r = z.norm();
        match self.spec.construction {
            PeakConstruction::Origin => Complex64::new(1.0 - r, 0.0),
            PeakConstruction::Exp => a + z * (-r / a.norm()).exp(),
            PeakConstruction::Quotient => {
                let p = self.spec.profile.eval(r, a.norm());
                if r == 0.0 {
                    return Complex64::new(p / 2.0, 0.0);
                }
                let phase = z / r * Complex64::from_polar(1.0, -a.arg());
                (1.0 + phase) * (p / 2.0)
            }
        }
    }

    pub fn sample(&self, grid: &PolarGrid) -> Result<SampledDiskFunction, GridError> {
        SampledDiskFunction::sample(grid, None, |z| self.eval(z))
    }
}

pub fn build_peak(spec: PeakSpec) -> Result<PeakFunction, PeakError> {
    let a = spec.a;
    if !a.is_finite() || a.norm() > 1.0 + 1e-12 {
        return Err(PeakError::OutsideDisk(a));
    }
    let predicted_max = match spec.construction {
        PeakConstruction::Origin if a != Complex64::new(0.0, 0.0) => {
            return Err(PeakError::OriginMismatch(a))
        }
        PeakConstruction::Origin => 1.0,
        _ if a == Complex64::new(0.0, 0.0) => return Err(PeakError::ZeroPeakPoint(spec.construction)),
        PeakConstruction::Exp => a.norm() * (1.0 + E.recip()),
        PeakConstruction::Quotient => match spec.profile {
            Profile::Tent => 1.0,
            Profile::Zero => 0.0,
        },
    };
    Ok(PeakFunction {
        spec,
        predicted_max,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PeakReport {
    pub a: Complex64,
    pub peak_modulus: f64,
    pub exclusion_radius: f64,
    /// `|f(a)| − max |f(ζ)|` over grid points with `|ζ − a| ≥ ρ_x`.
    pub margin: f64,
    pub nearest_competitor: Complex64,
    pub competitor_modulus: f64,
    pub grid_max_modulus: f64,
    pub grid_argmax: Complex64,
}

/// Checks that `|f|` stays strictly below `|f(a)|` outside the ball of
/// radius `exclusion_radius` around `a`.
pub fn verify_peak(
    f: impl Fn(Complex64) -> Complex64,
    grid: &PolarGrid,
    a: Complex64,
    exclusion_radius: f64,
) -> Result<PeakReport, PeakError> {
    if exclusion_radius.is_nan() || exclusion_radius <= 0.0 {
        return Err(PeakError::BadExclusion(exclusion_radius));
    }
    let peak_modulus = f(a).norm();
    let mut competitor = (Complex64::new(f64::NAN, f64::NAN), f64::NEG_INFINITY);
    let mut overall = (a, f64::NEG_INFINITY);
    for zeta in grid.points() {
        let modulus = f(zeta).norm();
        if !modulus.is_finite() {
            return Err(GridError::NonFinite {
                z: zeta,
                value: f(zeta),
            }
            .into());
        }
        if modulus > overall.1 {
            overall = (zeta, modulus);
        }
        if (zeta - a).norm() >= exclusion_radius && modulus > competitor.1 {
            competitor = (zeta, modulus);
        }
    }
    if competitor.1 >= peak_modulus {
        return Err(PeakError::Violation {
            point: competitor.0,
            modulus: competitor.1,
            peak_modulus,
        });
    }
    Ok(PeakReport {
        a,
        peak_modulus,
        exclusion_radius,
        margin: peak_modulus - competitor.1,
        nearest_competitor: competitor.0,
        competitor_modulus: competitor.1,
        grid_max_modulus: overall.1,
        grid_argmax: overall.0,
    })
}

#[derive(Debug, Clone)]
pub struct Regularization {
    pub function: SampledDiskFunction,
    pub bound: f64,
    /// Grid sup distance to the unregularized function.
    pub measured: f64,
}

/// `f_δ = z/(√|z| + δ)` against `z/√|z|`, with bound `δ/(1 + δ)`.
pub fn regularized_halfroot(delta: f64, grid: &PolarGrid) -> Result<Regularization, PeakError> {
    check_delta(delta)?;
    let zero = Complex64::new(0.0, 0.0);
    let function = SampledDiskFunction::sample(grid, Some(zero), |z| z / (z.norm().sqrt() + delta))?;
    let limit = SampledDiskFunction::sample(grid, Some(zero), |z| z / z.norm().sqrt())?;
    Ok(Regularization {
        measured: sup_distance(&function, &limit)?,
        function,
        bound: delta / (1.0 + delta),
    })
}

fn check_delta(delta: f64) -> Result<(), PeakError> {
    if delta > 0.0 && delta.is_finite() {
        Ok(())
    } else {
        Err(PeakError::BadDelta(delta))
    }
}

/// `z p(|z|)/|z|`, extended by 0 at the origin.
pub fn quotient_limit(
    peak_radius: f64,
    profile: Profile,
    grid: &PolarGrid,
) -> Result<SampledDiskFunction, PeakError> {
    Ok(SampledDiskFunction::sample(grid, Some(Complex64::new(0.0, 0.0)), |z| {
        z * (profile.eval(z.norm(), peak_radius) / z.norm())
    })?)
}

/// `q_δ(z) = z p(|z|)/(δ + |z|)` with bound `C δ` on the distance to
/// [`quotient_limit`].
pub fn quotient_peak_approx(
    a: Complex64,
    profile: Profile,
    delta: f64,
    grid: &PolarGrid,
) -> Result<Regularization, PeakError> {
    check_delta(delta)?;
    let peak_radius = a.norm();
    if peak_radius == 0.0 {
        return Err(PeakError::ZeroPeakPoint(PeakConstruction::Quotient));
    }
    let c = profile.linear_constant(peak_radius);
    for &x in grid.radii() {
        let value = profile.eval(x, peak_radius);
        if value > c * x * (1.0 + 1e-14) {
            return Err(PeakError::ProfileBound { x, value, c });
        }
    }
    let function = SampledDiskFunction::sample(grid, None, |z| {
        z * (profile.eval(z.norm(), peak_radius) / (delta + z.norm()))
    })?;
    let limit = quotient_limit(peak_radius, profile, grid)?;
    Ok(Regularization {
        measured: sup_distance(&function, &limit)?,
        function,
        bound: c * delta,
    })
}
