//! Winding numbers of sampled closed curves and the invertibility test on
//! the cone algebra.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::fourier::{membership_cone, FourierError, MembershipReport};
use crate::grid::{sup_distance, sup_norm, GridError, SampledDiskFunction};

/// Largest admissible distance between the rounded index and the raw sum.
pub const RESIDUE_LIMIT: f64 = 0.01;

/// A curve is "too close to 0" when its smallest modulus falls below this
/// multiple of `max(1, largest modulus)`.
pub const ZERO_PROXIMITY: f64 = 1e-12;

pub const MIN_CURVE_POINTS: usize = 8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum WindingError {
    #[error("a closed curve needs at least {MIN_CURVE_POINTS} points, got {0}")]
    TooFewPoints(usize),
    #[error("curve point {index} is not finite")]
    NonFinite { index: usize },
    #[error("curve passes within {modulus:e} of 0 at point {index}")]
    TooCloseToZero { index: usize, modulus: f64 },
    #[error("phase step {step} between points {index} and {next} is at least π; sample more densely")]
    UnderSampled { index: usize, next: usize, step: f64 },
    #[error("rounding residue {residue} exceeds {RESIDUE_LIMIT}")]
    Residue { residue: f64 },
    #[error("function is not in the cone algebra (defect {})", .0.defect)]
    NotMember(MembershipReport),
    #[error("Rouché hypothesis fails: sup |u - z| = {distance} is not below 1/2")]
    RoucheHypothesis { distance: f64 },
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error(transparent)]
    Fourier(#[from] FourierError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClosedCurveSamples {
    points: Vec<Complex64>,
}

impl ClosedCurveSamples {
    pub fn new(points: Vec<Complex64>) -> Result<Self, WindingError> {
        if points.len() < MIN_CURVE_POINTS {
            return Err(WindingError::TooFewPoints(points.len()));
        }
        if let Some(index) = points.iter().position(|p| !p.is_finite()) {
            return Err(WindingError::NonFinite { index });
        }
        Ok(Self { points })
    }

    pub fn points(&self) -> &[Complex64] {
        &self.points
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Winding {
    pub index: i64,
    pub residue: f64,
}

pub fn winding_number(c: &ClosedCurveSamples) -> Result<Winding, WindingError> {
    winding_number_with_limit(c, RESIDUE_LIMIT)
}

/// [`winding_number`] with a caller-chosen bound on the rounding residue.
pub fn winding_number_with_limit(
    c: &ClosedCurveSamples,
    residue_limit: f64,
) -> Result<Winding, WindingError> {
    let pts = c.points();
    let largest = pts.iter().map(|p| p.norm()).fold(0.0, f64::max);
    let floor = ZERO_PROXIMITY * largest.max(1.0);
    for (index, p) in pts.iter().enumerate() {
        if p.norm() <= floor {
            return Err(WindingError::TooCloseToZero {
                index,
                modulus: p.norm(),
            });
        }
    }
    let n = pts.len();
    let mut total = 0.0;
    for index in 0..n {
        let next = (index + 1) % n;
        let step = (pts[next] / pts[index]).arg();
        if step.abs() >= PI - 1e-12 {
            return Err(WindingError::UnderSampled { index, next, step });
        }
        total += step;
    }
    let turns = total / (2.0 * PI);
    let index = turns.round();
    let residue = (turns - index).abs();
    if residue >= residue_limit {
        return Err(WindingError::Residue { residue });
    }
    Ok(Winding {
        index: index as i64,
        residue,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Invertibility {
    Invertible,
    NotInvertible,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InvertibilityCertificate {
    pub status: Invertibility,
    pub invertible: bool,
    pub min_modulus: f64,
    /// Grid point `(ring, angle)` where the minimum is attained.
    pub min_location: (usize, usize),
    pub tolerance: f64,
    /// Index of `f` on each circle `r_k T`, `k ≥ 1`; `None` where the
    /// winding computation failed.
    pub per_radius_index: Vec<Option<i64>>,
}

pub fn default_invert_tolerance(sup: f64) -> f64 {
    1e-6 * sup.max(1.0)
}

/// Tri-state invertibility test, see [`Invertibility`].
///
/// Not invertible when the grid minimum is at most `tol` or some circle has
/// a nonzero index. Inconclusive when the minimum lies in `(tol, 10·tol]` or
/// a winding computation fails. Invertible otherwise.
pub fn invertible_cone(
    f: &SampledDiskFunction,
    tol: Option<f64>,
) -> Result<InvertibilityCertificate, WindingError> {
    invertible_cone_with(f, tol, RESIDUE_LIMIT)
}

pub fn invertible_cone_with(
    f: &SampledDiskFunction,
    tol: Option<f64>,
    residue_limit: f64,
) -> Result<InvertibilityCertificate, WindingError> {
    let report = membership_cone(f, None)?;
    if !report.verdict {
        return Err(WindingError::NotMember(report));
    }
    let tolerance = tol.unwrap_or_else(|| default_invert_tolerance(sup_norm(f)));
    let (k, j, min_modulus) = f.min_modulus();
    let per_radius_index: Vec<Option<i64>> = (1..f.grid().num_radii())
        .map(|k| {
            ClosedCurveSamples::new(f.ring(k))
                .and_then(|c| winding_number_with_limit(&c, residue_limit))
                .map(|w| w.index)
                .ok()
        })
        .collect();
    let nonzero = per_radius_index.iter().any(|i| matches!(i, Some(i) if *i != 0));
    let failed = per_radius_index.iter().any(Option::is_none);
    let status = if min_modulus <= tolerance || nonzero {
        Invertibility::NotInvertible
    } else if min_modulus <= 10.0 * tolerance || failed {
        Invertibility::Inconclusive
    } else {
        Invertibility::Invertible
    };
    Ok(InvertibilityCertificate {
        status,
        invertible: status == Invertibility::Invertible,
        min_modulus,
        min_location: (k, j),
        tolerance,
        per_radius_index,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RoucheReport {
    pub index: i64,
    pub residue: f64,
    pub sup_distance_to_z: f64,
    pub min_modulus: f64,
    /// Radius of the smallest grid circle on which the grid minimum of `|u|`
    /// is attained.
    pub zero_region_radius: f64,
}

/// Checks `sup |u - z| < 1/2`, then that `u` winds once around the outer
/// circle, which forces a zero of `u` in the disk.
pub fn rouche_zero_assert(u: &SampledDiskFunction) -> Result<RoucheReport, WindingError> {
    let grid = u.grid();
    let z = SampledDiskFunction::sample(grid, None, |z| z)?;
    let distance = sup_distance(u, &z)?;
    if distance >= 0.5 {
        return Err(WindingError::RoucheHypothesis { distance });
    }
    let outer = ClosedCurveSamples::new(u.ring(grid.num_radii() - 1))?;
    let w = winding_number(&outer)?;
    let (k, _, min_modulus) = u.min_modulus();
    Ok(RoucheReport {
        index: w.index,
        residue: w.residue,
        sup_distance_to_z: distance,
        min_modulus,
        zero_region_radius: grid.radii()[k],
    })
}
