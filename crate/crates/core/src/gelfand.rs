//! The cone spectrum `K = {(w, t) : |w| ≤ t ≤ 1}` and Gelfand transforms.
//!
//! A point `(w, t)` with `|w| = t` is evaluation at `w`; for `|w| < t` it is
//! the Poisson extension of `f` restricted to the circle of radius `t`,
//! which for a cone-algebra member is the power series
//! `Σ_{n≥0} c_n(t) (w/t)^n`. The tip `(0, 0)` is evaluation at the origin.

use std::fmt::Write as _;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::expr::{EvalError, Expr};
use crate::fourier::{
    default_tolerance, fourier_table, max_cutoff, membership_cone_from_table, CoefficientTable,
    FourierError, MembershipReport,
};
use crate::grid::{sup_norm, SampledDiskFunction};

/// Slack allowed when checking `|w| ≤ t` and `0 ≤ t ≤ 1`.
pub const CONE_TOLERANCE: f64 = 1e-12;

/// `|w| = t` is decided with tolerance `1e-9 · max(1, t)`.
pub fn boundary_tolerance(t: f64) -> f64 {
    1e-9 * t.max(1.0)
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GelfandError {
    #[error("({w}, {t}) is not a point of the cone |w| ≤ t ≤ 1")]
    OutsideCone { w: Complex64, t: f64 },
    #[error("function is not in the cone algebra (defect {} at mode {})", .0.defect, .0.worst_mode)]
    NotMember(MembershipReport),
    #[error("height t = 0 requires w = 0, got w = {0}")]
    TipWithNonzeroW(Complex64),
    #[error(transparent)]
    Fourier(#[from] FourierError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("expression is not holomorphic in z on each slice; use the sampled transform")]
    NotSliceHolomorphic,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConePoint {
    pub w: Complex64,
    pub t: f64,
}

impl ConePoint {
    pub fn new(w: Complex64, t: f64) -> Result<Self, GelfandError> {
        let ok = (-CONE_TOLERANCE..=1.0 + CONE_TOLERANCE).contains(&t)
            && w.norm() <= t + CONE_TOLERANCE
            && w.is_finite();
        if ok {
            Ok(Self {
                w,
                t: t.clamp(0.0, 1.0),
            })
        } else {
            Err(GelfandError::OutsideCone { w, t })
        }
    }

    pub fn tip() -> Self {
        Self {
            w: Complex64::new(0.0, 0.0),
            t: 0.0,
        }
    }

    pub fn on_outer_surface(&self) -> bool {
        (self.w.norm() - self.t).abs() <= boundary_tolerance(self.t)
    }
}

pub fn joint_spectrum_contains(a: Complex64, b: f64) -> bool {
    (0.0..=1.0).contains(&b) && a.norm() <= b
}

/// The Shilov boundary is the outer surface `|w| = t`, tip included; the
/// open top disk is not part of it.
pub fn is_shilov_point(p: &ConePoint) -> bool {
    p.on_outer_surface()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EvalMethod {
    BoundaryInterpolation,
    PowerSeries,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GelfandEvaluation {
    pub value: Complex64,
    pub method: EvalMethod,
    pub series_tail_bound: f64,
    /// Estimated error from interpolating coefficients between grid radii.
    pub interpolation_error: f64,
}

/// Sampled Gelfand transform of a cone-algebra member.
#[derive(Debug, Clone)]
pub struct ConeTransform {
    table: CoefficientTable,
    sup: f64,
    f: SampledDiskFunction,
}

impl ConeTransform {
    /// Builds the coefficient table at the largest cutoff and checks
    /// membership with the default tolerance.
    pub fn new(f: &SampledDiskFunction) -> Result<Self, GelfandError> {
        let table = fourier_table(f, max_cutoff(f.grid().num_angles()))?;
        Self::from_table(f, table)
    }

    pub fn from_table(f: &SampledDiskFunction, table: CoefficientTable) -> Result<Self, GelfandError> {
        let sup = sup_norm(f);
        let report = membership_cone_from_table(&table, default_tolerance(sup));
        if !report.verdict {
            return Err(GelfandError::NotMember(report));
        }
        Ok(Self {
            table,
            sup,
            f: f.clone(),
        })
    }

    pub fn table(&self) -> &CoefficientTable {
        &self.table
    }

    pub fn sup_norm(&self) -> f64 {
        self.sup
    }

    pub fn num_angles(&self) -> usize {
        self.f.grid().num_angles()
    }

    /// Coefficients `c_n(t)` for `n = -N_max..=N_max`, linearly interpolated
    /// between grid radii, and an estimate of the interpolation error.
    fn coefficients_at(&self, t: f64) -> (Vec<Complex64>, f64) {
        let radii = self.table.radii();
        let last = radii.len() - 1;
        let n_max = self.table.n_max() as i64;
        let k = self.f.grid().radius_bracket(t);
        if radii[k] == t || k == last {
            let row = (-n_max..=n_max).map(|n| self.table.coeff(n, k)).collect();
            return (row, 0.0);
        }
        let (r0, r1) = (radii[k], radii[k + 1]);
        let lambda = (t - r0) / (r1 - r0);
        let centre = k.clamp(1, last - 1);
        let mut curvature = 0.0;
        let row = (-n_max..=n_max)
            .map(|n| {
                let a = self.table.coeff(n, k);
                let b = self.table.coeff(n, k + 1);
                curvature += (self.table.coeff(n, centre - 1) - 2.0 * self.table.coeff(n, centre)
                    + self.table.coeff(n, centre + 1))
                .norm();
                a + (b - a) * lambda
            })
            .collect();
        (row, curvature / 8.0)
    }

    pub fn eval(&self, p: &ConePoint) -> Result<GelfandEvaluation, GelfandError> {
        if p.t <= CONE_TOLERANCE {
            if p.w.norm() > CONE_TOLERANCE {
                return Err(GelfandError::TipWithNonzeroW(p.w));
            }
            return Ok(GelfandEvaluation {
                value: self.f.origin_value(),
                method: EvalMethod::BoundaryInterpolation,
                series_tail_bound: 0.0,
                interpolation_error: 0.0,
            });
        }
        let n_max = self.table.n_max();
        let (coeffs, interpolation_error) = self.coefficients_at(p.t);
        if p.on_outer_surface() {
            let phase = Complex64::from_polar(1.0, p.w.arg());
            // trigonometric interpolation of the circle samples
            let mut value = Complex64::new(0.0, 0.0);
            let mut power = phase.powi(-(n_max as i32));
            for c in &coeffs {
                value += c * power;
                power *= phase;
            }
            return Ok(GelfandEvaluation {
                value,
                method: EvalMethod::BoundaryInterpolation,
                series_tail_bound: 0.0,
                interpolation_error,
            });
        }
        let q = p.w / p.t;
        let value = coeffs[n_max..]
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, c| acc * q + c);
        let ratio = q.norm();
        Ok(GelfandEvaluation {
            value,
            method: EvalMethod::PowerSeries,
            series_tail_bound: self.sup * ratio.powi(n_max as i32 + 1) / (1.0 - ratio),
            interpolation_error,
        })
    }

    /// Direct trapezoidal quadrature of the Poisson integral over the circle
    /// of radius `t`. Independent of the coefficient table; used as a
    /// cross-check of [`eval`](Self::eval) at interior points.
    pub fn poisson_eval(&self, p: &ConePoint) -> Result<Complex64, GelfandError> {
        if p.t <= CONE_TOLERANCE {
            return self.eval(p).map(|e| e.value);
        }
        let radii = self.table.radii();
        let k = self.f.grid().radius_bracket(p.t);
        let ring: Vec<Complex64> = if radii[k] == p.t || k == radii.len() - 1 {
            self.f.ring(k)
        } else {
            let lambda = (p.t - radii[k]) / (radii[k + 1] - radii[k]);
            self.f
                .ring(k)
                .iter()
                .zip(&self.f.ring(k + 1))
                .map(|(a, b)| a + (b - a) * lambda)
                .collect()
        };
        let n = ring.len();
        let t2 = p.t * p.t;
        let w2 = p.w.norm_sqr();
        let sum: Complex64 = ring
            .iter()
            .enumerate()
            .map(|(j, v)| {
                let xi = self.f.grid().unit(j) * p.t;
                v * ((t2 - w2) / (xi - p.w).norm_sqr())
            })
            .sum();
        Ok(sum / n as f64)
    }

    /// Values on the circle `|w| = fraction · r_k` of the slice at height
    /// `r_k`, at the grid angles. `fraction = 1` returns the samples.
    pub fn slice_circle(&self, k: usize, fraction: f64) -> Vec<Complex64> {
        let n = self.num_angles();
        if k == 0 {
            return vec![self.f.origin_value(); n];
        }
        if fraction >= 1.0 {
            return self.f.ring(k);
        }
        self.table
            .synthesize_positive(k, fraction, self.table.n_max(), n)
    }
}

/// Evaluates `f̂(w, t)` from a sampled function and its table.
pub fn gelfand_eval(
    f: &SampledDiskFunction,
    table: &CoefficientTable,
    p: &ConePoint,
) -> Result<GelfandEvaluation, GelfandError> {
    ConeTransform::from_table(f, table.clone())?.eval(p)
}

/// Closed-form transform of a slice-holomorphic expression: `r` is replaced
/// by the height `t`. `origin` overrides the value at the tip.
pub fn symbolic_transform(
    expr: &Expr,
    p: &ConePoint,
    origin: Option<Complex64>,
) -> Result<Complex64, GelfandError> {
    if !expr.is_slice_holomorphic() {
        return Err(GelfandError::NotSliceHolomorphic);
    }
    if p.t <= CONE_TOLERANCE {
        if let Some(v) = origin {
            return Ok(v);
        }
    }
    Ok(expr.eval_with_radius(p.w, p.t, p.t)?)
}

/// Sampling of the cone used by the exhaustive searches: every grid
/// radius as a height, `disk_steps + 1` concentric circles per slice and
/// the grid's angular resolution on each circle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConeResolution {
    pub disk_steps: usize,
}

impl Default for ConeResolution {
    fn default() -> Self {
        Self { disk_steps: 32 }
    }
}

/// Gelfand transform values on the cone grid, in scan order.
#[derive(Debug, Clone)]
pub struct ConeGridValues {
    pub points: Vec<ConePoint>,
    pub values: Vec<Complex64>,
}

impl ConeGridValues {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("w_re,w_im,t,val_re,val_im\n");
        for (p, v) in self.points.iter().zip(&self.values) {
            writeln!(
                out,
                "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
                p.w.re, p.w.im, p.t, v.re, v.im
            )
            .unwrap();
        }
        out
    }
}

pub fn cone_grid_values(transform: &ConeTransform, res: ConeResolution) -> ConeGridValues {
    let radii = transform.table.radii().to_vec();
    let grid = transform.f.grid();
    let steps = res.disk_steps.max(1);
    let mut points = Vec::new();
    let mut values = Vec::new();
    for (k, &t) in radii.iter().enumerate() {
        if k == 0 {
            points.push(ConePoint::tip());
            values.push(transform.f.origin_value());
            continue;
        }
        for m in 0..=steps {
            let fraction = m as f64 / steps as f64;
            if m == 0 {
                points.push(ConePoint {
                    w: Complex64::new(0.0, 0.0),
                    t,
                });
                values.push(transform.table.coeff(0, k));
                continue;
            }
            let circle = transform.slice_circle(k, fraction);
            for (j, v) in circle.into_iter().enumerate() {
                let w = if m == steps {
                    grid.unit(j) * t
                } else {
                    grid.unit(j) * (fraction * t)
                };
                points.push(ConePoint { w, t });
                values.push(v);
            }
        }
    }
    ConeGridValues { points, values }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CommonZero {
    pub min: f64,
    pub argmin: ConePoint,
}

/// `min_K Σ_j |f̂_j|` by exhaustive evaluation on the cone grid.
pub fn common_zero_search(
    fs: &[SampledDiskFunction],
    res: ConeResolution,
) -> Result<CommonZero, GelfandError> {
    let transforms = fs
        .iter()
        .map(ConeTransform::new)
        .collect::<Result<Vec<_>, _>>()?;
    Ok(common_zero_of_transforms(&transforms, res))
}

pub fn common_zero_of_transforms(transforms: &[ConeTransform], res: ConeResolution) -> CommonZero {
    let grids: Vec<ConeGridValues> = transforms.iter().map(|t| cone_grid_values(t, res)).collect();
    let points = grids
        .first()
        .map(|g| g.points.clone())
        .unwrap_or_else(|| vec![ConePoint::tip()]);
    let mut best = CommonZero {
        min: f64::INFINITY,
        argmin: ConePoint::tip(),
    };
    for (idx, p) in points.iter().enumerate() {
        let total: f64 = grids.iter().map(|g| g.values[idx].norm()).sum();
        if total < best.min {
            best = CommonZero {
                min: total,
                argmin: *p,
            };
        }
    }
    if grids.is_empty() {
        best.min = 0.0;
    }
    best
}
