//! Polar sampling grids on the closed unit disk and on the cylinder
//! `D̄ × [0, 1]`, together with the sampled-function containers the rest of
//! the crate works on.
//!
//! The circle of radius zero is a single point, so a [`SampledDiskFunction`]
//! stores one origin value plus `num_angles` samples for every positive
//! radius.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Default number of radial steps `M` (radii `k / M`, `k = 0..=M`).
pub const DEFAULT_RADIAL_STEPS: usize = 64;
/// Default number of angular samples per circle.
pub const DEFAULT_ANGLES: usize = 256;
/// Default number of steps in the cylinder parameter `t`.
pub const DEFAULT_T_STEPS: usize = 32;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GridError {
    #[error("radii must start at 0, end at 1 and increase strictly")]
    BadRadii,
    #[error("number of angles must be a power of two and at least 8, got {0}")]
    BadAngles(usize),
    #[error("t samples must start at 0, end at 1 and increase strictly")]
    BadTSamples,
    #[error("at least one radial step is required")]
    NoSteps,
    #[error("non-finite value {value} at z = {z}")]
    NonFinite { z: Complex64, value: Complex64 },
    #[error("evaluation failed at z = {z}: {reason}")]
    Evaluation { z: Complex64, reason: String },
    #[error("functions live on different grids")]
    GridMismatch,
}

fn strictly_increasing_unit(values: &[f64]) -> bool {
    values.len() >= 2
        && values[0] == 0.0
        && values[values.len() - 1] == 1.0
        && values.windows(2).all(|w| w[1] > w[0])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolarGrid {
    radii: Vec<f64>,
    num_angles: usize,
}

impl PolarGrid {
    pub fn new(radii: Vec<f64>, num_angles: usize) -> Result<Self, GridError> {
        if !strictly_increasing_unit(&radii) {
            return Err(GridError::BadRadii);
        }
        if num_angles < 8 || !num_angles.is_power_of_two() {
            return Err(GridError::BadAngles(num_angles));
        }
        Ok(Self { radii, num_angles })
    }

    /// Radii `k / steps` for `k = 0..=steps`.
    pub fn uniform(steps: usize, num_angles: usize) -> Result<Self, GridError> {
        if steps == 0 {
            return Err(GridError::NoSteps);
        }
        let radii = (0..=steps).map(|k| k as f64 / steps as f64).collect();
        Self::new(radii, num_angles)
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    pub fn num_radii(&self) -> usize {
        self.radii.len()
    }

    pub fn num_angles(&self) -> usize {
        self.num_angles
    }

    pub fn angle(&self, j: usize) -> f64 {
        2.0 * PI * j as f64 / self.num_angles as f64
    }

    /// Unit vector `e^{iθ_j}`. Quarter turns are returned exactly.
    pub fn unit(&self, j: usize) -> Complex64 {
        let n = self.num_angles;
        let j = j % n;
        if (4 * j).is_multiple_of(n) {
            match 4 * j / n {
                0 => Complex64::new(1.0, 0.0),
                1 => Complex64::new(0.0, 1.0),
                2 => Complex64::new(-1.0, 0.0),
                _ => Complex64::new(0.0, -1.0),
            }
        } else {
            Complex64::from_polar(1.0, self.angle(j))
        }
    }

    pub fn point(&self, k: usize, j: usize) -> Complex64 {
        self.unit(j) * self.radii[k]
    }

    /// Every grid point, the origin once and then ring by ring.
    pub fn points(&self) -> impl Iterator<Item = Complex64> + '_ {
        std::iter::once(Complex64::new(0.0, 0.0)).chain(
            (1..self.num_radii())
                .flat_map(move |k| (0..self.num_angles).map(move |j| self.point(k, j))),
        )
    }

    /// Index of the largest grid radius `≤ r` (clamped to the grid).
    pub fn radius_bracket(&self, r: f64) -> usize {
        let last = self.radii.len() - 1;
        if r >= 1.0 {
            return last;
        }
        match self
            .radii
            .binary_search_by(|probe| probe.partial_cmp(&r).unwrap())
        {
            Ok(k) => k,
            Err(k) => k.saturating_sub(1).min(last),
        }
    }
}

impl Default for PolarGrid {
    fn default() -> Self {
        Self::uniform(DEFAULT_RADIAL_STEPS, DEFAULT_ANGLES).expect("default grid is valid")
    }
}

/// Samples of a continuous function on a [`PolarGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct SampledDiskFunction {
    grid: PolarGrid,
    origin: Complex64,
    // ring-major samples for radii 1..M
    rings: Vec<Complex64>,
}

impl SampledDiskFunction {
    /// Samples `f` at every grid point. The origin is taken from `origin`
    /// when supplied, otherwise from `f(0)`.
    pub fn sample<F>(grid: &PolarGrid, origin: Option<Complex64>, f: F) -> Result<Self, GridError>
    where
        F: Fn(Complex64) -> Complex64,
    {
        Self::try_sample(grid, origin, |z| Ok::<_, String>(f(z)))
    }

    /// Like [`sample`](Self::sample) for fallible evaluators.
    pub fn try_sample<F, E>(
        grid: &PolarGrid,
        origin: Option<Complex64>,
        f: F,
    ) -> Result<Self, GridError>
    where
        F: Fn(Complex64) -> Result<Complex64, E>,
        E: std::fmt::Display,
    {
        let eval = |z: Complex64| -> Result<Complex64, GridError> {
            let value = f(z).map_err(|e| GridError::Evaluation {
                z,
                reason: e.to_string(),
            })?;
            if value.is_finite() {
                Ok(value)
            } else {
                Err(GridError::NonFinite { z, value })
            }
        };
        let zero = Complex64::new(0.0, 0.0);
        let origin = match origin {
            Some(v) if v.is_finite() => v,
            Some(v) => return Err(GridError::NonFinite { z: zero, value: v }),
            None => eval(zero)?,
        };
        let mut rings = Vec::with_capacity((grid.num_radii() - 1) * grid.num_angles());
        for k in 1..grid.num_radii() {
            for j in 0..grid.num_angles() {
                rings.push(eval(grid.point(k, j))?);
            }
        }
        Ok(Self {
            grid: grid.clone(),
            origin,
            rings,
        })
    }

    /// Samples `f(k, z)` where `k` is the ring index of `z` (`0` at the origin).
    pub fn sample_by_ring<F>(grid: &PolarGrid, f: F) -> Result<Self, GridError>
    where
        F: Fn(usize, Complex64) -> Complex64,
    {
        let origin = f(0, Complex64::new(0.0, 0.0));
        if !origin.is_finite() {
            return Err(GridError::NonFinite {
                z: Complex64::new(0.0, 0.0),
                value: origin,
            });
        }
        let mut rings = Vec::with_capacity((grid.num_radii() - 1) * grid.num_angles());
        for k in 1..grid.num_radii() {
            for j in 0..grid.num_angles() {
                let z = grid.point(k, j);
                let value = f(k, z);
                if !value.is_finite() {
                    return Err(GridError::NonFinite { z, value });
                }
                rings.push(value);
            }
        }
        Ok(Self {
            grid: grid.clone(),
            origin,
            rings,
        })
    }

    pub fn grid(&self) -> &PolarGrid {
        &self.grid
    }

    pub fn origin_value(&self) -> Complex64 {
        self.origin
    }

    pub fn value(&self, k: usize, j: usize) -> Complex64 {
        if k == 0 {
            self.origin
        } else {
            self.rings[(k - 1) * self.grid.num_angles + j]
        }
    }

    /// Angular samples on circle `k`; for `k = 0` every entry is the origin value.
    pub fn ring(&self, k: usize) -> Vec<Complex64> {
        if k == 0 {
            vec![self.origin; self.grid.num_angles]
        } else {
            let n = self.grid.num_angles;
            self.rings[(k - 1) * n..k * n].to_vec()
        }
    }

    /// All sampled values, origin first.
    pub fn values(&self) -> impl Iterator<Item = Complex64> + '_ {
        std::iter::once(self.origin).chain(self.rings.iter().copied())
    }

    pub fn map<F: Fn(Complex64) -> Complex64>(&self, f: F) -> Self {
        Self {
            grid: self.grid.clone(),
            origin: f(self.origin),
            rings: self.rings.iter().map(|&v| f(v)).collect(),
        }
    }

    /// Pointwise combination of two functions on the same grid.
    pub fn zip_with<F>(&self, other: &Self, f: F) -> Result<Self, GridError>
    where
        F: Fn(Complex64, Complex64) -> Complex64,
    {
        if self.grid != other.grid {
            return Err(GridError::GridMismatch);
        }
        Ok(Self {
            grid: self.grid.clone(),
            origin: f(self.origin, other.origin),
            rings: self
                .rings
                .iter()
                .zip(&other.rings)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    pub fn mul(&self, other: &Self) -> Result<Self, GridError> {
        self.zip_with(other, |a, b| a * b)
    }

    /// Grid location `(k, j)` and value of the entry with the smallest modulus.
    pub fn min_modulus(&self) -> (usize, usize, f64) {
        let mut best = (0, 0, self.origin.norm());
        let n = self.grid.num_angles;
        for (idx, v) in self.rings.iter().enumerate() {
            let m = v.norm();
            if m < best.2 {
                best = (idx / n + 1, idx % n, m);
            }
        }
        best
    }
}

pub fn sup_norm(f: &SampledDiskFunction) -> f64 {
    f.values().map(|v| v.norm()).fold(0.0, f64::max)
}

pub fn sup_distance(f: &SampledDiskFunction, g: &SampledDiskFunction) -> Result<f64, GridError> {
    if f.grid != g.grid {
        return Err(GridError::GridMismatch);
    }
    Ok(f.values()
        .zip(g.values())
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CylinderGrid {
    polar: PolarGrid,
    t_samples: Vec<f64>,
}

impl CylinderGrid {
    pub fn new(polar: PolarGrid, t_samples: Vec<f64>) -> Result<Self, GridError> {
        if !strictly_increasing_unit(&t_samples) {
            return Err(GridError::BadTSamples);
        }
        Ok(Self { polar, t_samples })
    }

    pub fn uniform(polar: PolarGrid, t_steps: usize) -> Result<Self, GridError> {
        if t_steps == 0 {
            return Err(GridError::NoSteps);
        }
        let ts = (0..=t_steps).map(|l| l as f64 / t_steps as f64).collect();
        Self::new(polar, ts)
    }

    pub fn polar(&self) -> &PolarGrid {
        &self.polar
    }

    pub fn t_samples(&self) -> &[f64] {
        &self.t_samples
    }
}

impl Default for CylinderGrid {
    fn default() -> Self {
        Self::uniform(PolarGrid::default(), DEFAULT_T_STEPS).expect("default grid is valid")
    }
}

/// One [`SampledDiskFunction`] per t-sample.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledCylinderFunction {
    grid: CylinderGrid,
    slices: Vec<SampledDiskFunction>,
}

impl SampledCylinderFunction {
    pub fn sample<F>(grid: &CylinderGrid, f: F) -> Result<Self, GridError>
    where
        F: Fn(Complex64, f64) -> Complex64,
    {
        Self::try_sample(grid, |z, t| Ok::<_, String>(f(z, t)))
    }

    pub fn try_sample<F, E>(grid: &CylinderGrid, f: F) -> Result<Self, GridError>
    where
        F: Fn(Complex64, f64) -> Result<Complex64, E>,
        E: std::fmt::Display,
    {
        let slices = grid
            .t_samples
            .iter()
            .map(|&t| SampledDiskFunction::try_sample(&grid.polar, None, |z| f(z, t)))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self {
            grid: grid.clone(),
            slices,
        })
    }

    /// Assembles a cylinder function from one disk function per t-sample.
    pub fn from_slices(grid: &CylinderGrid, slices: Vec<SampledDiskFunction>) -> Result<Self, GridError> {
        if slices.len() != grid.t_samples.len() || slices.iter().any(|s| s.grid() != &grid.polar) {
            return Err(GridError::GridMismatch);
        }
        Ok(Self {
            grid: grid.clone(),
            slices,
        })
    }

    pub fn grid(&self) -> &CylinderGrid {
        &self.grid
    }

    pub fn slices(&self) -> &[SampledDiskFunction] {
        &self.slices
    }

    pub fn slice(&self, l: usize) -> &SampledDiskFunction {
        &self.slices[l]
    }

    pub fn sup_norm(&self) -> f64 {
        self.slices.iter().map(sup_norm).fold(0.0, f64::max)
    }

    pub fn zip_with<F>(&self, other: &Self, f: F) -> Result<Self, GridError>
    where
        F: Fn(Complex64, Complex64) -> Complex64 + Copy,
    {
        if self.grid != other.grid {
            return Err(GridError::GridMismatch);
        }
        let slices = self
            .slices
            .iter()
            .zip(&other.slices)
            .map(|(a, b)| a.zip_with(b, f))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self {
            grid: self.grid.clone(),
            slices,
        })
    }
}

pub fn cylinder_sup_distance(
    f: &SampledCylinderFunction,
    g: &SampledCylinderFunction,
) -> Result<f64, GridError> {
    if f.grid != g.grid {
        return Err(GridError::GridMismatch);
    }
    f.slices
        .iter()
        .zip(&g.slices)
        .try_fold(0.0, |acc, (a, b)| Ok(f64::max(acc, sup_distance(a, b)?)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn grid_validation() {
        assert!(PolarGrid::new(vec![0.0, 0.5, 1.0], 8).is_ok());
        assert_eq!(
            PolarGrid::new(vec![0.1, 1.0], 8),
            Err(GridError::BadRadii)
        );
        assert_eq!(
            PolarGrid::new(vec![0.0, 0.5, 0.5, 1.0], 8),
            Err(GridError::BadRadii)
        );
        assert_eq!(PolarGrid::uniform(4, 12), Err(GridError::BadAngles(12)));
        assert_eq!(PolarGrid::uniform(4, 4), Err(GridError::BadAngles(4)));
        let g = PolarGrid::default();
        assert_eq!(g.num_radii(), 65);
        assert_eq!(g.num_angles(), 256);
    }

    #[test]
    fn identity_sampling() {
        let grid = PolarGrid::uniform(3, 8).unwrap();
        let f = SampledDiskFunction::sample(&grid, None, |z| z).unwrap();
        for k in 0..4 {
            for j in 0..8 {
                let expected = Complex64::from_polar(grid.radii()[k], grid.angle(j));
                assert!((f.value(k, j) - expected).norm() < 1e-15);
            }
        }
        assert_eq!(f.origin_value(), c(0.0, 0.0));
    }

    #[test]
    fn modulus_sampling() {
        let grid = PolarGrid::uniform(3, 8).unwrap();
        let f = SampledDiskFunction::sample(&grid, None, |z| c(z.norm(), 0.0)).unwrap();
        assert_eq!(f.origin_value(), c(0.0, 0.0));
        for k in 0..4 {
            assert!((f.value(k, 5).re - grid.radii()[k]).abs() < 1e-15);
        }
    }

    #[test]
    fn removable_singularity_needs_override() {
        let grid = PolarGrid::default();
        let halfroot = |z: Complex64| z / z.norm().sqrt();
        let err = SampledDiskFunction::sample(&grid, None, halfroot).unwrap_err();
        assert!(matches!(err, GridError::NonFinite { z, .. } if z == c(0.0, 0.0)));
        let f = SampledDiskFunction::sample(&grid, Some(c(0.0, 0.0)), halfroot).unwrap();
        assert!(f.values().all(|v| v.is_finite()));
    }

    #[test]
    fn sup_norm_examples() {
        let grid = PolarGrid::default();
        let z = SampledDiskFunction::sample(&grid, None, |z| z).unwrap();
        assert!((sup_norm(&z) - 1.0).abs() < 1e-15);
        let bump = SampledDiskFunction::sample(&grid, None, |z| c(1.0 - z.norm_sqr(), 0.0)).unwrap();
        assert_eq!(sup_norm(&bump), 1.0);
        assert_eq!(bump.origin_value(), c(1.0, 0.0));
        let zero = SampledDiskFunction::sample(&grid, None, |_| c(0.0, 0.0)).unwrap();
        assert_eq!(sup_norm(&zero), 0.0);
    }

    #[test]
    fn sup_distance_examples() {
        let grid = PolarGrid::default();
        let z = SampledDiskFunction::sample(&grid, None, |z| z).unwrap();
        assert_eq!(sup_distance(&z, &z).unwrap(), 0.0);
        let one = SampledDiskFunction::sample(&grid, None, |_| c(1.0, 0.0)).unwrap();
        let zero = SampledDiskFunction::sample(&grid, None, |_| c(0.0, 0.0)).unwrap();
        assert_eq!(sup_distance(&one, &zero).unwrap(), 1.0);

        let zero_c = Some(c(0.0, 0.0));
        let f = SampledDiskFunction::sample(&grid, zero_c, |z| z / z.norm().sqrt()).unwrap();
        let delta = 0.1;
        let g = SampledDiskFunction::sample(&grid, zero_c, |z| z / (z.norm().sqrt() + delta))
            .unwrap();
        assert!(sup_distance(&f, &g).unwrap() <= delta / (1.0 + delta) + 1e-12);

        let coarse = PolarGrid::uniform(4, 8).unwrap();
        let h = SampledDiskFunction::sample(&coarse, None, |z| z).unwrap();
        assert_eq!(sup_distance(&z, &h), Err(GridError::GridMismatch));
    }

    #[test]
    fn monomials_have_unit_sup_norm() {
        for (steps, angles) in [(1, 8), (5, 16), (64, 256)] {
            let grid = PolarGrid::uniform(steps, angles).unwrap();
            for m in 1..6 {
                let f = SampledDiskFunction::sample(&grid, None, |z| z.powi(m)).unwrap();
                assert!((sup_norm(&f) - 1.0).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn radius_bracket_clamps() {
        let g = PolarGrid::uniform(4, 8).unwrap();
        assert_eq!(g.radius_bracket(0.0), 0);
        assert_eq!(g.radius_bracket(0.3), 1);
        assert_eq!(g.radius_bracket(0.5), 2);
        assert_eq!(g.radius_bracket(1.0), 4);
        assert_eq!(g.radius_bracket(2.0), 4);
    }

    #[test]
    fn cylinder_slices() {
        let grid = CylinderGrid::uniform(PolarGrid::uniform(4, 8).unwrap(), 4).unwrap();
        let f = SampledCylinderFunction::sample(&grid, |z, t| z + c(0.0, t)).unwrap();
        assert_eq!(f.slices().len(), 5);
        assert_eq!(f.slice(4).origin_value(), c(0.0, 1.0));
        assert!(CylinderGrid::new(PolarGrid::default(), vec![0.0, 0.5]).is_err());
    }

    proptest! {
        #[test]
        fn sup_distance_is_a_metric(
            a in proptest::collection::vec(-2.0f64..2.0, 6),
            b in proptest::collection::vec(-2.0f64..2.0, 6),
            d in proptest::collection::vec(-2.0f64..2.0, 6),
        ) {
            let grid = PolarGrid::uniform(4, 8).unwrap();
            let build = |p: &Vec<f64>| SampledDiskFunction::sample(&grid, None, |z| {
                c(p[0], p[1]) + c(p[2], p[3]) * z + c(p[4], p[5]) * z.norm()
            }).unwrap();
            let (f, g, h) = (build(&a), build(&b), build(&d));
            let fg = sup_distance(&f, &g).unwrap();
            prop_assert_eq!(fg, sup_distance(&g, &f).unwrap());
            prop_assert!(fg <= sup_distance(&f, &h).unwrap() + sup_distance(&h, &g).unwrap() + 1e-12);
            prop_assert_eq!(sup_distance(&f, &f).unwrap(), 0.0);
            if a != b {
                prop_assert!(fg > 0.0);
            }
        }
    }
}
