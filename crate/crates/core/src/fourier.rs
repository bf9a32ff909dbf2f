//! Per-circle Fourier analysis.
//!
//! For a sampled `f` the table holds `c_n(r_k) = (1/2π)∫ f(r_k e^{is}) e^{-ins} ds`
//! computed by the DFT of the angular samples with normalization `1/N_θ`.
//! A function belongs to the cone algebra exactly when every circle
//! restriction is a boundary value of a holomorphic function, i.e. when all
//! negative modes vanish; the disk algebra additionally needs
//! `c_n(r) = c_n(1) r^n`.

use std::fmt::Write as _;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::grid::{sup_norm, SampledCylinderFunction, SampledDiskFunction};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FourierError {
    #[error("mode cutoff {n_max} needs more than {num_angles} angular samples (2·N_max < N_θ)")]
    CutoffTooLarge { n_max: usize, num_angles: usize },
}

/// `c_n(r_k)` for `n ∈ −N_max..=N_max` and every grid radius.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientTable {
    n_max: usize,
    radii: Vec<f64>,
    // [mode + n_max][k]
    coeffs: Vec<Vec<Complex64>>,
}

/// Largest admissible cutoff for a grid with `num_angles` samples per circle.
pub fn max_cutoff(num_angles: usize) -> usize {
    num_angles / 2 - 1
}

pub fn fourier_table(f: &SampledDiskFunction, n_max: usize) -> Result<CoefficientTable, FourierError> {
    let grid = f.grid();
    let n = grid.num_angles();
    if 2 * n_max >= n {
        return Err(FourierError::CutoffTooLarge {
            n_max,
            num_angles: n,
        });
    }
    let fft = FftPlanner::<f64>::new().plan_fft_forward(n);
    let num_radii = grid.num_radii();
    let mut coeffs = vec![vec![Complex64::new(0.0, 0.0); num_radii]; 2 * n_max + 1];
    coeffs[n_max][0] = f.origin_value();
    let scale = 1.0 / n as f64;
    for k in 1..num_radii {
        let mut buf = f.ring(k);
        fft.process(&mut buf);
        for (idx, row) in coeffs.iter_mut().enumerate() {
            let mode = idx as i64 - n_max as i64;
            row[k] = buf[mode.rem_euclid(n as i64) as usize] * scale;
        }
    }
    Ok(CoefficientTable {
        n_max,
        radii: grid.radii().to_vec(),
        coeffs,
    })
}

impl CoefficientTable {
    /// `Σ_{0≤n≤limit} c_n(r_k) scale^n e^{inθ_j}` at `num_angles` equispaced
    /// angles, via an inverse FFT.
    pub fn synthesize_positive(
        &self,
        k: usize,
        scale: f64,
        limit: usize,
        num_angles: usize,
    ) -> Vec<Complex64> {
        let mut buf = vec![Complex64::new(0.0, 0.0); num_angles];
        let mut factor = 1.0;
        for (mode, slot) in buf.iter_mut().enumerate().take(limit.min(self.n_max) + 1) {
            *slot = self.coeff(mode as i64, k) * factor;
            factor *= scale;
        }
        FftPlanner::<f64>::new()
            .plan_fft_inverse(num_angles)
            .process(&mut buf);
        buf
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    pub fn num_radii(&self) -> usize {
        self.radii.len()
    }

    /// `c_n(r_k)`; zero outside the stored mode range.
    pub fn coeff(&self, mode: i64, k: usize) -> Complex64 {
        if mode.unsigned_abs() as usize > self.n_max {
            return Complex64::new(0.0, 0.0);
        }
        self.coeffs[(mode + self.n_max as i64) as usize][k]
    }

    /// The curve `r_k ↦ c_n(r_k)`.
    pub fn mode(&self, mode: i64) -> &[Complex64] {
        &self.coeffs[(mode + self.n_max as i64) as usize]
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs
            .iter()
            .flatten()
            .map(|c| c.norm())
            .fold(0.0, f64::max)
    }

    /// CSV with header `mode,radius,re,im`, sorted by mode then radius.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("mode,radius,re,im\n");
        for (idx, row) in self.coeffs.iter().enumerate() {
            let mode = idx as i64 - self.n_max as i64;
            for (r, c) in self.radii.iter().zip(row) {
                writeln!(out, "{mode},{r:.16e},{:.16e},{:.16e}", c.re, c.im).unwrap();
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MembershipReport {
    pub verdict: bool,
    pub defect: f64,
    pub worst_mode: i64,
    pub worst_radius: usize,
    pub tolerance: f64,
}

impl MembershipReport {
    fn from_worst(defect: f64, worst_mode: i64, worst_radius: usize, tolerance: f64) -> Self {
        Self {
            verdict: defect <= tolerance,
            defect,
            worst_mode,
            worst_radius,
            tolerance,
        }
    }
}

/// `1e-8 · max(1, ‖f‖_∞)`.
pub fn default_tolerance(sup: f64) -> f64 {
    1e-8 * sup.max(1.0)
}

struct Worst {
    defect: f64,
    mode: i64,
    radius: usize,
}

impl Worst {
    fn new() -> Self {
        Self {
            defect: 0.0,
            mode: 0,
            radius: 0,
        }
    }

    fn offer(&mut self, defect: f64, mode: i64, radius: usize) {
        if defect > self.defect {
            *self = Self {
                defect,
                mode,
                radius,
            };
        }
    }
}

/// Cone-algebra test on an already computed table.
pub fn membership_cone_from_table(table: &CoefficientTable, tol: f64) -> MembershipReport {
    let mut worst = Worst::new();
    for mode in 1..=table.n_max as i64 {
        for (k, c) in table.mode(-mode).iter().enumerate() {
            worst.offer(c.norm(), -mode, k);
        }
    }
    MembershipReport::from_worst(worst.defect, worst.mode, worst.radius, tol)
}

pub fn membership_cone(
    f: &SampledDiskFunction,
    tol: Option<f64>,
) -> Result<MembershipReport, FourierError> {
    let table = fourier_table(f, max_cutoff(f.grid().num_angles()))?;
    let tol = tol.unwrap_or_else(|| default_tolerance(sup_norm(f)));
    Ok(membership_cone_from_table(&table, tol))
}

pub fn membership_disk_from_table(table: &CoefficientTable, tol: f64) -> MembershipReport {
    let mut worst = Worst::new();
    for mode in 1..=table.n_max as i64 {
        for (k, c) in table.mode(-mode).iter().enumerate() {
            worst.offer(c.norm(), -mode, k);
        }
    }
    let outer = table.num_radii() - 1;
    for mode in 0..=table.n_max as i64 {
        let row = table.mode(mode);
        let boundary = row[outer];
        for (k, (&c, &r)) in row.iter().zip(&table.radii).enumerate() {
            let predicted = boundary * r.powi(mode as i32);
            worst.offer((c - predicted).norm(), mode, k);
        }
    }
    MembershipReport::from_worst(worst.defect, worst.mode, worst.radius, tol)
}

pub fn membership_disk(
    f: &SampledDiskFunction,
    tol: Option<f64>,
) -> Result<MembershipReport, FourierError> {
    let table = fourier_table(f, max_cutoff(f.grid().num_angles()))?;
    let tol = tol.unwrap_or_else(|| default_tolerance(sup_norm(f)));
    Ok(membership_disk_from_table(&table, tol))
}

/// Disk-algebra test on every t-slice. `worst_radius` refers to the radius
/// of the worst slice; the slice index is returned alongside.
pub fn membership_cylinder(
    f: &SampledCylinderFunction,
    tol: Option<f64>,
) -> Result<(MembershipReport, usize), FourierError> {
    let tol = tol.unwrap_or_else(|| default_tolerance(f.sup_norm()));
    let mut worst: Option<(MembershipReport, usize)> = None;
    for (l, slice) in f.slices().iter().enumerate() {
        let report = membership_disk(slice, Some(tol))?;
        if worst.as_ref().is_none_or(|(w, _)| report.defect > w.defect) {
            worst = Some((report, l));
        }
    }
    Ok(worst.expect("cylinder grids have at least two slices"))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeDecay {
    pub mode: i64,
    /// Smallest grid radii, starting with 0.
    pub radii: Vec<f64>,
    pub magnitudes: Vec<f64>,
    /// `|c_n(0)| = 0` and `|c_n|` non-decreasing over the reported radii.
    pub decays_to_zero: bool,
}

/// Behaviour of `|c_n(r)|`, `n ≥ 1`, at the `count` smallest positive radii.
pub fn small_radius_decay(table: &CoefficientTable, count: usize) -> Vec<ModeDecay> {
    let tol = 1e-12 * table.max_abs().max(1.0);
    let take = (count + 1).min(table.num_radii());
    (1..=table.n_max as i64)
        .map(|mode| {
            let magnitudes: Vec<f64> = table.mode(mode)[..take].iter().map(|c| c.norm()).collect();
            let decays_to_zero =
                magnitudes[0] <= tol && magnitudes.windows(2).all(|w| w[0] <= w[1] + tol);
            ModeDecay {
                mode,
                radii: table.radii[..take].to_vec(),
                magnitudes,
                decays_to_zero,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{CylinderGrid, PolarGrid};
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn sample(f: impl Fn(Complex64) -> Complex64) -> SampledDiskFunction {
        SampledDiskFunction::sample(&PolarGrid::default(), None, f).unwrap()
    }

    /// Direct O(N²) DFT of one ring, independent of the FFT path.
    fn naive_coeff(f: &SampledDiskFunction, k: usize, mode: i64) -> Complex64 {
        let n = f.grid().num_angles();
        let mut acc = c(0.0, 0.0);
        for j in 0..n {
            let phase = -2.0 * PI * (mode * j as i64) as f64 / n as f64;
            acc += f.value(k, j) * Complex64::from_polar(1.0, phase);
        }
        acc / n as f64
    }

    #[test]
    fn single_mode_tables() {
        type Case = (fn(Complex64) -> Complex64, i64);
        let cases: [Case; 3] = [(|z| z, 1), (|z| z.conj(), -1), (|z| c(z.norm(), 0.0), 0)];
        for (f, mode) in cases {
            let f = sample(f);
            let table = fourier_table(&f, 127).unwrap();
            for k in 0..table.num_radii() {
                let r = table.radii()[k];
                for n in -127..=127 {
                    let expected = if n == mode { r } else { 0.0 };
                    assert!((table.coeff(n, k) - c(expected, 0.0)).norm() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn fft_matches_naive_dft() {
        let f = sample(|z| (z * 1.3).exp() * (1.0 + z.norm()).sqrt() + z.conj() * z.norm());
        let table = fourier_table(&f, 20).unwrap();
        for k in [1, 17, 64] {
            for n in -20..=20 {
                assert!((table.coeff(n, k) - naive_coeff(&f, k, n)).norm() < 1e-13);
            }
        }
    }

    #[test]
    fn cutoff_must_respect_aliasing() {
        let f = sample(|z| z);
        assert!(fourier_table(&f, 127).is_ok());
        assert_eq!(
            fourier_table(&f, 128),
            Err(FourierError::CutoffTooLarge {
                n_max: 128,
                num_angles: 256
            })
        );
    }

    #[test]
    fn cone_membership_examples() {
        let f = SampledDiskFunction::sample(&PolarGrid::default(), Some(c(0.0, 0.0)), |z| {
            z / z.norm().sqrt()
        })
        .unwrap();
        let report = membership_cone(&f, None).unwrap();
        assert!(report.verdict);
        assert!(report.defect < 1e-10);

        let report = membership_cone(&sample(|z| z.conj()), None).unwrap();
        assert!(!report.verdict);
        // oracle: the direct DFT of conj(z) on the unit circle at mode -1
        let oracle = naive_coeff(&sample(|z| z.conj()), 64, -1).norm();
        assert!((oracle - 1.0).abs() < 1e-14);
        assert!((report.defect - oracle).abs() < 1e-12);
        assert_eq!(report.worst_mode, -1);
        assert_eq!(report.worst_radius, 64);

        let report = membership_cone(&sample(|z| c(1.0 - z.norm_sqr(), 0.0)), None).unwrap();
        assert!(report.verdict);
        assert!(report.defect < 1e-15);
    }

    #[test]
    fn disk_membership_examples() {
        assert!(membership_disk(&sample(|z| z * z), None).unwrap().verdict);

        let report = membership_disk(&sample(|z| c(z.norm(), 0.0)), None).unwrap();
        assert!(!report.verdict);
        let radii = PolarGrid::default().radii().to_vec();
        let oracle = radii.iter().map(|r| (r - 1.0).abs()).fold(0.0, f64::max);
        assert!((report.defect - oracle).abs() < 1e-12);
        assert_eq!(report.worst_mode, 0);
        assert_eq!(report.worst_radius, 0);

        let report = membership_disk(&sample(|z| z.conj()), None).unwrap();
        assert!(!report.verdict);
        assert!((report.defect - 1.0).abs() < 1e-12);
    }

    #[test]
    fn cylinder_membership_examples() {
        let grid = CylinderGrid::default();
        let f = SampledCylinderFunction::sample(&grid, |z, t| z + c(0.0, t)).unwrap();
        assert!(membership_cylinder(&f, None).unwrap().0.verdict);
        let f = SampledCylinderFunction::sample(&grid, |z, t| z * z - (1.0 - t * t)).unwrap();
        assert!(membership_cylinder(&f, None).unwrap().0.verdict);

        let f = SampledCylinderFunction::sample(&grid, |z, t| t * z.conj()).unwrap();
        let (report, slice) = membership_cylinder(&f, None).unwrap();
        assert!(!report.verdict);
        // per-slice oracle: the outer-circle mode −1 coefficient equals t
        let l_last = grid.t_samples().len() - 1;
        let oracle = naive_coeff(f.slice(l_last), 64, -1).norm();
        assert!((report.defect - oracle).abs() < 1e-12);
        assert!((report.defect - 1.0).abs() < 1e-12);
        assert_eq!(slice, l_last);
    }

    #[test]
    fn small_radius_behaviour() {
        let table = fourier_table(&sample(|z| z), 8).unwrap();
        let decay = small_radius_decay(&table, 4);
        assert!((decay[0].magnitudes[1] - 1.0 / 64.0).abs() < 1e-15);
        assert!(decay.iter().all(|d| d.decays_to_zero));

        let f = SampledDiskFunction::sample(&PolarGrid::default(), Some(c(0.0, 0.0)), |z| {
            z / z.norm().sqrt()
        })
        .unwrap();
        let table = fourier_table(&f, 8).unwrap();
        let decay = small_radius_decay(&table, 4);
        for (r, m) in decay[0].radii.iter().zip(&decay[0].magnitudes) {
            assert!((m - r.sqrt()).abs() < 1e-14);
        }
        assert!(decay[0].decays_to_zero);

        let table = fourier_table(&sample(|_| c(1.0, 0.0)), 8).unwrap();
        let decay = small_radius_decay(&table, 4);
        assert!(decay.iter().all(|d| d.magnitudes.iter().all(|&m| m < 1e-15)));
    }

    #[test]
    fn csv_layout() {
        let grid = PolarGrid::uniform(2, 8).unwrap();
        let f = SampledDiskFunction::sample(&grid, None, |z| z.conj()).unwrap();
        let csv = fourier_table(&f, 1).unwrap().to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "mode,radius,re,im");
        assert_eq!(lines.len(), 1 + 3 * 3);
        assert!(lines[3].starts_with("-1,1.0000000000000000e0,1.0000000000000000e0,"));
        let im: f64 = lines[3].rsplit(',').next().unwrap().parse().unwrap();
        assert!(im.abs() < 1e-15);
        assert!(lines[1].starts_with("-1,0.0000000000000000e0"));
        assert!(lines[9].starts_with("1,1.0000000000000000e0"));
    }

    fn catalog() -> Vec<fn(Complex64) -> Complex64> {
        vec![
            |z| z,
            |z| c(z.norm(), 0.0),
            |z| z * z - z.norm_sqr() * (1.0 - z.norm()).powi(2),
            |z| z + c(0.0, 1.0) * (z.norm() - 0.5),
            |z| (z * 0.7).exp() / (z.norm() + 0.5),
            |z| 2.0 + z * z * z,
        ]
    }

    #[test]
    fn products_of_members_are_members() {
        let fs: Vec<_> = catalog().into_iter().map(sample).collect();
        for a in &fs {
            for b in &fs {
                let prod = a.mul(b).unwrap();
                assert!(membership_cone(&prod, None).unwrap().verdict);
            }
        }
    }

    proptest! {
        #[test]
        fn coefficient_and_parseval_bounds(
            p in proptest::collection::vec(-1.0f64..1.0, 10),
        ) {
            let grid = PolarGrid::uniform(8, 32).unwrap();
            let f = SampledDiskFunction::sample(&grid, None, |z| {
                c(p[0], p[1]) + c(p[2], p[3]) * z.conj() * z.norm()
                    + c(p[4], p[5]) * (z * c(p[6], p[7])).exp()
                    + c(p[8], p[9]) * z.conj().powi(3)
            }).unwrap();
            let table = fourier_table(&f, 15).unwrap();
            let sup = sup_norm(&f);
            prop_assert!(table.max_abs() <= sup + 1e-12);
            for k in 0..grid.num_radii() {
                let energy: f64 = (-15..=15).map(|n| table.coeff(n, k).norm_sqr()).sum();
                let samples: f64 = f.ring(k).iter().map(|v| v.norm_sqr()).sum::<f64>() / 32.0;
                prop_assert!(energy <= samples + 1e-10);
            }
        }

        #[test]
        fn trigonometric_polynomials_are_recovered(
            coeffs in proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 2..8),
            shift in -3i64..3,
        ) {
            let grid = PolarGrid::uniform(4, 32).unwrap();
            let modes: Vec<(i64, Complex64)> = coeffs
                .iter()
                .enumerate()
                .map(|(idx, &(re, im))| (idx as i64 * 2 - 7 + shift, c(re, im)))
                .collect();
            let f = SampledDiskFunction::sample(&grid, None, |z| {
                if z.norm() == 0.0 {
                    return c(0.0, 0.0);
                }
                let theta = z.arg();
                modes.iter().map(|(n, a)| a * Complex64::from_polar(z.norm(), *n as f64 * theta)).sum()
            }).unwrap();
            let table = fourier_table(&f, 15).unwrap();
            for k in 1..grid.num_radii() {
                let r = grid.radii()[k];
                for n in -15..=15i64 {
                    let want = modes.iter().find(|(m, _)| *m == n).map_or(c(0.0, 0.0), |(_, a)| a * r);
                    prop_assert!((table.coeff(n, k) - want).norm() <= 1e-12 * (1.0 + want.norm()));
                }
            }
        }
    }
}
