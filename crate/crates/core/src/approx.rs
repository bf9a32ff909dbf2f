//! Constructive approximation: one-dimensional polynomial fits, the
//! cone-algebra approximation `Σ q_n(|z|) ρ^n z^n` and the cylinder
//! approximation `Σ p_n(t) ρ^n z^n`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fourier::{
    default_tolerance, fourier_table, max_cutoff, membership_cone_from_table, membership_cylinder,
    CoefficientTable, FourierError, MembershipReport,
};
use crate::grid::{
    cylinder_sup_distance, sup_distance, sup_norm, CylinderGrid, GridError, PolarGrid,
    SampledCylinderFunction, SampledDiskFunction,
};

pub const DEFAULT_MAX_DEGREE: usize = 64;
pub const DEFAULT_MAX_RHO_EXPONENT: u32 = 40;

/// Coefficients below `CLEAN_THRESHOLD · max(1, sup)` are treated as zero
/// before fitting.
pub const CLEAN_THRESHOLD: f64 = 1e-13;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ApproxError {
    #[error("tolerance must be positive and finite, got {0}")]
    BadTolerance(f64),
    #[error("invalid samples: {0}")]
    BadSamples(String),
    #[error("no fit within {tol:e} up to degree {max_degree} (best residual {residual:e})")]
    DegreeCap {
        max_degree: usize,
        tol: f64,
        residual: f64,
    },
    #[error("function fails the membership test (defect {})", .0.defect)]
    NotMember(MembershipReport),
    #[error("no dilation radius achieves error {eps}; best {best} (function too rough for the grid)")]
    RhoSearchExhausted { eps: f64, best: f64 },
    #[error("function is not radial: angular variation {variation:e} against tolerance {tol:e}")]
    NotRadial { variation: f64, tol: f64 },
    #[error("function vanishes on the grid (min modulus {min:e})")]
    Vanishes { min: f64 },
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error(transparent)]
    Fourier(#[from] FourierError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ApproxOptions {
    pub max_degree: usize,
    pub max_rho_exponent: u32,
}

impl Default for ApproxOptions {
    fn default() -> Self {
        Self {
            max_degree: DEFAULT_MAX_DEGREE,
            max_rho_exponent: DEFAULT_MAX_RHO_EXPONENT,
        }
    }
}

/// Polynomial on `[0, 1]` with complex coefficients in the shifted
/// Chebyshev basis `T_j(2s − 1)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RadialPoly {
    coeffs: Vec<Complex64>,
}

impl RadialPoly {
    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn constant(c: Complex64) -> Self {
        Self { coeffs: vec![c] }
    }

    pub fn from_chebyshev(coeffs: Vec<Complex64>) -> Self {
        let mut p = Self { coeffs };
        p.trim();
        p
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(|c| *c == Complex64::new(0.0, 0.0)) {
            self.coeffs.pop();
        }
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Clenshaw evaluation.
    pub fn eval(&self, s: f64) -> Complex64 {
        let x = 2.0 * s - 1.0;
        let zero = Complex64::new(0.0, 0.0);
        let (mut b1, mut b2) = (zero, zero);
        for c in self.coeffs.iter().skip(1).rev() {
            let b0 = c + b1 * (2.0 * x) - b2;
            b2 = b1;
            b1 = b0;
        }
        match self.coeffs.first() {
            Some(c0) => c0 + b1 * x - b2,
            None => zero,
        }
    }
}

fn chebyshev_row(s: f64, degree: usize) -> Vec<f64> {
    let x = 2.0 * s - 1.0;
    let mut row = Vec::with_capacity(degree + 1);
    row.push(1.0);
    if degree >= 1 {
        row.push(x);
    }
    for j in 2..=degree {
        row.push(2.0 * x * row[j - 1] - row[j - 2]);
    }
    row
}

/// Weighted least squares: minimizes `Σ |w_i p(s_i) − wy_i|²`. Returns the
/// polynomial and `max_i |w_i p(s_i) − wy_i|`.
fn least_squares(s: &[f64], wy: &[Complex64], w: &[f64], degree: usize) -> (RadialPoly, f64) {
    let m = s.len();
    let rows: Vec<Vec<f64>> = s.iter().map(|&si| chebyshev_row(si, degree)).collect();
    let a = DMatrix::from_fn(m, degree + 1, |i, j| w[i] * rows[i][j]);
    let b_re = DVector::from_iterator(m, wy.iter().map(|v| v.re));
    let b_im = DVector::from_iterator(m, wy.iter().map(|v| v.im));
    let svd = a.svd(true, true);
    let cutoff = svd.singular_values.max() * 1e-14;
    let x_re = svd.solve(&b_re, cutoff).expect("u and v were computed");
    let x_im = svd.solve(&b_im, cutoff).expect("u and v were computed");
    let poly = RadialPoly::from_chebyshev(
        x_re.iter()
            .zip(x_im.iter())
            .map(|(&re, &im)| Complex64::new(re, im))
            .collect(),
    );
    let residual = (0..m)
        .map(|i| (poly.eval(s[i]) * w[i] - wy[i]).norm())
        .fold(0.0, f64::max);
    (poly, residual)
}

/// Raises the degree until the weighted residual drops to `tol`.
fn greedy_fit(
    s: &[f64],
    wy: &[Complex64],
    w: &[f64],
    tol: f64,
    max_degree: usize,
) -> Result<(RadialPoly, f64), ApproxError> {
    let scale = wy.iter().map(|v| v.norm()).fold(0.0, f64::max);
    if scale <= tol {
        return Ok((RadialPoly::zero(), scale));
    }
    let active = w.iter().filter(|&&x| x > 0.0).count();
    let top = max_degree.min(active.saturating_sub(1));
    let mut best = f64::INFINITY;
    for degree in 0..=top {
        let (poly, residual) = least_squares(s, wy, w, degree);
        if residual <= tol {
            return Ok((poly, residual));
        }
        best = best.min(residual);
    }
    Err(ApproxError::DegreeCap {
        max_degree,
        tol,
        residual: best,
    })
}

fn check_tolerance(tol: f64) -> Result<(), ApproxError> {
    if tol > 0.0 && tol.is_finite() {
        Ok(())
    } else {
        Err(ApproxError::BadTolerance(tol))
    }
}

/// Lowest-degree least-squares polynomial within `tol` of every sample.
pub fn weierstrass_fit(
    samples: &[(f64, Complex64)],
    tol: f64,
    max_degree: usize,
) -> Result<RadialPoly, ApproxError> {
    check_tolerance(tol)?;
    if samples.is_empty() {
        return Err(ApproxError::BadSamples("no samples".into()));
    }
    if let Some((s, y)) = samples
        .iter()
        .find(|(s, y)| !(0.0..=1.0).contains(s) || !y.is_finite())
    {
        return Err(ApproxError::BadSamples(format!("sample ({s}, {y}) is outside [0,1] or not finite")));
    }
    let mut sorted: Vec<f64> = samples.iter().map(|p| p.0).collect();
    sorted.sort_by(f64::total_cmp);
    if let Some(pair) = sorted.windows(2).find(|p| p[0] == p[1]) {
        return Err(ApproxError::BadSamples(format!("abscissa {} repeats", pair[0])));
    }
    let s: Vec<f64> = samples.iter().map(|p| p.0).collect();
    let y: Vec<Complex64> = samples.iter().map(|p| p.1).collect();
    let w = vec![1.0; s.len()];
    greedy_fit(&s, &y, &w, tol, max_degree).map(|(p, _)| p)
}

/// Cutoff `κ`: `r^N` on `[0, δ/2]`, `1` on `[δ, 1]`, linear in between.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Kappa {
    pub delta: f64,
    pub n: usize,
}

impl Kappa {
    pub fn eval(&self, r: f64) -> f64 {
        let half = self.delta / 2.0;
        if r <= half {
            r.powi(self.n as i32)
        } else if r >= self.delta {
            1.0
        } else {
            let low = half.powi(self.n as i32);
            low + (1.0 - low) * (r - half) / half
        }
    }
}

/// `Q(z) = Σ_{n=0}^{N} q_n(|z|) ρ^n z^n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConePoly {
    pub rho: f64,
    #[serde(rename = "N")]
    pub n: usize,
    pub delta: f64,
    #[serde(rename = "coeffs")]
    pub q: Vec<RadialPoly>,
}

fn horner(coeffs: &[Complex64], w: Complex64) -> Complex64 {
    coeffs
        .iter()
        .rev()
        .fold(Complex64::new(0.0, 0.0), |acc, c| acc * w + c)
}

impl ConePoly {
    pub fn eval(&self, z: Complex64) -> Complex64 {
        let r = z.norm();
        let b: Vec<Complex64> = self.q.iter().map(|q| q.eval(r)).collect();
        horner(&b, z * self.rho)
    }

    pub fn sample(&self, grid: &PolarGrid) -> Result<SampledDiskFunction, GridError> {
        let per_ring: Vec<Vec<Complex64>> = grid
            .radii()
            .iter()
            .map(|&r| self.q.iter().map(|q| q.eval(r)).collect())
            .collect();
        SampledDiskFunction::sample_by_ring(grid, |k, z| horner(&per_ring[k], z * self.rho))
    }
}

/// `q(z, t) = Σ_{n=0}^{N} p_n(t) ρ^n z^n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CylinderPoly {
    pub rho: f64,
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "coeffs")]
    pub p: Vec<RadialPoly>,
}

impl CylinderPoly {
    pub fn eval(&self, z: Complex64, t: f64) -> Complex64 {
        let b: Vec<Complex64> = self.p.iter().map(|p| p.eval(t)).collect();
        horner(&b, z * self.rho)
    }

    pub fn sample(&self, grid: &CylinderGrid) -> Result<SampledCylinderFunction, GridError> {
        let slices = grid
            .t_samples()
            .iter()
            .map(|&t| {
                let b: Vec<Complex64> = self.p.iter().map(|p| p.eval(t)).collect();
                SampledDiskFunction::sample_by_ring(grid.polar(), |_, z| horner(&b, z * self.rho))
            })
            .collect::<Result<Vec<_>, _>>()?;
        SampledCylinderFunction::from_slices(grid, slices)
    }
}

/// Term-by-term account of a cone approximation run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConeApproxReport {
    pub eps: f64,
    pub rho: f64,
    /// `ρ = 1 − 2^{−m}`.
    pub rho_exponent: u32,
    #[serde(rename = "N")]
    pub n: usize,
    /// Cutoff from the a-priori bound `sup·ρ^{N+1}/(1−ρ) < eps`.
    pub n_from_bound: u64,
    pub delta: f64,
    pub dilation_error: f64,
    pub tail_error: f64,
    pub patch_error: f64,
    pub fit_error: f64,
    pub achieved_error: f64,
    /// `achieved_error / eps`.
    pub constant: f64,
    pub degrees: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CylinderApproxReport {
    pub eps: f64,
    pub rho: f64,
    pub rho_exponent: u32,
    #[serde(rename = "N")]
    pub n: usize,
    pub n_from_bound: u64,
    pub dilation_error: f64,
    pub tail_error: f64,
    pub fit_error: f64,
    pub achieved_error: f64,
    pub constant: f64,
    pub degrees: Vec<usize>,
}

fn n_from_bound(sup: f64, rho: f64, eps: f64) -> u64 {
    if sup * rho / (1.0 - rho) < eps {
        return 0;
    }
    let needed = (eps * (1.0 - rho) / sup).ln() / rho.ln();
    (needed.floor().max(0.0)) as u64
}

fn cleaned(c: Complex64, threshold: f64) -> Complex64 {
    if c.norm() < threshold {
        Complex64::new(0.0, 0.0)
    } else {
        c
    }
}

/// Tries `ρ = 1 − 2^{−m}` for `m = 1, 2, …` until `dilation(ρ) < eps`.
fn search_rho(
    eps: f64,
    max_exponent: u32,
    dilation: impl Fn(f64) -> f64,
) -> Result<(u32, f64, f64), ApproxError> {
    let mut best = f64::INFINITY;
    for m in 1..=max_exponent {
        let rho = 1.0 - 0.5f64.powi(m as i32);
        let d = dilation(rho);
        if d < eps {
            return Ok((m, rho, d));
        }
        best = best.min(d);
    }
    Err(ApproxError::RhoSearchExhausted { eps, best })
}

/// Smallest `N` whose measured tail `max_row Σ_{n>N} |row[n]| ρ^n` is below
/// `eps`, with that tail.
fn tail_cutoff(rows: &[Vec<Complex64>], rho: f64, eps: f64) -> (usize, f64) {
    let n_max = rows.first().map_or(0, |r| r.len() - 1);
    let mut tails = vec![0.0f64; n_max + 1];
    for row in rows {
        let mut acc = 0.0;
        let mut power = rho.powi(n_max as i32);
        for n in (0..=n_max).rev() {
            tails[n] = tails[n].max(acc);
            acc += row[n].norm() * power;
            power /= rho;
        }
    }
    let n = (0..=n_max).find(|&n| tails[n] < eps).unwrap_or(n_max);
    (n, tails[n])
}

pub fn cone_approximate(
    f: &SampledDiskFunction,
    eps: f64,
) -> Result<(ConePoly, ConeApproxReport), ApproxError> {
    cone_approximate_with(f, eps, &ApproxOptions::default())
}

pub fn cone_approximate_with(
    f: &SampledDiskFunction,
    eps: f64,
    options: &ApproxOptions,
) -> Result<(ConePoly, ConeApproxReport), ApproxError> {
    check_tolerance(eps)?;
    let grid = f.grid();
    let n_theta = grid.num_angles();
    let table = fourier_table(f, max_cutoff(n_theta))?;
    let sup = sup_norm(f);
    let report = membership_cone_from_table(&table, default_tolerance(sup));
    if !report.verdict {
        return Err(ApproxError::NotMember(report));
    }
    let radii = grid.radii();
    let threshold = CLEAN_THRESHOLD * sup.max(1.0);
    // rows[k][n] = c_n(r_k), n ≥ 0
    let rows: Vec<Vec<Complex64>> = (0..radii.len())
        .map(|k| {
            (0..=table.n_max())
                .map(|n| cleaned(table.coeff(n as i64, k), threshold))
                .collect()
        })
        .collect();

    let (rho_exponent, rho, dilation_error) = search_rho(eps, options.max_rho_exponent, |rho| {
        dilation_on_disk(f, &table, rho)
    })?;
    let (n, tail_error) = tail_cutoff(&rows, rho, eps);

    let partial: Vec<f64> = rows
        .iter()
        .map(|row| row[1..=n].iter().map(|c| c.norm()).sum())
        .collect();
    let reach = partial.iter().take_while(|&&s| s < eps / 2.0).count();
    let delta = if reach >= 2 {
        radii[reach - 1]
    } else {
        radii[1] / 2.0
    };
    let kappa = Kappa { delta, n };

    let fit_tol = eps / (n + 1) as f64;
    let mut q = Vec::with_capacity(n + 1);
    let mut fit_error = 0.0;
    let mut degrees = Vec::with_capacity(n + 1);
    for mode in 0..=n {
        let (w, wy): (Vec<f64>, Vec<Complex64>) = if mode == 0 {
            (vec![1.0; radii.len()], rows.iter().map(|r| r[0]).collect())
        } else {
            let factor = rho.powi(mode as i32);
            radii
                .iter()
                .zip(&rows)
                .map(|(&r, row)| {
                    ((rho * r).powi(mode as i32), row[mode] * (kappa.eval(r) * factor))
                })
                .unzip()
        };
        let (poly, residual) = greedy_fit(radii, &wy, &w, fit_tol, options.max_degree)?;
        fit_error += residual;
        degrees.push(poly.degree());
        q.push(poly);
    }
    let patch_error = radii
        .iter()
        .zip(&rows)
        .map(|(&r, row)| {
            let gap = 1.0 - kappa.eval(r);
            (1..=n)
                .map(|m| gap * row[m].norm() * rho.powi(m as i32))
                .sum::<f64>()
        })
        .fold(0.0, f64::max);

    let poly = ConePoly { rho, n, delta, q };
    let achieved_error = sup_distance(f, &poly.sample(grid)?)?;
    let report = ConeApproxReport {
        eps,
        rho,
        rho_exponent,
        n,
        n_from_bound: n_from_bound(sup, rho, eps),
        delta,
        dilation_error,
        tail_error,
        patch_error,
        fit_error,
        achieved_error,
        constant: achieved_error / eps,
        degrees,
    };
    Ok((poly, report))
}

/// `sup_k sup_j |f̂(ρ r_k e^{iθ_j}, r_k) − f(r_k e^{iθ_j})|`.
fn dilation_on_disk(f: &SampledDiskFunction, table: &CoefficientTable, rho: f64) -> f64 {
    let n_theta = f.grid().num_angles();
    (1..f.grid().num_radii())
        .map(|k| {
            table
                .synthesize_positive(k, rho, table.n_max(), n_theta)
                .iter()
                .zip(f.ring(k))
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max)
        })
        .fold(0.0, f64::max)
}

pub fn cylinder_approximate(
    f: &SampledCylinderFunction,
    eps: f64,
) -> Result<(CylinderPoly, CylinderApproxReport), ApproxError> {
    cylinder_approximate_with(f, eps, &ApproxOptions::default())
}

pub fn cylinder_approximate_with(
    f: &SampledCylinderFunction,
    eps: f64,
    options: &ApproxOptions,
) -> Result<(CylinderPoly, CylinderApproxReport), ApproxError> {
    check_tolerance(eps)?;
    let (report, _) = membership_cylinder(f, None)?;
    if !report.verdict {
        return Err(ApproxError::NotMember(report));
    }
    let grid = f.grid();
    let polar = grid.polar();
    let ts = grid.t_samples();
    let outer = polar.num_radii() - 1;
    let r_outer = polar.radii()[outer];
    let sup = f.sup_norm();
    let threshold = CLEAN_THRESHOLD * sup.max(1.0);
    let tables = f
        .slices()
        .iter()
        .map(|s| fourier_table(s, max_cutoff(polar.num_angles())))
        .collect::<Result<Vec<_>, _>>()?;
    // a[l][n] = a_n(t_l), boundary coefficients of slice l
    let a: Vec<Vec<Complex64>> = tables
        .iter()
        .map(|tab| {
            (0..=tab.n_max())
                .map(|n| cleaned(tab.coeff(n as i64, outer) / r_outer.powi(n as i32), threshold))
                .collect()
        })
        .collect();

    let (rho_exponent, rho, dilation_error) = search_rho(eps, options.max_rho_exponent, |rho| {
        f.slices()
            .iter()
            .zip(&tables)
            .map(|(s, tab)| dilation_on_disk(s, tab, rho))
            .fold(0.0, f64::max)
    })?;
    let (n, tail_error) = tail_cutoff(&a, rho, eps);

    let w = vec![1.0; ts.len()];
    let mut p = Vec::with_capacity(n + 1);
    let mut fit_error = 0.0;
    let mut degrees = Vec::with_capacity(n + 1);
    for mode in 0..=n {
        let y: Vec<Complex64> = a.iter().map(|row| row[mode]).collect();
        let tol = eps * 0.5f64.powi(mode as i32);
        let (poly, residual) = greedy_fit(ts, &y, &w, tol, options.max_degree)?;
        fit_error += residual * rho.powi(mode as i32);
        degrees.push(poly.degree());
        p.push(poly);
    }
    let poly = CylinderPoly { rho, n, p };
    let achieved_error = cylinder_sup_distance(f, &poly.sample(grid)?)?;
    let report = CylinderApproxReport {
        eps,
        rho,
        rho_exponent,
        n,
        n_from_bound: n_from_bound(sup, rho, eps),
        dilation_error,
        tail_error,
        fit_error,
        achieved_error,
        constant: achieved_error / eps,
        degrees,
    };
    Ok((poly, report))
}

/// Polynomial `g` with `sup |g(|z|)·h(z) − 1| ≤ tol` on the grid, for a
/// zero-free radial `h`. Returns `g` and the measured residual.
pub fn radial_invert(h: &SampledDiskFunction, tol: f64) -> Result<(RadialPoly, f64), ApproxError> {
    check_tolerance(tol)?;
    let grid = h.grid();
    let profile: Vec<Complex64> = (0..grid.num_radii()).map(|k| h.ring(k)[0]).collect();
    let variation = (1..grid.num_radii())
        .map(|k| {
            h.ring(k)
                .iter()
                .map(|v| (v - profile[k]).norm())
                .fold(0.0, f64::max)
        })
        .fold(0.0, f64::max);
    if variation >= tol {
        return Err(ApproxError::NotRadial { variation, tol });
    }
    let (_, _, min) = h.min_modulus();
    if min <= f64::EPSILON * sup_norm(h).max(1.0) {
        return Err(ApproxError::Vanishes { min });
    }
    let w: Vec<f64> = profile.iter().map(|v| v.norm()).collect();
    let wy: Vec<Complex64> = profile.iter().map(|v| v.norm() / v).collect();
    let (g, _) = greedy_fit(grid.radii(), &wy, &w, tol / 2.0, DEFAULT_MAX_DEGREE)?;
    let residual = (0..grid.num_radii())
        .map(|k| {
            let gk = g.eval(grid.radii()[k]);
            h.ring(k)
                .iter()
                .map(|v| (gk * v - 1.0).norm())
                .fold(0.0, f64::max)
        })
        .fold(0.0, f64::max);
    if residual > tol {
        return Err(ApproxError::NotRadial { variation, tol });
    }
    Ok((g, residual))
}
