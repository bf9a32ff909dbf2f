//! Bézout equations `x f + y g = 1` in the cylinder algebra for families of
//! polynomials in `z` with `t`-dependent coefficients.
//!
//! The solver only handles pairs that are coprime as polynomials in `z` over
//! all of `C` on every slice (nonvanishing resultant). Pairs that merely have
//! no common zero in the closed disk are rejected.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::approx::{weierstrass_fit, ApproxError, RadialPoly, DEFAULT_MAX_DEGREE};
use crate::expr::{BinOp, Expr, Var};
use crate::fourier::{fourier_table, max_cutoff};
use crate::gelfand::{common_zero_search, ConePoint, ConeResolution, GelfandError};
use crate::grid::{
    CylinderGrid, GridError, PolarGrid, SampledCylinderFunction, SampledDiskFunction,
};
use crate::zpoly::{extended_gcd, ZPoly};

pub const DEFAULT_RESULTANT_MARGIN: f64 = 1e-6;

/// Leading coefficients must exceed this multiple of the coefficient size.
pub const LEADING_MARGIN: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BezoutError {
    #[error("not a polynomial in z with t-dependent coefficients: {0}")]
    NotZPolynomial(String),
    #[error("coefficient of z^{degree} degenerates at t = {t}")]
    DegenerateDegree { t: f64, degree: usize },
    #[error("family vanishes identically at t = {t}")]
    VanishesIdentically { t: f64 },
    #[error(
        "|Res| = {value:e} < {margin:e} at t = {t}: solver restricted to z-coprime families"
    )]
    NotCoprime { t: f64, value: f64, margin: f64 },
    #[error("expected equally many functions and multipliers, got {fs} and {xs}")]
    LengthMismatch { fs: usize, xs: usize },
    #[error(transparent)]
    Fit(#[from] ApproxError),
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error(transparent)]
    Gelfand(#[from] GelfandError),
}

/// `f(z, t) = Σ_j α_j(t) z^j`.
#[derive(Debug, Clone, PartialEq)]
pub enum ZPolyFamily {
    /// Coefficients are extracted from the expression at each `t`.
    Symbolic(Expr),
    /// `α_j` as polynomials in `t`.
    Fitted(Vec<RadialPoly>),
}

impl ZPolyFamily {
    pub fn from_expr(expr: Expr) -> Result<Self, BezoutError> {
        zpoly_of(&expr, 0.5)?;
        Ok(Self::Symbolic(expr))
    }

    pub fn at(&self, t: f64) -> Result<ZPoly, BezoutError> {
        match self {
            Self::Symbolic(e) => zpoly_of(e, t),
            Self::Fitted(coeffs) => Ok(ZPoly::new(coeffs.iter().map(|c| c.eval(t)).collect())),
        }
    }

    /// Per-slice polynomials on `ts`, checking that the degree is the same
    /// on every slice with a leading coefficient bounded away from 0.
    pub fn slices(&self, ts: &[f64]) -> Result<Vec<ZPoly>, BezoutError> {
        let polys = ts
            .iter()
            .map(|&t| {
                let mut p = self.at(t)?;
                p.trim(1e-14 * p.max_abs());
                if p.is_zero() {
                    Err(BezoutError::VanishesIdentically { t })
                } else {
                    Ok(p)
                }
            })
            .collect::<Result<Vec<_>, _>>()?;
        let degree = polys.iter().map(ZPoly::degree).max().unwrap_or(0);
        for (p, &t) in polys.iter().zip(ts) {
            if p.degree() < degree || p.leading().norm() <= LEADING_MARGIN * p.max_abs().max(1.0) {
                return Err(BezoutError::DegenerateDegree { t, degree });
            }
        }
        Ok(polys)
    }

    pub fn sample(&self, grid: &CylinderGrid) -> Result<SampledCylinderFunction, BezoutError> {
        let slices = grid
            .t_samples()
            .iter()
            .map(|&t| {
                let p = self.at(t)?;
                Ok(SampledDiskFunction::sample(grid.polar(), None, |z| p.eval(z))?)
            })
            .collect::<Result<Vec<_>, BezoutError>>()?;
        Ok(SampledCylinderFunction::from_slices(grid, slices)?)
    }
}

impl Serialize for ZPolyFamily {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(2))?;
        match self {
            Self::Symbolic(e) => {
                map.serialize_entry("kind", "symbolic")?;
                map.serialize_entry("expr", &e.to_string())?;
            }
            Self::Fitted(coeffs) => {
                map.serialize_entry("kind", "fitted")?;
                map.serialize_entry("coeffs", coeffs)?;
            }
        }
        map.end()
    }
}

fn z_free(p: &ZPoly, what: &str) -> Result<Complex64, BezoutError> {
    if p.degree() == 0 {
        Ok(p.coeff(0))
    } else {
        Err(BezoutError::NotZPolynomial(format!("{what} depends on z")))
    }
}

/// Exact coefficient extraction at a fixed `t`.
fn zpoly_of(e: &Expr, t: f64) -> Result<ZPoly, BezoutError> {
    let p = match e {
        Expr::Const(c) => ZPoly::constant(*c),
        Expr::Var(Var::Z) => ZPoly::z(),
        Expr::Var(Var::T) => ZPoly::constant(Complex64::new(t, 0.0)),
        Expr::Var(Var::R) => return Err(BezoutError::NotZPolynomial("mentions r = |z|".into())),
        Expr::Neg(a) => -&zpoly_of(a, t)?,
        Expr::Binary(op, a, b) => {
            let (a, b) = (zpoly_of(a, t)?, zpoly_of(b, t)?);
            match op {
                BinOp::Add => &a + &b,
                BinOp::Sub => &a - &b,
                BinOp::Mul => &a * &b,
                BinOp::Div => {
                    let d = z_free(&b, "a denominator")?;
                    if d == Complex64::new(0.0, 0.0) {
                        return Err(BezoutError::NotZPolynomial(format!("division by zero at t = {t}")));
                    }
                    a.scale(1.0 / d)
                }
            }
        }
        Expr::Pow(base, k) => {
            let base = zpoly_of(base, t)?;
            if *k >= 0 {
                base.powi(*k as u32)
            } else {
                ZPoly::constant(z_free(&base, "a base with negative exponent")?.powi(*k))
            }
        }
        Expr::Call(func, arg) => {
            let v = z_free(&zpoly_of(arg, t)?, &format!("the argument of {}", func.name()))?;
            ZPoly::constant(func.apply(v))
        }
    };
    if p.coeffs().iter().all(|c| c.is_finite()) {
        Ok(p)
    } else {
        Err(BezoutError::NotZPolynomial(format!("non-finite coefficient at t = {t}")))
    }
}

/// Determinant of the Sylvester matrix of `f` and `g`.
pub fn resultant(f: &ZPoly, g: &ZPoly) -> Complex64 {
    let (n, m) = (f.degree(), g.degree());
    let size = n + m;
    if size == 0 {
        return Complex64::new(1.0, 0.0);
    }
    let mut s = DMatrix::<Complex64>::zeros(size, size);
    for row in 0..m {
        for j in 0..=n {
            s[(row, row + j)] = f.coeff(n - j);
        }
    }
    for row in 0..n {
        for j in 0..=m {
            s[(m + row, row + j)] = g.coeff(m - j);
        }
    }
    s.lu().determinant()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResultantReport {
    pub min_abs: f64,
    pub t_at_min: f64,
    /// `(t, |Res|)` per t-sample.
    pub values: Vec<(f64, f64)>,
}

pub fn resultant_check(
    f: &ZPolyFamily,
    g: &ZPolyFamily,
    ts: &[f64],
) -> Result<ResultantReport, BezoutError> {
    let fs = f.slices(ts)?;
    let gs = g.slices(ts)?;
    let values: Vec<(f64, f64)> = ts
        .iter()
        .zip(fs.iter().zip(&gs))
        .map(|(&t, (a, b))| (t, resultant(a, b).norm()))
        .collect();
    let (t_at_min, min_abs) = values
        .iter()
        .copied()
        .fold((f64::NAN, f64::INFINITY), |best, v| if v.1 < best.1 { v } else { best });
    Ok(ResultantReport {
        min_abs,
        t_at_min,
        values,
    })
}

/// The unique solution of `x f + y g = 1` with `deg x < deg g` and
/// `deg y < deg f`, for coprime `f`, `g`.
pub fn minimal_bezout(f: &ZPoly, g: &ZPoly) -> Option<(ZPoly, ZPoly)> {
    let (d, s, _) = extended_gcd(f, g, 1e-12);
    if d.degree() > 0 || d.is_zero() {
        return None;
    }
    if g.degree() == 0 {
        return Some((ZPoly::zero(), ZPoly::constant(1.0 / g.coeff(0))));
    }
    let x = s.scale(1.0 / d.coeff(0)).div_rem(g).1;
    let one = ZPoly::constant(Complex64::new(1.0, 0.0));
    let y = (&one - &(&x * f)).div_rem(g).0;
    Some((x, y))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SliceSolution {
    pub t: f64,
    pub x: ZPoly,
    pub y: ZPoly,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BezoutCertificate {
    pub x: ZPolyFamily,
    pub y: ZPolyFamily,
    /// `sup |x f + y g − 1|` on the cylinder grid.
    pub residual: f64,
    pub tolerance: f64,
    pub valid: bool,
    pub resultant: ResultantReport,
    /// Largest coefficient of `x_t f_t + y_t g_t − 1` over the t-samples,
    /// before the coefficient curves are fitted.
    pub slice_residual: f64,
    pub slices: Vec<SliceSolution>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BezoutOptions {
    pub margin: f64,
    pub max_degree: usize,
}

impl Default for BezoutOptions {
    fn default() -> Self {
        Self {
            margin: DEFAULT_RESULTANT_MARGIN,
            max_degree: DEFAULT_MAX_DEGREE,
        }
    }
}

pub fn bezout_solve(
    f: &ZPolyFamily,
    g: &ZPolyFamily,
    grid: &CylinderGrid,
    tol: f64,
    options: &BezoutOptions,
) -> Result<BezoutCertificate, BezoutError> {
    let ts = grid.t_samples();
    let resultant = resultant_check(f, g, ts)?;
    if resultant.min_abs.is_nan() || resultant.min_abs < options.margin {
        return Err(BezoutError::NotCoprime {
            t: resultant.t_at_min,
            value: resultant.min_abs,
            margin: options.margin,
        });
    }
    let fs = f.slices(ts)?;
    let gs = g.slices(ts)?;
    let one = ZPoly::constant(Complex64::new(1.0, 0.0));
    let mut slices = Vec::with_capacity(ts.len());
    let mut slice_residual = 0.0f64;
    for ((&t, fp), gp) in ts.iter().zip(&fs).zip(&gs) {
        let (x, y) = minimal_bezout(fp, gp).ok_or(BezoutError::NotCoprime {
            t,
            value: 0.0,
            margin: options.margin,
        })?;
        let defect = &(&(&x * fp) + &(&y * gp)) - &one;
        slice_residual = slice_residual.max(defect.max_abs());
        slices.push(SliceSolution { t, x, y });
    }
    let sampled_f = f.sample(grid)?;
    let sampled_g = g.sample(grid)?;
    let scale = sampled_f.sup_norm().max(sampled_g.sup_norm()).max(1.0);
    let (n, m) = (fs[0].degree(), gs[0].degree());
    let fit_tol = tol / (4.0 * (n + m).max(1) as f64 * scale);
    let fit_curve = |count: usize, pick: &dyn Fn(&SliceSolution) -> &ZPoly| {
        (0..count)
            .map(|j| {
                let samples: Vec<(f64, Complex64)> =
                    slices.iter().map(|s| (s.t, pick(s).coeff(j))).collect();
                weierstrass_fit(&samples, fit_tol, options.max_degree)
            })
            .collect::<Result<Vec<_>, _>>()
    };
    let x = ZPolyFamily::Fitted(fit_curve(m, &|s| &s.x)?);
    let y = ZPolyFamily::Fitted(fit_curve(n, &|s| &s.y)?);
    let residual = verify_bezout(
        &[sampled_f, sampled_g],
        &[x.sample(grid)?, y.sample(grid)?],
    )?;
    Ok(BezoutCertificate {
        x,
        y,
        residual,
        tolerance: tol,
        valid: residual <= tol,
        resultant,
        slice_residual,
        slices,
    })
}

/// `sup |Σ_j x_j f_j − 1|` over the common cylinder grid.
pub fn verify_bezout(
    fs: &[SampledCylinderFunction],
    xs: &[SampledCylinderFunction],
) -> Result<f64, BezoutError> {
    if fs.len() != xs.len() || fs.is_empty() {
        return Err(BezoutError::LengthMismatch {
            fs: fs.len(),
            xs: xs.len(),
        });
    }
    let grid = fs[0].grid();
    if fs.iter().chain(xs).any(|h| h.grid() != grid) {
        return Err(GridError::GridMismatch.into());
    }
    let mut worst = 0.0f64;
    for l in 0..grid.t_samples().len() {
        let mut total: Vec<Complex64> = vec![Complex64::new(-1.0, 0.0); fs[0].slice(l).values().count()];
        for (f, x) in fs.iter().zip(xs) {
            for ((acc, a), b) in total.iter_mut().zip(f.slice(l).values()).zip(x.slice(l).values()) {
                *acc += a * b;
            }
        }
        worst = total.iter().map(|v| v.norm()).fold(worst, f64::max);
    }
    Ok(worst)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoronaGapReport {
    /// `min |z| + |1 − |z|²|` over the disk grid.
    pub downstairs_min: f64,
    pub downstairs_argmin_radii: Vec<f64>,
    /// `min |ẑ| + |(1 − |z|²)^|` over the cone grid.
    pub upstairs_min: f64,
    pub upstairs_argmin: ConePoint,
    /// `|c_{−1}(1)|` of `conj(z)`.
    pub conj_defect: f64,
    pub narrative: String,
}

pub fn corona_gap_demo(grid: &PolarGrid, res: ConeResolution) -> Result<CoronaGapReport, BezoutError> {
    let z = SampledDiskFunction::sample(grid, None, |z| z)?;
    let bump = SampledDiskFunction::sample(grid, None, |z| Complex64::new(1.0 - z.norm_sqr(), 0.0))?;
    let ring_min: Vec<f64> = (0..grid.num_radii())
        .map(|k| {
            z.ring(k)
                .iter()
                .zip(bump.ring(k))
                .map(|(a, b)| a.norm() + b.norm())
                .fold(f64::INFINITY, f64::min)
        })
        .collect();
    let downstairs_min = ring_min.iter().copied().fold(f64::INFINITY, f64::min);
    let downstairs_argmin_radii = ring_min
        .iter()
        .zip(grid.radii())
        .filter(|(m, _)| **m <= downstairs_min + 1e-12)
        .map(|(_, &r)| r)
        .collect();
    let upstairs = common_zero_search(&[z, bump], res)?;
    let conj = SampledDiskFunction::sample(grid, None, |z| z.conj())?;
    let table = fourier_table(&conj, max_cutoff(grid.num_angles())).expect("cutoff is admissible");
    let conj_defect = table.coeff(-1, grid.num_radii() - 1).norm();
    Ok(CoronaGapReport {
        downstairs_min,
        downstairs_argmin_radii,
        upstairs_min: upstairs.min,
        upstairs_argmin: upstairs.argmin,
        conj_defect,
        narrative: "z and 1-|z|^2 have no common zero on the closed disk, but both transforms \
                    vanish at the cone point (0, 1). A solution of a*z + b*(1-|z|^2) = 1 would \
                    restrict to a*z = 1 on the unit circle, so a = conj(z) there; conj(z) has \
                    the negative mode c_-1 = 1 and is not a boundary value of the algebra."
            .into(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;
    use crate::fourier::membership_cylinder;
    use num_rational::Ratio;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn family(src: &str) -> ZPolyFamily {
        ZPolyFamily::from_expr(parse(src).unwrap()).unwrap()
    }

    fn ts() -> Vec<f64> {
        CylinderGrid::default().t_samples().to_vec()
    }

    #[test]
    fn coefficient_extraction() {
        let p = family("(z + i*t)*(z - i*t) - 3*z/2 + exp(t)").at(0.5).unwrap();
        assert_eq!(p.degree(), 2);
        assert!((p.coeff(0) - c(0.25 + 0.5f64.exp(), 0.0)).norm() < 1e-15);
        assert!((p.coeff(1) - c(-1.5, 0.0)).norm() < 1e-15);
        assert_eq!(p.coeff(2), c(1.0, 0.0));
        for bad in ["r*z", "conj(z)", "1/z", "z^-1", "exp(z)"] {
            assert!(
                matches!(ZPolyFamily::from_expr(parse(bad).unwrap()), Err(BezoutError::NotZPolynomial(_))),
                "{bad}"
            );
        }
    }

    #[test]
    fn resultant_examples() {
        let rep = resultant_check(&family("z + i*t"), &family("z^2 - (1 - t^2)"), &ts()).unwrap();
        assert!(rep.values.iter().all(|(_, v)| (v - 1.0).abs() < 1e-14));

        let rep = resultant_check(&family("z - t"), &family("z + t"), &ts()).unwrap();
        for (t, v) in &rep.values {
            assert!((v - 2.0 * t).abs() < 1e-14);
        }
        assert_eq!(rep.min_abs, 0.0);
        assert_eq!(rep.t_at_min, 0.0);

        let rep = resultant_check(&family("z"), &family("z - 1"), &ts()).unwrap();
        assert!((rep.min_abs - 1.0).abs() < 1e-15);

        assert!(matches!(
            resultant_check(&family("t*z^2 + 1"), &family("z"), &ts()),
            Err(BezoutError::DegenerateDegree { t, .. }) if t == 0.0
        ));
        assert!(matches!(
            resultant_check(&family("t*z"), &family("z"), &ts()),
            Err(BezoutError::VanishesIdentically { t }) if t == 0.0
        ));
    }

    #[test]
    fn resultant_matches_root_product() {
        // Res(f, g) = lc(f)^m Π g(roots of f) for f = (z-a)(z-b)
        let (a, b) = (c(0.3, -0.2), c(-1.1, 0.5));
        let f = &ZPoly::new(vec![-a, c(1.0, 0.0)]) * &ZPoly::new(vec![-b, c(1.0, 0.0)]);
        let g = ZPoly::new(vec![c(0.7, 0.1), c(-0.4, 0.0), c(0.0, 2.0), c(1.5, 0.0)]);
        let expected = g.eval(a) * g.eval(b);
        assert!((resultant(&f, &g) - expected).norm() < 1e-12);
    }

    #[test]
    fn bezout_witness_pair() {
        let grid = CylinderGrid::default();
        let cert = bezout_solve(
            &family("z + i*t"),
            &family("z^2 - (1 - t^2)"),
            &grid,
            1e-10,
            &BezoutOptions::default(),
        )
        .unwrap();
        assert!(cert.valid);
        assert!(cert.residual < 1e-10);
        for s in &cert.slices {
            assert!((s.x.coeff(0) - c(0.0, -s.t)).norm() < 1e-12);
            assert!((s.x.coeff(1) - 1.0).norm() < 1e-12);
            assert!((s.y.coeff(0) + 1.0).norm() < 1e-12);
        }
        let x = cert.x.sample(&grid).unwrap();
        let expected = SampledCylinderFunction::sample(&grid, |z, t| z - c(0.0, t)).unwrap();
        assert!(crate::grid::cylinder_sup_distance(&x, &expected).unwrap() < 1e-6);
        assert!(membership_cylinder(&x, None).unwrap().0.verdict);
        assert!(membership_cylinder(&cert.y.sample(&grid).unwrap(), None).unwrap().0.verdict);
    }

    #[test]
    fn bezout_constant_pair() {
        let grid = CylinderGrid::default();
        let cert = bezout_solve(&family("z"), &family("z - 1"), &grid, 1e-12, &BezoutOptions::default()).unwrap();
        assert!(cert.residual < 1e-15);
        let (x, y) = (cert.x.at(0.3).unwrap(), cert.y.at(0.3).unwrap());
        assert!((x.coeff(0) - 1.0).norm() < 1e-15);
        assert!((y.coeff(0) + 1.0).norm() < 1e-15);
    }

    #[test]
    fn bezout_rejects_common_roots() {
        let err = bezout_solve(
            &family("z - t"),
            &family("z + t"),
            &CylinderGrid::default(),
            1e-10,
            &BezoutOptions::default(),
        )
        .unwrap_err();
        assert!(matches!(err, BezoutError::NotCoprime { t, .. } if t == 0.0));
        assert!(err.to_string().contains("z-coprime"));
    }

    #[test]
    fn verify_examples() {
        let grid = CylinderGrid::default();
        let s = |f: fn(Complex64, f64) -> Complex64| SampledCylinderFunction::sample(&grid, f).unwrap();
        let f = s(|z, t| z + c(0.0, t));
        let g = s(|z, t| z * z - (1.0 - t * t));
        let r = verify_bezout(&[f.clone(), g.clone()], &[s(|z, t| z - c(0.0, t)), s(|_, _| c(-1.0, 0.0))]).unwrap();
        assert!(r < 1e-15);
        let one = s(|_, _| c(1.0, 0.0));
        assert_eq!(verify_bezout(std::slice::from_ref(&one), std::slice::from_ref(&one)).unwrap(), 0.0);
        // pinned by grid oracle: sup |i t z - t^2| = 2 at t = 1, z = i
        let r = verify_bezout(&[f, g], &[s(|z, _| z), s(|_, _| c(-1.0, 0.0))]).unwrap();
        assert_eq!(r, 2.0);
        assert!(matches!(
            verify_bezout(std::slice::from_ref(&one), &[]),
            Err(BezoutError::LengthMismatch { fs: 1, xs: 0 })
        ));
    }

    #[test]
    fn corona_gap_values() {
        let rep = corona_gap_demo(&PolarGrid::default(), ConeResolution::default()).unwrap();
        assert!((rep.downstairs_min - 1.0).abs() < 1e-12);
        assert_eq!(rep.downstairs_argmin_radii, vec![0.0, 1.0]);
        assert!(rep.upstairs_min < 1e-9);
        assert!(rep.upstairs_argmin.w.norm() < 1e-15 && rep.upstairs_argmin.t == 1.0);
        assert!((rep.conj_defect - 1.0).abs() < 1e-12);
    }

    type Q = Ratio<i128>;

    fn q_trim(mut p: Vec<Q>) -> Vec<Q> {
        while p.last().is_some_and(|c| *c == Q::from(0)) {
            p.pop();
        }
        p
    }

    fn q_sub(a: &[Q], b: &[Q]) -> Vec<Q> {
        let n = a.len().max(b.len());
        let z = Q::from(0);
        q_trim((0..n).map(|j| *a.get(j).unwrap_or(&z) - *b.get(j).unwrap_or(&z)).collect())
    }

    fn q_mul(a: &[Q], b: &[Q]) -> Vec<Q> {
        if a.is_empty() || b.is_empty() {
            return vec![];
        }
        let mut out = vec![Q::from(0); a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                out[i + j] += x * y;
            }
        }
        q_trim(out)
    }

    fn q_divrem(a: &[Q], b: &[Q]) -> (Vec<Q>, Vec<Q>) {
        let mut rem = a.to_vec();
        let d = b.len() - 1;
        if rem.len() <= d {
            return (vec![], q_trim(rem));
        }
        let mut quot = vec![Q::from(0); rem.len() - d];
        for i in (0..quot.len()).rev() {
            let q = rem[i + d] / b[d];
            quot[i] = q;
            for (j, c) in b.iter().enumerate() {
                rem[i + j] -= q * c;
            }
        }
        rem.truncate(d);
        (q_trim(quot), q_trim(rem))
    }

    /// Minimal Bézout pair in exact rational arithmetic.
    fn q_bezout(f: &[Q], g: &[Q]) -> (Vec<Q>, Vec<Q>) {
        let (mut r0, mut r1) = (f.to_vec(), g.to_vec());
        let (mut s0, mut s1) = (vec![Q::from(1)], vec![]);
        while !r1.is_empty() {
            let (q, r) = q_divrem(&r0, &r1);
            let s = q_sub(&s0, &q_mul(&q, &s1));
            r0 = std::mem::replace(&mut r1, r);
            s0 = std::mem::replace(&mut s1, s);
        }
        assert_eq!(r0.len(), 1, "oracle pair must be coprime");
        let x: Vec<Q> = s0.iter().map(|c| c / r0[0]).collect();
        let x = q_divrem(&x, g).1;
        let y = q_divrem(&q_sub(&[Q::from(1)], &q_mul(&x, f)), g).0;
        (x, y)
    }

    #[test]
    fn euclid_matches_rational_oracle() {
        let pairs: [(&[i128], &[i128]); 5] = [
            (&[0, 1], &[-1, 1]),
            (&[-1, 2, 1], &[3, -5]),
            (&[2, 0, -3, 1], &[1, 1, 1]),
            (&[5, -1, 0, 0, 2], &[-7, 3, 1]),
            (&[1, 1, 1, 1], &[2, 0, 0, 0, 0, 1]),
        ];
        for (fi, gi) in pairs {
            let fq: Vec<Q> = fi.iter().map(|&v| Q::from(v)).collect();
            let gq: Vec<Q> = gi.iter().map(|&v| Q::from(v)).collect();
            let (xq, yq) = q_bezout(&fq, &gq);
            let to_z = |v: &[i128]| ZPoly::new(v.iter().map(|&x| c(x as f64, 0.0)).collect());
            let (x, y) = minimal_bezout(&to_z(fi), &to_z(gi)).unwrap();
            for (exact, approx) in [(&xq, &x), (&yq, &y)] {
                assert_eq!(exact.len(), approx.coeffs().len(), "{fi:?} {gi:?}");
                for (j, e) in exact.iter().enumerate() {
                    let e = *e.numer() as f64 / *e.denom() as f64;
                    assert!((approx.coeff(j) - e).norm() <= 1e-12 * e.abs().max(1.0));
                }
            }
        }
    }

    #[test]
    fn residual_tracks_resultant_margin() {
        // per-slice floating error grows like 1/|Res|
        let grid = CylinderGrid::default();
        for a in [1.0, 0.1, 0.01] {
            let g = format!("z^2 - {}", a * a);
            let f = family(&format!("z + i*t + {}", 1.5 * a));
            let cert = bezout_solve(&f, &family(&g), &grid, 1e-8, &BezoutOptions::default()).unwrap();
            assert!(cert.valid, "a = {a}: {}", cert.residual);
            assert!(
                cert.slice_residual <= 1e-14 / cert.resultant.min_abs,
                "a = {a}: {}",
                cert.slice_residual
            );
        }
    }
}
