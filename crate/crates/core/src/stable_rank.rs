//! Stable-rank witnesses: a zero-free pair whose second entry vanishes on a
//! closed curve, along which the first entry has nonzero index, and the
//! random-shift procedure that makes a pair zero-free on the spectrum.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::expr::{parse, EvalError, Expr};
use crate::gelfand::{
    common_zero_search, cone_grid_values, symbolic_transform, ConePoint, ConeResolution,
    ConeTransform, GelfandError,
};
use crate::grid::{CylinderGrid, GridError, PolarGrid, SampledCylinderFunction, SampledDiskFunction};
use crate::winding::{rouche_zero_assert, winding_number_with_limit, ClosedCurveSamples, RoucheReport, WindingError};

pub const DEFAULT_CURVE_SAMPLES: usize = 4096;
pub const DEFAULT_RNG_SEED: u64 = 0x5eed_2024;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum WitnessError {
    #[error("winding along the zero curve is inconclusive ({0}); increase the curve samples")]
    Winding(WindingError),
    #[error("no shift found in {tries} tries; best margin {best_margin:e} against {margin:e}")]
    TriesExhausted {
        tries: u32,
        best_margin: f64,
        margin: f64,
    },
    #[error(transparent)]
    Gelfand(#[from] GelfandError),
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Rouche(WindingError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Conclusion {
    ObstructionFound,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WitnessReport {
    pub pair_names: [String; 2],
    /// `min Σ_j |f̂_j|` over the spectrum grid.
    pub u2_margin: f64,
    /// Lower bound on the margin implied by an explicit Bézout identity,
    /// when one is known.
    pub certified_margin: Option<f64>,
    /// Points `w = x + i t` of the zero curve of the second entry.
    pub curve: Vec<Complex64>,
    /// Largest `|ĝ|` along the curve.
    pub zero_set_residual: f64,
    /// Values of the restricted first entry along the curve.
    pub restricted_map: Vec<Complex64>,
    pub restricted_map_winding: i64,
    pub winding_residue: f64,
    /// `sup |x f + y g − 1|` for the explicit identity, when one is known.
    pub identity_residual: Option<f64>,
    pub max_abs_x: f64,
    pub conclusion: Conclusion,
}

impl WitnessReport {
    pub fn curve_csv(&self) -> String {
        let mut out = String::from("x,t,map_re,map_im\n");
        for (w, m) in self.curve.iter().zip(&self.restricted_map) {
            out.push_str(&format!("{:.16e},{:.16e},{:.16e},{:.16e}\n", w.re, w.im, m.re, m.im));
        }
        out
    }
}

fn conclude(margin: f64, winding: i64) -> Conclusion {
    if margin > 0.0 && winding != 0 {
        Conclusion::ObstructionFound
    } else {
        Conclusion::Inconclusive
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WitnessParams {
    pub grid: PolarGrid,
    pub cone_resolution: ConeResolution,
    pub t_steps: usize,
    pub curve_samples: usize,
    pub residue_limit: f64,
}

impl Default for WitnessParams {
    fn default() -> Self {
        Self {
            grid: PolarGrid::default(),
            cone_resolution: ConeResolution::default(),
            t_steps: crate::grid::DEFAULT_T_STEPS,
            curve_samples: DEFAULT_CURVE_SAMPLES,
            residue_limit: crate::winding::RESIDUE_LIMIT,
        }
    }
}

pub const CONE_F: &str = "z + i*(r - 0.5)";
pub const CONE_G: &str = "z^2 - r^2*(1 - r)^2";
pub const CYLINDER_F: &str = "z + i*t";
pub const CYLINDER_G: &str = "z^2 - (1 - t^2)";

fn sample_expr(e: &Expr, grid: &PolarGrid) -> Result<SampledDiskFunction, GridError> {
    SampledDiskFunction::try_sample(grid, None, |z| e.eval(z, 0.0))
}

/// The zero curve `x = ±t(1−t)` of `ĝ` in the plane `y = 0`, written as
/// `w = x + i t`: up the `+` branch from `t = 0`, back down the `−` branch.
pub fn cone_zero_curve(samples: usize) -> Vec<(f64, f64)> {
    let half = samples / 2;
    let up = (0..half).map(|j| {
        let t = j as f64 / half as f64;
        (t * (1.0 - t), t)
    });
    let down = (0..half).map(|j| {
        let t = 1.0 - j as f64 / half as f64;
        (-t * (1.0 - t), t)
    });
    up.chain(down).collect()
}

pub fn cone_bsr_witness(params: &WitnessParams) -> Result<WitnessReport, WitnessError> {
    let f = parse(CONE_F).expect("witness expression parses");
    let g = parse(CONE_G).expect("witness expression parses");
    let fs = sample_expr(&f, &params.grid)?;
    let gs = sample_expr(&g, &params.grid)?;
    let u2 = common_zero_search(&[fs, gs], params.cone_resolution)?;

    let samples = params.curve_samples.max(8) & !1;
    let mut curve = Vec::with_capacity(samples);
    let mut restricted_map = Vec::with_capacity(samples);
    let mut zero_set_residual = 0.0f64;
    let mut max_abs_x = 0.0f64;
    for (x, t) in cone_zero_curve(samples) {
        let p = ConePoint::new(Complex64::new(x, 0.0), t)?;
        zero_set_residual = zero_set_residual.max(symbolic_transform(&g, &p, None)?.norm());
        let fv = symbolic_transform(&f, &p, None)?;
        // in the plane y = 0 the value x + i(t − 1/2) is F̃(w) = w − i/2
        curve.push(Complex64::new(x, t));
        restricted_map.push(fv);
        max_abs_x = max_abs_x.max(x.abs());
    }
    let w = winding_number_with_limit(
        &ClosedCurveSamples::new(restricted_map.clone()).map_err(WitnessError::Winding)?,
        params.residue_limit,
    )
        .map_err(WitnessError::Winding)?;
    Ok(WitnessReport {
        pair_names: [CONE_F.into(), CONE_G.into()],
        u2_margin: u2.min,
        certified_margin: None,
        curve,
        zero_set_residual,
        restricted_map,
        restricted_map_winding: w.index,
        winding_residue: w.residue,
        identity_residual: None,
        max_abs_x,
        conclusion: conclude(u2.min, w.index),
    })
}

/// Walks the circle `x² + t² = 1` in the `(x, t)` plane, `t ∈ [−1, 1]`,
/// starting at `(1, 0)`.
pub fn cylinder_zero_curve(samples: usize) -> Vec<(f64, f64)> {
    (0..samples)
        .map(|j| {
            let phi = 2.0 * PI * j as f64 / samples as f64;
            (phi.cos(), phi.sin())
        })
        .collect()
}

pub fn cylinder_bsr_witness(params: &WitnessParams) -> Result<WitnessReport, WitnessError> {
    let cyl = CylinderGrid::uniform(params.grid.clone(), params.t_steps)?;
    let i = Complex64::new(0.0, 1.0);
    let f = SampledCylinderFunction::sample(&cyl, |z, t| z + i * t)?;
    let g = SampledCylinderFunction::sample(&cyl, |z, t| z * z - (1.0 - t * t))?;
    let x = SampledCylinderFunction::sample(&cyl, |z, t| z - i * t)?;

    let mut u2_margin = f64::INFINITY;
    let mut identity_residual = 0.0f64;
    let mut sup_x = 0.0f64;
    for l in 0..cyl.t_samples().len() {
        let values = f.slice(l).values().zip(g.slice(l).values()).zip(x.slice(l).values());
        for ((fv, gv), xv) in values {
            u2_margin = u2_margin.min(fv.norm() + gv.norm());
            identity_residual = identity_residual.max((xv * fv - gv - 1.0).norm());
            sup_x = sup_x.max(xv.norm());
        }
    }
    // |x f − g| = 1 gives |f| + |g| ≥ 1/max(sup|x|, 1)
    let certified_margin = 1.0 / sup_x.max(1.0);

    let mut curve = Vec::with_capacity(params.curve_samples);
    let mut restricted_map = Vec::with_capacity(params.curve_samples);
    let mut zero_set_residual = 0.0f64;
    let mut max_abs_x = 0.0f64;
    for (xc, t) in cylinder_zero_curve(params.curve_samples.max(8)) {
        let z = Complex64::new(xc, 0.0);
        zero_set_residual = zero_set_residual.max((z * z - (1.0 - t * t)).norm());
        curve.push(Complex64::new(xc, t));
        restricted_map.push(z + i * t);
        max_abs_x = max_abs_x.max(xc.abs());
    }
    let w = winding_number_with_limit(
        &ClosedCurveSamples::new(restricted_map.clone()).map_err(WitnessError::Winding)?,
        params.residue_limit,
    )
        .map_err(WitnessError::Winding)?;
    Ok(WitnessReport {
        pair_names: [CYLINDER_F.into(), CYLINDER_G.into()],
        u2_margin,
        certified_margin: Some(certified_margin),
        curve,
        zero_set_residual,
        restricted_map,
        restricted_map_winding: w.index,
        winding_residue: w.residue,
        identity_residual: Some(identity_residual),
        max_abs_x,
        conclusion: conclude(u2_margin.min(certified_margin), w.index),
    })
}

/// Where `(p̂, q̂)` is sampled.
#[derive(Debug, Clone, PartialEq)]
pub enum Spectrum {
    /// The cone `K`; `p`, `q` are expressions in `z`, `r`.
    Cone {
        grid: PolarGrid,
        resolution: ConeResolution,
    },
    /// `D̄ × [0, 1]`; `p`, `q` are expressions in `z`, `t`.
    Cylinder { grid: CylinderGrid },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PerturbationCertificate {
    pub eps: Complex64,
    pub eta: Complex64,
    /// `min |p̂ − ε| + |q̂ − η|` over the spectrum grid after the shift.
    pub margin: f64,
    pub unperturbed_margin: f64,
    pub requested_margin: f64,
    /// Number of random draws; 0 when the unshifted pair already works.
    pub tries: u32,
    /// Radius `2^{−m}` of the disk of the successful draw (0 for no shift).
    pub radius: f64,
    pub seed: u64,
}

fn spectrum_values(e: &Expr, spectrum: &Spectrum) -> Result<Vec<Complex64>, WitnessError> {
    match spectrum {
        Spectrum::Cone { grid, resolution } => {
            let f = sample_expr(e, grid)?;
            let transform = ConeTransform::new(&f)?;
            Ok(cone_grid_values(&transform, *resolution).values)
        }
        Spectrum::Cylinder { grid } => {
            let f = SampledCylinderFunction::try_sample(grid, |z, t| e.eval(z, t))?;
            Ok(f.slices().iter().flat_map(|s| s.values()).collect())
        }
    }
}

fn shifted_margin(p: &[Complex64], q: &[Complex64], eps: Complex64, eta: Complex64) -> f64 {
    p.iter()
        .zip(q)
        .map(|(a, b)| (a - eps).norm() + (b - eta).norm())
        .fold(f64::INFINITY, f64::min)
}

fn uniform_in_disk(rng: &mut ChaCha8Rng, radius: f64) -> Complex64 {
    let u: f64 = rng.random();
    let v: f64 = rng.random();
    Complex64::from_polar(radius * u.sqrt(), 2.0 * PI * v)
}

/// Shifts `(p, q)` by `(ε, η)` drawn uniformly from disks of radius
/// `2^{−m}`, `m = 1, …, max_tries`, until the shifted pair stays at least
/// `margin` away from a common zero on the spectrum grid.
pub fn tsr_perturb(
    p: &Expr,
    q: &Expr,
    spectrum: &Spectrum,
    margin: f64,
    max_tries: u32,
    seed: u64,
) -> Result<PerturbationCertificate, WitnessError> {
    let pv = spectrum_values(p, spectrum)?;
    let qv = spectrum_values(q, spectrum)?;
    let zero = Complex64::new(0.0, 0.0);
    let unperturbed_margin = shifted_margin(&pv, &qv, zero, zero);
    let mut cert = PerturbationCertificate {
        eps: zero,
        eta: zero,
        margin: unperturbed_margin,
        unperturbed_margin,
        requested_margin: margin,
        tries: 0,
        radius: 0.0,
        seed,
    };
    if unperturbed_margin > margin {
        return Ok(cert);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = unperturbed_margin;
    for m in 1..=max_tries {
        let radius = 0.5f64.powi(m as i32);
        let eps = uniform_in_disk(&mut rng, radius);
        let eta = uniform_in_disk(&mut rng, radius);
        let achieved = shifted_margin(&pv, &qv, eps, eta);
        best = best.max(achieved);
        if achieved > margin {
            cert.eps = eps;
            cert.eta = eta;
            cert.margin = achieved;
            cert.tries = m;
            cert.radius = radius;
            return Ok(cert);
        }
    }
    Err(WitnessError::TriesExhausted {
        tries: max_tries,
        best_margin: best,
        margin,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TsrLowerReport {
    pub rouche: RoucheReport,
    pub conclusion: String,
}

/// A `u` within `1/2` of `z` winds once around the unit circle, so it has a
/// zero and is not invertible.
pub fn tsr_lower_demo(u: &SampledDiskFunction) -> Result<TsrLowerReport, WitnessError> {
    let rouche = rouche_zero_assert(u).map_err(WitnessError::Rouche)?;
    let conclusion = if rouche.index != 0 {
        format!(
            "u winds {} time(s) around 0 on the unit circle and has a zero in the disk, so it is not invertible; \
             no invertible element lies within 1/2 of z",
            rouche.index
        )
    } else {
        "index 0 on the unit circle; no conclusion".into()
    };
    Ok(TsrLowerReport { rouche, conclusion })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn cone() -> Spectrum {
        Spectrum::Cone {
            grid: PolarGrid::default(),
            resolution: ConeResolution::default(),
        }
    }

    #[test]
    fn cone_witness() {
        let rep = cone_bsr_witness(&WitnessParams::default()).unwrap();
        // pinned by an independent scan of the same cone grid
        assert!((rep.u2_margin - 0.0625).abs() < 1e-12);
        assert!(rep.zero_set_residual < 1e-10);
        assert_eq!(rep.restricted_map_winding, 1);
        assert_eq!(rep.conclusion, Conclusion::ObstructionFound);
        assert_eq!(rep.max_abs_x, 0.25);
        // t = 1/2 on the + branch
        let mid = rep.curve.iter().position(|w| *w == c(0.25, 0.5)).unwrap();
        assert!((rep.restricted_map[mid] - c(0.25, 0.0)).norm() < 1e-15);
        // F̃(w) = w − i/2 along the whole curve
        for (w, m) in rep.curve.iter().zip(&rep.restricted_map) {
            assert!((m - (w - c(0.0, 0.5))).norm() < 1e-15);
        }
    }

    #[test]
    fn cone_curve_geometry() {
        let curve = cone_zero_curve(4096);
        assert_eq!(curve.len(), 4096);
        assert_eq!(curve[0], (0.0, 0.0));
        assert_eq!(curve[2048], (0.0, 1.0));
        let (argmax, max) = curve
            .iter()
            .map(|p| p.0.abs())
            .enumerate()
            .fold((0, 0.0), |b, (i, v)| if v > b.1 { (i, v) } else { b });
        assert_eq!(max, 0.25);
        assert_eq!(curve[argmax].1, 0.5);
    }

    #[test]
    fn cylinder_witness() {
        let rep = cylinder_bsr_witness(&WitnessParams::default()).unwrap();
        assert!(rep.identity_residual.unwrap() < 1e-12);
        assert_eq!(rep.restricted_map_winding, 1);
        assert_eq!(rep.conclusion, Conclusion::ObstructionFound);
        // pinned by grid oracle: min |z+it| + |z²−(1−t²)| = 3/4 at z = −i/2, t = 1
        assert!((rep.u2_margin - 0.75).abs() < 1e-12);
        assert_eq!(rep.certified_margin, Some(0.5));
        assert_eq!(rep.restricted_map[0], c(1.0, 0.0));
        assert!(rep.zero_set_residual < 1e-15);
        assert!(rep.curve_csv().starts_with("x,t,map_re,map_im\n"));
    }

    #[test]
    fn perturbation_examples() {
        let pair = |a: &str, b: &str| (parse(a).unwrap(), parse(b).unwrap());
        let (p, q) = pair("z", "r");
        let cert = tsr_perturb(&p, &q, &cone(), 1e-3, 20, DEFAULT_RNG_SEED).unwrap();
        assert_eq!(cert.unperturbed_margin, 0.0);
        assert!(cert.margin > 1e-3 && cert.tries >= 1);
        assert!(cert.eps.norm() <= cert.radius && cert.eta.norm() <= cert.radius);

        let (p, q) = pair("z", "1 - r^2");
        let cert = tsr_perturb(&p, &q, &cone(), 1e-4, 20, DEFAULT_RNG_SEED).unwrap();
        assert!(cert.unperturbed_margin < 1e-12);
        assert!(cert.margin > 1e-4);

        let (p, q) = pair("1", "z");
        let cert = tsr_perturb(&p, &q, &cone(), 1e-4, 20, DEFAULT_RNG_SEED).unwrap();
        assert_eq!(cert.tries, 0);
        assert_eq!((cert.eps, cert.eta), (c(0.0, 0.0), c(0.0, 0.0)));
        assert!(cert.margin >= 1.0);
    }

    #[test]
    fn perturbation_is_seed_deterministic() {
        let (p, q) = (parse("z").unwrap(), parse("r").unwrap());
        let a = tsr_perturb(&p, &q, &cone(), 1e-4, 20, 7).unwrap();
        let b = tsr_perturb(&p, &q, &cone(), 1e-4, 20, 7).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn perturbation_catalog() {
        let cylinder = Spectrum::Cylinder {
            grid: CylinderGrid::default(),
        };
        let cases = [
            ("z", "r", cone()),
            ("z", "1 - r^2", cone()),
            ("1", "z", cone()),
            ("z^2", "z*r", cone()),
            (CONE_F, CONE_G, cone()),
            ("z", "t", cylinder.clone()),
            ("z - t", "z + t", cylinder.clone()),
            (CYLINDER_F, CYLINDER_G, cylinder),
        ];
        for (p, q, spectrum) in cases {
            let cert = tsr_perturb(&parse(p).unwrap(), &parse(q).unwrap(), &spectrum, 1e-4, 20, DEFAULT_RNG_SEED)
                .unwrap_or_else(|e| panic!("({p}, {q}): {e}"));
            assert!(cert.margin > 1e-4);
        }
    }

    #[test]
    fn exhausted_tries_report_best_margin() {
        let err = tsr_perturb(&parse("z").unwrap(), &parse("r").unwrap(), &cone(), 10.0, 3, 1).unwrap_err();
        assert!(matches!(err, WitnessError::TriesExhausted { tries: 3, best_margin, .. } if best_margin < 10.0));
    }

    #[test]
    fn lower_demo() {
        let grid = PolarGrid::default();
        let s = |f: fn(Complex64) -> Complex64| SampledDiskFunction::sample(&grid, None, f).unwrap();
        assert_eq!(tsr_lower_demo(&s(|z| z - 0.3)).unwrap().rouche.index, 1);
        assert_eq!(tsr_lower_demo(&s(|z| z + c(0.0, 0.4))).unwrap().rouche.index, 1);
        assert!(matches!(
            tsr_lower_demo(&s(|z| z + 0.6)),
            Err(WitnessError::Rouche(WindingError::RoucheHypothesis { .. }))
        ));
    }
}
