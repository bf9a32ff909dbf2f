//! End-to-end properties through the public API: expressions are parsed,
//! sampled, tested, transformed and approximated.

use std::sync::OnceLock;

use conealg::approx::{cone_approximate, ConePoly};
use conealg::bezout::{bezout_solve, BezoutOptions, ZPolyFamily};
use conealg::expr::parse;
use conealg::fourier::{membership_cone, membership_cylinder};
use conealg::gelfand::{common_zero_search, ConePoint, ConeResolution, ConeTransform};
use conealg::grid::{CylinderGrid, PolarGrid, SampledDiskFunction};
use conealg::stable_rank::{tsr_perturb, Spectrum, DEFAULT_RNG_SEED};
use conealg::winding::{invertible_cone, rouche_zero_assert, Invertibility};
use num_complex::Complex64;
use proptest::prelude::*;

const MEMBERS: [&str; 6] = [
    "z",
    "r",
    "1 - r^2",
    "z + i*(r - 0.5)",
    "exp(z)*(1 + r)",
    "z^2*r - 0.25",
];

fn grid() -> PolarGrid {
    PolarGrid::uniform(32, 128).unwrap()
}

fn sample(src: &str) -> SampledDiskFunction {
    let e = parse(src).unwrap();
    SampledDiskFunction::try_sample(&grid(), None, |z| e.eval(z, 0.0)).unwrap()
}

fn transforms() -> &'static Vec<(SampledDiskFunction, ConeTransform)> {
    static CELL: OnceLock<Vec<(SampledDiskFunction, ConeTransform)>> = OnceLock::new();
    CELL.get_or_init(|| {
        MEMBERS
            .iter()
            .map(|src| {
                let f = sample(src);
                let t = ConeTransform::new(&f).unwrap();
                (f, t)
            })
            .collect()
    })
}

fn cone_point() -> impl Strategy<Value = ConePoint> {
    (0.05f64..1.0, 0.0f64..0.95, 0.0f64..std::f64::consts::TAU)
        .prop_map(|(t, s, theta)| ConePoint::new(Complex64::from_polar(t * s, theta), t).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn transforms_of_products_are_products(i in 0..MEMBERS.len(), j in 0..MEMBERS.len(), p in cone_point()) {
        let (f, tf) = &transforms()[i];
        let (g, tg) = &transforms()[j];
        let tfg = ConeTransform::new(&f.mul(g).unwrap()).unwrap();
        let (a, b, ab) = (tf.eval(&p).unwrap(), tg.eval(&p).unwrap(), tfg.eval(&p).unwrap());
        let slack = 1e-9
            + ab.interpolation_error + ab.series_tail_bound
            + 4.0 * (a.interpolation_error + a.series_tail_bound + b.interpolation_error + b.series_tail_bound);
        prop_assert!((ab.value - a.value * b.value).norm() <= slack);
    }

    #[test]
    fn coordinate_transforms_are_coordinates(p in cone_point()) {
        let (_, tz) = &transforms()[0];
        let (_, tr) = &transforms()[1];
        prop_assert!((tz.eval(&p).unwrap().value - p.w).norm() < 1e-9);
        let r_hat = tr.eval(&p).unwrap();
        prop_assert!((r_hat.value.re - p.t).abs() <= 1e-9 + r_hat.interpolation_error);
    }

    #[test]
    fn zeros_off_centre_block_invertibility(re in -0.9f64..0.9, im in -0.4f64..0.4) {
        let a = Complex64::new(re, im);
        prop_assume!(a.norm() < 0.95);
        let u = SampledDiskFunction::sample(&grid(), None, |z| z - a).unwrap();
        let status = invertible_cone(&u, None).unwrap().status;
        prop_assert_ne!(status, Invertibility::Invertible);
        if a.norm() < 0.49 {
            let rouche = rouche_zero_assert(&u).unwrap();
            prop_assert_eq!(rouche.index, 1);
        }
    }
}

#[test]
fn approximants_transform_close_to_the_original() {
    let f = sample("z + i*(r - 0.5)");
    let tf = ConeTransform::new(&f).unwrap();
    let (poly, report) = cone_approximate(&f, 0.02).unwrap();
    let q = poly.sample(&grid()).unwrap();
    assert!(membership_cone(&q, Some(1e-12)).unwrap().verdict);
    let tq = ConeTransform::new(&q).unwrap();
    for (w, t) in [(0.0, 0.5), (0.3, 0.6), (-0.1, 0.2), (0.7, 0.9), (0.0, 1.0)] {
        let p = ConePoint::new(Complex64::new(w, 0.1 * w), t).unwrap();
        let (a, b) = (tf.eval(&p).unwrap(), tq.eval(&p).unwrap());
        let slack = report.achieved_error
            + a.interpolation_error + a.series_tail_bound
            + b.interpolation_error + b.series_tail_bound;
        assert!((a.value - b.value).norm() <= slack + 1e-12, "at ({w}, {t})");
    }
}

#[test]
fn cone_polys_survive_a_json_round_trip() {
    let (poly, _) = cone_approximate(&sample("exp(z)*(1 + r)"), 0.05).unwrap();
    let text = serde_json::to_string(&poly).unwrap();
    let back: ConePoly = serde_json::from_str(&text).unwrap();
    assert_eq!(back, poly);
    let z = Complex64::new(0.3, -0.4);
    assert_eq!(back.eval(z), poly.eval(z));
}

#[test]
fn bezout_solutions_are_disk_algebra_slices() {
    let grid = CylinderGrid::uniform(grid(), 16).unwrap();
    for (f, g) in [("z + i*t", "z^2 - (1 - t^2)"), ("z - 2", "z + 3*t + 0.5"), ("z^2 + t", "z - 1.5")] {
        let f = ZPolyFamily::from_expr(parse(f).unwrap()).unwrap();
        let g = ZPolyFamily::from_expr(parse(g).unwrap()).unwrap();
        let cert = bezout_solve(&f, &g, &grid, 1e-8, &BezoutOptions::default()).unwrap();
        assert!(cert.valid, "residual {}", cert.residual);
        for family in [&cert.x, &cert.y] {
            let (report, _) = membership_cylinder(&family.sample(&grid).unwrap(), Some(1e-10)).unwrap();
            assert!(report.verdict, "defect {}", report.defect);
        }
    }
}

#[test]
fn perturbed_pairs_keep_their_certified_margin() {
    let res = ConeResolution { disk_steps: 16 };
    let spectrum = Spectrum::Cone { grid: grid(), resolution: res };
    for q in ["r", "1 - r^2", "z^2 - r^2*(1 - r)^2"] {
        let p_expr = parse("z").unwrap();
        let q_expr = parse(q).unwrap();
        let cert = tsr_perturb(&p_expr, &q_expr, &spectrum, 1e-4, 20, DEFAULT_RNG_SEED).unwrap();
        let shifted = |src: &str, by: Complex64| {
            let e = parse(src).unwrap();
            SampledDiskFunction::try_sample(&grid(), None, |z| e.eval(z, 0.0).map(|v| v - by)).unwrap()
        };
        let found = common_zero_search(&[shifted("z", cert.eps), shifted(q, cert.eta)], res).unwrap();
        assert!((found.min - cert.margin).abs() < 1e-12, "{q}: {} vs {}", found.min, cert.margin);
        assert!(found.min > 1e-4);
    }
}
