//! Structural properties of the continuum power model.

use std::f64::consts::PI;

use approx::assert_relative_eq;
use noma_cell::{
    bs_power_no_sic, bs_power_sic, bs_power_sic_asymptotic, bs_power_sic_gamma_form,
    per_user_power, CellParamsF32, CellParamsF64, Error,
};

fn cell() -> CellParamsF64 {
    CellParamsF64 {
        radius: 50.0,
        min_distance: 0.0,
        pathloss_exponent: 3.57,
        pathloss_constant: 2.66e-4,
        noise: 5.857_93e-13,
        density: 0.0,
        sinr_target: 31.0,
    }
    .with_users_per_cell(8.0)
}

#[test]
fn sic_power_increases_with_density_radius_sinr_and_noise() {
    let base = cell();
    let p0 = bs_power_sic(&base).unwrap();

    let mut denser = base;
    denser.density *= 1.5;
    assert!(bs_power_sic(&denser).unwrap() > p0);

    // fixed density, larger disk
    let mut wider = base;
    wider.radius = 60.0;
    assert!(bs_power_sic(&wider).unwrap() > p0);

    let mut stricter = base;
    stricter.sinr_target = 40.0;
    assert!(bs_power_sic(&stricter).unwrap() > p0);

    let mut noisier = base;
    noisier.noise *= 2.0;
    assert!(bs_power_sic(&noisier).unwrap() > p0);
}

#[test]
fn sic_power_monotone_along_sinr_grid() {
    let mut prev = 0.0;
    for k in -20..=40 {
        let mut p = cell();
        p.sinr_target = 10f64.powf(k as f64 / 10.0);
        let w = bs_power_sic(&p).unwrap();
        assert!(w > prev, "gamma* = {}", p.sinr_target);
        assert!(w <= bs_power_sic_asymptotic(&p).unwrap() * (1.0 + 1e-12));
        prev = w;
    }
}

#[test]
fn power_depends_on_noise_and_gain_only_through_their_ratio() {
    let a = cell();
    let mut b = a;
    b.noise *= 7.0;
    b.pathloss_constant *= 7.0;
    assert_relative_eq!(
        bs_power_sic(&a).unwrap(),
        bs_power_sic(&b).unwrap(),
        max_relative = 1e-14
    );
    assert_relative_eq!(
        per_user_power(&a, 31.0).unwrap(),
        per_user_power(&b, 31.0).unwrap(),
        max_relative = 1e-14
    );
}

#[test]
fn sic_power_is_linear_in_noise() {
    let a = cell();
    for factor in [1e-6, 0.37, 3.0, 1e9] {
        let mut b = a;
        b.noise *= factor;
        assert_relative_eq!(
            bs_power_sic(&b).unwrap(),
            factor * bs_power_sic(&a).unwrap(),
            max_relative = 1e-12
        );
    }
}

#[test]
fn per_user_power_increases_with_distance() {
    let p = cell();
    let mut prev = 0.0;
    for i in 1..=100 {
        let w = per_user_power(&p, 0.5 * i as f64).unwrap();
        assert!(w > prev);
        prev = w;
    }
}

#[test]
fn per_user_power_rejects_points_outside_the_cell() {
    let mut p = cell();
    p.min_distance = 5.0;
    assert!(matches!(
        per_user_power(&p, 4.0),
        Err(Error::OutsideCell { .. })
    ));
    assert!(matches!(
        per_user_power(&p, 50.1),
        Err(Error::OutsideCell { .. })
    ));
    assert_eq!(per_user_power(&p, 5.0).unwrap(), 0.0);
}

#[test]
fn integrated_total_with_min_distance_matches_identity() {
    let mut p = cell();
    p.min_distance = 12.0;
    let p = p.with_users_per_cell(8.0);
    let co = p.coefficients();
    let eta = p.pathloss_exponent;
    let expected = co.zeta * per_user_power(&p, p.radius).unwrap()
        - co.c * (p.radius.powf(eta) - p.min_distance.powf(eta));
    assert_relative_eq!(bs_power_sic(&p).unwrap(), expected, max_relative = 1e-10);
}

#[test]
fn gamma_form_agrees_across_sinr_targets() {
    for g in [0.01, 0.3, 1.0, 31.0, 1e4] {
        let mut p = cell();
        p.sinr_target = g;
        assert_relative_eq!(
            bs_power_sic_gamma_form(&p).unwrap(),
            bs_power_sic(&p).unwrap(),
            max_relative = 1e-9
        );
    }
}

#[test]
fn no_sic_blows_up_at_the_wall_and_errors_beyond() {
    let mut p = cell();
    p.sinr_target = 1.0; // zeta = 2
    let wall = 2.0 / (PI * p.radius * p.radius);
    let mut prev = 0.0;
    for frac in [0.2, 0.6, 0.9, 0.99, 0.999_99] {
        p.density = frac * wall;
        let w = bs_power_no_sic(&p).unwrap();
        assert!(w > prev);
        prev = w;
    }
    p.density = 0.2 * wall;
    assert!(prev > 1e4 * bs_power_no_sic(&p).unwrap());
    p.density = wall;
    match bs_power_no_sic(&p) {
        Err(Error::Infeasible { zeta, load, .. }) => {
            assert_relative_eq!(zeta, 2.0);
            assert_relative_eq!(load, 2.0, max_relative = 1e-12);
        }
        other => panic!("expected infeasible, got {other:?}"),
    }
}

#[test]
fn no_sic_never_cheaper_than_sic() {
    for users in [0.1, 0.5, 0.9] {
        for g in [0.05, 0.5, 1.0] {
            let mut p = cell();
            p.sinr_target = g;
            let p = p.with_users_per_cell(users);
            if let Ok(no_sic) = bs_power_no_sic(&p) {
                assert!(
                    no_sic >= bs_power_sic(&p).unwrap() * (1.0 - 1e-12),
                    "{users} {g}"
                );
            }
        }
    }
}

#[test]
fn single_and_double_precision_agree() {
    let d = cell();
    let s = CellParamsF32 {
        radius: d.radius as f32,
        min_distance: d.min_distance as f32,
        pathloss_exponent: d.pathloss_exponent as f32,
        pathloss_constant: d.pathloss_constant as f32,
        noise: d.noise as f32,
        density: d.density as f32,
        sinr_target: d.sinr_target as f32,
    };
    let pd = bs_power_sic(&d).unwrap();
    let ps = bs_power_sic(&s).unwrap() as f64;
    assert_relative_eq!(ps, pd, max_relative = 1e-4);
    let gs = bs_power_sic_gamma_form(&s).unwrap() as f64;
    assert_relative_eq!(gs, pd, max_relative = 1e-4);
}

#[test]
fn invalid_parameters_are_rejected() {
    let bad = [
        CellParamsF64 {
            radius: 0.0,
            ..cell()
        },
        CellParamsF64 {
            min_distance: 60.0,
            ..cell()
        },
        CellParamsF64 {
            pathloss_exponent: 1.5,
            ..cell()
        },
        CellParamsF64 {
            noise: -1.0,
            ..cell()
        },
        CellParamsF64 {
            density: f64::NAN,
            ..cell()
        },
        CellParamsF64 {
            sinr_target: 0.0,
            ..cell()
        },
    ];
    for p in bad {
        assert!(
            matches!(bs_power_sic(&p), Err(Error::InvalidParameter { .. })),
            "{p:?}"
        );
    }
}
