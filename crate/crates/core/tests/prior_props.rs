use cauchy_prior::prior::{
    analyze_modality, conditional_site_density, delta_log_prior, log_prior_1d, log_prior_2d,
    scale_for_direction, Boundary, Modality, PriorFamily, PriorModel,
};
use cauchy_prior::{Grid1D, Lattice2D};
use proptest::prelude::*;

fn family() -> impl Strategy<Value = PriorFamily> {
    prop_oneof![
        Just(PriorFamily::Cauchy),
        Just(PriorFamily::Gaussian),
        Just(PriorFamily::Tv)
    ]
}

fn boundary() -> impl Strategy<Value = Boundary> {
    prop_oneof![Just(Boundary::Zero), Just(Boundary::Free)]
}

/// Independent term-by-term evaluation of a 2D difference prior. Terms are
/// listed per increment so a single-site change can be differenced term by
/// term without cancellation in long sums.
fn terms_2d(x: &Lattice2D, p: &PriorModel) -> Vec<f64> {
    let (nx, ny) = (x.nx, x.ny);
    let (sx, sy) = match p.family {
        PriorFamily::Cauchy => (p.reg * p.h, p.reg * p.h_prime),
        PriorFamily::Gaussian => (p.reg * (p.h / p.h_prime).sqrt(), p.reg * (p.h_prime / p.h).sqrt()),
        PriorFamily::Tv => (0.0, 0.0),
    };
    let term = |d: f64, s: f64| match p.family {
        PriorFamily::Cauchy => (s / (s * s + d * d)).ln(),
        PriorFamily::Gaussian => -d * d / (4.0 * s * s),
        PriorFamily::Tv => -p.reg * d.abs(),
    };
    let zero = p.boundary == Boundary::Zero;
    let mut out = Vec::new();
    for iy in 0..ny {
        for ix in 0..nx {
            let v = x.get(ix, iy);
            if nx > 1 {
                if ix > 0 {
                    out.push(term(v - x.get(ix - 1, iy), sx));
                } else if zero {
                    out.push(term(v, sx));
                }
            }
            if ny > 1 {
                if iy > 0 {
                    out.push(term(v - x.get(ix, iy - 1), sy));
                } else if zero {
                    out.push(term(v, sy));
                }
            }
        }
    }
    out
}

fn lattice() -> impl Strategy<Value = (usize, usize, Vec<f64>)> {
    (1usize..7, 1usize..7)
        .prop_filter("at least two sites", |(nx, ny)| nx * ny >= 2)
        .prop_flat_map(|(nx, ny)| (Just(nx), Just(ny), prop::collection::vec(-5.0f64..5.0, nx * ny)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn delta_equals_full_difference(
        (nx, ny, values) in lattice(),
        fam in family(),
        bnd in boundary(),
        reg in 0.05f64..3.0,
        h in 0.1f64..2.0,
        hp in 0.1f64..2.0,
        site_seed in any::<usize>(),
        new in -6.0f64..6.0,
    ) {
        let prior = PriorModel::new(fam, reg, h, hp, bnd).unwrap();
        let x = Lattice2D::new(nx, ny, h, hp, values).unwrap();
        let site = site_seed % (nx * ny);
        let delta = delta_log_prior(&x, site, new, &prior).unwrap();

        let mut y = x.clone();
        y.values[site] = new;
        let before = terms_2d(&x, &prior);
        let after = terms_2d(&y, &prior);
        let oracle: f64 = after.iter().zip(&before).map(|(a, b)| a - b).sum();
        // relative to the size of the terms that changed
        let size: f64 = after
            .iter()
            .zip(&before)
            .filter(|(a, b)| a != b)
            .map(|(a, b)| a.abs() + b.abs())
            .sum::<f64>()
            .max(oracle.abs());
        prop_assert!((delta - oracle).abs() <= 1e-10 * size.max(f64::MIN_POSITIVE),
            "delta {} oracle {}", delta, oracle);

        // and against the crate's own full evaluation
        let full = log_prior_2d(&y, &prior).unwrap() - log_prior_2d(&x, &prior).unwrap();
        let sum_abs: f64 = before.iter().map(|t| t.abs()).sum();
        prop_assert!((delta - full).abs() <= 1e-10 * delta.abs() + 1e-13 * sum_abs);
    }

    #[test]
    fn lattice_oracle_agrees_with_crate(
        (nx, ny, values) in lattice(),
        fam in family(),
        bnd in boundary(),
        reg in 0.05f64..3.0,
        h in 0.1f64..2.0,
        hp in 0.1f64..2.0,
    ) {
        let prior = PriorModel::new(fam, reg, h, hp, bnd).unwrap();
        let x = Lattice2D::new(nx, ny, h, hp, values).unwrap();
        let oracle: f64 = terms_2d(&x, &prior).iter().sum();
        let got = log_prior_2d(&x, &prior).unwrap();
        prop_assert!((got - oracle).abs() <= 1e-12 * oracle.abs().max(1.0));
    }

    #[test]
    fn free_boundary_is_translation_invariant(
        (nx, ny, values) in lattice(),
        fam in family(),
        reg in 0.05f64..3.0,
        c in -10.0f64..10.0,
    ) {
        let prior = PriorModel::new(fam, reg, 0.5, 0.25, Boundary::Free).unwrap();
        let x = Lattice2D::new(nx, ny, 0.5, 0.25, values.clone()).unwrap();
        let shifted = Lattice2D::new(nx, ny, 0.5, 0.25, values.iter().map(|v| v + c).collect()).unwrap();
        let a = log_prior_2d(&x, &prior).unwrap();
        let b = log_prior_2d(&shifted, &prior).unwrap();
        // absolute 1e-12 up to unit magnitude; beyond that one ulp of the
        // total already exceeds it
        prop_assert!((a - b).abs() < 1e-12 * a.abs().max(1.0), "{} vs {}", a, b);

        let line = Grid1D::new(0.5, values.clone()).unwrap();
        let line_shift = Grid1D::new(0.5, values.iter().map(|v| v + c).collect()).unwrap();
        let p1 = PriorModel::line(fam, reg, 0.5, Boundary::Free).unwrap();
        let a1 = log_prior_1d(&line, &p1).unwrap();
        let b1 = log_prior_1d(&line_shift, &p1).unwrap();
        prop_assert!((a1 - b1).abs() < 1e-12 * a1.abs().max(1.0), "{} vs {}", a1, b1);
    }

    #[test]
    fn one_dimensional_delta(
        values in prop::collection::vec(-5.0f64..5.0, 2..40),
        fam in family(),
        bnd in boundary(),
        reg in 0.05f64..3.0,
        site_seed in any::<usize>(),
        new in -6.0f64..6.0,
    ) {
        let prior = PriorModel::line(fam, reg, 0.1, bnd).unwrap();
        let x = Grid1D::new(0.1, values).unwrap();
        let site = site_seed % x.n();
        let delta = delta_log_prior(&x, site, new, &prior).unwrap();
        let mut y = x.clone();
        y.values[site] = new;
        let full = log_prior_1d(&y, &prior).unwrap() - log_prior_1d(&x, &prior).unwrap();
        let scale = log_prior_1d(&x, &prior).unwrap().abs() + log_prior_1d(&y, &prior).unwrap().abs();
        prop_assert!((delta - full).abs() <= 1e-10 * delta.abs() + 1e-14 * scale);
    }
}

#[test]
fn modality_matches_grid_search() {
    for a in [0.5, 0.99, 1.0, 1.01, 1.5, 2.0, 5.0] {
        let report = analyze_modality(a);
        let expected = if a < 1.0 {
            Modality::Unimodal
        } else if a == 1.0 {
            Modality::Flat
        } else {
            Modality::Bimodal
        };
        assert_eq!(report.classification, expected, "a={a}");
        if a == 1.0 {
            assert!(report.second_derivative_at_zero.abs() < 1e-12);
        }
        // fine grid on [0, a + 2]; the density is even
        let step = 1e-5;
        let count = ((a + 2.0) / step) as usize;
        let (mut best_x, mut best) = (0.0, f64::NEG_INFINITY);
        for i in 0..=count {
            let x = i as f64 * step;
            let v = conditional_site_density(a, x);
            if v > best {
                best = v;
                best_x = x;
            }
        }
        let reported = report.modes.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if expected == Modality::Bimodal {
            assert!((reported - (a * a - 1.0).sqrt()).abs() < 1e-12);
            assert!(
                (best_x - reported).abs() < 1e-4,
                "a={a}: grid {best_x} vs {reported}"
            );
            assert_eq!(report.modes.len(), 2);
            assert_eq!(report.modes[0], -report.modes[1]);
        } else if expected == Modality::Unimodal {
            assert_eq!(report.modes, vec![0.0]);
            assert_eq!(best_x, 0.0);
        }
    }
}

#[test]
fn direction_scales_reduce_to_special_cases() {
    for (lambda, h, hp) in [(1.0, 0.1, 0.7), (2.5, 0.25, 4.0), (0.3, 1.0 / 64.0, 1.0 / 32.0)] {
        assert_eq!(scale_for_direction(1.0, lambda, h, hp).unwrap(), lambda * h);
        assert_eq!(
            scale_for_direction(2.0, lambda, h, hp).unwrap(),
            lambda * (h / hp).sqrt()
        );
    }
    assert_eq!(scale_for_direction(2.0, 3.0, 1.0, 4.0).unwrap(), 1.5);
    // general α with no perpendicular step is the 1D walk scale
    let s = scale_for_direction(1.5, 2.0, 0.3, 1.0).unwrap();
    assert!((s - 2.0 * 0.3f64.powf(1.0 / 1.5)).abs() < 1e-15);
    assert!(scale_for_direction(2.5, 1.0, 1.0, 1.0).is_err());
    assert!(scale_for_direction(1.0, 1.0, 0.0, 1.0).is_err());
}
