use apollonian::congruence::{
    exact_cheeger, generator_mod, orbit_mod, spectrum, unpack, RegularGraph, SpectrumOptions,
};
use apollonian::counting::{count_curve_from_sorted, count_in_region};
use apollonian::geometry::{
    generate_packing_geometric, invert_circle, Circle, InversionMap, Rect, SeedConfiguration,
};
use apollonian::quad::{apply_swap, descartes_form, orbit_curvatures, DescartesQuadruple, SwapGenerator};
use apollonian::sieve::{residue_masses, slice, SieveSeries};
use proptest::prelude::*;
use std::sync::OnceLock;

fn gen() -> impl Strategy<Value = SwapGenerator> {
    (1u8..=4).prop_map(|i| SwapGenerator::new(i).unwrap())
}

fn quad_vec() -> impl Strategy<Value = [i128; 4]> {
    prop::array::uniform4(-1_000_000_000i128..1_000_000_000)
}

fn proper_circle() -> impl Strategy<Value = Circle> {
    (-5.0f64..5.0, -5.0f64..5.0, 0.2f64..5.0, any::<bool>()).prop_map(|(x, y, k, neg)| Circle::Proper {
        center: [x, y],
        curvature: if neg { -k } else { k },
    })
}

fn close(a: &Circle, b: &Circle) -> bool {
    match (*a, *b) {
        (Circle::Proper { center: c1, curvature: k1 }, Circle::Proper { center: c2, curvature: k2 }) => {
            let s = 1.0 + k1.abs().max(k2.abs());
            (k1 - k2).abs() < 1e-7 * s && (c1[0] - c2[0]).abs() < 1e-7 * s && (c1[1] - c2[1]).abs() < 1e-7 * s
        }
        (Circle::Line { normal: n1, offset: o1 }, Circle::Line { normal: n2, offset: o2 }) => {
            (n1[0] - n2[0]).abs() < 1e-7 && (n1[1] - n2[1]).abs() < 1e-7 && (o1 - o2).abs() < 1e-7
        }
        _ => false,
    }
}

fn standard_packing() -> &'static Vec<Circle> {
    static P: OnceLock<Vec<Circle>> = OnceLock::new();
    P.get_or_init(|| generate_packing_geometric(&SeedConfiguration::standard(), 200.0, None).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn swaps_preserve_the_form(v in quad_vec(), g in gen()) {
        let w = apply_swap(&v, g).unwrap();
        prop_assert_eq!(descartes_form(&v).unwrap(), descartes_form(&w).unwrap());
        prop_assert_eq!(apply_swap(&w, g).unwrap(), v);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn words_stay_on_the_cone(word in prop::collection::vec(gen(), 0..40)) {
        let mut v = [-1i128, 2, 2, 3];
        for g in word {
            v = apply_swap(&v, g).unwrap();
            prop_assert_eq!(descartes_form(&v).unwrap(), 0);
            prop_assert!(DescartesQuadruple::new(v).is_ok());
        }
    }

    #[test]
    fn reduction_commutes_with_swaps(v in quad_vec(), g in gen(), q in 2u32..=40) {
        let m = unpack(generator_mod(g, q));
        let vq = v.map(|x| x.rem_euclid(q as i128) as u64);
        let mut prod = [0u64; 4];
        for (j, p) in prod.iter_mut().enumerate() {
            *p = (0..4).map(|i| vq[i] * m[i][j] as u64).sum::<u64>() % q as u64;
        }
        let w = apply_swap(&v, g).unwrap().map(|x| x.rem_euclid(q as i128) as u64);
        prop_assert_eq!(prod, w);
    }

    #[test]
    fn inversion_is_an_involution(c in proper_circle(), m in proper_circle()) {
        let map = InversionMap::new(m);
        let back = invert_circle(&map, &invert_circle(&map, &c));
        prop_assert!(close(&back, &c), "{:?} -> {:?}", c, back);
    }

    #[test]
    fn inversion_keeps_tangency(
        (x, y, k1) in (-3.0f64..3.0, -3.0f64..3.0, 0.3f64..3.0),
        k2 in 0.3f64..3.0,
        theta in 0.0f64..std::f64::consts::TAU,
        m in proper_circle(),
    ) {
        let d = 1.0 / k1 + 1.0 / k2;
        let a = Circle::Proper { center: [x, y], curvature: k1 };
        let b = Circle::Proper { center: [x + d * theta.cos(), y + d * theta.sin()], curvature: k2 };
        prop_assume!(a.is_tangent(&b));
        let map = InversionMap::new(m);
        let (ia, ib) = (invert_circle(&map, &a), invert_circle(&map, &b));
        // Residuals grow with the image curvatures; keep the images tame.
        prop_assume!(ia.unsigned_curvature() < 1e3 && ib.unsigned_curvature() < 1e3);
        prop_assert!(ia.tangency_residual(&ib) < 1e-6, "{}", ia.tangency_residual(&ib));
    }

    #[test]
    fn counts_are_monotone(mut ts in prop::collection::vec(1.0f64..2000.0, 2..20)) {
        ts.sort_by(f64::total_cmp);
        ts.dedup();
        let root = DescartesQuadruple::new([-1, 2, 2, 3]).unwrap();
        let (sorted, _) = orbit_curvatures(&root, 2000).unwrap();
        let curve = count_curve_from_sorted(&sorted, 2000.0, &ts, "p").unwrap();
        for w in curve.samples.windows(2) {
            prop_assert!(w[0].1 <= w[1].1);
        }
    }

    #[test]
    fn regions_count_no_more_than_the_whole(
        (x0, y0) in (-1.2f64..1.0, -1.2f64..1.0),
        (w, h) in (0.01f64..2.5, 0.01f64..2.5),
        t in 1.0f64..200.0,
    ) {
        let circles = standard_packing();
        let r = Rect::new(x0, x0 + w, y0, y0 + h).unwrap();
        let whole = circles.iter().filter(|c| c.unsigned_curvature() <= t).count() as u64;
        prop_assert!(count_in_region(circles, t, &r) <= whole);
    }

    #[test]
    fn region_counts_scale(
        (x0, y0) in (-1.0f64..0.5, -1.0f64..0.5),
        (w, h) in (0.05f64..1.0, 0.05f64..1.0),
        t in 2.0f64..100.0,
        e in -3i32..=3,
    ) {
        let lambda = 2f64.powi(e);
        let circles = standard_packing();
        let scaled: Vec<Circle> = circles.iter().map(|c| c.scaled(lambda)).collect();
        let r = Rect::new(x0, x0 + w, y0, y0 + h).unwrap();
        prop_assert_eq!(
            count_in_region(circles, t, &r),
            count_in_region(&scaled, t / lambda, &r.scaled(lambda))
        );
    }

    #[test]
    fn cheeger_sandwich(n in 3usize..=16, mask in 1u32..256) {
        let steps: Vec<usize> = (1..n.div_ceil(2)).filter(|s| mask >> (s - 1) & 1 == 1).collect();
        prop_assume!(!steps.is_empty());
        let g = RegularGraph::circulant(n, &steps).unwrap();
        let rep = spectrum(&g, &SpectrumOptions::default()).unwrap();
        let h = exact_cheeger(&g).unwrap();
        prop_assert_eq!(rep.exact_cheeger, Some(h));
        let (lo, hi) = (rep.cheeger_lower.unwrap(), rep.cheeger_upper.unwrap());
        prop_assert!(lo - 1e-9 <= h && h <= hi + 1e-9, "{} <= {} <= {}", lo, h, hi);
    }

    #[test]
    fn residue_masses_partition(values in prop::collection::vec(-10_000i128..10_000, 0..300), q in 1u64..60) {
        let s = SieveSeries::from_values(values, 10_000);
        let masses = residue_masses(&s, q);
        prop_assert_eq!(masses.len() as u64, q);
        prop_assert_eq!(masses.iter().sum::<u64>(), s.mass());
    }

    #[test]
    fn slice_mass_shrinks_with_the_modulus(
        values in prop::collection::vec(-10_000i128..10_000, 1..300),
        (i, j) in (0usize..6, 0usize..6),
    ) {
        const P: [u64; 6] = [2, 3, 5, 7, 11, 13];
        prop_assume!(i != j);
        let s = SieveSeries::from_values(values, 10_000);
        let (a, b) = (slice(&s, P[i]).unwrap().mass, slice(&s, P[j]).unwrap().mass);
        prop_assert!(slice(&s, P[i] * P[j]).unwrap().mass <= a.min(b));
    }
}

#[test]
fn orbits_mod_q_lie_on_the_cone() {
    for root in [[-1i128, 2, 2, 3], [-2, 3, 6, 7], [-3, 4, 12, 13], [-6, 10, 15, 19], [0, 0, 1, 1]] {
        let root = DescartesQuadruple::new(root).unwrap();
        for q in 2..=13u32 {
            for v in orbit_mod(&root, q).unwrap() {
                let v = v.map(i128::from);
                assert_eq!(descartes_form(&v).unwrap().rem_euclid(q as i128), 0, "{v:?} mod {q}");
            }
        }
    }
}
