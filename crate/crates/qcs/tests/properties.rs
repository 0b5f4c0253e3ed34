mod common;

use std::collections::BTreeMap;

use common::{random_signs, random_spec};
use proptest::prelude::*;
use qcs::curvespec::{
    normalize_overrides, parse_spec, reflect_signed, render_spec, rotate_signed, Kind, SpecFile,
};
use qcs::laurent::Exps;
use qcs::mpath::{chi, path_matrix, standard_mpath, step_matrix, Mode, Side, Step};
use qcs::skein::{double_cover, verify_identity, verify_square_relation, Factor, IdentitySpec, Term, TermSign};
use qcs::snakeband::{
    brute_force_matchings, build_graph, enumerate_matchings, flip_graph, graph_matrix_formula,
    matching_enumerator, weighted_matchings,
};
use qcs::{LaurentPoly, Mat2, Var};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const NAMES: [&str; 4] = ["x", "y", "z", "y_x"];

fn poly() -> impl Strategy<Value = LaurentPoly> {
    let mono = (-3i64..=3, prop::collection::vec((0usize..4, -4i64..=4), 0..3));
    prop::collection::vec(mono, 0..5).prop_map(|terms| {
        LaurentPoly::from_terms(terms.into_iter().map(|(c, es)| {
            (Exps::from_doubled(es.into_iter().map(|(i, e)| (Var::new(NAMES[i]).unwrap(), e))), c.into())
        }))
    })
}

fn kind_of(k: u8) -> Kind {
    [Kind::Arc, Kind::Loop, Kind::Onesided][k as usize % 3]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn ring_axioms(a in poly(), b in poly(), c in poly()) {
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert!((&a - &a).is_zero());
        prop_assert_eq!(&a * &LaurentPoly::one(), a.clone());
    }

    #[test]
    fn canonical_string_round_trips(a in poly()) {
        let s = a.canonical_string();
        prop_assert_eq!(LaurentPoly::parse(&s).unwrap(), a);
    }
}

fn step_strategy() -> impl Strategy<Value = Step> {
    let v = |i: usize| Var::new(["p", "q", "r", "s"][i]).unwrap();
    (0u8..4, 0usize..4, 0usize..4, 0usize..4, any::<bool>(), any::<bool>()).prop_map(move |(k, i, j, l, f1, f2)| {
        let rot = if f1 { qcs::curvespec::Rot::Cw } else { qcs::curvespec::Rot::Ccw };
        let side = if f2 { Side::Right } else { Side::Left };
        match k {
            0 => Step::type1(&v(i), &v(j), &v(l), rot),
            1 => Step::type2(&v(i), rot, if f2 { 1 } else { -1 }, true),
            2 => Step::type3(&v(i), side),
            _ => Step::type3_prime(&v(i), side),
        }
    })
}

fn unimodular() -> impl Strategy<Value = Mat2> {
    prop::collection::vec(step_strategy(), 1..6).prop_map(|s| path_matrix(&s))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn trace_identities(a in unimodular(), b in unimodular()) {
        let det_b = b.det();
        prop_assert!(det_b == LaurentPoly::one() || det_b == LaurentPoly::constant(-1));
        prop_assert_eq!(a.mul(&b).trace(), b.mul(&a).trace());
        let lhs = &a.trace() * &b.trace();
        let rhs = &a.mul(&b).trace() + &(&det_b * &a.mul(&b.inverse().unwrap()).trace());
        prop_assert_eq!(lhs, rhs);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn dp_matches_brute_force_and_methods_agree(seed in any::<u64>(), k in 0u8..3, d in 1usize..=8) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let spec = random_spec(&mut rng, kind_of(k), d);
        let signs = random_signs(&mut rng);
        let g = build_graph(&spec).unwrap();
        let mut dp: Vec<Vec<usize>> = enumerate_matchings(&g).into_iter().map(|m| m.edges).collect();
        let mut bf = brute_force_matchings(&g);
        dp.sort();
        bf.sort();
        prop_assert_eq!(dp, bf);
        let e = matching_enumerator(&g, &signs).unwrap();
        prop_assert_eq!(&e, &graph_matrix_formula(&g, &signs).unwrap());
        prop_assert_eq!(&e, &chi(&spec, &signs, Mode::Standard).unwrap());
        prop_assert!(e.all_positive());
    }

    #[test]
    fn every_tile_is_oriented(seed in any::<u64>(), k in 0u8..3, d in 1usize..=8) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = build_graph(&random_spec(&mut rng, kind_of(k), d)).unwrap();
        for m in enumerate_matchings(&g) {
            prop_assert!(m.orientations.iter().all(Option::is_some));
        }
    }

    #[test]
    fn flips_toggle_one_coefficient(seed in any::<u64>(), k in 0u8..3, d in 1usize..=7) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let spec = random_spec(&mut rng, kind_of(k), d);
        let signs = random_signs(&mut rng);
        let g = build_graph(&spec).unwrap();
        let ms = weighted_matchings(&g, &signs, 1).unwrap();
        for (i, j, t) in flip_graph(&g, &ms) {
            let ratio = ms[i].coeff.as_ref().unwrap().to_poly()
                .div_unit(ms[j].coeff.as_ref().unwrap()).unwrap();
            let y = Var::coefficient_of(&g.tiles[t - 1].diagonal);
            let up = LaurentPoly::var_of(&y);
            let down = up.unit_inverse().unwrap();
            prop_assert!(ratio == up || ratio == down, "flip of tile {} gave {}", t, ratio);
        }
    }

    #[test]
    fn enumeration_is_deterministic_across_threads(seed in any::<u64>(), k in 0u8..3, d in 1usize..=8) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let spec = random_spec(&mut rng, kind_of(k), d);
        let signs = random_signs(&mut rng);
        let g = build_graph(&spec).unwrap();
        prop_assert_eq!(weighted_matchings(&g, &signs, 1).unwrap(), weighted_matchings(&g, &signs, 4).unwrap());
    }

    #[test]
    fn sqrt_mode_differs_by_one_monomial(seed in any::<u64>(), k in 0u8..3, d in 1usize..=8) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let spec = random_spec(&mut rng, kind_of(k), d);
        let signs = random_signs(&mut rng);
        let full = chi(&spec, &signs, Mode::Standard).unwrap();
        let bar = chi(&spec, &signs, Mode::Sqrt).unwrap();
        let half = LaurentPoly::from_monomial(Exps::from_doubled(
            spec.crossings.iter().map(|c| (Var::coefficient_of(&c.arc), 1)),
        ));
        prop_assert_eq!(&bar * &half, full);
    }

    #[test]
    fn trace_independent_of_starting_step(seed in any::<u64>(), k in 1u8..3, d in 1usize..=8, shift in 0usize..64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let spec = random_spec(&mut rng, kind_of(k), d);
        let signs = random_signs(&mut rng);
        let mut steps = standard_mpath(&spec, &signs, false).unwrap();
        let base = path_matrix(&steps).trace();
        let n = steps.len();
        steps.rotate_left(shift % n);
        let moved = path_matrix(&steps).trace();
        prop_assert!(moved == base || moved == -base.clone());
    }

    #[test]
    fn spec_text_round_trips(seed in any::<u64>(), k in 0u8..3, d in 1usize..=8) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let spec = random_spec(&mut rng, kind_of(k), d);
        let file = SpecFile { curves: vec![spec], signs: random_signs(&mut rng), ..Default::default() };
        let text = render_spec(&file);
        prop_assert_eq!(parse_spec(&text).unwrap(), file);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn one_sided_rotation_and_reflection(seed in any::<u64>(), d in 1usize..=6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let spec = random_spec(&mut rng, Kind::Onesided, d);
        let signs = random_signs(&mut rng);
        let base = chi(&spec, &signs, Mode::Standard).unwrap();
        let rot = rotate_signed(&spec, &signs).unwrap();
        let refl = reflect_signed(&spec, &signs).unwrap();
        prop_assert_eq!(&chi(&rot, &signs, Mode::Standard).unwrap(), &base);
        prop_assert_eq!(&chi(&refl, &signs, Mode::Standard).unwrap(), &base);
        prop_assert_eq!(&matching_enumerator(&build_graph(&rot).unwrap(), &signs).unwrap(), &base);
        prop_assert_eq!(&matching_enumerator(&build_graph(&refl).unwrap(), &signs).unwrap(), &base);
        // d rotations reflect; 2d rotations return to the start
        let mut cur = spec.clone();
        for _ in 0..d {
            cur = rotate_signed(&cur, &signs).unwrap();
        }
        prop_assert_eq!(normalize_overrides(&cur, &signs), normalize_overrides(&refl, &signs));
        for _ in 0..d {
            cur = rotate_signed(&cur, &signs).unwrap();
        }
        prop_assert_eq!(normalize_overrides(&cur, &signs), normalize_overrides(&spec, &signs));
    }

    #[test]
    fn square_relation_on_random_one_sided(seed in any::<u64>(), d in 1usize..=6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let spec = random_spec(&mut rng, Kind::Onesided, d);
        let signs = random_signs(&mut rng);
        for mode in [Mode::Sqrt, Mode::Y1] {
            let r = verify_square_relation(&spec, &signs, mode).unwrap();
            prop_assert!(r.holds, "{}", r.render());
        }
    }

    #[test]
    fn perturbed_multiplier_breaks_square_identity(seed in any::<u64>(), d in 1usize..=6, pick in 0usize..6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut spec = random_spec(&mut rng, Kind::Onesided, d);
        spec.name = "alpha".into();
        let signs = random_signs(&mut rng);
        let arc = spec.crossings[pick % d].arc.clone();
        let file = SpecFile { curves: vec![spec], signs, ..Default::default() };
        let base = |extra: Option<LaurentPoly>| {
            let mut f = vec![Factor::Double { name: "alpha".into() }];
            f.extend(extra.map(Factor::Mono));
            IdentitySpec {
                name: "sq".into(),
                mode: Mode::Sqrt,
                lhs: vec![Factor::Curve { name: "alpha".into(), pow: 2 }],
                rhs: vec![
                    Term { sign: TermSign::Plus, factors: f },
                    Term { sign: TermSign::Minus, factors: vec![Factor::Const(2.into())] },
                ],
            }
        };
        prop_assert!(verify_identity(&base(None), &file).unwrap().holds);
        let y = LaurentPoly::from_monomial(Exps::from_doubled([(Var::coefficient_of(&arc), 1)]));
        prop_assert!(!verify_identity(&base(Some(y.clone())), &file).unwrap().holds);
        prop_assert!(!verify_identity(&base(Some(y.unit_inverse().unwrap())), &file).unwrap().holds);
    }

    #[test]
    fn doubled_curve_is_two_sided_of_twice_the_length(seed in any::<u64>(), d in 1usize..=6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let spec = random_spec(&mut rng, Kind::Onesided, d);
        let signs = random_signs(&mut rng);
        let dc = double_cover(&spec, &signs).unwrap();
        prop_assert_eq!(dc.kind, Kind::Loop);
        prop_assert_eq!(dc.d(), 2 * d);
        let eff = dc.effective_signs(&signs).unwrap();
        prop_assert!((0..d).all(|j| eff[j] == -eff[j + d]));
    }
}

#[test]
fn step_matrices_have_unit_determinant() {
    let v = Var::new("t").unwrap();
    let u = Var::new("u").unwrap();
    let one = LaurentPoly::one();
    let minus = LaurentPoly::constant(-1);
    let cases: BTreeMap<&str, (Step, LaurentPoly)> = [
        ("t1", (Step::type1(&v, &u, &v, qcs::curvespec::Rot::Ccw), one.clone())),
        ("t2", (Step::type2(&v, qcs::curvespec::Rot::Cw, -1, true), one.clone())),
        ("t3", (Step::type3(&v, Side::Left), one.clone())),
        ("t3p", (Step::type3_prime(&v, Side::Right), minus)),
    ]
    .into_iter()
    .collect();
    for (name, (s, det)) in cases {
        assert_eq!(step_matrix(&s).det(), det, "{name}");
    }
}
