use ::biquandle::*;
use num_complex::Complex64;
use proptest::prelude::*;

use element::{element_distance, tuple_distance};

const TOL: f64 = 1e-9;

fn heis(n: usize) -> impl Strategy<Value = Element> {
    prop::collection::vec(-10.0..10.0f64, 2 * n + 1).prop_map(Element::real)
}

fn torus_pt() -> impl Strategy<Value = Element> {
    (-3.14..3.14f64, -10.0..10.0f64, -10.0..10.0f64)
        .prop_map(|(t, re, im)| Element::torus_angle(t, Complex64::new(re, im)))
}

fn finite_biquandles() -> Vec<Biquandle> {
    vec![
        make_wada(&FiniteGroup::symmetric(3)),
        make_alexander(5, 2, 3).unwrap(),
        brace_to_biquandle(&make_trivial_brace(FiniteGroup::symmetric(3))),
        brace_to_biquandle(&inversion_semidirect_brace(3).unwrap()),
        brace_to_biquandle(&even_residue_brace(8).unwrap()),
        quandle_to_biquandle(&Quandle::core(&FiniteGroup::cyclic(3))),
    ]
}

fn continuous_biquandles() -> Vec<Biquandle> {
    let mut out: Vec<Biquandle> = ClosedForm::ALL.into_iter().map(Biquandle::closed_form).collect();
    for order in [BraceOrder::PlusCirc, BraceOrder::CircPlus] {
        out.push(brace_to_biquandle(&heisenberg_brace(2, order).unwrap()));
    }
    out
}

/// A point of `carrier` from five raw coordinates.
fn build(carrier: Carrier, raw: &[f64]) -> Element {
    match carrier {
        Carrier::Real { dim } => Element::real(&raw[..dim]),
        Carrier::Torus => Element::torus_angle(raw[0] * 0.314, Complex64::new(raw[1], raw[2])),
        other => panic!("{other:?}"),
    }
}

/// Random word on `strands` strands.
fn word(strands: usize, max_len: usize) -> impl Strategy<Value = BraidWord> {
    let k = strands as i32 - 1;
    prop::collection::vec((1..=k, any::<bool>()), 0..=max_len).prop_map(move |ls| {
        let letters = ls.into_iter().map(|(i, pos)| if pos { i } else { -i }).collect();
        BraidWord::new(strands, letters).unwrap()
    })
}

fn apply(q: &Biquandle, letters: &[i32], s: &[Element]) -> Vec<Element> {
    letters.iter().fold(s.to_vec(), |st, &e| apply_letter(q, &st, e).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn brace_compatibility_heisenberg(n in 1usize..=3, seed in any::<u64>(), plus_circ in any::<bool>()) {
        let order = if plus_circ { BraceOrder::PlusCirc } else { BraceOrder::CircPlus };
        let b = heisenberg_brace(n, order).unwrap();
        let mode = CheckMode::Sampled { count: 50, tolerance: TOL, seed };
        prop_assert!(validate_skew_brace(&b, mode).valid);
    }

    #[test]
    fn brace_compatibility_torus(a in torus_pt(), b in torus_pt(), c in torus_pt(), plus_circ in any::<bool>()) {
        let order = if plus_circ { BraceOrder::PlusCirc } else { BraceOrder::CircPlus };
        let br = torus_brace(order);
        let lhs = br.circ(&a, &br.add(&b, &c));
        prop_assert!(element_distance(&lhs, &br.compatibility_rhs(&a, &b, &c)) <= TOL);
        prop_assert!(element_distance(&br.circ(&br.zero(), &a), &a) <= TOL);
        prop_assert!(element_distance(&br.add(&a, &br.zero()), &a) <= TOL);
    }

    #[test]
    fn ybe_and_inverses_continuous(idx in 0usize..6, raw in prop::collection::vec(-10.0..10.0f64, 15)) {
        let q = continuous_biquandles().swap_remove(idx);
        let (a, b, c) = (build(q.carrier(), &raw[0..5]), build(q.carrier(), &raw[5..10]), build(q.carrier(), &raw[10..15]));
        let s = [a.clone(), b.clone(), c.clone()];
        let lhs = apply(&q, &[2, 1, 2], &s);
        let rhs = apply(&q, &[1, 2, 1], &s);
        prop_assert!(tuple_distance(&lhs, &rhs) <= TOL, "{}: {}", q.name(), tuple_distance(&lhs, &rhs));
        let (c1, d1) = q.yb_map(&a, &b).unwrap();
        let (a1, b1) = q.yb_map_inverse(&c1, &d1).unwrap();
        prop_assert!(element_distance(&a1, &a).max(element_distance(&b1, &b)) <= TOL);
        let x = q.ast_inv(&q.ast(&a, &b), &b).unwrap();
        prop_assert!(element_distance(&x, &a) <= TOL);
        let x = q.ast(&q.ast_inv(&a, &b).unwrap(), &b);
        prop_assert!(element_distance(&x, &a) <= TOL);
        let y = q.star_inv(&q.star(&a, &b), &b).unwrap();
        prop_assert!(element_distance(&y, &a) <= TOL);
        let y = q.star(&q.star_inv(&a, &b).unwrap(), &b);
        prop_assert!(element_distance(&y, &a) <= TOL);
        let t = q.tau(&a).unwrap();
        let (s1, s2) = q.s_map(&a, &a).unwrap();
        prop_assert!(element_distance(&s1, &t) <= TOL && element_distance(&s2, &t) <= TOL);
    }

    #[test]
    fn braid_relations_finite(idx in 0usize..6, s in prop::collection::vec(0usize..8, 4)) {
        let q = finite_biquandles().swap_remove(idx);
        let n = q.carrier().order().unwrap();
        let s: Vec<Element> = s.into_iter().map(|i| Element::Index(i % n)).collect();
        for i in 1..=2 {
            prop_assert_eq!(apply(&q, &[i, i + 1, i], &s), apply(&q, &[i + 1, i, i + 1], &s));
            prop_assert_eq!(apply(&q, &[i, -i], &s), s.clone());
            prop_assert_eq!(apply(&q, &[-i, i], &s), s.clone());
        }
        prop_assert_eq!(apply(&q, &[1, 3], &s), apply(&q, &[3, 1], &s));
        prop_assert_eq!(apply(&q, &[-1, 3], &s), apply(&q, &[3, -1], &s));
    }

    #[test]
    fn braid_relations_continuous(a in heis(1), b in heis(1), c in heis(1), d in heis(1), tp in torus_pt()) {
        for form in ClosedForm::ALL {
            let q = Biquandle::closed_form(form);
            let s: Vec<Element> = match form {
                ClosedForm::R1Heis | ClosedForm::R2Heis => vec![a.clone(), b.clone(), c.clone(), d.clone()],
                _ => {
                    // torus states built from the random coordinates
                    let mk = |e: &Element, k: f64| {
                        let v = e.coords();
                        Element::torus_angle(v[0] * 0.3 + k, Complex64::new(v[1], v[2]))
                    };
                    vec![tp.clone(), mk(&a, 0.1), mk(&b, 0.2), mk(&c, 0.3)]
                }
            };
            for i in 1..=2 {
                let l = apply(&q, &[i, i + 1, i], &s);
                let r = apply(&q, &[i + 1, i, i + 1], &s);
                prop_assert!(tuple_distance(&l, &r) <= TOL);
                prop_assert!(tuple_distance(&apply(&q, &[i, -i], &s), &s) <= TOL);
                prop_assert!(tuple_distance(&apply(&q, &[-i, i], &s), &s) <= TOL);
            }
            let l = apply(&q, &[1, -3], &s);
            let r = apply(&q, &[-3, 1], &s);
            prop_assert!(tuple_distance(&l, &r) <= TOL);
        }
    }

    #[test]
    fn finite_colorings_are_fixed(idx in 0usize..6, w in word(3, 6)) {
        let q = finite_biquandles().swap_remove(idx);
        let FixedSetReport::Finite { count, colorings, truncated } = fixed_points_finite(&q, &w).unwrap() else {
            unreachable!()
        };
        prop_assert!(!truncated);
        prop_assert_eq!(count as usize, colorings.len());
        for c in colorings {
            let s: Vec<Element> = c.into_iter().map(Element::Index).collect();
            prop_assert_eq!(induced_map(&q, &w, &s).unwrap(), s);
        }
    }

    #[test]
    fn markov_invariance_of_counts(idx in 0usize..6, w in word(3, 5), g in 1i32..=2, neg in any::<bool>(), pos in any::<bool>()) {
        let q = finite_biquandles().swap_remove(idx);
        let base = fixed_points_finite(&q, &w).unwrap().count();
        let g = if neg { -g } else { g };
        let conj = markov_conjugate(&w, g).unwrap();
        prop_assert_eq!(fixed_points_finite(&q, &conj).unwrap().count(), base);
        prop_assert_eq!(fixed_points_finite(&q, &markov_stabilize(&w, pos)).unwrap().count(), base);
    }

    #[test]
    fn linking_numbers(w in word(4, 8), g in 1i32..=3) {
        let p = crossing_matrix(&w);
        for i in 0..p.components {
            prop_assert_eq!(p.c[i][i], 0);
            for j in 0..p.components {
                prop_assert_eq!((p.c[i][j] + p.c[j][i]) % 2, 0);
                prop_assert_eq!(p.lk[i][j], p.lk[j][i]);
            }
        }
        let conj = crossing_matrix(&markov_conjugate(&w, g).unwrap());
        let sorted = |m: &Vec<Vec<i64>>| {
            let mut v: Vec<i64> = m.iter().flatten().copied().collect();
            v.sort();
            v
        };
        prop_assert_eq!(sorted(&p.lk), sorted(&conj.lk));
        let sys = coloring_space_system(&p);
        prop_assert_eq!(sys.equations.len(), p.components);
    }

    #[test]
    fn system_matches_fixed_points(w in word(4, 7), seed in any::<u64>()) {
        let r = verify_system_vs_fixed_points(&w, 20, seed, 1e-9).unwrap();
        prop_assert!(r.consistent, "{}: {:?}", w, r);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    /// Along each cycle of the braid permutation the (x, y) part (ℝ³) or the
    /// circle part (S¹ × ℝ²) of a fixed point is constant.
    #[test]
    fn permutation_compatibility(w in word(3, 5), seed in any::<u64>()) {
        let perm = w.permutation();
        for form in ClosedForm::ALL {
            let q = Biquandle::closed_form(form);
            let rep = sample_fixed_set(&q, &w, 2, seed, &NumericConfig::default()).unwrap();
            let FixedSetReport::Continuous { samples, .. } = rep else { unreachable!() };
            for s in samples {
                for (p, &to) in perm.iter().enumerate() {
                    let (a, b) = (s.point[p].coords(), s.point[to].coords());
                    prop_assert!((a[0] - b[0]).abs() <= 1e-7 && (a[1] - b[1]).abs() <= 1e-7, "{form} {w}");
                }
            }
        }
    }
}
