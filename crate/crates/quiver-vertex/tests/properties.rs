mod common;

use proptest::prelude::*;

use quiver_vertex::catalog;
use quiver_vertex::io::{point_from_value, point_to_value, theory_from_value, theory_to_value};
use quiver_vertex::kacmoody::{positive_real_roots, reflect, RootVec};
use quiver_vertex::scalar::SamplePoint;
use quiver_vertex::verify::{conjecture_rhs, generate_corpus};

#[test]
fn pochhammer_cocycle() {
    common::pochhammer_cocycle(256).unwrap();
}

#[test]
fn q_binomial_expansion() {
    common::q_binomial(64).unwrap();
}

#[test]
fn series_ring_laws() {
    common::ring_laws(128).unwrap();
}

#[test]
fn parallel_determinism() {
    common::parallel_determinism(8).unwrap();
}

#[test]
fn degree_sums_match_kahler_shift() {
    for p in [
        catalog::a3_point(),
        catalog::gr22_point(),
        catalog::gr23_point(),
        catalog::d7_point(),
        catalog::d4_instance().sum_point().unwrap(),
    ] {
        common::degree_sum_identity(&p, 200).unwrap();
    }
}

#[test]
fn q_equals_hbar_ignores_framing() {
    for p in [catalog::gr12_point(), catalog::gr23_point(), catalog::a3_point()] {
        common::q_equals_hbar_framing_independence(&p, 4).unwrap();
    }
}

#[test]
fn extremal_word_matches_enumeration() {
    for inst in generate_corpus(50, 11) {
        let ctx = inst.context();
        let r = quiver_vertex::kacmoody::extremal_word(&ctx);
        assert!(r.in_orbit);
        let h = r.roots.iter().map(|(a, _)| a.height()).max().unwrap_or(0) + 2;
        let mut from_word = r.roots.clone();
        let mut enumerated: Vec<_> = positive_real_roots(&ctx.cartan, h)
            .into_iter()
            .filter_map(|a| {
                let p = ctx.pairing(&a);
                (p < 0).then_some((a, p))
            })
            .collect();
        from_word.sort();
        enumerated.sort();
        assert_eq!(from_word, enumerated, "{inst:?}");
    }
}

#[test]
fn conjecture_truncation_is_monotone() {
    let t = catalog::a3_theory();
    let s = SamplePoint::new(5, &t.framing_vars());
    let lo = conjecture_rhs(&t, 4, &s).unwrap();
    let hi = conjecture_rhs(&t, 5, &s).unwrap();
    assert_eq!(hi.truncate(4), lo);
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn reflections_preserve_the_form(i in 0usize..4, a in 0usize..10, b in 0usize..10) {
        let t = catalog::d4_instance().sum_point().unwrap().theory;
        let c = t.cartan();
        let roots: Vec<RootVec> = positive_real_roots(&c, 3).into_iter().collect();
        let (x, y) = (&roots[a % roots.len()], &roots[b % roots.len()]);
        prop_assert_eq!(c.form(&reflect(&c, x, i), &reflect(&c, y, i)), c.form(x, y));
    }

    #[test]
    fn pairing_is_linear(a in 0usize..20, b in 0usize..20) {
        let ctx = catalog::d7_theory().weight_context();
        let roots: Vec<RootVec> = positive_real_roots(&ctx.cartan, 4).into_iter().collect();
        let (x, y) = (&roots[a % roots.len()], &roots[b % roots.len()]);
        prop_assert_eq!(ctx.pairing(&x.add(y)), ctx.pairing(x) + ctx.pairing(y));
    }

    #[test]
    fn files_round_trip(k in 0usize..quiver_vertex::catalog::BUILTINS.len()) {
        let p = catalog::builtin_point(catalog::BUILTINS[k]).unwrap();
        let tv = theory_to_value(&p.theory);
        prop_assert_eq!(&theory_from_value(&tv).unwrap(), &p.theory);
        let pv = point_to_value(&p);
        prop_assert_eq!(point_from_value(&pv, None).unwrap(), p);
    }
}
