use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use fracbal::balance::{is_acyclic, is_balanced, negative_cycle_witness, switch};
use fracbal::certify::Mode;
use fracbal::fracsolve::{
    check_lp_result, column_generation, lp_to_certificate, solve_cover, ColumnGenOptions,
};
use fracbal::gadgets;
use fracbal::oracle::{brute_acyclic, brute_balanced, brute_maximal, random_graph};
use fracbal::{
    chi_fb, enumerate_sets, parse_graph, serialize_graph, verify, Certificate, EnumOptions,
    Property, Rational, SignedGraph, VertexSet,
};

fn graph(seed: u64, n: usize, density: f64) -> SignedGraph {
    random_graph(&mut ChaCha8Rng::seed_from_u64(seed), n, density)
}

fn subset(mask: u64, n: usize) -> VertexSet {
    VertexSet::from_mask(mask & ((1u64 << n) - 1))
}

fn holds(p: Property) -> impl Fn(&SignedGraph, &VertexSet) -> bool {
    move |g, s| p.holds(g, s).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn balance_is_hereditary(seed: u64, n in 1usize..=10, d in 0.2f64..0.9, s: u64, t: u64) {
        let g = graph(seed, n, d);
        let s = subset(s, n);
        let sub = VertexSet::from_mask(s.mask() & t);
        if is_balanced(&g, &s).unwrap() {
            prop_assert!(is_balanced(&g, &sub).unwrap());
        }
        if is_acyclic(&g, &s).unwrap() {
            prop_assert!(is_acyclic(&g, &sub).unwrap());
        }
    }

    #[test]
    fn switching_preserves_balance(seed: u64, n in 1usize..=10, d in 0.2f64..0.9, x: u64, s: u64) {
        let g = graph(seed, n, d);
        let h = switch(&g, &subset(x, n)).unwrap();
        let s = subset(s, n);
        prop_assert_eq!(is_balanced(&h, &s).unwrap(), is_balanced(&g, &s).unwrap());
    }

    #[test]
    fn witnesses_are_negative_induced_cycles(seed: u64, n in 3usize..=10, d in 0.3f64..0.9, s: u64) {
        let g = graph(seed, n, d);
        let s = subset(s, n);
        match negative_cycle_witness(&g, &s).unwrap() {
            Some(w) => {
                prop_assert!(w.vertices.len() >= 3);
                prop_assert!(w.vertices.iter().all(|&v| s.contains(v)));
                prop_assert_eq!(w.recompute_sign(&g), Some(fracbal::Sign::Neg));
            }
            None => prop_assert!(is_balanced(&g, &s).unwrap()),
        }
    }

    #[test]
    fn union_find_agrees_with_cycle_oracle(seed: u64, n in 1usize..=8, d in 0.1f64..0.9, s: u64) {
        let g = graph(seed, n, d);
        let s = subset(s, n);
        prop_assert_eq!(is_balanced(&g, &s).unwrap(), brute_balanced(&g, &s));
        prop_assert_eq!(is_acyclic(&g, &s).unwrap(), brute_acyclic(&g, &s));
    }

    #[test]
    fn graph_json_round_trip(seed: u64, n in 0usize..=12, d in 0.0f64..1.0) {
        let g = graph(seed, n, d);
        prop_assert_eq!(parse_graph(&serialize_graph(&g)).unwrap(), g);
    }

    #[test]
    fn maximal_family_matches_power_set(seed: u64, n in 1usize..=12, d in 0.2f64..0.8, acyclic: bool) {
        let g = graph(seed, n, d);
        let p = if acyclic { Property::Acyclic } else { Property::Balanced };
        let fam = enumerate_sets(&g, p, &EnumOptions::maximal()).unwrap();
        let check = holds(p);
        prop_assert_eq!(fam.sets, brute_maximal(&g, |s| check(&g, s)));
    }

    #[test]
    fn parallel_enumeration_is_deterministic(seed: u64, n in 9usize..=14, d in 0.2f64..0.8, must: u64) {
        let g = graph(seed, n, d);
        let base = EnumOptions::maximal().containing(subset(must & 0b11, n));
        let serial = enumerate_sets(&g, Property::Balanced, &base).unwrap();
        let parallel = enumerate_sets(&g, Property::Balanced, &EnumOptions { parallel: true, ..base }).unwrap();
        prop_assert_eq!(serial, parallel);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn lp_results_recheck_and_certify(seed: u64, n in 1usize..=9, d in 0.2f64..0.9) {
        let g = graph(seed, n, d);
        let fam = enumerate_sets(&g, Property::Balanced, &EnumOptions::maximal()).unwrap();
        let r = solve_cover(n, &fam.sets).unwrap();
        check_lp_result(n, &fam.sets, &r).unwrap();
        let cert = lp_to_certificate(&r, Mode::Balanced);
        prop_assert_eq!(Rational::new(cert.p.into(), cert.q.into()), r.optimum);
        prop_assert!(verify(&g, &cert).ok);
        let back = Certificate::from_json(&g, &cert.to_json(&g)).unwrap();
        prop_assert_eq!(back, cert.merged());
    }

    #[test]
    fn adding_a_set_never_raises_the_optimum(seed: u64, n in 1usize..=9, d in 0.2f64..0.9, extra: u64) {
        let g = graph(seed, n, d);
        let fam = enumerate_sets(&g, Property::Balanced, &EnumOptions::maximal()).unwrap();
        let before = solve_cover(n, &fam.sets).unwrap().optimum;
        let extra = subset(extra, n);
        prop_assume!(!extra.is_empty());
        let mut more = fam.sets.clone();
        more.push(extra);
        prop_assert!(solve_cover(n, &more).unwrap().optimum <= before);
    }

    #[test]
    fn disjoint_families_add_up(s1: u64, s2: u64, n1 in 1usize..=6, n2 in 1usize..=6, d in 0.2f64..0.9) {
        let g = graph(s1, n1, d);
        let h = graph(s2, n2, d);
        let fg = enumerate_sets(&g, Property::Balanced, &EnumOptions::maximal()).unwrap();
        let fh = enumerate_sets(&h, Property::Balanced, &EnumOptions::maximal()).unwrap();
        let rg = solve_cover(n1, &fg.sets).unwrap();
        let rh = solve_cover(n2, &fh.sets).unwrap();
        let mut both = fg.sets.clone();
        both.extend(fh.sets.iter().map(|s| s.iter().map(|v| v + n1).collect::<VertexSet>()));
        let r = solve_cover(n1 + n2, &both).unwrap();
        let dual_sum: Rational = r.dual.iter().sum();
        prop_assert_eq!(&dual_sum, &r.optimum);
        prop_assert_eq!(r.optimum, &rg.optimum + &rh.optimum);
        // on the union graph itself sets may span both parts, so the optimum is the larger one
        let union = g.disjoint_union(&h, "'").unwrap();
        prop_assert_eq!(chi_fb(&union).unwrap(), rg.optimum.max(rh.optimum));
    }

    #[test]
    fn column_generation_matches_enumeration(seed: u64, n in 1usize..=12, d in 0.2f64..0.8, acyclic: bool) {
        let g = graph(seed, n, d);
        let p = if acyclic { Property::Acyclic } else { Property::Balanced };
        let full = enumerate_sets(&g, p, &EnumOptions::maximal()).unwrap();
        let exact = solve_cover(n, &full.sets).unwrap().optimum;
        let cg = column_generation(&g, p, &ColumnGenOptions::default()).unwrap();
        prop_assert!(cg.converged);
        prop_assert_eq!(&cg.upper, &exact);
        prop_assert_eq!(cg.lower, exact);
    }
}

#[test]
fn gadgets_round_trip_and_are_deterministic() {
    for g in [
        gadgets::k3_minus(),
        gadgets::k4_minus(),
        gadgets::w_hat(),
        gadgets::w_prime(),
        gadgets::w_double_prime(),
        gadgets::u_hat(),
        gadgets::w_underlying(),
    ] {
        let text = serialize_graph(&g.graph);
        assert_eq!(parse_graph(&text).unwrap(), g.graph);
    }
    assert_eq!(
        serialize_graph(&gadgets::g_hat_k3().graph),
        serialize_graph(&gadgets::g_hat_k3().graph)
    );
}

#[test]
fn regression_values() {
    assert_eq!(fracbal::a_f(&gadgets::w_underlying().graph).unwrap(), Rational::from_integer(2.into()));
    let w_hat = chi_fb(&gadgets::w_hat().graph).unwrap();
    assert_eq!(w_hat, Rational::new(11.into(), 6.into()));
    assert!(w_hat <= Rational::from_integer(2.into()));
}
