//! The acceptance checks, runnable one by one or all together. Each check
//! recomputes its claims from scratch and reports every failed assertion.

use std::time::{Duration, Instant};

use num::Signed;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::balance::{all_triangles, cycle_witness, is_acyclic, is_balanced, negative_cycle_witness, switch};
use crate::bounds::{
    first_infeasible_index, m_upper_bound, mu_bound, mu_recurrence, threshold_172_85, threshold_52_25,
    threshold_83_41, BoundParams,
};
use crate::certify::{
    all_three_count, k4_block_partition_holds, overlap, triangle_missing_count, verify, Fixture, Mode,
};
use crate::compose::{compose_8341, edge_overlaps_in_range, g_hat_trace, random_trace, P, Q};
use crate::error::{Error, Result};
use crate::fracsolve::{
    a_f_lp, check_lp_result, chi_fb_lp, column_generation, format_rational, rational, ColumnGenOptions,
    LpResult,
};
use crate::gadgets::{
    g_hat_k3, g_hat_k4, g_sequence, k3_minus, k4_minus, u_hat, w1_underlying, w_double_prime, w_hat,
    w_prime, w_underlying, BuildTrace, GadgetGraph, Orientation, TraceBase, TraceStep,
};
use crate::graph::{parse_graph, serialize_graph, Sign, SignedGraph, VertexSet};
use crate::oracle::{brute_acyclic, brute_balanced, brute_maximal, random_graph, random_tree};
use crate::setfam::{check_forest_lemmas, check_missing_triangle_lemma, enumerate_sets, terminal_case_family, EnumOptions, Property};

#[derive(Clone, Copy, Debug)]
pub struct Criterion {
    pub id: &'static str,
    pub summary: &'static str,
    pub budget: Duration,
    /// not part of `all`
    pub stretch: bool,
}

const fn criterion(id: &'static str, summary: &'static str, secs: u64) -> Criterion {
    Criterion {
        id,
        summary,
        budget: Duration::from_secs(secs),
        stretch: false,
    }
}

pub const CRITERIA: &[Criterion] = &[
    criterion("lemma-3.1", "ten balanced sets through u,v of W-hat; W' sets miss a marked triangle", 5),
    criterion("table-1", "(172,85)-coloring of W-hat: coverage, u-v overlap 28, triangle audits", 1),
    criterion("tables-2-3", "(83,41)-colorings of W-hat with u-v overlap 13 and 14", 1),
    criterion("table-5", "(52,25) forest coloring of W with overlaps 10", 1),
    criterion("forest-lemmas", "induced forests of W: orders 5 and 4, two of z,t,x1", 1),
    criterion("exact-lp", "exact LP values with re-verified duality certificates", 4),
    criterion("compose", "(83,41) composer on fixed and 100 random traces", 60),
    criterion("bounds", "thresholds 83/41, 172/85, 52/25 and the mu recurrence", 10),
    criterion("constructions", "vertex counts, marked triangles, simplicity", 5),
    criterion("properties", "balance properties and oracle agreement on 500 random graphs", 60),
    Criterion {
        id: "w1-column-generation",
        summary: "column generation interval for a_f(W1) contains 52/25",
        budget: Duration::from_secs(600),
        stretch: true,
    },
];

#[derive(Clone, Debug, Default)]
pub struct ReproduceOptions {
    pub seed: u64,
    /// skip the runtime budget check (e.g. unoptimized builds)
    pub ignore_budget: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct Outcome {
    pub id: String,
    pub passed: bool,
    pub details: Vec<String>,
    pub failures: Vec<String>,
    pub elapsed_ms: u128,
    pub budget_ms: u128,
}

impl Outcome {
    /// `PASS id (12 ms)` or `FAIL id (12 ms): first failure`.
    pub fn line(&self) -> String {
        if self.passed {
            format!("PASS {} ({} ms)", self.id, self.elapsed_ms)
        } else {
            format!(
                "FAIL {} ({} ms): {}",
                self.id,
                self.elapsed_ms,
                self.failures.first().map(String::as_str).unwrap_or("")
            )
        }
    }
}

#[derive(Default)]
struct Audit {
    details: Vec<String>,
    failures: Vec<String>,
}

impl Audit {
    fn check(&mut self, ok: bool, what: impl Into<String>) {
        let what = what.into();
        if ok {
            self.details.push(what);
        } else {
            self.failures.push(what);
        }
    }

    fn eq<T: PartialEq + std::fmt::Debug>(&mut self, what: &str, got: T, want: T) {
        let ok = got == want;
        self.check(ok, format!("{what}: got {got:?}, expected {want:?}"));
    }
}

pub fn find(id: &str) -> Option<&'static Criterion> {
    CRITERIA.iter().find(|c| c.id == id)
}

pub fn run(id: &str, opts: &ReproduceOptions) -> Result<Outcome> {
    let criterion = find(id).ok_or_else(|| Error::UnknownCriterion(id.to_string()))?;
    let start = Instant::now();
    let mut a = Audit::default();
    let result = match id {
        "lemma-3.1" => lemma_3_1(&mut a),
        "table-1" => table_1(&mut a),
        "tables-2-3" => tables_2_3(&mut a),
        "table-5" => table_5(&mut a),
        "forest-lemmas" => forest_lemmas(&mut a),
        "exact-lp" => exact_lp(&mut a, opts.seed),
        "compose" => compose(&mut a, opts.seed),
        "bounds" => bounds(&mut a),
        "constructions" => constructions(&mut a),
        "properties" => properties(&mut a, opts.seed),
        "w1-column-generation" => w1_column_generation(&mut a, criterion.budget),
        _ => unreachable!("criterion ids are matched above"),
    };
    if let Err(e) = result {
        a.failures.push(format!("error: {e}"));
    }
    let elapsed = start.elapsed();
    if !opts.ignore_budget && elapsed > criterion.budget {
        a.failures.push(format!(
            "runtime {} ms exceeds budget {} ms",
            elapsed.as_millis(),
            criterion.budget.as_millis()
        ));
    }
    Ok(Outcome {
        id: id.to_string(),
        passed: a.failures.is_empty(),
        details: a.details,
        failures: a.failures,
        elapsed_ms: elapsed.as_millis(),
        budget_ms: criterion.budget.as_millis(),
    })
}

/// Every non-stretch criterion, in order.
pub fn run_all(opts: &ReproduceOptions) -> Vec<Outcome> {
    CRITERIA
        .iter()
        .filter(|c| !c.stretch)
        .map(|c| run(c.id, opts).expect("listed criterion"))
        .collect()
}

fn sets(g: &SignedGraph, rows: &[&[&str]]) -> Result<Vec<VertexSet>> {
    rows.iter().map(|r| g.set(r)).collect()
}

pub fn lemma_3_1_sets(g: &SignedGraph) -> Result<Vec<VertexSet>> {
    sets(
        g,
        &[
            &["u", "v", "x1", "x2", "x4"],
            &["u", "v", "x1", "x3", "x4"],
            &["u", "v", "w", "x1", "x4"],
            &["u", "v", "w", "x2"],
            &["u", "v", "w", "x3"],
            &["u", "v", "w", "x5"],
            &["u", "v", "x1", "x3"],
            &["u", "v", "x2", "x5"],
            &["u", "v", "x2", "x4"],
            &["u", "v", "x3", "x5"],
        ],
    )
}

fn lemma_3_1(a: &mut Audit) -> Result<()> {
    let w = w_hat();
    let g = &w.graph;
    let positive = sets(g, &[&["u", "x1", "x2"], &["v", "x3", "x4"]])?;
    let mut expected = lemma_3_1_sets(g)?;
    let mut family = terminal_case_family(&w, &positive)?;
    expected.sort();
    family.sort();
    a.eq("balanced sets through u,v (case family)", family.len(), 10);
    a.check(family == expected, "case family equals B1..B10 set for set");
    for (i, s) in lemma_3_1_sets(g)?.iter().enumerate() {
        a.details.push(format!("B{}: {{{}}}", i + 1, g.set_names(s).join(", ")));
    }

    let uv = g.set(&["u", "v"])?;
    let plain = enumerate_sets(g, Property::Balanced, &EnumOptions::maximal().containing(uv))?;
    a.eq("plainly maximal balanced sets through u,v", plain.len(), 8);

    let b3 = &lemma_3_1_sets(g)?[2];
    let b10 = &lemma_3_1_sets(g)?[9];
    let zx2x3 = g.set(&["z", "x2", "x3"])?;
    let wx1x2 = g.set(&["w", "x1", "x2"])?;
    a.check(b3.is_disjoint(&zx2x3), "B3 misses z x2 x3");
    a.check(b10.is_disjoint(&wx1x2), "B10 misses w x1 x2");

    let wp = w_prime();
    a.eq("marked triangles of W'", wp.marked.len(), 7);
    let check = check_missing_triangle_lemma(&wp)?;
    a.check(
        check.holds,
        format!(
            "each of the {} maximal balanced sets of W' through u,v misses a marked triangle",
            check.examined
        ),
    );
    Ok(())
}

fn id(g: &SignedGraph, name: &str) -> Result<usize> {
    g.id(name)
}

fn table_1(a: &mut Audit) -> Result<()> {
    let c = Fixture::Table1.load()?;
    let g = Fixture::Table1.host();
    let r = verify(&g, &c);
    a.check(r.ok, format!("verifier ok ({} findings)", r.violations.len()));
    a.eq("palette used", r.used, 172);
    a.check(r.per_vertex_coverage.iter().all(|&x| x == 85), "coverage 85 at every vertex");
    let bp = BoundParams::new(172, 85)?;
    let m = m_upper_bound(bp) as u64;
    a.eq("overlap(u,v)", overlap(&c, id(&g, "u")?, id(&g, "v")?), 7 * m);
    a.eq("overlap(u,v)", overlap(&c, id(&g, "u")?, id(&g, "v")?), 28);
    let audited = [
        &["u", "x1", "x2"][..],
        &["v", "x3", "x4"],
        &["w", "x1", "x2"],
        &["w", "x3", "x4"],
        &["z", "x2", "x3"],
        &["t", "x4", "x5"],
    ];
    for t in audited {
        let ts = g.set(t)?;
        let missing = triangle_missing_count(&c, &ts);
        let sign = match crate::balance::triangle_sign(&g, &ts) {
            Some(Sign::Pos) => "positive",
            Some(Sign::Neg) => "negative",
            None => "not a triangle",
        };
        if missing <= m {
            a.check(true, format!("{} ({sign}) misses {missing} <= {m} colors", t.join("")));
        } else {
            let avoiding: Vec<String> = c
                .classes
                .iter()
                .filter(|k| k.set.is_disjoint(&ts))
                .map(|k| format!("{{{}}}:{}", g.set_names(&k.set).join(","), k.rep))
                .collect();
            a.check(
                false,
                format!(
                    "{} ({sign}) misses {missing} > {m} colors via {}",
                    t.join(""),
                    avoiding.join(" ")
                ),
            );
        }
    }
    for t in [["u", "x1", "x2"], ["v", "x3", "x4"]] {
        let n = all_three_count(&c, &g.set(&t)?);
        a.check(n <= 4, format!("{} has {n} <= 4 colors on all three", t.join("")));
    }
    a.check(
        k4_block_partition_holds(172, 85, 28),
        "palette splits as 4 + 6*28 with 3*28 + 1 = 85 per main vertex",
    );
    Ok(())
}

fn tables_2_3(a: &mut Audit) -> Result<()> {
    for (fixture, uv) in [(Fixture::Table2, 13), (Fixture::Table3, 14)] {
        let c = fixture.load()?;
        let g = fixture.host();
        let r = verify(&g, &c);
        a.check(r.ok, format!("{fixture:?}: verifier ok"));
        a.eq(&format!("{fixture:?}: palette used"), r.used, P);
        a.check(r.per_vertex_coverage.iter().all(|&x| x == Q), format!("{fixture:?}: coverage 41"));
        let (u, v) = (id(&g, "u")?, id(&g, "v")?);
        a.eq(&format!("{fixture:?}: overlap(u,v)"), overlap(&c, u, v), uv);
        let odd: Vec<String> = g
            .edges()
            .filter(|&(x, y, _)| (x, y) != (u.min(v), u.max(v)) && overlap(&c, x, y) != 14)
            .map(|(x, y, _)| format!("{}-{}", g.name(x), g.name(y)))
            .collect();
        a.check(odd.is_empty(), format!("{fixture:?}: every other edge has overlap 14 {odd:?}"));
    }
    Ok(())
}

fn table_5(a: &mut Audit) -> Result<()> {
    let c = Fixture::Table5.load()?;
    let g = Fixture::Table5.host();
    a.eq("mode", c.mode, Mode::Forest);
    let r = verify(&g, &c);
    a.check(r.ok, "verifier ok");
    a.eq("palette used", r.used, 52);
    a.check(r.per_vertex_coverage.iter().all(|&x| x == 25), "coverage 25 at every vertex");
    a.eq("classes", c.classes.len(), 20);
    let forests = c
        .classes
        .iter()
        .filter(|k| cycle_witness(&g, &k.set).map(|w| w.is_none()).unwrap_or(false))
        .count();
    a.eq("classes inducing forests", forests, 20);
    let u = id(&g, "u")?;
    for other in ["v", "z", "x1", "t"] {
        a.eq(&format!("overlap(u,{other})"), overlap(&c, u, id(&g, other)?), 10);
    }
    Ok(())
}

fn forest_lemmas(a: &mut Audit) -> Result<()> {
    let r = check_forest_lemmas(&w_underlying().graph)?;
    a.eq("maximum induced forest order", r.max_acyclic_order, 5);
    a.eq("maximum induced forest order through u,v", r.max_acyclic_order_with_uv, 4);
    a.check(
        r.max_sets_with_u_hit_two_of_z_t_x1 && r.max_sets_with_u > 0,
        format!("all {} order-5 forests through u meet z,t,x1 twice", r.max_sets_with_u),
    );
    Ok(())
}

fn cycle_graph(n: usize) -> Result<SignedGraph> {
    let mut g = SignedGraph::new();
    for i in 0..n {
        g.add_vertex(&format!("c{i}"))?;
    }
    for i in 0..n {
        g.add_edge(i, (i + 1) % n, Sign::Pos)?;
    }
    Ok(g)
}

fn lp_case(a: &mut Audit, what: &str, g: &SignedGraph, property: Property, want: (i64, i64)) -> Result<()> {
    let r: LpResult = match property {
        Property::Balanced => chi_fb_lp(g)?,
        Property::Acyclic => a_f_lp(g)?,
    };
    let family = enumerate_sets(g, property, &EnumOptions::maximal())?;
    let recheck = check_lp_result(g.vertex_count(), &family.sets, &r);
    a.check(recheck.is_ok(), format!("{what}: certificates re-verified"));
    a.eq(what, format_rational(&r.optimum), format_rational(&rational(want.0, want.1)));
    Ok(())
}

fn exact_lp(a: &mut Audit, seed: u64) -> Result<()> {
    lp_case(a, "chi_fb(K3,-)", &k3_minus().graph, Property::Balanced, (3, 2))?;
    lp_case(a, "chi_fb(K4,-)", &k4_minus().graph, Property::Balanced, (2, 1))?;
    lp_case(a, "a_f(C4)", &cycle_graph(4)?, Property::Acyclic, (4, 3))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for n in [1, 2, 5, 9, 14] {
        lp_case(a, &format!("a_f(tree on {n})"), &random_tree(&mut rng, n), Property::Acyclic, (1, 1))?;
    }
    Ok(())
}

fn compose(a: &mut Audit, seed: u64) -> Result<()> {
    let check = |a: &mut Audit, what: String, trace: &BuildTrace| -> Result<()> {
        let (g, c) = compose_8341(trace)?;
        let r = verify(&g.graph, &c);
        let cover = r.per_vertex_coverage.iter().all(|&x| x == Q);
        let edges = edge_overlaps_in_range(&g.graph, &c);
        a.check(
            r.ok && cover && c.p == P && c.q == Q && edges.is_ok(),
            format!("{what}: ok {}, coverage 41 {cover}, edge overlaps {edges:?}", r.ok),
        );
        Ok(())
    };
    check(a, "empty trace".into(), &BuildTrace { base: TraceBase::K3Minus, steps: vec![] })?;
    let apex = BuildTrace {
        base: TraceBase::K3Minus,
        steps: vec![TraceStep::InnerK4 {
            face: ["a".into(), "b".into(), "c".into()],
        }],
    };
    check(a, "one apex".into(), &apex)?;
    check(a, "substitutions then apexes (66 + 21 vertices)".into(), &g_hat_trace())?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut passed = 0;
    for k in 0..100 {
        let depth = rng.gen_range(0..=5);
        let trace = random_trace(seed.wrapping_mul(1000).wrapping_add(k), depth);
        let (g, c) = compose_8341(&trace)?;
        let r = verify(&g.graph, &c);
        if r.ok && edge_overlaps_in_range(&g.graph, &c).is_ok() && r.per_vertex_coverage.iter().all(|&x| x == Q) {
            passed += 1;
        } else {
            a.check(false, format!("random trace {k}: {}", trace.to_json()));
        }
    }
    a.eq("random traces verified", passed, 100);
    Ok(())
}

fn bounds(a: &mut Audit) -> Result<()> {
    a.eq("threshold from the missing-color system", format_rational(&threshold_83_41()), "83/41".into());
    a.eq("threshold from the shared-color system", format_rational(&threshold_172_85()), "172/85".into());
    a.eq("threshold from the forest counting system", format_rational(&threshold_52_25()), "52/25".into());
    a.eq("first infeasible index (2,1)", first_infeasible_index(BoundParams::new(2, 1)?), Some(1));
    a.eq("first infeasible index (83,41)", first_infeasible_index(BoundParams::new(83, 41)?), None);
    let finite = first_infeasible_index(BoundParams::new(168, 83)?);
    a.check(finite.is_some(), format!("first infeasible index (168,83) = {finite:?}"));

    let mut scanned = 0;
    let mut mismatches = Vec::new();
    for q in 1..=100u64 {
        for p in 2 * q..=5 * q / 2 {
            let bp = BoundParams::new(p, q)?;
            scanned += 1;
            let at_least = 41 * p >= 83 * q;
            let idx = first_infeasible_index(bp);
            let consistent = match idx {
                None => at_least && (0..=30).all(|i| !mu_bound(bp, i).is_negative()),
                Some(i) => {
                    !at_least
                        && mu_bound(bp, i).is_negative()
                        && (i == 0 || !mu_bound(bp, i - 1).is_negative())
                        && mu_bound(bp, i) == crate::fracsolve::Rational::from_integer(mu_recurrence(bp, i))
                }
            };
            if !consistent {
                mismatches.push((p, q));
            }
        }
    }
    a.check(
        mismatches.is_empty(),
        format!("scan of {scanned} pairs with q <= 100: index is none iff p/q >= 83/41 {mismatches:?}"),
    );
    let agree = [(2, 1), (83, 41), (172, 85), (168, 83)].iter().all(|&(p, q)| {
        let bp = BoundParams::new(p, q).expect("valid");
        (0..=30).all(|i| mu_bound(bp, i) == crate::fracsolve::Rational::from_integer(mu_recurrence(bp, i)))
    });
    a.check(agree, "closed form equals recurrence for i <= 30");
    Ok(())
}

fn simple(g: &SignedGraph) -> bool {
    (0..g.vertex_count()).all(|v| {
        let ns: Vec<usize> = g.neighbors(v).iter().map(|&(b, _)| b).collect();
        let mut d = ns.clone();
        d.sort_unstable();
        d.dedup();
        d.len() == ns.len() && !ns.contains(&v)
    }) && g.edges().count() == g.edge_count()
}

fn constructions(a: &mut Audit) -> Result<()> {
    let list: Vec<(&str, GadgetGraph, usize)> = vec![
        ("W-hat", w_hat(), 10),
        ("W'", w_prime(), 16),
        ("W''", w_double_prime(), 23),
        ("G-hat over (K3,-)", g_hat_k3(), 66),
        ("G-hat over (K4,-)", g_hat_k4(), 130),
        ("W1 forward", w1_underlying(Orientation::Forward), 34),
        ("W1 reversed", w1_underlying(Orientation::Reversed), 34),
        ("U-hat", u_hat(), 88),
        ("G_1", g_sequence(1, 1)?, 130),
    ];
    for (name, g, n) in &list {
        a.eq(&format!("{name} vertices"), g.graph.vertex_count(), *n);
        a.check(g.audit_marked().is_empty(), format!("{name}: marked triangles are negative"));
        a.check(simple(&g.graph), format!("{name}: simple"));
    }
    a.eq("marked triangles of U-hat", u_hat().marked.len(), 42);
    let negative: usize = all_triangles(&w_hat().graph)
        .iter()
        .filter(|(_, s)| *s == Sign::Neg)
        .count();
    a.check(negative > 0, format!("W-hat has {negative} negative triangles"));
    Ok(())
}

fn properties(a: &mut Audit, seed: u64) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut bad: Vec<String> = Vec::new();
    for k in 0..500 {
        let n = rng.gen_range(1..=8);
        let density = rng.gen_range(0.2..0.9);
        let g = random_graph(&mut rng, n, density);
        let all = g.all_vertices();
        let s = VertexSet::from_mask(rng.gen_range(0..1u64 << n));
        let balanced = is_balanced(&g, &s)?;
        if balanced != brute_balanced(&g, &s) {
            bad.push(format!("graph {k}: balance disagrees with cycle enumeration"));
        }
        if is_acyclic(&g, &s)? != brute_acyclic(&g, &s) {
            bad.push(format!("graph {k}: acyclicity disagrees with cycle enumeration"));
        }
        // heredity
        if balanced && s.iter().any(|v| !is_balanced(&g, &s.iter().filter(|&x| x != v).collect()).unwrap_or(false)) {
            bad.push(format!("graph {k}: subset of a balanced set is unbalanced"));
        }
        // switching
        let x = VertexSet::from_mask(rng.gen_range(0..1u64 << n));
        let h = switch(&g, &x)?;
        if is_balanced(&h, &all)? != is_balanced(&g, &all)? || is_balanced(&h, &s)? != balanced {
            bad.push(format!("graph {k}: switching changed balance"));
        }
        // witness soundness
        match negative_cycle_witness(&g, &all)? {
            Some(w) => {
                let in_graph = w.vertices.len() >= 3 && {
                    let mut d = w.vertices.clone();
                    d.sort_unstable();
                    d.dedup();
                    d.len() == w.vertices.len()
                };
                if !in_graph || w.recompute_sign(&g) != Some(Sign::Neg) {
                    bad.push(format!("graph {k}: witness is not a negative cycle"));
                }
            }
            None => {
                if !is_balanced(&g, &all)? {
                    bad.push(format!("graph {k}: unbalanced graph without witness"));
                }
            }
        }
        // round trip
        if parse_graph(&serialize_graph(&g))? != g {
            bad.push(format!("graph {k}: parse(serialize) differs"));
        }
        // maximal families
        for property in [Property::Balanced, Property::Acyclic] {
            let fam = enumerate_sets(&g, property, &EnumOptions::maximal())?;
            let oracle = brute_maximal(&g, |s| match property {
                Property::Balanced => brute_balanced(&g, s),
                Property::Acyclic => brute_acyclic(&g, s),
            });
            if fam.sets != oracle {
                bad.push(format!("graph {k}: maximal {property:?} family differs from power set"));
            }
        }
    }
    a.check(bad.is_empty(), format!("500 random graphs on <= 8 vertices {bad:?}"));
    Ok(())
}

fn w1_column_generation(a: &mut Audit, budget: Duration) -> Result<()> {
    let g = w1_underlying(Orientation::Forward).graph;
    let opts = ColumnGenOptions {
        time_budget: Some(budget.saturating_sub(Duration::from_secs(5))),
        ..Default::default()
    };
    let r = column_generation(&g, Property::Acyclic, &opts)?;
    let target = rational(52, 25);
    a.check(
        r.lower <= target && target <= r.upper,
        format!(
            "interval [{}, {}] contains 52/25 (converged {}, {} rounds)",
            format_rational(&r.lower),
            format_rational(&r.upper),
            r.converged,
            r.rounds
        ),
    );
    Ok(())
}
