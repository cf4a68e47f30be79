//! Exact covering LP over a family of vertex sets.
//!
//! The primal is `min Σ w_S` subject to `Σ_{S∋v} w_S ≥ 1`, `w ≥ 0`. The
//! solver runs the primal simplex on the dual packing problem
//! `max Σ y_v` subject to `Σ_{v∈S} y_v ≤ 1`, `y ≥ 0`, whose slack basis is
//! feasible from the start, and reads the covering weights off the reduced
//! costs of the slacks. Everything is in exact rationals and both solutions
//! are re-checked before they are returned.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use num::integer::Integer;
use num::{BigInt, BigRational, One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::certify::{Certificate, Class, Mode};
use crate::error::{Error, Result};
use crate::graph::{SignedGraph, VertexSet};
use crate::setfam::{enumerate_sets, Checker, EnumOptions, Property, SetFamily};

pub type Rational = BigRational;

pub fn rational(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// `n/d` text form, or just `n` for integers.
pub fn format_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn parse_rational(s: &str) -> Option<Rational> {
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim().parse::<BigInt>().ok()?, d.trim().parse::<BigInt>().ok()?),
        None => (s.trim().parse::<BigInt>().ok()?, BigInt::one()),
    };
    (!d.is_zero()).then(|| Rational::new(n, d))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LpResult {
    pub optimum: Rational,
    /// nonzero covering weights
    pub primal: BTreeMap<VertexSet, Rational>,
    /// one value per vertex
    pub dual: Vec<Rational>,
}

impl LpResult {
    pub fn to_value(&self, g: &SignedGraph) -> serde_json::Value {
        #[derive(Serialize)]
        struct Weighted {
            set: Vec<String>,
            weight: String,
        }
        #[derive(Serialize)]
        struct Price {
            vertex: String,
            value: String,
        }
        serde_json::json!({
            "optimum": format_rational(&self.optimum),
            "primal": self.primal.iter().map(|(s, w)| Weighted {
                set: g.set_names(s),
                weight: format_rational(w),
            }).collect::<Vec<_>>(),
            "dual": self.dual.iter().enumerate().map(|(v, y)| Price {
                vertex: g.name(v).to_string(),
                value: format_rational(y),
            }).collect::<Vec<_>>(),
        })
    }
}

/// Condensed simplex dictionary: `basic_i = rhs_i − Σ_j a_ij · nonbasic_j`,
/// objective `z = z0 + Σ_j c_j · nonbasic_j`. Variables `0..n` are the
/// vertex prices, `n..n+m` the slacks of the set constraints.
struct Dictionary {
    a: Vec<Vec<Rational>>,
    rhs: Vec<Rational>,
    c: Vec<Rational>,
    z: Rational,
    basic: Vec<usize>,
    nonbasic: Vec<usize>,
}

impl Dictionary {
    fn new(n: usize, sets: &[VertexSet]) -> Self {
        let a = sets
            .iter()
            .map(|s| {
                (0..n)
                    .map(|v| if s.contains(v) { Rational::one() } else { Rational::zero() })
                    .collect()
            })
            .collect();
        Dictionary {
            a,
            rhs: vec![Rational::one(); sets.len()],
            c: vec![Rational::one(); n],
            z: Rational::zero(),
            basic: (n..n + sets.len()).collect(),
            nonbasic: (0..n).collect(),
        }
    }

    /// Lowest-index improving variable (Bland).
    fn entering(&self) -> Option<usize> {
        (0..self.c.len())
            .filter(|&j| self.c[j].is_positive())
            .min_by_key(|&j| self.nonbasic[j])
    }

    /// Minimum ratio row, ties to the lowest basic index (Bland).
    fn leaving(&self, e: usize) -> Option<usize> {
        let mut best: Option<(Rational, usize)> = None;
        for (r, row) in self.a.iter().enumerate() {
            if !row[e].is_positive() {
                continue;
            }
            let ratio = &self.rhs[r] / &row[e];
            let better = match &best {
                None => true,
                Some((b, br)) => ratio < *b || (ratio == *b && self.basic[r] < self.basic[*br]),
            };
            if better {
                best = Some((ratio, r));
            }
        }
        best.map(|(_, r)| r)
    }

    fn pivot(&mut self, r: usize, e: usize) {
        let inv = self.a[r][e].recip();
        let width = self.c.len();
        for j in 0..width {
            if j != e && !self.a[r][j].is_zero() {
                self.a[r][j] = &self.a[r][j] * &inv;
            }
        }
        self.rhs[r] = &self.rhs[r] * &inv;
        self.a[r][e] = inv;

        let pivot_row = std::mem::take(&mut self.a[r]);
        for i in 0..self.a.len() {
            if i == r || self.a[i][e].is_zero() {
                continue;
            }
            let f = self.a[i][e].clone();
            for (j, pj) in pivot_row.iter().enumerate() {
                if j != e && !pj.is_zero() {
                    self.a[i][j] = &self.a[i][j] - &f * pj;
                }
            }
            self.rhs[i] = &self.rhs[i] - &f * &self.rhs[r];
            self.a[i][e] = -&f * &pivot_row[e];
        }
        let ce = self.c[e].clone();
        for (j, pj) in pivot_row.iter().enumerate() {
            if j != e && !pj.is_zero() {
                self.c[j] = &self.c[j] - &ce * pj;
            }
        }
        self.z = &self.z + &ce * &self.rhs[r];
        self.c[e] = -&ce * &pivot_row[e];
        self.a[r] = pivot_row;
        std::mem::swap(&mut self.basic[r], &mut self.nonbasic[e]);
    }
}

/// Solves the covering LP over `sets` on `n` vertices.
pub fn solve_cover(n: usize, sets: &[VertexSet]) -> Result<LpResult> {
    for v in 0..n {
        if !sets.iter().any(|s| s.contains(v)) {
            return Err(Error::Uncovered(v.to_string()));
        }
    }
    for s in sets {
        if s.iter().any(|v| v >= n) {
            return Err(Error::VertexOutOfRange(s.iter().max().unwrap_or(0)));
        }
    }
    let mut d = Dictionary::new(n, sets);
    while let Some(e) = d.entering() {
        // every price appears in some constraint, so the dual is bounded
        let r = d.leaving(e).expect("bounded packing problem");
        d.pivot(r, e);
    }

    let mut dual = vec![Rational::zero(); n];
    for (r, &b) in d.basic.iter().enumerate() {
        if b < n {
            dual[b] = d.rhs[r].clone();
        }
    }
    let mut weights = vec![Rational::zero(); sets.len()];
    for (j, &nb) in d.nonbasic.iter().enumerate() {
        if nb >= n {
            weights[nb - n] = -d.c[j].clone();
        }
    }
    let mut primal: BTreeMap<VertexSet, Rational> = BTreeMap::new();
    for (s, w) in sets.iter().zip(weights) {
        if !w.is_zero() {
            *primal.entry(s.clone()).or_insert_with(Rational::zero) += w;
        }
    }
    let result = LpResult {
        optimum: d.z,
        primal,
        dual,
    };
    check_lp_result(n, sets, &result)?;
    Ok(result)
}

/// Independent check of primal and dual feasibility and of equal
/// objectives.
pub fn check_lp_result(n: usize, sets: &[VertexSet], r: &LpResult) -> Result<()> {
    let fail = |m: String| Err(Error::CertificateCheck(m));
    if r.dual.len() != n {
        return fail(format!("dual has {} entries for {n} vertices", r.dual.len()));
    }
    if let Some((s, _)) = r.primal.iter().find(|(_, w)| w.is_negative()) {
        return fail(format!("negative weight on {:?}", s.members()));
    }
    for v in 0..n {
        let cov: Rational = r
            .primal
            .iter()
            .filter(|(s, _)| s.contains(v))
            .map(|(_, w)| w)
            .sum();
        if cov < Rational::one() {
            return fail(format!("vertex {v} covered {cov} < 1"));
        }
        if r.dual[v].is_negative() {
            return fail(format!("negative price at vertex {v}"));
        }
    }
    for s in sets {
        let load: Rational = s.iter().map(|v| &r.dual[v]).sum();
        if load > Rational::one() {
            return fail(format!("set {:?} priced {load} > 1", s.members()));
        }
    }
    let primal_total: Rational = r.primal.values().sum();
    let dual_total: Rational = r.dual.iter().sum();
    if primal_total != r.optimum || dual_total != r.optimum {
        return fail(format!(
            "objectives differ: primal {primal_total}, dual {dual_total}, optimum {}",
            r.optimum
        ));
    }
    Ok(())
}

pub fn fractional_cover_optimum(family: &SetFamily) -> Result<LpResult> {
    solve_cover(family.vertex_count, &family.sets)
}

fn property_optimum(g: &SignedGraph, property: Property) -> Result<LpResult> {
    let family = enumerate_sets(g, property, &EnumOptions::maximal())?;
    fractional_cover_optimum(&family).map_err(|e| match e {
        Error::Uncovered(v) => Error::Uncovered(
            v.parse::<usize>()
                .map(|i| g.name(i).to_string())
                .unwrap_or(v),
        ),
        other => other,
    })
}

/// Fractional balanced chromatic number, with its certificates. Maximal
/// sets suffice since enlarging a set never hurts coverage.
pub fn chi_fb_lp(g: &SignedGraph) -> Result<LpResult> {
    property_optimum(g, Property::Balanced)
}

pub fn chi_fb(g: &SignedGraph) -> Result<Rational> {
    chi_fb_lp(g).map(|r| r.optimum)
}

/// Fractional arboricity; edge signs are ignored.
pub fn a_f_lp(g: &SignedGraph) -> Result<LpResult> {
    property_optimum(g, Property::Acyclic)
}

pub fn a_f(g: &SignedGraph) -> Result<Rational> {
    a_f_lp(g).map(|r| r.optimum)
}

/// Scales the weights to integers: `q` is the lcm of their denominators.
pub fn lp_to_certificate(r: &LpResult, mode: Mode) -> Certificate {
    let q = r
        .primal
        .values()
        .fold(BigInt::one(), |acc, w| acc.lcm(w.denom()));
    let qr = Rational::from_integer(q.clone());
    let classes: Vec<Class> = r
        .primal
        .iter()
        .map(|(s, w)| Class {
            set: s.clone(),
            rep: (w * &qr).to_integer().to_u64().expect("repetition fits in u64"),
        })
        .collect();
    Certificate {
        p: classes.iter().map(|c| c.rep).sum(),
        q: q.to_u64().expect("q fits in u64"),
        mode,
        classes,
    }
}

#[derive(Clone, Debug)]
pub struct ColumnGenOptions {
    /// branch-and-bound nodes allowed per pricing call
    pub pricing_nodes: u64,
    pub time_budget: Option<Duration>,
    pub max_rounds: usize,
}

impl Default for ColumnGenOptions {
    fn default() -> Self {
        ColumnGenOptions {
            pricing_nodes: 50_000_000,
            time_budget: None,
            max_rounds: 100_000,
        }
    }
}

#[derive(Clone, Debug)]
pub struct ColumnGenResult {
    /// optimum of the last restricted master
    pub master: LpResult,
    pub columns: Vec<VertexSet>,
    /// `Σy / max_S y(S)` over the best pricing seen; equals `upper` on convergence
    pub lower: Rational,
    pub upper: Rational,
    pub converged: bool,
    pub rounds: usize,
}

struct Pricing<'a> {
    order: Vec<usize>,
    prices: &'a [Rational],
    suffix: Vec<Rational>,
    best: Rational,
    best_mask: u64,
    nodes: u64,
    node_limit: u64,
    deadline: Option<Instant>,
    exhausted: bool,
}

impl Pricing<'_> {
    fn run(&mut self, c: &mut Checker, depth: usize, value: &Rational) {
        self.nodes += 1;
        if self.nodes > self.node_limit || self.deadline.is_some_and(|d| Instant::now() > d) {
            self.exhausted = true;
            return;
        }
        if *value > self.best || (*value == self.best && c.members < self.best_mask) {
            self.best = value.clone();
            self.best_mask = c.members;
        }
        if depth == self.order.len() || value + &self.suffix[depth] <= self.best {
            return;
        }
        let v = self.order[depth];
        if c.push(v) {
            let next = value + &self.prices[v];
            self.run(c, depth + 1, &next);
            c.pop(v);
        }
        if !self.exhausted {
            self.run(c, depth + 1, value);
        }
    }
}

/// Heaviest set with the property under `prices`. Returns the weight, the
/// set, and whether the search finished.
pub fn price_column(
    g: &SignedGraph,
    property: Property,
    prices: &[Rational],
    node_limit: u64,
    deadline: Option<Instant>,
) -> (Rational, VertexSet, bool) {
    let mut order: Vec<usize> = (0..g.vertex_count()).filter(|&v| prices[v].is_positive()).collect();
    order.sort_by(|&a, &b| prices[b].cmp(&prices[a]).then(a.cmp(&b)));
    let mut suffix = vec![Rational::zero(); order.len() + 1];
    for i in (0..order.len()).rev() {
        suffix[i] = &suffix[i + 1] + &prices[order[i]];
    }
    let mut p = Pricing {
        order,
        prices,
        suffix,
        best: Rational::zero(),
        best_mask: 0,
        nodes: 0,
        node_limit,
        deadline,
        exhausted: false,
    };
    let mut c = Checker::new(g, property);
    p.run(&mut c, 0, &Rational::zero());
    let set = extend_to_maximal(g, property, VertexSet::from_mask(p.best_mask));
    (p.best, set, !p.exhausted)
}

fn extend_to_maximal(g: &SignedGraph, property: Property, s: VertexSet) -> VertexSet {
    let mut c = Checker::new(g, property);
    for v in s.iter() {
        assert!(c.push(v), "pricing returns a valid set");
    }
    for v in 0..g.vertex_count() {
        if c.members >> v & 1 == 0 {
            c.push(v);
        }
    }
    VertexSet::from_mask(c.members)
}

/// Restricted master over a growing column pool, priced by branch and
/// bound. Starts from a greedy cover by maximal sets.
pub fn column_generation(
    g: &SignedGraph,
    property: Property,
    opts: &ColumnGenOptions,
) -> Result<ColumnGenResult> {
    let n = g.vertex_count();
    if n > 63 {
        return Err(Error::GuardExceeded {
            size: n,
            guard: 63,
            hint: "pricing works on 64-bit vertex masks",
        });
    }
    let deadline = opts.time_budget.map(|d| Instant::now() + d);
    let mut columns: Vec<VertexSet> = Vec::new();
    for v in 0..n {
        if !columns.iter().any(|s| s.contains(v)) {
            columns.push(extend_to_maximal(g, property, VertexSet::from_indices([v])));
        }
    }
    let mut lower = Rational::zero();
    let mut rounds = 0;
    loop {
        rounds += 1;
        let master = solve_cover(n, &columns)?;
        let (weight, set, complete) =
            price_column(g, property, &master.dual, opts.pricing_nodes, deadline);
        if complete && weight.is_positive() {
            let bound = &master.optimum / &weight;
            if bound > lower {
                lower = bound;
            }
        }
        let improving = weight > Rational::one() && !columns.contains(&set);
        let out_of_time = deadline.is_some_and(|d| Instant::now() > d);
        if !improving || out_of_time || rounds >= opts.max_rounds {
            let converged = complete && weight <= Rational::one();
            if converged {
                lower = master.optimum.clone();
            }
            return Ok(ColumnGenResult {
                upper: master.optimum.clone(),
                master,
                columns,
                lower,
                converged,
                rounds,
            });
        }
        columns.push(set);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gadgets::{k3_minus, k4_minus};
    use crate::graph::Sign;

    fn cycle(n: usize) -> SignedGraph {
        let names: Vec<String> = (0..n).map(|i| format!("c{i}")).collect();
        let refs: Vec<&str> = names.iter().map(String::as_str).collect();
        let edges: Vec<(&str, &str, Sign)> =
            (0..n).map(|i| (refs[i], refs[(i + 1) % n], Sign::Pos)).collect();
        SignedGraph::from_edges(&refs, &edges).unwrap()
    }

    #[test]
    fn small_values() {
        assert_eq!(chi_fb(&k3_minus().graph).unwrap(), rational(3, 2));
        assert_eq!(chi_fb(&k4_minus().graph).unwrap(), rational(2, 1));
        assert_eq!(a_f(&cycle(4)).unwrap(), rational(4, 3));
        let path = SignedGraph::from_edges(
            &["a", "b", "c"],
            &[("a", "b", Sign::Neg), ("b", "c", Sign::Pos)],
        )
        .unwrap();
        assert_eq!(a_f(&path).unwrap(), rational(1, 1));
    }

    #[test]
    fn certificates_from_lp() {
        let r = chi_fb_lp(&k3_minus().graph).unwrap();
        let c = lp_to_certificate(&r, Mode::Balanced);
        assert_eq!((c.p, c.q), (3, 2));
        assert!(c.classes.iter().all(|k| k.rep == 1));
        let g = k4_minus().graph;
        let c = lp_to_certificate(&chi_fb_lp(&g).unwrap(), Mode::Balanced);
        assert_eq!(Rational::new(c.p.into(), c.q.into()), rational(2, 1));
        assert!(crate::certify::verify(&g, &c).ok);
    }

    #[test]
    fn uncovered_vertex() {
        let sets = vec![VertexSet::from_indices([0])];
        assert!(matches!(solve_cover(2, &sets), Err(Error::Uncovered(_))));
    }

    #[test]
    fn check_rejects_wrong_results() {
        let sets = vec![VertexSet::from_indices([0, 1]), VertexSet::from_indices([1, 2])];
        let mut r = solve_cover(3, &sets).unwrap();
        assert_eq!(r.optimum, rational(2, 1));
        r.dual[1] = rational(1, 1);
        assert!(check_lp_result(3, &sets, &r).is_err());
    }

    #[test]
    fn column_generation_agrees() {
        let opts = ColumnGenOptions::default();
        let r = column_generation(&k4_minus().graph, Property::Balanced, &opts).unwrap();
        assert!(r.converged);
        assert_eq!(r.upper, rational(2, 1));
        let r = column_generation(&cycle(4), Property::Acyclic, &opts).unwrap();
        assert_eq!((r.lower, r.upper), (rational(4, 3), rational(4, 3)));
    }

    #[test]
    fn rational_text() {
        assert_eq!(format_rational(&rational(83, 41)), "83/41");
        assert_eq!(format_rational(&rational(4, 2)), "2");
        assert_eq!(parse_rational("6/4"), Some(rational(3, 2)));
        assert_eq!(parse_rational("1/0"), None);
    }
}
