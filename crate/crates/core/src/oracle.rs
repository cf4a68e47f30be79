//! Slow reference implementations used to cross-check the fast paths on
//! small graphs. Nothing here shares code with the union-find checks.

use rand::Rng;

use crate::graph::{Sign, SignedGraph, VertexSet};

/// Every simple cycle of the subgraph induced by `s`, each listed once,
/// as a vertex sequence starting at its smallest vertex.
pub fn simple_cycles(g: &SignedGraph, s: &VertexSet) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for start in s.iter() {
        let mut path = vec![start];
        extend(g, s, start, &mut path, &mut out);
    }
    out
}

fn extend(g: &SignedGraph, s: &VertexSet, start: usize, path: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    let last = *path.last().expect("non-empty path");
    for &(next, _) in g.neighbors(last) {
        if !s.contains(next) || next < start {
            continue;
        }
        if next == start {
            // each cycle is found in both directions; keep one
            if path.len() >= 3 && path[1] < path[path.len() - 1] {
                out.push(path.clone());
            }
        } else if !path.contains(&next) {
            path.push(next);
            extend(g, s, start, path, out);
            path.pop();
        }
    }
}

pub fn cycle_sign(g: &SignedGraph, cycle: &[usize]) -> Sign {
    let n = cycle.len();
    Sign::product((0..n).map(|i| g.sign(cycle[i], cycle[(i + 1) % n]).expect("cycle edge")))
}

pub fn brute_balanced(g: &SignedGraph, s: &VertexSet) -> bool {
    simple_cycles(g, s).iter().all(|c| cycle_sign(g, c) == Sign::Pos)
}

pub fn brute_acyclic(g: &SignedGraph, s: &VertexSet) -> bool {
    simple_cycles(g, s).is_empty()
}

/// Maximal sets with `holds`, by filtering the whole power set.
pub fn brute_maximal(g: &SignedGraph, holds: impl Fn(&VertexSet) -> bool) -> Vec<VertexSet> {
    let n = g.vertex_count();
    assert!(n <= 16, "power set oracle is for small graphs");
    let good: Vec<u64> = (1..1u64 << n)
        .filter(|&m| holds(&VertexSet::from_mask(m)))
        .collect();
    let mut out: Vec<VertexSet> = good
        .iter()
        .filter(|&&m| !good.iter().any(|&o| o != m && o & m == m))
        .map(|&m| VertexSet::from_mask(m))
        .collect();
    out.sort();
    out
}

/// `n` vertices `g0..`, each pair an edge with probability `density`, signs
/// uniform.
pub fn random_graph<R: Rng>(rng: &mut R, n: usize, density: f64) -> SignedGraph {
    let mut g = SignedGraph::new();
    for i in 0..n {
        g.add_vertex(&format!("g{i}")).expect("fresh name");
    }
    for a in 0..n {
        for b in a + 1..n {
            if rng.gen_bool(density) {
                let sign = if rng.gen_bool(0.5) { Sign::Pos } else { Sign::Neg };
                g.add_edge(a, b, sign).expect("fresh edge");
            }
        }
    }
    g
}

/// A uniformly random labelled tree on `n ≥ 1` vertices (random parent
/// attachment).
pub fn random_tree<R: Rng>(rng: &mut R, n: usize) -> SignedGraph {
    let mut g = SignedGraph::new();
    for i in 0..n {
        g.add_vertex(&format!("t{i}")).expect("fresh name");
        if i > 0 {
            let parent = rng.gen_range(0..i);
            g.add_edge(parent, i, Sign::Neg).expect("fresh edge");
        }
    }
    g
}
