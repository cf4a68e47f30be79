//! Balance and acyclicity of induced subgraphs, switching, triangles.

use std::collections::VecDeque;

use crate::error::Result;
use crate::graph::{Sign, SignedGraph, VertexSet};

/// Union-find where every element carries the parity of its path to the
/// root. Uniting `a` and `b` with parity `p` asserts `par(a) ^ par(b) == p`.
#[derive(Clone, Debug)]
pub struct ParityUnionFind {
    parent: Vec<usize>,
    parity: Vec<u8>,
    size: Vec<usize>,
}

impl ParityUnionFind {
    pub fn new(n: usize) -> Self {
        ParityUnionFind {
            parent: (0..n).collect(),
            parity: vec![0; n],
            size: vec![1; n],
        }
    }

    /// Root of `x` and the parity of `x` relative to it.
    pub fn find(&mut self, x: usize) -> (usize, u8) {
        let p = self.parent[x];
        if p == x {
            return (x, 0);
        }
        let (root, pp) = self.find(p);
        self.parent[x] = root;
        self.parity[x] ^= pp;
        (root, self.parity[x])
    }

    /// Returns `false` if the constraint contradicts earlier ones.
    pub fn union(&mut self, a: usize, b: usize, parity: u8) -> bool {
        let (ra, pa) = self.find(a);
        let (rb, pb) = self.find(b);
        if ra == rb {
            return pa ^ pb == parity;
        }
        let (big, small) = if self.size[ra] >= self.size[rb] {
            (ra, rb)
        } else {
            (rb, ra)
        };
        self.parent[small] = big;
        self.parity[small] = pa ^ pb ^ parity;
        self.size[big] += self.size[small];
        true
    }
}

/// A negative cycle inside some vertex set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CycleWitness {
    pub vertices: Vec<usize>,
    pub sign: Sign,
}

impl CycleWitness {
    /// Recomputes the sign product along the cycle; `None` if a
    /// consecutive pair is not an edge of `g`.
    pub fn recompute_sign(&self, g: &SignedGraph) -> Option<Sign> {
        let n = self.vertices.len();
        (0..n)
            .map(|i| g.sign(self.vertices[i], self.vertices[(i + 1) % n]))
            .try_fold(Sign::Pos, |acc, s| s.map(|s| acc * s))
    }
}

fn induced_edges<'a>(
    g: &'a SignedGraph,
    s: &'a VertexSet,
) -> impl Iterator<Item = (usize, usize, Sign)> + 'a {
    s.iter().flat_map(move |a| {
        g.neighbors(a)
            .iter()
            .filter(move |&&(b, _)| a < b && s.contains(b))
            .map(move |&(b, sign)| (a, b, sign))
    })
}

/// True iff the subgraph induced by `s` has no negative cycle.
pub fn is_balanced(g: &SignedGraph, s: &VertexSet) -> Result<bool> {
    g.validate_set(s)?;
    let mut uf = ParityUnionFind::new(g.vertex_count());
    Ok(induced_edges(g, s).all(|(a, b, sign)| uf.union(a, b, sign.parity())))
}

/// True iff the subgraph induced by `s` is a forest. Signs are ignored.
pub fn is_acyclic(g: &SignedGraph, s: &VertexSet) -> Result<bool> {
    g.validate_set(s)?;
    let mut uf = ParityUnionFind::new(g.vertex_count());
    Ok(induced_edges(g, s).all(|(a, b, _)| {
        let (ra, _) = uf.find(a);
        let (rb, _) = uf.find(b);
        ra != rb && uf.union(a, b, 0)
    }))
}

/// A negative cycle in the subgraph induced by `s`, or `None` when `s` is balanced.
///
/// Builds a BFS forest labelled with root-path parities; any non-tree edge
/// whose sign disagrees with the labels closes a negative fundamental cycle.
pub fn negative_cycle_witness(g: &SignedGraph, s: &VertexSet) -> Result<Option<CycleWitness>> {
    g.validate_set(s)?;
    let n = g.vertex_count();
    let mut parent: Vec<Option<usize>> = vec![None; n];
    let mut depth = vec![usize::MAX; n];
    let mut parity = vec![0u8; n];

    for root in s.iter() {
        if depth[root] != usize::MAX {
            continue;
        }
        depth[root] = 0;
        let mut queue = VecDeque::from([root]);
        while let Some(a) = queue.pop_front() {
            for &(b, sign) in g.neighbors(a) {
                if !s.contains(b) {
                    continue;
                }
                if depth[b] == usize::MAX {
                    depth[b] = depth[a] + 1;
                    parent[b] = Some(a);
                    parity[b] = parity[a] ^ sign.parity();
                    queue.push_back(b);
                } else if parity[a] ^ parity[b] != sign.parity() {
                    return Ok(Some(fundamental_cycle(a, b, &parent, &depth)));
                }
            }
        }
    }
    Ok(None)
}

/// Any cycle in the subgraph induced by `s`, or `None` when it is a forest.
pub fn cycle_witness(g: &SignedGraph, s: &VertexSet) -> Result<Option<CycleWitness>> {
    g.validate_set(s)?;
    let n = g.vertex_count();
    let mut parent: Vec<Option<usize>> = vec![None; n];
    let mut depth = vec![usize::MAX; n];

    for root in s.iter() {
        if depth[root] != usize::MAX {
            continue;
        }
        depth[root] = 0;
        let mut queue = VecDeque::from([root]);
        while let Some(a) = queue.pop_front() {
            for &(b, _) in g.neighbors(a) {
                if !s.contains(b) || parent[a] == Some(b) {
                    continue;
                }
                if depth[b] == usize::MAX {
                    depth[b] = depth[a] + 1;
                    parent[b] = Some(a);
                    queue.push_back(b);
                } else {
                    let mut w = fundamental_cycle(a, b, &parent, &depth);
                    w.sign = w.recompute_sign(g).expect("cycle follows edges");
                    return Ok(Some(w));
                }
            }
        }
    }
    Ok(None)
}

fn fundamental_cycle(
    a: usize,
    b: usize,
    parent: &[Option<usize>],
    depth: &[usize],
) -> CycleWitness {
    let (mut x, mut y) = (a, b);
    let mut left = vec![x];
    let mut right = vec![y];
    while depth[x] > depth[y] {
        x = parent[x].expect("non-root has a parent");
        left.push(x);
    }
    while depth[y] > depth[x] {
        y = parent[y].expect("non-root has a parent");
        right.push(y);
    }
    while x != y {
        x = parent[x].expect("non-root has a parent");
        y = parent[y].expect("non-root has a parent");
        left.push(x);
        right.push(y);
    }
    // left ends with the common ancestor; right ends with it too.
    right.pop();
    right.reverse();
    left.extend(right);
    CycleWitness {
        vertices: left,
        sign: Sign::Neg,
    }
}

/// Negates every edge with exactly one endpoint in `x`.
pub fn switch(g: &SignedGraph, x: &VertexSet) -> Result<SignedGraph> {
    g.validate_set(x)?;
    let mut out = g.clone();
    for (a, b, s) in g.edges() {
        if x.contains(a) != x.contains(b) {
            out.set_sign(a, b, s.flip());
        }
    }
    Ok(out)
}

/// Every 3-clique with the product of its edge signs, in canonical order.
pub fn all_triangles(g: &SignedGraph) -> Vec<(VertexSet, Sign)> {
    let mut out = Vec::new();
    for (a, b, sab) in g.edges() {
        let mut common: Vec<(usize, Sign)> = g
            .neighbors(a)
            .iter()
            .filter(|&&(c, _)| c > b)
            .filter_map(|&(c, sac)| g.sign(b, c).map(|sbc| (c, sab * sac * sbc)))
            .collect();
        common.sort_unstable();
        out.extend(
            common
                .into_iter()
                .map(|(c, sign)| (VertexSet::from_indices([a, b, c]), sign)),
        );
    }
    out.sort();
    out
}

/// Sign of the triangle on `t`, or `None` if `t` is not a 3-clique.
pub fn triangle_sign(g: &SignedGraph, t: &VertexSet) -> Option<Sign> {
    match t.members() {
        &[a, b, c] => Some(g.sign(a, b)? * g.sign(a, c)? * g.sign(b, c)?),
        _ => None,
    }
}

/// Underlying graph is K4 and all four triangles are negative. On K4 the
/// triangle signs determine the switching class.
pub fn is_k4_minus_equivalent(g: &SignedGraph) -> bool {
    if g.vertex_count() != 4 || g.edge_count() != 6 {
        return false;
    }
    let triangles = all_triangles(g);
    triangles.len() == 4 && triangles.iter().all(|(_, s)| s.is_negative())
}
