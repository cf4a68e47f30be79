//! Enumeration of balanced and acyclic vertex sets.
//!
//! Both properties are hereditary, so the search only ever extends sets
//! that still satisfy the property, and a set is maximal exactly when no
//! single allowed vertex can be added to it.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gadgets::GadgetGraph;
use crate::graph::{SignedGraph, VertexSet};

pub const MAXIMAL_SIZE_GUARD: usize = 24;
pub const FULL_SIZE_GUARD: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Property {
    /// no negative cycle
    Balanced,
    /// no cycle at all
    Acyclic,
}

impl Property {
    pub fn holds(self, g: &SignedGraph, s: &VertexSet) -> Result<bool> {
        match self {
            Property::Balanced => crate::balance::is_balanced(g, s),
            Property::Acyclic => crate::balance::is_acyclic(g, s),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SetFamily {
    pub property: Property,
    pub maximal_only: bool,
    pub vertex_count: usize,
    pub sets: Vec<VertexSet>,
}

impl SetFamily {
    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }
}

#[derive(Clone, Debug, Default)]
pub struct EnumOptions {
    pub maximal_only: bool,
    pub must_contain: VertexSet,
    pub forbid: VertexSet,
    /// Sets containing any of these as a subset are rejected (the property
    /// stays hereditary).
    pub avoid: Vec<VertexSet>,
    /// Overrides [`MAXIMAL_SIZE_GUARD`] / [`FULL_SIZE_GUARD`].
    pub size_guard: Option<usize>,
    pub parallel: bool,
}

impl EnumOptions {
    pub fn maximal() -> Self {
        EnumOptions {
            maximal_only: true,
            ..Default::default()
        }
    }

    pub fn containing(mut self, s: VertexSet) -> Self {
        self.must_contain = s;
        self
    }
}

/// Incremental property checker: a union-find with parities and rollback
/// (union by size, no path compression).
#[derive(Clone)]
pub(crate) struct Checker {
    property: Property,
    adj: Vec<Vec<(usize, u8)>>,
    parent: Vec<usize>,
    parity: Vec<u8>,
    size: Vec<usize>,
    merges: Vec<usize>,
    frames: Vec<usize>,
    pub(crate) members: u64,
}

impl Checker {
    pub(crate) fn new(g: &SignedGraph, property: Property) -> Self {
        let n = g.vertex_count();
        Checker {
            property,
            adj: (0..n)
                .map(|v| g.neighbors(v).iter().map(|&(b, s)| (b, s.parity())).collect())
                .collect(),
            parent: (0..n).collect(),
            parity: vec![0; n],
            size: vec![1; n],
            merges: Vec::new(),
            frames: Vec::new(),
            members: 0,
        }
    }

    fn find(&self, mut x: usize) -> (usize, u8) {
        let mut p = 0;
        while self.parent[x] != x {
            p ^= self.parity[x];
            x = self.parent[x];
        }
        (x, p)
    }

    fn undo_to(&mut self, mark: usize) {
        while self.merges.len() > mark {
            let child = self.merges.pop().expect("non-empty");
            let root = self.parent[child];
            self.size[root] -= self.size[child];
            self.parent[child] = child;
            self.parity[child] = 0;
        }
    }

    /// Adds `v` if the property survives; otherwise leaves the state untouched.
    pub(crate) fn push(&mut self, v: usize) -> bool {
        let mark = self.merges.len();
        for i in 0..self.adj[v].len() {
            let (b, edge) = self.adj[v][i];
            if self.members >> b & 1 == 0 {
                continue;
            }
            let (ra, pa) = self.find(v);
            let (rb, pb) = self.find(b);
            if ra == rb {
                let conflict = match self.property {
                    Property::Acyclic => true,
                    Property::Balanced => pa ^ pb != edge,
                };
                if conflict {
                    self.undo_to(mark);
                    return false;
                }
                continue;
            }
            let (big, small) = if self.size[ra] >= self.size[rb] {
                (ra, rb)
            } else {
                (rb, ra)
            };
            self.parent[small] = big;
            self.parity[small] = pa ^ pb ^ edge;
            self.size[big] += self.size[small];
            self.merges.push(small);
        }
        self.members |= 1 << v;
        self.frames.push(mark);
        true
    }

    pub(crate) fn pop(&mut self, v: usize) {
        let mark = self.frames.pop().expect("push/pop balanced");
        self.undo_to(mark);
        self.members &= !(1 << v);
    }

    fn can_add(&mut self, v: usize) -> bool {
        if self.push(v) {
            self.pop(v);
            true
        } else {
            false
        }
    }
}

struct Search<'a> {
    n: usize,
    opts: &'a EnumOptions,
    allowed: u64,
    must: u64,
    avoid: Vec<u64>,
    out: Vec<u64>,
}

impl Search<'_> {
    fn avoids(&self, members: u64) -> bool {
        self.avoid.iter().all(|&a| members & a != a)
    }

    fn is_maximal(&self, c: &mut Checker) -> bool {
        let free = self.allowed & !c.members;
        (0..self.n)
            .filter(|&w| free >> w & 1 == 1)
            .all(|w| !(self.avoids(c.members | 1 << w) && c.can_add(w)))
    }

    fn run(&mut self, c: &mut Checker, depth: usize) {
        if depth == self.n {
            if c.members != 0 && (!self.opts.maximal_only || self.is_maximal(c)) {
                self.out.push(c.members);
            }
            return;
        }
        let bit = 1u64 << depth;
        if self.allowed & bit != 0 && self.avoids(c.members | bit) && c.push(depth) {
            self.run(c, depth + 1);
            c.pop(depth);
        }
        if self.must & bit == 0 {
            self.run(c, depth + 1);
        }
    }
}

/// Enumerates vertex sets of `g` with the given property.
///
/// With `maximal_only`, a set is reported when no vertex outside `forbid`
/// can be added to it. Output is sorted canonically (lexicographic on
/// member indices) and identical with or without `parallel`.
pub fn enumerate_sets(g: &SignedGraph, property: Property, opts: &EnumOptions) -> Result<SetFamily> {
    let n = g.vertex_count();
    let guard = opts.size_guard.unwrap_or(if opts.maximal_only {
        MAXIMAL_SIZE_GUARD
    } else {
        FULL_SIZE_GUARD
    });
    if n > guard.min(63) {
        return Err(Error::GuardExceeded {
            size: n,
            guard: guard.min(63),
            hint: "use column generation for larger hosts",
        });
    }
    g.validate_set(&opts.must_contain)?;
    g.validate_set(&opts.forbid)?;
    let full = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let allowed = full & !opts.forbid.mask();
    let must = opts.must_contain.mask();

    for a in &opts.avoid {
        g.validate_set(a)?;
    }
    let search = || Search {
        n,
        opts,
        allowed,
        must,
        avoid: opts.avoid.iter().map(VertexSet::mask).collect(),
        out: Vec::new(),
    };

    let root = Checker::new(g, property);
    let mut masks = if must & !allowed != 0 {
        Vec::new()
    } else if opts.parallel && n > 8 {
        let split = 6.min(n);
        let proto = search();
        let prefixes: Vec<Checker> = prefix_states(&proto, root, split);
        let mut parts: Vec<Vec<u64>> = prefixes
            .into_par_iter()
            .map(|mut c| {
                let mut s = search();
                s.run(&mut c, split);
                s.out
            })
            .collect();
        parts.iter_mut().flat_map(std::mem::take).collect()
    } else {
        let mut s = search();
        let mut c = root;
        s.run(&mut c, 0);
        s.out
    };
    let mut sets: Vec<VertexSet> = masks.drain(..).map(VertexSet::from_mask).collect();
    sets.sort();
    Ok(SetFamily {
        property,
        maximal_only: opts.maximal_only,
        vertex_count: n,
        sets,
    })
}

fn prefix_states(s: &Search<'_>, root: Checker, split: usize) -> Vec<Checker> {
    let mut level = vec![root];
    for v in 0..split {
        let bit = 1u64 << v;
        let mut next = Vec::with_capacity(level.len() * 2);
        for c in level {
            if s.allowed & bit != 0 && s.avoids(c.members | bit) {
                let mut inc = c.clone();
                if inc.push(v) {
                    next.push(inc);
                }
            }
            if s.must & bit == 0 {
                next.push(c);
            }
        }
        level = next;
    }
    level
}

/// Indices `i` with `s ∩ marked[i] = ∅`.
pub fn triangles_missed(s: &VertexSet, marked: &[VertexSet]) -> Vec<usize> {
    marked
        .iter()
        .enumerate()
        .filter(|(_, t)| t.is_disjoint(s))
        .map(|(i, _)| i)
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MissingTriangleCheck {
    pub holds: bool,
    /// A balanced set containing both terminals and meeting every marked triangle.
    pub counterexample: Option<VertexSet>,
    pub examined: usize,
}

/// Checks that every balanced set containing both terminals `u` and `v`
/// misses at least one marked triangle. Maximal sets suffice: missing a
/// triangle is inherited by subsets.
pub fn check_missing_triangle_lemma(g: &GadgetGraph) -> Result<MissingTriangleCheck> {
    let uv = VertexSet::from_indices([g.terminal("u")?, g.terminal("v")?]);
    let fam = enumerate_sets(
        &g.graph,
        Property::Balanced,
        &EnumOptions::maximal().containing(uv),
    )?;
    let counterexample = fam
        .sets
        .iter()
        .find(|s| triangles_missed(s, &g.marked).is_empty())
        .cloned();
    Ok(MissingTriangleCheck {
        holds: counterexample.is_none(),
        counterexample,
        examined: fam.len(),
    })
}

/// The balanced sets through both terminals `u, v` that a case analysis on
/// the triangle property has to consider: first the maximal balanced sets
/// that contain one of the `positive` triangles, then the sets that are
/// maximal among balanced sets containing none of them.
///
/// The second group can hold sets that are not maximal in the plain sense
/// (a subset of a set from the first group).
pub fn terminal_case_family(g: &GadgetGraph, positive: &[VertexSet]) -> Result<Vec<VertexSet>> {
    let uv = VertexSet::from_indices([g.terminal("u")?, g.terminal("v")?]);
    let plain = enumerate_sets(
        &g.graph,
        Property::Balanced,
        &EnumOptions::maximal().containing(uv.clone()),
    )?;
    let mut out: Vec<VertexSet> = plain
        .sets
        .into_iter()
        .filter(|s| positive.iter().any(|t| t.is_subset(s)))
        .collect();
    let avoiding = enumerate_sets(
        &g.graph,
        Property::Balanced,
        &EnumOptions {
            avoid: positive.to_vec(),
            ..EnumOptions::maximal().containing(uv)
        },
    )?;
    out.extend(avoiding.sets);
    Ok(out)
}

/// Looks for a balanced set containing both terminals that meets every
/// marked (negative) triangle and contains none of `positive`. Such a set
/// is exactly a color class that would let `u` and `v` share a color in a
/// coloring where all these triangles have the triangle property.
pub fn find_shared_terminal_class(
    g: &GadgetGraph,
    positive: &[VertexSet],
) -> Result<Option<VertexSet>> {
    let uv = VertexSet::from_indices([g.terminal("u")?, g.terminal("v")?]);
    let fam = enumerate_sets(
        &g.graph,
        Property::Balanced,
        &EnumOptions {
            must_contain: uv,
            ..Default::default()
        },
    )?;
    Ok(fam
        .sets
        .into_iter()
        .find(|s| triangles_missed(s, &g.marked).is_empty() && !positive.iter().any(|t| t.is_subset(s))))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ForestReport {
    pub max_acyclic_order: usize,
    pub max_acyclic_order_with_uv: usize,
    /// Every acyclic set of maximum order containing `u` has ≥ 2 of `z, t, x1`.
    pub max_sets_with_u_hit_two_of_z_t_x1: bool,
    pub max_sets_with_u: usize,
}

/// Brute force over all subsets of the underlying gadget graph.
pub fn check_forest_lemmas(g: &SignedGraph) -> Result<ForestReport> {
    let n = g.vertex_count();
    if n > 20 {
        return Err(Error::GuardExceeded {
            size: n,
            guard: 20,
            hint: "brute force over all subsets",
        });
    }
    let id = |name: &str| g.id(name).map(|v| 1u64 << v);
    let (u, v) = (id("u")?, id("v")?);
    let special = [id("z")?, id("t")?, id("x1")?];
    let edges: Vec<(usize, usize)> = g.edges().map(|(a, b, _)| (a, b)).collect();

    let acyclic = |mask: u64| {
        let mut uf = crate::balance::ParityUnionFind::new(n);
        edges
            .iter()
            .filter(|&&(a, b)| mask >> a & 1 == 1 && mask >> b & 1 == 1)
            .all(|&(a, b)| uf.find(a).0 != uf.find(b).0 && uf.union(a, b, 0))
    };
    let forests: Vec<u64> = (0..1u64 << n).filter(|&m| acyclic(m)).collect();
    let order = |m: &u64| m.count_ones() as usize;
    let max_acyclic_order = forests.iter().map(order).max().unwrap_or(0);
    let max_acyclic_order_with_uv = forests
        .iter()
        .filter(|&&m| m & (u | v) == u | v)
        .map(order)
        .max()
        .unwrap_or(0);
    let with_u: Vec<u64> = forests
        .iter()
        .copied()
        .filter(|m| m & u != 0 && order(m) == max_acyclic_order)
        .collect();
    let ok = with_u
        .iter()
        .all(|m| special.iter().filter(|&&s| m & s != 0).count() >= 2);
    Ok(ForestReport {
        max_acyclic_order,
        max_acyclic_order_with_uv,
        max_sets_with_u_hit_two_of_z_t_x1: ok,
        max_sets_with_u: with_u.len(),
    })
}
