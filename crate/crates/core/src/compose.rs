//! Inductive construction of balanced (83, 41)-colorings for graphs built
//! from (K3,−) by apex insertion and edge substitution.
//!
//! The running coloring is kept as 83 explicit color slots (a bitmask of
//! colors per vertex). Every step keeps two invariants: each vertex sees 41
//! colors and the endpoints of each edge share 13 or 14 colors.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::balance::all_triangles;
use crate::certify::{Certificate, Class, Fixture, Mode};
use crate::error::{Error, Result};
use crate::gadgets::{apply_step, trace_base, w_prime, BuildTrace, GadgetGraph, TraceBase, TraceStep};
use crate::graph::{Sign, SignedGraph, VertexSet};

pub const P: u64 = 83;
pub const Q: u64 = 41;

type Colors = u128;

fn count(c: Colors) -> u64 {
    c.count_ones() as u64
}

/// The lowest `k` colors of `pool`.
fn take(pool: Colors, k: u64) -> Result<Colors> {
    let mut out = 0;
    let mut rest = pool;
    for _ in 0..k {
        if rest == 0 {
            return Err(Error::Compose(format!("needed {k} colors, pool has {}", count(pool))));
        }
        let bit = rest & rest.wrapping_neg();
        out |= bit;
        rest &= !bit;
    }
    Ok(out)
}

const ALL: Colors = (1 << P) - 1;

/// Starting coloring of the base triangle, named by its three pair overlaps.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum BaseProfile {
    #[default]
    Overlaps141414,
    Overlaps141413,
    Overlaps141313,
}

impl BaseProfile {
    pub const ALL: [BaseProfile; 3] = [
        BaseProfile::Overlaps141414,
        BaseProfile::Overlaps141413,
        BaseProfile::Overlaps141313,
    ];

    /// `(a12, a13, a23)`
    pub fn overlaps(self) -> [u64; 3] {
        match self {
            BaseProfile::Overlaps141414 => [14, 14, 14],
            BaseProfile::Overlaps141413 => [14, 14, 13],
            BaseProfile::Overlaps141313 => [14, 13, 13],
        }
    }
}

/// Colors of the three vertices of (K3,−): pair blocks first, then the
/// private colors of each vertex; whatever is left is unused.
fn base_colors(profile: BaseProfile) -> Result<[Colors; 3]> {
    let [a12, a13, a23] = profile.overlaps();
    let mut free = ALL;
    let mut grab = |k| -> Result<Colors> {
        let c = take(free, k)?;
        free &= !c;
        Ok(c)
    };
    let (b12, b13, b23) = (grab(a12)?, grab(a13)?, grab(a23)?);
    let s1 = grab(Q - a12 - a13)?;
    let s2 = grab(Q - a12 - a23)?;
    let s3 = grab(Q - a13 - a23)?;
    Ok([b12 | b13 | s1, b12 | b23 | s2, b13 | b23 | s3])
}

/// Apex colors for a new vertex joined to the negative triangle `t`: it
/// takes `a_i` of the colors private to `t_i` (so each color class meets
/// the new vertex through at most one edge) and `b` colors missing `t`.
fn apex_colors(t: [Colors; 3]) -> Result<Colors> {
    let on_all = t[0] & t[1] & t[2];
    if on_all != 0 {
        return Err(Error::Compose("a color covers a negative triangle".into()));
    }
    let private: Vec<Colors> = (0..3)
        .map(|i| t[i] & !t[(i + 1) % 3] & !t[(i + 2) % 3])
        .collect();
    let none = ALL & !(t[0] | t[1] | t[2]);
    for a0 in [13, 14] {
        for a1 in [13, 14] {
            for a2 in [13, 14] {
                let a = [a0, a1, a2];
                let sum: u64 = a.iter().sum();
                if sum > Q || Q - sum > count(none) {
                    continue;
                }
                if (0..3).any(|i| a[i] > count(private[i])) {
                    continue;
                }
                let mut out = take(none, Q - sum)?;
                for i in 0..3 {
                    out |= take(private[i], a[i])?;
                }
                return Ok(out);
            }
        }
    }
    Err(Error::Compose(format!(
        "no apex profile: pair overlaps ({}, {}, {}), private ({}, {}, {}), unused {}",
        count(t[0] & t[1]),
        count(t[0] & t[2]),
        count(t[1] & t[2]),
        count(private[0]),
        count(private[1]),
        count(private[2]),
        count(none)
    )))
}

/// Extends color slots on a positive triangle `face` to the mini-gadget's
/// inner vertices `inner` (with `face[i]` not adjacent to `inner[i]`).
///
/// The slots restricted to the face must be rotation symmetric: `t` colors
/// on all three vertices, `c` on each consecutive pair `{u_i, u_{i+1}}`,
/// `s` private to each `u_i`. Pair colors get `u_i'`; of the private
/// colors, `x` get `{u_i', u_{i+1}'}`, `y` get `{u_{i+1}', u_{i+2}'}` and
/// the last `z` get `{u_{i+2}'}`. The counts are chosen so every inner
/// vertex sees 41 colors and the edges at the inner vertices share 14
/// colors; for `(t, c, s) = (2, 12, 15)` this gives `(13, 1, 1)`.
pub fn mini_gadget_extension(slots: &mut [VertexSet], face: [usize; 3], inner: [usize; 3]) -> Result<()> {
    let pattern = |slot: &VertexSet| -> [bool; 3] { face.map(|f| slot.contains(f)) };
    let mut tally = [0i64; 7];
    for slot in slots.iter() {
        match pattern(slot) {
            [true, true, true] => tally[0] += 1,
            [false, false, false] => {}
            on if on.iter().filter(|&&x| x).count() == 2 => {
                let i = (0..3).find(|&i| on[i] && on[(i + 1) % 3]).expect("two of three");
                tally[1 + i] += 1;
            }
            on => tally[4 + on.iter().position(|&x| x).expect("one of three")] += 1,
        }
    }
    let (t, c, s) = (tally[0], tally[1], tally[4]);
    let (xy, z) = (t + c, s - t - c);
    let y = 14 - c - z;
    let x = xy - y;
    let symmetric = tally[1..4].iter().all(|&k| k == c) && tally[4..].iter().all(|&k| k == s);
    if !symmetric || t + 2 * c + s != Q as i64 || [x, y, z].iter().any(|&k| k < 0) {
        return Err(Error::Compose(format!(
            "no mini-gadget extension for positive face profile {tally:?}"
        )));
    }

    let mut singles_seen = [0i64; 3];
    for slot in slots.iter_mut() {
        let on = pattern(slot);
        let add: Vec<usize> = match on.iter().filter(|&&b| b).count() {
            2 => {
                let i = (0..3).find(|&i| on[i] && on[(i + 1) % 3]).expect("two of three");
                vec![inner[i]]
            }
            1 => {
                let i = on.iter().position(|&b| b).expect("one of three");
                let k = singles_seen[i];
                singles_seen[i] += 1;
                if k < x {
                    vec![inner[i], inner[(i + 1) % 3]]
                } else if k < x + y {
                    vec![inner[(i + 1) % 3], inner[(i + 2) % 3]]
                } else {
                    vec![inner[(i + 2) % 3]]
                }
            }
            _ => vec![],
        };
        for v in add {
            *slot = slot.with(v);
        }
    }
    Ok(())
}

fn expand(c: &Certificate) -> Vec<VertexSet> {
    c.classes
        .iter()
        .flat_map(|k| std::iter::repeat_n(k.set.clone(), k.rep as usize))
        .collect()
}

/// 83 color slots on the vertices of [`w_prime`] whose terminals share
/// `overlap` colors.
pub fn w_prime_template(overlap: u64) -> Result<(GadgetGraph, Vec<VertexSet>)> {
    let fixture = match overlap {
        13 => Fixture::Table2,
        14 => Fixture::Table3,
        other => return Err(Error::Compose(format!("no template for overlap {other}"))),
    };
    let cert = fixture.load()?;
    let wp = w_prime();
    let mut slots = expand(&cert);
    if slots.len() as u64 != P {
        return Err(Error::Compose(format!("template has {} slots", slots.len())));
    }
    // vertices of the base gadget keep their ids inside w_prime
    let id = |n: &str| wp.graph.id(n).expect("static names");
    mini_gadget_extension(&mut slots, [id("u"), id("x2"), id("x1")], [id("a1"), id("a3"), id("a2")])?;
    mini_gadget_extension(&mut slots, [id("v"), id("x4"), id("x3")], [id("b1"), id("b3"), id("b2")])?;
    Ok((wp, slots))
}

struct Composer {
    g: GadgetGraph,
    colors: Vec<Colors>,
    templates: [(GadgetGraph, Vec<VertexSet>); 2],
    wp: GadgetGraph,
}

impl Composer {
    fn new(base: TraceBase, profile: BaseProfile) -> Result<Self> {
        let k3 = trace_base(TraceBase::K3Minus);
        let mut c = Composer {
            g: k3,
            colors: base_colors(profile)?.to_vec(),
            templates: [w_prime_template(13)?, w_prime_template(14)?],
            wp: w_prime(),
        };
        if base == TraceBase::K4Minus {
            // (K4,−) is the base triangle plus an apex named `d`
            let k4 = trace_base(TraceBase::K4Minus);
            let t = [0, 1, 2].map(|v| c.colors[v]);
            c.colors.push(apex_colors(t)?);
            if k4.graph.names()[..3] != c.g.graph.names()[..] {
                return Err(Error::Compose("base vertex order changed".into()));
            }
            c.g = k4;
        }
        Ok(c)
    }

    fn step(&mut self, step: &TraceStep, index: usize) -> Result<()> {
        let next = apply_step(&self.g, step, index, &self.wp)?;
        match step {
            TraceStep::InnerK4 { face } => {
                let names: Vec<&str> = face.iter().map(String::as_str).collect();
                let t = self.g.graph.set(&names)?;
                let m = t.members();
                self.colors.push(apex_colors([m[0], m[1], m[2]].map(|v| self.colors[v]))?);
            }
            TraceStep::SubstituteWPrime { edge } => {
                let x = self.g.graph.id(&edge[0])?;
                let y = self.g.graph.id(&edge[1])?;
                let (cx, cy) = (self.colors[x], self.colors[y]);
                let overlap = count(cx & cy);
                let (wp, slots) = match overlap {
                    13 => &self.templates[0],
                    14 => &self.templates[1],
                    a => {
                        return Err(Error::Compose(format!(
                            "edge {}-{} has overlap {a}",
                            edge[0], edge[1]
                        )))
                    }
                };
                let (tu, tv) = (wp.terminal("u")?, wp.terminal("v")?);
                // host colors and template slots grouped by terminal membership
                let host_groups = [cx & cy, cx & !cy, cy & !cx, ALL & !(cx | cy)];
                let mut slot_groups: [Vec<&VertexSet>; 4] = Default::default();
                for s in slots {
                    let k = match (s.contains(tu), s.contains(tv)) {
                        (true, true) => 0,
                        (true, false) => 1,
                        (false, true) => 2,
                        (false, false) => 3,
                    };
                    slot_groups[k].push(s);
                }
                let n_old = self.g.graph.vertex_count();
                let n_new = next.graph.vertex_count();
                self.colors.resize(n_new, 0);
                // new vertices of the copy, in template vertex order
                let mut fresh = n_old..n_new;
                let map: Vec<Option<usize>> = (0..wp.graph.vertex_count())
                    .map(|v| (v != tu && v != tv).then(|| fresh.next().expect("copy vertex")))
                    .collect();
                for (group, slots) in host_groups.iter().zip(&slot_groups) {
                    if count(*group) != slots.len() as u64 {
                        return Err(Error::Compose(format!(
                            "template group of size {} against {} host colors",
                            slots.len(),
                            count(*group)
                        )));
                    }
                    let mut rest = *group;
                    for s in slots {
                        let bit = rest & rest.wrapping_neg();
                        rest &= !bit;
                        for v in s.iter() {
                            if let Some(h) = map[v] {
                                self.colors[h] |= bit;
                            }
                        }
                    }
                }
            }
        }
        self.g = next;
        Ok(())
    }

    fn certificate(&self) -> Certificate {
        let classes = (0..P)
            .filter_map(|k| {
                let set: VertexSet = (0..self.colors.len())
                    .filter(|&v| self.colors[v] >> k & 1 == 1)
                    .collect();
                (!set.is_empty()).then_some(Class { set, rep: 1 })
            })
            .collect();
        Certificate {
            p: P,
            q: Q,
            mode: Mode::Balanced,
            classes,
        }
        .merged()
    }
}

/// Builds the graph of `trace` and a balanced (83, 41)-coloring of it.
pub fn compose_8341_with(trace: &BuildTrace, profile: BaseProfile) -> Result<(GadgetGraph, Certificate)> {
    let mut c = Composer::new(trace.base, profile)?;
    for (k, step) in trace.steps.iter().enumerate() {
        c.step(step, k).map_err(|e| Error::TraceStep {
            step: k,
            source: Box::new(e),
        })?;
    }
    let cert = c.certificate();
    Ok((c.g, cert))
}

pub fn compose_8341(trace: &BuildTrace) -> Result<(GadgetGraph, Certificate)> {
    compose_8341_with(trace, BaseProfile::default())
}

/// Overlap of every edge, or the first edge outside `{13, 14}`.
pub fn edge_overlaps_in_range(g: &SignedGraph, c: &Certificate) -> std::result::Result<(), (usize, usize, u64)> {
    for (a, b, _) in g.edges() {
        let o = crate::certify::overlap(c, a, b);
        if o != 13 && o != 14 {
            return Err((a, b, o));
        }
    }
    Ok(())
}

/// The trace that substitutes every edge of (K3,−) and then inserts an apex
/// into every marked triangle.
pub fn g_hat_trace() -> BuildTrace {
    let base = trace_base(TraceBase::K3Minus);
    let mut steps: Vec<TraceStep> = base
        .graph
        .edges()
        .map(|(a, b, _)| TraceStep::SubstituteWPrime {
            edge: [base.graph.name(a).to_string(), base.graph.name(b).to_string()],
        })
        .collect();
    let wp = w_prime();
    let mut g = base.with_marked(Vec::new());
    for (k, s) in steps.iter().enumerate() {
        g = apply_step(&g, s, k, &wp).expect("edges of the base exist");
    }
    for t in &g.marked {
        let names = g.graph.set_names(t);
        steps.push(TraceStep::InnerK4 {
            face: [names[0].clone(), names[1].clone(), names[2].clone()],
        });
    }
    BuildTrace {
        base: TraceBase::K3Minus,
        steps,
    }
}

/// A random valid trace with `depth` steps: each step inserts an apex into
/// a random negative triangle or substitutes a random edge.
pub fn random_trace(seed: u64, depth: usize) -> BuildTrace {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let base = if rng.gen_bool(0.5) {
        TraceBase::K3Minus
    } else {
        TraceBase::K4Minus
    };
    let wp = w_prime();
    let mut g = trace_base(base);
    let mut steps = Vec::with_capacity(depth);
    for k in 0..depth {
        let step = if rng.gen_bool(0.5) {
            let negative: Vec<VertexSet> = all_triangles(&g.graph)
                .into_iter()
                .filter(|(_, s)| *s == Sign::Neg)
                .map(|(t, _)| t)
                .collect();
            let t = negative.choose(&mut rng).expect("the base has a negative triangle");
            let n = g.graph.set_names(t);
            TraceStep::InnerK4 {
                face: [n[0].clone(), n[1].clone(), n[2].clone()],
            }
        } else {
            let edges: Vec<(usize, usize)> = g.graph.edges().map(|(a, b, _)| (a, b)).collect();
            let &(a, b) = edges.choose(&mut rng).expect("non-empty graph");
            let (a, b) = if rng.gen_bool(0.5) { (a, b) } else { (b, a) };
            TraceStep::SubstituteWPrime {
                edge: [g.graph.name(a).to_string(), g.graph.name(b).to_string()],
            }
        };
        g = apply_step(&g, &step, k, &wp).expect("generated step is valid");
        steps.push(step);
    }
    BuildTrace { base, steps }
}
