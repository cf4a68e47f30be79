//! Explicit `(p, q)`-colorings given as weighted color classes, and their
//! verification.
//!
//! A certificate never names individual colors: a class with `rep = k`
//! stands for `k` colors whose class is that vertex set.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::balance::{cycle_witness, negative_cycle_witness, CycleWitness};
use crate::error::{Error, Result};
use crate::graph::{Sign, SignedGraph, VertexSet};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// every class induces a balanced subgraph
    Balanced,
    /// every class induces a forest
    Forest,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Class {
    pub set: VertexSet,
    pub rep: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Certificate {
    pub p: u64,
    pub q: u64,
    pub mode: Mode,
    pub classes: Vec<Class>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CertificateDoc {
    p: u64,
    q: u64,
    mode: Mode,
    classes: Vec<ClassDoc>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ClassDoc {
    set: Vec<String>,
    rep: u64,
}

impl Certificate {
    /// Parses the JSON form against the vertex names of `g`. Rows with the
    /// same vertex set are merged.
    pub fn from_json(g: &SignedGraph, text: &str) -> Result<Certificate> {
        let doc: CertificateDoc = serde_json::from_str(text)?;
        if doc.p == 0 || doc.q == 0 {
            return Err(Error::InvalidCertificate("p and q must be positive".into()));
        }
        let mut classes = Vec::with_capacity(doc.classes.len());
        for (i, c) in doc.classes.iter().enumerate() {
            if c.rep == 0 {
                return Err(Error::InvalidCertificate(format!("class {i} has rep 0")));
            }
            if c.set.is_empty() {
                return Err(Error::InvalidCertificate(format!("class {i} is empty")));
            }
            let names: Vec<&str> = c.set.iter().map(String::as_str).collect();
            let set = g.set(&names)?;
            if set.len() != names.len() {
                return Err(Error::InvalidCertificate(format!("class {i} repeats a vertex")));
            }
            classes.push(Class { set, rep: c.rep });
        }
        Ok(Certificate {
            p: doc.p,
            q: doc.q,
            mode: doc.mode,
            classes,
        }
        .merged())
    }

    pub fn to_value(&self, g: &SignedGraph) -> serde_json::Value {
        let doc = CertificateDoc {
            p: self.p,
            q: self.q,
            mode: self.mode,
            classes: self
                .classes
                .iter()
                .map(|c| ClassDoc {
                    set: g.set_names(&c.set),
                    rep: c.rep,
                })
                .collect(),
        };
        serde_json::to_value(doc).expect("certificate serializes")
    }

    pub fn to_json(&self, g: &SignedGraph) -> String {
        serde_json::to_string_pretty(&self.to_value(g)).expect("certificate serializes")
    }

    /// Combines rows with equal vertex sets, keeping first-occurrence order.
    pub fn merged(&self) -> Certificate {
        let mut index: BTreeMap<&VertexSet, usize> = BTreeMap::new();
        let mut classes: Vec<Class> = Vec::new();
        for c in &self.classes {
            match index.get(&c.set) {
                Some(&i) => classes[i].rep += c.rep,
                None => {
                    index.insert(&c.set, classes.len());
                    classes.push(c.clone());
                }
            }
        }
        Certificate {
            classes,
            ..self.clone()
        }
    }

    /// Σ rep over all classes.
    pub fn used(&self) -> u64 {
        self.classes.iter().map(|c| c.rep).sum()
    }

    pub fn coverage(&self, v: usize) -> u64 {
        self.classes
            .iter()
            .filter(|c| c.set.contains(v))
            .map(|c| c.rep)
            .sum()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    /// class induces a negative cycle (balanced mode) or a cycle (forest mode)
    BadClass {
        class: usize,
        cycle: Vec<usize>,
        negative: bool,
    },
    Undercovered {
        vertex: usize,
        coverage: u64,
        q: u64,
    },
    PaletteOverflow {
        used: u64,
        p: u64,
    },
    OutOfRange {
        class: usize,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VerifyReport {
    pub ok: bool,
    pub per_vertex_coverage: Vec<u64>,
    pub used: u64,
    pub violations: Vec<Violation>,
}

fn bad_class(class: usize, w: CycleWitness) -> Violation {
    Violation::BadClass {
        class,
        cycle: w.vertices,
        negative: w.sign == Sign::Neg,
    }
}

/// Checks every class against the mode, the palette size and the
/// per-vertex coverage. Failures are findings, never errors.
pub fn verify(g: &SignedGraph, c: &Certificate) -> VerifyReport {
    let mut violations = Vec::new();
    let mut coverage = vec![0u64; g.vertex_count()];
    for (i, class) in c.classes.iter().enumerate() {
        if g.validate_set(&class.set).is_err() {
            violations.push(Violation::OutOfRange { class: i });
            continue;
        }
        let witness = match c.mode {
            Mode::Balanced => negative_cycle_witness(g, &class.set),
            Mode::Forest => cycle_witness(g, &class.set),
        }
        .expect("set validated");
        if let Some(w) = witness {
            violations.push(bad_class(i, w));
        }
        for v in class.set.iter() {
            coverage[v] += class.rep;
        }
    }
    let used = c.used();
    if used > c.p {
        violations.push(Violation::PaletteOverflow { used, p: c.p });
    }
    for (v, &cov) in coverage.iter().enumerate() {
        if cov < c.q {
            violations.push(Violation::Undercovered {
                vertex: v,
                coverage: cov,
                q: c.q,
            });
        }
    }
    VerifyReport {
        ok: violations.is_empty(),
        per_vertex_coverage: coverage,
        used,
        violations,
    }
}

/// Number of colors shared by `x` and `y`.
pub fn overlap(c: &Certificate, x: usize, y: usize) -> u64 {
    c.classes
        .iter()
        .filter(|k| k.set.contains(x) && k.set.contains(y))
        .map(|k| k.rep)
        .sum()
}

/// Colors that appear on no vertex of `t`, unused palette colors included.
pub fn triangle_missing_count(c: &Certificate, t: &VertexSet) -> u64 {
    let disjoint: u64 = c
        .classes
        .iter()
        .filter(|k| k.set.is_disjoint(t))
        .map(|k| k.rep)
        .sum();
    disjoint + c.p.saturating_sub(c.used())
}

/// Colors that appear on every vertex of `t`.
pub fn all_three_count(c: &Certificate, t: &VertexSet) -> u64 {
    c.classes
        .iter()
        .filter(|k| t.is_subset(&k.set))
        .map(|k| k.rep)
        .sum()
}

/// Negative triangles must see every color; positive triangles must not
/// carry a color on all three vertices.
pub fn triangle_property_audit(c: &Certificate, t: &VertexSet, sign: Sign) -> bool {
    match sign {
        Sign::Neg => triangle_missing_count(c, t) == 0,
        Sign::Pos => all_three_count(c, t) == 0,
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct OverlapProfile {
    pub pairs: BTreeMap<(usize, usize), u64>,
    /// colors on exactly this terminal among the listed ones
    pub singles: BTreeMap<usize, u64>,
    /// colors on none of the listed terminals, unused palette included
    pub none: u64,
}

pub fn profile(c: &Certificate, terminals: &[usize]) -> OverlapProfile {
    let mut out = OverlapProfile::default();
    for (i, &a) in terminals.iter().enumerate() {
        for &b in &terminals[i + 1..] {
            out.pairs.insert((a.min(b), a.max(b)), overlap(c, a, b));
        }
        out.singles.insert(a, 0);
    }
    for k in &c.classes {
        let hit: Vec<usize> = terminals.iter().copied().filter(|&v| k.set.contains(v)).collect();
        match hit[..] {
            [] => out.none += k.rep,
            [v] => *out.singles.get_mut(&v).expect("inserted") += k.rep,
            _ => {}
        }
    }
    out.none += c.p.saturating_sub(c.used());
    out
}

/// The coloring tables shipped with the crate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Fixture {
    /// (172, 85)-coloring of Ŵ with 28 colors on both terminals
    Table1,
    /// (83, 41)-coloring of Ŵ with 13 colors on both terminals
    Table2,
    /// (83, 41)-coloring of Ŵ with 14 colors on both terminals
    Table3,
    /// (52, 25) forest coloring of the underlying graph of Ŵ
    Table5,
}

impl Fixture {
    pub const ALL: [Fixture; 4] = [
        Fixture::Table1,
        Fixture::Table2,
        Fixture::Table3,
        Fixture::Table5,
    ];

    pub fn text(self) -> &'static str {
        match self {
            Fixture::Table1 => include_str!("../data/table1.json"),
            Fixture::Table2 => include_str!("../data/table2.json"),
            Fixture::Table3 => include_str!("../data/table3.json"),
            Fixture::Table5 => include_str!("../data/table5.json"),
        }
    }

    pub fn checksum(self) -> &'static str {
        match self {
            Fixture::Table1 => "fcc9fe5e3dcfdc1368f6ee5dce5dc72b4d8b66104d51dc74d211c278ed64fcf3",
            Fixture::Table2 => "8bea2bdf6fd33c759879397b6fe984ae5cdc0af980614710b04c7cc9fba6509a",
            Fixture::Table3 => "c8c7f106affe47f029fddfd304517e77967375f46e7282d0672ae00087d7eb6c",
            Fixture::Table5 => "26d4c017aca9d2344c6e2b3ce23e5f76de89f1cafdc48ea208747fa1ffdc3dd4",
        }
    }

    pub fn host(self) -> SignedGraph {
        match self {
            Fixture::Table5 => crate::gadgets::w_underlying().graph,
            _ => crate::gadgets::w_hat().graph,
        }
    }

    /// Loads the table after checking its checksum.
    pub fn load(self) -> Result<Certificate> {
        let text = self.text();
        let digest = hex::encode(Sha256::digest(text.as_bytes()));
        if digest != self.checksum() {
            return Err(Error::InvalidCertificate(format!(
                "fixture {self:?} checksum mismatch: {digest}"
            )));
        }
        Certificate::from_json(&self.host(), text)
    }
}

/// Checks the palette split used to color the K4-based gadget tower: one
/// private color per main vertex plus a block of `pair_overlap` colors for
/// each of the six pairs fills the palette, and every main vertex sees its
/// three blocks and its private color, `q` in total.
pub fn k4_block_partition_holds(p: u64, q: u64, pair_overlap: u64) -> bool {
    p == 4 + 6 * pair_overlap && q == 3 * pair_overlap + 1
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gadgets::{k4_minus, w_hat};

    fn cert(g: &SignedGraph, p: u64, q: u64, rows: &[(&[&str], u64)]) -> Certificate {
        Certificate {
            p,
            q,
            mode: Mode::Balanced,
            classes: rows
                .iter()
                .map(|(s, rep)| Class {
                    set: g.set(s).unwrap(),
                    rep: *rep,
                })
                .collect(),
        }
    }

    #[test]
    fn table1_verifies() {
        let g = w_hat().graph;
        let c = Fixture::Table1.load().unwrap();
        let r = verify(&g, &c);
        assert!(r.ok, "{:?}", r.violations);
        assert_eq!(r.used, 172);
        assert!(r.per_vertex_coverage.iter().all(|&x| x == 85));
        assert_eq!(c.classes.len(), 22);
        let id = |n| g.id(n).unwrap();
        assert_eq!(overlap(&c, id("u"), id("v")), 28);
    }

    #[test]
    fn lowering_a_rep_undercovers() {
        let g = w_hat().graph;
        let mut c = Fixture::Table1.load().unwrap();
        let b3 = g.set(&["u", "v", "w", "x1", "x4"]).unwrap();
        c.classes.iter_mut().find(|k| k.set == b3).unwrap().rep -= 1;
        let r = verify(&g, &c);
        assert!(!r.ok);
        assert!(r.violations.contains(&Violation::Undercovered {
            vertex: g.id("w").unwrap(),
            coverage: 84,
            q: 85
        }));
    }

    #[test]
    fn unbalanced_class_gets_a_witness() {
        let g = k4_minus().graph;
        let c = cert(&g, 2, 1, &[(&["a", "b", "c"], 1), (&["d"], 1)]);
        let r = verify(&g, &c);
        assert!(!r.ok);
        match &r.violations[0] {
            Violation::BadClass { class, cycle, negative } => {
                assert_eq!(*class, 0);
                assert_eq!(cycle.len(), 3);
                assert!(negative);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn palette_overflow() {
        let g = k4_minus().graph;
        let c = cert(&g, 1, 1, &[(&["a", "b"], 1), (&["c", "d"], 1)]);
        let r = verify(&g, &c);
        assert_eq!(r.violations, vec![Violation::PaletteOverflow { used: 2, p: 1 }]);
    }

    #[test]
    fn merging_rows_does_not_change_the_report() {
        let g = k4_minus().graph;
        let split = cert(&g, 4, 2, &[(&["a", "b"], 1), (&["c", "d"], 2), (&["a", "b"], 1)]);
        let merged = split.merged();
        assert_eq!(merged.classes.len(), 2);
        assert_eq!(verify(&g, &split), verify(&g, &merged));
    }

    #[test]
    fn triangle_counts() {
        let g = k4_minus().graph;
        let c = cert(
            &g,
            4,
            2,
            &[(&["a", "b"], 1), (&["c", "d"], 1), (&["a", "c"], 1), (&["b", "d"], 1)],
        );
        assert!(verify(&g, &c).ok);
        for (t, _) in crate::balance::all_triangles(&g) {
            assert_eq!(triangle_missing_count(&c, &t), 0);
            assert!(triangle_property_audit(&c, &t, Sign::Neg));
        }
        let t = g.set(&["a", "b", "c"]).unwrap();
        let one = cert(&g, 5, 1, &[(&["a", "b", "c"], 1)]);
        assert!(!triangle_property_audit(&one, &t, Sign::Pos));
        assert_eq!(triangle_missing_count(&one, &t), 4);
    }

    #[test]
    fn json_round_trip() {
        let g = w_hat().graph;
        let c = Fixture::Table3.load().unwrap();
        let back = Certificate::from_json(&g, &c.to_json(&g)).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn bad_json() {
        let g = k4_minus().graph;
        assert!(Certificate::from_json(&g, "{").is_err());
        let zero = r#"{"p":1,"q":1,"mode":"balanced","classes":[{"set":["a"],"rep":0}]}"#;
        assert!(matches!(Certificate::from_json(&g, zero), Err(Error::InvalidCertificate(_))));
        let unknown = r#"{"p":1,"q":1,"mode":"balanced","classes":[{"set":["q"],"rep":1}]}"#;
        assert!(matches!(Certificate::from_json(&g, unknown), Err(Error::UnknownVertex(_))));
    }

    #[test]
    fn profile_of_table2() {
        let g = w_hat().graph;
        let c = Fixture::Table2.load().unwrap();
        let (u, v) = (g.id("u").unwrap(), g.id("v").unwrap());
        let p = profile(&c, &[u, v]);
        assert_eq!(p.pairs[&(u, v)], 13);
        assert_eq!(p.singles[&u], 28);
        assert_eq!(p.singles[&v], 28);
        assert_eq!(p.none, 14);
    }

    #[test]
    fn block_partition() {
        assert!(k4_block_partition_holds(172, 85, 28));
        assert!(!k4_block_partition_holds(172, 85, 27));
    }
}
