//! Graphviz rendering of countermodels.

use std::fmt::Write;

use kripke_core::KripkeModel;

/// One node per world labelled with its true atoms, one edge per pair of
/// the relation. `root` is drawn with a double border.
pub fn render(m: &KripkeModel, root: u32) -> String {
    let mut out = String::from("digraph {\n");
    for &w in m.worlds() {
        let atoms = m.atoms_at(w).join(", ");
        let extra = if w == root { ", peripheries=2" } else { "" };
        writeln!(out, "  w{w} [label=\"w{w}: {atoms}\"{extra}];").unwrap();
    }
    for &(a, b) in m.rel() {
        writeln!(out, "  w{a} -> w{b};").unwrap();
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::{BTreeMap, BTreeSet};

    #[test]
    fn renders_nodes_and_edges() {
        let val = BTreeMap::from([("a".to_string(), BTreeSet::from([1]))]);
        let m = KripkeModel::new(BTreeSet::from([0, 1]), BTreeSet::from([(0, 1)]), val).unwrap();
        assert_eq!(
            render(&m, 0),
            "digraph {\n  w0 [label=\"w0: \", peripheries=2];\n  w1 [label=\"w1: a\"];\n  w0 -> w1;\n}\n"
        );
    }
}
