//! Maximal unital proper *-subalgebras (MUPSAs) by Wedderburn type, and the
//! lattice of types they generate.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt::Write as _;

use serde::Serialize;

use crate::algebra::WedderburnType;
use crate::error::{Error, Result};

/// Largest ambient dimension for which [`build_lattice`] is offered.
pub const LATTICE_MAX_DIM: usize = 8;

/// `Σ (2n − 1)` over the blocks.
pub fn chi(t: &WedderburnType) -> usize {
    t.chi()
}

/// `2d − 2`.
pub fn max_kappa_bound(d: usize) -> usize {
    (2 * d).saturating_sub(2)
}

/// MUPSA types of `M_d`: `M_{d−r} ⊕ M_r` for `1 ≤ r ≤ ⌊d/2⌋`.
pub fn mupsas_of_full(d: usize) -> Result<Vec<WedderburnType>> {
    if d < 2 {
        return Err(Error::InvalidParameter(format!("M_{d} has no proper unital subalgebra")));
    }
    Ok(enumerate_mupsas(&WedderburnType::full(d)))
}

/// All MUPSA types of a type: split one block `(n, k)` into
/// `(n − s, k), (s, k)`, or merge two blocks of equal size `n` into
/// `(n, k_i + k_j)`. Sorted and free of duplicates.
pub fn enumerate_mupsas(t: &WedderburnType) -> Vec<WedderburnType> {
    let blocks = t.pairs();
    let mut out = BTreeSet::new();
    for (j, &(n, k)) in blocks.iter().enumerate() {
        for s in 1..=n / 2 {
            let mut next = blocks.clone();
            next.remove(j);
            next.push((n - s, k));
            next.push((s, k));
            out.insert(WedderburnType::new(next).expect("split keeps blocks positive"));
        }
    }
    for i in 0..blocks.len() {
        for j in i + 1..blocks.len() {
            if blocks[i].0 != blocks[j].0 {
                continue;
            }
            let mut next: Vec<_> = blocks
                .iter()
                .enumerate()
                .filter(|(idx, _)| *idx != i && *idx != j)
                .map(|(_, b)| *b)
                .collect();
            next.push((blocks[i].0, blocks[i].1 + blocks[j].1));
            out.insert(WedderburnType::new(next).expect("merge keeps blocks positive"));
        }
    }
    out.into_iter().rev().collect()
}

/// Types reachable from `M_d` by repeatedly passing to MUPSAs, with the
/// covering edges between them.
#[derive(Clone, Debug, Serialize)]
pub struct LatticeGraph {
    pub dim: usize,
    pub nodes: Vec<WedderburnType>,
    pub edges: Vec<(usize, usize)>,
    pub root: usize,
    pub bottom: usize,
}

pub fn build_lattice(d: usize) -> Result<LatticeGraph> {
    if !(2..=LATTICE_MAX_DIM).contains(&d) {
        return Err(Error::InvalidParameter(format!(
            "lattice dimension must lie in 2..={LATTICE_MAX_DIM}, got {d}"
        )));
    }
    let root = WedderburnType::full(d);
    let mut index: HashMap<WedderburnType, usize> = HashMap::new();
    let mut nodes = vec![root.clone()];
    index.insert(root, 0);
    let mut edges = Vec::new();
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        for child in enumerate_mupsas(&nodes[i]) {
            let j = match index.get(&child) {
                Some(&j) => j,
                None => {
                    let j = nodes.len();
                    index.insert(child.clone(), j);
                    nodes.push(child);
                    queue.push_back(j);
                    j
                }
            };
            edges.push((i, j));
        }
    }
    let bottom = index[&WedderburnType::scalars(d)];
    Ok(LatticeGraph {
        dim: d,
        nodes,
        edges,
        root: 0,
        bottom,
    })
}

impl LatticeGraph {
    pub fn children(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        self.edges.iter().filter(move |e| e.0 == i).map(|e| e.1)
    }

    /// A longest root-to-bottom path, as node indices.
    pub fn longest_chain(&self) -> Vec<usize> {
        // χ strictly drops along every edge, so decreasing χ is a topological order.
        let mut order: Vec<usize> = (0..self.nodes.len()).collect();
        order.sort_by_key(|&i| self.nodes[i].chi());
        // best[i]: node count of the longest path from i down to the bottom.
        let mut best = vec![0usize; self.nodes.len()];
        let mut next = vec![None; self.nodes.len()];
        for &i in &order {
            if i == self.bottom {
                best[i] = 1;
                continue;
            }
            for j in self.children(i) {
                if best[j] > 0 && best[j] + 1 > best[i] {
                    best[i] = best[j] + 1;
                    next[i] = Some(j);
                }
            }
        }
        let mut path = vec![self.root];
        let mut cur = self.root;
        while let Some(j) = next[cur] {
            path.push(j);
            cur = j;
        }
        path
    }

    pub fn longest_chain_len(&self) -> usize {
        self.longest_chain().len()
    }

    pub fn to_dot(&self) -> String {
        let mut s = format!("digraph lattice_m{} {{\n  rankdir=TB;\n", self.dim);
        for (i, t) in self.nodes.iter().enumerate() {
            let _ = writeln!(s, "  n{i} [label=\"{t}\"];");
        }
        for (a, b) in &self.edges {
            let _ = writeln!(s, "  n{a} -> n{b};");
        }
        s.push_str("}\n");
        s
    }

    pub fn to_json(&self) -> serde_json::Value {
        let chain = self.longest_chain();
        serde_json::json!({
            "dim": self.dim,
            "nodes": self.nodes.iter().enumerate().map(|(i, t)| serde_json::json!({
                "id": i,
                "type": t.to_string(),
                "chi": t.chi(),
            })).collect::<Vec<_>>(),
            "edges": self.edges,
            "root": self.root,
            "bottom": self.bottom,
            "longest_chain": chain.len(),
            "longest_chain_types": chain.iter().map(|&i| self.nodes[i].to_string()).collect::<Vec<_>>(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ty(s: &str) -> WedderburnType {
        s.parse().unwrap()
    }

    #[test]
    fn full_algebra_mupsas() {
        assert_eq!(mupsas_of_full(4).unwrap(), vec![ty("M3⊕M1"), ty("M2⊕M2")]);
        assert_eq!(mupsas_of_full(2).unwrap(), vec![ty("M1⊕M1")]);
        assert_eq!(mupsas_of_full(5).unwrap(), vec![ty("M4⊕M1"), ty("M3⊕M2")]);
        assert!(mupsas_of_full(1).is_err());
    }

    #[test]
    fn enumerate_examples() {
        let m = enumerate_mupsas(&ty("M2⊕M2"));
        assert_eq!(m, vec![ty("M2⊗1_2"), ty("M2⊕M1⊕M1")]);
        assert!(enumerate_mupsas(&ty("M1⊗1_4")).is_empty());
        assert_eq!(enumerate_mupsas(&ty("M2⊗1_2")), vec![ty("M1⊗1_2⊕M1⊗1_2")]);
    }

    #[test]
    fn chi_and_bound_examples() {
        assert_eq!(chi(&WedderburnType::full(4)), 7);
        assert_eq!(chi(&WedderburnType::scalars(4)), 1);
        assert_eq!(chi(&ty("M3⊕M1")), 6);
        assert_eq!(max_kappa_bound(2), 2);
        assert_eq!(max_kappa_bound(4), 6);
        assert_eq!(max_kappa_bound(10), 18);
    }

    #[test]
    fn lattice_examples() {
        let l = build_lattice(2).unwrap();
        assert_eq!(l.nodes.len(), 3);
        assert_eq!(l.longest_chain_len(), 3);
        let l = build_lattice(4).unwrap();
        assert_eq!(l.longest_chain_len(), 7);
        assert!(l.nodes.contains(&ty("M2⊕M1⊗1_2")));
        assert_eq!(build_lattice(5).unwrap().longest_chain_len(), 9);
        assert!(build_lattice(1).is_err());
        assert!(build_lattice(9).is_err());
    }

    #[test]
    fn exports() {
        let l = build_lattice(3).unwrap();
        let dot = l.to_dot();
        assert!(dot.starts_with("digraph"));
        assert!(dot.contains("label=\"M3\""));
        let json = l.to_json();
        assert_eq!(json["longest_chain"], 5);
        assert_eq!(json["nodes"][0]["type"], "M3");
    }
}
