use std::collections::{HashMap, VecDeque};
use std::fmt::Write as _;

use crate::error::{Result, SandpileError};
use crate::model::{applicable_moves, apply_move, step_parallel, Configuration, Mode, Model};

/// Configurations reachable from a root, with one edge per rule
/// application (sequential) or per step (parallel). Vertices are stored in
/// canonical form and discovery order.
#[derive(Clone, Debug)]
pub struct OrbitGraph {
    vertices: Vec<Configuration>,
    index: HashMap<Configuration, usize>,
    successors: Vec<Vec<usize>>,
    root: Option<usize>,
    mode: Mode,
}

impl OrbitGraph {
    /// Builds a graph from explicit parts; edges referencing missing vertices
    /// are dropped. Duplicate vertices collapse onto their first occurrence.
    pub fn from_parts(
        vertices: Vec<Configuration>,
        edges: &[(usize, usize)],
        root: Option<usize>,
        mode: Mode,
    ) -> Self {
        let mut g = OrbitGraph::empty(mode);
        let ids: Vec<usize> = vertices.into_iter().map(|v| g.intern(v).0).collect();
        for &(a, b) in edges {
            if let (Some(&a), Some(&b)) = (ids.get(a), ids.get(b)) {
                g.add_edge(a, b);
            }
        }
        g.root = root.and_then(|r| ids.get(r).copied());
        g
    }

    fn empty(mode: Mode) -> Self {
        OrbitGraph {
            vertices: Vec::new(),
            index: HashMap::new(),
            successors: Vec::new(),
            root: None,
            mode,
        }
    }

    fn intern(&mut self, c: Configuration) -> (usize, bool) {
        let c = c.canonical();
        if let Some(&i) = self.index.get(&c) {
            return (i, false);
        }
        let i = self.vertices.len();
        self.index.insert(c.clone(), i);
        self.vertices.push(c);
        self.successors.push(Vec::new());
        (i, true)
    }

    fn add_edge(&mut self, a: usize, b: usize) {
        if !self.successors[a].contains(&b) {
            self.successors[a].push(b);
        }
    }

    pub fn vertices(&self) -> &[Configuration] {
        &self.vertices
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.successors.iter().map(Vec::len).sum()
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.successors
            .iter()
            .enumerate()
            .flat_map(|(a, succ)| succ.iter().map(move |&b| (a, b)))
    }

    pub fn successors(&self, v: usize) -> &[usize] {
        &self.successors[v]
    }

    pub fn root(&self) -> Option<usize> {
        self.root
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn index_of(&self, c: &Configuration) -> Option<usize> {
        self.index.get(c).copied()
    }

    pub fn contains(&self, c: &Configuration) -> bool {
        self.index.contains_key(c)
    }

    /// Vertices without outgoing edges.
    pub fn sinks(&self) -> Vec<usize> {
        (0..self.vertices.len())
            .filter(|&v| self.successors[v].is_empty())
            .collect()
    }

    /// Graphviz rendering; vertices are labelled with comma-joined heights.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph orbit {\n");
        for (i, v) in self.vertices.iter().enumerate() {
            let _ = writeln!(out, "  {i} [label=\"{v}\"];");
        }
        for (a, b) in self.edges() {
            let _ = writeln!(out, "  {a} -> {b};");
        }
        out.push_str("}\n");
        out
    }
}

/// Breadth-first closure of `c` under `model`.
pub fn build_orbit_graph(
    c: &Configuration,
    model: &Model,
    mode: Mode,
    vertex_limit: usize,
) -> Result<OrbitGraph> {
    let mut g = OrbitGraph::empty(mode);
    let (root, _) = g.intern(c.clone());
    g.root = Some(root);
    let mut queue = VecDeque::from([root]);
    while let Some(v) = queue.pop_front() {
        let current = g.vertices[v].clone();
        let next: Vec<Configuration> = match mode {
            Mode::Sequential => applicable_moves(&current, model)
                .iter()
                .map(|mv| apply_move(&current, mv))
                .collect::<Result<_>>()?,
            Mode::Parallel => {
                let s = step_parallel(&current, model)?;
                if s == current {
                    vec![]
                } else {
                    vec![s]
                }
            }
        };
        for n in next {
            let (w, fresh) = g.intern(n);
            if fresh {
                if g.vertices.len() > vertex_limit {
                    return Err(SandpileError::VertexLimit {
                        limit: vertex_limit,
                    });
                }
                queue.push_back(w);
            }
            g.add_edge(v, w);
        }
    }
    Ok(g)
}

/// Induced subgraph on the vertices of (canonical) length at most `l`.
pub fn restrict_length(g: &OrbitGraph, l: usize) -> OrbitGraph {
    let mut keep = vec![None; g.vertex_count()];
    let mut kept = Vec::new();
    for (i, v) in g.vertices.iter().enumerate() {
        if v.canonical_len() <= l {
            keep[i] = Some(kept.len());
            kept.push(v.clone());
        }
    }
    let edges: Vec<(usize, usize)> = g
        .edges()
        .filter_map(|(a, b)| Some((keep[a]?, keep[b]?)))
        .collect();
    let root = g.root.and_then(|r| keep[r]);
    OrbitGraph::from_parts(kept, &edges, root, g.mode)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn labels(g: &OrbitGraph) -> Vec<String> {
        let mut v: Vec<String> = g.vertices().iter().map(|c| c.to_string()).collect();
        v.sort();
        v
    }

    #[test]
    fn sequential_orbit_of_eight() {
        let g = build_orbit_graph(&[8].into(), &Model::SPM, Mode::Sequential, 100).unwrap();
        assert_eq!(g.vertex_count(), 13);
        assert_eq!(g.edge_count(), 15);
        let sinks = g.sinks();
        assert_eq!(sinks.len(), 1);
        assert_eq!(g.vertices()[sinks[0]].heights(), &[3, 2, 2, 1]);
    }

    #[test]
    fn parallel_orbit_is_a_chain() {
        let g = build_orbit_graph(&[8].into(), &Model::SPM, Mode::Parallel, 100).unwrap();
        assert_eq!(g.vertex_count(), 8);
        assert_eq!(g.edge_count(), 7);
        assert!(g.successors.iter().all(|s| s.len() <= 1));
    }

    #[test]
    fn fixed_point_orbit_is_trivial() {
        let g = build_orbit_graph(&[3, 2, 2, 1].into(), &Model::SPM, Mode::Sequential, 10).unwrap();
        assert_eq!((g.vertex_count(), g.edge_count()), (1, 0));
    }

    #[test]
    fn vertex_limit_is_enforced() {
        assert_eq!(
            build_orbit_graph(&[8].into(), &Model::SPM, Mode::Sequential, 12).unwrap_err(),
            SandpileError::VertexLimit { limit: 12 }
        );
    }

    #[test]
    fn restriction_to_two_columns() {
        let g = build_orbit_graph(&[8].into(), &Model::SPM, Mode::Sequential, 100).unwrap();
        let r = restrict_length(&g, 2);
        assert_eq!(labels(&r), ["4,4", "5,3", "6,2", "7,1", "8"]);
        assert_eq!(r.edge_count(), 4);
        assert_eq!(restrict_length(&g, 1).vertex_count(), 1);
        let full = restrict_length(&g, 4);
        assert_eq!(full.vertex_count(), 13);
        assert_eq!(full.edge_count(), 15);
    }

    #[test]
    fn dot_output() {
        let g = build_orbit_graph(&[2].into(), &Model::SPM, Mode::Sequential, 10).unwrap();
        assert_eq!(
            g.to_dot(),
            "digraph orbit {\n  0 [label=\"2\"];\n  1 [label=\"1,1\"];\n  0 -> 1;\n}\n"
        );
    }
}
