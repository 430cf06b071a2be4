//! Z^n-periodic graphs given by a fundamental domain: vertex orbits and edge
//! classes with integer shifts and one weight symbol per class.

use std::collections::{HashSet, VecDeque};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("dimension must be positive")]
    ZeroDimension,
    #[error("vertex label {0:?} listed twice")]
    DuplicateVertex(String),
    #[error("edge {index}: unknown vertex {label:?}")]
    UnknownVertex { index: usize, label: String },
    #[error("edge {index}: shift has length {got}, expected {expected}")]
    ShiftArity { index: usize, expected: usize, got: usize },
    #[error("edge {index}: loop ({vertex}-{vertex} with zero shift)")]
    Loop { index: usize, vertex: String },
    #[error("edges {first} and {second} form a multiple edge")]
    MultipleEdge { first: usize, second: usize },
    #[error("parameter {param:?} used by edges {first} and {second}")]
    SharedParameter { param: String, first: usize, second: usize },
    #[error("edge index {index} out of range (graph has {len} edge classes)")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("graph file: {0}")]
    Io(String),
}

/// One orbit of undirected edges: `from` in the base cell joined to `to` in
/// the cell translated by `shift`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EdgeClass {
    pub from: String,
    pub to: String,
    pub shift: Vec<i32>,
    pub param: String,
}

/// Serialized graph description, also the JSON file format.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphSpec {
    pub dimension: usize,
    pub vertices: Vec<String>,
    pub edges: Vec<EdgeClass>,
}

/// A validated periodic graph. Edge classes are stored in canonical
/// orientation: `from` precedes `to` in the vertex list, and a class joining
/// an orbit to itself has a lexicographically positive shift.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PeriodicGraph {
    dimension: usize,
    vertices: Vec<String>,
    edges: Vec<EdgeClass>,
    ends: Vec<(usize, usize)>,
}

fn lex_positive(s: &[i32]) -> bool {
    s.iter().find(|&&x| x != 0).is_some_and(|&x| x > 0)
}

impl PeriodicGraph {
    pub fn new(dimension: usize, vertices: Vec<String>, edges: Vec<EdgeClass>) -> Result<Self, GraphError> {
        if dimension == 0 {
            return Err(GraphError::ZeroDimension);
        }
        for (i, v) in vertices.iter().enumerate() {
            if vertices[..i].contains(v) {
                return Err(GraphError::DuplicateVertex(v.clone()));
            }
        }
        let find = |index: usize, label: &str| {
            vertices
                .iter()
                .position(|v| v == label)
                .ok_or_else(|| GraphError::UnknownVertex {
                    index,
                    label: label.to_owned(),
                })
        };
        let mut canon = Vec::with_capacity(edges.len());
        let mut ends = Vec::with_capacity(edges.len());
        for (index, e) in edges.into_iter().enumerate() {
            let (u, v) = (find(index, &e.from)?, find(index, &e.to)?);
            if e.shift.len() != dimension {
                return Err(GraphError::ShiftArity {
                    index,
                    expected: dimension,
                    got: e.shift.len(),
                });
            }
            if u == v && e.shift.iter().all(|&s| s == 0) {
                return Err(GraphError::Loop {
                    index,
                    vertex: e.from,
                });
            }
            let flip = u > v || (u == v && !lex_positive(&e.shift));
            if flip {
                canon.push(EdgeClass {
                    from: e.to,
                    to: e.from,
                    shift: e.shift.iter().map(|s| -s).collect(),
                    param: e.param,
                });
                ends.push((v, u));
            } else {
                canon.push(e);
                ends.push((u, v));
            }
        }
        for i in 0..canon.len() {
            for j in 0..i {
                if ends[i] == ends[j] && canon[i].shift == canon[j].shift {
                    return Err(GraphError::MultipleEdge { first: j, second: i });
                }
                if canon[i].param == canon[j].param {
                    return Err(GraphError::SharedParameter {
                        param: canon[i].param.clone(),
                        first: j,
                        second: i,
                    });
                }
            }
        }
        Ok(PeriodicGraph {
            dimension,
            vertices,
            edges: canon,
            ends,
        })
    }

    pub fn from_spec(spec: GraphSpec) -> Result<Self, GraphError> {
        Self::new(spec.dimension, spec.vertices, spec.edges)
    }

    pub fn to_spec(&self) -> GraphSpec {
        GraphSpec {
            dimension: self.dimension,
            vertices: self.vertices.clone(),
            edges: self.edges.clone(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self, GraphError> {
        let spec: GraphSpec = serde_json::from_str(text).map_err(|e| GraphError::Io(e.to_string()))?;
        Self::from_spec(spec)
    }

    pub fn read_json(path: &Path) -> Result<Self, GraphError> {
        let text = std::fs::read_to_string(path).map_err(|e| GraphError::Io(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_spec()).expect("graph spec serializes")
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    pub fn edges(&self) -> &[EdgeClass] {
        &self.edges
    }

    /// Vertex indices of each edge class, in canonical orientation.
    pub fn edge_ends(&self) -> &[(usize, usize)] {
        &self.ends
    }

    pub fn parameter_names(&self) -> Vec<String> {
        self.edges.iter().map(|e| e.param.clone()).collect()
    }

    /// Restriction to the listed edge classes, kept in their original order.
    pub fn subgraph(&self, keep: &[usize]) -> Result<PeriodicGraph, GraphError> {
        let len = self.edges.len();
        if let Some(&index) = keep.iter().find(|&&i| i >= len) {
            return Err(GraphError::IndexOutOfRange { index, len });
        }
        let keep: HashSet<usize> = keep.iter().copied().collect();
        let mut g = self.clone();
        let mut i = 0;
        g.edges.retain(|_| {
            i += 1;
            keep.contains(&(i - 1))
        });
        let mut i = 0;
        g.ends.retain(|_| {
            i += 1;
            keep.contains(&(i - 1))
        });
        Ok(g)
    }

    /// Subgraph selected by bit `j` of `mask` for edge class `j`.
    pub fn subgraph_mask(&self, mask: u64) -> Result<PeriodicGraph, GraphError> {
        let keep: Vec<usize> = (0..64).filter(|j| mask >> j & 1 == 1).collect();
        self.subgraph(&keep)
    }

    /// Whether the infinite periodic graph is connected.
    ///
    /// The quotient graph on vertex orbits must be connected, and the cycle
    /// defects of the edge classes relative to spanning-tree potentials must
    /// generate all of Z^n.
    pub fn is_connected(&self) -> bool {
        let nv = self.vertices.len();
        if nv == 0 {
            return false;
        }
        let n = self.dimension;
        let mut potential: Vec<Option<Vec<i64>>> = vec![None; nv];
        potential[0] = Some(vec![0; n]);
        let mut queue = VecDeque::from([0usize]);
        while let Some(x) = queue.pop_front() {
            for (e, &(u, v)) in self.edges.iter().zip(&self.ends) {
                let px = potential[x].clone().expect("visited");
                let (y, sign) = if u == x {
                    (v, 1)
                } else if v == x {
                    (u, -1)
                } else {
                    continue;
                };
                if potential[y].is_none() {
                    potential[y] = Some(px.iter().zip(&e.shift).map(|(p, &s)| p + sign * s as i64).collect());
                    queue.push_back(y);
                }
            }
        }
        if potential.iter().any(Option::is_none) {
            return false;
        }
        let defects: Vec<Vec<i64>> = self
            .edges
            .iter()
            .zip(&self.ends)
            .map(|(e, &(u, v))| {
                let (pu, pv) = (potential[u].as_ref().unwrap(), potential[v].as_ref().unwrap());
                (0..n).map(|i| pu[i] + e.shift[i] as i64 - pv[i]).collect()
            })
            .collect();
        lattice_is_full(defects, n)
    }
}

/// Whether the integer vectors generate Z^n, by integer row echelon form.
fn lattice_is_full(mut rows: Vec<Vec<i64>>, n: usize) -> bool {
    let mut top = 0;
    for col in 0..n {
        loop {
            let pivot = (top..rows.len())
                .filter(|&r| rows[r][col] != 0)
                .min_by_key(|&r| rows[r][col].abs());
            let Some(p) = pivot else { return false };
            rows.swap(top, p);
            let mut done = true;
            for r in top + 1..rows.len() {
                let q = rows[r][col] / rows[top][col];
                if q != 0 {
                    for c in col..n {
                        rows[r][c] -= q * rows[top][c];
                    }
                }
                if rows[r][col] != 0 {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if rows[top][col].abs() != 1 {
            return false;
        }
        top += 1;
    }
    true
}

fn edge(from: &str, to: &str, shift: [i32; 2], param: &str) -> EdgeClass {
    EdgeClass {
        from: from.into(),
        to: to.into(),
        shift: shift.to_vec(),
        param: param.into(),
    }
}

/// Names of the mother graph's nine weights.
pub const MOTHER_PARAMS: [&str; 9] = [
    "alpha1", "alpha2", "alpha3", "alpha4", "alpha5", "alpha6", "alpha7", "alpha8", "alpha9",
];

/// The two-atom Z^2-periodic graph with all nearest-cell edges.
///
/// Edge class `j` carries `alpha{j+1}`: a-a (1,0), a-a (0,1), b-b (1,0),
/// b-b (0,1), then a-b with shifts (0,0), (1,0), (-1,0), (0,1), (0,-1).
pub fn mother() -> PeriodicGraph {
    let shifts = [
        ("a", "a", [1, 0]),
        ("a", "a", [0, 1]),
        ("b", "b", [1, 0]),
        ("b", "b", [0, 1]),
        ("a", "b", [0, 0]),
        ("a", "b", [1, 0]),
        ("a", "b", [-1, 0]),
        ("a", "b", [0, 1]),
        ("a", "b", [0, -1]),
    ];
    let edges = shifts
        .iter()
        .zip(MOTHER_PARAMS)
        .map(|(&(f, t, s), p)| edge(f, t, s, p))
        .collect();
    PeriodicGraph::new(2, vec!["a".into(), "b".into()], edges).expect("mother graph is valid")
}

/// The hexagonal lattice: two atoms, each joined to three neighbours.
/// Position in [`mother`]'s edge list of each weight as labelled in the
/// usual picture of the mother graph (labels 1..9 in order). Under this
/// labelling the weights run a-a(1,0) = 4, a-a(0,1) = 1, b-b(1,0) = 8,
/// b-b(0,1) = 7, a-b(0,0) = 5 and the four remaining a-b shifts carry
/// 9, 3, 2, 6 for (1,0), (-1,0), (0,1), (0,-1).
pub const FIGURE_TO_CANONICAL: [usize; 9] = [1, 7, 6, 0, 4, 8, 3, 2, 5];

/// Reorders weights given in figure labelling into [`mother`]'s order.
pub fn figure_to_canonical<T: Clone>(figure: &[T]) -> Vec<T> {
    assert_eq!(figure.len(), 9, "the mother graph has nine weights");
    let mut out = figure.to_vec();
    for (label, &slot) in FIGURE_TO_CANONICAL.iter().enumerate() {
        out[slot] = figure[label].clone();
    }
    out
}

/// Inverse of [`figure_to_canonical`].
pub fn canonical_to_figure<T: Clone>(canonical: &[T]) -> Vec<T> {
    assert_eq!(canonical.len(), 9, "the mother graph has nine weights");
    FIGURE_TO_CANONICAL.iter().map(|&slot| canonical[slot].clone()).collect()
}

pub fn graphene() -> PeriodicGraph {
    let edges = vec![
        edge("a", "b", [0, 0], "beta1"),
        edge("a", "b", [1, 0], "beta2"),
        edge("a", "b", [0, 1], "beta3"),
    ];
    PeriodicGraph::new(2, vec!["a".into(), "b".into()], edges).expect("graphene is valid")
}

/// Compiled-in graphs by name.
pub fn builtin(name: &str) -> Option<PeriodicGraph> {
    match name {
        "mother" => Some(mother()),
        "graphene" => Some(graphene()),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two(edges: Vec<EdgeClass>) -> Result<PeriodicGraph, GraphError> {
        PeriodicGraph::new(2, vec!["a".into(), "b".into()], edges)
    }

    #[test]
    fn mother_is_valid() {
        let g = mother();
        assert_eq!(g.edges().len(), 9);
        assert_eq!(g.edges()[6].shift, vec![-1, 0]);
        assert_eq!(g.parameter_names()[4], "alpha5");
    }

    #[test]
    fn zero_shift_loop_rejected() {
        let err = two(vec![edge("a", "a", [0, 0], "x")]).unwrap_err();
        assert!(matches!(err, GraphError::Loop { index: 0, .. }));
    }

    #[test]
    fn reversed_duplicate_rejected() {
        let err = two(vec![edge("a", "b", [1, 0], "x"), edge("b", "a", [-1, 0], "y")]).unwrap_err();
        assert_eq!(err, GraphError::MultipleEdge { first: 0, second: 1 });
        let err = two(vec![edge("a", "a", [1, 0], "x"), edge("a", "a", [-1, 0], "y")]).unwrap_err();
        assert_eq!(err, GraphError::MultipleEdge { first: 0, second: 1 });
    }

    #[test]
    fn arity_and_parameter_checks() {
        let bad = EdgeClass {
            from: "a".into(),
            to: "b".into(),
            shift: vec![1],
            param: "x".into(),
        };
        assert!(matches!(two(vec![bad]), Err(GraphError::ShiftArity { .. })));
        let err = two(vec![edge("a", "b", [0, 0], "x"), edge("a", "b", [1, 0], "x")]).unwrap_err();
        assert!(matches!(err, GraphError::SharedParameter { .. }));
        assert!(matches!(
            two(vec![edge("a", "c", [0, 0], "x")]),
            Err(GraphError::UnknownVertex { .. })
        ));
    }

    #[test]
    fn canonical_orientation() {
        let g = two(vec![edge("b", "a", [1, 0], "x"), edge("a", "a", [0, -1], "y")]).unwrap();
        assert_eq!(g.edges()[0], edge("a", "b", [-1, 0], "x"));
        assert_eq!(g.edges()[1], edge("a", "a", [0, 1], "y"));
    }

    #[test]
    fn subgraphs() {
        let g = mother();
        assert_eq!(g.subgraph(&(0..9).collect::<Vec<_>>()).unwrap(), g);
        let empty = g.subgraph(&[]).unwrap();
        assert_eq!(empty.vertices().len(), 2);
        assert!(empty.edges().is_empty());
        let one = g.subgraph(&[4]).unwrap();
        assert_eq!(one.parameter_names(), vec!["alpha5".to_string()]);
        assert!(matches!(g.subgraph(&[9]), Err(GraphError::IndexOutOfRange { .. })));
    }

    #[test]
    fn connectivity_examples() {
        let g = mother();
        assert!(g.is_connected());
        assert!(!g.subgraph(&[0, 2]).unwrap().is_connected());
        assert!(g.subgraph(&[4, 5, 7]).unwrap().is_connected());
        // a-b (1,0) and a-b (-1,0) only reach even translates in x.
        assert!(!g.subgraph(&[5, 6, 1]).unwrap().is_connected());
        assert!(g.subgraph(&[4, 5, 1]).unwrap().is_connected());
        assert!(graphene().is_connected());
    }

    #[test]
    fn json_round_trip() {
        let g = mother();
        assert_eq!(PeriodicGraph::from_json(&g.to_json()).unwrap(), g);
        assert!(PeriodicGraph::from_json("{").is_err());
    }

    #[test]
    fn echelon_index() {
        assert!(lattice_is_full(vec![vec![2, 0], vec![3, 0], vec![0, 1]], 2));
        assert!(!lattice_is_full(vec![vec![2, 0], vec![4, 0], vec![0, 1]], 2));
        assert!(!lattice_is_full(vec![vec![1, 1], vec![1, -1]], 2));
        assert!(lattice_is_full(vec![vec![2, 3], vec![1, 2]], 2));
    }

    #[test]
    fn figure_labelling() {
        let fig: Vec<i64> = (1..=9).collect();
        let canon = figure_to_canonical(&fig);
        assert_eq!(canon, vec![4, 1, 8, 7, 5, 9, 3, 2, 6]);
        assert_eq!(canonical_to_figure(&canon), fig);
        assert_eq!(
            figure_to_canonical(&[31, 1, 13, 19, 36, 4, 27, 3, 7]),
            vec![19, 31, 3, 27, 36, 7, 13, 1, 4]
        );
    }
}
