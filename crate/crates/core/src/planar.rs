//! Plane graphs given as rotation systems, and the signature pair that orients
//! every cycle counterclockwise and every bond away from a root vertex.
//!
//! Each vertex lists the ends of its incident edges in counterclockwise
//! order. Faces are traced so that the face of a dart lies on its left: after
//! arriving at `v` along a dart, the walk leaves along the end that precedes
//! the arrival end in the rotation at `v`.

use std::collections::{BTreeMap, HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::chains::SimpleChain;
use crate::error::{Error, Result};
use crate::matroid::{ChainKind, GraphEdge, RegularMatroid};
use crate::signatures::{Signature, SignaturePair};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlaneEdge {
    pub name: String,
    pub tail: String,
    pub head: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

/// The outer face, named as the face on one side of an edge traversed from
/// tail to head.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OuterFace {
    pub edge: String,
    pub side: Side,
}

/// JSON plane-graph input.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlaneGraph {
    pub edges: Vec<PlaneEdge>,
    /// Counterclockwise edge ends per vertex: `name`, or `name:tail` /
    /// `name:head` (required for loops).
    pub vertices: BTreeMap<String, Vec<String>>,
    pub outer_face: OuterFace,
    pub root: String,
}

/// A traced embedding: darts `2j` (tail to head of edge `j`) and `2j + 1`.
#[derive(Clone, Debug)]
pub struct Embedding {
    vertex_count: usize,
    tail: Vec<usize>,
    head: Vec<usize>,
    face_of: Vec<usize>,
    face_count: usize,
    outer: usize,
    root: usize,
}

impl PlaneGraph {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn graph_edges(&self) -> Vec<GraphEdge> {
        self.edges
            .iter()
            .map(|e| GraphEdge::new(e.tail.clone(), e.head.clone(), Some(&e.name)))
            .collect()
    }

    pub fn matroid(&self) -> Result<RegularMatroid> {
        RegularMatroid::from_graph(&self.graph_edges())
    }

    /// Validates the rotation system and traces its faces.
    pub fn embed(&self) -> Result<Embedding> {
        let bad = |msg: String| Error::NotPlanarEmbedding(msg);
        let vertex_index: HashMap<&str, usize> =
            self.vertices.keys().enumerate().map(|(i, v)| (v.as_str(), i)).collect();
        let vertex = |name: &str| {
            vertex_index
                .get(name)
                .copied()
                .ok_or_else(|| bad(format!("vertex `{name}` has no rotation")))
        };
        let edge_index: HashMap<&str, usize> = self
            .edges
            .iter()
            .enumerate()
            .map(|(j, e)| (e.name.as_str(), j))
            .collect();
        if edge_index.len() != self.edges.len() {
            return Err(bad("duplicate edge name".into()));
        }
        let tail: Vec<usize> = self.edges.iter().map(|e| vertex(&e.tail)).collect::<Result<_>>()?;
        let head: Vec<usize> = self.edges.iter().map(|e| vertex(&e.head)).collect::<Result<_>>()?;
        let root = vertex(&self.root)?;

        let mut rotation: Vec<Vec<usize>> = vec![Vec::new(); self.vertices.len()];
        let mut seen = vec![false; 2 * self.edges.len()];
        for (v, (name, ends)) in self.vertices.iter().enumerate() {
            for end in ends {
                let (edge, which) = match end.split_once(':') {
                    Some((edge, which)) => (edge, Some(which)),
                    None => (end.as_str(), None),
                };
                let j = *edge_index
                    .get(edge)
                    .ok_or_else(|| bad(format!("unknown edge `{edge}` at vertex `{name}`")))?;
                let dart = match which {
                    Some("tail") => 2 * j,
                    Some("head") => 2 * j + 1,
                    Some(other) => return Err(bad(format!("unknown end `{other}` of edge `{edge}`"))),
                    None if tail[j] == head[j] => {
                        return Err(bad(format!("loop `{edge}` needs `{edge}:tail` and `{edge}:head`")))
                    }
                    None if tail[j] == v => 2 * j,
                    None if head[j] == v => 2 * j + 1,
                    None => return Err(bad(format!("edge `{edge}` is not incident to `{name}`"))),
                };
                let at = if dart % 2 == 0 { tail[j] } else { head[j] };
                if at != v {
                    return Err(bad(format!("end `{end}` is listed at the wrong vertex `{name}`")));
                }
                if std::mem::replace(&mut seen[dart], true) {
                    return Err(bad(format!("end `{end}` is listed twice")));
                }
                rotation[v].push(dart);
            }
        }
        if let Some(d) = seen.iter().position(|s| !s) {
            return Err(bad(format!(
                "an end of edge `{}` is missing from the rotations",
                self.edges[d / 2].name
            )));
        }

        // connectivity
        let n = self.vertices.len();
        let mut adjacent = vec![Vec::new(); n];
        for j in 0..self.edges.len() {
            adjacent[tail[j]].push(head[j]);
            adjacent[head[j]].push(tail[j]);
        }
        let mut reached = vec![false; n];
        reached[root] = true;
        let mut queue = VecDeque::from([root]);
        while let Some(v) = queue.pop_front() {
            for &w in &adjacent[v] {
                if !std::mem::replace(&mut reached[w], true) {
                    queue.push_back(w);
                }
            }
        }
        if reached.iter().any(|r| !r) {
            return Err(Error::Disconnected);
        }

        let mut position = vec![(0usize, 0usize); 2 * self.edges.len()];
        for (v, darts) in rotation.iter().enumerate() {
            for (i, &d) in darts.iter().enumerate() {
                position[d] = (v, i);
            }
        }
        let next = |d: usize| {
            let (v, i) = position[d ^ 1];
            let ring = &rotation[v];
            ring[(i + ring.len() - 1) % ring.len()]
        };
        let mut face_of = vec![usize::MAX; 2 * self.edges.len()];
        let mut face_count = 0;
        for start in 0..face_of.len() {
            if face_of[start] != usize::MAX {
                continue;
            }
            let mut d = start;
            while face_of[d] == usize::MAX {
                face_of[d] = face_count;
                d = next(d);
            }
            face_count += 1;
        }
        if self.edges.is_empty() {
            face_count = 1;
        }
        let euler = n as i64 - self.edges.len() as i64 + face_count as i64;
        if euler != 2 {
            return Err(bad(format!(
                "V - E + F = {euler} (V = {n}, E = {}, F = {face_count})",
                self.edges.len()
            )));
        }
        let outer = if self.edges.is_empty() {
            0
        } else {
            let j = *edge_index
                .get(self.outer_face.edge.as_str())
                .ok_or_else(|| bad(format!("unknown outer-face edge `{}`", self.outer_face.edge)))?;
            match self.outer_face.side {
                Side::Left => face_of[2 * j],
                Side::Right => face_of[2 * j + 1],
            }
        };
        Ok(Embedding {
            vertex_count: n,
            tail,
            head,
            face_of,
            face_count,
            outer,
            root,
        })
    }
}

impl Embedding {
    pub fn face_count(&self) -> usize {
        self.face_count
    }

    /// Whether a signed cycle has the bounded side on its left.
    pub fn is_counterclockwise(&self, cycle: &SimpleChain) -> bool {
        let Some(j) = cycle.support().first() else {
            return true;
        };
        let dart = if cycle.coeff(j) > 0 { 2 * j } else { 2 * j + 1 };
        let start = self.face_of[dart];
        let mut reached = vec![false; self.face_count];
        reached[start] = true;
        let mut queue = VecDeque::from([start]);
        while let Some(f) = queue.pop_front() {
            if f == self.outer {
                return false;
            }
            for k in 0..self.tail.len() {
                if cycle.support().contains(k) {
                    continue;
                }
                let (a, b) = (self.face_of[2 * k], self.face_of[2 * k + 1]);
                for (from, to) in [(a, b), (b, a)] {
                    if from == f && !std::mem::replace(&mut reached[to], true) {
                        queue.push_back(to);
                    }
                }
            }
        }
        true
    }

    /// The signed bond on `bond` with every edge directed away from the root
    /// side.
    pub fn away_from_root(&self, bond: &SimpleChain) -> SimpleChain {
        let mut root_side = vec![false; self.vertex_count];
        root_side[self.root] = true;
        let mut queue = VecDeque::from([self.root]);
        while let Some(v) = queue.pop_front() {
            for k in 0..self.tail.len() {
                if bond.support().contains(k) {
                    continue;
                }
                for (a, b) in [(self.tail[k], self.head[k]), (self.head[k], self.tail[k])] {
                    if a == v && !std::mem::replace(&mut root_side[b], true) {
                        queue.push_back(b);
                    }
                }
            }
        }
        let mut chain = SimpleChain::zero(bond.len());
        for k in bond.support().iter() {
            let sign = if root_side[self.tail[k]] {
                crate::chains::Sign::Plus
            } else {
                crate::chains::Sign::Minus
            };
            chain = chain.with_coeff(k, sign);
        }
        chain
    }
}

/// The matroid of a plane graph and its counterclockwise / away-from-root
/// signature pair, with both acyclicity verdicts.
#[derive(Clone, Debug)]
pub struct PlanarSignature {
    pub matroid: RegularMatroid,
    pub pair: SignaturePair,
    pub acyclic: bool,
    pub triangulating: bool,
}

pub fn planar_signature(graph: &PlaneGraph) -> Result<PlanarSignature> {
    let embedding = graph.embed()?;
    let matroid = graph.matroid()?;
    let circuits =
        matroid.circuits().chains().iter().step_by(2).map(
            |&c| {
                if embedding.is_counterclockwise(&c) {
                    c
                } else {
                    c.neg()
                }
            },
        );
    let circuit = Signature::from_chains(&matroid, ChainKind::Circuit, circuits.collect::<Vec<_>>())?;
    let cocircuits: Vec<SimpleChain> = matroid
        .cocircuits()
        .chains()
        .iter()
        .step_by(2)
        .map(|c| embedding.away_from_root(c))
        .collect();
    let cocircuit = Signature::from_chains(&matroid, ChainKind::Cocircuit, cocircuits)?;
    let pair = SignaturePair::new(circuit, cocircuit)?;
    let acyclic = pair.is_acyclic(&matroid);
    let triangulating = pair.is_triangulating(&matroid);
    Ok(PlanarSignature {
        matroid,
        pair,
        acyclic,
        triangulating,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) const FIG1: &str = r#"{
        "edges": [
            {"name": "f1", "tail": "2", "head": "1"},
            {"name": "f2", "tail": "2", "head": "3"},
            {"name": "f3", "tail": "1", "head": "3"},
            {"name": "f4", "tail": "1", "head": "3"}
        ],
        "vertices": {"1": ["f4", "f3", "f1"], "2": ["f1", "f2"], "3": ["f2", "f3", "f4"]},
        "outer_face": {"edge": "f4", "side": "right"},
        "root": "1"
    }"#;

    fn names(pair: &SignaturePair, m: &RegularMatroid, kind: ChainKind) -> Vec<String> {
        pair.get(kind)
            .chains()
            .iter()
            .map(|c| m.ground().format_chain(c))
            .collect()
    }

    #[test]
    fn fig1_embedding_gives_example_pair() {
        let g = PlaneGraph::from_json(FIG1).unwrap();
        assert_eq!(g.embed().unwrap().face_count(), 3);
        let p = planar_signature(&g).unwrap();
        assert_eq!(
            names(&p.pair, &p.matroid, ChainKind::Circuit),
            ["+f1-f2+f3", "+f1-f2+f4", "-f3+f4"]
        );
        assert_eq!(
            names(&p.pair, &p.matroid, ChainKind::Cocircuit),
            ["-f1-f2", "-f1+f3+f4", "+f2+f3+f4"]
        );
        assert!(p.acyclic && p.triangulating);
    }

    #[test]
    fn triangle() {
        let g = PlaneGraph::from_json(
            r#"{"edges": [{"name":"a","tail":"x","head":"y"},{"name":"b","tail":"y","head":"z"},{"name":"c","tail":"z","head":"x"}],
                "vertices": {"x": ["a","c"], "y": ["b","a"], "z": ["c","b"]},
                "outer_face": {"edge": "a", "side": "right"}, "root": "x"}"#,
        )
        .unwrap();
        let p = planar_signature(&g).unwrap();
        assert_eq!(names(&p.pair, &p.matroid, ChainKind::Circuit), ["+a+b+c"]);
        assert_eq!(p.pair.cocircuit().len(), 3);
        for c in p.pair.cocircuit().chains() {
            // edges at x point away from x
            if c.support().contains(0) {
                assert_eq!(c.coeff(0), 1);
            }
            if c.support().contains(2) {
                assert_eq!(c.coeff(2), -1);
            }
        }
        assert!(p.acyclic && p.triangulating);
    }

    #[test]
    fn digon() {
        let g = PlaneGraph::from_json(
            r#"{"edges": [{"name":"e0","tail":"u","head":"v"},{"name":"e1","tail":"u","head":"v"}],
                "vertices": {"u": ["e0","e1"], "v": ["e1","e0"]},
                "outer_face": {"edge": "e0", "side": "right"}, "root": "u"}"#,
        )
        .unwrap();
        let p = planar_signature(&g).unwrap();
        assert_eq!(p.pair.circuit().len(), 1);
        assert_eq!(p.pair.cocircuit().chains()[0].coeff(0), 1);
        assert!(p.triangulating);
    }

    #[test]
    fn rejects_bad_embeddings() {
        let mut g = PlaneGraph::from_json(FIG1).unwrap();
        // swapping two ends at one vertex gives a torus embedding
        g.vertices
            .insert("1".into(), vec!["f3".into(), "f4".into(), "f1".into()]);
        assert!(matches!(g.embed(), Err(Error::NotPlanarEmbedding(_))));

        let disconnected = PlaneGraph::from_json(
            r#"{"edges": [{"name":"a","tail":"x","head":"y"},{"name":"b","tail":"z","head":"w"}],
                "vertices": {"x": ["a"], "y": ["a"], "z": ["b"], "w": ["b"]},
                "outer_face": {"edge": "a", "side": "left"}, "root": "x"}"#,
        )
        .unwrap();
        assert!(matches!(disconnected.embed(), Err(Error::Disconnected)));

        let mut missing = PlaneGraph::from_json(FIG1).unwrap();
        missing.vertices.insert("2".into(), vec!["f1".into()]);
        assert!(matches!(missing.embed(), Err(Error::NotPlanarEmbedding(_))));
    }

    #[test]
    fn loop_orientation() {
        let g = PlaneGraph::from_json(
            r#"{"edges": [{"name":"a","tail":"x","head":"y"},{"name":"l","tail":"y","head":"y"}],
                "vertices": {"x": ["a"], "y": ["a","l:tail","l:head"]},
                "outer_face": {"edge": "a", "side": "left"}, "root": "x"}"#,
        )
        .unwrap();
        let e = g.embed().unwrap();
        assert_eq!(e.face_count(), 2);
        let p = planar_signature(&g).unwrap();
        assert_eq!(p.pair.circuit().len(), 1);
        assert!(p.triangulating);
    }
}
