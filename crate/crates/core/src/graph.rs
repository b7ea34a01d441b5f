//! Star graphs, discrete weight measures on them, and the kernels `Y` and `T`.

use std::collections::BTreeSet;

use num::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::number::Q;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub id: String,
    pub length: Q,
}

/// Edges joined at a central vertex, Dirichlet conditions at the outer ends.
///
/// Edges are kept sorted by identifier so that every derived quantity has a
/// canonical order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StarGraph {
    edges: Vec<Edge>,
}

impl StarGraph {
    pub fn new(mut edges: Vec<Edge>) -> Result<StarGraph> {
        if edges.len() < 2 {
            return Err(Error::invalid("a star graph needs at least two edges"));
        }
        let mut seen = BTreeSet::new();
        for e in &edges {
            if !e.length.is_positive() {
                return Err(Error::invalid(format!("edge {} has non-positive length", e.id)));
            }
            if !seen.insert(e.id.clone()) {
                return Err(Error::invalid(format!("duplicate edge id {}", e.id)));
            }
        }
        edges.sort_by(|a, b| a.id.cmp(&b.id));
        Ok(StarGraph { edges })
    }

    /// Convenience constructor with identifiers `e1, e2, ...`.
    pub fn with_lengths(lengths: &[Q]) -> Result<StarGraph> {
        let width = lengths.len().to_string().len();
        StarGraph::new(
            lengths
                .iter()
                .enumerate()
                .map(|(i, l)| Edge { id: format!("e{:0width$}", i + 1), length: l.clone() })
                .collect(),
        )
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn length(&self, e: usize) -> &Q {
        &self.edges[e].length
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.edges.binary_search_by(|e| e.id.as_str().cmp(id)).ok()
    }

    /// Harmonic length `L` (with `1/L = sum 1/l_e`) and co-harmonic lengths `L_e`.
    pub fn harmonic_lengths(&self) -> (Q, Vec<Q>) {
        let inv: Q = self.edges.iter().map(|e| Q::one() / &e.length).sum();
        let big_l = Q::one() / &inv;
        let co = self.edges.iter().map(|e| Q::one() / (&inv - Q::one() / &e.length)).collect();
        (big_l, co)
    }

    pub fn harmonic_length(&self) -> Q {
        self.harmonic_lengths().0
    }

    fn check_position(&self, e: usize, x: &Q) -> Result<()> {
        if e >= self.edges.len() {
            return Err(Error::invalid(format!("edge index {e} out of range")));
        }
        if x.is_negative() || x > self.length(e) {
            return Err(Error::invalid(format!("position {x} outside edge {}", self.edges[e].id)));
        }
        Ok(())
    }

    /// `Y_e(x) = L (1 - x/l_e)`
    pub fn eval_y(&self, e: usize, x: &Q) -> Result<Q> {
        self.check_position(e, x)?;
        let big_l = self.harmonic_length();
        Ok(&big_l * (Q::one() - x / self.length(e)))
    }

    /// `T_e(x) = L (1 + x/L_e)(1 - x/l_e)`
    pub fn eval_t(&self, e: usize, x: &Q) -> Result<Q> {
        self.check_position(e, x)?;
        let (big_l, co) = self.harmonic_lengths();
        Ok(&big_l * (Q::one() + x / &co[e]) * (Q::one() - x / self.length(e)))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointMass {
    pub position: Q,
    pub weight: Q,
}

impl PointMass {
    pub fn new(position: Q, weight: Q) -> Self {
        PointMass { position, weight }
    }
}

/// Point masses on one edge, ordered by distance from the center.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct EdgeMeasure {
    masses: Vec<PointMass>,
}

impl EdgeMeasure {
    pub fn new(masses: Vec<PointMass>, length: &Q) -> Result<EdgeMeasure> {
        for (i, m) in masses.iter().enumerate() {
            if !m.position.is_positive() || m.position >= *length {
                return Err(Error::invalid(format!(
                    "mass position {} outside the open edge (0, {length})",
                    m.position
                )));
            }
            if !m.weight.is_positive() {
                return Err(Error::invalid(format!("mass weight {} is not positive", m.weight)));
            }
            if i > 0 && masses[i - 1].position >= m.position {
                return Err(Error::invalid("mass positions are not strictly increasing"));
            }
        }
        Ok(EdgeMeasure { masses })
    }

    pub fn empty() -> Self {
        EdgeMeasure::default()
    }

    pub fn masses(&self) -> &[PointMass] {
        &self.masses
    }

    pub fn len(&self) -> usize {
        self.masses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.masses.is_empty()
    }
}

/// A point of the graph: the center, or a position on an edge.
#[derive(Clone, Copy, Debug)]
pub enum GraphPoint<'a> {
    Center,
    Edge(usize, &'a Q),
}

/// Central point mass plus a Stieltjes string on every edge.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphMeasure {
    graph: StarGraph,
    central_mass: Q,
    edges: Vec<EdgeMeasure>,
}

impl GraphMeasure {
    pub fn new(graph: StarGraph, central_mass: Q, edges: Vec<EdgeMeasure>) -> Result<GraphMeasure> {
        if central_mass.is_negative() {
            return Err(Error::invalid("central mass is negative"));
        }
        if edges.len() != graph.len() {
            return Err(Error::invalid("one edge measure per edge is required"));
        }
        Ok(GraphMeasure { graph, central_mass, edges })
    }

    /// Builds from raw `(position, weight)` lists, one per edge in graph order.
    pub fn from_masses(graph: StarGraph, central_mass: Q, masses: Vec<Vec<(Q, Q)>>) -> Result<GraphMeasure> {
        if masses.len() != graph.len() {
            return Err(Error::invalid("one mass list per edge is required"));
        }
        let edges = masses
            .into_iter()
            .enumerate()
            .map(|(e, ms)| {
                let ms = ms.into_iter().map(|(x, m)| PointMass::new(x, m)).collect();
                EdgeMeasure::new(ms, graph.length(e))
            })
            .collect::<Result<Vec<_>>>()?;
        GraphMeasure::new(graph, central_mass, edges)
    }

    pub fn empty(graph: StarGraph) -> GraphMeasure {
        let edges = vec![EdgeMeasure::empty(); graph.len()];
        GraphMeasure { graph, central_mass: Q::zero(), edges }
    }

    pub fn graph(&self) -> &StarGraph {
        &self.graph
    }

    pub fn central_mass(&self) -> &Q {
        &self.central_mass
    }

    pub fn edge(&self, e: usize) -> &EdgeMeasure {
        &self.edges[e]
    }

    pub fn edge_measures(&self) -> &[EdgeMeasure] {
        &self.edges
    }

    pub fn mass_count(&self) -> usize {
        self.edges.iter().map(EdgeMeasure::len).sum()
    }

    /// Number of eigenvalues counted with multiplicity.
    pub fn atom_count(&self) -> usize {
        self.mass_count() + usize::from(self.central_mass.is_positive())
    }

    pub fn total_mass(&self) -> Q {
        self.integrate(|_| Q::one())
    }

    /// `sum f(p) * weight(p)` over all atoms.
    pub fn integrate<F: Fn(GraphPoint<'_>) -> Q>(&self, f: F) -> Q {
        let mut acc = Q::zero();
        if !self.central_mass.is_zero() {
            acc += f(GraphPoint::Center) * &self.central_mass;
        }
        for (e, em) in self.edges.iter().enumerate() {
            for m in &em.masses {
                acc += f(GraphPoint::Edge(e, &m.position)) * &m.weight;
            }
        }
        acc
    }

    /// `int T dw`
    pub fn trace_integral(&self) -> Q {
        let (big_l, co) = self.graph.harmonic_lengths();
        self.integrate(|p| match p {
            GraphPoint::Center => big_l.clone(),
            GraphPoint::Edge(e, x) => {
                &big_l * (Q::one() + x / &co[e]) * (Q::one() - x / self.graph.length(e))
            }
        })
    }

    /// `int Y dw`, finite for every discrete measure.
    pub fn growth_integral(&self) -> Q {
        let big_l = self.graph.harmonic_length();
        self.integrate(|p| match p {
            GraphPoint::Center => big_l.clone(),
            GraphPoint::Edge(e, x) => &big_l * (Q::one() - x / self.graph.length(e)),
        })
    }

    /// `int_{I_e} x (1 - x/l_e) dw_e`
    pub fn edge_trace_integral(&self, e: usize) -> Q {
        let l = self.graph.length(e);
        self.edges[e].masses.iter().map(|m| &m.position * (Q::one() - &m.position / l) * &m.weight).sum()
    }
}
