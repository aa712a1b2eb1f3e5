//! Weighted directed hypergraphs and their incidence and degree data.
//!
//! A hyperedge is split into a head set and a tail set. A hyperedge with an
//! empty tail is undirected. Vertex and hyperedge ids are dense and 0-based.

use ndarray::Array2;
use num_complex::Complex64;
use thiserror::Error;

/// Dense complex matrix used for incidence, adjacency, Laplacians and activations.
pub type ComplexMatrix = Array2<Complex64>;

/// Weights at or below this value are treated as nonpositive.
pub const MIN_WEIGHT: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HypergraphError {
    #[error("hypergraph has no hyperedges")]
    Empty,
    #[error("hyperedge {edge}: vertex {vertex} is in both head and tail")]
    OverlappingHeadTail { edge: usize, vertex: usize },
    #[error("hyperedge {edge}: empty head set")]
    EmptyHead { edge: usize },
    #[error("hyperedge {edge}: weight {weight} is not positive")]
    NonpositiveWeight { edge: usize, weight: f64 },
    #[error("vertex {vertex} belongs to no hyperedge")]
    IsolatedVertex { vertex: usize },
    #[error("hyperedge {edge}: vertex {vertex} out of range for {n} vertices")]
    VertexOutOfRange { edge: usize, vertex: usize, n: usize },
}

/// Role of a vertex inside one hyperedge.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Role {
    Head,
    Tail,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Hyperedge {
    head: Vec<usize>,
    tail: Vec<usize>,
    weight: f64,
    label: Option<usize>,
}

impl Hyperedge {
    /// Unit-weight, unlabeled hyperedge. Head and tail are stored sorted
    /// without repeats.
    pub fn new(head: impl IntoIterator<Item = usize>, tail: impl IntoIterator<Item = usize>) -> Self {
        let mut head: Vec<usize> = head.into_iter().collect();
        let mut tail: Vec<usize> = tail.into_iter().collect();
        head.sort_unstable();
        head.dedup();
        tail.sort_unstable();
        tail.dedup();
        Self { head, tail, weight: 1.0, label: None }
    }

    pub fn with_weight(mut self, weight: f64) -> Self {
        self.weight = weight;
        self
    }

    pub fn with_label(mut self, label: usize) -> Self {
        self.label = Some(label);
        self
    }

    pub fn head(&self) -> &[usize] {
        &self.head
    }

    pub fn tail(&self) -> &[usize] {
        &self.tail
    }

    pub fn weight(&self) -> f64 {
        self.weight
    }

    pub fn label(&self) -> Option<usize> {
        self.label
    }

    /// Hyperedge density: `|H(e)| + |T(e)|`.
    pub fn density(&self) -> usize {
        self.head.len() + self.tail.len()
    }

    pub fn is_undirected(&self) -> bool {
        self.tail.is_empty()
    }

    /// Role of `v` in this hyperedge, if it is a member.
    pub fn role_of(&self, v: usize) -> Option<Role> {
        if self.head.binary_search(&v).is_ok() {
            Some(Role::Head)
        } else if self.tail.binary_search(&v).is_ok() {
            Some(Role::Tail)
        } else {
            None
        }
    }

    /// All member vertices with their roles, heads first.
    pub fn members(&self) -> impl Iterator<Item = (usize, Role)> + '_ {
        self.head.iter().map(|&v| (v, Role::Head)).chain(self.tail.iter().map(|&v| (v, Role::Tail)))
    }
}

/// Vertex degrees `d_u` (sum of incident hyperedge weights) and hyperedge
/// densities `δ_e`.
#[derive(Debug, Clone, PartialEq)]
pub struct DegreeVectors {
    pub vertex: Vec<f64>,
    pub density: Vec<usize>,
}

/// A validated weighted directed hypergraph. Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct DirectedHypergraph {
    n: usize,
    edges: Vec<Hyperedge>,
}

impl DirectedHypergraph {
    /// Validates and builds a hypergraph over vertices `0..n`.
    pub fn new(n: usize, edges: Vec<Hyperedge>) -> Result<Self, HypergraphError> {
        if edges.is_empty() {
            return Err(HypergraphError::Empty);
        }
        let mut seen = vec![false; n];
        for (idx, e) in edges.iter().enumerate() {
            if e.head.is_empty() {
                return Err(HypergraphError::EmptyHead { edge: idx });
            }
            if !(e.weight.is_finite() && e.weight > MIN_WEIGHT) {
                return Err(HypergraphError::NonpositiveWeight { edge: idx, weight: e.weight });
            }
            for (v, _) in e.members() {
                if v >= n {
                    return Err(HypergraphError::VertexOutOfRange { edge: idx, vertex: v, n });
                }
                seen[v] = true;
            }
            if let Some(&v) = e.head.iter().find(|v| e.tail.binary_search(v).is_ok()) {
                return Err(HypergraphError::OverlappingHeadTail { edge: idx, vertex: v });
            }
        }
        if let Some(vertex) = seen.iter().position(|s| !s) {
            return Err(HypergraphError::IsolatedVertex { vertex });
        }
        Ok(Self { n, edges })
    }

    /// Vertex count.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Hyperedge count.
    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Hyperedge] {
        &self.edges
    }

    pub fn edge(&self, e: usize) -> &Hyperedge {
        &self.edges[e]
    }

    pub fn weights(&self) -> Vec<f64> {
        self.edges.iter().map(Hyperedge::weight).collect()
    }

    pub fn is_undirected(&self) -> bool {
        self.edges.iter().all(Hyperedge::is_undirected)
    }

    /// The same hypergraph with every tail folded into its head, i.e. all
    /// direction information discarded.
    pub fn to_undirected(&self) -> Self {
        let edges = self
            .edges
            .iter()
            .map(|e| Hyperedge {
                head: {
                    let mut all: Vec<usize> = e.head.iter().chain(&e.tail).copied().collect();
                    all.sort_unstable();
                    all
                },
                tail: Vec::new(),
                weight: e.weight,
                label: e.label,
            })
            .collect();
        Self { n: self.n, edges }
    }

    /// Complex incidence matrix (n×m): `1` for head members, `-i` for tail
    /// members, `0` elsewhere.
    pub fn incidence_matrix(&self) -> ComplexMatrix {
        let mut b = ComplexMatrix::zeros((self.n, self.m()));
        for (e, edge) in self.edges.iter().enumerate() {
            for (v, role) in edge.members() {
                b[[v, e]] = match role {
                    Role::Head => Complex64::new(1.0, 0.0),
                    Role::Tail => Complex64::new(0.0, -1.0),
                };
            }
        }
        b
    }

    /// Classical 0/1 incidence matrix, ignoring direction.
    pub fn real_incidence_matrix(&self) -> Array2<f64> {
        let mut b = Array2::zeros((self.n, self.m()));
        for (e, edge) in self.edges.iter().enumerate() {
            for (v, _) in edge.members() {
                b[[v, e]] = 1.0;
            }
        }
        b
    }

    pub fn degrees(&self) -> DegreeVectors {
        let mut vertex = vec![0.0; self.n];
        for edge in &self.edges {
            for (v, _) in edge.members() {
                vertex[v] += edge.weight.abs();
            }
        }
        DegreeVectors { vertex, density: self.edges.iter().map(Hyperedge::density).collect() }
    }
}

/// Builds the worked example used throughout the tests and examples:
/// vertices `a..e` (0..4) and hyperedges
/// `{b,c} <- {a}`, `{a,b} <- {d}`, `{e} <- {d}`, all unit weight.
pub fn worked_example() -> DirectedHypergraph {
    DirectedHypergraph::new(5, vec![Hyperedge::new([1, 2], [0]), Hyperedge::new([0, 1], [3]), Hyperedge::new([4], [3])])
        .expect("worked example is valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn worked_example_incidence() {
        let h = worked_example();
        assert_eq!((h.n(), h.m()), (5, 3));
        let b = h.incidence_matrix();
        let expected = [
            [c(0., -1.), c(1., 0.), c(0., 0.)],
            [c(1., 0.), c(1., 0.), c(0., 0.)],
            [c(1., 0.), c(0., 0.), c(0., 0.)],
            [c(0., 0.), c(0., -1.), c(0., -1.)],
            [c(0., 0.), c(0., 0.), c(1., 0.)],
        ];
        for v in 0..5 {
            for e in 0..3 {
                assert_eq!(b[[v, e]], expected[v][e], "entry ({v},{e})");
            }
        }
    }

    #[test]
    fn worked_example_degrees() {
        let d = worked_example().degrees();
        assert_eq!(d.vertex, vec![2.0, 2.0, 1.0, 2.0, 1.0]);
        assert_eq!(d.density, vec![3, 3, 2]);
    }

    #[test]
    fn single_directed_edge() {
        let h = DirectedHypergraph::new(3, vec![Hyperedge::new([0, 1], [2])]).unwrap();
        let b = h.incidence_matrix();
        assert_eq!(b.column(0).to_vec(), vec![c(1., 0.), c(1., 0.), c(0., -1.)]);
        let d = h.degrees();
        assert_eq!(d.vertex, vec![1.0, 1.0, 1.0]);
        assert_eq!(d.density, vec![3]);
    }

    #[test]
    fn weights_scale_degrees_not_densities() {
        let edges = worked_example().edges().iter().cloned().map(|e| e.with_weight(2.0)).collect();
        let d = DirectedHypergraph::new(5, edges).unwrap().degrees();
        assert_eq!(d.vertex, vec![4.0, 4.0, 2.0, 4.0, 2.0]);
        assert_eq!(d.density, vec![3, 3, 2]);
    }

    #[test]
    fn smallest_hypergraph() {
        let h = DirectedHypergraph::new(1, vec![Hyperedge::new([0], [])]).unwrap();
        assert_eq!(h.degrees().density, vec![1]);
        assert!(h.is_undirected());
    }

    #[test]
    fn rejects_invalid_input() {
        use HypergraphError::*;
        assert_eq!(
            DirectedHypergraph::new(1, vec![Hyperedge::new([0], [0])]),
            Err(OverlappingHeadTail { edge: 0, vertex: 0 })
        );
        assert_eq!(DirectedHypergraph::new(1, vec![Hyperedge::new([], [0])]), Err(EmptyHead { edge: 0 }));
        assert!(matches!(
            DirectedHypergraph::new(1, vec![Hyperedge::new([0], []).with_weight(1e-13)]),
            Err(NonpositiveWeight { edge: 0, .. })
        ));
        assert!(matches!(
            DirectedHypergraph::new(1, vec![Hyperedge::new([0], []).with_weight(f64::NAN)]),
            Err(NonpositiveWeight { .. })
        ));
        assert_eq!(DirectedHypergraph::new(3, vec![Hyperedge::new([0], [1])]), Err(IsolatedVertex { vertex: 2 }));
        assert_eq!(
            DirectedHypergraph::new(2, vec![Hyperedge::new([0], [1]), Hyperedge::new([5], [])]),
            Err(VertexOutOfRange { edge: 1, vertex: 5, n: 2 })
        );
        assert_eq!(DirectedHypergraph::new(0, vec![]), Err(Empty));
    }

    #[test]
    fn undirected_incidence_is_real_binary() {
        let h = worked_example().to_undirected();
        let b = h.incidence_matrix();
        let real = h.real_incidence_matrix();
        for ((v, e), z) in b.indexed_iter() {
            assert_eq!(z.im, 0.0);
            assert_eq!(z.re, real[[v, e]]);
        }
    }
}
