//! Seeded random hypergraphs for property sweeps.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::hypergraph::{DirectedHypergraph, Hyperedge};

/// Shape of the random hypergraphs drawn by [`random_hypergraph`].
#[derive(Debug, Clone)]
pub struct RandomHypergraph {
    pub max_vertices: usize,
    pub max_edges: usize,
    /// Largest number of vertices in one hyperedge.
    pub max_density: usize,
    /// When false every tail is empty.
    pub directed: bool,
    /// Weights are drawn uniformly from `(0, max_weight]`; `None` means unit weights.
    pub max_weight: Option<f64>,
}

impl Default for RandomHypergraph {
    fn default() -> Self {
        Self { max_vertices: 10, max_edges: 8, max_density: 5, directed: true, max_weight: Some(3.0) }
    }
}

/// Draws a valid hypergraph. Vertices that end up in no hyperedge are
/// dropped and the rest renumbered, so the result may have fewer vertices
/// than drawn.
pub fn random_hypergraph<R: Rng>(rng: &mut R, cfg: &RandomHypergraph) -> DirectedHypergraph {
    let n = rng.random_range(1..=cfg.max_vertices.max(1));
    let m = rng.random_range(1..=cfg.max_edges.max(1));
    let mut pool: Vec<usize> = (0..n).collect();
    let mut raw = Vec::with_capacity(m);
    for _ in 0..m {
        let size = rng.random_range(1..=cfg.max_density.min(n).max(1));
        pool.shuffle(rng);
        let members = &pool[..size];
        let head_len = if cfg.directed { rng.random_range(1..=size) } else { size };
        let weight = match cfg.max_weight {
            // (0, max]: 1 - [0, 1) lies in (0, 1]
            Some(max) => max * (1.0 - rng.random::<f64>()),
            None => 1.0,
        };
        raw.push((members[..head_len].to_vec(), members[head_len..].to_vec(), weight.max(1e-6)));
    }

    let mut remap = vec![usize::MAX; n];
    let mut next = 0;
    for (head, tail, _) in &raw {
        for &v in head.iter().chain(tail) {
            if remap[v] == usize::MAX {
                remap[v] = next;
                next += 1;
            }
        }
    }
    let edges = raw
        .into_iter()
        .map(|(head, tail, w)| {
            Hyperedge::new(head.into_iter().map(|v| remap[v]), tail.into_iter().map(|v| remap[v])).with_weight(w)
        })
        .collect();
    DirectedHypergraph::new(next, edges).expect("sampled hypergraph is valid by construction")
}
