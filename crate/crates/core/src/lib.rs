//! Directed line graphs of directed hypergraphs.
//!
//! * [`hypergraph`]: validated weighted directed hypergraphs, complex incidence and degrees.
//! * [`dlg`]: line-graph adjacency and the Hermitian (signless) Laplacians, directed and undirected.
//! * [`spectral`]: Hermitian eigensolver, Dirichlet energy and spectral checks.
//! * [`net`]: the complex spectral convolution network for hyperedge classification.
//! * [`data`]: dataset files, synthetic generators and stratified splits.
//! * [`cli`]: the command implementations behind the `dlglab` binary.

pub mod cli;
pub mod data;
pub mod dlg;
pub mod hypergraph;
pub mod net;
pub mod sample;
pub mod spectral;

pub use dlg::{directed_laplacians, dlg_adjacency, undirected_laplacian, DlgMatrices, Operator};
pub use hypergraph::{ComplexMatrix, DegreeVectors, DirectedHypergraph, Hyperedge, HypergraphError};
pub use spectral::{eig_hermitian, verify_hypergraph, SpectrumReport};

/// Derives an independent seed for a named random stream from a master seed.
pub fn sub_seed(seed: u64, stream: &str) -> u64 {
    // FNV-1a over the stream name, then a splitmix64 finalizer.
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in stream.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    let mut z = seed ^ h;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
