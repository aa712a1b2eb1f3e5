//! Spectral checks on seeded random directed hypergraphs: Hermitian
//! structure, spectrum in [0, 1] and the Dirichlet energy identity.
//!
//! `cargo run --release --example spectral_checks -- [count] [seed]`

use dlglab::sample::{random_hypergraph, RandomHypergraph};
use dlglab::verify_hypergraph;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let mut args = std::env::args().skip(1);
    let count: usize = args.next().map_or(20, |s| s.parse().expect("count"));
    let seed: u64 = args.next().map_or(0, |s| s.parse().expect("seed"));

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cfg = RandomHypergraph { max_vertices: 16, max_edges: 24, ..Default::default() };
    let mut failures = 0;
    for k in 0..count {
        let h = random_hypergraph(&mut rng, &cfg);
        let report = verify_hypergraph(&h, 10, seed + k as u64).expect("eigensolver converges");
        println!(
            "#{k:<3} n={:<3} m={:<3} λ ∈ [{:+.2e}, {:.6}]  dirichlet residual {:.1e}  {}",
            h.n(),
            h.m(),
            report.eigenvalues.first().unwrap(),
            report.eigenvalues.last().unwrap(),
            report.dirichlet_residual,
            if report.passed { "ok" } else { "FAILED" }
        );
        failures += usize::from(!report.passed);
    }
    println!("{failures} of {count} failed");
}
