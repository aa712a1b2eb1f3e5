#![allow(dead_code)]

use dlglab::hypergraph::{ComplexMatrix, DirectedHypergraph};
use dlglab::net::{lift_features, DlgModel, Hyperparams};
use dlglab::sample::{random_hypergraph, RandomHypergraph};
use ndarray::Array2;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_complex(rng: &mut impl Rng, rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::from_shape_fn((rows, cols), |_| {
        Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    })
}

/// Random hypergraph with exactly `m` hyperedges.
pub fn hypergraph_with_edges(seed: u64, m: usize) -> DirectedHypergraph {
    let mut r = rng(seed);
    loop {
        let cfg = RandomHypergraph { max_vertices: 10, max_edges: m, max_density: 4, ..Default::default() };
        let h = random_hypergraph(&mut r, &cfg);
        if h.m() == m {
            return h;
        }
    }
}

pub struct GradientCheck {
    pub params: usize,
    pub worst_relative: f64,
    pub failures: usize,
}

/// Compares every analytic gradient entry of a randomly initialized model
/// against central differences with step `h`. An entry passes when the
/// absolute error is at most `floor` or the relative error is below `rel_tol`.
/// Frozen parameters are skipped.
pub fn gradient_check(
    hp: Hyperparams,
    h_graph: &DirectedHypergraph,
    seed: u64,
    step: f64,
    rel_tol: f64,
    floor: f64,
) -> GradientCheck {
    let mut r = rng(seed);
    let op = dlglab::directed_laplacians(h_graph).laplacian;
    let x_nodes = Array2::from_shape_fn((h_graph.n(), hp.input_channels), |_| r.random_range(-1.0..1.0));
    let x = lift_features(&h_graph.incidence_matrix(), &x_nodes).unwrap();
    let classes = hp.classes;
    let model = DlgModel::init(hp, &mut r).unwrap();
    let targets: Vec<(usize, usize)> = (0..h_graph.m()).map(|e| (e, r.random_range(0..classes))).collect();
    let wd = 1e-2;

    let loss_at = |m: &DlgModel| {
        let trace = m.forward(&op, &x).unwrap();
        m.loss_and_grads(&op, &trace, &targets, wd).unwrap().0
    };
    let trace = model.forward(&op, &x).unwrap();
    let (_, grads) = model.loss_and_grads(&op, &trace, &targets, wd).unwrap();
    let analytic = grads.to_flat();
    let base = model.to_flat();
    let trainable = model.trainable_mask();

    let mut probe = model.clone();
    let mut worst: f64 = 0.0;
    let mut failures = 0;
    for k in (0..base.len()).filter(|&k| trainable[k]) {
        let mut p = base.clone();
        p[k] = base[k] + step;
        probe.set_flat(&p);
        let up = loss_at(&probe);
        p[k] = base[k] - step;
        probe.set_flat(&p);
        let down = loss_at(&probe);
        let numeric = (up - down) / (2.0 * step);
        let abs = (numeric - analytic[k]).abs();
        let scale = numeric.abs().max(analytic[k].abs());
        let rel = if scale > 0.0 { abs / scale } else { 0.0 };
        if scale > floor {
            worst = worst.max(rel);
        }
        if abs > floor && rel >= rel_tol {
            failures += 1;
        }
    }
    GradientCheck { params: base.len(), worst_relative: worst, failures }
}
