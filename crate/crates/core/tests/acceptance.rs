//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero when any non-informational criterion fails.

mod common;

use std::time::{Duration, Instant};

use dlglab::data::{generate_synthetic, make_folds, SynthConfig};
use dlglab::dlg::{self, max_abs_diff, undirected_laplacians};
use dlglab::hypergraph::{worked_example, ComplexMatrix};
use dlglab::net::{conv_pre, evaluate, prepare, train_prepared, DlgModel, Hyperparams, TrainConfig};
use dlglab::sample::{random_hypergraph, RandomHypergraph};
use dlglab::spectral::{dirichlet_energy, eig_hermitian, random_unit_signal, raw_quadratic_form};
use num_complex::Complex64;
use rayon::prelude::*;

type Criterion<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);

struct Outcome {
    passed: bool,
    detail: String,
    informational: bool,
}

fn outcome(passed: bool, detail: String) -> Outcome {
    Outcome { passed, detail, informational: false }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn directed_sweep() -> Vec<dlglab::DirectedHypergraph> {
    let cfg =
        RandomHypergraph { max_vertices: 24, max_edges: 64, max_density: 6, directed: true, max_weight: Some(3.0) };
    let mut rng = common::rng(2024);
    (0..100).map(|_| random_hypergraph(&mut rng, &cfg)).collect()
}

fn golden(budget: Duration) -> Outcome {
    let start = Instant::now();
    let h = worked_example();
    let d = dlg::directed_laplacians(&h);
    let expected_a = ComplexMatrix::from_shape_vec(
        (3, 3),
        vec![c(0., 0.), c(1., 1.), c(0., 0.), c(1., -1.), c(0., 0.), c(1., 0.), c(0., 0.), c(1., 0.), c(0., 0.)],
    )
    .unwrap();
    let printed = [
        [c(0.333, 0.), c(-0.167, -0.167), c(0., 0.)],
        [c(-0.167, 0.167), c(0.5, 0.), c(-0.204, 0.)],
        [c(0., 0.), c(-0.204, 0.), c(0.25, 0.)],
    ];
    let mut worst: f64 = 0.0;
    for (i, row) in printed.iter().enumerate() {
        for (j, p) in row.iter().enumerate() {
            let z = d.laplacian[[i, j]] - p;
            worst = worst.max(z.re.abs()).max(z.im.abs());
        }
    }
    let elapsed = start.elapsed();
    let exact = d.adjacency == expected_a;
    outcome(
        exact && worst <= 5e-4 && elapsed < budget,
        format!("adjacency exact: {exact}, max deviation from printed Laplacian {worst:.2e}, {elapsed:.2?}"),
    )
}

fn undirected_reduction(budget: Duration) -> Outcome {
    let start = Instant::now();
    let cfg =
        RandomHypergraph { max_vertices: 12, max_edges: 8, max_density: 5, directed: false, max_weight: Some(3.0) };
    let mut rng = common::rng(7);
    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        let h = random_hypergraph(&mut rng, &cfg);
        let d = dlg::directed_laplacians(&h);
        let u = undirected_laplacians(&h);
        worst = worst.max(max_abs_diff(&d.laplacian, &u.laplacian)).max(max_abs_diff(&d.signless, &u.signless));
    }
    let elapsed = start.elapsed();
    outcome(worst < 1e-12 && elapsed < budget, format!("200 hypergraphs, max residual {worst:.2e}, {elapsed:.2?}"))
}

fn dirichlet(sweep: &[dlglab::DirectedHypergraph], budget: Duration) -> Outcome {
    let start = Instant::now();
    let mut rng = common::rng(11);
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for h in sweep {
        let l = dlg::directed_laplacians(h).laplacian;
        for _ in 0..10 {
            let x = random_unit_signal(&mut rng, h.m());
            let energy = dirichlet_energy(h, &x).unwrap();
            let form = raw_quadratic_form(&l, &x);
            worst = worst.max((form - c(energy, 0.0)).norm());
            count += 1;
        }
    }
    let elapsed = start.elapsed();
    outcome(worst < 1e-9 && elapsed < budget, format!("{count} signals, max residual {worst:.2e}, {elapsed:.2?}"))
}

fn spectral_bounds(sweep: &[dlglab::DirectedHypergraph], budget: Duration) -> Outcome {
    let start = Instant::now();
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    let mut max_m = 0;
    for h in sweep {
        max_m = max_m.max(h.m());
        let d = dlg::directed_laplacians(h);
        for mat in [&d.laplacian, &d.signless] {
            let (vals, _) = eig_hermitian(mat).unwrap();
            lo = lo.min(vals[0]);
            hi = hi.max(*vals.last().unwrap());
        }
    }
    let elapsed = start.elapsed();
    outcome(
        lo >= -1e-9 && hi <= 1.0 + 1e-9 && elapsed < budget,
        format!("eigenvalues in [{lo:.3e}, {hi:.12}], largest m {max_m}, {elapsed:.2?}"),
    )
}

fn signless_equivalence() -> Outcome {
    let mut rng = common::rng(5);
    let mut worst: f64 = 0.0;
    for trial in 0..50 {
        let h = common::hypergraph_with_edges(100 + trial, 8);
        let d = dlg::directed_laplacians(&h);
        let x = common::random_complex(&mut rng, h.m(), 3);
        let t0 = common::random_complex(&mut rng, 3, 4);
        let t1 = common::random_complex(&mut rng, 3, 4);
        let a = conv_pre(&d.laplacian, &x, &t0, &t1, false).unwrap();
        let b = conv_pre(&d.signless, &x, &(&t0 + &t1), &t1.mapv(|z| -z), false).unwrap();
        worst = worst.max((&a - &b).iter().map(|z| z.re.abs().max(z.im.abs())).fold(0.0, f64::max));
    }
    outcome(worst < 1e-10, format!("50 draws, max element-wise difference {worst:.2e}"))
}

fn gradient() -> Outcome {
    let hp = Hyperparams {
        input_channels: 3,
        conv_layers: 2,
        filters: 4,
        linear_layers: 2,
        hidden: 6,
        classes: 3,
        residual: true,
        theta0_zero: false,
    };
    let h = common::hypergraph_with_edges(42, 8);
    let check = common::gradient_check(hp, &h, 42, 1e-5, 1e-4, 1e-8);
    outcome(
        check.failures == 0,
        format!(
            "{} parameters, {} failures, worst relative error {:.2e}",
            check.params, check.failures, check.worst_relative
        ),
    )
}

fn ablation(budget: Duration) -> Outcome {
    let start = Instant::now();
    let jobs: Vec<(u64, bool)> = (0..5).flat_map(|s| [(s, true), (s, false)]).collect();
    let scores: Vec<(u64, bool, f64)> = jobs
        .par_iter()
        .map(|&(seed, directed)| {
            let data = generate_synthetic(&SynthConfig { seed, ..Default::default() }).unwrap();
            let data = make_folds(&data, 5, seed).unwrap();
            let fold = &data.folds[0];
            let cfg = TrainConfig { seed, directed, ..Default::default() };
            let graph = prepare(&data, &cfg).unwrap();
            let out =
                train_prepared(&graph, &data.targets(&fold.train), &data.targets(&fold.val), data.classes(), &cfg)
                    .unwrap();
            (seed, directed, evaluate(&out.model, &graph, &data, &fold.test).unwrap().macro_f1)
        })
        .collect();
    let mean = |d: bool| scores.iter().filter(|s| s.1 == d).map(|s| s.2).sum::<f64>() / 5.0;
    let (dir, undir) = (mean(true), mean(false));
    let elapsed = start.elapsed();
    outcome(
        dir >= 90.0 && dir - undir >= 10.0 && elapsed < budget,
        format!("mean test macro-F1 directed {dir:.2}, undirected {undir:.2}, gap {:.2}, {elapsed:.1?}", dir - undir),
    )
}

fn separable() -> Outcome {
    let mut details = Vec::new();
    let mut passed = true;
    for seed in 0..3 {
        let data = generate_synthetic(&SynthConfig::separable(seed)).unwrap();
        let cfg = TrainConfig { epochs: 200, seed, ..Default::default() };
        let graph = prepare(&data, &cfg).unwrap();
        let all: Vec<usize> = (0..data.hypergraph.m()).collect();
        let run = || train_prepared(&graph, &data.targets(&all), &[], data.classes(), &cfg).unwrap();
        let (a, b) = (run(), run());
        let first = a.history.iter().find(|r| r.train_f1 == 100.0).map(|r| r.epoch);
        let deterministic = a.history == b.history && a.model == b.model;
        passed &= first.is_some() && deterministic;
        details.push(format!("seed {seed}: 100 at epoch {first:?}, deterministic {deterministic}"));
    }
    outcome(passed, details.join("; "))
}

fn forward_time(m_per_class: usize) -> (usize, Duration) {
    let data = generate_synthetic(&SynthConfig { classes: 2, per_class: m_per_class, ..Default::default() }).unwrap();
    let cfg = TrainConfig::default();
    let graph = prepare(&data, &cfg).unwrap();
    let model = DlgModel::init(cfg.hyperparams(graph.features.ncols(), 2), &mut common::rng(1)).unwrap();
    model.forward(&graph.operator, &graph.features).unwrap();
    let mut times: Vec<Duration> = (0..9)
        .map(|_| {
            let start = Instant::now();
            let trace = model.forward(&graph.operator, &graph.features).unwrap();
            std::hint::black_box(trace.conv_output());
            start.elapsed()
        })
        .collect();
    times.sort();
    (data.hypergraph.m(), times[times.len() / 2])
}

fn complexity() -> Outcome {
    let (m_small, t_small) = forward_time(128);
    let (m_large, t_large) = forward_time(256);
    let ratio = t_large.as_secs_f64() / t_small.as_secs_f64();
    Outcome {
        passed: ratio <= 5.0,
        detail: format!("forward m={m_large} {t_large:.2?} vs m={m_small} {t_small:.2?}, ratio {ratio:.2}"),
        informational: true,
    }
}

fn main() {
    let sweep = directed_sweep();
    let criteria: Vec<Criterion> = vec![
        ("1 worked example golden matrices", Box::new(|| golden(Duration::from_secs(1)))),
        (
            "2 undirected hypergraphs reduce to the undirected Laplacian",
            Box::new(|| undirected_reduction(Duration::from_secs(10))),
        ),
        ("3 Dirichlet energy equals the quadratic form", Box::new(|| dirichlet(&sweep, Duration::from_secs(30)))),
        (
            "4 spectra of Laplacian and signless Laplacian in [0, 1]",
            Box::new(|| spectral_bounds(&sweep, Duration::from_secs(60))),
        ),
        ("5 signless operator reparameterization", Box::new(signless_equivalence)),
        ("6 analytic gradients match central differences", Box::new(gradient)),
        ("7 directionality ablation", Box::new(|| ablation(Duration::from_secs(600)))),
        ("8 separable task reaches train macro-F1 100", Box::new(separable)),
        ("9 convolution forward time scaling", Box::new(complexity)),
    ];
    let mut failed = 0;
    for (name, run) in &criteria {
        let out = run();
        let status = match (out.passed, out.informational) {
            (true, _) => "PASS",
            (false, true) => "FAIL (informational)",
            (false, false) => "FAIL",
        };
        println!("{status} [{name}] {}", out.detail);
        if !out.passed && !out.informational {
            failed += 1;
        }
    }
    if failed > 0 {
        eprintln!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
