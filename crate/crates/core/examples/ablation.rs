//! Directed model versus the undirected ablation on the direction-motif task.
//!
//! `cargo run --release --example ablation -- [seeds] [epochs]`

use std::time::Instant;

use dlglab::data::{generate_synthetic, make_folds, SynthConfig};
use dlglab::net::{evaluate, prepare, train_prepared, TrainConfig};

fn main() {
    let mut args = std::env::args().skip(1);
    let seeds: u64 = args.next().map_or(5, |s| s.parse().expect("seed count"));
    let epochs: usize = args.next().map_or(300, |s| s.parse().expect("epoch count"));

    for directed in [true, false] {
        let start = Instant::now();
        let mut scores = Vec::new();
        for seed in 0..seeds {
            let data = generate_synthetic(&SynthConfig { seed, ..Default::default() }).unwrap();
            let data = make_folds(&data, 2, seed).unwrap();
            let fold = &data.folds[0];
            let cfg = TrainConfig { epochs, seed, directed, ..Default::default() };
            let graph = prepare(&data, &cfg).unwrap();
            let out =
                train_prepared(&graph, &data.targets(&fold.train), &data.targets(&fold.val), data.classes(), &cfg)
                    .unwrap();
            let test = evaluate(&out.model, &graph, &data, &fold.test).unwrap();
            println!("directed={directed} seed={seed} best_epoch={} test_f1={:.2}", out.best_epoch, test.macro_f1);
            scores.push(test.macro_f1);
        }
        let mean = scores.iter().sum::<f64>() / scores.len() as f64;
        println!("directed={directed} mean_test_f1={mean:.2} ({:.1}s)", start.elapsed().as_secs_f64());
    }
}
