//! Five-fold training on a generated direction-motif dataset, reported as
//! mean ± standard deviation of the test macro F1.
//!
//! `cargo run --release --example train_synthetic -- [epochs]`

use dlglab::cli::{mean_std, run_folds};
use dlglab::data::{generate_synthetic, make_folds, SynthConfig};
use dlglab::net::TrainConfig;

fn main() {
    let epochs: usize = std::env::args().nth(1).map_or(200, |s| s.parse().expect("epochs"));
    let data = generate_synthetic(&SynthConfig { per_class: 100, ..Default::default() }).unwrap();
    let data = make_folds(&data, 5, 0).unwrap();
    let cfg = TrainConfig { epochs, ..Default::default() };

    let results = run_folds(&data, &cfg).unwrap();
    for (r, _) in &results {
        println!("fold {}: best epoch {:>4}, test macro-F1 {:.2}", r.fold, r.best_epoch, r.test.macro_f1);
    }
    let f1: Vec<f64> = results.iter().map(|(r, _)| r.test.macro_f1).collect();
    let (mean, std) = mean_std(&f1);
    println!("test macro-F1 {mean:.2} ± {std:.2}");
    print!("{}", results[0].0.test.confusion_csv(&data.class_names));
}
