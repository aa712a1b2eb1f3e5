//! Dataset, fold, matrix and model files: write, read back, compare.

use dlglab::cli::{build_matrix, matrix_csv, parse_matrix_csv, MatrixKind};
use dlglab::data::{generate_synthetic, make_folds, parse_dataset, read_folds, write_folds, SynthConfig};
use dlglab::net::{DlgModel, TrainConfig};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let dir = std::env::temp_dir().join("dlglab-dataset-files");
    std::fs::create_dir_all(&dir).unwrap();

    let data = generate_synthetic(&SynthConfig { per_class: 20, seed: 3, ..Default::default() }).unwrap();
    let data = make_folds(&data, 3, 3).unwrap();
    let path = dir.join("synthetic.json");
    data.write(&path).unwrap();
    let back = parse_dataset(&path).unwrap();
    println!(
        "{}: {} vertices, {} hyperedges, identical after reload: {}",
        path.display(),
        back.hypergraph.n(),
        back.hypergraph.m(),
        back == data
    );

    let folds = dir.join("folds.json");
    write_folds(&data.folds, &folds).unwrap();
    println!("{}: {} folds", folds.display(), read_folds(&folds, data.hypergraph.m()).unwrap().len());

    let laplacian = build_matrix(&data, MatrixKind::Laplacian);
    let csv = matrix_csv(&laplacian);
    let exact = parse_matrix_csv(&csv, data.hypergraph.m()).unwrap() == laplacian;
    println!("laplacian CSV: {} rows, exact round trip: {exact}", csv.lines().count() - 1);

    let cfg = TrainConfig::default();
    let model = DlgModel::init(cfg.hyperparams(8, 3), &mut ChaCha8Rng::seed_from_u64(0)).unwrap();
    for name in ["model.json", "model.bin"] {
        let p = dir.join(name);
        model.save(&p).unwrap();
        println!(
            "{}: {} bytes, identical after reload: {}",
            p.display(),
            std::fs::metadata(&p).unwrap().len(),
            DlgModel::load(&p).unwrap() == model
        );
    }
}
