//! A model on the Laplacian and its reparameterization on the signless
//! Laplacian compute the same function.

use dlglab::data::{generate_synthetic, SynthConfig};
use dlglab::net::{prepare, DlgModel, TrainConfig};
use dlglab::Operator;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let data = generate_synthetic(&SynthConfig { per_class: 20, ..Default::default() }).unwrap();
    let base = TrainConfig::default();
    let l = prepare(&data, &base).unwrap();
    let q = prepare(&data, &TrainConfig { operator: Operator::Signless, ..base.clone() }).unwrap();

    let model = DlgModel::init(base.hyperparams(l.features.ncols(), data.classes()), &mut ChaCha8Rng::seed_from_u64(0))
        .unwrap();
    let twin = model.reparameterized_for_signless();
    let a = model.forward(&l.operator, &l.features).unwrap();
    let b = twin.forward(&q.operator, &q.features).unwrap();
    let diff = (&a.logits - &b.logits).iter().fold(0.0f64, |acc, x| acc.max(x.abs()));
    println!("max logit difference between the two parameterizations: {diff:.2e}");
}
