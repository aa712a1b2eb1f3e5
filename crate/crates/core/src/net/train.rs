//! Full-batch training with Adam and validation-based checkpointing.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{Adam, DlgModel, Hyperparams, Metrics, NetError};
use crate::data::Dataset;
use crate::dlg::{self, Operator};
use crate::hypergraph::ComplexMatrix;
use num_complex::Complex64;

/// Imaginary part given to the vertex features before the lift.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ImagFeatures {
    #[default]
    Zero,
    EqualReal,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub epochs: usize,
    pub lr: f64,
    pub weight_decay: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    pub seed: u64,
    pub conv_layers: usize,
    pub filters: usize,
    pub hidden: usize,
    pub linear_layers: usize,
    pub residual: bool,
    pub theta0_zero: bool,
    pub operator: Operator,
    /// When false, direction is discarded everywhere: real incidence for the
    /// lift and the undirected line-graph Laplacian.
    pub directed: bool,
    pub imag_features: ImagFeatures,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            epochs: 1000,
            lr: 5e-3,
            weight_decay: 5e-4,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
            seed: 0,
            conv_layers: 2,
            filters: 32,
            hidden: 32,
            linear_layers: 2,
            residual: true,
            theta0_zero: false,
            operator: Operator::Laplacian,
            directed: true,
            imag_features: ImagFeatures::Zero,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<(), NetError> {
        if self.epochs == 0 {
            return Err(NetError::InvalidConfig("epochs must be at least 1".into()));
        }
        if !(self.lr > 0.0 && self.lr.is_finite()) {
            return Err(NetError::InvalidConfig("learning rate must be positive".into()));
        }
        if !(self.weight_decay >= 0.0 && self.weight_decay.is_finite()) {
            return Err(NetError::InvalidConfig("weight decay must be nonnegative".into()));
        }
        if !(0.0..1.0).contains(&self.beta1) || !(0.0..1.0).contains(&self.beta2) || self.eps <= 0.0 {
            return Err(NetError::InvalidConfig("Adam betas must lie in [0, 1) and eps be positive".into()));
        }
        Ok(())
    }

    pub fn hyperparams(&self, input_channels: usize, classes: usize) -> Hyperparams {
        Hyperparams {
            input_channels,
            conv_layers: self.conv_layers,
            filters: self.filters,
            linear_layers: self.linear_layers,
            hidden: self.hidden,
            classes,
            residual: self.residual,
            theta0_zero: self.theta0_zero,
        }
    }
}

/// Line-graph operator and lifted hyperedge features, fixed for a whole run.
#[derive(Debug, Clone)]
pub struct PreparedGraph {
    pub operator: ComplexMatrix,
    pub features: ComplexMatrix,
}

/// Builds the operator and lifted features the config asks for.
pub fn prepare(dataset: &Dataset, cfg: &TrainConfig) -> Result<PreparedGraph, NetError> {
    let (h, mats) = if cfg.directed {
        let h = dataset.hypergraph.clone();
        let mats = dlg::directed_laplacians(&h);
        (h, mats)
    } else {
        let h = dataset.hypergraph.to_undirected();
        let mats = dlg::undirected_laplacians(&h);
        (h, mats)
    };
    let operator = match cfg.operator {
        Operator::Laplacian => mats.laplacian,
        Operator::Signless => mats.signless,
    };
    let x_nodes = dataset.node_features.mapv(|x| match cfg.imag_features {
        ImagFeatures::Zero => Complex64::new(x, 0.0),
        ImagFeatures::EqualReal => Complex64::new(x, x),
    });
    let features = super::layers::lift_complex_features(&h.incidence_matrix(), &x_nodes)?;
    Ok(PreparedGraph { operator, features })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochRecord {
    pub epoch: usize,
    pub loss: f64,
    pub train_f1: f64,
    pub val_f1: f64,
}

#[derive(Debug, Clone)]
pub struct TrainOutcome {
    /// Parameters from the epoch with the best validation macro F1.
    pub model: DlgModel,
    pub best_epoch: usize,
    pub history: Vec<EpochRecord>,
}

/// Trains on one fold of `dataset`.
pub fn train(dataset: &Dataset, fold: usize, cfg: &TrainConfig) -> Result<TrainOutcome, NetError> {
    let fold = dataset.folds.get(fold).ok_or_else(|| NetError::InvalidConfig(format!("dataset has no fold {fold}")))?;
    let graph = prepare(dataset, cfg)?;
    train_prepared(&graph, &dataset.targets(&fold.train), &dataset.targets(&fold.val), dataset.classes(), cfg)
}

/// Full-batch Adam on `train` targets, checkpointing on `val` macro F1
/// (on training F1 when `val` is empty). Metrics of epoch `k` come from the
/// forward pass that produced epoch `k`'s gradient.
pub fn train_prepared(
    graph: &PreparedGraph,
    train: &[(usize, usize)],
    val: &[(usize, usize)],
    classes: usize,
    cfg: &TrainConfig,
) -> Result<TrainOutcome, NetError> {
    cfg.validate()?;
    if train.is_empty() {
        return Err(NetError::EmptySplit);
    }
    let hp = cfg.hyperparams(graph.features.ncols(), classes);
    let mut rng = ChaCha8Rng::seed_from_u64(crate::sub_seed(cfg.seed, "init"));
    let mut model = DlgModel::init(hp, &mut rng)?;
    // Signless runs start from the function the Laplacian run starts from.
    if cfg.operator == Operator::Signless && !cfg.theta0_zero {
        model = model.reparameterized_for_signless();
    }
    let mut flat = model.to_flat();
    let mut adam = Adam::new(flat.len(), cfg.lr, cfg.beta1, cfg.beta2, cfg.eps);

    let mut best: Option<(f64, usize, DlgModel)> = None;
    let mut history = Vec::with_capacity(cfg.epochs);
    for epoch in 1..=cfg.epochs {
        let trace = model.forward(&graph.operator, &graph.features)?;
        let (loss, grads) = model.loss_and_grads(&graph.operator, &trace, train, cfg.weight_decay)?;
        let preds = trace.predictions();
        let score = |targets: &[(usize, usize)]| {
            Metrics::from_pairs(targets.iter().map(|&(e, y)| (y, preds[e])), classes).macro_f1
        };
        let train_f1 = score(train);
        let val_f1 = if val.is_empty() { train_f1 } else { score(val) };
        history.push(EpochRecord { epoch, loss, train_f1, val_f1 });
        if best.as_ref().is_none_or(|(b, _, _)| val_f1 > *b) {
            best = Some((val_f1, epoch, model.clone()));
        }
        adam.step(&mut flat, &grads.to_flat());
        model.set_flat(&flat);
    }
    let (_, best_epoch, model) = best.expect("at least one epoch");
    Ok(TrainOutcome { model, best_epoch, history })
}

/// Scores `model` on the hyperedges `ids` of `dataset`.
pub fn evaluate(
    model: &DlgModel,
    graph: &PreparedGraph,
    dataset: &Dataset,
    ids: &[usize],
) -> Result<Metrics, NetError> {
    if ids.is_empty() {
        return Err(NetError::EmptySplit);
    }
    let trace = model.forward(&graph.operator, &graph.features)?;
    let preds = trace.predictions();
    let mut metrics = Metrics::from_pairs(ids.iter().map(|&e| (dataset.labels[e], preds[e])), dataset.classes());
    let targets = dataset.targets(ids);
    let (loss, _) = model.loss_and_grads(&graph.operator, &trace, &targets, 0.0)?;
    metrics.loss = Some(loss);
    Ok(metrics)
}
