//! The directed line graph network: feature lift, complex spectral
//! convolutions with residual connections, unwind, and a real linear head.
//!
//! Complex parameters are trained as independent (real, imaginary) pairs.
//! Gradients of the real loss with respect to a complex tensor `Z` are
//! stored as `∂/∂Re Z + i ∂/∂Im Z`.

mod adam;
mod io;
pub mod layers;
pub mod metrics;
mod train;

use ndarray::{Array1, Array2, Axis};
use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::hypergraph::ComplexMatrix;

pub use adam::Adam;
pub use io::ModelFormatError;
pub use layers::{complex_relu, conv_forward, conv_pre, lift_complex_features, lift_features, softmax, unwind};
pub use metrics::{macro_f1, ClassScores, Metrics};
pub use train::{
    evaluate, prepare, train, train_prepared, EpochRecord, ImagFeatures, PreparedGraph, TrainConfig, TrainOutcome,
};

#[derive(Debug, Error)]
pub enum NetError {
    #[error("{what}: expected shape {expected:?}, got {got:?}")]
    ShapeMismatch { what: &'static str, expected: (usize, usize), got: (usize, usize) },
    #[error("residual connection needs equal widths, got {c_in} -> {c_out}")]
    ResidualWidthMismatch { c_in: usize, c_out: usize },
    #[error("split is empty")]
    EmptySplit,
    #[error("label {label} out of range for {classes} classes")]
    InvalidLabel { label: usize, classes: usize },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

/// Architecture of a [`DlgModel`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Hyperparams {
    /// Channels of the lifted hyperedge features.
    pub input_channels: usize,
    /// Number of convolution layers.
    pub conv_layers: usize,
    /// Output channels of every convolution layer.
    pub filters: usize,
    /// Number of linear layers in the head.
    pub linear_layers: usize,
    /// Width of the hidden linear layers.
    pub hidden: usize,
    pub classes: usize,
    /// Residual connection on every convolution layer but the first.
    pub residual: bool,
    /// Keep `Θ0` fixed at zero.
    pub theta0_zero: bool,
}

impl Hyperparams {
    pub fn validate(&self) -> Result<(), NetError> {
        let positive = [
            ("input_channels", self.input_channels),
            ("conv_layers", self.conv_layers),
            ("filters", self.filters),
            ("linear_layers", self.linear_layers),
            ("hidden", self.hidden),
            ("classes", self.classes),
        ];
        for (name, v) in positive {
            if v == 0 {
                return Err(NetError::InvalidConfig(format!("{name} must be at least 1")));
            }
        }
        Ok(())
    }

    fn linear_dims(&self) -> Vec<(usize, usize)> {
        let mut dims = Vec::with_capacity(self.linear_layers);
        let mut width = 2 * self.filters;
        for s in 0..self.linear_layers {
            let out = if s + 1 == self.linear_layers { self.classes } else { self.hidden };
            dims.push((width, out));
            width = out;
        }
        dims
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvLayer {
    pub theta0: ComplexMatrix,
    pub theta1: ComplexMatrix,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearLayer {
    /// `in × out`.
    pub weight: Array2<f64>,
    pub bias: Array1<f64>,
}

/// Learned parameters. Also used to hold gradients of the same shape.
#[derive(Debug, Clone, PartialEq)]
pub struct DlgModel {
    pub hp: Hyperparams,
    pub conv: Vec<ConvLayer>,
    pub linear: Vec<LinearLayer>,
}

/// Cached intermediate values of one forward pass.
#[derive(Debug, Clone)]
pub struct ForwardTrace {
    /// Input to each convolution layer.
    conv_inputs: Vec<ComplexMatrix>,
    /// `L X` for each convolution layer.
    conv_propagated: Vec<ComplexMatrix>,
    /// Pre-activation of each convolution layer.
    conv_pre: Vec<ComplexMatrix>,
    /// Input to each linear layer (the first is the unwound conv output).
    linear_inputs: Vec<Array2<f64>>,
    pub logits: Array2<f64>,
    pub probs: Array2<f64>,
}

impl ForwardTrace {
    /// Output of the last convolution layer.
    pub fn conv_output(&self) -> ComplexMatrix {
        let last = self.conv_pre.last().expect("at least one conv layer");
        layers::complex_relu(last)
    }

    pub fn predictions(&self) -> Vec<usize> {
        self.logits
            .rows()
            .into_iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .fold((0, f64::NEG_INFINITY), |best, (k, &v)| if v > best.1 { (k, v) } else { best })
                    .0
            })
            .collect()
    }
}

fn uniform_complex<R: Rng>(rng: &mut R, rows: usize, cols: usize) -> ComplexMatrix {
    let bound = (6.0 / (rows + cols) as f64).sqrt();
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    Array2::from_shape_fn((rows, cols), |_| {
        Complex64::new(rng.random_range(-bound..=bound) * scale, rng.random_range(-bound..=bound) * scale)
    })
}

impl DlgModel {
    /// Glorot-style uniform initialization; complex entries split the
    /// variance evenly between the real and imaginary parts.
    pub fn init<R: Rng>(hp: Hyperparams, rng: &mut R) -> Result<Self, NetError> {
        hp.validate()?;
        let mut conv = Vec::with_capacity(hp.conv_layers);
        let mut width = hp.input_channels;
        for _ in 0..hp.conv_layers {
            let theta0 = if hp.theta0_zero {
                ComplexMatrix::zeros((width, hp.filters))
            } else {
                uniform_complex(rng, width, hp.filters)
            };
            let theta1 = uniform_complex(rng, width, hp.filters);
            conv.push(ConvLayer { theta0, theta1 });
            width = hp.filters;
        }
        let linear = hp
            .linear_dims()
            .into_iter()
            .map(|(i, o)| {
                let bound = (6.0 / (i + o) as f64).sqrt();
                LinearLayer {
                    weight: Array2::from_shape_fn((i, o), |_| rng.random_range(-bound..=bound)),
                    bias: Array1::zeros(o),
                }
            })
            .collect();
        Ok(Self { hp, conv, linear })
    }

    /// All parameters set to zero.
    pub fn zeros(hp: Hyperparams) -> Result<Self, NetError> {
        hp.validate()?;
        Ok(Self::zeros_unchecked(hp))
    }

    fn zeros_unchecked(hp: Hyperparams) -> Self {
        let mut conv = Vec::with_capacity(hp.conv_layers);
        let mut width = hp.input_channels;
        for _ in 0..hp.conv_layers {
            conv.push(ConvLayer {
                theta0: ComplexMatrix::zeros((width, hp.filters)),
                theta1: ComplexMatrix::zeros((width, hp.filters)),
            });
            width = hp.filters;
        }
        let linear = hp
            .linear_dims()
            .into_iter()
            .map(|(i, o)| LinearLayer { weight: Array2::zeros((i, o)), bias: Array1::zeros(o) })
            .collect();
        Self { hp, conv, linear }
    }

    /// The model that, run on the signless operator `Q = I - L`, computes
    /// exactly what `self` computes on `L`: `Θ0' = Θ0 + Θ1`, `Θ1' = -Θ1`.
    pub fn reparameterized_for_signless(&self) -> Self {
        let mut out = self.clone();
        for layer in &mut out.conv {
            layer.theta0 = &layer.theta0 + &layer.theta1;
            layer.theta1 = layer.theta1.mapv(|z| -z);
        }
        out
    }

    fn uses_residual(&self, layer: usize) -> bool {
        self.hp.residual && layer > 0
    }

    pub fn param_count(&self) -> usize {
        let conv: usize = self.conv.iter().map(|l| 2 * (l.theta0.len() + l.theta1.len())).sum();
        let lin: usize = self.linear.iter().map(|l| l.weight.len() + l.bias.len()).sum();
        conv + lin
    }

    /// Flattens parameters: for each conv layer `Θ0` then `Θ1` as
    /// interleaved (re, im); then each linear layer's weight and bias.
    pub fn to_flat(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.param_count());
        for l in &self.conv {
            for z in l.theta0.iter().chain(l.theta1.iter()) {
                out.push(z.re);
                out.push(z.im);
            }
        }
        for l in &self.linear {
            out.extend(l.weight.iter());
            out.extend(l.bias.iter());
        }
        out
    }

    /// Inverse of [`DlgModel::to_flat`].
    pub fn set_flat(&mut self, flat: &[f64]) {
        assert_eq!(flat.len(), self.param_count(), "flat parameter length");
        let mut it = flat.iter().copied();
        for l in &mut self.conv {
            for z in l.theta0.iter_mut().chain(l.theta1.iter_mut()) {
                let re = it.next().unwrap();
                let im = it.next().unwrap();
                *z = Complex64::new(re, im);
            }
        }
        for l in &mut self.linear {
            for w in l.weight.iter_mut().chain(l.bias.iter_mut()) {
                *w = it.next().unwrap();
            }
        }
    }

    /// Per flat entry: does weight decay apply. Biases are not decayed.
    pub fn decay_mask(&self) -> Vec<bool> {
        let mut out = Vec::with_capacity(self.param_count());
        for l in &self.conv {
            out.resize(out.len() + 2 * (l.theta0.len() + l.theta1.len()), true);
        }
        for l in &self.linear {
            out.resize(out.len() + l.weight.len(), true);
            out.resize(out.len() + l.bias.len(), false);
        }
        out
    }

    /// Per flat entry: is the parameter trained. `Θ0` is frozen at zero
    /// when `theta0_zero` is set.
    pub fn trainable_mask(&self) -> Vec<bool> {
        let mut out = Vec::with_capacity(self.param_count());
        for l in &self.conv {
            out.resize(out.len() + 2 * l.theta0.len(), !self.hp.theta0_zero);
            out.resize(out.len() + 2 * l.theta1.len(), true);
        }
        out.resize(self.param_count(), true);
        out
    }

    /// Sum of squared moduli of all decayed parameters.
    fn decayed_norm_sqr(&self) -> f64 {
        let conv: f64 =
            self.conv.iter().flat_map(|l| l.theta0.iter().chain(l.theta1.iter())).map(|z| z.norm_sqr()).sum();
        let lin: f64 = self.linear.iter().flat_map(|l| l.weight.iter()).map(|w| w * w).sum();
        conv + lin
    }

    /// Runs the network on lifted hyperedge features `x` (m × c0) with
    /// line-graph operator `op` (m × m).
    pub fn forward(&self, op: &ComplexMatrix, x: &ComplexMatrix) -> Result<ForwardTrace, NetError> {
        if x.ncols() != self.hp.input_channels {
            return Err(NetError::ShapeMismatch {
                what: "hyperedge features",
                expected: (x.nrows(), self.hp.input_channels),
                got: x.dim(),
            });
        }
        let mut conv_inputs = Vec::with_capacity(self.conv.len());
        let mut conv_propagated = Vec::with_capacity(self.conv.len());
        let mut conv_pre = Vec::with_capacity(self.conv.len());
        let mut h = x.clone();
        for (k, layer) in self.conv.iter().enumerate() {
            let (pre, lx) = layers::conv_preactivation(op, &h, &layer.theta0, &layer.theta1, self.uses_residual(k))?;
            let next = layers::complex_relu(&pre);
            conv_inputs.push(std::mem::replace(&mut h, next));
            conv_propagated.push(lx);
            conv_pre.push(pre);
        }

        let mut linear_inputs = Vec::with_capacity(self.linear.len());
        let mut u = layers::unwind(&h);
        let last = self.linear.len() - 1;
        let mut logits = Array2::zeros((0, 0));
        for (s, layer) in self.linear.iter().enumerate() {
            let out = u.dot(&layer.weight) + &layer.bias;
            linear_inputs.push(u);
            if s == last {
                logits = out;
                u = Array2::zeros((0, 0));
            } else {
                u = out.mapv(|v| v.max(0.0));
            }
        }
        let probs = layers::softmax(&logits);
        Ok(ForwardTrace { conv_inputs, conv_propagated, conv_pre, linear_inputs, logits, probs })
    }

    /// Lifts vertex features through the incidence matrix `b` and runs
    /// [`DlgModel::forward`].
    pub fn forward_nodes(
        &self,
        op: &ComplexMatrix,
        x_nodes: &Array2<f64>,
        b: &ComplexMatrix,
    ) -> Result<ForwardTrace, NetError> {
        let x = layers::lift_features(b, x_nodes)?;
        self.forward(op, &x)
    }

    /// Mean cross-entropy over `targets` (hyperedge id, class) plus
    /// `weight_decay / 2` times the squared norm of all non-bias parameters,
    /// and its gradient with respect to every parameter.
    pub fn loss_and_grads(
        &self,
        op: &ComplexMatrix,
        trace: &ForwardTrace,
        targets: &[(usize, usize)],
        weight_decay: f64,
    ) -> Result<(f64, DlgModel), NetError> {
        if targets.is_empty() {
            return Err(NetError::EmptySplit);
        }
        let classes = self.hp.classes;
        let inv = 1.0 / targets.len() as f64;

        // dLoss/dlogits = (p - onehot) / |targets| on labeled rows.
        let mut g_out = Array2::<f64>::zeros(trace.logits.dim());
        let mut ce = 0.0;
        for &(row, label) in targets {
            if label >= classes {
                return Err(NetError::InvalidLabel { label, classes });
            }
            let logits = trace.logits.row(row);
            let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let lse = max + logits.iter().map(|v| (v - max).exp()).sum::<f64>().ln();
            ce += lse - logits[label];
            for k in 0..classes {
                g_out[[row, k]] += trace.probs[[row, k]] * inv;
            }
            g_out[[row, label]] -= inv;
        }
        let loss = ce * inv + 0.5 * weight_decay * self.decayed_norm_sqr();

        let mut grads = DlgModel::zeros_unchecked(self.hp.clone());

        // Linear head, last layer first.
        let mut g = g_out;
        for s in (0..self.linear.len()).rev() {
            let layer = &self.linear[s];
            let input = &trace.linear_inputs[s];
            grads.linear[s].weight = input.t().dot(&g) + &(&layer.weight * weight_decay);
            grads.linear[s].bias = g.sum_axis(Axis(0));
            let mut g_in = g.dot(&layer.weight.t());
            if s > 0 {
                // input = relu(previous pre-activation); input > 0 marks the active units
                g_in.zip_mut_with(input, |gi, &x| {
                    if x <= 0.0 {
                        *gi = 0.0;
                    }
                });
            }
            g = g_in;
        }

        // Back through unwind and the convolution stack.
        let mut g_z = layers::rewind(&g);
        let op_h = op.t().mapv(|z| z.conj());
        let zero = Complex64::new(0.0, 0.0);
        for k in (0..self.conv.len()).rev() {
            let layer = &self.conv[k];
            let mut g_pre = g_z;
            g_pre.zip_mut_with(&trace.conv_pre[k], |gp, p| {
                if p.re < 0.0 {
                    *gp = zero;
                }
            });
            let x_h = trace.conv_inputs[k].t().mapv(|z| z.conj());
            let lx_h = trace.conv_propagated[k].t().mapv(|z| z.conj());
            grads.conv[k].theta0 = if self.hp.theta0_zero {
                ComplexMatrix::zeros(layer.theta0.dim())
            } else {
                x_h.dot(&g_pre) + &layer.theta0.mapv(|z| z * weight_decay)
            };
            grads.conv[k].theta1 = lx_h.dot(&g_pre) + &layer.theta1.mapv(|z| z * weight_decay);
            if k == 0 {
                break;
            }
            let t0_h = layer.theta0.t().mapv(|z| z.conj());
            let t1_h = layer.theta1.t().mapv(|z| z.conj());
            let mut g_x = g_pre.dot(&t0_h) + op_h.dot(&g_pre.dot(&t1_h));
            if self.uses_residual(k) {
                g_x += &g_pre;
            }
            g_z = g_x;
        }
        Ok((loss, grads))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dlg::directed_laplacians;
    use crate::hypergraph::worked_example;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn hp(classes: usize) -> Hyperparams {
        Hyperparams {
            input_channels: 2,
            conv_layers: 2,
            filters: 3,
            linear_layers: 2,
            hidden: 4,
            classes,
            residual: true,
            theta0_zero: false,
        }
    }

    fn features() -> Array2<f64> {
        Array2::from_shape_fn((5, 2), |(i, j)| (i as f64 + 1.0) * if j == 0 { 0.3 } else { -0.2 })
    }

    #[test]
    fn zero_model_gives_uniform_probabilities() {
        let h = worked_example();
        let l = directed_laplacians(&h).laplacian;
        let model = DlgModel::zeros(hp(4)).unwrap();
        let trace = model.forward_nodes(&l, &features(), &h.incidence_matrix()).unwrap();
        assert!(trace.probs.iter().all(|p| (p - 0.25).abs() < 1e-15));
    }

    #[test]
    fn forward_is_deterministic_per_seed() {
        let h = worked_example();
        let l = directed_laplacians(&h).laplacian;
        let run = || {
            let mut rng = ChaCha8Rng::seed_from_u64(11);
            let model = DlgModel::init(hp(3), &mut rng).unwrap();
            model.forward_nodes(&l, &features(), &h.incidence_matrix()).unwrap().logits
        };
        assert_eq!(run(), run());
    }

    #[test]
    fn flat_round_trip_and_masks() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let model = DlgModel::init(hp(3), &mut rng).unwrap();
        let flat = model.to_flat();
        assert_eq!(flat.len(), model.param_count());
        let mut copy = DlgModel::zeros(hp(3)).unwrap();
        copy.set_flat(&flat);
        assert_eq!(copy, model);
        let mask = model.decay_mask();
        assert_eq!(mask.len(), flat.len());
        // biases of the two linear layers: 4 + 3
        assert_eq!(mask.iter().filter(|m| !**m).count(), 7);
        assert!(model.trainable_mask().iter().all(|t| *t));
        let frozen = DlgModel::zeros(Hyperparams { theta0_zero: true, ..hp(3) }).unwrap();
        let theta0: usize = frozen.conv.iter().map(|l| 2 * l.theta0.len()).sum();
        assert_eq!(frozen.trainable_mask().iter().filter(|t| !**t).count(), theta0);
    }

    #[test]
    fn perfect_predictions_leave_only_decay() {
        let h = worked_example();
        let l = directed_laplacians(&h).laplacian;
        let mut model = DlgModel::zeros(hp(3)).unwrap();
        // bias pushes class 1 to dominate everywhere
        model.linear[1].bias[1] = 60.0;
        let trace = model.forward_nodes(&l, &features(), &h.incidence_matrix()).unwrap();
        let (loss, _) = model.loss_and_grads(&l, &trace, &[(0, 1), (2, 1)], 0.0).unwrap();
        assert!(loss < 1e-20);
        model.conv[0].theta1[[0, 0]] = Complex64::new(3.0, 4.0);
        let trace = model.forward_nodes(&l, &features(), &h.incidence_matrix()).unwrap();
        let (loss, _) = model.loss_and_grads(&l, &trace, &[(0, 1)], 0.1).unwrap();
        assert!((loss - 0.5 * 0.1 * 25.0).abs() < 1e-12);
    }

    #[test]
    fn doubling_decay_doubles_decay_gradient() {
        let h = worked_example();
        let l = directed_laplacians(&h).laplacian;
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let model = DlgModel::init(hp(3), &mut rng).unwrap();
        let trace = model.forward_nodes(&l, &features(), &h.incidence_matrix()).unwrap();
        let targets = [(0, 0), (1, 2)];
        let g0 = model.loss_and_grads(&l, &trace, &targets, 0.0).unwrap().1.to_flat();
        let g1 = model.loss_and_grads(&l, &trace, &targets, 0.01).unwrap().1.to_flat();
        let g2 = model.loss_and_grads(&l, &trace, &targets, 0.02).unwrap().1.to_flat();
        for i in 0..g0.len() {
            let d1 = g1[i] - g0[i];
            let d2 = g2[i] - g0[i];
            assert!((d2 - 2.0 * d1).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_bad_labels_and_empty_targets() {
        let h = worked_example();
        let l = directed_laplacians(&h).laplacian;
        let model = DlgModel::zeros(hp(2)).unwrap();
        let trace = model.forward_nodes(&l, &features(), &h.incidence_matrix()).unwrap();
        assert!(matches!(model.loss_and_grads(&l, &trace, &[], 0.0), Err(NetError::EmptySplit)));
        assert!(matches!(
            model.loss_and_grads(&l, &trace, &[(0, 5)], 0.0),
            Err(NetError::InvalidLabel { label: 5, classes: 2 })
        ));
    }

    #[test]
    fn signless_reparameterization_matches() {
        let h = worked_example();
        let mats = directed_laplacians(&h);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let model = DlgModel::init(hp(3), &mut rng).unwrap();
        let b = h.incidence_matrix();
        let a = model.forward_nodes(&mats.laplacian, &features(), &b).unwrap();
        let q = model.reparameterized_for_signless().forward_nodes(&mats.signless, &features(), &b).unwrap();
        for (x, y) in a.logits.iter().zip(q.logits.iter()) {
            assert!((x - y).abs() < 1e-10);
        }
    }

    #[test]
    fn invalid_hyperparams() {
        let mut bad = hp(3);
        bad.conv_layers = 0;
        assert!(matches!(DlgModel::zeros(bad), Err(NetError::InvalidConfig(_))));
    }
}
