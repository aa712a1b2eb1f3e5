//! Stateless building blocks of the network.

use ndarray::{concatenate, s, Array2, Axis};
use num_complex::Complex64;

use super::NetError;
use crate::hypergraph::ComplexMatrix;

/// Moves vertex features onto hyperedges: `X = B* X'`.
pub fn lift_features(b: &ComplexMatrix, x_nodes: &Array2<f64>) -> Result<ComplexMatrix, NetError> {
    lift_complex_features(b, &x_nodes.mapv(|x| Complex64::new(x, 0.0)))
}

/// [`lift_features`] for complex vertex features.
pub fn lift_complex_features(b: &ComplexMatrix, x_nodes: &ComplexMatrix) -> Result<ComplexMatrix, NetError> {
    if b.nrows() != x_nodes.nrows() {
        return Err(NetError::ShapeMismatch {
            what: "vertex features",
            expected: (b.nrows(), x_nodes.ncols()),
            got: x_nodes.dim(),
        });
    }
    Ok(b.t().mapv(|z| z.conj()).dot(x_nodes))
}

/// `φ(z) = z` when `Re z >= 0`, else `0`.
pub fn complex_relu(z: &ComplexMatrix) -> ComplexMatrix {
    z.mapv(relu_entry)
}

#[inline]
pub(crate) fn relu_entry(z: Complex64) -> Complex64 {
    if z.re >= 0.0 {
        z
    } else {
        Complex64::new(0.0, 0.0)
    }
}

/// Pre-activation of one convolution: `X Θ0 + (L X) Θ1`, plus `X` when
/// `use_residual`. Returns the pre-activation and `L X`.
pub(crate) fn conv_preactivation(
    op: &ComplexMatrix,
    x: &ComplexMatrix,
    theta0: &ComplexMatrix,
    theta1: &ComplexMatrix,
    use_residual: bool,
) -> Result<(ComplexMatrix, ComplexMatrix), NetError> {
    let m = x.nrows();
    if op.dim() != (m, m) {
        return Err(NetError::ShapeMismatch { what: "line-graph operator", expected: (m, m), got: op.dim() });
    }
    let c_in = x.ncols();
    for theta in [theta0, theta1] {
        if theta.dim() != (c_in, theta0.ncols()) {
            return Err(NetError::ShapeMismatch {
                what: "filter weights",
                expected: (c_in, theta0.ncols()),
                got: theta.dim(),
            });
        }
    }
    if use_residual && theta0.ncols() != c_in {
        return Err(NetError::ResidualWidthMismatch { c_in, c_out: theta0.ncols() });
    }
    let lx = op.dot(x);
    let mut pre = x.dot(theta0) + lx.dot(theta1);
    if use_residual {
        pre += x;
    }
    Ok((pre, lx))
}

/// `X Θ0 + (L X) Θ1`, plus `X` when `use_residual`.
pub fn conv_pre(
    op: &ComplexMatrix,
    x: &ComplexMatrix,
    theta0: &ComplexMatrix,
    theta1: &ComplexMatrix,
    use_residual: bool,
) -> Result<ComplexMatrix, NetError> {
    conv_preactivation(op, x, theta0, theta1, use_residual).map(|(pre, _)| pre)
}

/// One convolution layer: `φ(X Θ0 + (L X) Θ1 [+ X])`.
pub fn conv_forward(
    op: &ComplexMatrix,
    x: &ComplexMatrix,
    theta0: &ComplexMatrix,
    theta1: &ComplexMatrix,
    use_residual: bool,
) -> Result<ComplexMatrix, NetError> {
    let (pre, _) = conv_preactivation(op, x, theta0, theta1, use_residual)?;
    Ok(complex_relu(&pre))
}

/// `[Re Z | Im Z]`.
pub fn unwind(z: &ComplexMatrix) -> Array2<f64> {
    let re = z.mapv(|v| v.re);
    let im = z.mapv(|v| v.im);
    concatenate(Axis(1), &[re.view(), im.view()]).expect("blocks share row count")
}

/// Inverse of [`unwind`] on gradients: left block to the real part, right
/// block to the imaginary part.
pub(crate) fn rewind(g: &Array2<f64>) -> ComplexMatrix {
    let c = g.ncols() / 2;
    let re = g.slice(s![.., ..c]);
    let im = g.slice(s![.., c..]);
    let mut out = ComplexMatrix::zeros((g.nrows(), c));
    for ((i, j), z) in out.indexed_iter_mut() {
        *z = Complex64::new(re[[i, j]], im[[i, j]]);
    }
    out
}

/// Row-wise softmax.
pub fn softmax(logits: &Array2<f64>) -> Array2<f64> {
    let mut out = logits.clone();
    for mut row in out.rows_mut() {
        let max = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        row.mapv_inplace(|x| (x - max).exp());
        let sum = row.sum();
        row.mapv_inplace(|x| x / sum);
    }
    out
}
