//! Directed line graph of a directed hypergraph and its Laplacian family.
//!
//! The line graph has one vertex per hyperedge. Its normalized signless
//! Laplacian is
//!
//! ```text
//! Q = De^{-1/2} sqrt(W) B* Dv^{-1} B sqrt(W) De^{-1/2},    L = I - Q
//! ```
//!
//! with `B` the complex incidence matrix. Every matrix here is Hermitian by
//! construction: only the upper triangle is computed and the lower triangle
//! is its exact conjugate mirror.

use ndarray::Array2;
use num_complex::Complex64;

use crate::hypergraph::{ComplexMatrix, DirectedHypergraph, Role};

/// Adjacency, normalized signless Laplacian and normalized Laplacian of a
/// line graph.
#[derive(Debug, Clone)]
pub struct DlgMatrices {
    pub adjacency: ComplexMatrix,
    pub signless: ComplexMatrix,
    pub laplacian: ComplexMatrix,
}

/// Which line-graph operator a convolution uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Operator {
    #[default]
    Laplacian,
    Signless,
}

/// `A = sqrt(W) B* B sqrt(W) - W De`. The diagonal is exactly zero.
pub fn dlg_adjacency(h: &DirectedHypergraph) -> ComplexMatrix {
    let b = h.incidence_matrix();
    let w = h.weights();
    hermitian_gram(&b, |i, j| (w[i] * w[j]).sqrt(), None, true)
}

/// Builds `Q` and `L = I - Q` for the directed line graph.
pub fn directed_laplacians(h: &DirectedHypergraph) -> DlgMatrices {
    let b = h.incidence_matrix();
    let deg = h.degrees();
    let w = h.weights();
    let scale: Vec<f64> = w.iter().zip(&deg.density).map(|(&we, &de)| (we / de as f64).sqrt()).collect();
    let inv_d: Vec<f64> = deg.vertex.iter().map(|d| 1.0 / d).collect();
    let signless = hermitian_gram(&b, |i, j| scale[i] * scale[j], Some(&inv_d), false);
    let laplacian = identity_minus(&signless);
    DlgMatrices { adjacency: hermitian_gram(&b, |i, j| (w[i] * w[j]).sqrt(), None, true), signless, laplacian }
}

/// `L = I - Q` entry by entry.
pub fn identity_minus(q: &ComplexMatrix) -> ComplexMatrix {
    let mut l = q.mapv(|z| -z);
    for i in 0..l.nrows() {
        l[[i, i]] = Complex64::new(1.0 - q[[i, i]].re, 0.0);
    }
    l
}

/// Computes `G_ij = pair(i, j) * sum_u conj(B_ui) B_uj / d_u` for `i <= j`
/// and mirrors the conjugate into the lower triangle. The diagonal is kept
/// real (it is a sum of squared moduli); `zero_diag` clears it instead.
fn hermitian_gram(
    b: &ComplexMatrix,
    pair: impl Fn(usize, usize) -> f64,
    inv_vertex_degree: Option<&[f64]>,
    zero_diag: bool,
) -> ComplexMatrix {
    let (n, m) = b.dim();
    // Column-major view: row e of `bt` is column e of B.
    let bt: Array2<Complex64> = b.t().as_standard_layout().into_owned();
    // Rows of B pre-scaled by 1/d_u so each product is conj(B_ui) * (B_uj / d_u).
    let scaled: Array2<Complex64> = match inv_vertex_degree {
        Some(inv) => {
            let mut s = bt.clone();
            for mut row in s.rows_mut() {
                for (u, z) in row.iter_mut().enumerate() {
                    *z *= inv[u];
                }
            }
            s
        }
        None => bt.clone(),
    };
    let mut g = ComplexMatrix::zeros((m, m));
    for i in 0..m {
        let bi = bt.row(i);
        if !zero_diag {
            let mut diag = 0.0;
            for u in 0..n {
                diag += bi[u].norm_sqr() * inv_vertex_degree.map_or(1.0, |inv| inv[u]);
            }
            g[[i, i]] = Complex64::new(diag * pair(i, i), 0.0);
        }
        for j in (i + 1)..m {
            let sj = scaled.row(j);
            let mut acc = Complex64::new(0.0, 0.0);
            for u in 0..n {
                acc += bi[u].conj() * sj[u];
            }
            let z = acc * pair(i, j);
            g[[i, j]] = z;
            g[[j, i]] = z.conj();
        }
    }
    g
}

/// Undirected line-graph matrices built from the 0/1 incidence matrix with
/// real arithmetic, ignoring every head/tail distinction.
pub fn undirected_laplacians(h: &DirectedHypergraph) -> DlgMatrices {
    let b = h.real_incidence_matrix();
    let deg = h.degrees();
    let w = h.weights();
    let m = h.m();
    let sqrt_w: Vec<f64> = w.iter().map(|x| x.sqrt()).collect();
    let inv_sqrt_de: Vec<f64> = deg.density.iter().map(|&d| 1.0 / (d as f64).sqrt()).collect();

    // B sqrt(W) De^{-1/2}
    let mut bw = b.clone();
    for ((_, e), x) in bw.indexed_iter_mut() {
        *x *= sqrt_w[e] * inv_sqrt_de[e];
    }
    let mut dv_bw = bw.clone();
    for ((v, _), x) in dv_bw.indexed_iter_mut() {
        *x /= deg.vertex[v];
    }
    let q = bw.t().dot(&dv_bw);
    let gram = b.t().dot(&b);

    let mut signless = ComplexMatrix::zeros((m, m));
    let mut adjacency = ComplexMatrix::zeros((m, m));
    for i in 0..m {
        signless[[i, i]] = Complex64::new(q[[i, i]], 0.0);
        for j in (i + 1)..m {
            let s = Complex64::new(q[[i, j]], 0.0);
            signless[[i, j]] = s;
            signless[[j, i]] = s;
            let a = Complex64::new(sqrt_w[i] * gram[[i, j]] * sqrt_w[j], 0.0);
            adjacency[[i, j]] = a;
            adjacency[[j, i]] = a;
        }
    }
    let laplacian = identity_minus(&signless);
    DlgMatrices { adjacency, signless, laplacian }
}

/// Normalized Laplacian of the undirected line graph.
pub fn undirected_laplacian(h: &DirectedHypergraph) -> ComplexMatrix {
    undirected_laplacians(h).laplacian
}

/// Entry `(i, j)` of the directed line-graph Laplacian evaluated from the
/// shared vertices of hyperedges `i` and `j`:
///
/// * same role in both (head/head or tail/tail): `-sqrt(w_i w_j) / d_u` on the real part;
/// * head in `i`, tail in `j`: `+sqrt(w_i w_j) / d_u` on the imaginary part;
/// * tail in `i`, head in `j`: `-sqrt(w_i w_j) / d_u` on the imaginary part;
///
/// all divided by `sqrt(δ_i δ_j)`. The diagonal is `1 - Σ_u w_i / (d_u δ_i)`.
pub fn scalar_laplacian_entry(h: &DirectedHypergraph, i: usize, j: usize) -> Complex64 {
    let deg = h.degrees();
    let (ei, ej) = (h.edge(i), h.edge(j));
    let (wi, wj) = (ei.weight(), ej.weight());
    let (di, dj) = (ei.density() as f64, ej.density() as f64);
    if i == j {
        let s: f64 = ei.members().map(|(u, _)| wi / (deg.vertex[u] * di)).sum();
        return Complex64::new(1.0 - s, 0.0);
    }
    let mut same = 0.0;
    let mut head_tail = 0.0;
    let mut tail_head = 0.0;
    for (u, role_i) in ei.members() {
        let Some(role_j) = ej.role_of(u) else {
            continue;
        };
        let c = (wi * wj).sqrt() / deg.vertex[u];
        match (role_i, role_j) {
            (Role::Head, Role::Head) | (Role::Tail, Role::Tail) => same += c,
            (Role::Head, Role::Tail) => head_tail += c,
            (Role::Tail, Role::Head) => tail_head += c,
        }
    }
    Complex64::new(-same, head_tail - tail_head) / (di * dj).sqrt()
}

/// Largest `|M_ij - conj(M_ji)|`.
pub fn hermitian_asymmetry(mat: &ComplexMatrix) -> f64 {
    let n = mat.nrows();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((mat[[i, j]] - mat[[j, i]].conj()).norm());
        }
    }
    worst
}

/// Largest entry-wise modulus of `a - b`.
pub fn max_abs_diff(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}
