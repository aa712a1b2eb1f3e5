//! Hermitian eigenanalysis and numerical checks of the line-graph
//! Laplacian's spectral properties.
//!
//! Hermitian matrices are diagonalized through the real symmetric embedding
//! `[[Re, -Im], [Im, Re]]`, whose spectrum is the Hermitian spectrum with
//! every eigenvalue doubled, using a cyclic Jacobi rotation solver.

use ndarray::{s, Array1, Array2};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dlg::{self, DlgMatrices};
use crate::hypergraph::{ComplexMatrix, DirectedHypergraph, Role};

/// Asymmetry tolerated by [`eig_hermitian`] and [`quadratic_form`],
/// relative to `max(1, max|M_ij|)`.
pub const HERMITIAN_TOL: f64 = 1e-10;
/// Spectral bound slack used by [`verify_hypergraph`].
pub const SPECTRUM_TOL: f64 = 1e-9;
/// Largest accepted gap between the two copies of each embedded eigenvalue.
pub const PAIR_TOL: f64 = 1e-8;
pub const MAX_SWEEPS: usize = 100;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpectralError {
    #[error("matrix is not Hermitian (asymmetry {asymmetry:.3e})")]
    NotHermitian { asymmetry: f64 },
    #[error("Jacobi iteration did not converge in {sweeps} sweeps (off-diagonal norm {off:.3e})")]
    NoConvergence { sweeps: usize, off: f64 },
    #[error("embedded eigenvalues {a} and {b} do not pair up")]
    Unpaired { a: f64, b: f64 },
    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("signal has length {got}, expected {expected}")]
    SignalLength { got: usize, expected: usize },
}

/// Eigen-decomposition of a real symmetric matrix by cyclic Jacobi sweeps.
///
/// Returns eigenvalues in ascending order and the matching orthonormal
/// eigenvectors as columns. Stops once the off-diagonal Frobenius norm falls
/// below `1e-12 * ||A||_F`.
pub fn jacobi_eigh(a: &Array2<f64>) -> Result<(Vec<f64>, Array2<f64>), SpectralError> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(SpectralError::NotSquare { rows: n, cols: a.ncols() });
    }
    let mut a = a.clone();
    let mut v = Array2::<f64>::eye(n);
    let total = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let target = 1e-12 * total;

    let off_norm = |a: &Array2<f64>| {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += a[[i, j]] * a[[i, j]];
                }
            }
        }
        s.sqrt()
    };

    let mut sweeps = 0;
    loop {
        let off = off_norm(&a);
        if off <= target {
            break;
        }
        if sweeps == MAX_SWEEPS {
            return Err(SpectralError::NoConvergence { sweeps, off });
        }
        sweeps += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[[p, q]];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[[q, q]] - a[[p, p]]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[[k, p]];
                    let akq = a[[k, q]];
                    a[[k, p]] = c * akp - s * akq;
                    a[[k, q]] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[[p, k]];
                    let aqk = a[[q, k]];
                    a[[p, k]] = c * apk - s * aqk;
                    a[[q, k]] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let vkp = v[[k, p]];
                    let vkq = v[[k, q]];
                    v[[k, p]] = c * vkp - s * vkq;
                    v[[k, q]] = s * vkp + c * vkq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[[i, i]].total_cmp(&a[[j, j]]));
    let values = order.iter().map(|&i| a[[i, i]]).collect();
    let mut vectors = Array2::zeros((n, n));
    for (dst, &src) in order.iter().enumerate() {
        vectors.column_mut(dst).assign(&v.column(src));
    }
    Ok((values, vectors))
}

fn max_modulus(m: &ComplexMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn check_hermitian(m: &ComplexMatrix) -> Result<(), SpectralError> {
    if m.nrows() != m.ncols() {
        return Err(SpectralError::NotSquare { rows: m.nrows(), cols: m.ncols() });
    }
    let asymmetry = dlg::hermitian_asymmetry(m);
    if asymmetry > HERMITIAN_TOL * max_modulus(m).max(1.0) {
        return Err(SpectralError::NotHermitian { asymmetry });
    }
    Ok(())
}

/// `(M + M*) / 2`.
pub fn symmetrize(m: &ComplexMatrix) -> ComplexMatrix {
    let mut out = m.clone();
    let n = m.nrows();
    for i in 0..n {
        out[[i, i]] = Complex64::new(m[[i, i]].re, 0.0);
        for j in (i + 1)..n {
            let z = (m[[i, j]] + m[[j, i]].conj()) * 0.5;
            out[[i, j]] = z;
            out[[j, i]] = z.conj();
        }
    }
    out
}

/// Eigenvalues (ascending) and unitary eigenvectors (columns) of a Hermitian
/// matrix.
pub fn eig_hermitian(m: &ComplexMatrix) -> Result<(Vec<f64>, ComplexMatrix), SpectralError> {
    check_hermitian(m)?;
    let m = symmetrize(m);
    let n = m.nrows();
    let mut embed = Array2::<f64>::zeros((2 * n, 2 * n));
    for ((i, j), z) in m.indexed_iter() {
        embed[[i, j]] = z.re;
        embed[[i + n, j + n]] = z.re;
        embed[[i, j + n]] = -z.im;
        embed[[i + n, j]] = z.im;
    }
    let (values, vectors) = jacobi_eigh(&embed)?;

    let scale = max_modulus(&m).max(1.0);
    for k in 0..n {
        let (a, b) = (values[2 * k], values[2 * k + 1]);
        if (a - b).abs() > PAIR_TOL * scale {
            return Err(SpectralError::Unpaired { a, b });
        }
    }

    // Each real eigenvector [p; q] maps to the complex eigenvector p + iq, and
    // [p; q], [-q; p] map to the same complex direction. Within every cluster
    // of equal eigenvalues keep the half of the candidates with the largest
    // residual after complex Gram-Schmidt against everything kept so far.
    let candidates: Vec<Array1<Complex64>> = (0..2 * n)
        .map(|k| {
            let col = vectors.column(k);
            let p = col.slice(s![..n]);
            let q = col.slice(s![n..]);
            p.iter().zip(q.iter()).map(|(&re, &im)| Complex64::new(re, im)).collect()
        })
        .collect();

    let mut kept: Vec<Array1<Complex64>> = Vec::with_capacity(n);
    let mut eigenvalues = Vec::with_capacity(n);
    let mut start = 0;
    while start < 2 * n {
        let mut end = start + 2;
        while end < 2 * n && values[end] - values[end - 1] <= PAIR_TOL * scale {
            end += 2;
        }
        let mut pool: Vec<Array1<Complex64>> = candidates[start..end].iter().map(|c| orthogonalize(c, &kept)).collect();
        for slot in 0..(end - start) / 2 {
            let (best, _) = pool
                .iter()
                .enumerate()
                .map(|(i, r)| (i, norm(r)))
                .max_by(|a, b| a.1.total_cmp(&b.1))
                .expect("nonempty cluster");
            let r = pool.swap_remove(best);
            let unit = &r / Complex64::new(norm(&r), 0.0);
            for other in pool.iter_mut() {
                let proj = dot(&unit, other);
                *other = &*other - &(&unit * proj);
            }
            kept.push(unit);
            eigenvalues.push(0.5 * (values[start + 2 * slot] + values[start + 2 * slot + 1]));
        }
        start = end;
    }

    let mut u = ComplexMatrix::zeros((n, n));
    for (k, col) in kept.iter().enumerate() {
        u.column_mut(k).assign(col);
    }
    Ok((eigenvalues, u))
}

fn dot(a: &Array1<Complex64>, b: &Array1<Complex64>) -> Complex64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

fn norm(a: &Array1<Complex64>) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn orthogonalize(v: &Array1<Complex64>, basis: &[Array1<Complex64>]) -> Array1<Complex64> {
    let mut r = v.clone();
    for b in basis {
        let proj = dot(b, &r);
        r = &r - &(b * proj);
    }
    r
}

/// Raw `x* M x` without any Hermitian check.
pub fn raw_quadratic_form(m: &ComplexMatrix, x: &[Complex64]) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for (i, xi) in x.iter().enumerate() {
        let row: Complex64 = m.row(i).iter().zip(x).map(|(mij, xj)| mij * xj).sum();
        acc += xi.conj() * row;
    }
    acc
}

/// Real value of `x* M x` for Hermitian `M`.
pub fn quadratic_form(m: &ComplexMatrix, x: &[Complex64]) -> Result<f64, SpectralError> {
    check_hermitian(m)?;
    if x.len() != m.nrows() {
        return Err(SpectralError::SignalLength { got: x.len(), expected: m.nrows() });
    }
    Ok(raw_quadratic_form(m, x).re)
}

/// Dirichlet energy of a hyperedge signal, summed vertex by vertex over
/// pairs of hyperedges sharing that vertex. With `y_i = x_i / sqrt(w_i δ_i)`
/// split as `y = a + ib`, each pair contributes `w_i w_j / d_u` times
///
/// * same role: `(a_i - a_j)^2 + (b_i - b_j)^2`
/// * head in `i`, tail in `j`: `(a_i - b_j)^2 + (a_j + b_i)^2`
/// * tail in `i`, head in `j`: `(a_i + b_j)^2 + (a_j - b_i)^2`
///
/// and the total is halved. For unit weights `y_i = x_i / sqrt(δ_i)` and the
/// pair weight is one. The matrix is never formed.
pub fn dirichlet_energy(h: &DirectedHypergraph, x: &[Complex64]) -> Result<f64, SpectralError> {
    if x.len() != h.m() {
        return Err(SpectralError::SignalLength { got: x.len(), expected: h.m() });
    }
    let deg = h.degrees();
    let mut incident: Vec<Vec<(usize, Role)>> = vec![Vec::new(); h.n()];
    for (e, edge) in h.edges().iter().enumerate() {
        for (u, role) in edge.members() {
            incident[u].push((e, role));
        }
    }
    let y: Vec<(f64, f64)> = x
        .iter()
        .zip(h.edges())
        .map(|(xi, e)| {
            let s = (e.weight() * e.density() as f64).sqrt();
            (xi.re / s, xi.im / s)
        })
        .collect();

    let mut total = 0.0;
    for (u, list) in incident.iter().enumerate() {
        let mut at_u = 0.0;
        for &(i, ri) in list {
            let (ai, bi) = y[i];
            let wi = h.edge(i).weight();
            for &(j, rj) in list {
                let (aj, bj) = y[j];
                let term = match (ri, rj) {
                    (Role::Head, Role::Head) | (Role::Tail, Role::Tail) => (ai - aj).powi(2) + (bi - bj).powi(2),
                    (Role::Head, Role::Tail) => (ai - bj).powi(2) + (aj + bi).powi(2),
                    (Role::Tail, Role::Head) => (ai + bj).powi(2) + (aj - bi).powi(2),
                };
                at_u += wi * h.edge(j).weight() * term;
            }
        }
        total += at_u / deg.vertex[u];
    }
    Ok(0.5 * total)
}

/// Summary of the spectral checks on one hypergraph.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumReport {
    /// Ascending eigenvalues of the Laplacian.
    pub eigenvalues: Vec<f64>,
    /// Smallest eigenvalue over the Laplacian and its signless counterpart.
    pub psd_margin: f64,
    /// `1 - λ_max`, minimized over both matrices.
    pub upper_margin: f64,
    pub hermitian_asymmetry: f64,
    /// Largest `|x* L x - dirichlet_energy(x)|` over the sampled signals.
    pub dirichlet_residual: f64,
    /// Max-norm distance to the undirected line-graph Laplacian, recorded
    /// only for undirected hypergraphs.
    pub undirected_residual: Option<f64>,
    pub passed: bool,
}

/// Uniform signal on `[-1, 1]^2` per component, scaled to unit norm.
pub fn random_unit_signal<R: Rng>(rng: &mut R, len: usize) -> Vec<Complex64> {
    loop {
        let x: Vec<Complex64> =
            (0..len).map(|_| Complex64::new(rng.random_range(-1.0..=1.0), rng.random_range(-1.0..=1.0))).collect();
        let nrm = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if nrm > 1e-6 {
            return x.into_iter().map(|z| z / nrm).collect();
        }
    }
}

/// Runs every spectral check on the matrices built from `h`.
pub fn verify_hypergraph(h: &DirectedHypergraph, trials: usize, seed: u64) -> Result<SpectrumReport, SpectralError> {
    verify_matrices(h, &dlg::directed_laplacians(h), trials, seed)
}

/// Runs the spectral checks on supplied matrices, which need not have been
/// produced from `h` (e.g. a Laplacian read back from disk).
pub fn verify_matrices(
    h: &DirectedHypergraph,
    mats: &DlgMatrices,
    trials: usize,
    seed: u64,
) -> Result<SpectrumReport, SpectralError> {
    let asymmetry = dlg::hermitian_asymmetry(&mats.laplacian).max(dlg::hermitian_asymmetry(&mats.signless));
    let (eig_l, _) = eig_hermitian(&symmetrize(&mats.laplacian))?;
    let (eig_q, _) = eig_hermitian(&symmetrize(&mats.signless))?;
    let min = |v: &[f64]| v.first().copied().unwrap_or(0.0);
    let max = |v: &[f64]| v.last().copied().unwrap_or(0.0);
    let psd_margin = min(&eig_l).min(min(&eig_q));
    let upper_margin = (1.0 - max(&eig_l)).min(1.0 - max(&eig_q));

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut dirichlet_residual: f64 = 0.0;
    for _ in 0..trials {
        let x = random_unit_signal(&mut rng, h.m());
        let direct = dirichlet_energy(h, &x)?;
        let form = raw_quadratic_form(&mats.laplacian, &x);
        dirichlet_residual = dirichlet_residual.max((form - Complex64::new(direct, 0.0)).norm());
    }

    let undirected_residual =
        h.is_undirected().then(|| dlg::max_abs_diff(&mats.laplacian, &dlg::undirected_laplacian(h)));

    let passed = asymmetry <= 1e-12
        && psd_margin >= -SPECTRUM_TOL
        && upper_margin >= -SPECTRUM_TOL
        && dirichlet_residual < SPECTRUM_TOL
        && undirected_residual.is_none_or(|r| r < 1e-12);

    Ok(SpectrumReport {
        eigenvalues: eig_l,
        psd_margin,
        upper_margin,
        hermitian_asymmetry: asymmetry,
        dirichlet_residual,
        undirected_residual,
        passed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypergraph::worked_example;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn check_decomposition(m: &ComplexMatrix) -> Vec<f64> {
        let (vals, u) = eig_hermitian(m).unwrap();
        let n = m.nrows();
        let scale = max_modulus(m).max(1.0);
        let mu = m.dot(&u);
        for i in 0..n {
            for k in 0..n {
                assert!((mu[[i, k]] - u[[i, k]] * vals[k]).norm() < 1e-8 * scale);
            }
        }
        let gram = u.t().mapv(|z| z.conj()).dot(&u);
        for ((i, j), z) in gram.indexed_iter() {
            let id = if i == j { 1.0 } else { 0.0 };
            assert!((z - c(id, 0.)).norm() < 1e-8);
        }
        assert!(vals.windows(2).all(|w| w[0] <= w[1]));
        vals
    }

    #[test]
    fn identity_spectrum() {
        let vals = check_decomposition(&ComplexMatrix::eye(3).mapv(|x| x));
        for v in vals {
            assert!((v - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn two_by_two_hermitian() {
        let m = ndarray::array![[c(0., 0.), c(1., 1.)], [c(1., -1.), c(0., 0.)]];
        let vals = check_decomposition(&m);
        let r2 = 2f64.sqrt();
        assert!((vals[0] + r2).abs() < 1e-12 && (vals[1] - r2).abs() < 1e-12);
    }

    #[test]
    fn worked_example_spectrum_in_unit_interval() {
        let l = dlg::directed_laplacians(&worked_example()).laplacian;
        for v in check_decomposition(&l) {
            assert!((-1e-9..=1.0 + 1e-9).contains(&v));
        }
    }

    #[test]
    fn degenerate_clusters_give_unitary_vectors() {
        // diag(2, 2, 2, -1) conjugated by nothing; repeated eigenvalues stress
        // the cluster selection.
        let mut m = ComplexMatrix::zeros((4, 4));
        for i in 0..3 {
            m[[i, i]] = c(2., 0.);
        }
        m[[3, 3]] = c(-1., 0.);
        m[[0, 1]] = c(0., 0.);
        let vals = check_decomposition(&m);
        assert!((vals[0] + 1.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = ndarray::array![[c(0., 0.), c(1., 1.)], [c(1., 1.), c(0., 0.)]];
        assert!(matches!(eig_hermitian(&m), Err(SpectralError::NotHermitian { .. })));
        assert!(matches!(quadratic_form(&m, &[c(1., 0.), c(0., 0.)]), Err(SpectralError::NotHermitian { .. })));
    }

    #[test]
    fn quadratic_form_examples() {
        let id = ComplexMatrix::eye(1).mapv(|x| x);
        assert!((quadratic_form(&id, &[c(3., 4.)]).unwrap() - 25.0).abs() < 1e-12);
        let l = dlg::directed_laplacians(&worked_example()).laplacian;
        let q = quadratic_form(&l, &[c(1., 0.), c(0., 0.), c(0., 0.)]).unwrap();
        assert!((q - 1.0 / 3.0).abs() < 1e-15);
        let m = ndarray::array![[c(0., 0.), c(1., 1.)], [c(1., -1.), c(0., 0.)]];
        assert!((quadratic_form(&m, &[c(1., 0.), c(1., 0.)]).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn dirichlet_energy_examples() {
        let h = worked_example();
        assert_eq!(dirichlet_energy(&h, &[c(0., 0.); 3]).unwrap(), 0.0);
        let l = dlg::directed_laplacians(&h).laplacian;
        let x: Vec<Complex64> = h.degrees().density.iter().map(|&d| c((d as f64).sqrt() * 0.7, 0.0)).collect();
        let oracle = raw_quadratic_form(&l, &x).re;
        assert!((dirichlet_energy(&h, &x).unwrap() - oracle).abs() < 1e-12);
        assert!(matches!(dirichlet_energy(&h, &[c(1., 0.)]), Err(SpectralError::SignalLength { .. })));
    }

    #[test]
    fn worked_example_verifies() {
        let report = verify_hypergraph(&worked_example(), 50, 7).unwrap();
        assert!(report.passed, "{report:?}");
        assert_eq!(report.eigenvalues.len(), 3);
        assert!(report.undirected_residual.is_none());
        let undirected = verify_hypergraph(&worked_example().to_undirected(), 10, 7).unwrap();
        assert!(undirected.undirected_residual.unwrap() < 1e-12);
        assert!(undirected.passed);
    }

    #[test]
    fn corrupted_laplacian_fails() {
        let h = worked_example();
        let mut mats = dlg::directed_laplacians(&h);
        mats.laplacian[[0, 1]] += c(0.05, 0.0);
        let report = verify_matrices(&h, &mats, 5, 1).unwrap();
        assert!(!report.passed);
        assert!(report.hermitian_asymmetry > 0.04);
    }

    #[test]
    fn jacobi_zero_matrix() {
        let (vals, vecs) = jacobi_eigh(&Array2::zeros((3, 3))).unwrap();
        assert_eq!(vals, vec![0.0; 3]);
        assert_eq!(vecs, Array2::<f64>::eye(3));
    }
}
