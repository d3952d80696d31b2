//! Eigenvalue helpers shared by the entanglement and covariance code.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

/// Splits the index set into connected components of the sparsity graph of
/// `m` (entries exactly zero are treated as absent).
fn components(m: &DMatrix<Complex64>) -> Vec<Vec<usize>> {
    let n = m.nrows();
    let mut parent: Vec<usize> = (0..n).collect();
    for i in 0..n {
        for j in (i + 1)..n {
            let z = m[(i, j)];
            if z.re != 0.0 || z.im != 0.0 {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut slot = vec![usize::MAX; n];
    for i in 0..n {
        let root = find(&mut parent, i);
        if slot[root] == usize::MAX {
            slot[root] = groups.len();
            groups.push(Vec::new());
        }
        groups[slot[root]].push(i);
    }
    groups
}

/// Eigenvalues of a Hermitian matrix (upper and lower triangles both read for
/// the block structure, the solver symmetrizes).
///
/// Operators built from photon-number-structured states are usually block
/// diagonal up to a permutation; each block is diagonalized separately.
pub fn hermitian_eigenvalues(m: &DMatrix<Complex64>) -> Vec<f64> {
    let mut out = Vec::with_capacity(m.nrows());
    for group in components(m) {
        if group.len() == 1 {
            out.push(m[(group[0], group[0])].re);
            continue;
        }
        let k = group.len();
        let block = DMatrix::from_fn(k, k, |r, c| m[(group[r], group[c])]);
        out.extend(SymmetricEigen::new(block).eigenvalues.iter().copied());
    }
    out
}

/// Eigen-decomposition of a real symmetric matrix, eigenvalues ascending.
pub fn symmetric_eigen(m: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let eig = SymmetricEigen::new(m.clone());
    let mut order: Vec<usize> = (0..m.nrows()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = DMatrix::from_fn(m.nrows(), m.ncols(), |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}
