use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};

/// Two-mode beam-splitter unitary `exp[theta (a_i^+ a_j - a_i a_j^+)]`,
/// `theta = arccos(sqrt(t))`, stored block-diagonally in total photon number.
///
/// Block `n` acts on `{|k, n-k>}` for `k = 0..=n` (`k` photons in mode `i`),
/// indexed `[k_out, k_in]`. Blocks are built on the full sector before any
/// cutoff clamping.
#[derive(Debug, Clone, PartialEq)]
pub struct BSKernel {
    transmissivity: f64,
    cutoff_i: usize,
    cutoff_j: usize,
    blocks: Vec<DMatrix<f64>>,
}

impl BSKernel {
    pub fn transmissivity(&self) -> f64 {
        self.transmissivity
    }

    pub fn cutoff_i(&self) -> usize {
        self.cutoff_i
    }

    pub fn cutoff_j(&self) -> usize {
        self.cutoff_j
    }

    pub fn block(&self, total: usize) -> &DMatrix<f64> {
        &self.blocks[total]
    }

    pub fn sectors(&self) -> usize {
        self.blocks.len()
    }
}

/// Restriction of `a_i^+ a_j - a_i a_j^+` to the `n`-photon sector.
pub fn sector_generator(n: usize) -> DMatrix<f64> {
    let mut g = DMatrix::zeros(n + 1, n + 1);
    for k in 0..n {
        let w = (((k + 1) * (n - k)) as f64).sqrt();
        g[(k + 1, k)] = w;
        g[(k, k + 1)] = -w;
    }
    g
}

/// `exp(theta G_n)` for the sector generator.
///
/// With `D = diag(i^k)`, `D G D^-1 = -i S` for the real symmetric tridiagonal
/// `S` sharing `G`'s upper diagonal, so the exponential follows from the
/// eigen-decomposition of `S`.
fn sector_unitary(n: usize, theta: f64) -> DMatrix<f64> {
    if n == 0 {
        return DMatrix::identity(1, 1);
    }
    let g = sector_generator(n);
    let s = DMatrix::from_fn(n + 1, n + 1, |r, c| if r <= c { g[(r, c)] } else { g[(c, r)] });
    let eig = SymmetricEigen::new(s);
    let v = &eig.eigenvectors;
    let (cos, sin): (Vec<f64>, Vec<f64>) = eig
        .eigenvalues
        .iter()
        .map(|&lam| ((theta * lam).cos(), (theta * lam).sin()))
        .unzip();
    // i^(l-k) * sum_m V_km V_lm exp(-i theta lambda_m), real by construction
    DMatrix::from_fn(n + 1, n + 1, |k, l| {
        let mut re = 0.0;
        let mut im = 0.0;
        for m in 0..=n {
            let w = v[(k, m)] * v[(l, m)];
            re += w * cos[m];
            im -= w * sin[m];
        }
        match (l + 4 - k % 4) % 4 {
            0 => re,
            1 => -im,
            2 => -re,
            _ => im,
        }
    })
}

/// Builds the beam-splitter kernel for modes with the given cutoffs.
pub fn bs_kernel(t: f64, cutoff_i: usize, cutoff_j: usize) -> Result<BSKernel> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::InvalidParameter {
            name: "transmissivity",
            value: t,
            domain: "[0, 1]",
        });
    }
    let theta = t.sqrt().acos();
    let blocks = (0..=cutoff_i + cutoff_j)
        .map(|n| sector_unitary(n, theta))
        .collect();
    Ok(BSKernel {
        transmissivity: t,
        cutoff_i,
        cutoff_j,
        blocks,
    })
}
