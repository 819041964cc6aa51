use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::{Error, Result, MAX_TOTAL_DIMENSION};

/// Max entrywise deviation of `U^dagger U` from the identity.
pub const UNITARITY_TOLERANCE: f64 = 1e-10;

/// A dense unitary matrix, stored row-major over a flat index space.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryMatrix {
    dim: usize,
    entries: Vec<Complex64>,
}

impl UnitaryMatrix {
    /// Builds a unitary from row-major entries, verifying
    /// `U^dagger U = id` within [`UNITARITY_TOLERANCE`].
    pub fn new(dim: usize, entries: Vec<Complex64>) -> Result<Self> {
        let u = Self::new_unchecked(dim, entries)?;
        let deviation = u.unitarity_deviation();
        if deviation > UNITARITY_TOLERANCE {
            return Err(Error::NotUnitary { deviation });
        }
        Ok(u)
    }

    /// Builds a unitary from entries whose unitarity is guaranteed by
    /// construction (analytic formulas, rearrangements of checked unitaries).
    /// Shape and dimension-cap checks still apply.
    pub(crate) fn new_unchecked(dim: usize, entries: Vec<Complex64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::SubsystemDimension { dim });
        }
        if dim > MAX_TOTAL_DIMENSION {
            return Err(Error::DimensionTooLarge {
                dim,
                max: MAX_TOTAL_DIMENSION,
            });
        }
        if entries.len() != dim * dim {
            return Err(Error::LengthMismatch {
                expected: dim * dim,
                actual: entries.len(),
            });
        }
        Ok(Self { dim, entries })
    }

    /// Matrix dimension.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Flat row-major entries.
    pub fn matrix(&self) -> &[Complex64] {
        &self.entries
    }

    /// Single entry by (row, column).
    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.dim + col]
    }

    /// Conjugate transpose (also unitary, so no re-validation).
    pub fn dagger(&self) -> Self {
        let n = self.dim;
        let mut entries = vec![Complex64::new(0.0, 0.0); n * n];
        for i in 0..n {
            for j in 0..n {
                entries[j * n + i] = self.entries[i * n + j].conj();
            }
        }
        Self { dim: n, entries }
    }

    /// Max entrywise deviation of `U^dagger U` from the identity.
    pub fn unitarity_deviation(&self) -> f64 {
        let n = self.dim;
        let mut dev: f64 = 0.0;
        // Gram entries g[i][j] = <col_i, col_j>; only the upper triangle is
        // needed since the Gram matrix is Hermitian.
        for i in 0..n {
            for j in i..n {
                let mut g = Complex64::new(0.0, 0.0);
                for k in 0..n {
                    g += self.entries[k * n + i].conj() * self.entries[k * n + j];
                }
                if i == j {
                    g -= 1.0;
                }
                dev = dev.max(g.norm());
            }
        }
        dev
    }

    /// Matrix product `self * rhs`.
    pub fn compose(&self, rhs: &Self) -> Result<Self> {
        if self.dim != rhs.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                actual: rhs.dim,
            });
        }
        let entries = super::mat_mul(&self.entries, &rhs.entries, self.dim);
        Self::new_unchecked(self.dim, entries)
    }
}

/// Identity matrix as a unitary.
pub fn identity(dim: usize) -> Result<UnitaryMatrix> {
    let mut entries = vec![Complex64::new(0.0, 0.0); dim * dim];
    for i in 0..dim {
        entries[i * dim + i] = Complex64::new(1.0, 0.0);
    }
    UnitaryMatrix::new_unchecked(dim, entries)
}

/// Draws a Haar-distributed random unitary.
///
/// A matrix of i.i.d. complex Gaussians is orthonormalized column by column
/// with modified Gram-Schmidt. Because the normalization coefficients are
/// positive reals, this is exactly the QR decomposition with the phase
/// convention that makes Q Haar-distributed; no sign correction is needed.
/// Each column gets a second projection pass so the orthogonality deviation
/// stays at machine precision even for larger dimensions.
pub fn haar_random_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Result<UnitaryMatrix> {
    if dim == 0 {
        return Err(Error::SubsystemDimension { dim });
    }
    if dim > MAX_TOTAL_DIMENSION {
        return Err(Error::DimensionTooLarge {
            dim,
            max: MAX_TOTAL_DIMENSION,
        });
    }
    // Columns drawn row-major from the rng: entry (r, c) before entry (r, c+1).
    let mut raw = vec![Complex64::new(0.0, 0.0); dim * dim];
    for entry in raw.iter_mut() {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        *entry = Complex64::new(re, im);
    }
    let col = |m: &[Complex64], c: usize| -> Vec<Complex64> {
        (0..dim).map(|r| m[r * dim + c]).collect()
    };
    let mut q: Vec<Vec<Complex64>> = Vec::with_capacity(dim);
    for c in 0..dim {
        let mut v = col(&raw, c);
        for _pass in 0..2 {
            for prev in &q {
                let proj: Complex64 = prev.iter().zip(&v).map(|(p, x)| p.conj() * x).sum();
                for (x, p) in v.iter_mut().zip(prev) {
                    *x -= proj * p;
                }
            }
        }
        let norm = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        for x in v.iter_mut() {
            *x /= norm;
        }
        q.push(v);
    }
    let mut entries = vec![Complex64::new(0.0, 0.0); dim * dim];
    for (c, column) in q.iter().enumerate() {
        for (r, &x) in column.iter().enumerate() {
            entries[r * dim + c] = x;
        }
    }
    UnitaryMatrix::new(dim, entries)
}
