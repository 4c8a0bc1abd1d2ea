//! Dense complex matrix algebra: products, Kronecker products, Hermitian
//! eigendecomposition, operator functions, and partial trace.
//!
//! Index convention, fixed for the whole crate: spin site 1 occupies the
//! most significant bit of a computational-basis index, and the single-spin
//! basis orders "up" before "down" (|1> is the first basis vector, |0> the
//! second). Kronecker products are taken in site order 1, 2, ..., N, which
//! makes the all-up product state the projector onto basis index 0.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::states::DensityMatrix;

pub type C64 = Complex64;

/// Inputs to the eigensolver must be Hermitian to within this max-entry bound.
pub const HERMITICITY_TOL: f64 = 1e-10;

/// Eigenvalues in `[-PSD_TOL, 0)` are treated as roundoff and clamped to
/// zero; anything below `-PSD_TOL` indicates a genuinely indefinite matrix.
pub const PSD_TOL: f64 = 1e-10;

/// Dense square complex matrix; the carrier for every operator and state.
///
/// Construction from raw data rejects non-finite entries. Arithmetic is
/// delegated to [`nalgebra`]; dimension mismatches in operator arithmetic
/// panic, while the physics-level entry points return [`Error`] values.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    data: DMatrix<C64>,
}

impl ComplexMatrix {
    /// Validates squareness and finiteness of an owned matrix.
    pub fn from_dmatrix(data: DMatrix<C64>) -> Result<Self> {
        if data.nrows() != data.ncols() || data.nrows() == 0 {
            return Err(Error::NotSquare {
                rows: data.nrows(),
                cols: data.ncols(),
            });
        }
        for j in 0..data.ncols() {
            for i in 0..data.nrows() {
                let z = data[(i, j)];
                if !z.re.is_finite() || !z.im.is_finite() {
                    return Err(Error::NonFiniteEntry { row: i, col: j });
                }
            }
        }
        Ok(Self { data })
    }

    /// Wraps a matrix produced by internal arithmetic on already-validated
    /// inputs.
    pub(crate) fn from_dmatrix_unchecked(data: DMatrix<C64>) -> Self {
        debug_assert_eq!(data.nrows(), data.ncols());
        Self { data }
    }

    /// Builds a `dim`x`dim` matrix from row-major entries.
    pub fn from_entries(dim: usize, entries: &[C64]) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                found: entries.len(),
            });
        }
        Self::from_dmatrix(DMatrix::from_fn(dim, dim, |i, j| entries[i * dim + j]))
    }

    pub fn from_fn(dim: usize, f: impl Fn(usize, usize) -> C64) -> Result<Self> {
        Self::from_dmatrix(DMatrix::from_fn(dim, dim, f))
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_dmatrix_unchecked(DMatrix::identity(dim, dim))
    }

    pub fn zeros(dim: usize) -> Self {
        Self::from_dmatrix_unchecked(DMatrix::zeros(dim, dim))
    }

    pub fn diagonal(entries: &[C64]) -> Self {
        Self::from_dmatrix_unchecked(DMatrix::from_diagonal(&DVector::from_row_slice(entries)))
    }

    pub fn real_diagonal(entries: &[f64]) -> Self {
        Self::diagonal(&entries.iter().map(|&x| C64::new(x, 0.0)).collect::<Vec<_>>())
    }

    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.data[(row, col)]
    }

    pub fn as_dmatrix(&self) -> &DMatrix<C64> {
        &self.data
    }

    pub fn adjoint(&self) -> Self {
        Self::from_dmatrix_unchecked(self.data.adjoint())
    }

    pub fn conjugate(&self) -> Self {
        Self::from_dmatrix_unchecked(self.data.conjugate())
    }

    pub fn transpose(&self) -> Self {
        Self::from_dmatrix_unchecked(self.data.transpose())
    }

    pub fn trace(&self) -> C64 {
        self.data.trace()
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self::from_dmatrix_unchecked(self.data.scale(factor))
    }

    pub fn scale_complex(&self, factor: C64) -> Self {
        Self::from_dmatrix_unchecked(&self.data * factor)
    }

    /// Largest entry magnitude.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest entrywise deviation from another matrix of the same size.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim(), other.dim(), "max_abs_diff: size mismatch");
        self.data
            .iter()
            .zip(other.data.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// max |a_ij - conj(a_ji)|, zero for an exactly Hermitian matrix.
    pub fn hermiticity_error(&self) -> f64 {
        let n = self.dim();
        let mut dev: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                dev = dev.max((self.data[(i, j)] - self.data[(j, i)].conj()).norm());
            }
        }
        dev
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_error() < tol
    }

    /// Rank-one matrix `v v†` from a (not necessarily normalized) vector.
    pub fn outer_product(v: &DVector<C64>) -> Self {
        Self::from_dmatrix_unchecked(v * v.adjoint())
    }
}

impl std::ops::Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix::from_dmatrix_unchecked(&self.data + &rhs.data)
    }
}

impl std::ops::Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix::from_dmatrix_unchecked(&self.data - &rhs.data)
    }
}

impl std::ops::Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix::from_dmatrix_unchecked(&self.data * &rhs.data)
    }
}

impl std::ops::Neg for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn neg(self) -> ComplexMatrix {
        ComplexMatrix::from_dmatrix_unchecked(-&self.data)
    }
}

/// Kronecker product; entry `(i*bd + k, j*bd + l)` equals `a(i,j) * b(k,l)`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    ComplexMatrix::from_dmatrix_unchecked(a.data.kronecker(&b.data))
}

/// Tr(a b) without forming the product; both arguments square, same size.
pub fn trace_product(a: &ComplexMatrix, b: &ComplexMatrix) -> C64 {
    assert_eq!(a.dim(), b.dim(), "trace_product: size mismatch");
    let n = a.dim();
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            acc += a.data[(i, j)] * b.data[(j, i)];
        }
    }
    acc
}

/// Eigendecomposition of a Hermitian matrix: ascending real eigenvalues and
/// a unitary matrix of column eigenvectors.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    eigenvalues: Vec<f64>,
    eigenvectors: ComplexMatrix,
}

impl HermitianEigen {
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> &ComplexMatrix {
        &self.eigenvectors
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues[0]
    }

    /// Applies a scalar function to the spectrum: `V f(Λ) V†`.
    pub fn apply(&self, f: impl Fn(f64) -> C64) -> ComplexMatrix {
        let v = self.eigenvectors.as_dmatrix();
        let d = DMatrix::from_diagonal(&DVector::from_iterator(
            self.eigenvalues.len(),
            self.eigenvalues.iter().map(|&x| f(x)),
        ));
        ComplexMatrix::from_dmatrix_unchecked(v * d * v.adjoint())
    }
}

/// Decomposes a Hermitian matrix. The input must satisfy
/// `hermiticity_error < HERMITICITY_TOL`; it is symmetrized before the
/// solve so the decomposition is exactly Hermitian-consistent.
pub fn hermitian_eigen(h: &ComplexMatrix) -> Result<HermitianEigen> {
    let deviation = h.hermiticity_error();
    if deviation >= HERMITICITY_TOL {
        return Err(Error::NotHermitian { deviation });
    }
    let sym = (h.as_dmatrix() + h.as_dmatrix().adjoint()).scale(0.5);
    let se = sym
        .try_symmetric_eigen(f64::EPSILON, 100_000)
        .ok_or(Error::ConvergenceFailure)?;

    let n = se.eigenvalues.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| se.eigenvalues[i].total_cmp(&se.eigenvalues[j]));
    let eigenvalues: Vec<f64> = order.iter().map(|&i| se.eigenvalues[i]).collect();
    let mut vectors = DMatrix::<C64>::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &se.eigenvectors.column(src));
    }
    Ok(HermitianEigen {
        eigenvalues,
        eigenvectors: ComplexMatrix::from_dmatrix_unchecked(vectors),
    })
}

/// Unitary propagator `exp(-i h t)` of a Hermitian generator, evaluated
/// through the spectral decomposition.
pub fn evolve_unitary(h: &ComplexMatrix, t: f64) -> Result<ComplexMatrix> {
    if t == 0.0 {
        return Ok(ComplexMatrix::identity(h.dim()));
    }
    let eigen = hermitian_eigen(h)?;
    Ok(eigen.apply(|lambda| C64::new(0.0, -lambda * t).exp()))
}

/// Hermitian square root of a positive-semidefinite matrix. Eigenvalues in
/// `[-PSD_TOL, 0)` are clamped to zero before the root is taken.
pub fn psd_sqrt(rho: &DensityMatrix) -> Result<ComplexMatrix> {
    let eigen = hermitian_eigen(rho.matrix())?;
    let min = eigen.min_eigenvalue();
    if min < -PSD_TOL {
        return Err(Error::NotPsd {
            min_eigenvalue: min,
        });
    }
    Ok(eigen.apply(|lambda| C64::new(lambda.max(0.0).sqrt(), 0.0)))
}

/// Reduced density matrix over the sites listed in `keep` (1-based, output
/// tensor factors ordered as given), tracing out every other site of an
/// `n`-spin chain.
pub fn partial_trace(rho: &DensityMatrix, keep: &[usize], n: usize) -> Result<DensityMatrix> {
    let dim = 1usize << n;
    if rho.dim() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: rho.dim(),
        });
    }
    for (i, &site) in keep.iter().enumerate() {
        if site < 1 || site > n {
            return Err(Error::SiteOutOfRange { site, n });
        }
        if keep[..i].contains(&site) {
            return Err(Error::DuplicateSite { site });
        }
    }

    let others: Vec<usize> = (1..=n).filter(|s| !keep.contains(s)).collect();
    let kept_bits = keep.len();
    let kdim = 1usize << kept_bits;
    let edim = 1usize << others.len();

    // Site s controls bit n - s of the full index (site 1 = MSB).
    let spread = |sites: &[usize], packed: usize| -> usize {
        sites.iter().enumerate().fold(0usize, |acc, (i, &s)| {
            acc | (((packed >> (sites.len() - 1 - i)) & 1) << (n - s))
        })
    };
    let env_indices: Vec<usize> = (0..edim).map(|e| spread(&others, e)).collect();

    let mut out = DMatrix::<C64>::zeros(kdim, kdim);
    for a in 0..kdim {
        let base_a = spread(keep, a);
        for b in 0..kdim {
            let base_b = spread(keep, b);
            let mut acc = C64::new(0.0, 0.0);
            for &env in &env_indices {
                acc += rho.matrix().get(base_a | env, base_b | env);
            }
            out[(a, b)] = acc;
        }
    }
    Ok(DensityMatrix::from_matrix_unchecked(
        ComplexMatrix::from_dmatrix_unchecked(out),
    ))
}
