//! Dense complex linear algebra for bipartite systems.
//!
//! Basis convention: the product basis vector `|i>_A (x) |j>_B` sits at index
//! `i * dim_b + j`. Every routine here (and every oracle in the tests) uses it.

use std::fmt;
use std::ops::Index;

use nalgebra::{DMatrix, DVector, SymmetricEigen, SVD};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Largest total dimension accepted by [`kron`] and the state constructors.
pub const MAX_DIM: usize = 4096;
/// Allowed deviation of a state norm from one.
pub const NORM_TOL: f64 = 1e-10;
/// Hermiticity tolerance, relative to `max(1, max |m_ij|)`.
pub const HERM_TOL: f64 = 1e-10;
/// Eigendecomposition reconstruction tolerance, relative to `max(1, max |m_ij|)`.
pub const RECON_TOL: f64 = 1e-10;
/// Most negative eigenvalue still accepted as roundoff of a PSD operator.
pub const PSD_TOL: f64 = -1e-12;

const EIG_MAX_ITER: usize = 100_000;

pub(crate) fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Which factor of `H_A (x) H_B`.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum Subsystem {
    A,
    B,
}

/// Dense complex matrix with finite entries and at least one row and column.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    data: DMatrix<C64>,
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ComplexMatrix{}x{} {:?}", self.rows(), self.cols(), self.data)
    }
}

impl ComplexMatrix {
    /// Builds a matrix from entries in row-major order.
    pub fn from_row_major(rows: usize, cols: usize, entries: Vec<C64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Dimension(format!("empty matrix {rows}x{cols}")));
        }
        if entries.len() != rows * cols {
            return Err(Error::Dimension(format!("{} entries for a {rows}x{cols} matrix", entries.len())));
        }
        Self::from_nalgebra(DMatrix::from_row_slice(rows, cols, &entries))
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let n = rows.len();
        let m = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != m) {
            return Err(Error::Dimension("ragged rows".into()));
        }
        let entries = rows.iter().flat_map(|r| r.iter().map(|&x| c(x, 0.0))).collect();
        Self::from_row_major(n, m, entries)
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl FnMut(usize, usize) -> C64) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Dimension(format!("empty matrix {rows}x{cols}")));
        }
        Self::from_nalgebra(DMatrix::from_fn(rows, cols, f))
    }

    /// Wraps an `nalgebra` matrix, rejecting empty shapes and non-finite entries.
    pub fn from_nalgebra(data: DMatrix<C64>) -> Result<Self> {
        if data.nrows() == 0 || data.ncols() == 0 {
            return Err(Error::Dimension("empty matrix".into()));
        }
        for j in 0..data.ncols() {
            for i in 0..data.nrows() {
                let z = data[(i, j)];
                if !(z.re.is_finite() && z.im.is_finite()) {
                    return Err(Error::NonFinite { row: i, col: j });
                }
            }
        }
        Ok(Self { data })
    }

    /// # Panics
    /// If `n == 0`.
    pub fn identity(n: usize) -> Self {
        assert!(n > 0, "identity of dimension zero");
        Self { data: DMatrix::identity(n, n) }
    }

    /// # Panics
    /// If either dimension is zero.
    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "zero-sized matrix");
        Self { data: DMatrix::zeros(rows, cols) }
    }

    /// # Panics
    /// If `diag` is empty or has non-finite values.
    pub fn from_diagonal(diag: &[f64]) -> Self {
        assert!(!diag.is_empty() && diag.iter().all(|x| x.is_finite()));
        let d = DVector::from_iterator(diag.len(), diag.iter().map(|&x| c(x, 0.0)));
        Self { data: DMatrix::from_diagonal(&d) }
    }

    pub fn rows(&self) -> usize {
        self.data.nrows()
    }

    pub fn cols(&self) -> usize {
        self.data.ncols()
    }

    pub fn is_square(&self) -> bool {
        self.rows() == self.cols()
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.data[(row, col)]
    }

    pub fn as_nalgebra(&self) -> &DMatrix<C64> {
        &self.data
    }

    pub fn into_nalgebra(self) -> DMatrix<C64> {
        self.data
    }

    /// Entries in row-major order.
    pub fn to_row_major(&self) -> Vec<C64> {
        let mut out = Vec::with_capacity(self.rows() * self.cols());
        for i in 0..self.rows() {
            for j in 0..self.cols() {
                out.push(self.data[(i, j)]);
            }
        }
        out
    }

    pub fn adjoint(&self) -> Self {
        Self { data: self.data.adjoint() }
    }

    pub fn transpose(&self) -> Self {
        Self { data: self.data.transpose() }
    }

    pub fn trace(&self) -> C64 {
        self.data.diagonal().iter().sum()
    }

    pub fn scale(&self, factor: C64) -> Self {
        Self { data: &self.data * factor }
    }

    pub fn scale_real(&self, factor: f64) -> Self {
        self.scale(c(factor, 0.0))
    }

    pub fn matmul(&self, rhs: &Self) -> Result<Self> {
        if self.cols() != rhs.rows() {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows(),
                self.cols(),
                rhs.rows(),
                rhs.cols()
            )));
        }
        Ok(Self { data: &self.data * &rhs.data })
    }

    pub fn add(&self, rhs: &Self) -> Result<Self> {
        self.same_shape(rhs)?;
        Ok(Self { data: &self.data + &rhs.data })
    }

    pub fn sub(&self, rhs: &Self) -> Result<Self> {
        self.same_shape(rhs)?;
        Ok(Self { data: &self.data - &rhs.data })
    }

    fn same_shape(&self, rhs: &Self) -> Result<()> {
        if self.rows() != rhs.rows() || self.cols() != rhs.cols() {
            return Err(Error::Dimension(format!(
                "shape mismatch {}x{} vs {}x{}",
                self.rows(),
                self.cols(),
                rhs.rows(),
                rhs.cols()
            )));
        }
        Ok(())
    }

    /// Matrix-vector product.
    pub fn apply(&self, v: &[C64]) -> Result<Vec<C64>> {
        if v.len() != self.cols() {
            return Err(Error::Dimension(format!("vector of length {} against {} columns", v.len(), self.cols())));
        }
        let mut out = vec![C64::new(0.0, 0.0); self.rows()];
        for (i, o) in out.iter_mut().enumerate() {
            *o = (0..self.cols()).map(|j| self.data[(i, j)] * v[j]).sum();
        }
        Ok(out)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest `|m_ij - conj(m_ji)|` and where it occurs.
    pub fn hermitian_residual(&self) -> (f64, usize, usize) {
        let mut worst = (0.0, 0, 0);
        if !self.is_square() {
            return (f64::INFINITY, 0, 0);
        }
        for i in 0..self.rows() {
            for j in i..self.cols() {
                let r = (self.data[(i, j)] - self.data[(j, i)].conj()).norm();
                if r > worst.0 {
                    worst = (r, i, j);
                }
            }
        }
        worst
    }

    /// Fails unless square and Hermitian within `tol * max(1, max |m_ij|)`.
    pub fn check_hermitian(&self, tol: f64) -> Result<()> {
        if !self.is_square() {
            return Err(Error::Dimension(format!(
                "Hermitian operator must be square, got {}x{}",
                self.rows(),
                self.cols()
            )));
        }
        let (residual, row, col) = self.hermitian_residual();
        if residual > tol * self.max_abs().max(1.0) {
            return Err(Error::NotHermitian { residual, row, col });
        }
        Ok(())
    }

    /// Maximum entrywise distance to another matrix of the same shape.
    pub fn max_abs_diff(&self, rhs: &Self) -> f64 {
        if self.rows() != rhs.rows() || self.cols() != rhs.cols() {
            return f64::INFINITY;
        }
        self.data.iter().zip(rhs.data.iter()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;

    fn index(&self, idx: (usize, usize)) -> &C64 {
        &self.data[idx]
    }
}

/// Kronecker product `a (x) b`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    let rows = a.rows().checked_mul(b.rows());
    let cols = a.cols().checked_mul(b.cols());
    let (rows, cols) = match (rows, cols) {
        (Some(r), Some(c)) if r <= MAX_DIM && c <= MAX_DIM => (r, c),
        _ => {
            return Err(Error::Dimension(format!(
                "kron of {}x{} and {}x{} exceeds MAX_DIM = {MAX_DIM}",
                a.rows(),
                a.cols(),
                b.rows(),
                b.cols()
            )))
        }
    };
    let (br, bc) = (b.rows(), b.cols());
    let data = DMatrix::from_fn(rows, cols, |r, s| a.data[(r / br, s / bc)] * b.data[(r % br, s % bc)]);
    Ok(ComplexMatrix { data })
}

/// Kronecker product of two vectors under the `i * dim_b + j` convention.
pub fn kron_vec(a: &[C64], b: &[C64]) -> Vec<C64> {
    a.iter().flat_map(|&x| b.iter().map(move |&y| x * y)).collect()
}

/// Partial trace of a bipartite operator, keeping subsystem `keep`.
pub fn partial_trace(rho: &ComplexMatrix, dim_a: usize, dim_b: usize, keep: Subsystem) -> Result<ComplexMatrix> {
    let n = dim_a.checked_mul(dim_b).ok_or_else(|| Error::Dimension("dimension product overflows".into()))?;
    if dim_a == 0 || dim_b == 0 || rho.rows() != n || rho.cols() != n {
        return Err(Error::Dimension(format!(
            "operator {}x{} does not match {dim_a}x{dim_b} bipartition",
            rho.rows(),
            rho.cols()
        )));
    }
    rho.check_hermitian(HERM_TOL)?;
    let data = match keep {
        Subsystem::A => {
            DMatrix::from_fn(dim_a, dim_a, |i, k| (0..dim_b).map(|j| rho.data[(i * dim_b + j, k * dim_b + j)]).sum())
        }
        Subsystem::B => {
            DMatrix::from_fn(dim_b, dim_b, |j, l| (0..dim_a).map(|i| rho.data[(i * dim_b + j, i * dim_b + l)]).sum())
        }
    };
    Ok(ComplexMatrix { data })
}

/// Eigenpairs of a Hermitian matrix, eigenvalues ascending.
#[derive(Clone, Debug)]
pub struct HermitianSpectrum {
    pub eigenvalues: Vec<f64>,
    /// Unitary matrix whose columns are the eigenvectors.
    pub eigenvectors: ComplexMatrix,
}

impl HermitianSpectrum {
    /// `V diag(lambda) V^dagger`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let v = &self.eigenvectors.data;
        let d = DVector::from_iterator(self.eigenvalues.len(), self.eigenvalues.iter().map(|&x| c(x, 0.0)));
        let data = v * DMatrix::from_diagonal(&d) * v.adjoint();
        ComplexMatrix { data }
    }
}

/// Hermitian eigendecomposition. The input is symmetrized as `(m + m^dagger)/2`
/// after the tolerance check.
pub fn eig_hermitian(m: &ComplexMatrix) -> Result<HermitianSpectrum> {
    m.check_hermitian(HERM_TOL)?;
    let sym = (&m.data + m.data.adjoint()) * c(0.5, 0.0);
    let eig = SymmetricEigen::try_new(sym, f64::EPSILON, EIG_MAX_ITER).ok_or_else(|| {
        Error::Numerical(format!("Hermitian eigensolver did not converge on a {}x{} matrix", m.rows(), m.cols()))
    })?;
    let n = eig.eigenvalues.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let eigenvalues: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(n, n, |r, k| eig.eigenvectors[(r, order[k])]);
    let spectrum = HermitianSpectrum { eigenvalues, eigenvectors: ComplexMatrix::from_nalgebra(vectors)? };
    let residual = spectrum.reconstruct().max_abs_diff(m);
    if residual > RECON_TOL * m.max_abs().max(1.0) {
        return Err(Error::Numerical(format!(
            "eigendecomposition reconstruction residual {residual:.3e} exceeds tolerance"
        )));
    }
    Ok(spectrum)
}

/// Normalized pure state on `H_A (x) H_B`.
#[derive(Clone, Debug, PartialEq)]
pub struct BipartitePureState {
    dim_a: usize,
    dim_b: usize,
    amplitudes: Vec<C64>,
}

impl BipartitePureState {
    /// Validates shape, finiteness and `| ||psi|| - 1 | <= NORM_TOL`.
    pub fn new(dim_a: usize, dim_b: usize, amplitudes: Vec<C64>) -> Result<Self> {
        let state = Self::unchecked(dim_a, dim_b, amplitudes)?;
        let norm = state.norm();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::State(format!("state norm {norm} is not 1")));
        }
        Ok(state)
    }

    /// Rescales `amplitudes` to unit norm.
    pub fn normalized(dim_a: usize, dim_b: usize, mut amplitudes: Vec<C64>) -> Result<Self> {
        let norm = vector_norm(&amplitudes);
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::State("cannot normalize a zero or non-finite vector".into()));
        }
        amplitudes.iter_mut().for_each(|z| *z /= norm);
        Self::new(dim_a, dim_b, amplitudes)
    }

    fn unchecked(dim_a: usize, dim_b: usize, amplitudes: Vec<C64>) -> Result<Self> {
        let n = dim_a.saturating_mul(dim_b);
        if dim_a == 0 || dim_b == 0 || n > MAX_DIM {
            return Err(Error::Dimension(format!("invalid bipartition {dim_a}x{dim_b}")));
        }
        if amplitudes.len() != n {
            return Err(Error::Dimension(format!("{} amplitudes for a {dim_a}x{dim_b} bipartition", amplitudes.len())));
        }
        if let Some(i) = amplitudes.iter().position(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::NonFinite { row: i, col: 0 });
        }
        Ok(Self { dim_a, dim_b, amplitudes })
    }

    pub fn dim_a(&self) -> usize {
        self.dim_a
    }

    pub fn dim_b(&self) -> usize {
        self.dim_b
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn amplitude(&self, i: usize, j: usize) -> C64 {
        self.amplitudes[i * self.dim_b + j]
    }

    pub fn norm(&self) -> f64 {
        vector_norm(&self.amplitudes)
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &Self) -> C64 {
        self.amplitudes.iter().zip(&other.amplitudes).map(|(a, b)| a.conj() * b).sum()
    }

    /// Coefficient matrix `Psi[i, j] = <i, j|psi>` of shape `dim_a x dim_b`.
    pub fn coefficient_matrix(&self) -> DMatrix<C64> {
        DMatrix::from_row_slice(self.dim_a, self.dim_b, &self.amplitudes)
    }

    /// `|psi><psi|` on the full space.
    pub fn density_matrix(&self) -> ComplexMatrix {
        let v = DVector::from_column_slice(&self.amplitudes);
        ComplexMatrix { data: &v * v.adjoint() }
    }

    /// Reduced density matrix of `keep`, computed as `Psi Psi^dagger` or
    /// `Psi^T Psi^*` without forming the full density matrix.
    pub fn reduced_density(&self, keep: Subsystem) -> ComplexMatrix {
        let psi = self.coefficient_matrix();
        let data = match keep {
            Subsystem::A => &psi * psi.adjoint(),
            Subsystem::B => psi.transpose() * psi.map(|z| z.conj()),
        };
        ComplexMatrix { data }
    }

    /// Eigenvalues of either reduced density matrix (squared Schmidt
    /// coefficients), descending and normalized to sum to one.
    ///
    /// Obtained from the singular values of the coefficient matrix, so small
    /// probabilities keep relative accuracy far below machine epsilon.
    pub fn schmidt_probabilities(&self) -> Result<Vec<f64>> {
        let svd = SVD::try_new(self.coefficient_matrix(), false, false, f64::EPSILON, 0)
            .ok_or_else(|| Error::Numerical("Schmidt decomposition did not converge".into()))?;
        let mut p: Vec<f64> = svd.singular_values.iter().map(|s| s * s).collect();
        p.sort_by(|x, y| y.total_cmp(x));
        let total: f64 = p.iter().sum();
        if total <= 0.0 || !total.is_finite() {
            return Err(Error::State("state has zero norm".into()));
        }
        p.iter_mut().for_each(|x| *x /= total);
        Ok(p)
    }

    /// Same state with the factors exchanged, i.e. on `H_B (x) H_A`.
    pub fn swapped(&self) -> Self {
        let mut amplitudes = vec![C64::new(0.0, 0.0); self.dim()];
        for i in 0..self.dim_a {
            for j in 0..self.dim_b {
                amplitudes[j * self.dim_a + i] = self.amplitude(i, j);
            }
        }
        Self { dim_a: self.dim_b, dim_b: self.dim_a, amplitudes }
    }
}

pub(crate) fn vector_norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Time-evolution operator `exp(-i H t)` for a fixed Hermitian `H`, built
/// from one eigendecomposition and reused for every `t`.
#[derive(Clone, Debug)]
pub struct Propagator {
    spectrum: HermitianSpectrum,
}

impl Propagator {
    pub fn new(h: &ComplexMatrix) -> Result<Self> {
        Ok(Self { spectrum: eig_hermitian(h)? })
    }

    pub fn dim(&self) -> usize {
        self.spectrum.eigenvalues.len()
    }

    pub fn spectrum(&self) -> &HermitianSpectrum {
        &self.spectrum
    }

    /// Projects `psi0` onto the eigenbasis once; the result evaluates
    /// `exp(-i H t)|psi0>` at any `t` in `O(dim^2)`.
    pub fn trajectory(&self, psi0: &BipartitePureState) -> Result<Trajectory<'_>> {
        if psi0.dim() != self.dim() {
            return Err(Error::Dimension(format!(
                "state of dimension {} against Hamiltonian of dimension {}",
                psi0.dim(),
                self.dim()
            )));
        }
        let v = self.spectrum.eigenvectors.as_nalgebra();
        let psi = DVector::from_column_slice(psi0.amplitudes());
        let coeffs = v.adjoint() * psi;
        Ok(Trajectory { propagator: self, coeffs, dim_a: psi0.dim_a(), dim_b: psi0.dim_b() })
    }

    pub fn evolve(&self, psi0: &BipartitePureState, t: f64) -> Result<BipartitePureState> {
        self.trajectory(psi0)?.at(t)
    }
}

/// A state expanded in the eigenbasis of a [`Propagator`].
#[derive(Clone, Debug)]
pub struct Trajectory<'a> {
    propagator: &'a Propagator,
    coeffs: DVector<C64>,
    dim_a: usize,
    dim_b: usize,
}

impl Trajectory<'_> {
    pub fn at(&self, t: f64) -> Result<BipartitePureState> {
        if !t.is_finite() {
            return Err(Error::Domain(format!("non-finite time {t}")));
        }
        let spec = &self.propagator.spectrum;
        let phased = DVector::from_iterator(
            self.coeffs.len(),
            self.coeffs.iter().zip(&spec.eigenvalues).map(|(cf, &e)| cf * C64::from_polar(1.0, -e * t)),
        );
        let psi = spec.eigenvectors.as_nalgebra() * phased;
        BipartitePureState::unchecked(self.dim_a, self.dim_b, psi.iter().copied().collect())
    }
}

/// `exp(-i H t)|psi0>` with `hbar = 1`.
pub fn evolve_state(h: &ComplexMatrix, psi0: &BipartitePureState, t: f64) -> Result<BipartitePureState> {
    Propagator::new(h)?.evolve(psi0, t)
}

/// Pauli and ladder operators used throughout the models and tests.
pub mod ops {
    use super::{c, ComplexMatrix, C64};

    pub fn pauli_x() -> ComplexMatrix {
        ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]).unwrap()
    }

    pub fn pauli_y() -> ComplexMatrix {
        ComplexMatrix::from_row_major(2, 2, vec![c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0)]).unwrap()
    }

    pub fn pauli_z() -> ComplexMatrix {
        ComplexMatrix::from_diagonal(&[1.0, -1.0])
    }

    /// Bosonic annihilation operator on Fock states `0..=n_max`.
    pub fn annihilation(n_max: usize) -> ComplexMatrix {
        let d = n_max + 1;
        ComplexMatrix::from_fn(d, d, |i, j| if j == i + 1 { c((j as f64).sqrt(), 0.0) } else { C64::new(0.0, 0.0) })
            .unwrap()
    }

    pub fn creation(n_max: usize) -> ComplexMatrix {
        annihilation(n_max).adjoint()
    }

    pub fn number(n_max: usize) -> ComplexMatrix {
        let diag: Vec<f64> = (0..=n_max).map(|n| n as f64).collect();
        ComplexMatrix::from_diagonal(&diag)
    }
}
