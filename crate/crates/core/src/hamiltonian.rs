//! Hamiltonians written as `H = sum_n A_n (x) B_n` and product initial states.

use crate::error::{Error, Result};
use crate::linalg::{kron, kron_vec, vector_norm, BipartitePureState, ComplexMatrix, C64, HERM_TOL, NORM_TOL};

/// Ordered list of `(A_n, B_n)` pairs. Individual terms need not be Hermitian;
/// only the assembled sum is checked.
#[derive(Clone, Debug)]
pub struct ProductHamiltonian {
    dim_a: usize,
    dim_b: usize,
    terms: Vec<(ComplexMatrix, ComplexMatrix)>,
}

impl ProductHamiltonian {
    pub fn new(terms: Vec<(ComplexMatrix, ComplexMatrix)>) -> Result<Self> {
        let (a0, b0) = terms.first().ok_or_else(|| Error::Model("Hamiltonian needs at least one term".into()))?;
        let (dim_a, dim_b) = (a0.rows(), b0.rows());
        for (n, (a, b)) in terms.iter().enumerate() {
            if !a.is_square() || a.rows() != dim_a {
                return Err(Error::Dimension(format!(
                    "term {n}: A is {}x{}, expected {dim_a}x{dim_a}",
                    a.rows(),
                    a.cols()
                )));
            }
            if !b.is_square() || b.rows() != dim_b {
                return Err(Error::Dimension(format!(
                    "term {n}: B is {}x{}, expected {dim_b}x{dim_b}",
                    b.rows(),
                    b.cols()
                )));
            }
        }
        let h = Self { dim_a, dim_b, terms };
        h.assemble()?;
        Ok(h)
    }

    pub fn dim_a(&self) -> usize {
        self.dim_a
    }

    pub fn dim_b(&self) -> usize {
        self.dim_b
    }

    pub fn terms(&self) -> &[(ComplexMatrix, ComplexMatrix)] {
        &self.terms
    }

    /// Dense `sum_n kron(A_n, B_n)`, checked for hermiticity.
    pub fn assemble(&self) -> Result<ComplexMatrix> {
        let mut terms = self.terms.iter();
        let (a, b) = terms.next().expect("at least one term");
        let mut h = kron(a, b)?;
        for (a, b) in terms {
            h = h.add(&kron(a, b)?)?;
        }
        h.check_hermitian(HERM_TOL)?;
        Ok(h)
    }

    /// The same Hamiltonian on `H_B (x) H_A`.
    pub fn swapped(&self) -> Self {
        let terms = self.terms.iter().map(|(a, b)| (b.clone(), a.clone())).collect();
        Self { dim_a: self.dim_b, dim_b: self.dim_a, terms }
    }
}

/// `|psi>_A (x) |psi>_B` with each factor normalized.
#[derive(Clone, Debug, PartialEq)]
pub struct ProductState {
    psi_a: Vec<C64>,
    psi_b: Vec<C64>,
}

impl ProductState {
    pub fn new(psi_a: Vec<C64>, psi_b: Vec<C64>) -> Result<Self> {
        for (name, v) in [("A", &psi_a), ("B", &psi_b)] {
            if v.is_empty() {
                return Err(Error::Dimension(format!("empty factor {name}")));
            }
            if v.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
                return Err(Error::State(format!("factor {name} has non-finite amplitudes")));
            }
            let norm = vector_norm(v);
            if (norm - 1.0).abs() > NORM_TOL {
                return Err(Error::State(format!("factor {name} has norm {norm}")));
            }
        }
        Ok(Self { psi_a, psi_b })
    }

    /// Normalizes both factors before validating.
    pub fn normalized(mut psi_a: Vec<C64>, mut psi_b: Vec<C64>) -> Result<Self> {
        for v in [&mut psi_a, &mut psi_b] {
            let norm = vector_norm(v);
            if norm == 0.0 || !norm.is_finite() {
                return Err(Error::State("cannot normalize a zero or non-finite factor".into()));
            }
            v.iter_mut().for_each(|z| *z /= norm);
        }
        Self::new(psi_a, psi_b)
    }

    /// Basis state `|i>_A (x) |j>_B`.
    pub fn basis(dim_a: usize, i: usize, dim_b: usize, j: usize) -> Result<Self> {
        if i >= dim_a || j >= dim_b {
            return Err(Error::Dimension(format!("basis index ({i}, {j}) outside {dim_a}x{dim_b}")));
        }
        let mut a = vec![C64::new(0.0, 0.0); dim_a];
        let mut b = vec![C64::new(0.0, 0.0); dim_b];
        a[i] = C64::new(1.0, 0.0);
        b[j] = C64::new(1.0, 0.0);
        Self::new(a, b)
    }

    pub fn psi_a(&self) -> &[C64] {
        &self.psi_a
    }

    pub fn psi_b(&self) -> &[C64] {
        &self.psi_b
    }

    pub fn dim_a(&self) -> usize {
        self.psi_a.len()
    }

    pub fn dim_b(&self) -> usize {
        self.psi_b.len()
    }

    pub fn swapped(&self) -> Self {
        Self { psi_a: self.psi_b.clone(), psi_b: self.psi_a.clone() }
    }

    /// Checks the factor dimensions against a Hamiltonian.
    pub fn check_compatible(&self, h: &ProductHamiltonian) -> Result<()> {
        if self.dim_a() != h.dim_a() || self.dim_b() != h.dim_b() {
            return Err(Error::Dimension(format!(
                "state is {}x{}, Hamiltonian is {}x{}",
                self.dim_a(),
                self.dim_b(),
                h.dim_a(),
                h.dim_b()
            )));
        }
        Ok(())
    }
}

/// Full-space amplitudes `psi_a[i] * psi_b[j]` at index `i * dim_b + j`.
pub fn product_state_vector(s: &ProductState) -> Result<BipartitePureState> {
    BipartitePureState::new(s.dim_a(), s.dim_b(), kron_vec(&s.psi_a, &s.psi_b))
}
