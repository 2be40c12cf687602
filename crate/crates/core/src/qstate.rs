//! State vectors over a two-register qubit system and dense operators on them.
//!
//! Basis layout: the amplitude of `|w⟩_A ⊗ |y⟩_B` lives at index
//! `w · 2^{n_b} + y`, and bit `k` of an integer is qubit `k` of its register.
//! `|0⟩` is spin-up along z.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::{cabs, cone, creal, czero, Real};

/// Largest total qubit count a dense state may have unless a cap is passed explicitly.
pub const DEFAULT_QUBIT_CAP: usize = 26;

/// Largest total qubit count for dense operators and their diagonalization.
pub const DENSE_OPERATOR_QUBIT_CAP: usize = 12;

/// Which register an operation acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum Subsystem {
    A,
    B,
}

/// Bit `k` of `x`, i.e. qubit `k` of a register holding basis state `x`.
#[inline]
pub fn bit(x: u64, k: usize) -> u8 {
    ((x >> k) & 1) as u8
}

pub(crate) fn check_cap(what: &'static str, qubits: usize, cap: usize) -> Result<()> {
    if qubits > cap {
        Err(Error::Capacity {
            what,
            requested: qubits,
            cap,
        })
    } else {
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector<T: Real> {
    n_a: usize,
    n_b: usize,
    amps: Vec<Complex<T>>,
}

impl<T: Real> StateVector<T> {
    pub fn new(n_a: usize, n_b: usize, amps: Vec<Complex<T>>) -> Result<Self> {
        check_cap("state vector", n_a + n_b, DEFAULT_QUBIT_CAP)?;
        let expected = 1usize << (n_a + n_b);
        if amps.len() != expected {
            return Err(Error::Shape {
                expected,
                actual: amps.len(),
            });
        }
        Ok(Self { n_a, n_b, amps })
    }

    /// All-zero amplitudes. Not a valid quantum state; used as an accumulator.
    pub fn zeros(n_a: usize, n_b: usize) -> Result<Self> {
        check_cap("state vector", n_a + n_b, DEFAULT_QUBIT_CAP)?;
        Ok(Self {
            n_a,
            n_b,
            amps: vec![czero(); 1 << (n_a + n_b)],
        })
    }

    /// Computational basis state `|index⟩` of a single `n`-qubit register (held as A).
    pub fn basis(n: usize, index: u64) -> Result<Self> {
        let mut s = Self::zeros(n, 0)?;
        let i = index as usize;
        if i >= s.amps.len() {
            return Err(crate::error::domain(format!(
                "basis index {index} out of range for {n} qubits"
            )));
        }
        s.amps[i] = cone();
        Ok(s)
    }

    /// `|+⟩^{⊗n}`.
    pub fn plus(n: usize) -> Result<Self> {
        let mut s = Self::zeros(n, 0)?;
        let v = creal(T::one() / T::lit((s.amps.len() as f64).sqrt()));
        s.amps.iter_mut().for_each(|a| *a = v);
        Ok(s)
    }

    /// `|−⟩^{⊗n}`.
    pub fn minus(n: usize) -> Result<Self> {
        let mut s = Self::plus(n)?;
        for (i, a) in s.amps.iter_mut().enumerate() {
            if (i as u64).count_ones() % 2 == 1 {
                *a = -*a;
            }
        }
        Ok(s)
    }

    /// Single-qubit state from its two amplitudes.
    pub fn qubit(a0: Complex<T>, a1: Complex<T>) -> Self {
        Self {
            n_a: 1,
            n_b: 0,
            amps: vec![a0, a1],
        }
    }

    /// Reinterpret the register split without touching amplitudes.
    pub fn with_split(mut self, n_a: usize, n_b: usize) -> Result<Self> {
        if n_a + n_b != self.num_qubits() {
            return Err(Error::Shape {
                expected: 1 << self.num_qubits(),
                actual: 1 << (n_a + n_b),
            });
        }
        self.n_a = n_a;
        self.n_b = n_b;
        Ok(self)
    }

    pub fn num_qubits_a(&self) -> usize {
        self.n_a
    }

    pub fn num_qubits_b(&self) -> usize {
        self.n_b
    }

    pub fn num_qubits(&self) -> usize {
        self.n_a + self.n_b
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amps(&self) -> &[Complex<T>] {
        &self.amps
    }

    pub fn amps_mut(&mut self) -> &mut [Complex<T>] {
        &mut self.amps
    }

    pub fn into_amps(self) -> Vec<Complex<T>> {
        self.amps
    }

    #[inline]
    pub fn index(&self, w: u64, y: u64) -> usize {
        ((w << self.n_b) | y) as usize
    }

    #[inline]
    pub fn amplitude(&self, w: u64, y: u64) -> Complex<T> {
        self.amps[self.index(w, y)]
    }

    pub fn norm_sqr(&self) -> T {
        self.amps
            .iter()
            .fold(T::zero(), |acc, a| acc + a.norm_sqr())
    }

    pub fn normalized(mut self) -> Self {
        let n = self.norm_sqr().sqrt();
        if n > T::zero() {
            let inv = T::one() / n;
            self.amps.iter_mut().for_each(|a| *a = a.scale(inv));
        }
        self
    }

    /// Largest `|u_i − v_i|`; `None` if dimensions differ.
    pub fn max_abs_diff(&self, other: &Self) -> Option<T> {
        if self.amps.len() != other.amps.len() {
            return None;
        }
        Some(
            self.amps
                .iter()
                .zip(&other.amps)
                .fold(T::zero(), |m, (x, y)| m.max(cabs(*x - *y))),
        )
    }

    /// `|⟨self|other⟩|²`.
    pub fn fidelity(&self, other: &Self) -> Result<T> {
        Ok(inner(self, other)?.norm_sqr())
    }

    pub fn is_finite(&self) -> bool {
        self.amps
            .iter()
            .all(|a| a.re.is_finite() && a.im.is_finite())
    }
}

/// `u ⊗ v` with the default qubit cap. All qubits of `u` become register A and
/// all qubits of `v` register B.
pub fn tensor<T: Real>(u: &StateVector<T>, v: &StateVector<T>) -> Result<StateVector<T>> {
    tensor_with_cap(u, v, DEFAULT_QUBIT_CAP)
}

pub fn tensor_with_cap<T: Real>(
    u: &StateVector<T>,
    v: &StateVector<T>,
    cap: usize,
) -> Result<StateVector<T>> {
    let n_a = u.num_qubits();
    let n_b = v.num_qubits();
    check_cap("tensor product", n_a + n_b, cap.min(DEFAULT_QUBIT_CAP))?;
    let mut amps = Vec::with_capacity(u.dim() * v.dim());
    for &x in &u.amps {
        amps.extend(v.amps.iter().map(|&y| x * y));
    }
    Ok(StateVector { n_a, n_b, amps })
}

/// `⟨u|v⟩`, conjugate-linear in `u`.
pub fn inner<T: Real>(u: &StateVector<T>, v: &StateVector<T>) -> Result<Complex<T>> {
    if u.dim() != v.dim() {
        return Err(Error::Shape {
            expected: u.dim(),
            actual: v.dim(),
        });
    }
    Ok(u.amps
        .iter()
        .zip(&v.amps)
        .fold(czero(), |acc, (x, y)| acc + x.conj() * y))
}

/// In-place normalized Walsh-Hadamard transform on a contiguous register.
pub fn fwht<T: Real>(amps: &mut [Complex<T>]) {
    let nbits = amps.len().trailing_zeros() as usize;
    debug_assert!(amps.len().is_power_of_two());
    fwht_bits(amps, 0, nbits);
}

/// Hadamard on qubits `first_bit .. first_bit + nbits` of every basis index.
fn fwht_bits<T: Real>(amps: &mut [Complex<T>], first_bit: usize, nbits: usize) {
    let r = T::frac_1_sqrt_2();
    for k in first_bit..first_bit + nbits {
        let half = 1usize << k;
        for block in amps.chunks_mut(half << 1) {
            let (lo, hi) = block.split_at_mut(half);
            for (x, y) in lo.iter_mut().zip(hi.iter_mut()) {
                let (a, b) = (*x, *y);
                *x = (a + b).scale(r);
                *y = (a - b).scale(r);
            }
        }
    }
}

/// Hadamard on every qubit of one register; O(n·2^n).
pub fn fwht_subsystem<T: Real>(psi: &StateVector<T>, subsystem: Subsystem) -> StateVector<T> {
    let mut out = psi.clone();
    fwht_subsystem_in_place(&mut out, subsystem);
    out
}

pub fn fwht_subsystem_in_place<T: Real>(psi: &mut StateVector<T>, subsystem: Subsystem) {
    let (first, count) = match subsystem {
        Subsystem::A => (psi.n_b, psi.n_a),
        Subsystem::B => (0, psi.n_b),
    };
    fwht_bits(&mut psi.amps, first, count);
}

/// Square complex matrix acting on a [`StateVector`].
#[derive(Debug, Clone, PartialEq)]
pub struct DenseOperator<T: Real> {
    matrix: DMatrix<Complex<T>>,
}

impl<T: Real> DenseOperator<T> {
    pub fn from_matrix(matrix: DMatrix<Complex<T>>) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::Shape {
                expected: matrix.nrows(),
                actual: matrix.ncols(),
            });
        }
        Ok(Self { matrix })
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            matrix: DMatrix::from_element(dim, dim, czero()),
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            matrix: DMatrix::identity(dim, dim),
        }
    }

    pub fn from_real_diagonal(diag: &[T]) -> Self {
        let mut op = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            op.matrix[(i, i)] = creal(d);
        }
        op
    }

    pub fn pauli_x() -> Self {
        let mut op = Self::zeros(2);
        op.matrix[(0, 1)] = cone();
        op.matrix[(1, 0)] = cone();
        op
    }

    pub fn pauli_z() -> Self {
        Self::from_real_diagonal(&[T::one(), -T::one()])
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex<T> {
        self.matrix[(row, col)]
    }

    pub fn matrix(&self) -> &DMatrix<Complex<T>> {
        &self.matrix
    }

    pub fn diagonal(&self) -> Vec<Complex<T>> {
        (0..self.dim()).map(|i| self.matrix[(i, i)]).collect()
    }

    /// `self ⊗ other`, `self` acting on the high bits.
    pub fn kron(&self, other: &Self) -> Self {
        Self {
            matrix: self.matrix.kronecker(&other.matrix),
        }
    }

    pub fn scale(&self, factor: T) -> Self {
        Self {
            matrix: self.matrix.map(|x| x.scale(factor)),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(Error::Shape {
                expected: self.dim(),
                actual: other.dim(),
            });
        }
        Ok(Self {
            matrix: &self.matrix + &other.matrix,
        })
    }

    pub fn adjoint(&self) -> Self {
        Self {
            matrix: self.matrix.adjoint(),
        }
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        self.matrix
            .iter()
            .zip(other.matrix.iter())
            .fold(T::zero(), |m, (x, y)| m.max(cabs(*x - *y)))
    }

    pub fn is_hermitian(&self, tol: T) -> bool {
        self.max_abs_diff(&self.adjoint()) <= tol
    }

    /// Eigenvalues of a Hermitian operator in ascending order.
    pub fn eigenvalues(&self) -> Result<Vec<T>> {
        check_cap(
            "dense diagonalization",
            self.dim().trailing_zeros() as usize,
            DENSE_OPERATOR_QUBIT_CAP,
        )?;
        let mut ev: Vec<T> = SymmetricEigen::new(self.matrix.clone())
            .eigenvalues
            .iter()
            .copied()
            .collect();
        ev.sort_by(|a, b| a.partial_cmp(b).expect("finite eigenvalues"));
        Ok(ev)
    }
}

/// Matrix-vector product; no normalization.
pub fn apply<T: Real>(op: &DenseOperator<T>, psi: &StateVector<T>) -> Result<StateVector<T>> {
    if op.dim() != psi.dim() {
        return Err(Error::Shape {
            expected: op.dim(),
            actual: psi.dim(),
        });
    }
    let m = &op.matrix;
    let amps = (0..m.nrows())
        .map(|i| {
            m.row(i)
                .iter()
                .zip(&psi.amps)
                .fold(czero(), |acc, (h, x)| acc + *h * *x)
        })
        .collect();
    Ok(StateVector {
        n_a: psi.n_a,
        n_b: psi.n_b,
        amps,
    })
}
