//! Scalar abstraction shared by the numerical modules.
//!
//! Everything that touches amplitudes or energies is generic over [`Real`],
//! which is implemented for `f32` and `f64`. Tolerances quoted in tests
//! assume `f64`.

use nalgebra::RealField;
use num_complex::Complex;
use num_traits::{FromPrimitive, ToPrimitive};

/// Real scalar usable for state amplitudes, Hamiltonian entries and eigensolves.
pub trait Real: RealField + Copy + FromPrimitive + ToPrimitive {
    /// Lossy conversion from `f64`; used for literal constants.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().expect("scalar representable as f64")
    }

    fn half() -> Self {
        Self::lit(0.5)
    }

    fn frac_1_sqrt_2() -> Self {
        Self::lit(std::f64::consts::FRAC_1_SQRT_2)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// `exp(-i·phase)`, the propagator factor for an energy level.
pub(crate) fn phase_factor<T: Real>(phase: T) -> Complex<T> {
    let (s, c) = phase.sin_cos();
    Complex::new(c, -s)
}

pub(crate) fn czero<T: Real>() -> Complex<T> {
    Complex::new(T::zero(), T::zero())
}

pub(crate) fn cone<T: Real>() -> Complex<T> {
    Complex::new(T::one(), T::zero())
}

pub(crate) fn creal<T: Real>(x: T) -> Complex<T> {
    Complex::new(x, T::zero())
}

/// `|z|`; `Complex::norm` needs `num_traits::Float`, which `Real` does not require.
pub(crate) fn cabs<T: Real>(z: Complex<T>) -> T {
    z.norm_sqr().sqrt()
}
