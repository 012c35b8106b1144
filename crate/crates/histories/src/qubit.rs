//! Qubit fixtures: Pauli operators, common gates and dichotomic observables.

use num_complex::Complex64;

use crate::engine::ObservableSpec;
use crate::tensor::{Operator, StateVector};

pub fn pauli_z() -> Operator {
    Operator::from_real(&[&[1.0, 0.0], &[0.0, -1.0]]).unwrap()
}

pub fn pauli_x() -> Operator {
    Operator::from_real(&[&[0.0, 1.0], &[1.0, 0.0]]).unwrap()
}

pub fn pauli_y() -> Operator {
    Operator::new(
        2,
        vec![
            Complex64::ZERO,
            Complex64::new(0.0, -1.0),
            Complex64::new(0.0, 1.0),
            Complex64::ZERO,
        ],
    )
    .unwrap()
}

pub fn hadamard() -> Operator {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    Operator::from_real(&[&[s, s], &[s, -s]]).unwrap()
}

/// Real rotation by `theta` in the ZX plane (R_y(theta)).
pub fn rotation_y(theta: f64) -> Operator {
    let (s, c) = (theta / 2.0).sin_cos();
    Operator::from_real(&[&[c, -s], &[s, c]]).unwrap()
}

/// Z observable: eigenvalues (+1, -1) on (|0>, |1>).
pub fn z_observable() -> ObservableSpec {
    ObservableSpec::new(
        "Z",
        vec![1.0, -1.0],
        vec![StateVector::basis(2, 0), StateVector::basis(2, 1)],
    )
    .unwrap()
}

/// X observable: eigenvalues (+1, -1) on (|+>, |->).
pub fn x_observable() -> ObservableSpec {
    rotated_z_observable("X", std::f64::consts::FRAC_PI_2)
}

/// The dichotomic observable cos(theta) Z + sin(theta) X, with eigenvalue
/// order (+1, -1) and real eigenvectors
/// (cos(theta/2), sin(theta/2)) and (-sin(theta/2), cos(theta/2)).
///
/// Fixing the eigenvectors analytically keeps amplitudes reproducible;
/// nothing here goes through a numerical diagonalization.
pub fn rotated_z_observable(name: &str, theta: f64) -> ObservableSpec {
    let (s, c) = (theta / 2.0).sin_cos();
    ObservableSpec::new(
        name,
        vec![1.0, -1.0],
        vec![
            StateVector::from_real(&[c, s]).unwrap(),
            StateVector::from_real(&[-s, c]).unwrap(),
        ],
    )
    .unwrap()
}

/// -(Z+X)/sqrt(2), the first primed observable of the temporal CHSH setup.
pub fn chsh_a2_observable() -> ObservableSpec {
    rotated_z_observable("-(Z+X)/sqrt2", 5.0 * std::f64::consts::FRAC_PI_4)
}

/// (Z-X)/sqrt(2), the second primed observable of the temporal CHSH setup.
pub fn chsh_b2_observable() -> ObservableSpec {
    rotated_z_observable("(Z-X)/sqrt2", -std::f64::consts::FRAC_PI_4)
}
