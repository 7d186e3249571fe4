//! Dense complex linear algebra for operators on at most a few qubits.

mod eigen;
mod matrix;
mod state;

pub use eigen::{gram_schmidt, hermitian_eig, psd_sqrt, Eigen, HERMITIAN_TOL, NEGATIVE_REJECT};
pub use matrix::Matrix;
pub use state::{bits_to_index, index_to_bits, StateVector};

pub type C64 = num_complex::Complex64;

/// Kronecker product `a ⊗ b`.
pub fn kron(a: &Matrix, b: &Matrix) -> Matrix {
    a.kron(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn arb_matrix(rows: usize, cols: usize) -> impl Strategy<Value = Matrix> {
        proptest::collection::vec((-3.0f64..3.0, -3.0f64..3.0), rows * cols).prop_map(move |xs| {
            Matrix::from_vec(rows, cols, xs.into_iter().map(|(r, i)| C64::new(r, i)).collect())
                .unwrap()
        })
    }

    proptest! {
        #[test]
        fn kron_matches_double_loop_oracle(a in arb_matrix(2, 2), b in arb_matrix(2, 2)) {
            let k = kron(&a, &b);
            for i in 0..2 {
                for j in 0..2 {
                    for r in 0..2 {
                        for c in 0..2 {
                            prop_assert_eq!(k[(i * 2 + r, j * 2 + c)], a[(i, j)] * b[(r, c)]);
                        }
                    }
                }
            }
        }

        #[test]
        fn kron_is_associative(a in arb_matrix(2, 2), b in arb_matrix(2, 1), c in arb_matrix(1, 2)) {
            let left = kron(&kron(&a, &b), &c);
            let right = kron(&a, &kron(&b, &c));
            prop_assert!(left.max_abs_diff(&right).unwrap() <= 1e-12);
        }

        #[test]
        fn dagger_is_an_involution(m in arb_matrix(3, 4)) {
            prop_assert_eq!(m.dagger().dagger(), m);
        }

        #[test]
        fn dagger_reverses_products(a in arb_matrix(3, 4), b in arb_matrix(4, 2)) {
            let lhs = (&a * &b).dagger();
            let rhs = &b.dagger() * &a.dagger();
            prop_assert!(lhs.max_abs_diff(&rhs).unwrap() <= 1e-12);
        }
    }
}
