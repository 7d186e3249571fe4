use super::{Matrix, StateVector, C64};
use crate::error::{Error, Result};

/// Input Hermiticity tolerance, `max |m - m^dagger|`.
pub const HERMITIAN_TOL: f64 = 1e-10;
/// Eigenvalues in `[-NEGATIVE_REJECT, 0)` are clamped to zero by [`psd_sqrt`].
pub const NEGATIVE_REJECT: f64 = 1e-8;
/// Components below this modulus are skipped when fixing eigenvector phases.
const PHASE_TOL: f64 = 1e-12;
const MAX_SWEEPS: usize = 64;

/// Spectral decomposition `m = V diag(values) V^dagger`.
#[derive(Debug, Clone)]
pub struct Eigen {
    /// Eigenvalues in ascending order.
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors, `vectors[i]` belonging to `values[i]`.
    pub vectors: Vec<StateVector>,
}

impl Eigen {
    /// Eigenvectors as the columns of a unitary matrix.
    pub fn vector_matrix(&self) -> Matrix {
        let n = self.values.len();
        Matrix::from_fn(n, n, |i, j| self.vectors[j][i])
    }

    /// `V f(Lambda) V^dagger`.
    pub fn reconstruct_with(&self, f: impl Fn(f64) -> f64) -> Matrix {
        let n = self.values.len();
        let mut out = Matrix::zeros(n, n);
        for (&lambda, v) in self.values.iter().zip(&self.vectors) {
            let w = f(lambda);
            if w == 0.0 {
                continue;
            }
            out = &out + &Matrix::outer(v, v).scale_real(w);
        }
        out
    }

    pub fn reconstruct(&self) -> Matrix {
        self.reconstruct_with(|x| x)
    }
}

/// Eigendecomposition of a Hermitian matrix by cyclic complex Jacobi rotations.
///
/// Each eigenvector is scaled by a global phase so that its first component
/// of non-negligible modulus is real and positive.
pub fn hermitian_eig(m: &Matrix) -> Result<Eigen> {
    if !m.is_square() {
        return Err(Error::NotSquare(m.rows(), m.cols()));
    }
    let defect = m.hermiticity_defect();
    if !(defect <= HERMITIAN_TOL) {
        return Err(Error::NotHermitian(defect));
    }
    let n = m.rows();
    let mut a = Matrix::from_fn(n, n, |i, j| {
        if i == j {
            C64::new(m[(i, i)].re, 0.0)
        } else {
            (m[(i, j)] + m[(j, i)].conj()) * 0.5
        }
    });
    let mut v = Matrix::identity(n);

    let mut converged = false;
    for sweep in 0..MAX_SWEEPS {
        let off = off_diagonal_norm_sqr(&a);
        if off == 0.0 {
            converged = true;
            break;
        }
        let scale: f64 = (0..n).map(|i| a[(i, i)].re.powi(2)).sum::<f64>() + off;
        if off <= scale * 1e-34 {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                let g = apq.norm();
                if g == 0.0 {
                    continue;
                }
                let (app, aqq) = (a[(p, p)].re, a[(q, q)].re);
                // Past the first few sweeps, drop entries that no longer
                // register against both diagonal entries.
                if sweep > 3 && app.abs() + 100.0 * g == app.abs() && aqq.abs() + 100.0 * g == aqq.abs() {
                    a[(p, q)] = C64::new(0.0, 0.0);
                    a[(q, p)] = C64::new(0.0, 0.0);
                    continue;
                }
                rotate(&mut a, &mut v, p, q, apq / g, g);
            }
        }
    }
    if !converged {
        return Err(Error::NoConvergence(MAX_SWEEPS));
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let vectors = order
        .iter()
        .map(|&j| v.column(j).with_canonical_phase(PHASE_TOL))
        .collect();
    Ok(Eigen { values, vectors })
}

/// Applies the rotation that annihilates `a[(p,q)] = g * e` with `|e| = 1`.
fn rotate(a: &mut Matrix, v: &mut Matrix, p: usize, q: usize, e: C64, g: f64) {
    let n = a.rows();
    let theta = (a[(q, q)].re - a[(p, p)].re) / (2.0 * g);
    let t = if theta.is_infinite() {
        0.5 / theta
    } else {
        theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;
    let eb = e.conj();
    // J = diag(1, conj(e)) * [[c, s], [-s, c]] acting on coordinates (p, q).
    let j_pp = C64::new(c, 0.0);
    let j_pq = C64::new(s, 0.0);
    let j_qp = eb * (-s);
    let j_qq = eb * c;

    // A <- A J and V <- V J.
    for mat in [&mut *a, &mut *v] {
        for i in 0..n {
            let (x, y) = (mat[(i, p)], mat[(i, q)]);
            mat[(i, p)] = x * j_pp + y * j_qp;
            mat[(i, q)] = x * j_pq + y * j_qq;
        }
    }
    // A <- J^dagger A.
    for k in 0..n {
        let (x, y) = (a[(p, k)], a[(q, k)]);
        a[(p, k)] = j_pp.conj() * x + j_qp.conj() * y;
        a[(q, k)] = j_pq.conj() * x + j_qq.conj() * y;
    }
    a[(p, q)] = C64::new(0.0, 0.0);
    a[(q, p)] = C64::new(0.0, 0.0);
    a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = C64::new(a[(q, q)].re, 0.0);
}

fn off_diagonal_norm_sqr(a: &Matrix) -> f64 {
    let n = a.rows();
    let mut total = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                total += a[(i, j)].norm_sqr();
            }
        }
    }
    total
}

/// Principal square root of a positive semi-definite Hermitian matrix.
///
/// Slightly negative eigenvalues (down to `-1e-8`) are treated as zero.
pub fn psd_sqrt(m: &Matrix) -> Result<Matrix> {
    let eig = hermitian_eig(m)?;
    if let Some(&lowest) = eig.values.first() {
        if lowest < -NEGATIVE_REJECT {
            return Err(Error::NotPsd(lowest));
        }
    }
    let r = eig.reconstruct_with(|x| x.max(0.0).sqrt());
    let rd = r.dagger();
    Ok((&r + &rd).scale_real(0.5))
}

/// Orthonormalizes `vectors` in order with twice-repeated modified
/// Gram-Schmidt, dropping any vector whose residual norm falls below `tol`.
pub fn gram_schmidt(vectors: &[StateVector], tol: f64) -> Result<Vec<StateVector>> {
    let mut out: Vec<StateVector> = Vec::new();
    for v in vectors {
        if let Some(first) = out.first() {
            if first.dim() != v.dim() {
                return Err(Error::DimensionMismatch(
                    "Gram-Schmidt input vectors differ in dim".into(),
                ));
            }
        }
        let mut r = v.clone();
        for _ in 0..2 {
            for u in &out {
                let c = u.inner(&r)?;
                r = r.axpy(-c, u)?;
            }
        }
        if r.norm() >= tol {
            if let Some(unit) = r.normalized() {
                out.push(unit);
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn random_hermitian(n: usize, seed: &[f64]) -> Matrix {
        let mut k = 0;
        let mut next = || {
            k += 1;
            seed[k % seed.len()] * (k as f64).sin()
        };
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C64::new(next(), 0.0);
            for j in (i + 1)..n {
                let z = C64::new(next(), next());
                m[(i, j)] = z;
                m[(j, i)] = z.conj();
            }
        }
        m
    }

    fn check_decomposition(m: &Matrix) {
        let eig = hermitian_eig(m).unwrap();
        assert!(eig.reconstruct().max_abs_diff(m).unwrap() <= 1e-10);
        let v = eig.vector_matrix();
        let vtv = &v.dagger() * &v;
        assert!(vtv.max_abs_diff(&Matrix::identity(m.rows())).unwrap() <= 1e-10);
        assert!(eig.values.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn diagonal_input_is_returned_sorted() {
        let eig = hermitian_eig(&Matrix::diag_real(&[2.0, 1.0])).unwrap();
        assert_eq!(eig.values, vec![1.0, 2.0]);
        assert_eq!(eig.vectors[0], StateVector::basis(2, 1));
        assert_eq!(eig.vectors[1], StateVector::basis(2, 0));
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(hermitian_eig(&Matrix::zeros(2, 3)), Err(Error::NotSquare(2, 3))));
        let mut m = Matrix::identity(2);
        m[(0, 1)] = C64::new(1.0, 0.0);
        assert!(matches!(hermitian_eig(&m), Err(Error::NotHermitian(_))));
        let neg = Matrix::diag_real(&[1.0, -1e-6]);
        assert!(matches!(psd_sqrt(&neg), Err(Error::NotPsd(_))));
    }

    #[test]
    fn complex_two_by_two() {
        // [[2, i], [-i, 2]] has eigenvalues 1 and 3.
        let m = Matrix::from_vec(
            2,
            2,
            vec![C64::new(2.0, 0.0), C64::new(0.0, 1.0), C64::new(0.0, -1.0), C64::new(2.0, 0.0)],
        )
        .unwrap();
        let eig = hermitian_eig(&m).unwrap();
        assert!((eig.values[0] - 1.0).abs() < 1e-14);
        assert!((eig.values[1] - 3.0).abs() < 1e-14);
        for v in &eig.vectors {
            assert!(v[0].im == 0.0 && v[0].re > 0.0);
        }
        check_decomposition(&m);
    }

    #[test]
    fn sixteen_dim_dense_hermitian() {
        let m = random_hermitian(16, &[0.3, -1.7, 2.2, 0.9, -0.4, 1.1, -2.5]);
        check_decomposition(&m);
    }

    #[test]
    fn psd_sqrt_of_scalar_matrices_is_exact() {
        for c in [0.0, 1.0, 4.0] {
            let r = psd_sqrt(&Matrix::identity(4).scale_real(c)).unwrap();
            assert_eq!(r, Matrix::identity(4).scale_real(c.sqrt()));
        }
    }

    #[test]
    fn psd_sqrt_clamps_tiny_negatives() {
        let r = psd_sqrt(&Matrix::diag_real(&[4.0, -1e-12])).unwrap();
        assert_eq!(r, Matrix::diag_real(&[2.0, 0.0]));
    }

    #[test]
    fn gram_schmidt_hand_projection() {
        let s = 0.5f64.sqrt();
        let out = gram_schmidt(
            &[StateVector::from_real(&[1.0, 0.0]), StateVector::from_real(&[s, s])],
            1e-10,
        )
        .unwrap();
        assert_eq!(out.len(), 2);
        assert!(out[0].max_abs_diff(&StateVector::from_real(&[1.0, 0.0])).unwrap() < 1e-15);
        assert!(out[1].max_abs_diff(&StateVector::from_real(&[0.0, 1.0])).unwrap() < 1e-15);
    }

    #[test]
    fn gram_schmidt_drops_dependent_vectors() {
        let a = StateVector::from_real(&[1.0, 1.0, 0.0]);
        let b = StateVector::from_real(&[2.0, 2.0, 0.0]);
        let c = StateVector::from_real(&[0.0, 0.0, 3.0]);
        let out = gram_schmidt(&[a, b, c], 1e-10).unwrap();
        assert_eq!(out.len(), 2);
        assert!(gram_schmidt(&[], 1e-10).unwrap().is_empty());
    }

    fn arb_hermitian(n: usize) -> impl Strategy<Value = Matrix> {
        proptest::collection::vec(-2.0f64..2.0, n * n).prop_map(move |xs| {
            let mut m = Matrix::zeros(n, n);
            for i in 0..n {
                m[(i, i)] = C64::new(xs[i * n + i], 0.0);
                for j in (i + 1)..n {
                    let z = C64::new(xs[i * n + j], xs[j * n + i]);
                    m[(i, j)] = z;
                    m[(j, i)] = z.conj();
                }
            }
            m
        })
    }

    proptest! {
        #[test]
        fn reconstruction_residual_is_small(m in arb_hermitian(4)) {
            let eig = hermitian_eig(&m).unwrap();
            prop_assert!(eig.reconstruct().max_abs_diff(&m).unwrap() <= 1e-10);
            let v = eig.vector_matrix();
            prop_assert!((&v.dagger() * &v).max_abs_diff(&Matrix::identity(4)).unwrap() <= 1e-10);
        }

        #[test]
        fn psd_sqrt_squares_back(m in arb_hermitian(4)) {
            let psd = &m * &m.dagger();
            let r = psd_sqrt(&psd).unwrap();
            prop_assert!((&r * &r).max_abs_diff(&psd).unwrap() <= 1e-9);
            prop_assert!(r.is_hermitian(1e-12));
            prop_assert!(hermitian_eig(&r).unwrap().values[0] >= -1e-9);
        }

        #[test]
        fn projector_eigenvalues_are_zero_or_one(m in arb_hermitian(4), k in 1usize..4) {
            let eig = hermitian_eig(&m).unwrap();
            let p = Matrix::projector(&eig.vectors[..k]).unwrap();
            for lambda in hermitian_eig(&p).unwrap().values {
                prop_assert!(lambda.abs() <= 1e-10 || (lambda - 1.0).abs() <= 1e-10);
            }
        }

        #[test]
        fn gram_schmidt_output_is_orthonormal(xs in proptest::collection::vec(-1.0f64..1.0, 24)) {
            let vs: Vec<StateVector> = xs
                .chunks(6)
                .map(|c| StateVector::from_amplitudes(vec![
                    C64::new(c[0], c[1]), C64::new(c[2], c[3]), C64::new(c[4], c[5]),
                ]))
                .collect();
            let out = gram_schmidt(&vs, 1e-10).unwrap();
            prop_assert!(out.len() <= 3);
            for (i, u) in out.iter().enumerate() {
                for (j, w) in out.iter().enumerate() {
                    let expected = if i == j { 1.0 } else { 0.0 };
                    prop_assert!((u.inner(w).unwrap() - C64::new(expected, 0.0)).norm() <= 1e-12);
                }
            }
        }
    }
}
