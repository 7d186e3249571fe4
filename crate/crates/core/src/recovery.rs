//! Recovery operations: polar-decomposition construction, residue operators,
//! and the explicit recoveries for the repetition and four-qubit codes.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::codes::{leung4, repetition3, QuantumCode};
use crate::error::{Error, Result};
use crate::linalg::{bits_to_index, gram_schmidt, hermitian_eig, psd_sqrt, Matrix, StateVector, C64};

/// Singular values at or below this are treated as zero.
pub const RANK_TOL: f64 = 1e-10;
/// Tolerance for the projector precondition of [`polar_decompose`].
pub const PROJECTOR_TOL: f64 = 1e-10;
/// Completeness tolerance for recovery operations.
pub const COMPLETENESS_TOL: f64 = 1e-10;

/// `A P = U J` with `J = √(P A† A P)`.
#[derive(Debug, Clone)]
pub struct PolarDecomposition {
    pub u: Matrix,
    pub j: Matrix,
    /// Orthonormal basis of the working subspace spanned by the ranges of
    /// `P` and `A P`; `U` acts as the identity on its complement.
    pub basis_used: Vec<StateVector>,
    /// Eigenvectors `|v_l>` of `P A† A P` inside the working subspace, ascending.
    pub eigenvectors: Vec<StateVector>,
    /// Corresponding eigenvalues `lambda_l` of `J`.
    pub lambdas: Vec<f64>,
    /// `U |v_l>`: `A P |v_l> / lambda_l` for nonzero `lambda_l`, completion
    /// vectors otherwise.
    pub images: Vec<StateVector>,
}

fn matrix_from_columns(cols: &[StateVector], dim: usize) -> Matrix {
    Matrix::from_fn(dim, cols.len(), |i, j| cols[j][i])
}

/// Polar decomposition of `A` restricted to the range of the projector `P`.
///
/// Eigenvectors of `J` with eigenvalue above `1e-10` fix `U|v> = A P|v>/λ`.
/// The remaining kernel directions of the working subspace are sent to the
/// orthogonal complement of those images: by the symmetric (Löwdin)
/// orthonormalization of their projections when that is well conditioned,
/// otherwise by Gram-Schmidt seeded with those projections followed by the
/// computational basis vectors in index order.
pub fn polar_decompose(a: &Matrix, p: &Matrix) -> Result<PolarDecomposition> {
    if !a.is_square() {
        return Err(Error::NotSquare(a.rows(), a.cols()));
    }
    let dim = a.rows();
    if p.rows() != dim || p.cols() != dim {
        return Err(Error::DimensionMismatch(format!(
            "{dim}-dim operator with a {}x{} projector",
            p.rows(),
            p.cols()
        )));
    }
    let defect = p.projector_defect();
    if !(defect <= PROJECTOR_TOL) {
        return Err(Error::NotProjector(defect));
    }

    let ap = a * p;
    let m = &ap.dagger() * &ap;
    let j = psd_sqrt(&m)?;

    let seeds: Vec<StateVector> = (0..dim).map(|c| p.column(c)).chain((0..dim).map(|c| ap.column(c))).collect();
    let w = gram_schmidt(&seeds, RANK_TOL)?;
    let wm = matrix_from_columns(&w, dim);
    let eig = hermitian_eig(&m.restrict(&w)?)?;

    let mut eigenvectors = Vec::with_capacity(w.len());
    let mut lambdas = Vec::with_capacity(w.len());
    let mut images: Vec<Option<StateVector>> = Vec::with_capacity(w.len());
    for (mu, y) in eig.values.iter().zip(&eig.vectors) {
        let v = wm.apply(y)?.with_canonical_phase(1e-12);
        let lambda = mu.max(0.0).sqrt();
        images.push(if lambda > RANK_TOL {
            Some(ap.apply(&v)?.scale(C64::new(1.0 / lambda, 0.0)))
        } else {
            None
        });
        eigenvectors.push(v);
        lambdas.push(lambda);
    }

    let fixed: Vec<StateVector> = images.iter().flatten().cloned().collect();
    let kernel: Vec<usize> = (0..images.len()).filter(|&i| images[i].is_none()).collect();
    if !kernel.is_empty() {
        let completion = complete(&fixed, &kernel.iter().map(|&i| eigenvectors[i].clone()).collect::<Vec<_>>(), &w)?;
        for (slot, c) in kernel.iter().zip(completion) {
            images[*slot] = Some(c);
        }
    }
    let images: Vec<StateVector> = images.into_iter().map(|x| x.expect("filled")).collect();

    let mut u = &Matrix::identity(dim) - &Matrix::projector(&w)?;
    for (e, v) in images.iter().zip(&eigenvectors) {
        u = &u + &Matrix::outer(e, v);
    }
    Ok(PolarDecomposition {
        u,
        j,
        basis_used: w,
        eigenvectors,
        lambdas,
        images,
    })
}

/// Orthonormal vectors in `span(w)`, orthogonal to `fixed`, one per kernel vector.
fn complete(fixed: &[StateVector], kernel: &[StateVector], w: &[StateVector]) -> Result<Vec<StateVector>> {
    let needed = kernel.len();
    let dim = kernel[0].dim();
    let q = &Matrix::identity(dim) - &Matrix::projector(fixed).unwrap_or_else(|_| Matrix::zeros(dim, dim));
    let projected: Vec<StateVector> = kernel.iter().map(|k| q.apply(k)).collect::<Result<_>>()?;

    let b = matrix_from_columns(&projected, dim);
    let btb = &b.dagger() * &b;
    let gram = hermitian_eig(&btb)?;
    if gram.values[0] > RANK_TOL {
        let inv_sqrt = gram.reconstruct_with(|x| 1.0 / x.sqrt());
        let c = &b * &inv_sqrt;
        return Ok((0..needed).map(|i| c.column(i)).collect());
    }

    let pw = Matrix::projector(w)?;
    let seeds: Vec<StateVector> = fixed
        .iter()
        .cloned()
        .chain(projected)
        .chain((0..dim).map(|i| pw.column(i)))
        .collect();
    let ortho = gram_schmidt(&seeds, RANK_TOL)?;
    let found: Vec<StateVector> = ortho.into_iter().skip(fixed.len()).take(needed).collect();
    if found.len() < needed {
        return Err(Error::DegenerateCompletion {
            found: found.len(),
            needed,
        });
    }
    Ok(found)
}

/// The residue `π = J - √(λ p) P` and its operator bound.
#[derive(Debug, Clone)]
pub struct ResidueResult {
    pub pi: Matrix,
    pub lambda_min_times_p: f64,
    /// Absolute eigenvalues of `π`, descending.
    pub singular_values: Vec<f64>,
    /// Singular values of `π` within `[0, √p - √(λ p)]` (plus `1e-10`).
    pub bound_ok: bool,
}

/// Orthonormal basis of the range of a projector.
pub fn range_basis(p: &Matrix) -> Result<Vec<StateVector>> {
    gram_schmidt(&(0..p.cols()).map(|c| p.column(c)).collect::<Vec<_>>(), RANK_TOL)
}

/// Extreme eigenvalues `(λ_min, λ_max)` of `P A† A P` on the range of `P`.
pub fn restricted_extremes(a: &Matrix, p: &Matrix) -> Result<(f64, f64)> {
    let ap = a.try_matmul(p)?;
    let m = &ap.dagger() * &ap;
    let basis = range_basis(p)?;
    if basis.is_empty() {
        return Err(Error::DimensionMismatch("projector has empty range".into()));
    }
    let eig = hermitian_eig(&m.restrict(&basis)?)?;
    Ok((eig.values[0], *eig.values.last().expect("non-empty")))
}

/// Residue operator for the largest eigenvalue `p_l` and ratio `lambda_l`
/// of `P A† A P` on the codespace; `lambda_l * p_l` must match the smallest
/// eigenvalue within `1e-9`.
pub fn residue(a: &Matrix, p: &Matrix, p_l: f64, lambda_l: f64) -> Result<ResidueResult> {
    let (lo, _) = restricted_extremes(a, p)?;
    let lp = lambda_l * p_l;
    if (lp - lo).abs() > 1e-9 {
        return Err(Error::EigenvalueMismatch(format!(
            "lambda * p = {lp} but the smallest eigenvalue is {lo}"
        )));
    }
    let ap = a * p;
    let j = psd_sqrt(&(&ap.dagger() * &ap))?;
    let pi = &j - &p.scale_real(lp.max(0.0).sqrt());
    let mut singular_values: Vec<f64> = hermitian_eig(&pi)?.values.iter().map(|x| x.abs()).collect();
    singular_values.sort_by(|x, y| y.total_cmp(x));
    let bound = p_l.max(0.0).sqrt() - lp.max(0.0).sqrt() + 1e-10;
    Ok(ResidueResult {
        bound_ok: singular_values.iter().all(|&s| s <= bound),
        pi,
        lambda_min_times_p: lp,
        singular_values,
    })
}

/// [`residue`] with `p_l` and `lambda_l` read off the restricted spectrum.
pub fn residue_auto(a: &Matrix, p: &Matrix) -> Result<ResidueResult> {
    let (lo, hi) = restricted_extremes(a, p)?;
    let lambda = if hi > 0.0 { lo / hi } else { 1.0 };
    residue(a, p, hi, lambda)
}

/// The recovery `P U†` obtained from the polar decomposition of `A P`.
pub fn polar_recovery_operator(a: &Matrix, code: &QuantumCode) -> Result<Matrix> {
    let pd = polar_decompose(a, code.projector())?;
    Ok(code.projector() * &pd.u.dagger())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RecoveryKind {
    StandardQec,
    CodeProjected,
    Fletcher,
    Repetition,
}

impl fmt::Display for RecoveryKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RecoveryKind::StandardQec => "standard_qec",
            RecoveryKind::CodeProjected => "code_projected",
            RecoveryKind::Fletcher => "fletcher",
            RecoveryKind::Repetition => "repetition",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RecoveryOperator {
    pub label: String,
    pub op: Matrix,
}

/// A recovery `{R_k}` with an optional leftover projector `Ô`.
#[derive(Debug, Clone, PartialEq)]
pub struct RecoveryOperation {
    pub name: RecoveryKind,
    pub ops: Vec<RecoveryOperator>,
    pub leftover: Option<Matrix>,
    /// Fletcher parameters `(a, b)`.
    pub params: Option<(C64, C64)>,
}

impl RecoveryOperation {
    pub fn dim(&self) -> usize {
        self.ops.first().map_or(0, |r| r.op.cols())
    }

    /// `Σ R†R + Ô†Ô`.
    pub fn completeness_sum(&self) -> Matrix {
        let n = self.dim();
        let mut total = Matrix::zeros(n, n);
        for op in self.ops.iter().map(|r| &r.op).chain(self.leftover.as_ref()) {
            total = &total + &(&op.dagger() * op);
        }
        total
    }

    /// `max |Σ R†R + Ô†Ô - I|`.
    pub fn completeness_defect(&self) -> f64 {
        self.completeness_sum()
            .max_abs_diff(&Matrix::identity(self.dim()))
            .unwrap_or(f64::INFINITY)
    }

    pub fn is_trace_preserving(&self) -> bool {
        self.completeness_defect() <= COMPLETENESS_TOL
    }

    pub fn get(&self, label: &str) -> Option<&Matrix> {
        self.ops.iter().find(|r| r.label == label).map(|r| &r.op)
    }
}

fn ket(bits: &str) -> StateVector {
    StateVector::from_bits(bits).expect("literal bitstring")
}

/// `|target><row|` where the bra is given by its row coefficients, i.e.
/// `Σ_c coeff_c |target><bits_c|`.
fn ket_row(target: &StateVector, row: &[(&str, C64)]) -> Matrix {
    let dim = target.dim();
    let mut m = Matrix::zeros(dim, dim);
    for (bits, coeff) in row {
        let col = bits_to_index(bits).expect("literal bitstring");
        for i in 0..dim {
            m[(i, col)] += target[i] * coeff;
        }
    }
    m
}

fn op(label: impl Into<String>, op: Matrix) -> RecoveryOperator {
    RecoveryOperator { label: label.into(), op }
}

fn real(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// The four projective-correlator recoveries of the repetition code.
pub fn repetition_recovery() -> RecoveryOperation {
    let code = repetition3();
    let [zero, one] = code.codewords();
    let rows = [("000", "111"), ("100", "011"), ("010", "101"), ("001", "110")];
    let ops = rows
        .iter()
        .enumerate()
        .map(|(k, (b0, b1))| {
            let m = &ket_row(zero, &[(b0, real(1.0))]) + &ket_row(one, &[(b1, real(1.0))]);
            op(format!("R{k}"), m)
        })
        .collect();
    RecoveryOperation {
        name: RecoveryKind::Repetition,
        ops,
        leftover: None,
        params: None,
    }
}

/// The orthonormal basis `v_0 .. v_9, o_1 .. o_6` behind the standard AD recovery.
pub fn standard_ad_basis(gamma: f64) -> Result<(Vec<StateVector>, Vec<StateVector>)> {
    if !(0.0..1.0).contains(&gamma) {
        return Err(Error::ParameterOutOfRange {
            name: "gamma",
            value: gamma,
            domain: "[0, 1)",
        });
    }
    let g2 = (1.0 - gamma).powi(2);
    let norm = (1.0 + g2 * g2).sqrt();
    let s = 0.5f64.sqrt();
    let combo = |terms: &[(&str, f64)]| {
        terms.iter().fold(StateVector::zeros(16), |acc, (b, c)| {
            acc.axpy(real(*c), &ket(b)).expect("same dim")
        })
    };
    let mut v = vec![
        combo(&[("0000", 1.0 / norm), ("1111", g2 / norm)]),
        combo(&[("0011", s), ("1100", s)]),
    ];
    v.extend(["0111", "0100", "1011", "1000", "1101", "0001", "1110", "0010"].map(ket));
    let mut o: Vec<StateVector> = ["0101", "0110", "1001", "1010"].map(ket).into();
    o.push(combo(&[("0000", g2 / norm), ("1111", -1.0 / norm)]));
    o.push(combo(&[("0011", s), ("1100", -s)]));
    Ok((v, o))
}

/// Standard QEC recovery for the Leung code under AD at rate `gamma`:
/// `R_k = |0_L><v_2k| + |1_L><v_2k+1|` for `k = 0..4` and `Ô = Σ |o_k><o_k|`.
pub fn standard_ad_recovery(gamma: f64) -> Result<RecoveryOperation> {
    let (v, o) = standard_ad_basis(gamma)?;
    let code = leung4();
    let [zero, one] = code.codewords();
    let ops = (0..5)
        .map(|k| {
            let m = &Matrix::outer(zero, &v[2 * k]) + &Matrix::outer(one, &v[2 * k + 1]);
            op(format!("R{k}"), m)
        })
        .collect();
    Ok(RecoveryOperation {
        name: RecoveryKind::StandardQec,
        ops,
        leftover: Some(Matrix::projector(&o)?),
        params: None,
    })
}

/// `R_3 .. R_10`, shared by the code-projected and Fletcher recoveries.
fn shared_tail(zero: &StateVector, one: &StateVector) -> Vec<RecoveryOperator> {
    let pairs = [("0111", "0100"), ("1011", "1000"), ("1101", "0001"), ("1110", "0010")];
    let mut ops: Vec<RecoveryOperator> = pairs
        .iter()
        .enumerate()
        .map(|(k, (b0, b1))| {
            op(
                format!("R{}", k + 3),
                &ket_row(zero, &[(b0, real(1.0))]) + &ket_row(one, &[(b1, real(1.0))]),
            )
        })
        .collect();
    for (k, bits) in ["1001", "1010", "0101", "0110"].iter().enumerate() {
        ops.push(op(format!("R{}", k + 7), ket_row(zero, &[(bits, real(1.0))])));
    }
    ops
}

/// Code-projected recovery `R_1 .. R_10` with `R_1 = P_C`.
pub fn cp_recovery() -> RecoveryOperation {
    let code = leung4();
    let [zero, one] = code.codewords();
    let s = 0.5f64.sqrt();
    let mut ops = vec![
        op("R1", code.projector().clone()),
        op(
            "R2",
            &ket_row(zero, &[("0000", real(s)), ("1111", real(-s))])
                + &ket_row(one, &[("0011", real(s)), ("1100", real(-s))]),
        ),
    ];
    ops.extend(shared_tail(zero, one));
    RecoveryOperation {
        name: RecoveryKind::CodeProjected,
        ops,
        leftover: None,
        params: None,
    }
}

/// Fletcher-type recovery: the code-projected recovery with
/// `R_1 = |0_L>(a<0000| + b<1111|) + |1_L><1_L|` and
/// `R_2 = |0_L>(b*<0000| - a*<1111|) + |1_L>(<0011| - <1100|)/√2`,
/// for `|a|² + |b|² = 1`.
pub fn fletcher_recovery(a: C64, b: C64) -> Result<RecoveryOperation> {
    let r2 = a.norm_sqr() + b.norm_sqr();
    if !((r2 - 1.0).abs() <= 1e-10) {
        return Err(Error::ConstraintViolation(r2));
    }
    let code = leung4();
    let [zero, one] = code.codewords();
    let s = 0.5f64.sqrt();
    let mut ops = vec![
        op(
            "R1",
            &ket_row(zero, &[("0000", a), ("1111", b)]) + &Matrix::outer(one, one),
        ),
        op(
            "R2",
            &ket_row(zero, &[("0000", b.conj()), ("1111", -a.conj())])
                + &ket_row(one, &[("0011", real(s)), ("1100", real(-s))]),
        ),
    ];
    ops.extend(shared_tail(zero, one));
    Ok(RecoveryOperation {
        name: RecoveryKind::Fletcher,
        ops,
        leftover: None,
        params: Some((a, b)),
    })
}
