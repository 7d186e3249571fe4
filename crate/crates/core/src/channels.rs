//! Single-qubit noise channels, their n-qubit enlargements, and CPTP checks.

use itertools::Itertools;

use crate::error::{Error, Result};
use crate::linalg::{Matrix, C64};

/// Tolerance for the trace-preserving and unital verdicts of [`certify`].
pub const CERTIFY_TOL: f64 = 1e-10;
/// Tolerance used when validating density-matrix inputs.
pub const DENSITY_TOL: f64 = 1e-10;

/// One labeled Kraus operator.
///
/// Single-qubit operators are labeled `"0"` and `"1"`; enlarged operators
/// carry the bitstring of per-qubit Kraus indices, qubit 1 leftmost.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausOperator {
    pub label: String,
    /// Number of non-identity factors (ones in the label).
    pub weight: usize,
    pub op: Matrix,
}

/// A labeled Kraus set on `n_qubits` qubits together with its noise parameter.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausChannel {
    pub n_qubits: usize,
    pub param: f64,
    pub kraus: Vec<KrausOperator>,
}

/// Outcome of [`certify`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelCertificate {
    pub trace_preserving: bool,
    pub unital: bool,
    /// Larger of `max |Σ A†A - I|` and `max |Σ AA† - I|`.
    pub max_deviation: f64,
    pub completeness_deviation: f64,
    pub unitality_deviation: f64,
}

pub fn pauli_x() -> Matrix {
    Matrix::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0]).expect("2x2")
}

pub fn pauli_z() -> Matrix {
    Matrix::from_real(2, 2, &[1.0, 0.0, 0.0, -1.0]).expect("2x2")
}

pub fn hadamard() -> Matrix {
    let s = 0.5f64.sqrt();
    Matrix::from_real(2, 2, &[s, s, s, -s]).expect("2x2")
}

fn check_probability(name: &'static str, value: f64) -> Result<()> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(Error::ParameterOutOfRange {
            name,
            value,
            domain: "[0, 1]",
        })
    }
}

fn single(param: f64, ops: [Matrix; 2]) -> KrausChannel {
    let kraus = ops
        .into_iter()
        .enumerate()
        .map(|(k, op)| KrausOperator {
            label: k.to_string(),
            weight: k,
            op,
        })
        .collect();
    KrausChannel {
        n_qubits: 1,
        param,
        kraus,
    }
}

/// Bit flip with probability `p`: `{√(1-p) I, √p X}`.
pub fn bitflip_single(p: f64) -> Result<KrausChannel> {
    check_probability("p", p)?;
    Ok(single(
        p,
        [
            Matrix::identity(2).scale_real((1.0 - p).sqrt()),
            pauli_x().scale_real(p.sqrt()),
        ],
    ))
}

/// Phase flip with probability `p`: `{√(1-p) I, √p Z}`.
pub fn phaseflip_single(p: f64) -> Result<KrausChannel> {
    check_probability("p", p)?;
    Ok(single(
        p,
        [
            Matrix::identity(2).scale_real((1.0 - p).sqrt()),
            pauli_z().scale_real(p.sqrt()),
        ],
    ))
}

/// Amplitude damping with rate `gamma`: `A0 = diag(1, √(1-γ))`, `A1 = √γ |0><1|`.
pub fn ad_single(gamma: f64) -> Result<KrausChannel> {
    check_probability("gamma", gamma)?;
    let a0 = Matrix::from_real(2, 2, &[1.0, 0.0, 0.0, (1.0 - gamma).sqrt()])?;
    let a1 = Matrix::from_real(2, 2, &[0.0, gamma.sqrt(), 0.0, 0.0])?;
    Ok(single(gamma, [a0, a1]))
}

/// All `k^n` tensor products of a single-qubit channel's Kraus operators.
///
/// The label character for qubit `i` is the Kraus index on that qubit and
/// the leftmost character is the leftmost Kronecker factor. Operators are
/// ordered by weight, then by label read as a binary number, descending,
/// so weight-one errors run `1000, 0100, 0010, 0001`.
pub fn enlarge(channel: &KrausChannel, n: usize) -> Result<KrausChannel> {
    if channel.n_qubits != 1 {
        return Err(Error::DimensionMismatch(format!(
            "enlarge expects a single-qubit channel, got {} qubits",
            channel.n_qubits
        )));
    }
    if n == 0 {
        return Err(Error::ParameterOutOfRange {
            name: "n",
            value: 0.0,
            domain: "n >= 1",
        });
    }
    if n == 1 {
        return Ok(channel.clone());
    }
    let k = channel.kraus.len();
    let mut kraus: Vec<KrausOperator> = (0..n)
        .map(|_| 0..k)
        .multi_cartesian_product()
        .map(|digits| {
            let op = digits[1..]
                .iter()
                .fold(channel.kraus[digits[0]].op.clone(), |acc, &d| {
                    acc.kron(&channel.kraus[d].op)
                });
            KrausOperator {
                label: digits.iter().map(|d| d.to_string()).collect(),
                weight: digits.iter().filter(|&&d| d != 0).count(),
                op,
            }
        })
        .collect();
    // Labels are fixed-width base-k numerals, so descending string order is
    // descending numeric order.
    kraus.sort_by(|a, b| a.weight.cmp(&b.weight).then_with(|| b.label.cmp(&a.label)));
    Ok(KrausChannel {
        n_qubits: n,
        param: channel.param,
        kraus,
    })
}

impl KrausChannel {
    pub fn dim(&self) -> usize {
        1 << self.n_qubits
    }

    pub fn len(&self) -> usize {
        self.kraus.len()
    }

    pub fn is_empty(&self) -> bool {
        self.kraus.is_empty()
    }

    pub fn labels(&self) -> Vec<&str> {
        self.kraus.iter().map(|k| k.label.as_str()).collect()
    }

    pub fn get(&self, label: &str) -> Option<&KrausOperator> {
        self.kraus.iter().find(|k| k.label == label)
    }

    pub fn position(&self, label: &str) -> Option<usize> {
        self.kraus.iter().position(|k| k.label == label)
    }

    /// The sub-channel made of the operators with the given labels, in the
    /// order given. Generally not trace preserving.
    pub fn select(&self, labels: &[&str]) -> Result<KrausChannel> {
        let kraus = labels
            .iter()
            .map(|l| {
                self.get(l)
                    .cloned()
                    .ok_or_else(|| Error::InvalidData(format!("no Kraus operator labeled {l:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(KrausChannel {
            n_qubits: self.n_qubits,
            param: self.param,
            kraus,
        })
    }

    /// The first `count` operators.
    pub fn truncate(&self, count: usize) -> KrausChannel {
        KrausChannel {
            n_qubits: self.n_qubits,
            param: self.param,
            kraus: self.kraus.iter().take(count).cloned().collect(),
        }
    }

    /// `Σ A†A`.
    pub fn completeness_sum(&self) -> Matrix {
        self.kraus.iter().fold(Matrix::zeros(self.dim(), self.dim()), |acc, k| {
            &acc + &(&k.op.dagger() * &k.op)
        })
    }

    /// `Σ A A†`, the image of the identity.
    pub fn unitality_sum(&self) -> Matrix {
        self.kraus.iter().fold(Matrix::zeros(self.dim(), self.dim()), |acc, k| {
            &acc + &(&k.op * &k.op.dagger())
        })
    }
}

/// Checks that `rho` is a density matrix of dimension `dim`.
pub fn validate_density(rho: &Matrix, dim: usize) -> Result<()> {
    if rho.rows() != dim || rho.cols() != dim {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} state for a {dim}-dim channel",
            rho.rows(),
            rho.cols()
        )));
    }
    if !rho.is_finite() {
        return Err(Error::NotDensityMatrix("non-finite entries".into()));
    }
    let defect = rho.hermiticity_defect();
    if defect > DENSITY_TOL {
        return Err(Error::NotDensityMatrix(format!("not Hermitian ({defect:e})")));
    }
    let tr = rho.trace()?;
    if (tr - C64::new(1.0, 0.0)).norm() > DENSITY_TOL {
        return Err(Error::NotDensityMatrix(format!("trace {tr}")));
    }
    let lowest = crate::linalg::hermitian_eig(rho)?.values[0];
    if lowest < -DENSITY_TOL {
        return Err(Error::NotDensityMatrix(format!("negative eigenvalue {lowest:e}")));
    }
    Ok(())
}

/// `Λ(ρ) = Σ A ρ A†`.
pub fn apply(channel: &KrausChannel, rho: &Matrix) -> Result<Matrix> {
    validate_density(rho, channel.dim())?;
    Ok(channel
        .kraus
        .iter()
        .fold(Matrix::zeros(channel.dim(), channel.dim()), |acc, k| {
            &acc + &(&(&k.op * rho) * &k.op.dagger())
        }))
}

/// Trace-preservation and unitality verdicts at tolerance `1e-10`.
pub fn certify(channel: &KrausChannel) -> ChannelCertificate {
    let id = Matrix::identity(channel.dim());
    let completeness_deviation = channel.completeness_sum().max_abs_diff(&id).unwrap_or(f64::INFINITY);
    let unitality_deviation = channel.unitality_sum().max_abs_diff(&id).unwrap_or(f64::INFINITY);
    ChannelCertificate {
        trace_preserving: completeness_deviation <= CERTIFY_TOL,
        unital: unitality_deviation <= CERTIFY_TOL,
        max_deviation: completeness_deviation.max(unitality_deviation),
        completeness_deviation,
        unitality_deviation,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::StateVector;
    use proptest::prelude::*;

    fn close(a: &Matrix, b: &Matrix, tol: f64) -> bool {
        a.max_abs_diff(b).unwrap() <= tol
    }

    fn random_density(xs: &[f64]) -> Matrix {
        let g = Matrix::from_vec(2, 2, xs.chunks(2).map(|c| C64::new(c[0], c[1])).collect()).unwrap();
        let m = &g * &g.dagger();
        let tr = m.trace().unwrap().re;
        m.scale_real(1.0 / tr)
    }

    #[test]
    fn zero_probability_keeps_zero_operator() {
        let ch = bitflip_single(0.0).unwrap();
        assert_eq!(ch.len(), 2);
        assert_eq!(ch.kraus[1].op, Matrix::zeros(2, 2));
        let rho = random_density(&[0.3, 0.1, -0.7, 0.2, 0.5, 0.9, 0.4, -0.2]);
        assert!(close(&apply(&ch, &rho).unwrap(), &rho, 1e-15));
    }

    #[test]
    fn half_probability_coefficients() {
        let ch = bitflip_single(0.5).unwrap();
        let s = 0.5f64.sqrt();
        assert_eq!(ch.kraus[0].op[(0, 0)], C64::new(s, 0.0));
        assert_eq!(ch.kraus[1].op[(0, 1)], C64::new(s, 0.0));
        assert_eq!(pauli_x(), Matrix::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0]).unwrap());
    }

    #[test]
    fn rejects_out_of_range_parameters() {
        assert!(matches!(bitflip_single(1.5), Err(Error::ParameterOutOfRange { .. })));
        assert!(phaseflip_single(-0.1).is_err());
        assert!(ad_single(f64::NAN).is_err());
    }

    #[test]
    fn amplitude_damping_action() {
        let gamma: f64 = 0.37;
        let ch = ad_single(gamma).unwrap();
        let one = StateVector::basis(2, 1);
        let a0_one = ch.kraus[0].op.apply(&one).unwrap();
        let a1_one = ch.kraus[1].op.apply(&one).unwrap();
        assert!((a0_one[1] - C64::new((1.0 - gamma).sqrt(), 0.0)).norm() < 1e-15);
        assert!((a1_one[0] - C64::new(gamma.sqrt(), 0.0)).norm() < 1e-15);
        assert!(close(&ch.completeness_sum(), &Matrix::identity(2), 1e-15));
        let zero = ad_single(0.0).unwrap();
        assert_eq!(zero.kraus[0].op, Matrix::identity(2));
        assert_eq!(zero.kraus[1].op, Matrix::zeros(2, 2));
    }

    #[test]
    fn enlarged_bitflip_order_and_coefficients() {
        let p: f64 = 0.2;
        let ch = enlarge(&bitflip_single(p).unwrap(), 3).unwrap();
        assert_eq!(
            ch.labels(),
            vec!["000", "100", "010", "001", "110", "101", "011", "111"]
        );
        // A'_7 = √(p³) X X X has its only entries on the anti-diagonal.
        assert!((ch.kraus[7].op[(0, 7)] - C64::new(p.powi(3).sqrt(), 0.0)).norm() < 1e-15);
        assert!((ch.kraus[1].op[(4, 0)] - C64::new((p * (1.0 - p).powi(2)).sqrt(), 0.0)).norm() < 1e-15);
    }

    #[test]
    fn enlarged_ad_weights_are_binomial() {
        let ch = enlarge(&ad_single(0.1).unwrap(), 4).unwrap();
        assert_eq!(ch.len(), 16);
        let counts: Vec<usize> = (0..=4).map(|w| ch.kraus.iter().filter(|k| k.weight == w).count()).collect();
        assert_eq!(counts, vec![1, 4, 6, 4, 1]);
        assert_eq!(ch.kraus[0].label, "0000");
        assert_eq!(ch.kraus[15].label, "1111");
        assert_eq!(&ch.labels()[1..5], &["1000", "0100", "0010", "0001"]);
    }

    #[test]
    fn enlarging_one_qubit_is_identity() {
        let ch = ad_single(0.3).unwrap();
        assert_eq!(enlarge(&ch, 1).unwrap(), ch);
    }

    #[test]
    fn qubit_one_is_leftmost_factor() {
        // A_1000 sends |1111> to a multiple of |0111>.
        let ch = enlarge(&ad_single(0.1).unwrap(), 4).unwrap();
        let out = ch.get("1000").unwrap().op.apply(&StateVector::from_bits("1111").unwrap()).unwrap();
        assert!(out[0b0111].norm() > 0.0);
        assert_eq!(out.amplitudes().iter().filter(|z| z.norm() > 0.0).count(), 1);
    }

    #[test]
    fn unitality_verdicts() {
        let bf = certify(&bitflip_single(0.3).unwrap());
        assert!(bf.trace_preserving && bf.unital);
        let ad = certify(&ad_single(0.3).unwrap());
        assert!(ad.trace_preserving && !ad.unital);
        let half = Matrix::identity(2).scale_real(0.5);
        assert!(close(&apply(&bitflip_single(0.3).unwrap(), &half).unwrap(), &half, 1e-15));
        assert!(!close(&apply(&ad_single(0.1).unwrap(), &half).unwrap(), &half, 1e-3));
    }

    #[test]
    fn truncated_bitflip_is_not_trace_preserving() {
        let ch = enlarge(&bitflip_single(0.1).unwrap(), 3).unwrap().truncate(4);
        assert!(!certify(&ch).trace_preserving);
    }

    #[test]
    fn apply_rejects_bad_states() {
        let ch = ad_single(0.1).unwrap();
        assert!(matches!(apply(&ch, &Matrix::identity(4)), Err(Error::DimensionMismatch(_))));
        assert!(matches!(apply(&ch, &Matrix::identity(2)), Err(Error::NotDensityMatrix(_))));
    }

    proptest! {
        #[test]
        fn hadamard_conjugation_maps_phase_to_bit_flip(
            p in 0.0f64..=1.0,
            xs in proptest::collection::vec(-1.0f64..1.0, 8),
        ) {
            let rho = random_density(&xs);
            let h = hadamard();
            let inner = &(&h.dagger() * &rho) * &h;
            let via_phase = &(&h * &apply(&phaseflip_single(p).unwrap(), &inner).unwrap()) * &h.dagger();
            let direct = apply(&bitflip_single(p).unwrap(), &rho).unwrap();
            prop_assert!(via_phase.max_abs_diff(&direct).unwrap() <= 1e-12);
        }

        #[test]
        fn constructed_channels_are_complete(p in 0.0f64..=1.0) {
            for ch in [
                enlarge(&bitflip_single(p).unwrap(), 3).unwrap(),
                enlarge(&phaseflip_single(p).unwrap(), 3).unwrap(),
                enlarge(&ad_single(p).unwrap(), 4).unwrap(),
            ] {
                prop_assert!(certify(&ch).completeness_deviation <= 1e-12);
            }
        }

        #[test]
        fn output_trace_is_one(p in 0.0f64..=1.0, xs in proptest::collection::vec(-1.0f64..1.0, 8)) {
            let out = apply(&ad_single(p).unwrap(), &random_density(&xs)).unwrap();
            prop_assert!((out.trace().unwrap() - C64::new(1.0, 0.0)).norm() <= 1e-12);
        }
    }
}
