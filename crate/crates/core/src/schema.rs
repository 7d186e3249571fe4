//! Serializable records for channels, codes, recoveries and reports.

use serde::{Deserialize, Serialize};

use crate::channels::{KrausChannel, KrausOperator};
use crate::codes::QuantumCode;
use crate::conditions::PairClassification;
use crate::error::{Error, Result};
use crate::fletcher::Optimum;
use crate::linalg::{bits_to_index, Matrix, StateVector, C64};
use crate::recovery::RecoveryOperation;

/// Label given to the leftover operator `Ô` in serialized recoveries.
pub const LEFTOVER_LABEL: &str = "O";

/// A labeled matrix with row-major `[re, im]` entries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixRecord {
    pub label: String,
    pub entries: Vec<[f64; 2]>,
}

impl MatrixRecord {
    pub fn new(label: impl Into<String>, m: &Matrix) -> Self {
        Self {
            label: label.into(),
            entries: m.entries().iter().map(|z| [z.re, z.im]).collect(),
        }
    }

    /// Rebuilds a `dim × dim` matrix.
    pub fn to_matrix(&self, dim: usize) -> Result<Matrix> {
        if self.entries.len() != dim * dim {
            return Err(Error::InvalidData(format!(
                "operator {} has {} entries, expected {}",
                self.label,
                self.entries.len(),
                dim * dim
            )));
        }
        Matrix::from_vec(dim, dim, self.entries.iter().map(|[re, im]| C64::new(*re, *im)).collect())
    }
}

fn dim_for(n_qubits: usize) -> Result<usize> {
    if n_qubits == 0 || n_qubits > 12 {
        return Err(Error::InvalidData(format!("unsupported qubit count {n_qubits}")));
    }
    Ok(1 << n_qubits)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelRecord {
    pub n_qubits: usize,
    pub param: f64,
    pub kraus: Vec<MatrixRecord>,
}

impl From<&KrausChannel> for ChannelRecord {
    fn from(ch: &KrausChannel) -> Self {
        Self {
            n_qubits: ch.n_qubits,
            param: ch.param,
            kraus: ch.kraus.iter().map(|k| MatrixRecord::new(&k.label, &k.op)).collect(),
        }
    }
}

impl TryFrom<ChannelRecord> for KrausChannel {
    type Error = Error;

    fn try_from(rec: ChannelRecord) -> Result<Self> {
        let dim = dim_for(rec.n_qubits)?;
        let kraus = rec
            .kraus
            .iter()
            .map(|k| {
                if k.label.len() != rec.n_qubits {
                    return Err(Error::InvalidData(format!(
                        "label {:?} does not name {} qubits",
                        k.label, rec.n_qubits
                    )));
                }
                bits_to_index(&k.label)?;
                Ok(KrausOperator {
                    weight: k.label.chars().filter(|&c| c == '1').count(),
                    label: k.label.clone(),
                    op: k.to_matrix(dim)?,
                })
            })
            .collect::<Result<_>>()?;
        Ok(KrausChannel {
            n_qubits: rec.n_qubits,
            param: rec.param,
            kraus,
        })
    }
}

/// One nonzero amplitude of a codeword.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Amplitude {
    pub index: usize,
    pub amplitude_re: f64,
    pub amplitude_im: f64,
}

/// A code as the sparse amplitude lists of `|0_L>` and `|1_L>`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CodeRecord {
    pub name: String,
    pub n_qubits: usize,
    pub codewords: [Vec<Amplitude>; 2],
}

fn sparse(state: &StateVector) -> Vec<Amplitude> {
    state
        .amplitudes()
        .iter()
        .enumerate()
        .filter(|(_, z)| z.norm() > 0.0)
        .map(|(index, z)| Amplitude {
            index,
            amplitude_re: z.re,
            amplitude_im: z.im,
        })
        .collect()
}

fn dense(amps: &[Amplitude], dim: usize) -> Result<StateVector> {
    let mut out = vec![C64::new(0.0, 0.0); dim];
    for a in amps {
        let slot = out
            .get_mut(a.index)
            .ok_or_else(|| Error::InvalidData(format!("amplitude index {} outside dim {dim}", a.index)))?;
        *slot += C64::new(a.amplitude_re, a.amplitude_im);
    }
    Ok(StateVector::from_amplitudes(out))
}

impl From<&QuantumCode> for CodeRecord {
    fn from(code: &QuantumCode) -> Self {
        Self {
            name: code.name().to_string(),
            n_qubits: code.n_qubits(),
            codewords: [sparse(code.zero_logical()), sparse(code.one_logical())],
        }
    }
}

impl TryFrom<CodeRecord> for QuantumCode {
    type Error = Error;

    fn try_from(rec: CodeRecord) -> Result<Self> {
        let dim = dim_for(rec.n_qubits)?;
        QuantumCode::new(rec.name, dense(&rec.codewords[0], dim)?, dense(&rec.codewords[1], dim)?)
    }
}

/// A recovery in the channel matrix schema; the leftover `Ô`, when present,
/// is the last operator, labeled [`LEFTOVER_LABEL`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecoveryRecord {
    pub name: String,
    pub n_qubits: usize,
    /// Fletcher `(a, b)` as `[[re, im], [re, im]]`.
    pub params: Option<[[f64; 2]; 2]>,
    pub kraus: Vec<MatrixRecord>,
}

impl From<&RecoveryOperation> for RecoveryRecord {
    fn from(rec: &RecoveryOperation) -> Self {
        let mut kraus: Vec<MatrixRecord> = rec.ops.iter().map(|r| MatrixRecord::new(&r.label, &r.op)).collect();
        if let Some(o) = &rec.leftover {
            kraus.push(MatrixRecord::new(LEFTOVER_LABEL, o));
        }
        Self {
            name: rec.name.to_string(),
            n_qubits: rec.dim().trailing_zeros() as usize,
            params: rec.params.map(|(a, b)| [[a.re, a.im], [b.re, b.im]]),
            kraus,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassificationRecord {
    pub indices: [usize; 2],
    pub good: bool,
    pub witness: Option<[String; 2]>,
    pub slope: Option<f64>,
}

impl From<&PairClassification> for ClassificationRecord {
    fn from(c: &PairClassification) -> Self {
        Self {
            indices: [c.indices.0, c.indices.1],
            good: c.good,
            witness: c.witness.clone().map(|(a, b)| [a, b]),
            slope: c.slope.filter(|s| s.is_finite()),
        }
    }
}

/// Closed-form versus numeric Fletcher optimum; `delta = f_star_closed - f_star_numeric`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FletcherReport {
    pub gamma: f64,
    pub a_bar: f64,
    pub b_bar: f64,
    pub f_star_closed: f64,
    pub f_star_numeric: f64,
    pub delta: f64,
}

impl FletcherReport {
    pub fn new(gamma: f64, closed: &Optimum, numeric: &Optimum) -> Self {
        Self {
            gamma,
            a_bar: closed.a_bar,
            b_bar: closed.b_bar,
            f_star_closed: closed.f_star,
            f_star_numeric: numeric.f_star,
            delta: closed.f_star - numeric.f_star,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{ad_single, enlarge};
    use crate::codes::{leung4, third4};
    use crate::recovery::standard_ad_recovery;

    #[test]
    fn channel_round_trip() {
        let ch = enlarge(&ad_single(0.1).unwrap(), 4).unwrap();
        let json = serde_json::to_string(&ChannelRecord::from(&ch)).unwrap();
        let back: KrausChannel = serde_json::from_str::<ChannelRecord>(&json).unwrap().try_into().unwrap();
        assert_eq!(back, ch);
    }

    #[test]
    fn single_qubit_entries_layout() {
        let rec = ChannelRecord::from(&ad_single(0.36).unwrap());
        assert_eq!(rec.kraus[1].entries, vec![[0.0, 0.0], [0.6, 0.0], [0.0, 0.0], [0.0, 0.0]]);
        let json = serde_json::to_value(&rec).unwrap();
        assert_eq!(json["kraus"][0]["label"], "0");
        assert_eq!(json["n_qubits"], 1);
    }

    #[test]
    fn channel_rejects_bad_shapes() {
        let mut rec = ChannelRecord::from(&ad_single(0.1).unwrap());
        rec.kraus[0].entries.pop();
        assert!(KrausChannel::try_from(rec.clone()).is_err());
        rec.kraus[0].label = "01".into();
        assert!(KrausChannel::try_from(rec).is_err());
    }

    #[test]
    fn code_round_trip() {
        for code in [leung4(), third4()] {
            let rec = CodeRecord::from(&code);
            assert_eq!(rec.codewords[0].len(), 2);
            let json = serde_json::to_string(&rec).unwrap();
            let back: QuantumCode = serde_json::from_str::<CodeRecord>(&json).unwrap().try_into().unwrap();
            assert_eq!(back, code);
        }
    }

    #[test]
    fn code_rejects_non_orthonormal() {
        let mut rec = CodeRecord::from(&leung4());
        rec.codewords[1] = rec.codewords[0].clone();
        assert!(matches!(QuantumCode::try_from(rec), Err(Error::NotOrthonormal(_))));
    }

    #[test]
    fn recovery_carries_leftover_last() {
        let rec = RecoveryRecord::from(&standard_ad_recovery(0.1).unwrap());
        assert_eq!(rec.kraus.len(), 6);
        assert_eq!(rec.kraus.last().unwrap().label, LEFTOVER_LABEL);
        assert_eq!(rec.name, "standard_qec");
        assert_eq!(rec.n_qubits, 4);
    }
}
