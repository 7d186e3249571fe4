//! Concrete single-logical-qubit codes and the self-complementary 4-qubit family.

use itertools::Itertools;

use crate::error::{Error, Result};
use crate::linalg::{bits_to_index, index_to_bits, Matrix, StateVector, C64};

/// Orthonormality tolerance for codewords.
pub const ORTHONORMAL_TOL: f64 = 1e-12;
/// Projector comparison tolerance for permutation equivalence.
pub const EQUIVALENCE_TOL: f64 = 1e-10;

/// A code encoding one logical qubit into `n_qubits` physical qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumCode {
    name: String,
    n_qubits: usize,
    zero_logical: StateVector,
    one_logical: StateVector,
    projector: Matrix,
}

impl QuantumCode {
    /// Builds a code from two codewords, which must be orthonormal within `1e-12`.
    pub fn new(name: impl Into<String>, zero_logical: StateVector, one_logical: StateVector) -> Result<Self> {
        let dim = zero_logical.dim();
        if dim != one_logical.dim() || !dim.is_power_of_two() || dim < 2 {
            return Err(Error::DimensionMismatch(format!(
                "codewords of dims {} and {}",
                dim,
                one_logical.dim()
            )));
        }
        let deviation = [
            (zero_logical.inner(&zero_logical)? - 1.0).norm(),
            (one_logical.inner(&one_logical)? - 1.0).norm(),
            zero_logical.inner(&one_logical)?.norm(),
        ]
        .into_iter()
        .fold(0.0, f64::max);
        if !(deviation <= ORTHONORMAL_TOL) {
            return Err(Error::NotOrthonormal(deviation));
        }
        let projector = Matrix::projector(&[zero_logical.clone(), one_logical.clone()])?;
        Ok(Self {
            name: name.into(),
            n_qubits: dim.trailing_zeros() as usize,
            zero_logical,
            one_logical,
            projector,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        1 << self.n_qubits
    }

    pub fn zero_logical(&self) -> &StateVector {
        &self.zero_logical
    }

    pub fn one_logical(&self) -> &StateVector {
        &self.one_logical
    }

    /// `[|0_L>, |1_L>]`.
    pub fn codewords(&self) -> [&StateVector; 2] {
        [&self.zero_logical, &self.one_logical]
    }

    pub fn basis(&self) -> Vec<StateVector> {
        vec![self.zero_logical.clone(), self.one_logical.clone()]
    }

    /// The codespace projector `P_C`.
    pub fn projector(&self) -> &Matrix {
        &self.projector
    }

    /// `alpha |0_L> + beta |1_L>`.
    pub fn encode(&self, alpha: C64, beta: C64) -> StateVector {
        self.zero_logical
            .scale(alpha)
            .axpy(beta, &self.one_logical)
            .expect("codewords share a dimension")
    }
}

/// Equal superposition of a bitstring and its complement, `(|a> + |ā>)/√2`.
pub fn self_complementary_state(bits: &str) -> Result<StateVector> {
    let n = bits.len();
    let a = bits_to_index(bits)?;
    let complement = !a & ((1 << n) - 1);
    let s = 0.5f64.sqrt();
    let mut amps = vec![C64::new(0.0, 0.0); 1 << n];
    amps[a] = C64::new(s, 0.0);
    amps[complement] = C64::new(s, 0.0);
    Ok(StateVector::from_amplitudes(amps))
}

fn sc(bits: &str) -> StateVector {
    self_complementary_state(bits).expect("valid literal bitstring")
}

fn build(name: &str, zero: StateVector, one: StateVector) -> QuantumCode {
    QuantumCode::new(name, zero, one).expect("literal codewords are orthonormal")
}

/// Three-qubit repetition code, `|000>`, `|111>`.
pub fn repetition3() -> QuantumCode {
    build(
        "repetition3",
        StateVector::basis(8, 0b000),
        StateVector::basis(8, 0b111),
    )
}

/// Leung et al. four-qubit code: `(|0000>+|1111>)/√2`, `(|0011>+|1100>)/√2`.
pub fn leung4() -> QuantumCode {
    build("leung4", sc("0000"), sc("0011"))
}

/// Grassl et al. four-qubit code: `(|0000>+|1111>)/√2`, `(|1001>+|0110>)/√2`.
pub fn grassl4() -> QuantumCode {
    build("grassl4", sc("0000"), sc("1001"))
}

/// The remaining good self-complementary pair: `(|0000>+|1111>)/√2`, `(|0101>+|1010>)/√2`.
pub fn third4() -> QuantumCode {
    build("third4", sc("0000"), sc("0101"))
}

/// Representative bitstrings of the eight self-complementary basis states,
/// in their conventional order `v_1 .. v_8`.
pub const SELF_COMPLEMENTARY_REPS: [&str; 8] = [
    "0000", "1000", "0100", "0010", "0001", "1100", "1010", "1001",
];

/// The eight self-complementary basis states `v_1 .. v_8`.
pub fn self_complementary_basis() -> Vec<StateVector> {
    SELF_COMPLEMENTARY_REPS.iter().map(|b| sc(b)).collect()
}

/// A candidate code made of two self-complementary basis states.
#[derive(Debug, Clone, PartialEq)]
pub struct SelfComplementaryPair {
    /// One-based indices `(i, j)` with `i < j`.
    pub index_pair: (usize, usize),
    pub codewords: [StateVector; 2],
}

impl SelfComplementaryPair {
    pub fn code(&self) -> QuantumCode {
        let (i, j) = self.index_pair;
        build(
            &format!("v{i}v{j}"),
            self.codewords[0].clone(),
            self.codewords[1].clone(),
        )
    }
}

/// All 28 pairs `(v_i, v_j)`, `i < j`, in lexicographic order.
pub fn enumerate_pairs() -> Vec<SelfComplementaryPair> {
    let basis = self_complementary_basis();
    (0..basis.len())
        .tuple_combinations()
        .map(|(i, j)| SelfComplementaryPair {
            index_pair: (i + 1, j + 1),
            codewords: [basis[i].clone(), basis[j].clone()],
        })
        .collect()
}

/// Relabels qubits: qubit `k` of `state` (zero-based, leftmost first) ends
/// up at position `perm[k]`.
pub fn permute_qubits(state: &StateVector, perm: &[usize]) -> Result<StateVector> {
    let n = perm.len();
    if state.dim() != 1 << n {
        return Err(Error::DimensionMismatch(format!(
            "{}-qubit permutation on a {}-dim state",
            n,
            state.dim()
        )));
    }
    let mut seen = vec![false; n];
    for &p in perm {
        if p >= n || std::mem::replace(&mut seen[p], true) {
            return Err(Error::InvalidData(format!("not a permutation: {perm:?}")));
        }
    }
    let mut out = vec![C64::new(0.0, 0.0); state.dim()];
    for (index, &amp) in state.amplitudes().iter().enumerate() {
        let bits: Vec<char> = index_to_bits(index, n).chars().collect();
        let mut moved = vec!['0'; n];
        for (k, &p) in perm.iter().enumerate() {
            moved[p] = bits[k];
        }
        let target = bits_to_index(&moved.into_iter().collect::<String>())?;
        out[target] = amp;
    }
    Ok(StateVector::from_amplitudes(out))
}

/// Searches all qubit permutations, in lexicographic order, for one that maps
/// the codespace of `c1` onto that of `c2`. Returns the first hit.
pub fn permutation_equivalent(c1: &QuantumCode, c2: &QuantumCode) -> Option<Vec<usize>> {
    if c1.n_qubits() != c2.n_qubits() {
        return None;
    }
    let n = c1.n_qubits();
    (0..n).permutations(n).find(|perm| {
        let permuted: Option<Vec<StateVector>> = c1
            .codewords()
            .iter()
            .map(|w| permute_qubits(w, perm).ok())
            .collect();
        permuted
            .and_then(|ws| Matrix::projector(&ws).ok())
            .and_then(|p| p.max_abs_diff(c2.projector()).ok())
            .is_some_and(|d| d <= EQUIVALENCE_TOL)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn repetition_projector_entries() {
        let code = repetition3();
        let p = code.projector();
        assert_eq!(p[(0, 0)], C64::new(1.0, 0.0));
        assert_eq!(p[(1, 1)], C64::new(0.0, 0.0));
        assert_eq!(p.trace().unwrap(), C64::new(2.0, 0.0));
    }

    #[test]
    fn four_qubit_codes_share_zero_logical() {
        let zero = sc("0000");
        for code in [leung4(), grassl4(), third4()] {
            assert_eq!(code.zero_logical(), &zero);
            assert!(code.projector().projector_defect() <= 1e-12);
            assert_eq!(code.zero_logical().inner(code.one_logical()).unwrap(), C64::new(0.0, 0.0));
        }
        let s = 0.5f64.sqrt();
        let one = third4().one_logical().clone();
        assert_eq!(one[5], C64::new(s, 0.0));
        assert_eq!(one[10], C64::new(s, 0.0));
    }

    #[test]
    fn new_rejects_non_orthonormal() {
        let a = StateVector::basis(4, 0);
        assert!(matches!(QuantumCode::new("bad", a.clone(), a.clone()), Err(Error::NotOrthonormal(_))));
        assert!(QuantumCode::new("bad", a, StateVector::basis(8, 1)).is_err());
    }

    #[test]
    fn basis_is_orthonormal_and_self_complementary() {
        let basis = self_complementary_basis();
        assert_eq!(basis.len(), 8);
        for (i, u) in basis.iter().enumerate() {
            for (j, w) in basis.iter().enumerate() {
                let expected = if i == j { 1.0 } else { 0.0 };
                assert!((u.inner(w).unwrap() - C64::new(expected, 0.0)).norm() < 1e-15);
            }
            let support: Vec<usize> = (0..16).filter(|&k| u[k].norm() > 0.0).collect();
            assert_eq!(support.len(), 2);
            assert_eq!(support[0] ^ support[1], 0b1111);
        }
    }

    #[test]
    fn twenty_eight_pairs() {
        let pairs = enumerate_pairs();
        assert_eq!(pairs.len(), 28);
        assert_eq!(pairs[0].index_pair, (1, 2));
        assert_eq!(pairs[27].index_pair, (7, 8));
        let p16 = pairs.iter().find(|p| p.index_pair == (1, 6)).unwrap();
        assert_eq!(p16.code().projector(), leung4().projector());
    }

    #[test]
    fn permute_moves_qubits() {
        let s = StateVector::from_bits("1000").unwrap();
        let moved = permute_qubits(&s, &[2, 1, 0, 3]).unwrap();
        assert_eq!(moved, StateVector::from_bits("0010").unwrap());
        assert!(permute_qubits(&s, &[0, 0, 1, 2]).is_err());
    }

    #[test]
    fn equivalence_search() {
        assert_eq!(permutation_equivalent(&leung4(), &leung4()), Some(vec![0, 1, 2, 3]));
        let perm = permutation_equivalent(&leung4(), &grassl4()).unwrap();
        let mapped = permute_qubits(leung4().one_logical(), &perm).unwrap();
        assert!(mapped.max_abs_diff(grassl4().one_logical()).unwrap() < 1e-15);
        assert!(permutation_equivalent(&leung4(), &third4()).is_some());
        assert!(permutation_equivalent(&leung4(), &repetition3()).is_none());
        let bad = enumerate_pairs()[0].code();
        assert!(permutation_equivalent(&leung4(), &bad).is_none());
    }
}
