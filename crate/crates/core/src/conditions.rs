//! Detectability, Knill-Laflamme Gram blocks, and first-order correctability.

use crate::channels::{ad_single, enlarge, KrausOperator};
use crate::codes::{QuantumCode, SelfComplementaryPair};
use crate::error::{Error, Result};
use crate::grid::small_gamma_window;
use crate::linalg::{bits_to_index, hermitian_eig, Matrix, StateVector, C64};

/// Default tolerance for exact verdicts.
pub const EXACT_TOL: f64 = 1e-10;
/// Violations at or below this level count as numerically zero in slope fits.
pub const ZERO_FLOOR: f64 = 1e-13;
/// Minimum log-log slope for first-order correctability (`2 - 0.1`).
pub const FIRST_ORDER_SLOPE: f64 = 1.9;
/// Labels of the single-damping AD errors plus the no-damping term.
pub const AD_SINGLE_ERROR_LABELS: [&str; 5] = ["0000", "1000", "0100", "0010", "0001"];

/// Outcome of [`detectability`].
#[derive(Debug, Clone, PartialEq)]
pub struct DetectabilityReport {
    /// `tr(P A P) / tr(P)`.
    pub lambda: C64,
    /// `max |P A P - lambda P|`.
    pub residual: f64,
    /// `residual / max |P A P|`, zero when `P A P` vanishes.
    pub relative_residual: f64,
    /// `(<0_L|A|0_L>, <1_L|A|1_L>)`.
    pub diag: (C64, C64),
    /// `(<0_L|A|1_L>, <1_L|A|0_L>)`.
    pub off_diag: (C64, C64),
    pub verdict: bool,
}

impl DetectabilityReport {
    /// Detectability up to corrections of second order in the noise strength:
    /// the relative residual must not exceed `strength`. An operator whose
    /// restriction is tiny but far from proportional to `P` still fails.
    pub fn first_order_detectable(&self, strength: f64) -> bool {
        self.relative_residual <= strength
    }
}

/// Whether `P A P` is proportional to `P` within `tol`.
pub fn detectability(code: &QuantumCode, a: &Matrix, tol: f64) -> Result<DetectabilityReport> {
    let p = code.projector();
    let pap = &p.try_matmul(a)?.try_matmul(p)?;
    let lambda = pap.trace()? / p.trace()?;
    let residual = pap.max_abs_diff(&p.scale(lambda))?;
    let scale = pap.max_abs();
    let relative_residual = if scale > 0.0 { residual / scale } else { 0.0 };
    let [zero, one] = code.codewords();
    Ok(DetectabilityReport {
        lambda,
        residual,
        relative_residual,
        diag: (a.sandwich(zero, zero)?, a.sandwich(one, one)?),
        off_diag: (a.sandwich(zero, one)?, a.sandwich(one, zero)?),
        verdict: residual <= tol,
    })
}

/// One 2x2 block `<i_L| A_l† A_m |j_L>`.
#[derive(Debug, Clone, PartialEq)]
pub struct GramBlock {
    pub l: usize,
    pub m: usize,
    pub block: Matrix,
    /// `max(|b01|, |b10|)`.
    pub offdiag: f64,
    /// `|b00 - b11|`.
    pub diag_mismatch: f64,
    /// `(lambda_min, lambda_max)` for diagonal pairs `l == m`.
    pub eig: Option<(f64, f64)>,
}

impl GramBlock {
    /// Departure from proportionality to the 2x2 identity.
    pub fn violation(&self) -> f64 {
        self.offdiag.max(self.diag_mismatch)
    }
}

/// All Gram blocks for `l <= m` over a labeled error list.
#[derive(Debug, Clone, PartialEq)]
pub struct KLGram {
    pub labels: Vec<String>,
    /// Blocks in order `(0,0), (0,1), .., (0,n-1), (1,1), ..`.
    pub blocks: Vec<GramBlock>,
    pub max_offdiag_violation: f64,
    pub max_diag_mismatch: f64,
}

impl KLGram {
    /// Block `(l, m)`; for `l > m` this is the adjoint of block `(m, l)`.
    pub fn block(&self, l: usize, m: usize) -> Option<Matrix> {
        let (lo, hi) = if l <= m { (l, m) } else { (m, l) };
        let b = self.blocks.iter().find(|b| b.l == lo && b.m == hi)?;
        Some(if l <= m { b.block.clone() } else { b.block.dagger() })
    }

    pub fn diagonal(&self, l: usize) -> Option<&GramBlock> {
        self.blocks.iter().find(|b| b.l == l && b.m == l)
    }

    pub fn max_violation(&self) -> f64 {
        self.max_offdiag_violation.max(self.max_diag_mismatch)
    }
}

pub fn kl_gram(code: &QuantumCode, errors: &[KrausOperator]) -> Result<KLGram> {
    let [zero, one] = code.codewords();
    let images = errors
        .iter()
        .map(|e| Ok([e.op.apply(zero)?, e.op.apply(one)?]))
        .collect::<Result<Vec<[StateVector; 2]>>>()?;
    let mut blocks = Vec::new();
    for l in 0..errors.len() {
        for m in l..errors.len() {
            let mut block = Matrix::zeros(2, 2);
            for i in 0..2 {
                for j in 0..2 {
                    block[(i, j)] = images[l][i].inner(&images[m][j])?;
                }
            }
            let eig = if l == m {
                let e = hermitian_eig(&block)?;
                Some((e.values[0], e.values[1]))
            } else {
                None
            };
            blocks.push(GramBlock {
                l,
                m,
                offdiag: block[(0, 1)].norm().max(block[(1, 0)].norm()),
                diag_mismatch: (block[(0, 0)] - block[(1, 1)]).norm(),
                block,
                eig,
            });
        }
    }
    Ok(KLGram {
        labels: errors.iter().map(|e| e.label.clone()).collect(),
        max_offdiag_violation: blocks.iter().map(|b| b.offdiag).fold(0.0, f64::max),
        max_diag_mismatch: blocks.iter().map(|b| b.diag_mismatch).fold(0.0, f64::max),
        blocks,
    })
}

/// Outcome of [`exact_correctable`].
#[derive(Debug, Clone, PartialEq)]
pub struct CorrectabilityVerdict {
    pub errors: Vec<String>,
    pub exact: bool,
    pub violation: f64,
    /// Labels of the pair with the largest violation.
    pub witness_pair: Option<(String, String)>,
}

pub fn exact_correctable(code: &QuantumCode, errors: &[KrausOperator], tol: f64) -> Result<CorrectabilityVerdict> {
    let gram = kl_gram(code, errors)?;
    let worst = gram
        .blocks
        .iter()
        .fold(None::<&GramBlock>, |best, b| match best {
            Some(w) if w.violation() >= b.violation() => Some(w),
            _ => Some(b),
        });
    let violation = worst.map_or(0.0, GramBlock::violation);
    Ok(CorrectabilityVerdict {
        errors: gram.labels.clone(),
        exact: violation <= tol,
        violation,
        witness_pair: worst.map(|b| (gram.labels[b.l].clone(), gram.labels[b.m].clone())),
    })
}

/// Scaling of a violation series with the damping rate.
#[derive(Debug, Clone, PartialEq)]
pub struct OrderEstimate {
    pub gammas: Vec<f64>,
    pub violations: Vec<f64>,
    /// Log-log least-squares slope; `None` when every violation is numerically zero.
    pub slope: Option<f64>,
    /// Every violation is at or below `1e-13`.
    pub exact: bool,
    /// Exact, or slope at least `2 - 0.1`.
    pub first_order: bool,
}

fn check_small_gammas(gammas: &[f64]) -> Result<()> {
    if gammas.len() < 2 {
        return Err(Error::InvalidGrid("need at least two damping rates".into()));
    }
    if let Some(g) = gammas.iter().find(|g| !(**g > 0.0 && **g <= 1e-2)) {
        return Err(Error::InvalidGrid(format!("damping rate {g} outside (0, 1e-2]")));
    }
    Ok(())
}

fn loglog_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.max(f64::MIN_POSITIVE).ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

/// Classifies a violation series sampled at `gammas`.
pub fn order_of_series(gammas: &[f64], violations: Vec<f64>) -> Result<OrderEstimate> {
    check_small_gammas(gammas)?;
    if violations.len() != gammas.len() {
        return Err(Error::DimensionMismatch("one violation per damping rate".into()));
    }
    let exact = violations.iter().all(|v| *v <= ZERO_FLOOR);
    let slope = (!exact).then(|| loglog_slope(gammas, &violations));
    Ok(OrderEstimate {
        gammas: gammas.to_vec(),
        first_order: exact || slope.is_some_and(|s| s >= FIRST_ORDER_SLOPE),
        violations,
        slope,
        exact,
    })
}

/// Slope of the maximal Knill-Laflamme violation of `family(gamma)` in `gamma`.
pub fn violation_order(
    family: impl Fn(f64) -> Result<(QuantumCode, Vec<KrausOperator>)>,
    gammas: &[f64],
) -> Result<OrderEstimate> {
    check_small_gammas(gammas)?;
    let violations = gammas
        .iter()
        .map(|&g| {
            let (code, errors) = family(g)?;
            Ok(kl_gram(&code, &errors)?.max_violation())
        })
        .collect::<Result<Vec<_>>>()?;
    order_of_series(gammas, violations)
}

/// The AD errors `A_0000, A_1000, A_0100, A_0010, A_0001` at rate `gamma`.
pub fn ad_single_errors(gamma: f64) -> Result<Vec<KrausOperator>> {
    let channel = enlarge(&ad_single(gamma)?, 4)?;
    Ok(channel.select(&AD_SINGLE_ERROR_LABELS)?.kraus)
}

/// Verdict on one self-complementary pair.
#[derive(Debug, Clone, PartialEq)]
pub struct PairClassification {
    pub indices: (usize, usize),
    pub good: bool,
    /// The first error pair failing first-order correctability.
    pub witness: Option<(String, String)>,
    /// Violation slope of the whole error set; `None` when exact.
    pub slope: Option<f64>,
}

/// Decides whether a self-complementary pair corrects single AD errors to
/// first order, over the default window of nine rates in `[1e-4, 1e-2]`.
///
/// Error pairs are scanned with the errors sorted by their label read as a
/// binary number, taking pairs `(l, m)`, `l <= m`, in order of `m` then `l`;
/// the first pair whose own violation is not first order is the witness,
/// reported with its labels in enlarged-operator order.
pub fn classify_pair(pair: &SelfComplementaryPair) -> Result<PairClassification> {
    classify_pair_on(pair, &small_gamma_window())
}

pub fn classify_pair_on(pair: &SelfComplementaryPair, gammas: &[f64]) -> Result<PairClassification> {
    check_small_gammas(gammas)?;
    let code = pair.code();
    let grams = gammas
        .iter()
        .map(|&g| kl_gram(&code, &ad_single_errors(g)?))
        .collect::<Result<Vec<_>>>()?;

    let n = AD_SINGLE_ERROR_LABELS.len();
    let mut by_value: Vec<usize> = (0..n).collect();
    by_value.sort_by_key(|&i| bits_to_index(AD_SINGLE_ERROR_LABELS[i]).expect("literal label"));

    let mut witness = None;
    'scan: for hi in 0..n {
        for lo in 0..=hi {
            let (a, b) = (by_value[lo], by_value[hi]);
            let (l, m) = (a.min(b), a.max(b));
            let series = grams
                .iter()
                .map(|g| g.blocks.iter().find(|blk| blk.l == l && blk.m == m).map_or(0.0, GramBlock::violation))
                .collect();
            if !order_of_series(gammas, series)?.first_order {
                witness = Some((AD_SINGLE_ERROR_LABELS[l].to_string(), AD_SINGLE_ERROR_LABELS[m].to_string()));
                break 'scan;
            }
        }
    }
    let overall = order_of_series(gammas, grams.iter().map(KLGram::max_violation).collect())?;
    Ok(PairClassification {
        indices: pair.index_pair,
        good: witness.is_none(),
        witness,
        slope: overall.slope,
    })
}

/// `Σ_k <psi| A_k† A_k |psi>` for a state in the codespace.
pub fn detection_probability(code: &QuantumCode, errors: &[KrausOperator], state: &StateVector) -> Result<f64> {
    let projected = code.projector().apply(state)?;
    let residual = projected.max_abs_diff(state)?;
    if residual > EXACT_TOL {
        return Err(Error::NotInCodespace(residual));
    }
    errors
        .iter()
        .map(|e| Ok(e.op.apply(state)?.norm().powi(2)))
        .sum()
}

/// Detection probability averaged over the codespace, `Σ_k tr(P A_k† A_k P) / 2`.
pub fn mean_detection_probability(code: &QuantumCode, errors: &[KrausOperator]) -> Result<f64> {
    let [zero, one] = code.codewords();
    let total: f64 = errors
        .iter()
        .map(|e| Ok(e.op.apply(zero)?.norm().powi(2) + e.op.apply(one)?.norm().powi(2)))
        .sum::<Result<f64>>()?;
    Ok(total / 2.0)
}
