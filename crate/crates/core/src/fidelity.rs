//! Entanglement fidelity of code/recovery/channel triples, baselines,
//! thresholds and small-parameter series fits.

use crate::channels::{ad_single, bitflip_single, enlarge, KrausChannel};
use crate::codes::{repetition3, QuantumCode};
use crate::error::{Error, Result};
use crate::linalg::{StateVector, C64};
use crate::recovery::{repetition_recovery, RecoveryOperation, COMPLETENESS_TOL};

/// Default cut-off for [`nonvanishing_terms`].
pub const TERM_TOL: f64 = 1e-14;

/// One `(R_k, A_l)` contribution; `k` is `None` for the leftover `Ô`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FidelityTerm {
    pub k: Option<usize>,
    pub l: usize,
    /// `<0_L|R A|0_L> + <1_L|R A|1_L>`.
    pub trace: C64,
    /// `|trace|² / 4`.
    pub contribution: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FidelityResult {
    pub value: f64,
    pub terms: Vec<FidelityTerm>,
}

impl FidelityResult {
    /// Sum of the per-term contributions, in table order.
    pub fn recomputed(&self) -> f64 {
        self.terms.iter().map(|t| t.contribution).sum()
    }
}

/// `F = (1/4) Σ_{k,l} |<0_L|R_k A_l|0_L> + <1_L|R_k A_l|1_L>|²`, with the
/// leftover `Ô` (if any) counted as one more recovery operator.
pub fn entanglement_fidelity(
    code: &QuantumCode,
    recovery: &RecoveryOperation,
    errors: &KrausChannel,
) -> Result<FidelityResult> {
    let dim = code.dim();
    if recovery.dim() != dim || errors.dim() != dim {
        return Err(Error::DimensionMismatch(format!(
            "code dim {dim}, recovery dim {}, channel dim {}",
            recovery.dim(),
            errors.dim()
        )));
    }
    let defect = recovery.completeness_defect();
    if !(defect <= COMPLETENESS_TOL) {
        return Err(Error::InvalidData(format!(
            "recovery is not trace preserving (defect {defect:e})"
        )));
    }
    let [zero, one] = code.codewords();
    let damaged: Vec<[StateVector; 2]> = errors
        .kraus
        .iter()
        .map(|a| Ok([a.op.apply(zero)?, a.op.apply(one)?]))
        .collect::<Result<_>>()?;
    let recoveries = recovery
        .ops
        .iter()
        .enumerate()
        .map(|(k, r)| (Some(k), &r.op))
        .chain(recovery.leftover.as_ref().map(|o| (None, o)));

    let mut terms = Vec::new();
    for (k, r) in recoveries {
        for (l, [d0, d1]) in damaged.iter().enumerate() {
            let trace = zero.inner(&r.apply(d0)?)? + one.inner(&r.apply(d1)?)?;
            terms.push(FidelityTerm {
                k,
                l,
                trace,
                contribution: trace.norm_sqr() / 4.0,
            });
        }
    }
    let value = terms.iter().map(|t| t.contribution).sum();
    Ok(FidelityResult { value, terms })
}

/// `(k, l)` pairs of recovery operators `R_k` (leftover excluded) whose
/// contribution exceeds `tol`.
pub fn nonvanishing_terms(result: &FidelityResult, tol: f64) -> Vec<(usize, usize)> {
    result
        .terms
        .iter()
        .filter(|t| t.contribution > tol)
        .filter_map(|t| t.k.map(|k| (k, t.l)))
        .collect()
}

/// Unprotected single-qubit fidelity `(1/4) Σ |Tr A_k|²`.
pub fn baseline_no_qec(channel: &KrausChannel) -> Result<f64> {
    if channel.n_qubits != 1 {
        return Err(Error::DimensionMismatch(format!(
            "baseline needs a single-qubit channel, got {} qubits",
            channel.n_qubits
        )));
    }
    channel
        .kraus
        .iter()
        .map(|a| Ok(a.op.trace()?.norm_sqr() / 4.0))
        .sum()
}

/// Four-qubit amplitude damping at rate `gamma`, enlarged.
pub fn ad_channel(gamma: f64) -> Result<KrausChannel> {
    enlarge(&ad_single(gamma)?, 4)
}

/// Repetition code with its recovery under three-qubit bit flips at `p`.
pub fn bitflip_fidelity(p: f64) -> Result<FidelityResult> {
    entanglement_fidelity(&repetition3(), &repetition_recovery(), &enlarge(&bitflip_single(p)?, 3)?)
}

/// Where encoding beats the bare qubit and where failure stays below `p`.
#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdReport {
    pub grid: Vec<f64>,
    /// `F_code(p) ≥ F_baseline(p)` (within `1e-12`) per grid point.
    pub coding_useful: Vec<bool>,
    /// First grid point and end of the initial run where coding is useful.
    pub coding_useful_range: Option<(f64, f64)>,
    /// `1 - F_code(p) ≤ p` per grid point.
    pub failure_below_p: Vec<bool>,
    /// End of the initial run where `1 - F ≤ p`, refined by bisection to `1e-10`.
    pub failure_threshold: Option<f64>,
}

impl ThresholdReport {
    pub fn useful_everywhere(&self) -> bool {
        self.coding_useful.iter().all(|&u| u)
    }
}

/// Bisection width for [`threshold_analysis`].
pub const THRESHOLD_TOL: f64 = 1e-10;

/// Compares a protected fidelity curve against a baseline on `grid`.
pub fn threshold_analysis(
    fidelity: impl Fn(f64) -> Result<f64>,
    baseline: impl Fn(f64) -> Result<f64>,
    grid: &[f64],
) -> Result<ThresholdReport> {
    crate::grid::validate_increasing(grid, 0.0, 1.0)?;
    let excess = |p: f64| -> Result<f64> { Ok(1.0 - fidelity(p)? - p) };

    let mut coding_useful = Vec::with_capacity(grid.len());
    let mut excesses = Vec::with_capacity(grid.len());
    for &p in grid {
        coding_useful.push(fidelity(p)? >= baseline(p)? - 1e-12);
        excesses.push(excess(p)?);
    }
    let run = coding_useful.iter().take_while(|&&u| u).count();
    let coding_useful_range = (run > 0).then(|| (grid[0], grid[run - 1]));
    let failure_below_p: Vec<bool> = excesses.iter().map(|&e| e <= 0.0).collect();

    let failure_threshold = match failure_below_p.iter().position(|&ok| !ok) {
        Some(0) => None,
        Some(i) => {
            let (mut lo, mut hi) = (grid[i - 1], grid[i]);
            while hi - lo > THRESHOLD_TOL {
                let mid = 0.5 * (lo + hi);
                if excess(mid)? <= 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            Some(0.5 * (lo + hi))
        }
        None => grid.last().copied(),
    };
    Ok(ThresholdReport {
        grid: grid.to_vec(),
        coding_useful,
        coding_useful_range,
        failure_below_p,
        failure_threshold,
    })
}

/// Quadratic fit `F(γ) ≈ c0 + c1 γ + c2 γ²`.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesEstimate {
    pub c0: f64,
    pub c1: f64,
    pub c2: f64,
    /// Largest absolute deviation of the fit on the samples.
    pub residual: f64,
    pub gammas_used: Vec<f64>,
}

/// Weighted least-squares quadratic fit of `curve` on `gammas` (at least
/// three distinct samples in `(0, 1e-2]`).
///
/// Each sample is weighted by `1/γ²`, so every point counts equally relative
/// to the second-order signal and the cubic remainder at the largest samples
/// does not drag `c2`. The design uses `t = γ / max γ` and is solved by
/// Gram-Schmidt QR with one reorthogonalization pass.
pub fn second_order_coeff(curve: impl Fn(f64) -> Result<f64>, gammas: &[f64]) -> Result<SeriesEstimate> {
    if gammas.len() < 3 {
        return Err(Error::InvalidGrid(format!("need at least 3 samples, got {}", gammas.len())));
    }
    if let Some(g) = gammas.iter().find(|g| !(**g > 0.0 && **g <= 1e-2)) {
        return Err(Error::InvalidGrid(format!("sample {g} outside (0, 1e-2]")));
    }
    let scale = gammas.iter().copied().fold(0.0, f64::max);
    let ys: Vec<f64> = gammas.iter().map(|&g| curve(g)).collect::<Result<_>>()?;
    let ts: Vec<f64> = gammas.iter().map(|g| g / scale).collect();

    let mut q: Vec<Vec<f64>> = (0..3).map(|p| ts.iter().map(|t| t.powi(p - 2)).collect()).collect();
    let weighted: Vec<f64> = ys.iter().zip(&ts).map(|(y, t)| y / (t * t)).collect();
    let mut r = [[0.0; 3]; 3];
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    let first_norm = dot(&q[0], &q[0]).sqrt();
    for j in 0..3 {
        for _ in 0..2 {
            for i in 0..j {
                let proj = dot(&q[i], &q[j]);
                r[i][j] += proj;
                let (head, tail) = q.split_at_mut(j);
                for (x, y) in tail[0].iter_mut().zip(&head[i]) {
                    *x -= proj * y;
                }
            }
        }
        r[j][j] = dot(&q[j], &q[j]).sqrt();
        if !(r[j][j] > 1e-10 * first_norm) {
            return Err(Error::IllConditioned(format!(
                "design column {j} is nearly dependent (pivot {:e})",
                r[j][j]
            )));
        }
        let norm = r[j][j];
        q[j].iter_mut().for_each(|x| *x /= norm);
    }
    let qty: Vec<f64> = q.iter().map(|col| dot(col, &weighted)).collect();
    let mut c = [0.0; 3];
    for i in (0..3).rev() {
        c[i] = (qty[i] - (i + 1..3).map(|j| r[i][j] * c[j]).sum::<f64>()) / r[i][i];
    }
    let residual = ts
        .iter()
        .zip(&ys)
        .map(|(t, y)| (c[0] + c[1] * t + c[2] * t * t - y).abs())
        .fold(0.0, f64::max);
    Ok(SeriesEstimate {
        c0: c[0],
        c1: c[1] / scale,
        c2: c[2] / (scale * scale),
        residual,
        gammas_used: gammas.to_vec(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::KrausOperator;
    use crate::codes::leung4;
    use crate::grid::{linspace, small_gamma_window};
    use crate::linalg::Matrix;
    use crate::recovery::{cp_recovery, standard_ad_recovery, RecoveryKind, RecoveryOperator};
    use proptest::prelude::*;

    fn qec_oracle(g: f64) -> f64 {
        let q = 1.0 - g;
        let n = 1.0 + q.powi(4);
        0.25 * ((n / 2.0).sqrt() + q).powi(2)
            + ((g * q.powi(3) / 2.0).sqrt() + (g * q / 2.0).sqrt()).powi(2)
            + 0.25 * (2.0 / n) * (g * g / 2.0).powi(2)
            + 0.25 * (g * g * q * q * (q * q - 1.0) / (2.0 * n)).powi(2)
    }

    fn cp_oracle(g: f64) -> f64 {
        let q = 1.0 - g;
        0.25 * ((q + g * g / 2.0 + q).powi(2)
            + (g - g * g / 2.0).powi(2)
            + 2.0 * (g * g / 2.0).powi(2)
            + 4.0 * ((2.0 - g) * (g * q / 2.0).sqrt()).powi(2)
            + 4.0 * (g * q / 2f64.sqrt()).powi(2))
    }

    #[test]
    fn bitflip_closed_form() {
        for p in linspace(0.0, 1.0, 101) {
            let f = bitflip_fidelity(p).unwrap().value;
            assert!((f - (1.0 - 3.0 * p * p + 2.0 * p.powi(3))).abs() <= 1e-10, "p = {p}");
        }
        assert!((bitflip_fidelity(0.1).unwrap().value - 0.972).abs() < 1e-12);
    }

    #[test]
    fn standard_recovery_matches_closed_form() {
        for g in [0.0, 0.01, 0.1, 0.3, 0.7] {
            let f = entanglement_fidelity(&leung4(), &standard_ad_recovery(g).unwrap(), &ad_channel(g).unwrap())
                .unwrap()
                .value;
            assert!((f - qec_oracle(g)).abs() <= 1e-12, "gamma {g}: {f} vs {}", qec_oracle(g));
        }
    }

    #[test]
    fn cp_recovery_matches_closed_form() {
        for g in [0.0, 0.01, 0.1, 0.5] {
            let f = entanglement_fidelity(&leung4(), &cp_recovery(), &ad_channel(g).unwrap()).unwrap().value;
            assert!((f - cp_oracle(g)).abs() <= 1e-12, "gamma {g}");
        }
    }

    #[test]
    fn term_audits() {
        let bf = bitflip_fidelity(0.3).unwrap();
        assert_eq!(nonvanishing_terms(&bf, TERM_TOL), vec![(0, 0), (1, 1), (2, 2), (3, 3)]);
        let g = 0.1;
        let ad = entanglement_fidelity(&leung4(), &standard_ad_recovery(g).unwrap(), &ad_channel(g).unwrap()).unwrap();
        let mut pairs = nonvanishing_terms(&ad, TERM_TOL);
        pairs.sort();
        assert_eq!(pairs, vec![(0, 0), (0, 15), (1, 1), (2, 2), (3, 3), (4, 4)]);
        assert_eq!(ad.recomputed(), ad.value);
    }

    #[test]
    fn identity_channel_single_term() {
        let code = leung4();
        let identity = KrausChannel {
            n_qubits: 4,
            param: 0.0,
            kraus: vec![KrausOperator { label: "0000".into(), weight: 0, op: Matrix::identity(16) }],
        };
        let p = code.projector();
        let rec = RecoveryOperation {
            name: RecoveryKind::CodeProjected,
            ops: vec![RecoveryOperator { label: "R1".into(), op: p.clone() }],
            leftover: Some(&Matrix::identity(16) - p),
            params: None,
        };
        let r = entanglement_fidelity(&code, &rec, &identity).unwrap();
        assert!((r.value - 1.0).abs() <= 1e-15);
        assert_eq!(nonvanishing_terms(&r, TERM_TOL), vec![(0, 0)]);
    }

    #[test]
    fn rejects_incomplete_recovery() {
        let mut rec = cp_recovery();
        rec.ops.pop();
        assert!(entanglement_fidelity(&leung4(), &rec, &ad_channel(0.1).unwrap()).is_err());
    }

    #[test]
    fn baselines() {
        // Tr(√(1-p) I) = 2√(1-p) and Tr(√p X) = 0.
        for p in [0.0, 0.2, 0.9] {
            let b = baseline_no_qec(&bitflip_single(p).unwrap()).unwrap();
            assert!((b - (1.0 - p)).abs() < 1e-15);
        }
        let ad = baseline_no_qec(&ad_single(0.1).unwrap()).unwrap();
        assert!((ad - 0.25 * (1.0 + 0.9f64.sqrt()).powi(2)).abs() < 1e-15);
        assert!(baseline_no_qec(&ad_channel(0.1).unwrap()).is_err());
    }

    #[test]
    fn bitflip_threshold() {
        let report = threshold_analysis(
            |p| Ok(bitflip_fidelity(p)?.value),
            |p| baseline_no_qec(&bitflip_single(p)?),
            &linspace(0.0, 1.0, 101),
        )
        .unwrap();
        // F_code - (1 - p) = p (1 - p)(1 - 2p) changes sign at p = 1/2.
        assert!(!report.useful_everywhere());
        assert_eq!(report.coding_useful_range, Some((0.0, 0.5)));
        assert!((report.failure_threshold.unwrap() - 0.5).abs() <= 1e-10);
        assert!(report.failure_below_p[0]);
    }

    #[test]
    fn series_fits() {
        let w = small_gamma_window();
        let constant = second_order_coeff(|_| Ok(1.0), &w).unwrap();
        assert!((constant.c0 - 1.0).abs() < 1e-14 && constant.c1.abs() < 1e-10 && constant.c2.abs() < 1e-8);
        let quad = second_order_coeff(|g| Ok(0.5 - 3.0 * g + 7.0 * g * g), &w).unwrap();
        assert!((quad.c0 - 0.5).abs() < 1e-12 && (quad.c1 + 3.0).abs() < 1e-9 && (quad.c2 - 7.0).abs() < 1e-6);
        let qec = second_order_coeff(|g| Ok(qec_oracle(g)), &w).unwrap();
        assert!((qec.c2 + 2.0).abs() <= 1e-2 && qec.residual <= 1e-6);
        let cp = second_order_coeff(|g| Ok(cp_oracle(g)), &w).unwrap();
        assert!((cp.c2 + 1.75).abs() <= 1e-2 && cp.residual <= 1e-6);
    }

    #[test]
    fn series_rejects_bad_grids() {
        assert!(matches!(second_order_coeff(|_| Ok(1.0), &[1e-3, 2e-3]), Err(Error::InvalidGrid(_))));
        assert!(second_order_coeff(|_| Ok(1.0), &[1e-3, 2e-3, 0.5]).is_err());
        assert!(matches!(
            second_order_coeff(|_| Ok(1.0), &[1e-3, 1e-3, 1e-3]),
            Err(Error::IllConditioned(_))
        ));
    }

    proptest! {
        #[test]
        fn fidelity_bounded_and_consistent(g in 0.0f64..=1.0) {
            let ch = ad_channel(g).unwrap();
            let mut recs = vec![cp_recovery()];
            if g < 1.0 {
                recs.push(standard_ad_recovery(g).unwrap());
            }
            for rec in recs {
                let r = entanglement_fidelity(&leung4(), &rec, &ch).unwrap();
                prop_assert!(r.value >= 0.0 && r.value <= 1.0 + 1e-12);
                prop_assert_eq!(r.recomputed(), r.value);
            }
        }

        #[test]
        fn bitflip_matches_closed_form_anywhere(p in 0.0f64..=1.0) {
            let f = bitflip_fidelity(p).unwrap().value;
            prop_assert!((f - (1.0 - 3.0 * p * p + 2.0 * p.powi(3))).abs() <= 1e-10);
        }
    }
}
