//! One function per subcommand, each producing a table and its certificates.

use anyhow::{bail, Result};
use qecwb_core::channels::{ad_single, bitflip_single, certify as certify_channel, enlarge, phaseflip_single, KrausChannel};
use qecwb_core::codes::{enumerate_pairs, leung4, permutation_equivalent};
use qecwb_core::conditions::classify_pair;
use qecwb_core::fidelity::{
    ad_channel, baseline_no_qec, bitflip_fidelity, entanglement_fidelity, second_order_coeff, threshold_analysis,
};
use qecwb_core::fletcher::{closed_form_optimum, numeric_optimum, Optimum};
use qecwb_core::grid::{small_gamma_window, validate_increasing};
use qecwb_core::linalg::{Matrix, StateVector, C64};
use qecwb_core::recovery::{
    cp_recovery, fletcher_recovery, polar_decompose, repetition_recovery, residue_auto, restricted_extremes,
    standard_ad_recovery, RecoveryOperation,
};
use qecwb_core::schema::{ClassificationRecord, FletcherReport};
use serde_json::json;

use crate::output::{Cell, Table};

/// A pass/fail check attached to a report.
#[derive(Debug, Clone)]
pub struct Certificate {
    pub name: String,
    pub detail: String,
    pub passed: bool,
}

impl Certificate {
    fn bound(name: impl Into<String>, deviation: f64, tol: f64) -> Self {
        Self {
            name: name.into(),
            detail: format!("deviation {deviation:e} (tolerance {tol:e})"),
            passed: deviation <= tol,
        }
    }
}

pub struct Report {
    pub table: Table,
    pub certificates: Vec<Certificate>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum RecoveryChoice {
    Qec,
    Cp,
    Fletcher,
    FletcherOpt,
}

fn check_gamma_grid(grid: &[f64]) -> Result<()> {
    validate_increasing(grid, 0.0, 1.0)?;
    if grid.last().is_some_and(|&g| g >= 1.0) {
        bail!("damping rates must lie in [0, 1)");
    }
    Ok(())
}

fn channel_certificate(name: String, ch: &KrausChannel, tol: f64) -> Certificate {
    Certificate::bound(name, certify_channel(ch).completeness_deviation, tol)
}

fn recovery_certificate(name: String, rec: &RecoveryOperation, tol: f64) -> Certificate {
    Certificate::bound(name, rec.completeness_defect(), tol)
}

pub fn bitflip(grid: &[f64], tol: f64) -> Result<Report> {
    validate_increasing(grid, 0.0, 1.0)?;
    let report = threshold_analysis(
        |p| Ok(bitflip_fidelity(p)?.value),
        |p| baseline_no_qec(&bitflip_single(p)?),
        grid,
    )?;
    let mut table = Table::new(
        "three-qubit repetition code under bit flips",
        &["p", "F_code", "F_baseline", "P_failure", "coding_useful", "failure_below_p"],
    );
    let mut certificates = vec![recovery_certificate("repetition recovery completeness".into(), &repetition_recovery(), tol)];
    for (i, &p) in grid.iter().enumerate() {
        let f = bitflip_fidelity(p)?.value;
        table.push(vec![
            p.into(),
            f.into(),
            baseline_no_qec(&bitflip_single(p)?)?.into(),
            (1.0 - f).into(),
            report.coding_useful[i].into(),
            report.failure_below_p[i].into(),
        ]);
        certificates.push(channel_certificate(
            format!("bit-flip channel completeness at p={p}"),
            &enlarge(&bitflip_single(p)?, 3)?,
            tol,
        ));
    }
    table.note("failure_threshold", report.failure_threshold);
    table.note("coding_useful_until", report.coding_useful_range.map(|(_, hi)| hi));
    table.note("coding_useful_everywhere", report.useful_everywhere());
    Ok(Report { table, certificates })
}

/// The recovery used at rate `gamma`, and the Fletcher optimum behind it if any.
fn build_recovery(
    choice: RecoveryChoice,
    params: Option<(C64, C64)>,
    resolution: usize,
    gamma: f64,
) -> qecwb_core::Result<(RecoveryOperation, Option<Optimum>)> {
    Ok(match choice {
        RecoveryChoice::Qec => (standard_ad_recovery(gamma)?, None),
        RecoveryChoice::Cp => (cp_recovery(), None),
        RecoveryChoice::Fletcher => match params {
            Some((a, b)) => (fletcher_recovery(a, b)?, None),
            None => {
                let o = closed_form_optimum(gamma)?;
                (fletcher_recovery(C64::new(o.a_bar, 0.0), C64::new(o.b_bar, 0.0))?, Some(o))
            }
        },
        RecoveryChoice::FletcherOpt => {
            let o = numeric_optimum(gamma, resolution)?;
            (fletcher_recovery(C64::new(o.a_bar, 0.0), C64::new(o.b_bar, 0.0))?, Some(o))
        }
    })
}

pub fn ad_fidelity(
    grid: &[f64],
    choice: RecoveryChoice,
    params: Option<(C64, C64)>,
    resolution: usize,
    tol: f64,
) -> Result<Report> {
    check_gamma_grid(grid)?;
    let code = leung4();
    let fletcher = matches!(choice, RecoveryChoice::Fletcher | RecoveryChoice::FletcherOpt);
    let columns: &[&str] = if fletcher {
        &["gamma", "F", "a_re", "a_im", "b_re", "b_im"]
    } else {
        &["gamma", "F"]
    };
    let mut table = Table::new(format!("Leung code under amplitude damping, {choice:?} recovery"), columns);
    let mut certificates = Vec::new();
    let mut reports = Vec::new();
    for &g in grid {
        let (rec, optimum) = build_recovery(choice, params, resolution, g)?;
        let ch = ad_channel(g)?;
        let f = entanglement_fidelity(&code, &rec, &ch)?.value;
        let mut row: Vec<Cell> = vec![g.into(), f.into()];
        if let Some((a, b)) = rec.params {
            row.extend([a.re.into(), a.im.into(), b.re.into(), b.im.into()]);
        }
        table.push(row);
        certificates.push(recovery_certificate(format!("recovery completeness at gamma={g}"), &rec, tol));
        certificates.push(channel_certificate(format!("AD channel completeness at gamma={g}"), &ch, tol));
        if choice == RecoveryChoice::FletcherOpt {
            let numeric = optimum.expect("numeric optimum");
            reports.push(FletcherReport::new(g, &closed_form_optimum(g)?, &numeric));
        }
    }

    let in_window: Vec<f64> = grid.iter().copied().filter(|&g| g > 0.0 && g <= 1e-2).collect();
    let fit_gammas = if in_window.len() >= 3 { in_window } else { small_gamma_window() };
    let fit = second_order_coeff(
        |g| Ok(entanglement_fidelity(&code, &build_recovery(choice, params, resolution, g)?.0, &ad_channel(g)?)?.value),
        &fit_gammas,
    )?;
    table.note("fit_c0", fit.c0);
    table.note("fit_c1", fit.c1);
    table.note("fit_c2", fit.c2);
    table.note("fit_residual", fit.residual);
    table.note("fit_samples", fit.gammas_used.len());
    if choice == RecoveryChoice::FletcherOpt {
        table.extra.push(("fletcher_optimum".into(), serde_json::to_value(&reports)?));
    }
    Ok(Report { table, certificates })
}

pub fn enumerate() -> Result<Report> {
    let pairs = enumerate_pairs();
    let mut table = Table::new(
        "self-complementary four-qubit codeword pairs",
        &["i", "j", "good", "witness_1", "witness_2", "slope"],
    );
    let mut records = Vec::new();
    for pair in &pairs {
        let cls = classify_pair(pair)?;
        let (w1, w2) = cls.witness.clone().unzip();
        table.push(vec![
            cls.indices.0.into(),
            cls.indices.1.into(),
            cls.good.into(),
            w1.into(),
            w2.into(),
            cls.slope.into(),
        ]);
        records.push(ClassificationRecord::from(&cls));
    }
    let good: Vec<_> = pairs
        .iter()
        .zip(&records)
        .filter(|(_, r)| r.good)
        .map(|(p, _)| p)
        .collect();
    let mut equivalences = Vec::new();
    for (i, x) in good.iter().enumerate() {
        for y in &good[i + 1..] {
            let perm = permutation_equivalent(&x.code(), &y.code());
            table.note(
                &format!("equivalence v{}v{} -> v{}v{}", x.index_pair.0, x.index_pair.1, y.index_pair.0, y.index_pair.1),
                perm.as_ref().map(|p| format!("{p:?}").replace(", ", " ")),
            );
            equivalences.push(json!({
                "from": [x.index_pair.0, x.index_pair.1],
                "to": [y.index_pair.0, y.index_pair.1],
                "permutation": perm,
            }));
        }
    }
    table.note("total", pairs.len());
    table.note("summary", format!("{} good", good.len()));
    table.extra.push(("equivalences".into(), json!(equivalences)));
    Ok(Report { table, certificates: Vec::new() })
}

pub fn fig1(grid: &[f64], tol: f64) -> Result<Report> {
    check_gamma_grid(grid)?;
    let code = leung4();
    let mut table = Table::new(
        "entanglement fidelity of the three amplitude-damping recoveries",
        &["gamma", "F_qec", "F_cp", "F_fletcher", "F_baseline", "series_qec", "series_cp", "series_fletcher"],
    );
    let mut certificates = Vec::new();
    for &g in grid {
        let ch = ad_channel(g)?;
        let mut row: Vec<Cell> = vec![g.into()];
        for choice in [RecoveryChoice::Qec, RecoveryChoice::Cp, RecoveryChoice::Fletcher] {
            let (rec, _) = build_recovery(choice, None, 0, g)?;
            row.push(entanglement_fidelity(&code, &rec, &ch)?.value.into());
            certificates.push(recovery_certificate(format!("{choice:?} completeness at gamma={g}"), &rec, tol));
        }
        row.push(baseline_no_qec(&ad_single(g)?)?.into());
        for c2 in [2.0, 1.75, 1.5] {
            row.push((1.0 - c2 * g * g).into());
        }
        table.push(row);
    }
    Ok(Report { table, certificates })
}

const SUBSPACE: [&str; 4] = ["0000", "0011", "1100", "1111"];

pub fn appendix_a(gamma: f64, tol: f64) -> Result<Report> {
    check_gamma_grid(&[gamma])?;
    let code = leung4();
    let p = code.projector();
    let a = ad_channel(gamma)?.get("0000").expect("no-damping operator").op.clone();
    let (lo, hi) = restricted_extremes(&a, p)?;
    let polar = polar_decompose(&a, p)?;
    let residue = residue_auto(&a, p)?;

    let basis: Vec<StateVector> = SUBSPACE.iter().map(|b| StateVector::from_bits(b)).collect::<Result<_, _>>()?;
    let blocks = [("U_0000", polar.u.restrict(&basis)?), ("pi_0000", residue.pi.restrict(&basis)?)];
    let mut table = Table::new(
        format!("polar decomposition and residue of the no-damping operator at gamma={gamma}"),
        &["quantity", "row", "col", "re", "im"],
    );
    for (name, m) in &blocks {
        for (i, r) in SUBSPACE.iter().enumerate() {
            for (j, c) in SUBSPACE.iter().enumerate() {
                table.push(vec![(*name).into(), (*r).into(), (*c).into(), m[(i, j)].re.into(), m[(i, j)].im.into()]);
            }
        }
    }

    let q2 = (1.0 - gamma).powi(2);
    let corner = gamma / 2.0 + 0.5 * ((q2 * q2 + 1.0) / 2.0).sqrt() - 0.5;
    let pi_closed = Matrix::from_real(4, 4, &[corner, 0., 0., corner, 0., 0., 0., 0., 0., 0., 0., 0., corner, 0., 0., corner])?;
    table.note("gamma", gamma);
    table.note("lambda_min", lo);
    table.note("lambda_max", hi);
    table.note("pi_corner_closed_form", corner);
    table.note("pi_closed_form_deviation", blocks[1].1.max_abs_diff(&pi_closed)?);
    table.note("pi_max_singular_value", residue.singular_values.first().copied());
    table.note("residue_bound_ok", residue.bound_ok);

    let unitarity = (&polar.u.dagger() * &polar.u).max_abs_diff(&Matrix::identity(16))?;
    let consistency = (&a * p).max_abs_diff(&(&polar.u * &polar.j))?;
    let certificates = vec![
        Certificate::bound("U_0000 unitarity", unitarity, tol),
        Certificate::bound("A P = U J", consistency, tol),
        Certificate {
            name: "residue operator bound".into(),
            detail: format!("largest singular value {:e}", residue.singular_values.first().copied().unwrap_or(0.0)),
            passed: residue.bound_ok,
        },
    ];
    Ok(Report { table, certificates })
}

pub fn certify(grid: &[f64], tol: f64) -> Result<Report> {
    validate_increasing(grid, 0.0, 1.0)?;
    let mut table = Table::new(
        "trace-preservation and completeness certificates",
        &["object", "param", "deviation", "unital", "passed"],
    );
    let mut certificates = Vec::new();
    let mut record = |table: &mut Table, object: String, param: Option<f64>, deviation: f64, unital: Option<bool>| {
        let cert = Certificate::bound(format!("{object} at {param:?}"), deviation, tol);
        table.push(vec![object.into(), param.into(), deviation.into(), unital.into(), cert.passed.into()]);
        certificates.push(cert);
    };

    for &x in grid {
        let singles = [("bit-flip", bitflip_single(x)?, 3), ("phase-flip", phaseflip_single(x)?, 3), ("amplitude-damping", ad_single(x)?, 4)];
        for (name, single, n) in singles {
            for (label, ch) in [(format!("{name} 1-qubit"), single.clone()), (format!("{name} {n}-qubit"), enlarge(&single, n)?)] {
                let cert = certify_channel(&ch);
                record(&mut table, label, Some(x), cert.completeness_deviation, Some(cert.unital));
            }
        }
    }
    record(&mut table, "repetition recovery".into(), None, repetition_recovery().completeness_defect(), None);
    record(&mut table, "code-projected recovery".into(), None, cp_recovery().completeness_defect(), None);
    for &g in grid.iter().filter(|&&g| g < 1.0) {
        record(&mut table, "standard recovery".into(), Some(g), standard_ad_recovery(g)?.completeness_defect(), None);
        let (rec, _) = build_recovery(RecoveryChoice::Fletcher, None, 0, g)?;
        record(&mut table, "fletcher recovery".into(), Some(g), rec.completeness_defect(), None);
    }
    let failures = certificates.iter().filter(|c| !c.passed).count();
    table.note("checks", certificates.len());
    table.note("failures", failures);
    table.note("tolerance", tol);
    Ok(Report { table, certificates })
}
