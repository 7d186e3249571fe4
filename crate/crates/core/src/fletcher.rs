//! Optimization of the Fletcher-type recovery parameters for the Leung code
//! under amplitude damping.

use std::f64::consts::{FRAC_PI_2, SQRT_2};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::codes::leung4;
use crate::error::{Error, Result};
use crate::fidelity::{ad_channel, entanglement_fidelity};
use crate::linalg::C64;
use crate::recovery::fletcher_recovery;

/// Tolerance on `|a|² + |b|² = r²` and `r ≤ 1`.
pub const CONSTRAINT_TOL: f64 = 1e-12;
/// Smallest accepted grid resolution for [`numeric_optimum`].
pub const MIN_RESOLUTION: usize = 100;
/// Bracket width at which the golden-section search stops.
pub const ANGLE_TOL: f64 = 1e-12;

/// Real and imaginary parts of `(a, b)` with `|a|² + |b|² = radius²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FletcherParams {
    pub a_re: f64,
    pub a_im: f64,
    pub b_re: f64,
    pub b_im: f64,
    pub radius: f64,
}

impl FletcherParams {
    /// Parameters from complex `(a, b)`; the radius is inferred and must not exceed 1.
    pub fn new(a: C64, b: C64) -> Result<Self> {
        let radius = (a.norm_sqr() + b.norm_sqr()).sqrt();
        if !(radius <= 1.0 + CONSTRAINT_TOL) {
            return Err(Error::ConstraintViolation(radius * radius));
        }
        Ok(Self {
            a_re: a.re,
            a_im: a.im,
            b_re: b.re,
            b_im: b.im,
            radius,
        })
    }

    /// Real parameters `(r cos θ, r sin θ)`.
    pub fn from_angle(theta: f64, radius: f64) -> Result<Self> {
        Self::new(C64::new(radius * theta.cos(), 0.0), C64::new(radius * theta.sin(), 0.0))
    }

    pub fn a(&self) -> C64 {
        C64::new(self.a_re, self.a_im)
    }

    pub fn b(&self) -> C64 {
        C64::new(self.b_re, self.b_im)
    }

    /// `| |a|² + |b|² - radius² |`.
    pub fn constraint_defect(&self) -> f64 {
        (self.a().norm_sqr() + self.b().norm_sqr() - self.radius * self.radius).abs()
    }
}

fn check_gamma(gamma: f64, closed_upper: bool) -> Result<()> {
    let ok = gamma >= 0.0 && if closed_upper { gamma <= 1.0 } else { gamma < 1.0 };
    if ok {
        Ok(())
    } else {
        Err(Error::ParameterOutOfRange {
            name: "gamma",
            value: gamma,
            domain: if closed_upper { "[0, 1]" } else { "[0, 1)" },
        })
    }
}

/// The parameter-independent part
/// `F₀(γ) = ¼[(1+(1-γ)⁴)/2 + (1-γ)² + 2γ(1-γ)(2-γ)² + 2γ²(1-γ)² + γ⁴/2]`.
pub fn f0(gamma: f64) -> f64 {
    let q = 1.0 - gamma;
    0.25 * ((1.0 + q.powi(4)) / 2.0
        + q * q
        + 2.0 * gamma * q * (2.0 - gamma).powi(2)
        + 2.0 * gamma * gamma * q * q
        + gamma.powi(4) / 2.0)
}

/// `F(a, b, γ) = F₀(γ) + (2 a_R (1-γ) + 2 b_R (1-γ)³) / (4√2)`.
///
/// At unit radius this is the entanglement fidelity of the Fletcher recovery;
/// imaginary parts do not enter.
pub fn fletcher_fidelity_closed(params: &FletcherParams, gamma: f64) -> Result<f64> {
    check_gamma(gamma, true)?;
    if !(params.constraint_defect() <= CONSTRAINT_TOL) || !(params.radius <= 1.0 + CONSTRAINT_TOL) {
        return Err(Error::ConstraintViolation(params.a().norm_sqr() + params.b().norm_sqr()));
    }
    let q = 1.0 - gamma;
    Ok(f0(gamma) + (2.0 * params.a_re * q + 2.0 * params.b_re * q.powi(3)) / (4.0 * SQRT_2))
}

/// Full matrix-trace fidelity of the Fletcher recovery with `(a, b)` on the
/// Leung code under four-qubit amplitude damping.
pub fn fletcher_matrix_fidelity(a: C64, b: C64, gamma: f64) -> Result<f64> {
    Ok(entanglement_fidelity(&leung4(), &fletcher_recovery(a, b)?, &ad_channel(gamma)?)?.value)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OptimumMethod {
    ClosedForm,
    Numeric,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Optimum {
    pub a_bar: f64,
    pub b_bar: f64,
    /// `θ` with `(a_bar, b_bar) = (cos θ, sin θ)`.
    pub theta: f64,
    pub f_star: f64,
    pub method: OptimumMethod,
}

impl Optimum {
    pub fn params(&self) -> FletcherParams {
        FletcherParams::from_angle(self.theta, 1.0).expect("unit radius")
    }
}

/// `ā = 1/√(1+(1-γ)⁴)`, `b̄ = (1-γ)²/√(1+(1-γ)⁴)`.
pub fn closed_form_optimum(gamma: f64) -> Result<Optimum> {
    check_gamma(gamma, false)?;
    let k = (1.0 - gamma).powi(2);
    let norm = (1.0 + k * k).sqrt();
    let (a_bar, b_bar) = (1.0 / norm, k / norm);
    let params = FletcherParams::new(C64::new(a_bar, 0.0), C64::new(b_bar, 0.0))?;
    Ok(Optimum {
        a_bar,
        b_bar,
        theta: k.atan(),
        f_star: fletcher_fidelity_closed(&params, gamma)?,
        method: OptimumMethod::ClosedForm,
    })
}

/// Sign of `F(θ1) - F(θ2)` on the unit-radius real quadrant.
///
/// The difference of the θ-dependent part is evaluated as
/// `2(1-γ) sin((θ1-θ2)/2) [k cos m - sin m]` with `k = (1-γ)²` and
/// `m = (θ1+θ2)/2`, which stays accurate next to the flat maximum where
/// subtracting two fidelity values would cancel.
fn better(theta1: f64, theta2: f64, k: f64) -> bool {
    let m = 0.5 * (theta1 + theta2);
    (0.5 * (theta1 - theta2)).sin() * (k * m.cos() - m.sin()) > 0.0
}

/// Maximizes the fidelity over `(a, b) = (cos θ, sin θ)`, `θ ∈ [0, π/2]`:
/// a `resolution`-point scan brackets the maximum, then golden-section
/// search narrows it to `1e-12`.
pub fn numeric_optimum(gamma: f64, resolution: usize) -> Result<Optimum> {
    check_gamma(gamma, false)?;
    if resolution < MIN_RESOLUTION {
        return Err(Error::InvalidGrid(format!(
            "resolution {resolution} below {MIN_RESOLUTION}"
        )));
    }
    let k = (1.0 - gamma).powi(2);
    let step = FRAC_PI_2 / (resolution - 1) as f64;
    let grid: Vec<f64> = (0..resolution).map(|i| (i as f64 * step).min(FRAC_PI_2)).collect();
    let best = (1..resolution).fold(0, |b, i| if better(grid[i], grid[b], k) { i } else { b });
    let (mut lo, mut hi) = (grid[best.saturating_sub(1)], grid[(best + 1).min(resolution - 1)]);

    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    while hi - lo > ANGLE_TOL {
        if better(x1, x2, k) {
            hi = x2;
            x2 = x1;
            x1 = hi - inv_phi * (hi - lo);
        } else {
            lo = x1;
            x1 = x2;
            x2 = lo + inv_phi * (hi - lo);
        }
    }
    let theta = 0.5 * (lo + hi);
    let params = FletcherParams::from_angle(theta, 1.0)?;
    Ok(Optimum {
        a_bar: params.a_re,
        b_bar: params.b_re,
        theta,
        f_star: fletcher_fidelity_closed(&params, gamma)?,
        method: OptimumMethod::Numeric,
    })
}

/// Closed-form optimum scaled to each radius,
/// `(ā_r, b̄_r) = r (ā, b̄)`, paired with its fidelity value.
pub fn radius_sweep(gamma: f64, radii: &[f64]) -> Result<Vec<(f64, f64)>> {
    let opt = closed_form_optimum(gamma)?;
    radii
        .iter()
        .map(|&r| {
            if !(r > 0.0 && r <= 1.0) {
                return Err(Error::ParameterOutOfRange {
                    name: "radius",
                    value: r,
                    domain: "(0, 1]",
                });
            }
            let params = FletcherParams::from_angle(opt.theta, r)?;
            Ok((r, fletcher_fidelity_closed(&params, gamma)?))
        })
        .collect()
}

/// `a - 2aγ - √(1-a²) + aγ²`, zero at the optimal `a`.
pub fn stationarity_residual(a: f64, gamma: f64) -> f64 {
    a - 2.0 * a * gamma - (1.0 - a * a).max(0.0).sqrt() + a * gamma * gamma
}

/// Outcome of [`optimality_certificate`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimalityCertificate {
    pub gamma: f64,
    pub samples: usize,
    pub f_star: f64,
    pub max_sampled: f64,
    /// Samples with `F > f_star + 1e-12`.
    pub violations: usize,
}

impl OptimalityCertificate {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

/// Evaluates the fidelity at `samples` random unit-radius complex `(a, b)`
/// drawn from a seeded generator and counts those exceeding the closed-form optimum.
pub fn optimality_certificate(gamma: f64, samples: usize, seed: u64) -> Result<OptimalityCertificate> {
    let f_star = closed_form_optimum(gamma)?.f_star;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut max_sampled = f64::NEG_INFINITY;
    let mut violations = 0;
    for _ in 0..samples {
        let t = rng.gen_range(0.0..=FRAC_PI_2);
        let a = C64::from_polar(t.cos(), rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI));
        let b = C64::from_polar(t.sin(), rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI));
        let f = fletcher_fidelity_closed(&FletcherParams::new(a, b)?, gamma)?;
        max_sampled = max_sampled.max(f);
        if f > f_star + 1e-12 {
            violations += 1;
        }
    }
    Ok(OptimalityCertificate {
        gamma,
        samples,
        f_star,
        max_sampled,
        violations,
    })
}
