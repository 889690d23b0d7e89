//! CHSH and three-setting Bell functionals.
//!
//! `S2 = E00 + E01 + E10 - E11` is bounded by 2 for local causal models.
//! `S3 = E00 - E02 - E11 + E12 - E20 + E21` is bounded by 4 for every model in
//! which one outcome may causally influence the other in a fixed direction,
//! and for convex mixtures of both directions.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_4, FRAC_PI_6, PI};

use serde::{Deserialize, Serialize};

use crate::behavior::{Behavior, Scenario};
use crate::error::{Error, Result};
use crate::quantum::{alice_settings, bob_settings, BlochStatistics, EquatorialSetting, TwoQubitState};

/// Local bound of the CHSH functional.
pub const CHSH_LOCAL_BOUND: f64 = 2.0;
/// Bound of the three-setting functional for one-way outcome influence.
pub const S3_BOUND: f64 = 4.0;

/// One CHSH relabelling: shift Alice's input by `input_a`, Bob's by `input_b`
/// and flip Alice's output when `flip_a` is set.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChshSymmetry {
    pub input_a: usize,
    pub input_b: usize,
    pub flip_a: bool,
}

/// The eight relabellings that carry the CHSH expression onto each of its
/// eight forms (choice of the negated term times overall sign). Index `k`
/// encodes `4·flip_a + 2·input_a + input_b`.
pub const CHSH_SYMMETRIES: [ChshSymmetry; 8] = {
    let mut out = [ChshSymmetry { input_a: 0, input_b: 0, flip_a: false }; 8];
    let mut k = 0;
    while k < 8 {
        out[k] = ChshSymmetry { input_a: (k >> 1) & 1, input_b: k & 1, flip_a: k >= 4 };
        k += 1;
    }
    out
};

impl ChshSymmetry {
    /// Relabelled behavior `p'(a,b|x,y) = p(a ⊕ f, b | x ⊕ i, y ⊕ j)`.
    pub fn apply(&self, behavior: &Behavior) -> Result<Behavior> {
        behavior.scenario().expect(Scenario::CHSH)?;
        let flip = usize::from(self.flip_a);
        behavior.relabel(|a, b, x, y| (a ^ flip, b, x ^ self.input_a, y ^ self.input_b))
    }

    /// Coefficient of `E_xy` in this form of the functional.
    pub fn coefficients(&self) -> [[f64; 2]; 2] {
        let sign = if self.flip_a { -1.0 } else { 1.0 };
        let mut c = [[0.0; 2]; 2];
        for (x, row) in c.iter_mut().enumerate() {
            for (y, v) in row.iter_mut().enumerate() {
                let plain = if (x ^ self.input_a) == 1 && (y ^ self.input_b) == 1 { -1.0 } else { 1.0 };
                *v = sign * plain;
            }
        }
        c
    }

    fn value(&self, e: &[[f64; 2]; 2]) -> f64 {
        let sign = if self.flip_a { -1.0 } else { 1.0 };
        let ev = |x: usize, y: usize| sign * e[x ^ self.input_a][y ^ self.input_b];
        ev(0, 0) + ev(0, 1) + ev(1, 0) - ev(1, 1)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChshReport {
    /// Largest CHSH value over the eight relabellings.
    pub s2: f64,
    pub best_symmetry_index: usize,
    pub per_symmetry_values: [f64; 8],
}

/// CHSH value maximized over the relabelling symmetries.
pub fn chsh_value(behavior: &Behavior) -> Result<ChshReport> {
    behavior.scenario().expect(Scenario::CHSH)?;
    let mut e = [[0.0; 2]; 2];
    for (x, row) in e.iter_mut().enumerate() {
        for (y, v) in row.iter_mut().enumerate() {
            *v = behavior.correlator(x, y);
        }
    }
    Ok(chsh_from_correlators(&e))
}

pub(crate) fn chsh_from_correlators(e: &[[f64; 2]; 2]) -> ChshReport {
    let mut per_symmetry_values = [0.0; 8];
    for (v, sym) in per_symmetry_values.iter_mut().zip(CHSH_SYMMETRIES.iter()) {
        *v = sym.value(e);
    }
    let (best_symmetry_index, s2) = per_symmetry_values
        .iter()
        .copied()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |acc, (i, v)| if v > acc.1 { (i, v) } else { acc });
    ChshReport { s2, best_symmetry_index, per_symmetry_values }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct S3Report {
    pub s3: f64,
    /// `E_xy` in row-major order over `x, y ∈ {0,1,2}`.
    pub expectation_terms: [[f64; 3]; 3],
}

/// Coefficients of `E_xy` in the three-setting functional.
pub const S3_COEFFICIENTS: [[i32; 3]; 3] = [[1, 0, -1], [0, -1, 1], [-1, 1, 0]];

/// Three-setting functional, without symmetrization.
pub fn s3_value(behavior: &Behavior) -> Result<S3Report> {
    behavior.scenario().expect(Scenario::THREE_SETTING)?;
    let mut e = [[0.0; 3]; 3];
    for (x, row) in e.iter_mut().enumerate() {
        for (y, v) in row.iter_mut().enumerate() {
            *v = behavior.correlator(x, y);
        }
    }
    Ok(S3Report { s3: s3_from_correlators(&e), expectation_terms: e })
}

pub(crate) fn s3_from_correlators(e: &[[f64; 3]; 3]) -> f64 {
    e[0][0] - e[0][2] - e[1][1] + e[1][2] - e[2][0] + e[2][1]
}

/// The two Bell functionals used throughout the crate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BellFunctional {
    Chsh,
    S3,
}

impl BellFunctional {
    pub fn scenario(&self) -> Scenario {
        match self {
            BellFunctional::Chsh => Scenario::CHSH,
            BellFunctional::S3 => Scenario::THREE_SETTING,
        }
    }

    /// Bound satisfied by the causal model class each functional tests:
    /// local models for CHSH, one-way outcome influence for S3.
    pub fn bound(&self) -> f64 {
        match self {
            BellFunctional::Chsh => CHSH_LOCAL_BOUND,
            BellFunctional::S3 => S3_BOUND,
        }
    }

    /// CHSH maximized over relabellings, or the plain S3 combination.
    pub fn evaluate(&self, behavior: &Behavior) -> Result<f64> {
        match self {
            BellFunctional::Chsh => chsh_value(behavior).map(|r| r.s2),
            BellFunctional::S3 => s3_value(behavior).map(|r| r.s3),
        }
    }

    /// Exact value on a deterministic assignment `(x, y) -> (a, b)` of binary
    /// outcomes.
    pub fn evaluate_deterministic(&self, outcome: impl Fn(usize, usize) -> (usize, usize)) -> i32 {
        let corr = |x: usize, y: usize| {
            let (a, b) = outcome(x, y);
            if (a + b) % 2 == 0 {
                1
            } else {
                -1
            }
        };
        match self {
            BellFunctional::Chsh => CHSH_SYMMETRIES
                .iter()
                .map(|s| {
                    let sign = if s.flip_a { -1 } else { 1 };
                    let e = |x: usize, y: usize| sign * corr(x ^ s.input_a, y ^ s.input_b);
                    e(0, 0) + e(0, 1) + e(1, 0) - e(1, 1)
                })
                .max()
                .unwrap_or(i32::MIN),
            BellFunctional::S3 => {
                let mut total = 0;
                for (x, row) in S3_COEFFICIENTS.iter().enumerate() {
                    for (y, &c) in row.iter().enumerate() {
                        total += c * corr(x, y);
                    }
                }
                total
            }
        }
    }
}

impl std::fmt::Display for BellFunctional {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            BellFunctional::Chsh => "chsh",
            BellFunctional::S3 => "s3",
        })
    }
}

impl std::str::FromStr for BellFunctional {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "chsh" | "s2" => Ok(BellFunctional::Chsh),
            "s3" => Ok(BellFunctional::S3),
            other => Err(Error::Parse(format!("unknown functional `{other}`"))),
        }
    }
}

/// CHSH settings optimal for the maximally entangled state.
pub fn chsh_fixed_settings() -> (Vec<EquatorialSetting>, Vec<EquatorialSetting>) {
    (alice_settings(&[0.0, FRAC_PI_2]), bob_settings(&[FRAC_PI_4, -FRAC_PI_4]))
}

/// CHSH settings optimal for `γ`: Alice on `Z`, `X`; Bob at `±atan(sin 2γ)`,
/// reaching `2 sqrt(1 + sin² 2γ)`.
pub fn chsh_optimized_settings(gamma: f64) -> (Vec<EquatorialSetting>, Vec<EquatorialSetting>) {
    let tilt = (2.0 * gamma).sin().atan();
    (alice_settings(&[0.0, FRAC_PI_2]), bob_settings(&[tilt, -tilt]))
}

/// Fixed three-setting angles, optimal at `γ = π/4`.
pub fn s3_fixed_settings() -> (Vec<EquatorialSetting>, Vec<EquatorialSetting>) {
    s3_template_settings(FRAC_PI_6, FRAC_PI_3)
}

/// Template `θ^A = {-α, α+π, π/2}`, `θ^B = {-β, β, π}`.
pub fn s3_template_settings(alpha: f64, beta: f64) -> (Vec<EquatorialSetting>, Vec<EquatorialSetting>) {
    (alice_settings(&[-alpha, alpha + PI, FRAC_PI_2]), bob_settings(&[-beta, beta, PI]))
}

/// `(3/2)√3 (1 + sin 2γ)`: S3 of the pure state under the fixed settings.
pub fn s3_fixed_curve(gamma: f64) -> f64 {
    1.5 * 3f64.sqrt() * (1.0 + (2.0 * gamma).sin())
}

/// Closed-form maximum of S3 over the `(α, β)` template for the pure state.
///
/// With `u = cos 4γ` and `r = sqrt(u² + 3)` the value is
/// `√6 (r + 3 - u) / sqrt(2r + 3 - u)`, which runs from 4 at `γ = 0` to `3√3`
/// at `γ = π/4`.
pub fn s3_optimized_closed_form(gamma: f64) -> f64 {
    let u = (4.0 * gamma).cos();
    let r = (u * u + 3.0).sqrt();
    6f64.sqrt() * (r + 3.0 - u) / (2.0 * r + 3.0 - u).sqrt()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptimalSettings {
    pub alpha: f64,
    pub beta: f64,
    pub predicted_s3: f64,
    /// Whether `predicted_s3` exceeds the bound of 4.
    pub violation: bool,
}

const GOLDEN_TOL: f64 = 1e-10;

/// Maximizes `f` on `[lo, hi]` by golden-section search.
pub(crate) fn golden_max(mut f: impl FnMut(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> (f64, f64) {
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = hi - ratio * (hi - lo);
    let mut d = lo + ratio * (hi - lo);
    let mut fc = f(c);
    let mut fd = f(d);
    while hi - lo > tol {
        if fc >= fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - ratio * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + ratio * (hi - lo);
            fd = f(d);
        }
    }
    let x = (lo + hi) / 2.0;
    let fx = f(x);
    (x, fx)
}

/// S3 of the pure state under the `(α, β)` template.
pub fn s3_template_value(stats: &BlochStatistics, alpha: f64, beta: f64) -> f64 {
    let (sa, sb) = s3_template_settings(alpha, beta);
    let mut e = [[0.0; 3]; 3];
    for x in 0..3 {
        for y in 0..3 {
            e[x][y] = stats.correlation(sa[x].bloch_vector(), sb[y].bloch_vector());
        }
    }
    s3_from_correlators(&e)
}

/// Optimizes the template angles for the pure state at `γ ∈ [0, π/2]` by
/// nested golden-section search over `α, β ∈ [0, π/2]`.
pub fn s3_optimized_curve(gamma: f64) -> Result<OptimalSettings> {
    if !(0.0..=FRAC_PI_2).contains(&gamma) {
        return Err(Error::domain(format!("state angle {gamma} outside [0, π/2]")));
    }
    let stats = BlochStatistics::from_state(&TwoQubitState::pure(gamma)?);
    let best_beta = |alpha: f64| golden_max(|beta| s3_template_value(&stats, alpha, beta), 0.0, FRAC_PI_2, GOLDEN_TOL);
    let (alpha, _) = golden_max(|alpha| best_beta(alpha).1, 0.0, FRAC_PI_2, GOLDEN_TOL);
    let (beta, predicted_s3) = best_beta(alpha);
    Ok(OptimalSettings { alpha, beta, predicted_s3, violation: predicted_s3 > S3_BOUND + 1e-12 })
}
