//! Monte-Carlo distributions of the estimators and the detection-efficiency
//! and visibility thresholds of the Bell functionals.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::behavior::Scenario;
use crate::error::{Error, Result};
use crate::experiment::{ace_point, run_rng, InterventionConfig, RunModel};
use crate::inequalities::{BellFunctional, CHSH_SYMMETRIES, S3_COEFFICIENTS};
use crate::quantum::{BlochStatistics, EquatorialSetting, TwoQubitState};

/// Minimum number of runs accepted by [`mc_ace_distribution`].
pub const MIN_RUNS: usize = 1000;

/// Percentile `q ∈ [0, 100]` of an ascending sample by linear interpolation
/// between closest ranks, `h = (n - 1) q / 100`.
pub fn percentile(sorted: &[f64], q: f64) -> f64 {
    assert!(!sorted.is_empty(), "percentile of an empty sample");
    let h = (sorted.len() - 1) as f64 * q.clamp(0.0, 100.0) / 100.0;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Median with the one- and three-sigma percentiles of a sample.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PercentileSummary {
    pub median: f64,
    pub p0013: f64,
    pub p1587: f64,
    pub p8413: f64,
    pub p9987: f64,
    pub runs: usize,
}

impl PercentileSummary {
    pub fn from_samples(samples: &[f64]) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::Estimation("no samples to summarize".into()));
        }
        if samples.iter().any(|v| v.is_nan()) {
            return Err(Error::Numerical("NaN in sample".into()));
        }
        let mut sorted = samples.to_vec();
        sorted.sort_by(f64::total_cmp);
        Ok(PercentileSummary {
            median: percentile(&sorted, 50.0),
            p0013: percentile(&sorted, 0.13),
            p1587: percentile(&sorted, 15.87),
            p8413: percentile(&sorted, 84.13),
            p9987: percentile(&sorted, 99.87),
            runs: samples.len(),
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sampling {
    /// Poisson counts per bin.
    Poisson,
    /// Expected counts, no fluctuations.
    Exact,
}

/// ACE of `runs` seeded runs; run `r` draws from stream `r` of `seed`, so
/// the sample does not depend on the thread count.
pub fn ace_samples(model: &RunModel, runs: usize, seed: u64, sampling: Sampling) -> Result<Vec<f64>> {
    match sampling {
        Sampling::Exact => Ok(vec![model.expected_ace()?; runs]),
        Sampling::Poisson => {
            (0..runs as u64).into_par_iter().map(|r| ace_point(&model.sample_seeded(seed, r))).collect()
        }
    }
}

/// Values of `functional` on the empirical behaviors of `runs` seeded
/// observational runs.
pub fn functional_samples(model: &RunModel, functional: BellFunctional, runs: usize, seed: u64) -> Result<Vec<f64>> {
    (0..runs as u64).into_par_iter().map(|r| functional.evaluate(&model.sample_seeded(seed, r).behavior()?)).collect()
}

pub fn mc_ace_distribution(
    state: &TwoQubitState,
    settings_a: &[EquatorialSetting],
    settings_b: &[EquatorialSetting],
    config: &InterventionConfig,
    total_counts: u64,
    runs: usize,
    seed: u64,
) -> Result<PercentileSummary> {
    mc_ace_distribution_with(state, settings_a, settings_b, config, total_counts, runs, seed, Sampling::Poisson)
}

#[allow(clippy::too_many_arguments)]
pub fn mc_ace_distribution_with(
    state: &TwoQubitState,
    settings_a: &[EquatorialSetting],
    settings_b: &[EquatorialSetting],
    config: &InterventionConfig,
    total_counts: u64,
    runs: usize,
    seed: u64,
    sampling: Sampling,
) -> Result<PercentileSummary> {
    if runs < MIN_RUNS {
        return Err(Error::domain(format!("need at least {MIN_RUNS} runs, got {runs}")));
    }
    if !config.enabled {
        return Err(Error::domain("ACE distribution needs the intervention enabled"));
    }
    let model = RunModel::new(state, settings_a, settings_b, config, total_counts)?;
    PercentileSummary::from_samples(&ace_samples(&model, runs, seed, sampling)?)
}

/// `ace_distribution.csv` body.
pub fn ace_distribution_csv(samples: &[f64]) -> String {
    let mut out = String::from("run,value\n");
    for (r, v) in samples.iter().enumerate() {
        out.push_str(&format!("{r},{v}\n"));
    }
    out
}

/// Multi-start coordinate ascent over equatorial angles.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptimizerOptions {
    pub starts: usize,
    /// Stop once no angle moves by more than this in a sweep.
    pub angle_tol: f64,
    pub max_sweeps: usize,
    pub seed: u64,
}

impl Default for OptimizerOptions {
    fn default() -> Self {
        OptimizerOptions { starts: 20, angle_tol: 1e-8, max_sweeps: 20_000, seed: 0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptimizedFunctional {
    pub value: f64,
    pub theta_a: Vec<f64>,
    pub theta_b: Vec<f64>,
}

/// Correlator `Tr[ρ (O_A ⊗ O_B)]` with the binned observable
/// `M_↑ - M_↓ = (η - 1) I + η n·σ` on both sides.
struct NoisyCorrelations {
    offset: f64,
    scale: f64,
    stats: BlochStatistics,
}

impl NoisyCorrelations {
    fn local_a(&self) -> [f64; 3] {
        self.stats.alice.map(|v| self.offset * self.scale * v)
    }

    fn local_b(&self) -> [f64; 3] {
        self.stats.bob.map(|v| self.offset * self.scale * v)
    }

    fn tensor(&self) -> [[f64; 3]; 3] {
        self.stats.tensor.map(|row| row.map(|v| self.scale * self.scale * v))
    }
}

fn dot(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// Maximizes `sum c_xy E_xy` by exact coordinate updates. For fixed other
/// angles the objective is `g·n` with `n` the Bloch vector of the angle
/// being updated, so the best angle is the direction of `g` in the x-z plane.
fn ascend(
    coeffs: &[Vec<f64>],
    corr: &NoisyCorrelations,
    start_a: Vec<f64>,
    start_b: Vec<f64>,
    options: &OptimizerOptions,
) -> Result<OptimizedFunctional> {
    let la = corr.local_a();
    let lb = corr.local_b();
    let t = corr.tensor();
    let constant = corr.offset * corr.offset;
    let (m_x, m_y) = (start_a.len(), start_b.len());
    let mut ta = start_a;
    let mut tb = start_b;
    let va = |th: f64| EquatorialSetting::alice(th).bloch_vector();
    let vb = |th: f64| EquatorialSetting::bob(th).bloch_vector();
    let t_times = |n: &[f64; 3]| [dot(&t[0], n), dot(&t[1], n), dot(&t[2], n)];
    let t_left = |n: &[f64; 3]| [0, 1, 2].map(|k| n[0] * t[0][k] + n[1] * t[1][k] + n[2] * t[2][k]);
    let value = |ta: &[f64], tb: &[f64]| {
        let mut total = 0.0;
        for x in 0..m_x {
            let na = va(ta[x]);
            for y in 0..m_y {
                let nb = vb(tb[y]);
                total += coeffs[x][y] * (constant + dot(&la, &na) + dot(&lb, &nb) + dot(&na, &t_times(&nb)));
            }
        }
        total
    };
    for _ in 0..options.max_sweeps {
        let mut moved: f64 = 0.0;
        for x in 0..m_x {
            let mut g = [0.0; 3];
            for y in 0..m_y {
                let tn = t_times(&vb(tb[y]));
                for k in 0..3 {
                    g[k] += coeffs[x][y] * (la[k] + tn[k]);
                }
            }
            // Alice's Bloch vector is (sin θ, 0, cos θ)
            if g[0] != 0.0 || g[2] != 0.0 {
                let new = g[0].atan2(g[2]);
                moved = moved.max(angle_gap(new, ta[x]));
                ta[x] = new;
            }
        }
        for y in 0..m_y {
            let mut h = [0.0; 3];
            for x in 0..m_x {
                let tn = t_left(&va(ta[x]));
                for k in 0..3 {
                    h[k] += coeffs[x][y] * (lb[k] + tn[k]);
                }
            }
            // Bob's Bloch vector is (sin θ, 0, -cos θ)
            if h[0] != 0.0 || h[2] != 0.0 {
                let new = h[0].atan2(-h[2]);
                moved = moved.max(angle_gap(new, tb[y]));
                tb[y] = new;
            }
        }
        if moved <= options.angle_tol {
            return Ok(OptimizedFunctional { value: value(&ta, &tb), theta_a: ta, theta_b: tb });
        }
    }
    Err(Error::Numerical(format!(
        "coordinate ascent did not settle within {} sweeps (angles A {ta:?}, B {tb:?}, value {})",
        options.max_sweeps,
        value(&ta, &tb)
    )))
}

fn angle_gap(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(std::f64::consts::TAU);
    d.min(std::f64::consts::TAU - d)
}

/// Correlator coefficient tables of every form of `functional` that is
/// maximized; the functional's value is the largest of them.
fn functional_forms(functional: BellFunctional) -> Vec<Vec<Vec<f64>>> {
    match functional {
        BellFunctional::Chsh => {
            CHSH_SYMMETRIES.iter().map(|s| s.coefficients().iter().map(|row| row.to_vec()).collect()).collect()
        }
        BellFunctional::S3 => {
            vec![S3_COEFFICIENTS.iter().map(|row| row.iter().map(|&c| f64::from(c)).collect()).collect()]
        }
    }
}

/// Largest value of `functional` over equatorial settings for the state at
/// `γ` with visibility `v`, both detectors binned at efficiency `η`.
pub fn max_functional(gamma: f64, functional: BellFunctional, eta: f64, v: f64) -> Result<OptimizedFunctional> {
    max_functional_with(gamma, functional, eta, v, &OptimizerOptions::default())
}

pub fn max_functional_with(
    gamma: f64,
    functional: BellFunctional,
    eta: f64,
    v: f64,
    options: &OptimizerOptions,
) -> Result<OptimizedFunctional> {
    if !(0.0..=1.0).contains(&eta) {
        return Err(Error::domain(format!("efficiency {eta} outside [0,1]")));
    }
    if options.starts == 0 {
        return Err(Error::domain("optimizer needs at least one start"));
    }
    let corr = NoisyCorrelations {
        offset: eta - 1.0,
        scale: eta,
        stats: BlochStatistics::from_state(&TwoQubitState::new(gamma, v)?),
    };
    let Scenario { m_x, m_y, .. } = functional.scenario();
    let mut rng = run_rng(options.seed, 0);
    let starts: Vec<(Vec<f64>, Vec<f64>)> = (0..options.starts)
        .map(|_| {
            let draw = |rng: &mut rand_chacha::ChaCha8Rng, n| {
                (0..n).map(|_| rng.random_range(-std::f64::consts::PI..std::f64::consts::PI)).collect::<Vec<f64>>()
            };
            let a = draw(&mut rng, m_x);
            (a, draw(&mut rng, m_y))
        })
        .collect();
    let mut best: Option<OptimizedFunctional> = None;
    for coeffs in functional_forms(functional) {
        for (a, b) in &starts {
            let candidate = ascend(&coeffs, &corr, a.clone(), b.clone(), options)?;
            if best.as_ref().is_none_or(|cur| candidate.value > cur.value) {
                best = Some(candidate);
            }
        }
    }
    Ok(best.expect("at least one start"))
}

/// Functional values below `bound + VIOLATION_MARGIN` do not count as violations.
pub const VIOLATION_MARGIN: f64 = 1e-9;
/// Bisection stops once the bracket is narrower than this.
pub const THRESHOLD_TOL: f64 = 1e-3;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThresholdResult {
    pub gamma: f64,
    pub functional: BellFunctional,
    /// Smallest efficiency violating the bound at unit visibility.
    pub critical_eta: f64,
    /// Smallest visibility violating the bound at unit efficiency.
    pub critical_v: f64,
}

fn violates(gamma: f64, functional: BellFunctional, eta: f64, v: f64) -> Result<bool> {
    Ok(max_functional(gamma, functional, eta, v)?.value > functional.bound() + VIOLATION_MARGIN)
}

/// Smallest `t ∈ [0, 1]` with `pred(t)` true, assuming monotonicity, to
/// within [`THRESHOLD_TOL`]. `None` if `pred(1)` is false.
fn bisect(mut pred: impl FnMut(f64) -> Result<bool>) -> Result<Option<f64>> {
    if !pred(1.0)? {
        return Ok(None);
    }
    let (mut lo, mut hi) = (0.0, 1.0);
    if pred(lo)? {
        return Ok(Some(lo));
    }
    while hi - lo > THRESHOLD_TOL {
        let mid = 0.5 * (lo + hi);
        if pred(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(Some(hi))
}

pub fn critical_thresholds(gamma: f64, functional: BellFunctional) -> Result<ThresholdResult> {
    if !(gamma > 0.0 && gamma < std::f64::consts::FRAC_PI_2) {
        return Err(Error::domain(format!("state angle {gamma} outside (0, π/2)")));
    }
    let no_violation = || {
        Error::Numerical(format!(
            "{functional} shows no violation at γ = {gamma} with ideal detectors; no threshold exists"
        ))
    };
    let critical_eta = bisect(|eta| violates(gamma, functional, eta, 1.0))?.ok_or_else(no_violation)?;
    let critical_v = bisect(|v| violates(gamma, functional, 1.0, v))?.ok_or_else(no_violation)?;
    Ok(ThresholdResult { gamma, functional, critical_eta, critical_v })
}

/// Smallest violating efficiency at each visibility, `None` where even
/// `η = 1` does not violate.
pub fn eta_boundary(gamma: f64, functional: BellFunctional, visibilities: &[f64]) -> Result<Vec<Option<f64>>> {
    visibilities.par_iter().map(|&v| bisect(|eta| violates(gamma, functional, eta, v))).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThresholdGridRow {
    pub gamma: f64,
    pub eta: f64,
    pub v: f64,
    pub max_functional: f64,
    pub violated: bool,
}

/// `{0.50, 0.55, ..., 1.00}`.
pub fn default_grid_axis() -> Vec<f64> {
    (0..=10).map(|k| 0.5 + 0.05 * f64::from(k)).collect()
}

/// Optimized functional on every `(η, v)` cell, η-major.
pub fn threshold_grid(
    gamma: f64,
    functional: BellFunctional,
    etas: &[f64],
    vs: &[f64],
) -> Result<Vec<ThresholdGridRow>> {
    let cells: Vec<(f64, f64)> = etas.iter().flat_map(|&eta| vs.iter().map(move |&v| (eta, v))).collect();
    cells
        .par_iter()
        .map(|&(eta, v)| {
            let value = max_functional(gamma, functional, eta, v)?.value;
            Ok(ThresholdGridRow {
                gamma,
                eta,
                v,
                max_functional: value,
                violated: value > functional.bound() + VIOLATION_MARGIN,
            })
        })
        .collect()
}

/// `threshold_grid.csv` body.
pub fn threshold_grid_csv(rows: &[ThresholdGridRow]) -> String {
    let mut out = String::from("gamma,eta,v,max_functional,violated\n");
    for r in rows {
        out.push_str(&format!("{},{},{},{},{}\n", r.gamma, r.eta, r.v, r.max_functional, r.violated));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::inequalities::{chsh_value, s3_value};
    use crate::quantum::{alice_settings, bob_settings, born_behavior, DetectorModel};
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_PI_4, FRAC_PI_8};

    #[test]
    fn percentile_interpolates_linearly() {
        let xs = [1.0, 2.0, 3.0, 4.0, 5.0];
        assert_eq!(percentile(&xs, 50.0), 3.0);
        assert_eq!(percentile(&xs, 0.0), 1.0);
        assert_eq!(percentile(&xs, 100.0), 5.0);
        assert_abs_diff_eq!(percentile(&xs, 10.0), 1.4, epsilon = 1e-15);
        assert_abs_diff_eq!(percentile(&[0.0, 10.0], 99.87), 9.987, epsilon = 1e-12);
        assert_eq!(percentile(&[7.0], 0.13), 7.0);
    }

    #[test]
    fn summary_is_ordered_and_order_free() {
        let xs: Vec<f64> = (0..1000).map(|i| ((i * 7919) % 1000) as f64).collect();
        let s = PercentileSummary::from_samples(&xs).unwrap();
        assert!(s.p0013 <= s.p1587 && s.p1587 <= s.median && s.median <= s.p8413 && s.p8413 <= s.p9987);
        let mut rev = xs.clone();
        rev.reverse();
        assert_eq!(PercentileSummary::from_samples(&rev).unwrap(), s);
        assert!(PercentileSummary::from_samples(&[]).is_err());
    }

    #[test]
    fn too_few_runs_rejected() {
        let (sa, sb) = crate::inequalities::chsh_fixed_settings();
        let state = TwoQubitState::pure(FRAC_PI_4).unwrap();
        let config = InterventionConfig::intervening();
        assert!(mc_ace_distribution(&state, &sa, &sb, &config, 48_000, 999, 1).is_err());
        let exact = mc_ace_distribution_with(&state, &sa, &sb, &config, 48_000, 1000, 1, Sampling::Exact).unwrap();
        assert_eq!((exact.p0013, exact.median, exact.p9987), (0.0, 0.0, 0.0));
    }

    #[test]
    fn optimizer_matches_born_rule_evaluation() {
        for (functional, gamma, eta, v) in
            [(BellFunctional::S3, 0.5, 0.93, 0.95), (BellFunctional::Chsh, 0.3, 0.9, 0.97)]
        {
            let best = max_functional(gamma, functional, eta, v).unwrap();
            let state = TwoQubitState::new(gamma, v).unwrap();
            let b = born_behavior(
                &state,
                &alice_settings(&best.theta_a),
                &bob_settings(&best.theta_b),
                &DetectorModel::binned(eta).unwrap(),
            )
            .unwrap();
            let direct = match functional {
                BellFunctional::Chsh => chsh_value(&b).unwrap().s2,
                BellFunctional::S3 => s3_value(&b).unwrap().s3,
            };
            assert_abs_diff_eq!(direct, best.value, epsilon = 1e-12);
        }
    }

    #[test]
    fn ideal_values_are_recovered() {
        let s3 = max_functional(FRAC_PI_4, BellFunctional::S3, 1.0, 1.0).unwrap();
        assert_abs_diff_eq!(s3.value, 3.0 * 3f64.sqrt(), epsilon = 1e-9);
        let chsh = max_functional(FRAC_PI_4, BellFunctional::Chsh, 1.0, 1.0).unwrap();
        assert_abs_diff_eq!(chsh.value, 2.0 * 2f64.sqrt(), epsilon = 1e-9);
        let g = FRAC_PI_8;
        let horodecki = 2.0 * (1.0 + (2.0 * g).sin().powi(2)).sqrt();
        assert_abs_diff_eq!(
            max_functional(g, BellFunctional::Chsh, 1.0, 1.0).unwrap().value,
            horodecki,
            epsilon = 1e-9
        );
    }

    #[test]
    fn visibility_threshold_is_the_bound_ratio() {
        let r = critical_thresholds(FRAC_PI_4, BellFunctional::Chsh).unwrap();
        assert!((r.critical_v - 1.0 / 2f64.sqrt()).abs() <= THRESHOLD_TOL);
        assert!((r.critical_eta - 2.0 * (2f64.sqrt() - 1.0)).abs() <= THRESHOLD_TOL);
        assert!(critical_thresholds(0.0, BellFunctional::S3).is_err());
    }

    #[test]
    fn grid_csv_layout() {
        let rows = threshold_grid(FRAC_PI_4, BellFunctional::S3, &[1.0], &[0.5, 1.0]).unwrap();
        assert_eq!(rows.len(), 2);
        assert!(!rows[0].violated && rows[1].violated);
        let csv = threshold_grid_csv(&rows);
        assert!(csv.starts_with("gamma,eta,v,max_functional,violated\n"));
        assert_eq!(default_grid_axis().len(), 11);
        assert_abs_diff_eq!(default_grid_axis()[10], 1.0, epsilon = 1e-15);
        assert_eq!(ace_distribution_csv(&[0.5]), "run,value\n0,0.5\n");
    }
}
