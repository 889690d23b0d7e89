//! Simulation of the interventional CHSH experiment.
//!
//! Each run is a table of Poisson counts, one independent draw per bin with
//! mean `N · p(bin)`. The bin probability folds in the uniform choice of
//! settings and, when intervening, the uniform choice of the forced outcome
//! `a_do`. Bins are visited in [`CountsTable`] storage order
//! `(x, y, a_do, a, b)`; bins with zero mean consume no random draws.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::behavior::{Behavior, Scenario};
use crate::error::{Error, Result};
use crate::noise::percentile;
use crate::quantum::{
    born_behavior, density_matrix, identity2, pauli_matrices, trace_product2, DetectorModel, EquatorialSetting, Party,
    TwoQubitState,
};

/// Tilt of the intervention axis, in radians, used to model residual
/// waveplate imperfections.
pub const SYSTEMATIC_TILT: f64 = 0.0109;

/// One parsed counts line: (x, y, forced a, a, b, count).
type CsvRow = (usize, usize, Option<usize>, usize, usize, u64);

/// Seeded generator for run `stream` of a simulation seeded with `seed`.
pub fn run_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct InterventionConfig {
    pub enabled: bool,
    /// Deviation of the projection axis from the circular-polarization pole
    /// toward the H/V axis.
    pub tilt: f64,
}

impl Default for InterventionConfig {
    fn default() -> Self {
        InterventionConfig::observational()
    }
}

impl InterventionConfig {
    pub fn observational() -> Self {
        InterventionConfig { enabled: false, tilt: 0.0 }
    }

    pub fn intervening() -> Self {
        InterventionConfig { enabled: true, tilt: 0.0 }
    }

    pub fn with_tilt(tilt: f64) -> Result<Self> {
        let config = InterventionConfig { enabled: true, tilt };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..std::f64::consts::FRAC_PI_2).contains(&self.tilt) {
            return Err(Error::domain(format!("tilt {} outside [0, π/2)", self.tilt)));
        }
        Ok(())
    }
}

/// Bob's statistics `p(b | do(a), y)` for binary `a` and `b`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InterventionalTable {
    /// `table[y][a][b]`.
    pub table: Vec<[[f64; 2]; 2]>,
}

impl InterventionalTable {
    pub fn m_y(&self) -> usize {
        self.table.len()
    }

    #[inline]
    pub fn p(&self, b: usize, a: usize, y: usize) -> f64 {
        self.table[y][a][b]
    }

    /// `max_{b,y} |p(b|do(0),y) - p(b|do(1),y)|`.
    pub fn ace(&self) -> f64 {
        let mut best: f64 = 0.0;
        for row in &self.table {
            for b in 0..2 {
                best = best.max((row[0][b] - row[1][b]).abs());
            }
        }
        best
    }
}

/// Bob's outcome statistics after Alice's photon is projected on the
/// (possibly tilted) circular basis and re-prepared to force `a`.
///
/// The projection outcome is summed over. With tilt `t` the projector Bloch
/// vectors are `±cos t Ŷ + (-1)^a sin t Ẑ`, giving
/// `p(b|do(a),y) = Tr[(ρ_B + (-1)^a sin t Tr_A[(Z⊗I)ρ]) M_b] / (1 + (-1)^a sin t ⟨Z_A⟩)`.
pub fn intervened_distribution(
    state: &TwoQubitState,
    settings_b: &[EquatorialSetting],
    config: &InterventionConfig,
) -> Result<InterventionalTable> {
    if !config.enabled {
        return Err(Error::domain("interventional statistics need the intervention enabled"));
    }
    config.validate()?;
    if settings_b.is_empty() || settings_b.iter().any(|s| s.party != Party::Bob) {
        return Err(Error::domain("need at least one Bob setting"));
    }
    let rho = density_matrix(state);
    let rho_b = rho.condition_alice(&identity2());
    let z = pauli_matrices()[2];
    let z_cond = rho.condition_alice(&z);
    let z_mean = (z_cond[0][0] + z_cond[1][1]).re;
    let tilt_sin = config.tilt.sin();
    let table = settings_b
        .iter()
        .map(|setting| {
            let povm = DetectorModel::PERFECT.povm(setting);
            let mut row = [[0.0; 2]; 2];
            for (a, out) in row.iter_mut().enumerate() {
                let s = if a == 0 { tilt_sin } else { -tilt_sin };
                let norm = 1.0 + s * z_mean;
                for (b, p) in out.iter_mut().enumerate() {
                    *p = (trace_product2(&rho_b, &povm[b]).re + s * trace_product2(&z_cond, &povm[b]).re) / norm;
                }
            }
            row
        })
        .collect();
    Ok(InterventionalTable { table })
}

/// Integer counts per bin `(x, y, a_do, a, b)`; observational tables have a
/// single `a_do` slot.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountsTable {
    scenario: Scenario,
    intervening: bool,
    total_target: u64,
    counts: Vec<u64>,
}

impl CountsTable {
    pub fn new(scenario: Scenario, intervening: bool, total_target: u64) -> Self {
        let slots = if intervening { scenario.o_a } else { 1 };
        CountsTable { scenario, intervening, total_target, counts: vec![0; scenario.len() * slots] }
    }

    pub fn scenario(&self) -> Scenario {
        self.scenario
    }

    pub fn is_intervening(&self) -> bool {
        self.intervening
    }

    pub fn total_target(&self) -> u64 {
        self.total_target
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    fn do_slots(&self) -> usize {
        if self.intervening {
            self.scenario.o_a
        } else {
            1
        }
    }

    fn slot(&self, x: usize, y: usize, a_do: Option<usize>, a: usize, b: usize) -> Result<usize> {
        let s = self.scenario;
        let d = match (self.intervening, a_do) {
            (true, Some(d)) if d < s.o_a => d,
            (false, None) => 0,
            _ => return Err(Error::domain(format!("forced outcome {a_do:?} does not fit this table"))),
        };
        if x >= s.m_x || y >= s.m_y || a >= s.o_a || b >= s.o_b {
            return Err(Error::domain(format!("bin ({x}, {y}, {a}, {b}) outside scenario {s}")));
        }
        Ok(((((x * s.m_y + y) * self.do_slots() + d) * s.o_a + a) * s.o_b) + b)
    }

    pub fn get(&self, x: usize, y: usize, a_do: Option<usize>, a: usize, b: usize) -> Result<u64> {
        Ok(self.counts[self.slot(x, y, a_do, a, b)?])
    }

    pub fn set(&mut self, x: usize, y: usize, a_do: Option<usize>, a: usize, b: usize, count: u64) -> Result<()> {
        let i = self.slot(x, y, a_do, a, b)?;
        self.counts[i] = count;
        Ok(())
    }

    /// Raw counts in storage order.
    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    /// Bins in storage order as `(x, y, a_do, a, b)`.
    pub fn bins(&self) -> impl Iterator<Item = (usize, usize, Option<usize>, usize, usize)> + '_ {
        let s = self.scenario;
        let slots = self.do_slots();
        let intervening = self.intervening;
        (0..self.counts.len()).map(move |mut i| {
            let b = i % s.o_b;
            i /= s.o_b;
            let a = i % s.o_a;
            i /= s.o_a;
            let d = i % slots;
            i /= slots;
            (i / s.m_y, i % s.m_y, intervening.then_some(d), a, b)
        })
    }

    /// Same counts with Bob's settings renamed `y → perm[y]`.
    pub fn relabel_bob_settings(&self, perm: &[usize]) -> Result<Self> {
        let m_y = self.scenario.m_y;
        let mut seen = vec![false; m_y];
        if perm.len() != m_y || perm.iter().any(|&p| p >= m_y || std::mem::replace(&mut seen[p], true)) {
            return Err(Error::domain("not a permutation of Bob's settings"));
        }
        let mut out = CountsTable::new(self.scenario, self.intervening, self.total_target);
        for ((x, y, d, a, b), &c) in self.bins().zip(&self.counts) {
            out.set(x, perm[y], d, a, b, c)?;
        }
        Ok(out)
    }

    /// Relative frequencies of an observational table.
    pub fn behavior(&self) -> Result<Behavior> {
        if self.intervening {
            return Err(Error::domain("interventional counts do not define an observational behavior"));
        }
        let mut ordered = vec![0; self.scenario.len()];
        for ((x, y, _, a, b), &c) in self.bins().zip(&self.counts) {
            ordered[self.scenario.index(a, b, x, y)] = c;
        }
        Behavior::from_counts(self.scenario, &ordered)
    }

    /// CSV with header `x,y,a_do,a,b,count`; `a_do` is `-` for
    /// observational tables.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,y,a_do,a,b,count\n");
        for ((x, y, d, a, b), c) in self.bins().zip(&self.counts) {
            let d = d.map_or_else(|| "-".to_string(), |d| d.to_string());
            out.push_str(&format!("{x},{y},{d},{a},{b},{c}\n"));
        }
        out
    }

    /// Parses [`CountsTable::to_csv`] output. The scenario is inferred from
    /// the largest indices and `total_target` is set to the observed total.
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| Error::Parse("empty counts file".into()))?;
        if header.split(',').map(str::trim).collect::<Vec<_>>() != ["x", "y", "a_do", "a", "b", "count"] {
            return Err(Error::Parse(format!("unexpected counts header `{header}`")));
        }
        let mut rows: Vec<CsvRow> = Vec::new();
        for (n, line) in lines.enumerate() {
            let cells: Vec<&str> = line.split(',').map(str::trim).collect();
            let bad = || Error::Parse(format!("counts row {}: `{line}`", n + 1));
            if cells.len() != 6 {
                return Err(bad());
            }
            let num = |c: &str| c.parse::<usize>().map_err(|_| bad());
            let d = if cells[2] == "-" { None } else { Some(num(cells[2])?) };
            let count = cells[5].parse::<u64>().map_err(|_| bad())?;
            rows.push((num(cells[0])?, num(cells[1])?, d, num(cells[3])?, num(cells[4])?, count));
        }
        if rows.is_empty() {
            return Err(Error::Parse("counts file has no rows".into()));
        }
        let intervening = rows[0].2.is_some();
        if rows.iter().any(|r| r.2.is_some() != intervening) {
            return Err(Error::Parse("mixed observational and interventional rows".into()));
        }
        let dim = |f: fn(&CsvRow) -> usize| rows.iter().map(f).max().unwrap_or(0) + 1;
        let o_a = dim(|r| r.3).max(dim(|r| r.2.unwrap_or(0)));
        let scenario = Scenario::new(dim(|r| r.0), dim(|r| r.1), o_a, dim(|r| r.4))?;
        let mut table = CountsTable::new(scenario, intervening, 0);
        for &(x, y, d, a, b, c) in &rows {
            table.set(x, y, d, a, b, c)?;
        }
        table.total_target = table.total();
        Ok(table)
    }
}

/// Bin means of one experimental configuration, reusable across runs.
#[derive(Clone, Debug)]
pub struct RunModel {
    template: CountsTable,
    means: Vec<f64>,
    samplers: Vec<Option<Poisson<f64>>>,
}

impl RunModel {
    pub fn new(
        state: &TwoQubitState,
        settings_a: &[EquatorialSetting],
        settings_b: &[EquatorialSetting],
        config: &InterventionConfig,
        total_counts: u64,
    ) -> Result<Self> {
        if total_counts == 0 {
            return Err(Error::domain("total_counts must be positive"));
        }
        config.validate()?;
        // also validates both setting lists
        let observed = born_behavior(state, settings_a, settings_b, &DetectorModel::PERFECT)?;
        let scenario = observed.scenario();
        let template = CountsTable::new(scenario, config.enabled, total_counts);
        let setting_weight = total_counts as f64 / (scenario.m_x * scenario.m_y) as f64;
        let means: Vec<f64> = if config.enabled {
            let forced = intervened_distribution(state, settings_b, config)?;
            let do_weight = setting_weight / scenario.o_a as f64;
            template
                .bins()
                .map(|(_, y, d, a, b)| if Some(a) == d { do_weight * forced.p(b, a, y) } else { 0.0 })
                .collect()
        } else {
            template.bins().map(|(x, y, _, a, b)| setting_weight * observed.p(a, b, x, y)).collect()
        };
        let samplers = means
            .iter()
            .map(|&m| if m > 0.0 { Poisson::new(m).map(Some) } else { Ok(None) })
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::Numerical(format!("Poisson mean rejected: {e}")))?;
        Ok(RunModel { template, means, samplers })
    }

    /// Expected counts in storage order.
    pub fn means(&self) -> &[f64] {
        &self.means
    }

    pub fn scenario(&self) -> Scenario {
        self.template.scenario
    }

    pub fn sample<R: rand::Rng + ?Sized>(&self, rng: &mut R) -> CountsTable {
        let mut table = self.template.clone();
        for (slot, sampler) in table.counts.iter_mut().zip(&self.samplers) {
            if let Some(p) = sampler {
                *slot = p.sample(rng) as u64;
            }
        }
        table
    }

    /// Run `stream` of the simulation seeded with `seed`.
    pub fn sample_seeded(&self, seed: u64, stream: u64) -> CountsTable {
        self.sample(&mut run_rng(seed, stream))
    }

    /// Plug-in ACE of the expected counts, i.e. the infinite-statistics value.
    pub fn expected_ace(&self) -> Result<f64> {
        if !self.template.intervening {
            return Err(Error::domain("ACE needs an interventional configuration"));
        }
        ace_from_weights(&self.template, &self.means)
    }
}

/// One seeded run: Poisson counts per bin with mean `total_counts · p(bin)`.
pub fn simulate_run(
    state: &TwoQubitState,
    settings_a: &[EquatorialSetting],
    settings_b: &[EquatorialSetting],
    config: &InterventionConfig,
    total_counts: u64,
    seed: u64,
) -> Result<CountsTable> {
    Ok(RunModel::new(state, settings_a, settings_b, config, total_counts)?.sample_seeded(seed, 0))
}

fn ace_from_weights(layout: &CountsTable, weights: &[f64]) -> Result<f64> {
    let s = layout.scenario;
    // cell[(y * o_a + a_do) * o_b + b], pooled over x and the recorded a
    let mut cells = vec![0.0; s.m_y * s.o_a * s.o_b];
    for ((_, y, d, _, b), &w) in layout.bins().zip(weights) {
        let d = d.expect("interventional layout");
        cells[(y * s.o_a + d) * s.o_b + b] += w;
    }
    let mut best: f64 = 0.0;
    for y in 0..s.m_y {
        let cond: Vec<Vec<f64>> = (0..s.o_a)
            .map(|d| {
                let row = &cells[(y * s.o_a + d) * s.o_b..(y * s.o_a + d + 1) * s.o_b];
                let total: f64 = row.iter().sum();
                if total > 0.0 {
                    Ok(row.iter().map(|c| c / total).collect())
                } else {
                    Err(Error::Estimation(format!("no counts in cell do(a={d}), y={y}")))
                }
            })
            .collect::<Result<_>>()?;
        for a in 0..s.o_a {
            for a2 in (a + 1)..s.o_a {
                for b in 0..s.o_b {
                    best = best.max((cond[a][b] - cond[a2][b]).abs());
                }
            }
        }
    }
    Ok(best)
}

/// Plug-in ACE `max_{b,y,a,a'} |p̂(b|do(a),y) - p̂(b|do(a'),y)|`, pooling
/// Alice's settings.
pub fn ace_point(counts: &CountsTable) -> Result<f64> {
    if !counts.intervening {
        return Err(Error::Estimation("ACE needs interventional counts".into()));
    }
    let weights: Vec<f64> = counts.counts.iter().map(|&c| c as f64).collect();
    ace_from_weights(counts, &weights)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AceEstimate {
    pub value: f64,
    pub interval_low: f64,
    pub interval_high: f64,
}

/// Parametric Poisson bootstrap of the ACE statistic: every bin is redrawn
/// with its observed count as mean and the [0.13%, 99.87%] percentiles of
/// the recomputed statistic form the interval, widened to contain the point
/// value if needed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AceEstimator {
    pub resamples: usize,
    pub seed: u64,
}

impl Default for AceEstimator {
    fn default() -> Self {
        AceEstimator { resamples: 2000, seed: 0 }
    }
}

impl AceEstimator {
    pub fn estimate(&self, counts: &CountsTable) -> Result<AceEstimate> {
        let value = ace_point(counts)?;
        if self.resamples == 0 {
            return Ok(AceEstimate { value, interval_low: value, interval_high: value });
        }
        let samplers: Vec<Option<Poisson<f64>>> =
            counts.counts.iter().map(|&c| if c > 0 { Poisson::new(c as f64).ok() } else { None }).collect();
        let draws: Vec<Option<f64>> = (0..self.resamples as u64)
            .into_par_iter()
            .map(|r| {
                let mut rng = run_rng(self.seed, r);
                let weights: Vec<f64> =
                    samplers.iter().map(|s| s.as_ref().map_or(0.0, |p| p.sample(&mut rng))).collect();
                ace_from_weights(counts, &weights).ok()
            })
            .collect();
        let mut values: Vec<f64> = draws.into_iter().flatten().collect();
        if values.len() * 2 < self.resamples {
            return Err(Error::Estimation(format!(
                "only {} of {} bootstrap resamples had every conditioning cell populated",
                values.len(),
                self.resamples
            )));
        }
        values.sort_by(f64::total_cmp);
        Ok(AceEstimate {
            value,
            interval_low: percentile(&values, 0.13).min(value),
            interval_high: percentile(&values, 99.87).max(value),
        })
    }
}

/// [`AceEstimator::estimate`] with default settings.
pub fn estimate_ace(counts: &CountsTable) -> Result<AceEstimate> {
    AceEstimator::default().estimate(counts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::inequalities::chsh_fixed_settings;
    use crate::quantum::bob_settings;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::FRAC_PI_4;

    fn one_y_table(do0: (u64, u64), do1: (u64, u64)) -> CountsTable {
        let s = Scenario::new(1, 1, 2, 2).unwrap();
        let mut t = CountsTable::new(s, true, 200);
        t.set(0, 0, Some(0), 0, 0, do0.0).unwrap();
        t.set(0, 0, Some(0), 0, 1, do0.1).unwrap();
        t.set(0, 0, Some(1), 1, 0, do1.0).unwrap();
        t.set(0, 0, Some(1), 1, 1, do1.1).unwrap();
        t
    }

    #[test]
    fn hand_computed_ace() {
        let t = one_y_table((60, 40), (40, 60));
        assert_abs_diff_eq!(ace_point(&t).unwrap(), 0.2, epsilon = 1e-15);
        let est = estimate_ace(&t).unwrap();
        assert!(est.interval_low <= est.value && est.value <= est.interval_high);
    }

    #[test]
    fn proportional_counts_give_zero() {
        let t = one_y_table((30, 70), (300, 700));
        assert_eq!(ace_point(&t).unwrap(), 0.0);
    }

    #[test]
    fn empty_cell_is_named() {
        let t = one_y_table((60, 40), (0, 0));
        let err = ace_point(&t).unwrap_err().to_string();
        assert!(err.contains("do(a=1), y=0"), "{err}");
    }

    #[test]
    fn untilted_intervention_is_independent_of_forced_outcome() {
        let (_, sb) = chsh_fixed_settings();
        for g in [0.0, 0.2, FRAC_PI_4, 1.1] {
            let state = TwoQubitState::new(g, 0.9).unwrap();
            let t = intervened_distribution(&state, &sb, &InterventionConfig::intervening()).unwrap();
            assert_eq!(t.ace(), 0.0);
        }
    }

    #[test]
    fn product_state_gives_bobs_local_statistics() {
        // γ = 0 leaves Bob in V; his ↑ projector along (sin θ, 0, -cos θ)
        let sb = bob_settings(&[0.3, 2.0]);
        let t = intervened_distribution(&TwoQubitState::pure(0.0).unwrap(), &sb, &InterventionConfig::intervening())
            .unwrap();
        for (y, s) in sb.iter().enumerate() {
            assert_abs_diff_eq!(t.p(0, 0, y), (1.0 + s.theta.cos()) / 2.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn tilt_creates_small_offset() {
        let (_, sb) = chsh_fixed_settings();
        let state = TwoQubitState::pure(FRAC_PI_4).unwrap();
        let t = intervened_distribution(&state, &sb, &InterventionConfig::with_tilt(SYSTEMATIC_TILT).unwrap()).unwrap();
        let want = SYSTEMATIC_TILT.sin() * sb.iter().map(|s| s.theta.cos().abs()).fold(0.0, f64::max);
        assert_abs_diff_eq!(t.ace(), want, epsilon = 1e-12);
        assert!(t.ace() > 0.0 && t.ace() < 0.02);
        for row in &t.table {
            for a in 0..2 {
                assert_abs_diff_eq!(row[a][0] + row[a][1], 1.0, epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn config_validation() {
        assert!(InterventionConfig::with_tilt(-0.1).is_err());
        assert!(InterventionConfig::with_tilt(std::f64::consts::FRAC_PI_2).is_err());
        let (_, sb) = chsh_fixed_settings();
        let state = TwoQubitState::pure(0.3).unwrap();
        assert!(intervened_distribution(&state, &sb, &InterventionConfig::observational()).is_err());
    }

    #[test]
    fn runs_are_reproducible_and_near_budget() {
        let (sa, sb) = chsh_fixed_settings();
        let state = TwoQubitState::pure(FRAC_PI_4).unwrap();
        let config = InterventionConfig::intervening();
        let a = simulate_run(&state, &sa, &sb, &config, 48_000, 7).unwrap();
        let b = simulate_run(&state, &sa, &sb, &config, 48_000, 7).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, simulate_run(&state, &sa, &sb, &config, 48_000, 8).unwrap());
        assert!((a.total() as f64 - 48_000.0).abs() < 4.0 * 48_000f64.sqrt());
        assert!(simulate_run(&state, &sa, &sb, &config, 0, 7).is_err());
        // forced outcome and recorded outcome coincide
        for ((_, _, d, aa, _), &c) in a.bins().zip(a.counts()) {
            if d != Some(aa) {
                assert_eq!(c, 0);
            }
        }
    }

    #[test]
    fn exact_means_give_zero_ace() {
        let (sa, sb) = chsh_fixed_settings();
        for g in [0.1, FRAC_PI_4] {
            let model =
                RunModel::new(&TwoQubitState::pure(g).unwrap(), &sa, &sb, &InterventionConfig::intervening(), 48_000)
                    .unwrap();
            assert_eq!(model.expected_ace().unwrap(), 0.0);
        }
    }

    #[test]
    fn csv_round_trip() {
        let (sa, sb) = chsh_fixed_settings();
        let state = TwoQubitState::pure(0.4).unwrap();
        for config in [InterventionConfig::intervening(), InterventionConfig::observational()] {
            let t = simulate_run(&state, &sa, &sb, &config, 1000, 3).unwrap();
            let csv = t.to_csv();
            assert!(csv.starts_with("x,y,a_do,a,b,count\n"));
            let back = CountsTable::from_csv(&csv).unwrap();
            assert_eq!(back.counts(), t.counts());
            assert_eq!(back.is_intervening(), config.enabled);
        }
        assert!(CountsTable::from_csv("x,y,a,b,count\n").is_err());
        let empty = CountsTable::new(Scenario::CHSH, false, 0);
        assert_eq!(empty.to_csv().lines().nth(1), Some("0,0,-,0,0,0"));
    }

    #[test]
    fn relabelling_settings_keeps_ace() {
        let (sa, sb) = chsh_fixed_settings();
        let state = TwoQubitState::pure(0.5).unwrap();
        let t = simulate_run(&state, &sa, &sb, &InterventionConfig::intervening(), 48_000, 11).unwrap();
        let swapped = t.relabel_bob_settings(&[1, 0]).unwrap();
        assert_ne!(swapped, t);
        assert_eq!(ace_point(&swapped).unwrap(), ace_point(&t).unwrap());
        assert!(t.relabel_bob_settings(&[0, 0]).is_err());
    }

    #[test]
    fn observational_runs_define_behaviors() {
        let (sa, sb) = chsh_fixed_settings();
        let state = TwoQubitState::pure(FRAC_PI_4).unwrap();
        let t = simulate_run(&state, &sa, &sb, &InterventionConfig::observational(), 48_000, 1).unwrap();
        let b = t.behavior().unwrap();
        let exact = born_behavior(&state, &sa, &sb, &DetectorModel::PERFECT).unwrap();
        assert!(b.distance(&exact) < 0.03);
        assert!(ace_point(&t).is_err());
    }
}
