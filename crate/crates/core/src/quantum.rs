//! Two-qubit polarization states, equatorial measurements and Born-rule
//! behaviors.
//!
//! Basis order is `{HH, HV, VH, VV}` with `H` the `+1` eigenstate of `Z`.
//! Alice measures `O_A(θ) = cos θ Z + sin θ X`; Bob's observable carries a
//! local bit flip, `O_B(θ) = -cos θ Z + sin θ X`, so that the pure-state
//! correlator reads `cos θ_A cos θ_B + sin 2γ sin θ_A sin θ_B`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::behavior::{Behavior, Scenario};
use crate::error::{Error, Result};

/// 2×2 complex operator on one qubit.
pub type Op2 = [[Complex64; 2]; 2];

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

pub(crate) fn identity2() -> Op2 {
    [[ONE, ZERO], [ZERO, ONE]]
}

/// Projector `(I + n·σ)/2` onto the `+1` eigenstate along the Bloch vector `n`.
pub fn bloch_projector(n: [f64; 3]) -> Op2 {
    let [nx, ny, nz] = n;
    [
        [Complex64::new((1.0 + nz) / 2.0, 0.0), Complex64::new(nx / 2.0, -ny / 2.0)],
        [Complex64::new(nx / 2.0, ny / 2.0), Complex64::new((1.0 - nz) / 2.0, 0.0)],
    ]
}

fn add2(a: &Op2, b: &Op2, wa: f64, wb: f64) -> Op2 {
    let mut out = [[ZERO; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][j] * wa + b[i][j] * wb;
        }
    }
    out
}

/// Trace of a single-qubit operator product `Tr[a b]`.
pub fn trace_product2(a: &Op2, b: &Op2) -> Complex64 {
    let mut t = ZERO;
    for i in 0..2 {
        for k in 0..2 {
            t += a[i][k] * b[k][i];
        }
    }
    t
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Party {
    Alice,
    Bob,
}

/// `cos γ |HV⟩ + sin γ |VH⟩` mixed with white noise at visibility `v`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TwoQubitState {
    gamma: f64,
    visibility: f64,
}

impl TwoQubitState {
    pub fn new(gamma: f64, visibility: f64) -> Result<Self> {
        if !gamma.is_finite() {
            return Err(Error::domain(format!("state angle {gamma} is not finite")));
        }
        if !(0.0..=1.0).contains(&visibility) {
            return Err(Error::domain(format!("visibility {visibility} outside [0,1]")));
        }
        Ok(TwoQubitState { gamma, visibility })
    }

    /// Noise-free state.
    pub fn pure(gamma: f64) -> Result<Self> {
        TwoQubitState::new(gamma, 1.0)
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn visibility(&self) -> f64 {
        self.visibility
    }

    /// Amplitudes of the pure component in `{HH, HV, VH, VV}` order.
    pub fn amplitudes(&self) -> [f64; 4] {
        [0.0, self.gamma.cos(), self.gamma.sin(), 0.0]
    }
}

/// A dichotomic measurement in the linear-polarization plane.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EquatorialSetting {
    pub theta: f64,
    pub party: Party,
}

impl EquatorialSetting {
    pub fn alice(theta: f64) -> Self {
        EquatorialSetting { theta, party: Party::Alice }
    }

    pub fn bob(theta: f64) -> Self {
        EquatorialSetting { theta, party: Party::Bob }
    }

    /// Bloch vector `(x, y, z)` of the `+1` outcome.
    pub fn bloch_vector(&self) -> [f64; 3] {
        let (s, c) = self.theta.sin_cos();
        match self.party {
            Party::Alice => [s, 0.0, c],
            Party::Bob => [s, 0.0, -c],
        }
    }

    /// Observable `n·σ` with eigenvalues `±1`.
    pub fn observable(&self) -> Op2 {
        let up = bloch_projector(self.bloch_vector());
        add2(&up, &identity2(), 2.0, -1.0)
    }
}

pub fn alice_settings(thetas: &[f64]) -> Vec<EquatorialSetting> {
    thetas.iter().map(|&t| EquatorialSetting::alice(t)).collect()
}

pub fn bob_settings(thetas: &[f64]) -> Vec<EquatorialSetting> {
    thetas.iter().map(|&t| EquatorialSetting::bob(t)).collect()
}

/// Detector efficiencies of the binned two-outcome POVM.
///
/// `M_↑ = η_↑ P_↑ + (1-η_↓) P_↓` and `M_↓ = η_↓ P_↓ + (1-η_↑) P_↑`. The same
/// model is applied to every setting of both parties.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DetectorModel {
    eta_up: f64,
    eta_down: f64,
}

impl Default for DetectorModel {
    fn default() -> Self {
        DetectorModel::PERFECT
    }
}

impl DetectorModel {
    pub const PERFECT: DetectorModel = DetectorModel { eta_up: 1.0, eta_down: 1.0 };

    pub fn new(eta_up: f64, eta_down: f64) -> Result<Self> {
        for (name, eta) in [("eta_up", eta_up), ("eta_down", eta_down)] {
            if !(0.0..=1.0).contains(&eta) {
                return Err(Error::domain(format!("{name} = {eta} outside [0,1]")));
            }
        }
        Ok(DetectorModel { eta_up, eta_down })
    }

    /// Non-clicks binned with the `↓` outcome: `η_↑ = η`, `η_↓ = 1`.
    pub fn binned(eta: f64) -> Result<Self> {
        DetectorModel::new(eta, 1.0)
    }

    pub fn eta_up(&self) -> f64 {
        self.eta_up
    }

    pub fn eta_down(&self) -> f64 {
        self.eta_down
    }

    /// POVM elements `[M_↑, M_↓]` for the direction of `setting`.
    pub fn povm(&self, setting: &EquatorialSetting) -> [Op2; 2] {
        let n = setting.bloch_vector();
        let up = bloch_projector(n);
        let down = bloch_projector([-n[0], -n[1], -n[2]]);
        [add2(&up, &down, self.eta_up, 1.0 - self.eta_down), add2(&down, &up, self.eta_down, 1.0 - self.eta_up)]
    }

    /// Coefficients `(c0, c1)` with `M_↑ = c0 I + c1 n·σ`.
    fn up_coefficients(&self) -> (f64, f64) {
        ((self.eta_up + 1.0 - self.eta_down) / 2.0, (self.eta_up + self.eta_down - 1.0) / 2.0)
    }
}

/// A 4×4 two-qubit density matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix(pub [[Complex64; 4]; 4]);

impl DensityMatrix {
    pub fn trace(&self) -> Complex64 {
        (0..4).map(|i| self.0[i][i]).sum()
    }

    /// `Tr[ρ (a ⊗ b)]`.
    pub fn expectation(&self, a: &Op2, b: &Op2) -> Complex64 {
        let mut t = ZERO;
        // (a⊗b)[i,j] with i = 2 i_a + i_b
        for i in 0..4 {
            for j in 0..4 {
                let k = a[j / 2][i / 2] * b[j % 2][i % 2];
                t += self.0[i][j] * k;
            }
        }
        t
    }

    /// Bob's unnormalized conditional operator `Tr_A[(op ⊗ I) ρ]`.
    pub fn condition_alice(&self, op: &Op2) -> Op2 {
        let mut out = [[ZERO; 2]; 2];
        for ib in 0..2 {
            for jb in 0..2 {
                let mut t = ZERO;
                for ia in 0..2 {
                    for ka in 0..2 {
                        t += op[ia][ka] * self.0[2 * ka + ib][2 * ia + jb];
                    }
                }
                out[ib][jb] = t;
            }
        }
        out
    }

    /// `⟨ψ|ρ|ψ⟩` for a (not necessarily normalized) vector.
    pub fn quadratic_form(&self, psi: &[Complex64; 4]) -> Complex64 {
        let mut t = ZERO;
        for i in 0..4 {
            for j in 0..4 {
                t += psi[i].conj() * self.0[i][j] * psi[j];
            }
        }
        t
    }
}

/// `ρ_γ(v) = v |Ψ_γ⟩⟨Ψ_γ| + (1 - v) I/4`.
pub fn density_matrix(state: &TwoQubitState) -> DensityMatrix {
    let amp = state.amplitudes();
    let v = state.visibility;
    let mut rho = [[ZERO; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            let mixed = if i == j { (1.0 - v) / 4.0 } else { 0.0 };
            rho[i][j] = Complex64::new(v * amp[i] * amp[j] + mixed, 0.0);
        }
    }
    DensityMatrix(rho)
}

/// Concurrence `|sin 2γ|` of the pure state.
pub fn concurrence(gamma: f64) -> f64 {
    (2.0 * gamma).sin().abs()
}

/// Local Bloch vectors and the correlation tensor of a two-qubit state.
///
/// All entries are Born-rule expectations of Pauli products taken from the
/// density matrix; any local two-outcome statistic follows from them linearly.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BlochStatistics {
    pub alice: [f64; 3],
    pub bob: [f64; 3],
    pub tensor: [[f64; 3]; 3],
}

impl BlochStatistics {
    pub fn from_density(rho: &DensityMatrix) -> Self {
        let paulis = pauli_matrices();
        let id = identity2();
        let mut alice = [0.0; 3];
        let mut bob = [0.0; 3];
        let mut tensor = [[0.0; 3]; 3];
        for j in 0..3 {
            alice[j] = rho.expectation(&paulis[j], &id).re;
            bob[j] = rho.expectation(&id, &paulis[j]).re;
            for k in 0..3 {
                tensor[j][k] = rho.expectation(&paulis[j], &paulis[k]).re;
            }
        }
        BlochStatistics { alice, bob, tensor }
    }

    pub fn from_state(state: &TwoQubitState) -> Self {
        BlochStatistics::from_density(&density_matrix(state))
    }

    /// `⟨n_A·σ ⊗ n_B·σ⟩`.
    pub fn correlation(&self, n_a: [f64; 3], n_b: [f64; 3]) -> f64 {
        let mut e = 0.0;
        for j in 0..3 {
            for k in 0..3 {
                e += n_a[j] * self.tensor[j][k] * n_b[k];
            }
        }
        e
    }

    /// Joint POVM probabilities `p(a,b)` for one setting pair; index `2a + b`.
    pub fn joint(&self, sa: &EquatorialSetting, sb: &EquatorialSetting, detector: &DetectorModel) -> [f64; 4] {
        let (c0, c1) = detector.up_coefficients();
        let na = sa.bloch_vector();
        let nb = sb.bloch_vector();
        let ra = dot(&na, &self.alice);
        let rb = dot(&nb, &self.bob);
        let e = self.correlation(na, nb);
        // M_↓ = (1 - c0) I - c1 n·σ
        let coef = |o: usize| if o == 0 { (c0, c1) } else { (1.0 - c0, -c1) };
        let mut out = [0.0; 4];
        for a in 0..2 {
            let (a0, a1) = coef(a);
            for b in 0..2 {
                let (b0, b1) = coef(b);
                out[2 * a + b] = a0 * b0 + a0 * b1 * rb + a1 * b0 * ra + a1 * b1 * e;
            }
        }
        out
    }

    /// Behavior over equatorial settings; equal to [`born_behavior`] but
    /// without rebuilding 4×4 operators per entry.
    pub fn behavior(
        &self,
        settings_a: &[EquatorialSetting],
        settings_b: &[EquatorialSetting],
        detector: &DetectorModel,
    ) -> Result<Behavior> {
        let scenario = check_settings(settings_a, settings_b)?;
        let mut table = vec![0.0; scenario.len()];
        for (x, sa) in settings_a.iter().enumerate() {
            for (y, sb) in settings_b.iter().enumerate() {
                let p = self.joint(sa, sb, detector);
                for a in 0..2 {
                    for b in 0..2 {
                        table[scenario.index(a, b, x, y)] = p[2 * a + b];
                    }
                }
            }
        }
        Behavior::new(scenario, table)
    }
}

fn dot(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// Pauli matrices `[X, Y, Z]`.
pub fn pauli_matrices() -> [Op2; 3] {
    let i = Complex64::new(0.0, 1.0);
    [[[ZERO, ONE], [ONE, ZERO]], [[ZERO, -i], [i, ZERO]], [[ONE, ZERO], [ZERO, -ONE]]]
}

fn check_settings(settings_a: &[EquatorialSetting], settings_b: &[EquatorialSetting]) -> Result<Scenario> {
    if settings_a.is_empty() || settings_b.is_empty() {
        return Err(Error::domain("setting lists must be non-empty"));
    }
    if settings_a.iter().any(|s| s.party != Party::Alice) || settings_b.iter().any(|s| s.party != Party::Bob) {
        return Err(Error::domain("setting list contains a setting for the wrong party"));
    }
    Scenario::new(settings_a.len(), settings_b.len(), 2, 2)
}

/// Correlator `⟨O_A(θ_A) ⊗ O_B(θ_B)⟩` for projective measurements.
pub fn correlation(state: &TwoQubitState, theta_a: f64, theta_b: f64) -> f64 {
    let stats = BlochStatistics::from_state(state);
    stats.correlation(EquatorialSetting::alice(theta_a).bloch_vector(), EquatorialSetting::bob(theta_b).bloch_vector())
}

/// Born-rule behavior `p(a,b|x,y) = Tr[ρ (M_a^x ⊗ M_b^y)]` with outcome `0 = ↑`.
pub fn born_behavior(
    state: &TwoQubitState,
    settings_a: &[EquatorialSetting],
    settings_b: &[EquatorialSetting],
    detector: &DetectorModel,
) -> Result<Behavior> {
    let scenario = check_settings(settings_a, settings_b)?;
    let rho = density_matrix(state);
    let povm_a: Vec<[Op2; 2]> = settings_a.iter().map(|s| detector.povm(s)).collect();
    let povm_b: Vec<[Op2; 2]> = settings_b.iter().map(|s| detector.povm(s)).collect();
    let mut table = vec![0.0; scenario.len()];
    for (x, ma) in povm_a.iter().enumerate() {
        for (y, mb) in povm_b.iter().enumerate() {
            for a in 0..2 {
                for b in 0..2 {
                    table[scenario.index(a, b, x, y)] = rho.expectation(&ma[a], &mb[b]).re;
                }
            }
        }
    }
    Behavior::new(scenario, table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, FRAC_PI_8, SQRT_2};

    #[test]
    fn maximally_entangled_projector() {
        let rho = density_matrix(&TwoQubitState::pure(FRAC_PI_4).unwrap());
        let h = 0.5;
        let expected = [[0.0, 0.0, 0.0, 0.0], [0.0, h, h, 0.0], [0.0, h, h, 0.0], [0.0, 0.0, 0.0, 0.0]];
        for i in 0..4 {
            for j in 0..4 {
                assert_abs_diff_eq!(rho.0[i][j].re, expected[i][j], epsilon = 1e-15);
                assert_eq!(rho.0[i][j].im, 0.0);
            }
        }
    }

    #[test]
    fn zero_visibility_is_white_noise() {
        let rho = density_matrix(&TwoQubitState::new(0.37, 0.0).unwrap());
        for i in 0..4 {
            for j in 0..4 {
                let want = if i == j { 0.25 } else { 0.0 };
                assert_eq!(rho.0[i][j].re, want);
            }
        }
    }

    #[test]
    fn visibility_out_of_range_is_domain_error() {
        assert!(matches!(TwoQubitState::new(0.1, 1.2), Err(Error::Domain(_))));
        assert!(matches!(TwoQubitState::new(0.1, -0.01), Err(Error::Domain(_))));
    }

    #[test]
    fn correlation_examples() {
        let bell = TwoQubitState::pure(FRAC_PI_4).unwrap();
        let product = TwoQubitState::pure(0.0).unwrap();
        assert_abs_diff_eq!(correlation(&bell, 0.0, 0.0), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(correlation(&product, FRAC_PI_2, FRAC_PI_2), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(correlation(&bell, FRAC_PI_2, FRAC_PI_2), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn concurrence_examples() {
        assert_abs_diff_eq!(concurrence(FRAC_PI_4), 1.0, epsilon = 1e-15);
        assert_eq!(concurrence(0.0), 0.0);
        assert_abs_diff_eq!(concurrence(FRAC_PI_8), SQRT_2 / 2.0, epsilon = 1e-15);
    }

    #[test]
    fn observables_are_dichotomic() {
        for &theta in &[0.0, 0.3, 1.9, -2.2] {
            for s in [EquatorialSetting::alice(theta), EquatorialSetting::bob(theta)] {
                let o = s.observable();
                // O² = I and Tr O = 0 give eigenvalues {+1, -1}
                let sq = trace_product2(&o, &o);
                assert_abs_diff_eq!(sq.re, 2.0, epsilon = 1e-14);
                assert_abs_diff_eq!((o[0][0] + o[1][1]).norm(), 0.0, epsilon = 1e-15);
                // no circular (Y) component
                assert_eq!(s.bloch_vector()[1], 0.0);
            }
        }
    }

    #[test]
    fn povm_completeness_on_grid() {
        let setting = EquatorialSetting::alice(0.7);
        for i in 0..=10 {
            for j in 0..=10 {
                let det = DetectorModel::new(i as f64 / 10.0, j as f64 / 10.0).unwrap();
                let [up, down] = det.povm(&setting);
                for r in 0..2 {
                    for c in 0..2 {
                        let want = if r == c { 1.0 } else { 0.0 };
                        assert_abs_diff_eq!((up[r][c] + down[r][c]).re, want, epsilon = 1e-15);
                        assert_abs_diff_eq!((up[r][c] + down[r][c]).im, 0.0, epsilon = 1e-15);
                    }
                }
                for m in [up, down] {
                    // 2x2 Hermitian PSD iff trace >= 0 and det >= 0
                    let tr = (m[0][0] + m[1][1]).re;
                    let det2 = (m[0][0] * m[1][1] - m[0][1] * m[1][0]).re;
                    assert!(tr >= -1e-15 && det2 >= -1e-15);
                }
            }
        }
    }

    #[test]
    fn dead_detector_puts_all_mass_on_down() {
        let state = TwoQubitState::new(0.4, 0.9).unwrap();
        let det = DetectorModel::new(0.0, 1.0).unwrap();
        let b = born_behavior(&state, &alice_settings(&[0.1, 1.0]), &bob_settings(&[0.5]), &det).unwrap();
        for x in 0..2 {
            assert_abs_diff_eq!(b.p(1, 1, x, 0), 1.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn wrong_party_or_empty_settings_rejected() {
        let state = TwoQubitState::pure(0.3).unwrap();
        let det = DetectorModel::PERFECT;
        assert!(born_behavior(&state, &[], &bob_settings(&[0.0]), &det).is_err());
        assert!(born_behavior(&state, &bob_settings(&[0.0]), &bob_settings(&[0.0]), &det).is_err());
    }

    #[test]
    fn bloch_path_matches_dense_born_rule() {
        let state = TwoQubitState::new(0.61, 0.83).unwrap();
        let det = DetectorModel::new(0.9, 0.95).unwrap();
        let sa = alice_settings(&[0.2, -1.3, 2.9]);
        let sb = bob_settings(&[1.1, 0.4]);
        let dense = born_behavior(&state, &sa, &sb, &det).unwrap();
        let fast = BlochStatistics::from_state(&state).behavior(&sa, &sb, &det).unwrap();
        assert!(dense.distance(&fast) < 1e-14);
    }

    #[test]
    fn condition_alice_with_identity_gives_reduced_state() {
        let rho = density_matrix(&TwoQubitState::pure(0.3).unwrap());
        let red = rho.condition_alice(&identity2());
        // Bob is V with probability cos²γ
        assert_abs_diff_eq!(red[1][1].re, 0.3f64.cos().powi(2), epsilon = 1e-15);
        assert_abs_diff_eq!(red[0][0].re, 0.3f64.sin().powi(2), epsilon = 1e-15);
    }
}
