//! Bipartite scenarios and conditional probability tables `p(a,b|x,y)`.
//!
//! A [`Behavior`] is the exchange format between every module: quantum
//! predictions, deterministic strategies, LP reconstructions and empirical
//! frequencies are all stored this way. The JSON wire form is
//!
//! ```json
//! {"m_x": 2, "m_y": 2, "o_a": 2, "o_b": 2, "p": [[[[0.5, 0.5], ...]]]}
//! ```
//!
//! with `p` nested in the index order `a, b, x, y`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest negative (or above-one) excursion that is silently clamped.
pub const CLAMP_TOL: f64 = 1e-9;
/// Per-`(x,y)` normalization tolerance accepted on construction.
pub const NORMALIZATION_TOL: f64 = 1e-9;

/// Setting and outcome counts for Alice (`m_x`, `o_a`) and Bob (`m_y`, `o_b`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Scenario {
    pub m_x: usize,
    pub m_y: usize,
    pub o_a: usize,
    pub o_b: usize,
}

impl Scenario {
    /// Two settings, two outcomes per party.
    pub const CHSH: Scenario = Scenario { m_x: 2, m_y: 2, o_a: 2, o_b: 2 };
    /// Three settings, two outcomes per party.
    pub const THREE_SETTING: Scenario = Scenario { m_x: 3, m_y: 3, o_a: 2, o_b: 2 };

    pub fn new(m_x: usize, m_y: usize, o_a: usize, o_b: usize) -> Result<Self> {
        if m_x == 0 || m_y == 0 || o_a == 0 || o_b == 0 {
            return Err(Error::domain(format!("scenario counts must be positive, got ({m_x},{m_y},{o_a},{o_b})")));
        }
        Ok(Scenario { m_x, m_y, o_a, o_b })
    }

    /// Number of table entries `o_a * o_b * m_x * m_y`.
    pub fn len(&self) -> usize {
        self.o_a * self.o_b * self.m_x * self.m_y
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Flat position of `(a, b, x, y)`; `y` varies fastest.
    #[inline]
    pub fn index(&self, a: usize, b: usize, x: usize, y: usize) -> usize {
        ((a * self.o_b + b) * self.m_x + x) * self.m_y + y
    }

    /// Scenario seen with the parties exchanged.
    pub fn swapped(&self) -> Scenario {
        Scenario { m_x: self.m_y, m_y: self.m_x, o_a: self.o_b, o_b: self.o_a }
    }

    pub(crate) fn expect(&self, expected: Scenario) -> Result<()> {
        if *self != expected {
            return Err(Error::Scenario { expected: expected.to_string(), actual: self.to_string() });
        }
        Ok(())
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{},{})", self.m_x, self.m_y, self.o_a, self.o_b)
    }
}

impl std::str::FromStr for Scenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<usize> = s
            .split(',')
            .map(|t| t.trim().parse::<usize>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::Parse(format!("scenario `{s}`: {e}")))?;
        match parts.as_slice() {
            [m_x, m_y, o_a, o_b] => Scenario::new(*m_x, *m_y, *o_a, *o_b),
            _ => Err(Error::Parse(format!("scenario `{s}` must have four comma-separated counts"))),
        }
    }
}

/// A normalized conditional probability table `p(a,b|x,y)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Behavior {
    scenario: Scenario,
    table: Vec<f64>,
}

impl Behavior {
    /// Builds a behavior from a flat table in [`Scenario::index`] order.
    ///
    /// Entries within [`CLAMP_TOL`] of `[0, 1]` are clamped; anything further
    /// out, or a setting pair whose row does not sum to one, is rejected.
    pub fn new(scenario: Scenario, mut table: Vec<f64>) -> Result<Self> {
        if table.len() != scenario.len() {
            return Err(Error::domain(format!(
                "table has {} entries, scenario {scenario} needs {}",
                table.len(),
                scenario.len()
            )));
        }
        for (i, p) in table.iter_mut().enumerate() {
            if !p.is_finite() || *p < -CLAMP_TOL || *p > 1.0 + CLAMP_TOL {
                return Err(Error::domain(format!("probability entry {i} = {p} outside [0,1]")));
            }
            *p = p.clamp(0.0, 1.0);
        }
        let behavior = Behavior { scenario, table };
        for x in 0..scenario.m_x {
            for y in 0..scenario.m_y {
                let total = behavior.setting_total(x, y);
                if (total - 1.0).abs() > NORMALIZATION_TOL {
                    return Err(Error::domain(format!("p(.,.|x={x},y={y}) sums to {total}, not 1")));
                }
            }
        }
        Ok(behavior)
    }

    /// Builds a behavior by evaluating `f(a, b, x, y)` on every entry.
    pub fn from_fn(scenario: Scenario, mut f: impl FnMut(usize, usize, usize, usize) -> f64) -> Result<Self> {
        let mut table = vec![0.0; scenario.len()];
        for a in 0..scenario.o_a {
            for b in 0..scenario.o_b {
                for x in 0..scenario.m_x {
                    for y in 0..scenario.m_y {
                        table[scenario.index(a, b, x, y)] = f(a, b, x, y);
                    }
                }
            }
        }
        Behavior::new(scenario, table)
    }

    /// Relative frequencies `n(a,b,x,y) / n(x,y)`.
    pub fn from_counts(scenario: Scenario, counts: &[u64]) -> Result<Self> {
        if counts.len() != scenario.len() {
            return Err(Error::domain("count table does not match scenario"));
        }
        let mut totals = vec![0u64; scenario.m_x * scenario.m_y];
        for a in 0..scenario.o_a {
            for b in 0..scenario.o_b {
                for x in 0..scenario.m_x {
                    for y in 0..scenario.m_y {
                        totals[x * scenario.m_y + y] += counts[scenario.index(a, b, x, y)];
                    }
                }
            }
        }
        if let Some(pos) = totals.iter().position(|&t| t == 0) {
            return Err(Error::Estimation(format!(
                "no counts for setting pair x={}, y={}",
                pos / scenario.m_y,
                pos % scenario.m_y
            )));
        }
        Behavior::from_fn(scenario, |a, b, x, y| {
            counts[scenario.index(a, b, x, y)] as f64 / totals[x * scenario.m_y + y] as f64
        })
    }

    pub fn scenario(&self) -> Scenario {
        self.scenario
    }

    /// Flat table in [`Scenario::index`] order.
    pub fn as_slice(&self) -> &[f64] {
        &self.table
    }

    #[inline]
    pub fn p(&self, a: usize, b: usize, x: usize, y: usize) -> f64 {
        self.table[self.scenario.index(a, b, x, y)]
    }

    fn setting_total(&self, x: usize, y: usize) -> f64 {
        let s = self.scenario;
        let mut total = 0.0;
        for a in 0..s.o_a {
            for b in 0..s.o_b {
                total += self.p(a, b, x, y);
            }
        }
        total
    }

    /// Alice's marginal `p(a|x,y)`.
    pub fn marginal_a(&self, a: usize, x: usize, y: usize) -> f64 {
        (0..self.scenario.o_b).map(|b| self.p(a, b, x, y)).sum()
    }

    /// Bob's marginal `p(b|x,y)`.
    pub fn marginal_b(&self, b: usize, x: usize, y: usize) -> f64 {
        (0..self.scenario.o_a).map(|a| self.p(a, b, x, y)).sum()
    }

    /// Correlator `sum (-1)^(a+b) p(a,b|x,y)`, with outcome parity taken on the
    /// outcome index.
    pub fn correlator(&self, x: usize, y: usize) -> f64 {
        let s = self.scenario;
        let mut e = 0.0;
        for a in 0..s.o_a {
            for b in 0..s.o_b {
                let sign = if (a + b) % 2 == 0 { 1.0 } else { -1.0 };
                e += sign * self.p(a, b, x, y);
            }
        }
        e
    }

    /// Largest change of Alice's marginal under a change of Bob's setting.
    pub fn signalling_to_alice(&self) -> f64 {
        let s = self.scenario;
        let mut worst: f64 = 0.0;
        for a in 0..s.o_a {
            for x in 0..s.m_x {
                let first = self.marginal_a(a, x, 0);
                for y in 1..s.m_y {
                    worst = worst.max((self.marginal_a(a, x, y) - first).abs());
                }
            }
        }
        worst
    }

    /// Largest change of Bob's marginal under a change of Alice's setting.
    pub fn signalling_to_bob(&self) -> f64 {
        let s = self.scenario;
        let mut worst: f64 = 0.0;
        for b in 0..s.o_b {
            for y in 0..s.m_y {
                let first = self.marginal_b(b, 0, y);
                for x in 1..s.m_x {
                    worst = worst.max((self.marginal_b(b, x, y) - first).abs());
                }
            }
        }
        worst
    }

    /// Applies a relabelling: the new behavior satisfies
    /// `p'(a,b|x,y) = p(f(a,b,x,y))`. The map must be a bijection on the index
    /// space of the same scenario.
    pub fn relabel(&self, f: impl Fn(usize, usize, usize, usize) -> (usize, usize, usize, usize)) -> Result<Self> {
        let s = self.scenario;
        Behavior::from_fn(s, |a, b, x, y| {
            let (a2, b2, x2, y2) = f(a, b, x, y);
            self.p(a2, b2, x2, y2)
        })
    }

    /// The same statistics with Alice and Bob exchanged.
    pub fn swap_parties(&self) -> Behavior {
        let s = self.scenario.swapped();
        let mut table = vec![0.0; s.len()];
        for a in 0..s.o_a {
            for b in 0..s.o_b {
                for x in 0..s.m_x {
                    for y in 0..s.m_y {
                        table[s.index(a, b, x, y)] = self.p(b, a, y, x);
                    }
                }
            }
        }
        Behavior { scenario: s, table }
    }

    /// Convex combination `sum w_i B_i` of behaviors sharing one scenario.
    pub fn mixture(parts: &[(f64, &Behavior)]) -> Result<Self> {
        let first = parts.first().ok_or_else(|| Error::domain("empty mixture"))?.1;
        let scenario = first.scenario;
        let mut table = vec![0.0; scenario.len()];
        for (w, b) in parts {
            if b.scenario != scenario {
                return Err(Error::Scenario { expected: scenario.to_string(), actual: b.scenario.to_string() });
            }
            for (t, p) in table.iter_mut().zip(&b.table) {
                *t += w * p;
            }
        }
        Behavior::new(scenario, table)
    }

    /// Max-norm distance between two behaviors of the same scenario.
    pub fn distance(&self, other: &Behavior) -> f64 {
        self.table.iter().zip(&other.table).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&BehaviorWire::from(self))?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let wire: BehaviorWire = serde_json::from_str(text)?;
        wire.try_into()
    }
}

/// Serialized layout of a [`Behavior`].
#[derive(Serialize, Deserialize)]
pub struct BehaviorWire {
    pub m_x: usize,
    pub m_y: usize,
    pub o_a: usize,
    pub o_b: usize,
    pub p: Vec<Vec<Vec<Vec<f64>>>>,
}

impl From<&Behavior> for BehaviorWire {
    fn from(b: &Behavior) -> Self {
        let s = b.scenario;
        let p = (0..s.o_a)
            .map(|a| {
                (0..s.o_b)
                    .map(|bb| (0..s.m_x).map(|x| (0..s.m_y).map(|y| b.p(a, bb, x, y)).collect()).collect())
                    .collect()
            })
            .collect();
        BehaviorWire { m_x: s.m_x, m_y: s.m_y, o_a: s.o_a, o_b: s.o_b, p }
    }
}

impl TryFrom<BehaviorWire> for Behavior {
    type Error = Error;

    fn try_from(w: BehaviorWire) -> Result<Self> {
        let s = Scenario::new(w.m_x, w.m_y, w.o_a, w.o_b)?;
        let shape_ok = w.p.len() == s.o_a
            && w.p.iter().all(|pb| {
                pb.len() == s.o_b && pb.iter().all(|px| px.len() == s.m_x && px.iter().all(|py| py.len() == s.m_y))
            });
        if !shape_ok {
            return Err(Error::Parse(format!("`p` array shape does not match scenario {s}")));
        }
        Behavior::from_fn(s, |a, b, x, y| w.p[a][b][x][y])
    }
}

impl Serialize for Behavior {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        BehaviorWire::from(self).serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Behavior {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let wire = BehaviorWire::deserialize(deserializer)?;
        Behavior::try_from(wire).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn uniform(s: Scenario) -> Behavior {
        let w = 1.0 / (s.o_a * s.o_b) as f64;
        Behavior::from_fn(s, |_, _, _, _| w).unwrap()
    }

    #[test]
    fn scenario_rejects_zero_counts() {
        assert!(Scenario::new(0, 2, 2, 2).is_err());
        assert!("2,2,2".parse::<Scenario>().is_err());
        assert_eq!("3, 3, 2, 2".parse::<Scenario>().unwrap(), Scenario::THREE_SETTING);
    }

    #[test]
    fn small_negative_entries_are_clamped() {
        let s = Scenario::new(1, 1, 2, 1).unwrap();
        let b = Behavior::new(s, vec![1.0 + 5e-13, -5e-13]).unwrap();
        assert_eq!(b.as_slice(), &[1.0, 0.0]);
    }

    #[test]
    fn large_excursions_are_errors() {
        let s = Scenario::new(1, 1, 2, 1).unwrap();
        assert!(Behavior::new(s, vec![1.1, -0.1]).is_err());
        assert!(Behavior::new(s, vec![0.6, 0.6]).is_err());
        assert!(Behavior::new(s, vec![f64::NAN, 1.0]).is_err());
    }

    #[test]
    fn json_layout_is_a_b_x_y() {
        let s = Scenario::new(1, 2, 2, 1).unwrap();
        let b = Behavior::from_fn(s, |a, _, _, y| if a == y { 1.0 } else { 0.0 }).unwrap();
        let json = b.to_json().unwrap();
        assert_eq!(json, r#"{"m_x":1,"m_y":2,"o_a":2,"o_b":1,"p":[[[[1.0,0.0]]],[[[0.0,1.0]]]]}"#);
        assert_eq!(Behavior::from_json(&json).unwrap(), b);
    }

    #[test]
    fn json_shape_mismatch_is_rejected() {
        let bad = r#"{"m_x":2,"m_y":2,"o_a":2,"o_b":2,"p":[[[[1.0]]]]}"#;
        assert!(matches!(Behavior::from_json(bad), Err(Error::Parse(_))));
    }

    #[test]
    fn counts_with_empty_setting_pair_fail() {
        let s = Scenario::CHSH;
        let mut counts = vec![1u64; s.len()];
        for a in 0..2 {
            for b in 0..2 {
                counts[s.index(a, b, 1, 0)] = 0;
            }
        }
        let err = Behavior::from_counts(s, &counts).unwrap_err();
        assert!(err.to_string().contains("x=1, y=0"));
    }

    #[test]
    fn swap_parties_is_an_involution() {
        let s = Scenario::new(3, 2, 2, 2).unwrap();
        let b = Behavior::from_fn(s, |a, bb, x, y| match (a, bb) {
            (0, 0) => 0.1 * (x + 1) as f64,
            (1, 1) => 0.05 * (y + 1) as f64,
            (0, 1) => 0.2,
            _ => 0.8 - 0.1 * (x + 1) as f64 - 0.05 * (y + 1) as f64,
        })
        .unwrap();
        assert_eq!(b.swap_parties().scenario(), s.swapped());
        assert_eq!(b.swap_parties().swap_parties(), b);
        assert_eq!(uniform(s).signalling_to_alice(), 0.0);
    }
}
