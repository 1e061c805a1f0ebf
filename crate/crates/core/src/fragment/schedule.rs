use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::prob::{ceil_tolerant, Probability};

/// Smallest `L` covered by the counting argument.
pub const THEOREM_MIN_L: f64 = 1024.0;

/// Per-round parameters of the process.
///
/// Round `i` (1-based) shrinks the edge bound from `ell_i[i-1]` to
/// `ell_i[i] = 0.9^i ℓ`, draws `w_i[i-1]` fresh elements and judges its cover
/// against `l_i[i-1]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScheduleParams {
    #[serde(rename = "L")]
    pub big_l: f64,
    pub ell: usize,
    pub p: Probability,
    pub n: usize,
    /// Out-of-theorem parameters were allowed (`L < 1024` or `ℓ < 2`).
    pub exploratory: bool,
    /// `⌊log_0.9(1/ℓ)⌋ + 1`, the number of rounds.
    pub gamma: usize,
    /// `0.9^i ℓ` for `i = 0..=γ`.
    pub ell_i: Vec<f64>,
    /// `L_i` for rounds `1..=γ`.
    pub l_i: Vec<f64>,
    /// `w_i = ⌈L_i p n⌉` for rounds `1..=γ`.
    pub w_i: Vec<usize>,
    pub total_draw: usize,
    /// `C` with `Σ w_i = C L p log₂(ℓ) n`; undefined for `ℓ = 1`.
    pub implied_c: Option<f64>,
}

impl ScheduleParams {
    /// `ℓ_{i-1}` scaled by 0.9: the good-set threshold of round `i`.
    pub fn threshold(&self, round: usize) -> f64 {
        0.9 * self.ell_i[round - 1]
    }

    /// `log_0.9(1/ℓ)`.
    pub fn rounds_exponent(&self) -> f64 {
        log_09_inv(self.ell)
    }

    pub fn in_theorem_regime(&self) -> bool {
        self.big_l >= THEOREM_MIN_L && self.ell >= 2
    }
}

fn log_09_inv(ell: usize) -> f64 {
    (ell as f64).ln() / (10.0f64 / 9.0).ln()
}

/// `γ = ⌊log_0.9(1/ℓ)⌋ + 1`, corrected for rounding so that `0 < 0.9^γ ℓ < 1`.
fn gamma_for(ell: usize) -> usize {
    let ell_f = ell as f64;
    let mut gamma = log_09_inv(ell).floor() as usize + 1;
    while 0.9f64.powi(gamma as i32) * ell_f >= 1.0 {
        gamma += 1;
    }
    while gamma > 1 && 0.9f64.powi(gamma as i32 - 1) * ell_f < 1.0 {
        gamma -= 1;
    }
    gamma
}

/// Builds the round schedule for an `ℓ`-bounded hypergraph on `n` elements.
///
/// Without `exploratory`, `L ≥ 1024` and `ℓ ≥ 2` are enforced.
pub fn build_schedule(big_l: f64, ell: usize, p: Probability, n: usize, exploratory: bool) -> Result<ScheduleParams> {
    if ell == 0 || (ell < 2 && !exploratory) {
        return Err(Error::BadEll(ell));
    }
    if !(big_l.is_finite() && big_l >= 1.0) || (big_l < THEOREM_MIN_L && !exploratory) {
        return Err(Error::BadParameter(format!(
            "L = {big_l} must be at least {THEOREM_MIN_L} outside exploratory mode (and at least 1)"
        )));
    }
    if !(p.get() > 0.0 && p.get() < 1.0) {
        return Err(Error::BadParameter(format!("p = {p} must lie strictly between 0 and 1")));
    }
    if n == 0 {
        return Err(Error::EmptyGround);
    }

    let gamma = gamma_for(ell);
    let ell_i: Vec<f64> = (0..=gamma).map(|i| 0.9f64.powi(i as i32) * ell as f64).collect();
    let boundary = gamma as f64 - log_09_inv(ell).sqrt();
    let late_l = big_l * (ell as f64).log2().sqrt();
    let l_i: Vec<f64> = (1..=gamma)
        .map(|i| if (i as f64) < boundary { big_l } else { late_l })
        .collect();
    let w_i: Vec<usize> = l_i
        .iter()
        .map(|&li| ceil_tolerant(li * p.get() * n as f64) as usize)
        .collect();
    let total_draw: usize = w_i.iter().sum();
    if total_draw > n {
        return Err(Error::InsufficientGround { needed: total_draw, n });
    }
    let scale = big_l * p.get() * (ell as f64).log2() * n as f64;
    let implied_c = (ell >= 2).then(|| total_draw as f64 / scale);
    Ok(ScheduleParams {
        big_l,
        ell,
        p,
        n,
        exploratory,
        gamma,
        ell_i,
        l_i,
        w_i,
        total_draw,
        implied_c,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(x: f64) -> Probability {
        Probability::new(x).unwrap()
    }

    #[test]
    fn gamma_examples() {
        // log_0.9(1/2) = ln 2 / ln(10/9) = 6.578...
        let s = build_schedule(1024.0, 2, p(1e-9), 63, false).unwrap();
        assert_eq!(s.gamma, 7);
        // log_0.9(1/10) = 21.85...
        let s = build_schedule(1024.0, 10, p(1e-9), 63, false).unwrap();
        assert_eq!(s.gamma, 22);
        assert!((s.ell_i[22] - 0.9f64.powi(22) * 10.0).abs() < 1e-12);
        assert!(s.ell_i[22] > 0.98 && s.ell_i[22] < 1.0);
    }

    #[test]
    fn insufficient_ground() {
        // w_1 alone is 1024 * 0.5 * 10 = 5120
        match build_schedule(1024.0, 4, p(0.5), 10, false) {
            Err(Error::InsufficientGround { needed, n: 10 }) => assert!(needed > 5120),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn parameter_checks() {
        assert_eq!(build_schedule(1024.0, 1, p(0.01), 10, false), Err(Error::BadEll(1)));
        assert_eq!(build_schedule(4.0, 0, p(0.01), 10, true), Err(Error::BadEll(0)));
        assert!(build_schedule(4.0, 1, p(0.001), 10, true).is_ok());
        assert!(matches!(build_schedule(4.0, 2, p(0.01), 10, false), Err(Error::BadParameter(_))));
        assert!(matches!(build_schedule(1024.0, 2, p(0.0), 10, false), Err(Error::BadParameter(_))));
    }

    #[test]
    fn late_rounds_use_boosted_l() {
        // ℓ = 100: γ = 44, boundary = 44 - sqrt(43.7...) = 37.38...
        let s = build_schedule(2.0, 100, p(1e-6), 63, true).unwrap();
        assert_eq!(s.gamma, 44);
        let boosted = 2.0 * 100f64.log2().sqrt();
        for (k, &li) in s.l_i.iter().enumerate() {
            let i = k + 1;
            let expect = if i <= 37 { 2.0 } else { boosted };
            assert_eq!(li, expect, "round {i}");
        }
        assert_eq!(s.w_i.len(), 44);
        assert_eq!(s.total_draw, 44);
        assert!(s.implied_c.unwrap() > 0.0);
    }

    #[test]
    fn ell_one_has_single_round() {
        let s = build_schedule(4.0, 1, p(0.01), 10, true).unwrap();
        assert_eq!(s.gamma, 1);
        assert_eq!(s.l_i, vec![0.0]);
        assert_eq!(s.w_i, vec![0]);
        assert_eq!(s.implied_c, None);
    }
}
