//! Joint outcome statistics under fixed measurements, guessing probability,
//! min-entropy, the closed forms for the tilted family on the maximally
//! entangled and Werner states, and the sweep generators behind the CLI.

use crate::error::{Error, Result};
use crate::families::{BellFamily, MeasurementSet};
use crate::matrix::tensor;
use crate::observable::Outcome;
use crate::sos::solve_family_measurements;
use crate::state::{expectation, TwoQubitState};
use crate::AGREEMENT_TOL;

/// `p(a, b | x, y)` for a, b in {+1, -1} over all setting pairs.
#[derive(Clone, Debug)]
pub struct JointProbabilityTable {
    alice_settings: usize,
    bob_settings: usize,
    /// Indexed by `((a_idx * 2 + b_idx) * n + x) * m + y` with Plus before Minus.
    entries: Vec<f64>,
}

impl JointProbabilityTable {
    fn index(&self, a: Outcome, b: Outcome, x: usize, y: usize) -> usize {
        let a_idx = (a == Outcome::Minus) as usize;
        let b_idx = (b == Outcome::Minus) as usize;
        ((a_idx * 2 + b_idx) * self.alice_settings + x) * self.bob_settings + y
    }

    pub fn prob(&self, a: Outcome, b: Outcome, x: usize, y: usize) -> f64 {
        self.entries[self.index(a, b, x, y)]
    }

    pub fn alice_settings(&self) -> usize {
        self.alice_settings
    }

    pub fn bob_settings(&self) -> usize {
        self.bob_settings
    }

    /// Normalization and no-signaling checks, both at 1e-10.
    pub fn validate(&self) -> Result<()> {
        const TOL: f64 = 1e-10;
        for x in 0..self.alice_settings {
            for y in 0..self.bob_settings {
                let total: f64 = Outcome::BOTH
                    .iter()
                    .flat_map(|a| Outcome::BOTH.iter().map(move |b| self.prob(*a, *b, x, y)))
                    .sum();
                if (total - 1.0).abs() > TOL {
                    return Err(Error::TableInvariant(format!(
                        "outcomes at settings ({x}, {y}) sum to {total}"
                    )));
                }
            }
        }
        // Alice's marginal must not depend on Bob's setting, and conversely.
        for x in 0..self.alice_settings {
            for a in Outcome::BOTH {
                let reference: f64 = Outcome::BOTH.iter().map(|b| self.prob(a, *b, x, 0)).sum();
                for y in 1..self.bob_settings {
                    let marginal: f64 = Outcome::BOTH.iter().map(|b| self.prob(a, *b, x, y)).sum();
                    if (marginal - reference).abs() > TOL {
                        return Err(Error::TableInvariant(format!(
                            "Alice marginal at (a = {}, x = {x}) varies with y",
                            a.value()
                        )));
                    }
                }
            }
        }
        for y in 0..self.bob_settings {
            for b in Outcome::BOTH {
                let reference: f64 = Outcome::BOTH.iter().map(|a| self.prob(*a, b, 0, y)).sum();
                for x in 1..self.alice_settings {
                    let marginal: f64 = Outcome::BOTH.iter().map(|a| self.prob(*a, b, x, y)).sum();
                    if (marginal - reference).abs() > TOL {
                        return Err(Error::TableInvariant(format!(
                            "Bob marginal at (b = {}, y = {y}) varies with x",
                            b.value()
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Compute the full table `p(a, b | x, y) = tr[rho (P^a_x o P^b_y)]`.
pub fn joint_probabilities(
    s: &TwoQubitState,
    ms: &MeasurementSet,
) -> Result<JointProbabilityTable> {
    let n = ms.alice().len();
    let m = ms.bob().len();
    let mut table = JointProbabilityTable {
        alice_settings: n,
        bob_settings: m,
        entries: vec![0.0; 4 * n * m],
    };
    for (x, alice) in ms.alice().iter().enumerate() {
        for (y, bob) in ms.bob().iter().enumerate() {
            for a in Outcome::BOTH {
                for b in Outcome::BOTH {
                    let op = tensor(&alice.projector(a), &bob.projector(b));
                    let p = expectation(&op, s)?;
                    if !(-1e-12..=1.0 + 1e-12).contains(&p) {
                        return Err(Error::TableInvariant(format!(
                            "probability {p} at (a = {}, b = {}, x = {x}, y = {y}) \
                             is outside [0, 1]",
                            a.value(),
                            b.value()
                        )));
                    }
                    let idx = table.index(a, b, x, y);
                    table.entries[idx] = p.clamp(0.0, 1.0);
                }
            }
        }
    }
    table.validate()?;
    Ok(table)
}

/// Location of the largest joint probability.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ArgMax {
    pub a: i8,
    pub b: i8,
    pub x: usize,
    pub y: usize,
}

/// Largest entry of the table and where it sits. Ties resolve to the
/// lexicographically smallest (x, y, a, b) with +1 ordered before -1.
pub fn guessing_probability(table: &JointProbabilityTable) -> (f64, ArgMax) {
    let mut best = f64::NEG_INFINITY;
    let mut arg = ArgMax {
        a: 1,
        b: 1,
        x: 0,
        y: 0,
    };
    for x in 0..table.alice_settings() {
        for y in 0..table.bob_settings() {
            for a in Outcome::BOTH {
                for b in Outcome::BOTH {
                    let p = table.prob(a, b, x, y);
                    if p > best {
                        best = p;
                        arg = ArgMax {
                            a: a.value(),
                            b: b.value(),
                            x,
                            y,
                        };
                    }
                }
            }
        }
    }
    (best, arg)
}

/// `-log2(p_max)` in bits, for `p_max` in (0, 1].
pub fn min_entropy(p_max: f64) -> Result<f64> {
    if !(p_max > 0.0 && p_max <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "guessing probability must lie in (0, 1], got {p_max}"
        )));
    }
    Ok(-p_max.log2())
}

/// Largest joint probability for the tilted family at its maximal violation
/// on the maximally entangled state: `(1 + cos u) / 4` with
/// `cos u = alpha / sqrt(alpha^2 + 1)`, for alpha >= 1.
pub fn tilted_pmax_closed_form(alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    Ok((1.0 + alpha / (alpha * alpha + 1.0).sqrt()) / 4.0)
}

/// Werner-state counterpart: `(1 + p cos u) / 4` for visibility p in [0, 1].
///
/// The closed form is defined on all of [0, 1]; below `lhv / quantum` the
/// statistics no longer violate the inequality, which sweeps flag per row.
pub fn werner_pmax_closed_form(alpha: f64, p: f64) -> Result<f64> {
    check_alpha(alpha)?;
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParameter(format!(
            "Werner visibility must lie in [0, 1], got {p}"
        )));
    }
    Ok((1.0 + p * alpha / (alpha * alpha + 1.0).sqrt()) / 4.0)
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !alpha.is_finite() || alpha < 1.0 {
        return Err(Error::InvalidParameter(format!(
            "tilted weight must satisfy alpha >= 1, got {alpha}"
        )));
    }
    Ok(())
}

/// Closed-form inputs recorded alongside a report: the tilted weight, the
/// rotation angle `u = arctan(1 / alpha)`, and the Werner visibility if one
/// was applied.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ClosedFormParams {
    pub alpha: f64,
    pub u: f64,
    pub p: Option<f64>,
}

/// Guessing probability, its location, and the implied min-entropy.
#[derive(Clone, Debug)]
pub struct RandomnessReport {
    pub p_max: f64,
    pub argmax: ArgMax,
    pub r_min_bits: f64,
    pub closed_form_params: Option<ClosedFormParams>,
}

/// Full pipeline for the tilted family: solve the optimal measurements on
/// `|phi+>`, evaluate them on `|phi+>` itself or on a Werner state, take the
/// table maximum, and cross-check it against the closed form to 1e-10.
///
/// The Werner state is built on the singlet while the measurements target
/// `|phi+>`; the joint probability table, which is what the guessing
/// probability reads, is used verbatim (the signed Bell value is negative in
/// that configuration, which callers report as an absolute value).
pub fn tilted_randomness_report(alpha: f64, werner_p: Option<f64>) -> Result<RandomnessReport> {
    let family = BellFamily::tilted(alpha)?;
    let solved = solve_family_measurements(&family)?;
    let state = match werner_p {
        None => TwoQubitState::maximally_entangled(),
        Some(p) => TwoQubitState::werner(p)?,
    };
    let table = joint_probabilities(&state, &solved.measurements)?;
    let (p_max, argmax) = guessing_probability(&table);
    let closed = match werner_p {
        None => tilted_pmax_closed_form(alpha)?,
        Some(p) => werner_pmax_closed_form(alpha, p)?,
    };
    if (p_max - closed).abs() > AGREEMENT_TOL {
        return Err(Error::VerificationMismatch {
            closed_form: closed,
            brute_force: p_max,
        });
    }
    Ok(RandomnessReport {
        p_max,
        argmax,
        r_min_bits: min_entropy(p_max)?,
        closed_form_params: Some(ClosedFormParams {
            alpha,
            u: (1.0 / alpha).atan(),
            p: werner_p,
        }),
    })
}

/// One grid point of a sweep. `verified` records agreement between the
/// closed form and the table maximum at 1e-10; `below_violation_threshold`
/// marks visibilities at which the statistics no longer beat the classical
/// bound (possible only in visibility sweeps).
#[derive(Clone, Copy, Debug)]
pub struct SweepRow {
    pub alpha: f64,
    pub p: f64,
    pub p_max: f64,
    pub r_min_bits: f64,
    pub verified: bool,
    pub below_violation_threshold: bool,
}

/// A computed sweep. `monotone` asserts the direction expected of the swept
/// variable: min-entropy strictly decreasing along alpha, guessing
/// probability strictly increasing along the visibility.
#[derive(Clone, Debug)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
    pub all_verified: bool,
    pub monotone: bool,
}

/// Sweep the tilted weight over an even grid on [from, to] at full visibility.
pub fn sweep_alpha(from: f64, to: f64, steps: usize) -> Result<SweepResult> {
    if !(from >= 1.0 && from < to) || !to.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "alpha sweep needs 1 <= from < to, got [{from}, {to}]"
        )));
    }
    if steps < 2 {
        return Err(Error::InvalidParameter(format!(
            "a sweep needs at least 2 steps, got {steps}"
        )));
    }
    let mut rows = Vec::with_capacity(steps);
    for i in 0..steps {
        let alpha = from + (to - from) * i as f64 / (steps - 1) as f64;
        let family = BellFamily::tilted(alpha)?;
        let solved = solve_family_measurements(&family)?;
        let table =
            joint_probabilities(&TwoQubitState::maximally_entangled(), &solved.measurements)?;
        let (brute, _) = guessing_probability(&table);
        let closed = tilted_pmax_closed_form(alpha)?;
        rows.push(SweepRow {
            alpha,
            p: 1.0,
            p_max: closed,
            r_min_bits: min_entropy(closed)?,
            verified: (brute - closed).abs() <= AGREEMENT_TOL,
            below_violation_threshold: false,
        });
    }
    let monotone = rows.windows(2).all(|w| w[1].r_min_bits < w[0].r_min_bits);
    Ok(SweepResult {
        all_verified: rows.iter().all(|r| r.verified),
        monotone,
        rows,
    })
}

/// Sweep the Werner visibility over an even grid on [from, to] at a fixed
/// tilted weight.
pub fn sweep_p(alpha: f64, from: f64, to: f64, steps: usize) -> Result<SweepResult> {
    check_alpha(alpha)?;
    if !(0.0..=1.0).contains(&from) || !(0.0..=1.0).contains(&to) || from >= to {
        return Err(Error::InvalidParameter(format!(
            "visibility sweep needs 0 <= from < to <= 1, got [{from}, {to}]"
        )));
    }
    if steps < 2 {
        return Err(Error::InvalidParameter(format!(
            "a sweep needs at least 2 steps, got {steps}"
        )));
    }
    let family = BellFamily::tilted(alpha)?;
    let solved = solve_family_measurements(&family)?;
    let violation_threshold = family.lhv_bound / family.quantum_bound;

    let mut rows = Vec::with_capacity(steps);
    for i in 0..steps {
        let p = from + (to - from) * i as f64 / (steps - 1) as f64;
        let table = joint_probabilities(&TwoQubitState::werner(p)?, &solved.measurements)?;
        let (brute, _) = guessing_probability(&table);
        let closed = werner_pmax_closed_form(alpha, p)?;
        rows.push(SweepRow {
            alpha,
            p,
            p_max: closed,
            r_min_bits: min_entropy(closed)?,
            verified: (brute - closed).abs() <= AGREEMENT_TOL,
            below_violation_threshold: p <= violation_threshold,
        });
    }
    let monotone = rows.windows(2).all(|w| w[1].p_max > w[0].p_max);
    Ok(SweepResult {
        all_verified: rows.iter().all(|r| r.verified),
        monotone,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::observable::DichotomicObservable;

    const PMAX_CHSH: f64 = 0.426_776_695_296_636_9; // (1 + 1/sqrt(2)) / 4

    fn zz_measurements() -> MeasurementSet {
        MeasurementSet::new(
            vec![DichotomicObservable::z()],
            vec![DichotomicObservable::z()],
        )
        .unwrap()
    }

    #[test]
    fn phi_plus_is_perfectly_correlated_in_z() {
        let table =
            joint_probabilities(&TwoQubitState::maximally_entangled(), &zz_measurements()).unwrap();
        assert!((table.prob(Outcome::Plus, Outcome::Plus, 0, 0) - 0.5).abs() <= 1e-12);
        assert!((table.prob(Outcome::Minus, Outcome::Minus, 0, 0) - 0.5).abs() <= 1e-12);
        assert!(table.prob(Outcome::Plus, Outcome::Minus, 0, 0) <= 1e-12);
        assert!(table.prob(Outcome::Minus, Outcome::Plus, 0, 0) <= 1e-12);
    }

    #[test]
    fn singlet_is_perfectly_anticorrelated_in_z() {
        let table = joint_probabilities(&TwoQubitState::singlet(), &zz_measurements()).unwrap();
        assert!((table.prob(Outcome::Plus, Outcome::Minus, 0, 0) - 0.5).abs() <= 1e-12);
        assert!((table.prob(Outcome::Minus, Outcome::Plus, 0, 0) - 0.5).abs() <= 1e-12);
        assert!(table.prob(Outcome::Plus, Outcome::Plus, 0, 0) <= 1e-12);
    }

    #[test]
    fn chsh_optimal_measurements_peak_at_the_known_maximum() {
        let solved = solve_family_measurements(&BellFamily::tilted(1.0).unwrap()).unwrap();
        let table =
            joint_probabilities(&TwoQubitState::maximally_entangled(), &solved.measurements)
                .unwrap();
        let (p_max, _) = guessing_probability(&table);
        assert!((p_max - PMAX_CHSH).abs() <= 1e-12);
    }

    #[test]
    fn uniform_table_ties_break_lexicographically() {
        let solved = solve_family_measurements(&BellFamily::tilted(1.0).unwrap()).unwrap();
        let table = joint_probabilities(&TwoQubitState::werner(0.0).unwrap(), &solved.measurements)
            .unwrap();
        let (p_max, arg) = guessing_probability(&table);
        assert!((p_max - 0.25).abs() <= 1e-12);
        assert_eq!(
            arg,
            ArgMax {
                a: 1,
                b: 1,
                x: 0,
                y: 0
            }
        );
    }

    #[test]
    fn min_entropy_reference_points() {
        assert_eq!(min_entropy(1.0).unwrap(), 0.0);
        assert!((min_entropy(0.5).unwrap() - 1.0).abs() <= 1e-12);
        let bits = min_entropy(PMAX_CHSH).unwrap();
        assert!((bits - 1.2284).abs() <= 5e-4);
        assert!(min_entropy(0.0).is_err());
        assert!(min_entropy(1.5).is_err());
    }

    #[test]
    fn tilted_closed_form_reference_points() {
        assert!((tilted_pmax_closed_form(1.0).unwrap() - PMAX_CHSH).abs() <= 1e-15);
        // Large weights approach the deterministic half.
        assert!((tilted_pmax_closed_form(1e6).unwrap() - 0.5).abs() <= 1e-12);
        assert!(tilted_pmax_closed_form(0.99).is_err());
    }

    #[test]
    fn tilted_closed_form_matches_the_table_at_sqrt_3() {
        let alpha = 3.0f64.sqrt();
        let solved = solve_family_measurements(&BellFamily::tilted(alpha).unwrap()).unwrap();
        let table =
            joint_probabilities(&TwoQubitState::maximally_entangled(), &solved.measurements)
                .unwrap();
        let (brute, _) = guessing_probability(&table);
        let closed = tilted_pmax_closed_form(alpha).unwrap();
        assert!((brute - closed).abs() <= 1e-12);
        assert!((closed - 0.466_506_350_946_109_65).abs() <= 1e-12);
    }

    #[test]
    fn werner_closed_form_reference_points() {
        assert!((werner_pmax_closed_form(1.0, 1.0).unwrap() - PMAX_CHSH).abs() <= 1e-15);
        assert!((werner_pmax_closed_form(1.0, 0.0).unwrap() - 0.25).abs() <= 1e-15);
        assert!(
            (werner_pmax_closed_form(1.0, 0.8).unwrap() - 0.391_421_356_237_309_5).abs() <= 1e-12
        );
        assert!(
            (werner_pmax_closed_form(1.0, 0.9).unwrap() - 0.409_099_025_766_973_2).abs() <= 1e-12
        );
        assert!(werner_pmax_closed_form(1.0, 1.2).is_err());
        assert!(werner_pmax_closed_form(0.5, 0.5).is_err());
    }

    #[test]
    fn werner_closed_form_matches_the_table() {
        let alpha = 1.0;
        let solved = solve_family_measurements(&BellFamily::tilted(alpha).unwrap()).unwrap();
        for p in [0.0, 0.3, 0.8, 0.9, 1.0] {
            let table =
                joint_probabilities(&TwoQubitState::werner(p).unwrap(), &solved.measurements)
                    .unwrap();
            let (brute, _) = guessing_probability(&table);
            let closed = werner_pmax_closed_form(alpha, p).unwrap();
            assert!((brute - closed).abs() <= 1e-12, "p = {p}");
        }
    }

    #[test]
    fn report_reproduces_the_chsh_min_entropy() {
        let report = tilted_randomness_report(1.0, None).unwrap();
        assert!((report.r_min_bits - 1.2284).abs() <= 5e-4);
        assert!((report.p_max - PMAX_CHSH).abs() <= 1e-10);
        let params = report.closed_form_params.unwrap();
        assert!((params.u - std::f64::consts::FRAC_PI_4).abs() <= 1e-12);
    }

    #[test]
    fn report_at_zero_visibility_is_two_bits() {
        let report = tilted_randomness_report(1.0, Some(0.0)).unwrap();
        assert!((report.r_min_bits - 2.0).abs() <= 1e-9);
    }

    #[test]
    fn argmax_sits_on_the_z_like_setting_above_alpha_one() {
        for alpha in [1.5, 2.0, 5.0] {
            let report = tilted_randomness_report(alpha, None).unwrap();
            assert_eq!(report.argmax.x, 0, "alpha = {alpha}");
            let werner = tilted_randomness_report(alpha, Some(0.9)).unwrap();
            assert_eq!(werner.argmax.x, 0, "alpha = {alpha} (Werner)");
        }
    }

    #[test]
    fn alpha_sweep_is_verified_and_strictly_decreasing() {
        let sweep = sweep_alpha(1.0, 10.0, 25).unwrap();
        assert!(sweep.all_verified);
        assert!(sweep.monotone);
        assert!((sweep.rows[0].r_min_bits - 1.2284).abs() <= 5e-4);
        assert!(sweep.rows.iter().all(|r| !r.below_violation_threshold));
    }

    #[test]
    fn alpha_sweep_flattens_toward_one_bit() {
        let sweep = sweep_alpha(1.0, 1e6, 3).unwrap();
        assert!(sweep.all_verified);
        let last = sweep.rows.last().unwrap();
        assert!(last.r_min_bits >= 1.0 && last.r_min_bits <= 1.0 + 1e-5);
    }

    #[test]
    fn visibility_sweep_is_verified_and_strictly_increasing() {
        let sweep = sweep_p(1.0, 0.7072, 1.0, 50).unwrap();
        assert!(sweep.all_verified);
        assert!(sweep.monotone);
        let last = sweep.rows.last().unwrap();
        assert!((last.p_max - PMAX_CHSH).abs() <= 1e-9);
        assert!(sweep.rows.iter().all(|r| !r.below_violation_threshold));
    }

    #[test]
    fn visibility_sweep_flags_rows_without_violation() {
        let sweep = sweep_p(1.0, 0.5, 1.0, 6).unwrap();
        let threshold = std::f64::consts::FRAC_1_SQRT_2;
        for row in &sweep.rows {
            assert_eq!(row.below_violation_threshold, row.p <= threshold);
        }
        // (1 + (1/sqrt(2)) / sqrt(2)) / 4 = 0.375 at the threshold itself.
        let at_threshold = werner_pmax_closed_form(1.0, threshold).unwrap();
        assert!((at_threshold - 0.375).abs() <= 1e-12);
    }

    #[test]
    fn sweep_ranges_are_validated() {
        assert!(sweep_alpha(2.0, 1.0, 10).is_err());
        assert!(sweep_alpha(0.5, 2.0, 10).is_err());
        assert!(sweep_alpha(1.0, 2.0, 1).is_err());
        assert!(sweep_p(1.0, 0.9, 0.7, 10).is_err());
        assert!(sweep_p(1.0, 0.0, 1.5, 10).is_err());
    }

    #[test]
    fn every_produced_table_passes_validation() {
        let solved = solve_family_measurements(&BellFamily::tilted(2.0).unwrap()).unwrap();
        for state in [
            TwoQubitState::maximally_entangled(),
            TwoQubitState::singlet(),
            TwoQubitState::werner(0.4).unwrap(),
            TwoQubitState::werner(1.0).unwrap(),
        ] {
            let table = joint_probabilities(&state, &solved.measurements).unwrap();
            table.validate().unwrap();
        }
    }
}
