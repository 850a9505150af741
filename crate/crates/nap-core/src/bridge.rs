//! Conversion between Popper tables and ranked probability models, in both
//! directions, with exhaustive agreement checking.
//!
//! From a Popper table, the van Fraassen recursion yields a rank and a
//! positive weight `C(b_i, a_rk(i))` per atom; the model with one outcome
//! per atom, those weights, and those ranks reproduces the table exactly:
//! for every event pair `(a, b)` with `b` nonempty, the standard part of
//! the exact conditional equals `C(a, b)`. On finitely many atoms the
//! agreement is exact equality of standard parts, not merely infinitesimal
//! closeness. The reverse direction takes standard parts of conditionals
//! and always yields a table passing the four axioms.
//!
//! The snapshot oracle replays the finite counting construction behind the
//! ranked measure and checks that classical ratio conditionals at growing
//! stages converge to the table's values. Conditionals among outcomes of
//! one shared rank agree exactly at every stage.
//!
//! Distinct models can share a Popper shadow (they differ by
//! infinitesimals), so converting a model to a table and back is not the
//! identity; the table-to-model-to-table round trip is.

use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::events::{Event, ModelError, NapModel, SampleSpace, SnapshotProfile};
use crate::field::{FieldValue, Rational};
use crate::popper::{PopperError, PopperTable};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum BridgeError {
    #[error(transparent)]
    Popper(#[from] PopperError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Builds the ranked model realizing a Popper table: one outcome per normal
/// atom, rank from the van Fraassen recursion, weight `C(b_i, a_rk(i))`.
pub fn popper_to_nap(t: &PopperTable) -> Result<NapModel, BridgeError> {
    let ranks = t.van_fraassen_ranks()?;
    let weights: Vec<Rational> = (0..t.atom_count())
        .map(|i| t.atom_conditional(i, ranks.chain[ranks.atom_rank[i]]).clone())
        .collect();
    let space = SampleSpace::new(t.atoms().to_vec())?;
    Ok(NapModel::new(
        space,
        weights,
        ranks.atom_rank.iter().map(|&r| r as u32).collect(),
    )?)
}

/// Shadows a model as a Popper table: `C(a, S)` is the standard part of the
/// exact conditional `P(a|S)`. The result always passes the four axioms.
pub fn nap_to_popper(model: &NapModel) -> PopperTable {
    PopperTable::from_fn(model.space().outcomes().to_vec(), |i, mask| {
        model
            .cond(Event::singleton(i), Event::from_mask(mask))
            .expect("condition mask is nonempty")
            .standard_part()
            .expect("conditionals are finite")
    })
    .expect("standard parts of conditionals lie in [0,1]")
}

/// Outcome of an exhaustive agreement sweep. `witnesses` is empty exactly
/// when `max_discrepancy` is zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BridgeReport {
    pub pairs_checked: u64,
    pub max_discrepancy: Rational,
    pub discrepancies: u64,
    /// Failing `(event, given)` pairs, up to a fixed cap.
    pub witnesses: Vec<(u64, u64)>,
}

impl BridgeReport {
    pub fn passed(&self) -> bool {
        self.discrepancies == 0
    }
}

const MAX_WITNESSES: usize = 32;

/// Exhaustively checks `st(P(a|b)) = C(a, b)` over all event pairs of the
/// model built from `t`.
pub fn verify_agreement(t: &PopperTable) -> Result<BridgeReport, BridgeError> {
    let model = popper_to_nap(t)?;
    let full = t.full_mask();
    let probs: Vec<FieldValue> = (0..=full)
        .map(|mask| model.prob(Event::from_mask(mask)))
        .collect();
    let mut report = BridgeReport {
        pairs_checked: 0,
        max_discrepancy: Rational::zero(),
        discrepancies: 0,
        witnesses: Vec::new(),
    };
    for b in 1..=full {
        for a in 0..=full {
            report.pairs_checked += 1;
            let cond = &probs[(a & b) as usize] / &probs[b as usize];
            let st = cond.standard_part().expect("conditional is finite");
            let expected = t.conditional(a, b);
            if st != expected {
                let gap = (st - expected).abs();
                if gap > report.max_discrepancy {
                    report.max_discrepancy = gap;
                }
                report.discrepancies += 1;
                if report.witnesses.len() < MAX_WITNESSES {
                    report.witnesses.push((a, b));
                }
            }
        }
    }
    Ok(report)
}

/// One evaluated cell of a snapshot study.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SnapshotRow {
    pub event: u64,
    pub given: u64,
    pub stage: u64,
    /// Classical conditional probability on the stage-`n` replication.
    pub value: Rational,
    /// The Popper value `C(event, given)` the snapshots converge to.
    pub expected: Rational,
    pub deviation: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SnapshotStudy {
    pub rows: Vec<SnapshotRow>,
    /// Largest observed `stage · deviation`; every deviation in the study
    /// is bounded by `bound_constant / stage`.
    pub bound_constant: Rational,
}

/// Evaluates the counting-measure snapshots of `t`'s model at each stage,
/// over every event pair. Row count is `4^m · stages`, so this is meant for
/// small tables; use [`snapshot_pair`] for a single query.
pub fn snapshot_oracle(t: &PopperTable, stages: &[u64]) -> Result<SnapshotStudy, BridgeError> {
    let model = popper_to_nap(t)?;
    let full = t.full_mask();
    let mut rows = Vec::new();
    for b in 1..=full {
        for a in 0..=full {
            let expected = t.conditional(a, b);
            rows.extend(snapshot_cells(&model, a, b, expected, stages)?);
        }
    }
    Ok(study_from_rows(rows))
}

/// Snapshot study for a single `(event, given)` pair of a table.
pub fn snapshot_pair(
    t: &PopperTable,
    event: u64,
    given: u64,
    stages: &[u64],
) -> Result<SnapshotStudy, BridgeError> {
    let model = popper_to_nap(t)?;
    let expected = t.conditional(event, given);
    let rows = snapshot_cells(&model, event, given, expected, stages)?;
    Ok(study_from_rows(rows))
}

/// Snapshot study directly on a model; deviations are against the standard
/// part of the exact conditional.
pub fn snapshot_model_pair(
    model: &NapModel,
    event: Event,
    given: Event,
    stages: &[u64],
) -> Result<SnapshotStudy, BridgeError> {
    let expected = model.cond(event, given)?.standard_part().expect("finite");
    let rows = snapshot_cells(model, event.mask(), given.mask(), expected, stages)?;
    Ok(study_from_rows(rows))
}

fn snapshot_cells(
    model: &NapModel,
    event: u64,
    given: u64,
    expected: Rational,
    stages: &[u64],
) -> Result<Vec<SnapshotRow>, BridgeError> {
    let profile = SnapshotProfile::for_model(model)?;
    let mut rows = Vec::with_capacity(stages.len());
    for &stage in stages {
        let value = model.snapshot_cond(
            Event::from_mask(event),
            Event::from_mask(given),
            &profile,
            stage,
        )?;
        let deviation = (&value - &expected).abs();
        rows.push(SnapshotRow {
            event,
            given,
            stage,
            value,
            expected: expected.clone(),
            deviation,
        });
    }
    Ok(rows)
}

fn study_from_rows(rows: Vec<SnapshotRow>) -> SnapshotStudy {
    let bound_constant = rows
        .iter()
        .map(|r| &r.deviation * Rational::from_integer(r.stage.into()))
        .max()
        .unwrap_or_else(Rational::zero);
    SnapshotStudy {
        rows,
        bound_constant,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{parse_value, rat};
    use crate::lexi::{valuation, Rank};
    use crate::popper::StratifiedMeasure;

    fn labels(names: &[&str]) -> Vec<String> {
        names.iter().map(|s| s.to_string()).collect()
    }

    /// Atoms {b1, b2}, rank(b1) = 0, rank(b2) = 1, weights 1.
    fn two_rank_table() -> PopperTable {
        let s = StratifiedMeasure::new(
            labels(&["b1", "b2"]),
            vec![vec![(0, rat(1, 1))], vec![(1, rat(1, 1))]],
        )
        .unwrap();
        PopperTable::from_stratified(&s)
    }

    #[test]
    fn two_rank_conversion() {
        let t = two_rank_table();
        let m = popper_to_nap(&t).unwrap();
        assert_eq!(m.rank(0), 0);
        assert_eq!(m.rank(1), 1);
        let b2 = Event::singleton(1);
        let full = m.space().full_event();
        let c = m.cond(b2, full).unwrap();
        assert_eq!(c, parse_value("e/(1 + e)").unwrap());
        assert_eq!(c.standard_part().unwrap(), rat(0, 1));
        assert_eq!(m.cond(b2, b2).unwrap(), FieldValue::one());
    }

    #[test]
    fn same_rank_agreement_is_exact_not_just_close() {
        // Within one rank the exact conditional is already rational.
        let s = StratifiedMeasure::new(
            labels(&["b1", "b2", "b3"]),
            vec![
                vec![(0, rat(1, 4)), (1, rat(3, 4))],
                vec![(2, rat(1, 1))],
            ],
        )
        .unwrap();
        let t = PopperTable::from_stratified(&s);
        let m = popper_to_nap(&t).unwrap();
        let b = Event::from_indices([0, 1]);
        let c = m.cond(Event::singleton(0), b).unwrap();
        assert_eq!(c, FieldValue::from_rational(rat(1, 4)));
        assert_eq!(t.conditional(0b001, 0b011), rat(1, 4));
    }

    #[test]
    fn classical_table_round_trips_as_uniform_measure() {
        let s = StratifiedMeasure::new(
            labels(&["x", "y"]),
            vec![vec![(0, rat(1, 2)), (1, rat(1, 2))]],
        )
        .unwrap();
        let t = PopperTable::from_stratified(&s);
        let m = popper_to_nap(&t).unwrap();
        assert_eq!(m.max_rank(), 0);
        assert_eq!(nap_to_popper(&m), t);
    }

    #[test]
    fn nap_to_popper_satisfies_axioms_and_axiom1() {
        let m = NapModel::new(
            SampleSpace::new(["a", "b", "c"]).unwrap(),
            vec![rat(1, 3), rat(5, 2), rat(1, 1)],
            vec![0, 1, 1],
        )
        .unwrap();
        let t = nap_to_popper(&m);
        assert!(t.check_axioms().unwrap().passed());
        // C(a, a) = 1 on all nonempty events.
        for mask in 1..=t.full_mask() {
            assert_eq!(t.conditional(mask, mask), rat(1, 1));
        }
        // Rank-1 outcomes are null given T but certain given themselves.
        assert_eq!(t.conditional(0b010, 0b111), rat(0, 1));
        assert_eq!(t.conditional(0b010, 0b010), rat(1, 1));
    }

    #[test]
    fn verify_agreement_reports_zero_discrepancy() {
        let t = two_rank_table();
        let report = verify_agreement(&t).unwrap();
        assert!(report.passed());
        assert_eq!(report.max_discrepancy, rat(0, 1));
        assert!(report.witnesses.is_empty());
        assert_eq!(report.pairs_checked, 3 * 4);
    }

    #[test]
    fn table_round_trip_is_identity() {
        let s = StratifiedMeasure::new(
            labels(&["a", "b", "c", "d"]),
            vec![
                vec![(0, rat(2, 7)), (2, rat(5, 7))],
                vec![(1, rat(1, 3)), (3, rat(2, 3))],
            ],
        )
        .unwrap();
        let t = PopperTable::from_stratified(&s);
        let rt = nap_to_popper(&popper_to_nap(&t).unwrap());
        assert_eq!(rt, t);
        // ... and the induced conditionals agree on every pair.
        for b in 1..=t.full_mask() {
            for a in 0..=t.full_mask() {
                assert_eq!(rt.conditional(a, b), t.conditional(a, b));
            }
        }
    }

    #[test]
    fn rank_preservation() {
        let s = StratifiedMeasure::new(
            labels(&["a", "b", "c"]),
            vec![
                vec![(1, rat(1, 1))],
                vec![(0, rat(1, 2)), (2, rat(1, 2))],
            ],
        )
        .unwrap();
        let t = PopperTable::from_stratified(&s);
        let ranks = t.van_fraassen_ranks().unwrap();
        let m = popper_to_nap(&t).unwrap();
        for i in 0..t.atom_count() {
            assert_eq!(m.rank(i) as usize, ranks.atom_rank[i]);
        }
    }

    #[test]
    fn distinct_models_can_share_a_popper_shadow() {
        let space = || SampleSpace::new(["a", "b"]).unwrap();
        let m1 = NapModel::new(space(), vec![rat(1, 1), rat(1, 1)], vec![0, 1]).unwrap();
        let m2 = NapModel::new(space(), vec![rat(1, 1), rat(2, 1)], vec![0, 1]).unwrap();
        assert_ne!(m1, m2);
        let b = Event::singleton(1);
        assert_ne!(m1.prob(b), m2.prob(b)); // they differ by an infinitesimal
        assert!((&m1.prob(b) - &m2.prob(b)).is_infinitesimal());
        assert_eq!(nap_to_popper(&m1), nap_to_popper(&m2));
    }

    #[test]
    fn snapshot_two_atom_closed_form() {
        // Deviation for (b2, T) at stage n is exactly 1/(n^2 + 1).
        let t = two_rank_table();
        let study = snapshot_pair(&t, 0b10, 0b11, &[2, 4, 8]).unwrap();
        let deviations: Vec<Rational> = study.rows.iter().map(|r| r.deviation.clone()).collect();
        assert_eq!(deviations, vec![rat(1, 5), rat(1, 17), rat(1, 65)]);
    }

    #[test]
    fn snapshot_same_rank_pairs_have_zero_deviation() {
        let s = StratifiedMeasure::new(
            labels(&["x", "y", "z"]),
            vec![
                vec![(0, rat(1, 3)), (1, rat(2, 3))],
                vec![(2, rat(1, 1))],
            ],
        )
        .unwrap();
        let t = PopperTable::from_stratified(&s);
        // {x} given {x, y}: both rank 0.
        let study = snapshot_pair(&t, 0b001, 0b011, &[2, 4, 8, 16]).unwrap();
        for row in &study.rows {
            assert_eq!(row.deviation, rat(0, 1), "stage {}", row.stage);
            assert_eq!(row.value, rat(1, 3));
        }
        assert_eq!(study.bound_constant, rat(0, 1));
    }

    #[test]
    fn snapshot_study_covers_all_pairs() {
        let t = two_rank_table();
        let study = snapshot_oracle(&t, &[2, 4]).unwrap();
        assert_eq!(study.rows.len(), 3 * 4 * 2);
        for row in &study.rows {
            let bound = &study.bound_constant / rat(row.stage as i64, 1);
            assert!(row.deviation <= bound);
        }
    }

    /// A table shaped like the classic two-point counterexample: the null
    /// outcome must sit at a strictly higher rank. A model putting both
    /// outcomes at one rank can never push a conditional on the pair below
    /// every positive rational: on a finite conditioning event of shared
    /// minimal rank, the conditional is a plain nonzero rational.
    #[test]
    fn two_point_null_conditional_needs_rank_structure() {
        // With rank structure: C({z}, {z, o}) = 0 is realized exactly.
        let s = StratifiedMeasure::new(
            labels(&["z", "o"]),
            vec![vec![(1, rat(1, 1))], vec![(0, rat(1, 1))]],
        )
        .unwrap();
        let t = PopperTable::from_stratified(&s);
        assert_eq!(t.conditional(0b01, 0b11), rat(0, 1));
        let m = popper_to_nap(&t).unwrap();
        let c = m.cond(Event::singleton(0), m.space().full_event()).unwrap();
        assert_eq!(c.standard_part().unwrap(), rat(0, 1));
        assert!(c.is_infinitesimal());

        // Without rank structure: same-rank two-point conditionals are
        // rank-0 (real and nonzero), so no such model reaches the table.
        for (wa, wb) in [(1, 1), (1, 7), (3, 2)] {
            let m = NapModel::new(
                SampleSpace::new(["z", "o"]).unwrap(),
                vec![rat(wa, 1), rat(wb, 1)],
                vec![0, 0],
            )
            .unwrap();
            let c = m
                .cond(Event::singleton(0), m.space().full_event())
                .unwrap();
            assert_eq!(valuation(&c), Rank::Int(0));
            assert!(!c.standard_part().unwrap().is_zero());
        }
    }
}
