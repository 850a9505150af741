//! Finite sample spaces and weighted, ranked probability models.
//!
//! A model assigns every outcome a strictly positive rational weight and a
//! nonnegative integer rank; the induced measure gives the outcome the mass
//! `w·e^rank`, so higher ranks are more infinitesimal. Probabilities are
//! exact values of Q(e): the measure is normalized, finitely additive, and
//! regular (every nonempty event has strictly positive probability).
//!
//! The snapshot evaluator replays the same conditional probabilities as
//! classical ratios on finite replications of the space: at stage `n`, an
//! outcome of rank `k` is counted `n^(3^(max_rank - k))` times. That
//! schedule makes lower ranks dominate quadratically (the count of a rank
//! strictly exceeds the square of any higher rank's count for `n >= 2`),
//! and the resulting rational conditionals converge to the standard part of
//! the exact conditional as the stage grows.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::field::{EpsPoly, FieldValue, Rational};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("sample space must be nonempty")]
    EmptySpace,
    #[error("duplicate outcome label '{0}'")]
    DuplicateOutcome(String),
    #[error("sample space has {0} outcomes; at most 64 are supported")]
    TooManyOutcomes(usize),
    #[error("unknown outcome label '{0}'")]
    UnknownOutcome(String),
    #[error("expected {expected} entries, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("outcome '{0}' has non-positive weight")]
    NonPositiveWeight(String),
    #[error("conditioning event is empty")]
    EmptyCondition,
    #[error("snapshot stage must be at least 2, got {0}")]
    InvalidStage(u64),
    #[error("invalid partition: {0}")]
    InvalidPartition(String),
    #[error("maximum rank {0} exceeds the supported snapshot limit of {max}", max = SnapshotProfile::MAX_RANK_LIMIT)]
    RankTooLarge(u32),
}

/// An ordered finite set of distinct outcome labels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SampleSpace {
    outcomes: Vec<String>,
    index: HashMap<String, usize>,
}

impl SampleSpace {
    pub fn new<I, S>(outcomes: I) -> Result<Self, ModelError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let outcomes: Vec<String> = outcomes.into_iter().map(Into::into).collect();
        if outcomes.is_empty() {
            return Err(ModelError::EmptySpace);
        }
        if outcomes.len() > 64 {
            return Err(ModelError::TooManyOutcomes(outcomes.len()));
        }
        let mut index = HashMap::new();
        for (i, label) in outcomes.iter().enumerate() {
            if index.insert(label.clone(), i).is_some() {
                return Err(ModelError::DuplicateOutcome(label.clone()));
            }
        }
        Ok(SampleSpace { outcomes, index })
    }

    pub fn len(&self) -> usize {
        self.outcomes.len()
    }

    pub fn is_empty(&self) -> bool {
        false // construction rejects empty spaces
    }

    pub fn outcomes(&self) -> &[String] {
        &self.outcomes
    }

    pub fn label(&self, i: usize) -> &str {
        &self.outcomes[i]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.index.get(label).copied()
    }

    pub fn full_event(&self) -> Event {
        Event::all(self.len())
    }
}

/// A subset of a sample space's outcomes, as a bitmask over outcome indices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Event {
    mask: u64,
}

impl Event {
    pub const EMPTY: Event = Event { mask: 0 };

    pub fn from_mask(mask: u64) -> Self {
        Event { mask }
    }

    pub fn all(n: usize) -> Self {
        debug_assert!(n <= 64);
        if n == 64 {
            Event { mask: u64::MAX }
        } else {
            Event { mask: (1u64 << n) - 1 }
        }
    }

    pub fn singleton(i: usize) -> Self {
        Event { mask: 1u64 << i }
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(indices: I) -> Self {
        let mut mask = 0u64;
        for i in indices {
            mask |= 1u64 << i;
        }
        Event { mask }
    }

    pub fn from_labels<'a, I>(space: &SampleSpace, labels: I) -> Result<Self, ModelError>
    where
        I: IntoIterator<Item = &'a str>,
    {
        let mut mask = 0u64;
        for label in labels {
            let i = space
                .index_of(label)
                .ok_or_else(|| ModelError::UnknownOutcome(label.to_string()))?;
            mask |= 1u64 << i;
        }
        Ok(Event { mask })
    }

    pub fn mask(&self) -> u64 {
        self.mask
    }

    pub fn is_empty(&self) -> bool {
        self.mask == 0
    }

    pub fn len(&self) -> usize {
        self.mask.count_ones() as usize
    }

    pub fn contains(&self, i: usize) -> bool {
        self.mask & (1u64 << i) != 0
    }

    pub fn union(&self, other: Event) -> Event {
        Event { mask: self.mask | other.mask }
    }

    pub fn intersect(&self, other: Event) -> Event {
        Event { mask: self.mask & other.mask }
    }

    pub fn difference(&self, other: Event) -> Event {
        Event { mask: self.mask & !other.mask }
    }

    pub fn complement(&self, space: &SampleSpace) -> Event {
        Event { mask: space.full_event().mask & !self.mask }
    }

    pub fn is_subset_of(&self, other: Event) -> bool {
        self.mask & !other.mask == 0
    }

    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        (0..64).filter(move |i| self.contains(*i))
    }

    /// Renders as a label set against a space, e.g. `{a, c}`.
    pub fn describe(&self, space: &SampleSpace) -> String {
        let labels: Vec<&str> = self
            .indices()
            .filter(|&i| i < space.len())
            .map(|i| space.label(i))
            .collect();
        format!("{{{}}}", labels.join(", "))
    }
}

/// A finite sample space with per-outcome weights and ranks, inducing an
/// exact Q(e)-valued probability measure.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NapModel {
    space: SampleSpace,
    weights: Vec<Rational>,
    ranks: Vec<u32>,
}

impl NapModel {
    /// Builds a model. Weights must be strictly positive. Ranks are shifted
    /// uniformly so the minimum rank is 0; probabilities are ratios of
    /// masses, so the shift does not change any probability.
    pub fn new(
        space: SampleSpace,
        weights: Vec<Rational>,
        ranks: Vec<u32>,
    ) -> Result<Self, ModelError> {
        if weights.len() != space.len() {
            return Err(ModelError::LengthMismatch {
                expected: space.len(),
                got: weights.len(),
            });
        }
        if ranks.len() != space.len() {
            return Err(ModelError::LengthMismatch {
                expected: space.len(),
                got: ranks.len(),
            });
        }
        for (i, w) in weights.iter().enumerate() {
            if *w <= Rational::zero() {
                return Err(ModelError::NonPositiveWeight(space.label(i).to_string()));
            }
        }
        let min = *ranks.iter().min().expect("space is nonempty");
        let ranks = ranks.iter().map(|r| r - min).collect();
        Ok(NapModel {
            space,
            weights,
            ranks,
        })
    }

    /// Uniform weights 1, all ranks 0.
    pub fn uniform(space: SampleSpace) -> Self {
        let n = space.len();
        NapModel {
            space,
            weights: vec![Rational::one(); n],
            ranks: vec![0; n],
        }
    }

    pub fn space(&self) -> &SampleSpace {
        &self.space
    }

    pub fn weight(&self, i: usize) -> &Rational {
        &self.weights[i]
    }

    pub fn rank(&self, i: usize) -> u32 {
        self.ranks[i]
    }

    pub fn max_rank(&self) -> u32 {
        self.ranks.iter().copied().max().unwrap_or(0)
    }

    /// Total mass of an event: `sum of w(a)·e^rank(a)` over its outcomes.
    pub fn mass(&self, ev: Event) -> EpsPoly {
        let mut coeffs = vec![Rational::zero(); self.max_rank() as usize + 1];
        for i in ev.indices() {
            if i >= self.space.len() {
                continue;
            }
            coeffs[self.ranks[i] as usize] += &self.weights[i];
        }
        EpsPoly::from_coeffs(coeffs)
    }

    /// Exact probability `P(A) = mass(A)/mass(Omega)`.
    pub fn prob(&self, ev: Event) -> FieldValue {
        FieldValue::from_ratio(self.mass(ev), self.mass(self.space.full_event()))
    }

    /// Exact conditional probability `P(A|B) = P(A∩B)/P(B)`; `B` nonempty.
    pub fn cond(&self, a: Event, b: Event) -> Result<FieldValue, ModelError> {
        if b.intersect(self.space.full_event()).is_empty() {
            return Err(ModelError::EmptyCondition);
        }
        Ok(&self.prob(a.intersect(b)) / &self.prob(b))
    }

    /// Classical conditional probability at one finite snapshot stage: each
    /// outcome is replicated `profile.count_of(rank, stage)` times.
    pub fn snapshot_cond(
        &self,
        a: Event,
        b: Event,
        profile: &SnapshotProfile,
        stage: u64,
    ) -> Result<Rational, ModelError> {
        if stage < 2 {
            return Err(ModelError::InvalidStage(stage));
        }
        if b.intersect(self.space.full_event()).is_empty() {
            return Err(ModelError::EmptyCondition);
        }
        if self.max_rank() > profile.max_rank {
            return Err(ModelError::RankTooLarge(self.max_rank()));
        }
        let ab = a.intersect(b);
        let mut num = Rational::zero();
        let mut den = Rational::zero();
        for i in b.indices() {
            if i >= self.space.len() {
                continue;
            }
            let count = Rational::from_integer(profile.count_of(self.ranks[i], stage)?);
            let mass = &self.weights[i] * count;
            if ab.contains(i) {
                num += &mass;
            }
            den += mass;
        }
        Ok(num / den)
    }

    /// Checks exact finite additivity over a partition: `parts` must be
    /// pairwise disjoint with union `a`; returns whether
    /// `P(a) = sum of P(part)` (always true for this measure).
    pub fn partition_sum_check(&self, a: Event, parts: &[Event]) -> Result<bool, ModelError> {
        let mut seen = Event::EMPTY;
        for p in parts {
            if !seen.intersect(*p).is_empty() {
                return Err(ModelError::InvalidPartition(
                    "parts are not pairwise disjoint".to_string(),
                ));
            }
            seen = seen.union(*p);
        }
        if seen != a {
            return Err(ModelError::InvalidPartition(
                "parts do not union to the target event".to_string(),
            ));
        }
        let mut sum = FieldValue::zero();
        for p in parts {
            sum = &sum + &self.prob(*p);
        }
        Ok(sum == self.prob(a))
    }
}

/// The replication schedule for snapshot stages: an outcome of rank `k` is
/// counted `n^(3^(max_rank - k))` times at stage `n`. Exponent ratios of 3
/// make every rank's count strictly dominate the square of every higher
/// rank's count once `n >= 2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SnapshotProfile {
    max_rank: u32,
}

impl SnapshotProfile {
    /// Counts explode doubly exponentially in the rank span; this is a desk
    /// tool, so the span is capped.
    pub const MAX_RANK_LIMIT: u32 = 8;

    pub fn new(max_rank: u32) -> Result<Self, ModelError> {
        if max_rank > Self::MAX_RANK_LIMIT {
            return Err(ModelError::RankTooLarge(max_rank));
        }
        Ok(SnapshotProfile { max_rank })
    }

    pub fn for_model(model: &NapModel) -> Result<Self, ModelError> {
        Self::new(model.max_rank())
    }

    pub fn max_rank(&self) -> u32 {
        self.max_rank
    }

    /// Number of replicas of a rank-`k` outcome at stage `n`.
    pub fn count_of(&self, rank: u32, stage: u64) -> Result<BigInt, ModelError> {
        if rank > self.max_rank {
            return Err(ModelError::RankTooLarge(rank));
        }
        let exponent = 3u32.pow(self.max_rank - rank);
        Ok(BigInt::from(stage).pow(exponent))
    }
}
