//! Popper conditional-probability tables on finite Boolean algebras.
//!
//! A table stores `C(b_i, S)` for every normal atom `b_i` and nonempty
//! condition event `S`; the conditional probability of a compound first
//! argument is derived by summation, and `C(·, ∅)` is the constant 1 (the
//! empty event is the contradiction). The four axioms checked are:
//!
//! 1. `C(a, a) = 1`;
//! 2. if `C(¬a, a) ≠ 1` then `C(·, a)` is a finitely additive probability
//!    function;
//! 3. `C(a∧b, d) = C(a, d) · C(b, a∧d)`;
//! 4. if `C(a, b) = C(b, a) = 1` then `C(d, a) = C(d, b)` for every `d`.
//!
//! [`PopperTable::check_axioms`] verifies all four exhaustively with a
//! pairwise sweep: for additively stored tables, axiom 3 over all triples is
//! equivalent to a proportionality condition over pairs `(S, D)` with
//! `S ⊆ D`, and axiom 4's inner quantifier reduces to row equality. The
//! literal quantifier sweep (cubic in the number of events) is kept as
//! [`PopperTable::check_axioms_brute_force`] and the two are tested against
//! each other.

use std::fmt;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::field::Rational;

/// Default cap on atoms for exhaustive checking; the sweeps are exponential
/// in the atom count.
pub const DEFAULT_CHECK_LIMIT: usize = 10;

/// Hard cap on atoms for table construction (a table stores one row per
/// nonempty event).
pub const MAX_ATOMS: usize = 16;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum PopperError {
    #[error("a table needs at least one atom")]
    EmptyAtoms,
    #[error("duplicate atom label '{0}'")]
    DuplicateAtom(String),
    #[error("{0} atoms exceed the construction cap of {max}", max = MAX_ATOMS)]
    TooManyAtoms(usize),
    #[error("expected {expected} rows/entries, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("C({atom}, {condition}) = {value} is outside [0,1]")]
    ValueOutOfRange {
        atom: String,
        condition: String,
        value: String,
    },
    #[error("exhaustive checking over {atoms} atoms exceeds the limit {limit}; pass a higher limit explicitly")]
    AtomLimitExceeded { atoms: usize, limit: usize },
    #[error("not a Popper function: {0}")]
    NotAPopperFunction(String),
    #[error("stratum {0} is empty")]
    EmptyStratum(usize),
    #[error("invalid stratum {rank}: {detail}")]
    InvalidStratum { rank: usize, detail: String },
    #[error("atom '{0}' is not covered by exactly one stratum")]
    BadAtomCover(String),
}

/// Renders an event bitmask as a set of atom labels.
pub fn describe_mask(atoms: &[String], mask: u64) -> String {
    let labels: Vec<&str> = (0..atoms.len())
        .filter(|i| mask & (1 << i) != 0)
        .map(|i| atoms[i].as_str())
        .collect();
    format!("{{{}}}", labels.join(", "))
}

/// A Popper conditional function on the Boolean algebra generated by `m`
/// normal atoms, stored per (atom, nonempty condition event).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PopperTable {
    atoms: Vec<String>,
    /// `rows[mask][i] = C(b_i, mask)` for nonempty `mask`; `rows[0]` unused.
    rows: Vec<Vec<Rational>>,
}

impl PopperTable {
    /// Builds a table from per-atom rows indexed by condition mask.
    /// `rows[mask]` must hold one value per atom for every nonempty mask,
    /// each within `[0, 1]`.
    pub fn from_atom_rows(
        atoms: Vec<String>,
        rows: Vec<Vec<Rational>>,
    ) -> Result<Self, PopperError> {
        let m = validate_atoms(&atoms)?;
        if rows.len() != 1 << m {
            return Err(PopperError::LengthMismatch {
                expected: 1 << m,
                got: rows.len(),
            });
        }
        for (mask, row) in rows.iter().enumerate().skip(1) {
            if row.len() != m {
                return Err(PopperError::LengthMismatch {
                    expected: m,
                    got: row.len(),
                });
            }
            for (i, v) in row.iter().enumerate() {
                if *v < Rational::zero() || *v > Rational::one() {
                    return Err(PopperError::ValueOutOfRange {
                        atom: atoms[i].clone(),
                        condition: describe_mask(&atoms, mask as u64),
                        value: v.to_string(),
                    });
                }
            }
        }
        Ok(PopperTable { atoms, rows })
    }

    /// Builds a table by evaluating `f(atom index, condition mask)` on every
    /// entry. Values are range-checked.
    pub fn from_fn(
        atoms: Vec<String>,
        mut f: impl FnMut(usize, u64) -> Rational,
    ) -> Result<Self, PopperError> {
        let m = validate_atoms(&atoms)?;
        let mut rows = vec![Vec::new(); 1 << m];
        for mask in 1..(1u64 << m) {
            rows[mask as usize] = (0..m).map(|i| f(i, mask)).collect();
        }
        PopperTable::from_atom_rows(atoms, rows)
    }

    pub fn atom_count(&self) -> usize {
        self.atoms.len()
    }

    pub fn atoms(&self) -> &[String] {
        &self.atoms
    }

    pub fn full_mask(&self) -> u64 {
        (1u64 << self.atoms.len()) - 1
    }

    /// `C(b_i, mask)` for a nonempty condition mask.
    pub fn atom_conditional(&self, i: usize, mask: u64) -> &Rational {
        &self.rows[mask as usize][i]
    }

    /// The induced conditional `C(a, s)` for arbitrary events: derived by
    /// summation over the atoms of `a`, with `C(·, ∅) = 1`.
    pub fn conditional(&self, a: u64, s: u64) -> Rational {
        if s == 0 {
            return Rational::one();
        }
        let mut sum = Rational::zero();
        for i in 0..self.atoms.len() {
            if a & (1 << i) != 0 {
                sum += &self.rows[s as usize][i];
            }
        }
        sum
    }

    /// Exhaustively verifies the four axioms (and the regularity convention)
    /// with the pairwise-complete sweep. Refuses to run above the default
    /// atom limit; use [`check_axioms_with_limit`](Self::check_axioms_with_limit)
    /// to override.
    pub fn check_axioms(&self) -> Result<AxiomReport, PopperError> {
        self.check_axioms_with_limit(DEFAULT_CHECK_LIMIT)
    }

    pub fn check_axioms_with_limit(&self, limit: usize) -> Result<AxiomReport, PopperError> {
        let m = self.atoms.len();
        if m > limit {
            return Err(PopperError::AtomLimitExceeded { atoms: m, limit });
        }
        let mut report = AxiomReport::new(m);
        let full = self.full_mask();

        // Axioms 1 and 2 per condition: C(S,S) = 1 and C(T,S) = 1. Together
        // with the [0,1] range enforced at construction these pin all mass
        // inside S, which is what the remaining sweeps rely on.
        for s in 1..=full {
            report.conditions_checked += 1;
            let in_sum = self.conditional(s, s);
            if !in_sum.is_one() {
                report.push(
                    PopperAxiom::SelfCertainty,
                    (s, s),
                    format!(
                        "C({ev}, {ev}) = {v}, expected 1",
                        ev = describe_mask(&self.atoms, s),
                        v = in_sum
                    ),
                );
            }
            let total = self.conditional(full, s);
            if !total.is_one() {
                report.push(
                    PopperAxiom::ProbabilityFunction,
                    (full, s),
                    format!(
                        "C(T, {ev}) = {v}, expected 1",
                        ev = describe_mask(&self.atoms, s),
                        v = total
                    ),
                );
            }
            // Regularity convention: only the empty event may condition as a
            // contradiction.
            let out_sum = &total - &in_sum;
            if out_sum.is_one() {
                report.regularity_failures.push(s);
            }
        }

        // Axiom 3 (product rule): for additive tables the full triple
        // quantifier reduces to proportional restriction on nested pairs
        // S ⊆ D: whenever c = C(S, D) > 0, each atom i in S must satisfy
        // C(b_i, S) · c = C(b_i, D).
        for d in 1..=full {
            let mut s = d;
            while s != 0 {
                report.pairs_checked += 1;
                let c = self.conditional(s, d);
                if !c.is_zero() {
                    for i in 0..m {
                        if s & (1 << i) == 0 {
                            continue;
                        }
                        let lhs = self.atom_conditional(i, s) * &c;
                        if lhs != *self.atom_conditional(i, d) {
                            report.push(
                                PopperAxiom::ProductRule,
                                (s, d),
                                format!(
                                    "C({atom}, {sub})·C({sub}, {sup}) = {lhs} but C({atom}, {sup}) = {rhs}",
                                    atom = describe_mask(&self.atoms, 1 << i),
                                    sub = describe_mask(&self.atoms, s),
                                    sup = describe_mask(&self.atoms, d),
                                    lhs = lhs,
                                    rhs = self.atom_conditional(i, d),
                                ),
                            );
                        }
                    }
                }
                s = (s - 1) & d;
            }
        }

        // Axiom 4: C(A,B) = C(B,A) = 1 forces C(·,A) = C(·,B). With the mass
        // constraints above, C(A,B) = 1 is exactly supp(row B) ⊆ A. A table
        // whose rows are not normalized could reach C(A,B) = 1 with mass
        // outside A; such a table already fails the axiom-2 sweep, so
        // skipping those pairs here cannot turn a failing table green.
        let supports: Vec<u64> = (0..=full as usize)
            .map(|s| {
                if s == 0 {
                    return 0;
                }
                let mut supp = 0u64;
                for i in 0..m {
                    if !self.rows[s][i].is_zero() {
                        supp |= 1 << i;
                    }
                }
                supp
            })
            .collect();
        for a in 1..=full {
            for b in 1..=full {
                report.pairs_checked += 1;
                if supports[b as usize] & !a != 0 || supports[a as usize] & !b != 0 {
                    continue;
                }
                // Support containment only implies C(A,B) = 1 when the rows
                // are normalized; re-check the sums to stay sound on
                // adversarial input.
                if !self.conditional(a, b).is_one() || !self.conditional(b, a).is_one() {
                    continue;
                }
                if self.rows[a as usize] != self.rows[b as usize] {
                    let i = (0..m)
                        .find(|&i| self.rows[a as usize][i] != self.rows[b as usize][i])
                        .unwrap();
                    report.push(
                        PopperAxiom::Substitution,
                        (a, b),
                        format!(
                            "C({a_ev}, {b_ev}) = C({b_ev}, {a_ev}) = 1 but C({atom}, {a_ev}) = {va} differs from C({atom}, {b_ev}) = {vb}",
                            a_ev = describe_mask(&self.atoms, a),
                            b_ev = describe_mask(&self.atoms, b),
                            atom = describe_mask(&self.atoms, 1 << i),
                            va = self.rows[a as usize][i],
                            vb = self.rows[b as usize][i],
                        ),
                    );
                }
            }
        }

        Ok(report)
    }

    /// Literal quantifier sweep over all event pairs and triples, including
    /// the `C(·, ∅) = 1` convention. Cubic in the number of events, so only
    /// usable for small atom counts; serves as the reference oracle for
    /// [`check_axioms`](Self::check_axioms).
    pub fn check_axioms_brute_force(&self, limit: usize) -> Result<AxiomReport, PopperError> {
        let m = self.atoms.len();
        if m > limit {
            return Err(PopperError::AtomLimitExceeded { atoms: m, limit });
        }
        let mut report = AxiomReport::new(m);
        let full = self.full_mask();
        let n_events = (full + 1) as usize;

        // cond[s][a] = C(a, s), tabulated by subset dynamic programming.
        let mut cond = vec![vec![Rational::zero(); n_events]; n_events];
        for s in 0..n_events {
            for a in 1..n_events {
                let low = a & a.wrapping_neg();
                let i = low.trailing_zeros() as usize;
                let rest = cond[s][a ^ low].clone();
                cond[s][a] = if s == 0 {
                    Rational::one() // convention; any compound of an empty-conditioned row is 1
                } else {
                    rest + &self.rows[s][i]
                };
            }
            if s == 0 {
                cond[s][0] = Rational::one();
            }
        }

        for a in 0..=full {
            report.conditions_checked += 1;
            if !cond[a as usize][a as usize].is_one() {
                report.push(
                    PopperAxiom::SelfCertainty,
                    (a, a),
                    format!("C(x, x) != 1 for x = {}", describe_mask(&self.atoms, a)),
                );
            }
        }
        for a in 1..=full {
            let not_a = full & !a;
            if cond[a as usize][not_a as usize].is_one() {
                report.regularity_failures.push(a);
                continue; // axiom 2 is conditional on C(!a, a) != 1
            }
            if !cond[a as usize][full as usize].is_one() {
                report.push(
                    PopperAxiom::ProbabilityFunction,
                    (full, a),
                    "C(T, a) != 1".to_string(),
                );
            }
            // Finite additivity over all disjoint pairs.
            for b in 0..=full {
                let rest = full & !b;
                let mut c = rest;
                loop {
                    let sum = &cond[a as usize][b as usize] + &cond[a as usize][c as usize];
                    if sum != cond[a as usize][(b | c) as usize] {
                        report.push(
                            PopperAxiom::ProbabilityFunction,
                            (b, a),
                            "additivity failure".to_string(),
                        );
                    }
                    if c == 0 {
                        break;
                    }
                    c = (c - 1) & rest;
                }
            }
        }
        for a in 0..=full {
            for b in 0..=full {
                for d in 0..=full {
                    report.pairs_checked += 1;
                    let lhs = &cond[d as usize][(a & b) as usize];
                    let rhs = &cond[d as usize][a as usize]
                        * &cond[(a & d) as usize][b as usize];
                    if *lhs != rhs {
                        report.push(
                            PopperAxiom::ProductRule,
                            (a & b, d),
                            format!(
                                "C(a&b, d) != C(a, d)·C(b, a&d) for a = {}, b = {}, d = {}",
                                describe_mask(&self.atoms, a),
                                describe_mask(&self.atoms, b),
                                describe_mask(&self.atoms, d),
                            ),
                        );
                    }
                }
            }
        }
        for a in 0..=full {
            for b in 0..=full {
                if !(cond[b as usize][a as usize].is_one()
                    && cond[a as usize][b as usize].is_one())
                {
                    continue;
                }
                for d in 0..=full {
                    if cond[a as usize][d as usize] != cond[b as usize][d as usize] {
                        report.push(
                            PopperAxiom::Substitution,
                            (a, b),
                            format!("C(d, a) != C(d, b) for d = {}", describe_mask(&self.atoms, d)),
                        );
                    }
                }
            }
        }
        Ok(report)
    }

    /// Runs the van Fraassen rank recursion: `a_0` is the full event and
    /// `a_{k+1}` collects the atoms of `a_k` that are null given `a_k`. The
    /// chain strictly shrinks, each atom's rank is the first chain stage
    /// that gives it positive probability, and the table's rank is the last
    /// defined stage.
    pub fn van_fraassen_ranks(&self) -> Result<VanFraassenRanks, PopperError> {
        let report = self.check_axioms()?;
        if !report.passed() {
            return Err(PopperError::NotAPopperFunction(report.summary()));
        }
        if !report.regular() {
            return Err(PopperError::NotAPopperFunction(
                "a nonempty event conditions as a contradiction".to_string(),
            ));
        }
        let m = self.atoms.len();
        let mut chain = vec![self.full_mask()];
        let mut atom_rank = vec![usize::MAX; m];
        loop {
            let current = *chain.last().unwrap();
            let mut next = 0u64;
            for i in 0..m {
                if current & (1 << i) == 0 {
                    continue;
                }
                if self.atom_conditional(i, current).is_zero() {
                    next |= 1 << i;
                } else {
                    atom_rank[i] = chain.len() - 1;
                }
            }
            if next == 0 {
                break;
            }
            debug_assert!(next != current, "chain must strictly shrink");
            chain.push(next);
        }
        let table_rank = chain.len() - 1;
        debug_assert!(atom_rank.iter().all(|&r| r <= table_rank));
        Ok(VanFraassenRanks {
            chain,
            atom_rank,
            table_rank,
        })
    }

    /// Recovers the stratified presentation: stratum `k` holds the atoms of
    /// rank `k`, weighted by their conditional probability given the chain
    /// event `a_k`. Exact inverse of [`from_stratified`](Self::from_stratified).
    pub fn to_stratified(&self) -> Result<StratifiedMeasure, PopperError> {
        let ranks = self.van_fraassen_ranks()?;
        let strata = (0..=ranks.table_rank)
            .map(|k| {
                (0..self.atoms.len())
                    .filter(|&i| ranks.atom_rank[i] == k)
                    .map(|i| (i, self.atom_conditional(i, ranks.chain[k]).clone()))
                    .collect()
            })
            .collect();
        StratifiedMeasure::new(self.atoms.clone(), strata)
    }

    /// Builds the table induced by a stratified measure: conditional on `S`,
    /// all mass sits in the least stratum meeting `S`, distributed in
    /// proportion to that stratum's weights.
    pub fn from_stratified(s: &StratifiedMeasure) -> Self {
        let rank_of = s.atom_ranks();
        PopperTable::from_fn(s.atoms().to_vec(), |i, mask| {
            let d = (0..s.depth())
                .find(|&k| s.stratum(k).iter().any(|(j, _)| mask & (1 << j) != 0))
                .expect("strata are exhaustive");
            if rank_of[i] != d || mask & (1 << i) == 0 {
                return Rational::zero();
            }
            let total: Rational = s
                .stratum(d)
                .iter()
                .filter(|(j, _)| mask & (1 << j) != 0)
                .map(|(_, w)| w.clone())
                .sum();
            let own = s
                .stratum(d)
                .iter()
                .find(|(j, _)| *j == i)
                .map(|(_, w)| w.clone())
                .expect("atom is in its stratum");
            own / total
        })
        .expect("stratified measures produce valid tables")
    }
}

fn validate_atoms(atoms: &[String]) -> Result<usize, PopperError> {
    if atoms.is_empty() {
        return Err(PopperError::EmptyAtoms);
    }
    if atoms.len() > MAX_ATOMS {
        return Err(PopperError::TooManyAtoms(atoms.len()));
    }
    for (i, a) in atoms.iter().enumerate() {
        if atoms[..i].contains(a) {
            return Err(PopperError::DuplicateAtom(a.clone()));
        }
    }
    Ok(atoms.len())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PopperAxiom {
    /// Axiom 1: `C(a, a) = 1`.
    SelfCertainty,
    /// Axiom 2: `C(·, a)` is a finitely additive probability function.
    ProbabilityFunction,
    /// Axiom 3: `C(a∧b, d) = C(a, d)·C(b, a∧d)`.
    ProductRule,
    /// Axiom 4: mutually certain events condition identically.
    Substitution,
}

impl PopperAxiom {
    pub fn number(self) -> u8 {
        match self {
            PopperAxiom::SelfCertainty => 1,
            PopperAxiom::ProbabilityFunction => 2,
            PopperAxiom::ProductRule => 3,
            PopperAxiom::Substitution => 4,
        }
    }

    pub const ALL: [PopperAxiom; 4] = [
        PopperAxiom::SelfCertainty,
        PopperAxiom::ProbabilityFunction,
        PopperAxiom::ProductRule,
        PopperAxiom::Substitution,
    ];
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AxiomViolation {
    pub axiom: PopperAxiom,
    /// Witnessing event pair (bitmasks over the table's atoms).
    pub witness: (u64, u64),
    pub detail: String,
}

/// Outcome of an axiom sweep: pass/fail per axiom with witnesses, plus the
/// regularity convention (nonempty events must not condition as
/// contradictions).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AxiomReport {
    pub atom_count: usize,
    pub conditions_checked: u64,
    pub pairs_checked: u64,
    pub violations: Vec<AxiomViolation>,
    /// Count of violations beyond the stored witnesses.
    pub truncated: u64,
    pub regularity_failures: Vec<u64>,
}

const MAX_WITNESSES: usize = 32;

impl AxiomReport {
    fn new(atom_count: usize) -> Self {
        AxiomReport {
            atom_count,
            conditions_checked: 0,
            pairs_checked: 0,
            violations: Vec::new(),
            truncated: 0,
            regularity_failures: Vec::new(),
        }
    }

    fn push(&mut self, axiom: PopperAxiom, witness: (u64, u64), detail: String) {
        if self.violations.len() < MAX_WITNESSES {
            self.violations.push(AxiomViolation {
                axiom,
                witness,
                detail,
            });
        } else {
            self.truncated += 1;
        }
    }

    pub fn passed(&self) -> bool {
        self.violations.is_empty() && self.truncated == 0
    }

    pub fn regular(&self) -> bool {
        self.regularity_failures.is_empty()
    }

    pub fn axiom_passed(&self, axiom: PopperAxiom) -> bool {
        self.truncated == 0 && !self.violations.iter().any(|v| v.axiom == axiom)
    }

    pub fn summary(&self) -> String {
        if self.passed() {
            "all axioms hold".to_string()
        } else {
            let v = &self.violations[0];
            format!(
                "axiom {} fails; first witness: {}",
                v.axiom.number(),
                v.detail
            )
        }
    }
}

impl fmt::Display for AxiomReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for axiom in PopperAxiom::ALL {
            let ok = self.axiom_passed(axiom);
            writeln!(
                f,
                "axiom {}: {}",
                axiom.number(),
                if ok { "pass" } else { "FAIL" }
            )?;
            for v in self.violations.iter().filter(|v| v.axiom == axiom) {
                writeln!(f, "  witness: {}", v.detail)?;
            }
        }
        writeln!(
            f,
            "regularity: {}",
            if self.regular() { "pass" } else { "FAIL" }
        )?;
        if self.truncated > 0 {
            writeln!(f, "({} further violations not shown)", self.truncated)?;
        }
        Ok(())
    }
}

/// Result of the rank recursion.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VanFraassenRanks {
    /// Strictly shrinking chain of events `a_0 ⊋ a_1 ⊋ …`, as masks;
    /// `chain[0]` is the full event.
    pub chain: Vec<u64>,
    /// Rank of each atom: the least `k` with `C(b_i, a_k) > 0`.
    pub atom_rank: Vec<usize>,
    /// Rank of the table: the last defined chain stage.
    pub table_rank: usize,
}

/// A rank-stratified measure: a partition of the atoms into strata
/// `0..=R`, each carrying strictly positive weights that sum to 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StratifiedMeasure {
    atoms: Vec<String>,
    strata: Vec<Vec<(usize, Rational)>>,
}

impl StratifiedMeasure {
    pub fn new(
        atoms: Vec<String>,
        strata: Vec<Vec<(usize, Rational)>>,
    ) -> Result<Self, PopperError> {
        let m = validate_atoms(&atoms)?;
        let mut covered = vec![false; m];
        for (rank, stratum) in strata.iter().enumerate() {
            if stratum.is_empty() {
                return Err(PopperError::EmptyStratum(rank));
            }
            let mut total = Rational::zero();
            for (i, w) in stratum {
                if *i >= m || covered[*i] {
                    return Err(PopperError::BadAtomCover(
                        atoms.get(*i).cloned().unwrap_or_else(|| format!("#{}", i)),
                    ));
                }
                covered[*i] = true;
                if *w <= Rational::zero() {
                    return Err(PopperError::InvalidStratum {
                        rank,
                        detail: format!("weight of '{}' is not positive", atoms[*i]),
                    });
                }
                total += w;
            }
            if !total.is_one() {
                return Err(PopperError::InvalidStratum {
                    rank,
                    detail: format!("weights sum to {}, expected 1", total),
                });
            }
        }
        if let Some(i) = covered.iter().position(|c| !c) {
            return Err(PopperError::BadAtomCover(atoms[i].clone()));
        }
        let mut strata = strata;
        for stratum in &mut strata {
            stratum.sort_by_key(|(i, _)| *i);
        }
        Ok(StratifiedMeasure { atoms, strata })
    }

    pub fn atoms(&self) -> &[String] {
        &self.atoms
    }

    /// Number of strata (table rank + 1).
    pub fn depth(&self) -> usize {
        self.strata.len()
    }

    pub fn stratum(&self, k: usize) -> &[(usize, Rational)] {
        &self.strata[k]
    }

    pub fn atom_ranks(&self) -> Vec<usize> {
        let mut ranks = vec![0; self.atoms.len()];
        for (k, stratum) in self.strata.iter().enumerate() {
            for (i, _) in stratum {
                ranks[*i] = k;
            }
        }
        ranks
    }

    pub fn weight_of(&self, atom: usize) -> &Rational {
        let k = self.atom_ranks()[atom];
        &self.strata[k]
            .iter()
            .find(|(i, _)| *i == atom)
            .expect("atom in its stratum")
            .1
    }
}
