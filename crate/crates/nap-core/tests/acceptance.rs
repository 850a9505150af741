//! Acceptance suite. Every test prints one `[PASS]`/`[FAIL]` line (visible
//! with `cargo test --test acceptance -- --nocapture`) and fails the build
//! on any violation. All checks are exact; random inputs use fixed seeds.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::sync::{Mutex, MutexGuard};
use std::time::Instant;

use num_traits::{Signed, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use nap_core::bridge::{nap_to_popper, popper_to_nap, snapshot_oracle, verify_agreement};
use nap_core::events::{Event, NapModel, SampleSpace};
use nap_core::field::{EpsPoly, FieldValue, Rational};
use nap_core::lexi::{
    coefficient_at, compare_lex, expand, remainder, valuation, Rank,
};
use nap_core::popper::{PopperTable, StratifiedMeasure};

/// The bignum-heavy criteria serialize among themselves (allocator
/// contention between parallel test threads would skew the timed
/// criterion); the cheap criteria still run in parallel.
static HEAVY: Mutex<()> = Mutex::new(());

fn heavy_slot() -> MutexGuard<'static, ()> {
    HEAVY.lock().unwrap_or_else(|poisoned| poisoned.into_inner())
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn rat(p: i64, q: i64) -> Rational {
    Rational::new(p.into(), q.into())
}

/// Coefficient with |numerator| <= 10^6 and denominator <= 10^6.
fn rand_coeff(r: &mut ChaCha8Rng) -> Rational {
    // A dash of sparsity exercises valuation gaps.
    if r.gen_ratio(1, 6) {
        return Rational::zero();
    }
    rat(r.gen_range(-1_000_000..=1_000_000), r.gen_range(1..=1_000_000))
}

fn rand_poly(r: &mut ChaCha8Rng, max_deg: usize, allow_zero: bool) -> EpsPoly {
    loop {
        let deg = r.gen_range(0..=max_deg);
        let p = EpsPoly::from_coeffs((0..=deg).map(|_| rand_coeff(r)).collect());
        if allow_zero || !p.is_zero() {
            return p;
        }
    }
}

/// Random canonical field value with numerator/denominator degrees <= 8.
fn rand_value(r: &mut ChaCha8Rng) -> FieldValue {
    FieldValue::from_ratio(rand_poly(r, 8, true), rand_poly(r, 8, false))
}

fn rand_model(r: &mut ChaCha8Rng, max_outcomes: usize, max_rank: u32) -> NapModel {
    let n = r.gen_range(2..=max_outcomes);
    let space = SampleSpace::new((0..n).map(|i| format!("o{}", i))).unwrap();
    let weights = (0..n)
        .map(|_| rat(r.gen_range(1..=60), r.gen_range(1..=20)))
        .collect();
    let ranks = (0..n).map(|_| r.gen_range(0..=max_rank)).collect();
    NapModel::new(space, weights, ranks).unwrap()
}

/// Random stratified measure: `2..=max_atoms` atoms partitioned into at most
/// `max_strata` nonempty strata, each with exact positive weights summing
/// to 1.
fn rand_stratified(r: &mut ChaCha8Rng, max_atoms: usize, max_strata: usize) -> StratifiedMeasure {
    let m = r.gen_range(2..=max_atoms);
    let k = r.gen_range(1..=max_strata.min(m));
    let mut order: Vec<usize> = (0..m).collect();
    order.shuffle(r);
    // k nonempty consecutive groups of the shuffled atoms.
    let mut cuts: Vec<usize> = (1..m).collect();
    cuts.shuffle(r);
    let mut cuts: Vec<usize> = cuts.into_iter().take(k - 1).collect();
    cuts.sort_unstable();
    cuts.insert(0, 0);
    cuts.push(m);
    let strata = cuts
        .windows(2)
        .map(|w| {
            let members = &order[w[0]..w[1]];
            let units: Vec<i64> = members.iter().map(|_| r.gen_range(1..=20)).collect();
            let total: i64 = units.iter().sum();
            members
                .iter()
                .zip(&units)
                .map(|(&i, &u)| (i, rat(u, total)))
                .collect()
        })
        .collect();
    StratifiedMeasure::new((0..m).map(|i| format!("b{}", i)).collect(), strata).unwrap()
}

struct Criterion {
    checked: u64,
    violations: Vec<String>,
    started: Instant,
}

impl Criterion {
    fn new() -> Self {
        Criterion {
            checked: 0,
            violations: Vec::new(),
            started: Instant::now(),
        }
    }

    fn check(&mut self, ok: bool, msg: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok && self.violations.len() < 8 {
            self.violations.push(msg());
        } else if !ok {
            self.violations.push(String::new());
        }
    }

    fn finish(self, id: u32, label: &str) {
        let secs = self.started.elapsed().as_secs_f64();
        if self.violations.is_empty() {
            println!(
                "[PASS] criterion {:2}: {} ({} checks, {:.1}s)",
                id, label, self.checked, secs
            );
        } else {
            println!(
                "[FAIL] criterion {:2}: {} ({} violations out of {} checks; first: {})",
                id,
                label,
                self.violations.len(),
                self.checked,
                self.violations[0]
            );
        }
        assert!(
            self.violations.is_empty(),
            "criterion {} failed: {}",
            id,
            self.violations.first().cloned().unwrap_or_default()
        );
    }
}

#[test]
fn criterion_01_field_and_order_laws() {
    let _slot = heavy_slot();
    let mut c = Criterion::new();
    let mut r = rng(0x0001);
    let t0 = Instant::now();
    let zero = FieldValue::zero();
    let one = FieldValue::one();
    let eps = FieldValue::epsilon();

    for case in 0..10_000 {
        let a = rand_value(&mut r);
        let b = rand_value(&mut r);
        let cc = rand_value(&mut r);

        let ab_sum = &a + &b;
        let bc_sum = &b + &cc;
        let ab = &a * &b;
        let ac = &a * &cc;
        let bc = &b * &cc;

        c.check(&ab_sum + &cc == &a + &bc_sum, || {
            format!("case {}: additive associativity", case)
        });
        c.check(ab_sum == &b + &a, || format!("case {}: additive commutativity", case));
        c.check(&ab * &cc == &a * &bc, || {
            format!("case {}: multiplicative associativity", case)
        });
        c.check(ab == &b * &a, || {
            format!("case {}: multiplicative commutativity", case)
        });
        c.check(&a * &bc_sum == &ab + &ac, || {
            format!("case {}: distributivity", case)
        });
        c.check(&a + &(-&a) == zero, || format!("case {}: additive inverse", case));
        c.check(&a + &zero == a && &a * &one == a, || {
            format!("case {}: identities", case)
        });
        if !a.is_zero() {
            c.check(&a * &a.inv().unwrap() == one, || {
                format!("case {}: multiplicative inverse", case)
            });
        }

        // Total order compatible with the field operations.
        let a_vs_b = a.compare(&b);
        c.check(a_vs_b == b.compare(&a).reverse(), || {
            format!("case {}: comparison antisymmetry", case)
        });
        if a_vs_b != Ordering::Greater && b.compare(&cc) != Ordering::Greater {
            c.check(a.compare(&cc) != Ordering::Greater, || {
                format!("case {}: transitivity", case)
            });
        }
        c.check((&a + &cc).compare(&bc_sum) == a_vs_b, || {
            format!("case {}: translation invariance", case)
        });
        if cc.sign() > 0 {
            c.check(ac.compare(&bc) == a_vs_b, || {
                format!("case {}: positive scaling", case)
            });
        }

        // The Archimedean property fails exactly at e: 0 < e < q for every
        // positive rational q.
        let q = FieldValue::from_rational(rat(r.gen_range(1..=1_000_000), r.gen_range(1..=1_000_000)));
        c.check(
            eps.compare(&zero) == Ordering::Greater && eps.compare(&q) == Ordering::Less,
            || format!("case {}: e not between 0 and {}", case, q),
        );

        // Standard part is a ring homomorphism on finite elements.
        if a.is_finite() && b.is_finite() {
            let st = |v: &FieldValue| v.standard_part().unwrap();
            c.check(st(&ab_sum) == st(&a) + st(&b), || {
                format!("case {}: st additive", case)
            });
            c.check(st(&ab) == st(&a) * st(&b), || {
                format!("case {}: st multiplicative", case)
            });
        }

        // Canonical-form idempotence and structural equality.
        c.check(
            FieldValue::from_ratio(a.num().clone(), a.den().clone()) == a,
            || format!("case {}: canonicalization not idempotent", case),
        );
    }
    let elapsed = t0.elapsed();
    c.check(elapsed.as_secs_f64() < 30.0, || {
        format!("runtime {:?} exceeds 30s", elapsed)
    });
    c.finish(1, "field and order laws on 10000 random triples");
}

#[test]
fn criterion_02_lexicographic_representation() {
    let mut c = Criterion::new();
    let mut r = rng(0x0002);
    for case in 0..10_000 {
        let a = rand_value(&mut r);
        let b = rand_value(&mut r);
        c.check(compare_lex(&a, &b) == a.compare(&b), || {
            format!("case {}: compare_lex({}, {}) disagrees with field order", case, a, b)
        });
    }
    c.finish(2, "lexicographic comparison equals field order on 10000 pairs");
}

#[test]
fn criterion_03_remainder_recurrence_and_rank_increase() {
    let _slot = heavy_slot();
    let mut c = Criterion::new();
    let mut r = rng(0x0003);
    for case in 0..1_000 {
        let a = rand_value(&mut r);
        let v = match valuation(&a) {
            Rank::Int(v) => v,
            Rank::Top => {
                // remainder of zero is zero at every depth
                c.check(
                    (0..=12).all(|n| remainder(&a, n).is_zero()),
                    || format!("case {}: zero value with nonzero remainder", case),
                );
                continue;
            }
        };
        let mut prev = a.clone();
        for n in 0..12usize {
            let next = remainder(&a, n + 1);
            // Successor recurrence: the next remainder strips exactly the
            // rank-(v+n) expansion term.
            let term = &FieldValue::from_rational(coefficient_at(&a, v + n as i64))
                * &FieldValue::eps_pow(v + n as i64);
            c.check(next == &prev - &term, || {
                format!("case {}: recurrence fails at depth {}", case, n)
            });
            // While nonzero, the remainder's rank strictly exceeds every
            // stripped rank.
            if !next.is_zero() {
                c.check(next.order().unwrap() > v + n as i64, || {
                    format!("case {}: rank did not move past {} at depth {}", case, v + n as i64, n)
                });
            }
            prev = next;
        }
        // Strict rank increase along the nonzero expansion terms: peeling
        // the leading term always raises the valuation.
        let mut rem = a.clone();
        for _ in 0..12 {
            if rem.is_zero() {
                break;
            }
            let d = rem.order().unwrap();
            let lead = &FieldValue::from_rational(coefficient_at(&rem, d)) * &FieldValue::eps_pow(d);
            let stripped = &rem - &lead;
            c.check(
                stripped.is_zero() || stripped.order().unwrap() > d,
                || format!("case {}: leading-term strip did not raise the rank", case),
            );
            rem = stripped;
        }
        // Exact reconstruction whenever the expansion closed within reach.
        let series = expand(&a, 12);
        if series.exact {
            c.check(series.to_field_value() == a, || {
                format!("case {}: exact expansion does not reconstruct", case)
            });
        }
    }
    c.finish(3, "remainder recurrence and strict rank increase to depth 12");
}

#[test]
fn criterion_04_nap_laws() {
    let mut c = Criterion::new();
    let mut r = rng(0x0004);
    let one = FieldValue::one();
    for case in 0..5_000 {
        let m = rand_model(&mut r, 12, 4);
        let n = m.space().len();
        let full = m.space().full_event();

        // Normalization.
        c.check(m.prob(full) == one, || format!("case {}: P(Omega) != 1", case));

        // Regularity: every nonempty event has strictly positive probability.
        let ev = Event::from_mask(r.gen_range(1..(1u64 << n)));
        c.check(m.prob(ev).sign() == 1, || {
            format!("case {}: nonempty event with sign != +1", case)
        });

        // Exact additivity over a random partition of a random event.
        let target = Event::from_mask(r.gen_range(0..(1u64 << n)));
        let buckets = r.gen_range(1..=4usize);
        let mut parts = vec![Event::EMPTY; buckets];
        for i in target.indices() {
            let b = r.gen_range(0..buckets);
            parts[b] = parts[b].union(Event::singleton(i));
        }
        c.check(
            m.partition_sum_check(target, &parts) == Ok(true),
            || format!("case {}: partition additivity fails", case),
        );

        // Pairwise additivity on disjoint events.
        let a = Event::from_mask(r.gen_range(0..(1u64 << n)));
        let b = Event::from_mask(r.gen_range(0..(1u64 << n))).difference(a);
        c.check(
            m.prob(a.union(b)) == &m.prob(a) + &m.prob(b),
            || format!("case {}: P(A∪B) != P(A)+P(B) for disjoint A, B", case),
        );

        // Uniformity: equal weights and ranks give equal singletons.
        let w = rat(r.gen_range(1..=9), r.gen_range(1..=9));
        let rank = r.gen_range(0..=4u32);
        let u = NapModel::new(
            SampleSpace::new((0..n).map(|i| format!("u{}", i))).unwrap(),
            vec![w; n],
            vec![rank; n],
        )
        .unwrap();
        let first = u.prob(Event::singleton(0));
        c.check(
            (1..n).all(|i| u.prob(Event::singleton(i)) == first),
            || format!("case {}: uniform model with unequal singletons", case),
        );
    }
    c.finish(4, "NAP laws (normalization, additivity, regularity, uniformity) on 5000 models");
}

#[test]
fn criterion_05_standard_part_agreement() {
    let _slot = heavy_slot();
    let mut c = Criterion::new();
    let mut r = rng(0x0005);
    for case in 0..1_000 {
        let s = rand_stratified(&mut r, 8, 4);
        let t = PopperTable::from_stratified(&s);
        let report = verify_agreement(&t).unwrap();
        let m = t.atom_count() as u64;
        c.check(report.pairs_checked == (1 << m) * ((1 << m) - 1), || {
            format!("case {}: pair sweep incomplete", case)
        });
        c.check(report.passed() && report.max_discrepancy.is_zero(), || {
            format!(
                "case {}: {} discrepancies, max {}",
                case, report.discrepancies, report.max_discrepancy
            )
        });
    }
    c.finish(5, "st(P(a|b)) = C(a,b) on all event pairs of 1000 stratified tables");
}

#[test]
fn criterion_06_nap_to_popper_passes_axioms() {
    let _slot = heavy_slot();
    let mut c = Criterion::new();
    let mut r = rng(0x0006);
    for case in 0..1_000 {
        let m = rand_model(&mut r, 8, 3);
        let t = nap_to_popper(&m);
        let report = t.check_axioms().unwrap();
        c.check(report.passed() && report.regular(), || {
            format!("case {}: {}", case, report.summary())
        });
        // Cross-validate the pairwise sweep against the literal
        // quantifier sweep where the latter is tractable.
        if m.space().len() <= 5 {
            let brute = t.check_axioms_brute_force(5).unwrap();
            c.check(brute.passed() == report.passed(), || {
                format!("case {}: checkers disagree", case)
            });
        }
    }
    c.finish(6, "nap_to_popper passes all four axioms exhaustively on 1000 models");
}

#[test]
fn criterion_07_round_trip_identity() {
    let mut c = Criterion::new();
    let mut r = rng(0x0007);
    for case in 0..1_000 {
        let s = rand_stratified(&mut r, 6, 4);
        let t = PopperTable::from_stratified(&s);
        let rt = nap_to_popper(&popper_to_nap(&t).unwrap());
        c.check(rt == t, || format!("case {}: tables differ structurally", case));
        let full = t.full_mask();
        let mut ok = true;
        for b in 1..=full {
            for a in 0..=full {
                if rt.conditional(a, b) != t.conditional(a, b) {
                    ok = false;
                }
            }
        }
        c.check(ok, || format!("case {}: derived conditionals differ", case));
    }
    c.finish(7, "nap_to_popper ∘ popper_to_nap is the identity on all pairs of 1000 tables");
}

/// A-priori bound on the snapshot deviation of a pair, computed from the
/// generator's stratified data (independently of the bridge): with `d` the
/// least rank in `b`, `beta` the rank-`d` weight of `b` and `alpha` that of
/// `a∩b`, the rank-`d` contribution cancels exactly and the rest is bounded
/// by `sum_k |beta·w_k(a∩b) - alpha·w_k(b)| / beta^2` times the count ratio
/// `count(d+1)/count(d) <= n^-2`.
fn deviation_bound(s: &StratifiedMeasure, a: u64, b: u64) -> Rational {
    let ranks = s.atom_ranks();
    let weight_at = |mask: u64, k: usize| -> Rational {
        (0..s.atoms().len())
            .filter(|&i| mask & (1 << i) != 0 && ranks[i] == k)
            .map(|i| s.weight_of(i).clone())
            .sum()
    };
    let d = (0..s.atoms().len())
        .filter(|&i| b & (1 << i) != 0)
        .map(|i| ranks[i])
        .min()
        .expect("b nonempty");
    let beta = weight_at(b, d);
    let alpha = weight_at(a & b, d);
    let mut total = Rational::zero();
    for k in (d + 1)..s.depth() {
        let gamma = &beta * weight_at(a & b, k) - &alpha * weight_at(b, k);
        total += gamma.abs();
    }
    total / (&beta * &beta)
}

#[test]
fn criterion_08_snapshot_convergence() {
    let _slot = heavy_slot();
    let mut c = Criterion::new();
    let mut r = rng(0x0008);

    // Two atoms at ranks {0, 1}: deviation of ({b2}, T) is exactly 1/(n^2+1).
    let s = StratifiedMeasure::new(
        vec!["b1".to_string(), "b2".to_string()],
        vec![vec![(0, rat(1, 1))], vec![(1, rat(1, 1))]],
    )
    .unwrap();
    let t = PopperTable::from_stratified(&s);
    let stages = [2u64, 4, 8, 16, 37, 100];
    let study = nap_core::bridge::snapshot_pair(&t, 0b10, 0b11, &stages).unwrap();
    for row in &study.rows {
        let n = row.stage as i64;
        c.check(row.deviation == rat(1, n * n + 1), || {
            format!("closed form fails at stage {}: {}", row.stage, row.deviation)
        });
    }

    // Random tables over doubling stages.
    let stages = [2u64, 4, 8, 16];
    for case in 0..200 {
        let s = rand_stratified(&mut r, 6, 4);
        let t = PopperTable::from_stratified(&s);
        let study = snapshot_oracle(&t, &stages).unwrap();
        let ranks = s.atom_ranks();
        let mut max_dev: BTreeMap<u64, Rational> = BTreeMap::new();
        for row in &study.rows {
            // Same-rank conditioning events agree exactly at every stage.
            let b_ranks: Vec<usize> = (0..s.atoms().len())
                .filter(|&i| row.given & (1 << i) != 0)
                .map(|i| ranks[i])
                .collect();
            if b_ranks.windows(2).all(|w| w[0] == w[1]) {
                c.check(row.deviation.is_zero(), || {
                    format!(
                        "case {}: same-rank pair ({:b}|{:b}) deviates at stage {}",
                        case, row.event, row.given, row.stage
                    )
                });
            }
            // Model-dependent K/n bound, with K from the generator's data.
            let k = deviation_bound(&s, row.event, row.given);
            c.check(
                &row.deviation * rat(row.stage as i64, 1) <= k,
                || {
                    format!(
                        "case {}: deviation {} exceeds K/n with K = {} at stage {}",
                        case, row.deviation, k, row.stage
                    )
                },
            );
            let entry = max_dev.entry(row.stage).or_insert_with(Rational::zero);
            if row.deviation > *entry {
                *entry = row.deviation.clone();
            }
        }
        // The worst deviation per stage shrinks strictly until it is zero.
        let devs: Vec<&Rational> = stages.iter().map(|n| &max_dev[n]).collect();
        for w in devs.windows(2) {
            c.check(
                (w[0].is_zero() && w[1].is_zero()) || w[1] < w[0],
                || format!("case {}: max deviation did not shrink: {} -> {}", case, w[0], w[1]),
            );
        }
    }
    c.finish(8, "snapshot oracle: exact closed form, K/n bound, shrinking deviations");
}

#[test]
fn criterion_09_finite_conditioning_counterexample() {
    let mut c = Criterion::new();
    let mut r = rng(0x0009);

    // The two-point scenario: a table with C({z}, {z,o}) = 0 exists (the
    // null outcome carries a higher rank), and its model realizes the zero
    // as the standard part of an infinitesimal. But conditioning on a
    // finite event whose outcomes share the minimal rank always yields a
    // rank-0 value with a nonzero standard part, so no same-rank model can
    // imitate that table.
    let s = StratifiedMeasure::new(
        vec!["z".to_string(), "o".to_string()],
        vec![vec![(1, rat(1, 1))], vec![(0, rat(1, 1))]],
    )
    .unwrap();
    let t = PopperTable::from_stratified(&s);
    c.check(t.conditional(0b01, 0b11) == rat(0, 1), || {
        "rank-structured table does not assign C(z|{z,o}) = 0".to_string()
    });
    let m = popper_to_nap(&t).unwrap();
    let cv = m.cond(Event::singleton(0), m.space().full_event()).unwrap();
    c.check(
        cv.is_infinitesimal() && cv.standard_part().unwrap().is_zero(),
        || "rank-structured model does not realize the null conditional".to_string(),
    );

    for case in 0..500 {
        let m = rand_model(&mut r, 10, 4);
        let n = m.space().len();
        for i in 0..n {
            for j in (i + 1)..n {
                if m.rank(i) != m.rank(j) {
                    continue;
                }
                // Both outcomes share the minimal rank of the pair event.
                let pair = Event::from_indices([i, j]);
                let cond = m.cond(Event::singleton(i), pair).unwrap();
                c.check(valuation(&cond) == Rank::Int(0), || {
                    format!("case {}: pair conditional is not rank-0", case)
                });
                c.check(!cond.standard_part().unwrap().is_zero(), || {
                    format!("case {}: pair conditional has zero standard part", case)
                });
            }
        }
    }
    c.finish(9, "two-point conditionals at shared minimal rank are real and nonzero");
}

#[test]
fn criterion_10_van_fraassen_recovery() {
    let mut c = Criterion::new();
    let mut r = rng(0x000a);
    for case in 0..1_000 {
        let s = rand_stratified(&mut r, 8, 4);
        let t = PopperTable::from_stratified(&s);
        let got = t.van_fraassen_ranks().unwrap();
        c.check(got.table_rank == s.depth() - 1, || {
            format!("case {}: table rank {} != {}", case, got.table_rank, s.depth() - 1)
        });
        c.check(got.atom_rank == s.atom_ranks(), || {
            format!("case {}: atom ranks differ", case)
        });
        // chain[k] must be exactly the union of strata k and above.
        let ranks = s.atom_ranks();
        let expected_chain: Vec<u64> = (0..s.depth())
            .map(|k| {
                (0..s.atoms().len())
                    .filter(|&i| ranks[i] >= k)
                    .map(|i| 1u64 << i)
                    .sum()
            })
            .collect();
        c.check(got.chain == expected_chain, || {
            format!("case {}: chain differs", case)
        });
    }
    c.finish(10, "van Fraassen recursion recovers generator strata on 1000 tables");
}
