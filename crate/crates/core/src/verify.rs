//! Independent checks on a merged conditional probability table.
//!
//! None of these reuse the construction: the axioms are tested by querying
//! the table, the coherence oracle enumerates every subfamily and builds its
//! own systems straight from the world sets.

use std::collections::BTreeMap;

use num_traits::Signed;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::construction::ConditionalProbabilityTable;
use crate::error::{Error, Result};
use crate::event::{ConditionalEvent, Event, World};
use crate::gcoherence::{check_g_coherence, Assessment, GCoherenceVerdict, Interval};
use crate::lp::{self, LinearProgram, LpOutcome, Relation};
use crate::rational::{one, serde_text, zero, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VerifyOptions {
    /// Largest constituent count for which the algebra is enumerated.
    pub exhaustive_limit: usize,
    /// Random disjoint pairs per conditioning event above the limit.
    pub samples: usize,
    pub seed: u64,
    /// Largest family handed to the subset-enumeration oracle.
    pub oracle_cap: usize,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            exhaustive_limit: 10,
            samples: 1000,
            seed: 0x5eed,
            oracle_cap: 12,
        }
    }
}

/// A concrete failure that can be re-checked by hand.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Counterexample {
    UndefinedQuery {
        antecedent: Event,
    },
    Negative {
        consequent: Event,
        antecedent: Event,
        #[serde(with = "serde_text")]
        value: Rational,
    },
    Normalization {
        antecedent: Event,
        #[serde(with = "serde_text")]
        value: Rational,
    },
    Additivity {
        first: Event,
        second: Event,
        antecedent: Event,
    },
    SelfProbability {
        antecedent: Event,
        #[serde(with = "serde_text")]
        value: Rational,
    },
    ProductRule {
        first: Event,
        second: Event,
        antecedent: Event,
        #[serde(with = "serde_text")]
        left: Rational,
        #[serde(with = "serde_text")]
        right: Rational,
    },
    QuasiAdditive {
        first: Event,
        second: Event,
    },
    Subfamily {
        members: Vec<usize>,
    },
    Inconsistent {
        index: usize,
        #[serde(with = "serde_text")]
        value: Rational,
    },
    UndefinedEntry {
        index: usize,
    },
    OutOfRange {
        index: usize,
        #[serde(with = "serde_text")]
        value: Rational,
    },
    Cardinality {
        size: usize,
        bound: usize,
    },
}

type Found<T = ()> = std::result::Result<T, Box<Counterexample>>;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckResult {
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<Counterexample>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl CheckResult {
    pub fn pass() -> Self {
        CheckResult {
            passed: true,
            counterexample: None,
            note: None,
        }
    }

    pub fn fail(counterexample: Counterexample) -> Self {
        CheckResult {
            passed: false,
            counterexample: Some(counterexample),
            note: None,
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    fn from_outcome(outcome: Found) -> Self {
        match outcome {
            Ok(()) => Self::pass(),
            Err(c) => Self::fail(*c),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AxiomReport {
    pub axiom_i: CheckResult,
    pub axiom_ii: CheckResult,
    pub axiom_iii: CheckResult,
    /// Product-rule instances with `H` and `E_1H` owned by different stages.
    pub cross_stage_cases: usize,
    pub exhaustive: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    pub axiom_i: CheckResult,
    pub axiom_ii: CheckResult,
    pub axiom_iii: CheckResult,
    pub quasi_additive: CheckResult,
    pub coherent: CheckResult,
    pub consistent: CheckResult,
    pub cardinality_bound: CheckResult,
}

impl VerificationReport {
    pub fn checks(&self) -> [(&'static str, &CheckResult); 7] {
        [
            ("axiom_i", &self.axiom_i),
            ("axiom_ii", &self.axiom_ii),
            ("axiom_iii", &self.axiom_iii),
            ("quasi_additive", &self.quasi_additive),
            ("coherent", &self.coherent),
            ("consistent", &self.consistent),
            ("cardinality_bound", &self.cardinality_bound),
        ]
    }

    pub fn all_passed(&self) -> bool {
        self.checks().iter().all(|(_, c)| c.passed)
    }
}

/// Events of the algebra generated by the base constituents, addressed by
/// constituent subsets.
struct Algebra<'a> {
    table: &'a ConditionalProbabilityTable,
}

impl Algebra<'_> {
    fn size(&self) -> usize {
        self.table.base.len()
    }

    fn event(&self, members: impl IntoIterator<Item = usize>) -> Event {
        self.table.base.union_of(members)
    }

    fn mask_event(&self, mask: u32) -> Event {
        self.event((0..self.size()).filter(|i| mask >> i & 1 == 1))
    }

    fn omega(&self) -> Event {
        Event::full(self.table.base.world_count())
    }
}

fn undefined(h: &Event) -> Box<Counterexample> {
    Box::new(Counterexample::UndefinedQuery {
        antecedent: h.clone(),
    })
}

/// Both sides of `P(E_1E_2|H) = P(E_2|E_1H) P(E_1|H)`, or `None` when `H` or
/// `E_1H` is outside the class or a query is undefined.
pub fn product_rule_sides(
    table: &ConditionalProbabilityTable,
    e1: &Event,
    e2: &Event,
    h: &Event,
) -> Option<(Rational, Rational)> {
    let e1h = e1.and(h);
    table.owner_of(h)?;
    table.owner_of(&e1h)?;
    let left = table.query(&e1.and(e2), h)?;
    let right = table.query(e2, &e1h)? * table.query(e1, h)?;
    Some((left, right))
}

pub fn check_axioms(table: &ConditionalProbabilityTable, options: &VerifyOptions) -> AxiomReport {
    let algebra = Algebra { table };
    let exhaustive = algebra.size() <= options.exhaustive_limit;
    let axiom_i = CheckResult::from_outcome(if exhaustive {
        axiom_i_exhaustive(&algebra)
    } else {
        axiom_i_sampled(&algebra, options)
    });
    let axiom_ii = CheckResult::from_outcome(axiom_ii(table));
    let (axiom_iii, cross_stage_cases) = match axiom_iii(&algebra, exhaustive, options) {
        Ok(cases) => (CheckResult::pass(), cases),
        Err(c) => (CheckResult::fail(*c), 0),
    };
    let mode = if exhaustive {
        format!("exhaustive over {} constituents", algebra.size())
    } else {
        format!("{} sampled pairs per conditioning event", options.samples)
    };
    AxiomReport {
        axiom_i: axiom_i.with_note(mode),
        axiom_ii,
        axiom_iii,
        cross_stage_cases,
        exhaustive,
    }
}

fn check_value(e: &Event, h: &Event, value: &Rational) -> Found {
    if value.is_negative() {
        return Err(Box::new(Counterexample::Negative {
            consequent: e.clone(),
            antecedent: h.clone(),
            value: value.clone(),
        }));
    }
    Ok(())
}

fn check_normalization(algebra: &Algebra, h: &Event) -> Found {
    let total = algebra
        .table
        .query(&algebra.omega(), h)
        .ok_or_else(|| undefined(h))?;
    if total != one() {
        return Err(Box::new(Counterexample::Normalization {
            antecedent: h.clone(),
            value: total,
        }));
    }
    Ok(())
}

fn axiom_i_exhaustive(algebra: &Algebra) -> Found {
    let k = algebra.size();
    let events: Vec<Event> = (0..1u32 << k).map(|m| algebra.mask_event(m)).collect();
    for h in algebra.table.class_events() {
        check_normalization(algebra, h)?;
        let values = events
            .iter()
            .map(|e| algebra.table.query(e, h).ok_or_else(|| undefined(h)))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        for (e, v) in events.iter().zip(&values) {
            check_value(e, h, v)?;
        }
        // Every disjoint pair (a, b) arises as a split of its union c.
        for c in 0..1u32 << k {
            let mut a = c;
            loop {
                let b = c ^ a;
                if a <= b && &values[a as usize] + &values[b as usize] != values[c as usize] {
                    return Err(Box::new(Counterexample::Additivity {
                        first: events[a as usize].clone(),
                        second: events[b as usize].clone(),
                        antecedent: h.clone(),
                    }));
                }
                if a == 0 {
                    break;
                }
                a = (a - 1) & c;
            }
        }
    }
    Ok(())
}

fn additive_at(
    algebra: &Algebra,
    first: &Event,
    second: &Event,
    h: &Event,
) -> Found {
    let q = |e: &Event| algebra.table.query(e, h).ok_or_else(|| undefined(h));
    let (p1, p2, p12) = (q(first)?, q(second)?, q(&first.or(second))?);
    check_value(first, h, &p1)?;
    check_value(second, h, &p2)?;
    if p1 + p2 != p12 {
        return Err(Box::new(Counterexample::Additivity {
            first: first.clone(),
            second: second.clone(),
            antecedent: h.clone(),
        }));
    }
    Ok(())
}

/// Random disjoint pairs: each constituent goes to the first event, the
/// second, or neither.
fn random_pair(algebra: &Algebra, rng: &mut ChaCha8Rng) -> (Event, Event) {
    let mut first = Vec::new();
    let mut second = Vec::new();
    for i in 0..algebra.size() {
        match rng.gen_range(0..3) {
            0 => first.push(i),
            1 => second.push(i),
            _ => {}
        }
    }
    (algebra.event(first), algebra.event(second))
}

fn axiom_i_sampled(
    algebra: &Algebra,
    options: &VerifyOptions,
) -> Found {
    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    let k = algebra.size();
    let singletons: Vec<Event> = (0..k).map(|i| algebra.event([i])).collect();
    for h in algebra.table.class_events() {
        check_normalization(algebra, h)?;
        for i in 0..k {
            for j in i + 1..k {
                additive_at(algebra, &singletons[i], &singletons[j], h)?;
            }
        }
        for _ in 0..options.samples {
            let (first, second) = random_pair(algebra, &mut rng);
            additive_at(algebra, &first, &second, h)?;
        }
    }
    Ok(())
}

fn axiom_ii(table: &ConditionalProbabilityTable) -> Found {
    for h in table.class_events() {
        let value = table.query(h, h).ok_or_else(|| undefined(h))?;
        if value != one() {
            return Err(Box::new(Counterexample::SelfProbability {
                antecedent: h.clone(),
                value,
            }));
        }
    }
    Ok(())
}

/// Returns the number of cross-stage instances met.
fn axiom_iii(
    algebra: &Algebra,
    exhaustive: bool,
    options: &VerifyOptions,
) -> Found<usize> {
    let table = algebra.table;
    let k = algebra.size();
    let second_events: Vec<Event> = if exhaustive {
        (0..1u32 << k).map(|m| algebra.mask_event(m)).collect()
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(options.seed ^ 0x3);
        (0..k)
            .map(|i| algebra.event([i]))
            .chain((0..options.samples).map(|_| random_pair(algebra, &mut rng).0))
            .collect()
    };
    let mut cross = 0;
    for h in &table.class_x {
        for kx in &table.class_x {
            if !kx.event.is_subset(&h.event) {
                continue;
            }
            // The events E_1 with E_1H = K are K plus any part of H^c.
            let outside = h.event.complement();
            for e1 in [kx.event.clone(), kx.event.or(&outside)] {
                for e2 in &second_events {
                    let (left, right) = product_rule_sides(table, &e1, e2, &h.event)
                        .ok_or_else(|| undefined(&h.event))?;
                    if left != right {
                        return Err(Box::new(Counterexample::ProductRule {
                            first: e1,
                            second: e2.clone(),
                            antecedent: h.event.clone(),
                            left,
                            right,
                        }));
                    }
                    if h.owner != kx.owner {
                        cross += 1;
                    }
                }
            }
        }
    }
    Ok(cross)
}

pub fn check_quasi_additive(table: &ConditionalProbabilityTable) -> CheckResult {
    let class: Vec<&Event> = table.class_events().collect();
    for (a, h1) in class.iter().enumerate() {
        for h2 in &class[a..] {
            let cover = h1.or(h2);
            let found = class.iter().any(|k| {
                cover.is_subset(k)
                    && match (table.query(h1, k), table.query(h2, k)) {
                        (Some(p1), Some(p2)) => (p1 + p2).is_positive(),
                        _ => false,
                    }
            });
            if !found {
                return CheckResult::fail(Counterexample::QuasiAdditive {
                    first: (*h1).clone(),
                    second: (*h2).clone(),
                });
            }
        }
    }
    CheckResult::pass()
}

/// Outcome of the subset sweep.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleOutcome {
    pub subsets: usize,
    /// First subfamily whose system has no solution, in increasing bitmask
    /// order.
    pub failing: Option<Vec<usize>>,
}

/// Builds the system of the subfamily `members` directly from worlds:
/// variables are the signature classes inside the union of the antecedents.
fn subset_system(
    family: &[ConditionalEvent],
    bounds: &[Interval],
    members: &[usize],
) -> LinearProgram {
    let world_count = family[members[0]].antecedent.world_count();
    let mut classes: BTreeMap<Vec<u8>, ()> = BTreeMap::new();
    for w in 0..world_count {
        let sig: Vec<u8> = members
            .iter()
            .map(|&i| {
                let ce = &family[i];
                if !ce.antecedent.contains(World(w)) {
                    2
                } else if ce.consequent.contains(World(w)) {
                    1
                } else {
                    0
                }
            })
            .collect();
        if sig.iter().any(|&d| d != 2) {
            classes.insert(sig, ());
        }
    }
    let sigs: Vec<Vec<u8>> = classes.into_keys().collect();
    let names = sigs
        .iter()
        .map(|s| s.iter().map(|d| char::from(b'0' + d)).collect())
        .collect();
    let mut lp = LinearProgram::new(names);
    for (pos, &i) in members.iter().enumerate() {
        for (bound, relation) in [
            (&bounds[i].upper, Relation::Le),
            (&bounds[i].lower, Relation::Ge),
        ] {
            let row = sigs
                .iter()
                .map(|s| match s[pos] {
                    1 => one() - bound,
                    0 => -bound.clone(),
                    _ => zero(),
                })
                .collect();
            lp.push(row, relation, zero());
        }
    }
    lp.push(vec![one(); sigs.len()], Relation::Eq, one());
    lp
}

/// Solvability of the system of every non-empty subfamily.
pub fn subset_oracle(assessment: &Assessment, cap: usize) -> Result<OracleOutcome> {
    let n = assessment.len();
    if n > cap {
        return Err(Error::OracleCap { size: n, cap });
    }
    let subsets = (1usize << n) - 1;
    for mask in 1..=subsets {
        let members: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
        let lp = subset_system(&assessment.family, &assessment.bounds, &members);
        if matches!(lp::solve_feasibility(&lp)?, LpOutcome::Infeasible) {
            return Ok(OracleOutcome {
                subsets,
                failing: Some(members),
            });
        }
    }
    Ok(OracleOutcome {
        subsets,
        failing: None,
    })
}

pub fn check_coherence_oracle(
    family: &[ConditionalEvent],
    precise: &[Rational],
    cap: usize,
) -> Result<CheckResult> {
    let assessment = Assessment::precise(family.to_vec(), precise.to_vec())?;
    let outcome = subset_oracle(&assessment, cap)?;
    Ok(match outcome.failing {
        None => CheckResult::pass().with_note(format!("{} subsets solvable", outcome.subsets)),
        Some(members) => CheckResult::fail(Counterexample::Subfamily { members }),
    })
}

pub fn check_consistency(
    table: &ConditionalProbabilityTable,
    original: &Assessment,
) -> CheckResult {
    for (index, (ce, b)) in original.family.iter().zip(&original.bounds).enumerate() {
        match table.query(&ce.consequent, &ce.antecedent) {
            None => return CheckResult::fail(Counterexample::UndefinedEntry { index }),
            Some(value) if !b.contains(&value) => {
                return CheckResult::fail(Counterexample::Inconsistent { index, value })
            }
            Some(_) => {}
        }
    }
    CheckResult::pass()
}

pub fn check_cardinality(table: &ConditionalProbabilityTable, family_size: usize) -> CheckResult {
    let size = table.class_x.len();
    let bound = 2 * family_size;
    if size <= bound {
        CheckResult::pass().with_note(format!("|X| = {size} <= {bound}"))
    } else {
        CheckResult::fail(Counterexample::Cardinality { size, bound })
    }
}

/// Coherence of the table restricted to the family, by the subset oracle when
/// the family is small enough and by the level-wise check otherwise.
fn check_restriction_coherent(
    table: &ConditionalProbabilityTable,
    family: &[ConditionalEvent],
    options: &VerifyOptions,
) -> Result<CheckResult> {
    let mut values = Vec::with_capacity(family.len());
    for (index, ce) in family.iter().enumerate() {
        match table.query(&ce.consequent, &ce.antecedent) {
            Some(v) if v.is_negative() || v > one() => {
                return Ok(CheckResult::fail(Counterexample::OutOfRange { index, value: v }))
            }
            Some(v) => values.push(v),
            None => return Ok(CheckResult::fail(Counterexample::UndefinedEntry { index })),
        }
    }
    if family.len() <= options.oracle_cap {
        return check_coherence_oracle(family, &values, options.oracle_cap);
    }
    let assessment = Assessment::precise(family.to_vec(), values)?;
    let note = format!(
        "family of {} exceeds the oracle cap {}; level-wise check used",
        family.len(),
        options.oracle_cap
    );
    Ok(match check_g_coherence(&assessment)? {
        GCoherenceVerdict::Coherent { .. } => CheckResult::pass().with_note(note),
        GCoherenceVerdict::Incoherent { failing } => {
            CheckResult::fail(Counterexample::Subfamily { members: failing }).with_note(note)
        }
    })
}

/// Runs every check against the assessment the table was built for.
pub fn verify_table(
    table: &ConditionalProbabilityTable,
    original: &Assessment,
    options: &VerifyOptions,
) -> Result<VerificationReport> {
    let axioms = check_axioms(table, options);
    let mut axiom_iii = axioms.axiom_iii;
    if axioms.cross_stage_cases > 0 {
        axiom_iii = axiom_iii.with_note(format!(
            "{} cross-stage instances, both sides 0",
            axioms.cross_stage_cases
        ));
    }
    Ok(VerificationReport {
        axiom_i: axioms.axiom_i,
        axiom_ii: axioms.axiom_ii,
        axiom_iii,
        quasi_additive: check_quasi_additive(table),
        coherent: check_restriction_coherent(table, &original.family, options)?,
        consistent: check_consistency(table, original),
        cardinality_bound: check_cardinality(table, original.len()),
    })
}

impl std::fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for (name, check) in self.checks() {
            write!(f, "{name}: {}", if check.passed { "pass" } else { "FAIL" })?;
            if let Some(note) = &check.note {
                write!(f, " ({note})")?;
            }
            if let Some(c) = &check.counterexample {
                write!(f, " {}", serde_json::to_string(c).unwrap_or_default())?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}
