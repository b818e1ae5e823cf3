//! g-coherence of interval assessments on conditional events.
//!
//! Everything here reduces to exact feasibility and optimization problems
//! over constituent masses `λ ≥ 0`. For each conditional event `E_i|H_i`
//! with bounds `[a_i, b_i]` the system carries
//!
//! ```text
//! a_i · Σ_{C ⊆ H_i} λ_C  ≤  Σ_{C ⊆ E_i H_i} λ_C  ≤  b_i · Σ_{C ⊆ H_i} λ_C
//! ```
//!
//! plus a normalization row. Checking proceeds level by level: solve the
//! system, find the antecedents whose mass is forced to zero on every
//! solution, and recurse on the conditional events conditioned on them.

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::event::{
    build_constituents, dedup_family, ConditionalEvent, ConstituentSet, Event, FamilySlot,
};
use crate::lp::{self, Direction, LinearProgram, LpOutcome, Relation};
use crate::rational::{format_rational, one, zero, Rational};

/// A closed subinterval of `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Interval {
    pub lower: Rational,
    pub upper: Rational,
}

/// Extension bounds `[p∘, p°]` for a further conditional event.
pub type Bounds = Interval;

impl Interval {
    pub fn new(lower: Rational, upper: Rational) -> Self {
        Interval { lower, upper }
    }

    pub fn point(value: Rational) -> Self {
        Interval {
            lower: value.clone(),
            upper: value,
        }
    }

    pub fn unit() -> Self {
        Interval::new(zero(), one())
    }

    pub fn is_point(&self) -> bool {
        self.lower == self.upper
    }

    pub fn contains(&self, value: &Rational) -> bool {
        self.lower <= *value && *value <= self.upper
    }

    pub fn intersect(&self, other: &Interval) -> Option<Interval> {
        let lower = (&self.lower).max(&other.lower).clone();
        let upper = (&self.upper).min(&other.upper).clone();
        (lower <= upper).then_some(Interval { lower, upper })
    }

    pub fn midpoint(&self) -> Rational {
        (&self.lower + &self.upper) / Rational::from_integer(2.into())
    }

    /// `[1 - upper, 1 - lower]`, the bounds of the complementary event.
    pub fn complement(&self) -> Interval {
        Interval::new(one() - &self.upper, one() - &self.lower)
    }

    fn is_probability_range(&self) -> bool {
        !self.lower.is_negative() && self.lower <= self.upper && self.upper <= one()
    }
}

impl std::fmt::Display for Interval {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "[{}, {}]",
            format_rational(&self.lower),
            format_rational(&self.upper)
        )
    }
}

/// Interval-valued probability assessment on a family of conditional events.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Assessment {
    pub family: Vec<ConditionalEvent>,
    pub bounds: Vec<Interval>,
}

impl Assessment {
    pub fn new(family: Vec<ConditionalEvent>, bounds: Vec<Interval>) -> Result<Self> {
        if family.len() != bounds.len() {
            return Err(Error::Mismatch(format!(
                "{} conditional events but {} intervals",
                family.len(),
                bounds.len()
            )));
        }
        for (index, (ce, b)) in family.iter().zip(&bounds).enumerate() {
            if ce.antecedent.is_empty() {
                return Err(Error::EmptyAntecedent { index });
            }
            if !b.is_probability_range() {
                return Err(Error::InvalidInterval {
                    index,
                    lower: format_rational(&b.lower),
                    upper: format_rational(&b.upper),
                });
            }
        }
        Ok(Assessment { family, bounds })
    }

    pub fn precise(family: Vec<ConditionalEvent>, values: Vec<Rational>) -> Result<Self> {
        Self::new(family, values.into_iter().map(Interval::point).collect())
    }

    pub fn empty() -> Self {
        Assessment {
            family: Vec::new(),
            bounds: Vec::new(),
        }
    }

    /// Builds a normalized assessment from raw entries: repeated conditional
    /// events are merged by intersecting their intervals, and `E^c|H` entries
    /// are folded onto `E|H` with bounds `[1 - b, 1 - a]`.
    pub fn normalized(
        family: Vec<ConditionalEvent>,
        bounds: Vec<Interval>,
    ) -> Result<(Self, Vec<FamilySlot>)> {
        let raw = Assessment::new(family, bounds)?;
        let (kept, slots) = dedup_family(&raw.family);
        let mut merged: Vec<Option<Interval>> = vec![None; kept.len()];
        for (index, (slot, b)) in slots.iter().zip(&raw.bounds).enumerate() {
            let b = if slot.complemented {
                b.complement()
            } else {
                b.clone()
            };
            merged[slot.index] = match &merged[slot.index] {
                None => Some(b),
                Some(prev) => Some(
                    prev.intersect(&b)
                        .ok_or(Error::ConflictingDuplicates { index })?,
                ),
            };
        }
        let bounds = merged.into_iter().map(|b| b.unwrap()).collect();
        Ok((Assessment::new(kept, bounds)?, slots))
    }

    pub fn len(&self) -> usize {
        self.family.len()
    }

    pub fn is_empty(&self) -> bool {
        self.family.is_empty()
    }

    pub fn is_precise(&self) -> bool {
        self.bounds.iter().all(Interval::is_point)
    }

    /// Point values, if every interval is degenerate.
    pub fn values(&self) -> Option<Vec<Rational>> {
        self.is_precise()
            .then(|| self.bounds.iter().map(|b| b.lower.clone()).collect())
    }

    pub fn restrict(&self, indices: &[usize]) -> Assessment {
        Assessment {
            family: indices.iter().map(|&i| self.family[i].clone()).collect(),
            bounds: indices.iter().map(|&i| self.bounds[i].clone()).collect(),
        }
    }

    /// Distinct antecedents in order of first appearance.
    pub fn antecedents(&self) -> Vec<Event> {
        distinct_antecedents(&self.family)
    }
}

pub(crate) fn distinct_antecedents(family: &[ConditionalEvent]) -> Vec<Event> {
    let mut out: Vec<Event> = Vec::new();
    for ce in family {
        if !out.contains(&ce.antecedent) {
            out.push(ce.antecedent.clone());
        }
    }
    out
}

/// Normalization row appended to the homogeneous constraints.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Normalization {
    /// `Σ_C λ_C = Σ_{C ⊆ H} λ_C = 1` with `H` the union of the antecedents.
    OnUnion,
    /// `Σ_{C ⊆ K} λ_C = 1`.
    OnEvent(Event),
    None,
}

/// Name of the LP variable attached to a constituent.
pub fn variable_name(signature: &str) -> String {
    format!("lambda_{signature}")
}

/// Mass form `Σ_{C ⊆ event} λ_C` as a coefficient vector over `cs`.
pub fn mass_form(cs: &ConstituentSet, event: &Event) -> Vec<Rational> {
    cs.membership(event)
        .into_iter()
        .map(|inside| if inside { one() } else { zero() })
        .collect()
}

/// Builds the constraint system of `assessment` over the constituents `cs`.
///
/// `cs` must come from a family that starts with `assessment.family`; any
/// extra trailing members only refine the variables.
pub fn build_system(
    assessment: &Assessment,
    cs: &ConstituentSet,
    normalization: &Normalization,
) -> Result<LinearProgram> {
    if cs.family.len() < assessment.len() || cs.family[..assessment.len()] != assessment.family[..]
    {
        return Err(Error::Mismatch(
            "constituents were not built from this family".into(),
        ));
    }
    let variables = cs
        .constituents
        .iter()
        .map(|c| variable_name(&c.signature_string()))
        .collect();
    let mut lp = LinearProgram::new(variables);
    for (ce, b) in assessment.family.iter().zip(&assessment.bounds) {
        let verified = cs.membership(&ce.verified());
        let given = cs.membership(&ce.antecedent);
        let row = |p: &Rational| -> Vec<Rational> {
            verified
                .iter()
                .zip(&given)
                .map(|(&v, &h)| {
                    let mut a = if v { one() } else { zero() };
                    if h {
                        a -= p;
                    }
                    a
                })
                .collect()
        };
        if b.is_point() {
            lp.push(row(&b.lower), Relation::Eq, zero());
        } else {
            lp.push(row(&b.upper), Relation::Le, zero());
            lp.push(row(&b.lower), Relation::Ge, zero());
        }
    }
    match normalization {
        Normalization::OnUnion => {
            lp.push(mass_form(cs, &cs.union_antecedent), Relation::Eq, one());
            lp.push(vec![one(); cs.len()], Relation::Eq, one());
        }
        Normalization::OnEvent(k) => lp.push(mass_form(cs, k), Relation::Eq, one()),
        Normalization::None => {}
    }
    Ok(lp)
}

/// Antecedents whose mass vanishes on every solution (`forced_zero`) versus
/// those that some solution makes positive.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZeroSet {
    pub forced_zero: Vec<Event>,
    pub positive_capable: Vec<Event>,
}

impl ZeroSet {
    pub fn is_forced_zero(&self, event: &Event) -> bool {
        self.forced_zero.contains(event)
    }
}

/// One solved level of the g-coherence check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Level {
    /// Indices into the checked assessment.
    pub members: Vec<usize>,
    /// Max-support solution over the constituents of the members.
    pub witness: Vec<Rational>,
    pub zero_set: ZeroSet,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GCoherenceVerdict {
    Coherent { levels: Vec<Level> },
    Incoherent { failing: Vec<usize> },
}

impl GCoherenceVerdict {
    pub fn is_g_coherent(&self) -> bool {
        matches!(self, GCoherenceVerdict::Coherent { .. })
    }

    /// Re-checks every level witness by exact substitution.
    pub fn certificate_holds(&self, assessment: &Assessment) -> bool {
        match self {
            GCoherenceVerdict::Incoherent { .. } => false,
            GCoherenceVerdict::Coherent { levels } => levels.iter().all(|level| {
                let sub = assessment.restrict(&level.members);
                build_constituents(&sub.family)
                    .and_then(|cs| build_system(&sub, &cs, &Normalization::OnUnion))
                    .map(|lp| lp.is_satisfied_by(&level.witness))
                    .unwrap_or(false)
            }),
        }
    }
}

/// Solves the normalized system of `assessment` with a max-support witness.
/// Returns `None` when the system is infeasible.
fn solve_level(assessment: &Assessment) -> Result<Option<(Vec<Rational>, ZeroSet)>> {
    let cs = build_constituents(&assessment.family)?;
    let system = build_system(assessment, &cs, &Normalization::OnUnion)?;
    let antecedents = assessment.antecedents();
    let tracked: Vec<Vec<Rational>> = antecedents.iter().map(|h| mass_form(&cs, h)).collect();
    match lp::max_support_solution(&system, &tracked) {
        Ok((witness, flags)) => {
            let mut zero_set = ZeroSet {
                forced_zero: Vec::new(),
                positive_capable: Vec::new(),
            };
            for (h, positive) in antecedents.into_iter().zip(flags) {
                if positive {
                    zero_set.positive_capable.push(h);
                } else {
                    zero_set.forced_zero.push(h);
                }
            }
            Ok(Some((witness, zero_set)))
        }
        Err(Error::Infeasible) => Ok(None),
        Err(e) => Err(e),
    }
}

/// Partition of the antecedents into forced-zero and positive-capable ones,
/// each decided by an exact maximization of its mass.
pub fn compute_zero_set(assessment: &Assessment) -> Result<ZeroSet> {
    if assessment.is_empty() {
        return Ok(ZeroSet {
            forced_zero: Vec::new(),
            positive_capable: Vec::new(),
        });
    }
    solve_level(assessment)?
        .map(|(_, z)| z)
        .ok_or(Error::Infeasible)
}

pub fn check_g_coherence(assessment: &Assessment) -> Result<GCoherenceVerdict> {
    let mut current: Vec<usize> = (0..assessment.len()).collect();
    let mut levels = Vec::new();
    while !current.is_empty() {
        let sub = assessment.restrict(&current);
        let Some((witness, zero_set)) = solve_level(&sub)? else {
            return Ok(GCoherenceVerdict::Incoherent { failing: current });
        };
        let next: Vec<usize> = current
            .iter()
            .copied()
            .filter(|&i| zero_set.is_forced_zero(&assessment.family[i].antecedent))
            .collect();
        levels.push(Level {
            members: current,
            witness,
            zero_set,
        });
        current = next;
    }
    Ok(GCoherenceVerdict::Coherent { levels })
}

fn require_coherent(assessment: &Assessment) -> Result<Vec<Level>> {
    match check_g_coherence(assessment)? {
        GCoherenceVerdict::Coherent { levels } => Ok(levels),
        GCoherenceVerdict::Incoherent { failing } => Err(Error::NotGCoherent { failing }),
    }
}

/// The interval `[p∘, p°]` of values for `target` that keep the assessment
/// g-coherent.
pub fn propagate_bounds(assessment: &Assessment, target: &ConditionalEvent) -> Result<Bounds> {
    if target.antecedent.is_empty() {
        return Err(Error::EmptyAntecedent {
            index: assessment.len(),
        });
    }
    let levels = require_coherent(assessment)?;
    bounds_over_levels(assessment, &levels, target)
}

fn bounds_over_levels(
    assessment: &Assessment,
    levels: &[Level],
    target: &ConditionalEvent,
) -> Result<Bounds> {
    // The g-coherence levels are exactly the successive forced-zero
    // reductions; once they are exhausted only the target remains.
    let candidates = levels
        .iter()
        .map(|l| l.members.as_slice())
        .chain(std::iter::once(&[][..]));
    for members in candidates {
        let sub = assessment.restrict(members);
        let mut family = sub.family.clone();
        family.push(target.clone());
        let cs = build_constituents(&family)?;
        let system = build_system(
            &sub,
            &cs,
            &Normalization::OnEvent(target.antecedent.clone()),
        )?;
        let objective = mass_form(&cs, &target.verified());
        match lp::optimize(&system, &objective, Direction::Minimize)? {
            LpOutcome::Optimal { value: low, .. } => {
                let high = match lp::optimize(&system, &objective, Direction::Maximize)? {
                    LpOutcome::Optimal { value, .. } => value,
                    other => {
                        return Err(Error::Structural(format!(
                            "bounded program turned {other:?} under maximization"
                        )))
                    }
                };
                return Ok(Interval::new(low, high));
            }
            LpOutcome::Infeasible => continue,
            other => {
                return Err(Error::Structural(format!(
                    "mass of a normalized event is unbounded: {other:?}"
                )))
            }
        }
    }
    Err(Error::Structural(
        "target system infeasible without constraints".into(),
    ))
}

/// Propagated bounds for every member of the family, before intersection
/// with the assessed intervals.
pub fn propagated_bounds(assessment: &Assessment) -> Result<Vec<Bounds>> {
    let levels = require_coherent(assessment)?;
    assessment
        .family
        .iter()
        .map(|ce| bounds_over_levels(assessment, &levels, ce))
        .collect()
}

/// Least-committal correction: every interval is replaced by its propagated
/// bounds intersected with the original interval.
pub fn correct_assessment(assessment: &Assessment) -> Result<Assessment> {
    let raw = propagated_bounds(assessment)?;
    let bounds = raw
        .iter()
        .zip(&assessment.bounds)
        .enumerate()
        .map(|(index, (p, b))| {
            p.intersect(b).ok_or_else(|| {
                Error::Structural(format!(
                    "propagated bounds {p} miss the interval {b} of #{index}"
                ))
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Assessment::new(assessment.family.clone(), bounds)
}

/// Picks a precise coherent assessment inside the given intervals by fixing
/// each conditional event in turn at the midpoint of its current bounds.
pub fn select_precise(assessment: &Assessment) -> Result<Assessment> {
    let corrected = correct_assessment(assessment)?;
    let mut working = corrected.clone();
    for j in 0..working.len() {
        let bounds = propagate_bounds(&working, &working.family[j])?;
        let allowed = bounds
            .intersect(&corrected.bounds[j])
            .and_then(|b| b.intersect(&assessment.bounds[j]))
            .ok_or_else(|| Error::Structural(format!("no admissible value for #{j}")))?;
        working.bounds[j] = Interval::point(allowed.midpoint());
    }
    Ok(working)
}

/// Accepts user-supplied point values if they lie inside the intervals and
/// form a coherent assessment.
pub fn validate_precise(assessment: &Assessment, values: &[Rational]) -> Result<Assessment> {
    if values.len() != assessment.len() {
        return Err(Error::InvalidPrecise(format!(
            "{} values for {} conditional events",
            values.len(),
            assessment.len()
        )));
    }
    for (i, (v, b)) in values.iter().zip(&assessment.bounds).enumerate() {
        if !b.contains(v) {
            return Err(Error::InvalidPrecise(format!(
                "value {} for #{i} lies outside {b}",
                format_rational(v)
            )));
        }
    }
    let precise = Assessment::precise(assessment.family.clone(), values.to_vec())?;
    require_coherent(&precise)?;
    Ok(precise)
}

/// Rescales a solution of the union-normalized system over all constituents
/// to one supported on the constituents inside the union antecedent.
pub fn rescale_to_union(cs: &ConstituentSet, witness: &[Rational]) -> Option<Vec<Rational>> {
    let inside = cs.membership(&cs.union_antecedent);
    let total: Rational = witness
        .iter()
        .zip(&inside)
        .filter(|(_, i)| **i)
        .map(|(w, _)| w.clone())
        .sum();
    if total.is_zero() {
        return None;
    }
    Some(
        witness
            .iter()
            .zip(&inside)
            .filter(|(_, i)| **i)
            .map(|(w, _)| w / &total)
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::event::Universe;
    use crate::rational::{int, ratio};

    fn abcd() -> Universe {
        Universe::new(&["A", "B", "C", "D"]).unwrap()
    }

    fn ce(u: &Universe, e: &str, h: &str) -> ConditionalEvent {
        ConditionalEvent::new(u.event(e).unwrap(), u.event(h).unwrap())
    }

    fn family(u: &Universe) -> Vec<ConditionalEvent> {
        vec![
            ce(u, "A & B & C", "D"),
            ce(u, "B", "A & C"),
            ce(u, "C", "A & B"),
        ]
    }

    fn example_interval(u: &Universe) -> Assessment {
        Assessment::new(
            family(u),
            vec![
                Interval::new(ratio(1, 2), int(1)),
                Interval::new(int(0), ratio(1, 2)),
                Interval::new(ratio(1, 3), ratio(2, 3)),
            ],
        )
        .unwrap()
    }

    #[test]
    fn stage_zero_system_matches_the_printed_one() {
        let u = abcd();
        let a = Assessment::precise(family(&u), vec![ratio(1, 2), int(0), ratio(1, 3)]).unwrap();
        let cs = build_constituents(&a.family).unwrap();
        let lp = build_system(&a, &cs, &Normalization::OnUnion).unwrap();
        let r = |v: &[i64]| v.iter().map(|&x| int(x)).collect::<Vec<_>>();
        let h = ratio(1, 2);
        let t = ratio(1, 3);
        // λ3 = 1/2 (λ1 + λ3 + λ5 + λ7)
        assert_eq!(
            lp.constraints[0].coefficients,
            vec![-&h, int(0), one() - &h, int(0), -&h, int(0), -&h, int(0)]
        );
        // λ3 + λ4 = 0 (λ3 + λ4 + λ5 + λ6)
        assert_eq!(lp.constraints[1].coefficients, r(&[0, 0, 1, 1, 0, 0, 0, 0]));
        // λ3 + λ4 = 1/3 (λ1 + λ2 + λ3 + λ4)
        assert_eq!(
            lp.constraints[2].coefficients,
            vec![
                -&t,
                -&t,
                one() - &t,
                one() - &t,
                int(0),
                int(0),
                int(0),
                int(0)
            ]
        );
        assert_eq!(lp.constraints[3].coefficients, r(&[1, 1, 1, 1, 1, 1, 1, 0]));
        assert_eq!(lp.constraints[4].coefficients, r(&[1; 8]));
        assert!(lp.constraints.iter().all(|c| c.relation == Relation::Eq));
        assert_eq!(lp.constraints.len(), 5);
    }

    #[test]
    fn vacuous_single_event_system() {
        let u = abcd();
        let a = Assessment::new(vec![ce(&u, "A", "TRUE")], vec![Interval::unit()]).unwrap();
        let cs = build_constituents(&a.family).unwrap();
        let lp = build_system(&a, &cs, &Normalization::OnUnion).unwrap();
        assert_eq!(lp.constraints.len(), 4);
        for x in [
            vec![int(1), int(0)],
            vec![int(0), int(1)],
            vec![ratio(1, 2), ratio(1, 2)],
        ] {
            assert!(lp.is_satisfied_by(&x));
        }
    }

    #[test]
    fn system_mismatch_is_reported() {
        let u = abcd();
        let a = example_interval(&u);
        let other = build_constituents(&[ce(&u, "A", "B")]).unwrap();
        assert!(matches!(
            build_system(&a, &other, &Normalization::None),
            Err(Error::Mismatch(_))
        ));
    }

    #[test]
    fn zero_sets_of_the_two_stages() {
        let u = abcd();
        let p0 = Assessment::precise(family(&u), vec![ratio(1, 2), int(0), ratio(1, 3)]).unwrap();
        let z = compute_zero_set(&p0).unwrap();
        assert_eq!(
            z.forced_zero,
            vec![u.event("D").unwrap(), u.event("A & B").unwrap()]
        );
        assert_eq!(z.positive_capable, vec![u.event("A & C").unwrap()]);

        let p1 = Assessment::precise(
            vec![ce(&u, "A & B & C", "D"), ce(&u, "C", "A & B")],
            vec![ratio(1, 2), ratio(1, 3)],
        )
        .unwrap();
        assert!(compute_zero_set(&p1).unwrap().forced_zero.is_empty());
    }

    #[test]
    fn example_interval_assessment_is_g_coherent() {
        let u = abcd();
        let a = example_interval(&u);
        let verdict = check_g_coherence(&a).unwrap();
        assert!(verdict.is_g_coherent());
        assert!(verdict.certificate_holds(&a));
    }

    #[test]
    fn sure_event_below_one_is_incoherent() {
        let u = abcd();
        let a = Assessment::new(
            vec![ce(&u, "TRUE", "TRUE")],
            vec![Interval::new(int(0), ratio(1, 2))],
        )
        .unwrap();
        assert_eq!(
            check_g_coherence(&a).unwrap(),
            GCoherenceVerdict::Incoherent { failing: vec![0] }
        );
        assert!(matches!(
            propagate_bounds(&a, &ce(&u, "A", "B")),
            Err(Error::NotGCoherent { .. })
        ));
    }

    #[test]
    fn simple_bounds() {
        let u = abcd();
        let point = Assessment::precise(vec![ce(&u, "A & B & C", "D")], vec![ratio(1, 2)]).unwrap();
        assert_eq!(
            propagate_bounds(&point, &ce(&u, "A & B & C", "D")).unwrap(),
            Interval::point(ratio(1, 2))
        );
        let empty = Assessment::empty();
        assert_eq!(
            propagate_bounds(&empty, &ce(&u, "B", "A & C")).unwrap(),
            Interval::unit()
        );
        assert_eq!(
            propagate_bounds(&empty, &ce(&u, "A", "A & B")).unwrap(),
            Interval::point(int(1))
        );
        assert_eq!(
            propagate_bounds(&empty, &ce(&u, "~A", "A & B")).unwrap(),
            Interval::point(int(0))
        );
        assert_eq!(
            propagate_bounds(&empty, &ce(&u, "A", "A & ~A")),
            Err(Error::EmptyAntecedent { index: 0 })
        );
    }

    #[test]
    fn example_interval_is_its_own_correction() {
        let u = abcd();
        let a = example_interval(&u);
        assert_eq!(propagated_bounds(&a).unwrap(), a.bounds);
        assert_eq!(correct_assessment(&a).unwrap(), a);
    }

    #[test]
    fn disjoint_events_bound_each_other() {
        // P(A) <= 1/4 and P(A | B) = 3/4 with A, B disjoint force P(B) = 3/4 - P(A)
        let u = Universe::new(&["A", "B"]).unwrap();
        let a = Assessment::new(
            vec![ce(&u, "A", "TRUE"), ce(&u, "A | B", "TRUE")],
            vec![
                Interval::new(int(0), ratio(1, 4)),
                Interval::point(ratio(3, 4)),
            ],
        )
        .unwrap();
        assert!(check_g_coherence(&a).unwrap().is_g_coherent());
        assert_eq!(
            propagate_bounds(&a, &ce(&u, "B", "TRUE")).unwrap(),
            Interval::new(ratio(1, 2), ratio(3, 4))
        );
        assert_eq!(correct_assessment(&a).unwrap(), a);
    }

    #[test]
    fn precise_selection() {
        let u = abcd();
        let a = example_interval(&u);
        let p = select_precise(&a).unwrap();
        assert!(p.is_precise());
        for (pb, ab) in p.bounds.iter().zip(&a.bounds) {
            assert!(ab.contains(&pb.lower));
        }
        assert!(check_g_coherence(&p).unwrap().is_g_coherent());
        assert_eq!(select_precise(&p).unwrap(), p);

        let chosen = validate_precise(&a, &[ratio(1, 2), int(0), ratio(1, 3)]).unwrap();
        assert_eq!(
            chosen.values().unwrap(),
            vec![ratio(1, 2), int(0), ratio(1, 3)]
        );
        assert!(matches!(
            validate_precise(&a, &[ratio(1, 4), int(0), ratio(1, 3)]),
            Err(Error::InvalidPrecise(_))
        ));
    }

    #[test]
    fn normalization_merges_duplicates() {
        let u = abcd();
        let (a, slots) = Assessment::normalized(
            vec![ce(&u, "A", "B"), ce(&u, "~A", "B"), ce(&u, "A & B", "B")],
            vec![
                Interval::new(int(0), ratio(3, 4)),
                Interval::new(int(0), ratio(3, 4)),
                Interval::new(int(0), ratio(1, 2)),
            ],
        )
        .unwrap();
        assert_eq!(a.len(), 1);
        assert_eq!(a.bounds[0], Interval::new(ratio(1, 4), ratio(1, 2)));
        assert!(slots[1].complemented);
        assert_eq!(
            Assessment::normalized(
                vec![ce(&u, "A", "B"), ce(&u, "A", "B")],
                vec![Interval::point(int(0)), Interval::point(int(1))],
            ),
            Err(Error::ConflictingDuplicates { index: 1 })
        );
    }

    #[test]
    fn invalid_intervals() {
        let u = abcd();
        assert!(matches!(
            Assessment::new(
                vec![ce(&u, "A", "B")],
                vec![Interval::new(ratio(2, 3), ratio(1, 3))]
            ),
            Err(Error::InvalidInterval { index: 0, .. })
        ));
        assert!(matches!(
            Assessment::new(vec![ce(&u, "A", "B")], vec![Interval::new(int(0), int(2))]),
            Err(Error::InvalidInterval { .. })
        ));
        assert_eq!(
            Assessment::new(vec![ce(&u, "A", "B & ~B")], vec![Interval::unit()]),
            Err(Error::EmptyAntecedent { index: 0 })
        );
    }
}
