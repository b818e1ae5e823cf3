//! Zero-layer construction of a conditional probability with a quasi-additive
//! class of conditioning events.
//!
//! Starting from a precise coherent assessment on a family `F_0`, each stage
//! solves the stage system, splits the antecedents into those carrying
//! positive mass (`D^+`) and those carrying none (`D^z`), and defines
//! `P_i(E|H) = φ_i(EH)/φ_i(H)` for `H` in `X_i = D^+ ∪ {H_i}`. The next stage
//! runs on the conditional events conditioned on `D^z`, until that part is
//! empty. Stage masses are then pushed down to the constituents of `F_0` and
//! the stage tables merged, each conditioning event answered by the stage
//! that owns it.

use std::collections::BTreeMap;

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::event::{
    build_constituents, parent_constituent, ConditionalEvent, ConstituentSet, Event,
};
use crate::gcoherence::{build_system, distinct_antecedents, mass_form, Assessment, Normalization};
use crate::lp;
use crate::rational::Rational;

/// One step of the zero-layer sequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stage {
    pub index: usize,
    /// Positions of this stage's conditional events in the input family.
    pub members: Vec<usize>,
    pub family: Vec<ConditionalEvent>,
    pub precise: Vec<Rational>,
    pub constituents: ConstituentSet,
    /// Solution of the stage system, one mass per constituent.
    pub solution: Vec<Rational>,
    pub antecedents_zero: Vec<Event>,
    pub antecedents_positive: Vec<Event>,
    /// `D^+` followed by the union antecedent unless it already is in `D^+`.
    pub conditioning_class: Vec<Event>,
    /// Input-family positions of the members conditioned on `D^+`.
    pub family_positive: Vec<usize>,
    /// Input-family positions of the members conditioned on `D^z`.
    pub family_zero: Vec<usize>,
}

impl Stage {
    pub fn union_antecedent(&self) -> &Event {
        &self.constituents.union_antecedent
    }

    /// `φ_i(E) = Σ_{C ⊆ E} λ_C` over the stage constituents.
    pub fn phi(&self, event: &Event) -> Rational {
        self.constituents
            .constituents
            .iter()
            .zip(&self.solution)
            .filter(|(c, _)| c.worlds.is_subset(event))
            .map(|(_, m)| m.clone())
            .sum()
    }

    /// The stage table `P_i(E|H)`, defined for `H` in the conditioning class.
    pub fn probability(&self, consequent: &Event, antecedent: &Event) -> Option<Rational> {
        if !self.conditioning_class.contains(antecedent) {
            return None;
        }
        let denominator = self.phi(antecedent);
        (!denominator.is_zero()).then(|| self.phi(&consequent.and(antecedent)) / denominator)
    }
}

pub fn build_stage(
    family: &[ConditionalEvent],
    precise: &[Rational],
    index: usize,
) -> Result<Stage> {
    build_stage_with((0..family.len()).collect(), family, precise, index, None)
}

/// Builds a stage; `solution` overrides the default max-support solution and
/// must satisfy the stage system exactly.
pub fn build_stage_with(
    members: Vec<usize>,
    family: &[ConditionalEvent],
    precise: &[Rational],
    index: usize,
    solution: Option<&[Rational]>,
) -> Result<Stage> {
    if members.len() != family.len() {
        return Err(Error::Mismatch(
            "members and family differ in length".into(),
        ));
    }
    let assessment = Assessment::precise(family.to_vec(), precise.to_vec())?;
    let constituents = build_constituents(family)?;
    let system = build_system(&assessment, &constituents, &Normalization::OnUnion)?;
    let antecedents = distinct_antecedents(family);

    let solution = match solution {
        Some(given) => {
            if !system.is_satisfied_by(given) {
                return Err(Error::Structural(format!(
                    "supplied solution does not satisfy the system of stage {index}"
                )));
            }
            given.to_vec()
        }
        None => {
            let tracked: Vec<Vec<Rational>> = antecedents
                .iter()
                .map(|h| mass_form(&constituents, h))
                .collect();
            lp::max_support_solution(&system, &tracked)?.0
        }
    };

    let mut stage = Stage {
        index,
        members,
        family: family.to_vec(),
        precise: precise.to_vec(),
        constituents,
        solution,
        antecedents_zero: Vec::new(),
        antecedents_positive: Vec::new(),
        conditioning_class: Vec::new(),
        family_positive: Vec::new(),
        family_zero: Vec::new(),
    };
    for h in antecedents {
        if stage.phi(&h).is_positive() {
            stage.antecedents_positive.push(h);
        } else {
            stage.antecedents_zero.push(h);
        }
    }
    if stage.antecedents_positive.is_empty() {
        return Err(Error::Structural(format!(
            "stage {index} has no antecedent with positive mass"
        )));
    }
    stage.conditioning_class = stage.antecedents_positive.clone();
    if !stage.conditioning_class.contains(stage.union_antecedent()) {
        let union = stage.union_antecedent().clone();
        stage.conditioning_class.push(union);
    }
    for (ce, &m) in stage.family.iter().zip(&stage.members) {
        if stage.antecedents_zero.contains(&ce.antecedent) {
            stage.family_zero.push(m);
        } else {
            stage.family_positive.push(m);
        }
    }
    Ok(stage)
}

pub fn zero_layer_sequence(
    family: &[ConditionalEvent],
    precise: &[Rational],
) -> Result<Vec<Stage>> {
    zero_layer_sequence_with(family, precise, &BTreeMap::new())
}

/// Runs the stages to exhaustion. `solutions` maps stage indices to
/// user-chosen stage solutions.
pub fn zero_layer_sequence_with(
    family: &[ConditionalEvent],
    precise: &[Rational],
    solutions: &BTreeMap<usize, Vec<Rational>>,
) -> Result<Vec<Stage>> {
    if family.len() != precise.len() {
        return Err(Error::Mismatch(format!(
            "{} conditional events but {} values",
            family.len(),
            precise.len()
        )));
    }
    if let Some(&extra) = solutions.keys().find(|&&k| k >= family.len()) {
        return Err(Error::Input(format!(
            "solution given for stage {extra}, which cannot exist"
        )));
    }
    let mut stages: Vec<Stage> = Vec::new();
    let mut members: Vec<usize> = (0..family.len()).collect();
    while !members.is_empty() {
        let index = stages.len();
        let sub_family: Vec<ConditionalEvent> =
            members.iter().map(|&m| family[m].clone()).collect();
        let sub_precise: Vec<Rational> = members.iter().map(|&m| precise[m].clone()).collect();
        let stage = build_stage_with(
            members.clone(),
            &sub_family,
            &sub_precise,
            index,
            solutions.get(&index).map(Vec::as_slice),
        )?;
        debug_assert!(stage.family_zero.len() < members.len());
        members = stage.family_zero.clone();
        stages.push(stage);
    }
    if let Some(&extra) = solutions.keys().find(|&&k| k >= stages.len()) {
        return Err(Error::Input(format!(
            "solution given for stage {extra}, but only {} stages were built",
            stages.len()
        )));
    }
    Ok(stages)
}

/// Nonnegative masses on the base constituents.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MassFunction {
    pub masses: Vec<Rational>,
}

impl MassFunction {
    /// `φ(E) = Σ_{C ⊆ E} μ_C` over the base constituents.
    pub fn phi(&self, base: &ConstituentSet, event: &Event) -> Rational {
        base.constituents
            .iter()
            .zip(&self.masses)
            .filter(|(c, m)| !m.is_zero() && c.worlds.is_subset(event))
            .map(|(_, m)| m.clone())
            .sum()
    }
}

/// Pushes the stage solution down to `base`, splitting each stage
/// constituent's mass uniformly among the base constituents it contains.
pub fn extend_stage(stage: &Stage, base: &ConstituentSet) -> Result<MassFunction> {
    let parents = base
        .constituents
        .iter()
        .map(|c| parent_constituent(c, &stage.constituents))
        .collect::<Result<Vec<usize>>>()?;
    let mut children = vec![0usize; stage.constituents.len()];
    for &p in &parents {
        children[p] += 1;
    }
    if let Some(orphan) = children.iter().position(|&n| n == 0) {
        return Err(Error::Structural(format!(
            "stage constituent {} has no base refinement",
            stage.constituents.constituents[orphan].signature_string()
        )));
    }
    let masses = parents
        .iter()
        .map(|&p| &stage.solution[p] / Rational::from_integer(children[p].into()))
        .collect();
    Ok(MassFunction { masses })
}

/// A conditioning event together with the stage that answers for it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassMember {
    pub event: Event,
    pub owner: usize,
}

/// The merged conditional probability on `E_0 × X`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConditionalProbabilityTable {
    pub base: ConstituentSet,
    pub stages: Vec<Stage>,
    /// One mass function per stage, over the base constituents.
    pub masses: Vec<MassFunction>,
    pub class_x: Vec<ClassMember>,
}

impl ConditionalProbabilityTable {
    /// Assembles a table from stored parts, rejecting repeated conditioning
    /// events and dangling owners.
    pub fn from_parts(
        base: ConstituentSet,
        stages: Vec<Stage>,
        masses: Vec<MassFunction>,
        class_x: Vec<ClassMember>,
    ) -> Result<Self> {
        for m in &masses {
            if m.masses.len() != base.len() {
                return Err(Error::Mismatch(format!(
                    "mass function over {} constituents, base has {}",
                    m.masses.len(),
                    base.len()
                )));
            }
        }
        for (k, member) in class_x.iter().enumerate() {
            if member.owner >= masses.len() {
                return Err(Error::Structural(format!(
                    "conditioning event owned by missing stage {}",
                    member.owner
                )));
            }
            if let Some(prev) = class_x[..k].iter().find(|p| p.event == member.event) {
                return Err(Error::DuplicateOwner {
                    first: prev.owner,
                    second: member.owner,
                });
            }
        }
        Ok(ConditionalProbabilityTable {
            base,
            stages,
            masses,
            class_x,
        })
    }

    pub fn owner_of(&self, antecedent: &Event) -> Option<usize> {
        self.class_x
            .iter()
            .find(|m| &m.event == antecedent)
            .map(|m| m.owner)
    }

    pub fn class_events(&self) -> impl Iterator<Item = &Event> {
        self.class_x.iter().map(|m| &m.event)
    }

    pub fn query(&self, consequent: &Event, antecedent: &Event) -> Option<Rational> {
        query(self, consequent, antecedent)
    }
}

/// `P(E|H) = φ(EH, μ_r)/φ(H, μ_r)` where `r` owns `H`; `None` when `H` is
/// outside the conditioning class.
pub fn query(
    table: &ConditionalProbabilityTable,
    consequent: &Event,
    antecedent: &Event,
) -> Option<Rational> {
    let owner = table.owner_of(antecedent)?;
    let mass = &table.masses[owner];
    let denominator = mass.phi(&table.base, antecedent);
    if denominator.is_zero() {
        return None;
    }
    Some(mass.phi(&table.base, &consequent.and(antecedent)) / denominator)
}

/// Extends every stage to the base constituents and merges the stage tables.
pub fn merge(stages: Vec<Stage>, base: &ConstituentSet) -> Result<ConditionalProbabilityTable> {
    let masses = stages
        .iter()
        .map(|s| extend_stage(s, base))
        .collect::<Result<Vec<_>>>()?;
    let class_x: Vec<ClassMember> = stages
        .iter()
        .flat_map(|s| {
            s.conditioning_class.iter().map(move |h| ClassMember {
                event: h.clone(),
                owner: s.index,
            })
        })
        .collect();
    // A later-stage event never contains an earlier-stage one: the earlier
    // stage gives the later event zero mass but its own events positive mass.
    for h in &class_x {
        for k in &class_x {
            if h.owner > k.owner && k.event.is_subset(&h.event) {
                return Err(Error::Structural(format!(
                    "stage {} event contains stage {} event",
                    h.owner, k.owner
                )));
            }
        }
    }
    ConditionalProbabilityTable::from_parts(base.clone(), stages, masses, class_x)
}

/// Full construction from a precise coherent assessment.
pub fn construct(
    family: &[ConditionalEvent],
    precise: &[Rational],
    solutions: &BTreeMap<usize, Vec<Rational>>,
) -> Result<ConditionalProbabilityTable> {
    let stages = zero_layer_sequence_with(family, precise, solutions)?;
    let base = build_constituents(family)?;
    merge(stages, &base)
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

    fn p0() -> Vec<Rational> {
        vec![ratio(1, 2), int(0), ratio(1, 3)]
    }

    #[test]
    fn stage_zero() {
        let u = abcd();
        let s = build_stage(&family(&u), &p0(), 0).unwrap();
        let mut unit = vec![int(0); 8];
        unit[5] = int(1);
        assert_eq!(s.solution, unit);
        assert_eq!(
            s.antecedents_zero,
            vec![u.event("D").unwrap(), u.event("A & B").unwrap()]
        );
        assert_eq!(s.antecedents_positive, vec![u.event("A & C").unwrap()]);
        assert_eq!(
            s.conditioning_class,
            vec![
                u.event("A & C").unwrap(),
                u.event("D | A & C | A & B").unwrap()
            ]
        );
        assert_eq!(s.family_positive, vec![1]);
        assert_eq!(s.family_zero, vec![0, 2]);
        assert_eq!(
            s.probability(&u.event("B").unwrap(), &u.event("A & C").unwrap()),
            Some(int(0))
        );
        assert_eq!(
            s.probability(&u.event("B").unwrap(), &u.event("D").unwrap()),
            None
        );
    }

    #[test]
    fn stage_one_with_the_printed_solution() {
        let u = abcd();
        let f1 = vec![ce(&u, "A & B & C", "D"), ce(&u, "C", "A & B")];
        let third = ratio(1, 3);
        let given = vec![third.clone(), third.clone(), third, int(0), int(0), int(0)];
        let s = build_stage_with(
            vec![0, 2],
            &f1,
            &[ratio(1, 2), ratio(1, 3)],
            1,
            Some(&given),
        )
        .unwrap();
        assert!(s.antecedents_zero.is_empty());
        assert_eq!(
            s.conditioning_class,
            vec![
                u.event("D").unwrap(),
                u.event("A & B").unwrap(),
                u.event("D | A & B").unwrap()
            ]
        );
        assert_eq!(s.phi(&u.event("D").unwrap()), ratio(2, 3));
        assert_eq!(
            s.probability(&u.event("A & B & C").unwrap(), &u.event("D").unwrap()),
            Some(ratio(1, 2))
        );
        assert_eq!(
            s.probability(&u.event("C").unwrap(), &u.event("A & B").unwrap()),
            Some(ratio(1, 3))
        );

        // The stage-1 masses survive the push-down to the stage-0 constituents.
        let base = build_constituents(&family(&u)).unwrap();
        let mu = extend_stage(&s, &base).unwrap();
        assert_eq!(mu.phi(&base, &u.event("D").unwrap()), ratio(2, 3));
        assert_eq!(mu.phi(&base, &u.event("A & B").unwrap()), int(1));
    }

    #[test]
    fn bad_solution_override_is_rejected() {
        let u = abcd();
        let wrong = vec![
            int(1),
            int(0),
            int(0),
            int(0),
            int(0),
            int(0),
            int(0),
            int(0),
        ];
        assert!(matches!(
            build_stage_with(vec![0, 1, 2], &family(&u), &p0(), 0, Some(&wrong)),
            Err(Error::Structural(_))
        ));
    }

    #[test]
    fn single_event_stage() {
        let u = abcd();
        let s = build_stage(&[ce(&u, "A", "TRUE")], &[ratio(2, 5)], 0).unwrap();
        assert_eq!(s.conditioning_class, vec![u.everything()]);
        assert_eq!(
            s.probability(&u.event("A").unwrap(), &u.everything()),
            Some(ratio(2, 5))
        );
    }

    #[test]
    fn example_sequence_and_merge() {
        let u = abcd();
        let stages = zero_layer_sequence(&family(&u), &p0()).unwrap();
        assert_eq!(stages.len(), 2);
        assert!(stages[1].antecedents_zero.is_empty());
        assert_eq!(stages[1].members, vec![0, 2]);
        let base = build_constituents(&family(&u)).unwrap();
        let table = merge(stages, &base).unwrap();
        let events: Vec<(Event, usize)> = ["A & C", "D | A & C | A & B", "D", "A & B", "D | A & B"]
            .iter()
            .zip([0, 0, 1, 1, 1])
            .map(|(t, o)| (u.event(t).unwrap(), o))
            .collect();
        let got: Vec<(Event, usize)> = table
            .class_x
            .iter()
            .map(|m| (m.event.clone(), m.owner))
            .collect();
        assert_eq!(got, events);
        let values: Vec<Option<Rational>> = family(&u)
            .iter()
            .map(|ce| table.query(&ce.consequent, &ce.antecedent))
            .collect();
        assert_eq!(values, p0().into_iter().map(Some).collect::<Vec<_>>());
        assert_eq!(
            table.query(&u.event("A").unwrap(), &u.event("D | A & C").unwrap()),
            None
        );
        for member in &table.class_x {
            assert_eq!(table.query(&member.event, &member.event), Some(int(1)));
        }
    }

    #[test]
    fn identity_extension() {
        let u = abcd();
        let s = build_stage(&family(&u), &p0(), 0).unwrap();
        let mu = extend_stage(&s, &s.constituents).unwrap();
        assert_eq!(mu.masses, s.solution);
    }

    #[test]
    fn duplicate_owner_is_rejected() {
        let u = abcd();
        let s = build_stage(&[ce(&u, "A", "TRUE")], &[ratio(1, 2)], 0).unwrap();
        let base = s.constituents.clone();
        let mu = extend_stage(&s, &base).unwrap();
        let h = u.everything();
        let res = ConditionalProbabilityTable::from_parts(
            base,
            vec![s],
            vec![mu.clone(), mu],
            vec![
                ClassMember {
                    event: h.clone(),
                    owner: 0,
                },
                ClassMember { event: h, owner: 1 },
            ],
        );
        assert_eq!(
            res,
            Err(Error::DuplicateOwner {
                first: 0,
                second: 1
            })
        );
    }
}
