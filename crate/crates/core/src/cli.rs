//! Command implementations behind the `ccp` binary.
//!
//! Every command takes file contents and returns an [`Outcome`] holding the
//! exit code and the text to print, so the commands can be tested without a
//! process boundary.
//!
//! Assessment files are line oriented:
//!
//! ```text
//! atoms A B C D
//! set world_cap 20            # optional
//! set oracle_cap 12           # optional
//! assess "A&B&C" given "D" in [1/2, 1]
//! assess "B" given "A&C" = 0
//! precise 1/2 0 1/3           # optional, one value per assess line
//! solution 1 1/3 1/3 1/3 0 0 0  # optional stage solution override
//! ```

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::construction::{ClassMember, ConditionalProbabilityTable, MassFunction, Stage};
use crate::error::{Error, Result};
use crate::event::{
    build_constituents, ConditionalEvent, Event, FamilySlot, Universe, DEFAULT_WORLD_CAP,
};
use crate::gcoherence::{
    check_g_coherence, correct_assessment, propagate_bounds, propagated_bounds,
};
use crate::gcoherence::{variable_name, Assessment, GCoherenceVerdict, Interval};
use crate::lp::{self, LpRecord};
use crate::pipeline::{synthesize, Synthesis, SynthesisOptions};
use crate::rational::{format_rational, one, parse_rational, serde_text, Rational};
use crate::verify::{verify_table, VerificationReport, VerifyOptions};

pub const EXIT_OK: i32 = 0;
/// Not g-coherent, rejected override, or failed verification.
pub const EXIT_REJECTED: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub exit_code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Outcome {
            exit_code: EXIT_OK,
            stdout,
            stderr: String::new(),
        }
    }

    fn from_error(e: &Error) -> Self {
        Outcome {
            exit_code: exit_code_for(e),
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
        }
    }
}

pub fn exit_code_for(e: &Error) -> i32 {
    match e {
        Error::NotGCoherent { .. }
        | Error::ConflictingDuplicates { .. }
        | Error::InvalidPrecise(_)
        | Error::Infeasible
        | Error::Structural(_)
        | Error::DuplicateOwner { .. }
        | Error::MalformedProgram(_) => EXIT_REJECTED,
        _ => EXIT_INPUT,
    }
}

/// One `assess` line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Entry {
    pub consequent: String,
    pub antecedent: String,
    pub bounds: Interval,
    pub line: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AssessmentDocument {
    pub atoms: Vec<String>,
    pub entries: Vec<Entry>,
    pub world_cap: usize,
    pub oracle_cap: usize,
    /// One value per entry.
    pub precise: Option<Vec<Rational>>,
    pub solutions: BTreeMap<usize, Vec<Rational>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Token {
    Word(String),
    Quoted(String),
    Punct(char),
}

fn tokenize(line: &str) -> std::result::Result<Vec<Token>, String> {
    let mut tokens = Vec::new();
    let mut chars = line.char_indices().peekable();
    while let Some(&(start, c)) = chars.peek() {
        match c {
            '#' => break,
            c if c.is_whitespace() => {
                chars.next();
            }
            '[' | ']' | ',' | '=' => {
                tokens.push(Token::Punct(c));
                chars.next();
            }
            '"' => {
                chars.next();
                let mut text = String::new();
                loop {
                    match chars.next() {
                        Some((_, '"')) => break,
                        Some((_, ch)) => text.push(ch),
                        None => return Err(format!("unterminated quote at column {}", start + 1)),
                    }
                }
                tokens.push(Token::Quoted(text));
            }
            _ => {
                let mut word = String::new();
                while let Some(&(_, ch)) = chars.peek() {
                    if ch.is_whitespace() || matches!(ch, '[' | ']' | ',' | '=' | '"' | '#') {
                        break;
                    }
                    word.push(ch);
                    chars.next();
                }
                tokens.push(Token::Word(word));
            }
        }
    }
    Ok(tokens)
}

fn rationals(tokens: &[Token]) -> std::result::Result<Vec<Rational>, String> {
    tokens
        .iter()
        .filter(|t| **t != Token::Punct(','))
        .map(|t| match t {
            Token::Word(w) => parse_rational(w).map_err(|e| e.to_string()),
            other => Err(format!("expected a rational, found {other:?}")),
        })
        .collect()
}

fn parse_assess(tokens: &[Token], line: usize) -> std::result::Result<Entry, String> {
    let word = |t: Option<&Token>| match t {
        Some(Token::Word(w)) => Some(w.clone()),
        _ => None,
    };
    let (Some(Token::Quoted(consequent)), Some("given"), Some(Token::Quoted(antecedent))) = (
        tokens.first(),
        word(tokens.get(1)).as_deref(),
        tokens.get(2),
    ) else {
        return Err("expected assess \"<expr>\" given \"<expr>\" ...".into());
    };
    let rat = |t: Option<&Token>| -> std::result::Result<Rational, String> {
        let w = word(t).ok_or("expected a rational")?;
        parse_rational(&w).map_err(|e| e.to_string())
    };
    let bounds = match &tokens[3..] {
        [Token::Punct('='), _] => Interval::point(rat(tokens.get(4))?),
        [Token::Word(w), Token::Punct('['), _, Token::Punct(','), _, Token::Punct(']')]
            if w == "in" =>
        {
            Interval::new(rat(tokens.get(5))?, rat(tokens.get(7))?)
        }
        _ => return Err("expected `in [<a>, <b>]` or `= <p>`".into()),
    };
    Ok(Entry {
        consequent: consequent.trim().to_string(),
        antecedent: antecedent.trim().to_string(),
        bounds,
        line,
    })
}

impl AssessmentDocument {
    pub fn parse(text: &str) -> Result<Self> {
        let mut doc = AssessmentDocument {
            atoms: Vec::new(),
            entries: Vec::new(),
            world_cap: DEFAULT_WORLD_CAP,
            oracle_cap: VerifyOptions::default().oracle_cap,
            precise: None,
            solutions: BTreeMap::new(),
        };
        let mut seen_atoms = false;
        for (k, raw) in text.lines().enumerate() {
            let line = k + 1;
            let at = |msg: String| Error::Input(format!("line {line}: {msg}"));
            let tokens = tokenize(raw).map_err(at)?;
            let Some(Token::Word(keyword)) = tokens.first() else {
                if tokens.is_empty() {
                    continue;
                }
                return Err(at("expected a keyword".into()));
            };
            let rest = &tokens[1..];
            match keyword.as_str() {
                "atoms" => {
                    if seen_atoms {
                        return Err(at("atoms declared twice".into()));
                    }
                    seen_atoms = true;
                    for t in rest {
                        match t {
                            Token::Word(w) => doc.atoms.push(w.clone()),
                            other => return Err(at(format!("unexpected {other:?}"))),
                        }
                    }
                }
                "set" => {
                    let value = match rest.get(1) {
                        Some(Token::Word(w)) if rest.len() == 2 => w
                            .parse::<usize>()
                            .map_err(|_| at(format!("invalid count `{w}`")))?,
                        _ => return Err(at("expected `set <name> <count>`".into())),
                    };
                    match &rest[0] {
                        Token::Word(n) if n == "world_cap" => doc.world_cap = value,
                        Token::Word(n) if n == "oracle_cap" => doc.oracle_cap = value,
                        other => return Err(at(format!("unknown setting {other:?}"))),
                    }
                }
                "assess" => {
                    if !seen_atoms {
                        return Err(at("assess before atoms".into()));
                    }
                    doc.entries.push(parse_assess(rest, line).map_err(at)?);
                }
                "precise" => doc.precise = Some(rationals(rest).map_err(at)?),
                "solution" => {
                    let stage = match rest.first() {
                        Some(Token::Word(w)) => w
                            .parse::<usize>()
                            .map_err(|_| at(format!("invalid stage `{w}`")))?,
                        _ => return Err(at("expected `solution <stage> <values>`".into())),
                    };
                    let values = rationals(&rest[1..]).map_err(at)?;
                    if doc.solutions.insert(stage, values).is_some() {
                        return Err(at(format!("second solution for stage {stage}")));
                    }
                }
                other => return Err(at(format!("unknown keyword `{other}`"))),
            }
        }
        if !seen_atoms {
            return Err(Error::Input("missing `atoms` line".into()));
        }
        Ok(doc)
    }

    pub fn universe(&self) -> Result<Universe> {
        Universe::with_cap(&self.atoms, self.world_cap)
    }

    /// Extends every entry and normalizes the family.
    pub fn resolve(&self) -> Result<Resolved> {
        let universe = self.universe()?;
        let mut family = Vec::with_capacity(self.entries.len());
        for entry in &self.entries {
            let at = |e: Error| Error::Input(format!("line {}: {e}", entry.line));
            let consequent = universe.event(&entry.consequent).map_err(at)?;
            let antecedent = universe.event(&entry.antecedent).map_err(at)?;
            family.push(ConditionalEvent::new(consequent, antecedent));
        }
        let bounds = self.entries.iter().map(|e| e.bounds.clone()).collect();
        let (assessment, slots) = Assessment::normalized(family, bounds).map_err(|e| match e {
            Error::EmptyAntecedent { index } => {
                Error::Input(format!("line {}: {e}", self.entries[index].line))
            }
            Error::InvalidInterval { index, .. } => {
                Error::Input(format!("line {}: {e}", self.entries[index].line))
            }
            other => other,
        })?;
        let mut texts = vec![None; assessment.len()];
        for (entry, slot) in self.entries.iter().zip(&slots) {
            texts[slot.index].get_or_insert((entry.consequent.clone(), entry.antecedent.clone()));
        }
        Ok(Resolved {
            universe,
            assessment,
            slots,
            texts: texts.into_iter().map(Option::unwrap).collect(),
        })
    }
}

/// A parsed document after extension and deduplication.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub universe: Universe,
    pub assessment: Assessment,
    /// Where each document entry landed in the normalized family.
    pub slots: Vec<FamilySlot>,
    /// Source text of each normalized conditional event.
    pub texts: Vec<(String, String)>,
}

impl Resolved {
    /// Maps one value per document entry onto the normalized family.
    pub fn fold_precise(&self, values: &[Rational]) -> Result<Vec<Rational>> {
        if values.len() != self.slots.len() {
            return Err(Error::InvalidPrecise(format!(
                "{} values for {} assess lines",
                values.len(),
                self.slots.len()
            )));
        }
        let mut folded: Vec<Option<Rational>> = vec![None; self.assessment.len()];
        for (k, (slot, v)) in self.slots.iter().zip(values).enumerate() {
            let v = if slot.complemented {
                one() - v
            } else {
                v.clone()
            };
            match &folded[slot.index] {
                Some(prev) if *prev != v => {
                    return Err(Error::InvalidPrecise(format!(
                        "value #{k} disagrees with an earlier entry for the same conditional event"
                    )))
                }
                _ => folded[slot.index] = Some(v),
            }
        }
        Ok(folded.into_iter().map(Option::unwrap).collect())
    }

    fn entry_text(&self, i: usize) -> String {
        format!("\"{}\" given \"{}\"", self.texts[i].0, self.texts[i].1)
    }
}

fn interval_text(b: &Interval) -> String {
    if b.is_point() {
        format!("= {}", format_rational(&b.lower))
    } else {
        format!("in {b}")
    }
}

fn run(f: impl FnOnce() -> Result<Outcome>) -> Outcome {
    f().unwrap_or_else(|e| Outcome::from_error(&e))
}

pub fn cmd_check(text: &str) -> Outcome {
    run(|| {
        let doc = AssessmentDocument::parse(text)?;
        let resolved = match doc.resolve() {
            Err(Error::ConflictingDuplicates { index }) => {
                return Ok(Outcome {
                    exit_code: EXIT_REJECTED,
                    stdout: format!(
                        "not g-coherent\nline {}: interval disjoint from an earlier entry for the same conditional event\n",
                        doc.entries[index].line
                    ),
                    stderr: String::new(),
                })
            }
            other => other?,
        };
        let assessment = &resolved.assessment;
        let mut out = String::new();
        match check_g_coherence(assessment)? {
            GCoherenceVerdict::Coherent { levels } => {
                writeln!(out, "g-coherent").unwrap();
                for (k, level) in levels.iter().enumerate() {
                    let sub = assessment.restrict(&level.members);
                    let cs = build_constituents(&sub.family)?;
                    writeln!(out, "level {k}: members {:?}", level.members).unwrap();
                    let masses: Vec<String> = cs
                        .constituents
                        .iter()
                        .zip(&level.witness)
                        .map(|(c, m)| {
                            format!(
                                "{} = {}",
                                variable_name(&c.signature_string()),
                                format_rational(m)
                            )
                        })
                        .collect();
                    writeln!(out, "  witness: {}", masses.join(", ")).unwrap();
                    let zero: Vec<usize> = level
                        .members
                        .iter()
                        .copied()
                        .filter(|&i| {
                            level
                                .zero_set
                                .is_forced_zero(&assessment.family[i].antecedent)
                        })
                        .collect();
                    writeln!(out, "  forced-zero antecedents of members {zero:?}").unwrap();
                }
                Ok(Outcome::ok(out))
            }
            GCoherenceVerdict::Incoherent { failing } => {
                writeln!(out, "not g-coherent").unwrap();
                writeln!(out, "failing subfamily {failing:?}").unwrap();
                for &i in &failing {
                    writeln!(
                        out,
                        "  #{i}: {} {}",
                        resolved.entry_text(i),
                        interval_text(&assessment.bounds[i])
                    )
                    .unwrap();
                }
                Ok(Outcome {
                    exit_code: EXIT_REJECTED,
                    stdout: out,
                    stderr: String::new(),
                })
            }
        }
    })
}

pub fn cmd_correct(text: &str) -> Outcome {
    run(|| {
        let doc = AssessmentDocument::parse(text)?;
        let resolved = doc.resolve()?;
        let raw = propagated_bounds(&resolved.assessment)?;
        let corrected = correct_assessment(&resolved.assessment)?;
        let mut out = String::new();
        writeln!(out, "atoms {}", doc.atoms.join(" ")).unwrap();
        if doc.world_cap != DEFAULT_WORLD_CAP {
            writeln!(out, "set world_cap {}", doc.world_cap).unwrap();
        }
        for (i, (b, p)) in corrected.bounds.iter().zip(&raw).enumerate() {
            writeln!(
                out,
                "assess {} {}",
                resolved.entry_text(i),
                interval_text(b)
            )
            .unwrap();
            writeln!(out, "# propagated {p}").unwrap();
        }
        Ok(Outcome::ok(out))
    })
}

pub fn cmd_bounds(text: &str, event: &str, given: &str) -> Outcome {
    run(|| {
        let resolved = AssessmentDocument::parse(text)?.resolve()?;
        let u = &resolved.universe;
        let target = ConditionalEvent::new(u.event(event)?, u.event(given)?);
        let bounds = propagate_bounds(&resolved.assessment, &target)?;
        Ok(Outcome::ok(format!("{bounds}\n")))
    })
}

/// Reads a list of rationals, optionally after a `precise` keyword.
pub fn parse_precise_file(text: &str) -> Result<Vec<Rational>> {
    let mut values = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let at = |msg: String| Error::Input(format!("line {}: {msg}", k + 1));
        let tokens = tokenize(raw).map_err(at)?;
        let tokens = match tokens.first() {
            Some(Token::Word(w)) if w == "precise" => &tokens[1..],
            _ => &tokens[..],
        };
        values.extend(rationals(tokens).map_err(at)?);
    }
    Ok(values)
}

pub fn cmd_synthesize(text: &str, precise_file: Option<&str>, trace: bool) -> Outcome {
    run(|| {
        let doc = AssessmentDocument::parse(text)?;
        let resolved = doc.resolve()?;
        let precise = match precise_file {
            Some(p) => Some(parse_precise_file(p)?),
            None => doc.precise.clone(),
        };
        let options = SynthesisOptions {
            precise: precise.map(|v| resolved.fold_precise(&v)).transpose()?,
            solutions: doc.solutions.clone(),
            verify: VerifyOptions {
                oracle_cap: doc.oracle_cap,
                ..VerifyOptions::default()
            },
        };
        let (synthesis, records) = if trace {
            let (s, r) = lp::trace::capture(|| synthesize(&resolved.assessment, &options));
            (s?, Some(r))
        } else {
            (synthesize(&resolved.assessment, &options)?, None)
        };
        let document = result_document(&doc, &resolved, &synthesis, records);
        let mut json = serde_json::to_string_pretty(&document).expect("serializable");
        json.push('\n');
        Ok(Outcome {
            exit_code: if synthesis.report.all_passed() {
                EXIT_OK
            } else {
                EXIT_REJECTED
            },
            stdout: json,
            stderr: String::new(),
        })
    })
}

pub fn cmd_verify(result_json: &str) -> Outcome {
    run(|| {
        let (table, assessment, oracle_cap) = read_result(result_json)?;
        let options = VerifyOptions {
            oracle_cap,
            ..VerifyOptions::default()
        };
        let report = verify_table(&table, &assessment, &options)?;
        Ok(report_outcome(&report))
    })
}

fn report_outcome(report: &VerificationReport) -> Outcome {
    let passed = report.all_passed();
    Outcome {
        exit_code: if passed { EXIT_OK } else { EXIT_REJECTED },
        stdout: format!(
            "{report}{}\n",
            if passed {
                "all checks passed"
            } else {
                "verification FAILED"
            }
        ),
        stderr: String::new(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Q(#[serde(with = "serde_text")] pub Rational);

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EventDoc {
    pub expr: String,
    pub worlds: Vec<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConditionalDoc {
    pub consequent: EventDoc,
    pub antecedent: EventDoc,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IntervalDoc {
    pub lower: Q,
    pub upper: Q,
}

impl From<&Interval> for IntervalDoc {
    fn from(b: &Interval) -> Self {
        IntervalDoc {
            lower: Q(b.lower.clone()),
            upper: Q(b.upper.clone()),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CorrectedDoc {
    pub lower: Q,
    pub upper: Q,
    /// Propagated bounds before intersection with the assessed interval.
    pub propagated: IntervalDoc,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConstituentDoc {
    pub worlds: Vec<usize>,
    pub lambda: Q,
}

#[derive(Debug, Clone, Serialize)]
pub struct StageDoc {
    pub index: usize,
    pub members: Vec<usize>,
    pub union_antecedent: EventDoc,
    pub constituents: BTreeMap<String, ConstituentDoc>,
    pub antecedents_zero: Vec<EventDoc>,
    pub antecedents_positive: Vec<EventDoc>,
    pub conditioning_class: Vec<EventDoc>,
    pub family_positive: Vec<usize>,
    pub family_zero: Vec<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClassDoc {
    pub event: EventDoc,
    pub owner: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TableDoc {
    /// Base constituents by signature.
    pub constituents: BTreeMap<String, Vec<usize>>,
    /// Refined mass function of each stage, by base signature.
    pub masses: Vec<BTreeMap<String, Q>>,
    /// `P(E_i|H_i)` for each member of the family.
    pub values: Vec<Option<Q>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ResultDocument {
    pub atoms: Vec<String>,
    pub oracle_cap: usize,
    pub family: Vec<ConditionalDoc>,
    pub assessment: Vec<IntervalDoc>,
    pub corrected: Vec<CorrectedDoc>,
    pub precise: Vec<Q>,
    pub stages: Vec<StageDoc>,
    #[serde(rename = "class_X")]
    pub class_x: Vec<ClassDoc>,
    pub table: TableDoc,
    pub report: VerificationReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trace: Option<Vec<LpRecord>>,
}

/// Names derived events by their source text where one exists.
struct Namer<'a> {
    universe: &'a Universe,
    known: HashMap<Event, String>,
}

impl Namer<'_> {
    fn name(&self, e: &Event) -> String {
        if let Some(t) = self.known.get(e) {
            return t.clone();
        }
        if e.is_empty() {
            return "FALSE".into();
        }
        if e.len() == e.world_count() {
            return "TRUE".into();
        }
        let atoms = self.universe.atoms();
        e.worlds()
            .map(|w| {
                (0..atoms.len())
                    .map(|j| {
                        if w >> j & 1 == 1 {
                            atoms[j].clone()
                        } else {
                            format!("~{}", atoms[j])
                        }
                    })
                    .collect::<Vec<_>>()
                    .join("&")
            })
            .collect::<Vec<_>>()
            .join(" | ")
    }

    fn doc(&self, e: &Event) -> EventDoc {
        EventDoc {
            expr: self.name(e),
            worlds: e.worlds().collect(),
        }
    }

    /// Registers the union antecedent of a stage under the disjunction of
    /// its member antecedents' texts.
    fn learn_union(&mut self, stage: &Stage) {
        if self.known.contains_key(stage.union_antecedent()) {
            return;
        }
        let mut parts: Vec<String> = Vec::new();
        let mut seen: Vec<&Event> = Vec::new();
        for ce in &stage.family {
            if !seen.contains(&&ce.antecedent) {
                seen.push(&ce.antecedent);
                let t = self.name(&ce.antecedent);
                parts.push(if t.contains('|') { format!("({t})") } else { t });
            }
        }
        self.known
            .insert(stage.union_antecedent().clone(), parts.join(" | "));
    }
}

fn mass_map(sigs: &[String], masses: &MassFunction) -> BTreeMap<String, Q> {
    sigs.iter()
        .cloned()
        .zip(masses.masses.iter().map(|m| Q(m.clone())))
        .collect()
}

pub fn result_document(
    doc: &AssessmentDocument,
    resolved: &Resolved,
    synthesis: &Synthesis,
    trace: Option<Vec<LpRecord>>,
) -> ResultDocument {
    let assessment = &synthesis.assessment;
    let mut namer = Namer {
        universe: &resolved.universe,
        known: HashMap::new(),
    };
    for (ce, (e, h)) in assessment.family.iter().zip(&resolved.texts) {
        namer
            .known
            .entry(ce.antecedent.clone())
            .or_insert_with(|| h.clone());
        namer
            .known
            .entry(ce.consequent.clone())
            .or_insert_with(|| e.clone());
    }
    let family = assessment
        .family
        .iter()
        .zip(&resolved.texts)
        .map(|(ce, (e, h))| ConditionalDoc {
            consequent: EventDoc {
                expr: e.clone(),
                worlds: ce.consequent.worlds().collect(),
            },
            antecedent: EventDoc {
                expr: h.clone(),
                worlds: ce.antecedent.worlds().collect(),
            },
        })
        .collect();
    let table = &synthesis.table;
    for stage in &table.stages {
        namer.learn_union(stage);
    }
    let stages = table
        .stages
        .iter()
        .map(|s| StageDoc {
            index: s.index,
            members: s.members.clone(),
            union_antecedent: namer.doc(s.union_antecedent()),
            constituents: s
                .constituents
                .constituents
                .iter()
                .zip(&s.solution)
                .map(|(c, m)| {
                    (
                        c.signature_string(),
                        ConstituentDoc {
                            worlds: c.worlds.worlds().collect(),
                            lambda: Q(m.clone()),
                        },
                    )
                })
                .collect(),
            antecedents_zero: s.antecedents_zero.iter().map(|e| namer.doc(e)).collect(),
            antecedents_positive: s
                .antecedents_positive
                .iter()
                .map(|e| namer.doc(e))
                .collect(),
            conditioning_class: s.conditioning_class.iter().map(|e| namer.doc(e)).collect(),
            family_positive: s.family_positive.clone(),
            family_zero: s.family_zero.clone(),
        })
        .collect();
    let sigs: Vec<String> = table
        .base
        .constituents
        .iter()
        .map(|c| c.signature_string())
        .collect();
    let table_doc = TableDoc {
        constituents: table
            .base
            .constituents
            .iter()
            .map(|c| (c.signature_string(), c.worlds.worlds().collect()))
            .collect(),
        masses: table.masses.iter().map(|m| mass_map(&sigs, m)).collect(),
        values: assessment
            .family
            .iter()
            .map(|ce| table.query(&ce.consequent, &ce.antecedent).map(Q))
            .collect(),
    };
    ResultDocument {
        atoms: doc.atoms.clone(),
        oracle_cap: doc.oracle_cap,
        family,
        assessment: assessment.bounds.iter().map(IntervalDoc::from).collect(),
        corrected: synthesis
            .corrected
            .bounds
            .iter()
            .zip(&synthesis.propagated)
            .map(|(b, p)| CorrectedDoc {
                lower: Q(b.lower.clone()),
                upper: Q(b.upper.clone()),
                propagated: p.into(),
            })
            .collect(),
        precise: synthesis
            .precise
            .bounds
            .iter()
            .map(|b| Q(b.lower.clone()))
            .collect(),
        stages,
        class_x: table
            .class_x
            .iter()
            .map(|m| ClassDoc {
                event: namer.doc(&m.event),
                owner: m.owner,
            })
            .collect(),
        table: table_doc,
        report: synthesis.report.clone(),
        trace,
    }
}

/// The parts of a result document that verification needs.
#[derive(Debug, Deserialize)]
struct StoredResult {
    atoms: Vec<String>,
    #[serde(default = "default_oracle_cap")]
    oracle_cap: usize,
    family: Vec<ConditionalDoc>,
    assessment: Vec<IntervalDoc>,
    #[serde(rename = "class_X")]
    class_x: Vec<ClassDoc>,
    table: TableDoc,
}

fn default_oracle_cap() -> usize {
    VerifyOptions::default().oracle_cap
}

/// Rebuilds the table and the assessment stored in a result document.
pub fn read_result(json: &str) -> Result<(ConditionalProbabilityTable, Assessment, usize)> {
    let stored: StoredResult =
        serde_json::from_str(json).map_err(|e| Error::Input(format!("result document: {e}")))?;
    let universe = Universe::with_cap(&stored.atoms, stored.atoms.len().max(DEFAULT_WORLD_CAP))?;
    let n = universe.world_count();
    let to_event = |d: &EventDoc| -> Result<Event> {
        if let Some(&w) = d.worlds.iter().find(|&&w| w >= n) {
            return Err(Error::Input(format!("world {w} out of range")));
        }
        Ok(Event::from_worlds(n, d.worlds.iter().copied()))
    };
    let mut family = Vec::new();
    for (i, c) in stored.family.iter().enumerate() {
        let consequent = to_event(&c.consequent)?;
        let antecedent = to_event(&c.antecedent)?;
        // The expression text must still denote the stored worlds.
        if universe.event(&c.antecedent.expr)? != antecedent
            || universe.event(&c.consequent.expr)?.and(&antecedent) != consequent.and(&antecedent)
        {
            return Err(Error::Input(format!(
                "family #{i}: expression and worlds disagree"
            )));
        }
        family.push(ConditionalEvent::new(consequent, antecedent));
    }
    let bounds = stored
        .assessment
        .iter()
        .map(|b| Interval::new(b.lower.0.clone(), b.upper.0.clone()))
        .collect();
    let assessment = Assessment::new(family, bounds)?;
    let base = build_constituents(&assessment.family)?;
    let stored_base: BTreeMap<String, Vec<usize>> = base
        .constituents
        .iter()
        .map(|c| (c.signature_string(), c.worlds.worlds().collect()))
        .collect();
    if stored_base != stored.table.constituents {
        return Err(Error::Mismatch(
            "stored constituents differ from the family's".into(),
        ));
    }
    let masses = stored
        .table
        .masses
        .iter()
        .enumerate()
        .map(|(r, m)| {
            base.constituents
                .iter()
                .map(|c| {
                    m.get(&c.signature_string())
                        .map(|q| q.0.clone())
                        .ok_or_else(|| {
                            Error::Input(format!(
                                "stage {r} has no mass for {}",
                                c.signature_string()
                            ))
                        })
                })
                .collect::<Result<Vec<_>>>()
                .map(|masses| MassFunction { masses })
        })
        .collect::<Result<Vec<_>>>()?;
    let class_x = stored
        .class_x
        .iter()
        .map(|c| {
            Ok(ClassMember {
                event: to_event(&c.event)?,
                owner: c.owner,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let table = ConditionalProbabilityTable::from_parts(base, Vec::new(), masses, class_x)?;
    Ok((table, assessment, stored.oracle_cap))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    const EXAMPLE: &str = r#"
# three conditional events over four atoms
atoms A B C D
assess "A & B & C" given "D" in [1/2, 1]
assess "B" given "A & C" in [0, 1/2]
assess "C" given "A & B" in [1/3, 2/3]
"#;

    #[test]
    fn parses_the_example() {
        let doc = AssessmentDocument::parse(EXAMPLE).unwrap();
        assert_eq!(doc.atoms, ["A", "B", "C", "D"]);
        assert_eq!(doc.entries.len(), 3);
        assert_eq!(
            doc.entries[2].bounds,
            Interval::new(ratio(1, 3), ratio(2, 3))
        );
        assert_eq!(doc.entries[2].line, 6);
    }

    #[test]
    fn point_entries_and_options() {
        let doc = AssessmentDocument::parse(
            "set world_cap 4\natoms A B\nassess \"A\" given \"B\" = 0.25 # note\nprecise 1/4\nsolution 0 1 0\n",
        )
        .unwrap();
        assert_eq!(doc.world_cap, 4);
        assert_eq!(doc.entries[0].bounds, Interval::point(ratio(1, 4)));
        assert_eq!(doc.precise, Some(vec![ratio(1, 4)]));
        assert_eq!(doc.solutions[&0], vec![int(1), int(0)]);
    }

    #[test]
    fn errors_carry_line_numbers() {
        for (text, needle) in [
            ("atoms A\nassess \"A\" given \"A\" in [0, 1/0]", "line 2"),
            ("atoms A\nassess \"A\" given \"B\" = 1", "line 2"),
            ("atoms A\n\nassess \"A\" given \"A\" in [1, 0]", "line 3"),
            ("atoms A\nassess \"A given \"A\" = 1", "line 2"),
            ("atoms A\nfrobnicate", "line 2"),
            ("assess \"A\" given \"A\" = 1", "line 1"),
        ] {
            let err = AssessmentDocument::parse(text)
                .and_then(|d| d.resolve())
                .unwrap_err();
            assert!(err.to_string().contains(needle), "{text}: {err}");
        }
    }

    #[test]
    fn check_exit_codes() {
        assert_eq!(cmd_check(EXAMPLE).exit_code, EXIT_OK);
        assert!(cmd_check(EXAMPLE).stdout.starts_with("g-coherent\n"));
        let sure = "atoms A\nassess \"TRUE\" given \"TRUE\" in [0, 1/2]\n";
        assert_eq!(cmd_check(sure).exit_code, EXIT_REJECTED);
        let clash =
            "atoms A\nassess \"A\" given \"TRUE\" = 1/3\nassess \"~A\" given \"TRUE\" = 1/3\n";
        assert_eq!(cmd_check(clash).exit_code, EXIT_REJECTED);
        let bad = "atoms A\nassess \"A\" given \"TRUE\" in [0, 1/0]\n";
        assert_eq!(cmd_check(bad).exit_code, EXIT_INPUT);
    }

    #[test]
    fn correct_keeps_the_example() {
        let out = cmd_correct(EXAMPLE);
        assert_eq!(out.exit_code, EXIT_OK);
        let again = AssessmentDocument::parse(&out.stdout)
            .unwrap()
            .resolve()
            .unwrap();
        let first = AssessmentDocument::parse(EXAMPLE)
            .unwrap()
            .resolve()
            .unwrap();
        assert_eq!(again.assessment, first.assessment);
        assert!(out.stdout.contains("# propagated"));
    }

    #[test]
    fn bounds_on_empty_assessment() {
        let out = cmd_bounds("atoms A B\n", "A", "B");
        assert_eq!(out.stdout, "[0, 1]\n");
    }

    #[test]
    fn complemented_duplicates_fold_precise_values() {
        let text =
            "atoms A B\nassess \"A\" given \"B\" in [0, 1]\nassess \"~A\" given \"B\" in [0, 1]\n";
        let resolved = AssessmentDocument::parse(text).unwrap().resolve().unwrap();
        assert_eq!(resolved.assessment.len(), 1);
        assert_eq!(
            resolved.fold_precise(&[ratio(1, 3), ratio(2, 3)]).unwrap(),
            vec![ratio(1, 3)]
        );
        assert!(resolved.fold_precise(&[ratio(1, 3), ratio(1, 3)]).is_err());
    }

    #[test]
    fn synthesize_then_verify() {
        let out = cmd_synthesize(EXAMPLE, Some("1/2 0 1/3"), false);
        assert_eq!(out.exit_code, EXIT_OK, "{}", out.stderr);
        let verified = cmd_verify(&out.stdout);
        assert_eq!(verified.exit_code, EXIT_OK, "{}", verified.stdout);
    }

    #[test]
    fn precise_outside_interval_is_rejected() {
        let out = cmd_synthesize(EXAMPLE, Some("1/4 0 1/3"), false);
        assert_eq!(out.exit_code, EXIT_REJECTED);
    }
}
