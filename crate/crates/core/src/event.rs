//! Propositional events over a finite set of atoms.
//!
//! Events are represented extensionally, as sets of atomic worlds. A world
//! over `m` atoms is an index in `0..2^m` whose bit `j` is the truth value of
//! atom `j`. Every conditional-event family induces a partition of the worlds
//! into constituents, one per non-empty ternary signature class.

use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};

/// Default upper bound on the number of declared atoms (2^20 worlds).
pub const DEFAULT_WORLD_CAP: usize = 20;

/// The declared atoms of a problem instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Universe {
    atoms: Vec<String>,
}

impl Universe {
    pub fn new<S: AsRef<str>>(atoms: &[S]) -> Result<Self> {
        Self::with_cap(atoms, DEFAULT_WORLD_CAP)
    }

    pub fn with_cap<S: AsRef<str>>(atoms: &[S], cap: usize) -> Result<Self> {
        if atoms.len() > cap {
            return Err(Error::WorldCap {
                atoms: atoms.len(),
                cap,
            });
        }
        let mut names: Vec<String> = Vec::with_capacity(atoms.len());
        for atom in atoms {
            let name = atom.as_ref();
            if !is_atom_name(name) {
                return Err(Error::InvalidAtom(name.to_string()));
            }
            if names.iter().any(|n| n == name) {
                return Err(Error::DuplicateAtom(name.to_string()));
            }
            names.push(name.to_string());
        }
        Ok(Universe { atoms: names })
    }

    pub fn atoms(&self) -> &[String] {
        &self.atoms
    }

    pub fn atom_index(&self, name: &str) -> Option<usize> {
        self.atoms.iter().position(|a| a == name)
    }

    pub fn world_count(&self) -> usize {
        1usize << self.atoms.len()
    }

    pub fn worlds(&self) -> impl Iterator<Item = World> {
        (0..self.world_count()).map(World)
    }

    pub fn parse(&self, text: &str) -> Result<EventExpr> {
        parse_event(text, self)
    }

    /// Parses `text` and returns its extension.
    pub fn event(&self, text: &str) -> Result<Event> {
        Ok(extension(&self.parse(text)?, self))
    }

    pub fn everything(&self) -> Event {
        Event::full(self.world_count())
    }

    pub fn nothing(&self) -> Event {
        Event::empty(self.world_count())
    }
}

fn is_atom_name(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() => {}
        _ => return false,
    }
    if !chars.all(|c| c.is_ascii_alphanumeric() || c == '_') {
        return false;
    }
    name != "TRUE" && name != "FALSE"
}

/// A total truth assignment, encoded as a world index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct World(pub usize);

impl World {
    pub fn holds(self, atom: usize) -> bool {
        (self.0 >> atom) & 1 == 1
    }
}

/// Parse tree of a propositional formula. Atoms are indices into the universe.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EventExpr {
    True,
    False,
    Atom(usize),
    Not(Box<EventExpr>),
    And(Vec<EventExpr>),
    Or(Vec<EventExpr>),
}

impl EventExpr {
    /// Renders the expression with the atom names of `universe`.
    pub fn display<'a>(&'a self, universe: &'a Universe) -> impl fmt::Display + 'a {
        ExprDisplay {
            expr: self,
            universe,
        }
    }
}

struct ExprDisplay<'a> {
    expr: &'a EventExpr,
    universe: &'a Universe,
}

impl ExprDisplay<'_> {
    fn write(&self, f: &mut fmt::Formatter<'_>, expr: &EventExpr, parent: u8) -> fmt::Result {
        // precedence: or = 1, and = 2, unary = 3
        match expr {
            EventExpr::True => write!(f, "TRUE"),
            EventExpr::False => write!(f, "FALSE"),
            EventExpr::Atom(i) => write!(f, "{}", self.universe.atoms[*i]),
            EventExpr::Not(inner) => {
                write!(f, "~")?;
                self.write(f, inner, 3)
            }
            EventExpr::And(items) | EventExpr::Or(items) => {
                let (prec, sep) = match expr {
                    EventExpr::And(_) => (2, " & "),
                    _ => (1, " | "),
                };
                if parent > prec {
                    write!(f, "(")?;
                }
                for (k, item) in items.iter().enumerate() {
                    if k > 0 {
                        write!(f, "{sep}")?;
                    }
                    self.write(f, item, prec + 1)?;
                }
                if parent > prec {
                    write!(f, ")")?;
                }
                Ok(())
            }
        }
    }
}

impl fmt::Display for ExprDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write(f, self.expr, 0)
    }
}

/// Parses an event expression.
///
/// ```text
/// expr  := or
/// or    := and ('|' and)*
/// and   := unary ('&' unary)*
/// unary := '~' unary | '(' expr ')' | 'TRUE' | 'FALSE' | atom
/// ```
pub fn parse_event(text: &str, universe: &Universe) -> Result<EventExpr> {
    let mut parser = Parser {
        src: text.as_bytes(),
        pos: 0,
        universe,
    };
    let expr = parser.or()?;
    parser.skip_ws();
    if parser.pos < parser.src.len() {
        return Err(parser.error("unexpected trailing input"));
    }
    Ok(expr)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    universe: &'a Universe,
}

impl Parser<'_> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn error(&self, message: &str) -> Error {
        Error::Syntax {
            position: self.pos,
            message: message.to_string(),
        }
    }

    fn or(&mut self) -> Result<EventExpr> {
        let mut items = vec![self.and()?];
        while self.peek() == Some(b'|') {
            self.pos += 1;
            items.push(self.and()?);
        }
        Ok(if items.len() == 1 {
            items.pop().unwrap()
        } else {
            EventExpr::Or(items)
        })
    }

    fn and(&mut self) -> Result<EventExpr> {
        let mut items = vec![self.unary()?];
        while self.peek() == Some(b'&') {
            self.pos += 1;
            items.push(self.unary()?);
        }
        Ok(if items.len() == 1 {
            items.pop().unwrap()
        } else {
            EventExpr::And(items)
        })
    }

    fn unary(&mut self) -> Result<EventExpr> {
        match self.peek() {
            Some(b'~') => {
                self.pos += 1;
                Ok(EventExpr::Not(Box::new(self.unary()?)))
            }
            Some(b'(') => {
                self.pos += 1;
                let inner = self.or()?;
                if self.peek() != Some(b')') {
                    return Err(self.error("expected `)`"));
                }
                self.pos += 1;
                Ok(inner)
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                while self.pos < self.src.len()
                    && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
                {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                match name {
                    "TRUE" => Ok(EventExpr::True),
                    "FALSE" => Ok(EventExpr::False),
                    _ => self
                        .universe
                        .atom_index(name)
                        .map(EventExpr::Atom)
                        .ok_or_else(|| Error::UndeclaredAtom(name.to_string())),
                }
            }
            Some(_) => Err(self.error("expected an atom, `~`, `(`, TRUE or FALSE")),
            None => Err(self.error("unexpected end of input")),
        }
    }
}

pub fn evaluate(expr: &EventExpr, world: World) -> bool {
    match expr {
        EventExpr::True => true,
        EventExpr::False => false,
        EventExpr::Atom(i) => world.holds(*i),
        EventExpr::Not(inner) => !evaluate(inner, world),
        EventExpr::And(items) => items.iter().all(|e| evaluate(e, world)),
        EventExpr::Or(items) => items.iter().any(|e| evaluate(e, world)),
    }
}

/// The set of worlds satisfying `expr`.
pub fn extension(expr: &EventExpr, universe: &Universe) -> Event {
    let mut event = universe.nothing();
    for world in universe.worlds() {
        if evaluate(expr, world) {
            event.insert(world);
        }
    }
    event
}

/// A set of worlds.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Event {
    world_count: usize,
    bits: Vec<u64>,
}

impl Event {
    pub fn empty(world_count: usize) -> Self {
        Event {
            world_count,
            bits: vec![0; world_count.div_ceil(64)],
        }
    }

    pub fn full(world_count: usize) -> Self {
        let mut e = Self::empty(world_count);
        for w in 0..world_count {
            e.insert(World(w));
        }
        e
    }

    pub fn from_worlds<I: IntoIterator<Item = usize>>(world_count: usize, worlds: I) -> Self {
        let mut e = Self::empty(world_count);
        for w in worlds {
            assert!(w < world_count, "world {w} out of range");
            e.insert(World(w));
        }
        e
    }

    pub fn world_count(&self) -> usize {
        self.world_count
    }

    pub fn insert(&mut self, world: World) {
        self.bits[world.0 / 64] |= 1 << (world.0 % 64);
    }

    pub fn contains(&self, world: World) -> bool {
        (self.bits[world.0 / 64] >> (world.0 % 64)) & 1 == 1
    }

    pub fn is_empty(&self) -> bool {
        self.bits.iter().all(|b| *b == 0)
    }

    pub fn len(&self) -> usize {
        self.bits.iter().map(|b| b.count_ones() as usize).sum()
    }

    pub fn worlds(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.world_count).filter(|w| self.contains(World(*w)))
    }

    pub fn is_subset(&self, other: &Event) -> bool {
        self.check(other);
        self.bits.iter().zip(&other.bits).all(|(a, b)| a & !b == 0)
    }

    pub fn intersects(&self, other: &Event) -> bool {
        self.check(other);
        self.bits.iter().zip(&other.bits).any(|(a, b)| a & b != 0)
    }

    pub fn and(&self, other: &Event) -> Event {
        self.zip(other, |a, b| a & b)
    }

    pub fn or(&self, other: &Event) -> Event {
        self.zip(other, |a, b| a | b)
    }

    pub fn minus(&self, other: &Event) -> Event {
        self.zip(other, |a, b| a & !b)
    }

    pub fn complement(&self) -> Event {
        Event::full(self.world_count).minus(self)
    }

    fn zip(&self, other: &Event, op: impl Fn(u64, u64) -> u64) -> Event {
        self.check(other);
        Event {
            world_count: self.world_count,
            bits: self
                .bits
                .iter()
                .zip(&other.bits)
                .map(|(a, b)| op(*a, *b))
                .collect(),
        }
    }

    fn check(&self, other: &Event) {
        assert_eq!(
            self.world_count, other.world_count,
            "events over different universes"
        );
    }
}

impl serde::Serialize for Event {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(self.worlds())
    }
}

impl fmt::Debug for Event {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.worlds()).finish()
    }
}

/// `E|H`: true on `EH`, false on `E^c H`, void on `H^c`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ConditionalEvent {
    pub consequent: Event,
    pub antecedent: Event,
}

impl ConditionalEvent {
    pub fn new(consequent: Event, antecedent: Event) -> Self {
        ConditionalEvent {
            consequent,
            antecedent,
        }
    }

    /// `EH`, the worlds where the conditional event is true.
    pub fn verified(&self) -> Event {
        self.consequent.and(&self.antecedent)
    }

    /// `E^c H`, the worlds where the conditional event is false.
    pub fn falsified(&self) -> Event {
        self.antecedent.minus(&self.consequent)
    }

    /// Identity of the conditional event as a three-valued entity.
    pub fn key(&self) -> (Event, Event) {
        (self.verified(), self.antecedent.clone())
    }

    fn digit(&self, world: World) -> u8 {
        if !self.antecedent.contains(world) {
            2
        } else if self.consequent.contains(world) {
            1
        } else {
            0
        }
    }
}

/// A non-empty class of worlds sharing one ternary signature.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Constituent {
    /// One digit per conditional event, in family order: 1 for `E_iH_i`,
    /// 0 for `E_i^c H_i`, 2 for `H_i^c`.
    pub signature: Vec<u8>,
    pub worlds: Event,
}

impl Constituent {
    /// Ternary digits most significant first, i.e. the base-3 numeral of
    /// [`Constituent::index`].
    pub fn signature_string(&self) -> String {
        self.signature
            .iter()
            .rev()
            .map(|d| char::from(b'0' + d))
            .collect()
    }

    /// `r = sum_i digit_i * 3^(i-1)`; saturates for families longer than 80.
    pub fn index(&self) -> u128 {
        self.signature.iter().rev().fold(0u128, |acc, d| {
            acc.saturating_mul(3).saturating_add(*d as u128)
        })
    }
}

/// The constituents of a conditional-event family, ordered by ascending `r`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstituentSet {
    pub family: Vec<ConditionalEvent>,
    pub constituents: Vec<Constituent>,
    /// Disjunction of all antecedents.
    pub union_antecedent: Event,
}

pub fn build_constituents(family: &[ConditionalEvent]) -> Result<ConstituentSet> {
    let first = family.first().ok_or(Error::EmptyFamily)?;
    let world_count = first.antecedent.world_count();
    for (index, ce) in family.iter().enumerate() {
        if ce.antecedent.world_count() != world_count || ce.consequent.world_count() != world_count
        {
            return Err(Error::Mismatch(format!(
                "conditional event #{index} lives in a different universe"
            )));
        }
        if ce.antecedent.is_empty() {
            return Err(Error::EmptyAntecedent { index });
        }
    }

    let mut classes: HashMap<Vec<u8>, Event> = HashMap::new();
    let mut signature = vec![0u8; family.len()];
    for w in 0..world_count {
        let world = World(w);
        for (slot, ce) in signature.iter_mut().zip(family) {
            *slot = ce.digit(world);
        }
        match classes.get_mut(&signature) {
            Some(event) => event.insert(world),
            None => {
                let mut event = Event::empty(world_count);
                event.insert(world);
                classes.insert(signature.clone(), event);
            }
        }
    }

    let mut constituents: Vec<Constituent> = classes
        .into_iter()
        .map(|(signature, worlds)| Constituent { signature, worlds })
        .collect();
    constituents.sort_by(|a, b| a.signature.iter().rev().cmp(b.signature.iter().rev()));

    let union_antecedent = family
        .iter()
        .fold(Event::empty(world_count), |acc, ce| acc.or(&ce.antecedent));
    Ok(ConstituentSet {
        family: family.to_vec(),
        constituents,
        union_antecedent,
    })
}

impl ConstituentSet {
    pub fn len(&self) -> usize {
        self.constituents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.constituents.is_empty()
    }

    pub fn world_count(&self) -> usize {
        self.union_antecedent.world_count()
    }

    /// Indices of the constituents contained in `event`.
    pub fn indices_within(&self, event: &Event) -> Vec<usize> {
        self.constituents
            .iter()
            .enumerate()
            .filter(|(_, c)| c.worlds.is_subset(event))
            .map(|(i, _)| i)
            .collect()
    }

    /// Indicator vector of [`ConstituentSet::indices_within`].
    pub fn membership(&self, event: &Event) -> Vec<bool> {
        self.constituents
            .iter()
            .map(|c| c.worlds.is_subset(event))
            .collect()
    }

    /// Union of the constituents selected by `indices`.
    pub fn union_of<I: IntoIterator<Item = usize>>(&self, indices: I) -> Event {
        indices
            .into_iter()
            .fold(Event::empty(self.world_count()), |acc, i| {
                acc.or(&self.constituents[i].worlds)
            })
    }

    pub fn position_of_signature(&self, signature: &str) -> Option<usize> {
        self.constituents
            .iter()
            .position(|c| c.signature_string() == signature)
    }
}

/// `C(E)`: the constituents contained in `event`.
pub fn constituents_of<'a>(event: &Event, cs: &'a ConstituentSet) -> Vec<&'a Constituent> {
    cs.constituents
        .iter()
        .filter(|c| c.worlds.is_subset(event))
        .collect()
}

/// Index of the unique constituent of `sub` containing `child`.
///
/// `sub` must come from a subfamily of the family that produced `child`, so
/// that its partition is coarser.
pub fn parent_constituent(child: &Constituent, sub: &ConstituentSet) -> Result<usize> {
    let mut parents = sub
        .constituents
        .iter()
        .enumerate()
        .filter(|(_, c)| child.worlds.is_subset(&c.worlds))
        .map(|(i, _)| i);
    match (parents.next(), parents.next()) {
        (Some(i), None) => Ok(i),
        (None, _) => Err(Error::Structural(format!(
            "constituent {} has no parent",
            child.signature_string()
        ))),
        (Some(_), Some(_)) => Err(Error::Structural(format!(
            "constituent {} has several parents",
            child.signature_string()
        ))),
    }
}

/// How an entry of a family maps onto its normalized form.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FamilySlot {
    pub index: usize,
    /// The entry is `E^c|H` for the normalized `E|H`.
    pub complemented: bool,
}

/// Removes repeated conditional events, identifying `E|H` with every `E'|H`
/// where `E'H = EH`, and folding `E^c|H` onto `E|H`.
pub fn dedup_family(family: &[ConditionalEvent]) -> (Vec<ConditionalEvent>, Vec<FamilySlot>) {
    let mut kept: Vec<ConditionalEvent> = Vec::new();
    let mut keys: HashMap<(Event, Event), usize> = HashMap::new();
    let mut slots = Vec::with_capacity(family.len());
    for ce in family {
        if let Some(&index) = keys.get(&ce.key()) {
            slots.push(FamilySlot {
                index,
                complemented: false,
            });
        } else if let Some(&index) = keys.get(&(ce.falsified(), ce.antecedent.clone())) {
            slots.push(FamilySlot {
                index,
                complemented: true,
            });
        } else {
            keys.insert(ce.key(), kept.len());
            slots.push(FamilySlot {
                index: kept.len(),
                complemented: false,
            });
            kept.push(ce.clone());
        }
    }
    (kept, slots)
}
