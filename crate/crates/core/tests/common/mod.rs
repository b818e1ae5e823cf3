//! Seeded generators shared by the integration tests.

#![allow(dead_code)]

use coherent_conditional::event::Universe;
use coherent_conditional::gcoherence::{Assessment, Interval};
use coherent_conditional::rational::{format_rational, ratio, Rational};
use coherent_conditional::{ConditionalEvent, Event};
use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub use rand::SeedableRng;
pub type TestRng = ChaCha8Rng;

pub fn rng(seed: u64) -> TestRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn universe(atoms: usize) -> Universe {
    let names: Vec<String> = (0..atoms)
        .map(|i| ((b'A' + i as u8) as char).to_string())
        .collect();
    Universe::new(&names).unwrap()
}

/// A random formula in disjunctive normal form, sometimes a constant.
pub fn random_expr(rng: &mut TestRng, u: &Universe) -> String {
    if rng.gen_ratio(1, 12) {
        return "TRUE".into();
    }
    let atoms = u.atoms();
    let terms = rng.gen_range(1..=2);
    (0..terms)
        .map(|_| {
            let mut chosen: Vec<&String> = atoms.iter().collect();
            chosen.shuffle(rng);
            chosen.truncate(rng.gen_range(1..=atoms.len()));
            chosen
                .iter()
                .map(|a| {
                    if rng.gen_bool(0.3) {
                        format!("~{a}")
                    } else {
                        a.to_string()
                    }
                })
                .collect::<Vec<_>>()
                .join(" & ")
        })
        .collect::<Vec<_>>()
        .join(" | ")
}

/// Random conditional events with possible antecedents.
pub fn random_family(rng: &mut TestRng, u: &Universe, n: usize) -> Vec<(String, String)> {
    let mut out = Vec::new();
    while out.len() < n {
        let h = random_expr(rng, u);
        if u.event(&h).unwrap().is_empty() {
            continue;
        }
        out.push((random_expr(rng, u), h));
    }
    out
}

pub fn extend(u: &Universe, texts: &[(String, String)]) -> Vec<ConditionalEvent> {
    texts
        .iter()
        .map(|(e, h)| ConditionalEvent::new(u.event(e).unwrap(), u.event(h).unwrap()))
        .collect()
}

/// A lexicographic sequence of world weightings; the last layer is
/// strictly positive, so every possible event is conditioned on by some layer.
pub struct Layered {
    layers: Vec<Vec<u32>>,
}

impl Layered {
    pub fn random(rng: &mut TestRng, worlds: usize) -> Self {
        let depth = rng.gen_range(1..=3);
        let mut layers: Vec<Vec<u32>> = (1..depth)
            .map(|_| {
                (0..worlds)
                    .map(|_| {
                        if rng.gen_bool(0.5) {
                            0
                        } else {
                            rng.gen_range(1..=4)
                        }
                    })
                    .collect()
            })
            .collect();
        layers.push((0..worlds).map(|_| rng.gen_range(1..=4)).collect());
        Layered { layers }
    }

    /// `P(E|H)` from the first layer giving `H` positive weight.
    pub fn conditional(&self, e: &Event, h: &Event) -> Rational {
        for layer in &self.layers {
            let weight = |ev: &Event| -> u64 { ev.worlds().map(|w| layer[w] as u64).sum() };
            let wh = weight(h);
            if wh > 0 {
                return ratio(weight(&e.and(h)) as i64, wh as i64);
            }
        }
        panic!("antecedent without weight")
    }

    pub fn assess(&self, family: &[ConditionalEvent]) -> Vec<Rational> {
        family
            .iter()
            .map(|c| self.conditional(&c.consequent, &c.antecedent))
            .collect()
    }
}

const GRID: [(i64, i64); 7] = [(0, 1), (1, 4), (1, 3), (1, 2), (2, 3), (3, 4), (1, 1)];

pub fn grid_value(rng: &mut TestRng) -> Rational {
    let (n, d) = *GRID.choose(rng).unwrap();
    ratio(n, d)
}

/// An interval containing `p`, sometimes degenerate.
pub fn widen(rng: &mut TestRng, p: &Rational) -> Interval {
    let step = |rng: &mut TestRng| {
        if rng.gen_bool(0.3) {
            Rational::zero()
        } else {
            ratio(rng.gen_range(1..=4), rng.gen_range(4..=8))
        }
    };
    let lower = (p - step(rng)).max(Rational::zero());
    let upper = (p + step(rng)).min(Rational::one());
    Interval::new(lower, upper)
}

pub fn random_interval(rng: &mut TestRng) -> Interval {
    let (a, b) = (grid_value(rng), grid_value(rng));
    if a <= b {
        Interval::new(a, b)
    } else {
        Interval::new(b, a)
    }
}

/// A g-coherent interval assessment: random intervals around a coherent point.
pub fn coherent_instance(
    rng: &mut TestRng,
    atoms: usize,
    n: usize,
) -> (Universe, Vec<(String, String)>, Assessment) {
    let u = universe(atoms);
    let texts = random_family(rng, &u, n);
    let family = extend(&u, &texts);
    let point = Layered::random(rng, u.world_count()).assess(&family);
    let bounds = point.iter().map(|p| widen(rng, p)).collect();
    let a = Assessment::new(family, bounds).unwrap();
    (u, texts, a)
}

/// An assessment of no particular coherence status.
pub fn arbitrary_instance(rng: &mut TestRng, atoms: usize, n: usize) -> Assessment {
    let u = universe(atoms);
    let family = extend(&u, &random_family(rng, &u, n));
    let bounds = if rng.gen_bool(0.4) {
        let point = Layered::random(rng, u.world_count()).assess(&family);
        point
            .iter()
            .map(|p| {
                if rng.gen_bool(0.3) {
                    random_interval(rng)
                } else {
                    widen(rng, p)
                }
            })
            .collect()
    } else {
        (0..n).map(|_| random_interval(rng)).collect()
    };
    Assessment::new(family, bounds).unwrap()
}

/// Writes an assessment file for `texts` with the given intervals.
pub fn document(u: &Universe, texts: &[(String, String)], bounds: &[Interval]) -> String {
    let mut out = format!("atoms {}\n", u.atoms().join(" "));
    for ((e, h), b) in texts.iter().zip(bounds) {
        if b.is_point() {
            out += &format!(
                "assess \"{e}\" given \"{h}\" = {}\n",
                format_rational(&b.lower)
            );
        } else {
            out += &format!("assess \"{e}\" given \"{h}\" in {b}\n");
        }
    }
    out
}
