//! Draws a random precise assessment from a layered distribution and checks
//! that the synthesized table reproduces every value.

use coherent_conditional::event::ConditionalEvent;
use coherent_conditional::gcoherence::{Assessment, Interval};
use coherent_conditional::pipeline::{synthesize, SynthesisOptions};
use coherent_conditional::rational::{ratio, Rational};
use coherent_conditional::Universe;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> coherent_conditional::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let u = Universe::new(&["A", "B", "C"])?;
    // Two layers: a positive one on a few worlds, then the uniform one.
    let first: Vec<Rational> = (0..8)
        .map(|_| if rng.gen_bool(0.4) { ratio(rng.gen_range(1..4), 1) } else { ratio(0, 1) })
        .collect();
    let texts = [("A", "B"), ("B & C", "A | C"), ("C", "~A & ~B")];
    let mut family = Vec::new();
    let mut values = Vec::new();
    for (e, h) in texts {
        let ce = ConditionalEvent::new(u.event(e)?, u.event(h)?);
        let mass = |ev: &coherent_conditional::Event| ev.worlds().map(|w| first[w].clone()).sum::<Rational>();
        let (num, den) = (mass(&ce.verified()), mass(&ce.antecedent));
        let p = if den > ratio(0, 1) {
            num / den
        } else {
            ratio(ce.verified().len() as i64, ce.antecedent.len() as i64)
        };
        println!("P({e} | {h}) = {p}");
        family.push(ce);
        values.push(Interval::point(p));
    }
    let a = Assessment::new(family, values)?;
    let s = synthesize(&a, &SynthesisOptions::default())?;
    for (ce, b) in a.family.iter().zip(&a.bounds) {
        assert_eq!(s.table.query(&ce.consequent, &ce.antecedent).as_ref(), Some(&b.lower));
    }
    println!("{} stages, all values reproduced, report passed: {}", s.table.stages.len(), s.report.all_passed());
    Ok(())
}
