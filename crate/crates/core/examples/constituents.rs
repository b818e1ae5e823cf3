//! Parses the three conditional events of the running example and lists
//! their constituents.

use coherent_conditional::event::{build_constituents, ConditionalEvent};
use coherent_conditional::Universe;

fn main() -> coherent_conditional::Result<()> {
    let u = Universe::new(&["A", "B", "C", "D"])?;
    let ce = |e: &str, h: &str| -> coherent_conditional::Result<ConditionalEvent> {
        Ok(ConditionalEvent::new(u.event(e)?, u.event(h)?))
    };
    let family = vec![ce("A & B & C", "D")?, ce("B", "A & C")?, ce("C", "A & B")?];
    let cs = build_constituents(&family)?;
    for c in &cs.constituents {
        let worlds: Vec<usize> = c.worlds.worlds().collect();
        println!("{}  r = {:>2}  worlds {:?}", c.signature_string(), c.index(), worlds);
    }
    let inside = cs.indices_within(&cs.union_antecedent).len();
    println!("{} constituents, {} inside the union of antecedents", cs.len(), inside);
    Ok(())
}
