//! Builds the full conditional probability for the running example and
//! prints its stages and conditioning class.

use coherent_conditional::cli::AssessmentDocument;
use coherent_conditional::pipeline::{synthesize, SynthesisOptions};
use coherent_conditional::rational::{int, ratio};

const EXAMPLE: &str = include_str!("../../../data/four_atoms.ccp");

fn main() -> coherent_conditional::Result<()> {
    let a = AssessmentDocument::parse(EXAMPLE)?.resolve()?.assessment;
    let options = SynthesisOptions {
        precise: Some(vec![ratio(1, 2), int(0), ratio(1, 3)]),
        ..Default::default()
    };
    let s = synthesize(&a, &options)?;
    for stage in &s.table.stages {
        println!("stage {}: members {:?}", stage.index, stage.members);
        for (c, mass) in stage.constituents.constituents.iter().zip(&stage.solution) {
            println!("  {} -> {}", c.signature_string(), mass);
        }
        println!("  zero antecedents: {}", stage.antecedents_zero.len());
    }
    for member in &s.table.class_x {
        println!("X member with {} worlds, owner {}", member.event.len(), member.owner);
    }
    for (i, ce) in a.family.iter().enumerate() {
        let p = s.table.query(&ce.consequent, &ce.antecedent).expect("antecedent in X");
        println!("P(entry {i}) = {p}");
    }
    println!("{}", s.report);
    Ok(())
}
