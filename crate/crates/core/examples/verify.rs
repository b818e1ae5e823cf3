//! Verifies a synthesized table, then breaks it in two ways and shows the
//! counterexamples found.

use coherent_conditional::cli::AssessmentDocument;
use coherent_conditional::pipeline::{synthesize, SynthesisOptions};
use coherent_conditional::rational::int;
use coherent_conditional::verify::{verify_table, VerifyOptions};

const EXAMPLE: &str = include_str!("../../../data/four_atoms.ccp");

fn main() -> coherent_conditional::Result<()> {
    let a = AssessmentDocument::parse(EXAMPLE)?.resolve()?.assessment;
    let s = synthesize(&a, &SynthesisOptions::default())?;
    let opts = VerifyOptions::default();
    println!("{}\n", verify_table(&s.table, &a, &opts)?);

    let mut negative = s.table.clone();
    let last = negative.masses.len() - 1;
    negative.masses[last].masses[0] = int(-1);
    println!("{}\n", verify_table(&negative, &a, &opts)?);

    // Dropping the union antecedent from X leaves a cover unanswered.
    let mut thin = s.table.clone();
    let union = s.table.base.union_antecedent.clone();
    thin.class_x.retain(|m| m.event != union);
    println!("{}", verify_table(&thin, &a, &opts)?);
    Ok(())
}
