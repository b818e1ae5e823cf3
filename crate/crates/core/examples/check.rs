//! Level-wise g-coherence check, with the witness of every level.

use coherent_conditional::cli::AssessmentDocument;
use coherent_conditional::gcoherence::{check_g_coherence, GCoherenceVerdict};

const EXAMPLE: &str = include_str!("../../../data/four_atoms.ccp");

fn main() -> coherent_conditional::Result<()> {
    let a = AssessmentDocument::parse(EXAMPLE)?.resolve()?.assessment;
    match check_g_coherence(&a)? {
        GCoherenceVerdict::Coherent { levels } => {
            for (k, level) in levels.iter().enumerate() {
                let witness: Vec<String> = level.witness.iter().map(|x| x.to_string()).collect();
                println!("level {k}: members {:?} witness [{}]", level.members, witness.join(", "));
            }
        }
        GCoherenceVerdict::Incoherent { failing } => println!("not g-coherent: {failing:?}"),
    }
    Ok(())
}
