//! Tightest coherent bounds for a new conditional event, and the correction
//! of an assessment whose intervals are too wide.

use coherent_conditional::cli::{cmd_bounds, cmd_correct};

const EXAMPLE: &str = include_str!("../../../data/four_atoms.ccp");
const NARROWED: &str = "atoms A B
assess \"A\" given \"TRUE\" in [0, 1/2]
assess \"A & B\" given \"TRUE\" in [1/4, 1]
assess \"B\" given \"A\" in [0, 1]
";

fn main() {
    for (event, given) in [("B", "A & C"), ("A & B", "D"), ("C", "A")] {
        print!("P({event} | {given}) in {}", cmd_bounds(EXAMPLE, event, given).stdout);
    }
    println!();
    print!("{}", cmd_correct(NARROWED).stdout);
}
