//! The whole path from an interval assessment to a verified table.

use std::collections::BTreeMap;

use crate::construction::{construct, ConditionalProbabilityTable};
use crate::error::{Error, Result};
use crate::gcoherence::{
    check_g_coherence, correct_assessment, propagated_bounds, select_precise, validate_precise,
    Assessment, Bounds, GCoherenceVerdict,
};
use crate::rational::Rational;
use crate::verify::{verify_table, VerificationReport, VerifyOptions};

#[derive(Debug, Clone, Default)]
pub struct SynthesisOptions {
    /// Point values to use instead of the midpoint selection.
    pub precise: Option<Vec<Rational>>,
    /// Stage solutions to use instead of the max-support ones.
    pub solutions: BTreeMap<usize, Vec<Rational>>,
    pub verify: VerifyOptions,
}

#[derive(Debug, Clone)]
pub struct Synthesis {
    pub assessment: Assessment,
    pub corrected: Assessment,
    /// Propagated bounds before intersection with the assessed intervals.
    pub propagated: Vec<Bounds>,
    pub precise: Assessment,
    pub table: ConditionalProbabilityTable,
    pub report: VerificationReport,
}

pub fn synthesize(assessment: &Assessment, options: &SynthesisOptions) -> Result<Synthesis> {
    if let GCoherenceVerdict::Incoherent { failing } = check_g_coherence(assessment)? {
        return Err(Error::NotGCoherent { failing });
    }
    let propagated = propagated_bounds(assessment)?;
    let corrected = correct_assessment(assessment)?;
    let precise = match &options.precise {
        Some(values) => validate_precise(assessment, values)?,
        None => select_precise(assessment)?,
    };
    let values = precise.values().expect("precise assessment");
    let table = construct(&precise.family, &values, &options.solutions)?;
    let report = verify_table(&table, assessment, &options.verify)?;
    Ok(Synthesis {
        assessment: assessment.clone(),
        corrected,
        propagated,
        precise,
        table,
        report,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::event::{ConditionalEvent, Universe};
    use crate::gcoherence::Interval;
    use crate::rational::{int, ratio};

    #[test]
    fn example_with_override() {
        let u = Universe::new(&["A", "B", "C", "D"]).unwrap();
        let ce = |e: &str, h: &str| ConditionalEvent::new(u.event(e).unwrap(), u.event(h).unwrap());
        let a = Assessment::new(
            vec![ce("A&B&C", "D"), ce("B", "A&C"), ce("C", "A&B")],
            vec![
                Interval::new(ratio(1, 2), int(1)),
                Interval::new(int(0), ratio(1, 2)),
                Interval::new(ratio(1, 3), ratio(2, 3)),
            ],
        )
        .unwrap();
        let options = SynthesisOptions {
            precise: Some(vec![ratio(1, 2), int(0), ratio(1, 3)]),
            ..Default::default()
        };
        let s = synthesize(&a, &options).unwrap();
        assert_eq!(s.table.stages.len(), 2);
        assert_eq!(s.corrected, a);
        assert!(s.report.all_passed());

        let s = synthesize(&a, &SynthesisOptions::default()).unwrap();
        assert!(s.report.all_passed());
        assert!(s.precise.is_precise());
    }

    #[test]
    fn incoherent_input_is_refused() {
        let u = Universe::new(&["A"]).unwrap();
        let a = Assessment::new(
            vec![ConditionalEvent::new(u.everything(), u.everything())],
            vec![Interval::new(int(0), ratio(1, 2))],
        )
        .unwrap();
        assert_eq!(
            synthesize(&a, &SynthesisOptions::default()).unwrap_err(),
            Error::NotGCoherent { failing: vec![0] }
        );
    }
}
