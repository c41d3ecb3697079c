use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::{Criterion, VerifyError};

/// Outcome of one criterion, with the value that decided it when there is
/// one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionResult {
    pub criterion: Criterion,
    pub passed: bool,
    pub diagnostic: String,
    pub measured: Option<f64>,
}

impl CriterionResult {
    pub fn new(criterion: &Criterion, passed: bool, measured: Option<f64>, diagnostic: impl Into<String>) -> Self {
        Self { criterion: criterion.clone(), passed, diagnostic: diagnostic.into(), measured }
    }

    pub fn fail(criterion: &Criterion, diagnostic: impl Into<String>) -> Self {
        Self::new(criterion, false, None, diagnostic)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub problem_id: String,
    pub passed: bool,
    pub criterion_results: Vec<CriterionResult>,
}

/// Conjunction of criterion outcomes.
pub fn aggregate(problem_id: &str, results: Vec<CriterionResult>) -> Result<Verdict, VerifyError> {
    if results.is_empty() {
        return Err(VerifyError::EmptyCriteria);
    }
    Ok(Verdict {
        problem_id: problem_id.into(),
        passed: results.iter().all(|r| r.passed),
        criterion_results: results,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use proptest::prelude::*;

    fn result(passed: bool) -> CriterionResult {
        CriterionResult::new(&Criterion::BackgroundWhite, passed, None, "")
    }

    #[test]
    fn empty_is_an_error() {
        assert_eq!(aggregate("p", vec![]), Err(VerifyError::EmptyCriteria));
    }

    #[test]
    fn one_false_fails() {
        let v = aggregate("p", vec![result(true), result(false), result(true), result(true), result(true)]).unwrap();
        assert!(!v.passed);
        assert_eq!(v.criterion_results.len(), 5);
    }

    proptest! {
        #[test]
        fn conjunction(bits in proptest::collection::vec(any::<bool>(), 1..20)) {
            let v = aggregate("p", bits.iter().map(|b| result(*b)).collect()).unwrap();
            prop_assert_eq!(v.passed, bits.iter().all(|b| *b));
        }
    }
}
