use serde::{Deserialize, Serialize};

use super::Sentence;
use crate::config::Guards;
use crate::enumerate::Class;
use crate::error::Result;
use crate::predicate::Predicate;
use crate::probability::{estimate, EstimateOptions, Mode, ProbabilityEstimate};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub sentence_id: String,
    #[serde(flatten)]
    pub estimate: ProbabilityEstimate,
}

impl ScanRow {
    pub const CSV_HEADER: &'static str = "sentence_id,n,samples,value,stderr";

    pub fn csv_row(&self) -> String {
        let e = &self.estimate;
        format!("{},{},{},{},{}", self.sentence_id, e.n, e.samples, e.value, e.stderr)
    }
}

/// One estimate per size of the probability that a uniform labelled
/// FSIAS_e structure satisfies `s`. Each size uses the same seed; in
/// `Mode::Auto` small sizes are enumerated exactly.
pub fn zero_one_scan(
    sentence_id: &str,
    s: &Sentence,
    sizes: impl IntoIterator<Item = usize>,
    samples: u64,
    seed: u64,
    mode: Mode,
    guards: &Guards,
) -> Result<Vec<ScanRow>> {
    let predicate = Predicate::Sentence(Box::new(s.clone()));
    let opts = EstimateOptions {
        class: Some(Class::Fsiase),
        samples,
        seed,
        mode,
        allow_unvalidated: false,
    };
    sizes
        .into_iter()
        .map(|n| {
            Ok(ScanRow {
                sentence_id: sentence_id.to_string(),
                estimate: estimate(&predicate, n, &opts, guards)?,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fol::parse;

    #[test]
    fn axiom_scans_to_one() {
        let s = parse("forall x. T(x,e,x)").unwrap();
        let rows = zero_one_scan("ii", &s, [1, 3, 8], 200, 1, Mode::Auto, &Guards::default()).unwrap();
        assert!(rows.iter().all(|r| r.estimate.value == 1.0));
        assert_eq!(rows[0].csv_row(), "ii,1,1,1,0");
    }

    #[test]
    fn negation_is_complementary_in_exact_mode() {
        let g = Guards::default();
        let s = parse("exists x. (!(x = e) & T(x,x,x))").unwrap();
        for n in 1..=4 {
            let a = zero_one_scan("s", &s, [n], 0, 0, Mode::Exact, &g).unwrap();
            let b = zero_one_scan("s", &s.negate(), [n], 0, 0, Mode::Exact, &g).unwrap();
            assert_eq!(a[0].estimate.ratio() + b[0].estimate.ratio(), num_traits::One::one());
            let expect = 1.0 - 0.5f64.powi(n as i32 - 1);
            assert_eq!(a[0].estimate.value, expect);
        }
    }
}
