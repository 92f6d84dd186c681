use opq_core::Real;
use serde::Serialize;

use crate::suites::Check;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Case {
    pub case_id: String,
    pub residual: String,
    pub tolerance: String,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub suite: String,
    pub cases: Vec<Case>,
    pub overall_pass: bool,
}

impl VerificationReport {
    pub fn from_checks(suite: &str, checks: &[Check], tolerance: &Real) -> Self {
        let tol = tolerance.to_decimal_full();
        let cases: Vec<Case> = checks
            .iter()
            .map(|c| Case {
                case_id: c.id.clone(),
                residual: c.residual.to_decimal_full(),
                tolerance: tol.clone(),
                // NaN residuals fail.
                pass: c.residual <= *tolerance,
            })
            .collect();
        let overall_pass = cases.iter().all(|c| c.pass);
        VerificationReport {
            suite: suite.to_string(),
            cases,
            overall_pass,
        }
    }

    pub fn failures(&self) -> impl Iterator<Item = &Case> {
        self.cases.iter().filter(|c| !c.pass)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("suite,case_id,residual,tolerance,pass\n");
        for c in &self.cases {
            out.push_str(&format!("{},{},{},{},{}\n", self.suite, c.case_id, c.residual, c.tolerance, c.pass));
        }
        out
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use opq_core::Precision;

    fn check(id: &str, r: Real) -> Check {
        Check {
            id: id.into(),
            residual: r,
        }
    }

    #[test]
    fn overall_is_conjunction() {
        let p = Precision::DEFAULT;
        let tol = p.half_eps();
        let ok = VerificationReport::from_checks("t", &[check("a", Real::zero(p))], &tol);
        assert!(ok.overall_pass);
        let bad = VerificationReport::from_checks("t", &[check("a", Real::zero(p)), check("b", Real::one(p))], &tol);
        assert!(!bad.overall_pass);
        assert_eq!(bad.failures().count(), 1);
        assert!(bad.cases[0].residual.starts_with('0'));
        let csv = bad.to_csv();
        assert!(csv.starts_with("suite,case_id,residual,tolerance,pass\nt,a,"));
        assert!(csv.ends_with(",false\n"));
        let json: serde_json::Value = serde_json::from_str(&bad.to_json()).unwrap();
        assert_eq!(json["overall_pass"], false);
        assert_eq!(json["cases"][1]["case_id"], "b");
    }
}
