//! Serialization schemas for covariance matrices and standard forms.
//!
//! Two input documents are accepted: a full 4x4 covariance matrix with an
//! explicit quadrature ordering tag, and the four standard-form
//! parameters. Validation failures name the offending entry.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gaussian::{CovarianceMatrix, StandardForm};

/// The only quadrature ordering this toolbox speaks.
pub const ORDERING: &str = "q1 p1 q2 p2";

/// Covariance matrix document: `{"ordering": "q1 p1 q2 p2", "v": [[..4]..4]}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CovarianceJson {
    /// Must equal [`ORDERING`]; rejected otherwise so silently transposed
    /// conventions cannot slip through.
    pub ordering: String,
    pub v: Vec<Vec<f64>>,
}

impl CovarianceJson {
    pub fn from_matrix(v: &CovarianceMatrix) -> Self {
        CovarianceJson {
            ordering: ORDERING.to_string(),
            v: v.entries().iter().map(|row| row.to_vec()).collect(),
        }
    }

    /// Validates shape, ordering tag, finiteness, and symmetry.
    pub fn to_matrix(&self) -> Result<CovarianceMatrix> {
        if self.ordering != ORDERING {
            return Err(Error::domain(
                "covariance input",
                format!(
                    "ordering must be \"{ORDERING}\" (got \"{}\")",
                    self.ordering
                ),
            ));
        }
        if self.v.len() != 4 {
            return Err(Error::domain(
                "covariance input",
                format!("v must have 4 rows (got {})", self.v.len()),
            ));
        }
        let mut entries = [[0.0; 4]; 4];
        for (i, row) in self.v.iter().enumerate() {
            if row.len() != 4 {
                return Err(Error::domain(
                    "covariance input",
                    format!("row {} must have 4 entries (got {})", i, row.len()),
                ));
            }
            entries[i].copy_from_slice(row);
        }
        CovarianceMatrix::from_entries(entries)
    }
}

/// Standard-form document: `{"a": .., "b": .., "c1": .., "c2": ..}`.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StandardFormJson {
    pub a: f64,
    pub b: f64,
    pub c1: f64,
    pub c2: f64,
}

impl StandardFormJson {
    pub fn from_form(sf: &StandardForm) -> Self {
        StandardFormJson {
            a: sf.a(),
            b: sf.b(),
            c1: sf.c1(),
            c2: sf.c2(),
        }
    }

    /// Validates and canonicalizes (`c1 >= |c2| >= 0`).
    pub fn to_form(&self) -> Result<StandardForm> {
        StandardForm::new(self.a, self.b, self.c1, self.c2)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::smallmat::Mat4;

    #[test]
    fn covariance_round_trip() {
        let v = CovarianceMatrix::two_mode_squeezed_vacuum(0.3);
        let doc = CovarianceJson::from_matrix(&v);
        let text = serde_json::to_string(&doc).unwrap();
        let parsed: CovarianceJson = serde_json::from_str(&text).unwrap();
        let back = parsed.to_matrix().unwrap();
        assert_eq!(back.entries(), v.entries());
    }

    #[test]
    fn ordering_tag_is_enforced() {
        let mut doc = CovarianceJson::from_matrix(&CovarianceMatrix::vacuum());
        doc.ordering = "q1 q2 p1 p2".to_string();
        let err = doc.to_matrix().unwrap_err();
        assert!(err.to_string().contains("ordering"));
    }

    #[test]
    fn shape_violations_name_the_row() {
        let doc = CovarianceJson {
            ordering: ORDERING.to_string(),
            v: vec![vec![0.5; 3]; 3],
        };
        assert!(doc.to_matrix().unwrap_err().to_string().contains("4 rows"));

        let doc = CovarianceJson {
            ordering: ORDERING.to_string(),
            v: vec![vec![0.5; 4], vec![0.5; 4], vec![0.5; 2], vec![0.5; 4]],
        };
        assert!(doc.to_matrix().unwrap_err().to_string().contains("row 2"));
    }

    #[test]
    fn asymmetry_names_the_entry() {
        let mut entries = *CovarianceMatrix::new(Mat4::identity()).unwrap().entries();
        entries[0][2] = 0.3;
        let doc = CovarianceJson {
            ordering: ORDERING.to_string(),
            v: entries.iter().map(|r| r.to_vec()).collect(),
        };
        let message = doc.to_matrix().unwrap_err().to_string();
        assert!(message.contains('0') && message.contains('2'), "{message}");
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let text = r#"{"a": 1.0, "b": 1.0, "c1": 0.1, "c2": 0.1, "c3": 0.1}"#;
        assert!(serde_json::from_str::<StandardFormJson>(text).is_err());
    }

    #[test]
    fn standard_form_parses_and_canonicalizes() {
        let doc: StandardFormJson =
            serde_json::from_str(r#"{"a": 1.0, "b": 2.0, "c1": 0.2, "c2": -0.5}"#).unwrap();
        let sf = doc.to_form().unwrap();
        assert_eq!(sf.c1(), 0.5);
        assert_eq!(sf.c2(), -0.2);
    }
}
