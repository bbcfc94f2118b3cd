//! JSON interchange formats.
//!
//! Complex numbers are `[re, im]` pairs. Writers emit canonical output
//! (elements ascending by index, fixed key order, two-space indentation and a
//! trailing newline), so parsing and re-writing a canonical file reproduces it
//! byte for byte.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gframe::{Element, GFrame};
use crate::induced::VectorFrame;
use crate::linalg::{ComplexMatrix, C64};
use crate::splitting::BilinearFormFamily;
use crate::tol::Tolerances;

pub const GFRAME_SCHEMA: &str = "gframe/1";
pub const OPERATOR_SCHEMA: &str = "operator/1";
pub const FORMS_SCHEMA: &str = "forms/1";
pub const VECTOR_FRAME_SCHEMA: &str = "vector-frame/1";

#[derive(Debug, Error)]
pub enum IoError {
    #[error("parse error at {path}: {source}")]
    Parse {
        path: String,
        source: serde_json::Error,
    },
    #[error("{field}: {message}")]
    Validation { field: String, message: String },
}

fn invalid(field: impl Into<String>, message: impl Into<String>) -> IoError {
    IoError::Validation {
        field: field.into(),
        message: message.into(),
    }
}

pub type Entry = [f64; 2];
pub type MatrixRows = Vec<Vec<Entry>>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GFrameFile {
    pub schema_version: String,
    pub dim_u: usize,
    pub elements: Vec<ElementFile>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ElementFile {
    pub index: i64,
    pub dim_v: usize,
    pub matrix: MatrixRows,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatorFile {
    pub schema_version: String,
    pub rows: usize,
    pub cols: usize,
    pub matrix: MatrixRows,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FormsFile {
    pub schema_version: String,
    pub forms: Vec<FormFile>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FormFile {
    pub index: i64,
    pub dim: usize,
    pub matrix: MatrixRows,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VectorFrameFile {
    pub schema_version: String,
    pub dim: usize,
    pub vectors: Vec<LabeledVectorFile>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LabeledVectorFile {
    pub j: i64,
    pub k: usize,
    pub vector: Vec<Entry>,
}

fn from_json<T: serde::de::DeserializeOwned>(text: &str) -> Result<T, IoError> {
    let mut de = serde_json::Deserializer::from_str(text);
    let value = serde_path_to_error::deserialize(&mut de).map_err(|e| IoError::Parse {
        path: e.path().to_string(),
        source: e.into_inner(),
    })?;
    de.end().map_err(|source| IoError::Parse {
        path: ".".into(),
        source,
    })?;
    Ok(value)
}

fn check_schema(found: &str, expected: &str) -> Result<(), IoError> {
    if found != expected {
        return Err(invalid(
            "schema_version",
            format!("unrecognized schema {found:?}, expected {expected:?}"),
        ));
    }
    Ok(())
}

fn to_c64(e: &Entry) -> C64 {
    C64::new(e[0], e[1])
}

fn from_c64(z: &C64) -> Entry {
    [z.re, z.im]
}

fn matrix_from_rows(
    field: &str,
    rows: usize,
    cols: usize,
    data: &MatrixRows,
) -> Result<ComplexMatrix, IoError> {
    if data.len() != rows {
        return Err(invalid(field, format!("expected {rows} rows, found {}", data.len())));
    }
    let mut flat = Vec::with_capacity(rows * cols);
    for (i, row) in data.iter().enumerate() {
        if row.len() != cols {
            return Err(invalid(
                format!("{field}[{i}]"),
                format!("expected {cols} entries, found {}", row.len()),
            ));
        }
        for (j, e) in row.iter().enumerate() {
            if !e[0].is_finite() || !e[1].is_finite() {
                return Err(invalid(format!("{field}[{i}][{j}]"), "entry is not finite"));
            }
            flat.push(to_c64(e));
        }
    }
    ComplexMatrix::new(rows, cols, flat).map_err(|e| invalid(field, e.to_string()))
}

fn rows_from_matrix(m: &ComplexMatrix) -> MatrixRows {
    (0..m.rows()).map(|i| m.row(i).iter().map(from_c64).collect()).collect()
}

fn to_canonical_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable value");
    s.push('\n');
    s
}

impl GFrameFile {
    pub fn from_gframe(f: &GFrame) -> Self {
        let mut elements: Vec<ElementFile> = f
            .elements()
            .iter()
            .map(|e| ElementFile {
                index: e.index,
                dim_v: e.dim_v(),
                matrix: rows_from_matrix(&e.block),
            })
            .collect();
        elements.sort_by_key(|e| e.index);
        Self {
            schema_version: GFRAME_SCHEMA.into(),
            dim_u: f.dim_u(),
            elements,
        }
    }

    pub fn to_gframe(&self) -> Result<GFrame, IoError> {
        check_schema(&self.schema_version, GFRAME_SCHEMA)?;
        let mut elements = Vec::with_capacity(self.elements.len());
        for (i, e) in self.elements.iter().enumerate() {
            let field = format!("elements[{i}].matrix");
            let block = matrix_from_rows(&field, e.dim_v, self.dim_u, &e.matrix)?;
            if elements.iter().any(|x: &Element| x.index == e.index) {
                return Err(invalid(
                    format!("elements[{i}].index"),
                    format!("duplicate index {}", e.index),
                ));
            }
            elements.push(Element {
                index: e.index,
                block,
            });
        }
        GFrame::new(self.dim_u, elements).map_err(|e| invalid("elements", e.to_string()))
    }
}

pub fn parse_gframe(text: &str) -> Result<GFrame, IoError> {
    from_json::<GFrameFile>(text)?.to_gframe()
}

pub fn write_gframe(f: &GFrame) -> String {
    to_canonical_json(&GFrameFile::from_gframe(f))
}

pub fn parse_operator(text: &str) -> Result<ComplexMatrix, IoError> {
    let file: OperatorFile = from_json(text)?;
    check_schema(&file.schema_version, OPERATOR_SCHEMA)?;
    matrix_from_rows("matrix", file.rows, file.cols, &file.matrix)
}

pub fn write_operator(m: &ComplexMatrix) -> String {
    to_canonical_json(&OperatorFile {
        schema_version: OPERATOR_SCHEMA.into(),
        rows: m.rows(),
        cols: m.cols(),
        matrix: rows_from_matrix(m),
    })
}

/// Parses a forms file; SPD failures name the offending element index.
pub fn parse_forms(text: &str, tol: &Tolerances) -> Result<BilinearFormFamily, IoError> {
    let file: FormsFile = from_json(text)?;
    check_schema(&file.schema_version, FORMS_SCHEMA)?;
    let mut forms = Vec::with_capacity(file.forms.len());
    for (i, f) in file.forms.iter().enumerate() {
        let m = matrix_from_rows(&format!("forms[{i}].matrix"), f.dim, f.dim, &f.matrix)?;
        if forms.iter().any(|(j, _): &(i64, ComplexMatrix)| *j == f.index) {
            return Err(invalid(
                format!("forms[{i}].index"),
                format!("duplicate index {}", f.index),
            ));
        }
        forms.push((f.index, m));
    }
    BilinearFormFamily::new(forms, tol).map_err(|e| match e {
        crate::Error::NotSpd { index } => invalid(
            format!("forms[index={index}]"),
            "form is not symmetric positive definite",
        ),
        other => invalid("forms", other.to_string()),
    })
}

pub fn write_forms(forms: &BilinearFormFamily) -> String {
    let mut list: Vec<FormFile> = forms
        .forms()
        .iter()
        .map(|(index, m)| FormFile {
            index: *index,
            dim: m.rows(),
            matrix: rows_from_matrix(m),
        })
        .collect();
    list.sort_by_key(|f| f.index);
    to_canonical_json(&FormsFile {
        schema_version: FORMS_SCHEMA.into(),
        forms: list,
    })
}

pub fn parse_vector_frame(text: &str) -> Result<VectorFrame, IoError> {
    let file: VectorFrameFile = from_json(text)?;
    check_schema(&file.schema_version, VECTOR_FRAME_SCHEMA)?;
    let mut labels = Vec::with_capacity(file.vectors.len());
    let mut vectors = Vec::with_capacity(file.vectors.len());
    for (i, v) in file.vectors.iter().enumerate() {
        if v.vector.len() != file.dim {
            return Err(invalid(
                format!("vectors[{i}].vector"),
                format!("expected {} entries, found {}", file.dim, v.vector.len()),
            ));
        }
        labels.push((v.j, v.k));
        vectors.push(v.vector.iter().map(to_c64).collect());
    }
    VectorFrame::new(file.dim, labels, vectors).map_err(|e| invalid("vectors", e.to_string()))
}

pub fn write_vector_frame(vf: &VectorFrame) -> String {
    to_canonical_json(&VectorFrameFile {
        schema_version: VECTOR_FRAME_SCHEMA.into(),
        dim: vf.dim(),
        vectors: vf
            .labels()
            .iter()
            .zip(vf.vectors())
            .map(|(&(j, k), v)| LabeledVectorFile {
                j,
                k,
                vector: v.iter().map(from_c64).collect(),
            })
            .collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{self, mercedes_benz, random_gframe};
    use proptest::prelude::*;

    #[test]
    fn identity_file_layout() {
        let text = write_gframe(&generators::identity_frame(2));
        let expected = r#"{
  "schema_version": "gframe/1",
  "dim_u": 2,
  "elements": [
    {
      "index": 1,
      "dim_v": 2,
      "matrix": [
        [
          [
            1.0,
            0.0
          ],
          [
            0.0,
            0.0
          ]
        ],
        [
          [
            0.0,
            0.0
          ],
          [
            1.0,
            0.0
          ]
        ]
      ]
    }
  ]
}
"#;
        assert_eq!(text, expected);
    }

    #[test]
    fn malformed_inputs_name_the_field() {
        let missing = r#"{"schema_version": "gframe/1", "elements": []}"#;
        let err = parse_gframe(missing).unwrap_err().to_string();
        assert!(err.contains("dim_u"), "{err}");

        let short = r#"{"schema_version": "gframe/1", "dim_u": 2, "elements": [
            {"index": 1, "dim_v": 1, "matrix": [[[1.0, 0.0]]]}]}"#;
        let err = parse_gframe(short).unwrap_err().to_string();
        assert!(err.contains("elements[0].matrix[0]"), "{err}");

        let dup = r#"{"schema_version": "gframe/1", "dim_u": 1, "elements": [
            {"index": 1, "dim_v": 1, "matrix": [[[1.0, 0.0]]]},
            {"index": 1, "dim_v": 1, "matrix": [[[1.0, 0.0]]]}]}"#;
        let err = parse_gframe(dup).unwrap_err().to_string();
        assert!(err.contains("elements[1].index"), "{err}");

        let schema = r#"{"schema_version": "gframe/9", "dim_u": 1, "elements": []}"#;
        assert!(parse_gframe(schema).unwrap_err().to_string().contains("schema_version"));
        assert!(matches!(parse_gframe("{not json"), Err(IoError::Parse { .. })));
    }

    #[test]
    fn forms_diagnostics() {
        let text = r#"{"schema_version": "forms/1", "forms": [
            {"index": 4, "dim": 1, "matrix": [[[-1.0, 0.0]]]}]}"#;
        let err = parse_forms(text, &Tolerances::default()).unwrap_err().to_string();
        assert!(err.contains("index=4"), "{err}");
    }

    #[test]
    fn other_formats_round_trip() {
        let m = generators::gaussian_matrix(&mut generators::rng(1), 3, 2);
        assert_eq!(parse_operator(&write_operator(&m)).unwrap(), m);
        let vf = crate::induced::induced_sequence(&mercedes_benz(), None).unwrap();
        let text = write_vector_frame(&vf);
        assert_eq!(parse_vector_frame(&text).unwrap(), vf);
        let f = random_gframe(3, &[2, 2], 2, 2.0).unwrap();
        let forms = BilinearFormFamily::scaled_identity(&f, 3.0, &Tolerances::default()).unwrap();
        let text = write_forms(&forms);
        assert_eq!(write_forms(&parse_forms(&text, &Tolerances::default()).unwrap()), text);
    }

    proptest! {
        #[test]
        fn gframe_round_trip_is_byte_stable(
            n in 1usize..6,
            dims in prop::collection::vec(0usize..4, 1..5),
            seed in any::<u64>(),
        ) {
            let mut rng = generators::rng(seed);
            let blocks = dims.iter().map(|&m| generators::gaussian_matrix(&mut rng, m, n)).collect();
            let f = GFrame::from_blocks(n, blocks).unwrap();
            let text = write_gframe(&f);
            let back = parse_gframe(&text).unwrap();
            prop_assert_eq!(&back, &f);
            prop_assert_eq!(write_gframe(&back), text);
        }
    }
}
