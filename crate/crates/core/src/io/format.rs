//! Versioned JSON document format for diagrams.
//!
//! ```json
//! {"circles":[{"component":{"k":3,"kind":"necklace","parity":1},"coorientable":true,"corners":["c0","c1","c2"]}],
//!  "flags":{"fibres_connected":true,"homologically_essential":true},
//!  "genus":0,"history":[],"lefschetz":[],"version":1}
//! ```
//!
//! Serialization always emits the canonical form with sorted keys, no
//! whitespace and a trailing newline. Parsing accepts any key order and
//! whitespace.

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::diagram::{
    canonical_form, BoundaryCircle, ComponentKind, DivisorComponent, FibrationDiagram,
    HistoryRecord, LefschetzPoint, Parity,
};
use crate::homology::Cycle;

pub const FORMAT_VERSION: u64 = 1;

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("unsupported document version {0} (expected {FORMAT_VERSION})")]
    Version(String),
    #[error("invalid field {field}: {message}")]
    Field { field: String, message: String },
}

impl From<serde_json::Error> for FormatError {
    fn from(e: serde_json::Error) -> Self {
        FormatError::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Document {
    version: u64,
    genus: u32,
    circles: Vec<CircleDoc>,
    lefschetz: Vec<LefschetzDoc>,
    flags: Flags,
    #[serde(default)]
    history: Vec<HistoryRecord>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CircleDoc {
    corners: Vec<String>,
    coorientable: bool,
    component: ComponentDoc,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ComponentDoc {
    kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    k: Option<u32>,
    parity: i64,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LefschetzDoc {
    id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    cycle: Option<Cycle>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    basis_tag: Option<String>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Flags {
    homologically_essential: bool,
    fibres_connected: bool,
}

fn field_error(field: impl Into<String>, message: impl Into<String>) -> FormatError {
    FormatError::Field {
        field: field.into(),
        message: message.into(),
    }
}

fn component_from_doc(i: usize, c: &ComponentDoc) -> Result<DivisorComponent, FormatError> {
    let parity = Parity::from_value(c.parity)
        .ok_or_else(|| field_error(format!("circles[{i}].component.parity"), "must be 1 or -1"))?;
    let kind = match (c.kind.as_str(), c.k) {
        ("necklace", Some(k)) => ComponentKind::Necklace(k),
        ("necklace", None) => {
            return Err(field_error(
                format!("circles[{i}].component.k"),
                "missing for necklace",
            ))
        }
        ("torus", None) => ComponentKind::Torus,
        ("klein_bottle", None) => ComponentKind::KleinBottle,
        ("torus" | "klein_bottle", Some(_)) => {
            return Err(field_error(
                format!("circles[{i}].component.k"),
                "only necklace components carry k",
            ))
        }
        (other, _) => {
            return Err(field_error(
                format!("circles[{i}].component.kind"),
                format!("unknown kind {other:?}"),
            ))
        }
    };
    Ok(DivisorComponent::new(kind, parity))
}

fn component_to_doc(c: &DivisorComponent) -> ComponentDoc {
    let (kind, k) = match c.kind {
        ComponentKind::Necklace(k) => ("necklace", Some(k)),
        ComponentKind::Torus => ("torus", None),
        ComponentKind::KleinBottle => ("klein_bottle", None),
    };
    ComponentDoc {
        kind: kind.to_string(),
        k,
        parity: c.parity.value() as i64,
    }
}

/// Parse a diagram document. The result is not validated; see
/// [`crate::diagram::validate`].
pub fn parse_diagram(bytes: &[u8]) -> Result<FibrationDiagram, FormatError> {
    let value: Value = serde_json::from_slice(bytes)?;
    match value.get("version") {
        Some(Value::Number(n)) if n.as_u64() == Some(FORMAT_VERSION) => {}
        Some(other) => return Err(FormatError::Version(other.to_string())),
        None => return Err(FormatError::Version("<missing>".into())),
    }
    let doc: Document = serde_json::from_slice(bytes)?;

    let circles = doc
        .circles
        .iter()
        .enumerate()
        .map(|(i, c)| {
            Ok(BoundaryCircle {
                corners: c.corners.clone(),
                coorientable: c.coorientable,
                component: component_from_doc(i, &c.component)?,
            })
        })
        .collect::<Result<Vec<_>, FormatError>>()?;

    let lefschetz = doc
        .lefschetz
        .into_iter()
        .map(|l| LefschetzPoint {
            id: l.id,
            cycle: l.cycle,
            basis_tag: l.basis_tag,
        })
        .collect();

    Ok(FibrationDiagram {
        genus: doc.genus,
        circles,
        lefschetz,
        homologically_essential: doc.flags.homologically_essential,
        fibres_connected: doc.flags.fibres_connected,
        oriented: true,
        history: doc.history,
    })
}

/// Canonical bytes of the diagram, history included.
pub fn serialize_diagram(d: &FibrationDiagram) -> Vec<u8> {
    let c = canonical_form(d);
    let doc = Document {
        version: FORMAT_VERSION,
        genus: c.genus,
        circles: c
            .circles
            .iter()
            .map(|circle| CircleDoc {
                corners: circle.corners.clone(),
                coorientable: circle.coorientable,
                component: component_to_doc(&circle.component),
            })
            .collect(),
        lefschetz: c
            .lefschetz
            .iter()
            .map(|l| LefschetzDoc {
                id: l.id.clone(),
                cycle: l.cycle,
                basis_tag: l.basis_tag.clone(),
            })
            .collect(),
        flags: Flags {
            homologically_essential: c.homologically_essential,
            fibres_connected: c.fibres_connected,
        },
        history: c.history,
    };
    to_canonical_json(&doc)
}

/// Canonical bytes with the history stripped. Two diagrams are isomorphic
/// exactly when their keys are equal.
pub fn isomorphism_key(d: &FibrationDiagram) -> Vec<u8> {
    let mut stripped = d.clone();
    stripped.history.clear();
    serialize_diagram(&stripped)
}

/// Compact JSON with object keys sorted, newline-terminated.
pub fn to_canonical_json<T: Serialize>(value: &T) -> Vec<u8> {
    // serde_json's default map is ordered by key.
    let v = serde_json::to_value(value).expect("document types serialize to JSON");
    let mut out = serde_json::to_vec(&v).expect("values serialize");
    out.push(b'\n');
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::{is_isomorphic, trade_corner_to_lefschetz};

    fn cp2() -> FibrationDiagram {
        FibrationDiagram::disk(3, Parity::Plus)
    }

    #[test]
    fn cp2_bytes() {
        let bytes = serialize_diagram(&cp2());
        assert_eq!(
            String::from_utf8(bytes).unwrap(),
            concat!(
                r#"{"circles":[{"component":{"k":3,"kind":"necklace","parity":1},"coorientable":true,"corners":["c0","c1","c2"]}],"#,
                r#""flags":{"fibres_connected":true,"homologically_essential":true},"genus":0,"history":[],"lefschetz":[],"version":1}"#,
                "\n"
            )
        );
    }

    #[test]
    fn round_trip_is_isomorphic() {
        let d = trade_corner_to_lefschetz(&cp2(), &1.into(), true).unwrap();
        let bytes = serialize_diagram(&d);
        let back = parse_diagram(&bytes).unwrap();
        assert!(is_isomorphic(&back, &d));
        assert_eq!(serialize_diagram(&back), bytes);
        assert_eq!(back.history, d.history);
    }

    #[test]
    fn truncated_input_reports_location() {
        let bytes = serialize_diagram(&cp2());
        let err = parse_diagram(&bytes[..40]).unwrap_err();
        assert!(matches!(err, FormatError::Parse { line: 1, .. }), "{err}");
    }

    #[test]
    fn non_canonical_input_is_re_emitted_canonically() {
        let messy = r#"
        {
          "version": 1,
          "lefschetz": [{"basis_tag": "zz", "cycle": [-1, -1], "id": "P"}],
          "history": [],
          "genus": 0,
          "flags": {"homologically_essential": true, "fibres_connected": true},
          "circles": [
            {"corners": ["q", "p"], "coorientable": false,
             "component": {"parity": 1, "kind": "necklace", "k": 2}}
          ]
        }"#;
        let d = parse_diagram(messy.as_bytes()).unwrap();
        let out = String::from_utf8(serialize_diagram(&d)).unwrap();
        assert!(out.starts_with(r#"{"circles":[{"component":{"k":2,"kind":"necklace","parity":1},"coorientable":true,"corners":["c0","c1"]}]"#));
        assert!(out.contains(r#""lefschetz":[{"basis_tag":"b0","cycle":[1,1],"id":"L0"}]"#));
    }

    #[test]
    fn version_and_field_errors() {
        let text = String::from_utf8(serialize_diagram(&cp2())).unwrap();
        let v2 = text.replace("\"version\":1", "\"version\":2");
        assert!(matches!(
            parse_diagram(v2.as_bytes()),
            Err(FormatError::Version(_))
        ));
        let none = text.replace(",\"version\":1", "");
        assert!(matches!(
            parse_diagram(none.as_bytes()),
            Err(FormatError::Version(_))
        ));
        let parity = text.replace("\"parity\":1", "\"parity\":0");
        assert!(matches!(
            parse_diagram(parity.as_bytes()),
            Err(FormatError::Field { .. })
        ));
        let kind = text.replace("necklace", "bouquet");
        assert!(matches!(
            parse_diagram(kind.as_bytes()),
            Err(FormatError::Field { .. })
        ));
        let extra = text.replace("\"genus\":0", "\"genus\":0,\"colour\":1");
        assert!(matches!(
            parse_diagram(extra.as_bytes()),
            Err(FormatError::Parse { .. })
        ));
    }

    #[test]
    fn invalid_diagrams_still_parse() {
        let text = String::from_utf8(serialize_diagram(&cp2())).unwrap();
        let wrong_k = text.replace("\"k\":3", "\"k\":5");
        let d = parse_diagram(wrong_k.as_bytes()).unwrap();
        assert_eq!(crate::diagram::validate(&d).len(), 1);
    }
}
