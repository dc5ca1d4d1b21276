//! Building-block diagrams from torus actions, the two connected-sum families
//! and a cross-check of constructed diagrams against closed-form invariants.
//!
//! Betti numbers attached to entries come from connected-sum arithmetic, not
//! from the diagrams, so [`verify_entry`] compares two independent routes.
//!
//! Families:
//!
//! * `X(n, ℓ) = #n(S²×S²) # ℓ(S¹×S³)`, admissible for `ℓ ≤ n + 1`;
//! * `Y(n, m, ℓ) = #n CP² # m CP²bar # ℓ(S¹×S³)`, admissible for
//!   `ℓ ≤ ⌊(n + m + 2)/2⌋`.
//!
//! Members are built by gluing blocks at corners and then applying `ℓ`
//! self-sums at the first two corners of the canonical form.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::diagram::{
    self, canonical_form, corner_connected_sum, self_connected_sum, BoundaryCircle, CornerRef,
    DiagramError, FibrationDiagram, GcsMode, HistoryRecord, Parity,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CatalogError {
    #[error("unknown catalog entry {0:?}")]
    UnknownName(String),
    #[error("sphere_bundle_family needs 2g + h > 1 (got g = {g}, h = {h})")]
    DegenerateBundleFamily { g: u32, h: u32 },
    #[error(
        "{name} admits no boundary Lefschetz fibration: Euler characteristic {chi} is negative"
    )]
    Inadmissible { name: String, chi: i64 },
    #[error("Y family needs n + m >= 1")]
    EmptyY,
    #[error("{name}: {discrepancies:?}")]
    Discrepancy {
        name: String,
        discrepancies: Vec<Discrepancy>,
    },
    #[error(transparent)]
    Diagram(#[from] DiagramError),
}

/// `(b₀, b₁, b₂, b₂⁺, b₃, b₄)`
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Betti {
    pub b0: i64,
    pub b1: i64,
    pub b2: i64,
    pub b2_plus: i64,
    pub b3: i64,
    pub b4: i64,
}

impl Betti {
    pub const fn new(b0: i64, b1: i64, b2: i64, b2_plus: i64, b3: i64, b4: i64) -> Self {
        Betti {
            b0,
            b1,
            b2,
            b2_plus,
            b3,
            b4,
        }
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.b0 - self.b1 + self.b2 - self.b3 + self.b4
    }

    /// Topological condition for a stable generalized complex structure to
    /// exist: `1 − b₁ + b₂⁺` even.
    pub fn gcs_parity_even(&self) -> bool {
        (1 - self.b1 + self.b2_plus).rem_euclid(2) == 0
    }
}

/// Closed-form invariants predicted for an entry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Expected {
    pub corner_count: i64,
    pub lefschetz_count: i64,
    /// `+1` or `−1`.
    pub total_parity: i8,
}

/// Names the catalog understands.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EntryName {
    Cp2,
    Cp2Bar,
    S2xS2,
    S4,
    S3xS1Disk,
    S3xS1Annulus,
    SphereBundleFamily { g: u32, h: u32 },
    X { n: u32, l: u32 },
    Y { n: u32, m: u32, l: u32 },
}

impl fmt::Display for EntryName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EntryName::Cp2 => f.write_str("cp2"),
            EntryName::Cp2Bar => f.write_str("cp2bar"),
            EntryName::S2xS2 => f.write_str("s2xs2"),
            EntryName::S4 => f.write_str("s4"),
            EntryName::S3xS1Disk => f.write_str("s3xs1_disk"),
            EntryName::S3xS1Annulus => f.write_str("s3xs1_annulus"),
            EntryName::SphereBundleFamily { g, h } => write!(f, "sphere_bundle_family({g},{h})"),
            EntryName::X { n, l } => write!(f, "X({n},{l})"),
            EntryName::Y { n, m, l } => write!(f, "Y({n},{m},{l})"),
        }
    }
}

impl FromStr for EntryName {
    type Err = CatalogError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let unknown = || CatalogError::UnknownName(s.to_string());
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let simple = match compact.as_str() {
            "cp2" => Some(EntryName::Cp2),
            "cp2bar" => Some(EntryName::Cp2Bar),
            "s2xs2" => Some(EntryName::S2xS2),
            "s4" => Some(EntryName::S4),
            "s3xs1_disk" => Some(EntryName::S3xS1Disk),
            "s3xs1_annulus" => Some(EntryName::S3xS1Annulus),
            _ => None,
        };
        if let Some(name) = simple {
            return Ok(name);
        }
        let (head, rest) = compact.split_once('(').ok_or_else(unknown)?;
        let args = rest.strip_suffix(')').ok_or_else(unknown)?;
        let args: Vec<u32> = args
            .split(',')
            .map(|a| a.parse::<u32>())
            .collect::<Result<_, _>>()
            .map_err(|_| unknown())?;
        match (head, args.as_slice()) {
            ("sphere_bundle_family", &[g, h]) => Ok(EntryName::SphereBundleFamily { g, h }),
            ("X", &[n, l]) => Ok(EntryName::X { n, l }),
            ("Y", &[n, m, l]) => Ok(EntryName::Y { n, m, l }),
            _ => Err(unknown()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CatalogEntry {
    pub name: String,
    pub diagram: FibrationDiagram,
    pub betti: Betti,
    pub expected: Expected,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InvariantReport {
    pub chi: i64,
    pub corner_count: i64,
    pub lefschetz_count: i64,
    pub total_parity: i8,
    pub admits_gcs_total: bool,
    pub admits_gcs_per_component: bool,
}

impl InvariantReport {
    pub fn of(d: &FibrationDiagram) -> Result<Self, DiagramError> {
        Ok(InvariantReport {
            chi: diagram::euler_characteristic(d)?,
            corner_count: d.corner_count() as i64,
            lefschetz_count: d.lefschetz_count() as i64,
            total_parity: diagram::total_parity(d).value(),
            admits_gcs_total: diagram::admits_stable_gcs(d, GcsMode::Total),
            admits_gcs_per_component: diagram::admits_stable_gcs(d, GcsMode::PerComponent),
        })
    }
}

/// One disagreement between the diagram and the closed forms.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "invariant", rename_all = "snake_case")]
pub enum Discrepancy {
    Invalid {
        violations: Vec<String>,
    },
    EulerCharacteristic {
        diagram: i64,
        betti: i64,
    },
    CornerCount {
        diagram: i64,
        expected: i64,
    },
    LefschetzCount {
        diagram: i64,
        expected: i64,
    },
    TotalParity {
        diagram: i8,
        expected: i8,
    },
    GcsCriterion {
        admits_gcs_total: bool,
        betti_even: bool,
    },
}

fn block(name: EntryName, diagram: FibrationDiagram, betti: Betti) -> CatalogEntry {
    let expected = Expected {
        corner_count: diagram.corner_count() as i64,
        lefschetz_count: diagram.lefschetz_count() as i64,
        total_parity: diagram::total_parity(&diagram).value(),
    };
    CatalogEntry {
        name: name.to_string(),
        diagram,
        betti,
        expected,
    }
}

fn with_history(mut d: FibrationDiagram, op: &str, detail: &str) -> FibrationDiagram {
    d.history.push(HistoryRecord::new(op, detail));
    d
}

pub fn building_block(name: EntryName) -> Result<CatalogEntry, CatalogError> {
    use EntryName::*;
    let entry = match name {
        Cp2 => block(
            name,
            with_history(
                FibrationDiagram::disk(3, Parity::Plus),
                "block",
                "cp2: toric triangle",
            ),
            Betti::new(1, 0, 1, 1, 0, 1),
        ),
        Cp2Bar => block(
            name,
            with_history(
                FibrationDiagram::disk(3, Parity::Minus),
                "block",
                "cp2bar: reversed-orientation T2 quotient",
            ),
            Betti::new(1, 0, 1, 0, 0, 1),
        ),
        S2xS2 => block(
            name,
            with_history(
                FibrationDiagram::disk(4, Parity::Plus),
                "block",
                "s2xs2: toric square",
            ),
            Betti::new(1, 0, 2, 1, 0, 1),
        ),
        S4 => block(
            name,
            with_history(
                FibrationDiagram::disk(2, Parity::Minus),
                "block",
                "s4: lune",
            ),
            Betti::new(1, 0, 0, 0, 0, 1),
        ),
        S3xS1Disk => block(
            name,
            with_history(
                FibrationDiagram::disk(0, Parity::Plus),
                "block",
                "s3xs1: disk base, single torus",
            ),
            Betti::new(1, 1, 0, 0, 1, 1),
        ),
        S3xS1Annulus => {
            let mut d = FibrationDiagram::disk(0, Parity::Plus);
            d.circles
                .push(BoundaryCircle::with_corners(Vec::new(), Parity::Plus));
            block(
                name,
                with_history(d, "block", "s3xs1: annulus base, two tori"),
                Betti::new(1, 1, 0, 0, 1, 1),
            )
        }
        SphereBundleFamily { g, h } => {
            if 2 * g + h <= 1 {
                return Err(CatalogError::DegenerateBundleFamily { g, h });
            }
            let mut d = FibrationDiagram::closed(g);
            for _ in 0..h {
                d.circles
                    .push(BoundaryCircle::with_corners(Vec::new(), Parity::Plus));
            }
            // (#r S¹×S²)×S¹ with r = 2g + h − 1
            let r = (2 * g + h - 1) as i64;
            block(
                name,
                with_history(
                    d,
                    "block",
                    &format!("(#{r} S1xS2)xS1 over genus-{g} base with {h} holes"),
                ),
                Betti::new(1, r + 1, 2 * r, r, r + 1, 1),
            )
        }
        X { n, l } => return family_x(n, l),
        Y { n, m, l } => return family_y(n, m, l),
    };
    Ok(entry)
}

/// Glue diagrams left to right at their first corners.
fn glue_all(parts: Vec<FibrationDiagram>) -> Result<FibrationDiagram, DiagramError> {
    let mut iter = parts.into_iter();
    let first = iter.next().expect("at least one block");
    iter.try_fold(first, |acc, next| {
        corner_connected_sum(&acc, &CornerRef::Index(0), &next, &CornerRef::Index(0))
    })
}

/// `ℓ` self-sums, each at the first two corners of the canonical form.
fn self_sum_times(mut d: FibrationDiagram, l: u32) -> Result<FibrationDiagram, DiagramError> {
    for _ in 0..l {
        d = canonical_form(&d);
        d = self_connected_sum(&d, &CornerRef::Index(0), &CornerRef::Index(1))?;
    }
    Ok(canonical_form(&d))
}

fn block_diagram(name: EntryName) -> FibrationDiagram {
    building_block(name)
        .expect("fixed building blocks always construct")
        .diagram
}

pub fn family_x(n: u32, l: u32) -> Result<CatalogEntry, CatalogError> {
    let name = EntryName::X { n, l }.to_string();
    let chi = 2 + 2 * n as i64 - 2 * l as i64;
    if chi < 0 {
        return Err(CatalogError::Inadmissible { name, chi });
    }
    let parts = if n == 0 {
        vec![block_diagram(EntryName::S4)]
    } else {
        vec![block_diagram(EntryName::S2xS2); n as usize]
    };
    let diagram = self_sum_times(glue_all(parts)?, l)?;
    let (n, l) = (n as i64, l as i64);
    Ok(CatalogEntry {
        name,
        diagram,
        betti: Betti::new(1, l, 2 * n, n, l, 1),
        expected: Expected {
            corner_count: 2 * n + 2 - 2 * l,
            lefschetz_count: 0,
            total_parity: Parity::from_exponent(n - 1 + l).value(),
        },
    })
}

pub fn family_y(n: u32, m: u32, l: u32) -> Result<CatalogEntry, CatalogError> {
    if n + m == 0 {
        return Err(CatalogError::EmptyY);
    }
    let name = EntryName::Y { n, m, l }.to_string();
    let chi = 2 + n as i64 + m as i64 - 2 * l as i64;
    if chi < 0 {
        return Err(CatalogError::Inadmissible { name, chi });
    }
    let mut parts = vec![block_diagram(EntryName::Cp2); n as usize];
    parts.extend(vec![block_diagram(EntryName::Cp2Bar); m as usize]);
    let diagram = self_sum_times(glue_all(parts)?, l)?;
    let (n, m, l) = (n as i64, m as i64, l as i64);
    Ok(CatalogEntry {
        name,
        diagram,
        betti: Betti::new(1, l, n + m, n, l, 1),
        expected: Expected {
            corner_count: n + m + 2 - 2 * l,
            lefschetz_count: 0,
            total_parity: Parity::from_exponent(n - 1 + l).value(),
        },
    })
}

/// All discrepancies between the entry's diagram and its closed forms.
pub fn discrepancies(e: &CatalogEntry) -> Vec<Discrepancy> {
    let violations = diagram::validate(&e.diagram);
    if !violations.is_empty() {
        return vec![Discrepancy::Invalid {
            violations: violations.iter().map(|v| v.to_string()).collect(),
        }];
    }
    let report = InvariantReport::of(&e.diagram).expect("validated above");
    let mut out = Vec::new();
    let betti_chi = e.betti.euler_characteristic();
    if report.chi != betti_chi {
        out.push(Discrepancy::EulerCharacteristic {
            diagram: report.chi,
            betti: betti_chi,
        });
    }
    if report.corner_count != e.expected.corner_count {
        out.push(Discrepancy::CornerCount {
            diagram: report.corner_count,
            expected: e.expected.corner_count,
        });
    }
    if report.lefschetz_count != e.expected.lefschetz_count {
        out.push(Discrepancy::LefschetzCount {
            diagram: report.lefschetz_count,
            expected: e.expected.lefschetz_count,
        });
    }
    if report.total_parity != e.expected.total_parity {
        out.push(Discrepancy::TotalParity {
            diagram: report.total_parity,
            expected: e.expected.total_parity,
        });
    }
    if report.admits_gcs_total != e.betti.gcs_parity_even() {
        out.push(Discrepancy::GcsCriterion {
            admits_gcs_total: report.admits_gcs_total,
            betti_even: e.betti.gcs_parity_even(),
        });
    }
    out
}

/// Invariants computed from the diagram, or a discrepancy error naming every
/// invariant that disagrees with the closed forms.
pub fn verify_entry(e: &CatalogEntry) -> Result<InvariantReport, CatalogError> {
    let found = discrepancies(e);
    if !found.is_empty() {
        return Err(CatalogError::Discrepancy {
            name: e.name.clone(),
            discrepancies: found,
        });
    }
    Ok(InvariantReport::of(&e.diagram)?)
}

pub const BUILDING_BLOCKS: [EntryName; 6] = [
    EntryName::Cp2,
    EntryName::Cp2Bar,
    EntryName::S2xS2,
    EntryName::S4,
    EntryName::S3xS1Disk,
    EntryName::S3xS1Annulus,
];

/// Building blocks, a few bundle-family members and every admissible family
/// member with `n, m ≤ max`.
pub fn standard_names(max: u32) -> Vec<EntryName> {
    let mut out: Vec<EntryName> = BUILDING_BLOCKS.to_vec();
    for (g, h) in [(0, 2), (0, 3), (1, 0), (1, 1), (1, 2), (2, 1)] {
        out.push(EntryName::SphereBundleFamily { g, h });
    }
    for n in 0..=max {
        for l in 0..=n + 1 {
            out.push(EntryName::X { n, l });
        }
    }
    for n in 0..=max {
        for m in 0..=max {
            if n + m == 0 {
                continue;
            }
            for l in 0..=(n + m + 2) / 2 {
                out.push(EntryName::Y { n, m, l });
            }
        }
    }
    out
}

/// One line of a catalog manifest.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub name: String,
    pub chi: i64,
    pub betti: Betti,
    pub expected: Expected,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    pub version: u32,
    pub entries: Vec<ManifestEntry>,
}

pub fn manifest(names: &[EntryName]) -> Result<Manifest, CatalogError> {
    let entries = names
        .iter()
        .map(|&n| {
            let e = building_block(n)?;
            Ok(ManifestEntry {
                name: e.name,
                chi: e.betti.euler_characteristic(),
                betti: e.betti,
                expected: e.expected,
            })
        })
        .collect::<Result<_, CatalogError>>()?;
    Ok(Manifest {
        version: 1,
        entries,
    })
}

/// Result of checking one manifest line.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EntryReport {
    pub name: String,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub report: Option<InvariantReport>,
    pub discrepancies: Vec<Discrepancy>,
}

/// Build the named entry, then check the diagram against the manifest's
/// stated invariants as well as the catalog's own closed forms.
pub fn verify_manifest_entry(m: &ManifestEntry) -> Result<EntryReport, CatalogError> {
    let name: EntryName = m.name.parse()?;
    let built = building_block(name)?;
    let entry = CatalogEntry {
        betti: m.betti,
        expected: m.expected,
        ..built
    };
    let mut found = discrepancies(&entry);
    let report = InvariantReport::of(&entry.diagram).ok();
    if let Some(r) = &report {
        if r.chi != m.chi {
            found.push(Discrepancy::EulerCharacteristic {
                diagram: r.chi,
                betti: m.chi,
            });
        }
    }
    Ok(EntryReport {
        name: entry.name,
        pass: found.is_empty(),
        report,
        discrepancies: found,
    })
}
