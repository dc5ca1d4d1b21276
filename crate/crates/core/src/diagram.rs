//! Combinatorial base diagrams of boundary Lefschetz fibrations and the
//! surgery calculus acting on them.
//!
//! A diagram records the base surface (its genus and boundary circles), the
//! corners on each circle (one per elliptic–elliptic point of the divisor),
//! the divisor component living over each circle, and the Lefschetz points in
//! the interior. Parity is tracked per component; individual corner indices
//! are never stored, so every surgery updates parities only through the
//! component-level gluing rules.
//!
//! All surgeries are value operations: they take diagrams by reference and
//! return a fresh diagram with a record appended to its history.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Mul, Neg};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::homology::{self, Cycle, HomologyError};

/// Index of a divisor component: `+1` or `−1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Parity {
    Minus,
    Plus,
}

impl Parity {
    pub fn value(self) -> i8 {
        match self {
            Parity::Plus => 1,
            Parity::Minus => -1,
        }
    }

    pub fn from_value(v: i64) -> Option<Parity> {
        match v {
            1 => Some(Parity::Plus),
            -1 => Some(Parity::Minus),
            _ => None,
        }
    }

    /// `(−1)^e`
    pub fn from_exponent(e: i64) -> Parity {
        if e.rem_euclid(2) == 0 {
            Parity::Plus
        } else {
            Parity::Minus
        }
    }
}

impl Mul for Parity {
    type Output = Parity;

    fn mul(self, rhs: Parity) -> Parity {
        if self == rhs {
            Parity::Plus
        } else {
            Parity::Minus
        }
    }
}

impl Neg for Parity {
    type Output = Parity;

    fn neg(self) -> Parity {
        match self {
            Parity::Plus => Parity::Minus,
            Parity::Minus => Parity::Plus,
        }
    }
}

impl fmt::Display for Parity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Parity::Plus => "+1",
            Parity::Minus => "-1",
        })
    }
}

/// Topological type of one connected component of the divisor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ComponentKind {
    /// `k` spheres meeting pairwise transversely in a cycle.
    Necklace(u32),
    Torus,
    KleinBottle,
}

impl ComponentKind {
    /// Smooth component type forced on a cornerless circle by its parity.
    pub fn smooth(parity: Parity) -> ComponentKind {
        match parity {
            Parity::Plus => ComponentKind::Torus,
            Parity::Minus => ComponentKind::KleinBottle,
        }
    }

    /// Kind determined by corner count and parity.
    pub fn for_corners(corners: usize, parity: Parity) -> ComponentKind {
        if corners == 0 {
            ComponentKind::smooth(parity)
        } else {
            ComponentKind::Necklace(corners as u32)
        }
    }

    fn rank(&self) -> u8 {
        match self {
            ComponentKind::Necklace(_) => 0,
            ComponentKind::Torus => 1,
            ComponentKind::KleinBottle => 2,
        }
    }
}

impl fmt::Display for ComponentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ComponentKind::Necklace(k) => write!(f, "necklace({k})"),
            ComponentKind::Torus => f.write_str("torus"),
            ComponentKind::KleinBottle => f.write_str("klein_bottle"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct DivisorComponent {
    pub kind: ComponentKind,
    pub parity: Parity,
}

impl DivisorComponent {
    pub fn new(kind: ComponentKind, parity: Parity) -> Self {
        DivisorComponent { kind, parity }
    }
}

/// One boundary circle of the base together with the divisor component over it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundaryCircle {
    /// Corner labels in cyclic order.
    pub corners: Vec<String>,
    /// Only meaningful when `corners` is empty.
    pub coorientable: bool,
    pub component: DivisorComponent,
}

impl BoundaryCircle {
    /// Circle whose component kind and co-orientability follow from the
    /// corner count and parity.
    pub fn with_corners(corners: Vec<String>, parity: Parity) -> Self {
        let kind = ComponentKind::for_corners(corners.len(), parity);
        BoundaryCircle {
            corners,
            coorientable: parity == Parity::Plus,
            component: DivisorComponent::new(kind, parity),
        }
    }

    pub fn corner_count(&self) -> usize {
        self.corners.len()
    }

    fn sort_key(&self) -> (usize, Parity, u8) {
        (
            self.corners.len(),
            self.component.parity,
            self.component.kind.rank(),
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LefschetzPoint {
    pub id: String,
    pub cycle: Option<Cycle>,
    /// Names the reference-fibre basis in which `cycle` is written. Cycles
    /// under different tags are never compared.
    pub basis_tag: Option<String>,
}

impl LefschetzPoint {
    pub fn bare(id: impl Into<String>) -> Self {
        LefschetzPoint {
            id: id.into(),
            cycle: None,
            basis_tag: None,
        }
    }
}

/// Provenance entry appended by every surgery.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HistoryRecord {
    pub op: String,
    pub detail: String,
}

impl HistoryRecord {
    pub fn new(op: impl Into<String>, detail: impl Into<String>) -> Self {
        HistoryRecord {
            op: op.into(),
            detail: detail.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FibrationDiagram {
    /// Genus of the base surface.
    pub genus: u32,
    pub circles: Vec<BoundaryCircle>,
    pub lefschetz: Vec<LefschetzPoint>,
    pub homologically_essential: bool,
    pub fibres_connected: bool,
    pub oriented: bool,
    pub history: Vec<HistoryRecord>,
}

impl FibrationDiagram {
    /// Closed base of the given genus with no divisor and no singular points.
    pub fn closed(genus: u32) -> Self {
        FibrationDiagram {
            genus,
            circles: Vec::new(),
            lefschetz: Vec::new(),
            homologically_essential: true,
            fibres_connected: true,
            oriented: true,
            history: Vec::new(),
        }
    }

    /// Disk base with a single necklace of `k` spheres (or a smooth component
    /// when `k = 0`).
    pub fn disk(k: usize, parity: Parity) -> Self {
        let corners = (0..k).map(|i| format!("c{i}")).collect();
        let mut d = FibrationDiagram::closed(0);
        d.circles
            .push(BoundaryCircle::with_corners(corners, parity));
        d
    }

    pub fn corner_count(&self) -> usize {
        self.circles.iter().map(|c| c.corners.len()).sum()
    }

    pub fn lefschetz_count(&self) -> usize {
        self.lefschetz.len()
    }

    pub fn components(&self) -> impl Iterator<Item = &DivisorComponent> {
        self.circles.iter().map(|c| &c.component)
    }

    /// `2 − 2g − h` for the base surface.
    pub fn base_euler_characteristic(&self) -> i64 {
        2 - 2 * self.genus as i64 - self.circles.len() as i64
    }

    /// Corners in enumeration order as `(circle index, position, id)`.
    pub fn corners(&self) -> impl Iterator<Item = (usize, usize, &str)> {
        self.circles.iter().enumerate().flat_map(|(ci, c)| {
            c.corners
                .iter()
                .enumerate()
                .map(move |(pos, id)| (ci, pos, id.as_str()))
        })
    }

    pub fn resolve_corner(&self, r: &CornerRef) -> Result<(usize, usize), DiagramError> {
        let found = match r {
            CornerRef::Index(i) => self.corners().nth(*i),
            CornerRef::Id(id) => self.corners().find(|(_, _, c)| *c == id),
        };
        found
            .map(|(ci, pos, _)| (ci, pos))
            .ok_or_else(|| DiagramError::UnknownCorner(r.to_string()))
    }

    pub fn resolve_lefschetz(&self, r: &LefschetzRef) -> Result<usize, DiagramError> {
        match r {
            LefschetzRef::Index(i) if *i < self.lefschetz.len() => Ok(*i),
            LefschetzRef::Id(id) => self
                .lefschetz
                .iter()
                .position(|l| &l.id == id)
                .ok_or_else(|| DiagramError::UnknownLefschetz(r.to_string())),
            _ => Err(DiagramError::UnknownLefschetz(r.to_string())),
        }
    }

    fn all_ids(&self) -> BTreeSet<String> {
        self.corners()
            .map(|(_, _, id)| id.to_string())
            .chain(self.lefschetz.iter().map(|l| l.id.clone()))
            .collect()
    }

    fn all_basis_tags(&self) -> BTreeSet<String> {
        self.lefschetz
            .iter()
            .filter_map(|l| l.basis_tag.clone())
            .collect()
    }
}

/// Reference to a corner: position in enumeration order or label.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CornerRef {
    Index(usize),
    Id(String),
}

impl fmt::Display for CornerRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CornerRef::Index(i) => write!(f, "#{i}"),
            CornerRef::Id(s) => f.write_str(s),
        }
    }
}

impl FromStr for CornerRef {
    type Err = std::convert::Infallible;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s.parse::<usize>() {
            Ok(i) => CornerRef::Index(i),
            Err(_) => CornerRef::Id(s.to_string()),
        })
    }
}

impl From<usize> for CornerRef {
    fn from(i: usize) -> Self {
        CornerRef::Index(i)
    }
}

impl From<&str> for CornerRef {
    fn from(s: &str) -> Self {
        CornerRef::Id(s.to_string())
    }
}

/// Reference to a Lefschetz point: position or label.
pub type LefschetzRef = CornerRef;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DiagramError {
    #[error("invalid diagram: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<Violation>),
    #[error("no corner {0}")]
    UnknownCorner(String),
    #[error("no Lefschetz point {0}")]
    UnknownLefschetz(String),
    #[error("no boundary circle {0}")]
    UnknownCircle(usize),
    #[error("the two corner references coincide")]
    IdenticalCorners,
    #[error("surgery requires connected fibres")]
    FibresNotConnected,
    #[error("surgery requires an oriented diagram")]
    Unoriented,
    #[error("dual-pair evidence rejected: {0}")]
    DualPair(String),
    #[error(transparent)]
    Homology(#[from] HomologyError),
}

/// One failed invariant reported by [`validate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    KindMismatch {
        circle: usize,
        kind: ComponentKind,
        corners: usize,
    },
    SmoothParity {
        circle: usize,
        kind: ComponentKind,
        parity: Parity,
    },
    CoorientationMismatch {
        circle: usize,
    },
    DuplicateId(String),
    ZeroCycle {
        lefschetz: String,
    },
    NonPrimitiveCycle {
        lefschetz: String,
        cycle: Cycle,
    },
    Unoriented,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::KindMismatch {
                circle,
                kind,
                corners,
            } => write!(
                f,
                "circle {circle}: component {kind} on a circle with {corners} corners"
            ),
            Violation::SmoothParity {
                circle,
                kind,
                parity,
            } => write!(f, "circle {circle}: {kind} component with parity {parity}"),
            Violation::CoorientationMismatch { circle } => {
                write!(
                    f,
                    "circle {circle}: co-orientability disagrees with component type"
                )
            }
            Violation::DuplicateId(id) => write!(f, "duplicate label {id}"),
            Violation::ZeroCycle { lefschetz } => {
                write!(f, "Lefschetz point {lefschetz}: zero vanishing cycle")
            }
            Violation::NonPrimitiveCycle { lefschetz, cycle } => {
                write!(
                    f,
                    "Lefschetz point {lefschetz}: vanishing cycle {cycle} is not primitive"
                )
            }
            Violation::Unoriented => f.write_str("diagram is not oriented"),
        }
    }
}

pub fn validate(d: &FibrationDiagram) -> Vec<Violation> {
    let mut out = Vec::new();
    for (i, c) in d.circles.iter().enumerate() {
        let k = c.corners.len();
        let comp = c.component;
        match comp.kind {
            ComponentKind::Necklace(n) if n as usize != k || n == 0 => {
                out.push(Violation::KindMismatch {
                    circle: i,
                    kind: comp.kind,
                    corners: k,
                });
            }
            ComponentKind::Torus | ComponentKind::KleinBottle if k != 0 => {
                out.push(Violation::KindMismatch {
                    circle: i,
                    kind: comp.kind,
                    corners: k,
                });
            }
            _ => {}
        }
        let smooth_ok = match comp.kind {
            ComponentKind::Torus => comp.parity == Parity::Plus,
            ComponentKind::KleinBottle => comp.parity == Parity::Minus,
            ComponentKind::Necklace(_) => true,
        };
        if !smooth_ok {
            out.push(Violation::SmoothParity {
                circle: i,
                kind: comp.kind,
                parity: comp.parity,
            });
        }
        if k == 0 {
            let expected = matches!(comp.kind, ComponentKind::Torus);
            if matches!(comp.kind, ComponentKind::Torus | ComponentKind::KleinBottle)
                && c.coorientable != expected
            {
                out.push(Violation::CoorientationMismatch { circle: i });
            }
        }
    }

    let mut seen = BTreeSet::new();
    let ids = d
        .corners()
        .map(|(_, _, id)| id)
        .chain(d.lefschetz.iter().map(|l| l.id.as_str()));
    for id in ids {
        if !seen.insert(id) {
            out.push(Violation::DuplicateId(id.to_string()));
        }
    }

    for l in &d.lefschetz {
        if let Some(c) = l.cycle {
            match homology::is_primitive(c) {
                Err(_) => out.push(Violation::ZeroCycle {
                    lefschetz: l.id.clone(),
                }),
                Ok(false) => out.push(Violation::NonPrimitiveCycle {
                    lefschetz: l.id.clone(),
                    cycle: c,
                }),
                Ok(true) => {}
            }
        }
    }

    if !d.oriented {
        out.push(Violation::Unoriented);
    }
    out
}

pub fn ensure_valid(d: &FibrationDiagram) -> Result<(), DiagramError> {
    let v = validate(d);
    if v.is_empty() {
        Ok(())
    } else {
        Err(DiagramError::Invalid(v))
    }
}

/// `χ(M) = k + ℓ`: corners plus Lefschetz points.
pub fn euler_characteristic(d: &FibrationDiagram) -> Result<i64, DiagramError> {
    ensure_valid(d)?;
    Ok((d.corner_count() + d.lefschetz_count()) as i64)
}

/// Product of all component parities (`+1` for an empty divisor).
pub fn total_parity(d: &FibrationDiagram) -> Parity {
    d.components().fold(Parity::Plus, |acc, c| acc * c.parity)
}

fn surgery_preconditions(d: &FibrationDiagram) -> Result<(), DiagramError> {
    ensure_valid(d)?;
    if !d.oriented {
        return Err(DiagramError::Unoriented);
    }
    if !d.fibres_connected {
        return Err(DiagramError::FibresNotConnected);
    }
    Ok(())
}

/// Produce a label not in `taken`, preferring `want`.
fn fresh_label(want: &str, taken: &BTreeSet<String>) -> String {
    if !taken.contains(want) {
        return want.to_string();
    }
    let mut candidate = format!("{want}'");
    while taken.contains(&candidate) {
        candidate.push('\'');
    }
    candidate
}

fn next_label(prefix: &str, taken: &BTreeSet<String>) -> String {
    (0..)
        .map(|i| format!("{prefix}{i}"))
        .find(|s| !taken.contains(s))
        .expect("unbounded label supply")
}

/// Rename labels and basis tags of `d2` that collide with those of `d1`.
fn disjoint_copy(d1: &FibrationDiagram, d2: &FibrationDiagram) -> FibrationDiagram {
    let mut taken = d1.all_ids();
    let mut out = d2.clone();
    for circle in &mut out.circles {
        for id in &mut circle.corners {
            let new = fresh_label(id, &taken);
            taken.insert(new.clone());
            *id = new;
        }
    }
    for l in &mut out.lefschetz {
        let new = fresh_label(&l.id, &taken);
        taken.insert(new.clone());
        l.id = new;
    }
    let mut tags = d1.all_basis_tags();
    let mut renamed: BTreeMap<String, String> = BTreeMap::new();
    for l in &mut out.lefschetz {
        if let Some(tag) = l.basis_tag.as_mut() {
            let new = renamed
                .entry(tag.clone())
                .or_insert_with(|| {
                    let n = fresh_label(tag, &tags);
                    tags.insert(n.clone());
                    n
                })
                .clone();
            *tag = new;
        }
    }
    out
}

/// Corners of `circle` in cyclic order starting just after position `pos`,
/// excluding `pos` itself.
fn corners_after(circle: &BoundaryCircle, pos: usize) -> Vec<String> {
    let k = circle.corners.len();
    (1..k)
        .map(|step| circle.corners[(pos + step) % k].clone())
        .collect()
}

/// Oriented corner connected sum of two diagrams.
///
/// The circles carrying the two corners merge into one circle with
/// `k₁ + k₂ − 2` corners and the merged component has parity `−ε₁ε₂`.
pub fn corner_connected_sum(
    d1: &FibrationDiagram,
    corner1: &CornerRef,
    d2: &FibrationDiagram,
    corner2: &CornerRef,
) -> Result<FibrationDiagram, DiagramError> {
    surgery_preconditions(d1)?;
    surgery_preconditions(d2)?;
    let (ci1, p1) = d1.resolve_corner(corner1)?;
    let (ci2, p2) = d2.resolve_corner(corner2)?;
    let d2 = disjoint_copy(d1, d2);
    let c1 = &d1.circles[ci1];
    let c2 = &d2.circles[ci2];

    let mut corners = corners_after(c1, p1);
    corners.extend(corners_after(c2, p2));
    let parity = -(c1.component.parity * c2.component.parity);
    let merged = BoundaryCircle::with_corners(corners, parity);

    let mut circles = d1.circles.clone();
    circles[ci1] = merged;
    circles.extend(
        d2.circles
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != ci2)
            .map(|(_, c)| c.clone()),
    );

    let mut lefschetz = d1.lefschetz.clone();
    lefschetz.extend(d2.lefschetz.iter().cloned());

    let mut history = d1.history.clone();
    history.extend(d2.history.iter().cloned());
    history.push(HistoryRecord::new(
        "corner_sum",
        format!(
            "glued corner {} to corner {}; merged parity {}",
            c1.corners[p1], c2.corners[p2], parity
        ),
    ));

    Ok(FibrationDiagram {
        genus: d1.genus + d2.genus,
        circles,
        lefschetz,
        homologically_essential: d1.homologically_essential && d2.homologically_essential,
        fibres_connected: true,
        oriented: true,
        history,
    })
}

/// Self-connected sum at two distinct corners; the total space becomes
/// `M # (S¹×S³)`.
///
/// Corners on different circles: the circles merge (genus +1) and the
/// component parity is `−ε₁ε₂`. Corners on one circle with parity `ε`: the
/// circle splits in two (genus unchanged), the corners strictly between the
/// references (in cyclic order) going to the first new circle and the rest to
/// the second. The two new components have parity product `−ε`; when that
/// product is `−1`, the circle with fewer corners (the first on a tie)
/// receives `+1`.
pub fn self_connected_sum(
    d: &FibrationDiagram,
    corner1: &CornerRef,
    corner2: &CornerRef,
) -> Result<FibrationDiagram, DiagramError> {
    surgery_preconditions(d)?;
    let a = d.resolve_corner(corner1)?;
    let b = d.resolve_corner(corner2)?;
    if a == b {
        return Err(DiagramError::IdenticalCorners);
    }
    let label_a = d.circles[a.0].corners[a.1].clone();
    let label_b = d.circles[b.0].corners[b.1].clone();

    let mut out = d.clone();
    let detail;
    if a.0 != b.0 {
        let (c1, c2) = (&d.circles[a.0], &d.circles[b.0]);
        let mut corners = corners_after(c1, a.1);
        corners.extend(corners_after(c2, b.1));
        let parity = -(c1.component.parity * c2.component.parity);
        let (keep, drop) = (a.0.min(b.0), a.0.max(b.0));
        out.circles[keep] = BoundaryCircle::with_corners(corners, parity);
        out.circles.remove(drop);
        out.genus += 1;
        detail = format!(
            "M#(S1xS3): joined corners {label_a} and {label_b} on different circles; merged parity {parity}"
        );
    } else {
        let circle = &d.circles[a.0];
        let k = circle.corners.len();
        let (i, j) = (a.1.min(b.1), a.1.max(b.1));
        let between: Vec<String> = circle.corners[i + 1..j].to_vec();
        let rest: Vec<String> = (1..k - (j - i))
            .map(|step| circle.corners[(j + step) % k].clone())
            .collect();
        let product = -circle.component.parity;
        let (p_between, p_rest) = match product {
            Parity::Plus => (Parity::Plus, Parity::Plus),
            Parity::Minus if rest.len() < between.len() => (Parity::Minus, Parity::Plus),
            Parity::Minus => (Parity::Plus, Parity::Minus),
        };
        detail = format!(
            "M#(S1xS3): split circle at corners {label_a} and {label_b}; parities {p_between} ({} corners) and {p_rest} ({} corners)",
            between.len(),
            rest.len()
        );
        out.circles[a.0] = BoundaryCircle::with_corners(between, p_between);
        out.circles
            .insert(a.0 + 1, BoundaryCircle::with_corners(rest, p_rest));
    }
    out.history.push(HistoryRecord::new("self_sum", detail));
    Ok(out)
}

/// Replace the elliptic–elliptic point over a corner by a Lefschetz
/// singularity, smoothing the corner. Parity and `χ` are unchanged.
///
/// With `record_cycles`, the new point carries vanishing cycle `(1,1)` in a
/// fresh basis tag in which the adjacent elliptic cycle is `(1,0)`.
pub fn trade_corner_to_lefschetz(
    d: &FibrationDiagram,
    corner: &CornerRef,
    record_cycles: bool,
) -> Result<FibrationDiagram, DiagramError> {
    surgery_preconditions(d)?;
    let (ci, pos) = d.resolve_corner(corner)?;
    let mut out = d.clone();
    let circle = &mut out.circles[ci];
    let removed = circle.corners.remove(pos);
    let parity = circle.component.parity;
    *circle = BoundaryCircle::with_corners(std::mem::take(&mut circle.corners), parity);

    let id = next_label("L", &d.all_ids());
    let (cycle, basis_tag) = if record_cycles {
        let tag = next_label("t", &d.all_basis_tags());
        (Some(Cycle::new(1, 1)), Some(tag))
    } else {
        (None, None)
    };
    let detail = match &basis_tag {
        Some(tag) => format!(
            "smoothed corner {removed} into Lefschetz point {id}; vanishing cycle (1,1), elliptic cycle (1,0) in basis {tag}"
        ),
        None => format!("smoothed corner {removed} into Lefschetz point {id}"),
    };
    out.lefschetz.push(LefschetzPoint {
        id,
        cycle,
        basis_tag,
    });
    out.history.push(HistoryRecord::new("trade_smooth", detail));
    Ok(out)
}

/// Justification that a Lefschetz point may be traded for a corner.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DualPairEvidence {
    /// Lefschetz and elliptic vanishing cycles, both written in `basis_tag`.
    Cycles {
        lefschetz: Cycle,
        elliptic: Cycle,
        basis_tag: String,
    },
    /// The caller vouches for the dual-pair condition.
    Asserted,
}

/// Remove a Lefschetz point and add a corner to a boundary circle, provided
/// its vanishing cycle forms a dual pair with an elliptic vanishing cycle of
/// that circle. Parity and `χ` are unchanged.
pub fn trade_lefschetz_to_corner(
    d: &FibrationDiagram,
    lefschetz: &LefschetzRef,
    circle: usize,
    evidence: &DualPairEvidence,
) -> Result<FibrationDiagram, DiagramError> {
    surgery_preconditions(d)?;
    let li = d.resolve_lefschetz(lefschetz)?;
    if circle >= d.circles.len() {
        return Err(DiagramError::UnknownCircle(circle));
    }
    let point = &d.lefschetz[li];
    let how = match evidence {
        DualPairEvidence::Asserted => "asserted dual pair".to_string(),
        DualPairEvidence::Cycles {
            lefschetz: c_lef,
            elliptic: c_ell,
            basis_tag,
        } => {
            if let Some(own) = &point.basis_tag {
                if own != basis_tag {
                    return Err(DiagramError::DualPair(format!(
                        "evidence is in basis {basis_tag} but {} is recorded in basis {own}",
                        point.id
                    )));
                }
            }
            if let Some(own) = point.cycle {
                if point.basis_tag.is_some() && !own.same_up_to_sign(c_lef) {
                    return Err(DiagramError::DualPair(format!(
                        "evidence cycle {c_lef} differs from recorded cycle {own}"
                    )));
                }
            }
            if !homology::is_dual_pair(*c_lef, *c_ell)? {
                return Err(DiagramError::DualPair(format!(
                    "{c_lef} and {c_ell} do not generate H1 (|det| = {})",
                    c_lef.det(c_ell).abs()
                )));
            }
            format!("dual pair {c_lef}/{c_ell} in basis {basis_tag}")
        }
    };

    let mut out = d.clone();
    let removed = out.lefschetz.remove(li);
    let new_corner = next_label("c", &d.all_ids());
    let target = &mut out.circles[circle];
    let parity = target.component.parity;
    let mut corners = std::mem::take(&mut target.corners);
    corners.push(new_corner.clone());
    *target = BoundaryCircle::with_corners(corners, parity);
    out.history.push(HistoryRecord::new(
        "trade_singularize",
        format!(
            "traded Lefschetz point {} for corner {new_corner} on circle {circle} ({how})",
            removed.id
        ),
    ));
    Ok(out)
}

/// Existence of a compatible elliptic symplectic form with zero elliptic
/// residue and imaginary parameter.
pub fn admits_elliptic_symplectic(d: &FibrationDiagram) -> bool {
    d.homologically_essential && d.fibres_connected
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GcsMode {
    /// Every component must have parity `+1`.
    PerComponent,
    /// The product of all parities must be `+1`.
    Total,
}

impl FromStr for GcsMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "per-component" | "per_component" => Ok(GcsMode::PerComponent),
            "total" => Ok(GcsMode::Total),
            other => Err(format!(
                "unknown mode {other:?} (expected per-component or total)"
            )),
        }
    }
}

pub fn admits_stable_gcs(d: &FibrationDiagram, mode: GcsMode) -> bool {
    if !admits_elliptic_symplectic(d) {
        return false;
    }
    match mode {
        GcsMode::PerComponent => d.components().all(|c| c.parity == Parity::Plus),
        GcsMode::Total => total_parity(d) == Parity::Plus,
    }
}

/// Representative of the isomorphism class of `d`.
///
/// Circles are sorted by `(corner count, parity, kind)`; corners are
/// relabelled `c0, c1, …` in enumeration order; Lefschetz points are grouped
/// by basis tag, groups are ordered by their sorted (sign-normalized) cycle
/// lists, tags become `b0, b1, …` and points `L0, L1, …`. History is kept
/// as is.
pub fn canonical_form(d: &FibrationDiagram) -> FibrationDiagram {
    let mut circles = d.circles.clone();
    circles.sort_by_key(|c| c.sort_key());
    let mut next = 0usize;
    for c in &mut circles {
        for id in &mut c.corners {
            *id = format!("c{next}");
            next += 1;
        }
        if let ComponentKind::Necklace(_) = c.component.kind {
            c.coorientable = c.component.parity == Parity::Plus;
        }
    }

    // Points without a tag have no basis to compare in, so each forms its own group.
    let mut tagged: BTreeMap<&str, Vec<Option<Cycle>>> = BTreeMap::new();
    let mut groups: Vec<(Vec<Option<Cycle>>, bool)> = Vec::new();
    for l in &d.lefschetz {
        let cycle = l.cycle.map(|c| c.normalized());
        match &l.basis_tag {
            Some(tag) => tagged.entry(tag.as_str()).or_default().push(cycle),
            None => groups.push((vec![cycle], false)),
        }
    }
    groups.extend(tagged.into_values().map(|v| (v, true)));
    for g in &mut groups {
        g.0.sort();
    }
    // Untagged singletons sort before tagged groups with equal cycle lists.
    groups.sort();

    let mut lefschetz = Vec::with_capacity(d.lefschetz.len());
    let mut tag_no = 0usize;
    for (cycles, has_tag) in groups {
        let tag = has_tag.then(|| {
            let t = format!("b{tag_no}");
            tag_no += 1;
            t
        });
        for cycle in cycles {
            lefschetz.push(LefschetzPoint {
                id: format!("L{}", lefschetz.len()),
                cycle,
                basis_tag: tag.clone(),
            });
        }
    }

    FibrationDiagram {
        genus: d.genus,
        circles,
        lefschetz,
        homologically_essential: d.homologically_essential,
        fibres_connected: d.fibres_connected,
        oriented: d.oriented,
        history: d.history.clone(),
    }
}

pub fn is_isomorphic(d1: &FibrationDiagram, d2: &FibrationDiagram) -> bool {
    let mut a = canonical_form(d1);
    let mut b = canonical_form(d2);
    a.history.clear();
    b.history.clear();
    a == b
}
