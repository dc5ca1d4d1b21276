//! First homology of the torus fibre.
//!
//! Cycles are integer vectors in the basis `{e_θ₁, e_θ₂}` of `H₁(T²; Z)` and
//! mapping classes are integer 2×2 matrices of determinant one acting on them.
//! With the complex orientation of the plumbing model this basis is a
//! *negative* basis of the fibre, which is why the twist below carries the
//! sign `x + det(x|c)·c`: with that convention the positive Dehn twist about
//! `e_θ₁ + e_θ₂` is the matrix `[[2, -1], [1, 0]]`.
//!
//! Everything here is exact integer arithmetic.

use std::fmt;
use std::ops::Mul;

use num_integer::Integer;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HomologyError {
    #[error("the zero class is not a valid cycle here")]
    ZeroCycle,
    #[error("cycle {0} is not primitive")]
    NotPrimitive(Cycle),
    #[error("matrix {0:?} has determinant {1}, expected 1")]
    NotUnimodular([[i64; 2]; 2], i64),
}

/// A class `a·e_θ₁ + b·e_θ₂` in `H₁(T²; Z)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(from = "[i64; 2]", into = "[i64; 2]")]
pub struct Cycle {
    pub a: i64,
    pub b: i64,
}

impl From<[i64; 2]> for Cycle {
    fn from([a, b]: [i64; 2]) -> Self {
        Cycle { a, b }
    }
}

impl From<Cycle> for [i64; 2] {
    fn from(c: Cycle) -> Self {
        [c.a, c.b]
    }
}

impl fmt::Display for Cycle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.a, self.b)
    }
}

impl Cycle {
    pub const E1: Cycle = Cycle { a: 1, b: 0 };
    pub const E2: Cycle = Cycle { a: 0, b: 1 };

    pub const fn new(a: i64, b: i64) -> Self {
        Cycle { a, b }
    }

    pub fn is_zero(&self) -> bool {
        self.a == 0 && self.b == 0
    }

    /// gcd of the absolute coordinates; zero for the zero class.
    pub fn content(&self) -> i64 {
        self.a.gcd(&self.b)
    }

    /// Representative of `±c` whose first nonzero coordinate is positive.
    pub fn normalized(&self) -> Cycle {
        if self.a < 0 || (self.a == 0 && self.b < 0) {
            Cycle::new(-self.a, -self.b)
        } else {
            *self
        }
    }

    /// Equality of unoriented classes.
    pub fn same_up_to_sign(&self, other: &Cycle) -> bool {
        self.normalized() == other.normalized()
    }

    /// `det(self | other) = self.a·other.b − self.b·other.a`, the algebraic
    /// intersection number up to the global orientation sign.
    pub fn det(&self, other: &Cycle) -> i64 {
        self.a * other.b - self.b * other.a
    }
}

/// `true` iff `gcd(|a|, |b|) = 1`. The zero class is rejected.
pub fn is_primitive(c: Cycle) -> Result<bool, HomologyError> {
    if c.is_zero() {
        return Err(HomologyError::ZeroCycle);
    }
    Ok(c.content() == 1)
}

fn require_primitive(c: Cycle) -> Result<(), HomologyError> {
    if is_primitive(c)? {
        Ok(())
    } else {
        Err(HomologyError::NotPrimitive(c))
    }
}

/// An element of `SL(2, Z)`, stored row-major.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "[[i64; 2]; 2]", into = "[[i64; 2]; 2]")]
pub struct MappingClass {
    m: [[i64; 2]; 2],
}

impl TryFrom<[[i64; 2]; 2]> for MappingClass {
    type Error = HomologyError;

    fn try_from(m: [[i64; 2]; 2]) -> Result<Self, Self::Error> {
        MappingClass::new(m)
    }
}

impl From<MappingClass> for [[i64; 2]; 2] {
    fn from(m: MappingClass) -> Self {
        m.m
    }
}

impl fmt::Display for MappingClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [[p, q], [r, s]] = self.m;
        write!(f, "[[{p}, {q}], [{r}, {s}]]")
    }
}

impl MappingClass {
    pub const IDENTITY: MappingClass = MappingClass {
        m: [[1, 0], [0, 1]],
    };

    pub fn new(m: [[i64; 2]; 2]) -> Result<Self, HomologyError> {
        let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
        if det != 1 {
            return Err(HomologyError::NotUnimodular(m, det));
        }
        Ok(MappingClass { m })
    }

    pub fn matrix(&self) -> [[i64; 2]; 2] {
        self.m
    }

    pub fn det(&self) -> i64 {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    pub fn trace(&self) -> i64 {
        self.m[0][0] + self.m[1][1]
    }

    pub fn inverse(&self) -> MappingClass {
        let [[p, q], [r, s]] = self.m;
        MappingClass {
            m: [[s, -q], [-r, p]],
        }
    }
}

impl Mul for MappingClass {
    type Output = MappingClass;

    fn mul(self, rhs: MappingClass) -> MappingClass {
        compose(&self, &rhs)
    }
}

impl Mul<Cycle> for MappingClass {
    type Output = Cycle;

    fn mul(self, rhs: Cycle) -> Cycle {
        apply(&self, rhs)
    }
}

/// Positive Dehn twist `T_c(x) = x + det(x|c)·c` about a primitive cycle.
pub fn dehn_twist(c: Cycle) -> Result<MappingClass, HomologyError> {
    require_primitive(c)?;
    // Columns are the images of the basis vectors.
    let col = |x: Cycle| {
        let k = x.det(&c);
        Cycle::new(x.a + k * c.a, x.b + k * c.b)
    };
    let t1 = col(Cycle::E1);
    let t2 = col(Cycle::E2);
    Ok(MappingClass {
        m: [[t1.a, t2.a], [t1.b, t2.b]],
    })
}

/// Two primitive cycles form a dual pair when they generate `H₁(T²; Z)`.
pub fn is_dual_pair(c1: Cycle, c2: Cycle) -> Result<bool, HomologyError> {
    require_primitive(c1)?;
    require_primitive(c2)?;
    Ok(c1.det(&c2).abs() == 1)
}

/// Matrix product `m1 · m2` (apply `m2` first).
pub fn compose(m1: &MappingClass, m2: &MappingClass) -> MappingClass {
    let a = m1.m;
    let b = m2.m;
    let mut out = [[0i64; 2]; 2];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, entry) in row.iter_mut().enumerate() {
            *entry = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    MappingClass { m: out }
}

pub fn apply(m: &MappingClass, c: Cycle) -> Cycle {
    let [[p, q], [r, s]] = m.m;
    Cycle::new(p * c.a + q * c.b, r * c.a + s * c.b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Twist applied straight from the defining formula, used as an oracle
    /// for the matrix route.
    fn twist_formula(c: Cycle, x: Cycle) -> Cycle {
        let k = x.a * c.b - x.b * c.a;
        Cycle::new(x.a + k * c.a, x.b + k * c.b)
    }

    #[test]
    fn primitivity() {
        assert!(is_primitive(Cycle::new(1, 1)).unwrap());
        assert!(is_primitive(Cycle::new(1, 0)).unwrap());
        assert!(!is_primitive(Cycle::new(2, 4)).unwrap());
        assert!(is_primitive(Cycle::new(-3, 5)).unwrap());
        assert_eq!(
            is_primitive(Cycle::new(0, 0)),
            Err(HomologyError::ZeroCycle)
        );
    }

    #[test]
    fn plumbing_monodromy_matrix() {
        let t = dehn_twist(Cycle::new(1, 1)).unwrap();
        assert_eq!(t.matrix(), [[2, -1], [1, 0]]);
        assert_eq!(t.det(), 1);
    }

    #[test]
    fn twist_about_first_basis_vector() {
        // T(1,0) = (1,0); T(0,1) = (0,1) + det((0,1)|(1,0))·(1,0) = (-1, 1)
        let c = Cycle::E1;
        assert_eq!(twist_formula(c, Cycle::E1), Cycle::new(1, 0));
        assert_eq!(twist_formula(c, Cycle::E2), Cycle::new(-1, 1));
        assert_eq!(dehn_twist(c).unwrap().matrix(), [[1, -1], [0, 1]]);
    }

    #[test]
    fn twist_rejects_non_primitive() {
        assert_eq!(
            dehn_twist(Cycle::new(2, 2)),
            Err(HomologyError::NotPrimitive(Cycle::new(2, 2)))
        );
        assert_eq!(dehn_twist(Cycle::new(0, 0)), Err(HomologyError::ZeroCycle));
    }

    #[test]
    fn dual_pairs() {
        assert!(is_dual_pair(Cycle::E1, Cycle::E2).unwrap());
        assert!(is_dual_pair(Cycle::new(1, 1), Cycle::E1).unwrap());
        assert!(is_dual_pair(Cycle::new(1, 1), Cycle::E2).unwrap());
        assert!(!is_dual_pair(Cycle::new(1, 1), Cycle::new(-1, 1)).unwrap());
        assert!(is_dual_pair(Cycle::new(2, 2), Cycle::E1).is_err());
    }

    #[test]
    fn composition_examples() {
        let t = dehn_twist(Cycle::new(1, 1)).unwrap();
        assert_eq!(t * t.inverse(), MappingClass::IDENTITY);
        assert_eq!(MappingClass::IDENTITY * t, t);

        // Oracle: push basis vectors through both twists one at a time.
        let (c1, c2) = (Cycle::E1, Cycle::E2);
        let img1 = twist_formula(c1, twist_formula(c2, Cycle::E1));
        let img2 = twist_formula(c1, twist_formula(c2, Cycle::E2));
        let expected = [[img1.a, img2.a], [img1.b, img2.b]];
        assert_eq!(expected, [[0, -1], [1, 1]]);
        let prod = compose(&dehn_twist(c1).unwrap(), &dehn_twist(c2).unwrap());
        assert_eq!(prod.matrix(), expected);
    }

    #[test]
    fn apply_examples() {
        let t = MappingClass::new([[2, -1], [1, 0]]).unwrap();
        assert_eq!(apply(&t, Cycle::new(1, 1)), Cycle::new(1, 1));
        assert_eq!(
            apply(&MappingClass::IDENTITY, Cycle::new(3, 5)),
            Cycle::new(3, 5)
        );
        assert_eq!(apply(&t, Cycle::E1), Cycle::new(2, 1));
    }

    #[test]
    fn non_unimodular_matrix_rejected() {
        assert!(MappingClass::new([[2, 0], [0, 1]]).is_err());
        let err = serde_json::from_str::<MappingClass>("[[1,1],[1,1]]");
        assert!(err.is_err());
    }

    #[test]
    fn serde_shapes() {
        assert_eq!(serde_json::to_string(&Cycle::new(1, -2)).unwrap(), "[1,-2]");
        let t = dehn_twist(Cycle::new(1, 1)).unwrap();
        assert_eq!(serde_json::to_string(&t).unwrap(), "[[2,-1],[1,0]]");
    }

    fn primitive() -> impl Strategy<Value = Cycle> {
        (-60i64..=60, -60i64..=60)
            .prop_filter("primitive", |&(a, b)| (a, b) != (0, 0) && a.gcd(&b) == 1)
            .prop_map(|(a, b)| Cycle::new(a, b))
    }

    fn small_primitive() -> impl Strategy<Value = Cycle> {
        (-6i64..=6, -6i64..=6)
            .prop_filter("primitive", |&(a, b)| (a, b) != (0, 0) && a.gcd(&b) == 1)
            .prop_map(|(a, b)| Cycle::new(a, b))
    }

    fn small_mapping_class() -> impl Strategy<Value = MappingClass> {
        prop::collection::vec((small_primitive(), any::<bool>()), 0..4).prop_map(|word| {
            word.into_iter()
                .fold(MappingClass::IDENTITY, |acc, (c, inv)| {
                    let t = dehn_twist(c).unwrap();
                    acc * if inv { t.inverse() } else { t }
                })
        })
    }

    proptest! {
        #[test]
        fn twist_is_unimodular(c in primitive()) {
            prop_assert_eq!(dehn_twist(c).unwrap().det(), 1);
        }

        #[test]
        fn twist_matches_formula(c in primitive(), x in (-50i64..50, -50i64..50)) {
            let x = Cycle::new(x.0, x.1);
            prop_assert_eq!(apply(&dehn_twist(c).unwrap(), x), twist_formula(c, x));
        }

        #[test]
        fn twist_fixes_exactly_parallel_classes(c in primitive(), x in (-30i64..30, -30i64..30)) {
            let x = Cycle::new(x.0, x.1);
            let fixed = apply(&dehn_twist(c).unwrap(), x) == x;
            prop_assert_eq!(fixed, x.det(&c) == 0);
        }

        #[test]
        fn dual_pair_symmetric_and_invariant(
            c1 in primitive(), c2 in primitive(), m in small_mapping_class()
        ) {
            let d = is_dual_pair(c1, c2).unwrap();
            prop_assert_eq!(d, is_dual_pair(c2, c1).unwrap());
            prop_assert_eq!(d, is_dual_pair(apply(&m, c1), apply(&m, c2)).unwrap());
        }

        #[test]
        fn apply_preserves_content(m in small_mapping_class(), x in (-40i64..40, -40i64..40)) {
            let x = Cycle::new(x.0, x.1);
            prop_assert_eq!(apply(&m, x).content(), x.content());
        }
    }
}
