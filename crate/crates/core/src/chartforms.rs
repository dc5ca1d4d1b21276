//! Constant-coefficient elliptic 2-forms near a point of `D[2]`.
//!
//! A form is written in the ordered frame `(dlog r₁, dθ₁, dlog r₂, dθ₂)` as
//!
//! ```text
//! A·dlog r₁∧dlog r₂ + B·dlog r₁∧dθ₁ + C·dlog r₁∧dθ₂
//!   + D·dθ₁∧dlog r₂ + E·dθ₁∧dθ₂ + F·dlog r₂∧dθ₂
//! ```
//!
//! Constant coefficients make every form closed. Residues are read off as
//! coefficients, so their signs are tied to this frame order; predicates that
//! only make sense up to sign compare absolute values.
//!
//! Coefficient algebra is exact over `Q`. The two sample-based verifiers at
//! the bottom are the only floating-point code and take an explicit seed.

use std::fmt;
use std::ops::{Add, Mul, Neg};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type Rational = BigRational;

/// Frame tag written next to serialized coefficient arrays.
pub const FRAME_TAG: &str = "dlogr1,dtheta1,dlogr2,dtheta2;v1";

/// Tolerance of the sample-based verifiers.
pub const SAMPLE_TOLERANCE: f64 = 1e-12;

pub const DEFAULT_SEED: u64 = 7;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ChartError {
    #[error("the imaginary parameter is only defined for forms with zero elliptic residue")]
    NonzeroEllipticResidue,
    #[error("cannot parse rational {0:?}")]
    BadRational(String),
    #[error("unsupported frame tag {0:?}")]
    FrameTag(String),
}

pub fn rational(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn integer(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn parse_rational(s: &str) -> Result<Rational, ChartError> {
    let bad = || ChartError::BadRational(s.to_string());
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(Rational::new(n, d))
        }
        None => Ok(Rational::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct EllipticChartForm {
    pub a: Rational,
    pub b: Rational,
    pub c: Rational,
    pub d: Rational,
    pub e: Rational,
    pub f: Rational,
}

impl EllipticChartForm {
    pub fn new(coeffs: [Rational; 6]) -> Self {
        let [a, b, c, d, e, f] = coeffs;
        EllipticChartForm { a, b, c, d, e, f }
    }

    pub fn from_integers(coeffs: [i64; 6]) -> Self {
        Self::new(coeffs.map(integer))
    }

    pub fn zero() -> Self {
        Self::from_integers([0; 6])
    }

    pub fn coefficients(&self) -> [&Rational; 6] {
        [&self.a, &self.b, &self.c, &self.d, &self.e, &self.f]
    }

    /// Antisymmetric matrix `ω_ij = ω(e_i, e_j)` in the frame order.
    pub fn matrix(&self) -> [[Rational; 4]; 4] {
        let z = Rational::zero;
        let mut m: [[Rational; 4]; 4] = std::array::from_fn(|_| std::array::from_fn(|_| z()));
        let mut set = |i: usize, j: usize, v: &Rational| {
            m[i][j] = v.clone();
            m[j][i] = -v.clone();
        };
        set(0, 2, &self.a);
        set(0, 1, &self.b);
        set(0, 3, &self.c);
        set(1, 2, &self.d);
        set(1, 3, &self.e);
        set(2, 3, &self.f);
        m
    }

    /// `Pf = B·F − A·E + C·D`.
    pub fn pfaffian(&self) -> Rational {
        &self.b * &self.f - &self.a * &self.e + &self.c * &self.d
    }

    fn zip(&self, other: &Self, op: impl Fn(&Rational, &Rational) -> Rational) -> Self {
        EllipticChartForm {
            a: op(&self.a, &other.a),
            b: op(&self.b, &other.b),
            c: op(&self.c, &other.c),
            d: op(&self.d, &other.d),
            e: op(&self.e, &other.e),
            f: op(&self.f, &other.f),
        }
    }

    pub fn scale(&self, s: &Rational) -> Self {
        self.zip(self, |x, _| x * s)
    }
}

impl Add for &EllipticChartForm {
    type Output = EllipticChartForm;

    fn add(self, rhs: &EllipticChartForm) -> EllipticChartForm {
        self.zip(rhs, |x, y| x + y)
    }
}

impl Mul<&EllipticChartForm> for &Rational {
    type Output = EllipticChartForm;

    fn mul(self, rhs: &EllipticChartForm) -> EllipticChartForm {
        rhs.scale(self)
    }
}

impl Neg for &EllipticChartForm {
    type Output = EllipticChartForm;

    fn neg(self) -> EllipticChartForm {
        self.scale(&integer(-1))
    }
}

impl fmt::Display for EllipticChartForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[A={}, B={}, C={}, D={}, E={}, F={}]",
            self.a, self.b, self.c, self.d, self.e, self.f
        )
    }
}

#[derive(Serialize, Deserialize)]
struct FormDocument {
    frame: String,
    coefficients: [String; 6],
}

impl Serialize for EllipticChartForm {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        FormDocument {
            frame: FRAME_TAG.to_string(),
            coefficients: self.coefficients().map(|c| c.to_string()),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for EllipticChartForm {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let doc = FormDocument::deserialize(d)?;
        if doc.frame != FRAME_TAG {
            return Err(D::Error::custom(ChartError::FrameTag(doc.frame)));
        }
        let mut coeffs = Vec::with_capacity(6);
        for c in &doc.coefficients {
            coeffs.push(parse_rational(c).map_err(D::Error::custom)?);
        }
        let coeffs: [Rational; 6] = coeffs.try_into().expect("six coefficients");
        Ok(EllipticChartForm::new(coeffs))
    }
}

/// `λ·dlog x₁ ∧ dlog x₂` on the base near a corner.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LogChartForm {
    pub lambda: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResidueSet {
    pub res_q1: Rational,
    pub res_q2: Rational,
    pub res_r1r2: Rational,
    pub res_theta1theta2: Rational,
    pub res_r1theta2: Rational,
    pub res_theta1r2: Rational,
}

impl ResidueSet {
    fn as_array(&self) -> [&Rational; 6] {
        [
            &self.res_q1,
            &self.res_q2,
            &self.res_r1r2,
            &self.res_theta1theta2,
            &self.res_r1theta2,
            &self.res_theta1r2,
        ]
    }

    pub fn is_zero(&self) -> bool {
        self.as_array().iter().all(|r| r.is_zero())
    }
}

/// Induced elliptic form of `ρ = z₁z₂ + τ dz₁∧dz₂` with `τ = re + i·im`:
/// `Im τ (dlog r₁∧dlog r₂ − dθ₁∧dθ₂) + Re τ (dlog r₁∧dθ₂ + dθ₁∧dlog r₂)`.
pub fn from_complex_parameter(tau_re: &Rational, tau_im: &Rational) -> EllipticChartForm {
    let z = Rational::zero();
    EllipticChartForm {
        a: tau_im.clone(),
        b: z.clone(),
        c: tau_re.clone(),
        d: tau_re.clone(),
        e: -tau_im.clone(),
        f: z,
    }
}

pub fn residues(w: &EllipticChartForm) -> ResidueSet {
    ResidueSet {
        res_q1: w.b.clone(),
        res_q2: w.f.clone(),
        res_r1r2: w.a.clone(),
        res_theta1theta2: w.e.clone(),
        res_r1theta2: w.c.clone(),
        res_theta1r2: w.d.clone(),
    }
}

pub fn has_zero_elliptic_residue(w: &EllipticChartForm) -> bool {
    w.b.is_zero() && w.f.is_zero()
}

/// `|Res_{r₁r₂}| = |Res_{θ₁θ₂}|` with both mixed residues vanishing.
pub fn has_imaginary_parameter(w: &EllipticChartForm) -> Result<bool, ChartError> {
    if !has_zero_elliptic_residue(w) {
        return Err(ChartError::NonzeroEllipticResidue);
    }
    Ok(w.a.abs() == w.e.abs() && w.c.is_zero() && w.d.is_zero())
}

/// Chart-level conditions for the form to come from a stable generalized
/// complex structure: zero elliptic residue, `Res_{θ₁r₂} = Res_{r₁θ₂}` and
/// `Res_{r₁r₂} = −Res_{θ₁θ₂}`.
pub fn satisfies_gcs_residue_conditions(w: &EllipticChartForm) -> bool {
    has_zero_elliptic_residue(w) && w.d == w.c && w.a == -w.e.clone()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Nondegeneracy {
    pub pfaffian: Rational,
    pub nondegenerate: bool,
}

pub fn is_nondegenerate(w: &EllipticChartForm) -> Nondegeneracy {
    let pfaffian = w.pfaffian();
    Nondegeneracy {
        nondegenerate: !pfaffian.is_zero(),
        pfaffian,
    }
}

/// `ω_t = η + t·f*(dlog x₁∧dlog x₂)` with
/// `η = −dθ₁∧dθ₂ + dlog r₁∧dθ₂ + dlog r₂∧dθ₁` and `f*(dlog xᵢ) = 2·dlog rᵢ`,
/// giving `A = 4t, C = D = 1, E = −1`.
pub fn gt_interpolation(t: &Rational) -> EllipticChartForm {
    // Mixed terms of η enter with the orientation of the complex-parameter
    // normal form: C = D = 1.
    let eta = EllipticChartForm::from_integers([0, 0, 1, 1, -1, 0]);
    let base = pullback_log_form(&LogChartForm { lambda: t.clone() });
    &eta + &base
}

/// Pullback of `λ·dlog x₁∧dlog x₂` along `(z₁, z₂) ↦ (|z₁|², |z₂|²)`.
pub fn pullback_log_form(lf: &LogChartForm) -> EllipticChartForm {
    let mut w = EllipticChartForm::zero();
    w.a = &lf.lambda * integer(4);
    w
}

/// Result of a sample-based identity check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifierReport {
    pub op: String,
    pub samples: usize,
    pub seed: u64,
    pub max_error: f64,
    pub pass: bool,
    /// Only set by the focus–focus verifier: whether the alternative
    /// coordinate change `¼(x₁+y₂+i(x₁−y₂), x₁−y₂+i(x₁+y₂))` also reproduces
    /// the map. Informational; does not affect `pass`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub displayed_substitution_pass: Option<bool>,
}

fn norm_sqr(z: Complex64) -> f64 {
    z.norm_sqr()
}

/// Point of the annular region `1/2 < |z| < 2` in `C²`.
fn sample_annulus(rng: &mut ChaCha8Rng) -> (Complex64, Complex64) {
    loop {
        let v: [f64; 4] = std::array::from_fn(|_| rng.random_range(-2.0..2.0));
        let z1 = Complex64::new(v[0], v[1]);
        let z2 = Complex64::new(v[2], v[3]);
        let r2 = norm_sqr(z1) + norm_sqr(z2);
        if r2 > 0.25 && r2 < 4.0 {
            return (z1, z2);
        }
    }
}

/// `p(z₁, z₂) = (|z₁|², |z₂|²)`
pub fn moment_map(z1: Complex64, z2: Complex64) -> (f64, f64) {
    (norm_sqr(z1), norm_sqr(z2))
}

/// `Φ(z₁, z₂) = (z₂, z̄₁)/(|z₁|² + |z₂|²)`
pub fn gluing_map(z1: Complex64, z2: Complex64) -> (Complex64, Complex64) {
    let s = norm_sqr(z1) + norm_sqr(z2);
    (z2 / s, z1.conj() / s)
}

/// `Ψ(x, y) = (y, x)/(x + y)²`
pub fn corner_sum_map(x: f64, y: f64) -> (f64, f64) {
    let s = (x + y) * (x + y);
    (y / s, x / s)
}

/// Check `p∘Φ = Ψ∘p` at seeded random points of the gluing annulus.
pub fn verify_corner_sum_model(samples: usize, seed: u64) -> VerifierReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut max_error = 0.0f64;
    for _ in 0..samples {
        let (z1, z2) = sample_annulus(&mut rng);
        let (w1, w2) = gluing_map(z1, z2);
        let lhs = moment_map(w1, w2);
        let (x, y) = moment_map(z1, z2);
        let rhs = corner_sum_map(x, y);
        max_error = max_error
            .max((lhs.0 - rhs.0).abs())
            .max((lhs.1 - rhs.1).abs());
    }
    VerifierReport {
        op: "corner_sum_model".into(),
        samples,
        seed,
        max_error,
        pass: samples > 0 && max_error < SAMPLE_TOLERANCE,
        displayed_substitution_pass: None,
    }
}

/// Focus–focus map `(x₁y₂ − x₂y₁, x₁x₂ + y₁y₂)`.
pub fn focus_focus_map(x1: f64, y1: f64, x2: f64, y2: f64) -> (f64, f64) {
    (x1 * y2 - x2 * y1, x1 * x2 + y1 * y2)
}

/// `(w₁, w₂) = ((z̄₁ + z₂)/2, (z̄₁ − z₂)/(2i))`, so that `w₁² + w₂² = z̄₁z₂`.
pub fn lefschetz_coordinates(z1: Complex64, z2: Complex64) -> (Complex64, Complex64) {
    let two_i = Complex64::new(0.0, 2.0);
    ((z1.conj() + z2) / 2.0, (z1.conj() - z2) / two_i)
}

fn displayed_coordinates(x1: f64, y2: f64) -> (Complex64, Complex64) {
    (
        Complex64::new(x1 + y2, x1 - y2) / 4.0,
        Complex64::new(x1 - y2, x1 + y2) / 4.0,
    )
}

/// Check that the focus–focus map equals `(Im, Re)` of `w₁² + w₂²` under
/// [`lefschetz_coordinates`], at seeded random points of `[-1, 1]⁴`.
pub fn verify_focus_focus_model(samples: usize, seed: u64) -> VerifierReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut max_error = 0.0f64;
    let mut displayed_error = 0.0f64;
    for _ in 0..samples {
        let v: [f64; 4] = std::array::from_fn(|_| rng.random_range(-1.0..1.0));
        let (x1, y1, x2, y2) = (v[0], v[1], v[2], v[3]);
        let f = focus_focus_map(x1, y1, x2, y2);

        let (w1, w2) = lefschetz_coordinates(Complex64::new(x1, y1), Complex64::new(x2, y2));
        let q = w1 * w1 + w2 * w2;
        max_error = max_error.max((f.0 - q.im).abs()).max((f.1 - q.re).abs());

        let (u1, u2) = displayed_coordinates(x1, y2);
        let p = u1 * u1 + u2 * u2;
        displayed_error = displayed_error
            .max((f.0 - p.im).abs())
            .max((f.1 - p.re).abs());
    }
    VerifierReport {
        op: "focus_focus_model".into(),
        samples,
        seed,
        max_error,
        pass: samples > 0 && max_error < SAMPLE_TOLERANCE,
        displayed_substitution_pass: Some(samples > 0 && displayed_error < SAMPLE_TOLERANCE),
    }
}
