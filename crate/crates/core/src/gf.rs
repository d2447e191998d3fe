//! Exact arithmetic in finite fields GF(p^d).
//!
//! Elements are residues of polynomials over GF(p) modulo a fixed monic
//! irreducible polynomial of degree `d`. An element is stored as the packed
//! integer `c_0 + c_1 p + ... + c_{d-1} p^{d-1}` of its little-endian
//! coefficient vector, so equality, ordering and hashing are structural and
//! the code order is the canonical element order used throughout the crate
//! (`0 < 1 < ... < p-1 < x < x+1 < ...`).
//!
//! Fields of order at most [`TABLE_LIMIT`] carry precomputed addition,
//! multiplication, negation and inversion tables.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest extension degree accepted by [`FieldSpec::new`].
pub const MAX_DEGREE: u32 = 4;

/// Largest field order for which operation tables are precomputed.
pub const TABLE_LIMIT: u32 = 1024;

const MAX_ORDER: u64 = 1 << 24;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("extension degree must be at least 1")]
    ZeroDegree,
    #[error("extension degree {0} exceeds the supported maximum of {MAX_DEGREE}")]
    DegreeTooLarge(u32),
    #[error("field order {0} is too large")]
    OrderTooLarge(u64),
    #[error("modulus must have {expected} coefficients, got {got}")]
    ModulusLength { expected: usize, got: usize },
    #[error("modulus is not monic")]
    NotMonic,
    #[error("modulus is reducible over GF({0})")]
    Reducible(u32),
    #[error("coefficient {coefficient} is out of range for characteristic {characteristic}")]
    CoefficientRange { coefficient: u32, characteristic: u32 },
    #[error("element code {code} is out of range for a field of order {order}")]
    ElementRange { code: u64, order: u32 },
    #[error("inverse of zero")]
    DivisionByZero,
    #[error("invalid field specification `{0}`")]
    Parse(String),
}

/// An element of a finite field, in canonical packed form.
///
/// The value is only meaningful together with the [`FieldSpec`] it was
/// produced by. Codes `0` and `1` are the additive and multiplicative
/// identities in every field.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FieldElement(u32);

impl FieldElement {
    pub const ZERO: FieldElement = FieldElement(0);
    pub const ONE: FieldElement = FieldElement(1);

    /// Packed integer code of the coefficient vector.
    pub fn code(self) -> u32 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }

    pub fn is_one(self) -> bool {
        self.0 == 1
    }
}

struct Tables {
    add: Vec<u32>,
    mul: Vec<u32>,
    neg: Vec<u32>,
    inv: Vec<u32>,
}

struct Inner {
    p: u32,
    degree: u32,
    order: u32,
    /// `degree + 1` little-endian coefficients, leading coefficient 1.
    modulus: Vec<u32>,
    tables: Option<Tables>,
}

/// A validated finite field GF(p^d). Cheap to clone.
#[derive(Clone, Serialize, Deserialize)]
#[serde(try_from = "FieldSpecRepr", into = "FieldSpecRepr")]
pub struct FieldSpec {
    inner: Arc<Inner>,
}

#[derive(Serialize, Deserialize)]
struct FieldSpecRepr {
    characteristic: u32,
    degree: u32,
    modulus: Vec<u32>,
}

impl TryFrom<FieldSpecRepr> for FieldSpec {
    type Error = FieldError;

    fn try_from(repr: FieldSpecRepr) -> Result<Self, Self::Error> {
        let modulus = if repr.degree > 1 { Some(repr.modulus.as_slice()) } else { None };
        FieldSpec::new(repr.characteristic, repr.degree, modulus)
    }
}

impl From<FieldSpec> for FieldSpecRepr {
    fn from(spec: FieldSpec) -> Self {
        FieldSpecRepr {
            characteristic: spec.characteristic(),
            degree: spec.degree(),
            modulus: spec.modulus().to_vec(),
        }
    }
}

impl PartialEq for FieldSpec {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner)
            || (self.inner.p == other.inner.p
                && self.inner.degree == other.inner.degree
                && self.inner.modulus == other.inner.modulus)
    }
}

impl Eq for FieldSpec {}

impl fmt::Debug for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({})", self)
    }
}

/// Formats as the CLI field string: `p` or `p^d`.
impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.inner.degree == 1 {
            write!(f, "{}", self.inner.p)
        } else {
            write!(f, "{}^{}", self.inner.p, self.inner.degree)
        }
    }
}

/// Parses `p` or `p^d` exactly (no whitespace); extensions get the default modulus.
impl FromStr for FieldSpec {
    type Err = FieldError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || FieldError::Parse(s.to_string());
        let digits = |t: &str| -> Result<u64, FieldError> {
            if t.is_empty() || !t.bytes().all(|b| b.is_ascii_digit()) {
                return Err(bad());
            }
            t.parse::<u64>().map_err(|_| bad())
        };
        let (p, d) = match s.split_once('^') {
            Some((p, d)) => (digits(p)?, digits(d)?),
            None => (digits(s)?, 1),
        };
        let p = u32::try_from(p).map_err(|_| FieldError::OrderTooLarge(p))?;
        let d = u32::try_from(d).map_err(|_| FieldError::DegreeTooLarge(u32::MAX))?;
        FieldSpec::new(p, d, None)
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut k = 2u64;
    while k * k <= n {
        if n.is_multiple_of(k) {
            return false;
        }
        k += 1;
    }
    true
}

/// Remainder of `a` modulo monic `m`, both little-endian over GF(p).
fn poly_rem(a: &[u32], m: &[u32], p: u32) -> Vec<u32> {
    let mut r: Vec<u64> = a.iter().map(|&c| c as u64).collect();
    let dm = m.len() - 1;
    let p = p as u64;
    while r.len() > dm {
        let lead = r.pop().unwrap() % p;
        if lead != 0 {
            let base = r.len() - dm;
            for (j, &mc) in m[..dm].iter().enumerate() {
                r[base + j] = (r[base + j] + (p - lead) * mc as u64) % p;
            }
        }
    }
    r.into_iter().map(|c| (c % p) as u32).collect()
}

fn is_irreducible(modulus: &[u32], p: u32) -> bool {
    let d = modulus.len() - 1;
    if d <= 1 {
        return true;
    }
    for k in 1..=d / 2 {
        let count = (p as u64).pow(k as u32);
        for code in 0..count {
            let mut divisor = decode(code, p, k);
            divisor.push(1);
            if poly_rem(modulus, &divisor, p).iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    true
}

fn decode(mut code: u64, p: u32, len: usize) -> Vec<u32> {
    let mut out = Vec::with_capacity(len);
    for _ in 0..len {
        out.push((code % p as u64) as u32);
        code /= p as u64;
    }
    out
}

fn encode(coeffs: &[u32], p: u32) -> u32 {
    coeffs.iter().rev().fold(0u32, |acc, &c| acc * p + c)
}

/// Lexicographically smallest monic irreducible of degree `d`, ordering
/// candidates by the packed code of their lower coefficients.
fn default_modulus(p: u32, d: u32) -> Vec<u32> {
    let count = (p as u64).pow(d);
    for code in 0..count {
        let mut m = decode(code, p, d as usize);
        m.push(1);
        if is_irreducible(&m, p) {
            return m;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

impl FieldSpec {
    /// Builds GF(p^d). When `d > 1` and no modulus is given, the default
    /// modulus is the smallest monic irreducible of degree `d`.
    pub fn new(p: u32, d: u32, modulus: Option<&[u32]>) -> Result<Self, FieldError> {
        if !is_prime(p as u64) {
            return Err(FieldError::NotPrime(p as u64));
        }
        if d == 0 {
            return Err(FieldError::ZeroDegree);
        }
        if d > MAX_DEGREE {
            return Err(FieldError::DegreeTooLarge(d));
        }
        let order = (p as u64).pow(d);
        if order > MAX_ORDER {
            return Err(FieldError::OrderTooLarge(order));
        }
        let modulus = match modulus {
            Some(m) => {
                if m.len() != d as usize + 1 {
                    return Err(FieldError::ModulusLength { expected: d as usize + 1, got: m.len() });
                }
                if let Some(&c) = m.iter().find(|&&c| c >= p) {
                    return Err(FieldError::CoefficientRange { coefficient: c, characteristic: p });
                }
                if m[d as usize] != 1 {
                    return Err(FieldError::NotMonic);
                }
                if !is_irreducible(m, p) {
                    return Err(FieldError::Reducible(p));
                }
                m.to_vec()
            }
            // Degree one: x - 0 stands in for the modulus; it is never used.
            None if d == 1 => vec![0, 1],
            None => default_modulus(p, d),
        };
        let mut inner = Inner { p, degree: d, order: order as u32, modulus, tables: None };
        if inner.order <= TABLE_LIMIT {
            inner.tables = Some(build_tables(&inner));
        }
        Ok(FieldSpec { inner: Arc::new(inner) })
    }

    /// The prime field GF(p).
    pub fn prime(p: u32) -> Result<Self, FieldError> {
        Self::new(p, 1, None)
    }

    pub fn gf2() -> Self {
        Self::prime(2).expect("2 is prime")
    }

    pub fn characteristic(&self) -> u32 {
        self.inner.p
    }

    pub fn degree(&self) -> u32 {
        self.inner.degree
    }

    /// Number of elements `q = p^d`.
    pub fn order(&self) -> u32 {
        self.inner.order
    }

    /// Little-endian modulus coefficients (length `d + 1`).
    pub fn modulus(&self) -> &[u32] {
        &self.inner.modulus
    }

    pub fn is_gf2(&self) -> bool {
        self.inner.order == 2
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement::ZERO
    }

    pub fn one(&self) -> FieldElement {
        FieldElement::ONE
    }

    /// Element with the given packed code.
    pub fn element(&self, code: u64) -> Result<FieldElement, FieldError> {
        if code >= self.inner.order as u64 {
            return Err(FieldError::ElementRange { code, order: self.inner.order });
        }
        Ok(FieldElement(code as u32))
    }

    pub fn from_coefficients(&self, coeffs: &[u32]) -> Result<FieldElement, FieldError> {
        let d = self.inner.degree as usize;
        if coeffs.len() > d {
            return Err(FieldError::ModulusLength { expected: d, got: coeffs.len() });
        }
        if let Some(&c) = coeffs.iter().find(|&&c| c >= self.inner.p) {
            return Err(FieldError::CoefficientRange { coefficient: c, characteristic: self.inner.p });
        }
        Ok(FieldElement(encode(coeffs, self.inner.p)))
    }

    /// Little-endian coefficient vector of length `d`.
    pub fn coefficients(&self, a: FieldElement) -> Vec<u32> {
        decode(a.0 as u64, self.inner.p, self.inner.degree as usize)
    }

    /// Image of an integer under `Z -> GF(p) ⊂ GF(p^d)`.
    pub fn from_int(&self, n: i64) -> FieldElement {
        FieldElement(n.rem_euclid(self.inner.p as i64) as u32)
    }

    /// `false ↦ 0`, `true ↦ 1`.
    pub fn embed_bool(&self, b: bool) -> FieldElement {
        if b {
            FieldElement::ONE
        } else {
            FieldElement::ZERO
        }
    }

    /// All elements in canonical order.
    pub fn elements(&self) -> impl Iterator<Item = FieldElement> {
        (0..self.inner.order).map(FieldElement)
    }

    pub fn nonzero_elements(&self) -> impl Iterator<Item = FieldElement> {
        (1..self.inner.order).map(FieldElement)
    }

    pub fn contains(&self, a: FieldElement) -> bool {
        a.0 < self.inner.order
    }

    #[inline]
    pub fn add(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        match &self.inner.tables {
            Some(t) => FieldElement(t.add[(a.0 * self.inner.order + b.0) as usize]),
            None => FieldElement(raw_add(&self.inner, a.0, b.0)),
        }
    }

    #[inline]
    pub fn neg(&self, a: FieldElement) -> FieldElement {
        match &self.inner.tables {
            Some(t) => FieldElement(t.neg[a.0 as usize]),
            None => FieldElement(raw_neg(&self.inner, a.0)),
        }
    }

    #[inline]
    pub fn sub(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        match &self.inner.tables {
            Some(t) => FieldElement(t.mul[(a.0 * self.inner.order + b.0) as usize]),
            None => FieldElement(raw_mul(&self.inner, a.0, b.0)),
        }
    }

    pub fn inv(&self, a: FieldElement) -> Result<FieldElement, FieldError> {
        if a.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        Ok(match &self.inner.tables {
            Some(t) => FieldElement(t.inv[a.0 as usize]),
            None => self.pow(a, self.inner.order as u64 - 2),
        })
    }

    pub fn div(&self, a: FieldElement, b: FieldElement) -> Result<FieldElement, FieldError> {
        Ok(self.mul(a, self.inv(b)?))
    }

    pub fn pow(&self, a: FieldElement, mut e: u64) -> FieldElement {
        let mut base = a;
        let mut acc = FieldElement::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// Human-readable element: an integer for prime fields, a polynomial in
    /// `x` otherwise.
    pub fn format_element(&self, a: FieldElement) -> String {
        if self.inner.degree == 1 {
            return a.0.to_string();
        }
        let coeffs = self.coefficients(a);
        let terms: Vec<String> = coeffs
            .iter()
            .enumerate()
            .rev()
            .filter(|(_, &c)| c != 0)
            .map(|(i, &c)| match (i, c) {
                (0, c) => c.to_string(),
                (1, 1) => "x".to_string(),
                (1, c) => format!("{c}x"),
                (i, 1) => format!("x^{i}"),
                (i, c) => format!("{c}x^{i}"),
            })
            .collect();
        if terms.is_empty() {
            "0".to_string()
        } else {
            terms.join("+")
        }
    }
}

fn raw_add(f: &Inner, a: u32, b: u32) -> u32 {
    if f.degree == 1 {
        return (a + b) % f.p;
    }
    let (mut a, mut b, mut out, mut place) = (a, b, 0u32, 1u32);
    for _ in 0..f.degree {
        out += ((a % f.p + b % f.p) % f.p) * place;
        a /= f.p;
        b /= f.p;
        place *= f.p;
    }
    out
}

fn raw_neg(f: &Inner, a: u32) -> u32 {
    if f.degree == 1 {
        return (f.p - a) % f.p;
    }
    let (mut a, mut out, mut place) = (a, 0u32, 1u32);
    for _ in 0..f.degree {
        out += ((f.p - a % f.p) % f.p) * place;
        a /= f.p;
        place *= f.p;
    }
    out
}

fn raw_mul(f: &Inner, a: u32, b: u32) -> u32 {
    if f.degree == 1 {
        return ((a as u64 * b as u64) % f.p as u64) as u32;
    }
    let d = f.degree as usize;
    let ca = decode(a as u64, f.p, d);
    let cb = decode(b as u64, f.p, d);
    let mut prod = vec![0u32; 2 * d - 1];
    for (i, &x) in ca.iter().enumerate() {
        for (j, &y) in cb.iter().enumerate() {
            prod[i + j] = ((prod[i + j] as u64 + x as u64 * y as u64) % f.p as u64) as u32;
        }
    }
    let r = poly_rem(&prod, &f.modulus, f.p);
    encode(&r, f.p)
}

fn build_tables(f: &Inner) -> Tables {
    let q = f.order as usize;
    let mut add = vec![0u32; q * q];
    let mut mul = vec![0u32; q * q];
    let mut neg = vec![0u32; q];
    let mut inv = vec![0u32; q];
    for a in 0..q as u32 {
        neg[a as usize] = raw_neg(f, a);
        for b in 0..q as u32 {
            let idx = a as usize * q + b as usize;
            add[idx] = raw_add(f, a, b);
            let m = raw_mul(f, a, b);
            mul[idx] = m;
            if m == 1 {
                inv[a as usize] = b;
            }
        }
    }
    Tables { add, mul, neg, inv }
}
