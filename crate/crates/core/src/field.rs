//! Exact arithmetic in GF(p) and GF(p^h) with a polynomial basis, the absolute
//! trace down to the prime field, and the quadratic character.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Validation cap on the field order p^h.
pub const MAX_FIELD_ORDER: u64 = 1 << 20;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("modulus polynomial is reducible over GF({p})")]
    Reducible { p: u64 },
    #[error("modulus must be monic of degree {expected}, got degree {got}")]
    DegreeMismatch { expected: usize, got: usize },
    #[error("division by zero")]
    DivisionByZero,
    #[error("quadratic character is undefined for even field order")]
    EvenCharacteristic,
    #[error("field order {0} exceeds the validation cap {MAX_FIELD_ORDER}")]
    OrderTooLarge(u64),
    #[error("coefficient {0} is not reduced mod {1}")]
    UnreducedCoefficient(u64, u64),
}

/// Element of GF(p^h) in polynomial-basis coordinates, little-endian
/// (`coeffs[i]` multiplies x^i). All coordinates are reduced mod p.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FieldElement {
    coeffs: Vec<u64>,
}

impl FieldElement {
    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }
}

/// Descriptor of GF(p^h): prime characteristic, extension degree, and the
/// monic irreducible modulus (h+1 coefficients, little-endian; ignored for h=1).
///
/// Immutable after construction; every operation below is a pure function.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldSpec {
    p: u64,
    h: usize,
    modulus: Vec<u64>,
}

impl FieldSpec {
    /// Builds GF(p^h), selecting the modulus deterministically when h > 1:
    /// the lexicographically smallest monic irreducible polynomial of degree h,
    /// coefficients compared from the leading end down.
    pub fn new(p: u64, h: usize) -> Result<Self, FieldError> {
        Self::validate_params(p, h)?;
        let modulus = if h == 1 {
            vec![0, 1]
        } else {
            smallest_irreducible(p, h)
        };
        Ok(FieldSpec { p, h, modulus })
    }

    /// Builds GF(p^h) with an explicit modulus (h+1 little-endian coefficients,
    /// monic). The modulus is checked for irreducibility by exhaustive factor
    /// search up to degree h/2.
    pub fn with_modulus(p: u64, h: usize, modulus: Vec<u64>) -> Result<Self, FieldError> {
        Self::validate_params(p, h)?;
        if h == 1 {
            return Ok(FieldSpec { p, h, modulus: vec![0, 1] });
        }
        if modulus.len() != h + 1 || modulus[h] != 1 {
            return Err(FieldError::DegreeMismatch { expected: h, got: modulus.len().saturating_sub(1) });
        }
        for &c in &modulus {
            if c >= p {
                return Err(FieldError::UnreducedCoefficient(c, p));
            }
        }
        if !is_irreducible(&modulus, p) {
            return Err(FieldError::Reducible { p });
        }
        Ok(FieldSpec { p, h, modulus })
    }

    fn validate_params(p: u64, h: usize) -> Result<(), FieldError> {
        if !is_prime(p) {
            return Err(FieldError::NotPrime(p));
        }
        if h == 0 {
            return Err(FieldError::DegreeMismatch { expected: 1, got: 0 });
        }
        let mut q: u64 = 1;
        for _ in 0..h {
            q = q.saturating_mul(p);
            if q > MAX_FIELD_ORDER {
                return Err(FieldError::OrderTooLarge(q));
            }
        }
        Ok(())
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn h(&self) -> usize {
        self.h
    }

    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    /// Field order q = p^h.
    pub fn order(&self) -> u64 {
        self.p.pow(self.h as u32)
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement { coeffs: vec![0; self.h] }
    }

    pub fn one(&self) -> FieldElement {
        let mut coeffs = vec![0; self.h];
        coeffs[0] = 1;
        FieldElement { coeffs }
    }

    /// Element with the given coordinates; they must already be reduced mod p.
    pub fn from_coeffs(&self, coeffs: &[u64]) -> Result<FieldElement, FieldError> {
        if coeffs.len() != self.h {
            return Err(FieldError::DegreeMismatch { expected: self.h, got: coeffs.len() });
        }
        for &c in coeffs {
            if c >= self.p {
                return Err(FieldError::UnreducedCoefficient(c, self.p));
            }
        }
        Ok(FieldElement { coeffs: coeffs.to_vec() })
    }

    /// Canonical integer encoding: the coordinate vector read as a base-p
    /// number (constant term least significant), a bijection with 0..q.
    pub fn index_of(&self, a: &FieldElement) -> u64 {
        let mut idx = 0;
        for &c in a.coeffs.iter().rev() {
            idx = idx * self.p + c;
        }
        idx
    }

    /// Inverse of [`index_of`](Self::index_of).
    pub fn element(&self, mut idx: u64) -> FieldElement {
        let mut coeffs = vec![0; self.h];
        for c in coeffs.iter_mut() {
            *c = idx % self.p;
            idx /= self.p;
        }
        debug_assert_eq!(idx, 0, "index out of range");
        FieldElement { coeffs }
    }

    /// All q elements in index order.
    pub fn elements(&self) -> impl Iterator<Item = FieldElement> + '_ {
        (0..self.order()).map(move |i| self.element(i))
    }

    pub fn add(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        let coeffs = a
            .coeffs
            .iter()
            .zip(&b.coeffs)
            .map(|(&x, &y)| (x + y) % self.p)
            .collect();
        FieldElement { coeffs }
    }

    pub fn neg(&self, a: &FieldElement) -> FieldElement {
        let coeffs = a.coeffs.iter().map(|&x| (self.p - x) % self.p).collect();
        FieldElement { coeffs }
    }

    pub fn sub(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        self.add(a, &self.neg(b))
    }

    pub fn mul(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        if self.h == 1 {
            return FieldElement { coeffs: vec![a.coeffs[0] * b.coeffs[0] % self.p] };
        }
        // Schoolbook product, then reduce by the monic modulus.
        let mut prod = vec![0u64; 2 * self.h - 1];
        for (i, &x) in a.coeffs.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.coeffs.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x * y) % self.p;
            }
        }
        for i in (self.h..prod.len()).rev() {
            let c = prod[i];
            if c == 0 {
                continue;
            }
            prod[i] = 0;
            for k in 0..self.h {
                let m = self.modulus[k];
                if m != 0 {
                    let pos = i - self.h + k;
                    prod[pos] = (prod[pos] + c * (self.p - m)) % self.p;
                }
            }
        }
        prod.truncate(self.h);
        FieldElement { coeffs: prod }
    }

    pub fn pow(&self, a: &FieldElement, mut e: u64) -> FieldElement {
        let mut base = a.clone();
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    pub fn inv(&self, a: &FieldElement) -> Result<FieldElement, FieldError> {
        if a.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        Ok(self.pow(a, self.order() - 2))
    }

    /// Absolute trace to GF(p): a + a^p + ... + a^(p^(h-1)), returned as the
    /// residue in [0, p). Additive and GF(p)-linear.
    pub fn trace(&self, a: &FieldElement) -> u64 {
        let mut sum = a.clone();
        let mut frob = a.clone();
        for _ in 1..self.h {
            frob = self.pow(&frob, self.p);
            sum = self.add(&sum, &frob);
        }
        debug_assert!(
            sum.coeffs[1..].iter().all(|&c| c == 0),
            "trace left the prime subfield"
        );
        sum.coeffs[0]
    }

    /// Quadratic character: 0 at zero, +1 on nonzero squares, -1 on non-squares.
    /// Only defined for odd q.
    pub fn quad_char(&self, a: &FieldElement) -> Result<i8, FieldError> {
        if self.p == 2 {
            return Err(FieldError::EvenCharacteristic);
        }
        if a.is_zero() {
            return Ok(0);
        }
        let r = self.pow(a, (self.order() - 1) / 2);
        if r == self.one() {
            Ok(1)
        } else {
            debug_assert_eq!(r, self.neg(&self.one()));
            Ok(-1)
        }
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// Remainder of polynomial division over GF(p), little-endian coefficients.
/// `g` must be monic.
fn poly_rem(f: &[u64], g: &[u64], p: u64) -> Vec<u64> {
    let dg = g.len() - 1;
    let mut r: Vec<u64> = f.to_vec();
    while r.len() > dg {
        let lead = *r.last().unwrap();
        let dr = r.len() - 1;
        if lead != 0 {
            for k in 0..dg {
                let pos = dr - dg + k;
                r[pos] = (r[pos] + lead * (p - g[k])) % p;
            }
        }
        r.pop();
    }
    while r.len() > 1 && *r.last().unwrap() == 0 {
        r.pop();
    }
    r
}

/// Exhaustive factor search: a monic polynomial of degree h >= 2 is irreducible
/// over GF(p) iff no monic polynomial of degree 1..=h/2 divides it.
fn is_irreducible(f: &[u64], p: u64) -> bool {
    let h = f.len() - 1;
    for d in 1..=h / 2 {
        let count = p.pow(d as u32);
        for k in 0..count {
            let mut g = vec![0u64; d + 1];
            let mut idx = k;
            for c in g.iter_mut().take(d) {
                *c = idx % p;
                idx /= p;
            }
            g[d] = 1;
            let r = poly_rem(f, &g, p);
            if r.len() == 1 && r[0] == 0 {
                return false;
            }
        }
    }
    true
}

/// Lexicographically smallest (leading coefficients compared first) monic
/// irreducible polynomial of degree h over GF(p).
fn smallest_irreducible(p: u64, h: usize) -> Vec<u64> {
    let total = p.pow(h as u32);
    for k in 0..total {
        let mut f = vec![0u64; h + 1];
        let mut idx = k;
        for c in f.iter_mut().take(h) {
            *c = idx % p;
            idx /= p;
        }
        f[h] = 1;
        if is_irreducible(&f, p) {
            return f;
        }
    }
    unreachable!("an irreducible polynomial of degree {h} exists over GF({p})");
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn make_prime_field() {
        let f = FieldSpec::new(7, 1).unwrap();
        assert_eq!(f.order(), 7);
        assert_eq!(FieldSpec::new(4, 1).unwrap_err(), FieldError::NotPrime(4));
    }

    #[test]
    fn gf9_modulus_x2_plus_1_accepted() {
        // x^2+1 has no root mod 3: 0^2+1=1, 1^2+1=2, 2^2+1=2.
        for a in 0..3u64 {
            assert_ne!((a * a + 1) % 3, 0);
        }
        let f = FieldSpec::with_modulus(3, 2, vec![1, 0, 1]).unwrap();
        assert_eq!(f.order(), 9);
        // x^2+2 = (x-1)(x+1) mod 3 must be rejected.
        assert_eq!(
            FieldSpec::with_modulus(3, 2, vec![2, 0, 1]).unwrap_err(),
            FieldError::Reducible { p: 3 }
        );
    }

    #[test]
    fn default_moduli_are_deterministic() {
        // GF(8): x^3 and x^3+1 and x^3+x are reducible, x^3+x+1 is not.
        let f = FieldSpec::new(2, 3).unwrap();
        assert_eq!(f.modulus(), &[1, 1, 0, 1]);
        // GF(9): x^2+1 is the first irreducible candidate.
        let f = FieldSpec::new(3, 2).unwrap();
        assert_eq!(f.modulus(), &[1, 0, 1]);
    }

    #[test]
    fn prime_field_mul_inv() {
        let f = FieldSpec::new(7, 1).unwrap();
        let three = f.element(3);
        let five = f.element(5);
        assert_eq!(f.mul(&three, &five), f.one());
        assert_eq!(f.inv(&f.zero()).unwrap_err(), FieldError::DivisionByZero);
    }

    #[test]
    fn gf8_reduction() {
        // In GF(8) with modulus x^3+x+1: x * x^2 = x^3 = x+1.
        let f = FieldSpec::new(2, 3).unwrap();
        let x = f.from_coeffs(&[0, 1, 0]).unwrap();
        let x2 = f.from_coeffs(&[0, 0, 1]).unwrap();
        assert_eq!(f.mul(&x, &x2), f.from_coeffs(&[1, 1, 0]).unwrap());
    }

    #[test]
    fn trace_examples() {
        // GF(8): Tr(1) = 1+1+1 = 1 in characteristic 2.
        let f = FieldSpec::new(2, 3).unwrap();
        assert_eq!(f.trace(&f.one()), 1);
        // GF(4) with x^2+x+1: Tr(x) = x + x^2 = x + (x+1) = 1.
        let f = FieldSpec::with_modulus(2, 2, vec![1, 1, 1]).unwrap();
        let x = f.from_coeffs(&[0, 1]).unwrap();
        assert_eq!(f.trace(&x), 1);
        // h = 1: trace is the identity.
        let f = FieldSpec::new(11, 1).unwrap();
        for a in 0..11 {
            assert_eq!(f.trace(&f.element(a)), a);
        }
    }

    #[test]
    fn quad_char_mod_7() {
        let f = FieldSpec::new(7, 1).unwrap();
        // Oracle: enumerate the squares.
        let squares: std::collections::HashSet<u64> = (1..7).map(|a| a * a % 7).collect();
        assert_eq!(squares, [1, 2, 4].into_iter().collect());
        assert_eq!(f.quad_char(&f.element(2)).unwrap(), 1);
        assert_eq!(f.quad_char(&f.element(3)).unwrap(), -1);
        assert_eq!(f.quad_char(&f.one()).unwrap(), 1);
        assert_eq!(f.quad_char(&f.zero()).unwrap(), 0);
    }

    #[test]
    fn quad_char_even_rejected() {
        let f = FieldSpec::new(2, 3).unwrap();
        assert_eq!(f.quad_char(&f.one()).unwrap_err(), FieldError::EvenCharacteristic);
    }

    fn small_prime_powers(cap: u64, odd_only: bool) -> Vec<(u64, usize)> {
        let mut out = Vec::new();
        for p in 2..=cap {
            if !is_prime(p) || (odd_only && p == 2) {
                continue;
            }
            let mut q = p;
            let mut h = 1;
            while q <= cap {
                out.push((p, h));
                q = q.saturating_mul(p);
                h += 1;
            }
        }
        out
    }

    #[test]
    fn quad_char_multiplicative_all_odd_q_up_to_121() {
        for (p, h) in small_prime_powers(121, true) {
            let f = FieldSpec::new(p, h).unwrap();
            let q = f.order();
            let els: Vec<FieldElement> = f.elements().collect();
            let mut plus = 0;
            for a in &els {
                if f.quad_char(a).unwrap() == 1 {
                    plus += 1;
                }
                for b in &els {
                    let lhs = f.quad_char(a).unwrap() * f.quad_char(b).unwrap();
                    let rhs = f.quad_char(&f.mul(a, b)).unwrap();
                    assert_eq!(lhs, rhs, "chi not multiplicative in GF({q})");
                }
            }
            assert_eq!(plus as u64, (q - 1) / 2, "square count in GF({q})");
        }
    }

    #[test]
    fn trace_linear_and_surjective_up_to_128() {
        for (p, h) in small_prime_powers(128, false) {
            let f = FieldSpec::new(p, h).unwrap();
            let els: Vec<FieldElement> = f.elements().collect();
            let mut hit = vec![false; p as usize];
            for a in &els {
                hit[f.trace(a) as usize] = true;
            }
            assert!(hit.iter().all(|&b| b), "trace not surjective for GF({})", f.order());
            // Additivity on a deterministic sample of pairs.
            for (i, a) in els.iter().enumerate().step_by(7) {
                for b in els.iter().skip(i % 3).step_by(11) {
                    let lhs = f.trace(&f.add(a, b));
                    let rhs = (f.trace(a) + f.trace(b)) % p;
                    assert_eq!(lhs, rhs);
                }
            }
        }
    }

    #[test]
    fn inverses_up_to_128() {
        for (p, h) in small_prime_powers(128, false) {
            let f = FieldSpec::new(p, h).unwrap();
            for a in f.elements().skip(1) {
                let inv = f.inv(&a).unwrap();
                assert_eq!(f.mul(&a, &inv), f.one());
            }
        }
    }

    #[test]
    fn order_cap_enforced() {
        assert!(matches!(FieldSpec::new(2, 21), Err(FieldError::OrderTooLarge(_))));
        assert!(FieldSpec::new(2, 20).is_ok());
    }
}
