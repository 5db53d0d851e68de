//! Exact coefficient-field arithmetic: arbitrary-precision rationals and
//! prime fields `F_p`.
//!
//! A [`Scalar`] carries its own field descriptor. Rational values are stored
//! fully reduced with a positive denominator; prime-field values are the
//! canonical representatives in `[0, p)`. All operations are exact.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Descriptor of the coefficient field.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FieldId {
    Rational,
    Prime(u64),
}

impl FieldId {
    /// Builds a prime-field descriptor, checking primality of `p`.
    pub fn prime(p: u64) -> Result<FieldId> {
        if is_prime_u64(p) {
            Ok(FieldId::Prime(p))
        } else {
            Err(Error::NotPrime { p })
        }
    }

    pub fn characteristic(&self) -> u64 {
        match self {
            FieldId::Rational => 0,
            FieldId::Prime(p) => *p,
        }
    }
}

impl fmt::Display for FieldId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldId::Rational => write!(f, "Q"),
            FieldId::Prime(p) => write!(f, "F_{p}"),
        }
    }
}

/// An exact field element together with its field descriptor.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Scalar {
    Rat(BigRational),
    Mod { value: u64, prime: u64 },
}

/// The four arithmetic operations exposed by [`Scalar::arith`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl Scalar {
    pub fn zero(field: FieldId) -> Scalar {
        match field {
            FieldId::Rational => Scalar::Rat(BigRational::zero()),
            FieldId::Prime(p) => Scalar::Mod { value: 0, prime: p },
        }
    }

    pub fn one(field: FieldId) -> Scalar {
        match field {
            FieldId::Rational => Scalar::Rat(BigRational::one()),
            FieldId::Prime(p) => Scalar::Mod {
                value: 1 % p,
                prime: p,
            },
        }
    }

    pub fn from_i64(n: i64, field: FieldId) -> Scalar {
        match field {
            FieldId::Rational => Scalar::Rat(BigRational::from(BigInt::from(n))),
            FieldId::Prime(p) => {
                let r = n.rem_euclid(p as i64) as u64;
                Scalar::Mod {
                    value: r % p,
                    prime: p,
                }
            }
        }
    }

    pub fn from_bigint(n: BigInt, field: FieldId) -> Scalar {
        match field {
            FieldId::Rational => Scalar::Rat(BigRational::from(n)),
            FieldId::Prime(p) => {
                let m = BigInt::from(p);
                let r = ((n % &m) + &m) % &m;
                let digits = r.to_u64_digits().1;
                let value = digits.first().copied().unwrap_or(0);
                Scalar::Mod { value, prime: p }
            }
        }
    }

    /// Exact rational `num/den`; only meaningful over the rationals.
    pub fn from_ratio(num: i64, den: i64, field: FieldId) -> Result<Scalar> {
        if den == 0 {
            return Err(Error::DivisionByZero);
        }
        let n = Scalar::from_i64(num, field);
        let d = Scalar::from_i64(den, field);
        n.checked_div(&d)
    }

    pub fn field_id(&self) -> FieldId {
        match self {
            Scalar::Rat(_) => FieldId::Rational,
            Scalar::Mod { prime, .. } => FieldId::Prime(*prime),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Rat(r) => r.is_zero(),
            Scalar::Mod { value, .. } => *value == 0,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Rat(r) => r.is_one(),
            Scalar::Mod { value, prime } => *value == 1 % *prime,
        }
    }

    fn check_same_field(&self, other: &Scalar) -> Result<()> {
        let (a, b) = (self.field_id(), other.field_id());
        if a == b {
            Ok(())
        } else {
            Err(Error::FieldMismatch(a, b))
        }
    }

    /// Field arithmetic with explicit operand validation. Internal code uses
    /// the panicking `add`/`sub`/`mul` directly once operands are known to
    /// share a field.
    pub fn arith(a: &Scalar, b: &Scalar, op: ArithOp) -> Result<Scalar> {
        a.check_same_field(b)?;
        Ok(match op {
            ArithOp::Add => a.add(b),
            ArithOp::Sub => a.sub(b),
            ArithOp::Mul => a.mul(b),
            ArithOp::Div => a.checked_div(b)?,
        })
    }

    pub fn add(&self, other: &Scalar) -> Scalar {
        match (self, other) {
            (Scalar::Rat(a), Scalar::Rat(b)) => Scalar::Rat(a + b),
            (Scalar::Mod { value: a, prime: p }, Scalar::Mod { value: b, prime: q }) if p == q => {
                Scalar::Mod {
                    value: add_mod(*a, *b, *p),
                    prime: *p,
                }
            }
            _ => panic!("scalar field mismatch"),
        }
    }

    pub fn sub(&self, other: &Scalar) -> Scalar {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Scalar {
        match self {
            Scalar::Rat(a) => Scalar::Rat(-a),
            Scalar::Mod { value, prime } => Scalar::Mod {
                value: if *value == 0 { 0 } else { prime - value },
                prime: *prime,
            },
        }
    }

    pub fn mul(&self, other: &Scalar) -> Scalar {
        match (self, other) {
            (Scalar::Rat(a), Scalar::Rat(b)) => Scalar::Rat(a * b),
            (Scalar::Mod { value: a, prime: p }, Scalar::Mod { value: b, prime: q }) if p == q => {
                Scalar::Mod {
                    value: mul_mod(*a, *b, *p),
                    prime: *p,
                }
            }
            _ => panic!("scalar field mismatch"),
        }
    }

    pub fn inv(&self) -> Result<Scalar> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(match self {
            Scalar::Rat(a) => Scalar::Rat(a.recip()),
            Scalar::Mod { value, prime } => Scalar::Mod {
                // Fermat: a^(p-2) mod p
                value: pow_mod(*value, *prime - 2, *prime),
                prime: *prime,
            },
        })
    }

    pub fn checked_div(&self, other: &Scalar) -> Result<Scalar> {
        self.check_same_field(other)?;
        Ok(self.mul(&other.inv()?))
    }

    pub fn pow(&self, e: u32) -> Scalar {
        let mut acc = Scalar::one(self.field_id());
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// `1/n!` in the field. Errors with `CharDividesFactorial` when the field
    /// characteristic divides `n!`, i.e. when the characteristic is a prime
    /// `p <= n`.
    pub fn factorial_inverse(n: u64, field: FieldId) -> Result<Scalar> {
        if let FieldId::Prime(p) = field {
            if p <= n {
                return Err(Error::CharDividesFactorial { n, p });
            }
        }
        let mut fact = Scalar::one(field);
        for m in 2..=n {
            fact = fact.mul(&Scalar::from_i64(m as i64, field));
        }
        fact.inv()
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Rat(r) => {
                if r.denom().is_one() {
                    write!(f, "{}", r.numer())
                } else {
                    write!(f, "{}/{}", r.numer(), r.denom())
                }
            }
            Scalar::Mod { value, .. } => write!(f, "{value}"),
        }
    }
}

/// Renders the scalar so that the expression parser reads it back, wrapping
/// negative rationals for use inside products.
pub(crate) fn scalar_is_negative(s: &Scalar) -> bool {
    match s {
        Scalar::Rat(r) => r.is_negative(),
        Scalar::Mod { .. } => false,
    }
}

fn add_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 + b as u128) % p as u128) as u64
}

fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, p);
        }
        base = mul_mod(base, base, p);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin over u64.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for q in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == q {
            return true;
        }
        if n.is_multiple_of(q) {
            return false;
        }
    }
    let mut d = n - 1;
    let mut r = 0u32;
    while d.is_multiple_of(2) {
        d /= 2;
        r += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 0..r - 1 {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}
