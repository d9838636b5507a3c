//! Exact scalars over prime fields `F_p` and the rationals.
//!
//! [`Scalar`] is the value type used by the public algebra API. The
//! [`FieldOps`] trait abstracts the arithmetic so the linear-algebra and
//! enumeration kernels can run either on [`Scalar`]s (any field) or on raw
//! `u32` residues through [`Fp`] when the field is finite.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// A prime `p < 2^16`, checked at construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Prime(u32);

impl Prime {
    pub const MAX: u64 = 1 << 16;

    pub fn new(p: u64) -> Result<Self> {
        if p >= Self::MAX {
            return Err(Error::PrimeTooLarge(p));
        }
        if p < 2 || (2..).take_while(|d| d * d <= p).any(|d| p.is_multiple_of(d)) {
            return Err(Error::NotPrime(p));
        }
        Ok(Prime(p as u32))
    }

    pub fn get(self) -> u32 {
        self.0
    }
}

/// Field descriptor: a prime field or `Q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Field {
    Prime(Prime),
    Rational,
}

impl Field {
    pub fn prime(p: u64) -> Result<Self> {
        Prime::new(p).map(Field::Prime)
    }

    /// Field order, `None` for `Q`.
    pub fn order(&self) -> Option<u32> {
        match self {
            Field::Prime(p) => Some(p.get()),
            Field::Rational => None,
        }
    }

    pub fn characteristic(&self) -> u32 {
        self.order().unwrap_or(0)
    }

    pub fn fp(&self) -> Option<Fp> {
        self.order().map(Fp::new)
    }

    pub fn zero(&self) -> Scalar {
        self.from_i64(0)
    }

    pub fn one(&self) -> Scalar {
        self.from_i64(1)
    }

    pub fn from_i64(&self, n: i64) -> Scalar {
        match *self {
            Field::Prime(p) => {
                let p = p.get();
                Scalar(Repr::Residue { p, v: n.rem_euclid(p as i64) as u32 })
            }
            Field::Rational => Scalar(Repr::Rational(BigRational::from_integer(n.into()))),
        }
    }

    /// Residue `v mod p`; for `Q` the integer `v`.
    pub fn from_residue(&self, v: u32) -> Scalar {
        self.from_i64(v as i64)
    }

    /// Parses the scalar grammar `integer | integer "/" positive-integer`.
    /// Over `F_p` a fraction is read as `n * d^-1`.
    pub fn parse(&self, s: &str) -> Result<Scalar> {
        let bad = || Error::ParseScalar(s.to_string());
        let t = s.trim();
        let (num, den) = match t.split_once('/') {
            Some((n, d)) => {
                let n: BigInt = n.trim().parse().map_err(|_| bad())?;
                let d: BigInt = d.trim().parse().map_err(|_| bad())?;
                if !d.is_positive() {
                    return Err(bad());
                }
                (n, d)
            }
            None => (t.parse::<BigInt>().map_err(|_| bad())?, BigInt::one()),
        };
        match *self {
            Field::Prime(p) => {
                let pb = BigInt::from(p.get());
                let reduce = |x: &BigInt| x.mod_floor(&pb).to_u32().expect("residue fits");
                let n = self.from_residue(reduce(&num));
                let d = self.from_residue(reduce(&den));
                n.try_div(&d).map_err(|_| bad())
            }
            Field::Rational => Ok(Scalar(Repr::Rational(BigRational::new(num, den)))),
        }
    }

    /// All `p` elements of a prime field: `0` first, then `1..p-1`.
    pub fn elements(&self) -> Result<Vec<Scalar>> {
        match self.order() {
            Some(p) => Ok((0..p).map(|v| self.from_residue(v)).collect()),
            None => Err(Error::InfiniteField),
        }
    }

    /// Nonzero elements; for `Q` the caller supplies a finite stand-in.
    pub fn units(&self) -> Result<Vec<Scalar>> {
        Ok(self.elements()?.into_iter().skip(1).collect())
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Field::Prime(p) => write!(f, "F_{}", p.get()),
            Field::Rational => write!(f, "Q"),
        }
    }
}

impl FromStr for Field {
    type Err = Error;

    /// `"Q"` or a prime such as `"5"`.
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "Q" | "q" | "rational" => Ok(Field::Rational),
            t => {
                let p: u64 = t.parse().map_err(|_| Error::Format(format!("bad field {s:?}")))?;
                Field::prime(p)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum Repr {
    Residue { p: u32, v: u32 },
    Rational(BigRational),
}

/// An exact field element in canonical form.
///
/// Equality is representational: residues are kept in `0..p` and fractions
/// are always reduced with a positive denominator.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Scalar(Repr);

impl Scalar {
    pub fn field(&self) -> Field {
        match &self.0 {
            Repr::Residue { p, .. } => Field::Prime(Prime(*p)),
            Repr::Rational(_) => Field::Rational,
        }
    }

    pub fn is_zero(&self) -> bool {
        match &self.0 {
            Repr::Residue { v, .. } => *v == 0,
            Repr::Rational(r) => r.is_zero(),
        }
    }

    pub fn is_one(&self) -> bool {
        match &self.0 {
            Repr::Residue { v, .. } => *v == 1,
            Repr::Rational(r) => r.is_one(),
        }
    }

    /// The residue in `0..p`, `None` for rationals.
    pub fn residue(&self) -> Option<u32> {
        match &self.0 {
            Repr::Residue { v, .. } => Some(*v),
            Repr::Rational(_) => None,
        }
    }

    fn binary(&self, other: &Scalar, op: BinOp) -> Result<Scalar> {
        match (&self.0, &other.0) {
            (Repr::Residue { p, v: a }, Repr::Residue { p: q, v: b }) if p == q => {
                let fp = Fp::new(*p);
                let v = match op {
                    BinOp::Add => fp.add(*a, *b),
                    BinOp::Sub => fp.sub(*a, *b),
                    BinOp::Mul => fp.mul(*a, *b),
                    BinOp::Div => fp.mul(*a, fp.inv(*b).ok_or(Error::DivisionByZero)?),
                };
                Ok(Scalar(Repr::Residue { p: *p, v }))
            }
            (Repr::Rational(a), Repr::Rational(b)) => {
                let r = match op {
                    BinOp::Add => a + b,
                    BinOp::Sub => a - b,
                    BinOp::Mul => a * b,
                    BinOp::Div => {
                        if b.is_zero() {
                            return Err(Error::DivisionByZero);
                        }
                        a / b
                    }
                };
                Ok(Scalar(Repr::Rational(r)))
            }
            _ => Err(Error::MixedFields),
        }
    }

    pub fn try_add(&self, other: &Scalar) -> Result<Scalar> {
        self.binary(other, BinOp::Add)
    }

    pub fn try_sub(&self, other: &Scalar) -> Result<Scalar> {
        self.binary(other, BinOp::Sub)
    }

    pub fn try_mul(&self, other: &Scalar) -> Result<Scalar> {
        self.binary(other, BinOp::Mul)
    }

    pub fn try_div(&self, other: &Scalar) -> Result<Scalar> {
        self.binary(other, BinOp::Div)
    }

    pub fn inv(&self) -> Result<Scalar> {
        self.field().one().try_div(self)
    }

    pub fn try_eq(&self, other: &Scalar) -> Result<bool> {
        if self.field() != other.field() {
            return Err(Error::MixedFields);
        }
        Ok(self == other)
    }
}

#[derive(Clone, Copy)]
enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl Neg for &Scalar {
    type Output = Scalar;

    fn neg(self) -> Scalar {
        match &self.0 {
            Repr::Residue { p, v } => Scalar(Repr::Residue { p: *p, v: Fp::new(*p).neg(*v) }),
            Repr::Rational(r) => Scalar(Repr::Rational(-r)),
        }
    }
}

impl Neg for Scalar {
    type Output = Scalar;

    fn neg(self) -> Scalar {
        -&self
    }
}

// Operator impls panic on mixed fields; the algebra layer checks fields at
// its boundary and the `try_*` methods report the error instead.
macro_rules! scalar_op {
    ($tr:ident, $method:ident, $checked:ident) => {
        impl $tr<&Scalar> for &Scalar {
            type Output = Scalar;

            fn $method(self, rhs: &Scalar) -> Scalar {
                match self.$checked(rhs) {
                    Ok(s) => s,
                    Err(e) => panic!("scalar {}: {e}", stringify!($method)),
                }
            }
        }

        impl $tr<Scalar> for Scalar {
            type Output = Scalar;

            fn $method(self, rhs: Scalar) -> Scalar {
                (&self).$method(&rhs)
            }
        }
    };
}

scalar_op!(Add, add, try_add);
scalar_op!(Sub, sub, try_sub);
scalar_op!(Mul, mul, try_mul);
scalar_op!(Div, div, try_div);

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0 {
            Repr::Residue { v, .. } => write!(f, "{v}"),
            Repr::Rational(r) if r.is_integer() => write!(f, "{}", r.numer()),
            Repr::Rational(r) => write!(f, "{}/{}", r.numer(), r.denom()),
        }
    }
}

/// Arithmetic context shared by the generic kernels.
pub trait FieldOps: Sync {
    type Elem: Clone + PartialEq + Send + Sync + fmt::Debug;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn inv(&self, a: &Self::Elem) -> Option<Self::Elem>;
    fn is_zero(&self, a: &Self::Elem) -> bool;
}

impl FieldOps for Field {
    type Elem = Scalar;

    fn zero(&self) -> Scalar {
        Field::zero(self)
    }

    fn one(&self) -> Scalar {
        Field::one(self)
    }

    fn add(&self, a: &Scalar, b: &Scalar) -> Scalar {
        a + b
    }

    fn sub(&self, a: &Scalar, b: &Scalar) -> Scalar {
        a - b
    }

    fn mul(&self, a: &Scalar, b: &Scalar) -> Scalar {
        a * b
    }

    fn neg(&self, a: &Scalar) -> Scalar {
        -a
    }

    fn inv(&self, a: &Scalar) -> Option<Scalar> {
        a.inv().ok()
    }

    fn is_zero(&self, a: &Scalar) -> bool {
        a.is_zero()
    }
}

/// Raw residue arithmetic modulo a small prime.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Fp {
    p: u32,
}

impl Fp {
    pub fn new(p: u32) -> Self {
        debug_assert!(p >= 2 && (p as u64) < Prime::MAX);
        Fp { p }
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    #[inline]
    pub fn add(&self, a: u32, b: u32) -> u32 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(&self, a: u32, b: u32) -> u32 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        a * b % self.p
    }

    #[inline]
    pub fn neg(&self, a: u32) -> u32 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    pub fn inv(&self, a: u32) -> Option<u32> {
        if a == 0 {
            return None;
        }
        let (mut r0, mut r1) = (self.p as i64, a as i64);
        let (mut t0, mut t1) = (0i64, 1i64);
        while r1 != 0 {
            let q = r0 / r1;
            (r0, r1) = (r1, r0 - q * r1);
            (t0, t1) = (t1, t0 - q * t1);
        }
        Some(t0.rem_euclid(self.p as i64) as u32)
    }
}

impl FieldOps for Fp {
    type Elem = u32;

    fn zero(&self) -> u32 {
        0
    }

    fn one(&self) -> u32 {
        1
    }

    fn add(&self, a: &u32, b: &u32) -> u32 {
        Fp::add(self, *a, *b)
    }

    fn sub(&self, a: &u32, b: &u32) -> u32 {
        Fp::sub(self, *a, *b)
    }

    fn mul(&self, a: &u32, b: &u32) -> u32 {
        Fp::mul(self, *a, *b)
    }

    fn neg(&self, a: &u32) -> u32 {
        Fp::neg(self, *a)
    }

    fn inv(&self, a: &u32) -> Option<u32> {
        Fp::inv(self, *a)
    }

    fn is_zero(&self, a: &u32) -> bool {
        *a == 0
    }
}
