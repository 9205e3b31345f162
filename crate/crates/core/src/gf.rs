//! Prime-field arithmetic.
//!
//! Moduli are restricted to `2 < q < 2^31`, so every product of two residues
//! fits in a `u64` and no reduction step can overflow.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const MAX_MODULUS: u64 = 1 << 31;

/// A prime field `F_q` together with its smallest generator and the
/// factorization of `q - 1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PrimeField {
    q: u32,
    g: u32,
    factors: Vec<u32>,
}

/// A canonical residue tagged with its modulus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Fe {
    value: u32,
    modulus: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Neg,
}

pub fn is_prime(n: u64) -> bool {
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

/// Prime factors of `n` with multiplicity, ascending.
pub fn factorize(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        while n.is_multiple_of(d) {
            out.push(d);
            n /= d;
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

fn pow_mod(base: u64, mut exp: u64, q: u64) -> u64 {
    let mut acc = 1 % q;
    let mut b = base % q;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b % q;
        }
        b = b * b % q;
        exp >>= 1;
    }
    acc
}

/// Builds `F_q` and finds its smallest generator.
pub fn find_generator(q: u64) -> Result<PrimeField> {
    if q <= 2 || q >= MAX_MODULUS || !is_prime(q) {
        return Err(Error::NotPrime(q));
    }
    let factors = factorize(q - 1);
    let mut distinct = factors.clone();
    distinct.dedup();
    let g = (2..q)
        .find(|&c| distinct.iter().all(|&r| pow_mod(c, (q - 1) / r, q) != 1))
        .expect("every prime field has a generator");
    Ok(PrimeField {
        q: q as u32,
        g: g as u32,
        factors: factors.into_iter().map(|f| f as u32).collect(),
    })
}

impl PrimeField {
    pub fn new(q: u64) -> Result<Self> {
        find_generator(q)
    }

    pub fn modulus(&self) -> u32 {
        self.q
    }

    /// `q - 1`, the order of the multiplicative group.
    pub fn order(&self) -> usize {
        self.q as usize - 1
    }

    /// Prime factors of `q - 1`, with multiplicity.
    pub fn factors(&self) -> &[u32] {
        &self.factors
    }

    pub fn generator(&self) -> Fe {
        self.elem(self.g as u64)
    }

    /// Reduces an arbitrary integer into the field.
    pub fn elem(&self, v: u64) -> Fe {
        Fe {
            value: (v % self.q as u64) as u32,
            modulus: self.q,
        }
    }

    /// Reduces a signed integer into the field.
    pub fn elem_i64(&self, v: i64) -> Fe {
        let q = self.q as i64;
        self.elem(v.rem_euclid(q) as u64)
    }

    pub fn zero(&self) -> Fe {
        self.elem(0)
    }

    pub fn one(&self) -> Fe {
        self.elem(1)
    }

    /// `g^e`, with the exponent taken modulo `q - 1`.
    pub fn gen_pow(&self, e: u64) -> Fe {
        self.generator().pow(e % self.order() as u64)
    }

    pub fn contains(&self, x: Fe) -> bool {
        x.modulus == self.q
    }

    /// Primitive `order`-th root of unity `g^((q-1)/order)`.
    pub fn root_of_unity(&self, order: usize) -> Result<Fe> {
        root_of_unity(self, order)
    }
}

impl fmt::Display for PrimeField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{} (g = {})", self.q, self.g)
    }
}

pub fn root_of_unity(field: &PrimeField, order: usize) -> Result<Fe> {
    if order == 0 || !field.order().is_multiple_of(order) {
        return Err(Error::NoSuchRoot {
            q: field.q,
            order,
        });
    }
    Ok(field.generator().pow((field.order() / order) as u64))
}

impl Fe {
    pub fn value(self) -> u32 {
        self.value
    }

    pub fn modulus(self) -> u32 {
        self.modulus
    }

    pub fn is_zero(self) -> bool {
        self.value == 0
    }

    fn same(self, o: Fe) -> Result<()> {
        if self.modulus == o.modulus {
            Ok(())
        } else {
            Err(Error::FieldMismatch {
                left: self.modulus,
                right: o.modulus,
            })
        }
    }

    fn with(self, value: u64) -> Fe {
        Fe {
            value: value as u32,
            modulus: self.modulus,
        }
    }

    /// Checked arithmetic; `b` is ignored for [`ArithOp::Neg`].
    pub fn arith(self, b: Fe, op: ArithOp) -> Result<Fe> {
        self.same(b)?;
        let q = self.modulus as u64;
        let (x, y) = (self.value as u64, b.value as u64);
        let v = match op {
            ArithOp::Add => (x + y) % q,
            ArithOp::Sub => (x + q - y) % q,
            ArithOp::Mul => x * y % q,
            ArithOp::Neg => (q - x) % q,
        };
        Ok(self.with(v))
    }

    pub fn pow(self, e: u64) -> Fe {
        self.with(pow_mod(self.value as u64, e, self.modulus as u64))
    }

    pub fn inv(self) -> Result<Fe> {
        if self.value == 0 {
            return Err(Error::DivisionByZero);
        }
        Ok(self.pow(self.modulus as u64 - 2))
    }
}

impl fmt::Display for Fe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

// Operator forms panic on mixed moduli; use `Fe::arith` for the checked path.
macro_rules! binop {
    ($tr:ident, $m:ident, $op:expr) => {
        impl $tr for Fe {
            type Output = Fe;
            fn $m(self, rhs: Fe) -> Fe {
                match self.arith(rhs, $op) {
                    Ok(v) => v,
                    Err(e) => panic!("{e}"),
                }
            }
        }
    };
}

binop!(Add, add, ArithOp::Add);
binop!(Sub, sub, ArithOp::Sub);
binop!(Mul, mul, ArithOp::Mul);

impl Neg for Fe {
    type Output = Fe;
    fn neg(self) -> Fe {
        self.with((self.modulus as u64 - self.value as u64) % self.modulus as u64)
    }
}

impl std::iter::Sum for Fe {
    // Empty sums have no field; callers fold from an explicit zero instead.
    fn sum<I: Iterator<Item = Fe>>(iter: I) -> Fe {
        iter.reduce(|a, b| a + b).expect("sum of an empty iterator of Fe")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn f(q: u64) -> PrimeField {
        PrimeField::new(q).unwrap()
    }

    #[test]
    fn arith_examples() {
        let f17 = f(17);
        assert_eq!(f17.elem(3).arith(f17.elem(6), ArithOp::Mul).unwrap(), f17.elem(1));
        let f13 = f(13);
        assert_eq!((f13.elem(12) + f13.elem(5)).value(), 4);
        let f5 = f(5);
        assert_eq!((-f5.zero()).value(), 0);
        assert_eq!(f5.zero().arith(f5.zero(), ArithOp::Neg).unwrap().value(), 0);
        assert_eq!((f13.elem(2) - f13.elem(5)).value(), 10);
    }

    #[test]
    fn mixed_fields_rejected() {
        let a = f(13).elem(2);
        let b = f(17).elem(2);
        assert_eq!(
            a.arith(b, ArithOp::Add),
            Err(Error::FieldMismatch { left: 13, right: 17 })
        );
    }

    #[test]
    fn inverse_examples() {
        assert_eq!(f(13).elem(2).inv().unwrap().value(), 7);
        assert_eq!(f(101).one().inv().unwrap().value(), 1);
        assert_eq!(f(17).elem(3).inv().unwrap().value(), 6);
        assert_eq!(f(17).zero().inv(), Err(Error::DivisionByZero));
    }

    #[test]
    fn pow_examples() {
        assert_eq!(f(17).elem(3).pow(16).value(), 1);
        assert_eq!(f(5).elem(2).pow(3).value(), 3);
        assert_eq!(f(5).zero().pow(0).value(), 1);
        for q in [5u64, 13, 17, 257, 65537] {
            let fq = f(q);
            assert_eq!(fq.generator().pow(q - 1), fq.one());
        }
    }

    /// Smallest residue whose powers hit every nonzero element.
    fn brute_force_generator(q: u64) -> u64 {
        (2..q)
            .find(|&c| {
                let mut seen = std::collections::HashSet::new();
                let mut x = 1u64;
                for _ in 0..q - 1 {
                    x = x * c % q;
                    seen.insert(x);
                }
                seen.len() as u64 == q - 1
            })
            .unwrap()
    }

    #[test]
    fn generator_matches_brute_force() {
        assert_eq!(f(17).generator().value(), 3);
        assert_eq!(f(5).generator().value(), 2);
        assert_eq!(f(13).generator().value(), 2);
        for q in [3u64, 7, 11, 19, 23, 29, 31, 41, 97, 193, 257] {
            assert_eq!(f(q).generator().value() as u64, brute_force_generator(q), "q = {q}");
        }
    }

    #[test]
    fn factor_product_is_q_minus_one() {
        for q in [5u64, 13, 17, 257, 7681, 2_147_483_647] {
            let fq = f(q);
            let prod: u64 = fq.factors().iter().map(|&x| x as u64).product();
            assert_eq!(prod, q - 1);
        }
    }

    #[test]
    fn rejects_non_primes() {
        assert_eq!(PrimeField::new(15), Err(Error::NotPrime(15)));
        assert_eq!(PrimeField::new(2), Err(Error::NotPrime(2)));
        assert!(PrimeField::new(1 << 31).is_err());
    }

    #[test]
    fn roots_of_unity() {
        assert_eq!(f(17).root_of_unity(16).unwrap().value(), 3);
        assert_eq!(f(5).root_of_unity(4).unwrap().value(), 2);
        assert_eq!(
            f(17).root_of_unity(5),
            Err(Error::NoSuchRoot { q: 17, order: 5 })
        );
        for (q, k) in [(17u64, 8usize), (13, 6), (257, 256), (97, 12)] {
            let b = f(q).root_of_unity(k).unwrap();
            assert_eq!(b.pow(k as u64).value(), 1);
            let mut seen = std::collections::HashSet::new();
            for j in 0..k {
                assert!(seen.insert(b.pow(j as u64)));
            }
        }
    }

    #[test]
    fn large_modulus_products_are_exact() {
        let fq = f(2_147_483_647);
        let a = fq.elem(2_147_483_646);
        assert_eq!((a * a).value(), 1);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]
        #[test]
        fn field_axioms(qi in 0usize..4, a in any::<u64>(), b in any::<u64>(), c in any::<u64>()) {
            let fq = f([5u64, 13, 17, 257][qi]);
            let (a, b, c) = (fq.elem(a), fq.elem(b), fq.elem(c));
            prop_assert_eq!((a + b) + c, a + (b + c));
            prop_assert_eq!((a * b) * c, a * (b * c));
            prop_assert_eq!(a + b, b + a);
            prop_assert_eq!(a * b, b * a);
            prop_assert_eq!(a * (b + c), a * b + a * c);
            prop_assert_eq!(a - a, fq.zero());
            if !a.is_zero() {
                let ai = a.inv().unwrap();
                prop_assert_eq!(a * ai, fq.one());
                prop_assert_eq!(ai.inv().unwrap(), a);
            }
        }
    }
}
