use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use rand::Rng;

/// The Mersenne prime 2^61 - 1.
pub const P: u64 = (1 << 61) - 1;

/// A residue modulo [`P`], always kept reduced.
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Fp(u64);

impl Fp {
    pub const ZERO: Fp = Fp(0);
    pub const ONE: Fp = Fp(1);

    pub fn new(v: u64) -> Fp {
        Fp(v % P)
    }

    pub fn from_i64(v: i64) -> Fp {
        let r = v.rem_euclid(P as i64);
        Fp(r as u64)
    }

    pub fn value(self) -> u64 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }

    /// Uniform over the nonzero residues.
    pub fn random_nonzero<R: Rng + ?Sized>(rng: &mut R) -> Fp {
        Fp(rng.gen_range(1..P))
    }

    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Fp {
        Fp(rng.gen_range(0..P))
    }

    pub fn pow(self, mut e: u64) -> Fp {
        let mut base = self;
        let mut acc = Fp::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            e >>= 1;
        }
        acc
    }

    /// `None` for zero.
    pub fn inv(self) -> Option<Fp> {
        (!self.is_zero()).then(|| self.pow(P - 2))
    }
}

impl fmt::Debug for Fp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for Fp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl From<u64> for Fp {
    fn from(v: u64) -> Fp {
        Fp::new(v)
    }
}

impl Add for Fp {
    type Output = Fp;
    fn add(self, rhs: Fp) -> Fp {
        let s = self.0 + rhs.0;
        Fp(if s >= P { s - P } else { s })
    }
}

impl Sub for Fp {
    type Output = Fp;
    fn sub(self, rhs: Fp) -> Fp {
        Fp(if self.0 >= rhs.0 { self.0 - rhs.0 } else { self.0 + P - rhs.0 })
    }
}

impl Neg for Fp {
    type Output = Fp;
    fn neg(self) -> Fp {
        Fp::ZERO - self
    }
}

impl Mul for Fp {
    type Output = Fp;
    fn mul(self, rhs: Fp) -> Fp {
        let w = self.0 as u128 * rhs.0 as u128;
        // 2^61 ≡ 1, so fold the high bits onto the low ones.
        let lo = (w as u64) & P;
        let hi = (w >> 61) as u64;
        let s = lo + hi;
        Fp(if s >= P { s - P } else { s })
    }
}

impl AddAssign for Fp {
    fn add_assign(&mut self, rhs: Fp) {
        *self = *self + rhs;
    }
}

impl SubAssign for Fp {
    fn sub_assign(&mut self, rhs: Fp) {
        *self = *self - rhs;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn small_arithmetic() {
        assert_eq!(Fp::new(P), Fp::ZERO);
        assert_eq!(Fp::from_i64(-1), Fp::new(P - 1));
        assert_eq!(Fp::new(P - 1) + Fp::new(2), Fp::ONE);
        assert_eq!(Fp::new(3) - Fp::new(5), Fp::from_i64(-2));
        assert_eq!(Fp::new(P - 1) * Fp::new(P - 1), Fp::ONE);
        assert_eq!(Fp::ZERO.inv(), None);
    }

    proptest! {
        #[test]
        fn mul_matches_u128(a in 0..P, b in 0..P) {
            let want = (a as u128 * b as u128 % P as u128) as u64;
            prop_assert_eq!((Fp::new(a) * Fp::new(b)).value(), want);
        }

        #[test]
        fn inverse_inverts(a in 1..P) {
            prop_assert_eq!(Fp::new(a) * Fp::new(a).inv().unwrap(), Fp::ONE);
        }
    }
}
