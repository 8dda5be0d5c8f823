//! Exact arithmetic in the Eisenstein integers `Z[ζ₃]`.
//!
//! Every character value, Bessel value, matrix entry and inner product in this
//! crate lives in `Z[ζ₃]`, optionally divided by a positive integer. Values are
//! stored in the basis `{1, ζ₃}` with `ζ₃² = -1 - ζ₃`, so equality is
//! structural and no rounding ever happens.
//!
//! All arithmetic is checked: an `i128` overflow panics with a message naming
//! the operation instead of wrapping. The `checked_*` methods expose the same
//! operations as `Option` for callers that want to recover.

use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

/// The value `a + b·ζ₃` with `ζ₃ = exp(2πi/3)`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Cyclo {
    pub a: i128,
    pub b: i128,
}

impl Cyclo {
    pub const ZERO: Cyclo = Cyclo { a: 0, b: 0 };
    pub const ONE: Cyclo = Cyclo { a: 1, b: 0 };
    pub const ZETA3: Cyclo = Cyclo { a: 0, b: 1 };

    pub const fn new(a: i128, b: i128) -> Self {
        Cyclo { a, b }
    }

    pub const fn int(a: i128) -> Self {
        Cyclo { a, b: 0 }
    }

    pub fn is_zero(&self) -> bool {
        self.a == 0 && self.b == 0
    }

    /// `ζ₆^k` where `ζ₆ = exp(2πi/6) = 1 + ζ₃`.
    pub fn root6(k: u64) -> Self {
        // ζ₆^0..5 = 1, 1+ζ₃, ζ₃, -1, -1-ζ₃, -ζ₃
        match k % 6 {
            0 => Cyclo::new(1, 0),
            1 => Cyclo::new(1, 1),
            2 => Cyclo::new(0, 1),
            3 => Cyclo::new(-1, 0),
            4 => Cyclo::new(-1, -1),
            _ => Cyclo::new(0, -1),
        }
    }

    /// `ζ₃^k`.
    pub fn zeta3_pow(k: u64) -> Self {
        Cyclo::root6(2 * (k % 3))
    }

    /// Complex conjugate: `conj(a + bζ₃) = (a - b) - bζ₃`.
    pub fn conj(self) -> Self {
        Cyclo::new(self.a.checked_sub(self.b).expect("cyclotomic overflow in conj"), -self.b)
    }

    /// `|a + bζ₃|² = a² - ab + b²`.
    pub fn mag_sq(self) -> i128 {
        self.checked_mag_sq().expect("cyclotomic overflow in mag_sq")
    }

    pub fn checked_mag_sq(self) -> Option<i128> {
        let aa = self.a.checked_mul(self.a)?;
        let ab = self.a.checked_mul(self.b)?;
        let bb = self.b.checked_mul(self.b)?;
        aa.checked_sub(ab)?.checked_add(bb)
    }

    pub fn checked_add(self, rhs: Cyclo) -> Option<Cyclo> {
        Some(Cyclo::new(self.a.checked_add(rhs.a)?, self.b.checked_add(rhs.b)?))
    }

    pub fn checked_sub(self, rhs: Cyclo) -> Option<Cyclo> {
        Some(Cyclo::new(self.a.checked_sub(rhs.a)?, self.b.checked_sub(rhs.b)?))
    }

    pub fn checked_mul(self, rhs: Cyclo) -> Option<Cyclo> {
        // (a + bω)(c + dω) = (ac - bd) + (ad + bc - bd)ω
        let ac = self.a.checked_mul(rhs.a)?;
        let bd = self.b.checked_mul(rhs.b)?;
        let ad = self.a.checked_mul(rhs.b)?;
        let bc = self.b.checked_mul(rhs.a)?;
        Some(Cyclo::new(ac.checked_sub(bd)?, ad.checked_add(bc)?.checked_sub(bd)?))
    }

    pub fn scale(self, k: i128) -> Cyclo {
        Cyclo::new(
            self.a.checked_mul(k).expect("cyclotomic overflow in scale"),
            self.b.checked_mul(k).expect("cyclotomic overflow in scale"),
        )
    }

    pub fn pow(self, mut e: u32) -> Cyclo {
        let mut base = self;
        let mut acc = Cyclo::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            e >>= 1;
        }
        acc
    }

    /// The value as an ordinary integer, if its `ζ₃` coordinate vanishes.
    pub fn as_integer(self) -> Option<i128> {
        (self.b == 0).then_some(self.a)
    }

    /// Whether the complex number is real (`a + bζ₃` is real iff `b = 0`).
    pub fn is_real(self) -> bool {
        self.b == 0
    }

    /// Unique associate `u·self` (with `u` a sixth root of unity) lying in
    /// the sector `0 <= arg < π/3`, i.e. with `b >= 0` and `a > b`.
    /// Returns the associate together with the unit exponent `k` (`u = ζ₆^k`).
    pub fn sector_normalize(self) -> (Cyclo, u64) {
        if self.is_zero() {
            return (self, 0);
        }
        for k in 0..6 {
            let c = Cyclo::root6(k) * self;
            if c.b >= 0 && c.a > c.b {
                return (c, k);
            }
        }
        unreachable!("every nonzero Eisenstein integer has an associate in the fundamental sector")
    }

    /// Floating-point value, for display only.
    pub fn to_f64_pair(self) -> (f64, f64) {
        let (a, b) = (self.a as f64, self.b as f64);
        (a - b / 2.0, b * 3f64.sqrt() / 2.0)
    }
}

impl Add for Cyclo {
    type Output = Cyclo;
    fn add(self, rhs: Cyclo) -> Cyclo {
        self.checked_add(rhs).expect("cyclotomic overflow in add")
    }
}

impl AddAssign for Cyclo {
    fn add_assign(&mut self, rhs: Cyclo) {
        *self = *self + rhs;
    }
}

impl Sub for Cyclo {
    type Output = Cyclo;
    fn sub(self, rhs: Cyclo) -> Cyclo {
        self.checked_sub(rhs).expect("cyclotomic overflow in sub")
    }
}

impl Mul for Cyclo {
    type Output = Cyclo;
    fn mul(self, rhs: Cyclo) -> Cyclo {
        self.checked_mul(rhs).expect("cyclotomic overflow in mul")
    }
}

impl Neg for Cyclo {
    type Output = Cyclo;
    fn neg(self) -> Cyclo {
        Cyclo::new(-self.a, -self.b)
    }
}

impl Sum for Cyclo {
    fn sum<I: Iterator<Item = Cyclo>>(iter: I) -> Cyclo {
        iter.fold(Cyclo::ZERO, |acc, x| acc + x)
    }
}

impl fmt::Display for Cyclo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.a, self.b) {
            (a, 0) => write!(f, "{a}"),
            (0, b) => write!(f, "{b}ζ₃"),
            (a, b) if b < 0 => write!(f, "{a}-{}ζ₃", -b),
            (a, b) => write!(f, "{a}+{b}ζ₃"),
        }
    }
}

/// `value / den` with `den > 0`. Equality is by cross-multiplication, so
/// `(2)/4 == (1)/2` without any normalization.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct ScaledCyclo {
    #[serde(flatten)]
    pub value: Cyclo,
    pub den: i128,
}

impl ScaledCyclo {
    pub fn new(value: Cyclo, den: i128) -> Self {
        assert!(den > 0, "ScaledCyclo denominator must be positive, got {den}");
        ScaledCyclo { value, den }
    }

    pub fn mag_sq(&self) -> Ratio<i128> {
        Ratio::new(self.value.mag_sq(), self.den * self.den)
    }
}

impl PartialEq for ScaledCyclo {
    fn eq(&self, other: &Self) -> bool {
        self.value.scale(other.den) == other.value.scale(self.den)
    }
}

impl Eq for ScaledCyclo {}

impl fmt::Display for ScaledCyclo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})/{}", self.value, self.den)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const Z: Cyclo = Cyclo::ZETA3;

    #[test]
    fn cube_root_of_unity() {
        assert_eq!(Z * Z * Z, Cyclo::ONE);
        assert_eq!(Cyclo::ONE + Z + Z * Z, Cyclo::ZERO);
        assert_eq!(Z.conj(), Cyclo::new(-1, -1));
    }

    #[test]
    fn magnitudes() {
        assert_eq!(Cyclo::ONE.mag_sq(), 1);
        assert_eq!(Z.mag_sq(), 1);
        assert_eq!((Cyclo::ONE - Z).mag_sq(), 3);
        for k in 0..6 {
            assert_eq!(Cyclo::root6(k).mag_sq(), 1);
        }
        // ζ₆ is a primitive sixth root
        assert_eq!(Cyclo::root6(1).pow(6), Cyclo::ONE);
        assert_ne!(Cyclo::root6(1).pow(3), Cyclo::ONE);
        assert_eq!(Cyclo::root6(1).pow(3), -Cyclo::ONE);
    }

    #[test]
    fn scaled_equality_by_cross_multiplication() {
        let x = ScaledCyclo::new(Cyclo::int(2), 4);
        let y = ScaledCyclo::new(Cyclo::int(1), 2);
        assert_eq!(x, y);
        assert_eq!(x, x);
        let w = ScaledCyclo::new(Cyclo::ONE - Z, 3);
        assert_eq!(w.mag_sq(), Ratio::new(3, 9));
    }

    #[test]
    fn overflow_is_detected() {
        let big = Cyclo::int(i128::MAX / 2 + 1);
        assert!(big.checked_mul(big).is_none());
        assert!(big.checked_add(big).is_none());
        let r = std::panic::catch_unwind(|| big * big);
        assert!(r.is_err());
    }

    #[test]
    fn sector_normalization_is_unique() {
        for a in -6..=6 {
            for b in -6..=6 {
                let c = Cyclo::new(a, b);
                if c.is_zero() {
                    continue;
                }
                let (n, _) = c.sector_normalize();
                for k in 0..6 {
                    assert_eq!((Cyclo::root6(k) * c).sector_normalize().0, n);
                }
            }
        }
        assert_eq!(Cyclo::int(-5).sector_normalize().0, Cyclo::int(5));
    }

    fn small() -> impl Strategy<Value = Cyclo> {
        (-10_000i128..10_000, -10_000i128..10_000).prop_map(|(a, b)| Cyclo::new(a, b))
    }

    proptest! {
        #[test]
        fn mag_sq_is_multiplicative(x in small(), y in small()) {
            prop_assert_eq!((x * y).mag_sq(), x.mag_sq() * y.mag_sq());
        }

        #[test]
        fn mag_sq_is_norm(x in small()) {
            let n = x * x.conj();
            prop_assert_eq!(n.b, 0);
            prop_assert_eq!(n.a, x.mag_sq());
            prop_assert!(x.mag_sq() >= 0);
        }

        #[test]
        fn ring_axioms(x in small(), y in small(), z in small()) {
            prop_assert_eq!(x * y, y * x);
            prop_assert_eq!((x * y) * z, x * (y * z));
            prop_assert_eq!(x * (y + z), x * y + x * z);
            prop_assert_eq!((x * y).conj(), x.conj() * y.conj());
        }
    }
}
