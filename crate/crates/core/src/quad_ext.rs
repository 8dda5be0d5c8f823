//! The quadratic extension `L = F_q(ρ)` with its conjugation, relative norm
//! and trace, norm circles `C_d`, and the cyclic unit circle `C = C_1`.
//!
//! For odd `q` the extension is `F_q[ρ]/(ρ² - s)` with `s` a nonsquare; for even
//! `q` it is `F_q[ρ]/(ρ² + ρ + s)` with `Tr(s) = 1`. Elements of `L` are pairs
//! `x + yρ`, enumerated with `x` varying fastest.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf::{Field, FieldElement};

/// `x + yρ ∈ L`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ExtElement {
    pub x: FieldElement,
    pub y: FieldElement,
}

impl ExtElement {
    pub const ZERO: ExtElement = ExtElement { x: FieldElement::ZERO, y: FieldElement::ZERO };
    pub const ONE: ExtElement = ExtElement { x: FieldElement::ONE, y: FieldElement::ZERO };

    pub fn new(x: FieldElement, y: FieldElement) -> Self {
        ExtElement { x, y }
    }

    pub fn from_base(x: FieldElement) -> Self {
        ExtElement { x, y: FieldElement::ZERO }
    }

    pub fn is_zero(self) -> bool {
        self.x.is_zero() && self.y.is_zero()
    }

    pub fn in_base(self) -> bool {
        self.y.is_zero()
    }
}

/// Wire form of an [`ExtElement`]: both coordinates as coefficient vectors.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtElementJson {
    pub x: Vec<u32>,
    pub y: Vec<u32>,
}

/// How to pick one representative `x_d ∈ C_d` per circle.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Hash)]
#[serde(rename_all = "lowercase")]
pub enum RepStrategy {
    /// `x_d = √d = d^(q/2)` (even `q` only).
    Sqrt,
    /// The first element of `C_d` in enumeration order.
    First,
}

impl RepStrategy {
    pub fn default_for(q_even: bool) -> Self {
        if q_even {
            RepStrategy::Sqrt
        } else {
            RepStrategy::First
        }
    }
}

/// A choice of `x_d ∈ C_d` for every `d ∈ F_q^*`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CircleRepSystem {
    pub strategy: RepStrategy,
    // indexed by d; slot 0 unused
    reps: Vec<ExtElement>,
}

impl CircleRepSystem {
    pub fn get(&self, d: FieldElement) -> ExtElement {
        assert!(!d.is_zero(), "C_0 has no representative");
        self.reps[d.index()]
    }

    /// Build from explicit representatives, indexed by `d`. Checks `N(x_d) = d`.
    pub fn from_reps(ext: &QuadExt, strategy: RepStrategy, reps: Vec<ExtElement>) -> Result<Self> {
        if reps.len() != ext.base().order() as usize {
            return Err(Error::Domain("need one representative per element of F_q".into()));
        }
        for d in ext.base().nonzero() {
            if ext.norm(reps[d.index()]) != d {
                return Err(Error::Domain(format!("representative for d={} has the wrong norm", d.0)));
            }
        }
        Ok(CircleRepSystem { strategy, reps })
    }
}

/// The quadratic extension of a base field, together with the unit circle.
#[derive(Debug)]
pub struct QuadExt {
    base: Field,
    s: FieldElement,
    // C listed as powers t₀^0, t₀^1, ..., t₀^q
    circle: Vec<ExtElement>,
    // log_{t₀} on C, indexed by ext index; u32::MAX off the circle
    circle_log: Vec<u32>,
}

impl QuadExt {
    pub fn new(base: Field) -> Result<QuadExt> {
        let s = if base.is_even() {
            base.nonzero().find(|&s| base.abs_trace(s) == 1)
        } else {
            base.nonzero().find(|&s| !base.is_square(s))
        }
        .expect("a defining parameter always exists");

        let mut ext = QuadExt { base, s, circle: Vec::new(), circle_log: Vec::new() };
        let q = ext.base.order() as u64;
        let factors = prime_factors(q + 1);
        let t0 = ext
            .elements()
            .filter(|&t| ext.norm(t) == FieldElement::ONE)
            .find(|&t| factors.iter().all(|&r| ext.pow(t, (q + 1) / r) != ExtElement::ONE))
            .expect("the unit circle is cyclic");

        let mut circle = Vec::with_capacity(q as usize + 1);
        let mut log = vec![u32::MAX; (q * q) as usize];
        let mut cur = ExtElement::ONE;
        for k in 0..=q as u32 {
            circle.push(cur);
            log[ext.index(cur)] = k;
            cur = ext.mul(cur, t0);
        }
        if cur != ExtElement::ONE {
            return Err(Error::Invariant("circle generator has the wrong order".into()));
        }
        ext.circle = circle;
        ext.circle_log = log;
        Ok(ext)
    }

    pub fn base(&self) -> &Field {
        &self.base
    }

    /// The parameter `s` of the defining polynomial.
    pub fn s(&self) -> FieldElement {
        self.s
    }

    /// `q²`.
    pub fn order(&self) -> u32 {
        self.base.order() * self.base.order()
    }

    pub fn index(&self, z: ExtElement) -> usize {
        z.x.index() + self.base.order() as usize * z.y.index()
    }

    pub fn from_index(&self, i: usize) -> ExtElement {
        let q = self.base.order() as usize;
        ExtElement::new(FieldElement((i % q) as u32), FieldElement((i / q) as u32))
    }

    pub fn elements(&self) -> impl Iterator<Item = ExtElement> + '_ {
        (0..self.order() as usize).map(|i| self.from_index(i))
    }

    pub fn to_json(&self, z: ExtElement) -> ExtElementJson {
        ExtElementJson { x: self.base.coeffs(z.x), y: self.base.coeffs(z.y) }
    }

    pub fn from_json(&self, j: &ExtElementJson) -> Result<ExtElement> {
        Ok(ExtElement::new(self.base.from_coeffs(&j.x)?, self.base.from_coeffs(&j.y)?))
    }

    pub fn add(&self, u: ExtElement, v: ExtElement) -> ExtElement {
        let f = &self.base;
        ExtElement::new(f.add(u.x, v.x), f.add(u.y, v.y))
    }

    pub fn neg(&self, u: ExtElement) -> ExtElement {
        ExtElement::new(self.base.neg(u.x), self.base.neg(u.y))
    }

    pub fn sub(&self, u: ExtElement, v: ExtElement) -> ExtElement {
        self.add(u, self.neg(v))
    }

    pub fn mul(&self, u: ExtElement, v: ExtElement) -> ExtElement {
        let f = &self.base;
        // ρ² = s (odd) or ρ² = ρ + s (even)
        let yy = f.mul(u.y, v.y);
        let x = f.add(f.mul(u.x, v.x), f.mul(self.s, yy));
        let mut y = f.add(f.mul(u.x, v.y), f.mul(u.y, v.x));
        if f.is_even() {
            y = f.add(y, yy);
        }
        ExtElement::new(x, y)
    }

    pub fn scale(&self, c: FieldElement, u: ExtElement) -> ExtElement {
        ExtElement::new(self.base.mul(c, u.x), self.base.mul(c, u.y))
    }

    pub fn pow(&self, u: ExtElement, mut e: u64) -> ExtElement {
        let (mut acc, mut base) = (ExtElement::ONE, u);
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    pub fn inv(&self, u: ExtElement) -> Result<ExtElement> {
        let n = self.norm(u);
        let n_inv = self.base.inv(n).map_err(|_| Error::Domain("inverse of zero in L".into()))?;
        Ok(self.scale(n_inv, self.sigma(u)))
    }

    pub fn div(&self, u: ExtElement, v: ExtElement) -> Result<ExtElement> {
        Ok(self.mul(u, self.inv(v)?))
    }

    /// The nontrivial automorphism of `L/F_q`.
    pub fn sigma(&self, u: ExtElement) -> ExtElement {
        let f = &self.base;
        if f.is_even() {
            ExtElement::new(f.add(u.x, u.y), u.y)
        } else {
            ExtElement::new(u.x, f.neg(u.y))
        }
    }

    /// Relative norm `N(z) = z σ(z)`.
    pub fn norm(&self, u: ExtElement) -> FieldElement {
        let f = &self.base;
        let xx = f.mul(u.x, u.x);
        let syy = f.mul(self.s, f.mul(u.y, u.y));
        if f.is_even() {
            f.add(f.add(xx, f.mul(u.x, u.y)), syy)
        } else {
            f.sub(xx, syy)
        }
    }

    /// Relative trace `S(z) = z + σ(z)`.
    pub fn rel_trace(&self, u: ExtElement) -> FieldElement {
        let f = &self.base;
        if f.is_even() {
            u.y
        } else {
            f.add(u.x, u.x)
        }
    }

    /// `C_d = {t : N(t) = d}` in enumeration order.
    pub fn circle(&self, d: FieldElement) -> Result<Vec<ExtElement>> {
        if d.is_zero() {
            return Err(Error::Domain("the circle C_0 is not defined".into()));
        }
        Ok(self.elements().filter(|&t| self.norm(t) == d).collect())
    }

    /// The unit circle `C` in enumeration order.
    pub fn unit_circle(&self) -> Vec<ExtElement> {
        let mut c = self.circle.clone();
        c.sort_by_key(|&t| self.index(t));
        c
    }

    /// `C` as the powers `t₀^0, ..., t₀^q` of its generator.
    pub fn circle_powers(&self) -> &[ExtElement] {
        &self.circle
    }

    /// The first element of `C` in enumeration order of order `q + 1`.
    pub fn circle_generator(&self) -> ExtElement {
        self.circle[1.min(self.circle.len() - 1)]
    }

    /// `log_{t₀}(t)` for `t ∈ C`, `None` off the circle.
    pub fn circle_log(&self, t: ExtElement) -> Option<u32> {
        match self.circle_log[self.index(t)] {
            u32::MAX => None,
            k => Some(k),
        }
    }

    pub fn representatives(&self, strategy: RepStrategy) -> Result<CircleRepSystem> {
        let f = &self.base;
        let mut reps = vec![ExtElement::ZERO; f.order() as usize];
        match strategy {
            RepStrategy::Sqrt => {
                for d in f.nonzero() {
                    reps[d.index()] = ExtElement::from_base(f.sqrt_even(d)?);
                }
            }
            RepStrategy::First => {
                let mut found = 0;
                for z in self.elements().skip(1) {
                    let d = self.norm(z);
                    if reps[d.index()].is_zero() {
                        reps[d.index()] = z;
                        found += 1;
                        if found == f.order() - 1 {
                            break;
                        }
                    }
                }
            }
        }
        CircleRepSystem::from_reps(self, strategy, reps)
    }
}

fn prime_factors(mut m: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= m {
        if m % d == 0 {
            out.push(d);
            while m % d == 0 {
                m /= d;
            }
        }
        d += 1;
    }
    if m > 1 {
        out.push(m);
    }
    out
}
