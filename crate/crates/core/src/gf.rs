//! Finite fields `F_q = F_p[x]/(f)` with dense log/exp tables.
//!
//! Elements are identified with their coefficient vectors in the basis
//! `1, x, ..., x^(n-1)`, packed into an integer index `Σ c_i p^i`. Iterating
//! indices `0..q` therefore enumerates coefficient vectors with the
//! low-degree coordinate varying fastest, which is the enumeration order all
//! deterministic choices (generators, representatives) are made in.
//!
//! The field is immutable after construction and safe to share across threads.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest field order accepted by default. Every table is dense.
pub const DEFAULT_MAX_ORDER: u32 = 1 << 13;

/// Fields at most this large get a full addition table in odd characteristic.
const ADD_TABLE_MAX_ORDER: u32 = 729;

/// Parameters of `F_q`: characteristic `p`, degree `n` and the monic
/// irreducible modulus `f`, coefficients listed constant term first
/// (`f.len() == n + 1`, `f[n] == 1`).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldSpec {
    pub p: u32,
    pub n: u32,
    pub f: Vec<u32>,
}

impl FieldSpec {
    pub fn order(&self) -> u32 {
        self.p.pow(self.n)
    }
}

/// An element of some `F_q`, addressed by its packed coefficient index.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FieldElement(pub u32);

impl FieldElement {
    pub const ZERO: FieldElement = FieldElement(0);
    pub const ONE: FieldElement = FieldElement(1);

    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

pub fn is_prime(p: u32) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

fn prime_factors(mut m: u32) -> Vec<u32> {
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

// Dense polynomials over F_p, constant term first, no trailing zeros.

fn poly_trim(mut a: Vec<u32>) -> Vec<u32> {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

fn poly_rem(a: &[u32], m: &[u32], p: u32) -> Vec<u32> {
    let mut r = a.to_vec();
    let dm = m.len() - 1;
    let lead_inv = inv_mod(m[dm], p);
    while r.len() > dm {
        let top = r.len() - 1;
        let coef = r[top] * lead_inv % p;
        if coef != 0 {
            let shift = top - dm;
            for (i, &mc) in m.iter().enumerate() {
                r[shift + i] = (r[shift + i] + p - coef * mc % p) % p;
            }
        }
        r.pop();
        r = poly_trim(r);
    }
    poly_trim(r)
}

fn inv_mod(a: u32, p: u32) -> u32 {
    let mut acc = 1u64;
    let (mut base, mut e) = (a as u64 % p as u64, p as u64 - 2);
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % p as u64;
        }
        base = base * base % p as u64;
        e >>= 1;
    }
    acc as u32
}

fn digits(mut idx: u32, p: u32, n: u32) -> Vec<u32> {
    (0..n)
        .map(|_| {
            let d = idx % p;
            idx /= p;
            d
        })
        .collect()
}

/// Whether the monic polynomial `f` (constant term first) is irreducible over
/// `F_p`, by trial division against every monic polynomial of degree
/// `1..=deg/2`.
pub fn is_irreducible(f: &[u32], p: u32) -> bool {
    let f = poly_trim(f.to_vec());
    let n = f.len().saturating_sub(1) as u32;
    if n == 0 {
        return false;
    }
    for d in 1..=n / 2 {
        for low in 0..p.pow(d) {
            let mut g = digits(low, p, d);
            g.push(1);
            if poly_rem(&f, &g, p).is_empty() {
                return false;
            }
        }
    }
    true
}

/// The monic irreducible polynomial of degree `n` over `F_p` whose lower
/// coefficients `(c_0, ..., c_{n-1})` have the smallest packed index
/// `Σ c_i p^i`. For `n = 1` this is `x` itself.
pub fn find_irreducible(p: u32, n: u32) -> Result<Vec<u32>> {
    if !is_prime(p) {
        return Err(Error::Unsupported(format!("{p} is not prime")));
    }
    if n == 0 {
        return Err(Error::Unsupported("extension degree must be at least 1".into()));
    }
    for low in 0..p.pow(n) {
        let mut f = digits(low, p, n);
        f.push(1);
        if is_irreducible(&f, p) {
            return Ok(f);
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

/// The field `F_q` with precomputed log/exp/trace tables.
#[derive(Debug)]
pub struct Field {
    spec: FieldSpec,
    q: u32,
    pows: Vec<u32>,
    add_table: Option<Vec<u32>>,
    neg: Vec<u32>,
    exp: Vec<u32>,
    log: Vec<u32>,
    trace: Vec<u32>,
}

impl Field {
    /// `F_{p^n}` using [`find_irreducible`] for the modulus.
    pub fn new(p: u32, n: u32) -> Result<Field> {
        let f = find_irreducible(p, n)?;
        Field::from_spec(FieldSpec { p, n, f })
    }

    pub fn from_spec(spec: FieldSpec) -> Result<Field> {
        Field::from_spec_capped(spec, DEFAULT_MAX_ORDER)
    }

    pub fn from_spec_capped(spec: FieldSpec, max_order: u32) -> Result<Field> {
        let FieldSpec { p, n, ref f } = spec;
        if !is_prime(p) {
            return Err(Error::Unsupported(format!("{p} is not prime")));
        }
        if n == 0 || f.len() != n as usize + 1 || f[n as usize] != 1 || f.iter().any(|&c| c >= p) {
            return Err(Error::Unsupported(format!("modulus {f:?} is not a monic degree-{n} polynomial mod {p}")));
        }
        let q = p
            .checked_pow(n)
            .filter(|&q| q <= max_order)
            .ok_or_else(|| Error::Unsupported(format!("field order {p}^{n} exceeds the cap {max_order}")))?;
        if !is_irreducible(f, p) {
            return Err(Error::Unsupported(format!("modulus {f:?} is reducible over F_{p}")));
        }

        let pows: Vec<u32> = (0..n).map(|i| p.pow(i)).collect();
        let neg: Vec<u32> = (0..q)
            .map(|x| {
                digits(x, p, n)
                    .iter()
                    .zip(&pows)
                    .map(|(&d, &w)| ((p - d) % p) * w)
                    .sum()
            })
            .collect();
        let add_table = (p != 2 && q <= ADD_TABLE_MAX_ORDER).then(|| {
            let mut t = vec![0u32; (q * q) as usize];
            for x in 0..q {
                for y in 0..q {
                    t[(x * q + y) as usize] = add_digits(x, y, p, n, &pows);
                }
            }
            t
        });

        // Multiplication by polynomial arithmetic, used only to seed the tables.
        let slow_mul = |x: u32, y: u32| -> u32 {
            let (dx, dy) = (digits(x, p, n), digits(y, p, n));
            let mut prod = vec![0u32; 2 * n as usize];
            for (i, &a) in dx.iter().enumerate() {
                for (j, &b) in dy.iter().enumerate() {
                    prod[i + j] = (prod[i + j] + a * b) % p;
                }
            }
            let r = poly_rem(&poly_trim(prod), f, p);
            r.iter().zip(&pows).map(|(&c, &w)| c * w).sum()
        };
        let slow_pow = |x: u32, mut e: u32| -> u32 {
            let (mut acc, mut base) = (1u32, x);
            while e > 0 {
                if e & 1 == 1 {
                    acc = slow_mul(acc, base);
                }
                base = slow_mul(base, base);
                e >>= 1;
            }
            acc
        };

        let order = q - 1;
        let factors = prime_factors(order);
        let generator = (1..q)
            .find(|&g| factors.iter().all(|&r| slow_pow(g, order / r) != 1))
            .expect("F_q^* is cyclic");

        let mut exp = Vec::with_capacity(order as usize);
        let mut log = vec![u32::MAX; q as usize];
        let mut cur = 1u32;
        for k in 0..order {
            exp.push(cur);
            log[cur as usize] = k;
            cur = slow_mul(cur, generator);
        }
        debug_assert_eq!(cur, 1);

        let mut field = Field { spec: spec.clone(), q, pows, add_table, neg, exp, log, trace: Vec::new() };
        let trace = (0..q)
            .map(|x| {
                let mut acc = FieldElement::ZERO;
                let mut cur = FieldElement(x);
                for _ in 0..n {
                    acc = field.add(acc, cur);
                    cur = field.pow(cur, p as u64);
                }
                assert!(acc.0 < p, "trace must land in the prime field");
                acc.0
            })
            .collect();
        field.trace = trace;
        Ok(field)
    }

    pub fn spec(&self) -> &FieldSpec {
        &self.spec
    }

    /// The field order `q`.
    pub fn order(&self) -> u32 {
        self.q
    }

    pub fn characteristic(&self) -> u32 {
        self.spec.p
    }

    pub fn degree(&self) -> u32 {
        self.spec.n
    }

    pub fn is_even(&self) -> bool {
        self.spec.p == 2
    }

    pub fn elements(&self) -> impl Iterator<Item = FieldElement> + '_ {
        (0..self.q).map(FieldElement)
    }

    pub fn nonzero(&self) -> impl Iterator<Item = FieldElement> + '_ {
        (1..self.q).map(FieldElement)
    }

    pub fn element(&self, index: u32) -> FieldElement {
        assert!(index < self.q, "element index {index} out of range for F_{}", self.q);
        FieldElement(index)
    }

    pub fn from_coeffs(&self, coeffs: &[u32]) -> Result<FieldElement> {
        if coeffs.len() != self.spec.n as usize || coeffs.iter().any(|&c| c >= self.spec.p) {
            return Err(Error::Format(format!("{coeffs:?} is not a coefficient vector of F_{}", self.q)));
        }
        Ok(FieldElement(coeffs.iter().zip(&self.pows).map(|(&c, &w)| c * w).sum()))
    }

    pub fn coeffs(&self, x: FieldElement) -> Vec<u32> {
        digits(x.0, self.spec.p, self.spec.n)
    }

    /// The image of the integer `k` in the prime subfield.
    pub fn from_int(&self, k: i64) -> FieldElement {
        FieldElement(k.rem_euclid(self.spec.p as i64) as u32)
    }

    pub fn add(&self, x: FieldElement, y: FieldElement) -> FieldElement {
        if self.spec.p == 2 {
            return FieldElement(x.0 ^ y.0);
        }
        match &self.add_table {
            Some(t) => FieldElement(t[(x.0 * self.q + y.0) as usize]),
            None => FieldElement(add_digits(x.0, y.0, self.spec.p, self.spec.n, &self.pows)),
        }
    }

    pub fn neg(&self, x: FieldElement) -> FieldElement {
        FieldElement(self.neg[x.index()])
    }

    pub fn sub(&self, x: FieldElement, y: FieldElement) -> FieldElement {
        self.add(x, self.neg(y))
    }

    pub fn mul(&self, x: FieldElement, y: FieldElement) -> FieldElement {
        if x.is_zero() || y.is_zero() {
            return FieldElement::ZERO;
        }
        let k = (self.log[x.index()] as u64 + self.log[y.index()] as u64) % (self.q as u64 - 1);
        FieldElement(self.exp[k as usize])
    }

    pub fn inv(&self, x: FieldElement) -> Result<FieldElement> {
        if x.is_zero() {
            return Err(Error::Domain("inverse of zero".into()));
        }
        let order = self.q - 1;
        Ok(FieldElement(self.exp[((order - self.log[x.index()]) % order) as usize]))
    }

    pub fn div(&self, x: FieldElement, y: FieldElement) -> Result<FieldElement> {
        Ok(self.mul(x, self.inv(y)?))
    }

    pub fn pow(&self, x: FieldElement, e: u64) -> FieldElement {
        if e == 0 {
            return FieldElement::ONE;
        }
        if x.is_zero() {
            return FieldElement::ZERO;
        }
        let k = self.log[x.index()] as u64 * (e % (self.q as u64 - 1)) % (self.q as u64 - 1);
        FieldElement(self.exp[k as usize])
    }

    /// Absolute trace `Tr(x) = x + x^p + ... + x^(p^(n-1))`, as an element of `0..p`.
    pub fn abs_trace(&self, x: FieldElement) -> u32 {
        self.trace[x.index()]
    }

    /// The first element in enumeration order with multiplicative order `q - 1`.
    pub fn generator(&self) -> FieldElement {
        FieldElement(self.exp[if self.q == 2 { 0 } else { 1 }])
    }

    /// `log_ξ(x)` for the fixed [`generator`](Self::generator) `ξ`.
    pub fn log(&self, x: FieldElement) -> Result<u32> {
        if x.is_zero() {
            return Err(Error::Domain("discrete logarithm of zero".into()));
        }
        Ok(self.log[x.index()])
    }

    /// `ξ^k` for the fixed generator.
    pub fn exp(&self, k: i64) -> FieldElement {
        FieldElement(self.exp[k.rem_euclid(self.q as i64 - 1) as usize])
    }

    /// The unique `k ∈ [0, q-1)` with `g^k = x`, for an arbitrary generator `g`.
    pub fn discrete_log(&self, x: FieldElement, g: FieldElement) -> Result<u32> {
        let lx = self.log(x)? as i64;
        let lg = self.log(g)? as i64;
        let order = self.q as i64 - 1;
        let inv = mod_inverse(lg, order)
            .ok_or_else(|| Error::Domain(format!("element {} is not a generator", g.0)))?;
        Ok((lx * inv).rem_euclid(order) as u32)
    }

    pub fn multiplicative_order(&self, x: FieldElement) -> Result<u32> {
        let l = self.log(x)?;
        let order = self.q - 1;
        Ok(order / num_integer::gcd(l, order))
    }

    /// Whether `x` is a nonzero square. In even characteristic every element is.
    pub fn is_square(&self, x: FieldElement) -> bool {
        !x.is_zero() && (self.is_even() || self.log[x.index()] % 2 == 0)
    }

    /// Split `F_q^*` into quadratic residues and nonresidues (odd `q` only),
    /// each listed in enumeration order.
    pub fn qr_partition(&self) -> Result<(Vec<FieldElement>, Vec<FieldElement>)> {
        if self.is_even() {
            return Err(Error::Unsupported("quadratic residues are undefined in even characteristic".into()));
        }
        Ok(self.nonzero().partition(|&x| self.is_square(x)))
    }

    /// The unique square root in even characteristic, `d^(q/2)`.
    pub fn sqrt_even(&self, d: FieldElement) -> Result<FieldElement> {
        if !self.is_even() {
            return Err(Error::Unsupported("closed-form square root needs even characteristic".into()));
        }
        Ok(self.pow(d, self.q as u64 / 2))
    }

    /// The quadratic character `π₂'(x) = (-1)^log(x)` of `F_q^*` (odd `q`).
    pub fn quadratic_character(&self, x: FieldElement) -> Result<i128> {
        if self.is_even() {
            return Err(Error::Unsupported("no character of order 2 in even characteristic".into()));
        }
        Ok(if self.log(x)? % 2 == 0 { 1 } else { -1 })
    }

    pub fn random<R: rand::Rng + ?Sized>(&self, rng: &mut R) -> FieldElement {
        FieldElement(rng.gen_range(0..self.q))
    }

    pub fn random_nonzero<R: rand::Rng + ?Sized>(&self, rng: &mut R) -> FieldElement {
        FieldElement(rng.gen_range(1..self.q))
    }
}

fn add_digits(x: u32, y: u32, p: u32, n: u32, pows: &[u32]) -> u32 {
    let (dx, dy) = (digits(x, p, n), digits(y, p, n));
    dx.iter().zip(&dy).zip(pows).map(|((&a, &b), &w)| ((a + b) % p) * w).sum()
}

fn mod_inverse(a: i64, m: i64) -> Option<i64> {
    let e = num_integer::Integer::extended_gcd(&a.rem_euclid(m), &m);
    (e.gcd == 1).then(|| e.x.rem_euclid(m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Roots of a cubic mod p by direct evaluation: a cubic is irreducible iff
    /// it has no root.
    fn cubic_has_root(f: &[u32], p: u32) -> bool {
        (0..p).any(|x| f.iter().rev().fold(0, |acc, &c| (acc * x + c) % p) == 0)
    }

    #[test]
    fn smallest_irreducibles() {
        assert_eq!(find_irreducible(2, 1).unwrap(), vec![0, 1]);
        assert_eq!(find_irreducible(2, 3).unwrap(), vec![1, 1, 0, 1]);
        assert_eq!(find_irreducible(3, 2).unwrap(), vec![1, 0, 1]);

        // exhaustive oracle over the 8 monic cubics mod 2
        let irreducible: Vec<u32> = (0..8u32)
            .filter(|&low| {
                let mut f = digits(low, 2, 3);
                f.push(1);
                !cubic_has_root(&f, 2)
            })
            .collect();
        assert_eq!(irreducible, vec![3, 5]); // x³+x+1, x³+x²+1
        assert!(find_irreducible(4, 2).is_err());
    }

    #[test]
    fn f8_arithmetic() {
        let f = Field::new(2, 3).unwrap();
        let x = f.from_coeffs(&[0, 1, 0]).unwrap();
        let x2 = f.from_coeffs(&[0, 0, 1]).unwrap();
        assert_eq!(f.mul(x, x2), f.from_coeffs(&[1, 1, 0]).unwrap());
        assert_eq!(f.add(x, FieldElement::ZERO), x);
        for a in f.nonzero() {
            assert_eq!(f.mul(a, f.inv(a).unwrap()), FieldElement::ONE);
        }
        assert!(f.inv(FieldElement::ZERO).is_err());
        assert_eq!(f.generator(), x);
        assert_eq!(f.discrete_log(f.from_coeffs(&[1, 1, 0]).unwrap(), x).unwrap(), 3);
        assert_eq!(f.discrete_log(FieldElement::ONE, x).unwrap(), 0);
        assert_eq!(f.discrete_log(x, x).unwrap(), 1);
        assert!(f.discrete_log(FieldElement::ZERO, x).is_err());
    }

    #[test]
    fn traces() {
        let f = Field::new(2, 3).unwrap();
        assert_eq!(f.abs_trace(FieldElement::ZERO), 0);
        assert_eq!(f.abs_trace(FieldElement::ONE), 1);
        assert_eq!(f.elements().filter(|&x| f.abs_trace(x) == 0).count(), 4);
        for (p, n) in [(2, 5), (3, 2), (3, 3), (5, 2)] {
            let f = Field::new(p, n).unwrap();
            let q = f.order();
            for t in 0..p {
                assert_eq!(f.elements().filter(|&x| f.abs_trace(x) == t).count() as u32, q / p);
            }
        }
    }

    #[test]
    fn generators() {
        let f2 = Field::new(2, 1).unwrap();
        assert_eq!(f2.generator(), FieldElement::ONE);
        let f9 = Field::new(3, 2).unwrap();
        let x = f9.from_coeffs(&[0, 1]).unwrap();
        assert_eq!(f9.multiplicative_order(x).unwrap(), 4);
        assert_eq!(f9.generator(), f9.from_coeffs(&[1, 1]).unwrap());
        for (p, n) in [(2, 3), (2, 7), (3, 3), (3, 4)] {
            let f = Field::new(p, n).unwrap();
            let g = f.generator();
            let q = f.order() as u64;
            assert_eq!(f.pow(g, q - 1), FieldElement::ONE);
            // brute force: no smaller positive power is 1
            let mut cur = FieldElement::ONE;
            for m in 1..q - 1 {
                cur = f.mul(cur, g);
                assert_ne!(cur, FieldElement::ONE, "g^{m} = 1");
            }
            // and it is the first such element in enumeration order
            for y in 1..g.0 {
                assert!(f.multiplicative_order(FieldElement(y)).unwrap() < q as u32 - 1);
            }
        }
    }

    #[test]
    fn quadratic_residues() {
        let f3 = Field::new(3, 1).unwrap();
        let (qr, nqr) = f3.qr_partition().unwrap();
        assert_eq!(qr, vec![FieldElement(1)]);
        assert_eq!(nqr, vec![FieldElement(2)]);
        let f9 = Field::new(3, 2).unwrap();
        let (qr, nqr) = f9.qr_partition().unwrap();
        assert_eq!((qr.len(), nqr.len()), (4, 4));
        // squares by enumeration
        for &r in &qr {
            assert!(f9.elements().any(|y| f9.mul(y, y) == r));
        }
        for &r in &nqr {
            assert!(!f9.elements().any(|y| f9.mul(y, y) == r));
        }
        for &a in &qr {
            for &b in &qr {
                assert!(f9.is_square(f9.mul(a, b)));
            }
        }
        for &a in &nqr {
            for &b in &nqr {
                assert!(f9.is_square(f9.mul(a, b)));
            }
        }
        // Euler's criterion in F_27
        let f27 = Field::new(3, 3).unwrap();
        let two = f27.from_int(2);
        assert_eq!(f27.is_square(two), f27.pow(two, 13) == FieldElement::ONE);
        assert!(Field::new(2, 3).unwrap().qr_partition().is_err());
    }

    #[test]
    fn even_square_roots() {
        let f = Field::new(2, 5).unwrap();
        for d in f.nonzero() {
            let r = f.sqrt_even(d).unwrap();
            assert_eq!(f.mul(r, r), d);
        }
        assert!(Field::new(3, 2).unwrap().sqrt_even(FieldElement::ONE).is_err());
    }

    #[test]
    fn rejects_bad_specs() {
        assert!(Field::new(4, 1).is_err());
        assert!(Field::new(2, 14).is_err());
        let reducible = FieldSpec { p: 2, n: 2, f: vec![1, 0, 1] };
        assert!(Field::from_spec(reducible).is_err());
        let json = serde_json::to_string(Field::new(2, 3).unwrap().spec()).unwrap();
        assert_eq!(json, r#"{"p":2,"n":3,"f":[1,1,0,1]}"#);
    }

    fn exhaustive_axioms(f: &Field) {
        let els: Vec<_> = f.elements().collect();
        for &a in &els {
            for &b in &els {
                assert_eq!(f.add(a, b), f.add(b, a));
                assert_eq!(f.mul(a, b), f.mul(b, a));
                assert_eq!(f.abs_trace(f.add(a, b)), (f.abs_trace(a) + f.abs_trace(b)) % f.characteristic());
                for &c in &els {
                    assert_eq!(f.add(f.add(a, b), c), f.add(a, f.add(b, c)));
                    assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
                    assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
                }
            }
        }
    }

    #[test]
    fn axioms_exhaustive_small_fields() {
        for (p, n) in [(2, 1), (2, 2), (2, 3), (3, 1), (3, 2), (5, 1), (7, 1)] {
            exhaustive_axioms(&Field::new(p, n).unwrap());
        }
    }

    static LARGE: std::sync::LazyLock<[Field; 2]> =
        std::sync::LazyLock::new(|| [Field::new(2, 7).unwrap(), Field::new(3, 7).unwrap()]);

    proptest! {
        #[test]
        fn axioms_random_large_fields(a in 0u32..2187, b in 0u32..2187, c in 0u32..2187) {
            for f in LARGE.iter() {
                let q = f.order();
                let (a, b, c) = (FieldElement(a % q), FieldElement(b % q), FieldElement(c % q));
                prop_assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
                prop_assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
                prop_assert_eq!(f.sub(f.add(a, b), b), a);
            }
        }
    }
}
