//! Additive and multiplicative characters, Bessel functions of `L`, Gauss
//! sums, and exact checks of the classical identities they satisfy.
//!
//! Only characters whose values are sixth roots of unity are evaluated, so
//! every value here is an element of `Z[ζ₃]`. A multiplicative character of a
//! cyclic group with fixed generator `g` is stored as an exponent `e ∈ Z/6`
//! acting by `g^k ↦ ζ₆^(ek)`; it is well defined iff `6 | e·|G|`.

use rayon::prelude::*;
use serde::Serialize;

use crate::cyclotomic::{Cyclo, ScaledCyclo};
use crate::error::{Error, Result};
use crate::gf::{Field, FieldElement};
use crate::quad_ext::{ExtElement, QuadExt};
use crate::report::Check;

/// Nontrivial additive character `x ↦ ζ_p^Tr(x)` of `F_q`, `p ∈ {2, 3}`.
#[derive(Clone, Debug)]
pub struct AdditiveChar {
    values: Vec<Cyclo>,
}

impl AdditiveChar {
    pub fn new(field: &Field) -> Result<Self> {
        let p = field.characteristic();
        let values = match p {
            2 => field.elements().map(|x| if field.abs_trace(x) == 0 { Cyclo::ONE } else { -Cyclo::ONE }).collect(),
            3 => field.elements().map(|x| Cyclo::zeta3_pow(field.abs_trace(x) as u64)).collect(),
            _ => return Err(Error::Unsupported(format!("additive characters are only built for p ∈ {{2, 3}}, got p = {p}"))),
        };
        Ok(AdditiveChar { values })
    }

    pub fn eval(&self, x: FieldElement) -> Cyclo {
        self.values[x.index()]
    }
}

/// `g^k ↦ ζ₆^(e·k)` on a cyclic group with a fixed generator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct CyclicChar {
    e: u8,
}

impl CyclicChar {
    pub const TRIVIAL: CyclicChar = CyclicChar { e: 0 };

    /// The character with exponent `e` on a cyclic group of order `group_order`.
    pub fn new(e: u32, group_order: u64) -> Result<Self> {
        let e = (e % 6) as u8;
        if (e as u64 * group_order) % 6 != 0 {
            return Err(Error::Unsupported(format!(
                "ζ₆^({e}k) is not a character of a cyclic group of order {group_order}"
            )));
        }
        Ok(CyclicChar { e })
    }

    /// Every character of a cyclic group of the given order whose values are
    /// sixth roots of unity, trivial first.
    pub fn admissible(group_order: u64) -> Vec<CyclicChar> {
        (0..6).filter_map(|e| CyclicChar::new(e, group_order).ok()).collect()
    }

    pub fn exponent(self) -> u32 {
        self.e as u32
    }

    pub fn order(self) -> u32 {
        6 / num_integer::gcd(self.e as u32, 6)
    }

    pub fn is_trivial(self) -> bool {
        self.e == 0
    }

    /// Value at `g^k`.
    pub fn at_log(self, k: u64) -> Cyclo {
        Cyclo::root6(self.e as u64 * (k % 6))
    }

    pub fn conj(self) -> Self {
        CyclicChar { e: (6 - self.e) % 6 }
    }

    pub fn mul(self, other: CyclicChar) -> Self {
        CyclicChar { e: (self.e + other.e) % 6 }
    }

    pub fn pow(self, r: i64) -> Self {
        CyclicChar { e: (self.e as i64 * r).rem_euclid(6) as u8 }
    }
}

/// Multiplicative character of `F_q^*` (relative to the field's generator).
/// Evaluates to zero at zero.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct MulChar(pub CyclicChar);

impl MulChar {
    pub fn new(field: &Field, e: u32) -> Result<Self> {
        Ok(MulChar(CyclicChar::new(e, field.order() as u64 - 1)?))
    }

    pub fn admissible(field: &Field) -> Vec<MulChar> {
        CyclicChar::admissible(field.order() as u64 - 1).into_iter().map(MulChar).collect()
    }

    /// The unique character of order 2 (odd `q`), `ξ^k ↦ (-1)^k`.
    pub fn quadratic(field: &Field) -> Result<Self> {
        MulChar::new(field, 3)
    }

    pub fn eval(self, field: &Field, x: FieldElement) -> Cyclo {
        match field.log(x) {
            Ok(k) => self.0.at_log(k as u64),
            Err(_) => Cyclo::ZERO,
        }
    }
}

/// Character of the unit circle `C` (relative to its generator `t₀`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct CircleChar(pub CyclicChar);

impl CircleChar {
    /// The character `t₀^j ↦ ζ_m^j` of order `m ∈ {2, 3}`; requires `m | q + 1`.
    pub fn of_order(ext: &QuadExt, m: u32) -> Result<Self> {
        let q = ext.base().order() as u64;
        if !matches!(m, 2 | 3) || (q + 1) % m as u64 != 0 {
            return Err(Error::Unsupported(format!("no circle character of order {m} realizable for q = {q}")));
        }
        Ok(CircleChar(CyclicChar::new(6 / m, q + 1)?))
    }

    pub fn order(self) -> u32 {
        self.0.order()
    }

    pub fn conj(self) -> Self {
        CircleChar(self.0.conj())
    }

    /// `π(t)`. Panics if `t ∉ C`.
    pub fn eval(self, ext: &QuadExt, t: ExtElement) -> Cyclo {
        let k = ext.circle_log(t).expect("circle character evaluated off the unit circle");
        self.0.at_log(k as u64)
    }

    /// The extension `π_*` of `π` to `L^*` that is constant on the lines
    /// `t·F_q^*` (even `q` only, where `L^* = C × F_q^*`).
    pub fn extend_even(self, ext: &QuadExt, z: ExtElement) -> Result<Cyclo> {
        let f = ext.base();
        let r = f.sqrt_even(ext.norm(z))?;
        let t = ext.scale(f.inv(r)?, z);
        Ok(self.eval(ext, t))
    }
}

/// `q·J_π(z)` for every `z ∈ L`, where
/// `J_π(z) = (1/q) Σ_{t∈C} χ(-S(tz)) π(t)`.
#[derive(Clone, Debug)]
pub struct BesselTable {
    q: i128,
    values: Vec<Cyclo>,
}

#[derive(Serialize)]
struct BesselEntry {
    z: crate::quad_ext::ExtElementJson,
    value: ScaledCyclo,
}

impl BesselTable {
    pub fn build(ext: &QuadExt, chi: &AdditiveChar, pi: CircleChar) -> Result<Self> {
        if pi.0.is_trivial() {
            return Err(Error::Domain("Bessel functions need a nontrivial circle character".into()));
        }
        let f = ext.base();
        let powers = ext.circle_powers();
        let values = (0..ext.order() as usize)
            .into_par_iter()
            .map(|i| {
                let z = ext.from_index(i);
                powers
                    .iter()
                    .enumerate()
                    .map(|(k, &t)| chi.eval(f.neg(ext.rel_trace(ext.mul(t, z)))) * pi.0.at_log(k as u64))
                    .sum()
            })
            .collect();
        Ok(BesselTable { q: f.order() as i128, values })
    }

    /// Numerator `q·J_π(z)`.
    pub fn numer(&self, ext: &QuadExt, z: ExtElement) -> Cyclo {
        self.values[ext.index(z)]
    }

    pub fn numer_base(&self, x: FieldElement) -> Cyclo {
        self.values[x.index()]
    }

    pub fn get(&self, ext: &QuadExt, z: ExtElement) -> ScaledCyclo {
        ScaledCyclo::new(self.numer(ext, z), self.q)
    }

    pub fn q(&self) -> i128 {
        self.q
    }

    /// Audit export: `[{"z": {...}, "value": {"a","b","den"}}, ...]` over `L^*`.
    pub fn to_json(&self, ext: &QuadExt) -> Result<String> {
        let entries: Vec<BesselEntry> = ext
            .elements()
            .skip(1)
            .map(|z| BesselEntry { z: ext.to_json(z), value: self.get(ext, z) })
            .collect();
        Ok(serde_json::to_string(&entries)?)
    }
}

/// `G(χ, ρ) = Σ_{x ∈ F_q^*} χ(x) ρ(x)`.
pub fn gauss_sum(field: &Field, chi: &AdditiveChar, rho: MulChar) -> Cyclo {
    field.nonzero().map(|x| chi.eval(x) * rho.eval(field, x)).sum()
}

/// `Σ_{z ∈ L^*} χ(S(z))·m(z)` for an arbitrary multiplicative weight `m`.
pub fn gauss_sum_over_ext<M>(ext: &QuadExt, chi: &AdditiveChar, mult: M) -> Result<Cyclo>
where
    M: Fn(ExtElement) -> Result<Cyclo>,
{
    let mut acc = Cyclo::ZERO;
    for z in ext.elements().skip(1) {
        acc += chi.eval(ext.rel_trace(z)) * mult(z)?;
    }
    Ok(acc)
}

/// `G(χ∘S, ρ∘N)`: the Gauss sum of `L` with both characters lifted from `F_q`.
pub fn gauss_sum_lifted(ext: &QuadExt, chi: &AdditiveChar, rho: MulChar) -> Cyclo {
    let f = ext.base();
    gauss_sum_over_ext(ext, chi, |z| Ok(rho.eval(f, ext.norm(z)))).expect("lifted characters are total on L^*")
}

fn check_even_q_odd_degree(field: &Field) -> Result<u32> {
    if field.characteristic() != 2 || field.degree() % 2 == 0 {
        return Err(Error::Unsupported(format!("need q = 2^(2k+1), got q = {}", field.order())));
    }
    Ok((field.degree() - 1) / 2)
}

/// `|J_π(x)|` on `F_q^*` in floating point for the circle character
/// `t₀^j ↦ exp(2πi·e·j/(q+1))`, for exponents outside `Z[ζ₃]` (even `q`).
pub fn bessel_magnitudes_f64(ext: &QuadExt, e: u64) -> Result<Vec<f64>> {
    let f = ext.base();
    if f.characteristic() != 2 {
        return Err(Error::Unsupported("floating-point Bessel values are only provided for even q".into()));
    }
    let m = f.order() as f64 + 1.0;
    let q = f.order() as f64;
    Ok(f.nonzero()
        .map(|x| {
            let z = ExtElement::from_base(x);
            let (mut re, mut im) = (0.0f64, 0.0f64);
            for (k, &t) in ext.circle_powers().iter().enumerate() {
                let sign = if f.abs_trace(ext.rel_trace(ext.mul(t, z))) == 0 { 1.0 } else { -1.0 };
                let ang = std::f64::consts::TAU * ((e * k as u64) as f64) / m;
                re += sign * ang.cos();
                im += sign * ang.sin();
            }
            (re * re + im * im).sqrt() / q
        })
        .collect())
}

/// `Σ_{x ∈ F_q} χ(a x³ + b x)` for `q = 2^(2k+1)`, `(a, b) ≠ (0, 0)`, by direct summation.
pub fn carlitz_sum(field: &Field, chi: &AdditiveChar, a: FieldElement, b: FieldElement) -> Result<i128> {
    check_even_q_odd_degree(field)?;
    if a.is_zero() && b.is_zero() {
        return Err(Error::Domain("Carlitz sums need (a, b) ≠ (0, 0)".into()));
    }
    let s: Cyclo = field
        .elements()
        .map(|x| chi.eval(field.add(field.mul(a, field.pow(x, 3)), field.mul(b, x))))
        .sum();
    Ok(s.as_integer().expect("characters of F_2^n are real"))
}

/// `Σ_{x ∈ F_q} χ(x + ξ^(-k) x³)`, the predicted value of `q·J_π(ξ^k)` for an
/// order-3 circle character at `q = 2^(2k+1)`.
pub fn cubic_value_law_sum(field: &Field, chi: &AdditiveChar, k: i64) -> Cyclo {
    let a = field.exp(-k);
    field.elements().map(|x| chi.eval(field.add(x, field.mul(a, field.pow(x, 3))))).sum()
}

/// Identities of `J_π` on `F_q^*` for even `q`: reality and `π ↔ π̄`
/// symmetry, the second and fourth moments, the mixed fourth moments and
/// integrality of `q·J_π` (the latter only when `π` has order 3).
pub fn verify_bessel_even(ext: &QuadExt, chi: &AdditiveChar, pi: CircleChar, table: &BesselTable) -> Result<Vec<Check>> {
    let f = ext.base();
    if !f.is_even() {
        return Err(Error::Unsupported("these Bessel identities are stated for even q".into()));
    }
    let q = f.order() as i128;
    let conj_table = BesselTable::build(ext, chi, pi.conj())?;
    let vals: Vec<Cyclo> = f.nonzero().map(|x| table.numer_base(x)).collect();
    let mut out = Vec::new();

    let real = vals.iter().all(|v| v.is_real()) && f.nonzero().all(|x| table.numer_base(x) == conj_table.numer_base(x));
    out.push(Check::new("bessel_real_and_conjugation_symmetric", real, format!("q={q}")));

    let m2: i128 = vals.iter().map(|v| v.mag_sq()).sum();
    out.push(Check::new("bessel_second_moment", m2 == q * q, format!("Σ|qJ|² = {m2}, expected q² = {}", q * q)));

    let m4: i128 = vals.iter().map(|v| v.mag_sq() * v.mag_sq()).sum();
    out.push(Check::new("bessel_fourth_moment", m4 == 2 * q * q * q, format!("Σ|qJ|⁴ = {m4}, expected 2q³ = {}", 2 * q * q * q)));

    let mut mixed_ok = true;
    let mut first_bad = String::new();
    for c in f.nonzero().filter(|&c| c != FieldElement::ONE) {
        let s: i128 = f.nonzero().map(|x| table.numer_base(x).mag_sq() * table.numer_base(f.mul(c, x)).mag_sq()).sum();
        if s != q * q * q && mixed_ok {
            mixed_ok = false;
            first_bad = format!("c={} gives {s}", c.0);
        }
    }
    out.push(Check::new(
        "bessel_mixed_fourth_moment",
        mixed_ok,
        if mixed_ok { "Σ|qJ(x)|²|qJ(cx)|² = q³ for all c ≠ 0,1".to_string() } else { first_bad },
    ));

    if pi.order() == 3 {
        let integral = vals.iter().all(|v| v.as_integer().is_some());
        out.push(Check::new("bessel_integrality", integral, "q·J_π(x) ∈ Z on F_q^*"));
    }
    Ok(out)
}

/// `q·J_π(ξ^k) = Σ_x χ(x + ξ^(-k) x³)` for every `k`, and every value lies in
/// `{0, ±2^(k+1)}` together with the matching Carlitz sum.
pub fn verify_cubic_value_law(ext: &QuadExt, chi: &AdditiveChar, table: &BesselTable) -> Result<Vec<Check>> {
    let f = ext.base();
    let half = check_even_q_odd_degree(f)?;
    let amp = 1i128 << (half + 1);
    let allowed = [0, amp, -amp];
    let mut law = true;
    let mut values_ok = true;
    let mut carlitz_ok = true;
    for k in 0..f.order() as i64 - 1 {
        let lhs = table.numer_base(f.exp(k));
        let rhs = cubic_value_law_sum(f, chi, k);
        law &= lhs == rhs;
        values_ok &= lhs.as_integer().is_some_and(|v| allowed.contains(&v));
        let c = carlitz_sum(f, chi, f.exp(-k), FieldElement::ONE)?;
        carlitz_ok &= allowed.contains(&c) && Cyclo::int(c) == rhs;
    }
    Ok(vec![
        Check::new("cubic_value_law", law, format!("q·J_π(ξ^k) = Σ_x χ(x + ξ^-k x³) for all {} k", f.order() - 1)),
        Check::new("bessel_values", values_ok, format!("q·J_π(x) ∈ {{0, ±{amp}}}")),
        Check::new("carlitz_values", carlitz_ok, format!("Carlitz sums ∈ {{0, ±{amp}}}")),
    ])
}

/// Gauss-sum properties over `F_q` for every admissible multiplicative
/// character: `G = -1` for trivial `ρ`, `|G|² = q` otherwise, and
/// `G(χ, ρ̄) = ρ(-1)·conj(G(χ, ρ))`.
pub fn verify_gauss_sums(field: &Field, chi: &AdditiveChar) -> Vec<Check> {
    let q = field.order() as i128;
    let minus_one = field.neg(FieldElement::ONE);
    MulChar::admissible(field)
        .into_iter()
        .map(|rho| {
            let g = gauss_sum(field, chi, rho);
            let g_bar = gauss_sum(field, chi, MulChar(rho.0.conj()));
            let magnitude = if rho.0.is_trivial() { g == -Cyclo::ONE } else { g.mag_sq() == q };
            let conj_law = g_bar == rho.eval(field, minus_one) * g.conj();
            Check::new(
                format!("gauss_sum[q={q}, order={}]", rho.0.order()),
                magnitude && conj_law,
                format!("G = {g}, |G|² = {}", g.mag_sq()),
            )
        })
        .collect()
}

/// Hasse–Davenport checks that stay inside `Z[ζ₃]`:
///
/// * lifting `G(χ, ρ)² = -G(χ∘S, ρ∘N)` for every admissible `ρ` of `F_q^*`;
/// * the product relation over `F_q` for every admissible `m ∈ {2, 3}` and `ρ`;
/// * for even `q` with an order-3 circle character `π`, the `r = 0` instance
///   of the product relation over `L` built from `π_*`, including
///   `G(χ∘S, π_*) = G(χ∘S, π_*²) = q`.
pub fn verify_hasse_davenport(ext: &QuadExt, chi: &AdditiveChar) -> Vec<Check> {
    let f = ext.base();
    let q = f.order();
    let mut out = Vec::new();

    let rhos = MulChar::admissible(f);
    for &rho in &rhos {
        let g = gauss_sum(f, chi, rho);
        let lifted = gauss_sum_lifted(ext, chi, rho);
        out.push(Check::new(
            format!("hd_lifting[q={q}->q²={}, order={}]", q * q, rho.0.order()),
            g * g == -lifted,
            format!("G² = {}, G' = {lifted}", g * g),
        ));
    }
    if rhos.len() == 1 {
        out.push(Check::pass(
            format!("hd_lifting[q={q}] nontrivial"),
            format!("no admissible ρ of order > 1 (orders must divide gcd({}, 6))", q - 1),
        ));
    }

    for m in [2u32, 3] {
        if (q - 1) % m != 0 || f.characteristic() == m {
            continue;
        }
        let pi = MulChar::new(f, 6 / m).expect("order divides q - 1");
        let m_elem = f.from_int(m as i64);
        let pi_prod: Cyclo = (0..m).map(|a| gauss_sum(f, chi, MulChar(pi.0.pow(a as i64)))).fold(Cyclo::ONE, |acc, g| acc * g);
        for &rho in &rhos {
            let lhs = (0..m)
                .map(|a| gauss_sum(f, chi, MulChar(rho.0.mul(pi.0.pow(a as i64)))))
                .fold(Cyclo::ONE, |acc, g| acc * g);
            let rho_m = MulChar(rho.0.pow(m as i64));
            let rhs = -(MulChar(rho.0.pow(-(m as i64))).eval(f, m_elem) * gauss_sum(f, chi, rho_m) * pi_prod);
            out.push(Check::new(
                format!("hd_product[q={q}, m={m}, order(ρ)={}]", rho.0.order()),
                lhs == rhs,
                format!("lhs = {lhs}, rhs = {rhs}"),
            ));
        }
    }

    if f.is_even() {
        if let Ok(pi) = CircleChar::of_order(ext, 3) {
            let twist = |a: u32| {
                let pa = CircleChar(pi.0.pow(a as i64));
                gauss_sum_over_ext(ext, chi, |z| pa.extend_even(ext, z))
            };
            match (twist(0), twist(1), twist(2)) {
                (Ok(g0), Ok(g1), Ok(g2)) => {
                    let qq = Cyclo::int(q as i128);
                    let lhs = g0 * g1 * g2;
                    // r = 0: ρ_* trivial, ρ^(-3)(3) = 1
                    let rhs = -(g0 * (g0 * g1 * g2));
                    let ok = g0 == -Cyclo::ONE && g1 == qq && g2 == qq && lhs == rhs;
                    out.push(Check::new(
                        format!("hd_product_circle[q={q}, r=0]"),
                        ok,
                        format!("G(χ∘S,π_*^a) = ({g0}, {g1}, {g2}), f(0) = {g1}"),
                    ));
                }
                _ => out.push(Check::fail(format!("hd_product_circle[q={q}]"), "extension of π to L^* failed")),
            }
        }
    }
    out
}

/// `q·J_{π₂}(z) = -π₂'(-z)·G(χ, π₂')·(χ(-2z) - χ(2z))` for all `z ∈ F_q^*`
/// (odd `q`), where `π₂'` is the quadratic character of `F_q^*`.
///
/// The factor is `π₂'(-z)`, not `π₂'(z)`: the two agree only for
/// `q ≡ 1 (mod 4)`. The detail string records whether the variant without
/// the sign also holds.
pub fn verify_quadratic_bessel_formula(ext: &QuadExt, chi: &AdditiveChar, table: &BesselTable) -> Result<Check> {
    let f = ext.base();
    let quad = MulChar::quadratic(f)?;
    let g = gauss_sum(f, chi, quad);
    let two = f.from_int(2);
    let mut bad = None;
    let mut unsigned_holds = true;
    for z in f.nonzero() {
        let tz = f.mul(two, z);
        let diff = chi.eval(f.neg(tz)) - chi.eval(tz);
        let rhs = -(quad.eval(f, f.neg(z)) * g * diff);
        unsigned_holds &= table.numer_base(z) == -(quad.eval(f, z) * g * diff);
        if table.numer_base(z) != rhs && bad.is_none() {
            bad = Some(z);
        }
    }
    let name = format!("quadratic_bessel_formula[q={}]", f.order());
    Ok(match bad {
        None => Check::pass(
            name,
            format!("holds on all of F_q^*; without the π₂'(-1) sign: {}", if unsigned_holds { "also holds" } else { "fails" }),
        ),
        Some(z) => Check::fail(name, format!("fails at z={}", z.0)),
    })
}

/// `|J_{π₂}|² = 0` on circles `C_d` with `d` a nonsquare and
/// `|J_{π₂}|² ∈ {0, 3/q}` when `d` is a square (characteristic 3).
pub fn verify_quadratic_angle_law(ext: &QuadExt, table: &BesselTable) -> Result<Check> {
    let f = ext.base();
    if f.characteristic() != 3 {
        return Err(Error::Unsupported("the angle set {0, 3/q} is specific to characteristic 3".into()));
    }
    let q = f.order() as i128;
    let ok = ext.elements().skip(1).all(|z| {
        let m = table.numer(ext, z).mag_sq();
        if f.is_square(ext.norm(z)) {
            m == 0 || m == 3 * q
        } else {
            m == 0
        }
    });
    Ok(Check::new(format!("quadratic_angle_law[q={q}]", ), ok, "|qJ|² ∈ {0, 3q} on square circles, 0 elsewhere"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::report::all_passed;

    fn setup(p: u32, n: u32) -> (QuadExt, AdditiveChar) {
        let ext = QuadExt::new(Field::new(p, n).unwrap()).unwrap();
        let chi = AdditiveChar::new(ext.base()).unwrap();
        (ext, chi)
    }

    #[test]
    fn additive_character() {
        for (p, n) in [(2, 3), (3, 2), (2, 5)] {
            let f = Field::new(p, n).unwrap();
            let chi = AdditiveChar::new(&f).unwrap();
            assert_eq!(chi.eval(FieldElement::ZERO), Cyclo::ONE);
            assert_eq!(f.elements().map(|x| chi.eval(x)).sum::<Cyclo>(), Cyclo::ZERO);
            for x in f.elements() {
                for y in f.elements() {
                    assert_eq!(chi.eval(f.add(x, y)), chi.eval(x) * chi.eval(y));
                }
            }
        }
        let f8 = Field::new(2, 3).unwrap();
        assert_eq!(AdditiveChar::new(&f8).unwrap().eval(FieldElement::ONE), -Cyclo::ONE);
        assert!(AdditiveChar::new(&Field::new(5, 1).unwrap()).is_err());
    }

    #[test]
    fn circle_characters() {
        let (e8, _) = setup(2, 3);
        let pi = CircleChar::of_order(&e8, 3).unwrap();
        assert_eq!(pi.eval(&e8, ExtElement::ONE), Cyclo::ONE);
        assert_eq!(pi.order(), 3);
        let t0 = e8.circle_generator();
        assert_eq!(pi.eval(&e8, t0), Cyclo::ZETA3);
        for &s in e8.circle_powers() {
            for &t in e8.circle_powers() {
                assert_eq!(pi.eval(&e8, e8.mul(s, t)), pi.eval(&e8, s) * pi.eval(&e8, t));
            }
        }
        assert!(CircleChar::of_order(&e8, 2).is_err());
        let (e9, _) = setup(3, 2);
        let pi2 = CircleChar::of_order(&e9, 2).unwrap();
        assert_eq!(pi2.eval(&e9, e9.circle_generator()), -Cyclo::ONE);
        assert!(e9.circle_powers().iter().all(|&t| pi2.eval(&e9, t).mag_sq() == 1 && pi2.eval(&e9, t).is_real()));
        assert!(CircleChar::of_order(&e9, 3).is_err());
        assert!(CircleChar::of_order(&e9, 5).is_err());
    }

    /// Direct summation oracle for J at q = 8, independent of the table.
    fn bessel_oracle(ext: &QuadExt, chi: &AdditiveChar, pi: CircleChar, z: ExtElement) -> Cyclo {
        let f = ext.base();
        ext.unit_circle()
            .into_iter()
            .map(|t| chi.eval(f.neg(ext.rel_trace(ext.mul(t, z)))) * pi.eval(ext, t))
            .sum()
    }

    #[test]
    fn bessel_q8() {
        let (e8, chi) = setup(2, 3);
        let pi = CircleChar::of_order(&e8, 3).unwrap();
        let table = BesselTable::build(&e8, &chi, pi).unwrap();
        let f = e8.base();
        let mut vals = Vec::new();
        for x in f.nonzero() {
            let v = table.numer_base(x);
            assert_eq!(v, bessel_oracle(&e8, &chi, pi, ExtElement::from_base(x)));
            vals.push(v.as_integer().unwrap());
        }
        assert!(vals.iter().all(|v| [0, 4, -4].contains(v)), "{vals:?}");
        assert_eq!(vals.iter().map(|v| v * v).sum::<i128>(), 64);
        // covariance J(tz) = π̄(t) J(z)
        for z in e8.elements() {
            for &t in e8.circle_powers() {
                assert_eq!(table.numer(&e8, e8.mul(t, z)), pi.conj().eval(&e8, t) * table.numer(&e8, z));
            }
        }
        assert!(all_passed(&verify_bessel_even(&e8, &chi, pi, &table).unwrap()));
        assert!(all_passed(&verify_cubic_value_law(&e8, &chi, &table).unwrap()));
        assert!(BesselTable::build(&e8, &chi, CircleChar(CyclicChar::TRIVIAL)).is_err());
    }

    #[test]
    fn float_bessel_agrees_with_exact() {
        let (e8, chi) = setup(2, 3);
        let table = BesselTable::build(&e8, &chi, CircleChar::of_order(&e8, 3).unwrap()).unwrap();
        let exact: Vec<f64> = e8.base().nonzero().map(|x| (table.numer_base(x).mag_sq() as f64).sqrt() / 8.0).collect();
        let approx = bessel_magnitudes_f64(&e8, 3).unwrap();
        for (a, b) in exact.iter().zip(&approx) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn gauss_sums() {
        for (p, n) in [(2, 3), (3, 2), (2, 6), (3, 4)] {
            let f = Field::new(p, n).unwrap();
            let chi = AdditiveChar::new(&f).unwrap();
            let checks = verify_gauss_sums(&f, &chi);
            assert!(all_passed(&checks), "{checks:?}");
        }
        let f = Field::new(2, 3).unwrap();
        let chi = AdditiveChar::new(&f).unwrap();
        assert_eq!(gauss_sum(&f, &chi, MulChar(CyclicChar::TRIVIAL)), -Cyclo::ONE);
        assert_eq!(MulChar::admissible(&f).len(), 1);
        assert_eq!(MulChar::admissible(&Field::new(2, 6).unwrap()).len(), 3);
        assert_eq!(MulChar::admissible(&Field::new(3, 2).unwrap()).len(), 2);
    }

    #[test]
    fn carlitz() {
        let f = Field::new(2, 3).unwrap();
        let chi = AdditiveChar::new(&f).unwrap();
        assert_eq!(carlitz_sum(&f, &chi, FieldElement::ONE, FieldElement::ZERO).unwrap(), 0);
        assert_eq!(carlitz_sum(&f, &chi, FieldElement::ZERO, FieldElement::ONE).unwrap(), 0);
        for a in f.elements() {
            for b in f.elements() {
                if a.is_zero() && b.is_zero() {
                    assert!(carlitz_sum(&f, &chi, a, b).is_err());
                } else {
                    assert!([0, 4, -4].contains(&carlitz_sum(&f, &chi, a, b).unwrap()));
                }
            }
        }
        let f16 = Field::new(2, 4).unwrap();
        let chi16 = AdditiveChar::new(&f16).unwrap();
        assert!(carlitz_sum(&f16, &chi16, FieldElement::ONE, FieldElement::ONE).is_err());
    }

    #[test]
    fn hasse_davenport() {
        for (p, n) in [(2, 3), (3, 2), (2, 5)] {
            let (ext, chi) = setup(p, n);
            let checks = verify_hasse_davenport(&ext, &chi);
            assert!(all_passed(&checks), "{checks:#?}");
        }
        let (e8, chi) = setup(2, 3);
        let checks = verify_hasse_davenport(&e8, &chi);
        assert!(checks.iter().any(|c| c.detail.contains("no admissible")));
        assert!(checks.iter().any(|c| c.name.starts_with("hd_product_circle")));
    }

    #[test]
    fn quadratic_bessel_by_hand() {
        // q = 3: C = {±1, ±ρ}, S(x + yρ) = 2x, so qJ(1) = ω + ω² - 2 = -3.
        let (e3, chi) = setup(3, 1);
        let pi2 = CircleChar::of_order(&e3, 2).unwrap();
        let table = BesselTable::build(&e3, &chi, pi2).unwrap();
        assert_eq!(table.numer_base(FieldElement::ONE), Cyclo::int(-3));
        let c = verify_quadratic_bessel_formula(&e3, &chi, &table).unwrap();
        assert!(c.passed && c.detail.ends_with("fails"), "{c}");
        let (e9, chi) = setup(3, 2);
        let table = BesselTable::build(&e9, &chi, CircleChar::of_order(&e9, 2).unwrap()).unwrap();
        let c = verify_quadratic_bessel_formula(&e9, &chi, &table).unwrap();
        assert!(c.passed && c.detail.ends_with("also holds"), "{c}");
    }

    #[test]
    fn odd_characteristic_bessel() {
        for n in [2, 3] {
            let (ext, chi) = setup(3, n);
            let pi2 = CircleChar::of_order(&ext, 2).unwrap();
            let table = BesselTable::build(&ext, &chi, pi2).unwrap();
            let c = verify_quadratic_bessel_formula(&ext, &chi, &table).unwrap();
            assert!(c.passed, "{c}");
            let c = verify_quadratic_angle_law(&ext, &table).unwrap();
            assert!(c.passed, "{c}");
        }
    }

    #[test]
    fn bessel_json_export() {
        let (e8, chi) = setup(2, 3);
        let pi = CircleChar::of_order(&e8, 3).unwrap();
        let table = BesselTable::build(&e8, &chi, pi).unwrap();
        let v: serde_json::Value = serde_json::from_str(&table.to_json(&e8).unwrap()).unwrap();
        let arr = v.as_array().unwrap();
        assert_eq!(arr.len(), 63);
        assert_eq!(arr[0]["value"]["den"], 8);
        assert!(arr[0]["z"]["x"].is_array());
    }
}
