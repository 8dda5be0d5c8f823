//! Batteries of exact checks grouped into suites, shared by the command-line
//! `selftest` and the acceptance target.

use std::time::{Duration, Instant};

use num_rational::Ratio;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::certify::{full_certificate, special_bound, Certificate};
use crate::characters::{
    bessel_magnitudes_f64, verify_bessel_even, verify_cubic_value_law, verify_gauss_sums, verify_hasse_davenport,
    verify_quadratic_angle_law, verify_quadratic_bessel_formula, AdditiveChar, BesselTable, CircleChar,
};
use crate::error::Result;
use crate::gf::Field;
use crate::packing::{build_phi_even, build_phi_odd, even_representation, odd_representation, FieldTag};
use crate::quad_ext::{QuadExt, RepStrategy};
use crate::report::Check;
use crate::repr::{r_op, t_full, GroupElement, ReprMatrix};

/// Slack for the floating-point coherence bound on characters outside `Z[ζ₃]`.
pub const FLOAT_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Debug, Serialize)]
pub struct SuiteResult {
    pub name: String,
    pub checks: Vec<Check>,
    #[serde(skip)]
    pub elapsed: Duration,
}

impl SuiteResult {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    fn run(name: impl Into<String>, f: impl FnOnce() -> Result<Vec<Check>>) -> SuiteResult {
        let name = name.into();
        let start = Instant::now();
        let checks = match f() {
            Ok(c) => c,
            Err(e) => vec![Check::fail(name.clone(), e.to_string())],
        };
        SuiteResult { name, checks, elapsed: start.elapsed() }
    }
}

fn field_of(q: u32) -> Result<Field> {
    let p = if q % 2 == 0 { 2 } else { 3 };
    let mut n = 0;
    let mut m = q;
    while m > 1 {
        m /= p;
        n += 1;
    }
    Field::new(p, n)
}

/// `V(g₁)V(g₂) = V(g₁g₂)` over random pairs (checked in parallel) and
/// `V(g)V(g)* = I` over random `g`.
fn law_checks<F>(label: &str, field: &Field, pairs: usize, unitary: usize, seed: u64, build: F) -> Vec<Check>
where
    F: Fn(&GroupElement) -> Result<ReprMatrix> + Sync,
{
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let triples: Vec<(GroupElement, GroupElement)> =
        (0..pairs).map(|_| (GroupElement::random(field, &mut rng), GroupElement::random(field, &mut rng))).collect();
    let singles: Vec<GroupElement> = (0..unitary).map(|_| GroupElement::random(field, &mut rng)).collect();
    let law_failures = triples
        .par_iter()
        .filter(|(g1, g2)| match (build(g1), build(g2), build(&g1.mul(field, g2))) {
            (Ok(a), Ok(b), Ok(c)) => a.mul(&b) != c,
            _ => true,
        })
        .count();
    let unit_failures = singles
        .par_iter()
        .filter(|g| build(g).map(|m| !m.is_unitary()).unwrap_or(true))
        .count();
    let identity_ok = build(&GroupElement::identity()).map(|m| m.is_identity()).unwrap_or(false);
    vec![
        Check::new(
            format!("homomorphism[{label}]"),
            law_failures == 0,
            format!("{} of {pairs} random pairs fail", law_failures),
        ),
        Check::new(
            format!("unitarity[{label}]"),
            unit_failures == 0 && identity_ok,
            format!("{unit_failures} of {unitary} random elements fail; identity maps to I: {identity_ok}"),
        ),
    ]
}

/// Group law and unitarity for the full matrices (`q ≤ 9` in practice) and,
/// at even `q`, rotation commutation for every `t ∈ C` against `rot_samples` random `g`.
pub fn full_matrix_suite(q: u32, pairs: usize, unitary: usize, rot_samples: usize) -> SuiteResult {
    SuiteResult::run(format!("full matrices q={q}"), || {
        let ext = QuadExt::new(field_of(q)?)?;
        let chi = AdditiveChar::new(ext.base())?;
        let f = ext.base();
        let mut checks = law_checks(&format!("full q={q}"), f, pairs, unitary, 11 + q as u64, |g| t_full(&ext, &chi, g));
        if rot_samples > 0 {
            let mut rng = ChaCha8Rng::seed_from_u64(29);
            let gs: Vec<ReprMatrix> = (0..rot_samples)
                .map(|_| t_full(&ext, &chi, &GroupElement::random(f, &mut rng)))
                .collect::<Result<_>>()?;
            let rots: Vec<ReprMatrix> = ext.circle_powers().iter().map(|&t| r_op(&ext, t)).collect::<Result<_>>()?;
            let bad = rots
                .par_iter()
                .map(|r| gs.iter().filter(|m| r.mul(m) != m.mul(r)).count())
                .sum::<usize>();
            checks.push(Check::new(
                format!("rotation_commutes[q={q}]"),
                bad == 0,
                format!("all {} t in C against {rot_samples} random g, {bad} failures", rots.len()),
            ));
        }
        Ok(checks)
    })
}

/// Group law and unitarity for the reduced matrices at `q`: `T_{g,π,θ}` for
/// both representative strategies where they exist, `T_{g,π}` at even `q`,
/// and the two blocks at odd `q`.
pub fn reduced_matrix_suite(q: u32, pairs: usize, unitary: usize) -> SuiteResult {
    SuiteResult::run(format!("reduced matrices q={q}"), || {
        let seed = 101 + q as u64;
        let mut checks = Vec::new();
        if q % 2 == 0 {
            let rep = even_representation(q)?;
            let f = rep.field();
            checks.extend(law_checks(&format!("reduced q={q} sqrt"), f, pairs, unitary, seed, |g| Ok(rep.reduced(g))));
            checks.extend(law_checks(&format!("even q={q}"), f, pairs, unitary, seed + 1, |g| rep.even(g)));
            let ext = QuadExt::new(field_of(q)?)?;
            let pi = CircleChar::of_order(&ext, 3)?;
            let first = crate::repr::Representation::new(ext, pi, RepStrategy::First)?;
            checks.extend(law_checks(&format!("reduced q={q} first"), first.field(), pairs, unitary, seed + 2, |g| {
                Ok(first.reduced(g))
            }));
        } else {
            let rep = odd_representation(q, RepStrategy::First)?;
            let f = rep.field();
            checks.extend(law_checks(&format!("reduced q={q}"), f, pairs, unitary, seed, |g| Ok(rep.reduced(g))));
            checks.extend(law_checks(&format!("plus q={q}"), f, pairs, unitary, seed + 1, |g| Ok(rep.pi2_blocks(g)?.0)));
            checks.extend(law_checks(&format!("minus q={q}"), f, pairs, unitary, seed + 2, |g| Ok(rep.pi2_blocks(g)?.1)));
        }
        Ok(checks)
    })
}

/// Mixed `QR × NQR` entries of `T_{g,π₂,θ}` vanish for random `g`.
pub fn block_vanishing_suite(q: u32, samples: usize) -> SuiteResult {
    SuiteResult::run(format!("block vanishing q={q}"), || {
        let rep = odd_representation(q, RepStrategy::First)?;
        let mut rng = ChaCha8Rng::seed_from_u64(71);
        let mut bad = 0;
        for _ in 0..samples {
            if rep.pi2_blocks(&GroupElement::random(rep.field(), &mut rng)).is_err() {
                bad += 1;
            }
        }
        Ok(vec![Check::new(
            format!("block_vanishing[q={q}]"),
            bad == 0,
            format!("{bad} of {samples} random elements have a nonzero mixed entry"),
        )])
    })
}

/// Bessel identities, integrality and the value law at even `q`; the
/// order-2 closed form and angle law at odd `q`.
pub fn bessel_suite(q: u32) -> SuiteResult {
    SuiteResult::run(format!("bessel q={q}"), || {
        let ext = QuadExt::new(field_of(q)?)?;
        let chi = AdditiveChar::new(ext.base())?;
        if q % 2 == 0 {
            let pi = CircleChar::of_order(&ext, 3)?;
            let table = BesselTable::build(&ext, &chi, pi)?;
            let mut checks: Vec<Check> = verify_bessel_even(&ext, &chi, pi, &table)?
                .into_iter()
                .map(|c| Check { name: format!("{}[q={q}]", c.name), ..c })
                .collect();
            checks.extend(
                verify_cubic_value_law(&ext, &chi, &table)?
                    .into_iter()
                    .map(|c| Check { name: format!("{}[q={q}]", c.name), ..c }),
            );
            Ok(checks)
        } else {
            let pi = CircleChar::of_order(&ext, 2)?;
            let table = BesselTable::build(&ext, &chi, pi)?;
            Ok(vec![verify_quadratic_bessel_formula(&ext, &chi, &table)?, verify_quadratic_angle_law(&ext, &table)?])
        }
    })
}

/// For every circle character at even `q` (including those outside
/// `Z[ζ₃]`, evaluated in floating point), the largest `|J_π|²` is at least
/// `2/q`, with equality exactly for the characters of order 3.
pub fn coherence_lower_bound_suite(q: u32) -> SuiteResult {
    SuiteResult::run(format!("coherence lower bound q={q}"), || {
        let ext = QuadExt::new(field_of(q)?)?;
        let bound = 2.0 / q as f64;
        let mut checks = Vec::new();
        for e in 1..=q as u64 {
            let mags = bessel_magnitudes_f64(&ext, e)?;
            let max2 = mags.iter().map(|m| m * m).fold(0.0f64, f64::max);
            let order = (q as u64 + 1) / num_integer::gcd(e, q as u64 + 1);
            let at_bound = (max2 - bound).abs() < FLOAT_TOLERANCE;
            let ok = max2 >= bound - FLOAT_TOLERANCE && (at_bound == (order == 3));
            checks.push(Check::new(
                format!("coherence_lower_bound[q={q}, e={e}]"),
                ok,
                format!("order {order}: max |J|^2 = {max2:.12}, 2/q = {bound:.12}"),
            ));
        }
        Ok(checks)
    })
}

/// Gauss-sum properties over `F_q` for every admissible character.
pub fn gauss_suite(p: u32, n: u32) -> SuiteResult {
    SuiteResult::run(format!("gauss sums q={}", p.pow(n)), || {
        let f = Field::new(p, n)?;
        let chi = AdditiveChar::new(&f)?;
        Ok(verify_gauss_sums(&f, &chi))
    })
}

/// Hasse–Davenport relations for `F_q ⊂ L`.
pub fn hasse_davenport_suite(q: u32) -> SuiteResult {
    SuiteResult::run(format!("hasse-davenport q={q}"), || {
        let ext = QuadExt::new(field_of(q)?)?;
        let chi = AdditiveChar::new(ext.base())?;
        Ok(verify_hasse_davenport(&ext, &chi))
    })
}

/// Closed forms `N(R^(q-1), 0, √(2/q)) = q² - 1` and
/// `N(C^((q-1)/2), 0, √(3/q)) = (q² - 1)/2`.
pub fn bound_algebra_suite(max_k: u32) -> SuiteResult {
    SuiteResult::run("bound algebra", || {
        let mut checks = Vec::new();
        for k in 1..=max_k {
            let q = 2i128.pow(2 * k + 1);
            let b = special_bound(FieldTag::Real, (q - 1) as usize, Ratio::from_integer(0), Ratio::new(2, q));
            checks.push(Check::new(
                format!("real_bound_identity[q={q}]"),
                b == Some(Ratio::from_integer(q * q - 1)),
                format!("{b:?}"),
            ));
        }
        for k in 2..=max_k {
            let q = 3i128.pow(k);
            let b = special_bound(FieldTag::Complex, ((q - 1) / 2) as usize, Ratio::from_integer(0), Ratio::new(3, q));
            checks.push(Check::new(
                format!("complex_bound_identity[q={q}]"),
                b == Some(Ratio::from_integer((q * q - 1) / 2)),
                format!("{b:?}"),
            ));
        }
        Ok(checks)
    })
}

fn certificate_checks(prefix: &str, c: &Certificate) -> Vec<Check> {
    let mut out: Vec<Check> = c.checks.iter().map(|k| Check { name: format!("{prefix}:{}", k.name), ..k.clone() }).collect();
    if let Some(b) = &c.bases {
        out.push(Check::new(
            format!("{prefix}:bases"),
            b.complete && b.unbiased,
            format!("{} bases of size {}, backtracking={}", b.count, b.basis_size, b.used_backtracking),
        ));
    }
    out
}

/// Builds the family member at `q` and certifies it.
pub fn family_suite(q: u32) -> SuiteResult {
    SuiteResult::run(format!("family q={q}"), || {
        if q % 2 == 0 {
            let sys = build_phi_even(q)?;
            Ok(certificate_checks(&format!("even q={q}"), &full_certificate(&sys)?))
        } else {
            let (p, m) = build_phi_odd(q, RepStrategy::First)?;
            let mut out = certificate_checks(&format!("odd+ q={q}"), &full_certificate(&p)?);
            out.extend(certificate_checks(&format!("odd- q={q}"), &full_certificate(&m)?));
            Ok(out)
        }
    })
}

/// Which suites to run.
#[derive(Clone, Debug)]
pub struct SelftestPlan {
    pub even: Vec<u32>,
    pub odd: Vec<u32>,
    pub values_only: Vec<u32>,
    pub pairs: usize,
}

impl SelftestPlan {
    /// `q ∈ {8, 9}`: finishes in seconds.
    pub fn quick() -> Self {
        SelftestPlan { even: vec![8], odd: vec![9], values_only: vec![], pairs: 100 }
    }

    /// Adds `q ∈ {32, 27}` and the values-only check at `q = 128`.
    pub fn extended() -> Self {
        SelftestPlan { even: vec![8, 32], odd: vec![9, 27], values_only: vec![128], pairs: 200 }
    }

    /// Plan for an explicit list of `q`; powers of 2 above 32 run values-only.
    pub fn for_orders(qs: &[u32]) -> Self {
        let mut plan = SelftestPlan { even: vec![], odd: vec![], values_only: vec![], pairs: 100 };
        for &q in qs {
            match (q % 2 == 0, q > 32) {
                (true, true) => plan.values_only.push(q),
                (true, false) => plan.even.push(q),
                (false, _) => plan.odd.push(q),
            }
        }
        plan
    }
}

pub fn run_plan(plan: &SelftestPlan) -> Vec<SuiteResult> {
    let mut out = Vec::new();
    for &q in &plan.even {
        if q <= 9 {
            out.push(full_matrix_suite(q, plan.pairs.min(100), 20, 5));
            out.push(coherence_lower_bound_suite(q));
        }
        out.push(reduced_matrix_suite(q, plan.pairs, 20));
        out.push(bessel_suite(q));
        out.push(hasse_davenport_suite(q));
        out.push(family_suite(q));
    }
    for &q in &plan.odd {
        if q <= 9 {
            out.push(full_matrix_suite(q, plan.pairs.min(100), 20, 0));
        }
        out.push(reduced_matrix_suite(q, plan.pairs, 20));
        out.push(block_vanishing_suite(q, 50));
        out.push(bessel_suite(q));
        out.push(hasse_davenport_suite(q));
        out.push(family_suite(q));
    }
    for &q in &plan.values_only {
        out.push(bessel_suite(q));
    }
    let mut gauss_fields: Vec<(u32, u32)> = Vec::new();
    for &q in plan.even.iter().chain(&plan.odd) {
        let f = field_of(q).map(|f| (f.characteristic(), f.degree()));
        if let Ok((p, n)) = f {
            gauss_fields.push((p, n));
            gauss_fields.push((p, 2 * n));
        }
    }
    gauss_fields.sort();
    gauss_fields.dedup();
    for (p, n) in gauss_fields {
        if p.pow(n) <= 1 << 13 {
            out.push(gauss_suite(p, n));
        }
    }
    out.push(bound_algebra_suite(5));
    out
}
