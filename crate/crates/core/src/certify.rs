//! Bounds and certificates for line systems: the special bound for
//! biangular lines, the Welch bound, tight frames, projective 2-designs and
//! decomposition into mutually unbiased orthonormal bases.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_rational::Ratio;
use rayon::prelude::*;
use serde::Serialize;

use crate::cyclotomic::Cyclo;
use crate::error::{Error, Result};
use crate::packing::{gram, Family, FieldTag, GramData, LineSystem};
use crate::report::Check;

pub type Rational = Ratio<i128>;

/// Backtracking is attempted only up to this many lines.
pub const BACKTRACK_MAX_LINES: usize = 1100;
const BACKTRACK_NODE_LIMIT: u64 = 20_000_000;

fn rat(n: i128) -> Rational {
    Ratio::from_integer(n)
}

/// Upper bound on the size of an `{α, β}`-angular system in `R^n` or `C^n`,
/// from the squared angles. `None` when the hypotheses of the bound fail.
pub fn special_bound(field: FieldTag, n: usize, alpha2: Rational, beta2: Rational) -> Option<Rational> {
    let (a2, b2) = if alpha2 <= beta2 { (alpha2, beta2) } else { (beta2, alpha2) };
    if a2 < rat(0) || b2 >= rat(1) {
        return None;
    }
    let n = n as i128;
    let (lead, k, limit) = match field {
        FieldTag::Real => (n * (n + 2), rat(3), Ratio::new(6, n + 4)),
        FieldTag::Complex => (n * (n + 1), rat(2), Ratio::new(4, n + 2)),
    };
    let shift = match field {
        FieldTag::Real => n + 2,
        FieldTag::Complex => n + 1,
    };
    let denom = k - rat(shift) * (a2 + b2) + rat(lead) * a2 * b2;
    if denom <= rat(0) || a2 + b2 >= limit {
        return None;
    }
    Some(rat(lead) * (rat(1) - a2) * (rat(1) - b2) / denom)
}

/// Squared Welch bound `(N - n) / (n(N - 1))` on the coherence of `N` lines in dimension `n`.
pub fn welch_bound(n: usize, lines: usize) -> Result<Rational> {
    if n == 0 || lines <= n {
        return Err(Error::Domain(format!("the Welch bound needs N > n >= 1, got N = {lines}, n = {n}")));
    }
    let (n, m) = (n as i128, lines as i128);
    Ok(Ratio::new(m - n, n * (m - 1)))
}

/// Whether `Σ φφ* = (N/n)·I`; returns the flag and `N/n`.
pub fn check_tight_frame(sys: &LineSystem) -> (bool, Rational) {
    let n = sys.dim;
    let a = Ratio::new(sys.len() as i128, n as i128);
    // n·Σ φ_i conj(φ_j) must equal N·den²·δ_ij
    let target = sys.len() as i128 * sys.den * sys.den;
    let ok = (0..n).into_par_iter().all(|i| {
        (0..n).all(|j| {
            let s: Cyclo = sys.vectors.iter().map(|v| v[i] * v[j].conj()).sum();
            let want = if i == j { target } else { 0 };
            s.scale(n as i128) == Cyclo::int(want)
        })
    });
    (ok, a)
}

/// The right-hand side `N²·3/(n(n+2))` (real) or `N²·2/(n(n+1))` (complex)
/// of the 2-design identity.
pub fn design_target(field: FieldTag, n: usize, lines: usize) -> Rational {
    let (n, m) = (n as i128, lines as i128);
    match field {
        FieldTag::Real => Ratio::new(3 * m * m, n * (n + 2)),
        FieldTag::Complex => Ratio::new(2 * m * m, n * (n + 1)),
    }
}

/// `Σ_{u,v} |⟨u, v⟩|⁴` against the projective 2-design value.
pub fn check_2design(sys: &LineSystem, g: &GramData) -> (bool, Rational, Rational) {
    let lhs = g.fourth_moment();
    let rhs = design_target(sys.field, sys.dim, sys.len());
    (lhs == rhs, lhs, rhs)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BasisReport {
    /// Each basis as a list of line indices.
    pub bases: Vec<Vec<usize>>,
    pub complete: bool,
    pub used_backtracking: bool,
    /// Whether every pair from different bases has squared overlap in `{0, β²}`.
    pub unbiased: bool,
    /// Support size (weighing-matrix weight) → number of vectors.
    pub weights: BTreeMap<usize, usize>,
}

fn greedy_bases(g: &GramData, n: usize) -> Option<Vec<Vec<usize>>> {
    let total = g.len();
    let mut used = vec![false; total];
    let mut bases = Vec::new();
    for seed in 0..total {
        if used[seed] {
            continue;
        }
        let mut basis = vec![seed];
        used[seed] = true;
        for cand in seed + 1..total {
            if basis.len() == n {
                break;
            }
            if !used[cand] && basis.iter().all(|&b| g.numer(b, cand) == 0) {
                basis.push(cand);
                used[cand] = true;
            }
        }
        if basis.len() != n {
            return None;
        }
        bases.push(basis);
    }
    Some(bases)
}

fn backtrack_bases(g: &GramData, n: usize) -> Option<Vec<Vec<usize>>> {
    struct Search<'a> {
        g: &'a GramData,
        n: usize,
        used: Vec<bool>,
        bases: Vec<Vec<usize>>,
        nodes: u64,
    }

    impl Search<'_> {
        fn cover(&mut self) -> Option<bool> {
            let Some(seed) = self.used.iter().position(|u| !u) else {
                return Some(true);
            };
            self.used[seed] = true;
            let mut basis = vec![seed];
            let r = self.extend(&mut basis, seed + 1);
            self.used[seed] = false;
            r
        }

        fn extend(&mut self, basis: &mut Vec<usize>, from: usize) -> Option<bool> {
            self.nodes += 1;
            if self.nodes > BACKTRACK_NODE_LIMIT {
                return None;
            }
            if basis.len() == self.n {
                self.bases.push(basis.clone());
                match self.cover()? {
                    true => return Some(true),
                    false => {
                        self.bases.pop();
                        return Some(false);
                    }
                }
            }
            for cand in from..self.g.len() {
                if self.used[cand] || !basis.iter().all(|&b| self.g.numer(b, cand) == 0) {
                    continue;
                }
                self.used[cand] = true;
                basis.push(cand);
                let r = self.extend(basis, cand + 1);
                basis.pop();
                self.used[cand] = false;
                if r? {
                    return Some(true);
                }
            }
            Some(false)
        }
    }

    let mut s = Search { g, n, used: vec![false; g.len()], bases: Vec::new(), nodes: 0 };
    match s.cover() {
        Some(true) => Some(s.bases),
        _ => None,
    }
}

/// Partitions the lines into orthonormal bases, greedily in index order and
/// by backtracking if that fails (up to [`BACKTRACK_MAX_LINES`] lines).
pub fn check_unbiased_bases(sys: &LineSystem, g: &GramData) -> Result<BasisReport> {
    let n = sys.dim;
    if sys.is_empty() || sys.len() % n != 0 {
        return Err(Error::Domain(format!("{} lines cannot be split into bases of size {n}", sys.len())));
    }
    let mut used_backtracking = false;
    let found = match greedy_bases(g, n) {
        Some(b) => Some(b),
        None if sys.len() <= BACKTRACK_MAX_LINES => {
            used_backtracking = true;
            backtrack_bases(g, n)
        }
        None => None,
    };
    let mut weights = BTreeMap::new();
    for s in sys.supports() {
        *weights.entry(s).or_insert(0) += 1;
    }
    let Some(bases) = found else {
        return Ok(BasisReport { bases: Vec::new(), complete: false, used_backtracking, unbiased: false, weights });
    };
    let mut which = vec![0usize; sys.len()];
    for (k, b) in bases.iter().enumerate() {
        for &i in b {
            which[i] = k;
        }
    }
    let mut nonzero = None;
    let mut unbiased = true;
    for i in 0..sys.len() {
        for j in i + 1..sys.len() {
            if which[i] == which[j] {
                continue;
            }
            let m = g.numer(i, j);
            if m != 0 {
                match nonzero {
                    None => nonzero = Some(m),
                    Some(x) if x != m => unbiased = false,
                    _ => {}
                }
            }
        }
    }
    Ok(BasisReport { bases, complete: true, used_backtracking, unbiased, weights })
}

/// A rational as `{"num": .., "den": ..}` in lowest terms.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct ExactNumber {
    pub num: i128,
    pub den: i128,
}

impl From<Rational> for ExactNumber {
    fn from(r: Rational) -> Self {
        ExactNumber { num: *r.numer(), den: *r.denom() }
    }
}

impl From<usize> for ExactNumber {
    fn from(n: usize) -> Self {
        ExactNumber { num: n as i128, den: 1 }
    }
}

impl std::fmt::Display for ExactNumber {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct BasisSummary {
    pub count: ExactNumber,
    pub basis_size: ExactNumber,
    pub complete: bool,
    pub used_backtracking: bool,
    pub unbiased: bool,
    /// `[support size, number of vectors]` pairs.
    pub weights: Vec<[ExactNumber; 2]>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Certificate {
    pub field: FieldTag,
    pub q: Option<u32>,
    pub family: Option<Family>,
    pub cardinality: ExactNumber,
    pub dim: ExactNumber,
    pub angle_set: Vec<ExactNumber>,
    pub coherence_squared: ExactNumber,
    pub special_bound: Option<ExactNumber>,
    pub special_bound_equality: bool,
    pub welch_bound_squared: Option<ExactNumber>,
    pub tight_frame: bool,
    pub frame_constant: ExactNumber,
    pub design_lhs: ExactNumber,
    pub design_rhs: ExactNumber,
    pub projective_2_design: bool,
    /// Real systems only: whether the nonzero angle has the form `1/m`.
    pub angle_is_reciprocal_integer: Option<bool>,
    pub bases: Option<BasisSummary>,
    pub checks: Vec<Check>,
    pub passed: bool,
}

/// `(N, angle², dim)` claimed for a family member.
pub fn family_claims(family: Family, q: u32) -> (usize, Rational, usize) {
    let q = q as usize;
    match family {
        Family::Even => (q * q - 1, Ratio::new(2, q as i128), q - 1),
        Family::OddPlus | Family::OddMinus => ((q * q - 1) / 2, Ratio::new(3, q as i128), (q - 1) / 2),
    }
}

fn fmt_set(s: &[Rational]) -> String {
    let parts: Vec<String> = s.iter().map(|r| ExactNumber::from(*r).to_string()).collect();
    format!("{{{}}}", parts.join(", "))
}

fn is_reciprocal_square(r: Rational) -> bool {
    if *r.numer() != 1 {
        return false;
    }
    let d = *r.denom();
    let m = (d as f64).sqrt().round() as i128;
    (m - 1..=m + 1).any(|k| k > 0 && k * k == d)
}

/// Runs every check on a system. For systems carrying `family` and `q`, the
/// cardinality, angle set and coherence are compared with the family's
/// claimed values; otherwise those three only require at most two angles.
pub fn full_certificate(sys: &LineSystem) -> Result<Certificate> {
    sys.validate()?;
    let g = gram(sys)?;
    let n = sys.dim;
    let big_n = sys.len();
    let angles: Vec<Rational> = g.angle_set().into_iter().collect();
    let coherence = g.coherence()?;
    let claims = match (sys.family, sys.q) {
        (Some(f), Some(q)) => Some(family_claims(f, q)),
        _ => None,
    };

    let mut checks = Vec::new();
    match claims {
        Some((want_n, want_angle, want_dim)) => {
            checks.push(Check::new(
                "cardinality",
                big_n == want_n && n == want_dim,
                format!("N={big_n} dim={n}, expected N={want_n} dim={want_dim}"),
            ));
            let want = vec![rat(0), want_angle];
            checks.push(Check::new(
                "angle_set",
                angles == want,
                format!("squared angles {}, expected {}", fmt_set(&angles), fmt_set(&want)),
            ));
            checks.push(Check::new(
                "coherence",
                coherence == want_angle,
                format!("coherence^2={}, expected {}", ExactNumber::from(coherence), ExactNumber::from(want_angle)),
            ));
        }
        None => {
            checks.push(Check::pass("cardinality", format!("N={big_n} dim={n} (no family claim)")));
            checks.push(Check::new(
                "angle_set",
                angles.len() <= 2,
                format!("squared angles {} (at most two required)", fmt_set(&angles)),
            ));
            checks.push(Check::pass("coherence", format!("coherence^2={}", ExactNumber::from(coherence))));
        }
    }

    let bound = match angles.as_slice() {
        [a] => special_bound(sys.field, n, *a, *a),
        [a, b] => special_bound(sys.field, n, *a, *b),
        _ => None,
    };
    let equality = bound == Some(rat(big_n as i128));
    checks.push(Check::new(
        "special_bound_equality",
        equality,
        match bound {
            Some(b) => format!("bound={}, N={big_n}", ExactNumber::from(b)),
            None => "bound not applicable to this angle set".to_string(),
        },
    ));

    let (tight, a) = check_tight_frame(sys);
    checks.push(Check::new("tight_frame", tight, format!("frame constant N/n={}", ExactNumber::from(a))));
    let (design, lhs, rhs) = check_2design(sys, &g);
    checks.push(Check::new(
        "projective_2_design",
        design,
        format!("sum |<u,v>|^4 = {}, target {}", ExactNumber::from(lhs), ExactNumber::from(rhs)),
    ));
    let passed = checks.iter().all(|c| c.passed);

    let bases = if big_n % n == 0 && big_n > 0 {
        let r = check_unbiased_bases(sys, &g)?;
        Some(BasisSummary {
            count: r.bases.len().into(),
            basis_size: n.into(),
            complete: r.complete,
            used_backtracking: r.used_backtracking,
            unbiased: r.unbiased,
            weights: r.weights.iter().map(|(&s, &c)| [s.into(), c.into()]).collect(),
        })
    } else {
        None
    };

    let reciprocal = match (sys.field, angles.as_slice()) {
        (FieldTag::Real, [z, b]) if *z == rat(0) => Some(is_reciprocal_square(*b)),
        _ => None,
    };

    Ok(Certificate {
        field: sys.field,
        q: sys.q,
        family: sys.family,
        cardinality: big_n.into(),
        dim: n.into(),
        angle_set: angles.into_iter().map(Into::into).collect(),
        coherence_squared: coherence.into(),
        special_bound: bound.map(Into::into),
        special_bound_equality: equality,
        welch_bound_squared: welch_bound(n, big_n).ok().map(Into::into),
        tight_frame: tight,
        frame_constant: a.into(),
        design_lhs: lhs.into(),
        design_rhs: rhs.into(),
        projective_2_design: design,
        angle_is_reciprocal_integer: reciprocal,
        bases,
        checks,
        passed,
    })
}

impl Certificate {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn first_failure(&self) -> Option<&Check> {
        self.checks.iter().find(|c| !c.passed)
    }

    pub fn render_text(&self) -> String {
        let mut s = String::new();
        let family = self.family.map(|f| f.as_str()).unwrap_or("custom");
        let q = self.q.map(|q| q.to_string()).unwrap_or_else(|| "-".into());
        let field = match self.field {
            FieldTag::Real => "real",
            FieldTag::Complex => "complex",
        };
        let _ = writeln!(s, "family={family} q={q} field={field} N={} dim={}", self.cardinality, self.dim);
        for c in &self.checks {
            let _ = writeln!(s, "{c}");
        }
        if let Some(w) = self.welch_bound_squared {
            let _ = writeln!(s, "welch_bound^2={w} (context only)");
        }
        if let Some(r) = self.angle_is_reciprocal_integer {
            let _ = writeln!(s, "angle_is_reciprocal_integer={r}");
        }
        if let Some(b) = &self.bases {
            let weights: Vec<String> = b.weights.iter().map(|[w, c]| format!("{w}:{c}")).collect();
            let _ = writeln!(
                s,
                "bases={} of size {} complete={} unbiased={} backtracking={} weights={}",
                b.count,
                b.basis_size,
                b.complete,
                b.unbiased,
                b.used_backtracking,
                weights.join(",")
            );
        }
        let _ = writeln!(s, "overall={}", if self.passed { "PASS" } else { "FAIL" });
        s
    }
}
