//! The two line-system families, projective deduplication and exact Gram data.
//!
//! A [`LineSystem`] stores unit vectors as `Z[ζ₃]` numerators over one common
//! denominator. Inner products are then numerators over `den²` and squared
//! overlaps numerators over `den⁴`, so every comparison is integer arithmetic.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write as _;

use num_rational::Ratio;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::characters::CircleChar;
use crate::cyclotomic::Cyclo;
use crate::error::{Error, Result};
use crate::gf::{Field, FieldElement};
use crate::quad_ext::{QuadExt, RepStrategy};
use crate::repr::{regular_matrix, GroupElement, Representation};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FieldTag {
    Real,
    Complex,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Family {
    #[serde(rename = "even")]
    Even,
    #[serde(rename = "odd+")]
    OddPlus,
    #[serde(rename = "odd-")]
    OddMinus,
}

impl Family {
    pub fn as_str(self) -> &'static str {
        match self {
            Family::Even => "even",
            Family::OddPlus => "odd+",
            Family::OddMinus => "odd-",
        }
    }
}

/// Unit vectors `vectors[i][k] / den`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LineSystem {
    pub field: FieldTag,
    pub dim: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<Family>,
    pub den: i128,
    pub vectors: Vec<Vec<Cyclo>>,
}

impl LineSystem {
    /// Builds and validates a system.
    pub fn new(field: FieldTag, dim: usize, den: i128, vectors: Vec<Vec<Cyclo>>) -> Result<Self> {
        let sys = LineSystem { field, dim, q: None, family: None, den, vectors };
        sys.validate()?;
        Ok(sys)
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    /// Shape, unit norms, and for real systems real entries.
    pub fn validate(&self) -> Result<()> {
        if self.den <= 0 {
            return Err(Error::Format(format!("denominator must be positive, got {}", self.den)));
        }
        if self.dim == 0 {
            return Err(Error::Format("dimension must be positive".into()));
        }
        let den2 = self.den.checked_mul(self.den).ok_or_else(|| Error::Format("denominator too large".into()))?;
        for (i, v) in self.vectors.iter().enumerate() {
            if v.len() != self.dim {
                return Err(Error::Format(format!("vector {i} has length {}, expected {}", v.len(), self.dim)));
            }
            let mut norm: i128 = 0;
            for x in v {
                let m = x.checked_mag_sq().ok_or_else(|| Error::Format(format!("vector {i} entry too large")))?;
                norm = norm.checked_add(m).ok_or_else(|| Error::Format(format!("vector {i} norm overflows")))?;
            }
            if norm != den2 {
                return Err(Error::Invariant(format!("vector {i} has squared norm {norm}/{den2}, not 1")));
            }
            if self.field == FieldTag::Real && !v.iter().all(|x| x.is_real()) {
                return Err(Error::Invariant(format!("vector {i} of a real system has a non-real entry")));
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let sys: LineSystem = serde_json::from_str(s)?;
        sys.validate()?;
        Ok(sys)
    }

    /// Number of nonzero coordinates of each vector.
    pub fn supports(&self) -> Vec<usize> {
        self.vectors.iter().map(|v| v.iter().filter(|x| !x.is_zero()).count()).collect()
    }
}

/// Key identifying the line through `v`: `v_i · conj(v_f)` with `f` the first
/// nonzero coordinate. Two nonzero vectors of equal norm get the same key iff
/// one is a unit-modulus multiple of the other.
pub fn line_key(v: &[Cyclo]) -> Vec<Cyclo> {
    match v.iter().find(|x| !x.is_zero()) {
        None => vec![Cyclo::ZERO; v.len()],
        Some(&first) => {
            let c = first.conj();
            v.iter().map(|&x| x * c).collect()
        }
    }
}

/// Multiplies `v` by the sixth root of unity that puts its first nonzero
/// coordinate in the sector `0 <= arg < π/3`.
pub fn canonical_phase(v: &[Cyclo]) -> Vec<Cyclo> {
    match v.iter().find(|x| !x.is_zero()) {
        None => v.to_vec(),
        Some(&first) => {
            let u = Cyclo::root6(first.sector_normalize().1);
            v.iter().map(|&x| u * x).collect()
        }
    }
}

/// Keeps the first vector of every line, in input order, with canonical
/// phase. Inputs must share a norm. Returns the survivors and the number of
/// vectors dropped.
pub fn dedup_lines(vectors: Vec<Vec<Cyclo>>) -> (Vec<Vec<Cyclo>>, usize) {
    let total = vectors.len();
    let mut seen: HashMap<Vec<Cyclo>, ()> = HashMap::with_capacity(total);
    let mut out = Vec::new();
    for v in vectors {
        if seen.insert(line_key(&v), ()).is_none() {
            out.push(canonical_phase(&v));
        }
    }
    let removed = total - out.len();
    (out, removed)
}

fn even_field(q: u32) -> Result<Field> {
    let n = q.trailing_zeros();
    if q < 8 || !q.is_power_of_two() || n % 2 == 0 {
        return Err(Error::Unsupported(format!("the even family needs q = 2^(2k+1) with k >= 1 (8, 32, 128, ...), got q = {q}")));
    }
    Field::new(2, n)
}

fn odd_field(q: u32) -> Result<Field> {
    let mut n = 0;
    let mut m = q;
    while m > 1 && m % 3 == 0 {
        m /= 3;
        n += 1;
    }
    if m != 1 || n < 2 {
        return Err(Error::Unsupported(format!("the odd family needs q = 3^k with k >= 2 (9, 27, 81, ...), got q = {q}")));
    }
    Field::new(3, n)
}

/// The order-3 representation of `SL(2, F_q)` used by the even family.
pub fn even_representation(q: u32) -> Result<Representation> {
    Representation::standard(even_field(q)?)
}

/// The order-2 representation of `SL(2, F_q)` used by the odd family.
pub fn odd_representation(q: u32, theta: RepStrategy) -> Result<Representation> {
    let ext = QuadExt::new(odd_field(q)?)?;
    let pi = CircleChar::of_order(&ext, 2)?;
    Representation::new(ext, pi, theta)
}

/// The real family at `q = 2^(2k+1)`: the `q - 1` coordinate vectors followed
/// by `x ↦ χ(aN(x))·J_π(yx)` for `a ∈ F_q`, `y ∈ F_q^*`, with `π` of order 3.
/// Exactly `q² - 1` lines in dimension `q - 1`.
pub fn build_phi_even(q: u32) -> Result<LineSystem> {
    let rep = even_representation(q)?;
    let f = rep.field();
    let n = rep.dim();
    let qq = q as i128;
    let mut vectors = Vec::with_capacity(n * (q as usize + 1));
    for y in 0..n {
        let mut v = vec![Cyclo::ZERO; n];
        v[y] = Cyclo::int(qq);
        vectors.push(v);
    }
    for a in f.elements() {
        for y in f.nonzero() {
            let v = f
                .nonzero()
                .map(|x| rep.chi().eval(f.mul(a, f.mul(x, x))) * rep.table().numer_base(f.mul(y, x)))
                .collect();
            vectors.push(v);
        }
    }
    let (vectors, removed) = dedup_lines(vectors);
    let expected = (q as usize) * (q as usize) - 1;
    if vectors.len() != expected {
        return Err(Error::Invariant(format!("{} lines after removing {removed} duplicates, expected {expected}", vectors.len())));
    }
    let mut sys = LineSystem::new(FieldTag::Real, n, qq, vectors)?;
    sys.q = Some(q);
    sys.family = Some(Family::Even);
    Ok(sys)
}

/// Rows of `T_{g,π}` for `g` running over the cyclic subgroup
/// `{g_{t₀}^r : 0 <= r <= q}` generated by the unit-circle generator `t₀`.
pub fn even_rows_from_circle_orbit(q: u32) -> Result<Vec<Vec<Cyclo>>> {
    let rep = even_representation(q)?;
    let ext = rep.ext();
    let mut rows = Vec::new();
    for &t in ext.circle_powers() {
        let m = rep.even(&regular_matrix(ext, t)?)?;
        for i in 0..m.dim() {
            rows.push(m.row(i).to_vec());
        }
    }
    Ok(rows)
}

/// The generating set `{I} ∪ {[[0, -a⁻¹], [a, d]] : a ∈ F_q^*, d ∈ F_q}`,
/// identity first, then by `a`, then by `d`.
pub fn odd_generating_set(field: &Field) -> Vec<GroupElement> {
    let mut out = vec![GroupElement::identity()];
    for a in field.nonzero() {
        let b = field.neg(field.inv(a).expect("a ≠ 0"));
        for d in field.elements() {
            out.push(GroupElement { a: FieldElement::ZERO, b, c: a, d });
        }
    }
    out
}

/// All rows of `T_{g,π₂,θ}` over the generating set, deduplicated to
/// projective lines in `H(F_q^*)`.
pub fn odd_lines_full(rep: &Representation) -> Result<Vec<Vec<Cyclo>>> {
    let f = rep.field();
    let mut rows = Vec::new();
    for g in odd_generating_set(f) {
        let m = rep.reduced(&g);
        for i in 0..m.dim() {
            rows.push(m.row(i).to_vec());
        }
    }
    let (lines, _) = dedup_lines(rows);
    let q = f.order() as usize;
    if lines.len() != q * q - 1 {
        return Err(Error::Invariant(format!("{} lines, expected {}", lines.len(), q * q - 1)));
    }
    Ok(lines)
}

/// The complex family at `q = 3^k`, `k >= 2`: the `q² - 1` lines split into
/// the halves supported on `QR_q` and on `NQR_q`, each re-indexed to
/// dimension `(q - 1)/2`.
pub fn build_phi_odd(q: u32, theta: RepStrategy) -> Result<(LineSystem, LineSystem)> {
    let rep = odd_representation(q, theta)?;
    let lines = odd_lines_full(&rep)?;
    let (qr, nqr) = rep.qr_positions()?;
    let mut plus = Vec::new();
    let mut minus = Vec::new();
    for v in lines {
        let on_qr = nqr.iter().all(|&i| v[i].is_zero());
        let on_nqr = qr.iter().all(|&i| v[i].is_zero());
        match (on_qr, on_nqr) {
            (true, false) => plus.push(qr.iter().map(|&i| v[i]).collect::<Vec<_>>()),
            (false, true) => minus.push(nqr.iter().map(|&i| v[i]).collect::<Vec<_>>()),
            _ => return Err(Error::Invariant("a line is supported on both QR and NQR coordinates".into())),
        }
    }
    let half = (q as usize * q as usize - 1) / 2;
    if plus.len() != half || minus.len() != half {
        return Err(Error::Invariant(format!("halves of size {} and {}, expected {half}", plus.len(), minus.len())));
    }
    let dim = (q as usize - 1) / 2;
    let mut p = LineSystem::new(FieldTag::Complex, dim, q as i128, plus)?;
    p.q = Some(q);
    p.family = Some(Family::OddPlus);
    let mut m = LineSystem::new(FieldTag::Complex, dim, q as i128, minus)?;
    m.q = Some(q);
    m.family = Some(Family::OddMinus);
    Ok((p, m))
}

/// Squared overlaps `|⟨u, v⟩|² = values[i·N + j] / den4` of a system.
#[derive(Clone, Debug)]
pub struct GramData {
    n: usize,
    den4: i128,
    values: Vec<i128>,
}

/// `⟨u, v⟩ = Σ u_k conj(v_k)` on numerators.
pub fn inner(u: &[Cyclo], v: &[Cyclo]) -> Cyclo {
    u.iter().zip(v).filter(|(x, y)| !x.is_zero() && !y.is_zero()).map(|(&x, &y)| x * y.conj()).sum()
}

/// Exact Gram data; rows are computed in parallel.
pub fn gram(sys: &LineSystem) -> Result<GramData> {
    let n = sys.len();
    let den2 = sys.den * sys.den;
    let den4 = den2.checked_mul(den2).ok_or_else(|| Error::Unsupported("denominator too large for Gram data".into()))?;
    let rows: Vec<Vec<i128>> = (0..n)
        .into_par_iter()
        .map(|i| (i..n).map(|j| inner(&sys.vectors[i], &sys.vectors[j]).mag_sq()).collect())
        .collect();
    let mut values = vec![0i128; n * n];
    for (i, row) in rows.into_iter().enumerate() {
        for (off, m) in row.into_iter().enumerate() {
            let j = i + off;
            values[i * n + j] = m;
            values[j * n + i] = m;
        }
    }
    for i in 0..n {
        if values[i * n + i] != den4 {
            return Err(Error::Invariant(format!("vector {i} is not a unit vector")));
        }
    }
    Ok(GramData { n, den4, values })
}

impl GramData {
    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn den4(&self) -> i128 {
        self.den4
    }

    pub fn numer(&self, i: usize, j: usize) -> i128 {
        self.values[i * self.n + j]
    }

    pub fn get(&self, i: usize, j: usize) -> Ratio<i128> {
        Ratio::new(self.numer(i, j), self.den4)
    }

    /// Squared overlaps of distinct pairs with their multiplicities (unordered pairs).
    pub fn angle_multiset(&self) -> BTreeMap<Ratio<i128>, usize> {
        let mut counts: BTreeMap<i128, usize> = BTreeMap::new();
        for i in 0..self.n {
            for j in i + 1..self.n {
                *counts.entry(self.numer(i, j)).or_default() += 1;
            }
        }
        counts.into_iter().map(|(k, c)| (Ratio::new(k, self.den4), c)).collect()
    }

    /// Distinct squared overlaps of distinct pairs.
    pub fn angle_set(&self) -> BTreeSet<Ratio<i128>> {
        self.angle_multiset().into_keys().collect()
    }

    /// Squared coherence: the largest squared overlap of distinct lines.
    pub fn coherence(&self) -> Result<Ratio<i128>> {
        if self.n < 2 {
            return Err(Error::Domain("coherence needs at least two lines".into()));
        }
        let mut best = 0;
        for i in 0..self.n {
            for j in i + 1..self.n {
                best = best.max(self.numer(i, j));
            }
        }
        Ok(Ratio::new(best, self.den4))
    }

    /// `Σ_{i,j} |⟨u_i, u_j⟩|⁴` over all ordered pairs, diagonal included.
    pub fn fourth_moment(&self) -> Ratio<i128> {
        let s: i128 = self.values.iter().map(|&m| m * m).sum();
        Ratio::new(s, self.den4 * self.den4)
    }

    /// `row,col,num,den` for `row <= col`, with each fraction in lowest terms.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("row,col,num,den\n");
        for i in 0..self.n {
            for j in i..self.n {
                let r = self.get(i, j);
                let _ = writeln!(out, "{i},{j},{},{}", r.numer(), r.denom());
            }
        }
        out
    }
}
