//! Matrices of the representations of `SL(2, F_q)`: the `q²`-dimensional
//! `T_g` on functions of `L`, the rotations `R_t`, the `(q-1)`-dimensional
//! reductions to a nontrivial circle character, and the two blocks of the
//! order-2 reduction for odd `q`.
//!
//! Rows are indexed by `v`, columns by `u`, both in the fixed enumeration
//! order of `L` (full matrices) or of `F_q^*` (reduced matrices, row `i` is
//! the element with index `i + 1`).

use rand::Rng;
use serde::Serialize;

use crate::characters::{AdditiveChar, BesselTable, CircleChar};
use crate::cyclotomic::{Cyclo, ScaledCyclo};
use crate::error::{Error, Result};
use crate::gf::{Field, FieldElement};
use crate::quad_ext::{CircleRepSystem, ExtElement, QuadExt, RepStrategy};

/// Largest `q` for which the full `q² × q²` matrices are built.
pub const FULL_MATRIX_MAX_ORDER: u32 = 32;

/// `[[a, b], [c, d]]` with `ad - bc = 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct GroupElement {
    pub a: FieldElement,
    pub b: FieldElement,
    pub c: FieldElement,
    pub d: FieldElement,
}

impl GroupElement {
    pub fn new(field: &Field, a: FieldElement, b: FieldElement, c: FieldElement, d: FieldElement) -> Result<Self> {
        if field.sub(field.mul(a, d), field.mul(b, c)) != FieldElement::ONE {
            return Err(Error::Domain("matrix does not have determinant 1".into()));
        }
        Ok(GroupElement { a, b, c, d })
    }

    pub fn identity() -> Self {
        GroupElement { a: FieldElement::ONE, b: FieldElement::ZERO, c: FieldElement::ZERO, d: FieldElement::ONE }
    }

    /// Upper triangular (the Borel subgroup `B`).
    pub fn in_b(&self) -> bool {
        self.c.is_zero()
    }

    pub fn mul(&self, field: &Field, o: &GroupElement) -> GroupElement {
        let f = field;
        GroupElement {
            a: f.add(f.mul(self.a, o.a), f.mul(self.b, o.c)),
            b: f.add(f.mul(self.a, o.b), f.mul(self.b, o.d)),
            c: f.add(f.mul(self.c, o.a), f.mul(self.d, o.c)),
            d: f.add(f.mul(self.c, o.b), f.mul(self.d, o.d)),
        }
    }

    pub fn inv(&self, field: &Field) -> GroupElement {
        GroupElement { a: self.d, b: field.neg(self.b), c: field.neg(self.c), d: self.a }
    }

    /// Uniform over the group: a uniform nonzero first row, then a uniform
    /// point on the line of second rows completing it.
    pub fn random<R: Rng + ?Sized>(field: &Field, rng: &mut R) -> GroupElement {
        let f = field;
        let (a, b) = loop {
            let (a, b) = (f.random(rng), f.random(rng));
            if !(a.is_zero() && b.is_zero()) {
                break (a, b);
            }
        };
        if !a.is_zero() {
            let c = f.random(rng);
            let d = f.div(f.add(FieldElement::ONE, f.mul(b, c)), a).expect("a ≠ 0");
            GroupElement { a, b, c, d }
        } else {
            let d = f.random(rng);
            let c = f.neg(f.inv(b).expect("b ≠ 0"));
            GroupElement { a, b, c, d }
        }
    }

    /// Every element of `SL(2, F_q)`, in lexicographic index order.
    pub fn enumerate(field: &Field) -> Vec<GroupElement> {
        let mut out = Vec::new();
        for a in field.elements() {
            for b in field.elements() {
                for c in field.elements() {
                    for d in field.elements() {
                        if let Ok(g) = GroupElement::new(field, a, b, c, d) {
                            out.push(g);
                        }
                    }
                }
            }
        }
        out
    }

    /// `[[a, b], [c, d]]` as element indices.
    pub fn to_indices(&self) -> [[u32; 2]; 2] {
        [[self.a.0, self.b.0], [self.c.0, self.d.0]]
    }
}

/// `g_z = [[x, s·y], [y, x + y]]` for `z = x + yρ` (even `q`): the image of
/// `z` under the regular representation of `L^*` in `GL(2, F_q)`. It lies in
/// `SL(2, F_q)` iff `N(z) = 1`.
pub fn regular_matrix(ext: &QuadExt, z: ExtElement) -> Result<GroupElement> {
    let f = ext.base();
    if !f.is_even() {
        return Err(Error::Unsupported("the regular matrix is written for even q".into()));
    }
    GroupElement::new(f, z.x, f.mul(ext.s(), z.y), z.y, f.add(z.x, z.y))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    Full,
    Rotation,
    Reduced,
    Even,
    Plus,
    Minus,
    Product,
}

/// Square matrix of `Z[ζ₃]` numerators over one positive denominator.
#[derive(Clone, Debug)]
pub struct ReprMatrix {
    pub variant: Variant,
    pub g: Option<GroupElement>,
    dim: usize,
    den: i128,
    entries: Vec<Cyclo>,
}

#[derive(Serialize)]
struct ReprMatrixJson {
    g: Option<[[u32; 2]; 2]>,
    variant: Variant,
    entries: Vec<Vec<ScaledCyclo>>,
}

impl ReprMatrix {
    pub fn from_entries(variant: Variant, g: Option<GroupElement>, dim: usize, den: i128, entries: Vec<Cyclo>) -> Self {
        assert_eq!(entries.len(), dim * dim);
        assert!(den > 0);
        ReprMatrix { variant, g, dim, den, entries }
    }

    pub fn identity(dim: usize) -> Self {
        let mut entries = vec![Cyclo::ZERO; dim * dim];
        for i in 0..dim {
            entries[i * dim + i] = Cyclo::ONE;
        }
        ReprMatrix::from_entries(Variant::Product, None, dim, 1, entries)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn den(&self) -> i128 {
        self.den
    }

    pub fn numer(&self, row: usize, col: usize) -> Cyclo {
        self.entries[row * self.dim + col]
    }

    pub fn get(&self, row: usize, col: usize) -> ScaledCyclo {
        ScaledCyclo::new(self.numer(row, col), self.den)
    }

    pub fn row(&self, row: usize) -> &[Cyclo] {
        &self.entries[row * self.dim..(row + 1) * self.dim]
    }

    /// Divide numerators and denominator by their common content.
    fn reduce(mut self) -> Self {
        let mut g = self.den;
        for e in &self.entries {
            g = num_integer::gcd(g, num_integer::gcd(e.a, e.b));
            if g == 1 {
                return self;
            }
        }
        if g > 1 {
            self.den /= g;
            for e in &mut self.entries {
                *e = Cyclo::new(e.a / g, e.b / g);
            }
        }
        self
    }

    pub fn mul(&self, other: &ReprMatrix) -> ReprMatrix {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        let n = self.dim;
        let mut out = vec![Cyclo::ZERO; n * n];
        for i in 0..n {
            let orow = &mut out[i * n..(i + 1) * n];
            for k in 0..n {
                let x = self.entries[i * n + k];
                if x.is_zero() {
                    continue;
                }
                for (o, &y) in orow.iter_mut().zip(other.row(k)) {
                    if !y.is_zero() {
                        *o += x * y;
                    }
                }
            }
        }
        ReprMatrix::from_entries(Variant::Product, None, n, self.den * other.den, out).reduce()
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> ReprMatrix {
        let n = self.dim;
        let mut out = vec![Cyclo::ZERO; n * n];
        for i in 0..n {
            for j in 0..n {
                out[j * n + i] = self.entries[i * n + j].conj();
            }
        }
        ReprMatrix::from_entries(self.variant, None, n, self.den, out)
    }

    pub fn is_identity(&self) -> bool {
        let n = self.dim;
        (0..n).all(|i| {
            (0..n).all(|j| {
                let e = self.entries[i * n + j];
                if i == j {
                    e == Cyclo::int(self.den)
                } else {
                    e.is_zero()
                }
            })
        })
    }

    /// `M·M* = I`, exactly.
    pub fn is_unitary(&self) -> bool {
        self.mul(&self.adjoint()).is_identity()
    }

    /// The principal submatrix on the given index list, in the given order.
    pub fn submatrix(&self, idx: &[usize], variant: Variant) -> ReprMatrix {
        let m = idx.len();
        let mut out = Vec::with_capacity(m * m);
        for &i in idx {
            for &j in idx {
                out.push(self.numer(i, j));
            }
        }
        ReprMatrix::from_entries(variant, self.g, m, self.den, out)
    }

    pub fn to_json(&self) -> Result<String> {
        let n = self.dim;
        let j = ReprMatrixJson {
            g: self.g.map(|g| g.to_indices()),
            variant: self.variant,
            entries: (0..n).map(|i| (0..n).map(|k| self.get(i, k)).collect()).collect(),
        };
        Ok(serde_json::to_string(&j)?)
    }
}

impl PartialEq for ReprMatrix {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim
            && self
                .entries
                .iter()
                .zip(&other.entries)
                .all(|(x, y)| x.scale(other.den) == y.scale(self.den))
    }
}

/// `T_g` on `H(L)`:
/// `-(1/q)·χ((aN(v) + dN(u) - S(u σ(v)))/c)` off `B`, `χ(abN(v))·δ(u - va)` on `B`.
pub fn t_full(ext: &QuadExt, chi: &AdditiveChar, g: &GroupElement) -> Result<ReprMatrix> {
    let f = ext.base();
    if f.order() > FULL_MATRIX_MAX_ORDER {
        return Err(Error::Unsupported(format!(
            "full matrices are capped at q ≤ {FULL_MATRIX_MAX_ORDER}, got q = {}",
            f.order()
        )));
    }
    let q = f.order() as i128;
    let n = ext.order() as usize;
    let mut entries = vec![Cyclo::ZERO; n * n];
    if g.in_b() {
        let ab = f.mul(g.a, g.b);
        for v in ext.elements() {
            let u = ext.scale(g.a, v);
            entries[ext.index(v) * n + ext.index(u)] = chi.eval(f.mul(ab, ext.norm(v))).scale(q);
        }
    } else {
        let cinv = f.inv(g.c)?;
        for v in ext.elements() {
            let av = f.mul(g.a, ext.norm(v));
            let sv = ext.sigma(v);
            let row = ext.index(v) * n;
            for u in ext.elements() {
                let arg = f.sub(f.add(av, f.mul(g.d, ext.norm(u))), ext.rel_trace(ext.mul(u, sv)));
                entries[row + ext.index(u)] = -chi.eval(f.mul(arg, cinv));
            }
        }
    }
    Ok(ReprMatrix::from_entries(Variant::Full, Some(*g), n, q, entries))
}

/// `R_t f(u) = f(tu)` as a permutation matrix on `H(L)`.
pub fn r_op(ext: &QuadExt, t: ExtElement) -> Result<ReprMatrix> {
    if ext.norm(t) != FieldElement::ONE {
        return Err(Error::Domain("R_t needs N(t) = 1".into()));
    }
    if ext.base().order() > FULL_MATRIX_MAX_ORDER {
        return Err(Error::Unsupported(format!("full matrices are capped at q ≤ {FULL_MATRIX_MAX_ORDER}")));
    }
    let n = ext.order() as usize;
    let mut entries = vec![Cyclo::ZERO; n * n];
    for u in ext.elements() {
        entries[ext.index(u) * n + ext.index(ext.mul(t, u))] = Cyclo::ONE;
    }
    Ok(ReprMatrix::from_entries(Variant::Rotation, None, n, 1, entries))
}

/// The data fixing one `(q - 1)`-dimensional representation: the extension,
/// the additive character, a nontrivial circle character `π`, its Bessel
/// table and a system `θ` of circle representatives.
pub struct Representation {
    ext: QuadExt,
    chi: AdditiveChar,
    pi: CircleChar,
    table: BesselTable,
    theta: CircleRepSystem,
}

impl Representation {
    pub fn new(ext: QuadExt, pi: CircleChar, strategy: RepStrategy) -> Result<Self> {
        let theta = ext.representatives(strategy)?;
        Self::with_theta(ext, pi, theta)
    }

    pub fn with_theta(ext: QuadExt, pi: CircleChar, theta: CircleRepSystem) -> Result<Self> {
        let chi = AdditiveChar::new(ext.base())?;
        let table = BesselTable::build(&ext, &chi, pi)?;
        Ok(Representation { ext, chi, pi, table, theta })
    }

    /// Order-3 character for even `q`, order 2 for odd `q`, default `θ`.
    pub fn standard(field: Field) -> Result<Self> {
        let even = field.is_even();
        let ext = QuadExt::new(field)?;
        let pi = CircleChar::of_order(&ext, if even { 3 } else { 2 })?;
        Self::new(ext, pi, RepStrategy::default_for(even))
    }

    pub fn ext(&self) -> &QuadExt {
        &self.ext
    }

    pub fn field(&self) -> &Field {
        self.ext.base()
    }

    pub fn chi(&self) -> &AdditiveChar {
        &self.chi
    }

    pub fn pi(&self) -> CircleChar {
        self.pi
    }

    pub fn table(&self) -> &BesselTable {
        &self.table
    }

    pub fn theta(&self) -> &CircleRepSystem {
        &self.theta
    }

    pub fn dim(&self) -> usize {
        self.field().order() as usize - 1
    }

    /// `T_{g,π,θ}`: `-χ((av + du)/c)·J_π(x_u σ(x_v)/c)` off `B`,
    /// `π(a x_v / x_u)·χ(abv)·δ(u - a²v)` on `B`. Denominator `q`.
    pub fn reduced(&self, g: &GroupElement) -> ReprMatrix {
        let f = self.field();
        let ext = &self.ext;
        let q = f.order() as i128;
        let n = self.dim();
        let mut entries = vec![Cyclo::ZERO; n * n];
        if g.in_b() {
            let a2 = f.mul(g.a, g.a);
            let ab = f.mul(g.a, g.b);
            for v in f.nonzero() {
                let u = f.mul(a2, v);
                let xv = self.theta.get(v);
                let xu = self.theta.get(u);
                let t = ext.div(ext.scale(g.a, xv), xu).expect("x_u ≠ 0");
                entries[(v.index() - 1) * n + u.index() - 1] =
                    (self.pi.eval(ext, t) * self.chi.eval(f.mul(ab, v))).scale(q);
            }
        } else {
            let cinv = f.inv(g.c).expect("c ≠ 0 off B");
            for v in f.nonzero() {
                let sxv = ext.sigma(self.theta.get(v));
                let av = f.mul(g.a, v);
                let row = (v.index() - 1) * n;
                for u in f.nonzero() {
                    let phase = self.chi.eval(f.mul(f.add(av, f.mul(g.d, u)), cinv));
                    let z = ext.scale(cinv, ext.mul(self.theta.get(u), sxv));
                    entries[row + u.index() - 1] = -(phase * self.table.numer(ext, z));
                }
            }
        }
        ReprMatrix::from_entries(Variant::Reduced, Some(*g), n, q, entries)
    }

    /// `T_{g,π}` for even `q`: `-χ((aN(v) + dN(u))/c)·J_π(vu/c)` off `B`,
    /// `π(av/u)·χ(abN(v))·δ(N(u) - a²N(v))` on `B`. Denominator `q`.
    pub fn even(&self, g: &GroupElement) -> Result<ReprMatrix> {
        let f = self.field();
        if !f.is_even() {
            return Err(Error::Unsupported("T_{g,π} without square roots needs even q".into()));
        }
        let ext = &self.ext;
        let q = f.order() as i128;
        let n = self.dim();
        let mut entries = vec![Cyclo::ZERO; n * n];
        if g.in_b() {
            let ab = f.mul(g.a, g.b);
            for v in f.nonzero() {
                // N(u) = a²N(v) has the single solution u = av in F_q
                let u = f.mul(g.a, v);
                let t = ExtElement::from_base(f.div(f.mul(g.a, v), u)?);
                entries[(v.index() - 1) * n + u.index() - 1] =
                    (self.pi.eval(ext, t) * self.chi.eval(f.mul(ab, f.mul(v, v)))).scale(q);
            }
        } else {
            let cinv = f.inv(g.c)?;
            for v in f.nonzero() {
                let av = f.mul(g.a, f.mul(v, v));
                let row = (v.index() - 1) * n;
                for u in f.nonzero() {
                    let phase = self.chi.eval(f.mul(f.add(av, f.mul(g.d, f.mul(u, u))), cinv));
                    let j = self.table.numer_base(f.mul(f.mul(v, u), cinv));
                    entries[row + u.index() - 1] = -(phase * j);
                }
            }
        }
        Ok(ReprMatrix::from_entries(Variant::Even, Some(*g), n, q, entries))
    }

    /// Row/column positions of `QR_q` and `NQR_q` inside `F_q^*` ordering.
    pub fn qr_positions(&self) -> Result<(Vec<usize>, Vec<usize>)> {
        let (qr, nqr) = self.field().qr_partition()?;
        Ok((qr.iter().map(|x| x.index() - 1).collect(), nqr.iter().map(|x| x.index() - 1).collect()))
    }

    /// Splits `T_{g,π₂,θ}` into its `QR × QR` and `NQR × NQR` blocks after
    /// checking that every mixed entry vanishes.
    pub fn pi2_blocks(&self, g: &GroupElement) -> Result<(ReprMatrix, ReprMatrix)> {
        let f = self.field();
        if f.is_even() || self.pi.order() != 2 {
            return Err(Error::Unsupported("the block split needs odd q and the order-2 character".into()));
        }
        let t = self.reduced(g);
        let (qr, nqr) = self.qr_positions()?;
        for &i in &qr {
            for &j in &nqr {
                if !t.numer(i, j).is_zero() || !t.numer(j, i).is_zero() {
                    return Err(Error::Invariant(format!(
                        "mixed QR/NQR entry ({i}, {j}) of T_g does not vanish for g = {:?}",
                        g.to_indices()
                    )));
                }
            }
        }
        Ok((t.submatrix(&qr, Variant::Plus), t.submatrix(&nqr, Variant::Minus)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rep(p: u32, n: u32) -> Representation {
        Representation::standard(Field::new(p, n).unwrap()).unwrap()
    }

    #[test]
    fn group_basics() {
        let f = Field::new(3, 1).unwrap();
        let all = GroupElement::enumerate(&f);
        assert_eq!(all.len(), 24);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let f8 = Field::new(2, 3).unwrap();
        for _ in 0..50 {
            let g = GroupElement::random(&f8, &mut rng);
            let h = GroupElement::random(&f8, &mut rng);
            assert_eq!(g.mul(&f8, &g.inv(&f8)), GroupElement::identity());
            let gh = g.mul(&f8, &h);
            assert!(GroupElement::new(&f8, gh.a, gh.b, gh.c, gh.d).is_ok());
        }
        let x = f8.generator();
        let b1 = GroupElement::new(&f8, x, x, FieldElement::ZERO, f8.inv(x).unwrap()).unwrap();
        assert!(b1.mul(&f8, &b1).in_b());
        assert!(GroupElement::new(&f8, x, x, x, x).is_err());
    }

    #[test]
    fn random_is_roughly_uniform() {
        let f = Field::new(3, 1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut counts = std::collections::HashMap::new();
        for _ in 0..24_000 {
            *counts.entry(GroupElement::random(&f, &mut rng)).or_insert(0) += 1;
        }
        assert_eq!(counts.len(), 24);
        assert!(counts.values().all(|&c| (800..1200).contains(&c)), "{counts:?}");
    }

    #[test]
    fn full_matrices_q8() {
        let ext = QuadExt::new(Field::new(2, 3).unwrap()).unwrap();
        let chi = AdditiveChar::new(ext.base()).unwrap();
        let f = ext.base();
        let id = t_full(&ext, &chi, &GroupElement::identity()).unwrap();
        assert!(id.is_identity());
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..10 {
            let g1 = GroupElement::random(f, &mut rng);
            let g2 = GroupElement::random(f, &mut rng);
            let t1 = t_full(&ext, &chi, &g1).unwrap();
            let t2 = t_full(&ext, &chi, &g2).unwrap();
            assert!(t1.is_unitary());
            assert_eq!(t1.mul(&t2), t_full(&ext, &chi, &g1.mul(f, &g2)).unwrap());
        }
        let g = GroupElement::random(f, &mut rng);
        let tg = t_full(&ext, &chi, &g).unwrap();
        for &t in ext.circle_powers() {
            let r = r_op(&ext, t).unwrap();
            assert_eq!(r.mul(&tg), tg.mul(&r));
        }
        assert!(r_op(&ext, ExtElement::ONE).unwrap().is_identity());
        let t0 = ext.circle_generator();
        let t1 = ext.mul(t0, t0);
        assert_eq!(r_op(&ext, t0).unwrap().mul(&r_op(&ext, t1).unwrap()), r_op(&ext, ext.mul(t0, t1)).unwrap());
        let off = ext.elements().find(|&z| ext.norm(z) != FieldElement::ONE).unwrap();
        assert!(r_op(&ext, off).is_err());
    }

    #[test]
    fn full_matrices_q3() {
        let ext = QuadExt::new(Field::new(3, 1).unwrap()).unwrap();
        let chi = AdditiveChar::new(ext.base()).unwrap();
        let f = ext.base();
        let all = GroupElement::enumerate(f);
        let mats: Vec<_> = all.iter().map(|g| t_full(&ext, &chi, g).unwrap()).collect();
        for (i, g1) in all.iter().enumerate() {
            assert!(mats[i].is_unitary());
            for (j, g2) in all.iter().enumerate() {
                let k = all.iter().position(|h| *h == g1.mul(f, g2)).unwrap();
                assert_eq!(mats[i].mul(&mats[j]), mats[k]);
            }
        }
        assert!(t_full(&QuadExt::new(Field::new(2, 6).unwrap()).unwrap(), &AdditiveChar::new(&Field::new(2, 6).unwrap()).unwrap(), &GroupElement::identity()).is_err());
    }

    fn check_reduced_law(r: &Representation, pairs: usize, seed: u64) {
        let f = r.field();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        assert!(r.reduced(&GroupElement::identity()).is_identity());
        for _ in 0..pairs {
            let g1 = GroupElement::random(f, &mut rng);
            let g2 = GroupElement::random(f, &mut rng);
            let t1 = r.reduced(&g1);
            assert!(t1.is_unitary());
            assert_eq!(t1.mul(&r.reduced(&g2)), r.reduced(&g1.mul(f, &g2)));
        }
    }

    #[test]
    fn reduced_homomorphism() {
        check_reduced_law(&rep(2, 3), 50, 3);
        check_reduced_law(&rep(3, 2), 50, 4);
        let ext = QuadExt::new(Field::new(2, 3).unwrap()).unwrap();
        let pi = CircleChar::of_order(&ext, 3).unwrap();
        check_reduced_law(&Representation::new(ext, pi, RepStrategy::First).unwrap(), 20, 5);
    }

    fn check_theta_covariance(p: u32, n: u32, m: u32) {
        let f = Field::new(p, n).unwrap();
        let ext1 = QuadExt::new(Field::new(p, n).unwrap()).unwrap();
        let pi = CircleChar::of_order(&ext1, m).unwrap();
        let r1 = Representation::new(ext1, pi, RepStrategy::First).unwrap();
        let ext = QuadExt::new(Field::new(p, n).unwrap()).unwrap();
        let t = ext.circle_generator();
        let mut reps = vec![ExtElement::ZERO; f.order() as usize];
        for d in f.nonzero() {
            reps[d.index()] = ext.mul(r1.theta().get(d), ext.pow(t, d.0 as u64));
        }
        let theta2 = CircleRepSystem::from_reps(&ext, RepStrategy::First, reps).unwrap();
        let r2 = Representation::with_theta(ext, pi, theta2).unwrap();
        let e = r1.ext();
        let shift = |x: FieldElement| pi.eval(e, e.div(r2.theta().get(x), r1.theta().get(x)).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..20 {
            let g = GroupElement::random(&f, &mut rng);
            let (m1, m2) = (r1.reduced(&g), r2.reduced(&g));
            for v in f.nonzero() {
                for u in f.nonzero() {
                    let (i, j) = (v.index() - 1, u.index() - 1);
                    assert_eq!(m2.numer(i, j), m1.numer(i, j) * shift(v) * shift(u).conj());
                }
            }
        }
    }

    #[test]
    fn theta_covariance() {
        check_theta_covariance(3, 2, 2);
        check_theta_covariance(2, 3, 3);
    }

    #[test]
    fn even_variant_matches_reduced() {
        let r = rep(2, 3);
        let f = r.field();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..50 {
            let g = GroupElement::random(f, &mut rng);
            let te = r.even(&g).unwrap();
            let tr = r.reduced(&g);
            for v in f.nonzero() {
                for u in f.nonzero() {
                    let (nv, nu) = (f.mul(v, v), f.mul(u, u));
                    assert_eq!(te.numer(v.index() - 1, u.index() - 1), tr.numer(nv.index() - 1, nu.index() - 1));
                }
            }
            let g2 = GroupElement::random(f, &mut rng);
            assert_eq!(te.mul(&r.even(&g2).unwrap()), r.even(&g.mul(f, &g2)).unwrap());
            for i in 0..7 {
                for j in 0..7 {
                    assert!([0, 16].contains(&te.numer(i, j).mag_sq()) || g.in_b());
                }
            }
        }
        assert!(rep(3, 2).even(&GroupElement::identity()).is_err());
    }

    #[test]
    fn blocks_q9() {
        let r = rep(3, 2);
        let f = r.field();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..50 {
            let g1 = GroupElement::random(f, &mut rng);
            let g2 = GroupElement::random(f, &mut rng);
            let (p1, m1) = r.pi2_blocks(&g1).unwrap();
            let (p2, m2) = r.pi2_blocks(&g2).unwrap();
            let (p12, m12) = r.pi2_blocks(&g1.mul(f, &g2)).unwrap();
            assert_eq!(p1.dim(), 4);
            assert!(p1.is_unitary() && m1.is_unitary());
            assert_eq!(p1.mul(&p2), p12);
            assert_eq!(m1.mul(&m2), m12);
        }
        assert!(rep(2, 3).pi2_blocks(&GroupElement::identity()).is_err());
    }

    #[test]
    fn json_export() {
        let r = rep(2, 3);
        let m = r.even(&GroupElement::identity()).unwrap();
        let v: serde_json::Value = serde_json::from_str(&m.to_json().unwrap()).unwrap();
        assert_eq!(v["variant"], "even");
        assert_eq!(v["g"], serde_json::json!([[1, 0], [0, 1]]));
        assert_eq!(v["entries"][0][0], serde_json::json!({"a": 8, "b": 0, "den": 8}));
    }
}
