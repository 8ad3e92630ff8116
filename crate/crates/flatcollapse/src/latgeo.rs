//! Lattice geometry over exact scalars: Gram forms, rational and algebraic
//! subspaces, sublattices of Q^n with Hermite bases, orthogonal projections
//! of lattices, saturation, and the rational closure of an algebraic
//! subspace together with an adapted integral basis.

use crate::ratcore::matq::{
    kernel_of_rows, rref_in_place, vq_is_zero, MatQ, VecQ,
};
use crate::ratcore::matz::{hnf, inverse_unimodular, snf, MatZ};
use crate::ratcore::numfield::{nf_components, NFElem, NumberField};
use crate::ratcore::rat::Rat;
use crate::{Error, Result};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use std::sync::Arc;

/// Positive definite symmetric bilinear form on lattice coordinates.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct GramForm {
    mat: MatQ,
}

impl GramForm {
    pub fn new(mat: MatQ) -> Result<Self> {
        if mat.nrows != mat.ncols {
            return Err(Error::Validation("Gram matrix must be square".into()));
        }
        if !mat.is_positive_definite() {
            return Err(Error::Validation(
                "Gram matrix must be symmetric positive definite".into(),
            ));
        }
        Ok(GramForm { mat })
    }

    pub fn identity(n: usize) -> Self {
        GramForm {
            mat: MatQ::identity(n),
        }
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows
    }

    pub fn mat(&self) -> &MatQ {
        &self.mat
    }

    pub fn inner(&self, a: &[Rat], b: &[Rat]) -> Rat {
        let gb = self.mat.mat_vec(b);
        a.iter().zip(&gb).map(|(x, y)| x * y).sum()
    }

    pub fn quad(&self, a: &[Rat]) -> Rat {
        self.inner(a, a)
    }
}

/// Rational linear subspace of Q^n, stored with a reduced row echelon
/// basis so equality is equality of subspaces.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RatSubspace {
    pub ambient: usize,
    basis: Vec<VecQ>,
}

impl RatSubspace {
    pub fn from_generators(ambient: usize, gens: Vec<VecQ>) -> Self {
        assert!(gens.iter().all(|v| v.len() == ambient));
        let mut rows = gens;
        rref_in_place(&mut rows);
        rows.retain(|r| !vq_is_zero(r));
        RatSubspace { ambient, basis: rows }
    }

    pub fn zero(ambient: usize) -> Self {
        RatSubspace {
            ambient,
            basis: vec![],
        }
    }

    pub fn full(ambient: usize) -> Self {
        Self::from_generators(ambient, MatQ::identity(ambient).rows_vec())
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[VecQ] {
        &self.basis
    }

    pub fn is_zero(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.dim() == self.ambient
    }

    pub fn contains(&self, v: &[Rat]) -> bool {
        assert_eq!(v.len(), self.ambient);
        if vq_is_zero(v) {
            return true;
        }
        if self.is_zero() {
            return false;
        }
        MatQ::from_rows(self.basis.clone())
            .transpose()
            .solve(v)
            .is_some()
    }

    pub fn is_subspace_of(&self, other: &RatSubspace) -> bool {
        self.basis.iter().all(|b| other.contains(b))
    }

    pub fn sum(&self, other: &RatSubspace) -> RatSubspace {
        assert_eq!(self.ambient, other.ambient);
        let mut gens = self.basis.clone();
        gens.extend(other.basis.clone());
        Self::from_generators(self.ambient, gens)
    }

    /// Basis of { phi : phi . w = 0 for all w in self }.
    pub fn annihilator(&self) -> Vec<VecQ> {
        if self.is_zero() {
            return MatQ::identity(self.ambient).rows_vec();
        }
        kernel_of_rows(&self.basis, self.ambient, &Rat::zero())
    }

    pub fn intersect(&self, other: &RatSubspace) -> RatSubspace {
        assert_eq!(self.ambient, other.ambient);
        let mut ann = self.annihilator();
        ann.extend(other.annihilator());
        let ker = kernel_of_rows(&ann, self.ambient, &Rat::zero());
        Self::from_generators(self.ambient, ker)
    }

    /// Orthogonal complement with respect to the Gram form.
    pub fn gram_orthocomplement(&self, g: &GramForm) -> RatSubspace {
        assert_eq!(self.ambient, g.dim());
        if self.is_zero() {
            return Self::full(self.ambient);
        }
        let bg = MatQ::from_rows(self.basis.clone()).mul(g.mat());
        Self::from_generators(self.ambient, bg.kernel())
    }

    /// Matrix of the G-orthogonal projection onto this subspace.
    pub fn gram_projector(&self, g: &GramForm) -> MatQ {
        let n = self.ambient;
        assert_eq!(n, g.dim());
        if self.is_zero() {
            return MatQ::zeros(n, n);
        }
        let b = MatQ::from_rows(self.basis.clone()); // k x n
        let bt = b.transpose(); // n x k
        let gram = b.mul(g.mat()).mul(&bt); // k x k, invertible
        let inv = gram.inverse().expect("independent basis has invertible Gram");
        bt.mul(&inv).mul(&b).mul(g.mat())
    }

    /// Matrix of A restricted to this subspace in its basis coordinates,
    /// or None when the subspace is not invariant.
    pub fn restriction_matrix(&self, a: &MatQ) -> Option<MatQ> {
        let k = self.dim();
        let bt = MatQ::from_rows(self.basis.clone()).transpose();
        let mut cols: Vec<VecQ> = Vec::with_capacity(k);
        for bv in &self.basis {
            let img = a.mat_vec(bv);
            cols.push(bt.solve(&img)?);
        }
        // cols[i] are coordinates of A b_i
        let mut m = MatQ::zeros(k, k);
        for (i, c) in cols.iter().enumerate() {
            for j in 0..k {
                m.set(j, i, c[j].clone());
            }
        }
        Some(m)
    }

    pub fn is_invariant_under(&self, a: &MatQ) -> bool {
        self.restriction_matrix(a).is_some()
    }
}

/// Discrete subgroup of Q^n: integer Hermite basis divided by one positive
/// denominator, jointly reduced.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Sublattice {
    pub ambient: usize,
    mat: MatZ,
    den: BigInt,
}

impl Sublattice {
    pub fn zero(ambient: usize) -> Self {
        Sublattice {
            ambient,
            mat: MatZ::zeros(0, ambient),
            den: BigInt::one(),
        }
    }

    pub fn standard(ambient: usize) -> Self {
        Sublattice {
            ambient,
            mat: MatZ::identity(ambient),
            den: BigInt::one(),
        }
    }

    pub fn rank(&self) -> usize {
        self.mat.nrows
    }

    pub fn hermite_mat(&self) -> &MatZ {
        &self.mat
    }

    pub fn denominator(&self) -> &BigInt {
        &self.den
    }

    pub fn basis_vectors(&self) -> Vec<VecQ> {
        (0..self.rank())
            .map(|i| {
                self.mat
                    .row(i)
                    .iter()
                    .map(|e| Rat::new(e.clone(), self.den.clone()))
                    .collect()
            })
            .collect()
    }

    /// Integer coordinates of t in the Hermite basis, or None.
    pub fn membership(&self, t: &[Rat]) -> Option<Vec<BigInt>> {
        assert_eq!(t.len(), self.ambient);
        // solve c * mat = den * t by forward substitution on pivots
        let mut rhs: Vec<BigInt> = Vec::with_capacity(self.ambient);
        for x in t {
            let scaled = x * Rat::from_integer(self.den.clone());
            if !scaled.is_integer() {
                return None;
            }
            rhs.push(scaled.to_integer());
        }
        let r = self.rank();
        let mut c = vec![BigInt::zero(); r];
        for i in 0..r {
            let p = (0..self.ambient)
                .find(|&j| !self.mat.at(i, j).is_zero())
                .expect("no zero rows in a Hermite basis");
            let (q, rem) = rhs[p].div_rem(self.mat.at(i, p));
            if !rem.is_zero() {
                return None;
            }
            for j in 0..self.ambient {
                rhs[j] -= &q * self.mat.at(i, j);
            }
            c[i] = q;
        }
        if rhs.iter().any(|x| !x.is_zero()) {
            return None;
        }
        Some(c)
    }

    pub fn contains(&self, t: &[Rat]) -> bool {
        self.membership(t).is_some()
    }

    /// Determinant of the Gram matrix of the basis: squared covolume.
    pub fn covolume_sq(&self, g: &GramForm) -> Rat {
        let b = self.basis_vectors();
        let k = b.len();
        let mut gram = MatQ::zeros(k, k);
        for i in 0..k {
            for j in 0..k {
                gram.set(i, j, g.inner(&b[i], &b[j]));
            }
        }
        gram.det()
    }

    /// The Q-span of the lattice.
    pub fn span(&self) -> RatSubspace {
        RatSubspace::from_generators(self.ambient, self.basis_vectors())
    }
}

/// Lattice generated by finitely many rational vectors, with witness
/// combinations: basis_i = sum_j wit[i][j] * gens[j].
pub fn sublattice_from_generators_with_witness(
    ambient: usize,
    gens: &[VecQ],
) -> (Sublattice, Vec<Vec<BigInt>>) {
    assert!(gens.iter().all(|v| v.len() == ambient));
    let mut den = BigInt::one();
    for v in gens {
        for c in v {
            den = den.lcm(c.denom());
        }
    }
    let m = MatZ::from_rows(
        gens.iter()
            .map(|v| v.iter().map(|c| c.numer() * (&den / c.denom())).collect())
            .collect(),
    );
    let res = hnf(&m);
    let r = (0..m.nrows)
        .take_while(|&i| (0..ambient).any(|j| !res.h.at(i, j).is_zero()))
        .count();
    let mut mat = MatZ::zeros(r, ambient);
    for i in 0..r {
        for j in 0..ambient {
            mat.set(i, j, res.h.at(i, j).clone());
        }
    }
    let wit = (0..r).map(|i| res.u.row(i).to_vec()).collect();
    // joint reduction of entries and denominator
    let mut g = den.clone();
    for i in 0..r {
        for j in 0..ambient {
            g = g.gcd(mat.at(i, j));
        }
    }
    if g > BigInt::one() {
        for i in 0..r {
            for j in 0..ambient {
                let v = mat.at(i, j) / &g;
                mat.set(i, j, v);
            }
        }
        den /= &g;
    }
    (
        Sublattice { ambient, mat, den },
        wit,
    )
}

pub fn sublattice_from_generators(ambient: usize, gens: &[VecQ]) -> Sublattice {
    sublattice_from_generators_with_witness(ambient, gens).0
}

/// Index [sup : sub] for a finite-index pair of lattices, or None when sub
/// is not a finite-index sublattice of sup.
pub fn lattice_index(sup: &Sublattice, sub: &Sublattice) -> Option<BigInt> {
    if sup.rank() != sub.rank() {
        return None;
    }
    let r = sup.rank();
    let mut c = MatZ::zeros(r, r);
    for (i, b) in sub.basis_vectors().iter().enumerate() {
        let coords = sup.membership(b)?;
        for j in 0..r {
            c.set(i, j, coords[j].clone());
        }
    }
    Some(c.det().abs())
}

/// Z^n intersected with a rational subspace, together with the (always
/// true here) flag that the lattice spans the subspace.
pub fn subspace_lattice(w: &RatSubspace) -> (Sublattice, bool) {
    let n = w.ambient;
    if w.is_zero() {
        return (Sublattice::zero(n), true);
    }
    if w.is_full() {
        return (Sublattice::standard(n), true);
    }
    let ann = w.annihilator();
    // x in W iff ann . x = 0; clear denominators columnwise into M = ann^T
    let mut den = BigInt::one();
    for v in &ann {
        for c in v {
            den = den.lcm(c.denom());
        }
    }
    let annz: Vec<Vec<BigInt>> = ann
        .iter()
        .map(|v| v.iter().map(|c| c.numer() * (&den / c.denom())).collect())
        .collect();
    let m = MatZ::from_rows(annz).transpose(); // n x (number of conditions)
    let res = hnf(&m);
    let mut rows = Vec::new();
    for i in 0..n {
        if (0..m.ncols).all(|j| res.h.at(i, j).is_zero()) {
            rows.push(res.u.row(i).iter().map(|e| Rat::from_integer(e.clone())).collect());
        }
    }
    let lat = sublattice_from_generators(n, &rows);
    debug_assert_eq!(lat.rank(), w.dim());
    (lat, true)
}

/// Same for an algebraic subspace; the flag reports whether the integer
/// points span the whole subspace.
pub fn subspace_lattice_alg(w: &AlgSubspace) -> (Sublattice, bool) {
    let rational = w.rational_solutions();
    let (lat, _) = subspace_lattice(&rational);
    let spanning = lat.rank() == w.dim();
    (lat, spanning)
}

/// G-orthogonal projection of Z^n onto the subspace, as a sublattice, with
/// integer preimages: basis_i = P(pre_i).
pub fn projected_lattice_with_witness(
    s: &RatSubspace,
    g: &GramForm,
) -> (Sublattice, Vec<Vec<BigInt>>) {
    let n = s.ambient;
    let p = s.gram_projector(g);
    let gens: Vec<VecQ> = (0..n).map(|i| p.col(i)).collect();
    let (lat, wit) = sublattice_from_generators_with_witness(n, &gens);
    // witness rows are combinations of the generators P(e_i), so the same
    // combinations of e_i are integer preimages
    (lat, wit)
}

pub fn projected_lattice(s: &RatSubspace, g: &GramForm) -> Sublattice {
    projected_lattice_with_witness(s, g).0
}

/// Complete a saturated full-row-rank integer basis (k x n) to a
/// unimodular n x n matrix whose first k rows span the same lattice.
pub fn complete_saturated(mat: &MatZ) -> MatZ {
    let (k, n) = (mat.nrows, mat.ncols);
    if k == 0 {
        return MatZ::identity(n);
    }
    let res = snf(mat);
    for i in 0..k {
        assert!(
            res.s.at(i, i).is_one(),
            "basis is not saturated: invariant factor {} at {}",
            res.s.at(i, i),
            i
        );
    }
    inverse_unimodular(&res.v).expect("V from Smith reduction is unimodular")
}

/// Z-basis of Z^n adapted to a rational subspace: n rows, unimodular, the
/// first dim(Z^n cap W) rows a basis of Z^n cap W.
pub fn adapted_zbasis(w: &RatSubspace) -> MatZ {
    let (lat, _) = subspace_lattice(w);
    debug_assert!(lat.denominator().is_one());
    complete_saturated(lat.hermite_mat())
}

/// Linear subspace with coordinates in a real number field.
#[derive(Clone, PartialEq, Debug)]
pub struct AlgSubspace {
    pub field: Arc<NumberField>,
    pub ambient: usize,
    basis: Vec<Vec<NFElem>>,
}

impl AlgSubspace {
    pub fn from_generators(
        field: Arc<NumberField>,
        ambient: usize,
        gens: Vec<Vec<NFElem>>,
    ) -> Result<Self> {
        for v in &gens {
            if v.len() != ambient {
                return Err(Error::Validation("basis vector has wrong length".into()));
            }
            for e in v {
                if *e.field != *field {
                    return Err(Error::FieldMismatch);
                }
            }
        }
        let mut rows = gens;
        rref_in_place(&mut rows);
        rows.retain(|r| !r.iter().all(|e| e.is_zero()));
        Ok(AlgSubspace {
            field,
            ambient,
            basis: rows,
        })
    }

    pub fn from_rational(w: &RatSubspace) -> Self {
        let field = NumberField::rational();
        let basis = w
            .basis()
            .iter()
            .map(|v| v.iter().map(|c| NFElem::from_rat(&field, c.clone())).collect())
            .collect();
        AlgSubspace {
            field,
            ambient: w.ambient,
            basis,
        }
    }

    pub fn zero(field: Arc<NumberField>, ambient: usize) -> Self {
        AlgSubspace {
            field,
            ambient,
            basis: vec![],
        }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vec<NFElem>] {
        &self.basis
    }

    pub fn is_zero(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn contains(&self, v: &[Vec<NFElem>]) -> bool {
        v.iter().all(|x| self.contains_one(x))
    }

    pub fn contains_vector(&self, v: &[NFElem]) -> bool {
        self.contains_one(v)
    }

    pub fn is_invariant_under_q(&self, a: &MatQ) -> bool {
        self.basis.iter().all(|v| {
            let img: Vec<NFElem> = (0..self.ambient)
                .map(|j| {
                    let mut acc = NFElem::zero(&self.field);
                    for k in 0..self.ambient {
                        acc = acc.add(&v[k].mul_rat(a.at(j, k)));
                    }
                    acc
                })
                .collect();
            self.contains_one(&img)
        })
    }

    fn contains_one(&self, v: &[NFElem]) -> bool {
        assert_eq!(v.len(), self.ambient);
        if v.iter().all(|e| e.is_zero()) {
            return true;
        }
        if self.is_zero() {
            return false;
        }
        let like = NFElem::zero(&self.field);
        // transpose the basis and solve B^T c = v
        let cols: Vec<Vec<NFElem>> = (0..self.ambient)
            .map(|j| self.basis.iter().map(|row| row[j].clone()).collect())
            .collect();
        crate::ratcore::matq::solve_rows(&cols, v, &like).is_some()
    }

    /// True when every basis entry is rational.
    pub fn is_rational(&self) -> bool {
        self.basis
            .iter()
            .all(|v| v.iter().all(|e| e.is_rational()))
    }

    pub fn to_rational(&self) -> Option<RatSubspace> {
        if !self.is_rational() {
            return None;
        }
        Some(RatSubspace::from_generators(
            self.ambient,
            self.basis
                .iter()
                .map(|v| v.iter().map(|e| e.as_rational().unwrap()).collect())
                .collect(),
        ))
    }

    /// The rational points of the subspace: { x in Q^n : x in W }.
    pub fn rational_solutions(&self) -> RatSubspace {
        let n = self.ambient;
        if self.is_zero() {
            return RatSubspace::zero(n);
        }
        let like = NFElem::zero(&self.field);
        let ann = kernel_of_rows(&self.basis, n, &like);
        // each field condition splits into one rational condition per
        // power of the generator
        let mut conditions: Vec<VecQ> = Vec::new();
        for phi in &ann {
            for comp in nf_components(phi).expect("annihilator entries share the field") {
                conditions.push(comp);
            }
        }
        let sols = kernel_of_rows(&conditions, n, &Rat::zero());
        RatSubspace::from_generators(n, sols)
    }

    /// Float embedding of the basis, row per basis vector.
    pub fn embed_basis(&self) -> Vec<Vec<f64>> {
        self.basis
            .iter()
            .map(|v| v.iter().map(|e| e.embed()).collect())
            .collect()
    }
}

/// Adapted integral data of the rational closure.
#[derive(Clone, Debug)]
pub struct AdaptedTriple {
    /// Z-basis of Z^n cap W (rational points of W only).
    pub w_rows: Vec<Vec<BigInt>>,
    /// Completion inside Z^n cap closure: w_rows + v_rows is a Z-basis.
    pub v_rows: Vec<Vec<BigInt>>,
    /// Completion to a Z-basis of Z^n.
    pub u_rows: Vec<Vec<BigInt>>,
}

#[derive(Clone, Debug)]
pub struct ClosureResult {
    /// The rational closure: smallest lattice-generated subspace containing W.
    pub what: RatSubspace,
    /// G-orthogonal complement of W inside the closure, over W's field.
    pub k_part: AlgSubspace,
    /// Z^n cap closure.
    pub w_lattice: Sublattice,
    pub adapted: AdaptedTriple,
}

/// Rational closure of an algebraic subspace: component vectors of the
/// basis span the smallest rational subspace containing W; K is the
/// G-orthocomplement of W inside it; the adapted triple is a Z^n basis
/// refining Z^n cap W inside Z^n cap closure.
pub fn l_closure(w: &AlgSubspace, g: &GramForm) -> Result<ClosureResult> {
    let n = w.ambient;
    if g.dim() != n {
        return Err(Error::Validation("Gram form dimension mismatch".into()));
    }
    // closure = span of all number field components of the basis
    let mut gens: Vec<VecQ> = Vec::new();
    for v in w.basis() {
        gens.extend(nf_components(v)?);
    }
    let what = RatSubspace::from_generators(n, gens);

    // W embeds in the closure over the field
    let what_nf: Vec<Vec<NFElem>> = what
        .basis()
        .iter()
        .map(|v| v.iter().map(|c| NFElem::from_rat(&w.field, c.clone())).collect())
        .collect();
    let what_alg = AlgSubspace::from_generators(w.field.clone(), n, what_nf.clone())?;
    debug_assert!(what_alg.contains(w.basis()));

    // K: x = sum c_i what_i with <x, w_j>_G = 0, solved over the field
    let k_part = if w.dim() == what.dim() {
        AlgSubspace::zero(w.field.clone(), n)
    } else {
        let like = NFElem::zero(&w.field);
        let gq = g.mat();
        let mut cond: Vec<Vec<NFElem>> = Vec::new(); // rows: W basis, cols: closure basis
        for wb in w.basis() {
            let mut row = Vec::new();
            for hb in &what_nf {
                // <w, h>_G over the field
                let mut acc = NFElem::zero(&w.field);
                for i in 0..n {
                    for j in 0..n {
                        let gij = NFElem::from_rat(&w.field, gq.at(i, j).clone());
                        acc = acc.add(&wb[i].mul(&gij).mul(&hb[j]));
                    }
                }
                row.push(acc);
            }
            cond.push(row);
        }
        let coeffs = kernel_of_rows(&cond, what.dim(), &like);
        let kgens: Vec<Vec<NFElem>> = coeffs
            .iter()
            .map(|c| {
                let mut v = vec![NFElem::zero(&w.field); n];
                for (ci, hb) in c.iter().zip(&what_nf) {
                    for j in 0..n {
                        v[j] = v[j].add(&ci.mul(&hb[j]));
                    }
                }
                v
            })
            .collect();
        AlgSubspace::from_generators(w.field.clone(), n, kgens)?
    };

    let (w_lattice, _) = subspace_lattice(&what);

    // adapted triple
    let rational_part = w.rational_solutions();
    let (inner_lat, _) = subspace_lattice(&rational_part);
    let k0 = inner_lat.rank();
    let r = w_lattice.rank();
    // coordinates of the inner lattice in the closure lattice
    let mut coords = MatZ::zeros(k0, r);
    for (i, b) in inner_lat.basis_vectors().iter().enumerate() {
        let c = w_lattice
            .membership(b)
            .expect("rational points of W lie in the closure lattice");
        for j in 0..r {
            coords.set(i, j, c[j].clone());
        }
    }
    let completion = complete_saturated(&coords); // r x r unimodular
    let lat_basis = w_lattice.basis_vectors();
    let lat_rows: Vec<Vec<BigInt>> = (0..r)
        .map(|i| {
            let mut acc = vec![Rat::zero(); n];
            for j in 0..r {
                let c = Rat::from_integer(completion.at(i, j).clone());
                for (a, b) in acc.iter_mut().zip(&lat_basis[j]) {
                    *a += &c * b;
                }
            }
            acc.iter()
                .map(|x| {
                    debug_assert!(x.is_integer());
                    x.to_integer()
                })
                .collect()
        })
        .collect();
    let w_rows: Vec<Vec<BigInt>> = lat_rows[..k0].to_vec();
    let v_rows: Vec<Vec<BigInt>> = lat_rows[k0..].to_vec();
    let full = complete_saturated(w_lattice.hermite_mat());
    let u_rows: Vec<Vec<BigInt>> = (r..n).map(|i| full.row(i).to_vec()).collect();

    let mut stacked = Vec::new();
    stacked.extend(w_rows.clone());
    stacked.extend(v_rows.clone());
    stacked.extend(u_rows.clone());
    let det = MatZ::from_rows(stacked).det();
    debug_assert!(det.magnitude().is_one(), "adapted basis is not unimodular");

    Ok(ClosureResult {
        what,
        k_part,
        w_lattice,
        adapted: AdaptedTriple {
            w_rows,
            v_rows,
            u_rows,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratcore::rat::rat;

    fn vq(v: &[(i64, i64)]) -> VecQ {
        v.iter().map(|&(n, d)| rat(n, d)).collect()
    }

    fn vqi(v: &[i64]) -> VecQ {
        v.iter().map(|&n| rat(n, 1)).collect()
    }

    #[test]
    fn sublattice_frozen_examples() {
        // {(1,0),(0,1),(1/2,1/2)} has Hermite basis {(1/2,1/2),(0,1)}
        let lat = sublattice_from_generators(
            2,
            &[vqi(&[1, 0]), vqi(&[0, 1]), vq(&[(1, 2), (1, 2)])],
        );
        assert_eq!(lat.basis_vectors(), vec![vq(&[(1, 2), (1, 2)]), vqi(&[0, 1])]);
        // membership of (1,0): 2*(1/2,1/2) - (0,1)
        let c = lat.membership(&vqi(&[1, 0])).unwrap();
        assert_eq!(c, vec![BigInt::from(2), BigInt::from(-1)]);
        assert!(lat.membership(&vq(&[(1, 3), (0, 1)])).is_none());
        // generator degeneracy: duplicates and zero vectors collapse
        let lat2 = sublattice_from_generators(2, &[vqi(&[0, 0]), vqi(&[2, 0]), vqi(&[2, 0])]);
        assert_eq!(lat2.rank(), 1);
        assert_eq!(lat2.basis_vectors(), vec![vqi(&[2, 0])]);
    }

    #[test]
    fn witness_combinations_reproduce_basis() {
        let gens = [vq(&[(1, 2), (0, 1)]), vq(&[(1, 3), (1, 3)]), vqi(&[1, 1])];
        let (lat, wit) = sublattice_from_generators_with_witness(2, &gens);
        for (b, w) in lat.basis_vectors().iter().zip(&wit) {
            let mut acc = vq_zeroed(2);
            for (c, g) in w.iter().zip(&gens) {
                for (a, x) in acc.iter_mut().zip(g) {
                    *a += Rat::from_integer(c.clone()) * x;
                }
            }
            assert_eq!(&acc, b);
        }
    }

    fn vq_zeroed(n: usize) -> VecQ {
        vec![Rat::zero(); n]
    }

    #[test]
    fn subspace_lattice_examples() {
        // span{(1,1)}: lattice Z(1,1)
        let w = RatSubspace::from_generators(2, vec![vqi(&[1, 1])]);
        let (lat, spanning) = subspace_lattice(&w);
        assert!(spanning);
        assert_eq!(lat.basis_vectors(), vec![vqi(&[1, 1])]);
        // adapted basis: first row spans the lattice, whole matrix unimodular
        let ad = adapted_zbasis(&w);
        assert_eq!(ad.nrows, 2);
        assert!(ad.det().magnitude().is_one());
        let first: VecQ = ad.row(0).iter().map(|x| Rat::from_integer(x.clone())).collect();
        assert!(first == vqi(&[1, 1]) || first == vqi(&[-1, -1]));
        // a skew plane in R^3
        let w2 = RatSubspace::from_generators(3, vec![vq(&[(1, 2), (1, 3), (0, 1)]), vqi(&[0, 0, 1])]);
        let (lat2, _) = subspace_lattice(&w2);
        assert_eq!(lat2.rank(), 2);
        for b in lat2.basis_vectors() {
            assert!(w2.contains(&b));
            assert!(b.iter().all(|x| x.is_integer()));
        }
        // saturation: (Z^n cap W) must be primitive: 3*(1,1)? no, check that
        // any integer vector of W is in the lattice
        assert!(lat.contains(&vqi(&[5, 5])));
    }

    #[test]
    fn projected_lattice_examples() {
        // S = span{(1,-1)}, euclidean: projections of e_i generate Z(1/2,-1/2)
        let s = RatSubspace::from_generators(2, vec![vqi(&[1, -1])]);
        let lat = projected_lattice(&s, &GramForm::identity(2));
        assert_eq!(lat.basis_vectors(), vec![vq(&[(1, 2), (-1, 2)])]);
        // hexagonal form, S = span{e1}: projection of e2 is e1/2
        let hexa = GramForm::new(MatQ::from_rows(vec![
            vec![rat(1, 1), rat(1, 2)],
            vec![rat(1, 2), rat(1, 1)],
        ]))
        .unwrap();
        let s1 = RatSubspace::from_generators(2, vec![vqi(&[1, 0])]);
        let lat1 = projected_lattice(&s1, &hexa);
        assert_eq!(lat1.basis_vectors(), vec![vq(&[(1, 2), (0, 1)])]);
        // witnesses project onto the basis
        let (lat2, wits) = projected_lattice_with_witness(&s1, &hexa);
        let p = s1.gram_projector(&hexa);
        for (b, w) in lat2.basis_vectors().iter().zip(&wits) {
            let pre: VecQ = w.iter().map(|x| Rat::from_integer(x.clone())).collect();
            assert_eq!(&p.mat_vec(&pre), b);
        }
    }

    #[test]
    fn projector_properties() {
        let g = GramForm::new(MatQ::from_rows(vec![
            vec![rat(2, 1), rat(1, 2)],
            vec![rat(1, 2), rat(1, 1)],
        ]))
        .unwrap();
        let s = RatSubspace::from_generators(2, vec![vqi(&[1, 2])]);
        let p = s.gram_projector(&g);
        assert_eq!(p.mul(&p), p, "idempotent");
        // G-self-adjoint: G P = P^T G
        assert_eq!(g.mat().mul(&p), p.transpose().mul(g.mat()));
        // image is S, kernel is the G-orthocomplement
        let perp = s.gram_orthocomplement(&g);
        for b in perp.basis() {
            assert!(vq_is_zero(&p.mat_vec(b)));
        }
        for b in s.basis() {
            assert_eq!(&p.mat_vec(b), b);
        }
        // complement dimensions
        assert_eq!(s.dim() + perp.dim(), 2);
        assert_eq!(s.intersect(&perp).dim(), 0);
    }

    fn sqrt2_field() -> Arc<NumberField> {
        NumberField::new(
            vec![BigInt::from(-2), BigInt::zero(), BigInt::one()],
            rat(1, 1),
            rat(2, 1),
        )
        .unwrap()
    }

    fn line_irr(ambient: usize) -> AlgSubspace {
        // span{(1, sqrt2)} (padded with zeros in higher ambient dims)
        let f = sqrt2_field();
        let mut v = vec![NFElem::one(&f), NFElem::alpha(&f)];
        while v.len() < ambient {
            v.push(NFElem::zero(&f));
        }
        AlgSubspace::from_generators(f, ambient, vec![v]).unwrap()
    }

    #[test]
    fn closure_of_irrational_line_is_plane() {
        let w = line_irr(2);
        let res = l_closure(&w, &GramForm::identity(2)).unwrap();
        assert!(res.what.is_full());
        assert_eq!(res.k_part.dim(), 1);
        // K = span{(-sqrt2, 1)} up to scale: check orthogonality and
        // irrationality
        let kb = &res.k_part.basis()[0];
        let dot = kb[0].mul(&NFElem::one(&w.field)).add(&kb[1].mul(&NFElem::alpha(&w.field)));
        assert!(dot.is_zero(), "K not orthogonal to W");
        assert_eq!(res.k_part.rational_solutions().dim(), 0);
        assert_eq!(res.w_lattice.rank(), 2);
        assert!(res.adapted.w_rows.is_empty());
        assert_eq!(res.adapted.v_rows.len(), 2);
        assert!(res.adapted.u_rows.is_empty());
        // the lattice misses W entirely
        let (lat, spanning) = subspace_lattice_alg(&w);
        assert_eq!(lat.rank(), 0);
        assert!(!spanning);
    }

    #[test]
    fn closure_in_three_dims() {
        let w = line_irr(3);
        let res = l_closure(&w, &GramForm::identity(3)).unwrap();
        // closure is the e1-e2 plane
        let expected = RatSubspace::from_generators(3, vec![vqi(&[1, 0, 0]), vqi(&[0, 1, 0])]);
        assert_eq!(res.what, expected);
        assert_eq!(res.k_part.dim(), 1);
        assert_eq!(res.w_lattice.rank(), 2);
        assert_eq!(res.adapted.v_rows.len(), 2);
        assert_eq!(res.adapted.u_rows.len(), 1);
        // full adapted stack is unimodular with the closure spanned by w+v
        let mut rows = res.adapted.w_rows.clone();
        rows.extend(res.adapted.v_rows.clone());
        for row in &rows {
            let v: VecQ = row.iter().map(|x| Rat::from_integer(x.clone())).collect();
            assert!(res.what.contains(&v));
        }
    }

    #[test]
    fn closure_of_rational_subspace_is_identity() {
        let w = RatSubspace::from_generators(3, vec![vqi(&[1, 1, 0])]);
        let alg = AlgSubspace::from_rational(&w);
        let res = l_closure(&alg, &GramForm::identity(3)).unwrap();
        assert_eq!(res.what, w);
        assert!(res.k_part.is_zero());
        assert_eq!(res.adapted.w_rows.len(), 1);
        assert_eq!(res.adapted.v_rows.len(), 0);
        assert_eq!(res.adapted.u_rows.len(), 2);
        // idempotence: closing the closure changes nothing
        let again = l_closure(&AlgSubspace::from_rational(&res.what), &GramForm::identity(3)).unwrap();
        assert_eq!(again.what, res.what);
        assert!(again.k_part.is_zero());
    }

    #[test]
    fn closure_minimality_certificate() {
        // every rational covector vanishing on the closure vanishes on W,
        // and dropping any closure basis vector breaks containment
        let w = line_irr(3);
        let res = l_closure(&w, &GramForm::identity(3)).unwrap();
        let ann = res.what.annihilator();
        for phi in &ann {
            for wb in w.basis() {
                let mut acc = NFElem::zero(&w.field);
                for (c, e) in phi.iter().zip(wb) {
                    acc = acc.add(&e.mul_rat(c));
                }
                assert!(acc.is_zero());
            }
        }
        // minimality: no proper rational subspace of the closure contains W
        for drop in 0..res.what.dim() {
            let smaller: Vec<VecQ> = res
                .what
                .basis()
                .iter()
                .enumerate()
                .filter(|(i, _)| *i != drop)
                .map(|(_, v)| v.clone())
                .collect();
            let sub = RatSubspace::from_generators(3, smaller);
            let sub_nf = AlgSubspace::from_generators(
                w.field.clone(),
                3,
                sub.basis()
                    .iter()
                    .map(|v| v.iter().map(|c| NFElem::from_rat(&w.field, c.clone())).collect())
                    .collect(),
            )
            .unwrap();
            assert!(!sub_nf.contains(w.basis()));
        }
    }

    #[test]
    fn density_of_projected_lattice_in_k() {
        // float surrogate for density: projections of Z^2 onto K approximate
        // 50 sample points of a fundamental cell within 0.05 using
        // translations of height <= 40
        let w = line_irr(2);
        let res = l_closure(&w, &GramForm::identity(2)).unwrap();
        let kb = &res.k_part.basis()[0];
        let k0 = kb[0].embed();
        let k1 = kb[1].embed();
        let norm = (k0 * k0 + k1 * k1).sqrt();
        let (ku0, ku1) = (k0 / norm, k1 / norm);
        let proj = |x: f64, y: f64| x * ku0 + y * ku1;
        // cell length: the projection of the smallest generator e2
        let cell = proj(0.0, 1.0).abs();
        assert!(cell > 1e-9);
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let target = rng.gen_range(0.0..cell);
            let mut best = f64::INFINITY;
            for a in -40i64..=40 {
                for b in -40i64..=40 {
                    let d = (proj(a as f64, b as f64) - target).abs();
                    if d < best {
                        best = d;
                    }
                }
            }
            assert!(best <= 0.05, "gap {best} at target {target}");
        }
    }

    #[test]
    fn lattice_index_and_covolume() {
        let g = GramForm::identity(2);
        let sup = sublattice_from_generators(2, &[vq(&[(1, 2), (0, 1)]), vqi(&[0, 1])]);
        let sub = sublattice_from_generators(2, &[vqi(&[1, 0]), vqi(&[0, 2])]);
        assert_eq!(lattice_index(&sup, &sub), Some(BigInt::from(4)));
        assert_eq!(lattice_index(&sub, &sup), None);
        let ratio = sub.covolume_sq(&g) / sup.covolume_sq(&g);
        assert_eq!(ratio, rat(16, 1)); // index^2
    }
}
