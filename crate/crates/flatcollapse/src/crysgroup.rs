//! Crystallographic groups in lattice coordinates: the translation lattice
//! is Z^n, the metric a rational Gram form, and the group is described by
//! its finite point group together with a vector system of translation
//! parts reduced into [0,1)^n.

use crate::latgeo::{projected_lattice_with_witness, GramForm, RatSubspace};
use crate::ratcore::matq::{MatQ, VecQ};
use crate::ratcore::matz::MatZ;
use crate::ratcore::rat::{rat_floor, Rat};
use crate::{Error, Result};
use num_bigint::BigInt;
use num_traits::Zero;
use std::collections::BTreeMap;

pub const POINT_GROUP_BOUND: usize = 3840;

/// Finite-order affine lattice transformation A x + t with A integral and
/// t the reduced representative of its translation class.
#[derive(Clone, Debug)]
pub struct CrystGroup {
    dim: usize,
    gram: GramForm,
    mats: Vec<MatZ>,
    tvecs: Vec<VecQ>,
    index: BTreeMap<Vec<BigInt>, usize>,
}

/// A lattice shift l such that (A_index, t_index + l) has finite order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TorsionWitness {
    pub index: usize,
    pub shift: Vec<BigInt>,
}

#[derive(Clone, Debug)]
pub struct FixedData {
    pub order: usize,
    /// ker(A - Id), the fixed subspace.
    pub kernel: RatSubspace,
    /// (A - Id) R^n, its G-orthogonal complement.
    pub image: RatSubspace,
    /// Average of the powers of A: G-orthogonal projection onto the kernel.
    pub projector: MatQ,
}

fn mat_key(m: &MatZ) -> Vec<BigInt> {
    m.rows_vec().into_iter().flatten().collect()
}

/// Componentwise reduction into [0,1)^n.
pub fn reduce_mod_lattice(v: &[Rat]) -> VecQ {
    v.iter()
        .map(|x| x - Rat::from_integer(rat_floor(x)))
        .collect()
}

fn is_gram_orthogonal(a: &MatZ, g: &GramForm) -> bool {
    let aq = a.to_matq();
    &aq.transpose().mul(g.mat()).mul(&aq) == g.mat()
}

impl CrystGroup {
    /// Closure of the generators under composition, with the vector system
    /// checked for consistency along the way. Generators must preserve the
    /// Gram form; translations are reduced on ingestion.
    pub fn from_generators(
        gram: GramForm,
        generators: Vec<(MatZ, VecQ)>,
        bound: usize,
    ) -> Result<CrystGroup> {
        let n = gram.dim();
        for (a, t) in &generators {
            if a.nrows != n || a.ncols != n || t.len() != n {
                return Err(Error::Validation(
                    "generator dimensions do not match the Gram form".into(),
                ));
            }
            if !is_gram_orthogonal(a, &gram) {
                return Err(Error::NotGramOrthogonal);
            }
        }
        let mut mats = vec![MatZ::identity(n)];
        let mut tvecs = vec![vec![Rat::zero(); n]];
        let mut index = BTreeMap::new();
        index.insert(mat_key(&mats[0]), 0usize);

        let gens: Vec<(MatZ, VecQ)> = generators
            .into_iter()
            .map(|(a, t)| (a, reduce_mod_lattice(&t)))
            .collect();

        let mut head = 0;
        while head < mats.len() {
            let (xm, xt) = (mats[head].clone(), tvecs[head].clone());
            for (gm, gt) in &gens {
                let pm = xm.mul(gm);
                let xq = xm.to_matq();
                let moved = xq.mat_vec(gt);
                let pt: VecQ = moved.iter().zip(&xt).map(|(a, b)| a + b).collect();
                let pt = reduce_mod_lattice(&pt);
                let key = mat_key(&pm);
                match index.get(&key) {
                    Some(&i) => {
                        if tvecs[i] != pt {
                            return Err(Error::CocycleViolation(format!(
                                "element {:?} reached with translations {:?} and {:?}",
                                pm.rows_vec(),
                                tvecs[i],
                                pt
                            )));
                        }
                    }
                    None => {
                        if mats.len() >= bound {
                            return Err(Error::PointGroupBoundExceeded(bound));
                        }
                        index.insert(key, mats.len());
                        mats.push(pm);
                        tvecs.push(pt);
                    }
                }
            }
            head += 1;
        }
        Ok(CrystGroup {
            dim: n,
            gram,
            mats,
            tvecs,
            index,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn gram(&self) -> &GramForm {
        &self.gram
    }

    pub fn order(&self) -> usize {
        self.mats.len()
    }

    pub fn mats(&self) -> &[MatZ] {
        &self.mats
    }

    pub fn tvecs(&self) -> &[VecQ] {
        &self.tvecs
    }

    pub fn mat(&self, i: usize) -> &MatZ {
        &self.mats[i]
    }

    pub fn mat_q(&self, i: usize) -> MatQ {
        self.mats[i].to_matq()
    }

    pub fn tvec(&self, i: usize) -> &VecQ {
        &self.tvecs[i]
    }

    pub fn index_of(&self, m: &MatZ) -> Option<usize> {
        self.index.get(&mat_key(m)).copied()
    }

    /// Action of element i on the torus R^n / Z^n, reduced representative.
    pub fn torus_action(&self, i: usize, x: &[Rat]) -> VecQ {
        let moved = self.mat_q(i).mat_vec(x);
        let shifted: VecQ = moved.iter().zip(&self.tvecs[i]).map(|(a, b)| a + b).collect();
        reduce_mod_lattice(&shifted)
    }

    /// Full re-validation of the stored data: Gram orthogonality, closure,
    /// cocycle consistency, identity element first with zero translation.
    pub fn validate(&self) -> Result<()> {
        if !self.mats[0].is_identity() {
            return Err(Error::Validation("identity element must come first".into()));
        }
        if !self.tvecs[0].iter().all(|x| x.is_zero()) {
            return Err(Error::Validation(
                "identity element must have zero translation".into(),
            ));
        }
        for t in &self.tvecs {
            if t != &reduce_mod_lattice(t) {
                return Err(Error::Validation(
                    "translation representative not reduced into [0,1)^n".into(),
                ));
            }
        }
        for a in &self.mats {
            if !is_gram_orthogonal(a, &self.gram) {
                return Err(Error::NotGramOrthogonal);
            }
        }
        let rebuilt = CrystGroup::from_generators(
            self.gram.clone(),
            self.mats.iter().cloned().zip(self.tvecs.iter().cloned()).collect(),
            self.order() + 1,
        )?;
        if rebuilt.order() != self.order() {
            return Err(Error::Validation("element set is not closed".into()));
        }
        Ok(())
    }

    /// Multiplicative order of the point group element.
    pub fn element_order(&self, i: usize) -> usize {
        let a = &self.mats[i];
        let mut p = a.clone();
        let mut k = 1;
        while !p.is_identity() {
            p = p.mul(a);
            k += 1;
            assert!(k <= self.order(), "element order exceeds group order");
        }
        k
    }

    pub fn fixed_data(&self, i: usize) -> FixedData {
        let n = self.dim;
        let order = self.element_order(i);
        let aq = self.mat_q(i);
        let mut sum = MatQ::identity(n);
        let mut p = MatQ::identity(n);
        for _ in 1..order {
            p = aq.mul(&p);
            sum = sum.add(&p);
        }
        let projector = sum.scale(&Rat::new(BigInt::from(1), BigInt::from(order as i64)));
        let amid = aq.sub(&MatQ::identity(n));
        let kernel = RatSubspace::from_generators(n, amid.kernel());
        let image = RatSubspace::from_generators(n, amid.column_space_basis());
        FixedData {
            order,
            kernel,
            image,
            projector,
        }
    }

    /// Torsion elements exist iff for some A != Id the projection of the
    /// translation part onto the fixed subspace lies in the projected
    /// lattice; the witness shift moves the representative onto a
    /// finite-order element.
    pub fn is_torsion_free(&self) -> (bool, Option<TorsionWitness>) {
        for i in 1..self.order() {
            let fd = self.fixed_data(i);
            let pv = fd.projector.mat_vec(&self.tvecs[i]);
            let (lat, wits) = projected_lattice_with_witness(&fd.kernel, &self.gram);
            if let Some(coords) = lat.membership(&pv) {
                let mut shift = vec![BigInt::zero(); self.dim];
                for (c, w) in coords.iter().zip(&wits) {
                    for (s, e) in shift.iter_mut().zip(w) {
                        *s -= c * e;
                    }
                }
                // sanity: the shifted element projects to zero
                let shifted: VecQ = self.tvecs[i]
                    .iter()
                    .zip(&shift)
                    .map(|(t, s)| t + Rat::from_integer(s.clone()))
                    .collect();
                debug_assert!(fd
                    .projector
                    .mat_vec(&shifted)
                    .iter()
                    .all(|x| x.is_zero()));
                return (false, Some(TorsionWitness { index: i, shift }));
            }
        }
        (true, None)
    }

    /// A point-group-invariant complement of an invariant subspace, found
    /// by averaging a projector over the group.
    pub fn invariant_complement(&self, w: &RatSubspace) -> Result<RatSubspace> {
        let n = self.dim;
        if w.ambient != n {
            return Err(Error::Validation("subspace dimension mismatch".into()));
        }
        for i in 0..self.order() {
            if !w.is_invariant_under(&self.mat_q(i)) {
                return Err(Error::NotInvariant);
            }
        }
        let p0 = w.gram_projector(&self.gram);
        let mut avg = MatQ::zeros(n, n);
        for i in 0..self.order() {
            let aq = self.mat_q(i);
            let ainv = aq.inverse().expect("point group elements are invertible");
            avg = avg.add(&aq.mul(&p0).mul(&ainv));
        }
        let avg = avg.scale(&Rat::new(BigInt::from(1), BigInt::from(self.order() as i64)));
        let complement = RatSubspace::from_generators(n, avg.kernel());
        debug_assert_eq!(complement.dim() + w.dim(), n);
        debug_assert_eq!(complement.intersect(w).dim(), 0);
        Ok(complement)
    }

    /// True when every point group element maps the subspace into itself.
    pub fn is_invariant_subspace(&self, w: &RatSubspace) -> bool {
        (0..self.order()).all(|i| w.is_invariant_under(&self.mat_q(i)))
    }

    /// Coordinate change by a unimodular matrix: x' = T x.
    pub fn change_basis(&self, t: &MatZ) -> Result<CrystGroup> {
        let n = self.dim;
        if t.nrows != n || t.ncols != n {
            return Err(Error::Validation("basis change dimension mismatch".into()));
        }
        let tinv = crate::ratcore::matz::inverse_unimodular(t)
            .ok_or_else(|| Error::Validation("basis change must be unimodular".into()))?;
        let tq = t.to_matq();
        let tinvq = tinv.to_matq();
        let gram = GramForm::new(tinvq.transpose().mul(self.gram.mat()).mul(&tinvq))?;
        let mut gens = Vec::with_capacity(self.order());
        for i in 0..self.order() {
            let a = t.mul(&self.mats[i]).mul(&tinv);
            let tv = reduce_mod_lattice(&tq.mat_vec(&self.tvecs[i]));
            gens.push((a, tv));
        }
        let g = CrystGroup::from_generators(gram, gens, self.order() + 1)?;
        if g.order() != self.order() {
            return Err(Error::Validation("basis change did not preserve order".into()));
        }
        Ok(g)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratcore::rat::rat;

    fn vq(v: &[(i64, i64)]) -> VecQ {
        v.iter().map(|&(n, d)| rat(n, d)).collect()
    }

    pub fn t2() -> CrystGroup {
        CrystGroup::from_generators(GramForm::identity(2), vec![], POINT_GROUP_BOUND).unwrap()
    }

    pub fn kb() -> CrystGroup {
        CrystGroup::from_generators(
            GramForm::identity(2),
            vec![(MatZ::from_i64(&[&[1, 0], &[0, -1]]), vq(&[(1, 2), (0, 1)]))],
            POINT_GROUP_BOUND,
        )
        .unwrap()
    }

    pub fn hex3() -> CrystGroup {
        let g = GramForm::new(MatQ::from_rows(vec![
            vec![rat(1, 1), rat(1, 2)],
            vec![rat(1, 2), rat(1, 1)],
        ]))
        .unwrap();
        CrystGroup::from_generators(
            g,
            vec![(MatZ::from_i64(&[&[0, 1], &[-1, -1]]), vq(&[(0, 1), (0, 1)]))],
            POINT_GROUP_BOUND,
        )
        .unwrap()
    }

    pub fn hw() -> CrystGroup {
        CrystGroup::from_generators(
            GramForm::identity(3),
            vec![
                (
                    MatZ::from_i64(&[&[1, 0, 0], &[0, -1, 0], &[0, 0, -1]]),
                    vq(&[(1, 2), (1, 2), (0, 1)]),
                ),
                (
                    MatZ::from_i64(&[&[-1, 0, 0], &[0, 1, 0], &[0, 0, -1]]),
                    vq(&[(0, 1), (1, 2), (1, 2)]),
                ),
            ],
            POINT_GROUP_BOUND,
        )
        .unwrap()
    }

    #[test]
    fn closure_orders_and_validation() {
        assert_eq!(t2().order(), 1);
        assert_eq!(kb().order(), 2);
        assert_eq!(hex3().order(), 3);
        assert_eq!(hw().order(), 4);
        for g in [t2(), kb(), hex3(), hw()] {
            g.validate().unwrap();
            assert!(g.mat(0).is_identity());
        }
        // Hanzebach-Wendt style product: third nonidentity element
        let g = hw();
        let ab = MatZ::from_i64(&[&[-1, 0, 0], &[0, -1, 0], &[0, 0, 1]]);
        let i = g.index_of(&ab).unwrap();
        assert_eq!(g.tvec(i), &vq(&[(1, 2), (0, 1), (1, 2)]));
    }

    #[test]
    fn rejects_bad_input() {
        let shear = CrystGroup::from_generators(
            GramForm::identity(2),
            vec![(MatZ::from_i64(&[&[1, 1], &[0, 1]]), vq(&[(0, 1), (0, 1)]))],
            POINT_GROUP_BOUND,
        );
        assert!(matches!(shear, Err(Error::NotGramOrthogonal)));

        let m = MatZ::from_i64(&[&[1, 0], &[0, -1]]);
        let clash = CrystGroup::from_generators(
            GramForm::identity(2),
            vec![
                (m.clone(), vq(&[(1, 2), (0, 1)])),
                (m, vq(&[(1, 4), (0, 1)])),
            ],
            POINT_GROUP_BOUND,
        );
        assert!(matches!(clash, Err(Error::CocycleViolation(_))));

        let hexgen = (MatZ::from_i64(&[&[0, 1], &[-1, -1]]), vq(&[(0, 1), (0, 1)]));
        let hexg = GramForm::new(MatQ::from_rows(vec![
            vec![rat(1, 1), rat(1, 2)],
            vec![rat(1, 2), rat(1, 1)],
        ]))
        .unwrap();
        let capped = CrystGroup::from_generators(hexg, vec![hexgen], 2);
        assert!(matches!(capped, Err(Error::PointGroupBoundExceeded(2))));
    }

    #[test]
    fn translations_reduce_and_act() {
        // offering the same group with unreduced translations changes nothing
        let g = CrystGroup::from_generators(
            GramForm::identity(2),
            vec![(MatZ::from_i64(&[&[1, 0], &[0, -1]]), vq(&[(-1, 2), (3, 1)]))],
            POINT_GROUP_BOUND,
        )
        .unwrap();
        assert_eq!(g.tvec(1), &vq(&[(1, 2), (0, 1)]));
        let x = vq(&[(1, 4), (1, 4)]);
        assert_eq!(g.torus_action(1, &x), vq(&[(3, 4), (3, 4)]));
        assert_eq!(g.torus_action(0, &x), x);
    }

    #[test]
    fn fixed_data_of_reflection() {
        let g = kb();
        let fd = g.fixed_data(1);
        assert_eq!(fd.order, 2);
        assert_eq!(
            fd.kernel,
            RatSubspace::from_generators(2, vec![vq(&[(1, 1), (0, 1)])])
        );
        assert_eq!(
            fd.image,
            RatSubspace::from_generators(2, vec![vq(&[(0, 1), (1, 1)])])
        );
        let expected = MatQ::from_rows(vec![vec![rat(1, 1), rat(0, 1)], vec![rat(0, 1), rat(0, 1)]]);
        assert_eq!(fd.projector, expected);
        // projector identities hold on every element of every fixture
        for g in [kb(), hex3(), hw()] {
            for i in 0..g.order() {
                let fd = g.fixed_data(i);
                assert_eq!(fd.projector.mul(&fd.projector), fd.projector);
                assert_eq!(fd.kernel.dim() + fd.image.dim(), g.dim());
                for b in fd.kernel.basis() {
                    assert_eq!(&fd.projector.mat_vec(b), b);
                }
                for b in fd.image.basis() {
                    assert!(fd.projector.mat_vec(b).iter().all(|x| x.is_zero()));
                }
            }
        }
    }

    #[test]
    fn torsion_decision_matches_fixed_point_search() {
        let torsion_example = CrystGroup::from_generators(
            GramForm::identity(2),
            vec![(MatZ::from_i64(&[&[1, 0], &[0, -1]]), vq(&[(0, 1), (0, 1)]))],
            POINT_GROUP_BOUND,
        )
        .unwrap();
        let cases = [
            (t2(), true),
            (kb(), true),
            (hex3(), false),
            (hw(), true),
            (torsion_example, false),
        ];
        for (g, expect_free) in cases {
            let (free, wit) = g.is_torsion_free();
            assert_eq!(free, expect_free);
            assert_eq!(free, !brute_force_has_fixed_point(&g, 3));
            match wit {
                Some(w) => {
                    assert!(!free);
                    // shifted element has a fixed point: -(t+l) in image(A - Id)
                    let fd = g.fixed_data(w.index);
                    let shifted: VecQ = g
                        .tvec(w.index)
                        .iter()
                        .zip(&w.shift)
                        .map(|(t, s)| t + Rat::from_integer(s.clone()))
                        .collect();
                    assert!(fd.projector.mat_vec(&shifted).iter().all(|x| x.is_zero()));
                }
                None => assert!(free),
            }
        }
    }

    /// Direct search: some nonidentity element composed with some bounded
    /// lattice shift fixes a point of R^n.
    fn brute_force_has_fixed_point(g: &CrystGroup, radius: i64) -> bool {
        let n = g.dim();
        let mut shifts = vec![vec![]];
        for _ in 0..n {
            let mut next = Vec::new();
            for s in &shifts {
                for v in -radius..=radius {
                    let mut s2: Vec<Rat> = s.clone();
                    s2.push(rat(v, 1));
                    next.push(s2);
                }
            }
            shifts = next;
        }
        for i in 1..g.order() {
            let amid = g.mat_q(i).sub(&MatQ::identity(n));
            for s in &shifts {
                let rhs: VecQ = g.tvec(i).iter().zip(s).map(|(t, l)| -(t + l)).collect();
                if amid.solve(&rhs).is_some() {
                    return true;
                }
            }
        }
        false
    }

    #[test]
    fn invariant_complement_splits() {
        let g = kb();
        let w = RatSubspace::from_generators(2, vec![vq(&[(1, 1), (0, 1)])]);
        let c = g.invariant_complement(&w).unwrap();
        assert_eq!(c, RatSubspace::from_generators(2, vec![vq(&[(0, 1), (1, 1)])]));
        assert!(g.is_invariant_subspace(&c));
        let skew = RatSubspace::from_generators(2, vec![vq(&[(1, 1), (1, 1)])]);
        assert!(matches!(
            g.invariant_complement(&skew),
            Err(Error::NotInvariant)
        ));
    }

    #[test]
    fn change_basis_preserves_structure() {
        let g = kb();
        let t = MatZ::from_i64(&[&[1, 1], &[0, 1]]);
        let h = g.change_basis(&t).unwrap();
        h.validate().unwrap();
        assert_eq!(h.order(), 2);
        let (free, _) = h.is_torsion_free();
        assert!(free);
        // the conjugated reflection
        assert_eq!(h.mat(1), &MatZ::from_i64(&[&[1, -2], &[0, -1]]));
        // metric transforms contravariantly: new Gram is T^-T G T^-1
        let x = vq(&[(1, 1), (2, 1)]);
        let tx = t.to_matq().mat_vec(&x);
        assert_eq!(h.gram().quad(&tx), g.gram().quad(&x));
    }
}
