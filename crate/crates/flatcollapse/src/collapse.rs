//! Collapsing an invariant subspace: the quotient of the group action on
//! the transverse directions W-perp is again crystallographic, with
//! translation lattice generated by the projected integer lattice and the
//! projected translation parts of elements acting trivially on W-perp.
//! Expressed in a basis of that lattice, the result is a group on Z^r.

use crate::crysgroup::{CrystGroup, TorsionWitness};
use crate::latgeo::{
    l_closure, lattice_index, subspace_lattice, sublattice_from_generators, AlgSubspace,
    ClosureResult, GramForm, RatSubspace, Sublattice,
};
use crate::ratcore::matq::{MatQ, VecQ};
use crate::ratcore::matz::MatZ;
use crate::{Error, Result};
use num_bigint::BigInt;

#[derive(Clone, Debug)]
pub struct CollapseResult {
    /// The collapsed group, in coordinates of the transverse lattice.
    pub group: CrystGroup,
    /// Rows mapping chart coordinates back to ambient vectors: chart[j] is
    /// the ambient position of the j-th collapsed lattice direction.
    pub chart: Vec<VecQ>,
    /// Indices of the elements acting trivially on the transverse space.
    pub kernel_elements: Vec<usize>,
    /// The transverse space W-perp in ambient coordinates.
    pub perp: RatSubspace,
    /// The collapsed translation lattice inside W-perp.
    pub lattice: Sublattice,
}

impl CollapseResult {
    /// Collapsed index of an original element.
    pub fn image_of(&self, g: &CrystGroup, i: usize) -> usize {
        let chart = &self.chart;
        let r = chart.len();
        let aq = g.mat_q(i);
        let mut m = MatZ::zeros(r, r);
        for (j, c) in chart.iter().enumerate() {
            let coords = self
                .lattice
                .membership(&aq.mat_vec(c))
                .expect("collapsed lattice is invariant");
            for k in 0..r {
                m.set(k, j, coords[k].clone());
            }
        }
        self.group.index_of(&m).expect("restriction is a group element")
    }
}

/// Collapse the group along an invariant rational subspace.
pub fn collapse(g: &CrystGroup, w: &RatSubspace) -> Result<CollapseResult> {
    let n = g.dim();
    if w.ambient != n {
        return Err(Error::Validation("subspace dimension mismatch".into()));
    }
    if !g.is_invariant_subspace(w) {
        return Err(Error::NotInvariant);
    }
    let gram = g.gram();
    let perp = w.gram_orthocomplement(gram);
    let p = perp.gram_projector(gram);

    let kernel_elements: Vec<usize> = (0..g.order())
        .filter(|&i| {
            let aq = g.mat_q(i);
            perp.basis().iter().all(|b| &aq.mat_vec(b) == b)
        })
        .collect();

    let mut gens: Vec<VecQ> = (0..n).map(|i| p.col(i)).collect();
    for &i in &kernel_elements {
        gens.push(p.mat_vec(g.tvec(i)));
    }
    let lattice = sublattice_from_generators(n, &gens);
    let r = lattice.rank();
    debug_assert_eq!(r, perp.dim());
    let chart = lattice.basis_vectors();

    let mut gram_rows = MatQ::zeros(r, r);
    for j in 0..r {
        for k in 0..r {
            gram_rows.set(j, k, gram.inner(&chart[j], &chart[k]));
        }
    }
    let new_gram = GramForm::new(gram_rows)?;

    let chart_t = MatQ::from_rows(chart.clone()).transpose();
    let mut new_gens = Vec::with_capacity(g.order());
    for i in 0..g.order() {
        let aq = g.mat_q(i);
        let mut m = MatZ::zeros(r, r);
        for (j, c) in chart.iter().enumerate() {
            let coords = lattice
                .membership(&aq.mat_vec(c))
                .expect("point group preserves the collapsed lattice");
            for k in 0..r {
                m.set(k, j, coords[k].clone());
            }
        }
        let pv = p.mat_vec(g.tvec(i));
        let t = if r == 0 {
            vec![]
        } else {
            chart_t.solve(&pv).expect("projection lies in the transverse space")
        };
        new_gens.push((m, t));
    }
    let group = CrystGroup::from_generators(new_gram, new_gens, g.order() + 1)?;
    group.validate()?;
    Ok(CollapseResult {
        group,
        chart,
        kernel_elements,
        perp,
        lattice,
    })
}

/// Collapse along an algebraic subspace: the rational closure is computed
/// first and the collapse happens along it.
pub fn collapse_alg(g: &CrystGroup, w: &AlgSubspace) -> Result<(ClosureResult, CollapseResult)> {
    if w.ambient != g.dim() {
        return Err(Error::Validation("subspace dimension mismatch".into()));
    }
    for i in 0..g.order() {
        if !w.is_invariant_under_q(&g.mat_q(i)) {
            return Err(Error::NotInvariant);
        }
    }
    let closure = l_closure(w, g.gram())?;
    let res = collapse(g, &closure.what)?;
    Ok((closure, res))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CollapsedInvariants {
    /// Order of the collapsed point group.
    pub holonomy_order: usize,
    /// Index of the saturated integral lattice of W-perp inside the
    /// collapsed lattice.
    pub lattice_index: BigInt,
}

pub fn collapsed_invariants(g: &CrystGroup, w: &RatSubspace) -> Result<CollapsedInvariants> {
    let res = collapse(g, w)?;
    let (integral, _) = subspace_lattice(&res.perp);
    let idx =
        lattice_index(&res.lattice, &integral).expect("integral lattice sits inside the collapsed one");
    Ok(CollapsedInvariants {
        holonomy_order: res.group.order(),
        lattice_index: idx,
    })
}

/// Whether the collapsed space is a flat manifold rather than a proper
/// orbifold. Requires the input group to be torsion-free; the witness
/// names a finite-order element of the collapsed group otherwise.
pub fn is_smooth(g: &CrystGroup, w: &RatSubspace) -> Result<(bool, Option<TorsionWitness>)> {
    let (free, _) = g.is_torsion_free();
    if !free {
        return Err(Error::NotBieberbach);
    }
    let res = collapse(g, w)?;
    let (smooth, wit) = res.group.is_torsion_free();
    Ok((smooth, wit))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::crysgroup::POINT_GROUP_BOUND;
    use crate::ratcore::numfield::{NFElem, NumberField};
    use crate::ratcore::rat::{rat, Rat};
    use num_traits::Zero;

    fn vq(v: &[(i64, i64)]) -> VecQ {
        v.iter().map(|&(n, d)| rat(n, d)).collect()
    }

    fn kb() -> CrystGroup {
        CrystGroup::from_generators(
            GramForm::identity(2),
            vec![(MatZ::from_i64(&[&[1, 0], &[0, -1]]), vq(&[(1, 2), (0, 1)]))],
            POINT_GROUP_BOUND,
        )
        .unwrap()
    }

    fn hw() -> CrystGroup {
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

    fn span(n: usize, vs: &[&[i64]]) -> RatSubspace {
        RatSubspace::from_generators(
            n,
            vs.iter()
                .map(|v| v.iter().map(|&x| rat(x, 1)).collect())
                .collect(),
        )
    }

    #[test]
    fn kb_collapses_to_short_circle() {
        // collapsing the vertical direction: the reflection acts trivially
        // transversally and its glide translation halves the circle
        let g = kb();
        let res = collapse(&g, &span(2, &[&[0, 1]])).unwrap();
        assert_eq!(res.group.dim(), 1);
        assert_eq!(res.group.order(), 1);
        assert_eq!(res.kernel_elements, vec![0, 1]);
        assert_eq!(res.chart, vec![vq(&[(1, 2), (0, 1)])]);
        assert_eq!(res.group.gram().mat().at(0, 0), &rat(1, 4));
        let inv = collapsed_invariants(&g, &span(2, &[&[0, 1]])).unwrap();
        assert_eq!(inv.holonomy_order, 1);
        assert_eq!(inv.lattice_index, BigInt::from(2));
        let (smooth, _) = is_smooth(&g, &span(2, &[&[0, 1]])).unwrap();
        assert!(smooth);
    }

    #[test]
    fn kb_collapses_to_interval_orbifold() {
        let g = kb();
        let w = span(2, &[&[1, 0]]);
        let res = collapse(&g, &w).unwrap();
        assert_eq!(res.group.dim(), 1);
        assert_eq!(res.group.order(), 2);
        assert_eq!(res.kernel_elements, vec![0]);
        assert_eq!(res.chart, vec![vq(&[(0, 1), (1, 1)])]);
        assert_eq!(res.group.mat(1), &MatZ::from_i64(&[&[-1]]));
        assert_eq!(res.group.tvec(1), &vec![Rat::zero()]);
        let inv = collapsed_invariants(&g, &w).unwrap();
        assert_eq!(inv.holonomy_order, 2);
        assert_eq!(inv.lattice_index, BigInt::from(1));
        let (smooth, wit) = is_smooth(&g, &w).unwrap();
        assert!(!smooth);
        assert!(wit.is_some());
    }

    #[test]
    fn hw_collapse_along_first_axis() {
        let g = hw();
        let res = collapse(&g, &span(3, &[&[1, 0, 0]])).unwrap();
        assert_eq!(res.group.dim(), 2);
        assert_eq!(res.group.order(), 4);
        assert_eq!(res.kernel_elements, vec![0]);
        res.group.validate().unwrap();
        // all three involutions survive with their glide parts
        let minus = MatZ::from_i64(&[&[-1, 0], &[0, -1]]);
        let i = res.group.index_of(&minus).unwrap();
        assert_eq!(res.group.tvec(i), &vq(&[(1, 2), (0, 1)]));
        let (smooth, _) = is_smooth(&g, &span(3, &[&[1, 0, 0]])).unwrap();
        assert!(!smooth);
    }

    #[test]
    fn hw_collapse_along_plane() {
        let g = hw();
        let w = span(3, &[&[1, 0, 0], &[0, 1, 0]]);
        let res = collapse(&g, &w).unwrap();
        assert_eq!(res.group.dim(), 1);
        assert_eq!(res.group.order(), 2);
        // the element acting trivially transversally contributes its half
        // translation to the collapsed lattice
        assert_eq!(res.chart, vec![vq(&[(0, 1), (0, 1), (1, 2)])]);
        let inv = collapsed_invariants(&g, &w).unwrap();
        assert_eq!(inv.holonomy_order, 2);
        assert_eq!(inv.lattice_index, BigInt::from(2));
    }

    #[test]
    fn trivial_and_full_collapse() {
        let g = hw();
        // along the zero subspace nothing collapses
        let res = collapse(&g, &RatSubspace::zero(3)).unwrap();
        assert_eq!(res.group.dim(), 3);
        assert_eq!(res.group.order(), g.order());
        assert_eq!(res.group.gram(), g.gram());
        let (f1, _) = res.group.is_torsion_free();
        let (f2, _) = g.is_torsion_free();
        assert_eq!(f1, f2);
        // along everything the quotient is a point
        let res = collapse(&g, &RatSubspace::full(3)).unwrap();
        assert_eq!(res.group.dim(), 0);
        assert_eq!(res.group.order(), 1);
        assert!(res.chart.is_empty());
        let inv = collapsed_invariants(&g, &RatSubspace::full(3)).unwrap();
        assert_eq!(inv.holonomy_order, 1);
        assert_eq!(inv.lattice_index, BigInt::from(1));
        let (smooth, _) = is_smooth(&g, &RatSubspace::full(3)).unwrap();
        assert!(smooth);
    }

    #[test]
    fn collapse_functorial_under_basis_change() {
        let g = kb();
        let t = MatZ::from_i64(&[&[1, 0], &[1, 1]]);
        let h = g.change_basis(&t).unwrap();
        // the invariant vertical line maps to span{(0,1)} under T... compute
        let w = span(2, &[&[0, 1]]);
        let tw = RatSubspace::from_generators(
            2,
            w.basis().iter().map(|b| t.to_matq().mat_vec(b)).collect(),
        );
        let a = collapsed_invariants(&g, &w).unwrap();
        let b = collapsed_invariants(&h, &tw).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn smoothness_requires_torsion_free_input() {
        let hex = CrystGroup::from_generators(
            GramForm::new(MatQ::from_rows(vec![
                vec![rat(1, 1), rat(1, 2)],
                vec![rat(1, 2), rat(1, 1)],
            ]))
            .unwrap(),
            vec![(MatZ::from_i64(&[&[0, 1], &[-1, -1]]), vq(&[(0, 1), (0, 1)]))],
            POINT_GROUP_BOUND,
        )
        .unwrap();
        assert!(matches!(
            is_smooth(&hex, &RatSubspace::zero(2)),
            Err(Error::NotBieberbach)
        ));
    }

    #[test]
    fn algebraic_subspace_collapses_through_closure() {
        // an irrational line in the 3-torus: its closure is the e1-e2
        // plane, so collapsing leaves the third circle
        let t3 = CrystGroup::from_generators(GramForm::identity(3), vec![], POINT_GROUP_BOUND)
            .unwrap();
        let f = NumberField::new(vec![BigInt::from(-2), BigInt::zero(), BigInt::from(1)], rat(1, 1), rat(2, 1))
            .unwrap();
        let w = AlgSubspace::from_generators(
            f.clone(),
            3,
            vec![vec![NFElem::one(&f), NFElem::alpha(&f), NFElem::zero(&f)]],
        )
        .unwrap();
        let (closure, res) = collapse_alg(&t3, &w).unwrap();
        assert_eq!(closure.what.dim(), 2);
        assert_eq!(res.group.dim(), 1);
        assert_eq!(res.group.order(), 1);
        assert_eq!(res.chart, vec![vq(&[(0, 1), (0, 1), (1, 1)])]);
        // non-invariant algebraic subspace is refused
        let kb = kb();
        let w2 = AlgSubspace::from_generators(
            f.clone(),
            2,
            vec![vec![NFElem::one(&f), NFElem::alpha(&f)]],
        )
        .unwrap();
        assert!(matches!(collapse_alg(&kb, &w2), Err(Error::NotInvariant)));
    }

    #[test]
    fn collapse_twice_reaches_the_full_collapse() {
        // collapsing W then everything equals collapsing R^n directly, at
        // the level of invariants
        let g = hw();
        let w = span(3, &[&[0, 0, 1]]);
        let res = collapse(&g, &w).unwrap();
        let rest = RatSubspace::full(res.group.dim());
        let second = collapse(&res.group, &rest).unwrap();
        assert_eq!(second.group.dim(), 0);
        assert_eq!(second.group.order(), 1);
    }
}
