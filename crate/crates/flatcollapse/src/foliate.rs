//! Leaves of the linear foliation by cosets of an invariant rational
//! subspace W. The leaf through u is preserved by the group elements whose
//! transverse part of (A - Id)u + t lands in the projected lattice; those
//! with trivial restriction to W act along the leaf as translations and
//! generate its lattice.

use crate::crysgroup::CrystGroup;
use crate::latgeo::{
    projected_lattice_with_witness, subspace_lattice, sublattice_from_generators, RatSubspace,
    Sublattice,
};
use crate::ratcore::matq::{kernel_of_rows, vq_add, vq_sub, MatQ, VecQ};
use crate::ratcore::rat::Rat;
use crate::{Error, Result};
use num_bigint::BigInt;
use num_traits::Zero;
use std::collections::BTreeSet;

/// Group element preserving the leaf: the point group index, the lattice
/// shift making it do so, and the induced translation along the leaf
/// (which lies in W; it moves points only when the restriction to W is
/// trivial, otherwise the element acts on the leaf with holonomy).
#[derive(Clone, Debug)]
pub struct LeafMember {
    pub index: usize,
    pub shift: Vec<BigInt>,
    pub translation: VecQ,
}

#[derive(Clone, Debug)]
pub struct LeafData {
    pub members: Vec<LeafMember>,
    /// Translation lattice of the leaf, a sublattice of W.
    pub lattice: Sublattice,
    /// Number of distinct restrictions to W among the members.
    pub holonomy_order: usize,
    /// Squared volume of the leaf: covol^2 of the lattice over the squared
    /// holonomy order.
    pub volume_sq: Rat,
    /// No member moves the transverse directions.
    pub principal: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LeafClass {
    Principal,
    Exceptional { index: BigInt },
}

fn check_invariant(g: &CrystGroup, w: &RatSubspace) -> Result<()> {
    if w.ambient != g.dim() {
        return Err(Error::Validation("subspace dimension mismatch".into()));
    }
    if !g.is_invariant_subspace(w) {
        return Err(Error::NotInvariant);
    }
    Ok(())
}

fn restricts_to_identity(a: &MatQ, s: &RatSubspace) -> bool {
    s.basis().iter().all(|b| &a.mat_vec(b) == b)
}

fn distinct_restrictions(g: &CrystGroup, s: &RatSubspace, indices: &[usize]) -> usize {
    let mut seen: BTreeSet<Vec<Rat>> = BTreeSet::new();
    for &i in indices {
        let r = s
            .restriction_matrix(&g.mat_q(i))
            .expect("members preserve the subspace");
        seen.insert(r.rows_vec().into_iter().flatten().collect());
    }
    seen.len()
}

/// Leaf of the W-foliation through the point u.
pub fn leaf_data(g: &CrystGroup, w: &RatSubspace, u: &[Rat]) -> Result<LeafData> {
    check_invariant(g, w)?;
    let n = g.dim();
    if u.len() != n {
        return Err(Error::Validation("point dimension mismatch".into()));
    }
    let gram = g.gram();
    let wperp = w.gram_orthocomplement(gram);
    let pperp = wperp.gram_projector(gram);
    let (lambda, wits) = projected_lattice_with_witness(&wperp, gram);
    let (wlat, _) = subspace_lattice(w);

    let mut members = Vec::new();
    for i in 0..g.order() {
        let aq = g.mat_q(i);
        let moved = vq_sub(&aq.mat_vec(u), u);
        let x = vq_add(&moved, g.tvec(i));
        let px = pperp.mat_vec(&x);
        if let Some(coords) = lambda.membership(&px) {
            let mut shift = vec![BigInt::zero(); n];
            for (c, wit) in coords.iter().zip(&wits) {
                for (s, e) in shift.iter_mut().zip(wit) {
                    *s -= c * e;
                }
            }
            let translation: VecQ = x
                .iter()
                .zip(&shift)
                .map(|(a, s)| a + Rat::from_integer(s.clone()))
                .collect();
            debug_assert!(w.contains(&translation));
            members.push(LeafMember {
                index: i,
                shift,
                translation,
            });
        }
    }

    let mut gens = wlat.basis_vectors();
    for m in &members {
        if restricts_to_identity(&g.mat_q(m.index), w) {
            gens.push(m.translation.clone());
        }
    }
    let lattice = sublattice_from_generators(n, &gens);
    let indices: Vec<usize> = members.iter().map(|m| m.index).collect();
    let holonomy_order = distinct_restrictions(g, w, &indices);
    let h = Rat::from_integer(BigInt::from(holonomy_order as i64));
    let volume_sq = lattice.covolume_sq(gram) / (&h * &h);
    let principal = members
        .iter()
        .all(|m| restricts_to_identity(&g.mat_q(m.index), &wperp));
    Ok(LeafData {
        members,
        lattice,
        holonomy_order,
        volume_sq,
        principal,
    })
}

/// Data of the generic leaf: only elements acting trivially on the
/// transverse directions can preserve it, and its lattice is Z^n cap W.
pub fn principal_leaf_data(g: &CrystGroup, w: &RatSubspace) -> Result<LeafData> {
    check_invariant(g, w)?;
    let n = g.dim();
    let gram = g.gram();
    let wperp = w.gram_orthocomplement(gram);
    let pperp = wperp.gram_projector(gram);
    let (lambda, wits) = projected_lattice_with_witness(&wperp, gram);
    let (wlat, _) = subspace_lattice(w);

    let mut members = Vec::new();
    for i in 0..g.order() {
        if !restricts_to_identity(&g.mat_q(i), &wperp) {
            continue;
        }
        let px = pperp.mat_vec(g.tvec(i));
        if let Some(coords) = lambda.membership(&px) {
            let mut shift = vec![BigInt::zero(); n];
            for (c, wit) in coords.iter().zip(&wits) {
                for (s, e) in shift.iter_mut().zip(wit) {
                    *s -= c * e;
                }
            }
            let translation: VecQ = g
                .tvec(i)
                .iter()
                .zip(&shift)
                .map(|(a, s)| a + Rat::from_integer(s.clone()))
                .collect();
            members.push(LeafMember {
                index: i,
                shift,
                translation,
            });
        }
    }
    let lattice = wlat;
    let indices: Vec<usize> = members.iter().map(|m| m.index).collect();
    let holonomy_order = distinct_restrictions(g, w, &indices);
    let h = Rat::from_integer(BigInt::from(holonomy_order as i64));
    let volume_sq = lattice.covolume_sq(gram) / (&h * &h);
    Ok(LeafData {
        members,
        lattice,
        holonomy_order,
        volume_sq,
        principal: true,
    })
}

/// Classify the leaf through u. Exceptional leaves carry the integer
/// covering index, the volume ratio to the generic leaf; a non-integral
/// ratio reveals torsion in the group.
pub fn classify_leaf(g: &CrystGroup, w: &RatSubspace, u: &[Rat]) -> Result<(LeafClass, LeafData)> {
    let data = leaf_data(g, w, u)?;
    if data.principal {
        return Ok((LeafClass::Principal, data));
    }
    let generic = principal_leaf_data(g, w)?;
    let ratio = &generic.volume_sq / &data.volume_sq;
    if !ratio.is_integer() {
        return Err(Error::NotBieberbach);
    }
    let sq = ratio.to_integer();
    let index = sq.sqrt();
    if &index * &index != sq || index < BigInt::from(2) {
        return Err(Error::NotBieberbach);
    }
    Ok((LeafClass::Exceptional { index }, data))
}

/// Whether u and v lie on the same leaf of the induced foliation of the
/// quotient space.
pub fn same_leaf(g: &CrystGroup, w: &RatSubspace, u: &[Rat], v: &[Rat]) -> Result<bool> {
    check_invariant(g, w)?;
    let gram = g.gram();
    let wperp = w.gram_orthocomplement(gram);
    let pperp = wperp.gram_projector(gram);
    let (lambda, _) = projected_lattice_with_witness(&wperp, gram);
    for i in 0..g.order() {
        let moved = vq_add(&g.mat_q(i).mat_vec(u), g.tvec(i));
        let diff = vq_sub(&moved, v);
        if lambda.membership(&pperp.mat_vec(&diff)).is_some() {
            return Ok(true);
        }
    }
    Ok(false)
}

/// One piece of the locus of non-generic leaves: the points u for which
/// the named element preserves the leaf through u form the union of
/// translates of an affine subspace, offset + offset_lattice + direction.
#[derive(Clone, Debug)]
pub struct SingularStratum {
    pub element: usize,
    pub direction: RatSubspace,
    pub offset: VecQ,
    pub offset_lattice: Sublattice,
}

#[derive(Clone, Debug)]
pub struct SingularLocus {
    pub strata: Vec<SingularStratum>,
    pub complete: bool,
}

/// Integer points of the coefficient lattice cutting lat down to a
/// subspace: { x in lat : x in s }.
fn lattice_intersect_subspace(lat: &Sublattice, s: &RatSubspace) -> Sublattice {
    let n = lat.ambient;
    let r = lat.rank();
    if r == 0 {
        return Sublattice::zero(n);
    }
    if s.is_zero() {
        return Sublattice::zero(n);
    }
    let basis = lat.basis_vectors();
    let ann = s.annihilator();
    let mut cond: Vec<VecQ> = Vec::new();
    for a in &ann {
        cond.push(basis.iter().map(|b| crate::ratcore::matq::vq_dot(a, b)).collect());
    }
    let coeff_space = RatSubspace::from_generators(r, kernel_of_rows(&cond, r, &Rat::zero()));
    let (coeff_lat, _) = subspace_lattice(&coeff_space);
    let gens: Vec<VecQ> = coeff_lat
        .basis_vectors()
        .iter()
        .map(|c| {
            let mut acc = vec![Rat::zero(); n];
            for (ci, b) in c.iter().zip(&basis) {
                for (a, x) in acc.iter_mut().zip(b) {
                    *a += ci * x;
                }
            }
            acc
        })
        .collect();
    sublattice_from_generators(n, &gens)
}

/// All points lying on non-generic leaves, stratified by the extra
/// element. For each A moving the transverse directions, the condition
/// "the leaf through u is A-invariant" is linear in the transverse part
/// of u; when solvable at all, its solutions are enumerated exactly.
pub fn singular_leaf_locus(g: &CrystGroup, w: &RatSubspace) -> Result<SingularLocus> {
    check_invariant(g, w)?;
    let n = g.dim();
    let gram = g.gram();
    let wperp = w.gram_orthocomplement(gram);
    let pperp = wperp.gram_projector(gram);
    let (lambda, _) = projected_lattice_with_witness(&wperp, gram);
    let mut strata = Vec::new();
    for i in 1..g.order() {
        let aq = g.mat_q(i);
        if restricts_to_identity(&aq, &wperp) {
            continue;
        }
        let fd = g.fixed_data(i);
        let ker_perp = fd.kernel.intersect(&wperp);
        // solvability: the fixed transverse part of the translation must be
        // reachable from lattice projections
        let q = ker_perp.gram_projector(gram);
        let (qlat, qwits) = projected_lattice_with_witness(&ker_perp, gram);
        let qv = q.mat_vec(g.tvec(i));
        let coords = match qlat.membership(&qv) {
            Some(c) => c,
            None => continue,
        };
        let mut l0 = vec![BigInt::zero(); n];
        for (c, wit) in coords.iter().zip(&qwits) {
            for (s, e) in l0.iter_mut().zip(wit) {
                *s += c * e;
            }
        }
        let l0q: VecQ = l0.iter().map(|x| Rat::from_integer(x.clone())).collect();
        let lambda0 = pperp.mat_vec(&l0q);

        // invert A - Id on its transverse image
        let im_perp = fd.image.intersect(&wperp);
        let amid = aq.sub(&MatQ::identity(n));
        let im_basis = im_perp.basis();
        let m = im_basis.len();
        let mut sys = MatQ::zeros(n, m);
        for (j, b) in im_basis.iter().enumerate() {
            let col = amid.mat_vec(b);
            for k in 0..n {
                sys.set(k, j, col[k].clone());
            }
        }
        let solve_im = |y: &[Rat]| -> VecQ {
            let c = sys.solve(y).expect("target lies in the transverse image");
            let mut acc = vec![Rat::zero(); n];
            for (ci, b) in c.iter().zip(im_basis) {
                for (a, x) in acc.iter_mut().zip(b) {
                    *a += ci * x;
                }
            }
            acc
        };

        let target = vq_sub(&lambda0, &pperp.mat_vec(g.tvec(i)));
        let offset = solve_im(&target);
        let lam_im = lattice_intersect_subspace(&lambda, &im_perp);
        let off_gens: Vec<VecQ> = lam_im.basis_vectors().iter().map(|b| solve_im(b)).collect();
        let offset_lattice = sublattice_from_generators(n, &off_gens);
        let direction = w.sum(&ker_perp);
        strata.push(SingularStratum {
            element: i,
            direction,
            offset,
            offset_lattice,
        });
    }
    Ok(SingularLocus {
        strata,
        complete: true,
    })
}
