//! Rational representation structure of the point group action on Q^n:
//! isotypic components from the primary decomposition of conjugacy class
//! sums, certified splitting of a component into irreducible summands, the
//! dimension sequence invariant, and the choice of a nested pair of
//! invariant subspaces realizing a two step collapse when one exists.

use crate::crysgroup::CrystGroup;
use crate::latgeo::RatSubspace;
use crate::ratcore::matq::{MatQ, VecQ};
use crate::ratcore::matz::inverse_unimodular;
use crate::ratcore::poly::factor_over_q;
use crate::ratcore::rat::{rat, Rat};
use crate::{Error, Result};

pub const DEFAULT_SPLIT_BUDGET: usize = 5;

/// Isotypic components of the point group action, each the sum of all
/// irreducible submodules of one isomorphism type. Components are the
/// common primary components of the conjugacy class sums, returned in
/// descending lexicographic order of their echelon bases.
pub fn isotypic_decomposition(g: &CrystGroup) -> Result<Vec<RatSubspace>> {
    let n = g.dim();
    if n == 0 {
        return Ok(vec![]);
    }
    let k = g.order();
    let inverses: Vec<usize> = (0..k)
        .map(|i| {
            let inv = inverse_unimodular(g.mat(i)).expect("point group elements are unimodular");
            g.index_of(&inv).expect("closed under inversion")
        })
        .collect();
    let mut visited = vec![false; k];
    let mut class_sums: Vec<MatQ> = Vec::new();
    for i in 0..k {
        if visited[i] {
            continue;
        }
        let mut class = vec![i];
        visited[i] = true;
        let mut head = 0;
        while head < class.len() {
            let x = class[head];
            head += 1;
            for j in 0..k {
                let conj = g.mat(j).mul(g.mat(x)).mul(g.mat(inverses[j]));
                let y = g.index_of(&conj).expect("closed under conjugation");
                if !visited[y] {
                    visited[y] = true;
                    class.push(y);
                }
            }
        }
        let mut sum = MatQ::zeros(n, n);
        for x in class {
            sum = sum.add(&g.mat_q(x));
        }
        class_sums.push(sum);
    }

    let mut pieces = vec![RatSubspace::full(n)];
    for c in &class_sums {
        if c.is_identity() {
            continue;
        }
        let p = c.charpoly();
        let factors = factor_over_q(&p, n.max(12))?;
        let mut primaries = Vec::new();
        for (f, m) in &factors {
            let power = f.eval_mat(c).pow(*m);
            let ker = RatSubspace::from_generators(n, power.kernel());
            if ker.dim() > 0 {
                primaries.push(ker);
            }
        }
        let mut next = Vec::new();
        for piece in &pieces {
            for prim in &primaries {
                let cut = piece.intersect(prim);
                if cut.dim() > 0 {
                    next.push(cut);
                }
            }
        }
        pieces = next;
    }
    debug_assert_eq!(pieces.iter().map(|p| p.dim()).sum::<usize>(), n);
    pieces.sort_by(|a, b| {
        let ka: Vec<Rat> = a.basis().iter().flatten().cloned().collect();
        let kb: Vec<Rat> = b.basis().iter().flatten().cloned().collect();
        kb.cmp(&ka)
    });
    Ok(pieces)
}

#[derive(Clone, Debug)]
pub struct SplitResult {
    pub copies: Vec<RatSubspace>,
    pub certified: bool,
}

fn cyclic_module(g: &CrystGroup, v: &[Rat]) -> RatSubspace {
    let gens = (0..g.order()).map(|i| g.mat_q(i).mat_vec(v)).collect();
    RatSubspace::from_generators(g.dim(), gens)
}

fn lift(m: &RatSubspace, coords: &[Rat]) -> VecQ {
    let mut out = vec![Rat::from_integer(0.into()); m.ambient];
    for (c, b) in coords.iter().zip(m.basis()) {
        for (o, x) in out.iter_mut().zip(b) {
            *o += c * x;
        }
    }
    out
}

fn theta_candidates(g: &CrystGroup, budget: usize) -> Vec<MatQ> {
    let k = g.order();
    let mut out = vec![MatQ::identity(g.dim())];
    for i in 1..k {
        out.push(g.mat_q(i));
    }
    for c in 1..=budget {
        for i in 0..k {
            for j in (i + 1)..k {
                out.push(g.mat_q(i).add(&g.mat_q(j).scale(&rat(c as i64, 1))));
            }
        }
    }
    out
}

fn probe_coords(ker: &[VecQ], budget: usize) -> Vec<VecQ> {
    let mut out: Vec<VecQ> = ker.to_vec();
    for c in 1..=budget.max(1) {
        for i in 0..ker.len() {
            for j in (i + 1)..ker.len() {
                let s = rat(c as i64, 1);
                out.push(
                    ker[i]
                        .iter()
                        .zip(&ker[j])
                        .map(|(a, b)| a + &s * b)
                        .collect(),
                );
                out.push(
                    ker[i]
                        .iter()
                        .zip(&ker[j])
                        .map(|(a, b)| a - &s * b)
                        .collect(),
                );
            }
        }
    }
    out
}

fn complement_within(g: &CrystGroup, m: &RatSubspace, s: &RatSubspace) -> RatSubspace {
    let global = g
        .invariant_complement(s)
        .expect("submodules admit invariant complements");
    let c = global.intersect(m);
    debug_assert_eq!(c.dim() + s.dim(), m.dim());
    c
}

fn split_rec(g: &CrystGroup, m: &RatSubspace, budget: usize) -> Result<(Vec<RatSubspace>, bool)> {
    if m.dim() == 0 {
        return Ok((vec![], true));
    }
    let gq = g.gram().mat();
    let ginv = gq.inverse().expect("Gram form is invertible");
    let recurse = |s: &RatSubspace| -> Result<(Vec<RatSubspace>, bool)> {
        let (mut left, c1) = split_rec(g, s, budget)?;
        let rest = complement_within(g, m, s);
        let (right, c2) = split_rec(g, &rest, budget)?;
        left.extend(right);
        Ok((left, c1 && c2))
    };
    for theta in theta_candidates(g, budget) {
        let r = match m.restriction_matrix(&theta) {
            Some(r) => r,
            None => continue,
        };
        let p = r.charpoly();
        let factors = factor_over_q(&p, m.dim().max(12))?;
        for (f, _) in &factors {
            let ker = f.eval_mat(&r).kernel();
            if ker.is_empty() {
                continue;
            }
            for coords in probe_coords(&ker, budget) {
                let v = lift(m, &coords);
                let s = cyclic_module(g, &v);
                if s.dim() > 0 && s.dim() < m.dim() {
                    return recurse(&s);
                }
            }
            if ker.len() == f.deg() {
                // the kernel vector generates everything; check the dual
                // module through the Gram adjoint to certify irreducibility
                let theta_star = ginv.mul(&theta.transpose()).mul(gq);
                let rs = m
                    .restriction_matrix(&theta_star)
                    .expect("adjoint preserves the module");
                let kers = f.eval_mat(&rs).kernel();
                debug_assert_eq!(kers.len(), ker.len());
                let vs = lift(m, &kers[0]);
                let t = cyclic_module(g, &vs);
                if t.dim() > 0 && t.dim() < m.dim() {
                    return recurse(&t);
                }
                return Ok((vec![m.clone()], true));
            }
        }
    }
    Ok((vec![m.clone()], false))
}

/// Decompose one isotypic component into irreducible summands. With
/// budget 0 the search is skipped entirely and the component is returned
/// unsplit and uncertified.
pub fn split_isotypic(g: &CrystGroup, comp: &RatSubspace, budget: usize) -> Result<SplitResult> {
    if budget == 0 {
        return Ok(SplitResult {
            copies: vec![comp.clone()],
            certified: false,
        });
    }
    let (copies, certified) = split_rec(g, comp, budget)?;
    Ok(SplitResult { copies, certified })
}

#[derive(Clone, Debug)]
pub struct ISequence {
    /// Dimensions of the irreducible summands, non-decreasing.
    pub entries: Vec<usize>,
    /// All summands were certified irreducible.
    pub certified: bool,
    /// The summands themselves: components in canonical order, each split
    /// into its copies.
    pub summands: Vec<RatSubspace>,
}

pub fn i_sequence(g: &CrystGroup, budget: usize) -> Result<ISequence> {
    let comps = isotypic_decomposition(g)?;
    let mut summands = Vec::new();
    let mut certified = true;
    for comp in &comps {
        let split = split_isotypic(g, comp, budget)?;
        certified &= split.certified;
        summands.extend(split.copies);
    }
    let mut entries: Vec<usize> = summands.iter().map(|s| s.dim()).collect();
    entries.sort_unstable();
    Ok(ISequence {
        entries,
        certified,
        summands,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TheoremC {
    /// Exactly two summands of equal dimension: no two step collapse.
    NotApplicable,
    /// Nested invariant subspaces giving the collapse chain.
    Applicable { w1: RatSubspace, w2: RatSubspace },
}

/// Choose the nested pair W1 inside W2 of invariant subspaces along which
/// the group collapses in two steps, when the summand structure allows
/// one.
pub fn theorem_c_witnesses(g: &CrystGroup, budget: usize) -> Result<TheoremC> {
    let seq = i_sequence(g, budget)?;
    if !seq.certified {
        return Err(Error::BudgetLimited(budget));
    }
    let s = seq.summands.len();
    if s < 2 {
        return Err(Error::NoProperInvariantSubspace);
    }
    if s == 2 && seq.summands[0].dim() == seq.summands[1].dim() {
        return Ok(TheoremC::NotApplicable);
    }
    let w1 = seq.summands[0].clone();
    let w2 = w1.sum(&seq.summands[1]);
    Ok(TheoremC::Applicable { w1, w2 })
}

/// A pair of complementary proper invariant subspaces.
pub fn transverse_pair(g: &CrystGroup, budget: usize) -> Result<(RatSubspace, RatSubspace)> {
    let seq = i_sequence(g, budget)?;
    if !seq.certified {
        return Err(Error::BudgetLimited(budget));
    }
    if seq.summands.len() < 2 {
        return Err(Error::NoProperInvariantSubspace);
    }
    let first = seq.summands[0].clone();
    let mut rest = RatSubspace::zero(g.dim());
    for s in &seq.summands[1..] {
        rest = rest.sum(s);
    }
    Ok((first, rest))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::collapse::collapse;
    use crate::crysgroup::POINT_GROUP_BOUND;
    use crate::latgeo::GramForm;
    use crate::ratcore::matz::MatZ;
    use num_bigint::BigInt;
    use num_traits::{One, Zero};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn vq(v: &[(i64, i64)]) -> VecQ {
        v.iter().map(|&(n, d)| rat(n, d)).collect()
    }

    fn t2() -> CrystGroup {
        CrystGroup::from_generators(GramForm::identity(2), vec![], POINT_GROUP_BOUND).unwrap()
    }

    fn kb() -> CrystGroup {
        CrystGroup::from_generators(
            GramForm::identity(2),
            vec![(MatZ::from_i64(&[&[1, 0], &[0, -1]]), vq(&[(1, 2), (0, 1)]))],
            POINT_GROUP_BOUND,
        )
        .unwrap()
    }

    fn hex3() -> CrystGroup {
        CrystGroup::from_generators(
            GramForm::new(MatQ::from_rows(vec![
                vec![rat(1, 1), rat(1, 2)],
                vec![rat(1, 2), rat(1, 1)],
            ]))
            .unwrap(),
            vec![(MatZ::from_i64(&[&[0, 1], &[-1, -1]]), vq(&[(0, 1), (0, 1)]))],
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
    fn isotypic_components_of_fixtures() {
        assert_eq!(isotypic_decomposition(&t2()).unwrap(), vec![RatSubspace::full(2)]);
        assert_eq!(
            isotypic_decomposition(&kb()).unwrap(),
            vec![span(2, &[&[1, 0]]), span(2, &[&[0, 1]])]
        );
        assert_eq!(isotypic_decomposition(&hex3()).unwrap(), vec![RatSubspace::full(2)]);
        assert_eq!(
            isotypic_decomposition(&hw()).unwrap(),
            vec![span(3, &[&[1, 0, 0]]), span(3, &[&[0, 1, 0]]), span(3, &[&[0, 0, 1]])]
        );
        // components are invariant
        for g in [t2(), kb(), hex3(), hw()] {
            for c in isotypic_decomposition(&g).unwrap() {
                assert!(g.is_invariant_subspace(&c));
            }
        }
    }

    #[test]
    fn splits_certify_and_refine() {
        // multiplicity two of the trivial representation
        let g = t2();
        let comp = RatSubspace::full(2);
        let res = split_isotypic(&g, &comp, DEFAULT_SPLIT_BUDGET).unwrap();
        assert!(res.certified);
        assert_eq!(res.copies, vec![span(2, &[&[1, 0]]), span(2, &[&[0, 1]])]);
        // a rationally irreducible rotation plane stays whole
        let g = hex3();
        let res = split_isotypic(&g, &RatSubspace::full(2), DEFAULT_SPLIT_BUDGET).unwrap();
        assert!(res.certified);
        assert_eq!(res.copies, vec![RatSubspace::full(2)]);
        // budget zero skips the search
        let res = split_isotypic(&t2(), &RatSubspace::full(2), 0).unwrap();
        assert!(!res.certified);
        assert_eq!(res.copies.len(), 1);
    }

    #[test]
    fn i_sequences_of_fixtures() {
        let cases: Vec<(CrystGroup, Vec<usize>)> = vec![
            (t2(), vec![1, 1]),
            (kb(), vec![1, 1]),
            (hex3(), vec![2]),
            (hw(), vec![1, 1, 1]),
        ];
        for (g, expect) in cases {
            let seq = i_sequence(&g, DEFAULT_SPLIT_BUDGET).unwrap();
            assert_eq!(seq.entries, expect);
            assert!(seq.certified);
            assert_eq!(seq.summands.iter().map(|s| s.dim()).sum::<usize>(), g.dim());
        }
    }

    fn random_unimodular(n: usize, rng: &mut ChaCha8Rng) -> MatZ {
        let mut m = MatZ::identity(n);
        for _ in 0..12 {
            let i = rng.gen_range(0..n);
            let mut j = rng.gen_range(0..n);
            while j == i {
                j = rng.gen_range(0..n);
            }
            let c = BigInt::from(rng.gen_range(-2i64..=2));
            if c.is_zero() {
                continue;
            }
            // row_i += c * row_j
            for k in 0..n {
                let v = m.at(i, k) + &c * m.at(j, k);
                m.set(i, k, v);
            }
        }
        debug_assert!(m.det().magnitude().is_one());
        m
    }

    #[test]
    fn i_sequence_invariant_under_conjugation() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for g in [t2(), kb(), hex3(), hw()] {
            let base = i_sequence(&g, DEFAULT_SPLIT_BUDGET).unwrap();
            for _ in 0..10 {
                let t = random_unimodular(g.dim(), &mut rng);
                let h = g.change_basis(&t).unwrap();
                let seq = i_sequence(&h, DEFAULT_SPLIT_BUDGET).unwrap();
                assert_eq!(seq.entries, base.entries);
                assert!(seq.certified);
            }
        }
    }

    #[test]
    fn theorem_c_selection() {
        assert_eq!(
            theorem_c_witnesses(&kb(), DEFAULT_SPLIT_BUDGET).unwrap(),
            TheoremC::NotApplicable
        );
        assert_eq!(
            theorem_c_witnesses(&t2(), DEFAULT_SPLIT_BUDGET).unwrap(),
            TheoremC::NotApplicable
        );
        assert!(matches!(
            theorem_c_witnesses(&hex3(), DEFAULT_SPLIT_BUDGET),
            Err(Error::NoProperInvariantSubspace)
        ));
        let g = hw();
        match theorem_c_witnesses(&g, DEFAULT_SPLIT_BUDGET).unwrap() {
            TheoremC::Applicable { w1, w2 } => {
                assert_eq!(w1, span(3, &[&[1, 0, 0]]));
                assert_eq!(w2, span(3, &[&[1, 0, 0], &[0, 1, 0]]));
                // the two collapses realize the truncated sequences
                let c1 = collapse(&g, &w1).unwrap();
                let s1 = i_sequence(&c1.group, DEFAULT_SPLIT_BUDGET).unwrap();
                assert_eq!(s1.entries, vec![1, 1]);
                let c2 = collapse(&g, &w2).unwrap();
                let s2 = i_sequence(&c2.group, DEFAULT_SPLIT_BUDGET).unwrap();
                assert_eq!(s2.entries, vec![1]);
            }
            other => panic!("expected applicable, got {other:?}"),
        }
        // budget exhaustion propagates
        assert!(matches!(
            theorem_c_witnesses(&t2(), 0),
            Err(Error::BudgetLimited(0))
        ));
    }

    #[test]
    fn transverse_pairs() {
        let (a, b) = transverse_pair(&t2(), DEFAULT_SPLIT_BUDGET).unwrap();
        assert_eq!(a, span(2, &[&[1, 0]]));
        assert_eq!(b, span(2, &[&[0, 1]]));
        let (a, b) = transverse_pair(&kb(), DEFAULT_SPLIT_BUDGET).unwrap();
        assert_eq!(a, span(2, &[&[1, 0]]));
        assert_eq!(b, span(2, &[&[0, 1]]));
        assert_eq!(a.intersect(&b).dim(), 0);
        assert!(matches!(
            transverse_pair(&hex3(), DEFAULT_SPLIT_BUDGET),
            Err(Error::NoProperInvariantSubspace)
        ));
        let (a, b) = transverse_pair(&hw(), DEFAULT_SPLIT_BUDGET).unwrap();
        assert_eq!(a.dim() + b.dim(), 3);
    }
}
