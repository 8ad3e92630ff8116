use crate::ratcore::matq::{FieldScalar, VecQ};
use crate::ratcore::poly::{factor_over_q, PolyQ};
use crate::ratcore::rat::{rat_to_f64, Rat};
use crate::{Error, Result};
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use std::sync::Arc;

/// Real number field Q(alpha): alpha is the unique root of a monic integer
/// irreducible polynomial inside the given isolation interval.
#[derive(Debug)]
pub struct NumberField {
    minpoly_int: Vec<BigInt>,
    minpoly: PolyQ,
    lo: Rat,
    hi: Rat,
    root_approx: f64,
}

impl PartialEq for NumberField {
    fn eq(&self, other: &Self) -> bool {
        // same polynomial and overlapping isolation intervals isolate the
        // same root
        self.minpoly_int == other.minpoly_int && self.lo <= other.hi && other.lo <= self.hi
    }
}

fn sturm_chain(f: &PolyQ) -> Vec<PolyQ> {
    let mut chain = vec![f.clone(), f.derivative()];
    loop {
        let n = chain.len();
        if chain[n - 1].is_zero() {
            chain.pop();
            return chain;
        }
        let (_, r) = chain[n - 2].divrem(&chain[n - 1]);
        chain.push(r.neg());
    }
}

fn sign_variations(chain: &[PolyQ], x: &Rat) -> usize {
    let mut count = 0;
    let mut last: Option<bool> = None;
    for p in chain {
        let v = p.eval(x);
        if v.is_zero() {
            continue;
        }
        let s = v.is_positive();
        if let Some(l) = last {
            if l != s {
                count += 1;
            }
        }
        last = Some(s);
    }
    count
}

impl NumberField {
    /// Build and validate the field. `minpoly` is ascending integer
    /// coefficients, monic; the interval must isolate exactly one real root.
    pub fn new(minpoly: Vec<BigInt>, lo: Rat, hi: Rat) -> Result<Arc<NumberField>> {
        if minpoly.len() < 2 {
            return Err(Error::Validation("minimal polynomial must have degree >= 1".into()));
        }
        if minpoly.last() != Some(&BigInt::one()) {
            return Err(Error::Validation("minimal polynomial must be monic".into()));
        }
        let deg = minpoly.len() - 1;
        let f = PolyQ::from_bigint_coeffs(&minpoly);
        let cap = deg.max(12);
        let factors = factor_over_q(&f, cap)?;
        if factors.len() != 1 || factors[0].1 != 1 {
            return Err(Error::Validation("minimal polynomial is reducible".into()));
        }
        if lo >= hi {
            return Err(Error::Validation("empty isolation interval".into()));
        }
        if f.eval(&lo).is_zero() || f.eval(&hi).is_zero() {
            return Err(Error::Validation(
                "isolation interval endpoint is a root".into(),
            ));
        }
        let chain = sturm_chain(&f);
        let nroots = sign_variations(&chain, &lo) - sign_variations(&chain, &hi);
        if nroots != 1 {
            return Err(Error::Validation(format!(
                "isolation interval contains {nroots} roots, expected exactly 1"
            )));
        }
        // bisect to f64 accuracy; the root is simple so the signs differ
        let (mut a, mut b) = (lo.clone(), hi.clone());
        let sa = f.eval(&a).is_positive();
        debug_assert!(sa != f.eval(&b).is_positive());
        for _ in 0..110 {
            let mid = (&a + &b) / Rat::from_integer(2.into());
            let v = f.eval(&mid);
            if v.is_zero() {
                a = mid.clone();
                b = mid;
                break;
            }
            if v.is_positive() == sa {
                a = mid;
            } else {
                b = mid;
            }
        }
        let root_approx = rat_to_f64(&((&a + &b) / Rat::from_integer(2.into())));
        Ok(Arc::new(NumberField {
            minpoly_int: minpoly,
            minpoly: f,
            lo,
            hi,
            root_approx,
        }))
    }

    /// Degree-1 field, i.e. the rationals themselves.
    pub fn rational() -> Arc<NumberField> {
        NumberField::new(
            vec![BigInt::zero(), BigInt::one()],
            Rat::from_integer((-1).into()),
            Rat::one(),
        )
        .expect("Q as a trivial field")
    }

    pub fn degree(&self) -> usize {
        self.minpoly_int.len() - 1
    }

    pub fn minpoly_coeffs(&self) -> &[BigInt] {
        &self.minpoly_int
    }

    pub fn isolation_interval(&self) -> (&Rat, &Rat) {
        (&self.lo, &self.hi)
    }

    pub fn root_approx(&self) -> f64 {
        self.root_approx
    }
}

/// Element of a number field, as coefficients of 1, alpha, ..., alpha^(d-1).
#[derive(Clone, Debug)]
pub struct NFElem {
    pub field: Arc<NumberField>,
    coeffs: Vec<Rat>,
}

impl PartialEq for NFElem {
    fn eq(&self, other: &Self) -> bool {
        *self.field == *other.field && self.coeffs == other.coeffs
    }
}

impl NFElem {
    pub fn new(field: Arc<NumberField>, mut coeffs: Vec<Rat>) -> Result<NFElem> {
        let d = field.degree();
        if coeffs.len() > d {
            // reduce modulo the minimal polynomial
            let p = PolyQ::from_coeffs(coeffs);
            let (_, r) = p.divrem(&field.minpoly);
            coeffs = r.coeffs().to_vec();
        }
        coeffs.resize(field.degree(), Rat::zero());
        Ok(NFElem { field, coeffs })
    }

    pub fn from_rat(field: &Arc<NumberField>, r: Rat) -> NFElem {
        let mut c = vec![Rat::zero(); field.degree()];
        c[0] = r;
        NFElem {
            field: field.clone(),
            coeffs: c,
        }
    }

    pub fn zero(field: &Arc<NumberField>) -> NFElem {
        Self::from_rat(field, Rat::zero())
    }

    pub fn one(field: &Arc<NumberField>) -> NFElem {
        Self::from_rat(field, Rat::one())
    }

    /// The generator alpha itself.
    pub fn alpha(field: &Arc<NumberField>) -> NFElem {
        let d = field.degree();
        let mut c = vec![Rat::zero(); d];
        if d == 1 {
            // alpha is the rational root of the degree-1 minimal polynomial
            c[0] = -Rat::from_integer(field.minpoly_int[0].clone());
        } else {
            c[1] = Rat::one();
        }
        NFElem {
            field: field.clone(),
            coeffs: c,
        }
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn is_rational(&self) -> bool {
        self.coeffs[1..].iter().all(|c| c.is_zero())
    }

    pub fn as_rational(&self) -> Option<Rat> {
        if self.is_rational() {
            Some(self.coeffs[0].clone())
        } else {
            None
        }
    }

    fn same_field(&self, o: &NFElem) {
        assert!(*self.field == *o.field, "number field mismatch");
    }

    pub fn add(&self, o: &NFElem) -> NFElem {
        self.same_field(o);
        NFElem {
            field: self.field.clone(),
            coeffs: self
                .coeffs
                .iter()
                .zip(&o.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, o: &NFElem) -> NFElem {
        self.same_field(o);
        NFElem {
            field: self.field.clone(),
            coeffs: self
                .coeffs
                .iter()
                .zip(&o.coeffs)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn neg(&self) -> NFElem {
        NFElem {
            field: self.field.clone(),
            coeffs: self.coeffs.iter().map(|a| -a).collect(),
        }
    }

    pub fn mul(&self, o: &NFElem) -> NFElem {
        self.same_field(o);
        let p = PolyQ::from_coeffs(self.coeffs.clone()).mul(&PolyQ::from_coeffs(o.coeffs.clone()));
        let (_, r) = p.divrem(&self.field.minpoly);
        let mut c = r.coeffs().to_vec();
        c.resize(self.field.degree(), Rat::zero());
        NFElem {
            field: self.field.clone(),
            coeffs: c,
        }
    }

    pub fn mul_rat(&self, s: &Rat) -> NFElem {
        NFElem {
            field: self.field.clone(),
            coeffs: self.coeffs.iter().map(|a| a * s).collect(),
        }
    }

    /// Multiplicative inverse via the extended Euclidean algorithm; the
    /// minimal polynomial is irreducible so every nonzero element is a unit.
    pub fn inv(&self) -> NFElem {
        assert!(!self.is_zero(), "inverse of zero");
        let a = PolyQ::from_coeffs(self.coeffs.clone());
        let m = &self.field.minpoly;
        // extended euclid: s*a + t*m = gcd
        let (mut r0, mut r1) = (a, m.clone());
        let (mut s0, mut s1) = (PolyQ::one(), PolyQ::zero());
        while !r1.is_zero() {
            let (q, r) = r0.divrem(&r1);
            let s = s0.sub(&q.mul(&s1));
            r0 = r1;
            r1 = r;
            s0 = s1;
            s1 = s;
        }
        debug_assert!(r0.is_constant() && !r0.is_zero());
        let scale = Rat::one() / r0.lc();
        let inv = s0.mul_rat(&scale);
        let (_, rem) = inv.divrem(m);
        let mut c = rem.coeffs().to_vec();
        c.resize(self.field.degree(), Rat::zero());
        NFElem {
            field: self.field.clone(),
            coeffs: c,
        }
    }

    pub fn div(&self, o: &NFElem) -> NFElem {
        self.mul(&o.inv())
    }

    /// Real embedding via the approximated root.
    pub fn embed(&self) -> f64 {
        let mut acc = 0.0;
        for c in self.coeffs.iter().rev() {
            acc = acc * self.field.root_approx() + rat_to_f64(c);
        }
        acc
    }
}

impl FieldScalar for NFElem {
    fn fs_zero(like: &Self) -> Self {
        NFElem::zero(&like.field)
    }
    fn fs_one(like: &Self) -> Self {
        NFElem::one(&like.field)
    }
    fn fs_is_zero(&self) -> bool {
        self.is_zero()
    }
    fn fs_add(&self, o: &Self) -> Self {
        self.add(o)
    }
    fn fs_sub(&self, o: &Self) -> Self {
        self.sub(o)
    }
    fn fs_mul(&self, o: &Self) -> Self {
        self.mul(o)
    }
    fn fs_div(&self, o: &Self) -> Self {
        self.div(o)
    }
    fn fs_neg(&self) -> Self {
        self.neg()
    }
}

/// Split a vector with number field entries into its rational component
/// vectors: v = sum_j alpha^j w_j. All entries must share one field.
pub fn nf_components(v: &[NFElem]) -> Result<Vec<VecQ>> {
    let Some(first) = v.first() else {
        return Ok(vec![]);
    };
    let d = first.field.degree();
    for e in v {
        if *e.field != *first.field {
            return Err(Error::FieldMismatch);
        }
    }
    Ok((0..d)
        .map(|j| v.iter().map(|e| e.coeffs()[j].clone()).collect())
        .collect())
}
