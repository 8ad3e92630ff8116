use crate::ratcore::matq::MatQ;
use crate::ratcore::rat::Rat;
use crate::{Error, Result};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Polynomial over the rationals, coefficients ascending, no trailing zeros.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PolyQ {
    c: Vec<Rat>,
}

impl PolyQ {
    pub fn zero() -> Self {
        PolyQ { c: vec![] }
    }

    pub fn one() -> Self {
        PolyQ { c: vec![Rat::one()] }
    }

    pub fn x() -> Self {
        PolyQ {
            c: vec![Rat::zero(), Rat::one()],
        }
    }

    pub fn constant(r: Rat) -> Self {
        Self::from_coeffs(vec![r])
    }

    pub fn from_coeffs(mut c: Vec<Rat>) -> Self {
        while c.last().is_some_and(|x| x.is_zero()) {
            c.pop();
        }
        PolyQ { c }
    }

    pub fn from_int_coeffs(c: &[i64]) -> Self {
        Self::from_coeffs(c.iter().map(|&x| Rat::from_integer(x.into())).collect())
    }

    pub fn from_bigint_coeffs(c: &[BigInt]) -> Self {
        Self::from_coeffs(c.iter().map(|x| Rat::from_integer(x.clone())).collect())
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.c
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.c.len() <= 1
    }

    /// Degree; zero polynomial reports 0.
    pub fn deg(&self) -> usize {
        self.c.len().saturating_sub(1)
    }

    pub fn coeff(&self, i: usize) -> Rat {
        self.c.get(i).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn lc(&self) -> Rat {
        self.c.last().cloned().unwrap_or_else(Rat::zero)
    }

    pub fn add(&self, o: &PolyQ) -> PolyQ {
        let n = self.c.len().max(o.c.len());
        Self::from_coeffs((0..n).map(|i| self.coeff(i) + o.coeff(i)).collect())
    }

    pub fn sub(&self, o: &PolyQ) -> PolyQ {
        let n = self.c.len().max(o.c.len());
        Self::from_coeffs((0..n).map(|i| self.coeff(i) - o.coeff(i)).collect())
    }

    pub fn neg(&self) -> PolyQ {
        PolyQ {
            c: self.c.iter().map(|x| -x).collect(),
        }
    }

    pub fn mul(&self, o: &PolyQ) -> PolyQ {
        if self.is_zero() || o.is_zero() {
            return Self::zero();
        }
        let mut c = vec![Rat::zero(); self.c.len() + o.c.len() - 1];
        for (i, a) in self.c.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.c.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        Self::from_coeffs(c)
    }

    pub fn mul_rat(&self, s: &Rat) -> PolyQ {
        Self::from_coeffs(self.c.iter().map(|x| x * s).collect())
    }

    pub fn pow(&self, e: usize) -> PolyQ {
        let mut out = Self::one();
        for _ in 0..e {
            out = out.mul(self);
        }
        out
    }

    /// Euclidean division; divisor must be nonzero.
    pub fn divrem(&self, d: &PolyQ) -> (PolyQ, PolyQ) {
        assert!(!d.is_zero(), "division by zero polynomial");
        let mut rem = self.c.clone();
        if rem.len() < d.c.len() {
            return (Self::zero(), self.clone());
        }
        let mut quo = vec![Rat::zero(); rem.len() - d.c.len() + 1];
        let dlc = d.lc();
        for k in (0..quo.len()).rev() {
            let lead = rem[k + d.c.len() - 1].clone();
            if lead.is_zero() {
                continue;
            }
            let q = lead / &dlc;
            for (j, dc) in d.c.iter().enumerate() {
                let t = &q * dc;
                rem[k + j] -= t;
            }
            quo[k] = q;
        }
        (Self::from_coeffs(quo), Self::from_coeffs(rem))
    }

    /// Exact division; panics if the remainder is nonzero.
    pub fn exact_div(&self, d: &PolyQ) -> PolyQ {
        let (q, r) = self.divrem(d);
        assert!(r.is_zero(), "inexact polynomial division");
        q
    }

    /// Monic gcd; gcd(0, 0) = 0.
    pub fn gcd(&self, o: &PolyQ) -> PolyQ {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let (_, r) = a.divrem(&b);
            a = b;
            b = r;
        }
        if a.is_zero() {
            a
        } else {
            a.monic()
        }
    }

    pub fn derivative(&self) -> PolyQ {
        if self.c.len() <= 1 {
            return Self::zero();
        }
        Self::from_coeffs(
            self.c[1..]
                .iter()
                .enumerate()
                .map(|(i, x)| x * Rat::from_integer((i as i64 + 1).into()))
                .collect(),
        )
    }

    pub fn eval(&self, x: &Rat) -> Rat {
        let mut acc = Rat::zero();
        for c in self.c.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        let mut acc = 0.0;
        for c in self.c.iter().rev() {
            acc = acc * x + c.to_f64().unwrap();
        }
        acc
    }

    /// Evaluate at a square matrix by Horner.
    pub fn eval_mat(&self, m: &MatQ) -> MatQ {
        let n = m.nrows;
        let mut acc = MatQ::zeros(n, n);
        for c in self.c.iter().rev() {
            acc = m.mul(&acc);
            for i in 0..n {
                let v = acc.at(i, i) + c;
                acc.set(i, i, v);
            }
        }
        acc
    }

    pub fn monic(&self) -> PolyQ {
        if self.is_zero() {
            return self.clone();
        }
        let inv = Rat::one() / self.lc();
        self.mul_rat(&inv)
    }
}

fn bigint_sqrt_ceil(n: &BigInt) -> BigInt {
    let s = n.sqrt();
    if &(&s * &s) == n {
        s
    } else {
        s + 1
    }
}

/// Primitive integer coefficients with positive leading coefficient.
fn to_primitive_int(p: &PolyQ) -> Vec<BigInt> {
    assert!(!p.is_zero());
    let mut den = BigInt::one();
    for c in p.coeffs() {
        den = den.lcm(c.denom());
    }
    let mut ints: Vec<BigInt> = p
        .coeffs()
        .iter()
        .map(|c| c.numer() * (&den / c.denom()))
        .collect();
    let mut g = BigInt::zero();
    for c in &ints {
        g = g.gcd(c);
    }
    if ints.last().unwrap().is_negative() {
        g = -g;
    }
    for c in ints.iter_mut() {
        *c /= &g;
    }
    ints
}

fn pz_deg(p: &[BigInt]) -> usize {
    p.len() - 1
}

fn pz_eval(p: &[BigInt], x: i64) -> BigInt {
    let x = BigInt::from(x);
    let mut acc = BigInt::zero();
    for c in p.iter().rev() {
        acc = acc * &x + c;
    }
    acc
}

/// Positive divisors, ascending.
fn divisors(n: &BigInt) -> Vec<BigInt> {
    let n = n.abs();
    assert!(!n.is_zero());
    let mut small = Vec::new();
    let mut large = Vec::new();
    if let Some(v) = n.to_i64() {
        let mut i = 1i64;
        while i * i <= v {
            if v % i == 0 {
                small.push(BigInt::from(i));
                if i * i != v {
                    large.push(BigInt::from(v / i));
                }
            }
            i += 1;
        }
    } else {
        let mut i = BigInt::one();
        while &i * &i <= n {
            if n.mod_floor(&i).is_zero() {
                small.push(i.clone());
                if &(&i * &i) != &n {
                    large.push(&n / &i);
                }
            }
            i += 1;
        }
    }
    large.reverse();
    small.extend(large);
    small
}

fn pq_from_int(p: &[BigInt]) -> PolyQ {
    PolyQ::from_bigint_coeffs(p)
}

/// Linear factor q*x - r from a rational root r/q, primitive, or None.
fn rational_root_factor(p: &[BigInt]) -> Option<Vec<BigInt>> {
    let c0 = &p[0];
    let lc = &p[pz_deg(p)];
    assert!(!c0.is_zero());
    let pq = pq_from_int(p);
    for num in divisors(c0) {
        for den in divisors(lc) {
            if num.gcd(&den) != BigInt::one() {
                continue;
            }
            for sign in [1i64, -1] {
                let root = Rat::new(&num * BigInt::from(sign), den.clone());
                if pq.eval(&root).is_zero() {
                    return Some(vec![-(&num * BigInt::from(sign)), den.clone()]);
                }
            }
        }
    }
    None
}

/// Mignotte-style bound on coefficients of any degree-k integer factor.
fn mignotte_bound(p: &[BigInt], k: usize) -> BigInt {
    let norm2: BigInt = p.iter().map(|c| c * c).sum();
    (BigInt::one() << k) * bigint_sqrt_ceil(&norm2)
}

/// Search for a degree-k integer factor by interpolating through divisor
/// tuples of the values at k+1 integer points. Complete: any true factor's
/// value tuple is enumerated, so None is a proof that no degree-k factor
/// exists (given none of lower degree does).
fn kronecker_search(p: &[BigInt], k: usize) -> Option<Vec<BigInt>> {
    let pq = pq_from_int(p);
    // pick the k+1 points with the smallest values to keep divisor lists short
    let reach = (k as i64) + 8;
    let mut pts: Vec<(i64, BigInt)> = (-reach..=reach).map(|x| (x, pz_eval(p, x))).collect();
    pts.sort_by(|a, b| a.1.magnitude().cmp(b.1.magnitude()).then(a.0.cmp(&b.0)));
    let mut pts: Vec<(i64, BigInt)> = pts.into_iter().take(k + 1).collect();
    pts.sort_by_key(|&(x, _)| x);

    // Lagrange basis over the chosen nodes
    let mut basis: Vec<PolyQ> = Vec::with_capacity(k + 1);
    for i in 0..=k {
        let mut li = PolyQ::one();
        for j in 0..=k {
            if i == j {
                continue;
            }
            let num = PolyQ::from_coeffs(vec![
                Rat::from_integer((-pts[j].0).into()),
                Rat::one(),
            ]);
            let den = Rat::from_integer((pts[i].0 - pts[j].0).into());
            li = li.mul(&num).mul_rat(&(Rat::one() / den));
        }
        basis.push(li);
    }

    let bound = mignotte_bound(p, k);
    let lc = p[pz_deg(p)].clone();
    // signed divisor lists; the first coordinate stays positive since g and
    // -g divide together
    let divlists: Vec<Vec<BigInt>> = pts
        .iter()
        .enumerate()
        .map(|(i, (_, v))| {
            let pos = divisors(v);
            if i == 0 {
                pos
            } else {
                let mut all = Vec::with_capacity(pos.len() * 2);
                for d in pos {
                    all.push(-&d);
                    all.push(d);
                }
                all
            }
        })
        .collect();

    let mut idx = vec![0usize; k + 1];
    loop {
        // candidate through (x_i, d_i)
        let mut g = PolyQ::zero();
        for i in 0..=k {
            g = g.add(&basis[i].mul_rat(&Rat::from_integer(divlists[i][idx[i]].clone())));
        }
        if g.deg() == k && !g.is_zero() {
            let ints: Option<Vec<BigInt>> = g
                .coeffs()
                .iter()
                .map(|c| if c.is_integer() { Some(c.to_integer()) } else { None })
                .collect();
            if let Some(gz) = ints {
                let ok_bound = gz.iter().all(|c| c.magnitude() <= bound.magnitude());
                let ok_lc = lc.mod_floor(&gz[k]).is_zero();
                if ok_bound && ok_lc {
                    let (_, r) = pq.divrem(&g);
                    if r.is_zero() {
                        let mut gz = gz;
                        let mut content = BigInt::zero();
                        for c in &gz {
                            content = content.gcd(c);
                        }
                        if gz[k].is_negative() {
                            content = -content;
                        }
                        for c in gz.iter_mut() {
                            *c /= &content;
                        }
                        return Some(gz);
                    }
                }
            }
        }
        // odometer
        let mut pos = 0;
        loop {
            if pos > k {
                return None;
            }
            idx[pos] += 1;
            if idx[pos] < divlists[pos].len() {
                break;
            }
            idx[pos] = 0;
            pos += 1;
        }
    }
}

/// Irreducible primitive integer factors of a squarefree primitive integer
/// polynomial with nonzero constant term.
fn factor_squarefree_int(p: Vec<BigInt>) -> Vec<Vec<BigInt>> {
    let deg = pz_deg(&p);
    if deg == 0 {
        return vec![];
    }
    if deg == 1 {
        return vec![p];
    }
    if let Some(lin) = rational_root_factor(&p) {
        let q = pq_from_int(&p).exact_div(&pq_from_int(&lin));
        let mut out = vec![lin];
        out.extend(factor_squarefree_int(to_primitive_int(&q)));
        return out;
    }
    for k in 2..=deg / 2 {
        if let Some(g) = kronecker_search(&p, k) {
            let q = pq_from_int(&p).exact_div(&pq_from_int(&g));
            let mut out = factor_squarefree_int(g);
            out.extend(factor_squarefree_int(to_primitive_int(&q)));
            return out;
        }
    }
    vec![p]
}

/// Yun's squarefree decomposition of a monic rational polynomial:
/// f = prod a_i^i with the a_i squarefree and pairwise coprime.
fn squarefree_parts(f: &PolyQ) -> Vec<(PolyQ, usize)> {
    let df = f.derivative();
    let g = f.gcd(&df);
    let mut c = f.exact_div(&g);
    let mut d = df.exact_div(&g).sub(&c.derivative());
    let mut out = Vec::new();
    let mut i = 1;
    while !c.is_constant() {
        let a = c.gcd(&d);
        if !a.is_constant() {
            out.push((a.clone(), i));
        }
        c = c.exact_div(&a);
        d = d.exact_div(&a).sub(&c.derivative());
        i += 1;
    }
    out
}

/// Factor a nonzero rational polynomial into monic irreducible factors with
/// multiplicities, times its leading coefficient. The factor search is an
/// exhaustive enumeration of integer factor candidates within the Mignotte
/// coefficient bound, so irreducibility of each returned factor is certified
/// rather than probabilistic.
pub fn factor_over_q(p: &PolyQ, degcap: usize) -> Result<Vec<(PolyQ, usize)>> {
    if p.is_zero() {
        return Err(Error::Validation("cannot factor the zero polynomial".into()));
    }
    if p.deg() > degcap {
        return Err(Error::DegreeCapExceeded {
            deg: p.deg(),
            cap: degcap,
        });
    }
    let mut factors: Vec<(PolyQ, usize)> = Vec::new();
    let mut coeffs = p.coeffs().to_vec();
    let mut xmult = 0usize;
    while coeffs.first().is_some_and(|c| c.is_zero()) {
        coeffs.remove(0);
        xmult += 1;
    }
    if xmult > 0 {
        factors.push((PolyQ::x(), xmult));
    }
    let rest = PolyQ::from_coeffs(coeffs).monic();
    if !rest.is_constant() {
        for (part, mult) in squarefree_parts(&rest) {
            let pz = to_primitive_int(&part);
            for f in factor_squarefree_int(pz) {
                factors.push((pq_from_int(&f).monic(), mult));
            }
        }
    }
    factors.sort_by(|a, b| {
        a.0.deg()
            .cmp(&b.0.deg())
            .then_with(|| a.0.coeffs().cmp(b.0.coeffs()))
    });
    // reconstruction check: lc * prod f_i^m_i == p
    let mut prod = PolyQ::constant(p.lc());
    for (f, m) in &factors {
        prod = prod.mul(&f.pow(*m));
    }
    if &prod != p {
        return Err(Error::Validation(
            "factorization failed to reconstruct the input".into(),
        ));
    }
    Ok(factors)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratcore::rat::rat;

    fn poly(c: &[i64]) -> PolyQ {
        PolyQ::from_int_coeffs(c)
    }

    #[test]
    fn divrem_gcd() {
        let a = poly(&[-1, 0, 1]); // x^2-1
        let b = poly(&[1, 1]); // x+1
        let (q, r) = a.divrem(&b);
        assert!(r.is_zero());
        assert_eq!(q, poly(&[-1, 1]));
        assert_eq!(a.gcd(&b), b.monic());
        assert_eq!(poly(&[2, 2]).gcd(&PolyQ::zero()), poly(&[1, 1]));
    }

    #[test]
    fn factor_frozen_examples() {
        // x^2 - 1 = (x-1)(x+1)
        let f = factor_over_q(&poly(&[-1, 0, 1]), 12).unwrap();
        assert_eq!(
            f,
            vec![(poly(&[-1, 1]), 1), (poly(&[1, 1]), 1)]
        );
        // x^2 + x + 1 irreducible
        let f = factor_over_q(&poly(&[1, 1, 1]), 12).unwrap();
        assert_eq!(f, vec![(poly(&[1, 1, 1]), 1)]);
        // x^4 - 4 = (x^2-2)(x^2+2): both quadratics have no rational root
        // and x^4-4 has none, so this is the full splitting over Q
        let f = factor_over_q(&poly(&[-4, 0, 0, 0, 1]), 12).unwrap();
        assert_eq!(
            f,
            vec![(poly(&[-2, 0, 1]), 1), (poly(&[2, 0, 1]), 1)]
        );
    }

    #[test]
    fn factor_multiplicities_and_content() {
        // 2(x-1)^2 (x^2+1)
        let p = poly(&[-1, 1]).pow(2).mul(&poly(&[1, 0, 1])).mul_rat(&rat(2, 1));
        let f = factor_over_q(&p, 12).unwrap();
        assert_eq!(f, vec![(poly(&[-1, 1]), 2), (poly(&[1, 0, 1]), 1)]);
        // x^3: pure power of x
        let f = factor_over_q(&poly(&[0, 0, 0, 1]), 12).unwrap();
        assert_eq!(f, vec![(PolyQ::x(), 3)]);
    }

    #[test]
    fn factor_reconstruction_property() {
        // a couple of scrambled products, checked against reconstruction
        let cases = [
            poly(&[6, -5, 1]),          // (x-2)(x-3)
            poly(&[1, 2, 3, 2, 1]),     // (x^2+x+1)^2
            poly(&[4, 0, 5, 0, 1]),     // (x^2+1)(x^2+4)
            poly(&[-6, 1, 1]).mul_rat(&rat(1, 3)),
        ];
        for p in cases {
            let f = factor_over_q(&p, 12).unwrap();
            let mut prod = PolyQ::constant(p.lc());
            for (fi, m) in &f {
                assert_eq!(fi.lc(), rat(1, 1), "factor not monic");
                prod = prod.mul(&fi.pow(*m));
            }
            assert_eq!(prod, p);
        }
    }

    #[test]
    fn degree_cap_enforced() {
        let p = PolyQ::x().pow(13);
        match factor_over_q(&p, 12) {
            Err(Error::DegreeCapExceeded { deg: 13, cap: 12 }) => {}
            other => panic!("expected degree cap error, got {other:?}"),
        }
    }
}
