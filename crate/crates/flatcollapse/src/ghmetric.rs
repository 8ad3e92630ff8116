//! Floating point verification of the metric collapse: orbit distances on
//! the flat quotient under partially scaled metrics, torus diameters, the
//! inequality chain comparing the scaled spaces with the exact collapsed
//! quotient, and the isometry with the conjugated group.

use crate::collapse::collapse;
use crate::crysgroup::CrystGroup;
use crate::latgeo::{subspace_lattice, RatSubspace};
use crate::ratcore::matq::MatQ;
use crate::ratcore::rat::Rat;
use crate::{Error, Result};
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type FMat = Vec<Vec<f64>>;

#[derive(Clone, Debug)]
pub struct MetricConfig {
    pub s_values: Vec<f64>,
    pub pair_count: usize,
    pub enum_radius: f64,
    pub tol: f64,
    pub seed: u64,
}

impl Default for MetricConfig {
    fn default() -> Self {
        MetricConfig {
            s_values: vec![1.0, 0.5, 0.25, 0.125, 0.0625],
            pair_count: 64,
            enum_radius: 4.0,
            tol: 1e-6,
            seed: 7,
        }
    }
}

fn fzeros(r: usize, c: usize) -> FMat {
    vec![vec![0.0; c]; r]
}

fn fidentity(n: usize) -> FMat {
    let mut m = fzeros(n, n);
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    m
}

fn fmul(a: &FMat, b: &FMat) -> FMat {
    let (r, k, c) = (a.len(), b.len(), if b.is_empty() { 0 } else { b[0].len() });
    let mut out = fzeros(r, c);
    for i in 0..r {
        for t in 0..k {
            let x = a[i][t];
            if x == 0.0 {
                continue;
            }
            for j in 0..c {
                out[i][j] += x * b[t][j];
            }
        }
    }
    out
}

fn fmat_vec(a: &FMat, v: &[f64]) -> Vec<f64> {
    a.iter()
        .map(|row| row.iter().zip(v).map(|(x, y)| x * y).sum())
        .collect()
}

fn ftranspose(a: &FMat) -> FMat {
    let (r, c) = (a.len(), if a.is_empty() { 0 } else { a[0].len() });
    let mut out = fzeros(c, r);
    for i in 0..r {
        for j in 0..c {
            out[j][i] = a[i][j];
        }
    }
    out
}

fn finverse(a: &FMat) -> Option<FMat> {
    let n = a.len();
    let mut m: Vec<Vec<f64>> = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { 1.0 } else { 0.0 }));
            r
        })
        .collect();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))?;
        if m[piv][col].abs() < 1e-12 {
            return None;
        }
        m.swap(col, piv);
        let d = m[col][col];
        for x in m[col].iter_mut() {
            *x /= d;
        }
        for i in 0..n {
            if i != col && m[i][col] != 0.0 {
                let f = m[i][col];
                let src = m[col].clone();
                for (x, s) in m[i].iter_mut().zip(&src) {
                    *x -= f * s;
                }
            }
        }
    }
    Some(m.into_iter().map(|r| r[n..].to_vec()).collect())
}

fn cholesky(a: &FMat) -> Option<FMat> {
    let n = a.len();
    let mut l = fzeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let mut s = a[i][j];
            for k in 0..j {
                s -= l[i][k] * l[j][k];
            }
            if i == j {
                if s <= 0.0 {
                    return None;
                }
                l[i][j] = s.sqrt();
            } else {
                l[i][j] = s / l[j][j];
            }
        }
    }
    Some(l)
}

fn quad(m: &FMat, z: &[f64]) -> f64 {
    let mut q = 0.0;
    for (i, zi) in z.iter().enumerate() {
        for (j, zj) in z.iter().enumerate() {
            q += zi * m[i][j] * zj;
        }
    }
    q
}

pub fn rat_to_f64(r: &Rat) -> f64 {
    r.to_f64().expect("rational fits in f64")
}

pub fn matq_to_f64(m: &MatQ) -> FMat {
    m.rows_vec()
        .iter()
        .map(|row| row.iter().map(rat_to_f64).collect())
        .collect()
}

pub fn vecq_to_f64(v: &[Rat]) -> Vec<f64> {
    v.iter().map(rat_to_f64).collect()
}

/// Gram orthogonal projector onto the row span of `basis`, in floats.
pub fn projector_f64(gram: &FMat, basis: &[Vec<f64>]) -> FMat {
    let n = gram.len();
    if basis.is_empty() {
        return fzeros(n, n);
    }
    let b = basis.to_vec();
    let bt = ftranspose(&b);
    let bg = fmul(&b, gram);
    let core = finverse(&fmul(&bg, &bt)).expect("independent basis rows");
    fmul(&fmul(&bt, &core), &bg)
}

/// A positive form with the precomputed data needed for closest point
/// enumeration: Cholesky factor as a sanity check and per axis box half
/// widths at unit radius from the diagonal of the inverse.
pub struct ScaledForm {
    pub mat: FMat,
    box_half: Vec<f64>,
}

impl ScaledForm {
    pub fn from_mat(mat: FMat) -> Result<ScaledForm> {
        let n = mat.len();
        cholesky(&mat).ok_or_else(|| Error::Validation("scaled form not positive definite".into()))?;
        let inv = finverse(&mat).ok_or_else(|| Error::Validation("singular form".into()))?;
        let box_half = (0..n).map(|i| inv[i][i].sqrt()).collect();
        Ok(ScaledForm { mat, box_half })
    }

    /// s² q(P_W z) + q(P_{W⊥} z) assembled from the Gram matrix and the
    /// projector onto the scaled directions.
    pub fn scaled(gram: &FMat, proj_w: &FMat, s: f64) -> Result<ScaledForm> {
        let n = gram.len();
        let mut perp = fidentity(n);
        for i in 0..n {
            for j in 0..n {
                perp[i][j] -= proj_w[i][j];
            }
        }
        let part_w = fmul(&fmul(&ftranspose(proj_w), gram), proj_w);
        let part_p = fmul(&fmul(&ftranspose(&perp), gram), &perp);
        let mut mat = fzeros(n, n);
        for i in 0..n {
            for j in 0..n {
                mat[i][j] = s * s * part_w[i][j] + part_p[i][j];
            }
        }
        ScaledForm::from_mat(mat)
    }

    /// min over integer vectors of ‖c − ℓ‖ in this form. The rounded point
    /// gives an a priori bound d₀; all lattice points within min(d₀, R+1)
    /// are enumerated through axis aligned boxes, which certifies the
    /// minimum whenever it does not exceed the configured radius.
    pub fn min_over_lattice(&self, c: &[f64], radius: f64, _tol: f64) -> Result<f64> {
        let n = c.len();
        if n == 0 {
            return Ok(0.0);
        }
        let rounded: Vec<f64> = c.iter().map(|x| x.round()).collect();
        let diff: Vec<f64> = c.iter().zip(&rounded).map(|(a, b)| a - b).collect();
        let d0 = quad(&self.mat, &diff).sqrt();
        let r = d0.min(radius + 1.0).max(1e-12);
        let mut lo = vec![0i64; n];
        let mut hi = vec![0i64; n];
        for i in 0..n {
            let w = r * self.box_half[i] + 1e-9;
            lo[i] = (c[i] - w).ceil() as i64;
            hi[i] = (c[i] + w).floor() as i64;
            if lo[i] > hi[i] {
                lo[i] = rounded[i] as i64;
                hi[i] = rounded[i] as i64;
            }
        }
        let mut best = d0 * d0;
        let mut ell = lo.clone();
        'outer: loop {
            let z: Vec<f64> = c.iter().zip(&ell).map(|(a, &l)| a - l as f64).collect();
            let q = quad(&self.mat, &z);
            if q < best {
                best = q;
            }
            for i in 0..n {
                ell[i] += 1;
                if ell[i] <= hi[i] {
                    continue 'outer;
                }
                ell[i] = lo[i];
            }
            break;
        }
        let d = best.max(0.0).sqrt();
        if d > radius {
            return Err(Error::RadiusTooSmall);
        }
        Ok(d)
    }
}

/// A crystallographic group with a scaled quadratic form, ready for orbit
/// distance queries on the quotient.
pub struct FlatSpace {
    n: usize,
    mats: Vec<FMat>,
    tvecs: Vec<Vec<f64>>,
    pub form: ScaledForm,
}

impl FlatSpace {
    /// `w_basis` spans the directions scaled by s (empty for none).
    pub fn new(g: &CrystGroup, w_basis: &[Vec<f64>], s: f64) -> Result<FlatSpace> {
        let gram = matq_to_f64(g.gram().mat());
        let proj = projector_f64(&gram, w_basis);
        let form = ScaledForm::scaled(&gram, &proj, s)?;
        let mats = (0..g.order()).map(|i| matq_to_f64(&g.mat_q(i))).collect();
        let tvecs = (0..g.order()).map(|i| vecq_to_f64(g.tvec(i))).collect();
        Ok(FlatSpace {
            n: g.dim(),
            mats,
            tvecs,
            form,
        })
    }

    /// Distance between the orbits of x and y: min over group elements
    /// (A, v̄+ℓ) of ‖x − (A y + v̄ + ℓ)‖ in the scaled form.
    pub fn distance(&self, x: &[f64], y: &[f64], cfg: &MetricConfig) -> Result<f64> {
        if self.n == 0 {
            return Ok(0.0);
        }
        let mut best = f64::INFINITY;
        for (a, v) in self.mats.iter().zip(&self.tvecs) {
            let ay = fmat_vec(a, y);
            let c: Vec<f64> = x
                .iter()
                .zip(ay.iter().zip(v))
                .map(|(xi, (ai, vi))| xi - ai - vi)
                .collect();
            let d = self.form.min_over_lattice(&c, cfg.enum_radius, cfg.tol)?;
            if d < best {
                best = d;
            }
        }
        Ok(best)
    }
}

pub fn flat_distance(
    g: &CrystGroup,
    w_basis: &[Vec<f64>],
    s: f64,
    x: &[f64],
    y: &[f64],
    cfg: &MetricConfig,
) -> Result<f64> {
    FlatSpace::new(g, w_basis, s)?.distance(x, y, cfg)
}

/// Diameter of the torus spanned by `lattice` (a basis of L̂ inside Ŵ)
/// under the form scaled by s along the span of `scale_basis`: the max
/// over a refining grid of the fundamental cell, with seeded jitter, of
/// the distance to the lattice. A lower bound estimate.
pub fn diameter_s(
    gram: &FMat,
    scale_basis: &[Vec<f64>],
    lattice: &[Vec<f64>],
    s: f64,
    cfg: &MetricConfig,
) -> Result<f64> {
    let k = lattice.len();
    if k == 0 {
        return Ok(0.0);
    }
    let proj = projector_f64(gram, scale_basis);
    let ms = ScaledForm::scaled(gram, &proj, s)?;
    // form on lattice coordinates
    let mut q = fzeros(k, k);
    for i in 0..k {
        let mi = fmat_vec(&ms.mat, &lattice[i]);
        for j in 0..k {
            q[i][j] = lattice[j].iter().zip(&mi).map(|(a, b)| a * b).sum();
        }
    }
    let qf = ScaledForm::from_mat(q)?;
    let mut m: usize = 2;
    while m.pow(k as u32) < 200 {
        m *= 2;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut prev = -1.0;
    loop {
        let total = m.pow(k as u32);
        let mut val: f64 = 0.0;
        let mut idx = vec![0usize; k];
        loop {
            let t: Vec<f64> = idx.iter().map(|&i| i as f64 / m as f64).collect();
            val = val.max(qf.min_over_lattice(&t, cfg.enum_radius, cfg.tol)?);
            let mut carry = true;
            for i in 0..k {
                idx[i] += 1;
                if idx[i] < m {
                    carry = false;
                    break;
                }
                idx[i] = 0;
            }
            if carry {
                break;
            }
        }
        for _ in 0..total / 5 {
            let t: Vec<f64> = (0..k).map(|_| rng.gen::<f64>()).collect();
            val = val.max(qf.min_over_lattice(&t, cfg.enum_radius, cfg.tol)?);
        }
        if prev >= 0.0 && (val - prev).abs() <= cfg.tol.max(1e-9) {
            return Ok(val.max(prev));
        }
        prev = val;
        if total * (1 << k) > (1 << 14) {
            return Ok(val);
        }
        m *= 2;
    }
}

#[derive(Clone, Debug)]
pub struct SRecord {
    pub s: f64,
    pub d_s: f64,
    pub max_chain_violation: f64,
    pub max_approx_defect: f64,
}

#[derive(Clone, Debug)]
pub struct MetricReport {
    pub records: Vec<SRecord>,
    pub pass: bool,
    pub tol: f64,
}

/// Check, over sampled point pairs, the chain
/// δ(Φx,Φy) ≤ ρ̂ˢ(x,y) ≤ ρˢ(x,y) ≤ δ(Φx,Φy) + 2d(s),
/// with δ measured on the exact collapsed group. `w_num` spans the scaled
/// directions, `what` is its closure (equal to W when W is rational).
pub fn verify_collapse_metric_closed(
    g: &CrystGroup,
    w_num: &[Vec<f64>],
    what: &RatSubspace,
    cfg: &MetricConfig,
) -> Result<MetricReport> {
    let cr = collapse(g, what)?;
    let gram = matq_to_f64(g.gram().mat());
    let n = g.dim();
    let what_num: Vec<Vec<f64>> = what.basis().iter().map(|v| vecq_to_f64(v)).collect();
    let (lhat, _) = subspace_lattice(what);
    let lhat_num: Vec<Vec<f64>> = lhat.basis_vectors().iter().map(|v| vecq_to_f64(v)).collect();

    // collapsed chart map: x ↦ coordinates of P_{W⊥} x in the chart basis
    let proj_hat = projector_f64(&gram, &what_num);
    let mut perp = fidentity(n);
    for i in 0..n {
        for j in 0..n {
            perp[i][j] -= proj_hat[i][j];
        }
    }
    let r = cr.chart.len();
    let chart_rows: Vec<Vec<f64>> = cr.chart.iter().map(|v| vecq_to_f64(v)).collect();
    let chart_cols = ftranspose(&chart_rows);
    let chart_gram = fmul(&fmul(&chart_rows, &gram), &chart_cols);
    let chart_inv = if r > 0 {
        finverse(&chart_gram).expect("chart basis independent")
    } else {
        fzeros(0, 0)
    };
    let cg = fmul(&chart_rows, &gram);
    let phi = |x: &[f64]| -> Vec<f64> {
        if r == 0 {
            return vec![];
        }
        let z = fmat_vec(&perp, x);
        fmat_vec(&chart_inv, &fmat_vec(&cg, &z))
    };

    let collapsed_space = FlatSpace::new(&cr.group, &[], 1.0)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let pairs: Vec<(Vec<f64>, Vec<f64>)> = (0..cfg.pair_count)
        .map(|_| {
            let x: Vec<f64> = (0..n).map(|_| rng.gen::<f64>()).collect();
            let y: Vec<f64> = (0..n).map(|_| rng.gen::<f64>()).collect();
            (x, y)
        })
        .collect();

    let mut records = Vec::new();
    let mut pass = true;
    for &s in &cfg.s_values {
        let space_w = FlatSpace::new(g, w_num, s)?;
        let space_hat = FlatSpace::new(g, &what_num, s)?;
        let d_s = diameter_s(&gram, w_num, &lhat_num, s, cfg)?;
        let mut max_viol = f64::NEG_INFINITY;
        let mut max_defect = f64::NEG_INFINITY;
        for (x, y) in &pairs {
            let rho = space_w.distance(x, y, cfg)?;
            let rho_hat = space_hat.distance(x, y, cfg)?;
            let delta = collapsed_space.distance(&phi(x), &phi(y), cfg)?;
            let v1 = delta - rho_hat;
            let v2 = rho_hat - rho;
            let v3 = rho - delta - 2.0 * d_s;
            max_viol = max_viol.max(v1).max(v2).max(v3);
            max_defect = max_defect.max((rho - delta).abs() - 2.0 * d_s);
        }
        if !max_viol.is_finite() {
            max_viol = 0.0;
            max_defect = 0.0;
        }
        pass &= max_viol <= cfg.tol && max_defect <= cfg.tol;
        records.push(SRecord {
            s,
            d_s,
            max_chain_violation: max_viol,
            max_approx_defect: max_defect,
        });
    }
    Ok(MetricReport {
        records,
        pass,
        tol: cfg.tol,
    })
}

pub fn verify_collapse_metric(
    g: &CrystGroup,
    w: &RatSubspace,
    cfg: &MetricConfig,
) -> Result<MetricReport> {
    let w_num: Vec<Vec<f64>> = w.basis().iter().map(|v| vecq_to_f64(v)).collect();
    verify_collapse_metric_closed(g, &w_num, w, cfg)
}

/// Compare ρˢ on π with the plain distance on the conjugated group
/// A_s π A_s⁻¹, whose lattice is A_s(ℤⁿ); the two are computed through
/// independent float paths and should agree to rounding.
pub fn conjugation_consistency(
    g: &CrystGroup,
    w: &RatSubspace,
    s: f64,
    cfg: &MetricConfig,
) -> Result<f64> {
    let n = g.dim();
    let gram = matq_to_f64(g.gram().mat());
    let w_num: Vec<Vec<f64>> = w.basis().iter().map(|v| vecq_to_f64(v)).collect();
    let p = projector_f64(&gram, &w_num);
    let mut a_s = fidentity(n);
    let mut a_s_inv = fidentity(n);
    for i in 0..n {
        for j in 0..n {
            a_s[i][j] += (s - 1.0) * p[i][j];
            a_s_inv[i][j] += (1.0 / s - 1.0) * p[i][j];
        }
    }
    let space = FlatSpace::new(g, &w_num, s)?;

    // conjugated data: point parts A_s A A_s⁻¹, translations A_s v̄,
    // lattice basis the columns of A_s, measured in the unscaled form
    let conj_mats: Vec<FMat> = (0..g.order())
        .map(|i| fmul(&fmul(&a_s, &matq_to_f64(&g.mat_q(i))), &a_s_inv))
        .collect();
    let conj_tvecs: Vec<Vec<f64>> = (0..g.order())
        .map(|i| fmat_vec(&a_s, &vecq_to_f64(g.tvec(i))))
        .collect();
    let q = fmul(&fmul(&ftranspose(&a_s), &gram), &a_s);
    let qf = ScaledForm::from_mat(q)?;

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut max_dev: f64 = 0.0;
    for _ in 0..cfg.pair_count {
        let x: Vec<f64> = (0..n).map(|_| rng.gen::<f64>()).collect();
        let y: Vec<f64> = (0..n).map(|_| rng.gen::<f64>()).collect();
        let d1 = space.distance(&x, &y, cfg)?;
        let xs = fmat_vec(&a_s, &x);
        let ys = fmat_vec(&a_s, &y);
        let mut d2 = f64::INFINITY;
        for (am, tv) in conj_mats.iter().zip(&conj_tvecs) {
            let ay = fmat_vec(am, &ys);
            let c: Vec<f64> = xs
                .iter()
                .zip(ay.iter().zip(tv))
                .map(|(xi, (ai, vi))| xi - ai - vi)
                .collect();
            // lattice coordinates: solve A_s μ = c, then minimize over ℤⁿ
            let mu = fmat_vec(&a_s_inv, &c);
            d2 = d2.min(qf.min_over_lattice(&mu, cfg.enum_radius, cfg.tol)?);
        }
        max_dev = max_dev.max((d1 - d2).abs());
    }
    Ok(max_dev)
}

pub fn report_csv(r: &MetricReport) -> String {
    let mut out = String::from("s,d_s,max_chain_violation,max_approx_defect\n");
    for rec in &r.records {
        out.push_str(&format!(
            "{:.16e},{:.16e},{:.16e},{:.16e}\n",
            rec.s, rec.d_s, rec.max_chain_violation, rec.max_approx_defect
        ));
    }
    out
}
