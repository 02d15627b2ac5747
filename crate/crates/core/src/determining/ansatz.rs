use nalgebra::DMatrix;

use super::verify::residual_box;
use super::{criterion_residual, verify_generator, DeterminingError, EvolutionPDE, Mode, VerificationReport};
use crate::expr::{simplify, Expr, Number};
use crate::jet::VectorField;

#[derive(Clone, Debug, PartialEq)]
pub struct AnsatzOptions {
    /// Tolerance for re-verifying every returned field.
    pub tol: f64,
    pub seed: u64,
    /// Singular values at or below `sv_threshold · σ_max` count as zero.
    pub sv_threshold: f64,
    /// Largest denominator tried when rounding coefficients to rationals.
    pub max_den: i64,
    pub round_tol: f64,
    /// Fresh samplings tried after the first one fails to verify.
    pub retries: usize,
    /// Sample points per unknown coefficient.
    pub points_per_unknown: usize,
}

impl Default for AnsatzOptions {
    fn default() -> Self {
        AnsatzOptions {
            tol: 1e-8,
            seed: 42,
            sv_threshold: 1e-8,
            max_den: 64,
            round_tol: 1e-8,
            retries: 3,
            points_per_unknown: 4,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AnsatzSolution {
    /// A basis of the symmetries spanned by the bases, in reduced row
    /// echelon form over the unknown coefficients.
    pub fields: Vec<VectorField>,
    /// Coefficients of each field over the concatenated bases (ξ, then η, then φ).
    pub coefficients: Vec<Vec<Number>>,
    pub reports: Vec<VerificationReport>,
    pub singular_values: Vec<f64>,
    pub unknowns: usize,
    pub seed_used: u64,
}

/// Find every field `Σ aᵢ ξᵢ ∂x + Σ bⱼ ηⱼ ∂t + Σ cₖ φₖ ∂u` that is a symmetry
/// of `pde`, as the numeric nullspace of the evolution-mode residual sampled
/// at random points.
pub fn solve_ansatz(pde: &EvolutionPDE, bases: &[Vec<Expr>; 3], opts: &AnsatzOptions) -> Result<AnsatzSolution, DeterminingError> {
    let mut elements = Vec::new();
    for b in &bases[0] {
        elements.push(VectorField::new(b.clone(), Expr::zero(), Expr::zero()));
    }
    for b in &bases[1] {
        elements.push(VectorField::new(Expr::zero(), b.clone(), Expr::zero()));
    }
    for b in &bases[2] {
        elements.push(VectorField::new(Expr::zero(), Expr::zero(), b.clone()));
    }
    let n = elements.len();
    if n == 0 {
        return Ok(AnsatzSolution {
            fields: Vec::new(),
            coefficients: Vec::new(),
            reports: Vec::new(),
            singular_values: Vec::new(),
            unknowns: 0,
            seed_used: opts.seed,
        });
    }
    let residuals: Vec<Expr> = elements
        .iter()
        .map(|x| criterion_residual(pde, x, Mode::Evolution))
        .collect::<Result<_, _>>()?;
    let refs: Vec<&Expr> = residuals.iter().collect();
    let sampler = residual_box(&Expr::add(residuals.clone()));
    let points = (opts.points_per_unknown.max(3)) * n;
    for attempt in 0..=opts.retries {
        let seed = opts.seed.wrapping_add(attempt as u64);
        let mut data: Vec<f64> = Vec::with_capacity(points * n);
        sampler.for_each_point(&refs, points, seed, |_, v| {
            let scale = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
            let s = if scale > 0.0 { 1.0 / scale } else { 1.0 };
            data.extend(v.iter().map(|x| x * s));
        })?;
        let (null, sv) = nullspace(&DMatrix::from_row_slice(points, n, &data), opts.sv_threshold);
        let coefficients: Vec<Vec<Number>> = rref(null)
            .into_iter()
            .map(|row| row.into_iter().map(|v| round(v, opts)).collect())
            .collect();
        let fields: Vec<VectorField> = coefficients.iter().map(|c| combine(&elements, c)).collect();
        let reports: Vec<VerificationReport> = fields
            .iter()
            .map(|f| verify_generator(pde, f, opts.tol, seed))
            .collect();
        if reports.iter().all(|r| r.pass) {
            return Ok(AnsatzSolution {
                fields,
                coefficients,
                reports,
                singular_values: sv,
                unknowns: n,
                seed_used: seed,
            });
        }
    }
    Err(DeterminingError::RankDeficientSampling {
        attempts: opts.retries + 1,
    })
}

fn combine(elements: &[VectorField], c: &[Number]) -> VectorField {
    let mut acc = VectorField::zero();
    for (x, k) in elements.iter().zip(c) {
        if !k.is_zero() {
            acc = acc.add(&x.scale(&Expr::Num(k.clone())));
        }
    }
    acc.map(simplify)
}

fn round(v: f64, opts: &AnsatzOptions) -> Number {
    if v.abs() < opts.round_tol {
        return Number::zero();
    }
    Number::rationalize(v, opts.max_den, opts.round_tol).unwrap_or(Number::Float(v))
}

/// Right-singular vectors with singular value at most `rel · σ_max`, after
/// column normalization. Returns the vectors (as rows, in the original
/// column scaling) and all singular values.
fn nullspace(a: &DMatrix<f64>, rel: f64) -> (Vec<Vec<f64>>, Vec<f64>) {
    let n = a.ncols();
    let mut scale = vec![1.0; n];
    let mut m = a.clone();
    for j in 0..n {
        let norm = m.column(j).norm();
        if norm > 0.0 {
            scale[j] = 1.0 / norm;
            m.column_mut(j).scale_mut(1.0 / norm);
        }
    }
    let svd = m.svd(false, true);
    let v_t = svd.v_t.expect("requested V^T");
    let sv: Vec<f64> = svd.singular_values.iter().copied().collect();
    let smax = sv.iter().fold(0.0f64, |a, &b| a.max(b));
    let mut out = Vec::new();
    for (i, &s) in sv.iter().enumerate() {
        if smax == 0.0 || s <= rel * smax {
            out.push((0..n).map(|j| v_t[(i, j)] * scale[j]).collect());
        }
    }
    // Fewer rows than columns: the missing singular values are zero.
    if v_t.nrows() < n {
        let full = DMatrix::<f64>::identity(n, n);
        let extra = complete_basis(&v_t, &full);
        for v in extra {
            out.push(v.iter().zip(&scale).map(|(x, s)| x * s).collect());
        }
    }
    let mut sorted = sv;
    sorted.sort_by(|a, b| b.partial_cmp(a).unwrap());
    (out, sorted)
}

/// Orthonormal vectors completing the row space of `v_t` to `R^n`.
fn complete_basis(v_t: &DMatrix<f64>, full: &DMatrix<f64>) -> Vec<Vec<f64>> {
    let n = full.ncols();
    let mut basis: Vec<Vec<f64>> = (0..v_t.nrows()).map(|i| v_t.row(i).iter().copied().collect()).collect();
    let mut extra = Vec::new();
    for k in 0..n {
        let mut v: Vec<f64> = full.row(k).iter().copied().collect();
        for b in &basis {
            let d: f64 = v.iter().zip(b).map(|(x, y)| x * y).sum();
            for (x, y) in v.iter_mut().zip(b) {
                *x -= d * y;
            }
        }
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-8 {
            v.iter_mut().for_each(|x| *x /= norm);
            basis.push(v.clone());
            extra.push(v);
        }
    }
    extra
}

/// Reduced row echelon form with partial pivoting; pivots normalized to 1.
fn rref(mut rows: Vec<Vec<f64>>) -> Vec<Vec<f64>> {
    let k = rows.len();
    if k == 0 {
        return rows;
    }
    let n = rows[0].len();
    let mut r = 0;
    for c in 0..n {
        if r == k {
            break;
        }
        let (p, best) = (r..k)
            .map(|i| (i, rows[i][c].abs()))
            .fold((r, 0.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if best < 1e-10 {
            continue;
        }
        rows.swap(r, p);
        let piv = rows[r][c];
        rows[r].iter_mut().for_each(|x| *x /= piv);
        for i in 0..k {
            if i != r {
                let f = rows[i][c];
                if f != 0.0 {
                    let pr = rows[r].clone();
                    for (x, y) in rows[i].iter_mut().zip(pr) {
                        *x -= f * y;
                    }
                }
            }
        }
        r += 1;
    }
    rows.truncate(r);
    rows
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rref_normalizes() {
        let r = rref(vec![vec![2.0, 4.0, 0.0], vec![1.0, 1.0, 1.0]]);
        assert_eq!(r.len(), 2);
        assert!((r[0][0] - 1.0).abs() < 1e-12 && r[0][1].abs() < 1e-12);
        assert!((r[1][1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn nullspace_of_rank_one() {
        let a = DMatrix::from_row_slice(3, 2, &[1.0, 2.0, 2.0, 4.0, -1.0, -2.0]);
        let (null, _) = nullspace(&a, 1e-8);
        assert_eq!(null.len(), 1);
        let v = &null[0];
        assert!((v[0] * 1.0 + v[1] * 2.0).abs() < 1e-10);
    }
}
