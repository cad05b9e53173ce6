//! Group inverses of `[[E, I], [F, 0]]` and `[[E, F], [I, 0]]`.

use super::lemmas::triangular_z;
use super::{blocks, hypothesis_error, noise_floor, settle, GroupFormulaBlocks, GroupOutcome, NoGroupInverse, Parts};
use crate::conditions::{ConditionId, PairContext};
use crate::error::Result;
use crate::formulas::TheoremId;
use crate::matrix::{Matrix, C64};

/// Checks hypotheses (error on failure) and existence clauses (regular
/// outcome on failure). `None` means the inverse exists.
pub(crate) fn gate(theorem: TheoremId, ctx: &PairContext, lambda: Option<C64>) -> Result<Option<NoGroupInverse>> {
    let hyp = ctx.report(theorem.hypotheses(), lambda);
    if !hyp.overall {
        return Err(hypothesis_error(theorem.name(), hyp));
    }
    let report = ctx.report(theorem.existence(), lambda);
    if report.overall {
        return Ok(None);
    }
    let failed = report.failures().map(|e| e.name.clone()).collect();
    Ok(Some(NoGroupInverse { failed, report }))
}

/// Inverse of a matrix that is lower triangular relative to the idempotent
/// `e`: `x^# = a^D + Z + d^D` with `a = e x e`, `c = (1−e) x e`,
/// `d = (1−e) x (1−e)`.
pub(crate) fn corner_inverse(x: &Matrix, e: &Matrix, tol: f64) -> Result<Matrix> {
    let q = &Matrix::identity(x.rows()) - e;
    let a = &(e * x) * e;
    let c = &(&q * x) * e;
    let d = &(&q * x) * &q;
    let floor = noise_floor(&[e, x, e]);
    let ap = Parts::of_scaled(&a, tol, floor)?;
    let dp = Parts::of_scaled(&d, tol, floor)?;
    let z = triangular_z(&ap, &dp, &c);
    Ok(&(&ap.d + &z) + &dp.d)
}

/// Printed `[[E, I], [F, 0]]^#` under `FEF^π = 0`.
fn row_display(ctx: &PairContext) -> Matrix {
    let (e, f) = (&ctx.e.x, &ctx.f.x);
    let fs = &ctx.f.d;
    let edfpi = &ctx.e.d * &ctx.f.pi;
    let ffs = f * fs;
    blocks(
        &edfpi,
        &(&(fs + &(&edfpi * &edfpi)) - &(&(&edfpi * e) * fs)),
        &ffs,
        &-(&(&ffs * e) * fs),
    )
}

/// Derivation for `[[E, I], [F, 0]]^#`: `M` is lower triangular relative to
/// `diag(FF^#, I)`.
fn row_derivation(ctx: &PairContext) -> Result<Matrix> {
    let n = ctx.e.x.rows();
    let z = Matrix::zeros(n, n);
    let id = Matrix::identity(n);
    let m = blocks(&ctx.e.x, &id, &ctx.f.x, &z);
    let idem = blocks(&(&ctx.f.x * &ctx.f.d), &z, &z, &id);
    corner_inverse(&m, &idem, ctx.tol)
}

fn row_settled(ctx: &PairContext) -> Result<(Matrix, super::Diagnostics)> {
    Ok(settle("display", row_display(ctx), "proof", row_derivation(ctx)?))
}

/// Group inverse of `[[E, I], [F, 0]]` under `FEF^π = 0`; exists iff `F` is
/// group invertible and `E^πF^π = 0`.
pub fn thm31_group(e: &Matrix, f: &Matrix, tol: f64) -> Result<GroupOutcome> {
    let ctx = PairContext::new(e, f, tol)?;
    if let Some(no) = gate(TheoremId::Thm31, &ctx, None)? {
        return Ok(GroupOutcome::NoGroupInverse(no));
    }
    let (full, diag) = row_settled(&ctx)?;
    Ok(GroupOutcome::Exists(GroupFormulaBlocks::from_full(&full, diag)))
}

/// Group inverse of `[[E, F], [I, 0]]` under `FEF^π = 0`, by the printed
/// blocks and by similarity with `[[E, I], [F, 0]]`.
pub fn cor32_group(e: &Matrix, f: &Matrix, tol: f64) -> Result<GroupOutcome> {
    let ctx = PairContext::new(e, f, tol)?;
    if let Some(no) = gate(TheoremId::Cor32, &ctx, None)? {
        return Ok(GroupOutcome::NoGroupInverse(no));
    }
    let n = e.rows();
    let (z, id) = (Matrix::zeros(n, n), Matrix::identity(n));
    let (ex, fs) = (&ctx.e.x, &ctx.f.d);
    let fpi = &ctx.f.pi;
    let edfpi = &ctx.e.d * fpi;
    let fpi_ed_fpi = fpi * &edfpi;
    let tail = &(fs + &(&edfpi * &edfpi)) - &(&(&edfpi * ex) * fs);
    let display = blocks(
        &fpi_ed_fpi,
        &(&id - &(&fpi_ed_fpi * ex)),
        &tail,
        &(&edfpi - &(&tail * ex)),
    );

    let (inner, mut inner_diag) = row_settled(&ctx)?;
    let p_inv = blocks(ex, &id, &id, &z);
    let p = blocks(&z, &id, &id, &-ex);
    let similar = &(&p_inv * &inner) * &p;

    let (full, mut diag) = settle("display", display, "similarity", similar);
    if inner_diag.has_discrepancy() {
        diag.notes.push("row-form inverse used the derivation".into());
    }
    diag.notes.append(&mut inner_diag.notes);
    Ok(GroupOutcome::Exists(GroupFormulaBlocks::from_full(&full, diag)))
}

/// Printed `[[E, F], [I, 0]]^#` under `F^πEF = 0`.
fn column_display(ctx: &PairContext) -> Matrix {
    let (e, f) = (&ctx.e.x, &ctx.f.x);
    let fs = &ctx.f.d;
    let fpi_ed = &ctx.f.pi * &ctx.e.d;
    blocks(
        &fpi_ed,
        &(f * fs),
        &(&(fs + &(&fpi_ed * &fpi_ed)) - &(&(fs * e) * &fpi_ed)),
        &-(&(&(fs * e) * f) * fs),
    )
}

fn column_settled(ctx: &PairContext) -> Result<(Matrix, super::Diagnostics)> {
    let dual = row_derivation(&ctx.transposed())?.transpose();
    Ok(settle("display", column_display(ctx), "transpose", dual))
}

/// Group inverse of `[[E, F], [I, 0]]` under `F^πEF = 0`; exists iff `F` is
/// group invertible and `F^πE^π = 0`. Computed as the transpose of the row
/// form applied to `(Eᵀ, Fᵀ)`.
pub fn thm33_group(e: &Matrix, f: &Matrix, tol: f64) -> Result<GroupOutcome> {
    let ctx = PairContext::new(e, f, tol)?;
    if let Some(no) = gate(TheoremId::Thm33, &ctx, None)? {
        return Ok(GroupOutcome::NoGroupInverse(no));
    }
    let (full, diag) = column_settled(&ctx)?;
    Ok(GroupOutcome::Exists(GroupFormulaBlocks::from_full(&full, diag)))
}

/// Group inverse of `[[E, I], [F, 0]]` under `F^πEF = 0`, by the printed
/// blocks and by similarity with `[[E, F], [I, 0]]`.
pub fn cor34_group(e: &Matrix, f: &Matrix, tol: f64) -> Result<GroupOutcome> {
    let ctx = PairContext::new(e, f, tol)?;
    if let Some(no) = gate(TheoremId::Cor34, &ctx, None)? {
        return Ok(GroupOutcome::NoGroupInverse(no));
    }
    let n = e.rows();
    let (z, id) = (Matrix::zeros(n, n), Matrix::identity(n));
    let (ex, fs) = (&ctx.e.x, &ctx.f.d);
    let fpi = &ctx.f.pi;
    let fpi_ed = fpi * &ctx.e.d;
    let top_right = &(fs + &(&fpi_ed * &fpi_ed)) - &(&(fs * ex) * &fpi_ed);
    let display = blocks(
        &(&fpi_ed * fpi),
        &top_right,
        &(&id - &(&(&(ex * fpi) * &ctx.e.d) * fpi)),
        &(&(&(&fpi_ed - &(ex * fs)) - &(&(ex * &fpi_ed) * &fpi_ed)) + &(&(&(ex * fs) * ex) * &fpi_ed)),
    );

    let (inner, mut inner_diag) = column_settled(&ctx)?;
    let p_inv = blocks(&z, &id, &id, &-ex);
    let p = blocks(ex, &id, &id, &z);
    let similar = &(&p_inv * &inner) * &p;

    let (full, mut diag) = settle("display", display, "similarity", similar);
    if inner_diag.has_discrepancy() {
        diag.notes.push("column-form inverse used the transpose route".into());
    }
    diag.notes.append(&mut inner_diag.notes);
    Ok(GroupOutcome::Exists(GroupFormulaBlocks::from_full(&full, diag)))
}

/// Fails with both residuals unless `EF = λFE` (least-squares `λ` when none
/// is given) or `EF² = FEF`. Returns which relation held.
pub(crate) fn require_commuting(theorem: TheoremId, ctx: &PairContext, lambda: Option<C64>) -> Result<String> {
    let mut report = ctx.report(&[ConditionId::EfLambdaFe, ConditionId::Ef2Fef], lambda);
    let lam = lambda.unwrap_or_else(|| ctx.best_lambda());
    if report.entries[0].pass {
        return Ok(format!("EF = lambda FE with lambda = {}{:+}i", lam.re, lam.im));
    }
    if report.entries[1].pass {
        return Ok("EF^2 = FEF".into());
    }
    report.overall = false;
    Err(hypothesis_error(theorem.name(), report))
}

/// Group inverse of `[[E, F], [I, 0]]` when `EF = λFE` or `EF² = FEF`, which
/// force `F^πEF = 0`.
pub fn cor35_group(e: &Matrix, f: &Matrix, lambda: Option<C64>, tol: f64) -> Result<GroupOutcome> {
    let ctx = PairContext::new(e, f, tol)?;
    let relation = require_commuting(TheoremId::Cor35, &ctx, lambda)?;
    if let Some(no) = gate(TheoremId::Cor35, &ctx, lambda)? {
        return Ok(GroupOutcome::NoGroupInverse(no));
    }
    // With F^#, either relation forces F^πEF = 0; confirm it numerically.
    let reduced = ctx.report(&[ConditionId::FpiEf], lambda);
    if !reduced.overall {
        return Err(hypothesis_error(TheoremId::Cor35.name(), reduced));
    }
    let (full, mut diag) = column_settled(&ctx)?;
    diag.notes.push(relation);
    Ok(GroupOutcome::Exists(GroupFormulaBlocks::from_full(&full, diag)))
}
