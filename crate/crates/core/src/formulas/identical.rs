//! Group inverses of `M = [[E, F], [F, 0]]`.

use super::group_family::{corner_inverse, gate, require_commuting};
use super::{blocks, hypothesis_error, settle, GroupFormulaBlocks, GroupOutcome};
use crate::conditions::{ConditionId, PairContext};
use crate::error::Result;
use crate::formulas::TheoremId;
use crate::matrix::{Matrix, C64};

/// Printed `M^#` under `FEF^π = 0`. `ctx.e.d` stands for `E^D`, which is
/// `E^#` when `E` is group invertible.
fn row_display(ctx: &PairContext) -> Matrix {
    let n = ctx.e.x.rows();
    let id = Matrix::identity(n);
    let (e, f, fs) = (&ctx.e.x, &ctx.f.x, &ctx.f.d);
    let fs2 = fs * fs;
    let epi_fpi = &ctx.e.pi * &ctx.f.pi;
    let edfpi = &ctx.e.d * &ctx.f.pi;
    let e_fs2 = e * &fs2;
    // g = E^πF^πE(F^#)², a = E^DF^π + g
    let g = &epi_fpi * &e_fs2;
    let a = &edfpi + &g;
    let keep = &id - &epi_fpi;
    let e_fs = e * fs;
    let mid = &(fs - &(&g * &e_fs)) - &(&edfpi * &e_fs);

    let gamma = &(&keep * &a) + &g;
    let delta = &(&keep * &mid) - &(&g * &e_fs);
    let lambda = &(&(&(f * &(&a * &a)) + fs) - &(&(f * &epi_fpi) * &(&e_fs2 * &e_fs2))) - &(&(f * &edfpi) * &e_fs2);
    let left = &(f * &edfpi) + &(f * &g);
    let right = &(fs - &(&(&(f * &g) * e) * &fs2)) - &(&(f * &edfpi) * &e_fs2);
    let xi = &(&left * &mid) - &(&right * &e_fs);
    blocks(&gamma, &delta, &lambda, &xi)
}

/// Derivation: `N = [[E, I], [F², 0]]` is lower triangular relative to
/// `diag(FF^#, I)`, and `M^# = [[E, I], [F, 0]] (N^#)² diag(I, F)`.
fn row_derivation(ctx: &PairContext) -> Result<Matrix> {
    let n = ctx.e.x.rows();
    let z = Matrix::zeros(n, n);
    let id = Matrix::identity(n);
    let (e, f) = (&ctx.e.x, &ctx.f.x);
    let nm = blocks(e, &id, &(f * f), &z);
    let idem = blocks(&(f * &ctx.f.d), &z, &z, &id);
    let ns = corner_inverse(&nm, &idem, ctx.tol)?;
    let left = blocks(e, &id, f, &z);
    let right = blocks(&id, &z, &z, f);
    Ok(&(&(&left * &ns) * &ns) * &right)
}

/// Printed `M^#` under `F^πEF = 0`.
fn column_display(ctx: &PairContext) -> Matrix {
    let n = ctx.e.x.rows();
    let id = Matrix::identity(n);
    let (e, f, fs) = (&ctx.e.x, &ctx.f.x, &ctx.f.d);
    let fs2 = fs * fs;
    let fpi_epi = &ctx.f.pi * &ctx.e.pi;
    let fpi_ed = &ctx.f.pi * &ctx.e.d;
    let fs2_e = &fs2 * e;
    // h = (F^#)²EF^πE^π, b = F^πE^D + h
    let h = &fs2_e * &fpi_epi;
    let b = &fpi_ed + &h;
    let keep = &id - &fpi_epi;
    let fs_e = fs * e;
    let mid = &(fs - &(&fs_e * &h)) - &(&fs_e * &fpi_ed);

    let gamma = &(&b * &keep) + &h;
    let delta = &(&mid * &keep) - &(&fs_e * &h);
    let lambda = &(&(&(&(&b * &b) * f) + fs) - &(&(&(&fs2_e * &fs2_e) * &fpi_epi) * f)) - &(&(&fs2_e * &fpi_ed) * f);
    let right = &(&fpi_ed * f) + &(&h * f);
    let inner = &(fs - &(&(&fs2_e * &h) * f)) - &(&(&fs2_e * &fpi_ed) * f);
    let xi = &(&mid * &right) - &(&fs_e * &inner);
    blocks(&gamma, &delta, &lambda, &xi)
}

fn column_derivation(ctx: &PairContext) -> Result<Matrix> {
    Ok(row_derivation(&ctx.transposed())?.transpose())
}

/// Group inverse of `[[E, F], [F, 0]]` for group-invertible `F` with
/// `FEF^π = 0`; exists iff `EE^πF^π = 0`.
pub fn thm41_group(e: &Matrix, f: &Matrix, tol: f64) -> Result<GroupOutcome> {
    let ctx = PairContext::new(e, f, tol)?;
    if let Some(no) = gate(TheoremId::Thm41, &ctx, None)? {
        return Ok(GroupOutcome::NoGroupInverse(no));
    }
    let (full, diag) = settle("display", row_display(&ctx), "proof", row_derivation(&ctx)?);
    Ok(GroupOutcome::Exists(GroupFormulaBlocks::from_full(&full, diag)))
}

/// Group inverse of `[[E, F], [F, 0]]` for group-invertible `F` with
/// `F^πEF = 0`; exists iff `F^πE^πE = 0`. Computed as the transpose of the
/// `FEF^π = 0` case applied to `(Eᵀ, Fᵀ)`.
pub fn cor42_group(e: &Matrix, f: &Matrix, tol: f64) -> Result<GroupOutcome> {
    let ctx = PairContext::new(e, f, tol)?;
    if let Some(no) = gate(TheoremId::Cor42, &ctx, None)? {
        return Ok(GroupOutcome::NoGroupInverse(no));
    }
    let display = column_display(&ctx);
    let (full, mut diag) = settle("display", display.clone(), "transpose", column_derivation(&ctx)?);
    let [gamma, delta, lambda, xi] = display.quarters();
    diag.record(
        "display with Delta and Lambda exchanged",
        &blocks(&gamma, &lambda, &delta, &xi),
        &full,
    );
    Ok(GroupOutcome::Exists(GroupFormulaBlocks::from_full(&full, diag)))
}

fn both_group(ctx: &PairContext, theorem: TheoremId, lambda: Option<C64>) -> Result<()> {
    let report = ctx.report(&[ConditionId::EGroup, ConditionId::FGroup], lambda);
    if !report.overall {
        return Err(hypothesis_error(theorem.name(), report));
    }
    Ok(())
}

fn unconditional(ctx: &PairContext, theorem: TheoremId) -> Result<GroupFormulaBlocks> {
    let hyp = ctx.report(theorem.hypotheses(), None);
    if !hyp.overall {
        return Err(hypothesis_error(theorem.name(), hyp));
    }
    let display = row_display(ctx);
    let row_holds = ctx.passes(ConditionId::FeFpi, None);
    let (full, mut diag) = if row_holds {
        settle("display", display, "proof", row_derivation(ctx)?)
    } else {
        settle("display", display, "transpose", column_derivation(ctx)?)
    };
    let family = if row_holds { "FEF^pi = 0" } else { "F^piEF = 0" };
    diag.notes.push(format!("hypothesis family: {family}"));
    if !row_holds {
        let [gamma, delta, lambda, xi] = column_display(ctx).quarters();
        diag.record(
            "column display with Delta and Lambda exchanged",
            &blocks(&gamma, &lambda, &delta, &xi),
            &full,
        );
    }
    if row_holds && ctx.passes(ConditionId::FpiEf, None) {
        let alt = column_derivation(ctx)?;
        diag.record("transpose", &alt, &full);
    }
    Ok(GroupFormulaBlocks::from_full(&full, diag))
}

/// Group inverse of `[[E, F], [F, 0]]` for group-invertible `E` and `F`,
/// which always exists when `FEF^π = 0` or `F^πEF = 0`.
pub fn cor43_group(e: &Matrix, f: &Matrix, tol: f64) -> Result<GroupFormulaBlocks> {
    let ctx = PairContext::new(e, f, tol)?;
    both_group(&ctx, TheoremId::Cor43, None)?;
    unconditional(&ctx, TheoremId::Cor43)
}

/// Group inverse of `[[E, F], [F, 0]]` for group-invertible `E`, `F` with
/// `EF = λFE` or `EF² = FEF`.
pub fn cor44_group(e: &Matrix, f: &Matrix, lambda: Option<C64>, tol: f64) -> Result<GroupFormulaBlocks> {
    let ctx = PairContext::new(e, f, tol)?;
    both_group(&ctx, TheoremId::Cor44, lambda)?;
    let relation = require_commuting(TheoremId::Cor44, &ctx, lambda)?;
    let mut out = unconditional(&ctx, TheoremId::Cor43)?;
    out.diagnostics.notes.push(relation);
    Ok(out)
}
