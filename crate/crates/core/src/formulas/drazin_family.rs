//! Drazin inverses of `M = [[E, I], [F, 0]]` and `[[E, F], [I, 0]]`.
//!
//! The Pierce-split formula is realized on `2n×2n` matrices: an element with
//! corners `a, b, c, d` relative to the idempotent `p = diag(F^π, 0)` is the
//! single matrix `a + b + c + d`.

use serde::Serialize;

use super::lemmas::{additive_pq0, additive_pqp, triangular_z};
use super::{
    blocks, hypothesis_error, noise_floor, pw, settle, BlockResult, Diagnostics, InverseKind, Parts, Truncation,
    ROUTE_AGREEMENT_TOL,
};
use crate::conditions::PairContext;
use crate::error::Result;
use crate::formulas::TheoremId;
use crate::ginv::index_of_with_floor;
use crate::matrix::Matrix;

/// `E^j E^π` for `j < ind(E)`; higher powers vanish.
fn nilpotent_tails(e: &Parts) -> Vec<Matrix> {
    let mut out = Vec::with_capacity(e.index);
    let mut cur = e.pi.clone();
    for _ in 0..e.index {
        let next = &e.x * &cur;
        out.push(cur);
        cur = next;
    }
    out
}

/// The printed four-block form for `[[E, I], [F, 0]]` under `EFE = 0`,
/// `F²E = 0`, returned as one `2n×2n` matrix.
fn split_sum_display(e: &Parts, f: &Parts) -> Matrix {
    let n = e.x.rows();
    let (ex, ed, epi) = (&e.x, &e.d, &e.pi);
    let (fx, fd) = (&f.x, &f.d);
    let ed2 = ed * ed;
    let lead = &Matrix::identity(n) + &(fx * &ed2);

    let mut lam = &(&(ex * epi) * fd) - &(&(fx * ed) * fd);
    let mut sig = &(-(&(ex * ed) * fd)) - &(&(fx * &ed2) * fd);
    let mut gam = &(fx * epi) * fd;
    let mut del = -(&(fx * ed) * fd);

    // F^i F^π series
    let mut f_tail = f.pi.clone();
    let mut odd = ed.clone();
    for _ in 0..f.index {
        let even = &odd * ed;
        let next_odd = &even * ed;
        lam = &lam + &(&(&lead * &odd) * &f_tail);
        sig = &sig + &(&(&lead * &even) * &f_tail);
        gam = &gam + &(&(fx * &even) * &f_tail);
        del = &del + &(&(fx * &next_odd) * &f_tail);
        f_tail = fx * &f_tail;
        odd = &odd * &ed2;
    }

    // E^j E^π series, the smallest power per step is 2i
    let tails = nilpotent_tails(e);
    let tail = |j: usize| tails.get(j);
    let mut fd_pow = fd * fd;
    let mut i = 0;
    while 2 * i < tails.len() {
        if let Some(t) = tail(2 * i + 3) {
            lam = &lam + &(t * &fd_pow);
        }
        if let Some(t) = tail(2 * i + 1) {
            let term = &(fx * t) * &fd_pow;
            lam = &lam + &term;
            del = &del + &term;
        }
        if let Some(t) = tail(2 * i + 2) {
            sig = &sig + &(t * &fd_pow);
            gam = &gam + &(&(fx * t) * &fd_pow);
        }
        if let Some(t) = tail(2 * i) {
            sig = &sig + &(&(fx * t) * &fd_pow);
        }
        fd_pow = &fd_pow * fd;
        i += 1;
    }
    blocks(&lam, &sig, &gam, &del)
}

/// `M (M²)^D` with `M² = P + Q`, `P = [[E², E], [0, 0]]`,
/// `Q = [[F, 0], [FE, F]]`.
fn split_sum_derivation(e: &Parts, f: &Parts) -> Matrix {
    let n = e.x.rows();
    let z = Matrix::zeros(n, n);
    let id = Matrix::identity(n);
    let (ex, fx) = (&e.x, &f.x);
    let m = blocks(ex, &id, fx, &z);

    // P = [E; 0]·[E, I] and [E, I]·[E; 0] = E², so P^D = [E; 0] (E^D)^4 [E, I]
    let p = blocks(&(ex * ex), ex, &z, &z);
    let core = ex * &pw(&e.d, 4);
    let pd = blocks(&(&core * ex), &core, &z, &z);
    let pp = Parts::known(&p, pd, e.index + 1);

    let fe = fx * ex;
    let q = blocks(fx, &z, &fe, fx);
    let qd = blocks(&f.d, &z, &triangular_z(f, f, &fe), &f.d);
    let qp = Parts::known(&q, qd, 2 * f.index);

    &m * &additive_pqp(&pp, &qp)
}

/// Both routes for `[[E, I], [F, 0]]^D`, settled.
fn split_sum(e: &Parts, f: &Parts) -> (Matrix, Diagnostics) {
    let display = split_sum_display(e, f);
    let proof = split_sum_derivation(e, f);
    let (value, mut diag) = settle("display", display.clone(), "proof", proof.clone());
    if diag.returned_route == "proof" {
        let names = ["Lambda", "Sigma", "Gamma", "Delta"];
        let (dq, pq) = (display.quarters(), proof.quarters());
        let bad: Vec<&str> = names
            .iter()
            .zip(dq.iter().zip(pq.iter()))
            .filter(|(_, (d, p))| d.relative_distance(p) > ROUTE_AGREEMENT_TOL)
            .map(|(n, _)| *n)
            .collect();
        diag.notes
            .push(format!("printed blocks disagreeing: {}", bad.join(", ")));
    }
    (value, diag)
}

/// Drazin inverse of `[[E, I], [F, 0]]` when `EFE = 0` and `F²E = 0`.
pub fn thm23(e: &Matrix, f: &Matrix, tol: f64) -> Result<BlockResult> {
    let ctx = PairContext::new(e, f, tol)?;
    let hyp = ctx.report(TheoremId::Thm23.hypotheses(), None);
    if !hyp.overall {
        return Err(hypothesis_error("thm23", hyp));
    }
    let (full, diag) = split_sum(&ctx.e, &ctx.f);
    let mut truncation = Truncation::default();
    truncation.cap("F^i F^pi", ctx.f.index);
    truncation.cap("E^j E^pi", ctx.e.index);
    Ok(BlockResult::from_full(&full, InverseKind::GDrazin, truncation, diag))
}

/// Every named quantity of the Pierce-split representation, each realized as
/// a `2n×2n` matrix.
#[derive(Clone, Debug, Serialize)]
pub struct Thm25Intermediates {
    /// `p = diag(F^π, 0)`
    pub pierce_p: Matrix,
    /// `α`, top-left `EF^π`
    pub alpha: Matrix,
    /// `β`, top row `[F^πEFF^D, F^π]`
    pub beta: Matrix,
    /// `γ`, bottom-left `FF^π`
    pub gamma: Matrix,
    /// `δ^D = [[0, F^D], [FF^D, −FF^DEF^D]]`
    pub delta_d: Matrix,
    /// `α^D`, top-left `(EF^π)^D`
    pub alpha_d: Matrix,
    pub big_lambda: Matrix,
    pub big_sigma: Matrix,
    pub big_gamma: Matrix,
    pub big_delta: Matrix,
    pub eps: Matrix,
    pub zeta: Matrix,
    pub eta: Matrix,
    pub theta: Matrix,
    /// `ε_n` for `n = 1, 2, …`; index 0 holds `ε_1`.
    pub eps_n: Vec<Matrix>,
    pub zeta_n: Vec<Matrix>,
    pub eta_n: Vec<Matrix>,
    pub theta_n: Vec<Matrix>,
}

struct PierceCorners {
    p: Matrix,
    alpha: Matrix,
    beta: Matrix,
    gamma: Matrix,
}

/// `ε, ζ, η, θ` from the blocks of `[[α, 1], [βγ, 0]]^D`.
fn quadruple(c: &PierceCorners, lam: &Matrix, sig: &Matrix, gam: &Matrix, del: &Matrix) -> [Matrix; 4] {
    let (a, b, g) = (&c.alpha, &c.beta, &c.gamma);
    let left_top = &(a * lam) + gam;
    let right_top = &(a * sig) + del;
    let eps = &(&left_top * lam) + &(&right_top * gam);
    let zeta = &(&(&left_top * sig) * b) + &(&(&right_top * del) * b);
    let eta = &(&(g * lam) * lam) + &(&(g * sig) * gam);
    let theta = &(&(&(g * lam) * sig) * b) + &(&(&(g * sig) * del) * b);
    [eps, zeta, eta, theta]
}

struct PierceDisplay {
    identity_reading: Matrix,
    complement_reading: Matrix,
    powers_reading: Matrix,
    intermediates: Thm25Intermediates,
}

/// The printed representation, with `inner` terms in the `Λ, Σ, Γ, Δ` sums
/// and `outer` terms in the `(δ^D)^{i+1}` sums.
fn pierce_display(ctx: &PairContext, inner: usize, outer: usize) -> Result<PierceDisplay> {
    let n = ctx.e.x.rows();
    let z = Matrix::zeros(n, n);
    let (ex, fx, fd, fpi) = (&ctx.e.x, &ctx.f.x, &ctx.f.d, &ctx.f.pi);

    let e_fpi = ex * fpi;
    let alpha_core = Parts::of_scaled(&e_fpi, ctx.tol, noise_floor(&[ex, fpi]))?;
    let c = PierceCorners {
        p: blocks(fpi, &z, &z, &z),
        alpha: blocks(&e_fpi, &z, &z, &z),
        beta: blocks(&(&(&(fpi * ex) * fx) * fd), fpi, &z, &z),
        gamma: blocks(&z, &z, &(fx * fpi), &z),
    };
    let ffd = fx * fd;
    let delta_d = blocks(&z, fd, &ffd, &-(&(&ffd * ex) * fd));
    let delta = blocks(&(&ffd * ex), &ffd, &(fx * &ffd), &z);
    let alpha_d = blocks(&alpha_core.d, &z, &z, &z);

    let id = Matrix::identity(2 * n);
    let bg = &c.beta * &c.gamma;
    let ad2 = &alpha_d * &alpha_d;
    let lead = &id + &(&bg * &ad2);
    let mut lam = Matrix::zeros(2 * n, 2 * n);
    let mut sig = lam.clone();
    let mut gam = lam.clone();
    let mut del = lam.clone();
    let mut odd = alpha_d.clone();
    let mut bg_pow = id.clone();
    for _ in 0..inner {
        let even = &odd * &alpha_d;
        let next_odd = &even * &alpha_d;
        lam = &lam + &(&(&lead * &odd) * &bg_pow);
        sig = &sig + &(&(&lead * &even) * &bg_pow);
        gam = &gam + &(&(&bg * &even) * &bg_pow);
        del = &del + &(&(&bg * &next_odd) * &bg_pow);
        odd = &odd * &ad2;
        bg_pow = &bg_pow * &bg;
    }

    let [eps, zeta, eta, theta] = quadruple(&c, &lam, &sig, &gam, &del);
    let (a, b, g) = (&c.alpha, &c.beta, &c.gamma);

    let mut eps_n = vec![eps.clone()];
    let mut zeta_n = vec![zeta.clone()];
    let mut eta_n = vec![eta.clone()];
    let mut theta_n = vec![theta.clone()];
    for _ in 1..outer {
        let (e_, z_, h_, t_) = (
            eps_n.last().unwrap(),
            zeta_n.last().unwrap(),
            eta_n.last().unwrap(),
            theta_n.last().unwrap(),
        );
        let ne = &(a * e_) + &(b * h_);
        let nz = &(a * z_) + &(b * t_);
        let nh = g * e_;
        let nt = g * t_;
        eps_n.push(ne);
        zeta_n.push(nz);
        eta_n.push(nh);
        theta_n.push(nt);
    }

    let az_bt = &(a * &zeta) + &(b * &theta);
    let reading = |one: &Matrix| -> Matrix {
        let tail = one - &(g * &zeta);
        let mut tr = &(&zeta - &az_bt) * &delta_d;
        let mut br = &(&theta + &tail) * &delta_d;
        let mut dd_pow = &delta_d * &delta_d;
        for i in 0..outer {
            tr = &tr + &(&(&(&zeta_n[i] * &tail) - &(&eps_n[i] * &az_bt)) * &dd_pow);
            br = &br + &(&(&(&theta_n[i] * &tail) - &(&eta_n[i] * &az_bt)) * &dd_pow);
            dd_pow = &dd_pow * &delta_d;
        }
        &(&(&eps + &eta) + &tr) + &br
    };
    let identity_reading = reading(&id);
    let complement_reading = reading(&(&id - &c.p));

    // Same shape with (ε_i, ζ_i, η_i, θ_i) the corners of Q^i, i.e. seeded
    // by (α, β, γ, 0) with θ_{i+1} = γζ_i, and ζδ^π, θδ^π in place of the
    // lone ζδ^d, θδ^d terms (δ^π taken in the corner 1 − p).
    let tail = &id - &(g * &zeta);
    let delta_pi = &(&id - &c.p) - &(&delta * &delta_d);
    let mut tr = &(&zeta * &delta_pi) - &(&az_bt * &delta_d);
    let mut br = &(&theta * &delta_pi) + &(&tail * &delta_d);
    let (mut qe, mut qz, mut qh, mut qt) = (a.clone(), b.clone(), g.clone(), Matrix::zeros(2 * n, 2 * n));
    let mut dd_pow = &delta_d * &delta_d;
    for _ in 0..outer {
        tr = &tr + &(&(&(&qz * &tail) - &(&qe * &az_bt)) * &dd_pow);
        br = &br + &(&(&(&qt * &tail) - &(&qh * &az_bt)) * &dd_pow);
        let next = (&(a * &qe) + &(b * &qh), &(a * &qz) + &(b * &qt), g * &qe, g * &qz);
        (qe, qz, qh, qt) = next;
        dd_pow = &dd_pow * &delta_d;
    }
    let powers_reading = &(&(&eps + &eta) + &tr) + &br;

    Ok(PierceDisplay {
        identity_reading,
        complement_reading,
        powers_reading,
        intermediates: Thm25Intermediates {
            pierce_p: c.p,
            alpha: c.alpha,
            beta: c.beta,
            gamma: c.gamma,
            delta_d,
            alpha_d,
            big_lambda: lam,
            big_sigma: sig,
            big_gamma: gam,
            big_delta: del,
            eps,
            zeta,
            eta,
            theta,
            eps_n,
            zeta_n,
            eta_n,
            theta_n,
        },
    })
}

/// Derivation: Pierce corners of `M` taken directly, `[[α, 1], [βγ, 0]]^D`
/// from the split-sum formula, `Q^D` by Cline, and `M^D = (P + Q)^D` with
/// `PQ = 0`.
fn pierce_derivation(ctx: &PairContext, q_index_bound: usize) -> Result<(Matrix, Vec<String>)> {
    let n = ctx.e.x.rows();
    let z = Matrix::zeros(n, n);
    let id_n = Matrix::identity(n);
    let m = blocks(&ctx.e.x, &id_n, &ctx.f.x, &z);
    let p = blocks(&ctx.f.pi, &z, &z, &z);
    let q1 = &Matrix::identity(2 * n) - &p;
    let c = PierceCorners {
        alpha: &(&p * &m) * &p,
        beta: &(&p * &m) * &q1,
        gamma: &(&q1 * &m) * &p,
        p: p.clone(),
    };
    let delta = &(&q1 * &m) * &q1;

    let ap = Parts::of_scaled(&c.alpha, ctx.tol, noise_floor(&[&p, &m, &p]))?;
    let bgp = Parts::of_scaled(&(&c.beta * &c.gamma), ctx.tol, noise_floor(&[&c.beta, &c.gamma]))?;
    let (inner, inner_diag) = split_sum(&ap, &bgp);
    let mut notes = Vec::new();
    if inner_diag.has_discrepancy() {
        notes.push("inner split-sum display disagreed; derivation used".to_string());
    }
    let [lam, sig, gam, del] = inner.quarters();
    let [eps, zeta, eta, theta] = quadruple(&c, &lam, &sig, &gam, &del);

    let q = &(&c.alpha + &c.beta) + &c.gamma;
    let qd = &(&(&eps + &zeta) + &eta) + &theta;
    let qp = Parts::known(&q, qd, q_index_bound);
    let pp = Parts::of_scaled(&delta, ctx.tol, noise_floor(&[&q1, &m, &q1]))?;
    Ok((additive_pq0(&pp, &qp), notes))
}

struct PierceOutcome {
    full: Matrix,
    diagnostics: Diagnostics,
    intermediates: Thm25Intermediates,
}

fn pierce_split(ctx: &PairContext, inner: usize, outer: usize, q_index_bound: usize) -> Result<PierceOutcome> {
    let display = pierce_display(ctx, inner, outer)?;
    let (proof, notes) = pierce_derivation(ctx, q_index_bound)?;
    let (full, mut diagnostics) = settle("display (1 = I)", display.identity_reading.clone(), "proof", proof);
    diagnostics.record("display (1 = I - p)", &display.complement_reading, &full);
    diagnostics.record("display with Q^i corners", &display.powers_reading, &full);
    diagnostics.notes.extend(notes);
    Ok(PierceOutcome {
        full,
        diagnostics,
        intermediates: display.intermediates,
    })
}

fn pierce_hypotheses(theorem: TheoremId, e: &Matrix, f: &Matrix, tol: f64) -> Result<PairContext> {
    let ctx = PairContext::new(e, f, tol)?;
    let hyp = ctx.report(theorem.hypotheses(), None);
    if !hyp.overall {
        return Err(hypothesis_error(theorem.name(), hyp));
    }
    Ok(ctx)
}

/// Caps `k = ind(EF^π) + 2·ind(F)` and `m = ind(F)`.
fn certified_caps(ctx: &PairContext) -> Result<(usize, usize)> {
    let e_fpi = &ctx.e.x * &ctx.f.pi;
    let k = index_of_with_floor(&e_fpi, ctx.tol, noise_floor(&[&ctx.e.x, &ctx.f.pi]))? + 2 * ctx.f.index;
    Ok((k, ctx.f.index))
}

/// g-Drazin inverse of `[[E, I], [F, 0]]` when `EFEF^π = 0` and
/// `F²EF^π = 0`. The series run until their terms vanish:
/// `ind(βγ)` inner terms and `ind(α + β + γ)` outer terms.
pub fn thm25(e: &Matrix, f: &Matrix, tol: f64) -> Result<(BlockResult, Thm25Intermediates)> {
    let ctx = pierce_hypotheses(TheoremId::Thm25, e, f, tol)?;
    let (k, _) = certified_caps(&ctx)?;
    let n = e.rows();
    let z = Matrix::zeros(n, n);
    let bg = blocks(&(&ctx.f.x * &ctx.f.pi), &z, &z, &z);
    let inner = index_of_with_floor(&bg, tol, noise_floor(&[&ctx.f.x, &ctx.f.pi]))?;
    let fpi = &ctx.f.pi;
    let beta_tl = &(&(fpi * &ctx.e.x) * &ctx.f.x) * &ctx.f.d;
    let q = blocks(&(&(&ctx.e.x * fpi) + &beta_tl), fpi, &(&ctx.f.x * fpi), &z);
    let outer = index_of_with_floor(&q, tol, noise_floor(&[&ctx.e.x, &ctx.f.x, fpi, &ctx.f.d]))?;

    let out = pierce_split(&ctx, inner, outer, k.max(outer))?;
    let truncation = Truncation {
        outer: Some(outer),
        inner: Some(inner),
        series: vec![("(delta^D)^(i+1)".into(), outer), ("(beta gamma)^i".into(), inner)],
    };
    Ok((
        BlockResult::from_full(&out.full, InverseKind::GDrazin, truncation, out.diagnostics),
        out.intermediates,
    ))
}

/// Drazin inverse of `[[E, I], [F, 0]]` with the certified caps
/// `k = ind(EF^π) + 2·ind(F)` outer and `m = ind(F)` inner terms.
pub fn thm27(e: &Matrix, f: &Matrix, tol: f64) -> Result<BlockResult> {
    let ctx = pierce_hypotheses(TheoremId::Thm27, e, f, tol)?;
    let (k, m) = certified_caps(&ctx)?;
    // sums run over i = 0..=m and i = 1..=k
    let out = pierce_split(&ctx, m + 1, k, k)?;
    let truncation = Truncation {
        outer: Some(k),
        inner: Some(m),
        series: vec![("(delta^D)^(i+1)".into(), k), ("(beta gamma)^i".into(), m + 1)],
    };
    Ok(BlockResult::from_full(
        &out.full,
        InverseKind::Drazin,
        truncation,
        out.diagnostics,
    ))
}

/// g-Drazin inverse of `[[E, F], [I, 0]]` under the same hypotheses, via
/// `[[E, I], [I, 0]] · ([[E, I], [F, 0]]^D)² · diag(I, F)`.
pub fn cor26(e: &Matrix, f: &Matrix, tol: f64) -> Result<BlockResult> {
    let (inner, _) = thm25(e, f, tol)?;
    let n = e.rows();
    let z = Matrix::zeros(n, n);
    let id = Matrix::identity(n);
    let md = inner.assemble();
    let left = blocks(e, &id, &id, &z);
    let right = blocks(&id, &z, &z, f);
    let full = &(&(&left * &md) * &md) * &right;
    let mut diagnostics = inner.diagnostics.clone();
    diagnostics
        .notes
        .push("computed from the [[E, I], [F, 0]] inverse by Cline's formula".into());
    Ok(BlockResult::from_full(
        &full,
        InverseKind::GDrazin,
        inner.truncation,
        diagnostics,
    ))
}
