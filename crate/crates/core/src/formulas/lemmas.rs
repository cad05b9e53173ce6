//! Triangular and additive Drazin-inverse identities. The crate-internal
//! helpers take precomputed [`Parts`] of any matching size, so the same code
//! serves genuine `2×2` block matrices and Pierce corners of one matrix.

use super::{hypothesis_error, Diagnostics, InverseKind, Parts, Truncation};
use crate::error::{Error, Result};
use crate::formulas::BlockResult;
use crate::ginv::drazin;
use crate::matrix::{check_tol, Matrix};
use crate::report::ConditionReport;

/// Off-diagonal block `Z` of the Drazin inverse of `[[A, 0], [C, B]]`.
pub(crate) fn triangular_z(a: &Parts, b: &Parts, c: &Matrix) -> Matrix {
    let mut z = -(&(&b.d * c) * &a.d);

    // (B^D)^{i+2} C A^i A^π, zero once i ≥ ind(A)
    let bd2 = &b.d * &b.d;
    let mut left = bd2.clone();
    let mut right = a.pi.clone();
    for _ in 0..a.index {
        z = &z + &(&(&left * c) * &right);
        left = &left * &b.d;
        right = &a.x * &right;
    }

    // B^i B^π C (A^D)^{i+2}, zero once i ≥ ind(B)
    let mut left = b.pi.clone();
    let mut right = &a.d * &a.d;
    for _ in 0..b.index {
        z = &z + &(&(&left * c) * &right);
        left = &b.x * &left;
        right = &right * &a.d;
    }
    z
}

/// `(P + Q)^D` when `PQP = 0` and `Q²P = 0`.
pub(crate) fn additive_pqp(p: &Parts, q: &Parts) -> Matrix {
    let sum = &p.x + &q.x;
    let mut out = -(&(&sum * &p.d) * &q.d);

    let mut pd_pow = &p.d * &p.d;
    let mut q_tail = q.pi.clone();
    for _ in 0..q.index {
        out = &out + &(&(&sum * &pd_pow) * &q_tail);
        pd_pow = &pd_pow * &p.d;
        q_tail = &q.x * &q_tail;
    }

    let mut qd_pow = &q.d * &q.d;
    let mut p_tail = p.pi.clone();
    for _ in 0..p.index {
        // P^{i+1}P^π + Q P^i P^π = (P + Q) P^i P^π
        out = &out + &(&(&sum * &p_tail) * &qd_pow);
        qd_pow = &qd_pow * &q.d;
        p_tail = &p.x * &p_tail;
    }
    out
}

/// `(P + Q)^D` when `PQ = 0`.
pub(crate) fn additive_pq0(p: &Parts, q: &Parts) -> Matrix {
    let n = p.x.rows();
    let mut out = Matrix::zeros(n, n);

    let mut q_tail = q.pi.clone();
    let mut pd_pow = p.d.clone();
    for _ in 0..q.index {
        out = &out + &(&q_tail * &pd_pow);
        q_tail = &q.x * &q_tail;
        pd_pow = &pd_pow * &p.d;
    }

    let mut qd_pow = q.d.clone();
    let mut p_tail = p.pi.clone();
    for _ in 0..p.index {
        out = &out + &(&qd_pow * &p_tail);
        qd_pow = &qd_pow * &q.d;
        p_tail = &p.x * &p_tail;
    }
    out
}

/// Drazin inverse of the lower block-triangular matrix `[[A, 0], [C, B]]`,
/// built from `A^D` and `B^D`.
pub fn lemma21_triangular(a: &Matrix, b: &Matrix, c: &Matrix, tol: f64) -> Result<BlockResult> {
    check_tol(tol)?;
    let na = a.require_square()?;
    let nb = b.require_square()?;
    if c.shape() != (nb, na) {
        return Err(Error::ShapeMismatch {
            op: "lemma21_triangular",
            left: (nb, na),
            right: c.shape(),
        });
    }
    let ap = Parts::of(a, tol)?;
    let bp = Parts::of(b, tol)?;
    let z = triangular_z(&ap, &bp, c);

    let mut truncation = Truncation::default();
    truncation.cap("A^i A^pi", ap.index);
    truncation.cap("B^i B^pi", bp.index);
    Ok(BlockResult {
        tl: ap.d,
        tr: Matrix::zeros(na, nb),
        bl: z,
        br: bp.d,
        kind: InverseKind::Drazin,
        truncation,
        diagnostics: Diagnostics::returning("triangular"),
    })
}

fn require_same_square(op: &'static str, p: &Matrix, q: &Matrix) -> Result<usize> {
    let n = p.require_square()?;
    if q.shape() != (n, n) {
        return Err(Error::ShapeMismatch {
            op,
            left: p.shape(),
            right: q.shape(),
        });
    }
    Ok(n)
}

fn pair_threshold(p: &Matrix, q: &Matrix, tol: f64) -> f64 {
    tol * p.frobenius_norm().max(1.0) * q.frobenius_norm().max(1.0)
}

/// `(P + Q)^D` under `PQP = 0` and `Q²P = 0`.
pub fn lemma22_additive(p: &Matrix, q: &Matrix, tol: f64) -> Result<Matrix> {
    check_tol(tol)?;
    require_same_square("lemma22_additive", p, q)?;
    let thr = pair_threshold(p, q, tol);
    let mut report = ConditionReport::new();
    report.push("PQP", (&(p * q) * p).frobenius_norm(), thr);
    report.push("Q^2P", (&(q * q) * p).frobenius_norm(), thr);
    if !report.overall {
        return Err(hypothesis_error("lemma22", report));
    }
    Ok(additive_pqp(&Parts::of(p, tol)?, &Parts::of(q, tol)?))
}

/// `(P + Q)^D` under `PQ = 0`.
pub fn lemma24_additive(p: &Matrix, q: &Matrix, tol: f64) -> Result<Matrix> {
    check_tol(tol)?;
    require_same_square("lemma24_additive", p, q)?;
    let mut report = ConditionReport::new();
    report.push("PQ", (p * q).frobenius_norm(), pair_threshold(p, q, tol));
    if !report.overall {
        return Err(hypothesis_error("lemma24", report));
    }
    Ok(additive_pq0(&Parts::of(p, tol)?, &Parts::of(q, tol)?))
}

/// `(AB)^D = A ((BA)^D)² B`.
pub fn cline(a: &Matrix, b: &Matrix, tol: f64) -> Result<Matrix> {
    check_tol(tol)?;
    let ba = b.try_mul(a)?;
    a.try_mul(b)?;
    let d = drazin(&ba, tol)?.drazin;
    Ok(&(&(a * &d) * &d) * b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formulas::blocks;
    use crate::matrix::{c, DEFAULT_TOL};

    fn real(rows: usize, cols: usize, d: &[f64]) -> Matrix {
        Matrix::from_real(rows, cols, d).unwrap()
    }

    fn j2() -> Matrix {
        real(2, 2, &[0.0, 1.0, 0.0, 0.0])
    }

    fn oracle(m: &Matrix) -> Matrix {
        drazin(m, DEFAULT_TOL).unwrap().drazin
    }

    #[test]
    fn triangular_invertible_top_zero_bottom() {
        let a = real(2, 2, &[2.0, 1.0, 0.0, 1.0]);
        let b = Matrix::zeros(2, 2);
        let cm = real(2, 2, &[1.0, -1.0, 3.0, 0.5]);
        let r = lemma21_triangular(&a, &b, &cm, DEFAULT_TOL).unwrap();
        let ai = crate::matrix::invert(&a).unwrap();
        assert!(r.bl.distance(&(&cm * &(&ai * &ai))) < 1e-12);
        assert!(r.tl.distance(&ai) < 1e-12);
        let m = blocks(&a, &Matrix::zeros(2, 2), &cm, &b);
        assert!(r.assemble().relative_distance(&oracle(&m)) < 1e-9);
    }

    #[test]
    fn triangular_without_coupling_is_block_diagonal() {
        let a = real(2, 2, &[1.0, 1.0, 0.0, 0.0]);
        let b = real(2, 2, &[3.0, 0.0, 0.0, 0.0]);
        let r = lemma21_triangular(&a, &b, &Matrix::zeros(2, 2), DEFAULT_TOL).unwrap();
        assert_eq!(r.bl.frobenius_norm(), 0.0);
        assert!(r.tl.distance(&oracle(&a)) < 1e-12);
        assert!(r.br.distance(&oracle(&b)) < 1e-12);
    }

    #[test]
    fn triangular_nilpotent_blocks_identity_coupling() {
        let r = lemma21_triangular(&j2(), &j2(), &Matrix::identity(2), DEFAULT_TOL).unwrap();
        let m = blocks(&j2(), &Matrix::zeros(2, 2), &Matrix::identity(2), &j2());
        assert!(r.assemble().relative_distance(&oracle(&m)) < 1e-9);
    }

    #[test]
    fn triangular_rectangular_coupling() {
        let a = real(1, 1, &[2.0]);
        let b = real(2, 2, &[0.0, 1.0, 0.0, 0.0]);
        let cm = real(2, 1, &[1.0, 1.0]);
        let r = lemma21_triangular(&a, &b, &cm, DEFAULT_TOL).unwrap();
        let mut m = Matrix::zeros(3, 3);
        m.set(0, 0, c(2.0, 0.0));
        m.set(1, 0, c(1.0, 0.0));
        m.set(2, 0, c(1.0, 0.0));
        m.set(1, 2, c(1.0, 0.0));
        assert!(r.assemble().relative_distance(&oracle(&m)) < 1e-9);
    }

    #[test]
    fn additive_pqp_degenerate_cases() {
        let p = real(2, 2, &[1.0, 2.0, 0.0, 0.0]);
        let z = Matrix::zeros(2, 2);
        assert!(lemma22_additive(&p, &z, DEFAULT_TOL).unwrap().distance(&oracle(&p)) < 1e-12);
        assert!(lemma22_additive(&z, &p, DEFAULT_TOL).unwrap().distance(&oracle(&p)) < 1e-12);
    }

    #[test]
    fn additive_pqp_structured_pair() {
        // P = [[E², E], [0, 0]], Q = [[F, 0], [FE, F]] with EFE = 0, F²E = 0
        let e = real(2, 2, &[1.0, 0.0, 0.0, 0.0]);
        let f = real(2, 2, &[0.0, 0.0, 1.0, 0.0]);
        let z = Matrix::zeros(2, 2);
        let p = blocks(&(&e * &e), &e, &z, &z);
        let q = blocks(&f, &z, &(&f * &e), &f);
        let got = lemma22_additive(&p, &q, DEFAULT_TOL).unwrap();
        assert!(got.relative_distance(&oracle(&(&p + &q))) < 1e-9);
    }

    #[test]
    fn additive_pqp_rejects_violation() {
        let p = real(2, 2, &[0.0, 1.0, 0.0, 0.0]);
        let q = real(2, 2, &[0.0, 0.0, 1.0, 0.0]);
        match lemma22_additive(&p, &q, DEFAULT_TOL) {
            Err(Error::Hypothesis { report, .. }) => assert!(!report.entry("PQP").unwrap().pass),
            other => panic!("expected hypothesis error, got {other:?}"),
        }
    }

    #[test]
    fn additive_pq0_cases() {
        let p = real(2, 2, &[2.0, 0.0, 1.0, 0.0]);
        let z = Matrix::zeros(2, 2);
        assert!(lemma24_additive(&z, &p, DEFAULT_TOL).unwrap().distance(&oracle(&p)) < 1e-12);
        assert!(lemma24_additive(&p, &z, DEFAULT_TOL).unwrap().distance(&oracle(&p)) < 1e-12);
        // PQ = 0 with both nonzero
        let q = real(2, 2, &[0.0, 0.0, 0.0, 3.0]);
        let p = real(2, 2, &[1.0, 0.0, 1.0, 0.0]);
        assert!((&p * &q).frobenius_norm() == 0.0);
        let got = lemma24_additive(&p, &q, DEFAULT_TOL).unwrap();
        assert!(got.relative_distance(&oracle(&(&p + &q))) < 1e-9);
        assert!(lemma24_additive(&q, &p, DEFAULT_TOL).is_err());
    }

    #[test]
    fn cline_cases() {
        let i = Matrix::identity(3);
        assert!(cline(&i, &i, DEFAULT_TOL).unwrap().distance(&i) < 1e-14);
        let a = real(2, 2, &[0.0, 1.0, 0.0, 0.0]);
        let b = Matrix::identity(2);
        assert_eq!(cline(&a, &b, DEFAULT_TOL).unwrap().frobenius_norm(), 0.0);
        let a = real(3, 3, &[1.0, 2.0, 0.0, 0.0, 1.0, 1.0, 1.0, 0.0, 0.0]);
        let b = real(3, 3, &[0.0, 1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        let got = cline(&a, &b, DEFAULT_TOL).unwrap();
        assert!(got.relative_distance(&oracle(&(&a * &b))) < 1e-9);
    }

    #[test]
    fn cline_rectangular() {
        let a = real(3, 1, &[1.0, 2.0, 3.0]);
        let b = real(1, 3, &[1.0, 0.0, 1.0]);
        let got = cline(&a, &b, DEFAULT_TOL).unwrap();
        assert!(got.relative_distance(&oracle(&(&a * &b))) < 1e-9);
    }
}
