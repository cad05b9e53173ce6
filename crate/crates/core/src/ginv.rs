//! Index, Drazin inverse, group inverse and spectral idempotent of a square
//! matrix.
//!
//! The Drazin inverse is computed by the full-rank-factorization recursion:
//! factor `A = B₁C₁`, continue with `A₁ = C₁B₁ = B₂C₂`, and so on until some
//! `Aⱼ` is invertible (or empty). Then `Aⱼ^D = Aⱼ⁻¹` and each level up is
//! recovered by Cline's formula `(BC)^D = B((CB)^D)²C`. Since every `Bᵢ` has
//! full column rank and every `Cᵢ` full row rank, `rank(A^j) = rank(Aⱼ)`, so
//! the same chain also yields the index without forming powers of `A`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{check_tol, rank_factorize_with_floor, solve_with_tol, Matrix, RankFactorization, C64};
use crate::report::ConditionReport;

/// The three Drazin axiom residual norms.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DrazinResiduals {
    /// `‖AX − XA‖`
    pub commutation: f64,
    /// `‖XAX − X‖`
    pub inner: f64,
    /// `‖A^{k+1}X − A^k‖`
    pub eventual_power: f64,
}

#[derive(Clone, Debug)]
pub struct DrazinResult {
    pub drazin: Matrix,
    pub index: usize,
    /// `I − A·A^D`
    pub idempotent: Matrix,
    pub residuals: DrazinResiduals,
    /// `rank(A^j)` for `j = 0..=index+1`.
    pub power_ranks: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct GroupResult {
    pub group: Matrix,
    pub idempotent: Matrix,
}

/// The factor chain `A = B₁C₁`, `C₁B₁ = B₂C₂`, ... down to the first
/// invertible level.
struct ClineChain {
    factors: Vec<RankFactorization>,
    /// `ranks[j] = rank(A^j)`; the last two entries are equal.
    ranks: Vec<usize>,
    /// The invertible (possibly empty) matrix the chain ends on.
    core: Matrix,
}

impl ClineChain {
    fn build(a: &Matrix, tol: f64, floor: f64) -> Result<Self> {
        check_tol(tol)?;
        let n = a.require_square()?;
        // Every level is measured against the input's largest entry (or the
        // caller's floor), so a level that is rounding noise relative to it
        // has rank zero.
        let floor = a.max_abs().max(floor);
        let mut factors = Vec::new();
        let mut ranks = vec![n];
        let mut current = a.clone();
        loop {
            if factors.len() > n {
                return Err(Error::RecursionDepth { depth: factors.len() });
            }
            let f = rank_factorize_with_floor(&current, tol, floor)?;
            let size = current.rows();
            ranks.push(f.rank);
            if f.rank == size {
                return Ok(Self {
                    factors,
                    ranks,
                    core: current,
                });
            }
            current = &f.right * &f.left;
            factors.push(f);
        }
    }

    fn index(&self) -> usize {
        self.factors.len()
    }

    fn drazin(&self, tol: f64) -> Result<Matrix> {
        let k = self.core.rows();
        let mut d = solve_with_tol(&self.core, &Matrix::identity(k), tol)?;
        for f in self.factors.iter().rev() {
            d = &(&f.left * &(&d * &d)) * &f.right;
        }
        Ok(d)
    }
}

/// Smallest `k ≥ 0` with `rank(A^k) = rank(A^{k+1})`.
pub fn index_of(a: &Matrix, tol: f64) -> Result<usize> {
    index_of_with_floor(a, tol, 0.0)
}

/// [`index_of`] with ranks judged against `tol · max(‖A‖_max, floor)`, for a
/// matrix computed from larger operands whose rounding noise it inherits.
pub fn index_of_with_floor(a: &Matrix, tol: f64, floor: f64) -> Result<usize> {
    Ok(ClineChain::build(a, tol, floor)?.index())
}

/// `rank(A^j)` for `j = 0, 1, ...` until the sequence stabilizes.
pub fn power_ranks(a: &Matrix, tol: f64) -> Result<Vec<usize>> {
    Ok(ClineChain::build(a, tol, 0.0)?.ranks)
}

pub fn drazin(a: &Matrix, tol: f64) -> Result<DrazinResult> {
    drazin_with_floor(a, tol, 0.0)
}

/// [`drazin`] with ranks judged against `tol · max(‖A‖_max, floor)`.
pub fn drazin_with_floor(a: &Matrix, tol: f64, floor: f64) -> Result<DrazinResult> {
    let chain = ClineChain::build(a, tol, floor)?;
    let index = chain.index();
    let x = chain.drazin(tol)?;
    let n = a.rows();
    let idempotent = &Matrix::identity(n) - &(a * &x);
    let residuals = axiom_residuals(a, &x, index);
    Ok(DrazinResult {
        drazin: x,
        index,
        idempotent,
        residuals,
        power_ranks: chain.ranks,
    })
}

/// `A^π = I − A·A^D`.
pub fn spectral_idempotent(a: &Matrix, tol: f64) -> Result<Matrix> {
    Ok(drazin(a, tol)?.idempotent)
}

/// The Drazin inverse when `ind(A) ≤ 1`; otherwise [`Error::NoGroupInverse`]
/// carrying the index.
pub fn group_inverse(a: &Matrix, tol: f64) -> Result<GroupResult> {
    let d = drazin(a, tol)?;
    if d.index > 1 {
        return Err(Error::NoGroupInverse { index: d.index });
    }
    Ok(GroupResult {
        group: d.drazin,
        idempotent: d.idempotent,
    })
}

fn axiom_residuals(a: &Matrix, x: &Matrix, k: usize) -> DrazinResiduals {
    let ax = a * x;
    let xa = x * a;
    let ak = a.pow(k).expect("square");
    let ak1 = &ak * a;
    DrazinResiduals {
        commutation: ax.distance(&xa),
        inner: (&xa * x).distance(x),
        eventual_power: (&ak1 * x).distance(&ak),
    }
}

/// Checks `AX = XA` and `XAX = X` against `tol · max(1, ‖A‖) · max(1, ‖X‖)`,
/// and `A^{k+1}X = A^k` against `tol · max(1, ‖|A|^k‖) · max(1, ‖A‖·‖X‖)`,
/// where `|A|` takes entrywise moduli: rounding in a product of `k` factors
/// is bounded by the product of their moduli, which a plain `‖A‖` factor
/// underestimates for high-index nilpotent parts.
pub fn verify_drazin_axioms(a: &Matrix, x: &Matrix, k: usize, tol: f64) -> Result<ConditionReport> {
    let n = a.require_square()?;
    if x.shape() != (n, n) {
        return Err(Error::ShapeMismatch {
            op: "verify_drazin_axioms",
            left: a.shape(),
            right: x.shape(),
        });
    }
    let threshold = tol * a.frobenius_norm().max(1.0) * x.frobenius_norm().max(1.0);
    let r = axiom_residuals(a, x, k);
    let mut report = ConditionReport::new();
    report.push("commutation", r.commutation, threshold);
    report.push("inner", r.inner, threshold);
    let moduli = Matrix::from_vec(n, n, a.data().iter().map(|z| C64::new(z.norm(), 0.0)).collect())?;
    let power_scale = moduli.pow(k)?.frobenius_norm().max(1.0);
    let power_threshold = tol * power_scale * (a.frobenius_norm() * x.frobenius_norm()).max(1.0);
    report.push("eventual_power", r.eventual_power, power_threshold);
    Ok(report)
}
