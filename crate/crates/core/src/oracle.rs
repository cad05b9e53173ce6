//! Ground truth for the block formulas: assemble `M` as a plain matrix and
//! invert it directly, with no knowledge of its block structure.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::formulas::{BlockPair, GroupOutcome, InverseKind, Pattern};
use crate::ginv::{drazin, verify_drazin_axioms, DrazinResult};
use crate::matrix::{Matrix, DEFAULT_TOL};
use crate::report::{extended_f64, ConditionReport};

/// Default relative Frobenius tolerance for formula-versus-oracle checks.
pub const COMPARE_TOL: f64 = 1e-8;

/// The `2n×2n` matrix of `pair` in its layout.
pub fn assemble(pair: &BlockPair) -> Matrix {
    let n = pair.dim();
    let (id, z) = (Matrix::identity(n), Matrix::zeros(n, n));
    let (tr, bl) = match pair.pattern {
        Pattern::EiF0 => (&id, &pair.f),
        Pattern::EfI0 => (&pair.f, &id),
        Pattern::EfF0 => (&pair.f, &pair.f),
    };
    Matrix::from_blocks(&pair.e, tr, bl, &z).expect("BlockPair blocks are square and equal")
}

/// Drazin inverse of the assembled matrix. For [`InverseKind::Group`] an
/// index above 1 is reported as [`Error::NoGroupInverse`].
pub fn oracle_inverse(pair: &BlockPair, kind: InverseKind, tol: f64) -> Result<DrazinResult> {
    let out = drazin(&assemble(pair), tol)?;
    if kind == InverseKind::Group && out.index > 1 {
        return Err(Error::NoGroupInverse { index: out.index });
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComparisonVerdict {
    #[serde(with = "extended_f64")]
    pub relative_error: f64,
    #[serde(with = "extended_f64")]
    pub tolerance: f64,
    pub pass: bool,
    pub oracle_index: usize,
    pub formula_kind: InverseKind,
    /// The formula output checked against the Drazin axioms for `M`.
    pub axioms: ConditionReport,
}

/// Relative Frobenius distance between `formula` (an assembled inverse) and
/// the oracle's inverse of `pair`, with `tol` as the pass threshold. A group
/// formula compared with an `M` of index above 1 has infinite error.
pub fn compare(formula: &Matrix, kind: InverseKind, pair: &BlockPair, tol: f64) -> Result<ComparisonVerdict> {
    let m = assemble(pair);
    if formula.shape() != m.shape() {
        return Err(Error::ShapeMismatch {
            op: "compare",
            left: formula.shape(),
            right: m.shape(),
        });
    }
    let truth = drazin(&m, DEFAULT_TOL)?;
    let relative_error = if kind == InverseKind::Group && truth.index > 1 {
        f64::INFINITY
    } else {
        formula.relative_distance(&truth.drazin)
    };
    let axioms = verify_drazin_axioms(&m, formula, truth.index, DEFAULT_TOL)?;
    Ok(ComparisonVerdict {
        relative_error,
        tolerance: tol,
        pass: relative_error <= tol,
        oracle_index: truth.index,
        formula_kind: kind,
        axioms,
    })
}

/// Whether a group formula's existence verdict matches the oracle's index.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExistenceVerdict {
    pub formula_exists: bool,
    pub oracle_index: usize,
    pub agree: bool,
}

pub fn check_existence(outcome: &GroupOutcome, pair: &BlockPair, tol: f64) -> Result<ExistenceVerdict> {
    let oracle_index = drazin(&assemble(pair), tol)?.index;
    let formula_exists = outcome.exists();
    Ok(ExistenceVerdict {
        formula_exists,
        oracle_index,
        agree: formula_exists == (oracle_index <= 1),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formulas::{blocks, thm41_group};
    use crate::generator::example_45;
    use crate::matrix::c;

    fn worked_inverse() -> Matrix {
        let (o, l, i) = (c(0.0, 0.0), c(1.0, 0.0), c(0.0, 1.0));
        Matrix::from_rows(&[
            vec![o, l, -i, -i],
            vec![o, -l, o, o],
            vec![-i, -i, l, l],
            vec![o, o, o, o],
        ])
        .unwrap()
    }

    #[test]
    fn assembles_each_layout() {
        let z = Matrix::zeros(2, 2);
        let id = Matrix::identity(2);
        let pair = BlockPair::new(z.clone(), z.clone(), Pattern::EiF0).unwrap();
        assert_eq!(assemble(&pair), blocks(&z, &id, &z, &z));
        let p = example_45();
        assert_eq!(assemble(&p), blocks(&p.e, &p.f, &p.f, &z));
    }

    #[test]
    fn worked_example_group_inverse() {
        let got = oracle_inverse(&example_45(), InverseKind::Group, DEFAULT_TOL).unwrap();
        assert!(got.drazin.distance(&worked_inverse()) < 1e-12);
        assert!(got.index <= 1);
    }

    #[test]
    fn involution_is_its_own_inverse() {
        let pair = BlockPair::new(Matrix::zeros(3, 3), Matrix::identity(3), Pattern::EiF0).unwrap();
        let got = oracle_inverse(&pair, InverseKind::Group, DEFAULT_TOL).unwrap();
        assert!(got.drazin.distance(&assemble(&pair)) < 1e-12);
    }

    #[test]
    fn nilpotent_e_has_no_group_inverse() {
        let e = Matrix::from_real(2, 2, &[0.0, 1.0, 0.0, 0.0]).unwrap();
        let pair = BlockPair::new(e, Matrix::zeros(2, 2), Pattern::EiF0).unwrap();
        assert!(matches!(
            oracle_inverse(&pair, InverseKind::Group, DEFAULT_TOL),
            Err(Error::NoGroupInverse { index }) if index >= 2
        ));
    }

    #[test]
    fn formula_agrees_and_corruption_fails() {
        let pair = example_45();
        let value = thm41_group(&pair.e, &pair.f, DEFAULT_TOL)
            .unwrap()
            .into_blocks()
            .unwrap()
            .assemble();
        let ok = compare(&value, InverseKind::Group, &pair, COMPARE_TOL).unwrap();
        assert!(ok.pass && ok.relative_error <= 1e-12 && ok.axioms.overall);
        let mut bad = value.clone();
        bad.set(0, 0, bad.get(0, 0) + c(1.0, 0.0));
        let v = compare(&bad, InverseKind::Group, &pair, COMPARE_TOL).unwrap();
        assert!(!v.pass && !v.axioms.overall);
    }

    #[test]
    fn layouts_are_similar() {
        // [[E, F], [I, 0]] = P⁻¹ [[E, I], [F, 0]] P with P = [[0, I], [I, −E]]
        let e = Matrix::from_real(2, 2, &[1.0, 2.0, -1.0, 0.0]).unwrap();
        let f = Matrix::from_real(2, 2, &[0.0, 1.0, 3.0, 1.0]).unwrap();
        let (z, id) = (Matrix::zeros(2, 2), Matrix::identity(2));
        let p = blocks(&z, &id, &id, &-&e);
        let p_inv = blocks(&e, &id, &id, &z);
        let row = assemble(&BlockPair::new(e.clone(), f.clone(), Pattern::EiF0).unwrap());
        let col = assemble(&BlockPair::new(e, f, Pattern::EfI0).unwrap());
        assert!((&(&p_inv * &row) * &p).distance(&col) < 1e-12);
    }
}
