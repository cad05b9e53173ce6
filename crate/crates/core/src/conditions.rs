//! Hypothesis and existence checks for the block formulas.
//!
//! Each condition is an equality `X = 0` between products of `E`, `F` and
//! their Drazin data; its residual is `‖X‖_F` and it passes when the residual
//! is at most `tol · max(1, ‖E‖_F) · max(1, ‖F‖_F)`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::formulas::{pair_scale, require_pair, Parts, TheoremId};
use crate::matrix::{check_tol, Matrix, C64};
use crate::report::ConditionReport;

/// A single matrix identity appearing in some hypothesis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ConditionId {
    /// `EFE = 0`
    Efe,
    /// `F²E = 0`
    F2e,
    /// `EFEF^π = 0`
    EfeFpi,
    /// `F²EF^π = 0`
    F2eFpi,
    /// `FEF^π = 0`
    FeFpi,
    /// `F^πEF = 0`
    FpiEf,
    /// `E^πF^π = 0`
    EpiFpi,
    /// `F^πE^π = 0`
    FpiEpi,
    /// `EE^πF^π = 0`
    EEpiFpi,
    /// `F^πE^πE = 0`
    FpiEpiE,
    /// `EF = λFE`
    EfLambdaFe,
    /// `EF² = FEF`
    Ef2Fef,
    /// `EF = λFE` or `EF² = FEF`
    Commuting,
    /// `FEF^π = 0` or `F^πEF = 0`
    EitherSide,
    /// `F` has a group inverse, measured by `‖FF^π‖`
    FGroup,
    /// `E` has a group inverse, measured by `‖EE^π‖`
    EGroup,
}

impl ConditionId {
    pub const ALL: [ConditionId; 16] = [
        ConditionId::Efe,
        ConditionId::F2e,
        ConditionId::EfeFpi,
        ConditionId::F2eFpi,
        ConditionId::FeFpi,
        ConditionId::FpiEf,
        ConditionId::EpiFpi,
        ConditionId::FpiEpi,
        ConditionId::EEpiFpi,
        ConditionId::FpiEpiE,
        ConditionId::EfLambdaFe,
        ConditionId::Ef2Fef,
        ConditionId::Commuting,
        ConditionId::EitherSide,
        ConditionId::FGroup,
        ConditionId::EGroup,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ConditionId::Efe => "EFE",
            ConditionId::F2e => "F^2E",
            ConditionId::EfeFpi => "EFEF^pi",
            ConditionId::F2eFpi => "F^2EF^pi",
            ConditionId::FeFpi => "FEF^pi",
            ConditionId::FpiEf => "F^piEF",
            ConditionId::EpiFpi => "E^piF^pi",
            ConditionId::FpiEpi => "F^piE^pi",
            ConditionId::EEpiFpi => "EE^piF^pi",
            ConditionId::FpiEpiE => "F^piE^piE",
            ConditionId::EfLambdaFe => "EF-lambdaFE",
            ConditionId::Ef2Fef => "EF^2-FEF",
            ConditionId::Commuting => "EF-lambdaFE|EF^2-FEF",
            ConditionId::EitherSide => "FEF^pi|F^piEF",
            ConditionId::FGroup => "F group",
            ConditionId::EGroup => "E group",
        }
    }
}

impl fmt::Display for ConditionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

fn normalize(s: &str) -> String {
    s.replace('π', "pi")
        .replace('²', "2")
        .replace('λ', "lambda")
        .chars()
        .filter(|c| !matches!(c, '^' | ' ' | '_' | '-'))
        .flat_map(char::to_lowercase)
        .collect()
}

impl FromStr for ConditionId {
    type Err = String;
    /// Accepts the display names, with `π`/`pi`, `²`/`^2`, and carets,
    /// spaces or dashes ignored.
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let key = normalize(s);
        ConditionId::ALL
            .into_iter()
            .find(|c| normalize(c.name()) == key)
            .ok_or_else(|| format!("unknown condition '{s}'"))
    }
}

impl TheoremId {
    /// Identities the formula requires before it can be evaluated.
    pub fn hypotheses(self) -> &'static [ConditionId] {
        use ConditionId::*;
        match self {
            TheoremId::Thm23 => &[Efe, F2e],
            TheoremId::Thm25 | TheoremId::Cor26 | TheoremId::Thm27 => &[EfeFpi, F2eFpi],
            TheoremId::Thm31 | TheoremId::Cor32 => &[FeFpi],
            TheoremId::Thm33 | TheoremId::Cor34 => &[FpiEf],
            TheoremId::Cor35 => &[Commuting],
            TheoremId::Thm41 => &[FGroup, FeFpi],
            TheoremId::Cor42 => &[FGroup, FpiEf],
            TheoremId::Cor43 => &[EGroup, FGroup, EitherSide],
            TheoremId::Cor44 => &[EGroup, FGroup, Commuting],
        }
    }

    /// Clauses that decide whether a group inverse exists once the
    /// hypotheses hold. Empty for formulas without an existence statement.
    pub fn existence(self) -> &'static [ConditionId] {
        use ConditionId::*;
        match self {
            TheoremId::Thm31 | TheoremId::Cor32 => &[FGroup, EpiFpi],
            TheoremId::Thm33 | TheoremId::Cor34 | TheoremId::Cor35 => &[FGroup, FpiEpi],
            TheoremId::Thm41 => &[EEpiFpi],
            TheoremId::Cor42 => &[FpiEpiE],
            _ => &[],
        }
    }
}

/// `E`, `F` and their Drazin data, computed once per check.
pub(crate) struct PairContext {
    pub e: Parts,
    pub f: Parts,
    pub threshold: f64,
    pub tol: f64,
}

impl PairContext {
    pub fn new(e: &Matrix, f: &Matrix, tol: f64) -> Result<Self> {
        check_tol(tol)?;
        require_pair(e, f)?;
        Ok(Self {
            e: Parts::of(e, tol)?,
            f: Parts::of(f, tol)?,
            threshold: tol * pair_scale(e, f),
            tol,
        })
    }

    /// Context for `(Eᵀ, Fᵀ)`; Drazin data transposes entrywise.
    pub fn transposed(&self) -> Self {
        Self {
            e: self.e.transpose(),
            f: self.f.transpose(),
            threshold: self.threshold,
            tol: self.tol,
        }
    }

    /// The `λ` minimizing `‖EF − λFE‖_F`, or 1 when `FE = 0`.
    pub fn best_lambda(&self) -> C64 {
        let ef = &self.e.x * &self.f.x;
        let fe = &self.f.x * &self.e.x;
        let denom: f64 = fe.data().iter().map(|z| z.norm_sqr()).sum();
        if denom == 0.0 {
            return C64::new(1.0, 0.0);
        }
        let num: C64 = fe.data().iter().zip(ef.data()).map(|(a, b)| a.conj() * b).sum();
        num / denom
    }

    pub fn residual(&self, id: ConditionId, lambda: Option<C64>) -> f64 {
        let e = &self.e.x;
        let f = &self.f.x;
        let (epi, fpi) = (&self.e.pi, &self.f.pi);
        let norm = |m: Matrix| m.frobenius_norm();
        match id {
            ConditionId::Efe => norm(&(e * f) * e),
            ConditionId::F2e => norm(&(f * f) * e),
            ConditionId::EfeFpi => norm(&(&(e * f) * e) * fpi),
            ConditionId::F2eFpi => norm(&(&(f * f) * e) * fpi),
            ConditionId::FeFpi => norm(&(f * e) * fpi),
            ConditionId::FpiEf => norm(&(fpi * e) * f),
            ConditionId::EpiFpi => norm(epi * fpi),
            ConditionId::FpiEpi => norm(fpi * epi),
            ConditionId::EEpiFpi => norm(&(e * epi) * fpi),
            ConditionId::FpiEpiE => norm(&(fpi * epi) * e),
            ConditionId::EfLambdaFe => {
                let lambda = lambda.unwrap_or_else(|| self.best_lambda());
                norm(&(e * f) - &(f * e).scale(lambda))
            }
            ConditionId::Ef2Fef => norm(&(&(e * f) * f) - &(&(f * e) * f)),
            ConditionId::Commuting => self
                .residual(ConditionId::EfLambdaFe, lambda)
                .min(self.residual(ConditionId::Ef2Fef, lambda)),
            ConditionId::EitherSide => self
                .residual(ConditionId::FeFpi, lambda)
                .min(self.residual(ConditionId::FpiEf, lambda)),
            ConditionId::FGroup => norm(f * fpi),
            ConditionId::EGroup => norm(e * epi),
        }
    }

    pub fn report(&self, ids: &[ConditionId], lambda: Option<C64>) -> ConditionReport {
        let mut report = ConditionReport::new();
        for &id in ids {
            report.push(id.name(), self.residual(id, lambda), self.threshold);
        }
        report
    }

    pub fn passes(&self, id: ConditionId, lambda: Option<C64>) -> bool {
        self.residual(id, lambda) <= self.threshold
    }
}

/// Residuals of every hypothesis and existence clause of `theorem`.
/// The commutation clause uses the least-squares `λ`.
pub fn check_conditions(e: &Matrix, f: &Matrix, theorem: TheoremId, tol: f64) -> Result<ConditionReport> {
    check_conditions_with_lambda(e, f, theorem, None, tol)
}

/// As [`check_conditions`], with a fixed `λ` for `EF = λFE`.
pub fn check_conditions_with_lambda(
    e: &Matrix,
    f: &Matrix,
    theorem: TheoremId,
    lambda: Option<C64>,
    tol: f64,
) -> Result<ConditionReport> {
    let ctx = PairContext::new(e, f, tol)?;
    let mut ids: Vec<ConditionId> = theorem.hypotheses().to_vec();
    for id in theorem.existence() {
        if !ids.contains(id) {
            ids.push(*id);
        }
    }
    Ok(ctx.report(&ids, lambda))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{c, DEFAULT_TOL};

    fn example_e() -> Matrix {
        Matrix::from_real(2, 2, &[1.0, 2.0, 0.0, -1.0]).unwrap()
    }

    fn example_f() -> Matrix {
        Matrix::from_rows(&[vec![c(0.0, 1.0), c(0.0, 1.0)], vec![c(0.0, 0.0), c(0.0, 0.0)]]).unwrap()
    }

    #[test]
    fn example_pair_satisfies_identical_subblock_conditions() {
        let r = check_conditions(&example_e(), &example_f(), TheoremId::Thm41, DEFAULT_TOL).unwrap();
        assert!(r.overall, "{r}");
        assert_eq!(r.entry("FEF^pi").unwrap().residual, 0.0);
        assert_eq!(r.entry("EE^piF^pi").unwrap().residual, 0.0);
    }

    #[test]
    fn identities_pass_group_family() {
        let i = Matrix::identity(2);
        let r = check_conditions(&i, &i, TheoremId::Thm31, DEFAULT_TOL).unwrap();
        assert!(r.overall);
        assert_eq!(r.entry("FEF^pi").unwrap().residual, 0.0);
    }

    #[test]
    fn jordan_block_fails_fef_pi_with_unit_residual() {
        let i = Matrix::identity(2);
        let j = Matrix::from_real(2, 2, &[0.0, 1.0, 0.0, 0.0]).unwrap();
        let r = check_conditions(&i, &j, TheoremId::Thm31, DEFAULT_TOL).unwrap();
        let entry = r.entry("FEF^pi").unwrap();
        assert!(!entry.pass);
        assert!((entry.residual - 1.0).abs() < 1e-12);
    }

    #[test]
    fn anticommuting_pair_finds_lambda() {
        let e = Matrix::diag(&[c(1.0, 0.0), c(-1.0, 0.0)]);
        let f = Matrix::from_real(2, 2, &[0.0, 1.0, 0.0, 0.0]).unwrap();
        let ctx = PairContext::new(&e, &f, DEFAULT_TOL).unwrap();
        assert!((ctx.best_lambda() - c(-1.0, 0.0)).norm() < 1e-15);
        assert_eq!(ctx.residual(ConditionId::EfLambdaFe, None), 0.0);
        assert!(ctx.residual(ConditionId::EfLambdaFe, Some(c(1.0, 0.0))) > 1.0);
    }

    #[test]
    fn condition_names_parse() {
        for id in ConditionId::ALL {
            assert_eq!(id.name().parse::<ConditionId>().unwrap(), id);
        }
        assert_eq!("E^πF^π".parse::<ConditionId>().unwrap(), ConditionId::EpiFpi);
        assert_eq!("EpiFpi".parse::<ConditionId>().unwrap(), ConditionId::EpiFpi);
        assert_eq!("F²EF^π".parse::<ConditionId>().unwrap(), ConditionId::F2eFpi);
        assert!("nonsense".parse::<ConditionId>().is_err());
    }

    #[test]
    fn scalar_conditions() {
        let e = Matrix::from_real(1, 1, &[2.0]).unwrap();
        let f = Matrix::from_real(1, 1, &[0.0]).unwrap();
        let r = check_conditions(&e, &f, TheoremId::Thm31, DEFAULT_TOL).unwrap();
        // F = 0 is group invertible and E^π = 0
        assert!(r.overall);
    }
}
