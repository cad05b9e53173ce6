//! Seeded `(E, F)` pairs that satisfy, or deliberately break, the hypotheses
//! of a block formula.
//!
//! Pairs are built in a basis where `F = diag(C, N)` with `C` an invertible
//! diagonal and `N` a direct sum of Jordan blocks, so `F^π = diag(0, I)` and
//! every hypothesis becomes a constraint on the blocks of `E`. The basis is
//! then hidden by a unimodular integer similarity `S`. Entries are small
//! integers and dyadic rationals, so the products are exact in floating
//! point. Every candidate is screened by [`check_conditions`] before it is
//! returned.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::conditions::{check_conditions, ConditionId};
use crate::error::{Error, Result};
use crate::formulas::{BlockPair, Pattern, TheoremId};
use crate::matrix::{c, Matrix, C64, DEFAULT_TOL, ONE, ZERO};

/// Attempts per recipe before a violation is declared infeasible.
const ATTEMPTS: u64 = 64;

/// Largest entry modulus of an accepted `E` or `F`. Routes that multiply
/// by `E` (the layout similarities) lose about `‖E‖²` ulps, so bounded
/// entries keep independent routes comparable at a fixed tolerance.
pub const ENTRY_BOUND: f64 = 32.0;

/// A violated clause must miss by at least this multiple of the pair scale.
pub const VIOLATION_MARGIN: f64 = 1e-3;

/// Everything that determines a generated pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorRecipe {
    pub theorem: TheoremId,
    pub dimension: usize,
    pub seed: u64,
    pub violate: Option<ConditionId>,
}

impl GeneratorRecipe {
    pub fn new(theorem: TheoremId, dimension: usize, seed: u64) -> Self {
        Self {
            theorem,
            dimension,
            seed,
            violate: None,
        }
    }

    pub fn violating(mut self, id: ConditionId) -> Self {
        self.violate = Some(id);
        self
    }

    fn stream(&self, attempt: u64) -> u64 {
        let theorem = TheoremId::ALL.iter().position(|t| *t == self.theorem).unwrap_or(0) as u64;
        let violate = self
            .violate
            .and_then(|v| ConditionId::ALL.iter().position(|x| *x == v))
            .map_or(0, |i| i as u64 + 1);
        (theorem << 56) | (violate << 48) | ((self.dimension as u64 & 0xffff) << 32) | attempt
    }
}

/// The worked example: `E = [[1, 2], [0, −1]]`, `F = [[i, i], [0, 0]]`.
pub fn example_45() -> BlockPair {
    let e = Matrix::from_real(2, 2, &[1.0, 2.0, 0.0, -1.0]).expect("fixed shape");
    let f = Matrix::from_rows(&[vec![c(0.0, 1.0), c(0.0, 1.0)], vec![ZERO, ZERO]]).expect("fixed shape");
    BlockPair {
        e,
        f,
        pattern: Pattern::EfF0,
    }
}

/// Builds a pair for `recipe`. With `violate` set, exactly that clause fails
/// (by at least [`VIOLATION_MARGIN`] times the pair scale) and every other
/// clause of the theorem passes.
pub fn generate(recipe: &GeneratorRecipe) -> Result<BlockPair> {
    let theorem = recipe.theorem;
    let n = recipe.dimension;
    if n == 0 {
        return Err(Error::Infeasible("dimension must be at least 1".into()));
    }
    if let Some(v) = recipe.violate {
        let listed = theorem.hypotheses().contains(&v) || theorem.existence().contains(&v);
        if !listed {
            return Err(Error::Infeasible(format!(
                "{} is not a condition of {}",
                v.name(),
                theorem.name()
            )));
        }
        if v == ConditionId::FGroup
            && matches!(
                theorem,
                TheoremId::Thm31 | TheoremId::Cor32 | TheoremId::Thm33 | TheoremId::Cor34
            )
        {
            // FEF^π = 0 (or its mirror) with nilpotent N forces E22 singular,
            // which breaks E^πF^π = 0 as well.
            return Err(Error::Infeasible(format!(
                "{}: a non-group F always breaks the E/F spectral clause too",
                theorem.name()
            )));
        }
    }
    for attempt in 0..ATTEMPTS {
        let mut rng = ChaCha8Rng::seed_from_u64(recipe.seed);
        rng.set_stream(recipe.stream(attempt));
        let Some((eb, canon)) = build(theorem, recipe.violate, n, &mut rng) else {
            continue;
        };
        let (s, s_inv) = unimodular(&mut rng, n);
        let e = &(&s * &eb) * &s_inv;
        let f = &(&s * &canon.f_basis()) * &s_inv;
        if e.max_abs().max(f.max_abs()) <= ENTRY_BOUND && accepts(&e, &f, theorem, recipe.violate)? {
            return Ok(BlockPair {
                e,
                f,
                pattern: theorem.pattern(),
            });
        }
    }
    Err(Error::Infeasible(match recipe.violate {
        Some(v) => format!("no {n}x{n} pair for {} breaks only {}", theorem.name(), v.name()),
        None => format!("no {n}x{n} pair found for {}", theorem.name()),
    }))
}

fn accepts(e: &Matrix, f: &Matrix, theorem: TheoremId, violate: Option<ConditionId>) -> Result<bool> {
    let report = check_conditions(e, f, theorem, DEFAULT_TOL)?;
    Ok(report.entries.iter().all(|entry| {
        let named = violate.is_some_and(|v| v.name() == entry.name);
        if named {
            let scale = entry.threshold / DEFAULT_TOL;
            !entry.pass && entry.residual >= VIOLATION_MARGIN * scale
        } else {
            entry.pass
        }
    }))
}

/// `F` in its canonical basis: `diag(C, N)`, `C` of size `r`, `N` a direct
/// sum of upper Jordan blocks.
struct Canon {
    c: Vec<C64>,
    blocks: Vec<usize>,
}

impl Canon {
    fn r(&self) -> usize {
        self.c.len()
    }

    fn s(&self) -> usize {
        self.blocks.iter().sum()
    }

    /// Position of each nilpotent coordinate inside its Jordan block.
    fn positions(&self) -> Vec<usize> {
        self.blocks.iter().flat_map(|&m| 0..m).collect()
    }

    fn nilpotent(&self) -> Matrix {
        let s = self.s();
        let mut out = Matrix::zeros(s, s);
        let mut at = 0;
        for &m in &self.blocks {
            for j in 0..m.saturating_sub(1) {
                out.set(at + j, at + j + 1, ONE);
            }
            at += m;
        }
        out
    }

    fn f_basis(&self) -> Matrix {
        join(
            &Matrix::diag(&self.c),
            &Matrix::zeros(self.r(), self.s()),
            &Matrix::zeros(self.s(), self.r()),
            &self.nilpotent(),
        )
    }

    /// Nilpotent row/column index of position `pos` in the first block of
    /// size at least `pos + 1`.
    fn coordinate(&self, pos: usize) -> Option<usize> {
        let mut at = 0;
        for &m in &self.blocks {
            if m > pos {
                return Some(at + pos);
            }
            at += m;
        }
        None
    }
}

fn join(tl: &Matrix, tr: &Matrix, bl: &Matrix, br: &Matrix) -> Matrix {
    Matrix::from_blocks(tl, tr, bl, br).expect("generator blocks are conformal")
}

/// Random `F` structure: `r` invertible coordinates and Jordan blocks of
/// size at most `max_block`, with at least one of size `min_block` if
/// `min_block > 1`.
fn canon(rng: &mut ChaCha8Rng, n: usize, max_block: usize, min_block: usize) -> Option<Canon> {
    let r = rng.gen_range(0..=n);
    let s = n - r;
    let mut blocks = Vec::new();
    let mut left = s;
    if min_block > 1 {
        if s < min_block {
            return None;
        }
        blocks.push(min_block);
        left -= min_block;
    }
    while left > 0 {
        let m = rng.gen_range(1..=max_block.min(left));
        blocks.push(m);
        left -= m;
    }
    blocks.shuffle(rng);
    let c = (0..r).map(|_| unit_scalar(rng)).collect();
    Some(Canon { c, blocks })
}

/// Nonzero scalar of modulus in `[0.5, 2]` with dyadic parts.
fn unit_scalar(rng: &mut ChaCha8Rng) -> C64 {
    const CHOICES: [(f64, f64); 10] = [
        (0.5, 0.0),
        (1.0, 0.0),
        (1.5, 0.0),
        (2.0, 0.0),
        (0.0, 1.0),
        (1.0, 1.0),
        (1.0, -1.0),
        (0.5, 0.5),
        (0.0, 2.0),
        (1.5, -0.5),
    ];
    let (re, im) = *CHOICES.choose(rng).expect("nonempty");
    let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
    c(sign * re, sign * im)
}

fn entry(rng: &mut ChaCha8Rng) -> C64 {
    let re = rng.gen_range(-2i32..=2) as f64;
    let im = if rng.gen_bool(0.25) {
        rng.gen_range(-1i32..=1) as f64
    } else {
        0.0
    };
    c(re, im)
}

fn dense(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Matrix {
    let mut out = Matrix::zeros(rows, cols);
    for i in 0..rows {
        for j in 0..cols {
            out.set(i, j, entry(rng));
        }
    }
    out
}

/// Largest entry allowed in a similarity or its inverse.
const MAX_SIMILARITY_ENTRY: f64 = 4.0;

/// A product of `k` elementary row operations `row_i += m·row_j` with
/// `m ∈ {−2, −1, 1, 2}`, and its exact inverse. Products whose entries
/// exceed [`MAX_SIMILARITY_ENTRY`] are redrawn, keeping `S` well conditioned.
fn unimodular(rng: &mut ChaCha8Rng, k: usize) -> (Matrix, Matrix) {
    loop {
        let mut s = Matrix::identity(k);
        let mut inv = Matrix::identity(k);
        if k > 1 {
            for _ in 0..k + 1 {
                let i = rng.gen_range(0..k);
                let j = (i + rng.gen_range(1..k)) % k;
                let m = *[-2.0, -1.0, 1.0, 2.0].choose(rng).expect("nonempty");
                let mut op = Matrix::identity(k);
                op.set(i, j, c(m, 0.0));
                s = &op * &s;
                op.set(i, j, c(-m, 0.0));
                inv = &inv * &op;
            }
        }
        if s.max_abs() <= MAX_SIMILARITY_ENTRY && inv.max_abs() <= MAX_SIMILARITY_ENTRY {
            return (s, inv);
        }
    }
}

fn conjugate(rng: &mut ChaCha8Rng, core: &Matrix) -> Matrix {
    let (r, r_inv) = unimodular(rng, core.rows());
    &(&r * core) * &r_inv
}

fn invertible_block(rng: &mut ChaCha8Rng, k: usize) -> Matrix {
    let d: Vec<C64> = (0..k).map(|_| unit_scalar(rng)).collect();
    conjugate(rng, &Matrix::diag(&d))
}

/// Group-invertible block with at least `zeros` zero eigenvalues.
fn group_block(rng: &mut ChaCha8Rng, k: usize, zeros: usize) -> Matrix {
    let d: Vec<C64> = (0..k)
        .map(|i| {
            if i < zeros || rng.gen_bool(0.25) {
                ZERO
            } else {
                unit_scalar(rng)
            }
        })
        .collect();
    conjugate(rng, &Matrix::diag(&d))
}

/// Similar to a single Jordan block of size `k`, so of index `k`.
fn nilpotent_block(rng: &mut ChaCha8Rng, k: usize) -> Matrix {
    let canon = Canon {
        c: Vec::new(),
        blocks: vec![k],
    };
    conjugate(rng, &canon.nilpotent())
}

fn diagonal(rng: &mut ChaCha8Rng, k: usize) -> Matrix {
    let d: Vec<C64> = (0..k)
        .map(|_| if rng.gen_bool(0.25) { ZERO } else { unit_scalar(rng) })
        .collect();
    Matrix::diag(&d)
}

fn mask_rows(x: &Matrix, keep: impl Fn(usize) -> bool) -> Matrix {
    let mut out = x.clone();
    for i in (0..x.rows()).filter(|&i| !keep(i)) {
        for j in 0..x.cols() {
            out.set(i, j, ZERO);
        }
    }
    out
}

fn mask_cols(x: &Matrix, keep: impl Fn(usize) -> bool) -> Matrix {
    mask_rows(&x.transpose(), keep).transpose()
}

/// `E` in the canonical basis of `F`, together with that basis.
fn build(theorem: TheoremId, violate: Option<ConditionId>, n: usize, rng: &mut ChaCha8Rng) -> Option<(Matrix, Canon)> {
    use ConditionId as C;
    use TheoremId as T;
    match theorem {
        T::Thm23 => {
            let min = match violate {
                Some(C::Efe) => 2,
                Some(C::F2e) => 3,
                _ => 1,
            };
            let cn = canon(rng, n, 3, min)?;
            let (r, s) = (cn.r(), cn.s());
            let pos = cn.positions();
            let (e21, e22) = match violate {
                Some(C::F2e) => {
                    let third = cn.coordinate(2)?;
                    (mask_rows(&dense(rng, s, r), |i| i == third), Matrix::zeros(s, s))
                }
                _ => {
                    let e21 = mask_rows(&dense(rng, s, r), |i| pos[i] < 2);
                    let e22 = mask_rows(&dense(rng, s, s), |i| pos[i] < 2);
                    let e22 = if violate == Some(C::Efe) {
                        e22
                    } else {
                        mask_cols(&e22, |j| pos[j] != 0)
                    };
                    (e21, e22)
                }
            };
            Some((join(&Matrix::zeros(r, r), &Matrix::zeros(r, s), &e21, &e22), cn))
        }
        T::Thm25 | T::Cor26 | T::Thm27 => {
            let min = match violate {
                Some(C::EfeFpi) => 2,
                Some(C::F2eFpi) => 3,
                _ => 1,
            };
            let cn = canon(rng, n, 3, min)?;
            let (r, s) = (cn.r(), cn.s());
            let pos = cn.positions();
            let e22 = match violate {
                Some(C::F2eFpi) => {
                    let third = cn.coordinate(2)?;
                    let second = third - 1;
                    let w = mask_cols(&dense(rng, 1, s), |j| j != second);
                    let mut v = Matrix::zeros(s, 1);
                    v.set(third, 0, ONE);
                    &v * &w
                }
                Some(C::EfeFpi) => mask_rows(&dense(rng, s, s), |i| pos[i] < 2),
                _ => mask_cols(&mask_rows(&dense(rng, s, s), |i| pos[i] < 2), |j| pos[j] != 0),
            };
            Some((
                join(&dense(rng, r, r), &Matrix::zeros(r, s), &dense(rng, s, r), &e22),
                cn,
            ))
        }
        T::Thm31 | T::Cor32 | T::Thm33 | T::Cor34 => {
            let cn = canon(rng, n, 1, 1)?;
            let (r, s) = (cn.r(), cn.s());
            let eb = match violate {
                Some(C::FeFpi) | Some(C::FpiEf) => invertible_block(rng, n),
                _ => {
                    let e22 = if violate.is_some() {
                        if s == 0 {
                            return None;
                        }
                        group_block(rng, s, 1)
                    } else {
                        invertible_block(rng, s)
                    };
                    join(&dense(rng, r, r), &Matrix::zeros(r, s), &dense(rng, s, r), &e22)
                }
            };
            let column = matches!(theorem, T::Thm33 | T::Cor34);
            Some((if column { eb.transpose() } else { eb }, cn))
        }
        T::Cor35 => {
            let cn = canon(
                rng,
                n,
                if violate == Some(C::FGroup) { 3 } else { 1 },
                if violate == Some(C::FGroup) { 2 } else { 1 },
            )?;
            let (r, s) = (cn.r(), cn.s());
            let eb = match violate {
                Some(C::Commuting) => invertible_block(rng, n),
                Some(C::FGroup) => {
                    let a = unit_scalar(rng);
                    let b = entry(rng);
                    let d2 = &Matrix::identity(s).scale(a) + &cn.nilpotent().scale(b);
                    join(&diagonal(rng, r), &Matrix::zeros(r, s), &Matrix::zeros(s, r), &d2)
                }
                _ => {
                    let d2 = if violate == Some(C::FpiEpi) {
                        if s == 0 {
                            return None;
                        }
                        group_block(rng, s, 1)
                    } else {
                        invertible_block(rng, s)
                    };
                    if rng.gen_bool(0.5) {
                        join(&diagonal(rng, r), &Matrix::zeros(r, s), &Matrix::zeros(s, r), &d2)
                    } else {
                        // EF² = FEF without EF = λFE
                        join(&diagonal(rng, r), &dense(rng, r, s), &Matrix::zeros(s, r), &d2)
                    }
                }
            };
            Some((eb, cn))
        }
        T::Thm41 | T::Cor42 => {
            let relax_f = violate == Some(C::FGroup);
            let cn = canon(rng, n, if relax_f { 3 } else { 1 }, if relax_f { 2 } else { 1 })?;
            let (r, s) = (cn.r(), cn.s());
            let eb = match violate {
                Some(C::FeFpi) | Some(C::FpiEf) => invertible_block(rng, n),
                Some(C::FGroup) => join(
                    &dense(rng, r, r),
                    &Matrix::zeros(r, s),
                    &dense(rng, s, r),
                    &Matrix::zeros(s, s),
                ),
                Some(_) => {
                    if s < 2 {
                        return None;
                    }
                    join(
                        &dense(rng, r, r),
                        &Matrix::zeros(r, s),
                        &dense(rng, s, r),
                        &nilpotent_block(rng, s),
                    )
                }
                None => {
                    let zeros = rng.gen_range(0..=s);
                    join(
                        &dense(rng, r, r),
                        &Matrix::zeros(r, s),
                        &dense(rng, s, r),
                        &group_block(rng, s, zeros),
                    )
                }
            };
            let column = theorem == T::Cor42;
            Some((if column { eb.transpose() } else { eb }, cn))
        }
        T::Cor43 => {
            let relax_f = violate == Some(C::FGroup);
            let cn = canon(rng, n, if relax_f { 3 } else { 1 }, if relax_f { 2 } else { 1 })?;
            let (r, s) = (cn.r(), cn.s());
            let (zrs, zsr) = (Matrix::zeros(r, s), Matrix::zeros(s, r));
            let eb = match violate {
                Some(C::EitherSide) => invertible_block(rng, n),
                Some(C::FGroup) => join(&invertible_block(rng, r), &zrs, &zsr, &Matrix::zeros(s, s)),
                Some(_) => {
                    if r >= 2 && (s < 2 || rng.gen_bool(0.5)) {
                        join(&nilpotent_block(rng, r), &zrs, &zsr, &invertible_block(rng, s))
                    } else if s >= 2 {
                        join(&invertible_block(rng, r), &zrs, &zsr, &nilpotent_block(rng, s))
                    } else {
                        return None;
                    }
                }
                None => match rng.gen_range(0..3) {
                    0 => join(
                        &invertible_block(rng, r),
                        &zrs,
                        &dense(rng, s, r),
                        &invertible_block(rng, s),
                    ),
                    1 => join(
                        &invertible_block(rng, r),
                        &dense(rng, r, s),
                        &zsr,
                        &invertible_block(rng, s),
                    ),
                    _ => {
                        let (zr, zs) = (rng.gen_range(0..=r), rng.gen_range(0..=s));
                        join(&group_block(rng, r, zr), &zrs, &zsr, &group_block(rng, s, zs))
                    }
                },
            };
            Some((eb, cn))
        }
        T::Cor44 => {
            let relax_f = violate == Some(C::FGroup);
            let cn = canon(rng, n, if relax_f { 3 } else { 1 }, if relax_f { 2 } else { 1 })?;
            let (r, s) = (cn.r(), cn.s());
            let (zrs, zsr) = (Matrix::zeros(r, s), Matrix::zeros(s, r));
            let eb = match violate {
                Some(C::Commuting) => invertible_block(rng, n),
                Some(C::FGroup) => {
                    let d2 = &Matrix::identity(s).scale(unit_scalar(rng)) + &cn.nilpotent().scale(entry(rng));
                    join(&diagonal(rng, r), &zrs, &zsr, &d2)
                }
                Some(_) => {
                    if s < 2 {
                        return None;
                    }
                    join(&diagonal(rng, r), &zrs, &zsr, &nilpotent_block(rng, s))
                }
                None => {
                    if rng.gen_bool(0.5) {
                        let zs = rng.gen_range(0..=s);
                        join(&diagonal(rng, r), &zrs, &zsr, &group_block(rng, s, zs))
                    } else {
                        let d: Vec<C64> = (0..r).map(|_| unit_scalar(rng)).collect();
                        join(&Matrix::diag(&d), &dense(rng, r, s), &zsr, &invertible_block(rng, s))
                    }
                }
            };
            Some((eb, cn))
        }
    }
}
