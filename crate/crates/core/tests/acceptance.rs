//! Acceptance checks. Prints one pass/fail line per criterion and exits
//! nonzero if any fails.

mod common;

use std::time::{Duration, Instant};

use gdrazin::cli::sweep_theorem;
use gdrazin::conditions::ConditionId;
use gdrazin::formulas::{
    cor32_group, cor34_group, cor42_group, run_formula, thm25, thm27, thm31_group, thm33_group, thm41_group, BlockPair,
    FormulaOutput, TheoremId,
};
use gdrazin::generator::{example_45, generate, GeneratorRecipe};
use gdrazin::ginv::{drazin, group_inverse, index_of, index_of_with_floor, verify_drazin_axioms};
use gdrazin::matrix::{c, Matrix, DEFAULT_TOL, ONE};
use gdrazin::oracle::{check_existence, COMPARE_TOL};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{random_matrix, similarity, FAMILIES};

const SEEDS: u64 = 200;

/// Pass flag and a one-line summary.
type Check = fn() -> (bool, String);

fn m(rows: &[&[(f64, f64)]]) -> Matrix {
    Matrix::from_rows(
        &rows
            .iter()
            .map(|r| r.iter().map(|&(re, im)| c(re, im)).collect())
            .collect::<Vec<_>>(),
    )
    .unwrap()
}

fn real(rows: &[&[f64]]) -> Matrix {
    Matrix::from_rows(
        &rows
            .iter()
            .map(|r| r.iter().map(|&x| c(x, 0.0)).collect())
            .collect::<Vec<_>>(),
    )
    .unwrap()
}

fn max_entry_gap(a: &Matrix, b: &Matrix) -> f64 {
    a.data()
        .iter()
        .zip(b.data())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

fn sample(theorem: TheoremId, seed: u64) -> BlockPair {
    generate(&GeneratorRecipe::new(theorem, 1 + (seed % 4) as usize, seed)).expect("generator covers every theorem")
}

fn group_value(out: gdrazin::formulas::GroupOutcome) -> Matrix {
    out.into_blocks().expect("group inverse exists").assemble()
}

fn golden_fixture() -> (bool, String) {
    let pair = example_45();
    let expected = m(&[
        &[(0.0, 0.0), (1.0, 0.0), (0.0, -1.0), (0.0, -1.0)],
        &[(0.0, 0.0), (-1.0, 0.0), (0.0, 0.0), (0.0, 0.0)],
        &[(0.0, -1.0), (0.0, -1.0), (1.0, 0.0), (1.0, 0.0)],
        &[(0.0, 0.0), (0.0, 0.0), (0.0, 0.0), (0.0, 0.0)],
    ]);
    let mut best = Duration::MAX;
    let mut gap = f64::INFINITY;
    for _ in 0..20 {
        let start = Instant::now();
        let got = group_value(thm41_group(&pair.e, &pair.f, DEFAULT_TOL).unwrap());
        best = best.min(start.elapsed());
        gap = max_entry_gap(&got, &expected);
    }
    let pass = gap <= 1e-12 && best < Duration::from_millis(1);
    (pass, format!("max entry error {gap:.2e}, runtime {best:?}"))
}

fn intermediate_fixture() -> (bool, String) {
    let pair = example_45();
    let e = group_inverse(&pair.e, DEFAULT_TOL).unwrap();
    let f = group_inverse(&pair.f, DEFAULT_TOL).unwrap();
    let i = |x: f64| (0.0, x);
    let r = |x: f64| (x, 0.0);
    let expected_e_group = real(&[&[1.0, 2.0], &[0.0, -1.0]]);
    let expected_f_group = m(&[&[i(-1.0), i(-1.0)], &[r(0.0), r(0.0)]]);
    let expected_f_pi = real(&[&[0.0, -1.0], &[0.0, 1.0]]);
    let blocks = thm41_group(&pair.e, &pair.f, DEFAULT_TOL)
        .unwrap()
        .into_blocks()
        .unwrap();
    let gaps = [
        max_entry_gap(&e.group, &expected_e_group),
        max_entry_gap(&e.idempotent, &Matrix::zeros(2, 2)),
        max_entry_gap(&f.group, &expected_f_group),
        max_entry_gap(&f.idempotent, &expected_f_pi),
        max_entry_gap(&blocks.gamma, &real(&[&[0.0, 1.0], &[0.0, -1.0]])),
        max_entry_gap(&blocks.delta, &expected_f_group),
        max_entry_gap(&blocks.lambda, &expected_f_group),
        max_entry_gap(&blocks.xi, &real(&[&[1.0, 1.0], &[0.0, 0.0]])),
    ];
    let worst = gaps.iter().copied().fold(0.0, f64::max);
    (
        worst <= 1e-12,
        format!("E^#, E^pi, F^#, F^pi and four blocks, max entry error {worst:.2e}"),
    )
}

fn oracle_sweep() -> (bool, String) {
    let start = Instant::now();
    let mut pass = true;
    let mut worst = 0.0f64;
    let mut failing = Vec::new();
    for theorem in TheoremId::ALL {
        let row = sweep_theorem(theorem, SEEDS as usize, 4, 0, COMPARE_TOL, DEFAULT_TOL);
        worst = worst.max(row.max_relative_error);
        if row.failures > 0 || row.instances < SEEDS as usize {
            pass = false;
            failing.push(format!("{}: {} failures", theorem.name(), row.failures));
        }
    }
    let elapsed = start.elapsed();
    pass &= elapsed < Duration::from_secs(60);
    let detail = format!(
        "13 theorems x {SEEDS} instances, max relative error {worst:.2e}, {:.2} s{}",
        elapsed.as_secs_f64(),
        if failing.is_empty() {
            String::new()
        } else {
            format!(" [{}]", failing.join(", "))
        }
    );
    (pass, detail)
}

fn existence_equivalence() -> (bool, String) {
    let cases = [
        (TheoremId::Thm31, ConditionId::EpiFpi),
        (TheoremId::Thm33, ConditionId::FpiEpi),
        (TheoremId::Thm41, ConditionId::EEpiFpi),
    ];
    let mut pass = true;
    let mut notes = Vec::new();
    for (theorem, clause) in cases {
        let (mut agree, mut total, mut negatives) = (0, 0, 0);
        for seed in 0..60 {
            for violate in [true, false] {
                // a 1x1 pair cannot break the existence clauses
                let mut recipe = GeneratorRecipe::new(theorem, 2 + (seed % 3) as usize, seed);
                if violate {
                    recipe = recipe.violating(clause);
                }
                let Ok(pair) = generate(&recipe) else { continue };
                let out = run_formula(theorem, &pair.e, &pair.f, None, DEFAULT_TOL).unwrap();
                let FormulaOutput::Group(outcome) = out else {
                    unreachable!("group theorem")
                };
                let verdict = check_existence(&outcome, &pair, DEFAULT_TOL).unwrap();
                total += 1;
                negatives += usize::from(!outcome.exists());
                agree += usize::from(verdict.agree);
            }
        }
        pass &= agree == total && negatives >= 50;
        notes.push(format!(
            "{}: {agree}/{total} agree, {negatives} without group inverse",
            theorem.name()
        ));
    }
    (pass, notes.join("; "))
}

fn truncation_identity() -> (bool, String) {
    let mut worst = 0.0f64;
    let mut caps_ok = true;
    let mut shared = 0;
    for theorem in [TheoremId::Thm25, TheoremId::Thm27] {
        for seed in 0..SEEDS {
            let pair = sample(theorem, seed);
            let (g, _) = thm25(&pair.e, &pair.f, DEFAULT_TOL).unwrap();
            let d = thm27(&pair.e, &pair.f, DEFAULT_TOL).unwrap();
            worst = worst.max(g.assemble().relative_distance(&d.assemble()));
            let f_pi = drazin(&pair.f, DEFAULT_TOL).unwrap().idempotent;
            let ind_f = index_of(&pair.f, DEFAULT_TOL).unwrap();
            // E·F^π is judged at the scale of its factors, not of its own entries
            let floor = pair.e.max_abs().max(1.0) * f_pi.max_abs().max(1.0);
            let k = index_of_with_floor(&(&pair.e * &f_pi), DEFAULT_TOL, floor).unwrap() + 2 * ind_f;
            caps_ok &= d.truncation.outer == Some(k) && d.truncation.inner == Some(ind_f);
            shared += 1;
        }
    }
    (
        worst <= 1e-12 && caps_ok,
        format!(
            "{shared} shared instances, max relative difference {worst:.2e}, caps {}",
            if caps_ok { "match" } else { "differ" }
        ),
    )
}

fn drazin_core() -> (bool, String) {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let (mut axioms_ok, mut unique_ok, mut detected) = (0, 0, 0);
    let mut worst = 0.0f64;
    let total = 500;
    for t in 0..total {
        let n = rng.gen_range(1..=8);
        let a = random_matrix(&mut rng, FAMILIES[t % 4], n);
        let d = drazin(&a, DEFAULT_TOL).unwrap();
        if verify_drazin_axioms(&a, &d.drazin, d.index, DEFAULT_TOL)
            .unwrap()
            .overall
        {
            axioms_ok += 1;
        }
        // second candidates: the transpose route and a similarity route
        let via_transpose = drazin(&a.transpose(), DEFAULT_TOL).unwrap().drazin.transpose();
        let (s, s_inv) = similarity(&mut rng, n);
        let via_similarity = &(&s * &drazin(&(&(&s_inv * &a) * &s), DEFAULT_TOL).unwrap().drazin) * &s_inv;
        let mut ok = true;
        for candidate in [via_transpose, via_similarity] {
            if verify_drazin_axioms(&a, &candidate, d.index, DEFAULT_TOL)
                .unwrap()
                .overall
            {
                let gap = candidate.relative_distance(&d.drazin);
                worst = worst.max(gap);
                ok &= gap <= 1e-8;
            }
        }
        unique_ok += usize::from(ok);
        // a perturbed candidate must be rejected
        let mut wrong = d.drazin.clone();
        wrong.set(0, 0, wrong.get(0, 0) + ONE);
        detected += usize::from(!verify_drazin_axioms(&a, &wrong, d.index, DEFAULT_TOL).unwrap().overall);
    }
    (
        axioms_ok == total && unique_ok == total && detected == total,
        format!(
            "{total} matrices, axioms {axioms_ok}/{total}, uniqueness {unique_ok}/{total} (max gap {worst:.2e}), perturbations rejected {detected}/{total}"
        ),
    )
}

fn duality_and_similarity() -> (bool, String) {
    let tol = 1e-10;
    let mut worst = [0.0f64; 4];
    for seed in 0..SEEDS {
        let pair = sample(TheoremId::Thm33, seed);
        let direct = group_value(thm33_group(&pair.e, &pair.f, DEFAULT_TOL).unwrap());
        let dual = group_value(thm31_group(&pair.e.transpose(), &pair.f.transpose(), DEFAULT_TOL).unwrap()).transpose();
        worst[0] = worst[0].max(direct.relative_distance(&dual));

        let pair = sample(TheoremId::Cor42, seed);
        let direct = group_value(cor42_group(&pair.e, &pair.f, DEFAULT_TOL).unwrap());
        let dual = group_value(thm41_group(&pair.e.transpose(), &pair.f.transpose(), DEFAULT_TOL).unwrap()).transpose();
        worst[1] = worst[1].max(direct.relative_distance(&dual));

        let pair = sample(TheoremId::Cor32, seed);
        let (zero, one) = (zeros(pair.dim()), Matrix::identity(pair.dim()));
        let direct = group_value(cor32_group(&pair.e, &pair.f, DEFAULT_TOL).unwrap());
        let row = group_value(thm31_group(&pair.e, &pair.f, DEFAULT_TOL).unwrap());
        let p = Matrix::from_blocks(&zero, &one, &one, &-&pair.e).unwrap();
        let p_inv = Matrix::from_blocks(&pair.e, &one, &one, &zero).unwrap();
        worst[2] = worst[2].max(direct.relative_distance(&(&(&p_inv * &row) * &p)));

        let pair = sample(TheoremId::Cor34, seed);
        let direct = group_value(cor34_group(&pair.e, &pair.f, DEFAULT_TOL).unwrap());
        let column = group_value(thm33_group(&pair.e, &pair.f, DEFAULT_TOL).unwrap());
        let (zero, one) = (zeros(pair.dim()), Matrix::identity(pair.dim()));
        let p = Matrix::from_blocks(&pair.e, &one, &one, &zero).unwrap();
        let p_inv = Matrix::from_blocks(&zero, &one, &one, &-&pair.e).unwrap();
        worst[3] = worst[3].max(direct.relative_distance(&(&(&p_inv * &column) * &p)));
    }
    let pass = worst.iter().all(|&w| w <= tol);
    (
        pass,
        format!(
            "{SEEDS} instances each: thm33/thm31 {:.2e}, cor42/thm41 {:.2e}, cor32 {:.2e}, cor34 {:.2e}",
            worst[0], worst[1], worst[2], worst[3]
        ),
    )
}

fn zeros(n: usize) -> Matrix {
    Matrix::zeros(n, n)
}

fn main() {
    let criteria: [(&str, Check); 7] = [
        ("golden fixture", golden_fixture),
        ("intermediate fixture", intermediate_fixture),
        ("oracle sweep", oracle_sweep),
        ("existence equivalence", existence_equivalence),
        ("truncation identity", truncation_identity),
        ("drazin core", drazin_core),
        ("duality and similarity", duality_and_similarity),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let (pass, detail) = check();
        failed += usize::from(!pass);
        println!(
            "criterion {} {name}: {} ({detail})",
            i + 1,
            if pass { "PASS" } else { "FAIL" }
        );
    }
    if failed > 0 {
        eprintln!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
