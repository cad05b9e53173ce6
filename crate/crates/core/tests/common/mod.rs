//! Random matrices shared by the integration tests.
#![allow(dead_code)]

use gdrazin::matrix::{c, invert, Matrix, C64};
use rand::Rng;

/// Families of square test matrices.
#[derive(Clone, Copy, Debug)]
pub enum Family {
    Invertible,
    Nilpotent,
    Idempotent,
    SimilarityBuilt,
}

pub const FAMILIES: [Family; 4] = [
    Family::Invertible,
    Family::Nilpotent,
    Family::Idempotent,
    Family::SimilarityBuilt,
];

fn small(rng: &mut impl Rng) -> C64 {
    let im = if rng.gen_bool(0.3) {
        rng.gen_range(-2..=2) as f64
    } else {
        0.0
    };
    c(rng.gen_range(-2..=2) as f64, im)
}

/// Unit-triangular integer factors keep `S` and `S⁻¹` small.
pub fn similarity(rng: &mut impl Rng, n: usize) -> (Matrix, Matrix) {
    let mut lower = Matrix::identity(n);
    let mut upper = Matrix::identity(n);
    for i in 0..n {
        for j in 0..i {
            lower.set(i, j, c(rng.gen_range(-1..=1) as f64, 0.0));
            upper.set(j, i, c(rng.gen_range(-1..=1) as f64, 0.0));
        }
    }
    let s = &lower * &upper;
    let s_inv = invert(&s).expect("unit triangular product");
    (s, s_inv)
}

fn conjugate(rng: &mut impl Rng, core: &Matrix) -> Matrix {
    let (s, s_inv) = similarity(rng, core.rows());
    &(&s * core) * &s_inv
}

pub fn random_matrix(rng: &mut impl Rng, family: Family, n: usize) -> Matrix {
    let mut core = Matrix::zeros(n, n);
    match family {
        Family::Invertible => {
            for i in 0..n {
                for j in 0..n {
                    core.set(i, j, small(rng));
                }
                core.set(i, i, core.get(i, i) + c(2.0 * n as f64 + 1.0, 0.0));
            }
            return core;
        }
        Family::Nilpotent => {
            for i in 0..n {
                for j in i + 1..n {
                    core.set(i, j, small(rng));
                }
            }
        }
        Family::Idempotent => {
            for i in 0..rng.gen_range(0..=n) {
                core.set(i, i, c(1.0, 0.0));
            }
        }
        Family::SimilarityBuilt => {
            let r = rng.gen_range(0..=n);
            for i in 0..r {
                let v = if rng.gen_bool(0.5) { c(1.0, 0.0) } else { c(-0.5, 1.0) };
                core.set(i, i, v * rng.gen_range(1..=2) as f64);
            }
            // nilpotent part as Jordan chains of length up to 3
            let mut i = r;
            while i < n {
                let len = rng.gen_range(1..=3).min(n - i);
                for k in i..i + len - 1 {
                    core.set(k, k + 1, c(1.0, 0.0));
                }
                i += len;
            }
        }
    }
    conjugate(rng, &core)
}
