//! Exact projective norm for real tensors over sup-norm function algebras.
//!
//! On such a pair the projective norm has a finite dual description: maximize
//! the pairing of a matrix M against the coefficient array, subject to
//! |s' M t| <= 1 for every pair of sign vectors s, t. That is a linear
//! program whose constraint set is exponentially large, so we solve it by
//! cutting planes: start from a small spanning set of sign pairs, solve the
//! relaxation, then search all sign pairs for the most violated constraint
//! and repeat. At termination the relaxation value is feasible for the full
//! program up to the separation tolerance, and since a relaxation can only
//! overshoot, the returned value brackets the true norm within that
//! tolerance.

use crate::algebra::NormKind;
use crate::error::{Error, Result};
use crate::scalar::{Scalar, ScalarField};
use crate::tensor::DecomposedTensor;
use microlp::{ComparisonOp, LinearExpr, OptimizationDirection, Problem};
use std::collections::HashSet;

/// Largest allowed sum of the two factor dimensions.
pub const MAX_TOTAL_DIMENSION: usize = 24;

/// A constraint |s' M t| <= 1 counts as satisfied up to this much slack.
/// The backing solver keeps basic solutions feasible to about 1e-10, so the
/// threshold sits two orders above that. On termination the witness is
/// rescaled by the worst violation, which keeps the reported value from
/// overshooting the true norm.
const SEPARATION_TOL: f64 = 1e-8;

const MAX_CUT_ROUNDS: usize = 10_000;

/// Exact projective norm of a real tensor over sup-norm factor algebras with
/// total dimension at most [`MAX_TOTAL_DIMENSION`].
pub fn norm_exact_lp<S: Scalar>(u: &DecomposedTensor<S>) -> Result<f64> {
    if S::FIELD != ScalarField::Real {
        return Err(Error::Unsupported(
            "the exact dual program is only implemented over the real field".to_string(),
        ));
    }
    let sup_ok = matches!(u.left_algebra().norm_kind(), NormKind::Sup)
        && matches!(u.right_algebra().norm_kind(), NormKind::Sup);
    if !sup_ok {
        return Err(Error::Unsupported(
            "the exact dual program needs sup-norm function algebras on both sides".to_string(),
        ));
    }
    let m = u.left_algebra().dim();
    let n = u.right_algebra().dim();
    let coeffs = u.coefficient_matrix();
    if coeffs.iter().all(|x| x.is_zero_exact()) {
        return Ok(0.0);
    }
    if m + n > MAX_TOTAL_DIMENSION {
        return Err(Error::Unsupported(format!(
            "factor dimensions {m} + {n} exceed the supported total {MAX_TOTAL_DIMENSION}"
        )));
    }
    // orient so that the row count is the smaller side; the value is
    // invariant under transposition
    let (rows, cols, obj) = if m <= n {
        let v: Vec<f64> = coeffs.iter().map(|x| x.re_part()).collect();
        (m, n, v)
    } else {
        let mut v = vec![0.0f64; m * n];
        for i in 0..m {
            for j in 0..n {
                v[j * m + i] = coeffs[i * n + j].re_part();
            }
        }
        (n, m, v)
    };
    solve_dual(rows, cols, &obj)
}

fn mask(bits: usize) -> u32 {
    if bits >= 32 {
        u32::MAX
    } else {
        (1u32 << bits) - 1
    }
}

/// Canonical form of a sign pair: flip both so the first entry of s is +1.
fn canon(s: u32, t: u32, m: usize, n: usize) -> (u32, u32) {
    if s & 1 == 1 {
        ((!s) & mask(m), (!t) & mask(n))
    } else {
        (s, t)
    }
}

fn sign(maskbits: u32, i: usize) -> f64 {
    if maskbits >> i & 1 == 1 {
        -1.0
    } else {
        1.0
    }
}

fn solve_dual(m: usize, n: usize, obj: &[f64]) -> Result<f64> {
    let mn = m * n;
    let mut pairs: Vec<(u32, u32)> = Vec::new();
    let mut seen: HashSet<(u32, u32)> = HashSet::new();
    let s_seeds: Vec<u32> = std::iter::once(0u32).chain((0..m).map(|i| 1u32 << i)).collect();
    let t_seeds: Vec<u32> = std::iter::once(0u32).chain((0..n).map(|j| 1u32 << j)).collect();
    for &s in &s_seeds {
        for &t in &t_seeds {
            let p = canon(s, t, m, n);
            if seen.insert(p) {
                pairs.push(p);
            }
        }
    }

    let mut problem = Problem::new(OptimizationDirection::Maximize);
    let vars: Vec<_> = obj
        .iter()
        .map(|&c| problem.add_var(c, (f64::NEG_INFINITY, f64::INFINITY)))
        .collect();
    let pair_expr = |s: u32, t: u32| -> LinearExpr {
        (0..mn)
            .map(|k| (vars[k], sign(s, k / n) * sign(t, k % n)))
            .collect()
    };
    for &(s, t) in &pairs {
        let expr = pair_expr(s, t);
        problem.add_constraint(expr.clone(), ComparisonOp::Le, 1.0);
        problem.add_constraint(expr, ComparisonOp::Ge, -1.0);
    }
    let fail = |e: microlp::Error| Error::LpFailure(format!("master program failed: {e:?}"));
    let interrupted =
        |_| Error::LpFailure("master program was interrupted before optimality".to_string());
    let mut sol = problem
        .solve()
        .map_err(fail)?
        .into_solution()
        .map_err(interrupted)?;

    for _ in 0..MAX_CUT_ROUNDS {
        let value = sol.objective();
        let mat: Vec<f64> = vars.iter().map(|&v| sol[v]).collect();

        // separation: max over sign vectors s of the l1 norm of M' s,
        // enumerating s with first entry +1
        let mut best = 0.0f64;
        let mut best_s = 0u32;
        for sbits in 0..(1u32 << (m - 1)) {
            let s = sbits << 1;
            let mut total = 0.0f64;
            for j in 0..n {
                let mut col = 0.0f64;
                for i in 0..m {
                    col += sign(s, i) * mat[i * n + j];
                }
                total += col.abs();
            }
            if total > best {
                best = total;
                best_s = s;
            }
        }
        if best <= 1.0 + SEPARATION_TOL {
            // dividing by the worst violation turns M into an exactly
            // feasible witness, so the value cannot exceed the true norm
            return Ok((value / best.max(1.0)).max(0.0));
        }
        let mut tbits = 0u32;
        for j in 0..n {
            let mut col = 0.0f64;
            for i in 0..m {
                col += sign(best_s, i) * mat[i * n + j];
            }
            if col < 0.0 {
                tbits |= 1 << j;
            }
        }
        let p = canon(best_s, tbits, m, n);
        if !seen.insert(p) {
            return Err(Error::LpFailure(format!(
                "separation produced an already active sign pair at violation {best:.3e}"
            )));
        }
        let expr = pair_expr(p.0, p.1);
        sol = sol
            .add_constraint(expr.clone(), ComparisonOp::Le, 1.0)
            .map_err(fail)?
            .into_solution()
            .map_err(interrupted)?;
        sol = sol
            .add_constraint(expr, ComparisonOp::Ge, -1.0)
            .map_err(fail)?
            .into_solution()
            .map_err(interrupted)?;
    }
    Err(Error::LpFailure(format!(
        "no convergence within {MAX_CUT_ROUNDS} cutting rounds"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{AlgebraElement, AlgebraHandle, FiniteBanachAlgebra};
    use crate::tensor::GrothendieckConstant;
    use approx::assert_relative_eq;
    use nalgebra::{Matrix4, Vector4};
    use num_complex::Complex64;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn supn(n: usize) -> AlgebraHandle<f64> {
        FiniteBanachAlgebra::sup(n).unwrap()
    }

    fn rand_elem(alg: &AlgebraHandle<f64>, rng: &mut ChaCha8Rng) -> AlgebraElement<f64> {
        AlgebraElement::new(
            alg,
            (0..alg.dim()).map(|_| rng.random_range(-1.0..1.0)).collect(),
        )
        .unwrap()
    }

    /// Independent check for 2 x 2 coefficient arrays: enumerate every vertex
    /// of the full dual polytope (all 8 distinct one-sided sign rows, both
    /// orientations, 4 at a time) and take the best feasible objective.
    fn brute_force_2x2(u: [[f64; 2]; 2]) -> f64 {
        let mut rows: Vec<[f64; 4]> = Vec::new();
        for smask in [0u32, 2] {
            for tmask in 0..4u32 {
                let s = [sign(smask, 0), sign(smask, 1)];
                let t = [sign(tmask, 0), sign(tmask, 1)];
                rows.push([s[0] * t[0], s[0] * t[1], s[1] * t[0], s[1] * t[1]]);
            }
        }
        let mut all: Vec<[f64; 4]> = Vec::new();
        for r in &rows {
            all.push(*r);
            all.push([-r[0], -r[1], -r[2], -r[3]]);
        }
        let obj = [u[0][0], u[0][1], u[1][0], u[1][1]];
        let mut best = 0.0f64;
        let k = all.len();
        for a in 0..k {
            for b in (a + 1)..k {
                for c in (b + 1)..k {
                    for d in (c + 1)..k {
                        let mat = Matrix4::from_rows(&[
                            nalgebra::RowVector4::from_row_slice(&all[a]),
                            nalgebra::RowVector4::from_row_slice(&all[b]),
                            nalgebra::RowVector4::from_row_slice(&all[c]),
                            nalgebra::RowVector4::from_row_slice(&all[d]),
                        ]);
                        let rhs = Vector4::from_element(1.0);
                        let Some(sol) = mat.lu().solve(&rhs) else {
                            continue;
                        };
                        let feasible = all.iter().all(|r| {
                            r[0] * sol[0] + r[1] * sol[1] + r[2] * sol[2] + r[3] * sol[3]
                                <= 1.0 + 1e-9
                        });
                        if feasible {
                            let v = obj[0] * sol[0]
                                + obj[1] * sol[1]
                                + obj[2] * sol[2]
                                + obj[3] * sol[3];
                            best = best.max(v);
                        }
                    }
                }
            }
        }
        best
    }

    #[test]
    fn matches_full_vertex_enumeration_on_2x2() {
        let a = supn(2);
        let mut rng = ChaCha8Rng::seed_from_u64(71);
        for _ in 0..20 {
            let x = rand_elem(&a, &mut rng);
            let y = rand_elem(&a, &mut rng);
            let z = rand_elem(&a, &mut rng);
            let w = rand_elem(&a, &mut rng);
            let u = DecomposedTensor::from_pairs(&a, &a, &[(x, y), (z, w)]).unwrap();
            let coeffs = u.coefficient_matrix();
            let grid = [
                [coeffs[0], coeffs[1]],
                [coeffs[2], coeffs[3]],
            ];
            let lp = norm_exact_lp(&u).unwrap();
            let brute = brute_force_2x2(grid);
            assert_relative_eq!(lp, brute, max_relative = 1e-8, epsilon = 1e-10);
        }
    }

    #[test]
    fn rank_one_tensors_have_product_norms() {
        let mut rng = ChaCha8Rng::seed_from_u64(73);
        for (m, n) in [(2, 2), (2, 5), (4, 3), (5, 5)] {
            let am = supn(m);
            let an = supn(n);
            for _ in 0..10 {
                let x = rand_elem(&am, &mut rng);
                let y = rand_elem(&an, &mut rng);
                let u = DecomposedTensor::from_pairs(&am, &an, &[(x.clone(), y.clone())]).unwrap();
                let lp = norm_exact_lp(&u).unwrap();
                let expect = x.norm().unwrap() * y.norm().unwrap();
                assert_relative_eq!(lp, expect, max_relative = 1e-9, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn scalar_factor_reduces_to_sup_norm() {
        // with a one-point left factor the tensor is just a vector and the
        // projective norm is its sup norm
        let a1 = supn(1);
        let an = supn(6);
        let mut rng = ChaCha8Rng::seed_from_u64(79);
        for _ in 0..10 {
            let pairs: Vec<_> = (0..3)
                .map(|_| (rand_elem(&a1, &mut rng), rand_elem(&an, &mut rng)))
                .collect();
            let u = DecomposedTensor::from_pairs(&a1, &an, &pairs).unwrap();
            let coeffs = u.coefficient_matrix();
            let expect = coeffs.iter().fold(0.0f64, |m, x| m.max(x.abs()));
            let lp = norm_exact_lp(&u).unwrap();
            assert_relative_eq!(lp, expect, max_relative = 1e-9, epsilon = 1e-12);
        }
    }

    #[test]
    fn diagonal_difference_has_norm_one() {
        let a = supn(2);
        let e1 = AlgebraElement::basis(&a, 0).unwrap();
        let e2 = AlgebraElement::basis(&a, 1).unwrap();
        let u = DecomposedTensor::simple(&e1, &e1)
            .add(&DecomposedTensor::simple(&e2, &e2).scale_re(-1.0))
            .unwrap();
        let lp = norm_exact_lp(&u).unwrap();
        assert_relative_eq!(lp, 1.0, max_relative = 1e-9);
    }

    #[test]
    fn homogeneous_under_scaling() {
        let a = supn(3);
        let mut rng = ChaCha8Rng::seed_from_u64(83);
        let pairs: Vec<_> = (0..3)
            .map(|_| (rand_elem(&a, &mut rng), rand_elem(&a, &mut rng)))
            .collect();
        let u = DecomposedTensor::from_pairs(&a, &a, &pairs).unwrap();
        let base = norm_exact_lp(&u).unwrap();
        for c in [2.0, 0.25, -3.0] {
            let scaled = norm_exact_lp(&u.scale_re(c)).unwrap();
            assert_relative_eq!(scaled, c.abs() * base, max_relative = 1e-9, epsilon = 1e-12);
        }
    }

    #[test]
    fn bracketed_by_certified_bounds() {
        let a = supn(3);
        let k = GrothendieckConstant::real_default();
        let mut rng = ChaCha8Rng::seed_from_u64(89);
        for _ in 0..50 {
            let pairs: Vec<_> = (0..3)
                .map(|_| (rand_elem(&a, &mut rng), rand_elem(&a, &mut rng)))
                .collect();
            let u = DecomposedTensor::from_pairs(&a, &a, &pairs).unwrap();
            let lp = norm_exact_lp(&u).unwrap();
            assert!(lp <= u.norm_upper().unwrap() + 1e-9);
            assert!(lp <= u.grothendieck_bound(&k).unwrap() + 1e-9);
            assert!(lp >= 0.0);
        }
    }

    #[test]
    fn asymmetric_shapes_agree_with_transposes() {
        let am = supn(2);
        let an = supn(7);
        let mut rng = ChaCha8Rng::seed_from_u64(97);
        let pairs: Vec<_> = (0..3)
            .map(|_| (rand_elem(&am, &mut rng), rand_elem(&an, &mut rng)))
            .collect();
        let u = DecomposedTensor::from_pairs(&am, &an, &pairs).unwrap();
        let flipped: Vec<_> = pairs.iter().map(|(x, y)| (y.clone(), x.clone())).collect();
        let ut = DecomposedTensor::from_pairs(&an, &am, &flipped).unwrap();
        assert_relative_eq!(
            norm_exact_lp(&u).unwrap(),
            norm_exact_lp(&ut).unwrap(),
            max_relative = 1e-9
        );
    }

    #[test]
    fn rejects_out_of_scope_inputs() {
        let big = supn(13);
        let mut rng = ChaCha8Rng::seed_from_u64(101);
        let u = DecomposedTensor::from_pairs(
            &big,
            &big,
            &[(rand_elem(&big, &mut rng), rand_elem(&big, &mut rng))],
        )
        .unwrap();
        assert!(matches!(norm_exact_lp(&u), Err(Error::Unsupported(_))));

        let zero_big = DecomposedTensor::zero(&big, &big);
        assert_eq!(norm_exact_lp(&zero_big).unwrap(), 0.0);

        let matrix = FiniteBanachAlgebra::<f64>::matrix(2).unwrap();
        let em = AlgebraElement::basis(&matrix, 0).unwrap();
        let v = DecomposedTensor::simple(&em, &em);
        assert!(matches!(norm_exact_lp(&v), Err(Error::Unsupported(_))));

        let ca = FiniteBanachAlgebra::<Complex64>::sup(2).unwrap();
        let ce = AlgebraElement::basis(&ca, 0).unwrap();
        let cu = DecomposedTensor::simple(&ce, &ce);
        assert!(matches!(norm_exact_lp(&cu), Err(Error::Unsupported(_))));
    }

    #[test]
    fn boundary_size_instance_runs() {
        // 12 + 12 sits right at the supported limit
        let a = supn(12);
        let mut rng = ChaCha8Rng::seed_from_u64(103);
        let pairs: Vec<_> = (0..2)
            .map(|_| (rand_elem(&a, &mut rng), rand_elem(&a, &mut rng)))
            .collect();
        let u = DecomposedTensor::from_pairs(&a, &a, &pairs).unwrap();
        let lp = norm_exact_lp(&u).unwrap();
        assert!(lp > 0.0);
        assert!(lp <= u.norm_upper().unwrap() + 1e-9);
    }
}
