//! Randomized cross-check of the exact solver against a brute-force vertex
//! enumerator. Every optimum of a bounded LP sits on a vertex where
//! `nvars` independent constraints (rows or nonnegativity planes) are
//! tight, so enumerating all such intersections and filtering by
//! feasibility gives an independent optimal value to compare against.

use dwindle_core::lp::{solve, Arithmetic, LinearProgram, LpStatus, Relation};
use dwindle_core::{rat, Rat};
use num_traits::{Signed, Zero};
use rand_core::{RngCore, SeedableRng};

/// Solves `mat x = rhs` (square, exact); `None` when singular.
fn solve_square(mut mat: Vec<Vec<Rat>>, mut rhs: Vec<Rat>) -> Option<Vec<Rat>> {
    let n = rhs.len();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !mat[r][col].is_zero())?;
        mat.swap(col, pivot);
        rhs.swap(col, pivot);
        let p = mat[col][col].clone();
        for v in mat[col].iter_mut() {
            *v /= &p;
        }
        rhs[col] /= &p;
        for r in 0..n {
            if r != col && !mat[r][col].is_zero() {
                let f = mat[r][col].clone();
                for c in 0..n {
                    let t = &mat[col][c] * &f;
                    mat[r][c] -= t;
                }
                let t = &rhs[col] * &f;
                rhs[r] -= t;
            }
        }
    }
    Some(rhs)
}

/// Each constraint as a tight hyperplane `a . x = b`; nonnegativity planes
/// are appended after the rows.
fn planes(lp: &LinearProgram) -> Vec<(Vec<Rat>, Rat)> {
    let nvars = lp.num_variables();
    let mut out: Vec<(Vec<Rat>, Rat)> = lp
        .constraints()
        .iter()
        .map(|c| (c.coefficients.clone(), c.rhs.clone()))
        .collect();
    for i in 0..nvars {
        let mut axis = vec![Rat::zero(); nvars];
        axis[i] = rat(1, 1);
        out.push((axis, Rat::zero()));
    }
    out
}

fn is_feasible(lp: &LinearProgram, x: &[Rat]) -> bool {
    if x.iter().any(|v| v.is_negative()) {
        return false;
    }
    lp.constraints().iter().all(|c| {
        let lhs: Rat = c
            .coefficients
            .iter()
            .zip(x)
            .map(|(a, v)| a * v)
            .sum();
        match c.relation {
            Relation::Ge => lhs >= c.rhs,
            Relation::Le => lhs <= c.rhs,
            Relation::Eq => lhs == c.rhs,
        }
    })
}

/// Minimum objective over all feasible vertices, or `None` if no subset of
/// tight planes yields a feasible point (infeasible for bounded regions).
fn brute_force_min(lp: &LinearProgram) -> Option<Rat> {
    let nvars = lp.num_variables();
    let planes = planes(lp);
    let mut best: Option<Rat> = None;
    let total = planes.len();
    let mut choose = vec![0usize; nvars];

    fn visit(
        planes: &[(Vec<Rat>, Rat)],
        lp: &LinearProgram,
        choose: &mut Vec<usize>,
        depth: usize,
        start: usize,
        total: usize,
        best: &mut Option<Rat>,
    ) {
        let nvars = lp.num_variables();
        if depth == nvars {
            let mat: Vec<Vec<Rat>> = choose.iter().map(|&i| planes[i].0.clone()).collect();
            let rhs: Vec<Rat> = choose.iter().map(|&i| planes[i].1.clone()).collect();
            if let Some(x) = solve_square(mat, rhs) {
                if is_feasible(lp, &x) {
                    let mut obj = lp.objective_constant().clone();
                    for (c, v) in lp.objective().iter().zip(&x) {
                        obj += c * v;
                    }
                    if best.as_ref().is_none_or(|b| obj < *b) {
                        *best = Some(obj);
                    }
                }
            }
            return;
        }
        for i in start..total {
            choose[depth] = i;
            visit(planes, lp, choose, depth + 1, i + 1, total, best);
        }
    }

    visit(&planes, lp, &mut choose, 0, 0, total, &mut best);
    best
}

#[test]
fn exact_solver_matches_vertex_enumeration_on_random_lps() {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x51931EF);
    let mut draw = |lo: i64, hi: i64| -> i64 {
        lo + i64::from(rng.next_u32() % (hi - lo + 1) as u32)
    };
    let mut optimal = 0;
    let mut infeasible = 0;
    for case in 0..150 {
        let nvars = draw(2, 3) as usize;
        let nrows = draw(2, 5) as usize;
        let mut lp =
            LinearProgram::new((0..nvars).map(|i| format!("x{i}")).collect());
        let objective: Vec<Rat> = (0..nvars).map(|_| rat(draw(0, 4), 1)).collect();
        lp.set_objective(objective, rat(draw(-2, 2), 1)).unwrap();
        for _ in 0..nrows {
            let coeffs: Vec<Rat> = (0..nvars).map(|_| rat(draw(-3, 3), 2)).collect();
            let relation = match draw(0, 2) {
                0 => Relation::Ge,
                1 => Relation::Le,
                _ => Relation::Eq,
            };
            lp.add_constraint(coeffs, relation, rat(draw(-4, 6), 2)).unwrap();
        }
        // Bounding box so the region is bounded and the vertex enumeration
        // is complete; also keeps every instance away from unboundedness.
        for i in 0..nvars {
            let mut axis = vec![Rat::zero(); nvars];
            axis[i] = rat(1, 1);
            lp.add_constraint(axis, Relation::Le, rat(5, 1)).unwrap();
        }

        let expected = brute_force_min(&lp);
        let got = solve(&lp, Arithmetic::Exact).unwrap();
        match expected {
            Some(best) => {
                assert_eq!(got.status, LpStatus::Optimal, "case {case}: {lp:?}");
                assert_eq!(
                    got.objective_value.as_ref(),
                    Some(&best),
                    "case {case}: {lp:?}"
                );
                optimal += 1;
            }
            None => {
                assert_eq!(got.status, LpStatus::Infeasible, "case {case}: {lp:?}");
                infeasible += 1;
            }
        }
    }
    // The generator must exercise both verdicts meaningfully.
    assert!(optimal >= 30, "only {optimal} optimal cases");
    assert!(infeasible >= 10, "only {infeasible} infeasible cases");
}
