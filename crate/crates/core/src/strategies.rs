//! The three protection strategies and their comparison.
//!
//! * OP solves the full LP lexicographically: least bandwidth, then least
//!   storage overhead among the bandwidth-optimal plans.
//! * MS pins storage to the least any stage can get away with
//!   (`alpha[m] = M/m`) and lets a restricted LP choose the transmissions;
//!   the optimum provably lands on `beta[s] = M / (s (s - 1))`, which is
//!   asserted after every solve.
//! * MRB is the stage-greedy baseline: walk stages from the preparation
//!   exchange down, keep everything received (full retention), and at each
//!   stage send the least that keeps every upcoming cut satisfied. Each
//!   stage's minimum is a one-variable bound maximized over that stage's cut
//!   rows. Myopic by design; it never looks past the next stage.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use num_traits::Zero;

use crate::cuts::enumerate_stage_cuts;
use crate::lp::{
    alpha_index, beta_index, build_beta_lp, build_protection_lp, solve, solve_lexicographic,
    Arithmetic, LpError, LpSolution, LpStatus, ObjectiveMode,
};
use crate::model::{compute_metrics, ProblemSpec, ProtectionPlan, StrategyTag};
use crate::ratio::Rat;

fn plan_from_assignment(
    spec: &ProblemSpec,
    sol: &LpSolution,
    tag: StrategyTag,
) -> ProtectionPlan {
    let x = sol.assignment();
    let mut alpha: BTreeMap<u32, Rat> = BTreeMap::new();
    for m in spec.k()..spec.n() {
        alpha.insert(m, x[alpha_index(spec, m)].clone());
    }
    alpha.insert(spec.n(), spec.initial_storage());
    let mut beta: BTreeMap<u32, Rat> = BTreeMap::new();
    for s in spec.repair_stages() {
        beta.insert(s, x[beta_index(spec, s)].clone());
    }
    ProtectionPlan::new(spec.clone(), alpha, beta, tag)
        .expect("LP solutions are nonnegative and fully indexed")
}

/// Optimal protection: globally minimal bandwidth, least storage overhead
/// among the optima. The LP is always feasible (full replication is a
/// feasible point), so errors only signal solver trouble.
pub fn plan_op(spec: &ProblemSpec) -> Result<ProtectionPlan, LpError> {
    let sol = solve_lexicographic(spec)?;
    Ok(plan_from_assignment(spec, &sol, StrategyTag::Op))
}

/// Optimal protection solved in one pass with the epsilon objective instead
/// of the two-phase lexicographic scheme. Exposed for cross-checks and for
/// the CLI's epsilon override.
pub fn plan_op_epsilon(spec: &ProblemSpec, epsilon: &Rat) -> Result<ProtectionPlan, LpError> {
    let lp = build_protection_lp(spec, &ObjectiveMode::Epsilon(epsilon.clone()));
    let sol = solve(&lp, Arithmetic::Exact)?;
    if sol.status != LpStatus::Optimal {
        return Err(LpError::UnexpectedStatus(sol.status));
    }
    Ok(plan_from_assignment(spec, &sol, StrategyTag::Op))
}

/// Minimum-storage baseline: `alpha[m] = M/m` after every stage, with the
/// transmissions chosen by the restricted LP.
pub fn plan_ms(spec: &ProblemSpec) -> Result<ProtectionPlan, LpError> {
    let m_units = spec.data_size();
    let mut alpha: BTreeMap<u32, Rat> = BTreeMap::new();
    for m in spec.storage_stages() {
        alpha.insert(m, m_units / Rat::from_integer(m.into()));
    }
    let lp = build_beta_lp(spec, &alpha);
    let sol = solve(&lp, Arithmetic::Exact)?;
    if sol.status != LpStatus::Optimal {
        return Err(LpError::UnexpectedStatus(sol.status));
    }
    let mut beta: BTreeMap<u32, Rat> = BTreeMap::new();
    for s in spec.repair_stages() {
        let idx = lp
            .variable_index(&alloc::format!("beta_{s}"))
            .expect("restricted LP names beta variables");
        let value = sol.assignment()[idx].clone();
        // The restricted optimum has a closed form; solving is the
        // definition, the formula is the theorem, and they must agree.
        let expected = m_units / Rat::from_integer((u64::from(s) * u64::from(s - 1)).into());
        if value != expected {
            return Err(LpError::Internal(
                "minimum-storage transmissions deviate from M / (s (s - 1))",
            ));
        }
        beta.insert(s, value);
    }
    Ok(ProtectionPlan::new(spec.clone(), alpha, beta, StrategyTag::Ms)
        .expect("profile is nonnegative and fully indexed"))
}

/// Stage-greedy baseline with full retention. Walks `s = n` down to `k+1`;
/// at each stage picks the smallest `beta[s]` for which every cut of the
/// next stage holds (given all earlier choices), then stores everything:
/// `alpha[s-1] = alpha[s] + (s-1) beta[s]`.
pub fn plan_mrb(spec: &ProblemSpec) -> ProtectionPlan {
    let m_units = spec.data_size();
    let mut alpha: BTreeMap<u32, Rat> = BTreeMap::new();
    let mut beta: BTreeMap<u32, Rat> = BTreeMap::new();
    alpha.insert(spec.n(), spec.initial_storage());

    for s in spec.repair_stages().rev() {
        let m = s - 1;
        let mut needed = Rat::zero();
        for cut in enumerate_stage_cuts(spec, m).expect("stage in range") {
            // Capacity is affine in beta[s]: the stage-m alpha edge carries
            // alpha[s] + m*beta[s] under full retention, every other alpha
            // and beta is already fixed.
            let mut base = Rat::zero();
            let mut coef: u64 = 0;
            for p in m..=spec.n() {
                let jp = cut.j_at(p);
                if jp == 0 {
                    continue;
                }
                if p == m {
                    base += Rat::from_integer(jp.into()) * &alpha[&s];
                    coef += jp * u64::from(m);
                } else {
                    base += Rat::from_integer(jp.into()) * &alpha[&p];
                }
            }
            for q in m + 1..=spec.n() {
                let lq = cut.l_at(q);
                if lq == 0 {
                    continue;
                }
                if q == s {
                    coef += lq;
                } else {
                    base += Rat::from_integer(lq.into()) * &beta[&q];
                }
            }
            if base < *m_units {
                let bound = (m_units - base) / Rat::from_integer(coef.into());
                if bound > needed {
                    needed = bound;
                }
            }
        }
        let stored = &alpha[&s] + Rat::from_integer(m.into()) * &needed;
        alpha.insert(m, stored);
        beta.insert(s, needed);
    }

    ProtectionPlan::new(spec.clone(), alpha, beta, StrategyTag::Mrb)
        .expect("greedy profile is nonnegative and fully indexed")
}

/// One comparison line: a strategy's full metric set on a problem.
#[derive(Debug, Clone)]
pub struct ComparisonRow {
    pub spec: ProblemSpec,
    pub strategy: StrategyTag,
    pub delta: Rat,
    pub sigma: Rat,
    pub rho: Rat,
    /// Final-stage per-node storage, reported alongside the lifetime
    /// maximum `rho` since figures of merit differ on which one they mean.
    pub final_alpha: Rat,
    pub gamma: BTreeMap<u32, Rat>,
}

impl ComparisonRow {
    pub fn from_plan(plan: &ProtectionPlan) -> Self {
        let metrics = compute_metrics(plan);
        ComparisonRow {
            spec: plan.spec().clone(),
            strategy: plan.strategy(),
            delta: metrics.delta,
            sigma: metrics.sigma,
            rho: metrics.rho,
            final_alpha: plan.alpha(plan.spec().k()).clone(),
            gamma: metrics.gamma,
        }
    }
}

/// Plans all three strategies and summarizes them, OP, MS, MRB order.
pub fn compare(spec: &ProblemSpec) -> Result<Vec<ComparisonRow>, LpError> {
    let op = plan_op(spec)?;
    let ms = plan_ms(spec)?;
    let mrb = plan_mrb(spec);
    Ok(alloc::vec![
        ComparisonRow::from_plan(&op),
        ComparisonRow::from_plan(&ms),
        ComparisonRow::from_plan(&mrb),
    ])
}

/// Builds a plan for the named strategy; the epsilon override only affects
/// OP (the other two have no tie to break).
pub fn plan_for(
    spec: &ProblemSpec,
    strategy: StrategyTag,
    epsilon: Option<&Rat>,
) -> Result<ProtectionPlan, LpError> {
    match strategy {
        StrategyTag::Op => match epsilon {
            None => plan_op(spec),
            Some(eps) => plan_op_epsilon(spec, eps),
        },
        StrategyTag::Ms => plan_ms(spec),
        StrategyTag::Mrb => Ok(plan_mrb(spec)),
        StrategyTag::Custom => Err(LpError::Internal(
            "custom is a label for externally supplied plans, not a planner",
        )),
    }
}
