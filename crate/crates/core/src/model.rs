//! Problem definition, plan representation, metric computation, and plan
//! feasibility checking.
//!
//! A *protection problem* is the triple `(n, k, M)`: `n` nodes initially hold
//! `M` units of data (`M/n` each), nodes fail one at a time and are never
//! replaced, and the data must remain recoverable from any `k` survivors.
//!
//! A [`ProtectionPlan`] answers the problem with two profiles:
//!
//! * `alpha[m]` — per-node storage while `m` nodes remain, `m ∈ [k, n]`;
//! * `beta[s]` — per-node, per-link transmission size in the exchange among
//!   `s` nodes, `s ∈ [k+1, n]`. Stage `s = n` is the preparation exchange
//!   (modeled as a repair with a virtual loss), stages below are repairs.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use num_traits::{One, Signed, Zero};

use crate::cuts;
use crate::ratio::Rat;

/// The triple `(n, k, M)` defining a protection problem.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProblemSpec {
    n: u32,
    k: u32,
    data_size: Rat,
}

/// Rejected problem parameters, one variant per diagnostic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SpecError {
    /// `n < 2`: a one-node network has nothing to protect against.
    NodeCountTooSmall { n: u32 },
    /// `k < 1`: at least one node must survive to hold data.
    SurvivorCountTooSmall { k: u32 },
    /// `k >= n`: there must be at least one loss to plan for.
    SurvivorCountNotBelowNodes { n: u32, k: u32 },
    /// `data_size <= 0`.
    NonPositiveDataSize,
}

impl fmt::Display for SpecError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpecError::NodeCountTooSmall { n } => write!(f, "n must be >= 2 (got {n})"),
            SpecError::SurvivorCountTooSmall { k } => write!(f, "k must be >= 1 (got {k})"),
            SpecError::SurvivorCountNotBelowNodes { n, k } => {
                write!(f, "k must be < n (got k = {k}, n = {n})")
            }
            SpecError::NonPositiveDataSize => write!(f, "data size M must be positive"),
        }
    }
}

impl core::error::Error for SpecError {}

impl ProblemSpec {
    /// Validates raw parameters into a problem instance.
    pub fn new(n: u32, k: u32, data_size: Rat) -> Result<Self, SpecError> {
        if n < 2 {
            return Err(SpecError::NodeCountTooSmall { n });
        }
        if k < 1 {
            return Err(SpecError::SurvivorCountTooSmall { k });
        }
        if k >= n {
            return Err(SpecError::SurvivorCountNotBelowNodes { n, k });
        }
        if !data_size.is_positive() {
            return Err(SpecError::NonPositiveDataSize);
        }
        Ok(ProblemSpec { n, k, data_size })
    }

    /// Instance normalized to `M = 1`, the usual working form.
    pub fn unit(n: u32, k: u32) -> Result<Self, SpecError> {
        Self::new(n, k, Rat::one())
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn data_size(&self) -> &Rat {
        &self.data_size
    }

    /// `M / n`, the storage every node starts with.
    pub fn initial_storage(&self) -> Rat {
        &self.data_size / Rat::from_integer(self.n.into())
    }

    /// Stage indices `m` for which a storage level `alpha[m]` exists: `k..=n`.
    pub fn storage_stages(&self) -> impl DoubleEndedIterator<Item = u32> {
        self.k..=self.n
    }

    /// Stage indices `s` with an exchange `beta[s]`: `k+1..=n`.
    pub fn repair_stages(&self) -> impl DoubleEndedIterator<Item = u32> {
        self.k + 1..=self.n
    }
}

/// Which planner produced a plan.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StrategyTag {
    /// Optimal protection: the solution of the full linear program.
    Op,
    /// Minimum storage baseline: `alpha[m] = M/m` after every stage.
    Ms,
    /// Minimum repair bandwidth baseline: stage-greedy with full retention.
    Mrb,
    Custom,
}

impl fmt::Display for StrategyTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            StrategyTag::Op => "op",
            StrategyTag::Ms => "ms",
            StrategyTag::Mrb => "mrb",
            StrategyTag::Custom => "custom",
        };
        f.write_str(s)
    }
}

impl core::str::FromStr for StrategyTag {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "op" => Ok(StrategyTag::Op),
            "ms" => Ok(StrategyTag::Ms),
            "mrb" => Ok(StrategyTag::Mrb),
            "custom" => Ok(StrategyTag::Custom),
            other => Err(alloc::format!(
                "unknown strategy '{other}' (expected op, ms, mrb or custom)"
            )),
        }
    }
}

/// Storage profile `alpha` and transmission profile `beta` for a problem.
///
/// Construction checks shape only: the index sets must be exactly `[k, n]`
/// and `[k+1, n]` and every value nonnegative. Whether the plan actually
/// protects the data (cut capacities, storage transitions, `beta <= alpha`,
/// the `alpha[n] = M/n` pin) is the business of [`check_feasible`], so that
/// broken plans stay expressible for verification and testing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProtectionPlan {
    spec: ProblemSpec,
    alpha: BTreeMap<u32, Rat>,
    beta: BTreeMap<u32, Rat>,
    strategy: StrategyTag,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PlanError {
    /// `alpha` must be keyed by exactly the stages `k..=n`.
    AlphaStages { expected_lo: u32, expected_hi: u32 },
    /// `beta` must be keyed by exactly the stages `k+1..=n`.
    BetaStages { expected_lo: u32, expected_hi: u32 },
    NegativeAlpha { stage: u32 },
    NegativeBeta { stage: u32 },
}

impl fmt::Display for PlanError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PlanError::AlphaStages {
                expected_lo,
                expected_hi,
            } => write!(
                f,
                "alpha must define exactly the stages {expected_lo}..={expected_hi}"
            ),
            PlanError::BetaStages {
                expected_lo,
                expected_hi,
            } => write!(
                f,
                "beta must define exactly the stages {expected_lo}..={expected_hi}"
            ),
            PlanError::NegativeAlpha { stage } => write!(f, "alpha[{stage}] is negative"),
            PlanError::NegativeBeta { stage } => write!(f, "beta[{stage}] is negative"),
        }
    }
}

impl core::error::Error for PlanError {}

impl ProtectionPlan {
    pub fn new(
        spec: ProblemSpec,
        alpha: BTreeMap<u32, Rat>,
        beta: BTreeMap<u32, Rat>,
        strategy: StrategyTag,
    ) -> Result<Self, PlanError> {
        let (n, k) = (spec.n(), spec.k());
        if alpha.len() as u32 != n - k + 1 || alpha.keys().any(|&m| m < k || m > n) {
            return Err(PlanError::AlphaStages {
                expected_lo: k,
                expected_hi: n,
            });
        }
        if beta.len() as u32 != n - k || beta.keys().any(|&s| s <= k || s > n) {
            return Err(PlanError::BetaStages {
                expected_lo: k + 1,
                expected_hi: n,
            });
        }
        for (&m, a) in &alpha {
            if a.is_negative() {
                return Err(PlanError::NegativeAlpha { stage: m });
            }
        }
        for (&s, b) in &beta {
            if b.is_negative() {
                return Err(PlanError::NegativeBeta { stage: s });
            }
        }
        Ok(ProtectionPlan {
            spec,
            alpha,
            beta,
            strategy,
        })
    }

    pub fn spec(&self) -> &ProblemSpec {
        &self.spec
    }

    pub fn strategy(&self) -> StrategyTag {
        self.strategy
    }

    /// Storage per node while `m` nodes remain. Panics on out-of-range `m`.
    pub fn alpha(&self, m: u32) -> &Rat {
        &self.alpha[&m]
    }

    /// Per-link transmission size of the stage-`s` exchange.
    pub fn beta(&self, s: u32) -> &Rat {
        &self.beta[&s]
    }

    pub fn alpha_profile(&self) -> &BTreeMap<u32, Rat> {
        &self.alpha
    }

    pub fn beta_profile(&self) -> &BTreeMap<u32, Rat> {
        &self.beta
    }

    pub fn metrics(&self) -> PlanMetrics {
        compute_metrics(self)
    }
}

/// Aggregate cost figures of a plan.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlanMetrics {
    /// Protection bandwidth: total traffic over all stages.
    pub delta: Rat,
    /// Storage overhead: `sum over i of i * alpha[i]`.
    pub sigma: Rat,
    /// Per-stage bandwidth `gamma[s] = s (s - 1) beta[s]`.
    pub gamma: BTreeMap<u32, Rat>,
    /// Device storage requirement: the largest `alpha[m]` over the plan's
    /// lifetime. The final-stage storage `alpha[k]` is available from the
    /// plan directly; both get reported by the CLI.
    pub rho: Rat,
}

/// Purely arithmetic, exact; total on shape-valid plans.
pub fn compute_metrics(plan: &ProtectionPlan) -> PlanMetrics {
    let mut gamma = BTreeMap::new();
    let mut delta = Rat::zero();
    for s in plan.spec().repair_stages() {
        let pairs = Rat::from_integer((u64::from(s) * u64::from(s - 1)).into());
        let g = pairs * plan.beta(s);
        delta += &g;
        gamma.insert(s, g);
    }
    let mut sigma = Rat::zero();
    let mut rho = Rat::zero();
    for m in plan.spec().storage_stages() {
        let a = plan.alpha(m);
        sigma += Rat::from_integer(m.into()) * a;
        if *a > rho {
            rho = a.clone();
        }
    }
    PlanMetrics {
        delta,
        sigma,
        gamma,
        rho,
    }
}

/// One constraint of the protection problem, for feasibility reporting.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PlanConstraint {
    /// Cut capacity of the given stage must reach `M`. `j` is the cut's
    /// storage-edge composition, highest stage first.
    Cut { stage: u32, j: Vec<u64> },
    /// `alpha[m+1] + m * beta[m+1] >= alpha[m]`: a node cannot keep more than
    /// it stored plus what the stage delivered.
    StorageTransition { m: u32 },
    /// `beta[s] >= 0`.
    BetaNonNegative { s: u32 },
    /// `beta[s] <= alpha[s]`: a node cannot send more than it stores.
    BetaWithinStorage { s: u32 },
    /// `alpha[n] = M/n`: the initial storage is given, not chosen.
    InitialStoragePin,
}

impl fmt::Display for PlanConstraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PlanConstraint::Cut { stage, j } => {
                write!(f, "stage-{stage} cut j=(")?;
                for (i, jp) in j.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{jp}")?;
                }
                f.write_str(")")
            }
            PlanConstraint::StorageTransition { m } => {
                write!(f, "storage transition alpha[{}]+{m}*beta[{}] >= alpha[{m}]", m + 1, m + 1)
            }
            PlanConstraint::BetaNonNegative { s } => write!(f, "beta[{s}] >= 0"),
            PlanConstraint::BetaWithinStorage { s } => write!(f, "beta[{s}] <= alpha[{s}]"),
            PlanConstraint::InitialStoragePin => f.write_str("alpha[n] = M/n"),
        }
    }
}

/// A constraint the plan fails, with its exact slack (negative means the
/// amount by which it is missed; for the equality pin, any nonzero deviation).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub constraint: PlanConstraint,
    pub slack: Rat,
}

/// Outcome of [`check_feasible`]. The plan is feasible iff no violations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeasibilityReport {
    /// Number of cut constraints evaluated (all stages).
    pub cuts_checked: usize,
    pub violations: Vec<Violation>,
}

impl FeasibilityReport {
    pub fn is_feasible(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Evaluates every enumerated cut constraint and every storage/bound
/// constraint of the protection problem against the plan.
pub fn check_feasible(plan: &ProtectionPlan) -> FeasibilityReport {
    let spec = plan.spec();
    let m_units = spec.data_size();
    let mut violations = Vec::new();

    let pin_slack = plan.alpha(spec.n()) - spec.initial_storage();
    if !pin_slack.is_zero() {
        violations.push(Violation {
            constraint: PlanConstraint::InitialStoragePin,
            slack: pin_slack,
        });
    }

    let all_cuts = cuts::enumerate_all_cuts(spec);
    let cuts_checked = all_cuts.len();
    for cut in &all_cuts {
        let capacity = cuts::cut_capacity(cut, plan)
            .expect("cuts enumerated for the plan's own spec always match");
        let slack = capacity - m_units;
        if slack.is_negative() {
            violations.push(Violation {
                constraint: PlanConstraint::Cut {
                    stage: cut.stage(),
                    j: cut.storage_multiplicities().to_vec(),
                },
                slack,
            });
        }
    }

    for m in spec.k()..spec.n() {
        let slack =
            plan.alpha(m + 1) + Rat::from_integer(m.into()) * plan.beta(m + 1) - plan.alpha(m);
        if slack.is_negative() {
            violations.push(Violation {
                constraint: PlanConstraint::StorageTransition { m },
                slack,
            });
        }
    }

    for s in spec.repair_stages() {
        let beta = plan.beta(s);
        if beta.is_negative() {
            violations.push(Violation {
                constraint: PlanConstraint::BetaNonNegative { s },
                slack: beta.clone(),
            });
        }
        let slack = plan.alpha(s) - beta;
        if slack.is_negative() {
            violations.push(Violation {
                constraint: PlanConstraint::BetaWithinStorage { s },
                slack,
            });
        }
    }

    FeasibilityReport {
        cuts_checked,
        violations,
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::rat;

    fn plan_64(alpha: [(u32, Rat); 3], beta: [(u32, Rat); 2]) -> ProtectionPlan {
        ProtectionPlan::new(
            ProblemSpec::unit(6, 4).unwrap(),
            alpha.into_iter().collect(),
            beta.into_iter().collect(),
            StrategyTag::Custom,
        )
        .unwrap()
    }

    /// The optimal (6,4) plan: storage (1/6, 1/4, 1/4), transmissions
    /// (1/24, 0). Values verified by hand against every stage cut.
    pub(crate) fn op_64() -> ProtectionPlan {
        plan_64(
            [(6, rat(1, 6)), (5, rat(1, 4)), (4, rat(1, 4))],
            [(6, rat(1, 24)), (5, rat(0, 1))],
        )
    }

    pub(crate) fn ms_64() -> ProtectionPlan {
        plan_64(
            [(6, rat(1, 6)), (5, rat(1, 5)), (4, rat(1, 4))],
            [(6, rat(1, 30)), (5, rat(1, 20))],
        )
    }

    #[test]
    fn spec_validation() {
        assert!(ProblemSpec::unit(10, 5).is_ok());
        assert!(ProblemSpec::unit(2, 1).is_ok());
        assert_eq!(
            ProblemSpec::unit(5, 5).unwrap_err(),
            SpecError::SurvivorCountNotBelowNodes { n: 5, k: 5 }
        );
        assert_eq!(
            ProblemSpec::unit(1, 0).unwrap_err(),
            SpecError::NodeCountTooSmall { n: 1 }
        );
        assert_eq!(
            ProblemSpec::unit(3, 0).unwrap_err(),
            SpecError::SurvivorCountTooSmall { k: 0 }
        );
        assert_eq!(
            ProblemSpec::new(3, 2, rat(0, 1)).unwrap_err(),
            SpecError::NonPositiveDataSize
        );
        assert_eq!(ProblemSpec::unit(5, 5).unwrap_err().to_string(), "k must be < n (got k = 5, n = 5)");
    }

    #[test]
    fn metrics_of_the_optimal_six_four_plan() {
        let m = op_64().metrics();
        assert_eq!(m.delta, rat(5, 4));
        assert_eq!(m.sigma, rat(13, 4));
        assert_eq!(m.gamma[&6], rat(5, 4));
        assert_eq!(m.gamma[&5], rat(0, 1));
        assert_eq!(m.rho, rat(1, 4));
    }

    #[test]
    fn metrics_of_the_minimum_storage_six_four_plan() {
        let m = ms_64().metrics();
        assert_eq!(m.delta, rat(2, 1));
        assert_eq!(m.gamma[&6], rat(1, 1));
        assert_eq!(m.gamma[&5], rat(1, 1));
    }

    #[test]
    fn metrics_zero_case() {
        let spec = ProblemSpec::unit(6, 4).unwrap();
        let a = spec.initial_storage();
        let plan = plan_64(
            [(6, a.clone()), (5, a.clone()), (4, a.clone())],
            [(6, rat(0, 1)), (5, rat(0, 1))],
        );
        let m = plan.metrics();
        assert_eq!(m.delta, rat(0, 1));
        assert_eq!(m.rho, rat(1, 6));
    }

    #[test]
    fn metrics_scale_linearly_with_the_plan() {
        let c = rat(7, 3);
        let base = op_64();
        let scaled = ProtectionPlan::new(
            ProblemSpec::new(6, 4, c.clone()).unwrap(),
            base.alpha_profile()
                .iter()
                .map(|(&m, a)| (m, a * &c))
                .collect(),
            base.beta_profile()
                .iter()
                .map(|(&s, b)| (s, b * &c))
                .collect(),
            StrategyTag::Custom,
        )
        .unwrap();
        let m0 = base.metrics();
        let m1 = scaled.metrics();
        assert_eq!(m1.delta, m0.delta * &c);
        assert_eq!(m1.sigma, m0.sigma * &c);
        assert_eq!(m1.rho, m0.rho * &c);
    }

    #[test]
    fn optimal_six_four_plan_is_feasible() {
        let report = check_feasible(&op_64());
        assert_eq!(report.cuts_checked, 21);
        assert!(report.is_feasible(), "{:?}", report.violations);
    }

    #[test]
    fn underprovisioned_six_four_plan_is_caught() {
        let plan = plan_64(
            [(6, rat(1, 6)), (5, rat(1, 4)), (4, rat(1, 4))],
            [(6, rat(1, 30)), (5, rat(0, 1))],
        );
        let report = check_feasible(&plan);
        assert!(!report.is_feasible());
        // j = (4,0,0): 4*(1/6) + 8*(1/30) = 14/15, short of M by 1/15.
        let worst = report
            .violations
            .iter()
            .find(|v| matches!(&v.constraint, PlanConstraint::Cut { stage: 4, j } if j == &[4, 0, 0]))
            .expect("the concentrated stage-4 cut must be reported");
        assert_eq!(worst.slack, rat(-1, 15));
    }

    #[test]
    fn full_replication_is_feasible() {
        // Everybody sends everything in the preparation stage and stores a
        // full copy from then on; no later exchange is needed.
        let spec = ProblemSpec::unit(6, 4).unwrap();
        let plan = plan_64(
            [(6, spec.initial_storage()), (5, rat(1, 1)), (4, rat(1, 1))],
            [(6, spec.initial_storage()), (5, rat(0, 1))],
        );
        assert!(check_feasible(&plan).is_feasible());
    }

    #[test]
    fn plan_shape_is_validated() {
        let spec = ProblemSpec::unit(6, 4).unwrap();
        let err = ProtectionPlan::new(
            spec.clone(),
            [(6, rat(1, 6))].into_iter().collect(),
            [(6, rat(0, 1)), (5, rat(0, 1))].into_iter().collect(),
            StrategyTag::Custom,
        )
        .unwrap_err();
        assert_eq!(
            err,
            PlanError::AlphaStages {
                expected_lo: 4,
                expected_hi: 6
            }
        );
        let err = ProtectionPlan::new(
            spec,
            [(6, rat(1, 6)), (5, rat(1, 4)), (4, rat(-1, 4))]
                .into_iter()
                .collect(),
            [(6, rat(0, 1)), (5, rat(0, 1))].into_iter().collect(),
            StrategyTag::Custom,
        )
        .unwrap_err();
        assert_eq!(err, PlanError::NegativeAlpha { stage: 4 });
    }
}
