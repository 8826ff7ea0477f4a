//! Exact-coefficient linear programs and the protection LP.
//!
//! The protection problem for `(n, k, M)` minimizes the total traffic
//! `sum of s (s - 1) beta[s]` subject to every stage cut reaching `M`, the
//! storage transitions, and the transmission bounds, with `alpha[n] = M/n`
//! substituted as a constant. Storage variables carry a tiny weight
//! `epsilon` in the default objective so that, among the bandwidth-optimal
//! solutions, the one with the least storage overhead is selected; the
//! two-phase lexicographic solve does the same thing without the weight and
//! must agree on the bandwidth exactly.
//!
//! The solver is self-contained (see `simplex`): instances stay small enough
//! that exact rational pivoting is entirely practical, and exact fixtures
//! demand bit-exact reproducibility no external solver guarantees.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use num_traits::{One, Signed, Zero};

use crate::cuts::enumerate_all_cuts;
use crate::model::ProblemSpec;
use crate::ratio::{rat, Rat};
use crate::simplex::{self, Pricing, Program, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Ge,
    Le,
    Eq,
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Relation::Ge => ">=",
            Relation::Le => "<=",
            Relation::Eq => "=",
        })
    }
}

/// One row: `coefficients . x  <relation>  rhs`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LpConstraint {
    pub coefficients: Vec<Rat>,
    pub relation: Relation,
    pub rhs: Rat,
}

/// A minimization LP over named nonnegative variables, all data exact.
///
/// Variables are implicitly `>= 0` (standard form); every other bound is an
/// explicit row. `objective_constant` carries terms that were substituted
/// out (such as the pinned `alpha[n]` contribution) so reported objective
/// values match the problem as stated.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearProgram {
    variables: Vec<String>,
    objective: Vec<Rat>,
    objective_constant: Rat,
    constraints: Vec<LpConstraint>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LpError {
    /// A coefficient vector's length does not match the variable count.
    DimensionMismatch { expected: usize, got: usize },
    /// The pivot budget ran out; the instance is far beyond intended sizes.
    IterationLimit,
    /// Basis inversion failed: solver bug (exact) or breakdown (float).
    SingularBasis,
    /// An optimal assignment failed re-substitution into the constraints.
    VerificationFailed { row: usize },
    /// A status that cannot occur for the LP family at hand occurred.
    UnexpectedStatus(LpStatus),
    Internal(&'static str),
}

impl fmt::Display for LpError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LpError::DimensionMismatch { expected, got } => {
                write!(f, "coefficient vector has {got} entries, expected {expected}")
            }
            LpError::IterationLimit => f.write_str("simplex iteration limit exceeded"),
            LpError::SingularBasis => f.write_str("basis became singular"),
            LpError::VerificationFailed { row } => {
                write!(f, "optimal solution violates constraint row {row}")
            }
            LpError::UnexpectedStatus(s) => write!(f, "unexpected solver status {s:?}"),
            LpError::Internal(msg) => f.write_str(msg),
        }
    }
}

impl core::error::Error for LpError {}

impl LinearProgram {
    /// Empty program over the given variables, zero objective.
    pub fn new(variables: Vec<String>) -> Self {
        let n = variables.len();
        LinearProgram {
            variables,
            objective: alloc::vec![Rat::zero(); n],
            objective_constant: Rat::zero(),
            constraints: Vec::new(),
        }
    }

    pub fn set_objective(&mut self, coefficients: Vec<Rat>, constant: Rat) -> Result<(), LpError> {
        if coefficients.len() != self.variables.len() {
            return Err(LpError::DimensionMismatch {
                expected: self.variables.len(),
                got: coefficients.len(),
            });
        }
        self.objective = coefficients;
        self.objective_constant = constant;
        Ok(())
    }

    pub fn add_constraint(
        &mut self,
        coefficients: Vec<Rat>,
        relation: Relation,
        rhs: Rat,
    ) -> Result<(), LpError> {
        if coefficients.len() != self.variables.len() {
            return Err(LpError::DimensionMismatch {
                expected: self.variables.len(),
                got: coefficients.len(),
            });
        }
        self.constraints.push(LpConstraint {
            coefficients,
            relation,
            rhs,
        });
        Ok(())
    }

    pub fn variables(&self) -> &[String] {
        &self.variables
    }

    pub fn num_variables(&self) -> usize {
        self.variables.len()
    }

    pub fn variable_index(&self, name: &str) -> Option<usize> {
        self.variables.iter().position(|v| v == name)
    }

    pub fn objective(&self) -> &[Rat] {
        &self.objective
    }

    pub fn objective_constant(&self) -> &Rat {
        &self.objective_constant
    }

    pub fn constraints(&self) -> &[LpConstraint] {
        &self.constraints
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

/// Solver verdict. `assignment` is indexed like the program's variables and
/// empty unless optimal; optimal assignments have been verified against
/// every constraint by direct substitution before being returned.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LpSolution {
    pub status: LpStatus,
    assignment: Vec<Rat>,
    pub objective_value: Option<Rat>,
    pub iterations: u64,
    /// Pivots spent reaching feasibility / pivots that moved nothing.
    pub phase1_iterations: u64,
    pub degenerate_iterations: u64,
}

impl LpSolution {
    pub fn assignment(&self) -> &[Rat] {
        &self.assignment
    }
}

/// Arithmetic the solver runs in. Exact is canonical; float is the opt-in
/// cross-check mode with tolerance `1e-9`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Arithmetic {
    Exact,
    Float,
}

/// Objective flavor for [`build_protection_lp`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ObjectiveMode {
    /// `min bandwidth + epsilon * storage overhead` in one solve.
    Epsilon(Rat),
    /// Lexicographic phase 1: bandwidth alone.
    MinBandwidth,
    /// Lexicographic phase 2: storage overhead, with bandwidth pinned to the
    /// phase-1 optimum by an equality row.
    MinStorageGivenBandwidth(Rat),
}

/// The storage tie-break weight suggested for the epsilon objective.
pub fn default_epsilon() -> Rat {
    rat(1, 1_000_000)
}

/// Index of `alpha_m` in the protection LP's variable order.
pub fn alpha_index(spec: &ProblemSpec, m: u32) -> usize {
    debug_assert!(m >= spec.k() && m < spec.n());
    (m - spec.k()) as usize
}

/// Index of `beta_s` in the protection LP's variable order.
pub fn beta_index(spec: &ProblemSpec, s: u32) -> usize {
    debug_assert!(s > spec.k() && s <= spec.n());
    (spec.n() - spec.k()) as usize + (s - spec.k() - 1) as usize
}

/// How a storage level enters the rows: as a variable or pinned constant.
#[derive(Clone)]
enum AlphaBinding {
    Var(usize),
    Const(Rat),
}

/// Emits the full protection constraint system (cut rows, storage
/// transitions, transmission bounds) over whatever alpha binding the caller
/// chose. Row order is documented and stable: cuts in enumeration order,
/// then transitions by stage, then `beta >= 0` rows, then `beta <= alpha`.
fn push_protection_rows(
    lp: &mut LinearProgram,
    spec: &ProblemSpec,
    alpha_of: &dyn Fn(u32) -> AlphaBinding,
    beta_of: &dyn Fn(u32) -> usize,
) {
    let nvars = lp.num_variables();
    let m_units = spec.data_size().clone();

    for cut in enumerate_all_cuts(spec) {
        let mut coeffs = alloc::vec![Rat::zero(); nvars];
        let mut rhs = m_units.clone();
        for p in cut.stage()..=cut.n() {
            let jp = cut.j_at(p);
            if jp == 0 {
                continue;
            }
            let jp = Rat::from_integer(jp.into());
            match alpha_of(p) {
                AlphaBinding::Var(idx) => coeffs[idx] += &jp,
                AlphaBinding::Const(c) => rhs -= jp * c,
            }
        }
        for q in cut.stage() + 1..=cut.n() {
            let lq = cut.l_at(q);
            if lq > 0 {
                coeffs[beta_of(q)] += Rat::from_integer(lq.into());
            }
        }
        lp.add_constraint(coeffs, Relation::Ge, rhs)
            .expect("coefficient vectors sized to the program");
    }

    // alpha[m+1] + m beta[m+1] >= alpha[m]
    for m in spec.k()..spec.n() {
        let mut coeffs = alloc::vec![Rat::zero(); nvars];
        let mut rhs = Rat::zero();
        match alpha_of(m + 1) {
            AlphaBinding::Var(idx) => coeffs[idx] += Rat::one(),
            AlphaBinding::Const(c) => rhs -= c,
        }
        coeffs[beta_of(m + 1)] += Rat::from_integer(m.into());
        match alpha_of(m) {
            AlphaBinding::Var(idx) => coeffs[idx] -= Rat::one(),
            AlphaBinding::Const(c) => rhs += c,
        }
        lp.add_constraint(coeffs, Relation::Ge, rhs)
            .expect("coefficient vectors sized to the program");
    }

    for s in spec.repair_stages() {
        let mut coeffs = alloc::vec![Rat::zero(); nvars];
        coeffs[beta_of(s)] = Rat::one();
        lp.add_constraint(coeffs, Relation::Ge, Rat::zero())
            .expect("coefficient vectors sized to the program");
    }
    for s in spec.repair_stages() {
        let mut coeffs = alloc::vec![Rat::zero(); nvars];
        coeffs[beta_of(s)] = Rat::one();
        match alpha_of(s) {
            AlphaBinding::Const(c) => {
                lp.add_constraint(coeffs, Relation::Le, c)
                    .expect("coefficient vectors sized to the program");
            }
            AlphaBinding::Var(idx) => {
                coeffs[idx] -= Rat::one();
                lp.add_constraint(coeffs, Relation::Le, Rat::zero())
                    .expect("coefficient vectors sized to the program");
            }
        }
    }
}

/// Assembles the protection LP for a problem: `2 (n - k)` variables
/// (`alpha_k..alpha_{n-1}`, then `beta_{k+1}..beta_n`), every cut row, the
/// storage transitions, and the transmission bounds, with `alpha_n` folded
/// in as the constant `M/n`.
pub fn build_protection_lp(spec: &ProblemSpec, mode: &ObjectiveMode) -> LinearProgram {
    let (n, k) = (spec.n(), spec.k());
    let mut names = Vec::with_capacity(2 * (n - k) as usize);
    for m in k..n {
        names.push(alloc::format!("alpha_{m}"));
    }
    for s in k + 1..=n {
        names.push(alloc::format!("beta_{s}"));
    }
    let mut lp = LinearProgram::new(names);

    let initial = spec.initial_storage();
    let spec_a = spec.clone();
    let alpha_of = move |p: u32| -> AlphaBinding {
        if p == spec_a.n() {
            AlphaBinding::Const(spec_a.initial_storage())
        } else {
            AlphaBinding::Var(alpha_index(&spec_a, p))
        }
    };
    let spec_b = spec.clone();
    let beta_of = move |s: u32| beta_index(&spec_b, s);

    let mut objective = alloc::vec![Rat::zero(); lp.num_variables()];
    for s in spec.repair_stages() {
        objective[beta_index(spec, s)] =
            Rat::from_integer((u64::from(s) * u64::from(s - 1)).into());
    }
    let mut constant = Rat::zero();
    match mode {
        ObjectiveMode::Epsilon(eps) => {
            for m in k..n {
                objective[alpha_index(spec, m)] = eps * Rat::from_integer(m.into());
            }
            // The pinned alpha_n still contributes n * (M/n) to the storage
            // overhead term.
            constant = eps * Rat::from_integer(n.into()) * &initial;
        }
        ObjectiveMode::MinBandwidth => {}
        ObjectiveMode::MinStorageGivenBandwidth(delta) => {
            let bandwidth = objective;
            objective = alloc::vec![Rat::zero(); lp.num_variables()];
            for m in k..n {
                objective[alpha_index(spec, m)] = Rat::from_integer(m.into());
            }
            constant = Rat::from_integer(n.into()) * &initial;
            lp.set_objective(objective.clone(), constant.clone())
                .expect("sized objective");
            push_protection_rows(&mut lp, spec, &alpha_of, &beta_of);
            lp.add_constraint(bandwidth, Relation::Eq, delta.clone())
                .expect("sized row");
            return lp;
        }
    }
    lp.set_objective(objective, constant).expect("sized objective");
    push_protection_rows(&mut lp, spec, &alpha_of, &beta_of);
    lp
}

/// The protection LP restricted to the transmission variables, with the
/// whole storage profile pinned to the given values (`alpha[n]` stays
/// `M/n`). Minimizes bandwidth.
pub fn build_beta_lp(spec: &ProblemSpec, alpha: &BTreeMap<u32, Rat>) -> LinearProgram {
    let (n, k) = (spec.n(), spec.k());
    let mut names = Vec::with_capacity((n - k) as usize);
    for s in k + 1..=n {
        names.push(alloc::format!("beta_{s}"));
    }
    let mut lp = LinearProgram::new(names);
    let mut objective = alloc::vec![Rat::zero(); lp.num_variables()];
    for s in spec.repair_stages() {
        objective[(s - k - 1) as usize] =
            Rat::from_integer((u64::from(s) * u64::from(s - 1)).into());
    }
    lp.set_objective(objective, Rat::zero()).expect("sized objective");

    let pinned: BTreeMap<u32, Rat> = {
        let mut map = alpha.clone();
        map.insert(n, spec.initial_storage());
        map
    };
    let alpha_of = move |p: u32| AlphaBinding::Const(pinned[&p].clone());
    let k_copy = k;
    let beta_of = move |s: u32| (s - k_copy - 1) as usize;
    push_protection_rows(&mut lp, spec, &alpha_of, &beta_of);
    lp
}

fn to_program<S: Scalar>(lp: &LinearProgram) -> Program<S> {
    let rows = lp
        .constraints
        .iter()
        .map(|c| simplex::Row {
            coeffs: c
                .coefficients
                .iter()
                .enumerate()
                .filter(|(_, v)| !v.is_zero())
                .map(|(j, v)| (j, S::from_rat(v)))
                .collect(),
            rel: match c.relation {
                Relation::Ge => simplex::Rel::Ge,
                Relation::Le => simplex::Rel::Le,
                Relation::Eq => simplex::Rel::Eq,
            },
            rhs: S::from_rat(&c.rhs),
        })
        .collect();
    Program {
        num_structural: lp.num_variables(),
        costs: lp.objective.iter().map(|v| S::from_rat(v)).collect(),
        rows,
    }
}

/// Verifies an assignment against every constraint. `tolerance` is zero for
/// exact mode; float-mode solutions get a safety-net band (the precise
/// agreement guarantee is checked by the caller's own criteria).
fn verify_assignment(lp: &LinearProgram, x: &[Rat], tolerance: &Rat) -> Result<(), LpError> {
    for (row, c) in lp.constraints.iter().enumerate() {
        let mut lhs = Rat::zero();
        for (coef, v) in c.coefficients.iter().zip(x) {
            if !coef.is_zero() && !v.is_zero() {
                lhs += coef * v;
            }
        }
        let ok = match c.relation {
            Relation::Ge => lhs >= &c.rhs - tolerance,
            Relation::Le => lhs <= &c.rhs + tolerance,
            Relation::Eq => (lhs - &c.rhs).abs() <= *tolerance,
        };
        if !ok {
            return Err(LpError::VerificationFailed { row });
        }
    }
    Ok(())
}

fn convert_simplex_error(e: simplex::SimplexError) -> LpError {
    match e {
        simplex::SimplexError::IterationLimit => LpError::IterationLimit,
        simplex::SimplexError::SingularBasis => LpError::SingularBasis,
        simplex::SimplexError::Internal(m) => LpError::Internal(m),
    }
}

/// Solves the program with the primal simplex. Exact mode pivots in
/// rational arithmetic with Bland's rule guarding against cycling; float
/// mode uses partial pricing with the `1e-9` tolerance.
pub fn solve(lp: &LinearProgram, arithmetic: Arithmetic) -> Result<LpSolution, LpError> {
    let (status, solution_rat, iterations, phase1_iterations, degenerate_iterations) =
        match arithmetic {
            Arithmetic::Exact => {
                let program = to_program::<Rat>(lp);
                let out = simplex::solve_program(&program, Pricing::Bland)
                    .map_err(convert_simplex_error)?;
                (
                    out.status,
                    out.solution,
                    out.iterations,
                    out.phase1_iterations,
                    out.degenerate_iterations,
                )
            }
            Arithmetic::Float => {
                let program = to_program::<f64>(lp);
                let out = simplex::solve_program(&program, Pricing::Partial)
                    .map_err(convert_simplex_error)?;
                let solution = out
                    .solution
                    .iter()
                    .map(|&v| Rat::from_float(v).unwrap_or_else(Rat::zero))
                    .collect();
                (
                    out.status,
                    out.solution.is_empty().then(Vec::new).map_or(solution, |v| v),
                    out.iterations,
                    out.phase1_iterations,
                    out.degenerate_iterations,
                )
            }
        };
    let status = match status {
        simplex::Status::Optimal => LpStatus::Optimal,
        simplex::Status::Infeasible => LpStatus::Infeasible,
        simplex::Status::Unbounded => LpStatus::Unbounded,
    };
    if status != LpStatus::Optimal {
        return Ok(LpSolution {
            status,
            assignment: Vec::new(),
            objective_value: None,
            iterations,
            phase1_iterations,
            degenerate_iterations,
        });
    }

    let tolerance = match arithmetic {
        Arithmetic::Exact => Rat::zero(),
        // Loose safety net; the 1e-9 agreement claim is checked against the
        // exact mode by the test suite, not assumed here.
        Arithmetic::Float => rat(1, 10_000_000),
    };
    verify_assignment(lp, &solution_rat, &tolerance)?;

    let mut objective = lp.objective_constant.clone();
    for (coef, v) in lp.objective.iter().zip(&solution_rat) {
        if !coef.is_zero() && !v.is_zero() {
            objective += coef * v;
        }
    }
    Ok(LpSolution {
        status,
        assignment: solution_rat,
        objective_value: Some(objective),
        iterations,
        phase1_iterations,
        degenerate_iterations,
    })
}

/// Two-phase exact solve: minimize bandwidth, then minimize storage overhead
/// among the bandwidth-optimal solutions. Returns the phase-2 solution (its
/// `objective_value` is the storage overhead); `iterations` counts both
/// phases.
pub fn solve_lexicographic(spec: &ProblemSpec) -> Result<LpSolution, LpError> {
    let phase1 = build_protection_lp(spec, &ObjectiveMode::MinBandwidth);
    let sol1 = solve(&phase1, Arithmetic::Exact)?;
    if sol1.status != LpStatus::Optimal {
        return Err(LpError::UnexpectedStatus(sol1.status));
    }
    let delta = sol1
        .objective_value
        .clone()
        .expect("optimal solutions carry an objective");
    let phase2 = build_protection_lp(spec, &ObjectiveMode::MinStorageGivenBandwidth(delta));
    let mut sol2 = solve(&phase2, Arithmetic::Exact)?;
    if sol2.status != LpStatus::Optimal {
        return Err(LpError::UnexpectedStatus(sol2.status));
    }
    sol2.iterations += sol1.iterations;
    Ok(sol2)
}
