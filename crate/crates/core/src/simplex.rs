//! Primal simplex on the standard-form tableau, shared by the exact-rational
//! and float solver modes.
//!
//! The LPs this crate produces are extremely row-heavy: up to thousands of
//! cut constraints over at most a couple dozen structural variables. Every
//! basis therefore consists of a handful of structural columns plus unit
//! (slack/surplus/artificial) columns, and all basis solves reduce to a dense
//! system of size `r = number of basic structural columns`. The solver keeps
//! exactly that `r x r` inverse and rebuilds it each pivot, so one iteration
//! costs `O(nnz + r^3)` instead of touching a full dense tableau. Pivot
//! selection and results are identical to the textbook tableau formulation.
//!
//! Phase 1 uses a single shared auxiliary column covering every `>=` row
//! instead of one artificial per row: pivoted in at the worst violation it
//! makes all surpluses basic and feasible at once, and driving that one
//! variable to zero reaches feasibility in a handful of pivots where
//! per-row artificials would need one pivot per slack row. Equality rows
//! keep individual artificials. Phase 2 re-prices with the real objective;
//! any phase-1 column still basic at zero is kept pinned there by the ratio
//! test and retired the first time an entering direction crosses its row.

use alloc::vec;
use alloc::vec::Vec;

use num_traits::{Signed, ToPrimitive, Zero};

use crate::ratio::Rat;

/// Number field the solver runs in. Exact rationals compare against zero
/// exactly; floats use the documented feasibility/optimality tolerance.
/// `is_exactly_zero` exists separately so sparsity skips never change float
/// results, only avoid work.
pub(crate) trait Scalar:
    Clone + PartialOrd + core::fmt::Debug + num_traits::Zero + num_traits::One
{
    fn from_rat(r: &Rat) -> Self;
    fn neg_val(v: Self) -> Self;
    fn mul_ref(a: &Self, b: &Self) -> Self;
    fn div_ref(a: &Self, b: &Self) -> Self;
    fn add_assign_ref(a: &mut Self, b: &Self);
    fn sub_assign_ref(a: &mut Self, b: &Self);
    /// True zero; safe to skip in accumulations.
    fn is_exactly_zero(&self) -> bool;
    /// Within tolerance of zero (exactly zero in exact mode).
    fn is_zero_tol(&self) -> bool;
    /// Strictly below minus the tolerance.
    fn is_neg_tol(&self) -> bool;
    /// Strictly above the tolerance.
    fn is_pos_tol(&self) -> bool;
    /// Larger is a better elimination pivot; zero means unusable.
    fn pivot_weight(&self) -> f64;
}

impl Scalar for Rat {
    fn from_rat(r: &Rat) -> Self {
        r.clone()
    }
    fn neg_val(v: Self) -> Self {
        -v
    }
    fn mul_ref(a: &Self, b: &Self) -> Self {
        a * b
    }
    fn div_ref(a: &Self, b: &Self) -> Self {
        a / b
    }
    fn add_assign_ref(a: &mut Self, b: &Self) {
        *a += b;
    }
    fn sub_assign_ref(a: &mut Self, b: &Self) {
        *a -= b;
    }
    fn is_exactly_zero(&self) -> bool {
        self.is_zero()
    }
    fn is_zero_tol(&self) -> bool {
        self.is_zero()
    }
    fn is_neg_tol(&self) -> bool {
        self.is_negative()
    }
    fn is_pos_tol(&self) -> bool {
        self.is_positive()
    }
    fn pivot_weight(&self) -> f64 {
        if self.is_zero() {
            0.0
        } else {
            1.0
        }
    }
}

/// Feasibility/optimality tolerance of the float mode.
pub(crate) const FLOAT_TOL: f64 = 1e-9;

impl Scalar for f64 {
    fn from_rat(r: &Rat) -> Self {
        r.to_f64().expect("rational representable as f64")
    }
    fn neg_val(v: Self) -> Self {
        -v
    }
    fn mul_ref(a: &Self, b: &Self) -> Self {
        a * b
    }
    fn div_ref(a: &Self, b: &Self) -> Self {
        a / b
    }
    fn add_assign_ref(a: &mut Self, b: &Self) {
        *a += b;
    }
    fn sub_assign_ref(a: &mut Self, b: &Self) {
        *a -= b;
    }
    fn is_exactly_zero(&self) -> bool {
        *self == 0.0
    }
    fn is_zero_tol(&self) -> bool {
        self.abs() <= FLOAT_TOL
    }
    fn is_neg_tol(&self) -> bool {
        *self < -FLOAT_TOL
    }
    fn is_pos_tol(&self) -> bool {
        *self > FLOAT_TOL
    }
    fn pivot_weight(&self) -> f64 {
        self.abs()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Rel {
    Ge,
    Le,
    Eq,
}

/// One standard-form row, sparse over the structural columns.
#[derive(Debug, Clone)]
pub(crate) struct Row<S> {
    pub coeffs: Vec<(usize, S)>,
    pub rel: Rel,
    pub rhs: S,
}

#[derive(Debug, Clone)]
pub(crate) struct Program<S> {
    pub num_structural: usize,
    pub costs: Vec<S>,
    pub rows: Vec<Row<S>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Pricing {
    /// Lowest-index negative reduced cost: Bland's anti-cycling rule alone.
    Bland,
    /// Most negative reduced cost (ties to the lowest index), engaging
    /// Bland's rule whenever pivots stall on degeneracy. Same termination
    /// guarantee, far fewer iterations on heavily degenerate instances.
    DantzigThenBland,
    /// Rotating block scan: the float mode's partial pricing.
    Partial,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Status {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone)]
pub(crate) struct Outcome<S> {
    pub status: Status,
    /// Structural variable values; empty unless optimal.
    pub solution: Vec<S>,
    pub iterations: u64,
    /// How many of the iterations belonged to phase 1 / were degenerate.
    pub phase1_iterations: u64,
    pub degenerate_iterations: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum SimplexError {
    IterationLimit,
    /// The basis lost invertibility: a solver bug in exact mode, numerical
    /// breakdown in float mode.
    SingularBasis,
    /// An invariant that cannot fail failed (e.g. phase 1 unbounded).
    Internal(&'static str),
}

const ITERATION_LIMIT: u64 = 1_000_000;
const DEGENERATE_PIVOT_SWITCH: u32 = 25;

/// Column id layout: structural columns, then one shared phase-1 auxiliary
/// column, then one slack/surplus slot per row, then one artificial slot per
/// equality row. Slots a row does not use are never touched.
///
/// The auxiliary column carries a `+1` entry in every `>=` row (they all
/// start violated at the origin). Pivoting it in at the worst violation
/// makes every surplus basic and feasible at once, so phase 1 only has to
/// drive a single variable to zero instead of pivoting out one artificial
/// per row.
#[derive(Clone, Copy)]
struct Columns {
    num_structural: usize,
    num_rows: usize,
}

impl Columns {
    fn aux(&self) -> usize {
        self.num_structural
    }
    fn slack(&self, row: usize) -> usize {
        self.num_structural + 1 + row
    }
    fn artificial(&self, row: usize) -> usize {
        self.num_structural + 1 + self.num_rows + row
    }
    fn total(&self) -> usize {
        self.num_structural + 1 + 2 * self.num_rows
    }
    fn is_artificial(&self, col: usize) -> bool {
        col >= self.num_structural + 1 + self.num_rows
    }
    /// Columns that must stay at zero once feasibility is reached: the
    /// shared auxiliary and the equality-row artificials.
    fn is_phase1_only(&self, col: usize) -> bool {
        col == self.aux() || self.is_artificial(col)
    }
    fn row_of_unit(&self, col: usize) -> usize {
        debug_assert!(col > self.num_structural);
        (col - self.num_structural - 1) % self.num_rows
    }
}

struct Solver<S: Scalar> {
    cols: Columns,
    costs: Vec<S>,
    /// Normalized rows: rhs >= 0.
    rows: Vec<Row<S>>,
    /// Per structural column: (row, coefficient) entries.
    csc: Vec<Vec<(usize, S)>>,
    /// Slack sign per row: +1 for <=, -1 for >=, None for =.
    slack_sign: Vec<Option<i8>>,
    /// Rows whose initial basic column is an artificial.
    starts_artificial: Vec<bool>,
    /// Position -> basic column id.
    basic: Vec<usize>,
    in_basis: Vec<bool>,
    /// Artificials that left the basis never come back.
    retired: Vec<bool>,
    pricing: Pricing,
    bland_engaged: bool,
    degenerate_streak: u32,
    partial_cursor: usize,
    iterations: u64,
    phase1_iterations: u64,
    degenerate_iterations: u64,

    // Factorization of the current basis, rebuilt every pivot.
    struct_basis_cols: Vec<usize>,
    struct_basis_pos: Vec<usize>,
    unit_basis: Vec<(usize, usize, S)>, // (position, row, signed one)
    free_rows: Vec<usize>,
    free_row_index: Vec<usize>, // row -> index into free_rows, or MAX
    struct_col_index: Vec<usize>, // struct col -> index into struct_basis_cols, or MAX
    minv: Vec<S>,               // r*r row-major inverse of A[free_rows, struct_basis_cols]
}

impl<S: Scalar> Solver<S> {
    fn new(program: &Program<S>, pricing: Pricing) -> Self {
        let num_rows = program.rows.len();
        let cols = Columns {
            num_structural: program.num_structural,
            num_rows,
        };

        // Normalize to nonnegative right-hand sides. A >= row with zero rhs
        // flips to <= so its slack can start basic without an artificial.
        let mut rows = Vec::with_capacity(num_rows);
        for row in &program.rows {
            let mut row = row.clone();
            let flip =
                row.rhs.is_neg_tol() || (row.rel == Rel::Ge && row.rhs.is_zero_tol());
            if flip {
                for (_, c) in &mut row.coeffs {
                    *c = S::neg_val(c.clone());
                }
                row.rhs = S::neg_val(row.rhs);
                row.rel = match row.rel {
                    Rel::Ge => Rel::Le,
                    Rel::Le => Rel::Ge,
                    Rel::Eq => Rel::Eq,
                };
            }
            row.coeffs.retain(|(_, c)| !c.is_exactly_zero());
            rows.push(row);
        }

        let mut csc = vec![Vec::new(); program.num_structural + 1];
        for (r, row) in rows.iter().enumerate() {
            for (j, c) in &row.coeffs {
                csc[*j].push((r, c.clone()));
            }
        }

        let mut slack_sign = Vec::with_capacity(num_rows);
        for row in &rows {
            slack_sign.push(match row.rel {
                Rel::Le => Some(1i8),
                Rel::Ge => Some(-1i8),
                Rel::Eq => None,
            });
        }

        // The auxiliary column covers every >= row (all violated at the
        // origin since their rhs is positive after normalization). It
        // starts basic on the worst-violated one; every other >= row then
        // opens with its surplus basic at (worst rhs - own rhs) >= 0.
        let mut aux_rows: Vec<(usize, S)> = Vec::new();
        let mut host: Option<usize> = None;
        for (r, row) in rows.iter().enumerate() {
            if row.rel == Rel::Ge {
                aux_rows.push((r, S::one()));
                let better = match host {
                    None => true,
                    Some(h) => rows[h].rhs < row.rhs,
                };
                if better {
                    host = Some(r);
                }
            }
        }

        let mut basic = Vec::with_capacity(num_rows);
        let mut in_basis = vec![false; cols.total()];
        let mut starts_artificial = vec![false; num_rows];
        for (r, row) in rows.iter().enumerate() {
            let start = match row.rel {
                Rel::Le => cols.slack(r),
                Rel::Ge => {
                    if host == Some(r) {
                        cols.aux()
                    } else {
                        cols.slack(r)
                    }
                }
                Rel::Eq => {
                    starts_artificial[r] = true;
                    cols.artificial(r)
                }
            };
            in_basis[start] = true;
            basic.push(start);
        }

        csc[cols.aux()] = aux_rows;

        Solver {
            costs: program.costs.clone(),
            rows,
            csc,
            slack_sign,
            starts_artificial,
            basic,
            in_basis,
            retired: vec![false; cols.total()],
            cols,
            pricing,
            bland_engaged: false,
            degenerate_streak: 0,
            partial_cursor: 0,
            iterations: 0,
            phase1_iterations: 0,
            degenerate_iterations: 0,
            struct_basis_cols: Vec::new(),
            struct_basis_pos: Vec::new(),
            unit_basis: Vec::new(),
            free_rows: Vec::new(),
            free_row_index: Vec::new(),
            struct_col_index: Vec::new(),
            minv: Vec::new(),
        }
    }

    fn num_rows(&self) -> usize {
        self.rows.len()
    }

    fn signed_one(sign: i8) -> S {
        if sign >= 0 {
            S::one()
        } else {
            S::neg_val(S::one())
        }
    }

    fn unit_sign(&self, col: usize) -> i8 {
        if self.cols.is_artificial(col) {
            1
        } else {
            self.slack_sign[self.cols.row_of_unit(col)].expect("slack column exists")
        }
    }

    /// Rebuilds the structural-block factorization of the current basis.
    fn refactor(&mut self) -> Result<(), SimplexError> {
        let m = self.num_rows();
        self.struct_basis_cols.clear();
        self.struct_basis_pos.clear();
        self.unit_basis.clear();
        let mut covered = vec![false; m];
        for (pos, &col) in self.basic.iter().enumerate() {
            if col <= self.cols.num_structural {
                // Real columns: structural variables and the shared
                // auxiliary, which lives in the same factorization block.
                self.struct_basis_cols.push(col);
                self.struct_basis_pos.push(pos);
            } else {
                let row = self.cols.row_of_unit(col);
                if covered[row] {
                    return Err(SimplexError::SingularBasis);
                }
                covered[row] = true;
                self.unit_basis
                    .push((pos, row, Self::signed_one(self.unit_sign(col))));
            }
        }
        self.free_rows.clear();
        for (r, &c) in covered.iter().enumerate() {
            if !c {
                self.free_rows.push(r);
            }
        }
        let r = self.struct_basis_cols.len();
        if self.free_rows.len() != r {
            return Err(SimplexError::SingularBasis);
        }
        self.free_row_index = vec![usize::MAX; m];
        for (i, &row) in self.free_rows.iter().enumerate() {
            self.free_row_index[row] = i;
        }
        self.struct_col_index = vec![usize::MAX; self.cols.num_structural + 1];
        for (i, &col) in self.struct_basis_cols.iter().enumerate() {
            self.struct_col_index[col] = i;
        }

        // Dense block M[a][b] = A[free_rows[a]][struct_cols[b]], inverted by
        // Gauss-Jordan with the best remaining pivot in each column (for
        // rationals any nonzero entry; for floats the largest magnitude).
        let mut mat = vec![S::zero(); r * r];
        for (b, &col) in self.struct_basis_cols.iter().enumerate() {
            for (row, coef) in &self.csc[col] {
                let a = self.free_row_index[*row];
                if a != usize::MAX {
                    mat[a * r + b] = coef.clone();
                }
            }
        }
        let mut inv = vec![S::zero(); r * r];
        for d in 0..r {
            inv[d * r + d] = S::one();
        }
        for col in 0..r {
            let mut piv = usize::MAX;
            let mut piv_weight = 0.0f64;
            for row in col..r {
                let w = mat[row * r + col].pivot_weight();
                if w > piv_weight {
                    piv_weight = w;
                    piv = row;
                }
            }
            if piv == usize::MAX {
                return Err(SimplexError::SingularBasis);
            }
            if piv != col {
                for j in 0..r {
                    mat.swap(piv * r + j, col * r + j);
                    inv.swap(piv * r + j, col * r + j);
                }
            }
            let pivot = mat[col * r + col].clone();
            for j in 0..r {
                if !mat[col * r + j].is_exactly_zero() {
                    mat[col * r + j] = S::div_ref(&mat[col * r + j], &pivot);
                }
                if !inv[col * r + j].is_exactly_zero() {
                    inv[col * r + j] = S::div_ref(&inv[col * r + j], &pivot);
                }
            }
            for row in 0..r {
                if row == col {
                    continue;
                }
                let factor = mat[row * r + col].clone();
                if factor.is_exactly_zero() {
                    continue;
                }
                for j in 0..r {
                    if !mat[col * r + j].is_exactly_zero() {
                        let t = S::mul_ref(&factor, &mat[col * r + j]);
                        S::sub_assign_ref(&mut mat[row * r + j], &t);
                    }
                    if !inv[col * r + j].is_exactly_zero() {
                        let t = S::mul_ref(&factor, &inv[col * r + j]);
                        S::sub_assign_ref(&mut inv[row * r + j], &t);
                    }
                }
            }
        }
        self.minv = inv;
        Ok(())
    }

    /// Solves `B y = v` for `v` given by row; the result is by position.
    fn ftran(&self, value_of_row: impl Fn(usize) -> S) -> Vec<S> {
        let r = self.struct_basis_cols.len();
        let mut rhs = Vec::with_capacity(r);
        for &row in &self.free_rows {
            rhs.push(value_of_row(row));
        }
        let mut y_struct = vec![S::zero(); r];
        for (a, slot) in y_struct.iter_mut().enumerate() {
            for (b, rb) in rhs.iter().enumerate() {
                if !rb.is_exactly_zero() && !self.minv[a * r + b].is_exactly_zero() {
                    let t = S::mul_ref(&self.minv[a * r + b], rb);
                    S::add_assign_ref(slot, &t);
                }
            }
        }
        let mut y = vec![S::zero(); self.num_rows()];
        for (b, &pos) in self.struct_basis_pos.iter().enumerate() {
            y[pos] = y_struct[b].clone();
        }
        let aux_b = self.struct_col_index[self.cols.aux()];
        for (pos, row, sign) in &self.unit_basis {
            let mut acc = value_of_row(*row);
            for (j, c) in &self.rows[*row].coeffs {
                let b = self.struct_col_index[*j];
                if b != usize::MAX && !y_struct[b].is_exactly_zero() {
                    let t = S::mul_ref(c, &y_struct[b]);
                    S::sub_assign_ref(&mut acc, &t);
                }
            }
            if aux_b != usize::MAX
                && self.rows[*row].rel == Rel::Ge
                && !y_struct[aux_b].is_exactly_zero()
            {
                S::sub_assign_ref(&mut acc, &y_struct[aux_b]);
            }
            y[*pos] = S::mul_ref(sign, &acc);
        }
        y
    }

    /// Solves `B^T z = c_B` with `c_B` given per basis position; the result
    /// is the price vector by row.
    fn btran(&self, cost_of_pos: impl Fn(usize) -> S) -> Vec<S> {
        let m = self.num_rows();
        let r = self.struct_basis_cols.len();
        let mut z = vec![S::zero(); m];
        for (pos, row, sign) in &self.unit_basis {
            z[*row] = S::mul_ref(sign, &cost_of_pos(*pos));
        }
        let mut w = Vec::with_capacity(r);
        for (b, &col) in self.struct_basis_cols.iter().enumerate() {
            let mut acc = cost_of_pos(self.struct_basis_pos[b]);
            for (row, coef) in &self.csc[col] {
                if self.free_row_index[*row] == usize::MAX && !z[*row].is_exactly_zero() {
                    let t = S::mul_ref(coef, &z[*row]);
                    S::sub_assign_ref(&mut acc, &t);
                }
            }
            w.push(acc);
        }
        for (a, &row) in self.free_rows.iter().enumerate() {
            let mut acc = S::zero();
            for (b, wb) in w.iter().enumerate() {
                if !wb.is_exactly_zero() && !self.minv[b * r + a].is_exactly_zero() {
                    let t = S::mul_ref(&self.minv[b * r + a], wb);
                    S::add_assign_ref(&mut acc, &t);
                }
            }
            z[row] = acc;
        }
        z
    }

    fn cost_of(&self, col: usize, phase1: bool) -> S {
        if phase1 {
            if self.cols.is_phase1_only(col) {
                S::one()
            } else {
                S::zero()
            }
        } else if col < self.cols.num_structural {
            self.costs[col].clone()
        } else {
            S::zero()
        }
    }

    /// Reduced cost of one nonbasic column under prices `z`.
    fn reduced_cost(&self, col: usize, z: &[S], phase1: bool) -> S {
        let mut d = self.cost_of(col, phase1);
        if col <= self.cols.num_structural {
            for (row, coef) in &self.csc[col] {
                if !z[*row].is_exactly_zero() {
                    let t = S::mul_ref(coef, &z[*row]);
                    S::sub_assign_ref(&mut d, &t);
                }
            }
        } else {
            let row = self.cols.row_of_unit(col);
            let t = S::mul_ref(&Self::signed_one(self.unit_sign(col)), &z[row]);
            S::sub_assign_ref(&mut d, &t);
        }
        d
    }

    /// Nonbasic columns eligible to enter, in Bland (lowest-id) order.
    /// Artificials never enter: they start basic and retire on leaving.
    fn eligible_columns(&self) -> impl Iterator<Item = usize> + '_ {
        let m = self.num_rows();
        let ns = self.cols.num_structural;
        (0..ns)
            .chain((0..m).filter_map(move |row| self.slack_sign[row].map(|_| self.cols.slack(row))))
            .filter(move |&c| !self.in_basis[c])
    }

    fn price(&mut self, z: &[S], phase1: bool) -> Option<usize> {
        let pricing = if self.bland_engaged {
            Pricing::Bland
        } else {
            self.pricing
        };
        match pricing {
            Pricing::Bland => self
                .eligible_columns()
                .find(|&col| self.reduced_cost(col, z, phase1).is_neg_tol()),
            Pricing::DantzigThenBland => {
                let mut best: Option<(S, usize)> = None;
                for col in self.eligible_columns() {
                    let d = self.reduced_cost(col, z, phase1);
                    if d.is_neg_tol() && best.as_ref().is_none_or(|(bd, _)| d < *bd) {
                        best = Some((d, col));
                    }
                }
                best.map(|(_, c)| c)
            }
            Pricing::Partial => {
                let all: Vec<usize> = self.eligible_columns().collect();
                if all.is_empty() {
                    return None;
                }
                let block = (all.len() / 8).max(32);
                let mut start = self.partial_cursor % all.len();
                let mut scanned = 0;
                while scanned < all.len() {
                    let end = (start + block).min(all.len());
                    let mut best: Option<(S, usize)> = None;
                    for &col in &all[start..end] {
                        let d = self.reduced_cost(col, z, phase1);
                        if d.is_neg_tol() && best.as_ref().is_none_or(|(bd, _)| d < *bd) {
                            best = Some((d, col));
                        }
                    }
                    if let Some((_, col)) = best {
                        self.partial_cursor = end % all.len();
                        return Some(col);
                    }
                    scanned += end - start;
                    start = if end == all.len() { 0 } else { end };
                }
                None
            }
        }
    }

    /// Picks the leaving position for entering direction `y` with basic
    /// values `x`. Returns the position and whether the step is degenerate;
    /// `None` means no blocking row (unbounded direction).
    ///
    /// `protect_artificials` is set in phase 2, where a basic artificial
    /// must never move off zero: one the direction would push positive
    /// leaves right now at step zero. The pivot entry is nonzero, so the
    /// swap is valid, and each such pivot permanently retires an
    /// artificial. (During phase 1 artificials are ordinary variables.)
    fn ratio_test(&self, x: &[S], y: &[S], protect_artificials: bool) -> Option<(usize, bool)> {
        if protect_artificials {
            for (pos, &col) in self.basic.iter().enumerate() {
                if self.cols.is_phase1_only(col) && y[pos].is_neg_tol() && x[pos].is_zero_tol() {
                    return Some((pos, true));
                }
            }
        }
        let mut best: Option<(S, usize, usize)> = None; // (theta, basic col, pos)
        for (pos, yp) in y.iter().enumerate() {
            if !yp.is_pos_tol() {
                continue;
            }
            let xp = if x[pos].is_neg_tol() {
                S::zero()
            } else {
                x[pos].clone()
            };
            let theta = S::div_ref(&xp, yp);
            let replace = match &best {
                None => true,
                Some((bt, bcol, _)) => theta < *bt || (theta <= *bt && self.basic[pos] < *bcol),
            };
            if replace {
                best = Some((theta, self.basic[pos], pos));
            }
        }
        best.map(|(theta, _, pos)| (pos, theta.is_zero_tol()))
    }

    fn infeasibility(&self, x: &[S]) -> S {
        let mut total = S::zero();
        for (pos, &col) in self.basic.iter().enumerate() {
            if self.cols.is_phase1_only(col) && !x[pos].is_exactly_zero() {
                S::add_assign_ref(&mut total, &x[pos]);
            }
        }
        total
    }

    /// Runs pivots until the phase objective is optimal. Phase 1 stops the
    /// moment total infeasibility reaches zero: its objective cannot go
    /// lower, and grinding through the remaining degenerate pivots would
    /// only shuffle zero-valued artificials around the basis.
    fn iterate(&mut self, phase1: bool) -> Result<Status, SimplexError> {
        self.refactor()?;
        // Basic values are kept current across pivots (x' = x - theta * y);
        // float mode refreshes them periodically to shed rounding drift.
        let mut x = self.ftran(|row| self.rows[row].rhs.clone());
        let mut pivots_since_refresh = 0u32;
        loop {
            if phase1 && self.infeasibility(&x).is_zero_tol() {
                return Ok(Status::Optimal);
            }
            let basic = &self.basic;
            let z = self.btran(|pos| self.cost_of(basic[pos], phase1));
            let Some(entering) = self.price(&z, phase1) else {
                return Ok(Status::Optimal);
            };
            let y = self.ftran(|row| self.column_entry(entering, row));
            let Some((leave_pos, degenerate)) = self.ratio_test(&x, &y, !phase1) else {
                return Ok(Status::Unbounded);
            };
            let theta = if degenerate {
                S::zero()
            } else {
                S::div_ref(&x[leave_pos], &y[leave_pos])
            };
            let leaving = self.basic[leave_pos];
            self.in_basis[leaving] = false;
            if self.cols.is_phase1_only(leaving) {
                self.retired[leaving] = true;
            }
            self.basic[leave_pos] = entering;
            self.in_basis[entering] = true;

            self.refactor()?;
            pivots_since_refresh += 1;
            if !theta.is_exactly_zero() {
                for (xp, yp) in x.iter_mut().zip(&y) {
                    if !yp.is_exactly_zero() {
                        let t = S::mul_ref(&theta, yp);
                        S::sub_assign_ref(xp, &t);
                    }
                }
            }
            x[leave_pos] = theta;
            if pivots_since_refresh >= 64 {
                x = self.ftran(|row| self.rows[row].rhs.clone());
                pivots_since_refresh = 0;
            }

            self.iterations += 1;
            if phase1 {
                self.phase1_iterations += 1;
            }
            if degenerate {
                self.degenerate_iterations += 1;
            }
            if self.iterations > ITERATION_LIMIT {
                return Err(SimplexError::IterationLimit);
            }
            if degenerate {
                self.degenerate_streak += 1;
                if self.degenerate_streak >= DEGENERATE_PIVOT_SWITCH
                    && self.pricing == Pricing::DantzigThenBland
                {
                    self.bland_engaged = true;
                }
            } else {
                self.degenerate_streak = 0;
                self.bland_engaged = false;
            }
        }
    }

    fn column_entry(&self, col: usize, row: usize) -> S {
        if col == self.cols.aux() {
            return if self.rows[row].rel == Rel::Ge {
                S::one()
            } else {
                S::zero()
            };
        }
        if col < self.cols.num_structural {
            for (j, c) in &self.rows[row].coeffs {
                if *j == col {
                    return c.clone();
                }
            }
            S::zero()
        } else if self.cols.row_of_unit(col) == row {
            Self::signed_one(self.unit_sign(col))
        } else {
            S::zero()
        }
    }

    fn solve(mut self) -> Result<Outcome<S>, SimplexError> {
        let needs_phase1 =
            self.in_basis[self.cols.aux()] || self.starts_artificial.iter().any(|&a| a);
        if needs_phase1 {
            match self.iterate(true)? {
                Status::Unbounded => {
                    return Err(SimplexError::Internal("phase 1 cannot be unbounded"))
                }
                Status::Optimal | Status::Infeasible => {}
            }
            self.refactor()?;
            let x = self.ftran(|row| self.rows[row].rhs.clone());
            if !self.infeasibility(&x).is_zero_tol() {
                return Ok(Outcome {
                    status: Status::Infeasible,
                    solution: Vec::new(),
                    iterations: self.iterations,
                    phase1_iterations: self.phase1_iterations,
                    degenerate_iterations: self.degenerate_iterations,
                });
            }
            // The auxiliary (and any equality artificial) may still be
            // basic at zero; the phase-2 ratio test keeps them pinned
            // there and retires them at the first opportunity.
            self.bland_engaged = false;
            self.degenerate_streak = 0;
        }

        let status = self.iterate(false)?;
        if status == Status::Unbounded {
            return Ok(Outcome {
                status,
                solution: Vec::new(),
                iterations: self.iterations,
                phase1_iterations: self.phase1_iterations,
                degenerate_iterations: self.degenerate_iterations,
            });
        }
        self.refactor()?;
        let x = self.ftran(|row| self.rows[row].rhs.clone());
        let mut solution = vec![S::zero(); self.cols.num_structural];
        for (pos, &col) in self.basic.iter().enumerate() {
            if col < self.cols.num_structural {
                solution[col] = if x[pos].is_neg_tol() {
                    S::zero()
                } else {
                    x[pos].clone()
                };
            }
        }
        Ok(Outcome {
            status: Status::Optimal,
            solution,
            iterations: self.iterations,
            phase1_iterations: self.phase1_iterations,
            degenerate_iterations: self.degenerate_iterations,
        })
    }
}

/// Solves the program with the given pricing rule.
pub(crate) fn solve_program<S: Scalar>(
    program: &Program<S>,
    pricing: Pricing,
) -> Result<Outcome<S>, SimplexError> {
    Solver::new(program, pricing).solve()
}
