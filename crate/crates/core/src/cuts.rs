//! Enumeration of every finite source/collector cut of the information flow
//! graph, stage by stage, and evaluation of cut capacities against a plan.
//!
//! While `m` nodes remain, every finite cut severs each of the `m` survivor
//! chains at exactly one storage edge. Writing `j[p]` for the number of
//! survivors cut at the stage-`p` storage edge (`m <= p <= n`), a cut is
//! exactly a composition of `m` into `n - m + 1` nonnegative parts, and the
//! transmission edges it must also carry are determined:
//! `l[q] = (q - m) * sum of j[p] for p >= q`, because a stage-`q` exchange
//! has `q - m` senders that do not survive and their packets land on every
//! survivor cut at stage `q` or later.
//!
//! The cut's capacity against a plan is then
//! `sum j[p] * alpha[p] + sum l[q] * beta[q]`, and the plan protects the data
//! iff every such capacity reaches `M` at every stage.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_traits::Zero;

use crate::model::{ProblemSpec, ProtectionPlan};
use crate::ratio::Rat;

/// One source/collector cut: the composition `j` over storage stages and the
/// induced transmission multiplicities `l`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CutConstraint {
    n: u32,
    stage_m: u32,
    /// `j[0]` belongs to stage `n`, descending to stage `m`.
    j: Vec<u64>,
    /// `l[0]` belongs to stage `n`, descending to stage `m + 1`.
    l: Vec<u64>,
}

impl CutConstraint {
    fn from_composition(n: u32, m: u32, j: Vec<u64>) -> Self {
        debug_assert_eq!(j.len() as u32, n - m + 1);
        debug_assert_eq!(j.iter().sum::<u64>(), u64::from(m));
        let mut l = vec![0u64; (n - m) as usize];
        let mut tail = 0u64;
        for (idx, &jp) in j.iter().enumerate().take(l.len()) {
            // idx 0 is stage n; the running tail is sum of j[p] for p >= q.
            tail += jp;
            let q = n - idx as u32;
            l[idx] = u64::from(q - m) * tail;
        }
        CutConstraint { n, stage_m: m, j, l }
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    /// The remaining-node count `m` of the stage this cut belongs to.
    pub fn stage(&self) -> u32 {
        self.stage_m
    }

    /// Storage-edge multiplicities, stage `n` first, down to stage `m`.
    pub fn storage_multiplicities(&self) -> &[u64] {
        &self.j
    }

    /// Transmission-edge multiplicities, stage `n` first, down to `m + 1`.
    pub fn transmission_multiplicities(&self) -> &[u64] {
        &self.l
    }

    /// `j[p]` for a storage stage `p` in `[m, n]`.
    pub fn j_at(&self, p: u32) -> u64 {
        self.j[(self.n - p) as usize]
    }

    /// `l[q]` for an exchange stage `q` in `[m + 1, n]`.
    pub fn l_at(&self, q: u32) -> u64 {
        self.l[(self.n - q) as usize]
    }
}

impl fmt::Display for CutConstraint {
    /// Renders the capacity expression, e.g. `4a6 + 8b6 + 0a5 + 4b5 + 0a4`.
    /// Zero storage terms stay visible so the composition layout is readable.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for p in (self.stage_m..=self.n).rev() {
            let jp = self.j_at(p);
            if !first {
                f.write_str(" + ")?;
            }
            write!(f, "{jp}a{p}")?;
            first = false;
            if p > self.stage_m {
                let lq = self.l_at(p);
                if lq > 0 {
                    write!(f, " + {lq}b{p}")?;
                }
            }
        }
        Ok(())
    }
}

/// Iterates the compositions of `total` into `parts` nonnegative parts in
/// descending lexicographic order, first part major: `(t,0,..,0)` down to
/// `(0,..,0,t)`. Iterative odometer, no recursion.
#[derive(Debug, Clone)]
pub struct Compositions {
    current: Vec<u64>,
    started: bool,
    done: bool,
}

impl Compositions {
    pub fn new(total: u64, parts: usize) -> Self {
        assert!(parts >= 1, "need at least one part");
        let mut current = vec![0; parts];
        current[0] = total;
        Compositions {
            current,
            started: false,
            done: false,
        }
    }
}

impl Iterator for Compositions {
    type Item = Vec<u64>;

    fn next(&mut self) -> Option<Vec<u64>> {
        if self.done {
            return None;
        }
        if !self.started {
            self.started = true;
            return Some(self.current.clone());
        }
        let parts = self.current.len();
        // Move one unit right from the rightmost positive among the first
        // parts-1 slots, sweeping everything beyond it back onto its right
        // neighbor.
        for i in (0..parts - 1).rev() {
            if self.current[i] > 0 {
                self.current[i] -= 1;
                let mut tail = 1;
                for slot in &mut self.current[i + 1..] {
                    tail += *slot;
                    *slot = 0;
                }
                self.current[i + 1] = tail;
                return Some(self.current.clone());
            }
        }
        self.done = true;
        None
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CutsError {
    /// The requested stage is outside `[k, n - 1]`.
    StageOutOfRange { m: u32, k: u32, n: u32 },
    /// Cut and plan were built for different problems.
    SpecMismatch,
}

impl fmt::Display for CutsError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CutsError::StageOutOfRange { m, k, n } => {
                write!(f, "stage m = {m} outside [{k}, {}]", n - 1)
            }
            CutsError::SpecMismatch => f.write_str("cut and plan belong to different problems"),
        }
    }
}

impl core::error::Error for CutsError {}

/// All finite cuts of the stage where `m` nodes remain: one per composition
/// of `m` into `n - m + 1` parts, in descending lexicographic `j` order
/// (stage-`n` part major), so constraint indices are stable across runs.
pub fn enumerate_stage_cuts(spec: &ProblemSpec, m: u32) -> Result<Vec<CutConstraint>, CutsError> {
    let (n, k) = (spec.n(), spec.k());
    if m < k || m >= n {
        return Err(CutsError::StageOutOfRange { m, k, n });
    }
    let parts = (n - m + 1) as usize;
    Ok(Compositions::new(u64::from(m), parts)
        .map(|j| CutConstraint::from_composition(n, m, j))
        .collect())
}

/// Every cut of every stage, `m = k` first, stage order preserved.
pub fn enumerate_all_cuts(spec: &ProblemSpec) -> Vec<CutConstraint> {
    let mut out = Vec::new();
    for m in spec.k()..spec.n() {
        out.extend(enumerate_stage_cuts(spec, m).expect("stage within range"));
    }
    out
}

/// Number of cuts [`enumerate_all_cuts`] yields, `sum of C(n, t)` for
/// `t = 1..=n-k`, without enumerating. Saturates at `u128::MAX`.
pub fn total_cut_count(spec: &ProblemSpec) -> u128 {
    let n = u128::from(spec.n());
    let mut total: u128 = 0;
    let mut binom: u128 = 1;
    for t in 1..=u128::from(spec.n() - spec.k()) {
        binom = match binom
            .checked_mul(n - t + 1)
            .map(|v| v / t)
        {
            Some(v) => v,
            None => return u128::MAX,
        };
        total = match total.checked_add(binom) {
            Some(v) => v,
            None => return u128::MAX,
        };
    }
    total
}

/// Enumerations beyond this many constraints deserve a warning: the count
/// grows like `2^n` and the solver downstream is dense.
pub const CUT_COUNT_WARNING_LIMIT: u128 = 1_000_000;

/// Exact capacity of a cut against a plan:
/// `sum j[p] * alpha[p] + sum l[q] * beta[q]`.
pub fn cut_capacity(cut: &CutConstraint, plan: &ProtectionPlan) -> Result<Rat, CutsError> {
    let spec = plan.spec();
    if cut.n() != spec.n() || cut.stage() < spec.k() {
        return Err(CutsError::SpecMismatch);
    }
    let mut capacity = Rat::zero();
    for p in cut.stage()..=cut.n() {
        let jp = cut.j_at(p);
        if jp > 0 {
            capacity += Rat::from_integer(jp.into()) * plan.alpha(p);
        }
    }
    for q in cut.stage() + 1..=cut.n() {
        let lq = cut.l_at(q);
        if lq > 0 {
            capacity += Rat::from_integer(lq.into()) * plan.beta(q);
        }
    }
    Ok(capacity)
}
