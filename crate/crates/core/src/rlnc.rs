//! Random-linear-coding execution of a plan: discretize the profiles into
//! whole packets, run the lose-one-node-at-a-time protocol with random
//! coefficients over a finite field, and check decodability (coefficient
//! rank) at every stage. This is the constructive end-to-end check that a
//! feasible plan really keeps the data recoverable.
//!
//! Only coefficient vectors are simulated; there is no payload and no
//! transport. A trial is a pure function of (packetized plan, seed, field).

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rand_core::{RngCore, SeedableRng};

use crate::gf::{rank, FieldOrder, GaloisField};
use crate::model::{ProblemSpec, ProtectionPlan};
use crate::ratio::Rat;

/// A plan scaled to `G` whole packets: `stored[m]` packets kept per node
/// while `m` nodes remain, `sent[s]` packets per directed link in stage `s`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PacketizedPlan {
    spec: ProblemSpec,
    source_packets: u64,
    stored: BTreeMap<u32, u64>,
    sent: BTreeMap<u32, u64>,
    exact: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RlncError {
    /// Fewer packets than nodes: someone would start empty-handed.
    PacketBudgetBelowNodeCount { max_packets: u64, n: u32 },
}

impl fmt::Display for RlncError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RlncError::PacketBudgetBelowNodeCount { max_packets, n } => write!(
                f,
                "packet budget {max_packets} is below the node count {n}"
            ),
        }
    }
}

impl core::error::Error for RlncError {}

fn ceil_to_u64(x: &Rat) -> u64 {
    x.ceil().to_integer().to_u64().expect("packet counts fit u64")
}

impl PacketizedPlan {
    /// Discretizes at exactly `packets` source packets, rounding every
    /// profile value up to whole packets. Over-provisioning preserves
    /// feasibility; `is_exact` reports whether no rounding occurred.
    pub fn with_packet_count(plan: &ProtectionPlan, packets: u64) -> Self {
        let spec = plan.spec().clone();
        let m_units = spec.data_size();
        let g = Rat::from_integer(packets.into());
        let mut exact = true;
        let mut stored = BTreeMap::new();
        for m in spec.storage_stages() {
            let scaled = &g * plan.alpha(m) / m_units;
            exact &= scaled.denom().is_one();
            stored.insert(m, ceil_to_u64(&scaled));
        }
        let mut sent = BTreeMap::new();
        for s in spec.repair_stages() {
            let scaled = &g * plan.beta(s) / m_units;
            exact &= scaled.denom().is_one();
            sent.insert(s, ceil_to_u64(&scaled));
        }
        PacketizedPlan {
            spec,
            source_packets: packets,
            stored,
            sent,
            exact,
        }
    }

    pub fn spec(&self) -> &ProblemSpec {
        &self.spec
    }

    pub fn packet_count(&self) -> u64 {
        self.source_packets
    }

    pub fn stored(&self, m: u32) -> u64 {
        self.stored[&m]
    }

    pub fn sent(&self, s: u32) -> u64 {
        self.sent[&s]
    }

    /// True when the packet count divided every profile value exactly, so
    /// the discretization loses nothing to rounding.
    pub fn is_exact(&self) -> bool {
        self.exact
    }

    /// Data units one packet stands for.
    pub fn packet_size(&self) -> Rat {
        self.spec.data_size() / Rat::from_integer(self.source_packets.into())
    }
}

/// Chooses the packet count: the least common multiple of the profile
/// denominators when that stays within `max_packets` (every count exact),
/// otherwise `max_packets` with ceiling rounding.
pub fn packetize(plan: &ProtectionPlan, max_packets: u64) -> Result<PacketizedPlan, RlncError> {
    let spec = plan.spec();
    if max_packets < u64::from(spec.n()) {
        return Err(RlncError::PacketBudgetBelowNodeCount {
            max_packets,
            n: spec.n(),
        });
    }
    let m_units = spec.data_size();
    let mut lcm = BigInt::one();
    let values = spec
        .storage_stages()
        .map(|m| plan.alpha(m))
        .chain(spec.repair_stages().map(|s| plan.beta(s)));
    for v in values {
        let denom = (v / m_units).denom().clone();
        lcm = lcm.lcm(&denom);
        if lcm > BigInt::from(max_packets) {
            return Ok(PacketizedPlan::with_packet_count(plan, max_packets));
        }
    }
    let g = lcm.to_u64().expect("bounded by max_packets");
    Ok(PacketizedPlan::with_packet_count(plan, g))
}

/// Outcome of one seeded trial.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrialReport {
    pub seed: u64,
    /// Joint coefficient rank of the survivors after each stage, keyed by
    /// the remaining-node count.
    pub epoch_rank: BTreeMap<u32, u64>,
    /// True iff the rank equals the packet count at every recorded stage.
    pub success: bool,
    /// Data-unit equivalent of everything transmitted.
    pub traffic: Rat,
}

type Rng = rand_chacha::ChaCha8Rng;

fn field_element(rng: &mut Rng, field: &GaloisField) -> u16 {
    (rng.next_u32() & field.mask()) as u16
}

fn uniform_index(rng: &mut Rng, len: usize) -> usize {
    let bound = len as u32;
    let zone = u32::MAX - u32::MAX % bound;
    loop {
        let v = rng.next_u32();
        if v < zone {
            return (v % bound) as usize;
        }
    }
}

fn random_combination(
    rng: &mut Rng,
    field: &GaloisField,
    pool: &[Vec<u16>],
    width: usize,
) -> Vec<u16> {
    let mut out = alloc::vec![0u16; width];
    for row in pool {
        let coef = field_element(rng, field);
        field.axpy(&mut out, row, coef);
    }
    out
}

fn run_trial_with(pp: &PacketizedPlan, seed: u64, field: &GaloisField) -> TrialReport {
    let spec = pp.spec();
    let n = spec.n() as usize;
    let g = pp.packet_count() as usize;
    let mut rng = Rng::seed_from_u64(seed);

    // Unit coefficient vectors dealt round-robin: packet j to node j mod n.
    let mut nodes: Vec<Vec<Vec<u16>>> = alloc::vec![Vec::new(); n];
    for j in 0..g {
        let mut row = alloc::vec![0u16; g];
        row[j] = 1;
        nodes[j % n].push(row);
    }

    let mut alive: Vec<usize> = (0..n).collect();
    let mut traffic = Rat::zero();
    let mut epoch_rank = BTreeMap::new();

    for s in spec.repair_stages().rev() {
        let b = pp.sent(s) as usize;
        let mut inbox: Vec<Vec<Vec<u16>>> = alloc::vec![Vec::new(); n];
        if b > 0 {
            // Every alive node codes fresh packets for every other alive
            // node; senders, recipients, and packets advance in fixed order
            // so a seed fully determines the trial.
            for &u in &alive {
                for &w in &alive {
                    if w == u {
                        continue;
                    }
                    for _ in 0..b {
                        let pk = random_combination(&mut rng, field, &nodes[u], g);
                        inbox[w].push(pk);
                    }
                }
            }
            let pairs = u64::from(s) * u64::from(s - 1);
            traffic += Rat::from_integer((pairs * b as u64).into()) * pp.packet_size();
        }

        let failed = alive.remove(uniform_index(&mut rng, alive.len()));
        nodes[failed].clear();

        let m = s - 1;
        let budget = pp.stored(m) as usize;
        for &i in &alive {
            let mut pool = core::mem::take(&mut nodes[i]);
            pool.append(&mut inbox[i]);
            nodes[i] = if pool.len() > budget {
                (0..budget)
                    .map(|_| random_combination(&mut rng, field, &pool, g))
                    .collect()
            } else {
                // Everything fits; recoding here could only lose rank and
                // models nothing, so keep the packets as they are.
                pool
            };
        }

        let mut union: Vec<Vec<u16>> = Vec::new();
        for &i in &alive {
            union.extend(nodes[i].iter().cloned());
        }
        epoch_rank.insert(m, rank(field, &mut union) as u64);
    }

    let success = epoch_rank.values().all(|&r| r == g as u64);
    TrialReport {
        seed,
        epoch_rank,
        success,
        traffic,
    }
}

/// Executes one seeded trial over the given field order.
pub fn run_trial(pp: &PacketizedPlan, seed: u64, field_order: FieldOrder) -> TrialReport {
    let field = GaloisField::new(field_order);
    run_trial_with(pp, seed, &field)
}

/// Aggregate of a deterministic batch: trial `i` uses `base_seed + i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BatchSummary {
    pub trials: u64,
    pub successes: u64,
    /// Worst observed rank per recorded stage across the batch.
    pub per_epoch_min_rank: BTreeMap<u32, u64>,
    /// Traffic of a single trial (identical across the batch: the exchange
    /// schedule does not depend on the seed).
    pub traffic_per_trial: Rat,
}

pub fn run_batch(
    pp: &PacketizedPlan,
    trials: u64,
    base_seed: u64,
    field_order: FieldOrder,
) -> BatchSummary {
    let field = GaloisField::new(field_order);
    let mut successes = 0;
    let mut per_epoch_min_rank: BTreeMap<u32, u64> = BTreeMap::new();
    let mut traffic_per_trial = Rat::zero();
    for i in 0..trials {
        let report = run_trial_with(pp, base_seed + i, &field);
        if report.success {
            successes += 1;
        }
        for (&m, &r) in &report.epoch_rank {
            per_epoch_min_rank
                .entry(m)
                .and_modify(|cur| *cur = (*cur).min(r))
                .or_insert(r);
        }
        traffic_per_trial = report.traffic;
    }
    BatchSummary {
        trials,
        successes,
        per_epoch_min_rank,
        traffic_per_trial,
    }
}
