//! Command bodies. Every command is a thin shell over the library: parse
//! and validate input, call the planner/verifier/simulator, format output.
//!
//! Exit-code contract: 0 ok, 1 infeasible or failed check, 2 usage or parse
//! error, 3 internal (solver) failure.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context};
use dwindle_core::cuts::{enumerate_all_cuts, enumerate_stage_cuts, total_cut_count};
use dwindle_core::flowgraph::{build_flow_network, min_cut};
use dwindle_core::lp::{
    build_beta_lp, build_protection_lp, default_epsilon, solve, Arithmetic, LinearProgram,
    LpStatus, ObjectiveMode,
};
use dwindle_core::model::{check_feasible, ProblemSpec, ProtectionPlan, StrategyTag};
use dwindle_core::rlnc::{packetize, run_batch};
use dwindle_core::strategies::{plan_for, plan_mrb, ComparisonRow};
use dwindle_core::{gf::FieldOrder, Rat};

use crate::format::{format_both, format_decimal, format_rational, parse_range, render_lp};
use crate::{dot, plan_json};

/// How a command run ends; maps onto the documented exit codes.
pub enum Failure {
    /// Bad arguments, ranges, or unparseable input files (exit 2).
    Usage(anyhow::Error),
    /// A verification verdict of "not feasible" (exit 1).
    CheckFailed,
    /// Solver or I/O trouble (exit 3).
    Internal(anyhow::Error),
}

pub type CmdResult = Result<(), Failure>;

fn usage<T>(e: impl Into<anyhow::Error>) -> Result<T, Failure> {
    Err(Failure::Usage(e.into()))
}

fn internal<T>(e: impl Into<anyhow::Error>) -> Result<T, Failure> {
    Err(Failure::Internal(e.into()))
}

fn write_output(path: Option<&Path>, content: &str) -> CmdResult {
    match path {
        Some(p) => fs::write(p, content)
            .with_context(|| format!("writing {}", p.display()))
            .map_err(Failure::Internal),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn make_spec(n: u32, k: u32, data_size: &Rat) -> Result<ProblemSpec, Failure> {
    match ProblemSpec::new(n, k, data_size.clone()) {
        Ok(s) => Ok(s),
        Err(e) => usage(anyhow!("invalid problem: {e}")),
    }
}

/// Plans with the requested arithmetic. Float mode re-solves the strategy's
/// LP in floats and converts the result back to (exact images of) the float
/// values; MRB has no LP and is identical in both modes.
fn compute_plan(
    spec: &ProblemSpec,
    strategy: StrategyTag,
    mode: Arithmetic,
    epsilon: Option<&Rat>,
) -> Result<ProtectionPlan, Failure> {
    match mode {
        Arithmetic::Exact => match plan_for(spec, strategy, epsilon) {
            Ok(p) => Ok(p),
            Err(e) => internal(anyhow!("solver failure: {e}")),
        },
        Arithmetic::Float => {
            let build_plan = |alpha: BTreeMap<u32, Rat>,
                              beta: BTreeMap<u32, Rat>|
             -> Result<ProtectionPlan, Failure> {
                match ProtectionPlan::new(spec.clone(), alpha, beta, strategy) {
                    Ok(p) => Ok(p),
                    Err(e) => internal(anyhow!("float solution rejected: {e}")),
                }
            };
            match strategy {
                StrategyTag::Mrb => Ok(plan_mrb(spec)),
                StrategyTag::Op => {
                    let eps = epsilon.cloned().unwrap_or_else(default_epsilon);
                    let lp = build_protection_lp(spec, &ObjectiveMode::Epsilon(eps));
                    let sol = solve_or_internal(&lp, Arithmetic::Float)?;
                    let mut alpha = BTreeMap::new();
                    for m in spec.k()..spec.n() {
                        alpha.insert(m, value_of(&lp, &sol, &format!("alpha_{m}"))?);
                    }
                    alpha.insert(spec.n(), spec.initial_storage());
                    let mut beta = BTreeMap::new();
                    for s in spec.repair_stages() {
                        beta.insert(s, value_of(&lp, &sol, &format!("beta_{s}"))?);
                    }
                    build_plan(alpha, beta)
                }
                StrategyTag::Ms => {
                    let mut alpha = BTreeMap::new();
                    for m in spec.storage_stages() {
                        alpha.insert(m, spec.data_size() / Rat::from_integer(m.into()));
                    }
                    let lp = build_beta_lp(spec, &alpha);
                    let sol = solve_or_internal(&lp, Arithmetic::Float)?;
                    let mut beta = BTreeMap::new();
                    for s in spec.repair_stages() {
                        beta.insert(s, value_of(&lp, &sol, &format!("beta_{s}"))?);
                    }
                    build_plan(alpha, beta)
                }
                StrategyTag::Custom => usage(anyhow!("custom labels external plans; pick op, ms or mrb")),
            }
        }
    }
}

fn solve_or_internal(
    lp: &LinearProgram,
    arithmetic: Arithmetic,
) -> Result<dwindle_core::lp::LpSolution, Failure> {
    match solve(lp, arithmetic) {
        Ok(sol) if sol.status == LpStatus::Optimal => Ok(sol),
        Ok(sol) => internal(anyhow!("protection LP ended {:?}", sol.status)),
        Err(e) => internal(anyhow!("solver failure: {e}")),
    }
}

fn value_of(
    lp: &LinearProgram,
    sol: &dwindle_core::lp::LpSolution,
    name: &str,
) -> Result<Rat, Failure> {
    match lp.variable_index(name) {
        Some(i) => Ok(sol.assignment()[i].clone()),
        None => internal(anyhow!("missing LP variable {name}")),
    }
}

fn warn_if_huge(spec: &ProblemSpec, limit: u128) {
    let count = total_cut_count(spec);
    if count > limit {
        eprintln!(
            "warning: {count} cut constraints for n={}, k={} (limit {limit}); \
             enumeration and solving will be slow",
            spec.n(),
            spec.k()
        );
    }
}

#[allow(clippy::too_many_arguments)]
pub fn cmd_plan(
    n: u32,
    k: u32,
    data_size: &Rat,
    strategy: StrategyTag,
    mode: Arithmetic,
    epsilon: Option<&Rat>,
    output: Option<&Path>,
    dump_lp: bool,
    cut_warn_limit: u128,
) -> CmdResult {
    let spec = make_spec(n, k, data_size)?;
    warn_if_huge(&spec, cut_warn_limit);
    if dump_lp {
        let lp = match strategy {
            StrategyTag::Op => build_protection_lp(
                &spec,
                &ObjectiveMode::Epsilon(epsilon.cloned().unwrap_or_else(default_epsilon)),
            ),
            StrategyTag::Ms => {
                let alpha = spec
                    .storage_stages()
                    .map(|m| (m, spec.data_size() / Rat::from_integer(m.into())))
                    .collect();
                build_beta_lp(&spec, &alpha)
            }
            _ => return usage(anyhow!("--dump-lp applies to LP-backed strategies (op, ms)")),
        };
        print!("{}", render_lp(&lp));
    }
    let plan = compute_plan(&spec, strategy, mode, epsilon)?;
    let metrics = plan.metrics();
    write_output(output, &plan_json::emit(&plan))?;
    println!("strategy = {}", plan.strategy());
    println!("delta = {}", format_both(&metrics.delta));
    println!("sigma = {}", format_both(&metrics.sigma));
    println!("rho   = {}", format_both(&metrics.rho));
    println!(
        "alpha_final = {}",
        format_both(plan.alpha(spec.k()))
    );
    Ok(())
}

fn strategy_list(single: Option<StrategyTag>, list: Option<&str>) -> Result<Vec<StrategyTag>, Failure> {
    match (single, list) {
        (Some(_), Some(_)) => usage(anyhow!("pass either --strategy or --strategies, not both")),
        (Some(s), None) => Ok(vec![s]),
        (None, Some(l)) => {
            let mut out = Vec::new();
            for part in l.split(',') {
                let tag: StrategyTag = part
                    .trim()
                    .parse()
                    .map_err(|e: String| Failure::Usage(anyhow!(e)))?;
                out.push(tag);
            }
            Ok(out)
        }
        (None, None) => Ok(vec![StrategyTag::Op, StrategyTag::Ms, StrategyTag::Mrb]),
    }
}

#[allow(clippy::too_many_arguments)]
pub fn cmd_sweep(
    n_range: &str,
    k_range: Option<&str>,
    losses: Option<&str>,
    strategy: Option<StrategyTag>,
    strategies: Option<&str>,
    mode: Arithmetic,
    epsilon: Option<&Rat>,
    output: Option<&Path>,
    jobs: usize,
) -> CmdResult {
    let (n_lo, n_hi) = parse_range(n_range).or_else(usage)?;
    let tags = strategy_list(strategy, strategies)?;
    let mut cells: Vec<(u32, u32)> = Vec::new();
    match (k_range, losses) {
        (Some(_), Some(_)) => return usage(anyhow!("pass either --k or --losses, not both")),
        (None, None) => return usage(anyhow!("pass --k or --losses")),
        (Some(kr), None) => {
            let (k_lo, k_hi) = parse_range(kr).or_else(usage)?;
            for n in n_lo..=n_hi {
                for k in k_lo..=k_hi {
                    cells.push((n, k));
                }
            }
        }
        (None, Some(lr)) => {
            let (c_lo, c_hi) = parse_range(lr).or_else(usage)?;
            for n in n_lo..=n_hi {
                for c in c_lo..=c_hi {
                    if c >= n {
                        return usage(anyhow!("loss count {c} is not below n = {n}"));
                    }
                    cells.push((n, n - c));
                }
            }
        }
    }
    // Validate every cell up front so bad ranges fail before any solving.
    for &(n, k) in &cells {
        make_spec(n, k, &Rat::from_integer(1.into()))?;
    }

    let jobs = jobs.max(1);
    let unit = Rat::from_integer(1.into());
    let task = |&(n, k): &(u32, u32)| -> Result<Vec<ComparisonRow>, Failure> {
        let spec = make_spec(n, k, &unit)?;
        let mut rows = Vec::new();
        for &tag in &tags {
            let plan = compute_plan(&spec, tag, mode, epsilon)?;
            rows.push(ComparisonRow::from_plan(&plan));
        }
        Ok(rows)
    };
    let mut results: Vec<Option<Result<Vec<ComparisonRow>, Failure>>> =
        (0..cells.len()).map(|_| None).collect();
    if jobs == 1 {
        for (slot, cell) in results.iter_mut().zip(&cells) {
            *slot = Some(task(cell));
        }
    } else {
        // Fixed round-robin assignment; output order comes from the slot
        // index, not completion order.
        std::thread::scope(|scope| {
            let mut handles = Vec::new();
            for worker in 0..jobs {
                let cells = &cells;
                let task = &task;
                handles.push(scope.spawn(move || {
                    let mut mine = Vec::new();
                    for (idx, cell) in cells.iter().enumerate() {
                        if idx % jobs == worker {
                            mine.push((idx, task(cell)));
                        }
                    }
                    mine
                }));
            }
            for handle in handles {
                for (idx, res) in handle.join().expect("worker panicked") {
                    results[idx] = Some(res);
                }
            }
        });
    }

    let mut rows: Vec<ComparisonRow> = Vec::new();
    for slot in results {
        rows.extend(slot.expect("every cell computed")?);
    }

    let gamma_lo = cells.iter().map(|&(_, k)| k + 1).min().unwrap_or(2);
    let gamma_hi = cells.iter().map(|&(n, _)| n).max().unwrap_or(2);
    let mut csv = String::from("n,k,strategy,delta,delta_dec,sigma,sigma_dec,rho,rho_dec");
    for s in gamma_lo..=gamma_hi {
        let _ = write!(csv, ",gamma_{s},gamma_{s}_dec");
    }
    csv.push('\n');
    for row in &rows {
        let _ = write!(
            csv,
            "{},{},{},{},{},{},{},{},{}",
            row.spec.n(),
            row.spec.k(),
            row.strategy,
            format_rational(&row.delta),
            format_decimal(&row.delta),
            format_rational(&row.sigma),
            format_decimal(&row.sigma),
            format_rational(&row.rho),
            format_decimal(&row.rho),
        );
        for s in gamma_lo..=gamma_hi {
            match row.gamma.get(&s) {
                Some(g) => {
                    let _ = write!(csv, ",{},{}", format_rational(g), format_decimal(g));
                }
                None => csv.push_str(",,"),
            }
        }
        csv.push('\n');
    }
    write_output(output, &csv)
}

pub fn cmd_verify(plan_path: &Path, oracle: bool) -> CmdResult {
    let text = match fs::read_to_string(plan_path) {
        Ok(t) => t,
        Err(e) => return usage(anyhow!("reading {}: {e}", plan_path.display())),
    };
    let plan = plan_json::parse(&text).or_else(usage)?;
    let spec = plan.spec();
    let report = check_feasible(&plan);
    println!(
        "checked {} cut constraints plus storage/transmission bounds",
        report.cuts_checked
    );
    for v in &report.violations {
        println!(
            "violated: {} (slack {})",
            v.constraint,
            format_rational(&v.slack)
        );
    }
    let mut feasible = report.is_feasible();
    if oracle {
        for m in spec.k()..spec.n() {
            let net = match build_flow_network(&plan, m) {
                Ok(net) => net,
                Err(e) => return internal(anyhow!("building stage-{m} network: {e}")),
            };
            let cut = min_cut(&net);
            let ok = cut >= *spec.data_size();
            println!(
                "oracle stage {m}: min-cut {} {}",
                format_both(&cut),
                if ok { "(covers M)" } else { "(below M)" }
            );
            feasible &= ok;
        }
    }
    if feasible {
        println!("feasible");
        Ok(())
    } else {
        println!("infeasible");
        Err(Failure::CheckFailed)
    }
}

#[allow(clippy::too_many_arguments)]
pub fn cmd_simulate(
    plan_path: Option<&Path>,
    n: Option<u32>,
    k: Option<u32>,
    strategy: Option<StrategyTag>,
    trials: u64,
    seed: u64,
    field: u32,
    max_packets: u64,
) -> CmdResult {
    let plan = load_or_plan(plan_path, n, k, strategy)?;
    let order = match field {
        256 => FieldOrder::Gf256,
        65536 => FieldOrder::Gf65536,
        other => return usage(anyhow!("field must be 256 or 65536, got {other}")),
    };
    let pp = match packetize(&plan, max_packets) {
        Ok(pp) => pp,
        Err(e) => return usage(anyhow!("{e}")),
    };
    if !pp.is_exact() {
        eprintln!(
            "note: packet count {} required rounding up (plan denominators exceed --max-packets); \
             the run over-provisions slightly",
            pp.packet_count()
        );
    }
    let summary = run_batch(&pp, trials, seed, order);
    let ranks: Vec<String> = summary
        .per_epoch_min_rank
        .iter()
        .map(|(m, r)| format!("    \"{m}\": {r}"))
        .collect();
    println!("{{");
    println!("  \"G\": {},", pp.packet_count());
    println!("  \"exact_packetization\": {},", pp.is_exact());
    println!("  \"field\": {field},");
    println!("  \"base_seed\": {seed},");
    println!("  \"trials\": {},", summary.trials);
    println!("  \"successes\": {},", summary.successes);
    if ranks.is_empty() {
        println!("  \"per_epoch_min_rank\": {{}},");
    } else {
        println!("  \"per_epoch_min_rank\": {{");
        println!("{}", ranks.join(",\n"));
        println!("  }},");
    }
    println!(
        "  \"traffic_per_trial\": \"{}\"",
        format_rational(&summary.traffic_per_trial)
    );
    println!("}}");
    Ok(())
}

fn load_or_plan(
    plan_path: Option<&Path>,
    n: Option<u32>,
    k: Option<u32>,
    strategy: Option<StrategyTag>,
) -> Result<ProtectionPlan, Failure> {
    match (plan_path, n, k) {
        (Some(path), None, None) => {
            let text = match fs::read_to_string(path) {
                Ok(t) => t,
                Err(e) => return usage(anyhow!("reading {}: {e}", path.display())),
            };
            plan_json::parse(&text).or_else(usage)
        }
        (None, Some(n), Some(k)) => {
            let spec = make_spec(n, k, &Rat::from_integer(1.into()))?;
            compute_plan(
                &spec,
                strategy.unwrap_or(StrategyTag::Op),
                Arithmetic::Exact,
                None,
            )
        }
        _ => usage(anyhow!("pass --plan FILE, or --n and --k (with optional --strategy)")),
    }
}

pub fn cmd_constraints(
    n: u32,
    k: u32,
    stage: Option<u32>,
    output: Option<&Path>,
    cut_warn_limit: u128,
) -> CmdResult {
    let spec = make_spec(n, k, &Rat::from_integer(1.into()))?;
    warn_if_huge(&spec, cut_warn_limit);
    let cuts = match stage {
        Some(m) => match enumerate_stage_cuts(&spec, m) {
            Ok(c) => c,
            Err(e) => return usage(anyhow!("{e}")),
        },
        None => enumerate_all_cuts(&spec),
    };
    let mut csv = String::from("m");
    for p in (k..=n).rev() {
        let _ = write!(csv, ",j_{p}");
    }
    for q in (k + 1..=n).rev() {
        let _ = write!(csv, ",l_{q}");
    }
    csv.push('\n');
    for cut in &cuts {
        let _ = write!(csv, "{}", cut.stage());
        for p in (k..=n).rev() {
            if p >= cut.stage() {
                let _ = write!(csv, ",{}", cut.j_at(p));
            } else {
                csv.push(',');
            }
        }
        for q in (k + 1..=n).rev() {
            if q > cut.stage() {
                let _ = write!(csv, ",{}", cut.l_at(q));
            } else {
                csv.push(',');
            }
        }
        csv.push('\n');
    }
    write_output(output, &csv)
}

#[allow(clippy::too_many_arguments)]
pub fn cmd_graph(
    plan_path: Option<&Path>,
    n: Option<u32>,
    k: Option<u32>,
    strategy: Option<StrategyTag>,
    stage: u32,
    dot_format: bool,
    output: Option<&Path>,
) -> CmdResult {
    let plan = load_or_plan(plan_path, n, k, strategy)?;
    let net = match build_flow_network(&plan, stage) {
        Ok(net) => net,
        Err(e) => return usage(anyhow!("{e}")),
    };
    if dot_format {
        write_output(output, &dot::render(&net))
    } else {
        let finite = net
            .arcs()
            .iter()
            .filter(|a| matches!(a.capacity, dwindle_core::flowgraph::Capacity::Finite(_)))
            .count();
        println!(
            "stage {stage}: {} vertices, {} arcs ({} finite), min-cut {}",
            net.vertices().len(),
            net.arcs().len(),
            finite,
            format_both(&min_cut(&net))
        );
        Ok(())
    }
}

pub fn output_path(o: &Option<PathBuf>) -> Option<&Path> {
    o.as_deref()
}
