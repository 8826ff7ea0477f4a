//! The plan file format: a JSON object with exact rationals as strings.
//!
//! ```json
//! {
//!   "n": 6,
//!   "k": 4,
//!   "M": "1",
//!   "strategy": "op",
//!   "alpha": { "4": "1/4", "5": "1/4", "6": "1/6" },
//!   "beta": { "5": "0", "6": "1/24" }
//! }
//! ```
//!
//! The emitter writes stages in numeric order with fixed indentation, so
//! emit(parse(emit(p))) is byte-identical to emit(p).

use std::collections::BTreeMap;
use std::fmt::Write as _;

use anyhow::{anyhow, bail, Context, Result};
use dwindle_core::model::{ProblemSpec, ProtectionPlan, StrategyTag};
use dwindle_core::Rat;

use crate::format::{format_rational, parse_rational};

pub fn emit(plan: &ProtectionPlan) -> String {
    let spec = plan.spec();
    let mut out = String::from("{\n");
    let _ = writeln!(out, "  \"n\": {},", spec.n());
    let _ = writeln!(out, "  \"k\": {},", spec.k());
    let _ = writeln!(out, "  \"M\": \"{}\",", format_rational(spec.data_size()));
    let _ = writeln!(out, "  \"strategy\": \"{}\",", plan.strategy());
    let map_block = |name: &str, entries: &BTreeMap<u32, Rat>, last: bool| {
        let mut block = format!("  \"{name}\": {{\n");
        let total = entries.len();
        for (i, (stage, value)) in entries.iter().enumerate() {
            let comma = if i + 1 < total { "," } else { "" };
            let _ = writeln!(block, "    \"{stage}\": \"{}\"{comma}", format_rational(value));
        }
        block.push_str(if last { "  }\n" } else { "  },\n" });
        block
    };
    out.push_str(&map_block("alpha", plan.alpha_profile(), false));
    out.push_str(&map_block("beta", plan.beta_profile(), true));
    out.push('}');
    out.push('\n');
    out
}

fn rational_map(value: &serde_json::Value, field: &str) -> Result<BTreeMap<u32, Rat>> {
    let obj = value
        .get(field)
        .and_then(|v| v.as_object())
        .ok_or_else(|| anyhow!("missing object field '{field}'"))?;
    let mut out = BTreeMap::new();
    for (key, val) in obj {
        let stage: u32 = key
            .parse()
            .with_context(|| format!("bad stage index '{key}' in '{field}'"))?;
        let s = val
            .as_str()
            .ok_or_else(|| anyhow!("'{field}.{key}' must be a rational string"))?;
        out.insert(stage, parse_rational(s)?);
    }
    Ok(out)
}

pub fn parse(text: &str) -> Result<ProtectionPlan> {
    let value: serde_json::Value = serde_json::from_str(text).context("plan file is not JSON")?;
    let n = value
        .get("n")
        .and_then(|v| v.as_u64())
        .ok_or_else(|| anyhow!("missing integer field 'n'"))? as u32;
    let k = value
        .get("k")
        .and_then(|v| v.as_u64())
        .ok_or_else(|| anyhow!("missing integer field 'k'"))? as u32;
    let m = match value.get("M") {
        Some(v) => parse_rational(
            v.as_str()
                .ok_or_else(|| anyhow!("'M' must be a rational string"))?,
        )?,
        None => Rat::from_integer(1.into()),
    };
    let strategy: StrategyTag = match value.get("strategy") {
        Some(v) => v
            .as_str()
            .ok_or_else(|| anyhow!("'strategy' must be a string"))?
            .parse()
            .map_err(|e: String| anyhow!(e))?,
        None => StrategyTag::Custom,
    };
    let spec = ProblemSpec::new(n, k, m).map_err(|e| anyhow!("invalid problem: {e}"))?;
    let alpha = rational_map(&value, "alpha")?;
    let beta = rational_map(&value, "beta")?;
    match ProtectionPlan::new(spec, alpha, beta, strategy) {
        Ok(plan) => Ok(plan),
        Err(e) => bail!("invalid plan: {e}"),
    }
}
