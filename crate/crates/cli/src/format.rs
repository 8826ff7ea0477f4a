//! Rendering and parsing of exact rationals, plus the plain-text LP dump.
//!
//! Human-facing output shows every rational twice: exact `p/q` and a
//! 12-digit decimal, so results can be checked bit-exactly and plotted
//! without a rational parser.

use anyhow::{bail, Context, Result};
use dwindle_core::lp::LinearProgram;
use dwindle_core::Rat;
use num_bigint::BigInt;
use num_traits::{Signed, Zero};

/// `p/q` in lowest terms; integers render without the slash.
pub fn format_rational(r: &Rat) -> String {
    if r.denom() == &BigInt::from(1) {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Fixed 12 fractional digits, round half away from zero. Deterministic and
/// byte-stable.
pub fn format_decimal(r: &Rat) -> String {
    let sign = if r.is_negative() { "-" } else { "" };
    let abs = r.abs();
    let scale = BigInt::from(10u64).pow(12);
    // round(p * 10^12 / q) = floor((2 p 10^12 + q) / (2 q))
    let scaled = abs.numer() * &scale;
    let rounded = (BigInt::from(2) * scaled + abs.denom()) / (BigInt::from(2) * abs.denom());
    let digits = rounded.to_string();
    let (int_part, frac_part) = if digits.len() <= 12 {
        ("0".to_string(), format!("{digits:0>12}"))
    } else {
        let split = digits.len() - 12;
        (digits[..split].to_string(), digits[split..].to_string())
    };
    format!("{sign}{int_part}.{frac_part}")
}

/// Both renderings, for log lines: `5/4 (1.250000000000)`.
pub fn format_both(r: &Rat) -> String {
    format!("{} ({})", format_rational(r), format_decimal(r))
}

/// Parses `p`, `-p`, or `p/q` into an exact rational.
pub fn parse_rational(s: &str) -> Result<Rat> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), Some(d.trim())),
        None => (s, None),
    };
    let numer: BigInt = num
        .parse()
        .with_context(|| format!("invalid rational '{s}'"))?;
    let denom: BigInt = match den {
        Some(d) => d
            .parse()
            .with_context(|| format!("invalid rational '{s}'"))?,
        None => BigInt::from(1),
    };
    if denom.is_zero() {
        bail!("invalid rational '{s}': zero denominator");
    }
    Ok(Rat::new(numer, denom))
}

/// Inclusive `a..b` range, or a single value meaning `a..a`.
pub fn parse_range(s: &str) -> Result<(u32, u32)> {
    if let Some((lo, hi)) = s.split_once("..") {
        let lo: u32 = lo.trim().parse().with_context(|| format!("bad range '{s}'"))?;
        let hi: u32 = hi.trim().parse().with_context(|| format!("bad range '{s}'"))?;
        if lo > hi {
            bail!("bad range '{s}': start exceeds end");
        }
        Ok((lo, hi))
    } else {
        let v: u32 = s.trim().parse().with_context(|| format!("bad range '{s}'"))?;
        Ok((v, v))
    }
}

/// Plain-text rows `coef*var + ... >= rhs` for external cross-checking.
pub fn render_lp(lp: &LinearProgram) -> String {
    let mut out = String::new();
    let term = |coef: &Rat, var: &str| format!("{}*{}", format_rational(coef), var);
    let mut objective = String::from("min:");
    let mut first = true;
    for (coef, var) in lp.objective().iter().zip(lp.variables()) {
        if coef.is_zero() {
            continue;
        }
        objective.push_str(if first { " " } else { " + " });
        objective.push_str(&term(coef, var));
        first = false;
    }
    if !lp.objective_constant().is_zero() {
        objective.push_str(if first { " " } else { " + " });
        objective.push_str(&format_rational(lp.objective_constant()));
    } else if first {
        objective.push_str(" 0");
    }
    out.push_str(&objective);
    out.push('\n');
    for c in lp.constraints() {
        let mut line = String::new();
        let mut first = true;
        for (coef, var) in c.coefficients.iter().zip(lp.variables()) {
            if coef.is_zero() {
                continue;
            }
            if !first {
                line.push_str(" + ");
            }
            line.push_str(&term(coef, var));
            first = false;
        }
        if first {
            line.push('0');
        }
        line.push_str(&format!(" {} {}", c.relation, format_rational(&c.rhs)));
        out.push_str(&line);
        out.push('\n');
    }
    out
}
