//! The line-oriented `MUCA 1` instance file format.
//!
//! ```text
//! MUCA 1
//! SCALE d          # optional, default 0
//! GOODS n
//! CAPS k_1 ... k_n
//! BIDS m
//! BID q_1 ... q_n p    # m times
//! EXCL i j             # zero or more, 0-based bid indices
//! ```
//!
//! `#` starts a comment; blank lines are ignored.

use std::fmt::Write as _;

use thiserror::Error;

use crate::model::{format_decimal, parse_decimal, Bid, Instance, Violation, MAX_SCALE};

#[derive(Debug, Error, PartialEq, Eq)]
#[error("line {line}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

fn err<T>(line: usize, message: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError {
        line,
        message: message.into(),
    })
}

fn number(line: usize, tok: &str, what: &str) -> Result<u64, ParseError> {
    if tok.starts_with('-') {
        return err(line, format!("negative {what} '{tok}'"));
    }
    tok.parse::<u64>().or_else(|e| {
        use std::num::IntErrorKind::*;
        match e.kind() {
            PosOverflow => err(line, format!("{what} '{tok}' overflows")),
            _ => err(line, format!("malformed {what} '{tok}'")),
        }
    })
}

/// Parses and validates an instance file. Errors carry 1-based line numbers.
pub fn parse_instance(text: &str) -> Result<Instance, ParseError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty())
        .map(|(i, l)| (i, l.split_whitespace().collect::<Vec<_>>()))
        .peekable();
    let last_line = text.lines().count().max(1);

    let mut next = |expect: &str| -> Result<(usize, Vec<&str>), ParseError> {
        match lines.next() {
            Some(x) => Ok(x),
            None => err(last_line, format!("unexpected end of file, expected {expect}")),
        }
    };

    let (line, toks) = next("MUCA header")?;
    if toks != ["MUCA", "1"] {
        return err(line, "malformed header: expected 'MUCA 1'");
    }

    let (mut line, mut toks) = next("GOODS")?;
    let mut scale = 0u32;
    if toks[0] == "SCALE" {
        if toks.len() != 2 {
            return err(line, "SCALE takes exactly one value");
        }
        let s = number(line, toks[1], "scale")?;
        if s > MAX_SCALE as u64 {
            return err(line, format!("scale {s} exceeds the maximum of {MAX_SCALE}"));
        }
        scale = s as u32;
        (line, toks) = next("GOODS")?;
    }

    if toks[0] != "GOODS" || toks.len() != 2 {
        return err(line, "malformed header: expected 'GOODS n'");
    }
    let goods = number(line, toks[1], "good count")? as usize;
    if goods == 0 {
        return err(line, "instance must have at least one good");
    }

    let (line, toks) = next("CAPS")?;
    if toks[0] != "CAPS" {
        return err(line, "malformed header: expected 'CAPS k_1 ... k_n'");
    }
    if toks.len() != goods + 1 {
        return err(
            line,
            format!("CAPS lists {} capacities, expected {goods}", toks.len() - 1),
        );
    }
    let caps = toks[1..]
        .iter()
        .map(|t| number(line, t, "capacity"))
        .collect::<Result<Vec<_>, _>>()?;
    if let Some(j) = caps.iter().position(|&k| k == 0) {
        return err(line, format!("capacity must be ≥ 1 (good {j})"));
    }
    if caps.iter().try_fold(0u64, |a, &k| a.checked_add(k)).is_none() {
        return err(line, "sum of capacities overflows");
    }

    let (line, toks) = next("BIDS")?;
    if toks[0] != "BIDS" || toks.len() != 2 {
        return err(line, "malformed header: expected 'BIDS m'");
    }
    let count = number(line, toks[1], "bid count")? as usize;

    let mut bids = Vec::with_capacity(count.min(1 << 16));
    let mut price_total = 0u64;
    for b in 0..count {
        let (line, toks) = next("BID")?;
        if toks[0] != "BID" {
            return err(line, format!("expected BID line {} of {count}", b + 1));
        }
        if toks.len() != goods + 2 {
            return err(
                line,
                format!(
                    "BID has {} fields, expected {} quantities and a price",
                    toks.len() - 1,
                    goods
                ),
            );
        }
        let qty = toks[1..=goods]
            .iter()
            .map(|t| number(line, t, "quantity"))
            .collect::<Result<Vec<_>, _>>()?;
        if let Some(j) = (0..goods).find(|&j| qty[j] > caps[j]) {
            return err(
                line,
                format!(
                    "quantity exceeds capacity (good {j}: {} > {})",
                    qty[j], caps[j]
                ),
            );
        }
        if qty.iter().all(|&q| q == 0) {
            return err(line, "empty bid");
        }
        let price =
            parse_decimal(toks[goods + 1], scale).or_else(|m| err(line, m))?;
        price_total = match price_total.checked_add(price) {
            Some(t) => t,
            None => return err(line, "sum of prices overflows"),
        };
        bids.push(Bid::new(qty, price));
    }

    let mut exclusions = Vec::new();
    for (line, toks) in lines {
        if toks[0] != "EXCL" || toks.len() != 3 {
            return err(line, "expected 'EXCL i j'");
        }
        let a = number(line, toks[1], "bid index")? as usize;
        let b = number(line, toks[2], "bid index")? as usize;
        if a >= count || b >= count {
            return err(line, format!("bad exclusion index: only {count} bids"));
        }
        if a == b {
            return err(line, "bad exclusion index: a bid cannot exclude itself");
        }
        exclusions.push((a, b));
    }

    Instance::new(caps, bids, exclusions, scale).map_err(|v: Vec<Violation>| ParseError {
        line: last_line,
        message: v
            .iter()
            .map(ToString::to_string)
            .collect::<Vec<_>>()
            .join("; "),
    })
}

/// Canonical text form of an instance.
pub fn serialize_instance(inst: &Instance) -> String {
    let mut out = String::from("MUCA 1\n");
    if inst.scale > 0 {
        let _ = writeln!(out, "SCALE {}", inst.scale);
    }
    let _ = writeln!(out, "GOODS {}", inst.goods());
    let caps: Vec<String> = inst.caps.iter().map(u64::to_string).collect();
    let _ = writeln!(out, "CAPS {}", caps.join(" "));
    let _ = writeln!(out, "BIDS {}", inst.len());
    for bid in &inst.bids {
        out.push_str("BID");
        for q in &bid.qty {
            let _ = write!(out, " {q}");
        }
        let _ = writeln!(out, " {}", format_decimal(bid.price, inst.scale));
    }
    for (a, b) in &inst.exclusions {
        let _ = writeln!(out, "EXCL {a} {b}");
    }
    out
}
