//! Line-oriented text formats for instances, auction results and oracle
//! results.
//!
//! ```text
//! verum-instance v1 n=3 C=2 seed=7
//! adj 0: 1 2
//! avail 0 11
//! vals 0 13 8
//! pos 0 12.5 3
//! ```
//!
//! Every bidder has exactly one `adj`, `avail` and `vals` line; `pos` lines
//! are optional. Blank lines and lines starting with `#` are ignored.

use std::fmt::Write as _;

use crate::assign::Assignment;
use crate::auction::Outcome;
use crate::bidder::{BidderProfiles, Price, ValuationVector};
use crate::channels::ChannelSet;
use crate::error::{Error, Result};
use crate::oracle::OracleResult;
use crate::scenario::{ConflictGraph, Instance, Point};
use crate::units::{Amount, SCALE};

const INSTANCE_MAGIC: &str = "verum-instance v1";
const RESULT_MAGIC: &str = "verum-result v1";
const ORACLE_MAGIC: &str = "verum-oracle v1";

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

/// `key=value` pairs after a header's magic prefix.
fn header_fields<'a>(line: &'a str, magic: &str) -> Result<Vec<(&'a str, &'a str)>> {
    let rest = line.strip_prefix(magic).ok_or_else(|| parse_err(1, format!("expected header `{magic}`")))?;
    rest.split_whitespace()
        .map(|kv| kv.split_once('=').ok_or_else(|| parse_err(1, format!("bad header field {kv:?}"))))
        .collect()
}

fn field<'a>(fields: &[(&str, &'a str)], key: &str) -> Result<&'a str> {
    fields.iter().find(|(k, _)| *k == key).map(|(_, v)| *v).ok_or_else(|| parse_err(1, format!("missing {key}")))
}

fn num<T: std::str::FromStr>(s: &str, line: usize) -> Result<T> {
    s.parse().map_err(|_| parse_err(line, format!("not a number: {s:?}")))
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().map(|(n, l)| (n + 1, l.trim())).filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn join<T: std::fmt::Display>(items: impl IntoIterator<Item = T>, sep: &str) -> String {
    let mut out = String::new();
    for (n, x) in items.into_iter().enumerate() {
        if n > 0 {
            out.push_str(sep);
        }
        let _ = write!(out, "{x}");
    }
    out
}

pub fn write_instance(instance: &Instance) -> String {
    let g = &instance.graph;
    let mut out = format!("{INSTANCE_MAGIC} n={} C={} seed={}\n", g.len(), g.channels(), instance.seed);
    for i in 0..g.len() {
        let _ = writeln!(out, "adj {i}: {}", join(g.neighbors(i), " "));
    }
    for i in 0..g.len() {
        let _ = writeln!(out, "avail {i} {}", g.availability(i).to_bitstring(g.channels()));
    }
    for i in 0..g.len() {
        let vals = instance.profiles.get(i).values();
        if vals.is_empty() {
            let _ = writeln!(out, "vals {i}");
        } else {
            let _ = writeln!(out, "vals {i} {}", join(vals, " "));
        }
    }
    for (i, p) in g.positions().iter().enumerate() {
        let _ = writeln!(out, "pos {i} {} {}", p.x, p.y);
    }
    out
}

pub fn parse_instance(text: &str) -> Result<Instance> {
    let mut lines = content_lines(text);
    let (_, header) = lines.next().ok_or_else(|| parse_err(1, "empty instance"))?;
    let fields = header_fields(header, INSTANCE_MAGIC)?;
    let n: usize = num(field(&fields, "n")?, 1)?;
    let channels: usize = num(field(&fields, "C")?, 1)?;
    let seed: u64 = num(field(&fields, "seed")?, 1)?;

    let mut adjacency: Vec<Option<Vec<usize>>> = vec![None; n];
    let mut availability: Vec<Option<ChannelSet>> = vec![None; n];
    let mut values: Vec<Option<ValuationVector>> = vec![None; n];
    let mut positions = vec![Point::default(); n];
    for (ln, line) in lines {
        let mut words = line.split_whitespace();
        let kind = words.next().unwrap_or_default();
        let id_word = words.next().ok_or_else(|| parse_err(ln, "missing bidder id"))?;
        let i: usize = num(id_word.trim_end_matches(':'), ln)?;
        if i >= n {
            return Err(parse_err(ln, format!("bidder {i} out of range")));
        }
        let rest: Vec<&str> = words.collect();
        let dup = || parse_err(ln, format!("duplicate {kind} line for bidder {i}"));
        match kind {
            "adj" => {
                let list = rest.iter().map(|w| num(w, ln)).collect::<Result<Vec<usize>>>()?;
                if adjacency[i].replace(list).is_some() {
                    return Err(dup());
                }
            }
            "avail" => {
                let bits = rest.first().copied().unwrap_or("");
                if bits.len() != channels {
                    return Err(parse_err(ln, format!("availability needs {channels} bits")));
                }
                let set = ChannelSet::parse_bitstring(bits).ok_or_else(|| parse_err(ln, "bad bitstring"))?;
                if availability[i].replace(set).is_some() {
                    return Err(dup());
                }
            }
            "vals" => {
                let list = rest.iter().map(|w| num(w, ln)).collect::<Result<Vec<Price>>>()?;
                let v = ValuationVector::new(list).map_err(|e| parse_err(ln, e.to_string()))?;
                if values[i].replace(v).is_some() {
                    return Err(dup());
                }
            }
            "pos" => {
                let [x, y] = rest[..] else {
                    return Err(parse_err(ln, "pos needs two coordinates"));
                };
                positions[i] = Point::new(num(x, ln)?, num(y, ln)?);
            }
            other => return Err(parse_err(ln, format!("unknown record {other:?}"))),
        }
    }
    let missing = |what: &str, i: usize| Error::Instance(format!("no {what} line for bidder {i}"));
    let adjacency = adjacency.into_iter().enumerate().map(|(i, a)| a.ok_or_else(|| missing("adj", i))).collect::<Result<_>>()?;
    let availability =
        availability.into_iter().enumerate().map(|(i, a)| a.ok_or_else(|| missing("avail", i))).collect::<Result<_>>()?;
    let values = values.into_iter().enumerate().map(|(i, v)| v.ok_or_else(|| missing("vals", i))).collect::<Result<_>>()?;
    let graph = ConflictGraph::new(channels, adjacency, availability, positions)?;
    Instance::new(seed, graph, BidderProfiles::new(values))
}

/// Auction outcome as read back from a result file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResultFile {
    pub mechanism: String,
    pub seed: u64,
    pub revenue: Amount,
    pub rounds: u32,
    pub counts: Vec<u32>,
    pub payments: Vec<Amount>,
    pub assignment: Assignment,
    pub log: Vec<String>,
}

fn amount_str(a: Amount) -> String {
    format!("{}.{:04}", a.raw() / SCALE, a.raw() % SCALE)
}

fn parse_amount(s: &str, line: usize) -> Result<Amount> {
    let (whole, frac) = s.split_once('.').unwrap_or((s, "0"));
    if frac.len() > 4 {
        return Err(parse_err(line, format!("too many decimals in {s:?}")));
    }
    let whole: u64 = num(whole, line)?;
    let frac: u64 = num(&format!("{frac:0<4}"), line)?;
    Ok(Amount::from_raw(whole * SCALE + frac))
}

pub fn write_result(outcome: &Outcome, graph: &ConflictGraph, mechanism: &str, seed: u64) -> String {
    let mut out = format!(
        "{RESULT_MAGIC} mechanism={mechanism} n={} C={} seed={seed} revenue={} rounds={}\n",
        graph.len(),
        graph.channels(),
        amount_str(outcome.revenue),
        outcome.rounds
    );
    for i in 0..graph.len() {
        let _ = writeln!(
            out,
            "bidder {i} count={} pay={} channels={}",
            outcome.counts[i],
            amount_str(outcome.payments[i]),
            join(outcome.assignment.get(i).iter(), ",")
        );
    }
    for k in 0..graph.channels() {
        let _ = writeln!(out, "channel {k} holders={}", join(outcome.assignment.holders(k), ","));
    }
    for record in &outcome.log {
        out.push_str(&record.to_line());
        out.push('\n');
    }
    out
}

fn id_list(s: &str, line: usize) -> Result<Vec<usize>> {
    if s.is_empty() {
        return Ok(Vec::new());
    }
    s.split(',').map(|w| num(w, line)).collect()
}

fn kv<'a>(word: Option<&'a str>, key: &str, line: usize) -> Result<&'a str> {
    word.and_then(|w| w.strip_prefix(key)).and_then(|w| w.strip_prefix('=')).ok_or_else(|| parse_err(line, format!("expected {key}=")))
}

pub fn parse_result(text: &str) -> Result<ResultFile> {
    let mut lines = content_lines(text);
    let (_, header) = lines.next().ok_or_else(|| parse_err(1, "empty result"))?;
    let fields = header_fields(header, RESULT_MAGIC)?;
    let n: usize = num(field(&fields, "n")?, 1)?;
    let mut result = ResultFile {
        mechanism: field(&fields, "mechanism")?.to_string(),
        seed: num(field(&fields, "seed")?, 1)?,
        revenue: parse_amount(field(&fields, "revenue")?, 1)?,
        rounds: num(field(&fields, "rounds")?, 1)?,
        counts: vec![0; n],
        payments: vec![Amount::ZERO; n],
        assignment: Assignment::empty(n),
        log: Vec::new(),
    };
    for (ln, line) in lines {
        if line.starts_with("round=") {
            result.log.push(line.to_string());
            continue;
        }
        let mut words = line.split_whitespace();
        match words.next() {
            Some("bidder") => {
                let i: usize = num(words.next().unwrap_or_default(), ln)?;
                if i >= n {
                    return Err(parse_err(ln, format!("bidder {i} out of range")));
                }
                result.counts[i] = num(kv(words.next(), "count", ln)?, ln)?;
                result.payments[i] = parse_amount(kv(words.next(), "pay", ln)?, ln)?;
                for k in id_list(kv(words.next(), "channels", ln)?, ln)? {
                    result.assignment.insert(i, k);
                }
            }
            Some("channel") => {}
            _ => return Err(parse_err(ln, "unknown record")),
        }
    }
    Ok(result)
}

pub fn write_oracle_result(result: &OracleResult, objective: &str) -> String {
    let a = &result.best_assignment;
    let mut out = format!(
        "{ORACLE_MAGIC} objective={objective} n={} best_value={} enumerated={}\n",
        a.len(),
        amount_str(result.best_value),
        result.enumerated_count
    );
    for i in 0..a.len() {
        let _ = writeln!(out, "assign {i} channels={}", join(a.get(i).iter(), ","));
    }
    out
}

pub fn parse_oracle_result(text: &str) -> Result<OracleResult> {
    let mut lines = content_lines(text);
    let (_, header) = lines.next().ok_or_else(|| parse_err(1, "empty oracle result"))?;
    let fields = header_fields(header, ORACLE_MAGIC)?;
    let n: usize = num(field(&fields, "n")?, 1)?;
    let mut assignment = Assignment::empty(n);
    for (ln, line) in lines {
        let mut words = line.split_whitespace();
        if words.next() != Some("assign") {
            return Err(parse_err(ln, "unknown record"));
        }
        let i: usize = num(words.next().unwrap_or_default(), ln)?;
        if i >= n {
            return Err(parse_err(ln, format!("bidder {i} out of range")));
        }
        for k in id_list(kv(words.next(), "channels", ln)?, ln)? {
            assignment.insert(i, k);
        }
    }
    Ok(OracleResult {
        best_value: parse_amount(field(&fields, "best_value")?, 1)?,
        best_assignment: assignment,
        enumerated_count: num(field(&fields, "enumerated")?, 1)?,
    })
}
