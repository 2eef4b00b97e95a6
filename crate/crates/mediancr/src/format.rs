//! Text and JSON renderings of regions and numbers.
//!
//! Region text is a list of pieces such as `[1.5,2)` or `[-inf,3]` joined by
//! ` U `, with the empty region written `empty`. Endpoints use the shortest
//! decimal that round-trips to the same `f64`.

use mediancr_core::method::MethodOutput;
use mediancr_core::{Interval, Region};
use serde_json::{json, Value};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("malformed region text {0:?}")]
pub struct RegionParseError(pub String);

/// Shortest round-trip decimal, with `inf`, `-inf` and `NaN` tokens.
pub fn fmt_value(x: f64) -> String {
    if x == f64::INFINITY {
        "inf".into()
    } else if x == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        format!("{x}")
    }
}

/// Rounds to 10 significant digits and prints the shortest decimal of the result.
pub fn fmt_sig10(x: f64) -> String {
    if !x.is_finite() {
        return fmt_value(x);
    }
    let rounded: f64 = format!("{x:.9e}").parse().expect("formatted float parses");
    format!("{rounded}")
}

fn parse_value(token: &str) -> Option<f64> {
    match token.trim() {
        "inf" | "+inf" => Some(f64::INFINITY),
        "-inf" => Some(f64::NEG_INFINITY),
        t => t.parse::<f64>().ok().filter(|v| v.is_finite()),
    }
}

pub fn format_interval(i: &Interval) -> String {
    let close = if i.closed_hi { ']' } else { ')' };
    format!("[{},{}{close}", fmt_value(i.lo), fmt_value(i.hi))
}

pub fn format_region(region: &Region) -> String {
    if region.is_empty() {
        return "empty".into();
    }
    region.intervals().iter().map(format_interval).collect::<Vec<_>>().join(" U ")
}

pub fn parse_region(text: &str) -> Result<Region, RegionParseError> {
    let err = || RegionParseError(text.to_string());
    let text = text.trim();
    if text == "empty" {
        return Ok(Region::empty());
    }
    let mut pieces = Vec::new();
    for piece in text.split(" U ") {
        let piece = piece.trim();
        let body = piece.strip_prefix('[').ok_or_else(err)?;
        let (body, closed_hi) = if let Some(b) = body.strip_suffix(']') {
            (b, true)
        } else {
            (body.strip_suffix(')').ok_or_else(err)?, false)
        };
        let (lo, hi) = body.split_once(',').ok_or_else(err)?;
        let (lo, hi) = (parse_value(lo).ok_or_else(err)?, parse_value(hi).ok_or_else(err)?);
        pieces.push(Interval { lo, hi, closed_hi });
    }
    Ok(Region::from_intervals(pieces))
}

fn json_number(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        json!(fmt_value(x))
    }
}

fn region_intervals_json(region: &Region) -> Value {
    Value::Array(
        region
            .intervals()
            .iter()
            .map(|i| json!({"lo": json_number(i.lo), "hi": json_number(i.hi), "closed_hi": i.closed_hi}))
            .collect(),
    )
}

/// `{method, intervals: [{lo, hi, closed_hi}], content, u, flags}`; infinite
/// numbers appear as the strings `"inf"` and `"-inf"`. With `explain`, the
/// randomized methods also report `gamma`, the index sets and both branches.
pub fn output_json(out: &MethodOutput, explain: bool) -> Value {
    let mut obj = json!({
        "method": out.method.id(),
        "name": out.method.name(),
        "intervals": region_intervals_json(&out.region),
        "content": json_number(out.region.content()),
        "u": out.u.map_or(Value::Null, json_number),
        "flags": out.flags,
    });
    if let (true, Some(b)) = (explain, &out.branches) {
        let map = obj.as_object_mut().expect("object");
        map.insert("gamma".into(), json!(b.selection.gamma));
        map.insert("included".into(), json!(b.selection.included));
        map.insert("tie_set".into(), json!(b.selection.tie_set));
        map.insert("region_without_tie".into(), region_intervals_json(&b.without_tie));
        map.insert("region_with_tie".into(), region_intervals_json(&b.with_tie));
    }
    obj
}
