use std::f64::consts::PI;

use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

/// Snap distance for symbolic time annotations.
const SYMBOLIC_TOL: f64 = 1e-9;
const SYMBOLIC_MAX: u64 = 64;

#[derive(Debug)]
pub struct Report {
    pub command: String,
    pub argv: Vec<String>,
    pub input: Value,
    pub input_digest: String,
    pub payload: Value,
    pub tolerances: Map<String, Value>,
    pub warnings: Vec<String>,
    pub outputs: Vec<String>,
}

impl Report {
    /// Keys come out sorted because `serde_json::Map` is ordered.
    pub fn to_json(&self) -> Value {
        json!({
            "command": self.command,
            "argv": self.argv,
            "input": self.input,
            "input_digest": self.input_digest,
            "version": env!("CARGO_PKG_VERSION"),
            "payload": self.payload,
            "tolerances": self.tolerances,
            "warnings": self.warnings,
            "outputs": self.outputs,
        })
    }
}

pub fn digest(canonical: &str) -> String {
    format!("sha256:{:x}", Sha256::digest(canonical.as_bytes()))
}

/// `π·p/q` with `p, q ≤ 64`, or `π/√k` with `k ≤ 64`, when `t` is within
/// the snap tolerance.
pub fn symbolic_time(t: f64) -> Option<String> {
    if t.abs() <= SYMBOLIC_TOL {
        return Some("0".into());
    }
    if t < 0.0 {
        return symbolic_time(-t).map(|s| format!("-{s}"));
    }
    for q in 1..=SYMBOLIC_MAX {
        let p = (t * q as f64 / PI).round() as u64;
        if p == 0 || p > SYMBOLIC_MAX || gcd(p, q) != 1 {
            continue;
        }
        if (t - PI * p as f64 / q as f64).abs() <= SYMBOLIC_TOL {
            return Some(match (p, q) {
                (1, 1) => "π".into(),
                (p, 1) => format!("{p}π"),
                (1, q) => format!("π/{q}"),
                (p, q) => format!("{p}π/{q}"),
            });
        }
    }
    (2..=SYMBOLIC_MAX)
        .filter(|k| {
            let r = (*k as f64).sqrt().round() as u64;
            r * r != *k
        })
        .find(|&k| (t - PI / (k as f64).sqrt()).abs() <= SYMBOLIC_TOL)
        .map(|k| format!("π/√{k}"))
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Twelve significant digits in plain decimal.
pub fn display(t: f64) -> String {
    if t == 0.0 || !t.is_finite() {
        return format!("{t}");
    }
    let decimals = (11 - t.abs().log10().floor() as i32).max(0) as usize;
    format!("{t:.decimals$}")
}

pub fn time_value(t: f64) -> Value {
    json!({
        "value": t,
        "display": display(t),
        "symbolic": symbolic_time(t),
    })
}
