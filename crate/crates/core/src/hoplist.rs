//! The hop-list text format shared by every tool:
//!
//! ```text
//! d=3 q=2
//! # comments start with '#'
//! 1
//! 2
//! 4
//! 7
//! ```
//!
//! Hops are hex without a `0x` prefix, one per line, order-significant.

use std::path::Path;

use crate::error::{io_err, LhError, Result};
use crate::graph::GeneratorSet;

pub fn parse(text: &str) -> Result<GeneratorSet> {
    let mut dim = None;
    let mut hops = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        match dim {
            None => dim = Some(parse_header(line, line_no)?),
            Some(_) => {
                let h = u32::from_str_radix(line, 16).map_err(|e| LhError::Parse {
                    line: line_no,
                    msg: format!("bad hex hop {line:?}: {e}"),
                })?;
                hops.push(h);
            }
        }
    }
    let dim = dim.ok_or(LhError::Parse {
        line: 0,
        msg: "missing `d=<int> q=2` header".into(),
    })?;
    GeneratorSet::new(dim, hops)
}

fn parse_header(line: &str, line_no: usize) -> Result<u32> {
    let err = |msg: String| LhError::Parse { line: line_no, msg };
    let mut dim = None;
    let mut q = None;
    for field in line.split_whitespace() {
        match field.split_once('=') {
            Some(("d", v)) => {
                dim = Some(v.parse::<u32>().map_err(|e| err(format!("bad d: {e}")))?)
            }
            Some(("q", v)) => q = Some(v.to_string()),
            _ => return Err(err(format!("unexpected header field {field:?}"))),
        }
    }
    match q.as_deref() {
        Some("2") => {}
        Some(other) => return Err(err(format!("only q=2 is supported, got q={other}"))),
        None => return Err(err("header lacks q=2".into())),
    }
    dim.ok_or_else(|| err("header lacks d=<int>".into()))
}

pub fn render(set: &GeneratorSet) -> String {
    let mut out = format!("d={} q=2\n", set.dim());
    for h in set.hops() {
        out.push_str(&format!("{h:X}\n"));
    }
    out
}

pub fn read(path: &Path) -> Result<GeneratorSet> {
    let text = std::fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    parse(&text)
}

pub fn write(path: &Path, set: &GeneratorSet) -> Result<()> {
    std::fs::write(path, render(set)).map_err(|e| io_err(path, e))
}
