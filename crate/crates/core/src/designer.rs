//! Requirement matching against the solutions database and wiring tables.

use std::io::{self, Write};
use std::ops::Range;

use num_rational::Ratio;
use num_traits::Signed;

use crate::db::{SolutionRecord, SolutionsDb};
use crate::error::{LhError, Result};
use crate::graph::GeneratorSet;

pub type Rational = Ratio<i128>;

/// Target external ports `P`, switch radix `R` and oversubscription `phi`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Requirement {
    pub ports: u64,
    pub radix: u32,
    pub phi: Rational,
    /// Drop records that provide fewer than `ports` external ports.
    pub at_least_ports: bool,
    pub weight_ports: Rational,
    pub weight_phi: Rational,
}

impl Requirement {
    /// Weights default to 7/10 on the port error and 3/10 on the `phi` error.
    pub fn new(ports: u64, radix: u32, phi: Rational) -> Result<Self> {
        let req = Self {
            ports,
            radix,
            phi,
            at_least_ports: false,
            weight_ports: Rational::new(7, 10),
            weight_phi: Rational::new(3, 10),
        };
        req.validate()?;
        Ok(req)
    }

    pub fn with_weights(mut self, weight_ports: Rational, weight_phi: Rational) -> Result<Self> {
        self.weight_ports = weight_ports;
        self.weight_phi = weight_phi;
        self.validate()?;
        Ok(self)
    }

    pub fn at_least(mut self, yes: bool) -> Self {
        self.at_least_ports = yes;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(LhError::InvalidParams(msg.into()));
        if self.ports == 0 {
            return bad("P must be >= 1");
        }
        if self.radix < 2 {
            return bad("R must be >= 2");
        }
        if !self.phi.is_positive() {
            return bad("phi must be > 0");
        }
        if self.weight_ports.is_negative() || self.weight_phi.is_negative() {
            return bad("weights must be non-negative");
        }
        if self.weight_ports + self.weight_phi != Rational::from_integer(1) {
            return bad("weights must sum to 1");
        }
        Ok(())
    }
}

/// The best record for a requirement and what it achieves.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DesignMatch {
    pub record: SolutionRecord,
    /// External ports per switch, `R - m`.
    pub external: u32,
    pub ports: u64,
    pub phi: Rational,
    pub error: Rational,
}

impl DesignMatch {
    pub fn d(&self) -> u32 {
        self.record.d()
    }

    pub fn m(&self) -> usize {
        self.record.m()
    }
}

/// `phi = E / b`.
pub fn oversubscription(external: u32, b: u32) -> Result<Rational> {
    if b == 0 {
        return Err(LhError::ZeroBisection);
    }
    Ok(Rational::new(i128::from(external), i128::from(b)))
}

/// Scans every record and returns the one with the smallest weighted
/// relative error `wP*|P'-P|/P + wPhi*|phi'-phi|/phi`; ties go to fewer
/// switches, then fewer hops.
pub fn find_solution(db: &SolutionsDb, req: &Requirement) -> Result<DesignMatch> {
    req.validate()?;
    if db.is_empty() {
        return Err(LhError::EmptyDatabase);
    }
    let target_p = Rational::from_integer(i128::from(req.ports));
    let mut best: Option<DesignMatch> = None;
    for rec in db.iter() {
        let Some(external) = req.radix.checked_sub(rec.m() as u32).filter(|&e| e > 0) else {
            continue;
        };
        let ports = (rec.n() as u64) * u64::from(external);
        if req.at_least_ports && ports < req.ports {
            continue;
        }
        let phi = oversubscription(external, rec.b())?;
        let dp = (Rational::from_integer(i128::from(ports)) - target_p).abs() / target_p;
        let dphi = (phi - req.phi).abs() / req.phi;
        let error = req.weight_ports * dp + req.weight_phi * dphi;
        let better = match &best {
            None => true,
            Some(cur) => (error, rec.n(), rec.m()) < (cur.error, cur.record.n(), cur.m()),
        };
        if better {
            best = Some(DesignMatch {
                record: rec.clone(),
                external,
                ports,
                phi,
                error,
            });
        }
    }
    best.ok_or(LhError::NoAdmissibleRecord)
}

/// Per-switch port map: row `v`, port `s` (1-based) connects to `v ^ h_s`;
/// ports past `m` are free.
#[derive(Debug, Clone)]
pub struct WiringTable {
    set: GeneratorSet,
    radix: u32,
}

impl WiringTable {
    pub fn new(set: &GeneratorSet, radix: u32) -> Result<Self> {
        if radix as usize <= set.m() {
            return Err(LhError::RadixTooSmall {
                radix,
                m: set.m() as u32,
            });
        }
        Ok(Self {
            set: set.clone(),
            radix,
        })
    }

    pub fn for_record(rec: &SolutionRecord, radix: u32) -> Result<Self> {
        Self::new(rec.generators(), radix)
    }

    pub fn rows(&self) -> usize {
        self.set.n()
    }

    pub fn radix(&self) -> u32 {
        self.radix
    }

    /// Peer of switch `v` on 1-based `port`, or `None` for a free port.
    pub fn peer(&self, v: u32, port: u32) -> Option<u32> {
        let idx = usize::try_from(port.checked_sub(1)?).ok()?;
        self.set.hops().get(idx).map(|h| v ^ h)
    }

    fn width(&self) -> usize {
        self.set.dim().div_ceil(4) as usize
    }

    pub fn header(&self) -> String {
        let mut out = String::from("Sw/Pt:");
        for p in 1..=self.radix {
            out.push_str(&format!("\t#{p}"));
        }
        out
    }

    pub fn row(&self, v: u32) -> Result<String> {
        if v as usize >= self.rows() {
            return Err(LhError::IndexOutOfRange {
                index: u64::from(v),
                n: self.rows() as u64,
            });
        }
        let w = self.width();
        let mut out = format!("{v:X}:");
        for h in self.set.hops() {
            out.push_str(&format!("\t{:0w$X}", v ^ h));
        }
        for _ in self.set.m()..self.radix as usize {
            out.push_str("\t**");
        }
        Ok(out)
    }

    /// Header plus rows in `range`, newline-terminated, streamed to `w`.
    pub fn write_rows<W: Write>(&self, w: &mut W, range: Range<u32>) -> Result<()> {
        let io = |e: io::Error| LhError::Io {
            path: "<wiring output>".into(),
            source: e,
        };
        if range.end as usize > self.rows() || range.start > range.end {
            return Err(LhError::IndexOutOfRange {
                index: u64::from(range.end),
                n: self.rows() as u64,
            });
        }
        writeln!(w, "{}", self.header()).map_err(io)?;
        for v in range {
            writeln!(w, "{}", self.row(v)?).map_err(io)?;
        }
        Ok(())
    }

    pub fn render(&self, range: Range<u32>) -> Result<String> {
        let mut buf = Vec::new();
        self.write_rows(&mut buf, range)?;
        Ok(String::from_utf8(buf).expect("table is ASCII"))
    }

    /// Every link appears in both end rows at the same port; every row's
    /// peers are distinct and differ from the row label.
    pub fn check_symmetry(&self) -> bool {
        let n = self.rows() as u32;
        (0..n).all(|v| {
            let peers: Vec<u32> = (1..=self.set.m() as u32)
                .filter_map(|p| self.peer(v, p))
                .collect();
            let mut uniq = peers.clone();
            uniq.sort_unstable();
            uniq.dedup();
            uniq.len() == peers.len()
                && peers.iter().enumerate().all(|(i, &u)| {
                    u != v && self.peer(u, i as u32 + 1) == Some(v)
                })
        })
    }

    /// Distinct cables: `n * m / 2`.
    pub fn cable_count(&self) -> u64 {
        (self.rows() as u64) * (self.set.m() as u64) / 2
    }
}
