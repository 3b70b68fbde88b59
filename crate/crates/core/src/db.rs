//! Solutions database: LH records keyed by `(d, m)`.
//!
//! On-disk format, one block per record, blocks separated by blank lines:
//!
//! ```text
//! record d=5 m=9 b=3 diam=3 avg=54/32
//! provenance: worked example 1
//! 1
//! 2
//! ...
//! ```
//!
//! Metrics are recomputed from the hops whenever a record is built or loaded.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use crate::bisection::bisection_fwht;
use crate::constructions::{augment_odd_b, lh_hd, lh_hd_reduced, low_density_b3, HdParams};
use crate::ecc::{code_to_lh, shorten, CodeMatrix};
use crate::error::{io_err, LhError, Result};
use crate::graph::{AvgHops, GeneratorSet};

pub const MIN_DIM: u32 = 3;
pub const MAX_DIM: u32 = 24;
pub const MAX_M: usize = 256;

/// One stored network with its recomputed metrics.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolutionRecord {
    set: GeneratorSet,
    b: u32,
    diameter: u32,
    avg: AvgHops,
    provenance: String,
}

impl SolutionRecord {
    pub fn from_generators(set: GeneratorSet, provenance: impl Into<String>) -> Result<Self> {
        let b = bisection_fwht(&set)?.b;
        let profile = set.distance_profile()?;
        Ok(Self {
            b,
            diameter: profile.diameter(),
            avg: profile.avg_hops(),
            set,
            provenance: provenance.into(),
        })
    }

    pub fn d(&self) -> u32 {
        self.set.dim()
    }

    pub fn m(&self) -> usize {
        self.set.m()
    }

    pub fn n(&self) -> usize {
        self.set.n()
    }

    pub fn b(&self) -> u32 {
        self.b
    }

    pub fn diameter(&self) -> u32 {
        self.diameter
    }

    pub fn avg_hops(&self) -> AvgHops {
        self.avg
    }

    pub fn hops(&self) -> &[u32] {
        self.set.hops()
    }

    pub fn generators(&self) -> &GeneratorSet {
        &self.set
    }

    pub fn provenance(&self) -> &str {
        &self.provenance
    }

    /// Recomputes all metrics and compares them with the stored ones.
    pub fn verify(&self) -> Result<()> {
        let fresh = Self::from_generators(self.set.clone(), "")?;
        let mut diffs = Vec::new();
        if fresh.b != self.b {
            diffs.push(format!("b {} != {}", self.b, fresh.b));
        }
        if fresh.diameter != self.diameter {
            diffs.push(format!("diam {} != {}", self.diameter, fresh.diameter));
        }
        if fresh.avg != self.avg {
            diffs.push(format!("avg {} != {}", self.avg, fresh.avg));
        }
        if diffs.is_empty() {
            Ok(())
        } else {
            Err(LhError::Integrity {
                d: self.d(),
                m: self.m() as u32,
                msg: diffs.join(", "),
            })
        }
    }

    /// Higher `b`, then smaller diameter, then smaller average.
    fn rank_key(&self) -> (std::cmp::Reverse<u32>, u32, u64) {
        (std::cmp::Reverse(self.b), self.diameter, self.avg.total)
    }

    fn header(&self) -> String {
        format!(
            "record d={} m={} b={} diam={} avg={}/{}",
            self.d(),
            self.m(),
            self.b,
            self.diameter,
            self.avg.total,
            self.avg.nodes
        )
    }
}

/// All records of one dimension, keyed by `m`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RecordSet {
    records: BTreeMap<usize, SolutionRecord>,
}

impl RecordSet {
    pub fn get(&self, m: usize) -> Option<&SolutionRecord> {
        self.records.get(&m)
    }

    pub fn iter(&self) -> impl Iterator<Item = &SolutionRecord> {
        self.records.values()
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SolutionsDb {
    sets: BTreeMap<u32, RecordSet>,
}

fn check_bounds(d: u32, m: usize) -> Result<()> {
    if !(MIN_DIM..=MAX_DIM).contains(&d) {
        return Err(LhError::DimensionOutOfRange {
            dim: d,
            min: MIN_DIM,
            max: MAX_DIM,
        });
    }
    if !(d as usize..=MAX_M).contains(&m) {
        return Err(LhError::InvalidParams(format!(
            "m = {m} outside database range {d}..={MAX_M}"
        )));
    }
    Ok(())
}

impl SolutionsDb {
    pub fn new() -> Self {
        Self::default()
    }

    /// A database holding the default seed set.
    pub fn seeded() -> Result<Self> {
        let mut db = Self::new();
        db.seed_default()?;
        Ok(db)
    }

    pub fn len(&self) -> usize {
        self.sets.values().map(RecordSet::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn query(&self, d: u32, m: usize) -> Option<&SolutionRecord> {
        self.sets.get(&d)?.get(m)
    }

    pub fn record_set(&self, d: u32) -> Option<&RecordSet> {
        self.sets.get(&d)
    }

    /// Records ordered by `(d, m)`.
    pub fn iter(&self) -> impl Iterator<Item = &SolutionRecord> {
        self.sets.values().flat_map(RecordSet::iter)
    }

    /// Stores `rec`, replacing any record with the same `(d, m)`.
    pub fn insert(&mut self, rec: SolutionRecord) -> Result<()> {
        check_bounds(rec.d(), rec.m())?;
        self.sets
            .entry(rec.d())
            .or_default()
            .records
            .insert(rec.m(), rec);
        Ok(())
    }

    /// Stores `rec` if its key is free or it beats the stored record.
    pub fn upsert_if_better(&mut self, rec: SolutionRecord) -> Result<bool> {
        check_bounds(rec.d(), rec.m())?;
        let better = match self.query(rec.d(), rec.m()) {
            None => true,
            Some(old) => rec.rank_key() < old.rank_key(),
        };
        if better {
            self.insert(rec)?;
        }
        Ok(better)
    }

    /// Translates a code-matrix file and stores the resulting record.
    pub fn ingest_code_file(&mut self, path: &Path) -> Result<SolutionRecord> {
        let code = CodeMatrix::read(path)?;
        let set = code_to_lh(&code)?;
        check_bounds(set.dim(), set.m())?;
        let name = path
            .file_name()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        let rec = SolutionRecord::from_generators(set, format!("code translation: {name}"))?;
        self.insert(rec.clone())?;
        Ok(rec)
    }

    /// The three worked-example networks. Returns how many were inserted.
    pub fn seed_examples(&mut self) -> Result<usize> {
        let examples: [(u32, &[u32], &str); 3] = [
            (5, &EXAMPLE_1, "worked example 1 (P=96, R=12)"),
            (8, &EXAMPLE_2, "worked example 2 (P=1536, R=24)"),
            (16, &example_3(), "worked example 3 (P=655360, R=48)"),
        ];
        for (d, hops, prov) in examples {
            let set = GeneratorSet::new(d, hops.to_vec())?;
            self.insert(SolutionRecord::from_generators(set, prov)?)?;
        }
        Ok(3)
    }

    /// Worked examples, then construction families, each family record kept
    /// only where it beats what is already stored. Returns the record count.
    pub fn seed_default(&mut self) -> Result<usize> {
        self.seed_examples()?;
        for d in MIN_DIM..=16 {
            self.offer(GeneratorSet::hypercube(d)?, "construction: hypercube")?;
            self.offer(GeneratorSet::folded_cube(d)?, "construction: folded cube")?;
        }
        for d in MIN_DIM..=8 {
            for m in HdParams::ladder(d) {
                let full = lh_hd(HdParams::new(d, m)?, true)?;
                for r in 1..=2 {
                    if let Ok(reduced) = lh_hd_reduced(&full, r) {
                        self.offer(reduced, &format!("construction: LH-HD{r}"))?;
                    }
                }
                self.offer(full, "construction: LH-HD")?;
            }
        }
        for d in MIN_DIM..=12 {
            let set = low_density_b3(d, None)?;
            let augmented = augment_odd_b(&set)?;
            self.offer(set, "construction: b=3 low density")?;
            self.offer(augmented, "construction: b=3 low density + odd-b augmentation")?;
        }
        for set in shortened_example_3()? {
            self.offer(set, "construction: shortened worked example 3")?;
        }
        Ok(self.len())
    }

    fn offer(&mut self, set: GeneratorSet, provenance: &str) -> Result<bool> {
        if check_bounds(set.dim(), set.m()).is_err() {
            return Ok(false);
        }
        self.upsert_if_better(SolutionRecord::from_generators(set, provenance)?)
    }

    /// Re-verifies every record.
    pub fn verify_all(&self) -> Result<()> {
        self.iter().try_for_each(SolutionRecord::verify)
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for rec in self.iter() {
            out.push_str(&rec.header());
            out.push('\n');
            if !rec.provenance.is_empty() {
                let _ = writeln!(out, "provenance: {}", rec.provenance);
            }
            for h in rec.hops() {
                let _ = writeln!(out, "{h:X}");
            }
            out.push('\n');
        }
        out
    }

    /// Parses and integrity-checks a database file body.
    pub fn parse(text: &str) -> Result<Self> {
        let mut db = Self::new();
        let mut pending: Option<Pending> = None;
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.starts_with('#') {
                continue;
            }
            if line.is_empty() {
                if let Some(p) = pending.take() {
                    db.insert(p.finish()?)?;
                }
                continue;
            }
            if let Some(rest) = line.strip_prefix("record ") {
                if let Some(p) = pending.take() {
                    db.insert(p.finish()?)?;
                }
                pending = Some(Pending::from_header(rest, line_no)?);
                continue;
            }
            let p = pending.as_mut().ok_or(LhError::Parse {
                line: line_no,
                msg: "content before the first `record` header".into(),
            })?;
            if let Some(prov) = line.strip_prefix("provenance:") {
                if !p.hops.is_empty() {
                    return Err(LhError::Parse {
                        line: line_no,
                        msg: "provenance must precede hops".into(),
                    });
                }
                p.provenance = prov.trim().to_string();
                continue;
            }
            let h = u32::from_str_radix(line, 16).map_err(|e| LhError::Parse {
                line: line_no,
                msg: format!("bad hex hop {line:?}: {e}"),
            })?;
            p.hops.push(h);
        }
        if let Some(p) = pending.take() {
            db.insert(p.finish()?)?;
        }
        Ok(db)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| io_err(path, e))?;
        Self::parse(&text)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.render()).map_err(|e| io_err(path, e))
    }
}

struct Pending {
    d: u32,
    m: usize,
    b: u32,
    diameter: u32,
    avg: AvgHops,
    provenance: String,
    hops: Vec<u32>,
}

impl Pending {
    fn from_header(fields: &str, line: usize) -> Result<Self> {
        let err = |msg: String| LhError::Parse { line, msg };
        let mut map = BTreeMap::new();
        for field in fields.split_whitespace() {
            let (k, v) = field
                .split_once('=')
                .ok_or_else(|| err(format!("bad header field {field:?}")))?;
            map.insert(k, v);
        }
        let get = |k: &str| -> Result<&str> {
            map.get(k)
                .copied()
                .ok_or_else(|| err(format!("header lacks {k}=")))
        };
        let int = |k: &str| -> Result<u64> {
            get(k)?
                .parse::<u64>()
                .map_err(|e| err(format!("bad {k}: {e}")))
        };
        let (num, den) = get("avg")?
            .split_once('/')
            .ok_or_else(|| err("avg must be num/den".into()))?;
        let avg = AvgHops {
            total: num.parse().map_err(|e| err(format!("bad avg numerator: {e}")))?,
            nodes: den.parse().map_err(|e| err(format!("bad avg denominator: {e}")))?,
        };
        Ok(Self {
            d: int("d")? as u32,
            m: int("m")? as usize,
            b: int("b")? as u32,
            diameter: int("diam")? as u32,
            avg,
            provenance: String::new(),
            hops: Vec::new(),
        })
    }

    fn finish(self) -> Result<SolutionRecord> {
        let integrity = |msg: String| LhError::Integrity {
            d: self.d,
            m: self.m as u32,
            msg,
        };
        if self.hops.len() != self.m {
            return Err(integrity(format!("{} hops listed", self.hops.len())));
        }
        let set = GeneratorSet::new(self.d, self.hops.clone())?;
        let rec = SolutionRecord {
            set,
            b: self.b,
            diameter: self.diameter,
            avg: self.avg,
            provenance: self.provenance.clone(),
        };
        rec.verify()?;
        Ok(rec)
    }
}

pub const EXAMPLE_1: [u32; 9] = [0x1, 0x2, 0x4, 0x8, 0x10, 0xE, 0xF, 0x14, 0x19];

pub const EXAMPLE_2: [u32; 18] = [
    0x01, 0x02, 0x04, 0x08, 0x10, 0x20, 0x40, 0x80, 0x1A, 0x2D, 0x47, 0x78, 0x7E, 0x8E, 0x9D,
    0xB2, 0xD1, 0xFB,
];

const EXAMPLE_3_TAIL: [u32; 22] = [
    0x06F2, 0x1BD0, 0x1F3D, 0x3D72, 0x6B64, 0x775C, 0x893A, 0x8B81, 0x9914, 0xA4C2, 0xA750,
    0xB70E, 0xBFF1, 0xC57D, 0xD0A6, 0xD1CA, 0xE6B5, 0xEAB9, 0xF2E8, 0xF313, 0xF9BF, 0xFC31,
];

/// The 16 powers of two followed by the 22 long hops of worked example 3.
pub fn example_3() -> [u32; 38] {
    let mut hops = [0u32; 38];
    for (i, h) in hops.iter_mut().take(16).enumerate() {
        *h = 1 << i;
    }
    hops[16..].copy_from_slice(&EXAMPLE_3_TAIL);
    hops
}

/// Example 3 shortened one dimension at a time down to d=8, each step
/// quotienting by the last hop that keeps the remaining hops distinct.
fn shortened_example_3() -> Result<Vec<GeneratorSet>> {
    let mut cur = GeneratorSet::new(16, example_3().to_vec())?;
    let mut out = Vec::new();
    while cur.dim() > 8 {
        cur = (0..cur.m())
            .rev()
            .find_map(|i| shorten(&cur, i).ok())
            .ok_or_else(|| LhError::InvalidParams("no collision-free shortening".into()))?;
        out.push(cur.clone());
    }
    Ok(out)
}
