//! Ports/switch and cables/port series for LH networks and common
//! alternative topologies, emitted as CSV.
//!
//! Alternative families are sized for no oversubscription (`phi = 1`):
//!
//! | family | size | switches | ports/switch | cables/port |
//! |---|---|---|---|---|
//! | `hypercube` | `d` | `2^d` | `k = floor(R/(d+1))` | `d/2` |
//! | `folded_cube` | `d` | `2^d` | `2k`, `k = floor(R/(d+3))` | `(d+1)/4` |
//! | `flattened_butterfly` | `D` dims | `k^D` | `k = floor((R+D)/(D+1))` | `D(k-1)/(2k)` |
//! | `fat_tree` | `L` layers | `(2L-1)(R/2)^(L-1)` | `R/(2L-1)` | `L-1` |
//! | `dragonfly` | `h` globals | `a*g`, `a=2h`, `g=ah+1` | `h` | `(3h-1)/(2h)` |
//!
//! Hypercube and folded-cube links are replicated `k` times so that the
//! relative bisection (`k` and `2k`) matches the external port count.

use std::fmt;
use std::io::Write;
use std::ops::RangeInclusive;
use std::str::FromStr;

use crate::db::{SolutionRecord, SolutionsDb};
use crate::designer::Rational;
use crate::error::{LhError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Hypercube,
    FoldedCube,
    FlattenedButterfly,
    FatTree,
    Dragonfly,
}

impl Family {
    pub const ALL: [Family; 5] = [
        Family::Hypercube,
        Family::FoldedCube,
        Family::FlattenedButterfly,
        Family::FatTree,
        Family::Dragonfly,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::Hypercube => "hypercube",
            Family::FoldedCube => "folded_cube",
            Family::FlattenedButterfly => "flattened_butterfly",
            Family::FatTree => "fat_tree",
            Family::Dragonfly => "dragonfly",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = LhError;

    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| LhError::InvalidParams(format!("unknown topology family {s:?}")))
    }
}

/// One sized network in a comparison series.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComparisonRow {
    pub topology: String,
    pub switches: u64,
    pub radix: u32,
    pub ports: u64,
    /// Topological ports per switch, for regular (direct) topologies.
    pub topo_degree: Option<u64>,
    /// Internal switch-to-switch cables.
    pub cables: u64,
    pub phi: Rational,
    pub ratio_vs_lh: Option<Rational>,
    pub formula: String,
}

impl ComparisonRow {
    pub fn ports_per_switch(&self) -> Rational {
        ratio(self.ports, self.switches)
    }

    pub fn cables_per_port(&self) -> Rational {
        ratio(self.cables, self.ports)
    }

    /// For regular rows, `cables/port == (n*m/2)/P`.
    pub fn identity_holds(&self) -> bool {
        self.topo_degree.is_none_or(|m| {
            Rational::new(
                i128::from(self.switches) * i128::from(m),
                2 * i128::from(self.ports),
            ) == self.cables_per_port()
        })
    }
}

fn ratio(num: u64, den: u64) -> Rational {
    Rational::new(i128::from(num), i128::from(den))
}

fn too_large(what: &'static str) -> LhError {
    LhError::TooLarge {
        what,
        value: u64::MAX,
        limit: u64::MAX,
    }
}

fn lh_row(rec: &SolutionRecord, radix: u32, external: u32, formula: String) -> Result<ComparisonRow> {
    let n = rec.n() as u64;
    let m = rec.m() as u64;
    Ok(ComparisonRow {
        topology: format!("LH d={} m={}", rec.d(), rec.m()),
        switches: n,
        radix,
        ports: n * u64::from(external),
        topo_degree: Some(m),
        cables: n * m / 2,
        phi: Rational::new(i128::from(external), i128::from(rec.b().max(1))),
        ratio_vs_lh: Some(Rational::from_integer(1)),
        formula,
    })
}

/// Every record wired with all `R - m` free ports external; `phi = E/b`
/// may exceed 1.
pub fn lh_series<'a>(
    records: impl IntoIterator<Item = &'a SolutionRecord>,
    radix: u32,
) -> Result<Vec<ComparisonRow>> {
    records
        .into_iter()
        .map(|rec| {
            let m = rec.m() as u32;
            if radix <= m {
                return Err(LhError::RadixTooSmall { radix, m });
            }
            lh_row(rec, radix, radix - m, "E=R-m; P=n*E; C=n*m/2; phi=E/b".into())
        })
        .collect()
}

/// Smallest LH network from `db` carrying at least `ports` external ports
/// at `phi <= 1`, using `E = min(b, R - m)` per switch. Ties go to the
/// larger `E`, then the smaller `m`.
pub fn lh_match(db: &SolutionsDb, ports: u64, radix: u32) -> Result<ComparisonRow> {
    if db.is_empty() {
        return Err(LhError::EmptyDatabase);
    }
    let mut best: Option<(u64, std::cmp::Reverse<u32>, usize, &SolutionRecord)> = None;
    for rec in db.iter() {
        let m = rec.m() as u32;
        if radix <= m {
            continue;
        }
        let e = rec.b().min(radix - m);
        if (rec.n() as u64) * u64::from(e) < ports {
            continue;
        }
        let key = (rec.n() as u64, std::cmp::Reverse(e), rec.m(), rec);
        if best.as_ref().is_none_or(|b| (key.0, key.1, key.2) < (b.0, b.1, b.2)) {
            best = Some(key);
        }
    }
    let (_, std::cmp::Reverse(e), _, rec) = best.ok_or(LhError::NoAdmissibleRecord)?;
    lh_row(rec, radix, e, "E=min(b,R-m); P=n*E; C=n*m/2".into())
}

/// One sized member of an alternative family.
pub fn alternative_row(family: Family, radix: u32, size: u32) -> Result<ComparisonRow> {
    let r = u64::from(radix);
    let s = u64::from(size);
    let invalid = |msg: String| Err(LhError::InvalidParams(msg));
    let (switches, pps, degree, cables, formula) = match family {
        Family::Hypercube | Family::FoldedCube => {
            if !(1..=40).contains(&size) {
                return invalid(format!("cube dimension {size} out of range 1..=40"));
            }
            let n = 1u64 << size;
            let (k, links) = if family == Family::Hypercube {
                (r / (s + 1), s)
            } else {
                (r / (s + 3), s + 1)
            };
            if k == 0 {
                return invalid(format!("radix {radix} too small for {family} d={size}"));
            }
            let e = if family == Family::Hypercube { k } else { 2 * k };
            let formula = if family == Family::Hypercube {
                "k=floor(R/(d+1)); E=k; m=d*k; C=n*m/2"
            } else {
                "k=floor(R/(d+3)); E=2k; m=(d+1)*k; C=n*m/2"
            };
            (n, e, Some(links * k), n * links * k / 2, formula)
        }
        Family::FlattenedButterfly => {
            if size == 0 {
                return invalid("flattened butterfly needs >= 1 dimension".into());
            }
            let k = (r + s) / (s + 1);
            if k < 2 {
                return invalid(format!("radix {radix} too small for {size} dimensions"));
            }
            let n = k.checked_pow(size).ok_or_else(|| too_large("switch count"))?;
            let m = s * (k - 1);
            (n, k, Some(m), n * m / 2, "k=floor((R+D)/(D+1)); n=k^D; E=k; m=D*(k-1); C=n*m/2")
        }
        Family::FatTree => {
            if size < 2 || !radix.is_multiple_of(2) {
                return invalid(format!(
                    "fat tree needs >= 2 layers and an even radix (L={size}, R={radix})"
                ));
            }
            let half = r / 2;
            let span = half.checked_pow(size - 1).ok_or_else(|| too_large("switch count"))?;
            let n = (2 * s - 1) * span;
            let ports = 2 * half * span;
            return Ok(ComparisonRow {
                topology: format!("{family} L={size}"),
                switches: n,
                radix,
                ports,
                topo_degree: None,
                cables: (s - 1) * ports,
                phi: Rational::from_integer(1),
                ratio_vs_lh: None,
                formula: "P=2(R/2)^L; n=(2L-1)(R/2)^(L-1); C=(L-1)*P".into(),
            });
        }
        Family::Dragonfly => {
            if size == 0 || 4 * s > r + 1 {
                return invalid(format!("dragonfly h={size} needs 1 <= 4h-1 <= R={radix}"));
            }
            let a = 2 * s;
            let g = a * s + 1;
            let n = a * g;
            let m = a - 1 + s;
            (n, s, Some(m), n * m / 2, "p=h; a=2h; g=a*h+1; n=a*g; m=a-1+h; C=n*m/2")
        }
    };
    let label = match family {
        Family::FlattenedButterfly => format!("{family} D={size}"),
        Family::Dragonfly => format!("{family} h={size}"),
        _ => format!("{family} d={size}"),
    };
    Ok(ComparisonRow {
        topology: label,
        switches,
        radix,
        ports: switches * pps,
        topo_degree: degree,
        cables,
        phi: Rational::from_integer(1),
        ratio_vs_lh: None,
        formula: formula.into(),
    })
}

pub fn alternative_series(
    family: Family,
    radix: u32,
    sizes: RangeInclusive<u32>,
) -> Result<Vec<ComparisonRow>> {
    sizes.map(|s| alternative_row(family, radix, s)).collect()
}

/// Fills `ratio_vs_lh` with (LH ports/switch) / (row ports/switch) against
/// the LH network matched to each row's port count and radix.
pub fn attach_lh_ratio(rows: &mut [ComparisonRow], db: &SolutionsDb) -> Result<()> {
    for row in rows.iter_mut() {
        let lh = lh_match(db, row.ports, row.radix)?;
        row.ratio_vs_lh = Some(lh.ports_per_switch() / row.ports_per_switch());
    }
    Ok(())
}

pub const CSV_HEADER: [&str; 14] = [
    "topology",
    "switches",
    "radix",
    "ports",
    "topo_degree",
    "cables",
    "ports_per_switch",
    "ports_per_switch_exact",
    "cables_per_port",
    "cables_per_port_exact",
    "phi",
    "ratio_vs_lh",
    "ratio_vs_lh_exact",
    "formula",
];

fn exact(r: Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

fn decimal(r: Rational) -> String {
    format!("{:.6}", *r.numer() as f64 / *r.denom() as f64)
}

pub fn write_csv<W: Write>(w: W, rows: &[ComparisonRow]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(CSV_HEADER)?;
    for row in rows {
        let ratio = row.ratio_vs_lh;
        out.write_record([
            row.topology.clone(),
            row.switches.to_string(),
            row.radix.to_string(),
            row.ports.to_string(),
            row.topo_degree.map(|m| m.to_string()).unwrap_or_default(),
            row.cables.to_string(),
            decimal(row.ports_per_switch()),
            exact(row.ports_per_switch()),
            decimal(row.cables_per_port()),
            exact(row.cables_per_port()),
            exact(row.phi),
            ratio.map(decimal).unwrap_or_default(),
            ratio.map(exact).unwrap_or_default(),
            row.formula.clone(),
        ])?;
    }
    out.flush().map_err(|e| LhError::Csv(e.into()))?;
    Ok(())
}
