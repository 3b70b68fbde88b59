use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::ops::Range;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use lh_core::bisection::{
    bisection_direct, bisection_fwht, brute_force_bisection, cut_value, optimize_direct,
    walsh_partition, PartitionVector, BRUTE_FORCE_MAX_N,
};
use lh_core::compare::{self, Family};
use lh_core::constructions::{
    augment_odd_b, full_mesh, lh_hd, lh_hd_reduced, low_density_b3, optimize_secondary, HdParams,
    Objective, SecondaryOptions,
};
use lh_core::db::SolutionsDb;
use lh_core::designer::{find_solution, oversubscription, Rational, Requirement, WiringTable};
use lh_core::ecc::{
    apply_equivalence, code_to_lh, diagonalize, lh_to_code, min_change_expansion, min_weight,
    shorten, verify_duality, CodeMatrix, EquivalenceMap,
};
use lh_core::walsh::{fwht_in_place, parity, WalshIndex};
use lh_core::{hoplist, GeneratorSet};

#[derive(Parser)]
#[command(name = "lh", version, about = "Long Hop network construction and analysis")]
struct Cli {
    /// Solutions database file; the built-in seed set is used when absent.
    #[arg(long, global = true, env = "LH_DB")]
    db: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Output {
    /// Write to this file instead of stdout.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Exact bisection of a hop list: `b=<> B=<> t=<hex>`.
    Bisect {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = Method::Fwht)]
        method: Method,
    },
    /// Cross-check bisection against exhaustive search (n <= 16).
    Oracle { file: PathBuf },
    /// Convert between code matrices and hop lists.
    Translate {
        file: PathBuf,
        /// Format of the input file.
        #[arg(long, value_enum)]
        from: Format,
        #[command(flatten)]
        out: Output,
    },
    /// Minimum codeword weight of a code matrix and the network it maps to.
    Weight { file: PathBuf },
    /// Generate a hop list from a construction family.
    Build {
        #[command(subcommand)]
        kind: Build,
    },
    /// Match port/radix/oversubscription targets against the database.
    Design {
        #[arg(long)]
        ports: u64,
        #[arg(long)]
        radix: u32,
        #[arg(long, value_parser = parse_rational, default_value = "1")]
        phi: Rational,
        /// Only accept records providing at least the requested ports.
        #[arg(long)]
        at_least: bool,
        /// Port and phi error weights, e.g. `0.7,0.3`.
        #[arg(long, value_parser = parse_weights)]
        weights: Option<(Rational, Rational)>,
    },
    /// Emit the per-switch port map of a database record as TSV.
    Wire {
        /// Record key `d,m`.
        #[arg(long, value_parser = parse_record_key)]
        record: (u32, usize),
        #[arg(long)]
        radix: u32,
        /// Row range `a..b` (end exclusive).
        #[arg(long, value_parser = parse_rows)]
        rows: Option<Range<u32>>,
        #[command(flatten)]
        out: Output,
    },
    /// Solutions database maintenance.
    Db {
        #[command(subcommand)]
        action: DbAction,
    },
    /// Ports/switch and cables/port comparison series as CSV.
    Compare {
        /// `lh` or an alternative family.
        #[arg(long)]
        family: String,
        #[arg(long)]
        radix: u32,
        /// Size range `a..b` (inclusive): dimension, layers or global links.
        #[arg(long, value_parser = parse_sizes)]
        sizes: (u32, u32),
        #[command(flatten)]
        out: Output,
    },
    /// Adjacency eigenvalues `lambda_k`, one per line as `k<TAB>lambda`.
    Spectrum { file: PathBuf },
    /// Diameter and average hops.
    Metrics {
        file: PathBuf,
        /// Also print the number of nodes at each distance.
        #[arg(long)]
        histogram: bool,
    },
    /// Whether the hops span Z2^d (graph connectivity).
    Span { file: PathBuf },
    /// Neighbors of one node, in hop order.
    Neighbors {
        file: PathBuf,
        /// Node label in hex.
        #[arg(long, value_parser = parse_hex)]
        node: u32,
    },
    /// Cut of an equipartition: a Walsh index or an explicit sign string.
    Cut {
        file: PathBuf,
        #[arg(long, value_parser = parse_hex, conflicts_with = "signs")]
        walsh: Option<u32>,
        /// `+`/`-` per node, first must be `+`.
        #[arg(long)]
        signs: Option<String>,
    },
    /// Parity of a hex value.
    Parity {
        #[arg(value_parser = parse_hex)]
        x: u32,
    },
    /// Walsh function values: one point with `--x`, else the whole row.
    Walsh {
        #[arg(long)]
        n: usize,
        #[arg(long, value_parser = parse_hex)]
        k: u32,
        #[arg(long, value_parser = parse_hex)]
        x: Option<u32>,
    },
    /// Unnormalized Walsh-Hadamard transform of comma-separated integers.
    Fwht { values: String },
    /// Systematic (diagonalized) equivalent of a hop list.
    Diagonalize {
        file: PathBuf,
        #[command(flatten)]
        out: Output,
    },
    /// Apply a basis change given as hex images of the unit vectors.
    Equiv {
        file: PathBuf,
        /// Comma-separated hex images of `1, 2, 4, ...`.
        #[arg(long)]
        map: String,
        #[command(flatten)]
        out: Output,
    },
    /// Equivalent of NEW sharing as many hops with OLD as possible.
    Expand {
        old: PathBuf,
        new: PathBuf,
        #[arg(long, default_value_t = 100_000)]
        budget: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        out: Output,
    },
    /// Quotient by one hop (shortened code): d-1 bits, m-1 hops.
    Shorten {
        file: PathBuf,
        /// 1-based hop position.
        #[arg(long)]
        hop: usize,
        #[command(flatten)]
        out: Output,
    },
    /// Exhaustive search for the best m-hop set (n <= 64).
    Search {
        #[arg(long)]
        dim: u32,
        #[arg(long)]
        m: usize,
        #[arg(long, default_value_t = 10_000_000)]
        budget: u64,
        #[command(flatten)]
        out: Output,
    },
    /// Oversubscription `E/b`.
    Phi { external: u32, b: u32 },
}

#[derive(Subcommand)]
enum Build {
    /// High-density family `h_s = n - s`.
    Hd {
        #[arg(long)]
        dim: u32,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        diagonalize: bool,
        /// Drop the last 1 or 2 hops.
        #[arg(long)]
        reduce: Option<usize>,
        #[command(flatten)]
        out: Output,
    },
    /// d-cube plus augmentation hops with bisection 3.
    B3 {
        #[arg(long)]
        dim: u32,
        #[arg(long)]
        seed: Option<u64>,
        #[command(flatten)]
        out: Output,
    },
    /// Append one hop to an odd-b set, raising b by one.
    Augment {
        file: PathBuf,
        #[command(flatten)]
        out: Output,
    },
    /// Fully meshed network.
    Mesh {
        #[arg(long)]
        dim: u32,
        #[command(flatten)]
        out: Output,
    },
    /// Improve diameter or average hops by hop replacement.
    Optimize {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = ObjectiveArg::Diameter)]
        objective: ObjectiveArg,
        /// Allow replacements that lower the bisection.
        #[arg(long)]
        allow_lower_b: bool,
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u8).range(1..=2))]
        depth: u8,
        #[arg(long, default_value_t = 100_000)]
        budget: u64,
        #[command(flatten)]
        out: Output,
    },
}

#[derive(Subcommand)]
enum DbAction {
    /// Translate a code-matrix file and store it (requires --db).
    Ingest { file: PathBuf },
    /// One line per record.
    List,
    /// Recompute every record's metrics.
    Verify,
    /// Write the built-in seed set to the --db file.
    Seed,
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Fwht,
    Direct,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Code,
    Hops,
}

#[derive(Clone, Copy, ValueEnum)]
enum ObjectiveArg {
    Diameter,
    Avg,
}

fn parse_hex(s: &str) -> Result<u32, String> {
    let t = s.trim_start_matches("0x");
    u32::from_str_radix(t, 16).map_err(|e| format!("bad hex {s:?}: {e}"))
}

fn parse_rational(s: &str) -> Result<Rational, String> {
    let bad = || format!("bad rational {s:?}");
    if let Some((n, d)) = s.split_once('/') {
        let n: i128 = n.trim().parse().map_err(|_| bad())?;
        let d: i128 = d.trim().parse().map_err(|_| bad())?;
        if d == 0 {
            return Err(bad());
        }
        return Ok(Rational::new(n, d));
    }
    let (int, frac) = s.split_once('.').unwrap_or((s, ""));
    if frac.len() > 18 || !frac.bytes().all(|b| b.is_ascii_digit()) {
        return Err(bad());
    }
    let den = 10i128.pow(frac.len() as u32);
    let digits = format!("{int}{frac}");
    let num: i128 = digits.parse().map_err(|_| bad())?;
    Ok(Rational::new(num, den))
}

fn parse_weights(s: &str) -> Result<(Rational, Rational), String> {
    let (a, b) = s.split_once(',').ok_or("weights must be `wP,wPhi`")?;
    Ok((parse_rational(a)?, parse_rational(b)?))
}

fn parse_record_key(s: &str) -> Result<(u32, usize), String> {
    let (d, m) = s.split_once(',').ok_or("record must be `d,m`")?;
    Ok((
        d.trim().parse().map_err(|e| format!("bad d: {e}"))?,
        m.trim().parse().map_err(|e| format!("bad m: {e}"))?,
    ))
}

fn parse_range(s: &str) -> Result<(u32, u32), String> {
    let (a, b) = s.split_once("..").ok_or("range must be `a..b`")?;
    let a = a.trim().parse().map_err(|e| format!("bad range start: {e}"))?;
    let b = b.trim().parse().map_err(|e| format!("bad range end: {e}"))?;
    if a > b {
        return Err("range start exceeds end".into());
    }
    Ok((a, b))
}

fn parse_rows(s: &str) -> Result<Range<u32>, String> {
    parse_range(s).map(|(a, b)| a..b)
}

fn parse_sizes(s: &str) -> Result<(u32, u32), String> {
    parse_range(s)
}

fn rational_text(r: Rational) -> String {
    format!(
        "{}/{} ({:.6})",
        r.numer(),
        r.denom(),
        *r.numer() as f64 / *r.denom() as f64
    )
}

fn hops_text(set: &GeneratorSet) -> String {
    set.hops()
        .iter()
        .map(|h| format!("{h:X}"))
        .collect::<Vec<_>>()
        .join(" ")
}

fn open_output(out: &Output) -> Result<Box<dyn Write>> {
    Ok(match &out.output {
        Some(path) => Box::new(BufWriter::new(
            File::create(path).with_context(|| format!("creating {}", path.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn emit(out: &Output, text: &str) -> Result<()> {
    let mut w = open_output(out)?;
    w.write_all(text.as_bytes())?;
    w.flush()?;
    Ok(())
}

fn load_db(path: Option<&Path>) -> Result<SolutionsDb> {
    Ok(match path {
        Some(p) => SolutionsDb::load(p)?,
        None => SolutionsDb::seeded()?,
    })
}

fn run(cli: Cli) -> Result<()> {
    let db_path = cli.db.as_deref();
    match cli.command {
        Command::Bisect { file, method } => {
            let set = hoplist::read(&file)?;
            let r = match method {
                Method::Fwht => bisection_fwht(&set)?,
                Method::Direct => bisection_direct(&set)?,
            };
            println!("b={} B={} t={:X}", r.b, r.links, r.t);
        }
        Command::Oracle { file } => {
            let set = hoplist::read(&file)?;
            if set.n() > BRUTE_FORCE_MAX_N {
                bail!("oracle needs n <= {BRUTE_FORCE_MAX_N}, got {}", set.n());
            }
            let brute = brute_force_bisection(&set)?;
            let fast = bisection_fwht(&set)?.links;
            let direct = bisection_direct(&set)?.links;
            println!("brute={brute} fwht={fast} direct={direct}");
            if brute != fast || brute != direct {
                bail!("bisection methods disagree");
            }
        }
        Command::Translate { file, from, out } => match from {
            Format::Code => emit(&out, &hoplist::render(&code_to_lh(&CodeMatrix::read(&file)?)?))?,
            Format::Hops => emit(&out, &lh_to_code(&hoplist::read(&file)?)?.render())?,
        },
        Command::Weight { file } => {
            let code = CodeMatrix::read(&file)?;
            let b = bisection_fwht(&code_to_lh(&code)?)?.b;
            println!(
                "w_min={} b={} duality={}",
                min_weight(&code),
                b,
                verify_duality(&code)?
            );
        }
        Command::Build { kind } => build(kind)?,
        Command::Design {
            ports,
            radix,
            phi,
            at_least,
            weights,
        } => {
            let mut req = Requirement::new(ports, radix, phi)?.at_least(at_least);
            if let Some((wp, wphi)) = weights {
                req = req.with_weights(wp, wphi)?;
            }
            let db = load_db(db_path)?;
            let hit = find_solution(&db, &req)?;
            let rec = &hit.record;
            println!("d={} m={} b={} n={}", rec.d(), rec.m(), rec.b(), rec.n());
            println!(
                "E={} P={} phi={} error={}",
                hit.external,
                hit.ports,
                rational_text(hit.phi),
                rational_text(hit.error)
            );
            println!(
                "diam={} avg={} ({})",
                rec.diameter(),
                rec.avg_hops(),
                rec.avg_hops().decimal()
            );
            println!("hops: {}", hops_text(rec.generators()));
        }
        Command::Wire {
            record: (d, m),
            radix,
            rows,
            out,
        } => {
            let db = load_db(db_path)?;
            let rec = db
                .query(d, m)
                .with_context(|| format!("no record d={d} m={m}"))?;
            let table = WiringTable::for_record(rec, radix)?;
            let rows = rows.unwrap_or(0..table.rows() as u32);
            let mut w = open_output(&out)?;
            table.write_rows(&mut w, rows)?;
            w.flush()?;
        }
        Command::Db { action } => db_action(action, db_path)?,
        Command::Compare {
            family,
            radix,
            sizes: (lo, hi),
            out,
        } => {
            let db = load_db(db_path)?;
            let rows = if family == "lh" {
                let recs: Vec<_> = db
                    .iter()
                    .filter(|r| (lo..=hi).contains(&r.d()) && (r.m() as u32) < radix)
                    .collect();
                compare::lh_series(recs, radix)?
            } else {
                let fam: Family = family.parse()?;
                let mut rows = compare::alternative_series(fam, radix, lo..=hi)?;
                compare::attach_lh_ratio(&mut rows, &db)?;
                rows
            };
            let w = open_output(&out)?;
            compare::write_csv(w, &rows)?;
        }
        Command::Spectrum { file } => {
            let set = hoplist::read(&file)?;
            let mut text = String::new();
            for (k, l) in set.eigenvalues().iter().enumerate() {
                text.push_str(&format!("{k:X}\t{l}\n"));
            }
            print!("{text}");
        }
        Command::Metrics { file, histogram } => {
            let p = hoplist::read(&file)?.distance_profile()?;
            println!(
                "diam={} avg={} ({})",
                p.diameter(),
                p.avg_hops(),
                p.avg_hops().decimal()
            );
            if histogram {
                let h: Vec<String> = p.histogram().iter().map(u64::to_string).collect();
                println!("histogram={}", h.join(","));
            }
        }
        Command::Span { file } => {
            let set = hoplist::read(&file)?;
            println!(
                "spans={} rank={}",
                set.span_check(),
                lh_core::gf2::rank(set.hops())
            );
        }
        Command::Neighbors { file, node } => {
            let set = hoplist::read(&file)?;
            let nb: Vec<String> = set
                .neighbors(node)?
                .iter()
                .map(|v| format!("{v:X}"))
                .collect();
            println!("{}", nb.join(" "));
        }
        Command::Cut { file, walsh, signs } => {
            let set = hoplist::read(&file)?;
            let x = match (walsh, signs) {
                (Some(k), _) => walsh_partition(WalshIndex::new(k, set.n())?)?,
                (None, Some(s)) => PartitionVector::new(
                    s.chars()
                        .map(|c| match c {
                            '+' => Ok(1),
                            '-' => Ok(-1),
                            _ => bail!("sign string may contain only + and -"),
                        })
                        .collect::<Result<Vec<i8>>>()?,
                )?,
                (None, None) => bail!("give --walsh or --signs"),
            };
            println!("cut={}", cut_value(&set, &x)?);
        }
        Command::Parity { x } => println!("{}", parity(u64::from(x))),
        Command::Walsh { n, k, x } => {
            let idx = WalshIndex::new(k, n)?;
            match x {
                Some(x) => {
                    if x as usize >= n {
                        bail!("x = {x:X} out of range for n = {n}");
                    }
                    println!(
                        "binary={} algebraic={}",
                        idx.binary(x),
                        idx.algebraic(x)
                    );
                }
                None => {
                    let row: Vec<String> = (0..n as u32)
                        .map(|x| idx.algebraic(x).to_string())
                        .collect();
                    println!("{}", row.join(","));
                }
            }
        }
        Command::Fwht { values } => {
            let mut v = values
                .split(',')
                .map(|t| t.trim().parse::<i64>())
                .collect::<Result<Vec<_>, _>>()
                .context("values must be comma-separated integers")?;
            fwht_in_place(&mut v)?;
            let s: Vec<String> = v.iter().map(i64::to_string).collect();
            println!("{}", s.join(","));
        }
        Command::Diagonalize { file, out } => {
            let d = diagonalize(&hoplist::read(&file)?)?;
            emit(&out, &with_map_comment(&d.set, &d.map, None))?;
        }
        Command::Equiv { file, map, out } => {
            let images = map
                .split(',')
                .map(|t| parse_hex(t.trim()).map_err(anyhow::Error::msg))
                .collect::<Result<Vec<u32>>>()?;
            let map = EquivalenceMap::new(images)?;
            let set = apply_equivalence(&hoplist::read(&file)?, &map)?;
            emit(&out, &hoplist::render(&set))?;
        }
        Command::Expand {
            old,
            new,
            budget,
            seed,
            out,
        } => {
            let e = min_change_expansion(&hoplist::read(&old)?, &hoplist::read(&new)?, budget, seed)?;
            emit(&out, &with_map_comment(&e.set, &e.map, Some(e.cost)))?;
        }
        Command::Shorten { file, hop, out } => {
            if hop == 0 {
                bail!("hop positions start at 1");
            }
            let set = shorten(&hoplist::read(&file)?, hop - 1)?;
            emit(&out, &hoplist::render(&set))?;
        }
        Command::Search { dim, m, budget, out } => {
            let (set, r) = optimize_direct(dim, m, budget)?;
            emit(&out, &format!("# b={} B={}\n{}", r.b, r.links, hoplist::render(&set)))?;
        }
        Command::Phi { external, b } => println!("{}", rational_text(oversubscription(external, b)?)),
    }
    Ok(())
}

fn with_map_comment(set: &GeneratorSet, map: &EquivalenceMap, cost: Option<usize>) -> String {
    let images: Vec<String> = map.images().iter().map(|h| format!("{h:X}")).collect();
    let mut text = format!("# map: {}\n", images.join(","));
    if let Some(c) = cost {
        text.push_str(&format!("# changed hops: {c}\n"));
    }
    text + &hoplist::render(set)
}

fn build(kind: Build) -> Result<()> {
    match kind {
        Build::Hd {
            dim,
            m,
            diagonalize,
            reduce,
            out,
        } => {
            let mut set = lh_hd(HdParams::new(dim, m)?, diagonalize)?;
            if let Some(r) = reduce {
                set = lh_hd_reduced(&set, r)?;
            }
            emit(&out, &hoplist::render(&set))
        }
        Build::B3 { dim, seed, out } => emit(&out, &hoplist::render(&low_density_b3(dim, seed)?)),
        Build::Augment { file, out } => {
            emit(&out, &hoplist::render(&augment_odd_b(&hoplist::read(&file)?)?))
        }
        Build::Mesh { dim, out } => emit(&out, &hoplist::render(&full_mesh(dim)?)),
        Build::Optimize {
            file,
            objective,
            allow_lower_b,
            depth,
            budget,
            out,
        } => {
            let opts = SecondaryOptions {
                objective: match objective {
                    ObjectiveArg::Diameter => Objective::Diameter,
                    ObjectiveArg::Avg => Objective::AvgHops,
                },
                hold_b: !allow_lower_b,
                depth,
                budget,
            };
            let set = optimize_secondary(&hoplist::read(&file)?, opts)?;
            emit(&out, &hoplist::render(&set))
        }
    }
}

fn db_action(action: DbAction, path: Option<&Path>) -> Result<()> {
    match action {
        DbAction::Ingest { file } => {
            let path = path.context("db ingest needs --db or LH_DB")?;
            let mut db = if path.exists() {
                SolutionsDb::load(path)?
            } else {
                SolutionsDb::new()
            };
            let rec = db.ingest_code_file(&file)?;
            db.save(path)?;
            println!(
                "record d={} m={} b={} diam={} avg={}",
                rec.d(),
                rec.m(),
                rec.b(),
                rec.diameter(),
                rec.avg_hops()
            );
        }
        DbAction::List => {
            let db = load_db(path)?;
            let mut w = BufWriter::new(io::stdout().lock());
            for rec in db.iter() {
                writeln!(
                    w,
                    "d={} m={} b={} diam={} avg={} ({})\t{}",
                    rec.d(),
                    rec.m(),
                    rec.b(),
                    rec.diameter(),
                    rec.avg_hops(),
                    rec.avg_hops().decimal(),
                    rec.provenance()
                )?;
            }
            w.flush()?;
        }
        DbAction::Verify => {
            let db = load_db(path)?;
            db.verify_all()?;
            println!("ok: {} records", db.len());
        }
        DbAction::Seed => {
            let path = path.context("db seed needs --db or LH_DB")?;
            let db = SolutionsDb::seeded()?;
            db.save(path)?;
            println!("seeded {} records into {}", db.len(), path.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
