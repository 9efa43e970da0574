use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use unitsum_cli::{
    to_canonical_json, CertificateReport, CoveringReport, CriticalPointsReport, FieldReport, RewriteReport, TableRow,
    TablesReport, SCHEMA,
};
use unitsum_core::expansion::{
    certify_field, unit_sum_representation, unit_sum_representation_with_delta, DEFAULT_MAX_DEPTH,
};
use unitsum_core::geometry::verify_covering_exact;
use unitsum_core::rewriting::{gamma_order, rewrite_to_signed, values_equal, Word};
use unitsum_core::{load_catalog_with_precision, CatalogEntry, FieldContext, DEFAULT_PRECISION_BITS};

#[derive(Parser)]
#[command(name = "unitsum")]
#[command(about = "Unit sum height bounds for totally complex quartic fields")]
#[command(version)]
struct Cli {
    /// Working precision in bits
    #[arg(long, global = true, env = "UNITSUM_PRECISION_BITS", default_value_t = DEFAULT_PRECISION_BITS)]
    precision: usize,

    /// Output format on standard output
    #[arg(long, global = true, value_enum, default_value_t = Format::Human)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Human,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Table {
    #[value(name = "2")]
    Two,
    #[value(name = "3")]
    Three,
    #[value(name = "5")]
    Five,
    All,
}

#[derive(Subcommand)]
enum Command {
    /// List catalog fields with their expected (w, C, B)
    Catalog,

    /// Certify a field and print its report
    Analyze {
        #[arg(long)]
        field: String,
        /// Alphabet bound; defaults to the smallest passing the covering criterion
        #[arg(long)]
        w: Option<u32>,
        /// auto, 0 (catalog) or 1 (alternate)
        #[arg(long, default_value = "auto")]
        embedding: String,
        #[arg(long, default_value_t = DEFAULT_MAX_DEPTH)]
        max_depth: usize,
    },

    /// Enumerate the critical set
    CriticalPoints {
        #[arg(long)]
        field: String,
        #[arg(long)]
        w: u32,
        /// Also write the JSON report to this path
        #[arg(long)]
        json: Option<PathBuf>,
    },

    /// Write an element as a sum of distinct units
    Expand {
        #[arg(long)]
        field: String,
        /// Integral basis coordinates a0,a1,a2,a3
        #[arg(long, allow_hyphen_values = true)]
        alpha: String,
        #[arg(long)]
        delta: Option<f64>,
        #[arg(long, default_value_t = DEFAULT_MAX_DEPTH)]
        max_depth: usize,
    },

    /// Rewrite a word over the integers into digits -1, 0, 1
    Rewrite {
        /// Digits, most significant first, with an optional @shift suffix
        #[arg(long, allow_hyphen_values = true)]
        word: String,
        #[arg(long)]
        trace: bool,
    },

    /// Recompute the published tables and diff against the catalog
    VerifyTables {
        #[arg(long, value_enum, default_value_t = Table::All)]
        table: Table,
    },

    /// Check the covering criterion for a given w
    Covering {
        #[arg(long)]
        field: String,
        #[arg(long)]
        w: u32,
        /// Also run the polygon clipping verifier
        #[arg(long)]
        exact: bool,
    },

    /// Expand random elements and re-verify every certificate
    RoundTrip {
        /// Field id, or all
        #[arg(long, default_value = "all")]
        field: String,
        #[arg(long, default_value_t = 100)]
        count: usize,
        #[arg(long, default_value_t = 0x5eed)]
        seed: u64,
        /// Coordinates are drawn from [-bound, bound]
        #[arg(long, default_value_t = 20)]
        bound: i64,
    },
}

/// Bad input from the user, reported with exit code 2.
#[derive(Debug, thiserror::Error)]
#[error("{0}")]
struct UsageError(String);

fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.is::<UsageError>() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}

fn emit<T: Serialize>(cli: &Cli, report: &T, human: impl FnOnce()) -> Result<()> {
    match cli.format {
        Format::Json => println!("{}", to_canonical_json(report)?),
        Format::Human => human(),
    }
    Ok(())
}

fn entries(cli: &Cli) -> Result<Vec<CatalogEntry>> {
    load_catalog_with_precision(cli.precision).map_err(|e| usage(e.to_string()))
}

fn entry(cli: &Cli, id: &str) -> Result<CatalogEntry> {
    entries(cli)?.into_iter().find(|e| e.id() == id).ok_or_else(|| usage(format!("unknown field {id:?}")))
}

fn context(e: &CatalogEntry, w: Option<u32>, embedding: &str) -> Result<FieldContext> {
    let idx = match embedding {
        "auto" => None,
        "0" => Some(0),
        "1" => Some(1),
        other => return Err(usage(format!("--embedding must be auto, 0 or 1, got {other:?}"))),
    };
    let ctx = match (w, idx) {
        (None, None) => FieldContext::new(e)?,
        (Some(w), Some(i)) => FieldContext::with_w(e, w, i)?,
        (Some(w), None) => {
            let auto = FieldContext::new(e)?;
            FieldContext::with_w(e, w, auto.embedding_index)?
        }
        (None, Some(i)) => {
            let auto = FieldContext::new(e)?;
            let w = auto.verdict.w_required.unwrap_or(auto.w);
            FieldContext::with_w(e, w, i)?
        }
    };
    Ok(ctx)
}

fn parse_alpha(s: &str) -> Result<[i64; 4]> {
    let v: Vec<i64> = s
        .split(',')
        .map(|t| t.trim().parse::<i64>())
        .collect::<Result<_, _>>()
        .map_err(|e| usage(format!("bad --alpha {s:?}: {e}")))?;
    v.try_into().map_err(|_| usage(format!("--alpha needs 4 coordinates, got {s:?}")))
}

fn run(cli: &Cli) -> Result<bool> {
    match &cli.command {
        Command::Catalog => catalog(cli),
        Command::Analyze { field, w, embedding, max_depth } => analyze(cli, field, *w, embedding, *max_depth),
        Command::CriticalPoints { field, w, json } => critical_points(cli, field, *w, json.as_ref()),
        Command::Expand { field, alpha, delta, max_depth } => expand(cli, field, alpha, *delta, *max_depth),
        Command::Rewrite { word, trace } => rewrite(cli, word, *trace),
        Command::VerifyTables { table } => verify_tables(cli, *table),
        Command::Covering { field, w, exact } => covering(cli, field, *w, *exact),
        Command::RoundTrip { field, count, seed, bound } => round_trip(cli, field, *count, *seed, *bound),
    }
}

fn catalog(cli: &Cli) -> Result<bool> {
    let all = entries(cli)?;
    #[derive(Serialize)]
    struct Row<'a> {
        id: &'a str,
        name: &'a str,
        mu: u32,
        table: Option<u8>,
        marker: unitsum_core::Marker,
        expected: Option<unitsum_core::Expected>,
        has_unit: bool,
    }
    let rows: Vec<Row> = all
        .iter()
        .map(|e| Row {
            id: e.id(),
            name: &e.descriptor.name,
            mu: e.descriptor.mu,
            table: e.descriptor.table,
            marker: e.descriptor.marker,
            expected: e.descriptor.expected,
            has_unit: e.unit.is_some(),
        })
        .collect();
    let report = serde_json::json!({ "schema": SCHEMA, "fields": rows });
    emit(cli, &report, || {
        println!("{:<28} {:>3} {:>5} {:>14}  {:<13}", "id", "mu", "table", "expected", "marker");
        for r in &rows {
            let exp = r.expected.map_or("-".to_string(), |x| {
                format!("({}, {}, {})", x.w, x.c, x.b.map_or("-".to_string(), |b| b.to_string()))
            });
            let table = r.table.map_or("-".to_string(), |t| t.to_string());
            println!("{:<28} {:>3} {:>5} {:>14}  {:<13?}", r.id, r.mu, table, exp, r.marker);
        }
    })?;
    Ok(true)
}

fn analyze(cli: &Cli, field: &str, w: Option<u32>, embedding: &str, max_depth: usize) -> Result<bool> {
    let e = entry(cli, field)?;
    let t = Instant::now();
    let ctx = context(&e, w, embedding)?;
    let cert = certify_field(&ctx, max_depth)?;
    let crit = ctx.critical_set()?;
    let report = FieldReport::new(&ctx, &cert, crit, t.elapsed().as_millis() as u64);
    emit(cli, &report, || {
        println!("field        {}", report.field);
        println!("criterion    {:?} ({:?}, value {:.6} vs bound {:.6})", report.criterion, report.covering.status, report.covering.value, report.covering.bound);
        println!("embedding    pair {} conjugate {}", report.embedding.pair, report.embedding.conjugate);
        println!("w C B        {} {} {}", report.w, report.c, report.b.map_or("-".to_string(), |b| b.to_string()));
        println!("dug          {} ({:?})", report.dug, report.dug_method);
        println!("omega <=     {}", report.omega_bound);
        println!("borderline   {}", report.borderline_points);
        if !report.failures.is_empty() {
            println!("unrepresented critical points: {}", report.failures.len());
        }
        println!("precision    {} bits, {} ms", report.precision_bits, report.elapsed_ms);
    })?;
    Ok(report.failures.is_empty())
}

fn critical_points(cli: &Cli, field: &str, w: u32, json: Option<&PathBuf>) -> Result<bool> {
    let e = entry(cli, field)?;
    let ctx = context(&e, Some(w), "auto")?;
    let crit = ctx.critical_set()?;
    let report = CriticalPointsReport::new(field, w, crit);
    if let Some(path) = json {
        fs::write(path, to_canonical_json(&report)? + "\n").with_context(|| format!("writing {}", path.display()))?;
    }
    emit(cli, &report, || {
        println!("{} points, box {:?}, {} lattice points scanned", report.points.len(), report.box_bounds, report.scanned);
        for p in &crit.points {
            println!("  {}{}", p.point, if p.borderline { "  (borderline)" } else { "" });
        }
    })?;
    Ok(true)
}

fn expand(cli: &Cli, field: &str, alpha: &str, delta: Option<f64>, max_depth: usize) -> Result<bool> {
    let coords = parse_alpha(alpha)?;
    if delta.is_some_and(|d| !(d > 0.0 && d < 1.0)) {
        bail!(usage("--delta must lie in (0, 1)"));
    }
    let e = entry(cli, field)?;
    let ctx = context(&e, None, "auto")?;
    let a = ctx.order().from_i64(coords);
    let cert = match delta {
        Some(d) => unit_sum_representation_with_delta(&ctx, &a, max_depth, d)?,
        None => unit_sum_representation(&ctx, &a, max_depth)?,
    };
    let ok = cert.verify(ctx.order())?;
    let report = CertificateReport::new(field, &cert, ok);
    emit(cli, &report, || {
        println!("alpha = {a}");
        println!("unit  = {}", cert.unit_base);
        for t in &cert.terms {
            let factor = match t.root_index {
                Some(m) => format!("zeta^{m}"),
                None => t.unit.element.to_string(),
            };
            println!("  {} * {} * u^{}", t.coefficient, factor, t.unit.shift);
        }
        println!("{} terms, max coefficient {}, verified {}", cert.terms.len(), cert.max_coefficient(), ok);
    })?;
    Ok(ok)
}

fn rewrite(cli: &Cli, word: &str, trace: bool) -> Result<bool> {
    let x: Word = word.parse().map_err(|e| usage(format!("bad --word {word:?}: {e}")))?;
    let (_, t) = rewrite_to_signed(&x)?;
    let ok = t.replay() == t.final_word && values_equal(&gamma_order(), &x, &t.final_word)?;
    let report = RewriteReport::new(&t, trace);
    emit(cli, &report, || {
        println!("{}", report.output);
        if let Some(steps) = &report.trace {
            for s in steps {
                println!("  {} at {} sign {:+}", s.rule, s.position, s.sign);
            }
        }
    })?;
    Ok(ok)
}

fn verify_tables(cli: &Cli, table: Table) -> Result<bool> {
    let wanted: &[u8] = match table {
        Table::Two => &[2],
        Table::Three => &[3],
        Table::Five => &[5],
        Table::All => &[2, 3, 5],
    };
    let selected: Vec<CatalogEntry> = entries(cli)?
        .into_iter()
        .filter(|e| e.descriptor.table.is_some_and(|t| wanted.contains(&t)) && e.descriptor.expected.is_some())
        .collect();
    let rows: Vec<TableRow> = selected
        .par_iter()
        .map(|e| {
            let ctx = FieldContext::new(e)?;
            let cert = certify_field(&ctx, DEFAULT_MAX_DEPTH)?;
            Ok(TableRow::new(e.id(), e.descriptor.table.unwrap(), e.descriptor.expected.unwrap(), &cert))
        })
        .collect::<Result<_>>()?;
    let matched = rows.iter().filter(|r| r.matches).count();
    let report = TablesReport { schema: SCHEMA, total: rows.len(), matched, rows };
    emit(cli, &report, || {
        let show = |b: Option<usize>| b.map_or("-".to_string(), |b| b.to_string());
        println!("{:<5} {:<28} {:>12} {:>12}", "table", "field", "expected", "computed");
        for r in &report.rows {
            println!(
                "{:<5} {:<28} {:>12} {:>12} {}",
                r.table,
                r.field,
                format!("{} {} {}", r.expected.w, r.expected.c, show(r.expected.b)),
                format!("{} {} {}", r.w, r.c, show(r.b)),
                if r.matches { "ok" } else { "MISMATCH" }
            );
        }
        println!("{}/{} rows match", report.matched, report.total);
    })?;
    Ok(matched == report.total)
}

fn covering(cli: &Cli, field: &str, w: u32, exact: bool) -> Result<bool> {
    let e = entry(cli, field)?;
    let ctx = context(&e, Some(w), "0")?;
    let check = exact.then(|| {
        let eps = ctx.emb.embed_main(&ctx.base);
        verify_covering_exact(&eps, &ctx.alphabet.images_main, &ctx.region, w)
    });
    let report = CoveringReport { schema: SCHEMA, field: field.to_string(), w, verdict: ctx.verdict.clone(), exact: check };
    emit(cli, &report, || {
        let v = &report.verdict;
        println!("{:?} criterion, w = {}: {:?} ({:.6} vs {:.6})", v.criterion, w, v.status, v.value, v.bound);
        if let Some(wr) = v.w_required {
            println!("smallest passing w: {wr}");
        }
        if let Some(c) = &report.exact {
            println!("polygon verifier: {:?}, residual area {:.3e} of {:.3e}", c.status, c.residual_area, c.region_area);
            if let Some([x, y]) = c.witness {
                println!("uncovered point: {x:.6} {y:+.6}i");
            }
        }
    })?;
    Ok(true)
}

fn round_trip(cli: &Cli, field: &str, count: usize, seed: u64, bound: i64) -> Result<bool> {
    let all = entries(cli)?;
    let selected: Vec<&CatalogEntry> = if field == "all" {
        all.iter().filter(|e| e.unit.is_some()).collect()
    } else {
        vec![all.iter().find(|e| e.id() == field).ok_or_else(|| usage(format!("unknown field {field:?}")))?]
    };
    #[derive(Serialize)]
    struct Row {
        field: String,
        count: usize,
        failures: Vec<[i64; 4]>,
    }
    let rows: Vec<Row> = selected
        .par_iter()
        .enumerate()
        .map(|(k, e)| {
            let ctx = FieldContext::new(e)?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(k as u64));
            let mut failures = Vec::new();
            for _ in 0..count {
                let c: [i64; 4] = std::array::from_fn(|_| rng.random_range(-bound..=bound));
                let a = ctx.order().from_i64(c);
                let ok = unit_sum_representation(&ctx, &a, DEFAULT_MAX_DEPTH)
                    .and_then(|cert| Ok(cert.verify(ctx.order())? && cert.max_coefficient() <= ctx.w))
                    .unwrap_or(false);
                if !ok {
                    failures.push(c);
                }
            }
            Ok(Row { field: e.id().to_string(), count, failures })
        })
        .collect::<Result<_>>()
        .map_err(|e: anyhow::Error| anyhow!("round trip: {e:#}"))?;
    let ok = rows.iter().all(|r| r.failures.is_empty());
    let report = serde_json::json!({ "schema": SCHEMA, "seed": seed, "fields": rows });
    emit(cli, &report, || {
        for r in &rows {
            println!("{:<28} {}/{} verified", r.field, r.count - r.failures.len(), r.count);
        }
    })?;
    Ok(ok)
}
