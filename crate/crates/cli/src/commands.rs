use std::collections::{BTreeSet, HashMap};
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use cauchon_core::counting::{cauchon_s, gamma_size, kaneko_sum_squares, poly_bernoulli_nn, rank_count};
use cauchon_core::diagrams::{build_w_r_gamma, enumerate_gamma, enumerate_w, survives};
use cauchon_core::qminors::classify_rank;
use cauchon_core::restoration::restore;
use cauchon_core::{ClassificationRecord, Diagram, Position, RVector, TorusPresentation, MAX_GRID, MAX_SYMBOLIC_GRID};
use num_bigint::BigUint;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::output::{csv_field, write_json, CliError, CliResult, Format};

/// Largest `n` for the closed-form counts when `--allow-large` is given.
pub const MAX_COUNT_LARGE: usize = 10;
/// Largest `n` for symbolic work without `--allow-large`.
pub const MAX_SYMBOLIC_DEFAULT: usize = 3;

pub fn check_range(n: usize, max: usize, what: &str, hint: bool) -> CliResult<()> {
    if n == 0 || n > max {
        let extra = if hint { " (larger sizes need --allow-large)" } else { "" };
        return Err(CliError::Usage(format!("{what} supports n in 1..={max}, got {n}{extra}")));
    }
    Ok(())
}

pub fn symbolic_limit(allow_large: bool) -> usize {
    if allow_large {
        MAX_SYMBOLIC_GRID
    } else {
        MAX_SYMBOLIC_DEFAULT
    }
}

fn big_json(x: &BigUint) -> Value {
    match u64::try_from(x) {
        Ok(v) => json!(v),
        Err(_) => json!(x.to_string()),
    }
}

pub fn count(n: usize, allow_large: bool, format: Format, out: &mut dyn Write) -> CliResult<bool> {
    let max = if allow_large { MAX_COUNT_LARGE } else { MAX_GRID };
    check_range(n, max, "count", !allow_large)?;
    let ranks: Vec<BigUint> = (0..=n).map(|t| rank_count(n, t)).collect();
    let total: BigUint = ranks.iter().sum();
    let cauchon = cauchon_s(n);
    let bernoulli = poly_bernoulli_nn(n);
    let squares = kaneko_sum_squares(n);
    let agree = cauchon == bernoulli && bernoulli == squares && squares == total;
    match format {
        Format::Ascii => {
            writeln!(out, "n = {n}")?;
            writeln!(out, "rank  count")?;
            for (t, c) in ranks.iter().enumerate() {
                writeln!(out, "{t:<5} {c}")?;
            }
            writeln!(out, "total {total}")?;
            writeln!(out, "cauchon         {cauchon}")?;
            writeln!(out, "poly-bernoulli  {bernoulli}")?;
            writeln!(out, "sum-of-squares  {squares}")?;
            writeln!(out, "agree: {}", if agree { "yes" } else { "NO" })?;
        }
        Format::Json => {
            let rows: Vec<Value> =
                ranks.iter().enumerate().map(|(t, c)| json!({"rank": t, "count": big_json(c)})).collect();
            write_json(
                out,
                &json!({
                    "n": n,
                    "ranks": rows,
                    "total": big_json(&total),
                    "cauchon": big_json(&cauchon),
                    "poly_bernoulli": big_json(&bernoulli),
                    "sum_of_squares": big_json(&squares),
                    "agree": agree,
                }),
            )?;
        }
        Format::Csv => {
            writeln!(out, "kind,key,value")?;
            for (t, c) in ranks.iter().enumerate() {
                writeln!(out, "rank,{t},{c}")?;
            }
            writeln!(out, "total,sum,{total}")?;
            writeln!(out, "total,cauchon,{cauchon}")?;
            writeln!(out, "total,poly_bernoulli,{bernoulli}")?;
            writeln!(out, "total,sum_of_squares,{squares}")?;
            writeln!(out, "agree,all,{agree}")?;
        }
    }
    Ok(agree)
}

pub struct EnumerateOptions<'a> {
    pub n: usize,
    pub rank: Option<usize>,
    pub classify: bool,
    pub cache: Option<&'a Path>,
    pub allow_large: bool,
}

pub fn enumerate(opts: &EnumerateOptions<'_>, format: Format, out: &mut dyn Write) -> CliResult<bool> {
    let n = opts.n;
    if opts.rank.is_none() && !opts.classify {
        check_range(n, MAX_GRID, "enumerate", false)?;
        if opts.cache.is_some() {
            return Err(CliError::Usage("--cache only applies with --rank or --classify".into()));
        }
        write_diagrams(n, format, out)?;
        return Ok(true);
    }
    check_range(n, symbolic_limit(opts.allow_large), "enumerate with classification", !opts.allow_large)?;
    if let Some(t) = opts.rank {
        if t > n {
            return Err(CliError::Usage(format!("--rank must be in 0..={n}")));
        }
    }
    let records = classify_cached(n, opts.cache, opts.allow_large)?;
    let selected: Vec<&ClassificationRecord> =
        records.iter().filter(|r| opts.rank.is_none_or(|t| r.rank == t)).collect();
    write_records(&selected, format, out)?;
    Ok(true)
}

fn write_diagrams(n: usize, format: Format, out: &mut dyn Write) -> CliResult<()> {
    let diagrams = enumerate_w(n)?;
    match format {
        Format::Ascii => {
            for w in diagrams {
                writeln!(out, "{w}")?;
            }
        }
        Format::Csv => {
            writeln!(out, "diagram")?;
            for w in diagrams {
                writeln!(out, "{w}")?;
            }
        }
        Format::Json => {
            write!(out, "[")?;
            for (i, w) in diagrams.enumerate() {
                write!(out, "{}\n  \"{w}\"", if i == 0 { "" } else { "," })?;
            }
            writeln!(out, "\n]")?;
        }
    }
    Ok(())
}

fn join(v: &[usize], sep: &str) -> String {
    v.iter().map(usize::to_string).collect::<Vec<_>>().join(sep)
}

fn write_records(records: &[&ClassificationRecord], format: Format, out: &mut dyn Write) -> CliResult<()> {
    match format {
        Format::Ascii => {
            for r in records {
                let witness = match &r.witness {
                    Some(m) => format!("rows={} cols={}", join(m.rows(), ","), join(m.cols(), ",")),
                    None => "none".into(),
                };
                writeln!(out, "{} rank={} witness={} gap_free={}", r.diagram, r.rank, witness, r.gap_free)?;
            }
        }
        Format::Json => write_json(out, records)?,
        Format::Csv => {
            writeln!(out, "diagram,rank,witness_rows,witness_cols,gap_free")?;
            for r in records {
                let (rows, cols) = match &r.witness {
                    Some(m) => (join(m.rows(), " "), join(m.cols(), " ")),
                    None => (String::new(), String::new()),
                };
                writeln!(out, "{},{},{},{},{}", r.diagram, r.rank, rows, cols, r.gap_free)?;
            }
        }
    }
    Ok(())
}

fn load_cache(path: &Path, n: usize) -> CliResult<HashMap<Diagram, ClassificationRecord>> {
    let mut map = HashMap::new();
    if !path.exists() {
        return Ok(map);
    }
    let lines: Vec<String> = BufReader::new(File::open(path)?).lines().collect::<Result<_, _>>()?;
    for (lineno, line) in lines.iter().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let rec: ClassificationRecord = match serde_json::from_str(line) {
            Ok(rec) => rec,
            // An interrupted run can leave a partial final record behind.
            Err(_) if lineno + 1 == lines.len() => {
                eprintln!("{}:{}: ignoring truncated cache record", path.display(), lineno + 1);
                continue;
            }
            Err(e) => return Err(CliError::Usage(format!("{}:{}: bad cache record: {e}", path.display(), lineno + 1))),
        };
        if rec.diagram.n() != n {
            return Err(CliError::Usage(format!(
                "{}:{}: cached diagram {} has size {}, expected {n}",
                path.display(),
                lineno + 1,
                rec.diagram,
                rec.diagram.n()
            )));
        }
        if !rec.gap_free {
            return Err(CliError::Invariant(format!("cached record for {} is not gap-free", rec.diagram)));
        }
        map.insert(rec.diagram, rec);
    }
    Ok(map)
}

/// Classifies every diagram of size `n`, reusing and extending a JSON-lines
/// cache when one is given. Records come back in enumeration order.
fn classify_cached(n: usize, cache: Option<&Path>, progress: bool) -> CliResult<Vec<ClassificationRecord>> {
    let diagrams: Vec<Diagram> = enumerate_w(n)?.collect();
    let mut known = match cache {
        Some(path) => load_cache(path, n)?,
        None => HashMap::new(),
    };
    let todo: Vec<&Diagram> = diagrams.iter().filter(|w| !known.contains_key(*w)).collect();
    let sink = match cache {
        Some(path) => Some(Mutex::new(OpenOptions::new().create(true).append(true).open(path)?)),
        None => None,
    };
    let p = TorusPresentation::new(n);
    let done = AtomicUsize::new(0);
    let total = todo.len();
    let step = (total / 20).max(1);
    let fresh: Vec<ClassificationRecord> = todo
        .par_iter()
        .map(|w| -> CliResult<ClassificationRecord> {
            let rec = classify_rank(&p, w)?;
            if let Some(file) = &sink {
                let line = serde_json::to_string(&rec)?;
                let mut f = file.lock().expect("cache writer poisoned");
                writeln!(f, "{line}")?;
            }
            let k = done.fetch_add(1, Ordering::Relaxed) + 1;
            if progress && (k.is_multiple_of(step) || k == total) {
                eprintln!("classified {k}/{total}");
            }
            Ok(rec)
        })
        .collect::<CliResult<_>>()?;
    for rec in fresh {
        known.insert(rec.diagram, rec);
    }
    Ok(diagrams.iter().map(|w| known.remove(w).expect("every diagram classified")).collect())
}

pub fn restore_cmd(n: usize, diagram: &str, allow_large: bool, format: Format, out: &mut dyn Write) -> CliResult<bool> {
    let max = if allow_large { MAX_GRID } else { MAX_SYMBOLIC_GRID };
    check_range(n, max, "restore", !allow_large)?;
    let w: Diagram = diagram.parse()?;
    if w.n() != n {
        return Err(CliError::Usage(format!("diagram {w} has size {}, but --n is {n}", w.n())));
    }
    let p = TorusPresentation::new(n);
    let m = restore(&p, &w)?;
    match format {
        Format::Ascii => {
            writeln!(out, "w = {w}")?;
            for pos in Position::all(n) {
                writeln!(out, "y[{},{}] = {}", pos.row, pos.col, m.get(pos.row, pos.col))?;
            }
        }
        Format::Json => {
            let entries: Vec<Value> = Position::all(n)
                .map(|pos| {
                    let e = m.get(pos.row, pos.col);
                    let terms: Vec<Value> = e
                        .sorted_terms()
                        .into_iter()
                        .map(|(mono, c)| json!({"coeff": c.to_string(), "exponents": mono.exponents()}))
                        .collect();
                    json!({"row": pos.row, "col": pos.col, "text": e.to_string(), "terms": terms})
                })
                .collect();
            write_json(out, &json!({"n": n, "diagram": w.to_string(), "entries": entries}))?;
        }
        Format::Csv => {
            writeln!(out, "row,col,value")?;
            for pos in Position::all(n) {
                writeln!(out, "{},{},{}", pos.row, pos.col, csv_field(&m.get(pos.row, pos.col).to_string()))?;
            }
        }
    }
    Ok(true)
}

pub fn localized(n: usize, r: &str, allow_large: bool, format: Format, out: &mut dyn Write) -> CliResult<bool> {
    check_range(n, symbolic_limit(allow_large), "localized", !allow_large)?;
    let r = RVector::parse(n, r)?;
    let p = TorusPresentation::new(n);
    let gammas = enumerate_gamma(&r);
    let size = gamma_size(&r);
    let mut constructed = Vec::with_capacity(gammas.len());
    for g in &gammas {
        let w = build_w_r_gamma(&r, g).map_err(|e| CliError::Invariant(format!("w_r,gamma for {g}: {e}")))?;
        let m = restore(&p, &w)?;
        constructed.push((g, w, survives(&r, &m)));
    }
    let mut surviving = BTreeSet::new();
    for w in enumerate_w(n)? {
        if survives(&r, &restore(&p, &w)?) {
            surviving.insert(w);
        }
    }
    let constructed_set: BTreeSet<Diagram> = constructed.iter().map(|(_, w, _)| *w).collect();
    let distinct = constructed_set.len() == constructed.len();
    let size_ok = BigUint::from(gammas.len()) == size;
    let all_survive = constructed.iter().all(|(_, _, s)| *s);
    let matches = constructed_set == surviving;
    let ok = distinct && size_ok && all_survive && matches;
    match format {
        Format::Ascii => {
            writeln!(out, "n = {n}, r = {r}, t = {}", r.t())?;
            writeln!(out, "gamma_size = {size}, |Gamma_r| = {}", gammas.len())?;
            for (g, w, s) in &constructed {
                writeln!(out, "{g} -> {w}{}", if *s { "" } else { " (does not survive)" })?;
            }
            writeln!(out, "constructed: {} ({})", constructed.len(), if distinct { "distinct" } else { "REPEATED" })?;
            writeln!(out, "surviving: {}", surviving.len())?;
            for w in &surviving {
                writeln!(out, "  {w}")?;
            }
            writeln!(out, "match: {}", if ok { "yes" } else { "NO" })?;
        }
        Format::Json => {
            let items: Vec<Value> = constructed
                .iter()
                .map(|(g, w, s)| json!({"gamma": g.entries(), "diagram": w.to_string(), "survives": s}))
                .collect();
            let surv: Vec<String> = surviving.iter().map(Diagram::to_string).collect();
            write_json(
                out,
                &json!({
                    "n": n,
                    "r": r.entries(),
                    "gamma_size": big_json(&size),
                    "constructed": items,
                    "distinct": distinct,
                    "surviving": surv,
                    "match": ok,
                }),
            )?;
        }
        Format::Csv => {
            writeln!(out, "kind,gamma,diagram,survives")?;
            for (g, w, s) in &constructed {
                writeln!(out, "constructed,{},{w},{s}", csv_field(&join(g.entries(), " ")))?;
            }
            for w in &surviving {
                writeln!(out, "surviving,,{w},true")?;
            }
            writeln!(out, "match,,,{ok}")?;
        }
    }
    Ok(ok)
}
