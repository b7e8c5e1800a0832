use std::fmt::Write as _;

use super::config::{PipelineConfig, SkipLevel};
use super::run::{same_filter, GridResult, GridRow};
use super::stats::{compare_groups, mrr, Comparison};
use super::EvalError;
use crate::filters::FilterKind;
use crate::ranking::Measure;
use crate::weighting::WeightKind;

/// Default number of planned comparisons for the Bonferroni correction.
pub const DEFAULT_COMPARISONS: usize = 6;

pub const GRID_HEADER: &str = "skip_mode,skip_level,weight,filter,rank_measure,query_rank,rr";

/// A level of one pipeline stage, used to group grid rows.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Level {
    SkipMode(&'static str),
    Skip(SkipLevel),
    Weight(WeightKind),
    Filter(FilterKind),
    Rank(Measure),
}

impl Level {
    pub fn stage(&self) -> &'static str {
        match self {
            Level::SkipMode(_) => "skip_mode",
            Level::Skip(_) => "skip",
            Level::Weight(_) => "weight",
            Level::Filter(_) => "filter",
            Level::Rank(_) => "rank",
        }
    }

    pub fn label(&self) -> String {
        match self {
            Level::SkipMode(m) => m.to_string(),
            Level::Skip(s) => s.to_string(),
            Level::Weight(w) => w.name().to_string(),
            Level::Filter(f) => f.name().to_string(),
            Level::Rank(m) => m.name().to_string(),
        }
    }

    pub fn matches(&self, c: &PipelineConfig) -> bool {
        match self {
            Level::SkipMode(m) => c.skip.mode() == *m,
            Level::Skip(s) => c.skip == *s,
            Level::Weight(w) => c.weight == *w,
            Level::Filter(f) => same_filter(&c.filter, f),
            Level::Rank(m) => c.rank == *m,
        }
    }
}

/// MRR of one level.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelMrr {
    pub level: Level,
    pub n: usize,
    pub mrr: f64,
    /// Query absent from every configuration of the level.
    pub na: bool,
}

fn distinct_levels(grid: &GridResult) -> Vec<Level> {
    let mut out: Vec<Level> = Vec::new();
    let push = |l: Level, out: &mut Vec<Level>| {
        if !out
            .iter()
            .any(|x| x.stage() == l.stage() && x.label() == l.label())
        {
            out.push(l);
        }
    };
    for r in &grid.rows {
        push(Level::SkipMode(r.config.skip.mode()), &mut out);
    }
    for r in &grid.rows {
        push(Level::Skip(r.config.skip), &mut out);
    }
    for r in &grid.rows {
        push(Level::Weight(r.config.weight), &mut out);
    }
    for r in &grid.rows {
        push(Level::Filter(r.config.filter), &mut out);
    }
    for r in &grid.rows {
        push(Level::Rank(r.config.rank), &mut out);
    }
    out
}

/// MRR of every level present in the grid, stage by stage.
pub fn level_mrrs(grid: &GridResult) -> Vec<LevelMrr> {
    distinct_levels(grid)
        .into_iter()
        .map(|level| {
            let rr = grid.group(|c| level.matches(c));
            LevelMrr {
                level,
                n: rr.len(),
                mrr: mrr(&rr),
                na: grid.all_absent(|c| level.matches(c)),
            }
        })
        .collect()
}

/// One row of the stage-by-stage comparison table.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub stage: &'static str,
    pub level_a: String,
    pub level_b: String,
    pub n_a: usize,
    pub n_b: usize,
    /// `None` when the compared level is unavailable (no rows or query
    /// never found).
    pub comparison: Option<Comparison>,
}

fn compare(grid: &GridResult, a: &Level, b: &Level, k: usize) -> (usize, usize, Comparison) {
    let ga = grid.group(|c| a.matches(c));
    let gb = grid.group(|c| b.matches(c));
    (ga.len(), gb.len(), compare_groups(&ga, &gb, k))
}

/// Highest-MRR level among `candidates`; ties go to the earlier one.
fn best(grid: &GridResult, candidates: &[Level]) -> Option<Level> {
    let mut out: Option<(Level, f64)> = None;
    for l in candidates {
        let m = mrr(&grid.group(|c| l.matches(c)));
        if out.as_ref().is_none_or(|(_, bm)| m > *bm) {
            out = Some((*l, m));
        }
    }
    out.map(|(l, _)| l)
}

fn row(grid: &GridResult, stage: &'static str, a: Option<Level>, b: Level, k: usize) -> SummaryRow {
    match a {
        Some(a) if !grid.all_absent(|c| a.matches(c)) => {
            let (n_a, n_b, c) = compare(grid, &a, &b, k);
            SummaryRow {
                stage,
                level_a: a.label(),
                level_b: b.label(),
                n_a,
                n_b,
                comparison: Some(c),
            }
        }
        _ => SummaryRow {
            stage,
            level_a: a.map(|l| l.label()).unwrap_or_else(|| "NA".into()),
            level_b: b.label(),
            n_a: 0,
            n_b: grid.group(|c| b.matches(c)).len(),
            comparison: None,
        },
    }
}

/// Best level of each stage against its baseline: variable vs fixed skips,
/// best fixed skip vs 0, best variable window vs 0 skips, best weight vs
/// count, best filter vs none, best measure vs counts.
pub fn summarize(grid: &GridResult, n_comparisons: usize) -> Vec<SummaryRow> {
    let levels = distinct_levels(grid);
    let pick = |stage: &str, exclude: &dyn Fn(&Level) -> bool| -> Vec<Level> {
        levels
            .iter()
            .filter(|l| l.stage() == stage && !exclude(l))
            .copied()
            .collect()
    };
    let zero = Level::Skip(SkipLevel::Fixed(0));
    let fixed = pick(
        "skip",
        &|l| !matches!(l, Level::Skip(SkipLevel::Fixed(t)) if *t > 0),
    );
    let variable = pick("skip", &|l| {
        !matches!(l, Level::Skip(SkipLevel::Variable(_)))
    });
    let weights = pick("weight", &|l| matches!(l, Level::Weight(WeightKind::Count)));
    let filters = pick("filter", &|l| matches!(l, Level::Filter(FilterKind::None)));
    let measures = pick("rank", &|l| matches!(l, Level::Rank(Measure::Counts)));
    let k = n_comparisons;
    vec![
        row(
            grid,
            "skip",
            Some(Level::SkipMode("variable")),
            Level::SkipMode("fixed"),
            k,
        ),
        row(grid, "fixed", best(grid, &fixed), zero, k),
        row(grid, "variable", best(grid, &variable), zero, k),
        row(
            grid,
            "weight",
            best(grid, &weights),
            Level::Weight(WeightKind::Count),
            k,
        ),
        row(
            grid,
            "filter",
            best(grid, &filters),
            Level::Filter(FilterKind::None),
            k,
        ),
        row(
            grid,
            "rank",
            best(grid, &measures),
            Level::Rank(Measure::Counts),
            k,
        ),
    ]
}

/// Shortest round-trip text, switching to exponent form for tiny values.
fn num(x: f64) -> String {
    if x != 0.0 && x.abs() < 1e-6 {
        format!("{x:e}")
    } else {
        x.to_string()
    }
}

fn opt(v: Option<f64>) -> String {
    v.map(num).unwrap_or_else(|| "NA".into())
}

pub fn grid_csv(grid: &GridResult) -> String {
    let mut s = String::from(GRID_HEADER);
    s.push('\n');
    for r in &grid.rows {
        let c = &r.config;
        let rank = r
            .query_rank
            .map(|x| x.to_string())
            .unwrap_or_else(|| "NA".into());
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{}",
            c.skip.mode(),
            c.skip.level_text(),
            c.weight.name(),
            c.filter.name(),
            c.rank.name(),
            rank,
            num(r.rr())
        );
    }
    s
}

pub fn summary_csv(rows: &[SummaryRow]) -> String {
    let mut s = String::from("stage,level_a,level_b,n_a,n_b,mrr_a,mrr_b,delta,t,df,p,d,na\n");
    for r in rows {
        match &r.comparison {
            Some(c) => {
                let _ = writeln!(
                    s,
                    "{},{},{},{},{},{},{},{},{},{},{},{},false",
                    r.stage,
                    r.level_a,
                    r.level_b,
                    r.n_a,
                    r.n_b,
                    num(c.mrr_a),
                    num(c.mrr_b),
                    num(c.delta),
                    opt(c.t),
                    c.df,
                    opt(c.p),
                    num(c.d)
                );
            }
            None => {
                let _ = writeln!(
                    s,
                    "{},{},{},{},{},NA,NA,NA,NA,NA,NA,NA,true",
                    r.stage, r.level_a, r.level_b, r.n_a, r.n_b
                );
            }
        }
    }
    s
}

pub fn levels_csv(levels: &[LevelMrr]) -> String {
    let mut s = String::from("stage,level,n,mrr,na\n");
    for l in levels {
        let _ = writeln!(
            s,
            "{},{},{},{},{}",
            l.level.stage(),
            l.level.label(),
            l.n,
            num(l.mrr),
            l.na
        );
    }
    s
}

/// Reads a grid CSV written by [`grid_csv`]. Frequency filters get
/// `min_count` as their threshold.
pub fn parse_grid_csv(text: &str, min_count: f64) -> Result<GridResult, EvalError> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim() == GRID_HEADER => {}
        _ => return Err(EvalError::Config("grid CSV header missing".into())),
    }
    let mut rows = Vec::new();
    for (i, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let bad = |what: &str| EvalError::Config(format!("grid CSV line {}: {what}", i + 1));
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 7 {
            return Err(bad("expected 7 fields"));
        }
        let skip: SkipLevel = format!("{}:{}", f[0], f[1])
            .parse()
            .map_err(|e: String| bad(&e))?;
        let weight: WeightKind = f[2].parse().map_err(|e: String| bad(&e))?;
        let filter = FilterKind::parse(f[3], min_count).map_err(|e| bad(&e))?;
        let rank: Measure = f[4].parse().map_err(|e: String| bad(&e))?;
        let query_rank = match f[5] {
            "NA" => None,
            r => Some(r.parse::<usize>().map_err(|_| bad("bad query_rank"))?),
        };
        rows.push(GridRow {
            config: PipelineConfig {
                skip,
                weight,
                filter,
                rank,
            },
            query_rank,
        });
    }
    Ok(GridResult {
        rows,
        degenerate_weights: Vec::new(),
    })
}
