use rayon::prelude::*;

use super::config::{GridSpec, PipelineConfig, PipelineOptions, SkipLevel};
use super::stats::reciprocal_rank;
use super::EvalError;
use crate::corpus::Corpus;
use crate::filters::FilterKind;
use crate::ranking::{rank, score, MarginalSource, Measure, RankedList, TokenSet, TypeTable};
use crate::skipgram::EncodedPiece;
use crate::vlt::VltPattern;
use crate::weighting::{Weigher, WeightKind};

/// Everything produced by one pass through the pipeline.
#[derive(Debug, Clone)]
pub struct MineResult {
    pub table: TypeTable,
    pub list: RankedList,
    /// Competition rank of the query, if one was given and it survived.
    pub query_rank: Option<usize>,
    /// Tokens whose weight fell back to a documented default.
    pub degenerate_weights: usize,
}

fn check_query(query: Option<&VltPattern>, n: usize) -> Result<(), EvalError> {
    match query {
        Some(q) if q.len() != n => Err(EvalError::QueryLength {
            expected: n,
            got: q.len(),
        }),
        _ => Ok(()),
    }
}

/// Builds the weighted type table for one skip level and weight.
pub fn weighted_table(
    tokens: &TokenSet,
    weight: WeightKind,
    weigher: &Weigher,
) -> (TypeTable, usize) {
    let (w, degenerate) = tokens.weights(weight, weigher);
    (TypeTable::build(tokens, &w), degenerate)
}

/// Runs enumerate, weight, aggregate, filter, score and rank for one
/// configuration.
pub fn run_config(
    corpus: &Corpus,
    config: &PipelineConfig,
    opts: &PipelineOptions,
    query: Option<&VltPattern>,
) -> Result<MineResult, EvalError> {
    check_query(query, opts.n)?;
    let skip = config.skip.skip_config(opts.n, opts.budget);
    let tokens = TokenSet::from_corpus(corpus, &skip)?;
    let weigher = Weigher::new(opts.weight_params);
    let (table, degenerate_weights) = weighted_table(&tokens, config.weight, &weigher);
    let ids = config.filter.apply(&table, opts.similarity);
    let list = rank(&table, &ids, config.rank, opts.marginals)?;
    let query_rank = query
        .and_then(|q| table.id_of(q))
        .and_then(|id| list.rank_of(id));
    Ok(MineResult {
        table,
        list,
        query_rank,
        degenerate_weights,
    })
}

/// Quotes a CSV field.
pub(crate) fn csv_quote(s: &str) -> String {
    format!("\"{}\"", s.replace('"', "\"\""))
}

impl MineResult {
    /// Ranked list as CSV `rank,score,count,coverage,type`, followed by a
    /// `# query` line when a query is given.
    pub fn to_csv(&self, query: Option<&VltPattern>) -> String {
        use std::fmt::Write as _;
        let mut s = String::from("rank,score,count,coverage,type\n");
        for e in &self.list.entries {
            let _ = writeln!(
                s,
                "{},{},{},{},{}",
                e.rank,
                e.score,
                self.table.count(e.id),
                self.table.coverage(e.id),
                csv_quote(&self.table.key(e.id).to_string())
            );
        }
        if let Some(q) = query {
            let _ = match self.query_rank {
                Some(r) => writeln!(s, "# query {q} rank {r}"),
                None => writeln!(s, "# query {q} absent"),
            };
        }
        s
    }
}

/// Query outcome for one grid configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridRow {
    pub config: PipelineConfig,
    pub query_rank: Option<usize>,
}

impl GridRow {
    pub fn rr(&self) -> f64 {
        reciprocal_rank(self.query_rank)
    }
}

/// Rows in configuration order.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct GridResult {
    pub rows: Vec<GridRow>,
    /// Degenerate-weight token counts per (skip level, weight).
    pub degenerate_weights: Vec<(SkipLevel, WeightKind, usize)>,
}

fn score_vector(
    table: &TypeTable,
    measure: Measure,
    src: MarginalSource,
) -> Result<Vec<Option<f64>>, EvalError> {
    (0..table.len())
        .into_par_iter()
        .map(|id| Ok(score(table, id, measure, src)?.filter(|s| s.is_finite())))
        .collect()
}

/// Query ranks for every (filter, measure) pair of one weighted table,
/// filters outer and measures inner.
fn ranks_for_table(
    table: &TypeTable,
    query: &VltPattern,
    spec: &GridSpec,
    opts: &PipelineOptions,
) -> Result<Vec<Option<usize>>, EvalError> {
    let mut out = vec![None; spec.filters.len() * spec.measures.len()];
    let Some(qid) = table.id_of(query) else {
        return Ok(out);
    };
    let kept: Vec<Vec<bool>> = spec
        .filters
        .iter()
        .map(|f| {
            let mut mask = vec![false; table.len()];
            for id in f.apply(table, opts.similarity) {
                mask[id] = true;
            }
            mask
        })
        .collect();
    for (mi, &measure) in spec.measures.iter().enumerate() {
        let scores = score_vector(table, measure, opts.marginals)?;
        let Some(q) = scores[qid] else { continue };
        for (fi, mask) in kept.iter().enumerate() {
            if !mask[qid] {
                continue;
            }
            let better = scores
                .iter()
                .zip(mask)
                .filter(|(s, &keep)| keep && matches!(s, Some(v) if *v > q))
                .count();
            out[fi * spec.measures.len() + mi] = Some(better + 1);
        }
    }
    Ok(out)
}

/// Runs every configuration of `spec` and records the query's rank.
///
/// Token sets are built once per skip level and shared by all weights,
/// filters and measures. `jobs` caps the worker count (`None` = all cores).
/// Output order and values do not depend on `jobs`.
pub fn run_grid(
    corpus: &Corpus,
    spec: &GridSpec,
    opts: &PipelineOptions,
    query: &VltPattern,
    jobs: Option<usize>,
) -> Result<GridResult, EvalError> {
    check_query(Some(query), opts.n)?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(j) = jobs {
        builder = builder.num_threads(j.max(1));
    }
    let pool = builder
        .build()
        .map_err(|e| EvalError::Config(format!("cannot start worker pool: {e}")))?;
    let weigher = Weigher::new(opts.weight_params);
    let levels = spec.skip_levels();

    type Block = (Vec<Option<usize>>, usize);
    let blocks: Vec<Vec<Block>> = pool.install(|| {
        let pieces: Vec<EncodedPiece> = corpus.pieces.par_iter().map(EncodedPiece::new).collect();
        levels
            .par_iter()
            .map(|level| {
                let tokens =
                    TokenSet::from_encoded(&pieces, &level.skip_config(opts.n, opts.budget))?;
                spec.weights
                    .par_iter()
                    .map(|&w| {
                        let (table, degenerate) = weighted_table(&tokens, w, &weigher);
                        Ok((ranks_for_table(&table, query, spec, opts)?, degenerate))
                    })
                    .collect::<Result<Vec<_>, EvalError>>()
            })
            .collect::<Result<Vec<_>, EvalError>>()
    })?;

    let configs = spec.configs();
    let mut ranks = Vec::with_capacity(configs.len());
    let mut degenerate_weights = Vec::new();
    for (level, per_weight) in levels.iter().zip(blocks) {
        for (&w, (r, degenerate)) in spec.weights.iter().zip(per_weight) {
            ranks.extend(r);
            degenerate_weights.push((*level, w, degenerate));
        }
    }
    let rows = configs
        .into_iter()
        .zip(ranks)
        .map(|(config, query_rank)| GridRow { config, query_rank })
        .collect();
    Ok(GridResult {
        rows,
        degenerate_weights,
    })
}

impl GridResult {
    /// Reciprocal ranks of the rows matching `pred`.
    pub fn group(&self, pred: impl Fn(&PipelineConfig) -> bool) -> Vec<f64> {
        self.rows
            .iter()
            .filter(|r| pred(&r.config))
            .map(GridRow::rr)
            .collect()
    }

    /// True when the query is absent from every row matching `pred`.
    pub fn all_absent(&self, pred: impl Fn(&PipelineConfig) -> bool) -> bool {
        self.rows
            .iter()
            .filter(|r| pred(&r.config))
            .all(|r| r.query_rank.is_none())
    }
}

/// Filter name match that ignores the frequency threshold.
pub(crate) fn same_filter(a: &FilterKind, b: &FilterKind) -> bool {
    a.name() == b.name()
}
