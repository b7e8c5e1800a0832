use std::fmt;
use std::str::FromStr;

use crate::filters::{FilterKind, SimilarityRule, DEFAULT_MIN_COUNT};
use crate::ranking::{MarginalSource, Measure};
use crate::skipgram::{SkipBudget, SkipConfig};
use crate::weighting::{WeightKind, WeightParams};

pub const DEFAULT_FIXED_LEVELS: [usize; 9] = [0, 1, 2, 3, 4, 5, 6, 7, 8];
pub const DEFAULT_VARIABLE_LEVELS: [f64; 4] = [0.5, 1.0, 1.5, 2.0];

/// One level of the skip stage.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SkipLevel {
    Fixed(usize),
    /// Window in seconds.
    Variable(f64),
}

impl SkipLevel {
    pub fn mode(&self) -> &'static str {
        match self {
            SkipLevel::Fixed(_) => "fixed",
            SkipLevel::Variable(_) => "variable",
        }
    }

    /// Level value as written in reports (`5`, `1.5`).
    pub fn level_text(&self) -> String {
        match *self {
            SkipLevel::Fixed(t) => t.to_string(),
            SkipLevel::Variable(w) => format!("{w}"),
        }
    }

    pub fn skip_config(&self, n: usize, budget: SkipBudget) -> SkipConfig {
        match *self {
            SkipLevel::Fixed(t) => SkipConfig::fixed(n, t).with_budget(budget),
            SkipLevel::Variable(w) => SkipConfig::variable(n, w),
        }
    }
}

impl fmt::Display for SkipLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.mode(), self.level_text())
    }
}

impl FromStr for SkipLevel {
    type Err = String;

    /// Accepts `fixed:<t>` or `variable:<seconds>`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (mode, val) = s
            .split_once(':')
            .ok_or_else(|| format!("skip level '{s}' must look like fixed:<t> or variable:<w>"))?;
        match mode {
            "fixed" => val
                .parse::<usize>()
                .map(SkipLevel::Fixed)
                .map_err(|_| format!("bad fixed skip '{val}'")),
            "variable" => match val.parse::<f64>() {
                Ok(w) if w.is_finite() && w > 0.0 => Ok(SkipLevel::Variable(w)),
                _ => Err(format!("bad variable window '{val}'")),
            },
            other => Err(format!("unknown skip mode '{other}'")),
        }
    }
}

/// Options shared by every configuration of a run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PipelineOptions {
    pub n: usize,
    pub budget: SkipBudget,
    pub similarity: SimilarityRule,
    pub marginals: MarginalSource,
    pub weight_params: WeightParams,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        PipelineOptions {
            n: 3,
            budget: SkipBudget::Total,
            similarity: SimilarityRule::default(),
            marginals: MarginalSource::default(),
            weight_params: WeightParams::default(),
        }
    }
}

/// One path through the pipeline.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PipelineConfig {
    pub skip: SkipLevel,
    pub weight: WeightKind,
    pub filter: FilterKind,
    pub rank: Measure,
}

/// The levels of every stage; the grid is their Cartesian product.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    pub fixed_levels: Vec<usize>,
    pub variable_levels: Vec<f64>,
    pub weights: Vec<WeightKind>,
    pub filters: Vec<FilterKind>,
    pub measures: Vec<Measure>,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec::with_min_count(DEFAULT_MIN_COUNT)
    }
}

impl GridSpec {
    pub fn with_min_count(min_count: f64) -> Self {
        GridSpec {
            fixed_levels: DEFAULT_FIXED_LEVELS.to_vec(),
            variable_levels: DEFAULT_VARIABLE_LEVELS.to_vec(),
            weights: WeightKind::ALL.to_vec(),
            filters: FilterKind::all(min_count).to_vec(),
            measures: Measure::ALL.to_vec(),
        }
    }

    pub fn skip_levels(&self) -> Vec<SkipLevel> {
        self.fixed_levels
            .iter()
            .map(|&t| SkipLevel::Fixed(t))
            .chain(self.variable_levels.iter().map(|&w| SkipLevel::Variable(w)))
            .collect()
    }

    pub fn len(&self) -> usize {
        (self.fixed_levels.len() + self.variable_levels.len())
            * self.weights.len()
            * self.filters.len()
            * self.measures.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// All configurations, skip level outermost and rank measure innermost.
    pub fn configs(&self) -> Vec<PipelineConfig> {
        let mut out = Vec::with_capacity(self.len());
        for skip in self.skip_levels() {
            for &weight in &self.weights {
                for &filter in &self.filters {
                    for &rank in &self.measures {
                        out.push(PipelineConfig {
                            skip,
                            weight,
                            filter,
                            rank,
                        });
                    }
                }
            }
        }
        out
    }
}
