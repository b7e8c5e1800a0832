use statrs::distribution::{ContinuousCDF, StudentsT};

/// 1/rank, or 0 when the query is absent.
pub fn reciprocal_rank(rank: Option<usize>) -> f64 {
    match rank {
        Some(r) if r > 0 => 1.0 / r as f64,
        _ => 0.0,
    }
}

/// Mean of the reciprocal ranks; 0 for an empty group.
pub fn mrr(rrs: &[f64]) -> f64 {
    if rrs.is_empty() {
        return 0.0;
    }
    rrs.iter().sum::<f64>() / rrs.len() as f64
}

/// Outcome of a pooled two-sample t-test between two groups.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Comparison {
    pub mrr_a: f64,
    pub mrr_b: f64,
    /// `mrr_a - mrr_b`.
    pub delta: f64,
    /// `None` when the pooled variance is zero.
    pub t: Option<f64>,
    pub df: usize,
    /// Two-sided p-value after Bonferroni adjustment.
    pub p: Option<f64>,
    /// Cohen's d with the pooled standard deviation.
    pub d: f64,
}

fn mean_var(x: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let m = mrr(x);
    if x.len() < 2 {
        return (m, 0.0);
    }
    let ss: f64 = x.iter().map(|v| (v - m) * (v - m)).sum();
    (m, ss / (n - 1.0))
}

/// Compares group `a` against group `b`; `n_comparisons` is the number of
/// planned comparisons used for the Bonferroni correction.
pub fn compare_groups(a: &[f64], b: &[f64], n_comparisons: usize) -> Comparison {
    let (n1, n2) = (a.len(), b.len());
    let (m1, v1) = mean_var(a);
    let (m2, v2) = mean_var(b);
    let delta = m1 - m2;
    let df = (n1 + n2).saturating_sub(2);
    let mut out = Comparison {
        mrr_a: m1,
        mrr_b: m2,
        delta,
        t: None,
        df,
        p: None,
        d: 0.0,
    };
    if n1 == 0 || n2 == 0 || df == 0 {
        return out;
    }
    let pooled = ((n1 - 1) as f64 * v1 + (n2 - 1) as f64 * v2) / df as f64;
    if pooled.is_nan() || pooled <= 0.0 {
        return out;
    }
    let sp = pooled.sqrt();
    let t = delta / (sp * (1.0 / n1 as f64 + 1.0 / n2 as f64).sqrt());
    out.t = Some(t);
    out.d = delta / sp;
    let dist = StudentsT::new(0.0, 1.0, df as f64).expect("positive degrees of freedom");
    let p = 2.0 * dist.sf(t.abs());
    out.p = Some((p * n_comparisons.max(1) as f64).min(1.0));
    out
}
