//! Token weighting functions.
//!
//! Every function maps a token's performed onsets (seconds, one per member)
//! to a count value in `[0, 1]`.

use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum WeightKind {
    Count,
    Periodicity,
    Resonance,
    Proximity,
    ResonantPeriodicity,
}

impl WeightKind {
    pub const ALL: [WeightKind; 5] = [
        WeightKind::Count,
        WeightKind::Periodicity,
        WeightKind::Resonance,
        WeightKind::Proximity,
        WeightKind::ResonantPeriodicity,
    ];

    pub fn name(self) -> &'static str {
        match self {
            WeightKind::Count => "count",
            WeightKind::Periodicity => "periodicity",
            WeightKind::Resonance => "resonance",
            WeightKind::Proximity => "proximity",
            WeightKind::ResonantPeriodicity => "resonant-periodicity",
        }
    }

    /// Whether the function reads onsets at all.
    pub fn needs_onsets(self) -> bool {
        self != WeightKind::Count
    }
}

impl fmt::Display for WeightKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for WeightKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "count" => Ok(WeightKind::Count),
            "periodicity" => Ok(WeightKind::Periodicity),
            "resonance" => Ok(WeightKind::Resonance),
            "proximity" => Ok(WeightKind::Proximity),
            "resonant-periodicity" | "resonant_periodicity" => Ok(WeightKind::ResonantPeriodicity),
            other => Err(format!("unknown weight '{other}'")),
        }
    }
}

/// A weight together with a flag for tokens whose value came from a
/// degenerate-case convention (e.g. all members simultaneous).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Weighted {
    pub value: f64,
    pub degenerate: bool,
}

impl Weighted {
    fn ok(value: f64) -> Self {
        Weighted {
            value,
            degenerate: false,
        }
    }

    fn flagged(value: f64) -> Self {
        Weighted {
            value,
            degenerate: true,
        }
    }
}

/// Resonance and decay constants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightParams {
    /// Resonant frequency in Hz.
    pub f0: f64,
    /// Damping constant.
    pub beta: f64,
    /// Proximity half-life in seconds.
    pub half_life: f64,
}

impl Default for WeightParams {
    fn default() -> Self {
        WeightParams {
            f0: 2.0,
            beta: 1.12,
            half_life: 1.0,
        }
    }
}

/// Maps a phase onto `[-0.5, 0.5)`.
pub fn wrap_phase(x: f64) -> f64 {
    let r = x - x.floor();
    if r >= 0.5 {
        r - 1.0
    } else {
        r
    }
}

/// Circle-map phases of onsets against a period, starting at phase 0.
pub fn phases(onsets: &[f64], period: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(onsets.len());
    let mut phi = 0.0;
    for (i, _) in onsets.iter().enumerate() {
        if i > 0 {
            phi = wrap_phase(phi + (onsets[i] - onsets[i - 1]) / period);
        }
        out.push(phi);
    }
    out
}

/// Mean resultant length of a set of phases (in cycles).
pub fn mean_resultant_length(phases: &[f64]) -> f64 {
    if phases.is_empty() {
        return 0.0;
    }
    let (c, s) = phases.iter().fold((0.0, 0.0), |(c, s), &p| {
        (c + (TAU * p).cos(), s + (TAU * p).sin())
    });
    (c * c + s * s).sqrt() / phases.len() as f64
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Periodicity {
    pub value: f64,
    /// Candidate period (seconds) with the smallest resultant length.
    pub period: Option<f64>,
}

/// Minimum resultant length over the token's own IOIs as candidate periods.
/// Ties go to the shorter period. `period` is `None` when every IOI is 0.
pub fn periodicity(onsets: &[f64]) -> Periodicity {
    let mut best: Option<(f64, f64)> = None;
    for w in onsets.windows(2) {
        let p = w[1] - w[0];
        if p <= 0.0 {
            continue;
        }
        let r = mean_resultant_length(&phases(onsets, p));
        best = match best {
            Some((br, bp)) if r > br || (r == br && p >= bp) => Some((br, bp)),
            _ => Some((r, p)),
        };
    }
    match best {
        Some((r, p)) => Periodicity {
            value: r.clamp(0.0, 1.0),
            period: Some(p),
        },
        None => Periodicity {
            value: 1.0,
            period: None,
        },
    }
}

/// Raw damped-oscillator resonance amplitude at frequency `f` (Hz).
pub fn resonance_amplitude(f: f64, params: &WeightParams) -> f64 {
    let f0 = params.f0;
    let a = ((f0 * f0 - f * f).powi(2) + params.beta * f * f).sqrt();
    let b = (f0.powi(4) + f.powi(4)).sqrt();
    1.0 / a - 1.0 / b
}

/// Location and value of the resonance maximum over `f > 0`.
pub fn resonance_peak(params: &WeightParams) -> (f64, f64) {
    // Coarse log-spaced scan, then golden-section refinement.
    let (lo_exp, hi_exp, steps) = (-3.0f64, 3.0f64, 6000usize);
    let mut best_i = 0usize;
    let mut best_v = f64::MIN;
    for i in 0..=steps {
        let f = 10f64.powf(lo_exp + (hi_exp - lo_exp) * i as f64 / steps as f64);
        let v = resonance_amplitude(f, params);
        if v > best_v {
            best_v = v;
            best_i = i;
        }
    }
    let at = |i: usize| 10f64.powf(lo_exp + (hi_exp - lo_exp) * i as f64 / steps as f64);
    let mut a = at(best_i.saturating_sub(1));
    let mut b = at((best_i + 1).min(steps));
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    for _ in 0..200 {
        if resonance_amplitude(c, params) > resonance_amplitude(d, params) {
            b = d;
        } else {
            a = c;
        }
        c = b - g * (b - a);
        d = a + g * (b - a);
        if (b - a).abs() < 1e-15 {
            break;
        }
    }
    let f = (a + b) / 2.0;
    (f, resonance_amplitude(f, params))
}

fn default_peak() -> (f64, f64) {
    static PEAK: OnceLock<(f64, f64)> = OnceLock::new();
    *PEAK.get_or_init(|| resonance_peak(&WeightParams::default()))
}

/// Computes weights for tokens under fixed parameters.
#[derive(Debug, Clone, Copy)]
pub struct Weigher {
    params: WeightParams,
    peak: f64,
}

impl Default for Weigher {
    fn default() -> Self {
        Weigher::new(WeightParams::default())
    }
}

impl Weigher {
    pub fn new(params: WeightParams) -> Self {
        let peak = if params == WeightParams::default() {
            default_peak().1
        } else {
            resonance_peak(&params).1
        };
        Weigher { params, peak }
    }

    pub fn params(&self) -> &WeightParams {
        &self.params
    }

    /// Raw resonance maximum used for normalisation.
    pub fn resonance_max(&self) -> f64 {
        self.peak
    }

    pub fn weigh(&self, kind: WeightKind, onsets: &[f64]) -> Weighted {
        match kind {
            WeightKind::Count => w_count(),
            WeightKind::Periodicity => self.periodicity(onsets),
            WeightKind::Resonance => self.resonance(onsets),
            WeightKind::Proximity => self.proximity(onsets),
            WeightKind::ResonantPeriodicity => self.resonant_periodicity(onsets),
        }
    }

    pub fn periodicity(&self, onsets: &[f64]) -> Weighted {
        if onsets.len() < 2 {
            return Weighted::ok(1.0);
        }
        let p = periodicity(onsets);
        match p.period {
            Some(_) => Weighted::ok(p.value),
            None => Weighted::flagged(1.0),
        }
    }

    /// Normalised resonance at the frequency of the periodicity argmin period.
    pub fn resonance(&self, onsets: &[f64]) -> Weighted {
        match periodicity(onsets).period {
            Some(period) => {
                let raw = resonance_amplitude(1.0 / period, &self.params).max(0.0);
                Weighted::ok((raw / self.peak).clamp(0.0, 1.0))
            }
            None => Weighted::flagged(0.0),
        }
    }

    /// Mean exponential decay over consecutive IOIs.
    pub fn proximity(&self, onsets: &[f64]) -> Weighted {
        if onsets.len() < 2 {
            return Weighted::ok(1.0);
        }
        let sum: f64 = onsets
            .windows(2)
            .map(|w| 2f64.powf((w[0] - w[1]) / self.params.half_life))
            .sum();
        Weighted::ok((sum / (onsets.len() - 1) as f64).clamp(0.0, 1.0))
    }

    pub fn resonant_periodicity(&self, onsets: &[f64]) -> Weighted {
        let p = self.periodicity(onsets);
        let r = self.resonance(onsets);
        Weighted {
            value: p.value * r.value,
            degenerate: p.degenerate || r.degenerate,
        }
    }
}

/// Indicator weight.
pub fn w_count() -> Weighted {
    Weighted::ok(1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wrap_boundaries() {
        assert_eq!(wrap_phase(0.5), -0.5);
        assert_eq!(wrap_phase(1.0), 0.0);
        assert_eq!(wrap_phase(0.75), -0.25);
        assert_eq!(wrap_phase(-0.25), -0.25);
        assert!((wrap_phase(1.0 / 1.5) + 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn isochronous_and_bigrams() {
        let w = Weigher::default();
        assert_eq!(w.periodicity(&[0.0, 1.0, 2.0]).value, 1.0);
        assert_eq!(w.periodicity(&[3.0, 3.7]).value, 1.0);
    }

    #[test]
    fn irregular_trigram() {
        let p = periodicity(&[0.0, 1.0, 2.5]);
        assert!((p.value - 1.0 / 3.0).abs() < 1e-12);
        assert_eq!(p.period, Some(1.0));
    }

    #[test]
    fn simultaneous_members_are_flagged() {
        let w = Weigher::default();
        let p = w.periodicity(&[1.0, 1.0, 1.0]);
        assert_eq!(p, Weighted::flagged(1.0));
        assert_eq!(w.resonance(&[1.0, 1.0]), Weighted::flagged(0.0));
    }

    #[test]
    fn resonance_values() {
        let params = WeightParams::default();
        let raw = resonance_amplitude(2.0, &params);
        assert!((raw - 0.2956788959648971).abs() < 1e-12);
        let (f, a) = resonance_peak(&params);
        // Independent optimiser reference: argmax 1.9074850685529225, max 0.3026774890769801.
        assert!((f - 1.9074850685529225).abs() < 1e-6);
        assert!((a - 0.3026774890769801).abs() < 1e-12);
        let w = Weigher::default();
        let at_peak = w.resonance(&[0.0, 1.0 / f]).value;
        assert!((at_peak - 1.0).abs() < 1e-9);
        let fast = w.resonance(&[0.0, 0.01]).value;
        assert!(fast < 1e-6);
    }

    #[test]
    fn proximity_values() {
        let w = Weigher::default();
        assert_eq!(w.proximity(&[0.0, 1.0]).value, 0.5);
        assert_eq!(w.proximity(&[2.0, 2.0]).value, 1.0);
        assert_eq!(w.proximity(&[0.0, 1.0, 3.0]).value, 0.375);
    }

    #[test]
    fn product_bounded_by_factors() {
        let w = Weigher::default();
        let on = [0.0, 0.4, 1.3, 1.5];
        let p = w.periodicity(&on).value;
        let r = w.resonance(&on).value;
        let rp = w.resonant_periodicity(&on).value;
        assert!((rp - p * r).abs() < 1e-15);
        assert!(rp <= p.min(r));
    }

    #[test]
    fn parse_names() {
        for k in WeightKind::ALL {
            assert_eq!(k.name().parse::<WeightKind>().unwrap(), k);
        }
        assert!("bogus".parse::<WeightKind>().is_err());
    }
}
