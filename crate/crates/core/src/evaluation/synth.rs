//! Seeded synthetic corpora with a query pattern planted at known gaps.

use std::fmt::Write as _;

use num_rational::Rational64;
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::EvalError;
use crate::corpus::{parse_corpus, prepare, Corpus, CorpusError, PrepareReport};
use crate::ic::IcSet;
use crate::vlt::{Vlt, VltPattern};

const BASS_LOW: i32 = 40;
const BASS_SPAN: i32 = 12;
const DURATIONS: [(i64, i64); 3] = [(1, 2), (1, 1), (2, 1)];
const JITTER: f64 = 0.1;
/// Relative weights of bass motions 0..11 for noise chords.
const BASS_MOTION_WEIGHTS: [u32; 12] = [6, 1, 3, 1, 1, 4, 1, 4, 1, 1, 2, 1];

#[derive(Debug, Clone, PartialEq)]
pub struct SynthSpec {
    pub pieces: usize,
    /// Slices per piece.
    pub length: usize,
    /// Number of distinct noise chord shapes.
    pub vocabulary: usize,
    /// Zipf exponent for noise chord frequencies.
    pub zipf: f64,
    pub pattern: VltPattern,
    /// Fraction of pieces that receive planted instances.
    pub rate: f64,
    /// Inclusive range of planted instances per chosen piece.
    pub instances: (usize, usize),
    /// Inclusive range of interpolated chords per instance, summed over all
    /// gaps of the instance.
    pub gaps: (usize, usize),
    /// Inclusive tempo range in beats per minute.
    pub tempo: (f64, f64),
    pub seed: u64,
}

impl SynthSpec {
    pub fn new(pattern: VltPattern, seed: u64) -> Self {
        SynthSpec {
            pieces: 20,
            length: 500,
            vocabulary: 60,
            zipf: 1.0,
            pattern,
            rate: 0.6,
            instances: (4, 5),
            gaps: (1, 5),
            tempo: (60.0, 140.0),
            seed,
        }
    }

    fn validate(&self) -> Result<(), EvalError> {
        let bad = |m: &str| Err(EvalError::Config(m.to_string()));
        if self.pieces == 0 || self.length == 0 {
            return bad("synthetic corpus needs at least one piece and one slice");
        }
        if !(0.0..=1.0).contains(&self.rate) {
            return bad("plant rate must lie in [0, 1]");
        }
        if self.instances.0 > self.instances.1 || self.gaps.0 > self.gaps.1 {
            return bad("empty instance or gap range");
        }
        if self.pattern.len() < 2 && self.gaps.1 > 0 {
            return bad("a single-chord pattern has no gaps to fill");
        }
        if !(self.tempo.0 > 0.0 && self.tempo.0 <= self.tempo.1) {
            return bad("bad tempo range");
        }
        if self.vocabulary == 0 {
            return bad("noise vocabulary must not be empty");
        }
        let span = self.pattern.len() + self.gaps.1;
        if self.rate > 0.0 && self.instances.1 > 0 && span * self.instances.1 > self.length {
            return Err(EvalError::Config(format!(
                "{} planted instances spanning up to {span} slices do not fit in {} slices",
                self.instances.1, self.length
            )));
        }
        Ok(())
    }
}

/// One planted occurrence of the pattern.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlantedInstance {
    pub piece_id: String,
    /// Slice indices of the pattern members.
    pub indices: Vec<usize>,
}

impl PlantedInstance {
    /// Interpolated chords between consecutive members.
    pub fn gaps(&self) -> Vec<usize> {
        self.indices.windows(2).map(|w| w[1] - w[0] - 1).collect()
    }

    pub fn total_gap(&self) -> usize {
        self.gaps().iter().sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthCorpus {
    /// Note-event text of the corpus.
    pub text: String,
    pub manifest: Vec<PlantedInstance>,
}

impl SynthCorpus {
    /// Parses and prepares the generated text.
    pub fn corpus(&self) -> Result<(Corpus, PrepareReport), CorpusError> {
        let parsed = parse_corpus(self.text.as_bytes(), "<synthetic>")?;
        prepare(&parsed)
    }

    pub fn manifest_tsv(&self) -> String {
        let mut s = String::from("piece_id\tinstance\tindices\tgaps\ttotal_gap\n");
        let mut counter: Option<(&str, usize)> = None;
        for inst in &self.manifest {
            let k = match counter {
                Some((p, k)) if p == inst.piece_id => k + 1,
                _ => 0,
            };
            counter = Some((&inst.piece_id, k));
            let join = |v: &[usize]| {
                v.iter()
                    .map(|x| x.to_string())
                    .collect::<Vec<_>>()
                    .join(",")
            };
            let _ = writeln!(
                s,
                "{}\t{}\t{}\t{}\t{}",
                inst.piece_id,
                k,
                join(&inst.indices),
                join(&inst.gaps()),
                inst.total_gap()
            );
        }
        s
    }
}

type Shape = (IcSet, u8);

fn shape(v: &Vlt) -> Shape {
    (v.intervals(), v.top_ic())
}

/// Every encodable chord shape with one to three interval classes.
fn all_shapes() -> Vec<Shape> {
    let mut out = Vec::new();
    for bits in (2u16..0x1000).step_by(2) {
        let s = IcSet::from_bits(bits);
        if s.len() > 3 {
            continue;
        }
        out.push((s, 0));
        for t in s.iter() {
            out.push((s, t));
        }
    }
    out
}

/// MIDI pitches of a block chord over `bass`.
fn voice(bass: i32, (s, top): Shape) -> Vec<i32> {
    let mut p = vec![bass];
    p.extend(s.iter().map(|ic| bass + 12 + ic as i32));
    p.push(bass + 24 + top as i32);
    p
}

fn wrap_bass(b: i32) -> i32 {
    BASS_LOW + (b - BASS_LOW).rem_euclid(BASS_SPAN)
}

/// Random composition of `total` into `parts` non-negative integers.
fn split_gaps(rng: &mut ChaCha8Rng, total: usize, parts: usize) -> Vec<usize> {
    let mut g = vec![0; parts];
    for _ in 0..total {
        g[rng.random_range(0..parts)] += 1;
    }
    g
}

/// Generates a corpus of block-chord pieces, one slice per chord, with the
/// pattern planted in `round(rate * pieces)` pieces.
pub fn generate_synthetic_corpus(spec: &SynthSpec) -> Result<SynthCorpus, EvalError> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let pattern_shapes: Vec<Shape> = spec.pattern.chords().iter().map(shape).collect();
    let mut vocab: Vec<Shape> = all_shapes()
        .into_iter()
        .filter(|s| !pattern_shapes.contains(s))
        .collect();
    vocab.shuffle(&mut rng);
    vocab.truncate(spec.vocabulary);
    let zipf: Vec<f64> = (1..=vocab.len())
        .map(|r| 1.0 / (r as f64).powf(spec.zipf))
        .collect();
    let shape_dist = WeightedIndex::new(&zipf).expect("positive weights");
    let motion_dist = WeightedIndex::new(BASS_MOTION_WEIGHTS).expect("positive weights");

    let n_planted = (spec.rate * spec.pieces as f64).round() as usize;
    let mut order: Vec<usize> = (0..spec.pieces).collect();
    order.shuffle(&mut rng);
    let mut planted = vec![false; spec.pieces];
    for &p in &order[..n_planted.min(spec.pieces)] {
        planted[p] = true;
    }

    let width = spec.pieces.to_string().len().max(3);
    let mut text = format!(
        "# synthetic corpus: seed {}, {} pieces x {} slices\n",
        spec.seed, spec.pieces, spec.length
    );
    let mut manifest = Vec::new();
    let m = spec.pattern.len();

    for (pi, &is_planted) in planted.iter().enumerate() {
        let id = format!("synth-{pi:0width$}");
        // Noise stream.
        let mut chords: Vec<(i32, Shape)> = Vec::with_capacity(spec.length);
        let mut bass = BASS_LOW + rng.random_range(0..BASS_SPAN);
        for _ in 0..spec.length {
            chords.push((bass, vocab[shape_dist.sample(&mut rng)]));
            bass = wrap_bass(bass + motion_dist.sample(&mut rng) as i32);
        }
        // Planted instances, one per equal segment of the piece.
        if is_planted {
            let k = rng.random_range(spec.instances.0..=spec.instances.1);
            let seg = spec.length.checked_div(k).unwrap_or(0);
            for j in 0..k {
                let total = rng.random_range(spec.gaps.0..=spec.gaps.1);
                let gaps = split_gaps(&mut rng, total, m - 1);
                let span = m + total;
                let start = j * seg + rng.random_range(0..=seg - span);
                let mut idx = vec![start];
                for g in &gaps {
                    idx.push(idx.last().unwrap() + g + 1);
                }
                let mut b = BASS_LOW + rng.random_range(0..BASS_SPAN);
                for (c, &i) in spec.pattern.chords().iter().zip(&idx) {
                    if let Some(step) = c.incoming() {
                        b = wrap_bass(b + step as i32);
                    }
                    chords[i] = (b, shape(c));
                }
                manifest.push(PlantedInstance {
                    piece_id: id.clone(),
                    indices: idx,
                });
            }
        }
        // Timing: score durations from a small set, performed durations
        // jittered around the piece tempo.
        let bpm = rng.random_range(spec.tempo.0..=spec.tempo.1);
        let spb = 60.0 / bpm;
        let mut onset = Rational64::from_integer(0);
        let mut perf = 0.0f64;
        for (bass, sh) in &chords {
            let (num, den) = DURATIONS[rng.random_range(0..DURATIONS.len())];
            let dur = Rational64::new(num, den);
            let pdur = (num as f64 / den as f64) * spb * (1.0 + rng.random_range(-JITTER..=JITTER));
            let perf_text = format!("{perf:.6}");
            let pdur_text = format!("{pdur:.6}");
            for p in voice(*bass, *sh) {
                let _ = writeln!(text, "{id}\t{onset}\t{dur}\t{p}\t{perf_text}\t{pdur_text}");
            }
            onset += dur;
            // Advance by the rounded value so written onsets stay monotone.
            perf = perf_text.parse::<f64>().unwrap() + pdur_text.parse::<f64>().unwrap();
        }
    }
    Ok(SynthCorpus { text, manifest })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::skipgram::{EncodedPiece, SkipConfig};
    use crate::vlt::parse_pattern;

    const MRDCC: &str = "<5,9*,_>[0]<4,7*,10>[5]<4,_,_>";

    fn small(seed: u64) -> SynthSpec {
        SynthSpec {
            pieces: 4,
            length: 80,
            rate: 0.5,
            instances: (2, 3),
            ..SynthSpec::new(parse_pattern(MRDCC).unwrap(), seed)
        }
    }

    #[test]
    fn deterministic() {
        let a = generate_synthetic_corpus(&small(7)).unwrap();
        let b = generate_synthetic_corpus(&small(7)).unwrap();
        assert_eq!(a, b);
        let c = generate_synthetic_corpus(&small(8)).unwrap();
        assert_ne!(a.text, c.text);
    }

    #[test]
    fn rate_zero_plants_nothing() {
        let s = SynthSpec {
            rate: 0.0,
            ..small(1)
        };
        let out = generate_synthetic_corpus(&s).unwrap();
        assert!(out.manifest.is_empty());
        assert_eq!(out.manifest_tsv().lines().count(), 1);
    }

    #[test]
    fn shapes_cover_every_encodable_chord() {
        // 1..3 interval classes from 11: 11 + 55 + 165 sets, top choices |s|+1.
        assert_eq!(all_shapes().len(), 11 * 2 + 55 * 3 + 165 * 4);
    }

    #[test]
    fn gaps_too_large_is_an_error() {
        let s = SynthSpec {
            length: 10,
            ..small(1)
        };
        assert!(generate_synthetic_corpus(&s).is_err());
    }

    #[test]
    fn planted_instances_encode_as_the_pattern() {
        let spec = small(3);
        let out = generate_synthetic_corpus(&spec).unwrap();
        let (corpus, report) = out.corpus().unwrap();
        assert_eq!(report.reduction.replaced, 0);
        assert_eq!(corpus.n_compositions(), 4);
        for p in &corpus.pieces {
            assert_eq!(p.slices.len(), 80);
        }
        for inst in &out.manifest {
            let piece = corpus
                .pieces
                .iter()
                .find(|p| p.id == inst.piece_id)
                .unwrap();
            let enc = EncodedPiece::new(piece);
            assert_eq!(enc.type_key(&inst.indices), spec.pattern);
            let g = inst.total_gap();
            assert!((1..=5).contains(&g));
            let mut found_at = Vec::new();
            for t in 0..=6 {
                let mut hit = false;
                enc.for_each_tuple(&SkipConfig::fixed(3, t), |idx| {
                    hit |= idx == inst.indices.as_slice()
                })
                .unwrap();
                found_at.push(hit);
            }
            for (t, hit) in found_at.iter().enumerate() {
                assert_eq!(*hit, t >= g, "instance {inst:?} at t={t}");
            }
        }
    }

    #[test]
    fn noise_never_contains_pattern_shapes() {
        let spec = small(11);
        let out = generate_synthetic_corpus(&spec).unwrap();
        let (corpus, _) = out.corpus().unwrap();
        let shapes: Vec<Shape> = spec.pattern.chords().iter().map(shape).collect();
        let planted: Vec<(String, usize)> = out
            .manifest
            .iter()
            .flat_map(|m| m.indices.iter().map(move |&i| (m.piece_id.clone(), i)))
            .collect();
        for p in &corpus.pieces {
            for (i, v) in p.encode().iter().enumerate() {
                if shapes.contains(&shape(v)) {
                    assert!(planted.contains(&(p.id.clone(), i)));
                }
            }
        }
    }
}
