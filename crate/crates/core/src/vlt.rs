//! Voice-leading types and the `<S*>[I]` pattern notation.
//!
//! A [`Vlt`] records the interval classes above the bass (`s`), which of
//! them sounds in the top voice, and the bass motion into the chord. The
//! text form is bit-exact:
//!
//! ```text
//! pattern := chord ( "[" int "]" chord )*
//! chord   := "<" slot "," slot "," slot ">"
//! slot    := int "*"? | "_"
//! int     := 0..11
//! ```

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::corpus::Slice;
use crate::ic::IcSet;

/// Maximum number of interval classes a chord may carry above the bass.
pub const MAX_INTERVALS: usize = 3;

/// One voice-leading type.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Vlt {
    s: IcSet,
    /// Interval class of the top voice above the bass; 0 means the top
    /// voice doubles the bass and no member of `s` is starred.
    top: u8,
    i_in: Option<u8>,
}

impl Vlt {
    /// Builds a chord. `top` must be 0 or a member of `s`, and `s` may hold
    /// at most three classes.
    pub fn new(s: IcSet, top: u8, i_in: Option<u8>) -> Option<Self> {
        if s.len() > MAX_INTERVALS || (top != 0 && !s.contains(top)) || top >= 12 {
            return None;
        }
        if matches!(i_in, Some(i) if i >= 12) {
            return None;
        }
        Some(Vlt { s, top, i_in })
    }

    pub fn intervals(&self) -> IcSet {
        self.s
    }

    /// The starred interval class, or `None` when the top voice doubles the bass.
    pub fn top(&self) -> Option<u8> {
        (self.top != 0).then_some(self.top)
    }

    pub fn top_ic(&self) -> u8 {
        self.top
    }

    pub fn incoming(&self) -> Option<u8> {
        self.i_in
    }

    pub fn with_incoming(self, i_in: Option<u8>) -> Self {
        Vlt { i_in, ..self }
    }

    /// Distinct pitch classes in the chord, counting the bass.
    pub fn pitch_class_count(&self) -> usize {
        1 + self.s.len()
    }

    /// Writes only the `<...>` part, without the incoming interval.
    pub fn fmt_chord(&self, f: &mut impl fmt::Write) -> fmt::Result {
        f.write_char('<')?;
        let mut written = 0;
        for ic in self.s.iter() {
            if written > 0 {
                f.write_char(',')?;
            }
            write!(f, "{ic}")?;
            if ic == self.top {
                f.write_char('*')?;
            }
            written += 1;
        }
        while written < MAX_INTERVALS {
            if written > 0 {
                f.write_char(',')?;
            }
            f.write_char('_')?;
            written += 1;
        }
        f.write_char('>')
    }

    pub fn chord_text(&self) -> String {
        let mut s = String::with_capacity(12);
        self.fmt_chord(&mut s).expect("writing to a String");
        s
    }
}

impl fmt::Debug for Vlt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(i) = self.i_in {
            write!(f, "[{i}]")?;
        }
        self.fmt_chord(f)
    }
}

/// Encodes a slice, measuring the incoming interval from `prev` when given.
///
/// Slices that still carry more than three interval classes (i.e. were never
/// passed through oversized-chord reduction) keep their three lowest classes.
pub fn encode_vlt(prev: Option<&Slice>, slice: &Slice) -> Vlt {
    let mut s = slice.interval_classes();
    let mut top = slice.top_interval();
    if s.len() > MAX_INTERVALS {
        s = s.lowest(MAX_INTERVALS);
        if top != 0 && !s.contains(top) {
            top = crate::corpus::closest_member(s, top);
        }
    }
    let i_in = prev.map(|p| bass_interval(p.bass(), slice.bass()));
    Vlt { s, top, i_in }
}

/// Melodic interval class from one bass pitch to the next.
pub fn bass_interval(from: u8, to: u8) -> u8 {
    (to as i32 - from as i32).rem_euclid(12) as u8
}

/// An ordered sequence of chords; the first has no incoming interval.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VltPattern {
    chords: Vec<Vlt>,
}

impl VltPattern {
    /// Wraps a chord list. The first chord's incoming interval is cleared and
    /// every later chord must carry one.
    pub fn new(mut chords: Vec<Vlt>) -> Option<Self> {
        if chords.is_empty() || chords[1..].iter().any(|c| c.i_in.is_none()) {
            return None;
        }
        chords[0].i_in = None;
        Some(VltPattern { chords })
    }

    pub(crate) fn from_raw(chords: Vec<Vlt>) -> Self {
        debug_assert!(!chords.is_empty() && chords[0].i_in.is_none());
        VltPattern { chords }
    }

    pub fn chords(&self) -> &[Vlt] {
        &self.chords
    }

    pub fn len(&self) -> usize {
        self.chords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.chords.is_empty()
    }
}

impl fmt::Display for VltPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (j, c) in self.chords.iter().enumerate() {
            if j > 0 {
                write!(f, "[{}]", c.i_in.expect("validated on construction"))?;
            }
            c.fmt_chord(f)?;
        }
        Ok(())
    }
}

impl fmt::Debug for VltPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "VltPattern({self})")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("pattern parse error at byte {pos}: {msg}")]
pub struct PatternError {
    pub pos: usize,
    pub msg: String,
}

impl FromStr for VltPattern {
    type Err = PatternError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_pattern(s)
    }
}

/// Parses pattern text. Slots holding 0 or a repeated class are folded away,
/// so `<4,7,0>` and `<7,4,_>` both read as `<4,7,_>`.
pub fn parse_pattern(text: &str) -> Result<VltPattern, PatternError> {
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
    };
    let mut chords = Vec::new();
    p.skip_ws();
    chords.push(p.chord(None)?);
    loop {
        p.skip_ws();
        match p.peek() {
            None => break,
            Some(b'[') => {
                let start = p.pos;
                p.pos += 1;
                let i = p.int()?;
                p.expect(b']')?;
                p.skip_ws();
                if p.peek().is_none() {
                    return Err(p.err_at(start, "dangling [I] without a following chord"));
                }
                chords.push(p.chord(Some(i))?);
            }
            Some(_) => return Err(p.err("expected '[' or end of pattern")),
        }
    }
    Ok(VltPattern { chords })
}

/// Canonical text of a pattern.
pub fn format_pattern(p: &VltPattern) -> String {
    p.to_string()
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn err(&self, msg: &str) -> PatternError {
        self.err_at(self.pos, msg)
    }

    fn err_at(&self, pos: usize, msg: &str) -> PatternError {
        PatternError {
            pos,
            msg: msg.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(c) if c.is_ascii_whitespace()) {
            self.pos += 1;
        }
    }

    fn expect(&mut self, c: u8) -> Result<(), PatternError> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(&format!("expected '{}'", c as char)))
        }
    }

    fn int(&mut self) -> Result<u8, PatternError> {
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected an interval class"));
        }
        let digits = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits");
        match digits.parse::<u32>() {
            Ok(v) if v < 12 => Ok(v as u8),
            _ => Err(self.err_at(start, "interval class outside 0..11")),
        }
    }

    fn chord(&mut self, i_in: Option<u8>) -> Result<Vlt, PatternError> {
        self.expect(b'<')?;
        let mut s = IcSet::EMPTY;
        let mut top: Option<u8> = None;
        for slot in 0..MAX_INTERVALS {
            if slot > 0 {
                self.expect(b',')?;
            }
            if self.peek() == Some(b'_') {
                self.pos += 1;
                continue;
            }
            let ic = self.int()?;
            if self.peek() == Some(b'*') {
                if top.is_some() {
                    return Err(self.err("more than one starred slot in a chord"));
                }
                self.pos += 1;
                top = Some(ic);
            }
            if ic != 0 {
                s.insert(ic);
            }
        }
        self.expect(b'>')?;
        Ok(Vlt {
            s,
            top: top.unwrap_or(0),
            i_in,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Slice;
    use num_rational::Rational64;

    fn slice(pitches: &[u8]) -> Slice {
        Slice::new(0, Rational64::from_integer(0), pitches.to_vec())
    }

    #[test]
    fn encodes_root_position_triad() {
        // C3 E4 G4
        let v = encode_vlt(None, &slice(&[48, 64, 67]));
        assert_eq!(v.intervals().to_vec(), vec![4, 7]);
        assert_eq!(v.top(), Some(7));
        assert_eq!(v.incoming(), None);
        assert_eq!(v.chord_text(), "<4,7*,_>");
    }

    #[test]
    fn permutations_and_doublings_reduce() {
        // <4,7,0> and <7,4,0> voicings over C
        let a = encode_vlt(None, &slice(&[48, 52, 55, 60]));
        let b = encode_vlt(None, &slice(&[48, 55, 64, 72]));
        assert_eq!(a.intervals(), b.intervals());
        assert_eq!(a.intervals().to_vec(), vec![4, 7]);
        // Mm7 <4,4,10> and <4,10,10>
        let c = encode_vlt(None, &slice(&[43, 47, 59, 65]));
        let d = encode_vlt(None, &slice(&[43, 47, 53, 65]));
        assert_eq!(c.intervals().to_vec(), vec![4, 10]);
        assert_eq!(d.intervals().to_vec(), vec![4, 10]);
    }

    #[test]
    fn doubled_top_has_no_star() {
        let v = encode_vlt(None, &slice(&[48, 64, 72]));
        assert_eq!(v.top(), None);
        assert_eq!(v.chord_text(), "<4,_,_>");
    }

    #[test]
    fn incoming_interval_is_mod_twelve() {
        let prev = slice(&[55, 67]);
        let cur = slice(&[48, 64]);
        assert_eq!(encode_vlt(Some(&prev), &cur).incoming(), Some(5));
    }

    #[test]
    fn parses_mrdcc() {
        let p = parse_pattern("<5,9*,_>[0]<4,7*,10>[5]<4,_,_>").unwrap();
        assert_eq!(p.len(), 3);
        assert_eq!(p.chords()[0].top(), Some(9));
        assert_eq!(p.chords()[1].incoming(), Some(0));
        assert_eq!(p.chords()[1].intervals().to_vec(), vec![4, 7, 10]);
        assert_eq!(p.chords()[2].incoming(), Some(5));
        assert_eq!(p.chords()[2].top(), None);
        assert_eq!(p.to_string(), "<5,9*,_>[0]<4,7*,10>[5]<4,_,_>");
    }

    #[test]
    fn unigram() {
        let p = parse_pattern("<4,7*,_>").unwrap();
        assert_eq!(p.len(), 1);
        assert_eq!(p.chords()[0].incoming(), None);
    }

    #[test]
    fn canonicalises_order_and_zero() {
        let p = parse_pattern("<7,4,0>").unwrap();
        assert_eq!(p.to_string(), "<4,7,_>");
        let p = parse_pattern("<10*,_,4>").unwrap();
        assert_eq!(p.to_string(), "<4,10*,_>");
        let p = parse_pattern("<4,0*,7>").unwrap();
        assert_eq!(p.to_string(), "<4,7,_>");
    }

    #[test]
    fn rejects_bad_input() {
        let e = parse_pattern("<4*,7*,_>").unwrap_err();
        assert_eq!(e.pos, 5);
        assert!(parse_pattern("<4,12,_>").is_err());
        let e = parse_pattern("<4,7,_>[3]").unwrap_err();
        assert_eq!(e.pos, 7);
        assert!(parse_pattern("<4, 7,_>").is_err());
        assert!(parse_pattern("<4,7>").is_err());
        assert!(parse_pattern("").is_err());
        assert!(parse_pattern("<4,7,_><4,7,_>").is_err());
    }
}
