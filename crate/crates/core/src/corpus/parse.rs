//! Tab-separated note-event reader.
//!
//! One note per line: `piece_id onset_score duration_score pitch
//! [onset_perf duration_perf]`. Score times are rationals (`3/2`) or
//! decimals (`1.5`); `#` starts a comment line.

use std::collections::{HashMap, HashSet};
use std::fs;
use std::io::{BufRead, BufReader, Read};
use std::path::Path;

use num_rational::Rational64;

use super::{CorpusError, NoteEvent, NotePiece};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseWarning {
    pub source_name: String,
    pub line: usize,
    pub msg: String,
}

impl std::fmt::Display for ParseWarning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}:{}: {}", self.source_name, self.line, self.msg)
    }
}

/// Notes grouped by piece, pieces in order of first appearance.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ParsedCorpus {
    pub pieces: Vec<NotePiece>,
    pub warnings: Vec<ParseWarning>,
}

impl ParsedCorpus {
    pub fn n_notes(&self) -> usize {
        self.pieces.iter().map(|p| p.notes.len()).sum()
    }
}

#[derive(Default)]
struct Builder {
    pieces: Vec<NotePiece>,
    by_id: HashMap<String, usize>,
    seen: HashSet<(usize, Rational64, u8)>,
    warnings: Vec<ParseWarning>,
}

impl Builder {
    fn feed<R: Read>(&mut self, input: R, source_name: &str) -> Result<(), CorpusError> {
        let reader = BufReader::new(input);
        for (i, line) in reader.lines().enumerate() {
            let lineno = i + 1;
            let line = line.map_err(|e| CorpusError::Io {
                path: source_name.to_string(),
                source: e,
            })?;
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let (piece_id, note) = parse_row(trimmed).map_err(|msg| CorpusError::Parse {
                source_name: source_name.to_string(),
                line: lineno,
                msg,
            })?;
            let next = self.pieces.len();
            let idx = *self.by_id.entry(piece_id.to_string()).or_insert(next);
            if idx == next {
                self.pieces.push(NotePiece {
                    id: piece_id.to_string(),
                    notes: Vec::new(),
                });
            }
            if !self.seen.insert((idx, note.onset_score, note.pitch)) {
                self.warnings.push(ParseWarning {
                    source_name: source_name.to_string(),
                    line: lineno,
                    msg: format!(
                        "duplicate note (piece {piece_id}, onset {}, pitch {}); keeping first",
                        note.onset_score, note.pitch
                    ),
                });
                continue;
            }
            self.pieces[idx].notes.push(note);
        }
        Ok(())
    }

    fn finish(mut self) -> Result<ParsedCorpus, CorpusError> {
        if self.pieces.is_empty() {
            return Err(CorpusError::Empty);
        }
        for p in &mut self.pieces {
            // Stable, so equal onsets keep file order.
            p.notes.sort_by_key(|n| n.onset_score);
        }
        Ok(ParsedCorpus {
            pieces: self.pieces,
            warnings: self.warnings,
        })
    }
}

/// Parses one note-event stream. `source_name` labels diagnostics.
pub fn parse_corpus<R: Read>(input: R, source_name: &str) -> Result<ParsedCorpus, CorpusError> {
    let mut b = Builder::default();
    b.feed(input, source_name)?;
    b.finish()
}

/// Reads a single file, or every regular file of a directory in name order.
pub fn read_corpus_path(path: &Path) -> Result<ParsedCorpus, CorpusError> {
    let io_err = |e| CorpusError::Io {
        path: path.display().to_string(),
        source: e,
    };
    let mut files = Vec::new();
    if path.is_dir() {
        for entry in fs::read_dir(path).map_err(io_err)? {
            let entry = entry.map_err(io_err)?;
            if entry.file_type().map_err(io_err)?.is_file() {
                files.push(entry.path());
            }
        }
        files.sort();
    } else {
        files.push(path.to_path_buf());
    }
    let mut b = Builder::default();
    for f in files {
        let file = fs::File::open(&f).map_err(|e| CorpusError::Io {
            path: f.display().to_string(),
            source: e,
        })?;
        b.feed(file, &f.display().to_string())?;
    }
    b.finish()
}

fn parse_row(line: &str) -> Result<(&str, NoteEvent), String> {
    let fields: Vec<&str> = line.split('\t').map(str::trim).collect();
    if fields.len() != 4 && fields.len() != 6 {
        return Err(format!(
            "expected 4 or 6 tab-separated fields, found {}",
            fields.len()
        ));
    }
    let piece_id = fields[0];
    if piece_id.is_empty() {
        return Err("empty piece id".into());
    }
    let onset = parse_rational(fields[1]).ok_or_else(|| format!("bad onset '{}'", fields[1]))?;
    if onset < Rational64::from_integer(0) {
        return Err(format!("negative onset '{}'", fields[1]));
    }
    let duration =
        parse_rational(fields[2]).ok_or_else(|| format!("bad duration '{}'", fields[2]))?;
    if duration <= Rational64::from_integer(0) {
        return Err(format!("duration must be positive, got '{}'", fields[2]));
    }
    let pitch: i64 = fields[3]
        .parse()
        .map_err(|_| format!("bad pitch '{}'", fields[3]))?;
    if !(0..=127).contains(&pitch) {
        return Err(format!("pitch {pitch} outside 0..127"));
    }
    let mut note = NoteEvent::new(onset, duration, pitch as u8);
    if fields.len() == 6 {
        let po: f64 = fields[4]
            .parse()
            .map_err(|_| format!("bad performed onset '{}'", fields[4]))?;
        let pd: f64 = fields[5]
            .parse()
            .map_err(|_| format!("bad performed duration '{}'", fields[5]))?;
        if !po.is_finite() || po < 0.0 {
            return Err(format!("performed onset must be >= 0, got '{}'", fields[4]));
        }
        if !pd.is_finite() || pd <= 0.0 {
            return Err(format!(
                "performed duration must be > 0, got '{}'",
                fields[5]
            ));
        }
        note = note.with_perf(po, pd);
    }
    Ok((piece_id, note))
}

/// Parses `p/q`, an integer, or a decimal with up to nine fractional digits.
pub fn parse_rational(s: &str) -> Option<Rational64> {
    if let Some((num, den)) = s.split_once('/') {
        let num: i64 = num.parse().ok()?;
        let den: i64 = den.parse().ok()?;
        if den == 0 {
            return None;
        }
        return Some(Rational64::new(num, den));
    }
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s),
    };
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    if (int_part.is_empty() && frac_part.is_empty())
        || !int_part.bytes().all(|b| b.is_ascii_digit())
        || !frac_part.bytes().all(|b| b.is_ascii_digit())
        || frac_part.len() > 9
    {
        return None;
    }
    let whole: i64 = if int_part.is_empty() {
        0
    } else {
        int_part.parse().ok()?
    };
    let den = 10i64.pow(frac_part.len() as u32);
    let frac: i64 = if frac_part.is_empty() {
        0
    } else {
        frac_part.parse().ok()?
    };
    let r = Rational64::new(whole.checked_mul(den)?.checked_add(frac)?, den);
    Some(if neg { -r } else { r })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Rational64 {
        Rational64::new(n, d)
    }

    #[test]
    fn rationals() {
        assert_eq!(parse_rational("3/2"), Some(r(3, 2)));
        assert_eq!(parse_rational("1.25"), Some(r(5, 4)));
        assert_eq!(parse_rational("4"), Some(r(4, 1)));
        assert_eq!(parse_rational(".5"), Some(r(1, 2)));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("abc"), None);
        assert_eq!(parse_rational(""), None);
    }

    #[test]
    fn three_rows_one_piece() {
        let src = "a\t0\t1\t60\na\t1\t1\t62\na\t2\t1\t64\n";
        let c = parse_corpus(src.as_bytes(), "mem").unwrap();
        assert_eq!(c.pieces.len(), 1);
        assert_eq!(c.pieces[0].notes.len(), 3);
    }

    #[test]
    fn pitch_out_of_range_names_line() {
        let src = "# header\na\t0\t1\t60\na\t1\t1\t128\n";
        match parse_corpus(src.as_bytes(), "mem") {
            Err(CorpusError::Parse { line, msg, .. }) => {
                assert_eq!(line, 3);
                assert!(msg.contains("128"));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn duplicate_keeps_first() {
        let src = "a\t0\t1\t60\na\t0\t2\t60\n";
        let c = parse_corpus(src.as_bytes(), "mem").unwrap();
        assert_eq!(c.pieces[0].notes.len(), 1);
        assert_eq!(c.pieces[0].notes[0].duration_score, r(1, 1));
        assert_eq!(c.warnings.len(), 1);
        assert_eq!(c.warnings[0].line, 2);
    }

    #[test]
    fn empty_input() {
        assert!(matches!(
            parse_corpus("# nothing\n\n".as_bytes(), "mem"),
            Err(CorpusError::Empty)
        ));
    }

    #[test]
    fn malformed_rows() {
        for bad in [
            "a\t0\t1",
            "a\t0\t0\t60",
            "a\t-1\t1\t60",
            "a\t0\t1\t60\t0.5",
            "a\t0\t1\t60\t-1\t1",
            "a\t0\t1\tx",
        ] {
            assert!(
                matches!(
                    parse_corpus(bad.as_bytes(), "mem"),
                    Err(CorpusError::Parse { line: 1, .. })
                ),
                "{bad}"
            );
        }
    }

    #[test]
    fn performed_columns() {
        let c = parse_corpus("a\t1/2\t1\t60\t0.25\t0.4\n".as_bytes(), "mem").unwrap();
        let n = &c.pieces[0].notes[0];
        assert_eq!(n.onset_score, r(1, 2));
        assert_eq!(n.perf.unwrap().onset, 0.25);
    }
}
