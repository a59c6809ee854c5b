//! JSON Lines sentence and pair files.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::text::{PairSource, Sentence, SentencePair};

#[derive(Debug, Serialize, Deserialize)]
struct SentenceRecord {
    id: String,
    text: String,
}

#[derive(Debug, Serialize, Deserialize)]
struct PairRecord {
    bad: String,
    good: String,
    source: PairSource,
}

fn parse_lines<T, F>(path: &Path, mut f: F) -> Result<Vec<T>>
where
    F: FnMut(&str, usize) -> std::result::Result<Option<T>, String>,
{
    let reader = BufReader::new(File::open(path)?);
    let mut out = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        match f(&line, idx + 1) {
            Ok(Some(item)) => out.push(item),
            Ok(None) => {}
            Err(message) => {
                return Err(Error::Parse {
                    path: path.to_path_buf(),
                    line: idx + 1,
                    message,
                })
            }
        }
    }
    Ok(out)
}

/// Reads `{"id", "text"}` records. Lines without an id get their line number.
pub fn read_sentences(path: impl AsRef<Path>) -> Result<Vec<Sentence>> {
    #[derive(Deserialize)]
    struct Loose {
        id: Option<serde_json::Value>,
        text: String,
    }
    parse_lines(path.as_ref(), |line, lineno| {
        let rec: Loose = serde_json::from_str(line).map_err(|e| e.to_string())?;
        let id = match rec.id {
            Some(serde_json::Value::String(s)) => s,
            Some(other) => other.to_string(),
            None => lineno.to_string(),
        };
        Ok(Some(Sentence::with_id(rec.text, id)))
    })
}

pub fn write_sentences(path: impl AsRef<Path>, sentences: &[Sentence]) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    for (idx, s) in sentences.iter().enumerate() {
        let rec = SentenceRecord {
            id: s.id.clone().unwrap_or_else(|| idx.to_string()),
            text: s.raw.clone(),
        };
        serde_json::to_writer(&mut w, &rec)?;
        w.write_all(b"\n")?;
    }
    w.flush()?;
    Ok(())
}

/// Reads `{"bad", "good", "source"}` records, dropping identity pairs.
pub fn read_pairs(path: impl AsRef<Path>) -> Result<Vec<SentencePair>> {
    parse_lines(path.as_ref(), |line, _| {
        let rec: PairRecord = serde_json::from_str(line).map_err(|e| e.to_string())?;
        let pair = SentencePair::new(Sentence::new(rec.bad), Sentence::new(rec.good), rec.source);
        Ok((!pair.is_identity()).then_some(pair))
    })
}

pub fn write_pairs(path: impl AsRef<Path>, pairs: &[SentencePair]) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    for pair in pairs {
        serde_json::to_writer(&mut w, &pair_record(pair))?;
        w.write_all(b"\n")?;
    }
    w.flush()?;
    Ok(())
}

fn pair_record(pair: &SentencePair) -> PairRecord {
    PairRecord {
        bad: pair.bad.raw.clone(),
        good: pair.good.raw.clone(),
        source: pair.source,
    }
}
