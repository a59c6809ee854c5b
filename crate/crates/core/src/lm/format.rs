//! Versioned little-endian model container.
//!
//! ```text
//! "LMC1" u32:version
//! config    order:u32 discounts:[f64; order] min_count:u32
//!           char_order:u32 char_alpha:f64 char_weight:f64 unk_floor:f64
//! words     n:u32 { len:u32 utf8 }*            (id order)
//! tables    for each order 1..=n: m:u64 { key:u128 count:u32 }*   (key order)
//! chars     n:u32 { char:u32 }*  m:u64 { key:u128 count:u32 }*
//! "END1"
//! ```

use std::collections::HashMap;
use std::path::Path;

use crate::error::{Error, Result};
use crate::lm::ngram::{
    CharModel, LmConfig, LmModel, OrderTable, CHAR_FIRST, FIRST_WORD_ID, MAX_ORDER,
};

pub const MAGIC: &[u8; 4] = b"LMC1";
pub const FORMAT_VERSION: u32 = 1;
const END: &[u8; 4] = b"END1";

struct Writer {
    buf: Vec<u8>,
}

impl Writer {
    fn u32(&mut self, v: u32) {
        self.buf.extend_from_slice(&v.to_le_bytes());
    }
    fn u64(&mut self, v: u64) {
        self.buf.extend_from_slice(&v.to_le_bytes());
    }
    fn u128(&mut self, v: u128) {
        self.buf.extend_from_slice(&v.to_le_bytes());
    }
    fn f64(&mut self, v: f64) {
        self.buf.extend_from_slice(&v.to_le_bytes());
    }
    fn counts(&mut self, counts: &HashMap<u128, u32>) {
        let mut entries: Vec<_> = counts.iter().collect();
        entries.sort_unstable();
        self.u64(entries.len() as u64);
        for (&k, &c) in entries {
            self.u128(k);
            self.u32(c);
        }
    }
}

pub(crate) fn to_bytes(model: &LmModel) -> Vec<u8> {
    let mut w = Writer { buf: Vec::new() };
    w.buf.extend_from_slice(MAGIC);
    w.u32(FORMAT_VERSION);
    let cfg = &model.config;
    w.u32(cfg.order as u32);
    for &d in &cfg.discounts {
        w.f64(d);
    }
    w.u32(cfg.min_count);
    w.u32(cfg.char_order as u32);
    w.f64(cfg.char_alpha);
    w.f64(cfg.char_weight);
    w.f64(cfg.unk_floor);
    w.u32(model.words.len() as u32);
    for word in &model.words {
        w.u32(word.len() as u32);
        w.buf.extend_from_slice(word.as_bytes());
    }
    for table in &model.tables {
        w.counts(&table.counts);
    }
    w.u32(model.chars.symbols.len() as u32);
    for &c in model.chars.symbols.keys() {
        w.u32(c as u32);
    }
    w.counts(&model.chars.counts);
    w.buf.extend_from_slice(END);
    w.buf
}

pub fn save(model: &LmModel, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, to_bytes(model))?;
    Ok(())
}

pub fn load(path: impl AsRef<Path>) -> Result<LmModel> {
    from_bytes(&std::fs::read(path)?)
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize, what: &str) -> Result<&'a [u8]> {
        if self.bytes.len() - self.pos < n {
            return Err(Error::CorruptModelFile(format!(
                "truncated at byte {} while reading {what} (need {n} bytes, {} left)",
                self.pos,
                self.bytes.len() - self.pos
            )));
        }
        let out = &self.bytes[self.pos..self.pos + n];
        self.pos += n;
        Ok(out)
    }
    fn u32(&mut self, what: &str) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4, what)?.try_into().unwrap()))
    }
    fn u64(&mut self, what: &str) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8, what)?.try_into().unwrap()))
    }
    fn u128(&mut self, what: &str) -> Result<u128> {
        Ok(u128::from_le_bytes(
            self.take(16, what)?.try_into().unwrap(),
        ))
    }
    fn f64(&mut self, what: &str) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8, what)?.try_into().unwrap()))
    }
    fn counts(&mut self, what: &str) -> Result<HashMap<u128, u32>> {
        let n = self.u64(what)?;
        // Each entry is 20 bytes; reject counts the file cannot hold.
        if n > ((self.bytes.len() - self.pos) / 20) as u64 {
            return Err(Error::CorruptModelFile(format!(
                "{what}: {n} entries declared at byte {} but file is too short",
                self.pos
            )));
        }
        let mut out = HashMap::with_capacity(n as usize);
        for _ in 0..n {
            let key = self.u128(what)?;
            let count = self.u32(what)?;
            if count == 0 {
                return Err(Error::CorruptModelFile(format!(
                    "{what}: zero count for key {key:#x}"
                )));
            }
            out.insert(key, count);
        }
        Ok(out)
    }
}

pub(crate) fn from_bytes(bytes: &[u8]) -> Result<LmModel> {
    let mut r = Reader { bytes, pos: 0 };
    let magic = r.take(4, "magic")?;
    if magic != MAGIC {
        return Err(Error::CorruptModelFile(format!(
            "bad magic: expected {:?}, found {:?}",
            String::from_utf8_lossy(MAGIC),
            String::from_utf8_lossy(magic)
        )));
    }
    let version = r.u32("version")?;
    if version != FORMAT_VERSION {
        return Err(Error::CorruptModelFile(format!(
            "unsupported format version: expected {FORMAT_VERSION}, found {version}"
        )));
    }
    let order = r.u32("order")? as usize;
    if !(1..=MAX_ORDER).contains(&order) {
        return Err(Error::CorruptModelFile(format!(
            "order {order} out of range"
        )));
    }
    let mut discounts = Vec::with_capacity(order);
    for _ in 0..order {
        discounts.push(r.f64("discount")?);
    }
    let config = LmConfig {
        order,
        discounts,
        min_count: r.u32("min_count")?,
        char_order: r.u32("char_order")? as usize,
        char_alpha: r.f64("char_alpha")?,
        char_weight: r.f64("char_weight")?,
        unk_floor: r.f64("unk_floor")?,
    };
    config
        .validate()
        .map_err(|e| Error::CorruptModelFile(format!("invalid stored config: {e}")))?;

    let n_words = r.u32("vocabulary size")? as usize;
    let mut words = Vec::with_capacity(n_words.min(bytes.len()));
    for _ in 0..n_words {
        let len = r.u32("word length")? as usize;
        let raw = r.take(len, "word")?;
        let word = std::str::from_utf8(raw).map_err(|e| {
            Error::CorruptModelFile(format!("word at byte {} is not UTF-8: {e}", r.pos - len))
        })?;
        words.push(word.to_string());
    }
    let vocab: HashMap<String, u32> = words.iter().cloned().zip(FIRST_WORD_ID..).collect();
    if vocab.len() != words.len() {
        return Err(Error::CorruptModelFile(
            "duplicate vocabulary entries".into(),
        ));
    }
    let mut tables = Vec::with_capacity(order);
    for k in 1..=order {
        let counts = r.counts(&format!("order-{k} table"))?;
        tables.push(OrderTable::from_counts(k, counts));
    }
    let n_chars = r.u32("character count")?;
    let mut symbols = std::collections::BTreeMap::new();
    for id in 0..n_chars {
        let code = r.u32("character")?;
        let c = char::from_u32(code)
            .ok_or_else(|| Error::CorruptModelFile(format!("invalid character {code:#x}")))?;
        symbols.insert(c, CHAR_FIRST + id);
    }
    let char_counts = r.counts("character table")?;
    let mut chars = CharModel {
        order: config.char_order,
        alpha: config.char_alpha,
        symbols,
        counts: HashMap::new(),
        totals: HashMap::new(),
    };
    chars.set_counts(char_counts);
    let end = r.take(4, "end marker")?;
    if end != END {
        return Err(Error::CorruptModelFile("missing end marker".into()));
    }
    if r.pos != bytes.len() {
        return Err(Error::CorruptModelFile(format!(
            "{} trailing bytes after end marker",
            bytes.len() - r.pos
        )));
    }
    Ok(LmModel {
        config,
        vocab,
        words,
        tables,
        chars,
    })
}
