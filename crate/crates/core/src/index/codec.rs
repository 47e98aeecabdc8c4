//! On-disk index layout (all integers little-endian):
//!
//! ```text
//! magic "QEBIDX\r\n" | version u32
//! section* : tag u32 | byte length u64 | payload
//!   STAT: k1 f64 | b f64 | N u32 | N x (len u32, id utf8) | N x doc_len u32
//!   LEXI: T u32 | T x (len u32, term utf8)
//!   POST: T x (count u32 | count x (ordinal u32, tf u32))
//! trailer "QEBIDXEND"
//! ```
//!
//! The forward (document -> terms) lists are rebuilt from postings on load.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use super::{Bm25Params, InvertedIndex, Posting};
use crate::error::{Error, Result};
use crate::fsutil::{atomic_write, io_err};
use crate::text::Term;

pub const MAGIC: &[u8; 8] = b"QEBIDX\r\n";
pub const FORMAT_VERSION: u32 = 1;
const TRAILER: &[u8; 9] = b"QEBIDXEND";

const TAG_STATS: u32 = u32::from_le_bytes(*b"STAT");
const TAG_LEXICON: u32 = u32::from_le_bytes(*b"LEXI");
const TAG_POSTINGS: u32 = u32::from_le_bytes(*b"POST");

fn put_u32(buf: &mut Vec<u8>, v: u32) {
    buf.extend_from_slice(&v.to_le_bytes());
}

fn put_str(buf: &mut Vec<u8>, s: &str) {
    put_u32(buf, s.len() as u32);
    buf.extend_from_slice(s.as_bytes());
}

fn section(out: &mut Vec<u8>, tag: u32, payload: &[u8]) {
    put_u32(out, tag);
    out.extend_from_slice(&(payload.len() as u64).to_le_bytes());
    out.extend_from_slice(payload);
}

pub(super) fn encode(index: &InvertedIndex) -> Vec<u8> {
    let mut out = Vec::new();
    out.extend_from_slice(MAGIC);
    put_u32(&mut out, FORMAT_VERSION);

    let mut stats = Vec::new();
    stats.extend_from_slice(&index.params.k1.to_le_bytes());
    stats.extend_from_slice(&index.params.b.to_le_bytes());
    put_u32(&mut stats, index.doc_ids.len() as u32);
    for id in &index.doc_ids {
        put_str(&mut stats, id);
    }
    for &l in &index.doc_len {
        put_u32(&mut stats, l);
    }
    section(&mut out, TAG_STATS, &stats);

    let mut lex = Vec::new();
    put_u32(&mut lex, index.lexicon.len() as u32);
    for t in &index.lexicon {
        put_str(&mut lex, t.as_str());
    }
    section(&mut out, TAG_LEXICON, &lex);

    let mut post = Vec::new();
    for list in &index.postings {
        put_u32(&mut post, list.len() as u32);
        for p in list {
            put_u32(&mut post, p.ordinal);
            put_u32(&mut post, p.tf);
        }
    }
    section(&mut out, TAG_POSTINGS, &post);

    out.extend_from_slice(TRAILER);
    out
}

pub(super) fn save(index: &InvertedIndex, path: &Path) -> Result<()> {
    let bytes = encode(index);
    atomic_write(path, |w: &mut dyn Write| w.write_all(&bytes).map_err(io_err(path)))
}

pub(super) fn load(path: &Path) -> Result<InvertedIndex> {
    let bytes = fs::read(path).map_err(io_err(path))?;
    decode(&bytes, path)
}

struct Cursor<'a> {
    buf: &'a [u8],
    pos: usize,
    path: &'a Path,
}

impl<'a> Cursor<'a> {
    fn corrupt(&self, message: impl Into<String>) -> Error {
        Error::Corrupt {
            path: self.path.to_path_buf(),
            message: format!("{} (at byte {})", message.into(), self.pos),
        }
    }

    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        if self.buf.len() - self.pos < n {
            return Err(self.corrupt("unexpected end of file"));
        }
        let s = &self.buf[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn string(&mut self) -> Result<String> {
        let n = self.u32()? as usize;
        let raw = self.take(n)?;
        String::from_utf8(raw.to_vec()).map_err(|_| self.corrupt("invalid UTF-8 string"))
    }

    fn section(&mut self, tag: u32) -> Result<Cursor<'a>> {
        let found = self.u32()?;
        if found != tag {
            return Err(self.corrupt(format!(
                "expected section {:?}, found {:?}",
                String::from_utf8_lossy(&tag.to_le_bytes()),
                String::from_utf8_lossy(&found.to_le_bytes())
            )));
        }
        let len = usize::try_from(self.u64()?).map_err(|_| self.corrupt("section too large"))?;
        let body = self.take(len)?;
        Ok(Cursor {
            buf: body,
            pos: 0,
            path: self.path,
        })
    }

    fn finish(&self, what: &str) -> Result<()> {
        if self.pos != self.buf.len() {
            return Err(self.corrupt(format!("trailing bytes in {what}")));
        }
        Ok(())
    }
}

pub(super) fn decode(bytes: &[u8], path: &Path) -> Result<InvertedIndex> {
    let format_err = |message: String| Error::Format {
        path: PathBuf::from(path),
        message,
    };
    if bytes.len() < MAGIC.len() + 4 {
        if MAGIC.starts_with(bytes) || bytes.starts_with(MAGIC) {
            return Err(Error::Corrupt {
                path: path.into(),
                message: "file truncated inside header".into(),
            });
        }
        return Err(format_err("not an index file (bad magic)".into()));
    }
    if &bytes[..8] != MAGIC {
        return Err(format_err("not an index file (bad magic)".into()));
    }
    let mut cur = Cursor {
        buf: bytes,
        pos: 8,
        path,
    };
    let version = cur.u32()?;
    if version != FORMAT_VERSION {
        return Err(format_err(format!(
            "format version {version}, this build reads version {FORMAT_VERSION}"
        )));
    }

    let mut stats = cur.section(TAG_STATS)?;
    let params = Bm25Params {
        k1: stats.f64()?,
        b: stats.f64()?,
    };
    let n = stats.u32()? as usize;
    let mut doc_ids = Vec::with_capacity(n.min(1 << 20));
    for _ in 0..n {
        doc_ids.push(stats.string()?);
    }
    if doc_ids.windows(2).any(|w| w[0] >= w[1]) {
        return Err(stats.corrupt("document ids not strictly ascending"));
    }
    let mut doc_len = Vec::with_capacity(n.min(1 << 20));
    for _ in 0..n {
        doc_len.push(stats.u32()?);
    }
    stats.finish("stats section")?;

    let mut lex = cur.section(TAG_LEXICON)?;
    let t = lex.u32()? as usize;
    let mut lexicon = Vec::with_capacity(t.min(1 << 20));
    for _ in 0..t {
        lexicon.push(Term::new(lex.string()?));
    }
    if lexicon.windows(2).any(|w| w[0] >= w[1]) {
        return Err(lex.corrupt("lexicon not strictly ascending"));
    }
    lex.finish("lexicon section")?;

    let mut post = cur.section(TAG_POSTINGS)?;
    let mut postings = Vec::with_capacity(t);
    for _ in 0..t {
        let count = post.u32()? as usize;
        let mut list = Vec::with_capacity(count.min(n));
        for _ in 0..count {
            let ordinal = post.u32()?;
            let tf = post.u32()?;
            if ordinal as usize >= n || tf == 0 {
                return Err(post.corrupt("posting out of range"));
            }
            if list.last().is_some_and(|p: &Posting| p.ordinal >= ordinal) {
                return Err(post.corrupt("postings not strictly ascending"));
            }
            list.push(Posting { ordinal, tf });
        }
        postings.push(list);
    }
    post.finish("postings section")?;

    let trailer = cur.take(TRAILER.len())?;
    if trailer != TRAILER {
        return Err(cur.corrupt("missing trailer"));
    }
    cur.finish("file")?;

    Ok(InvertedIndex::assemble(params, doc_ids, doc_len, lexicon, postings))
}
