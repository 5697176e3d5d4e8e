//! Single-file index format, all integers little-endian:
//!
//! ```text
//! magic      8 bytes  "MSEEKIDX"
//! version    u32
//! length     u64      payload byte count
//! payload    length bytes
//! checksum   8 bytes  leading bytes of SHA-256(payload)
//!
//! payload:
//!   docs     u32, then per doc: str doc_id, u32 x3 field lengths
//!   boosts   f64 x3
//!   fields   x3 (opaths, upaths, sisters):
//!              u32 term count, then per term in byte order:
//!              str term, u32 posting count, (u32 ordinal, u32 tf) per posting
//!   str      u32 byte length + UTF-8 bytes
//! ```

use std::fs;
use std::io::{Cursor, Read, Write};
use std::path::Path;

use byteorder::{LittleEndian, ReadBytesExt, WriteBytesExt};
use sha2::{Digest, Sha256};

use super::{Index, Posting};
use crate::error::{Error, Result};

const MAGIC: &[u8; 8] = b"MSEEKIDX";
pub const FORMAT_VERSION: u32 = 1;

pub fn save_index(index: &Index, path: impl AsRef<Path>) -> Result<()> {
    let bytes = encode(index);
    let path = path.as_ref();
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, bytes)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

pub fn load_index(path: impl AsRef<Path>) -> Result<Index> {
    let bytes = fs::read(path)?;
    decode(&bytes)
}

fn checksum(payload: &[u8]) -> [u8; 8] {
    let digest = Sha256::digest(payload);
    let mut out = [0u8; 8];
    out.copy_from_slice(&digest[..8]);
    out
}

pub(crate) fn encode(index: &Index) -> Vec<u8> {
    let mut payload = Vec::new();
    let w = &mut payload;
    w.write_u32::<LittleEndian>(index.doc_ids.len() as u32)
        .unwrap();
    for (doc_id, lengths) in index.doc_ids.iter().zip(&index.field_lengths) {
        write_str(w, doc_id);
        for &l in lengths {
            w.write_u32::<LittleEndian>(l).unwrap();
        }
    }
    for &b in &index.boosts {
        w.write_f64::<LittleEndian>(b).unwrap();
    }
    for field in &index.postings {
        let mut terms: Vec<(&String, &Vec<Posting>)> = field.iter().collect();
        terms.sort_by(|a, b| a.0.cmp(b.0));
        w.write_u32::<LittleEndian>(terms.len() as u32).unwrap();
        for (term, postings) in terms {
            write_str(w, term);
            w.write_u32::<LittleEndian>(postings.len() as u32).unwrap();
            for p in postings {
                w.write_u32::<LittleEndian>(p.doc).unwrap();
                w.write_u32::<LittleEndian>(p.tf).unwrap();
            }
        }
    }

    let mut out = Vec::with_capacity(payload.len() + 28);
    out.extend_from_slice(MAGIC);
    out.write_u32::<LittleEndian>(FORMAT_VERSION).unwrap();
    out.write_u64::<LittleEndian>(payload.len() as u64).unwrap();
    out.extend_from_slice(&payload);
    out.extend_from_slice(&checksum(&payload));
    out
}

fn write_str(w: &mut Vec<u8>, s: &str) {
    w.write_u32::<LittleEndian>(s.len() as u32).unwrap();
    w.write_all(s.as_bytes()).unwrap();
}

fn corrupt(msg: impl Into<String>) -> Error {
    Error::CorruptIndex(msg.into())
}

pub(crate) fn decode(bytes: &[u8]) -> Result<Index> {
    if bytes.len() < 20 || &bytes[..8] != MAGIC {
        return Err(corrupt("missing header"));
    }
    let mut header = Cursor::new(&bytes[8..20]);
    let version = header.read_u32::<LittleEndian>()?;
    if version != FORMAT_VERSION {
        return Err(Error::IndexVersion {
            found: version,
            expected: FORMAT_VERSION,
        });
    }
    let len = header.read_u64::<LittleEndian>()? as usize;
    let body = &bytes[20..];
    if body.len() != len.saturating_add(8) {
        return Err(corrupt(format!(
            "expected {} payload bytes plus checksum, found {}",
            len,
            body.len()
        )));
    }
    let (payload, sum) = body.split_at(len);
    if checksum(payload) != sum {
        return Err(corrupt("checksum mismatch"));
    }
    read_payload(payload).map_err(|e| match e {
        Error::Io(io) => corrupt(io.to_string()),
        other => other,
    })
}

fn read_payload(payload: &[u8]) -> Result<Index> {
    let mut r = Cursor::new(payload);
    let n_docs = r.read_u32::<LittleEndian>()? as usize;
    let mut index = Index::default();
    for _ in 0..n_docs {
        let doc_id = read_str(&mut r)?;
        if index.doc_ids.last().is_some_and(|prev| *prev >= doc_id) {
            return Err(corrupt("document ids out of order"));
        }
        let mut lengths = [0u32; 3];
        for l in &mut lengths {
            *l = r.read_u32::<LittleEndian>()?;
        }
        index.doc_ids.push(doc_id);
        index.field_lengths.push(lengths);
    }
    for b in &mut index.boosts {
        *b = r.read_f64::<LittleEndian>()?;
    }
    for field in &mut index.postings {
        let n_terms = r.read_u32::<LittleEndian>()?;
        for _ in 0..n_terms {
            let term = read_str(&mut r)?;
            let n = r.read_u32::<LittleEndian>()? as usize;
            if n > payload.len() {
                return Err(corrupt("posting count out of range"));
            }
            let mut postings = Vec::with_capacity(n);
            for _ in 0..n {
                let doc = r.read_u32::<LittleEndian>()?;
                let tf = r.read_u32::<LittleEndian>()?;
                if doc as usize >= n_docs || postings.last().is_some_and(|p: &Posting| p.doc >= doc)
                {
                    return Err(corrupt("bad posting"));
                }
                postings.push(Posting { doc, tf });
            }
            field.insert(term, postings);
        }
    }
    if (r.position() as usize) != payload.len() {
        return Err(corrupt("trailing bytes in payload"));
    }
    Ok(index)
}

fn read_str(r: &mut Cursor<&[u8]>) -> Result<String> {
    let len = r.read_u32::<LittleEndian>()? as usize;
    if len > r.get_ref().len() {
        return Err(corrupt("string length out of range"));
    }
    let mut buf = vec![0u8; len];
    r.read_exact(&mut buf)?;
    String::from_utf8(buf).map_err(|_| corrupt("invalid UTF-8"))
}
