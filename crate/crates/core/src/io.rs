//! Word serialization.
//!
//! Packed records: the 4-byte magic `SLW1`, the bit length as a little-endian
//! `u64`, then `ceil(len / 8)` bytes holding the symbols least-significant-bit
//! first. A file holds one or more records back to back.
//!
//! Text: one word per line, written with the characters `0` and `1`.

use std::io::{BufRead, Read, Write};

use crate::error::{Error, Result};
use crate::words::BinaryWord;

pub const MAGIC: &[u8; 4] = b"SLW1";

pub fn write_packed<W: Write>(out: &mut W, word: &BinaryWord) -> Result<()> {
    out.write_all(MAGIC)?;
    out.write_all(&(word.len() as u64).to_le_bytes())?;
    let nbytes = word.len().div_ceil(8);
    let mut bytes = Vec::with_capacity(nbytes);
    for limb in word.limbs() {
        bytes.extend_from_slice(&limb.to_le_bytes());
    }
    bytes.truncate(nbytes);
    out.write_all(&bytes)?;
    Ok(())
}

pub fn write_packed_all<'a, W, I>(out: &mut W, words: I) -> Result<()>
where
    W: Write,
    I: IntoIterator<Item = &'a BinaryWord>,
{
    for w in words {
        write_packed(out, w)?;
    }
    Ok(())
}

/// Reads one record, or `None` at a clean end of input.
pub fn read_packed<R: Read>(input: &mut R) -> Result<Option<BinaryWord>> {
    let mut magic = [0u8; 4];
    let mut got = 0;
    while got < 4 {
        let k = input.read(&mut magic[got..])?;
        if k == 0 {
            return if got == 0 {
                Ok(None)
            } else {
                Err(Error::Format("truncated record header".into()))
            };
        }
        got += k;
    }
    if &magic != MAGIC {
        return Err(Error::Format(format!("bad magic {magic:?}")));
    }
    let mut len_bytes = [0u8; 8];
    input
        .read_exact(&mut len_bytes)
        .map_err(|_| Error::Format("truncated length field".into()))?;
    let len = usize::try_from(u64::from_le_bytes(len_bytes))
        .map_err(|_| Error::Format("length does not fit in memory".into()))?;
    let nbytes = len.div_ceil(8);
    let mut bytes = vec![0u8; nbytes];
    input
        .read_exact(&mut bytes)
        .map_err(|_| Error::Format(format!("expected {nbytes} payload bytes")))?;
    if len % 8 != 0 {
        let spare = bytes[nbytes - 1] >> (len % 8);
        if spare != 0 {
            return Err(Error::Format("non-zero padding bits".into()));
        }
    }
    let limbs = bytes
        .chunks(8)
        .map(|c| {
            let mut b = [0u8; 8];
            b[..c.len()].copy_from_slice(c);
            u64::from_le_bytes(b)
        })
        .collect();
    BinaryWord::from_limbs(limbs, len).map(Some)
}

pub fn read_packed_all<R: Read>(input: &mut R) -> Result<Vec<BinaryWord>> {
    let mut out = Vec::new();
    while let Some(w) = read_packed(input)? {
        out.push(w);
    }
    Ok(out)
}

pub fn write_text<'a, W, I>(out: &mut W, words: I) -> Result<()>
where
    W: Write,
    I: IntoIterator<Item = &'a BinaryWord>,
{
    for w in words {
        writeln!(out, "{w}")?;
    }
    Ok(())
}

/// Blank lines are skipped.
pub fn read_text<R: BufRead>(input: R) -> Result<Vec<BinaryWord>> {
    let mut out = Vec::new();
    for line in input.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(line.parse()?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn header_layout() {
        let w: BinaryWord = "1011".parse().unwrap();
        let mut buf = Vec::new();
        write_packed(&mut buf, &w).unwrap();
        assert_eq!(&buf[..4], b"SLW1");
        assert_eq!(&buf[4..12], &4u64.to_le_bytes());
        assert_eq!(buf[12], 0b1101);
        assert_eq!(buf.len(), 13);
    }

    #[test]
    fn rejects_garbage() {
        assert!(read_packed(&mut &b"SLW2\0\0\0\0\0\0\0\0"[..]).is_err());
        assert!(read_packed(&mut &b"SLW1\x09\0\0\0\0\0\0\0\x01"[..]).is_err());
        let mut padded = b"SLW1\x04\0\0\0\0\0\0\0".to_vec();
        padded.push(0xF1);
        assert!(read_packed(&mut padded.as_slice()).is_err());
        assert_eq!(read_packed(&mut &b""[..]).unwrap(), None);
    }

    proptest! {
        #[test]
        fn packed_and_text_read_back(words in prop::collection::vec(prop::collection::vec(any::<bool>(), 1..300), 1..6)) {
            let words: Vec<BinaryWord> = words.into_iter().map(BinaryWord::from_bits).collect();
            let mut buf = Vec::new();
            write_packed_all(&mut buf, &words).unwrap();
            prop_assert_eq!(read_packed_all(&mut buf.as_slice()).unwrap(), words.clone());

            let mut text = Vec::new();
            write_text(&mut text, &words).unwrap();
            prop_assert_eq!(read_text(text.as_slice()).unwrap(), words);
        }
    }
}
