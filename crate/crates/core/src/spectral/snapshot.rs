//! Binary snapshot format.
//!
//! One JSON header line `{"n": .., "D": .., "component_count": .., "time": ..}`
//! terminated by `\n`, followed by `component_count * n^3` little-endian
//! `f64` values: components one after another, each in physical space with
//! the first axis fastest.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use super::FieldError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SnapshotHeader {
    pub n: usize,
    #[serde(rename = "D")]
    pub half_width: f64,
    pub component_count: usize,
    pub time: f64,
}

pub fn write_snapshot<W: Write>(
    mut out: W,
    header: &SnapshotHeader,
    components: &[&[f64]],
) -> Result<(), FieldError> {
    let len = header.n.pow(3);
    if components.len() != header.component_count {
        return Err(FieldError::SizeMismatch {
            expected: header.component_count,
            got: components.len(),
        });
    }
    if let Some(bad) = components.iter().find(|c| c.len() != len) {
        return Err(FieldError::SizeMismatch {
            expected: len,
            got: bad.len(),
        });
    }
    serde_json::to_writer(&mut out, header).map_err(|e| FieldError::Snapshot(e.to_string()))?;
    out.write_all(b"\n")?;
    let mut bytes = Vec::with_capacity(len * 8);
    for comp in components {
        bytes.clear();
        for v in comp.iter() {
            bytes.extend_from_slice(&v.to_le_bytes());
        }
        out.write_all(&bytes)?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_header<R: BufRead>(input: &mut R) -> Result<SnapshotHeader, FieldError> {
    let mut line = Vec::new();
    input.read_until(b'\n', &mut line)?;
    if line.last() != Some(&b'\n') {
        return Err(FieldError::Snapshot("missing header line".into()));
    }
    serde_json::from_slice(&line[..line.len() - 1]).map_err(|e| FieldError::Snapshot(e.to_string()))
}

pub fn read_snapshot<R: BufRead>(
    mut input: R,
) -> Result<(SnapshotHeader, Vec<Vec<f64>>), FieldError> {
    let header = read_header(&mut input)?;
    let len = header.n.pow(3);
    let mut buf = vec![0u8; len * 8];
    let mut components = Vec::with_capacity(header.component_count);
    for _ in 0..header.component_count {
        input
            .read_exact(&mut buf)
            .map_err(|e| FieldError::Snapshot(format!("truncated payload: {e}")))?;
        components.push(
            buf.chunks_exact(8)
                .map(|b| f64::from_le_bytes(b.try_into().expect("8-byte chunk")))
                .collect(),
        );
    }
    let mut rest = [0u8; 1];
    if input.read(&mut rest)? != 0 {
        return Err(FieldError::Snapshot("trailing bytes after payload".into()));
    }
    Ok((header, components))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn layout_is_header_then_le_payload() {
        let header = SnapshotHeader {
            n: 8,
            half_width: 1.5,
            component_count: 2,
            time: 0.25,
        };
        let a: Vec<f64> = (0..512).map(|i| i as f64).collect();
        let b: Vec<f64> = (0..512).map(|i| -(i as f64) * 0.5).collect();
        let mut bytes = Vec::new();
        write_snapshot(&mut bytes, &header, &[&a, &b]).unwrap();
        let newline = bytes.iter().position(|&c| c == b'\n').unwrap();
        let json: serde_json::Value = serde_json::from_slice(&bytes[..newline]).unwrap();
        assert_eq!(json["n"], 8);
        assert_eq!(json["D"], 1.5);
        assert_eq!(json["component_count"], 2);
        assert_eq!(bytes.len(), newline + 1 + 2 * 512 * 8);
        let second = &bytes[newline + 1 + 8..newline + 1 + 16];
        assert_eq!(f64::from_le_bytes(second.try_into().unwrap()), 1.0);

        let (h, comps) = read_snapshot(&bytes[..]).unwrap();
        assert_eq!(h, header);
        assert_eq!(comps, vec![a, b]);
    }

    #[test]
    fn truncated_payload_is_an_error() {
        let header = SnapshotHeader {
            n: 8,
            half_width: 1.0,
            component_count: 1,
            time: 0.0,
        };
        let mut bytes = Vec::new();
        write_snapshot(&mut bytes, &header, &[&vec![0.0; 512]]).unwrap();
        bytes.truncate(bytes.len() - 3);
        assert!(read_snapshot(&bytes[..]).is_err());
    }
}
