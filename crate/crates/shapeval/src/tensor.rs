//! The on-disk dense tensor format used for point sets, feature matrices and
//! cached distance matrices.
//!
//! Layout, little-endian throughout:
//!
//! ```text
//! bytes 0..8    magic "STNSR1\n\0"
//! byte  8       dtype code: 1 = f32, 2 = f64
//! byte  9       ndim (0..=8)
//! bytes 10..16  zero padding
//! then          ndim x u64 extents
//! then          row-major payload
//! ```
//!
//! Reading is strict: wrong magic, nonzero padding, unknown dtype, more than
//! 8 dimensions, truncated or trailing payload bytes are all errors, and a
//! shape whose element count exceeds 2^48 is rejected before any allocation.

use std::fs;
use std::io::{self, Write};
use std::path::Path;

use thiserror::Error;

pub const MAGIC: [u8; 8] = *b"STNSR1\n\0";
pub const MAX_NDIM: usize = 8;
pub const MAX_ELEMENTS: u64 = 1 << 48;

#[derive(Debug, Error)]
pub enum TensorError {
    #[error("bad magic: not a tensor file")]
    BadMagic,
    #[error("truncated file: expected {expected} more bytes")]
    TruncatedFile { expected: u64 },
    #[error("unknown dtype code {0}")]
    UnknownDtype(u8),
    #[error("shape product exceeds 2^48 elements")]
    ShapeOverflow,
    #[error("bad header: {0}")]
    BadHeader(&'static str),
    #[error("trailing bytes after payload")]
    TrailingBytes,
    #[error("tensor invariant violated: shape product {expected} != data length {actual}")]
    LengthMismatch { expected: u64, actual: usize },
    #[error("io failure: {0}")]
    Io(#[from] io::Error),
}

/// Element storage; the dtype tag is implied by the variant.
#[derive(Debug, Clone, PartialEq)]
pub enum TensorData {
    F32(Vec<f32>),
    F64(Vec<f64>),
}

impl TensorData {
    pub fn len(&self) -> usize {
        match self {
            TensorData::F32(v) => v.len(),
            TensorData::F64(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Payload promoted to f64; exact for both dtypes.
    pub fn as_f64(&self) -> Vec<f64> {
        match self {
            TensorData::F32(v) => v.iter().map(|&x| x as f64).collect(),
            TensorData::F64(v) => v.clone(),
        }
    }

    fn dtype_code(&self) -> u8 {
        match self {
            TensorData::F32(_) => 1,
            TensorData::F64(_) => 2,
        }
    }
}

/// A dense row-major tensor with its shape.
#[derive(Debug, Clone, PartialEq)]
pub struct TensorFile {
    pub shape: Vec<u64>,
    pub data: TensorData,
}

impl TensorFile {
    pub fn new(shape: Vec<u64>, data: TensorData) -> Result<Self, TensorError> {
        if shape.len() > MAX_NDIM {
            return Err(TensorError::BadHeader("more than 8 dimensions"));
        }
        let expected = element_count(&shape)?;
        if expected != data.len() as u64 {
            return Err(TensorError::LengthMismatch { expected, actual: data.len() });
        }
        Ok(Self { shape, data })
    }

    pub fn from_f64(shape: Vec<u64>, values: Vec<f64>) -> Result<Self, TensorError> {
        Self::new(shape, TensorData::F64(values))
    }
}

fn element_count(shape: &[u64]) -> Result<u64, TensorError> {
    let mut product: u64 = 1;
    for &extent in shape {
        product = product
            .checked_mul(extent)
            .filter(|&p| p <= MAX_ELEMENTS)
            .ok_or(TensorError::ShapeOverflow)?;
    }
    Ok(product)
}

pub fn read_tensor(path: &Path) -> Result<TensorFile, TensorError> {
    let bytes = fs::read(path)?;
    decode_tensor(&bytes)
}

pub fn decode_tensor(bytes: &[u8]) -> Result<TensorFile, TensorError> {
    let mut cursor = bytes;

    let mut magic = [0u8; 8];
    read_exact(&mut cursor, &mut magic)?;
    if magic != MAGIC {
        return Err(TensorError::BadMagic);
    }

    let mut head = [0u8; 8];
    read_exact(&mut cursor, &mut head)?;
    let dtype = head[0];
    let ndim = head[1] as usize;
    if head[2..8] != [0u8; 6] {
        return Err(TensorError::BadHeader("nonzero padding"));
    }
    if ndim > MAX_NDIM {
        return Err(TensorError::BadHeader("more than 8 dimensions"));
    }

    let mut shape = Vec::with_capacity(ndim);
    for _ in 0..ndim {
        let mut ext = [0u8; 8];
        read_exact(&mut cursor, &mut ext)?;
        shape.push(u64::from_le_bytes(ext));
    }
    let count = element_count(&shape)?;

    let elem_size = match dtype {
        1 => 4usize,
        2 => 8usize,
        other => return Err(TensorError::UnknownDtype(other)),
    };
    let payload_len = count as usize * elem_size;
    if cursor.len() < payload_len {
        return Err(TensorError::TruncatedFile {
            expected: (payload_len - cursor.len()) as u64,
        });
    }
    if cursor.len() > payload_len {
        return Err(TensorError::TrailingBytes);
    }

    let data = match dtype {
        1 => TensorData::F32(
            cursor
                .chunks_exact(4)
                .map(|c| f32::from_le_bytes(c.try_into().unwrap()))
                .collect(),
        ),
        _ => TensorData::F64(
            cursor
                .chunks_exact(8)
                .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
                .collect(),
        ),
    };
    Ok(TensorFile { shape, data })
}

fn read_exact(cursor: &mut &[u8], buf: &mut [u8]) -> Result<(), TensorError> {
    if cursor.len() < buf.len() {
        return Err(TensorError::TruncatedFile {
            expected: (buf.len() - cursor.len()) as u64,
        });
    }
    buf.copy_from_slice(&cursor[..buf.len()]);
    *cursor = &cursor[buf.len()..];
    Ok(())
}

pub fn write_tensor(tensor: &TensorFile, path: &Path) -> Result<(), TensorError> {
    let bytes = encode_tensor(tensor)?;
    let mut file = fs::File::create(path)?;
    file.write_all(&bytes)?;
    Ok(())
}

pub fn encode_tensor(tensor: &TensorFile) -> Result<Vec<u8>, TensorError> {
    // Re-check invariants so a hand-built struct cannot write a corrupt file.
    let count = element_count(&tensor.shape)?;
    if tensor.shape.len() > MAX_NDIM {
        return Err(TensorError::BadHeader("more than 8 dimensions"));
    }
    if count != tensor.data.len() as u64 {
        return Err(TensorError::LengthMismatch { expected: count, actual: tensor.data.len() });
    }

    let elem_size = match tensor.data {
        TensorData::F32(_) => 4,
        TensorData::F64(_) => 8,
    };
    let mut out =
        Vec::with_capacity(16 + tensor.shape.len() * 8 + tensor.data.len() * elem_size);
    out.extend_from_slice(&MAGIC);
    out.push(tensor.data.dtype_code());
    out.push(tensor.shape.len() as u8);
    out.extend_from_slice(&[0u8; 6]);
    for &extent in &tensor.shape {
        out.extend_from_slice(&extent.to_le_bytes());
    }
    match &tensor.data {
        TensorData::F32(v) => {
            for x in v {
                out.extend_from_slice(&x.to_le_bytes());
            }
        }
        TensorData::F64(v) => {
            for x in v {
                out.extend_from_slice(&x.to_le_bytes());
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_and_payload_layout() {
        let t = TensorFile::from_f64(vec![1], vec![3.5]).unwrap();
        let bytes = encode_tensor(&t).unwrap();
        assert_eq!(&bytes[..8], &MAGIC);
        assert_eq!(bytes[8], 2);
        assert_eq!(bytes[9], 1);
        assert_eq!(&bytes[10..16], &[0u8; 6]);
        assert_eq!(&bytes[16..24], &1u64.to_le_bytes());
        assert_eq!(&bytes[24..], &3.5f64.to_le_bytes());
    }

    #[test]
    fn f32_payload_is_four_bytes_per_element() {
        let t = TensorFile::new(vec![2, 2], TensorData::F32(vec![0.0; 4])).unwrap();
        let bytes = encode_tensor(&t).unwrap();
        assert_eq!(bytes.len(), 16 + 16 + 16);
    }

    #[test]
    fn decode_simple_f64() {
        let t = TensorFile::from_f64(vec![2, 3], vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0]).unwrap();
        let back = decode_tensor(&encode_tensor(&t).unwrap()).unwrap();
        assert_eq!(back, t);
    }

    #[test]
    fn empty_extent_tensor() {
        let t = TensorFile::new(vec![0, 5], TensorData::F32(vec![])).unwrap();
        let back = decode_tensor(&encode_tensor(&t).unwrap()).unwrap();
        assert_eq!(back.shape, vec![0, 5]);
        assert_eq!(back.data.len(), 0);
    }

    #[test]
    fn bad_magic_rejected() {
        let t = TensorFile::from_f64(vec![1], vec![1.0]).unwrap();
        let mut bytes = encode_tensor(&t).unwrap();
        bytes[0] = b'X';
        assert!(matches!(decode_tensor(&bytes), Err(TensorError::BadMagic)));
    }

    #[test]
    fn truncation_rejected() {
        let t = TensorFile::from_f64(vec![4], vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        let bytes = encode_tensor(&t).unwrap();
        assert!(matches!(
            decode_tensor(&bytes[..bytes.len() - 1]),
            Err(TensorError::TruncatedFile { .. })
        ));
    }

    #[test]
    fn trailing_bytes_rejected() {
        let t = TensorFile::from_f64(vec![1], vec![1.0]).unwrap();
        let mut bytes = encode_tensor(&t).unwrap();
        bytes.push(0);
        assert!(matches!(decode_tensor(&bytes), Err(TensorError::TrailingBytes)));
    }

    #[test]
    fn unknown_dtype_rejected() {
        let t = TensorFile::from_f64(vec![1], vec![1.0]).unwrap();
        let mut bytes = encode_tensor(&t).unwrap();
        bytes[8] = 9;
        assert!(matches!(decode_tensor(&bytes), Err(TensorError::UnknownDtype(9))));
    }

    #[test]
    fn shape_overflow_rejected() {
        let mut bytes = Vec::new();
        bytes.extend_from_slice(&MAGIC);
        bytes.push(2);
        bytes.push(2);
        bytes.extend_from_slice(&[0u8; 6]);
        bytes.extend_from_slice(&(1u64 << 40).to_le_bytes());
        bytes.extend_from_slice(&(1u64 << 40).to_le_bytes());
        assert!(matches!(decode_tensor(&bytes), Err(TensorError::ShapeOverflow)));
    }

    #[test]
    fn nonzero_padding_rejected() {
        let t = TensorFile::from_f64(vec![1], vec![1.0]).unwrap();
        let mut bytes = encode_tensor(&t).unwrap();
        bytes[12] = 1;
        assert!(matches!(decode_tensor(&bytes), Err(TensorError::BadHeader(_))));
    }
}
