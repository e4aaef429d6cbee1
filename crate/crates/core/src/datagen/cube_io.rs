//! `HCUB` cube files.
//!
//! Layout, little-endian: magic `HCUB`, version `u16`, then `p`, `rows`,
//! `cols` as `u32`, then `p·rows·cols` `f64` values band-major with pixels in
//! row-major order.

use std::io::{Read, Write};
use std::path::Path;

use byteorder::{LittleEndian, WriteBytesExt};

use crate::binio::ByteCursor;
use crate::error::{Error, Result};
use crate::spectra::HyperCube;

pub const CUBE_MAGIC: [u8; 4] = *b"HCUB";
pub const CUBE_VERSION: u16 = 1;

pub fn write_cube<W: Write>(cube: &HyperCube, mut w: W) -> Result<()> {
    let io = |e| Error::io("<cube stream>", e);
    w.write_all(&CUBE_MAGIC).map_err(io)?;
    w.write_u16::<LittleEndian>(CUBE_VERSION).map_err(io)?;
    for v in [cube.band_count(), cube.rows(), cube.cols()] {
        let v = u32::try_from(v).map_err(|_| Error::Malformed(format!("dimension {v} exceeds u32")))?;
        w.write_u32::<LittleEndian>(v).map_err(io)?;
    }
    let m = cube.matrix();
    for b in 0..cube.band_count() {
        for px in 0..cube.pixel_count() {
            w.write_f64::<LittleEndian>(m[(b, px)]).map_err(io)?;
        }
    }
    w.flush().map_err(io)?;
    Ok(())
}

pub fn read_cube<R: Read>(mut r: R) -> Result<HyperCube> {
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes)
        .map_err(|e| Error::io("<cube stream>", e))?;
    let mut cur = ByteCursor::new(&bytes);
    let magic = cur.array::<4>()?;
    if magic != CUBE_MAGIC {
        return Err(Error::BadMagic {
            expected: CUBE_MAGIC,
            found: magic,
        });
    }
    let version = cur.u16()?;
    if version != CUBE_VERSION {
        return Err(Error::VersionUnsupported(version));
    }
    let p = cur.u32()? as usize;
    let rows = cur.u32()? as usize;
    let cols = cur.u32()? as usize;
    let count = p
        .checked_mul(rows)
        .and_then(|v| v.checked_mul(cols))
        .ok_or_else(|| Error::Malformed("cube dimensions overflow".into()))?;
    let values = cur.f64s(count)?;
    cur.finish()?;
    HyperCube::from_band_major(p, rows, cols, &values)
}

pub fn save_cube(cube: &HyperCube, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    write_cube(cube, std::io::BufWriter::new(file)).map_err(|e| match e {
        Error::Io { source, .. } => Error::io(path, source),
        other => other,
    })
}

pub fn load_cube(path: impl AsRef<Path>) -> Result<HyperCube> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_cube(std::io::BufReader::new(file)).map_err(|e| match e {
        Error::Io { source, .. } => Error::io(path, source),
        other => other,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;

    fn sample() -> HyperCube {
        HyperCube::new(DMatrix::from_fn(3, 6, |b, px| (b * 10 + px) as f64 * 0.1 - 1.0), 2, 3).unwrap()
    }

    #[test]
    fn header_layout() {
        let mut buf = Vec::new();
        write_cube(&sample(), &mut buf).unwrap();
        assert_eq!(&buf[..4], b"HCUB");
        assert_eq!(&buf[4..6], &[1, 0]);
        assert_eq!(&buf[6..10], &[3, 0, 0, 0]);
        assert_eq!(&buf[10..14], &[2, 0, 0, 0]);
        assert_eq!(&buf[14..18], &[3, 0, 0, 0]);
        assert_eq!(buf.len(), 18 + 8 * 18);
        // second value is band 0, pixel 1
        let v = f64::from_le_bytes(buf[26..34].try_into().unwrap());
        assert_eq!(v, sample().value(0, 0, 1));
    }

    #[test]
    fn wrong_magic() {
        let mut buf = Vec::new();
        write_cube(&sample(), &mut buf).unwrap();
        buf[0] = b'X';
        assert!(matches!(read_cube(buf.as_slice()), Err(Error::BadMagic { .. })));
    }

    #[test]
    fn truncated_payload_reports_offset() {
        let mut buf = Vec::new();
        write_cube(&sample(), &mut buf).unwrap();
        buf.truncate(100);
        assert!(matches!(
            read_cube(buf.as_slice()),
            Err(Error::TruncatedFile { offset: 100 })
        ));
    }

    #[test]
    fn unsupported_version() {
        let mut buf = Vec::new();
        write_cube(&sample(), &mut buf).unwrap();
        buf[4] = 9;
        assert!(matches!(read_cube(buf.as_slice()), Err(Error::VersionUnsupported(9))));
    }

    #[test]
    fn trailing_bytes_rejected() {
        let mut buf = Vec::new();
        write_cube(&sample(), &mut buf).unwrap();
        buf.push(0);
        assert!(matches!(read_cube(buf.as_slice()), Err(Error::TrailingData { .. })));
    }
}
