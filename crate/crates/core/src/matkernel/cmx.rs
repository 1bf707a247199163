//! CMX1 matrix files: an ASCII header line `CMX1 <rows> <cols>` followed by
//! `rows × cols` little-endian f64 pairs `(re, im)` in row-major order.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use super::{CMatrix, C64};
use crate::error::{Error, Result};

pub(crate) fn read_header_line(reader: &mut impl BufRead) -> Result<String> {
    let mut line = Vec::new();
    let io_err = |e| Error::io("<stream>", e);
    // Bounded so that binary garbage cannot make us read the whole file.
    let mut limited = reader.take(256);
    limited.read_until(b'\n', &mut line).map_err(io_err)?;
    if line.last() != Some(&b'\n') {
        return Err(Error::MalformedHeader("missing header line".into()));
    }
    line.pop();
    String::from_utf8(line).map_err(|_| Error::MalformedHeader("header is not ASCII".into()))
}

fn parse_dims(fields: &[&str]) -> Result<(usize, usize)> {
    let parse = |s: &str| s.parse::<usize>().map_err(|_| Error::MalformedHeader(format!("bad dimension `{s}`")));
    match fields {
        [rows, cols] => Ok((parse(rows)?, parse(cols)?)),
        _ => Err(Error::MalformedHeader("expected `CMX1 <rows> <cols>`".into())),
    }
}

pub fn read_cmx_from(reader: &mut impl BufRead) -> Result<CMatrix> {
    let header = read_header_line(reader)?;
    let fields: Vec<&str> = header.split_ascii_whitespace().collect();
    if fields.first() != Some(&"CMX1") {
        return Err(Error::MalformedHeader(format!("unexpected magic in `{header}`")));
    }
    let (rows, cols) = parse_dims(&fields[1..])?;
    if rows == 0 || cols == 0 {
        return Err(Error::MalformedHeader("zero dimension".into()));
    }
    let mut data = Vec::with_capacity(rows * cols);
    let mut buf = [0u8; 16];
    for _ in 0..rows * cols {
        reader
            .read_exact(&mut buf)
            .map_err(|_| Error::MalformedHeader("payload shorter than header declares".into()))?;
        let re = f64::from_le_bytes(buf[..8].try_into().unwrap());
        let im = f64::from_le_bytes(buf[8..].try_into().unwrap());
        data.push(C64::new(re, im));
    }
    CMatrix::new(rows, cols, data)
}

pub fn write_cmx_to(writer: &mut impl Write, m: &CMatrix) -> std::io::Result<()> {
    writeln!(writer, "CMX1 {} {}", m.rows(), m.cols())?;
    for z in m.as_slice() {
        writer.write_all(&z.re.to_le_bytes())?;
        writer.write_all(&z.im.to_le_bytes())?;
    }
    Ok(())
}

pub fn read_cmx(path: impl AsRef<Path>) -> Result<CMatrix> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = BufReader::new(file);
    let m = read_cmx_from(&mut reader)?;
    let mut trailing = [0u8; 1];
    if reader.read(&mut trailing).map_err(|e| Error::io(path, e))? != 0 {
        return Err(Error::MalformedHeader("trailing bytes after payload".into()));
    }
    Ok(m)
}

pub fn write_cmx(path: impl AsRef<Path>, m: &CMatrix) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut writer = BufWriter::new(file);
    write_cmx_to(&mut writer, m).and_then(|_| writer.flush()).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_layout_is_exact() {
        let m = CMatrix::new(1, 2, vec![C64::new(1.0, -2.0), C64::new(0.5, 0.0)]).unwrap();
        let mut bytes = Vec::new();
        write_cmx_to(&mut bytes, &m).unwrap();
        assert_eq!(&bytes[..9], b"CMX1 1 2\n");
        assert_eq!(bytes.len(), 9 + 2 * 16);
        assert_eq!(&bytes[9..17], &1.0f64.to_le_bytes());
        assert_eq!(&bytes[17..25], &(-2.0f64).to_le_bytes());
        let back = read_cmx_from(&mut &bytes[..]).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn rejects_bad_magic_and_short_payload() {
        assert!(matches!(read_cmx_from(&mut &b"CMX2 1 1\n"[..]), Err(Error::MalformedHeader(_))));
        assert!(matches!(read_cmx_from(&mut &b"CMX1 1\n"[..]), Err(Error::MalformedHeader(_))));
        assert!(matches!(read_cmx_from(&mut &b"CMX1 1 1\n\0\0"[..]), Err(Error::MalformedHeader(_))));
        assert!(matches!(read_cmx_from(&mut &b"no newline"[..]), Err(Error::MalformedHeader(_))));
    }
}
