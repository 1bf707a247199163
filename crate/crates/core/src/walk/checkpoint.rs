//! SectorState checkpoints: a `SEC1 <N> <M> <t>` line followed by a CMX1
//! block whose row `k` holds `chi[k]`.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use super::SectorState;
use crate::error::{Error, Result};
use crate::matkernel::{cmx::read_header_line, read_cmx_from, write_cmx_to, CMatrix, CVector};

impl SectorState {
    pub fn write_checkpoint(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let data: Vec<_> = self.chi.iter().flat_map(|c| c.as_slice().iter().copied()).collect();
        let stack = CMatrix::new(self.n_sites(), self.coin_dim(), data)?;
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = BufWriter::new(file);
        writeln!(w, "SEC1 {} {} {}", self.n_sites(), self.coin_dim(), self.t)
            .and_then(|_| write_cmx_to(&mut w, &stack))
            .and_then(|_| w.flush())
            .map_err(|e| Error::io(path, e))
    }

    /// Restores a checkpoint. The start site is not stored in the file.
    pub fn read_checkpoint(path: impl AsRef<Path>, initial_site: usize) -> Result<SectorState> {
        let path = path.as_ref();
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        let mut r = BufReader::new(file);
        let header = read_header_line(&mut r)?;
        let fields: Vec<&str> = header.split_ascii_whitespace().collect();
        let parsed: Option<Vec<usize>> = match fields.as_slice() {
            ["SEC1", rest @ ..] if rest.len() == 3 => rest.iter().map(|s| s.parse().ok()).collect(),
            _ => None,
        };
        let [n, m, t] = parsed.as_deref().unwrap_or_default() else {
            return Err(Error::MalformedHeader(format!("expected `SEC1 <N> <M> <t>`, got `{header}`")));
        };
        let stack = read_cmx_from(&mut r)?;
        if stack.rows() != *n || stack.cols() != *m {
            return Err(Error::MalformedHeader("SEC1 header disagrees with matrix block".into()));
        }
        if initial_site >= *n {
            return Err(Error::InvalidArgument(format!("initial site {initial_site} out of range")));
        }
        let chi = (0..*n).map(|k| CVector(stack.row(k).to_vec())).collect();
        Ok(SectorState::from_parts(*t, initial_site, chi))
    }
}
