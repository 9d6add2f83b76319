//! `HKEL` binary snapshots: magic, version, `n`, `N`, component count and
//! time, followed by the samples, all little-endian.

use std::path::Path;

use hookean_core::{Grid, ScalarField};

use crate::error::{CliError, CliResult};

pub const MAGIC: [u8; 4] = *b"HKEL";
pub const VERSION: u32 = 1;
pub const HEADER_LEN: usize = 4 + 4 * 4 + 8;

#[derive(Clone, Debug, PartialEq)]
pub struct Snapshot {
    pub dim: u32,
    pub points: u32,
    pub time: f64,
    /// Row-major samples per component.
    pub components: Vec<Vec<f64>>,
}

impl Snapshot {
    pub fn from_fields<'a>(time: f64, fields: impl IntoIterator<Item = &'a ScalarField>) -> Self {
        let mut components = Vec::new();
        let mut shape = (0, 0);
        for f in fields {
            shape = (f.grid().dim() as u32, f.grid().points() as u32);
            components.push(f.values().to_vec());
        }
        Snapshot { dim: shape.0, points: shape.1, time, components }
    }

    pub fn grid(&self) -> hookean_core::Result<Grid> {
        Grid::new(self.dim as usize, self.points as usize)
    }

    pub fn to_fields(&self) -> hookean_core::Result<Vec<ScalarField>> {
        let grid = self.grid()?;
        self.components.iter().map(|c| ScalarField::from_values(&grid, c.clone())).collect()
    }

    pub fn encode(&self) -> Vec<u8> {
        let samples: usize = self.components.iter().map(Vec::len).sum();
        let mut out = Vec::with_capacity(HEADER_LEN + 8 * samples);
        out.extend_from_slice(&MAGIC);
        for v in [VERSION, self.dim, self.points, self.components.len() as u32] {
            out.extend_from_slice(&v.to_le_bytes());
        }
        out.extend_from_slice(&self.time.to_le_bytes());
        for c in &self.components {
            for x in c {
                out.extend_from_slice(&x.to_le_bytes());
            }
        }
        out
    }

    pub fn decode(bytes: &[u8]) -> Result<Self, String> {
        if bytes.len() < HEADER_LEN {
            return Err(format!("{} bytes is shorter than the header", bytes.len()));
        }
        if bytes[..4] != MAGIC {
            return Err("bad magic".into());
        }
        let word = |i: usize| u32::from_le_bytes(bytes[4 + 4 * i..8 + 4 * i].try_into().unwrap());
        let (version, dim, points, count) = (word(0), word(1), word(2), word(3));
        if version != VERSION {
            return Err(format!("unsupported version {version}"));
        }
        let time = f64::from_le_bytes(bytes[20..28].try_into().unwrap());
        let per = (points as usize).checked_pow(dim).ok_or("sample count overflows")?;
        let expected = per.checked_mul(count as usize).and_then(|s| s.checked_mul(8)).ok_or("sample count overflows")?;
        if bytes.len() - HEADER_LEN != expected {
            return Err(format!("expected {} bytes, found {}", HEADER_LEN + expected, bytes.len()));
        }
        let values: Vec<f64> =
            bytes[HEADER_LEN..].chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap())).collect();
        let components = if per == 0 { vec![Vec::new(); count as usize] } else { values.chunks(per).map(<[f64]>::to_vec).collect() };
        Ok(Snapshot { dim, points, time, components })
    }
}

pub fn write_snapshot(path: &Path, snap: &Snapshot) -> CliResult<()> {
    std::fs::write(path, snap.encode()).map_err(CliError::io(path))
}

pub fn read_snapshot(path: &Path) -> CliResult<Snapshot> {
    let bytes = std::fs::read(path).map_err(CliError::io(path))?;
    Snapshot::decode(&bytes).map_err(|reason| CliError::Snapshot { path: path.to_path_buf(), reason })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_layout() {
        let s = Snapshot { dim: 2, points: 8, time: 0.5, components: vec![vec![1.0; 64]] };
        let b = s.encode();
        assert_eq!(b.len(), HEADER_LEN + 8 * 64);
        assert_eq!(&b[..4], b"HKEL");
        assert_eq!(&b[4..8], &[1, 0, 0, 0]);
        assert_eq!(&b[8..12], &[2, 0, 0, 0]);
        assert_eq!(&b[12..16], &[8, 0, 0, 0]);
        assert_eq!(&b[16..20], &[1, 0, 0, 0]);
        assert_eq!(&b[20..28], &0.5f64.to_le_bytes());
    }

    #[test]
    fn corrupt_files_are_rejected() {
        let s = Snapshot { dim: 2, points: 8, time: 0.0, components: vec![vec![0.0; 64]; 2] };
        let b = s.encode();
        assert!(Snapshot::decode(&b[..b.len() - 1]).is_err());
        assert!(Snapshot::decode(&b[..10]).is_err());
        let mut bad = b.clone();
        bad[0] = b'X';
        assert!(Snapshot::decode(&bad).is_err());
        let mut v2 = b;
        v2[4] = 2;
        assert!(Snapshot::decode(&v2).is_err());
    }
}
