//! Binary field checkpoint.
//!
//! Layout, all little-endian: magic `DNS1`, `u32` version, `u32 n`, `f64 L`,
//! `f64 t`, `u32` nucleus count, then per nucleus `Z, m, q, q̇` as eight
//! `f64`, then the `n³ × 4` position-space entries as `(re, im)` pairs with
//! the grid index outermost and the spinor component innermost.

use std::io::{Read, Write};
use std::path::Path;

use num_complex::Complex64;

use super::{GridSpec, Space, SpinorField, Vec3};
use crate::error::{Error, Result};
use crate::potentials::Nucleus;

pub const MAGIC: &[u8; 4] = b"DNS1";
pub const VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq)]
pub struct Checkpoint {
    pub time: f64,
    pub nuclei: Vec<Nucleus>,
    pub field: SpinorField,
}

impl Checkpoint {
    pub fn new(time: f64, nuclei: Vec<Nucleus>, field: SpinorField) -> Self {
        Self { time, nuclei, field }
    }

    pub fn write_to(&self, mut w: impl Write) -> Result<()> {
        let field = self.field.in_position();
        let grid = field.grid();
        let n = u32::try_from(grid.n()).map_err(|_| Error::Format("grid too large".into()))?;
        let count = u32::try_from(self.nuclei.len()).map_err(|_| Error::Format("too many nuclei".into()))?;
        let mut buf = Vec::with_capacity(32 + 64 * self.nuclei.len() + 64 * grid.len());
        buf.extend_from_slice(MAGIC);
        buf.extend_from_slice(&VERSION.to_le_bytes());
        buf.extend_from_slice(&n.to_le_bytes());
        buf.extend_from_slice(&grid.box_length().to_le_bytes());
        buf.extend_from_slice(&self.time.to_le_bytes());
        buf.extend_from_slice(&count.to_le_bytes());
        for nuc in &self.nuclei {
            let vals = [nuc.charge, nuc.mass].into_iter().chain(nuc.position.iter().copied()).chain(nuc.velocity.iter().copied());
            for v in vals {
                buf.extend_from_slice(&v.to_le_bytes());
            }
        }
        let comps = field.components();
        for idx in 0..grid.len() {
            for comp in comps {
                buf.extend_from_slice(&comp[idx].re.to_le_bytes());
                buf.extend_from_slice(&comp[idx].im.to_le_bytes());
            }
        }
        w.write_all(&buf)?;
        Ok(())
    }

    pub fn read_from(mut r: impl Read) -> Result<Self> {
        let mut bytes = Vec::new();
        r.read_to_end(&mut bytes)?;
        let mut cur = Cursor { bytes: &bytes, pos: 0 };
        if cur.take(4)? != MAGIC {
            return Err(Error::Format("bad magic bytes".into()));
        }
        let version = cur.u32()?;
        if version != VERSION {
            return Err(Error::Format(format!("unsupported version {version}")));
        }
        let n = cur.u32()? as usize;
        let box_length = cur.f64()?;
        let grid = GridSpec::new(n, box_length)?;
        let time = cur.f64()?;
        let count = cur.u32()? as usize;
        if count > (bytes.len() - cur.pos) / 64 {
            return Err(Error::Format("truncated nucleus records".into()));
        }
        let mut nuclei = Vec::with_capacity(count);
        for _ in 0..count {
            let z = cur.f64()?;
            let m = cur.f64()?;
            let q = Vec3::new(cur.f64()?, cur.f64()?, cur.f64()?);
            let v = Vec3::new(cur.f64()?, cur.f64()?, cur.f64()?);
            nuclei.push(Nucleus::new(z, m, q, v)?);
        }
        let expected = grid.len() * 64;
        if bytes.len() - cur.pos != expected {
            return Err(Error::Format(format!(
                "field payload has {} bytes, expected {expected}",
                bytes.len() - cur.pos
            )));
        }
        let mut comps: [Vec<Complex64>; 4] = std::array::from_fn(|_| Vec::with_capacity(grid.len()));
        for _ in 0..grid.len() {
            for comp in comps.iter_mut() {
                comp.push(Complex64::new(cur.f64()?, cur.f64()?));
            }
        }
        let field = SpinorField::from_components(grid, Space::Position, comps)?;
        if !field.is_finite() {
            return Err(Error::NonFinite("checkpoint field"));
        }
        Ok(Self { time, nuclei, field })
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let file = std::fs::File::create(path)?;
        let mut w = std::io::BufWriter::new(file);
        self.write_to(&mut w)?;
        w.flush()?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::read_from(std::io::BufReader::new(std::fs::File::open(path)?))
    }
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, len: usize) -> Result<&'a [u8]> {
        let end = self.pos + len;
        if end > self.bytes.len() {
            return Err(Error::Format("unexpected end of data".into()));
        }
        let out = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(out)
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
}
