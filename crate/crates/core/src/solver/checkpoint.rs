//! Binary checkpoints: magic, grid, time, then the five conserved arrays as
//! little-endian `f64`.

use std::io::{Read, Write};
use std::path::Path;

use super::{ChannelGrid, ConservedField};
use crate::error::{Error, Result};

const MAGIC: &[u8; 8] = b"EWAVECK1";

pub fn write_checkpoint(path: &Path, field: &ConservedField) -> Result<()> {
    let tmp = path.with_extension("tmp");
    {
        let mut w = std::io::BufWriter::new(std::fs::File::create(&tmp)?);
        w.write_all(MAGIC)?;
        let g = field.grid;
        for n in [g.n1, g.n2, g.n3] {
            w.write_all(&(n as u64).to_le_bytes())?;
        }
        w.write_all(&g.half_length.to_le_bytes())?;
        w.write_all(&field.t.to_le_bytes())?;
        for comp in field.components() {
            for v in comp {
                w.write_all(&v.to_le_bytes())?;
            }
        }
        w.flush()?;
    }
    std::fs::rename(&tmp, path)?;
    Ok(())
}

pub fn read_checkpoint(path: &Path) -> Result<ConservedField> {
    let mut r = std::io::BufReader::new(std::fs::File::open(path)?);
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(Error::Config(format!("{} is not a checkpoint file", path.display())));
    }
    let mut b = [0u8; 8];
    let mut next_u = |r: &mut std::io::BufReader<std::fs::File>| -> Result<u64> {
        r.read_exact(&mut b)?;
        Ok(u64::from_le_bytes(b))
    };
    let n1 = next_u(&mut r)? as usize;
    let n2 = next_u(&mut r)? as usize;
    let n3 = next_u(&mut r)? as usize;
    let half = f64::from_bits(next_u(&mut r)?);
    let t = f64::from_bits(next_u(&mut r)?);
    let grid = ChannelGrid::new(half, n1, n2, n3)?;
    let mut field = ConservedField::zeros(grid, t);
    for comp in field.components_mut() {
        for v in comp.iter_mut() {
            *v = f64::from_bits(next_u(&mut r)?);
        }
    }
    Ok(field)
}
