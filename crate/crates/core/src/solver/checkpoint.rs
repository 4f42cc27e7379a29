//! Binary checkpoints, little-endian throughout:
//!
//! | bytes | content |
//! |-------|---------|
//! | 8     | magic `BNSCKPT1` |
//! | 4     | format version (`u32`, currently 1) |
//! | 8     | `n` (`u64`) |
//! | 8     | step index (`u64`) |
//! | 8     | `t` (`f64`) |
//! | 8     | `ν` (`f64`) |
//! | 8     | `dt` (`f64`) |
//! | 48·n³ | coefficients of `u₁`, then `u₂`, then `u₃`; each as `n³` pairs (re, im) of `f64` in storage order `(i₁·n + i₂)·n + i₃` |

use std::io::{Read, Write};
use std::path::Path;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::{SpectralField, Vector3};
use crate::grid::Grid;

use super::state::FlowState;

const MAGIC: &[u8; 8] = b"BNSCKPT1";
const VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq)]
pub struct Checkpoint {
    pub state: FlowState,
    pub nu: f64,
    pub dt: f64,
}

pub fn write_checkpoint(w: &mut impl Write, ck: &Checkpoint) -> Result<()> {
    let g = ck.state.grid();
    let mut buf = Vec::with_capacity(52 + 48 * g.len());
    buf.extend_from_slice(MAGIC);
    buf.extend_from_slice(&VERSION.to_le_bytes());
    buf.extend_from_slice(&(g.n() as u64).to_le_bytes());
    buf.extend_from_slice(&ck.state.step.to_le_bytes());
    for v in [ck.state.t, ck.nu, ck.dt] {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    for c in ck.state.u.components() {
        for z in c.coeffs() {
            buf.extend_from_slice(&z.re.to_le_bytes());
            buf.extend_from_slice(&z.im.to_le_bytes());
        }
    }
    w.write_all(&buf)?;
    Ok(())
}

pub fn read_checkpoint(r: &mut impl Read) -> Result<Checkpoint> {
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes)?;
    let bad = |m: &str| Error::Checkpoint(m.to_string());
    if bytes.len() < 52 || &bytes[..8] != MAGIC {
        return Err(bad("missing magic header"));
    }
    let u32_at = |o: usize| u32::from_le_bytes(bytes[o..o + 4].try_into().unwrap());
    let u64_at = |o: usize| u64::from_le_bytes(bytes[o..o + 8].try_into().unwrap());
    let f64_at = |o: usize| f64::from_le_bytes(bytes[o..o + 8].try_into().unwrap());
    let version = u32_at(8);
    if version != VERSION {
        return Err(Error::Checkpoint(format!("unsupported version {version}")));
    }
    let grid = Grid::new(u64_at(12) as usize)?;
    let step = u64_at(20);
    let (t, nu, dt) = (f64_at(28), f64_at(36), f64_at(44));
    let expected = 52 + 48 * grid.len();
    if bytes.len() != expected {
        return Err(Error::Checkpoint(format!(
            "expected {expected} bytes for n = {}, found {}",
            grid.n(),
            bytes.len()
        )));
    }
    let mut off = 52;
    let mut comp = || {
        let coeffs: Vec<Complex64> = (0..grid.len())
            .map(|_| {
                let z = Complex64::new(f64_at(off), f64_at(off + 8));
                off += 16;
                z
            })
            .collect();
        SpectralField::from_vec_unchecked(grid, coeffs)
    };
    let u = Vector3::from_components_unchecked([comp(), comp(), comp()]);
    Ok(Checkpoint {
        state: FlowState::from_parts(t, step, u),
        nu,
        dt,
    })
}

pub fn save_checkpoint(path: &Path, ck: &Checkpoint) -> Result<()> {
    let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
    write_checkpoint(&mut f, ck)?;
    f.flush()?;
    Ok(())
}

pub fn load_checkpoint(path: &Path) -> Result<Checkpoint> {
    read_checkpoint(&mut std::fs::File::open(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::init::random_divfree_init;

    #[test]
    fn round_trip_is_bit_exact() {
        let mut state = random_divfree_init(Grid::new(8).unwrap(), 3, -2.0, 1.0);
        state.step = 17;
        state.t = 0.017;
        let ck = Checkpoint { state, nu: 0.1, dt: 1e-3 };
        let mut buf = Vec::new();
        write_checkpoint(&mut buf, &ck).unwrap();
        assert_eq!(buf.len(), 52 + 48 * 512);
        assert_eq!(read_checkpoint(&mut buf.as_slice()).unwrap(), ck);
    }

    #[test]
    fn rejects_corrupt_input() {
        assert!(read_checkpoint(&mut &b"nonsense"[..]).is_err());
        let ck = Checkpoint {
            state: random_divfree_init(Grid::new(8).unwrap(), 1, -2.0, 1.0),
            nu: 0.1,
            dt: 1e-3,
        };
        let mut buf = Vec::new();
        write_checkpoint(&mut buf, &ck).unwrap();
        buf.pop();
        assert!(matches!(read_checkpoint(&mut buf.as_slice()), Err(Error::Checkpoint(_))));
    }
}
