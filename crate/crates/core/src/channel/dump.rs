//! Binary dump of channel realizations for offline debugging.
//!
//! One record per drop, all fields little-endian:
//!
//! ```text
//! magic        8 bytes   "IRSCHDMP"
//! version      u32       1
//! seed         u64
//! drop         u64
//! n_elements   u32       N
//! n_antennas   u32       N_b
//! n_users      u32       K
//! rician_gamma f64
//! sigma_h2     f64
//! sigma_f2     K × f64
//! sigma_g2     K × f64
//! H            N·N_b × (re f64, im f64), row-major
//! f_k          K × N_b × (re, im)
//! g_k          K × N × (re, im)
//! ```

use std::io::{self, Read, Write};

use num_complex::Complex64;

use super::ChannelSet;
use crate::error::{Error, Result};
use crate::geometry::LargeScaleGains;
use crate::numerics::{ComplexMatrix, ComplexVector};

pub const MAGIC: &[u8; 8] = b"IRSCHDMP";
pub const VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RecordHeader {
    pub seed: u64,
    pub drop: u64,
    pub n_elements: u32,
    pub n_antennas: u32,
    pub n_users: u32,
}

pub fn write_record<W: Write>(w: &mut W, seed: u64, drop: u64, ch: &ChannelSet) -> Result<()> {
    w.write_all(MAGIC)?;
    w.write_all(&VERSION.to_le_bytes())?;
    w.write_all(&seed.to_le_bytes())?;
    w.write_all(&drop.to_le_bytes())?;
    for dim in [ch.n_elements(), ch.n_antennas(), ch.n_users()] {
        let d = u32::try_from(dim)
            .map_err(|_| Error::InvalidArgument(format!("dimension {dim} exceeds u32")))?;
        w.write_all(&d.to_le_bytes())?;
    }
    put_f64(w, ch.rician_gamma)?;
    put_f64(w, ch.gains.sigma_h2)?;
    for &v in ch.gains.sigma_f2.iter().chain(&ch.gains.sigma_g2) {
        put_f64(w, v)?;
    }
    put_complex(w, ch.h.as_slice())?;
    for f in &ch.f {
        put_complex(w, f.as_slice())?;
    }
    for g in &ch.g {
        put_complex(w, g.as_slice())?;
    }
    Ok(())
}

/// Reads the next record, or `None` at a clean end of stream.
pub fn read_record<R: Read>(r: &mut R) -> Result<Option<(RecordHeader, ChannelSet)>> {
    let mut magic = [0u8; 8];
    match r.read_exact(&mut magic) {
        Ok(()) => {}
        Err(e) if e.kind() == io::ErrorKind::UnexpectedEof => return Ok(None),
        Err(e) => return Err(e.into()),
    }
    if &magic != MAGIC {
        return Err(Error::InvalidArgument("bad channel dump magic".into()));
    }
    let version = get_u32(r)?;
    if version != VERSION {
        return Err(Error::InvalidArgument(format!(
            "unsupported channel dump version {version}"
        )));
    }
    let header = RecordHeader {
        seed: get_u64(r)?,
        drop: get_u64(r)?,
        n_elements: get_u32(r)?,
        n_antennas: get_u32(r)?,
        n_users: get_u32(r)?,
    };
    let (n, nb, k) = (
        header.n_elements as usize,
        header.n_antennas as usize,
        header.n_users as usize,
    );
    let gamma = get_f64(r)?;
    let sigma_h2 = get_f64(r)?;
    let sigma_f2 = (0..k).map(|_| get_f64(r)).collect::<Result<Vec<_>>>()?;
    let sigma_g2 = (0..k).map(|_| get_f64(r)).collect::<Result<Vec<_>>>()?;
    let h = ComplexMatrix::from_row_major(n, nb, get_complex(r, n * nb)?)?;
    let f = (0..k)
        .map(|_| get_complex(r, nb).map(ComplexVector::new))
        .collect::<Result<Vec<_>>>()?;
    let g = (0..k)
        .map(|_| get_complex(r, n).map(ComplexVector::new))
        .collect::<Result<Vec<_>>>()?;
    let gains = LargeScaleGains::new(sigma_f2, sigma_g2, sigma_h2)?;
    Ok(Some((header, ChannelSet::new(h, f, g, gains, gamma)?)))
}

fn put_f64<W: Write>(w: &mut W, v: f64) -> io::Result<()> {
    w.write_all(&v.to_le_bytes())
}

fn put_complex<W: Write>(w: &mut W, zs: &[Complex64]) -> io::Result<()> {
    for z in zs {
        put_f64(w, z.re)?;
        put_f64(w, z.im)?;
    }
    Ok(())
}

fn get_u32<R: Read>(r: &mut R) -> Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

fn get_u64<R: Read>(r: &mut R) -> Result<u64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(u64::from_le_bytes(b))
}

fn get_f64<R: Read>(r: &mut R) -> Result<f64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(f64::from_le_bytes(b))
}

fn get_complex<R: Read>(r: &mut R, n: usize) -> Result<Vec<Complex64>> {
    (0..n)
        .map(|_| Ok(Complex64::new(get_f64(r)?, get_f64(r)?)))
        .collect()
}
