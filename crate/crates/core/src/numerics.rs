//! Complex vector/matrix kernels and seeded random streams.
//!
//! Only the handful of operations the simulator needs are provided: inner
//! products, matrix-vector products, norms and component-wise phases. All
//! binary operations check conformability and return
//! [`Error::Conformability`] on mismatch.

use std::f64::consts::TAU;
use std::ops::Index;

use num_complex::Complex64;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{invalid, Error, Result};

/// Column vector of complex entries. Length is fixed at construction.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexVector {
    data: Vec<Complex64>,
}

impl ComplexVector {
    pub fn new(data: Vec<Complex64>) -> Self {
        Self { data }
    }

    pub fn zeros(len: usize) -> Self {
        Self {
            data: vec![Complex64::new(0.0, 0.0); len],
        }
    }

    /// Unit basis vector `e_index` of the given length.
    pub fn basis(len: usize, index: usize) -> Self {
        let mut v = Self::zeros(len);
        v.data[index] = Complex64::new(1.0, 0.0);
        v
    }

    pub fn from_reals(values: &[f64]) -> Self {
        Self::new(values.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Complex64> {
        self.data.iter()
    }

    pub fn into_vec(self) -> Vec<Complex64> {
        self.data
    }

    pub fn conj(&self) -> Self {
        Self::new(self.data.iter().map(|z| z.conj()).collect())
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self::new(self.data.iter().map(|z| z * s).collect())
    }

    pub fn scale_real(&self, s: f64) -> Self {
        Self::new(self.data.iter().map(|z| z * s).collect())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        check_len("add", self.len(), other.len())?;
        Ok(Self::new(
            self.data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        ))
    }

    /// Squared Frobenius norm, `Σ|x_i|²`.
    pub fn norm_sqr(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|z| z.re == 0.0 && z.im == 0.0)
    }
}

impl Index<usize> for ComplexVector {
    type Output = Complex64;
    fn index(&self, i: usize) -> &Complex64 {
        &self.data[i]
    }
}

impl FromIterator<Complex64> for ComplexVector {
    fn from_iter<I: IntoIterator<Item = Complex64>>(iter: I) -> Self {
        Self::new(iter.into_iter().collect())
    }
}

/// Dense row-major complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn from_row_major(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != rows * cols {
            return invalid(format!(
                "matrix {rows}x{cols} needs {} entries, got {}",
                rows * cols,
                data.len()
            ));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        self.data[r * self.cols + c]
    }

    /// Row `r` as a slice (for `H`, this is `h_rᵀ`).
    pub fn row(&self, r: usize) -> &[Complex64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `M v`.
    pub fn matvec(&self, v: &ComplexVector) -> Result<ComplexVector> {
        if self.cols != v.len() {
            return Err(Error::Conformability {
                op: "matvec",
                left: self.dims(),
                right: (v.len(), 1),
            });
        }
        Ok((0..self.rows)
            .map(|r| dot_slices(self.row(r), v.as_slice()))
            .collect())
    }

    /// `vᵀ M`, returned as a column vector of length `cols`.
    pub fn vecmat(&self, v: &ComplexVector) -> Result<ComplexVector> {
        if self.rows != v.len() {
            return Err(Error::Conformability {
                op: "vecmat",
                left: (1, v.len()),
                right: self.dims(),
            });
        }
        let mut out = vec![Complex64::new(0.0, 0.0); self.cols];
        for (r, &vr) in v.iter().enumerate() {
            for (o, &m) in out.iter_mut().zip(self.row(r)) {
                *o += vr * m;
            }
        }
        Ok(ComplexVector::new(out))
    }
}

fn check_len(op: &'static str, a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::Conformability {
            op,
            left: (a, 1),
            right: (b, 1),
        });
    }
    Ok(())
}

fn dot_slices(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Hermitian inner product `aᴴ b = Σ conj(a_i) b_i`.
pub fn hermitian_inner(a: &ComplexVector, b: &ComplexVector) -> Result<Complex64> {
    check_len("hermitian_inner", a.len(), b.len())?;
    Ok(a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum())
}

/// Bilinear product `aᵀ b` (no conjugation).
pub fn dot(a: &ComplexVector, b: &ComplexVector) -> Result<Complex64> {
    check_len("dot", a.len(), b.len())?;
    Ok(dot_slices(a.as_slice(), b.as_slice()))
}

pub fn matvec(m: &ComplexMatrix, v: &ComplexVector) -> Result<ComplexVector> {
    m.matvec(v)
}

pub fn frobenius_norm(v: &ComplexVector) -> f64 {
    v.norm()
}

/// Phase of `z` in `[0, 2π)`. The phase of exact zero is 0.
pub fn phase(z: Complex64) -> f64 {
    if z.re == 0.0 && z.im == 0.0 {
        return 0.0;
    }
    wrap_phase(z.im.atan2(z.re))
}

/// Maps any finite angle into `[0, 2π)`.
pub fn wrap_phase(angle: f64) -> f64 {
    let r = angle.rem_euclid(TAU);
    // rem_euclid can round up to exactly TAU for tiny negative inputs
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// Component-wise phase of a complex vector, canonicalized to `[0, 2π)`.
pub fn phase_of(v: &ComplexVector) -> Vec<f64> {
    v.iter().map(|&z| phase(z)).collect()
}

/// Deterministic random stream identified by `(seed, stream_id)`.
///
/// Backed by ChaCha12, which is counter based: distinct stream ids select
/// disjoint keystreams, and [`RngStream::substream`] jumps ahead by a fixed
/// word offset so per-link draws never depend on how many samples another
/// link consumed.
#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    stream_id: u64,
    rng: ChaCha12Rng,
}

/// Words reserved per substream (2^40 32-bit words).
const SUBSTREAM_STRIDE: u128 = 1 << 40;

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        rng.set_stream(stream_id);
        Self {
            seed,
            stream_id,
            rng,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    /// Independent substream `index` of this stream, starting from a fixed
    /// position regardless of how much of `self` has been consumed.
    pub fn substream(&self, index: u64) -> Self {
        let mut s = Self::new(self.seed, self.stream_id);
        s.rng.set_word_pos((index as u128 + 1) * SUBSTREAM_STRIDE);
        s
    }

    pub fn standard_normal(&mut self) -> f64 {
        StandardNormal.sample(&mut self.rng)
    }

    /// Uniform on `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        rand::Rng::random::<f64>(&mut self.rng)
    }

    /// Uniform on `[lo, hi)`.
    pub fn uniform_range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }

    /// Uniform integer on `0..n`.
    pub fn index(&mut self, n: usize) -> usize {
        rand::Rng::random_range(&mut self.rng, 0..n)
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.rng.fill_bytes(dst)
    }
}

/// One draw from CN(0, variance): real and imaginary parts are independent
/// N(0, variance/2).
pub fn sample_complex_gaussian(rng: &mut RngStream, variance: f64) -> Result<Complex64> {
    if !(variance >= 0.0) || !variance.is_finite() {
        return invalid(format!("variance must be finite and >= 0, got {variance}"));
    }
    if variance == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let s = (variance / 2.0).sqrt();
    let re = rng.standard_normal() * s;
    let im = rng.standard_normal() * s;
    Ok(Complex64::new(re, im))
}
