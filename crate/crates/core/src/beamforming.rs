//! Passive (IRS phase) and active (BS MRT) beamforming.
//!
//! For a fixed transmit vector `w`, the phases that maximise
//! `|(gᵀΘH + fᵀ)w|` align every reflected term `g_n e^{jφ_n} h_nᵀw` with the
//! direct term `fᵀw`, which attains the triangle-inequality bound
//! `Σ_n |g_n||h_nᵀw| + |fᵀw|`. For fixed phases the best `w` is MRT on the
//! effective channel. [`alternating_optimize`] alternates the two, starting
//! from MRT on the direct link.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::numerics::{dot, phase, wrap_phase, ComplexMatrix, ComplexVector, RngStream};

/// IRS configuration: one phase per element, unit amplitude.
#[derive(Debug, Clone, PartialEq)]
pub struct ReflectionState {
    phases: Vec<f64>,
}

impl ReflectionState {
    /// Phases must already lie in `[0, 2π)`.
    pub fn new(phases: Vec<f64>) -> Result<Self> {
        if let Some(p) = phases.iter().find(|p| !(0.0..TAU).contains(*p)) {
            return invalid(format!("phase {p} outside [0, 2π)"));
        }
        Ok(Self { phases })
    }

    /// Canonicalizes arbitrary finite angles into `[0, 2π)`.
    pub fn wrapped(phases: impl IntoIterator<Item = f64>) -> Self {
        Self {
            phases: phases.into_iter().map(wrap_phase).collect(),
        }
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            phases: vec![0.0; n],
        }
    }

    pub fn len(&self) -> usize {
        self.phases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phases.is_empty()
    }

    pub fn phases(&self) -> &[f64] {
        &self.phases
    }

    /// Diagonal of Θ: `e^{jφ_n}`.
    pub fn coefficients(&self) -> impl Iterator<Item = Complex64> + '_ {
        self.phases.iter().map(|&p| Complex64::from_polar(1.0, p))
    }
}

/// Transmit beamformer with `‖w‖ ≤ 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Beamformer {
    w: ComplexVector,
}

impl Beamformer {
    pub fn new(w: ComplexVector) -> Result<Self> {
        let n = w.norm();
        if !(n <= 1.0 + 1e-12) {
            return invalid(format!("beamformer norm {n} exceeds 1"));
        }
        Ok(Self { w })
    }

    pub fn vector(&self) -> &ComplexVector {
        &self.w
    }

    pub fn norm(&self) -> f64 {
        self.w.norm()
    }
}

/// Stopping rule for [`alternating_optimize`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AoOptions {
    pub max_iterations: usize,
    pub relative_tolerance: f64,
}

impl Default for AoOptions {
    fn default() -> Self {
        Self {
            max_iterations: 3,
            relative_tolerance: 1e-6,
        }
    }
}

impl AoOptions {
    pub fn validate(&self) -> Result<()> {
        if self.max_iterations == 0 {
            return invalid("max_iterations must be >= 1");
        }
        if !(self.relative_tolerance >= 0.0) {
            return invalid("relative_tolerance must be >= 0");
        }
        Ok(())
    }
}

/// Output of [`alternating_optimize`].
#[derive(Debug, Clone, PartialEq)]
pub struct AoResult {
    pub reflection: ReflectionState,
    pub beamformer: Beamformer,
    /// `trace[0]` is the objective after the first phase update with the
    /// direct-link MRT start; `trace[i]`, `i ≥ 1`, the objective after
    /// iteration `i` (phase update then MRT update).
    pub trace: Vec<f64>,
}

impl AoResult {
    /// Final objective `|(gᵀΘH + fᵀ)w|²`.
    pub fn objective(&self) -> f64 {
        *self.trace.last().expect("trace is never empty")
    }

    pub fn iterations(&self) -> usize {
        self.trace.len() - 1
    }
}

/// `gᵀΘH + fᵀ` as a length-`N_b` vector.
pub fn effective_channel(
    g: &ComplexVector,
    theta: &ReflectionState,
    h: &ComplexMatrix,
    f: &ComplexVector,
) -> Result<ComplexVector> {
    if g.len() != theta.len() {
        return Err(Error::Conformability {
            op: "effective_channel g/theta",
            left: (g.len(), 1),
            right: (theta.len(), 1),
        });
    }
    if f.len() != h.cols() {
        return Err(Error::Conformability {
            op: "effective_channel f/H",
            left: (f.len(), 1),
            right: h.dims(),
        });
    }
    let weighted: ComplexVector = g
        .iter()
        .zip(theta.coefficients())
        .map(|(a, b)| a * b)
        .collect();
    h.vecmat(&weighted)?.add(f)
}

/// Matched filter `w = c* / ‖c‖`, so `|cᵀw| = ‖c‖`.
pub fn mrt_beamformer(c: &ComplexVector) -> Result<Beamformer> {
    let n = c.norm();
    if !(n > 0.0) || !n.is_finite() {
        return Err(Error::DegenerateChannel(format!(
            "MRT needs a nonzero finite channel, got norm {n}"
        )));
    }
    Beamformer::new(c.conj().scale_real(1.0 / n))
}

/// `|(gᵀΘH + fᵀ)w|²`.
pub fn objective(
    g: &ComplexVector,
    theta: &ReflectionState,
    h: &ComplexMatrix,
    f: &ComplexVector,
    w: &Beamformer,
) -> Result<f64> {
    let c = effective_channel(g, theta, h, f)?;
    Ok(dot(&c, w.vector())?.norm_sqr())
}

/// Closed-form phases for fixed `w`: `φ_n = φ₀ − arg(g_n h_nᵀw)` with
/// `φ₀ = arg(fᵀw)`. A vanishing cascaded term gets `φ_n = φ₀`.
pub fn optimal_phases(
    g: &ComplexVector,
    h: &ComplexMatrix,
    w: &Beamformer,
    f: &ComplexVector,
) -> Result<ReflectionState> {
    if g.len() != h.rows() {
        return Err(Error::Conformability {
            op: "optimal_phases g/H",
            left: (g.len(), 1),
            right: h.dims(),
        });
    }
    let phi0 = phase(dot(f, w.vector())?);
    let hw = h.matvec(w.vector())?;
    Ok(ReflectionState::wrapped(
        g.iter()
            .zip(hw.iter())
            .map(|(gn, hn)| phi0 - phase(gn * hn)),
    ))
}

/// Alternating optimization of IRS phases and the transmit beamformer for
/// a single user.
///
/// Stops after `max_iterations` iterations, when the relative improvement
/// drops below `relative_tolerance`, or when an iteration fails to increase
/// the objective (in which case the previous pair is kept).
pub fn alternating_optimize(
    g: &ComplexVector,
    h: &ComplexMatrix,
    f: &ComplexVector,
    opts: &AoOptions,
) -> Result<AoResult> {
    opts.validate()?;
    if f.is_zero() {
        return Err(Error::DegenerateChannel(
            "alternating optimization starts from direct-link MRT, but f is zero".into(),
        ));
    }
    let mut w = mrt_beamformer(f)?;
    let mut theta = optimal_phases(g, h, &w, f)?;
    let mut trace = vec![objective(g, &theta, h, f, &w)?];

    for iter in 1..=opts.max_iterations {
        let cand_theta = if iter == 1 {
            theta.clone()
        } else {
            optimal_phases(g, h, &w, f)?
        };
        let c = effective_channel(g, &cand_theta, h, f)?;
        let cand_w = mrt_beamformer(&c)?;
        let value = dot(&c, cand_w.vector())?.norm_sqr();
        let prev = *trace.last().expect("trace is never empty");
        if value < prev {
            break;
        }
        theta = cand_theta;
        w = cand_w;
        trace.push(value);
        if (value - prev) / prev < opts.relative_tolerance {
            break;
        }
    }

    Ok(AoResult {
        reflection: theta,
        beamformer: w,
        trace,
    })
}

/// CSI-independent i.i.d. uniform phases on `[0, 2π)`.
pub fn random_reflection(n: usize, rng: &mut RngStream) -> ReflectionState {
    ReflectionState::wrapped((0..n).map(|_| rng.uniform() * TAU))
}
