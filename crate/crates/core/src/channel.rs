//! Small-scale fading realizations for one Monte-Carlo drop.
//!
//! Direct (BS→UE) and reflected (IRS→UE) links are Rayleigh; the BS→IRS
//! matrix is Rician with a rank-one steering-vector LOS part.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::geometry::{LargeScaleGains, Scenario};
use crate::numerics::{sample_complex_gaussian, ComplexMatrix, ComplexVector, RngStream};

pub mod dump;

/// Array sizes and Rician factor needed to draw a realization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelParams {
    /// IRS elements `N`.
    pub n_elements: usize,
    /// BS antennas `N_b`.
    pub n_antennas: usize,
    pub rician_gamma: f64,
}

/// One realization of every link for all `K` users.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelSet {
    /// BS→IRS, `N × N_b`; row `n` is `h_nᵀ`.
    pub h: ComplexMatrix,
    /// BS→UE `f_k`, each of length `N_b`.
    pub f: Vec<ComplexVector>,
    /// IRS→UE `g_k`, each of length `N`.
    pub g: Vec<ComplexVector>,
    pub gains: LargeScaleGains,
    pub rician_gamma: f64,
}

impl ChannelSet {
    /// Assembles a channel set after checking that all dimensions agree.
    pub fn new(
        h: ComplexMatrix,
        f: Vec<ComplexVector>,
        g: Vec<ComplexVector>,
        gains: LargeScaleGains,
        rician_gamma: f64,
    ) -> Result<Self> {
        let (n, nb) = h.dims();
        if f.len() != g.len() || f.len() != gains.n_users() {
            return invalid(format!(
                "user count mismatch: {} f, {} g, {} gains",
                f.len(),
                g.len(),
                gains.n_users()
            ));
        }
        for (fk, gk) in f.iter().zip(&g) {
            if fk.len() != nb {
                return Err(Error::Conformability {
                    op: "channel_set f_k",
                    left: (fk.len(), 1),
                    right: (nb, 1),
                });
            }
            if gk.len() != n {
                return Err(Error::Conformability {
                    op: "channel_set g_k",
                    left: (gk.len(), 1),
                    right: (n, 1),
                });
            }
        }
        Ok(Self {
            h,
            f,
            g,
            gains,
            rician_gamma,
        })
    }

    pub fn n_users(&self) -> usize {
        self.f.len()
    }

    pub fn n_elements(&self) -> usize {
        self.h.rows()
    }

    pub fn n_antennas(&self) -> usize {
        self.h.cols()
    }
}

/// `len` i.i.d. CN(0, sigma2) entries.
pub fn rayleigh_vector(len: usize, sigma2: f64, rng: &mut RngStream) -> Result<ComplexVector> {
    if len == 0 {
        return invalid("rayleigh_vector needs len >= 1");
    }
    if !(sigma2 > 0.0) || !sigma2.is_finite() {
        return invalid(format!("rayleigh_vector needs sigma2 > 0, got {sigma2}"));
    }
    (0..len)
        .map(|_| sample_complex_gaussian(rng, sigma2))
        .collect()
}

/// `√(Γσ²/(Γ+1))·H_LOS + √(σ²/(Γ+1))·H_NLOS` with `H_NLOS` i.i.d. CN(0, 1).
pub fn rician_matrix(
    n_rows: usize,
    n_cols: usize,
    sigma_h2: f64,
    gamma: f64,
    los: &ComplexMatrix,
    rng: &mut RngStream,
) -> Result<ComplexMatrix> {
    if los.dims() != (n_rows, n_cols) {
        return Err(Error::Conformability {
            op: "rician_matrix",
            left: (n_rows, n_cols),
            right: los.dims(),
        });
    }
    if !(gamma >= 0.0) {
        return invalid(format!("Rician factor must be >= 0, got {gamma}"));
    }
    if !(sigma_h2 > 0.0) || !sigma_h2.is_finite() {
        return invalid(format!("sigma_h2 must be > 0, got {sigma_h2}"));
    }
    let los_amp = (gamma * sigma_h2 / (gamma + 1.0)).sqrt();
    let nlos_amp = (sigma_h2 / (gamma + 1.0)).sqrt();
    let mut data = Vec::with_capacity(n_rows * n_cols);
    for &l in los.as_slice() {
        let nlos = sample_complex_gaussian(rng, 1.0)?;
        data.push(l * los_amp + nlos * nlos_amp);
    }
    ComplexMatrix::from_row_major(n_rows, n_cols, data)
}

/// Half-wavelength ULA steering vector, `a_m = exp(jπ m sin θ)`.
pub fn steering_vector(len: usize, sin_theta: f64) -> ComplexVector {
    (0..len)
        .map(|m| Complex64::from_polar(1.0, PI * m as f64 * sin_theta))
        .collect()
}

/// Rank-one LOS matrix `a_r(θ_r) a_t(θ_t)ᴴ` for the given sines of the
/// arrival (IRS) and departure (BS) angles.
pub fn los_from_angles(
    n_elements: usize,
    n_antennas: usize,
    sin_arrival: f64,
    sin_departure: f64,
) -> ComplexMatrix {
    let ar = steering_vector(n_elements, sin_arrival);
    let at = steering_vector(n_antennas, sin_departure);
    ComplexMatrix::from_fn(n_elements, n_antennas, |n, i| ar[n] * at[i].conj())
}

/// LOS component of the BS→IRS channel.
///
/// Both arrays are ULAs laid along the y axis; the BS broadside faces +x and
/// the IRS broadside faces −x, so each angle is measured from its array's
/// broadside towards the other end of the link.
pub fn los_component(scenario: &Scenario, n_elements: usize, n_antennas: usize) -> ComplexMatrix {
    let bs = scenario.bs_position();
    let irs = scenario.irs_position();
    let d = scenario.bs_irs_distance();
    let sin_departure = (irs.y - bs.y) / d;
    let sin_arrival = (bs.y - irs.y) / d;
    los_from_angles(n_elements, n_antennas, sin_arrival, sin_departure)
}

/// Draws one independent realization of `H`, every `f_k` and every `g_k`.
pub fn generate_channel_set(
    params: &ChannelParams,
    los: &ComplexMatrix,
    gains: &LargeScaleGains,
    rng: &mut RngStream,
) -> Result<ChannelSet> {
    let h = rician_matrix(
        params.n_elements,
        params.n_antennas,
        gains.sigma_h2,
        params.rician_gamma,
        los,
        rng,
    )?;
    let f = gains
        .sigma_f2
        .iter()
        .map(|&s| rayleigh_vector(params.n_antennas, s, rng))
        .collect::<Result<Vec<_>>>()?;
    let g = gains
        .sigma_g2
        .iter()
        .map(|&s| rayleigh_vector(params.n_elements, s, rng))
        .collect::<Result<Vec<_>>>()?;
    ChannelSet::new(h, f, g, gains.clone(), params.rician_gamma)
}
