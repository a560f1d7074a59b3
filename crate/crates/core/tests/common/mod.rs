#![allow(dead_code)]

use irsim::beamforming::Beamformer;
use irsim::channel::{los_component, rayleigh_vector, rician_matrix};
use irsim::geometry::Scenario;
use irsim::numerics::{dot, ComplexMatrix, ComplexVector, RngStream};
use num_complex::Complex64;

pub struct Instance {
    pub g: ComplexVector,
    pub h: ComplexMatrix,
    pub f: ComplexVector,
}

/// Unit-variance Rayleigh `g`, `f` and Rayleigh `H`.
pub fn rayleigh_instance(n: usize, nb: usize, rng: &mut RngStream) -> Instance {
    let g = rayleigh_vector(n, 1.0, rng).unwrap();
    let hv = rayleigh_vector(n * nb, 1.0, rng).unwrap();
    let h = ComplexMatrix::from_row_major(n, nb, hv.into_vec()).unwrap();
    let f = rayleigh_vector(nb, 1.0, rng).unwrap();
    Instance { g, h, f }
}

/// Unit-variance Rayleigh `g`, `f` and a Γ = 5 Rician `H` whose LOS part
/// follows the default cell layout.
pub fn rician_instance(n: usize, nb: usize, rng: &mut RngStream) -> Instance {
    let los = los_component(&Scenario::default(), n, nb);
    let g = rayleigh_vector(n, 1.0, rng).unwrap();
    let h = rician_matrix(n, nb, 1.0, 5.0, &los, rng).unwrap();
    let f = rayleigh_vector(nb, 1.0, rng).unwrap();
    Instance { g, h, f }
}

pub fn random_unit_beamformer(nb: usize, rng: &mut RngStream) -> Beamformer {
    let u = rayleigh_vector(nb, 1.0, rng).unwrap();
    Beamformer::new(u.scale_real(1.0 / u.norm())).unwrap()
}

/// `Σ_n |g_n||h_nᵀw| + |fᵀw|`, computed row by row.
pub fn triangle_bound(inst: &Instance, w: &Beamformer) -> f64 {
    let mut s = dot(&inst.f, w.vector()).unwrap().norm();
    for n in 0..inst.h.rows() {
        let hw: Complex64 = inst
            .h
            .row(n)
            .iter()
            .zip(w.vector().iter())
            .map(|(a, b)| a * b)
            .sum();
        s += inst.g[n].norm() * hw.norm();
    }
    s
}

/// `|Σ_n g_n e^{jφ_n} h_nᵀw + fᵀw|²` without the library's helpers.
pub fn objective_direct(inst: &Instance, phases: &[f64], w: &Beamformer) -> f64 {
    let mut s = dot(&inst.f, w.vector()).unwrap();
    for (n, &p) in phases.iter().enumerate() {
        let hw: Complex64 = inst
            .h
            .row(n)
            .iter()
            .zip(w.vector().iter())
            .map(|(a, b)| a * b)
            .sum();
        s += inst.g[n] * Complex64::from_polar(1.0, p) * hw;
    }
    s.norm_sqr()
}

/// Best objective over all `levels^N` uniformly quantized phase vectors.
pub fn grid_best(inst: &Instance, w: &Beamformer, levels: usize) -> f64 {
    let n = inst.h.rows();
    let step = std::f64::consts::TAU / levels as f64;
    let mut best = f64::NEG_INFINITY;
    let mut idx = vec![0usize; n];
    loop {
        let phases: Vec<f64> = idx.iter().map(|&i| i as f64 * step).collect();
        best = best.max(objective_direct(inst, &phases, w));
        let mut pos = 0;
        loop {
            if pos == n {
                return best;
            }
            idx[pos] += 1;
            if idx[pos] < levels {
                break;
            }
            idx[pos] = 0;
            pos += 1;
        }
    }
}
