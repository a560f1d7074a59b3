//! Scenario layout, user dropping and large-scale propagation.
//!
//! Path losses follow the three-slope COST-Hata model with distances in
//! kilometres for the BS→UE and IRS→UE links, and a free-space model with a
//! 1 m reference for the line-of-sight BS→IRS link. Shadowing is log-normal
//! and only applied to the COST-Hata links.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::numerics::RngStream;

/// Boltzmann constant, J/K.
pub const BOLTZMANN: f64 = 1.380649e-23;

const MAX_DROP_ATTEMPTS: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(&self, other: &Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

/// Axis-aligned rectangle, metres.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Rect {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

impl Rect {
    pub const fn new(x_min: f64, x_max: f64, y_min: f64, y_max: f64) -> Self {
        Self {
            x_min,
            x_max,
            y_min,
            y_max,
        }
    }

    pub fn centroid(&self) -> Point {
        Point::new(
            0.5 * (self.x_min + self.x_max),
            0.5 * (self.y_min + self.y_max),
        )
    }

    pub fn contains(&self, p: &Point) -> bool {
        (self.x_min..=self.x_max).contains(&p.x) && (self.y_min..=self.y_max).contains(&p.y)
    }

    fn is_valid(&self) -> bool {
        [self.x_min, self.x_max, self.y_min, self.y_max]
            .iter()
            .all(|v| v.is_finite())
            && self.x_min < self.x_max
            && self.y_min < self.y_max
    }

    /// True if the interiors overlap (shared edges or corners are allowed).
    fn overlaps(&self, other: &Rect) -> bool {
        self.x_min < other.x_max
            && other.x_min < self.x_max
            && self.y_min < other.y_max
            && other.y_min < self.y_max
    }

    fn sample(&self, rng: &mut RngStream) -> Point {
        let x = rng.uniform_range(self.x_min, self.x_max);
        let y = rng.uniform_range(self.y_min, self.y_max);
        Point::new(x, y)
    }
}

/// Cell layout. The IRS always sits at the centroid of the cell-edge area.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ScenarioFields", into = "ScenarioFields")]
pub struct Scenario {
    bs_position: Point,
    irs_position: Point,
    center_area: Rect,
    edge_area: Rect,
    min_bs_distance: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioFields {
    bs_position: Point,
    center_area: Rect,
    edge_area: Rect,
    min_bs_distance: f64,
}

impl TryFrom<ScenarioFields> for Scenario {
    type Error = Error;
    fn try_from(f: ScenarioFields) -> Result<Self> {
        Scenario::new(f.bs_position, f.center_area, f.edge_area, f.min_bs_distance)
    }
}

impl From<Scenario> for ScenarioFields {
    fn from(s: Scenario) -> Self {
        Self {
            bs_position: s.bs_position,
            center_area: s.center_area,
            edge_area: s.edge_area,
            min_bs_distance: s.min_bs_distance,
        }
    }
}

impl Default for Scenario {
    /// BS at the origin, a 250 m square cell centre and a 250 m square cell
    /// edge whose centroid (375 m, 375 m) hosts the IRS.
    fn default() -> Self {
        Scenario::new(
            Point::new(0.0, 0.0),
            Rect::new(0.0, 250.0, 0.0, 250.0),
            Rect::new(250.0, 500.0, 250.0, 500.0),
            10.0,
        )
        .expect("default scenario is valid")
    }
}

impl Scenario {
    pub fn new(
        bs_position: Point,
        center_area: Rect,
        edge_area: Rect,
        min_bs_distance: f64,
    ) -> Result<Self> {
        if !center_area.is_valid() || !edge_area.is_valid() {
            return Err(Error::Scenario(
                "areas must be non-empty finite rectangles".into(),
            ));
        }
        if center_area.overlaps(&edge_area) {
            return Err(Error::Scenario(
                "cell-centre and cell-edge areas overlap".into(),
            ));
        }
        if !(min_bs_distance >= 0.0) || !min_bs_distance.is_finite() {
            return Err(Error::Scenario(format!(
                "min_bs_distance must be finite and >= 0, got {min_bs_distance}"
            )));
        }
        let irs_position = edge_area.centroid();
        if irs_position.distance(&bs_position) < 1.0 {
            return Err(Error::Scenario(
                "IRS must be at least 1 m from the BS".into(),
            ));
        }
        Ok(Self {
            bs_position,
            irs_position,
            center_area,
            edge_area,
            min_bs_distance,
        })
    }

    pub fn bs_position(&self) -> Point {
        self.bs_position
    }

    pub fn irs_position(&self) -> Point {
        self.irs_position
    }

    pub fn center_area(&self) -> Rect {
        self.center_area
    }

    pub fn edge_area(&self) -> Rect {
        self.edge_area
    }

    pub fn min_bs_distance(&self) -> f64 {
        self.min_bs_distance
    }

    pub fn bs_irs_distance(&self) -> f64 {
        self.bs_position.distance(&self.irs_position)
    }
}

/// Propagation model constants.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PathlossParams {
    /// Carrier frequency, MHz.
    pub f0_mhz: f64,
    /// BS / IRS antenna height, m.
    pub h_s_m: f64,
    /// UE antenna height, m.
    pub h_t_m: f64,
    /// Inner breakpoint, km.
    pub d0_km: f64,
    /// Outer breakpoint, km.
    pub d1_km: f64,
    /// Log-normal shadowing standard deviation, dB.
    pub shadow_sigma_db: f64,
    /// LOS path loss at 1 m, dB.
    pub l0_db: f64,
    /// LOS path-loss exponent.
    pub alpha: f64,
    /// Fixed COST-Hata constant, dB. When absent it is derived from
    /// `f0_mhz`, `h_s_m` and `h_t_m`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p0_db: Option<f64>,
}

impl Default for PathlossParams {
    fn default() -> Self {
        Self {
            f0_mhz: 1900.0,
            h_s_m: 15.0,
            h_t_m: 1.65,
            d0_km: 0.01,
            d1_km: 0.05,
            shadow_sigma_db: 8.0,
            l0_db: -30.0,
            alpha: 2.0,
            p0_db: None,
        }
    }
}

impl PathlossParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.d0_km > 0.0 && self.d0_km < self.d1_km) {
            return invalid(format!(
                "need 0 < d0_km < d1_km, got d0={} d1={}",
                self.d0_km, self.d1_km
            ));
        }
        if !(self.alpha > 0.0) {
            return invalid(format!("alpha must be > 0, got {}", self.alpha));
        }
        if !(self.shadow_sigma_db >= 0.0) {
            return invalid("shadow_sigma_db must be >= 0");
        }
        if !self.l0_db.is_finite() {
            return invalid("l0_db must be finite");
        }
        self.p0_db().map(|_| ())
    }

    pub fn p0_db(&self) -> Result<f64> {
        match self.p0_db {
            Some(p) if p.is_finite() => Ok(p),
            Some(p) => invalid(format!("p0_db must be finite, got {p}")),
            None => p0_db(self.f0_mhz, self.h_s_m, self.h_t_m),
        }
    }
}

/// Per-drop large-scale power gains (linear).
#[derive(Debug, Clone, PartialEq)]
pub struct LargeScaleGains {
    /// BS→UE gain per user.
    pub sigma_f2: Vec<f64>,
    /// IRS→UE gain per user.
    pub sigma_g2: Vec<f64>,
    /// BS→IRS gain.
    pub sigma_h2: f64,
}

impl LargeScaleGains {
    pub fn new(sigma_f2: Vec<f64>, sigma_g2: Vec<f64>, sigma_h2: f64) -> Result<Self> {
        if sigma_f2.len() != sigma_g2.len() {
            return invalid("sigma_f2 and sigma_g2 must have one entry per user");
        }
        let ok = |v: f64| v > 0.0 && v.is_finite();
        if !sigma_f2.iter().chain(&sigma_g2).all(|&v| ok(v)) || !ok(sigma_h2) {
            return invalid("large-scale gains must be strictly positive and finite");
        }
        Ok(Self {
            sigma_f2,
            sigma_g2,
            sigma_h2,
        })
    }

    pub fn n_users(&self) -> usize {
        self.sigma_f2.len()
    }
}

/// Constant term of the COST-Hata model, dB. `f0` in MHz, heights in m.
pub fn p0_db(f0_mhz: f64, h_s_m: f64, h_t_m: f64) -> Result<f64> {
    if !(f0_mhz > 0.0 && h_s_m > 0.0 && h_t_m > 0.0) {
        return invalid(format!(
            "p0_db arguments must be positive: f0={f0_mhz} h_s={h_s_m} h_t={h_t_m}"
        ));
    }
    let lf = f0_mhz.log10();
    Ok(46.3 + 33.9 * lf - 13.82 * h_s_m.log10() - (1.1 * lf - 0.7) * h_t_m + 1.56 * lf - 0.8)
}

/// COST-Hata path loss in dB (negative: a gain), distance in km.
pub fn cost_hata_pathloss_db(d_km: f64, params: &PathlossParams) -> Result<f64> {
    if !(d_km > 0.0) || !d_km.is_finite() {
        return invalid(format!("distance must be positive, got {d_km} km"));
    }
    let p0 = params.p0_db()?;
    let (d0, d1) = (params.d0_km, params.d1_km);
    let pl = if d_km > d1 {
        -p0 - 35.0 * d_km.log10()
    } else if d_km > d0 {
        -p0 - 15.0 * d1.log10() - 20.0 * d_km.log10()
    } else {
        -p0 - 15.0 * d1.log10() - 20.0 * d0.log10()
    };
    Ok(pl)
}

/// Free-space LOS gain `10^(l0/10) · d^(-alpha)`, distance in m (≥ 1).
pub fn los_pathloss_linear(d_m: f64, l0_db: f64, alpha: f64) -> Result<f64> {
    if !(d_m >= 1.0) || !d_m.is_finite() {
        return invalid(format!("LOS distance must be >= 1 m, got {d_m}"));
    }
    Ok(10f64.powf(l0_db / 10.0) * d_m.powf(-alpha))
}

pub fn large_scale_gain_linear(pathloss_db: f64, shadow_db: f64) -> f64 {
    10f64.powf((pathloss_db + shadow_db) / 10.0)
}

/// Thermal noise power `κ·B·T·NF`, watts.
pub fn noise_variance_watts(bw_hz: f64, t0_kelvin: f64, nf_db: f64) -> f64 {
    BOLTZMANN * bw_hz * t0_kelvin * 10f64.powf(nf_db / 10.0)
}

/// Drops `k` users: the first `⌈k/2⌉` uniformly over the cell-edge area,
/// the remaining `⌊k/2⌋` uniformly over the cell-centre area.
pub fn drop_users(scenario: &Scenario, k: usize, rng: &mut RngStream) -> Result<Vec<Point>> {
    if k == 0 {
        return invalid("need at least one user");
    }
    let n_far = k.div_ceil(2);
    (0..k)
        .map(|i| {
            let area = if i < n_far {
                scenario.edge_area
            } else {
                scenario.center_area
            };
            drop_one(scenario, &area, rng)
        })
        .collect()
}

fn drop_one(scenario: &Scenario, area: &Rect, rng: &mut RngStream) -> Result<Point> {
    for _ in 0..MAX_DROP_ATTEMPTS {
        let p = area.sample(rng);
        if p.distance(&scenario.bs_position) >= scenario.min_bs_distance
            && p.distance(&scenario.irs_position) >= 1.0
        {
            return Ok(p);
        }
    }
    Err(Error::Scenario(format!(
        "could not place a user in {area:?} after {MAX_DROP_ATTEMPTS} attempts"
    )))
}

/// Large-scale gains for users at `positions`, with independent log-normal
/// shadowing per BS→UE and IRS→UE link drawn from `rng`.
pub fn draw_large_scale_gains(
    scenario: &Scenario,
    params: &PathlossParams,
    positions: &[Point],
    rng: &mut RngStream,
) -> Result<LargeScaleGains> {
    params.validate()?;
    let bs = scenario.bs_position;
    let irs = scenario.irs_position;
    let mut sigma_f2 = Vec::with_capacity(positions.len());
    let mut sigma_g2 = Vec::with_capacity(positions.len());
    for p in positions {
        let pl_f = cost_hata_pathloss_db(p.distance(&bs) / 1000.0, params)?;
        let pl_g = cost_hata_pathloss_db(p.distance(&irs) / 1000.0, params)?;
        let s_f = params.shadow_sigma_db * rng.standard_normal();
        let s_g = params.shadow_sigma_db * rng.standard_normal();
        sigma_f2.push(large_scale_gain_linear(pl_f, s_f));
        sigma_g2.push(large_scale_gain_linear(pl_g, s_g));
    }
    let sigma_h2 = los_pathloss_linear(scenario.bs_irs_distance(), params.l0_db, params.alpha)?;
    LargeScaleGains::new(sigma_f2, sigma_g2, sigma_h2)
}
