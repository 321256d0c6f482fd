//! System parameters, path loss and fading for ground and aerial uplinks.

use rand::Rng;
use rand_distr::{Distribution, Exp1, Gamma};

use crate::error::{Error, Result};

/// Propagation state of a link.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LinkKind {
    /// Terrestrial link, Rayleigh fading, path loss on horizontal distance.
    Ground,
    /// Aerial line-of-sight link.
    Los,
    /// Aerial non-line-of-sight link.
    Nlos,
}

impl LinkKind {
    pub fn is_aerial(self) -> bool {
        !matches!(self, LinkKind::Ground)
    }
}

/// Urban environment presets for the elevation-angle LoS model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Environment {
    Suburban,
    Urban,
    DenseUrban,
    Highrise,
    Custom { a: f64, b: f64 },
}

impl Environment {
    pub const PRESETS: [Environment; 4] = [
        Environment::Suburban,
        Environment::Urban,
        Environment::DenseUrban,
        Environment::Highrise,
    ];

    pub fn coefficients(self) -> (f64, f64) {
        match self {
            Environment::Suburban => (4.88, 0.43),
            Environment::Urban => (9.6, 0.16),
            Environment::DenseUrban => (12.0, 0.11),
            Environment::Highrise => (27.0, 0.08),
            Environment::Custom { a, b } => (a, b),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Environment::Suburban => "suburban",
            Environment::Urban => "urban",
            Environment::DenseUrban => "dense-urban",
            Environment::Highrise => "highrise",
            Environment::Custom { .. } => "custom",
        }
    }
}

/// Every scalar of the network model.
///
/// Densities are stored per km² as configured; all geometry works in metres,
/// so use [`SystemParams::lambda`] and friends inside formulas. Path-loss
/// excess factors are linear.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemParams {
    pub bs_density_km2: f64,
    pub ue_density_km2: f64,
    /// Ratio between the fitted serving-distance density and the BS density.
    pub fit_factor: f64,
    pub tx_power: f64,
    pub noise: f64,
    pub ground_pathloss: f64,
    pub los_pathloss: f64,
    pub nlos_pathloss: f64,
    pub los_shape: u32,
    pub nlos_shape: u32,
    pub los_excess: f64,
    pub nlos_excess: f64,
    /// Aerial UE altitude above the BSs, metres.
    pub altitude: f64,
    pub env_a: f64,
    pub env_b: f64,
    /// SINR threshold, linear.
    pub sinr_threshold: f64,
    /// Metres per unit time.
    pub velocity: f64,
    /// Status updates per unit time.
    pub arrival_rate: f64,
    /// Handover interruption, seconds.
    pub handover_delay: f64,
    /// Length of one unit of time, seconds.
    pub slot_duration: f64,
    /// Lattice step for the joint distribution.
    pub pdf_step: f64,
}

impl Default for SystemParams {
    fn default() -> Self {
        let (a, b) = Environment::Suburban.coefficients();
        SystemParams {
            bs_density_km2: 1.0,
            ue_density_km2: 10.0,
            fit_factor: 1.28,
            tx_power: 1.0,
            noise: 1e-12,
            ground_pathloss: 4.0,
            los_pathloss: 2.1,
            nlos_pathloss: 4.0,
            los_shape: 3,
            nlos_shape: 1,
            los_excess: 1.0,
            nlos_excess: 0.01,
            altitude: 100.0,
            env_a: a,
            env_b: b,
            sinr_threshold: 1.0,
            velocity: 0.0,
            arrival_rate: 1.0,
            handover_delay: 0.35,
            slot_duration: 1.0,
            pdf_step: 0.01,
        }
    }
}

impl SystemParams {
    pub fn with_environment(mut self, env: Environment) -> Self {
        let (a, b) = env.coefficients();
        self.env_a = a;
        self.env_b = b;
        self
    }

    pub fn with_threshold(mut self, theta: f64) -> Self {
        self.sinr_threshold = theta;
        self
    }

    pub fn with_threshold_db(self, theta_db: f64) -> Self {
        self.with_threshold(db_to_linear(theta_db))
    }

    pub fn with_velocity(mut self, v: f64) -> Self {
        self.velocity = v;
        self
    }

    /// BS density per m².
    pub fn lambda(&self) -> f64 {
        self.bs_density_km2 * 1e-6
    }

    /// Fitted serving-distance density per m².
    pub fn lambda_fit(&self) -> f64 {
        self.fit_factor * self.lambda()
    }

    pub fn fitted_density_km2(&self) -> f64 {
        self.fit_factor * self.bs_density_km2
    }

    /// UE density per m².
    pub fn lambda_ue(&self) -> f64 {
        self.ue_density_km2 * 1e-6
    }

    /// Mean inter-arrival time of status updates.
    pub fn transfer_time(&self) -> f64 {
        1.0 / self.arrival_rate
    }

    pub fn shape(&self, kind: LinkKind) -> u32 {
        match kind {
            LinkKind::Ground => 1,
            LinkKind::Los => self.los_shape,
            LinkKind::Nlos => self.nlos_shape,
        }
    }

    pub fn pathloss(&self, kind: LinkKind) -> f64 {
        match kind {
            LinkKind::Ground => self.ground_pathloss,
            LinkKind::Los => self.los_pathloss,
            LinkKind::Nlos => self.nlos_pathloss,
        }
    }

    pub fn excess(&self, kind: LinkKind) -> f64 {
        match kind {
            LinkKind::Ground => 1.0,
            LinkKind::Los => self.los_excess,
            LinkKind::Nlos => self.nlos_excess,
        }
    }

    /// Alzer constant `(m!)^(-1/m)` for the given link's fading shape.
    pub fn alzer_beta(&self, kind: LinkKind) -> f64 {
        alzer_beta(self.shape(kind))
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("bs_density", self.bs_density_km2),
            ("ue_density", self.ue_density_km2),
            ("fit_factor", self.fit_factor),
            ("tx_power", self.tx_power),
            ("los_pathloss", self.los_pathloss),
            ("los_excess", self.los_excess),
            ("nlos_excess", self.nlos_excess),
            ("sinr_threshold", self.sinr_threshold),
            ("arrival_rate", self.arrival_rate),
            ("slot_duration", self.slot_duration),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Config(format!("{name} must be positive, got {v}")));
            }
        }
        let non_negative = [
            ("noise", self.noise),
            ("altitude", self.altitude),
            ("env_a", self.env_a),
            ("env_b", self.env_b),
            ("velocity", self.velocity),
            ("handover_delay", self.handover_delay),
        ];
        for (name, v) in non_negative {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::Config(format!("{name} must be non-negative, got {v}")));
            }
        }
        if !(self.ground_pathloss > 2.0) || !(self.nlos_pathloss > 2.0) {
            return Err(Error::Config(
                "ground and NLoS path-loss exponents must exceed 2".into(),
            ));
        }
        if self.los_shape == 0 || self.nlos_shape == 0 {
            return Err(Error::Config("fading shapes must be at least 1".into()));
        }
        if !(self.pdf_step > 0.0 && self.pdf_step <= 0.1) {
            return Err(Error::Config(format!(
                "pdf_step must lie in (0, 0.1], got {}",
                self.pdf_step
            )));
        }
        let cells = 1.0 / self.pdf_step;
        if (cells - cells.round()).abs() > 1e-9 {
            return Err(Error::Config(format!(
                "pdf_step {} must divide 1 evenly",
                self.pdf_step
            )));
        }
        Ok(())
    }
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

/// `(m!)^(-1/m)`.
pub fn alzer_beta(m: u32) -> f64 {
    let ln_fact: f64 = (2..=m).map(|k| (k as f64).ln()).sum();
    (-ln_fact / m as f64).exp()
}

/// Serving and dominant-interferer distances plus their link states.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkGeometry {
    pub serving_distance: f64,
    pub dominant_distance: f64,
    pub serving_link: LinkKind,
    pub dominant_link: LinkKind,
}

impl LinkGeometry {
    pub fn new(
        serving_distance: f64,
        dominant_distance: f64,
        serving_link: LinkKind,
        dominant_link: LinkKind,
    ) -> Result<Self> {
        if !(serving_distance >= 0.0) || !(dominant_distance >= 0.0) {
            return Err(Error::domain("LinkGeometry", "distances must be non-negative"));
        }
        if serving_link.is_aerial() != dominant_link.is_aerial() {
            return Err(Error::domain(
                "LinkGeometry",
                "ground links cannot be mixed with LoS/NLoS links",
            ));
        }
        Ok(LinkGeometry {
            serving_distance,
            dominant_distance,
            serving_link,
            dominant_link,
        })
    }
}

/// Probability that an aerial link at horizontal distance `r` is LoS.
pub fn los_probability(p: &SystemParams, r: f64) -> f64 {
    let elevation_deg = p.altitude.atan2(r).to_degrees();
    1.0 / (1.0 + p.env_a * (-p.env_b * (elevation_deg - p.env_a)).exp())
}

/// Probability of the given aerial link state at horizontal distance `r`.
pub fn link_probability(p: &SystemParams, kind: LinkKind, r: f64) -> f64 {
    match kind {
        LinkKind::Ground => 1.0,
        LinkKind::Los => los_probability(p, r),
        LinkKind::Nlos => 1.0 - los_probability(p, r),
    }
}

/// Mean channel gain (excess loss times path loss) at horizontal distance `r`.
pub fn link_gain(p: &SystemParams, kind: LinkKind, r: f64) -> f64 {
    match kind {
        LinkKind::Ground => r.powf(-p.ground_pathloss),
        LinkKind::Los => p.los_excess * (r * r + p.altitude * p.altitude).powf(-0.5 * p.los_pathloss),
        LinkKind::Nlos => p.nlos_excess * (r * r + p.altitude * p.altitude).powf(-0.5 * p.nlos_pathloss),
    }
}

/// Average received power of the serving link, unit-mean fading factored out.
///
/// A ground link at zero distance returns `+∞`, which callers must reject.
pub fn mean_rx_power(p: &SystemParams, g: &LinkGeometry) -> f64 {
    p.tx_power * link_gain(p, g.serving_link, g.serving_distance)
}

/// One unit-mean fading power draw: exponential for ground links,
/// Gamma(m, 1/m) for aerial ones.
pub fn fading_sample<R: Rng + ?Sized>(kind: LinkKind, shape: u32, rng: &mut R) -> f64 {
    if kind == LinkKind::Ground || shape == 1 {
        return Exp1.sample(rng);
    }
    let m = shape as f64;
    // Parameters are validated positive, so construction cannot fail.
    Gamma::new(m, 1.0 / m).expect("positive gamma shape").sample(rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn table_defaults_validate() {
        SystemParams::default().validate().unwrap();
        let mut p = SystemParams::default();
        p.pdf_step = 0.3;
        assert!(p.validate().is_err());
        let mut p = SystemParams::default();
        p.ground_pathloss = 2.0;
        assert!(p.validate().is_err());
    }

    #[test]
    fn los_probability_reference() {
        let p = SystemParams::default();
        assert!((los_probability(&p, 100.0) - 0.999_999_8).abs() < 1e-6);
        let far = 1.0 / (1.0 + p.env_a * (p.env_a * p.env_b).exp());
        assert!((los_probability(&p, 1e12) - far).abs() < 1e-9);
    }

    #[test]
    fn power_examples() {
        let p = SystemParams::default();
        let g = LinkGeometry::new(10.0, 20.0, LinkKind::Ground, LinkKind::Ground).unwrap();
        assert!((mean_rx_power(&p, &g) - 1e-4).abs() < 1e-18);
        let mut q = p.clone();
        q.los_pathloss = 2.0;
        let g = LinkGeometry::new(0.0, 20.0, LinkKind::Los, LinkKind::Nlos).unwrap();
        assert!((mean_rx_power(&q, &g) - 1e-4).abs() < 1e-18);
        assert!(LinkGeometry::new(1.0, 1.0, LinkKind::Ground, LinkKind::Los).is_err());
        let g0 = LinkGeometry::new(0.0, 1.0, LinkKind::Ground, LinkKind::Ground).unwrap();
        assert!(mean_rx_power(&p, &g0).is_infinite());
    }

    #[test]
    fn nlos_excess_is_minus_20_db() {
        let mut p = SystemParams::default();
        p.nlos_pathloss = p.los_pathloss;
        let ratio = link_gain(&p, LinkKind::Nlos, 250.0) / link_gain(&p, LinkKind::Los, 250.0);
        assert!((ratio - 0.01).abs() < 1e-15);
        assert!((linear_to_db(p.nlos_excess) + 20.0).abs() < 1e-12);
    }

    #[test]
    fn alzer_constants() {
        assert_eq!(alzer_beta(1), 1.0);
        assert!((alzer_beta(3) - 6f64.powf(-1.0 / 3.0)).abs() < 1e-15);
        assert!((alzer_beta(3) - 0.550_32).abs() < 1e-5);
    }

    #[test]
    fn fading_moments() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let n = 1_000_000;
        let (mut s1, mut s2) = (0.0, 0.0);
        for _ in 0..n {
            let x = fading_sample(LinkKind::Los, 3, &mut rng);
            s1 += x;
            s2 += x * x;
        }
        let mean = s1 / n as f64;
        let var = s2 / n as f64 - mean * mean;
        assert!((mean - 1.0).abs() < 0.005);
        assert!((var - 1.0 / 3.0).abs() < 0.01);
        let mean_ground: f64 =
            (0..n).map(|_| fading_sample(LinkKind::Ground, 1, &mut rng)).sum::<f64>() / n as f64;
        assert!((mean_ground - 1.0).abs() < 0.005);
    }
}
