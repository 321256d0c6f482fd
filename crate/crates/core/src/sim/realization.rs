//! Network realizations: BS and UE point sets, association, interferer
//! selection and mobility.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Distribution, Poisson};

use super::index::BsIndex;
use super::success::LinkBudget;
use super::{Placement, LabelMode, SimConfig, UserKind};
use crate::channel::{link_gain, link_probability, LinkKind, SystemParams};
use crate::error::{Error, Result};
use crate::math::{integrate_1d, QuadratureSpec};

/// One active interferer: a UE of another cell.
#[derive(Debug, Clone, PartialEq)]
pub struct Interferer {
    pub position: [f64; 2],
    pub cell: usize,
    pub label: LinkKind,
}

/// A sampled network at one time instant.
#[derive(Debug, Clone)]
pub struct NetworkRealization {
    pub window: f64,
    pub bs: Vec<[f64; 2]>,
    pub ues: Vec<[f64; 2]>,
    /// Position of the typical UE; it is not a member of `ues`.
    pub typical: [f64; 2],
    pub serving: usize,
    pub serving_label: LinkKind,
    pub interferers: Vec<Interferer>,
    /// Cells other than the serving one that hold no UE.
    pub empty_cells: usize,
    index: BsIndex,
}

impl NetworkRealization {
    pub fn serving_distance(&self) -> f64 {
        dist(self.typical, self.bs[self.serving])
    }

    /// Horizontal distances from the serving BS to every interferer.
    pub fn interferer_distances(&self) -> Vec<f64> {
        let b = self.bs[self.serving];
        self.interferers.iter().map(|i| dist(i.position, b)).collect()
    }

    pub fn nearest_bs(&self, q: [f64; 2]) -> usize {
        self.index.nearest(&self.bs, q).map(|(i, _)| i).unwrap_or(0)
    }
}

fn dist(a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

fn uniform_in_disc<R: Rng + ?Sized>(radius: f64, rng: &mut R) -> [f64; 2] {
    let r = radius * rng.gen::<f64>().sqrt();
    let phi = 2.0 * PI * rng.gen::<f64>();
    [r * phi.cos(), r * phi.sin()]
}

fn poisson_disc<R: Rng + ?Sized>(density: f64, radius: f64, rng: &mut R) -> Vec<[f64; 2]> {
    let mean = density * PI * radius * radius;
    let count = if mean > 0.0 { Poisson::new(mean).expect("positive mean").sample(rng) as usize } else { 0 };
    (0..count).map(|_| uniform_in_disc(radius, rng)).collect()
}

fn step<R: Rng + ?Sized>(from: [f64; 2], d: f64, rng: &mut R) -> [f64; 2] {
    let phi = 2.0 * PI * rng.gen::<f64>();
    [from[0] + d * phi.cos(), from[1] + d * phi.sin()]
}

/// Monte Carlo sampler for one parameter set and user kind.
#[derive(Debug, Clone)]
pub struct Simulator {
    params: SystemParams,
    kind: UserKind,
    config: SimConfig,
    window: f64,
    tail_power: f64,
}

impl Simulator {
    pub fn new(params: &SystemParams, kind: UserKind, config: SimConfig) -> Result<Self> {
        params.validate()?;
        let scale = params.lambda().powf(-0.5);
        let factor = config.window_factor.unwrap_or(match kind {
            UserKind::Ground => 10.0,
            UserKind::Aerial => 20.0,
        });
        if factor < 10.0 {
            return Err(Error::Config(format!("window factor {factor} is below 10")));
        }
        let window = factor * scale;
        let tail_power = if config.tail_compensation { tail_interference(params, kind, window)? } else { 0.0 };
        Ok(Simulator {
            params: params.clone(),
            kind,
            config,
            window,
            tail_power,
        })
    }

    pub fn params(&self) -> &SystemParams {
        &self.params
    }

    pub fn kind(&self) -> UserKind {
        self.kind
    }

    pub fn config(&self) -> &SimConfig {
        &self.config
    }

    pub fn window(&self) -> f64 {
        self.window
    }

    /// Mean interference from beyond the window, added to the noise.
    pub fn tail_power(&self) -> f64 {
        self.tail_power
    }

    fn label<R: Rng + ?Sized>(&self, r: f64, rng: &mut R) -> LinkKind {
        match self.kind {
            UserKind::Ground => LinkKind::Ground,
            UserKind::Aerial => {
                if rng.gen::<f64>() < link_probability(&self.params, LinkKind::Los, r) {
                    LinkKind::Los
                } else {
                    LinkKind::Nlos
                }
            }
        }
    }

    /// Samples a realization from the given random stream.
    pub fn realize<R: Rng + ?Sized>(&self, rng: &mut R) -> NetworkRealization {
        let p = &self.params;
        let scale = p.lambda().powf(-0.5);
        let mut bs = poisson_disc(p.lambda(), self.window, rng);
        if self.config.placement == Placement::Cell {
            bs.insert(0, [0.0, 0.0]);
        }
        if bs.is_empty() {
            bs.push(uniform_in_disc(self.window, rng));
        }
        let index = BsIndex::new(&bs, self.window, scale);
        let (typical, serving) = match self.config.placement {
            Placement::Origin => {
                let q = [0.0, 0.0];
                (q, index.nearest(&bs, q).map(|(i, _)| i).unwrap_or(0))
            }
            Placement::Cell => loop {
                let q = uniform_in_disc(3.0 * scale, rng);
                if index.nearest(&bs, q).map(|(i, _)| i) == Some(0) {
                    break (q, 0);
                }
            },
        };
        let serving_label = self.label(dist(typical, bs[serving]), rng);
        let ues = poisson_disc(p.lambda_ue(), self.window, rng);
        let mut r = NetworkRealization {
            window: self.window,
            bs,
            ues,
            typical,
            serving,
            serving_label,
            interferers: Vec::new(),
            empty_cells: 0,
            index,
        };
        self.select_interferers(&mut r, rng);
        r
    }

    /// Picks one UE uniformly from every non-serving cell.
    fn select_interferers<R: Rng + ?Sized>(&self, r: &mut NetworkRealization, rng: &mut R) {
        let n = r.bs.len();
        let mut counts = vec![0u32; n];
        let mut chosen = vec![usize::MAX; n];
        for (u, q) in r.ues.iter().enumerate() {
            let Some((c, _)) = r.index.nearest(&r.bs, *q) else { continue };
            if c == r.serving {
                continue;
            }
            counts[c] += 1;
            if rng.gen_range(0..counts[c]) == 0 {
                chosen[c] = u;
            }
        }
        let centre = r.bs[r.serving];
        let mut interferers = Vec::with_capacity(n);
        let mut empty = 0;
        for c in 0..n {
            if c == r.serving {
                continue;
            }
            if chosen[c] == usize::MAX {
                empty += 1;
                continue;
            }
            let position = r.ues[chosen[c]];
            let label = self.label(dist(position, centre), rng);
            interferers.push(Interferer { position, cell: c, label });
        }
        r.interferers = interferers;
        r.empty_cells = empty;
    }

    /// Moves the typical UE and the interferers by `d` in independent
    /// uniform directions. Returns the new realization and whether the
    /// serving BS changed. On handover the UE point process is redrawn and
    /// interferers are selected afresh around the new serving BS.
    pub fn displace<R: Rng + ?Sized>(&self, r: &NetworkRealization, d: f64, rng: &mut R) -> (NetworkRealization, bool) {
        let mut next = r.clone();
        if d == 0.0 {
            if self.config.labels == LabelMode::Redraw {
                let centre = next.bs[next.serving];
                next.serving_label = self.label(next.serving_distance(), rng);
                for i in next.interferers.iter_mut() {
                    i.label = self.label(dist(i.position, centre), rng);
                }
            }
            return (next, false);
        }
        next.typical = step(r.typical, d, rng);
        next.serving = next.nearest_bs(next.typical);
        let handover = next.serving != r.serving;
        let redraw = handover || self.config.labels == LabelMode::Redraw;
        if redraw {
            next.serving_label = self.label(next.serving_distance(), rng);
        }
        if handover {
            next.ues = poisson_disc(self.params.lambda_ue(), self.window, rng);
            self.select_interferers(&mut next, rng);
        } else {
            let centre = next.bs[next.serving];
            for i in next.interferers.iter_mut() {
                i.position = step(i.position, d, rng);
                if redraw {
                    i.label = self.label(dist(i.position, centre), rng);
                }
            }
        }
        (next, handover)
    }

    /// Mean received powers at the serving BS.
    pub fn link_budget(&self, r: &NetworkRealization) -> LinkBudget {
        let p = &self.params;
        let centre = r.bs[r.serving];
        let shape = |k: LinkKind| if k == LinkKind::Ground { 1 } else { p.shape(k) };
        LinkBudget {
            signal: p.tx_power * link_gain(p, r.serving_label, r.serving_distance()),
            signal_shape: shape(r.serving_label),
            interferers: r
                .interferers
                .iter()
                .map(|i| (p.tx_power * link_gain(p, i.label, dist(i.position, centre)), shape(i.label)))
                .collect(),
            noise: p.noise + self.tail_power,
        }
    }

    /// Success probability of the realization, averaged over fading.
    pub fn conditional_success(&self, r: &NetworkRealization) -> f64 {
        self.link_budget(r).success_probability(self.params.sinr_threshold)
    }
}

/// Mean interference at the window centre from interferers beyond radius `w`.
fn tail_interference(p: &SystemParams, kind: UserKind, w: f64) -> Result<f64> {
    let lambda = p.lambda();
    match kind {
        UserKind::Ground => {
            let a = p.ground_pathloss;
            Ok(2.0 * PI * lambda * p.tx_power * w.powf(2.0 - a) / (a - 2.0))
        }
        UserKind::Aerial => {
            let spec = QuadratureSpec::standard();
            let mut total = 0.0;
            let far = 1e4 * w;
            for kind in [LinkKind::Los, LinkKind::Nlos] {
                total += integrate_1d(
                    |lr| {
                        let r = lr.exp();
                        link_probability(p, kind, r) * link_gain(p, kind, r) * r * r
                    },
                    w.ln(),
                    far.ln(),
                    &spec,
                )?;
                let a = p.pathloss(kind);
                total += link_probability(p, kind, f64::INFINITY) * p.excess(kind) * far.powf(2.0 - a) / (a - 2.0);
            }
            Ok(2.0 * PI * lambda * p.tx_power * total)
        }
    }
}
