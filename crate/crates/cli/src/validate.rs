//! The acceptance suite: analysis against simulation and reference
//! computations, one report per criterion.
//!
//! Simulation samples, lattices and analysis contexts are cached, so
//! criteria that look at the same velocity sweep share one computation even
//! when they run on different threads.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::fmt;
use std::hash::Hash;
use std::io::Write;
use std::sync::{Arc, Mutex, OnceLock};

use velopaoi_core::correlation::MobilityGrids;
use velopaoi_core::distances::handover_probability_at;
use velopaoi_core::ground::residual_interference;
use velopaoi_core::math::{gauss_legendre, lambert_w0, upper_incomplete_gamma};
use velopaoi_core::paoi::{delay_fraction, handover_rate, paoi_cdf};
use velopaoi_core::sim::{estimate_handover_probability, estimate_handover_rate, EmpiricalPaoi, JointSample};
use velopaoi_core::{AerialSuccessContext, GroundSuccessContext, SystemParams, UserKind};

use crate::config::{Command, CorrelationForm, Scenario, DEFAULT_VELOCITIES};
use crate::error::Context;
use crate::runs::{run_meta, simulator, Analysis};
use crate::CliError;

pub const CRITERIA: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    /// The criterion could not be evaluated.
    Error,
}

impl Status {
    pub fn name(self) -> &'static str {
        match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Error => "ERROR",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CriterionReport {
    pub id: usize,
    pub name: &'static str,
    pub status: Status,
    pub measured: String,
    pub tolerance: String,
    pub detail: String,
}

impl CriterionReport {
    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

impl fmt::Display for CriterionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}] criterion {:>2} {}: {} (tolerance {})",
            self.status.name(),
            self.id,
            self.name,
            self.measured,
            self.tolerance
        )?;
        if !self.detail.is_empty() {
            write!(f, "; {}", self.detail)?;
        }
        Ok(())
    }
}

/// Writes the reports as CSV: `id,name,status,measured,tolerance,detail`.
pub fn write_table<W: Write>(reports: &[CriterionReport], out: W) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["id", "name", "status", "measured", "tolerance", "detail"])?;
    for r in reports {
        w.write_record([&r.id.to_string(), r.name, r.status.name(), &r.measured, &r.tolerance, &r.detail])?;
    }
    w.flush()?;
    Ok(())
}

/// Exit code of a finished suite: 3 if any criterion errored, else 1 if any
/// failed, else 0.
pub fn exit_code(reports: &[CriterionReport]) -> i32 {
    if reports.iter().any(|r| r.status == Status::Error) {
        3
    } else if reports.iter().any(|r| r.status == Status::Fail) {
        1
    } else {
        0
    }
}

/// Trial counts and sweep points of the suite.
#[derive(Debug, Clone, PartialEq)]
pub struct Budget {
    pub meta_trials: usize,
    pub ground_pair_trials: usize,
    pub aerial_pair_trials: usize,
    pub handover_trials: usize,
    pub handover_velocities: Vec<f64>,
    pub rate_velocities: Vec<f64>,
    pub rate_trials: usize,
    /// Path length of each handover-rate trial, metres.
    pub rate_path: f64,
    pub velocities: Vec<f64>,
    pub paoi_velocities: Vec<f64>,
    pub seed: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            meta_trials: 100_000,
            ground_pair_trials: 20_000,
            aerial_pair_trials: 10_000,
            handover_trials: 1_000_000,
            handover_velocities: vec![50.0, 100.0, 200.0, 400.0, 750.0],
            rate_velocities: vec![100.0, 750.0],
            rate_trials: 4000,
            rate_path: 20_000.0,
            velocities: DEFAULT_VELOCITIES.to_vec(),
            paoi_velocities: vec![100.0, 200.0, 400.0, 650.0],
            seed: 20_240_601,
        }
    }
}

impl Budget {
    /// Scales every Monte Carlo budget so that the meta runs use `trials`.
    pub fn with_meta_trials(mut self, trials: usize) -> Self {
        let f = trials as f64 / self.meta_trials as f64;
        let scale = |n: usize| ((n as f64 * f).round() as usize).max(100);
        self.meta_trials = trials.max(1);
        self.ground_pair_trials = scale(self.ground_pair_trials);
        self.aerial_pair_trials = scale(self.aerial_pair_trials);
        self.handover_trials = scale(self.handover_trials);
        self.rate_trials = scale(self.rate_trials);
        self
    }
}

type Slot<V> = Arc<OnceLock<Result<Arc<V>, CliError>>>;

struct Cache<K, V> {
    cells: Mutex<HashMap<K, Slot<V>>>,
}

impl<K: Eq + Hash, V> Cache<K, V> {
    fn new() -> Self {
        Cache { cells: Mutex::new(HashMap::new()) }
    }

    fn get(&self, key: K, make: impl FnOnce() -> Result<V, CliError>) -> Result<Arc<V>, CliError> {
        let slot = {
            let mut cells = self.cells.lock().unwrap_or_else(|e| e.into_inner());
            cells.entry(key).or_default().clone()
        };
        slot.get_or_init(|| make().map(Arc::new)).clone()
    }
}

fn kind_key(kind: UserKind) -> u8 {
    match kind {
        UserKind::Ground => 0,
        UserKind::Aerial => 1,
    }
}

pub struct Validator {
    budget: Budget,
    analyses: Cache<u8, Analysis>,
    pairs: Cache<(u8, u64), JointSample>,
    grids: Cache<(u8, u64), MobilityGrids>,
}

impl Default for Validator {
    fn default() -> Self {
        Validator::new(Budget::default())
    }
}

impl Validator {
    pub fn new(budget: Budget) -> Self {
        Validator { budget, analyses: Cache::new(), pairs: Cache::new(), grids: Cache::new() }
    }

    pub fn budget(&self) -> &Budget {
        &self.budget
    }

    /// Suburban scenario at 0 dB for the mobility criteria.
    fn scenario(&self, kind: UserKind) -> Scenario {
        let name = match kind {
            UserKind::Ground => "ground",
            UserKind::Aerial => "suburban",
        };
        let mut s = Scenario::preset(name, Command::Validate).expect("built-in preset");
        s.seed = self.budget.seed;
        s.trials = match kind {
            UserKind::Ground => self.budget.ground_pair_trials,
            UserKind::Aerial => self.budget.aerial_pair_trials,
        };
        s.interval = s.params.transfer_time();
        s
    }

    fn analysis(&self, kind: UserKind) -> Result<Arc<Analysis>, CliError> {
        self.analyses.get(kind_key(kind), || Analysis::new(&self.scenario(kind)))
    }

    fn pair_sample(&self, kind: UserKind, v: f64) -> Result<Arc<JointSample>, CliError> {
        self.pairs.get((kind_key(kind), v.to_bits()), || {
            let s = self.scenario(kind);
            let sim = simulator(&s)?;
            log::info!("simulating {} pairs at v = {v} ({} trials)", kind.name(), s.trials);
            Ok(JointSample { pairs: sim.pair_samples(v, s.interval, s.trials, s.seed), seed: s.seed })
        })
    }

    fn mobility_grids(&self, kind: UserKind, v: f64) -> Result<Arc<MobilityGrids>, CliError> {
        self.grids.get((kind_key(kind), v.to_bits()), || {
            let s = self.scenario(kind);
            log::info!("building {} lattices at v = {v}", kind.name());
            self.analysis(kind)?.grids(v, s.interval)
        })
    }

    /// Evaluates criterion `id` (1 to 12).
    pub fn criterion(&self, id: usize) -> CriterionReport {
        let (name, result) = match id {
            1 => ("aerial meta distribution", self.aerial_meta()),
            2 => ("ground meta distribution", self.ground_meta()),
            3 => ("threshold-distance inversion", self.threshold_inversion()),
            4 => ("residual interference closed form", self.residual_closed_form()),
            5 => ("handover probability", self.handover_probability()),
            6 => ("handover rate", self.handover_rate()),
            7 => ("correlation endpoints", self.correlation_endpoints()),
            8 => ("aerial below ground correlation", self.correlation_ordering()),
            9 => ("joint decorrelation", self.joint_decorrelation()),
            10 => ("peak age percentile", self.paoi()),
            11 => ("special functions", self.special_functions()),
            12 => ("degenerate aerial channel", self.degeneracy()),
            _ => ("unknown", Err(CliError::Config(format!("no criterion {id}")))),
        };
        let report = match result {
            Ok(o) => CriterionReport {
                id,
                name,
                status: if o.passed { Status::Pass } else { Status::Fail },
                measured: o.measured,
                tolerance: o.tolerance,
                detail: o.detail,
            },
            Err(e) => CriterionReport {
                id,
                name,
                status: Status::Error,
                measured: String::new(),
                tolerance: String::new(),
                detail: e.to_string(),
            },
        };
        log::info!("{report}");
        report
    }

    pub fn run_all(&self) -> Vec<CriterionReport> {
        (1..=CRITERIA).map(|id| self.criterion(id)).collect()
    }

    fn aerial_meta(&self) -> Result<Outcome, CliError> {
        let mut o = Outcome::new("max |analysis - simulation| over gamma in [0.05, 0.95]");
        let mut tolerances = Vec::new();
        for name in ["suburban", "urban", "dense-urban", "highrise"] {
            let mut s = Scenario::preset(name, Command::Meta)?;
            s.trials = self.budget.meta_trials;
            s.seed = self.budget.seed;
            log::info!("meta distribution for {name} ({} trials)", s.trials);
            let pair = run_meta(&s)?;
            o.check(pair.passed(), format!("{name}={:.4}", pair.deviation));
            tolerances.push(format!("{name}<={}", pair.tolerance));
        }
        o.tolerance = tolerances.join(" ");
        Ok(o.finish())
    }

    fn ground_meta(&self) -> Result<Outcome, CliError> {
        let mut o = Outcome::new("max |analysis - simulation| over gamma in [0.05, 0.95]");
        let mut s = Scenario::preset("ground", Command::Meta)?;
        s.trials = self.budget.meta_trials;
        s.seed = self.budget.seed;
        let pair = run_meta(&s)?;
        o.check(pair.passed(), format!("ground={:.4}", pair.deviation));
        o.tolerance = format!("{}", pair.tolerance);
        Ok(o.finish())
    }

    fn threshold_inversion(&self) -> Result<Outcome, CliError> {
        const TOL: f64 = 1e-9;
        let ctx = GroundSuccessContext::new(&SystemParams::default()).context("ground analysis")?;
        let mut worst: f64 = 0.0;
        for r1 in [150.0, 600.0, 2500.0] {
            for k in 1..=9 {
                let gamma = k as f64 / 10.0;
                let r0 = ctx.k_threshold(r1, gamma);
                worst = worst.max((ctx.cond_success(r0, r1) - gamma).abs());
            }
        }
        let mut o = Outcome::new("");
        o.check(worst <= TOL, format!("max |P_s(K(r1, gamma), r1) - gamma| = {worst:.3e} on a 9x3 grid"));
        o.tolerance = format!("{TOL:e}");
        Ok(o.finish())
    }

    fn residual_closed_form(&self) -> Result<Outcome, CliError> {
        const TOL: f64 = 1e-8;
        let p = SystemParams::default();
        let mut worst: f64 = 0.0;
        for k in 0..10 {
            let r1 = 30.0 * 10f64.powf(k as f64 * 0.25);
            let closed = residual_interference(&p, r1);
            let quad = residual_by_quadrature(&p, r1);
            worst = worst.max(((closed - quad) / quad).abs());
        }
        let mut o = Outcome::new("");
        o.check(worst <= TOL, format!("max relative error {worst:.3e} at 10 radii in [30, 5335] m"));
        o.tolerance = format!("{TOL:e}");
        Ok(o.finish())
    }

    fn handover_probability(&self) -> Result<Outcome, CliError> {
        const TOL: f64 = 0.01;
        let p = SystemParams::default();
        let mut o = Outcome::new("|analysis - simulation| per velocity");
        for &v in &self.budget.handover_velocities {
            let a = handover_probability_at(&p, v).context("handover probability")?;
            let est = estimate_handover_probability(&p, v, self.budget.handover_trials, self.budget.seed);
            let dev = (a - est.estimate).abs();
            o.check(dev <= TOL, format!("v={v}: {a:.4} vs {:.4} (dev {dev:.4})", est.estimate));
        }
        o.tolerance = format!("{TOL}");
        Ok(o.finish())
    }

    fn handover_rate(&self) -> Result<Outcome, CliError> {
        const TOL: f64 = 0.02;
        let p = SystemParams::default();
        let mut o = Outcome::new("relative error of the empirical rate");
        for &v in &self.budget.rate_velocities {
            let expect = handover_rate(&p, v);
            let est = estimate_handover_rate(&p, v, self.budget.rate_path / v, self.budget.rate_trials, self.budget.seed);
            let rel = ((est.estimate - expect) / expect).abs();
            o.check(rel <= TOL, format!("v={v}: {:.5} vs {expect:.5} (rel {rel:.4})", est.estimate));
        }
        o.tolerance = format!("{TOL} relative");
        Ok(o.finish())
    }

    /// Analytical and simulated correlation over the velocity grid.
    fn rho_curves(&self, kind: UserKind) -> Result<(Vec<f64>, Vec<f64>), CliError> {
        let analysis = self.analysis(kind)?;
        let mut a = Vec::new();
        let mut s = Vec::new();
        for &v in &self.budget.velocities {
            a.push(analysis.correlation(&*self.mobility_grids(kind, v)?, CorrelationForm::Lattice)?);
            s.push(self.pair_sample(kind, v)?.correlation());
        }
        Ok((a, s))
    }

    fn correlation_endpoints(&self) -> Result<Outcome, CliError> {
        const AT_REST: f64 = 0.02;
        const AT_SPEED: f64 = 0.15;
        const GAP: f64 = 0.05;
        let (a, s) = self.rho_curves(UserKind::Ground)?;
        let vs = &self.budget.velocities;
        let mut o = Outcome::new("ground users");
        if vs.first() == Some(&0.0) {
            o.check((a[0] - 1.0).abs() <= AT_REST, format!("rho_a(0)={:.4}", a[0]));
            o.check((s[0] - 1.0).abs() <= AT_REST, format!("rho_s(0)={:.4}", s[0]));
        } else {
            o.check(false, "velocity grid lacks v=0".into());
        }
        let last = a.len() - 1;
        o.check(a[last] <= AT_SPEED, format!("rho_a({})={:.4}", vs[last], a[last]));
        o.check(s[last] <= AT_SPEED, format!("rho_s({})={:.4}", vs[last], s[last]));
        let (gap, at) = a
            .iter()
            .zip(&s)
            .zip(vs)
            .map(|((x, y), v)| ((x - y).abs(), *v))
            .fold((0.0, 0.0), |m, g| if g.0 > m.0 { g } else { m });
        o.check(gap <= GAP, format!("max|rho_a - rho_s|={gap:.4} at v={at}"));
        o.check(non_increasing(&a), format!("rho_a monotone={}", non_increasing(&a)));
        o.check(non_increasing(&s), format!("rho_s monotone={}", non_increasing(&s)));
        o.tolerance = format!("rho(0) within {AT_REST} of 1; rho(vmax)<={AT_SPEED}; gap<={GAP}; non-increasing");
        o.detail = format!("v={vs:?} rho_a={} rho_s={}", fmt_list(&a), fmt_list(&s));
        Ok(o.finish())
    }

    fn correlation_ordering(&self) -> Result<Outcome, CliError> {
        let (ga, gs) = self.rho_curves(UserKind::Ground)?;
        let (aa, as_) = self.rho_curves(UserKind::Aerial)?;
        let mut o = Outcome::new("aerial rho < ground rho for v > 0");
        for (k, &v) in self.budget.velocities.iter().enumerate() {
            if v == 0.0 {
                continue;
            }
            o.check(aa[k] < ga[k], format!("analysis v={v}: {:.4}<{:.4}", aa[k], ga[k]));
            o.check(as_[k] < gs[k], format!("simulation v={v}: {:.4}<{:.4}", as_[k], gs[k]));
        }
        o.tolerance = "strict inequality".into();
        Ok(o.finish())
    }

    fn joint_decorrelation(&self) -> Result<Outcome, CliError> {
        const ANALYSIS_TOL: f64 = 0.02;
        const CI_MULTIPLE: f64 = 3.0;
        const FRECHET_SLACK: f64 = 1e-9;
        let vmax = *self.budget.velocities.last().expect("non-empty velocity grid");
        let mut o = Outcome::new("gamma0 = gamma1 = 0.5 at the largest velocity");
        for kind in [UserKind::Ground, UserKind::Aerial] {
            let grids = self.mobility_grids(kind, vmax)?;
            let n = grids.no_handover.cells;
            let h = n / 2;
            let joint = grids.survival(h, h);
            let product = grids.survival(h, 0) * grids.survival(0, h);
            let dev = (joint - product).abs();
            o.check(dev <= ANALYSIS_TOL, format!("{} analysis |joint - product|={dev:.4}", kind.name()));

            let sample = self.pair_sample(kind, vmax)?;
            let j = sample.joint_ccdf(0.5, 0.5, None);
            let prod = sample.marginal(0.5, 0).estimate * sample.marginal(0.5, 1).estimate;
            let sdev = (j.estimate - prod).abs();
            o.check(
                sdev <= CI_MULTIPLE * j.half_width,
                format!("{} simulation |joint - product|={sdev:.4} (3CI={:.4})", kind.name(), CI_MULTIPLE * j.half_width),
            );

            let mut worst: f64 = 0.0;
            for &v in &self.budget.velocities {
                let g = self.mobility_grids(kind, v)?;
                for i in 0..=n {
                    for k in 0..=n {
                        let s = g.survival(i, k);
                        let (m0, m1) = (g.survival(i, 0), g.survival(0, k));
                        worst = worst.max((m0 + m1 - 1.0) - s).max(s - m0.min(m1));
                    }
                }
            }
            o.check(worst <= FRECHET_SLACK, format!("{} Frechet violation {:.1e}", kind.name(), worst.max(0.0)));
        }
        o.tolerance = format!("analysis {ANALYSIS_TOL}; simulation {CI_MULTIPLE}xCI; Frechet {FRECHET_SLACK:e}");
        Ok(o.finish())
    }

    fn paoi(&self) -> Result<Outcome, CliError> {
        const TOL: f64 = 0.05;
        const Q: f64 = 0.6;
        let mut o = Outcome::new("60th percentile, relative error");
        for kind in [UserKind::Ground, UserKind::Aerial] {
            let p = self.scenario(kind).params;
            let t = p.transfer_time();
            let floor = 2.0 + t;
            let mut analysis = Vec::new();
            let mut empirical = Vec::new();
            let mut floor_ok = true;
            for &v in &self.budget.paoi_velocities {
                let delay = delay_fraction(&p, v);
                let grids = self.mobility_grids(kind, v)?;
                let probe = [0.0, 0.5 * floor, floor * (1.0 - 1e-12), floor];
                let result = paoi_cdf(&grids, t, delay, None, &[Q]).context("peak-age distribution")?;
                let at_floor = paoi_cdf(&grids, t, delay, Some(&probe), &[]).context("peak-age distribution")?;
                floor_ok &= at_floor.cdf.iter().all(|f| *f == 0.0);
                floor_ok &= result.times.iter().zip(&result.cdf).all(|(x, f)| *x > floor || *f == 0.0);
                let a = result.percentile(Q).context("peak-age percentile")?;

                let sample = self.pair_sample(kind, v)?;
                let e = EmpiricalPaoi::from_pairs(&sample.pairs, t, delay, sample.seed);
                floor_ok &= e.cdf_at(floor) == 0.0;
                let ep = e.percentile(Q);
                let rel = ((a - ep) / ep).abs();
                o.check(rel <= TOL, format!("{} v={v}: {a:.3} vs {ep:.3} (rel {rel:.4})", kind.name()));
                analysis.push(a);
                empirical.push(ep);
            }
            o.check(non_decreasing(&analysis), format!("{} analysis non-decreasing={}", kind.name(), non_decreasing(&analysis)));
            o.check(non_decreasing(&empirical), format!("{} simulation non-decreasing={}", kind.name(), non_decreasing(&empirical)));
            o.check(floor_ok, format!("{} F(t)=0 for t<=2+1/lambda_a: {floor_ok}", kind.name()));
        }
        o.tolerance = format!("{TOL} relative; non-decreasing; exact floor");
        Ok(o.finish())
    }

    fn special_functions(&self) -> Result<Outcome, CliError> {
        const LAMBERT_TOL: f64 = 1e-12;
        const GAMMA_TOL: f64 = 1e-9;
        let mut lambert: f64 = 0.0;
        let branch = -(-1f64).exp();
        for k in 0..1000 {
            let x = if k < 200 {
                branch * (1.0 - (k as f64 + 0.5) / 200.0)
            } else {
                10f64.powf(-8.0 + 16.0 * (k - 200) as f64 / 799.0)
            };
            let w = lambert_w0(x).context("lambert_w0")?;
            lambert = lambert.max(((w * w.exp() - x) / x).abs());
        }
        let mut recurrence: f64 = 0.0;
        for a in [-2.5, -1.5, -1.0, -0.5, 0.25, 0.5, 1.0, 1.75, 3.0, 4.5] {
            for z in [0.01, 0.1, 0.7, 1.0, 2.5, 6.0, 15.0, 30.0] {
                let lhs = upper_incomplete_gamma(a + 1.0, z).context("upper_incomplete_gamma")?;
                let rhs = a * upper_incomplete_gamma(a, z).context("upper_incomplete_gamma")? + z.powf(a) * (-z).exp();
                recurrence = recurrence.max(((lhs - rhs) / lhs).abs());
            }
        }
        let mut o = Outcome::new("");
        o.check(lambert <= LAMBERT_TOL, format!("Lambert W round trip {lambert:.2e} on 1000 points"));
        o.check(recurrence <= GAMMA_TOL, format!("incomplete gamma recurrence {recurrence:.2e}"));
        o.tolerance = format!("{LAMBERT_TOL:e} / {GAMMA_TOL:e} relative");
        Ok(o.finish())
    }

    fn degeneracy(&self) -> Result<Outcome, CliError> {
        const TOL: f64 = 0.01;
        let mut p = SystemParams::default();
        p.los_shape = 1;
        p.nlos_shape = 1;
        p.nlos_excess = p.los_excess;
        p.los_pathloss = p.ground_pathloss;
        p.nlos_pathloss = p.ground_pathloss;
        p.altitude = 1e-3;
        let aerial = AerialSuccessContext::new(&p).context("aerial analysis")?;
        let ground = GroundSuccessContext::new(&p).context("ground analysis")?;
        let mut worst: f64 = 0.0;
        for k in 0..=16 {
            let gamma = 0.1 + 0.05 * k as f64;
            let a = aerial.meta_distribution(gamma).context("aerial meta distribution")?;
            let g = ground.meta_distribution(gamma).context("ground meta distribution")?;
            worst = worst.max((a - g).abs());
        }
        let mut o = Outcome::new("m=1, equal excess loss and exponents, h=1e-3 m");
        o.check(worst <= TOL, format!("max |aerial - ground| = {worst:.4} on gamma in [0.1, 0.9]"));
        o.tolerance = format!("{TOL}");
        Ok(o.finish())
    }
}

/// `∫_{r1}^∞ p_t r^{-α} 2πλ (1 - e^{-πλr²}) r dr` by composite Gauss-Legendre
/// in `ln r` over 40 e-folds.
fn residual_by_quadrature(p: &SystemParams, r1: f64) -> f64 {
    let (x, w) = gauss_legendre(20);
    let lambda = p.lambda();
    let alpha = p.ground_pathloss;
    let span = 40.0;
    let panels = 800;
    let h = span / panels as f64;
    let mut total = 0.0;
    for k in 0..panels {
        let mid = r1.ln() + (k as f64 + 0.5) * h;
        for (xi, wi) in x.iter().zip(&w) {
            let r = (mid + 0.5 * h * xi).exp();
            let thin = -(-lambda * PI * r * r).exp_m1();
            total += 0.5 * h * wi * p.tx_power * r.powf(2.0 - alpha) * 2.0 * PI * lambda * thin;
        }
    }
    total
}

fn non_increasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] <= w[0])
}

fn non_decreasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] >= w[0])
}

fn fmt_list(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|x| format!("{x:.4}")).collect();
    format!("[{}]", parts.join(", "))
}

/// Accumulates sub-checks of one criterion.
struct Outcome {
    passed: bool,
    parts: Vec<String>,
    measured: String,
    tolerance: String,
    detail: String,
}

impl Outcome {
    fn new(what: &str) -> Self {
        Outcome {
            passed: true,
            parts: Vec::new(),
            measured: what.to_string(),
            tolerance: String::new(),
            detail: String::new(),
        }
    }

    fn check(&mut self, ok: bool, text: String) {
        self.passed &= ok;
        self.parts.push(if ok { text } else { format!("{text} [violated]") });
    }

    fn finish(mut self) -> Self {
        let body = self.parts.join("; ");
        self.measured = if self.measured.is_empty() { body } else { format!("{}: {body}", self.measured) };
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_code_prefers_errors() {
        let r = |status| CriterionReport {
            id: 1,
            name: "x",
            status,
            measured: String::new(),
            tolerance: String::new(),
            detail: String::new(),
        };
        assert_eq!(exit_code(&[r(Status::Pass)]), 0);
        assert_eq!(exit_code(&[r(Status::Pass), r(Status::Fail)]), 1);
        assert_eq!(exit_code(&[r(Status::Fail), r(Status::Error)]), 3);
    }

    #[test]
    fn quadrature_reference_is_converged() {
        let p = SystemParams::default();
        let a = residual_by_quadrature(&p, 400.0);
        let b = residual_interference(&p, 400.0);
        assert!(((a - b) / b).abs() < 1e-8);
    }

    #[test]
    fn unknown_criterion_is_an_error() {
        assert_eq!(Validator::default().criterion(13).status, Status::Error);
    }

    #[test]
    fn table_has_one_row_per_report() {
        let v = Validator::default();
        let reports = vec![v.criterion(3), v.criterion(11)];
        let mut buf = Vec::new();
        write_table(&reports, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 3);
        assert!(text.starts_with("id,name,status"));
    }
}
