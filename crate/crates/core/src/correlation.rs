//! Joint success-probability lattices and the correlation coefficient.
//!
//! A lattice holds the joint survival function
//! `S(γ0, γ1) = P(P_s(t0) > γ0, P_s(t1) > γ1)` at the nodes `i·δ`, boundaries
//! included. Second differences of `S` give the probability mass of each
//! cell, and every later quantity (moments, covariance, age of information)
//! is a sum over those masses.

use crate::distances::handover_probability_at;
use crate::error::{Error, Result};
use crate::SystemParams;

/// Which mobility outcome a lattice describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Branch {
    NoHandover,
    Handover,
}

/// An analysis that can produce joint survival lattices.
pub trait JointModel: Sync {
    fn params(&self) -> &SystemParams;

    /// Row-major `(n+1)²` survival values at `γ0 = i/n`, `γ1 = j/n` for a
    /// displacement `d` of the user.
    fn survival_lattice(&self, d: f64, branch: Branch, n: usize) -> Result<Vec<f64>>;

    /// First and second moments of the conditional success probability
    /// from the model's own moment integrals.
    fn moments(&self) -> Result<(f64, f64)>;
}

/// Largest total of negative cell masses tolerated before a lattice is
/// rejected as numerically broken.
pub const MAX_CLIPPED_MASS: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq)]
pub struct JointGrid {
    pub step: f64,
    pub cells: usize,
    pub branch: Option<Branch>,
    survival: Vec<f64>,
    raw_masses: Vec<f64>,
    masses: Vec<f64>,
    /// Total magnitude of negative masses removed by clipping.
    pub clipped: f64,
}

/// Lattice moments: means, second moments and the cross moment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridMoments {
    pub total: f64,
    pub mean0: f64,
    pub mean1: f64,
    pub second0: f64,
    pub second1: f64,
    pub cross: f64,
}

impl GridMoments {
    /// Pearson correlation of the two coordinates.
    pub fn correlation(&self) -> Result<f64> {
        let var0 = self.second0 - self.mean0 * self.mean0;
        let var1 = self.second1 - self.mean1 * self.mean1;
        if var0 < 1e-10 || var1 < 1e-10 {
            return Err(Error::degenerate(
                "correlation",
                format!("variances {var0:.3e}, {var1:.3e}"),
            ));
        }
        checked_rho((self.cross - self.mean0 * self.mean1) / (var0 * var1).sqrt())
    }

    fn mix(a: &GridMoments, b: &GridMoments, wb: f64) -> GridMoments {
        let wa = 1.0 - wb;
        GridMoments {
            total: wa * a.total + wb * b.total,
            mean0: wa * a.mean0 + wb * b.mean0,
            mean1: wa * a.mean1 + wb * b.mean1,
            second0: wa * a.second0 + wb * b.second0,
            second1: wa * a.second1 + wb * b.second1,
            cross: wa * a.cross + wb * b.cross,
        }
    }
}

fn checked_rho(rho: f64) -> Result<f64> {
    if !rho.is_finite() || rho.abs() > 1.0 + 1e-6 {
        return Err(Error::degenerate("correlation", format!("coefficient {rho} outside [-1, 1]")));
    }
    Ok(rho.clamp(-1.0, 1.0))
}

impl JointGrid {
    /// Builds a grid from `(n+1)²` survival values.
    pub fn from_survival(cells: usize, survival: Vec<f64>, branch: Option<Branch>) -> Result<Self> {
        let n = cells;
        if n == 0 || survival.len() != (n + 1) * (n + 1) {
            return Err(Error::domain(
                "JointGrid",
                format!("expected {} survival values", (n + 1) * (n + 1)),
            ));
        }
        let at = |i: usize, j: usize| survival[i * (n + 1) + j];
        let mut raw = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                raw[i * n + j] = at(i, j) - at(i + 1, j) - at(i, j + 1) + at(i + 1, j + 1);
            }
        }
        let mut clipped = 0.0;
        let masses: Vec<f64> = raw
            .iter()
            .map(|m| {
                if *m < 0.0 {
                    clipped -= m;
                    0.0
                } else {
                    *m
                }
            })
            .collect();
        if clipped > MAX_CLIPPED_MASS {
            return Err(Error::degenerate(
                "joint lattice",
                format!("negative cell masses total {clipped:.3e}"),
            ));
        }
        let total: f64 = masses.iter().sum();
        if total > 1.0 + 1e-3 {
            return Err(Error::degenerate("joint lattice", format!("total mass {total}")));
        }
        Ok(JointGrid {
            step: 1.0 / n as f64,
            cells: n,
            branch,
            survival,
            raw_masses: raw,
            masses,
            clipped,
        })
    }

    pub fn survival(&self, i: usize, j: usize) -> f64 {
        self.survival[i * (self.cells + 1) + j]
    }

    /// Clipped mass of the cell `(iδ, (i+1)δ] × (jδ, (j+1)δ]`.
    pub fn mass(&self, i: usize, j: usize) -> f64 {
        self.masses[i * self.cells + j]
    }

    /// Second difference before clipping.
    pub fn raw_mass(&self, i: usize, j: usize) -> f64 {
        self.raw_masses[i * self.cells + j]
    }

    pub fn total_mass(&self) -> f64 {
        self.masses.iter().sum()
    }

    /// Survival at node `(i, j)` rebuilt by summing raw masses of all cells
    /// above it plus the boundary values.
    pub fn reconstruct(&self, i: usize, j: usize) -> f64 {
        let n = self.cells;
        let mut s = 0.0;
        for a in i..n {
            for b in j..n {
                s += self.raw_mass(a, b);
            }
        }
        // Boundary rows at γ = 1 carry any mass sitting exactly at one.
        s + self.survival(n, j) + self.survival(i, n) - self.survival(n, n)
    }

    pub fn midpoint(&self, i: usize) -> f64 {
        (i as f64 + 0.5) * self.step
    }

    pub fn moments(&self) -> GridMoments {
        let n = self.cells;
        let mut m = GridMoments {
            total: 0.0,
            mean0: 0.0,
            mean1: 0.0,
            second0: 0.0,
            second1: 0.0,
            cross: 0.0,
        };
        for i in 0..n {
            let x = self.midpoint(i);
            for j in 0..n {
                let y = self.midpoint(j);
                let w = self.mass(i, j);
                m.total += w;
                m.mean0 += w * x;
                m.mean1 += w * y;
                m.second0 += w * x * x;
                m.second1 += w * y * y;
                m.cross += w * x * y;
            }
        }
        m
    }
}

/// Evaluates a survival function on the lattice and builds the grid.
///
/// The evaluator receives `(γ0, γ1)` on `[0, 1]²`, boundaries included.
pub fn discretize_joint<F>(mut survival: F, step: f64, branch: Option<Branch>) -> Result<JointGrid>
where
    F: FnMut(f64, f64) -> Result<f64>,
{
    let cells = (1.0 / step).round() as usize;
    if cells == 0 || ((cells as f64) * step - 1.0).abs() > 1e-9 {
        return Err(Error::domain("discretize_joint", format!("step {step} must divide 1")));
    }
    let mut values = Vec::with_capacity((cells + 1) * (cells + 1));
    for i in 0..=cells {
        for j in 0..=cells {
            values.push(survival(i as f64 * step, j as f64 * step)?);
        }
    }
    JointGrid::from_survival(cells, values, branch)
}

/// Both branch lattices of a model at one displacement, with the handover
/// probability that mixes them.
#[derive(Debug, Clone)]
pub struct MobilityGrids {
    pub displacement: f64,
    pub handover_probability: f64,
    pub no_handover: JointGrid,
    pub handover: JointGrid,
}

impl MobilityGrids {
    /// Builds the lattices for velocity `v` over an interval `t`.
    pub fn build(model: &dyn JointModel, v: f64, t: f64) -> Result<Self> {
        let p = model.params();
        let cells = (1.0 / p.pdf_step).round() as usize;
        let d = v * t;
        let ph = handover_probability_at(p, d)?;
        let (nh, ho) = rayon::join(
            || model.survival_lattice(d, Branch::NoHandover, cells),
            || model.survival_lattice(d, Branch::Handover, cells),
        );
        Ok(MobilityGrids {
            displacement: d,
            handover_probability: ph,
            no_handover: JointGrid::from_survival(cells, nh?, Some(Branch::NoHandover))?,
            handover: JointGrid::from_survival(cells, ho?, Some(Branch::Handover))?,
        })
    }

    /// Joint survival of the mixture at lattice node `(i, j)`.
    pub fn survival(&self, i: usize, j: usize) -> f64 {
        let ph = self.handover_probability;
        (1.0 - ph) * self.no_handover.survival(i, j) + ph * self.handover.survival(i, j)
    }

    pub fn moments(&self) -> GridMoments {
        GridMoments::mix(&self.no_handover.moments(), &self.handover.moments(), self.handover_probability)
    }

    /// Correlation coefficient with every moment taken from the lattices.
    pub fn correlation(&self) -> Result<f64> {
        self.moments().correlation()
    }

    /// Correlation coefficient normalized by the model's own moments:
    /// `(E[γ0 γ1] - M1²) / (M2 - M1²)` with only the cross moment from the
    /// lattices.
    pub fn correlation_with_moments(&self, m1: f64, m2: f64) -> Result<f64> {
        let var = m2 - m1 * m1;
        if var < 1e-10 {
            return Err(Error::degenerate("correlation", format!("variance {var:.3e}")));
        }
        checked_rho((self.moments().cross - m1 * m1) / var)
    }
}

/// Correlation coefficient of `P_s(t0)` and `P_s(t1)` for velocity `v`.
pub fn correlation_coefficient(model: &dyn JointModel, v: f64, t: f64) -> Result<f64> {
    MobilityGrids::build(model, v, t)?.correlation()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn product_grid(n: usize) -> JointGrid {
        let g = |x: f64| 1.0 - x * x;
        discretize_joint(|a, b| Ok(g(a) * g(b)), 1.0 / n as f64, None).unwrap()
    }

    #[test]
    fn product_survival_factorizes() {
        let n = 20;
        let grid = product_grid(n);
        let g = |x: f64| 1.0 - x * x;
        for i in 0..n {
            for j in 0..n {
                let a = g(i as f64 / n as f64) - g((i + 1) as f64 / n as f64);
                let b = g(j as f64 / n as f64) - g((j + 1) as f64 / n as f64);
                assert!((grid.mass(i, j) - a * b).abs() < 1e-15);
            }
        }
        assert!((grid.total_mass() - 1.0).abs() < 1e-12);
        let rho = grid.moments().correlation().unwrap();
        assert!(rho.abs() < 1e-12);
    }

    #[test]
    fn constant_survival_has_no_mass() {
        let grid = discretize_joint(|_, _| Ok(0.3), 0.1, None).unwrap();
        assert!(grid.masses.iter().all(|m| *m == 0.0));
    }

    #[test]
    fn diagonal_lattice_is_fully_correlated() {
        let g = |x: f64| 1.0 - x.powf(0.7);
        let grid = discretize_joint(|a, b| Ok(g(a.max(b))), 0.01, None).unwrap();
        assert!((grid.moments().correlation().unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_large_negative_masses() {
        let r = discretize_joint(|a, b| Ok(1.0 - a * b), 0.1, None);
        assert!(r.is_err());
    }
}
