//! Curve series and their CSV encoding.
//!
//! Each file starts with `# key: value` comment lines carrying everything
//! needed to rerun the curve, followed by a header row and the points.
//! Numbers use the shortest round-trip representation, so a fixed scenario
//! and seed always produce identical bytes.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::config::Scenario;
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    pub x: f64,
    pub y: f64,
    /// 95% confidence half-width of simulated points.
    pub ci: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurveSeries {
    pub x_label: String,
    pub x_units: String,
    pub y_label: String,
    pub points: Vec<CurvePoint>,
    pub metadata: BTreeMap<String, String>,
}

impl CurveSeries {
    pub fn new(x_label: &str, x_units: &str, y_label: &str, scenario: &Scenario) -> Self {
        let mut metadata = BTreeMap::new();
        metadata.insert("command".into(), scenario.command.name().into());
        metadata.insert("scenario_name".into(), scenario.name.clone());
        metadata.insert("scenario_hash".into(), scenario.scenario_hash());
        metadata.insert("fingerprint".into(), scenario.fingerprint());
        metadata.insert("seed".into(), scenario.seed.to_string());
        metadata.insert("trials".into(), scenario.trials.to_string());
        metadata.insert("tolerance".into(), scenario.tolerance.to_string());
        metadata.insert("threshold_db".into(), scenario.theta_db.to_string());
        metadata.insert("version".into(), env!("CARGO_PKG_VERSION").into());
        metadata.insert("scenario".into(), scenario.canonical());
        CurveSeries {
            x_label: x_label.into(),
            x_units: x_units.into(),
            y_label: y_label.into(),
            points: Vec::new(),
            metadata,
        }
    }

    pub fn push(&mut self, x: f64, y: f64, ci: Option<f64>) {
        self.points.push(CurvePoint { x, y, ci });
    }

    pub fn is_sorted(&self) -> bool {
        self.points.windows(2).all(|w| w[0].x <= w[1].x)
    }

    pub fn ys(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.y).collect()
    }

    /// Column names: `x` plus `y_analysis`, or `y_sim` and `sim_ci_halfwidth`.
    fn columns(&self) -> Vec<&'static str> {
        if self.points.iter().any(|p| p.ci.is_some()) {
            vec!["x", "y_sim", "sim_ci_halfwidth"]
        } else {
            vec!["x", "y_analysis"]
        }
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<(), CliError> {
        if !self.is_sorted() {
            return Err(CliError::Io("curve points are not sorted by x".into()));
        }
        writeln!(out, "# x: {} [{}]", self.x_label, self.x_units)?;
        writeln!(out, "# y: {}", self.y_label)?;
        for (k, v) in &self.metadata {
            writeln!(out, "# {k}: {v}")?;
        }
        let columns = self.columns();
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&columns)?;
        for p in &self.points {
            let mut row = vec![p.x.to_string(), p.y.to_string()];
            if columns.len() == 3 {
                row.push(p.ci.map(|c| c.to_string()).unwrap_or_default());
            }
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn write_file(&self, path: &Path) -> Result<(), CliError> {
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            std::fs::create_dir_all(dir)?;
        }
        let file = std::fs::File::create(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        self.write_csv(std::io::BufWriter::new(file))
    }
}

/// Analytical and simulated curves of one run with their agreement.
#[derive(Debug, Clone)]
pub struct CurvePair {
    pub analysis: CurveSeries,
    pub simulation: CurveSeries,
    /// Largest deviation over the checked range, in the run's own measure.
    pub deviation: f64,
    pub tolerance: f64,
}

impl CurvePair {
    pub fn passed(&self) -> bool {
        self.deviation <= self.tolerance
    }

    /// Writes `<stem>_analysis.csv` and `<stem>_simulation.csv`.
    pub fn write(&self, stem: &Path) -> Result<[PathBuf; 2], CliError> {
        let with = |suffix: &str| {
            let mut name = stem.file_name().map(|n| n.to_os_string()).unwrap_or_default();
            name.push(suffix);
            stem.with_file_name(name)
        };
        let a = with("_analysis.csv");
        let s = with("_simulation.csv");
        self.analysis.write_file(&a)?;
        self.simulation.write_file(&s)?;
        Ok([a, s])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Command;

    #[test]
    fn csv_layout() {
        let s = Scenario::preset("ground", Command::Meta).unwrap();
        let mut c = CurveSeries::new("gamma", "1", "P(P_s > gamma)", &s);
        c.push(0.1, 0.9, Some(0.01));
        c.push(0.2, 0.8, Some(0.02));
        let mut buf = Vec::new();
        c.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let rows: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
        assert_eq!(rows, ["x,y_sim,sim_ci_halfwidth", "0.1,0.9,0.01", "0.2,0.8,0.02"]);
        assert!(text.contains(&format!("# fingerprint: {}", s.fingerprint())));
    }

    #[test]
    fn unsorted_points_are_rejected() {
        let s = Scenario::preset("ground", Command::Meta).unwrap();
        let mut c = CurveSeries::new("v", "m/unit time", "rho", &s);
        c.push(2.0, 0.0, None);
        c.push(1.0, 0.0, None);
        assert!(c.write_csv(Vec::new()).is_err());
    }
}
