use std::fs;
use std::path::{Path, PathBuf};

use projlog::format::{measure_to_json, parse_measure, parse_points};
use projlog::sampling::{sample_fs_uniform, subseed};
use projlog::{AtomicMeasure, HomogeneousPoint};

use crate::cli::Common;
use crate::CliError;

/// Resolved run configuration; every field that shapes the output is recorded
/// in the artifact header.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub seed: u64,
    pub samples: Option<usize>,
    pub grid: Option<usize>,
    pub h: Option<f64>,
    pub eps: Vec<f64>,
    pub chart: Option<usize>,
    pub n: usize,
    explicit_n: Option<usize>,
    pub measure_path: Option<PathBuf>,
    pub points_path: Option<PathBuf>,
    pub output: Option<PathBuf>,
    pub workers: Option<usize>,
    /// Set once a measure is loaded, for the header.
    pub measure_json: Option<String>,
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

impl RunConfig {
    pub fn from_args(c: &Common) -> Result<Self, CliError> {
        let invalid = |m: String| Err(CliError::Input(m));
        if c.samples == Some(0) {
            return invalid("--samples must be positive".into());
        }
        if c.grid == Some(0) {
            return invalid("--grid must be positive".into());
        }
        if c.workers == Some(0) {
            return invalid("--workers must be positive".into());
        }
        if let Some(h) = c.h {
            if !(h > 0.0 && h.is_finite()) {
                return invalid(format!("--h must be positive, got {h}"));
            }
        }
        if let Some(e) = c.eps.iter().find(|e| !(**e > 0.0 && e.is_finite())) {
            return invalid(format!("--eps values must be positive, got {e}"));
        }
        if c.eps.windows(2).any(|w| w[1] >= w[0]) {
            return invalid("--eps must be strictly decreasing".into());
        }
        if c.n == Some(0) {
            return invalid("--n must be positive".into());
        }
        let mut n = c.n.unwrap_or(1);
        if let (None, None, Some(p)) = (c.n, &c.measure, &c.points) {
            n = parse_points(&read(p)?).map_err(|e| CliError::Input(format!("{}: {e}", p.display())))?.0;
        }
        Ok(RunConfig {
            seed: c.seed,
            samples: c.samples,
            grid: c.grid,
            h: c.h,
            eps: c.eps.clone(),
            chart: c.chart,
            n,
            explicit_n: c.n,
            measure_path: c.measure.clone(),
            points_path: c.points.clone(),
            output: c.output.clone(),
            workers: c.workers,
            measure_json: None,
        })
    }

    /// The measure file, or a Dirac mass at `[1:0:...:0]`. Fixes `self.n`.
    pub fn load_measure(&mut self) -> Result<AtomicMeasure, CliError> {
        let mu = match &self.measure_path {
            Some(p) => parse_measure(&read(p)?).map_err(|e| CliError::Input(format!("{}: {e}", p.display())))?,
            None => AtomicMeasure::dirac(HomogeneousPoint::basis(self.n, 0)),
        };
        if let Some(n) = self.explicit_n {
            if n != mu.dim() {
                return Err(CliError::Input(format!("--n {n} disagrees with measure dimension {}", mu.dim())));
            }
        }
        self.n = mu.dim();
        self.measure_json = Some(measure_line(&mu));
        self.check_chart()?;
        Ok(mu)
    }

    pub fn check_chart(&self) -> Result<(), CliError> {
        match self.chart {
            Some(k) if k > self.n => Err(CliError::Input(format!("--chart {k} exceeds n = {}", self.n))),
            _ => Ok(()),
        }
    }

    /// The point-set file, or `count` FS-uniform points.
    pub fn load_points(&self, default_count: usize) -> Result<Vec<HomogeneousPoint>, CliError> {
        match &self.points_path {
            Some(p) => {
                let (n, pts) = parse_points(&read(p)?).map_err(|e| CliError::Input(format!("{}: {e}", p.display())))?;
                if n != self.n {
                    return Err(CliError::Input(format!("{}: point dimension {n}, expected {}", p.display(), self.n)));
                }
                Ok(pts)
            }
            None => Ok(sample_fs_uniform(subseed(self.seed, 2), self.samples.unwrap_or(default_count), self.n)),
        }
    }

    pub fn h_or(&self, default: f64) -> f64 {
        self.h.unwrap_or(default)
    }

    pub fn eps_or(&self, default: &[f64]) -> Vec<f64> {
        if self.eps.is_empty() { default.to_vec() } else { self.eps.clone() }
    }

    /// `key=value` pairs for the header; worker count and output path are
    /// omitted since they do not affect the data.
    pub fn describe(&self) -> String {
        let opt = |v: Option<String>| v.unwrap_or_else(|| "default".into());
        let eps = if self.eps.is_empty() {
            "default".to_string()
        } else {
            self.eps.iter().map(|e| e.to_string()).collect::<Vec<_>>().join(",")
        };
        format!(
            "seed={} samples={} grid={} h={} eps={} chart={} n={} measure={} points={}",
            self.seed,
            opt(self.samples.map(|s| s.to_string())),
            opt(self.grid.map(|s| s.to_string())),
            opt(self.h.map(|s| s.to_string())),
            eps,
            opt(self.chart.map(|s| s.to_string())),
            self.n,
            opt(self.measure_path.as_ref().map(|p| p.display().to_string())),
            opt(self.points_path.as_ref().map(|p| p.display().to_string())),
        )
    }
}

/// Compact one-line JSON of a measure, for the header.
fn measure_line(mu: &AtomicMeasure) -> String {
    let v: serde_json::Value = serde_json::from_str(&measure_to_json(mu)).expect("valid json");
    v.to_string()
}
