use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use sparse_nearfield::geometry::ArrayKind;
use sparse_nearfield::PatternMode;

#[derive(Debug, Parser)]
#[command(name = "snf", version, about = "Near-field beam patterns and hybrid beamforming for sparse arrays")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Beam-pattern magnitude on a (sinθ, r) grid.
    Pattern(PatternArgs),
    /// Predicted lobes, optionally matched against a numerical measurement.
    Lobes(LobesArgs),
    /// Digital and hybrid precoders for one set of user locations.
    Beamform(BeamformArgs),
    /// Monte-Carlo sum-rate curves.
    Scenario(ScenarioArgs),
    /// |G(β1, β2)| on a grid.
    Gfunc(GfuncArgs),
}

/// `lo:hi:n`, sampled linearly and inclusive at both ends.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Axis {
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
}

impl FromStr for Axis {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        let [lo, hi, n] = parts[..] else {
            return Err(format!("expected lo:hi:n, got `{s}`"));
        };
        let num = |v: &str| v.trim().parse::<f64>().map_err(|e| format!("`{v}`: {e}"));
        let n = n.trim().parse::<usize>().map_err(|e| format!("`{n}`: {e}"))?;
        if n == 0 {
            return Err("axis needs at least one sample".into());
        }
        Ok(Axis { lo: num(lo)?, hi: num(hi)?, n })
    }
}

impl Axis {
    pub fn samples(&self) -> Vec<f64> {
        if self.n == 1 {
            return vec![self.lo];
        }
        let step = (self.hi - self.lo) / (self.n - 1) as f64;
        (0..self.n).map(|i| self.lo + i as f64 * step).collect()
    }
}

/// `r:deg`, range in meters and angle in degrees.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct UserSpec {
    pub range_m: f64,
    pub angle_deg: f64,
}

impl FromStr for UserSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (r, d) = s.split_once(':').ok_or_else(|| format!("expected r:deg, got `{s}`"))?;
        Ok(UserSpec {
            range_m: r.trim().parse().map_err(|e| format!("`{r}`: {e}"))?,
            angle_deg: d.trim().parse().map_err(|e| format!("`{d}`: {e}"))?,
        })
    }
}

fn parse_array(s: &str) -> Result<ArrayKind, String> {
    s.parse().map_err(|e: sparse_nearfield::Error| e.to_string())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Exact,
    Fresnel,
    ClosedForm,
}

impl From<Mode> for PatternMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Exact => PatternMode::Exact,
            Mode::Fresnel => PatternMode::Fresnel,
            Mode::ClosedForm => PatternMode::ClosedForm,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Layout {
    /// One row per range, one column per sinθ.
    Wide,
    /// One `sin_theta,r_m,magnitude` row per cell.
    Long,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct Focus {
    /// Array spec: `ula:Q`, `lsa:Q:U` or `eca:M:N:L`.
    #[arg(long, value_parser = parse_array)]
    pub array: ArrayKind,
    #[arg(long, default_value_t = 0.01)]
    pub wavelength: f64,
    /// Focus range in meters.
    #[arg(long)]
    pub focus_range: f64,
    /// Focus angle in degrees.
    #[arg(long, allow_hyphen_values = true, conflicts_with = "focus_sin")]
    pub focus_deg: Option<f64>,
    /// Focus given as sinθ instead of degrees.
    #[arg(long, allow_hyphen_values = true)]
    pub focus_sin: Option<f64>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct PatternArgs {
    #[command(flatten)]
    pub focus: Focus,
    #[arg(long, value_enum, default_value_t = Mode::Exact)]
    pub mode: Mode,
    /// sinθ axis as lo:hi:n.
    #[arg(long, default_value = "-1:1:401", allow_hyphen_values = true)]
    pub sin: Axis,
    /// Range axis in meters as lo:hi:n.
    #[arg(long, default_value = "1:30:300")]
    pub range: Axis,
    #[arg(long, value_enum, default_value_t = Layout::Wide)]
    pub layout: Layout,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct LobesArgs {
    #[command(flatten)]
    pub focus: Focus,
    /// Also scan the pattern and report measured peaks.
    #[arg(long)]
    pub measure: bool,
    /// Evaluator used by the measurement.
    #[arg(long, value_enum, default_value_t = Mode::Exact)]
    pub mode: Mode,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct BeamformArgs {
    #[arg(long, value_parser = parse_array)]
    pub array: ArrayKind,
    #[arg(long, default_value_t = 0.01)]
    pub wavelength: f64,
    /// Comma-separated user locations `r:deg`.
    #[arg(long, value_delimiter = ',', required = true, allow_hyphen_values = true)]
    pub users: Vec<UserSpec>,
    #[arg(long, default_value_t = 30.0, allow_hyphen_values = true)]
    pub p_max_dbm: f64,
    #[arg(long, default_value_t = -70.0, allow_hyphen_values = true)]
    pub noise_dbm: f64,
    #[arg(long, default_value_t = -62.0, allow_hyphen_values = true)]
    pub beta0_db: f64,
    /// Directory for the precoder matrices (`row,col,re,im`).
    #[arg(long)]
    pub matrices: Option<PathBuf>,
    /// Exit with code 3 when a solver hits its iteration cap.
    #[arg(long)]
    pub strict: bool,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ScenarioArgs {
    /// Built-in scenario 1, 2 or 3.
    #[arg(long, required_unless_present = "config", conflicts_with = "config")]
    pub preset: Option<u8>,
    /// JSON scenario file; see `--dump-config` for the format.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub users: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    pub p_max_dbm: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub noise_dbm: Option<f64>,
    /// Skip the fully digital curves.
    #[arg(long)]
    pub no_digital: bool,
    /// Print the resolved config as JSON and exit.
    #[arg(long)]
    pub dump_config: bool,
    /// Per-trial rates, in addition to the aggregated curve.
    #[arg(long)]
    pub trials_out: Option<PathBuf>,
    #[arg(long)]
    pub strict: bool,
    #[arg(long, required_unless_present = "dump_config")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct GfuncArgs {
    #[arg(long, default_value = "-4:4:161", allow_hyphen_values = true)]
    pub beta1: Axis,
    #[arg(long, default_value = "0:4:81", allow_hyphen_values = true)]
    pub beta2: Axis,
    #[arg(long)]
    pub out: PathBuf,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn axis_parsing() {
        let a: Axis = "-1:1:5".parse().unwrap();
        assert_eq!(a.samples(), vec![-1.0, -0.5, 0.0, 0.5, 1.0]);
        assert_eq!("3:9:1".parse::<Axis>().unwrap().samples(), vec![3.0]);
        assert!("1:2".parse::<Axis>().is_err());
        assert!("1:2:0".parse::<Axis>().is_err());
    }

    #[test]
    fn user_parsing() {
        let u: UserSpec = "20:-3.5".parse().unwrap();
        assert_eq!(u, UserSpec { range_m: 20.0, angle_deg: -3.5 });
        assert!("20".parse::<UserSpec>().is_err());
    }

    #[test]
    fn cli_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
