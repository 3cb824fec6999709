use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(
    name = "prwave",
    version,
    about = "Weighted Einstein equations on pr-wave spacetimes"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate G^h at sample points and report whether (g, h) is a solution.
    Verify(RunArgs),
    /// Classify a metric/density pair into a solution branch.
    Classify(RunArgs),
    /// Materialise a built-in family as a re-runnable manifest.
    Family(RunArgs),
    /// Integrate h'' = q(v) h and emit the profile.
    Ode(RunArgs),
    /// Integrate a geodesic of the metric.
    Geodesic(RunArgs),
    /// Find where the density stops being positive along a ray.
    Domain(RunArgs),
}

impl Command {
    pub fn parts(&self) -> (&'static str, &RunArgs) {
        match self {
            Command::Verify(a) => ("verify", a),
            Command::Classify(a) => ("classify", a),
            Command::Family(a) => ("family", a),
            Command::Ode(a) => ("ode", a),
            Command::Geodesic(a) => ("geodesic", a),
            Command::Domain(a) => ("domain", a),
        }
    }
}

/// Inline flags. Each one overrides the matching manifest entry.
#[derive(Debug, Default, Args)]
pub struct RunArgs {
    /// JSON run manifest (a `family` report is accepted too).
    #[arg(long)]
    pub manifest: Option<PathBuf>,
    /// Metric profile F(u, v, x, y).
    #[arg(long = "F", value_name = "EXPR", allow_hyphen_values = true)]
    pub f: Option<String>,
    /// Density h(u, v, x, y).
    #[arg(long = "h", value_name = "EXPR", allow_hyphen_values = true)]
    pub h: Option<String>,
    /// Built-in family name.
    #[arg(long)]
    pub family: Option<String>,
    /// Family or expression parameter, repeatable.
    #[arg(long = "param", value_name = "KEY=VALUE")]
    pub params: Vec<String>,
    /// Regular grid with this many points per axis.
    #[arg(long, value_name = "NU,NV,NX,NY")]
    pub grid: Option<String>,
    /// Sampling box.
    #[arg(
        long = "box",
        value_name = "UMIN:UMAX,VMIN:VMAX,XMIN:XMAX,YMIN:YMAX",
        allow_hyphen_values = true
    )]
    pub bbox: Option<String>,
    /// Number of random sample points.
    #[arg(long)]
    pub count: Option<usize>,
    /// Seed for random sampling (decimal or 0x-prefixed hex).
    #[arg(long, value_parser = parse_seed)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub tol_solution: Option<f64>,
    /// JSON report path; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// CSV sidecar path; defaults to the report path with a `.csv` extension.
    #[arg(long)]
    pub csv: Option<PathBuf>,

    /// ODE coefficient q(v).
    #[arg(long, help_heading = "ode", allow_hyphen_values = true)]
    pub q: Option<String>,
    #[arg(long, help_heading = "ode", allow_hyphen_values = true)]
    pub v0: Option<f64>,
    #[arg(long, help_heading = "ode", allow_hyphen_values = true)]
    pub h0: Option<f64>,
    #[arg(long, help_heading = "ode", allow_hyphen_values = true)]
    pub h0p: Option<f64>,
    #[arg(long, help_heading = "ode", value_name = "A:B", allow_hyphen_values = true)]
    pub interval: Option<String>,
    /// Output samples on the interval.
    #[arg(long, help_heading = "ode")]
    pub points: Option<usize>,

    #[arg(long, help_heading = "geodesic", value_name = "U,V,X,Y", allow_hyphen_values = true)]
    pub position: Option<String>,
    #[arg(long, help_heading = "geodesic", value_name = "U,V,X,Y", allow_hyphen_values = true)]
    pub velocity: Option<String>,
    #[arg(long, help_heading = "geodesic")]
    pub s_max: Option<f64>,

    #[arg(long, help_heading = "domain", value_name = "U,V,X,Y", allow_hyphen_values = true)]
    pub base: Option<String>,
    #[arg(long, help_heading = "domain", value_name = "U,V,X,Y", allow_hyphen_values = true)]
    pub direction: Option<String>,
    #[arg(long, help_heading = "domain", value_name = "A:B", allow_hyphen_values = true)]
    pub bracket: Option<String>,
}

fn parse_seed(s: &str) -> Result<u64, String> {
    let s = s.trim();
    let parsed = match s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")) {
        Some(hex) => u64::from_str_radix(hex, 16),
        None => s.parse(),
    };
    parsed.map_err(|e| format!("invalid seed '{s}': {e}"))
}
