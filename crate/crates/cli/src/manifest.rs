//! Run manifests: everything needed to reproduce a report.

use std::path::Path;

use prwave::analysis::Tolerances;
use prwave::families::{FamilyParams, ParamValue};
use serde::{Deserialize, Serialize};

use crate::args::RunArgs;
use crate::CliError;

pub const SCHEMA_VERSION: u32 = 1;
pub const DEFAULT_SEED: u64 = 0xC0FFEE;
pub const DEFAULT_COUNT: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    Random,
    Grid,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    pub lo: [f64; 4],
    pub hi: [f64; 4],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Sampling {
    pub strategy: Strategy,
    pub count: usize,
    pub grid: Option<[usize; 4]>,
    pub seed: u64,
    /// Sampling box; the family's own box when absent.
    #[serde(rename = "box")]
    pub bounds: Option<Bounds>,
}

impl Default for Sampling {
    fn default() -> Self {
        Self {
            strategy: Strategy::Random,
            count: DEFAULT_COUNT,
            grid: None,
            seed: DEFAULT_SEED,
            bounds: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OdeSpec {
    pub q: Option<String>,
    pub v0: f64,
    pub h0: f64,
    pub h0p: f64,
    pub interval: [f64; 2],
    pub points: usize,
}

impl Default for OdeSpec {
    fn default() -> Self {
        Self {
            q: None,
            v0: 0.0,
            h0: 1.0,
            h0p: 0.0,
            interval: [-3.0, 3.0],
            points: 121,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GeodesicSpec {
    pub position: [f64; 4],
    pub velocity: [f64; 4],
    pub s_max: f64,
}

impl Default for GeodesicSpec {
    fn default() -> Self {
        Self {
            position: [0.0, 0.0, 0.5, 0.5],
            velocity: [0.0, 1.0, 0.5, 0.0],
            s_max: 10.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RaySpec {
    pub base: [f64; 4],
    pub direction: [f64; 4],
    pub bracket: [f64; 2],
}

impl Default for RaySpec {
    fn default() -> Self {
        Self {
            base: [0.0; 4],
            direction: [0.0, 0.0, 1.0, 0.0],
            bracket: [0.0, -10.0],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunManifest {
    pub schema_version: u32,
    pub command: String,
    #[serde(default)]
    pub family: Option<String>,
    #[serde(default)]
    pub params: FamilyParams,
    #[serde(default, rename = "F")]
    pub f: Option<String>,
    #[serde(default)]
    pub h: Option<String>,
    #[serde(default)]
    pub sampling: Sampling,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub ode: OdeSpec,
    #[serde(default)]
    pub geodesic: GeodesicSpec,
    #[serde(default)]
    pub domain: RaySpec,
    #[serde(default)]
    pub out: Option<String>,
    #[serde(default)]
    pub csv: Option<String>,
}

impl RunManifest {
    pub fn new(command: &str) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            command: command.into(),
            family: None,
            params: FamilyParams::new(),
            f: None,
            h: None,
            sampling: Sampling::default(),
            tolerances: Tolerances::default(),
            ode: OdeSpec::default(),
            geodesic: GeodesicSpec::default(),
            domain: RaySpec::default(),
            out: None,
            csv: None,
        }
    }

    /// Reads a manifest, or the `manifest` entry of a `family` report.
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
        let mut value: serde_json::Value =
            serde_json::from_str(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
        if let Some(inner) = value.get_mut("manifest") {
            value = inner.take();
        }
        let m: RunManifest =
            serde_json::from_value(value).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
        if m.schema_version != SCHEMA_VERSION {
            return Err(CliError::Input(format!(
                "manifest schema version {} is not supported (expected {SCHEMA_VERSION})",
                m.schema_version
            )));
        }
        Ok(m)
    }

    /// Manifest for `command`: the file given by `--manifest` if any, with
    /// inline flags applied on top.
    pub fn from_args(command: &str, a: &RunArgs) -> Result<Self, CliError> {
        let mut m = match &a.manifest {
            Some(path) => RunManifest::load(path)?,
            None => RunManifest::new(command),
        };
        m.command = command.into();
        if let Some(f) = &a.family {
            m.family = Some(f.replace('_', "-"));
        }
        for kv in &a.params {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| CliError::Input(format!("--param expects KEY=VALUE, got '{kv}'")))?;
            m.params.insert(k.trim().to_string(), ParamValue::parse(v));
        }
        set(&mut m.f, &a.f);
        set(&mut m.h, &a.h);
        if let Some(g) = &a.grid {
            let counts = parse_list::<usize>(g, "--grid")?;
            m.sampling.grid = Some(four(&counts, "--grid")?);
            m.sampling.strategy = Strategy::Grid;
        }
        if let Some(b) = &a.bbox {
            m.sampling.bounds = Some(parse_box(b)?);
        }
        if let Some(n) = a.count {
            m.sampling.count = n;
            if a.grid.is_none() {
                m.sampling.strategy = Strategy::Random;
            }
        }
        if let Some(s) = a.seed {
            m.sampling.seed = s;
        }
        if let Some(t) = a.tol_solution {
            m.tolerances.solution = t;
        }
        if let Some(p) = &a.out {
            m.out = Some(p.display().to_string());
        }
        if let Some(p) = &a.csv {
            m.csv = Some(p.display().to_string());
        }

        set(&mut m.ode.q, &a.q);
        m.ode.v0 = a.v0.unwrap_or(m.ode.v0);
        m.ode.h0 = a.h0.unwrap_or(m.ode.h0);
        m.ode.h0p = a.h0p.unwrap_or(m.ode.h0p);
        if let Some(i) = &a.interval {
            m.ode.interval = parse_range(i, "--interval")?;
        }
        m.ode.points = a.points.unwrap_or(m.ode.points);

        if let Some(p) = &a.position {
            m.geodesic.position = four(&parse_list(p, "--position")?, "--position")?;
        }
        if let Some(p) = &a.velocity {
            m.geodesic.velocity = four(&parse_list(p, "--velocity")?, "--velocity")?;
        }
        m.geodesic.s_max = a.s_max.unwrap_or(m.geodesic.s_max);

        if let Some(p) = &a.base {
            m.domain.base = four(&parse_list(p, "--base")?, "--base")?;
        }
        if let Some(p) = &a.direction {
            m.domain.direction = four(&parse_list(p, "--direction")?, "--direction")?;
        }
        if let Some(b) = &a.bracket {
            m.domain.bracket = parse_range(b, "--bracket")?;
        }
        Ok(m)
    }
}

fn set(slot: &mut Option<String>, value: &Option<String>) {
    if let Some(v) = value {
        *slot = Some(v.clone());
    }
}

fn parse_list<T: std::str::FromStr>(s: &str, flag: &str) -> Result<Vec<T>, CliError> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<T>()
                .map_err(|_| CliError::Input(format!("{flag}: cannot parse '{t}'")))
        })
        .collect()
}

fn four<T: Copy>(v: &[T], flag: &str) -> Result<[T; 4], CliError> {
    v.try_into()
        .map_err(|_| CliError::Input(format!("{flag} expects four comma-separated values")))
}

fn parse_range(s: &str, flag: &str) -> Result<[f64; 2], CliError> {
    let (a, b) = s
        .split_once(':')
        .ok_or_else(|| CliError::Input(format!("{flag} expects A:B, got '{s}'")))?;
    let num = |t: &str| {
        t.trim()
            .parse::<f64>()
            .map_err(|_| CliError::Input(format!("{flag}: cannot parse '{t}'")))
    };
    Ok([num(a)?, num(b)?])
}

fn parse_box(s: &str) -> Result<Bounds, CliError> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 4 {
        return Err(CliError::Input("--box expects four MIN:MAX ranges".into()));
    }
    let mut b = Bounds {
        lo: [0.0; 4],
        hi: [0.0; 4],
    };
    for (i, part) in parts.iter().enumerate() {
        let [lo, hi] = parse_range(part, "--box")?;
        if lo.is_nan() || hi.is_nan() || lo > hi {
            return Err(CliError::Input(format!("--box range {part} is empty")));
        }
        b.lo[i] = lo;
        b.hi[i] = hi;
    }
    Ok(b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_defaults() {
        let a = RunArgs {
            family: Some("cahen_wallach_isotropic".into()),
            params: vec!["a=-2".into(), "F=x^2".into()],
            grid: Some("2,3,4,5".into()),
            bbox: Some("-1:1,0:2,-3:3,0:0".into()),
            ..RunArgs::default()
        };
        let m = RunManifest::from_args("verify", &a).unwrap();
        assert_eq!(m.family.as_deref(), Some("cahen-wallach-isotropic"));
        assert_eq!(m.params["a"], ParamValue::Number(-2.0));
        assert_eq!(m.params["F"], ParamValue::Text("x^2".into()));
        assert_eq!(m.sampling.strategy, Strategy::Grid);
        assert_eq!(m.sampling.grid, Some([2, 3, 4, 5]));
        assert_eq!(m.sampling.bounds.unwrap().hi, [1.0, 2.0, 3.0, 0.0]);
        assert_eq!(m.sampling.seed, DEFAULT_SEED);
    }

    #[test]
    fn malformed_flags_are_input_errors() {
        for a in [
            RunArgs {
                params: vec!["a".into()],
                ..RunArgs::default()
            },
            RunArgs {
                grid: Some("1,2".into()),
                ..RunArgs::default()
            },
            RunArgs {
                bbox: Some("1:0,0:1,0:1,0:1".into()),
                ..RunArgs::default()
            },
        ] {
            assert!(matches!(RunManifest::from_args("verify", &a), Err(CliError::Input(_))));
        }
    }

    #[test]
    fn manifest_roundtrip() {
        let m = RunManifest::new("classify");
        let text = serde_json::to_string(&m).unwrap();
        let back: RunManifest = serde_json::from_str(&text).unwrap();
        assert_eq!(m, back);
        let sparse: RunManifest = serde_json::from_str(r#"{"schema_version":1,"command":"verify","F":"x^2"}"#).unwrap();
        assert_eq!(sparse.f.as_deref(), Some("x^2"));
        assert_eq!(sparse.sampling.count, DEFAULT_COUNT);
    }
}
