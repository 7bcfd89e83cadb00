//! Experiment configuration: one TOML file plus `key=value` overrides.

use std::path::{Path, PathBuf};

use bergtoric_core::christ::{BumpQuadratic, ChristPoint, ChristPotential, CoshPotential, Quadratic};
use bergtoric_core::decay::DEFAULT_K_GRID;
use bergtoric_core::polytope::{rational_from_parts, Facet, Rational};
use bergtoric_core::potential::{BumpPerturbation, PotentialSpec};
use bergtoric_core::{DelzantPolytope, OrbitPoint, QuadratureOptions};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// Overrides `output.dir`.
pub const OUT_DIR_ENV: &str = "BERGTORIC_OUT_DIR";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub potential: PotentialSpec,
    /// Defaults to the potential's moment polytope.
    #[serde(default)]
    pub polytope: Option<PolytopeConfig>,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default)]
    pub pairs: Vec<PairConfig>,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub output: OutputConfig,
    #[serde(default)]
    pub christ: Option<ChristConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolytopeConfig {
    pub dim: usize,
    pub facets: Vec<FacetConfig>,
}

/// `⟨x, normal⟩ ≥ offset`; the offset is an integer or a `"p/q"` string.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FacetConfig {
    pub normal: Vec<i64>,
    pub offset: OffsetValue,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OffsetValue {
    Integer(i64),
    Fraction(String),
}

impl OffsetValue {
    fn to_rational(&self) -> Result<Rational, CliError> {
        match self {
            OffsetValue::Integer(n) => Ok(Rational::from_integer(*n)),
            OffsetValue::Fraction(s) => {
                let (n, d) = match s.split_once('/') {
                    Some((n, d)) => (n.trim(), d.trim()),
                    None => (s.trim(), "1"),
                };
                let n: i64 = n.parse().map_err(|_| CliError::config(format!("bad facet offset {s:?}")))?;
                let d: i64 = d.parse().map_err(|_| CliError::config(format!("bad facet offset {s:?}")))?;
                rational_from_parts(n, d).map_err(|e| CliError::config(format!("bad facet offset {s:?}: {e}")))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    #[serde(default = "default_k")]
    pub k: Vec<u32>,
}

fn default_k() -> Vec<u32> {
    DEFAULT_K_GRID.to_vec()
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig { k: default_k() }
    }
}

/// A pair of open-orbit points; angles default to zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairConfig {
    pub rho1: Vec<f64>,
    #[serde(default)]
    pub theta1: Option<Vec<f64>>,
    pub rho2: Vec<f64>,
    #[serde(default)]
    pub theta2: Option<Vec<f64>>,
}

impl PairConfig {
    pub fn points(&self) -> (OrbitPoint, OrbitPoint) {
        let angles = |t: &Option<Vec<f64>>, m: usize| t.clone().unwrap_or_else(|| vec![0.0; m]);
        (
            OrbitPoint::new(self.rho1.clone(), angles(&self.theta1, self.rho1.len())),
            OrbitPoint::new(self.rho2.clone(), angles(&self.theta2, self.rho2.len())),
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    /// Relative tolerance per norm `Q(α)`.
    #[serde(default = "default_quadrature")]
    pub quadrature: f64,
    /// Slack in `r_k ≥ ½D(z*,w*) − bound`.
    #[serde(default = "default_bound")]
    pub bound: f64,
    /// First `k` at which the bound is enforced; defaults to the second half of the grid.
    #[serde(default)]
    pub bound_from_k: Option<u32>,
}

fn default_quadrature() -> f64 {
    1e-10
}

fn default_bound() -> f64 {
    1e-6
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { quadrature: default_quadrature(), bound: default_bound(), bound_from_k: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default = "default_out")]
    pub dir: PathBuf,
    /// Defaults to `<dir>/cache`.
    #[serde(default)]
    pub cache_dir: Option<PathBuf>,
}

fn default_out() -> PathBuf {
    PathBuf::from("out")
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig { dir: default_out(), cache_dir: None }
    }
}

impl OutputConfig {
    pub fn cache_dir(&self) -> PathBuf {
        self.cache_dir.clone().unwrap_or_else(|| self.dir.join("cache"))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case", deny_unknown_fields)]
pub enum ChristPotentialSpec {
    Quadratic { dim: usize },
    Cosh { dim: usize },
    BumpQuadratic { bump: BumpPerturbation },
}

impl ChristPotentialSpec {
    pub fn dim(&self) -> usize {
        match self {
            ChristPotentialSpec::Quadratic { dim } | ChristPotentialSpec::Cosh { dim } => *dim,
            ChristPotentialSpec::BumpQuadratic { bump } => bump.center.len(),
        }
    }

    pub fn build(&self) -> Box<dyn ChristPotential> {
        match self {
            ChristPotentialSpec::Quadratic { dim } => Box::new(Quadratic { dim: *dim }),
            ChristPotentialSpec::Cosh { dim } => Box::new(CoshPotential { dim: *dim }),
            ChristPotentialSpec::BumpQuadratic { bump } => Box::new(BumpQuadratic { bump: bump.clone() }),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChristConfig {
    pub potential: ChristPotentialSpec,
    #[serde(default = "default_lambda")]
    pub lambda: Vec<f64>,
    #[serde(default)]
    pub pairs: Vec<ChristPairConfig>,
    #[serde(default)]
    pub slice: Option<SliceConfig>,
    #[serde(default = "default_quadrature")]
    pub rel_tol: f64,
}

fn default_lambda() -> Vec<f64> {
    vec![2.0, 4.0, 8.0, 16.0]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChristPairConfig {
    pub x1: Vec<f64>,
    #[serde(default)]
    pub y1: Option<Vec<f64>>,
    pub x2: Vec<f64>,
    #[serde(default)]
    pub y2: Option<Vec<f64>>,
}

impl ChristPairConfig {
    pub fn points(&self) -> (ChristPoint, ChristPoint) {
        let ys = |y: &Option<Vec<f64>>, m: usize| y.clone().unwrap_or_else(|| vec![0.0; m]);
        (
            ChristPoint::new(self.x1.clone(), ys(&self.y1, self.x1.len())),
            ChristPoint::new(self.x2.clone(), ys(&self.y2, self.x2.len())),
        )
    }
}

/// `P((x, 0), (x, Δy·e₁))` for each `Δy`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SliceConfig {
    pub x: Vec<f64>,
    pub dy: Vec<f64>,
}

impl ExperimentConfig {
    /// Reads `path`, applies overrides and the output-directory variable, and validates.
    pub fn load(path: &Path, overrides: &[String]) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::config(format!("cannot read {}: {e}", path.display())))?;
        let mut cfg = Self::from_toml(&text, overrides)?;
        if let Some(dir) = std::env::var_os(OUT_DIR_ENV) {
            cfg.output.dir = PathBuf::from(dir);
        }
        Ok(cfg)
    }

    pub fn from_toml(text: &str, overrides: &[String]) -> Result<Self, CliError> {
        let mut table: toml::Table = text.parse().map_err(|e| CliError::config(format!("{e}")))?;
        for o in overrides {
            apply_override(&mut table, o)?;
        }
        let cfg: ExperimentConfig = toml::Value::Table(table).try_into().map_err(|e| CliError::config(format!("{e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let m = self.potential.dim();
        if m == 0 {
            return Err(CliError::config("potential dimension must be positive"));
        }
        let ks = &self.grid.k;
        if ks.is_empty() || ks[0] == 0 || ks.windows(2).any(|w| w[1] <= w[0]) {
            return Err(CliError::config(format!("grid.k must be strictly increasing positive integers, got {ks:?}")));
        }
        for (i, p) in self.pairs.iter().enumerate() {
            let lens = [Some(p.rho1.len()), p.theta1.as_ref().map(Vec::len), Some(p.rho2.len()), p.theta2.as_ref().map(Vec::len)];
            if lens.iter().flatten().any(|&l| l != m) {
                return Err(CliError::config(format!("pairs[{i}] does not have dimension {m}")));
            }
            if p.rho1.iter().chain(&p.rho2).any(|v| !v.is_finite()) {
                return Err(CliError::config(format!("pairs[{i}] has non-finite coordinates")));
            }
        }
        let t = &self.tolerances;
        if !(t.quadrature > 0.0 && t.quadrature < 1.0) || !(t.bound >= 0.0) {
            return Err(CliError::config("tolerances must be positive (quadrature below 1)"));
        }
        if let Some(p) = &self.polytope {
            if p.facets.iter().any(|f| f.normal.len() != p.dim) {
                return Err(CliError::config(format!("polytope facet normals must have length {}", p.dim)));
            }
        }
        if let Some(c) = &self.christ {
            let m = c.potential.dim();
            if m == 0 {
                return Err(CliError::config("christ potential dimension must be positive"));
            }
            if c.lambda.is_empty() || c.lambda[0] <= 0.0 || c.lambda.windows(2).any(|w| w[1] <= w[0]) {
                return Err(CliError::config(format!("christ.lambda must be strictly increasing and positive, got {:?}", c.lambda)));
            }
            for (i, p) in c.pairs.iter().enumerate() {
                let lens = [Some(p.x1.len()), p.y1.as_ref().map(Vec::len), Some(p.x2.len()), p.y2.as_ref().map(Vec::len)];
                if lens.iter().flatten().any(|&l| l != m) {
                    return Err(CliError::config(format!("christ.pairs[{i}] does not have dimension {m}")));
                }
            }
            if let Some(s) = &c.slice {
                if s.x.len() != m {
                    return Err(CliError::config(format!("christ.slice.x must have dimension {m}")));
                }
            }
            if !(c.rel_tol > 0.0 && c.rel_tol < 1.0) {
                return Err(CliError::config("christ.rel_tol must lie in (0, 1)"));
            }
        }
        Ok(())
    }

    pub fn quadrature(&self) -> QuadratureOptions {
        QuadratureOptions { rel_tol: self.tolerances.quadrature, ..QuadratureOptions::default() }
    }

    /// The configured polytope, if any.
    pub fn explicit_polytope(&self) -> Result<Option<DelzantPolytope>, CliError> {
        let Some(p) = &self.polytope else { return Ok(None) };
        let facets = p
            .facets
            .iter()
            .map(|f| Ok(Facet::new(f.normal.clone(), f.offset.to_rational()?)))
            .collect::<Result<Vec<_>, CliError>>()?;
        DelzantPolytope::new(p.dim, facets).map(Some).map_err(CliError::from)
    }
}

/// `a.b.c=value`; the value is parsed as a TOML value, falling back to a bare
/// string. Numeric segments index arrays.
pub fn apply_override(table: &mut toml::Table, spec: &str) -> Result<(), CliError> {
    let (key, raw) = spec.split_once('=').ok_or_else(|| CliError::config(format!("override {spec:?} is not key=value")))?;
    let path: Vec<&str> = key.trim().split('.').collect();
    if path.iter().any(|s| s.is_empty()) {
        return Err(CliError::config(format!("override key {key:?} is malformed")));
    }
    let mut root = toml::Value::Table(std::mem::take(table));
    let result = set_path(&mut root, &path, parse_value(raw.trim()), spec);
    if let toml::Value::Table(t) = root {
        *table = t;
    }
    result
}

fn set_path(node: &mut toml::Value, path: &[&str], value: toml::Value, spec: &str) -> Result<(), CliError> {
    let (seg, rest) = path.split_first().expect("override paths are non-empty");
    let child = match node {
        toml::Value::Table(t) => {
            if rest.is_empty() {
                t.insert(seg.to_string(), value);
                return Ok(());
            }
            t.entry(seg.to_string()).or_insert_with(|| toml::Value::Table(toml::Table::new()))
        }
        toml::Value::Array(a) => {
            let i: usize = seg.parse().map_err(|_| CliError::config(format!("override {spec:?}: {seg:?} is not an index")))?;
            let slot = a.get_mut(i).ok_or_else(|| CliError::config(format!("override {spec:?}: index {i} out of range")))?;
            if rest.is_empty() {
                *slot = value;
                return Ok(());
            }
            slot
        }
        _ => return Err(CliError::config(format!("override {spec:?} descends into a scalar"))),
    };
    set_path(child, rest, value, spec)
}

fn parse_value(raw: &str) -> toml::Value {
    format!("v = {raw}")
        .parse::<toml::Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = r#"
[potential]
name = "fubini_study"
dim = 1

[[pairs]]
rho1 = [0.0]
rho2 = [2.0]
"#;

    #[test]
    fn defaults_and_overrides() {
        let c = ExperimentConfig::from_toml(BASE, &[]).unwrap();
        assert_eq!(c.grid.k, DEFAULT_K_GRID.to_vec());
        assert_eq!(c.tolerances.quadrature, 1e-10);
        let c = ExperimentConfig::from_toml(BASE, &["grid.k=[2, 4]".into(), "pairs.0.rho2=[3.5]".into(), "output.dir=elsewhere".into()]).unwrap();
        assert_eq!(c.grid.k, vec![2, 4]);
        assert_eq!(c.pairs[0].rho2, vec![3.5]);
        assert_eq!(c.output.dir, PathBuf::from("elsewhere"));
    }

    #[test]
    fn rejects_bad_input() {
        assert!(ExperimentConfig::from_toml(BASE, &["grid.k=[4, 4]".into()]).is_err());
        assert!(ExperimentConfig::from_toml(BASE, &["potential.name=\"hyperbolic\"".into()]).is_err());
        assert!(ExperimentConfig::from_toml(BASE, &["pairs.0.rho1=[0.0, 1.0]".into()]).is_err());
        assert!(ExperimentConfig::from_toml(BASE, &["nonsense".into()]).is_err());
        assert!(ExperimentConfig::from_toml(&format!("{BASE}\nextra = 1\n"), &[]).is_err());
    }

    #[test]
    fn polytope_offsets() {
        let text = format!("{BASE}\n[polytope]\ndim = 1\nfacets = [{{ normal = [1], offset = 0 }}, {{ normal = [-1], offset = \"-3/1\" }}]\n");
        let c = ExperimentConfig::from_toml(&text, &[]).unwrap();
        let p = c.explicit_polytope().unwrap().unwrap();
        assert_eq!(p.lattice_points(1).unwrap().len(), 4);
    }
}
