//! Run configuration: JSON files checked against the shipped schema, then
//! deserialized with every default made explicit.

use std::fmt;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};
use twistor_core::backlund::{coefficients, BacklundCoefficients};
use twistor_core::glue::GlueOptions;
use twistor_core::pde::{abc_from_lambda_triple, fixture, Grid3, LambdaTriple, Map1, Reparameterized, SolutionOracle};
use twistor_core::riemann::{Method, SolverOptions};
use twistor_core::scaffold::NodeSet;
use twistor_core::Complex64 as C;

use crate::error::AppError;

/// The published schema, also shipped as `schema/config.schema.json`.
pub const SCHEMA: &str = include_str!("../schema/config.schema.json");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Solve,
    Glue,
    Backlund,
    Roundtrip,
    Verify,
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Command::Solve => "solve",
            Command::Glue => "glue",
            Command::Backlund => "backlund",
            Command::Roundtrip => "roundtrip",
            Command::Verify => "verify",
        };
        f.write_str(s)
    }
}

/// A complex number in JSON: a bare real or `[re, im]`. Always written as a
/// pair.
#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum Cx {
    Real(f64),
    Pair([f64; 2]),
}

impl Cx {
    pub fn get(self) -> C {
        match self {
            Cx::Real(re) => C::new(re, 0.0),
            Cx::Pair([re, im]) => C::new(re, im),
        }
    }
}

impl From<C> for Cx {
    fn from(z: C) -> Self {
        Cx::Pair([z.re, z.im])
    }
}

impl Serialize for Cx {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let z = self.get();
        [z.re, z.im].serialize(s)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub origin: [f64; 3],
    /// Side lengths of the box; zero exactly on axes with one point.
    pub extents: [f64; 3],
    pub shape: [usize; 3],
}

impl GridSpec {
    pub fn grid(&self) -> Result<Grid3, AppError> {
        let mut spacing = [1.0; 3];
        for k in 0..3 {
            let (n, e) = (self.shape[k], self.extents[k]);
            if n == 1 {
                if e != 0.0 {
                    return Err(AppError::config(format!("grid axis {k} has one point but extent {e}")));
                }
            } else if e > 0.0 {
                spacing[k] = e / (n - 1) as f64;
            } else {
                return Err(AppError::config(format!("grid axis {k} has {n} points but extent {e}")));
            }
        }
        Grid3::new(self.origin, spacing, self.shape).map_err(|e| AppError::config(e.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MethodSpec {
    Newton,
    Homotopy,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverSpec {
    pub half_order: usize,
    pub tol: f64,
    pub max_iters: usize,
    pub homotopy_steps: usize,
    pub method: MethodSpec,
}

impl Default for SolverSpec {
    fn default() -> Self {
        let d = SolverOptions::default();
        Self {
            half_order: d.half_order,
            tol: d.tol,
            max_iters: d.max_iters,
            homotopy_steps: d.homotopy_steps,
            method: MethodSpec::Newton,
        }
    }
}

impl SolverSpec {
    pub fn options(&self) -> SolverOptions {
        SolverOptions {
            half_order: self.half_order,
            tol: self.tol,
            max_iters: self.max_iters,
            homotopy_steps: self.homotopy_steps,
            ..SolverOptions::default()
        }
    }

    pub fn method(&self) -> Method {
        match self.method {
            MethodSpec::Newton => Method::Newton,
            MethodSpec::Homotopy => Method::Homotopy,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GluingSpec {
    pub half_order: usize,
    pub t_max: f64,
    pub degree: usize,
    pub epsilon1: f64,
    pub max_fit_residual: f64,
}

impl Default for GluingSpec {
    fn default() -> Self {
        let d = GlueOptions::default();
        Self {
            half_order: d.half_order,
            t_max: d.t_max,
            degree: d.degree,
            epsilon1: d.epsilon1,
            max_fit_residual: d.max_fit_residual,
        }
    }
}

impl GluingSpec {
    pub fn options(&self) -> GlueOptions {
        GlueOptions {
            half_order: self.half_order,
            t_max: self.t_max,
            degree: self.degree,
            epsilon1: self.epsilon1,
            max_fit_residual: self.max_fit_residual,
            ..GlueOptions::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum MapSpec {
    Poly { coeffs: Vec<Cx> },
    Tanh,
    Exp,
}

impl MapSpec {
    pub fn map(&self) -> Map1 {
        match self {
            MapSpec::Poly { coeffs } => Map1::Poly(coeffs.iter().map(|c| c.get()).collect()),
            MapSpec::Tanh => Map1::Tanh,
            MapSpec::Exp => Map1::Exp,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FixtureSpec {
    /// `linear`, `exp`, `sin` or `cubic`.
    pub name: String,
    pub coeffs: [Cx; 3],
    /// Gauge map applied after the fixture.
    #[serde(default)]
    pub outer: Option<MapSpec>,
    /// Coordinate maps applied before the fixture.
    #[serde(default)]
    pub coords: Option<[MapSpec; 3]>,
}

impl FixtureSpec {
    pub fn oracle(&self) -> Result<std::sync::Arc<dyn SolutionOracle>, AppError> {
        let base = fixture(&self.name, self.coeffs.map(Cx::get)).map_err(|e| AppError::config(e.to_string()))?;
        if self.outer.is_none() && self.coords.is_none() {
            return Ok(base);
        }
        Ok(std::sync::Arc::new(Reparameterized {
            inner: base,
            outer: self.outer.as_ref().map_or_else(Map1::identity, MapSpec::map),
            coords: match &self.coords {
                Some(c) => [c[0].map(), c[1].map(), c[2].map()],
                None => [Map1::identity(), Map1::identity(), Map1::identity()],
            },
        }))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SourceSpec {
    /// `g(λ, t) = λ^power · Σ_k c_k t^k` with `k` from 1.
    Polynomial { power: i32, coeffs: Vec<Cx>, delta: f64 },
    /// A gluing table written by `glue`.
    GluingFile { path: String },
    Fixture(FixtureSpec),
    /// A field CSV as written by `solve`.
    FieldFile { path: String },
}

impl SourceSpec {
    fn kind(&self) -> &'static str {
        match self {
            SourceSpec::Polynomial { .. } => "polynomial",
            SourceSpec::GluingFile { .. } => "gluing_file",
            SourceSpec::Fixture(_) => "fixture",
            SourceSpec::FieldFile { .. } => "field_file",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum CurveSpec {
    /// `dY/dx = A·wx/(B·wy)` in the plane `z = 0`.
    #[default]
    Canonical,
    /// `Y(x) = Σ_{k≥1} c_k x^k`.
    Polynomial { coeffs: Vec<Cx> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BacklundSpec {
    /// Spectral parameters of the target equation.
    pub target_lambdas: [Cx; 3],
    /// Largest accepted scaled residual and minor.
    #[serde(default = "default_backlund_tolerance")]
    pub tolerance: f64,
    /// Traces fail once a coordinate exceeds this modulus.
    #[serde(default)]
    pub box_radius: Option<f64>,
    /// Verify this field instead of computing the transform.
    #[serde(default)]
    pub v_file: Option<String>,
}

fn default_backlund_tolerance() -> f64 {
    1e-3
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RoundtripSpec {
    /// Solver truncations for the convergence table.
    pub half_orders: Vec<usize>,
}

impl Default for RoundtripSpec {
    fn default() -> Self {
        Self {
            half_orders: vec![16, 32, 64],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VerifySpec {
    pub seed: u64,
    /// Random samples per property.
    pub cases: usize,
}

impl Default for VerifySpec {
    fn default() -> Self {
        Self { seed: 1, cases: 200 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// When present it must match the subcommand.
    #[serde(default)]
    pub command: Option<Command>,
    pub lambdas: [Cx; 3],
    #[serde(default)]
    pub grid: Option<GridSpec>,
    #[serde(default)]
    pub solver: SolverSpec,
    #[serde(default)]
    pub gluing: GluingSpec,
    #[serde(default)]
    pub source: Option<SourceSpec>,
    #[serde(default)]
    pub curve: CurveSpec,
    #[serde(default)]
    pub backlund: Option<BacklundSpec>,
    #[serde(default)]
    pub roundtrip: RoundtripSpec,
    #[serde(default)]
    pub verify: VerifySpec,
    /// Overridden by `--out`.
    #[serde(default)]
    pub output_dir: Option<String>,
}

/// Checks `value` against [`SCHEMA`], listing every violation.
pub fn validate_schema(value: &Value) -> Result<(), AppError> {
    let schema: Value = serde_json::from_str(SCHEMA).expect("shipped schema is valid JSON");
    let validator = jsonschema::validator_for(&schema).expect("shipped schema compiles");
    let errors: Vec<String> = validator
        .iter_errors(value)
        .map(|e| format!("{}: {e}", e.instance_path()))
        .collect();
    if errors.is_empty() {
        Ok(())
    } else {
        Err(AppError::config(format!("config violates the schema: {}", errors.join("; "))))
    }
}

impl RunConfig {
    /// Parses and schema-checks a config, then runs the semantic checks for
    /// `command`.
    pub fn from_json(text: &str, command: Command) -> Result<Self, AppError> {
        let value: Value = serde_json::from_str(text).map_err(|e| AppError::config(format!("invalid JSON: {e}")))?;
        validate_schema(&value)?;
        let mut cfg: RunConfig = serde_json::from_value(value).map_err(|e| AppError::config(e.to_string()))?;
        if let Some(c) = cfg.command {
            if c != command {
                return Err(AppError::config(format!("config is for `{c}` but `{command}` was requested")));
            }
        }
        cfg.command = Some(command);
        cfg.check()?;
        Ok(cfg)
    }

    pub fn command(&self) -> Command {
        self.command.unwrap_or(Command::Verify)
    }

    pub fn lambda_triple(&self) -> LambdaTriple {
        let [a, b, c] = self.lambdas.map(Cx::get);
        LambdaTriple::new(a, b, c)
    }

    pub fn lambda_array(&self) -> [C; 3] {
        self.lambdas.map(Cx::get)
    }

    pub fn grid(&self) -> Result<Grid3, AppError> {
        self.grid
            .as_ref()
            .ok_or_else(|| AppError::config(format!("`{}` needs a grid", self.command())))?
            .grid()
    }

    pub fn source(&self) -> Result<&SourceSpec, AppError> {
        self.source
            .as_ref()
            .ok_or_else(|| AppError::config(format!("`{}` needs a source", self.command())))
    }

    pub fn backlund_coefficients(&self) -> Result<BacklundCoefficients, AppError> {
        let spec = self
            .backlund
            .as_ref()
            .ok_or_else(|| AppError::config("`backlund` needs a `backlund` section"))?;
        let [a, b, c] = self.lambda_array();
        let [ta, tb, tc] = spec.target_lambdas.map(Cx::get);
        let source = abc_from_lambda_triple(a, b, c).map_err(|e| AppError::config(e.to_string()))?;
        let target = abc_from_lambda_triple(ta, tb, tc).map_err(|e| AppError::config(format!("target: {e}")))?;
        coefficients(source, target).map_err(|e| AppError::config(e.to_string()))
    }

    fn check(&self) -> Result<(), AppError> {
        let [a, b, c] = self.lambda_array();
        abc_from_lambda_triple(a, b, c).map_err(|e| AppError::config(e.to_string()))?;
        let cmd = self.command();
        if matches!(cmd, Command::Solve | Command::Glue | Command::Roundtrip) {
            NodeSet::new(vec![a, b], vec![c]).map_err(|e| AppError::config(format!("NodePlacement: {e}")))?;
        }
        let allowed: &[&str] = match cmd {
            Command::Solve => &["polynomial", "gluing_file"],
            Command::Glue | Command::Roundtrip => &["fixture"],
            Command::Backlund => &["fixture", "field_file"],
            Command::Verify => &[],
        };
        if !allowed.is_empty() {
            let kind = self.source()?.kind();
            if !allowed.contains(&kind) {
                return Err(AppError::config(format!(
                    "`{cmd}` accepts sources {allowed:?}, got `{kind}`"
                )));
            }
        }
        match cmd {
            Command::Solve | Command::Roundtrip => {
                self.grid()?;
            }
            Command::Backlund => {
                self.backlund_coefficients()?;
                if !matches!(self.source, Some(SourceSpec::FieldFile { .. })) {
                    self.grid()?;
                }
            }
            Command::Glue | Command::Verify => {}
        }
        if let Some(SourceSpec::Fixture(f)) = &self.source {
            f.oracle()?;
        }
        Ok(())
    }

    /// The config with every default filled in, as written to the output
    /// directory.
    pub fn resolved_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes") + "\n"
    }

    /// SHA-256 of the resolved config without the output directory.
    pub fn hash(&self) -> String {
        let mut c = self.clone();
        c.output_dir = None;
        let digest = Sha256::digest(serde_json::to_vec(&c).expect("config serializes"));
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base() -> Value {
        serde_json::json!({
            "lambdas": [0.1, 0.2, 10.0],
            "grid": {"origin": [-0.02, -0.02, -0.02], "extents": [0.04, 0.04, 0.04], "shape": [3, 3, 3]},
            "source": {"kind": "polynomial", "power": -2, "coeffs": [1.0], "delta": 10.0}
        })
    }

    #[test]
    fn defaults_are_filled_and_echoed() {
        let cfg = RunConfig::from_json(&base().to_string(), Command::Solve).unwrap();
        assert_eq!(cfg.solver.half_order, 32);
        let resolved: Value = serde_json::from_str(&cfg.resolved_json()).unwrap();
        assert_eq!(resolved["solver"]["tol"], 1e-12);
        assert_eq!(resolved["gluing"]["t_max"], 10.0);
        assert_eq!(resolved["lambdas"][2], serde_json::json!([10.0, 0.0]));
        let again = RunConfig::from_json(&cfg.resolved_json(), Command::Solve).unwrap();
        assert_eq!(again.hash(), cfg.hash());
    }

    #[test]
    fn hash_ignores_output_dir_only() {
        let cfg = RunConfig::from_json(&base().to_string(), Command::Solve).unwrap();
        let mut moved = cfg.clone();
        moved.output_dir = Some("elsewhere".into());
        assert_eq!(moved.hash(), cfg.hash());
        let mut other = cfg.clone();
        other.solver.tol = 1e-13;
        assert_ne!(other.hash(), cfg.hash());
    }

    #[test]
    fn schema_violations_are_config_errors() {
        let mut v = base();
        v["gluing"] = serde_json::json!({"t_max": 0.0});
        let e = RunConfig::from_json(&v.to_string(), Command::Solve).unwrap_err();
        assert_eq!(e.exit_code(), 2);
        let mut v = base();
        v["unknown"] = serde_json::json!(1);
        assert!(RunConfig::from_json(&v.to_string(), Command::Solve).is_err());
        let mut v = base();
        v["gluing"] = serde_json::json!({"degree": 11});
        assert!(RunConfig::from_json(&v.to_string(), Command::Solve).is_err());
    }

    #[test]
    fn semantic_checks() {
        let mut v = base();
        v["lambdas"] = serde_json::json!([0.1, 0.98, 10.0]);
        let e = RunConfig::from_json(&v.to_string(), Command::Solve).unwrap_err();
        assert!(e.to_string().contains("NodePlacement"), "{e}");
        let mut v = base();
        v["command"] = serde_json::json!("glue");
        assert!(RunConfig::from_json(&v.to_string(), Command::Solve).is_err());
        let e = RunConfig::from_json(&base().to_string(), Command::Glue).unwrap_err();
        assert!(e.to_string().contains("accepts sources"), "{e}");
        let mut v = base();
        v["grid"]["extents"] = serde_json::json!([0.0, 0.04, 0.04]);
        assert!(RunConfig::from_json(&v.to_string(), Command::Solve).is_err());
    }

    #[test]
    fn identity_backlund_target_is_rejected() {
        let v = serde_json::json!({
            "lambdas": [0.1, 0.2, 10.0],
            "grid": {"origin": [0.0, 0.0, 0.0], "extents": [0.0, 0.0, 0.0], "shape": [1, 1, 1]},
            "source": {"kind": "fixture", "name": "exp", "coeffs": [1.0, 2.0, 3.0]},
            "backlund": {"target_lambdas": [0.2, 0.4, 20.0]}
        });
        let e = RunConfig::from_json(&v.to_string(), Command::Backlund).unwrap_err();
        assert!(e.to_string().contains("coincide"), "{e}");
    }

    #[test]
    fn complex_numbers_accept_both_forms() {
        let z: Cx = serde_json::from_str("[0.5, -1.0]").unwrap();
        assert_eq!(z.get(), C::new(0.5, -1.0));
        let r: Cx = serde_json::from_str("2").unwrap();
        assert_eq!(serde_json::to_string(&r).unwrap(), "[2.0,0.0]");
    }
}
