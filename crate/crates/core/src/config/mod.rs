//! Run configuration: TOML parsing with unit-checked quantities, full
//! validation that reports every error at once, canonical serialization and
//! the shipped benchmark presets.

pub mod presets;
pub mod units;

use std::fmt::Write as _;

use toml::Value;

use crate::boundary::{GasEquilibriumSpec, HerSpec, Insulation, Ramp};
use crate::constants::GAS_CONSTANT;
use crate::mechanics::ElastoplasticParams;
use crate::solver::{Coupling, StepController};
use crate::transport::{
    DensityLaw, DislocationTransportSpec, KineticOption, OccupancyVariant, TrapKinetics, TrapSpec,
};
use crate::{Error, Result};
use units::{parse_quantity, Unit};

#[derive(Debug, Clone, PartialEq)]
pub enum GeometryConfig {
    BoundaryLayer { outer_radius: f64, tip_opening: f64, refinement: u32 },
    Interval { length: f64, elements: usize, grading: f64 },
    Import { path: String },
}

#[derive(Debug, Clone, PartialEq)]
pub struct MaterialConfig {
    pub params: ElastoplasticParams,
    pub displacement_order: u8,
    pub bbar: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LatticeConfig {
    pub d_l: f64,
    pub v_h: f64,
    pub n_l: f64,
    pub temperature: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrapConfig {
    pub spec: TrapSpec,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FormulationConfig {
    Cl,
    Mu,
}

#[derive(Debug, Clone, PartialEq)]
pub enum InitialConc {
    Value(f64),
    /// Fraction of the first Dirichlet boundary's `C_env`.
    CEnvTimes(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransportConfig {
    pub formulation: FormulationConfig,
    pub concentration_order: u8,
    pub initial: InitialConc,
    pub traps_in_equilibrium: bool,
    pub clamp: bool,
    pub krom: bool,
    pub variant: OccupancyVariant,
    pub dislocation: Option<DislocationTransportSpec>,
    pub option1_strain_term: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub enum StressSourceConfig {
    Fe,
    Analytical,
    Table { path: String },
}

#[derive(Debug, Clone, PartialEq)]
pub struct LoadingConfig {
    pub k_max: f64,
    pub t_load: f64,
    pub t_end: f64,
    pub stress_source: StressSourceConfig,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryConfig {
    pub tag: String,
    pub kind: BoundaryKindConfig,
}

#[derive(Debug, Clone, PartialEq)]
pub enum BoundaryKindConfig {
    Dirichlet(GasEquilibriumSpec),
    Her(HerSpec),
    Insulated(Insulation),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub controller: StepController,
}

impl PartialEq for StepController {
    fn eq(&self, other: &Self) -> bool {
        self.order == other.order
            && self.dt_init == other.dt_init
            && self.dt_min == other.dt_min
            && self.dt_max == other.dt_max
            && self.rel_tol == other.rel_tol
            && self.safety == other.safety
            && self.max_newton == other.max_newton
            && self.newton_tol == other.newton_tol
            && self.coupling == other.coupling
            && self.multipass_tol == other.multipass_tol
            && self.max_passes == other.max_passes
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum LineCutConfig {
    CrackPlane { samples: usize, normalize: bool },
    Segment { from: [f64; 2], to: [f64; 2], samples: usize, normalize: bool },
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputConfig {
    pub times: Vec<f64>,
    pub fields: bool,
    pub stats: bool,
    pub linecuts: Vec<LineCutConfig>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TdsBlockConfig {
    pub t0: f64,
    pub phi: f64,
    pub t_end: f64,
    pub sample_dt: f64,
    pub d_l0: f64,
    pub e_l: f64,
    pub c_l0: f64,
}

/// A fully validated run definition.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub name: String,
    pub geometry: GeometryConfig,
    pub material: Option<MaterialConfig>,
    pub lattice: LatticeConfig,
    pub traps: Vec<TrapConfig>,
    pub transport: TransportConfig,
    pub loading: Option<LoadingConfig>,
    pub boundaries: Vec<BoundaryConfig>,
    pub solver: SolverConfig,
    pub output: OutputConfig,
    pub tds: Option<TdsBlockConfig>,
    pub warnings: Vec<String>,
}

struct Ctx {
    errors: Vec<String>,
    warnings: Vec<String>,
}

impl Ctx {
    fn new() -> Self {
        Ctx { errors: Vec::new(), warnings: Vec::new() }
    }

    fn err(&mut self, path: &str, msg: impl std::fmt::Display) {
        self.errors.push(format!("{path}: {msg}"));
    }

    fn check_keys(&mut self, table: &toml::Table, path: &str, allowed: &[&str]) {
        for key in table.keys() {
            if !allowed.contains(&key.as_str()) {
                self.err(&format!("{path}.{key}"), "unknown key");
            }
        }
    }

    fn quantity(
        &mut self,
        table: &toml::Table,
        path: &str,
        key: &str,
        unit: Unit,
        default: Option<f64>,
    ) -> f64 {
        match table.get(key) {
            None => match default {
                Some(d) => d,
                None => {
                    self.err(&format!("{path}.{key}"), "missing required quantity");
                    f64::NAN
                }
            },
            Some(Value::String(s)) => match parse_quantity(s, unit) {
                Ok(v) => v,
                Err(e) => {
                    self.err(&format!("{path}.{key}"), e);
                    f64::NAN
                }
            },
            Some(Value::Float(v)) if unit == Unit::Dimensionless => *v,
            Some(Value::Integer(v)) if unit == Unit::Dimensionless => *v as f64,
            Some(_) => {
                self.err(
                    &format!("{path}.{key}"),
                    format!("expected a quantity string (units: {})", unit.expected()),
                );
                f64::NAN
            }
        }
    }

    fn number(&mut self, table: &toml::Table, path: &str, key: &str, default: Option<f64>) -> f64 {
        self.quantity(table, path, key, Unit::Dimensionless, default)
    }

    fn integer(&mut self, table: &toml::Table, path: &str, key: &str, default: Option<i64>) -> i64 {
        match table.get(key) {
            None => match default {
                Some(d) => d,
                None => {
                    self.err(&format!("{path}.{key}"), "missing required integer");
                    0
                }
            },
            Some(Value::Integer(v)) => *v,
            Some(_) => {
                self.err(&format!("{path}.{key}"), "expected an integer");
                0
            }
        }
    }

    fn boolean(&mut self, table: &toml::Table, path: &str, key: &str, default: bool) -> bool {
        match table.get(key) {
            None => default,
            Some(Value::Boolean(b)) => *b,
            Some(_) => {
                self.err(&format!("{path}.{key}"), "expected a boolean");
                default
            }
        }
    }

    fn string(
        &mut self,
        table: &toml::Table,
        path: &str,
        key: &str,
        default: Option<&str>,
    ) -> String {
        match table.get(key) {
            None => match default {
                Some(d) => d.to_string(),
                None => {
                    self.err(&format!("{path}.{key}"), "missing required string");
                    String::new()
                }
            },
            Some(Value::String(s)) => s.clone(),
            Some(_) => {
                self.err(&format!("{path}.{key}"), "expected a string");
                String::new()
            }
        }
    }
}

/// Parses and validates a configuration, reporting every error found.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let table: toml::Table = text
        .parse()
        .map_err(|e| Error::Config(vec![format!("TOML syntax: {e}")]))?;
    let mut ctx = Ctx::new();

    ctx.check_keys(
        &table,
        "",
        &[
            "name", "geometry", "material", "lattice", "trap", "transport", "loading",
            "boundary", "solver", "output", "tds",
        ],
    );

    let name = ctx.string(&table, "", "name", Some("run"));

    let geometry = parse_geometry(&mut ctx, &table);
    let material = parse_material(&mut ctx, &table);
    let lattice = parse_lattice(&mut ctx, &table);
    let traps = parse_traps(&mut ctx, &table, &lattice);
    let transport = parse_transport(&mut ctx, &table);
    let loading = parse_loading(&mut ctx, &table);
    let boundaries = parse_boundaries(&mut ctx, &table);
    let solver = parse_solver(&mut ctx, &table);
    let output = parse_output(&mut ctx, &table);
    let tds = parse_tds(&mut ctx, &table);

    // cross-block checks
    if tds.is_none() && loading.is_none() {
        ctx.err("", "either a [loading] or a [tds] block is required");
    }
    if tds.is_none() && boundaries.is_empty() {
        ctx.err("[boundary]", "at least one boundary condition is required");
    }
    if loading.as_ref().map(|l| l.stress_source == StressSourceConfig::Fe).unwrap_or(false)
        && material.is_none()
    {
        ctx.err("[material]", "required when loading.stress_source = \"fe\"");
    }
    if transport.formulation == FormulationConfig::Mu {
        if let InitialConc::Value(v) = transport.initial {
            if v <= 0.0 {
                ctx.err(
                    "[transport].initial",
                    "the chemical-potential form needs a positive initial concentration",
                );
            }
        }
    }
    if let InitialConc::Value(v) = transport.initial {
        if v == 0.0 {
            ctx.warnings.push(
                "[transport].initial = 0: uptake from an empty lattice is \
                 numerically delicate; consider a small artificial value"
                    .to_string(),
            );
        }
    }

    if !ctx.errors.is_empty() {
        return Err(Error::Config(ctx.errors));
    }
    Ok(RunConfig {
        name,
        geometry,
        material,
        lattice,
        traps,
        transport,
        loading,
        boundaries,
        solver,
        output,
        tds,
        warnings: ctx.warnings,
    })
}

fn get_table<'t>(ctx: &mut Ctx, root: &'t toml::Table, key: &str) -> Option<&'t toml::Table> {
    match root.get(key) {
        None => None,
        Some(Value::Table(t)) => Some(t),
        Some(_) => {
            ctx.err(&format!("[{key}]"), "expected a table");
            None
        }
    }
}

fn parse_geometry(ctx: &mut Ctx, root: &toml::Table) -> GeometryConfig {
    let fallback = GeometryConfig::Interval { length: 1.0, elements: 2, grading: 1.0 };
    let Some(t) = get_table(ctx, root, "geometry") else {
        ctx.err("[geometry]", "missing required block");
        return fallback;
    };
    let kind = ctx.string(t, "[geometry]", "kind", None);
    match kind.as_str() {
        "boundary-layer" => {
            ctx.check_keys(t, "[geometry]", &["kind", "outer_radius", "tip_opening", "refinement"]);
            let outer_radius = ctx.quantity(t, "[geometry]", "outer_radius", Unit::Length, None);
            let tip_opening = ctx.quantity(t, "[geometry]", "tip_opening", Unit::Length, None);
            let refinement = ctx.integer(t, "[geometry]", "refinement", Some(2));
            if tip_opening <= 0.0 {
                ctx.err("[geometry].tip_opening", "must be positive");
            }
            if refinement < 1 {
                ctx.err("[geometry].refinement", "must be >= 1");
            }
            GeometryConfig::BoundaryLayer {
                outer_radius,
                tip_opening,
                refinement: refinement.max(1) as u32,
            }
        }
        "interval" => {
            ctx.check_keys(t, "[geometry]", &["kind", "length", "elements", "grading"]);
            let length = ctx.quantity(t, "[geometry]", "length", Unit::Length, None);
            let elements = ctx.integer(t, "[geometry]", "elements", Some(100));
            let grading = ctx.number(t, "[geometry]", "grading", Some(1.0));
            if length.is_finite() && length <= 0.0 {
                ctx.err("[geometry].length", "must be positive");
            }
            if elements < 2 {
                ctx.err("[geometry].elements", "need at least 2 elements");
            }
            if grading <= 0.0 {
                ctx.err("[geometry].grading", "must be positive");
            }
            GeometryConfig::Interval { length, elements: elements.max(2) as usize, grading }
        }
        "import" => {
            ctx.check_keys(t, "[geometry]", &["kind", "path"]);
            GeometryConfig::Import { path: ctx.string(t, "[geometry]", "path", None) }
        }
        "" => fallback,
        other => {
            ctx.err("[geometry].kind", format!("unknown kind `{other}`"));
            fallback
        }
    }
}

fn parse_material(ctx: &mut Ctx, root: &toml::Table) -> Option<MaterialConfig> {
    let t = get_table(ctx, root, "material")?;
    ctx.check_keys(
        t,
        "[material]",
        &[
            "E", "nu", "sigma_y0", "hardening_exponent", "softening_zeta", "softening_xi",
            "displacement_order", "bbar",
        ],
    );
    let e = ctx.quantity(t, "[material]", "E", Unit::Pressure, None);
    let nu = ctx.number(t, "[material]", "nu", None);
    let sigma_y0 = ctx.quantity(t, "[material]", "sigma_y0", Unit::Pressure, None);
    let n_hard = ctx.number(t, "[material]", "hardening_exponent", Some(0.0));
    // softening: zeta directly, or Kotake's xi with zeta = 1 + xi
    let zeta = if t.contains_key("softening_xi") {
        if t.contains_key("softening_zeta") {
            ctx.err("[material]", "give softening_zeta or softening_xi, not both");
        }
        1.0 + ctx.number(t, "[material]", "softening_xi", Some(0.0))
    } else {
        ctx.number(t, "[material]", "softening_zeta", Some(1.0))
    };
    let displacement_order = ctx.integer(t, "[material]", "displacement_order", Some(2));
    if !(1..=3).contains(&displacement_order) {
        ctx.err("[material].displacement_order", "must be 1, 2 or 3");
    }
    let bbar = ctx.boolean(t, "[material]", "bbar", displacement_order == 1);
    let params = ElastoplasticParams { e, nu, sigma_y0, n_hard, zeta };
    if let Err(err) = params.validate() {
        if e.is_finite() && nu.is_finite() && sigma_y0.is_finite() {
            ctx.err("[material]", err);
        }
    }
    Some(MaterialConfig { params, displacement_order: displacement_order.clamp(1, 3) as u8, bbar })
}

fn parse_lattice(ctx: &mut Ctx, root: &toml::Table) -> LatticeConfig {
    let fallback = LatticeConfig { d_l: f64::NAN, v_h: 0.0, n_l: 1.0, temperature: 300.0 };
    let Some(t) = get_table(ctx, root, "lattice") else {
        ctx.err("[lattice]", "missing required block");
        return fallback;
    };
    ctx.check_keys(t, "[lattice]", &["D_L", "V_H", "N_L", "T"]);
    let d_l = ctx.quantity(t, "[lattice]", "D_L", Unit::Diffusivity, None);
    let v_h = ctx.quantity(t, "[lattice]", "V_H", Unit::MolarVolume, Some(0.0));
    let n_l = ctx.quantity(t, "[lattice]", "N_L", Unit::Concentration, None);
    let temperature = ctx.quantity(t, "[lattice]", "T", Unit::Temperature, Some(300.0));
    if d_l.is_finite() && d_l <= 0.0 {
        ctx.err("[lattice].D_L", "must be positive");
    }
    if n_l.is_finite() && n_l <= 0.0 {
        ctx.err("[lattice].N_L", "must be positive");
    }
    LatticeConfig { d_l, v_h, n_l, temperature }
}

fn parse_traps(ctx: &mut Ctx, root: &toml::Table, lattice: &LatticeConfig) -> Vec<TrapConfig> {
    let arr = match root.get("trap") {
        None => return Vec::new(),
        Some(Value::Array(a)) => a.clone(),
        Some(_) => {
            ctx.err("[[trap]]", "expected an array of tables");
            return Vec::new();
        }
    };
    let mut out = Vec::new();
    for (i, item) in arr.iter().enumerate() {
        let path = format!("[[trap]][{i}]");
        let Value::Table(t) = item else {
            ctx.err(&path, "expected a table");
            continue;
        };
        ctx.check_keys(
            t,
            &path,
            &[
                "label", "kinetics", "E_B", "E_t", "E_d", "kappa0", "lambda0", "ratio",
                "option", "strain_term", "density", "N_T", "rho0", "gamma_disl",
                "lattice_param", "multiplicity", "mobile",
            ],
        );
        let label = ctx.string(t, &path, "label", Some(&format!("trap-{}", i + 1)));
        let density_kind = ctx.string(t, &path, "density", Some("constant"));
        let density = match density_kind.as_str() {
            "constant" => DensityLaw::Constant {
                n_t: ctx.quantity(t, &path, "N_T", Unit::Concentration, None),
            },
            "kumnick" => DensityLaw::Kumnick,
            "dislocation" => DensityLaw::Dislocation {
                rho0: ctx.quantity(t, &path, "rho0", Unit::AreaDensity, None),
                gamma: ctx.quantity(t, &path, "gamma_disl", Unit::AreaDensity, None),
                lattice_param: ctx.quantity(t, &path, "lattice_param", Unit::Length, None),
            },
            other => {
                ctx.err(&format!("{path}.density"), format!("unknown law `{other}`"));
                DensityLaw::Constant { n_t: f64::NAN }
            }
        };
        let multiplicity = ctx.number(t, &path, "multiplicity", Some(1.0));
        let mobile = ctx.boolean(t, &path, "mobile", false);
        let kinetics_kind = ctx.string(t, &path, "kinetics", Some("oriani"));
        let (kinetics, e_b, ratio) = match kinetics_kind.as_str() {
            "oriani" => {
                let e_b = ctx.quantity(t, &path, "E_B", Unit::EnergyPerMole, None);
                let ratio = ctx.number(t, &path, "ratio", Some(1.0));
                (TrapKinetics::Oriani, e_b, ratio)
            }
            "mcnabb-foster" => {
                let kappa0 = ctx.quantity(t, &path, "kappa0", Unit::Frequency, None);
                let option = match ctx.integer(t, &path, "option", Some(2)) {
                    1 => KineticOption::OptionOne,
                    2 => KineticOption::OptionTwo,
                    _ => {
                        ctx.err(&format!("{path}.option"), "must be 1 or 2");
                        KineticOption::OptionTwo
                    }
                };
                if t.contains_key("E_t") || t.contains_key("E_d") {
                    // temperature-dependent frequencies (thermal desorption)
                    let e_t = ctx.quantity(t, &path, "E_t", Unit::EnergyPerMole, Some(0.0));
                    let e_d = ctx.quantity(t, &path, "E_d", Unit::EnergyPerMole, None);
                    let lambda0 = ctx.quantity(t, &path, "lambda0", Unit::Frequency, None);
                    (
                        TrapKinetics::McNabbFoster { kappa0, lambda0, e_t, e_d, option },
                        e_d - e_t,
                        kappa0 / lambda0,
                    )
                } else {
                    // isothermal: lambda0 given directly or from E_B
                    let lambda0 = if t.contains_key("lambda0") {
                        ctx.quantity(t, &path, "lambda0", Unit::Frequency, None)
                    } else {
                        let e_b = ctx.quantity(t, &path, "E_B", Unit::EnergyPerMole, None);
                        kappa0 / (e_b / (GAS_CONSTANT * lattice.temperature)).exp()
                    };
                    (
                        TrapKinetics::McNabbFoster { kappa0, lambda0, e_t: 0.0, e_d: 0.0, option },
                        0.0,
                        kappa0 / lambda0,
                    )
                }
            }
            other => {
                ctx.err(&format!("{path}.kinetics"), format!("unknown kinetics `{other}`"));
                (TrapKinetics::Oriani, f64::NAN, 1.0)
            }
        };
        out.push(TrapConfig {
            spec: TrapSpec { label, kinetics, e_b, ratio, density, multiplicity, mobile },
        });
    }
    out
}

fn parse_transport(ctx: &mut Ctx, root: &toml::Table) -> TransportConfig {
    let defaults = TransportConfig {
        formulation: FormulationConfig::Cl,
        concentration_order: 1,
        initial: InitialConc::CEnvTimes(1.0),
        traps_in_equilibrium: true,
        clamp: true,
        krom: true,
        variant: OccupancyVariant::KtMinusOne,
        dislocation: None,
        option1_strain_term: true,
    };
    let Some(t) = get_table(ctx, root, "transport") else {
        return defaults;
    };
    ctx.check_keys(
        t,
        "[transport]",
        &[
            "formulation", "concentration_order", "initial", "traps_in_equilibrium", "clamp",
            "krom", "occupancy_variant", "dislocation_flux", "option1_strain_term",
        ],
    );
    let formulation = match ctx.string(t, "[transport]", "formulation", Some("cl")).as_str() {
        "cl" => FormulationConfig::Cl,
        "mu" => FormulationConfig::Mu,
        other => {
            ctx.err("[transport].formulation", format!("unknown formulation `{other}`"));
            FormulationConfig::Cl
        }
    };
    let concentration_order = ctx.integer(t, "[transport]", "concentration_order", Some(1));
    if !(1..=3).contains(&concentration_order) {
        ctx.err("[transport].concentration_order", "must be 1, 2 or 3");
    }
    let initial = match t.get("initial") {
        None => InitialConc::CEnvTimes(1.0),
        Some(Value::String(s)) => {
            let s = s.trim();
            if s == "C_env" {
                InitialConc::CEnvTimes(1.0)
            } else if let Some(prefix) = s.strip_suffix("* C_env").or(s.strip_suffix("*C_env")) {
                match prefix.trim().parse::<f64>() {
                    Ok(v) => InitialConc::CEnvTimes(v),
                    Err(_) => {
                        ctx.err("[transport].initial", "bad multiplier in `<x> * C_env`");
                        InitialConc::CEnvTimes(1.0)
                    }
                }
            } else {
                match parse_quantity(s, Unit::Concentration) {
                    Ok(v) => InitialConc::Value(v),
                    Err(e) => {
                        ctx.err("[transport].initial", e);
                        InitialConc::Value(f64::NAN)
                    }
                }
            }
        }
        Some(Value::Float(v)) if *v == 0.0 => InitialConc::Value(0.0),
        Some(Value::Integer(v)) if *v == 0 => InitialConc::Value(0.0),
        Some(_) => {
            ctx.err(
                "[transport].initial",
                "expected a concentration string, `<x> * C_env`, or 0",
            );
            InitialConc::CEnvTimes(1.0)
        }
    };
    let variant = match ctx
        .string(t, "[transport]", "occupancy_variant", Some("kt-minus-one"))
        .as_str()
    {
        "kt-minus-one" => OccupancyVariant::KtMinusOne,
        "kt" => OccupancyVariant::Kt,
        other => {
            ctx.err("[transport].occupancy_variant", format!("unknown variant `{other}`"));
            OccupancyVariant::KtMinusOne
        }
    };
    let dislocation = t.get("dislocation_flux").and_then(|v| match v {
        Value::Table(dt) => {
            let path = "[transport.dislocation_flux]";
            ctx.check_keys(dt, path, &["gamma", "burgers", "lattice_param", "n_d", "direction"]);
            let gamma = match dt.get("gamma") {
                Some(Value::String(s)) if s == "bcc" => 2f64.sqrt(),
                Some(Value::String(s)) if s == "fcc" => 3f64.sqrt(),
                Some(Value::Float(v)) => *v,
                Some(Value::Integer(v)) => *v as f64,
                None => 2f64.sqrt(),
                _ => {
                    ctx.err(&format!("{path}.gamma"), "expected `bcc`, `fcc` or a number");
                    2f64.sqrt()
                }
            };
            let burgers = ctx.quantity(dt, path, "burgers", Unit::Length, None);
            let lattice_param = ctx.quantity(dt, path, "lattice_param", Unit::Length, None);
            let n_d = ctx.number(dt, path, "n_d", Some(1.0));
            let direction = match dt.get("direction") {
                None => [1.0, 0.0],
                Some(Value::Array(a)) if a.len() == 2 => {
                    let get = |v: &Value| match v {
                        Value::Float(f) => *f,
                        Value::Integer(i) => *i as f64,
                        _ => f64::NAN,
                    };
                    let d = [get(&a[0]), get(&a[1])];
                    let norm = (d[0] * d[0] + d[1] * d[1]).sqrt();
                    if !(norm.is_finite() && norm > 0.0) {
                        ctx.err(&format!("{path}.direction"), "expected a nonzero 2-vector");
                        [1.0, 0.0]
                    } else {
                        [d[0] / norm, d[1] / norm]
                    }
                }
                Some(_) => {
                    ctx.err(&format!("{path}.direction"), "expected a 2-vector");
                    [1.0, 0.0]
                }
            };
            Some(DislocationTransportSpec { gamma, burgers, lattice_param, n_d, direction })
        }
        _ => {
            ctx.err("[transport.dislocation_flux]", "expected a table");
            None
        }
    });
    TransportConfig {
        formulation,
        concentration_order: concentration_order.clamp(1, 3) as u8,
        initial,
        traps_in_equilibrium: ctx.boolean(t, "[transport]", "traps_in_equilibrium", true),
        clamp: ctx.boolean(t, "[transport]", "clamp", true),
        krom: ctx.boolean(t, "[transport]", "krom", true),
        variant,
        dislocation,
        option1_strain_term: ctx.boolean(t, "[transport]", "option1_strain_term", true),
    }
}

fn parse_loading(ctx: &mut Ctx, root: &toml::Table) -> Option<LoadingConfig> {
    let t = get_table(ctx, root, "loading")?;
    ctx.check_keys(t, "[loading]", &["K_I", "t_load", "t_end", "stress_source"]);
    let k_max = ctx.quantity(t, "[loading]", "K_I", Unit::StressIntensity, None);
    let t_load = ctx.quantity(t, "[loading]", "t_load", Unit::Time, None);
    let t_end = ctx.quantity(t, "[loading]", "t_end", Unit::Time, Some(t_load));
    let source_str = ctx.string(t, "[loading]", "stress_source", Some("fe"));
    let stress_source = if source_str == "fe" {
        StressSourceConfig::Fe
    } else if source_str == "analytical" {
        StressSourceConfig::Analytical
    } else if let Some(path) = source_str.strip_prefix("table:") {
        StressSourceConfig::Table { path: path.to_string() }
    } else {
        ctx.err(
            "[loading].stress_source",
            format!("unknown source `{source_str}` (fe | analytical | table:<path>)"),
        );
        StressSourceConfig::Fe
    };
    Some(LoadingConfig { k_max, t_load, t_end, stress_source })
}

fn parse_boundaries(ctx: &mut Ctx, root: &toml::Table) -> Vec<BoundaryConfig> {
    let arr = match root.get("boundary") {
        None => return Vec::new(),
        Some(Value::Array(a)) => a.clone(),
        Some(_) => {
            ctx.err("[[boundary]]", "expected an array of tables");
            return Vec::new();
        }
    };
    let mut out = Vec::new();
    for (i, item) in arr.iter().enumerate() {
        let path = format!("[[boundary]][{i}]");
        let Value::Table(t) = item else {
            ctx.err(&path, "expected a table");
            continue;
        };
        let tag = ctx.string(t, &path, "tag", None);
        let kind = ctx.string(t, &path, "kind", None);
        let kind = match kind.as_str() {
            "dirichlet" => {
                ctx.check_keys(
                    t,
                    &path,
                    &[
                        "tag", "kind", "C_env", "solubility", "pressure", "ramp", "t_load",
                        "stress_dependent",
                    ],
                );
                let c_env = if t.contains_key("C_env") {
                    ctx.quantity(t, &path, "C_env", Unit::Concentration, None)
                } else if t.contains_key("solubility") && t.contains_key("pressure") {
                    let k = ctx.number(t, &path, "solubility", None);
                    let p = ctx.quantity(t, &path, "pressure", Unit::Pressure, None);
                    GasEquilibriumSpec::from_sieverts(k, p)
                } else {
                    ctx.err(&path, "give either C_env or solubility + pressure");
                    f64::NAN
                };
                let ramp = match ctx.string(t, &path, "ramp", Some("none")).as_str() {
                    "none" => Ramp::None,
                    "sqrt" => Ramp::Sqrt,
                    "linear" => Ramp::Linear,
                    other => {
                        ctx.err(&format!("{path}.ramp"), format!("unknown ramp `{other}`"));
                        Ramp::None
                    }
                };
                let t_load = ctx.quantity(t, &path, "t_load", Unit::Time, Some(1.0));
                BoundaryKindConfig::Dirichlet(GasEquilibriumSpec {
                    c_env,
                    ramp,
                    t_load,
                    stress_dependent: ctx.boolean(t, &path, "stress_dependent", false),
                })
            }
            "her" => {
                ctx.check_keys(
                    t,
                    &path,
                    &["tag", "kind", "k_abs", "k_des", "k_c", "k_r_chem", "k_r_elec"],
                );
                let spec = HerSpec {
                    k_abs: ctx.quantity(t, &path, "k_abs", Unit::Velocity, None),
                    k_des: ctx.quantity(t, &path, "k_des", Unit::Velocity, None),
                    k_c: ctx.quantity(t, &path, "k_c", Unit::SurfaceRate, None),
                    k_r_chem: ctx.quantity(t, &path, "k_r_chem", Unit::SurfaceRate, Some(0.0)),
                    k_r_elec: ctx.quantity(t, &path, "k_r_elec", Unit::SurfaceRate, Some(0.0)),
                };
                if spec.k_abs.is_finite() {
                    if let Err(e) = spec.validate() {
                        ctx.err(&path, e);
                    }
                }
                BoundaryKindConfig::Her(spec)
            }
            "insulated" => {
                ctx.check_keys(t, &path, &["tag", "kind", "consistent"]);
                let consistent = ctx.boolean(t, &path, "consistent", true);
                BoundaryKindConfig::Insulated(if consistent {
                    Insulation::Consistent
                } else {
                    Insulation::DiffusiveOnly
                })
            }
            other => {
                ctx.err(
                    &format!("{path}.kind"),
                    format!("unknown kind `{other}` (dirichlet | her | insulated)"),
                );
                BoundaryKindConfig::Insulated(Insulation::Consistent)
            }
        };
        out.push(BoundaryConfig { tag, kind });
    }
    out
}

fn parse_solver(ctx: &mut Ctx, root: &toml::Table) -> SolverConfig {
    let mut c = StepController::default();
    let Some(t) = get_table(ctx, root, "solver") else {
        return SolverConfig { controller: c };
    };
    ctx.check_keys(
        t,
        "[solver]",
        &[
            "bdf_order", "rel_tol", "dt_init", "dt_min", "dt_max", "coupling",
            "multipass_tol", "max_passes", "max_newton", "newton_tol", "safety",
        ],
    );
    let order = ctx.integer(t, "[solver]", "bdf_order", Some(2));
    if !(1..=2).contains(&order) {
        ctx.err("[solver].bdf_order", "must be 1 or 2");
    }
    c.order = order.clamp(1, 2) as u8;
    c.rel_tol = ctx.number(t, "[solver]", "rel_tol", Some(1e-4));
    if c.rel_tol <= 0.0 {
        ctx.err("[solver].rel_tol", "must be positive");
    }
    c.dt_init = ctx.quantity(t, "[solver]", "dt_init", Unit::Time, Some(1e-3));
    c.dt_min = ctx.quantity(t, "[solver]", "dt_min", Unit::Time, Some(1e-12));
    c.dt_max = ctx.quantity(t, "[solver]", "dt_max", Unit::Time, Some(f64::INFINITY));
    if c.dt_min > c.dt_max {
        ctx.err("[solver]", "dt_min must not exceed dt_max");
    }
    c.coupling = match ctx.string(t, "[solver]", "coupling", Some("staggered-single")).as_str() {
        "monolithic" => Coupling::Monolithic,
        "staggered-single" => Coupling::StaggeredSingle,
        "staggered-multi" => Coupling::StaggeredMulti,
        other => {
            ctx.err("[solver].coupling", format!("unknown coupling `{other}`"));
            Coupling::StaggeredSingle
        }
    };
    c.multipass_tol = ctx.number(t, "[solver]", "multipass_tol", Some(1e-4));
    c.max_passes = ctx.integer(t, "[solver]", "max_passes", Some(10)).max(1) as usize;
    c.max_newton = ctx.integer(t, "[solver]", "max_newton", Some(25)).max(1) as usize;
    c.newton_tol = ctx.number(t, "[solver]", "newton_tol", Some(1e-6));
    c.safety = ctx.number(t, "[solver]", "safety", Some(0.9));
    SolverConfig { controller: c }
}

fn parse_output(ctx: &mut Ctx, root: &toml::Table) -> OutputConfig {
    let defaults = OutputConfig { times: Vec::new(), fields: true, stats: true, linecuts: Vec::new() };
    let Some(t) = get_table(ctx, root, "output") else {
        return defaults;
    };
    ctx.check_keys(t, "[output]", &["times", "fields", "stats", "linecut"]);
    let times = match t.get("times") {
        None => Vec::new(),
        Some(Value::Array(a)) => a
            .iter()
            .enumerate()
            .filter_map(|(i, v)| match v {
                Value::String(s) => match parse_quantity(s, Unit::Time) {
                    Ok(t) => Some(t),
                    Err(e) => {
                        ctx.err(&format!("[output].times[{i}]"), e);
                        None
                    }
                },
                _ => {
                    ctx.err(&format!("[output].times[{i}]"), "expected a time string");
                    None
                }
            })
            .collect(),
        Some(_) => {
            ctx.err("[output].times", "expected an array of time strings");
            Vec::new()
        }
    };
    let mut linecuts = Vec::new();
    if let Some(v) = t.get("linecut") {
        let Value::Array(arr) = v else {
            ctx.err("[[output.linecut]]", "expected an array of tables");
            return OutputConfig { times, fields: true, stats: true, linecuts };
        };
        for (i, item) in arr.iter().enumerate() {
            let path = format!("[[output.linecut]][{i}]");
            let Value::Table(lt) = item else {
                ctx.err(&path, "expected a table");
                continue;
            };
            ctx.check_keys(lt, &path, &["kind", "samples", "normalize", "from", "to"]);
            let samples = ctx.integer(lt, &path, "samples", Some(200));
            if samples < 2 {
                ctx.err(&format!("{path}.samples"), "need at least 2 samples");
            }
            let normalize = ctx.boolean(lt, &path, "normalize", true);
            match ctx.string(lt, &path, "kind", Some("crack-plane")).as_str() {
                "crack-plane" => linecuts.push(LineCutConfig::CrackPlane {
                    samples: samples.max(2) as usize,
                    normalize,
                }),
                "segment" => {
                    let vec2 = |ctx: &mut Ctx, key: &str| -> [f64; 2] {
                        match lt.get(key) {
                            Some(Value::Array(a)) if a.len() == 2 => {
                                let get = |v: &Value| match v {
                                    Value::Float(f) => *f,
                                    Value::Integer(n) => *n as f64,
                                    _ => f64::NAN,
                                };
                                [get(&a[0]), get(&a[1])]
                            }
                            _ => {
                                ctx.err(&format!("{path}.{key}"), "expected [x, y] in metres");
                                [f64::NAN; 2]
                            }
                        }
                    };
                    let from = vec2(ctx, "from");
                    let to = vec2(ctx, "to");
                    linecuts.push(LineCutConfig::Segment {
                        from,
                        to,
                        samples: samples.max(2) as usize,
                        normalize,
                    });
                }
                other => ctx.err(&format!("{path}.kind"), format!("unknown kind `{other}`")),
            }
        }
    }
    OutputConfig {
        times,
        fields: ctx.boolean(t, "[output]", "fields", true),
        stats: ctx.boolean(t, "[output]", "stats", true),
        linecuts,
    }
}

fn parse_tds(ctx: &mut Ctx, root: &toml::Table) -> Option<TdsBlockConfig> {
    let t = get_table(ctx, root, "tds")?;
    ctx.check_keys(t, "[tds]", &["T0", "phi", "T_end", "sample", "D_L0", "E_L", "C_L0"]);
    let phi = ctx.quantity(t, "[tds]", "phi", Unit::HeatingRate, None);
    if phi.is_finite() && phi <= 0.0 {
        ctx.err("[tds].phi", "heating rate must be positive");
    }
    Some(TdsBlockConfig {
        t0: ctx.quantity(t, "[tds]", "T0", Unit::Temperature, None),
        phi,
        t_end: ctx.quantity(t, "[tds]", "T_end", Unit::Temperature, None),
        sample_dt: ctx.quantity(t, "[tds]", "sample", Unit::Temperature, Some(1.0)),
        d_l0: ctx.quantity(t, "[tds]", "D_L0", Unit::Diffusivity, None),
        e_l: ctx.quantity(t, "[tds]", "E_L", Unit::EnergyPerMole, None),
        c_l0: ctx.quantity(t, "[tds]", "C_L0", Unit::Concentration, None),
    })
}

impl RunConfig {
    /// Canonical TOML serialization; `parse_config(serialize(c)) == c`.
    pub fn to_toml_string(&self) -> String {
        let mut s = String::new();
        let q = |v: f64| format!("{v:.17e}");
        writeln!(s, "name = {:?}", self.name).unwrap();
        match &self.geometry {
            GeometryConfig::BoundaryLayer { outer_radius, tip_opening, refinement } => {
                writeln!(s, "\n[geometry]\nkind = \"boundary-layer\"").unwrap();
                writeln!(s, "outer_radius = \"{} m\"", q(*outer_radius)).unwrap();
                writeln!(s, "tip_opening = \"{} m\"", q(*tip_opening)).unwrap();
                writeln!(s, "refinement = {refinement}").unwrap();
            }
            GeometryConfig::Interval { length, elements, grading } => {
                writeln!(s, "\n[geometry]\nkind = \"interval\"").unwrap();
                writeln!(s, "length = \"{} m\"", q(*length)).unwrap();
                writeln!(s, "elements = {elements}").unwrap();
                writeln!(s, "grading = {}", q(*grading)).unwrap();
            }
            GeometryConfig::Import { path } => {
                writeln!(s, "\n[geometry]\nkind = \"import\"\npath = {path:?}").unwrap();
            }
        }
        if let Some(m) = &self.material {
            writeln!(s, "\n[material]").unwrap();
            writeln!(s, "E = \"{} Pa\"", q(m.params.e)).unwrap();
            writeln!(s, "nu = {}", q(m.params.nu)).unwrap();
            writeln!(s, "sigma_y0 = \"{} Pa\"", q(m.params.sigma_y0)).unwrap();
            writeln!(s, "hardening_exponent = {}", q(m.params.n_hard)).unwrap();
            writeln!(s, "softening_zeta = {}", q(m.params.zeta)).unwrap();
            writeln!(s, "displacement_order = {}", m.displacement_order).unwrap();
            writeln!(s, "bbar = {}", m.bbar).unwrap();
        }
        writeln!(s, "\n[lattice]").unwrap();
        writeln!(s, "D_L = \"{} m^2/s\"", q(self.lattice.d_l)).unwrap();
        writeln!(s, "V_H = \"{} m^3/mol\"", q(self.lattice.v_h)).unwrap();
        writeln!(s, "N_L = \"{} mol/m^3\"", q(self.lattice.n_l)).unwrap();
        writeln!(s, "T = \"{} K\"", q(self.lattice.temperature)).unwrap();
        for trap in &self.traps {
            let tr = &trap.spec;
            writeln!(s, "\n[[trap]]").unwrap();
            writeln!(s, "label = {:?}", tr.label).unwrap();
            match tr.kinetics {
                TrapKinetics::Oriani => {
                    writeln!(s, "kinetics = \"oriani\"").unwrap();
                    writeln!(s, "E_B = \"{} J/mol\"", q(tr.e_b)).unwrap();
                    writeln!(s, "ratio = {}", q(tr.ratio)).unwrap();
                }
                TrapKinetics::McNabbFoster { kappa0, lambda0, e_t, e_d, option } => {
                    writeln!(s, "kinetics = \"mcnabb-foster\"").unwrap();
                    writeln!(s, "kappa0 = \"{} 1/s\"", q(kappa0)).unwrap();
                    writeln!(s, "lambda0 = \"{} 1/s\"", q(lambda0)).unwrap();
                    writeln!(s, "E_t = \"{} J/mol\"", q(e_t)).unwrap();
                    writeln!(s, "E_d = \"{} J/mol\"", q(e_d)).unwrap();
                    let opt = match option {
                        KineticOption::OptionOne => 1,
                        KineticOption::OptionTwo => 2,
                    };
                    writeln!(s, "option = {opt}").unwrap();
                }
            }
            match tr.density {
                DensityLaw::Constant { n_t } => {
                    writeln!(s, "density = \"constant\"").unwrap();
                    writeln!(s, "N_T = \"{} mol/m^3\"", q(n_t)).unwrap();
                }
                DensityLaw::Kumnick => writeln!(s, "density = \"kumnick\"").unwrap(),
                DensityLaw::Dislocation { rho0, gamma, lattice_param } => {
                    writeln!(s, "density = \"dislocation\"").unwrap();
                    writeln!(s, "rho0 = \"{} 1/m^2\"", q(rho0)).unwrap();
                    writeln!(s, "gamma_disl = \"{} 1/m^2\"", q(gamma)).unwrap();
                    writeln!(s, "lattice_param = \"{} m\"", q(lattice_param)).unwrap();
                }
            }
            writeln!(s, "multiplicity = {}", q(tr.multiplicity)).unwrap();
            writeln!(s, "mobile = {}", tr.mobile).unwrap();
        }
        writeln!(s, "\n[transport]").unwrap();
        writeln!(
            s,
            "formulation = \"{}\"",
            match self.transport.formulation {
                FormulationConfig::Cl => "cl",
                FormulationConfig::Mu => "mu",
            }
        )
        .unwrap();
        writeln!(s, "concentration_order = {}", self.transport.concentration_order).unwrap();
        match &self.transport.initial {
            InitialConc::Value(v) => writeln!(s, "initial = \"{} mol/m^3\"", q(*v)).unwrap(),
            InitialConc::CEnvTimes(f) => writeln!(s, "initial = \"{} * C_env\"", q(*f)).unwrap(),
        }
        writeln!(s, "traps_in_equilibrium = {}", self.transport.traps_in_equilibrium).unwrap();
        writeln!(s, "clamp = {}", self.transport.clamp).unwrap();
        writeln!(s, "krom = {}", self.transport.krom).unwrap();
        writeln!(s, "option1_strain_term = {}", self.transport.option1_strain_term).unwrap();
        writeln!(
            s,
            "occupancy_variant = \"{}\"",
            match self.transport.variant {
                OccupancyVariant::KtMinusOne => "kt-minus-one",
                OccupancyVariant::Kt => "kt",
            }
        )
        .unwrap();
        if let Some(d) = &self.transport.dislocation {
            writeln!(s, "\n[transport.dislocation_flux]").unwrap();
            writeln!(s, "gamma = {}", q(d.gamma)).unwrap();
            writeln!(s, "burgers = \"{} m\"", q(d.burgers)).unwrap();
            writeln!(s, "lattice_param = \"{} m\"", q(d.lattice_param)).unwrap();
            writeln!(s, "n_d = {}", q(d.n_d)).unwrap();
            writeln!(s, "direction = [{}, {}]", q(d.direction[0]), q(d.direction[1])).unwrap();
        }
        if let Some(l) = &self.loading {
            writeln!(s, "\n[loading]").unwrap();
            writeln!(s, "K_I = \"{} Pa*m^0.5\"", q(l.k_max)).unwrap();
            writeln!(s, "t_load = \"{} s\"", q(l.t_load)).unwrap();
            writeln!(s, "t_end = \"{} s\"", q(l.t_end)).unwrap();
            let src = match &l.stress_source {
                StressSourceConfig::Fe => "fe".to_string(),
                StressSourceConfig::Analytical => "analytical".to_string(),
                StressSourceConfig::Table { path } => format!("table:{path}"),
            };
            writeln!(s, "stress_source = \"{src}\"").unwrap();
        }
        for b in &self.boundaries {
            writeln!(s, "\n[[boundary]]").unwrap();
            writeln!(s, "tag = {:?}", b.tag).unwrap();
            match &b.kind {
                BoundaryKindConfig::Dirichlet(spec) => {
                    writeln!(s, "kind = \"dirichlet\"").unwrap();
                    writeln!(s, "C_env = \"{} mol/m^3\"", q(spec.c_env)).unwrap();
                    let ramp = match spec.ramp {
                        Ramp::None => "none",
                        Ramp::Sqrt => "sqrt",
                        Ramp::Linear => "linear",
                    };
                    writeln!(s, "ramp = \"{ramp}\"").unwrap();
                    writeln!(s, "t_load = \"{} s\"", q(spec.t_load)).unwrap();
                    writeln!(s, "stress_dependent = {}", spec.stress_dependent).unwrap();
                }
                BoundaryKindConfig::Her(spec) => {
                    writeln!(s, "kind = \"her\"").unwrap();
                    writeln!(s, "k_abs = \"{} m/s\"", q(spec.k_abs)).unwrap();
                    writeln!(s, "k_des = \"{} m/s\"", q(spec.k_des)).unwrap();
                    writeln!(s, "k_c = \"{} mol/m^2/s\"", q(spec.k_c)).unwrap();
                    writeln!(s, "k_r_chem = \"{} mol/m^2/s\"", q(spec.k_r_chem)).unwrap();
                    writeln!(s, "k_r_elec = \"{} mol/m^2/s\"", q(spec.k_r_elec)).unwrap();
                }
                BoundaryKindConfig::Insulated(ins) => {
                    writeln!(s, "kind = \"insulated\"").unwrap();
                    writeln!(s, "consistent = {}", *ins == Insulation::Consistent).unwrap();
                }
            }
        }
        let c = &self.solver.controller;
        writeln!(s, "\n[solver]").unwrap();
        writeln!(s, "bdf_order = {}", c.order).unwrap();
        writeln!(s, "rel_tol = {}", q(c.rel_tol)).unwrap();
        writeln!(s, "dt_init = \"{} s\"", q(c.dt_init)).unwrap();
        writeln!(s, "dt_min = \"{} s\"", q(c.dt_min)).unwrap();
        if c.dt_max.is_finite() {
            writeln!(s, "dt_max = \"{} s\"", q(c.dt_max)).unwrap();
        }
        let coupling = match c.coupling {
            Coupling::Monolithic => "monolithic",
            Coupling::StaggeredSingle => "staggered-single",
            Coupling::StaggeredMulti => "staggered-multi",
        };
        writeln!(s, "coupling = \"{coupling}\"").unwrap();
        writeln!(s, "multipass_tol = {}", q(c.multipass_tol)).unwrap();
        writeln!(s, "max_passes = {}", c.max_passes).unwrap();
        writeln!(s, "max_newton = {}", c.max_newton).unwrap();
        writeln!(s, "newton_tol = {}", q(c.newton_tol)).unwrap();
        writeln!(s, "safety = {}", q(c.safety)).unwrap();
        writeln!(s, "\n[output]").unwrap();
        let times: Vec<String> = self.output.times.iter().map(|t| format!("\"{} s\"", q(*t))).collect();
        writeln!(s, "times = [{}]", times.join(", ")).unwrap();
        writeln!(s, "fields = {}", self.output.fields).unwrap();
        writeln!(s, "stats = {}", self.output.stats).unwrap();
        for cut in &self.output.linecuts {
            writeln!(s, "\n[[output.linecut]]").unwrap();
            match cut {
                LineCutConfig::CrackPlane { samples, normalize } => {
                    writeln!(s, "kind = \"crack-plane\"").unwrap();
                    writeln!(s, "samples = {samples}").unwrap();
                    writeln!(s, "normalize = {normalize}").unwrap();
                }
                LineCutConfig::Segment { from, to, samples, normalize } => {
                    writeln!(s, "kind = \"segment\"").unwrap();
                    writeln!(s, "from = [{}, {}]", q(from[0]), q(from[1])).unwrap();
                    writeln!(s, "to = [{}, {}]", q(to[0]), q(to[1])).unwrap();
                    writeln!(s, "samples = {samples}").unwrap();
                    writeln!(s, "normalize = {normalize}").unwrap();
                }
            }
        }
        if let Some(t) = &self.tds {
            writeln!(s, "\n[tds]").unwrap();
            writeln!(s, "T0 = \"{} K\"", q(t.t0)).unwrap();
            writeln!(s, "phi = \"{} K/s\"", q(t.phi)).unwrap();
            writeln!(s, "T_end = \"{} K\"", q(t.t_end)).unwrap();
            writeln!(s, "sample = \"{} K\"", q(t.sample_dt)).unwrap();
            writeln!(s, "D_L0 = \"{} m^2/s\"", q(t.d_l0)).unwrap();
            writeln!(s, "E_L = \"{} J/mol\"", q(t.e_l)).unwrap();
            writeln!(s, "C_L0 = \"{} mol/m^3\"", q(t.c_l0)).unwrap();
        }
        s
    }

    /// Resolves the initial lattice concentration against the boundary set.
    pub fn initial_concentration(&self) -> f64 {
        match self.transport.initial {
            InitialConc::Value(v) => v,
            InitialConc::CEnvTimes(f) => {
                let c_env = self
                    .boundaries
                    .iter()
                    .find_map(|b| match &b.kind {
                        BoundaryKindConfig::Dirichlet(spec) => Some(spec.c_env),
                        _ => None,
                    })
                    .unwrap_or(0.0);
                f * c_env
            }
        }
    }
}
