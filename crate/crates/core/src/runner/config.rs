//! Scenario files: `[section]` headers followed by `key = value` lines.
//! `#` starts a comment. Lists are comma separated.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;

use crate::error::{Error, Result};
use crate::flux::{FluxKind, KineticCfl};
use crate::free_energy::{ExternalPotential, FreeEnergyModel, InteractionKernel, Nonlinearity, PressureLaw};
use crate::grid::{Grid, DEFAULT_EPS_VAC};
use crate::integrator::{Order, SchemeConfig};
use crate::reconstruction::{Communication, HReconstruction, InterfaceRule};

const SECTIONS: [&str; 6] = ["grid", "model", "damping", "scheme", "initial", "run"];

const KEYS: [(&str, &[&str]); 6] = [
    ("grid", &["a", "b", "cells"]),
    (
        "model",
        &[
            "pressure",
            "m",
            "sigma",
            "potential",
            "a",
            "b",
            "c",
            "kernel",
            "alpha",
            "rod_length",
            "nonlinearity",
        ],
    ),
    ("damping", &["gamma", "communication", "psi_value"]),
    (
        "scheme",
        &[
            "order",
            "flux",
            "interface",
            "h_reconstruction",
            "cfl",
            "eps_vac",
            "kinetic_cfl",
            "force",
        ],
    ),
    (
        "initial",
        &[
            "profile",
            "mass",
            "offset",
            "amplitude",
            "period",
            "centers",
            "variances",
            "weights",
            "momentum",
            "momentum_amplitude",
            "momentum_period",
            "velocity",
            "exact",
            "source",
        ],
    ),
    (
        "run",
        &[
            "name",
            "t_end",
            "snapshot_every",
            "steady_tol",
            "max_steps",
            "stop_on_concentration",
            "cells",
            "reference_cells",
            "convergence_time",
            "mask",
            "mask_threshold",
            "mask_margin",
            "sigmas",
        ],
    ),
];

#[derive(Debug, Clone, PartialEq)]
pub enum Profile {
    /// `offset + amplitude cos(pi x / period)`
    Cosine { offset: f64, amplitude: f64, period: f64 },
    /// `offset + sum_k w_k exp(-(x - c_k)^2 / (2 v_k))`
    Gaussians {
        offset: f64,
        centers: Vec<f64>,
        variances: Vec<f64>,
        weights: Vec<f64>,
    },
    /// The discrete steady state of the model.
    Steady,
    /// A snapshot CSV written by this crate.
    File(PathBuf),
    /// Final state of another scenario.
    Chain(PathBuf),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MomentumProfile {
    Zero,
    /// `amplitude sin(pi x / period)`
    Sine {
        amplitude: f64,
        period: f64,
    },
    /// `rho times a constant velocity`
    Velocity(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExactSolution {
    None,
    /// The initial profile carried at the constant initial velocity.
    Translate,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InitialCondition {
    pub profile: Profile,
    pub mass: f64,
    pub momentum: MomentumProfile,
    pub exact: ExactSolution,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub a: f64,
    pub b: f64,
    pub cells: usize,
}

impl GridSpec {
    pub fn build(&self) -> Result<Grid> {
        Grid::uniform(self.a, self.b, self.cells)
    }

    pub fn with_cells(&self, cells: usize) -> Result<Grid> {
        Grid::uniform(self.a, self.b, cells)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaskSpec {
    pub threshold: f64,
    pub margin: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunSpec {
    pub cells: Vec<usize>,
    pub reference_cells: usize,
    /// Time at which convergence errors are measured.
    pub convergence_time: f64,
    pub mask: Option<MaskSpec>,
    pub sigmas: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub name: String,
    pub grid: GridSpec,
    pub model: FreeEnergyModel,
    pub scheme: SchemeConfig,
    pub initial: InitialCondition,
    pub run: RunSpec,
}

type Raw = BTreeMap<(String, String), (String, usize)>;

fn known(section: &str, key: &str) -> bool {
    KEYS.iter().any(|(s, ks)| *s == section && ks.contains(&key))
}

fn tokenize(text: &str) -> Result<Raw> {
    let mut raw = Raw::new();
    let mut section: Option<String> = None;
    for (k, line) in text.lines().enumerate() {
        let no = k + 1;
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('[') {
            let name = rest
                .strip_suffix(']')
                .ok_or_else(|| Error::config(no, format!("malformed section header `{line}`")))?
                .trim();
            if !SECTIONS.contains(&name) {
                return Err(Error::config(no, format!("unknown section `{name}`")));
            }
            section = Some(name.to_string());
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::config(no, format!("expected `key = value`, got `{line}`")))?;
        let (key, value) = (key.trim(), value.trim());
        let sec = section
            .as_deref()
            .ok_or_else(|| Error::config(no, format!("key `{key}` appears before any section")))?;
        if !known(sec, key) {
            return Err(Error::config(no, format!("unknown key `{key}` in [{sec}]")));
        }
        if raw
            .insert((sec.to_string(), key.to_string()), (value.to_string(), no))
            .is_some()
        {
            return Err(Error::config(no, format!("duplicate key `{key}` in [{sec}]")));
        }
    }
    Ok(raw)
}

struct Reader {
    raw: Raw,
}

impl Reader {
    fn get(&self, sec: &str, key: &str) -> Option<&(String, usize)> {
        self.raw.get(&(sec.to_string(), key.to_string()))
    }

    fn line(&self, sec: &str, key: &str) -> usize {
        self.get(sec, key).map_or(0, |v| v.1)
    }

    fn str_or(&self, sec: &str, key: &str, default: &str) -> String {
        self.get(sec, key).map_or(default.to_string(), |v| v.0.clone())
    }

    fn required(&self, sec: &str, key: &str) -> Result<&str> {
        self.get(sec, key)
            .map(|v| v.0.as_str())
            .ok_or_else(|| Error::config(0, format!("missing mandatory key `{key}` in [{sec}]")))
    }

    fn parse<T: std::str::FromStr>(&self, sec: &str, key: &str, what: &str) -> Result<Option<T>> {
        match self.get(sec, key) {
            None => Ok(None),
            Some((v, line)) => v
                .parse::<T>()
                .map(Some)
                .map_err(|_| Error::config(*line, format!("`{key}` must be {what}, got `{v}`"))),
        }
    }

    fn f64_or(&self, sec: &str, key: &str, default: f64) -> Result<f64> {
        Ok(self.parse(sec, key, "a number")?.unwrap_or(default))
    }

    fn f64_req(&self, sec: &str, key: &str) -> Result<f64> {
        self.required(sec, key)?;
        Ok(self.parse(sec, key, "a number")?.expect("present"))
    }

    fn usize_or(&self, sec: &str, key: &str, default: usize) -> Result<usize> {
        Ok(self.parse(sec, key, "a nonnegative integer")?.unwrap_or(default))
    }

    fn bool_or(&self, sec: &str, key: &str, default: bool) -> Result<bool> {
        Ok(self.parse(sec, key, "true or false")?.unwrap_or(default))
    }

    fn list<T: std::str::FromStr>(&self, sec: &str, key: &str, what: &str) -> Result<Vec<T>> {
        match self.get(sec, key) {
            None => Ok(Vec::new()),
            Some((v, _)) if v.is_empty() => Ok(Vec::new()),
            Some((v, line)) => v
                .split(',')
                .map(|x| {
                    x.trim()
                        .parse::<T>()
                        .map_err(|_| Error::config(*line, format!("`{key}` must be a list of {what}, got `{v}`")))
                })
                .collect(),
        }
    }

    fn choice<'a>(&self, sec: &str, key: &str, default: &'a str, options: &[&'a str]) -> Result<String> {
        let v = self.str_or(sec, key, default);
        if options.contains(&v.as_str()) {
            Ok(v)
        } else {
            Err(Error::config(
                self.line(sec, key),
                format!("`{key}` must be one of {}, got `{v}`", options.join(", ")),
            ))
        }
    }
}

/// Parses and validates a scenario file.
pub fn parse_config(text: &str) -> Result<ScenarioConfig> {
    parse_config_with(text, &[])
}

/// As [`parse_config`], with `section.key = value` overrides applied on top.
pub fn parse_config_with(text: &str, overrides: &[(String, String)]) -> Result<ScenarioConfig> {
    let mut raw = tokenize(text)?;
    for (path, value) in overrides {
        let (sec, key) = path
            .split_once('.')
            .ok_or_else(|| Error::config(0, format!("override `{path}` must be `section.key`")))?;
        if !known(sec, key) {
            return Err(Error::config(0, format!("unknown key `{key}` in [{sec}]")));
        }
        raw.insert((sec.to_string(), key.to_string()), (value.trim().to_string(), 0));
    }
    build(&Reader { raw })
}

fn build(r: &Reader) -> Result<ScenarioConfig> {
    let grid = GridSpec {
        a: r.f64_req("grid", "a")?,
        b: r.f64_req("grid", "b")?,
        cells: {
            r.required("grid", "cells")?;
            r.usize_or("grid", "cells", 0)?
        },
    };
    grid.build()?;

    let model = parse_model(r)?;
    let scheme = parse_scheme(r, &model)?;
    let initial = parse_initial(r)?;
    let mask = if r.bool_or("run", "mask", false)? {
        Some(MaskSpec {
            threshold: r.f64_or("run", "mask_threshold", 1e-3)?,
            margin: r.usize_or("run", "mask_margin", 3)?,
        })
    } else {
        None
    };
    let run = RunSpec {
        cells: r.list("run", "cells", "integers")?,
        reference_cells: r.usize_or("run", "reference_cells", 25600)?,
        convergence_time: r.f64_or("run", "convergence_time", 0.3)?,
        mask,
        sigmas: r.list("run", "sigmas", "numbers")?,
    };
    if run.cells.windows(2).any(|w| w[1] != 2 * w[0]) {
        return Err(Error::config(
            r.line("run", "cells"),
            "`cells` must double at each entry",
        ));
    }
    if run.sigmas.iter().any(|s| !(*s > 0.0)) || run.sigmas.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::config(
            r.line("run", "sigmas"),
            "`sigmas` must be positive and decreasing",
        ));
    }
    Ok(ScenarioConfig {
        name: r.str_or("run", "name", "scenario"),
        grid,
        model,
        scheme,
        initial,
        run,
    })
}

fn parse_model(r: &Reader) -> Result<FreeEnergyModel> {
    let pressure = match r
        .choice("model", "pressure", "ideal", &["ideal", "power", "scaled_ideal"])?
        .as_str()
    {
        "ideal" => PressureLaw::IdealGas,
        "power" => PressureLaw::PowerLaw {
            m: r.f64_req("model", "m")?,
        },
        _ => PressureLaw::ScaledIdeal {
            sigma: r.f64_req("model", "sigma")?,
        },
    };
    let potential = match r
        .choice(
            "model",
            "potential",
            "none",
            &["none", "quadratic", "double_well", "quartic"],
        )?
        .as_str()
    {
        "none" => ExternalPotential::None,
        "quadratic" => ExternalPotential::Quadratic {
            a: r.f64_or("model", "a", 1.0)?,
        },
        "double_well" => ExternalPotential::DoubleWell {
            a: r.f64_req("model", "a")?,
            b: r.f64_req("model", "b")?,
        },
        _ => ExternalPotential::Quartic {
            c: r.f64_req("model", "c")?,
        },
    };
    let kernel_name = r.choice(
        "model",
        "kernel",
        "none",
        &["none", "quadratic", "homogeneous", "morse", "hard_rods"],
    )?;
    let model = if kernel_name == "hard_rods" {
        if pressure != PressureLaw::IdealGas {
            return Err(Error::config(
                r.line("model", "pressure"),
                "hard rods use the ideal pressure",
            ));
        }
        FreeEnergyModel::hard_rods(r.f64_or("model", "rod_length", 1.0)?, potential)
    } else {
        let kernel = match kernel_name.as_str() {
            "none" => InteractionKernel::None,
            "quadratic" => InteractionKernel::Quadratic,
            "homogeneous" => InteractionKernel::Homogeneous {
                alpha: r.f64_req("model", "alpha")?,
            },
            _ => InteractionKernel::Morse,
        };
        let nonlinearity = match r
            .choice("model", "nonlinearity", "identity", &["identity", "log_complement"])?
            .as_str()
        {
            "identity" => Nonlinearity::Identity,
            _ => Nonlinearity::LogComplement,
        };
        FreeEnergyModel::new(pressure)
            .with_potential(potential)
            .with_kernel(kernel)
            .with_nonlinearity(nonlinearity)
    };
    model
        .validate()
        .map_err(|e| Error::config(r.line("model", "pressure"), e.to_string()))?;
    Ok(model)
}

/// Laws without a vacuum state keep every positive density wet.
fn default_eps_vac(law: PressureLaw) -> f64 {
    if law.forms_vacuum() {
        DEFAULT_EPS_VAC
    } else {
        0.0
    }
}

fn parse_scheme(r: &Reader, model: &FreeEnergyModel) -> Result<SchemeConfig> {
    let psi = match r
        .choice("damping", "communication", "none", &["none", "standard", "constant"])?
        .as_str()
    {
        "none" => Communication::None,
        "standard" => Communication::Standard,
        _ => Communication::Constant(r.f64_or("damping", "psi_value", 1.0)?),
    };
    let order = match r.usize_or("scheme", "order", 1)? {
        1 => Order::First,
        2 => Order::Second,
        k => {
            return Err(Error::config(
                r.line("scheme", "order"),
                format!("`order` must be 1 or 2, got {k}"),
            ))
        }
    };
    let flux = match r.choice("scheme", "flux", "llf", &["llf", "kinetic"])?.as_str() {
        "llf" => FluxKind::Llf,
        _ => FluxKind::Kinetic,
    };
    let cfg = SchemeConfig {
        order,
        flux,
        rule: match r.choice("scheme", "interface", "max", &["max", "average"])?.as_str() {
            "max" => InterfaceRule::Max,
            _ => InterfaceRule::Average,
        },
        h_reconstruction: match r
            .choice("scheme", "h_reconstruction", "composite", &["composite", "direct"])?
            .as_str()
        {
            "composite" => HReconstruction::Composite,
            _ => HReconstruction::Direct,
        },
        cfl: r.f64_or("scheme", "cfl", 0.7)?,
        gamma: r.f64_or("damping", "gamma", 1.0)?,
        psi,
        eps_vac: r.f64_or("scheme", "eps_vac", default_eps_vac(model.pressure))?,
        t_end: r.f64_or("run", "t_end", 0.0)?,
        snapshot_every: r.parse("run", "snapshot_every", "a number")?,
        kinetic_cfl: match r
            .choice("scheme", "kinetic_cfl", "capped", &["capped", "fixed"])?
            .as_str()
        {
            "capped" => KineticCfl::Capped,
            _ => KineticCfl::Fixed,
        },
        steady_tol: r.parse("run", "steady_tol", "a number")?,
        max_steps: r.parse("run", "max_steps", "a nonnegative integer")?,
        stop_on_concentration: r.bool_or("run", "stop_on_concentration", false)?,
        diagnostics: true,
        force: r.bool_or("scheme", "force", false)?,
    };
    if cfg.flux == FluxKind::Llf && model.pressure.forms_vacuum() && !cfg.force {
        return Err(Error::config(
            r.line("scheme", "flux"),
            "the Lax-Friedrichs flux fails with vacuum; use `flux = kinetic` or set `force = true`",
        ));
    }
    cfg.validate(model).map_err(|e| Error::config(0, e.to_string()))?;
    Ok(cfg)
}

fn parse_initial(r: &Reader) -> Result<InitialCondition> {
    let profile = match r
        .choice(
            "initial",
            "profile",
            "steady",
            &["cosine", "gaussians", "steady", "file", "chain"],
        )?
        .as_str()
    {
        "cosine" => Profile::Cosine {
            offset: r.f64_or("initial", "offset", 0.0)?,
            amplitude: r.f64_or("initial", "amplitude", 1.0)?,
            period: r.f64_req("initial", "period")?,
        },
        "gaussians" => {
            let centers: Vec<f64> = r.list("initial", "centers", "numbers")?;
            let n = centers.len();
            if n == 0 {
                return Err(Error::config(
                    r.line("initial", "centers"),
                    "`centers` needs at least one entry",
                ));
            }
            let fill = |key: &str| -> Result<Vec<f64>> {
                let v: Vec<f64> = r.list("initial", key, "numbers")?;
                match v.len() {
                    0 => Ok(vec![1.0; n]),
                    k if k == n => Ok(v),
                    _ => Err(Error::config(
                        r.line("initial", key),
                        format!("`{key}` needs {n} entries"),
                    )),
                }
            };
            let variances = fill("variances")?;
            if variances.iter().any(|v| !(*v > 0.0)) {
                return Err(Error::config(
                    r.line("initial", "variances"),
                    "variances must be positive",
                ));
            }
            Profile::Gaussians {
                offset: r.f64_or("initial", "offset", 0.0)?,
                centers,
                variances,
                weights: fill("weights")?,
            }
        }
        "steady" => Profile::Steady,
        "file" => Profile::File(r.required("initial", "source")?.into()),
        _ => Profile::Chain(r.required("initial", "source")?.into()),
    };
    let momentum = match r
        .choice("initial", "momentum", "zero", &["zero", "sine", "velocity"])?
        .as_str()
    {
        "zero" => MomentumProfile::Zero,
        "sine" => MomentumProfile::Sine {
            amplitude: r.f64_req("initial", "momentum_amplitude")?,
            period: r.f64_req("initial", "momentum_period")?,
        },
        _ => MomentumProfile::Velocity(r.f64_req("initial", "velocity")?),
    };
    let exact = match r.choice("initial", "exact", "none", &["none", "translate"])?.as_str() {
        "none" => ExactSolution::None,
        _ => ExactSolution::Translate,
    };
    let mass = r.f64_or("initial", "mass", 1.0)?;
    if !(mass > 0.0 && mass.is_finite()) {
        return Err(Error::config(r.line("initial", "mass"), "`mass` must be positive"));
    }
    Ok(InitialCondition {
        profile,
        mass,
        momentum,
        exact,
    })
}

fn list<T: std::fmt::Display>(v: &[T]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")
}

/// Canonical text form; parsing it back yields the same configuration.
pub fn serialize_config(c: &ScenarioConfig) -> String {
    let mut s = String::new();
    let w = &mut s;
    let _ = writeln!(
        w,
        "[grid]\na = {}\nb = {}\ncells = {}\n",
        c.grid.a, c.grid.b, c.grid.cells
    );

    let _ = writeln!(w, "[model]");
    match c.model.pressure {
        PressureLaw::IdealGas => {
            let _ = writeln!(w, "pressure = ideal");
        }
        PressureLaw::PowerLaw { m } => {
            let _ = writeln!(w, "pressure = power\nm = {m}");
        }
        PressureLaw::ScaledIdeal { sigma } => {
            let _ = writeln!(w, "pressure = scaled_ideal\nsigma = {sigma}");
        }
    }
    match &c.model.potential {
        ExternalPotential::None | ExternalPotential::Custom(_) => {
            let _ = writeln!(w, "potential = none");
        }
        ExternalPotential::Quadratic { a } => {
            let _ = writeln!(w, "potential = quadratic\na = {a}");
        }
        ExternalPotential::DoubleWell { a, b } => {
            let _ = writeln!(w, "potential = double_well\na = {a}\nb = {b}");
        }
        ExternalPotential::Quartic { c } => {
            let _ = writeln!(w, "potential = quartic\nc = {c}");
        }
    }
    if let Some(length) = c.model.rod_length() {
        let _ = writeln!(w, "kernel = hard_rods\nrod_length = {length}");
    } else {
        match c.model.kernel {
            InteractionKernel::None | InteractionKernel::HardRodCharacteristic { .. } => {
                let _ = writeln!(w, "kernel = none");
            }
            InteractionKernel::Quadratic => {
                let _ = writeln!(w, "kernel = quadratic");
            }
            InteractionKernel::Homogeneous { alpha } => {
                let _ = writeln!(w, "kernel = homogeneous\nalpha = {alpha}");
            }
            InteractionKernel::Morse => {
                let _ = writeln!(w, "kernel = morse");
            }
        }
        if c.model.nonlinearity == Nonlinearity::LogComplement {
            let _ = writeln!(w, "nonlinearity = log_complement");
        }
    }

    let sc = &c.scheme;
    let _ = writeln!(w, "\n[damping]\ngamma = {}", sc.gamma);
    match sc.psi {
        Communication::None => {
            let _ = writeln!(w, "communication = none");
        }
        Communication::Standard => {
            let _ = writeln!(w, "communication = standard");
        }
        Communication::Constant(v) => {
            let _ = writeln!(w, "communication = constant\npsi_value = {v}");
        }
    }

    let _ = writeln!(
        w,
        "\n[scheme]\norder = {}\nflux = {}\ninterface = {}\nh_reconstruction = {}\ncfl = {}\neps_vac = {}\nkinetic_cfl = {}\nforce = {}",
        if sc.order == Order::First { 1 } else { 2 },
        if sc.flux == FluxKind::Llf { "llf" } else { "kinetic" },
        if sc.rule == InterfaceRule::Max { "max" } else { "average" },
        if sc.h_reconstruction == HReconstruction::Composite { "composite" } else { "direct" },
        sc.cfl,
        sc.eps_vac,
        if sc.kinetic_cfl == KineticCfl::Capped { "capped" } else { "fixed" },
        sc.force,
    );

    let ic = &c.initial;
    let _ = writeln!(w, "\n[initial]");
    match &ic.profile {
        Profile::Cosine {
            offset,
            amplitude,
            period,
        } => {
            let _ = writeln!(
                w,
                "profile = cosine\noffset = {offset}\namplitude = {amplitude}\nperiod = {period}"
            );
        }
        Profile::Gaussians {
            offset,
            centers,
            variances,
            weights,
        } => {
            let _ = writeln!(
                w,
                "profile = gaussians\noffset = {offset}\ncenters = {}\nvariances = {}\nweights = {}",
                list(centers),
                list(variances),
                list(weights)
            );
        }
        Profile::Steady => {
            let _ = writeln!(w, "profile = steady");
        }
        Profile::File(p) => {
            let _ = writeln!(w, "profile = file\nsource = {}", p.display());
        }
        Profile::Chain(p) => {
            let _ = writeln!(w, "profile = chain\nsource = {}", p.display());
        }
    }
    let _ = writeln!(w, "mass = {}", ic.mass);
    match ic.momentum {
        MomentumProfile::Zero => {
            let _ = writeln!(w, "momentum = zero");
        }
        MomentumProfile::Sine { amplitude, period } => {
            let _ = writeln!(
                w,
                "momentum = sine\nmomentum_amplitude = {amplitude}\nmomentum_period = {period}"
            );
        }
        MomentumProfile::Velocity(v) => {
            let _ = writeln!(w, "momentum = velocity\nvelocity = {v}");
        }
    }
    let _ = writeln!(
        w,
        "exact = {}",
        if ic.exact == ExactSolution::None {
            "none"
        } else {
            "translate"
        }
    );

    let _ = writeln!(w, "\n[run]\nname = {}\nt_end = {}", c.name, sc.t_end);
    if let Some(v) = sc.snapshot_every {
        let _ = writeln!(w, "snapshot_every = {v}");
    }
    if let Some(v) = sc.steady_tol {
        let _ = writeln!(w, "steady_tol = {v}");
    }
    if let Some(v) = sc.max_steps {
        let _ = writeln!(w, "max_steps = {v}");
    }
    let _ = writeln!(w, "stop_on_concentration = {}", sc.stop_on_concentration);
    if !c.run.cells.is_empty() {
        let _ = writeln!(w, "cells = {}", list(&c.run.cells));
    }
    let _ = writeln!(w, "reference_cells = {}", c.run.reference_cells);
    let _ = writeln!(w, "convergence_time = {}", c.run.convergence_time);
    match c.run.mask {
        Some(m) => {
            let _ = writeln!(
                w,
                "mask = true\nmask_threshold = {}\nmask_margin = {}",
                m.threshold, m.margin
            );
        }
        None => {
            let _ = writeln!(w, "mask = false");
        }
    }
    if !c.run.sigmas.is_empty() {
        let _ = writeln!(w, "sigmas = {}", list(&c.run.sigmas));
    }
    s
}
