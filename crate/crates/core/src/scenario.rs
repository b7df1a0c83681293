//! Scenario files, the runner that turns them into data files, and the
//! scenarios shipped with the crate.
//!
//! A scenario is flat `key = value` text; `#` starts a comment and the first
//! comment lines form the description.
//!
//! ```text
//! packet.kind = gaussian
//! packet.alpha = 1.0
//! times.step = 0.01
//! ```

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

use crate::analysis::{
    classical_collision_time, compute_time_series, empirical_compression_time, position_moments, snapshot,
    symmetrized_momentum_mean, AnalysisGrids, Snapshot, TimeSeries, UNCERTAINTY_SLACK,
};
use crate::error::{Error, Result};
use crate::oracle::GaussianClosedForm;
use crate::quadrature::{QuadratureSettings, Rule, DEFAULT_LORENTZIAN_TAIL_MASS};
use crate::spectral::{Method, Propagator};
use crate::types::{validate, Boundary, Grid, PacketSpec, PhysicalParams, SampledField, SpectrumTable};

/// Names the default output root when neither the command line nor the
/// scenario sets a directory.
pub const OUTPUT_ROOT_ENV: &str = "WALLBOUNCE_OUTPUT_ROOT";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Jsonl,
}

impl Format {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "csv" => Some(Format::Csv),
            "jsonl" => Some(Format::Jsonl),
            _ => None,
        }
    }

    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Jsonl => "jsonl",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TimeRange {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl TimeRange {
    /// `start + i·step` up to and including `stop`.
    pub fn times(&self) -> Vec<f64> {
        let n = ((self.stop - self.start) / self.step + 1e-9).floor() as usize;
        (0..=n).map(|i| self.start + i as f64 * self.step).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub name: String,
    pub description: String,
    pub spec: PacketSpec,
    pub params: PhysicalParams,
    pub method: Method,
    pub times: TimeRange,
    pub snapshots: Vec<f64>,
    pub grids: AnalysisGrids,
    pub quadrature: QuadratureSettings,
    pub output_dir: Option<PathBuf>,
    pub format: Format,
    /// Also write the free-particle series of the same packet (`series_free`).
    pub free_reference: bool,
}

struct Entries {
    values: BTreeMap<String, (usize, String)>,
}

impl Entries {
    fn take(&mut self, key: &str) -> Option<(usize, String)> {
        self.values.remove(key)
    }

    fn string(&mut self, key: &str, default: &str) -> String {
        self.take(key).map(|(_, v)| v).unwrap_or_else(|| default.to_string())
    }

    fn number(&mut self, key: &str, default: f64) -> Result<f64> {
        match self.take(key) {
            None => Ok(default),
            Some((line, v)) => parse_number(line, key, &v),
        }
    }

    fn count(&mut self, key: &str, default: usize) -> Result<usize> {
        match self.take(key) {
            None => Ok(default),
            Some((line, v)) => v.parse().map_err(|_| Error::Config {
                line,
                message: format!("`{key}` must be a non-negative integer, got `{v}`"),
            }),
        }
    }

    fn finish(self) -> Result<()> {
        match self.values.into_iter().min_by_key(|(_, (line, _))| *line) {
            None => Ok(()),
            Some((key, (line, _))) => Err(Error::Config {
                line,
                message: format!("unknown key `{key}`"),
            }),
        }
    }
}

fn parse_number(line: usize, key: &str, v: &str) -> Result<f64> {
    // allow `1/3` for the width study
    let parsed = match v.split_once('/') {
        Some((a, b)) => a.trim().parse::<f64>().ok().zip(b.trim().parse::<f64>().ok()).map(|(a, b)| a / b),
        None => v.parse().ok(),
    };
    parsed.filter(|x: &f64| x.is_finite()).ok_or_else(|| Error::Config {
        line,
        message: format!("`{key}` must be a number, got `{v}`"),
    })
}

impl ScenarioConfig {
    /// Parses scenario text. `base` resolves relative paths, such as a
    /// spectrum table, and `name` is used when the text sets none.
    pub fn parse(text: &str, name: &str, base: Option<&Path>) -> Result<Self> {
        let mut values = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let trimmed = raw.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let content = trimmed.split('#').next().unwrap_or("").trim();
            let Some((key, value)) = content.split_once('=') else {
                return Err(Error::Config {
                    line,
                    message: format!("expected `key = value`, got `{trimmed}`"),
                });
            };
            let key = key.trim().to_string();
            if values.insert(key.clone(), (line, value.trim().to_string())).is_some() {
                return Err(Error::Config {
                    line,
                    message: format!("duplicate key `{key}`"),
                });
            }
        }
        let mut e = Entries { values };

        let name = e.string("name", name);
        let params = PhysicalParams {
            hbar: e.number("params.hbar", 1.0)?,
            mass: e.number("params.mass", 1.0)?,
        };

        let kind = e.string("packet.kind", "gaussian");
        let alpha = e.number("packet.alpha", 1.0)?;
        let x0 = e.number("packet.x0", -10.0)?;
        let p0 = e.number("packet.p0", 10.0)?;
        let table = e.take("packet.table");
        let spec = match kind.as_str() {
            "gaussian" => PacketSpec::gaussian(alpha, x0, p0),
            "lorentzian" => PacketSpec::lorentzian(alpha, x0, p0),
            "tabulated" => {
                let Some((line, path)) = table else {
                    return Err(Error::ConfigValue("`packet.kind = tabulated` needs `packet.table`".into()));
                };
                let path = base.map(|b| b.join(&path)).unwrap_or_else(|| PathBuf::from(&path));
                let table = read_table(&path).map_err(|e| match e {
                    Error::Io { .. } => e,
                    other => Error::Config {
                        line,
                        message: other.to_string(),
                    },
                })?;
                PacketSpec::tabulated(table, x0, p0)
            }
            other => {
                return Err(Error::ConfigValue(format!(
                    "`packet.kind` must be gaussian, lorentzian or tabulated, got `{other}`"
                )))
            }
        };

        let method_name = e.string("method", "wall-mirror");
        let method = Method::parse(&method_name)
            .ok_or_else(|| Error::ConfigValue(format!("unknown method `{method_name}`")))?;

        let times = TimeRange {
            start: e.number("times.start", 0.0)?,
            stop: e.number("times.stop", 2.0)?,
            step: e.number("times.step", 0.01)?,
        };
        if !(times.step > 0.0) {
            return Err(Error::ConfigValue(format!("`times.step` must be > 0, got {}", times.step)));
        }
        if !(times.stop > times.start) {
            return Err(Error::ConfigValue(format!(
                "`times.stop` ({}) must exceed `times.start` ({})",
                times.stop, times.start
            )));
        }
        let snapshots = match e.take("times.snapshots") {
            None => Vec::new(),
            Some((line, list)) => list
                .split(',')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(|s| parse_number(line, "times.snapshots", s))
                .collect::<Result<Vec<_>>>()?,
        };

        let defaults = AnalysisGrids::default_for(method);
        let grids = AnalysisGrids {
            position: Grid::new(
                e.number("grid.x.min", defaults.position.min)?,
                e.number("grid.x.max", defaults.position.max)?,
                e.count("grid.x.n", defaults.position.n)?,
            )?,
            momentum: Grid::new(
                e.number("grid.p.min", defaults.momentum.min)?,
                e.number("grid.p.max", defaults.momentum.max)?,
                e.count("grid.p.n", defaults.momentum.n)?,
            )?,
        };

        let tail = e.number("quadrature.tail_mass", DEFAULT_LORENTZIAN_TAIL_MASS)?;
        let mut quadrature = QuadratureSettings::for_packet_with_tail(&spec, params.hbar, grids.position.extent(), tail);
        if let Some((line, w)) = e.take("quadrature.window") {
            quadrature.p_window = parse_number(line, "quadrature.window", &w)?;
        }
        quadrature.n_nodes = e.count("quadrature.nodes", quadrature.n_nodes)?;
        if let Some((_, rule)) = e.take("quadrature.rule") {
            quadrature.rule =
                Rule::parse(&rule).ok_or_else(|| Error::ConfigValue(format!("unknown quadrature rule `{rule}`")))?;
        }

        let free_reference = match e.take("reference.free") {
            None => false,
            Some((line, v)) => v.parse().map_err(|_| Error::Config {
                line,
                message: format!("`reference.free` must be true or false, got `{v}`"),
            })?,
        };
        let output_dir = e.take("output.dir").map(|(_, d)| PathBuf::from(d));
        let format_name = e.string("output.format", "csv");
        let format =
            Format::parse(&format_name).ok_or_else(|| Error::ConfigValue(format!("unknown format `{format_name}`")))?;
        e.finish()?;

        let config = Self {
            name,
            description: description_of(text),
            spec,
            params,
            method,
            times,
            snapshots,
            grids,
            quadrature,
            output_dir,
            format,
            free_reference,
        };
        config.check()?;
        Ok(config)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let name = path.file_stem().and_then(|s| s.to_str()).unwrap_or("scenario");
        Self::parse(&text, name, path.parent())
    }

    /// A file path, or else the name of a bundled scenario (with or without `.cfg`).
    pub fn load(name_or_path: &str) -> Result<Self> {
        let path = Path::new(name_or_path);
        if path.is_file() {
            return Self::from_file(path);
        }
        let name = name_or_path.strip_suffix(".cfg").unwrap_or(name_or_path);
        let bundled = BUNDLED
            .iter()
            .find(|(n, _)| *n == name)
            .ok_or_else(|| Error::UnknownScenario(name_or_path.to_string()))?;
        Self::parse(bundled.1, bundled.0, None)
    }

    pub fn check(&self) -> Result<()> {
        self.params.check()?;
        self.quadrature.check()?;
        let boundary = if self.method.is_wall() { Boundary::Wall } else { Boundary::Free };
        validate(&self.spec, &self.params, boundary)?;
        if self.method.is_wall() && self.grids.position.max > 0.0 {
            return Err(Error::GridCrossesWall {
                max: self.grids.position.max,
            });
        }
        Ok(())
    }

    /// Applies the directory precedence: explicit, then the scenario's own,
    /// then `$WALLBOUNCE_OUTPUT_ROOT/<name>`, then `output/<name>`.
    pub fn resolve_output_dir(&self, explicit: Option<&Path>) -> PathBuf {
        if let Some(dir) = explicit {
            return dir.to_path_buf();
        }
        if let Some(dir) = &self.output_dir {
            return dir.clone();
        }
        let root = std::env::var_os(OUTPUT_ROOT_ENV)
            .map(PathBuf::from)
            .unwrap_or_else(|| PathBuf::from("output"));
        root.join(&self.name)
    }
}

/// Reads `p,re,im` lines; blank lines and `#` comments are skipped.
pub fn read_table(path: &Path) -> Result<SpectrumTable> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut samples = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') || line.starts_with('p') {
            continue;
        }
        let fields: Vec<f64> = line.split(',').map(|f| f.trim().parse::<f64>()).collect::<std::result::Result<_, _>>().map_err(
            |_| Error::InvalidTable(format!("line {}: expected three numbers `p,re,im`", i + 1)),
        )?;
        let [p, re, im] = fields[..] else {
            return Err(Error::InvalidTable(format!("line {}: expected three numbers `p,re,im`", i + 1)));
        };
        samples.push((p, num_complex::Complex64::new(re, im)));
    }
    SpectrumTable::from_samples(&samples)
}

pub static BUNDLED: [(&str, &str); 10] = [
    ("standard", include_str!("../scenarios/standard.cfg")),
    ("fig1_gaussian", include_str!("../scenarios/fig1_gaussian.cfg")),
    ("fig2_lorentzian", include_str!("../scenarios/fig2_lorentzian.cfg")),
    ("fig3_collision", include_str!("../scenarios/fig3_collision.cfg")),
    ("fig4_alpha_half", include_str!("../scenarios/fig4_alpha_half.cfg")),
    ("fig5_alpha_1_3", include_str!("../scenarios/fig5_alpha_1_3.cfg")),
    ("fig5_alpha_1_2", include_str!("../scenarios/fig5_alpha_1_2.cfg")),
    ("fig5_alpha_1", include_str!("../scenarios/fig5_alpha_1.cfg")),
    ("fig5_alpha_2", include_str!("../scenarios/fig5_alpha_2.cfg")),
    ("fig5_alpha_3", include_str!("../scenarios/fig5_alpha_3.cfg")),
];

/// `(name, description)` of every bundled scenario.
pub fn list_scenarios() -> Vec<(&'static str, String)> {
    BUNDLED
        .iter()
        .map(|(name, text)| (*name, description_of(text)))
        .collect()
}

/// The leading comment block, joined into one line.
pub fn description_of(text: &str) -> String {
    let mut lines = Vec::new();
    for line in text.lines().map(str::trim) {
        match line.strip_prefix('#') {
            Some(comment) => lines.push(comment.trim()),
            None if line.is_empty() && lines.is_empty() => continue,
            None => break,
        }
    }
    lines.join(" ")
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub scenario: String,
    pub description: String,
    pub method: &'static str,
    pub packet: &'static str,
    pub alpha: f64,
    pub x0: f64,
    pub p0: f64,
    pub hbar: f64,
    pub mass: f64,
    pub t0: f64,
    pub p_window: f64,
    pub quadrature_nodes: usize,
    pub rows: usize,
    pub collision_time: Option<f64>,
    pub dx_wall_at_collision: Option<f64>,
    pub dx_free_at_collision: Option<f64>,
    pub compression_ratio: Option<f64>,
    pub compression_ratio_closed_form: Option<f64>,
    pub mean_p_at_collision: Option<f64>,
    pub mean_p_at_collision_closed_form: Option<f64>,
    pub empirical_compression_time: Option<f64>,
    pub norm_drift: f64,
    pub min_uncertainty_product: f64,
    pub uncertainty_violations: usize,
    pub warnings: Vec<String>,
    pub files: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub dir: PathBuf,
    pub series: TimeSeries,
    pub summary: Summary,
}

/// 17 significant digits.
fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn write_atomic(dir: &Path, name: &str, contents: &str) -> Result<()> {
    let target = dir.join(name);
    let temp = dir.join(format!(".{name}.tmp"));
    fs::write(&temp, contents).map_err(|e| Error::io(&temp, e))?;
    fs::rename(&temp, &target).map_err(|e| Error::io(&target, e))
}

fn series_text(series: &TimeSeries, format: Format) -> Result<String> {
    let mut out = String::new();
    match format {
        Format::Csv => {
            out.push_str("t,norm,mean_x,dx,mean_p,dp,product\n");
            for r in &series.rows {
                let fields = [r.t, r.norm, r.mean_x, r.dx, r.mean_p, r.dp, r.product].map(num);
                let _ = writeln!(out, "{}", fields.join(","));
            }
        }
        Format::Jsonl => {
            for r in &series.rows {
                out.push_str(&serde_json::to_string(r)?);
                out.push('\n');
            }
        }
    }
    Ok(out)
}

fn field_text(field: &SampledField, coordinate: &str, format: Format) -> Result<String> {
    let mut out = String::new();
    if format == Format::Csv {
        let _ = writeln!(out, "{coordinate},re,im,abs2");
    }
    for (c, v) in field.grid().points().zip(field.values()) {
        match format {
            Format::Csv => {
                let _ = writeln!(out, "{},{},{},{}", num(c), num(v.re), num(v.im), num(v.norm_sqr()));
            }
            Format::Jsonl => {
                let mut object = serde_json::Map::new();
                object.insert(coordinate.into(), c.into());
                object.insert("re".into(), v.re.into());
                object.insert("im".into(), v.im.into());
                object.insert("abs2".into(), v.norm_sqr().into());
                out.push_str(&serde_json::to_string(&object)?);
                out.push('\n');
            }
        }
    }
    Ok(out)
}

/// Label used in snapshot file names: fixed point, three decimals.
pub fn time_label(t: f64) -> String {
    format!("{t:.3}")
}

/// Collision-time diagnostics for the summary.
struct Collision {
    time: Option<f64>,
    dx_wall: Option<f64>,
    dx_free: Option<f64>,
    mean_p: Option<f64>,
    warning: Option<String>,
}

fn collision(config: &ScenarioConfig, propagator: &Propagator) -> Result<Collision> {
    let Ok(t_c) = classical_collision_time(&config.spec, &config.params) else {
        return Ok(Collision {
            time: None,
            dx_wall: None,
            dx_free: None,
            mean_p: None,
            warning: None,
        });
    };
    let x = config.grids.position;
    let field = propagator.sample(&x, t_c, config.method)?;
    let (mean_p, warning) = match symmetrized_momentum_mean(&field, config.params.hbar) {
        Ok(sym) => (Some(sym.value), None),
        Err(e @ Error::ImaginaryResidue { .. }) => (None, Some(format!("no symmetrized <p> at T_C: {e}"))),
        Err(e) => return Err(e),
    };
    if !config.method.is_wall() {
        return Ok(Collision {
            time: Some(t_c),
            dx_wall: None,
            dx_free: Some(position_moments(&field)?.spread),
            mean_p,
            warning,
        });
    }
    // the free packet at T_C is centered on the wall; mirror the grid to hold it
    let free_grid = Grid::new(x.min, -x.min, 2 * x.n - 1)?;
    let free = propagator.sample(&free_grid, t_c, Method::Free)?;
    Ok(Collision {
        time: Some(t_c),
        dx_wall: Some(position_moments(&field)?.spread),
        dx_free: Some(position_moments(&free)?.spread),
        mean_p,
        warning,
    })
}

/// Runs the scenario and writes `series.<ext>`, the snapshot files and
/// `summary.json` into `dir`, which is created if needed.
pub fn run_scenario(config: &ScenarioConfig, dir: &Path) -> Result<RunOutput> {
    config.check()?;
    let boundary = if config.method.is_wall() { Boundary::Wall } else { Boundary::Free };
    let validated = validate(&config.spec, &config.params, boundary)?;
    let propagator = Propagator::new(config.spec.clone(), config.params, config.quadrature)?;

    let times = config.times.times();
    log::info!("{}: {} rows, {} snapshots", config.name, times.len(), config.snapshots.len());
    let series = compute_time_series(&propagator, &times, config.method, &config.grids)?;
    let snapshots: Vec<Snapshot> = config
        .snapshots
        .par_iter()
        .map(|&t| snapshot(&propagator, t, config.method, &config.grids))
        .collect::<Result<_>>()?;
    let hit = collision(config, &propagator)?;
    let free_series = if config.free_reference && config.method.is_wall() {
        let x = config.grids.position;
        let grids = AnalysisGrids {
            position: Grid::new(x.min, -x.min, 2 * x.n - 1)?,
            momentum: config.grids.momentum,
        };
        Some(compute_time_series(&propagator, &times, Method::Free, &grids)?)
    } else {
        None
    };

    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let ext = config.format.extension();
    let mut files = Vec::new();
    let series_name = format!("series.{ext}");
    write_atomic(dir, &series_name, &series_text(&series, config.format)?)?;
    files.push(series_name);
    if let Some(free) = &free_series {
        let name = format!("series_free.{ext}");
        write_atomic(dir, &name, &series_text(free, config.format)?)?;
        files.push(name);
    }
    for s in &snapshots {
        let label = time_label(s.row.t);
        let x_name = format!("snapshot_x_{label}.{ext}");
        let p_name = format!("snapshot_p_{label}.{ext}");
        write_atomic(dir, &x_name, &field_text(&s.position, "x", config.format)?)?;
        write_atomic(dir, &p_name, &field_text(&s.momentum, "p", config.format)?)?;
        files.push(x_name);
        files.push(p_name);
    }

    let closed = GaussianClosedForm::new(&config.spec, config.params).ok();
    let wall_closed = closed.filter(|_| config.method.is_wall() && hit.time.is_some());
    let summary = Summary {
        scenario: config.name.clone(),
        description: config.description.clone(),
        method: config.method.name(),
        packet: config.spec.shape.name(),
        alpha: config.spec.alpha(),
        x0: config.spec.x0,
        p0: config.spec.p0,
        hbar: config.params.hbar,
        mass: config.params.mass,
        t0: validated.scales.t0,
        p_window: config.quadrature.p_window,
        quadrature_nodes: config.quadrature.n_nodes,
        rows: series.len(),
        collision_time: hit.time,
        dx_wall_at_collision: hit.dx_wall,
        dx_free_at_collision: hit.dx_free,
        compression_ratio: hit.dx_wall.zip(hit.dx_free).map(|(w, f)| w / f),
        compression_ratio_closed_form: wall_closed.and_then(|c| c.compression_ratio().ok()),
        mean_p_at_collision: hit.mean_p,
        mean_p_at_collision_closed_form: wall_closed.and_then(|c| c.collision_p_mean().ok()),
        empirical_compression_time: empirical_compression_time(&series),
        norm_drift: series.norm_drift(),
        min_uncertainty_product: series.rows.iter().map(|r| r.product).fold(f64::INFINITY, f64::min),
        uncertainty_violations: series.uncertainty_violations(UNCERTAINTY_SLACK).len(),
        warnings: validated.warnings.iter().map(ToString::to_string).chain(hit.warning).collect(),
        files: files.clone(),
    };
    write_atomic(dir, "summary.json", &(serde_json::to_string_pretty(&summary)? + "\n"))?;

    Ok(RunOutput {
        dir: dir.to_path_buf(),
        series,
        summary,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::PacketShape;

    const SMALL: &str = "# demo scenario
# over two lines

packet.alpha = 1.0
times.start = 0.9
times.stop = 1.1
times.step = 0.1 # three rows
times.snapshots = 1.0
grid.x.n = 1024
grid.p.n = 1024
";

    #[test]
    fn parse_small() {
        let c = ScenarioConfig::parse(SMALL, "demo", None).unwrap();
        assert_eq!(c.name, "demo");
        assert_eq!(c.description, "demo scenario over two lines");
        assert_eq!(c.method, Method::WallMirror);
        assert_eq!(c.times.times().len(), 3);
        assert_eq!(c.snapshots, vec![1.0]);
        assert_eq!(c.grids.position.max, 0.0);
        assert!(matches!(c.spec.shape, PacketShape::Gaussian { .. }));
    }

    #[test]
    fn parse_errors() {
        let bad_step = "times.step = 0";
        assert!(matches!(ScenarioConfig::parse(bad_step, "x", None), Err(Error::ConfigValue(_))));
        let bad_order = "times.start = 2\ntimes.stop = 1";
        assert!(ScenarioConfig::parse(bad_order, "x", None).is_err());
        match ScenarioConfig::parse("packet.alpha = 1\nfoo.bar = 2", "x", None) {
            Err(Error::Config { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
        assert!(ScenarioConfig::parse("packet.alpha = 1\npacket.alpha = 2", "x", None).is_err());
        assert!(ScenarioConfig::parse("packet.alpha = one", "x", None).is_err());
        assert!(ScenarioConfig::parse("no equals sign", "x", None).is_err());
        assert!(ScenarioConfig::parse("grid.x.max = 5", "x", None).is_err());
        assert!(ScenarioConfig::parse("packet.x0 = 3", "x", None).is_err());
        assert!(ScenarioConfig::parse("packet.alpha = -1", "x", None).is_err());
        assert_eq!(ScenarioConfig::parse("packet.alpha = 1/3", "x", None).unwrap().spec.alpha(), 1.0 / 3.0);
    }

    #[test]
    fn bundled_scenarios_parse() {
        for (name, description) in list_scenarios() {
            let c = ScenarioConfig::load(name).unwrap();
            assert_eq!(c.name, name);
            assert!(!description.is_empty(), "{name}");
        }
        let std = ScenarioConfig::load("standard.cfg").unwrap();
        assert_eq!(std.spec, PacketSpec::standard());
        assert_eq!(std.params, PhysicalParams::default());
        assert!(matches!(ScenarioConfig::load("nope"), Err(Error::UnknownScenario(_))));
    }

    #[test]
    fn output_dir_precedence() {
        let mut c = ScenarioConfig::parse(SMALL, "demo", None).unwrap();
        assert_eq!(c.resolve_output_dir(Some(Path::new("x"))), PathBuf::from("x"));
        c.output_dir = Some(PathBuf::from("y"));
        assert_eq!(c.resolve_output_dir(None), PathBuf::from("y"));
    }

    #[test]
    fn tabulated_packet_from_file() {
        let dir = tempfile::tempdir().unwrap();
        let mut table = String::from("p,re,im\n");
        for i in 0..=400 {
            let p = i as f64 * 0.05;
            let _ = writeln!(table, "{p},{},0", (-(p - 10.0) * (p - 10.0) / 2.0).exp());
        }
        fs::write(dir.path().join("spectrum.csv"), table).unwrap();
        let cfg = dir.path().join("tab.cfg");
        fs::write(&cfg, "packet.kind = tabulated\npacket.table = spectrum.csv\n").unwrap();
        let c = ScenarioConfig::from_file(&cfg).unwrap();
        match &c.spec.shape {
            PacketShape::Tabulated(t) => assert_eq!(t.len(), 401),
            other => panic!("{other:?}"),
        }
        fs::write(&cfg, "packet.kind = tabulated\n").unwrap();
        assert!(ScenarioConfig::from_file(&cfg).is_err());
        fs::write(dir.path().join("bad.csv"), "1,2\n").unwrap();
        fs::write(&cfg, "packet.kind = tabulated\npacket.table = bad.csv\n").unwrap();
        assert!(matches!(ScenarioConfig::from_file(&cfg), Err(Error::Config { line: 2, .. })));
    }

    #[test]
    fn labels_and_numbers() {
        assert_eq!(time_label(1.0), "1.000");
        assert_eq!(time_label(0.0499999), "0.050");
        assert_eq!(num(0.1), "1.0000000000000001e-1");
    }
}
