//! Run configuration files.
//!
//! The format is TOML restricted to top-level keys plus the sections
//! `[pulse]`, `[emitters]`, `[areas]`, `[axis]`, `[phonons]` and
//! `[numerics]`. Every key is optional: values start from a preset (`fig2`
//! unless `preset` names another) and the file overrides them. Unknown keys
//! and sections are errors, reported with their dotted path.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use toml::{Table, Value};

use crate::error::{Error, Result};
use crate::sweep::{linspace, preset, SweepAxis, SweepSpec};

/// A sweep job as read from a config file.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub spec: SweepSpec,
    pub output_dir: PathBuf,
    /// Emit SVG heatmaps next to the CSV.
    pub plots: bool,
    /// Worker threads; `None` defers to the environment.
    pub workers: Option<usize>,
}

impl RunConfig {
    pub fn from_spec(spec: SweepSpec) -> Self {
        Self {
            spec,
            output_dir: PathBuf::from("."),
            plots: true,
            workers: None,
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            Error::config("<file>", format!("cannot read {}: {e}", path.display()))
        })?;
        Self::parse(&text)
    }

    /// Parses and validates a config. No field is left unchecked.
    pub fn parse(text: &str) -> Result<Self> {
        let table: Table = text
            .parse()
            .map_err(|e: toml::de::Error| Error::config(parse_error_key(text, &e), one_line(e.message())))?;
        let mut root = Section::new("", &table);

        let base = root.string("preset")?.unwrap_or_else(|| "fig2".to_string());
        let mut spec = preset(&base).map_err(|_| Error::config("preset", format!("unknown preset `{base}`")))?;
        let mut cfg = RunConfig::from_spec(spec.clone());

        if let Some(name) = root.string("name")? {
            spec.name = name;
        }
        if let Some(dir) = root.string("output_dir")? {
            cfg.output_dir = PathBuf::from(dir);
        }
        if let Some(plots) = root.bool("plots")? {
            cfg.plots = plots;
        }
        if let Some(w) = root.count("workers")? {
            cfg.workers = Some(w);
        }

        if let Some(mut s) = root.section("pulse")? {
            if let Some(v) = s.float("tau0_ps")? {
                spec.tau0 = v;
            }
            if let Some(v) = s.float("chirp_ps2")? {
                spec.chirp = v;
            }
            s.finish()?;
        }

        if let Some(mut s) = root.section("emitters")? {
            if let Some(n) = s.count("count")? {
                spec.n_emitters = n;
            }
            if let Some(d) = s.floats("dipole_scales")? {
                spec.dipole_scales = d;
            }
            s.finish()?;
        }

        if let Some(mut s) = root.section("areas")? {
            if let Some(v) = s.grid("theta", "rad", 1.0)? {
                spec.areas = v;
            } else if let Some(v) = s.grid("theta", "pi", PI)? {
                spec.areas = v;
            }
            s.finish()?;
        }

        if let Some(mut s) = root.section("axis")? {
            let (old_values, old_spacing, old_width) = match &spec.axis {
                SweepAxis::Spacing { values, width } => (values.clone(), None, Some(*width)),
                SweepAxis::Width { values, spacing } => (values.clone(), Some(*spacing), None),
            };
            let kind = s.string("kind")?;
            let values = s.grid("values", "meV", 1.0)?;
            let width = s.float("width_meV")?;
            let spacing = s.float("spacing_meV")?;
            let is_width = match kind.as_deref() {
                None => matches!(spec.axis, SweepAxis::Width { .. }),
                Some("spacing") => false,
                Some("width") => true,
                Some(other) => {
                    return Err(Error::config(
                        "axis.kind",
                        format!("expected \"spacing\" or \"width\", got \"{other}\""),
                    ))
                }
            };
            spec.axis = if is_width {
                if width.is_some() {
                    return Err(Error::config("axis.width_meV", "not allowed when kind = \"width\""));
                }
                SweepAxis::Width {
                    values: values.unwrap_or(old_values),
                    spacing: spacing.or(old_spacing).ok_or_else(|| {
                        Error::config("axis.spacing_meV", "required when kind = \"width\"")
                    })?,
                }
            } else {
                if spacing.is_some() {
                    return Err(Error::config("axis.spacing_meV", "not allowed when kind = \"spacing\""));
                }
                SweepAxis::Spacing {
                    values: values.unwrap_or(old_values),
                    width: width.or(old_width).ok_or_else(|| {
                        Error::config("axis.width_meV", "required when kind = \"spacing\"")
                    })?,
                }
            };
            s.finish()?;
        }

        if let Some(mut s) = root.section("phonons")? {
            let mut env = spec.phonons.unwrap_or_default();
            let enabled = s.bool("enabled")?;
            if let Some(v) = s.float("temperature_K")? {
                env.temperature = v;
            }
            if let Some(v) = s.float("coupling_ps2")? {
                env.coupling = v;
            }
            if let Some(v) = s.float("cutoff_meV")? {
                env.cutoff = v;
            }
            // A phonon section switches the bath on unless it says otherwise.
            spec.phonons = match enabled {
                Some(false) => None,
                _ => Some(env),
            };
            s.finish()?;
        }

        if let Some(mut s) = root.section("numerics")? {
            let d = &mut spec.discretization;
            if let Some(v) = s.count("points")? {
                d.n_points = v;
            }
            if let Some(v) = s.float("span_fwhms")? {
                d.span_fwhms = v;
            }
            if let Some(v) = s.float("max_dt_ps")? {
                d.max_dt = v;
            }
            if let Some(v) = s.float("t_span_ps")? {
                d.t_span = Some(v);
            }
            if let Some(v) = s.bool("refine")? {
                d.refine = v;
            }
            if let Some(v) = s.float("tolerance")? {
                d.tolerance = v;
            }
            s.finish()?;
        }
        root.finish()?;

        spec.validate().map_err(to_config_error)?;
        cfg.spec = spec;
        Ok(cfg)
    }

    /// Renders the config in the file grammar; [`RunConfig::parse`] reads
    /// it back to an identical value.
    pub fn to_config_string(&self) -> String {
        let spec = &self.spec;
        let mut out = String::new();
        let _ = writeln!(out, "name = {}", quote(&spec.name));
        let _ = writeln!(out, "output_dir = {}", quote(&self.output_dir.to_string_lossy()));
        let _ = writeln!(out, "plots = {}", self.plots);
        if let Some(w) = self.workers {
            let _ = writeln!(out, "workers = {w}");
        }
        let _ = writeln!(out, "\n[pulse]");
        let _ = writeln!(out, "tau0_ps = {:?}", spec.tau0);
        let _ = writeln!(out, "chirp_ps2 = {:?}", spec.chirp);
        let _ = writeln!(out, "\n[emitters]");
        let _ = writeln!(out, "count = {}", spec.n_emitters);
        if !spec.dipole_scales.is_empty() {
            let _ = writeln!(out, "dipole_scales = {}", float_list(&spec.dipole_scales));
        }
        let _ = writeln!(out, "\n[areas]");
        let _ = writeln!(out, "theta_rad = {}", float_list(&spec.areas));
        let _ = writeln!(out, "\n[axis]");
        match &spec.axis {
            SweepAxis::Spacing { values, width } => {
                let _ = writeln!(out, "kind = \"spacing\"");
                let _ = writeln!(out, "values_meV = {}", float_list(values));
                let _ = writeln!(out, "width_meV = {width:?}");
            }
            SweepAxis::Width { values, spacing } => {
                let _ = writeln!(out, "kind = \"width\"");
                let _ = writeln!(out, "values_meV = {}", float_list(values));
                let _ = writeln!(out, "spacing_meV = {spacing:?}");
            }
        }
        let _ = writeln!(out, "\n[phonons]");
        match &spec.phonons {
            Some(env) => {
                let _ = writeln!(out, "enabled = true");
                let _ = writeln!(out, "temperature_K = {:?}", env.temperature);
                let _ = writeln!(out, "coupling_ps2 = {:?}", env.coupling);
                let _ = writeln!(out, "cutoff_meV = {:?}", env.cutoff);
            }
            None => {
                let _ = writeln!(out, "enabled = false");
            }
        }
        let d = &spec.discretization;
        let _ = writeln!(out, "\n[numerics]");
        let _ = writeln!(out, "points = {}", d.n_points);
        let _ = writeln!(out, "span_fwhms = {:?}", d.span_fwhms);
        let _ = writeln!(out, "max_dt_ps = {:?}", d.max_dt);
        if let Some(t) = d.t_span {
            let _ = writeln!(out, "t_span_ps = {t:?}");
        }
        let _ = writeln!(out, "refine = {}", d.refine);
        let _ = writeln!(out, "tolerance = {:?}", d.tolerance);
        out
    }
}

/// Maps a validation failure onto the config key that holds the value.
fn to_config_error(err: Error) -> Error {
    match err {
        Error::InvalidParameter { name, reason } => {
            let key = match name {
                "areas" => "areas.theta_rad",
                "axis.values" => "axis.values_meV",
                "axis.width" => "axis.width_meV",
                "axis.spacing" => "axis.spacing_meV",
                "n_emitters" => "emitters.count",
                "dipole_scales" => "emitters.dipole_scales",
                "tau0_ps" => "pulse.tau0_ps",
                "chirp_ps2" => "pulse.chirp_ps2",
                "temperature_K" => "phonons.temperature_K",
                "coupling_ps2" => "phonons.coupling_ps2",
                "cutoff_meV" => "phonons.cutoff_meV",
                "max_dt_ps" => "numerics.max_dt_ps",
                "t_span_ps" => "numerics.t_span_ps",
                "tolerance" => "numerics.tolerance",
                other => other,
            };
            Error::config(key, reason)
        }
        Error::InvalidGrid(msg) => Error::config("numerics", msg),
        other => other,
    }
}

fn quote(s: &str) -> String {
    Value::String(s.to_string()).to_string()
}

fn float_list(v: &[f64]) -> String {
    let items: Vec<String> = v.iter().map(|x| format!("{x:?}")).collect();
    format!("[{}]", items.join(", "))
}

fn one_line(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Best-effort key for a syntax error: the line it occurred on.
fn parse_error_key(text: &str, err: &toml::de::Error) -> String {
    match err.span() {
        Some(span) => {
            let line = text[..span.start.min(text.len())].matches('\n').count() + 1;
            format!("<line {line}>")
        }
        None => "<file>".to_string(),
    }
}

/// A table being consumed; anything left at [`Section::finish`] is unknown.
struct Section<'a> {
    path: String,
    table: &'a Table,
    seen: Vec<&'a str>,
}

impl<'a> Section<'a> {
    fn new(path: &str, table: &'a Table) -> Self {
        Self {
            path: path.to_string(),
            table,
            seen: Vec::new(),
        }
    }

    fn key(&self, k: &str) -> String {
        if self.path.is_empty() {
            k.to_string()
        } else {
            format!("{}.{k}", self.path)
        }
    }

    fn get(&mut self, k: &str) -> Option<&'a Value> {
        let (name, value) = self.table.get_key_value(k)?;
        self.seen.push(name.as_str());
        Some(value)
    }

    fn type_error(&self, k: &str, expected: &str, got: &Value) -> Error {
        Error::config(self.key(k), format!("expected {expected}, got {}", got.type_str()))
    }

    fn section(&mut self, k: &str) -> Result<Option<Section<'a>>> {
        match self.get(k) {
            None => Ok(None),
            Some(Value::Table(t)) => Ok(Some(Section::new(&self.key(k), t))),
            Some(v) => Err(self.type_error(k, "a [section]", v)),
        }
    }

    fn string(&mut self, k: &str) -> Result<Option<String>> {
        match self.get(k) {
            None => Ok(None),
            Some(Value::String(s)) => Ok(Some(s.clone())),
            Some(v) => Err(self.type_error(k, "a string", v)),
        }
    }

    fn bool(&mut self, k: &str) -> Result<Option<bool>> {
        match self.get(k) {
            None => Ok(None),
            Some(Value::Boolean(b)) => Ok(Some(*b)),
            Some(v) => Err(self.type_error(k, "true or false", v)),
        }
    }

    fn float(&mut self, k: &str) -> Result<Option<f64>> {
        match self.get(k) {
            None => Ok(None),
            Some(v) => as_float(v).map(Some).ok_or_else(|| self.type_error(k, "a number", v)),
        }
    }

    fn count(&mut self, k: &str) -> Result<Option<usize>> {
        match self.get(k) {
            None => Ok(None),
            Some(Value::Integer(i)) if *i >= 0 => Ok(Some(*i as usize)),
            Some(v) => Err(self.type_error(k, "a non-negative integer", v)),
        }
    }

    fn floats(&mut self, k: &str) -> Result<Option<Vec<f64>>> {
        match self.get(k) {
            None => Ok(None),
            Some(Value::Array(items)) => items
                .iter()
                .enumerate()
                .map(|(i, v)| {
                    as_float(v).ok_or_else(|| {
                        Error::config(format!("{}[{i}]", self.key(k)), format!("expected a number, got {}", v.type_str()))
                    })
                })
                .collect::<Result<Vec<_>>>()
                .map(Some),
            Some(v) => Err(self.type_error(k, "an array of numbers", v)),
        }
    }

    /// A grid given either as `<stem>_<unit> = [..]` or as
    /// `<stem>_start_<unit>`, `<stem>_stop_<unit>`, `<stem>_points`. Values
    /// are multiplied by `scale`.
    fn grid(&mut self, stem: &str, unit: &str, scale: f64) -> Result<Option<Vec<f64>>> {
        let list_key = format!("{stem}_{unit}");
        let start_key = format!("{stem}_start_{unit}");
        let stop_key = format!("{stem}_stop_{unit}");
        let list = self.floats(&list_key)?;
        let start = self.float(&start_key)?;
        let stop = self.float(&stop_key)?;
        // Shared by both units of the same stem, so only claim it when used.
        let points_key = format!("{stem}_points");
        let range_given = start.is_some() || stop.is_some();
        let points = if range_given { self.count(&points_key)? } else { None };
        match (list, start, stop) {
            (Some(_), Some(_), _) | (Some(_), _, Some(_)) => Err(Error::config(
                self.key(&list_key),
                format!("give either {list_key} or {start_key}/{stop_key}, not both"),
            )),
            (Some(v), None, None) => Ok(Some(v.into_iter().map(|x| x * scale).collect())),
            (None, Some(a), Some(b)) => {
                let n = points.ok_or_else(|| {
                    Error::config(self.key(&points_key), format!("required with {start_key}"))
                })?;
                if n == 0 {
                    return Err(Error::config(self.key(&points_key), "must be at least 1"));
                }
                Ok(Some(linspace(a * scale, b * scale, n)))
            }
            (None, Some(_), None) => Err(Error::config(self.key(&stop_key), "missing")),
            (None, None, Some(_)) => Err(Error::config(self.key(&start_key), "missing")),
            (None, None, None) => Ok(None),
        }
    }

    fn finish(self) -> Result<()> {
        for k in self.table.keys() {
            if !self.seen.contains(&k.as_str()) {
                return Err(Error::config(self.key(k), "unknown key"));
            }
        }
        Ok(())
    }
}

fn as_float(v: &Value) -> Option<f64> {
    match v {
        Value::Float(f) => Some(*f),
        Value::Integer(i) => Some(*i as f64),
        _ => None,
    }
}
