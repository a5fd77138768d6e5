use crate::error::{CliError, CliResult};
use ini::Ini;
use std::cell::RefCell;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

/// Section written by the runner into `summary.ini`; ignored when a summary is reloaded.
pub const RESULT_SECTION: &str = "result";

type Sections = BTreeMap<String, BTreeMap<String, String>>;

/// Raw key-value settings with read tracking.
///
/// Every key read through a getter is recorded with its effective text, so the
/// echo reproduces the run even when defaults were used.
#[derive(Debug, Default)]
pub struct Settings {
    values: Sections,
    base_dir: PathBuf,
    echo: RefCell<Sections>,
    silent: BTreeSet<(String, String)>,
}

fn config_err(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

impl Settings {
    pub fn parse(text: &str, base_dir: &Path) -> CliResult<Self> {
        let ini = Ini::load_from_str_noescape(text).map_err(|e| config_err(e.to_string()))?;
        let mut values = Sections::new();
        for (section, props) in ini.iter() {
            let Some(section) = section else {
                if let Some((key, _)) = props.iter().next() {
                    return Err(config_err(format!("key '{key}' must be inside a [section]")));
                }
                continue;
            };
            let section = section.trim().to_ascii_lowercase();
            if section == RESULT_SECTION {
                continue;
            }
            let entry = values.entry(section.clone()).or_default();
            for (key, value) in props.iter() {
                let key = key.trim().to_ascii_lowercase();
                if entry.insert(key.clone(), value.trim().to_string()).is_some() {
                    return Err(config_err(format!("duplicate key {section}.{key}")));
                }
            }
        }
        Ok(Self {
            values,
            base_dir: base_dir.to_path_buf(),
            ..Self::default()
        })
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Self::parse(&text, &dir)
    }

    /// Applies `section.key=value`.
    pub fn apply_override(&mut self, spec: &str) -> CliResult<()> {
        let (lhs, value) = spec
            .split_once('=')
            .ok_or_else(|| config_err(format!("override '{spec}' is not of the form section.key=value")))?;
        let (section, key) = lhs
            .trim()
            .split_once('.')
            .ok_or_else(|| config_err(format!("override '{spec}' needs a section.key name")))?;
        self.set(section, key, value);
        Ok(())
    }

    pub fn set(&mut self, section: &str, key: &str, value: &str) {
        self.values
            .entry(section.trim().to_ascii_lowercase())
            .or_default()
            .insert(key.trim().to_ascii_lowercase(), value.trim().to_string());
    }

    /// Keeps a key out of the echo (for output locations).
    pub fn exclude_from_echo(&mut self, section: &str, key: &str) {
        self.silent.insert((section.to_string(), key.to_string()));
    }

    fn raw(&self, section: &str, key: &str) -> Option<&str> {
        self.values.get(section).and_then(|s| s.get(key)).map(String::as_str)
    }

    fn record(&self, section: &str, key: &str, text: &str) {
        if self.silent.contains(&(section.to_string(), key.to_string())) {
            return;
        }
        self.echo
            .borrow_mut()
            .entry(section.to_string())
            .or_default()
            .insert(key.to_string(), text.to_string());
    }

    /// Reads a key with a textual default through `parse`.
    pub fn value_with<T>(
        &self,
        section: &str,
        key: &str,
        default: &str,
        parse: impl FnOnce(&str) -> Result<T, String>,
    ) -> CliResult<T> {
        let text = self.raw(section, key).unwrap_or(default).to_string();
        let parsed = parse(&text).map_err(|e| config_err(format!("{section}.{key} = '{text}': {e}")))?;
        self.record(section, key, &text);
        Ok(parsed)
    }

    pub fn value<T>(&self, section: &str, key: &str, default: &str) -> CliResult<T>
    where
        T: FromStr,
        T::Err: std::fmt::Display,
    {
        self.value_with(section, key, default, |s| s.parse::<T>().map_err(|e| e.to_string()))
    }

    /// Reads an optional key; absent keys are not echoed.
    pub fn optional<T>(&self, section: &str, key: &str) -> CliResult<Option<T>>
    where
        T: FromStr,
        T::Err: std::fmt::Display,
    {
        match self.raw(section, key) {
            None => Ok(None),
            Some(_) => self.value(section, key, "").map(Some),
        }
    }

    /// An optional path, resolved against the config file's directory and checked for existence.
    pub fn input_path(&self, section: &str, key: &str) -> CliResult<Option<PathBuf>> {
        let Some(text) = self.optional::<String>(section, key)? else {
            return Ok(None);
        };
        let path = self.base_dir.join(&text);
        if !path.exists() {
            return Err(config_err(format!("{section}.{key}: {} does not exist", path.display())));
        }
        Ok(Some(path))
    }

    /// Fails on any key that no getter asked for.
    pub fn check_unused(&self) -> CliResult<()> {
        let echo = self.echo.borrow();
        for (section, keys) in &self.values {
            for key in keys.keys() {
                let used = echo.get(section).is_some_and(|s| s.contains_key(key))
                    || self.silent.contains(&(section.clone(), key.clone()));
                if !used {
                    return Err(config_err(format!("unknown or unused key {section}.{key}")));
                }
            }
        }
        Ok(())
    }

    /// The effective configuration as INI text, sections and keys sorted.
    pub fn echo(&self) -> String {
        let mut out = String::new();
        for (section, keys) in self.echo.borrow().iter() {
            let _ = writeln!(out, "[{section}]");
            for (key, value) in keys {
                let _ = writeln!(out, "{key} = {value}");
            }
            out.push('\n');
        }
        out
    }
}

pub fn parse_list<T>(text: &str) -> Result<Vec<T>, String>
where
    T: FromStr,
    T::Err: std::fmt::Display,
{
    let items: Vec<&str> = text.split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
    if items.is_empty() {
        return Err("empty list".into());
    }
    items.iter().map(|s| s.parse::<T>().map_err(|e| format!("'{s}': {e}"))).collect()
}

/// `a..b` (inclusive) or a comma-separated list.
pub fn parse_degrees(text: &str) -> Result<Vec<u32>, String> {
    if let Some((a, b)) = text.split_once("..") {
        let a: u32 = a.trim().parse().map_err(|e| format!("'{a}': {e}"))?;
        let b: u32 = b.trim().trim_start_matches('=').parse().map_err(|e| format!("'{b}': {e}"))?;
        if a > b {
            return Err(format!("empty range {a}..{b}"));
        }
        return Ok((a..=b).collect());
    }
    parse_list(text)
}

pub fn parse_triple<T>(text: &str) -> Result<[T; 3], String>
where
    T: FromStr + Copy,
    T::Err: std::fmt::Display,
{
    let v = parse_list::<T>(text)?;
    match v.as_slice() {
        [a, b, c] => Ok([*a, *b, *c]),
        _ => Err(format!("expected 3 values, got {}", v.len())),
    }
}

/// A real that may be `auto`.
pub fn parse_auto(text: &str) -> Result<Option<f64>, String> {
    if text.eq_ignore_ascii_case("auto") {
        return Ok(None);
    }
    text.parse::<f64>().map(Some).map_err(|e| e.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn settings(text: &str) -> Settings {
        Settings::parse(text, Path::new(".")).unwrap()
    }

    #[test]
    fn defaults_and_overrides_are_echoed() {
        let mut s = settings("[optimizer]\nmax_evaluations = 600\n");
        s.apply_override("optimizer.value_tol=1e-9").unwrap();
        assert_eq!(s.value::<usize>("optimizer", "max_evaluations", "10").unwrap(), 600);
        assert_eq!(s.value::<f64>("optimizer", "value_tol", "0").unwrap(), 1e-9);
        assert_eq!(s.value::<u32>("optimizer", "other", "7").unwrap(), 7);
        s.check_unused().unwrap();
        assert_eq!(s.echo(), "[optimizer]\nmax_evaluations = 600\nother = 7\nvalue_tol = 1e-9\n\n");
    }

    #[test]
    fn unknown_and_duplicate_keys_are_rejected() {
        let s = settings("[optimizer]\nmax_evals = 1\n");
        assert!(s.check_unused().is_err());
        assert!(Settings::parse("[a]\nx = 1\nx = 2\n", Path::new(".")).is_err());
        assert!(Settings::parse("x = 1\n", Path::new(".")).is_err());
    }

    #[test]
    fn result_section_is_ignored() {
        let s = settings("[result]\nfinal_cost = 1\n[run]\nseed = 3\n");
        assert_eq!(s.value::<u64>("run", "seed", "1").unwrap(), 3);
        s.check_unused().unwrap();
    }

    #[test]
    fn list_parsers() {
        assert_eq!(parse_degrees("1..4").unwrap(), vec![1, 2, 3, 4]);
        assert_eq!(parse_degrees("2, 5").unwrap(), vec![2, 5]);
        assert!(parse_degrees("5..1").is_err());
        assert_eq!(parse_triple::<usize>("3,1,1").unwrap(), [3, 1, 1]);
        assert!(parse_triple::<usize>("3,1").is_err());
        assert_eq!(parse_auto("auto").unwrap(), None);
    }
}
