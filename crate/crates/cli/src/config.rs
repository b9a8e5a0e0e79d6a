//! Experiment configuration: a sectioned `key = value` file plus
//! `section.key=value` overrides.
//!
//! ```text
//! [experiment]
//! id = golden
//! seed = 7
//! [group]
//! builtin = torus 1        # or: file = heis.txt
//! [sequence]
//! kind = orbit             # or: poly, with `file = seq.txt` or `coeff = j k : values` lines
//! g0 = 0.6180339887498949
//! x = 0
//! [function]
//! kind = character
//! eta = 1
//! [weight]
//! kind = mobius            # liouville, signs, table (with `file`)
//! [corr]
//! H = 256
//! N = 100000
//! ```

use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::Arc;

use nilcorr::equidist::TestFunction;
use nilcorr::polyseq::{PolySeq2, ScalarText};
use nilcorr::textfmt::{parse_list, Document, Line, Section};
use nilcorr::{Error, GroupElement, HorizontalCharacter, MalcevPresentation};
use sha2::{Digest, Sha256};

/// Keys that only affect scheduling and storage, not results.
const UNHASHED: [(&str, &str); 2] = [("experiment", "threads"), ("experiment", "cache_dir")];

#[derive(Debug)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<Error> for ConfigError {
    fn from(e: Error) -> Self {
        ConfigError(e.to_string())
    }
}

pub type CResult<T> = std::result::Result<T, ConfigError>;

pub struct ExperimentConfig {
    pub path: PathBuf,
    pub doc: Document,
    /// Contents of every file the config refers to, in load order.
    included: Vec<(String, Vec<u8>)>,
}

impl ExperimentConfig {
    pub fn load(path: &Path, overrides: &[String]) -> CResult<Self> {
        let text = fs::read_to_string(path).map_err(|e| ConfigError(format!("{}: {e}", path.display())))?;
        let mut doc = Document::parse(&text).map_err(|e| ConfigError(format!("{}: {e}", path.display())))?;
        for o in overrides {
            apply_override(&mut doc, o)?;
        }
        Ok(ExperimentConfig { path: path.to_path_buf(), doc, included: Vec::new() })
    }

    pub fn set(&mut self, section: &str, key: &str, value: &str) {
        set_key(&mut self.doc, section, key, value);
    }

    fn section(&self, name: &str) -> CResult<&Section> {
        self.doc.section(name).ok_or_else(|| ConfigError(format!("missing section [{name}]")))
    }

    fn at(&self, sec: &str, line: usize, msg: impl std::fmt::Display) -> ConfigError {
        if line == 0 {
            ConfigError(format!("{}: [{sec}]: {msg}", self.path.display()))
        } else {
            ConfigError(format!("{}:{line}: [{sec}]: {msg}", self.path.display()))
        }
    }

    pub fn get_str(&self, sec: &str, key: &str) -> Option<String> {
        self.doc.section(sec)?.get(key).map(|(v, _)| v)
    }

    pub fn require_str(&self, sec: &str, key: &str) -> CResult<String> {
        let s = self.section(sec)?;
        s.get(key).map(|(v, _)| v).ok_or_else(|| self.at(sec, s.lineno, format!("missing key {key:?}")))
    }

    pub fn get<T: FromStr>(&self, sec: &str, key: &str) -> CResult<Option<T>> {
        let Some(s) = self.doc.section(sec) else { return Ok(None) };
        match s.get(key) {
            None => Ok(None),
            Some((v, l)) => v.parse().map(Some).map_err(|_| self.at(sec, l, format!("cannot parse {key} = {v:?}"))),
        }
    }

    pub fn get_or<T: FromStr>(&self, sec: &str, key: &str, default: T) -> CResult<T> {
        Ok(self.get(sec, key)?.unwrap_or(default))
    }

    pub fn require<T: FromStr>(&self, sec: &str, key: &str) -> CResult<T> {
        let s = self.section(sec)?;
        self.get(sec, key)?.ok_or_else(|| self.at(sec, s.lineno, format!("missing key {key:?}")))
    }

    pub fn list<T: FromStr>(&self, sec: &str, key: &str) -> CResult<Option<Vec<T>>> {
        let Some(s) = self.doc.section(sec) else { return Ok(None) };
        match s.get(key) {
            None => Ok(None),
            Some((v, l)) => parse_list(&v, l).map(Some).map_err(|e| self.at(sec, l, e)),
        }
    }

    pub fn flag(&self, sec: &str, key: &str) -> CResult<bool> {
        self.get_or(sec, key, false)
    }

    /// Paths in the config are relative to the config file.
    fn resolve(&self, p: &str) -> PathBuf {
        let p = Path::new(p);
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.path.parent().unwrap_or(Path::new(".")).join(p)
        }
    }

    pub fn read_file(&mut self, sec: &str, key: &str) -> CResult<String> {
        let rel = self.require_str(sec, key)?;
        let path = self.resolve(&rel);
        let bytes = fs::read(&path).map_err(|e| ConfigError(format!("{}: {e}", path.display())))?;
        let text = String::from_utf8(bytes.clone()).map_err(|_| ConfigError(format!("{}: not UTF-8", path.display())))?;
        self.included.push((rel, bytes));
        Ok(text)
    }

    pub fn experiment_id(&self) -> String {
        self.get_str("experiment", "id").unwrap_or_else(|| "run".into())
    }

    pub fn seed(&self) -> CResult<u64> {
        self.get_or("experiment", "seed", 0)
    }

    /// SHA-256 over the normalised config and every included file.
    pub fn hash(&self) -> String {
        let mut h = Sha256::new();
        for s in &self.doc.sections {
            h.update(format!("[{}]\n", s.name));
            for l in effective_lines(s) {
                h.update(l);
                h.update("\n");
            }
        }
        for (name, bytes) in &self.included {
            h.update(format!("@{name} {}\n", bytes.len()));
            h.update(bytes);
        }
        hex::encode(h.finalize())
    }

    pub fn presentation(&mut self) -> CResult<Arc<MalcevPresentation>> {
        if self.doc.section("group").and_then(|s| s.get("file")).is_some() {
            let text = self.read_file("group", "file")?;
            let p = MalcevPresentation::parse(&text).map_err(|e| self.at("group", 0, e))?;
            if !p.lattice_is_closed() {
                log::warn!("integer points are not closed under this group law; reductions are still well defined");
            }
            return Ok(Arc::new(p));
        }
        let b = self.require_str("group", "builtin")?;
        let parts: Vec<&str> = b.split_whitespace().collect();
        let p = match parts.as_slice() {
            ["heisenberg"] => MalcevPresentation::heisenberg(),
            ["heisenberg5"] => MalcevPresentation::heisenberg5(),
            ["torus"] => MalcevPresentation::torus(1),
            ["torus", m] => match m.parse::<usize>() {
                Ok(m) if m >= 1 => MalcevPresentation::torus(m),
                _ => return Err(self.at("group", 0, format!("bad torus dimension {m:?}"))),
            },
            _ => return Err(self.at("group", 0, format!("unknown builtin group {b:?}"))),
        };
        Ok(Arc::new(p))
    }

    fn element<S: ScalarText>(&self, pres: &MalcevPresentation, key: &str) -> CResult<GroupElement<S>> {
        let s = self.section("sequence")?;
        let coords = match s.get(key) {
            None => vec![S::zero(); pres.m()],
            Some((v, l)) => v
                .split(|c: char| c == ',' || c.is_whitespace())
                .filter(|t| !t.is_empty())
                .map(|t| S::read(t, l))
                .collect::<nilcorr::Result<Vec<S>>>()
                .map_err(|e| self.at("sequence", l, e))?,
        };
        if coords.len() != pres.m() {
            return Err(self.at("sequence", s.lineno, format!("{key} needs {} coordinates, got {}", pres.m(), coords.len())));
        }
        Ok(GroupElement::new(coords))
    }

    pub fn sequence_kind(&self) -> CResult<String> {
        Ok(self.get_str("sequence", "kind").unwrap_or_else(|| "orbit".into()))
    }

    /// `(g0, x)` of an orbit sequence.
    pub fn orbit<S: ScalarText>(&self, pres: &MalcevPresentation) -> CResult<(GroupElement<S>, GroupElement<S>)> {
        Ok((self.element(pres, "g0")?, self.element(pres, "x")?))
    }

    /// The sequence as a polynomial map in the given flavor.
    pub fn polyseq<S: ScalarText>(&mut self, pres: Arc<MalcevPresentation>) -> CResult<PolySeq2<S>> {
        match self.sequence_kind()?.as_str() {
            "orbit" => {
                let (g0, x) = self.orbit::<S>(&pres)?;
                PolySeq2::from_orbit(pres, &g0, &x).map_err(|e| self.at("sequence", 0, e))
            }
            "poly" => {
                let text = if self.doc.section("sequence").and_then(|s| s.get("file")).is_some() {
                    self.read_file("sequence", "file")?
                } else {
                    let s = self.section("sequence")?;
                    let mut t = format!("[polyseq]\nm = {}\nd = {}\n[coefficients]\n", pres.m(), pres.degree());
                    for (k, v, _) in s.pairs()? {
                        if k == "coeff" {
                            t.push_str(&v);
                            t.push('\n');
                        }
                    }
                    t
                };
                PolySeq2::from_text(pres, &text).map_err(|e| self.at("sequence", 0, e))
            }
            k => Err(self.at("sequence", 0, format!("unknown sequence kind {k:?}"))),
        }
    }

    pub fn function(&self, pres: &MalcevPresentation) -> CResult<TestFunction> {
        let kind = self.get_str("function", "kind").unwrap_or_else(|| "character".into());
        match kind.as_str() {
            "character" => {
                let eta: Vec<i64> = self.list("function", "eta")?.unwrap_or_else(|| {
                    let mut v = vec![0; pres.m()];
                    v[0] = 1;
                    v
                });
                let eta = HorizontalCharacter::new(eta);
                pres.check_character(&eta).map_err(|e| self.at("function", 0, e))?;
                Ok(TestFunction::character(eta))
            }
            "constant" => Ok(TestFunction::constant(self.get_or("function", "value", 1.0)?)),
            k => Err(self.at("function", 0, format!("unknown function kind {k:?}"))),
        }
    }
}

fn effective_lines(s: &Section) -> Vec<String> {
    let hashed = |k: &str| !UNHASHED.contains(&(s.name.as_str(), k));
    match s.pairs() {
        Ok(pairs) => {
            // later assignments win, so hash only the surviving value of each key
            let mut out: Vec<(String, String)> = Vec::new();
            for (k, v, _) in pairs {
                if k != "coeff" {
                    out.retain(|(k2, _)| *k2 != k);
                }
                out.push((k, v));
            }
            out.into_iter().filter(|(k, _)| hashed(k)).map(|(k, v)| format!("{k} = {v}")).collect()
        }
        Err(_) => s.lines.iter().map(|l| l.text.clone()).collect(),
    }
}

fn set_key(doc: &mut Document, section: &str, key: &str, value: &str) {
    let text = format!("{key} = {value}");
    match doc.sections.iter_mut().find(|s| s.name == section) {
        Some(s) => s.lines.push(Line { lineno: 0, text }),
        None => doc.sections.push(Section {
            name: section.to_string(),
            lineno: 0,
            lines: vec![Line { lineno: 0, text }],
        }),
    }
}

fn apply_override(doc: &mut Document, o: &str) -> CResult<()> {
    let bad = || ConfigError(format!("override {o:?} must read section.key=value"));
    let (lhs, value) = o.split_once('=').ok_or_else(bad)?;
    let (section, key) = lhs.trim().split_once('.').ok_or_else(bad)?;
    if section.is_empty() || key.is_empty() {
        return Err(bad());
    }
    set_key(doc, section.trim(), key.trim(), value.trim());
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(text: &str, overrides: &[&str]) -> ExperimentConfig {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("c.cfg");
        fs::write(&p, text).unwrap();
        let o: Vec<String> = overrides.iter().map(|s| s.to_string()).collect();
        ExperimentConfig::load(&p, &o).unwrap()
    }

    #[test]
    fn overrides_win_and_change_the_hash() {
        let base = "[experiment]\nid = a\n[corr]\nH = 10\n";
        let a = cfg(base, &[]);
        let b = cfg(base, &["corr.H=20"]);
        assert_eq!(b.require::<u64>("corr", "H").unwrap(), 20);
        assert_ne!(a.hash(), b.hash());
        let c = cfg("[experiment]\nid = a\n[corr]\nH = 20\n", &[]);
        assert_eq!(b.hash(), c.hash());
    }

    #[test]
    fn scheduling_keys_do_not_change_the_hash() {
        let a = cfg("[experiment]\nid = a\n", &[]);
        let b = cfg("[experiment]\nid = a\nthreads = 8\n", &["experiment.cache_dir=/tmp/x"]);
        assert_eq!(a.hash(), b.hash());
    }

    #[test]
    fn errors_carry_locations() {
        let c = cfg("[corr]\nH = ten\n", &[]);
        let e = c.require::<u64>("corr", "H").unwrap_err();
        assert!(e.0.contains(":2:"), "{}", e.0);
        assert!(ExperimentConfig::load(Path::new("/nonexistent.cfg"), &[]).is_err());
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("c.cfg");
        fs::write(&p, "[a]\n").unwrap();
        assert!(ExperimentConfig::load(&p, &["nodot=1".into()]).is_err());
    }
}
