//! Sectioned plain-text format shared by presentation files, sequence dumps
//! and experiment configs.
//!
//! ```text
//! # comment
//! [section]
//! key = value
//! free-form line
//! ```

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct Line {
    pub lineno: usize,
    pub text: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Section {
    pub name: String,
    pub lineno: usize,
    pub lines: Vec<Line>,
}

impl Section {
    /// Parse every line as `key = value`.
    pub fn pairs(&self) -> Result<Vec<(String, String, usize)>> {
        self.lines
            .iter()
            .map(|l| {
                let (k, v) = l.text.split_once('=').ok_or_else(|| Error::Parse {
                    line: l.lineno,
                    msg: format!("expected key = value, got {:?}", l.text),
                })?;
                Ok((k.trim().to_string(), v.trim().to_string(), l.lineno))
            })
            .collect()
    }

    pub fn get(&self, key: &str) -> Option<(String, usize)> {
        self.pairs()
            .ok()?
            .into_iter()
            .rev()
            .find(|(k, _, _)| k == key)
            .map(|(_, v, l)| (v, l))
    }

    pub fn require(&self, key: &str) -> Result<(String, usize)> {
        self.get(key).ok_or_else(|| Error::Parse {
            line: self.lineno,
            msg: format!("section [{}] is missing key {key:?}", self.name),
        })
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Document {
    pub sections: Vec<Section>,
}

impl Document {
    pub fn parse(text: &str) -> Result<Document> {
        let mut doc = Document::default();
        for (i, raw) in text.lines().enumerate() {
            let lineno = i + 1;
            let t = match raw.find('#') {
                Some(p) => &raw[..p],
                None => raw,
            }
            .trim();
            if t.is_empty() {
                continue;
            }
            if let Some(rest) = t.strip_prefix('[') {
                let name = rest.strip_suffix(']').ok_or_else(|| Error::Parse {
                    line: lineno,
                    msg: "unterminated section header".into(),
                })?;
                doc.sections.push(Section {
                    name: name.trim().to_string(),
                    lineno,
                    lines: Vec::new(),
                });
                continue;
            }
            match doc.sections.last_mut() {
                Some(s) => s.lines.push(Line { lineno, text: t.to_string() }),
                None => {
                    return Err(Error::Parse {
                        line: lineno,
                        msg: "content before the first section header".into(),
                    })
                }
            }
        }
        Ok(doc)
    }

    pub fn section(&self, name: &str) -> Option<&Section> {
        self.sections.iter().find(|s| s.name == name)
    }

    pub fn require(&self, name: &str) -> Result<&Section> {
        self.section(name).ok_or_else(|| Error::Parse {
            line: 0,
            msg: format!("missing section [{name}]"),
        })
    }
}

pub fn parse_num<T: std::str::FromStr>(s: &str, line: usize) -> Result<T> {
    s.trim().parse::<T>().map_err(|_| Error::Parse {
        line,
        msg: format!("cannot parse {s:?}"),
    })
}

pub fn parse_list<T: std::str::FromStr>(s: &str, line: usize) -> Result<Vec<T>> {
    s.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| parse_num(t, line))
        .collect()
}
