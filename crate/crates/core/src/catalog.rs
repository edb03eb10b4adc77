//! Named code definitions loaded from JSON, resolved ahead of the built-ins.
//!
//! A catalog file is a JSON array of entries such as
//!
//! ```json
//! [
//!   {"name": "rep3b", "type": "classical", "H": [[1,1,0],[0,1,1]], "d": 3},
//!   {"name": "steane2", "type": "css", "HZ": [[1,0,0,1,1,0,1]], "HX": [[0,1,0,1,0,1,1]]}
//! ]
//! ```

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::classical::ClassicalCode;
use crate::css::CssCode;
use crate::error::{Error, Result};
use crate::gf2::{BinaryMatrix, BinaryVector};

/// Built-in classical codes listed by [`Catalog::names`]. Any `rep<n>` also
/// resolves.
pub const BUILTIN_CLASSICAL: [&str; 4] = ["rep3", "rep5", "hamming74", "golay23"];

/// Built-in CSS codes.
pub const BUILTIN_CSS: [&str; 2] = ["steane", "golay_q"];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum CatalogEntry {
    Classical {
        name: String,
        #[serde(rename = "H")]
        h: BinaryMatrix,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        d: Option<usize>,
    },
    Css {
        name: String,
        #[serde(rename = "HZ")]
        hz: BinaryMatrix,
        #[serde(rename = "HX")]
        hx: BinaryMatrix,
        #[serde(rename = "logicalX", default, skip_serializing_if = "Option::is_none")]
        logical_x: Option<BinaryVector>,
        #[serde(rename = "logicalZ", default, skip_serializing_if = "Option::is_none")]
        logical_z: Option<BinaryVector>,
    },
}

impl CatalogEntry {
    pub fn name(&self) -> &str {
        match self {
            CatalogEntry::Classical { name, .. } | CatalogEntry::Css { name, .. } => name,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            CatalogEntry::Classical { .. } => "classical",
            CatalogEntry::Css { .. } => "css",
        }
    }
}

/// User entries plus the built-in codes.
#[derive(Clone, Debug, Default)]
pub struct Catalog {
    entries: Vec<CatalogEntry>,
}

impl Catalog {
    /// A catalog holding only the built-ins.
    pub fn builtin() -> Self {
        Self::default()
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let entries: Vec<CatalogEntry> =
            serde_json::from_str(text).map_err(|e| Error::Catalog(format!("malformed catalog: {e}")))?;
        let mut names: Vec<&str> = entries.iter().map(CatalogEntry::name).collect();
        names.sort_unstable();
        if let Some(w) = names.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::Catalog(format!("duplicate entry {:?}", w[0])));
        }
        Ok(Self { entries })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Catalog(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn entries(&self) -> &[CatalogEntry] {
        &self.entries
    }

    fn find(&self, name: &str) -> Option<&CatalogEntry> {
        self.entries.iter().find(|e| e.name() == name)
    }

    pub fn classical(&self, name: &str) -> Result<ClassicalCode> {
        match self.find(name) {
            Some(CatalogEntry::Classical { h, d, .. }) => ClassicalCode::from_parity_check(name, h, *d),
            Some(other) => Err(Error::Catalog(format!(
                "{name:?} is a {} code, expected classical",
                other.kind()
            ))),
            None => ClassicalCode::builtin(name).map_err(|e| match e {
                Error::UnknownCode(_) => {
                    Error::Catalog(format!("no classical code named {name:?} in the catalog or built-ins"))
                }
                other => other,
            }),
        }
    }

    pub fn css(&self, name: &str) -> Result<CssCode> {
        match self.find(name) {
            Some(CatalogEntry::Css {
                hz,
                hx,
                logical_x,
                logical_z,
                ..
            }) => {
                let hint = match (logical_x, logical_z) {
                    (Some(x), Some(z)) => Some((x.clone(), z.clone())),
                    (None, None) => None,
                    _ => {
                        return Err(Error::Catalog(format!(
                            "{name:?}: give both logicalX and logicalZ or neither"
                        )))
                    }
                };
                CssCode::from_matrices(name, hz, hx, hint)
            }
            Some(other) => Err(Error::Catalog(format!(
                "{name:?} is a {} code, expected css",
                other.kind()
            ))),
            None => CssCode::builtin(name).map_err(|e| match e {
                Error::UnknownCode(_) => {
                    Error::Catalog(format!("no css code named {name:?} in the catalog or built-ins"))
                }
                other => other,
            }),
        }
    }

    /// `(name, type)` for every resolvable named code, catalog entries first.
    pub fn names(&self) -> Vec<(String, &'static str)> {
        let mut out: Vec<(String, &'static str)> =
            self.entries.iter().map(|e| (e.name().to_string(), e.kind())).collect();
        for n in BUILTIN_CLASSICAL {
            if self.find(n).is_none() {
                out.push((n.to_string(), "classical"));
            }
        }
        for n in BUILTIN_CSS {
            if self.find(n).is_none() {
                out.push((n.to_string(), "css"));
            }
        }
        out
    }
}
