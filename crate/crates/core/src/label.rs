use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// Ground-truth annotation of a single object.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutlierKind {
    Inlier,
    Global,
    Local,
    Collective,
    /// Outlier of unspecified type (a `1` in a binary label column).
    Outlier,
}

impl OutlierKind {
    pub fn is_outlier(self) -> bool {
        self != OutlierKind::Inlier
    }

    pub fn as_str(self) -> &'static str {
        match self {
            OutlierKind::Inlier => "inlier",
            OutlierKind::Global => "global",
            OutlierKind::Local => "local",
            OutlierKind::Collective => "collective",
            OutlierKind::Outlier => "outlier",
        }
    }
}

impl fmt::Display for OutlierKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseLabelError(pub String);

impl fmt::Display for ParseLabelError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "unknown label '{}'", self.0)
    }
}

impl std::error::Error for ParseLabelError {}

impl FromStr for OutlierKind {
    type Err = ParseLabelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "inlier" | "0" => Ok(OutlierKind::Inlier),
            "global" => Ok(OutlierKind::Global),
            "local" => Ok(OutlierKind::Local),
            "collective" => Ok(OutlierKind::Collective),
            "outlier" | "1" => Ok(OutlierKind::Outlier),
            _ => Err(ParseLabelError(s.to_string())),
        }
    }
}
