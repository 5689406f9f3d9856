use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `omega(1.75) - 1.75`: the bound `omega(k) <= 1.271591 + k` used by the
/// closed-form parameter choices.
pub const LINEAR_OMEGA_OFFSET: f64 = 1.271591;

/// Known upper bounds `omega(k_i) <= w_i` on the exponent of multiplying an
/// `N x N^k` matrix by an `N^k x N` matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawTable", into = "RawTable")]
pub struct OmegaTable {
    anchors: Vec<(f64, f64)>,
}

#[derive(Serialize, Deserialize)]
struct RawTable {
    anchors: Vec<(f64, f64)>,
}

impl TryFrom<RawTable> for OmegaTable {
    type Error = Error;

    fn try_from(raw: RawTable) -> Result<Self> {
        OmegaTable::new(raw.anchors)
    }
}

impl From<OmegaTable> for RawTable {
    fn from(t: OmegaTable) -> Self {
        RawTable { anchors: t.anchors }
    }
}

impl Default for OmegaTable {
    fn default() -> Self {
        OmegaTable {
            anchors: vec![(0.0, 2.0), (1.0, 2.3728639), (1.75, 3.021591), (2.0, 3.252)],
        }
    }
}

impl OmegaTable {
    /// Anchors must be finite, have `k >= 0` strictly increasing and bounds `>= 2`.
    pub fn new(anchors: Vec<(f64, f64)>) -> Result<Self> {
        if anchors.is_empty() {
            return Err(Error::Invalid("omega table needs at least one anchor".into()));
        }
        for (i, &(k, w)) in anchors.iter().enumerate() {
            if !(k.is_finite() && w.is_finite() && k >= 0.0 && w >= 2.0) {
                return Err(Error::Invalid(format!("omega anchor ({k}, {w}) needs k >= 0 and bound >= 2")));
            }
            if i > 0 && anchors[i - 1].0 >= k {
                return Err(Error::Invalid("omega anchors must be sorted by strictly increasing k".into()));
            }
        }
        Ok(OmegaTable { anchors })
    }

    pub fn anchors(&self) -> &[(f64, f64)] {
        &self.anchors
    }

    /// A copy with one more anchor, keeping the order.
    pub fn with_anchor(&self, k: f64, w: f64) -> Result<Self> {
        let mut anchors = self.anchors.clone();
        anchors.retain(|&(ki, _)| ki != k);
        anchors.push((k, w));
        anchors.sort_by(|a, b| a.0.total_cmp(&b.0));
        OmegaTable::new(anchors)
    }

    /// `min_i [w_i + max(0, k - k_i)]`. Above an anchor the bound grows by at
    /// most the extra inner dimension; below it, zero padding embeds the smaller product.
    pub fn omega_upper(&self, k: f64) -> f64 {
        self.anchors
            .iter()
            .map(|&(ki, wi)| wi + (k - ki).max(0.0))
            .fold(f64::INFINITY, f64::min)
    }

    /// [`Self::omega_upper`] tightened by linear interpolation between
    /// consecutive anchors, which is valid because `omega` is convex.
    pub fn omega_convex(&self, k: f64) -> f64 {
        let chord = self.anchors.windows(2).find_map(|w| {
            let ((k0, w0), (k1, w1)) = (w[0], w[1]);
            (k0..=k1).contains(&k).then(|| w0 + (w1 - w0) * (k - k0) / (k1 - k0))
        });
        chord.map_or_else(|| self.omega_upper(k), |c| c.min(self.omega_upper(k)))
    }
}

/// Which upper bound on `omega(k)` the analysis uses.
#[derive(Clone, Debug, PartialEq)]
pub enum OmegaBound {
    /// `omega(k) <= 1.271591 + k`, the single anchor at `k = 1.75`.
    Paper,
    /// [`OmegaTable::omega_upper`] over a table.
    Table(OmegaTable),
    /// [`OmegaTable::omega_convex`] over a table.
    Convex(OmegaTable),
}

impl Default for OmegaBound {
    fn default() -> Self {
        OmegaBound::Table(OmegaTable::default())
    }
}

impl OmegaBound {
    pub fn omega(&self, k: f64) -> f64 {
        match self {
            OmegaBound::Paper => LINEAR_OMEGA_OFFSET + k,
            OmegaBound::Table(t) => t.omega_upper(k),
            OmegaBound::Convex(t) => t.omega_convex(k),
        }
    }

    pub fn mode(&self) -> &'static str {
        match self {
            OmegaBound::Paper => "paper",
            OmegaBound::Table(_) => "table",
            OmegaBound::Convex(_) => "convex",
        }
    }

    /// Build from a mode name and an optional custom table.
    pub fn from_mode(mode: &str, table: Option<OmegaTable>) -> Result<Self> {
        match mode {
            "paper" => Ok(OmegaBound::Paper),
            "table" => Ok(OmegaBound::Table(table.unwrap_or_default())),
            "convex" => Ok(OmegaBound::Convex(table.unwrap_or_default())),
            _ => Err(Error::Invalid(format!("unknown omega mode '{mode}' (expected paper, table or convex)"))),
        }
    }
}

impl fmt::Display for OmegaBound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.mode())
    }
}

impl FromStr for OmegaBound {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        OmegaBound::from_mode(s, None)
    }
}
