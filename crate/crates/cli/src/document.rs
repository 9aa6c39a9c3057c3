//! The on-disk workspace format. Everything is JSON; matrices are row-major
//! integer lists and ring elements are coordinate lists in the additive basis.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

pub type Matrix = Vec<Vec<i64>>;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Document {
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub rings: BTreeMap<String, RingSpec>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub spaces: BTreeMap<String, SpaceSpec>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub maps: BTreeMap<String, MapSpec>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub sheaves: BTreeMap<String, SheafSpec>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub complexes: BTreeMap<String, ComplexSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub tasks: Vec<TaskSpec>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum RingSpec {
    /// `Z/n`
    Cyclic(u64),
    /// `Z/modulus[t]/(t^degree)`
    TruncatedPoly { modulus: u64, degree: usize },
    /// Additive orders of the basis, `products[i][j] = e_i e_j`, and the unit.
    Table { orders: Vec<u64>, products: Vec<Vec<Vec<i64>>>, one: Vec<i64> },
    Product(Box<RingRef>, Box<RingRef>),
}

/// A ring given by name or inline.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RingRef {
    Named(String),
    Inline(RingSpec),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum SpaceSpec {
    /// One of the built-in spaces: `point_z4`, `arrow`, `flat`, `flat_z4`,
    /// `wedge`, `pseudocircle`, `sphere`.
    Fixture(String),
    Poset(PosetSpace),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PosetSpace {
    pub points: Vec<String>,
    /// Pairs `[p, q]` with `p ≤ q`; the order is their transitive closure.
    #[serde(default)]
    pub order: Vec<(String, String)>,
    /// Ring at every point, unless overridden in `rings`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ring: Option<RingRef>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub rings: BTreeMap<String, RingRef>,
    /// Ring maps on covering relations. When omitted the map is the identity
    /// between equal rings, or the unique map out of a cyclic ring.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub restrictions: Vec<RingMapSpec>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RingMapSpec {
    pub from: String,
    pub to: String,
    /// Images of the basis elements of the source ring.
    pub images: Vec<Vec<i64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum MapSpec {
    Identity(String),
    /// The structure map to a point with the given cyclic ring.
    ToPoint { space: String, ring: RingRef },
    /// Inclusion of an open set; the open subspace is registered under `subspace`.
    Inclusion { space: String, open: Vec<String>, subspace: String },
    General {
        source: String,
        target: String,
        points: BTreeMap<String, String>,
        /// `O_{f(x)} -> O_x` as images of basis elements, per source point.
        comparison: BTreeMap<String, Vec<Vec<i64>>>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum ModuleSpec {
    /// `O^n`
    Free(usize),
    /// `O / (g_1, ..., g_k)`
    Quotient(Vec<Vec<i64>>),
    /// Abelian group `⊕ Z/orders[i]` with one action matrix per basis element of the ring.
    Group { orders: Vec<u64>, action: Vec<Matrix> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum SheafSpec {
    /// The structure sheaf of the named space.
    Structure(String),
    Explicit {
        space: String,
        stalks: BTreeMap<String, ModuleSpec>,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        restrictions: Vec<MatrixAt>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixAt {
    pub from: String,
    pub to: String,
    pub matrix: Matrix,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComplexSpec {
    #[serde(default)]
    pub lo: i64,
    /// Sheaf names, lowest degree first.
    pub terms: Vec<String>,
    /// `differentials[k]` maps `terms[k]` to `terms[k + 1]`, one matrix per
    /// point; missing points are zero.
    #[serde(default)]
    pub differentials: Vec<BTreeMap<String, Matrix>>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TaskSpec {
    pub task: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub space: Option<String>,
    /// A sheaf or complex.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub object: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub map: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<(i64, i64)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub depth: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub steps: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    /// For `model`: named subsets of `space` covering it.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub covering: Option<Vec<Vec<String>>>,
    /// For `model`: maximal simplices of a simplicial complex.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub simplices: Option<Vec<Vec<String>>>,
}

pub fn parse(text: &str) -> Result<Document, serde_json::Error> {
    if text.trim().is_empty() {
        return Ok(Document::default());
    }
    serde_json::from_str(text)
}

pub fn serialize(doc: &Document) -> String {
    serde_json::to_string_pretty(doc).expect("documents serialize")
}
