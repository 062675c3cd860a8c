use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

/// Coarse node class of a template node.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum BaseType {
    Variable,
    Op,
    Literal,
    Builtin,
    Type,
    Attribute,
    Expr,
    Stmt,
}

impl BaseType {
    pub const ALL: [BaseType; 8] = [
        BaseType::Variable,
        BaseType::Op,
        BaseType::Literal,
        BaseType::Builtin,
        BaseType::Type,
        BaseType::Attribute,
        BaseType::Expr,
        BaseType::Stmt,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            BaseType::Variable => "Variable",
            BaseType::Op => "Op",
            BaseType::Literal => "Literal",
            BaseType::Builtin => "Builtin",
            BaseType::Type => "Type",
            BaseType::Attribute => "Attribute",
            BaseType::Expr => "Expr",
            BaseType::Stmt => "Stmt",
        }
    }
}

impl fmt::Display for BaseType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("unknown base type `{0}`")]
pub struct UnknownBaseType(pub String);

impl FromStr for BaseType {
    type Err = UnknownBaseType;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        BaseType::ALL
            .into_iter()
            .find(|b| b.as_str() == s)
            .ok_or_else(|| UnknownBaseType(s.to_string()))
    }
}

const DEFAULT_TABLE: &str = include_str!("../../data/base_types.toml");

#[derive(Debug, thiserror::Error)]
pub enum TableError {
    #[error("invalid base type table: {0}")]
    Toml(#[from] toml::de::Error),
    #[error("invalid base type table: {0}")]
    BaseType(#[from] UnknownBaseType),
}

#[derive(Deserialize)]
struct RawTable {
    default: String,
    stmt: Vec<String>,
    op: Vec<String>,
    literal: Vec<String>,
    attribute: Vec<String>,
    identifier: Vec<String>,
    type_positions: Vec<String>,
    builtin_types: Vec<String>,
    builtin_functions: Vec<String>,
}

/// Classification table from syntax kinds to base types.
#[derive(Clone, Debug)]
pub struct BaseTypeTable {
    default: BaseType,
    stmt: BTreeSet<String>,
    op: BTreeSet<String>,
    literal: BTreeSet<String>,
    attribute: BTreeSet<String>,
    identifier: BTreeSet<String>,
    type_positions: BTreeSet<String>,
    builtin_types: BTreeSet<String>,
    builtin_functions: BTreeSet<String>,
}

impl BaseTypeTable {
    pub fn from_toml(text: &str) -> Result<Self, TableError> {
        let raw: RawTable = toml::from_str(text)?;
        let set = |v: Vec<String>| v.into_iter().collect::<BTreeSet<_>>();
        Ok(BaseTypeTable {
            default: raw.default.parse()?,
            stmt: set(raw.stmt),
            op: set(raw.op),
            literal: set(raw.literal),
            attribute: set(raw.attribute),
            identifier: set(raw.identifier),
            type_positions: set(raw.type_positions),
            builtin_types: set(raw.builtin_types),
            builtin_functions: set(raw.builtin_functions),
        })
    }

    /// The table shipped with the crate.
    pub fn builtin() -> &'static BaseTypeTable {
        static TABLE: OnceLock<BaseTypeTable> = OnceLock::new();
        TABLE.get_or_init(|| BaseTypeTable::from_toml(DEFAULT_TABLE).expect("bundled base type table is valid"))
    }

    /// Base type of a node of `kind` hanging under `relation`, with identifier
    /// text `value` where the kind carries one.
    pub fn classify(&self, kind: &str, relation: Option<&str>, value: Option<&str>) -> BaseType {
        if self.stmt.contains(kind) {
            BaseType::Stmt
        } else if self.op.contains(kind) {
            BaseType::Op
        } else if self.literal.contains(kind) {
            BaseType::Literal
        } else if self.attribute.contains(kind) {
            BaseType::Attribute
        } else if self.identifier.contains(kind) {
            if kind == "arg" {
                return BaseType::Variable;
            }
            let value = value.unwrap_or("");
            if relation.is_some_and(|r| self.type_positions.contains(r)) || self.builtin_types.contains(value) {
                BaseType::Type
            } else if self.builtin_functions.contains(value) {
                BaseType::Builtin
            } else {
                BaseType::Variable
            }
        } else {
            self.default
        }
    }
}

/// Classifies with the bundled table.
pub fn classify_base_type(kind: &str, relation: Option<&str>, value: Option<&str>) -> BaseType {
    BaseTypeTable::builtin().classify(kind, relation, value)
}
