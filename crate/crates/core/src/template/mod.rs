//! Template trees, fix templates, clustering trees and their JSON form.

pub mod base_type;
pub mod cluster;
pub mod fix_template;
pub mod json;
pub mod tree;

pub use base_type::{classify_base_type, BaseType, BaseTypeTable, TableError, UnknownBaseType};
pub use cluster::{ClusterNode, ClusteringTree};
pub use fix_template::{
    category_of, concat, Attachment, Category, ExternalContext, FixPattern, FixTemplate, InternalContext,
    InvalidPattern, UnknownCategory,
};
pub use json::{
    deserialize_clustering_tree, deserialize_forest, deserialize_template, serialize_clustering_tree,
    serialize_forest, serialize_template, SchemaError, SCHEMA_VERSION,
};
pub use tree::{Slot, Subtree, TemplateNode, TemplateTree, TreeHash, GROUP_KIND, GROUP_RELATION};
