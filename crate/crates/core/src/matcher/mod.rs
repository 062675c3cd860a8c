//! Selecting and ranking templates that apply to a buggy program.

pub mod coverage;
pub mod select;
pub mod tree_match;
pub mod view;

pub use coverage::{leave_one_out_coverage, subsumes, template_coverage, CoverageReport, FixCoverage};
pub use select::{bfs_select, rank, EmptyMatch, RankedGroup, RankedTemplates};
pub use tree_match::{match_sites, matches_at, node_matches, root_matches, tree_matches};
pub use view::{template_matches_view, BuggyProgramView, NoBugStatement};
