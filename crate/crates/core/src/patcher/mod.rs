//! Applying templates to a buggy program, prompting a mask filler and
//! checking the resulting patches.

pub mod apply;
pub mod filler;
pub mod generate;
pub mod prompt;
pub mod splice;
pub mod validate;

pub use apply::{apply_template, complete_required, embeddings, Application, ApplyError, MAX_EMBEDDINGS};
pub use filler::{Fill, FillError, HttpFiller, MaskFiller, MockFiller, MockRule};
pub use generate::{generate_patches, CandidatePatch, GenerateError, GenerateOptions, Generation, PatchStatus};
pub use splice::Rendering;
pub use prompt::{fill_holes, mask_sequence, mask_token, render_prompt, CodePrompt, PromptError, MAX_MASKS};
pub use validate::{tree_checksum, validate_candidates, SandboxError, TestOutcome, ValidationOptions, ValidationReport};
