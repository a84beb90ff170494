//! Random and deterministic tree families.

pub mod attachment;
pub mod bst;
pub mod cmj;
pub mod deterministic;
pub mod gw;
pub mod model;
pub mod offspring;
pub mod simply_generated;
pub mod split;

pub use attachment::{sample_preferential_attachment, AttachmentSpec};
pub use cmj::{sample_cmj_tree, BirthSpec};
pub use gw::{cycle_lemma_rotate, sample_conditioned_gw, ConditionedGw, GwMethod};
pub use model::{ModelConfig, ModelSpec, PreparedModel};
pub use offspring::OffspringSpec;
pub use simply_generated::{sample_simply_generated_exact, SimplyGenerated};
pub use split::{sample_split_tree, SplitSpec, Splitter};
