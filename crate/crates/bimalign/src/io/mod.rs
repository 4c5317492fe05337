//! File formats at the pipeline stage boundaries: every stage reads and
//! writes plain files so external tools can replace any stage.

pub mod obj;
pub mod ply;
