//! Deciding implications between matrix conditions on pointed categories.

pub mod cli;
pub mod closure;
pub mod degeneracy;
pub mod enumeration;
pub mod localization;
pub mod matrix;
pub mod oracle;
pub mod partition;
