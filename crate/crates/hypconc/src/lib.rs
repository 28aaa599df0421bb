//! Report formats, seeded random families and batch experiments on top of
//! `hypconc-core`. The `hypconc` binary is a thin CLI over [`experiments`].

// `!(x > 0.0)` is used on purpose so that NaN fails validation
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod experiments;
pub mod families;
pub mod format;
