pub mod augment;
pub mod build;
pub mod eval;
pub mod fuse;
pub mod sweep;
pub mod train;
