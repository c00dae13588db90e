//! Effective procedures around computable presentations of `l^p`: exact
//! vector arithmetic and the disjointness functional, stage-based
//! enumerations of Dedekind cuts with the compression construction, the
//! c.e.-set encoding presentation, and disintegration chains that rebuild
//! isometries from norm data.

pub mod exactnum;
pub mod lpspace;
pub mod presentation;
pub mod effective;
pub mod disintegration;
