//! Exact computations around the kernel of `Q_I - 4` for the group ring
//! elements built from local rules on the free group of rank two.

pub mod dyadic;
pub mod error;
pub mod config;
pub mod cylinder;
pub mod geometry;
pub mod gf2;
pub mod subgroup;
pub mod union_find;
pub mod linalg;
pub mod quotient;
pub mod rational;
pub mod rules;
pub mod series;
