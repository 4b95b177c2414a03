// Negated comparisons are used on purpose so that NaN takes the failure branch.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod borel;
pub mod error;
pub mod geom;
pub mod hypvol;
pub mod linalg;
pub mod moebius;
pub mod optim;
pub mod rigidity;
pub mod tess;
pub mod veronese;
