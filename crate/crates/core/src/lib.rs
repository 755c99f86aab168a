pub mod biext;
pub mod error;
pub mod fp;
pub mod gf;
pub mod json;
pub mod mgrp;
pub mod ore;
pub mod ppoly;

pub use biext::{metric_from_skew, metric_from_skew_matrix, BiextModel};
pub use error::{Error, Result};
pub use gf::{embed, fp_kernel, make_field, Field, FieldCtx, FieldElem};
pub use mgrp::{Caps, CycInt, MetricGroup, QpZp, WittClass, WittLabel};
pub use ore::{Kernel, OreMatrix, OrePoly};
pub use ppoly::{PExp, PerfectPoly};
