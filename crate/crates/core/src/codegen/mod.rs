//! Back ends for programs over [`LowExpr`](crate::low::LowExpr).

pub mod c;
pub mod pseudo;
